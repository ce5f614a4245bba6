//! Time series for a scenario and grid sweeps over parameter space.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gaussian::{
    entropy_renyi, entropy_vn, evolve, initial_covariance, linear_entropy, mean_lz, mode_occupation,
    CovarianceState,
};
use crate::model::{classify, derive_spectral, ModelParams};
use crate::propagator::{compose, propagate, Propagator};

use super::config::{Output, ScenarioConfig, SweepConfig, SweepOutput};
use super::table::{Cell, Table};

/// Occupations above this are reported as saturated rather than as numbers.
pub const SATURATION_LIMIT: f64 = 1e300;

/// State at one instant, or `None` once the numbers left floating-point range.
fn occupation(state: &CovarianceState) -> Result<Option<f64>> {
    if !state.matrix().iter().all(|x| x.is_finite()) {
        return Ok(None);
    }
    match mode_occupation(state) {
        Ok(f) if f.is_finite() && f <= SATURATION_LIMIT => Ok(Some(f)),
        Ok(_) | Err(Error::NonFinite(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

fn saturating(p: Result<Propagator>) -> Result<Option<Propagator>> {
    match p {
        Ok(p) => Ok(Some(p)),
        Err(Error::NonFinite(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// All sample times: the configured grid plus every interior schedule
/// boundary up to `t_max`, ascending and without repeats.
pub fn sample_times(config: &ScenarioConfig) -> Vec<f64> {
    let mut times = config.time_grid.times();
    if let Some(segments) = &config.schedule {
        let mut b = 0.0;
        for s in segments {
            b += s.duration;
            if b <= config.time_grid.t_max {
                times.push(b);
            }
        }
    }
    times.sort_by(f64::total_cmp);
    times.dedup();
    times
}

pub fn run_scenario(config: &ScenarioConfig, rel_tol: f64) -> Result<Table> {
    config.validate()?;
    let p = &config.params;
    let c0 = initial_covariance(&config.initial, p.k_x, p.k_y)?;
    let segments = config.segments()?;
    let outputs = config.ordered_outputs();

    // Exact evolution up to the start of each segment.
    let mut prefix: Vec<Option<Propagator>> = vec![Some(Propagator::identity())];
    for (start, end, params) in &segments[..segments.len() - 1] {
        let next = match prefix.last().expect("non-empty").as_ref() {
            Some(before) => saturating(propagate(params, end - start))?.map(|u| compose(before, &u)),
            None => None,
        };
        prefix.push(next);
    }

    let mut columns = vec!["t".to_string(), "omega".to_string()];
    columns.extend(outputs.iter().map(Output::column));
    columns.push("saturated".into());
    let mut table = Table::new(columns);

    let mut seg = 0;
    for t in sample_times(config) {
        while seg + 1 < segments.len() && t >= segments[seg].1 {
            seg += 1;
        }
        let (start, _, params) = segments[seg];
        let u = match &prefix[seg] {
            Some(before) => saturating(propagate(&params, t - start))?.map(|u| compose(before, &u)),
            None => None,
        };
        let state = u.map(|u| evolve(&c0, &u));
        let f = match &state {
            Some(s) => occupation(s)?,
            None => None,
        };

        let mut row = vec![Cell::Num(t), Cell::Num(params.omega())];
        for o in &outputs {
            let cell = match (o, f, &state) {
                (Output::Regime, _, _) => Cell::Text(classify(&params, rel_tol).name().into()),
                (_, None, _) => Cell::Null,
                (Output::F, Some(f), _) => Cell::Num(f),
                (Output::Entropy, Some(f), _) => Cell::Num(entropy_vn(f)?),
                (Output::LinearEntropy, Some(f), _) => Cell::Num(linear_entropy(f)?),
                (Output::Renyi(a), Some(f), _) => Cell::Num(entropy_renyi(f, *a)?),
                (Output::Lz, Some(_), Some(s)) => Cell::Num(mean_lz(s)),
                (Output::Lz, Some(_), None) => Cell::Null,
            };
            row.push(cell);
        }
        row.push(Cell::Bool(f.is_none()));
        table.rows.push(row);
    }
    Ok(table)
}

fn sweep_columns(config: &SweepConfig) -> (Vec<String>, [bool; 4]) {
    let want = |o: SweepOutput| config.outputs.contains(&o);
    let flags = [
        want(SweepOutput::Regime),
        want(SweepOutput::Lambda),
        want(SweepOutput::F),
        want(SweepOutput::Entropy),
    ];
    let mut cols: Vec<String> = ["k_x", "k_y", "omega"].iter().map(|s| s.to_string()).collect();
    if flags[0] {
        cols.push("regime".into());
    }
    if flags[1] {
        for c in ["lambda_plus_re", "lambda_plus_im", "lambda_minus_re", "lambda_minus_im"] {
            cols.push(c.into());
        }
    }
    if flags[2] {
        cols.push("f".into());
    }
    if flags[3] {
        cols.push("S".into());
    }
    if flags[2] || flags[3] {
        cols.push("saturated".into());
    }
    (cols, flags)
}

fn sweep_node(config: &SweepConfig, flags: [bool; 4], ratio: f64, omega: f64, rel_tol: f64) -> Result<Vec<Cell>> {
    let k_y = ratio * config.k_x;
    let params = ModelParams::new(config.k_x, k_y, omega)?;
    let mut row = vec![Cell::Num(config.k_x), Cell::Num(k_y), Cell::Num(omega)];
    if flags[0] {
        row.push(Cell::Text(classify(&params, rel_tol).name().into()));
    }
    if flags[1] {
        let sd = derive_spectral(&params);
        for z in [sd.lambda_plus, sd.lambda_minus] {
            row.push(Cell::Num(z.re));
            row.push(Cell::Num(z.im));
        }
    }
    if flags[2] || flags[3] {
        let t = config.t_eval.expect("validated");
        let c0 = initial_covariance(&config.initial, config.k_x, k_y)?;
        let f = match saturating(propagate(&params, t))? {
            Some(u) => occupation(&evolve(&c0, &u))?,
            None => None,
        };
        if flags[2] {
            row.push(f.map_or(Cell::Null, Cell::Num));
        }
        if flags[3] {
            row.push(match f {
                Some(f) => Cell::Num(entropy_vn(f)?),
                None => Cell::Null,
            });
        }
        row.push(Cell::Bool(f.is_none()));
    }
    Ok(row)
}

/// One row per grid node, ratio-major. Nodes are evaluated in parallel on the
/// current rayon pool; the row order does not depend on scheduling.
pub fn scan_phase_diagram(config: &SweepConfig, rel_tol: f64) -> Result<Table> {
    config.validate()?;
    let (columns, flags) = sweep_columns(config);
    let nodes: Vec<(f64, f64)> = config
        .ratio
        .values()
        .into_iter()
        .flat_map(|r| config.omega.values().into_iter().map(move |w| (r, w)))
        .collect();
    let rows = nodes
        .par_iter()
        .map(|&(r, w)| sweep_node(config, flags, r, w, rel_tol))
        .collect::<Result<Vec<_>>>()?;
    Ok(Table { columns, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::DEFAULT_REL_TOL;

    fn scenario(body: &str) -> ScenarioConfig {
        ScenarioConfig::from_json(body).unwrap()
    }

    #[test]
    fn uncoupled_ground_state_stays_separable() {
        let cfg = scenario(
            r#"{"params": {"k_y": 0.3, "omega": 0},
                "initial": {"kind": "ground_state_of_h0"},
                "time_grid": {"t_max": 50, "samples": 11, "spacing": "linear"},
                "outputs": ["f"]}"#,
        );
        let t = run_scenario(&cfg, DEFAULT_REL_TOL).unwrap();
        assert_eq!(t.columns, vec!["t", "omega", "f", "saturated"]);
        assert!(t.numeric_column("f").unwrap().iter().all(|f| *f == 0.0));
    }

    #[test]
    fn boundaries_are_sampled() {
        let cfg = scenario(
            r#"{"params": {"k_y": 0.5},
                "initial": {"kind": "ground_state_of_h0"},
                "time_grid": {"t_max": 100, "samples": 3, "spacing": "linear"},
                "schedule": [{"duration": 30, "omega": 0.5}, {"duration": 30, "omega": 0.7},
                             {"duration": 40, "omega": 0}],
                "outputs": ["S"]}"#,
        );
        assert_eq!(sample_times(&cfg), vec![0.0, 30.0, 50.0, 60.0, 100.0]);
        let t = run_scenario(&cfg, DEFAULT_REL_TOL).unwrap();
        let w = t.numeric_column("omega").unwrap();
        assert_eq!(w, vec![0.5, 0.7, 0.7, 0.0, 0.0]);
    }

    #[test]
    fn split_schedule_matches_single_segment() {
        let one = scenario(
            r#"{"params": {"k_y": 0.3},
                "initial": {"kind": "isotropic", "alpha": 1},
                "time_grid": {"t_max": 20, "samples": 41, "spacing": "linear"},
                "schedule": [{"duration": 20, "omega": 0.6}],
                "outputs": ["f", "lz"]}"#,
        );
        let mut two = one.clone();
        two.schedule = Some(vec![
            super::super::config::Segment { duration: 7.3, omega: 0.6 },
            super::super::config::Segment { duration: 12.7, omega: 0.6 },
        ]);
        let a = run_scenario(&one, DEFAULT_REL_TOL).unwrap();
        let b = run_scenario(&two, DEFAULT_REL_TOL).unwrap();
        let (ta, fa) = (a.numeric_column("t").unwrap(), a.numeric_column("f").unwrap());
        let (tb, fb) = (b.numeric_column("t").unwrap(), b.numeric_column("f").unwrap());
        for (t, f) in ta.iter().zip(&fa) {
            let j = tb.iter().position(|x| x == t).unwrap();
            assert!((f - fb[j]).abs() <= 1e-10 * f.max(1.0));
        }
    }

    #[test]
    fn deep_instability_saturates() {
        let cfg = scenario(
            r#"{"params": {"k_x": -4, "k_y": -4, "omega": 0.1},
                "initial": {"kind": "isotropic", "alpha": 1.3},
                "time_grid": {"t_max": 2000, "samples": 5, "spacing": "linear"},
                "outputs": ["f", "S", "regime"]}"#,
        );
        let t = run_scenario(&cfg, DEFAULT_REL_TOL).unwrap();
        let sat = t.column_index("saturated").unwrap();
        assert_eq!(t.rows[0][sat], Cell::Bool(false));
        assert_eq!(t.rows[4][sat], Cell::Bool(true));
        assert_eq!(t.rows[4][2], Cell::Null);
        assert_eq!(t.rows[4][4], Cell::Text("IsotropicLine".into()));
    }

    #[test]
    fn sweep_order_and_shape() {
        let cfg = SweepConfig::from_json(
            r#"{"ratio": {"min": 0.3, "max": 0.5, "points": 2},
                "omega": {"min": 0, "max": 2, "points": 3},
                "t_eval": 40,
                "initial": {"kind": "ground_state_of_h0"},
                "outputs": ["regime", "lambda", "S"]}"#,
        )
        .unwrap();
        let t = scan_phase_diagram(&cfg, DEFAULT_REL_TOL).unwrap();
        assert_eq!(t.rows.len(), 6);
        let ky = t.numeric_column("k_y").unwrap();
        let w = t.numeric_column("omega").unwrap();
        assert_eq!(ky, vec![0.3, 0.3, 0.3, 0.5, 0.5, 0.5]);
        assert_eq!(w, vec![0.0, 1.0, 2.0, 0.0, 1.0, 2.0]);
        assert_eq!(t.columns.len(), 3 + 1 + 4 + 1 + 1);
    }

    #[test]
    fn degenerate_grid() {
        let cfg = SweepConfig::from_json(
            r#"{"ratio": 0.3, "omega": {"min": 0, "max": 1, "points": 2},
                "initial": {"kind": "ground_state_of_h0"}}"#,
        )
        .unwrap();
        assert_eq!(scan_phase_diagram(&cfg, DEFAULT_REL_TOL).unwrap().rows.len(), 2);
    }
}
