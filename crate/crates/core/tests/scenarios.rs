use cranked::asymptotics::{growth_law, EntropyForm};
use cranked::cli::config::{ScenarioConfig, SweepConfig};
use cranked::cli::run::{run_scenario, scan_phase_diagram};
use cranked::cli::table::{Cell, Table};
use cranked::gaussian::InitialConditionSpec;
use cranked::model::{ModelParams, DEFAULT_REL_TOL};

fn run(json: &str) -> Table {
    run_scenario(&ScenarioConfig::from_json(json).unwrap(), DEFAULT_REL_TOL).unwrap()
}

fn text(table: &Table, row: usize, col: &str) -> String {
    match &table.rows[row][table.column_index(col).unwrap()] {
        Cell::Text(s) => s.clone(),
        other => panic!("{other:?}"),
    }
}

#[test]
fn split_schedule_equals_single_segment() {
    let base = |schedule: &str| {
        format!(
            r#"{{"params": {{"k_x": 1.0, "k_y": 0.3}}, "initial": {{"kind": "ground_state_of_h0"}},
                "time_grid": {{"t_max": 60.0, "samples": 121, "spacing": "linear"}},
                "schedule": {schedule}, "outputs": ["f", "S", "lz"]}}"#
        )
    };
    let whole = run(&base(r#"[{"duration": 60.0, "omega": 0.6}]"#));
    let split = run(&base(r#"[{"duration": 23.3, "omega": 0.6}, {"duration": 36.7, "omega": 0.6}]"#));
    let (ta, tb) = (whole.numeric_column("t").unwrap(), split.numeric_column("t").unwrap());
    for col in ["f", "S", "lz"] {
        let (a, b) = (whole.numeric_column(col).unwrap(), split.numeric_column(col).unwrap());
        for (i, t) in ta.iter().enumerate() {
            let j = tb.iter().position(|s| s == t).unwrap();
            assert!((a[i] - b[j]).abs() <= 1e-10 * a[i].abs().max(1.0), "{col} at t={t}: {} vs {}", a[i], b[j]);
        }
    }
}

#[test]
fn no_rotation_leaves_ground_state_unentangled() {
    let t = run(
        r#"{"params": {"k_x": 1.0, "k_y": 0.4, "omega": 0.0}, "initial": {"kind": "ground_state_of_h0"},
            "time_grid": {"t_max": 1000.0, "samples": 50, "spacing": "log", "t_min": 0.01}, "outputs": ["f", "lz"]}"#,
    );
    assert!(t.numeric_column("f").unwrap().iter().all(|&f| f == 0.0));
    assert!(t.numeric_column("lz").unwrap().iter().all(|&l| l.abs() < 1e-15));
}

#[test]
fn deep_unstable_runs_saturate_instead_of_failing() {
    let t = run(
        r#"{"params": {"k_x": -2.0, "k_y": -1.0, "omega": 0.2}, "initial": {"kind": "isotropic", "alpha": 1.0},
            "time_grid": {"t_max": 2000.0, "samples": 21, "spacing": "linear"}, "outputs": ["f", "S", "regime"]}"#,
    );
    let sat = t.column_index("saturated").unwrap();
    let flags: Vec<bool> = t.rows.iter().map(|r| r[sat] == Cell::Bool(true)).collect();
    assert!(!flags[0] && flags[20]);
    // Once saturated, stays saturated.
    let first = flags.iter().position(|&b| b).unwrap();
    assert!(flags[first..].iter().all(|&b| b));
    let f = t.column_index("f").unwrap();
    assert_eq!(t.rows[20][f], Cell::Null);
    assert_eq!(text(&t, 20, "regime"), "SectorC");
}

#[test]
fn rotating_frequency_classes_along_the_soft_mode() {
    let wy = 0.3f64.sqrt();
    let expected = [
        (0.5, EntropyForm::Quasiperiodic),
        (0.95, EntropyForm::Quasiperiodic),
        (1.0, EntropyForm::LogT),
        (1.05, EntropyForm::LinearT),
        (1.7, EntropyForm::LinearT),
        (1.95, EntropyForm::Quasiperiodic),
    ];
    for (ratio, form) in expected {
        let params = ModelParams::new(1.0, 0.3, ratio * wy).unwrap();
        let law = growth_law(&params, &InitialConditionSpec::GroundStateOfH0).unwrap();
        assert_eq!(law.entropy_form(), form, "omega = {ratio} omega_y");
    }
}

#[test]
fn phase_diagram_topology() {
    let cfg = SweepConfig::from_json(
        r#"{"ratio": {"min": -4.0, "max": 2.0, "points": 61}, "omega": {"min": 0.0, "max": 2.0, "points": 41},
            "initial": {"kind": "isotropic", "alpha": 1.0}, "outputs": ["regime", "lambda"]}"#,
    )
    .unwrap();
    let t = scan_phase_diagram(&cfg, DEFAULT_REL_TOL).unwrap();
    assert_eq!(t.rows.len(), 61 * 41);
    let ky = t.numeric_column("k_y").unwrap();
    let w = t.numeric_column("omega").unwrap();
    for i in 0..t.rows.len() {
        let regime = text(&t, i, "regime");
        let p = ModelParams::new(1.0, ky[i], w[i]).unwrap();
        match regime.as_str() {
            "SectorA" => assert!(ky[i] > 0.0 && w[i] * w[i] < ky[i].min(1.0)),
            "SectorE" => assert!(p.delta_sq() < 0.0),
            "PointL" => assert!((ky[i] + 3.0).abs() < 1e-12 && (w[i] - 1.0).abs() < 1e-12),
            _ => {}
        }
    }
    let l = (0..t.rows.len()).filter(|&i| text(&t, i, "regime") == "PointL").count();
    assert_eq!(l, 1);
}

#[test]
fn degenerate_grid_gives_two_rows() {
    let cfg = SweepConfig::from_json(
        r#"{"ratio": 0.3, "omega": {"min": 0.5, "max": 0.6, "points": 2}, "t_eval": 5.0,
            "initial": {"kind": "ground_state_of_h0"}, "outputs": ["regime", "S"]}"#,
    )
    .unwrap();
    let t = scan_phase_diagram(&cfg, DEFAULT_REL_TOL).unwrap();
    assert_eq!(t.columns, ["k_x", "k_y", "omega", "regime", "S", "saturated"]);
    assert_eq!(t.rows.len(), 2);
}

#[test]
fn axes_need_two_points() {
    let err = SweepConfig::from_json(
        r#"{"ratio": {"min": 0.0, "max": 1.0, "points": 1}, "omega": 0.5, "initial": {"kind": "ground_state_of_h0"}}"#,
    )
    .and_then(|c| c.validate())
    .unwrap_err();
    assert!(err.to_string().contains("ratio"), "{err}");
}
