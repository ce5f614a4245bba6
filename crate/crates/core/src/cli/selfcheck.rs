//! Invariant self-test run by the `check` verb.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::asymptotics::isotropic_f;
use crate::gaussian::{evolve, initial_covariance, mode_occupation, InitialConditionSpec};
use crate::model::ModelParams;
use crate::normalmodes::{decompose, reconstruct_check};
use crate::oracle::{propagator_numeric, IntegratorConfig};
use crate::propagator::{propagate, symplectic_defect};

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl std::fmt::Display for CheckResult {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{tag} {}: {}", self.name, self.detail)
    }
}

fn random_points(seed: u64, n: usize) -> Vec<ModelParams> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let kx = rng.gen_range(-3.0..3.0);
            let ky = rng.gen_range(-3.0..3.0);
            let w = rng.gen_range(0.0..2.0);
            ModelParams::new(kx, ky, w).expect("finite")
        })
        .collect()
}

/// Worst value of `measure` over `points`, with the offending point.
fn worst<F>(points: &[ModelParams], measure: F) -> (f64, Option<ModelParams>)
where
    F: Fn(&ModelParams) -> f64 + Sync,
{
    points
        .par_iter()
        .map(|p| (measure(p), Some(*p)))
        .reduce(|| (0.0, None), |a, b| if b.0 > a.0 || b.0.is_nan() { b } else { a })
}

fn result(name: &'static str, value: f64, bound: f64, at: Option<ModelParams>) -> CheckResult {
    let passed = value <= bound;
    let mut detail = format!("max {value:.3e} (bound {bound:.0e})");
    if let (false, Some(p)) = (passed, at) {
        detail.push_str(&format!(" at k_x={}, k_y={}, omega={}", p.k_x(), p.k_y(), p.omega()));
    }
    CheckResult { name, passed, detail }
}

/// Runs every check; `samples` random parameter points per check.
pub fn run_checks(samples: usize, seed: u64) -> Vec<CheckResult> {
    let points = random_points(seed, samples);
    let mut out = Vec::new();

    let (v, at) = worst(&points, |p| {
        [0.1, 1.0, 10.0]
            .iter()
            .map(|&t| match propagate(p, t) {
                Ok(u) => symplectic_defect(&u) / u.max_abs().powi(2).max(1.0),
                Err(_) => f64::INFINITY,
            })
            .fold(0.0, f64::max)
    });
    out.push(result("symplectic defect", v, 1e-9, at));

    let few: Vec<ModelParams> = points.iter().take(samples.min(8)).copied().collect();
    let (v, at) = worst(&few, |p| {
        let cfg = IntegratorConfig { step: 1e-3 };
        match (propagate(p, 2.0), propagator_numeric(p, 2.0, &cfg)) {
            (Ok(a), Ok(b)) => (a.matrix - b.matrix).amax() / a.max_abs().max(1.0),
            _ => f64::INFINITY,
        }
    });
    out.push(result("oracle agreement", v, 1e-7, at));

    let spec = InitialConditionSpec::Anisotropic { alpha_x: 1.7, alpha_y: 0.6 };
    let c0 = initial_covariance(&spec, 1.0, 1.0).expect("valid alphas");
    let (v, at) = worst(&points, |p| match propagate(p, 5.0) {
        Ok(u) => {
            let s = evolve(&c0, &u);
            let (n1, n2) = s.symplectic_eigenvalues();
            // The invariants carry rounding of order ‖𝒞‖².
            let scale = s.matrix().amax().max(1.0).powi(2);
            ((n1 - 0.5).abs().max((n2 - 0.5).abs())) / scale
        }
        Err(_) => f64::INFINITY,
    });
    out.push(result("purity preservation", v, 1e-8, at));

    let (v, at) = worst(&points, |p| match propagate(p, 3.0) {
        Ok(u) => {
            let c = *evolve(&c0, &u).matrix();
            let dx = c[(0, 0)] * c[(2, 2)] - c[(0, 2)] * c[(2, 0)];
            let dy = c[(1, 1)] * c[(3, 3)] - c[(1, 3)] * c[(3, 1)];
            (dx - dy).abs() / (c[(0, 0)] * c[(2, 2)]).max(c[(1, 1)] * c[(3, 3)]).max(1.0)
        }
        Err(_) => f64::INFINITY,
    });
    out.push(result("mode symmetry", v, 1e-8, at));

    let (v, at) = worst(&points, |p| {
        let d = decompose(p);
        if d.coefficients.is_none() {
            return 0.0;
        }
        reconstruct_check(p, &d).unwrap_or(f64::INFINITY)
    });
    out.push(result("normal-mode reconstruction", v, 1e-9, at));

    let iso: Vec<ModelParams> = points
        .iter()
        .map(|p| ModelParams::new(p.k_x(), p.k_x(), p.omega()).expect("finite"))
        .collect();
    let (v, at) = worst(&iso, |p| match propagate(p, 7.0) {
        Ok(u) => {
            let f = mode_occupation(&evolve(&c0, &u)).unwrap_or(f64::INFINITY);
            let exact = isotropic_f(&spec, p.k_x(), p.omega(), 7.0).expect("valid alphas");
            (f - exact).abs()
        }
        Err(_) => f64::INFINITY,
    });
    out.push(result("isotropic exact solution", v, 1e-10, at));

    out
}
