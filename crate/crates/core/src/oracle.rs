//! Brute-force reference propagator: fixed-step RK4 on `d𝒰/dt = A𝒰`.
//!
//! Deliberately independent of the closed forms; it only sees the equations
//! of motion. No symplectic projection is applied, so the symplectic defect
//! of its output measures the integration error.

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::propagator::{second_compound, Matrix, Propagator, Provenance};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    /// Upper bound on the step; the actual step divides `t` evenly.
    pub step: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self { step: 1e-4 }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        if self.step.is_finite() && self.step > 0.0 {
            Ok(())
        } else {
            Err(Error::InvalidParameter {
                field: "step",
                reason: format!("must be positive and finite, got {}", self.step),
            })
        }
    }

    /// Step that keeps `step·max(|λ±|, 1)` at the recommended 0.05.
    pub fn recommended(params: &ModelParams) -> Self {
        let rate = params.scale().sqrt().max(1.0);
        Self { step: 0.05 / rate }
    }
}

fn equations_of_motion(params: &ModelParams) -> Matrix {
    let w = params.omega();
    let mut a = Matrix::zeros();
    // dq_x = p_x + ω q_y, dq_y = p_y − ω q_x
    a[(0, 1)] = w;
    a[(0, 2)] = 1.0;
    a[(1, 0)] = -w;
    a[(1, 3)] = 1.0;
    // dp_x = −k_x q_x + ω p_y, dp_y = −k_y q_y − ω p_x
    a[(2, 0)] = -params.k_x();
    a[(2, 3)] = w;
    a[(3, 1)] = -params.k_y();
    a[(3, 2)] = -w;
    a
}

pub fn propagator_numeric(params: &ModelParams, t: f64, cfg: &IntegratorConfig) -> Result<Propagator> {
    cfg.validate()?;
    if !t.is_finite() {
        return Err(Error::InvalidParameter {
            field: "t",
            reason: format!("must be finite, got {t}"),
        });
    }
    let a = equations_of_motion(params);
    let steps = (t.abs() / cfg.step).ceil().max(1.0) as u64;
    let h = t / steps as f64;
    let mut u = Matrix::identity();
    for _ in 0..steps {
        let k1 = a * u;
        let k2 = a * (u + k1 * (h / 2.0));
        let k3 = a * (u + k2 * (h / 2.0));
        let k4 = a * (u + k3 * h);
        u += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        if !u.iter().all(|x| x.is_finite()) {
            return Err(Error::NonFinite(format!(
                "oracle integration overflowed before t = {t}; use a smaller t or step"
            )));
        }
    }
    Ok(Propagator {
        matrix: u,
        time: t,
        provenance: Provenance::Params(*params),
        split: None,
        compound: second_compound(&u),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::propagator::{propagate, symplectic_defect};

    fn p(kx: f64, ky: f64, w: f64) -> ModelParams {
        ModelParams::new(kx, ky, w).unwrap()
    }

    #[test]
    fn zero_time_is_identity() {
        let u = propagator_numeric(&p(1.0, 0.3, 0.5), 0.0, &IntegratorConfig::default()).unwrap();
        assert_eq!(u.matrix, Matrix::identity());
    }

    #[test]
    fn matches_closed_form() {
        let params = p(1.0, 0.3, 0.5);
        let num = propagator_numeric(&params, 5.0, &IntegratorConfig { step: 1e-4 }).unwrap();
        let exact = propagate(&params, 5.0).unwrap();
        assert!((num.matrix - exact.matrix).amax() < 1e-10);
    }

    #[test]
    fn fourth_order_convergence() {
        for params in [p(1.0, 0.3, 0.5), p(1.0, 0.3, 0.6), p(1.0, -1.5, 1.25)] {
            let exact = propagate(&params, 4.0).unwrap().matrix;
            let err = |step| {
                let u = propagator_numeric(&params, 4.0, &IntegratorConfig { step }).unwrap();
                (u.matrix - exact).amax()
            };
            let ratio = err(0.02) / err(0.01);
            assert!((ratio - 16.0).abs() < 1.5, "ratio {ratio}");
        }
    }

    #[test]
    fn defect_is_not_projected_away() {
        let u = propagator_numeric(&p(1.0, 0.3, 0.5), 5.0, &IntegratorConfig { step: 0.1 }).unwrap();
        assert!(symplectic_defect(&u) > 1e-10);
    }

    #[test]
    fn overflow_is_reported() {
        let err = propagator_numeric(&p(-4.0, -4.0, 0.1), 400.0, &IntegratorConfig { step: 0.01 }).unwrap_err();
        assert!(matches!(err, Error::NonFinite(_)));
    }

    #[test]
    fn bad_step_is_rejected() {
        assert!(propagator_numeric(&p(1.0, 1.0, 0.0), 1.0, &IntegratorConfig { step: 0.0 }).is_err());
    }
}
