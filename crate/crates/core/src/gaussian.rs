//! Zero-mean Gaussian states of the two modes, described by their covariance
//! matrix over `(q_x, q_y, p_x, p_y)`, and the entanglement measures they fix.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{classify, ModelParams, Regime};
use crate::propagator::{second_compound, symplectic_form, Compound, Matrix, Propagator};

const QX: usize = 0;
const QY: usize = 1;
const PX: usize = 2;
const PY: usize = 3;

/// Positions of the pairs `(q_x, p_x)` and `(q_y, p_y)` in a [`Compound`].
const PAIR_X: usize = 1;
const PAIR_Y: usize = 4;

/// Symmetrized second moments `⟨O_iO_j + O_jO_i⟩/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceState {
    matrix: Matrix,
    /// Set at construction; canonical evolution preserves it.
    pure: bool,
    /// A covariance related to `matrix` by a local canonical map, hence with
    /// the same entanglement, but without exponentially large entries.
    reduced: Option<Matrix>,
    /// `C₂(matrix)`; its diagonal holds the 2×2 principal minors, among them
    /// `det 𝒞_x` and `det 𝒞_y`, without cancellation.
    compound: Compound,
}

/// Initial separable state, diagonal with `⟨q_μ²⟩ = 1/(2α_μ)` and `⟨p_μ²⟩ = α_μ/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialConditionSpec {
    /// Ground state of the uncoupled oscillators, `α_μ = √k_μ`.
    GroundStateOfH0,
    Isotropic { alpha: f64 },
    Anisotropic { alpha_x: f64, alpha_y: f64 },
}

impl InitialConditionSpec {
    /// `(α_x, α_y)` for a trap with spring constants `k_x`, `k_y`.
    pub fn alphas(&self, k_x: f64, k_y: f64) -> Result<(f64, f64)> {
        let check = |field: &'static str, a: f64| {
            if a.is_finite() && a > 0.0 {
                Ok(a)
            } else {
                Err(Error::InvalidParameter {
                    field,
                    reason: format!("must be positive and finite, got {a}"),
                })
            }
        };
        match *self {
            InitialConditionSpec::GroundStateOfH0 => {
                if k_x > 0.0 && k_y > 0.0 {
                    Ok((k_x.sqrt(), k_y.sqrt()))
                } else {
                    Err(Error::NoGroundState { k_x, k_y })
                }
            }
            InitialConditionSpec::Isotropic { alpha } => {
                let a = check("alpha", alpha)?;
                Ok((a, a))
            }
            InitialConditionSpec::Anisotropic { alpha_x, alpha_y } => {
                Ok((check("alpha_x", alpha_x)?, check("alpha_y", alpha_y)?))
            }
        }
    }
}

pub fn initial_covariance(spec: &InitialConditionSpec, k_x: f64, k_y: f64) -> Result<CovarianceState> {
    let (ax, ay) = spec.alphas(k_x, k_y)?;
    Ok(CovarianceState::from_alphas(ax, ay))
}

impl CovarianceState {
    pub fn from_alphas(alpha_x: f64, alpha_y: f64) -> Self {
        let matrix = Matrix::from_diagonal(&nalgebra::Vector4::new(
            0.5 / alpha_x,
            0.5 / alpha_y,
            0.5 * alpha_x,
            0.5 * alpha_y,
        ));
        Self::new(matrix, true)
    }

    pub fn new(matrix: Matrix, pure: bool) -> Self {
        Self {
            matrix,
            pure,
            reduced: None,
            compound: second_compound(&matrix),
        }
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn is_pure(&self) -> bool {
        self.pure
    }

    /// Best-conditioned covariance with the entanglement of this state.
    fn entanglement_view(&self) -> &Matrix {
        self.reduced.as_ref().unwrap_or(&self.matrix)
    }

    /// Both symplectic eigenvalues, ascending, from the invariants
    /// `ν₁² + ν₂² = −tr((JC)²)/2` and `ν₁²ν₂² = det C`.
    pub fn symplectic_eigenvalues(&self) -> (f64, f64) {
        let jc = symplectic_form() * self.matrix;
        let sum = -(jc * jc).trace() / 2.0;
        let prod = self.matrix.determinant();
        let disc = (sum * sum - 4.0 * prod).max(0.0).sqrt();
        let hi = 0.5 * (sum + disc);
        let lo = if hi > 0.0 { prod / hi } else { 0.0 };
        (lo.max(0.0).sqrt(), hi.max(0.0).sqrt())
    }

    /// `𝒞 + iℳ/2 ⪰ 0`, i.e. both symplectic eigenvalues at least 1/2.
    pub fn is_physical(&self) -> bool {
        let sym = (self.matrix - self.matrix.transpose()).amax() <= 1e-12 * self.matrix.amax().max(1.0);
        sym && self.symplectic_eigenvalues().0 >= 0.5 - 1e-10
    }

    /// `(det 𝒞_x, det 𝒞_y)`.
    fn block_dets(&self) -> (f64, f64) {
        match &self.reduced {
            Some(m) => (
                m[(QX, QX)] * m[(PX, PX)] - m[(QX, PX)] * m[(PX, QX)],
                m[(QY, QY)] * m[(PY, PY)] - m[(QY, PY)] * m[(PY, QY)],
            ),
            None => (self.compound[(PAIR_X, PAIR_X)], self.compound[(PAIR_Y, PAIR_Y)]),
        }
    }

    /// `det 𝒞_x − 1/4`. For a pure global state this equals `−det` of the
    /// x/y cross block, which carries no cancellation against the 1/4 but
    /// loses everything once the entries dwarf the determinant.
    fn excess_uncertainty(&self) -> f64 {
        let det_x = self.block_dets().0;
        if self.pure {
            let m = self.entanglement_view();
            let (a, b) = (m[(QX, QY)] * m[(PX, PY)], m[(QX, PY)] * m[(PX, QY)]);
            if self.reduced.is_some() || a.abs().max(b.abs()) <= 16.0 * det_x.max(1.0) {
                return b - a;
            }
        }
        det_x - 0.25
    }

    /// Occupations computed independently from the x and the y block.
    pub fn block_occupations(&self) -> (f64, f64) {
        let f = |det: f64| det.max(0.25).sqrt() - 0.5;
        let (dx, dy) = self.block_dets();
        (f(dx), f(dy))
    }
}

fn sandwich(u: &Matrix, c: &Matrix) -> Matrix {
    let m = u * c * u.transpose();
    (m + m.transpose()) * 0.5
}

/// `𝒰 𝒞 𝒰ᵗ`, symmetrized.
pub fn evolve(state: &CovarianceState, p: &Propagator) -> CovarianceState {
    // With 𝒰 = L·K and L local, K𝒞Kᵗ carries the same entanglement; this only
    // holds for a state without its own reduction unless K is trivial.
    let reduced = match (&p.split, &state.reduced) {
        (Some(s), None) => Some(sandwich(&s.core, &state.matrix)),
        (Some(s), Some(r)) if s.trivial_core => Some(*r),
        _ => None,
    };
    let compound = p.compound * state.compound * p.compound.transpose();
    CovarianceState {
        matrix: sandwich(&p.matrix, &state.matrix),
        pure: state.pure,
        reduced,
        compound: (compound + compound.transpose()) * 0.5,
    }
}

/// Mode occupation `f`: the x-mode symplectic eigenvalue minus 1/2.
pub fn mode_occupation(state: &CovarianceState) -> Result<f64> {
    let excess = state.excess_uncertainty();
    if !excess.is_finite() {
        return Err(Error::NonFinite("covariance entries overflowed".into()));
    }
    let m = state.entanglement_view();
    let norm = (m[(QX, QX)] * m[(PX, PX)]).abs().max(1.0);
    if excess < -1e-10 * norm {
        return Err(Error::Unphysical(format!(
            "x-mode determinant is below minimum uncertainty by {:e}",
            -excess
        )));
    }
    let excess = excess.max(0.0);
    Ok(excess / ((0.25 + excess).sqrt() + 0.5))
}

fn check_occupation(f: f64) -> Result<()> {
    if f.is_nan() || f < 0.0 {
        Err(Error::InvalidParameter {
            field: "f",
            reason: format!("occupation must be non-negative, got {f}"),
        })
    } else {
        Ok(())
    }
}

/// Von Neumann entropy in nats, `−f ln f + (1+f) ln(1+f)`.
pub fn entropy_vn(f: f64) -> Result<f64> {
    check_occupation(f)?;
    if f == 0.0 {
        return Ok(0.0);
    }
    if f.is_infinite() {
        return Ok(f64::INFINITY);
    }
    // Same expression, rearranged to avoid cancelling two large logarithms.
    Ok(f.ln_1p() + f * (1.0 / f).ln_1p())
}

/// Rényi entropy `ln Tr ρ^α / (1 − α)` with `Tr ρ^α = 1/((1+f)^α − f^α)`.
pub fn entropy_renyi(f: f64, alpha: f64) -> Result<f64> {
    check_occupation(f)?;
    if !(alpha.is_finite() && alpha > 0.0) || alpha == 1.0 {
        return Err(Error::InvalidParameter {
            field: "alpha",
            reason: format!("Renyi index must be positive and different from 1, got {alpha}"),
        });
    }
    if f == 0.0 {
        return Ok(0.0);
    }
    let ln_diff = if f < 1.0 {
        ((1.0 + f).powf(alpha) - f.powf(alpha)).ln()
    } else {
        // (1+f)^α − f^α = f^α (exp(α ln(1 + 1/f)) − 1)
        alpha * f.ln() + (alpha * (1.0 / f).ln_1p()).exp_m1().ln()
    };
    Ok(ln_diff / (alpha - 1.0))
}

/// Linear entropy `1 − Tr ρ² = 2f/(1+2f)`.
pub fn linear_entropy(f: f64) -> Result<f64> {
    check_occupation(f)?;
    if f.is_infinite() {
        return Ok(1.0);
    }
    Ok(2.0 * f / (1.0 + 2.0 * f))
}

/// `⟨l_z⟩ = ⟨q_x p_y⟩ − ⟨q_y p_x⟩`; the operators in each product commute.
pub fn mean_lz(state: &CovarianceState) -> f64 {
    state.matrix[(QX, PY)] - state.matrix[(QY, PX)]
}

/// Everything a time series reports about one instant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntanglementRecord {
    pub t: f64,
    pub f: f64,
    pub entropy: f64,
    pub linear_entropy: f64,
    pub lz: f64,
    pub regime: Regime,
}

impl EntanglementRecord {
    pub fn new(t: f64, state: &CovarianceState, params: &ModelParams, rel_tol: f64) -> Result<Self> {
        let f = mode_occupation(state)?;
        Ok(Self {
            t,
            f,
            entropy: entropy_vn(f)?,
            linear_entropy: linear_entropy(f)?,
            lz: mean_lz(state),
            regime: classify(params, rel_tol),
        })
    }
}
