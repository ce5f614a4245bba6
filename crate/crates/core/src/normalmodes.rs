//! Splitting `h` into two independent quadratic Hamiltonians
//! `½(α₊p₊² + β₊q₊²) + ½(α₋p₋² + β₋q₋²)` by a linear canonical transformation.
//!
//! With `γ = (Δ − ε₋)/(2ω)` and `η = γ/ε₊` the new pairs are
//!
//! * `q₊ = (q_x − η p_y)/(1 + γη)`, `p₊ = p_x + γ q_y`
//! * `q₋ = (q_y − η p_x)/(1 + γη)`, `p₋ = p_y + γ q_x`
//!
//! The transformation exists whenever `Δ ≠ 0`, `ω ≠ 0` and `ε₊ ≠ 0`; it is
//! complex in sector E, where `Δ` is imaginary.

use nalgebra::Matrix4;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{classify, sqrt_real, ModelParams, Regime, DEFAULT_REL_TOL};
use crate::propagator::symplectic_form;

type CMatrix = Matrix4<Complex64>;

/// Character of one decoupled mode, invariant under the swap `p → q, q → −p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Signature {
    /// `α, β > 0`.
    Harmonic,
    /// `α, β < 0`.
    InvertedHarmonic,
    /// `αβ < 0`: an unstable (repulsive) oscillator.
    Unstable,
    /// One coefficient zero, the other positive.
    FreeParticle,
    /// One coefficient zero, the other negative.
    InvertedFreeParticle,
    /// Both coefficients zero.
    Null,
    /// Complex coefficients and coordinates.
    Complex,
}

/// Why a decomposition could not be produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Obstruction {
    /// `Δ = 0`: the Hamiltonian does not split into two independent modes.
    Inseparable,
    /// `ω = 0`: already decoupled, `γ` is undefined.
    Uncoupled,
    /// `ε₊ = 0`: `η = γ/ε₊` diverges.
    SingularTransformation,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeCoefficients {
    pub gamma: Complex64,
    pub eta: Complex64,
    pub alpha_plus: Complex64,
    pub alpha_minus: Complex64,
    pub beta_plus: Complex64,
    pub beta_minus: Complex64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalModeDecomposition {
    /// False exactly on the critical curve `Δ = 0`.
    pub separable: bool,
    pub obstruction: Option<Obstruction>,
    pub coefficients: Option<ModeCoefficients>,
    /// `(+, −)` mode signatures.
    pub signature: Option<(Signature, Signature)>,
}

impl NormalModeDecomposition {
    fn unavailable(separable: bool, obstruction: Obstruction) -> Self {
        Self {
            separable,
            obstruction: Some(obstruction),
            coefficients: None,
            signature: None,
        }
    }
}

pub fn decompose(params: &ModelParams) -> NormalModeDecomposition {
    let regime = classify(params, DEFAULT_REL_TOL);
    if regime.is_critical_curve() {
        return NormalModeDecomposition::unavailable(false, Obstruction::Inseparable);
    }
    let tol = DEFAULT_REL_TOL * params.scale();
    let w = params.omega();
    if w * w <= tol {
        return NormalModeDecomposition::unavailable(true, Obstruction::Uncoupled);
    }
    let ep = params.eps_plus();
    if ep.abs() <= tol {
        return NormalModeDecomposition::unavailable(true, Obstruction::SingularTransformation);
    }
    let em = params.eps_minus();
    let w2 = w * w;
    let delta = sqrt_real(params.delta_sq());
    // (Δ − ε₋)(Δ + ε₋) = 4ω²ε₊; the factor that cancels comes from the other.
    let product = 4.0 * w2 * ep;
    let (d_minus, d_plus) = if delta.im != 0.0 {
        (delta - em, delta + em)
    } else if em >= 0.0 {
        let d_plus = delta + em;
        (product / d_plus, d_plus)
    } else {
        let d_minus = delta - em;
        (d_minus, product / d_minus)
    };
    let gamma = d_minus / (2.0 * w);
    let eta = gamma / ep;
    let alpha = |sign: f64| (d_plus + sign * 2.0 * w2) / (2.0 * delta);
    let beta = |sign: f64| delta * (d_minus + sign * 2.0 * w2) / (2.0 * w2);
    let c = ModeCoefficients {
        gamma,
        eta,
        alpha_plus: alpha(1.0),
        alpha_minus: alpha(-1.0),
        beta_plus: beta(1.0),
        beta_minus: beta(-1.0),
    };
    let zero_tol = 1e-9 * params.scale();
    let signature = (
        mode_signature(c.alpha_plus, c.beta_plus, zero_tol),
        mode_signature(c.alpha_minus, c.beta_minus, zero_tol),
    );
    NormalModeDecomposition {
        separable: true,
        obstruction: None,
        coefficients: Some(c),
        signature: Some(signature),
    }
}

fn mode_signature(a: Complex64, b: Complex64, tol: f64) -> Signature {
    if a.im.abs() > tol || b.im.abs() > tol {
        return Signature::Complex;
    }
    let (a, b) = (a.re, b.re);
    let (az, bz) = (a.abs() <= tol, b.abs() <= tol);
    match (az, bz) {
        (true, true) => Signature::Null,
        (true, false) | (false, true) => {
            let other = if az { b } else { a };
            if other > 0.0 {
                Signature::FreeParticle
            } else {
                Signature::InvertedFreeParticle
            }
        }
        (false, false) => {
            if a * b < 0.0 {
                Signature::Unstable
            } else if a > 0.0 {
                Signature::Harmonic
            } else {
                Signature::InvertedHarmonic
            }
        }
    }
}

/// Rows express `(q₊, q₋, p₊, p₋)` in terms of `(q_x, q_y, p_x, p_y)`.
fn transformation(c: &ModeCoefficients) -> CMatrix {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let n = one / (one + c.gamma * c.eta);
    #[rustfmt::skip]
    let t = CMatrix::new(
        n,       zero,    zero,        -c.eta * n,
        zero,    n,       -c.eta * n,  zero,
        zero,    c.gamma, one,         zero,
        c.gamma, zero,    zero,        one,
    );
    t
}

/// Symmetric matrix `H` with `h = ½ 𝒪ᵗ H 𝒪`.
pub fn hamiltonian_form(params: &ModelParams) -> Matrix4<f64> {
    let w = params.omega();
    #[rustfmt::skip]
    let h = Matrix4::new(
        params.k_x(), 0.0,          0.0, -w,
        0.0,          params.k_y(), w,   0.0,
        0.0,          w,            1.0, 0.0,
        -w,           0.0,          0.0, 1.0,
    );
    h
}

/// Largest deviation, relative to `max(1, ‖H‖)`, of
///
/// * the decomposed Hamiltonian expanded back over `(q_x, q_y, p_x, p_y)`
///   from the quadratic form of `h`, and
/// * the transformed pairs from canonical commutation relations, `TℳTᵗ = ℳ`.
pub fn reconstruct_check(params: &ModelParams, d: &NormalModeDecomposition) -> Result<f64> {
    let c = match (d.separable, d.coefficients) {
        (true, Some(c)) => c,
        _ => {
            return Err(Error::Precondition(
                "reconstruct_check needs a separable decomposition with coefficients".into(),
            ))
        }
    };
    let t = transformation(&c);
    let diag = CMatrix::from_diagonal(&nalgebra::Vector4::new(
        c.beta_plus,
        c.beta_minus,
        c.alpha_plus,
        c.alpha_minus,
    ));
    let h = hamiltonian_form(params).map(|x| Complex64::new(x, 0.0));
    let ham = (t.transpose() * diag * t - h).map(|z| z.norm()).max();
    let m = symplectic_form().map(|x| Complex64::new(x, 0.0));
    let canon = (t * m * t.transpose() - m).map(|z| z.norm()).max();
    let norm = hamiltonian_form(params).amax().max(1.0);
    Ok((ham / norm).max(canon))
}

/// Regimes whose decompositions the sign-pattern table describes.
pub fn expected_signature(regime: Regime) -> Option<(Signature, Signature)> {
    use Signature::*;
    Some(match regime {
        Regime::SectorA => (Harmonic, Harmonic),
        Regime::SectorB => (Harmonic, InvertedHarmonic),
        Regime::SectorC => (Unstable, Unstable),
        Regime::SectorD => (Harmonic, Unstable),
        Regime::SectorE => (Complex, Complex),
        Regime::BorderAD => (Harmonic, FreeParticle),
        Regime::BorderBD => (Harmonic, InvertedFreeParticle),
        Regime::BorderCD => (FreeParticle, Unstable),
        Regime::PointLandau => (Harmonic, Null),
        _ => return None,
    })
}
