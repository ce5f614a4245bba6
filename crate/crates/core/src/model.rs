//! Model parameters, spectral data and the dynamical phase diagram.
//!
//! The dimensionless cranked Hamiltonian is
//! `h = (p_x² + p_y² + k_x q_x² + k_y q_y²)/2 − ω (q_x p_y − q_y p_x)`.
//! Its Heisenberg matrix has eigenvalues `±λ₊, ±λ₋` with
//! `λ±² = ε₊ + ω² ± Δ`, `ε± = (k_x ± k_y)/2` and `Δ² = ε₋² + 4ω²ε₊`.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default relative thickness of the phase-diagram borders.
pub const DEFAULT_REL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    k_x: f64,
    k_y: f64,
    omega: f64,
}

impl ModelParams {
    /// Builds a parameter point. A negative `omega` is a reversed rotation and
    /// is stored as `|omega|`.
    pub fn new(k_x: f64, k_y: f64, omega: f64) -> Result<Self> {
        for (field, value) in [("k_x", k_x), ("k_y", k_y), ("omega", omega)] {
            if !value.is_finite() {
                return Err(Error::InvalidParameter {
                    field,
                    reason: format!("must be finite, got {value}"),
                });
            }
        }
        Ok(Self {
            k_x,
            k_y,
            omega: omega.abs(),
        })
    }

    pub fn k_x(&self) -> f64 {
        self.k_x
    }

    pub fn k_y(&self) -> f64 {
        self.k_y
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// Same trap, different rotation frequency.
    pub fn with_omega(&self, omega: f64) -> Result<Self> {
        Self::new(self.k_x, self.k_y, omega)
    }

    /// Mode relabeling `x ↔ y`.
    pub fn swapped(&self) -> Self {
        Self {
            k_x: self.k_y,
            k_y: self.k_x,
            omega: self.omega,
        }
    }

    pub fn eps_plus(&self) -> f64 {
        0.5 * (self.k_x + self.k_y)
    }

    pub fn eps_minus(&self) -> f64 {
        0.5 * (self.k_x - self.k_y)
    }

    /// `Δ² = ε₋² + 4ω²ε₊`, real for every parameter point.
    pub fn delta_sq(&self) -> f64 {
        let em = self.eps_minus();
        em * em + 4.0 * self.omega * self.omega * self.eps_plus()
    }

    /// Reference magnitude for relative tolerances: `max(1, |k_x|, |k_y|, ω²)`.
    pub fn scale(&self) -> f64 {
        1f64.max(self.k_x.abs())
            .max(self.k_y.abs())
            .max(self.omega * self.omega)
    }
}

/// Principal square root of a real number.
pub(crate) fn sqrt_real(x: f64) -> Complex64 {
    if x >= 0.0 {
        Complex64::new(x.sqrt(), 0.0)
    } else {
        Complex64::new(0.0, (-x).sqrt())
    }
}

/// Principal square root of a complex number, routed through [`sqrt_real`] when
/// the argument is real so that `-x + 0i` and `-x - 0i` agree.
pub(crate) fn sqrt_principal(z: Complex64) -> Complex64 {
    if z.im == 0.0 {
        sqrt_real(z.re)
    } else {
        z.sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralData {
    pub eps_plus: f64,
    pub eps_minus: f64,
    /// `Δ²`, kept alongside `Δ` because every closed form depends on it only.
    pub delta_sq: f64,
    pub delta: Complex64,
    /// `λ₊²` and `λ₋²`.
    pub lambda_sq_plus: Complex64,
    pub lambda_sq_minus: Complex64,
    pub lambda_plus: Complex64,
    pub lambda_minus: Complex64,
    pub scale: f64,
}

pub fn derive_spectral(params: &ModelParams) -> SpectralData {
    let eps_plus = params.eps_plus();
    let eps_minus = params.eps_minus();
    let w2 = params.omega * params.omega;
    let delta_sq = params.delta_sq();
    let delta = sqrt_real(delta_sq);
    let centre = Complex64::new(eps_plus + w2, 0.0);
    let lambda_sq_plus = centre + delta;
    let lambda_sq_minus = centre - delta;
    SpectralData {
        eps_plus,
        eps_minus,
        delta_sq,
        delta,
        lambda_sq_plus,
        lambda_sq_minus,
        lambda_plus: sqrt_principal(lambda_sq_plus),
        lambda_minus: sqrt_principal(lambda_sq_minus),
        scale: params.scale(),
    }
}

/// Dynamical regime of a parameter point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    /// `h` positive definite; `λ±` real.
    SectorA,
    /// Dynamically stable although `h` is not positive definite; `λ±` real.
    SectorB,
    /// Both `λ±` imaginary.
    SectorC,
    /// `λ₊` real, `λ₋` imaginary.
    SectorD,
    /// `λ±` complex conjugates (`Δ` imaginary).
    SectorE,
    BorderAD,
    BorderBD,
    BorderCD,
    /// `Δ = 0` with `λ` real.
    BorderBE,
    /// `Δ = 0` with `λ` imaginary.
    BorderCE,
    /// `Δ = 0` and `λ = 0`: `ω² = k_x = −k_y/3` or `x ↔ y`.
    PointL,
    /// `k_x = k_y = ω²`.
    PointLandau,
    IsotropicLine,
}

impl Regime {
    pub const ALL: [Regime; 13] = [
        Regime::SectorA,
        Regime::SectorB,
        Regime::SectorC,
        Regime::SectorD,
        Regime::SectorE,
        Regime::BorderAD,
        Regime::BorderBD,
        Regime::BorderCD,
        Regime::BorderBE,
        Regime::BorderCE,
        Regime::PointL,
        Regime::PointLandau,
        Regime::IsotropicLine,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Regime::SectorA => "SectorA",
            Regime::SectorB => "SectorB",
            Regime::SectorC => "SectorC",
            Regime::SectorD => "SectorD",
            Regime::SectorE => "SectorE",
            Regime::BorderAD => "BorderAD",
            Regime::BorderBD => "BorderBD",
            Regime::BorderCD => "BorderCD",
            Regime::BorderBE => "BorderBE",
            Regime::BorderCE => "BorderCE",
            Regime::PointL => "PointL",
            Regime::PointLandau => "PointLandau",
            Regime::IsotropicLine => "IsotropicLine",
        }
    }

    pub fn is_open_sector(&self) -> bool {
        matches!(
            self,
            Regime::SectorA | Regime::SectorB | Regime::SectorC | Regime::SectorD | Regime::SectorE
        )
    }

    /// Quasiperiodic (bounded) evolution of the canonical operators.
    pub fn is_dynamically_stable(&self) -> bool {
        matches!(self, Regime::SectorA | Regime::SectorB)
    }

    /// Points on the critical curve `Δ = 0`.
    pub fn is_critical_curve(&self) -> bool {
        matches!(self, Regime::BorderBE | Regime::BorderCE | Regime::PointL)
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Assigns the regime tag of a parameter point.
///
/// Borders are thickened to `rel_tol·scale` (and `rel_tol·scale²` for `Δ²`).
/// Precedence, most degenerate first: `PointL`, `PointLandau`, the `Δ = 0`
/// borders, the `λ = 0` borders, `IsotropicLine`, open sectors. The `Δ = 0`
/// borders require a nonzero coupling; at `ω = 0` the isotropic trap is
/// simply decoupled.
pub fn classify(params: &ModelParams, rel_tol: f64) -> Regime {
    let sd = derive_spectral(params);
    let tol = rel_tol * sd.scale;
    let w2 = params.omega * params.omega;
    let coupled = w2 > tol;
    let centre = sd.eps_plus + w2;

    let critical = coupled && sd.delta_sq.abs() <= tol * sd.scale;
    if critical && centre.abs() <= tol {
        return Regime::PointL;
    }
    if coupled && (params.k_x - w2).abs() <= tol && (params.k_y - w2).abs() <= tol {
        return Regime::PointLandau;
    }
    if critical {
        return if centre > 0.0 {
            Regime::BorderBE
        } else {
            Regime::BorderCE
        };
    }

    let isotropic = (params.k_x - params.k_y).abs() <= tol;
    if sd.delta_sq > 0.0 {
        let lp2 = sd.lambda_sq_plus.re;
        let lm2 = sd.lambda_sq_minus.re;
        if lm2.abs() <= tol && lp2 > tol {
            // λ₋ = 0 exactly where ω² equals one of the spring constants;
            // the smaller one borders A, the larger one borders B.
            return if w2 < sd.eps_plus {
                Regime::BorderAD
            } else {
                Regime::BorderBD
            };
        }
        if lp2.abs() <= tol {
            return Regime::BorderCD;
        }
        if isotropic {
            return Regime::IsotropicLine;
        }
        return match (lp2 > 0.0, lm2 > 0.0) {
            (true, true) => {
                if w2 < params.k_x.min(params.k_y) {
                    Regime::SectorA
                } else {
                    Regime::SectorB
                }
            }
            (true, false) => Regime::SectorD,
            (false, false) => Regime::SectorC,
            // λ₊² ≥ λ₋² whenever Δ is real.
            (false, true) => unreachable!("lambda_plus^2 < lambda_minus^2 with real delta"),
        };
    }
    if isotropic {
        return Regime::IsotropicLine;
    }
    Regime::SectorE
}

/// Frequencies `ω > 0` at which the regime changes along a line of fixed
/// `(k_x, k_y)`, in ascending order, each with the border tag found there.
///
/// Isotropic traps never change regime for `ω > 0` apart from the isolated
/// Landau point, so they return an empty list.
pub fn critical_frequencies(k_x: f64, k_y: f64) -> Result<Vec<(f64, Regime)>> {
    let probe = ModelParams::new(k_x, k_y, 0.0)?;
    let scale = probe.scale();
    let em = probe.eps_minus();
    let ep = probe.eps_plus();
    if (k_x - k_y).abs() <= DEFAULT_REL_TOL * scale {
        return Ok(Vec::new());
    }

    let mut candidates: Vec<f64> = Vec::new();
    for k in [k_x, k_y] {
        if k > 0.0 {
            candidates.push(k);
        }
    }
    if ep < 0.0 {
        candidates.push(-em * em / (4.0 * ep));
    }
    candidates.retain(|w2| *w2 > 0.0 && w2.is_finite());
    candidates.sort_by(|a, b| a.total_cmp(b));

    let mut out: Vec<(f64, Regime)> = Vec::new();
    for w2 in candidates {
        let omega = w2.sqrt();
        if let Some((prev, _)) = out.last() {
            if (omega * omega - prev * prev).abs() <= DEFAULT_REL_TOL * scale.max(w2) {
                // Coincident roots (the L points) collapse to one entry; the
                // classifier's precedence already picked the stronger tag.
                out.pop();
            }
        }
        let regime = classify(&ModelParams::new(k_x, k_y, omega)?, DEFAULT_REL_TOL);
        if !regime.is_open_sector() {
            out.push((omega, regime));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(kx: f64, ky: f64, w: f64) -> ModelParams {
        ModelParams::new(kx, ky, w).unwrap()
    }

    #[test]
    fn negative_omega_is_normalized() {
        assert_eq!(p(1.0, 0.3, -0.5).omega(), 0.5);
    }

    #[test]
    fn rejects_non_finite() {
        assert!(ModelParams::new(f64::NAN, 1.0, 0.0).is_err());
        assert!(ModelParams::new(1.0, f64::INFINITY, 0.0).is_err());
    }

    #[test]
    fn isotropic_spectrum() {
        let sd = derive_spectral(&p(1.0, 1.0, 0.5));
        assert!((sd.delta.re - 1.0).abs() < 1e-15 && sd.delta.im == 0.0);
        assert!((sd.lambda_plus.re - 1.5).abs() < 1e-15);
        assert!((sd.lambda_minus.re - 0.5).abs() < 1e-15);
    }

    #[test]
    fn anisotropic_spectrum() {
        let sd = derive_spectral(&p(1.0, 0.3, 0.5));
        assert!((sd.eps_plus - 0.65).abs() < 1e-15);
        assert!((sd.eps_minus - 0.35).abs() < 1e-15);
        let d = 0.7725f64.sqrt();
        assert!((sd.delta.re - d).abs() < 1e-15);
        assert!((sd.lambda_plus.re - (0.9 + d).sqrt()).abs() < 1e-14);
        assert!((sd.lambda_minus.re - (0.9 - d).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn l_point_spectrum_vanishes() {
        let sd = derive_spectral(&p(0.25, -0.75, 0.5));
        assert_eq!(sd.delta_sq, 0.0);
        assert_eq!(sd.lambda_plus, Complex64::new(0.0, 0.0));
        assert_eq!(sd.lambda_minus, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn principal_branch_for_negative_reals() {
        let z = sqrt_principal(Complex64::new(-4.0, -0.0));
        assert_eq!(z, Complex64::new(0.0, 2.0));
    }

    #[test]
    fn classify_examples() {
        let t = DEFAULT_REL_TOL;
        assert_eq!(classify(&p(1.0, 0.3, 0.4), t), Regime::SectorA);
        assert_eq!(classify(&p(1.0, 0.3, 0.3f64.sqrt()), t), Regime::BorderAD);
        assert_eq!(classify(&p(1.0, -1.5, 1.25), t), Regime::BorderBE);
        assert_eq!(classify(&p(1.0, 1.0, 1.0), t), Regime::PointLandau);
        assert_eq!(classify(&p(1.0, -2.0, 1.03), t), Regime::SectorB);
        assert_eq!(classify(&p(0.25, -0.75, 0.5), t), Regime::PointL);
        assert_eq!(classify(&p(-0.75, 0.25, 0.5), t), Regime::PointL);
    }

    #[test]
    fn classify_remaining_tags() {
        let t = DEFAULT_REL_TOL;
        assert_eq!(classify(&p(1.0, 0.3, 1.2), t), Regime::SectorB);
        assert_eq!(classify(&p(-1.0, -0.5, 0.1), t), Regime::SectorC);
        assert_eq!(classify(&p(1.0, 0.3, 0.7), t), Regime::SectorD);
        assert_eq!(classify(&p(1.0, -2.0, 1.2), t), Regime::SectorE);
        assert_eq!(classify(&p(1.0, 0.3, 1.0), t), Regime::BorderBD);
        assert_eq!(classify(&p(0.25, -1.0, 0.5), t), Regime::BorderCD);
        assert_eq!(classify(&p(1.0, 1.0, 0.5), t), Regime::IsotropicLine);
        assert_eq!(classify(&p(-1.0, -1.0, 0.3), t), Regime::IsotropicLine);
        // Δ = 0 with imaginary λ: ε₊ = −1.5, ε₋ = 0.5, ω² = 1/24.
        let w = (0.25f64 / 6.0).sqrt();
        assert_eq!(classify(&p(-1.0, -2.0, w), t), Regime::BorderCE);
    }

    #[test]
    fn uncoupled_points() {
        let t = DEFAULT_REL_TOL;
        assert_eq!(classify(&p(1.0, 0.3, 0.0), t), Regime::SectorA);
        assert_eq!(classify(&p(1.0, 1.0, 0.0), t), Regime::IsotropicLine);
        assert_eq!(classify(&p(1.0, -1.0, 0.0), t), Regime::SectorD);
        assert_eq!(classify(&p(-1.0, -0.3, 0.0), t), Regime::SectorC);
        assert_eq!(classify(&p(1.0, 0.0, 0.0), t), Regime::BorderAD);
    }

    #[test]
    fn critical_frequency_lists() {
        let cf = critical_frequencies(1.0, 0.3).unwrap();
        assert_eq!(cf.len(), 2);
        assert!((cf[0].0 - 0.3f64.sqrt()).abs() < 1e-15);
        assert_eq!(cf[0].1, Regime::BorderAD);
        assert!((cf[1].0 - 1.0).abs() < 1e-15);
        assert_eq!(cf[1].1, Regime::BorderBD);

        assert!(critical_frequencies(1.0, 1.0).unwrap().is_empty());

        let cf = critical_frequencies(1.0, -3.0).unwrap();
        assert_eq!(cf, vec![(1.0, Regime::PointL)]);

        // B window between λ₋ = 0 and Δ = 0 when k_y > −3k_x.
        let cf = critical_frequencies(1.0, -1.5).unwrap();
        assert_eq!(cf, vec![(1.0, Regime::BorderBD), (1.25, Regime::BorderBE)]);

        // Beyond the L point the window closes through sector C instead.
        let cf = critical_frequencies(1.0, -3.5).unwrap();
        let tags: Vec<_> = cf.iter().map(|c| c.1).collect();
        assert_eq!(tags, vec![Regime::BorderCD, Regime::BorderCE]);
    }
}
