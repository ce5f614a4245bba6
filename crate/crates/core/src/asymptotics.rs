//! Closed-form predictions for the mode occupation `f(t)`: the initial rise,
//! the exact isotropic solution, resonance peaks near the stability borders
//! and the leading large-`t` behavior in every regime.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gaussian::InitialConditionSpec;
use crate::model::{classify, derive_spectral, ModelParams, Regime, DEFAULT_REL_TOL};

/// Leading large-`t` behavior of `f(t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum GrowthClass {
    Bounded,
    /// `f ≈ t·g(t)` with `g` bounded and oscillating; `rate` is the
    /// root-mean-square of `g` over one period.
    LinearF { rate: f64 },
    /// `f ∝ exp(exponent_rate·t)`.
    ExponentialF { exponent_rate: f64 },
    /// `f ≈ coefficient·t²`.
    QuadraticF { coefficient: f64 },
    /// `f ≈ coefficient·t⁴`.
    QuarticF { coefficient: f64 },
}

/// Matching large-`t` behavior of the entropy, `S ≈ ln f + 1` for large `f`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EntropyForm {
    Quasiperiodic,
    /// `S ≈ ln t + bounded`.
    LogT,
    /// `S ≈ rate·t`.
    LinearT,
    /// `S ≈ offset + 2 ln t`.
    TwoLogT,
    /// `S ≈ offset + 4 ln t`.
    FourLogT,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrowthLaw {
    #[serde(flatten)]
    pub class: GrowthClass,
    /// `1 + ln(coefficient)` for power laws with a fixed prefactor.
    pub offset: Option<f64>,
}

impl GrowthLaw {
    fn new(class: GrowthClass) -> Self {
        let offset = match class {
            GrowthClass::QuadraticF { coefficient } | GrowthClass::QuarticF { coefficient } => {
                Some(1.0 + coefficient.ln())
            }
            _ => None,
        };
        Self { class, offset }
    }

    pub fn entropy_form(&self) -> EntropyForm {
        match self.class {
            GrowthClass::Bounded => EntropyForm::Quasiperiodic,
            GrowthClass::LinearF { .. } => EntropyForm::LogT,
            GrowthClass::ExponentialF { .. } => EntropyForm::LinearT,
            GrowthClass::QuadraticF { .. } => EntropyForm::TwoLogT,
            GrowthClass::QuarticF { .. } => EntropyForm::FourLogT,
        }
    }
}

/// Which oscillator a near-resonance refers to: `ω ≈ ω_x` or `ω ≈ ω_y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    X,
    Y,
}

impl Mode {
    fn k(self, params: &ModelParams) -> f64 {
        match self {
            Mode::X => params.k_x(),
            Mode::Y => params.k_y(),
        }
    }

    fn alpha(self, alphas: (f64, f64)) -> f64 {
        match self {
            Mode::X => alphas.0,
            Mode::Y => alphas.1,
        }
    }
}

/// Leading small-`t` term `f ≈ coefficient·t^order`.
pub fn small_t_law(params: &ModelParams, spec: &InitialConditionSpec) -> Result<(u32, f64)> {
    let (ax, ay) = spec.alphas(params.k_x(), params.k_y())?;
    let w2 = params.omega() * params.omega();
    if ax != ay {
        Ok((2, (ax - ay).powi(2) * w2 / (4.0 * ax * ay)))
    } else {
        let em = params.eps_minus();
        Ok((4, em * em * w2 / (4.0 * ax * ax)))
    }
}

/// Exact `f(t)` for `k_x = k_y = k`; independent of `k`, which only enters
/// through the ground-state widths.
pub fn isotropic_f(spec: &InitialConditionSpec, k: f64, omega: f64, t: f64) -> Result<f64> {
    let (ax, ay) = spec.alphas(k, k)?;
    let s = (2.0 * omega * t).sin();
    let x = (ax - ay).powi(2) * s * s / (4.0 * ax * ay);
    // ½√(1+x) − ½ without cancellation at small x.
    Ok(0.5 * x / ((1.0 + x).sqrt() + 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResonancePeak {
    pub t_m: f64,
    pub f_peak: f64,
    /// Approximate `λ₋`, small near the border.
    pub lambda_minus: f64,
    /// Approximate `λ₊ = √(2(ε₊ + ω_μ²))`.
    pub lambda_plus: f64,
}

/// Position and height of the `m`-th maximum of `f(t)` for `ω` close to
/// `ω_μ = √k_μ` on the stable side.
pub fn resonance_peak(
    params: &ModelParams,
    spec: &InitialConditionSpec,
    m: u32,
    mode: Mode,
) -> Result<ResonancePeak> {
    if m % 2 == 0 {
        return Err(Error::InvalidParameter {
            field: "m",
            reason: format!("must be a positive odd integer, got {m}"),
        });
    }
    let not_resonant = || Error::Precondition("not in near-resonant stable regime".into());
    let k_mu = mode.k(params);
    let sd = derive_spectral(params);
    if k_mu <= 0.0 || !(sd.lambda_sq_minus.im == 0.0 && sd.lambda_sq_minus.re > 0.0) {
        return Err(not_resonant());
    }
    if !matches!(classify(params, DEFAULT_REL_TOL), Regime::SectorA | Regime::SectorB) {
        return Err(not_resonant());
    }
    let alphas = spec.alphas(params.k_x(), params.k_y())?;
    let w = params.omega();
    let w_mu = k_mu.sqrt();
    let ep = params.eps_plus();
    let em = params.eps_minus();
    let denom = ep + k_mu;
    if denom <= 0.0 {
        return Err(not_resonant());
    }
    let lp = (2.0 * denom).sqrt();
    let lm = (2.0 * w_mu * em.abs() * (w_mu - w).abs() / denom).sqrt();
    let t_m = m as f64 * PI / (2.0 * lm);
    let phase = m as f64 * PI * lp / (2.0 * lm);
    let f_peak = w * em.abs() / (lp * lp * lm) * oscillating_factor(alphas, mode.alpha(alphas), w, lp, phase);
    Ok(ResonancePeak {
        t_m,
        f_peak,
        lambda_minus: lm,
        lambda_plus: lp,
    })
}

/// `√([a² sin²φ + α_μ² cos²φ]/(α_xα_y))` with `a = (α_xα_y + ω²)/λ₊`.
fn oscillating_factor(alphas: (f64, f64), alpha_mu: f64, w: f64, lp: f64, phase: f64) -> f64 {
    let axy = alphas.0 * alphas.1;
    let a = (axy + w * w) / lp;
    let (s, c) = phase.sin_cos();
    ((a * a * s * s + alpha_mu * alpha_mu * c * c) / axy).sqrt()
}

/// Mode whose frequency `ω` sits closest to: the one on resonance at an
/// A-D or B-D border.
fn resonant_mode(params: &ModelParams) -> Mode {
    let w2 = params.omega() * params.omega();
    if (w2 - params.k_x()).abs() <= (w2 - params.k_y()).abs() {
        Mode::X
    } else {
        Mode::Y
    }
}

/// Large-`t` approximation of `f(t)` at an A-D or B-D border, linear in `t`
/// times a bounded factor oscillating with frequency `λ₊`.
pub fn critical_envelope(params: &ModelParams, spec: &InitialConditionSpec, t: f64) -> Result<f64> {
    let (coef, lp, alphas, alpha_mu) = linear_border_data(params, spec)?;
    Ok(t * coef * oscillating_factor(alphas, alpha_mu, params.omega(), lp, lp * t))
}

/// Extremes of `f(t)/t` predicted by [`critical_envelope`] over a period.
pub fn critical_envelope_bounds(params: &ModelParams, spec: &InitialConditionSpec) -> Result<(f64, f64)> {
    let (coef, lp, alphas, alpha_mu) = linear_border_data(params, spec)?;
    let w = params.omega();
    let a = oscillating_factor(alphas, alpha_mu, w, lp, PI / 2.0);
    let b = oscillating_factor(alphas, alpha_mu, w, lp, 0.0);
    Ok((coef * a.min(b), coef * a.max(b)))
}

fn linear_border_data(params: &ModelParams, spec: &InitialConditionSpec) -> Result<(f64, f64, (f64, f64), f64)> {
    let regime = classify(params, DEFAULT_REL_TOL);
    if !matches!(regime, Regime::BorderAD | Regime::BorderBD) {
        return Err(Error::Precondition(format!(
            "linear growth envelope needs an A-D or B-D border, got {regime}"
        )));
    }
    let alphas = spec.alphas(params.k_x(), params.k_y())?;
    let mode = resonant_mode(params);
    let lp = (2.0 * (params.eps_plus() + mode.k(params))).sqrt();
    let coef = params.omega() * params.eps_minus().abs() / (lp * lp);
    Ok((coef, lp, alphas, mode.alpha(alphas)))
}

/// Leading large-`t` growth of `f(t)` for the regime of `params`.
pub fn growth_law(params: &ModelParams, spec: &InitialConditionSpec) -> Result<GrowthLaw> {
    growth_law_with_tolerance(params, spec, DEFAULT_REL_TOL)
}

pub fn growth_law_with_tolerance(
    params: &ModelParams,
    spec: &InitialConditionSpec,
    rel_tol: f64,
) -> Result<GrowthLaw> {
    let (ax, ay) = spec.alphas(params.k_x(), params.k_y())?;
    let w = params.omega();
    if w == 0.0 {
        // Uncoupled modes never entangle, whatever the local dynamics.
        return Ok(GrowthLaw::new(GrowthClass::Bounded));
    }
    let sd = derive_spectral(params);
    let regime = classify(params, rel_tol);
    let em = params.eps_minus();
    let axy = ax * ay;
    let class = match regime {
        Regime::SectorA | Regime::SectorB | Regime::IsotropicLine | Regime::PointLandau => GrowthClass::Bounded,
        Regime::BorderAD | Regime::BorderBD => {
            let (lo, hi) = critical_envelope_bounds(params, spec)?;
            GrowthClass::LinearF {
                rate: ((lo * lo + hi * hi) / 2.0).sqrt(),
            }
        }
        Regime::SectorD | Regime::BorderCD => GrowthClass::ExponentialF {
            exponent_rate: sd.lambda_minus.im.abs(),
        },
        Regime::SectorC => GrowthClass::ExponentialF {
            exponent_rate: sd.lambda_plus.im.abs() + sd.lambda_minus.im.abs(),
        },
        Regime::SectorE | Regime::BorderCE => GrowthClass::ExponentialF {
            exponent_rate: 2.0 * sd.lambda_plus.im.abs(),
        },
        Regime::BorderBE => {
            if em == 0.0 {
                GrowthClass::Bounded
            } else {
                let lambda = (params.eps_plus() + w * w).sqrt();
                GrowthClass::QuadraticF {
                    coefficient: em.abs() * (4.0 * w * w * axy + em * em) / (16.0 * w * lambda * lambda * axy.sqrt()),
                }
            }
        }
        Regime::PointL => GrowthClass::QuarticF {
            coefficient: (axy + w * w) / (6.0 * axy.sqrt()) * w.powi(3),
        },
    };
    Ok(GrowthLaw::new(class))
}
