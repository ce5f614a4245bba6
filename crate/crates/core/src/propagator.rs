//! Closed-form canonical evolution `𝒰(t) = exp(A t)` of `(q_x, q_y, p_x, p_y)`.
//!
//! Every matrix element is a combination of three scalar kernels of
//! `μ = λ²`, all entire in `μ`:
//!
//! * `C(μ,t) = cos(√μ t)`
//! * `S(μ,t) = sin(√μ t)/√μ`
//! * `D(μ,t) = (S − t C)/μ`
//!
//! so `λ → 0` needs no special casing. The only genuine degeneracy is the
//! divided difference in `Δ`, handled by a separate branch on the critical
//! curve `Δ = 0`.

use nalgebra::{Matrix4, Matrix6};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{derive_spectral, ModelParams};

/// Relative threshold below which `Δ` (and then `λ`) is treated as zero.
pub const DEGENERACY_THRESHOLD: f64 = 1e-6;

/// Allowed imaginary residue of the complex evaluation, relative to the matrix.
const REALITY_BOUND: f64 = 1e-10;

/// Real 4×4 matrices acting on `(q_x, q_y, p_x, p_y)`.
pub type Matrix = Matrix4<f64>;

/// Linear maps on the pairs `(i, j)`, `i < j`, of phase-space indices, in
/// the order of [`PAIRS`].
pub type Compound = Matrix6<f64>;

pub const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// Second compound: every 2×2 minor of `m`. `C₂(AB) = C₂(A)C₂(B)`.
pub fn second_compound(m: &Matrix) -> Compound {
    Compound::from_fn(|a, b| {
        let ((i, j), (k, l)) = (PAIRS[a], PAIRS[b]);
        m[(i, k)] * m[(j, l)] - m[(i, l)] * m[(j, k)]
    })
}

/// Where a propagator came from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Provenance {
    Params(ModelParams),
    /// Product of propagators, e.g. a piecewise-constant schedule.
    Composite,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Propagator {
    pub matrix: Matrix,
    pub time: f64,
    pub provenance: Provenance,
    /// Known factorization into a local part and an entangling core.
    pub split: Option<LocalSplit>,
    /// `C₂(matrix)`, accumulated from short steps. Minors read directly off a
    /// matrix dominated by one growing direction cancel to noise.
    pub compound: Compound,
}

/// `matrix = local · core`, where `local` acts on each mode separately and so
/// cannot change any entanglement measure. Keeping `core` separate avoids
/// reading bounded entanglement off exponentially large matrix entries.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalSplit {
    pub local: Matrix,
    pub core: Matrix,
    /// `local` acts identically on both modes, so it commutes with rotations.
    pub symmetric: bool,
    pub trivial_core: bool,
}

/// Which closed form evaluated a propagator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// `Δ ≠ 0`.
    Generic,
    /// `Δ = 0`, `λ ≠ 0`: elements carry terms linear in `t`.
    CriticalCurve,
    /// `Δ = 0`, `λ = 0`: polynomial evolution up to `t³`.
    CriticalPoint,
}

impl Propagator {
    pub fn identity() -> Self {
        Self {
            matrix: Matrix::identity(),
            time: 0.0,
            provenance: Provenance::Composite,
            split: Some(LocalSplit {
                local: Matrix::identity(),
                core: Matrix::identity(),
                symmetric: true,
                trivial_core: true,
            }),
            compound: Compound::identity(),
        }
    }

    pub fn params(&self) -> Result<&ModelParams> {
        match &self.provenance {
            Provenance::Params(p) => Ok(p),
            Provenance::Composite => Err(Error::CompositeProvenance),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.matrix.amax()
    }
}

/// The real antisymmetric form `[[0, I], [−I, 0]]` encoding `[q_μ, p_ν] = iδ_μν`.
pub fn symplectic_form() -> Matrix {
    let mut m = Matrix::zeros();
    m[(0, 2)] = 1.0;
    m[(1, 3)] = 1.0;
    m[(2, 0)] = -1.0;
    m[(3, 1)] = -1.0;
    m
}

/// The real generator `A` with `d𝒪/dt = A 𝒪`.
pub fn generator(params: &ModelParams) -> Matrix {
    let w = params.omega();
    #[rustfmt::skip]
    let a = Matrix::new(
        0.0,            w,              1.0, 0.0,
        -w,             0.0,            0.0, 1.0,
        -params.k_x(),  0.0,            0.0, w,
        0.0,            -params.k_y(),  -w,  0.0,
    );
    a
}

#[derive(Debug, Clone, Copy)]
struct Kernels {
    c: Complex64,
    s: Complex64,
    d: Complex64,
}

impl Kernels {
    fn conj(self) -> Self {
        Self {
            c: self.c.conj(),
            s: self.s.conj(),
            d: self.d.conj(),
        }
    }
}

fn kernels(mu: Complex64, t: f64) -> Kernels {
    let z = mu * (t * t);
    if z.norm() < 1.0 {
        // C = Σ (−z)ⁿ/(2n)!, S = t Σ (−z)ⁿ/(2n+1)!, D = t³ Σ (−z)ⁿ 2(n+1)/(2n+3)!
        let mut c = Complex64::new(0.0, 0.0);
        let mut s = Complex64::new(0.0, 0.0);
        let mut d = Complex64::new(0.0, 0.0);
        let mut pow = Complex64::new(1.0, 0.0);
        let mut fact_even = 1.0; // (2n)!
        for n in 0..40u32 {
            let nf = f64::from(n);
            let fact_odd = fact_even * (2.0 * nf + 1.0); // (2n+1)!
            let fact_next = fact_odd * (2.0 * nf + 2.0) * (2.0 * nf + 3.0); // (2n+3)!
            let tc = pow / fact_even;
            let ts = pow / fact_odd;
            let td = pow * (2.0 * (nf + 1.0)) / fact_next;
            c += tc;
            s += ts;
            d += td;
            if tc.norm() < 1e-18 * c.norm().max(1e-300) && n > 2 {
                break;
            }
            pow *= -z;
            fact_even = fact_odd * (2.0 * nf + 2.0);
        }
        Kernels {
            c,
            s: s * t,
            d: d * (t * t * t),
        }
    } else {
        let r = crate::model::sqrt_principal(mu);
        let c = (r * t).cos();
        let s = (r * t).sin() / r;
        let d = (s - c * t) / mu;
        Kernels { c, s, d }
    }
}

/// The ten independent element families of `𝒰(t)`.
#[derive(Debug, Clone, Copy)]
struct Elements<T> {
    uxx: T,
    uyy: T,
    uxy: T,
    uyx: T,
    vxx: T,
    vyy: T,
    vxy: T,
    wxx: T,
    wyy: T,
    wxy: T,
}

impl<T: Copy + std::ops::Neg<Output = T>> Elements<T> {
    #[rustfmt::skip]
    fn rows(&self) -> [[T; 4]; 4] {
        let e = self;
        [
            [e.uxx,  e.uxy, e.vxx,  e.vxy],
            [e.uyx,  e.uyy, -e.vxy, e.vyy],
            [e.wxx,  e.wxy, e.uxx,  -e.uyx],
            [-e.wxy, e.wyy, -e.uxy, e.uyy],
        ]
    }
}

fn generic_elements(params: &ModelParams, t: f64) -> Elements<Complex64> {
    let sd = derive_spectral(params);
    let w = params.omega();
    let w2 = w * w;
    let ep = sd.eps_plus;
    let em = sd.eps_minus;
    let d = sd.delta;

    let kp = kernels(sd.lambda_sq_plus, t);
    // For imaginary Δ the two branches are exact conjugates; enforcing it
    // keeps the assembled elements real up to rounding.
    let km = if sd.delta_sq < 0.0 {
        kp.conj()
    } else {
        kernels(sd.lambda_sq_minus, t)
    };
    let (cp, sp, cm, sm) = (kp.c, kp.s, km.c, km.s);
    let two_d = d * 2.0;
    let four_d = d * 4.0;

    let vxy = (cm - cp) * w / d;
    Elements {
        uxx: ((d + em) * cp + (d - em) * cm) / two_d,
        uyy: ((d - em) * cp + (d + em) * cm) / two_d,
        uxy: ((d - em + 2.0 * ep) * sp + (d + em - 2.0 * ep) * sm) * w / two_d,
        uyx: -((d + em + 2.0 * ep) * sp + (d - em - 2.0 * ep) * sm) * w / two_d,
        vxx: ((d + em + 2.0 * w2) * sp + (d - em - 2.0 * w2) * sm) / two_d,
        vyy: ((d - em + 2.0 * w2) * sp + (d + em - 2.0 * w2) * sm) / two_d,
        vxy,
        wxy: -vxy * ep,
        wxx: (-(d + em) * (d + em + 2.0 * ep) * sp + (d - em) * (d - em - 2.0 * ep) * sm) / four_d,
        wyy: (-(d - em) * (d - em + 2.0 * ep) * sp + (d + em) * (d + em - 2.0 * ep) * sm) / four_d,
    }
}

/// `Δ → 0` limit of the generic elements, written through `C, S, D` of the
/// common `μ = λ² = ε₊ + ω²`. With `μ = 0` it is the polynomial evolution at
/// the L points.
fn critical_elements(params: &ModelParams, t: f64, mu: f64) -> Elements<f64> {
    let w = params.omega();
    let w2 = w * w;
    let ep = params.eps_plus();
    let half_em = 0.5 * params.eps_minus();
    let k = kernels(Complex64::new(mu, 0.0), t);
    let (c, s, d) = (k.c.re, k.s.re, k.d.re);

    let vxy = w * t * s;
    Elements {
        uxx: c - half_em * t * s,
        uyy: c + half_em * t * s,
        uxy: w * (s - (ep - half_em) * d),
        uyx: -w * (s - (ep + half_em) * d),
        vxx: s - (w2 + half_em) * d,
        vyy: s - (w2 - half_em) * d,
        vxy,
        wxy: -ep * vxy,
        wxx: -ep * (w2 - half_em) * d - params.k_x() * s,
        wyy: -ep * (w2 + half_em) * d - params.k_y() * s,
    }
}

/// Branch that [`propagate`] selects for `params`.
pub fn select_branch(params: &ModelParams) -> Branch {
    let scale = params.scale();
    let delta_abs = params.delta_sq().abs().sqrt();
    if delta_abs > DEGENERACY_THRESHOLD * scale {
        return Branch::Generic;
    }
    let w = params.omega();
    let lambda_abs = (params.eps_plus() + w * w).abs().sqrt();
    if lambda_abs > DEGENERACY_THRESHOLD * scale.sqrt() {
        Branch::CriticalCurve
    } else {
        Branch::CriticalPoint
    }
}

pub fn propagate(params: &ModelParams, t: f64) -> Result<Propagator> {
    propagate_with(params, t, select_branch(params))
}

/// Evaluates `𝒰(t)` with an explicitly chosen closed form. Away from the
/// branch's domain the result is only an approximation; used to check
/// continuity across the switch points.
pub fn propagate_with(params: &ModelParams, t: f64, branch: Branch) -> Result<Propagator> {
    if !t.is_finite() {
        return Err(Error::InvalidParameter {
            field: "t",
            reason: format!("must be finite, got {t}"),
        });
    }
    let matrix = closed_form(params, t, branch)?;
    let split = local_split(params, t, &matrix)?;
    let compound = stable_compound(params, t, branch, &matrix)?;
    Ok(Propagator {
        matrix,
        time: t,
        provenance: Provenance::Params(*params),
        split,
        compound,
    })
}

fn closed_form(params: &ModelParams, t: f64, branch: Branch) -> Result<Matrix> {
    let matrix = match branch {
        Branch::Generic => {
            if params.delta_sq() == 0.0 {
                return Err(Error::Precondition(
                    "generic closed form is undefined at delta = 0".into(),
                ));
            }
            let rows = generic_elements(params, t).rows();
            let mut re = Matrix::zeros();
            let mut residue = 0f64;
            for (i, row) in rows.iter().enumerate() {
                for (j, z) in row.iter().enumerate() {
                    re[(i, j)] = z.re;
                    residue = residue.max(z.im.abs());
                }
            }
            check_finite(&re, params, t)?;
            let bound = REALITY_BOUND * re.amax().max(1.0);
            if residue > bound {
                return Err(Error::RealityCheck {
                    residue,
                    bound,
                    k_x: params.k_x(),
                    k_y: params.k_y(),
                    omega: params.omega(),
                    t,
                });
            }
            re
        }
        Branch::CriticalCurve | Branch::CriticalPoint => {
            let mu = if branch == Branch::CriticalPoint {
                0.0
            } else {
                params.eps_plus() + params.omega() * params.omega()
            };
            let rows = critical_elements(params, t, mu).rows();
            let m = Matrix::from_fn(|i, j| rows[i][j]);
            check_finite(&m, params, t)?;
            m
        }
    };
    Ok(matrix)
}

/// `C₂(𝒰(t))`, each minor taken either directly from `matrix` or from
/// `C₂(𝒰(t/n))ⁿ`, whichever rounds less. Direct minors cancel when one
/// direction dominates the growth; the power loses subdominant entries under
/// polynomial growth.
fn stable_compound(params: &ModelParams, t: f64, branch: Branch, matrix: &Matrix) -> Result<Compound> {
    let direct = second_compound(matrix);
    let rate = 1.0 + params.omega() + params.scale().sqrt();
    let n = (t.abs() * rate).ceil().max(1.0);
    if n <= 1.0 {
        return Ok(direct);
    }
    if n > u64::MAX as f64 {
        return Err(Error::NonFinite(format!("t = {t} is too large to evolve")));
    }
    let powered = compound_power(second_compound(&closed_form(params, t / n, branch)?), n as u64);
    let budget = n * powered.amax();
    Ok(Compound::from_fn(|a, b| {
        let ((i, j), (k, l)) = (PAIRS[a], PAIRS[b]);
        let size = (matrix[(i, k)] * matrix[(j, l)]).abs() + (matrix[(i, l)] * matrix[(j, k)]).abs();
        if size <= budget {
            direct[(a, b)]
        } else {
            powered[(a, b)]
        }
    }))
}

fn compound_power(mut base: Compound, mut n: u64) -> Compound {
    let mut acc = Compound::identity();
    while n > 0 {
        if n & 1 == 1 {
            acc *= base;
        }
        n >>= 1;
        if n > 0 {
            base *= base;
        }
    }
    acc
}

/// Uncoupled evolution is entirely local; an isotropic trap evolves as the
/// uncoupled trap followed by a rigid rotation of both pairs by `ωt`.
fn local_split(params: &ModelParams, t: f64, matrix: &Matrix) -> Result<Option<LocalSplit>> {
    let isotropic = params.k_x() == params.k_y();
    if params.omega() == 0.0 {
        return Ok(Some(LocalSplit {
            local: *matrix,
            core: Matrix::identity(),
            symmetric: isotropic,
            trivial_core: true,
        }));
    }
    if !isotropic {
        return Ok(None);
    }
    let local = propagate(&params.with_omega(0.0)?, t)?.matrix;
    let (s, c) = (params.omega() * t).sin_cos();
    #[rustfmt::skip]
    let core = Matrix::new(
        c,   s,   0.0, 0.0,
        -s,  c,   0.0, 0.0,
        0.0, 0.0, c,   s,
        0.0, 0.0, -s,  c,
    );
    Ok(Some(LocalSplit {
        local,
        core,
        symmetric: true,
        trivial_core: false,
    }))
}

fn check_finite(m: &Matrix, params: &ModelParams, t: f64) -> Result<()> {
    if m.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(format!(
            "propagator overflow at k_x = {}, k_y = {}, omega = {}, t = {t}",
            params.k_x(),
            params.k_y(),
            params.omega()
        )))
    }
}

/// `max |𝒰ℳ𝒰ᵗ − ℳ|`.
pub fn symplectic_defect(p: &Propagator) -> f64 {
    let m = symplectic_form();
    (p.matrix * m * p.matrix.transpose() - m).amax()
}

/// Evolution by `first`, then by `second`.
pub fn compose(first: &Propagator, second: &Propagator) -> Propagator {
    // L₂C₂L₁C₁ = (L₂L₁)(C₂C₁) whenever C₂ commutes with L₁.
    let split = match (&first.split, &second.split) {
        (Some(a), Some(b)) if b.trivial_core || (a.symmetric && rotation_like(&b.core)) => Some(LocalSplit {
            local: b.local * a.local,
            core: b.core * a.core,
            symmetric: a.symmetric && b.symmetric,
            trivial_core: a.trivial_core && b.trivial_core,
        }),
        _ => None,
    };
    Propagator {
        matrix: second.matrix * first.matrix,
        time: first.time + second.time,
        provenance: Provenance::Composite,
        split,
        compound: second.compound * first.compound,
    }
}

/// Same rotation applied to the coordinate and the momentum pair; these
/// commute with every mode-symmetric local map.
fn rotation_like(m: &Matrix) -> bool {
    let z = |i, j| m[(i, j)] == 0.0;
    z(0, 2) && z(0, 3) && z(1, 2) && z(1, 3) && z(2, 0) && z(2, 1) && z(3, 0) && z(3, 1)
        && m[(0, 0)] == m[(2, 2)]
        && m[(0, 1)] == m[(2, 3)]
        && m[(1, 0)] == m[(3, 2)]
        && m[(1, 1)] == m[(3, 3)]
}

/// `max |𝒰(t) − R(t)𝒰₀(t)|` for an isotropic trap, where `R(t)` rotates both
/// coordinate and momentum pairs by `ωt` and `𝒰₀` is the uncoupled evolution.
pub fn isotropic_factorization_check(params: &ModelParams, t: f64) -> Result<f64> {
    let tol = crate::model::DEFAULT_REL_TOL * params.scale();
    if (params.k_x() - params.k_y()).abs() > tol {
        return Err(Error::Precondition(format!(
            "isotropic factorization needs k_x = k_y, got {} and {}",
            params.k_x(),
            params.k_y()
        )));
    }
    let u = propagate(params, t)?;
    let u0 = propagate(&params.with_omega(0.0)?, t)?;
    let (s, c) = (params.omega() * t).sin_cos();
    #[rustfmt::skip]
    let rot = Matrix::new(
        c,   s,   0.0, 0.0,
        -s,  c,   0.0, 0.0,
        0.0, 0.0, c,   s,
        0.0, 0.0, -s,  c,
    );
    Ok((u.matrix - rot * u0.matrix).amax())
}
