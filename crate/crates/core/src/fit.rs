//! Least-squares helpers for checking asymptotic laws against sampled data.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual.
    pub rms_residual: f64,
}

/// Ordinary least squares `y ≈ slope·x + intercept`. Needs two distinct `x`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> Option<LinearFit> {
    if x.len() != y.len() || x.len() < 2 {
        return None;
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for (xi, yi) in x.iter().zip(y) {
        sxx += (xi - mx) * (xi - mx);
        sxy += (xi - mx) * (yi - my);
    }
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = x
        .iter()
        .zip(y)
        .map(|(xi, yi)| (yi - slope * xi - intercept).powi(2))
        .sum();
    Some(LinearFit {
        slope,
        intercept,
        rms_residual: (ss / n).sqrt(),
    })
}

/// Fit of `ln y` against `ln x`; the slope is the power-law exponent and
/// `exp(intercept)` the prefactor. Points with non-positive values are dropped.
pub fn log_log_fit(x: &[f64], y: &[f64]) -> Option<LinearFit> {
    let (lx, ly): (Vec<f64>, Vec<f64>) = x
        .iter()
        .zip(y)
        .filter(|(a, b)| **a > 0.0 && **b > 0.0)
        .map(|(a, b)| (a.ln(), b.ln()))
        .unzip();
    linear_fit(&lx, &ly)
}

/// `n` points from `a` to `b` inclusive, evenly spaced in `ln t`.
pub fn log_space(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => {
            let (la, lb) = (a.ln(), b.ln());
            (0..n)
                .map(|i| (la + (lb - la) * i as f64 / (n - 1) as f64).exp())
                .collect()
        }
    }
}

/// `n` points from `a` to `b` inclusive, evenly spaced.
pub fn lin_space(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
    }
}

/// Root-mean-square of `g` over `samples` evenly spaced points of `[a, b]`.
/// Used as a smooth envelope of oscillating signals.
pub fn window_rms(a: f64, b: f64, samples: usize, mut g: impl FnMut(f64) -> f64) -> f64 {
    let pts = lin_space(a, b, samples.max(2));
    let ss: f64 = pts.iter().map(|&t| g(t).powi(2)).sum();
    (ss / pts.len() as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y: Vec<f64> = x.iter().map(|v| 3.0 * v - 1.0).collect();
        let f = linear_fit(&x, &y).unwrap();
        assert!((f.slope - 3.0).abs() < 1e-14);
        assert!((f.intercept + 1.0).abs() < 1e-14);
        assert!(f.rms_residual < 1e-14);
    }

    #[test]
    fn power_law() {
        let x = log_space(1e-4, 1e-3, 9);
        let y: Vec<f64> = x.iter().map(|v| 0.5 * v.powi(4)).collect();
        let f = log_log_fit(&x, &y).unwrap();
        assert!((f.slope - 4.0).abs() < 1e-10);
        assert!((f.intercept.exp() - 0.5).abs() < 1e-9);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(linear_fit(&[1.0], &[1.0]).is_none());
        assert!(linear_fit(&[1.0, 1.0], &[1.0, 2.0]).is_none());
        assert!(linear_fit(&[1.0, 2.0], &[1.0]).is_none());
    }

    #[test]
    fn spacing_endpoints() {
        let l = log_space(50.0, 500.0, 5);
        assert!((l[0] - 50.0).abs() < 1e-12 && (l[4] - 500.0).abs() < 1e-10);
        assert_eq!(lin_space(0.0, 1.0, 3), vec![0.0, 0.5, 1.0]);
    }

    #[test]
    fn rms_of_sine() {
        let r = window_rms(0.0, 2.0 * std::f64::consts::PI, 10_001, f64::sin);
        assert!((r - 0.5f64.sqrt()).abs() < 1e-4);
    }
}
