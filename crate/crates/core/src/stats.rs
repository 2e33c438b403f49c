//! Small sample statistics used by the Monte Carlo harness.

use nalgebra::{DMatrix, DVector};

use crate::special::normal_cdf;

pub fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

/// Unbiased sample variance (denominator `len − 1`; 0 for a single value).
pub fn variance(x: &[f64]) -> f64 {
    covariance(x, x)
}

pub fn covariance(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    if x.len() < 2 {
        return 0.0;
    }
    let (mx, my) = (mean(x), mean(y));
    let s: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    s / (x.len() - 1) as f64
}

/// `(mean |x|^p)^{1/p}`.
pub fn lp_norm(x: &[f64], p: f64) -> f64 {
    (x.iter().map(|v| v.abs().powf(p)).sum::<f64>() / x.len() as f64).powf(1.0 / p)
}

/// Sample quantile with linear interpolation between order statistics
/// (Hyndman–Fan type 7).
pub fn quantile(x: &[f64], q: f64) -> f64 {
    assert!(!x.is_empty() && (0.0..=1.0).contains(&q));
    let mut s = x.to_vec();
    s.sort_by(f64::total_cmp);
    let pos = q * (s.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    s[lo] + (pos - lo as f64) * (s[hi] - s[lo])
}

/// `sup_x |F_emp(x) − Φ(x)|` against the standard normal.
pub fn ks_statistic_normal(x: &[f64]) -> f64 {
    let mut s = x.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    s.iter()
        .enumerate()
        .map(|(i, &v)| {
            let c = normal_cdf(v);
            (c - i as f64 / n).max((i + 1) as f64 / n - c)
        })
        .fold(0.0, f64::max)
}

/// `P(K > t)` for the Kolmogorov distribution.
pub fn kolmogorov_survival(t: f64) -> f64 {
    if t <= 0.0 {
        return 1.0;
    }
    if t < 1.18 {
        // Jacobi-transformed series converges fast for small t
        let c = -std::f64::consts::PI.powi(2) / (8.0 * t * t);
        let cdf = (2.0 * std::f64::consts::PI).sqrt() / t
            * (1..=20)
                .map(|k| (c * ((2 * k - 1) as f64).powi(2)).exp())
                .sum::<f64>();
        return (1.0 - cdf).clamp(0.0, 1.0);
    }
    let s: f64 = (1..=100)
        .map(|k| {
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            sign * (-2.0 * (k * k) as f64 * t * t).exp()
        })
        .sum();
    (2.0 * s).clamp(0.0, 1.0)
}

/// Asymptotic p-value of the one-sample KS statistic `d` for sample size
/// `n`, with Stephens' finite-sample adjustment.
pub fn ks_pvalue(d: f64, n: usize) -> f64 {
    let sn = (n as f64).sqrt();
    kolmogorov_survival((sn + 0.12 + 0.11 / sn) * d)
}

/// Least-squares polynomial coefficients `c_0 + c_1 x + … + c_deg x^deg`.
/// `None` if there are fewer points than coefficients.
pub fn polyfit(x: &[f64], y: &[f64], degree: usize) -> Option<Vec<f64>> {
    assert_eq!(x.len(), y.len());
    if x.len() <= degree {
        return None;
    }
    let a = DMatrix::from_fn(x.len(), degree + 1, |i, j| x[i].powi(j as i32));
    let b = DVector::from_column_slice(y);
    let sol = a.svd(true, true).solve(&b, 1e-12).ok()?;
    Some(sol.iter().copied().collect())
}
