//! Special functions.

use crate::error::{Error, Result};

/// The Gamma function for positive finite arguments.
pub fn gamma_fn(x: f64) -> Result<f64> {
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::domain(format!(
            "gamma_fn requires a positive finite argument, got {x}"
        )));
    }
    Ok(statrs::function::gamma::gamma(x))
}

/// `Γ(x)` for arguments already known to be positive.
pub(crate) fn gamma(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    statrs::function::gamma::gamma(x)
}

/// Standard normal distribution function.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(-x / std::f64::consts::SQRT_2)
}

/// Generalized binomial coefficient `C(p, j)` for real `p`.
pub(crate) fn binomial(p: f64, j: usize) -> f64 {
    let mut c = 1.0;
    for i in 0..j {
        c *= (p - i as f64) / (i as f64 + 1.0);
    }
    c
}
