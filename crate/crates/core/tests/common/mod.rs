#![allow(dead_code)]

use std::f64::consts::PI;

/// Composite Simpson rule on `[a, b]` with `2m` panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, m: usize) -> f64 {
    let n = 2 * m;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

/// `I^β[g](x)` after substituting `u = (x − t)^β`, which removes the
/// kernel singularity: `1/Γ(β+1) ∫_0^{x^β} g(x − u^{1/β}) du`.
pub fn frac_integral_by_substitution(
    g: impl Fn(f64) -> f64,
    beta: f64,
    x: f64,
    gamma_beta_plus_1: f64,
) -> f64 {
    simpson(|u| g(x - u.powf(1.0 / beta)), 0.0, x.powf(beta), 20000) / gamma_beta_plus_1
}

/// `max |g_i − g_j|` over grid pairs with `|i − j| h ≤ lag`, by direct scan.
pub fn brute_modulus(values: &[f64], h: f64, lag: f64, periodic: bool) -> f64 {
    let n = values.len();
    let mut best: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let mut d = (i as f64 - j as f64).abs() * h;
            if periodic {
                d = d.min(2.0 * PI - d);
            }
            if d <= lag * (1.0 + 1e-12) {
                best = best.max((values[i] - values[j]).abs());
            }
        }
    }
    best
}

pub fn lambdas(num_points: usize) -> Vec<f64> {
    let h = 2.0 * PI / (num_points - 1) as f64;
    (0..num_points).map(|i| i as f64 * h).collect()
}
