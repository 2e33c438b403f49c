//! Riemann–Liouville fractional calculus on the uniform grid of `[0, 2π]`
//! and regularity measurements (modulus of continuity, Hölder norm).
//!
//! The fractional integral
//!
//! ```text
//! I^β[g](x) = 1/Γ(β) ∫_0^x g(t) (x − t)^{β−1} dt,   0 < β ≤ 1
//! ```
//!
//! is computed by product integration: `g` is replaced by its
//! piecewise-linear interpolant and the weakly singular kernel is integrated
//! exactly against it. On a uniform grid this gives
//!
//! ```text
//! I_i = h^β/Γ(β+2) · ( A_i g_0 + Σ_{j=1}^{i} c_{i−j} g_j )
//! c_0 = 1,  c_k = (k+1)^{β+1} − 2k^{β+1} + (k−1)^{β+1}
//! A_i = (i−1)^{β+1} − (i−1−β) i^β
//! ```
//!
//! The sum is a discrete convolution, evaluated by FFT. The result is exact
//! (up to rounding) whenever `g` is piecewise linear on the grid.

use std::collections::VecDeque;

use crate::dft::Convolver;
use crate::error::{Error, Result};
use crate::grid::{spacing_for, GridFunction};
use crate::special::{binomial, gamma};

/// Terms beyond this index use a binomial series instead of differences of
/// large powers, which would cancel catastrophically.
const SERIES_FROM: usize = 8;
const SERIES_TERMS: usize = 30;

/// Product-integration weights for one order `β`, with the binomial series
/// coefficients used for large indices precomputed.
struct Weights {
    beta: f64,
    p: f64,
    even: [f64; SERIES_TERMS / 2 + 1],
    alternating: [f64; SERIES_TERMS + 1],
}

impl Weights {
    fn new(beta: f64) -> Self {
        let p = beta + 1.0;
        let mut even = [0.0; SERIES_TERMS / 2 + 1];
        for (m, e) in even.iter_mut().enumerate().skip(1) {
            *e = binomial(p, 2 * m);
        }
        let mut alternating = [0.0; SERIES_TERMS + 1];
        for (m, a) in alternating.iter_mut().enumerate().skip(2) {
            *a = binomial(p, m);
        }
        Self {
            beta,
            p,
            even,
            alternating,
        }
    }

    /// `c_k`.
    fn interior(&self, k: usize) -> f64 {
        let p = self.p;
        match k {
            0 => 1.0,
            1 => 2f64.powf(p) - 2.0,
            k if k < SERIES_FROM => {
                let k = k as f64;
                (k + 1.0).powf(p) - 2.0 * k.powf(p) + (k - 1.0).powf(p)
            }
            k => {
                // k^p [(1+x)^p + (1−x)^p − 2] = 2 k^p Σ_{m≥1} C(p, 2m) x^{2m}
                let x2 = 1.0 / (k as f64 * k as f64);
                let mut sum = 0.0;
                let mut xp = 1.0;
                for c in &self.even[1..] {
                    xp *= x2;
                    sum += c * xp;
                }
                2.0 * (k as f64).powf(p) * sum
            }
        }
    }

    /// `A_i`, `i ≥ 1`.
    fn endpoint(&self, i: usize) -> f64 {
        let (p, beta) = (self.p, self.beta);
        if i < SERIES_FROM {
            let fi = i as f64;
            (fi - 1.0).powf(p) - (fi - 1.0 - beta) * fi.powf(beta)
        } else {
            // i^p [(1−x)^p − 1 + p x] = i^p Σ_{m≥2} C(p, m) (−x)^m
            let x = -1.0 / i as f64;
            let mut sum = 0.0;
            let mut xp = x;
            for c in &self.alternating[2..] {
                xp *= x;
                sum += c * xp;
            }
            (i as f64).powf(p) * sum
        }
    }
}

fn check_order(order: f64) -> Result<()> {
    if !(order > 0.0 && order <= 1.0) {
        return Err(Error::domain(format!(
            "fractional integral order must lie in (0, 1], got {order}"
        )));
    }
    Ok(())
}

/// A reusable fractional integrator of a fixed order on a fixed grid.
///
/// Building one precomputes the weight sequence and its transform, so
/// repeated application (e.g. once per Monte Carlo replication) costs two
/// FFTs.
pub struct FracIntegrator {
    order: f64,
    num_points: usize,
    spacing: f64,
    scale: f64,
    endpoint: Vec<f64>,
    conv: Option<Convolver>,
}

impl FracIntegrator {
    pub fn new(order: f64, num_points: usize) -> Result<Self> {
        check_order(order)?;
        if num_points < 2 {
            return Err(Error::domain(
                "fractional integration needs at least 2 grid points",
            ));
        }
        let h = spacing_for(num_points);
        Self::with_spacing(order, num_points, h)
    }

    fn with_spacing(order: f64, num_points: usize, h: f64) -> Result<Self> {
        let scale = h.powf(order) / gamma(order + 2.0);
        if order == 1.0 {
            return Ok(Self {
                order,
                num_points,
                spacing: h,
                scale,
                endpoint: Vec::new(),
                conv: None,
            });
        }
        let w = Weights::new(order);
        let weights: Vec<f64> = (0..num_points).map(|k| w.interior(k)).collect();
        let mut endpoint = vec![0.0; num_points];
        for (i, a) in endpoint.iter_mut().enumerate().skip(1) {
            *a = w.endpoint(i);
        }
        Ok(Self {
            order,
            num_points,
            spacing: h,
            scale,
            endpoint,
            conv: Some(Convolver::new(&weights)),
        })
    }

    pub fn order(&self) -> f64 {
        self.order
    }

    pub fn num_points(&self) -> usize {
        self.num_points
    }

    /// Applies the integrator to grid values; `out[0] = 0`.
    pub fn apply(&self, values: &[f64]) -> Vec<f64> {
        assert_eq!(values.len(), self.num_points, "grid size mismatch");
        let Some(conv) = &self.conv else {
            return cumulative_trapezoid(values, self.spacing);
        };
        let mut shifted = values.to_vec();
        shifted[0] = 0.0;
        let mut out = conv.apply(&shifted);
        out[0] = 0.0;
        for (o, e) in out.iter_mut().zip(&self.endpoint).skip(1) {
            *o = self.scale * (e * values[0] + *o);
        }
        out
    }
}

/// Cumulative trapezoid rule with spacing `h`, starting from 0.
pub(crate) fn cumulative_trapezoid(values: &[f64], h: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len());
    let mut acc = 0.0;
    out.push(0.0);
    for w in values.windows(2) {
        acc += 0.5 * h * (w[0] + w[1]);
        out.push(acc);
    }
    out
}

/// Fractional integral `I^order[g]` at every grid point.
pub fn frac_integral(g: &GridFunction, order: f64) -> Result<GridFunction> {
    let integrator = FracIntegrator::new(order, g.num_points())?;
    GridFunction::new(integrator.apply(g.values()), false)
}

/// Product-integration value of `I^order[g](x_N)` at the right end of a
/// uniform grid `x_i = i·h`, `i = 0..=N`, from samples `g_i`. Costs `O(N)`.
pub(crate) fn frac_integral_at_end(values: &[f64], h: f64, order: f64) -> f64 {
    let n = values.len() - 1;
    if n == 0 {
        return 0.0;
    }
    let w = Weights::new(order);
    let mut sum = w.endpoint(n) * values[0];
    for (j, &v) in values.iter().enumerate().skip(1) {
        sum += w.interior(n - j) * v;
    }
    h.powf(order) / gamma(order + 2.0) * sum
}

/// Riemann–Liouville derivative `D^order[g] = d/dx I^{1−order}[g]`.
///
/// Interior points use centered differences of the product-integrated
/// `I^{1−order}[g]`, the right endpoint a second-order one-sided
/// difference. At `x = 0` the derivative either does not exist (`g(0) ≠ 0`)
/// or vanishes, and the value 0 is returned in both cases.
pub fn frac_derivative(g: &GridFunction, order: f64) -> Result<GridFunction> {
    if !(order > 0.0 && order < 1.0) {
        return Err(Error::domain(format!(
            "fractional derivative order must lie in (0, 1), got {order}"
        )));
    }
    let n = g.num_points();
    if n < 3 {
        return Err(Error::domain(
            "fractional derivative needs at least 3 grid points",
        ));
    }
    let h = g.spacing();
    let integral = FracIntegrator::new(1.0 - order, n)?.apply(g.values());
    let mut out = vec![0.0; n];
    for i in 1..n - 1 {
        out[i] = (integral[i + 1] - integral[i - 1]) / (2.0 * h);
    }
    out[n - 1] = (3.0 * integral[n - 1] - 4.0 * integral[n - 2] + integral[n - 3]) / (2.0 * h);
    GridFunction::new(out, false)
}

/// Largest lag (in grid steps) resolved by distance `h`.
fn max_lag(g: &GridFunction, h: f64) -> Result<usize> {
    let spacing = g.spacing();
    if !(h.is_finite() && h >= spacing * (1.0 - 1e-9)) {
        return Err(Error::domain(format!(
            "modulus step {h} is below the grid spacing {spacing}"
        )));
    }
    Ok((h / spacing + 1e-9).floor() as usize)
}

/// Maximum of `max − min` over all windows of `window` consecutive values.
fn max_window_range(values: &[f64], window: usize) -> f64 {
    let mut hi: VecDeque<usize> = VecDeque::new();
    let mut lo: VecDeque<usize> = VecDeque::new();
    let mut best = 0.0f64;
    for (i, &v) in values.iter().enumerate() {
        while hi.back().is_some_and(|&j| values[j] <= v) {
            hi.pop_back();
        }
        hi.push_back(i);
        while lo.back().is_some_and(|&j| values[j] >= v) {
            lo.pop_back();
        }
        lo.push_back(i);
        let start = (i + 1).saturating_sub(window);
        while hi.front().is_some_and(|&j| j < start) {
            hi.pop_front();
        }
        while lo.front().is_some_and(|&j| j < start) {
            lo.pop_front();
        }
        best = best.max(values[hi[0]] - values[lo[0]]);
    }
    best
}

/// Modulus of continuity `ω(g, h) = max |g(λ) − g(μ)|` over grid pairs with
/// `|λ − μ| ≤ h` (distance on the circle for periodic `g`).
pub fn modulus_of_continuity(g: &GridFunction, h: f64) -> Result<f64> {
    let lag = max_lag(g, h)?;
    let v = g.values();
    if !g.is_periodic() {
        return Ok(max_window_range(v, lag + 1));
    }
    // N − 1 distinct points on the circle.
    let distinct = &v[..v.len() - 1];
    let l = distinct.len();
    if 2 * lag >= l {
        let (lo, hi) = distinct
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
                (lo.min(x), hi.max(x))
            });
        return Ok(hi - lo);
    }
    let extended: Vec<f64> = distinct.iter().chain(&distinct[..lag]).copied().collect();
    Ok(max_window_range(&extended, lag + 1))
}

/// Hölder norm `sup|g| + max_{λ≠μ} |g(λ) − g(μ)| / |λ − μ|^delta` over grid
/// pairs, together with the small-scale ratio `ω(g, h_min)/h_min^delta`
/// at the grid spacing (which tends to 0 for functions in the little
/// Hölder space).
pub fn holder_norm(g: &GridFunction, delta: f64) -> Result<(f64, f64)> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::domain(format!(
            "Hölder exponent must lie in (0, 1), got {delta}"
        )));
    }
    let v = g.values();
    let spacing = g.spacing();
    let (points, circle) = if g.is_periodic() {
        (&v[..v.len() - 1], Some(v.len() - 1))
    } else {
        (v, None)
    };
    let n = points.len();
    let mut seminorm = 0.0f64;
    for lag in 1..n {
        let steps = match circle {
            Some(l) => lag.min(l - lag),
            None => lag,
        };
        let denom = (steps as f64 * spacing).powf(delta);
        let max_diff = points
            .iter()
            .zip(&points[lag..])
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        seminorm = seminorm.max(max_diff / denom);
    }
    let vanishing = modulus_of_continuity(g, spacing)? / spacing.powf(delta);
    Ok((g.sup_norm() + seminorm, vanishing))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::gamma_fn;
    use crate::TWO_PI;
    use approx::assert_relative_eq;

    #[test]
    fn weights_series_matches_direct_differences() {
        for &p in &[1.1, 1.5, 1.75, 1.9] {
            let w = Weights::new(p - 1.0);
            for k in SERIES_FROM..SERIES_FROM + 20 {
                let kf = k as f64;
                let direct = (kf + 1.0).powf(p) - 2.0 * kf.powf(p) + (kf - 1.0).powf(p);
                assert_relative_eq!(w.interior(k), direct, max_relative = 1e-10);
                let beta = p - 1.0;
                let direct_a = (kf - 1.0).powf(p) - (kf - 1.0 - beta) * kf.powf(beta);
                assert_relative_eq!(w.endpoint(k), direct_a, max_relative = 1e-10);
            }
        }
    }

    #[test]
    fn constant_is_integrated_exactly() {
        // I^β[1](x) = x^β / Γ(1+β) holds at every grid point.
        for &beta in &[0.2, 0.5, 0.75, 1.0] {
            let g = GridFunction::from_fn(301, false, |_| 1.0).unwrap();
            let out = frac_integral(&g, beta).unwrap();
            for (x, v) in out.lambdas().zip(out.values()) {
                let exact = x.powf(beta) / gamma_fn(1.0 + beta).unwrap();
                assert_relative_eq!(*v, exact, epsilon = 1e-12, max_relative = 1e-11);
            }
        }
    }

    #[test]
    fn linear_is_integrated_exactly() {
        // I^β[t](x) = x^{1+β} / Γ(2+β)
        let g = GridFunction::from_fn(1025, false, |t| t).unwrap();
        let out = frac_integral(&g, 0.5).unwrap();
        for (x, v) in out.lambdas().zip(out.values()) {
            let exact = x.powf(1.5) / gamma_fn(2.5).unwrap();
            assert_relative_eq!(*v, exact, epsilon = 1e-11, max_relative = 1e-11);
        }
    }

    #[test]
    fn spec_examples_for_integral() {
        let ones = GridFunction::from_fn(4097, false, |_| 1.0).unwrap();
        let half = frac_integral(&ones, 0.5).unwrap();
        assert_relative_eq!(
            half.eval(1.0).unwrap(),
            std::f64::consts::FRAC_2_SQRT_PI,
            epsilon = 1e-6
        );
        let full = frac_integral(&ones, 1.0).unwrap();
        assert_relative_eq!(full.eval(2.0).unwrap(), 2.0, epsilon = 1e-12);
        let t = GridFunction::from_fn(4097, false, |t| t).unwrap();
        let ti = frac_integral(&t, 0.5).unwrap();
        assert_relative_eq!(ti.eval(1.0).unwrap(), 0.752252, epsilon = 1e-6);
    }

    #[test]
    fn order_one_is_trapezoid() {
        let g = GridFunction::from_fn(100, false, |t| t.cos() + t * t).unwrap();
        let out = frac_integral(&g, 1.0).unwrap();
        let trap = cumulative_trapezoid(g.values(), g.spacing());
        assert_eq!(out.values(), &trap[..]);
    }

    #[test]
    fn single_point_agrees_with_full_grid() {
        let g = GridFunction::from_fn(513, false, |t| (1.0 + t).ln() + t.sin()).unwrap();
        let full = frac_integral(&g, 0.6).unwrap();
        let end = frac_integral_at_end(g.values(), g.spacing(), 0.6);
        assert_relative_eq!(end, *full.values().last().unwrap(), max_relative = 1e-11);
    }

    #[test]
    fn integral_rejects_bad_orders() {
        let g = GridFunction::zeros(10).unwrap();
        assert!(frac_integral(&g, 0.0).is_err());
        assert!(frac_integral(&g, 1.5).is_err());
        assert!(frac_integral(&g, f64::NAN).is_err());
        assert!(frac_derivative(&g, 1.0).is_err());
        assert!(frac_derivative(&g, 0.0).is_err());
    }

    #[test]
    fn derivative_of_constant() {
        // D^0.3[1](x) = x^{−0.3} / Γ(0.7)
        let g = GridFunction::from_fn(4097, false, |_| 1.0).unwrap();
        let d = frac_derivative(&g, 0.3).unwrap();
        let exact = 1.0 / gamma_fn(0.7).unwrap();
        assert_relative_eq!(exact, 0.770383, epsilon = 1e-6);
        assert_relative_eq!(d.eval(1.0).unwrap(), exact, max_relative = 1e-4);
        assert_eq!(d.values()[0], 0.0);
    }

    #[test]
    fn derivative_of_power_function() {
        // D^0.3[t^0.3] = Γ(1.3)/Γ(1.0) = 0.897471, constant in x.
        let g = GridFunction::from_fn(8193, false, |t| t.powf(0.3)).unwrap();
        let d = frac_derivative(&g, 0.3).unwrap();
        let expected = gamma_fn(1.3).unwrap();
        assert_relative_eq!(expected, 0.897471, epsilon = 1e-6);
        for &x in &[1.0, std::f64::consts::PI, 5.0] {
            assert_relative_eq!(d.eval(x).unwrap(), expected, max_relative = 1e-3);
        }
    }

    #[test]
    fn modulus_examples() {
        let c = GridFunction::from_fn(101, false, |_| 3.0).unwrap();
        assert_eq!(modulus_of_continuity(&c, 1.0).unwrap(), 0.0);
        let lin = GridFunction::from_fn(TWO_PI_GRID, false, |t| t).unwrap();
        assert_relative_eq!(
            modulus_of_continuity(&lin, 0.1).unwrap(),
            0.1,
            epsilon = lin.spacing()
        );
        assert!(modulus_of_continuity(&lin, 0.5 * lin.spacing()).is_err());
    }

    const TWO_PI_GRID: usize = 4097;

    #[test]
    fn periodic_modulus_wraps() {
        // A jump across the seam is visible only with circular distance.
        let g = GridFunction::from_fn(65, true, |t| (t / TWO_PI - 0.5).abs()).unwrap();
        let h = g.spacing();
        let w = modulus_of_continuity(&g, h).unwrap();
        assert_relative_eq!(w, h / TWO_PI, epsilon = 1e-12);
    }

    #[test]
    fn holder_of_constant_and_zero() {
        let c = GridFunction::from_fn(64, false, |_| -2.5).unwrap();
        assert_eq!(holder_norm(&c, 0.5).unwrap(), (2.5, 0.0));
        let z = GridFunction::zeros(64).unwrap();
        assert_eq!(holder_norm(&z, 0.3).unwrap(), (0.0, 0.0));
        assert!(holder_norm(&z, 1.0).is_err());
    }
}
