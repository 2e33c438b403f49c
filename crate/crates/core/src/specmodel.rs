//! Spectral density models and their exact reference quantities:
//! autocovariances, spectral function `F`, its fractional derivative
//! `F^(α) = I^{1−α}[f]`, the Fejér expectation of the periodogram, the limit
//! covariance `Θ_α` and the `d_β` distance.
//!
//! Densities live on `[0, 2π]` and are even about `π`
//! (`f(λ) = f(2π − λ)`), which is the same as evenness on `[−π, π]` after
//! periodic extension.

use std::path::{Path, PathBuf};

use nalgebra::{Cholesky, DMatrix, SymmetricEigen};
use rayon::prelude::*;

use crate::config::Section;
use crate::dft::GridDft;
use crate::error::{Error, Result};
use crate::fracops::{frac_integral_at_end, FracIntegrator};
use crate::grid::{fmt_f64, GridFunction};
use crate::quad::{self, gauss_legendre};
use crate::special::gamma;
use crate::TWO_PI;

const EVEN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum ModelKind {
    /// `f ≡ c`: white noise with variance `2πc`.
    Constant { c: f64 },
    /// `f(λ) = (1/2π)(1 − ρ²)/(1 − 2ρ cos λ + ρ²)`, unit variance.
    Ar1 { rho: f64 },
    /// Piecewise-linear interpolant of grid values.
    CustomGrid {
        density: GridFunction,
        source: Option<PathBuf>,
    },
}

/// A continuous, even, strictly positive spectral density on `[0, 2π]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralModel {
    kind: ModelKind,
    bounds: (f64, f64),
}

impl SpectralModel {
    pub fn constant(c: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::domain(format!(
                "constant density level must be positive, got {c}"
            )));
        }
        Ok(Self {
            kind: ModelKind::Constant { c },
            bounds: (c, c),
        })
    }

    /// Unit-variance white noise, `f ≡ 1/(2π)`.
    pub fn white_noise() -> Self {
        Self::constant(1.0 / TWO_PI).expect("positive level")
    }

    pub fn ar1(rho: f64) -> Result<Self> {
        if !(rho.is_finite() && rho.abs() < 1.0) {
            return Err(Error::domain(format!(
                "AR(1) coefficient must lie in (−1, 1), got {rho}"
            )));
        }
        let a = rho.abs();
        let lo = (1.0 - a) / (1.0 + a) / TWO_PI;
        let hi = (1.0 + a) / (1.0 - a) / TWO_PI;
        Ok(Self {
            kind: ModelKind::Ar1 { rho },
            bounds: (lo, hi),
        })
    }

    pub fn custom_grid(density: GridFunction, source: Option<PathBuf>) -> Result<Self> {
        let v = density.values();
        let n = v.len();
        if let Some(i) = v.iter().position(|&x| x <= 0.0) {
            return Err(Error::domain(format!(
                "custom density must be strictly positive, value {i} is {}",
                v[i]
            )));
        }
        for i in 0..n / 2 {
            let (a, b) = (v[i], v[n - 1 - i]);
            if (a - b).abs() > EVEN_TOL * a.abs().max(1.0) {
                return Err(Error::domain(format!(
                    "custom density is not even about π: f[{i}] = {a}, f[{}] = {b}",
                    n - 1 - i
                )));
            }
        }
        let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let density = if density.is_periodic() {
            density
        } else {
            GridFunction::new(v.to_vec(), true)?
        };
        Ok(Self {
            kind: ModelKind::CustomGrid { density, source },
            bounds: (lo, hi),
        })
    }

    pub fn kind(&self) -> &ModelKind {
        &self.kind
    }

    /// `(C1, C2)` with `C1 ≤ f ≤ C2`.
    pub fn bounds(&self) -> (f64, f64) {
        self.bounds
    }

    pub fn id(&self) -> String {
        match &self.kind {
            ModelKind::Constant { c } => format!("constant(c={c})"),
            ModelKind::Ar1 { rho } => format!("ar1(rho={rho})"),
            ModelKind::CustomGrid { density, source } => match source {
                Some(p) => format!("custom_grid({})", p.display()),
                None => format!("custom_grid({} points)", density.num_points()),
            },
        }
    }

    /// `f(λ)` for any real `λ` (periodic extension).
    pub fn density(&self, lambda: f64) -> f64 {
        match &self.kind {
            ModelKind::Constant { c } => *c,
            ModelKind::Ar1 { rho } => {
                (1.0 - rho * rho) / (1.0 - 2.0 * rho * lambda.cos() + rho * rho) / TWO_PI
            }
            ModelKind::CustomGrid { density, .. } => density.interpolate(lambda.rem_euclid(TWO_PI)),
        }
    }

    pub fn density_grid(&self, num_points: usize) -> Result<GridFunction> {
        GridFunction::from_fn(num_points, true, |l| self.density(l))
    }

    /// Reads the `kind`/`c`/`rho`/`grid_csv_path` block. Relative paths are
    /// resolved against `base_dir`.
    pub fn from_section(section: &Section, base_dir: &Path) -> Result<Self> {
        section.check_keys(&["kind", "c", "rho", "grid_csv_path"])?;
        let kind = section.require("kind")?;
        let unexpected = |key: &str| -> Result<()> {
            match section.get(key) {
                Some(_) => Err(section.err(key, format!("not used by kind = {kind}"))),
                None => Ok(()),
            }
        };
        let wrap = |key: &str, r: Result<Self>| r.map_err(|e| section.err(key, e.to_string()));
        match kind {
            "constant" => {
                unexpected("rho")?;
                unexpected("grid_csv_path")?;
                wrap("c", Self::constant(section.parse_required("c")?))
            }
            "ar1" => {
                unexpected("c")?;
                unexpected("grid_csv_path")?;
                wrap("rho", Self::ar1(section.parse_required("rho")?))
            }
            "custom_grid" => {
                unexpected("c")?;
                unexpected("rho")?;
                let rel = PathBuf::from(section.require("grid_csv_path")?);
                let path = if rel.is_absolute() {
                    rel.clone()
                } else {
                    base_dir.join(&rel)
                };
                let file = std::fs::File::open(&path).map_err(|e| Error::io(&path, e))?;
                let grid = GridFunction::read_csv(std::io::BufReader::new(file), false)
                    .map_err(|e| section.err("grid_csv_path", e.to_string()))?;
                wrap("grid_csv_path", Self::custom_grid(grid, Some(rel)))
            }
            other => Err(section.err(
                "kind",
                format!("unknown model kind `{other}` (expected constant, ar1 or custom_grid)"),
            )),
        }
    }

    pub fn to_section(&self) -> Section {
        let s = Section::new("model");
        match &self.kind {
            ModelKind::Constant { c } => s.with("kind", "constant").with("c", c),
            ModelKind::Ar1 { rho } => s.with("kind", "ar1").with("rho", rho),
            ModelKind::CustomGrid { source, .. } => s.with("kind", "custom_grid").with(
                "grid_csv_path",
                source
                    .as_ref()
                    .map(|p| p.display().to_string())
                    .unwrap_or_else(|| "<in-memory>".into()),
            ),
        }
    }

    /// `∫_0^λ f²`.
    fn square_integral(&self, lambda: f64) -> Result<f64> {
        match &self.kind {
            ModelKind::Constant { c } => Ok(c * c * lambda),
            ModelKind::Ar1 { .. } => {
                quad::integrate(|t| self.density(t).powi(2), 0.0, lambda, 1e-14)
            }
            ModelKind::CustomGrid { density, .. } => {
                let v = density.values();
                let h = density.spacing();
                let seg = |a: f64, b: f64, w: f64| w * (a * a + a * b + b * b) / 3.0;
                let (full, _) = segment_position(density, lambda);
                let mut acc = 0.0;
                for i in 0..full {
                    acc += seg(v[i], v[i + 1], h);
                }
                let x0 = full as f64 * h;
                if lambda > x0 {
                    acc += seg(v[full], density.interpolate(lambda), lambda - x0);
                }
                Ok(acc)
            }
        }
    }
}

/// Index of the grid segment containing `x`, and its left node.
fn segment_position(g: &GridFunction, x: f64) -> (usize, f64) {
    let h = g.spacing();
    let i = ((x / h).floor() as usize).min(g.num_points() - 2);
    (i, i as f64 * h)
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(0.0..=TWO_PI).contains(&lambda) {
        return Err(Error::domain(format!("λ = {lambda} outside [0, 2π]")));
    }
    Ok(())
}

/// Autocovariance `r(m) = ∫_{−π}^{π} cos(λm) f(λ) dλ`.
pub fn autocovariance(model: &SpectralModel, m: i64) -> f64 {
    let m = m.unsigned_abs() as usize;
    match model.kind() {
        ModelKind::Constant { c } => {
            if m == 0 {
                TWO_PI * c
            } else {
                0.0
            }
        }
        ModelKind::Ar1 { rho } => rho.powi(m as i32),
        ModelKind::CustomGrid { .. } => autocovariances(model, m + 1)[m],
    }
}

/// `r(0), …, r(len − 1)`.
///
/// For custom grids the integral of `cos(mλ)` against the piecewise-linear
/// density is evaluated in closed form; summation by parts turns it into
/// `r(m) = Re[(e^{imh} − 1) Σ_j Δf_j e^{imjh}] / (m² h)`, one FFT for all `m`.
pub fn autocovariances(model: &SpectralModel, len: usize) -> Vec<f64> {
    match model.kind() {
        ModelKind::Constant { .. } | ModelKind::Ar1 { .. } => {
            (0..len as i64).map(|m| autocovariance(model, m)).collect()
        }
        ModelKind::CustomGrid { density, .. } => {
            let v = density.values();
            let h = density.spacing();
            let l = v.len() - 1;
            let diffs: Vec<f64> = v.windows(2).map(|w| w[1] - w[0]).collect();
            let sums = GridDft::new(v.len()).sums(&diffs, 0);
            let r0 = h * v.windows(2).map(|w| 0.5 * (w[0] + w[1])).sum::<f64>();
            let mut out = Vec::with_capacity(len);
            for m in 0..len {
                if m == 0 {
                    out.push(r0);
                    continue;
                }
                let phase = (m % l) as f64 * h;
                let e = rustfft::num_complex::Complex::new(phase.cos() - 1.0, phase.sin());
                let mf = m as f64;
                out.push((e * sums[m % l]).re / (mf * mf * h));
            }
            out
        }
    }
}

/// Spectral function `F(λ) = ∫_0^λ f`.
pub fn spectral_function(model: &SpectralModel, lambda: f64) -> Result<f64> {
    check_lambda(lambda)?;
    Ok(match model.kind() {
        ModelKind::Constant { c } => c * lambda,
        ModelKind::Ar1 { rho } => {
            // d/dλ [λ + 2 atan2(ρ sin λ, 1 − ρ cos λ)] = (1 − ρ²)/(1 − 2ρ cos λ + ρ²)
            (lambda + 2.0 * (rho * lambda.sin()).atan2(1.0 - rho * lambda.cos())) / TWO_PI
        }
        ModelKind::CustomGrid { density, .. } => {
            let v = density.values();
            let h = density.spacing();
            let (i, x0) = segment_position(density, lambda);
            let full: f64 = v[..=i].windows(2).map(|w| 0.5 * h * (w[0] + w[1])).sum();
            full + 0.5 * (lambda - x0) * (v[i] + density.interpolate(lambda))
        }
    })
}

fn check_alpha_half_open(alpha: f64) -> Result<()> {
    if !(0.0..0.5).contains(&alpha) {
        return Err(Error::domain(format!(
            "derivative order must lie in [0, 1/2) (the well-posed range), got {alpha}"
        )));
    }
    Ok(())
}

fn check_alpha_open(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 0.5) {
        return Err(Error::domain(format!(
            "derivative order must lie in (0, 1/2), got {alpha}"
        )));
    }
    Ok(())
}

/// Intervals per unit length for the reference product integration.
const REF_DENSITY: f64 = 65536.0 / TWO_PI;
const REF_TOL: f64 = 1e-10;
const REF_MAX_LEVELS: usize = 4;

/// `I^order[φ](x)` by product integration on `[0, x]` with Richardson
/// extrapolation over successive grid doublings (at least `REF_DENSITY`
/// intervals per unit length).
fn reference_frac_integral(phi: impl Fn(f64) -> f64, order: f64, x: f64) -> Result<f64> {
    if x == 0.0 {
        return Ok(0.0);
    }
    let eval = |n: usize| {
        let h = x / n as f64;
        let values: Vec<f64> = (0..=n).map(|i| phi(i as f64 * h)).collect();
        frac_integral_at_end(&values, h, order)
    };
    let mut n = ((REF_DENSITY * x).ceil() as usize).max(256);
    let mut coarse = eval(n);
    let mut prev_extrapolated: Option<f64> = None;
    for _ in 0..REF_MAX_LEVELS {
        n *= 2;
        let fine = eval(n);
        let extrapolated = fine + (fine - coarse) / 3.0;
        if let Some(p) = prev_extrapolated {
            if (extrapolated - p).abs() <= REF_TOL * extrapolated.abs().max(1.0) {
                return Ok(extrapolated);
            }
        }
        prev_extrapolated = Some(extrapolated);
        coarse = fine;
    }
    // Fall back on the last estimate once it is well inside a looser bound.
    let last = prev_extrapolated.expect("at least one level");
    if (coarse - last).abs() <= 1e-7 * last.abs().max(1.0) {
        Ok(last)
    } else {
        Err(Error::numerical(format!(
            "reference fractional integral did not converge at x = {x} (order {order})"
        )))
    }
}

/// Ground-truth fractional derivative `F^(α)(λ) = I^{1−α}[f](λ)`.
pub fn frac_spectral_derivative(model: &SpectralModel, alpha: f64, lambda: f64) -> Result<f64> {
    check_alpha_half_open(alpha)?;
    check_lambda(lambda)?;
    if alpha == 0.0 {
        return spectral_function(model, lambda);
    }
    match model.kind() {
        ModelKind::Constant { c } => Ok(c * lambda.powf(1.0 - alpha) / gamma(2.0 - alpha)),
        _ => reference_frac_integral(|t| model.density(t), 1.0 - alpha, lambda),
    }
}

/// [`frac_spectral_derivative`] at every point of a grid, by FFT product
/// integration on two refinements of that grid (at least 65536 intervals)
/// combined by Richardson extrapolation.
pub fn frac_spectral_derivative_grid(
    model: &SpectralModel,
    alpha: f64,
    num_points: usize,
) -> Result<GridFunction> {
    check_alpha_half_open(alpha)?;
    let exact = |l: f64| frac_spectral_derivative(model, alpha, l);
    if alpha == 0.0 || matches!(model.kind(), ModelKind::Constant { .. }) {
        let probe = GridFunction::zeros(num_points)?;
        let values = probe.lambdas().map(exact).collect::<Result<Vec<_>>>()?;
        return GridFunction::new(values, false);
    }
    let intervals = num_points - 1;
    let refine = (65536usize).div_ceil(intervals).max(1);
    let at_refinement = |r: usize| -> Result<Vec<f64>> {
        let fine_points = intervals * r + 1;
        let f = model.density_grid(fine_points)?;
        let out = FracIntegrator::new(1.0 - alpha, fine_points)?.apply(f.values());
        Ok((0..num_points).map(|i| out[i * r]).collect())
    };
    let coarse = at_refinement(refine)?;
    let fine = at_refinement(2 * refine)?;
    let values = fine
        .iter()
        .zip(&coarse)
        .map(|(f, c)| f + (f - c) / 3.0)
        .collect();
    GridFunction::new(values, false)
}

/// Fejér kernel `Φ_n(λ) = sin²(nλ/2) / (2πn sin²(λ/2))`, with the limit
/// `n/(2π)` at multiples of `2π`.
pub fn fejer_kernel(n: usize, lambda: f64) -> f64 {
    assert!(n >= 1, "Fejér kernel needs n ≥ 1");
    let nf = n as f64;
    let x = (lambda + std::f64::consts::PI).rem_euclid(TWO_PI) - std::f64::consts::PI;
    if (nf * x).abs() < 1e-7 {
        return nf / TWO_PI;
    }
    let num = (0.5 * nf * x).sin();
    let den = (0.5 * x).sin();
    num * num / (TWO_PI * nf * den * den)
}

/// `E J_n = Φ_n * f` on a grid.
///
/// Uses the equivalent finite form
/// `E J_n(λ) = (1/2π) Σ_{|m|<n} (1 − |m|/n) r(m) e^{−imλ}`,
/// exact given the autocovariances.
pub fn expected_periodogram(
    model: &SpectralModel,
    n: usize,
    num_points: usize,
) -> Result<GridFunction> {
    if n == 0 {
        return Err(Error::domain("sample size must be at least 1"));
    }
    if num_points < 2 {
        return Err(Error::domain("output grid needs at least 2 points"));
    }
    if let ModelKind::Constant { c } = model.kind() {
        return GridFunction::new(vec![*c; num_points], true);
    }
    let r = autocovariances(model, n);
    let nf = n as f64;
    let coeffs: Vec<f64> = r
        .iter()
        .enumerate()
        .map(|(m, &rm)| {
            let w = if m == 0 {
                1.0
            } else {
                2.0 * (1.0 - m as f64 / nf)
            };
            w * rm / TWO_PI
        })
        .collect();
    let sums = GridDft::new(num_points).sums(&coeffs, 0);
    let mut values: Vec<f64> = sums.iter().map(|c| c.re).collect();
    values.push(values[0]);
    GridFunction::new(values, true)
}

/// `β²(λ) = 4π ∫_0^λ f²`.
pub fn beta_squared(model: &SpectralModel, lambda: f64) -> Result<f64> {
    check_lambda(lambda)?;
    Ok(4.0 * std::f64::consts::PI * model.square_integral(lambda)?)
}

/// `d_β(λ, μ) = |β(λ) − β(μ)|`.
pub fn beta_distance(model: &SpectralModel, lambda: f64, mu: f64) -> Result<f64> {
    Ok((beta_squared(model, lambda)?.sqrt() - beta_squared(model, mu)?.sqrt()).abs())
}

/// `4π / Γ²(1 − α)`.
fn theta_prefactor(alpha: f64) -> f64 {
    4.0 * std::f64::consts::PI / gamma(1.0 - alpha).powi(2)
}

/// Diagonal `σ²_α(λ) = Θ_α(λ, λ) = (4π Γ(1−2α)/Γ²(1−α)) · I^{1−2α}[f²](λ)`.
pub fn limit_variance(model: &SpectralModel, alpha: f64, lambda: f64) -> Result<f64> {
    check_alpha_open(alpha)?;
    check_lambda(lambda)?;
    let integral = match model.kind() {
        ModelKind::Constant { c } => {
            c * c * lambda.powf(1.0 - 2.0 * alpha) / gamma(2.0 - 2.0 * alpha)
        }
        _ => reference_frac_integral(|t| model.density(t).powi(2), 1.0 - 2.0 * alpha, lambda)?,
    };
    Ok(theta_prefactor(alpha) * gamma(1.0 - 2.0 * alpha) * integral)
}

const THETA_TOL: f64 = 1e-8;
const THETA_MAX_REFINEMENTS: usize = 20;
const GL_ORDER: usize = 8;

/// Off-diagonal `Θ_α(λ, μ)` for `λ < μ`: the integral over `[0, λ]` on a
/// mesh graded toward `ν = λ` with exponent `2/(1 − 2α)`, Gauss–Legendre
/// panels, and Richardson extrapolation across mesh doublings.
fn theta_off_diagonal(
    model: &SpectralModel,
    alpha: f64,
    lambda: f64,
    mu: f64,
    rule: &(Vec<f64>, Vec<f64>),
) -> Result<f64> {
    debug_assert!(lambda < mu);
    let grading = 2.0 / (1.0 - 2.0 * alpha);
    let integrand = |nu: f64| {
        let f = model.density(nu);
        f * f * ((lambda - nu) * (mu - nu)).powf(-alpha)
    };
    let (nodes, weights) = rule;
    let composite = |panels: usize| -> f64 {
        let mesh = |k: usize| lambda * (1.0 - (1.0 - k as f64 / panels as f64).powf(grading));
        (0..panels)
            .map(|k| {
                let (a, b) = (mesh(k), mesh(k + 1));
                let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
                h * nodes
                    .iter()
                    .zip(weights)
                    .map(|(x, w)| w * integrand(c + h * x))
                    .sum::<f64>()
            })
            .sum()
    };
    let mut panels = 4;
    let mut coarse = composite(panels);
    let mut previous: Option<f64> = None;
    for _ in 0..THETA_MAX_REFINEMENTS {
        panels *= 2;
        let fine = composite(panels);
        let extrapolated = fine + (fine - coarse) / 3.0;
        if let Some(p) = previous {
            if (extrapolated - p).abs() * theta_prefactor(alpha) <= THETA_TOL {
                return Ok(theta_prefactor(alpha) * extrapolated);
            }
        }
        previous = Some(extrapolated);
        coarse = fine;
    }
    Err(Error::numerical(format!(
        "Θ_α({lambda}, {mu}) quadrature did not reach {THETA_TOL:e} after \
         {THETA_MAX_REFINEMENTS} refinements (last estimates {coarse}, {previous:?}, α = {alpha})"
    )))
}

/// The limit covariance `Θ_α` on a probe grid, with its PSD projection and
/// a factor `L` such that `L Lᵀ` is the projected matrix.
#[derive(Debug, Clone)]
pub struct LimitCovariance {
    alpha: f64,
    probes: Vec<f64>,
    matrix: DMatrix<f64>,
    projected: DMatrix<f64>,
    factor: DMatrix<f64>,
    clip_applied: bool,
    triangular: bool,
}

impl LimitCovariance {
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn probes(&self) -> &[f64] {
        &self.probes
    }

    pub fn len(&self) -> usize {
        self.probes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probes.is_empty()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn projected(&self) -> &DMatrix<f64> {
        &self.projected
    }

    pub fn factor(&self) -> &DMatrix<f64> {
        &self.factor
    }

    /// Whether negative eigenvalues were clipped during PSD projection.
    pub fn clip_applied(&self) -> bool {
        self.clip_applied
    }

    /// Whether `factor` is a Cholesky factor (otherwise an eigen square root).
    pub fn factor_is_triangular(&self) -> bool {
        self.triangular
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.matrix[(i, j)]
    }

    /// Header row of probe λ values, then one row per probe.
    pub fn write_csv<W: std::io::Write>(
        &self,
        mut w: W,
        comments: &[String],
    ) -> std::io::Result<()> {
        for c in comments {
            writeln!(w, "# {c}")?;
        }
        let row = |it: &mut dyn Iterator<Item = f64>| it.map(fmt_f64).collect::<Vec<_>>().join(",");
        writeln!(w, "{}", row(&mut self.probes.iter().copied()))?;
        for i in 0..self.len() {
            writeln!(w, "{}", row(&mut self.matrix.row(i).iter().copied()))?;
        }
        Ok(())
    }

    /// Builds the projection and factor for an explicit symmetric matrix.
    pub fn from_matrix(alpha: f64, probes: Vec<f64>, matrix: DMatrix<f64>) -> Result<Self> {
        let k = probes.len();
        if matrix.nrows() != k || matrix.ncols() != k {
            return Err(Error::domain(
                "covariance matrix shape does not match the probe grid",
            ));
        }
        let eig = SymmetricEigen::new(matrix.clone());
        let min_eig = eig
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        let clip_applied = min_eig < 0.0;
        let projected = if clip_applied {
            let clipped = eig.eigenvalues.map(|l| l.max(0.0));
            &eig.eigenvectors * DMatrix::from_diagonal(&clipped) * eig.eigenvectors.transpose()
        } else {
            matrix.clone()
        };
        let projected = 0.5 * (&projected + projected.transpose());
        let (factor, triangular) = match Cholesky::new(projected.clone()) {
            Some(ch) => (ch.l(), true),
            None => {
                let roots = eig.eigenvalues.map(|l| l.max(0.0).sqrt());
                (&eig.eigenvectors * DMatrix::from_diagonal(&roots), false)
            }
        };
        Ok(Self {
            alpha,
            probes,
            matrix,
            projected,
            factor,
            clip_applied,
            triangular,
        })
    }
}

/// `Θ_α(λ_i, λ_j) = 4π/Γ²(1−α) ∫_0^{min} f²(ν) (λ_i − ν)^{−α} (λ_j − ν)^{−α} dν`
/// on `probes`.
pub fn limit_covariance(
    model: &SpectralModel,
    alpha: f64,
    probes: &[f64],
) -> Result<LimitCovariance> {
    check_alpha_open(alpha)?;
    if probes.is_empty() {
        return Err(Error::domain("probe grid is empty"));
    }
    if let Some(p) = probes.iter().find(|&&p| !(p > 0.0 && p <= TWO_PI)) {
        return Err(Error::domain(format!("probe λ = {p} outside (0, 2π]")));
    }
    let k = probes.len();
    let rule = gauss_legendre(GL_ORDER);
    let pairs: Vec<(usize, usize)> = (0..k).flat_map(|i| (i..k).map(move |j| (i, j))).collect();
    let entries = pairs
        .par_iter()
        .map(|&(i, j)| {
            let (a, b) = (probes[i].min(probes[j]), probes[i].max(probes[j]));
            if a == b {
                limit_variance(model, alpha, a)
            } else {
                theta_off_diagonal(model, alpha, a, b, &rule)
            }
        })
        .collect::<Result<Vec<f64>>>()?;
    let mut matrix = DMatrix::zeros(k, k);
    for (&(i, j), v) in pairs.iter().zip(entries) {
        matrix[(i, j)] = v;
        matrix[(j, i)] = v;
    }
    LimitCovariance::from_matrix(alpha, probes.to_vec(), matrix)
}
