//! Monte Carlo checks of the estimator's asymptotics.
//!
//! Replication `r` at sample size index `i` draws its path from stream
//! `(i << 32) | r` of the configured seed. Replications run in fixed-size
//! chunks on the rayon pool; partial sums are combined in chunk order, so
//! results do not depend on the number of threads.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimate::{default_grid_points, FracEstimate, PeriodogramEngine};
use crate::fracops::{cumulative_trapezoid, modulus_of_continuity, FracIntegrator};
use crate::grid::GridFunction;
use crate::gsim::{sample_limit_process, CirculantSampler};
use crate::specmodel::{
    beta_squared, expected_periodogram, frac_spectral_derivative_grid, limit_covariance,
    LimitCovariance, SpectralModel,
};
use crate::stats;
use crate::TWO_PI;

const CHUNK: usize = 8;
/// Dyadic Hölder lags `2π·2^{−k}` for these `k`.
pub const HOLDER_LEVELS: std::ops::RangeInclusive<u32> = 3..=7;
/// Orders of the moment-growth check at `λ = π`.
pub const MOMENT_ORDERS: [u32; 4] = [2, 4, 6, 8];
/// Number of equally spaced probes `2πk/64`, `k = 1..=64`, for confidence bands.
pub const BAND_PROBES: usize = 64;
/// Range of `W°(u)` used for the tail fits.
pub const TAIL_FIT_RANGE: (f64, f64) = (0.01, 0.5);

const STREAM_BAND_DRAWS: u64 = 1 << 62;
const STREAM_BAND_PATHS: u64 = 1 << 61;

#[derive(Debug, Clone)]
pub struct McConfig {
    pub model: SpectralModel,
    pub alpha: f64,
    pub n_list: Vec<usize>,
    pub replications: usize,
    pub probe_lambdas: Vec<f64>,
    pub seed: u64,
    pub tail_u_grid: Vec<f64>,
    pub holder_delta: f64,
    /// `None` skips the confidence band.
    pub delta_confidence: Option<f64>,
    pub calibration_draws: usize,
    /// Evaluation grid size; `None` uses [`default_grid_points`] per `n`.
    pub grid_points: Option<usize>,
}

impl McConfig {
    /// Documented defaults for everything except the model, α, `n_list` and R.
    pub fn new(model: SpectralModel, alpha: f64, n_list: Vec<usize>, replications: usize) -> Self {
        Self {
            model,
            alpha,
            n_list,
            replications,
            probe_lambdas: default_probes(),
            seed: 1,
            tail_u_grid: default_tail_grid(),
            holder_delta: default_holder_delta(alpha),
            delta_confidence: Some(0.05),
            calibration_draws: 5000,
            grid_points: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let err = |key: &str, msg: String| Err(Error::config(format!("mc.{key}"), msg));
        if !(self.alpha > 0.0 && self.alpha < 0.5) {
            return err(
                "alpha",
                format!("{} is outside the well-posed range (0, 1/2)", self.alpha),
            );
        }
        if self.n_list.is_empty() || self.n_list.contains(&0) {
            return err("n_list", "needs one or more positive sample sizes".into());
        }
        if self.replications == 0 {
            return err("replications", "must be at least 1".into());
        }
        if self.probe_lambdas.is_empty() {
            return err("probe_lambdas", "needs at least one probe".into());
        }
        if let Some(p) = self
            .probe_lambdas
            .iter()
            .find(|&&p| !(p > 0.0 && p <= TWO_PI))
        {
            return err("probe_lambdas", format!("{p} is outside (0, 2π]"));
        }
        if self.probe_lambdas.windows(2).any(|w| w[1] <= w[0]) {
            return err("probe_lambdas", "must be strictly increasing".into());
        }
        if self.tail_u_grid.is_empty()
            || self
                .tail_u_grid
                .iter()
                .any(|&u| !(u > 0.0 && u.is_finite()))
        {
            return err("tail_u_grid", "needs positive finite thresholds".into());
        }
        if self.tail_u_grid.windows(2).any(|w| w[1] <= w[0]) {
            return err("tail_u_grid", "must be strictly increasing".into());
        }
        let bound = 0.5 - self.alpha;
        if !(self.holder_delta > 0.0 && self.holder_delta < bound) {
            return err(
                "holder_delta",
                format!(
                    "{} must lie in (0, 1/2 − alpha) = (0, {bound})",
                    self.holder_delta
                ),
            );
        }
        if let Some(d) = self.delta_confidence {
            if !(d > 0.0 && d < 1.0) {
                return err("delta_confidence", format!("{d} is outside (0, 1)"));
            }
            if self.calibration_draws < 1000 {
                return err("calibration_draws", "must be at least 1000".into());
            }
        }
        if let Some(g) = self.grid_points {
            let needed = 2f64.powi(*HOLDER_LEVELS.end() as i32) as usize + 1;
            if g < needed {
                return err("grid_points", format!("must be at least {needed}"));
            }
        }
        Ok(())
    }

    pub fn grid_points_for(&self, n: usize) -> usize {
        self.grid_points.unwrap_or_else(|| default_grid_points(n))
    }
}

pub fn default_probes() -> Vec<f64> {
    use std::f64::consts::PI;
    vec![0.5 * PI, PI, 1.5 * PI]
}

/// `u = 0.5, 1.0, …, 4.0`.
pub fn default_tail_grid() -> Vec<f64> {
    (1..=8).map(|k| 0.5 * k as f64).collect()
}

pub fn default_holder_delta(alpha: f64) -> f64 {
    0.5 - alpha - 0.05
}

#[derive(Debug, Clone, Serialize)]
pub struct ProbeBias {
    pub lambda: f64,
    pub bias: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CovEntry {
    pub lambda: f64,
    pub mu: f64,
    pub emp: f64,
    pub theory: f64,
    pub rel_err: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Normality {
    pub lambda: f64,
    /// KS of `ζ_n(λ)/√Θ_α(λ, λ)` against the standard normal.
    pub ks: f64,
    pub p: f64,
    /// The same with `ζ_n(λ)` scaled by its sample standard deviation
    /// (shape only; the p-value is conservative).
    pub ks_studentized: f64,
    pub p_studentized: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct TailRow {
    pub u: f64,
    /// Replications with `sup|ζ_n| > u`.
    pub exceed_centered: usize,
    /// Replications with `sup|θ_n| > u`.
    pub exceed_deviation: usize,
    pub w0: f64,
    pub w: f64,
    /// Fewer than two exceedances: the probability is below `2/R` and not resolved.
    pub w0_censored: bool,
    pub w_censored: bool,
}

/// Fits of `log W°(u)` over the rows with `W° ∈ [0.01, 0.5]`.
#[derive(Debug, Clone, Serialize)]
pub struct TailFit {
    pub fit_points: usize,
    /// `(a, b)` of `a + b·u`.
    pub linear: Option<(f64, f64)>,
    /// `(a, b, c)` of `a + b·u + c·u²`.
    pub quadratic: Option<(f64, f64, f64)>,
    pub slope_negative: bool,
    /// `W°(u) ≤ 2·exp(a + b·u)` at every uncensored `u` from the start of the fit range on.
    pub envelope_holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct HolderRow {
    pub h: f64,
    pub q95_ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FejerRow {
    pub n: usize,
    /// `sup |Φ_n * f − f|` over the evaluation grid.
    pub sup_error: f64,
    /// `ω(f, 1/n)`.
    pub modulus: f64,
    /// `ω(f, 1/n)·|ln ω(f, 1/n)|` (0 when the modulus vanishes).
    pub bound: f64,
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct MomentRow {
    pub p: u32,
    pub norm: f64,
    pub norm_over_p: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConfidenceResult {
    pub n: usize,
    pub delta: f64,
    pub u0: f64,
    pub coverage: f64,
    pub half_width: f64,
    pub covered: usize,
    pub replications: usize,
    pub calibration_draws: usize,
    /// Whether clipping was needed to make the band covariance PSD.
    pub clip_applied: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SizeReport {
    pub n: usize,
    pub grid_points: usize,
    pub sup_bias: f64,
    pub bias: Vec<ProbeBias>,
    pub cov: Vec<CovEntry>,
    /// `n·Var` of `τ_n = √n(F_n − E F_n)` against `β²(λ)`.
    pub tau_variance: Vec<CovEntry>,
    pub normality: Vec<Normality>,
    pub tails: Vec<TailRow>,
    pub tail_fit: TailFit,
    pub holder: Vec<HolderRow>,
    /// `max/min` of the Hölder quantiles over the lag grid.
    pub holder_spread: f64,
    pub fejer: FejerRow,
    pub moments: Vec<MomentRow>,
    /// Every consecutive `(‖ζ‖_{p'}/p') / (‖ζ‖_p/p)` is at most 1.2.
    pub moment_growth_ok: bool,
    pub confidence: Option<ConfidenceResult>,
}

#[derive(Debug, Clone, Serialize)]
pub struct McReport {
    pub model_id: String,
    pub alpha: f64,
    pub seed: u64,
    pub replications: usize,
    pub holder_delta: f64,
    pub probe_lambdas: Vec<f64>,
    pub sizes: Vec<SizeReport>,
    #[serde(skip)]
    pub runtime_secs: f64,
}

/// `ζ_n = √n (F_{α,n} − I^{1−α}[Φ_n * f])`.
pub fn centered_process(estimate: &FracEstimate, model: &SpectralModel) -> Result<GridFunction> {
    let points = estimate.grid.num_points();
    let ej = expected_periodogram(model, estimate.n, points)?;
    let ef = FracIntegrator::new(1.0 - estimate.alpha, points)?.apply(ej.values());
    scaled_difference(estimate, &ef)
}

/// `θ_n = √n (F_{α,n} − F^{(α)})`.
pub fn deviation_process(estimate: &FracEstimate, model: &SpectralModel) -> Result<GridFunction> {
    let truth = frac_spectral_derivative_grid(model, estimate.alpha, estimate.grid.num_points())?;
    scaled_difference(estimate, truth.values())
}

fn scaled_difference(estimate: &FracEstimate, reference: &[f64]) -> Result<GridFunction> {
    if reference.len() != estimate.grid.num_points() {
        return Err(Error::domain(
            "grid mismatch between estimate and reference",
        ));
    }
    let s = (estimate.n as f64).sqrt();
    let values = estimate
        .grid
        .values()
        .iter()
        .zip(reference)
        .map(|(f, r)| s * (f - r))
        .collect();
    GridFunction::new(values, false)
}

/// Fejér approximation error against `ω(f, 1/n)|ln ω(f, 1/n)|`, with the
/// modulus measured on a grid of spacing at most `1/n`.
pub fn fejer_bias(model: &SpectralModel, n: usize, num_points: usize) -> Result<FejerRow> {
    let ej = expected_periodogram(model, n, num_points)?;
    let f = model.density_grid(num_points)?;
    let sup_error = ej.sub(&f)?.sup_norm();
    let fine_points = ((TWO_PI * n as f64).ceil() as usize + 1).max(num_points);
    let h = 1.0 / n as f64;
    let fine = model.density_grid(fine_points)?;
    let modulus = modulus_of_continuity(&fine, h.max(fine.spacing()))?;
    let bound = if modulus > 0.0 {
        modulus * modulus.ln().abs()
    } else {
        0.0
    };
    Ok(FejerRow {
        n,
        sup_error,
        modulus,
        bound,
        ratio: (bound > 0.0).then(|| sup_error / bound),
    })
}

/// `u_0` as the `(1 − δ)` quantile of `max_k |ζ_∞(2πk/64)|` over
/// `draws` limit-process samples.
fn calibrate_band(cov: &LimitCovariance, delta: f64, draws: usize, seed: u64) -> f64 {
    let sups: Vec<f64> = (0..draws as u64)
        .into_par_iter()
        .map(|d| {
            sample_limit_process(cov, seed, STREAM_BAND_DRAWS | d)
                .iter()
                .fold(0.0, |m: f64, v| m.max(v.abs()))
        })
        .collect();
    stats::quantile(&sups, 1.0 - delta)
}

pub fn band_probes() -> Vec<f64> {
    (1..=BAND_PROBES)
        .map(|k| TWO_PI * k as f64 / BAND_PROBES as f64)
        .collect()
}

/// Calibrates `u_0(δ)` from `calibration_draws` limit-process draws, then
/// counts how many of `replications` fresh paths of length `n` satisfy
/// `max_k |F_{α,n}(λ_k) − F^{(α)}(λ_k)| ≤ u_0/√n` on the 64-probe grid.
pub fn confidence_band(
    model: &SpectralModel,
    alpha: f64,
    n: usize,
    delta: f64,
    calibration_draws: usize,
    seed: u64,
    replications: usize,
) -> Result<ConfidenceResult> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::domain(format!("δ = {delta} outside (0, 1)")));
    }
    if calibration_draws < 1000 {
        return Err(Error::domain("calibration needs at least 1000 draws"));
    }
    if n == 0 || replications == 0 {
        return Err(Error::domain("n and replications must be positive"));
    }
    let probes = band_probes();
    let cov = limit_covariance(model, alpha, &probes)?;
    let u0 = calibrate_band(&cov, delta, calibration_draws, seed);
    let ctx = SizeContext::new(model, alpha, n, default_grid_points(n))?;
    let chunks: Vec<usize> = (0..replications.div_ceil(CHUNK)).collect();
    let flags = chunks
        .par_iter()
        .map(|&c| {
            let mut out = Vec::new();
            for r in c * CHUNK..((c + 1) * CHUNK).min(replications) {
                let stream = STREAM_BAND_PATHS | r as u64;
                let rep = ctx.replicate(seed, stream)?;
                out.push(rep.band_sup(&probes) <= u0);
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;
    let covered = flags.iter().flatten().filter(|&&b| b).count();
    Ok(ConfidenceResult {
        n,
        delta,
        u0,
        coverage: covered as f64 / replications as f64,
        half_width: u0 / (n as f64).sqrt(),
        covered,
        replications,
        calibration_draws,
        clip_applied: cov.clip_applied(),
    })
}

/// Everything deterministic that a replication at one sample size needs.
struct SizeContext {
    n: usize,
    sqrt_n: f64,
    sampler: CirculantSampler,
    engine: PeriodogramEngine,
    integrator: FracIntegrator,
    spacing: f64,
    expected: Vec<f64>,
    expected_cumulative: Vec<f64>,
    truth: Vec<f64>,
}

impl SizeContext {
    fn new(model: &SpectralModel, alpha: f64, n: usize, points: usize) -> Result<Self> {
        let integrator = FracIntegrator::new(1.0 - alpha, points)?;
        let ej = expected_periodogram(model, n, points)?;
        let spacing = ej.spacing();
        Ok(Self {
            n,
            sqrt_n: (n as f64).sqrt(),
            sampler: CirculantSampler::new(model, n)?,
            engine: PeriodogramEngine::new(points)?,
            expected: integrator.apply(ej.values()),
            expected_cumulative: cumulative_trapezoid(ej.values(), spacing),
            integrator,
            spacing,
            truth: frac_spectral_derivative_grid(model, alpha, points)?.into_values(),
        })
    }

    fn replicate(&self, seed: u64, stream: u64) -> Result<Replication> {
        let eta = self.sampler.sample_values(seed, stream, 0.0);
        let j = self.engine.values(&eta);
        let f = self.integrator.apply(&j);
        let tau_raw = cumulative_trapezoid(&j, self.spacing);
        let zeta: Vec<f64> = f
            .iter()
            .zip(&self.expected)
            .map(|(a, b)| self.sqrt_n * (a - b))
            .collect();
        let theta: Vec<f64> = f
            .iter()
            .zip(&self.truth)
            .map(|(a, b)| self.sqrt_n * (a - b))
            .collect();
        let tau: Vec<f64> = tau_raw
            .iter()
            .zip(&self.expected_cumulative)
            .map(|(a, b)| self.sqrt_n * (a - b))
            .collect();
        let wrap = |e: Error| {
            Error::numerical(format!(
                "replication seed {seed} stream {stream:#x} (n = {}): {e}",
                self.n
            ))
        };
        Ok(Replication {
            f,
            zeta: GridFunction::new(zeta, false).map_err(wrap)?,
            theta: GridFunction::new(theta, false).map_err(wrap)?,
            tau: GridFunction::new(tau, false).map_err(wrap)?,
        })
    }
}

struct Replication {
    f: Vec<f64>,
    zeta: GridFunction,
    theta: GridFunction,
    tau: GridFunction,
}

impl Replication {
    fn band_sup(&self, probes: &[f64]) -> f64 {
        probes
            .iter()
            .map(|&p| self.theta.interpolate(p).abs())
            .fold(0.0, f64::max)
    }
}

/// Per-replication summaries kept for aggregation.
struct RepSummary {
    zeta_probes: Vec<f64>,
    tau_probes: Vec<f64>,
    zeta_pi: f64,
    sup_zeta: f64,
    sup_theta: f64,
    holder: Vec<f64>,
    band_sup: Option<f64>,
}

struct ChunkOut {
    f_sum: Vec<f64>,
    reps: Vec<RepSummary>,
}

pub fn run_monte_carlo(config: &McConfig) -> Result<McReport> {
    config.validate()?;
    let start = std::time::Instant::now();
    let model = &config.model;
    let alpha = config.alpha;
    let probes = &config.probe_lambdas;
    let r = config.replications;

    let theta = limit_covariance(model, alpha, probes)?;
    let band = match config.delta_confidence {
        Some(delta) => {
            let cov = limit_covariance(model, alpha, &band_probes())?;
            let u0 = calibrate_band(&cov, delta, config.calibration_draws, config.seed);
            Some((delta, u0, cov.clip_applied()))
        }
        None => None,
    };
    let band_grid = band_probes();
    let lags: Vec<f64> = HOLDER_LEVELS
        .map(|k| TWO_PI / 2f64.powi(k as i32))
        .collect();

    let mut sizes = Vec::with_capacity(config.n_list.len());
    for (n_idx, &n) in config.n_list.iter().enumerate() {
        let points = config.grid_points_for(n);
        let ctx = SizeContext::new(model, alpha, n, points)?;
        let chunks: Vec<usize> = (0..r.div_ceil(CHUNK)).collect();
        let outs = chunks
            .par_iter()
            .map(|&c| -> Result<ChunkOut> {
                let mut f_sum = vec![0.0; points];
                let mut reps = Vec::new();
                for rep in c * CHUNK..((c + 1) * CHUNK).min(r) {
                    let stream = ((n_idx as u64) << 32) | rep as u64;
                    let x = ctx.replicate(config.seed, stream)?;
                    for (s, v) in f_sum.iter_mut().zip(&x.f) {
                        *s += v;
                    }
                    let holder = lags
                        .iter()
                        .map(|&h| {
                            Ok(modulus_of_continuity(&x.zeta, h)? / h.powf(config.holder_delta))
                        })
                        .collect::<Result<Vec<_>>>()?;
                    reps.push(RepSummary {
                        zeta_probes: probes.iter().map(|&p| x.zeta.interpolate(p)).collect(),
                        tau_probes: probes.iter().map(|&p| x.tau.interpolate(p)).collect(),
                        zeta_pi: x.zeta.interpolate(std::f64::consts::PI),
                        sup_zeta: x.zeta.sup_norm(),
                        sup_theta: x.theta.sup_norm(),
                        holder,
                        band_sup: band.map(|_| x.band_sup(&band_grid)),
                    });
                }
                Ok(ChunkOut { f_sum, reps })
            })
            .collect::<Result<Vec<_>>>()?;

        let mut f_sum = vec![0.0; points];
        let mut reps = Vec::with_capacity(r);
        for out in outs {
            for (s, v) in f_sum.iter_mut().zip(&out.f_sum) {
                *s += v;
            }
            reps.extend(out.reps);
        }
        sizes.push(summarize(config, &ctx, &theta, band, &lags, f_sum, &reps)?);
    }

    Ok(McReport {
        model_id: model.id(),
        alpha,
        seed: config.seed,
        replications: r,
        holder_delta: config.holder_delta,
        probe_lambdas: probes.clone(),
        sizes,
        runtime_secs: start.elapsed().as_secs_f64(),
    })
}

fn rel_err(emp: f64, theory: f64) -> f64 {
    if theory != 0.0 {
        (emp - theory).abs() / theory.abs()
    } else {
        f64::INFINITY
    }
}

fn summarize(
    config: &McConfig,
    ctx: &SizeContext,
    theta: &LimitCovariance,
    band: Option<(f64, f64, bool)>,
    lags: &[f64],
    f_sum: Vec<f64>,
    reps: &[RepSummary],
) -> Result<SizeReport> {
    let r = reps.len();
    let rf = r as f64;
    let probes = &config.probe_lambdas;
    let points = f_sum.len();

    let bias_grid: Vec<f64> = f_sum
        .iter()
        .zip(&ctx.truth)
        .map(|(s, t)| s / rf - t)
        .collect();
    let sup_bias = bias_grid.iter().fold(0.0, |m: f64, v| m.max(v.abs()));
    let bias_fn = GridFunction::new(bias_grid, false)?;
    let bias = probes
        .iter()
        .map(|&p| ProbeBias {
            lambda: p,
            bias: bias_fn.interpolate(p),
        })
        .collect();

    let column = |i: usize| -> Vec<f64> { reps.iter().map(|x| x.zeta_probes[i]).collect() };
    let columns: Vec<Vec<f64>> = (0..probes.len()).map(column).collect();
    let mut cov = Vec::new();
    for i in 0..probes.len() {
        for j in i..probes.len() {
            let emp = stats::covariance(&columns[i], &columns[j]);
            let theory = theta.get(i, j);
            cov.push(CovEntry {
                lambda: probes[i],
                mu: probes[j],
                emp,
                theory,
                rel_err: rel_err(emp, theory),
            });
        }
    }

    let tau_variance = probes
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            let col: Vec<f64> = reps.iter().map(|x| x.tau_probes[i]).collect();
            let emp = stats::variance(&col);
            let theory = beta_squared(&config.model, p)?;
            Ok(CovEntry {
                lambda: p,
                mu: p,
                emp,
                theory,
                rel_err: rel_err(emp, theory),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let normality = probes
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            let sd = theta.get(i, i).sqrt();
            let z: Vec<f64> = columns[i].iter().map(|v| v / sd).collect();
            let ks = stats::ks_statistic_normal(&z);
            let sd_emp = stats::variance(&columns[i]).sqrt();
            let zs: Vec<f64> = columns[i].iter().map(|v| v / sd_emp).collect();
            let ks_studentized = stats::ks_statistic_normal(&zs);
            Normality {
                lambda: p,
                ks,
                p: stats::ks_pvalue(ks, r),
                ks_studentized,
                p_studentized: stats::ks_pvalue(ks_studentized, r),
            }
        })
        .collect();

    let tails: Vec<TailRow> = config
        .tail_u_grid
        .iter()
        .map(|&u| {
            let exceed_centered = reps.iter().filter(|x| x.sup_zeta > u).count();
            let exceed_deviation = reps.iter().filter(|x| x.sup_theta > u).count();
            TailRow {
                u,
                exceed_centered,
                exceed_deviation,
                w0: exceed_centered as f64 / rf,
                w: exceed_deviation as f64 / rf,
                w0_censored: exceed_centered < 2,
                w_censored: exceed_deviation < 2,
            }
        })
        .collect();
    let tail_fit = fit_tails(&tails);

    let holder: Vec<HolderRow> = lags
        .iter()
        .enumerate()
        .map(|(k, &h)| {
            let ratios: Vec<f64> = reps.iter().map(|x| x.holder[k]).collect();
            HolderRow {
                h,
                q95_ratio: stats::quantile(&ratios, 0.95),
            }
        })
        .collect();
    let qmax = holder
        .iter()
        .map(|h| h.q95_ratio)
        .fold(f64::NEG_INFINITY, f64::max);
    let qmin = holder
        .iter()
        .map(|h| h.q95_ratio)
        .fold(f64::INFINITY, f64::min);

    let zeta_pi: Vec<f64> = reps.iter().map(|x| x.zeta_pi).collect();
    let moments: Vec<MomentRow> = MOMENT_ORDERS
        .iter()
        .map(|&p| {
            let norm = stats::lp_norm(&zeta_pi, p as f64);
            MomentRow {
                p,
                norm,
                norm_over_p: norm / p as f64,
            }
        })
        .collect();
    let moment_growth_ok = moments
        .windows(2)
        .all(|w| w[1].norm_over_p <= 1.2 * w[0].norm_over_p);

    let confidence = band.map(|(delta, u0, clip_applied)| {
        let covered = reps
            .iter()
            .filter(|x| x.band_sup.is_some_and(|s| s <= u0))
            .count();
        ConfidenceResult {
            n: ctx.n,
            delta,
            u0,
            coverage: covered as f64 / rf,
            half_width: u0 / ctx.sqrt_n,
            covered,
            replications: r,
            calibration_draws: config.calibration_draws,
            clip_applied,
        }
    });

    Ok(SizeReport {
        n: ctx.n,
        grid_points: points,
        sup_bias,
        bias,
        cov,
        tau_variance,
        normality,
        tails,
        tail_fit,
        holder,
        holder_spread: qmax / qmin,
        fejer: fejer_bias(&config.model, ctx.n, points)?,
        moments,
        moment_growth_ok,
        confidence,
    })
}

/// Linear and quadratic least-squares fits of `log W°(u)`.
pub fn fit_tails(rows: &[TailRow]) -> TailFit {
    let (lo, hi) = TAIL_FIT_RANGE;
    let in_range: Vec<&TailRow> = rows
        .iter()
        .filter(|t| !t.w0_censored && t.w0 >= lo && t.w0 <= hi)
        .collect();
    let x: Vec<f64> = in_range.iter().map(|t| t.u).collect();
    let y: Vec<f64> = in_range.iter().map(|t| t.w0.ln()).collect();
    let linear = stats::polyfit(&x, &y, 1).map(|c| (c[0], c[1]));
    let quadratic = stats::polyfit(&x, &y, 2).map(|c| (c[0], c[1], c[2]));
    let slope_negative = linear.is_some_and(|(_, b)| b < 0.0);
    let envelope_holds = match (linear, x.first()) {
        (Some((a, b)), Some(&u_start)) => rows
            .iter()
            .filter(|t| t.u >= u_start && !t.w0_censored)
            .all(|t| t.w0 <= 2.0 * (a + b * t.u).exp()),
        _ => false,
    };
    TailFit {
        fit_points: x.len(),
        linear,
        quadratic,
        slope_negative,
        envelope_holds,
    }
}
