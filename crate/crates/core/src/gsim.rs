//! Exact sampling of stationary Gaussian sequences and of the limit process.
//!
//! Randomness comes from ChaCha8 keyed by `seed` (via `seed_from_u64`) with
//! the 64-bit stream id set to the replication index, so replication `k` of
//! an experiment is reproducible on its own regardless of thread scheduling.

use std::io::{BufRead, Write};
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::grid::fmt_f64;
use crate::specmodel::{autocovariances, LimitCovariance, SpectralModel};

/// The deterministic generator for `(seed, stream)`.
pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// One realization `η(1..n)` with its provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplePath {
    pub values: Vec<f64>,
    pub seed: u64,
    pub stream: u64,
    pub model_id: String,
    pub centered: bool,
    pub added_mean: f64,
}

impl SamplePath {
    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// One `eta` column after `#` provenance lines.
    pub fn write_csv<W: Write>(&self, mut w: W, extra_comments: &[String]) -> std::io::Result<()> {
        for c in extra_comments {
            writeln!(w, "# {c}")?;
        }
        writeln!(w, "# seed = {}", self.seed)?;
        writeln!(w, "# stream = {}", self.stream)?;
        writeln!(w, "# model_id = {}", self.model_id)?;
        writeln!(w, "# n = {}", self.n())?;
        writeln!(w, "# added_mean = {}", fmt_f64(self.added_mean))?;
        writeln!(w, "# centered = {}", self.centered)?;
        writeln!(w, "eta")?;
        for v in &self.values {
            writeln!(w, "{}", fmt_f64(*v))?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut path = SamplePath {
            values: Vec::new(),
            seed: 0,
            stream: 0,
            model_id: String::new(),
            centered: false,
            added_mean: 0.0,
        };
        let mut header_seen = false;
        let bad =
            |line: usize, msg: String| Error::domain(format!("sample path line {line}: {msg}"));
        for (idx, line) in r.lines().enumerate() {
            let line = line.map_err(|e| Error::io("<sample path>", e))?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(comment) = line.strip_prefix('#') {
                if let Some((k, v)) = comment.split_once('=') {
                    let (k, v) = (k.trim(), v.trim());
                    let parsed = match k {
                        "seed" => v.parse().map(|s| path.seed = s).is_ok(),
                        "stream" => v.parse().map(|s| path.stream = s).is_ok(),
                        "model_id" => {
                            path.model_id = v.to_string();
                            true
                        }
                        "added_mean" => v.parse().map(|s| path.added_mean = s).is_ok(),
                        "centered" => v.parse().map(|s| path.centered = s).is_ok(),
                        _ => true,
                    };
                    if !parsed {
                        return Err(bad(idx + 1, format!("cannot parse `{k}` value `{v}`")));
                    }
                }
                continue;
            }
            if !header_seen {
                if line != "eta" {
                    return Err(bad(idx + 1, format!("expected header `eta`, got `{line}`")));
                }
                header_seen = true;
                continue;
            }
            let v: f64 = line
                .parse()
                .map_err(|_| bad(idx + 1, format!("malformed value `{line}`")))?;
            if !v.is_finite() {
                return Err(bad(idx + 1, "non-finite value".into()));
            }
            path.values.push(v);
        }
        if path.values.is_empty() {
            return Err(Error::domain("sample path file has no values"));
        }
        Ok(path)
    }
}

const EMBED_NEG_TOL: f64 = -1e-8;
const EMBED_MAX_DOUBLINGS: usize = 6;

/// Circulant-embedding sampler for a fixed `(model, n)`.
///
/// The covariance `r(0..=m)` is embedded in a symmetric circulant of size
/// `2m` (`m ≥ n − 1`, a power of two). Its eigenvalues are the DFT of the
/// first row; if any falls below `−1e−8` the embedding is doubled, up to six
/// times, and remaining small negatives are clipped to zero.
pub struct CirculantSampler {
    n: usize,
    sqrt_eig: Vec<f64>,
    fft: Arc<dyn Fft<f64>>,
    model_id: String,
    clipped: bool,
}

impl CirculantSampler {
    pub fn new(model: &SpectralModel, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("sample size must be at least 1"));
        }
        let mut m = (n.max(2) - 1).next_power_of_two();
        let mut planner = FftPlanner::new();
        for _ in 0..=EMBED_MAX_DOUBLINGS {
            let size = 2 * m;
            let r = autocovariances(model, m + 1);
            let mut row: Vec<Complex<f64>> = (0..size)
                .map(|j| Complex::new(r[j.min(size - j)], 0.0))
                .collect();
            let fft = planner.plan_fft_forward(size);
            fft.process(&mut row);
            let min = row.iter().map(|c| c.re).fold(f64::INFINITY, f64::min);
            if min >= EMBED_NEG_TOL {
                let scale = 1.0 / size as f64;
                let sqrt_eig = row.iter().map(|c| (c.re.max(0.0) * scale).sqrt()).collect();
                return Ok(Self {
                    n,
                    sqrt_eig,
                    fft,
                    model_id: model.id(),
                    clipped: min < 0.0,
                });
            }
            m *= 2;
        }
        Err(Error::numerical(format!(
            "circulant embedding for {} with n = {n} has negative eigenvalues after \
             {EMBED_MAX_DOUBLINGS} doublings",
            model.id()
        )))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn embedding_size(&self) -> usize {
        self.sqrt_eig.len()
    }

    /// Whether tiny negative embedding eigenvalues were set to zero.
    pub fn clipped(&self) -> bool {
        self.clipped
    }

    /// Raw values (no provenance) for `(seed, stream)`, shifted by `mean`.
    pub fn sample_values(&self, seed: u64, stream: u64, mean: f64) -> Vec<f64> {
        let mut rng = rng_for(seed, stream);
        let mut buf: Vec<Complex<f64>> = self
            .sqrt_eig
            .iter()
            .map(|&s| {
                let a: f64 = StandardNormal.sample(&mut rng);
                let b: f64 = StandardNormal.sample(&mut rng);
                Complex::new(s * a, s * b)
            })
            .collect();
        self.fft.process(&mut buf);
        buf[..self.n].iter().map(|c| c.re + mean).collect()
    }

    pub fn sample(&self, seed: u64, stream: u64, mean: f64) -> SamplePath {
        SamplePath {
            values: self.sample_values(seed, stream, mean),
            seed,
            stream,
            model_id: self.model_id.clone(),
            centered: false,
            added_mean: mean,
        }
    }
}

/// A path of length `n` from `model` plus the constant `mean`, on stream 0.
pub fn sample_path(model: &SpectralModel, n: usize, seed: u64, mean: f64) -> Result<SamplePath> {
    sample_path_stream(model, n, seed, 0, mean)
}

pub fn sample_path_stream(
    model: &SpectralModel,
    n: usize,
    seed: u64,
    stream: u64,
    mean: f64,
) -> Result<SamplePath> {
    if !mean.is_finite() {
        return Err(Error::domain("added mean must be finite"));
    }
    Ok(CirculantSampler::new(model, n)?.sample(seed, stream, mean))
}

/// A draw of the limit process on the probe grid: `factor · z`, `z` standard
/// normal from `(seed, stream)`.
pub fn sample_limit_process(cov: &LimitCovariance, seed: u64, stream: u64) -> Vec<f64> {
    let mut rng = rng_for(seed, stream);
    let k = cov.len();
    let z: Vec<f64> = (0..k).map(|_| StandardNormal.sample(&mut rng)).collect();
    let factor = cov.factor();
    (0..k)
        .map(|i| (0..k).map(|j| factor[(i, j)] * z[j]).sum())
        .collect()
}

/// Subtracts the sample mean.
pub fn center_sample(path: &SamplePath) -> SamplePath {
    let mean = path.mean();
    SamplePath {
        values: path.values.iter().map(|v| v - mean).collect(),
        centered: true,
        ..path.clone()
    }
}
