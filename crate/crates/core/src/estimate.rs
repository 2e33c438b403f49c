//! Periodogram, empirical spectral function, the fractional estimator
//! `F_{α,n} = I^{1−α}[J_n]` and the plug-in estimate of the limit variance.

use crate::dft::GridDft;
use crate::error::{Error, Result};
use crate::fracops::{cumulative_trapezoid, FracIntegrator};
use crate::grid::GridFunction;
use crate::gsim::SamplePath;
use crate::special::gamma;
use crate::TWO_PI;

/// `J_n(λ) = (2πn)⁻¹ |Σ_{k=1}^n e^{ikλ} η(k)|²` on the grid of `[0, 2π]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Periodogram {
    pub n: usize,
    pub grid: GridFunction,
}

/// `F_{α,n}` on the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FracEstimate {
    pub alpha: f64,
    pub n: usize,
    pub grid: GridFunction,
}

/// Default evaluation grid for a sample of size `n`: `4·max(n, 1024)`
/// points, capped at 65536.
pub fn default_grid_points(n: usize) -> usize {
    (4 * n.max(1024)).min(65536)
}

/// Reusable periodogram evaluator for one grid size.
pub struct PeriodogramEngine {
    dft: GridDft,
    num_points: usize,
}

impl PeriodogramEngine {
    pub fn new(num_points: usize) -> Result<Self> {
        if num_points < 2 {
            return Err(Error::domain("periodogram grid needs at least 2 points"));
        }
        Ok(Self {
            dft: GridDft::new(num_points),
            num_points,
        })
    }

    pub fn num_points(&self) -> usize {
        self.num_points
    }

    /// Exact evaluation at every grid point; the values are mirrored so that
    /// `J(λ) = J(2π − λ)` holds bit-for-bit.
    pub fn values(&self, eta: &[f64]) -> Vec<f64> {
        let n = eta.len();
        let sums = self.dft.sums(eta, 1);
        let l = self.dft.len();
        let norm = 1.0 / (TWO_PI * n as f64);
        let mut out = vec![0.0; self.num_points];
        for j in 0..=l / 2 {
            let v = sums[j].norm_sqr() * norm;
            out[j] = v;
            out[l - j] = v;
        }
        out
    }

    pub fn periodogram(&self, path: &SamplePath) -> Result<Periodogram> {
        Ok(Periodogram {
            n: path.n(),
            grid: GridFunction::new(self.values(&path.values), true)?,
        })
    }
}

pub fn periodogram(path: &SamplePath, num_points: usize) -> Result<Periodogram> {
    if path.values.is_empty() {
        return Err(Error::domain("empty sample path"));
    }
    PeriodogramEngine::new(num_points)?.periodogram(path)
}

/// `F_n(λ) = ∫_0^λ J_n` by the cumulative trapezoid rule.
pub fn empirical_spectral_function(j: &Periodogram) -> Result<GridFunction> {
    GridFunction::new(
        cumulative_trapezoid(j.grid.values(), j.grid.spacing()),
        false,
    )
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(0.0..0.5).contains(&alpha) {
        return Err(Error::domain(format!(
            "derivative order must lie in [0, 1/2), got {alpha}"
        )));
    }
    Ok(())
}

/// `F_{α,n} = I^{1−α}[J_n]`.
pub fn frac_estimate(j: &Periodogram, alpha: f64) -> Result<FracEstimate> {
    check_alpha(alpha)?;
    let integrator = FracIntegrator::new(1.0 - alpha, j.grid.num_points())?;
    Ok(FracEstimate {
        alpha,
        n: j.n,
        grid: GridFunction::new(integrator.apply(j.grid.values()), false)?,
    })
}

/// Default factor applied by [`plugin_variance`]: for Gaussian data
/// `E J_n²(ν) → 2 f²(ν)` away from `ν ∈ {0, π, 2π}`.
pub const DEFAULT_BIAS_CORRECTION: f64 = 0.5;

/// Plug-in estimate of `σ²_α(λ) = Θ_α(λ, λ)`:
/// `bias_correction · 4πΓ(1−2α)/Γ²(1−α) · I^{1−2α}[J_n²](λ)`.
pub fn plugin_variance(
    j: &Periodogram,
    alpha: f64,
    lambda: f64,
    bias_correction: f64,
) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 0.5) {
        return Err(Error::domain(format!(
            "derivative order must lie in (0, 1/2), got {alpha}"
        )));
    }
    if !(lambda > 0.0 && lambda <= TWO_PI) {
        return Err(Error::domain(format!("λ = {lambda} outside (0, 2π]")));
    }
    if !(bias_correction > 0.0 && bias_correction.is_finite()) {
        return Err(Error::domain("bias correction must be positive"));
    }
    let squared: Vec<f64> = j.grid.values().iter().map(|v| v * v).collect();
    let integrated = FracIntegrator::new(1.0 - 2.0 * alpha, squared.len())?.apply(&squared);
    let at = GridFunction::new(integrated, false)?.interpolate(lambda);
    let factor = 4.0 * std::f64::consts::PI * gamma(1.0 - 2.0 * alpha) / gamma(1.0 - alpha).powi(2);
    Ok(bias_correction * factor * at)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn path(values: Vec<f64>) -> SamplePath {
        SamplePath {
            values,
            seed: 0,
            stream: 0,
            model_id: "test".into(),
            centered: false,
            added_mean: 0.0,
        }
    }

    #[test]
    fn single_observation() {
        let j = periodogram(&path(vec![3.0]), 17).unwrap();
        for v in j.grid.values() {
            assert_relative_eq!(*v, 9.0 / TWO_PI, epsilon = 1e-14);
        }
        let est = frac_estimate(&j, 0.3).unwrap();
        for (l, v) in est.grid.lambdas().zip(est.grid.values()) {
            let exact = 9.0 / TWO_PI * l.powf(0.7) / gamma(1.7);
            assert_relative_eq!(*v, exact, epsilon = 1e-12, max_relative = 1e-11);
        }
    }

    #[test]
    fn two_term_cancellation_at_pi() {
        // |e^{iπ} + e^{2iπ}|² = 0
        let j = periodogram(&path(vec![1.0, 1.0]), 5).unwrap();
        assert!(j.grid.values()[2].abs() < 1e-30);
        assert_relative_eq!(
            j.grid.values()[0],
            4.0 / (4.0 * std::f64::consts::PI),
            epsilon = 1e-14
        );
    }

    #[test]
    fn alpha_zero_reduces_to_empirical() {
        let eta: Vec<f64> = (0..64).map(|k| ((k * 7919) % 13) as f64 - 6.0).collect();
        let j = periodogram(&path(eta), 4097).unwrap();
        let f0 = frac_estimate(&j, 0.0).unwrap();
        let fe = empirical_spectral_function(&j).unwrap();
        assert_eq!(f0.grid.values(), fe.values());
    }

    #[test]
    fn plugin_variance_edges() {
        let zero = periodogram(&path(vec![0.0; 8]), 65).unwrap();
        assert_eq!(plugin_variance(&zero, 0.25, 1.0, 0.5).unwrap(), 0.0);
        let j = periodogram(&path(vec![1.0, -0.5, 2.0]), 65).unwrap();
        let half = plugin_variance(&j, 0.2, 3.0, 0.5).unwrap();
        let full = plugin_variance(&j, 0.2, 3.0, 1.0).unwrap();
        assert_eq!(full, 2.0 * half);
        assert!(plugin_variance(&j, 0.5, 3.0, 0.5).is_err());
        assert!(plugin_variance(&j, 0.2, 0.0, 0.5).is_err());
        assert!(frac_estimate(&j, 0.5).is_err());
    }

    #[test]
    fn default_grid_sizes() {
        assert_eq!(default_grid_points(64), 4096);
        assert_eq!(default_grid_points(2048), 8192);
        assert_eq!(default_grid_points(1 << 20), 65536);
    }
}
