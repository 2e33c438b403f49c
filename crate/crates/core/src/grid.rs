//! Functions sampled on the uniform grid of `[0, 2π]`.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::TWO_PI;

const PERIODIC_TOL: f64 = 1e-12;

/// Values of a real function on the uniform grid `λ_i = i·2π/(N−1)`,
/// `i = 0..N`, endpoints included.
///
/// When `periodic` is set the two endpoints carry the same value and
/// distances are measured on the circle.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    values: Vec<f64>,
    periodic: bool,
}

impl GridFunction {
    pub fn new(values: Vec<f64>, periodic: bool) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::domain(format!(
                "a grid needs at least 2 points, got {}",
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::domain(format!(
                "grid value {i} is not finite ({})",
                values[i]
            )));
        }
        if periodic {
            let (first, last) = (values[0], values[values.len() - 1]);
            if (first - last).abs() > PERIODIC_TOL * first.abs().max(1.0) {
                return Err(Error::domain(format!(
                    "periodic grid endpoints differ: {first} vs {last}"
                )));
            }
        }
        Ok(Self { values, periodic })
    }

    /// Samples `f` at every grid point.
    pub fn from_fn(num_points: usize, periodic: bool, f: impl Fn(f64) -> f64) -> Result<Self> {
        if num_points < 2 {
            return Err(Error::domain(format!(
                "a grid needs at least 2 points, got {num_points}"
            )));
        }
        let h = spacing_for(num_points);
        let mut values: Vec<f64> = (0..num_points).map(|i| f(i as f64 * h)).collect();
        if periodic {
            values[num_points - 1] = values[0];
        }
        Self::new(values, periodic)
    }

    pub fn zeros(num_points: usize) -> Result<Self> {
        Self::new(vec![0.0; num_points], false)
    }

    pub fn num_points(&self) -> usize {
        self.values.len()
    }

    pub fn spacing(&self) -> f64 {
        spacing_for(self.values.len())
    }

    pub fn lambda(&self, i: usize) -> f64 {
        if i + 1 == self.values.len() {
            TWO_PI
        } else {
            i as f64 * self.spacing()
        }
    }

    pub fn lambdas(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.values.len()).map(|i| self.lambda(i))
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn is_periodic(&self) -> bool {
        self.periodic
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Piecewise-linear interpolation at `x ∈ [0, 2π]`.
    pub fn eval(&self, x: f64) -> Result<f64> {
        if !(0.0..=TWO_PI).contains(&x) {
            return Err(Error::domain(format!(
                "evaluation point {x} outside [0, 2π]"
            )));
        }
        Ok(self.interpolate(x))
    }

    pub(crate) fn interpolate(&self, x: f64) -> f64 {
        let last = self.values.len() - 1;
        let t = x / self.spacing();
        let i = (t.floor() as usize).min(last - 1);
        let w = (t - i as f64).clamp(0.0, 1.0);
        self.values[i] * (1.0 - w) + self.values[i + 1] * w
    }

    /// Pointwise map into a new (non-periodic unless `f` preserves it) grid function.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values: Vec<f64> = self.values.iter().map(|&v| f(v)).collect();
        let periodic = self.periodic && values[0] == values[values.len() - 1];
        Self::new(values, periodic)
    }

    /// `self − other` on a shared grid.
    pub fn sub(&self, other: &GridFunction) -> Result<Self> {
        self.check_same_grid(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a - b)
            .collect();
        Self::new(values, false)
    }

    pub(crate) fn check_same_grid(&self, other: &GridFunction) -> Result<()> {
        if self.values.len() != other.values.len() {
            return Err(Error::domain(format!(
                "grid mismatch: {} vs {} points",
                self.values.len(),
                other.values.len()
            )));
        }
        Ok(())
    }

    /// Writes `lambda,value` CSV, preceded by `# `-prefixed comment lines.
    pub fn write_csv<W: Write>(&self, mut w: W, comments: &[String]) -> std::io::Result<()> {
        for c in comments {
            writeln!(w, "# {c}")?;
        }
        writeln!(w, "lambda,value")?;
        for (i, v) in self.values.iter().enumerate() {
            writeln!(w, "{},{}", fmt_f64(self.lambda(i)), fmt_f64(*v))?;
        }
        Ok(())
    }

    /// Reads the format written by [`GridFunction::write_csv`]. The λ column
    /// must match the uniform grid.
    pub fn read_csv<R: BufRead>(r: R, periodic: bool) -> Result<Self> {
        let mut lambdas = Vec::new();
        let mut values = Vec::new();
        let mut header_seen = false;
        for (lineno, line) in r.lines().enumerate() {
            let line = line.map_err(|e| Error::io("<grid csv>", e))?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if !header_seen {
                if line != "lambda,value" {
                    return Err(Error::domain(format!(
                        "line {}: expected header `lambda,value`, got `{line}`",
                        lineno + 1
                    )));
                }
                header_seen = true;
                continue;
            }
            let mut fields = line.split(',');
            let parse = |s: Option<&str>| -> Result<f64> {
                s.and_then(|s| s.trim().parse::<f64>().ok()).ok_or_else(|| {
                    Error::domain(format!("line {}: malformed row `{line}`", lineno + 1))
                })
            };
            lambdas.push(parse(fields.next())?);
            values.push(parse(fields.next())?);
        }
        let g = Self::new(values, periodic)?;
        for (i, &l) in lambdas.iter().enumerate() {
            if (l - g.lambda(i)).abs() > 1e-9 {
                return Err(Error::domain(format!(
                    "row {i}: lambda {l} is not on the uniform grid (expected {})",
                    g.lambda(i)
                )));
            }
        }
        Ok(g)
    }
}

pub(crate) fn spacing_for(num_points: usize) -> f64 {
    TWO_PI / (num_points - 1) as f64
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn rejects_bad_grids() {
        assert!(GridFunction::new(vec![1.0], false).is_err());
        assert!(GridFunction::new(vec![1.0, f64::NAN], false).is_err());
        assert!(GridFunction::new(vec![1.0, 2.0], true).is_err());
        assert!(GridFunction::new(vec![1.0, 2.0, 1.0], true).is_ok());
    }

    #[test]
    fn lambdas_hit_both_endpoints() {
        let g = GridFunction::zeros(5).unwrap();
        let l: Vec<f64> = g.lambdas().collect();
        assert_eq!(l[0], 0.0);
        assert_eq!(l[4], TWO_PI);
        assert_relative_eq!(l[2], std::f64::consts::PI, epsilon = 1e-15);
    }

    #[test]
    fn interpolation_is_exact_for_linear() {
        let g = GridFunction::from_fn(33, false, |x| 3.0 * x - 1.0).unwrap();
        for &x in &[0.0, 0.123, 1.0, 3.3, TWO_PI] {
            assert_relative_eq!(g.eval(x).unwrap(), 3.0 * x - 1.0, epsilon = 1e-12);
        }
        assert!(g.eval(-0.1).is_err());
        assert!(g.eval(7.0).is_err());
    }

    #[test]
    fn csv_round_trip_is_lossless() {
        let g = GridFunction::from_fn(17, true, |x| x.sin() + 1.0 / 3.0).unwrap();
        let mut buf = Vec::new();
        g.write_csv(&mut buf, &["n = 4".into()]).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# n = 4\nlambda,value\n"));
        let back = GridFunction::read_csv(&buf[..], true).unwrap();
        assert_eq!(g, back);
    }
}
