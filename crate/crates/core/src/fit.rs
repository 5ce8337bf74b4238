//! Least-squares lines for exponent estimates.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    /// Coefficient of determination; 1 when all points are collinear.
    pub r2: f64,
    pub points: usize,
}

/// Ordinary least squares y ≈ slope·x + intercept.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<LinearFit> {
    if xs.len() != ys.len() {
        return Err(Error::Precondition(format!("{} x values for {} y values", xs.len(), ys.len())));
    }
    if xs.len() < 2 {
        return Err(Error::Degenerate("a line needs at least two points".into()));
    }
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::Degenerate("all x values coincide".into()));
    }
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Ok(LinearFit {
        slope,
        intercept: my - slope * mx,
        r2,
        points: xs.len(),
    })
}

/// Fit of log₂ y against log₂ x; every value must be positive.
pub fn loglog_fit(xs: &[f64], ys: &[f64]) -> Result<LinearFit> {
    if xs.iter().chain(ys).any(|v| !(*v > 0.0) || !v.is_finite()) {
        return Err(Error::Degenerate("log-log fit needs positive finite values".into()));
    }
    let lx: Vec<f64> = xs.iter().map(|v| v.log2()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.log2()).collect();
    linear_fit(&lx, &ly)
}

/// Straight-line fit of log₂ value against log₂ scale, kept with its data.
#[derive(Debug, Clone, PartialEq)]
pub struct ExponentFit {
    pub slope: f64,
    pub intercept: f64,
    /// Largest |observed − predicted| over the data, in log₂ units.
    pub max_residual: f64,
    /// (log₂ x, log₂ y).
    pub points: Vec<(f64, f64)>,
}

impl ExponentFit {
    /// Fit of points already in log₂ coordinates.
    pub fn from_logs(points: Vec<(f64, f64)>) -> Result<Self> {
        let (xs, ys): (Vec<f64>, Vec<f64>) = points.iter().copied().unzip();
        let f = linear_fit(&xs, &ys)?;
        let max_residual = points
            .iter()
            .map(|&(x, y)| (y - f.slope * x - f.intercept).abs())
            .fold(0.0, f64::max);
        Ok(ExponentFit {
            slope: f.slope,
            intercept: f.intercept,
            max_residual,
            points,
        })
    }

    /// Fit of log₂ y against log₂ x.
    pub fn from_values(xs: &[f64], ys: &[f64]) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::Precondition(format!("{} x values for {} y values", xs.len(), ys.len())));
        }
        if xs.iter().chain(ys).any(|v| !(*v > 0.0) || !v.is_finite()) {
            return Err(Error::Degenerate("log-log fit needs positive finite values".into()));
        }
        Self::from_logs(xs.iter().zip(ys).map(|(x, y)| (x.log2(), y.log2())).collect())
    }

    pub fn predict(&self, log_x: f64) -> f64 {
        self.slope * log_x + self.intercept
    }
}
