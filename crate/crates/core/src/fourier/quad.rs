use super::{e, DiscreteMeasure};
use crate::error::{Error, Result};
use crate::fit::ExponentFit;
use crate::sets::DiscreteSet1D;
use num_complex::Complex64;
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::f64::consts::TAU;

/// Quadrature step used when none is given.
pub const DEFAULT_STEP: f64 = 0.25;

/// Cells per radius (or side) below which the step is refined.
const MIN_CELLS: f64 = 16.0;

/// Residual of the step-doubling check above which a value is flagged.
const RESOLUTION_TOLERANCE: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Region {
    /// The disk of radius R about the origin.
    Disk(f64),
    /// The square [0, side]².
    Square(f64),
}

impl Region {
    fn extent(self) -> f64 {
        match self {
            Region::Disk(r) => r,
            Region::Square(side) => side,
        }
    }
}

/// Compensated sum; the order of the input fixes the result.
fn neumaier(values: impl IntoIterator<Item = f64>) -> f64 {
    let (mut sum, mut c) = (0.0f64, 0.0f64);
    for x in values {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            c += (sum - t) + x;
        } else {
            c += (x - t) + sum;
        }
        sum = t;
    }
    sum + c
}

/// Midpoint rule for ∫ Π_i |μ̂_i|^{2k_i} over the region.
///
/// The step is lowered to extent/16 when the region is small, and for the
/// square it is adjusted to tile the side exactly. Rows are evaluated in
/// parallel and summed in row order, so the value does not depend on the
/// worker count. Every evaluated |μ̂| is checked against ‖μ‖.
pub fn quadrature(factors: &[(&DiscreteMeasure, u32)], region: Region, h: f64) -> Result<f64> {
    let extent = region.extent();
    if !(extent > 0.0) || !extent.is_finite() {
        return Err(Error::Precondition(format!("region extent {extent} must be positive")));
    }
    if !(h > 0.0) {
        return Err(Error::Precondition(format!("step {h} must be positive")));
    }
    let h = h.min(extent / MIN_CELLS);
    let (start, count, h) = match region {
        Region::Disk(r) => (-r, (2.0 * r / h).ceil() as usize, h),
        Region::Square(side) => {
            let k = (side / h).ceil();
            (0.0, k as usize, side / k)
        }
    };
    let coords: Vec<f64> = (0..count).map(|i| start + (i as f64 + 0.5) * h).collect();
    // e(ξ x₁) for every atom and column
    let tables: Vec<Vec<Complex64>> = factors
        .iter()
        .map(|(mu, _)| {
            mu.atoms
                .iter()
                .flat_map(|&(xi, _)| coords.iter().map(move |&x| e(xi * x)))
                .collect()
        })
        .collect();

    let rows: Vec<f64> = coords
        .par_iter()
        .map(|&y| {
            let (lo, hi) = match region {
                Region::Disk(r) => {
                    if y.abs() > r {
                        return Ok(0.0);
                    }
                    let half = (r * r - y * y).sqrt();
                    (
                        coords.partition_point(|&x| x < -half),
                        coords.partition_point(|&x| x <= half),
                    )
                }
                Region::Square(_) => (0, count),
            };
            if lo >= hi {
                return Ok(0.0);
            }
            let mut integrand = vec![1.0f64; hi - lo];
            let mut acc = vec![Complex64::new(0.0, 0.0); hi - lo];
            for ((mu, k), table) in factors.iter().zip(&tables) {
                acc.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
                for (a, &(xi, w)) in mu.atoms.iter().enumerate() {
                    let b = e(xi * xi * y) * w;
                    let row = &table[a * count + lo..a * count + hi];
                    for (v, t) in acc.iter_mut().zip(row) {
                        *v += b * t;
                    }
                }
                let cap = mu.total * (1.0 + 1e-9) + 1e-300;
                for (f, v) in integrand.iter_mut().zip(&acc) {
                    let q = v.norm_sqr();
                    if q.sqrt() > cap {
                        return Err(Error::Degenerate(format!("|μ̂| = {} exceeds ‖μ‖ = {}", q.sqrt(), mu.total)));
                    }
                    *f *= q.powi(*k as i32);
                }
            }
            Ok(neumaier(integrand))
        })
        .collect::<Result<_>>()?;
    Ok(neumaier(rows) * h * h)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct L6Report {
    pub r: f64,
    /// Step actually used.
    pub h: f64,
    pub value: f64,
    /// value / (R^{2−5s/2}‖μ‖), or the trilinear analogue.
    pub normalized: f64,
    /// |value(h) − value(2h)| / value(h).
    pub residual: f64,
    /// Residual at most 5%.
    pub resolved: bool,
}

fn checked_step(r: f64, h: f64) -> Result<f64> {
    if !(h > 0.0 && h <= DEFAULT_STEP) {
        return Err(Error::Precondition(format!("step {h} must lie in (0, 1/4]")));
    }
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::Precondition(format!("radius {r} must be positive")));
    }
    Ok(h.min(r / MIN_CELLS))
}

fn report(factors: &[(&DiscreteMeasure, u32)], r: f64, h: f64, scale: f64) -> Result<L6Report> {
    let h = checked_step(r, h)?;
    let value = quadrature(factors, Region::Disk(r), h)?;
    let coarse = quadrature(factors, Region::Disk(r), 2.0 * h)?;
    let residual = if value > 0.0 { (value - coarse).abs() / value } else { 0.0 };
    Ok(L6Report {
        r,
        h,
        value,
        normalized: value / scale,
        residual,
        resolved: residual <= RESOLUTION_TOLERANCE,
    })
}

/// ∫_{B_R} |μ̂|⁶ with its step-doubling residual.
pub fn l6_integral(measure: &DiscreteMeasure, r: f64, h: f64) -> Result<L6Report> {
    let scale = r.powf(2.0 - 2.5 * measure.s) * measure.total;
    report(&[(measure, 3)], r, h, scale)
}

/// ∫_{B_R} |μ̂₁|²|μ̂₂|²|μ̂₃|², normalized by R^{2−5s/2}(‖μ₁‖‖μ₂‖‖μ₃‖)^{5/6}
/// with s taken from μ₁.
pub fn trilinear_l6(mu: [&DiscreteMeasure; 3], r: f64, h: f64) -> Result<L6Report> {
    let masses: f64 = mu.iter().map(|m| m.total).product();
    let scale = r.powf(2.0 - 2.5 * mu[0].s) * masses.powf(5.0 / 6.0);
    report(&[(mu[0], 1), (mu[1], 1), (mu[2], 1)], r, h, scale)
}

/// ∫_{[0,side]²} |μ̂|⁶.
pub fn l6_box(measure: &DiscreteMeasure, side: f64, h: f64) -> Result<f64> {
    quadrature(&[(measure, 3)], Region::Square(side), h)
}

/// Exact value of ∫_{[0,1/δ]²} |μ̂|⁶ for the measure with mass δ^s on every
/// lifted point of A: integrating e(x·(σ − σ′)) over the square leaves
/// δ^{-2}·δ^{6s}·Σ sinc(2π(b − b′)δ) over pairs of triples with equal first
/// sums a = a′, where (a, b) are triple sums in units of (δ, δ²).
pub fn box_energy_closed_form(a: &DiscreteSet1D, s: f64) -> Result<f64> {
    if a.is_empty() {
        return Err(Error::EmptySet);
    }
    let n = a.scale.n();
    let v = a.values();
    let mut by_first: BTreeMap<i64, BTreeMap<i64, u64>> = BTreeMap::new();
    for &x in v {
        for &y in v {
            for &z in v {
                *by_first.entry(x + y + z).or_default().entry(x * x + y * y + z * z).or_default() += 1;
            }
        }
    }
    let sinc = |t: f64| if t == 0.0 { 1.0 } else { (TAU * t).sin() / (TAU * t) };
    let total = neumaier(by_first.values().flat_map(|bs| {
        bs.iter()
            .flat_map(move |(&b, &w)| bs.iter().map(move |(&b2, &w2)| (w * w2) as f64 * sinc((b - b2) as f64 / n as f64)))
    }));
    let nf = n as f64;
    Ok(nf * nf * nf.powf(-6.0 * s) * total)
}

/// Normalized values along a ladder of radii and the slope of log₂ value
/// against log₂ R.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayLadder {
    pub reports: Vec<L6Report>,
    pub fit: ExponentFit,
    /// 2 − 5s/2.
    pub predicted: f64,
}

impl DecayLadder {
    pub const CSV_HEADER: &'static str = "R,h,value,normalized,slope_so_far";

    /// One row per radius; the slope column is the fit through the rows so
    /// far and is empty on the first row.
    pub fn csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for (i, r) in self.reports.iter().enumerate() {
            let slope = if i == 0 {
                String::new()
            } else {
                ExponentFit::from_logs(self.fit.points[..=i].to_vec())
                    .map(|f| f.slope.to_string())
                    .unwrap_or_default()
            };
            out.push_str(&format!("{},{},{},{},{}\n", r.r, r.h, r.value, r.normalized, slope));
        }
        out
    }
}

pub fn decay_exponent_fit(measure: &DiscreteMeasure, radii: &[f64], h: f64) -> Result<DecayLadder> {
    if radii.len() < 4 {
        return Err(Error::Precondition(format!("{} radii given, the fit needs 4", radii.len())));
    }
    if radii.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Precondition("radii must increase".into()));
    }
    let reports = radii
        .iter()
        .map(|&r| l6_integral(measure, r, h))
        .collect::<Result<Vec<_>>>()?;
    let fit = ExponentFit::from_values(radii, &reports.iter().map(|r| r.value).collect::<Vec<_>>())?;
    Ok(DecayLadder {
        reports,
        fit,
        predicted: 2.0 - 2.5 * measure.s,
    })
}
