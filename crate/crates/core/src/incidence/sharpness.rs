use super::heavy::{annulus_profile, incidence_counts, AnnulusBucket};
use crate::error::{Error, Result};
use crate::fit::{loglog_fit, LinearFit};
use crate::grid::{Axis, GridSquare, Scale, Tube};
use crate::sets::{ad_regular_directions, cantor_set, Mode, TubeFamily};

fn bush_tubes(scale: Scale, slopes: &[i64], anchors: &[i64]) -> Result<Vec<Tube>> {
    let half = scale.n() / 2;
    let mut tubes = Vec::with_capacity(slopes.len() * anchors.len());
    for &x in anchors {
        for &l in slopes {
            // x = ((λ − n/2)/n)·y + x_p/n passes through the anchor square (x_p, 0)
            tubes.push(Tube::new(Axis::Y, l - half, x, scale)?);
        }
    }
    Ok(tubes)
}

/// Bushes through the anchors (x, 0), x in a (δ, 1−s) Cantor set, one tube
/// per direction of a regular s-dimensional slope set. Certified at (s, 1−s).
pub fn bush_construction(s: f64, m: u32) -> Result<(TubeFamily, Vec<GridSquare>)> {
    if !(s > 0.0 && s <= 1.0) {
        return Err(Error::ExponentOutOfRange(s));
    }
    let scale = Scale::new(m)?;
    let slopes = ad_regular_directions(m, s, 0)?;
    let anchors = cantor_set(m, 1.0 - s, 0, Mode::Deterministic)?;
    let tubes = bush_tubes(scale, slopes.values(), anchors.values())?;
    let family = TubeFamily::certify(scale, tubes, s, 1.0 - s)?;
    let squares = anchors
        .values()
        .iter()
        .map(|&x| GridSquare::new(x, 0, scale))
        .collect::<Result<Vec<_>>>()?;
    Ok((family, squares))
}

/// One bush, anchored at the middle of the bottom edge.
pub fn single_bush(s: f64, m: u32) -> Result<TubeFamily> {
    if !(s > 0.0 && s <= 1.0) {
        return Err(Error::ExponentOutOfRange(s));
    }
    let scale = Scale::new(m)?;
    let slopes = ad_regular_directions(m, s, 0)?;
    let tubes = bush_tubes(scale, slopes.values(), &[scale.n() / 2])?;
    TubeFamily::certify(scale, tubes, s, 1.0 - s)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BushProfileFit {
    pub buckets: Vec<AnnulusBucket>,
    /// Buckets entering the fit.
    pub used: Vec<u32>,
    pub fit: LinearFit,
}

/// r-exponent of #{squares met by ∼r tubes} for one bush. Buckets enter the
/// fit when 1 ≤ r ≤ δ^{-s} and their annulus sits inside the unit square
/// (median distance from the anchor at most 1/2).
pub fn bush_heavy_fit(s: f64, m: u32) -> Result<BushProfileFit> {
    let f = single_bush(s, m)?;
    let counts = incidence_counts(&f);
    let buckets = annulus_profile(&counts, (0.5, 0.0));
    let top = f.scale.n() as f64;
    let top = top.powf(s) * (1.0 + 1e-9);
    let chosen: Vec<&AnnulusBucket> = buckets
        .iter()
        .filter(|b| (b.r as f64) <= top && b.median_distance <= 0.5)
        .collect();
    let xs: Vec<f64> = chosen.iter().map(|b| b.r as f64).collect();
    let ys: Vec<f64> = chosen.iter().map(|b| b.count as f64).collect();
    let fit = loglog_fit(&xs, &ys)?;
    Ok(BushProfileFit {
        used: chosen.iter().map(|b| b.r).collect(),
        buckets,
        fit,
    })
}

/// Two-scale family: a bush family at scale ρ = δ·K₂^{1/s}, each coarse tube
/// packed with K₁K₂ evenly spaced sub-directions and every δ-offset inside it.
pub fn layered_sharpness_family(s: f64, k1: u32, k2: u32, m: u32) -> Result<TubeFamily> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::ExponentOutOfRange(s));
    }
    if !k1.is_power_of_two() || !k2.is_power_of_two() {
        return Err(Error::Precondition(format!("K₁ = {k1}, K₂ = {k2} must be powers of two")));
    }
    let jf = (k2 as f64).log2() / s;
    let j = jf.round() as u32;
    if (jf - j as f64).abs() > 1e-9 {
        return Err(Error::Precondition(format!("K₂^(1/s) = 2^{jf} is not a power of two")));
    }
    if j >= m {
        return Err(Error::Precondition(format!("ρ = 2^{} is not below 1", j as i64 - m as i64)));
    }
    let picks = k1 as u64 * k2 as u64;
    if picks > 1u64 << j {
        return Err(Error::Precondition(format!(
            "K₁ = {k1} exceeds K₂^((1−s)/s) = {}",
            (1u64 << j) / k2 as u64
        )));
    }
    let scale = Scale::new(m)?;
    let (coarse, _) = bush_construction(s, m - j)?;
    let fine = 1i64 << j;
    let subdirs: Vec<i64> = (0..picks).map(|i| (i as i64 * fine) / picks as i64).collect();
    let mut tubes = Vec::with_capacity(coarse.len() * picks as usize * fine as usize);
    for t in &coarse.tubes {
        for &u in &subdirs {
            for v in 0..fine {
                if let Ok(tt) = Tube::new(t.axis, t.slope * fine + u, t.intercept * fine + v, scale) {
                    tubes.push(tt);
                }
            }
        }
    }
    TubeFamily::certify(scale, tubes, s, 1.0 - s)
}
