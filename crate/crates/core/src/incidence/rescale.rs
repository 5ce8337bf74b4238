use crate::error::{Error, Result};
use crate::grid::{Axis, Scale, Tube};
use crate::sets::TubeFamily;
use std::collections::BTreeMap;

/// One group of rescaled segments sharing the dyadic value of N.
#[derive(Debug, Clone, PartialEq)]
pub struct RescaledGroup {
    /// Dyadic N: every segment direction collects between N and 2N − 1
    /// directions of the original family.
    pub n_dir: u64,
    pub family: TubeFamily,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RescaleOutcome {
    /// Side of Q is 2^{-k}.
    pub k: u32,
    pub cell: (i64, i64),
    pub multiplicity: u64,
    /// Segments found in the multiplicity bucket before grouping.
    pub segments: usize,
    pub groups: Vec<RescaledGroup>,
}

fn div_round(a: i128, b: i128) -> i128 {
    (2 * a + b).div_euclid(2 * b)
}

/// ×2^k rescaling of a tube restricted to the cell Q = [qa, qa+1)·2^{-k} ×
/// [qb, qb+1)·2^{-k}, snapped to a canonical tube at scale m − k. `None` if
/// the rescaled axis misses [0,1]².
pub fn rescale_tube(t: &Tube, k: u32, cell: (i64, i64)) -> Option<Tube> {
    let m = t.m;
    let scale = Scale::new(m - k).ok()?;
    // primary/dependent cell coordinates
    let (qp, qd) = match t.axis {
        Axis::X => cell,
        Axis::Y => (cell.1, cell.0),
    };
    let two_k = 1i128 << k;
    let slope = div_round(t.slope as i128, two_k);
    let num = t.slope as i128 * qp as i128 + (t.intercept as i128 - qd as i128 * (1i128 << (m - k))) * two_k;
    let intercept = div_round(num, two_k);
    Tube::new(t.axis, slope as i64, intercept as i64, scale).ok()
}

/// Segments of the family inside the 2^{-k}-cell `cell` that lie in between M
/// and 2M − 1 tubes, rescaled to [0,1]², grouped by the dyadic number N of
/// family directions collapsing onto each segment direction, each group
/// re-certified as a quasi-product family at scale m − k.
pub fn segment_rescale(family: &TubeFamily, k: u32, cell: (i64, i64), multiplicity: u64) -> Result<RescaleOutcome> {
    let m = family.scale.m();
    if k >= m {
        return Err(Error::Precondition(format!("cell depth {k} must be below m = {m}")));
    }
    let side = 1i64 << k;
    if !(0..side).contains(&cell.0) || !(0..side).contains(&cell.1) {
        return Err(Error::Precondition(format!("cell {cell:?} is not a dyadic cell of depth {k}")));
    }
    if multiplicity == 0 {
        return Err(Error::Precondition("multiplicity must be at least 1".into()));
    }
    // segment → number of tubes through it
    let mut seg: BTreeMap<Tube, u64> = BTreeMap::new();
    for t in &family.tubes {
        if let Some(r) = rescale_tube(t, k, cell) {
            *seg.entry(r).or_default() += 1;
        }
    }
    // coarse direction → number of family directions rounding onto it
    let mut dir_mass: BTreeMap<(Axis, i64), u64> = BTreeMap::new();
    for (axis, slopes) in family.directions() {
        for sl in slopes {
            let coarse = div_round(sl as i128, 1i128 << k) as i64;
            *dir_mass.entry((axis, coarse)).or_default() += 1;
        }
    }
    let kept: Vec<Tube> = seg
        .into_iter()
        .filter(|&(_, c)| c >= multiplicity && c < 2 * multiplicity)
        .map(|(t, _)| t)
        .collect();
    let mut by_n: BTreeMap<u64, Vec<Tube>> = BTreeMap::new();
    for t in &kept {
        let nd = dir_mass.get(&(t.axis, t.slope)).copied().unwrap_or(1);
        let bucket = 1u64 << (63 - nd.leading_zeros());
        by_n.entry(bucket).or_default().push(*t);
    }
    let scale = Scale::new(m - k)?;
    let mut groups = Vec::new();
    for (n_dir, tubes) in by_n {
        groups.push(RescaledGroup {
            n_dir,
            family: TubeFamily::certify(scale, tubes, family.s, family.d)?,
        });
    }
    Ok(RescaleOutcome {
        k,
        cell,
        multiplicity,
        segments: kept.len(),
        groups,
    })
}

/// Desk form of the heredity law: K₁K₂ of every rescaled group is at most
/// 64·(MΔ^s)^{-1}·(log₂ 1/δ)².
pub fn heredity_bound(family: &TubeFamily, k: u32, multiplicity: u64) -> f64 {
    let m = family.scale.m() as f64;
    let delta_s = (-(k as f64) * family.s).exp2();
    64.0 / (multiplicity as f64 * delta_s) * m * m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rescale_identity_at_depth_zero() {
        let sc = Scale::new(6).unwrap();
        let t = Tube::new(Axis::X, 5, 9, sc).unwrap();
        assert_eq!(rescale_tube(&t, 0, (0, 0)), Some(t));
    }

    #[test]
    fn rescale_tracks_the_line() {
        // y = x/4 + 1/8 seen from the cell [1/2,1)×[0,1/2)
        let sc = Scale::new(8).unwrap();
        let t = Tube::new(Axis::X, 64, 32, sc).unwrap();
        let r = rescale_tube(&t, 1, (1, 0)).unwrap();
        // at x = 3/4: y = 5/16; rescaled x' = 1/2, y' = 5/8
        let y = r.slope_f64() * 0.5 + r.intercept as f64 / 128.0;
        assert!((y - 0.625).abs() < 1e-9);
    }
}
