use super::DiscreteSet1D;
use crate::error::{Error, Result};

/// Branching structure of a uniform set along a ladder of dyadic depths.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchingProfile {
    /// Nominal block size log(1/δ)/(#blocks), in bits.
    pub block: f64,
    /// Depths 0 = L₀ < L₁ < … < L_q = m; level j has cells of side 2^{-L_j}.
    pub levels: Vec<u32>,
    /// counts[j] = children per occupied cell going from L_j to L_{j+1}.
    pub counts: Vec<u64>,
}

impl BranchingProfile {
    /// log₂ N_{2^{-L_j}}(A) at every ladder depth.
    pub fn log_covering(&self) -> Vec<f64> {
        let mut acc = 0.0;
        let mut out = vec![0.0];
        for &c in &self.counts {
            acc += (c as f64).log2();
            out.push(acc);
        }
        out
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().product()
    }
}

/// T_ε with T⁻¹·log₂(2T) = ε, by bisection on T ≥ 1.
pub fn block_size_for(eps: f64) -> f64 {
    let f = |t: f64| (2.0 * t).log2() / t;
    if eps >= 1.0 {
        return 1.0;
    }
    let (mut lo, mut hi) = (1.0f64, 2.0f64);
    while f(hi) > eps {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > eps {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// ε-uniform subset on the ladder the definition prescribes: q = the largest
/// integer with q·T_ε ≤ log₂(1/δ) (at least one block), depths round(j·m/q).
pub fn uniformize(a: &DiscreteSet1D, eps: f64) -> Result<(DiscreteSet1D, BranchingProfile)> {
    let m = a.m();
    let t = block_size_for(eps);
    let q = ((m as f64 / t).floor() as u32).max(1);
    let levels: Vec<u32> = (0..=q).map(|j| ((j as f64) * m as f64 / q as f64).round() as u32).collect();
    uniformize_levels(a, &levels)
}

/// Uniform subset for an explicit ladder of depths (must start at 0 and end
/// at m). Bottom-up: at each level the occupied cells are bucketed by
/// ⌊log₂ branching⌋, the bucket carrying the most points is kept (ties to the
/// smaller bucket), and every kept cell is trimmed to the bucket's least
/// branching by dropping its rightmost children. All cells of a level then
/// hold exactly the same number of points.
pub fn uniformize_levels(a: &DiscreteSet1D, levels: &[u32]) -> Result<(DiscreteSet1D, BranchingProfile)> {
    let m = a.m();
    if a.is_empty() {
        return Err(Error::EmptySet);
    }
    if levels.first() != Some(&0) || levels.last() != Some(&m) || levels.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Precondition(format!("ladder {levels:?} must rise strictly from 0 to {m}")));
    }
    let n = a.scale.n();
    let base = a.values()[0].div_euclid(n) * n;
    if a.values().last().unwrap() - base >= n {
        return Err(Error::Precondition("uniformize needs the set inside one unit cell".into()));
    }
    let mut kept: Vec<i64> = a.values().iter().map(|v| v - base).collect();
    let q = levels.len() - 1;
    let mut counts = vec![0u64; q];
    for j in (0..q).rev() {
        let parent_shift = m - levels[j];
        let child_shift = m - levels[j + 1];
        // (parent, children: Vec<(child, members)>) in sorted order
        let mut groups: Vec<(i64, Vec<(i64, Vec<i64>)>)> = Vec::new();
        for &v in &kept {
            let p = v >> parent_shift;
            let c = v >> child_shift;
            if groups.last().map(|g| g.0) != Some(p) {
                groups.push((p, Vec::new()));
            }
            let children = &mut groups.last_mut().unwrap().1;
            if children.last().map(|ch| ch.0) != Some(c) {
                children.push((c, Vec::new()));
            }
            children.last_mut().unwrap().1.push(v);
        }
        let per_child = groups[0].1[0].1.len() as u64;
        let bucket_of = |b: usize| 63 - (b as u64).leading_zeros();
        let mut mass = std::collections::BTreeMap::<u32, u64>::new();
        for (_, ch) in &groups {
            *mass.entry(bucket_of(ch.len())).or_default() += ch.len() as u64 * per_child;
        }
        let best_mass = *mass.values().max().unwrap();
        let bucket = *mass.iter().find(|(_, &w)| w == best_mass).unwrap().0;
        let b_min = groups
            .iter()
            .filter(|(_, ch)| bucket_of(ch.len()) == bucket)
            .map(|(_, ch)| ch.len())
            .min()
            .unwrap();
        counts[j] = b_min as u64;
        kept = groups
            .into_iter()
            .filter(|(_, ch)| bucket_of(ch.len()) == bucket)
            .flat_map(|(_, ch)| ch.into_iter().take(b_min).flat_map(|(_, vs)| vs))
            .collect();
    }
    let block = m as f64 / q as f64;
    let profile = BranchingProfile {
        block,
        levels: levels.to_vec(),
        counts,
    };
    debug_assert_eq!(profile.total() as usize, kept.len());
    let out = DiscreteSet1D::new(
        a.scale,
        kept.into_iter().map(|v| v + base).collect(),
        format!("{}|uniform(levels={})", a.label, levels.len() - 1),
    );
    Ok((out, profile))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitCase {
    /// Coarsest exponent already above t − 10ε.
    Coarsest,
    /// Finest exponent already at most t − 10ε.
    Finest,
    /// First piece (from the fine end) with exponent ≤ t − 10ε.
    Interior,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScaleSplit {
    /// ρ = 2^{-rho_bits}.
    pub rho_bits: u32,
    pub case: SplitCase,
    /// Piece exponents t₁ > t₂ > … ordered from the finest piece.
    pub exponents: Vec<f64>,
    /// Breakpoints ρ₁ = δ < ρ₂ < … < ρ_{L+1} = 1 as depths in bits.
    pub breakpoints: Vec<u32>,
}

/// Scale selection from the inductive-scale argument. The branching function
/// f(x) = log₂ N_{2^{-x}}(B) on the ladder is replaced by its greatest convex
/// minorant, whose pieces have exponents t_j decreasing from the fine end;
/// then: ρ = 1 if t_L > t−10ε, ρ = δ if t₁ ≤ t−10ε, otherwise ρ = ρ_j for
/// the first j with t_j ≤ t−10ε.
pub fn multiscale_split(profile: &BranchingProfile, t: f64, eps: f64) -> ScaleSplit {
    let xs: Vec<f64> = profile.levels.iter().map(|&l| l as f64).collect();
    let ys = profile.log_covering();
    // lower hull, left to right
    let mut hull: Vec<usize> = Vec::new();
    for i in 0..xs.len() {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (xs[b] - xs[a]) * (ys[i] - ys[a]) - (ys[b] - ys[a]) * (xs[i] - xs[a]);
            if cross <= 1e-12 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(i);
    }
    // coarse-to-fine slopes, then merge equal neighbours
    let mut pieces: Vec<(u32, u32, f64)> = hull
        .windows(2)
        .map(|w| {
            let (a, b) = (w[0], w[1]);
            (profile.levels[a], profile.levels[b], (ys[b] - ys[a]) / (xs[b] - xs[a]))
        })
        .collect();
    pieces.dedup_by(|next, prev| {
        if (next.2 - prev.2).abs() < 1e-9 {
            prev.1 = next.1;
            true
        } else {
            false
        }
    });
    // fine-to-coarse, the indexing of the argument
    pieces.reverse();
    let exponents: Vec<f64> = pieces.iter().map(|p| p.2).collect();
    let mut breakpoints: Vec<u32> = pieces.iter().map(|p| p.1).collect();
    breakpoints.push(0);
    let thr = t - 10.0 * eps;
    let m = *profile.levels.last().unwrap();
    let (rho_bits, case) = if *exponents.last().unwrap() > thr {
        (0, SplitCase::Coarsest)
    } else if exponents[0] <= thr {
        (m, SplitCase::Finest)
    } else {
        let j = exponents.iter().position(|&e| e <= thr).unwrap();
        (breakpoints[j], SplitCase::Interior)
    };
    ScaleSplit {
        rho_bits,
        case,
        exponents,
        breakpoints,
    }
}
