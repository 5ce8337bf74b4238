use super::DiscreteSet1D;
use crate::error::{Error, Result};

/// Shift by a whole number of unit cells so the values start in [0, 2^m),
/// and return the number of extra doublings needed to hold all of them.
fn normalise(a: &DiscreteSet1D) -> (Vec<i64>, u32) {
    let n = a.scale.n();
    let vals = a.values();
    let base = vals[0].div_euclid(n) * n;
    let shifted: Vec<i64> = vals.iter().map(|v| v - base).collect();
    let top = *shifted.last().unwrap();
    let mut extra = 0;
    while top >= n << extra {
        extra += 1;
    }
    (shifted, extra)
}

/// Dyadic Hausdorff content: the least Σ diam(I)^s over covers by dyadic
/// intervals of side ≥ δ, by the bottom-up recursion
/// cost(I) = min(|I|^s, Σ cost(children)).
pub fn hausdorff_content(a: &DiscreteSet1D, s: f64) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    let m = a.m() as i32;
    let (vals, extra) = normalise(a);
    // (cell, cost) at the current level, sorted by cell
    let leaf = (-(m as f64) * s).exp2();
    let mut level: Vec<(i64, f64)> = vals.iter().map(|&v| (v, leaf)).collect();
    for depth in (-(extra as i32)..m).rev() {
        let cap = (-(depth as f64) * s).exp2();
        let mut next: Vec<(i64, f64)> = Vec::with_capacity(level.len());
        for (cell, cost) in level {
            let parent = cell >> 1;
            match next.last_mut() {
                Some(last) if last.0 == parent => last.1 += cost,
                _ => next.push((parent, cost)),
            }
        }
        for e in &mut next {
            e.1 = e.1.min(cap);
        }
        level = next;
    }
    debug_assert_eq!(level.len(), 1);
    level[0].1
}

/// Subset in which every dyadic cell of side 2^-k holds at most
/// ⌊2^{(m−k)s}⌋ points (and at least one where A had any), obtained by
/// pruning bottom-up and keeping the leftmost survivors. Its size is at
/// least δ^{-s}·content/2.
pub fn frostman_subset(a: &DiscreteSet1D, s: f64) -> DiscreteSet1D {
    if a.is_empty() {
        return a.clone();
    }
    let m = a.m();
    let n = a.scale.n();
    let base = a.values()[0].div_euclid(n) * n;
    let (vals, extra) = normalise(a);
    // groups of kept values per cell at the current level
    let mut level: Vec<(i64, Vec<i64>)> = vals.iter().map(|&v| (v, vec![v])).collect();
    for depth in (-(extra as i32)..m as i32).rev() {
        let cap = (((m as i32 - depth) as f64 * s).exp2() * (1.0 + 1e-12)).floor().max(1.0) as usize;
        let mut next: Vec<(i64, Vec<i64>)> = Vec::with_capacity(level.len());
        for (cell, kept) in level {
            let parent = cell >> 1;
            match next.last_mut() {
                Some(last) if last.0 == parent => last.1.extend(kept),
                _ => next.push((parent, kept)),
            }
        }
        for e in &mut next {
            e.1.truncate(cap);
        }
        level = next;
    }
    let kept: Vec<i64> = level.into_iter().flat_map(|(_, v)| v).map(|v| v + base).collect();
    DiscreteSet1D::new(a.scale, kept, format!("{}|frostman_subset(s={s})", a.label))
}

/// sup{ v ∈ [0, vmax] : content at exponent v ≥ 1 } by bisection; the
/// content is nonincreasing in v for covers of diameter ≤ 1.
pub fn content_threshold(a: &DiscreteSet1D, vmax: f64) -> Result<f64> {
    if a.is_empty() {
        return Err(Error::EmptySet);
    }
    if hausdorff_content(a, 0.0) < 1.0 {
        return Ok(0.0);
    }
    if hausdorff_content(a, vmax) >= 1.0 {
        return Ok(vmax);
    }
    let (mut lo, mut hi) = (0.0, vmax);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if hausdorff_content(a, mid) >= 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}
