//! Sum-set and ratio-set covering numbers, the projections (a, b) ↦ a + xb,
//! Elekes-type line families, collinear triples and the few-sums pipeline.
//!
//! Everything is exact integer arithmetic on δ-grid values; a covering
//! number at side 2^-k counts occupied dyadic cells [jρ, (j+1)ρ).

mod elekes;
mod growth;
mod projection;

pub use elekes::{collinear_triples, elekes_family, elekes_instance, ElekesInstance};
pub use growth::{
    doubling_across_scales, few_sums_pipeline, growth_exponent_check, growth_report, DoublingRow, DoublingTable,
    FewSumsReport, GrowthReport, GrowthVerdict, DEFAULT_SLACK, GROWTH_EXPONENT, MAX_GROWTH_S,
};
pub use projection::{projection_survey, quasi_product_constants, DirectionRow, ProjectionReport, SurveyParams};

use crate::error::{Error, Result};
use crate::sets::{DiscreteSet1D, DiscreteSet2D};
use rayon::prelude::*;

/// Distinct values of A + A, in δ units.
pub fn sumset(a: &DiscreteSet1D) -> Vec<i64> {
    let v = a.values();
    if v.is_empty() {
        return Vec::new();
    }
    let lo = 2 * v[0];
    let span = (2 * v[v.len() - 1] - lo + 1) as usize;
    let mut hit = vec![false; span];
    for &x in v {
        for &y in v {
            hit[(x + y - lo) as usize] = true;
        }
    }
    hit.iter()
        .enumerate()
        .filter(|(_, &h)| h)
        .map(|(i, _)| lo + i as i64)
        .collect()
}

/// N_ρ(A + A) at ρ = 2^-k, k ≤ m.
pub fn sumset_cover(a: &DiscreteSet1D, k: u32) -> Result<usize> {
    if k > a.m() {
        return Err(Error::Precondition(format!("sums live on the δ-grid; k={k} exceeds m={}", a.m())));
    }
    let shift = a.m() - k;
    let mut cells: Vec<i64> = sumset(a).into_iter().map(|v| v >> shift).collect();
    cells.dedup();
    Ok(cells.len())
}

fn check_ratio_input(a: &DiscreteSet1D) -> Result<()> {
    let n = a.scale.n();
    if a.values().iter().any(|&v| 2 * v < n || v > n) {
        return Err(Error::Precondition("ratio sets need A inside [1/2, 1]".into()));
    }
    Ok(())
}

/// Sorted distinct cells ⌊(p/q)·2^k⌋ over p, q ∈ A.
pub fn ratio_cells(a: &DiscreteSet1D, k: u32) -> Result<Vec<i64>> {
    check_ratio_input(a)?;
    if k > 40 {
        return Err(Error::Precondition(format!("cell exponent {k} too large")));
    }
    let v = a.values();
    let mut cells: Vec<i64> = v
        .par_iter()
        .flat_map_iter(|&p| v.iter().map(move |&q| ((p as i128) << k).div_euclid(q as i128) as i64))
        .collect();
    cells.par_sort_unstable();
    cells.dedup();
    Ok(cells)
}

/// N_ρ(A/A) at ρ = 2^-k for A ⊂ [1/2, 1]. The cell exponent may exceed m:
/// at k ≥ 2m distinct quotients land in distinct cells.
pub fn ratioset_cover(a: &DiscreteSet1D, k: u32) -> Result<usize> {
    Ok(ratio_cells(a, k)?.len())
}

/// π_x(P) binned at δ, for x = t·δ: the cell of a + xb is a + ⌊tb/n⌋.
pub fn project(p: &DiscreteSet2D, t: i64) -> DiscreteSet1D {
    let n = p.scale.n();
    let vals = p.points().iter().map(|&(a, b)| a + (t * b).div_euclid(n)).collect();
    DiscreteSet1D::new(p.scale, vals, format!("{}|proj({t})", p.label))
}

#[cfg(test)]
mod tests;
