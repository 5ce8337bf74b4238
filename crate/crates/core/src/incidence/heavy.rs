use super::shading::Shading;
use crate::grid::{rasterize, GridSquare, Scale};
use crate::sets::TubeFamily;
use rayon::prelude::*;

/// (square, multiplicity) for every square covered at least once, sorted by
/// linear index. Parallel over rows, merged by a sort, so the result does not
/// depend on the worker count.
pub fn square_counts(rows: &[Vec<GridSquare>], scale: Scale) -> Vec<(GridSquare, u32)> {
    let mut idx: Vec<u64> = rows
        .par_iter()
        .flat_map_iter(|r| r.iter().map(|p| p.linear_index()))
        .collect();
    idx.par_sort_unstable();
    let mut out: Vec<(GridSquare, u32)> = Vec::new();
    let mut i = 0;
    while i < idx.len() {
        let mut j = i + 1;
        while j < idx.len() && idx[j] == idx[i] {
            j += 1;
        }
        let sq = GridSquare::from_linear_index(idx[i], scale).expect("index from a valid square");
        out.push((sq, (j - i) as u32));
        i = j;
    }
    out
}

/// Incidence multiplicity of every square met by the family.
pub fn incidence_counts(family: &TubeFamily) -> Vec<(GridSquare, u32)> {
    let rows: Vec<Vec<GridSquare>> = family.tubes.par_iter().map(rasterize).collect();
    square_counts(&rows, family.scale)
}

fn in_bucket(c: u32, r: u32) -> bool {
    c >= r && (c as u64) < 2 * r as u64
}

/// Squares met by between r and 2r − 1 tubes.
pub fn heavy_squares(family: &TubeFamily, r: u32) -> Vec<GridSquare> {
    incidence_counts(family)
        .into_iter()
        .filter(|&(_, c)| in_bucket(c, r))
        .map(|(p, _)| p)
        .collect()
}

/// Squares lying in the shadings of between r and 2r − 1 tubes.
pub fn heavy_squares_shaded(shading: &Shading, r: u32) -> Vec<GridSquare> {
    square_counts(&shading.per_tube, shading.scale)
        .into_iter()
        .filter(|&(_, c)| in_bucket(c, r))
        .map(|(p, _)| p)
        .collect()
}

/// (r, #squares with multiplicity in [r, 2r)) for r = 1, 2, 4, … up to the
/// largest multiplicity.
pub fn heavy_profile(counts: &[(GridSquare, u32)]) -> Vec<(u32, u64)> {
    let top = counts.iter().map(|c| c.1).max().unwrap_or(0);
    let mut out = Vec::new();
    let mut r = 1u32;
    while r <= top {
        let k = counts.iter().filter(|&&(_, c)| in_bucket(c, r)).count() as u64;
        out.push((r, k));
        r = match r.checked_mul(2) {
            Some(v) => v,
            None => break,
        };
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnulusBucket {
    pub r: u32,
    pub count: u64,
    /// Median distance of the bucket's square centres from the centre, in
    /// units of the unit square.
    pub median_distance: f64,
}

/// Heavy-square profile with the typical distance of each bucket from `centre`.
pub fn annulus_profile(counts: &[(GridSquare, u32)], centre: (f64, f64)) -> Vec<AnnulusBucket> {
    heavy_profile(counts)
        .into_iter()
        .filter(|&(_, k)| k > 0)
        .map(|(r, k)| {
            let mut d: Vec<f64> = counts
                .iter()
                .filter(|&&(_, c)| in_bucket(c, r))
                .map(|(p, _)| {
                    let (x, y) = p.center();
                    (x - centre.0).hypot(y - centre.1)
                })
                .collect();
            d.sort_by(f64::total_cmp);
            AnnulusBucket {
                r,
                count: k,
                median_distance: d[d.len() / 2],
            }
        })
        .collect()
}
