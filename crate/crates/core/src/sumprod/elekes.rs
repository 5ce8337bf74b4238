use super::{ratio_cells, sumset};
use crate::error::{Error, Result};
use crate::grid::{rasterize, Axis, GridSquare, Tube};
use crate::incidence::{sigma_of, Shading};
use crate::sets::{content_threshold, quasi_product_family, DiscreteSet1D, DiscreteSet2D, TubeFamily};
use rayon::prelude::*;
use std::collections::{BTreeMap, HashSet};

/// Tubes y = (k/n)x + c/n over the slopes and per-slope intercepts given,
/// shaded by the squares of `points` each tube meets.
pub fn elekes_family(
    slopes: &DiscreteSet1D,
    intercepts: &[DiscreteSet1D],
    points: &DiscreteSet2D,
    s: f64,
    d: f64,
) -> Result<(TubeFamily, Shading)> {
    if points.scale != slopes.scale {
        return Err(Error::ScaleMismatch(points.m(), slopes.m()));
    }
    let family = quasi_product_family(Axis::X, slopes, intercepts, s, d)?;
    let scale = family.scale;
    let present: HashSet<GridSquare> = points
        .points()
        .iter()
        .map(|&(i, j)| GridSquare::new(i, j, scale))
        .collect::<Result<_>>()?;
    let rows: Vec<Vec<GridSquare>> = family
        .tubes
        .par_iter()
        .map(|t| rasterize(t).into_iter().filter(|q| present.contains(q)).collect())
        .collect();
    let shading = Shading::new(&family, rows, sigma_of(s, d))?;
    Ok((family, shading))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ElekesInstance {
    /// δ-cells of A/A inside [1/2, 1], in δ units.
    pub slopes: DiscreteSet1D,
    /// Largest #Γ_k.
    pub max_intercepts: usize,
    /// sup{v ≤ 43s/34 : content of the slope set at v ≥ 1}.
    pub t: f64,
    pub points: DiscreteSet2D,
    pub family: TubeFamily,
    pub shading: Shading,
}

/// Lines y = m(x − a) + b with m a δ-cell of A/A in [1/2, 1] and a, b ∈ A,
/// against the points (A + A)², all translated by (−1, −1) into the unit
/// square. The family is certified at (t, s + t/2).
pub fn elekes_instance(a: &DiscreteSet1D, s: f64) -> Result<ElekesInstance> {
    let scale = a.scale;
    let n = scale.n();
    let slopes: Vec<i64> = ratio_cells(a, scale.m())?.into_iter().filter(|&k| k <= n).collect();
    let slopes = DiscreteSet1D::new(scale, slopes, format!("{}|ratio cells", a.label));
    if slopes.is_empty() {
        return Err(Error::EmptySet);
    }
    let t = content_threshold(&slopes, super::GROWTH_EXPONENT * s)?;
    let v = a.values();
    let mut by_slope: BTreeMap<i64, Vec<i64>> = BTreeMap::new();
    for &k in slopes.values() {
        // n·c = n·b − k·a + (k − n)·n for the line through (a, b) after the
        // shift, rounded to the δ-grid
        let cs = v
            .iter()
            .flat_map(|&x| v.iter().map(move |&y| (y + k - n) * n - k * x))
            .map(|num| (2 * num + n).div_euclid(2 * n))
            .filter(|&c| Tube::new(Axis::X, k, c, scale).is_ok())
            .collect();
        by_slope.insert(k, cs);
    }
    let kept: Vec<i64> = by_slope.iter().filter(|(_, cs)| !cs.is_empty()).map(|(k, _)| *k).collect();
    let slopes = DiscreteSet1D::new(scale, kept, slopes.label.clone());
    let intercepts: Vec<DiscreteSet1D> = slopes
        .values()
        .iter()
        .map(|k| DiscreteSet1D::new(scale, by_slope[k].clone(), "intercepts"))
        .collect();
    let max_intercepts = intercepts.iter().map(DiscreteSet1D::len).max().unwrap_or(0);
    let sums: Vec<i64> = sumset(a).into_iter().map(|x| x - n).filter(|x| (0..n).contains(x)).collect();
    let pts = sums.iter().flat_map(|&x| sums.iter().map(move |&y| (x, y))).collect();
    let points = DiscreteSet2D::new(scale, pts, format!("({0}+{0})^2", a.label));
    let (family, shading) = elekes_family(&slopes, &intercepts, &points, t, s + t / 2.0)?;
    Ok(ElekesInstance {
        slopes,
        max_intercepts,
        t,
        points,
        family,
        shading,
    })
}

/// Σ over slopes k ∈ D and over the strips {c ≤ y − (k/n)x < c + 1} (δ
/// units) of r(r − 1)(r − 2), r the number of points of P in the strip.
///
/// This is the number of pairs (ordered triple of distinct points, tube)
/// with the triple inside the tube, the tubes of each slope partitioning the
/// plane.
pub fn collinear_triples(p: &DiscreteSet2D, d: &DiscreteSet1D) -> u128 {
    let n = p.scale.n() as i128;
    let pts = p.points();
    d.values()
        .par_iter()
        .map(|&k| {
            let mut strips: Vec<i128> = pts
                .iter()
                .map(|&(x, y)| (y as i128 * n - k as i128 * x as i128).div_euclid(n))
                .collect();
            strips.sort_unstable();
            let mut total = 0u128;
            let mut i = 0;
            while i < strips.len() {
                let j = i + strips[i..].partition_point(|&c| c == strips[i]);
                let r = (j - i) as u128;
                if r >= 3 {
                    total += r * (r - 1) * (r - 2);
                }
                i = j;
            }
            total
        })
        .sum()
}
