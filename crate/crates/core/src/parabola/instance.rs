use super::circle::{circle_to_segment, disk_map};
use super::energy::triple_sums;
use super::ParabolaSet;
use crate::error::{Error, Result};
use crate::grid::{rasterize, Axis, GridSquare, Scale, Tube};
use crate::sets::{DiscreteSet2D, TubeFamily};
use rayon::prelude::*;
use std::collections::{BTreeMap, HashMap};

/// Tubes around the chords of the distinct circles and squares covering the
/// images of S₁ × S₂, all inside [0,1]².
#[derive(Debug, Clone, PartialEq)]
pub struct ParabolaInstance {
    /// Certified at exponents (s, s); the chords do not form a
    /// quasi-product family and the certificates are informational.
    pub tubes: TubeFamily,
    pub squares: DiscreteSet2D,
    /// Number of tubes meeting each square, aligned with `squares.points()`.
    pub dual_sizes: Vec<usize>,
    pub incidences: u64,
    /// Σ_T (#squares met by T)².
    pub square_sum: u128,
    /// Distinct circles after identification.
    pub circles: usize,
    /// Circles whose chord is degenerate or misses the unit square.
    pub dropped_circles: usize,
    /// Image points falling outside the unit square.
    pub dropped_points: usize,
    /// Smallest and largest ratio |G(a) − G(b)| / |a − b| over sampled
    /// pairs of pre-image points.
    pub distortion: (f64, f64),
}

/// Lines through the straightened picture: the point s₁ + s₂ goes to
/// (x, x² + y) and the curve σ − ℙ¹ to a line of slope 2σ_x.
#[derive(Debug, Clone, PartialEq)]
pub struct PsiInstance {
    pub tubes: TubeFamily,
    pub squares: DiscreteSet2D,
    pub incidences: u64,
    /// Σ_T (#squares incident to T)², with incidence decided exactly in the
    /// original coordinates.
    pub square_sum: u128,
    pub lines: usize,
    pub dropped_points: usize,
}

fn div_round(a: i128, b: i128) -> i128 {
    (2 * a + b).div_euclid(2 * b)
}

/// Identify triple sums lying in a common (c_tol·δ)-cell; each class is
/// represented by the rounded weighted mean of its sums.
fn circle_classes(sets: &[ParabolaSet; 3], c_tol: i64) -> Result<Vec<(i64, i64)>> {
    if c_tol < 1 {
        return Err(Error::Precondition(format!("tolerance constant {c_tol} must be at least 1")));
    }
    let n = sets[0].scale().n();
    let tol_y = c_tol * n;
    let mut cells: BTreeMap<(i64, i64), (i128, i128, i128)> = BTreeMap::new();
    for ((a, b), w) in triple_sums(sets)? {
        let e = cells.entry((a.div_euclid(c_tol), b.div_euclid(tol_y))).or_default();
        e.0 += a as i128 * w as i128;
        e.1 += b as i128 * w as i128;
        e.2 += w as i128;
    }
    Ok(cells
        .values()
        .map(|&(sa, sb, w)| (div_round(sa, w) as i64, div_round(sb, w) as i64))
        .collect())
}

fn check_separation(sets: &[ParabolaSet; 3], k_sep: f64) -> Result<()> {
    if !(k_sep >= 1.0) {
        return Err(Error::Precondition(format!("separation constant {k_sep} must be at least 1")));
    }
    let n = sets[0].scale().n() as f64;
    let hulls: Vec<(i64, i64)> = sets.iter().map(|s| s.hull().ok_or(Error::EmptySet)).collect::<Result<_>>()?;
    for i in 0..3 {
        for j in i + 1..3 {
            let (a, b) = (hulls[i], hulls[j]);
            let gap = (b.0 - a.1).max(a.0 - b.1) as f64;
            if gap < n / k_sep {
                return Err(Error::Precondition(format!(
                    "sets {i} and {j} are {gap}δ apart, below 1/{k_sep}"
                )));
            }
        }
    }
    Ok(())
}

fn same_scale(sets: &[ParabolaSet; 3]) -> Result<Scale> {
    let sc = sets[0].scale();
    for s in &sets[1..] {
        if s.scale() != sc {
            return Err(Error::ScaleMismatch(sc.m(), s.m()));
        }
    }
    Ok(sc)
}

fn chord_tube(p: (f64, f64), q: (f64, f64), scale: Scale) -> Option<Tube> {
    let (dx, dy) = (q.0 - p.0, q.1 - p.1);
    if dy.abs() <= dx.abs() {
        let a = dy / dx;
        Tube::snap(Axis::X, a, p.1 - a * p.0, scale)
    } else {
        let a = dx / dy;
        Tube::snap(Axis::Y, a, p.0 - a * p.1, scale)
    }
}

/// Number of tubes meeting each square and Σ_T (#squares met by T)².
fn tally(tubes: &[Tube], squares: &[GridSquare]) -> (Vec<usize>, u64, u128) {
    let index: HashMap<GridSquare, usize> = squares.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let hits: Vec<Vec<usize>> = tubes
        .par_iter()
        .map(|t| rasterize(t).into_iter().filter_map(|p| index.get(&p).copied()).collect())
        .collect();
    let mut dual = vec![0usize; squares.len()];
    let mut total = 0u64;
    let mut sq = 0u128;
    for h in &hits {
        for &i in h {
            dual[i] += 1;
        }
        total += h.len() as u64;
        sq += (h.len() as u128) * (h.len() as u128);
    }
    (dual, total, sq)
}

const DISTORTION_SAMPLE: usize = 128;

/// The chord picture of the energy: squares cover the points
/// (3(x₁+x₂), √3(x₁−x₂)), x_i ∈ S_i, after the disk map; tubes surround the
/// chords of the circles of all triples, with circles identified when their
/// coordinate sums share a (c_tol·δ)-cell. The disk image is shifted by
/// (1/2, 1/2) into [0,1]². S₁ and S₂ are swapped if S₁ lies left of S₂; the
/// energy is symmetric in them.
pub fn build_incidence_instance(sets: &[ParabolaSet; 3], s: f64, k_sep: f64, c_tol: i64) -> Result<ParabolaInstance> {
    let scale = same_scale(sets)?;
    check_separation(sets, k_sep)?;
    let mut sets = sets.clone();
    if sets[0].hull().map(|h| h.1) < sets[1].hull().map(|h| h.0) {
        sets.swap(0, 1);
    }
    let n = scale.n();
    let nf = n as f64;
    let sqrt3 = 3f64.sqrt();

    let mut pre = Vec::new();
    let mut images = Vec::new();
    let mut dropped_points = 0;
    for &x1 in sets[0].values() {
        for &x2 in sets[1].values() {
            let p = (3.0 * (x1 + x2) as f64 / nf, sqrt3 * (x1 - x2) as f64 / nf);
            let Some(g) = disk_map(p.0, p.1) else {
                dropped_points += 1;
                continue;
            };
            let (i, j) = (((g.0 + 0.5) * nf).floor(), ((g.1 + 0.5) * nf).floor());
            if i < 0.0 || j < 0.0 || i >= nf || j >= nf {
                dropped_points += 1;
                continue;
            }
            pre.push((p, g));
            images.push((i as i64, j as i64));
        }
    }
    let squares = DiscreteSet2D::new(scale, images, "chord-squares");

    let classes = circle_classes(&sets, c_tol)?;
    let mut tubes = Vec::with_capacity(classes.len());
    let mut dropped_circles = 0;
    for &(a, b) in &classes {
        let (s1, s2) = (a as f64 / nf, b as f64 / (nf * nf));
        let Ok([e1, e2]) = circle_to_segment(s1, s2) else {
            dropped_circles += 1;
            continue;
        };
        match chord_tube((e1.0 + 0.5, e1.1 + 0.5), (e2.0 + 0.5, e2.1 + 0.5), scale) {
            Some(t) => tubes.push(t),
            None => dropped_circles += 1,
        }
    }
    let tubes = TubeFamily::certify(scale, tubes, s, s)?;
    let grid: Vec<GridSquare> = squares
        .points()
        .iter()
        .map(|&(i, j)| GridSquare::new(i, j, scale))
        .collect::<Result<_>>()?;
    let (dual_sizes, incidences, square_sum) = tally(&tubes.tubes, &grid);

    let mut lo = f64::INFINITY;
    let mut hi: f64 = 0.0;
    let sample = &pre[..pre.len().min(DISTORTION_SAMPLE)];
    for (k, (p, g)) in sample.iter().enumerate() {
        for (q, h) in &sample[k + 1..] {
            let d = (p.0 - q.0).hypot(p.1 - q.1);
            if d > 0.0 {
                let r = (g.0 - h.0).hypot(g.1 - h.1) / d;
                lo = lo.min(r);
                hi = hi.max(r);
            }
        }
    }
    if hi == 0.0 {
        lo = 1.0;
        hi = 1.0;
    }

    Ok(ParabolaInstance {
        tubes,
        squares,
        dual_sizes,
        incidences,
        square_sum,
        circles: classes.len(),
        dropped_circles,
        dropped_points,
        distortion: (lo, hi),
    })
}

/// Is there u ∈ [x_lo, x_hi] with u² ∈ [y_lo, y_hi]? Exact.
fn meets_parabola(x_lo: i128, x_hi: i128, y_lo: i128, y_hi: i128) -> bool {
    let (a, b) = (x_lo * x_lo, x_hi * x_hi);
    let top = a.max(b);
    let bottom = if x_lo <= 0 && x_hi >= 0 { 0 } else { a.min(b) };
    bottom <= y_hi && y_lo <= top
}

/// The straightened picture. The square with corner (i, j) of [0,1]² holds
/// points (x, x² + y) with x = iδ − 1/2 and y ∈ [jδ − x², (j+1)δ − x²]; it is
/// incident to the class with representative sum σ when σ − (x, y) lies
/// within c_tol·δ of ℙ¹ for some y in that range, decided exactly.
pub fn psi_transform_instance(sets: &[ParabolaSet; 3], s: f64, c_tol: i64) -> Result<PsiInstance> {
    let scale = same_scale(sets)?;
    let n = scale.n();
    let half = n / 2;
    let mut cells = Vec::new();
    let mut dropped_points = 0;
    for &x1 in sets[0].values() {
        for &x2 in sets[1].values() {
            let a = x1 + x2;
            let b = x1 * x1 + x2 * x2;
            let i = a + half;
            let j = (a * a + b).div_euclid(n);
            if !(0..n).contains(&i) || !(0..n).contains(&j) {
                dropped_points += 1;
                continue;
            }
            cells.push((i, j));
        }
    }
    let squares = DiscreteSet2D::new(scale, cells, "psi-squares");
    let classes = circle_classes(sets, c_tol)?;
    let (n128, c) = (n as i128, c_tol as i128);

    let counts: Vec<u64> = classes
        .par_iter()
        .map(|&(sa, sb)| {
            squares
                .points()
                .iter()
                .filter(|&&(i, j)| {
                    let x = (i - half) as i128;
                    let (x2, jn) = (x * x, j as i128 * n128);
                    let dx = sa as i128 - x;
                    // σ_y − y over y ∈ [jn − x², jn + n − x²], in δ² units
                    let (dy_lo, dy_hi) = (sb as i128 - (jn + n128 - x2), sb as i128 - (jn - x2));
                    meets_parabola(dx - c, dx + c, dy_lo - c * n128, dy_hi + c * n128)
                })
                .count() as u64
        })
        .collect();
    let incidences = counts.iter().sum();
    let square_sum = counts.iter().map(|&k| k as u128 * k as u128).sum();

    let nf = n as f64;
    let tubes: Vec<Tube> = classes
        .iter()
        .filter_map(|&(sa, sb)| {
            let (sx, sy) = (sa as f64 / nf, sb as f64 / (nf * nf));
            Tube::snap(Axis::X, 2.0 * sx, sy - sx - sx * sx, scale)
        })
        .collect();
    Ok(PsiInstance {
        tubes: TubeFamily::certify(scale, tubes, s, s)?,
        squares,
        incidences,
        square_sum,
        lines: classes.len(),
        dropped_points,
    })
}
