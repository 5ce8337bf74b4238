//! Dyadic squares, canonical tubes, oriented rectangles and the exact
//! incidence predicate.
//!
//! Coordinates are integers in units of δ = 2^-m. Tube slopes and intercepts
//! are stored as integer multiples of δ, so every predicate below reduces to
//! a comparison of 128-bit integers.

use crate::error::{Error, Result};
use std::collections::HashSet;

/// Largest supported scale exponent. Keeps every intermediate of the
/// incidence predicate inside `i128`.
pub const MAX_M: u32 = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Scale {
    m: u32,
}

impl Scale {
    pub fn new(m: u32) -> Result<Self> {
        if m == 0 || m > MAX_M {
            return Err(Error::InvalidScale(m));
        }
        Ok(Scale { m })
    }

    pub fn m(self) -> u32 {
        self.m
    }

    /// δ⁻¹ = 2^m.
    pub fn n(self) -> i64 {
        1i64 << self.m
    }

    pub fn delta(self) -> f64 {
        (self.n() as f64).recip()
    }
}

/// The closed square [iδ,(i+1)δ]×[jδ,(j+1)δ].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GridSquare {
    pub i: i32,
    pub j: i32,
    pub m: u32,
}

impl GridSquare {
    pub fn new(i: i64, j: i64, scale: Scale) -> Result<Self> {
        let n = scale.n();
        if !(0..n).contains(&i) || !(0..n).contains(&j) {
            return Err(Error::Precondition(format!(
                "square ({i},{j}) outside the 2^{} grid",
                scale.m()
            )));
        }
        Ok(GridSquare {
            i: i as i32,
            j: j as i32,
            m: scale.m(),
        })
    }

    pub fn center(self) -> (f64, f64) {
        let d = (1u64 << self.m) as f64;
        ((self.i as f64 + 0.5) / d, (self.j as f64 + 0.5) / d)
    }

    /// Row-major index j·2^m + i, used by the shading file format.
    pub fn linear_index(self) -> u64 {
        ((self.j as u64) << self.m) + self.i as u64
    }

    pub fn from_linear_index(idx: u64, scale: Scale) -> Result<Self> {
        let n = scale.n() as u64;
        if idx >= n * n {
            return Err(Error::Precondition(format!("square index {idx} out of range")));
        }
        GridSquare::new((idx % n) as i64, (idx / n) as i64, scale)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axis {
    /// y = slope·x + intercept.
    X,
    /// x = slope·y + intercept.
    Y,
}

/// δ-neighbourhood of a line crossing [0,1]², in canonical form.
///
/// `slope` and `intercept` are in units of δ; |slope| ≤ 2^m.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Tube {
    pub axis: Axis,
    pub slope: i64,
    pub intercept: i64,
    pub m: u32,
}

impl Tube {
    pub fn new(axis: Axis, slope: i64, intercept: i64, scale: Scale) -> Result<Self> {
        let n = scale.n();
        if slope.abs() > n {
            return Err(Error::InvalidTube(format!("slope {slope}/{n} outside [-1,1]")));
        }
        // values of the dependent coordinate at the two ends, in δ units
        let (a, b) = (intercept, intercept + slope);
        if a.max(b) < 0 || a.min(b) > n {
            return Err(Error::InvalidTube(format!(
                "axis line misses the unit square (intercept {intercept})"
            )));
        }
        Ok(Tube {
            axis,
            slope,
            intercept,
            m: scale.m(),
        })
    }

    pub fn scale(&self) -> Scale {
        Scale { m: self.m }
    }

    /// Snap a real line `dep = a·prim + b` to the nearest canonical tube.
    /// Returns `None` if the snapped axis misses [0,1]².
    pub fn snap(axis: Axis, a: f64, b: f64, scale: Scale) -> Option<Tube> {
        let n = scale.n() as f64;
        let k = (a * n).round() as i64;
        let c = (b * n).round() as i64;
        Tube::new(axis, k.clamp(-scale.n(), scale.n()), c, scale).ok()
    }

    /// Slope as a float, in the tube's own axis convention.
    pub fn slope_f64(&self) -> f64 {
        self.slope as f64 / (1u64 << self.m) as f64
    }
}

/// Twice the signed offset of the square centre from the tube axis, measured
/// along the dependent coordinate and scaled by 2^m: D = k(2u+1) − n(2w+1) + 2nc.
#[inline]
fn axis_offset(prim: i64, dep: i64, t: &Tube) -> i128 {
    let n = 1i128 << t.m;
    t.slope as i128 * (2 * prim as i128 + 1) - n * (2 * dep as i128 + 1) + 2 * n * t.intercept as i128
}

/// Exact test of D² ≤ (6+4√2)(n²+k²), i.e. centre-to-axis distance ≤ δ(1+√2/2).
#[inline]
fn within_radius(d: i128, k: i64, m: u32) -> bool {
    let n = 1i128 << m;
    let e = n * n + (k as i128) * (k as i128);
    let lhs = d * d - 6 * e;
    if lhs <= 0 {
        return true;
    }
    lhs * lhs <= 32 * e * e
}

#[inline]
fn primary_dependent(sq: GridSquare, axis: Axis) -> (i64, i64) {
    match axis {
        Axis::X => (sq.i as i64, sq.j as i64),
        Axis::Y => (sq.j as i64, sq.i as i64),
    }
}

/// The incidence predicate: centre-to-axis distance ≤ δ(1+√2/2), exact.
pub fn incident(square: GridSquare, tube: &Tube) -> Result<bool> {
    if square.m != tube.m {
        return Err(Error::ScaleMismatch(square.m, tube.m));
    }
    Ok(incident_unchecked(square, tube))
}

#[inline]
pub(crate) fn incident_unchecked(square: GridSquare, tube: &Tube) -> bool {
    let (u, w) = primary_dependent(square, tube.axis);
    within_radius(axis_offset(u, w, tube), tube.slope, tube.m)
}

/// Dependent-coordinate rows within reach of the tube at primary column `u`.
#[inline]
pub(crate) fn rows_at(tube: &Tube, u: i64) -> impl Iterator<Item = i64> + '_ {
    let n = 1i64 << tube.m;
    // centre of the axis at this column, in δ units, rounded down
    let num = tube.slope as i128 * (2 * u as i128 + 1) + 2 * n as i128 * tube.intercept as i128;
    let w0 = num.div_euclid(2 * n as i128) as i64;
    let lo = (w0 - 4).max(0);
    let hi = (w0 + 4).min(n - 1);
    (lo..=hi).filter(move |&w| within_radius(axis_offset(u, w, tube), tube.slope, tube.m))
}

/// All squares incident to the tube, sorted by (i, j).
pub fn rasterize(tube: &Tube) -> Vec<GridSquare> {
    let n = 1i64 << tube.m;
    let mut out = Vec::with_capacity(4 * n as usize);
    for u in 0..n {
        for w in rows_at(tube, u) {
            let (i, j) = match tube.axis {
                Axis::X => (u, w),
                Axis::Y => (w, u),
            };
            out.push(GridSquare {
                i: i as i32,
                j: j as i32,
                m: tube.m,
            });
        }
    }
    out.sort_unstable();
    out
}

/// Closed rectangle with an integer direction vector.
///
/// The centre and half-lengths are in units of δ/2, so square centres
/// (2i+1, 2j+1) and dyadic rectangles are represented exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrientedRect {
    pub center2: (i64, i64),
    pub dir: (i64, i64),
    /// Half of the long side r, in δ/2 units.
    pub half_long2: i64,
    /// Half of the short side r′, in δ/2 units.
    pub half_short2: i64,
}

impl OrientedRect {
    pub fn new(center2: (i64, i64), dir: (i64, i64), half_long2: i64, half_short2: i64) -> Result<Self> {
        if dir == (0, 0) {
            return Err(Error::Degenerate("zero direction".into()));
        }
        if half_short2 < 1 || half_short2 > half_long2 {
            return Err(Error::Precondition("rectangle needs δ ≤ r′ ≤ r".into()));
        }
        Ok(OrientedRect {
            center2,
            dir,
            half_long2,
            half_short2,
        })
    }

    /// Membership of the point (x2, y2) given in δ/2 units.
    #[inline]
    pub fn contains2(&self, x2: i64, y2: i64) -> bool {
        let vx = (x2 - self.center2.0) as i128;
        let vy = (y2 - self.center2.1) as i128;
        let (dx, dy) = (self.dir.0 as i128, self.dir.1 as i128);
        let along = vx * dx + vy * dy;
        let across = vx * dy - vy * dx;
        let norm2 = dx * dx + dy * dy;
        let hl = self.half_long2 as i128;
        let hs = self.half_short2 as i128;
        along * along <= hl * hl * norm2 && across * across <= hs * hs * norm2
    }
}

/// Number of grid points (square centres) of `points` inside the closed rectangle.
pub fn count_in_rect(points: &[(i64, i64)], rect: &OrientedRect) -> usize {
    points
        .iter()
        .filter(|&&(i, j)| rect.contains2(2 * i + 1, 2 * j + 1))
        .count()
}

/// Number of dyadic cells of side 2^-k meeting a set of grid indices at scale m.
pub fn covering_number_1d(values: &[i64], m: u32, k: u32) -> usize {
    assert!(k <= m, "covering scale finer than the set's scale");
    let shift = m - k;
    let mut cells: Vec<i64> = values.iter().map(|v| v >> shift).collect();
    cells.sort_unstable();
    cells.dedup();
    cells.len()
}

/// Two-dimensional analogue of [`covering_number_1d`].
pub fn covering_number_2d(points: &[(i64, i64)], m: u32, k: u32) -> usize {
    assert!(k <= m, "covering scale finer than the set's scale");
    let shift = m - k;
    let cells: HashSet<(i64, i64)> = points.iter().map(|&(i, j)| (i >> shift, j >> shift)).collect();
    cells.len()
}
