use crate::error::{Error, Result};
use crate::grid::{rows_at, Axis, GridSquare, Tube};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn primary(p: &GridSquare, axis: Axis) -> i64 {
    match axis {
        Axis::X => p.i as i64,
        Axis::Y => p.j as i64,
    }
}

/// Largest fraction of Y(T) inside a Euclidean ball of radius δ^{ε₁}, over
/// centres on the tube axis spaced δ^{ε₁}/2 apart in the primary coordinate.
pub fn max_ball_fraction(tube: &Tube, row: &[GridSquare], eps1: f64) -> f64 {
    if row.is_empty() {
        return 0.0;
    }
    let n = (1i64 << tube.m) as f64;
    let radius = n.powf(-eps1);
    let step = radius / 2.0;
    let centres: Vec<(f64, f64)> = {
        let mut v: Vec<(f64, f64)> = row
            .iter()
            .map(|p| ((p.i as f64 + 0.5) / n, (p.j as f64 + 0.5) / n))
            .map(|(x, y)| match tube.axis {
                Axis::X => (x, y),
                Axis::Y => (y, x),
            })
            .collect();
        v.sort_by(|a, b| a.0.total_cmp(&b.0));
        v
    };
    let a = tube.slope_f64();
    let b = tube.intercept as f64 / n;
    let steps = (1.0 / step).ceil() as usize;
    let mut best = 0usize;
    for k in 0..=steps {
        let u = k as f64 * step;
        let v = a * u + b;
        let lo = centres.partition_point(|c| c.0 < u - radius);
        let hi = centres.partition_point(|c| c.0 <= u + radius);
        let c = centres[lo..hi]
            .iter()
            .filter(|c| (c.0 - u).hypot(c.1 - v) <= radius)
            .count();
        best = best.max(c);
    }
    best as f64 / row.len() as f64
}

/// (ε₁, ε₂)-two-ends test for one shaded tube: no ball of radius δ^{ε₁} holds
/// more than δ^{ε₂}·#Y(T) squares.
pub fn two_ends_check(tube: &Tube, row: &[GridSquare], eps1: f64, eps2: f64) -> Result<bool> {
    if !(eps2 > 0.0 && eps2 < eps1) {
        return Err(Error::Precondition(format!("need 0 < ε₂ < ε₁, got ({eps1}, {eps2})")));
    }
    let n = (1i64 << tube.m) as f64;
    Ok(max_ball_fraction(tube, row, eps1) <= n.powf(-eps2))
}

/// Largest (j − i + 1)/max(span, 1)^s over runs of consecutive squares along
/// the tube, span measured in δ units of the primary coordinate.
pub fn segment_kt_constant(tube: &Tube, row: &[GridSquare], s: f64) -> f64 {
    let mut pos: Vec<i64> = row.iter().map(|p| primary(p, tube.axis)).collect();
    pos.sort_unstable();
    let mut best = 0.0f64;
    for i in 0..pos.len() {
        for j in i..pos.len() {
            let span = ((pos[j] - pos[i]) as f64).max(1.0);
            best = best.max((j - i + 1) as f64 / span.powf(s));
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq)]
pub struct Refinement {
    /// Start of τ in the primary coordinate, δ units.
    pub start: f64,
    /// Length of τ as a fraction of the unit interval.
    pub length: f64,
    pub squares: Vec<GridSquare>,
    /// #Y(T).
    pub total: usize,
    pub iterations: u32,
    /// The concentration test passed (false only if the iteration cap stopped it).
    pub settled: bool,
    /// Measured segment KT constant of Y(T).
    pub c_seg: f64,
    /// N ≥ L^{ε²}·P.
    pub count_bound_holds: bool,
    /// L ≥ (δ^s·P / C_seg)^{1/(s−ε²)}.
    pub length_bound_holds: bool,
}

impl Refinement {
    pub fn count(&self) -> usize {
        self.squares.len()
    }
}

/// Nested-segment iteration: starting from τ = T (L = 1), look for a window of
/// length ℓ = L(δ/L)^ε inside τ holding more than (δ/L)^{ε³}·N squares; if one
/// exists it becomes the new τ, otherwise τ is returned. Windows are measured
/// along the primary coordinate and squares are placed at their centres.
pub fn two_ends_refine(tube: &Tube, row: &[GridSquare], s: f64, eps: f64) -> Result<Refinement> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::Precondition(format!("ε = {eps} outside (0, 1/2)")));
    }
    if !(s > 0.0 && s <= 1.0) {
        return Err(Error::ExponentOutOfRange(s));
    }
    if row.is_empty() {
        return Err(Error::EmptySet);
    }
    let m = tube.m;
    let n = (1i64 << m) as f64;
    let delta = 1.0 / n;
    let mut items: Vec<(f64, GridSquare)> = row
        .iter()
        .map(|p| (primary(p, tube.axis) as f64 + 0.5, *p))
        .collect();
    items.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let total = items.len();
    let cap = (m as f64 / (1.0 / (1.0 - eps)).log2()).floor() as u32 + 1;

    let (mut start, mut length) = (0.0f64, 1.0f64);
    let mut iterations = 0u32;
    let settled = loop {
        let w = length * (delta / length).powf(eps) / delta;
        let thr = (delta / length).powf(eps.powi(3)) * items.len() as f64;
        let mut best = (0usize, 0usize);
        for i in 0..items.len() {
            let j = items.partition_point(|x| x.0 < items[i].0 + w);
            if j - i > best.1 {
                best = (i, j - i);
            }
        }
        if best.1 as f64 <= thr {
            break true;
        }
        if iterations >= cap {
            break false;
        }
        let end = start + length / delta;
        let a = items[best.0].0.min(end - w).max(start);
        items.retain(|x| x.0 >= a && x.0 < a + w);
        start = a;
        length *= (delta / length).powf(eps);
        iterations += 1;
    };
    let c_seg = segment_kt_constant(tube, row, s);
    let p = total as f64;
    let nn = items.len() as f64;
    let slack = 1.0 - 1e-9;
    let count_bound_holds = nn >= length.powf(eps * eps) * p * slack;
    let length_bound_holds = length >= (delta.powf(s) * p / c_seg).powf(1.0 / (s - eps * eps)) * slack;
    Ok(Refinement {
        start,
        length,
        squares: items.into_iter().map(|x| x.1).collect(),
        total,
        iterations,
        settled,
        c_seg,
        count_bound_holds,
        length_bound_holds,
    })
}

/// Random shading of `tube` with one square per chosen column, columns drawn
/// from a random dyadic segment and accepted greedily while the segment KT
/// constant at exponent s stays ≤ 1. Size is at most ⌊δ^{-s}⌋.
pub fn random_kt_shading(tube: &Tube, s: f64, seed: u64) -> Vec<GridSquare> {
    let m = tube.m;
    let n = 1i64 << m;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let seg_bits = rng.random_range(0..=m);
    let seg_len = n >> seg_bits;
    let seg_start = rng.random_range(0..(1i64 << seg_bits)) * seg_len;
    let target = rng.random_range(1..=((n as f64).powf(s).floor() as usize).max(1));
    let mut cols: Vec<i64> = (seg_start..seg_start + seg_len).collect();
    cols.shuffle(&mut rng);
    let mut chosen: Vec<i64> = Vec::new();
    for u in cols {
        if chosen.len() >= target {
            break;
        }
        let at = chosen.partition_point(|&c| c < u);
        chosen.insert(at, u);
        let ok = (0..=at).all(|i| {
            (at..chosen.len()).all(|j| {
                let span = ((chosen[j] - chosen[i]) as f64).max(1.0);
                (j - i + 1) as f64 <= span.powf(s) + 1e-12
            })
        });
        if !ok {
            chosen.remove(at);
        }
    }
    let mut out = Vec::with_capacity(chosen.len());
    for u in chosen {
        let rows: Vec<i64> = rows_at(tube, u).collect();
        if rows.is_empty() {
            continue;
        }
        let w = rows[rng.random_range(0..rows.len())];
        let (i, j) = match tube.axis {
            Axis::X => (u, w),
            Axis::Y => (w, u),
        };
        out.push(GridSquare {
            i: i as i32,
            j: j as i32,
            m,
        });
    }
    out.sort_unstable();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{rasterize, Scale};

    fn flat(m: u32) -> Tube {
        Tube::new(Axis::X, 0, 1 << (m - 1), Scale::new(m).unwrap()).unwrap()
    }

    #[test]
    fn spread_row_is_two_ends() {
        let t = flat(10);
        let row = rasterize(&t);
        assert!(two_ends_check(&t, &row, 0.5, 0.1).unwrap());
    }

    #[test]
    fn clustered_row_is_not() {
        let t = flat(10);
        let row: Vec<_> = rasterize(&t).into_iter().filter(|p| p.i < 8).collect();
        assert!(!two_ends_check(&t, &row, 0.3, 0.1).unwrap());
    }

    #[test]
    fn spread_row_stops_at_once() {
        let t = flat(10);
        let row = rasterize(&t);
        let r = two_ends_refine(&t, &row, 1.0, 0.2).unwrap();
        assert_eq!((r.length, r.count(), r.iterations), (1.0, row.len(), 0));
        assert!(r.settled && r.count_bound_holds && r.length_bound_holds);
    }

    #[test]
    fn random_shadings_are_segment_kt() {
        let t = flat(10);
        for seed in 0..20 {
            let row = random_kt_shading(&t, 0.5, seed);
            assert!(!row.is_empty() && row.len() <= 32);
            assert!(segment_kt_constant(&t, &row, 0.5) <= 1.0 + 1e-9);
        }
    }
}
