use super::{DiscreteSet1D, DiscreteSet2D};
use crate::error::{Error, Result};
use crate::grid::OrientedRect;
use rayon::prelude::*;
use std::cmp::Ordering;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CertKind {
    Frostman,
    Kt,
    RectKt,
}

/// Where the extremal ratio was attained. Radii and centres are in δ units
/// except for rectangles, which use the δ/2 units of [`OrientedRect`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Witness {
    /// Half-open window [center − radius, center + radius).
    Window { center: i64, radius: i64 },
    /// Half-open box [x−R, x+R) × [y−R, y+R).
    Box { center: (i64, i64), radius: i64 },
    Rect(OrientedRect),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegularityCertificate {
    pub kind: CertKind,
    pub exponent: f64,
    /// Largest ratio found over the witness family.
    pub constant: f64,
    pub witness: Witness,
    /// Points inside the witness.
    pub count: usize,
    /// The witness family is a net: the true supremum is at most this
    /// factor above `constant`.
    pub net_factor: f64,
}

impl RegularityCertificate {
    /// Re-evaluate the ratio at the stored witness.
    pub fn recompute_1d(&self, a: &DiscreteSet1D) -> Option<f64> {
        let Witness::Window { center, radius } = self.witness else {
            return None;
        };
        let count = a.count_in(center - radius, center + radius) as f64;
        let k = radius.trailing_zeros() as f64;
        Some(match self.kind {
            CertKind::Kt => count / (k * self.exponent).exp2(),
            CertKind::Frostman => count / (((k - a.m() as f64) * self.exponent).exp2() * a.len() as f64),
            CertKind::RectKt => return None,
        })
    }

    pub fn recompute_2d(&self, p: &DiscreteSet2D) -> Option<f64> {
        match self.witness {
            Witness::Box { center, radius } => {
                let count = p
                    .points()
                    .iter()
                    .filter(|&&(x, y)| {
                        x >= center.0 - radius && x < center.0 + radius && y >= center.1 - radius && y < center.1 + radius
                    })
                    .count() as f64;
                Some(count / (radius.trailing_zeros() as f64 * self.exponent).exp2())
            }
            Witness::Rect(r) => {
                let count = crate::grid::count_in_rect(p.points(), &r) as f64;
                let bits = (r.half_long2.trailing_zeros() + r.half_short2.trailing_zeros()) as f64;
                Some(count / (bits * self.exponent / 2.0).exp2())
            }
            Witness::Window { .. } => None,
        }
    }
}

#[derive(Clone, Copy)]
struct Best {
    ratio: f64,
    k: u32,
    center: (i64, i64),
    count: usize,
}

fn better(a: Best, b: Best) -> Best {
    match a.ratio.partial_cmp(&b.ratio).unwrap_or(Ordering::Equal) {
        Ordering::Greater => a,
        Ordering::Less => b,
        Ordering::Equal => {
            if (a.k, a.center) <= (b.k, b.center) {
                a
            } else {
                b
            }
        }
    }
}

/// Windows [x − 2^k, x + 2^k) centred at the points, k = 0..=m.
fn scan_1d(values: &[i64], m: u32, weight: impl Fn(u32, usize) -> f64 + Sync) -> Best {
    let start = Best {
        ratio: f64::NEG_INFINITY,
        k: 0,
        center: (0, 0),
        count: 0,
    };
    values
        .par_iter()
        .map(|&x| {
            let mut best = start;
            for k in 0..=m {
                let r = 1i64 << k;
                let lo = values.partition_point(|&v| v < x - r);
                let hi = values.partition_point(|&v| v < x + r);
                let cand = Best {
                    ratio: weight(k, hi - lo),
                    k,
                    center: (x, 0),
                    count: hi - lo,
                };
                best = better(best, cand);
            }
            best
        })
        .reduce(|| start, better)
}

fn cert_1d(kind: CertKind, s: f64, b: Best) -> RegularityCertificate {
    RegularityCertificate {
        kind,
        exponent: s,
        constant: b.ratio,
        witness: Witness::Window {
            center: b.center.0,
            radius: 1i64 << b.k,
        },
        count: b.count,
        net_factor: 2.0,
    }
}

/// C = max over point-centred dyadic windows of N(A∩B(x,r)) / (r/δ)^s.
pub fn validate_kt(a: &DiscreteSet1D, s: f64) -> Result<RegularityCertificate> {
    if a.is_empty() {
        return Err(Error::EmptySet);
    }
    let b = scan_1d(a.values(), a.m(), |k, c| c as f64 / (k as f64 * s).exp2());
    Ok(cert_1d(CertKind::Kt, s, b))
}

/// C = max over point-centred dyadic windows of N(A∩B(x,r)) / (r^s·#A).
pub fn validate_frostman(a: &DiscreteSet1D, s: f64) -> Result<RegularityCertificate> {
    if a.is_empty() {
        return Err(Error::EmptySet);
    }
    let m = a.m();
    let total = a.len() as f64;
    let b = scan_1d(a.values(), m, |k, c| c as f64 / (((k as f64) - m as f64) * s).exp2() / total);
    Ok(cert_1d(CertKind::Frostman, s, b))
}

/// KT constant of a sorted multiset of indices (repeated values all count).
pub fn kt_constant_multiset(sorted: &[i64], m: u32, s: f64) -> f64 {
    if sorted.is_empty() {
        return 0.0;
    }
    debug_assert!(sorted.windows(2).all(|w| w[0] <= w[1]));
    let mut best = 0.0f64;
    for (idx, &x) in sorted.iter().enumerate() {
        if idx > 0 && sorted[idx - 1] == x {
            continue;
        }
        for k in 0..=m {
            let r = 1i64 << k;
            let lo = sorted.partition_point(|&v| v < x - r);
            let hi = sorted.partition_point(|&v| v < x + r);
            best = best.max((hi - lo) as f64 / (k as f64 * s).exp2());
        }
    }
    best
}

struct Fenwick(Vec<u32>);

impl Fenwick {
    fn add(&mut self, mut i: usize) {
        i += 1;
        while i < self.0.len() {
            self.0[i] += 1;
            i += i & i.wrapping_neg();
        }
    }
    fn prefix(&self, mut i: usize) -> u32 {
        let mut s = 0;
        while i > 0 {
            s += self.0[i];
            i -= i & i.wrapping_neg();
        }
        s
    }
}

/// Counts of every point-centred box [x−2^k, x+2^k)², k = 0..=m, by one
/// offline sweep: count = F(x₂,y₂) − F(x₁,y₂) − F(x₂,y₁) + F(x₁,y₁) with
/// F(x,y) = #{q : q.x < x, q.y < y}.
fn box_counts(points: &[(i64, i64)], m: u32) -> Vec<Vec<u32>> {
    let n = points.len();
    let levels = m as usize + 1;
    let mut ys: Vec<i64> = points.iter().map(|p| p.1).collect();
    ys.sort_unstable();
    let mut by_x: Vec<(i64, i64)> = points.to_vec();
    by_x.sort_unstable();
    // (x, y, sign, point, level)
    let mut queries: Vec<(i64, i64, i8, u32, u8)> = Vec::with_capacity(4 * n * levels);
    for (pi, &(x, y)) in points.iter().enumerate() {
        for k in 0..levels {
            let r = 1i64 << k;
            queries.push((x + r, y + r, 1, pi as u32, k as u8));
            queries.push((x - r, y + r, -1, pi as u32, k as u8));
            queries.push((x + r, y - r, -1, pi as u32, k as u8));
            queries.push((x - r, y - r, 1, pi as u32, k as u8));
        }
    }
    queries.sort_unstable_by_key(|q| q.0);
    let mut fw = Fenwick(vec![0; n + 1]);
    let mut acc = vec![vec![0i64; levels]; n];
    let mut next = 0;
    for &(qx, qy, sign, pi, k) in &queries {
        while next < n && by_x[next].0 < qx {
            let yi = ys.partition_point(|&y| y < by_x[next].1);
            fw.add(yi);
            next += 1;
        }
        let below = fw.prefix(ys.partition_point(|&y| y < qy)) as i64;
        acc[pi as usize][k as usize] += sign as i64 * below;
    }
    acc.into_iter()
        .map(|row| row.into_iter().map(|c| c as u32).collect())
        .collect()
}

/// Two-dimensional KT constant with point-centred dyadic boxes.
pub fn validate_kt_2d(p: &DiscreteSet2D, s: f64) -> Result<RegularityCertificate> {
    if p.is_empty() {
        return Err(Error::EmptySet);
    }
    let b = kt_2d_points(p.points(), p.m(), s);
    Ok(RegularityCertificate {
        kind: CertKind::Kt,
        exponent: s,
        constant: b.ratio,
        witness: Witness::Box {
            center: b.center,
            radius: 1i64 << b.k,
        },
        count: b.count,
        net_factor: 4.0,
    })
}

pub(crate) fn kt_2d_constant(points: &[(i64, i64)], m: u32, s: f64) -> f64 {
    if points.is_empty() {
        return 0.0;
    }
    kt_2d_points(points, m, s).ratio
}

fn kt_2d_points(points: &[(i64, i64)], m: u32, s: f64) -> Best {
    let counts = box_counts(points, m);
    let mut best = Best {
        ratio: f64::NEG_INFINITY,
        k: 0,
        center: (0, 0),
        count: 0,
    };
    for (pi, row) in counts.iter().enumerate() {
        for (k, &c) in row.iter().enumerate() {
            best = better(
                best,
                Best {
                    ratio: c as f64 / (k as f64 * s).exp2(),
                    k: k as u32,
                    center: points[pi],
                    count: c as usize,
                },
            );
        }
    }
    best
}

const DIR_LEN: f64 = (1u64 << 20) as f64;

fn direction_net(count: usize) -> Vec<(i64, i64)> {
    (0..count)
        .map(|i| {
            let th = std::f64::consts::PI * i as f64 / count as f64;
            ((DIR_LEN * th.cos()).round() as i64, (DIR_LEN * th.sin()).round() as i64)
        })
        .collect()
}

/// Rectangular KT constant: rectangles of dimensions (2^a δ, 2^b δ), a ≤ b ≤ m,
/// centred at the points, with 4·2^{b−a} directions (capped at 4·2^m).
pub fn validate_rect_kt(p: &DiscreteSet2D, u: f64) -> Result<RegularityCertificate> {
    if p.is_empty() {
        return Err(Error::EmptySet);
    }
    let m = p.m();
    let pts = p.points();
    let mut pairs = Vec::new();
    for b in 0..=m {
        for a in 0..=b {
            let dirs = (4usize << (b - a)).min(4usize << m);
            pairs.push((a, b, direction_net(dirs)));
        }
    }
    let start = (f64::NEG_INFINITY, 0usize, None::<OrientedRect>);
    let pick = |x: (f64, usize, Option<OrientedRect>), y: (f64, usize, Option<OrientedRect>)| {
        if y.0 > x.0 {
            y
        } else {
            x
        }
    };
    let best = pts
        .par_iter()
        .map(|&(i, j)| {
            let c = (2 * i + 1, 2 * j + 1);
            let mut best = start;
            for (a, b, dirs) in &pairs {
                let denom = ((a + b) as f64 * u / 2.0).exp2();
                for &d in dirs {
                    let rect = OrientedRect {
                        center2: c,
                        dir: d,
                        half_long2: 1i64 << b,
                        half_short2: 1i64 << a,
                    };
                    let count = crate::grid::count_in_rect(pts, &rect);
                    best = pick(best, (count as f64 / denom, count, Some(rect)));
                }
            }
            best
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(start, pick);
    Ok(RegularityCertificate {
        kind: CertKind::RectKt,
        exponent: u,
        constant: best.0,
        witness: Witness::Rect(best.2.expect("nonempty scan")),
        count: best.1,
        net_factor: 4.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Scale;

    fn set(m: u32, v: Vec<i64>) -> DiscreteSet1D {
        DiscreteSet1D::new(Scale::new(m).unwrap(), v, "t")
    }

    #[test]
    fn full_grid_constants() {
        let a = set(7, (0..128).collect());
        assert!(validate_kt(&a, 1.0).unwrap().constant <= 2.0);
        assert!(validate_frostman(&a, 1.0).unwrap().constant <= 2.0);
    }

    #[test]
    fn single_point_constants() {
        let a = set(6, vec![17]);
        assert_eq!(validate_kt(&a, 0.4).unwrap().constant, 1.0);
        let f = validate_frostman(&a, 0.5).unwrap();
        assert!((f.constant - 8.0).abs() < 1e-12);
    }

    #[test]
    fn witness_reproduces_constant() {
        let a = set(6, vec![1, 2, 3, 9, 40, 41, 63]);
        for s in [0.3, 0.7] {
            let c = validate_kt(&a, s).unwrap();
            assert_eq!(c.recompute_1d(&a).unwrap(), c.constant);
            let f = validate_frostman(&a, s).unwrap();
            assert!((f.recompute_1d(&a).unwrap() - f.constant).abs() < 1e-12);
        }
    }

    #[test]
    fn box_counts_match_scan() {
        let pts = vec![(0, 0), (1, 1), (2, 5), (5, 5), (7, 0), (3, 3), (6, 6)];
        let counts = box_counts(&pts, 3);
        for (pi, &(x, y)) in pts.iter().enumerate() {
            for k in 0..=3 {
                let r = 1i64 << k;
                let direct = pts
                    .iter()
                    .filter(|&&(a, b)| a >= x - r && a < x + r && b >= y - r && b < y + r)
                    .count();
                assert_eq!(counts[pi][k] as usize, direct);
            }
        }
    }

    #[test]
    fn multiset_counts_repeats() {
        assert_eq!(kt_constant_multiset(&[4, 4, 4], 3, 0.5), 3.0);
    }
}
