use crate::error::{Error, Result};
use crate::grid::{incident_unchecked, rasterize, Axis, GridSquare, Scale};
use crate::sets::{kt_constant_multiset, TubeFamily};
use rayon::prelude::*;
use std::collections::{HashMap, HashSet};

/// Y(T) for every tube of a family, indexed like `family.tubes`.
#[derive(Debug, Clone, PartialEq)]
pub struct Shading {
    pub scale: Scale,
    pub per_tube: Vec<Vec<GridSquare>>,
    /// Exponent at which K₃ is certified.
    pub sigma: f64,
    /// max over tubes of the KT constant of Y(T) at exponent σ.
    pub k3: f64,
    pub two_ends: Option<(f64, f64)>,
}

pub fn sigma_of(s: f64, d: f64) -> f64 {
    (s + d).min(2.0 - s - d)
}

pub(crate) fn kt_of_squares(sq: &[GridSquare], m: u32, sigma: f64) -> f64 {
    let pts: Vec<(i64, i64)> = sq.iter().map(|p| (p.i as i64, p.j as i64)).collect();
    crate::sets::validate::kt_2d_constant(&pts, m, sigma)
}

impl Shading {
    /// Builds and certifies a shading; every square must be incident to its tube.
    pub fn new(family: &TubeFamily, mut per_tube: Vec<Vec<GridSquare>>, sigma: f64) -> Result<Self> {
        if per_tube.len() != family.len() {
            return Err(Error::Precondition(format!(
                "{} shading rows for {} tubes",
                per_tube.len(),
                family.len()
            )));
        }
        let m = family.scale.m();
        for (t, row) in family.tubes.iter().zip(per_tube.iter_mut()) {
            row.sort_unstable();
            row.dedup();
            if let Some(bad) = row.iter().find(|p| p.m != m || !incident_unchecked(**p, t)) {
                return Err(Error::Precondition(format!("square {bad:?} is not incident to {t:?}")));
            }
        }
        let k3 = per_tube
            .par_iter()
            .map(|row| kt_of_squares(row, m, sigma))
            .reduce(|| 0.0, f64::max);
        Ok(Shading {
            scale: family.scale,
            per_tube,
            sigma,
            k3,
            two_ends: None,
        })
    }

    pub fn total(&self) -> u64 {
        self.per_tube.iter().map(|r| r.len() as u64).sum()
    }

    /// Y(𝕋): the distinct shaded squares.
    pub fn union(&self) -> HashSet<GridSquare> {
        self.per_tube.iter().flatten().copied().collect()
    }

    /// Number of tubes whose shading contains each shaded square.
    pub fn multiplicities(&self) -> HashMap<GridSquare, u32> {
        let mut map = HashMap::new();
        for row in &self.per_tube {
            for &p in row {
                *map.entry(p).or_insert(0) += 1;
            }
        }
        map
    }
}

/// Y(T) = every incident square.
pub fn full_shading(family: &TubeFamily) -> Shading {
    let rows: Vec<Vec<GridSquare>> = family.tubes.par_iter().map(rasterize).collect();
    let m = family.scale.m();
    let sigma = sigma_of(family.s, family.d);
    let k3 = rows
        .par_iter()
        .map(|row| kt_of_squares(row, m, sigma))
        .reduce(|| 0.0, f64::max);
    Shading {
        scale: family.scale,
        per_tube: rows,
        sigma,
        k3,
        two_ends: None,
    }
}

/// Y(T) ∩ 𝒬 for every tube, re-certified.
pub fn restrict_shading(shading: &Shading, keep: &HashSet<GridSquare>) -> Shading {
    let rows: Vec<Vec<GridSquare>> = shading
        .per_tube
        .iter()
        .map(|r| r.iter().copied().filter(|p| keep.contains(p)).collect())
        .collect();
    let m = shading.scale.m();
    let k3 = rows
        .par_iter()
        .map(|row| kt_of_squares(row, m, shading.sigma))
        .reduce(|| 0.0, f64::max);
    Shading {
        scale: shading.scale,
        per_tube: rows,
        sigma: shading.sigma,
        k3,
        two_ends: shading.two_ends,
    }
}

/// Y′(p) = indices of the tubes incident to p, for every p in `squares`,
/// with the KT constant of each slope multiset at exponent σ (largest over
/// the two axis classes).
#[derive(Debug, Clone, PartialEq)]
pub struct DualShading {
    pub squares: Vec<GridSquare>,
    pub tubes: Vec<Vec<usize>>,
    pub sigma: f64,
    pub constant: f64,
}

impl DualShading {
    pub fn total(&self) -> u64 {
        self.tubes.iter().map(|t| t.len() as u64).sum()
    }
}

pub fn dual_shading(family: &TubeFamily, squares: &[GridSquare], sigma: f64) -> DualShading {
    let index: HashMap<GridSquare, usize> = squares.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let hits: Vec<(usize, usize)> = family
        .tubes
        .par_iter()
        .enumerate()
        .flat_map_iter(|(ti, t)| {
            rasterize(t)
                .into_iter()
                .filter_map(|p| index.get(&p).map(|&pi| (pi, ti)))
                .collect::<Vec<_>>()
        })
        .collect();
    let mut tubes = vec![Vec::new(); squares.len()];
    for (pi, ti) in hits {
        tubes[pi].push(ti);
    }
    for t in &mut tubes {
        t.sort_unstable();
    }
    let m = family.scale.m();
    let constant = tubes
        .par_iter()
        .map(|ts| {
            let mut best = 0.0f64;
            for axis in [Axis::X, Axis::Y] {
                let mut slopes: Vec<i64> = ts
                    .iter()
                    .map(|&i| family.tubes[i])
                    .filter(|t| t.axis == axis)
                    .map(|t| t.slope)
                    .collect();
                slopes.sort_unstable();
                best = best.max(kt_constant_multiset(&slopes, m, sigma));
            }
            best
        })
        .reduce(|| 0.0, f64::max);
    DualShading {
        squares: squares.to_vec(),
        tubes,
        sigma,
        constant,
    }
}
