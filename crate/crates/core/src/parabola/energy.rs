use super::ParabolaSet;
use crate::error::{Error, Result};
use rayon::prelude::*;
use std::collections::HashMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnergyMethod {
    BinningOracle,
    Exhaustive,
    /// Σ_T (#squares met by T)² over the chord instance.
    IncidenceReformulation,
    /// The same sum over the instance straightened by (x, y) ↦ (x, x² + y).
    PsiReformulation,
}

impl EnergyMethod {
    pub fn name(self) -> &'static str {
        match self {
            EnergyMethod::BinningOracle => "binning",
            EnergyMethod::Exhaustive => "exhaustive",
            EnergyMethod::IncidenceReformulation => "incidence",
            EnergyMethod::PsiReformulation => "psi",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnergyResult {
    pub m: u32,
    pub method: EnergyMethod,
    /// Two triple sums are close when they differ by at most c_tol·δ in
    /// each coordinate.
    pub c_tol: i64,
    pub count: u128,
}

fn check_scales(sets: &[ParabolaSet; 3]) -> Result<u32> {
    let m = sets[0].m();
    for s in &sets[1..] {
        if s.m() != m {
            return Err(Error::ScaleMismatch(m, s.m()));
        }
    }
    Ok(m)
}

fn check_tolerance(c_tol: i64, m: u32) -> Result<i64> {
    if c_tol < 1 {
        return Err(Error::Precondition(format!("tolerance constant {c_tol} must be at least 1")));
    }
    // the second coordinate is compared in δ² units
    c_tol
        .checked_mul(1i64 << m)
        .ok_or_else(|| Error::Precondition(format!("tolerance constant {c_tol} too large")))
}

/// Multiplicity of every triple sum (Σv, Σv²), in units of (δ, δ²).
pub fn triple_sums(sets: &[ParabolaSet; 3]) -> Result<HashMap<(i64, i64), u64>> {
    check_scales(sets)?;
    let [a, b, c] = sets;
    Ok(a
        .values()
        .par_iter()
        .fold(HashMap::new, |mut acc: HashMap<(i64, i64), u64>, &x| {
            for &y in b.values() {
                for &z in c.values() {
                    *acc.entry((x + y + z, x * x + y * y + z * z)).or_default() += 1;
                }
            }
            acc
        })
        .reduce(HashMap::new, |mut l, r| {
            for (k, v) in r {
                *l.entry(k).or_default() += v;
            }
            l
        }))
}

/// Pairs of triples (t, t′) ∈ (S₁×S₂×S₃)² whose sums differ by at most
/// c_tol·δ in both coordinates. Triple sums are binned into cells of that
/// side, so each sum only meets the 3×3 block of cells around its own.
pub fn energy3_oracle(sets: &[ParabolaSet; 3], c_tol: i64) -> Result<EnergyResult> {
    let m = check_scales(sets)?;
    let tol_y = check_tolerance(c_tol, m)?;
    let sums: Vec<((i64, i64), u64)> = triple_sums(sets)?.into_iter().collect();
    let mut cells: HashMap<(i64, i64), Vec<((i64, i64), u64)>> = HashMap::new();
    for &(k, w) in &sums {
        cells
            .entry((k.0.div_euclid(c_tol), k.1.div_euclid(tol_y)))
            .or_default()
            .push((k, w));
    }
    let count = sums
        .par_iter()
        .map(|&((x, y), w)| {
            let (cx, cy) = (x.div_euclid(c_tol), y.div_euclid(tol_y));
            let mut acc = 0u128;
            for dx in -1..=1 {
                for dy in -1..=1 {
                    let Some(cell) = cells.get(&(cx + dx, cy + dy)) else {
                        continue;
                    };
                    for &((x2, y2), w2) in cell {
                        if (x - x2).abs() <= c_tol && (y - y2).abs() <= tol_y {
                            acc += w as u128 * w2 as u128;
                        }
                    }
                }
            }
            acc
        })
        .sum();
    Ok(EnergyResult {
        m,
        method: EnergyMethod::BinningOracle,
        c_tol,
        count,
    })
}

/// Direct enumeration over all six-tuples of lifted points.
pub fn energy3_exhaustive(sets: &[ParabolaSet; 3], c_tol: i64) -> Result<EnergyResult> {
    let m = check_scales(sets)?;
    let tol_y = check_tolerance(c_tol, m)?;
    let [a, b, c] = [sets[0].lift(), sets[1].lift(), sets[2].lift()];
    let mut count = 0u128;
    for p1 in &a {
        for p2 in &b {
            for p3 in &c {
                for q1 in &a {
                    for q2 in &b {
                        for q3 in &c {
                            let dx = p1.0 + p2.0 + p3.0 - q1.0 - q2.0 - q3.0;
                            let dy = p1.1 + p2.1 + p3.1 - q1.1 - q2.1 - q3.1;
                            if dx.abs() <= c_tol && dy.abs() <= tol_y {
                                count += 1;
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(EnergyResult {
        m,
        method: EnergyMethod::Exhaustive,
        c_tol,
        count,
    })
}
