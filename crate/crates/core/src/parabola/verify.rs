use super::energy::{energy3_oracle, EnergyResult};
use super::ParabolaSet;
use crate::error::Result;
use crate::grid::GridSquare;
use crate::incidence::{dual_shading, IncidenceReport};
use crate::sets::{validate_rect_kt, DiscreteSet2D, TubeFamily};

/// Energy against δ^{-s}(#S₁#S₂#S₃)^{5/6}.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyReport {
    pub result: EnergyResult,
    pub s: f64,
    pub rhs: f64,
    pub ratio: f64,
}

impl EnergyReport {
    pub const CSV_HEADER: &'static str = "m,s,method,c_tol,count,rhs,ratio";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.result.m,
            self.s,
            self.result.method.name(),
            self.result.c_tol,
            self.result.count,
            self.rhs,
            self.ratio
        )
    }
}

pub fn verify_trilinear_energy(sets: &[ParabolaSet; 3], s: f64, c_tol: i64) -> Result<EnergyReport> {
    let result = energy3_oracle(sets, c_tol)?;
    let product: f64 = sets.iter().map(|x| x.len() as f64).product();
    let rhs = (result.m as f64 * s).exp2() * product.powf(5.0 / 6.0);
    Ok(EnergyReport {
        result,
        s,
        rhs,
        ratio: result.count as f64 / rhs,
    })
}

/// I(𝕋, ℙ) = Σ_p #Y′(p) against δ^{-2s/3}(#𝕋)^{2/3}(#ℙ)^{1/3}.
///
/// In the report K₁ is the rectangular KT constant of ℙ at exponent 2s,
/// K₂ the largest KT constant of a dual shading at σ = min(2s, 2 − 2s), K₃
/// is unused and set to 1, and d carries σ.
pub fn verify_rect_theorem(tubes: &TubeFamily, squares: &DiscreteSet2D, s: f64) -> Result<IncidenceReport> {
    let m = tubes.scale.m();
    let sigma = (2.0 * s).min(2.0 - 2.0 * s);
    let rhs = (m as f64 * 2.0 * s / 3.0).exp2()
        * (tubes.len() as f64).powf(2.0 / 3.0)
        * (squares.len() as f64).powf(1.0 / 3.0);
    if squares.is_empty() {
        return Ok(IncidenceReport {
            m,
            s,
            d: sigma,
            k1: 0.0,
            k2: 0.0,
            k3: 1.0,
            lhs: 0,
            rhs,
            ratio: 0.0,
            tubes: tubes.len(),
            distinct: 0,
            heavy: Vec::new(),
            two_ends: None,
        });
    }
    let rect = validate_rect_kt(squares, 2.0 * s)?;
    let grid: Vec<GridSquare> = squares
        .points()
        .iter()
        .map(|&(i, j)| GridSquare::new(i, j, tubes.scale))
        .collect::<Result<_>>()?;
    let dual = dual_shading(tubes, &grid, sigma);
    let lhs = dual.total();
    let mut heavy = Vec::new();
    let top = dual.tubes.iter().map(Vec::len).max().unwrap_or(0) as u64;
    let mut r = 1u64;
    while r <= top {
        let k = dual.tubes.iter().filter(|t| (t.len() as u64) >= r && (t.len() as u64) < 2 * r).count();
        heavy.push((r as u32, k as u64));
        r *= 2;
    }
    Ok(IncidenceReport {
        m,
        s,
        d: sigma,
        k1: rect.constant,
        k2: dual.constant,
        k3: 1.0,
        lhs,
        rhs,
        ratio: if rhs > 0.0 { lhs as f64 / rhs } else { 0.0 },
        tubes: tubes.len(),
        distinct: dual.tubes.iter().filter(|t| !t.is_empty()).count() as u64,
        heavy,
        two_ends: None,
    })
}
