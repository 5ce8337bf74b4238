use super::heavy::{heavy_profile, square_counts};
use super::shading::{sigma_of, Shading};
use super::two_ends::two_ends_check;
use crate::error::{Error, Result};
use crate::sets::TubeFamily;

/// Exponents and constants of the quasi-product incidence bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundParameters {
    pub s: f64,
    pub d: f64,
    pub sigma: f64,
    pub alpha: f64,
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
}

impl BoundParameters {
    pub fn new(s: f64, d: f64, k1: f64, k2: f64, k3: f64) -> Result<Self> {
        if !(s > 0.0 && s <= 1.0) {
            return Err(Error::ExponentOutOfRange(s));
        }
        if !(0.0..=1.0).contains(&d) {
            return Err(Error::ExponentOutOfRange(d));
        }
        Ok(BoundParameters {
            s,
            d,
            sigma: sigma_of(s, d),
            alpha: (2.0 + d / s).min(3.0),
            k1,
            k2,
            k3,
        })
    }

    /// Constants taken from the family and shading certificates.
    pub fn from_certificates(family: &TubeFamily, shading: &Shading) -> Result<Self> {
        Self::new(family.s, family.d, family.k1, family.k2, shading.k3)
    }

    /// σ and α agree with (s, d).
    pub fn consistent(&self) -> bool {
        let fresh = (sigma_of(self.s, self.d), (2.0 + self.d / self.s).min(3.0));
        (fresh.0 - self.sigma).abs() < 1e-12 && (fresh.1 - self.alpha).abs() < 1e-12
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IncidenceReport {
    pub m: u32,
    pub s: f64,
    pub d: f64,
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    /// Σ_T #Y(T).
    pub lhs: u64,
    pub rhs: f64,
    pub ratio: f64,
    pub tubes: usize,
    /// #Y(𝕋).
    pub distinct: u64,
    /// (r, #squares in the shadings of between r and 2r − 1 tubes).
    pub heavy: Vec<(u32, u64)>,
    pub two_ends: Option<bool>,
}

impl IncidenceReport {
    pub const CSV_HEADER: &'static str = "m,s,d,K1,K2,K3,lhs,rhs,ratio";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.m, self.s, self.d, self.k1, self.k2, self.k3, self.lhs, self.rhs, self.ratio
        )
    }
}

fn check_rows(family: &TubeFamily, shading: &Shading) -> Result<()> {
    if shading.per_tube.len() != family.len() || shading.scale != family.scale {
        return Err(Error::Precondition("shading does not belong to this family".into()));
    }
    Ok(())
}

/// Σ#Y(T) against K₃^{1/3}(K₁K₂)^{1−1/α}(δ^{−s−d}#𝕋)^{1/α}#Y(𝕋)^{1−1/α}, with
/// the implied constant set to 1.
pub fn verify_main_theorem(family: &TubeFamily, shading: &Shading, params: &BoundParameters) -> Result<IncidenceReport> {
    check_rows(family, shading)?;
    if !params.consistent() {
        return Err(Error::Precondition("σ or α do not match (s, d)".into()));
    }
    let counts = square_counts(&shading.per_tube, shading.scale);
    let lhs = shading.total();
    let distinct = counts.len() as u64;
    let m = family.scale.m();
    let a = params.alpha;
    let inv_delta = family.scale.n() as f64;
    let rhs = params.k3.cbrt()
        * (params.k1 * params.k2).powf(1.0 - 1.0 / a)
        * (inv_delta.powf(params.s + params.d) * family.len() as f64).powf(1.0 / a)
        * (distinct as f64).powf(1.0 - 1.0 / a);
    Ok(IncidenceReport {
        m,
        s: params.s,
        d: params.d,
        k1: params.k1,
        k2: params.k2,
        k3: params.k3,
        lhs,
        rhs,
        ratio: lhs as f64 / rhs,
        tubes: family.len(),
        distinct,
        heavy: heavy_profile(&counts),
        two_ends: None,
    })
}

/// Two-ends inputs of the general bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoEndsParams {
    /// The tubes form a (δ, t, K₁)-KT set.
    pub t: f64,
    pub k1: f64,
    /// Y(T) are (δ, σ, K₂)-KT sets.
    pub k2: f64,
    /// Typical #Y(T).
    pub size: f64,
    pub eps1: f64,
    pub eps2: f64,
}

/// N^{1/2}δ^{t/2}Σ#Y(T) against K₁K₂^{1/2}#Y(𝕋). Reported with `rhs` divided
/// by N^{1/2}δ^{t/2} so that ratio = lhs/rhs. A shading that fails the
/// two-ends test is reported, not rejected.
pub fn verify_tww(family: &TubeFamily, shading: &Shading, p: &TwoEndsParams) -> Result<IncidenceReport> {
    check_rows(family, shading)?;
    let counts = square_counts(&shading.per_tube, shading.scale);
    let lhs = shading.total();
    let distinct = counts.len() as u64;
    let mut two_ends = true;
    for (t, row) in family.tubes.iter().zip(&shading.per_tube) {
        if !two_ends_check(t, row, p.eps1, p.eps2)? {
            two_ends = false;
            break;
        }
    }
    let delta = family.scale.delta();
    let rhs = p.k1 * p.k2.sqrt() * distinct as f64 / (p.size.sqrt() * delta.powf(p.t / 2.0));
    Ok(IncidenceReport {
        m: family.scale.m(),
        s: family.s,
        d: family.d,
        k1: p.k1,
        k2: p.k2,
        k3: shading.k3,
        lhs,
        rhs,
        ratio: lhs as f64 / rhs,
        tubes: family.len(),
        distinct,
        heavy: heavy_profile(&counts),
        two_ends: Some(two_ends),
    })
}
