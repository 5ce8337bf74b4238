use super::{validate_kt, DiscreteSet1D};
use crate::error::{Error, Result};
use crate::grid::{Axis, Scale, Tube};
use std::collections::BTreeMap;

/// A finite family of canonical tubes with its quasi-product certificates.
///
/// Directions are grouped by (axis class, slope); K₁ is the largest KT
/// constant of the slope set within one axis class and K₂ the largest KT
/// constant of an offset set within one direction.
#[derive(Debug, Clone, PartialEq)]
pub struct TubeFamily {
    pub scale: Scale,
    pub tubes: Vec<Tube>,
    pub s: f64,
    pub d: f64,
    pub k1: f64,
    pub k2: f64,
}

impl TubeFamily {
    /// Deduplicates, sorts, and certifies at exponents (s, d).
    pub fn certify(scale: Scale, mut tubes: Vec<Tube>, s: f64, d: f64) -> Result<Self> {
        if tubes.iter().any(|t| t.m != scale.m()) {
            return Err(Error::Precondition("tube at a foreign scale".into()));
        }
        tubes.sort_unstable();
        tubes.dedup();
        let mut fam = TubeFamily {
            scale,
            tubes,
            s,
            d,
            k1: 0.0,
            k2: 0.0,
        };
        let (k1, k2) = fam.certificates()?;
        fam.k1 = k1;
        fam.k2 = k2;
        Ok(fam)
    }

    pub fn len(&self) -> usize {
        self.tubes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tubes.is_empty()
    }

    /// (axis, slope) → sorted intercepts.
    pub fn offsets_by_direction(&self) -> BTreeMap<(Axis, i64), Vec<i64>> {
        let mut map: BTreeMap<(Axis, i64), Vec<i64>> = BTreeMap::new();
        for t in &self.tubes {
            map.entry((t.axis, t.slope)).or_default().push(t.intercept);
        }
        map
    }

    /// Slope sets per axis class.
    pub fn directions(&self) -> BTreeMap<Axis, Vec<i64>> {
        let mut map: BTreeMap<Axis, Vec<i64>> = BTreeMap::new();
        for (axis, slope) in self.offsets_by_direction().keys() {
            map.entry(*axis).or_default().push(*slope);
        }
        map
    }

    fn certificates(&self) -> Result<(f64, f64)> {
        if self.tubes.is_empty() {
            return Ok((0.0, 0.0));
        }
        let mut k1 = 0.0f64;
        for slopes in self.directions().values() {
            let set = DiscreteSet1D::new(self.scale, slopes.clone(), "directions");
            k1 = k1.max(validate_kt(&set, self.s)?.constant);
        }
        let mut k2 = 0.0f64;
        for offs in self.offsets_by_direction().values() {
            let set = DiscreteSet1D::new(self.scale, offs.clone(), "offsets");
            k2 = k2.max(validate_kt(&set, self.d)?.constant);
        }
        Ok((k1, k2))
    }
}

/// Tubes {dep = (λ/n)·prim + c/n : λ ∈ Λ, c ∈ offsets[λ]} of one axis class,
/// certified at (s, d). `offsets[i]` belongs to the i-th slope of Λ.
pub fn quasi_product_family(
    axis: Axis,
    directions: &DiscreteSet1D,
    offsets: &[DiscreteSet1D],
    s: f64,
    d: f64,
) -> Result<TubeFamily> {
    if offsets.len() != directions.len() {
        return Err(Error::Precondition(format!(
            "{} offset sets for {} directions",
            offsets.len(),
            directions.len()
        )));
    }
    let scale = directions.scale;
    let mut tubes = Vec::new();
    for (&k, offs) in directions.values().iter().zip(offsets) {
        if offs.scale != scale {
            return Err(Error::ScaleMismatch(offs.m(), scale.m()));
        }
        for &c in offs.values() {
            tubes.push(Tube::new(axis, k, c, scale)?);
        }
    }
    TubeFamily::certify(scale, tubes, s, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_tube_constants() {
        let sc = Scale::new(5).unwrap();
        let dirs = DiscreteSet1D::new(sc, vec![3], "l");
        let offs = vec![DiscreteSet1D::new(sc, vec![7], "o")];
        let f = quasi_product_family(Axis::X, &dirs, &offs, 0.5, 0.5).unwrap();
        assert_eq!((f.k1, f.k2, f.len()), (1.0, 1.0, 1));
    }

    #[test]
    fn full_family_constants() {
        let sc = Scale::new(5).unwrap();
        let dirs = DiscreteSet1D::new(sc, (0..32).collect(), "all");
        let offs: Vec<_> = (0..32).map(|_| DiscreteSet1D::new(sc, (0..32).collect(), "all")).collect();
        let f = quasi_product_family(Axis::X, &dirs, &offs, 1.0, 1.0).unwrap();
        assert!(f.k1 <= 2.0 && f.k2 <= 2.0);
        assert_eq!(f.len(), 1024);
    }
}
