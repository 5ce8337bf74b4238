//! Six-fold energies of sets on the parabola y = x², the circle and chord
//! transforms that turn them into incidence problems, and checks of the
//! trilinear energy and rectangular incidence bounds.

mod circle;
mod energy;
mod instance;
mod verify;

pub use circle::{circle_to_segment, disk_map, triple_to_circle, CircleDatum};
pub use energy::{energy3_exhaustive, energy3_oracle, triple_sums, EnergyMethod, EnergyResult};
pub use instance::{build_incidence_instance, psi_transform_instance, ParabolaInstance, PsiInstance};
pub use verify::{verify_rect_theorem, verify_trilinear_energy, EnergyReport};

use crate::error::{Error, Result};
use crate::grid::Scale;
use crate::sets::{cantor_set, DiscreteSet1D, Mode};
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Points (x, x²) of the parabola over a δ-separated set of abscissae in [−1, 1].
///
/// The base value v stands for x = vδ, so the lift is (v, v²) in units of
/// (δ, δ²) and stays exact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParabolaSet {
    pub base: DiscreteSet1D,
}

impl ParabolaSet {
    pub fn new(base: DiscreteSet1D) -> Result<Self> {
        let n = base.scale.n();
        if base.values().iter().any(|v| v.abs() > n) {
            return Err(Error::Precondition("abscissae must lie in [-1, 1]".into()));
        }
        Ok(ParabolaSet { base })
    }

    pub fn scale(&self) -> Scale {
        self.base.scale
    }

    pub fn m(&self) -> u32 {
        self.base.m()
    }

    pub fn len(&self) -> usize {
        self.base.len()
    }

    pub fn is_empty(&self) -> bool {
        self.base.is_empty()
    }

    pub fn values(&self) -> &[i64] {
        self.base.values()
    }

    /// (v, v²): the lifted points in units of (δ, δ²).
    pub fn lift(&self) -> Vec<(i64, i64)> {
        self.values().iter().map(|&v| (v, v * v)).collect()
    }

    /// Smallest and largest abscissa, in δ units.
    pub fn hull(&self) -> Option<(i64, i64)> {
        Some((*self.values().first()?, *self.values().last()?))
    }
}

/// Left ends of the three standard intervals, in units of 1/16; each has
/// length 1/8. The first lies right of the second, the third in between.
pub const STANDARD_INTERVALS: [i64; 3] = [4, -6, -1];

fn place(m: u32, which: usize, inner: &DiscreteSet1D, label: String) -> Result<ParabolaSet> {
    let scale = Scale::new(m)?;
    let start = STANDARD_INTERVALS[which] * (scale.n() / 16);
    ParabolaSet::new(DiscreteSet1D::new(
        scale,
        inner.values().iter().map(|v| start + v).collect(),
        label,
    ))
}

/// Three Cantor sets of exponent s, one in each standard interval. Each is
/// built at scale m − 3 and placed at scale m, so it fills an interval of
/// length 1/8. Needs m ≥ 4.
pub fn standard_triple(m: u32, s: f64, seed: u64, mode: Mode) -> Result<[ParabolaSet; 3]> {
    if m < 4 {
        return Err(Error::InvalidScale(m));
    }
    let mut out = Vec::with_capacity(3);
    for which in 0..3 {
        let inner = cantor_set(m - 3, s, seed.wrapping_add(which as u64), mode)?;
        out.push(place(m, which, &inner, format!("parabola{which}(m={m},s={s},seed={seed})"))?);
    }
    Ok([out[0].clone(), out[1].clone(), out[2].clone()])
}

/// Three sets of `count` random abscissae, one in each standard interval.
pub fn random_triple(m: u32, count: usize, seed: u64) -> Result<[ParabolaSet; 3]> {
    if m < 4 {
        return Err(Error::InvalidScale(m));
    }
    let width = 1usize << (m - 3);
    if count == 0 || count > width {
        return Err(Error::Precondition(format!("{count} points do not fit in {width} cells")));
    }
    let scale = Scale::new(m - 3)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(3);
    for which in 0..3 {
        let vals = sample(&mut rng, width, count).into_iter().map(|v| v as i64).collect();
        let inner = DiscreteSet1D::new(scale, vals, "");
        out.push(place(m, which, &inner, format!("random{which}(m={m},n={count},seed={seed})"))?);
    }
    Ok([out[0].clone(), out[1].clone(), out[2].clone()])
}
