//! Fourier transforms of discrete measures on the parabola and L⁶-type
//! integrals of them over disks, by direct summation.

mod quad;

pub use quad::{
    box_energy_closed_form, decay_exponent_fit, l6_box, l6_integral, quadrature, trilinear_l6, DecayLadder,
    L6Report, Region, DEFAULT_STEP,
};

use crate::error::{Error, Result};
use crate::sets::DiscreteSet1D;
use num_complex::Complex64;
use std::f64::consts::TAU;

/// Atoms (ξ, mass) standing for point masses at (ξ, ξ²).
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure {
    pub atoms: Vec<(f64, f64)>,
    pub total: f64,
    pub s: f64,
    /// max over atom-centred balls B(y, r), r = 2^k δ, of μ(B)/r^s.
    pub constant: f64,
}

/// Mass δ^s at every lifted point of A.
pub fn frostman_measure_from_set(a: &DiscreteSet1D, s: f64) -> Result<DiscreteMeasure> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::ExponentOutOfRange(s));
    }
    let n = a.scale.n();
    if a.values().iter().any(|v| v.abs() > n) {
        return Err(Error::Precondition("atoms must lie over [-1, 1]".into()));
    }
    let delta = a.scale.delta();
    let mass = delta.powf(s);
    let atoms: Vec<(f64, f64)> = a.values().iter().map(|&v| (v as f64 * delta, mass)).collect();
    let constant = frostman_constant(&atoms, s, a.m());
    Ok(DiscreteMeasure {
        total: mass * atoms.len() as f64,
        atoms,
        s,
        constant,
    })
}

/// Ball scan over atom centres and radii 2^k δ, k = 0..=m+1.
pub fn frostman_constant(atoms: &[(f64, f64)], s: f64, m: u32) -> f64 {
    let delta = (-(m as f64)).exp2();
    let mut best = 0.0f64;
    for &(c, _) in atoms {
        let mut dist: Vec<(f64, f64)> = atoms
            .iter()
            .map(|&(x, w)| ((x - c).hypot(x * x - c * c), w))
            .collect();
        dist.sort_by(|a, b| a.0.total_cmp(&b.0));
        for k in 0..=m + 1 {
            let r = delta * (k as f64).exp2();
            // tolerance keeps atoms at distance exactly r inside the closed ball
            let inside: f64 = dist.iter().take_while(|d| d.0 <= r * (1.0 + 1e-12)).map(|d| d.1).sum();
            best = best.max(inside / r.powf(s));
        }
    }
    best
}

/// e(t) = exp(2πit).
#[inline]
pub fn e(t: f64) -> Complex64 {
    Complex64::from_polar(1.0, TAU * t)
}

/// Σ mass · e(ξx₁ + ξ²x₂).
pub fn mu_hat(measure: &DiscreteMeasure, x: (f64, f64)) -> Complex64 {
    measure.atoms.iter().map(|&(xi, w)| e(xi * x.0 + xi * xi * x.1) * w).sum()
}
