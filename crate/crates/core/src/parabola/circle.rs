use crate::error::{Error, Result};
use num_complex::Complex64;
use num_rational::Ratio;

type Q = Ratio<i128>;

/// The circle through the points (3(y_i + y_j), √3(y_i − y_j)) of a triple
/// (y₁, y₂, y₃): centre (2σ₁, 0), radius² = 6σ₂ − 2σ₁², where σ is the sum
/// of the lifted points (y_i, y_i²).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CircleDatum {
    pub sigma1: Q,
    pub sigma2: Q,
}

impl CircleDatum {
    pub fn center(&self) -> (Q, Q) {
        (self.sigma1 * 2, Q::from_integer(0))
    }

    pub fn radius_sq(&self) -> Q {
        self.sigma2 * 6 - self.sigma1 * self.sigma1 * 2
    }

    /// Checks radius² = 2Σ_{i<j}(y_i − y_j)² exactly.
    pub fn identity_holds(&self, y: [Q; 3]) -> bool {
        let sq = |a: Q, b: Q| (a - b) * (a - b);
        self.radius_sq() == (sq(y[0], y[1]) + sq(y[1], y[2]) + sq(y[2], y[0])) * 2
    }

    /// Whether the point lies on the circle, exactly; only meaningful for
    /// points whose squared coordinates are rational.
    pub fn contains_sq(&self, x: Q, y_sq: Q) -> bool {
        let dx = x - self.sigma1 * 2;
        dx * dx + y_sq == self.radius_sq()
    }
}

pub fn triple_to_circle(y: [Q; 3]) -> CircleDatum {
    let c = CircleDatum {
        sigma1: y[0] + y[1] + y[2],
        sigma2: y[0] * y[0] + y[1] * y[1] + y[2] * y[2],
    };
    debug_assert!(c.identity_holds(y));
    c
}

const UNIT_RESIDUAL: f64 = 1e-12;

/// Endpoints on S¹ of the chord that the disk map sends the circle's upper
/// half to. The circle meets the real axis at ξ± = 2σ₁ ± r and each ξ goes to
/// ((ξ²−1)/(ξ²+1), −2ξ/(ξ²+1)).
pub fn circle_to_segment(sigma1: f64, sigma2: f64) -> Result<[(f64, f64); 2]> {
    let r2 = 6.0 * sigma2 - 2.0 * sigma1 * sigma1;
    if !(r2 > 0.0) || !r2.is_finite() {
        return Err(Error::Degenerate(format!("circle with radius² {r2}")));
    }
    let r = r2.sqrt();
    let mut out = [(0.0, 0.0); 2];
    for (slot, xi) in out.iter_mut().zip([2.0 * sigma1 + r, 2.0 * sigma1 - r]) {
        let q = xi * xi + 1.0;
        let p = ((xi * xi - 1.0) / q, -2.0 * xi / q);
        let res = (p.0 * p.0 + p.1 * p.1 - 1.0).abs();
        if res > UNIT_RESIDUAL {
            return Err(Error::Degenerate(format!("endpoint off the unit circle by {res:e}")));
        }
        *slot = p;
    }
    Ok(out)
}

/// Upper half-plane → unit disk: the Cayley map followed by the
/// Poincaré-to-Klein map, so semicircles centred on the real axis become
/// straight chords. `None` off the open upper half-plane.
pub fn disk_map(x: f64, y: f64) -> Option<(f64, f64)> {
    if !(y > 0.0) {
        return None;
    }
    let z = Complex64::new(x, y);
    let i = Complex64::i();
    let w = (z - i) / (z + i);
    let k = w * 2.0 / (1.0 + w.norm_sqr());
    Some((k.re, k.im))
}
