//! δ-separated point sets, their constructors, regularity validators,
//! dyadic Hausdorff content, uniformization and quasi-product tube families.

mod construct;
mod content;
mod family;
mod uniform;
pub(crate) mod validate;

pub use construct::{ad_regular_directions, balanced_counts, cantor_set, cantor_set_blocks, Mode};
pub use content::{content_threshold, frostman_subset, hausdorff_content};
pub use family::{quasi_product_family, TubeFamily};
pub use uniform::{block_size_for, multiscale_split, uniformize, uniformize_levels, BranchingProfile, ScaleSplit, SplitCase};
pub use validate::{
    kt_constant_multiset, validate_frostman, validate_kt, validate_kt_2d, validate_rect_kt, CertKind,
    RegularityCertificate, Witness,
};

use crate::error::{Error, Result};
use crate::grid::Scale;

/// Sorted, distinct grid indices at scale δ; the value v stands for vδ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiscreteSet1D {
    pub scale: Scale,
    values: Vec<i64>,
    pub label: String,
}

impl DiscreteSet1D {
    /// Sorts and removes duplicates, so the result is δ-separated.
    pub fn new(scale: Scale, mut values: Vec<i64>, label: impl Into<String>) -> Self {
        values.sort_unstable();
        values.dedup();
        DiscreteSet1D {
            scale,
            values,
            label: label.into(),
        }
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn m(&self) -> u32 {
        self.scale.m()
    }

    /// Number of points in the half-open window [lo, hi).
    pub fn count_in(&self, lo: i64, hi: i64) -> usize {
        let a = self.values.partition_point(|&v| v < lo);
        let b = self.values.partition_point(|&v| v < hi);
        b - a
    }

    pub fn covering_number(&self, k: u32) -> usize {
        crate::grid::covering_number_1d(&self.values, self.m(), k)
    }

    /// Image under v ↦ v + shift.
    pub fn translate(&self, shift: i64, label: impl Into<String>) -> Self {
        DiscreteSet1D::new(self.scale, self.values.iter().map(|v| v + shift).collect(), label)
    }

    /// Copy of a set in [0,1) at scale m−1 placed into [1/2, 1) at scale m.
    pub fn into_upper_half(&self) -> Result<Self> {
        let scale = Scale::new(self.m() + 1)?;
        let n = self.scale.n();
        Ok(DiscreteSet1D::new(
            scale,
            self.values.iter().map(|v| v + n).collect(),
            format!("{}|half", self.label),
        ))
    }

    /// Affine copy v ↦ offset + v·2^-shift placed at the same scale; used to
    /// squeeze a set of [0,1) into a short interval. Collisions are merged.
    pub fn squeeze(&self, shift: u32, offset: i64, label: impl Into<String>) -> Self {
        DiscreteSet1D::new(self.scale, self.values.iter().map(|v| offset + (v >> shift)).collect(), label)
    }
}

/// Sorted, distinct grid points (i, j) at scale δ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiscreteSet2D {
    pub scale: Scale,
    points: Vec<(i64, i64)>,
    pub label: String,
}

impl DiscreteSet2D {
    pub fn new(scale: Scale, mut points: Vec<(i64, i64)>, label: impl Into<String>) -> Self {
        points.sort_unstable();
        points.dedup();
        DiscreteSet2D {
            scale,
            points,
            label: label.into(),
        }
    }

    pub fn points(&self) -> &[(i64, i64)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn m(&self) -> u32 {
        self.scale.m()
    }

    pub fn product(a: &DiscreteSet1D, b: &DiscreteSet1D) -> Result<Self> {
        if a.scale != b.scale {
            return Err(Error::ScaleMismatch(a.m(), b.m()));
        }
        let pts = a
            .values()
            .iter()
            .flat_map(|&x| b.values().iter().map(move |&y| (x, y)))
            .collect();
        Ok(DiscreteSet2D::new(a.scale, pts, format!("{}x{}", a.label, b.label)))
    }
}

/// The dilate of A ∩ [l·2^{-k}, (l+1)·2^{-k}) by 2^k, as a set at scale δ·2^k.
pub fn restrict_rescale(a: &DiscreteSet1D, k: u32, cell: i64) -> Result<DiscreteSet1D> {
    if k >= a.m() {
        return Err(Error::Precondition(format!(
            "cell side 2^-{k} must be coarser than δ = 2^-{}",
            a.m()
        )));
    }
    let side = 1i64 << (a.m() - k);
    let lo = cell * side;
    let vals = a
        .values()
        .iter()
        .filter(|&&v| v >= lo && v < lo + side)
        .map(|&v| v - lo)
        .collect();
    Ok(DiscreteSet1D::new(
        Scale::new(a.m() - k)?,
        vals,
        format!("{}|cell(k={k},l={cell})", a.label),
    ))
}
