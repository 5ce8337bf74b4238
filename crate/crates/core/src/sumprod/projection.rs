use super::project;
use crate::error::{Error, Result};
use crate::sets::{hausdorff_content, validate_kt, DiscreteSet1D, DiscreteSet2D};
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::collections::BTreeMap;

/// Number of random subsets tried per survey.
const SUBSETS: u64 = 20;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurveyParams {
    /// Exponent of the first-coordinate set.
    pub s1: f64,
    /// Exponent of the fibres.
    pub s2: f64,
    /// Exponent of the direction set, used for the content estimate.
    pub t: f64,
    /// Subsets keep more than δ^ε·#P points.
    pub eps: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DirectionRow {
    /// x = t·δ.
    pub t: i64,
    /// N_δ(π_x(P)).
    pub full: usize,
    /// min over the subsets of N_δ(π_x(Q))/#Q.
    pub min_ratio: f64,
    /// Every subset met K₁⁻¹K₂⁻¹K₃^{-1/2}δ^{s/2}√#E·#Q.
    pub passes: bool,
    /// Dyadic content of π_x(P) at exponent (s₁ + s₂ + t)/2.
    pub content: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionReport {
    pub k1: f64,
    pub k2: f64,
    /// KT constant of E at σ = min(s, 2 − s).
    pub k3: f64,
    pub sigma: f64,
    /// K₁⁻¹K₂⁻¹K₃^{-1/2}δ^{s/2}√#E, the per-point rate in the display.
    pub rate: f64,
    pub subset_size: usize,
    pub rows: Vec<DirectionRow>,
    pub fraction_passing: f64,
}

/// (K₁, K₂): the KT constant of the first coordinates at s₁ and the largest
/// KT constant of a fibre {b : (a, b) ∈ P} at s₂.
pub fn quasi_product_constants(p: &DiscreteSet2D, s1: f64, s2: f64) -> Result<(f64, f64)> {
    if p.is_empty() {
        return Err(Error::EmptySet);
    }
    let mut fibres: BTreeMap<i64, Vec<i64>> = BTreeMap::new();
    for &(a, b) in p.points() {
        fibres.entry(a).or_default().push(b);
    }
    let firsts = DiscreteSet1D::new(p.scale, fibres.keys().copied().collect(), "first coordinates");
    let k1 = validate_kt(&firsts, s1)?.constant;
    let mut k2 = 0.0f64;
    for bs in fibres.into_values() {
        k2 = k2.max(validate_kt(&DiscreteSet1D::new(p.scale, bs, "fibre"), s2)?.constant);
    }
    Ok((k1, k2))
}

/// For every direction of E, the worst of 20 seeded subsets Q ⊂ P with
/// #Q > δ^ε#P against the projection display with constant 1.
pub fn projection_survey(p: &DiscreteSet2D, e: &DiscreteSet1D, params: &SurveyParams) -> Result<ProjectionReport> {
    if e.is_empty() {
        return Err(Error::EmptySet);
    }
    if p.scale != e.scale {
        return Err(Error::ScaleMismatch(p.m(), e.m()));
    }
    let s = params.s1 + params.s2;
    let sigma = s.min(2.0 - s);
    let (k1, k2) = quasi_product_constants(p, params.s1, params.s2)?;
    let k3 = validate_kt(e, sigma)?.constant;
    let delta = p.scale.delta();
    let rate = (k1 * k2).recip() * k3.powf(-0.5) * delta.powf(s / 2.0) * (e.len() as f64).sqrt();
    let size = (((delta.powf(params.eps) * p.len() as f64).floor() as usize) + 1).min(p.len());
    let subsets: Vec<DiscreteSet2D> = (0..SUBSETS)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(params.seed.wrapping_add(i));
            let pts = sample(&mut rng, p.len(), size).into_iter().map(|j| p.points()[j]).collect();
            DiscreteSet2D::new(p.scale, pts, format!("{}|subset{i}", p.label))
        })
        .collect();
    let exponent = (s + params.t) / 2.0;
    let rows: Vec<DirectionRow> = e
        .values()
        .par_iter()
        .map(|&t| {
            let full = project(p, t);
            let counts: Vec<usize> = subsets.iter().map(|q| project(q, t).len()).collect();
            let min = *counts.iter().min().unwrap();
            DirectionRow {
                t,
                full: full.len(),
                min_ratio: min as f64 / size as f64,
                passes: min as f64 >= rate * size as f64,
                content: hausdorff_content(&full, exponent),
            }
        })
        .collect();
    let fraction_passing = rows.iter().filter(|r| r.passes).count() as f64 / rows.len() as f64;
    Ok(ProjectionReport {
        k1,
        k2,
        k3,
        sigma,
        rate,
        subset_size: size,
        rows,
        fraction_passing,
    })
}
