use super::DiscreteSet1D;
use crate::error::{Error, Result};
use crate::grid::Scale;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Keep the leftmost children of every cell.
    Deterministic,
    /// Choose the kept children of every cell with a seeded ChaCha8 stream.
    Random,
}

/// Per-block branching counts so that the running count tracks 2^{L·s}
/// from below: block j (ending at bit depth L_j) keeps the largest b with
/// N_{j-1}·b ≤ 2^{L_j·s}, and at least one child.
pub fn balanced_counts(m: u32, s: f64, block_bits: u32) -> Vec<(u32, u64)> {
    let mut out = Vec::new();
    let mut depth = 0u32;
    let mut count = 1u64;
    while depth < m {
        let bits = block_bits.min(m - depth);
        depth += bits;
        let target = (depth as f64 * s).exp2() * (1.0 + 1e-9);
        let mut b = 1u64;
        while b < (1u64 << bits) && (count * (b + 1)) as f64 <= target {
            b += 1;
        }
        count *= b;
        out.push((bits, b));
    }
    out
}

/// δ-separated subset of [0,1) with #A tracking δ^{-s}, built by binary
/// branching with balanced per-level counts.
pub fn cantor_set(m: u32, s: f64, seed: u64, mode: Mode) -> Result<DiscreteSet1D> {
    cantor_set_blocks(m, s, seed, mode, 1)
}

/// Cantor construction with blocks of `block_bits` dyadic levels.
pub fn cantor_set_blocks(m: u32, s: f64, seed: u64, mode: Mode, block_bits: u32) -> Result<DiscreteSet1D> {
    if !(0.0..=1.0).contains(&s) || s.is_nan() {
        return Err(Error::ExponentOutOfRange(s));
    }
    if block_bits == 0 {
        return Err(Error::Precondition("block size must be positive".into()));
    }
    let scale = Scale::new(m)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cells = vec![0i64];
    for (bits, b) in balanced_counts(m, s, block_bits) {
        let width = 1usize << bits;
        let mut next = Vec::with_capacity(cells.len() * b as usize);
        for &c in &cells {
            match mode {
                Mode::Deterministic => {
                    for child in 0..b as i64 {
                        next.push((c << bits) + child);
                    }
                }
                Mode::Random => {
                    let mut picks: Vec<usize> = sample(&mut rng, width, b as usize).into_vec();
                    picks.sort_unstable();
                    for child in picks {
                        next.push((c << bits) + child as i64);
                    }
                }
            }
        }
        cells = next;
    }
    let tag = match mode {
        Mode::Deterministic => "deterministic".to_string(),
        Mode::Random => format!("random,seed={seed},rng=chacha8"),
    };
    Ok(DiscreteSet1D::new(
        scale,
        cells,
        format!("cantor(m={m},s={s},T={block_bits},{tag})"),
    ))
}

/// Slope indices in [0, 2^m) forming a two-sided regular set of exponent s.
/// Exactly balanced binary branching: every cell of a level holds the same
/// number of points, so window counts are within factor 12 of (ρ/δ)^s.
pub fn ad_regular_directions(m: u32, s: f64, seed: u64) -> Result<DiscreteSet1D> {
    if !(s > 0.0 && s <= 1.0) {
        return Err(Error::ExponentOutOfRange(s));
    }
    let mut set = cantor_set_blocks(m, s, seed, Mode::Random, 1)?;
    set.label = format!("ad_regular(m={m},s={s},seed={seed},rng=chacha8)");
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extremes() {
        let full = cantor_set(7, 1.0, 0, Mode::Deterministic).unwrap();
        assert_eq!(full.len(), 128);
        let single = cantor_set(7, 0.0, 0, Mode::Random).unwrap();
        assert_eq!(single.len(), 1);
    }

    #[test]
    fn half_dimension_counts() {
        // levels alternate 1,2 children: 2^{m/2} points at even m
        let a = cantor_set(8, 0.5, 0, Mode::Deterministic).unwrap();
        assert_eq!(a.len(), 16);
        let b = cantor_set(8, 0.5, 3, Mode::Random).unwrap();
        assert_eq!(b.len(), 16);
    }

    #[test]
    fn same_seed_same_set() {
        let a = cantor_set(10, 0.37, 11, Mode::Random).unwrap();
        let b = cantor_set(10, 0.37, 11, Mode::Random).unwrap();
        assert_eq!(a, b);
        let c = cantor_set(10, 0.37, 12, Mode::Random).unwrap();
        assert_ne!(a.values(), c.values());
    }

    #[test]
    fn bad_exponent() {
        assert!(cantor_set(5, 1.5, 0, Mode::Random).is_err());
        assert!(ad_regular_directions(5, 0.0, 0).is_err());
    }
}
