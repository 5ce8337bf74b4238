use super::{collinear_triples, ratio_cells, sumset};
use crate::error::{Error, Result};
use crate::fit::ExponentFit;
use crate::grid::covering_number_1d;
use crate::sets::{content_threshold, uniformize, validate_kt, DiscreteSet1D, DiscreteSet2D};
use rayon::prelude::*;
use std::collections::{BTreeMap, HashSet};

/// The exponent 43/34 of the growth dichotomy.
pub const GROWTH_EXPONENT: f64 = 43.0 / 34.0;

/// Largest s for which the growth dichotomy is stated.
pub const MAX_GROWTH_S: f64 = 136.0 / 265.0;

/// Stand-in for the unquantified Cε of the dichotomy: sum-set scales run
/// over δ ≤ ρ ≤ δ^slack and the ratio-set threshold is δ^{-43s/34 + slack}.
pub const DEFAULT_SLACK: f64 = 0.1;

/// Sum-set and ratio-set growth of A ⊂ [1/2, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthReport {
    pub m: u32,
    pub s: f64,
    pub na: usize,
    /// N_δ(A + A).
    pub naa: usize,
    /// N_δ(A/A).
    pub na_over_a: usize,
    /// N_δ(A + A)/#A.
    pub k: f64,
    /// (k, N_{2^-k}(A + A)) for k = 0..=m.
    pub sum_ladder: Vec<(u32, usize)>,
    /// log₂ N_ρ(A + A) against log₂(1/ρ) over the whole ladder.
    pub sum_fit: ExponentFit,
    /// max over δ ≤ ρ ≤ δ^slack of N_ρ(A + A)·ρ^{43s/34}.
    pub alt1_margin: f64,
    /// N_δ(A/A)·δ^{43s/34 − slack}.
    pub alt2_margin: f64,
}

impl GrowthReport {
    pub const CSV_HEADER: &'static str = "m,s,NA,NAA,NAoverA,K,alt1_margin,alt2_margin";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.m, self.s, self.na, self.naa, self.na_over_a, self.k, self.alt1_margin, self.alt2_margin
        )
    }
}

fn sum_ladder(a: &DiscreteSet1D) -> Vec<(u32, usize)> {
    let sums = sumset(a);
    (0..=a.m()).map(|k| (k, covering_number_1d(&sums, a.m(), k))).collect()
}

pub fn growth_report(a: &DiscreteSet1D, s: f64, slack: f64) -> Result<GrowthReport> {
    if a.is_empty() {
        return Err(Error::EmptySet);
    }
    if !(0.0..1.0).contains(&slack) {
        return Err(Error::Precondition(format!("slack {slack} must lie in [0, 1)")));
    }
    let m = a.m();
    let ladder = sum_ladder(a);
    let naa = ladder[m as usize].1;
    if naa < a.len() {
        return Err(Error::Degenerate("translate injection violated: N(A+A) < #A".into()));
    }
    if ladder.windows(2).any(|w| w[1].1 < w[0].1) {
        return Err(Error::Degenerate("covering numbers of A+A decrease under refinement".into()));
    }
    let na_over_a = ratio_cells(a, m)?.len();
    let e = GROWTH_EXPONENT * s;
    let k_lo = (slack * m as f64).ceil() as u32;
    let alt1_margin = ladder
        .iter()
        .filter(|(k, _)| *k >= k_lo.max(1))
        .map(|&(k, c)| c as f64 / (k as f64 * e).exp2())
        .fold(0.0, f64::max);
    let alt2_margin = na_over_a as f64 / (m as f64 * (e - slack)).exp2();
    let sum_fit = ExponentFit::from_logs(ladder.iter().map(|&(k, c)| (k as f64, (c as f64).log2())).collect())?;
    Ok(GrowthReport {
        m,
        s,
        na: a.len(),
        naa,
        na_over_a,
        k: naa as f64 / a.len() as f64,
        sum_ladder: ladder,
        sum_fit,
        alt1_margin,
        alt2_margin,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthVerdict {
    pub report: GrowthReport,
    /// N_ρ(A + A) > ρ^{-43s/34} at some ladder scale.
    pub sums_grow: bool,
    /// N_δ(A/A) > δ^{-43s/34 + slack}.
    pub ratios_grow: bool,
    /// sup{v ≤ 43s/34 : content of the δ-cells of A/A at v ≥ 1}.
    pub content_t: f64,
}

impl GrowthVerdict {
    pub fn either(&self) -> bool {
        self.sums_grow || self.ratios_grow
    }
}

/// Both alternatives of the growth dichotomy with their margins. A verdict
/// with neither alternative holding is reported, not treated as an error.
pub fn growth_exponent_check(a: &DiscreteSet1D, s: f64, slack: f64) -> Result<GrowthVerdict> {
    if !(s > 0.0 && s <= MAX_GROWTH_S) {
        return Err(Error::Precondition(format!("growth dichotomy needs 0 < s ≤ 136/265, got {s}")));
    }
    let report = growth_report(a, s, slack)?;
    let cells = DiscreteSet1D::new(a.scale, ratio_cells(a, a.m())?, "ratio cells");
    let content_t = content_threshold(&cells, GROWTH_EXPONENT * s)?;
    Ok(GrowthVerdict {
        sums_grow: report.alt1_margin > 1.0,
        ratios_grow: report.alt2_margin > 1.0,
        report,
        content_t,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoublingRow {
    pub k: u32,
    pub na: usize,
    pub naa: usize,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DoublingTable {
    pub rows: Vec<DoublingRow>,
    /// N_δ(A + A)/#A.
    pub k: f64,
    pub max_ratio: f64,
    pub max_over_k: f64,
}

/// N_ρ(A + A)/N_ρ(A) for ρ = 2^-k, k = 0..=m.
pub fn doubling_across_scales(a: &DiscreteSet1D) -> Result<DoublingTable> {
    if a.is_empty() {
        return Err(Error::EmptySet);
    }
    let m = a.m();
    let rows: Vec<DoublingRow> = sum_ladder(a)
        .into_iter()
        .map(|(k, naa)| {
            let na = a.covering_number(k);
            DoublingRow {
                k,
                na,
                naa,
                ratio: naa as f64 / na as f64,
            }
        })
        .collect();
    let k = rows[m as usize].naa as f64 / a.len() as f64;
    let max_ratio = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    Ok(DoublingTable {
        rows,
        k,
        max_ratio,
        max_over_k: max_ratio / k,
    })
}

/// Measured quantities of the few-sums argument.
#[derive(Debug, Clone, PartialEq)]
pub struct FewSumsReport {
    pub growth: GrowthReport,
    /// KT constant C of A at s.
    pub c: f64,
    /// Dyadic N with every kept sum having between N and 2N − 1
    /// representations a + a′.
    pub n_bucket: u64,
    /// Σ over kept sums of their representation counts.
    pub retained: u64,
    /// retained / #A².
    pub pigeonhole_constant: f64,
    pub s0_size: usize,
    pub s_size: usize,
    /// #G = #{(a, a′) ∈ A² : a + a′ ∈ S}.
    pub g_size: u64,
    /// #G / #A².
    pub g_constant: f64,
    /// min over ρ of N_ρ(S)/N_ρ(A).
    pub coverage: f64,
    /// KT constant L of S at s.
    pub l: f64,
    /// L/(CK).
    pub l_over_ck: f64,
    /// KT constant of the δ-cells of A/A at σ = min(2s, 2 − 2s).
    pub ratio_kt: f64,
    pub p_size: usize,
    pub d_size: usize,
    /// Tube-weighted collinear triples of (A ∪ S)² over the slopes of A/A.
    pub triples_counted: u128,
    /// L⁴δ^{-2s}#S².
    pub triples_upper: f64,
    /// Σ over (e, f) ∈ A² of the pairs in G_{e,f}² with quotients in one δ-cell.
    pub triples_found: u128,
    /// Σ#G_{e,f} = #G², Σ#G_{e,f}²·#A² ≥ #G⁴ and found·#D ≥ Σ#G_{e,f}².
    pub identities_hold: bool,
    /// N_δ(A + A)⁶N_δ(A/A).
    pub lhs: f64,
    /// C⁻⁴δ^{2s}#A^{10}.
    pub rhs: f64,
    pub ratio: f64,
}

/// Runs the constructive steps of the few-sums argument on A ⊂ [1/2, 1]:
/// pigeonhole the sums by representation count, take S from the kept sums
/// and uniformize it at `eps`, form G, P = (A ∪ S)², count collinear triples
/// over the slopes of A/A, and compare N(A + A)⁶N(A/A) with C⁻⁴δ^{2s}#A^{10}.
pub fn few_sums_pipeline(a: &DiscreteSet1D, s: f64, eps: f64) -> Result<FewSumsReport> {
    let growth = growth_report(a, s, DEFAULT_SLACK)?;
    let scale = a.scale;
    let (m, n) = (scale.m(), scale.n());
    let v = a.values();
    let na = v.len() as u64;
    let c = validate_kt(a, s)?.constant;

    let lo = 2 * v[0];
    let mut reps = vec![0u64; (2 * v[v.len() - 1] - lo + 1) as usize];
    for &x in v {
        for &y in v {
            reps[(x + y - lo) as usize] += 1;
        }
    }
    // ties go to the smaller bucket
    let mut mass: BTreeMap<u32, u64> = BTreeMap::new();
    for &r in reps.iter().filter(|&&r| r > 0) {
        *mass.entry(r.ilog2()).or_default() += r;
    }
    let best = *mass.values().max().unwrap();
    let bucket = *mass.iter().find(|(_, &w)| w == best).unwrap().0;
    // a sum equal to 2 (possible only when 1 ∈ A) falls outside the unit
    // cell used for uniformizing and is left out
    let s0: Vec<i64> = reps
        .iter()
        .enumerate()
        .filter(|(_, &r)| r > 0 && r.ilog2() == bucket)
        .map(|(i, _)| lo + i as i64 - n)
        .filter(|&x| x < n)
        .collect();
    let s0 = DiscreteSet1D::new(scale, s0, "kept sums − 1");
    let (shifted, _) = uniformize(&s0, eps)?;
    let s_set: HashSet<i64> = shifted.values().iter().map(|x| x + n).collect();
    let g_size: u64 = s_set.iter().map(|&x| reps[(x - lo) as usize]).sum();

    let coverage = (0..=m)
        .map(|k| shifted.covering_number(k) as f64 / a.covering_number(k) as f64)
        .fold(f64::INFINITY, f64::min);
    let l = validate_kt(&shifted, s)?.constant;

    let ratios = DiscreteSet1D::new(scale, ratio_cells(a, m)?, "ratio cells");
    let sigma = (2.0 * s).min(2.0 - 2.0 * s);
    let ratio_kt = validate_kt(&ratios, sigma)?.constant;

    let mut union: Vec<i64> = v.iter().copied().chain(s_set.iter().copied()).collect();
    union.sort_unstable();
    union.dedup();
    let p = DiscreteSet2D::new(
        scale,
        union.iter().flat_map(|&x| union.iter().map(move |&y| (x, y))).collect(),
        "(A ∪ S)^2",
    );
    let triples_counted = collinear_triples(&p, &ratios);

    // A_e = {a ∈ A : e + a ∈ S}, so G_{e,f} = A_e × A_f
    let partners: Vec<Vec<i64>> = v
        .iter()
        .map(|&e| v.iter().copied().filter(|&x| s_set.contains(&(e + x))).collect())
        .collect();
    let (sum_g, sum_g2, found) = partners
        .par_iter()
        .map(|ae| {
            let mut acc = (0u128, 0u128, 0u128);
            let mut cells = Vec::new();
            for af in &partners {
                let g = (ae.len() * af.len()) as u128;
                acc.0 += g;
                acc.1 += g * g;
                cells.clear();
                cells.extend(ae.iter().flat_map(|&x| af.iter().map(move |&y| (y * n).div_euclid(x))));
                cells.sort_unstable();
                let mut i = 0;
                while i < cells.len() {
                    let j = i + cells[i..].partition_point(|&c| c == cells[i]);
                    acc.2 += ((j - i) * (j - i)) as u128;
                    i = j;
                }
            }
            acc
        })
        .reduce(|| (0, 0, 0), |x, y| (x.0 + y.0, x.1 + y.1, x.2 + y.2));
    let g = g_size as u128;
    let identities_hold = sum_g == g * g
        && sum_g2 * (na as u128) * (na as u128) >= g * g * g * g
        && found * ratios.len() as u128 >= sum_g2;

    let inv_delta = n as f64;
    let lhs = (growth.naa as f64).powi(6) * growth.na_over_a as f64;
    let rhs = c.powi(-4) * inv_delta.powf(-2.0 * s) * (na as f64).powi(10);
    let a2 = (na * na) as f64;
    Ok(FewSumsReport {
        c,
        n_bucket: 1 << bucket,
        retained: mass[&bucket],
        pigeonhole_constant: mass[&bucket] as f64 / a2,
        s0_size: s0.len(),
        s_size: s_set.len(),
        g_size,
        g_constant: g_size as f64 / a2,
        coverage,
        l,
        l_over_ck: l / (c * growth.k),
        ratio_kt,
        p_size: p.len(),
        d_size: ratios.len(),
        triples_counted,
        triples_upper: l.powi(4) * inv_delta.powf(2.0 * s) * (s_set.len() as f64).powi(2),
        triples_found: found,
        identities_hold,
        lhs,
        rhs,
        ratio: lhs / rhs,
        growth,
    })
}
