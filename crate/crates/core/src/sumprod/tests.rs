use super::*;
use crate::grid::Scale;
use crate::sets::{cantor_set, Mode};
use num_rational::Ratio;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::HashSet;

fn set(m: u32, vals: Vec<i64>) -> DiscreteSet1D {
    DiscreteSet1D::new(Scale::new(m).unwrap(), vals, "t")
}

fn upper_cantor(m: u32, s: f64, seed: u64) -> DiscreteSet1D {
    cantor_set(m - 1, s, seed, Mode::Random).unwrap().into_upper_half().unwrap()
}

fn geometric(m: u32, terms: i64, per_octave: f64) -> DiscreteSet1D {
    let n = (1i64 << m) as f64;
    set(m, (0..terms).map(|i| (n * (-(i as f64) / per_octave).exp2()).round() as i64).collect())
}

/// Ordered distinct triples sharing a strip, slope by slope.
fn triples_oracle(p: &DiscreteSet2D, d: &DiscreteSet1D) -> u128 {
    let n = p.scale.n();
    let pts = p.points();
    let mut total = 0u128;
    for &k in d.values() {
        let strip = |(x, y): (i64, i64)| Ratio::new(y * n - k * x, n).floor();
        for i in 0..pts.len() {
            for j in 0..pts.len() {
                for l in 0..pts.len() {
                    if i != j && j != l && i != l && strip(pts[i]) == strip(pts[j]) && strip(pts[j]) == strip(pts[l]) {
                        total += 1;
                    }
                }
            }
        }
    }
    total
}

#[test]
fn progression_sums() {
    let a = set(10, (0..40).map(|j| 512 + 7 * j).collect());
    assert_eq!(sumset_cover(&a, 10).unwrap(), 79);
    assert!(sumset_cover(&a, 11).is_err());
}

#[test]
fn geometric_ratios() {
    let vals: Vec<i64> = (0..6).map(|i| 9i64.pow(i) * 8i64.pow(5 - i)).collect();
    let a = set(16, vals);
    assert_eq!(ratioset_cover(&a, 16).unwrap(), 11);
}

#[test]
fn fraction_count_ground_truth() {
    let a = set(8, (128..=256).collect());
    let oracle: HashSet<Ratio<i64>> = (128..=256)
        .flat_map(|p| (128..=256).map(move |q| Ratio::new(p, q)))
        .collect();
    assert_eq!(oracle.len(), 14321);
    assert_eq!(ratioset_cover(&a, 16).unwrap(), 14321);
    // at the set's own scale the cells merge many quotients
    assert!(ratioset_cover(&a, 8).unwrap() < 14321);
}

#[test]
fn ratio_sets_need_the_upper_half() {
    assert!(ratioset_cover(&set(8, vec![100, 200]), 8).is_err());
    assert!(ratioset_cover(&set(8, vec![128, 257]), 8).is_err());
}

#[test]
fn projection_examples() {
    let a = upper_cantor(8, 0.5, 3);
    let p = DiscreteSet2D::product(&a, &a).unwrap();
    assert_eq!(project(&p, 0).values(), a.values());
    assert_eq!(project(&p, 256).values(), sumset(&a).as_slice());
}

#[test]
fn projection_matches_rational_floor() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let scale = Scale::new(7).unwrap();
    for _ in 0..20 {
        let pts: Vec<(i64, i64)> = (0..40).map(|_| (rng.random_range(0..128), rng.random_range(0..128))).collect();
        let p = DiscreteSet2D::new(scale, pts, "r");
        let t = rng.random_range(0..=256);
        let direct: HashSet<i64> = p
            .points()
            .iter()
            .map(|&(a, b)| (Ratio::from_integer(a) + Ratio::new(t * b, 128)).floor().to_integer())
            .collect();
        assert_eq!(project(&p, t).len(), direct.len());
        assert!(project(&p, t).values().iter().all(|v| direct.contains(v)));
    }
}

#[test]
fn survey_full_grid_passes() {
    let scale = Scale::new(4).unwrap();
    let full: Vec<i64> = (0..16).collect();
    let line = DiscreteSet1D::new(scale, full, "grid");
    let p = DiscreteSet2D::product(&line, &line).unwrap();
    let e = DiscreteSet1D::new(scale, (0..=32).collect(), "slopes");
    let params = SurveyParams {
        s1: 1.0,
        s2: 1.0,
        t: 1.0,
        eps: 0.1,
        seed: 0,
    };
    let rep = projection_survey(&p, &e, &params).unwrap();
    assert_eq!(rep.rows.len(), 33);
    assert_eq!(rep.fraction_passing, 1.0);
}

#[test]
fn survey_without_thinning_is_the_projection() {
    let a = upper_cantor(7, 0.5, 1);
    let p = DiscreteSet2D::product(&a, &a).unwrap();
    let e = set(7, vec![40]);
    let params = SurveyParams {
        s1: 0.5,
        s2: 0.5,
        t: 0.5,
        eps: 0.0,
        seed: 9,
    };
    let rep = projection_survey(&p, &e, &params).unwrap();
    assert_eq!(rep.subset_size, p.len());
    assert_eq!(rep.rows.len(), 1);
    assert_eq!(rep.rows[0].full, project(&p, 40).len());
    assert!((rep.rows[0].min_ratio - rep.rows[0].full as f64 / p.len() as f64).abs() < 1e-15);
}

#[test]
fn collinear_small_cases() {
    let scale = Scale::new(5).unwrap();
    let p = DiscreteSet2D::new(scale, vec![(0, 0), (3, 3), (9, 9)], "diag");
    assert_eq!(collinear_triples(&p, &DiscreteSet1D::new(scale, vec![32], "one")), 6);
    let q = DiscreteSet2D::new(scale, vec![(0, 0), (10, 3), (20, 25), (31, 2)], "generic");
    assert_eq!(collinear_triples(&q, &DiscreteSet1D::new(scale, vec![5], "tiny")), 0);
}

#[test]
fn collinear_matches_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let scale = Scale::new(4).unwrap();
    for _ in 0..10 {
        let pts: Vec<(i64, i64)> = (0..24).map(|_| (rng.random_range(0..16), rng.random_range(0..16))).collect();
        let p = DiscreteSet2D::new(scale, pts, "r");
        let d = DiscreteSet1D::new(scale, (0..6).map(|_| rng.random_range(0..=32)).collect(), "d");
        assert_eq!(collinear_triples(&p, &d), triples_oracle(&p, &d));
    }
}

#[test]
fn one_tube_family() {
    let scale = Scale::new(6).unwrap();
    let slopes = DiscreteSet1D::new(scale, vec![32], "k");
    let offs = [DiscreteSet1D::new(scale, vec![10], "c")];
    let pts = DiscreteSet2D::new(scale, vec![(0, 10), (2, 11), (40, 0)], "p");
    let (fam, sh) = elekes_family(&slopes, &offs, &pts, 0.5, 0.5).unwrap();
    assert_eq!(fam.len(), 1);
    assert_eq!(sh.per_tube[0].len(), 2);
}

#[test]
fn progression_shadings() {
    // A an arithmetic progression in [1/2, 1): the slope-one lines carry #A points
    let m = 7;
    let a = set(m, (0..16).map(|j| 64 + 4 * j).collect());
    let inst = elekes_instance(&a, 0.5).unwrap();
    let pts: HashSet<(i64, i64)> = inst.points.points().iter().copied().collect();
    let mut checked = 0;
    for (t, row) in inst.family.tubes.iter().zip(&inst.shading.per_tube) {
        let direct = crate::grid::rasterize(t)
            .into_iter()
            .filter(|q| pts.contains(&(q.i as i64, q.j as i64)))
            .count();
        assert_eq!(row.len(), direct);
        if t.slope == 128 {
            assert!(row.len() >= a.len() - 1, "{t:?}: {}", row.len());
            checked += 1;
        }
    }
    assert!(checked > 0);
}

#[test]
fn elekes_certificates() {
    let a = upper_cantor(8, 0.5, 1);
    let inst = elekes_instance(&a, 0.5).unwrap();
    let delta = a.scale.delta();
    let k1 = inst.slopes.len() as f64 * delta.powf(inst.t);
    let k2 = inst.max_intercepts as f64 * delta.powf(0.5 + inst.t / 2.0);
    assert!(inst.family.k1 <= 8.0 * k1.max(1.0), "{} vs {k1}", inst.family.k1);
    assert!(inst.family.k2 <= 8.0 * k2.max(1.0), "{} vs {k2}", inst.family.k2);
}

#[test]
fn doubling_examples() {
    let ap = set(9, (256..512).collect());
    let t = doubling_across_scales(&ap).unwrap();
    assert!(t.rows.iter().all(|r| r.ratio >= 1.0 && r.ratio <= 2.0), "{:?}", t.rows);
    for seed in 0..5 {
        let t = doubling_across_scales(&upper_cantor(10, 0.5, seed)).unwrap();
        assert!(t.max_over_k <= 8.0, "{}", t.max_over_k);
    }
}

#[test]
fn growth_check_ranges() {
    let ap = set(9, (256..512).collect());
    assert!(growth_exponent_check(&ap, 1.0, DEFAULT_SLACK).is_err());
    for seed in 0..5 {
        let v = growth_exponent_check(&upper_cantor(10, 0.5, seed), 0.5, DEFAULT_SLACK).unwrap();
        assert!(v.either());
        assert!(v.report.alt1_margin.max(v.report.alt2_margin) >= 1.0);
    }
    // rounding a geometric progression to the grid spreads its quotients
    // over many δ-cells, enough for the ratio alternative
    let gp = geometric(10, 17, 16.0);
    let s = (gp.len() as f64).log2() / 10.0;
    let v = growth_exponent_check(&gp, s, DEFAULT_SLACK).unwrap();
    assert!(v.ratios_grow, "{:?}", v.report.csv_row());
}

#[test]
fn growth_csv() {
    let r = growth_report(&upper_cantor(8, 0.5, 0), 0.5, DEFAULT_SLACK).unwrap();
    assert_eq!(GrowthReport::CSV_HEADER.split(',').count(), r.csv_row().split(',').count());
}

#[test]
fn few_sums_single_point() {
    let a = set(6, vec![32]);
    let r = few_sums_pipeline(&a, 0.5, 0.1).unwrap();
    assert_eq!((r.n_bucket, r.retained, r.g_size, r.s_size), (1, 1, 1, 1));
    assert_eq!(r.triples_counted, 0);
    assert_eq!(r.c, 1.0);
    // lhs = 1, rhs = δ^{2s}
    assert_eq!(r.lhs, 1.0);
    assert!((r.ratio - 64.0).abs() < 1e-9);
}

#[test]
fn few_sums_regimes() {
    let ap = set(8, (128..160).collect());
    let r = few_sums_pipeline(&ap, 1.0, 0.1).unwrap();
    assert!(r.ratio >= 1.0 && r.identities_hold);
    // exact quotients (9/8)^j: eleven ratio cells, many sums
    let gp = set(16, (0..6).map(|i| 9i64.pow(i) * 8i64.pow(5 - i)).collect());
    let r = few_sums_pipeline(&gp, 0.15, 0.1).unwrap();
    assert!(r.identities_hold);
    assert_eq!(r.growth.na_over_a, 11);
    assert_eq!(r.growth.naa, 21);
}

#[test]
fn few_sums_constants() {
    let m = 9;
    let floor = (m as f64).powi(-3);
    for s in [1.0 / 3.0, 0.5] {
        for seed in 0..3 {
            let r = few_sums_pipeline(&upper_cantor(m, s, seed), s, 0.1).unwrap();
            assert!(r.identities_hold);
            assert!(r.pigeonhole_constant >= floor && r.g_constant >= floor);
            assert!(r.coverage > 0.0 && r.l_over_ck > 0.0);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn sums_cover_at_least_the_set(vals in prop::collection::vec(128i64..256, 1..40)) {
        let a = set(8, vals);
        let ladder: Vec<usize> = (0..=8).map(|k| sumset_cover(&a, k).unwrap()).collect();
        prop_assert!(ladder[8] >= a.len());
        prop_assert!(ladder.windows(2).all(|w| w[0] <= w[1]));
        let r = growth_report(&a, 0.5, DEFAULT_SLACK).unwrap();
        prop_assert!(r.k >= 0.5);
    }

    #[test]
    fn projections_are_monotone(
        pts in prop::collection::vec((0i64..64, 0i64..64), 2..60),
        keep in prop::collection::vec(any::<bool>(), 60),
        t in 0i64..=128,
    ) {
        let scale = Scale::new(6).unwrap();
        let big = DiscreteSet2D::new(scale, pts.clone(), "p");
        let small = DiscreteSet2D::new(
            scale,
            pts.iter().zip(&keep).filter(|(_, &k)| k).map(|(p, _)| *p).collect(),
            "q",
        );
        prop_assert!(project(&small, t).len() <= project(&big, t).len());
    }

    #[test]
    fn collinear_oracle_property(
        pts in prop::collection::vec((0i64..16, 0i64..16), 3..20),
        d in prop::collection::vec(0i64..=32, 1..4),
    ) {
        let scale = Scale::new(4).unwrap();
        let p = DiscreteSet2D::new(scale, pts, "p");
        let d = DiscreteSet1D::new(scale, d, "d");
        prop_assert_eq!(collinear_triples(&p, &d), triples_oracle(&p, &d));
    }
}
