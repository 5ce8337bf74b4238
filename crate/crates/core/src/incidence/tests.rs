use super::*;
use crate::grid::{incident, rasterize, Axis, GridSquare, Scale, Tube};
use crate::sets::TubeFamily;
use proptest::prelude::*;
use std::collections::{HashMap, HashSet};

fn family_of(m: u32, rows: &[(Axis, i64, i64)], s: f64, d: f64) -> TubeFamily {
    let sc = Scale::new(m).unwrap();
    let tubes = rows.iter().map(|&(a, k, c)| Tube::new(a, k, c, sc).unwrap()).collect();
    TubeFamily::certify(sc, tubes, s, d).unwrap()
}

fn all_squares(m: u32) -> Vec<GridSquare> {
    let sc = Scale::new(m).unwrap();
    let n = sc.n();
    (0..n)
        .flat_map(|i| (0..n).map(move |j| GridSquare::new(i, j, sc).unwrap()))
        .collect()
}

/// Brute force: test every square against every tube.
fn counts_oracle(f: &TubeFamily) -> HashMap<GridSquare, u32> {
    let mut out = HashMap::new();
    for p in all_squares(f.scale.m()) {
        let c = f.tubes.iter().filter(|t| incident(p, t).unwrap()).count() as u32;
        if c > 0 {
            out.insert(p, c);
        }
    }
    out
}

fn random_family(m: u32, seed: u64, count: usize) -> TubeFamily {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let sc = Scale::new(m).unwrap();
    let n = sc.n();
    let mut tubes = Vec::new();
    while tubes.len() < count {
        let axis = if rng.random_bool(0.5) { Axis::X } else { Axis::Y };
        let k = rng.random_range(-n..=n);
        let c = rng.random_range(-n..=n);
        if let Ok(t) = Tube::new(axis, k, c, sc) {
            tubes.push(t);
        }
    }
    TubeFamily::certify(sc, tubes, 0.5, 0.5).unwrap()
}

#[test]
fn empty_family_has_empty_shading() {
    let f = TubeFamily::certify(Scale::new(5).unwrap(), vec![], 0.5, 0.5).unwrap();
    let sh = full_shading(&f);
    assert_eq!(sh.total(), 0);
}

#[test]
fn full_shading_matches_rasterize_oracle() {
    let f = random_family(7, 4, 50);
    let sh = full_shading(&f);
    for (t, row) in f.tubes.iter().zip(&sh.per_tube) {
        let oracle: Vec<GridSquare> = all_squares(7).into_iter().filter(|p| incident(*p, t).unwrap()).collect();
        assert_eq!(row, &oracle);
        assert_eq!(row, &rasterize(t));
    }
}

#[test]
fn single_tube_shading_size() {
    let f = family_of(8, &[(Axis::X, 0, 100)], 0.5, 0.5);
    let sh = full_shading(&f);
    // the axis runs along a grid line, so two rows on each side are within reach
    assert_eq!(sh.total(), 4 * 256);
}

#[test]
fn incidence_counts_match_oracle() {
    let f = random_family(6, 9, 40);
    let fast: HashMap<GridSquare, u32> = incidence_counts(&f).into_iter().collect();
    assert_eq!(fast, counts_oracle(&f));
}

#[test]
fn crossing_tubes_heavy_squares() {
    let f = family_of(7, &[(Axis::X, 0, 64), (Axis::Y, 0, 64)], 1.0, 0.0);
    let h = heavy_squares(&f, 2);
    assert_eq!(h.len(), 16);
    for p in &h {
        assert!((62..=65).contains(&p.i) && (62..=65).contains(&p.j));
    }
}

#[test]
fn parallel_tubes_have_no_heavy_squares() {
    let f = family_of(7, &[(Axis::X, 3, 10), (Axis::X, 3, 40)], 0.5, 0.5);
    assert!(heavy_squares(&f, 2).is_empty());
}

#[test]
fn shaded_heavy_squares_agree_with_incidence_on_full_shading() {
    let f = random_family(6, 2, 30);
    let sh = full_shading(&f);
    for r in [1, 2, 4, 8] {
        assert_eq!(heavy_squares(&f, r), heavy_squares_shaded(&sh, r));
    }
    let empty = restrict_shading(&sh, &HashSet::new());
    assert!(heavy_squares_shaded(&empty, 1).is_empty());
}

#[test]
fn restriction_identity_and_oracle() {
    let f = random_family(6, 5, 25);
    let sh = full_shading(&f);
    let everything: HashSet<GridSquare> = all_squares(6).into_iter().collect();
    assert_eq!(restrict_shading(&sh, &everything).per_tube, sh.per_tube);
    let keep: HashSet<GridSquare> = all_squares(6).into_iter().filter(|p| (p.i * 7 + p.j * 3) % 5 < 2).collect();
    let r = restrict_shading(&sh, &keep);
    for (a, b) in sh.per_tube.iter().zip(&r.per_tube) {
        let expect: Vec<_> = a.iter().copied().filter(|p| keep.contains(p)).collect();
        assert_eq!(b, &expect);
    }
    assert!(r.k3 <= sh.k3 + 1e-12);
}

#[test]
fn shading_rejects_non_incident_square() {
    let f = family_of(6, &[(Axis::X, 0, 10)], 0.5, 0.5);
    let bad = vec![vec![GridSquare::new(0, 40, f.scale).unwrap()]];
    assert!(Shading::new(&f, bad, 1.0).is_err());
}

#[test]
fn dual_shading_double_counts() {
    let f = random_family(6, 11, 30);
    let pts = all_squares(6);
    let dual = dual_shading(&f, &pts, 1.0);
    let sh = full_shading(&f);
    assert_eq!(dual.total(), sh.total());
    let one = family_of(6, &[(Axis::X, 2, 5)], 0.5, 0.5);
    let d1 = dual_shading(&one, &pts, 1.0);
    for (p, ts) in d1.squares.iter().zip(&d1.tubes) {
        assert_eq!(ts.is_empty(), !incident(*p, &one.tubes[0]).unwrap());
    }
}

#[test]
fn bound_parameters_recompute() {
    let p = BoundParameters::new(0.5, 0.25, 1.0, 1.0, 1.0).unwrap();
    assert!((p.sigma - 0.75).abs() < 1e-12 && (p.alpha - 2.5).abs() < 1e-12);
    assert!(p.consistent());
    let q = BoundParameters::new(0.3, 0.9, 1.0, 1.0, 1.0).unwrap();
    assert!((q.sigma - 0.8).abs() < 1e-12 && q.alpha == 3.0);
}

#[test]
fn single_tube_main_theorem_is_order_one() {
    let f = family_of(8, &[(Axis::X, 1, 20)], 0.5, 0.5);
    let sh = full_shading(&f);
    let p = BoundParameters::from_certificates(&f, &sh).unwrap();
    let rep = verify_main_theorem(&f, &sh, &p).unwrap();
    assert_eq!(rep.lhs, sh.total());
    assert!(rep.ratio > 0.0 && rep.ratio < 16.0, "{}", rep.ratio);
}

#[test]
fn tww_flags_concentrated_shading() {
    let f = family_of(8, &[(Axis::X, 0, 20)], 0.5, 0.5);
    let row: Vec<_> = rasterize(&f.tubes[0]).into_iter().filter(|p| p.i < 4).collect();
    let sh = Shading::new(&f, vec![row], 1.0).unwrap();
    let p = TwoEndsParams {
        t: 1.0,
        k1: 1.0,
        k2: 1.0,
        size: sh.total() as f64,
        eps1: 0.2,
        eps2: 0.05,
    };
    let rep = verify_tww(&f, &sh, &p).unwrap();
    assert_eq!(rep.two_ends, Some(false));
    // one tube: ratio = N^{1/2}δ^{t/2}
    let expect = (sh.total() as f64).sqrt() * (1.0f64 / 256.0).sqrt();
    assert!((rep.ratio - expect).abs() < 1e-12);
}

#[test]
fn csv_row_shape() {
    let f = family_of(6, &[(Axis::X, 0, 20)], 0.5, 0.5);
    let sh = full_shading(&f);
    let p = BoundParameters::from_certificates(&f, &sh).unwrap();
    let row = verify_main_theorem(&f, &sh, &p).unwrap().csv_row();
    assert_eq!(row.split(',').count(), IncidenceReport::CSV_HEADER.split(',').count());
}

#[test]
fn two_ends_diagonal_clusters() {
    // clusters at both ends of a diagonal tube: no ball of radius 1/2 holds both
    let sc = Scale::new(10).unwrap();
    let t = Tube::new(Axis::X, 1024, 0, sc).unwrap();
    let row: Vec<_> = rasterize(&t).into_iter().filter(|p| p.i < 100 || p.i >= 924).collect();
    assert!(two_ends_check(&t, &row, 0.1, 0.01).unwrap());
}

#[test]
fn refine_segment_of_length_root_delta() {
    let m = 10;
    let sc = Scale::new(m).unwrap();
    let t = Tube::new(Axis::X, 0, 512, sc).unwrap();
    // uniform on [256, 288): length δ^{1/2}
    let row: Vec<_> = rasterize(&t)
        .into_iter()
        .filter(|p| p.i >= 256 && p.i < 288 && p.j == 512)
        .collect();
    let eps = 0.1;
    let r = two_ends_refine(&t, &row, 1.0, eps).unwrap();
    let root = (1.0f64 / 1024.0).sqrt();
    assert!(r.length >= root * (1.0 - 1e-9), "L = {}", r.length);
    assert!(r.length <= root.powf(1.0 - 4.0 * eps), "L = {}", r.length);
    assert_eq!(r.count(), 32);
    assert!(r.count_bound_holds && r.length_bound_holds);
}

#[test]
fn rescale_full_family_is_quasi_product() {
    let m = 6;
    let sc = Scale::new(m).unwrap();
    let n = sc.n();
    let tubes: Vec<Tube> = (0..n)
        .flat_map(|k| (0..n).map(move |c| (k, c)))
        .map(|(k, c)| Tube::new(Axis::X, k, c, sc).unwrap())
        .collect();
    let f = TubeFamily::certify(sc, tubes, 1.0, 1.0).unwrap();
    let k = 3;
    for mult in [1u64, 2, 4, 8] {
        let out = segment_rescale(&f, k, (3, 3), mult).unwrap();
        for g in &out.groups {
            assert!(g.family.k1 * g.family.k2 <= 8.0, "K1K2 = {}", g.family.k1 * g.family.k2);
        }
    }
}

#[test]
fn rescale_depth_zero_is_identity() {
    let f = random_family(6, 3, 20);
    let out = segment_rescale(&f, 0, (0, 0), 1).unwrap();
    let tubes: Vec<Tube> = out.groups.iter().flat_map(|g| g.family.tubes.clone()).collect();
    let mut got = tubes;
    got.sort();
    assert_eq!(got, f.tubes);
    assert!(segment_rescale(&f, 2, (4, 0), 1).is_err());
}

#[test]
fn rescaled_bush_copies_are_bushes() {
    // tubes of a single bush all pass through one square; so do their rescalings
    let f = single_bush(0.5, 8).unwrap();
    let all: Vec<Tube> = [1u64, 2, 4, 8, 16]
        .iter()
        .flat_map(|&mult| segment_rescale(&f, 2, (1, 0), mult).unwrap().groups)
        .flat_map(|g| g.family.tubes)
        .collect();
    assert!(!all.is_empty());
    let common: Vec<GridSquare> = rasterize(&all[0])
        .into_iter()
        .filter(|p| all.iter().all(|t| incident(*p, t).unwrap()))
        .collect();
    assert!(!common.is_empty());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn double_counting(seed in 0u64..1000, count in 1usize..25) {
        let f = random_family(6, seed, count);
        let sh = full_shading(&f);
        let by_square: u64 = square_counts(&sh.per_tube, sh.scale).iter().map(|c| c.1 as u64).sum();
        prop_assert_eq!(by_square, sh.total());
    }

    #[test]
    fn restriction_is_monotone(seed in 0u64..1000, modulus in 2i32..7) {
        let f = random_family(6, seed, 20);
        let sh = full_shading(&f);
        let keep: HashSet<GridSquare> = all_squares(6).into_iter().filter(|p| (p.i + 3 * p.j) % modulus != 0).collect();
        let r = restrict_shading(&sh, &keep);
        let before: u64 = heavy_profile(&square_counts(&sh.per_tube, sh.scale)).iter().map(|x| x.1).sum();
        let after: u64 = heavy_profile(&square_counts(&r.per_tube, r.scale)).iter().map(|x| x.1).sum();
        prop_assert!(after <= before);
    }

    #[test]
    fn refine_postconditions(seed in 0u64..10_000, eps in 0.05f64..0.45) {
        let sc = Scale::new(9).unwrap();
        let t = Tube::new(Axis::X, (seed % 200) as i64 - 100, 200, sc).unwrap();
        let row = random_kt_shading(&t, 0.5, seed);
        let r = two_ends_refine(&t, &row, 0.5, eps).unwrap();
        prop_assert!(r.count_bound_holds);
        prop_assert!(r.length_bound_holds);
    }
}
