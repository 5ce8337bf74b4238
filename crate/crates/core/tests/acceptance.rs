//! Acceptance criteria 1 to 12, one PASS/FAIL line each on stderr.
//!
//! Set FROSTLAB_SKIP_R512=1 to drop the R = 2^9 point of criterion 11.

use frostlab::fourier::{decay_exponent_fit, frostman_measure_from_set, l6_integral, DEFAULT_STEP};
use frostlab::fit::ExponentFit;
use frostlab::grid::{rasterize, Axis, Scale, Tube};
use frostlab::harness::{run, ExperimentConfig};
use frostlab::incidence::{
    bush_construction, bush_heavy_fit, full_shading, layered_sharpness_family, random_kt_shading, two_ends_refine,
    verify_main_theorem, BoundParameters,
};
use frostlab::parabola::{
    build_incidence_instance, circle_to_segment, energy3_exhaustive, energy3_oracle, random_triple, standard_triple,
    triple_to_circle, verify_rect_theorem, verify_trilinear_energy, EnergyReport,
};
use frostlab::sets::{cantor_set, validate_frostman, validate_kt, validate_kt_2d, DiscreteSet1D, DiscreteSet2D, Mode, TubeFamily};
use frostlab::sumprod::{few_sums_pipeline, ratioset_cover};
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::io::Write;
use std::time::{Duration, Instant};

// Pinned tolerances.
const REFORM_BAND: (f64, f64) = (1.0 / 16.0, 16.0);
const UNIT_RESIDUAL: f64 = 1e-12;
const HEAVY_TARGET: f64 = -3.0;
const HEAVY_SLACK: f64 = 0.15;
const MAIN_SLACK_EXP: f64 = 0.2;
const RECT_SLACK_EXP: f64 = 0.25;
const DUAL_FACTOR: f64 = 4.0;
const PRODUCT_TUBE_FACTOR: f64 = 8.0;
/// Distinct fractions p/q, 128 ≤ p, q ≤ 256, counted once by a hash set of
/// reduced rationals.
const FRACTIONS_128_256: usize = 14321;
const ATOM_TOLERANCE: f64 = 0.02;
const DECAY_SLACK: f64 = 0.35;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn c1_oracle_equivalence() -> Outcome {
    let mut mismatches = 0;
    for seed in 0..50u64 {
        let count = 1 + (seed % 8) as usize;
        let sets = random_triple(6, count, seed).unwrap();
        let c_tol = 1 + (seed % 3) as i64;
        let fast = energy3_oracle(&sets, c_tol).unwrap().count;
        let slow = energy3_exhaustive(&sets, c_tol).unwrap().count;
        if fast != slow {
            mismatches += 1;
        }
    }
    outcome(mismatches == 0, format!("50 instances, {mismatches} mismatches"))
}

fn c2_reformulation() -> Outcome {
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for m in [6, 7] {
        for seed in 0..5 {
            let sets = standard_triple(m, 0.5, seed, Mode::Random).unwrap();
            let e = energy3_oracle(&sets, 2).unwrap().count as f64;
            let inst = build_incidence_instance(&sets, 0.5, 8.0, 2).unwrap();
            let r = inst.square_sum as f64 / e;
            lo = lo.min(r);
            hi = hi.max(r);
        }
    }
    outcome(
        lo >= REFORM_BAND.0 && hi <= REFORM_BAND.1,
        format!("sum_T (#p in T)^2 / energy in [{lo:.3}, {hi:.3}]"),
    )
}

fn c3_circle_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut exact, mut worst) = (true, 0.0f64);
    for _ in 0..1000 {
        let y = [(); 3].map(|_| Ratio::new(rng.random_range(-512i128..=512), rng.random_range(1i128..=64)));
        let c = triple_to_circle(y);
        exact &= c.identity_holds(y);
        let f = |q: Ratio<i128>| *q.numer() as f64 / *q.denom() as f64;
        let (s1, s2) = (f(c.sigma1), f(c.sigma2));
        if 6.0 * s2 - 2.0 * s1 * s1 <= 0.0 {
            continue;
        }
        match circle_to_segment(s1, s2) {
            Ok(ends) => {
                for (x, z) in ends {
                    worst = worst.max((x * x + z * z - 1.0).abs());
                }
            }
            Err(_) => worst = f64::INFINITY,
        }
    }
    outcome(
        exact && worst <= UNIT_RESIDUAL,
        format!("radius identity exact={exact}, worst endpoint residual {worst:.2e}"),
    )
}

fn c4_heavy_sharpness() -> Outcome {
    let f = bush_heavy_fit(0.5, 10).unwrap();
    outcome(
        (f.fit.slope - HEAVY_TARGET).abs() <= HEAVY_SLACK,
        format!("m=10 s=1/2 r-exponent {:.3} over buckets {:?}", f.fit.slope, f.used),
    )
}

fn main_ratio(family: &TubeFamily) -> f64 {
    let shading = full_shading(family);
    let params = BoundParameters::from_certificates(family, &shading).unwrap();
    verify_main_theorem(family, &shading, &params).unwrap().ratio
}

fn c5_main_envelope() -> Outcome {
    let mut worst = 0.0f64;
    let mut pass = true;
    for m in 6..=10u32 {
        let limit = (MAIN_SLACK_EXP * m as f64).exp2();
        for family in [bush_construction(0.5, m).unwrap().0, layered_sharpness_family(0.5, 2, 4, m).unwrap()] {
            let r = main_ratio(&family);
            worst = worst.max(r / limit);
            pass &= r <= limit;
        }
    }
    outcome(pass, format!("bush and layered, m=6..10: worst ratio/delta^-0.2 = {worst:.3}"))
}

fn c6_rect_envelope() -> Outcome {
    let mut worst = 0.0f64;
    let mut pass = true;
    for m in 6..=9u32 {
        let limit = (RECT_SLACK_EXP * m as f64).exp2();
        for seed in 0..3 {
            let sets = standard_triple(m, 0.5, seed, Mode::Random).unwrap();
            let inst = build_incidence_instance(&sets, 0.5, 8.0, 2).unwrap();
            let r = verify_rect_theorem(&inst.tubes, &inst.squares, 0.5).unwrap().ratio;
            worst = worst.max(r / limit);
            pass &= r <= limit;
        }
    }
    outcome(pass, format!("m=6..9, 3 seeds each: worst ratio/delta^-0.25 = {worst:.3}"))
}

fn c7_two_ends() -> Outcome {
    let scale = Scale::new(10).unwrap();
    let n = scale.n();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut done, mut violations, mut seed) = (0, 0, 0u64);
    while done < 200 {
        seed += 1;
        let axis = if rng.random_bool(0.5) { Axis::X } else { Axis::Y };
        let slope = rng.random_range(-n / 2..=n / 2);
        let intercept = rng.random_range(0..n);
        let Ok(tube) = Tube::new(axis, slope, intercept, scale) else {
            continue;
        };
        let s = [0.3, 0.5, 0.7][rng.random_range(0..3)];
        let eps = rng.random_range(0.05..0.45);
        let row = random_kt_shading(&tube, s, seed);
        if row.is_empty() {
            continue;
        }
        let r = two_ends_refine(&tube, &row, s, eps).unwrap();
        if !(r.count_bound_holds && r.length_bound_holds) {
            violations += 1;
        }
        done += 1;
    }
    outcome(violations == 0, format!("200 shadings at m=10, {violations} violations"))
}

fn c8_validator_laws() -> Outcome {
    let (mut dual_worst, mut tube_worst) = (0.0f64, 0.0f64);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for m in [6u32, 7, 8, 9] {
        let scale = Scale::new(m).unwrap();
        let n = scale.n();
        for s in [0.3, 0.5, 0.7] {
            for seed in 0..20 {
                let a = cantor_set(m, s, seed, Mode::Random).unwrap();
                let kt = validate_kt(&a, s).unwrap().constant;
                let fr = validate_frostman(&a, s).unwrap().constant;
                let mass = a.len() as f64 * scale.delta().powf(s);
                // C_KT ≤ C_F·#A·δ^s and C_F ≤ C_KT·δ^{-s}/#A
                dual_worst = dual_worst.max(kt / (fr * mass)).max(fr / (kt / mass));
                if m > 8 && seed >= 5 {
                    continue;
                }
                let values = a.values();
                for _ in 0..8 {
                    let axis = if rng.random_bool(0.5) { Axis::X } else { Axis::Y };
                    let tube = Tube::new(axis, rng.random_range(-n..=n), rng.random_range(0..n), scale).unwrap();
                    let pts: Vec<(i64, i64)> = rasterize(&tube)
                        .into_iter()
                        .map(|q| (q.i as i64, q.j as i64))
                        .filter(|&(x, y)| values.binary_search(&x).is_ok() && values.binary_search(&y).is_ok())
                        .collect();
                    if pts.is_empty() {
                        continue;
                    }
                    let fibre = DiscreteSet2D::new(scale, pts, "tube fibre");
                    tube_worst = tube_worst.max(validate_kt_2d(&fibre, s).unwrap().constant / kt);
                }
                // the diagonal tube meets A×A along all of A
                let diag = Tube::new(Axis::X, n, 0, scale).unwrap();
                let pts: Vec<(i64, i64)> = rasterize(&diag)
                    .into_iter()
                    .map(|q| (q.i as i64, q.j as i64))
                    .filter(|&(x, y)| values.binary_search(&x).is_ok() && values.binary_search(&y).is_ok())
                    .collect();
                let fibre = DiscreteSet2D::new(scale, pts, "diagonal fibre");
                tube_worst = tube_worst.max(validate_kt_2d(&fibre, s).unwrap().constant / kt);
            }
        }
    }
    outcome(
        dual_worst <= DUAL_FACTOR && tube_worst <= PRODUCT_TUBE_FACTOR,
        format!("duality worst factor {dual_worst:.3}, product-tube worst factor {tube_worst:.3}"),
    )
}

fn c9_ratio_ground_truth() -> Outcome {
    let a = DiscreteSet1D::new(Scale::new(8).unwrap(), (128..=256).collect(), "k/256");
    let got = ratioset_cover(&a, 16).unwrap();
    outcome(
        got == FRACTIONS_128_256,
        format!("cells of side 2^-16: {got}, distinct fractions {FRACTIONS_128_256}"),
    )
}

fn c10_few_sums() -> Outcome {
    let floor = (512f64.ln()).powi(3).recip();
    let mut worst = f64::INFINITY;
    let mut identities = true;
    for s in [1.0 / 3.0, 0.5] {
        for seed in 0..5 {
            let a = cantor_set(8, s, seed, Mode::Random).unwrap().into_upper_half().unwrap();
            let r = few_sums_pipeline(&a, s, 0.1).unwrap();
            identities &= r.identities_hold;
            worst = worst.min(r.pigeonhole_constant).min(r.g_constant);
        }
    }
    outcome(
        identities && worst >= floor,
        format!("m=9, s in {{1/3,1/2}}, 5 seeds: identities={identities}, smallest constant {worst:.3} vs {floor:.5}"),
    )
}

fn c11_fourier() -> Outcome {
    let skip = std::env::var_os("FROSTLAB_SKIP_R512").is_some();
    let atom = DiscreteSet1D::new(Scale::new(6).unwrap(), vec![17], "atom");
    let mu = frostman_measure_from_set(&atom, 0.5).unwrap();
    let w = mu.atoms[0].1;
    let mut atom_err = 0.0f64;
    for r in [8.0, 64.0] {
        let v = l6_integral(&mu, r, DEFAULT_STEP).unwrap().value;
        atom_err = atom_err.max((v / (std::f64::consts::PI * r * r * w.powi(6)) - 1.0).abs());
    }
    let a = cantor_set(12, 0.5, 0, Mode::Random).unwrap();
    let mu = frostman_measure_from_set(&a, 0.5).unwrap();
    let slope = if skip {
        let radii = [64.0, 128.0, 256.0];
        let vals: Vec<f64> = radii.iter().map(|&r| l6_integral(&mu, r, DEFAULT_STEP).unwrap().value).collect();
        ExponentFit::from_values(&radii, &vals).unwrap().slope
    } else {
        decay_exponent_fit(&mu, &[64.0, 128.0, 256.0, 512.0], DEFAULT_STEP).unwrap().fit.slope
    };
    let envelope = 2.0 - 2.5 * 0.5 + DECAY_SLACK;
    outcome(
        atom_err <= ATOM_TOLERANCE && slope <= envelope,
        format!(
            "atom error {:.4}; Cantor m=12 slope {slope:.3} vs {envelope} over R=2^6..2^{}",
            atom_err,
            if skip { 8 } else { 9 }
        ),
    )
}

fn energy_csv(seed: u64) -> String {
    let mut out = format!("{}\n", EnergyReport::CSV_HEADER);
    for m in [6, 7] {
        let sets = standard_triple(m, 0.5, seed, Mode::Random).unwrap();
        out.push_str(&verify_trilinear_energy(&sets, 0.5, 2).unwrap().csv_row());
        out.push('\n');
    }
    out
}

fn c12_determinism() -> Outcome {
    let mut same = true;
    for text in [
        "experiment=incidence\nladder=6,7\nconstructor=cantor\nseeds=3\n",
        "experiment=sumprod\nladder=8,9\nseeds=4\n",
        "experiment=projection\nladder=6,7\nseeds=2\n",
    ] {
        let config = ExperimentConfig::parse(text).unwrap();
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        let fa = run(&config, None, a.path()).unwrap();
        let fb = run(&config, None, b.path()).unwrap();
        for (x, y) in fa.files.iter().zip(&fb.files) {
            same &= std::fs::read(x).unwrap() == std::fs::read(y).unwrap();
        }
        same &= fa.files.len() == fb.files.len();
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
    same &= energy_csv(5) == pool.install(|| energy_csv(5));
    outcome(same, "incidence, sumprod and projection runs and energy rows rerun byte-identically")
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome, Duration); 12] = [
        ("oracle equivalence", c1_oracle_equivalence, Duration::from_secs(60)),
        ("incidence reformulation", c2_reformulation, Duration::from_secs(300)),
        ("circle identities", c3_circle_identities, Duration::from_secs(1)),
        ("heavy-square sharpness", c4_heavy_sharpness, Duration::from_secs(300)),
        ("main-theorem envelope", c5_main_envelope, Duration::from_secs(600)),
        ("rectangular incidence envelope", c6_rect_envelope, Duration::from_secs(600)),
        ("two-ends refinement", c7_two_ends, Duration::from_secs(60)),
        ("validator cross-laws", c8_validator_laws, Duration::from_secs(300)),
        ("ratio-set ground truth", c9_ratio_ground_truth, Duration::from_secs(60)),
        ("few-sums identities", c10_few_sums, Duration::from_secs(300)),
        ("Fourier sanity", c11_fourier, Duration::from_secs(1800)),
        ("determinism", c12_determinism, Duration::from_secs(300)),
    ];
    let mut failed = Vec::new();
    for (i, (name, check, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = check();
        let took = start.elapsed();
        let pass = o.pass && took <= *budget;
        // written past the test harness capture so the lines show up in every run
        let _ = writeln!(
            std::io::stderr(),
            "criterion {:>2} {}: {name} | {} | {:.2}s of {}s",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
            o.detail,
            took.as_secs_f64(),
            budget.as_secs()
        );
        if !pass {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
