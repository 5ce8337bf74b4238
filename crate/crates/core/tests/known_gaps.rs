//! Measured shortfalls kept as ignored tests, so the measurement can be
//! rerun with `cargo test -- --ignored`.

use frostlab::incidence::bush_heavy_fit;

#[test]
#[ignore = "measured r-exponent at m=10 is -3.45 against the predicted -4; outside the 0.15 band"]
fn heavy_profile_at_one_third() {
    let f = bush_heavy_fit(1.0 / 3.0, 10).unwrap();
    let target = -(1.0 / 3.0 + 1.0) * 3.0;
    assert!((f.fit.slope - target).abs() <= 0.15, "slope {} vs {target}", f.fit.slope);
}
