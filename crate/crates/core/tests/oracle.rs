//! Catenoid and grim reaper asymptotes against a dense fixed-step RK4 oracle.

mod common;

use common::oracle::{catenoid_asymptotes, grim_reaper_asymptotes};
use horoflow::ode::{integrate_catenoid, integrate_grim_reaper};
use horoflow::{Dimension, IntegratorControls};

/// Oracle values at step 1e-5 with Richardson extrapolation against step 2e-5,
/// truncated at |s| = 50. Catenoid: n = 2, neck radius 1.
const CATENOID_R_MINUS: f64 = 6.45446560996141172e-1;
const CATENOID_R_PLUS: f64 = 1.69061483637185184;
/// Grim reaper: n = 2, h0 = 1, slope 1.
const GRIM_LAMBDA_MINUS: f64 = 5.02169524548566559e-1;
const GRIM_LAMBDA_PLUS: f64 = 2.31730244838095523;

fn two() -> Dimension {
    Dimension::new(2).unwrap()
}

#[test]
fn catenoid_matches_oracle() {
    let c = integrate_catenoid(two(), 1.0, &IntegratorControls::default()).unwrap();
    let bound = 10.0 * c.asymptote_error;
    assert!((c.r_plus - CATENOID_R_PLUS).abs() < bound, "{} vs {}", c.r_plus, CATENOID_R_PLUS);
    assert!((c.r_minus - CATENOID_R_MINUS).abs() < bound, "{} vs {}", c.r_minus, CATENOID_R_MINUS);
}

#[test]
fn grim_reaper_matches_oracle() {
    let g = integrate_grim_reaper(two(), 1.0, 1.0, &IntegratorControls::default()).unwrap();
    let bound = 10.0 * g.asymptote_error;
    assert!((g.lambda_plus - GRIM_LAMBDA_PLUS).abs() < bound);
    assert!((g.lambda_minus - GRIM_LAMBDA_MINUS).abs() < bound);
    assert!(0.0 < g.lambda_minus && g.lambda_minus < 1.0);
    assert!(g.lambda_plus > 1.0);
}

#[test]
fn frozen_values_agree_with_coarser_oracle() {
    // a tenfold coarser run lands within 1e-9 of the frozen constants
    let (m, p) = catenoid_asymptotes(2, 1.0, 1e-4, 50.0);
    assert!((m - CATENOID_R_MINUS).abs() < 1e-9 && (p - CATENOID_R_PLUS).abs() < 1e-9, "{m} {p}");
    let (gm, gp) = grim_reaper_asymptotes(2, 1.0, 1.0, 1e-4, 50.0);
    assert!((gm - GRIM_LAMBDA_MINUS).abs() < 1e-9 && (gp - GRIM_LAMBDA_PLUS).abs() < 1e-9, "{gm} {gp}");
}

#[test]
#[ignore = "recomputes the golden values at full resolution (several seconds)"]
fn recompute_golden_values() {
    let (m, p) = catenoid_asymptotes(2, 1.0, 1e-5, 50.0);
    let (gm, gp) = grim_reaper_asymptotes(2, 1.0, 1.0, 1e-5, 50.0);
    println!("catenoid r_minus {m:.17e} r_plus {p:.17e}");
    println!("grim reaper lambda_minus {gm:.17e} lambda_plus {gp:.17e}");
    assert_eq!((m, p, gm, gp), (CATENOID_R_MINUS, CATENOID_R_PLUS, GRIM_LAMBDA_MINUS, GRIM_LAMBDA_PLUS));
}
