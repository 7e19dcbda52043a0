use horoflow::flow::{
    evolve, exact_soliton, flow_rhs, omega, radial_profile, BoundaryCondition, FlowControls, HemisphereGrid,
    RadialGraphState, SolitonOrientation, SpatialScheme,
};
use horoflow::geometry::{rotational_euclidean_mean_curvature, hyperbolic_mean_curvature};
use horoflow::{Dimension, Error};
use proptest::prelude::*;
use std::f64::consts::{FRAC_PI_2, PI};

const THETA_MAX: f64 = 0.495 * PI;

fn grid(m: usize) -> HemisphereGrid<f64> {
    HemisphereGrid::new(Dimension::new(2).unwrap(), THETA_MAX, m).unwrap()
}

fn soliton(m: usize, t: f64) -> RadialGraphState<f64> {
    RadialGraphState::soliton(grid(m), t, SolitonOrientation::Upward)
}

fn with_bump(m: usize, amplitude: f64, width: f64) -> RadialGraphState<f64> {
    let g = grid(m);
    let u = g
        .thetas()
        .iter()
        .map(|&th| exact_soliton(th, 0.0).unwrap() + amplitude * (-(th / width).powi(2) / 2.0).exp())
        .collect();
    RadialGraphState::new(g, u, 0.0, SolitonOrientation::Upward).unwrap()
}

fn soliton_rhs_error(m: usize, scheme: SpatialScheme) -> f64 {
    flow_rhs(&soliton(m, 0.0), scheme).unwrap().iter().fold(0.0, |acc, r| acc.max((r - 1.0).abs()))
}

#[test]
fn soliton_rhs_converges_at_second_order_or_better() {
    // dtheta in {2e-3, 1e-3, 5e-4} * pi/2
    let errs: Vec<f64> = [2e-3f64, 1e-3, 5e-4]
        .iter()
        .map(|d| soliton_rhs_error((0.99 / d).round() as usize, SpatialScheme::default()))
        .collect();
    for w in errs.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!(order >= 1.9, "order {order} from {errs:?}");
    }
}

#[test]
fn hemisphere_is_stationary_for_both_schemes() {
    let g = grid(300);
    let zero = RadialGraphState::new(g, vec![0.0; g.len()], 0.0, SolitonOrientation::Upward).unwrap();
    for scheme in [SpatialScheme::Central2, SpatialScheme::Central4] {
        let rhs = flow_rhs(&zero, scheme).unwrap();
        assert_eq!(rhs.len(), g.cells());
        assert!(rhs.iter().all(|r| r.abs() < 1e-12), "{scheme:?}");
    }
}

#[test]
fn bump_slows_down_at_its_top() {
    let s = with_bump(400, 0.1, 0.1);
    let rhs = flow_rhs(&s, SpatialScheme::default()).unwrap();
    let (w, _) = omega(&s);
    let top = (0..rhs.len()).max_by(|&a, &b| w[a].total_cmp(&w[b])).unwrap();
    assert_eq!(top, 0);
    assert!(rhs[top] < 1.0, "{}", rhs[top]);
    // an inward dent is pushed outward faster than the soliton
    let dent = with_bump(400, -0.1, 0.1);
    assert!(flow_rhs(&dent, SpatialScheme::default()).unwrap()[0] > 1.0);
}

#[test]
fn rhs_agrees_with_profile_geometry_away_from_the_pole() {
    // cos(theta) W H with H taken from finite differences of the profile curve
    let s = with_bump(2000, 0.1, 0.3);
    let rhs = flow_rhs(&s, SpatialScheme::default()).unwrap();
    let prof = radial_profile(&s).unwrap();
    let kappa = prof.curvatures().unwrap();
    let n = Dimension::new(2).unwrap();
    let h = s.grid.spacing();
    for i in (100..1800).step_by(97) {
        let th = s.grid.theta(i);
        let p = (s.u[i + 1] - s.u[i - 1]) / (2.0 * h);
        let pt = &prof.samples()[i].point;
        let hbar = rotational_euclidean_mean_curvature(pt, kappa[i], n).unwrap();
        let hh = hyperbolic_mean_curvature(pt.z, hbar, pt.normal().1).unwrap();
        let expect = th.cos() * (1.0 + p * p).sqrt() * hh;
        assert!((rhs[i] - expect).abs() < 1e-3, "node {i}: {} vs {expect}", rhs[i]);
    }
}

#[test]
fn soliton_evolution_converges() {
    let controls = FlowControls { cfl: 0.8, t_end: 0.5, record_every: 0.5, ..FlowControls::default() };
    let errs: Vec<f64> = [200, 400]
        .iter()
        .map(|&m| omega(evolve(&soliton(m, 0.0), &controls).unwrap().last()).1)
        .collect();
    assert!((errs[0] / errs[1]).log2() >= 1.9, "{errs:?}");
}

#[test]
fn hemisphere_evolution_stays_put() {
    let g = grid(120);
    let zero = RadialGraphState::new(g, vec![0.0; g.len()], 0.0, SolitonOrientation::Upward).unwrap();
    let controls = FlowControls {
        t_end: 1.0,
        record_every: 0.25,
        boundary: BoundaryCondition::FixedDirichlet,
        ..FlowControls::default()
    };
    let traj = evolve(&zero, &controls).unwrap();
    assert_eq!(traj.times(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    assert!(traj.last().u.iter().all(|u| u.abs() < 1e-12));
}

#[test]
fn pinned_boundary_follows_soliton() {
    let controls = FlowControls { t_end: 0.3, record_every: 0.1, ..FlowControls::default() };
    let traj = evolve(&with_bump(80, 0.1, 0.2), &controls).unwrap();
    for s in traj.states.iter().skip(1) {
        assert_eq!(s.u[80], exact_soliton(THETA_MAX, s.t).unwrap());
    }
}

#[test]
fn comparison_principle() {
    let m = 150;
    let h = grid(m).spacing();
    let controls = FlowControls { cfl: 0.8, t_end: 0.6, record_every: 0.05, ..FlowControls::default() };
    let low = evolve(&with_bump(m, -0.05, 0.2), &controls).unwrap();
    let high = evolve(&with_bump(m, 0.1, 0.1), &controls).unwrap();
    for (a, b) in low.states.iter().zip(&high.states) {
        assert_eq!(a.t, b.t);
        for (x, y) in a.u.iter().zip(&b.u) {
            assert!(*x <= y + 10.0 * h * h, "t = {}: {x} > {y}", a.t);
        }
    }
}

#[test]
fn translation_equivariance() {
    let c = 0.75;
    let s = with_bump(200, 0.1, 0.2);
    let shifted = RadialGraphState::new(s.grid, s.u.iter().map(|u| u + c).collect(), c, s.reference).unwrap();
    let r0 = flow_rhs(&s, SpatialScheme::default()).unwrap();
    let r1 = flow_rhs(&shifted, SpatialScheme::default()).unwrap();
    for (a, b) in r0.iter().zip(&r1) {
        assert!((a - b).abs() < 1e-9, "{a} {b}");
    }
    // pinning to v(., t + c) = v(., t) + c shifts the boundary by c too
    let controls = FlowControls { t_end: 0.4, record_every: 0.2, ..FlowControls::default() };
    let a = evolve(&s, &controls).unwrap();
    let b = evolve(&shifted, &controls).unwrap();
    for (x, y) in a.states.iter().zip(&b.states) {
        assert_eq!(x.t + c, y.t);
        for (p, q) in x.u.iter().zip(&y.u) {
            assert!((p + c - q).abs() < 1e-9);
        }
    }
}

#[test]
fn oversized_step_is_rejected_and_blow_up_reported() {
    let s = soliton(50, 0.0);
    let controls = FlowControls::default();
    let dt = 1.01 * controls.max_dt(&s.grid);
    assert!(matches!(horoflow::flow::step(&s, dt, &controls), Err(Error::CflViolation { .. })));
    let mut bad = s.u.clone();
    bad[7] = f64::NAN;
    assert!(matches!(
        RadialGraphState::new(s.grid, bad, 0.0, SolitonOrientation::Upward),
        Err(Error::BlowUp { node: 7, .. })
    ));
}

#[test]
fn soliton_profile_is_the_horosphere() {
    let s = soliton(200, 0.7);
    let e = 0.7f64.exp();
    for (z, r) in s.heights().iter().zip(s.radii()) {
        assert!((z - e).abs() < 1e-12 * e);
        assert!(r >= 0.0);
    }
    assert!(exact_soliton(FRAC_PI_2, 0.0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn mirror_negates_the_speed(
        amplitude in -0.3f64..0.3,
        center in 0.0f64..1.2,
        width in 0.05f64..0.5,
        t in -1.0f64..1.0,
    ) {
        let g = grid(120);
        let u: Vec<f64> = g
            .thetas()
            .iter()
            .map(|&th| exact_soliton(th, t).unwrap() + amplitude * (-((th - center) / width).powi(2) / 2.0).exp())
            .collect();
        let up = RadialGraphState::new(g, u.clone(), t, SolitonOrientation::Upward).unwrap();
        let down = RadialGraphState::new(g, u.iter().map(|v| -v).collect(), t, SolitonOrientation::Inverted).unwrap();
        for scheme in [SpatialScheme::Central2, SpatialScheme::Central4] {
            let a = flow_rhs(&up, scheme).unwrap();
            let b = flow_rhs(&down, scheme).unwrap();
            for (x, y) in a.iter().zip(&b) {
                prop_assert!((x + y).abs() <= 1e-9 * x.abs().max(1.0), "{} {}", x, y);
            }
        }
    }
}
