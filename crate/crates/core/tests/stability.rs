use horoflow::flow::{FlowControls, HemisphereGrid, SolitonOrientation};
use horoflow::stability::{
    barrier_envelope, epsilon_radius_calibration, make_initial, run_stability_experiment, BarrierFamily,
    ExperimentOptions, Perturbation, PerturbationKind, StabilityReport,
};
use horoflow::{Dimension, Error};
use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::OnceLock;

fn dim() -> Dimension {
    Dimension::new(2).unwrap()
}

fn grid(m: usize) -> HemisphereGrid<f64> {
    HemisphereGrid::new(dim(), 0.495 * PI, m).unwrap()
}

fn family() -> &'static BarrierFamily<f64> {
    static FAMILY: OnceLock<BarrierFamily<f64>> = OnceLock::new();
    FAMILY.get_or_init(|| BarrierFamily::standard(dim()).unwrap())
}

fn controls() -> FlowControls<f64> {
    FlowControls { cfl: 0.8, t_end: 1.0, record_every: 0.1, ..FlowControls::default() }
}

fn bump(kind: PerturbationKind, amplitude: f64, width: f64) -> Perturbation<f64> {
    Perturbation { kind, amplitude, center: 0.0, width: width * FRAC_PI_2 }
}

fn run(p: &Perturbation<f64>, m: usize, options: &ExperimentOptions<f64>) -> StabilityReport<f64> {
    run_stability_experiment(p, grid(m), &controls(), &[0.05, 0.01], family(), options).unwrap()
}

#[test]
fn unperturbed_soliton_stays_inside_barriers() {
    let runs: Vec<_> = [200, 400]
        .iter()
        .map(|&m| run(&bump(PerturbationKind::GaussianBump, 0.0, 0.2), m, &ExperimentOptions::default()))
        .collect();
    let r = &runs[1];
    assert!(r.barrier_ok);
    assert!(r.barrier_margin > 0.0);
    assert_eq!(r.sup_omega[0], 0.0);
    // pure discretization error, shrinking at least quadratically
    let (coarse, fine) = (runs[0].sup_omega.last().unwrap(), r.sup_omega.last().unwrap());
    assert!(*fine < 1e-3 && coarse / fine > 4.0, "{coarse} {fine}");
    assert!(r.times.windows(2).all(|w| w[0] < w[1]));
    assert_eq!(r.times.len(), 11);
}

#[test]
fn bumps_decay_by_a_factor_of_ten() {
    let m = 400;
    let h = grid(m).spacing();
    let floor = run(&bump(PerturbationKind::GaussianBump, 0.0, 0.2), m, &ExperimentOptions::default()).sup_omega;
    for kind in [PerturbationKind::GaussianBump, PerturbationKind::CompactBump] {
        for amplitude in [0.1, -0.1] {
            let r = run(&bump(kind, amplitude, 0.2), m, &ExperimentOptions::default());
            assert!((r.sup_omega[0] - 0.1).abs() < 1e-12);
            assert!(*r.sup_omega.last().unwrap() < 0.01, "{kind:?} {amplitude}: {:?}", r.sup_omega);
            assert!(r.barrier_ok, "{kind:?} {amplitude}: margin {}", r.barrier_margin);
            assert!(r.time_to_eps[0].time.unwrap() <= r.time_to_eps[1].time.unwrap());
            // above the unperturbed discretization error the positive part never rises beyond the slack
            for (k, w) in r.positive_sup.windows(2).enumerate() {
                if w[1] > floor[k + 1] {
                    assert!(w[1] <= w[0] + 10.0 * h * h, "{kind:?} {amplitude}: {:?} vs {floor:?}", r.positive_sup);
                }
            }
        }
    }
}

#[test]
fn decaying_tail_perturbation_decays() {
    let m = 400;
    let r = run(&bump(PerturbationKind::DecayingTail, 0.1, 0.0), m, &ExperimentOptions::default());
    assert!(r.barrier_ok);
    // a global mode: slower than the bumps, but strictly decaying
    assert!(r.sup_omega.windows(2).all(|w| w[1] < w[0]), "{:?}", r.sup_omega);
    assert!(*r.sup_omega.last().unwrap() < 0.3 * r.sup_omega[0]);
}

#[test]
fn mirrored_run_matches() {
    let p = bump(PerturbationKind::CompactBump, 0.1, 0.05);
    let h = grid(120).spacing();
    let up = run(&p, 120, &ExperimentOptions::default());
    let down = run(&p.negated(), 120, &ExperimentOptions { reference: SolitonOrientation::Inverted, ..Default::default() });
    assert_eq!(up.times, down.times);
    for (a, b) in up.sup_omega.iter().zip(&down.sup_omega) {
        assert!((a - b).abs() <= 10.0 * h * h);
    }
    assert_eq!(up.barrier_ok, down.barrier_ok);
}

#[test]
fn calibration_radius_drives_neck_choice() {
    let g = grid(300);
    let s = make_initial(&bump(PerturbationKind::GaussianBump, 0.1, 0.2), g).unwrap();
    assert_eq!(epsilon_radius_calibration(&s, 0.2).unwrap(), 0.0);
    let r = epsilon_radius_calibration(&s, 0.1).unwrap();
    assert!(r > 0.0);
    let cat = family().select(0.1, r).unwrap();
    let env = barrier_envelope(0.1, 0.0, (cat, cat)).unwrap();
    assert!(env.lower_neck() >= r);
    // a narrower slab needs a smaller neck
    let wide = family().select(0.5, 0.0).unwrap();
    let narrow = family().select(0.05, 0.0).unwrap();
    assert!(narrow.neck_radius <= wide.neck_radius);
}

#[test]
fn degenerate_barrier_width_is_rejected() {
    let cat = family().select(0.3, 0.0).unwrap();
    assert!(matches!(barrier_envelope(0.0, 0.0, (cat, cat)), Err(Error::NoBarrier(_))));
    assert!(matches!(family().select(0.0, 0.0), Err(Error::NoBarrier(_))));
}

#[test]
fn report_round_trips_through_json() {
    let r = run(&bump(PerturbationKind::GaussianBump, 0.1, 0.05), 60, &ExperimentOptions::default());
    let text = serde_json::to_string(&r).unwrap();
    let back: StabilityReport<f64> = serde_json::from_str(&text).unwrap();
    assert_eq!(back, r);
}
