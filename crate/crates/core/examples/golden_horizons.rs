//! Reference runs behind the frozen decay horizons.
//!
//! Evolves the standard perturbation suite at M = 1600 and prints the first
//! recorded time with sup|omega| < 0.01. Takes several minutes in release mode.

use horoflow::flow::{FlowControls, HemisphereGrid};
use horoflow::stability::{run_stability_experiment, BarrierFamily, ExperimentOptions, Perturbation, PerturbationKind};
use horoflow::Dimension;
use std::f64::consts::FRAC_PI_2;

fn main() {
    let m: usize = std::env::args().nth(1).map(|a| a.parse().expect("grid size")).unwrap_or(1600);
    let n = Dimension::new(2).unwrap();
    let grid = HemisphereGrid::new(n, 0.99 * FRAC_PI_2, m).unwrap();
    let controls = FlowControls { cfl: 0.8, t_end: 1.0, record_every: 0.05, ..Default::default() };
    let family = BarrierFamily::<f64>::standard(n).unwrap();
    let mut cases = Vec::new();
    for kind in [PerturbationKind::GaussianBump, PerturbationKind::CompactBump] {
        for w in [0.05, 0.2] {
            for a in [0.1, -0.1] {
                cases.push(Perturbation { kind, amplitude: a, center: 0.0, width: w * FRAC_PI_2 });
            }
        }
    }
    let results: Vec<_> = std::thread::scope(|s| {
        let handles: Vec<_> = cases
            .iter()
            .map(|p| {
                let (family, controls) = (&family, &controls);
                s.spawn(move || {
                    run_stability_experiment(p, grid, controls, &[0.01], family, &ExperimentOptions::default()).unwrap()
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    for (p, r) in cases.iter().zip(&results) {
        println!(
            "{:?} amplitude {:+} width {:.4}: horizon {:?}, final sup {:.3e}",
            p.kind, p.amplitude, p.width, r.time_to_eps[0].time, r.sup_omega.last().unwrap()
        );
    }
}
