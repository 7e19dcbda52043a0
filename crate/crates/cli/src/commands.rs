//! Command runners. Each returns the paths it wrote, in a fixed order.

use std::path::{Path, PathBuf};

use horoflow::flow::{evolve, omega, RadialGraphState, SolitonOrientation};
use horoflow::geometry::{
    rotational_euclidean_mean_curvature, soliton_support, translate_profile, translator_diagnostics,
    translator_residual,
};
use horoflow::ode::{
    catenoid_family_table, chart_residual_horizontal, chart_residual_vertical, integrate_catenoid,
    integrate_grim_reaper,
};
use horoflow::stability::{make_initial, run_stability_experiment, BarrierFamily, ExperimentOptions};
use horoflow::{Dimension, ProfileCurve, ProfilePoint};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{
    dimension, CatenoidConfig, FlowConfig, GrimReaperConfig, RunConfig, StabilityConfig, VerifyConfig,
};
use crate::error::{CliError, Result};
use crate::output::{csv_bytes, json_bytes, write_atomic};

/// Runs `config`, writing artifacts into `out`, with at most `threads`
/// worker threads for independent sub-runs.
pub fn run(config: &RunConfig, out: &Path, threads: usize) -> Result<Vec<PathBuf>> {
    match config {
        RunConfig::Catenoid(c) => catenoid(c, out, threads),
        RunConfig::GrimReaper(c) => grim_reaper(c, out),
        RunConfig::Flow(c) => flow(c, out),
        RunConfig::Stability(c) => stability(c, out, threads),
        RunConfig::Verify(c) => verify(c, out, threads),
    }
}

/// Maps `f` over `items` on up to `threads` scoped threads, keeping order.
fn parallel_map<I, O, F>(items: &[I], threads: usize, f: F) -> Vec<O>
where
    I: Sync,
    O: Send,
    F: Fn(&I) -> O + Sync,
{
    let threads = threads.clamp(1, items.len().max(1));
    if threads == 1 {
        return items.iter().map(&f).collect();
    }
    let chunk = items.len().div_ceil(threads);
    std::thread::scope(|s| {
        let handles: Vec<_> = items
            .chunks(chunk)
            .map(|part| {
                let f = &f;
                s.spawn(move || part.iter().map(f).collect::<Vec<O>>())
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker thread panicked")).collect()
    })
}

fn profile_csv(curve: &ProfileCurve) -> Result<(Vec<u8>, f64)> {
    let diag = translator_diagnostics(curve)?;
    let max_residual = diag.iter().fold(0.0f64, |acc, g| acc.max(g.residual));
    let rows = curve.samples().iter().zip(&diag).map(|(smp, g)| {
        let p = smp.point;
        (smp.sigma, p.s, p.z, p.alpha, g.mean_curvature, g.support, g.residual)
    });
    Ok((csv_bytes(&["sigma", "s", "z", "alpha", "H", "support", "residual"], rows)?, max_residual))
}

#[derive(Serialize)]
struct CatenoidSummary {
    n: usize,
    r: f64,
    r_minus: f64,
    r_plus: f64,
    asym_err: f64,
    escape_distance: f64,
    max_residual: f64,
}

fn catenoid(c: &CatenoidConfig, out: &Path, threads: usize) -> Result<Vec<PathBuf>> {
    let n = dimension("n", c.n)?;
    let ctl = c.integrator.controls();
    let mut written = Vec::new();
    if let Some(r) = c.r {
        let cat = integrate_catenoid(n, r, &ctl)?;
        let (csv, max_residual) = profile_csv(&cat.glued_curve())?;
        written.push(write_atomic(out, "profile.csv", &csv)?);
        let summary = CatenoidSummary {
            n: c.n,
            r,
            r_minus: cat.r_minus,
            r_plus: cat.r_plus,
            asym_err: cat.asymptote_error,
            escape_distance: cat.escape_distance(),
            max_residual,
        };
        written.push(write_atomic(out, "summary.json", &json_bytes(&summary)?)?);
    }
    if let Some(radii) = &c.radii {
        let chunks: Vec<&[f64]> = radii.chunks(radii.len().div_ceil(threads.max(1))).collect();
        let tables = parallel_map(&chunks, threads, |part| catenoid_family_table(n, part, &ctl));
        let mut rows = Vec::with_capacity(radii.len());
        for table in tables {
            rows.extend(table?.into_iter().map(|row| (row.r, row.r_minus, row.r_plus, row.asymptote_error)));
        }
        let csv = csv_bytes(&["r", "r_minus", "r_plus", "asym_err"], rows)?;
        written.push(write_atomic(out, "family.csv", &csv)?);
    }
    Ok(written)
}

#[derive(Serialize)]
struct GrimReaperSummary {
    n: usize,
    h0: f64,
    lambda: f64,
    lambda_minus: f64,
    lambda_plus: f64,
    asym_err: f64,
    max_residual: f64,
}

fn grim_reaper(c: &GrimReaperConfig, out: &Path) -> Result<Vec<PathBuf>> {
    let g = integrate_grim_reaper(dimension("n", c.n)?, c.h0, c.lambda, &c.integrator.controls())?;
    let (csv, max_residual) = profile_csv(&g.curve)?;
    let summary = GrimReaperSummary {
        n: c.n,
        h0: c.h0,
        lambda: c.lambda,
        lambda_minus: g.lambda_minus,
        lambda_plus: g.lambda_plus,
        asym_err: g.asymptote_error,
        max_residual,
    };
    Ok(vec![write_atomic(out, "profile.csv", &csv)?, write_atomic(out, "summary.json", &json_bytes(&summary)?)?])
}

fn flow(c: &FlowConfig, out: &Path) -> Result<Vec<PathBuf>> {
    let grid = c.grid.grid(dimension("n", c.n)?)?;
    let controls = c.controls()?;
    let start = match &c.perturbation {
        Some(p) => make_initial(&p.perturbation(), grid)?,
        None => RadialGraphState::soliton(grid, 0.0, SolitonOrientation::Upward),
    };
    let traj = evolve(&start, &controls)?;
    let thetas = grid.thetas();
    let mut rows = Vec::with_capacity(traj.states.len() * grid.len());
    for state in &traj.states {
        let (w, _) = omega(state);
        for ((&theta, &u), &w) in thetas.iter().zip(&state.u).zip(&w) {
            rows.push((state.t, theta, u, w));
        }
    }
    let csv = csv_bytes(&["t", "theta", "u", "omega"], rows)?;
    Ok(vec![write_atomic(out, "trajectory.csv", &csv)?])
}

fn stability(c: &StabilityConfig, out: &Path, threads: usize) -> Result<Vec<PathBuf>> {
    let n = dimension("n", c.n)?;
    let grid = c.grid.grid(n)?;
    let controls = c.controls()?;
    let family = BarrierFamily::standard(n)?;
    let p = c.perturbation.perturbation();
    let mut jobs = vec![(p, SolitonOrientation::Upward, "report.json")];
    if c.mirror {
        jobs.push((p.negated(), SolitonOrientation::Inverted, "mirror_report.json"));
    }
    let reports = parallel_map(&jobs, threads, |(p, reference, _)| {
        let options = ExperimentOptions { barrier_epsilon: c.barrier_epsilon, reference: *reference };
        run_stability_experiment(p, grid, &controls, &c.eps, &family, &options)
    });
    let mut written = Vec::new();
    for ((_, _, name), report) in jobs.iter().zip(reports) {
        written.push(write_atomic(out, name, &json_bytes(&report?)?)?);
    }
    Ok(written)
}

#[derive(Serialize)]
struct CatenoidCheck {
    n: usize,
    r: f64,
    translator_residual: f64,
    chart_residual_vertical: f64,
    chart_residual_horizontal: f64,
    min_second_derivative: f64,
    /// Residual change after a hyperbolic translation by `translation`.
    translation: f64,
    translated_residual_change: f64,
    r_minus: f64,
    r_plus: f64,
    asym_err: f64,
    pass: bool,
}

#[derive(Serialize)]
struct GrimReaperCheck {
    n: usize,
    h0: f64,
    lambda: f64,
    translator_residual: f64,
    chart_residual_vertical: f64,
    lambda_minus: f64,
    lambda_plus: f64,
    asym_err: f64,
    pass: bool,
}

#[derive(Serialize)]
struct IdentityCheck {
    tuples: usize,
    max_mean_curvature_error: f64,
    max_support_error: f64,
    pass: bool,
}

#[derive(Serialize)]
struct VerifyReport {
    seed: u64,
    tolerance: f64,
    catenoids: Vec<CatenoidCheck>,
    grim_reapers: Vec<GrimReaperCheck>,
    chart_identities: IdentityCheck,
    all_pass: bool,
}

/// Relative error with an absolute floor for values near zero.
fn mixed_error(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

/// Rotational curvature and support from the vertical-graph chart formulas
/// against the angle form, on random graph data.
fn chart_identities(seed: u64, tuples: usize) -> Result<IdentityCheck> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut h_err, mut p_err) = (0.0f64, 0.0f64);
    for _ in 0..tuples {
        let n = Dimension::new(rng.gen_range(2..=6))?;
        let nn = n.get() as f64;
        let s: f64 = rng.gen_range(0.05..20.0);
        let phi: f64 = rng.gen_range(0.05..20.0);
        let d1: f64 = rng.gen_range(-10.0..10.0);
        let d2: f64 = rng.gen_range(-50.0..50.0);
        let w2 = 1.0 + d1 * d1;
        let rho = w2.powf(-0.5);
        let p = ProfilePoint::new(s, phi, d1.atan())?;
        let hbar = rotational_euclidean_mean_curvature(&p, d2 * rho * rho * rho, n)?;
        h_err = h_err.max(mixed_error(hbar, rho / nn * (d2 / w2 + (nn - 1.0) * d1 / s)));
        p_err = p_err.max(mixed_error(soliton_support(&p)?, rho * (phi - s * d1) / phi));
    }
    Ok(IdentityCheck {
        tuples,
        max_mean_curvature_error: h_err,
        max_support_error: p_err,
        pass: h_err < 1e-10 && p_err < 1e-10,
    })
}

fn verify(c: &VerifyConfig, out: &Path, threads: usize) -> Result<Vec<PathBuf>> {
    let ctl = c.integrator.controls();
    let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
    let cat_cases: Vec<(usize, f64, f64)> = c
        .n
        .iter()
        .flat_map(|&n| c.radii.iter().map(move |&r| (n, r)))
        .map(|(n, r)| (n, r, rng.gen_range(-2.0..2.0)))
        .collect();
    let grim_cases: Vec<(usize, f64)> = c.n.iter().flat_map(|&n| c.lambdas.iter().map(move |&l| (n, l))).collect();
    let identity_seed = rng.gen();

    let catenoids = parallel_map(&cat_cases, threads, |&(n, r, shift)| -> Result<CatenoidCheck> {
        let dim = dimension("n", n)?;
        let cat = integrate_catenoid(dim, r, &ctl)?;
        let curve = cat.glued_curve();
        let residual = translator_residual(&curve)?;
        let vertical = chart_residual_vertical(&cat.upper_branch, dim, ctl.alpha_switch)?
            .max(chart_residual_vertical(&cat.lower_branch, dim, ctl.alpha_switch)?);
        let neck = chart_residual_horizontal(&curve, dim, ctl.alpha_switch)?;
        let moved = (translator_residual(&translate_profile(&curve, shift))? - residual).abs();
        let pass = residual < c.tolerance
            && vertical < c.tolerance
            && neck.residual < c.tolerance
            && neck.min_second_derivative > 0.0
            && moved < 1e-10;
        Ok(CatenoidCheck {
            n,
            r,
            translator_residual: residual,
            chart_residual_vertical: vertical,
            chart_residual_horizontal: neck.residual,
            min_second_derivative: neck.min_second_derivative,
            translation: shift,
            translated_residual_change: moved,
            r_minus: cat.r_minus,
            r_plus: cat.r_plus,
            asym_err: cat.asymptote_error,
            pass,
        })
    });
    let grim_reapers = parallel_map(&grim_cases, threads, |&(n, lambda)| -> Result<GrimReaperCheck> {
        let dim = dimension("n", n)?;
        let g = integrate_grim_reaper(dim, c.h0, lambda, &ctl)?;
        let residual = translator_residual(&g.curve)?;
        let vertical = chart_residual_vertical(&g.curve, dim, ctl.alpha_switch)?;
        Ok(GrimReaperCheck {
            n,
            h0: c.h0,
            lambda,
            translator_residual: residual,
            chart_residual_vertical: vertical,
            lambda_minus: g.lambda_minus,
            lambda_plus: g.lambda_plus,
            asym_err: g.asymptote_error,
            pass: residual < c.tolerance && vertical < c.tolerance,
        })
    });
    let catenoids = catenoids.into_iter().collect::<Result<Vec<_>>>()?;
    let grim_reapers = grim_reapers.into_iter().collect::<Result<Vec<_>>>()?;
    let chart_identities = chart_identities(identity_seed, c.random_tuples)?;
    let all_pass =
        catenoids.iter().all(|x| x.pass) && grim_reapers.iter().all(|x| x.pass) && chart_identities.pass;
    let report = VerifyReport { seed: c.seed, tolerance: c.tolerance, catenoids, grim_reapers, chart_identities, all_pass };
    let path = write_atomic(out, "verify.json", &json_bytes(&report)?)?;
    if !all_pass {
        return Err(CliError::Verification(format!("see {}", path.display())));
    }
    Ok(vec![path])
}
