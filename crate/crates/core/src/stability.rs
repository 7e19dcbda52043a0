//! Perturbations of the horosphere soliton, their evolution, and the
//! translating catenoids used as barriers away from the axis.
//!
//! Barrier geometry is measured in log-height: a graph node at height `z`
//! is compared with the barrier heights through `log z`, so margins are in
//! the same units as `omega`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flow::{evolve_with, omega, FlowControls, HemisphereGrid, RadialGraphState, SolitonOrientation};
use crate::geometry::Dimension;
use crate::ode::{integrate_catenoid, CatenoidProfile, IntegratorControls};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PerturbationKind {
    /// `a exp(-(theta - c)^2 / (2 w^2))`.
    GaussianBump,
    /// `a exp(1 - 1 / (1 - x^2))` with `x = (theta - c) / w`, zero for `|x| >= 1`.
    CompactBump,
    /// `a cos^2 theta`; center and width are not used.
    DecayingTail,
}

/// Initial deviation `delta(theta)` from the soliton.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Perturbation<T> {
    pub kind: PerturbationKind,
    pub amplitude: T,
    pub center: T,
    pub width: T,
}

impl<T: Real> Perturbation<T> {
    pub fn value(&self, theta: T) -> T {
        let a = self.amplitude;
        match self.kind {
            PerturbationKind::GaussianBump => {
                let x = (theta - self.center) / self.width;
                a * (-T::lit(0.5) * x * x).exp()
            }
            PerturbationKind::CompactBump => {
                let x = (theta - self.center) / self.width;
                if x.abs() < T::one() {
                    a * (T::one() - T::one() / (T::one() - x * x)).exp()
                } else {
                    T::zero()
                }
            }
            PerturbationKind::DecayingTail => {
                let c = theta.cos();
                a * c * c
            }
        }
    }

    /// Same shape with the opposite sign.
    pub fn negated(&self) -> Self {
        Perturbation { amplitude: -self.amplitude, ..*self }
    }

    fn validate(&self, grid: &HemisphereGrid<T>) -> Result<()> {
        if !self.amplitude.is_finite() {
            return Err(Error::InvalidPerturbation(format!("amplitude {} is not finite", self.amplitude)));
        }
        if self.kind != PerturbationKind::DecayingTail && !(self.width > T::zero() && self.width.is_finite()) {
            return Err(Error::InvalidPerturbation(format!("width {} must be positive", self.width)));
        }
        if !self.center.is_finite() {
            return Err(Error::InvalidPerturbation(format!("center {} is not finite", self.center)));
        }
        // the deviation must have decayed at the truncation angle, down to
        // the cos^2 envelope that vanishes on the ideal boundary
        let c = grid.theta_max().cos();
        let allowed = T::lit(1e-12).max(self.amplitude.abs() * c * c);
        let tail = self.value(grid.theta_max()).abs();
        if tail > allowed {
            return Err(Error::InvalidPerturbation(format!(
                "deviation {tail} at theta_max exceeds the decay bound {allowed}"
            )));
        }
        Ok(())
    }
}

/// `u_0 = v(., 0) + delta` on the grid, for the upward soliton.
pub fn make_initial<T: Real>(perturbation: &Perturbation<T>, grid: HemisphereGrid<T>) -> Result<RadialGraphState<T>> {
    make_initial_around(perturbation, grid, SolitonOrientation::Upward)
}

/// `u_0 = reference soliton + delta`.
pub fn make_initial_around<T: Real>(
    perturbation: &Perturbation<T>,
    grid: HemisphereGrid<T>,
    reference: SolitonOrientation,
) -> Result<RadialGraphState<T>> {
    perturbation.validate(&grid)?;
    let mut state = RadialGraphState::soliton(grid, T::zero(), reference);
    for (u, th) in state.u.iter_mut().zip(grid.thetas()) {
        *u = *u + perturbation.value(th);
    }
    RadialGraphState::new(grid, state.u, state.t, reference)
}

/// Smallest horizontal radius `R` of the graph such that every node beyond
/// it has `|omega_0| <= eps / 2`; zero when the whole graph qualifies.
pub fn epsilon_radius_calibration<T: Real>(state0: &RadialGraphState<T>, eps: T) -> Result<T> {
    if !(eps > T::zero()) {
        return Err(Error::InvalidParameter(format!("epsilon {eps} must be positive")));
    }
    let (w, _) = omega(state0);
    let half = eps * T::lit(0.5);
    let radii = state0.radii();
    Ok(match w.iter().rposition(|x| x.abs() > half) {
        Some(i) => radii[i],
        None => T::zero(),
    })
}

/// Catenoids with necks on the height-1 horosphere, sorted by neck radius.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BarrierFamily<T> {
    pub catenoids: Vec<CatenoidProfile<T>>,
}

impl<T: Real> BarrierFamily<T> {
    pub fn new(n: Dimension, radii: &[T], controls: &IntegratorControls<T>) -> Result<Self> {
        for w in radii.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::InvalidParameter("radii must be strictly increasing".into()));
            }
        }
        let catenoids = radii
            .iter()
            .map(|&r| {
                let ctl = IntegratorControls { s_max: crate::ode::family_s_max(r, controls.s_max), ..*controls };
                integrate_catenoid(n, r, &ctl)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(BarrierFamily { catenoids })
    }

    /// Radii `10^(k/4)` for `k = -12..=12`.
    pub fn standard(n: Dimension) -> Result<Self> {
        let radii: Vec<T> = (-12..=12).map(|k| T::lit(10f64.powf(k as f64 / 4.0))).collect();
        Self::new(n, &radii, &IntegratorControls::default())
    }

    /// Smallest catenoid whose asymptotic slab has log-width below `eps / 2`
    /// and whose neck, once scaled below the height-1 horosphere, has radius
    /// at least `min_neck`.
    pub fn select(&self, eps: T, min_neck: T) -> Result<&CatenoidProfile<T>> {
        if !(eps > T::zero()) {
            return Err(Error::NoBarrier(format!("epsilon {eps} must be positive")));
        }
        self.catenoids
            .iter()
            .find(|c| fits_slab(c, eps) && lower_scale(c, eps) * c.neck_radius >= min_neck)
            .ok_or_else(|| Error::NoBarrier(format!("no catenoid fits a slab of log-width {} with neck >= {min_neck}", eps * T::lit(0.5))))
    }
}

fn fits_slab<T: Real>(c: &CatenoidProfile<T>, eps: T) -> bool {
    (c.r_plus / c.r_minus).ln() < eps * T::lit(0.5)
}

/// Dilation putting the top asymptote of `c` at height `e^{-eps/2}`.
fn lower_scale<T: Real>(c: &CatenoidProfile<T>, eps: T) -> T {
    (-eps * T::lit(0.5)).exp() / c.r_plus
}

/// Dilation putting the bottom asymptote of `c` at height `e^{eps/2}`.
fn upper_scale<T: Real>(c: &CatenoidProfile<T>, eps: T) -> T {
    (eps * T::lit(0.5)).exp() / c.r_minus
}

/// Barrier heights at time `t`: the upper branch of the catenoid below the
/// slab `(e^{-eps/2}, e^{eps/2})` and the lower branch of the one above it,
/// both dilated by `e^t`.
#[derive(Clone, Copy, Debug)]
pub struct BarrierEnvelope<'a, T> {
    below: &'a CatenoidProfile<T>,
    above: &'a CatenoidProfile<T>,
    below_scale: T,
    above_scale: T,
}

impl<'a, T: Real> BarrierEnvelope<'a, T> {
    /// Neck radius of the lower barrier.
    pub fn lower_neck(&self) -> T {
        self.below_scale * self.below.neck_radius
    }

    /// Neck radius of the upper barrier.
    pub fn upper_neck(&self) -> T {
        self.above_scale * self.above.neck_radius
    }

    /// Height of the lower barrier at radius `s`, `None` inside its neck.
    pub fn lower(&self, s: T) -> Option<T> {
        self.below.branch_height(s / self.below_scale, true).map(|z| z * self.below_scale)
    }

    /// Height of the upper barrier at radius `s`, `None` inside its neck.
    pub fn upper(&self, s: T) -> Option<T> {
        self.above.branch_height(s / self.above_scale, false).map(|z| z * self.above_scale)
    }
}

/// Barriers for the slab of log-half-width `eps / 2` around the height-1
/// horosphere, translated to time `t`. `catenoids` are `(Sigma^-, Sigma^+)`
/// before scaling, with necks on the height-1 horosphere.
pub fn barrier_envelope<'a, T: Real>(
    epsilon: T,
    t: T,
    catenoids: (&'a CatenoidProfile<T>, &'a CatenoidProfile<T>),
) -> Result<BarrierEnvelope<'a, T>> {
    if !(epsilon > T::zero()) {
        return Err(Error::NoBarrier(format!("epsilon {epsilon} must be positive")));
    }
    let (below, above) = catenoids;
    for c in [below, above] {
        if !fits_slab(c, epsilon) {
            return Err(Error::NoBarrier(format!(
                "catenoid with neck {} spans log-width {}, more than {}",
                c.neck_radius,
                (c.r_plus / c.r_minus).ln(),
                epsilon * T::lit(0.5)
            )));
        }
    }
    let grow = t.exp();
    Ok(BarrierEnvelope {
        below,
        above,
        below_scale: lower_scale(below, epsilon) * grow,
        above_scale: upper_scale(above, epsilon) * grow,
    })
}

/// Smallest log-height margin of the graph against the envelope over the
/// nodes beyond the barrier necks, and the largest log-height step between
/// neighbouring nodes. `None` when no node lies beyond either neck.
pub fn barrier_margin<T: Real>(state: &RadialGraphState<T>, env: &BarrierEnvelope<'_, T>) -> Option<(T, T)> {
    let s = state.radii();
    let z = state.heights();
    let mut margin: Option<T> = None;
    for (&si, &zi) in s.iter().zip(&z) {
        let lz = zi.ln();
        let mut push = |m: T| margin = Some(margin.map_or(m, |old: T| old.min(m)));
        if let Some(lo) = env.lower(si) {
            push(lz - lo.ln());
        }
        if let Some(hi) = env.upper(si) {
            push(hi.ln() - lz);
        }
    }
    let cell = z.windows(2).fold(T::zero(), |acc, w| acc.max((w[1].ln() - w[0].ln()).abs()));
    margin.map(|m| (m, cell))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpsilonTime<T> {
    pub eps: T,
    /// First recorded time with `sup |omega| < eps`, if reached.
    pub time: Option<T>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport<T> {
    pub times: Vec<T>,
    pub sup_omega: Vec<T>,
    /// `max(0, max_i omega_i)` at each recorded time.
    pub positive_sup: Vec<T>,
    /// First recorded time from which `positive_sup` is nonincreasing within
    /// `10 dtheta^2`.
    pub monotone_after: T,
    pub time_to_eps: Vec<EpsilonTime<T>>,
    pub barrier_ok: bool,
    /// Smallest log-height margin against the barriers over the run.
    pub barrier_margin: T,
    pub barrier_epsilon: T,
    /// Neck radius of the lower barrier at time 0.
    pub barrier_neck: T,
    /// Radius beyond which `|omega_0| <= barrier_epsilon / 2`.
    pub calibration_radius: T,
}

/// Experiment settings beyond the perturbation, grid and flow controls.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentOptions<T> {
    /// Width parameter of the barrier slab.
    pub barrier_epsilon: T,
    /// Soliton the perturbation is applied to.
    pub reference: SolitonOrientation,
}

impl<T: Real> Default for ExperimentOptions<T> {
    fn default() -> Self {
        ExperimentOptions { barrier_epsilon: T::lit(0.3), reference: SolitonOrientation::Upward }
    }
}

/// First index from which `series` never rises by more than `slack`.
fn monotone_from<T: Real>(series: &[T], slack: T) -> usize {
    let mut start = 0;
    let mut running_min = T::infinity();
    for (i, &x) in series.iter().enumerate() {
        if x > running_min + slack {
            start = i;
            running_min = x;
        } else {
            running_min = running_min.min(x);
        }
    }
    start
}

/// Evolves `reference + delta` and checks decay and barrier containment.
///
/// Runs around the inverted soliton are checked against the barriers
/// through their mirror image `-u`, which lies near the upward soliton.
pub fn run_stability_experiment<T: Real>(
    perturbation: &Perturbation<T>,
    grid: HemisphereGrid<T>,
    controls: &FlowControls<T>,
    eps_list: &[T],
    family: &BarrierFamily<T>,
    options: &ExperimentOptions<T>,
) -> Result<StabilityReport<T>> {
    let state0 = make_initial_around(perturbation, grid, options.reference)?;
    let upward0 = mirror_to_upward(&state0);
    let calibration_radius = epsilon_radius_calibration(&upward0, options.barrier_epsilon)?;
    let catenoid = family.select(options.barrier_epsilon, calibration_radius)?;
    let barrier_neck = barrier_envelope(options.barrier_epsilon, T::zero(), (catenoid, catenoid))?.lower_neck();

    let mut times = Vec::new();
    let mut sup_omega = Vec::new();
    let mut positive_sup = Vec::new();
    let mut margin: Option<T> = None;
    let mut ok = true;
    evolve_with(&state0, controls, |state| {
        let (w, sup) = omega(state);
        times.push(state.t);
        sup_omega.push(sup);
        positive_sup.push(w.iter().fold(T::zero(), |acc, &x| acc.max(x)));
        let env = barrier_envelope(options.barrier_epsilon, state.t, (catenoid, catenoid))?;
        if let Some((m, cell)) = barrier_margin(&mirror_to_upward(state), &env) {
            margin = Some(margin.map_or(m, |old| old.min(m)));
            ok &= m >= -cell;
        }
        Ok(())
    })?;
    let barrier_margin = margin.ok_or_else(|| Error::NoBarrier("no graph node lies beyond the barrier necks".into()))?;

    let h = grid.spacing();
    let slack = T::lit(10.0) * h * h;
    let monotone_after = times[monotone_from(&positive_sup, slack)];
    let time_to_eps = eps_list
        .iter()
        .map(|&eps| EpsilonTime { eps, time: sup_omega.iter().position(|&s| s < eps).map(|i| times[i]) })
        .collect();
    Ok(StabilityReport {
        times,
        sup_omega,
        positive_sup,
        monotone_after,
        time_to_eps,
        barrier_ok: ok,
        barrier_margin,
        barrier_epsilon: options.barrier_epsilon,
        barrier_neck,
        calibration_radius,
    })
}

fn mirror_to_upward<T: Real>(state: &RadialGraphState<T>) -> RadialGraphState<T> {
    match state.reference {
        SolitonOrientation::Upward => state.clone(),
        SolitonOrientation::Inverted => RadialGraphState {
            u: state.u.iter().map(|&u| -u).collect(),
            reference: SolitonOrientation::Upward,
            ..state.clone()
        },
    }
}
