//! Mean curvature flow of rotationally symmetric radial graphs over the
//! totally geodesic hemisphere `S = {|x| = 1, x_{n+1} > 0}`.
//!
//! A state is the log-height `u(theta)` on a uniform polar grid, describing
//! the hypersurface `x -> e^{u(x)} x`. Here `theta` is the angle from the pole,
//! so the node `theta` sits over the point `(sin theta, cos theta)` of `S`.
//! The graph moves by `du/dt = cos(theta) sqrt(1 + u_theta^2) H`, where `H` is
//! the hyperbolic mean curvature of the graph, upward oriented.
//!
//! `H` is invariant under the dilation `p -> e^{-u_i} p`, so at node `i` it is
//! evaluated on the rescaled profile through `(sin theta_i, cos theta_i)`,
//! which depends on `u` only through the difference quotients
//! `p = u_theta` and `q = u_theta_theta`:
//!
//! ```text
//! W = sqrt(1 + p^2)
//! cos alpha = (p sin theta + cos theta) / W
//! sin alpha = (p cos theta - sin theta) / W
//! kappa     = (q - 1 - p^2) / W^3
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    axis_euclidean_mean_curvature, hyperbolic_mean_curvature, rotational_mean_curvature_from_sine, Dimension,
    ProfileCurve, ProfileKind, ProfilePoint, ProfileSample,
};
use crate::scalar::Real;

/// Uniform grid `theta_i = i * theta_max / m`, `i = 0..=m`, on a polar cap of `S`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HemisphereGrid<T> {
    n: Dimension,
    theta_max: T,
    m: usize,
}

impl<T: Real> HemisphereGrid<T> {
    pub fn new(n: Dimension, theta_max: T, m: usize) -> Result<Self> {
        if !(theta_max > T::zero() && theta_max < T::FRAC_PI_2()) {
            return Err(Error::InvalidParameter(format!("theta_max = {theta_max} must lie in (0, pi/2)")));
        }
        if m < 2 {
            return Err(Error::InvalidParameter(format!("grid needs at least 2 cells, got {m}")));
        }
        Ok(HemisphereGrid { n, theta_max, m })
    }

    pub fn dimension(&self) -> Dimension {
        self.n
    }

    pub fn theta_max(&self) -> T {
        self.theta_max
    }

    /// Number of cells; there are `cells() + 1` nodes.
    pub fn cells(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.m + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> T {
        self.theta_max / T::from_usize(self.m).unwrap()
    }

    pub fn theta(&self, i: usize) -> T {
        if i == self.m {
            self.theta_max
        } else {
            T::from_usize(i).unwrap() * self.spacing()
        }
    }

    pub fn thetas(&self) -> Vec<T> {
        (0..self.len()).map(|i| self.theta(i)).collect()
    }
}

/// Which horosphere soliton a state is compared with.
///
/// `Upward` is `v = t - log cos theta`, the horosphere at height `e^t`.
/// `Inverted` is its mirror `-v`, the image under inversion in `S`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolitonOrientation {
    #[default]
    Upward,
    Inverted,
}

impl SolitonOrientation {
    pub fn sign<T: Real>(self) -> T {
        match self {
            SolitonOrientation::Upward => T::one(),
            SolitonOrientation::Inverted => -T::one(),
        }
    }

    pub fn mirrored(self) -> Self {
        match self {
            SolitonOrientation::Upward => SolitonOrientation::Inverted,
            SolitonOrientation::Inverted => SolitonOrientation::Upward,
        }
    }

    /// Value of the reference soliton at `(theta, t)`.
    pub fn value<T: Real>(self, theta: T, t: T) -> Result<T> {
        Ok(self.sign::<T>() * exact_soliton(theta, t)?)
    }
}

/// `v(theta, t) = t - log cos theta`, whose graph is the horosphere at height `e^t`.
pub fn exact_soliton<T: Real>(theta: T, t: T) -> Result<T> {
    if !(theta >= T::zero() && theta < T::FRAC_PI_2()) {
        return Err(Error::InvalidParameter(format!("theta = {theta} outside [0, pi/2)")));
    }
    Ok(t - theta.cos().ln())
}

/// Discretized radial graph at time `t`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialGraphState<T> {
    pub grid: HemisphereGrid<T>,
    pub u: Vec<T>,
    pub t: T,
    /// Soliton used for the boundary data and for `omega`.
    pub reference: SolitonOrientation,
}

impl<T: Real> RadialGraphState<T> {
    pub fn new(grid: HemisphereGrid<T>, u: Vec<T>, t: T, reference: SolitonOrientation) -> Result<Self> {
        if u.len() != grid.len() {
            return Err(Error::InvalidParameter(format!("{} values for {} grid nodes", u.len(), grid.len())));
        }
        if let Some(i) = u.iter().position(|v| !v.is_finite()) {
            return Err(Error::BlowUp { node: i, t: t.as_f64() });
        }
        Ok(RadialGraphState { grid, u, t, reference })
    }

    /// The reference soliton itself, sampled on the grid.
    pub fn soliton(grid: HemisphereGrid<T>, t: T, reference: SolitonOrientation) -> Self {
        let u = grid.thetas().into_iter().map(|th| reference.value(th, t).expect("grid inside S")).collect();
        RadialGraphState { grid, u, t, reference }
    }

    /// Euclidean horizontal radius `e^u sin theta` of the graph at each node.
    pub fn radii(&self) -> Vec<T> {
        self.u.iter().zip(self.grid.thetas()).map(|(&u, th)| u.exp() * th.sin()).collect()
    }

    /// Height `e^u cos theta` of the graph at each node.
    pub fn heights(&self) -> Vec<T> {
        self.u.iter().zip(self.grid.thetas()).map(|(&u, th)| u.exp() * th.cos()).collect()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryCondition {
    /// Last node follows the reference soliton.
    #[default]
    PinToSoliton,
    /// Last node keeps its initial value.
    FixedDirichlet,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowControls<T> {
    /// Time step as a fraction of `dtheta^2`, in `(0, 1]`.
    pub cfl: T,
    pub t_end: T,
    pub record_every: T,
    pub boundary: BoundaryCondition,
    pub scheme: SpatialScheme,
}

impl<T: Real> Default for FlowControls<T> {
    fn default() -> Self {
        FlowControls {
            cfl: T::lit(0.2),
            t_end: T::one(),
            record_every: T::lit(0.1),
            boundary: BoundaryCondition::default(),
            scheme: SpatialScheme::default(),
        }
    }
}

impl<T: Real> FlowControls<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.cfl > T::zero() && self.cfl <= T::one()) {
            return Err(Error::InvalidParameter(format!("cfl = {} must lie in (0, 1]", self.cfl)));
        }
        if !(self.t_end >= T::zero()) || !self.t_end.is_finite() {
            return Err(Error::InvalidParameter(format!("t_end = {} must be non-negative", self.t_end)));
        }
        if !(self.record_every > T::zero()) {
            return Err(Error::InvalidParameter(format!("record_every = {} must be positive", self.record_every)));
        }
        Ok(())
    }

    /// Largest admissible time step on `grid`.
    pub fn max_dt(&self, grid: &HemisphereGrid<T>) -> T {
        let h = grid.spacing();
        self.cfl * h * h
    }
}

/// Profile curve of the graph, `(s, z) = e^u (sin theta, cos theta)`, with
/// the tangent angle from centered differences in `theta` (one-sided at the
/// ends) and arclength accumulated along chords.
pub fn radial_profile<T: Real>(state: &RadialGraphState<T>) -> Result<ProfileCurve<T>> {
    let s = state.radii();
    let z = state.heights();
    let m = state.grid.cells();
    let mut samples = Vec::with_capacity(m + 1);
    let mut sigma = T::zero();
    for i in 0..=m {
        if i > 0 {
            sigma = sigma + (s[i] - s[i - 1]).hypot(z[i] - z[i - 1]);
        }
        let (a, b) = match i {
            0 => (0, 1),
            _ if i == m => (m - 1, m),
            _ => (i - 1, i + 1),
        };
        let alpha = (z[b] - z[a]).atan2(s[b] - s[a]);
        samples.push(ProfileSample { sigma, point: ProfilePoint::new(s[i], z[i], alpha)?, curvature: None });
    }
    ProfileCurve::new(ProfileKind::Rotational, state.grid.dimension(), samples)
}

/// Difference stencil for `u_theta` and `u_theta_theta`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpatialScheme {
    /// Three-point central differences.
    Central2,
    /// Five-point central differences, one-sided next to the boundary node.
    #[default]
    Central4,
}

impl SpatialScheme {
    fn min_cells(self) -> usize {
        match self {
            SpatialScheme::Central2 => 2,
            SpatialScheme::Central4 => 6,
        }
    }
}

/// Trigonometric tables and difference weights shared by every evaluation.
struct Stencil<T> {
    n: Dimension,
    scheme: SpatialScheme,
    sin: Vec<T>,
    cos: Vec<T>,
    inv_h: T,
    inv_h2: T,
}

impl<T: Real> Stencil<T> {
    fn new(grid: &HemisphereGrid<T>, scheme: SpatialScheme) -> Result<Self> {
        if grid.cells() < scheme.min_cells() {
            return Err(Error::InvalidParameter(format!(
                "{scheme:?} needs at least {} cells, grid has {}",
                scheme.min_cells(),
                grid.cells()
            )));
        }
        let thetas = grid.thetas();
        let h = grid.spacing();
        Ok(Stencil {
            n: grid.dimension(),
            scheme,
            sin: thetas.iter().map(|th| th.sin()).collect(),
            cos: thetas.iter().map(|th| th.cos()).collect(),
            inv_h: T::one() / h,
            inv_h2: T::one() / (h * h),
        })
    }

    /// Speed at interior node `i` from `p = u_theta` and `q = u_theta_theta`,
    /// through the curvature of the profile rescaled to pass through the
    /// hemisphere point of the node.
    #[inline(always)]
    fn speed(&self, i: usize, p: T, q: T) -> Result<T> {
        let (s, c) = (self.sin[i], self.cos[i]);
        let w2 = T::one() + p * p;
        let w = w2.sqrt();
        let inv_w = T::one() / w;
        let cos_a = (p * s + c) * inv_w;
        let sin_a = (p * c - s) * inv_w;
        let kappa = (q - w2) * inv_w * inv_w * inv_w;
        let hbar = rotational_mean_curvature_from_sine(s, sin_a, kappa, self.n);
        Ok(c * w * hyperbolic_mean_curvature(c, hbar, cos_a)?)
    }

    /// Writes `du/dt` at nodes `0..m` into `out[0..m]`. Values across the
    /// pole come from the even ghost `u_{-k} = u_k`.
    fn eval(&self, u: &[T], t: T, out: &mut [T]) -> Result<()> {
        let m = u.len() - 1;
        let one = T::one();
        let (two, six, eight, ten, twelve) = (T::lit(2.0), T::lit(6.0), T::lit(8.0), T::lit(10.0), T::lit(12.0));
        let (fourteen, fifteen, sixteen, eighteen, thirty) =
            (T::lit(14.0), T::lit(15.0), T::lit(16.0), T::lit(18.0), T::lit(30.0));

        // pole: u_theta = 0 and both principal curvatures equal the profile curvature
        let q0 = match self.scheme {
            SpatialScheme::Central2 => two * (u[1] - u[0]) * self.inv_h2,
            SpatialScheme::Central4 => (T::lit(32.0) * u[1] - two * u[2] - thirty * u[0]) * self.inv_h2 / twelve,
        };
        out[0] = hyperbolic_mean_curvature(one, axis_euclidean_mean_curvature(q0 - one), one)?;

        match self.scheme {
            SpatialScheme::Central2 => {
                let half_inv_h = T::lit(0.5) * self.inv_h;
                for i in 1..m {
                    let p = (u[i + 1] - u[i - 1]) * half_inv_h;
                    let q = (u[i + 1] - u[i] - u[i] + u[i - 1]) * self.inv_h2;
                    out[i] = self.speed(i, p, q)?;
                }
            }
            SpatialScheme::Central4 => {
                let d1 = self.inv_h / twelve;
                let d2 = self.inv_h2 / twelve;
                let central = |b: T, d: T, e: T, f: T, c: T| {
                    ((b - f + eight * (e - d)) * d1, (sixteen * (d + e) - b - f - thirty * c) * d2)
                };
                let (p, q) = central(u[1], u[0], u[2], u[3], u[1]);
                out[1] = self.speed(1, p, q)?;
                for i in 2..m - 1 {
                    let (p, q) = central(u[i - 2], u[i - 1], u[i + 1], u[i + 2], u[i]);
                    out[i] = self.speed(i, p, q)?;
                }
                // one-sided closure next to the boundary node
                let i = m - 1;
                let (a, b, c, d, e, f) = (u[i - 4], u[i - 3], u[i - 2], u[i - 1], u[i], u[i + 1]);
                let p = (six * c - b - eighteen * d + ten * e + T::lit(3.0) * f) * d1;
                let q = (a - six * b + fourteen * c - T::lit(4.0) * d - fifteen * e + ten * f) * d2;
                out[i] = self.speed(i, p, q)?;
            }
        }
        if let Some(i) = out[..m].iter().position(|v| !v.is_finite()) {
            return Err(Error::BlowUp { node: i, t: t.as_f64() });
        }
        Ok(())
    }
}

/// `du/dt` at the nodes `0..m`; the last node is driven by the boundary condition.
pub fn flow_rhs<T: Real>(state: &RadialGraphState<T>, scheme: SpatialScheme) -> Result<Vec<T>> {
    let mut out = vec![T::zero(); state.grid.len()];
    Stencil::new(&state.grid, scheme)?.eval(&state.u, state.t, &mut out)?;
    out.truncate(state.grid.cells());
    Ok(out)
}

fn boundary_rate<T: Real>(state: &RadialGraphState<T>, boundary: BoundaryCondition) -> T {
    match boundary {
        BoundaryCondition::PinToSoliton => state.reference.sign(),
        BoundaryCondition::FixedDirichlet => T::zero(),
    }
}

fn rk4_step<T: Real>(
    stencil: &Stencil<T>,
    state: &mut RadialGraphState<T>,
    dt: T,
    boundary: BoundaryCondition,
    work: &mut [Vec<T>; 5],
) -> Result<()> {
    let m = state.grid.cells();
    let edge = boundary_rate(state, boundary);
    let half = dt * T::lit(0.5);
    let [k1, k2, k3, k4, tmp] = work;

    stencil.eval(&state.u, state.t, k1)?;
    k1[m] = edge;
    for i in 0..=m {
        tmp[i] = state.u[i] + half * k1[i];
    }
    stencil.eval(tmp, state.t + half, k2)?;
    k2[m] = edge;
    for i in 0..=m {
        tmp[i] = state.u[i] + half * k2[i];
    }
    stencil.eval(tmp, state.t + half, k3)?;
    k3[m] = edge;
    for i in 0..=m {
        tmp[i] = state.u[i] + dt * k3[i];
    }
    stencil.eval(tmp, state.t + dt, k4)?;
    k4[m] = edge;

    let sixth = dt / T::lit(6.0);
    for i in 0..=m {
        state.u[i] = state.u[i] + sixth * (k1[i] + T::lit(2.0) * (k2[i] + k3[i]) + k4[i]);
    }
    state.t = state.t + dt;
    if boundary == BoundaryCondition::PinToSoliton {
        state.u[m] = state.reference.value(state.grid.theta_max(), state.t)?;
    }
    Ok(())
}

fn check_dt<T: Real>(dt: T, grid: &HemisphereGrid<T>, controls: &FlowControls<T>) -> Result<()> {
    let limit = controls.max_dt(grid);
    if !(dt >= T::zero()) || dt > limit * (T::one() + T::lit(1e-12)) {
        return Err(Error::CflViolation { dt: dt.as_f64(), limit: limit.as_f64() });
    }
    Ok(())
}

/// One classical RK4 step of size `dt <= cfl * dtheta^2`.
pub fn step<T: Real>(state: &RadialGraphState<T>, dt: T, controls: &FlowControls<T>) -> Result<RadialGraphState<T>> {
    controls.validate()?;
    check_dt(dt, &state.grid, controls)?;
    let mut next = state.clone();
    if dt == T::zero() {
        return Ok(next);
    }
    let len = state.grid.len();
    let mut work = std::array::from_fn(|_| vec![T::zero(); len]);
    rk4_step(&Stencil::new(&state.grid, controls.scheme)?, &mut next, dt, controls.boundary, &mut work)?;
    Ok(next)
}

/// Recorded states of a run, the initial one first.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory<T> {
    pub states: Vec<RadialGraphState<T>>,
}

impl<T: Real> Trajectory<T> {
    pub fn times(&self) -> Vec<T> {
        self.states.iter().map(|s| s.t).collect()
    }

    pub fn last(&self) -> &RadialGraphState<T> {
        self.states.last().expect("trajectory holds the initial state")
    }
}

/// Times at which a run from `t0` records its state, ending at `t0 + t_end`.
pub fn record_times<T: Real>(t0: T, controls: &FlowControls<T>) -> Vec<T> {
    let mut out = Vec::new();
    let end = t0 + controls.t_end;
    let mut k = 1usize;
    loop {
        let t = t0 + controls.record_every * T::from_usize(k).unwrap();
        // skip a record that would leave a sliver before the final time
        if t >= end - controls.record_every * T::lit(1e-9) {
            break;
        }
        out.push(t);
        k += 1;
    }
    if controls.t_end > T::zero() {
        out.push(end);
    }
    out
}

/// Evolves `state` for `controls.t_end`, recording every `record_every` and at the end.
pub fn evolve<T: Real>(state: &RadialGraphState<T>, controls: &FlowControls<T>) -> Result<Trajectory<T>> {
    evolve_with(state, controls, |_| Ok(()))
}

/// Like [`evolve`], calling `observe` on each recorded state as it is produced.
pub fn evolve_with<T, F>(state: &RadialGraphState<T>, controls: &FlowControls<T>, mut observe: F) -> Result<Trajectory<T>>
where
    T: Real,
    F: FnMut(&RadialGraphState<T>) -> Result<()>,
{
    controls.validate()?;
    let stencil = Stencil::new(&state.grid, controls.scheme)?;
    let dt_max = controls.max_dt(&state.grid);
    let mut work = std::array::from_fn(|_| vec![T::zero(); state.grid.len()]);
    let mut cur = state.clone();
    observe(&cur)?;
    let mut states = vec![cur.clone()];
    for target in record_times(state.t, controls) {
        let span = target - cur.t;
        let steps = (span / dt_max).ceil().to_usize().unwrap_or(0).max(1);
        let dt = span / T::from_usize(steps).unwrap();
        check_dt(dt, &cur.grid, controls)?;
        for _ in 0..steps {
            rk4_step(&stencil, &mut cur, dt, controls.boundary, &mut work)?;
        }
        // land exactly on the record time
        cur.t = target;
        if controls.boundary == BoundaryCondition::PinToSoliton {
            let m = cur.grid.cells();
            cur.u[m] = cur.reference.value(cur.grid.theta_max(), target)?;
        }
        observe(&cur)?;
        states.push(cur.clone());
    }
    Ok(Trajectory { states })
}

/// `omega_i = u_i - v(theta_i, t)` against the state's reference soliton,
/// and its sup norm.
pub fn omega<T: Real>(state: &RadialGraphState<T>) -> (Vec<T>, T) {
    let values: Vec<T> = state
        .u
        .iter()
        .zip(state.grid.thetas())
        .map(|(&u, th)| u - state.reference.value(th, state.t).expect("grid inside S"))
        .collect();
    let sup = values.iter().fold(T::zero(), |acc, w| acc.max(w.abs()));
    (values, sup)
}
