//! Translating catenoids and grim reapers from the arclength form of the
//! translator equation.
//!
//! A profile `(s, z, alpha)` parametrised by arclength generates a translator
//! exactly when
//!
//! ```text
//! s' = cos alpha,   z' = sin alpha,   alpha' = -sin alpha * F(s, z)
//! ```
//!
//! with `F = n s / z^2 + (n - 1) / s` for rotational hypersurfaces and
//! `F = n s / z^2` for parabolic cylinders.
//!
//! The sign of `alpha` never changes along a solution (`alpha = 0` is an
//! equilibrium), and in the asymptotic tails `alpha` decays like
//! `exp(-n s^2 / 2 z^2)`, which makes the angle equation stiff there. The
//! solvers therefore integrate the log half-angle `psi = ln tan(|alpha| / 2)`,
//! for which `psi' = -F`, `s' = -tanh psi` and `z' = sign(alpha) / cosh psi`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Dimension, HalfSpacePoint, ProfileCurve, ProfileKind, ProfilePoint, ProfileSample};
use crate::ode::asymptote::{estimate_asymptote, estimate_branch_asymptote, Asymptote, FLAT_SINE};
use crate::ode::integrator::{integrate_until, Node, StepControl};
use crate::scalar::Real;

/// Tolerances and truncation for the profile integrations.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegratorControls<T> {
    pub rel_tol: T,
    pub abs_tol: T,
    pub max_step: T,
    /// Horizontal truncation of every branch.
    pub s_max: T,
    /// Half-width of the angular windows in which the chart equations are checked.
    pub alpha_switch: T,
}

impl<T: Real> Default for IntegratorControls<T> {
    fn default() -> Self {
        IntegratorControls {
            rel_tol: T::lit(1e-10),
            abs_tol: T::lit(1e-12),
            max_step: T::lit(0.1),
            s_max: T::lit(50.0),
            alpha_switch: T::lit(1.0),
        }
    }
}

impl<T: Real> IntegratorControls<T> {
    pub fn validate(&self) -> Result<()> {
        let positive = |v: T, name: &str| {
            if v > T::zero() && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")))
            }
        };
        positive(self.rel_tol, "rel_tol")?;
        positive(self.abs_tol, "abs_tol")?;
        positive(self.max_step, "max_step")?;
        positive(self.s_max, "s_max")?;
        positive(self.alpha_switch, "alpha_switch")
    }

    fn step_control(&self) -> StepControl<T> {
        StepControl {
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            max_step: self.max_step,
            min_step: T::epsilon() * T::lit(64.0) * self.s_max.max(T::one()),
            max_steps: 20_000_000,
        }
    }
}

/// The function `F(s, z)` multiplying `-sin alpha` in the angle equation.
#[inline]
fn angle_factor<T: Real>(s: T, z: T, n: Dimension, kind: ProfileKind) -> T {
    let nn = n.real::<T>();
    let ambient = nn * s / (z * z);
    match kind {
        ProfileKind::Rotational => ambient + (nn - T::one()) / s,
        ProfileKind::ParabolicCylinder => ambient,
    }
}

fn check_state<T: Real>(s: T, z: T, kind: ProfileKind) -> Result<()> {
    if !(z > T::zero()) {
        return Err(Error::OutsideHalfSpace { height: z.as_f64() });
    }
    if kind == ProfileKind::Rotational && !(s > T::zero()) {
        return Err(Error::AxisSingularity { s: s.as_f64() });
    }
    Ok(())
}

/// Arclength derivatives `(s', z', alpha')` of a translator profile.
pub fn profile_ode_rhs<T: Real>(state: [T; 3], n: Dimension, kind: ProfileKind) -> Result<[T; 3]> {
    let [s, z, alpha] = state;
    check_state(s, z, kind)?;
    let (sin, cos) = alpha.sin_cos();
    Ok([cos, sin, -sin * angle_factor(s, z, n, kind)])
}

/// Right-hand side in the `(s, z, psi)` variables for a branch whose angle has
/// sign `sign`.
fn log_half_angle_rhs<T: Real>(state: &[T; 3], sign: T, n: Dimension, kind: ProfileKind) -> Result<[T; 3]> {
    let [s, z, psi] = *state;
    check_state(s, z, kind)?;
    Ok([-psi.tanh(), sign / psi.cosh(), -angle_factor(s, z, n, kind)])
}

fn half_angle_log<T: Real>(alpha: T) -> T {
    (alpha.abs() * T::lit(0.5)).tan().ln()
}

fn angle_from_log<T: Real>(psi: T, sign: T) -> T {
    sign * T::lit(2.0) * psi.exp().atan()
}

/// Integrates one branch with nonzero initial angle until `event(s) >= 0`.
fn integrate_branch<T: Real, E: Fn(T) -> T>(
    start: ProfilePoint<T>,
    direction: T,
    n: Dimension,
    kind: ProfileKind,
    controls: &IntegratorControls<T>,
    event: E,
) -> Result<Vec<ProfileSample<T>>> {
    let sign = if start.alpha < T::zero() { -T::one() } else { T::one() };
    let y0 = [start.s, start.z, half_angle_log(start.alpha)];
    let sys = |y: &[T; 3]| log_half_angle_rhs(y, sign, n, kind);
    let tol = T::epsilon() * T::lit(16.0) * controls.s_max.max(T::one());
    let nodes: Vec<Node<T, 3>> = integrate_until(&sys, y0, direction, &controls.step_control(), |y| event(y[0]), tol)?;
    nodes
        .iter()
        .map(|node| {
            let [s, z, psi] = node.y;
            let alpha = if node.t == T::zero() { start.alpha } else { angle_from_log(psi, sign) };
            let kappa = profile_ode_rhs([s, z, alpha], n, kind)?[2];
            Ok(ProfileSample { sigma: node.t, point: ProfilePoint::new(s, z, alpha)?, curvature: Some(kappa) })
        })
        .collect()
}

/// Rotational annular translator with neck circle of radius `r` on the
/// horosphere at height 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CatenoidProfile<T> {
    pub n: Dimension,
    pub neck_radius: T,
    /// Branch leaving the neck upwards, `alpha` from `pi/2` down to 0.
    pub upper_branch: ProfileCurve<T>,
    /// Branch leaving the neck downwards, `alpha` from `-pi/2` up to 0.
    pub lower_branch: ProfileCurve<T>,
    pub r_plus: T,
    pub r_minus: T,
    pub asymptote_error: T,
}

impl<T: Real> CatenoidProfile<T> {
    /// Whole profile as one curve: the lower branch traversed towards the neck
    /// (negative arclength, orientation continued through the neck) followed
    /// by the upper branch.
    pub fn glued_curve(&self) -> ProfileCurve<T> {
        let mut samples: Vec<ProfileSample<T>> = self
            .lower_branch
            .samples()
            .iter()
            .rev()
            .map(|smp| ProfileSample {
                sigma: -smp.sigma,
                point: smp.point.flipped(),
                curvature: smp.curvature.map(|k| -k),
            })
            .collect();
        samples.extend(self.upper_branch.samples().iter().skip(1).copied());
        ProfileCurve::new(ProfileKind::Rotational, self.n, samples).expect("glued branches form a valid curve")
    }

    /// Hyperbolic distance from the neck point `(r, 1)` to the axis point `(0, 1)`.
    pub fn escape_distance(&self) -> T {
        let axis = HalfSpacePoint { horizontal: T::zero(), height: T::one() };
        let neck = HalfSpacePoint { horizontal: self.neck_radius, height: T::one() };
        axis.distance(&neck)
    }

    /// Height of the upper (`upper = true`) or lower branch at horizontal
    /// radius `s`, or `None` inside the neck. Beyond the integrated range the
    /// asymptotic height is returned.
    pub fn branch_height(&self, s: T, upper: bool) -> Option<T> {
        let (branch, limit) = if upper {
            (&self.upper_branch, self.r_plus)
        } else {
            (&self.lower_branch, self.r_minus)
        };
        branch_height_at(branch, s, limit)
    }
}

fn branch_height_at<T: Real>(branch: &ProfileCurve<T>, s: T, limit: T) -> Option<T> {
    let samples = branch.samples();
    let first = samples.first()?;
    if s < first.point.s {
        return None;
    }
    let last = samples.last()?;
    if s >= last.point.s {
        return Some(limit);
    }
    // s increases strictly along the branch away from the neck
    let idx = samples.partition_point(|smp| smp.point.s <= s);
    let a = &samples[idx - 1].point;
    let b = &samples[idx].point;
    let w = (s - a.s) / (b.s - a.s);
    Some(a.z + w * (b.z - a.z))
}

/// Builds the translating catenoid with neck radius `r`.
pub fn integrate_catenoid<T: Real>(n: Dimension, r: T, controls: &IntegratorControls<T>) -> Result<CatenoidProfile<T>> {
    controls.validate()?;
    if !(r > T::zero()) || !r.is_finite() {
        return Err(Error::InvalidParameter(format!("neck radius must be positive, got {r}")));
    }
    if !(controls.s_max > r) {
        return Err(Error::InvalidParameter(format!(
            "s_max = {} must exceed the neck radius {r}",
            controls.s_max
        )));
    }
    let kind = ProfileKind::Rotational;
    let half_pi = T::FRAC_PI_2();
    let s_max = controls.s_max;
    let upper = integrate_branch(ProfilePoint::new(r, T::one(), half_pi)?, T::one(), n, kind, controls, |s| s - s_max)?;
    let lower = integrate_branch(ProfilePoint::new(r, T::one(), -half_pi)?, T::one(), n, kind, controls, |s| s - s_max)?;
    let upper_branch = ProfileCurve::new(kind, n, upper)?;
    let lower_branch = ProfileCurve::new(kind, n, lower)?;
    let plus = estimate_branch_asymptote(&upper_branch)?;
    let minus = estimate_branch_asymptote(&lower_branch)?;
    Ok(CatenoidProfile {
        n,
        neck_radius: r,
        upper_branch,
        lower_branch,
        r_plus: plus.limit,
        r_minus: minus.limit,
        asymptote_error: asymptote_error(&[plus, minus], controls),
    })
}

/// Reported asymptote error: the extrapolation increment, floored by the
/// integration tolerance on the height.
fn asymptote_error<T: Real>(asymptotes: &[Asymptote<T>], controls: &IntegratorControls<T>) -> T {
    asymptotes.iter().fold(T::zero(), |acc, a| {
        let floor = controls.abs_tol + controls.rel_tol * a.limit.abs();
        acc.max(a.error.max(floor))
    })
}

/// One point of a grim reaper graph `z = phi(s)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphSample<T> {
    pub s: T,
    pub phi: T,
    pub slope: T,
}

/// Parabolic-cylinder translator, an entire graph `z = phi(s)` with
/// `phi(0) = h0` and `phi'(0) = lambda`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrimReaperProfile<T> {
    pub n: Dimension,
    pub h0: T,
    pub lambda: T,
    /// Profile over `[-s_max, s_max]`, arclength zero at `s = 0`.
    pub curve: ProfileCurve<T>,
    pub lambda_plus: T,
    pub lambda_minus: T,
    pub asymptote_error: T,
}

impl<T: Real> GrimReaperProfile<T> {
    pub fn samples(&self) -> Vec<GraphSample<T>> {
        self.curve
            .samples()
            .iter()
            .map(|smp| GraphSample { s: smp.point.s, phi: smp.point.z, slope: smp.point.alpha.tan() })
            .collect()
    }
}

/// Builds the grim reaper through `(0, h0)` with slope `lambda`.
pub fn integrate_grim_reaper<T: Real>(
    n: Dimension,
    h0: T,
    lambda: T,
    controls: &IntegratorControls<T>,
) -> Result<GrimReaperProfile<T>> {
    controls.validate()?;
    if !(h0 > T::zero()) || !h0.is_finite() {
        return Err(Error::InvalidParameter(format!("h0 must be positive, got {h0}")));
    }
    if !(lambda >= T::zero()) || !lambda.is_finite() {
        return Err(Error::InvalidParameter(format!("lambda must be non-negative, got {lambda}")));
    }
    let kind = ProfileKind::ParabolicCylinder;
    let s_max = controls.s_max;

    let (forward, backward) = if lambda == T::zero() {
        // horizontal line: the equilibrium of the angle equation
        (horizontal_line(h0, s_max, controls.max_step, T::one()), horizontal_line(h0, s_max, controls.max_step, -T::one()))
    } else {
        let start = ProfilePoint::new(T::zero(), h0, lambda.atan())?;
        let fwd = integrate_branch(start, T::one(), n, kind, controls, |s| s - s_max)?;
        let bwd = integrate_branch(start, -T::one(), n, kind, controls, |s| -s - s_max)?;
        (fwd, bwd)
    };

    let plus = branch_limit(&forward, T::one())?;
    let minus = branch_limit(&backward, -T::one())?;

    let mut samples: Vec<ProfileSample<T>> = backward.into_iter().rev().collect();
    samples.extend(forward.into_iter().skip(1));
    let curve = ProfileCurve::new(kind, n, samples)?;

    Ok(GrimReaperProfile {
        n,
        h0,
        lambda,
        curve,
        lambda_plus: plus.limit,
        lambda_minus: minus.limit,
        asymptote_error: asymptote_error(&[plus, minus], controls),
    })
}

fn horizontal_line<T: Real>(h: T, s_max: T, max_step: T, direction: T) -> Vec<ProfileSample<T>> {
    let count = (s_max / max_step).ceil().to_usize().unwrap_or(1).max(2);
    (0..=count)
        .map(|i| {
            let sigma = direction * s_max * T::from_usize(i).unwrap() / T::from_usize(count).unwrap();
            ProfileSample {
                sigma,
                point: ProfilePoint { s: sigma, z: h, alpha: T::zero() },
                curvature: Some(T::zero()),
            }
        })
        .collect()
}

fn branch_limit<T: Real>(branch: &[ProfileSample<T>], direction: T) -> Result<Asymptote<T>> {
    let last = branch.last().ok_or(Error::InsufficientData { needed: 3, got: 0 })?;
    if last.point.alpha.sin().abs() > T::lit(FLAT_SINE) {
        return Err(Error::NotAsymptotic(format!(
            "tangent not yet horizontal at s = {} (alpha = {})",
            last.point.s, last.point.alpha
        )));
    }
    let tail: Vec<(T, T)> = branch.iter().map(|smp| (direction * smp.point.s, smp.point.z)).collect();
    estimate_asymptote(&tail)
}

/// One row of a catenoid family sweep.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyRow<T> {
    pub r: T,
    pub r_minus: T,
    pub r_plus: T,
    pub asymptote_error: T,
    /// Hyperbolic distance from the neck point to the axis point at height 1.
    pub escape_distance: T,
}

/// Truncation used for neck radius `r` in a family sweep: the given `s_max`
/// while the neck sits inside its first half, otherwise half of it beyond the neck.
pub fn family_s_max<T: Real>(r: T, s_max: T) -> T {
    let half = s_max * T::lit(0.5);
    if r < half {
        s_max
    } else {
        r + half
    }
}

/// Asymptotic heights for each neck radius of a sorted list.
pub fn catenoid_family_table<T: Real>(
    n: Dimension,
    radii: &[T],
    controls: &IntegratorControls<T>,
) -> Result<Vec<FamilyRow<T>>> {
    for w in radii.windows(2) {
        if !(w[1] > w[0]) {
            return Err(Error::InvalidParameter("radii must be strictly increasing".into()));
        }
    }
    radii
        .iter()
        .map(|&r| {
            let ctl = IntegratorControls { s_max: family_s_max(r, controls.s_max), ..*controls };
            let cat = integrate_catenoid(n, r, &ctl)?;
            Ok(FamilyRow {
                r,
                r_minus: cat.r_minus,
                r_plus: cat.r_plus,
                asymptote_error: cat.asymptote_error,
                escape_distance: cat.escape_distance(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn dim(n: usize) -> Dimension {
        Dimension::new(n).unwrap()
    }

    #[test]
    fn rhs_examples() {
        let d = profile_ode_rhs([3.0, 0.7, 0.0], dim(2), ProfileKind::Rotational).unwrap();
        assert_eq!(d, [1.0, 0.0, 0.0]);
        let d = profile_ode_rhs([1.0, 1.0, FRAC_PI_2], dim(2), ProfileKind::Rotational).unwrap();
        assert!((d[2] + 3.0).abs() < 1e-15);
        let d = profile_ode_rhs([-1.0, 1.0, FRAC_PI_4], dim(2), ProfileKind::ParabolicCylinder).unwrap();
        assert!((d[2] - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn rhs_errors() {
        assert!(matches!(
            profile_ode_rhs([1.0, 0.0, 0.1], dim(2), ProfileKind::Rotational),
            Err(Error::OutsideHalfSpace { .. })
        ));
        assert!(matches!(
            profile_ode_rhs([0.0, 1.0, 0.1], dim(2), ProfileKind::Rotational),
            Err(Error::AxisSingularity { .. })
        ));
        assert!(profile_ode_rhs([-2.0, 1.0, 0.1], dim(2), ProfileKind::ParabolicCylinder).is_ok());
    }

    #[test]
    fn log_half_angle_matches_angle_equation() {
        // d/dsigma of 2 atan(e^psi) must equal alpha'
        for &(s, z, alpha) in &[(1.0, 1.0, 1.2), (2.0, 0.5, -0.7), (0.3, 2.0, 0.01)] {
            let sign: f64 = if alpha < 0.0 { -1.0 } else { 1.0 };
            let psi = half_angle_log(alpha);
            let d = log_half_angle_rhs(&[s, z, psi], sign, dim(3), ProfileKind::Rotational).unwrap();
            let e = profile_ode_rhs([s, z, alpha], dim(3), ProfileKind::Rotational).unwrap();
            let dalpha = sign * 2.0 * psi.exp() / (1.0 + (2.0 * psi).exp()) * d[2];
            assert!((d[0] - e[0]).abs() < 1e-14);
            assert!((d[1] - e[1]).abs() < 1e-14);
            assert!((dalpha - e[2]).abs() < 1e-13);
            assert!((angle_from_log(psi, sign) - alpha).abs() < 1e-15);
        }
    }

    #[test]
    fn catenoid_basic_shape() {
        let cat = integrate_catenoid(dim(2), 1.0, &IntegratorControls::default()).unwrap();
        assert!(cat.r_minus > 0.0 && cat.r_minus < 1.0);
        assert!(cat.r_plus > 1.0);
        let up = cat.upper_branch.samples();
        assert_eq!(up[0].point.alpha, FRAC_PI_2);
        assert!(up.windows(2).all(|w| w[1].point.z >= w[0].point.z && w[1].point.s > w[0].point.s));
        let lo = cat.lower_branch.samples();
        assert!(lo.windows(2).all(|w| w[1].point.z <= w[0].point.z && w[1].point.s > w[0].point.s));
        assert!((up.last().unwrap().point.s - 50.0).abs() < 1e-9);
    }

    #[test]
    fn catenoid_rejects_bad_input() {
        let c = IntegratorControls::default();
        assert!(integrate_catenoid(dim(2), 0.0, &c).is_err());
        assert!(integrate_catenoid(dim(2), 60.0, &c).is_err());
        let bad = IntegratorControls { rel_tol: -1.0, ..c };
        assert!(integrate_catenoid(dim(2), 1.0, &bad).is_err());
    }

    #[test]
    fn grim_reaper_flat_for_zero_slope() {
        let g = integrate_grim_reaper(dim(2), 1.7, 0.0, &IntegratorControls::default()).unwrap();
        assert!(g.samples().iter().all(|p| p.phi == 1.7 && p.slope == 0.0));
        assert_eq!(g.lambda_plus, 1.7);
        assert_eq!(g.lambda_minus, 1.7);
    }

    #[test]
    fn glued_curve_is_continuous() {
        let cat = integrate_catenoid(dim(3), 0.5f64, &IntegratorControls::default()).unwrap();
        let g = cat.glued_curve();
        let at_neck = g.samples().iter().position(|smp| smp.sigma == 0.0).unwrap();
        let k = g.curvatures().unwrap();
        assert!((k[at_neck - 1] - k[at_neck]).abs() < 0.2 * k[at_neck].abs());
        assert_eq!(g.len(), cat.upper_branch.len() + cat.lower_branch.len() - 1);
    }

    #[test]
    fn branch_height_lookup() {
        let cat = integrate_catenoid(dim(2), 1.0, &IntegratorControls::default()).unwrap();
        assert_eq!(cat.branch_height(0.5, true), None);
        assert_eq!(cat.branch_height(1.0, true), Some(1.0));
        assert_eq!(cat.branch_height(1e6, false), Some(cat.r_minus));
        let mid = cat.branch_height(3.0, true).unwrap();
        assert!(mid > 1.0 && mid <= cat.r_plus);
    }

    #[test]
    fn family_truncation() {
        assert_eq!(family_s_max(1.0, 50.0), 50.0);
        assert_eq!(family_s_max(100.0, 50.0), 125.0);
    }
}
