//! Residuals of the graph-chart forms of the translator equation, evaluated on
//! arclength profiles.
//!
//! On a vertical graph `z = phi(s)`: `phi' = tan alpha` and
//! `phi'' = kappa / cos^3 alpha`. On a horizontal graph `s = d(z)`:
//! `d' = cot alpha` and `d'' = -kappa / sin^3 alpha`. Here `kappa` is the
//! arclength derivative of `alpha`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Dimension, ProfileCurve, ProfileKind};
use crate::scalar::{wrap_angle, Real};

/// Maximum of `|phi'' + phi' (1 + phi'^2) (n s / phi^2 + (n - 1) / s)|` over the
/// samples with `|alpha| < alpha_switch`. The `(n - 1) / s` term is dropped for
/// parabolic cylinders.
pub fn chart_residual_vertical<T: Real>(curve: &ProfileCurve<T>, n: Dimension, alpha_switch: T) -> Result<T> {
    let kappas = curve.curvatures()?;
    let nn = n.real::<T>();
    let mut worst: Option<T> = None;
    for (smp, kappa) in curve.samples().iter().zip(kappas) {
        let p = &smp.point;
        if !(p.alpha.abs() < alpha_switch) {
            continue;
        }
        if curve.kind() == ProfileKind::Rotational && !(p.s > T::zero()) {
            continue;
        }
        let (sin, cos) = p.alpha.sin_cos();
        let d1 = sin / cos;
        let d2 = kappa / (cos * cos * cos);
        let mut factor = nn * p.s / (p.z * p.z);
        if curve.kind() == ProfileKind::Rotational {
            factor = factor + (nn - T::one()) / p.s;
        }
        let r = (d2 + d1 * (T::one() + d1 * d1) * factor).abs();
        worst = Some(worst.map_or(r, |w| w.max(r)));
    }
    worst.ok_or(Error::NoChartData("vertical graph"))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HorizontalChartCheck<T> {
    pub residual: T,
    /// Smallest `d''` seen; positive on strictly convex horizontal graphs.
    pub min_second_derivative: T,
    pub samples: usize,
}

/// Maximum of `|d'' - (1 + d'^2) (n d / z^2 + (n - 1) / d)|` over the samples
/// with `alpha` within `alpha_switch` of `+pi/2` or `-pi/2`, together with the
/// smallest `d''` found there.
pub fn chart_residual_horizontal<T: Real>(
    curve: &ProfileCurve<T>,
    n: Dimension,
    alpha_switch: T,
) -> Result<HorizontalChartCheck<T>> {
    let kappas = curve.curvatures()?;
    let nn = n.real::<T>();
    let half_pi = T::FRAC_PI_2();
    let mut residual = T::zero();
    let mut min_d2 = T::infinity();
    let mut count = 0usize;
    for (smp, kappa) in curve.samples().iter().zip(kappas) {
        let p = &smp.point;
        let near_up = wrap_angle(p.alpha - half_pi).abs() < alpha_switch;
        let near_down = wrap_angle(p.alpha + half_pi).abs() < alpha_switch;
        if !(near_up || near_down) {
            continue;
        }
        if curve.kind() == ProfileKind::Rotational && !(p.s > T::zero()) {
            continue;
        }
        let (sin, cos) = p.alpha.sin_cos();
        let d1 = cos / sin;
        let d2 = -kappa / (sin * sin * sin);
        let mut factor = nn * p.s / (p.z * p.z);
        if curve.kind() == ProfileKind::Rotational {
            factor = factor + (nn - T::one()) / p.s;
        }
        residual = residual.max((d2 - (T::one() + d1 * d1) * factor).abs());
        min_d2 = min_d2.min(d2);
        count += 1;
    }
    if count == 0 {
        return Err(Error::NoChartData("horizontal graph"));
    }
    Ok(HorizontalChartCheck { residual, min_second_derivative: min_d2, samples: count })
}
