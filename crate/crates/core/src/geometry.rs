//! Curvature of rotational and parabolic-cylinder hypersurfaces in the upper
//! half-space model of hyperbolic space.
//!
//! Everything is reduced to the generating profile curve in the `(s, z)`
//! half-plane: `s` is the Euclidean distance from the vertical axis (or the
//! signed horizontal coordinate for parabolic cylinders) and `z` the height.
//! A profile point carries its tangent angle `alpha`, with unit tangent
//! `(cos alpha, sin alpha)` and Euclidean unit normal
//! `nu = (-sin alpha, cos alpha)`. The hyperbolic unit normal is `N = z nu`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{wrap_angle, Real};

/// Hypersurface dimension `n`; the ambient space is `H^{n+1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct Dimension(usize);

impl Dimension {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidDimension(n));
        }
        Ok(Dimension(n))
    }

    #[inline]
    pub fn get(self) -> usize {
        self.0
    }

    #[inline]
    pub fn real<T: Real>(self) -> T {
        T::from_usize(self.0).expect("dimension fits scalar")
    }
}

impl TryFrom<usize> for Dimension {
    type Error = Error;
    fn try_from(n: usize) -> Result<Self> {
        Dimension::new(n)
    }
}

impl From<Dimension> for usize {
    fn from(d: Dimension) -> usize {
        d.0
    }
}

/// A point of the `(s, z)` half-plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HalfSpacePoint<T> {
    pub horizontal: T,
    pub height: T,
}

impl<T: Real> HalfSpacePoint<T> {
    pub fn new(horizontal: T, height: T) -> Result<Self> {
        if !(height > T::zero()) {
            return Err(Error::OutsideHalfSpace { height: height.as_f64() });
        }
        Ok(HalfSpacePoint { horizontal, height })
    }

    /// Hyperbolic distance between two points of the same vertical half-plane.
    pub fn distance(&self, other: &Self) -> T {
        let ds = self.horizontal - other.horizontal;
        let dz = self.height - other.height;
        let arg = T::one() + (ds * ds + dz * dz) / (T::lit(2.0) * self.height * other.height);
        arg.acosh()
    }
}

/// A point of a profile curve together with its tangent angle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfilePoint<T> {
    pub s: T,
    pub z: T,
    pub alpha: T,
}

impl<T: Real> ProfilePoint<T> {
    pub fn new(s: T, z: T, alpha: T) -> Result<Self> {
        if !(z > T::zero()) {
            return Err(Error::OutsideHalfSpace { height: z.as_f64() });
        }
        Ok(ProfilePoint { s, z, alpha: wrap_angle(alpha) })
    }

    /// Euclidean unit normal `(-sin alpha, cos alpha)`.
    #[inline]
    pub fn normal(&self) -> (T, T) {
        let (sin, cos) = self.alpha.sin_cos();
        (-sin, cos)
    }

    /// Same point with the opposite orientation.
    pub fn flipped(&self) -> Self {
        ProfilePoint { s: self.s, z: self.z, alpha: wrap_angle(self.alpha + T::PI()) }
    }
}

/// Symmetry type of the hypersurface generated by a profile curve.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProfileKind {
    /// Rotation about the vertical axis; `s >= 0` is the distance to the axis.
    Rotational,
    /// Translation along `n - 1` horizontal directions; `s` ranges over all reals.
    ParabolicCylinder,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileSample<T> {
    /// Arclength parameter.
    pub sigma: T,
    pub point: ProfilePoint<T>,
    /// Signed profile curvature with respect to the normal `(-sin alpha, cos alpha)`,
    /// when known exactly (e.g. from an ODE right-hand side).
    pub curvature: Option<T>,
}

/// Arclength-sampled generating curve of a rotational or parabolic-cylinder
/// hypersurface.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileCurve<T> {
    kind: ProfileKind,
    n: Dimension,
    samples: Vec<ProfileSample<T>>,
}

impl<T: Real> ProfileCurve<T> {
    /// Builds a curve, checking that arclength increases strictly and that
    /// every sample lies in the half-space.
    pub fn new(kind: ProfileKind, n: Dimension, samples: Vec<ProfileSample<T>>) -> Result<Self> {
        for w in samples.windows(2) {
            if !(w[1].sigma > w[0].sigma) {
                return Err(Error::InvalidParameter(format!(
                    "arclength not strictly increasing at sigma = {}",
                    w[1].sigma
                )));
            }
        }
        for smp in &samples {
            if !(smp.point.z > T::zero()) {
                return Err(Error::OutsideHalfSpace { height: smp.point.z.as_f64() });
            }
            if kind == ProfileKind::Rotational && smp.point.s < T::zero() {
                return Err(Error::InvalidParameter(format!(
                    "rotational profile with negative radius {}",
                    smp.point.s
                )));
            }
        }
        Ok(ProfileCurve { kind, n, samples })
    }

    /// Profile of the horosphere at height `h`: `alpha = 0`, `z = h` over `s` in `[s0, s1]`.
    pub fn horosphere(kind: ProfileKind, n: Dimension, h: T, s0: T, s1: T, count: usize) -> Result<Self> {
        if count < 2 {
            return Err(Error::InsufficientData { needed: 2, got: count });
        }
        let step = (s1 - s0) / T::from_usize(count - 1).unwrap();
        let samples = (0..count)
            .map(|i| {
                let s = s0 + step * T::from_usize(i).unwrap();
                Ok(ProfileSample {
                    sigma: s - s0,
                    point: ProfilePoint::new(s, h, T::zero())?,
                    curvature: Some(T::zero()),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        ProfileCurve::new(kind, n, samples)
    }

    pub fn kind(&self) -> ProfileKind {
        self.kind
    }

    pub fn dimension(&self) -> Dimension {
        self.n
    }

    pub fn samples(&self) -> &[ProfileSample<T>] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn first(&self) -> Option<&ProfileSample<T>> {
        self.samples.first()
    }

    pub fn last(&self) -> Option<&ProfileSample<T>> {
        self.samples.last()
    }

    /// Opposite orientation: every normal is negated (`alpha -> alpha + pi`),
    /// which also negates the signed profile curvature.
    pub fn flipped(&self) -> Self {
        let samples = self
            .samples
            .iter()
            .map(|smp| ProfileSample {
                sigma: smp.sigma,
                point: smp.point.flipped(),
                curvature: smp.curvature.map(|k| -k),
            })
            .collect();
        ProfileCurve { kind: self.kind, n: self.n, samples }
    }

    /// Profile curvature at every sample: the stored value when present,
    /// otherwise a centred finite difference of `alpha` in arclength.
    pub fn curvatures(&self) -> Result<Vec<T>> {
        let m = self.samples.len();
        if self.samples.iter().all(|smp| smp.curvature.is_some()) {
            return Ok(self.samples.iter().map(|smp| smp.curvature.unwrap()).collect());
        }
        if m < 3 {
            return Err(Error::InsufficientData { needed: 3, got: m });
        }
        let mut out = Vec::with_capacity(m);
        for i in 0..m {
            if let Some(k) = self.samples[i].curvature {
                out.push(k);
                continue;
            }
            let (a, b, c) = match i {
                0 => (0, 1, 2),
                i if i == m - 1 => (m - 3, m - 2, m - 1),
                i => (i - 1, i, i + 1),
            };
            let sa = &self.samples[a];
            let sb = &self.samples[b];
            let sc = &self.samples[c];
            // unwrapped angles relative to the middle sample
            let ya = wrap_angle(sa.point.alpha - sb.point.alpha);
            let yc = wrap_angle(sc.point.alpha - sb.point.alpha);
            let h1 = sb.sigma - sa.sigma;
            let h2 = sc.sigma - sb.sigma;
            let x = self.samples[i].sigma;
            // derivative of the interpolating quadratic through (a, b, c) at x
            let da = (T::lit(2.0) * x - sb.sigma - sc.sigma) / (h1 * (h1 + h2));
            let db = -(T::lit(2.0) * x - sa.sigma - sc.sigma) / (h1 * h2);
            let dc = (T::lit(2.0) * x - sa.sigma - sb.sigma) / (h2 * (h1 + h2));
            let dalpha = da * ya + db * T::zero() + dc * yc;
            // the stored tangent may point against the direction of traversal
            let (sin, cos) = self.samples[i].point.alpha.sin_cos();
            let chord_s = sc.point.s - sa.point.s;
            let chord_z = sc.point.z - sa.point.z;
            let sign = if cos * chord_s + sin * chord_z >= T::zero() { T::one() } else { -T::one() };
            out.push(sign * dalpha);
        }
        Ok(out)
    }
}

/// Hyperbolic mean curvature `z * H_euclid + N_euclid_vertical` with respect to
/// the hyperbolic normal `N = z * N_euclid`.
pub fn hyperbolic_mean_curvature<T: Real>(z: T, euclid_h: T, euclid_normal_vertical: T) -> Result<T> {
    if !(z > T::zero()) {
        return Err(Error::OutsideHalfSpace { height: z.as_f64() });
    }
    Ok(z * euclid_h + euclid_normal_vertical)
}

/// Euclidean mean curvature of a rotational hypersurface at a profile point,
/// with normal `(-sin alpha, cos alpha)`.
pub fn rotational_euclidean_mean_curvature<T: Real>(p: &ProfilePoint<T>, kappa_profile: T, n: Dimension) -> Result<T> {
    if !(p.s > T::zero()) {
        return Err(Error::AxisSingularity { s: p.s.as_f64() });
    }
    Ok(rotational_mean_curvature_from_sine(p.s, p.alpha.sin(), kappa_profile, n))
}

/// Rotational Euclidean mean curvature from the sine of the tangent angle.
/// `s` must be positive.
#[inline]
pub fn rotational_mean_curvature_from_sine<T: Real>(s: T, sin_alpha: T, kappa_profile: T, n: Dimension) -> T {
    let nn = n.real::<T>();
    (kappa_profile + (nn - T::one()) * sin_alpha / s) / nn
}

/// Limit of the rotational Euclidean mean curvature on the axis, where the
/// rotational principal curvatures coincide with the profile curvature.
#[inline]
pub fn axis_euclidean_mean_curvature<T: Real>(kappa_profile: T) -> T {
    kappa_profile
}

/// Euclidean mean curvature of a parabolic cylinder: only the profile
/// direction is curved.
#[inline]
pub fn parabolic_euclidean_mean_curvature<T: Real>(kappa_profile: T, n: Dimension) -> T {
    kappa_profile / n.real::<T>()
}

/// `<p, N>` in the hyperbolic metric, `N = z * (-sin alpha, cos alpha)`.
pub fn soliton_support<T: Real>(p: &ProfilePoint<T>) -> Result<T> {
    if !(p.z > T::zero()) {
        return Err(Error::OutsideHalfSpace { height: p.z.as_f64() });
    }
    let (sin, cos) = p.alpha.sin_cos();
    Ok((-p.s * sin + p.z * cos) / p.z)
}

/// Per-sample translator diagnostics.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleGeometry<T> {
    pub mean_curvature: T,
    pub support: T,
    pub residual: T,
}

fn euclidean_mean_curvature<T: Real>(kind: ProfileKind, p: &ProfilePoint<T>, kappa: T, n: Dimension) -> Result<T> {
    match kind {
        ProfileKind::ParabolicCylinder => Ok(parabolic_euclidean_mean_curvature(kappa, n)),
        ProfileKind::Rotational if p.s == T::zero() => Ok(axis_euclidean_mean_curvature(kappa)),
        ProfileKind::Rotational => rotational_euclidean_mean_curvature(p, kappa, n),
    }
}

/// `H`, `<p, N>` and `|H - <p, N>|` at every sample of the curve.
pub fn translator_diagnostics<T: Real>(curve: &ProfileCurve<T>) -> Result<Vec<SampleGeometry<T>>> {
    if curve.len() < 3 {
        return Err(Error::InsufficientData { needed: 3, got: curve.len() });
    }
    let kappas = curve.curvatures()?;
    curve
        .samples()
        .iter()
        .zip(kappas)
        .map(|(smp, kappa)| {
            let p = &smp.point;
            let hbar = euclidean_mean_curvature(curve.kind(), p, kappa, curve.dimension())?;
            let h = hyperbolic_mean_curvature(p.z, hbar, p.alpha.cos())?;
            let support = soliton_support(p)?;
            Ok(SampleGeometry { mean_curvature: h, support, residual: (h - support).abs() })
        })
        .collect()
}

/// Maximum of `|H - <p, N>|` along the curve; zero exactly on translators.
pub fn translator_residual<T: Real>(curve: &ProfileCurve<T>) -> Result<T> {
    Ok(translator_diagnostics(curve)?
        .into_iter()
        .fold(T::zero(), |acc, g| acc.max(g.residual)))
}

/// Image of the curve under the hyperbolic translation `p -> e^t p`.
pub fn translate_profile<T: Real>(curve: &ProfileCurve<T>, t: T) -> ProfileCurve<T> {
    let scale = t.exp();
    let samples = curve
        .samples()
        .iter()
        .map(|smp| ProfileSample {
            sigma: smp.sigma * scale,
            point: ProfilePoint { s: smp.point.s * scale, z: smp.point.z * scale, alpha: smp.point.alpha },
            curvature: smp.curvature.map(|k| k / scale),
        })
        .collect();
    ProfileCurve { kind: curve.kind(), n: curve.dimension(), samples }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn dim(n: usize) -> Dimension {
        Dimension::new(n).unwrap()
    }

    #[test]
    fn dimension_rejects_small() {
        assert_eq!(Dimension::new(1), Err(Error::InvalidDimension(1)));
        assert_eq!(dim(3).get(), 3);
    }

    #[test]
    fn horosphere_mean_curvature_is_one() {
        assert_eq!(hyperbolic_mean_curvature(0.7, 0.0, 1.0).unwrap(), 1.0);
        assert!((hyperbolic_mean_curvature(2.0f64, 0.5, 0.3).unwrap() - 1.3).abs() < 1e-15);
        assert!(matches!(hyperbolic_mean_curvature(0.0, 1.0, 1.0), Err(Error::OutsideHalfSpace { .. })));
    }

    #[test]
    fn hemisphere_is_minimal() {
        // unit hemisphere with inward normal: H_euclid = 1, N_vertical = -z
        for i in 0..100 {
            let phi = 0.01 + 1.5 * i as f64 / 100.0;
            let z = phi.cos();
            assert!(hyperbolic_mean_curvature(z, 1.0, -z).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn cylinder_and_flat_profiles() {
        let r = 2.5;
        let p = ProfilePoint::new(r, 1.0, FRAC_PI_2).unwrap();
        let h = rotational_euclidean_mean_curvature(&p, 0.0, dim(2)).unwrap();
        assert!((h - 1.0 / (2.0 * r)).abs() < 1e-15);
        let flat = ProfilePoint::new(3.0, 0.2, 0.0).unwrap();
        for n in 2..6 {
            assert_eq!(rotational_euclidean_mean_curvature(&flat, 0.0, dim(n)).unwrap(), 0.0);
        }
        let axis = ProfilePoint::new(0.0, 1.0, 0.0).unwrap();
        assert!(matches!(
            rotational_euclidean_mean_curvature(&axis, 1.0, dim(2)),
            Err(Error::AxisSingularity { .. })
        ));
    }

    #[test]
    fn support_examples() {
        let horo = ProfilePoint::new(17.0f64, 0.3, 0.0).unwrap();
        assert!((soliton_support(&horo).unwrap() - 1.0).abs() < 1e-15);
        let neck = ProfilePoint::new(0.8f64, 1.0, FRAC_PI_2).unwrap();
        assert!((soliton_support(&neck).unwrap() + 0.8).abs() < 1e-15);
    }

    #[test]
    fn orientation_flip_negates() {
        let p = ProfilePoint::new(1.3f64, 0.6, 0.4).unwrap();
        let q = p.flipped();
        let k = 0.9;
        let n = dim(3);
        let h = hyperbolic_mean_curvature(p.z, rotational_euclidean_mean_curvature(&p, k, n).unwrap(), p.alpha.cos()).unwrap();
        let hq = hyperbolic_mean_curvature(q.z, rotational_euclidean_mean_curvature(&q, -k, n).unwrap(), q.alpha.cos()).unwrap();
        assert!((h + hq).abs() < 1e-14);
        assert!((soliton_support(&p).unwrap() + soliton_support(&q).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn horosphere_profile_has_zero_residual() {
        for &h in &[0.1, 1.0, 10.0] {
            for kind in [ProfileKind::Rotational, ProfileKind::ParabolicCylinder] {
                let c = ProfileCurve::horosphere(kind, dim(2), h, 0.5, 20.0, 50).unwrap();
                let diag = translator_diagnostics(&c).unwrap();
                for g in &diag {
                    assert_eq!(g.mean_curvature, 1.0);
                    assert_eq!(g.support, 1.0);
                }
                assert!(translator_residual(&c).unwrap() < 1e-12);
            }
        }
    }

    #[test]
    fn residual_needs_three_samples() {
        let c = ProfileCurve::horosphere(ProfileKind::Rotational, dim(2), 1.0, 1.0, 2.0, 2).unwrap();
        assert_eq!(translator_residual(&c), Err(Error::InsufficientData { needed: 3, got: 2 }));
    }

    #[test]
    fn unit_circle_is_not_a_translator() {
        // quarter circle traversed from the top, tangent (cos a, sin a), a = -phi
        let m = 200;
        let samples = (0..m)
            .map(|i| {
                let phi = 0.05 + 1.4 * i as f64 / (m - 1) as f64;
                ProfileSample {
                    sigma: phi,
                    point: ProfilePoint::new(phi.sin(), phi.cos(), -phi).unwrap(),
                    curvature: None,
                }
            })
            .collect();
        let c = ProfileCurve::new(ProfileKind::Rotational, dim(2), samples).unwrap();
        let diag = translator_diagnostics(&c).unwrap();
        for g in &diag {
            // totally geodesic: H = 0 up to the finite-difference curvature estimate
            assert!(g.mean_curvature.abs() < 1e-4);
        }
        assert!(translator_residual(&c).unwrap() > 0.5);
    }

    #[test]
    fn translate_horosphere() {
        let c = ProfileCurve::horosphere(ProfileKind::Rotational, dim(2), 1.0, 0.0, 5.0, 11).unwrap();
        assert_eq!(translate_profile(&c, 0.0), c);
        let c2 = translate_profile(&c, 2f64.ln());
        for smp in c2.samples() {
            assert!((smp.point.z - 2.0).abs() < 1e-15);
            assert_eq!(smp.point.alpha, 0.0);
        }
    }

    #[test]
    fn flipped_curve_keeps_finite_difference_orientation() {
        let m = 100;
        let samples = (0..m)
            .map(|i| {
                let phi = 0.1 + 1.2 * i as f64 / (m - 1) as f64;
                ProfileSample {
                    sigma: phi,
                    point: ProfilePoint::new(phi.sin(), phi.cos(), -phi).unwrap(),
                    curvature: None,
                }
            })
            .collect();
        let c = ProfileCurve::new(ProfileKind::Rotational, dim(2), samples).unwrap();
        let k = c.curvatures().unwrap();
        let kf = c.flipped().curvatures().unwrap();
        for (a, b) in k.iter().zip(&kf) {
            assert!((a + 1.0).abs() < 1e-10);
            assert!((a + b).abs() < 1e-10);
        }
        let _ = PI;
    }

    #[test]
    fn distance_along_horosphere() {
        let a = HalfSpacePoint::new(0.0, 1.0).unwrap();
        let b = HalfSpacePoint::new(2.0, 1.0).unwrap();
        // cosh d = 1 + r^2 / 2
        assert!((a.distance(&b) - 3f64.acosh()).abs() < 1e-14);
        assert!(HalfSpacePoint::new(1.0, -1.0).is_err());
    }
}
