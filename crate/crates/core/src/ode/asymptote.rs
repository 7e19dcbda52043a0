//! Limits of monotone branch tails by Aitken extrapolation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::ProfileCurve;
use crate::scalar::Real;

/// Number of halvings of the tail length used to build the sequence.
pub const TAIL_DOUBLINGS: usize = 5;

/// Largest `|sin alpha|` at the end of a branch for it to count as flat.
pub const FLAT_SINE: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Asymptote<T> {
    pub limit: T,
    /// Size of the last extrapolation increment.
    pub error: T,
}

/// Extrapolated limit of `height` as `distance -> infinity`.
///
/// `tail` holds `(distance, height)` pairs ordered by increasing distance.
/// Heights are read at the distances `d0 + L / 2^k`, `k = 0..=5`, where
/// `[d0, d0 + L]` is the sampled range, so the sequence follows five
/// consecutive doublings of the distance. Its increments must shrink in
/// magnitude; the limit is the Aitken delta-squared extrapolation of the
/// last three terms.
pub fn estimate_asymptote<T: Real>(tail: &[(T, T)]) -> Result<Asymptote<T>> {
    if tail.len() < 3 {
        return Err(Error::InsufficientData { needed: 3, got: tail.len() });
    }
    let d0 = tail[0].0;
    let span = tail[tail.len() - 1].0 - d0;
    if !(span > T::zero()) {
        return Err(Error::InvalidParameter("tail distances must increase".into()));
    }

    // sample indices nearest to d0 + span / 2^k, from the shortest distance out
    let mut picks: Vec<usize> = Vec::with_capacity(TAIL_DOUBLINGS + 1);
    for k in (0..=TAIL_DOUBLINGS).rev() {
        let target = d0 + span / T::lit((1u64 << k) as f64);
        let idx = match tail.binary_search_by(|p| p.0.partial_cmp(&target).unwrap()) {
            Ok(i) => i,
            Err(i) if i == 0 => 0,
            Err(i) if i >= tail.len() => tail.len() - 1,
            Err(i) => {
                if (tail[i].0 - target).abs() < (target - tail[i - 1].0).abs() {
                    i
                } else {
                    i - 1
                }
            }
        };
        if picks.last() != Some(&idx) {
            picks.push(idx);
        }
    }
    if picks.len() < 3 {
        return Err(Error::InsufficientData { needed: 3, got: picks.len() });
    }

    let ys: Vec<T> = picks.iter().map(|&i| tail[i].1).collect();
    let incs: Vec<T> = ys.windows(2).map(|w| w[1] - w[0]).collect();
    let last = *ys.last().unwrap();
    let slack = T::epsilon() * T::lit(8.0) * last.abs().max(T::one());
    for w in incs.windows(2) {
        if w[1].abs() > w[0].abs() + slack {
            return Err(Error::NotAsymptotic(format!(
                "height increments grow along the tail ({} then {})",
                w[0], w[1]
            )));
        }
    }

    let d1 = incs[incs.len() - 2];
    let d2 = incs[incs.len() - 1];
    let denom = d2 - d1;
    let limit = if d2 == T::zero() || denom == T::zero() {
        last
    } else {
        last - d2 * d2 / denom
    };
    Ok(Asymptote { limit, error: (limit - last).abs() })
}

/// Asymptotic height of a profile branch that leaves its first sample and
/// flattens out as `s` grows in magnitude.
pub fn estimate_branch_asymptote<T: Real>(branch: &ProfileCurve<T>) -> Result<Asymptote<T>> {
    let last = branch.last().ok_or(Error::InsufficientData { needed: 3, got: 0 })?;
    if last.point.alpha.sin().abs() > T::lit(FLAT_SINE) {
        return Err(Error::NotAsymptotic(format!(
            "tangent not yet horizontal at s = {} (alpha = {})",
            last.point.s, last.point.alpha
        )));
    }
    let s0 = branch.first().unwrap().point.s;
    let tail: Vec<(T, T)> = branch
        .samples()
        .iter()
        .map(|smp| ((smp.point.s - s0).abs(), smp.point.z))
        .collect();
    estimate_asymptote(&tail)
}
