//! Adaptive Dormand-Prince 5(4) integrator with a terminal event.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Right-hand side of an autonomous system `y' = f(y)`.
pub trait System<T, const N: usize> {
    fn rhs(&self, y: &[T; N]) -> Result<[T; N]>;
}

impl<T, const N: usize, F> System<T, N> for F
where
    F: Fn(&[T; N]) -> Result<[T; N]>,
{
    fn rhs(&self, y: &[T; N]) -> Result<[T; N]> {
        self(y)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepControl<T> {
    pub rel_tol: T,
    pub abs_tol: T,
    pub max_step: T,
    pub min_step: T,
    pub max_steps: usize,
}

/// An accepted point of the trajectory with the derivative there.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Node<T, const N: usize> {
    pub t: T,
    pub y: [T; N],
    pub dy: [T; N],
}

// Dormand-Prince tableau (autonomous form, nodes not needed)
const A: [[f64; 6]; 6] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
];
const B: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B_LOW: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

struct Trial<T, const N: usize> {
    y: [T; N],
    dy: [T; N],
    err: T,
}

fn attempt<T: Real, const N: usize, S: System<T, N>>(
    sys: &S,
    y: &[T; N],
    dy: &[T; N],
    h: T,
    ctl: &StepControl<T>,
) -> Result<Trial<T, N>> {
    let mut k = [[T::zero(); N]; 7];
    k[0] = *dy;
    for stage in 1..6 {
        let mut ys = *y;
        for (j, kj) in k.iter().enumerate().take(stage) {
            let a = T::lit(A[stage][j]);
            for i in 0..N {
                ys[i] = ys[i] + h * a * kj[i];
            }
        }
        k[stage] = sys.rhs(&ys)?;
    }
    let mut y_new = *y;
    for i in 0..N {
        let mut acc = T::zero();
        for (j, kj) in k.iter().enumerate().take(6) {
            acc = acc + T::lit(B[j]) * kj[i];
        }
        y_new[i] = y[i] + h * acc;
    }
    // first same as last: the derivative at the new point closes the error estimate
    k[6] = sys.rhs(&y_new)?;
    let mut sum = T::zero();
    for i in 0..N {
        let mut e = T::zero();
        for (j, kj) in k.iter().enumerate() {
            e = e + T::lit(B[j] - B_LOW[j]) * kj[i];
        }
        let sc = ctl.abs_tol + ctl.rel_tol * y[i].abs().max(y_new[i].abs());
        let r = h * e / sc;
        sum = sum + r * r;
    }
    let err = (sum / T::from_usize(N).unwrap()).sqrt();
    Ok(Trial { y: y_new, dy: k[6], err })
}

/// Integrates from `y0` in direction `sign(direction)` until `event(y)` becomes
/// non-negative, landing on `event(y) = 0` within `event_tol`.
///
/// Every accepted step is returned, starting with the initial node. Trial
/// steps whose stages leave the domain of `sys` are rejected and retried with
/// a smaller step.
pub fn integrate_until<T, const N: usize, S, E>(
    sys: &S,
    y0: [T; N],
    direction: T,
    ctl: &StepControl<T>,
    event: E,
    event_tol: T,
) -> Result<Vec<Node<T, N>>>
where
    T: Real,
    S: System<T, N>,
    E: Fn(&[T; N]) -> T,
{
    let dir = if direction < T::zero() { -T::one() } else { T::one() };
    let dy0 = sys.rhs(&y0)?;
    let mut nodes = vec![Node { t: T::zero(), y: y0, dy: dy0 }];
    if event(&y0) >= T::zero() {
        return Ok(nodes);
    }
    let mut h = ctl.max_step.min(T::lit(1e-4));
    let underflow = |node: &Node<T, N>| Error::StepUnderflow {
        sigma: node.t.as_f64(),
        s: node.y[0].as_f64(),
        z: node.y.get(1).map_or(f64::NAN, |v| v.as_f64()),
        alpha: node.y.get(2).map_or(f64::NAN, |v| v.as_f64()),
    };

    loop {
        if nodes.len() > ctl.max_steps {
            let last = nodes.last().unwrap();
            return Err(Error::TooManySteps {
                max_steps: ctl.max_steps,
                sigma: last.t.as_f64(),
                s: last.y[0].as_f64(),
                z: last.y.get(1).map_or(f64::NAN, |v| v.as_f64()),
                alpha: last.y.get(2).map_or(f64::NAN, |v| v.as_f64()),
            });
        }
        let cur = *nodes.last().unwrap();
        let trial = match attempt(sys, &cur.y, &cur.dy, dir * h, ctl) {
            Ok(tr) if tr.err.is_finite() => tr,
            _ => {
                h = h * T::lit(0.25);
                if h < ctl.min_step {
                    return Err(underflow(&cur));
                }
                continue;
            }
        };
        if trial.err > T::one() {
            let fac = (T::lit(0.9) * trial.err.powf(T::lit(-0.2))).max(T::lit(0.2));
            h = h * fac;
            if h < ctl.min_step {
                return Err(underflow(&cur));
            }
            continue;
        }

        let g_new = event(&trial.y);
        if g_new >= T::zero() {
            // secant search for the step that lands on the event
            let g_old = event(&cur.y);
            let (mut h_lo, mut g_lo) = (T::zero(), g_old);
            let (mut h_hi, mut g_hi) = (h, g_new);
            let mut best = trial;
            let mut best_h = h;
            for _ in 0..50 {
                if g_hi.abs() <= event_tol {
                    break;
                }
                let mut h_try = h_lo + (h_hi - h_lo) * (-g_lo) / (g_hi - g_lo);
                let span = h_hi - h_lo;
                if !(h_try > h_lo + span * T::lit(1e-3)) || !(h_try < h_hi - span * T::lit(1e-3)) {
                    h_try = h_lo + span * T::lit(0.5);
                }
                let tr = attempt(sys, &cur.y, &cur.dy, dir * h_try, ctl)?;
                let g = event(&tr.y);
                if g >= T::zero() {
                    h_hi = h_try;
                    g_hi = g;
                    best = tr;
                    best_h = h_try;
                } else {
                    h_lo = h_try;
                    g_lo = g;
                }
            }
            nodes.push(Node { t: cur.t + dir * best_h, y: best.y, dy: best.dy });
            return Ok(nodes);
        }

        nodes.push(Node { t: cur.t + dir * h, y: trial.y, dy: trial.dy });
        let fac = if trial.err == T::zero() {
            T::lit(5.0)
        } else {
            (T::lit(0.9) * trial.err.powf(T::lit(-0.2))).min(T::lit(5.0)).max(T::lit(0.2))
        };
        h = (h * fac).min(ctl.max_step);
    }
}
