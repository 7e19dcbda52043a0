//! Brute-force reference integrations, independent of the library solvers:
//! classical RK4 at a fixed arclength step on the `(s, z, alpha)` system,
//! with Richardson extrapolation between steps `2h` and `h`.

#![allow(dead_code)]

/// Rotational (`axis = true`) or parabolic angle factor.
fn factor(s: f64, z: f64, n: f64, axis: bool) -> f64 {
    let f = n * s / (z * z);
    if axis {
        f + (n - 1.0) / s
    } else {
        f
    }
}

fn rhs(y: [f64; 3], n: f64, axis: bool) -> [f64; 3] {
    let (sin, cos) = y[2].sin_cos();
    [cos, sin, -sin * factor(y[0], y[1], n, axis)]
}

/// Height where `s` first reaches `|s| >= s_max`, integrating with step `h`
/// (negative `h` integrates backwards in arclength).
pub fn rk4_final_height(y0: [f64; 3], n: f64, axis: bool, h: f64, s_max: f64) -> f64 {
    let mut y = y0;
    loop {
        let k1 = rhs(y, n, axis);
        let k2 = rhs(add(y, k1, h / 2.0), n, axis);
        let k3 = rhs(add(y, k2, h / 2.0), n, axis);
        let k4 = rhs(add(y, k3, h), n, axis);
        let mut next = y;
        for i in 0..3 {
            next[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if next[0].abs() >= s_max {
            // linear landing on |s| = s_max within the last step
            let w = (s_max - y[0].abs()) / (next[0].abs() - y[0].abs());
            return y[1] + w * (next[1] - y[1]);
        }
        y = next;
    }
}

fn add(y: [f64; 3], k: [f64; 3], h: f64) -> [f64; 3] {
    [y[0] + h * k[0], y[1] + h * k[1], y[2] + h * k[2]]
}

/// Richardson-extrapolated final height from steps `2h` and `h`.
pub fn richardson_height(y0: [f64; 3], n: f64, axis: bool, h: f64, s_max: f64) -> f64 {
    let fine = rk4_final_height(y0, n, axis, h, s_max);
    let coarse = rk4_final_height(y0, n, axis, 2.0 * h, s_max);
    fine + (fine - coarse) / 15.0
}

/// `(r_minus, r_plus)` of the catenoid with neck radius `r`.
pub fn catenoid_asymptotes(n: usize, r: f64, h: f64, s_max: f64) -> (f64, f64) {
    let half_pi = std::f64::consts::FRAC_PI_2;
    let plus = richardson_height([r, 1.0, half_pi], n as f64, true, h, s_max);
    let minus = richardson_height([r, 1.0, -half_pi], n as f64, true, h, s_max);
    (minus, plus)
}

/// `(lambda_minus, lambda_plus)` of the grim reaper through `(0, h0)` with slope `lambda`.
pub fn grim_reaper_asymptotes(n: usize, h0: f64, lambda: f64, h: f64, s_max: f64) -> (f64, f64) {
    let a0 = lambda.atan();
    let plus = richardson_height([0.0, h0, a0], n as f64, false, h, s_max);
    let minus = richardson_height([0.0, h0, a0], n as f64, false, -h, s_max);
    (minus, plus)
}
