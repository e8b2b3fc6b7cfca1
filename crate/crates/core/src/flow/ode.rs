//! Scalar ODE integration for the exact-solution catalog.

use crate::error::{Error, Result};

fn rk4_step(f: &dyn Fn(f64, f64) -> f64, t: f64, y: f64, h: f64) -> f64 {
    let k1 = f(t, y);
    let k2 = f(t + 0.5 * h, y + 0.5 * h * k1);
    let k3 = f(t + 0.5 * h, y + 0.5 * h * k2);
    let k4 = f(t + h, y + h * k3);
    y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
}

/// Fixed-step RK4 from `t0` to each of `times` (ascending, `≥ t0`).
pub fn rk4_fixed(
    f: impl Fn(f64, f64) -> f64,
    t0: f64,
    y0: f64,
    times: &[f64],
    dt: f64,
) -> Vec<f64> {
    let mut out = Vec::with_capacity(times.len());
    let (mut t, mut y) = (t0, y0);
    for &target in times {
        while target - t > 1e-14 * target.abs().max(1.0) {
            let h = dt.min(target - t);
            y = rk4_step(&f, t, y, h);
            t += h;
        }
        out.push(y);
    }
    out
}

/// Adaptive RK4 with step doubling; the local error per step is kept below
/// `tol · max(1, |y|)`. Returns the solution at each of `times`.
pub fn rk4_adaptive(
    f: impl Fn(f64, f64) -> f64,
    t0: f64,
    y0: f64,
    times: &[f64],
    tol: f64,
) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(times.len());
    let (mut t, mut y) = (t0, y0);
    let mut h = 1e-4 * times.last().map_or(1.0, |e| (e - t0).abs().max(1e-6));
    for &target in times {
        let mut steps = 0usize;
        while target - t > 1e-14 * target.abs().max(1.0) {
            steps += 1;
            if steps > 10_000_000 {
                return Err(Error::Invariant(format!("ODE step budget exhausted at t = {t}")));
            }
            let step = h.min(target - t);
            let full = rk4_step(&f, t, y, step);
            let half = rk4_step(&f, t, y, 0.5 * step);
            let two = rk4_step(&f, t + 0.5 * step, half, 0.5 * step);
            let err = (two - full).abs() / 15.0;
            let scale = tol * y.abs().max(1.0);
            if !two.is_finite() || err > scale {
                h = 0.5 * step;
                if t + h == t {
                    return Err(Error::Invariant(format!("ODE step underflow at t = {t}")));
                }
                continue;
            }
            t += step;
            y = two + (two - full) / 15.0;
            let grow = if err == 0.0 { 2.0 } else { (0.9 * (scale / err).powf(0.2)).clamp(0.2, 2.0) };
            h = step.max(h) * grow;
        }
        out.push(y);
    }
    Ok(out)
}
