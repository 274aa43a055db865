//! Adaptive Dormand-Prince 5(4) integrator with dense stops at requested times.

use crate::error::{Error, Result};

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B_LOW: [f64; 7] =
    [5179.0 / 57600.0, 0.0, 7571.0 / 16695.0, 393.0 / 640.0, -92097.0 / 339200.0, 187.0 / 2100.0, 1.0 / 40.0];

const MAX_STEPS: usize = 200_000;

#[derive(Debug, Clone, Copy)]
pub(crate) struct Tolerance {
    pub rtol: f64,
    pub atol: f64,
}

/// Integrates `y' = f(t, y)` from `(t0, y0)` and returns the state at each of
/// the increasing times in `outputs`.
pub(crate) fn integrate<const N: usize>(
    f: &mut impl FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
    t0: f64,
    y0: [f64; N],
    outputs: &[f64],
    tol: Tolerance,
) -> Result<Vec<[f64; N]>> {
    let mut t = t0;
    let mut y = y0;
    let mut out = Vec::with_capacity(outputs.len());
    let mut h = outputs.first().map_or(0.0, |&t1| t1 - t0);
    let mut steps = 0;
    for &target in outputs {
        while t < target {
            let remaining = target - t;
            let last = h >= remaining;
            let step = if last { remaining } else { h };
            let (y_new, err) = trial(f, t, &y, step, tol)?;
            steps += 1;
            if steps > MAX_STEPS {
                return Err(Error::Stiff { t });
            }
            if err <= 1.0 {
                t = if last { target } else { t + step };
                y = y_new;
            }
            let factor = if err.is_finite() && err > 0.0 { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) } else if err == 0.0 { 5.0 } else { 0.2 };
            if err <= 1.0 && last {
                // keep the controller's proposal, not the clipped step
                h = h.max(step * factor);
            } else {
                h = step * factor;
            }
            if h < 1e-13 * t.abs().max(1.0) {
                return Err(Error::Stiff { t });
            }
        }
        out.push(y);
    }
    Ok(out)
}

fn trial<const N: usize>(
    f: &mut impl FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
    t: f64,
    y: &[f64; N],
    h: f64,
    tol: Tolerance,
) -> Result<([f64; N], f64)> {
    let mut k = [[0.0; N]; 7];
    for s in 0..7 {
        let mut ys = *y;
        for (r, a) in A[s].iter().enumerate().take(s) {
            for i in 0..N {
                ys[i] += h * a * k[r][i];
            }
        }
        k[s] = f(t + C[s] * h, &ys)?;
    }
    let mut y_new = *y;
    let mut acc = 0.0;
    for i in 0..N {
        let mut hi = 0.0;
        let mut lo = 0.0;
        for s in 0..7 {
            hi += B[s] * k[s][i];
            lo += B_LOW[s] * k[s][i];
        }
        y_new[i] += h * hi;
        let sc = tol.atol + tol.rtol * y[i].abs().max(y_new[i].abs());
        let e = h * (hi - lo) / sc;
        acc += e * e;
    }
    let err = (acc / N as f64).sqrt();
    Ok((y_new, if err.is_nan() { f64::INFINITY } else { err }))
}
