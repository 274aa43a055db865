//! Left and right Riemann-Liouville and Caputo operators on uniform grids.
//!
//! Integrals use the product-trapezoidal rule (linear interpolant, singular
//! kernel moments in closed form), Caputo derivatives the L1 scheme. Right
//! operators are left operators applied to the mirrored samples.

use crate::error::{Error, Result};
use crate::grid::{trapezoid, SampledFunction};
use crate::special::{gamma_raw, rgamma};

/// Order `alpha > 0` together with `n = floor(alpha) + 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FractionalOrder {
    alpha: f64,
    n: u32,
}

impl FractionalOrder {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::OrderOutOfRange { order: alpha, range: "(0, inf)" });
        }
        Ok(Self { alpha, n: alpha.floor() as u32 + 1 })
    }

    /// Order restricted to the open unit interval.
    pub fn unit(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::OrderOutOfRange { order: alpha, range: "(0, 1)" });
        }
        Self::new(alpha)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn n(&self) -> u32 {
        self.n
    }
}

/// Signed order: positive for derivatives, negative for integrals, zero for the identity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DifferintegralOrder {
    pub beta: f64,
}

impl DifferintegralOrder {
    pub fn new(beta: f64) -> Self {
        Self { beta }
    }
}

fn mirrored(v: &[f64]) -> Vec<f64> {
    v.iter().rev().copied().collect()
}

fn reversed(mut v: Vec<f64>) -> Vec<f64> {
    v.reverse();
    v
}

fn wrap(f: &SampledFunction, values: Vec<f64>) -> SampledFunction {
    SampledFunction::new(f.grid().clone(), values).expect("length preserved")
}

/// Neumaier-compensated sum; keeps the convolution sums linear to a few ulps
/// regardless of their length.
fn compensated_sum(terms: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut comp) = (0.0_f64, 0.0_f64);
    for x in terms {
        let t = sum + x;
        comp += if sum.abs() >= x.abs() { (sum - t) + x } else { (x - t) + sum };
        sum = t;
    }
    sum + comp
}

/// Product-trapezoidal left RL integral of raw samples.
pub(crate) fn rl_integral_left(f: &[f64], h: f64, alpha: f64) -> Vec<f64> {
    let n = f.len();
    let mut out = vec![0.0; n];
    if n < 2 {
        return out;
    }
    let p1: Vec<f64> = (0..=n).map(|m| (m as f64).powf(alpha + 1.0)).collect();
    let pa: Vec<f64> = (0..=n).map(|m| (m as f64).powf(alpha)).collect();
    // interior weight as a function of m = k - j
    let w: Vec<f64> = (0..n).map(|m| if m == 0 { 1.0 } else { p1[m + 1] - 2.0 * p1[m] + p1[m - 1] }).collect();
    let scale = h.powf(alpha) * rgamma(alpha + 2.0);
    for k in 1..n {
        let kf = k as f64;
        let first = (p1[k - 1] - (kf - 1.0 - alpha) * pa[k]) * f[0];
        let acc = compensated_sum(std::iter::once(first).chain((1..=k).map(|j| w[k - j] * f[j])));
        out[k] = scale * acc;
    }
    out
}

/// L1 left Caputo derivative of raw samples, `alpha` in (0, 1).
pub(crate) fn l1_caputo_left(f: &[f64], h: f64, alpha: f64) -> Vec<f64> {
    let n = f.len();
    let q: Vec<f64> = (0..=n).map(|m| (m as f64).powf(1.0 - alpha)).collect();
    let b: Vec<f64> = (0..n).map(|m| q[m + 1] - q[m]).collect();
    let diffs: Vec<f64> = f.windows(2).map(|w| w[1] - w[0]).collect();
    let scale = h.powf(-alpha) * rgamma(2.0 - alpha);
    let mut out = vec![0.0; n];
    for k in 1..n {
        out[k] = scale * compensated_sum((0..k).map(|j| b[k - 1 - j] * diffs[j]));
    }
    out
}

/// First derivative: central differences inside, second-order one-sided at the ends.
pub(crate) fn fd_first(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    let mut out = vec![0.0; n];
    for k in 1..n - 1 {
        out[k] = (f[k + 1] - f[k - 1]) / (2.0 * h);
    }
    out[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    out[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
    out
}

/// Second derivative, same stencil conventions as [`fd_first`].
pub(crate) fn fd_second(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    let h2 = h * h;
    let mut out = vec![0.0; n];
    for k in 1..n - 1 {
        out[k] = (f[k + 1] - 2.0 * f[k] + f[k - 1]) / h2;
    }
    if n >= 4 {
        out[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / h2;
        out[n - 1] = (2.0 * f[n - 1] - 5.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]) / h2;
    } else {
        out[0] = out[1];
        out[n - 1] = out[n - 2];
    }
    out
}

pub fn left_rl_integral(f: &SampledFunction, alpha: FractionalOrder) -> SampledFunction {
    wrap(f, rl_integral_left(f.values(), f.grid().step(), alpha.alpha()))
}

pub fn right_rl_integral(f: &SampledFunction, alpha: FractionalOrder) -> SampledFunction {
    let g = rl_integral_left(&mirrored(f.values()), f.grid().step(), alpha.alpha());
    wrap(f, reversed(g))
}

/// Left Caputo derivative for `alpha` in (0, 1). Uses the first derivative row
/// when present, the L1 scheme otherwise.
pub fn left_caputo_deriv(f: &SampledFunction, alpha: FractionalOrder) -> Result<SampledFunction> {
    let a = FractionalOrder::unit(alpha.alpha())?.alpha();
    let h = f.grid().step();
    let values = match f.deriv(1) {
        Some(d1) => rl_integral_left(d1, h, 1.0 - a),
        None => l1_caputo_left(f.values(), h, a),
    };
    Ok(wrap(f, values))
}

/// Left Caputo derivative for `alpha` in (0, 1) or (1, 2).
///
/// Orders above one need the first derivative row; with a second row the
/// result is the RL integral of order `2 - alpha` of it, otherwise the L1
/// scheme of order `alpha - 1` on the first row.
pub fn left_caputo_deriv_general(f: &SampledFunction, alpha: f64) -> Result<SampledFunction> {
    if alpha > 0.0 && alpha < 1.0 {
        return left_caputo_deriv(f, FractionalOrder::new(alpha)?);
    }
    if !(alpha > 1.0 && alpha < 2.0) {
        return Err(Error::OrderOutOfRange { order: alpha, range: "(0, 1) or (1, 2)" });
    }
    let h = f.grid().step();
    let d1 = f.deriv(1).ok_or(Error::MissingDerivative(1))?;
    let values = match f.deriv(2) {
        Some(d2) => rl_integral_left(d2, h, 2.0 - alpha),
        None => l1_caputo_left(d1, h, alpha - 1.0),
    };
    Ok(wrap(f, values))
}

/// Right Caputo derivative for `alpha` in (0, 1); zero at `t = b`.
pub fn right_caputo_deriv(f: &SampledFunction, alpha: FractionalOrder) -> Result<SampledFunction> {
    let a = FractionalOrder::unit(alpha.alpha())?.alpha();
    let h = f.grid().step();
    let values = match f.deriv(1) {
        // right Caputo = -(right integral of f')
        Some(d1) => rl_integral_left(&mirrored(d1), h, 1.0 - a).into_iter().map(|v| -v).collect(),
        // mirroring turns -f' into the derivative of the mirrored samples
        None => l1_caputo_left(&mirrored(f.values()), h, a),
    };
    Ok(wrap(f, reversed(values)))
}

/// Right RL derivative of order `beta` in (0, 2) of raw samples.
///
/// `f(b) + f'(b)(t - b)` is removed before integrating and its derivative
/// added back in closed form, so the leading `(b - t)^(-beta)` singularity is
/// exact rather than differentiated numerically.
fn rl_deriv_right(f: &[f64], h: f64, beta: f64) -> Vec<f64> {
    let n = f.len();
    let m = if beta < 1.0 { 1 } else { 2 };
    let gam = m as f64 - beta;
    let fb = f[n - 1];
    let dfb = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
    let s = |k: usize| (n - 1 - k) as f64 * h;
    let reg: Vec<f64> = (0..n).map(|k| f[k] - fb + dfb * s(k)).collect();
    let j_reg = reversed(rl_integral_left(&mirrored(&reg), h, gam));
    let (d_reg, sign) = if m == 1 { (fd_first(&j_reg, h), -1.0) } else { (fd_second(&j_reg, h), 1.0) };

    let c0 = fb * rgamma(1.0 - beta);
    let c1 = dfb * rgamma(2.0 - beta);
    let mut out: Vec<f64> = (0..n - 1)
        .map(|k| sign * d_reg[k] + c0 * s(k).powf(-beta) - c1 * s(k).powf(1.0 - beta))
        .collect();

    // at t = b differentiate the full integral one-sidedly
    let g1 = rgamma(1.0 + gam);
    let g2 = rgamma(2.0 + gam);
    let j_full = |k: usize| j_reg[k] + fb * s(k).powf(gam) * g1 - dfb * s(k).powf(1.0 + gam) * g2;
    let end = if m == 1 {
        -(3.0 * j_full(n - 1) - 4.0 * j_full(n - 2) + j_full(n - 3)) / (2.0 * h)
    } else if n >= 4 {
        (2.0 * j_full(n - 1) - 5.0 * j_full(n - 2) + 4.0 * j_full(n - 3) - j_full(n - 4)) / (h * h)
    } else {
        (j_full(n - 1) - 2.0 * j_full(n - 2) + j_full(n - 3)) / (h * h)
    };
    out.push(end);
    out
}

/// Right RL operator of signed order: integral for `beta < 0`, identity for
/// `beta = 0`, derivative for `beta` in (0, 2).
pub fn right_rl_differintegral(f: &SampledFunction, order: DifferintegralOrder) -> Result<SampledFunction> {
    let beta = order.beta;
    if !beta.is_finite() || beta.abs() >= 2.0 {
        return Err(Error::UnsupportedOrder(beta));
    }
    let h = f.grid().step();
    let values = if beta < 0.0 {
        return Ok(right_rl_integral(f, FractionalOrder::new(-beta)?));
    } else if beta == 0.0 {
        f.values().to_vec()
    } else if beta == 1.0 {
        fd_first(f.values(), h).into_iter().map(|v| -v).collect()
    } else {
        rl_deriv_right(f.values(), h, beta)
    };
    Ok(wrap(f, values))
}

/// Left RL derivative for `alpha` in (0, 1), the mirror image of the right one.
pub fn left_rl_deriv(f: &SampledFunction, alpha: FractionalOrder) -> Result<SampledFunction> {
    let a = FractionalOrder::unit(alpha.alpha())?.alpha();
    let g = rl_deriv_right(&mirrored(f.values()), f.grid().step(), a);
    Ok(wrap(f, reversed(g)))
}

/// The fractional bracket `f * D^alpha g - g * tD^alpha f` (left Caputo on
/// `g`, right RL on `f`).
pub fn d_alpha_bracket(f: &SampledFunction, g: &SampledFunction, alpha: f64) -> Result<SampledFunction> {
    if !f.grid().matches(g.grid()) {
        return Err(Error::GridMismatch);
    }
    let cg = left_caputo_deriv(g, FractionalOrder::unit(alpha)?)?;
    let rf = right_rl_differintegral(f, DifferintegralOrder::new(alpha))?;
    let values = (0..f.len())
        .map(|k| f.values()[k] * cg.values()[k] - g.values()[k] * rf.values()[k])
        .collect();
    Ok(wrap(f, values))
}

/// Integration-by-parts discrepancy between the Caputo and right RL sides.
pub fn ibp_defect(x: &SampledFunction, y: &SampledFunction, alpha: FractionalOrder) -> Result<f64> {
    if !x.grid().matches(y.grid()) {
        return Err(Error::GridMismatch);
    }
    let a = FractionalOrder::unit(alpha.alpha())?;
    let h = x.grid().step();
    let cx = left_caputo_deriv(x, a)?;
    let ry = right_rl_differintegral(y, DifferintegralOrder::new(a.alpha()))?;
    let lhs: Vec<f64> = y.values().iter().zip(cx.values()).map(|(p, q)| p * q).collect();
    let rhs: Vec<f64> = x.values().iter().zip(ry.values()).map(|(p, q)| p * q).collect();
    let iy = right_rl_integral(y, FractionalOrder::new(1.0 - a.alpha())?);
    let boundary = iy.last() * x.last() - iy.first() * x.first();
    Ok((trapezoid(&lhs, h) - trapezoid(&rhs, h) - boundary).abs())
}

/// `Gamma(p + 1) / Gamma(p + 1 - beta) * s^(p - beta)`: the power rule for a
/// differintegral of order `beta` applied to `s^p`.
pub fn power_rule(p: f64, beta: f64, s: f64) -> f64 {
    if s == 0.0 {
        return if p - beta > 0.0 { 0.0 } else if p == beta { gamma_raw(p + 1.0) } else { f64::INFINITY };
    }
    gamma_raw(p + 1.0) * rgamma(p + 1.0 - beta) * s.powf(p - beta)
}
