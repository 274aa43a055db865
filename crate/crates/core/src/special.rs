//! Gamma-family special functions and fractional binomial coefficients.

use std::f64::consts::PI;

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS_P: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Distance from a non-positive integer below which the argument counts as a pole.
const POLE_TOL: f64 = 1e-12;

/// `sin(pi x)` with exact argument reduction.
fn sin_pi(x: f64) -> f64 {
    let r = x - 2.0 * (x / 2.0).round();
    // r in [-1, 1]
    if r.abs() <= 0.25 {
        (PI * r).sin()
    } else if r > 0.75 {
        (PI * (1.0 - r)).sin()
    } else if r < -0.75 {
        -(PI * (1.0 + r)).sin()
    } else if r > 0.0 {
        (PI * (0.5 - r)).cos()
    } else {
        -(PI * (0.5 + r)).cos()
    }
}

fn near_pole(x: f64) -> bool {
    x <= POLE_TOL && (x - x.round()).abs() < POLE_TOL
}

/// Lanczos approximation, valid for `x >= 0.5`.
fn lanczos(x: f64) -> f64 {
    let x = x - 1.0;
    let mut acc = LANCZOS_P[0];
    for (i, &p) in LANCZOS_P.iter().enumerate().skip(1) {
        acc += p / (x + i as f64);
    }
    let w = x + LANCZOS_G + 0.5;
    // split the power so that arguments up to ~170 do not overflow early
    let half = w.powf(0.5 * (x + 0.5));
    (2.0 * PI).sqrt() * half * (-w).exp() * half * acc
}

/// Gamma function; errors at the poles `0, -1, -2, ...`.
pub fn gamma(x: f64) -> Result<f64> {
    if near_pole(x) {
        return Err(Error::GammaPole(x));
    }
    Ok(gamma_raw(x))
}

/// Gamma without the pole check (infinite at the poles).
pub(crate) fn gamma_raw(x: f64) -> f64 {
    if near_pole(x) {
        return f64::INFINITY;
    }
    if x < 0.5 {
        PI / (sin_pi(x) * lanczos(1.0 - x))
    } else {
        lanczos(x)
    }
}

/// `1 / Gamma(x)`, which is entire: zero at the poles.
pub fn rgamma(x: f64) -> f64 {
    if near_pole(x) {
        return 0.0;
    }
    if x < 0.5 {
        sin_pi(x) * lanczos(1.0 - x) / PI
    } else {
        1.0 / lanczos(x)
    }
}

/// Digamma `psi = Gamma'/Gamma`.
pub fn digamma(x: f64) -> f64 {
    if near_pole(x) {
        return f64::NAN;
    }
    if x < 0.5 {
        let cot = (PI * x).cos() / sin_pi(x);
        return digamma(1.0 - x) - PI * cot;
    }
    let mut x = x;
    let mut acc = 0.0;
    while x < 10.0 {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let r = 1.0 / (x * x);
    let series = r * (1.0 / 12.0 - r * (1.0 / 120.0 - r * (1.0 / 252.0 - r * (1.0 / 240.0 - r * (1.0 / 132.0 - r * (691.0 / 32760.0 - r / 12.0))))));
    acc + x.ln() - 0.5 / x - series
}

/// Trigamma `psi'`.
pub fn trigamma(x: f64) -> f64 {
    if near_pole(x) {
        return f64::NAN;
    }
    if x < 0.5 {
        let s = sin_pi(x);
        return PI * PI / (s * s) - trigamma(1.0 - x);
    }
    let mut x = x;
    let mut acc = 0.0;
    while x < 10.0 {
        acc += 1.0 / (x * x);
        x += 1.0;
    }
    let r = 1.0 / (x * x);
    let series = 1.0 / x
        + r / 2.0
        + r / x * (1.0 / 6.0 - r * (1.0 / 30.0 - r * (1.0 / 42.0 - r * (1.0 / 30.0 - r * (5.0 / 66.0 - r * (691.0 / 2730.0 - r * 7.0 / 6.0))))));
    acc + series
}

/// Generalized binomial coefficient `C(alpha, k)` via the product recurrence.
pub fn binom_frac(alpha: f64, k: u32) -> f64 {
    let mut c = 1.0;
    for i in 0..k {
        c *= (alpha - i as f64) / (i as f64 + 1.0);
    }
    c
}
