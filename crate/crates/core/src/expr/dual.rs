//! Forward-mode number types for first and mixed second derivatives.

use std::ops::{Add, Div, Mul, Neg, Sub};

use super::Scalar;

/// Chain-rule factor that treats a zero tangent as structurally zero, so an
/// infinite outer slope on a constant inner value does not produce NaN.
fn scaled(slope: f64, tangent: f64) -> f64 {
    if tangent == 0.0 {
        0.0
    } else {
        slope * tangent
    }
}

/// `v + d eps` with `eps^2 = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dual {
    pub v: f64,
    pub d: f64,
}

impl Dual {
    pub fn var(v: f64) -> Self {
        Self { v, d: 1.0 }
    }
}

impl Scalar for Dual {
    const ORDER: u8 = 1;

    fn cst(v: f64) -> Self {
        Self { v, d: 0.0 }
    }

    fn value(&self) -> f64 {
        self.v
    }

    fn chain(self, f: [f64; 3]) -> Self {
        Self { v: f[0], d: scaled(f[1], self.d) }
    }
}

impl Add for Dual {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self { v: self.v + o.v, d: self.d + o.d }
    }
}

impl Sub for Dual {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self { v: self.v - o.v, d: self.d - o.d }
    }
}

impl Mul for Dual {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self { v: self.v * o.v, d: self.d * o.v + self.v * o.d }
    }
}

impl Div for Dual {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let v = self.v / o.v;
        Self { v, d: (self.d - v * o.d) / o.v }
    }
}

impl Neg for Dual {
    type Output = Self;
    fn neg(self) -> Self {
        Self { v: -self.v, d: -self.d }
    }
}

/// `v + e1 eps1 + e2 eps2 + e12 eps1 eps2` with `eps1^2 = eps2^2 = 0`;
/// `e12` carries the mixed second derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HyperDual {
    pub v: f64,
    pub e1: f64,
    pub e2: f64,
    pub e12: f64,
}

impl HyperDual {
    /// Seeds a variable along the given directions.
    pub fn var(v: f64, dir1: f64, dir2: f64) -> Self {
        Self { v, e1: dir1, e2: dir2, e12: 0.0 }
    }
}

impl Scalar for HyperDual {
    const ORDER: u8 = 2;

    fn cst(v: f64) -> Self {
        Self { v, e1: 0.0, e2: 0.0, e12: 0.0 }
    }

    fn value(&self) -> f64 {
        self.v
    }

    fn chain(self, f: [f64; 3]) -> Self {
        Self {
            v: f[0],
            e1: scaled(f[1], self.e1),
            e2: scaled(f[1], self.e2),
            e12: scaled(f[1], self.e12) + scaled(f[2], self.e1 * self.e2),
        }
    }
}

impl Add for HyperDual {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self { v: self.v + o.v, e1: self.e1 + o.e1, e2: self.e2 + o.e2, e12: self.e12 + o.e12 }
    }
}

impl Sub for HyperDual {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self { v: self.v - o.v, e1: self.e1 - o.e1, e2: self.e2 - o.e2, e12: self.e12 - o.e12 }
    }
}

impl Mul for HyperDual {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self {
            v: self.v * o.v,
            e1: self.e1 * o.v + self.v * o.e1,
            e2: self.e2 * o.v + self.v * o.e2,
            e12: self.v * o.e12 + self.e1 * o.e2 + self.e2 * o.e1 + self.e12 * o.v,
        }
    }
}

impl Div for HyperDual {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let r = 1.0 / o.v;
        self * o.chain([r, -r * r, 2.0 * r * r * r])
    }
}

impl Neg for HyperDual {
    type Output = Self;
    fn neg(self) -> Self {
        Self { v: -self.v, e1: -self.e1, e2: -self.e2, e12: -self.e12 }
    }
}

impl Scalar for f64 {
    const ORDER: u8 = 0;

    fn cst(v: f64) -> Self {
        v
    }

    fn value(&self) -> f64 {
        *self
    }

    fn chain(self, f: [f64; 3]) -> Self {
        f[0]
    }
}
