use std::ops::{Add, Div, Mul, Neg, Sub};

use super::{BinOp, Dual, EvalError, Expr, Func, HyperDual, Var};
use crate::special::{digamma, gamma_raw, trigamma};

/// Number type the evaluator is generic over.
pub trait Scalar:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Div<Output = Self> + Neg<Output = Self>
{
    /// Highest derivative order the type propagates.
    const ORDER: u8;

    fn cst(v: f64) -> Self;

    fn value(&self) -> f64;

    /// Applies a scalar function given `[f, f', f'']` at `self.value()`.
    fn chain(self, f: [f64; 3]) -> Self;
}

/// Argument bundle `(t, x, d, z)` of a Lagrangian.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalPoint {
    pub t: f64,
    pub x: Vec<f64>,
    pub d: Vec<f64>,
    pub z: f64,
}

/// Position in the gradient `(t, x1..xn, d1..dn, z)`; indices are 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slot {
    T,
    X(usize),
    D(usize),
    Z,
}

impl Slot {
    pub fn index(self, n: usize) -> usize {
        match self {
            Slot::T => 0,
            Slot::X(j) => 1 + j,
            Slot::D(j) => 1 + n + j,
            Slot::Z => 2 * n + 1,
        }
    }

    fn from_index(i: usize, n: usize) -> Slot {
        if i == 0 {
            Slot::T
        } else if i <= n {
            Slot::X(i - 1)
        } else if i <= 2 * n {
            Slot::D(i - 1 - n)
        } else {
            Slot::Z
        }
    }

    fn matches(self, v: Var) -> bool {
        match (self, v) {
            (Slot::T, Var::T) | (Slot::Z, Var::Z) => true,
            (Slot::X(j), Var::X(k)) | (Slot::D(j), Var::D(k)) => j + 1 == k,
            _ => false,
        }
    }
}

impl EvalPoint {
    fn get(&self, v: Var) -> Option<f64> {
        match v {
            Var::T => Some(self.t),
            Var::X(k) => self.x.get(k.wrapping_sub(1)).copied(),
            Var::D(k) => self.d.get(k.wrapping_sub(1)).copied(),
            Var::Z => Some(self.z),
            Var::S => None,
        }
    }
}

fn domain(node: &Expr, reason: impl Into<String>) -> EvalError {
    EvalError::Domain { node: node.to_string(), reason: reason.into() }
}

/// Evaluates with variables supplied by `env`.
pub fn eval_generic<S: Scalar>(e: &Expr, env: &impl Fn(Var) -> Option<S>) -> Result<S, EvalError> {
    Ok(match e {
        Expr::Const(c) => S::cst(*c),
        Expr::Var(v) => env(*v).ok_or(EvalError::Unbound(*v))?,
        Expr::Neg(a) => -eval_generic(a, env)?,
        Expr::Bin(op, l, r) => {
            let a = eval_generic(l, env)?;
            let b = eval_generic(r, env)?;
            match op {
                BinOp::Add => a + b,
                BinOp::Sub => a - b,
                BinOp::Mul => a * b,
                BinOp::Div => {
                    if b.value() == 0.0 {
                        return Err(domain(e, "division by zero"));
                    }
                    a / b
                }
            }
        }
        Expr::Call(Func::Pow, args) => pow(e, &args[0], &args[1], env)?,
        Expr::Call(func, args) => {
            let u = eval_generic(&args[0], env)?;
            let f = elementary(*func, u.value(), S::ORDER).map_err(|reason| domain(e, reason))?;
            u.chain(f)
        }
    })
}

/// `[f, f', f'']` of a one-argument function at `x`, up to derivative `order`.
///
/// Kept out of line so every number type sees bit-identical values: inlined
/// copies let the optimizer fuse `sin`/`cos` into `sincos` in some
/// instantiations only.
#[inline(never)]
fn elementary(func: Func, x: f64, order: u8) -> Result<[f64; 3], String> {
    Ok(match func {
        Func::Exp => {
            let v = x.exp();
            [v, v, v]
        }
        Func::Ln => {
            if x <= 0.0 {
                return Err(format!("logarithm of non-positive value {x}"));
            }
            [x.ln(), 1.0 / x, -1.0 / (x * x)]
        }
        Func::Sin => [x.sin(), x.cos(), -x.sin()],
        Func::Cos => [x.cos(), -x.sin(), -x.cos()],
        Func::Sqrt => {
            if x < 0.0 {
                return Err(format!("square root of negative value {x}"));
            }
            let r = x.sqrt();
            [r, 0.5 / r, -0.25 / (r * x)]
        }
        Func::Gamma => {
            let g = gamma_raw(x);
            if !g.is_finite() {
                return Err(format!("gamma pole at {x}"));
            }
            match order {
                0 => [g, 0.0, 0.0],
                1 => [g, g * digamma(x), 0.0],
                _ => {
                    let p = digamma(x);
                    [g, g * p, g * (p * p + trigamma(x))]
                }
            }
        }
        Func::Pow => unreachable!("pow is evaluated separately"),
    })
}

fn no_vars(_: Var) -> Option<f64> {
    None
}

fn pow<S: Scalar>(node: &Expr, base: &Expr, exp: &Expr, env: &impl Fn(Var) -> Option<S>) -> Result<S, EvalError> {
    let u = eval_generic(base, env)?;
    let x = u.value();
    if exp.is_constant() {
        let c: f64 = eval_generic(exp, &no_vars)?;
        if c.fract() == 0.0 && c.abs() <= 1024.0 {
            let n = c as i32;
            if n < 0 && x == 0.0 {
                return Err(domain(node, "zero raised to a negative power"));
            }
            // powf rather than powi: powi may be expanded differently per
            // instantiation, which would break bitwise agreement across number types
            let nf = n as f64;
            let f1 = if n == 0 { 0.0 } else { nf * x.powf(nf - 1.0) };
            let f2 = if n == 0 || n == 1 { 0.0 } else { nf * (nf - 1.0) * x.powf(nf - 2.0) };
            return Ok(u.chain([x.powf(nf), f1, f2]));
        }
        if x < 0.0 {
            return Err(domain(node, format!("negative base {x} with non-integer exponent {c}")));
        }
        if x == 0.0 && c < 0.0 {
            return Err(domain(node, "zero raised to a negative power"));
        }
        let f1 = if x == 0.0 && c > 1.0 { 0.0 } else { c * x.powf(c - 1.0) };
        let f2 = if x == 0.0 && c > 2.0 { 0.0 } else { c * (c - 1.0) * x.powf(c - 2.0) };
        return Ok(u.chain([x.powf(c), f1, f2]));
    }
    if x <= 0.0 {
        return Err(domain(node, format!("variable exponent needs a positive base, got {x}")));
    }
    let v = eval_generic(exp, env)?;
    let l = u.chain([x.ln(), 1.0 / x, -1.0 / (x * x)]);
    let w = v * l;
    let ew = w.value().exp();
    Ok(w.chain([ew, ew, ew]))
}

pub fn evaluate(e: &Expr, p: &EvalPoint) -> Result<f64, EvalError> {
    eval_generic(e, &|v| p.get(v))
}

/// Value and one partial derivative.
pub fn partial(e: &Expr, p: &EvalPoint, slot: Slot) -> Result<(f64, f64), EvalError> {
    let r = eval_generic(e, &|v| p.get(v).map(|x| if slot.matches(v) { Dual::var(x) } else { Dual::cst(x) }))?;
    Ok((r.v, r.d))
}

/// Value and gradient `(dL/dt, dL/dx1.., dL/dd1.., dL/dz)`.
pub fn partials(e: &Expr, p: &EvalPoint) -> Result<(f64, Vec<f64>), EvalError> {
    let n = p.x.len();
    let mut grad = vec![0.0; 2 * n + 2];
    let mut value = 0.0;
    for (i, g) in grad.iter_mut().enumerate() {
        let (v, d) = partial(e, p, Slot::from_index(i, n))?;
        value = v;
        *g = d;
    }
    if grad.is_empty() {
        value = evaluate(e, p)?;
    }
    Ok((value, grad))
}

/// Value, both first partials and the mixed second partial for two slots.
pub fn second_partial(e: &Expr, p: &EvalPoint, a: Slot, b: Slot) -> Result<HyperDual, EvalError> {
    let seed = |s: Slot, v: Var| if s.matches(v) { 1.0 } else { 0.0 };
    eval_generic(e, &|v| p.get(v).map(|x| HyperDual::var(x, seed(a, v), seed(b, v))))
}
