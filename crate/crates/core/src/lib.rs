//! Numerical tools for fractional variational problems of Herglotz type.
//!
//! The action is the terminal value `z(b)` of the ODE
//! `z'(t) = L(t, x(t), D^alpha x(t), z(t))`, where `D^alpha` is a left Caputo
//! derivative. The crate provides grid-based fractional operators, a small
//! expression language for Lagrangians, residual checks for the
//! Euler-Lagrange and transversality conditions, an expansion-based reduced
//! solver and tools for symmetries and conserved quantities.

pub mod approx;
pub mod config;
pub mod error;
pub mod expr;
pub mod frac_ops;
pub mod grid;
pub mod herglotz;
pub mod noether;
mod ode;
pub mod special;

pub use error::{Error, Result};
pub use expr::{Expr, LagrangianDef};
pub use frac_ops::{DifferintegralOrder, FractionalOrder};
pub use grid::{Grid, SampledFunction};
pub use herglotz::{HerglotzProblem, Trajectory};

/// Shortest round-trip text for a float: plain notation in a moderate range,
/// scientific otherwise.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        return "NaN".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let a = v.abs();
    if a == 0.0 || (1e-5..1e16).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}
