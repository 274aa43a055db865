//! Lagrangian definitions with boundary data, and the builtin problem registry.

use super::{parse, Expr, Var};
use crate::error::{Error, Result};
use crate::fmt_f64;

/// A Lagrangian in `n` dependent variables together with the fractional
/// order of each component.
#[derive(Debug, Clone, PartialEq)]
pub struct LagrangianDef {
    pub dimension: usize,
    pub expr: Expr,
    pub orders: Vec<f64>,
}

impl LagrangianDef {
    pub fn new(src: &str, dimension: usize, orders: Vec<f64>) -> Result<Self> {
        Self::from_expr(parse(src)?, dimension, orders)
    }

    pub fn from_expr(expr: Expr, dimension: usize, orders: Vec<f64>) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::InvalidProblem("dimension must be at least 1".into()));
        }
        if orders.len() != dimension {
            return Err(Error::InvalidProblem(format!("{} orders given for dimension {dimension}", orders.len())));
        }
        for &a in &orders {
            if !(a.is_finite() && a > 0.0 && a < 2.0 && a != 1.0) {
                return Err(Error::OrderOutOfRange { order: a, range: "(0, 1) or (1, 2)" });
            }
        }
        if expr.max_index() > dimension {
            return Err(Error::InvalidProblem(format!(
                "expression uses index {} but the dimension is {dimension}",
                expr.max_index()
            )));
        }
        if expr.uses(Var::S) {
            return Err(Error::InvalidProblem("the variable s is reserved for transformation maps".into()));
        }
        Ok(Self { dimension, expr, orders })
    }

    pub fn is_first_order(&self) -> bool {
        self.orders.iter().all(|&a| a < 1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryCondition {
    Fixed(f64),
    Free,
}

impl BoundaryCondition {
    pub fn value(self) -> Option<f64> {
        match self {
            BoundaryCondition::Fixed(v) => Some(v),
            BoundaryCondition::Free => None,
        }
    }
}

/// Lagrangian plus interval and boundary data.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    pub name: String,
    pub lagrangian: LagrangianDef,
    pub interval: (f64, f64),
    pub z_init: f64,
    pub bc_left: Vec<f64>,
    pub bc_right: Vec<BoundaryCondition>,
}

impl ProblemSpec {
    pub fn new(
        name: impl Into<String>,
        lagrangian: LagrangianDef,
        interval: (f64, f64),
        z_init: f64,
        bc_left: Vec<f64>,
        bc_right: Vec<BoundaryCondition>,
    ) -> Result<Self> {
        let n = lagrangian.dimension;
        if bc_left.len() != n || bc_right.len() != n {
            return Err(Error::InvalidProblem(format!(
                "boundary data must have {n} entries per side, got {} and {}",
                bc_left.len(),
                bc_right.len()
            )));
        }
        if !(interval.0 < interval.1) || !interval.0.is_finite() || !interval.1.is_finite() {
            return Err(Error::InvalidProblem(format!("invalid interval [{}, {}]", interval.0, interval.1)));
        }
        Ok(Self { name: name.into(), lagrangian, interval, z_init, bc_left, bc_right })
    }

    pub fn dimension(&self) -> usize {
        self.lagrangian.dimension
    }

    /// Same problem with every right endpoint released.
    pub fn with_free_right(mut self) -> Self {
        self.bc_right = vec![BoundaryCondition::Free; self.bc_right.len()];
        self
    }
}

/// Tunable parameters of the builtin problems.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BuiltinParams {
    /// Friction coefficient of `noether_gamma`.
    pub gamma: f64,
    /// Exponent `p` of `f(v) = v^p` in `noether_gamma`.
    pub f_exponent: f64,
    /// Overrides the fractional order when set.
    pub alpha: Option<f64>,
}

impl Default for BuiltinParams {
    fn default() -> Self {
        Self { gamma: 0.1, f_exponent: 2.0, alpha: None }
    }
}

pub const BUILTIN_PROBLEMS: [(&str, &str); 4] = [
    ("example1", "[D^0.5 x - 2 t^1.5/Gamma(2.5)]^2, z(0)=0, x(0)=0, x(1)=1; extremal x = t^2"),
    ("example2", "the example1 integrand times e^t plus z, z(0)=1; extremal x = t^2"),
    ("example3", "example1 data, intended for the truncated-expansion solver"),
    ("noether_gamma", "(D^alpha x)^p - gamma z, alpha=0.75, x(0)=0, x(1)=1; conserved quantity"),
];

const TARGET: &str = "pow(d1 - 2/gamma(2.5)*pow(t,1.5), 2)";

pub fn builtin_problem(name: &str, params: &BuiltinParams) -> Result<ProblemSpec> {
    let fixed = |v| vec![BoundaryCondition::Fixed(v)];
    let (src, alpha, z_init) = match name {
        "example1" | "example3" => (TARGET.to_string(), 0.5, 0.0),
        "example2" => (format!("{TARGET}*exp(t) + z"), 0.5, 1.0),
        "noether_gamma" => {
            if !(params.gamma > 0.0) {
                return Err(Error::InvalidProblem(format!("gamma must be positive, got {}", params.gamma)));
            }
            let e = format!("pow(d1, {}) - {}*z", fmt_f64(params.f_exponent), fmt_f64(params.gamma));
            (e, 0.75, 0.0)
        }
        _ => {
            return Err(Error::UnknownProblem {
                name: name.to_string(),
                available: BUILTIN_PROBLEMS.iter().map(|(n, _)| *n).collect::<Vec<_>>().join(", "),
            })
        }
    };
    let alpha = params.alpha.unwrap_or(alpha);
    let lag = LagrangianDef::new(&src, 1, vec![alpha])?;
    ProblemSpec::new(name, lag, (0.0, 1.0), z_init, vec![0.0], fixed(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_entries() {
        let p = builtin_problem("example1", &BuiltinParams::default()).unwrap();
        assert_eq!(p.dimension(), 1);
        assert_eq!(p.lagrangian.orders, vec![0.5]);
        assert_eq!(p.interval, (0.0, 1.0));
        assert_eq!((p.z_init, p.bc_left[0], p.bc_right[0]), (0.0, 0.0, BoundaryCondition::Fixed(1.0)));
        let p2 = builtin_problem("example2", &BuiltinParams::default()).unwrap();
        assert_eq!(p2.z_init, 1.0);
        assert!(p2.lagrangian.expr.uses(Var::Z));
        let g = builtin_problem("noether_gamma", &BuiltinParams { gamma: 0.3, ..Default::default() }).unwrap();
        assert_eq!(g.lagrangian.expr.to_string(), "(pow(d1, 2) - (0.3 * z))");
    }

    #[test]
    fn unknown_name_lists_available() {
        let err = builtin_problem("nosuch", &BuiltinParams::default()).unwrap_err();
        assert!(err.to_string().contains("example1, example2, example3, noether_gamma"));
    }

    #[test]
    fn definition_validation() {
        assert!(LagrangianDef::new("x2", 1, vec![0.5]).is_err());
        assert!(LagrangianDef::new("s*x1", 1, vec![0.5]).is_err());
        assert!(LagrangianDef::new("x1", 1, vec![1.0]).is_err());
        assert!(LagrangianDef::new("x1", 1, vec![0.5, 0.5]).is_err());
        assert!(LagrangianDef::new("pow(d1,2)", 1, vec![1.5]).is_ok());
    }
}
