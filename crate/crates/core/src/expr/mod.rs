//! Expression language for Lagrangians `L(t, x1..xn, d1..dn, z)`.
//!
//! Grammar, loosest binding first: `+ -`, then `* /`, then `^` (right
//! associative, sugar for `pow`), then unary minus. Functions: `pow`, `exp`,
//! `ln`, `sin`, `cos`, `sqrt`, `gamma`; constant `pi`. The variable `s` is
//! only meaningful in transformation maps.

mod dual;
mod eval;
mod parse;
pub mod problems;

use std::fmt;

use thiserror::Error;

pub use dual::{Dual, HyperDual};
pub use eval::{eval_generic, evaluate, partial, partials, second_partial, EvalPoint, Scalar, Slot};
pub use parse::parse;
pub use problems::{builtin_problem, BoundaryCondition, BuiltinParams, LagrangianDef, ProblemSpec, BUILTIN_PROBLEMS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    T,
    /// `x<k>`, 1-based.
    X(usize),
    /// `d<k>`, the Caputo derivative of `x<k>`.
    D(usize),
    Z,
    /// Transformation parameter.
    S,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Pow,
    Exp,
    Ln,
    Sin,
    Cos,
    Sqrt,
    Gamma,
}

impl Func {
    pub const ALL: [Func; 7] = [Func::Pow, Func::Exp, Func::Ln, Func::Sin, Func::Cos, Func::Sqrt, Func::Gamma];

    pub fn name(self) -> &'static str {
        match self {
            Func::Pow => "pow",
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sqrt => "sqrt",
            Func::Gamma => "gamma",
        }
    }

    pub fn arity(self) -> usize {
        if self == Func::Pow {
            2
        } else {
            1
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Self::ALL.into_iter().find(|f| f.name() == name)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var(Var),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
}

impl Expr {
    pub fn bin(op: BinOp, l: Expr, r: Expr) -> Expr {
        Expr::Bin(op, Box::new(l), Box::new(r))
    }

    pub fn call(f: Func, args: Vec<Expr>) -> Expr {
        Expr::Call(f, args)
    }

    fn visit_vars(&self, f: &mut impl FnMut(Var)) {
        match self {
            Expr::Const(_) => {}
            Expr::Var(v) => f(*v),
            Expr::Neg(e) => e.visit_vars(f),
            Expr::Bin(_, l, r) => {
                l.visit_vars(f);
                r.visit_vars(f);
            }
            Expr::Call(_, args) => args.iter().for_each(|a| a.visit_vars(f)),
        }
    }

    /// True when no variable occurs.
    pub fn is_constant(&self) -> bool {
        let mut any = false;
        self.visit_vars(&mut |_| any = true);
        !any
    }

    pub fn uses(&self, var: Var) -> bool {
        let mut hit = false;
        self.visit_vars(&mut |v| hit |= v == var);
        hit
    }

    /// Largest `x<k>`/`d<k>` index referenced (0 when none).
    pub fn max_index(&self) -> usize {
        let mut m = 0;
        self.visit_vars(&mut |v| {
            if let Var::X(k) | Var::D(k) = v {
                m = m.max(k);
            }
        });
        m
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::T => write!(f, "t"),
            Var::X(k) => write!(f, "x{k}"),
            Var::D(k) => write!(f, "d{k}"),
            Var::Z => write!(f, "z"),
            Var::S => write!(f, "s"),
        }
    }
}

/// Fully parenthesized canonical form, re-parseable to the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) if *c < 0.0 => write!(f, "(-{})", crate::fmt_f64(-c)),
            Expr::Const(c) => write!(f, "{}", crate::fmt_f64(*c)),
            Expr::Var(v) => write!(f, "{v}"),
            // keeps the negated literal from folding into a negative constant
            Expr::Neg(e) if matches!(**e, Expr::Const(_)) => write!(f, "(-({e}))"),
            Expr::Neg(e) => write!(f, "(-{e})"),
            Expr::Bin(op, l, r) => {
                let sym = match op {
                    BinOp::Add => "+",
                    BinOp::Sub => "-",
                    BinOp::Mul => "*",
                    BinOp::Div => "/",
                };
                write!(f, "({l} {sym} {r})")
            }
            Expr::Call(func, args) => {
                write!(f, "{}(", func.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// Positions are 1-based byte offsets into the source text.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at offset {offset}: found {found}, expected {}", .expected.join(" or "))]
    Syntax { offset: usize, found: String, expected: Vec<&'static str> },

    #[error("unknown identifier '{name}' at offset {offset}")]
    UnknownIdentifier { name: String, offset: usize },

    #[error("{func} expects {expected} argument(s), got {got} (offset {offset})")]
    Arity { func: &'static str, expected: usize, got: usize, offset: usize },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Syntax { offset, .. }
            | ParseError::UnknownIdentifier { offset, .. }
            | ParseError::Arity { offset, .. } => *offset,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("domain error in {node}: {reason}")]
    Domain { node: String, reason: String },

    #[error("variable {0} is not bound")]
    Unbound(Var),
}
