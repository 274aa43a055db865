//! Grid, function and trajectory arguments.

use std::fmt;
use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;
use std::str::FromStr;

use fracvar_core::frac_ops::power_rule;
use fracvar_core::{Grid, SampledFunction};

use crate::Failure;

/// `--grid N` or `--grid A:B:N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridArg {
    pub interval: Option<(f64, f64)>,
    pub n: usize,
}

impl FromStr for GridArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let count = |p: &str| p.trim().parse::<usize>().map_err(|_| format!("'{p}' is not a node count"));
        let num = |p: &str| p.trim().parse::<f64>().map_err(|_| format!("'{p}' is not a number"));
        let arg = match parts.as_slice() {
            [n] => GridArg { interval: None, n: count(n)? },
            [a, b, n] => GridArg { interval: Some((num(a)?, num(b)?)), n: count(n)? },
            _ => return Err("expected N or A:B:N".into()),
        };
        if arg.n < 3 {
            return Err(format!("at least 3 nodes are needed, got {}", arg.n));
        }
        if let Some((a, b)) = arg.interval {
            if !(a < b) {
                return Err(format!("interval [{a}, {b}] is empty"));
            }
        }
        Ok(arg)
    }
}

pub const DEFAULT_NODES: usize = 2001;

/// Grid for a problem on `interval`; an explicit interval must agree with it.
pub fn problem_grid(arg: Option<GridArg>, interval: (f64, f64)) -> Result<Grid, Failure> {
    let arg = arg.unwrap_or(GridArg { interval: None, n: DEFAULT_NODES });
    if let Some(iv) = arg.interval {
        if iv != interval {
            return Err(Failure::Usage(format!(
                "--grid interval [{}, {}] differs from the problem interval [{}, {}]",
                iv.0, iv.1, interval.0, interval.1
            )));
        }
    }
    Ok(Grid::new(interval.0, interval.1, arg.n)?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Side {
    /// `(t - a)^p`
    Left,
    /// `(b - t)^p`
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Term {
    coef: f64,
    power: f64,
    side: Side,
}

/// Closed-form input: `pow:p`, `rpow:p`, `const:c` or `line:m:c`.
#[derive(Debug, Clone, PartialEq)]
pub struct FnSpec {
    text: String,
    kind: FnKind,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum FnKind {
    Pow(f64),
    RPow(f64),
    Const(f64),
    Line(f64, f64),
}

impl FromStr for FnSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |p: &str| p.trim().parse::<f64>().map_err(|_| format!("'{p}' is not a number in '{s}'"));
        let kind = match parts.as_slice() {
            ["pow", p] => FnKind::Pow(num(p)?),
            ["rpow", p] => FnKind::RPow(num(p)?),
            ["const", c] => FnKind::Const(num(c)?),
            ["line", m, c] => FnKind::Line(num(m)?, num(c)?),
            _ => return Err(format!("unknown function '{s}' (expected pow:P, rpow:P, const:C or line:M:C)")),
        };
        if let FnKind::Pow(p) | FnKind::RPow(p) = kind {
            if p < 0.0 {
                return Err(format!("negative power in '{s}'"));
            }
        }
        Ok(FnSpec { text: s.to_string(), kind })
    }
}

impl fmt::Display for FnSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

/// `c (t - a)^p` or its mirror, with derivatives of order `k`.
fn term_value(term: &Term, t: f64, grid: &Grid, k: u32) -> f64 {
    let (s, sign) = match term.side {
        Side::Left => (t - grid.a(), 1.0),
        Side::Right => (grid.b() - t, -1.0),
    };
    let mut coef = term.coef;
    let mut p = term.power;
    for _ in 0..k {
        if p == 0.0 {
            return 0.0;
        }
        coef *= sign * p;
        p -= 1.0;
    }
    if p == 0.0 {
        coef
    } else {
        coef * s.powf(p)
    }
}

impl FnSpec {
    fn terms(&self, grid: &Grid) -> Vec<Term> {
        let left = |coef, power| Term { coef, power, side: Side::Left };
        match self.kind {
            FnKind::Pow(p) => vec![left(1.0, p)],
            FnKind::RPow(p) => vec![Term { coef: 1.0, power: p, side: Side::Right }],
            FnKind::Const(c) => vec![left(c, 0.0)],
            FnKind::Line(m, c) => vec![left(m, 1.0), left(c + m * grid.a(), 0.0)],
        }
    }

    /// Samples with as many of the first `rows` derivative rows as are finite.
    pub fn sample(&self, grid: &Grid, rows: u32) -> SampledFunction {
        let terms = self.terms(grid);
        let eval = |k: u32| -> Vec<f64> {
            grid.nodes().iter().map(|&t| terms.iter().map(|term| term_value(term, t, grid, k)).sum()).collect()
        };
        let values = eval(0);
        let derivs: Vec<Vec<f64>> =
            (1..=rows).map(eval).take_while(|row| row.iter().all(|v| v.is_finite())).collect();
        SampledFunction::with_derivs(grid.clone(), values, derivs).expect("rows match the grid")
    }

    /// Closed-form image under `op` with order `alpha`, when every term has one.
    pub fn reference(&self, op: Operator, alpha: f64, grid: &Grid) -> Option<Vec<f64>> {
        let terms = self.terms(grid);
        let image = |term: &Term, t: f64| -> Option<f64> {
            let (a, b) = (grid.a(), grid.b());
            let constant = term.power == 0.0;
            let c = term.coef;
            match (op, term.side) {
                (Operator::Li, Side::Left) => Some(c * power_rule(term.power, -alpha, t - a)),
                (Operator::Li, Side::Right) if constant => Some(c * power_rule(0.0, -alpha, t - a)),
                (Operator::Ri, Side::Right) => Some(c * power_rule(term.power, -alpha, b - t)),
                (Operator::Ri, Side::Left) if constant => Some(c * power_rule(0.0, -alpha, b - t)),
                // Caputo kills polynomials of degree below ceil(alpha)
                (Operator::Lcd | Operator::Rcd, _) if term.power.fract() == 0.0 && term.power < alpha.ceil() => Some(0.0),
                (Operator::Lcd, Side::Left) => Some(c * power_rule(term.power, alpha, t - a)),
                (Operator::Rcd, Side::Right) => Some(c * power_rule(term.power, alpha, b - t)),
                (Operator::Rld, Side::Right) => Some(c * power_rule(term.power, alpha, b - t)),
                (Operator::Rld, Side::Left) if constant => Some(c * power_rule(0.0, alpha, b - t)),
                _ => None,
            }
        };
        grid.nodes().iter().map(|&t| terms.iter().map(|term| image(term, t)).sum::<Option<f64>>()).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Operator {
    /// Left Riemann-Liouville integral.
    Li,
    /// Right Riemann-Liouville integral.
    Ri,
    /// Left Caputo derivative.
    Lcd,
    /// Right Caputo derivative.
    Rcd,
    /// Right Riemann-Liouville derivative.
    Rld,
}

impl Operator {
    pub fn name(self) -> &'static str {
        match self {
            Operator::Li => "li",
            Operator::Ri => "ri",
            Operator::Lcd => "lcd",
            Operator::Rcd => "rcd",
            Operator::Rld => "rld",
        }
    }
}

/// `--traj`: a closed-form spec or a CSV file written by `fracvar` or by hand.
#[derive(Debug, Clone, PartialEq)]
pub enum TrajArg {
    Closed(FnSpec),
    Csv(PathBuf),
}

impl FromStr for TrajArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let head = s.split(':').next().unwrap_or_default();
        if ["pow", "rpow", "const", "line"].contains(&head) && s.contains(':') {
            Ok(TrajArg::Closed(s.parse()?))
        } else {
            Ok(TrajArg::Csv(PathBuf::from(s)))
        }
    }
}

impl fmt::Display for TrajArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TrajArg::Closed(spec) => write!(f, "{spec}"),
            TrajArg::Csv(path) => write!(f, "{}", path.display()),
        }
    }
}

impl TrajArg {
    /// Loads the trajectory; a CSV file brings its own grid, which must
    /// cover `interval` and agree with an explicit `--grid`.
    pub fn load(&self, grid_arg: Option<GridArg>, interval: (f64, f64), rows: u32) -> Result<SampledFunction, Failure> {
        match self {
            TrajArg::Closed(spec) => Ok(spec.sample(&problem_grid(grid_arg, interval)?, rows)),
            TrajArg::Csv(path) => {
                let file = File::open(path)
                    .map_err(|e| Failure::Usage(format!("cannot open trajectory '{}': {e}", path.display())))?;
                let f = SampledFunction::from_csv(BufReader::new(file))?;
                let g = f.grid();
                let tol = 1e-12 * (interval.1 - interval.0);
                if (g.a() - interval.0).abs() > tol || (g.b() - interval.1).abs() > tol {
                    return Err(Failure::Usage(format!(
                        "trajectory covers [{}, {}], the problem needs [{}, {}]",
                        g.a(),
                        g.b(),
                        interval.0,
                        interval.1
                    )));
                }
                if let Some(arg) = grid_arg {
                    if arg.n != g.len() {
                        return Err(Failure::Usage(format!("--grid asks for {} nodes, the file has {}", arg.n, g.len())));
                    }
                }
                Ok(f)
            }
        }
    }
}
