//! Truncated-expansion reduction of the fractional problem to a classical
//! Herglotz problem, solved by shooting on the initial slope.
//!
//! The Caputo derivative is replaced by
//! `(x - x(a)) (t-a)^(-alpha) / Gamma(1-alpha) + sum_{k=1..N} C(alpha,k) (t-a)^(k-alpha) / Gamma(k+1-alpha) x^(k)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::problems::{BoundaryCondition, LagrangianDef};
use crate::expr::{eval_generic, EvalError, HyperDual, Scalar, Var};
use crate::grid::{cumulative_trapezoid, Grid, SampledFunction};
use crate::herglotz::HerglotzProblem;
use crate::ode::{integrate, Tolerance};
use crate::special::{binom_frac, rgamma};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExpansionSpec {
    /// Truncation order `N`.
    pub order: usize,
    /// Base point `a`.
    pub a: f64,
    pub alpha: f64,
}

impl ExpansionSpec {
    pub fn new(order: usize, a: f64, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::OrderOutOfRange { order: alpha, range: "(0, 1)" });
        }
        Ok(Self { order, a, alpha })
    }

    /// Expanded derivative from `derivs = [x, x', ..., x^(N)]` and `x(a)`.
    fn apply<S: Scalar>(&self, t: S, derivs: &[S], x_a: f64) -> S {
        let s = t - S::cst(self.a);
        let sv = s.value();
        if sv <= 0.0 {
            return S::cst(0.0);
        }
        let spow = |p: f64| s.chain([sv.powf(p), p * sv.powf(p - 1.0), p * (p - 1.0) * sv.powf(p - 2.0)]);
        let alpha = self.alpha;
        let mut acc = (derivs[0] - S::cst(x_a)) * spow(-alpha) * S::cst(rgamma(1.0 - alpha));
        for k in 1..=self.order {
            let kf = k as f64;
            let c = binom_frac(alpha, k as u32) * rgamma(kf + 1.0 - alpha);
            acc = acc + S::cst(c) * spow(kf - alpha) * derivs[k];
        }
        acc
    }
}

/// Truncated expansion of the left Caputo derivative; needs derivative rows `1..=N`.
pub fn caputo_expansion(x: &SampledFunction, spec: &ExpansionSpec) -> Result<SampledFunction> {
    let rows = (1..=spec.order).map(|k| x.deriv(k).ok_or(Error::MissingDerivative(k))).collect::<Result<Vec<_>>>()?;
    let x_a = x.first();
    let values = x
        .grid()
        .nodes()
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            let mut d = vec![x.values()[i]];
            d.extend(rows.iter().map(|r| r[i]));
            spec.apply(t, &d, x_a)
        })
        .collect();
    SampledFunction::new(x.grid().clone(), values)
}

/// `L(t, x, D~x, z)` with the expansion substituted for `d1`.
#[derive(Debug, Clone)]
pub struct ReducedLagrangian {
    pub lagrangian: LagrangianDef,
    pub spec: ExpansionSpec,
    pub x_a: f64,
    /// Substitute `d1 = x'` instead of the expansion (the `alpha = 1` case).
    pub classical: bool,
}

impl ReducedLagrangian {
    /// Classical Lagrangian `L(t, x, x', z)` driven through the same solver.
    pub fn classical(lag: &LagrangianDef, a: f64, x_a: f64) -> Result<Self> {
        let mut red = build_reduced_lagrangian(lag, ExpansionSpec { order: 1, a, alpha: 0.5 }, x_a)?;
        red.classical = true;
        Ok(red)
    }

    /// Evaluates at `derivs = [x, x', ..., x^(N)]`.
    pub fn eval<S: Scalar>(&self, t: S, derivs: &[S], z: S) -> std::result::Result<S, EvalError> {
        let d = if self.classical { derivs[1] } else { self.spec.apply(t, derivs, self.x_a) };
        let x = derivs[0];
        eval_generic(&self.lagrangian.expr, &|v| match v {
            Var::T => Some(t),
            Var::X(1) => Some(x),
            Var::D(1) => Some(d),
            Var::Z => Some(z),
            _ => None,
        })
    }

    pub fn value(&self, t: f64, derivs: &[f64], z: f64) -> Result<f64> {
        Ok(self.eval(t, derivs, z)?)
    }

    /// Partials of the `N = 1` reduced Lagrangian at `(t, x, v, z)`.
    fn jet(&self, t: f64, x: f64, v: f64, z: f64) -> Result<Jet> {
        // seed eps1 along v, eps2 along the second variable
        let run = |dt: f64, dx: f64, dv2: f64, dz: f64| -> Result<HyperDual> {
            let tt = HyperDual::var(t, 0.0, dt);
            let xx = HyperDual::var(x, 0.0, dx);
            let vv = HyperDual::var(v, 1.0, dv2);
            let zz = HyperDual::var(z, 0.0, dz);
            Ok(self.eval(tt, &[xx, vv], zz)?)
        };
        let vt = run(1.0, 0.0, 0.0, 0.0)?;
        let vx = run(0.0, 1.0, 0.0, 0.0)?;
        let vv = run(0.0, 0.0, 1.0, 0.0)?;
        let vz = run(0.0, 0.0, 0.0, 1.0)?;
        Ok(Jet {
            l: vz.v,
            lx: vx.e2,
            lv: vz.e1,
            lz: vz.e2,
            lvt: vt.e12,
            lvx: vx.e12,
            lvv: vv.e12,
            lvz: vz.e12,
        })
    }

    /// `x''` from the Euler-Lagrange equation `lambda L_x = d/dt(lambda L_v)`
    /// with `lambda' = -L_z lambda` eliminated.
    fn acceleration(&self, t: f64, x: f64, v: f64, z: f64) -> Result<(f64, Jet)> {
        let j = self.jet(t, x, v, z)?;
        if !(j.lvv.abs() > 1e-300) || !j.lvv.is_finite() {
            return Err(Error::Degenerate { t, reason: format!("d2L/dv2 = {}", j.lvv) });
        }
        let acc = (j.lx + j.lz * j.lv - j.lvt - j.lvx * v - j.lvz * j.l) / j.lvv;
        Ok((acc, j))
    }
}

#[derive(Debug, Clone, Copy)]
struct Jet {
    l: f64,
    lx: f64,
    lv: f64,
    lz: f64,
    lvt: f64,
    lvx: f64,
    lvv: f64,
    lvz: f64,
}

pub fn build_reduced_lagrangian(lag: &LagrangianDef, spec: ExpansionSpec, x_a: f64) -> Result<ReducedLagrangian> {
    if lag.dimension != 1 {
        return Err(Error::Dimension(format!("the expansion method needs one component, got {}", lag.dimension)));
    }
    Ok(ReducedLagrangian { lagrangian: lag.clone(), spec, x_a, classical: false })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolverSettings {
    /// Target for `|x(b) - x_b|`.
    pub tol: f64,
    pub max_iter: usize,
    pub slope_range: (f64, f64),
    /// Number of slopes evaluated while looking for a sign change.
    pub scan_points: usize,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self { tol: 1e-8, max_iter: 100, slope_range: (-10.0, 10.0), scan_points: 21 }
    }
}

/// Outcome of bracketing plus Illinois-modified secant iteration.
#[derive(Debug, Clone)]
pub(crate) struct Root {
    pub arg: f64,
    pub value: f64,
    pub iterations: usize,
    pub history: Vec<(f64, f64)>,
    pub bracket: (f64, f64),
}

pub(crate) fn find_root(mut f: impl FnMut(f64) -> Result<f64>, settings: &SolverSettings) -> Result<Root> {
    let (lo, hi) = settings.slope_range;
    let m = settings.scan_points.max(2);
    let mut history = Vec::new();
    let mut prev: Option<(f64, f64)> = None;
    let mut bracket = None;
    for i in 0..m {
        let s = lo + (hi - lo) * i as f64 / (m - 1) as f64;
        let Ok(v) = f(s) else {
            prev = None;
            continue;
        };
        if !v.is_finite() {
            prev = None;
            continue;
        }
        history.push((s, v));
        if v.abs() <= settings.tol {
            return Ok(Root { arg: s, value: v, iterations: 0, history, bracket: (s, s) });
        }
        if let Some((ps, pv)) = prev {
            if pv * v < 0.0 {
                bracket = Some(((ps, pv), (s, v)));
                break;
            }
        }
        prev = Some((s, v));
    }
    let Some(((mut a, mut fa), (mut b, mut fb))) = bracket else {
        return Err(Error::NoBracket { lo, hi });
    };
    for it in 1..=settings.max_iter {
        let c = b - fb * (b - a) / (fb - fa);
        let fc = f(c)?;
        history.push((c, fc));
        if fc.abs() <= settings.tol {
            let bracket = if a < b { (a, b) } else { (b, a) };
            return Ok(Root { arg: c, value: fc, iterations: it, history, bracket });
        }
        if fc * fb < 0.0 {
            a = b;
            fa = fb;
        } else {
            fa *= 0.5;
        }
        b = c;
        fb = fc;
    }
    Err(Error::NoConvergence { iterations: settings.max_iter, mismatch: fb.abs() })
}

#[derive(Debug, Clone, Serialize)]
pub struct ShootingResult {
    #[serde(skip)]
    pub grid: Grid,
    #[serde(skip)]
    pub x: Vec<f64>,
    #[serde(skip)]
    pub xdot: Vec<f64>,
    #[serde(skip)]
    pub z: Vec<f64>,
    #[serde(skip)]
    pub lambda: Vec<f64>,
    /// Initial slope found by shooting.
    pub slope: f64,
    pub iterations: usize,
    /// Every `(slope, x(b) - x_b)` evaluated, in order.
    pub history: Vec<(f64, f64)>,
    /// Final bracket around the accepted slope.
    pub bracket: (f64, f64),
    /// `|x(b) - x_b|`.
    pub mismatch: f64,
}

impl ShootingResult {
    pub fn x_function(&self) -> SampledFunction {
        SampledFunction::with_derivs(self.grid.clone(), self.x.clone(), vec![self.xdot.clone()]).expect("consistent lengths")
    }
}

const ODE_TOL: Tolerance = Tolerance { rtol: 1e-11, atol: 1e-13 };

/// Integrates the reduced system for a given initial slope; returns `(x, x', z)` per node.
fn integrate_reduced(red: &ReducedLagrangian, grid: &Grid, z_a: f64, slope: f64) -> Result<Vec<[f64; 3]>> {
    let a = grid.a();
    let h = grid.step();
    let t1 = grid.node(1);
    let x1 = red.x_a + slope * h;
    let l0 = red.value(a, &[red.x_a, slope], z_a)?;
    let l1 = red.value(t1, &[x1, slope], z_a + h * l0)?;
    let z1 = z_a + 0.5 * h * (l0 + l1);
    let mut rhs = |t: f64, y: &[f64; 3]| -> Result<[f64; 3]> {
        let (acc, j) = red.acceleration(t, y[0], y[1], y[2])?;
        Ok([y[1], acc, j.l])
    };
    let rest = integrate(&mut rhs, t1, [x1, slope, z1], &grid.nodes()[2..], ODE_TOL)?;
    let mut out = Vec::with_capacity(grid.len());
    out.push([red.x_a, slope, z_a]);
    out.push([x1, slope, z1]);
    out.extend(rest);
    Ok(out)
}

/// Solves the `N = 1` reduced problem on the problem's grid.
pub fn solve_reduced_herglotz(
    red: &ReducedLagrangian,
    problem: &HerglotzProblem,
    settings: &SolverSettings,
) -> Result<ShootingResult> {
    if red.spec.order != 1 {
        return Err(Error::InvalidProblem(format!("the shooting solver needs N = 1, got N = {}", red.spec.order)));
    }
    if problem.dimension() != 1 {
        return Err(Error::Dimension(format!("expected one component, got {}", problem.dimension())));
    }
    let BoundaryCondition::Fixed(x_b) = problem.bc_right[0] else {
        return Err(Error::InvalidProblem("the shooting solver needs a fixed right endpoint".into()));
    };
    let grid = &problem.grid;
    let root = find_root(|s| Ok(integrate_reduced(red, grid, problem.z_init, s)?.last().expect("nonempty")[0] - x_b), settings)?;
    let states = integrate_reduced(red, grid, problem.z_init, root.arg)?;
    let x: Vec<f64> = states.iter().map(|s| s[0]).collect();
    let xdot: Vec<f64> = states.iter().map(|s| s[1]).collect();
    let z: Vec<f64> = states.iter().map(|s| s[2]).collect();
    let lz = (0..grid.len())
        .map(|k| {
            let t = HyperDual::cst(grid.node(k));
            let zz = HyperDual::var(z[k], 1.0, 0.0);
            Ok(red.eval(t, &[HyperDual::cst(x[k]), HyperDual::cst(xdot[k])], zz)?.e1)
        })
        .collect::<Result<Vec<f64>>>()?;
    let lambda = cumulative_trapezoid(&lz, grid.step()).into_iter().map(|v| (-v).exp()).collect();
    Ok(ShootingResult {
        grid: grid.clone(),
        mismatch: (x[x.len() - 1] - x_b).abs(),
        x,
        xdot,
        z,
        lambda,
        slope: root.arg,
        iterations: root.iterations,
        history: root.history,
        bracket: root.bracket,
    })
}

/// `L_x + L_z q - dq/dt` with `q = L_v` along the shooting solution;
/// five-point differences, zero outside nodes `3 ..= n-4`.
pub fn reduced_el_residual(red: &ReducedLagrangian, result: &ShootingResult) -> Result<Vec<f64>> {
    let n = result.grid.len();
    let h = result.grid.step();
    let mut q = vec![0.0; n];
    let mut lx = vec![0.0; n];
    let mut lz = vec![0.0; n];
    for k in 1..n {
        let j = red.jet(result.grid.node(k), result.x[k], result.xdot[k], result.z[k])?;
        q[k] = j.lv;
        lx[k] = j.lx;
        lz[k] = j.lz;
    }
    let mut out = vec![0.0; n];
    for k in 3..n.saturating_sub(3) {
        let dq = (-q[k + 2] + 8.0 * q[k + 1] - 8.0 * q[k - 1] + q[k - 2]) / (12.0 * h);
        out[k] = lx[k] + lz[k] * q[k] - dq;
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct Comparison {
    #[serde(skip)]
    pub t: Vec<f64>,
    #[serde(skip)]
    pub numeric: Vec<f64>,
    #[serde(skip)]
    pub exact: Option<Vec<f64>>,
    pub linf: Option<f64>,
    pub l2: Option<f64>,
}

impl Comparison {
    pub fn to_csv(&self) -> String {
        use crate::fmt_f64;
        let mut out = String::from(if self.exact.is_some() { "t,x_numeric,x_exact,abs_error\n" } else { "t,x_numeric\n" });
        for (k, &t) in self.t.iter().enumerate() {
            out.push_str(&fmt_f64(t));
            out.push(',');
            out.push_str(&fmt_f64(self.numeric[k]));
            if let Some(ex) = &self.exact {
                out.push(',');
                out.push_str(&fmt_f64(ex[k]));
                out.push(',');
                out.push_str(&fmt_f64((self.numeric[k] - ex[k]).abs()));
            }
            out.push('\n');
        }
        out
    }
}

/// Side-by-side table of the numeric solution and an optional reference.
pub fn emit_comparison(result: &ShootingResult, exact: Option<&SampledFunction>) -> Result<Comparison> {
    let t = result.grid.nodes().to_vec();
    let Some(ex) = exact else {
        return Ok(Comparison { t, numeric: result.x.clone(), exact: None, linf: None, l2: None });
    };
    if !ex.grid().matches(&result.grid) {
        return Err(Error::GridMismatch);
    }
    let err: Vec<f64> = result.x.iter().zip(ex.values()).map(|(a, b)| (a - b).abs()).collect();
    let linf = err.iter().fold(0.0_f64, |m, e| m.max(*e));
    let sq: Vec<f64> = err.iter().map(|e| e * e).collect();
    let l2 = crate::grid::trapezoid(&sq, result.grid.step()).sqrt();
    Ok(Comparison { t, numeric: result.x.clone(), exact: Some(ex.values().to_vec()), linf: Some(linf), l2: Some(l2) })
}
