//! Symmetries, the fractional Noether identity and conserved quantities.

use serde::Serialize;

use crate::approx::{find_root, SolverSettings};
use crate::error::{Error, Result};
use crate::expr::problems::BoundaryCondition;
use crate::expr::{eval_generic, parse, partial, EvalPoint, Expr, HyperDual, Scalar, Slot, Var};
use crate::frac_ops::{d_alpha_bracket, right_rl_integral, rl_integral_left, FractionalOrder};
use crate::grid::{Grid, SampledFunction};
use crate::herglotz::{el_residual, interior_norms, momentum, solve_z_unchecked, ComponentResidual, HerglotzProblem, ResidualReport, Trajectory};
use crate::special::rgamma;

/// One-parameter family `x_j -> x_j + s xi_j(t, x) + O(s^2)`, optionally with
/// the exact maps `h_j(t, x, s)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformationFamily {
    pub generators: Vec<Expr>,
    pub exact: Option<Vec<Expr>>,
}

impl TransformationFamily {
    pub fn new(generators: Vec<Expr>) -> Result<Self> {
        for g in &generators {
            if g.uses(Var::Z) || g.uses(Var::S) || (1..=g.max_index()).any(|k| g.uses(Var::D(k))) {
                return Err(Error::InvalidProblem(format!("generator {g} may only use t and x<k>")));
            }
        }
        Ok(Self { generators, exact: None })
    }

    pub fn parse(srcs: &[&str]) -> Result<Self> {
        Self::new(srcs.iter().map(|s| parse(s)).collect::<std::result::Result<Vec<_>, _>>()?)
    }

    /// `xi_j = c` for every component.
    pub fn constant(n: usize, c: f64) -> Self {
        Self { generators: vec![Expr::Const(c); n], exact: None }
    }

    pub fn with_exact(mut self, maps: Vec<Expr>) -> Result<Self> {
        if maps.len() != self.generators.len() {
            return Err(Error::Dimension(format!("{} maps for {} generators", maps.len(), self.generators.len())));
        }
        self.exact = Some(maps);
        Ok(self)
    }

    fn eval_at(e: &Expr, t: f64, x: &[f64], s: f64) -> Result<f64> {
        Ok(eval_generic(e, &|v| match v {
            Var::T => Some(t),
            Var::X(k) => x.get(k.wrapping_sub(1)).copied(),
            Var::S => Some(s),
            _ => None,
        })?)
    }

    fn sample(e: &Expr, traj: &Trajectory, s: f64) -> Result<SampledFunction> {
        let g = traj.grid();
        let values = (0..g.len())
            .map(|k| {
                let x: Vec<f64> = traj.x.iter().map(|f| f.values()[k]).collect();
                Self::eval_at(e, g.node(k), &x, s)
            })
            .collect::<Result<Vec<_>>>()?;
        SampledFunction::new(g.clone(), values)
    }

    /// `xi_j` sampled along the trajectory.
    pub fn generator_samples(&self, traj: &Trajectory) -> Result<Vec<SampledFunction>> {
        self.generators.iter().map(|e| Self::sample(e, traj, 0.0)).collect()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct InvarianceEntry {
    pub s: f64,
    /// `max_t |z_s - z| / |s|` for `x + s xi`.
    pub linearized_ratio: f64,
    /// Same ratio for the exact maps, when given.
    pub exact_ratio: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct InvarianceReport {
    pub entries: Vec<InvarianceEntry>,
    pub scale: f64,
    pub invariant: bool,
}

fn z_gap(base: &Trajectory, other: &Trajectory) -> f64 {
    base.z.values().iter().zip(other.z.values()).fold(0.0, |m, (a, b)| m.max((a - b).abs()))
}

/// Ratio test for invariance of the action under the family.
pub fn invariance_check(
    problem: &HerglotzProblem,
    traj: &Trajectory,
    family: &TransformationFamily,
    s_values: &[f64],
) -> Result<InvarianceReport> {
    if family.generators.len() != problem.dimension() {
        return Err(Error::Dimension(format!("{} generators for dimension {}", family.generators.len(), problem.dimension())));
    }
    let xi = family.generator_samples(traj)?;
    let mut entries = Vec::with_capacity(s_values.len());
    for &s in s_values.iter().filter(|s| **s != 0.0) {
        let xs = traj.x.iter().zip(&xi).map(|(x, e)| x.lin_comb(1.0, e, s)).collect::<Result<Vec<_>>>()?;
        let linearized_ratio = z_gap(traj, &solve_z_unchecked(problem, &xs)?) / s.abs();
        let exact_ratio = match &family.exact {
            Some(maps) => {
                let xs = maps.iter().map(|m| TransformationFamily::sample(m, traj, s)).collect::<Result<Vec<_>>>()?;
                Some(z_gap(traj, &solve_z_unchecked(problem, &xs)?) / s.abs())
            }
            None => None,
        };
        entries.push(InvarianceEntry { s, linearized_ratio, exact_ratio });
    }
    let scale = traj.z.sup_norm().max(1.0);
    let invariant = entries
        .iter()
        .min_by(|a, b| a.s.abs().total_cmp(&b.s.abs()))
        .is_some_and(|e| e.linearized_ratio < 1e-3 * scale && e.exact_ratio.map_or(true, |r| r < 1e-3 * scale));
    Ok(InvarianceReport { entries, scale, invariant })
}

#[derive(Debug, Clone, Serialize)]
pub struct NoetherReport {
    /// `sum_j D^alpha_j[lambda dL/dd_j, xi_j]` as a single series.
    pub residual: ResidualReport,
    /// Euler-Lagrange residual of the same trajectory, for context.
    pub el: ResidualReport,
}

/// Noether identity residual along a trajectory.
pub fn noether_residual(problem: &HerglotzProblem, traj: &Trajectory, family: &TransformationFamily) -> Result<NoetherReport> {
    if family.generators.len() != problem.dimension() {
        return Err(Error::Dimension(format!("{} generators for dimension {}", family.generators.len(), problem.dimension())));
    }
    let g = traj.grid();
    let xi = family.generator_samples(traj)?;
    let mut total = vec![0.0; g.len()];
    for (j, xi_j) in xi.iter().enumerate() {
        let p = momentum(problem, traj, j)?;
        let b = d_alpha_bracket(&p, xi_j, problem.orders()[j])?;
        for (acc, v) in total.iter_mut().zip(b.values()) {
            *acc += v;
        }
    }
    let el = el_residual(problem, traj)?;
    let (linf, l2) = interior_norms(&total, g.step(), el.trim, el.trim);
    let comp = ComponentResidual { component: 1, linf, l2, transversality: None, samples: total };
    Ok(NoetherReport { residual: ResidualReport::new(g, vec![comp]), el })
}

#[derive(Debug, Clone, Serialize)]
pub struct ConservedQuantity {
    /// 1-based component index.
    pub component: usize,
    #[serde(skip)]
    pub samples: SampledFunction,
    pub mean: f64,
    /// `max |C - mean|` over the trimmed window.
    pub flatness: f64,
    /// `max |C|` over the trimmed window.
    pub sup: f64,
    pub trim_left: usize,
    pub trim_right: usize,
    pub h: f64,
}

impl ConservedQuantity {
    pub fn relative_flatness(&self) -> f64 {
        if self.sup == 0.0 {
            0.0
        } else {
            self.flatness / self.sup
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,C\n");
        for (t, c) in self.samples.grid().nodes().iter().zip(self.samples.values()) {
            out.push_str(&format!("{},{}\n", crate::fmt_f64(*t), crate::fmt_f64(*c)));
        }
        out
    }
}

/// Nodes dropped at the right end of the flatness window: the right integral
/// carries an `O(h^alpha)`-wide boundary layer next to `b` for singular momenta.
pub fn flatness_trim_right(n_points: usize) -> usize {
    (((n_points - 1) as f64 * 0.05).ceil() as usize).max(2)
}

const PROBE_FRACTIONS: [f64; 5] = [0.13, 0.37, 0.51, 0.74, 0.92];
const PROBE_SHIFTS: [f64; 5] = [0.31, -0.47, 0.23, 0.89, -0.12];

fn probe_cyclic(problem: &HerglotzProblem, points: &[EvalPoint], j: usize) -> Result<()> {
    for p in points {
        let (_, lx) = partial(&problem.lagrangian.expr, p, Slot::X(j))?;
        if lx.abs() > 1e-12 {
            return Err(Error::SymmetryViolation { component: j + 1, value: lx, t: p.t });
        }
    }
    Ok(())
}

/// `C(t) = tI^(1 - alpha_j)_b(lambda dL/dd_j)`, conserved when `L` does not
/// depend on `x_j`.
pub fn constant_of_motion(problem: &HerglotzProblem, traj: &Trajectory, j: usize) -> Result<ConservedQuantity> {
    if j >= problem.dimension() {
        return Err(Error::Dimension(format!("component {} out of range", j + 1)));
    }
    let g = traj.grid();
    let n = g.len();
    let points: Vec<EvalPoint> = PROBE_FRACTIONS
        .iter()
        .zip(PROBE_SHIFTS)
        .map(|(&f, s)| {
            let mut p = traj.point(((n - 1) as f64 * f) as usize);
            p.x.iter_mut().for_each(|v| *v += s);
            p.d.iter_mut().for_each(|v| *v -= 0.5 * s);
            p.z += 0.7 * s;
            p
        })
        .collect();
    probe_cyclic(problem, &points, j)?;
    let alpha = problem.orders()[j];
    let p = momentum(problem, traj, j)?;
    let c = right_rl_integral(&p, FractionalOrder::new(1.0 - alpha)?);
    let trim_left = 2.min(n / 2);
    let trim_right = flatness_trim_right(n).min(n - trim_left - 1);
    let window = &c.values()[trim_left..n - trim_right];
    let mean = window.iter().sum::<f64>() / window.len() as f64;
    let flatness = window.iter().fold(0.0_f64, |m, v| m.max((v - mean).abs()));
    let sup = window.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    Ok(ConservedQuantity { component: j + 1, samples: c, mean, flatness, sup, trim_left, trim_right, h: g.step() })
}

/// Extremal of a one-component problem whose Lagrangian does not depend on `x`.
#[derive(Debug, Clone, Serialize)]
pub struct CyclicSolution {
    #[serde(skip)]
    pub x: SampledFunction,
    /// The constant `k` in `lambda dL/dd = k (b - t)^(alpha - 1) / Gamma(alpha)`.
    pub momentum_constant: f64,
    pub iterations: usize,
    /// `|x(b) - x_b|` before the endpoint sample is set to `x_b`.
    pub mismatch: f64,
}

struct March {
    v: Vec<f64>,
}

/// Marches `lambda(t_i) dL/dd(t_i, v_i, z_i) = p(t_i)` forward over the nodes
/// before `b`, integrating `z` and `lambda` alongside.
fn march(problem: &HerglotzProblem, k: f64, x_a: f64) -> Result<March> {
    let g = &problem.grid;
    let n = g.len();
    let h = g.step();
    let alpha = problem.orders()[0];
    let b = g.b();
    let expr = &problem.lagrangian.expr;
    let pt = |t: f64, v: f64, z: f64| EvalPoint { t, x: vec![x_a], d: vec![v], z };
    let target = |i: usize| k * (b - g.node(i)).powf(alpha - 1.0) * rgamma(alpha);

    let solve_v = |t: f64, z: f64, lambda: f64, p: f64, mut v: f64| -> Result<f64> {
        for _ in 0..60 {
            let hd = eval_generic(expr, &|var| match var {
                Var::T => Some(HyperDual::cst(t)),
                Var::X(1) => Some(HyperDual::cst(x_a)),
                Var::D(1) => Some(HyperDual::var(v, 1.0, 1.0)),
                Var::Z => Some(HyperDual::cst(z)),
                _ => None,
            })?;
            if hd.e12 == 0.0 || !hd.e12.is_finite() {
                return Err(Error::Degenerate { t, reason: format!("d2L/dd2 = {}", hd.e12) });
            }
            let step = (lambda * hd.e1 - p) / (lambda * hd.e12);
            v -= step;
            if step.abs() <= 1e-15 * (1.0 + v.abs()) {
                break;
            }
        }
        Ok(v)
    };
    let lz = |t: f64, v: f64, z: f64| -> Result<(f64, f64)> { Ok(partial(expr, &pt(t, v, z), Slot::Z)?) };

    let mut v = Vec::with_capacity(n - 1);
    let mut z = problem.z_init;
    let mut big_l = 0.0;
    let v0 = solve_v(g.node(0), z, 1.0, target(0), 0.0)?;
    v.push(v0);
    let (mut l_prev, mut lz_prev) = lz(g.node(0), v0, z)?;
    for i in 1..n - 1 {
        let t = g.node(i);
        let p = target(i);
        let mut vi = v[i - 1];
        let mut zi = z + h * l_prev;
        let mut big_li = big_l + h * lz_prev;
        for _ in 0..200 {
            let lambda = (-big_li).exp();
            let v_new = solve_v(t, zi, lambda, p, vi)?;
            let (l, dz) = lz(t, v_new, zi)?;
            let z_new = z + 0.5 * h * (l_prev + l);
            let big_new = big_l + 0.5 * h * (lz_prev + dz);
            let done = (v_new - vi).abs() <= 1e-14 * (1.0 + vi.abs()) && (z_new - zi).abs() <= 1e-14 * (1.0 + zi.abs());
            vi = v_new;
            zi = z_new;
            big_li = big_new;
            if done {
                break;
            }
        }
        let (l, dz) = lz(t, vi, zi)?;
        v.push(vi);
        z = zi;
        big_l = big_li;
        l_prev = l;
        lz_prev = dz;
    }
    Ok(March { v })
}

/// `x(b) - x_a` from samples of `v = D^alpha x` on the nodes before `b`, with
/// `v ~ v_{n-2} ((b - t)/h)^(alpha - 1)` on the last interval.
fn endpoint_increment(v: &[f64], h: f64, alpha: f64) -> f64 {
    let last = v.len(); // index of b
    let mut acc = 0.0;
    for j in 0..last - 1 {
        let m = (last - j) as f64;
        let u = (m.powf(alpha) - (m - 1.0).powf(alpha)) / alpha;
        let w = (m.powf(alpha + 1.0) - (m - 1.0).powf(alpha + 1.0)) / (alpha + 1.0);
        acc += (w - (m - 1.0) * u) * v[j] + (m * u - w) * v[j + 1];
    }
    acc += v[last - 1] / (2.0 * alpha - 1.0);
    h.powf(alpha) * acc * rgamma(alpha)
}

/// Solves the fixed-endpoint problem for `n = 1`, `alpha in (1/2, 1)` and a
/// Lagrangian independent of `x`, through the first integral
/// `lambda dL/dd = k (b - t)^(alpha - 1) / Gamma(alpha)`, shooting on `k`.
pub fn solve_cyclic_extremal(problem: &HerglotzProblem, settings: &SolverSettings) -> Result<CyclicSolution> {
    if problem.dimension() != 1 {
        return Err(Error::Dimension(format!("expected one component, got {}", problem.dimension())));
    }
    let alpha = problem.orders()[0];
    if !(alpha > 0.5 && alpha < 1.0) {
        return Err(Error::OrderOutOfRange { order: alpha, range: "(0.5, 1)" });
    }
    let BoundaryCondition::Fixed(x_b) = problem.bc_right[0] else {
        return Err(Error::InvalidProblem("a fixed right endpoint is required".into()));
    };
    let g = &problem.grid;
    let x_a = problem.bc_left[0];
    let points: Vec<EvalPoint> = PROBE_FRACTIONS
        .iter()
        .zip(PROBE_SHIFTS)
        .map(|(&f, s)| EvalPoint { t: g.a() + f * (g.b() - g.a()), x: vec![x_a + s], d: vec![1.0 - s], z: problem.z_init + s })
        .collect();
    probe_cyclic(problem, &points, 0)?;
    let h = g.step();
    let root = find_root(|k| Ok(x_a + endpoint_increment(&march(problem, k, x_a)?.v, h, alpha) - x_b), settings)?;
    let v = march(problem, root.arg, x_a)?.v;
    let mut values = rl_integral_left(&v, h, alpha);
    values.iter_mut().for_each(|x| *x += x_a);
    values.push(x_b);
    let x = SampledFunction::new(g.clone(), values)?;
    Ok(CyclicSolution { x, momentum_constant: root.arg, iterations: root.iterations, mismatch: root.value.abs() })
}

/// Solution of the cyclic problem together with its recomputed trajectory.
pub fn cyclic_trajectory(problem: &HerglotzProblem, settings: &SolverSettings) -> Result<(CyclicSolution, Trajectory)> {
    let sol = solve_cyclic_extremal(problem, settings)?;
    let traj = crate::herglotz::solve_z(problem, std::slice::from_ref(&sol.x))?;
    Ok((sol, traj))
}

/// Grid helper used by the acceptance checks: the same problem on another resolution.
pub fn regrid(problem: &HerglotzProblem, n_points: usize) -> Result<HerglotzProblem> {
    let mut p = problem.clone();
    p.grid = Grid::new(problem.grid.a(), problem.grid.b(), n_points)?;
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::problems::{builtin_problem, BuiltinParams, LagrangianDef, ProblemSpec};
    use crate::frac_ops::{left_caputo_deriv, right_rl_differintegral, DifferintegralOrder};
    use crate::herglotz::solve_z;

    fn setup(name: &str, n: usize) -> HerglotzProblem {
        let spec = builtin_problem(name, &BuiltinParams::default()).unwrap();
        HerglotzProblem::new(&spec, Grid::new(0.0, 1.0, n).unwrap()).unwrap()
    }

    fn square_traj(p: &HerglotzProblem) -> Trajectory {
        solve_z(p, &[SampledFunction::from_fn(&p.grid, |t| t * t)]).unwrap()
    }

    #[test]
    fn bracket_defining_identity() {
        let g = Grid::new(0.0, 1.0, 201).unwrap();
        let f = SampledFunction::from_fn(&g, |t| (2.0 * t).cos());
        let gg = SampledFunction::from_fn(&g, |t| t * t + 0.5);
        let b = d_alpha_bracket(&f, &gg, 0.6).unwrap();
        let cg = left_caputo_deriv(&gg, FractionalOrder::new(0.6).unwrap()).unwrap();
        let rf = right_rl_differintegral(&f, DifferintegralOrder::new(0.6)).unwrap();
        for k in 0..201 {
            let r = b.values()[k] + gg.values()[k] * rf.values()[k] - f.values()[k] * cg.values()[k];
            assert!(r.abs() <= 1e-12 * (1.0 + rf.values()[k].abs()));
        }
    }

    #[test]
    fn bracket_with_constant_second_slot() {
        let g = Grid::new(0.0, 1.0, 101).unwrap();
        let f = SampledFunction::from_fn(&g, |t| t.exp());
        let c = SampledFunction::from_fn(&g, |_| 2.0);
        let b = d_alpha_bracket(&f, &c, 0.5).unwrap();
        let rf = right_rl_differintegral(&f, DifferintegralOrder::new(0.5)).unwrap();
        for k in 0..101 {
            assert_eq!(b.values()[k], -2.0 * rf.values()[k]);
        }
    }

    #[test]
    fn bracket_classical_limit() {
        let g = Grid::new(0.0, 1.0, 2001).unwrap();
        let f = SampledFunction::from_fn(&g, |t| 1.0 + t.sin());
        let b = d_alpha_bracket(&f, &f, 0.999).unwrap();
        for k in (200..1800).step_by(50) {
            let t = g.node(k);
            let exact = 2.0 * (1.0 + t.sin()) * t.cos();
            assert!((b.values()[k] - exact).abs() < 5e-2, "t={t}");
        }
    }

    #[test]
    fn invariance_of_translation() {
        let p = setup("noether_gamma", 201);
        let traj = square_traj(&p);
        let rep = invariance_check(&p, &traj, &TransformationFamily::constant(1, 1.0), &[1e-2, 1e-4]).unwrap();
        assert!(rep.invariant);
        assert!(rep.entries.iter().all(|e| e.linearized_ratio <= 1e-6));

        let lag = LagrangianDef::new("pow(x1, 2) + pow(d1, 2)", 1, vec![0.5]).unwrap();
        let spec = ProblemSpec::new("x", lag, (0.0, 1.0), 0.0, vec![0.0], vec![BoundaryCondition::Fixed(1.0)]).unwrap();
        let q = HerglotzProblem::new(&spec, Grid::new(0.0, 1.0, 201).unwrap()).unwrap();
        let traj = square_traj(&q);
        let rep = invariance_check(&q, &traj, &TransformationFamily::constant(1, 1.0), &[1e-4]).unwrap();
        assert!(!rep.invariant);
        assert!(rep.entries[0].linearized_ratio >= 1e-2);
    }

    #[test]
    fn exact_maps_are_reported() {
        let p = setup("example1", 201);
        let traj = square_traj(&p);
        let fam = TransformationFamily::parse(&["1"]).unwrap().with_exact(vec![parse("x1 + s").unwrap()]).unwrap();
        let rep = invariance_check(&p, &traj, &fam, &[1e-4]).unwrap();
        assert!(rep.entries[0].exact_ratio.unwrap() <= 1e-6);
        assert!(rep.invariant);
    }

    #[test]
    fn noether_residual_zero_family_and_linearity() {
        let p = setup("example1", 401);
        let traj = solve_z(&p, &[SampledFunction::from_fn(&p.grid, |t| t)]).unwrap();
        let zero = noether_residual(&p, &traj, &TransformationFamily::constant(1, 0.0)).unwrap();
        assert!(zero.residual.components[0].samples.iter().all(|&v| v == 0.0));

        let f1 = TransformationFamily::parse(&["t"]).unwrap();
        let f2 = TransformationFamily::parse(&["x1*x1"]).unwrap();
        let f12 = TransformationFamily::parse(&["t + x1*x1"]).unwrap();
        let r1 = noether_residual(&p, &traj, &f1).unwrap().residual.components[0].samples.clone();
        let r2 = noether_residual(&p, &traj, &f2).unwrap().residual.components[0].samples.clone();
        let r12 = noether_residual(&p, &traj, &f12).unwrap().residual.components[0].samples.clone();
        for k in 0..r1.len() {
            assert!((r12[k] - r1[k] - r2[k]).abs() <= 1e-9 * (1.0 + r12[k].abs()));
        }
    }

    #[test]
    fn translation_residual_equals_el_residual() {
        let p = setup("example1", 401);
        let traj = solve_z(&p, &[SampledFunction::from_fn(&p.grid, |t| t)]).unwrap();
        let rep = noether_residual(&p, &traj, &TransformationFamily::constant(1, 1.0)).unwrap();
        assert!((rep.residual.linf() - rep.el.linf()).abs() <= 1e-10 * rep.el.linf().max(1.0));
        let el = &rep.el.components[0].samples;
        for (a, b) in rep.residual.components[0].samples.iter().zip(el) {
            assert!((a + b).abs() <= 1e-10 * (1.0 + b.abs()));
        }
    }

    #[test]
    fn conserved_quantity_on_the_example_extremal() {
        let p = setup("example1", 1001);
        let c = constant_of_motion(&p, &square_traj(&p), 0).unwrap();
        assert!(c.flatness <= 1e-3);
    }

    #[test]
    fn symmetry_gate() {
        let lag = LagrangianDef::new("pow(x1, 2) + pow(d1, 2)", 1, vec![0.5]).unwrap();
        let spec = ProblemSpec::new("x", lag, (0.0, 1.0), 0.0, vec![0.0], vec![BoundaryCondition::Fixed(1.0)]).unwrap();
        let q = HerglotzProblem::new(&spec, Grid::new(0.0, 1.0, 51).unwrap()).unwrap();
        let traj = square_traj(&q);
        assert!(matches!(constant_of_motion(&q, &traj, 0), Err(Error::SymmetryViolation { .. })));
        let mut q75 = q.clone();
        q75.lagrangian.orders = vec![0.75];
        assert!(matches!(solve_cyclic_extremal(&q75, &SolverSettings::default()), Err(Error::SymmetryViolation { .. })));
    }

    #[test]
    fn endpoint_rule_integrates_the_singular_model() {
        let alpha: f64 = 0.75;
        let n = 4001;
        let g = Grid::new(0.0, 1.0, n).unwrap();
        let v: Vec<f64> = g.nodes()[..n - 1].iter().map(|t| (1.0 - t).powf(alpha - 1.0)).collect();
        let got = endpoint_increment(&v, g.step(), alpha);
        // int_0^1 (1-t)^(2 alpha - 2) dt / Gamma(alpha) = 1 / ((2 alpha - 1) Gamma(alpha))
        let exact = rgamma(alpha) / (2.0 * alpha - 1.0);
        assert!((got - exact).abs() < 2e-2 * exact, "{got} {exact}");
    }

    #[test]
    fn cyclic_solver_flattens_the_conserved_quantity() {
        let p = setup("noether_gamma", 501);
        let (sol, traj) = cyclic_trajectory(&p, &SolverSettings::default()).unwrap();
        assert!(sol.mismatch <= 1e-8);
        for (l, t) in traj.lambda.values().iter().zip(p.grid.nodes()) {
            assert!((l - (0.1 * t).exp()).abs() < 1e-8);
        }
        let c = constant_of_motion(&p, &traj, 0).unwrap();
        assert!(c.relative_flatness() <= 5e-2, "{}", c.relative_flatness());
        assert!((c.mean - sol.momentum_constant).abs() < 5e-2 * sol.momentum_constant.abs());
    }
}
