//! Herglotz action along a sampled trajectory and the first-order optimality
//! conditions: Euler-Lagrange residuals, transversality and variations.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::problems::{BoundaryCondition, LagrangianDef, ProblemSpec};
use crate::expr::{evaluate, partial, partials, EvalPoint, Slot};
use crate::frac_ops::{left_caputo_deriv_general, right_rl_differintegral, DifferintegralOrder};
use crate::grid::{cumulative_trapezoid, Grid, SampledFunction};

/// Nodes excluded at each end when residual norms are taken.
pub const RESIDUAL_TRIM: usize = 2;

#[derive(Debug, Clone, PartialEq)]
pub enum OrderProfile {
    FirstOrder,
    /// Per component the integer `i` with `alpha in (i - 1, i)`.
    HigherOrder(Vec<u32>),
}

#[derive(Debug, Clone)]
pub struct HerglotzProblem {
    pub lagrangian: LagrangianDef,
    pub grid: Grid,
    pub z_init: f64,
    pub bc_left: Vec<f64>,
    pub bc_right: Vec<BoundaryCondition>,
    pub profile: OrderProfile,
}

impl HerglotzProblem {
    pub fn new(spec: &ProblemSpec, grid: Grid) -> Result<Self> {
        let (a, b) = spec.interval;
        let tol = 1e-12 * (b - a).abs().max(1.0);
        if (grid.a() - a).abs() > tol || (grid.b() - b).abs() > tol {
            return Err(Error::InvalidGrid(format!(
                "grid [{}, {}] does not match the problem interval [{a}, {b}]",
                grid.a(),
                grid.b()
            )));
        }
        let profile = if spec.lagrangian.is_first_order() {
            OrderProfile::FirstOrder
        } else {
            OrderProfile::HigherOrder(spec.lagrangian.orders.iter().map(|a| a.ceil() as u32).collect())
        };
        Ok(Self {
            lagrangian: spec.lagrangian.clone(),
            grid,
            z_init: spec.z_init,
            bc_left: spec.bc_left.clone(),
            bc_right: spec.bc_right.clone(),
            profile,
        })
    }

    pub fn dimension(&self) -> usize {
        self.lagrangian.dimension
    }

    pub fn orders(&self) -> &[f64] {
        &self.lagrangian.orders
    }

    fn free_components(&self) -> Vec<usize> {
        (0..self.dimension()).filter(|&j| self.bc_right[j] == BoundaryCondition::Free).collect()
    }
}

/// Samples of `x`, its Caputo derivatives, `z` and `lambda`.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub x: Vec<SampledFunction>,
    pub dx: Vec<SampledFunction>,
    pub z: SampledFunction,
    pub lambda: SampledFunction,
}

impl Trajectory {
    pub fn point(&self, k: usize) -> EvalPoint {
        EvalPoint {
            t: self.z.grid().node(k),
            x: self.x.iter().map(|f| f.values()[k]).collect(),
            d: self.dx.iter().map(|f| f.values()[k]).collect(),
            z: self.z.values()[k],
        }
    }

    pub fn grid(&self) -> &Grid {
        self.z.grid()
    }
}

fn same_value(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

fn check_shape(problem: &HerglotzProblem, x: &[SampledFunction]) -> Result<()> {
    if x.len() != problem.dimension() {
        return Err(Error::Dimension(format!("expected {} components, got {}", problem.dimension(), x.len())));
    }
    if x.iter().any(|f| !f.grid().matches(&problem.grid)) {
        return Err(Error::GridMismatch);
    }
    Ok(())
}

fn check_boundary(problem: &HerglotzProblem, x: &[SampledFunction]) -> Result<()> {
    for (j, f) in x.iter().enumerate() {
        if !same_value(f.first(), problem.bc_left[j]) {
            return Err(Error::Boundary(format!("x{}(a) = {} but must equal {}", j + 1, f.first(), problem.bc_left[j])));
        }
        if let BoundaryCondition::Fixed(v) = problem.bc_right[j] {
            if !same_value(f.last(), v) {
                return Err(Error::Boundary(format!("x{}(b) = {} but must equal {v}", j + 1, f.last())));
            }
        }
    }
    Ok(())
}

/// Integrates `z' = L(t, x, D^alpha x, z)` along `x`, after checking the boundary data.
pub fn solve_z(problem: &HerglotzProblem, x: &[SampledFunction]) -> Result<Trajectory> {
    check_shape(problem, x)?;
    check_boundary(problem, x)?;
    solve_z_unchecked(problem, x)
}

/// As [`solve_z`] but for perturbed trajectories that may leave the boundary data.
pub(crate) fn solve_z_unchecked(problem: &HerglotzProblem, x: &[SampledFunction]) -> Result<Trajectory> {
    check_shape(problem, x)?;
    let dx = x
        .iter()
        .zip(problem.orders())
        .map(|(f, &a)| left_caputo_deriv_general(f, a))
        .collect::<Result<Vec<_>>>()?;
    let g = &problem.grid;
    let h = g.step();
    let expr = &problem.lagrangian.expr;
    let n = g.len();

    let node = |k: usize| -> (Vec<f64>, Vec<f64>) {
        (x.iter().map(|f| f.values()[k]).collect(), dx.iter().map(|f| f.values()[k]).collect())
    };
    let mut z = Vec::with_capacity(n);
    z.push(problem.z_init);
    let (mut x0, mut d0) = node(0);
    for k in 0..n - 1 {
        let (x1, d1) = node(k + 1);
        let xm: Vec<f64> = x0.iter().zip(&x1).map(|(p, q)| 0.5 * (p + q)).collect();
        let dm: Vec<f64> = d0.iter().zip(&d1).map(|(p, q)| 0.5 * (p + q)).collect();
        let t0 = g.node(k);
        let tm = t0 + 0.5 * h;
        let t1 = g.node(k + 1);
        let zk = z[k];
        let f = |t: f64, xs: &[f64], ds: &[f64], zz: f64| {
            evaluate(expr, &EvalPoint { t, x: xs.to_vec(), d: ds.to_vec(), z: zz })
        };
        let k1 = f(t0, &x0, &d0, zk)?;
        let k2 = f(tm, &xm, &dm, zk + 0.5 * h * k1)?;
        let k3 = f(tm, &xm, &dm, zk + 0.5 * h * k2)?;
        let k4 = f(t1, &x1, &d1, zk + h * k3)?;
        z.push(zk + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
        x0 = x1;
        d0 = d1;
    }
    let z = SampledFunction::new(g.clone(), z)?;
    let mut traj = Trajectory { x: x.to_vec(), dx, z, lambda: SampledFunction::zeros(g) };
    traj.lambda = compute_lambda(problem, &traj)?;
    Ok(traj)
}

/// `lambda(t) = exp(-int_a^t dL/dz)` by the trapezoidal rule.
pub fn compute_lambda(problem: &HerglotzProblem, traj: &Trajectory) -> Result<SampledFunction> {
    let g = traj.grid();
    let lz = (0..g.len())
        .map(|k| partial(&problem.lagrangian.expr, &traj.point(k), Slot::Z).map(|(_, d)| d))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let integral = cumulative_trapezoid(&lz, g.step());
    SampledFunction::new(g.clone(), integral.into_iter().map(|v| (-v).exp()).collect())
}

/// `lambda * dL/dd_j` along the trajectory (0-based `j`).
pub fn momentum(problem: &HerglotzProblem, traj: &Trajectory, j: usize) -> Result<SampledFunction> {
    let g = traj.grid();
    let values = (0..g.len())
        .map(|k| partial(&problem.lagrangian.expr, &traj.point(k), Slot::D(j)).map(|(_, d)| traj.lambda.values()[k] * d))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    SampledFunction::new(g.clone(), values)
}

#[derive(Debug, Clone, Serialize)]
pub struct ComponentResidual {
    /// 1-based component index.
    pub component: usize,
    pub linf: f64,
    pub l2: f64,
    /// Endpoint conditions, present only for free right endpoints.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub transversality: Option<Vec<f64>>,
    #[serde(skip)]
    pub samples: Vec<f64>,
}

impl ComponentResidual {
    fn new(component: usize, samples: Vec<f64>, h: f64, trim: usize) -> Self {
        let (linf, l2) = interior_norms(&samples, h, trim, trim);
        Self { component, linf, l2, transversality: None, samples }
    }

    /// Sup norm over the nodes lying in `[lo, hi]`.
    pub fn linf_window(&self, grid: &Grid, lo: f64, hi: f64) -> f64 {
        grid.nodes()
            .iter()
            .zip(&self.samples)
            .filter(|(t, _)| **t >= lo && **t <= hi)
            .fold(0.0, |m, (_, r)| m.max(r.abs()))
    }
}

/// Sup and discrete L2 norms over `samples[left .. len - right]`.
pub(crate) fn interior_norms(samples: &[f64], h: f64, left: usize, right: usize) -> (f64, f64) {
    let n = samples.len();
    if left + right >= n {
        return (0.0, 0.0);
    }
    let inner = &samples[left..n - right];
    let linf = inner.iter().fold(0.0_f64, |m, r| m.max(r.abs()));
    let l2 = (h * inner.iter().map(|r| r * r).sum::<f64>()).sqrt();
    (linf, l2)
}

#[derive(Debug, Clone, Serialize)]
pub struct ResidualReport {
    pub h: f64,
    pub trim: usize,
    /// First and last node time covered by the norms.
    pub interior: (f64, f64),
    pub components: Vec<ComponentResidual>,
    /// Set when the report carries higher-order transversality entries,
    /// which are unproven conditions.
    pub stated_without_proof: bool,
}

impl ResidualReport {
    pub(crate) fn new(grid: &Grid, components: Vec<ComponentResidual>) -> Self {
        let n = grid.len();
        let trim = RESIDUAL_TRIM.min((n - 1) / 2);
        Self {
            h: grid.step(),
            trim,
            interior: (grid.node(trim), grid.node(n - 1 - trim)),
            components,
            stated_without_proof: false,
        }
    }

    pub fn linf(&self) -> f64 {
        self.components.iter().fold(0.0, |m, c| m.max(c.linf))
    }

    pub fn l2(&self) -> f64 {
        self.components.iter().map(|c| c.l2 * c.l2).sum::<f64>().sqrt()
    }

    /// `t,r1,r2,...` table of the full residual samples.
    pub fn samples_csv(&self, grid: &Grid) -> String {
        let mut out = String::from("t");
        for c in &self.components {
            out.push_str(&format!(",r{}", c.component));
        }
        out.push('\n');
        for (k, &t) in grid.nodes().iter().enumerate() {
            out.push_str(&crate::fmt_f64(t));
            for c in &self.components {
                out.push(',');
                out.push_str(&crate::fmt_f64(c.samples[k]));
            }
            out.push('\n');
        }
        out
    }
}

fn residual_samples(problem: &HerglotzProblem, traj: &Trajectory, j: usize) -> Result<Vec<f64>> {
    let p = momentum(problem, traj, j)?;
    let rd = right_rl_differintegral(&p, DifferintegralOrder::new(problem.orders()[j]))?;
    (0..traj.grid().len())
        .map(|k| {
            let (_, lx) = partial(&problem.lagrangian.expr, &traj.point(k), Slot::X(j))?;
            Ok(traj.lambda.values()[k] * lx + rd.values()[k])
        })
        .collect()
}

fn residual_report(problem: &HerglotzProblem, traj: &Trajectory) -> Result<ResidualReport> {
    let g = traj.grid();
    let trim = RESIDUAL_TRIM.min((g.len() - 1) / 2);
    let comps = (0..problem.dimension())
        .map(|j| Ok(ComponentResidual::new(j + 1, residual_samples(problem, traj, j)?, g.step(), trim)))
        .collect::<Result<Vec<_>>>()?;
    Ok(ResidualReport::new(g, comps))
}

/// Euler-Lagrange residual `lambda dL/dx_j + tD^alpha_b(lambda dL/dd_j)` for
/// orders in (0, 1), with transversality values for free components.
pub fn el_residual(problem: &HerglotzProblem, traj: &Trajectory) -> Result<ResidualReport> {
    if let Some(&a) = problem.orders().iter().find(|&&a| a >= 1.0) {
        return Err(Error::OrderOutOfRange { order: a, range: "(0, 1)" });
    }
    let mut report = residual_report(problem, traj)?;
    for j in problem.free_components() {
        report.components[j].transversality = Some(vec![endpoint_value(problem, traj, j, -(1.0 - problem.orders()[j]))?]);
    }
    Ok(report)
}

/// Euler-Lagrange residual for orders in `(i - 1, i)`, `i <= 2`, with the
/// higher-order transversality entries for free components.
pub fn higher_order_el_residual(problem: &HerglotzProblem, traj: &Trajectory) -> Result<ResidualReport> {
    if let Some(&a) = problem.orders().iter().find(|&&a| a >= 2.0) {
        return Err(Error::UnsupportedOrder(a));
    }
    let mut report = residual_report(problem, traj)?;
    for j in problem.free_components() {
        report.components[j].transversality = Some(transversality_entries(problem, traj, j)?);
        report.stated_without_proof |= problem.orders()[j] > 1.0;
    }
    Ok(report)
}

fn endpoint_value(problem: &HerglotzProblem, traj: &Trajectory, j: usize, beta: f64) -> Result<f64> {
    let p = momentum(problem, traj, j)?;
    Ok(right_rl_differintegral(&p, DifferintegralOrder::new(beta))?.last())
}

fn transversality_entries(problem: &HerglotzProblem, traj: &Trajectory, j: usize) -> Result<Vec<f64>> {
    let alpha = problem.orders()[j];
    let i = alpha.ceil() as u32;
    (0..i).map(|jj| endpoint_value(problem, traj, j, alpha + jj as f64 - i as f64)).collect()
}

/// `tI^(1 - alpha_j)_b(lambda dL/dd_j)` at `t = b` for each free component.
pub fn transversality_residual(problem: &HerglotzProblem, traj: &Trajectory) -> Result<Vec<f64>> {
    let free = problem.free_components();
    if free.is_empty() {
        return Err(Error::NoFreeEndpoint);
    }
    free.into_iter().map(|j| endpoint_value(problem, traj, j, -(1.0 - problem.orders()[j]))).collect()
}

/// `tD^(alpha_i + j - i)_b(lambda dL/dd_i)` at `t = b`, `j = 0..i-1`, per free component.
pub fn higher_order_transversality(problem: &HerglotzProblem, traj: &Trajectory) -> Result<Vec<(usize, Vec<f64>)>> {
    let free = problem.free_components();
    if free.is_empty() {
        return Err(Error::NoFreeEndpoint);
    }
    free.into_iter().map(|j| Ok((j + 1, transversality_entries(problem, traj, j)?))).collect()
}

/// The action `z(b)`.
pub fn functional_value(problem: &HerglotzProblem, x: &[SampledFunction]) -> Result<f64> {
    Ok(solve_z(problem, x)?.z.last())
}

#[derive(Debug, Clone, Serialize)]
pub struct VariationReport {
    #[serde(skip)]
    pub theta: SampledFunction,
    /// `theta(b)` by central differences of the action.
    pub theta_b_fd: f64,
    /// `theta(b)` from the integral formula.
    pub theta_b_formula: f64,
    pub epsilon: f64,
}

impl VariationReport {
    pub fn theta_b(&self) -> f64 {
        self.theta_b_formula
    }

    /// `|fd - formula| / max(|fd|, |formula|)`, zero when both vanish.
    pub fn relative_gap(&self) -> f64 {
        let scale = self.theta_b_fd.abs().max(self.theta_b_formula.abs());
        if scale == 0.0 {
            0.0
        } else {
            (self.theta_b_fd - self.theta_b_formula).abs() / scale
        }
    }
}

/// Rate of change of `z` in the direction `eta`.
pub fn directional_derivative(
    problem: &HerglotzProblem,
    x: &[SampledFunction],
    eta: &[SampledFunction],
) -> Result<VariationReport> {
    check_shape(problem, eta)?;
    for (j, e) in eta.iter().enumerate() {
        let scale = e.sup_norm().max(1.0);
        if e.first().abs() > 1e-12 * scale {
            return Err(Error::Boundary(format!("eta{}(a) = {} must vanish", j + 1, e.first())));
        }
        if problem.bc_right[j] != BoundaryCondition::Free && e.last().abs() > 1e-12 * scale {
            return Err(Error::Boundary(format!("eta{}(b) = {} must vanish at a fixed endpoint", j + 1, e.last())));
        }
    }
    let traj = solve_z(problem, x)?;
    let g = traj.grid();
    let h = g.step();
    let expr = &problem.lagrangian.expr;
    let d_eta = eta
        .iter()
        .zip(problem.orders())
        .map(|(e, &a)| left_caputo_deriv_general(e, a))
        .collect::<Result<Vec<_>>>()?;
    let mut integrand = Vec::with_capacity(g.len());
    for k in 0..g.len() {
        let p = traj.point(k);
        let (_, grad) = partials(expr, &p)?;
        let n = problem.dimension();
        let mut s = 0.0;
        for j in 0..n {
            s += grad[Slot::X(j).index(n)] * eta[j].values()[k] + grad[Slot::D(j).index(n)] * d_eta[j].values()[k];
        }
        integrand.push(traj.lambda.values()[k] * s);
    }
    let acc = cumulative_trapezoid(&integrand, h);
    let theta_values: Vec<f64> = acc.iter().zip(traj.lambda.values()).map(|(i, l)| i / l).collect();
    let theta = SampledFunction::new(g.clone(), theta_values)?;

    let eta_norm = eta.iter().fold(0.0_f64, |m, e| m.max(e.sup_norm()));
    let x_norm = x.iter().fold(1.0_f64, |m, f| m.max(f.sup_norm()));
    let epsilon = if eta_norm > 0.0 { 1e-5 * x_norm / eta_norm } else { 1e-5 };
    let shifted = |sign: f64| -> Result<f64> {
        let xs = x
            .iter()
            .zip(eta)
            .map(|(f, e)| f.lin_comb(1.0, e, sign * epsilon))
            .collect::<Result<Vec<_>>>()?;
        Ok(solve_z_unchecked(problem, &xs)?.z.last())
    };
    let theta_b_fd = if eta_norm == 0.0 { 0.0 } else { (shifted(1.0)? - shifted(-1.0)?) / (2.0 * epsilon) };
    Ok(VariationReport { theta_b_formula: theta.last(), theta, theta_b_fd, epsilon })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::problems::{builtin_problem, BuiltinParams, ProblemSpec};
    use crate::expr::LagrangianDef;

    fn problem(name: &str, n: usize) -> HerglotzProblem {
        let spec = builtin_problem(name, &BuiltinParams::default()).unwrap();
        HerglotzProblem::new(&spec, Grid::new(0.0, 1.0, n).unwrap()).unwrap()
    }

    fn square(g: &Grid) -> Vec<SampledFunction> {
        vec![SampledFunction::from_fn(g, |t| t * t)]
    }

    #[test]
    fn constant_lagrangian_gives_linear_z() {
        let lag = LagrangianDef::new("1", 1, vec![0.5]).unwrap();
        let spec = ProblemSpec::new("one", lag, (0.0, 1.0), 0.0, vec![0.0], vec![BoundaryCondition::Free]).unwrap();
        let p = HerglotzProblem::new(&spec, Grid::new(0.0, 1.0, 11).unwrap()).unwrap();
        let x = vec![SampledFunction::from_fn(&p.grid, |t| t)];
        let traj = solve_z(&p, &x).unwrap();
        for (z, t) in traj.z.values().iter().zip(p.grid.nodes()) {
            assert!((z - t).abs() < 1e-14);
        }
        assert_eq!(functional_value(&p, &x).unwrap(), traj.z.last());
    }

    #[test]
    fn example1_extremal_has_zero_action() {
        let p = problem("example1", 1001);
        let traj = solve_z(&p, &square(&p.grid)).unwrap();
        assert!(traj.z.sup_norm() < 1e-6);
        assert!(traj.lambda.values().iter().all(|&l| l == 1.0));
    }

    #[test]
    fn example2_z_is_exponential() {
        let p = problem("example2", 1001);
        let traj = solve_z(&p, &square(&p.grid)).unwrap();
        for (z, t) in traj.z.values().iter().zip(p.grid.nodes()) {
            assert!((z - t.exp()).abs() / t.exp() < 1e-6);
        }
        for (l, t) in traj.lambda.values().iter().zip(p.grid.nodes()) {
            assert!((l - (-t).exp()).abs() < 1e-8);
        }
        assert_eq!(traj.lambda.first(), 1.0);
    }

    #[test]
    fn boundary_violations_are_rejected() {
        let p = problem("example1", 101);
        let line = vec![SampledFunction::from_fn(&p.grid, |t| 0.5 * t)];
        assert!(matches!(solve_z(&p, &line), Err(Error::Boundary(_))));
        let shifted = vec![SampledFunction::from_fn(&p.grid, |t| t + 0.1)];
        assert!(matches!(solve_z(&p, &shifted), Err(Error::Boundary(_))));
    }

    #[test]
    fn residual_small_on_extremal_and_shrinks() {
        let r = |n: usize| {
            let p = problem("example1", n);
            let traj = solve_z(&p, &square(&p.grid)).unwrap();
            el_residual(&p, &traj).unwrap().linf()
        };
        let (r1, r2) = (r(501), r(1001));
        assert!(r2 <= 5e-2);
        assert!(r1 / r2 >= 1.5, "{r1} {r2}");
    }

    #[test]
    fn line_is_not_stationary() {
        let p = problem("example1", 1001);
        let traj = solve_z(&p, &[SampledFunction::from_fn(&p.grid, |t| t)]).unwrap();
        let rep = el_residual(&p, &traj).unwrap();
        assert!(rep.linf() >= 0.1);
        assert!(traj.z.last() > 1e-3);
        assert!(rep.components[0].transversality.is_none());
        assert!(matches!(transversality_residual(&p, &traj), Err(Error::NoFreeEndpoint)));
    }

    #[test]
    fn transversality_vanishes_when_lagrangian_ignores_d() {
        let lag = LagrangianDef::new("pow(x1, 2) + z", 1, vec![0.5]).unwrap();
        let spec = ProblemSpec::new("xd", lag, (0.0, 1.0), 0.0, vec![0.0], vec![BoundaryCondition::Free]).unwrap();
        let p = HerglotzProblem::new(&spec, Grid::new(0.0, 1.0, 101).unwrap()).unwrap();
        let traj = solve_z(&p, &[SampledFunction::from_fn(&p.grid, |t| t)]).unwrap();
        assert_eq!(transversality_residual(&p, &traj).unwrap(), vec![0.0]);
        let rep = el_residual(&p, &traj).unwrap();
        assert_eq!(rep.components[0].transversality, Some(vec![0.0]));
    }

    #[test]
    fn variation_of_extremal_vanishes_and_routes_agree() {
        let p = problem("example1", 1001);
        let x = square(&p.grid);
        let eta = vec![SampledFunction::from_fn(&p.grid, |t| t * (1.0 - t))];
        let rep = directional_derivative(&p, &x, &eta).unwrap();
        assert!(rep.theta_b().abs() <= 1e-4);
        assert_eq!(rep.theta.first(), 0.0);

        let line = vec![SampledFunction::from_fn(&p.grid, |t| t)];
        let rep = directional_derivative(&p, &line, &eta).unwrap();
        assert!(rep.theta_b().abs() >= 1e-3);
        assert!(rep.relative_gap() < 1e-4, "{rep:?}");

        let zero = vec![SampledFunction::zeros(&p.grid)];
        let rep = directional_derivative(&p, &line, &zero).unwrap();
        assert!(rep.theta.values().iter().all(|&v| v == 0.0));
        assert_eq!(rep.theta_b_fd, 0.0);

        let bad = vec![SampledFunction::from_fn(&p.grid, |t| 1.0 - t)];
        assert!(matches!(directional_derivative(&p, &line, &bad), Err(Error::Boundary(_))));
    }

    #[test]
    fn first_order_residual_rejects_higher_orders() {
        let lag = LagrangianDef::new("pow(d1,2)", 1, vec![1.5]).unwrap();
        let spec = ProblemSpec::new("h", lag, (0.0, 1.0), 0.0, vec![0.0], vec![BoundaryCondition::Free]).unwrap();
        let p = HerglotzProblem::new(&spec, Grid::new(0.0, 1.0, 101).unwrap()).unwrap();
        assert_eq!(p.profile, OrderProfile::HigherOrder(vec![2]));
        let x = vec![SampledFunction::from_fn_with_derivs(&p.grid, |t| t.powi(3), &[&|t| 3.0 * t * t])];
        let traj = solve_z(&p, &x).unwrap();
        assert!(el_residual(&p, &traj).is_err());
        let rep = higher_order_el_residual(&p, &traj).unwrap();
        assert!(rep.stated_without_proof);
        assert_eq!(rep.components[0].transversality.as_ref().unwrap().len(), 2);
    }

    #[test]
    fn grid_must_match_interval() {
        let spec = builtin_problem("example1", &BuiltinParams::default()).unwrap();
        assert!(HerglotzProblem::new(&spec, Grid::new(0.0, 2.0, 11).unwrap()).is_err());
    }
}
