//! Subcommand pipelines. Each returns a [`Report`] for `main` to write out.

use std::fs;
use std::path::Path;

use fracvar_core::approx::{
    build_reduced_lagrangian, emit_comparison, reduced_el_residual, solve_reduced_herglotz, ExpansionSpec, SolverSettings,
};
use fracvar_core::config::parse_config;
use fracvar_core::expr::{builtin_problem, parse, BuiltinParams, ProblemSpec};
use fracvar_core::frac_ops::{
    left_caputo_deriv_general, left_rl_integral, right_caputo_deriv, right_rl_differintegral, right_rl_integral,
};
use fracvar_core::herglotz::{el_residual, higher_order_el_residual, solve_z, RESIDUAL_TRIM};
use fracvar_core::noether::{constant_of_motion, cyclic_trajectory, invariance_check, noether_residual, TransformationFamily};
use fracvar_core::{DifferintegralOrder, Error, Expr, FractionalOrder, Grid, HerglotzProblem, SampledFunction};
use serde_json::{json, Value};

use crate::input::{problem_grid, FnSpec, GridArg, Operator, TrajArg, DEFAULT_NODES};
use crate::{Failure, ProblemArgs, Report};

/// Step sizes of the invariance ratio test.
const INVARIANCE_STEPS: [f64; 3] = [1e-2, 1e-3, 1e-4];

fn grid_json(g: &Grid) -> Value {
    json!({ "a": g.a(), "b": g.b(), "n": g.len(), "h": g.step() })
}

/// Builtin problem or `--config` file, plus solver settings.
pub fn load_problem(args: &ProblemArgs, config: Option<&Path>) -> Result<(ProblemSpec, SolverSettings), Failure> {
    match (&args.problem, config) {
        (Some(_), Some(_)) => Err(Failure::Usage("--problem and --config are mutually exclusive".into())),
        (None, None) => Err(Failure::Usage("one of --problem or --config is required".into())),
        (Some(name), None) => {
            let defaults = BuiltinParams::default();
            let params = BuiltinParams {
                gamma: args.gamma.unwrap_or(defaults.gamma),
                f_exponent: args.f_exponent.unwrap_or(defaults.f_exponent),
                alpha: args.alpha,
            };
            Ok((builtin_problem(name, &params)?, SolverSettings::default()))
        }
        (None, Some(path)) => {
            if args.gamma.is_some() || args.f_exponent.is_some() || args.alpha.is_some() {
                return Err(Failure::Usage("--gamma, --f-exponent and --alpha apply to builtin problems only".into()));
            }
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::Usage(format!("cannot read config '{}': {e}", path.display())))?;
            let cfg = parse_config(&text)?;
            Ok((cfg.problem, cfg.solver))
        }
    }
}

/// Loads one trajectory per component onto a common grid.
fn load_trajectories(
    spec: &ProblemSpec,
    grid_arg: Option<GridArg>,
    trajs: &[TrajArg],
    rows: u32,
) -> Result<(Grid, Vec<SampledFunction>), Failure> {
    let n = spec.dimension();
    if trajs.len() != n {
        return Err(Error::Dimension(format!("{} trajectories for dimension {n}", trajs.len())).into());
    }
    let xs = trajs.iter().map(|t| t.load(grid_arg, spec.interval, rows)).collect::<Result<Vec<_>, _>>()?;
    let grid = xs[0].grid().clone();
    if let Some(k) = xs.iter().position(|x| !x.grid().matches(&grid)) {
        return Err(Failure::Usage(format!("trajectory {} ({}) is on a different grid", k + 1, trajs[k])));
    }
    Ok((grid, xs))
}

pub fn ops(grid_arg: Option<GridArg>, f: &FnSpec, op: Operator, alpha: f64) -> Result<Report, Failure> {
    let arg = grid_arg.unwrap_or(GridArg { interval: None, n: DEFAULT_NODES });
    let (a, b) = arg.interval.unwrap_or((0.0, 1.0));
    let grid = Grid::new(a, b, arg.n)?;
    let rows = if op == Operator::Lcd && alpha > 1.0 { 2 } else { 0 };
    let input = f.sample(&grid, rows);
    let out = match op {
        Operator::Li => left_rl_integral(&input, FractionalOrder::new(alpha)?),
        Operator::Ri => right_rl_integral(&input, FractionalOrder::new(alpha)?),
        Operator::Lcd => left_caputo_deriv_general(&input, alpha)?,
        Operator::Rcd => right_caputo_deriv(&input, FractionalOrder::new(alpha)?)?,
        Operator::Rld => right_rl_differintegral(&input, DifferintegralOrder::new(alpha))?,
    };
    let reference = f.reference(op, alpha, &grid);
    let n = grid.len();
    let trim = RESIDUAL_TRIM.min((n - 1) / 2);
    let linf = reference.as_ref().map(|r| {
        (trim..n - trim)
            .filter(|&k| r[k].is_finite())
            .fold(0.0_f64, |m, k| m.max((out.values()[k] - r[k]).abs()))
    });

    let mut csv = String::from(if reference.is_some() { "t,f,value,reference\n" } else { "t,f,value\n" });
    for k in 0..n {
        let mut row = vec![grid.node(k), input.values()[k], out.values()[k]];
        row.extend(reference.as_ref().map(|r| r[k]));
        csv.push_str(&row.into_iter().map(fracvar_core::fmt_f64).collect::<Vec<_>>().join(","));
        csv.push('\n');
    }
    let summary = json!({
        "command": "ops",
        "function": f.to_string(),
        "operator": op.name(),
        "alpha": alpha,
        "grid": grid_json(&grid),
        "trim": trim,
        "linf_vs_reference": linf,
    });
    Ok(Report { name: "ops", summary, tables: vec![("ops.csv".into(), csv)], passed: true })
}

pub fn residual(
    spec: ProblemSpec,
    grid_arg: Option<GridArg>,
    trajs: &[TrajArg],
    tol: f64,
    free_right: bool,
) -> Result<Report, Failure> {
    let spec = if free_right { spec.with_free_right() } else { spec };
    let higher = spec.lagrangian.orders.iter().any(|&a| a > 1.0);
    let (grid, xs) = load_trajectories(&spec, grid_arg, trajs, if higher { 2 } else { 0 })?;
    let problem = HerglotzProblem::new(&spec, grid.clone())?;
    let traj = solve_z(&problem, &xs)?;
    let rep = if higher { higher_order_el_residual(&problem, &traj)? } else { el_residual(&problem, &traj)? };
    let transversality_ok = rep
        .components
        .iter()
        .flat_map(|c| c.transversality.iter().flatten())
        .all(|v| v.abs() <= tol);
    let passed = rep.linf() <= tol && transversality_ok;
    let summary = json!({
        "command": "residual",
        "problem": spec.name,
        "trajectory": trajs.iter().map(|t| t.to_string()).collect::<Vec<_>>(),
        "grid": grid_json(&grid),
        "tol": tol,
        "linf": rep.linf(),
        "l2": rep.l2(),
        "passed": passed,
        "report": rep,
    });
    Ok(Report { name: "residual", summary, tables: vec![("residual.csv".into(), rep.samples_csv(&grid))], passed })
}

pub fn solve(
    spec: ProblemSpec,
    settings: SolverSettings,
    grid_arg: Option<GridArg>,
    exact: Option<&FnSpec>,
) -> Result<Report, Failure> {
    if spec.dimension() != 1 {
        return Err(Error::Dimension(format!("solve handles one component, the problem has {}", spec.dimension())).into());
    }
    let Some(x_b) = spec.bc_right[0].value() else {
        return Err(Failure::Usage("solve needs a fixed right endpoint".into()));
    };
    let grid = problem_grid(grid_arg, spec.interval)?;
    let problem = HerglotzProblem::new(&spec, grid.clone())?;
    let expansion = ExpansionSpec::new(1, spec.interval.0, spec.lagrangian.orders[0])?;
    let red = build_reduced_lagrangian(&spec.lagrangian, expansion, spec.bc_left[0])?;
    let res = solve_reduced_herglotz(&red, &problem, &settings)?;
    let reference = exact.map(|f| f.sample(&grid, 0));
    let cmp = emit_comparison(&res, reference.as_ref())?;
    let self_consistency = reduced_el_residual(&red, &res)?.iter().fold(0.0_f64, |m, r| m.max(r.abs()));
    let summary = json!({
        "command": "solve",
        "problem": spec.name,
        "grid": grid_json(&grid),
        "expansion": expansion,
        "x_b": x_b,
        "shooting": res,
        "self_consistency": self_consistency,
        "exact": exact.map(|f| f.to_string()),
        "linf": cmp.linf,
        "l2": cmp.l2,
    });
    Ok(Report { name: "solve", summary, tables: vec![("solve.csv".into(), cmp.to_csv())], passed: true })
}

/// `const:C` or an expression in `t` and `x<k>`.
fn generator(src: &str) -> Result<Expr, Failure> {
    match src.strip_prefix("const:") {
        Some(c) => c
            .trim()
            .parse::<f64>()
            .map(Expr::Const)
            .map_err(|_| Failure::Usage(format!("'{c}' is not a number in '{src}'"))),
        None => Ok(parse(src).map_err(Error::from)?),
    }
}

pub fn noether(
    spec: ProblemSpec,
    settings: SolverSettings,
    grid_arg: Option<GridArg>,
    xi: &[String],
    trajs: Option<&[TrajArg]>,
    tol: f64,
) -> Result<Report, Failure> {
    let family = TransformationFamily::new(xi.iter().map(|s| generator(s)).collect::<Result<Vec<_>, _>>()?)?;
    if family.generators.len() != spec.dimension() {
        return Err(
            Error::Dimension(format!("{} generators for dimension {}", family.generators.len(), spec.dimension())).into()
        );
    }
    let (problem, traj, cyclic) = match trajs {
        Some(trajs) => {
            let (grid, xs) = load_trajectories(&spec, grid_arg, trajs, 0)?;
            let problem = HerglotzProblem::new(&spec, grid)?;
            let traj = solve_z(&problem, &xs)?;
            (problem, traj, None)
        }
        None => {
            let problem = HerglotzProblem::new(&spec, problem_grid(grid_arg, spec.interval)?)?;
            let (sol, traj) = cyclic_trajectory(&problem, &settings)?;
            (problem, traj, Some(sol))
        }
    };
    let grid = problem.grid.clone();
    let invariance = invariance_check(&problem, &traj, &family, &INVARIANCE_STEPS)?;
    let nr = noether_residual(&problem, &traj, &family)?;
    let conserved = family
        .generators
        .iter()
        .enumerate()
        .filter(|(_, g)| matches!(g, Expr::Const(c) if *c != 0.0))
        .map(|(j, _)| constant_of_motion(&problem, &traj, j))
        .collect::<Result<Vec<_>, _>>()?;
    let flat = conserved.iter().all(|c| c.relative_flatness() <= tol);
    let passed = invariance.invariant && flat;

    let conserved_json: Vec<Value> = conserved
        .iter()
        .map(|c| {
            let mut v = serde_json::to_value(c).expect("plain fields");
            v["relative_flatness"] = json!(c.relative_flatness());
            v
        })
        .collect();
    let summary = json!({
        "command": "noether",
        "problem": spec.name,
        "grid": grid_json(&grid),
        "generators": family.generators.iter().map(|g| g.to_string()).collect::<Vec<_>>(),
        "trajectory": match trajs {
            Some(t) => json!(t.iter().map(|t| t.to_string()).collect::<Vec<_>>()),
            None => json!("cyclic solver"),
        },
        "cyclic": cyclic,
        "invariance": invariance,
        "noether_residual": nr,
        "conserved": conserved_json,
        "tol": tol,
        "passed": passed,
    });
    let mut tables = vec![("noether_residual.csv".to_string(), nr.residual.samples_csv(&grid))];
    tables.extend(conserved.iter().map(|c| (format!("conserved_{}.csv", c.component), c.to_csv())));
    Ok(Report { name: "noether", summary, tables, passed })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn builtin(name: &str) -> ProblemArgs {
        ProblemArgs { problem: Some(name.into()), gamma: None, f_exponent: None, alpha: None }
    }

    #[test]
    fn problem_source_is_exclusive() {
        let both = load_problem(&builtin("example1"), Some(Path::new("x.toml")));
        assert!(matches!(both, Err(Failure::Usage(_))));
        let none = ProblemArgs { problem: None, ..builtin("") };
        assert!(matches!(load_problem(&none, None), Err(Failure::Usage(_))));
        let spec = load_problem(&ProblemArgs { gamma: Some(0.3), ..builtin("noether_gamma") }, None).unwrap().0;
        assert_eq!(spec.lagrangian.expr.to_string(), "(pow(d1, 2) - (0.3 * z))");
    }

    #[test]
    fn caputo_of_square_matches_power_rule() {
        let grid = GridArg { interval: None, n: 1001 };
        let r = ops(Some(grid), &"pow:2".parse().unwrap(), Operator::Lcd, 0.5).unwrap();
        assert!(r.summary["linf_vs_reference"].as_f64().unwrap() <= 5e-3);
    }

    #[test]
    fn generators() {
        assert_eq!(generator("const:2").unwrap(), Expr::Const(2.0));
        assert!(generator("const:x").is_err());
        assert!(generator("t*x1").is_ok());
        assert!(matches!(generator("t*"), Err(Failure::Core(Error::Parse(_)))));
    }

    #[test]
    fn solve_rejects_free_endpoint() {
        let spec = builtin_problem("example3", &BuiltinParams::default()).unwrap().with_free_right();
        let grid = GridArg { interval: None, n: 101 };
        assert!(matches!(solve(spec, SolverSettings::default(), Some(grid), None), Err(Failure::Usage(_))));
    }

    #[test]
    fn zero_generator_gives_zero_residual() {
        let spec = builtin_problem("noether_gamma", &BuiltinParams::default()).unwrap();
        let grid = GridArg { interval: None, n: 201 };
        let r = noether(spec, SolverSettings::default(), Some(grid), &["const:0".into()], None, 5e-2).unwrap();
        assert!(r.passed);
        assert_eq!(r.summary["noether_residual"]["residual"]["components"][0]["linf"], 0.0);
        assert_eq!(r.tables.len(), 1);
    }
}
