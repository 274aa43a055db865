use std::f64::consts::PI;

use fracvar_core::approx::{
    build_reduced_lagrangian, emit_comparison, reduced_el_residual, solve_reduced_herglotz, ExpansionSpec, SolverSettings,
};
use fracvar_core::config::parse_config;
use fracvar_core::expr::{builtin_problem, BoundaryCondition, BuiltinParams, LagrangianDef, ProblemSpec};
use fracvar_core::herglotz::{
    directional_derivative, el_residual, higher_order_el_residual, higher_order_transversality, solve_z, HerglotzProblem,
};
use fracvar_core::noether::{constant_of_motion, cyclic_trajectory, noether_residual, TransformationFamily};
use fracvar_core::special::gamma;
use fracvar_core::{Grid, SampledFunction};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn problem(name: &str, n: usize) -> HerglotzProblem {
    let spec = builtin_problem(name, &BuiltinParams::default()).unwrap();
    HerglotzProblem::new(&spec, Grid::new(0.0, 1.0, n).unwrap()).unwrap()
}

fn sample(g: &Grid, f: impl Fn(f64) -> f64) -> Vec<SampledFunction> {
    vec![SampledFunction::from_fn(g, f)]
}

#[test]
fn variation_routes_agree_on_random_pairs() {
    let mut rng = StdRng::seed_from_u64(20_240_917);
    for name in ["example1", "example2"] {
        let p = problem(name, 2001);
        for _ in 0..10 {
            let (c1, c2, c3): (f64, f64, f64) = (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-0.5..0.5));
            let (e0, e1, e2): (f64, f64, f64) = (rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0), rng.random_range(-1.0..1.0));
            // x(0) = 0, x(1) = 1 and eta vanishing at both ends
            let x = sample(&p.grid, |t| t + c1 * t * (1.0 - t) + c2 * (PI * t).sin() + c3 * t * t * (1.0 - t));
            let eta = sample(&p.grid, |t| t * (1.0 - t) * (e0 + e1 * t + e2 * (2.0 * t).cos()));
            let rep = directional_derivative(&p, &x, &eta).unwrap();
            assert!(rep.relative_gap() <= 1e-4, "{name}: {rep:?}");
            assert_eq!(rep.theta.first(), 0.0);
        }
    }
}

#[test]
fn extremal_has_vanishing_first_variation() {
    let p = problem("example1", 2001);
    let x = sample(&p.grid, |t| t * t);
    let etas: [fn(f64) -> f64; 5] = [
        |t| t * (1.0 - t),
        |t| t * t * (1.0 - t),
        |t| t * (1.0 - t) * (1.0 - t),
        |t| t * (1.0 - t) * (t - 0.3),
        |t| 4.0 * t * (1.0 - t).powi(3) - t * t * (1.0 - t),
    ];
    for eta in etas {
        let rep = directional_derivative(&p, &x, &sample(&p.grid, eta)).unwrap();
        assert!(rep.theta_b().abs() <= 1e-4, "{rep:?}");
    }
}

#[test]
fn lambda_is_positive_and_starts_at_one() {
    for name in ["example1", "example2", "noether_gamma"] {
        let p = problem(name, 501);
        let traj = solve_z(&p, &sample(&p.grid, |t| t * t)).unwrap();
        assert_eq!(traj.lambda.first(), 1.0);
        assert!(traj.lambda.values().iter().all(|&l| l > 0.0));
    }
}

/// `tD^1.5_1 g` for `g = c t^1.5`: second derivative of the right integral of
/// order 1/2, itself evaluated by composite Simpson after `s = t + u^2`.
fn higher_order_oracle(t: f64, c: f64) -> f64 {
    let j = |t: f64| {
        let top = (1.0 - t).sqrt();
        let m = 4000;
        let hu = top / m as f64;
        let f = |u: f64| 2.0 * (t + u * u).powf(1.5);
        let mut acc = f(0.0) + f(top);
        for i in 1..m {
            acc += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i as f64 * hu);
        }
        c * acc * hu / 3.0 / gamma(0.5).unwrap()
    };
    let d = 1e-3;
    (j(t + d) - 2.0 * j(t) + j(t - d)) / (d * d)
}

#[test]
fn higher_order_residual_matches_quadrature_oracle() {
    let lag = LagrangianDef::new("pow(d1, 2)", 1, vec![1.5]).unwrap();
    let spec = ProblemSpec::new("cube", lag, (0.0, 1.0), 0.0, vec![0.0], vec![BoundaryCondition::Free]).unwrap();
    let p = HerglotzProblem::new(&spec, Grid::new(0.0, 1.0, 1001).unwrap()).unwrap();
    let x = vec![SampledFunction::from_fn_with_derivs(&p.grid, |t| t.powi(3), &[&|t| 3.0 * t * t, &|t| 6.0 * t])];
    let traj = solve_z(&p, &x).unwrap();
    let rep = higher_order_el_residual(&p, &traj).unwrap();
    assert!(rep.stated_without_proof);
    let c = 2.0 * gamma(4.0).unwrap() / gamma(2.5).unwrap();
    let samples = &rep.components[0].samples;
    let n = p.grid.len();
    let mut worst = 0.0_f64;
    for k in (rep.trim..n - rep.trim).step_by(10) {
        let t = p.grid.node(k);
        let oracle = higher_order_oracle(t, c);
        worst = worst.max((samples[k] - oracle).abs() / oracle.abs().max(1.0));
    }
    assert!(worst <= 5e-2, "{worst}");
    let entries = higher_order_transversality(&p, &traj).unwrap();
    assert_eq!(entries[0].0, 1);
    assert_eq!(entries[0].1.len(), 2);
}

#[test]
fn classical_limit_away_from_the_onset_layer() {
    let lag = LagrangianDef::new("pow(d1, 2)/2 + x1*0 - 0*z", 1, vec![0.999]).unwrap();
    let spec = ProblemSpec::new("classical", lag, (0.0, 1.0), 0.0, vec![0.0], vec![BoundaryCondition::Fixed(1.0)]).unwrap();
    let p = HerglotzProblem::new(&spec, Grid::new(0.0, 1.0, 2001).unwrap()).unwrap();
    let traj = solve_z(&p, &sample(&p.grid, |t| t)).unwrap();
    let rep = el_residual(&p, &traj).unwrap();
    // D^0.999 t = t^0.001 / Gamma(1.001) turns on over a layer of width ~h at t = 0
    assert!(rep.components[0].linf_window(&p.grid, 0.05, 0.95) <= 5e-2);
}

#[test]
fn reduced_solver_tracks_the_extremal() {
    let p = problem("example3", 2001);
    let spec = ExpansionSpec::new(1, 0.0, 0.5).unwrap();
    let red = build_reduced_lagrangian(&p.lagrangian, spec, 0.0).unwrap();
    let res = solve_reduced_herglotz(&red, &p, &SolverSettings::default()).unwrap();
    assert!(res.mismatch <= 1e-8);
    let exact = SampledFunction::from_fn(&p.grid, |t| t * t);
    let cmp = emit_comparison(&res, Some(&exact)).unwrap();
    // frozen from the first verified run (0.0278)
    assert!(cmp.linf.unwrap() <= 0.03, "{:?}", cmp.linf);
    let self_consistency = reduced_el_residual(&red, &res).unwrap().iter().fold(0.0_f64, |m, r| m.max(r.abs()));
    assert!(self_consistency <= 1e-6, "{self_consistency}");

    // the final bracket isolates a monotone mismatch
    let mut inside: Vec<(f64, f64)> =
        res.history.iter().copied().filter(|(s, _)| *s >= res.bracket.0 && *s <= res.bracket.1).collect();
    inside.sort_by(|a, b| a.0.total_cmp(&b.0));
    let increasing = inside.windows(2).all(|w| w[1].1 >= w[0].1);
    let decreasing = inside.windows(2).all(|w| w[1].1 <= w[0].1);
    assert!(increasing || decreasing);
}

#[test]
fn conserved_quantity_flattens_under_refinement() {
    let flat = |n: usize| {
        let p = problem("noether_gamma", n);
        let (sol, traj) = cyclic_trajectory(&p, &SolverSettings::default()).unwrap();
        assert!(sol.mismatch <= 1e-8);
        let c = constant_of_motion(&p, &traj, 0).unwrap();
        let rep = noether_residual(&p, &traj, &TransformationFamily::constant(1, 1.0)).unwrap();
        assert!(rep.residual.linf() <= 10.0 * rep.el.linf());
        c.relative_flatness()
    };
    let (coarse, fine) = (flat(1001), flat(2001));
    assert!(fine <= 5e-2, "{fine}");
    assert!(fine < coarse, "{coarse} {fine}");
}

#[test]
fn report_serializes_with_documented_fields() {
    let p = problem("example1", 201);
    let traj = solve_z(&p, &sample(&p.grid, |t| t * t)).unwrap();
    let v = serde_json::to_value(el_residual(&p, &traj).unwrap()).unwrap();
    for key in ["h", "trim", "components"] {
        assert!(v.get(key).is_some(), "{key}");
    }
    assert_eq!(v["trim"], 2);
    let comp = &v["components"][0];
    assert!(comp["linf"].is_f64() && comp["l2"].is_f64());
    assert!(comp.get("samples").is_none());
}

#[test]
fn config_file_drives_the_residual_pipeline() {
    let text = r#"
name = "from-file"
dimension = 1
orders = [0.5]
interval = [0, 1]
lagrangian = "pow(d1 - 2/gamma(2.5)*pow(t,1.5), 2)"
bc.left = [0]
bc.right = ["free"]
"#;
    let cfg = parse_config(text).unwrap();
    let p = HerglotzProblem::new(&cfg.problem, Grid::new(0.0, 1.0, 1001).unwrap()).unwrap();
    let traj = solve_z(&p, &sample(&p.grid, |t| t * t)).unwrap();
    let rep = el_residual(&p, &traj).unwrap();
    assert!(rep.linf() <= 5e-2);
    assert!(rep.components[0].transversality.as_ref().unwrap()[0].abs() <= 1e-2);
}
