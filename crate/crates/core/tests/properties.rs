use fracvar_core::expr::{evaluate, parse, partial, BinOp, EvalPoint, Expr, Func, Slot, Var};
use fracvar_core::frac_ops::{
    left_caputo_deriv, left_rl_deriv, left_rl_integral, right_caputo_deriv, right_rl_differintegral, right_rl_integral,
    DifferintegralOrder, FractionalOrder,
};
use fracvar_core::{Grid, SampledFunction};
use proptest::prelude::*;
use proptest::sample::select;

fn arb_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (0.1f64..3.0).prop_map(Expr::Const),
        Just(Expr::Var(Var::T)),
        Just(Expr::Var(Var::X(1))),
        Just(Expr::Var(Var::D(1))),
        Just(Expr::Var(Var::Z)),
    ];
    leaf.prop_recursive(6, 48, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|e| Expr::Neg(Box::new(e))),
            (select(vec![BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div]), inner.clone(), inner.clone())
                .prop_map(|(op, l, r)| Expr::bin(op, l, r)),
            (select(vec![Func::Exp, Func::Ln, Func::Sin, Func::Cos, Func::Sqrt, Func::Gamma]), inner.clone())
                .prop_map(|(f, a)| Expr::call(f, vec![a])),
            (inner.clone(), select(vec![2.0, 3.0, 0.5, 1.5, -1.0]))
                .prop_map(|(a, p)| Expr::call(Func::Pow, vec![a, Expr::Const(p)])),
            (inner.clone(), inner).prop_map(|(a, b)| Expr::call(Func::Pow, vec![a, b])),
        ]
    })
}

fn point(c: [f64; 4]) -> EvalPoint {
    EvalPoint { t: c[0], x: vec![c[1]], d: vec![c[2]], z: c[3] }
}

fn shifted(p: &EvalPoint, slot: Slot, by: f64) -> EvalPoint {
    let mut q = p.clone();
    match slot {
        Slot::T => q.t += by,
        Slot::X(_) => q.x[0] += by,
        Slot::D(_) => q.d[0] += by,
        Slot::Z => q.z += by,
    }
    q
}

fn central(e: &Expr, p: &EvalPoint, slot: Slot, h: f64) -> Option<f64> {
    let up = evaluate(e, &shifted(p, slot, h)).ok()?;
    let dn = evaluate(e, &shifted(p, slot, -h)).ok()?;
    Some((up - dn) / (2.0 * h))
}

const SLOTS: [Slot; 4] = [Slot::T, Slot::X(0), Slot::D(0), Slot::Z];

proptest! {
    #![proptest_config(ProptestConfig { cases: 100, max_global_rejects: 20_000, ..ProptestConfig::default() })]

    #[test]
    fn dual_gradient_matches_central_differences(e in arb_expr(), c in prop::array::uniform4(0.2f64..1.5)) {
        let p = point(c);
        let v = evaluate(&e, &p);
        prop_assume!(v.as_ref().is_ok_and(|v| v.is_finite() && v.abs() < 1e3));
        for slot in SLOTS {
            let fd = central(&e, &p, slot, 1e-6);
            let fd_half = central(&e, &p, slot, 5e-7);
            // a point is non-singular when the stencil stays in the domain and is resolved
            let (Some(fd), Some(fd_half)) = (fd, fd_half) else { continue };
            if (fd - fd_half).abs() > 1e-7 * (1.0 + fd.abs()) {
                continue;
            }
            let (val, d) = partial(&e, &p, slot).unwrap();
            prop_assert_eq!(val.to_bits(), v.as_ref().unwrap().to_bits());
            prop_assert!((d - fd).abs() <= 1e-5 * (1.0 + fd.abs()), "{e} at {p:?}, {slot:?}: dual {d}, fd {fd}");
        }
    }

    #[test]
    fn print_then_parse_is_identity(e in arb_expr()) {
        let text = e.to_string();
        prop_assert_eq!(parse(&text).unwrap(), e, "{}", text);
    }

    #[test]
    fn evaluation_is_deterministic(e in arb_expr(), c in prop::array::uniform4(0.2f64..1.5)) {
        let p = point(c);
        match (evaluate(&e, &p), evaluate(&e, &p)) {
            (Ok(a), Ok(b)) => prop_assert_eq!(a.to_bits(), b.to_bits()),
            (Err(a), Err(b)) => prop_assert_eq!(a, b),
            _ => prop_assert!(false, "outcomes differ"),
        }
    }

    #[test]
    fn operators_are_linear(
        n in 8usize..300,
        cf in prop::array::uniform4(-2.0f64..2.0),
        cg in prop::array::uniform4(-2.0f64..2.0),
        c1 in -3.0f64..3.0,
        c2 in -3.0f64..3.0,
        alpha in 0.05f64..0.95,
    ) {
        let g = Grid::new(0.0, 1.0, n).unwrap();
        let smooth = |c: [f64; 4]| SampledFunction::from_fn(&g, move |t| c[0] + c[1] * t + c[2] * (3.0 * t).sin() + c[3] * t.exp());
        let (f, h) = (smooth(cf), smooth(cg));
        let mix = f.lin_comb(c1, &h, c2).unwrap();
        let o = FractionalOrder::new(alpha).unwrap();
        // rounding scale: size of the terms the discrete operator sums, i.e. the
        // input magnitude, divided by h where a difference stencil is applied
        let input = c1.abs() * f.sup_norm() + c2.abs() * h.sup_norm() + mix.sup_norm();
        let inv_h = 1.0 / g.step();
        type Op = Box<dyn Fn(&SampledFunction) -> SampledFunction>;
        let ops: Vec<(&str, f64, Op)> = vec![
            ("li", 1.0, Box::new(move |s| left_rl_integral(s, o))),
            ("ri", 1.0, Box::new(move |s| right_rl_integral(s, o))),
            ("lcd", inv_h, Box::new(move |s| left_caputo_deriv(s, o).unwrap())),
            ("rcd", inv_h, Box::new(move |s| right_caputo_deriv(s, o).unwrap())),
            ("rld", inv_h, Box::new(move |s| right_rl_differintegral(s, DifferintegralOrder::new(alpha)).unwrap())),
            ("lrd", inv_h, Box::new(move |s| left_rl_deriv(s, o).unwrap())),
        ];
        for (name, stencil, op) in &ops {
            let (of, oh, om) = (op(&f), op(&h), op(&mix));
            let scale = input * stencil;
            for k in 0..n {
                let gap = (om.values()[k] - c1 * of.values()[k] - c2 * oh.values()[k]).abs();
                prop_assert!(gap <= 8.0 * f64::EPSILON * scale, "{name} node {k}: {gap:e} vs scale {scale:e}");
            }
        }
    }
}
