use approx::assert_abs_diff_eq;
use compact_conserve::analysis::{modified_wavenumber, quadrature_rule, NodeSelector};
use compact_conserve::operator::{apply_along_axis, FieldAxis};
use compact_conserve::pde::conservation_identity_residual;
use compact_conserve::scheme::{
    verify_conservation_identities, verify_order_conditions, SchemeId,
};
use compact_conserve::schemefile::{Provenance, SchemeFile};
use compact_conserve::{assemble_matrices, build_operator, bundled, close_scheme, Grid};
use ndarray::Array2;
use proptest::prelude::*;

fn scheme_id() -> impl Strategy<Value = SchemeId> {
    prop_oneof![Just(SchemeId::P1), Just(SchemeId::P2), Just(SchemeId::P3)]
}

/// Published free parameters scaled componentwise by factors in [0.9, 1.1].
fn perturbed_params() -> impl Strategy<Value = (SchemeId, Vec<f64>)> {
    scheme_id().prop_flat_map(|id| {
        let base = bundled(id).free_params();
        proptest::collection::vec(0.9f64..1.1, base.len())
            .prop_map(move |f| (id, base.iter().zip(f).map(|(b, s)| b * s).collect()))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn closed_schemes_satisfy_every_constraint((id, params) in perturbed_params(), n in 10usize..60) {
        let Ok(scheme) = close_scheme(id, &params) else { return Ok(()) };
        let scale = scheme
            .named_coefficients()
            .iter()
            .fold(1.0f64, |m, (_, v)| m.max(v.abs()));
        let order = verify_order_conditions(&scheme);
        prop_assert!(order.max() <= 1e-12 * scale, "order residual {}", order.max());
        let m = assemble_matrices(&scheme, &Grid::unit_spacing(n).unwrap()).unwrap();
        let cons = verify_conservation_identities(&m);
        prop_assert!(cons.max() <= 1e-12 * scale, "conservation residual {}", cons.max());
    }

    #[test]
    fn conservation_identity_for_random_states(
        id in scheme_id(),
        n in 10usize..120,
        seed in proptest::collection::vec(-1.0f64..1.0, 121),
        amplitude in 1e-3f64..1e3,
    ) {
        let m = assemble_matrices(&bundled(id), &Grid::unit_spacing(n).unwrap()).unwrap();
        let f: Vec<f64> = seed[..=n].iter().map(|v| v * amplitude).collect();
        let norm = f.iter().fold(0.0f64, |s, v| s.max(v.abs()));
        prop_assert!(conservation_identity_residual(&m, &f) <= 1e-10 * norm.max(f64::MIN_POSITIVE));
    }

    #[test]
    fn operator_is_linear(
        id in scheme_id(),
        f in proptest::collection::vec(-1.0f64..1.0, 41),
        g in proptest::collection::vec(-1.0f64..1.0, 41),
        alpha in -3.0f64..3.0,
        beta in -3.0f64..3.0,
    ) {
        let grid = Grid::new(40, 2.0).unwrap();
        let op = build_operator(assemble_matrices(&bundled(id), &grid).unwrap(), grid.spacing()).unwrap();
        let combo: Vec<f64> = f.iter().zip(&g).map(|(a, b)| alpha * a + beta * b).collect();
        let lhs = op.apply(&combo).unwrap();
        let (df, dg) = (op.apply(&f).unwrap(), op.apply(&g).unwrap());
        let scale = lhs.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        for i in 0..41 {
            prop_assert!((lhs[i] - (alpha * df[i] + beta * dg[i])).abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn solve_reproduces_rhs(id in scheme_id(), y in proptest::collection::vec(-1.0f64..1.0, 51)) {
        let grid = Grid::new(50, 1.0).unwrap();
        let op = build_operator(assemble_matrices(&bundled(id), &grid).unwrap(), grid.spacing()).unwrap();
        let mut x = y.clone();
        op.solve_a(&mut x);
        let back = op.matrices().a_times(&x);
        let scale = y.iter().fold(f64::MIN_POSITIVE, |m, v| m.max(v.abs()));
        for (b, v) in back.iter().zip(&y) {
            prop_assert!((b - v).abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn scheme_file_round_trip((id, params) in perturbed_params()) {
        let Ok(scheme) = close_scheme(id, &params) else { return Ok(()) };
        let file = SchemeFile::from_definition(&scheme, Provenance::Optimized, Default::default());
        let back = SchemeFile::from_json(&file.to_json()).unwrap().to_definition().unwrap();
        prop_assert_eq!(back, scheme);
    }
}

#[test]
fn monomials_up_to_cubic_are_exact() {
    for id in SchemeId::ALL {
        let grid = Grid::new(32, 1.0).unwrap();
        let op = build_operator(assemble_matrices(&bundled(id), &grid).unwrap(), grid.spacing()).unwrap();
        for p in 0..=3 {
            let f: Vec<f64> = grid.nodes().iter().map(|x| x.powi(p)).collect();
            let df = op.apply(&f).unwrap();
            for (x, d) in grid.nodes().iter().zip(df) {
                let exact = if p == 0 { 0.0 } else { p as f64 * x.powi(p - 1) };
                assert!((d - exact).abs() <= 1e-8, "{id} p={p} x={x}: {d} vs {exact}");
            }
        }
    }
}

#[test]
fn rank_one_fields_factor() {
    let gx = Grid::new(24, 1.0).unwrap();
    let gy = Grid::new(30, 2.0).unwrap();
    let ox = build_operator(assemble_matrices(&bundled(SchemeId::P1), &gx).unwrap(), gx.spacing()).unwrap();
    let oy = build_operator(assemble_matrices(&bundled(SchemeId::P3), &gy).unwrap(), gy.spacing()).unwrap();
    let u: Vec<f64> = gx.nodes().iter().map(|x| (3.0 * x).sin()).collect();
    let v: Vec<f64> = gy.nodes().iter().map(|y| (0.7 * y).cos() + y * y).collect();
    let field = Array2::from_shape_fn((v.len(), u.len()), |(j, i)| u[i] * v[j]);
    let (du, dv) = (ox.apply(&u).unwrap(), oy.apply(&v).unwrap());

    let dx = apply_along_axis(&ox, &oy, field.view(), FieldAxis::X).unwrap();
    let dy = apply_along_axis(&ox, &oy, field.view(), FieldAxis::Y).unwrap();
    for ((j, i), d) in dx.indexed_iter() {
        assert_abs_diff_eq!(*d, du[i] * v[j], epsilon = 1e-10);
    }
    for ((j, i), d) in dy.indexed_iter() {
        assert_abs_diff_eq!(*d, u[i] * dv[j], epsilon = 1e-10);
    }

    // lines that are constant along y have no y-derivative, up to the rounding
    // carried by the tabulated P3 coefficients
    let layered = Array2::from_shape_fn((v.len(), u.len()), |(_, i)| (std::f64::consts::TAU * gx.nodes()[i]).sin());
    let dy = apply_along_axis(&ox, &oy, layered.view(), FieldAxis::Y).unwrap();
    assert!(dy.iter().all(|d| d.abs() <= 1e-8));
}

#[test]
fn assembled_corners_are_mirrored() {
    for id in SchemeId::ALL {
        let m = assemble_matrices(&bundled(id), &Grid::unit_spacing(25).unwrap()).unwrap();
        let n = 25;
        for i in 0..id.depth() {
            for j in 0..4 {
                assert_eq!(m.a(i, j), m.a(n - i, n - j));
                assert_eq!(m.b(i, j), -m.b(n - i, n - j));
            }
        }
        let (a, b) = (m.a_dense(), m.b_dense());
        for i in 0..=n {
            for j in 0..=n {
                if i.abs_diff(j) > 3 {
                    assert_eq!((a[i][j], b[i][j]), (0.0, 0.0));
                }
            }
        }
    }
}

#[test]
fn quadrature_rule_is_reversal_invariant() {
    for id in SchemeId::ALL {
        for n in [20, 31] {
            let rule = quadrature_rule(&bundled(id).weights, n);
            let reversed: Vec<f64> = rule.iter().rev().copied().collect();
            assert_eq!(rule, reversed);
        }
    }
}

#[test]
fn interior_response_is_real() {
    let s = bundled(SchemeId::P2);
    for k in 1..=314 {
        let w = modified_wavenumber(&s, NodeSelector::Interior, k as f64 * 0.01).unwrap();
        assert!(w.im.abs() <= 1e-15, "omega {k}: {w}");
    }
}
