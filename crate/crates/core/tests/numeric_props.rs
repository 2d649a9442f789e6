use std::sync::Arc;

use ncalc::algebra::{builtin, Algebra, Element};
use ncalc::form::derivative;
use ncalc::numeric::{central_difference, compare_at, fd_differential, jacobian, NumericMap};
use ncalc::parse_expr;
use proptest::prelude::*;

fn quaternions() -> Arc<Algebra<f64>> {
    Arc::new(builtin("quaternions").unwrap().to_float())
}

fn point() -> impl Strategy<Value = Element<f64>> {
    let h = quaternions();
    prop::collection::vec(-2.0f64..2.0, 4)
        .prop_filter("away from zero", |v| v.iter().map(|c| c * c).sum::<f64>() > 0.0625)
        .prop_map(move |v| Element::new(&h, v).unwrap())
}

fn direction() -> impl Strategy<Value = Element<f64>> {
    let h = quaternions();
    prop::collection::vec(-1.0f64..1.0, 4)
        .prop_filter("nonzero", |v| v.iter().map(|c| c * c).sum::<f64>() > 0.01)
        .prop_map(move |v| Element::new(&h, v).unwrap())
}

const TABLE: [&str; 5] = ["x*x", "i*x*j", "inv(x)", "x*i*inv(x)", "x*x*x + k*x"];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn symbolic_derivative_matches_finite_differences(x in point(), h in direction(), which in 0usize..TABLE.len()) {
        let p = parse_expr(TABLE[which], &quaternions()).unwrap();
        let s = compare_at(&p, &x, &h).unwrap();
        prop_assert!(s.pass, "{}: rel {} abs {}", TABLE[which], s.rel_error, s.abs_error);
    }

    #[test]
    fn central_difference_error_is_second_order(x in point(), h in direction()) {
        let alg = quaternions();
        let p = parse_expr("x*x*x", &alg).unwrap();
        let exact = derivative(&p, &alg, 1).unwrap().eval(&x, &[h.clone()]).unwrap();
        let f = NumericMap::from_expr(p);
        let err = |t: f64| central_difference(&f, &x, &h, t).unwrap().sub(&exact).unwrap().norm().value();
        // for a cubic the error is exactly t^2 times a fixed element
        let (e1, e2) = (err(1e-1), err(5e-2));
        prop_assume!(e1 > 1e-10);
        prop_assert!((e1 / e2 - 4.0).abs() < 0.05, "ratio {}", e1 / e2);
    }

    #[test]
    fn jacobian_columns_are_directional_derivatives(x in point(), h in direction()) {
        let alg = quaternions();
        let p = parse_expr("x*j*inv(x)", &alg).unwrap();
        let j = jacobian(&NumericMap::from_expr(p.clone()), &x).unwrap();
        let via_jacobian = j.apply(h.coords());
        let exact = derivative(&p, &alg, 1).unwrap().eval(&x, &[h.clone()]).unwrap();
        for (a, b) in via_jacobian.iter().zip(exact.coords()) {
            prop_assert!((a - b).abs() < 1e-6 * (1.0 + b.abs()));
        }
    }

    #[test]
    fn sum_and_product_rules(x in point(), h in direction()) {
        let alg = quaternions();
        let f = parse_expr("i*x*x", &alg).unwrap();
        let g = parse_expr("inv(x)*j", &alg).unwrap();
        let df = |e: &ncalc::Expr<f64>| fd_differential(&NumericMap::from_expr(e.clone()), &x, &h).unwrap().value;
        let sum = parse_expr("i*x*x + inv(x)*j", &alg).unwrap();
        prop_assert!(df(&sum).approx_eq(&df(&f).add(&df(&g)).unwrap(), 1e-6));
        let prod = parse_expr("i*x*x*inv(x)*j", &alg).unwrap();
        let expected = df(&f).mul(&g.eval(&x).unwrap()).unwrap().add(&f.eval(&x).unwrap().mul(&df(&g)).unwrap()).unwrap();
        prop_assert!(df(&prod).approx_eq(&expected, 1e-6 * (1.0 + expected.norm().value())));
    }
}

#[test]
fn generator_maps_are_their_own_derivative() {
    let alg = quaternions();
    let conj = NumericMap::generator(&alg, "conj").unwrap();
    let x = Element::new(&alg, vec![0.3, -1.0, 2.0, 0.5]).unwrap();
    let h = Element::new(&alg, vec![1.0, 1.0, -1.0, 0.0]).unwrap();
    let d = fd_differential(&conj, &x, &h).unwrap();
    assert!(d.converged);
    assert!(d.value.approx_eq(&conj.eval(&h).unwrap(), 1e-9));
}
