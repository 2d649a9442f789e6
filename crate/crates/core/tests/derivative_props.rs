mod common;

use std::sync::Arc;

use common::{alg, element, monomial, polynomial};
use ncalc::algebra::Element;
use ncalc::expr::Expr;
use ncalc::form::{derivative, derivative_recursive, expressions_equal, taylor, MultilinearForm};
use ncalc::{Rational, Scalar, SymmetryClass};
use proptest::prelude::*;

fn factorial(n: usize) -> Rational {
    (1..=n as i64).fold(Rational::one(), |acc, k| acc * Rational::new(k, 1))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn injection_sum_matches_repeated_differentiation(p in monomial(&alg("quaternions"), 0..=4), m in 1usize..=4) {
        let h = alg("quaternions");
        prop_assert!(derivative(&p, &h, m).unwrap().equal(&derivative_recursive(&p, &h, m).unwrap()).unwrap());
    }

    #[test]
    fn derivatives_of_polynomials_are_symmetric(p in polynomial(&alg("quaternions"), 3)) {
        let h = alg("quaternions");
        for m in 1..=3 {
            prop_assert_eq!(derivative(&p, &h, m).unwrap().symmetry_class().class, SymmetryClass::Symmetric);
        }
        prop_assert!(derivative(&p, &h, 4).unwrap().canonical_expand().unwrap().is_zero());
    }

    #[test]
    fn top_derivative_on_the_diagonal(p in monomial(&alg("quaternions"), 1..=4), y in element(&alg("quaternions"))) {
        let h = alg("quaternions");
        let n = p.degree().unwrap();
        let d = derivative(&p, &h, n).unwrap();
        let diag = d.eval(&y, &vec![y.clone(); n]).unwrap();
        prop_assert_eq!(diag, p.eval(&y).unwrap().scale(&factorial(n)));
    }

    #[test]
    fn lower_derivatives_vanish_at_zero(p in monomial(&alg("quaternions"), 2..=4), dir in element(&alg("quaternions"))) {
        let h = alg("quaternions");
        let n = p.degree().unwrap();
        let zero = Element::zero(&h);
        for m in 1..n {
            let d = derivative(&p, &h, m).unwrap();
            prop_assert!(d.eval(&zero, &vec![dir.clone(); m]).unwrap().is_zero());
        }
    }

    #[test]
    fn taylor_reconstructs_polynomials(p in polynomial(&alg("complex"), 4), x0 in element(&alg("complex"))) {
        prop_assert!(expressions_equal(&taylor(&p, &x0).unwrap(), &p, &alg("complex")).unwrap());
    }

    #[test]
    fn taylor_reconstructs_quaternion_polynomials(p in polynomial(&alg("quaternions"), 3), x0 in element(&alg("quaternions"))) {
        prop_assert!(expressions_equal(&taylor(&p, &x0).unwrap(), &p, &alg("quaternions")).unwrap());
    }

    #[test]
    fn chain_rule_through_substitution(
        p in monomial(&alg("quaternions"), 1..=3),
        q in monomial(&alg("quaternions"), 1..=2),
    ) {
        // d(p∘q)(x)h = dp(q(x))(dq(x)h)
        let h = alg("quaternions");
        let lhs = derivative(&p.compose(&q), &h, 1).unwrap();
        let q_form = MultilinearForm::from_expr(&q, &h).unwrap();
        let dq = derivative(&q, &h, 1).unwrap();
        let rhs = derivative(&p, &h, 1).unwrap().substitute(&q_form, &[dq], 1);
        prop_assert!(lhs.equal(&rhs).unwrap());
    }

    #[test]
    fn derivative_is_linear(p in polynomial(&alg("quaternions"), 3), q in polynomial(&alg("quaternions"), 3)) {
        let h = alg("quaternions");
        let sum = Expr::Sum(vec![p.clone(), q.clone()]);
        let lhs = derivative(&sum, &h, 2).unwrap();
        let rhs = derivative(&p, &h, 2).unwrap().add(&derivative(&q, &h, 2).unwrap());
        prop_assert!(lhs.equal(&rhs).unwrap());
    }

    #[test]
    fn infinitesimal_order_of_the_remainder(p in monomial(&alg("quaternions"), 2..=3), x in element(&alg("quaternions")), dir in element(&alg("quaternions"))) {
        // p(x + t h) - p(x) - t dp(x)h is O(t^2): exactly t^2 times something bounded
        prop_assume!(!dir.is_zero());
        let h = alg("quaternions");
        let dp = derivative(&p, &h, 1).unwrap();
        let linear = dp.eval(&x, std::slice::from_ref(&dir)).unwrap();
        let mut ratios = Vec::new();
        for k in [10i64, 100, 1000] {
            let t = Rational::new(1, k);
            let shifted = x.add(&dir.scale(&t)).unwrap();
            let rem = p.eval(&shifted).unwrap().sub(&p.eval(&x).unwrap()).unwrap().sub(&linear.scale(&t)).unwrap();
            ratios.push(rem.norm().value() * (k * k) as f64);
        }
        let bound = ratios[0].max(1.0) * 2.0;
        prop_assert!(ratios.iter().all(|r| *r <= bound), "{ratios:?}");
    }
}

#[test]
fn inverse_derivative_is_symmetric_and_matches_closed_form() {
    let h = alg("quaternions");
    let inv = Expr::inv(Expr::var());
    let d1 = derivative(&inv, &h, 1).unwrap();
    assert_eq!(d1.to_string(), "-inv(x)·h·inv(x)");
    let d2 = derivative(&inv, &h, 2).unwrap();
    assert_eq!(d2.symmetry_class().class, SymmetryClass::Symmetric);
    // at x = 1 the second derivative is h1 h2 + h2 h1
    let one = Element::one(&h);
    let (a, b) = (Element::basis(&h, 1), Element::basis(&h, 2));
    let value = d2.eval(&one, &[a.clone(), b.clone()]).unwrap();
    assert_eq!(value, a.mul(&b).unwrap().add(&b.mul(&a).unwrap()).unwrap());
    let stepwise = MultilinearForm::from_expr(&inv, &h).unwrap().differentiate().differentiate();
    assert_eq!(stepwise.eval(&one, &[a.clone(), b.clone()]).unwrap(), value);
}

#[test]
fn float_and_exact_paths_agree() {
    let h = alg("quaternions");
    let fh = Arc::new(h.to_float());
    let p = ncalc::parse_expr("i*x*j*x + x*x*x", &h).unwrap();
    let exact = derivative(&p, &h, 2).unwrap();
    let float = derivative(&p.to_float(&fh), &fh, 2).unwrap();
    let x = Element::from_ints(&h, &[1, -2, 0, 3]).unwrap();
    let dirs = [Element::from_ints(&h, &[0, 1, 1, 0]).unwrap(), Element::from_ints(&h, &[2, 0, 0, -1]).unwrap()];
    let fdirs: Vec<_> = dirs.iter().map(|d| d.to_float(&fh)).collect();
    let e = exact.eval(&x, &dirs).unwrap().to_float(&fh);
    assert!(e.approx_eq(&float.eval(&x.to_float(&fh), &fdirs).unwrap(), 1e-9));
}
