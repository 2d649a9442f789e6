mod common;

use common::{alg, element};
use ncalc::algebra::{Algebra, DeclaredFlags, Element};
use ncalc::Rational;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn multiplication_is_bilinear(
        (a, b, c) in { let o = alg("octonions"); (element(&o), element(&o), element(&o)) },
        p in -9i64..=9, q in 1i64..=5,
    ) {
        let s = Rational::new(p, q);
        let lhs = a.scale(&s).add(&b).unwrap().mul(&c).unwrap();
        prop_assert_eq!(lhs, a.mul(&c).unwrap().scale(&s).add(&b.mul(&c).unwrap()).unwrap());
        let rhs = c.mul(&a.scale(&s).add(&b).unwrap()).unwrap();
        prop_assert_eq!(rhs, c.mul(&a).unwrap().scale(&s).add(&c.mul(&b).unwrap()).unwrap());
    }

    #[test]
    fn commutator_is_antisymmetric((a, b) in { let m = alg("matrices2"); (element(&m), element(&m)) }) {
        prop_assert_eq!(a.commutator(&b).unwrap(), b.commutator(&a).unwrap().neg());
        prop_assert!(a.commutator(&a).unwrap().is_zero());
    }

    #[test]
    fn associator_vanishes_in_associative_algebras(
        (a, b, c) in { let h = alg("quaternions"); (element(&h), element(&h), element(&h)) },
        (m1, m2, m3) in { let m = alg("matrices2"); (element(&m), element(&m), element(&m)) },
    ) {
        prop_assert!(a.associator(&b, &c).unwrap().is_zero());
        prop_assert!(m1.associator(&m2, &m3).unwrap().is_zero());
    }

    #[test]
    fn octonions_are_alternative((a, b) in { let o = alg("octonions"); (element(&o), element(&o)) }) {
        prop_assert!(a.associator(&a, &b).unwrap().is_zero());
        prop_assert!(a.associator(&b, &b).unwrap().is_zero());
        prop_assert!(a.associator(&b, &a).unwrap().is_zero());
    }

    #[test]
    fn octonion_norm_is_multiplicative((a, b) in { let o = alg("octonions"); (element(&o), element(&o)) }) {
        let prod = a.mul(&b).unwrap().norm().value();
        let expected = a.norm().value() * b.norm().value();
        prop_assert!((prod - expected).abs() <= 1e-12 * expected.max(1.0));
        let sum = a.add(&b).unwrap().norm().value();
        prop_assert!(sum <= a.norm().value() + b.norm().value() + 1e-12);
    }

    #[test]
    fn nonzero_octonions_invert(a in element(&alg("octonions"))) {
        prop_assume!(!a.is_zero());
        let inv = a.inverse().unwrap();
        let one = Element::one(a.algebra());
        prop_assert_eq!(a.mul(&inv).unwrap(), one.clone());
        prop_assert_eq!(inv.mul(&a).unwrap(), one);
    }

    #[test]
    fn float_conversion_commutes_with_products((a, b) in { let h = alg("quaternions"); (element(&h), element(&h)) }) {
        let fh = std::sync::Arc::new(a.algebra().to_float());
        let exact = a.mul(&b).unwrap().to_float(&fh);
        let float = a.to_float(&fh).mul(&b.to_float(&fh)).unwrap();
        prop_assert!(exact.approx_eq(&float, 1e-12));
    }
}

#[test]
fn builtin_flags() {
    let expect = [
        ("reals", [true, true, true, true]),
        ("complex", [true, true, true, true]),
        ("quaternions", [true, true, true, true]),
        ("octonions", [true, false, true, true]),
        ("matrices2", [true, true, false, false]),
        ("dual", [true, true, false, false]),
    ];
    for (name, [unital, assoc, norm, div]) in expect {
        let f = alg(name).flags();
        assert_eq!([f.unital, f.associative, f.multiplicative_norm, f.division], [unital, assoc, norm, div], "{name}");
    }
}

#[test]
fn false_flag_claims_are_rejected() {
    let o = alg("octonions");
    let entries: Vec<(usize, usize, usize, Rational)> = o.sparse_constants().to_vec();
    let claim = DeclaredFlags { associative: Some(true), ..DeclaredFlags::default() };
    let r = Algebra::from_constants("bad", o.basis().to_vec(), entries, claim, vec![]);
    assert!(r.is_err());
}

#[test]
fn associator_witness_on_octonion_basis() {
    let o = alg("octonions");
    let (k, l, m) = o.associator_counterexample().expect("octonions are not associative");
    let e = |i| Element::<Rational>::basis(&o, i);
    assert!(!e(k).associator(&e(l), &e(m)).unwrap().is_zero());
    assert!(alg("quaternions").associator_counterexample().is_none());
}
