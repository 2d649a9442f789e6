#![allow(dead_code)]

use std::sync::Arc;

use ncalc::algebra::{builtin, Algebra, Element};
use ncalc::expr::Expr;
use ncalc::Rational;
use proptest::prelude::*;

pub fn alg(name: &str) -> Arc<Algebra<Rational>> {
    Arc::new(builtin(name).unwrap())
}

/// Coordinates `p/q` with `|p| <= 6`, `1 <= q <= 4`.
pub fn element(a: &Arc<Algebra<Rational>>) -> impl Strategy<Value = Element<Rational>> {
    let a = Arc::clone(a);
    prop::collection::vec((-6i64..=6, 1i64..=4), a.dim())
        .prop_map(move |v| Element::new(&a, v.into_iter().map(|(p, q)| Rational::new(p, q)).collect()).unwrap())
}

/// Small integer coordinates, for constants inside polynomials.
pub fn small_element(a: &Arc<Algebra<Rational>>) -> impl Strategy<Value = Element<Rational>> {
    let a = Arc::clone(a);
    prop::collection::vec(-2i64..=2, a.dim()).prop_map(move |v| Element::from_ints(&a, &v).unwrap())
}

/// `a0 x a1 ... x an` with `n` in `degrees`.
pub fn monomial(a: &Arc<Algebra<Rational>>, degrees: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Expr<Rational>> {
    let a = Arc::clone(a);
    degrees.prop_flat_map(move |n| prop::collection::vec(small_element(&a), n + 1)).prop_map(|c| Expr::monomial(&c))
}

/// Sum of up to three monomials of degree at most `max_degree`.
pub fn polynomial(a: &Arc<Algebra<Rational>>, max_degree: usize) -> impl Strategy<Value = Expr<Rational>> {
    prop::collection::vec(monomial(a, 0..=max_degree), 1..=3).prop_map(Expr::Sum)
}

pub fn float(e: &Element<Rational>, fa: &Arc<Algebra<f64>>) -> Element<f64> {
    e.to_float(fa)
}
