//! Truncated power series: the exponent with a norm-based remainder bound,
//! the exponent-of-a-sum check, and the word structure of the exponent's
//! higher derivatives.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::algebra::{Algebra, Element};
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::scalar::{Rational, Scalar};

pub const DEFAULT_ORDER: usize = 30;

/// Smallest `K >= 1` with `|ab| <= K |a| |b|`: 1 for algebras with a
/// multiplicative norm, otherwise the Frobenius norm of the constants.
pub fn norm_constant<S: Scalar>(alg: &Algebra<S>) -> f64 {
    if alg.flags().multiplicative_norm {
        return 1.0;
    }
    let frob: f64 = alg.sparse_constants().iter().map(|(_, _, _, c)| c.to_f64().powi(2)).sum::<f64>().sqrt();
    frob.max(1.0)
}

/// Bound on `|Σ_{k>N} x^k/k!|` given `|x|`.
pub fn exp_remainder_bound(norm_x: f64, order: usize, k: f64) -> f64 {
    let r = k * norm_x;
    let mut term = 1.0;
    for j in 1..=order + 1 {
        term *= r / j as f64;
    }
    term * r.exp() / k
}

#[derive(Clone, Debug)]
pub struct ExpResult<S: Scalar> {
    pub value: Element<S>,
    pub order: usize,
    pub remainder_bound: f64,
}

/// `Σ_{k<=N} x^k/k!` by iterated multiplication, `term_k = term_{k-1}·x/k`.
pub fn exp<S: Scalar>(x: &Element<S>, order: usize) -> Result<ExpResult<S>> {
    let alg = x.algebra();
    if !alg.flags().unital {
        return Err(Error::InvalidArgument(format!("{} has no unit", alg.name())));
    }
    let mut term = Element::one(alg);
    let mut sum = term.clone();
    for k in 1..=order {
        term = term.mul(x)?.scale(&(S::one() / S::from_i64(k as i64)));
        sum = sum.add(&term)?;
    }
    let remainder_bound = exp_remainder_bound(x.norm().value(), order, norm_constant(alg));
    Ok(ExpResult { value: sum, order, remainder_bound })
}

/// Partial sums `exp(x, 0..=N)`, used by the ratio test.
pub fn exp_partial_sums<S: Scalar>(x: &Element<S>, order: usize) -> Result<Vec<Element<S>>> {
    let alg = x.algebra();
    let mut term = Element::one(alg);
    let mut sum = term.clone();
    let mut out = vec![sum.clone()];
    for k in 1..=order {
        term = term.mul(x)?.scale(&(S::one() / S::from_i64(k as i64)));
        sum = sum.add(&term)?;
        out.push(sum.clone());
    }
    Ok(out)
}

/// The exponent as layers `x^k/k!`, `k = 0..=N`.
#[derive(Clone, Debug)]
pub struct TruncatedSeries<S: Scalar> {
    pub layers: Vec<Expr<S>>,
    pub order: usize,
    norm_constant: f64,
}

impl<S: Scalar> TruncatedSeries<S> {
    pub fn exponent(alg: &Arc<Algebra<S>>, order: usize) -> Self {
        let mut layers = Vec::with_capacity(order + 1);
        let mut fact = S::one();
        for k in 0..=order {
            if k > 0 {
                fact = fact * S::from_i64(k as i64);
            }
            let mut factors = vec![Expr::Const(Element::scalar(alg, S::one() / fact.clone()))];
            factors.extend(std::iter::repeat_n(Expr::Var, k));
            layers.push(Expr::Prod(factors));
        }
        TruncatedSeries { layers, order, norm_constant: norm_constant(alg) }
    }

    pub fn eval(&self, x: &Element<S>) -> Result<Element<S>> {
        let mut acc = Element::zero(x.algebra());
        for l in &self.layers {
            acc = acc.add(&l.eval(x)?)?;
        }
        Ok(acc)
    }

    pub fn remainder_bound(&self, x: &Element<S>) -> f64 {
        exp_remainder_bound(x.norm().value(), self.order, self.norm_constant)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ExpSumReport {
    pub equal: bool,
    /// `|exp(a+b) - exp(a)exp(b)|`.
    pub difference: f64,
    pub commutator_norm: f64,
    pub order: usize,
    pub tolerance: f64,
    pub remainder_bounds: [f64; 3],
}

impl fmt::Display for ExpSumReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} (|exp(a+b) - exp(a)exp(b)| = {:.3e}, |[a,b]| = {:.3e}, N = {})",
            if self.equal { "equal" } else { "unequal" },
            self.difference,
            self.commutator_norm,
            self.order
        )
    }
}

/// Compares `exp(a+b)` with `exp(a)·exp(b)` at truncation `N`.
pub fn exp_sum_check<S: Scalar>(a: &Element<S>, b: &Element<S>, order: usize, tol: f64) -> Result<ExpSumReport> {
    let s = a.add(b)?;
    let ea = exp(a, order)?;
    let eb = exp(b, order)?;
    let es = exp(&s, order)?;
    let bounds = [ea.remainder_bound, eb.remainder_bound, es.remainder_bound];
    let allowed = tol / 4.0;
    if let Some(&bound) = bounds.iter().find(|&&bd| bd >= allowed) {
        return Err(Error::InsufficientTruncation { order, bound, allowed });
    }
    let difference = es.value.sub(&ea.value.mul(&eb.value)?)?.norm().value();
    Ok(ExpSumReport {
        equal: difference <= tol,
        difference,
        commutator_norm: a.commutator(b)?.norm().value(),
        order,
        tolerance: tol,
        remainder_bounds: bounds,
    })
}

// --- shuffle words -------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    Y,
    H(usize),
}

/// The word `ascending(S) y descending(complement)` for a subset `S` of
/// `{1..n}` given as a bitmask (bit `k-1` for index `k`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ShuffleWord {
    pub n: usize,
    pub subset: u64,
}

impl ShuffleWord {
    pub fn letters(&self) -> Vec<Letter> {
        let mut out: Vec<Letter> = (1..=self.n).filter(|k| self.subset >> (k - 1) & 1 == 1).map(Letter::H).collect();
        out.push(Letter::Y);
        out.extend((1..=self.n).rev().filter(|k| self.subset >> (k - 1) & 1 == 0).map(Letter::H));
        out
    }

    pub fn y_position(&self) -> usize {
        self.subset.count_ones() as usize
    }
}

impl fmt::Display for ShuffleWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in self.letters() {
            match l {
                Letter::Y => write!(f, "y")?,
                Letter::H(k) => write!(f, "h{k}")?,
            }
        }
        Ok(())
    }
}

/// All `2^n` words, ordered by subset bitmask.
pub fn shuffle_words(n: usize) -> Vec<ShuffleWord> {
    assert!(n < 64, "shuffle order too large");
    (0..1u64 << n).map(|subset| ShuffleWord { n, subset }).collect()
}

/// The same words built by inserting `h_k` immediately before or after `y`
/// for `k = 1..=n`.
pub fn shuffle_words_by_insertion(n: usize) -> Vec<Vec<Letter>> {
    let mut words = vec![vec![Letter::Y]];
    for k in 1..=n {
        let mut next = Vec::with_capacity(words.len() * 2);
        for w in &words {
            let y = w.iter().position(|l| *l == Letter::Y).expect("y present");
            let mut before = w.clone();
            before.insert(y, Letter::H(k));
            let mut after = w.clone();
            after.insert(y + 1, Letter::H(k));
            next.push(before);
            next.push(after);
        }
        words = next;
    }
    words
}

/// Sum of all shuffle words with `y = 1` and every slot set to `h`.
pub fn diagonal_shuffle_value<S: Scalar>(n: usize, h: &Element<S>) -> Result<Element<S>> {
    let alg = h.algebra();
    if !alg.flags().unital {
        return Err(Error::InvalidArgument(format!("{} has no unit", alg.name())));
    }
    let one = Element::one(alg);
    let mut acc = Element::zero(alg);
    for w in shuffle_words(n) {
        let mut v = one.clone();
        for l in w.letters() {
            v = v.mul(if l == Letter::Y { &one } else { h })?;
        }
        acc = acc.add(&v)?;
    }
    Ok(acc)
}

// --- free-word comparison ------------------------------------------------------

/// Coefficients of words in two free letters `a`, `b`.
pub type FreeSeries = BTreeMap<String, Rational>;

/// Degree-`n` layer of `exp(a)·exp(b)` in the free algebra.
pub fn product_of_exponents_layer(n: usize) -> FreeSeries {
    let mut out = FreeSeries::new();
    for i in 0..=n {
        let word = "a".repeat(i) + &"b".repeat(n - i);
        out.insert(word, (Rational::factorial(i) * Rational::factorial(n - i)).recip());
    }
    out
}

/// Degree-`n` layer of `exp(a+b)`: every word with coefficient `1/n!`.
pub fn exponent_of_sum_layer(n: usize) -> FreeSeries {
    let c = Rational::factorial(n).recip();
    (0..1u64 << n)
        .map(|m| ((0..n).map(|i| if m >> (n - 1 - i) & 1 == 1 { 'b' } else { 'a' }).collect(), c.clone()))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WordMismatch {
    pub word: String,
    pub product: Rational,
    pub sum: Rational,
}

/// Words of degree `n` whose coefficients differ between `exp(a)exp(b)` and
/// `exp(a+b)`, in lexicographic order.
pub fn free_word_mismatches(n: usize) -> Vec<WordMismatch> {
    let lhs = product_of_exponents_layer(n);
    let rhs = exponent_of_sum_layer(n);
    let zero = Rational::zero();
    rhs.iter()
        .map(|(w, s)| (w, lhs.get(w).unwrap_or(&zero), s))
        .filter(|(_, p, s)| p != s)
        .map(|(w, p, s)| WordMismatch { word: w.clone(), product: p.clone(), sum: s.clone() })
        .collect()
}

/// Collapses words to commutative monomials `a^i b^j`.
pub fn commutative_image(series: &FreeSeries) -> BTreeMap<(usize, usize), Rational> {
    let mut out: BTreeMap<(usize, usize), Rational> = BTreeMap::new();
    for (w, c) in series {
        let a = w.chars().filter(|&ch| ch == 'a').count();
        *out.entry((a, w.len() - a)).or_insert_with(Rational::zero) += c;
    }
    out
}
