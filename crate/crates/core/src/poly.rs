//! Commutative multivariate polynomials and coordinate expansions.
//!
//! A noncommutative expression over an algebra of dimension `d` is a map
//! `A -> A`; expanding every factor through the structural constants turns it
//! into `d` ordinary polynomials in the coordinates of its arguments. Two
//! expressions denote the same map iff those polynomials coincide.

use std::collections::BTreeMap;
use std::fmt;

use smallvec::SmallVec;

use crate::algebra::Algebra;
use crate::scalar::Scalar;

pub type Var = u32;

/// Sorted multiset of variable indices.
pub type Monomial = SmallVec<[Var; 8]>;

#[derive(Clone, PartialEq, Debug)]
pub struct Poly<S: Scalar> {
    terms: BTreeMap<Monomial, S>,
}

impl<S: Scalar> Default for Poly<S> {
    fn default() -> Self {
        Poly { terms: BTreeMap::new() }
    }
}

impl<S: Scalar> Poly<S> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: S) -> Self {
        let mut p = Self::zero();
        if !c.is_exact_zero() {
            p.terms.insert(Monomial::new(), c);
        }
        p
    }

    pub fn var(v: Var) -> Self {
        let mut p = Self::zero();
        p.terms.insert(SmallVec::from_slice(&[v]), S::one());
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &S)> {
        self.terms.iter()
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(|m| m.len()).max().unwrap_or(0)
    }

    fn add_term(&mut self, mono: Monomial, c: S) {
        if c.is_exact_zero() {
            return;
        }
        match self.terms.entry(mono) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_exact_zero() {
                    e.remove();
                }
            }
        }
    }

    /// `self += c * other`
    pub fn add_scaled(&mut self, other: &Poly<S>, c: &S) {
        if c.is_exact_zero() {
            return;
        }
        for (m, v) in &other.terms {
            self.add_term(m.clone(), v.clone() * c.clone());
        }
    }

    /// `self += c * other * var(v)`
    pub fn add_scaled_times_var(&mut self, other: &Poly<S>, c: &S, v: Var) {
        if c.is_exact_zero() {
            return;
        }
        for (m, coef) in &other.terms {
            let mut mono = m.clone();
            let at = mono.partition_point(|&w| w <= v);
            mono.insert(at, v);
            self.add_term(mono, coef.clone() * c.clone());
        }
    }

    pub fn add(&self, other: &Poly<S>) -> Poly<S> {
        let mut out = self.clone();
        out.add_scaled(other, &S::one());
        out
    }

    pub fn sub(&self, other: &Poly<S>) -> Poly<S> {
        let mut out = self.clone();
        out.add_scaled(other, &-S::one());
        out
    }

    pub fn scale(&self, c: &S) -> Poly<S> {
        let mut out = Poly::zero();
        out.add_scaled(self, c);
        out
    }

    pub fn mul(&self, other: &Poly<S>) -> Poly<S> {
        let mut out = Poly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let mut mono: Monomial = SmallVec::with_capacity(m1.len() + m2.len());
                let (mut i, mut j) = (0, 0);
                while i < m1.len() || j < m2.len() {
                    if j == m2.len() || (i < m1.len() && m1[i] <= m2[j]) {
                        mono.push(m1[i]);
                        i += 1;
                    } else {
                        mono.push(m2[j]);
                        j += 1;
                    }
                }
                out.add_term(mono, c1.clone() * c2.clone());
            }
        }
        out
    }

    /// Applies a variable substitution `v -> rename(v)`.
    pub fn rename(&self, rename: impl Fn(Var) -> Var) -> Poly<S> {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut mono: Monomial = m.iter().map(|&v| rename(v)).collect();
            mono.sort_unstable();
            out.add_term(mono, c.clone());
        }
        out
    }

    pub fn eval(&self, value: impl Fn(Var) -> S) -> S {
        let mut acc = S::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for &v in m {
                t = t * value(v);
            }
            acc += t;
        }
        acc
    }

    pub fn variables(&self) -> Vec<Var> {
        let mut vs: Vec<Var> = self.terms.keys().flat_map(|m| m.iter().copied()).collect();
        vs.sort_unstable();
        vs.dedup();
        vs
    }
}

impl<S: Scalar> fmt::Display for Poly<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (m, c)) in self.terms.iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}")?;
            for v in m {
                write!(f, "*v{v}")?;
            }
        }
        Ok(())
    }
}

/// One polynomial per output coordinate.
#[derive(Clone, PartialEq, Debug)]
pub struct CoordinatePolynomial<S: Scalar> {
    pub coords: Vec<Poly<S>>,
}

impl<S: Scalar> CoordinatePolynomial<S> {
    pub fn zero(dim: usize) -> Self {
        CoordinatePolynomial { coords: vec![Poly::zero(); dim] }
    }

    pub fn constant(coords: &[S]) -> Self {
        CoordinatePolynomial { coords: coords.iter().cloned().map(Poly::constant).collect() }
    }

    /// Generic element whose coordinate `i` is the variable `base + i`.
    pub fn generic(dim: usize, base: Var) -> Self {
        CoordinatePolynomial { coords: (0..dim).map(|i| Poly::var(base + i as Var)).collect() }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Poly::is_zero)
    }

    pub fn add_assign(&mut self, other: &Self) {
        for (a, b) in self.coords.iter_mut().zip(&other.coords) {
            a.add_scaled(b, &S::one());
        }
    }

    pub fn add_scaled(&mut self, other: &Self, c: &S) {
        for (a, b) in self.coords.iter_mut().zip(&other.coords) {
            a.add_scaled(b, c);
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_scaled(other, &-S::one());
        out
    }

    pub fn scale(&self, c: &S) -> Self {
        CoordinatePolynomial { coords: self.coords.iter().map(|p| p.scale(c)).collect() }
    }

    pub fn rename(&self, rename: impl Fn(Var) -> Var + Copy) -> Self {
        CoordinatePolynomial { coords: self.coords.iter().map(|p| p.rename(rename)).collect() }
    }

    pub fn eval(&self, value: impl Fn(Var) -> S + Copy) -> Vec<S> {
        self.coords.iter().map(|p| p.eval(value)).collect()
    }

    /// Algebra product of two coordinate polynomials.
    pub fn mul(alg: &Algebra<S>, a: &Self, b: &Self) -> Self {
        let mut out = Self::zero(alg.dim());
        for (k, l, p, c) in alg.sparse_constants() {
            if a.coords[*k].is_zero() || b.coords[*l].is_zero() {
                continue;
            }
            let prod = a.coords[*k].mul(&b.coords[*l]);
            out.coords[*p].add_scaled(&prod, c);
        }
        out
    }

    /// Product with constant coordinates on the right.
    pub fn mul_const_right(alg: &Algebra<S>, a: &Self, b: &[S]) -> Self {
        let mut out = Self::zero(alg.dim());
        for (k, l, p, c) in alg.sparse_constants() {
            if b[*l].is_exact_zero() || a.coords[*k].is_zero() {
                continue;
            }
            out.coords[*p].add_scaled(&a.coords[*k], &(c.clone() * b[*l].clone()));
        }
        out
    }

    /// Product with the generic element `base..base+dim` on the right.
    pub fn mul_generic_right(alg: &Algebra<S>, a: &Self, base: Var) -> Self {
        let mut out = Self::zero(alg.dim());
        for (k, l, p, c) in alg.sparse_constants() {
            if a.coords[*k].is_zero() {
                continue;
            }
            out.coords[*p].add_scaled_times_var(&a.coords[*k], c, base + *l as Var);
        }
        out
    }
}

impl<S: Scalar> fmt::Display for CoordinatePolynomial<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}
