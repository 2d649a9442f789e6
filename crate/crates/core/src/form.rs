//! Multilinear forms: sums of interleaved words `a0 z1 a1 z2 ... zn an`
//! where each `z` is the variable `x`, a direction slot `h_j`, or the inverse
//! of an `x`-dependent subexpression.
//!
//! The Gâteaux derivative of order `m` of a monomial of degree `n` is the sum
//! over all injective assignments of the `m` directions to the `n` occurrences
//! of `x` (no `1/m!` normalization), so that `∂ⁿpₙ(h, ..., h) = n! pₙ(h)`.

use std::collections::hash_map::Entry;
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::algebra::{Algebra, Element};
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::poly::{CoordinatePolynomial, Var};
use crate::scalar::{Rational, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub enum Slot<S: Scalar> {
    X,
    /// Direction `h_j`, `j >= 1`.
    H(usize),
    /// `u(x)^{-1}` for an order-0 form `u`.
    Inv(Box<MultilinearForm<S>>),
}

impl<S: Scalar> Slot<S> {
    fn is_inv(&self) -> bool {
        matches!(self, Slot::Inv(_))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Word<S: Scalar> {
    pub prefactor: S,
    /// `slots.len() + 1` constants interleaved with the slots.
    pub constants: Vec<Element<S>>,
    pub slots: Vec<Slot<S>>,
}

impl<S: Scalar> Word<S> {
    pub fn constant(c: Element<S>) -> Self {
        Word { prefactor: S::one(), constants: vec![c], slots: vec![] }
    }

    pub fn single(alg: &Arc<Algebra<S>>, slot: Slot<S>) -> Self {
        let one = Element::one(alg);
        Word { prefactor: S::one(), constants: vec![one.clone(), one], slots: vec![slot] }
    }

    /// Concatenation; the two touching constants are multiplied.
    pub fn concat(&self, other: &Word<S>) -> Word<S> {
        let n = self.constants.len();
        let mut constants = Vec::with_capacity(n + other.constants.len() - 1);
        constants.extend_from_slice(&self.constants[..n - 1]);
        constants.push(self.constants[n - 1].mul(&other.constants[0]).expect("same algebra"));
        constants.extend_from_slice(&other.constants[1..]);
        let mut slots = self.slots.clone();
        slots.extend(other.slots.iter().cloned());
        Word { prefactor: self.prefactor.clone() * other.prefactor.clone(), constants, slots }
    }

    fn prefix(&self, t: usize) -> Word<S> {
        Word { prefactor: self.prefactor.clone(), constants: self.constants[..=t].to_vec(), slots: self.slots[..t].to_vec() }
    }

    fn suffix(&self, t: usize) -> Word<S> {
        Word { prefactor: S::one(), constants: self.constants[t + 1..].to_vec(), slots: self.slots[t + 1..].to_vec() }
    }

    pub fn is_polynomial(&self) -> bool {
        !self.slots.iter().any(Slot::is_inv)
    }

    /// Scales every constant after the first so its first nonzero
    /// coordinate is 1; the factors and the prefactor move into the returned
    /// leading constant. Words that differ by scalars then share a key.
    fn monic_trailing(&self) -> (Element<S>, Word<S>) {
        let mut factor = self.prefactor.clone();
        let mut constants = self.constants.clone();
        for c in &mut constants[1..] {
            if let Some(first) = c.coords().iter().find(|v| !v.is_exact_zero()).cloned() {
                if first != S::one() {
                    *c = c.scale(&(S::one() / first.clone()));
                    factor = factor * first;
                }
            }
        }
        let lead = constants[0].scale(&factor);
        (lead, Word { prefactor: S::one(), constants, slots: self.slots.clone() })
    }

    /// Exact key of the slots and every constant after the first.
    fn shape_key(&self) -> String {
        let mut key = String::new();
        for (slot, c) in self.slots.iter().zip(&self.constants[1..]) {
            match slot {
                Slot::X => key.push('x'),
                Slot::H(j) => key.push_str(&format!("h{j}")),
                Slot::Inv(u) => {
                    key.push_str("inv[");
                    for w in &u.words {
                        key.push_str(&format!("{:?}{:?}{};", w.prefactor, w.constants[0].coords(), w.shape_key()));
                    }
                    key.push(']');
                }
            }
            key.push_str(&format!("{:?}", c.coords()));
        }
        key
    }

    pub fn x_count(&self) -> usize {
        self.slots.iter().filter(|s| matches!(s, Slot::X)).count()
    }

    fn x_positions(&self) -> Vec<usize> {
        self.slots.iter().enumerate().filter(|(_, s)| matches!(s, Slot::X)).map(|(i, _)| i).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.prefactor.is_exact_zero() || self.constants.iter().any(|c| c.coords().iter().all(Scalar::is_exact_zero))
    }

    fn relabel(&self, map: &impl Fn(usize) -> usize) -> Word<S> {
        let slots = self
            .slots
            .iter()
            .map(|s| match s {
                Slot::H(j) => Slot::H(map(*j)),
                other => other.clone(),
            })
            .collect();
        Word { prefactor: self.prefactor.clone(), constants: self.constants.clone(), slots }
    }

    fn eval(&self, x: &Element<S>, hs: &[Element<S>]) -> Result<Element<S>> {
        let mut acc = self.constants[0].scale(&self.prefactor);
        for (slot, c) in self.slots.iter().zip(&self.constants[1..]) {
            let z = match slot {
                Slot::X => x.clone(),
                Slot::H(j) => hs[*j - 1].clone(),
                Slot::Inv(u) => {
                    let v = u.eval(x, &[])?;
                    v.inverse().map_err(|_| Error::NotInvertible(format!("inv({u}) at x = {x}: {v} is singular")))?
                }
            };
            acc = acc.mul(&z)?.mul(c)?;
        }
        Ok(acc)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MultilinearForm<S: Scalar> {
    algebra: Arc<Algebra<S>>,
    order: usize,
    words: Vec<Word<S>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SymmetryClass {
    Symmetric,
    Skew,
    Neither,
}

impl fmt::Display for SymmetryClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SymmetryClass::Symmetric => "symmetric",
            SymmetryClass::Skew => "skew",
            SymmetryClass::Neither => "neither",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SymmetryReport {
    pub class: SymmetryClass,
    /// First slot transposition `(a, b)`, `a < b`, in lexicographic order
    /// under which the form changes.
    pub witness: Option<(usize, usize)>,
}

impl<S: Scalar> MultilinearForm<S> {
    pub fn new(algebra: &Arc<Algebra<S>>, order: usize, words: Vec<Word<S>>) -> Result<Self> {
        for w in &words {
            if w.constants.len() != w.slots.len() + 1 {
                return Err(Error::InvalidArgument("word needs one more constant than slots".into()));
            }
            let mut seen = vec![0usize; order];
            for s in &w.slots {
                if let Slot::H(j) = s {
                    if *j == 0 || *j > order {
                        return Err(Error::InvalidArgument(format!("slot h{j} outside 1..={order}")));
                    }
                    seen[*j - 1] += 1;
                }
            }
            if seen.iter().any(|&c| c != 1) {
                return Err(Error::InvalidArgument("each direction slot must occur exactly once per word".into()));
            }
        }
        Ok(MultilinearForm { algebra: Arc::clone(algebra), order, words })
    }

    pub fn zero(algebra: &Arc<Algebra<S>>, order: usize) -> Self {
        MultilinearForm { algebra: Arc::clone(algebra), order, words: vec![] }
    }

    pub fn algebra(&self) -> &Arc<Algebra<S>> {
        &self.algebra
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn words(&self) -> &[Word<S>] {
        &self.words
    }

    pub fn is_polynomial(&self) -> bool {
        self.words.iter().all(Word::is_polynomial)
    }

    /// Largest number of `x` occurrences in a word.
    pub fn x_degree(&self) -> usize {
        self.words.iter().map(Word::x_count).max().unwrap_or(0)
    }

    /// Normal form of an expression as an order-0 form.
    pub fn from_expr(expr: &Expr<S>, algebra: &Arc<Algebra<S>>) -> Result<Self> {
        let words = match expr {
            Expr::Const(c) => vec![Word::constant(c.clone())],
            Expr::Var => vec![Word::single(algebra, Slot::X)],
            Expr::Sum(v) => {
                let mut words = Vec::new();
                for e in v {
                    words.extend(Self::from_expr(e, algebra)?.words);
                }
                words
            }
            Expr::Prod(v) => {
                let mut acc = vec![Word::constant(Element::one(algebra))];
                for e in v {
                    let f = Self::from_expr(e, algebra)?;
                    acc = acc.iter().flat_map(|a| f.words.iter().map(move |b| a.concat(b))).collect();
                }
                acc
            }
            Expr::Inverse(inner) => {
                let u = Self::from_expr(inner, algebra)?;
                if u.words.iter().all(|w| w.slots.is_empty()) {
                    let value = u.eval(&Element::zero(algebra), &[])?;
                    let inv = value.inverse().map_err(|_| Error::NotInvertible(format!("constant {value} in inv({inner})")))?;
                    vec![Word::constant(inv)]
                } else {
                    vec![Word::single(algebra, Slot::Inv(Box::new(u)))]
                }
            }
        };
        Ok(MultilinearForm { algebra: Arc::clone(algebra), order: 0, words }.simplified())
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut words = self.words.clone();
        words.extend(other.words.iter().cloned());
        MultilinearForm { algebra: Arc::clone(&self.algebra), order: self.order.max(other.order), words }
    }

    pub fn scale(&self, c: &S) -> Self {
        let words = self
            .words
            .iter()
            .map(|w| Word { prefactor: w.prefactor.clone() * c.clone(), ..w.clone() })
            .collect();
        MultilinearForm { algebra: Arc::clone(&self.algebra), order: self.order, words }
    }

    pub fn neg(&self) -> Self {
        self.scale(&-S::one())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Word-by-word product; slot labels are kept as they are.
    pub fn mul(&self, other: &Self, order: usize) -> Self {
        let words = self.words.iter().flat_map(|a| other.words.iter().map(move |b| a.concat(b))).collect();
        MultilinearForm { algebra: Arc::clone(&self.algebra), order, words }
    }

    /// Renames direction slots `h_j -> h_{map(j)}`.
    pub fn relabel(&self, map: impl Fn(usize) -> usize) -> Self {
        MultilinearForm {
            algebra: Arc::clone(&self.algebra),
            order: self.order,
            words: self.words.iter().map(|w| w.relabel(&map)).collect(),
        }
    }

    pub fn swap_slots(&self, a: usize, b: usize) -> Self {
        self.relabel(|j| if j == a { b } else if j == b { a } else { j })
    }

    /// Merges words whose slots agree and whose trailing constants agree up
    /// to scalar factors by adding their leading constants, and drops zero
    /// words.
    pub fn simplified(&self) -> Self {
        let mut out: Vec<Word<S>> = Vec::new();
        let mut index: HashMap<String, usize> = HashMap::new();
        for w in &self.words {
            if w.is_zero() {
                continue;
            }
            let (lead, w) = w.monic_trailing();
            match index.entry(w.shape_key()) {
                Entry::Occupied(e) => {
                    let o = &mut out[*e.get()];
                    o.constants[0] = o.constants[0].add(&lead).expect("same algebra");
                }
                Entry::Vacant(e) => {
                    e.insert(out.len());
                    let mut w = w;
                    w.constants[0] = lead;
                    out.push(w);
                }
            }
        }
        out.retain(|w| !w.is_zero());
        MultilinearForm { algebra: Arc::clone(&self.algebra), order: self.order, words: out }
    }

    /// Derivative in `x` along a fresh direction `h_{order+1}`.
    pub fn differentiate(&self) -> Self {
        let j = self.order + 1;
        let words = self.words.iter().flat_map(|w| differentiate_word(&self.algebra, w, j)).collect();
        MultilinearForm { algebra: Arc::clone(&self.algebra), order: j, words }
    }

    pub fn eval(&self, x: &Element<S>, hs: &[Element<S>]) -> Result<Element<S>> {
        if hs.len() != self.order {
            return Err(Error::ArityMismatch { expected: self.order, got: hs.len() });
        }
        let mut acc = Element::zero(&self.algebra);
        for w in &self.words {
            acc = acc.add(&w.eval(x, hs)?)?;
        }
        Ok(acc)
    }

    /// Substitutes an order-0 form for `x` and a form for each direction.
    pub fn substitute(&self, x_form: &Self, slot_forms: &[Self], order: usize) -> Self {
        let alg = &self.algebra;
        let mut words = Vec::new();
        for w in &self.words {
            let mut acc = MultilinearForm {
                algebra: Arc::clone(alg),
                order,
                words: vec![Word { prefactor: w.prefactor.clone(), ..Word::constant(w.constants[0].clone()) }],
            };
            for (slot, c) in w.slots.iter().zip(&w.constants[1..]) {
                let repl = match slot {
                    Slot::X => x_form.clone(),
                    Slot::H(j) => slot_forms[*j - 1].clone(),
                    Slot::Inv(u) => MultilinearForm {
                        algebra: Arc::clone(alg),
                        order: 0,
                        words: vec![Word::single(alg, Slot::Inv(Box::new(u.substitute(x_form, &[], 0))))],
                    },
                };
                acc = acc.mul(&repl, order);
                acc = acc.mul(&MultilinearForm { algebra: Arc::clone(alg), order: 0, words: vec![Word::constant(c.clone())] }, order);
            }
            words.extend(acc.words);
        }
        MultilinearForm { algebra: Arc::clone(alg), order, words }
    }

    /// Turns the form into an expression by fixing `x = x0` and filling every
    /// direction with `direction`.
    pub fn instantiate(&self, x0: &Element<S>, direction: &Expr<S>) -> Result<Expr<S>> {
        let alg = &self.algebra;
        let is_unit = |c: &Element<S>| alg.flags().unital && c.coords() == alg.unit_coords().as_slice();
        let mut terms = Vec::with_capacity(self.words.len());
        for w in &self.words {
            let mut factors = vec![Expr::Const(w.constants[0].scale(&w.prefactor))];
            for (slot, c) in w.slots.iter().zip(&w.constants[1..]) {
                factors.push(match slot {
                    Slot::X => Expr::Const(x0.clone()),
                    Slot::H(_) => direction.clone(),
                    Slot::Inv(u) => {
                        let v = u.eval(x0, &[])?;
                        Expr::Const(v.inverse().map_err(|_| Error::NotInvertible(format!("inv({u}) at x = {x0}")))?)
                    }
                });
                if !is_unit(c) {
                    factors.push(Expr::Const(c.clone()));
                }
            }
            terms.push(Expr::Prod(factors));
        }
        Ok(Expr::Sum(terms))
    }

    /// Order-0 form back to an expression.
    pub fn to_expr(&self) -> Result<Expr<S>> {
        if self.order != 0 {
            return Err(Error::InvalidArgument("only order-0 forms convert to expressions".into()));
        }
        let alg = &self.algebra;
        let unit = |c: &Element<S>| alg.flags().unital && c.coords() == alg.unit_coords().as_slice();
        let mut terms = Vec::new();
        for w in &self.words {
            let lead = w.constants[0].scale(&w.prefactor);
            let mut factors = Vec::new();
            if !unit(&lead) || w.slots.is_empty() {
                factors.push(Expr::Const(lead));
            }
            for (slot, c) in w.slots.iter().zip(&w.constants[1..]) {
                factors.push(match slot {
                    Slot::X => Expr::Var,
                    Slot::H(_) => unreachable!("order 0"),
                    Slot::Inv(u) => Expr::inv(u.to_expr()?),
                });
                if !unit(c) {
                    factors.push(Expr::Const(c.clone()));
                }
            }
            terms.push(if factors.len() == 1 { factors.pop().unwrap() } else { Expr::Prod(factors) });
        }
        Ok(match terms.len() {
            0 => Expr::Const(Element::zero(alg)),
            1 => terms.pop().unwrap(),
            _ => Expr::Sum(terms),
        })
    }

    pub fn map_scalar<T: Scalar>(&self, alg: &Arc<Algebra<T>>, f: &impl Fn(&S) -> T) -> MultilinearForm<T> {
        let el = |e: &Element<S>| Element::from_raw(alg, e.coords().iter().map(f).collect());
        let words = self
            .words
            .iter()
            .map(|w| Word {
                prefactor: f(&w.prefactor),
                constants: w.constants.iter().map(el).collect(),
                slots: w
                    .slots
                    .iter()
                    .map(|s| match s {
                        Slot::X => Slot::X,
                        Slot::H(j) => Slot::H(*j),
                        Slot::Inv(u) => Slot::Inv(Box::new(u.map_scalar(alg, f))),
                    })
                    .collect(),
            })
            .collect();
        MultilinearForm { algebra: Arc::clone(alg), order: self.order, words }
    }

    pub fn to_float(&self, alg: &Arc<Algebra<f64>>) -> MultilinearForm<f64> {
        self.map_scalar(alg, &|s: &S| s.to_f64())
    }
}

fn differentiate_word<S: Scalar>(alg: &Arc<Algebra<S>>, w: &Word<S>, j: usize) -> Vec<Word<S>> {
    let mut out = Vec::new();
    for (t, slot) in w.slots.iter().enumerate() {
        match slot {
            Slot::X => {
                let mut nw = w.clone();
                nw.slots[t] = Slot::H(j);
                out.push(nw);
            }
            Slot::H(_) => {}
            Slot::Inv(u) => {
                // ∂(u⁻¹)(h) = -u⁻¹ ∂u(h) u⁻¹
                let inv = Word::single(alg, Slot::Inv(u.clone()));
                let prefix = w.prefix(t).concat(&inv);
                let suffix = inv.concat(&w.suffix(t));
                for du in u.words.iter().flat_map(|uw| differentiate_word(alg, uw, j)) {
                    let mut nw = prefix.concat(&du).concat(&suffix);
                    nw.prefactor = -nw.prefactor;
                    out.push(nw);
                }
            }
        }
    }
    out
}

/// Ordered injective assignments of directions `1..=m` to `positions`.
fn injections(positions: &[usize], m: usize) -> Vec<Vec<usize>> {
    fn go(positions: &[usize], m: usize, used: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if used.len() == m {
            out.push(used.clone());
            return;
        }
        for &p in positions {
            if !used.contains(&p) {
                used.push(p);
                go(positions, m, used, out);
                used.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(positions, m, &mut Vec::with_capacity(m), &mut out);
    out
}

/// Gâteaux derivative of order `m`. Polynomial words use injection
/// enumeration; words containing inverses are differentiated `m` times.
pub fn derivative<S: Scalar>(p: &Expr<S>, algebra: &Arc<Algebra<S>>, m: usize) -> Result<MultilinearForm<S>> {
    let base = MultilinearForm::from_expr(p, algebra)?;
    Ok(derivative_of_form(&base, m))
}

/// Derivative of order `m` of an order-0 form.
pub fn derivative_of_form<S: Scalar>(base: &MultilinearForm<S>, m: usize) -> MultilinearForm<S> {
    assert_eq!(base.order, 0, "derivative_of_form expects an order-0 form");
    let alg = &base.algebra;
    let mut words = Vec::new();
    for w in &base.words {
        if w.is_polynomial() {
            for phi in injections(&w.x_positions(), m) {
                let mut nw = w.clone();
                for (dir, pos) in phi.iter().enumerate() {
                    nw.slots[*pos] = Slot::H(dir + 1);
                }
                words.push(nw);
            }
        } else {
            let mut layer = vec![w.clone()];
            for j in 1..=m {
                layer = layer.iter().flat_map(|lw| differentiate_word(alg, lw, j)).collect();
            }
            words.extend(layer);
        }
    }
    MultilinearForm { algebra: Arc::clone(alg), order: m, words }
}

/// Derivative of order `m` built from the product rule on
/// `p_k(x) = p_{k-1}(x) x a_k`:
/// `∂ᵐp_k = ∂ᵐp_{k-1} x a_k + Σ_j ∂ᵐ⁻¹p_{k-1}(.. ĥ_j ..) h_j a_k`.
pub fn derivative_recursive<S: Scalar>(p: &Expr<S>, algebra: &Arc<Algebra<S>>, m: usize) -> Result<MultilinearForm<S>> {
    let base = MultilinearForm::from_expr(p, algebra)?;
    let mut words = Vec::new();
    for w in &base.words {
        if !w.is_polynomial() {
            return Err(Error::InverseNotAllowed(p.to_string()));
        }
        words.extend(recursive_words(algebra, w, w.slots.len(), m));
    }
    Ok(MultilinearForm { algebra: Arc::clone(algebra), order: m, words })
}

fn recursive_words<S: Scalar>(alg: &Arc<Algebra<S>>, w: &Word<S>, k: usize, m: usize) -> Vec<Word<S>> {
    if m > k {
        return vec![];
    }
    if k == 0 {
        return vec![w.prefix(0)];
    }
    let tail = Word { prefactor: S::one(), constants: vec![Element::one(alg), w.constants[k].clone()], slots: vec![Slot::X] };
    let mut out: Vec<Word<S>> = recursive_words(alg, w, k - 1, m).iter().map(|d| d.concat(&tail)).collect();
    if m >= 1 {
        let lower = recursive_words(alg, w, k - 1, m - 1);
        for j in 1..=m {
            let h_tail = Word { slots: vec![Slot::H(j)], ..tail.clone() };
            for d in &lower {
                let shifted = d.relabel(&|i| if i >= j { i + 1 } else { i });
                out.push(shifted.concat(&h_tail));
            }
        }
    }
    out
}

// --- exact expansion -------------------------------------------------------

const ATOM_BASE: Var = 1 << 20;

/// Variable layout for coordinate expansions: `x` uses `0..d`, direction
/// `h_j` uses `j*d..(j+1)*d`, and each distinct inverse subexpression is an
/// independent generic element starting at `ATOM_BASE`.
#[derive(Debug, Default)]
pub struct AtomTable<S: Scalar> {
    atoms: Vec<MultilinearForm<S>>,
}

impl<S: Scalar> AtomTable<S> {
    pub fn new() -> Self {
        AtomTable { atoms: Vec::new() }
    }

    fn index(&mut self, u: &MultilinearForm<S>) -> usize {
        match self.atoms.iter().position(|a| a == u) {
            Some(i) => i,
            None => {
                self.atoms.push(u.clone());
                self.atoms.len() - 1
            }
        }
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }
}

pub fn x_var(i: usize) -> Var {
    i as Var
}

pub fn h_var(dim: usize, j: usize, i: usize) -> Var {
    (j * dim + i) as Var
}

impl<S: Scalar> MultilinearForm<S> {
    /// Exact coordinate expansion; inverse slots are rejected.
    pub fn canonical_expand(&self) -> Result<CoordinatePolynomial<S>> {
        if !self.is_polynomial() {
            return Err(Error::InverseNotAllowed(self.to_string()));
        }
        Ok(self.expand_with_atoms(&mut AtomTable::new()))
    }

    /// Expansion treating every inverse subexpression as a free generic
    /// element. Equal expansions imply equal maps.
    pub fn expand_with_atoms(&self, atoms: &mut AtomTable<S>) -> CoordinatePolynomial<S> {
        let alg = &*self.algebra;
        let d = alg.dim();
        let unit = alg.unit_coords();
        let unital = alg.flags().unital;
        let mut total = CoordinatePolynomial::zero(d);
        for w in &self.words {
            if w.is_zero() {
                continue;
            }
            let lead: Vec<S> = w.constants[0].coords().iter().map(|c| c.clone() * w.prefactor.clone()).collect();
            let mut acc = CoordinatePolynomial::constant(&lead);
            for (slot, c) in w.slots.iter().zip(&w.constants[1..]) {
                let base = match slot {
                    Slot::X => 0,
                    Slot::H(j) => (*j * d) as Var,
                    Slot::Inv(u) => ATOM_BASE + (atoms.index(u) * d) as Var,
                };
                acc = CoordinatePolynomial::mul_generic_right(alg, &acc, base);
                if !(unital && c.coords() == unit.as_slice()) {
                    acc = CoordinatePolynomial::mul_const_right(alg, &acc, c.coords());
                }
            }
            total.add_assign(&acc);
        }
        total
    }

    /// Identical word sums after simplification. Sufficient for equality as
    /// maps and much cheaper than expanding.
    fn same_words(&self, other: &Self) -> bool {
        self.order == other.order && self.word_sums() == other.word_sums()
    }

    /// Simplified words keyed by shape, each with its leading constant.
    fn word_sums(&self) -> HashMap<String, Vec<S>> {
        self.simplified().words.into_iter().map(|w| (w.shape_key(), w.constants[0].coords().to_vec())).collect()
    }

    /// Exact equality as maps for forms of equal order. Inverse
    /// subexpressions are compared as opaque generic elements, so identities
    /// such as `x·inv(x) = 1` are not recognised.
    pub fn equal(&self, other: &Self) -> Result<bool> {
        if *self.algebra != *other.algebra {
            return Err(Error::AlgebraMismatch {
                left: self.algebra.name().to_string(),
                right: other.algebra.name().to_string(),
            });
        }
        if self.same_words(other) {
            return Ok(true);
        }
        let mut atoms = AtomTable::new();
        Ok(self.expand_with_atoms(&mut atoms) == other.expand_with_atoms(&mut atoms))
    }

    /// Compares the form with its images under every slot transposition,
    /// first by words and then, if that is inconclusive, by expansion.
    pub fn symmetry_class(&self) -> SymmetryReport {
        let base = self.word_sums();
        let word_symmetric = (1..=self.order)
            .flat_map(|a| (a + 1..=self.order).map(move |b| (a, b)))
            .all(|(a, b)| self.swap_slots(a, b).word_sums() == base);
        if word_symmetric {
            return SymmetryReport { class: SymmetryClass::Symmetric, witness: None };
        }
        let d = self.algebra.dim();
        let mut atoms = AtomTable::new();
        let p = self.expand_with_atoms(&mut atoms);
        let neg = p.scale(&-S::one());
        let mut symmetric = true;
        let mut skew = true;
        let mut witness = None;
        for a in 1..=self.order {
            for b in a + 1..=self.order {
                let swapped = p.rename(|v| swap_var(v, d, a, b));
                if swapped != p {
                    symmetric = false;
                    witness.get_or_insert((a, b));
                }
                if swapped != neg {
                    skew = false;
                }
            }
        }
        let class = if symmetric {
            SymmetryClass::Symmetric
        } else if skew {
            SymmetryClass::Skew
        } else {
            SymmetryClass::Neither
        };
        SymmetryReport { class, witness }
    }
}

fn swap_var(v: Var, d: usize, a: usize, b: usize) -> Var {
    if v >= ATOM_BASE {
        return v;
    }
    let (blk, i) = (v as usize / d, v as usize % d);
    let blk = if blk == a { b } else if blk == b { a } else { blk };
    (blk * d + i) as Var
}

/// Exact expansion of a polynomial expression.
pub fn canonical_expand(p: &Expr<Rational>, algebra: &Arc<Algebra<Rational>>) -> Result<CoordinatePolynomial<Rational>> {
    if !p.is_polynomial() {
        return Err(Error::InverseNotAllowed(p.to_string()));
    }
    MultilinearForm::from_expr(p, algebra)?.canonical_expand()
}

pub fn expressions_equal(p: &Expr<Rational>, q: &Expr<Rational>, algebra: &Arc<Algebra<Rational>>) -> Result<bool> {
    Ok(canonical_expand(p, algebra)? == canonical_expand(q, algebra)?)
}

/// Taylor polynomial `Σ (1/m!) ∂ᵐp(x0)(x - x0, ..., x - x0)`.
pub fn taylor<S: Scalar>(p: &Expr<S>, x0: &Element<S>) -> Result<Expr<S>> {
    let alg = x0.algebra();
    let deg = p.degree().ok_or_else(|| Error::InverseNotAllowed(p.to_string()))?;
    let base = MultilinearForm::from_expr(p, alg)?;
    let direction = Expr::Sum(vec![Expr::Var, Expr::Const(x0.neg())]);
    let mut terms = Vec::with_capacity(deg + 1);
    let mut factorial = S::one();
    for m in 0..=deg {
        if m > 0 {
            factorial = factorial * S::from_i64(m as i64);
        }
        let layer = derivative_of_form(&base, m).scale(&(S::one() / factorial.clone()));
        terms.push(layer.instantiate(x0, &direction)?);
    }
    Ok(Expr::Sum(terms))
}

/// Normal form of an expression, with like words merged.
pub fn simplify<S: Scalar>(p: &Expr<S>, algebra: &Arc<Algebra<S>>) -> Result<Expr<S>> {
    MultilinearForm::from_expr(p, algebra)?.simplified().to_expr()
}

// --- display and serialization ----------------------------------------------

fn fmt_constant<S: Scalar>(c: &Element<S>) -> String {
    let s = c.pretty();
    if c.coords().iter().filter(|v| !v.is_zero()).count() > 1 {
        format!("({s})")
    } else {
        s
    }
}

impl<S: Scalar> MultilinearForm<S> {
    fn slot_label(&self, j: usize) -> String {
        if self.order == 1 {
            "h".into()
        } else {
            format!("h{j}")
        }
    }

    fn fmt_word(&self, w: &Word<S>) -> String {
        let alg = &self.algebra;
        let is_unit = |c: &Element<S>| alg.flags().unital && c.coords() == alg.unit_coords().as_slice();
        let mut parts: Vec<String> = Vec::new();
        let pref = w.prefactor.to_string();
        let mut sign = "";
        if pref == "-1" {
            sign = "-";
        } else if pref != "1" {
            parts.push(pref);
        }
        if !is_unit(&w.constants[0]) || w.slots.is_empty() {
            parts.push(fmt_constant(&w.constants[0]));
        }
        let mut i = 0;
        while i < w.slots.len() {
            match &w.slots[i] {
                Slot::X => {
                    // group x·x·x with no constants in between
                    let mut run = 1;
                    while i + run < w.slots.len()
                        && matches!(w.slots[i + run], Slot::X)
                        && is_unit(&w.constants[i + run])
                    {
                        run += 1;
                    }
                    parts.push(if run > 1 { format!("x^{run}") } else { "x".into() });
                    i += run;
                }
                Slot::H(j) => {
                    parts.push(self.slot_label(*j));
                    i += 1;
                }
                Slot::Inv(u) => {
                    parts.push(format!("inv({u})"));
                    i += 1;
                }
            }
            if !is_unit(&w.constants[i]) {
                parts.push(fmt_constant(&w.constants[i]));
            }
        }
        format!("{sign}{}", parts.join("·"))
    }
}

impl<S: Scalar> fmt::Display for MultilinearForm<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let words: Vec<String> = self.words.iter().filter(|w| !w.is_zero()).map(|w| self.fmt_word(w)).collect();
        if words.is_empty() {
            return write!(f, "0");
        }
        for (i, w) in words.iter().enumerate() {
            if i == 0 {
                write!(f, "{w}")?;
            } else if let Some(rest) = w.strip_prefix('-') {
                write!(f, " - {rest}")?;
            } else {
                write!(f, " + {w}")?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FormJson {
    pub order: usize,
    pub words: Vec<WordJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WordJson {
    pub prefactor: String,
    pub constants: Vec<Vec<String>>,
    pub slots: Vec<SlotJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SlotJson {
    /// `"X"` or `"H1"`, `"H2"`, ...
    Label(String),
    Inv { inv: FormJson },
}

impl<S: Scalar> MultilinearForm<S> {
    pub fn to_json(&self) -> FormJson {
        FormJson {
            order: self.order,
            words: self
                .words
                .iter()
                .map(|w| WordJson {
                    prefactor: w.prefactor.to_string(),
                    constants: w.constants.iter().map(|c| c.coords().iter().map(|v| v.to_string()).collect()).collect(),
                    slots: w
                        .slots
                        .iter()
                        .map(|s| match s {
                            Slot::X => SlotJson::Label("X".into()),
                            Slot::H(j) => SlotJson::Label(format!("H{j}")),
                            Slot::Inv(u) => SlotJson::Inv { inv: u.to_json() },
                        })
                        .collect(),
                })
                .collect(),
        }
    }

    pub fn from_json(json: &FormJson, algebra: &Arc<Algebra<S>>) -> Result<Self> {
        let mut words = Vec::with_capacity(json.words.len());
        for w in &json.words {
            let constants = w
                .constants
                .iter()
                .map(|c| Element::new(algebra, c.iter().map(|v| S::parse_literal(v)).collect::<Result<_>>()?))
                .collect::<Result<Vec<_>>>()?;
            let slots = w
                .slots
                .iter()
                .map(|s| match s {
                    SlotJson::Label(l) if l == "X" => Ok(Slot::X),
                    SlotJson::Label(l) => l
                        .strip_prefix('H')
                        .and_then(|n| n.parse().ok())
                        .map(Slot::H)
                        .ok_or_else(|| Error::InvalidArgument(format!("bad slot `{l}`"))),
                    SlotJson::Inv { inv } => Ok(Slot::Inv(Box::new(Self::from_json(inv, algebra)?))),
                })
                .collect::<Result<Vec<_>>>()?;
            words.push(Word { prefactor: S::parse_literal(&w.prefactor)?, constants, slots });
        }
        Self::new(algebra, json.order, words)
    }
}
