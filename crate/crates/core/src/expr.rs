//! Noncommutative expressions in one algebra variable `x`.
//!
//! Products are evaluated left to right, `((a x) b) x ...`, which is the
//! convention used by the word normal form as well.

use std::fmt;
use std::sync::Arc;

use crate::algebra::{Algebra, Element};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub enum Expr<S: Scalar> {
    Const(Element<S>),
    Var,
    Sum(Vec<Expr<S>>),
    Prod(Vec<Expr<S>>),
    Inverse(Box<Expr<S>>),
}

impl<S: Scalar> Expr<S> {
    pub fn constant(e: Element<S>) -> Self {
        Expr::Const(e)
    }

    pub fn var() -> Self {
        Expr::Var
    }

    pub fn sum(terms: Vec<Expr<S>>) -> Self {
        Expr::Sum(terms)
    }

    pub fn prod(factors: Vec<Expr<S>>) -> Self {
        Expr::Prod(factors)
    }

    pub fn inv(e: Expr<S>) -> Self {
        Expr::Inverse(Box::new(e))
    }

    /// `x^n` as a product of `n` variables.
    pub fn power(n: usize) -> Self {
        Expr::Prod(vec![Expr::Var; n])
    }

    /// `a0 x a1 x ... x an`
    pub fn monomial(constants: &[Element<S>]) -> Self {
        let mut f = Vec::with_capacity(2 * constants.len());
        for (i, c) in constants.iter().enumerate() {
            if i > 0 {
                f.push(Expr::Var);
            }
            f.push(Expr::Const(c.clone()));
        }
        Expr::Prod(f)
    }

    pub fn is_polynomial(&self) -> bool {
        match self {
            Expr::Const(_) | Expr::Var => true,
            Expr::Sum(v) | Expr::Prod(v) => v.iter().all(Expr::is_polynomial),
            Expr::Inverse(_) => false,
        }
    }

    /// Upper bound on the polynomial degree; `None` if an inverse occurs.
    pub fn degree(&self) -> Option<usize> {
        match self {
            Expr::Const(_) => Some(0),
            Expr::Var => Some(1),
            Expr::Sum(v) => v.iter().try_fold(0, |acc, e| e.degree().map(|d| acc.max(d))),
            Expr::Prod(v) => v.iter().try_fold(0, |acc, e| e.degree().map(|d| acc + d)),
            Expr::Inverse(_) => None,
        }
    }

    pub fn eval(&self, x: &Element<S>) -> Result<Element<S>> {
        match self {
            Expr::Const(c) => {
                if !c.same_algebra(x) {
                    return Err(Error::AlgebraMismatch {
                        left: c.algebra().name().to_string(),
                        right: x.algebra().name().to_string(),
                    });
                }
                Ok(c.clone())
            }
            Expr::Var => Ok(x.clone()),
            Expr::Sum(v) => v.iter().try_fold(Element::zero(x.algebra()), |acc, e| acc.add(&e.eval(x)?)),
            Expr::Prod(v) => v.iter().try_fold(Element::one(x.algebra()), |acc, e| acc.mul(&e.eval(x)?)),
            Expr::Inverse(inner) => {
                let v = inner.eval(x)?;
                v.inverse().map_err(|_| Error::NotInvertible(format!("inv({inner}) at x = {x}: {v} is singular")))
            }
        }
    }

    /// Substitutes `inner` for the variable.
    pub fn compose(&self, inner: &Expr<S>) -> Expr<S> {
        match self {
            Expr::Const(c) => Expr::Const(c.clone()),
            Expr::Var => inner.clone(),
            Expr::Sum(v) => Expr::Sum(v.iter().map(|e| e.compose(inner)).collect()),
            Expr::Prod(v) => Expr::Prod(v.iter().map(|e| e.compose(inner)).collect()),
            Expr::Inverse(e) => Expr::inv(e.compose(inner)),
        }
    }

    pub fn map_scalar<T: Scalar>(&self, alg: &Arc<Algebra<T>>, f: &impl Fn(&S) -> T) -> Expr<T> {
        match self {
            Expr::Const(c) => Expr::Const(Element::from_raw(alg, c.coords().iter().map(f).collect())),
            Expr::Var => Expr::Var,
            Expr::Sum(v) => Expr::Sum(v.iter().map(|e| e.map_scalar(alg, f)).collect()),
            Expr::Prod(v) => Expr::Prod(v.iter().map(|e| e.map_scalar(alg, f)).collect()),
            Expr::Inverse(e) => Expr::inv(e.map_scalar(alg, f)),
        }
    }

    pub fn to_float(&self, alg: &Arc<Algebra<f64>>) -> Expr<f64> {
        self.map_scalar(alg, &|s: &S| s.to_f64())
    }
}

fn needs_parens_in_product<S: Scalar>(e: &Expr<S>, leading: bool) -> bool {
    match e {
        Expr::Sum(v) => v.len() > 1,
        Expr::Const(c) => {
            c.coords().iter().filter(|v| !v.is_zero()).count() > 1 || (!leading && c.pretty().starts_with('-'))
        }
        _ => false,
    }
}

impl<S: Scalar> fmt::Display for Expr<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => write!(f, "{}", c.pretty()),
            Expr::Var => write!(f, "x"),
            Expr::Sum(v) if v.is_empty() => write!(f, "0"),
            Expr::Sum(v) => {
                for (i, e) in v.iter().enumerate() {
                    let s = e.to_string();
                    if i == 0 {
                        write!(f, "{s}")?;
                    } else if let Some(rest) = s.strip_prefix('-') {
                        write!(f, " - {rest}")?;
                    } else {
                        write!(f, " + {s}")?;
                    }
                }
                Ok(())
            }
            Expr::Prod(v) if v.is_empty() => write!(f, "1"),
            Expr::Prod(v) => {
                let mut first = true;
                let mut i = 0;
                while i < v.len() {
                    if !first {
                        write!(f, "·")?;
                    }
                    first = false;
                    if matches!(v[i], Expr::Var) {
                        let run = v[i..].iter().take_while(|e| matches!(e, Expr::Var)).count();
                        if run > 1 {
                            write!(f, "x^{run}")?;
                        } else {
                            write!(f, "x")?;
                        }
                        i += run;
                        continue;
                    }
                    if needs_parens_in_product(&v[i], i == 0) && v.len() > 1 {
                        write!(f, "({})", v[i])?;
                    } else {
                        write!(f, "{}", v[i])?;
                    }
                    i += 1;
                }
                Ok(())
            }
            Expr::Inverse(e) => write!(f, "inv({e})"),
        }
    }
}

// --- parser ------------------------------------------------------------------

/// Parses the text syntax: basis labels, rational literals, coordinate
/// tuples `(1,0,-1/2,0)`, the variable `x`, `+ - * ·`, `^n`, parentheses and
/// `inv(...)`. Error positions are byte offsets.
pub fn parse_expr<S: Scalar>(text: &str, alg: &Arc<Algebra<S>>) -> Result<Expr<S>> {
    let mut p = Parser { src: text, pos: 0, alg };
    let e = p.sum()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(e)
}

struct Parser<'a, S: Scalar> {
    src: &'a str,
    pos: usize,
    alg: &'a Arc<Algebra<S>>,
}

impl<S: Scalar> Parser<'_, S> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse { pos: self.pos, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn sum(&mut self) -> Result<Expr<S>> {
        let mut terms = vec![self.product()?];
        loop {
            if self.eat('+') {
                terms.push(self.product()?);
            } else if self.eat('-') {
                let t = self.product()?;
                terms.push(negate(t, self.alg));
            } else {
                break;
            }
        }
        Ok(if terms.len() == 1 { terms.pop().unwrap() } else { Expr::Sum(terms) })
    }

    fn product(&mut self) -> Result<Expr<S>> {
        let mut factors = vec![self.unary()?];
        while self.eat('*') || self.eat('·') {
            factors.push(self.unary()?);
        }
        Ok(if factors.len() == 1 { factors.pop().unwrap() } else { Expr::Prod(factors) })
    }

    fn unary(&mut self) -> Result<Expr<S>> {
        if self.eat('-') {
            let e = self.unary()?;
            return Ok(negate(e, self.alg));
        }
        let base = self.atom()?;
        if self.eat('^') {
            self.skip_ws();
            let start = self.pos;
            while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                self.pos += 1;
            }
            let n: usize = self.src[start..self.pos].parse().map_err(|_| self.err("expected exponent"))?;
            return Ok(Expr::Prod(vec![base; n]));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr<S>> {
        self.skip_ws();
        let start = self.pos;
        let Some(c) = self.peek() else {
            return Err(self.err("unexpected end of input"));
        };
        if c == '(' {
            if self.tuple_ahead() {
                return self.tuple();
            }
            self.pos += 1;
            let e = self.sum()?;
            if !self.eat(')') {
                return Err(self.err("expected `)`"));
            }
            return Ok(e);
        }
        if c.is_ascii_digit() {
            let lit = self.literal();
            let v = S::parse_literal(lit).map_err(|_| Error::Parse { pos: start, msg: format!("bad number `{lit}`") })?;
            if !self.alg.flags().unital {
                return Err(Error::Parse { pos: start, msg: "scalar literal needs a unital algebra".into() });
            }
            return Ok(Expr::Const(Element::scalar(self.alg, v)));
        }
        if c.is_alphabetic() || c == '_' {
            while self.peek().is_some_and(|c| c.is_alphanumeric() || c == '_') {
                self.pos += self.peek().unwrap().len_utf8();
            }
            let ident = &self.src[start..self.pos];
            if ident == "x" {
                return Ok(Expr::Var);
            }
            if ident == "inv" {
                if !self.eat('(') {
                    return Err(self.err("expected `(` after inv"));
                }
                let e = self.sum()?;
                if !self.eat(')') {
                    return Err(self.err("expected `)`"));
                }
                return Ok(Expr::inv(e));
            }
            return match self.alg.basis_index(ident) {
                Some(i) => Ok(Expr::Const(Element::basis(self.alg, i))),
                None => Err(Error::Parse { pos: start, msg: format!("unknown symbol `{ident}`") }),
            };
        }
        Err(self.err(&format!("unexpected `{c}`")))
    }

    fn literal(&mut self) -> &str {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit() || c == '.' || c == '/') {
            self.pos += 1;
        }
        &self.src[start..self.pos]
    }

    fn tuple_ahead(&self) -> bool {
        let mut depth = 0;
        for c in self.src[self.pos..].chars() {
            match c {
                '(' => depth += 1,
                ')' => {
                    depth -= 1;
                    if depth == 0 {
                        return false;
                    }
                }
                ',' if depth == 1 => return true,
                _ => {}
            }
        }
        false
    }

    fn tuple(&mut self) -> Result<Expr<S>> {
        self.eat('(');
        let mut coords = Vec::new();
        loop {
            self.skip_ws();
            let start = self.pos;
            while self.peek().is_some_and(|c| c != ',' && c != ')') {
                self.pos += self.peek().unwrap().len_utf8();
            }
            let lit = self.src[start..self.pos].trim();
            coords.push(S::parse_literal(lit).map_err(|_| Error::Parse { pos: start, msg: format!("bad coordinate `{lit}`") })?);
            if self.eat(',') {
                continue;
            }
            if self.eat(')') {
                break;
            }
            return Err(self.err("expected `,` or `)`"));
        }
        let e = Element::new(self.alg, coords).map_err(|e| self.err(&e.to_string()))?;
        Ok(Expr::Const(e))
    }
}

fn negate<S: Scalar>(e: Expr<S>, alg: &Arc<Algebra<S>>) -> Expr<S> {
    match e {
        Expr::Const(c) => Expr::Const(c.neg()),
        Expr::Prod(mut v) if matches!(v.first(), Some(Expr::Const(_))) => {
            if let Expr::Const(c) = &v[0] {
                v[0] = Expr::Const(c.neg());
            }
            Expr::Prod(v)
        }
        other => {
            let minus = Element::scalar(alg, -S::one());
            Expr::Prod(vec![Expr::Const(minus), other])
        }
    }
}
