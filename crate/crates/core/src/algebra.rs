//! Finite-dimensional algebras given by structural constants.
//!
//! The product of basis vectors is `e_k * e_l = C[k][l][p] e_p`. Everything
//! else (flags, inverses, norms) is derived from the table; declared flags are
//! checked against it at construction.

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::poly::{CoordinatePolynomial, Poly};
use crate::scalar::{Rational, Scalar};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Flags {
    pub unital: bool,
    pub associative: bool,
    pub division: bool,
    pub multiplicative_norm: bool,
}

/// Flags as written in a spec document; `None` means "compute it".
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeclaredFlags {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unital: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub associative: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub division: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub multiplicative_norm: Option<bool>,
}

impl DeclaredFlags {
    pub fn all(f: Flags) -> Self {
        DeclaredFlags {
            unital: Some(f.unital),
            associative: Some(f.associative),
            division: Some(f.division),
            multiplicative_norm: Some(f.multiplicative_norm),
        }
    }
}

/// A named linear map of the algebra into itself, used as an extra generator
/// of `L(A;A)` beyond the identity. `matrix[k][m]` is coordinate `k` of the
/// image of `e_m`.
#[derive(Clone, Debug, PartialEq)]
pub struct Generator<S: Scalar> {
    pub name: String,
    pub matrix: Matrix<S>,
}

impl<S: Scalar> Generator<S> {
    pub fn apply(&self, coords: &[S]) -> Vec<S> {
        linalg::mat_vec(&self.matrix, coords)
    }

    /// Conjugation `e_0 -> e_0`, `e_k -> -e_k`.
    pub fn conjugation(dim: usize) -> Self {
        let matrix = (0..dim)
            .map(|k| {
                (0..dim)
                    .map(|m| match (k == m, k == 0) {
                        (false, _) => S::zero(),
                        (true, true) => S::one(),
                        (true, false) => -S::one(),
                    })
                    .collect()
            })
            .collect();
        Generator { name: "conj".into(), matrix }
    }
}

#[derive(Clone, Debug)]
pub struct Algebra<S: Scalar> {
    name: String,
    basis: Vec<String>,
    dim: usize,
    table: Vec<S>,
    sparse: Vec<(usize, usize, usize, S)>,
    flags: Flags,
    generators: Vec<Generator<S>>,
}

impl<S: Scalar> PartialEq for Algebra<S> {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.basis == other.basis && self.table == other.table
    }
}

impl<S: Scalar> Algebra<S> {
    /// Builds an algebra from `(k, l, p, value)` entries and verifies the
    /// declared flags. Flags left undeclared are computed.
    pub fn from_constants(
        name: impl Into<String>,
        basis: Vec<String>,
        entries: impl IntoIterator<Item = (usize, usize, usize, S)>,
        declared: DeclaredFlags,
        generators: Vec<Generator<S>>,
    ) -> Result<Self> {
        let dim = basis.len();
        if dim == 0 {
            return Err(Error::MalformedSpec("dimension must be positive".into()));
        }
        let mut table = vec![S::zero(); dim * dim * dim];
        for (k, l, p, v) in entries {
            if k >= dim || l >= dim || p >= dim {
                return Err(Error::MalformedSpec(format!(
                    "constant index ({k},{l},{p}) out of range for dim {dim}"
                )));
            }
            table[(k * dim + l) * dim + p] += v;
        }
        for g in &generators {
            if g.matrix.len() != dim || g.matrix.iter().any(|r| r.len() != dim) {
                return Err(Error::MalformedSpec(format!("generator `{}` must be {dim}x{dim}", g.name)));
            }
        }
        let mut alg = Algebra {
            name: name.into(),
            basis,
            dim,
            table,
            sparse: Vec::new(),
            flags: Flags::default(),
            generators,
        };
        alg.rebuild_sparse();
        alg.flags = alg.verify_flags(declared)?;
        Ok(alg)
    }

    fn rebuild_sparse(&mut self) {
        let d = self.dim;
        self.sparse = (0..d)
            .flat_map(|k| (0..d).flat_map(move |l| (0..d).map(move |p| (k, l, p))))
            .filter_map(|(k, l, p)| {
                let v = &self.table[(k * d + l) * d + p];
                (!v.is_exact_zero()).then(|| (k, l, p, v.clone()))
            })
            .collect();
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn basis(&self) -> &[String] {
        &self.basis
    }

    pub fn flags(&self) -> Flags {
        self.flags
    }

    pub fn is_associative(&self) -> bool {
        self.flags.associative
    }

    pub fn constant(&self, k: usize, l: usize, p: usize) -> &S {
        &self.table[(k * self.dim + l) * self.dim + p]
    }

    pub fn sparse_constants(&self) -> &[(usize, usize, usize, S)] {
        &self.sparse
    }

    /// Extra generators registered for this algebra (identity excluded).
    pub fn generators(&self) -> &[Generator<S>] {
        &self.generators
    }

    pub fn generator(&self, name: &str) -> Option<&Generator<S>> {
        self.generators.iter().find(|g| g.name == name)
    }

    pub fn basis_index(&self, label: &str) -> Option<usize> {
        self.basis.iter().position(|b| b == label)
    }

    pub fn mul_coords(&self, a: &[S], b: &[S]) -> Vec<S> {
        let mut out = vec![S::zero(); self.dim];
        for (k, l, p, c) in &self.sparse {
            if a[*k].is_exact_zero() || b[*l].is_exact_zero() {
                continue;
            }
            out[*p] += c.clone() * a[*k].clone() * b[*l].clone();
        }
        out
    }

    /// Matrix of `x -> a x`.
    pub fn left_matrix(&self, a: &[S]) -> Matrix<S> {
        let d = self.dim;
        let mut m = vec![vec![S::zero(); d]; d];
        for (k, l, p, c) in &self.sparse {
            m[*p][*l] += c.clone() * a[*k].clone();
        }
        m
    }

    /// Matrix of `x -> x a`.
    pub fn right_matrix(&self, a: &[S]) -> Matrix<S> {
        let d = self.dim;
        let mut m = vec![vec![S::zero(); d]; d];
        for (k, l, p, c) in &self.sparse {
            m[*p][*k] += c.clone() * a[*l].clone();
        }
        m
    }

    pub fn unit_coords(&self) -> Vec<S> {
        self.basis_coords(0)
    }

    pub fn basis_coords(&self, i: usize) -> Vec<S> {
        (0..self.dim).map(|j| if i == j { S::one() } else { S::zero() }).collect()
    }

    fn basis_unit(&self, i: usize) -> Vec<S> {
        self.basis_coords(i)
    }

    /// Converts the constants to another scalar type, e.g. the float path.
    pub fn convert<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Algebra<T> {
        let mut out = Algebra {
            name: self.name.clone(),
            basis: self.basis.clone(),
            dim: self.dim,
            table: self.table.iter().map(&f).collect(),
            sparse: Vec::new(),
            flags: self.flags,
            generators: self
                .generators
                .iter()
                .map(|g| Generator {
                    name: g.name.clone(),
                    matrix: g.matrix.iter().map(|r| r.iter().map(&f).collect()).collect(),
                })
                .collect(),
        };
        out.rebuild_sparse();
        out
    }

    pub fn to_float(&self) -> Algebra<f64> {
        self.convert(|s| s.to_f64())
    }

    fn find_unit_violation(&self) -> Option<String> {
        let one = self.unit_coords();
        for k in 0..self.dim {
            let ek = self.basis_unit(k);
            if !coords_eq(&self.mul_coords(&one, &ek), &ek) || !coords_eq(&self.mul_coords(&ek, &one), &ek) {
                return Some(format!("e0*{0} or {0}*e0 differs from {0}", self.basis[k]));
            }
        }
        None
    }

    /// First basis triple with a nonzero associator.
    pub fn associator_counterexample(&self) -> Option<(usize, usize, usize)> {
        let d = self.dim;
        for a in 0..d {
            let ea = self.basis_unit(a);
            for b in 0..d {
                let eb = self.basis_unit(b);
                let ab = self.mul_coords(&ea, &eb);
                for c in 0..d {
                    let ec = self.basis_unit(c);
                    let lhs = self.mul_coords(&ab, &ec);
                    let rhs = self.mul_coords(&ea, &self.mul_coords(&eb, &ec));
                    if !coords_eq(&lhs, &rhs) {
                        return Some((a, b, c));
                    }
                }
            }
        }
        None
    }

    /// `|ab|^2 - |a|^2 |b|^2` as a polynomial identity in the coordinates of
    /// generic `a` and `b`.
    pub fn norm_defect(&self) -> Poly<S> {
        let d = self.dim;
        let a = CoordinatePolynomial::generic(d, 0);
        let b = CoordinatePolynomial::generic(d, d as u32);
        let ab = CoordinatePolynomial::mul(self, &a, &b);
        let sq = |v: &CoordinatePolynomial<S>| {
            v.coords.iter().fold(Poly::zero(), |acc: Poly<S>, p| acc.add(&p.mul(p)))
        };
        sq(&ab).sub(&sq(&a).mul(&sq(&b)))
    }

    /// Searches small integer elements for a left or right zero divisor.
    fn find_zero_divisor(&self) -> Option<Vec<S>> {
        let d = self.dim;
        let singular = |v: &Vec<S>| {
            linalg::is_singular(&self.left_matrix(v)) || linalg::is_singular(&self.right_matrix(v))
        };
        let mut candidates: Vec<Vec<S>> = Vec::new();
        if d <= 8 {
            let total = 3usize.pow(d as u32);
            for code in 1..total {
                let mut c = code;
                let v: Vec<S> = (0..d)
                    .map(|_| {
                        let digit = c % 3;
                        c /= 3;
                        S::from_i64(digit as i64 - 1)
                    })
                    .collect();
                candidates.push(v);
            }
        } else {
            for i in 0..d {
                candidates.push(self.basis_unit(i));
                for j in i + 1..d {
                    for sign in [1, -1] {
                        let mut v = self.basis_unit(i);
                        v[j] = S::from_i64(sign);
                        candidates.push(v);
                    }
                }
            }
        }
        candidates.into_iter().find(singular)
    }

    fn verify_flags(&self, declared: DeclaredFlags) -> Result<Flags> {
        let unit_violation = self.find_unit_violation();
        let unital = unit_violation.is_none();
        let assoc_cx = self.associator_counterexample();
        let associative = assoc_cx.is_none();
        let multiplicative_norm = self.norm_defect().is_zero();
        // A multiplicative Euclidean norm rules out zero divisors.
        let zero_divisor = if unital && !multiplicative_norm { self.find_zero_divisor() } else { None };
        let division = unital && (multiplicative_norm || (zero_divisor.is_none() && declared.division == Some(true)));

        let check = |flag: &'static str, decl: Option<bool>, actual: bool, witness: String| match decl {
            Some(d) if d != actual => Err(Error::FlagContradiction { flag, witness }),
            _ => Ok(()),
        };
        check(
            "unital",
            declared.unital,
            unital,
            unit_violation.unwrap_or_else(|| "e0 is a two-sided unit".into()),
        )?;
        check(
            "associative",
            declared.associative,
            associative,
            match assoc_cx {
                Some((a, b, c)) => format!(
                    "associator of basis triple ({}, {}, {}) is nonzero",
                    self.basis[a], self.basis[b], self.basis[c]
                ),
                None => "associator vanishes on all basis triples".into(),
            },
        )?;
        if declared.division == Some(true) && !division {
            let witness = match &zero_divisor {
                Some(v) => format!("zero divisor {}", fmt_coords(v)),
                None => "algebra has no unit".into(),
            };
            return Err(Error::FlagContradiction { flag: "division", witness });
        }
        if declared.division == Some(false) && multiplicative_norm && unital {
            return Err(Error::FlagContradiction {
                flag: "division",
                witness: "norm is multiplicative, so every nonzero element is invertible".into(),
            });
        }
        check(
            "multiplicative_norm",
            declared.multiplicative_norm,
            multiplicative_norm,
            if multiplicative_norm {
                "|ab|^2 = |a|^2 |b|^2 holds identically".into()
            } else {
                format!("|ab|^2 - |a|^2|b|^2 = {} is not identically zero", self.norm_defect())
            },
        )?;
        Ok(Flags { unital, associative, division, multiplicative_norm })
    }
}

fn coords_eq<S: Scalar>(a: &[S], b: &[S]) -> bool {
    a.iter().zip(b).all(|(x, y)| (x.clone() - y.clone()).is_zero())
}

fn fmt_coords<S: Scalar>(v: &[S]) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(", "))
}

impl<S: Scalar> fmt::Display for Algebra<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (dim {})", self.name, self.dim)
    }
}

// --- builtins --------------------------------------------------------------

pub const BUILTIN_NAMES: &[&str] = &["reals", "complex", "quaternions", "octonions", "matrices2", "dual"];

fn r(n: i64) -> Rational {
    Rational::integer(n)
}

pub fn reals() -> Algebra<Rational> {
    Algebra::from_constants(
        "reals",
        vec!["1".into()],
        [(0, 0, 0, r(1))],
        DeclaredFlags::all(Flags { unital: true, associative: true, division: true, multiplicative_norm: true }),
        vec![],
    )
    .expect("reals")
}

/// Cayley-Dickson doubling with `(a,b)(c,d) = (ac - d*b, da + bc*)`.
pub fn cayley_dickson(base: &Algebra<Rational>, name: &str, labels: Vec<String>) -> Result<Algebra<Rational>> {
    let n = base.dim();
    let conj = Generator::<Rational>::conjugation(n);
    let conj_of = |i: usize| -> Rational { conj.matrix[i][i].clone() };
    let mut entries = Vec::new();
    // (a,0)(c,0) = (ac, 0)
    // (a,0)(0,d) = (0, da)
    // (0,b)(c,0) = (0, b c*)
    // (0,b)(0,d) = (-d* b, 0)
    for (k, l, p, c) in base.sparse_constants() {
        entries.push((*k, *l, *p, c.clone()));
    }
    for a in 0..n {
        for d in 0..n {
            // e_a (first half) times e_d (second half) = (0, e_d e_a)
            for p in 0..n {
                let c = base.constant(d, a, p);
                if !c.is_zero() {
                    entries.push((a, n + d, n + p, c.clone()));
                }
            }
        }
    }
    for b in 0..n {
        for c in 0..n {
            // (0, e_b)(e_c, 0) = (0, e_b conj(e_c))
            for p in 0..n {
                let v = base.constant(b, c, p).clone() * conj_of(c);
                if !v.is_zero() {
                    entries.push((n + b, c, n + p, v));
                }
            }
        }
    }
    for b in 0..n {
        for d in 0..n {
            // (0, e_b)(0, e_d) = (-conj(e_d) e_b, 0)
            for p in 0..n {
                let v = -(base.constant(d, b, p).clone() * conj_of(d));
                if !v.is_zero() {
                    entries.push((n + b, n + d, p, v));
                }
            }
        }
    }
    Algebra::from_constants(
        name,
        labels,
        entries,
        DeclaredFlags::default(),
        vec![Generator::conjugation(2 * n)],
    )
}

pub fn complex() -> Algebra<Rational> {
    cayley_dickson(&reals(), "complex", vec!["1".into(), "i".into()]).expect("complex")
}

pub fn quaternions() -> Algebra<Rational> {
    cayley_dickson(&complex(), "quaternions", ["1", "i", "j", "k"].map(String::from).to_vec()).expect("quaternions")
}

pub fn octonions() -> Algebra<Rational> {
    let labels = std::iter::once("1".to_string()).chain((1..8).map(|i| format!("e{i}"))).collect();
    cayley_dickson(&quaternions(), "octonions", labels).expect("octonions")
}

/// Real 2x2 matrices on the basis `1 = I`, `p = diag(1,-1)`, `q = [[0,1],[1,0]]`,
/// `r = [[0,1],[-1,0]]`.
pub fn matrices2() -> Algebra<Rational> {
    let basis: [[i64; 4]; 4] = [[1, 0, 0, 1], [1, 0, 0, -1], [0, 1, 1, 0], [0, 1, -1, 0]];
    let decompose = |m: [i64; 4]| -> [Rational; 4] {
        let [a, b, c, d] = m;
        [Rational::new(a + d, 2), Rational::new(a - d, 2), Rational::new(b + c, 2), Rational::new(b - c, 2)]
    };
    let mut entries = Vec::new();
    for (k, x) in basis.iter().enumerate() {
        for (l, y) in basis.iter().enumerate() {
            let prod = [
                x[0] * y[0] + x[1] * y[2],
                x[0] * y[1] + x[1] * y[3],
                x[2] * y[0] + x[3] * y[2],
                x[2] * y[1] + x[3] * y[3],
            ];
            for (p, v) in decompose(prod).into_iter().enumerate() {
                entries.push((k, l, p, v));
            }
        }
    }
    Algebra::from_constants(
        "matrices2",
        ["1", "p", "q", "r"].map(String::from).to_vec(),
        entries,
        DeclaredFlags {
            unital: Some(true),
            associative: Some(true),
            division: Some(false),
            multiplicative_norm: Some(false),
        },
        vec![],
    )
    .expect("matrices2")
}

/// Dual numbers `a + b e`, `e^2 = 0`.
pub fn dual() -> Algebra<Rational> {
    Algebra::from_constants(
        "dual",
        vec!["1".into(), "e".into()],
        [(0, 0, 0, r(1)), (0, 1, 1, r(1)), (1, 0, 1, r(1))],
        DeclaredFlags {
            unital: Some(true),
            associative: Some(true),
            division: Some(false),
            multiplicative_norm: Some(false),
        },
        vec![Generator::conjugation(2)],
    )
    .expect("dual")
}

pub fn builtin(name: &str) -> Result<Algebra<Rational>> {
    match name {
        "reals" | "real" | "R" => Ok(reals()),
        "complex" | "C" => Ok(complex()),
        "quaternions" | "H" => Ok(quaternions()),
        "octonions" | "O" => Ok(octonions()),
        "matrices2" | "M2" => Ok(matrices2()),
        "dual" => Ok(dual()),
        other => Err(Error::UnknownAlgebra(other.to_string())),
    }
}

// --- spec documents --------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantEntry {
    pub k: usize,
    pub l: usize,
    pub p: usize,
    pub v: Rational,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub name: String,
    pub matrix: Vec<Vec<Rational>>,
}

/// On-disk description of an algebra (TOML or JSON).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlgebraSpecDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub dim: usize,
    pub basis: Vec<String>,
    #[serde(default)]
    pub flags: DeclaredFlags,
    #[serde(default)]
    pub constants: Vec<ConstantEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub generators: Vec<GeneratorSpec>,
}

impl AlgebraSpecDocument {
    pub fn parse(text: &str) -> Result<Self> {
        let trimmed = text.trim_start();
        if trimmed.starts_with('{') {
            serde_json::from_str(text).map_err(|e| Error::MalformedSpec(e.to_string()))
        } else {
            toml::from_str(text).map_err(|e| Error::MalformedSpec(e.to_string()))
        }
    }

    pub fn from_algebra(alg: &Algebra<Rational>) -> Self {
        AlgebraSpecDocument {
            name: Some(alg.name().to_string()),
            dim: alg.dim(),
            basis: alg.basis().to_vec(),
            flags: DeclaredFlags::all(alg.flags()),
            constants: alg
                .sparse_constants()
                .iter()
                .map(|(k, l, p, v)| ConstantEntry { k: *k, l: *l, p: *p, v: v.clone() })
                .collect(),
            generators: alg
                .generators()
                .iter()
                .map(|g| GeneratorSpec { name: g.name.clone(), matrix: g.matrix.clone() })
                .collect(),
        }
    }
}

pub fn load_algebra(doc: &AlgebraSpecDocument) -> Result<Algebra<Rational>> {
    if doc.basis.len() != doc.dim {
        return Err(Error::MalformedSpec(format!(
            "basis has {} labels but dim is {}",
            doc.basis.len(),
            doc.dim
        )));
    }
    let mut labels = doc.basis.clone();
    labels.sort();
    labels.dedup();
    if labels.len() != doc.dim {
        return Err(Error::MalformedSpec("basis labels must be distinct".into()));
    }
    if doc.basis.iter().any(|b| b == "x" || b.is_empty()) {
        return Err(Error::MalformedSpec("basis label `x` is reserved for the variable".into()));
    }
    Algebra::from_constants(
        doc.name.clone().unwrap_or_else(|| "custom".into()),
        doc.basis.clone(),
        doc.constants.iter().map(|c| (c.k, c.l, c.p, c.v.clone())),
        doc.flags,
        doc.generators.iter().map(|g| Generator { name: g.name.clone(), matrix: g.matrix.clone() }).collect(),
    )
}

pub fn load_algebra_file(path: &Path) -> Result<Algebra<Rational>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::MalformedSpec(format!("{}: {e}", path.display())))?;
    load_algebra(&AlgebraSpecDocument::parse(&text)?)
}

// --- elements --------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize)]
pub struct NormValue(pub f64);

impl NormValue {
    pub fn value(self) -> f64 {
        self.0
    }
}

impl fmt::Display for NormValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Coordinates `a^i` of `a = a^i e_i` bound to their algebra.
#[derive(Clone)]
pub struct Element<S: Scalar> {
    algebra: Arc<Algebra<S>>,
    coords: Vec<S>,
}

impl<S: Scalar> PartialEq for Element<S> {
    fn eq(&self, other: &Self) -> bool {
        self.same_algebra(other) && self.coords == other.coords
    }
}

impl<S: Scalar> fmt::Debug for Element<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.algebra.name, fmt_coords(&self.coords))
    }
}

impl<S: Scalar> Element<S> {
    pub fn new(algebra: &Arc<Algebra<S>>, coords: Vec<S>) -> Result<Self> {
        if coords.len() != algebra.dim() {
            return Err(Error::DimensionMismatch { expected: algebra.dim(), got: coords.len() });
        }
        Ok(Element { algebra: Arc::clone(algebra), coords })
    }

    pub(crate) fn from_raw(algebra: &Arc<Algebra<S>>, coords: Vec<S>) -> Self {
        debug_assert_eq!(coords.len(), algebra.dim());
        Element { algebra: Arc::clone(algebra), coords }
    }

    pub fn zero(algebra: &Arc<Algebra<S>>) -> Self {
        Self::from_raw(algebra, vec![S::zero(); algebra.dim()])
    }

    pub fn one(algebra: &Arc<Algebra<S>>) -> Self {
        Self::basis(algebra, 0)
    }

    pub fn basis(algebra: &Arc<Algebra<S>>, i: usize) -> Self {
        Self::from_raw(algebra, algebra.basis_coords(i))
    }

    pub fn scalar(algebra: &Arc<Algebra<S>>, s: S) -> Self {
        let mut c = vec![S::zero(); algebra.dim()];
        c[0] = s;
        Self::from_raw(algebra, c)
    }

    pub fn from_ints(algebra: &Arc<Algebra<S>>, v: &[i64]) -> Result<Self> {
        Self::new(algebra, v.iter().map(|&n| S::from_i64(n)).collect())
    }

    pub fn algebra(&self) -> &Arc<Algebra<S>> {
        &self.algebra
    }

    pub fn coords(&self) -> &[S] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<S> {
        self.coords
    }

    pub fn same_algebra(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.algebra, &other.algebra) || *self.algebra == *other.algebra
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.same_algebra(other) {
            Ok(())
        } else {
            Err(Error::AlgebraMismatch { left: self.algebra.name.clone(), right: other.algebra.name.clone() })
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(S::is_zero)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(Self::from_raw(&self.algebra, self.algebra.mul_coords(&self.coords, &other.coords)))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let c = self.coords.iter().zip(&other.coords).map(|(a, b)| a.clone() + b.clone()).collect();
        Ok(Self::from_raw(&self.algebra, c))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let c = self.coords.iter().zip(&other.coords).map(|(a, b)| a.clone() - b.clone()).collect();
        Ok(Self::from_raw(&self.algebra, c))
    }

    pub fn neg(&self) -> Self {
        Self::from_raw(&self.algebra, self.coords.iter().map(|a| -a.clone()).collect())
    }

    pub fn scale(&self, s: &S) -> Self {
        Self::from_raw(&self.algebra, self.coords.iter().map(|a| a.clone() * s.clone()).collect())
    }

    /// `[a, b] = ab - ba`
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.mul(other)?.sub(&other.mul(self)?)
    }

    /// `(a, b, c) = (ab)c - a(bc)`
    pub fn associator(&self, b: &Self, c: &Self) -> Result<Self> {
        self.mul(b)?.mul(c)?.sub(&self.mul(&b.mul(c)?)?)
    }

    /// Two-sided inverse from the left-multiplication system `a y = 1`,
    /// confirmed by `y a = 1`.
    pub fn inverse(&self) -> Result<Self> {
        let not_inv = || Error::NotInvertible(format!("{self:?}"));
        if !self.algebra.flags.unital {
            return Err(not_inv());
        }
        let one = self.algebra.unit_coords();
        let y = linalg::solve(&self.algebra.left_matrix(&self.coords), &one).ok_or_else(not_inv)?;
        if !linalg::is_singular(&self.algebra.left_matrix(&self.coords))
            && coords_eq(&self.algebra.mul_coords(&y, &self.coords), &one)
        {
            Ok(Self::from_raw(&self.algebra, y))
        } else {
            Err(not_inv())
        }
    }

    /// Euclidean norm of the coordinates.
    pub fn norm(&self) -> NormValue {
        NormValue(self.coords.iter().map(|c| c.to_f64().powi(2)).sum::<f64>().sqrt())
    }

    pub fn pow(&self, n: usize) -> Self {
        let mut acc = Self::one(&self.algebra);
        for _ in 0..n {
            acc = Self::from_raw(&self.algebra, self.algebra.mul_coords(&acc.coords, &self.coords));
        }
        acc
    }

    pub fn to_float(&self, float_alg: &Arc<Algebra<f64>>) -> Element<f64> {
        Element::from_raw(float_alg, self.coords.iter().map(|c| c.to_f64()).collect())
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.same_algebra(other)
            && self.coords.iter().zip(&other.coords).all(|(a, b)| (a.to_f64() - b.to_f64()).abs() <= tol)
    }

    /// Human-readable form over the basis labels, e.g. `1 + 2i - 1/2k`.
    pub fn pretty(&self) -> String {
        let mut out = String::new();
        for (i, c) in self.coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let label = &self.algebra.basis[i];
            let s = c.to_string();
            let (neg, mag) = match s.strip_prefix('-') {
                Some(m) => (true, m.to_string()),
                None => (false, s),
            };
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let unit_label = i == 0 && self.algebra.flags.unital;
            match (mag.as_str(), unit_label) {
                (_, true) => out.push_str(&mag),
                ("1", false) => out.push_str(label),
                _ => {
                    out.push_str(&mag);
                    out.push('*');
                    out.push_str(label);
                }
            }
        }
        if out.is_empty() {
            "0".into()
        } else {
            out
        }
    }
}

impl<S: Scalar> fmt::Display for Element<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.pretty())
    }
}
