//! Elements of `A ⊗ A` acting on linear maps of `A`.
//!
//! A term `(a ⊗ b, G)` acts as `x -> (a G(x)) b`, where `G` is the identity
//! `δ` or one of the algebra's registered generators. Every linear map on an
//! associative algebra with nonsingular component matrix is a sum of plain
//! `a x b` terms; algebras such as `C` additionally need conjugation.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::algebra::{Algebra, DeclaredFlags, Element};
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::scalar::{Rational, Scalar};

/// Name of the identity generator `δ`.
pub const IDENTITY: &str = "id";

/// Parenthesization of `a x b` in a nonassociative algebra.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Convention {
    /// `(a x) b`
    #[default]
    LeftFirst,
    /// `a (x b)`
    RightFirst,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TensorTerm<S: Scalar> {
    pub left: Element<S>,
    pub right: Element<S>,
    /// 0 is the identity, `i > 0` is `algebra.generators()[i - 1]`.
    pub generator: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TensorOperator<S: Scalar> {
    algebra: Arc<Algebra<S>>,
    terms: Vec<TensorTerm<S>>,
}

/// Coordinates `g^{ij}` of `Σ g^{ij} e_i ⊗ e_j` for one generator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StandardComponents<S: Scalar> {
    pub generator: String,
    pub g: Matrix<S>,
}

/// Coordinates `f^k_m` of a linear map: the image of `e_m` has coordinate
/// `k` equal to `f[k][m]`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearMapMatrix<S: Scalar> {
    pub f: Matrix<S>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Representation<S: Scalar> {
    /// `f = Σ g^{ij} e_i x e_j`
    Standard(StandardComponents<S>),
    /// Needs generators beyond the identity.
    Extended(Vec<StandardComponents<S>>),
}

fn generator_name<S: Scalar>(alg: &Algebra<S>, index: usize) -> String {
    if index == 0 {
        IDENTITY.to_string()
    } else {
        alg.generators()[index - 1].name.clone()
    }
}

fn generator_index<S: Scalar>(alg: &Algebra<S>, name: &str) -> Result<usize> {
    if name == IDENTITY || name == "δ" {
        return Ok(0);
    }
    alg.generators()
        .iter()
        .position(|g| g.name == name)
        .map(|i| i + 1)
        .ok_or_else(|| Error::InvalidArgument(format!("algebra {} has no generator `{name}`", alg.name())))
}

fn apply_generator<S: Scalar>(alg: &Algebra<S>, index: usize, x: &[S]) -> Vec<S> {
    if index == 0 {
        x.to_vec()
    } else {
        alg.generators()[index - 1].apply(x)
    }
}

impl<S: Scalar> TensorOperator<S> {
    pub fn new(algebra: &Arc<Algebra<S>>, terms: Vec<TensorTerm<S>>) -> Result<Self> {
        for t in &terms {
            for e in [&t.left, &t.right] {
                if **e.algebra() != **algebra {
                    return Err(Error::AlgebraMismatch {
                        left: algebra.name().to_string(),
                        right: e.algebra().name().to_string(),
                    });
                }
            }
            if t.generator > algebra.generators().len() {
                return Err(Error::InvalidArgument(format!("generator index {} out of range", t.generator)));
            }
        }
        Ok(TensorOperator { algebra: Arc::clone(algebra), terms })
    }

    /// `a ⊗ b` acting through the identity generator.
    pub fn simple(a: &Element<S>, b: &Element<S>) -> Result<Self> {
        Self::new(a.algebra(), vec![TensorTerm { left: a.clone(), right: b.clone(), generator: 0 }])
    }

    /// `(a ⊗ b) ∘ G` for a named generator.
    pub fn with_generator(a: &Element<S>, b: &Element<S>, generator: &str) -> Result<Self> {
        let index = generator_index(a.algebra(), generator)?;
        Self::new(a.algebra(), vec![TensorTerm { left: a.clone(), right: b.clone(), generator: index }])
    }

    pub fn identity(algebra: &Arc<Algebra<S>>) -> Self {
        let one = Element::one(algebra);
        TensorOperator {
            algebra: Arc::clone(algebra),
            terms: vec![TensorTerm { left: one.clone(), right: one, generator: 0 }],
        }
    }

    pub fn algebra(&self) -> &Arc<Algebra<S>> {
        &self.algebra
    }

    pub fn terms(&self) -> &[TensorTerm<S>] {
        &self.terms
    }

    pub fn apply(&self, x: &Element<S>) -> Result<Element<S>> {
        self.apply_with(x, Convention::LeftFirst)
    }

    pub fn apply_with(&self, x: &Element<S>, convention: Convention) -> Result<Element<S>> {
        if **x.algebra() != *self.algebra {
            return Err(Error::AlgebraMismatch {
                left: self.algebra.name().to_string(),
                right: x.algebra().name().to_string(),
            });
        }
        let alg = &*self.algebra;
        let mut acc = vec![S::zero(); alg.dim()];
        for t in &self.terms {
            let gx = apply_generator(alg, t.generator, x.coords());
            let v = match convention {
                Convention::LeftFirst => alg.mul_coords(&alg.mul_coords(t.left.coords(), &gx), t.right.coords()),
                Convention::RightFirst => alg.mul_coords(t.left.coords(), &alg.mul_coords(&gx, t.right.coords())),
            };
            for (a, b) in acc.iter_mut().zip(v) {
                *a += b;
            }
        }
        Element::new(&self.algebra, acc)
    }

    /// Product in `A ⊗ A` matching composition of the induced maps:
    /// `(a ⊗ b) ∘ (c ⊗ d) = (ac) ⊗ (db)`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if *self.algebra != *other.algebra {
            return Err(Error::AlgebraMismatch {
                left: self.algebra.name().to_string(),
                right: other.algebra.name().to_string(),
            });
        }
        if !self.algebra.is_associative() {
            return Err(Error::UnsupportedForNonassociative(self.algebra.name().to_string()));
        }
        if self.terms.iter().chain(&other.terms).any(|t| t.generator != 0) {
            return Err(Error::InvalidArgument("composition is defined for identity-generator terms only".into()));
        }
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for t1 in &self.terms {
            for t2 in &other.terms {
                terms.push(TensorTerm {
                    left: t1.left.mul(&t2.left)?,
                    right: t2.right.mul(&t1.right)?,
                    generator: 0,
                });
            }
        }
        Ok(TensorOperator { algebra: Arc::clone(&self.algebra), terms })
    }

    /// Standard components per generator that occurs in the operator, in
    /// generator order.
    pub fn standard_components(&self) -> Vec<StandardComponents<S>> {
        let d = self.algebra.dim();
        let n_gen = self.algebra.generators().len() + 1;
        let mut blocks: Vec<Option<Matrix<S>>> = vec![None; n_gen];
        for t in &self.terms {
            let g = blocks[t.generator].get_or_insert_with(|| vec![vec![S::zero(); d]; d]);
            for (i, a) in t.left.coords().iter().enumerate() {
                if a.is_exact_zero() {
                    continue;
                }
                for (j, b) in t.right.coords().iter().enumerate() {
                    g[i][j] += a.clone() * b.clone();
                }
            }
        }
        blocks
            .into_iter()
            .enumerate()
            .filter_map(|(idx, g)| g.map(|g| StandardComponents { generator: generator_name(&self.algebra, idx), g }))
            .collect()
    }

    pub fn from_components(algebra: &Arc<Algebra<S>>, components: &[StandardComponents<S>]) -> Result<Self> {
        let mut terms = Vec::new();
        for comp in components {
            let index = generator_index(algebra, &comp.generator)?;
            for (i, row) in comp.g.iter().enumerate() {
                for (j, v) in row.iter().enumerate() {
                    if v.is_exact_zero() {
                        continue;
                    }
                    terms.push(TensorTerm {
                        left: Element::basis(algebra, i).scale(v),
                        right: Element::basis(algebra, j),
                        generator: index,
                    });
                }
            }
        }
        Self::new(algebra, terms)
    }

    /// Merges terms sharing a generator through their standard components.
    pub fn normalize(&self) -> Self {
        Self::from_components(&self.algebra, &self.standard_components()).expect("components of a valid operator")
    }

    pub fn to_matrix(&self) -> LinearMapMatrix<S> {
        let alg = &*self.algebra;
        let d = alg.dim();
        let mut f = vec![vec![S::zero(); d]; d];
        for comp in self.standard_components() {
            let index = generator_index(alg, &comp.generator).expect("own generator");
            let block = generator_block(alg, index);
            for (i, row) in comp.g.iter().enumerate() {
                for (j, v) in row.iter().enumerate() {
                    if v.is_exact_zero() {
                        continue;
                    }
                    for k in 0..d {
                        for m in 0..d {
                            f[k][m] += v.clone() * block[k * d + m][i * d + j].clone();
                        }
                    }
                }
            }
        }
        LinearMapMatrix { f }
    }
}

impl<S: Scalar> LinearMapMatrix<S> {
    pub fn identity(dim: usize) -> Self {
        LinearMapMatrix { f: linalg::identity(dim) }
    }

    /// Matrix of a registered generator.
    pub fn of_generator(alg: &Algebra<S>, name: &str) -> Result<Self> {
        let index = generator_index(alg, name)?;
        Ok(if index == 0 { Self::identity(alg.dim()) } else { LinearMapMatrix { f: alg.generators()[index - 1].matrix.clone() } })
    }

    pub fn apply(&self, x: &[S]) -> Vec<S> {
        linalg::mat_vec(&self.f, x)
    }

    fn vectorized(&self) -> Vec<S> {
        self.f.iter().flat_map(|r| r.iter().cloned()).collect()
    }
}

/// The matrix `B` with rows `(k, m)` and columns `(i, j)`,
/// `B[(k,m),(i,j)] = Σ_q C^q_{im} C^k_{qj}`: coordinate `k` of `(e_i e_m) e_j`.
pub fn component_solve_matrix<S: Scalar>(alg: &Algebra<S>) -> Matrix<S> {
    generator_block(alg, 0)
}

/// `B` composed with generator `index`: column `(i,j)` holds the
/// vectorized matrix of `x -> (e_i G(x)) e_j`.
fn generator_block<S: Scalar>(alg: &Algebra<S>, index: usize) -> Matrix<S> {
    let d = alg.dim();
    let mut b = vec![vec![S::zero(); d * d]; d * d];
    for m in 0..d {
        let gx = apply_generator(alg, index, &alg.basis_coords(m));
        for i in 0..d {
            let left = alg.mul_coords(&alg.basis_coords(i), &gx);
            for j in 0..d {
                let v = alg.mul_coords(&left, &alg.basis_coords(j));
                for (k, c) in v.into_iter().enumerate() {
                    b[k * d + m][i * d + j] = c;
                }
            }
        }
    }
    b
}

/// Components of the composition `g ∘ h` (identity generator):
/// `(g∘h)^{ij} = Σ g^{ab} h^{cd} C^i_{ac} C^j_{db}`.
pub fn standard_components_mul<S: Scalar>(
    alg: &Algebra<S>,
    g: &StandardComponents<S>,
    h: &StandardComponents<S>,
) -> Result<StandardComponents<S>> {
    if g.generator != IDENTITY || h.generator != IDENTITY {
        return Err(Error::InvalidArgument("component product is defined for the identity generator".into()));
    }
    if !alg.is_associative() {
        return Err(Error::UnsupportedForNonassociative(alg.name().to_string()));
    }
    let d = alg.dim();
    let mut out = vec![vec![S::zero(); d]; d];
    let consts = alg.sparse_constants();
    for (a, c, i, c1) in consts {
        for (dd, b, j, c2) in consts {
            let gv = &g.g[*a][*b];
            let hv = &h.g[*c][*dd];
            if gv.is_exact_zero() || hv.is_exact_zero() {
                continue;
            }
            out[*i][*j] += gv.clone() * hv.clone() * c1.clone() * c2.clone();
        }
    }
    Ok(StandardComponents { generator: IDENTITY.into(), g: out })
}

fn unvectorize<S: Scalar>(generator: String, v: &[S], d: usize) -> StandardComponents<S> {
    StandardComponents { generator, g: v.chunks(d).map(<[S]>::to_vec).collect() }
}

/// Finds standard components of a linear map. Tries the identity generator
/// alone first, then the block system over all registered generators.
pub fn solve_components<S: Scalar>(alg: &Algebra<S>, f: &LinearMapMatrix<S>) -> Result<Representation<S>> {
    if !S::EXACT {
        return Err(Error::ExactPathRequired("solve_components"));
    }
    let d = alg.dim();
    let rhs = f.vectorized();
    let b = component_solve_matrix(alg);
    if let Some(x) = linalg::solve(&b, &rhs) {
        return Ok(Representation::Standard(unvectorize(IDENTITY.into(), &x, d)));
    }
    let n_gen = alg.generators().len() + 1;
    let blocks: Vec<Matrix<S>> = (0..n_gen).map(|i| generator_block(alg, i)).collect();
    let stacked = hstack(&blocks);
    match linalg::solve(&stacked, &rhs) {
        Some(x) => Ok(Representation::Extended(
            x.chunks(d * d)
                .enumerate()
                .filter(|(_, chunk)| chunk.iter().any(|v| !v.is_zero()))
                .map(|(i, chunk)| unvectorize(generator_name(alg, i), chunk, d))
                .collect(),
        )),
        None => Err(Error::NoRepresentation { rank: linalg::rank(&stacked), needed: d * d }),
    }
}

fn hstack<S: Scalar>(blocks: &[Matrix<S>]) -> Matrix<S> {
    let rows = blocks[0].len();
    (0..rows).map(|r| blocks.iter().flat_map(|b| b[r].iter().cloned()).collect()).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RepresentationBasis {
    /// Generators spanning `L(A;A)` together, identity first.
    pub generators: Vec<String>,
    /// Rank of the component matrix `B`.
    pub rank: usize,
    /// Rank reached by the chosen generators.
    pub span_rank: usize,
    /// `dim²`
    pub needed: usize,
    pub complete: bool,
}

impl RepresentationBasis {
    pub fn display_generators(&self) -> String {
        let names: Vec<&str> = self.generators.iter().map(|g| if g == IDENTITY { "δ" } else { g.as_str() }).collect();
        format!("{{{}}}", names.join(", "))
    }
}

/// Rank analysis of `B`; adds registered generators until `L(A;A)` is spanned.
pub fn representation_basis(alg: &Algebra<Rational>) -> RepresentationBasis {
    let needed = alg.dim() * alg.dim();
    let b = component_solve_matrix(alg);
    let rank = linalg::rank_exact(&b);
    let mut generators = vec![IDENTITY.to_string()];
    let mut blocks = vec![b];
    let mut span_rank = rank;
    for (i, g) in alg.generators().iter().enumerate() {
        if span_rank == needed {
            break;
        }
        let mut trial = blocks.clone();
        trial.push(generator_block(alg, i + 1));
        let r = linalg::rank_exact(&hstack(&trial));
        if r > span_rank {
            blocks = trial;
            span_rank = r;
            generators.push(g.name.clone());
        }
    }
    RepresentationBasis { generators, rank, span_rank, needed, complete: span_rank == needed }
}

/// The algebra `A1 ⊗ A2` with `(a ⊗ b)(c ⊗ d) = (ac) ⊗ (bd)`; basis
/// `e_i ⊗ f_j` at index `i * dim2 + j`.
pub fn tensor_algebra(a1: &Algebra<Rational>, a2: &Algebra<Rational>) -> Result<Algebra<Rational>> {
    let d2 = a2.dim();
    let basis = a1
        .basis()
        .iter()
        .flat_map(|x| a2.basis().iter().map(move |y| format!("{x}⊗{y}")))
        .collect();
    let mut entries = Vec::new();
    for (k1, l1, p1, c1) in a1.sparse_constants() {
        for (k2, l2, p2, c2) in a2.sparse_constants() {
            entries.push((k1 * d2 + k2, l1 * d2 + l2, p1 * d2 + p2, c1.clone() * c2.clone()));
        }
    }
    Algebra::from_constants(format!("{}⊗{}", a1.name(), a2.name()), basis, entries, DeclaredFlags::default(), vec![])
}

impl<S: Scalar> StandardComponents<S> {
    pub fn is_zero(&self) -> bool {
        self.g.iter().flatten().all(S::is_zero)
    }

    pub fn pretty(&self, alg: &Algebra<S>) -> String {
        let mut parts = Vec::new();
        for (i, row) in self.g.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                if !v.is_zero() {
                    parts.push((i, j, v.clone()));
                }
            }
        }
        let gen_suffix = if self.generator == IDENTITY { None } else { Some(self.generator.as_str()) };
        if let ([(0, 0, v)], Some(name)) = (parts.as_slice(), gen_suffix) {
            return format!("{v}·{name}");
        }
        let body = if parts.is_empty() {
            "0".to_string()
        } else {
            let mut body = String::new();
            for (n, (i, j, v)) in parts.iter().enumerate() {
                let term = format!("{v}·({}⊗{})", alg.basis()[*i], alg.basis()[*j]);
                match (n, term.strip_prefix('-')) {
                    (0, _) => body.push_str(&term),
                    (_, Some(rest)) => body.push_str(&format!(" - {rest}")),
                    (_, None) => body.push_str(&format!(" + {term}")),
                }
            }
            body
        };
        match gen_suffix {
            Some(name) => format!("({body})∘{name}"),
            None => body,
        }
    }
}

impl<S: Scalar> Representation<S> {
    pub fn components(&self) -> Vec<&StandardComponents<S>> {
        match self {
            Representation::Standard(c) => vec![c],
            Representation::Extended(cs) => cs.iter().collect(),
        }
    }

    pub fn pretty(&self, alg: &Algebra<S>) -> String {
        let parts: Vec<String> = self.components().iter().map(|c| c.pretty(alg)).collect();
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

impl<S: Scalar> fmt::Display for LinearMapMatrix<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .f
            .iter()
            .map(|r| r.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", "))
            .collect();
        write!(f, "[{}]", rows.join("; "))
    }
}
