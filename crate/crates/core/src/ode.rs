//! Integration of differential specifications `∂y(x)(h) = F(x, h)` by
//! power-series reconstruction.
//!
//! The higher derivatives of a solution are forced to be the iterated
//! derivatives of `F`; a solution can only exist when every one of them is
//! symmetric in its direction slots. When all are symmetric the Taylor
//! polynomial is assembled and checked against `F` exactly.

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::algebra::{builtin, load_algebra, Algebra, AlgebraSpecDocument, Element};
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::form::{derivative, simplify, MultilinearForm, Slot, SymmetryClass, Word};
use crate::scalar::{Rational, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub struct DifferentialSpec {
    /// Order-1 form in `x` and one direction `h`.
    pub form: MultilinearForm<Rational>,
    pub x0: Element<Rational>,
    pub y0: Element<Rational>,
}

impl DifferentialSpec {
    pub fn new(form: MultilinearForm<Rational>, x0: Element<Rational>, y0: Element<Rational>) -> Result<Self> {
        if form.order() != 1 {
            return Err(Error::MalformedSpec(format!("right-hand side must have one direction slot, found order {}", form.order())));
        }
        if !form.is_polynomial() {
            return Err(Error::InverseNotAllowed(form.to_string()));
        }
        if !x0.same_algebra(&y0) || **form.algebra() != **x0.algebra() {
            return Err(Error::AlgebraMismatch { left: form.algebra().name().into(), right: x0.algebra().name().into() });
        }
        Ok(DifferentialSpec { form, x0, y0 })
    }

    /// Spec with `x0 = y0 = 0`.
    pub fn at_origin(form: MultilinearForm<Rational>) -> Result<Self> {
        let zero = Element::zero(form.algebra());
        Self::new(form, zero.clone(), zero)
    }

    /// Spec whose right-hand side is the derivative of `y`, with the initial
    /// value taken from `y` itself.
    pub fn from_solution(y: &Expr<Rational>, algebra: &Arc<Algebra<Rational>>, x0: Element<Rational>) -> Result<Self> {
        let y0 = y.eval(&x0)?;
        Self::new(derivative(y, algebra, 1)?, x0, y0)
    }

    pub fn algebra(&self) -> &Arc<Algebra<Rational>> {
        self.form.algebra()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    pub order: usize,
    pub transposition: (usize, usize),
    /// `G - G∘σ` for the failing derivative `G` and transposition `σ`.
    pub difference: MultilinearForm<Rational>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IntegrabilityReport {
    pub integrable: bool,
    pub witness: Option<Witness>,
}

impl fmt::Display for IntegrabilityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.witness {
            None => write!(f, "integrable"),
            Some(w) => write!(
                f,
                "not integrable: derivative of order {} changes under h{} <-> h{}; difference {}",
                w.order, w.transposition.0, w.transposition.1, w.difference
            ),
        }
    }
}

#[derive(Clone, Debug)]
pub enum Integration {
    Solved(Expr<Rational>),
    NotIntegrable(IntegrabilityReport),
}

/// `∂^{m-1}` of the right-hand side with fresh slots `h2..hm`; `m = 1` is
/// the right-hand side itself.
pub fn induced_derivative(spec: &DifferentialSpec, m: usize) -> MultilinearForm<Rational> {
    assert!(m >= 1, "orders start at 1");
    let mut g = spec.form.clone();
    for _ in 1..m {
        g = g.differentiate();
    }
    g
}

/// Checks every induced derivative up to `deg_x(F) + 1` for symmetry.
pub fn integrability(spec: &DifferentialSpec) -> IntegrabilityReport {
    let top = spec.form.x_degree() + 1;
    let mut g = spec.form.clone();
    for m in 2..=top {
        g = g.differentiate();
        let report = g.symmetry_class();
        if report.class != SymmetryClass::Symmetric {
            let (a, b) = report.witness.expect("asymmetric forms carry a witness");
            let difference = g.sub(&g.swap_slots(a, b)).simplified();
            return IntegrabilityReport { integrable: false, witness: Some(Witness { order: m, transposition: (a, b), difference }) };
        }
    }
    IntegrabilityReport { integrable: true, witness: None }
}

pub fn integrate(spec: &DifferentialSpec) -> Result<Integration> {
    let report = integrability(spec);
    if !report.integrable {
        return Ok(Integration::NotIntegrable(report));
    }
    let alg = spec.algebra();
    let direction = Expr::Sum(vec![Expr::Var, Expr::Const(spec.x0.neg())]);
    let mut terms = vec![Expr::Const(spec.y0.clone())];
    let mut g = spec.form.clone();
    let mut factorial = Rational::one();
    for m in 1..=spec.form.x_degree() + 1 {
        if m > 1 {
            g = g.differentiate();
        }
        factorial = factorial * Rational::integer(m as i64);
        terms.push(g.scale(&factorial.recip()).instantiate(&spec.x0, &direction)?);
    }
    let y = simplify(&Expr::Sum(terms), alg)?;
    if !verify_solution(&y, spec)? {
        return Err(Error::Inconsistent(format!("reconstructed {y} does not satisfy the differential specification")));
    }
    Ok(Integration::Solved(y))
}

/// `∂y ≡ F` under exact expansion and `y(x0) = y0`.
pub fn verify_solution(y: &Expr<Rational>, spec: &DifferentialSpec) -> Result<bool> {
    let dy = derivative(y, spec.algebra(), 1)?;
    Ok(dy.canonical_expand()? == spec.form.canonical_expand()? && y.eval(&spec.x0)? == spec.y0)
}

// --- spec files ---------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AlgebraSource {
    Name(String),
    Inline(AlgebraSpecDocument),
}

impl AlgebraSource {
    pub fn load(&self) -> Result<Algebra<Rational>> {
        match self {
            AlgebraSource::Name(n) => builtin(n),
            AlgebraSource::Inline(doc) => load_algebra(doc),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WordEntry {
    /// Slot pattern such as `"HXX"`: one `H`, any number of `X`.
    pub slots: String,
    /// `slots.len() + 1` coordinate vectors; all units when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constants: Option<Vec<Vec<Rational>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prefactor: Option<Rational>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpecDocument {
    pub algebra: AlgebraSource,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<Vec<Rational>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y0: Option<Vec<Rational>>,
    #[serde(default)]
    pub words: Vec<WordEntry>,
}

impl SpecDocument {
    pub fn parse(text: &str) -> Result<Self> {
        if text.trim_start().starts_with('{') {
            serde_json::from_str(text).map_err(|e| Error::MalformedSpec(e.to_string()))
        } else {
            toml::from_str(text).map_err(|e| Error::MalformedSpec(e.to_string()))
        }
    }

    pub fn to_spec(&self) -> Result<DifferentialSpec> {
        let alg = Arc::new(self.algebra.load()?);
        let vector = |v: &Option<Vec<Rational>>| match v {
            Some(c) => Element::new(&alg, c.clone()),
            None => Ok(Element::zero(&alg)),
        };
        let mut words = Vec::with_capacity(self.words.len());
        for (n, w) in self.words.iter().enumerate() {
            words.push(parse_word(&alg, w).map_err(|e| Error::MalformedSpec(format!("word {}: {e}", n + 1)))?);
        }
        let form = MultilinearForm::new(&alg, 1, words)?;
        DifferentialSpec::new(form, vector(&self.x0)?, vector(&self.y0)?)
    }

    /// Inverse of `to_spec` for polynomial right-hand sides.
    pub fn from_spec(spec: &DifferentialSpec, algebra: AlgebraSource) -> Self {
        let words = spec
            .form
            .words()
            .iter()
            .map(|w| WordEntry {
                slots: w.slots.iter().map(|s| if matches!(s, Slot::X) { 'X' } else { 'H' }).collect(),
                constants: Some(w.constants.iter().map(|c| c.coords().to_vec()).collect()),
                prefactor: (w.prefactor != Rational::one()).then(|| w.prefactor.clone()),
            })
            .collect();
        SpecDocument {
            algebra,
            x0: Some(spec.x0.coords().to_vec()),
            y0: Some(spec.y0.coords().to_vec()),
            words,
        }
    }
}

fn parse_word(alg: &Arc<Algebra<Rational>>, w: &WordEntry) -> Result<Word<Rational>> {
    let slots: Vec<Slot<Rational>> = w
        .slots
        .chars()
        .filter(|c| !c.is_whitespace())
        .map(|c| match c {
            'X' | 'x' => Ok(Slot::X),
            'H' | 'h' => Ok(Slot::H(1)),
            other => Err(Error::MalformedSpec(format!("unknown slot `{other}` in \"{}\"", w.slots))),
        })
        .collect::<Result<_>>()?;
    if slots.iter().filter(|s| matches!(s, Slot::H(_))).count() != 1 {
        return Err(Error::MalformedSpec(format!("slot pattern \"{}\" needs exactly one H", w.slots)));
    }
    let constants = match &w.constants {
        Some(cs) => {
            if cs.len() != slots.len() + 1 {
                return Err(Error::MalformedSpec(format!("{} slots need {} constants, got {}", slots.len(), slots.len() + 1, cs.len())));
            }
            cs.iter().map(|c| Element::new(alg, c.clone())).collect::<Result<Vec<_>>>()?
        }
        None => vec![Element::one(alg); slots.len() + 1],
    };
    Ok(Word { prefactor: w.prefactor.clone().unwrap_or_else(Rational::one), constants, slots })
}

pub fn load_spec(path: &Path) -> Result<DifferentialSpec> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::MalformedSpec(format!("{}: {e}", path.display())))?;
    SpecDocument::parse(&text)?.to_spec()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::quaternions;
    use crate::expr::parse_expr;
    use crate::form::expressions_equal;

    const CUBE: &str = r#"
algebra = "quaternions"

[[words]]
slots = "HXX"

[[words]]
slots = "XHX"

[[words]]
slots = "XXH"
"#;

    const THREE_XXH: &str = r#"
algebra = "quaternions"

[[words]]
slots = "XXH"
prefactor = "3"
"#;

    fn solved(i: Integration) -> Expr<Rational> {
        match i {
            Integration::Solved(y) => y,
            Integration::NotIntegrable(r) => panic!("{r}"),
        }
    }

    #[test]
    fn cube_example() {
        let spec = SpecDocument::parse(CUBE).unwrap().to_spec().unwrap();
        let y = solved(integrate(&spec).unwrap());
        assert_eq!(y.to_string(), "x^3");
        assert!(verify_solution(&y, &spec).unwrap());
    }

    #[test]
    fn rejected_example() {
        let spec = SpecDocument::parse(THREE_XXH).unwrap().to_spec().unwrap();
        let g2 = induced_derivative(&spec, 2);
        assert_eq!(g2.to_string(), "3·h2·x·h1 + 3·x·h2·h1");
        let Integration::NotIntegrable(r) = integrate(&spec).unwrap() else { panic!("should be rejected") };
        let w = r.witness.unwrap();
        assert_eq!((w.order, w.transposition), (2, (1, 2)));
        assert!(!w.difference.canonical_expand().unwrap().is_zero());
        let alg = spec.algebra().clone();
        assert!(!verify_solution(&parse_expr("x*x*x", &alg).unwrap(), &spec).unwrap());
    }

    #[test]
    fn constant_coefficients() {
        let a = Arc::new(quaternions());
        let doc = r#"{
            "algebra": "quaternions",
            "x0": [1, 0, 0, 0],
            "y0": ["1/2", 0, 0, 1],
            "words": [
                {"slots": "H", "constants": [[0,1,0,0],[0,0,1,0]]},
                {"slots": "H", "constants": [[0,0,0,1],[1,0,0,0]], "prefactor": "-2"}
            ]
        }"#;
        let spec = SpecDocument::parse(doc).unwrap().to_spec().unwrap();
        let y = solved(integrate(&spec).unwrap());
        let expected = parse_expr("i*(x - 1)*j - 2*k*(x - 1) + (1/2,0,0,1)", &a).unwrap();
        assert!(expressions_equal(&y, &expected, &a).unwrap(), "{y}");
        assert!(induced_derivative(&spec, 2).words().is_empty());
    }

    #[test]
    fn zero_right_hand_side() {
        let a = Arc::new(quaternions());
        let y0 = Element::from_ints(&a, &[1, 2, 3, 4]).unwrap();
        let spec = DifferentialSpec::new(MultilinearForm::zero(&a, 1), Element::zero(&a), y0.clone()).unwrap();
        let y = solved(integrate(&spec).unwrap());
        assert!(verify_solution(&Expr::Const(y0), &spec).unwrap());
        assert_eq!(y.to_string(), "1 + 2*i + 3*j + 4*k");
    }

    #[test]
    fn round_trip_from_solution() {
        let a = Arc::new(quaternions());
        let y = parse_expr("i*x*j*x + x*k*x*x - (1,2,0,1)*x + j", &a).unwrap();
        let x0 = Element::from_ints(&a, &[1, -1, 0, 2]).unwrap();
        let spec = DifferentialSpec::from_solution(&y, &a, x0).unwrap();
        let back = solved(integrate(&spec).unwrap());
        assert!(expressions_equal(&back, &y, &a).unwrap());
    }

    #[test]
    fn malformed_specs() {
        let bad = "algebra = \"quaternions\"\n[[words]]\nslots = \"XX\"\n";
        assert!(matches!(SpecDocument::parse(bad).unwrap().to_spec(), Err(Error::MalformedSpec(_))));
        let bad = "algebra = \"quaternions\"\n[[words]]\nslots = \"HX\"\nconstants = [[1,0,0,0]]\n";
        assert!(matches!(SpecDocument::parse(bad).unwrap().to_spec(), Err(Error::MalformedSpec(_))));
        let bad = "algebra = \"nope\"\n";
        assert!(SpecDocument::parse(bad).unwrap().to_spec().is_err());
        let a = Arc::new(quaternions());
        let inv = derivative(&parse_expr("inv(x)", &a).unwrap(), &a, 1).unwrap();
        assert!(matches!(DifferentialSpec::at_origin(inv), Err(Error::InverseNotAllowed(_))));
    }

    #[test]
    fn document_round_trip() {
        let spec = SpecDocument::parse(THREE_XXH).unwrap().to_spec().unwrap();
        let doc = SpecDocument::from_spec(&spec, AlgebraSource::Name("quaternions".into()));
        let json = serde_json::to_string(&doc).unwrap();
        assert_eq!(SpecDocument::parse(&json).unwrap().to_spec().unwrap(), spec);
    }
}
