//! Invariant suites run by `ncalc algebra --check` and `ncalc selftest`.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::{builtin, Algebra, Element};
use crate::error::Result;
use crate::expr::{parse_expr, Expr};
use crate::form::{derivative, derivative_recursive, expressions_equal, taylor, SymmetryClass};
use crate::numeric::check_derivative;
use crate::ode::{integrate, DifferentialSpec, Integration, SpecDocument};
use crate::scalar::{Rational, Scalar};
use crate::series::{exp, exp_sum_check, shuffle_words};
use crate::tensor::{representation_basis, solve_components, Convention, LinearMapMatrix, TensorOperator};

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn new(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        CheckResult { name: name.into(), passed, detail: detail.into() }
    }
}

/// Element with coordinates `p/q`, `|p| <= 5`, `1 <= q <= 3`.
pub fn random_element(rng: &mut impl Rng, alg: &Arc<Algebra<Rational>>) -> Element<Rational> {
    let coords = (0..alg.dim()).map(|_| Rational::new(rng.random_range(-5..=5), rng.random_range(1..=3))).collect();
    Element::new(alg, coords).expect("dimension matches")
}

/// Random monomial `a0 x a1 ... x an` with small integer constants.
pub fn random_monomial(rng: &mut impl Rng, alg: &Arc<Algebra<Rational>>, degree: usize) -> Expr<Rational> {
    let constants: Vec<Element<Rational>> = (0..=degree)
        .map(|_| {
            let v: Vec<i64> = (0..alg.dim()).map(|_| rng.random_range(-2..=2)).collect();
            Element::from_ints(alg, &v).expect("dimension matches")
        })
        .collect();
    Expr::monomial(&constants)
}

fn all<T>(items: &[T], f: impl Fn(&T) -> Result<bool>) -> Result<bool> {
    for i in items {
        if !f(i)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Algebraic invariants of one algebra on `samples` random tuples.
pub fn algebra_checks(alg: &Arc<Algebra<Rational>>, seed: u64, samples: usize) -> Result<Vec<CheckResult>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tuples: Vec<[Element<Rational>; 4]> = (0..samples)
        .map(|_| std::array::from_fn(|_| random_element(&mut rng, alg)))
        .collect();
    let flags = alg.flags();
    let mut out = Vec::new();
    let alpha = Rational::new(-7, 3);

    let ok = all(&tuples, |[a, b, c, _]| {
        let left = a.scale(&alpha).add(b)?.mul(c)?;
        let right = c.mul(&a.scale(&alpha).add(b)?)?;
        Ok(left == a.mul(c)?.scale(&alpha).add(&b.mul(c)?)? && right == c.mul(a)?.scale(&alpha).add(&c.mul(b)?)?)
    })?;
    out.push(CheckResult::new("bilinearity", ok, format!("{samples} triples")));

    let ok = all(&tuples, |[a, b, ..]| Ok(a.commutator(b)? == b.commutator(a)?.neg()))?;
    out.push(CheckResult::new("commutator antisymmetry", ok, format!("{samples} pairs")));

    if flags.associative {
        let ok = all(&tuples, |[a, b, c, _]| Ok(a.associator(b, c)?.is_zero()))?;
        out.push(CheckResult::new("associator vanishes", ok, format!("{samples} triples")));
    }

    let ok = all(&tuples, |[a, b, c, d]| {
        let lhs = a
            .mul(&b.associator(c, d)?)?
            .sub(&a.mul(b)?.associator(c, d)?)?
            .add(&a.associator(&b.mul(c)?, d)?)?
            .sub(&a.associator(b, &c.mul(d)?)?)?
            .add(&a.associator(b, c)?.mul(d)?)?;
        Ok(lhs.is_zero())
    })?;
    out.push(CheckResult::new("five-term associator identity", ok, format!("{samples} quadruples")));

    let ok = all(&tuples, |[a, b, x, _]| {
        let left = a.mul(&b.mul(x)?)? == a.mul(b)?.mul(x)?.sub(&a.associator(b, x)?)?;
        let right = x.mul(b)?.mul(a)? == x.mul(&b.mul(a)?)?.add(&x.associator(b, a)?)?;
        Ok(left && right)
    })?;
    out.push(CheckResult::new("left/right shift identities", ok, format!("{samples} triples")));

    let ok = all(&tuples, |[a, b, ..]| {
        let s = a.add(b)?.norm().value();
        let prod_gap = (a.mul(b)?.norm().value() - a.norm().value() * b.norm().value()).abs();
        Ok(s <= a.norm().value() + b.norm().value() + 1e-12 && (!flags.multiplicative_norm || prod_gap <= 1e-9))
    })?;
    out.push(CheckResult::new(
        "norm",
        ok,
        if flags.multiplicative_norm { "triangle inequality, |ab| = |a||b|" } else { "triangle inequality" },
    ));

    if flags.division {
        let ok = all(&tuples, |[a, ..]| {
            if a.is_zero() {
                return Ok(true);
            }
            let inv = a.inverse()?;
            Ok(a.mul(&inv)? == Element::one(alg) && inv.mul(a)? == Element::one(alg))
        })?;
        out.push(CheckResult::new("inverse", ok, format!("{samples} elements")));
    }

    let ok = all(&tuples, |[a, x, b, _]| {
        let t = TensorOperator::simple(a, b)?;
        let lf = t.apply_with(x, Convention::LeftFirst)?;
        let rf = t.apply_with(x, Convention::RightFirst)?;
        Ok(lf.sub(&rf)? == a.associator(x, b)?)
    })?;
    out.push(CheckResult::new("application conventions differ by the associator", ok, format!("{samples} triples")));
    Ok(out)
}

/// A fast pass over every subsystem; the acceptance suite is the thorough one.
pub fn selftest(seed: u64) -> Result<Vec<CheckResult>> {
    let h = Arc::new(builtin("quaternions")?);
    let c = Arc::new(builtin("complex")?);
    let o = Arc::new(builtin("octonions")?);
    let fh = Arc::new(h.to_float());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();

    let mut worst = 0.0f64;
    let mut ok = true;
    for e in ["x*x", "i*x*j", "inv(x)", "x*i*inv(x)"] {
        let r = check_derivative(&parse_expr(e, &fh)?, &fh, 20, seed)?;
        worst = worst.max(r.max_rel_error);
        ok &= r.pass;
    }
    out.push(CheckResult::new("derivative table vs finite differences", ok, format!("max relative error {worst:.2e}")));

    let mut ok = true;
    for _ in 0..10 {
        let deg = rng.random_range(1..=3);
        let p = random_monomial(&mut rng, &h, deg);
        for m in 1..=deg {
            let d = derivative(&p, &h, m)?;
            ok &= d.symmetry_class().class == SymmetryClass::Symmetric;
            ok &= d.equal(&derivative_recursive(&p, &h, m)?)?;
        }
        ok &= derivative(&p, &h, deg + 1)?.canonical_expand()?.is_zero();
    }
    out.push(CheckResult::new("higher derivatives symmetric and vanishing", ok, "10 monomials"));

    let mut ok = true;
    for alg in [&c, &h] {
        for _ in 0..5 {
            let p = Expr::Sum((0..3).map(|d| random_monomial(&mut rng, alg, d)).collect());
            let x0 = random_element(&mut rng, alg);
            ok &= expressions_equal(&taylor(&p, &x0)?, &p, alg)?;
        }
    }
    out.push(CheckResult::new("Taylor reconstruction", ok, "10 polynomials"));

    let (bh, bc) = (representation_basis(&h), representation_basis(&c));
    let conj = solve_components(&h, &LinearMapMatrix::of_generator(&h, "conj")?)?;
    let half = Rational::new(-1, 2);
    let diag_ok = conj.components().len() == 1
        && conj.components()[0].g.iter().enumerate().all(|(i, r)| r.iter().enumerate().all(|(j, v)| *v == if i == j { half.clone() } else { Rational::zero() }));
    out.push(CheckResult::new(
        "tensor representation",
        bh.rank == 16 && bc.rank == 2 && bc.generators.len() == 2 && diag_ok,
        format!("rank {} on quaternions, {} on complex with {}", bh.rank, bc.rank, bc.display_generators()),
    ));

    let cube = SpecDocument::parse(
        "algebra = \"quaternions\"\n[[words]]\nslots = \"HXX\"\n[[words]]\nslots = \"XHX\"\n[[words]]\nslots = \"XXH\"\n",
    )?
    .to_spec()?;
    let solved = matches!(integrate(&cube)?, Integration::Solved(y) if expressions_equal(&y, &Expr::power(3), &h)?);
    let bad = SpecDocument::parse("algebra = \"quaternions\"\n[[words]]\nslots = \"XXH\"\nprefactor = \"3\"\n")?.to_spec()?;
    let rejected = matches!(integrate(&bad)?, Integration::NotIntegrable(r) if r.witness.as_ref().is_some_and(|w| w.order == 2));
    let y = Expr::Sum(vec![random_monomial(&mut rng, &h, 2), random_monomial(&mut rng, &h, 1)]);
    let spec = DifferentialSpec::from_solution(&y, &h, random_element(&mut rng, &h))?;
    let round = matches!(integrate(&spec)?, Integration::Solved(back) if expressions_equal(&back, &y, &h)?);
    out.push(CheckResult::new("integration", solved && rejected && round, "cube, rejection, round trip"));

    let fc = Arc::new(c.to_float());
    let euler = exp(&Element::new(&fc, vec![0.0, std::f64::consts::PI])?, 30)?.value;
    let euler_err = euler.sub(&Element::new(&fc, vec![-1.0, 0.0])?)?.norm().value();
    let i = Element::basis(&fh, 1);
    let j = Element::basis(&fh, 2);
    let sum = exp_sum_check(&i, &j, 30, 1e-10)?;
    let shuffles = (1..=10).all(|n| shuffle_words(n).len() == 1 << n);
    out.push(CheckResult::new(
        "exponent",
        euler_err < 1e-10 && !sum.equal && sum.difference > 1e-2 && shuffles,
        format!("|exp(iπ) + 1| = {euler_err:.1e}, exp(i+j) vs exp(i)exp(j): {:.3}", sum.difference),
    ));

    let checks = algebra_checks(&o, seed, 20)?;
    let failed: Vec<&str> = checks.iter().filter(|r| !r.passed).map(|r| r.name.as_str()).collect();
    out.push(CheckResult::new(
        "octonion identities",
        failed.is_empty(),
        if failed.is_empty() { "20 tuples".to_string() } else { format!("failed: {}", failed.join(", ")) },
    ));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::BUILTIN_NAMES;

    #[test]
    fn builtin_algebras_pass_their_checks() {
        for name in BUILTIN_NAMES {
            let alg = Arc::new(builtin(name).unwrap());
            for r in algebra_checks(&alg, 3, 10).unwrap() {
                assert!(r.passed, "{name}: {} ({})", r.name, r.detail);
            }
        }
    }

    #[test]
    fn selftest_passes() {
        for r in selftest(11).unwrap() {
            assert!(r.passed, "{}: {}", r.name, r.detail);
        }
    }
}
