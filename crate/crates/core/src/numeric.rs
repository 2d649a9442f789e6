//! Finite-difference differentials, Jacobians and a sampled cross-check of
//! symbolic derivatives.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::algebra::{Algebra, Element};
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::form::derivative;
use crate::scalar::Scalar;

/// Step schedule for the Richardson-extrapolated central difference.
pub const STEPS: [f64; 2] = [1e-3, 1e-4];
pub const DEFAULT_REL_TOL: f64 = 1e-6;
pub const ABS_FLOOR: f64 = 1e-9;

/// Relative tolerance, overridable through `NCALC_TOL`.
pub fn tolerance() -> f64 {
    std::env::var("NCALC_TOL").ok().and_then(|v| v.parse::<f64>().ok()).filter(|t| *t > 0.0).unwrap_or(DEFAULT_REL_TOL)
}

type MapFn = dyn Fn(&Element<f64>) -> Result<Element<f64>> + Send + Sync;

/// An element-to-element map over one floating-point algebra.
#[derive(Clone)]
pub struct NumericMap {
    label: String,
    f: Arc<MapFn>,
}

impl NumericMap {
    pub fn new(label: impl Into<String>, f: impl Fn(&Element<f64>) -> Result<Element<f64>> + Send + Sync + 'static) -> Self {
        NumericMap { label: label.into(), f: Arc::new(f) }
    }

    pub fn from_expr(e: Expr<f64>) -> Self {
        NumericMap::new(e.to_string(), move |x| e.eval(x))
    }

    pub fn identity() -> Self {
        NumericMap::new("x", |x| Ok(x.clone()))
    }

    /// A registered generator of the algebra, e.g. `conj`.
    pub fn generator(alg: &Arc<Algebra<f64>>, name: &str) -> Result<Self> {
        let g = alg.generator(name).ok_or_else(|| Error::InvalidArgument(format!("no generator `{name}`")))?.clone();
        let alg = Arc::clone(alg);
        Ok(NumericMap::new(name, move |x| Element::new(&alg, g.apply(x.coords()))))
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn eval(&self, x: &Element<f64>) -> Result<Element<f64>> {
        (self.f)(x)
    }
}

impl fmt::Debug for NumericMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NumericMap({})", self.label)
    }
}

#[derive(Clone, Debug)]
pub struct FdResult {
    pub value: Element<f64>,
    /// Estimated error of the extrapolated value.
    pub residual: f64,
    pub converged: bool,
}

fn axpy(x: &Element<f64>, t: f64, h: &Element<f64>) -> Result<Element<f64>> {
    x.add(&h.scale(&t))
}

/// `(f(x + t h) - f(x - t h)) / 2t`.
pub fn central_difference(f: &NumericMap, x: &Element<f64>, h: &Element<f64>, t: f64) -> Result<Element<f64>> {
    let fp = f.eval(&axpy(x, t, h)?)?;
    let fm = f.eval(&axpy(x, -t, h)?)?;
    Ok(fp.sub(&fm)?.scale(&(0.5 / t)))
}

pub fn fd_differential(f: &NumericMap, x: &Element<f64>, h: &Element<f64>) -> Result<FdResult> {
    let d1 = central_difference(f, x, h, STEPS[0])?;
    let d2 = central_difference(f, x, h, STEPS[1])?;
    let ratio = (STEPS[0] / STEPS[1]).powi(2);
    let correction = d2.sub(&d1)?.scale(&(1.0 / (ratio - 1.0)));
    let value = d2.add(&correction)?;
    let residual = correction.norm().value();
    let converged = residual <= (tolerance() * value.norm().value()).max(ABS_FLOOR);
    Ok(FdResult { value, residual, converged })
}

/// Real Jacobian `J[i][j] = ∂fⁱ/∂xʲ`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct JacobianMatrix {
    pub rows: Vec<Vec<f64>>,
}

impl JacobianMatrix {
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        self.rows.iter().map(|r| r.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }
}

impl fmt::Display for JacobianMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rows {
            let cells: Vec<String> = r.iter().map(|v| format!("{v:>12.6}")).collect();
            writeln!(f, "[{}]", cells.join(" "))?;
        }
        Ok(())
    }
}

pub fn jacobian(f: &NumericMap, x: &Element<f64>) -> Result<JacobianMatrix> {
    let alg = x.algebra();
    let d = alg.dim();
    let mut rows = vec![vec![0.0; d]; d];
    for j in 0..d {
        let col = fd_differential(f, x, &Element::basis(alg, j))?.value;
        for (i, v) in col.coords().iter().enumerate() {
            rows[i][j] = *v;
        }
    }
    Ok(JacobianMatrix { rows })
}

/// Deterministic sampler of base points and unit directions.
pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    /// Coordinates uniform in `[-1, 1]`, rejecting points of norm below 1/4
    /// so that inverses stay well conditioned.
    pub fn point(&mut self, alg: &Arc<Algebra<f64>>) -> Element<f64> {
        loop {
            let v: Vec<f64> = (0..alg.dim()).map(|_| self.rng.random_range(-1.0..=1.0)).collect();
            if v.iter().map(|c| c * c).sum::<f64>().sqrt() >= 0.25 {
                return Element::from_raw(alg, v);
            }
        }
    }

    /// Uniform direction on the unit sphere of the coordinate norm.
    pub fn direction(&mut self, alg: &Arc<Algebra<f64>>) -> Element<f64> {
        loop {
            let v: Vec<f64> = (0..alg.dim()).map(|_| self.rng.sample(StandardNormal)).collect();
            let n = v.iter().map(|c| c * c).sum::<f64>().sqrt();
            if n > 1e-6 {
                return Element::from_raw(alg, v.into_iter().map(|c| c / n).collect());
            }
        }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SampleError {
    pub x: Vec<f64>,
    pub h: Vec<f64>,
    pub symbolic: Vec<f64>,
    pub numeric: Vec<f64>,
    pub abs_error: f64,
    pub rel_error: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct DerivativeReport {
    pub expression: String,
    pub derivative: String,
    pub seed: u64,
    pub tolerance: f64,
    pub samples: Vec<SampleError>,
    pub max_rel_error: f64,
    pub max_abs_error: f64,
    pub pass: bool,
}

/// Compares `∂p(x)(h)` with the finite-difference differential.
pub fn compare_at(p: &Expr<f64>, x: &Element<f64>, h: &Element<f64>) -> Result<SampleError> {
    let alg = x.algebra();
    let form = derivative(p, alg, 1)?;
    compare_form_at(&form, &NumericMap::from_expr(p.clone()), x, h, tolerance())
}

fn compare_form_at(
    form: &crate::form::MultilinearForm<f64>,
    f: &NumericMap,
    x: &Element<f64>,
    h: &Element<f64>,
    tol: f64,
) -> Result<SampleError> {
    let symbolic = form.eval(x, std::slice::from_ref(h))?;
    let numeric = fd_differential(f, x, h)?.value;
    let abs_error = symbolic.sub(&numeric)?.norm().value();
    let scale = symbolic.norm().value();
    let rel_error = if scale > 0.0 { abs_error / scale } else { abs_error };
    Ok(SampleError {
        x: x.coords().to_vec(),
        h: h.coords().to_vec(),
        symbolic: symbolic.coords().to_vec(),
        numeric: numeric.coords().to_vec(),
        abs_error,
        rel_error,
        pass: abs_error <= (tol * scale).max(ABS_FLOOR),
    })
}

pub fn check_derivative(p: &Expr<f64>, alg: &Arc<Algebra<f64>>, samples: usize, seed: u64) -> Result<DerivativeReport> {
    let tol = tolerance();
    let form = derivative(p, alg, 1)?;
    let f = NumericMap::from_expr(p.clone());
    let mut sampler = Sampler::new(seed);
    let mut out = Vec::with_capacity(samples);
    for _ in 0..samples {
        let x = sampler.point(alg);
        let h = sampler.direction(alg);
        out.push(compare_form_at(&form, &f, &x, &h, tol)?);
    }
    let max_rel_error = out.iter().map(|s| s.rel_error).fold(0.0, f64::max);
    let max_abs_error = out.iter().map(|s| s.abs_error).fold(0.0, f64::max);
    let pass = out.iter().all(|s| s.pass);
    Ok(DerivativeReport {
        expression: p.to_string(),
        derivative: form.to_string(),
        seed,
        tolerance: tol,
        samples: out,
        max_rel_error,
        max_abs_error,
        pass,
    })
}

/// Converts an exact expression and algebra for numeric checks.
pub fn float_pair<S: Scalar>(p: &Expr<S>, alg: &Algebra<S>) -> (Expr<f64>, Arc<Algebra<f64>>) {
    let falg = Arc::new(alg.to_float());
    (p.to_float(&falg), falg)
}
