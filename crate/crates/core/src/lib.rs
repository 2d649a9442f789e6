//! Calculus over finite-dimensional algebras defined by structural constants:
//! exact arithmetic, tensor representations of linear maps, Gâteaux
//! derivatives of noncommutative polynomials, the exponent series and
//! integration of differential specifications.
pub mod algebra;
pub mod checks;
pub mod error;
pub mod expr;
pub mod form;
pub mod linalg;
pub mod numeric;
pub mod ode;
pub mod poly;
pub mod scalar;
pub mod series;
pub mod tensor;

pub use algebra::{builtin, Algebra, Element, Flags, NormValue};
pub use error::{Error, Result};
pub use expr::{parse_expr, Expr};
pub use form::{derivative, derivative_recursive, taylor, MultilinearForm, SymmetryClass};
pub use scalar::{Rational, Scalar};
