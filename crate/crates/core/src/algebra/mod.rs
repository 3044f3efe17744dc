//! Exact polynomial arithmetic over Q(i) with parameters and simple algebraic
//! extensions.

mod algebraic;
mod context;
mod factor;
mod gaussian;
mod gcd;
mod linalg;
mod poly;
mod value;

pub use algebraic::{AlgPoly, AlgebraicValue, DenseUni};
pub use context::{ParamInfo, SideCondition, VarContext, GENERIC_PREFIX};
pub use factor::{
    decide_vanishing, factor_split, factor_split_over, is_unit_constant, param_poly_nonzero,
    Factor, FactorKind, Splitting, Vanishing,
};
pub use gaussian::GaussianRational;
pub use gcd::{content, gcd_pair, multivariate_gcd, primitive_part, pseudo_remainder};
pub use linalg::{invert, nullspace, rref};
pub use poly::{Monomial, PolyDisplay, Polynomial};
pub use value::{
    compose_alg, poly_eval, render_point, substitute_alg, substitute_values, values_equal, ExtendedValue, Point,
    Value,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum AlgebraError {
    #[error("invalid context: {0}")]
    Context(String),
    #[error("unknown variable '{0}'")]
    UnknownVariable(String),
    #[error("division is not exact")]
    NotDivisible { remainder: Polynomial },
    #[error("division by zero")]
    DivisionByZero,
    #[error("all polynomials are zero")]
    AllZero,
    #[error("point mixes two different algebraic numbers")]
    MixedAlgebraics,
    #[error("bad minimal polynomial: {0}")]
    BadMinimalPolynomial(String),
}
