//! Exact expression kernel: atoms over jet space, canonical polynomials with
//! rational coefficients, total derivatives and substitution.

mod atom;
mod derive;
mod display;
mod poly;
mod term;

pub use atom::{Atom, Field, FieldKind, FuncAtom, MultiIndex};
pub use display::{Rendered, Space};
pub use poly::{Expr, Monomial, Rational};
pub use term::{normalize, Term};

pub use display::default_dummy_name;
pub(crate) use poly::rat;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error(
        "unsupported denominator {0}: only nonzero parameters and rational constants may divide"
    )]
    UnsupportedDenominator(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("substitution key {0} is a derivative; only base variables may be substituted")]
    NonBaseSubstitution(String),
    #[error("substitution key {0} must be a dependent variable or a parameter")]
    InvalidSubstitutionKey(String),
}
