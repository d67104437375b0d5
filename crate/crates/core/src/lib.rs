//! Symbolic jet-space calculus for modified formal Lagrangians.
//!
//! The crate builds (modified) formal Lagrangians `v·F + L0` for systems of
//! differential equations, checks self-adjointness under `v = u`, extends
//! Lie point symmetries to variational symmetries and runs Noether's
//! construction to obtain conservation laws with exactly verified fluxes.

pub mod expr;
pub mod jet;
pub mod lagrangian;
pub(crate) mod linalg;
pub mod noether;
pub mod system;

pub use expr::{
    Atom, Expr, ExprError, Field, FieldKind, FuncAtom, MultiIndex, Rational, Space, Term,
};
