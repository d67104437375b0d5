use num_traits::Signed;

use super::atom::Atom;
use super::poly::{Expr, Rational};
use super::ExprError;

/// An unnormalized expression tree, as produced by a parser or by hand.
/// `normalize` maps it to the canonical [`Expr`].
#[derive(Clone, Debug, PartialEq)]
pub enum Term {
    Num(Rational),
    Atom(Atom),
    Add(Vec<Term>),
    Mul(Vec<Term>),
    Neg(Box<Term>),
    Div(Box<Term>, Box<Term>),
    Pow(Box<Term>, u32),
}

impl Term {
    pub fn sub(a: Term, b: Term) -> Term {
        Term::Add(vec![a, Term::Neg(Box::new(b))])
    }

    pub fn int(n: i64) -> Term {
        Term::Num(Rational::from_integer(n.into()))
    }
}

/// Canonical form of a term tree. Fails on denominators that are not a
/// rational multiple of a parameter monomial.
pub fn normalize(t: &Term) -> Result<Expr, ExprError> {
    Ok(match t {
        Term::Num(r) => Expr::constant(r.clone()),
        Term::Atom(a) => Expr::atom(a.clone()),
        Term::Add(items) => {
            let mut acc = Vec::with_capacity(items.len());
            for i in items {
                acc.push(normalize(i)?);
            }
            acc.into_iter().sum()
        }
        Term::Mul(items) => {
            let mut acc = Expr::one();
            for i in items {
                acc = &acc * &normalize(i)?;
            }
            acc
        }
        Term::Neg(a) => -normalize(a)?,
        Term::Div(a, b) => normalize(a)?.checked_div(&normalize(b)?)?,
        Term::Pow(a, n) => normalize(a)?.pow(*n),
    })
}

impl Expr {
    /// A term tree that normalizes back to this expression.
    pub fn to_term(&self) -> Term {
        let mut summands = Vec::new();
        for (m, c) in self.terms() {
            let mut num = vec![Term::Num(c.abs())];
            let mut den = Vec::new();
            for (a, e) in m.factors() {
                let base = Term::Atom(a.clone());
                let p = e.unsigned_abs();
                let f = if p == 1 {
                    base
                } else {
                    Term::Pow(Box::new(base), p)
                };
                if *e > 0 {
                    num.push(f);
                } else {
                    den.push(f);
                }
            }
            let mut t = Term::Mul(num);
            if !den.is_empty() {
                t = Term::Div(Box::new(t), Box::new(Term::Mul(den)));
            }
            if c.is_negative() {
                t = Term::Neg(Box::new(t));
            }
            summands.push(t);
        }
        match summands.len() {
            0 => Term::Num(Rational::from_integer(0.into())),
            1 => summands.pop().unwrap(),
            _ => Term::Add(summands),
        }
    }

    /// Idempotent canonicalization; `Expr` values are always canonical.
    pub fn normalize(&self) -> Expr {
        normalize(&self.to_term()).expect("canonical expressions have admissible denominators")
    }
}

impl From<Expr> for Term {
    fn from(e: Expr) -> Term {
        e.to_term()
    }
}
