use std::collections::BTreeMap;

use super::atom::{Atom, MultiIndex};
use super::poly::{accumulate, rat, Expr};
use super::ExprError;

/// Image of a single atom under `D_i`.
enum AtomDerivative {
    Zero,
    One,
    Atom(Atom),
}

fn atom_total_derivative(a: &Atom, i: usize) -> AtomDerivative {
    match a {
        Atom::Indep(j) if *j == i => AtomDerivative::One,
        Atom::Indep(_) | Atom::Param(_) => AtomDerivative::Zero,
        Atom::Jet(f, j) => AtomDerivative::Atom(Atom::Jet(*f, j.incremented(i))),
        Atom::Func(fa) => match fa.derivative(i) {
            Some(d) => AtomDerivative::Atom(Atom::Func(d)),
            None => AtomDerivative::Zero,
        },
    }
}

impl Expr {
    /// Total derivative `D_i`.
    pub fn total_derivative(&self, i: usize) -> Expr {
        let mut out = BTreeMap::new();
        for (m, c) in self.terms() {
            for (a, e) in m.factors() {
                let image = match atom_total_derivative(a, i) {
                    AtomDerivative::Zero => continue,
                    AtomDerivative::One => m.times_power(a, -1),
                    AtomDerivative::Atom(b) => m.times_power(a, -1).times_power(&b, 1),
                };
                accumulate(&mut out, image, c * rat(*e as i64));
            }
        }
        Expr::from_map(out)
    }

    /// `D_J = D_1^{j_1} ... D_p^{j_p}`.
    pub fn total_derivative_multi(&self, j: &MultiIndex) -> Expr {
        let mut e = self.clone();
        for (i, &k) in j.entries().iter().enumerate() {
            for _ in 0..k {
                if e.is_zero() {
                    return e;
                }
                e = e.total_derivative(i);
            }
        }
        e
    }

    /// `(-D)_J = (-1)^{|J|} D_J`.
    pub fn adjoint_total_derivative_multi(&self, j: &MultiIndex) -> Expr {
        let d = self.total_derivative_multi(j);
        if j.order() % 2 == 1 {
            -d
        } else {
            d
        }
    }

    /// Simultaneous substitution of base dependent variables (zero
    /// multi-index) and parameters. Every derivative atom `u_J` of a
    /// substituted base variable is replaced by `D_J` of the replacement.
    pub fn substitute(&self, rules: &BTreeMap<Atom, Expr>) -> Result<Expr, ExprError> {
        for key in rules.keys() {
            match key {
                Atom::Jet(_, j) if !j.is_zero() => {
                    return Err(ExprError::NonBaseSubstitution(format!("{key:?}")))
                }
                Atom::Jet(..) | Atom::Param(_) => {}
                other => return Err(ExprError::InvalidSubstitutionKey(format!("{other:?}"))),
            }
        }
        let mut prolonged: BTreeMap<Atom, Expr> = BTreeMap::new();
        for a in self.atoms() {
            match &a {
                Atom::Jet(f, j) => {
                    let base = Atom::Jet(*f, MultiIndex::zero(j.len()));
                    if let Some(rep) = rules.get(&base) {
                        let d = rep.total_derivative_multi(j);
                        prolonged.insert(a.clone(), d);
                    }
                }
                Atom::Param(_) => {
                    if let Some(rep) = rules.get(&a) {
                        prolonged.insert(a.clone(), rep.clone());
                    }
                }
                _ => {}
            }
        }
        self.replace_atoms(&prolonged)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::atom::{Field, FuncAtom};
    use crate::expr::Rational;

    fn u(j: &[u32]) -> Expr {
        Expr::atom(Atom::jet(Field::original(0), MultiIndex::from_slice(j)))
    }

    fn v(j: &[u32]) -> Expr {
        Expr::atom(Atom::jet(Field::dummy(0), MultiIndex::from_slice(j)))
    }

    #[test]
    fn leibniz() {
        // D_x(u u_x) = u_x^2 + u u_xx over (t, x)
        let e = u(&[0, 0]) * u(&[0, 1]);
        let expected = u(&[0, 1]).pow(2) + u(&[0, 0]) * u(&[0, 2]);
        assert_eq!(e.total_derivative(1), expected);
    }

    #[test]
    fn chain_rule() {
        let e = u(&[0, 0]).pow(2).scale(&Rational::new(1.into(), 2.into()));
        assert_eq!(e.total_derivative(0), u(&[0, 0]) * u(&[1, 0]));
    }

    #[test]
    fn function_of_t_is_constant_in_x() {
        let g = Expr::atom(Atom::Func(FuncAtom::new("g", &[0])));
        let e = &g * &u(&[0, 0]);
        assert_eq!(e.total_derivative(1), &g * &u(&[0, 1]));
        let gp = Atom::Func(FuncAtom::new("g", &[0]).derivative(0).unwrap());
        assert_eq!(
            e.total_derivative(0),
            Expr::atom(gp) * u(&[0, 0]) + g * u(&[1, 0])
        );
    }

    #[test]
    fn explicit_variables() {
        let t = Expr::atom(Atom::Indep(0));
        let e = &t * &u(&[0, 1]);
        assert_eq!(e.total_derivative(0), u(&[0, 1]) + t * u(&[1, 1]));
    }

    #[test]
    fn multi_index_derivative() {
        assert_eq!(
            u(&[0, 0]).total_derivative_multi(&MultiIndex::from_slice(&[0, 2])),
            u(&[0, 2])
        );
        let e = u(&[0, 0]).pow(2);
        assert_eq!(e.total_derivative_multi(&MultiIndex::zero(2)), e);
        let j = MultiIndex::from_slice(&[1, 1]);
        let expected = (u(&[1, 0]) * u(&[0, 1]) + u(&[0, 0]) * u(&[1, 1])).scale(&rat(2));
        assert_eq!(e.total_derivative_multi(&j), expected);
        // oracle: D_t then D_x equals D_x then D_t
        assert_eq!(
            e.total_derivative(0).total_derivative(1),
            e.total_derivative(1).total_derivative(0)
        );
    }

    #[test]
    fn substitute_dummy_by_original() {
        let base_v = Atom::base(Field::dummy(0), 2);
        let mut rules = BTreeMap::new();
        rules.insert(base_v, u(&[0, 0]));
        let e = -v(&[1, 0]) - u(&[0, 0]) * v(&[0, 1]) - v(&[0, 3]);
        let r = e.substitute(&rules).unwrap();
        assert_eq!(r, -u(&[1, 0]) - u(&[0, 0]) * u(&[0, 1]) - u(&[0, 3]));
    }

    #[test]
    fn substitute_prolongs_square() {
        let base_v = Atom::base(Field::dummy(0), 2);
        let mut rules = BTreeMap::new();
        rules.insert(base_v, u(&[0, 0]).pow(2));
        let r = v(&[0, 2]).substitute(&rules).unwrap();
        // oracle: expand D_x D_x (u^2) by hand
        let expected = (u(&[0, 0]) * u(&[0, 2]) + u(&[0, 1]).pow(2)).scale(&rat(2));
        assert_eq!(r, expected);
    }

    #[test]
    fn substitute_identity() {
        let base = Atom::base(Field::original(0), 2);
        let mut rules = BTreeMap::new();
        rules.insert(base, u(&[0, 0]));
        assert_eq!(u(&[0, 0]).substitute(&rules).unwrap(), u(&[0, 0]));
    }

    #[test]
    fn substitute_rejects_derivative_key() {
        let mut rules = BTreeMap::new();
        rules.insert(
            Atom::jet(Field::dummy(0), MultiIndex::from_slice(&[0, 1])),
            u(&[0, 0]),
        );
        assert!(matches!(
            v(&[0, 1]).substitute(&rules),
            Err(ExprError::NonBaseSubstitution(_))
        ));
    }
}
