//! Jet-space differential operators: total derivatives, Euler operators,
//! prolongation of generators, the divergence test and flux reconstruction
//! by the vertical homotopy operator.

use std::collections::HashMap;

use thiserror::Error;

use crate::expr::{rat, Atom, Expr, Field, MultiIndex, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum JetError {
    #[error("expression is not a total divergence")]
    NotADivergence,
    #[error("flux reconstruction failed: {0}")]
    HomotopyDegenerate(String),
}

/// `D_i e`.
pub fn total_derivative(e: &Expr, i: usize) -> Expr {
    e.total_derivative(i)
}

/// `D_J e`.
pub fn total_derivative_multi(e: &Expr, j: &MultiIndex) -> Expr {
    e.total_derivative_multi(j)
}

/// Variational derivative `E_field(e) = Σ_J (-D)_J ∂e/∂field_J`.
pub fn euler_operator(e: &Expr, field: Field) -> Expr {
    e.jet_atoms()
        .into_iter()
        .filter_map(|a| match &a {
            Atom::Jet(f, j) if *f == field => {
                let j = j.clone();
                Some(e.partial(&a).adjoint_total_derivative_multi(&j))
            }
            _ => None,
        })
        .sum()
}

/// A vector field `ξ^i ∂_{x^i} + φ^α ∂_{u^α} (+ φ_*^α ∂_{v^α})`.
///
/// An absent `phi_star` means the dummy coefficients are zero: the generator
/// moves `x` and `u` only.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub xi: Vec<Expr>,
    pub phi: Vec<Expr>,
    pub phi_star: Option<Vec<Expr>>,
}

impl Generator {
    pub fn new(xi: Vec<Expr>, phi: Vec<Expr>) -> Self {
        Generator {
            xi,
            phi,
            phi_star: None,
        }
    }

    pub fn with_phi_star(mut self, phi_star: Vec<Expr>) -> Self {
        assert_eq!(phi_star.len(), self.phi.len());
        self.phi_star = Some(phi_star);
        self
    }

    /// Translation `∂_{x^i}`.
    pub fn translation(p: usize, q: usize, i: usize) -> Self {
        let mut xi = vec![Expr::zero(); p];
        xi[i] = Expr::one();
        Generator::new(xi, vec![Expr::zero(); q])
    }

    pub fn p(&self) -> usize {
        self.xi.len()
    }

    pub fn q(&self) -> usize {
        self.phi.len()
    }

    /// `D_i ξ^i`.
    pub fn div_xi(&self) -> Expr {
        self.xi
            .iter()
            .enumerate()
            .map(|(i, x)| x.total_derivative(i))
            .sum()
    }

    pub fn is_evolutionary(&self) -> bool {
        self.xi.iter().all(Expr::is_zero)
    }

    /// Coefficient of `∂_{field}`.
    pub fn coefficient(&self, field: Field) -> Expr {
        if field.is_dummy() {
            self.phi_star
                .as_ref()
                .map(|ps| ps[field.index].clone())
                .unwrap_or_default()
        } else {
            self.phi[field.index].clone()
        }
    }

    /// `Q^field = coefficient − ξ^i field_{1_i}`.
    pub fn characteristic_of(&self, field: Field) -> Expr {
        let p = self.p();
        let mut q = self.coefficient(field);
        for (i, x) in self.xi.iter().enumerate() {
            if !x.is_zero() {
                q -= x * &Expr::atom(Atom::jet(field, MultiIndex::unit(p, i)));
            }
        }
        q
    }

    /// The evolutionary generator `Q^α ∂_{u^α} + Q^{v^α} ∂_{v^α}`; the dummy
    /// components are `−ξ^i v^α_i` when `phi_star` is absent.
    pub fn evolutionary_form(&self) -> Generator {
        let q = self.q();
        let phi = (0..q)
            .map(|a| self.characteristic_of(Field::original(a)))
            .collect();
        let ps = (0..q)
            .map(|a| self.characteristic_of(Field::dummy(a)))
            .collect();
        Generator::new(vec![Expr::zero(); self.p()], phi).with_phi_star(ps)
    }
}

/// Characteristic tuple keyed by field.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Characteristic {
    pub entries: Vec<(Field, Expr)>,
}

impl Characteristic {
    pub fn get(&self, field: Field) -> Expr {
        self.entries
            .iter()
            .find(|(f, _)| *f == field)
            .map(|(_, e)| e.clone())
            .unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|(_, e)| e.is_zero())
    }
}

/// `Q^α = φ^α − ξ^i u^α_{1_i}`, plus the dummy components when `phi_star` is present.
pub fn characteristic(g: &Generator) -> Characteristic {
    let mut entries: Vec<(Field, Expr)> = (0..g.q())
        .map(|a| (Field::original(a), g.characteristic_of(Field::original(a))))
        .collect();
    if g.phi_star.is_some() {
        entries.extend((0..g.q()).map(|a| (Field::dummy(a), g.characteristic_of(Field::dummy(a)))));
    }
    Characteristic { entries }
}

/// `pr X(e) = ξ^i D_i e + Σ (D_J Q^α) ∂e/∂u^α_J`, summed over the jet atoms of `e`.
pub fn prolong_apply(g: &Generator, e: &Expr) -> Expr {
    let mut out: Expr =
        g.xi.iter()
            .enumerate()
            .filter(|(_, x)| !x.is_zero())
            .map(|(i, x)| x * &e.total_derivative(i))
            .sum();
    let mut base: HashMap<Field, Expr> = HashMap::new();
    for a in e.jet_atoms() {
        let (field, j) = a.as_jet().expect("jet atom");
        if field.index >= g.q() {
            continue;
        }
        let q = base
            .entry(field)
            .or_insert_with(|| g.characteristic_of(field))
            .clone();
        if q.is_zero() {
            continue;
        }
        out += q.total_derivative_multi(j) * e.partial(&a);
    }
    out
}

/// A `p`-tuple of flux components `(P^1, ..., P^p)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FluxTuple {
    pub components: Vec<Expr>,
}

impl FluxTuple {
    pub fn new(components: Vec<Expr>) -> Self {
        FluxTuple { components }
    }

    pub fn zero(p: usize) -> Self {
        FluxTuple::new(vec![Expr::zero(); p])
    }

    pub fn p(&self) -> usize {
        self.components.len()
    }

    pub fn divergence(&self) -> Expr {
        divergence(self)
    }

    pub fn map(&self, mut f: impl FnMut(&Expr) -> Expr) -> FluxTuple {
        FluxTuple::new(self.components.iter().map(&mut f).collect())
    }

    pub fn try_map<E>(&self, mut f: impl FnMut(&Expr) -> Result<Expr, E>) -> Result<FluxTuple, E> {
        Ok(FluxTuple::new(
            self.components
                .iter()
                .map(&mut f)
                .collect::<Result<_, _>>()?,
        ))
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(Expr::is_zero)
    }
}

/// `Div P = Σ_i D_i P^i`.
pub fn divergence(p: &FluxTuple) -> Expr {
    p.components
        .iter()
        .enumerate()
        .map(|(i, c)| c.total_derivative(i))
        .sum()
}

/// Euler-operator test: true iff every variational derivative of `e` vanishes.
pub fn is_total_divergence(e: &Expr) -> bool {
    e.fields()
        .into_iter()
        .all(|f| euler_operator(e, f).is_zero())
}

/// True iff `e = D_i g` for some `g`, the other independent variables acting
/// as parameters: every one-variable Euler operator along `x^i` vanishes.
pub fn is_total_derivative_in(e: &Expr, i: usize) -> bool {
    let mut families: HashMap<(Field, MultiIndex), Expr> = HashMap::new();
    for a in e.jet_atoms() {
        let (f, j) = a.as_jet().expect("jet atom");
        let k = j.get(i);
        let mut base = j.entries().to_vec();
        base[i] = 0;
        let term = e.partial(&a);
        let mut d = term;
        for _ in 0..k {
            d = -d.total_derivative(i);
        }
        *families
            .entry((f, MultiIndex::from_slice(&base)))
            .or_default() += d;
    }
    families.values().all(Expr::is_zero)
}

/// Fluxes `P` with `Div P = e` for a total divergence `e` over `p`
/// independent variables. The jet-dependent part goes through the vertical
/// homotopy operator based at the zero section; the remaining pure-`x` part
/// is integrated along the last admissible variable.
pub fn reconstruct_fluxes(e: &Expr, p: usize) -> Result<FluxTuple, JetError> {
    if !is_total_divergence(e) {
        return Err(JetError::NotADivergence);
    }
    let pure = e.filter_terms(|m| !m.has_jets());
    let vertical = e - &pure;
    let mut flux = homotopy(&vertical, p);
    let horizontal = integrate_pure(&pure, p)?;
    for (c, h) in flux.iter_mut().zip(horizontal) {
        *c += h;
    }
    let flux = FluxTuple::new(flux);
    let check = divergence(&flux) - e;
    if !check.is_zero() {
        return Err(JetError::HomotopyDegenerate(format!(
            "reconstructed fluxes leave residual {check:?}"
        )));
    }
    Ok(flux)
}

/// Vertical homotopy operator on an expression vanishing on the zero section:
/// for each homogeneous jet-degree `d` component `f`,
/// `h^r += (1/d) Σ_{α,K} Σ_{I ≤ K−1_r} B(I,K,r) u^α_I (−D)_{K−I−1_r} ∂f/∂u^α_K`
/// with `B = multinom(I)·multinom(K−I−1_r)/multinom(K)`.
fn homotopy(e: &Expr, p: usize) -> Vec<Expr> {
    let mut parts: Vec<Vec<Expr>> = vec![Vec::new(); p];
    for (d, f) in e.split_by_jet_degree() {
        if d == 0 {
            continue;
        }
        let weight = Rational::new(1.into(), (d as i64).into());
        for a in f.jet_atoms() {
            let (field, k) = a.as_jet().expect("jet atom");
            let g = f.partial(&a);
            let mut memo: HashMap<MultiIndex, Expr> = HashMap::new();
            let k_multinom = Rational::from_integer(k.multinomial());
            for r in 0..p {
                let Some(km) = k.decremented(r) else { continue };
                for i in km.sub_indices() {
                    let m = km.minus(&i).expect("I <= K - 1_r");
                    let b = Rational::from_integer(i.multinomial() * m.multinomial()) / &k_multinom;
                    let dm = derivative_memo(&g, &m, &mut memo);
                    if dm.is_zero() {
                        continue;
                    }
                    let sign = if m.order() % 2 == 1 { rat(-1) } else { rat(1) };
                    let coef = b * &weight * sign;
                    let ui = Expr::atom(Atom::jet(field, i.clone()));
                    parts[r].push((ui * dm).scale(&coef));
                }
            }
        }
    }
    parts.into_iter().map(|v| v.into_iter().sum()).collect()
}

fn derivative_memo(g: &Expr, m: &MultiIndex, memo: &mut HashMap<MultiIndex, Expr>) -> Expr {
    if m.is_zero() {
        return g.clone();
    }
    if let Some(d) = memo.get(m) {
        return d.clone();
    }
    let i = m
        .entries()
        .iter()
        .rposition(|&k| k > 0)
        .expect("nonzero multi-index");
    let lower = m.decremented(i).unwrap();
    let d = derivative_memo(g, &lower, memo).total_derivative(i);
    memo.insert(m.clone(), d.clone());
    d
}

/// Integrate a jet-free expression: each monomial is integrated along the
/// highest-index variable none of its functions depend on.
fn integrate_pure(e: &Expr, p: usize) -> Result<Vec<Expr>, JetError> {
    let mut out = vec![Expr::zero(); p];
    for (m, c) in e.terms() {
        let var = (0..p).rev().find(|&r| {
            m.factors().iter().all(|(a, _)| match a {
                Atom::Func(fa) => !fa.depends_on(r),
                _ => true,
            })
        });
        let Some(r) = var else {
            return Err(JetError::HomotopyDegenerate(format!(
                "no closed-form antiderivative for {:?}",
                Expr::term(m.clone(), c.clone())
            )));
        };
        let x = Atom::Indep(r);
        let k = m.exponent(&x);
        let coef = c / rat(k as i64 + 1);
        out[r] += Expr::term(m.times_power(&x, 1), coef);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::FuncAtom;

    fn u(j: &[u32]) -> Expr {
        Expr::atom(Atom::jet(Field::original(0), MultiIndex::from_slice(j)))
    }
    fn v(j: &[u32]) -> Expr {
        Expr::atom(Atom::jet(Field::dummy(0), MultiIndex::from_slice(j)))
    }
    fn t() -> Expr {
        Expr::atom(Atom::Indep(0))
    }
    fn x() -> Expr {
        Expr::atom(Atom::Indep(1))
    }
    fn a() -> Expr {
        Expr::atom(Atom::param("a"))
    }
    fn half() -> Rational {
        Rational::new(1.into(), 2.into())
    }
    fn kdv() -> Expr {
        u(&[1, 0]) + u(&[0, 0]) * u(&[0, 1]) + u(&[0, 3])
    }
    fn kdv_x3() -> Generator {
        Generator::new(vec![Expr::zero(), t()], vec![Expr::one()])
    }
    fn kdv_x4() -> Generator {
        Generator::new(
            vec![t().scale(&rat(3)), x()],
            vec![u(&[0, 0]).scale(&rat(-2))],
        )
    }

    #[test]
    fn euler_operator_wave() {
        let c = Expr::atom(Atom::param("c"));
        let l = u(&[1, 0]).pow(2).scale(&-half()) + (c.pow(2) * u(&[0, 1]).pow(2)).scale(&half());
        let e = euler_operator(&l, Field::original(0));
        assert_eq!(e, u(&[2, 0]) - c.pow(2) * u(&[0, 2]));
    }

    #[test]
    fn euler_operator_annihilates_divergence() {
        let e = (u(&[0, 0]) * u(&[0, 1])).total_derivative(1);
        assert!(euler_operator(&e, Field::original(0)).is_zero());
    }

    #[test]
    fn euler_operator_formal_kdv() {
        let l = v(&[0, 0]) * kdv();
        let e = euler_operator(&l, Field::original(0));
        assert_eq!(e, -v(&[1, 0]) - u(&[0, 0]) * v(&[0, 1]) - v(&[0, 3]));
        assert_eq!(euler_operator(&l, Field::dummy(0)), kdv());
    }

    #[test]
    fn characteristics() {
        let q = characteristic(&kdv_x4());
        assert_eq!(
            q.get(Field::original(0)),
            u(&[0, 0]).scale(&rat(-2)) - (t() * u(&[1, 0])).scale(&rat(3)) - x() * u(&[0, 1])
        );
        let dt = Generator::translation(2, 1, 0);
        assert_eq!(characteristic(&dt).get(Field::original(0)), -u(&[1, 0]));
        let x3 = kdv_x3();
        assert_eq!(
            characteristic(&x3).get(Field::original(0)),
            Expr::one() - t() * u(&[0, 1])
        );
    }

    #[test]
    fn prolongation_on_kdv() {
        assert!(prolong_apply(&kdv_x3(), &kdv()).is_zero());
        assert_eq!(prolong_apply(&kdv_x4(), &kdv()), kdv().scale(&rat(-5)));
    }

    #[test]
    fn prolongation_fw_balance() {
        let l0 = u(&[0, 0]) * u(&[0, 1]) * u(&[0, 2]);
        assert_eq!(prolong_apply(&kdv_x3(), &l0), u(&[0, 1]) * u(&[0, 2]));
    }

    #[test]
    fn divergence_examples() {
        let p = FluxTuple::new(vec![
            u(&[0, 0]).pow(2).scale(&half()),
            u(&[0, 0]).pow(3).scale(&Rational::new(1.into(), 3.into())),
        ]);
        assert_eq!(
            divergence(&p),
            u(&[0, 0]) * u(&[1, 0]) + u(&[0, 0]).pow(2) * u(&[0, 1])
        );
        assert!(divergence(&FluxTuple::zero(2)).is_zero());
        let p = FluxTuple::new(vec![
            u(&[0, 0]),
            u(&[0, 0]).pow(2).scale(&half()) - a() * u(&[0, 1]),
        ]);
        assert_eq!(
            divergence(&p),
            u(&[1, 0]) + u(&[0, 0]) * u(&[0, 1]) - a() * u(&[0, 2])
        );
    }

    #[test]
    fn divergence_test() {
        assert!(is_total_divergence(&(u(&[0, 1]) * u(&[0, 2]))));
        // E_u(u u_x u_xx) = -u_x u_xx - u u_xxx ... nonzero
        assert!(!is_total_divergence(
            &(u(&[0, 0]) * u(&[0, 1]) * u(&[0, 2]))
        ));
        let f = u(&[1, 0]) + u(&[0, 0]) * u(&[0, 1]) - a() * u(&[0, 2]);
        let e = u(&[0, 0]) * f + a() * u(&[0, 0]) * u(&[0, 2]);
        assert!(is_total_divergence(&e));
    }

    #[test]
    fn one_variable_exactness() {
        // D_x(u u_t) = u_x u_t + u u_tx
        let e = u(&[0, 1]) * u(&[1, 0]) + u(&[0, 0]) * u(&[1, 1]);
        assert!(is_total_derivative_in(&e, 1));
        assert!(is_total_derivative_in(&e, 0));
        assert!(!is_total_derivative_in(&u(&[0, 1]).pow(2), 0));
        assert!(!is_total_derivative_in(&u(&[1, 0]), 1));
        assert!(is_total_derivative_in(&(t() * u(&[0, 2])), 1));
        assert!(!is_total_derivative_in(&(x() * u(&[0, 0])), 1));
    }

    #[test]
    fn reconstruct_simple() {
        let p = reconstruct_fluxes(&(u(&[0, 1]) * u(&[0, 2])), 2).unwrap();
        assert_eq!(
            p.components,
            vec![Expr::zero(), u(&[0, 1]).pow(2).scale(&half())]
        );
        let p = reconstruct_fluxes(&(u(&[0, 0]) * u(&[1, 0])), 2).unwrap();
        assert_eq!(
            p.components,
            vec![u(&[0, 0]).pow(2).scale(&half()), Expr::zero()]
        );
    }

    #[test]
    fn reconstruct_kdv_momentum() {
        let e = u(&[0, 0]) * kdv();
        let p = reconstruct_fluxes(&e, 2).unwrap();
        assert_eq!(divergence(&p), e);
        // the displayed fluxes differ from ours by a divergence-free tuple
        let shown = FluxTuple::new(vec![
            u(&[0, 0]).pow(2).scale(&half()),
            u(&[0, 0]).pow(3).scale(&Rational::new(1.into(), 3.into())) + u(&[0, 0]) * u(&[0, 2])
                - u(&[0, 1]).pow(2).scale(&half()),
        ]);
        assert_eq!(divergence(&shown), e);
    }

    #[test]
    fn reconstruct_pure_x_and_functions() {
        let g = Expr::atom(Atom::Func(FuncAtom::new("g", &[0])));
        let e = &g * &x() + t();
        let p = reconstruct_fluxes(&e, 2).unwrap();
        assert_eq!(divergence(&p), e);
        let only_t = Expr::atom(Atom::Func(FuncAtom::new("h", &[0, 1])));
        assert!(matches!(
            reconstruct_fluxes(&only_t, 2),
            Err(JetError::HomotopyDegenerate(_))
        ));
        assert_eq!(
            reconstruct_fluxes(&(u(&[0, 0]) * u(&[0, 1]) * u(&[0, 2])), 2),
            Err(JetError::NotADivergence)
        );
    }

    #[test]
    fn reconstruct_with_dummies_and_x_dependence() {
        let f = u(&[1, 0]) + u(&[0, 0]) * u(&[0, 1]) - a() * u(&[0, 2]);
        let e = (t() * v(&[0, 0]) * u(&[0, 1])).total_derivative(0)
            + (x() * v(&[0, 1]) * f).total_derivative(1);
        let p = reconstruct_fluxes(&e, 2).unwrap();
        assert_eq!(divergence(&p), e);
    }
}
