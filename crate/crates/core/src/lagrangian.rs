//! Formal and modified formal Lagrangians `L̂ = Σ v^α F_α + L_0`, their
//! adjoint systems and self-adjointness under a substitution `v = h(x, [u])`.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::expr::{Atom, Expr, ExprError, Field, Monomial, Rational};
use crate::jet::{euler_operator, is_total_divergence};
use crate::linalg::{Eliminator, SparseRow};
use crate::system::{DiffSystem, SystemError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LagrangianError {
    #[error("balance function mentions dummy fields")]
    DummyInBalance,
    #[error("substitution key {0} is not a base dummy field")]
    BadSubstitutionKey(String),
    #[error("substitution for {0} mentions dummy fields")]
    DummyInSubstitution(String),
    #[error(transparent)]
    System(#[from] SystemError),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

/// Where the balance function came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BalanceKind {
    Formal,
    Generic,
    Custom,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModifiedLagrangian {
    system: DiffSystem,
    balance: Expr,
    lagrangian: Expr,
    substitution: BTreeMap<Atom, Expr>,
    kind: BalanceKind,
}

/// `Σ_α v^α F_α`.
fn pairing(sys: &DiffSystem) -> Expr {
    let p = sys.p();
    sys.equations()
        .iter()
        .enumerate()
        .map(|(a, f)| Expr::atom(Atom::base(Field::dummy(a), p)) * f)
        .sum()
}

fn default_substitution(sys: &DiffSystem) -> BTreeMap<Atom, Expr> {
    let p = sys.p();
    (0..sys.q())
        .map(|a| {
            (
                Atom::base(Field::dummy(a), p),
                Expr::atom(Atom::base(Field::original(a), p)),
            )
        })
        .collect()
}

fn build(sys: &DiffSystem, balance: Expr, kind: BalanceKind) -> ModifiedLagrangian {
    let lagrangian = pairing(sys) + &balance;
    ModifiedLagrangian {
        system: sys.clone(),
        balance,
        lagrangian,
        substitution: default_substitution(sys),
        kind,
    }
}

/// `L = Σ v^α F_α`.
pub fn formal_lagrangian(sys: &DiffSystem) -> ModifiedLagrangian {
    build(sys, Expr::zero(), BalanceKind::Formal)
}

/// `L̂ = Σ (v^α − u^α) F_α`.
pub fn generic_modified_lagrangian(sys: &DiffSystem) -> ModifiedLagrangian {
    let p = sys.p();
    let balance = -sys
        .equations()
        .iter()
        .enumerate()
        .map(|(a, f)| Expr::atom(Atom::base(Field::original(a), p)) * f)
        .sum::<Expr>();
    build(sys, balance, BalanceKind::Generic)
}

/// `L̂ = Σ v^α F_α + L_0`; self-adjointness is not checked here.
pub fn with_balance(
    sys: &DiffSystem,
    balance: Expr,
) -> Result<ModifiedLagrangian, LagrangianError> {
    if balance.has_dummies() {
        return Err(LagrangianError::DummyInBalance);
    }
    Ok(build(sys, balance, BalanceKind::Custom))
}

impl ModifiedLagrangian {
    pub fn system(&self) -> &DiffSystem {
        &self.system
    }

    pub fn balance(&self) -> &Expr {
        &self.balance
    }

    pub fn lagrangian(&self) -> &Expr {
        &self.lagrangian
    }

    pub fn kind(&self) -> BalanceKind {
        self.kind
    }

    pub fn substitution(&self) -> &BTreeMap<Atom, Expr> {
        &self.substitution
    }

    /// Replace `v^α → u^α` by user rules; unmentioned dummies keep the default.
    pub fn with_substitution(
        mut self,
        rules: BTreeMap<Atom, Expr>,
    ) -> Result<Self, LagrangianError> {
        for (k, v) in &rules {
            let ok = matches!(k.as_jet(), Some((f, j)) if f.is_dummy() && j.is_zero() && f.index < self.system.q());
            if !ok {
                return Err(LagrangianError::BadSubstitutionKey(
                    self.system.space().render_atom(k),
                ));
            }
            if v.has_dummies() {
                return Err(LagrangianError::DummyInSubstitution(
                    self.system.space().render_atom(k),
                ));
            }
        }
        self.substitution.extend(rules);
        Ok(self)
    }

    /// Original fields followed by their dummies.
    pub fn fields(&self) -> Vec<Field> {
        let q = self.system.q();
        (0..q)
            .map(Field::original)
            .chain((0..q).map(Field::dummy))
            .collect()
    }

    /// The modified Euler–Lagrange system: `E_{v^α}(L̂) = F_α` followed by
    /// the modified adjoint equations `E_{u^α}(L̂)`.
    pub fn euler_lagrange_system(&self) -> Result<DiffSystem, SystemError> {
        let q = self.system.q();
        let mut equations: Vec<Expr> = self.system.equations().to_vec();
        equations.extend(adjoint_system(self));
        let mut leading: Vec<Option<Atom>> = self
            .system
            .solved_forms()
            .iter()
            .map(|s| Some(s.leading_atom()))
            .collect();
        leading.extend(std::iter::repeat_n(None, q));
        let unknowns = (0..q)
            .map(Field::original)
            .chain((0..q).map(Field::dummy))
            .collect();
        DiffSystem::with_unknowns(
            self.system.space().clone(),
            self.system.parameters().to_vec(),
            unknowns,
            equations,
            leading,
        )
    }
}

/// `F̂*_α = E_{u^α}(L̂)`.
pub fn adjoint_system(ml: &ModifiedLagrangian) -> Vec<Expr> {
    (0..ml.system.q())
        .map(|a| euler_operator(&ml.lagrangian, Field::original(a)))
        .collect()
}

/// True iff the two balances differ by a total divergence.
pub fn balance_equivalent(a: &Expr, b: &Expr) -> bool {
    is_total_divergence(&(a - b))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SelfAdjointMode {
    /// Require `F̂*_α|_{v=h} = −F_α`.
    #[default]
    Strict,
    /// Accept any invertible constant recombination of the equations.
    Lenient,
}

/// How one substituted adjoint equation relates to the system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ComponentStatus {
    /// `r_α = −F_α`.
    NegatedEquation,
    /// `r_α = μ F_α` with constant `μ ≠ −1`.
    Multiple(Rational),
    /// `r_α = Σ_β c_β F_β` with constant `c`.
    Combination(Vec<Rational>),
    /// Not a constant combination but zero on solutions.
    VanishesOnSolutions,
    Fails,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    SelfAdjoint,
    /// `r = M F` with the reported invertible constant matrix (lenient mode only).
    QuasiSelfAdjoint(Vec<Vec<Rational>>),
    NotSelfAdjoint,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SelfAdjointReport {
    pub mode: SelfAdjointMode,
    /// `r_α = F̂*_α|_{v=h}`.
    pub substituted: Vec<Expr>,
    pub components: Vec<ComponentStatus>,
    pub verdict: Verdict,
}

impl SelfAdjointReport {
    pub fn is_self_adjoint(&self) -> bool {
        !matches!(self.verdict, Verdict::NotSelfAdjoint)
    }

    /// The constant matrix with `r = M F`, when one exists.
    pub fn matrix(&self) -> Option<Vec<Vec<Rational>>> {
        match &self.verdict {
            Verdict::SelfAdjoint => {
                let n = self.components.len();
                Some(
                    (0..n)
                        .map(|a| {
                            (0..n)
                                .map(|b| {
                                    if a == b {
                                        -Rational::one()
                                    } else {
                                        Rational::zero()
                                    }
                                })
                                .collect()
                        })
                        .collect(),
                )
            }
            Verdict::QuasiSelfAdjoint(m) => Some(m.clone()),
            Verdict::NotSelfAdjoint => None,
        }
    }
}

/// Constant `c` with `r = Σ c_β F_β`, if any.
fn constant_combination(r: &Expr, fs: &[Expr]) -> Option<Vec<Rational>> {
    let mut rows: BTreeMap<Monomial, SparseRow> = BTreeMap::new();
    for (col, f) in fs.iter().enumerate() {
        for (m, c) in f.terms() {
            rows.entry(m.clone()).or_default().insert(col, c.clone());
        }
    }
    let mut elim = Eliminator::new();
    let mut rhs: BTreeMap<Monomial, Rational> =
        r.terms().map(|(m, c)| (m.clone(), c.clone())).collect();
    for (m, row) in rows {
        let b = rhs.remove(&m).unwrap_or_else(Rational::zero);
        elim.push(row, b);
    }
    if !rhs.is_empty() {
        return None;
    }
    elim.solve(fs.len())
}

fn invertible(m: &[Vec<Rational>]) -> bool {
    let mut elim = Eliminator::new();
    for row in m {
        elim.push(
            row.iter()
                .enumerate()
                .filter(|(_, v)| !v.is_zero())
                .map(|(i, v)| (i, v.clone()))
                .collect(),
            Rational::zero(),
        );
    }
    elim.rank() == m.len()
}

/// Substitute `v = h` into the modified adjoint system and compare with `F`.
pub fn check_self_adjointness(
    ml: &ModifiedLagrangian,
    mode: SelfAdjointMode,
) -> Result<SelfAdjointReport, LagrangianError> {
    let fs = ml.system.equations();
    let substituted: Vec<Expr> = adjoint_system(ml)
        .iter()
        .map(|e| e.substitute(&ml.substitution))
        .collect::<Result<_, _>>()?;
    let mut components = Vec::with_capacity(fs.len());
    let mut matrix = Vec::with_capacity(fs.len());
    for (a, r) in substituted.iter().enumerate() {
        let status = if (r + &fs[a]).is_zero() {
            ComponentStatus::NegatedEquation
        } else if let Some(c) = constant_combination(r, fs) {
            let diagonal = c.iter().enumerate().all(|(b, v)| b == a || v.is_zero());
            let status = if diagonal && !c[a].is_zero() {
                ComponentStatus::Multiple(c[a].clone())
            } else {
                ComponentStatus::Combination(c.clone())
            };
            matrix.push(c);
            status
        } else if crate::system::reduce_on_solutions(r, &ml.system)?.is_zero() {
            ComponentStatus::VanishesOnSolutions
        } else {
            ComponentStatus::Fails
        };
        if matches!(status, ComponentStatus::NegatedEquation) {
            let mut row = vec![Rational::zero(); fs.len()];
            row[a] = -Rational::one();
            matrix.push(row);
        }
        components.push(status);
    }
    let strict_ok = components
        .iter()
        .all(|c| matches!(c, ComponentStatus::NegatedEquation));
    let verdict = if strict_ok {
        Verdict::SelfAdjoint
    } else if mode == SelfAdjointMode::Lenient && matrix.len() == fs.len() && invertible(&matrix) {
        Verdict::QuasiSelfAdjoint(matrix)
    } else {
        Verdict::NotSelfAdjoint
    };
    Ok(SelfAdjointReport {
        mode,
        substituted,
        components,
        verdict,
    })
}
