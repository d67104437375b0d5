//! Systems of differential equations with a solved leading-derivative form:
//! reduction on solutions, the linearized symmetry condition and extraction
//! of the `K^J` matrices of `pr X(F_α) = Σ K^J_{αβ} D_J F_β`.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num_traits::Zero;
use thiserror::Error;

use crate::expr::{Atom, Expr, ExprError, Field, Monomial, MultiIndex, Rational, Space};
use crate::jet::{prolong_apply, Generator};
use crate::linalg::{Eliminator, SparseRow};

pub const DEFAULT_DEPTH_BOUND: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SystemError {
    #[error("expected {expected} equations (one per unknown field), found {found}")]
    EquationCount { expected: usize, found: usize },
    #[error("equation {0} mentions a field the system does not govern")]
    ForeignField(usize),
    #[error("equation {equation} has no usable solved form: {reason}")]
    NoSolvedForm { equation: usize, reason: String },
    #[error("leading derivatives of equations {first} and {second} overlap (one is a derivative of the other)")]
    LeadingConflict { first: usize, second: usize },
    #[error("reduction on solutions exceeded {depth} substitution passes; the solved form is probably invalid")]
    NonTerminating { depth: usize },
    #[error("the generator does not satisfy the linearized symmetry condition")]
    NotASymmetry,
    #[error(
        "no K matrices found with |J| <= {max_order} and ansatz degree <= {degree}: either the \
         generator is not a symmetry in the strong sense or the ansatz is too small (raise the bounds)"
    )]
    AnsatzExhausted { max_order: u32, degree: u32 },
    #[error(transparent)]
    Expr(#[from] ExprError),
}

/// A named constant; only those flagged nonzero may appear in denominators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Parameter {
    pub name: Arc<str>,
    pub nonzero: bool,
}

impl Parameter {
    pub fn new(name: &str, nonzero: bool) -> Self {
        Parameter {
            name: name.into(),
            nonzero,
        }
    }
}

/// `field_index = rhs` on solutions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolvedForm {
    pub field: Field,
    pub index: MultiIndex,
    pub rhs: Expr,
}

impl SolvedForm {
    pub fn leading_atom(&self) -> Atom {
        Atom::jet(self.field, self.index.clone())
    }
}

/// A system `{F_α = 0}` with one equation per governed field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiffSystem {
    space: Space,
    parameters: Vec<Parameter>,
    unknowns: Vec<Field>,
    equations: Vec<Expr>,
    solved: Vec<SolvedForm>,
    depth_bound: usize,
}

impl DiffSystem {
    /// Build a system over the original fields of `space`. `leading[α]`
    /// selects the solved-for jet atom of equation `α`; `None` uses the
    /// default heuristic.
    pub fn new(
        space: Space,
        parameters: Vec<Parameter>,
        equations: Vec<Expr>,
        leading: Vec<Option<Atom>>,
    ) -> Result<Self, SystemError> {
        let unknowns = (0..space.q()).map(Field::original).collect();
        Self::with_unknowns(space, parameters, unknowns, equations, leading)
    }

    /// Like [`DiffSystem::new`] with heuristic leading derivatives throughout.
    pub fn with_default_leading(
        space: Space,
        parameters: Vec<Parameter>,
        equations: Vec<Expr>,
    ) -> Result<Self, SystemError> {
        let n = equations.len();
        Self::new(space, parameters, equations, vec![None; n])
    }

    /// A system governing an arbitrary set of fields (e.g. originals and
    /// dummies for modified Euler–Lagrange equations).
    pub fn with_unknowns(
        space: Space,
        parameters: Vec<Parameter>,
        unknowns: Vec<Field>,
        equations: Vec<Expr>,
        leading: Vec<Option<Atom>>,
    ) -> Result<Self, SystemError> {
        if equations.len() != unknowns.len() {
            return Err(SystemError::EquationCount {
                expected: unknowns.len(),
                found: equations.len(),
            });
        }
        assert_eq!(leading.len(), equations.len());
        for (k, eq) in equations.iter().enumerate() {
            if eq.fields().iter().any(|f| !unknowns.contains(f)) {
                return Err(SystemError::ForeignField(k));
            }
        }
        let mut sys = DiffSystem {
            space,
            parameters,
            unknowns,
            equations,
            solved: Vec::new(),
            depth_bound: DEFAULT_DEPTH_BOUND,
        };
        let mut solved = Vec::with_capacity(sys.equations.len());
        for (k, (eq, lead)) in sys.equations.iter().zip(leading).enumerate() {
            let sf = match lead {
                Some(atom) => sys.solve_for(k, eq, &atom)?,
                None => sys.default_solved_form(k, eq)?,
            };
            solved.push(sf);
        }
        for (a, sa) in solved.iter().enumerate() {
            for (b, sb) in solved.iter().enumerate() {
                if a < b
                    && sa.field == sb.field
                    && (sa.index.dominates(&sb.index) || sb.index.dominates(&sa.index))
                {
                    return Err(SystemError::LeadingConflict {
                        first: a,
                        second: b,
                    });
                }
            }
        }
        sys.solved = solved;
        Ok(sys)
    }

    pub fn with_depth_bound(mut self, depth: usize) -> Self {
        self.depth_bound = depth;
        self
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn parameters(&self) -> &[Parameter] {
        &self.parameters
    }

    pub fn unknowns(&self) -> &[Field] {
        &self.unknowns
    }

    pub fn p(&self) -> usize {
        self.space.p()
    }

    /// Number of original dependent fields.
    pub fn q(&self) -> usize {
        self.space.q()
    }

    pub fn equations(&self) -> &[Expr] {
        &self.equations
    }

    pub fn solved_forms(&self) -> &[SolvedForm] {
        &self.solved
    }

    pub fn is_nonzero_param(&self, name: &str) -> bool {
        self.parameters
            .iter()
            .any(|p| p.nonzero && &*p.name == name)
    }

    /// The coefficient `c` in `F = c·(lead − rhs)` must be a rational times
    /// a monomial in nonzero parameters.
    fn admissible_coefficient(&self, c: &Expr) -> bool {
        match c.as_param_monomial() {
            Some((m, k)) => {
                !k.is_zero()
                    && m.factors().iter().all(|(a, e)| match a {
                        Atom::Param(n) => *e < 0 || self.is_nonzero_param(n),
                        _ => false,
                    })
            }
            None => false,
        }
    }

    fn solve_for(&self, k: usize, eq: &Expr, atom: &Atom) -> Result<SolvedForm, SystemError> {
        let fail = |reason: String| SystemError::NoSolvedForm {
            equation: k,
            reason,
        };
        let Some((field, index)) = atom.as_jet() else {
            return Err(fail(
                "the solved-for atom must be a dependent-variable derivative".into(),
            ));
        };
        let c = eq.partial(atom);
        if c.is_zero() {
            return Err(fail(format!(
                "{} does not occur",
                self.space.render_atom(atom)
            )));
        }
        if !self.admissible_coefficient(&c) {
            return Err(fail(format!(
                "coefficient {} of {} is not a nonzero constant",
                self.space.render(&c),
                self.space.render_atom(atom)
            )));
        }
        let rhs = Expr::atom(atom.clone()) - eq.checked_div(&c)?;
        let recursive = rhs.jet_atoms().into_iter().any(|a| match a.as_jet() {
            Some((f, j)) => f == field && j.dominates(index),
            None => false,
        });
        if recursive {
            return Err(fail(format!(
                "right-hand side for {} contains its derivatives",
                self.space.render_atom(atom)
            )));
        }
        Ok(SolvedForm {
            field,
            index: index.clone(),
            rhs,
        })
    }

    /// Heuristic leading derivative: among atoms with a nonzero constant
    /// coefficient, prefer those differentiated by the first independent
    /// variable, then the highest order, then field order. Equations that
    /// mention dummy fields are solved for a dummy derivative.
    fn default_solved_form(&self, k: usize, eq: &Expr) -> Result<SolvedForm, SystemError> {
        let dummy_only = eq.has_dummies();
        let mut candidates: Vec<SolvedForm> = eq
            .jet_atoms()
            .iter()
            .filter(|a| !dummy_only || a.as_jet().is_some_and(|(f, _)| f.is_dummy()))
            .filter_map(|a| self.solve_for(k, eq, a).ok())
            .collect();
        candidates.sort_by(|a, b| {
            let ta = !a.index.is_empty() && a.index.get(0) > 0;
            let tb = !b.index.is_empty() && b.index.get(0) > 0;
            tb.cmp(&ta)
                .then_with(|| b.index.order().cmp(&a.index.order()))
                .then_with(|| a.field.cmp(&b.field))
                .then_with(|| b.index.cmp(&a.index))
        });
        candidates
            .into_iter()
            .next()
            .ok_or_else(|| SystemError::NoSolvedForm {
                equation: k,
                reason: "no derivative occurs linearly with a nonzero constant coefficient".into(),
            })
    }

    fn matching_rule(&self, atom: &Atom) -> Option<(&SolvedForm, MultiIndex)> {
        let (field, j) = atom.as_jet()?;
        self.solved
            .iter()
            .find(|s| s.field == field && j.dominates(&s.index))
            .map(|s| (s, j.minus(&s.index).unwrap()))
    }
}

/// Normal form of `e` modulo the system: leading derivatives and all their
/// derivatives are replaced by the total derivatives of the solved right-hand
/// sides until none remain.
pub fn reduce_on_solutions(e: &Expr, sys: &DiffSystem) -> Result<Expr, SystemError> {
    let mut cache: BTreeMap<Atom, Expr> = BTreeMap::new();
    let mut current = e.clone();
    for _ in 0..sys.depth_bound {
        let mut rules = BTreeMap::new();
        for a in current.jet_atoms() {
            if let Some(rep) = cache.get(&a) {
                rules.insert(a, rep.clone());
                continue;
            }
            if let Some((sf, rest)) = sys.matching_rule(&a) {
                let rep = sf.rhs.total_derivative_multi(&rest);
                cache.insert(a.clone(), rep.clone());
                rules.insert(a, rep);
            }
        }
        if rules.is_empty() {
            return Ok(current);
        }
        current = current.replace_atoms(&rules)?;
    }
    Err(SystemError::NonTerminating {
        depth: sys.depth_bound,
    })
}

/// True iff `pr X(F_α)` vanishes on solutions for every equation.
pub fn check_linearized_symmetry(g: &Generator, sys: &DiffSystem) -> Result<bool, SystemError> {
    for f in sys.equations() {
        let image = prolong_apply(g, f);
        if !reduce_on_solutions(&image, sys)?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Matrices `K^J` (q×q) keyed by multi-index; only nonzero matrices are stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KMatrixSet {
    pub matrices: BTreeMap<MultiIndex, Vec<Vec<Expr>>>,
    pub max_order: u32,
    pub size: usize,
}

impl KMatrixSet {
    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }

    pub fn entry(&self, j: &MultiIndex, alpha: usize, beta: usize) -> Expr {
        self.matrices
            .get(j)
            .map(|m| m[alpha][beta].clone())
            .unwrap_or_default()
    }

    /// `Σ_{β,J} K^J_{αβ} D_J F_β`.
    pub fn apply(&self, alpha: usize, sys: &DiffSystem) -> Expr {
        let mut out = Expr::zero();
        for (j, m) in &self.matrices {
            for (beta, k) in m[alpha].iter().enumerate() {
                if !k.is_zero() {
                    out += k * &sys.equations()[beta].total_derivative_multi(j);
                }
            }
        }
        out
    }
}

/// Search bounds for [`extract_k`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct KOptions {
    pub max_order: u32,
    /// Total degree of the polynomial ansatz for each entry; `None` uses
    /// one more than the jet degree of `pr X(F_α)`.
    pub ansatz_degree: Option<u32>,
}

/// Find `K` with `pr X(F_α) = Σ_{β,J} K^J_{αβ} D_J F_β` identically, by
/// matching coefficients against a polynomial ansatz of increasing order
/// and degree and solving the linear system exactly.
pub fn extract_k(
    g: &Generator,
    sys: &DiffSystem,
    opts: KOptions,
) -> Result<KMatrixSet, SystemError> {
    if !check_linearized_symmetry(g, sys)? {
        return Err(SystemError::NotASymmetry);
    }
    let n = sys.equations().len();
    let p = sys.p();
    let mut rows: Vec<BTreeMap<MultiIndex, Vec<Expr>>> = Vec::with_capacity(n);
    let mut used_degree = 0;
    for alpha in 0..n {
        let target = prolong_apply(g, &sys.equations()[alpha]);
        let cap = opts.ansatz_degree.unwrap_or(target.jet_degree() + 1);
        used_degree = used_degree.max(cap);
        let row = if target.is_zero() {
            Some(BTreeMap::new())
        } else {
            solve_row(&target, sys, p, opts.max_order, cap)
        };
        match row {
            Some(r) => rows.push(r),
            None => {
                return Err(SystemError::AnsatzExhausted {
                    max_order: opts.max_order,
                    degree: cap,
                })
            }
        }
    }
    let mut matrices: BTreeMap<MultiIndex, Vec<Vec<Expr>>> = BTreeMap::new();
    for (alpha, row) in rows.into_iter().enumerate() {
        for (j, entries) in row {
            if entries.iter().all(Expr::is_zero) {
                continue;
            }
            let m = matrices
                .entry(j)
                .or_insert_with(|| vec![vec![Expr::zero(); n]; n]);
            m[alpha] = entries;
        }
    }
    let _ = used_degree;
    let k = KMatrixSet {
        matrices,
        max_order: opts.max_order,
        size: n,
    };
    for (alpha, f) in sys.equations().iter().enumerate() {
        let residual = prolong_apply(g, f) - k.apply(alpha, sys);
        assert!(
            residual.is_zero(),
            "K extraction produced an unsound identity"
        );
    }
    Ok(k)
}

fn solve_row(
    target: &Expr,
    sys: &DiffSystem,
    p: usize,
    max_order: u32,
    cap: u32,
) -> Option<BTreeMap<MultiIndex, Vec<Expr>>> {
    let n = sys.equations().len();
    let mut atoms: BTreeSet<Atom> = (0..p).map(Atom::Indep).collect();
    atoms.extend(target.atoms());
    for f in sys.equations() {
        atoms.extend(f.atoms());
    }
    let atoms: Vec<Atom> = atoms.into_iter().collect();
    for order in 0..=max_order {
        let js = MultiIndex::up_to_order(p, order);
        let derived: Vec<Vec<Expr>> = js
            .iter()
            .map(|j| {
                sys.equations()
                    .iter()
                    .map(|f| f.total_derivative_multi(j))
                    .collect()
            })
            .collect();
        for degree in 0..=cap {
            let basis = monomials_up_to(&atoms, degree);
            let mut unknowns = Vec::new();
            for (ji, _) in js.iter().enumerate() {
                for beta in 0..n {
                    if derived[ji][beta].is_zero() {
                        continue;
                    }
                    for m in &basis {
                        unknowns.push((ji, beta, m.clone()));
                    }
                }
            }
            let mut system: BTreeMap<Monomial, SparseRow> = BTreeMap::new();
            for (col, (ji, beta, m)) in unknowns.iter().enumerate() {
                for (mono, c) in derived[*ji][*beta].terms() {
                    let key = mono.mul(m);
                    let entry = system.entry(key).or_default();
                    *entry.entry(col).or_insert_with(Rational::zero) += c;
                }
            }
            let mut elim = Eliminator::new();
            let mut rhs_map: BTreeMap<Monomial, Rational> = target
                .terms()
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect();
            let mut feasible = true;
            for (mono, mut row) in system {
                row.retain(|_, v| !v.is_zero());
                let rhs = rhs_map.remove(&mono).unwrap_or_else(Rational::zero);
                elim.push(row, rhs);
            }
            if !rhs_map.is_empty() {
                // target monomials no ansatz product can reach
                feasible = false;
            }
            if !feasible {
                continue;
            }
            if let Some(sol) = elim.solve(unknowns.len()) {
                let mut row: BTreeMap<MultiIndex, Vec<Expr>> = BTreeMap::new();
                for ((ji, beta, m), c) in unknowns.iter().zip(sol) {
                    if c.is_zero() {
                        continue;
                    }
                    let entry = row
                        .entry(js[*ji].clone())
                        .or_insert_with(|| vec![Expr::zero(); n]);
                    entry[*beta] += Expr::term(m.clone(), c);
                }
                return Some(row);
            }
        }
    }
    None
}

fn monomials_up_to(atoms: &[Atom], degree: u32) -> Vec<Monomial> {
    let mut out = vec![Monomial::one()];
    let mut layer = vec![(Monomial::one(), 0usize)];
    for _ in 0..degree {
        let mut next = Vec::new();
        for (m, start) in &layer {
            for (k, a) in atoms.iter().enumerate().skip(*start) {
                next.push((m.times_power(a, 1), k));
            }
        }
        out.extend(next.iter().map(|(m, _)| m.clone()));
        layer = next;
    }
    out
}
