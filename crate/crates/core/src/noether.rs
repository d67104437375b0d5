//! Variational symmetries of modified Lagrangians and Noether's construction.
//!
//! Fluxes come from integrating the invariance identity by parts,
//! `P = A − Lξ − B`, and are unique only up to divergence-free tuples.

use num_traits::Zero;
use thiserror::Error;

use crate::expr::{Expr, ExprError, Field, Space};
use crate::jet::{
    divergence, euler_operator, is_total_divergence, prolong_apply, reconstruct_fluxes, FluxTuple,
    Generator, JetError,
};
use crate::lagrangian::{
    check_self_adjointness, generic_modified_lagrangian, LagrangianError, ModifiedLagrangian,
    SelfAdjointMode,
};
use crate::system::{
    extract_k, reduce_on_solutions, DiffSystem, KMatrixSet, KOptions, Parameter, SystemError,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NoetherError {
    #[error("the balance function is not (divergence) invariant under the generator")]
    BalanceNotInvariant,
    #[error("the generator is not a variational symmetry of the Lagrangian")]
    NotVariational,
    #[error("the extended generator failed the invariance check")]
    ExtensionFailed,
    #[error("the modified Lagrangian is not self-adjoint under its substitution")]
    NotSelfAdjoint,
    #[error("the substituted law does not close on the original system")]
    SubstitutionResidual,
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    System(#[from] SystemError),
    #[error(transparent)]
    Lagrangian(#[from] LagrangianError),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Triviality {
    Nontrivial,
    /// Trivial characteristic, fluxes not identically divergence free.
    TrivialKind1,
    /// Trivial characteristic with `Div P ≡ 0`.
    TrivialKind2,
}

impl Triviality {
    pub fn is_trivial(self) -> bool {
        self != Triviality::Nontrivial
    }
}

/// `Div P = Σ Q^f E_f` with `E_f` the equations the characteristic multiplies.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConservationLaw {
    pub characteristic: Vec<(Field, Expr)>,
    pub equations: Vec<Expr>,
    pub fluxes: FluxTuple,
    pub residual: Expr,
    pub triviality: Triviality,
}

impl ConservationLaw {
    pub fn characteristic_of(&self, field: Field) -> Expr {
        self.characteristic
            .iter()
            .find(|(f, _)| *f == field)
            .map(|(_, e)| e.clone())
            .unwrap_or_default()
    }

    /// `Div P − Σ Q·E`, recomputed.
    pub fn recompute_residual(&self) -> Expr {
        let rhs: Expr = self
            .characteristic
            .iter()
            .zip(&self.equations)
            .map(|((_, q), e)| q * e)
            .sum();
        divergence(&self.fluxes) - rhs
    }
}

/// Flux `A` with `pr X(L) + L Div ξ = Div A`, or `None` if `X` is not a
/// (divergence) symmetry of `L`.
pub fn check_variational_symmetry(g: &Generator, l: &Expr) -> Result<Option<FluxTuple>, JetError> {
    let r = prolong_apply(g, l) + l * &g.div_xi();
    if r.is_zero() {
        return Ok(Some(FluxTuple::zero(g.p())));
    }
    if !is_total_divergence(&r) {
        return Ok(None);
    }
    reconstruct_fluxes(&r, g.p()).map(Some)
}

/// `Σ_{β,J} (−D)_J [w^β K^J_{βα}]`.
fn adjoint_k(k: &KMatrixSet, w: &[Expr], alpha: usize) -> Expr {
    let mut out = Expr::zero();
    for (j, m) in &k.matrices {
        for (beta, wb) in w.iter().enumerate() {
            let entry = &m[beta][alpha];
            if !entry.is_zero() {
                out += (wb * entry).adjoint_total_derivative_multi(j);
            }
        }
    }
    out
}

fn dummy(a: usize, p: usize) -> Expr {
    Expr::atom(crate::expr::Atom::base(Field::dummy(a), p))
}

fn original(a: usize, p: usize) -> Expr {
    Expr::atom(crate::expr::Atom::base(Field::original(a), p))
}

/// Extension to a variational symmetry of the generic modified Lagrangian:
/// `φ_*^α = φ^α − (−D)_J[(v^β − u^β) K^J_{βα}] − (v^α − u^α) Div ξ`.
pub fn extend_generic(
    g: &Generator,
    sys: &DiffSystem,
    opts: KOptions,
) -> Result<Generator, NoetherError> {
    let k = extract_k(&base_generator(g), sys, opts)?;
    let p = sys.p();
    let q = sys.q();
    let w: Vec<Expr> = (0..q).map(|b| dummy(b, p) - original(b, p)).collect();
    let div = g.div_xi();
    let phi_star = (0..q)
        .map(|a| &g.phi[a] - &adjoint_k(&k, &w, a) - &w[a] * &div)
        .collect();
    let y = base_generator(g).with_phi_star(phi_star);
    let ml = generic_modified_lagrangian(sys);
    if check_variational_symmetry(&y, ml.lagrangian())?.is_none() {
        return Err(NoetherError::ExtensionFailed);
    }
    Ok(y)
}

/// Extension for a balance that is itself (divergence) invariant:
/// `φ_*^α = −{(−D)_J[v^β K^J_{βα}] + v^α Div ξ}`.
pub fn extend_balanced(
    g: &Generator,
    ml: &ModifiedLagrangian,
    opts: KOptions,
) -> Result<Generator, NoetherError> {
    let base = base_generator(g);
    if check_variational_symmetry(&base, ml.balance())?.is_none() {
        return Err(NoetherError::BalanceNotInvariant);
    }
    let sys = ml.system();
    let k = extract_k(&base, sys, opts)?;
    let p = sys.p();
    let w: Vec<Expr> = (0..sys.q()).map(|b| dummy(b, p)).collect();
    let div = g.div_xi();
    let phi_star = (0..sys.q())
        .map(|a| -(adjoint_k(&k, &w, a) + &w[a] * &div))
        .collect();
    let y = base.with_phi_star(phi_star);
    if check_variational_symmetry(&y, ml.lagrangian())?.is_none() {
        return Err(NoetherError::ExtensionFailed);
    }
    Ok(y)
}

fn base_generator(g: &Generator) -> Generator {
    Generator::new(g.xi.clone(), g.phi.clone())
}

/// Trivial iff every component vanishes on solutions.
pub fn is_trivial_characteristic(q: &[Expr], sys: &DiffSystem) -> Result<bool, SystemError> {
    for c in q {
        if !reduce_on_solutions(c, sys)?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Triviality tag; without a usable system only `Q ≡ 0` counts as trivial.
pub fn classify(q: &[Expr], fluxes: &FluxTuple, sys: Option<&DiffSystem>) -> Triviality {
    let trivial = match sys.map(|s| is_trivial_characteristic(q, s)) {
        Some(Ok(t)) => t,
        _ => q.iter().all(Expr::is_zero),
    };
    if !trivial {
        Triviality::Nontrivial
    } else if divergence(fluxes).is_zero() {
        Triviality::TrivialKind2
    } else {
        Triviality::TrivialKind1
    }
}

/// Noether's construction for a plain Lagrangian over the listed fields.
/// The triviality tag is computed against the Euler–Lagrange system when
/// it admits a solved form.
pub fn noether_law_for(
    y: &Generator,
    l: &Expr,
    fields: &[Field],
    space: &Space,
    parameters: &[Parameter],
) -> Result<ConservationLaw, NoetherError> {
    let equations: Vec<Expr> = fields.iter().map(|f| euler_operator(l, *f)).collect();
    let el = DiffSystem::with_unknowns(
        space.clone(),
        parameters.to_vec(),
        fields.to_vec(),
        equations.clone(),
        vec![None; fields.len()],
    )
    .ok();
    law_from_equations(y, l, fields, equations, el.as_ref())
}

/// `B` with `Σ_J (D_J Q^α) ∂L/∂u^α_J = Q^α E_α(L) + Div B`, built by moving
/// one derivative at a time off `Q`.
fn parts_flux(l: &Expr, characteristic: &[(Field, Expr)], p: usize) -> Vec<Expr> {
    let mut b = vec![Expr::zero(); p];
    for atom in l.jet_atoms() {
        let Some((field, j)) = atom.as_jet() else {
            continue;
        };
        let Some((_, q)) = characteristic.iter().find(|(f, _)| *f == field) else {
            continue;
        };
        if j.is_zero() || q.is_zero() {
            continue;
        }
        let mut weight = l.partial(&atom);
        let mut rest = j.clone();
        while let Some(i) = (0..p).find(|&i| rest.get(i) > 0) {
            rest = rest.decremented(i).expect("positive entry");
            b[i] += q.total_derivative_multi(&rest) * &weight;
            weight = -weight.total_derivative(i);
        }
    }
    b
}

fn law_from_equations(
    y: &Generator,
    l: &Expr,
    fields: &[Field],
    equations: Vec<Expr>,
    el: Option<&DiffSystem>,
) -> Result<ConservationLaw, NoetherError> {
    let a = check_variational_symmetry(y, l)?.ok_or(NoetherError::NotVariational)?;
    let characteristic: Vec<(Field, Expr)> = fields
        .iter()
        .map(|f| (*f, y.characteristic_of(*f)))
        .collect();
    let rhs: Expr = characteristic
        .iter()
        .zip(&equations)
        .map(|((_, q), e)| q * e)
        .sum();
    let b = parts_flux(l, &characteristic, y.p());
    let fluxes = FluxTuple::new(
        a.components
            .iter()
            .zip(&y.xi)
            .zip(&b)
            .map(|((a, xi), b)| a - &(l * xi) - b)
            .collect(),
    );
    let residual = divergence(&fluxes) - rhs;
    assert!(
        residual.is_zero(),
        "Noether fluxes must satisfy the characteristic form"
    );
    let qs: Vec<Expr> = characteristic.iter().map(|(_, q)| q.clone()).collect();
    let triviality = classify(&qs, &fluxes, el);
    Ok(ConservationLaw {
        characteristic,
        equations,
        fluxes,
        residual,
        triviality,
    })
}

/// Conservation law of the modified Euler–Lagrange system generated by a
/// variational symmetry `Y` of `L̂`, with characteristic over `u` and `v`.
pub fn noether_law(
    y: &Generator,
    ml: &ModifiedLagrangian,
) -> Result<ConservationLaw, NoetherError> {
    let fields = ml.fields();
    let equations: Vec<Expr> = fields
        .iter()
        .map(|f| euler_operator(ml.lagrangian(), *f))
        .collect();
    let el = ml.euler_lagrange_system().ok();
    law_from_equations(y, ml.lagrangian(), &fields, equations, el.as_ref())
}

/// Apply the dummy substitution and fold the adjoint contribution:
/// `Q̃_β = Σ_α Q^{u^α} M_{αβ} + Q^{v^β}` where `F̂*|_{v=h} = M F`
/// (`M = −I` in strict mode).
pub fn substitute_dummy(
    cl: &ConservationLaw,
    ml: &ModifiedLagrangian,
    mode: SelfAdjointMode,
) -> Result<ConservationLaw, NoetherError> {
    let report = check_self_adjointness(ml, mode)?;
    let m = report.matrix().ok_or(NoetherError::NotSelfAdjoint)?;
    let rules = ml.substitution();
    let sys = ml.system();
    let q = sys.q();
    let qu: Vec<Expr> = (0..q)
        .map(|a| cl.characteristic_of(Field::original(a)).substitute(rules))
        .collect::<Result<_, _>>()?;
    let qv: Vec<Expr> = (0..q)
        .map(|a| cl.characteristic_of(Field::dummy(a)).substitute(rules))
        .collect::<Result<_, _>>()?;
    let folded: Vec<Expr> = (0..q)
        .map(|b| {
            let mut acc = qv[b].clone();
            for (a, row) in m.iter().enumerate() {
                if !row[b].is_zero() {
                    acc += qu[a].scale(&row[b]);
                }
            }
            acc
        })
        .collect();
    let fluxes = cl.fluxes.try_map(|e| e.substitute(rules))?;
    let equations = sys.equations().to_vec();
    let characteristic: Vec<(Field, Expr)> = folded
        .iter()
        .enumerate()
        .map(|(a, e)| (Field::original(a), e.clone()))
        .collect();
    let rhs: Expr = folded.iter().zip(&equations).map(|(q, f)| q * f).sum();
    let residual = divergence(&fluxes) - rhs;
    if !residual.is_zero() {
        return Err(NoetherError::SubstitutionResidual);
    }
    let triviality = classify(&folded, &fluxes, Some(sys));
    Ok(ConservationLaw {
        characteristic,
        equations,
        fluxes,
        residual,
        triviality,
    })
}
