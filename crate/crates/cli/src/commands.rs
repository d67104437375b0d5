//! The command pipeline: each command lowers the problem, runs the kernel
//! and collects a [`Document`].

use jetnoether_core::jet::{
    divergence, euler_operator, is_total_divergence, prolong_apply, reconstruct_fluxes, FluxTuple,
    Generator,
};
use jetnoether_core::lagrangian::{
    adjoint_system, check_self_adjointness, formal_lagrangian, generic_modified_lagrangian,
    ComponentStatus, ModifiedLagrangian, SelfAdjointMode, Verdict,
};
use jetnoether_core::noether::{
    check_variational_symmetry, classify, extend_balanced, extend_generic, noether_law,
    substitute_dummy, ConservationLaw, NoetherError, Triviality,
};
use jetnoether_core::system::{extract_k, reduce_on_solutions, KOptions};
use jetnoether_core::{Expr, Field, Rational, Space};
use num_traits::One;

use crate::problem::{Balance, FrontendError, NamedGenerator, Problem};
use crate::report::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum CommandKind {
    Adjoint,
    CheckSym,
    Extend,
    Conserve,
    Verify,
    Divtest,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::Adjoint => "adjoint",
            CommandKind::CheckSym => "check-sym",
            CommandKind::Extend => "extend",
            CommandKind::Conserve => "conserve",
            CommandKind::Verify => "verify",
            CommandKind::Divtest => "divtest",
        }
    }
}

/// Which extension formula turns a Lie point symmetry into a variational
/// symmetry of the modified Lagrangian.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, clap::ValueEnum)]
pub enum Mode {
    /// Generic balance `-u.F`; the dummy coefficient absorbs `(v - u)`.
    Generic,
    /// The file's balance, which must itself be invariant.
    #[default]
    Balanced,
}

/// Balance override for the modified Lagrangian.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, clap::ValueEnum)]
pub enum BalanceChoice {
    /// Whatever the problem file declares (generic when absent).
    #[default]
    Declared,
    Generic,
    Formal,
}

/// Which flux tuple `conserve` reports; both have the same divergence.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, clap::ValueEnum)]
pub enum FluxForm {
    /// Homotopy reconstruction of `Q.F`; depends only on the law.
    #[default]
    Reduced,
    /// `A - L xi - B` from integrating the invariance identity by parts.
    Noether,
}

impl FluxForm {
    pub fn name(self) -> &'static str {
        match self {
            FluxForm::Reduced => "reduced",
            FluxForm::Noether => "noether",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Options {
    pub generators: Vec<String>,
    pub laws: Vec<String>,
    pub expr: Option<String>,
    pub mode: Mode,
    pub balance: BalanceChoice,
    pub strict_selfadjoint: bool,
    pub k: KOptions,
    pub fluxes: FluxForm,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            generators: Vec::new(),
            laws: Vec::new(),
            expr: None,
            mode: Mode::Balanced,
            balance: BalanceChoice::Declared,
            strict_selfadjoint: true,
            k: KOptions::default(),
            fluxes: FluxForm::Reduced,
        }
    }
}

impl Options {
    fn self_adjoint_mode(&self) -> SelfAdjointMode {
        if self.strict_selfadjoint {
            SelfAdjointMode::Strict
        } else {
            SelfAdjointMode::Lenient
        }
    }
}

const FORMAT: &str = "jetnoether-report/1";

fn document(cmd: CommandKind, status: Status, body: Body) -> Document {
    Document {
        format: FORMAT,
        command: cmd.name().to_string(),
        status,
        exit_code: status.exit_code(),
        body,
    }
}

fn error_document(cmd: CommandKind, message: String, at: Option<(u32, u32)>) -> Document {
    document(
        cmd,
        Status::Error,
        Body::Error(ErrorReport {
            error: message,
            line: at.map(|a| a.0),
            column: at.map(|a| a.1),
        }),
    )
}

fn frontend_error(cmd: CommandKind, e: &FrontendError) -> Document {
    let span = match e {
        FrontendError::Parse(p) => p.span(),
        FrontendError::Semantic(s) => s.span,
    };
    error_document(cmd, e.to_string(), Some((span.line, span.col)))
}

/// Parse `src` and run `cmd` on it.
pub fn run(cmd: CommandKind, src: &str, opts: &Options) -> Document {
    match Problem::parse(src) {
        Ok(p) => run_problem(cmd, &p, opts),
        Err(e) => frontend_error(cmd, &e),
    }
}

pub fn run_problem(cmd: CommandKind, problem: &Problem, opts: &Options) -> Document {
    let result = match cmd {
        CommandKind::Adjoint => adjoint(problem, opts),
        CommandKind::CheckSym => check_sym(problem, opts),
        CommandKind::Extend => extend(problem, opts),
        CommandKind::Conserve => conserve(problem, opts),
        CommandKind::Verify => verify(problem, opts),
        CommandKind::Divtest => divtest(problem, opts),
    };
    match result {
        Ok((status, body)) => document(cmd, status, body),
        Err(message) => error_document(cmd, message, None),
    }
}

type Outcome = Result<(Status, Body), String>;

fn render_all(space: &Space, names: &[String], exprs: &[Expr]) -> Vec<Named> {
    names
        .iter()
        .zip(exprs)
        .map(|(n, e)| Named::new(n.clone(), space.render(e)))
        .collect()
}

fn rational(r: &Rational) -> String {
    space_free(&Expr::constant(r.clone()))
}

fn space_free(e: &Expr) -> String {
    Space::new(Vec::new(), Vec::new(), Vec::new()).render(e)
}

fn modified_lagrangian(
    problem: &Problem,
    choice: BalanceChoice,
) -> Result<ModifiedLagrangian, String> {
    let ml = match choice {
        BalanceChoice::Declared => return problem.modified_lagrangian().map_err(|e| e.to_string()),
        BalanceChoice::Generic => generic_modified_lagrangian(&problem.system),
        BalanceChoice::Formal => formal_lagrangian(&problem.system),
    };
    ml.with_substitution(problem.substitution.clone())
        .map_err(|e| e.to_string())
}

fn balance_kind(problem: &Problem, choice: BalanceChoice) -> &'static str {
    match (choice, &problem.balance) {
        (BalanceChoice::Generic, _) | (BalanceChoice::Declared, Balance::Generic) => "generic",
        (BalanceChoice::Formal, _) | (BalanceChoice::Declared, Balance::Formal) => "formal",
        (BalanceChoice::Declared, Balance::Custom(_)) => "custom",
    }
}

fn selected<'a>(problem: &'a Problem, names: &[String]) -> Result<Vec<&'a NamedGenerator>, String> {
    if names.is_empty() {
        if problem.generators.is_empty() {
            return Err("the problem declares no generators".into());
        }
        return Ok(problem.generators.iter().collect());
    }
    names
        .iter()
        .map(|n| {
            problem
                .generator(n)
                .ok_or_else(|| format!("unknown generator `{n}`"))
        })
        .collect()
}

fn adjoint(problem: &Problem, opts: &Options) -> Outcome {
    let space = problem.space();
    let ml = modified_lagrangian(problem, opts.balance)?;
    let report =
        check_self_adjointness(&ml, opts.self_adjoint_mode()).map_err(|e| e.to_string())?;
    let components = report
        .components
        .iter()
        .zip(&report.substituted)
        .zip(&problem.equation_names)
        .map(|((status, r), name)| {
            let (status, coefficients) = match status {
                ComponentStatus::NegatedEquation => ("negated equation", None),
                ComponentStatus::Multiple(c) => {
                    ("multiple of the equation", Some(vec![rational(c)]))
                }
                ComponentStatus::Combination(cs) => (
                    "combination of equations",
                    Some(cs.iter().map(rational).collect()),
                ),
                ComponentStatus::VanishesOnSolutions => ("vanishes on solutions only", None),
                ComponentStatus::Fails => ("fails", None),
            };
            AdjointComponent {
                equation: name.clone(),
                substituted: space.render(r),
                status: status.into(),
                coefficients,
            }
        })
        .collect();
    let (verdict, status) = match &report.verdict {
        Verdict::SelfAdjoint => ("self-adjoint", Status::Success),
        Verdict::QuasiSelfAdjoint(_) => ("quasi-self-adjoint", Status::Success),
        Verdict::NotSelfAdjoint => ("not self-adjoint", Status::Negative),
    };
    let matrix = report.matrix().map(|m| {
        m.iter()
            .map(|row| row.iter().map(rational).collect())
            .collect()
    });
    let body = AdjointReport {
        balance_kind: balance_kind(problem, opts.balance).into(),
        balance: space.render(ml.balance()),
        lagrangian: space.render(ml.lagrangian()),
        adjoint: render_all(space, &space.fields, &adjoint_system(&ml)),
        substitution: substitution_view(&ml),
        mode: mode_name(opts.self_adjoint_mode()).into(),
        components,
        verdict: verdict.into(),
        matrix,
    };
    Ok((status, Body::Adjoint(body)))
}

fn mode_name(m: SelfAdjointMode) -> &'static str {
    match m {
        SelfAdjointMode::Strict => "strict",
        SelfAdjointMode::Lenient => "lenient",
    }
}

fn substitution_view(ml: &ModifiedLagrangian) -> Vec<Named> {
    let space = ml.system().space();
    ml.substitution()
        .iter()
        .map(|(a, e)| Named::new(space.render_atom(a), space.render(e)))
        .collect()
}

fn check_sym(problem: &Problem, opts: &Options) -> Outcome {
    let space = problem.space();
    let sys = &problem.system;
    let mut status = Status::Success;
    let mut generators = Vec::new();
    for g in selected(problem, &opts.generators)? {
        let pr: Vec<Expr> = sys
            .equations()
            .iter()
            .map(|f| prolong_apply(&g.generator, f))
            .collect();
        let mut result = SymmetryResult {
            name: g.name.clone(),
            prolongation: render_all(space, &problem.equation_names, &pr),
            on_solutions: Vec::new(),
            symmetry: false,
            k: None,
            error: None,
        };
        let reduced: Result<Vec<Expr>, _> =
            pr.iter().map(|e| reduce_on_solutions(e, sys)).collect();
        match reduced {
            Err(e) => {
                result.error = Some(e.to_string());
                status = status.max(Status::Error);
            }
            Ok(reduced) => {
                result.on_solutions = render_all(space, &problem.equation_names, &reduced);
                result.symmetry = reduced.iter().all(Expr::is_zero);
                if !result.symmetry {
                    status = status.max(Status::Negative);
                } else {
                    match extract_k(&g.generator, sys, opts.k) {
                        Ok(k) => {
                            result.k = Some(
                                k.matrices
                                    .iter()
                                    .map(|(j, m)| KBlock {
                                        operator: if j.is_zero() {
                                            "I".into()
                                        } else {
                                            format!("D_{}", space.subscript(j))
                                        },
                                        matrix: m
                                            .iter()
                                            .map(|row| {
                                                row.iter().map(|e| space.render(e)).collect()
                                            })
                                            .collect(),
                                    })
                                    .collect(),
                            )
                        }
                        Err(e) => result.error = Some(format!("K extraction: {e}")),
                    }
                }
            }
        }
        generators.push(result);
    }
    Ok((status, Body::CheckSym(CheckSymReport { generators })))
}

fn generator_view(space: &Space, g: &Generator) -> GeneratorView {
    let phi_star = match &g.phi_star {
        Some(ps) => render_all(space, &space.dummies, ps),
        None => Vec::new(),
    };
    GeneratorView {
        xi: render_all(space, &space.independent, &g.xi),
        phi: render_all(space, &space.fields, &g.phi),
        phi_star,
    }
}

fn noether_status(e: &NoetherError) -> Status {
    match e {
        NoetherError::BalanceNotInvariant
        | NoetherError::NotVariational
        | NoetherError::NotSelfAdjoint => Status::Negative,
        _ => Status::Error,
    }
}

/// The modified Lagrangian a command works with: generic mode always uses
/// the generic balance, since its extension formula presumes it.
fn pipeline_lagrangian(problem: &Problem, opts: &Options) -> Result<ModifiedLagrangian, String> {
    match opts.mode {
        Mode::Generic => modified_lagrangian(problem, BalanceChoice::Generic),
        Mode::Balanced => modified_lagrangian(problem, opts.balance),
    }
}

fn mode_label(problem: &Problem, opts: &Options) -> (String, String) {
    match opts.mode {
        Mode::Generic => ("generic".into(), "generic".into()),
        Mode::Balanced => (
            "balanced".into(),
            balance_kind(problem, opts.balance).into(),
        ),
    }
}

/// Variational symmetry of the modified Lagrangian for `g`, with its
/// provenance label.
fn extended(
    g: &NamedGenerator,
    problem: &Problem,
    ml: &ModifiedLagrangian,
    opts: &Options,
) -> Result<(Generator, &'static str), NoetherError> {
    if g.explicit_phi_star {
        return match check_variational_symmetry(&g.generator, ml.lagrangian())? {
            Some(_) => Ok((g.generator.clone(), "explicit generator")),
            None => Err(NoetherError::NotVariational),
        };
    }
    match opts.mode {
        Mode::Generic => Ok((
            extend_generic(&g.generator, &problem.system, opts.k)?,
            "generic extension",
        )),
        Mode::Balanced => Ok((
            extend_balanced(&g.generator, ml, opts.k)?,
            "balanced extension",
        )),
    }
}

fn provenance_guess(g: &NamedGenerator, mode: Mode) -> &'static str {
    match (g.explicit_phi_star, mode) {
        (true, _) => "explicit generator",
        (false, Mode::Generic) => "generic extension",
        (false, Mode::Balanced) => "balanced extension",
    }
}

fn extend(problem: &Problem, opts: &Options) -> Outcome {
    let space = problem.space();
    let ml = pipeline_lagrangian(problem, opts)?;
    let (mode, balance_kind) = mode_label(problem, opts);
    let mut status = Status::Success;
    let mut generators = Vec::new();
    for g in selected(problem, &opts.generators)? {
        let mut result = ExtensionResult {
            name: g.name.clone(),
            provenance: provenance_guess(g, opts.mode).into(),
            generator: None,
            invariance_flux: None,
            error: None,
        };
        match extended(g, problem, &ml, opts) {
            Ok((y, _)) => {
                result.generator = Some(generator_view(space, &y));
                match check_variational_symmetry(&y, ml.lagrangian()) {
                    Ok(Some(a)) => {
                        result.invariance_flux =
                            Some(render_all(space, &space.independent, &a.components))
                    }
                    Ok(None) => {
                        result.error =
                            Some("extended generator is not a variational symmetry".into());
                        status = status.max(Status::Error);
                    }
                    Err(e) => {
                        result.error = Some(e.to_string());
                        status = status.max(Status::Error);
                    }
                }
            }
            Err(e) => {
                status = status.max(noether_status(&e));
                result.error = Some(e.to_string());
            }
        }
        generators.push(result);
    }
    Ok((
        status,
        Body::Extend(ExtendReport {
            mode,
            balance_kind,
            generators,
        }),
    ))
}

/// Divide the law by the leading coefficient of its first nonzero
/// characteristic component.
pub fn normalize_law(cl: &ConservationLaw) -> (ConservationLaw, Option<Rational>) {
    let lead = cl
        .characteristic
        .iter()
        .find(|(_, q)| !q.is_zero())
        .and_then(|(_, q)| q.terms().next().map(|(_, c)| c.clone()));
    let Some(c) = lead.filter(|c| !c.is_one()) else {
        return (cl.clone(), None);
    };
    let inv = c.recip();
    let mut out = cl.clone();
    for (_, q) in &mut out.characteristic {
        *q = q.scale(&inv);
    }
    out.fluxes = cl.fluxes.map(|e| e.scale(&inv));
    out.residual = out.recompute_residual();
    (out, Some(c))
}

/// `D_t(P^t) + D_x(P^x) = Q.F` in problem-file syntax.
pub fn law_text(space: &Space, names: &[String], q: &[Expr], fluxes: &FluxTuple) -> String {
    let lhs: Vec<String> = fluxes
        .components
        .iter()
        .enumerate()
        .filter(|(_, e)| !e.is_zero())
        .map(|(i, e)| format!("D_{}({})", space.independent[i], space.render(e)))
        .collect();
    let rhs: Vec<String> = q
        .iter()
        .zip(names)
        .filter(|(e, _)| !e.is_zero())
        .map(|(e, n)| {
            if *e == Expr::one() {
                n.clone()
            } else if -e == Expr::one() {
                format!("-{n}")
            } else if e.len() == 1 {
                format!("{}*{n}", space.render(e))
            } else {
                format!("({})*{n}", space.render(e))
            }
        })
        .collect();
    let side = |v: Vec<String>| {
        if v.is_empty() {
            "0".to_string()
        } else {
            v.join(" + ")
        }
    };
    format!("{} = {}", side(lhs), side(rhs))
}

fn triviality_name(t: Triviality) -> &'static str {
    match t {
        Triviality::Nontrivial => "nontrivial",
        Triviality::TrivialKind1 => "trivial-kind-1",
        Triviality::TrivialKind2 => "trivial-kind-2",
    }
}

/// The same law with fluxes rebuilt from `Q.F` alone.
pub fn reduced(cl: &ConservationLaw) -> Result<ConservationLaw, NoetherError> {
    let rhs = divergence(&cl.fluxes) - &cl.residual;
    let mut out = cl.clone();
    out.fluxes = reconstruct_fluxes(&rhs, cl.fluxes.p())?;
    out.residual = out.recompute_residual();
    Ok(out)
}

fn conserve(problem: &Problem, opts: &Options) -> Outcome {
    let space = problem.space();
    let ml = pipeline_lagrangian(problem, opts)?;
    let (mode, balance_kind) = mode_label(problem, opts);
    let mut status = Status::Success;
    let mut laws = Vec::new();
    for g in selected(problem, &opts.generators)? {
        let mut report = LawReport {
            name: g.name.clone(),
            provenance: provenance_guess(g, opts.mode).into(),
            generator: None,
            characteristic: Vec::new(),
            fluxes: Vec::new(),
            scale: None,
            law: None,
            residual: None,
            triviality: None,
            error: None,
        };
        let law = extended(g, problem, &ml, opts).and_then(|(y, _)| {
            report.generator = Some(generator_view(space, &y));
            let law = noether_law(&y, &ml)?;
            let law = substitute_dummy(&law, &ml, opts.self_adjoint_mode())?;
            match opts.fluxes {
                FluxForm::Noether => Ok(law),
                FluxForm::Reduced => reduced(&law),
            }
        });
        match law {
            Err(e) => {
                status = status.max(noether_status(&e));
                report.error = Some(e.to_string());
            }
            Ok(law) => {
                let (law, scale) = normalize_law(&law);
                let q: Vec<Expr> = law.characteristic.iter().map(|(_, e)| e.clone()).collect();
                report.characteristic = render_all(space, &space.fields, &q);
                report.fluxes = render_all(space, &space.independent, &law.fluxes.components);
                report.scale = scale.as_ref().map(rational);
                report.law = Some(law_text(space, &problem.equation_names, &q, &law.fluxes));
                let residual = law.recompute_residual();
                if !residual.is_zero() {
                    status = Status::Error;
                }
                report.residual = Some(space.render(&residual));
                report.triviality = Some(triviality_name(law.triviality).into());
            }
        }
        laws.push(report);
    }
    let body = ConserveReport {
        mode,
        balance_kind,
        flux_form: opts.fluxes.name().into(),
        note: FLUX_BANNER,
        laws,
    };
    Ok((status, Body::Conserve(body)))
}

fn verify(problem: &Problem, opts: &Options) -> Outcome {
    let space = problem.space();
    let sys = &problem.system;
    let chosen: Vec<_> = if opts.laws.is_empty() {
        if problem.laws.is_empty() {
            return Err("the problem declares no laws".into());
        }
        problem.laws.iter().collect()
    } else {
        opts.laws
            .iter()
            .map(|n| problem.law(n).ok_or_else(|| format!("unknown law `{n}`")))
            .collect::<Result<_, _>>()?
    };
    let mut status = Status::Success;
    let mut laws = Vec::new();
    for l in chosen {
        let law = ConservationLaw {
            characteristic: l
                .characteristic
                .iter()
                .enumerate()
                .map(|(a, e)| (Field::original(a), e.clone()))
                .collect(),
            equations: sys.equations().to_vec(),
            fluxes: l.fluxes.clone(),
            residual: Expr::zero(),
            triviality: classify(&l.characteristic, &l.fluxes, Some(sys)),
        };
        let residual = law.recompute_residual();
        let verified = residual.is_zero();
        if !verified {
            status = status.max(Status::Negative);
        }
        let conserved = reduce_on_solutions(&divergence(&l.fluxes), sys)
            .ok()
            .map(|e| e.is_zero());
        laws.push(VerifyResult {
            name: l.name.clone(),
            characteristic: render_all(space, &space.fields, &l.characteristic),
            fluxes: render_all(space, &space.independent, &l.fluxes.components),
            law: law_text(space, &problem.equation_names, &l.characteristic, &l.fluxes),
            residual: space.render(&residual),
            verified,
            conserved_on_solutions: conserved,
            triviality: triviality_name(law.triviality).into(),
        });
    }
    Ok((status, Body::Verify(VerifyReport { laws })))
}

fn divtest(problem: &Problem, opts: &Options) -> Outcome {
    let space = problem.space();
    let src = opts
        .expr
        .as_deref()
        .ok_or("divtest needs an expression (--expr)")?;
    let e = problem
        .scope
        .parse(src)
        .map_err(|e| format!("in --expr: {e}"))?;
    let q = space.q();
    let mut fields: Vec<Field> = (0..q).map(Field::original).collect();
    if e.has_dummies() {
        fields.extend((0..q).map(Field::dummy));
    }
    let euler = fields
        .iter()
        .map(|f| {
            Named::new(
                space.field_name(f.kind, f.index),
                space.render(&euler_operator(&e, *f)),
            )
        })
        .collect();
    let mut report = DivtestReport {
        expr: space.render(&e),
        euler,
        divergence: is_total_divergence(&e),
        fluxes: None,
        residual: None,
        note: None,
    };
    if !report.divergence {
        return Ok((Status::Negative, Body::Divtest(report)));
    }
    let fluxes = reconstruct_fluxes(&e, space.p()).map_err(|err| err.to_string())?;
    let residual = divergence(&fluxes) - &e;
    report.fluxes = Some(render_all(space, &space.independent, &fluxes.components));
    report.residual = Some(space.render(&residual));
    report.note = Some(FLUX_BANNER);
    let status = if residual.is_zero() {
        Status::Success
    } else {
        Status::Error
    };
    Ok((status, Body::Divtest(report)))
}

pub fn error_for_io(cmd: CommandKind, path: &std::path::Path, e: &std::io::Error) -> Document {
    error_document(cmd, format!("cannot read {}: {e}", path.display()), None)
}
