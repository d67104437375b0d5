//! Report documents shared by the text and JSON outputs. Every expression
//! is a string in the problem-file expression grammar.

use std::fmt::Write;

use serde::Serialize;

pub const FLUX_BANNER: &str = "fluxes unique up to divergence-free tuples";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Success,
    Negative,
    Error,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Success => 0,
            Status::Negative => 1,
            Status::Error => 2,
        }
    }
}

/// `name = expr` pair: a field, variable or equation and its expression.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Named {
    pub name: String,
    pub expr: String,
}

impl Named {
    pub fn new(name: impl Into<String>, expr: impl Into<String>) -> Self {
        Named {
            name: name.into(),
            expr: expr.into(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Document {
    pub format: &'static str,
    pub command: String,
    pub status: Status,
    pub exit_code: i32,
    #[serde(flatten)]
    pub body: Body,
}

#[derive(Clone, Debug, Serialize)]
#[serde(untagged)]
pub enum Body {
    Adjoint(AdjointReport),
    CheckSym(CheckSymReport),
    Extend(ExtendReport),
    Conserve(ConserveReport),
    Verify(VerifyReport),
    Divtest(DivtestReport),
    Error(ErrorReport),
}

#[derive(Clone, Debug, Serialize)]
pub struct ErrorReport {
    pub error: String,
    pub line: Option<u32>,
    pub column: Option<u32>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AdjointComponent {
    pub equation: String,
    /// Adjoint equation after the dummy substitution.
    pub substituted: String,
    pub status: String,
    pub coefficients: Option<Vec<String>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AdjointReport {
    pub balance_kind: String,
    pub balance: String,
    pub lagrangian: String,
    pub adjoint: Vec<Named>,
    pub substitution: Vec<Named>,
    pub mode: String,
    pub components: Vec<AdjointComponent>,
    pub verdict: String,
    pub matrix: Option<Vec<Vec<String>>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct KBlock {
    /// `I` for the zeroth-order block, otherwise `D_<subscript>`.
    pub operator: String,
    pub matrix: Vec<Vec<String>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SymmetryResult {
    pub name: String,
    pub prolongation: Vec<Named>,
    pub on_solutions: Vec<Named>,
    pub symmetry: bool,
    pub k: Option<Vec<KBlock>>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckSymReport {
    pub generators: Vec<SymmetryResult>,
}

#[derive(Clone, Debug, Serialize)]
pub struct GeneratorView {
    pub xi: Vec<Named>,
    pub phi: Vec<Named>,
    pub phi_star: Vec<Named>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExtensionResult {
    pub name: String,
    pub provenance: String,
    pub generator: Option<GeneratorView>,
    /// `A` with `pr Y(L) + L Div xi = Div A`.
    pub invariance_flux: Option<Vec<Named>>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExtendReport {
    pub mode: String,
    pub balance_kind: String,
    pub generators: Vec<ExtensionResult>,
}

#[derive(Clone, Debug, Serialize)]
pub struct LawReport {
    pub name: String,
    pub provenance: String,
    pub generator: Option<GeneratorView>,
    pub characteristic: Vec<Named>,
    pub fluxes: Vec<Named>,
    /// Constant the Noether law was divided by before reporting.
    pub scale: Option<String>,
    pub law: Option<String>,
    pub residual: Option<String>,
    pub triviality: Option<String>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConserveReport {
    pub mode: String,
    pub balance_kind: String,
    pub flux_form: String,
    pub note: &'static str,
    pub laws: Vec<LawReport>,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyResult {
    pub name: String,
    pub characteristic: Vec<Named>,
    pub fluxes: Vec<Named>,
    pub law: String,
    /// `Div P - Q.F`, rendered.
    pub residual: String,
    pub verified: bool,
    pub conserved_on_solutions: Option<bool>,
    pub triviality: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub laws: Vec<VerifyResult>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DivtestReport {
    pub expr: String,
    pub euler: Vec<Named>,
    pub divergence: bool,
    pub fluxes: Option<Vec<Named>>,
    pub residual: Option<String>,
    pub note: Option<&'static str>,
}

fn named_lines(out: &mut String, indent: &str, items: &[Named], sep: &str) {
    for n in items {
        writeln!(out, "{indent}{}{sep}{}", n.name, n.expr).unwrap();
    }
}

fn generator_lines(out: &mut String, g: &GeneratorView) {
    let mut parts = Vec::new();
    for n in g.xi.iter().chain(&g.phi).chain(&g.phi_star) {
        if n.expr != "0" {
            parts.push(format!("{}: {}", n.name, n.expr));
        }
    }
    if parts.is_empty() {
        parts.push("0".into());
    }
    writeln!(out, "  generator {{ {} }}", parts.join("; ")).unwrap();
}

impl Document {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        match &self.body {
            Body::Error(e) => {
                writeln!(out, "error: {}", e.error).unwrap();
            }
            Body::Adjoint(r) => {
                writeln!(out, "balance ({}): {}", r.balance_kind, r.balance).unwrap();
                writeln!(out, "modified Lagrangian: {}", r.lagrangian).unwrap();
                out.push_str("modified adjoint equations:\n");
                for n in &r.adjoint {
                    writeln!(out, "  E_{}(L) = {}", n.name, n.expr).unwrap();
                }
                let subs: Vec<String> = r
                    .substitution
                    .iter()
                    .map(|n| format!("{} = {}", n.name, n.expr))
                    .collect();
                writeln!(out, "after {}:", subs.join(", ")).unwrap();
                for c in &r.components {
                    writeln!(out, "  {}: {}  [{}]", c.equation, c.substituted, c.status).unwrap();
                }
                write!(out, "verdict ({}): {}", r.mode, r.verdict).unwrap();
                if let (Some(m), "quasi-self-adjoint") = (&r.matrix, r.verdict.as_str()) {
                    let rows: Vec<String> = m
                        .iter()
                        .map(|row| format!("[{}]", row.join(", ")))
                        .collect();
                    write!(out, ", r = M F with M = [{}]", rows.join(", ")).unwrap();
                }
                out.push('\n');
            }
            Body::CheckSym(r) => {
                for g in &r.generators {
                    let verdict = if g.symmetry {
                        "symmetry"
                    } else {
                        "not a symmetry"
                    };
                    writeln!(out, "{}: {verdict}", g.name).unwrap();
                    if let Some(e) = &g.error {
                        writeln!(out, "  error: {e}").unwrap();
                    }
                    for (pr, red) in g.prolongation.iter().zip(&g.on_solutions) {
                        writeln!(out, "  pr X({}) = {}", pr.name, pr.expr).unwrap();
                        writeln!(out, "    on solutions: {}", red.expr).unwrap();
                    }
                    if g.k.as_ref().is_some_and(|k| k.is_empty()) {
                        out.push_str("  K = 0\n");
                    }
                    for k in g.k.iter().flatten() {
                        let rows: Vec<String> = k
                            .matrix
                            .iter()
                            .map(|row| format!("[{}]", row.join(", ")))
                            .collect();
                        writeln!(out, "  K[{}] = [{}]", k.operator, rows.join(", ")).unwrap();
                    }
                }
            }
            Body::Extend(r) => {
                writeln!(out, "mode: {}, balance: {}", r.mode, r.balance_kind).unwrap();
                for g in &r.generators {
                    writeln!(out, "{} ({}):", g.name, g.provenance).unwrap();
                    if let Some(e) = &g.error {
                        writeln!(out, "  error: {e}").unwrap();
                    }
                    if let Some(v) = &g.generator {
                        named_lines(&mut out, "  phi_* ", &v.phi_star, " = ");
                        generator_lines(&mut out, v);
                    }
                    if let Some(a) = &g.invariance_flux {
                        let comps: Vec<String> = a
                            .iter()
                            .map(|n| format!("{}: {}", n.name, n.expr))
                            .collect();
                        writeln!(out, "  invariant, A = ({})", comps.join(", ")).unwrap();
                    }
                }
            }
            Body::Conserve(r) => {
                writeln!(
                    out,
                    "mode: {}, balance: {}, fluxes: {}",
                    r.mode, r.balance_kind, r.flux_form
                )
                .unwrap();
                writeln!(out, "note: {}", r.note).unwrap();
                for l in &r.laws {
                    writeln!(out, "{} ({}):", l.name, l.provenance).unwrap();
                    if let Some(e) = &l.error {
                        writeln!(out, "  error: {e}").unwrap();
                        continue;
                    }
                    if let Some(v) = &l.generator {
                        generator_lines(&mut out, v);
                    }
                    named_lines(&mut out, "  Q_", &l.characteristic, " = ");
                    named_lines(&mut out, "  P^", &l.fluxes, " = ");
                    if let Some(law) = &l.law {
                        writeln!(out, "  law: {law}").unwrap();
                    }
                    if let Some(s) = &l.scale {
                        writeln!(out, "  scaled by 1/({s})").unwrap();
                    }
                    if let Some(res) = &l.residual {
                        writeln!(out, "  residual: {res}").unwrap();
                    }
                    if let Some(t) = &l.triviality {
                        writeln!(out, "  tag: {t}").unwrap();
                    }
                }
            }
            Body::Verify(r) => {
                for l in &r.laws {
                    let verdict = if l.verified {
                        "verified"
                    } else {
                        "not verified"
                    };
                    writeln!(out, "{}: {verdict}", l.name).unwrap();
                    writeln!(out, "  law: {}", l.law).unwrap();
                    writeln!(out, "  residual: {}", l.residual).unwrap();
                    if let Some(c) = l.conserved_on_solutions {
                        writeln!(out, "  Div P vanishes on solutions: {c}").unwrap();
                    }
                    writeln!(out, "  tag: {}", l.triviality).unwrap();
                }
            }
            Body::Divtest(r) => {
                writeln!(out, "expression: {}", r.expr).unwrap();
                named_lines(&mut out, "  E_", &r.euler, "(e) = ");
                if r.divergence {
                    out.push_str("total divergence\n");
                    if let Some(note) = r.note {
                        writeln!(out, "note: {note}").unwrap();
                    }
                    named_lines(
                        &mut out,
                        "  P^",
                        r.fluxes.as_deref().unwrap_or_default(),
                        " = ",
                    );
                    if let Some(res) = &r.residual {
                        writeln!(out, "  residual: {res}").unwrap();
                    }
                } else {
                    out.push_str("not a total divergence\n");
                }
            }
        }
        out
    }
}
