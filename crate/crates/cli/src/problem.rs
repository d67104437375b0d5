//! Name resolution and lowering of a parsed problem file to kernel objects.

use std::collections::{BTreeMap, HashMap};

use jetnoether_core::expr::default_dummy_name;
use jetnoether_core::jet::{FluxTuple, Generator};
use jetnoether_core::lagrangian::{
    formal_lagrangian, generic_modified_lagrangian, with_balance, LagrangianError,
    ModifiedLagrangian,
};
use jetnoether_core::system::{DiffSystem, Parameter, SystemError};
use jetnoether_core::{Atom, Expr, ExprError, Field, FuncAtom, MultiIndex, Rational, Space};
use thiserror::Error;

use crate::syntax::{
    parse_expr, parse_problem, BalanceDecl, Ex, Ident, ParseError, ProblemFile, Span,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemanticKind {
    #[error("undeclared identifier `{0}`")]
    Undeclared(String),
    #[error("`{name}` is declared as {name}({}) but used with arguments ({})", declared.join(","), found.join(","))]
    Arity {
        name: String,
        declared: Vec<String>,
        found: Vec<String>,
    },
    #[error("duplicate equation for field `{0}`")]
    DuplicateEquation(String),
    #[error("`{0}` is declared more than once")]
    DuplicateDeclaration(String),
    #[error("`{0}` is assigned more than once in this block")]
    DuplicateEntry(String),
    #[error("{equations} equation(s) for {fields} dependent field(s); exactly one per field is required")]
    EquationCount { fields: usize, equations: usize },
    #[error("no {0} declared")]
    Missing(&'static str),
    #[error("`{0}` cannot carry a derivative subscript")]
    NotDifferentiable(String),
    #[error("subscript `{0}` is not a sequence of declared independent variables")]
    BadSubscript(String),
    #[error("`{func}` does not depend on `{var}`")]
    NotAnArgument { func: String, var: String },
    #[error("primes are only allowed on functions of one variable, `{0}` has several")]
    PrimesOnMultivariate(String),
    #[error("cannot divide by `{0}`: only numbers and parameters declared `!= 0` may divide")]
    BadDenominator(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("dummy field `{name}` is not allowed in {context}")]
    DummyNotAllowed { name: String, context: &'static str },
    #[error("`solve` must name a single derivative of a dependent field")]
    NotAJet,
    #[error("`{name}` is not {expected}")]
    BadTarget {
        name: String,
        expected: &'static str,
    },
    #[error("{0}")]
    System(SystemError),
    #[error("{0}")]
    Lagrangian(LagrangianError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{span}: {kind}")]
pub struct SemanticError {
    pub span: Span,
    pub kind: SemanticKind,
}

fn err<T>(span: Span, kind: SemanticKind) -> Result<T, SemanticError> {
    Err(SemanticError { span, kind })
}

/// Anything that can go wrong between source text and a lowered problem.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FrontendError {
    #[error("syntax error at {0}")]
    Parse(#[from] ParseError),
    #[error("{0}")]
    Semantic(#[from] SemanticError),
}

#[derive(Clone, Debug)]
enum Symbol {
    Indep(usize),
    Field(Field),
    Param,
    Func(Vec<usize>),
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Dummies {
    Allowed,
    Forbidden(&'static str),
}

/// Declared names and how to turn written expressions into kernel ones.
#[derive(Clone, Debug)]
pub struct Scope {
    space: Space,
    symbols: HashMap<String, Symbol>,
    nonzero: Vec<String>,
}

impl Scope {
    fn from_file(f: &ProblemFile) -> Result<(Self, Vec<Parameter>), SemanticError> {
        let mut symbols = HashMap::new();
        let mut declare = |id: &Ident, s: Symbol| {
            if symbols.insert(id.name.clone(), s).is_some() {
                return err(id.span, SemanticKind::DuplicateDeclaration(id.name.clone()));
            }
            Ok(())
        };
        for (i, x) in f.independent.iter().enumerate() {
            declare(x, Symbol::Indep(i))?;
        }
        let mut dummies = Vec::new();
        for (a, d) in f.dependent.iter().enumerate() {
            declare(&d.name, Symbol::Field(Field::original(a)))?;
            let dummy = match &d.dummy {
                Some(v) => v.clone(),
                None => Ident {
                    name: default_dummy_name(&d.name.name),
                    span: d.name.span,
                },
            };
            declare(&dummy, Symbol::Field(Field::dummy(a)))?;
            dummies.push(dummy.name);
        }
        let mut params = Vec::new();
        let mut nonzero = Vec::new();
        for p in &f.parameters {
            declare(&p.name, Symbol::Param)?;
            params.push(Parameter::new(&p.name.name, p.nonzero));
            if p.nonzero {
                nonzero.push(p.name.name.clone());
            }
        }
        let indep: Vec<String> = f.independent.iter().map(|x| x.name.clone()).collect();
        for g in &f.functions {
            let mut args = Vec::new();
            for a in &g.args {
                let Some(i) = indep.iter().position(|x| *x == a.name) else {
                    return err(a.span, SemanticKind::Undeclared(a.name.clone()));
                };
                if args.contains(&i) {
                    return err(a.span, SemanticKind::DuplicateDeclaration(a.name.clone()));
                }
                args.push(i);
            }
            declare(&g.name, Symbol::Func(args))?;
        }
        let fields = f.dependent.iter().map(|d| d.name.name.clone()).collect();
        let space = Space::new(indep, fields, dummies);
        Ok((
            Scope {
                space,
                symbols,
                nonzero,
            },
            params,
        ))
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    /// Lower an expression that may mention dummies (generator entries,
    /// expressions handed to `divtest`).
    pub fn lower(&self, e: &Ex) -> Result<Expr, SemanticError> {
        self.lower_in(e, Dummies::Allowed)
    }

    /// Lower an expression over the original fields only.
    pub fn lower_original(&self, e: &Ex, context: &'static str) -> Result<Expr, SemanticError> {
        self.lower_in(e, Dummies::Forbidden(context))
    }

    /// Parse and lower in one step.
    pub fn parse(&self, src: &str) -> Result<Expr, FrontendError> {
        Ok(self.lower(&parse_expr(src)?)?)
    }

    fn split_subscript(&self, item: &str, span: Span) -> Result<Vec<usize>, SemanticError> {
        let mut rest = item;
        let mut out = Vec::new();
        while !rest.is_empty() {
            let best = self
                .space
                .independent
                .iter()
                .enumerate()
                .filter(|(_, n)| rest.starts_with(n.as_str()))
                .max_by_key(|(_, n)| n.len());
            let Some((i, n)) = best else {
                return err(span, SemanticKind::BadSubscript(item.to_string()));
            };
            out.push(i);
            rest = &rest[n.len()..];
        }
        Ok(out)
    }

    fn variables(
        &self,
        sub: &Option<Vec<String>>,
        span: Span,
    ) -> Result<Vec<usize>, SemanticError> {
        let mut out = Vec::new();
        for item in sub.iter().flatten() {
            out.extend(self.split_subscript(item, span)?);
        }
        Ok(out)
    }

    fn lower_in(&self, e: &Ex, dummies: Dummies) -> Result<Expr, SemanticError> {
        let go = |x: &Ex| self.lower_in(x, dummies);
        Ok(match e {
            Ex::Int(n, _) => Expr::constant(n.parse::<Rational>().expect("lexer yields digits")),
            Ex::Var { name, sub, span } => {
                let Some(sym) = self.symbols.get(name) else {
                    return err(*span, SemanticKind::Undeclared(name.clone()));
                };
                if sub.is_some() && !matches!(sym, Symbol::Field(_)) {
                    return err(*span, SemanticKind::NotDifferentiable(name.clone()));
                }
                match sym {
                    Symbol::Indep(i) => Expr::atom(Atom::Indep(*i)),
                    Symbol::Param => Expr::atom(Atom::param(name.as_str())),
                    Symbol::Func(args) => {
                        return err(
                            *span,
                            SemanticKind::Arity {
                                name: name.clone(),
                                declared: self.arg_names(args),
                                found: Vec::new(),
                            },
                        )
                    }
                    Symbol::Field(f) => {
                        if let (true, Dummies::Forbidden(context)) = (f.is_dummy(), dummies) {
                            return err(
                                *span,
                                SemanticKind::DummyNotAllowed {
                                    name: name.clone(),
                                    context,
                                },
                            );
                        }
                        let mut j = MultiIndex::zero(self.space.p());
                        for i in self.variables(sub, *span)? {
                            j = j.incremented(i);
                        }
                        Expr::atom(Atom::jet(*f, j))
                    }
                }
            }
            Ex::Call {
                name,
                primes,
                sub,
                args,
                span,
            } => {
                let declared = match self.symbols.get(name) {
                    Some(Symbol::Func(d)) => d,
                    Some(_) => {
                        return err(
                            *span,
                            SemanticKind::Arity {
                                name: name.clone(),
                                declared: Vec::new(),
                                found: args.iter().map(|a| a.name.clone()).collect(),
                            },
                        )
                    }
                    None => return err(*span, SemanticKind::Undeclared(name.clone())),
                };
                let found: Vec<String> = args.iter().map(|a| a.name.clone()).collect();
                if found != self.arg_names(declared) {
                    return err(
                        *span,
                        SemanticKind::Arity {
                            name: name.clone(),
                            declared: self.arg_names(declared),
                            found,
                        },
                    );
                }
                if *primes > 0 && declared.len() != 1 {
                    return err(*span, SemanticKind::PrimesOnMultivariate(name.clone()));
                }
                let mut order = vec![0u32; declared.len()];
                if *primes > 0 {
                    order[0] = *primes;
                }
                for i in self.variables(sub, *span)? {
                    let Some(slot) = declared.iter().position(|&a| a == i) else {
                        return err(
                            *span,
                            SemanticKind::NotAnArgument {
                                func: name.clone(),
                                var: self.space.independent[i].clone(),
                            },
                        );
                    };
                    order[slot] += 1;
                }
                let mut fa = FuncAtom::new(name.as_str(), declared);
                fa.order = MultiIndex::from_slice(&order);
                Expr::atom(Atom::Func(fa))
            }
            Ex::Neg(a, _) => -go(a)?,
            Ex::Add(a, b, _) => go(a)? + go(b)?,
            Ex::Sub(a, b, _) => go(a)? - go(b)?,
            Ex::Mul(a, b, _) => go(a)? * go(b)?,
            Ex::Div(a, b, span) => {
                let num = go(a)?;
                let den = go(b)?;
                if den.is_zero() {
                    return err(*span, SemanticKind::DivisionByZero);
                }
                let ok = den.as_constant().is_some()
                    || den.as_param_monomial().is_some_and(|(m, _)| {
                        m.factors().iter().all(|(a, _)| match a {
                            Atom::Param(n) => self.nonzero.iter().any(|z| **z == **n),
                            _ => false,
                        })
                    });
                if !ok {
                    return err(*span, SemanticKind::BadDenominator(self.space.render(&den)));
                }
                match num.checked_div(&den) {
                    Ok(q) => q,
                    Err(ExprError::DivisionByZero) => {
                        return err(*span, SemanticKind::DivisionByZero)
                    }
                    Err(_) => {
                        return err(*span, SemanticKind::BadDenominator(self.space.render(&den)))
                    }
                }
            }
            Ex::Pow(a, n, _) => go(a)?.pow(*n),
        })
    }

    fn arg_names(&self, args: &[usize]) -> Vec<String> {
        args.iter()
            .map(|&i| self.space.independent[i].clone())
            .collect()
    }

    fn field(&self, id: &Ident) -> Option<Field> {
        match self.symbols.get(&id.name) {
            Some(Symbol::Field(f)) => Some(*f),
            _ => None,
        }
    }

    fn indep(&self, id: &Ident) -> Option<usize> {
        match self.symbols.get(&id.name) {
            Some(Symbol::Indep(i)) => Some(*i),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Balance {
    Generic,
    Formal,
    Custom(Expr),
}

#[derive(Clone, Debug)]
pub struct NamedGenerator {
    pub name: String,
    pub generator: Generator,
    /// The file gave dummy coefficients explicitly; the generator is used
    /// as written instead of being extended.
    pub explicit_phi_star: bool,
}

#[derive(Clone, Debug)]
pub struct UserLaw {
    pub name: String,
    pub characteristic: Vec<Expr>,
    pub fluxes: FluxTuple,
}

/// A fully resolved problem.
#[derive(Clone, Debug)]
pub struct Problem {
    pub file: ProblemFile,
    pub scope: Scope,
    pub system: DiffSystem,
    pub equation_names: Vec<String>,
    pub balance: Balance,
    pub substitution: BTreeMap<Atom, Expr>,
    pub generators: Vec<NamedGenerator>,
    pub laws: Vec<UserLaw>,
}

fn unique<'a>(ids: impl IntoIterator<Item = &'a Ident>) -> Result<(), SemanticError> {
    let mut seen: Vec<&str> = Vec::new();
    for id in ids {
        if seen.contains(&id.name.as_str()) {
            return err(id.span, SemanticKind::DuplicateEntry(id.name.clone()));
        }
        seen.push(&id.name);
    }
    Ok(())
}

impl Problem {
    pub fn parse(src: &str) -> Result<Problem, FrontendError> {
        Ok(Problem::lower(parse_problem(src)?)?)
    }

    pub fn lower(file: ProblemFile) -> Result<Problem, SemanticError> {
        let start = Span { line: 1, col: 1 };
        if file.independent.is_empty() {
            return err(start, SemanticKind::Missing("independent variables"));
        }
        if file.dependent.is_empty() {
            return err(start, SemanticKind::Missing("dependent fields"));
        }
        let (scope, params) = Scope::from_file(&file)?;
        let q = file.dependent.len();

        let mut slots: Vec<Option<usize>> = vec![None; q];
        for (k, eq) in file.equations.iter().enumerate() {
            let Some(field) = &eq.field else { continue };
            match scope.field(field) {
                Some(f) if !f.is_dummy() => {
                    if slots[f.index].is_some() {
                        return err(
                            field.span,
                            SemanticKind::DuplicateEquation(field.name.clone()),
                        );
                    }
                    slots[f.index] = Some(k);
                }
                _ => {
                    return err(
                        field.span,
                        SemanticKind::BadTarget {
                            name: field.name.clone(),
                            expected: "a dependent field",
                        },
                    )
                }
            }
        }
        unique(file.equations.iter().map(|e| &e.name))?;
        for (k, eq) in file.equations.iter().enumerate() {
            if eq.field.is_some() {
                continue;
            }
            match slots.iter().position(Option::is_none) {
                Some(a) => slots[a] = Some(k),
                None => {
                    return err(
                        eq.name.span,
                        SemanticKind::EquationCount {
                            fields: q,
                            equations: file.equations.len(),
                        },
                    )
                }
            }
        }
        let order: Vec<usize> = match slots.iter().copied().collect::<Option<Vec<_>>>() {
            Some(o) => o,
            None => {
                let span = file.equations.last().map_or(start, |e| e.name.span);
                return err(
                    span,
                    SemanticKind::EquationCount {
                        fields: q,
                        equations: file.equations.len(),
                    },
                );
            }
        };

        let mut equations = Vec::with_capacity(q);
        let mut leading = Vec::with_capacity(q);
        let mut names = Vec::with_capacity(q);
        for &k in &order {
            let eq = &file.equations[k];
            equations.push(scope.lower_original(&eq.expr, "an equation")?);
            names.push(eq.name.name.clone());
            leading.push(match &eq.solve {
                None => None,
                Some(lead) => {
                    let e = scope.lower_original(lead, "a solve annotation")?;
                    let atom = e.jet_atoms().into_iter().next();
                    match atom {
                        Some(a) if e == Expr::atom(a.clone()) => Some(a),
                        _ => return err(lead.span(), SemanticKind::NotAJet),
                    }
                }
            });
        }
        let system =
            DiffSystem::new(scope.space.clone(), params, equations, leading).map_err(|e| {
                let span = match &e {
                    SystemError::NoSolvedForm { equation, .. } => {
                        file.equations[order[*equation]].name.span
                    }
                    SystemError::LeadingConflict { second, .. } => {
                        file.equations[order[*second]].name.span
                    }
                    _ => file.equations.first().map_or(start, |e| e.name.span),
                };
                SemanticError {
                    span,
                    kind: SemanticKind::System(e),
                }
            })?;

        let balance = match &file.balance {
            None | Some(BalanceDecl::Generic(_)) => Balance::Generic,
            Some(BalanceDecl::Formal(_)) => Balance::Formal,
            Some(BalanceDecl::Expr(e)) => Balance::Custom(scope.lower_original(e, "the balance")?),
        };

        unique(file.substitutions.iter().map(|a| &a.target))?;
        let mut substitution = BTreeMap::new();
        for a in &file.substitutions {
            let Some(f) = scope.field(&a.target).filter(|f| f.is_dummy()) else {
                return err(
                    a.target.span,
                    SemanticKind::BadTarget {
                        name: a.target.name.clone(),
                        expected: "a dummy field",
                    },
                );
            };
            let value = scope.lower_original(&a.expr, "a substitution")?;
            substitution.insert(Atom::base(f, scope.space.p()), value);
        }

        let p = scope.space.p();
        unique(file.generators.iter().map(|g| &g.name))?;
        let mut generators = Vec::new();
        for g in &file.generators {
            unique(g.entries.iter().map(|a| &a.target))?;
            let mut xi = vec![Expr::zero(); p];
            let mut phi = vec![Expr::zero(); q];
            let mut phi_star = vec![Expr::zero(); q];
            let mut explicit = false;
            for a in &g.entries {
                let value = scope.lower(&a.expr)?;
                if let Some(i) = scope.indep(&a.target) {
                    xi[i] = value;
                } else if let Some(f) = scope.field(&a.target) {
                    if f.is_dummy() {
                        explicit = true;
                        phi_star[f.index] = value;
                    } else {
                        phi[f.index] = value;
                    }
                } else {
                    return err(
                        a.target.span,
                        SemanticKind::BadTarget {
                            name: a.target.name.clone(),
                            expected: "an independent variable or a field",
                        },
                    );
                }
            }
            let mut generator = Generator::new(xi, phi);
            if explicit {
                generator = generator.with_phi_star(phi_star);
            }
            generators.push(NamedGenerator {
                name: g.name.name.clone(),
                generator,
                explicit_phi_star: explicit,
            });
        }

        unique(file.laws.iter().map(|l| &l.name))?;
        let mut laws = Vec::new();
        for l in &file.laws {
            unique(l.characteristic.iter().map(|a| &a.target))?;
            unique(l.fluxes.iter().map(|a| &a.target))?;
            let mut characteristic = vec![Expr::zero(); q];
            for a in &l.characteristic {
                let Some(f) = scope.field(&a.target).filter(|f| !f.is_dummy()) else {
                    return err(
                        a.target.span,
                        SemanticKind::BadTarget {
                            name: a.target.name.clone(),
                            expected: "a dependent field",
                        },
                    );
                };
                characteristic[f.index] = scope.lower_original(&a.expr, "a law")?;
            }
            let mut fluxes = vec![Expr::zero(); p];
            for a in &l.fluxes {
                let Some(i) = scope.indep(&a.target) else {
                    return err(
                        a.target.span,
                        SemanticKind::BadTarget {
                            name: a.target.name.clone(),
                            expected: "an independent variable",
                        },
                    );
                };
                fluxes[i] = scope.lower_original(&a.expr, "a law")?;
            }
            laws.push(UserLaw {
                name: l.name.name.clone(),
                characteristic,
                fluxes: FluxTuple::new(fluxes),
            });
        }

        Ok(Problem {
            file,
            scope,
            system,
            equation_names: names,
            balance,
            substitution,
            generators,
            laws,
        })
    }

    pub fn space(&self) -> &Space {
        self.scope.space()
    }

    /// The modified Lagrangian selected by the balance section, carrying
    /// the file's substitution.
    pub fn modified_lagrangian(&self) -> Result<ModifiedLagrangian, LagrangianError> {
        let ml = match &self.balance {
            Balance::Generic => generic_modified_lagrangian(&self.system),
            Balance::Formal => formal_lagrangian(&self.system),
            Balance::Custom(l0) => with_balance(&self.system, l0.clone())?,
        };
        ml.with_substitution(self.substitution.clone())
    }

    pub fn generator(&self, name: &str) -> Option<&NamedGenerator> {
        self.generators.iter().find(|g| g.name == name)
    }

    pub fn law(&self, name: &str) -> Option<&UserLaw> {
        self.laws.iter().find(|l| l.name == name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BURGERS: &str = "jetnoether v1
        independent: t, x
        dependent: u
        parameters: a != 0, b
        functions: g(t), h(t, x)
        system { F = u_t + u*u_x - a*u_{xx} }";

    fn kind(src: &str) -> SemanticKind {
        match Problem::parse(src) {
            Err(FrontendError::Semantic(e)) => e.kind,
            other => panic!("expected a semantic error, got {other:?}"),
        }
    }

    fn with_system(eqs: &str) -> String {
        format!(
            "jetnoether v1 independent: t, x dependent: u parameters: a != 0, b \
             functions: g(t), h(t, x) system {{ {eqs} }}"
        )
    }

    #[test]
    fn burgers_lowers() {
        let p = Problem::parse(BURGERS).unwrap();
        let e = p.scope.parse("u_t + u*u_x - a*u_xx").unwrap();
        assert_eq!(p.system.equations()[0], e);
        assert_eq!(p.balance, Balance::Generic);
        assert_eq!(p.space().dummies, vec!["v".to_string()]);
    }

    #[test]
    fn subscripts_normalize_to_declared_order() {
        let p = Problem::parse(BURGERS).unwrap();
        let s = &p.scope;
        assert_eq!(s.parse("u_{xt}").unwrap(), s.parse("u_{tx}").unwrap());
        assert_eq!(s.parse("u_{x,t}").unwrap(), s.parse("u_tx").unwrap());
        assert_eq!(
            s.parse("h_{xt}(t,x)").unwrap(),
            s.parse("h_{tx}(t,x)").unwrap()
        );
        assert_eq!(s.parse("g''(t)").unwrap(), s.parse("g_{tt}(t)").unwrap());
    }

    #[test]
    fn longest_match_splits_subscripts() {
        let src = "jetnoether v1 independent: t, x1, x2 dependent: u \
                   system { F = u_t - u_{x1x1} - u_{x2x2} }";
        let p = Problem::parse(src).unwrap();
        assert_eq!(
            p.scope.parse("u_{x1x2}").unwrap(),
            p.scope.parse("u_{x2,x1}").unwrap()
        );
        assert!(matches!(
            p.scope.parse("u_{x3}"),
            Err(FrontendError::Semantic(SemanticError {
                kind: SemanticKind::BadSubscript(_),
                ..
            }))
        ));
    }

    #[test]
    fn semantic_errors() {
        assert_eq!(
            kind(&with_system("F = u_t + w")),
            SemanticKind::Undeclared("w".into())
        );
        assert!(matches!(
            kind(&with_system("F = u_t + g(x)")),
            SemanticKind::Arity { .. }
        ));
        assert!(matches!(
            kind(&with_system("F = u_t + h(t)")),
            SemanticKind::Arity { .. }
        ));
        assert!(matches!(
            kind(&with_system("F = u_t + g")),
            SemanticKind::Arity { .. }
        ));
        assert!(matches!(
            kind(&with_system("F = u_t + h'(t,x)")),
            SemanticKind::PrimesOnMultivariate(_)
        ));
        assert!(matches!(
            kind(&with_system("F = u_t + g_x(t)")),
            SemanticKind::NotAnArgument { .. }
        ));
        assert_eq!(
            kind(&with_system("F = u_t + a_x")),
            SemanticKind::NotDifferentiable("a".into())
        );
        assert!(matches!(
            kind(&with_system("F = u_t + u/b")),
            SemanticKind::BadDenominator(_)
        ));
        assert!(matches!(
            kind(&with_system("F = u_t + u/u_x")),
            SemanticKind::BadDenominator(_)
        ));
        assert_eq!(
            kind(&with_system("F = u_t + u/0")),
            SemanticKind::DivisionByZero
        );
        assert!(matches!(
            kind(&with_system("F = u_t + v")),
            SemanticKind::DummyNotAllowed { .. }
        ));
        assert!(matches!(
            kind(&with_system("F = u_t; G = u_x")),
            SemanticKind::EquationCount {
                fields: 1,
                equations: 2
            }
        ));
        assert!(matches!(
            kind(&with_system("")),
            SemanticKind::EquationCount { equations: 0, .. }
        ));
        assert_eq!(
            kind(&with_system("F for u = u_t; G for u = u_x")),
            SemanticKind::DuplicateEquation("u".into())
        );
        assert!(matches!(
            kind(&with_system("F = u_t solve u^2")),
            SemanticKind::NotAJet
        ));
    }

    #[test]
    fn error_positions() {
        let src = "jetnoether v1\nindependent: t, x\ndependent: u\nsystem {\n  F = u_t + k*u_x\n}";
        match Problem::parse(src) {
            Err(FrontendError::Semantic(e)) => {
                assert_eq!((e.span.line, e.span.col), (5, 13));
                assert_eq!(e.to_string(), "5:13: undeclared identifier `k`");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn duplicate_names() {
        let src = "jetnoether v1 independent: t, x dependent: u, x system { F = u_t }";
        assert_eq!(kind(src), SemanticKind::DuplicateDeclaration("x".into()));
        let src = "jetnoether v1 independent: t, x dependent: u -> t system { F = u_t }";
        assert_eq!(kind(src), SemanticKind::DuplicateDeclaration("t".into()));
    }

    #[test]
    fn equations_pair_with_named_fields() {
        let src = "jetnoether v1 independent: t, x dependent: u, w \
                   system { B for w = w_t - u_x; A = u_t - w_x }";
        let p = Problem::parse(src).unwrap();
        assert_eq!(p.equation_names, vec!["A".to_string(), "B".to_string()]);
        assert_eq!(p.system.equations()[1], p.scope.parse("w_t - u_x").unwrap());
        assert_eq!(p.space().dummies, vec!["v".to_string(), "vw".to_string()]);
    }

    #[test]
    fn generators_and_laws() {
        let src = format!(
            "{BURGERS} substitute {{ v = u }} generator X3 {{ x: t; u: 1 }} \
             generator Y {{ v: 1 }} law mass {{ char u: 1; flux t: u; flux x: u^2/2 - a*u_x }}"
        );
        let p = Problem::parse(&src).unwrap();
        let x3 = p.generator("X3").unwrap();
        assert!(!x3.explicit_phi_star);
        assert_eq!(x3.generator.xi[1], p.scope.parse("t").unwrap());
        assert!(p.generator("Y").unwrap().explicit_phi_star);
        let law = p.law("mass").unwrap();
        assert_eq!(
            law.fluxes.components[1],
            p.scope.parse("u^2/2 - a*u_x").unwrap()
        );
        assert!(p.modified_lagrangian().is_ok());
    }
}
