use std::fmt::{self, Write};

use num_traits::{One, Signed};

use super::atom::{Atom, FieldKind, MultiIndex};
use super::poly::Expr;

/// Names for the independent variables, the dependent fields and their
/// paired dummies. Parameters and parameter-functions carry their own names.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Space {
    pub independent: Vec<String>,
    pub fields: Vec<String>,
    pub dummies: Vec<String>,
}

impl Space {
    pub fn new(independent: Vec<String>, fields: Vec<String>, dummies: Vec<String>) -> Self {
        assert_eq!(fields.len(), dummies.len(), "one dummy per field");
        Space {
            independent,
            fields,
            dummies,
        }
    }

    /// Dummy names derived from field names: a leading `u` becomes `v`,
    /// otherwise `v` is prefixed.
    pub fn with_default_dummies(independent: Vec<String>, fields: Vec<String>) -> Self {
        let dummies = fields.iter().map(|f| default_dummy_name(f)).collect();
        Space::new(independent, fields, dummies)
    }

    /// Generic names `x1.., u1.., v1..`.
    pub fn generic(p: usize, q: usize) -> Self {
        Space::new(
            (1..=p).map(|i| format!("x{i}")).collect(),
            (1..=q).map(|i| format!("u{i}")).collect(),
            (1..=q).map(|i| format!("v{i}")).collect(),
        )
    }

    pub fn p(&self) -> usize {
        self.independent.len()
    }

    pub fn q(&self) -> usize {
        self.fields.len()
    }

    pub fn field_name(&self, kind: FieldKind, index: usize) -> &str {
        match kind {
            FieldKind::Original => &self.fields[index],
            FieldKind::Dummy => &self.dummies[index],
        }
    }

    fn single_char_vars(&self) -> bool {
        self.independent.iter().all(|n| n.chars().count() == 1)
    }

    /// Subscript text for a multi-index, in declared variable order.
    pub fn subscript(&self, j: &MultiIndex) -> String {
        let names: Vec<&str> = j
            .entries()
            .iter()
            .enumerate()
            .flat_map(|(i, &k)| std::iter::repeat_n(self.independent[i].as_str(), k as usize))
            .collect();
        if names.len() == 1 {
            return names[0].to_string();
        }
        if self.single_char_vars() {
            format!("{{{}}}", names.concat())
        } else {
            format!("{{{}}}", names.join(","))
        }
    }

    pub fn render_atom(&self, a: &Atom) -> String {
        match a {
            Atom::Indep(i) => self.independent[*i].clone(),
            Atom::Jet(f, j) => {
                let name = self.field_name(f.kind, f.index);
                if j.is_zero() {
                    name.to_string()
                } else {
                    format!("{name}_{}", self.subscript(j))
                }
            }
            Atom::Param(n) => n.to_string(),
            Atom::Func(fa) => {
                let args: Vec<&str> = fa
                    .args
                    .iter()
                    .map(|&i| self.independent[i].as_str())
                    .collect();
                let args = args.join(",");
                if fa.order.is_zero() {
                    format!("{}({args})", fa.name)
                } else if fa.args.len() == 1 {
                    let primes = "'".repeat(fa.order.order() as usize);
                    format!("{}{primes}({args})", fa.name)
                } else {
                    let full = {
                        let mut m = MultiIndex::zero(self.p());
                        for (slot, &i) in fa.args.iter().enumerate() {
                            for _ in 0..fa.order.get(slot) {
                                m = m.incremented(i);
                            }
                        }
                        m
                    };
                    format!("{}_{}({args})", fa.name, self.subscript(&full))
                }
            }
        }
    }

    /// Render in the problem-file expression grammar.
    pub fn render(&self, e: &Expr) -> String {
        render_with(e, &|a| self.render_atom(a))
    }
}

/// `u` becomes `v`, `u1` becomes `v1`, anything else gets a `v` prefix.
pub fn default_dummy_name(field: &str) -> String {
    match field.strip_prefix('u') {
        Some(rest) => format!("v{rest}"),
        None => format!("v{field}"),
    }
}

fn render_with(e: &Expr, atom: &dyn Fn(&Atom) -> String) -> String {
    if e.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (k, (m, c)) in e.terms().enumerate() {
        let negative = c.is_negative();
        if k == 0 {
            if negative {
                out.push('-');
            }
        } else if negative {
            out.push_str(" - ");
        } else {
            out.push_str(" + ");
        }
        let c = c.abs();
        let mut num: Vec<String> = Vec::new();
        let mut den: Vec<String> = Vec::new();
        for (a, exp) in m.factors() {
            let base = atom(a);
            let p = exp.unsigned_abs();
            let f = if p == 1 { base } else { format!("{base}^{p}") };
            if *exp > 0 {
                num.push(f);
            } else {
                den.push(f);
            }
        }
        let numer = c.numer();
        let denom = c.denom();
        if num.is_empty() {
            write!(out, "{numer}").unwrap();
        } else {
            if !numer.is_one() {
                write!(out, "{numer}*").unwrap();
            }
            out.push_str(&num.join("*"));
        }
        if !denom.is_one() {
            write!(out, "/{denom}").unwrap();
        }
        for d in den {
            write!(out, "/{d}").unwrap();
        }
    }
    out
}

pub(crate) fn render_generic(e: &Expr) -> String {
    render_with(e, &|a| match a {
        Atom::Indep(i) => format!("x{}", i + 1),
        Atom::Jet(f, j) => {
            let base = match f.kind {
                FieldKind::Original => format!("u{}", f.index + 1),
                FieldKind::Dummy => format!("v{}", f.index + 1),
            };
            if j.is_zero() {
                base
            } else {
                format!("{base}{:?}", j)
            }
        }
        Atom::Param(n) => n.to_string(),
        Atom::Func(fa) => format!("{}{:?}", fa.name, fa.order),
    })
}

/// `Display` adapter pairing an expression with its variable names.
pub struct Rendered<'a> {
    pub space: &'a Space,
    pub expr: &'a Expr,
}

impl fmt::Display for Rendered<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.space.render(self.expr))
    }
}

impl Expr {
    pub fn display<'a>(&'a self, space: &'a Space) -> Rendered<'a> {
        Rendered { space, expr: self }
    }
}
