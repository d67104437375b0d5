use std::fmt::Write;

use super::ast::*;

// Binding strength of each node; an operand printed below the level its
// position requires gets parentheses.
const SUM: u8 = 1;
const PRODUCT: u8 = 2;
const UNARY: u8 = 3;
const ATOM: u8 = 5;

fn level(e: &Ex) -> u8 {
    match e {
        Ex::Add(..) | Ex::Sub(..) => SUM,
        Ex::Mul(..) | Ex::Div(..) => PRODUCT,
        Ex::Neg(..) => UNARY,
        Ex::Pow(..) => 4,
        Ex::Int(..) | Ex::Var { .. } | Ex::Call { .. } => ATOM,
    }
}

fn subscript(out: &mut String, sub: &Option<Vec<String>>) {
    match sub.as_deref() {
        None => {}
        Some([one]) if one.len() == 1 => write!(out, "_{one}").unwrap(),
        Some(items) => write!(out, "_{{{}}}", items.join(",")).unwrap(),
    }
}

fn operand(out: &mut String, e: &Ex, min: u8) {
    if level(e) < min {
        out.push('(');
        expr(out, e);
        out.push(')');
    } else {
        expr(out, e);
    }
}

fn expr(out: &mut String, e: &Ex) {
    match e {
        Ex::Int(n, _) => out.push_str(n),
        Ex::Var { name, sub, .. } => {
            out.push_str(name);
            subscript(out, sub);
        }
        Ex::Call {
            name,
            primes,
            sub,
            args,
            ..
        } => {
            out.push_str(name);
            out.push_str(&"'".repeat(*primes as usize));
            subscript(out, sub);
            let args: Vec<&str> = args.iter().map(|a| a.name.as_str()).collect();
            write!(out, "({})", args.join(",")).unwrap();
        }
        Ex::Neg(a, _) => {
            out.push('-');
            operand(out, a, UNARY);
        }
        Ex::Add(a, b, _) | Ex::Sub(a, b, _) => {
            operand(out, a, SUM);
            out.push_str(if matches!(e, Ex::Add(..)) {
                " + "
            } else {
                " - "
            });
            operand(out, b, PRODUCT);
        }
        Ex::Mul(a, b, _) | Ex::Div(a, b, _) => {
            operand(out, a, PRODUCT);
            out.push(if matches!(e, Ex::Mul(..)) { '*' } else { '/' });
            operand(out, b, UNARY);
        }
        Ex::Pow(a, n, _) => {
            operand(out, a, ATOM);
            write!(out, "^{n}").unwrap();
        }
    }
}

pub fn render_expr(e: &Ex) -> String {
    let mut out = String::new();
    expr(&mut out, e);
    out
}

fn names(items: &[Ident]) -> String {
    items
        .iter()
        .map(|i| i.name.as_str())
        .collect::<Vec<_>>()
        .join(", ")
}

fn block(out: &mut String, head: &str, entries: &[String]) {
    writeln!(out, "{head} {{").unwrap();
    for e in entries {
        writeln!(out, "  {e};").unwrap();
    }
    out.push_str("}\n");
}

/// Canonical text of a problem file: header, declarations, system,
/// balance, substitutions, generators and laws.
pub fn render_problem(f: &ProblemFile) -> String {
    let mut out = String::from("jetnoether v1\n\n");
    if !f.independent.is_empty() {
        writeln!(out, "independent: {};", names(&f.independent)).unwrap();
    }
    if !f.dependent.is_empty() {
        let deps: Vec<String> = f
            .dependent
            .iter()
            .map(|d| match &d.dummy {
                Some(v) => format!("{} -> {}", d.name.name, v.name),
                None => d.name.name.clone(),
            })
            .collect();
        writeln!(out, "dependent: {};", deps.join(", ")).unwrap();
    }
    if !f.parameters.is_empty() {
        let ps: Vec<String> = f
            .parameters
            .iter()
            .map(|p| {
                if p.nonzero {
                    format!("{} != 0", p.name.name)
                } else {
                    p.name.name.clone()
                }
            })
            .collect();
        writeln!(out, "parameters: {};", ps.join(", ")).unwrap();
    }
    if !f.functions.is_empty() {
        let fs: Vec<String> = f
            .functions
            .iter()
            .map(|g| format!("{}({})", g.name.name, names(&g.args)))
            .collect();
        writeln!(out, "functions: {};", fs.join(", ")).unwrap();
    }
    if !f.equations.is_empty() {
        out.push('\n');
        let eqs: Vec<String> = f
            .equations
            .iter()
            .map(|e| {
                let mut s = e.name.name.clone();
                if let Some(field) = &e.field {
                    write!(s, " for {}", field.name).unwrap();
                }
                write!(s, " = {}", render_expr(&e.expr)).unwrap();
                if let Some(lead) = &e.solve {
                    write!(s, " solve {}", render_expr(lead)).unwrap();
                }
                s
            })
            .collect();
        block(&mut out, "system", &eqs);
    }
    if let Some(b) = &f.balance {
        let text = match b {
            BalanceDecl::Generic(_) => "generic".to_string(),
            BalanceDecl::Formal(_) => "formal".to_string(),
            BalanceDecl::Expr(e) => render_expr(e),
        };
        writeln!(out, "\nbalance: {text};").unwrap();
    }
    if !f.substitutions.is_empty() {
        out.push('\n');
        let subs: Vec<String> = f
            .substitutions
            .iter()
            .map(|a| format!("{} = {}", a.target.name, render_expr(&a.expr)))
            .collect();
        block(&mut out, "substitute", &subs);
    }
    for g in &f.generators {
        out.push('\n');
        let entries: Vec<String> = g
            .entries
            .iter()
            .map(|a| format!("{}: {}", a.target.name, render_expr(&a.expr)))
            .collect();
        block(&mut out, &format!("generator {}", g.name.name), &entries);
    }
    for l in &f.laws {
        out.push('\n');
        let entries: Vec<String> = l
            .characteristic
            .iter()
            .map(|a| format!("char {}: {}", a.target.name, render_expr(&a.expr)))
            .chain(
                l.fluxes
                    .iter()
                    .map(|a| format!("flux {}: {}", a.target.name, render_expr(&a.expr))),
            )
            .collect();
        block(&mut out, &format!("law {}", l.name.name), &entries);
    }
    out
}
