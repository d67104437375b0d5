//! Problem-file syntax: tokens, the LL(1) grammar, the tree it produces and
//! a canonical printer.
//!
//! ```text
//! file       := "jetnoether" "v1" (item ";"?)*
//! item       := "independent" ":" ident ("," ident)*
//!             | "dependent" ":" dep ("," dep)*
//!             | "parameters" ":" param ("," param)*
//!             | "functions" ":" ident args ("," ident args)*
//!             | "system" "{" (equation ";"?)* "}"
//!             | "balance" ":" ("generic" | "formal" | expr)
//!             | "substitute" "{" (ident "=" expr ";"?)* "}"
//!             | "generator" ident "{" (ident ":" expr ";"?)* "}"
//!             | "law" ident "{" (("char" | "flux") ident ":" expr ";"?)* "}"
//! dep        := ident ("->" ident)?
//! param      := ident ("!=" "0")?
//! args       := "(" ident ("," ident)* ")"
//! equation   := ident ("for" ident)? "=" expr ("solve" expr)?
//! expr       := term (("+" | "-") term)*
//! term       := unary (("*" | "/") unary)*
//! unary      := "-" unary | power
//! power      := primary ("^" INT)?
//! primary    := INT | "(" expr ")"
//!             | ident "'"+ args
//!             | ident ("_" sub)? args?
//! sub        := ident | "{" ident ("," ident)* "}"
//! ```

mod ast;
mod lexer;
mod parser;
mod render;

use thiserror::Error;

pub use ast::*;
pub use lexer::{tokenize, Tok, Token};
pub use parser::{parse_expr, parse_problem};
pub use render::{render_expr, render_problem};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{span}: unexpected character `{ch}`")]
    Lex { span: Span, ch: char },
    #[error("{span}: found {found}, expected one of: {}{}", expected.join(", "), unclosed_note(unclosed))]
    Syntax {
        span: Span,
        found: String,
        expected: Vec<String>,
        /// The innermost delimiter still open when input ran out.
        unclosed: Option<(String, Span)>,
    },
    #[error("{span}: exponent must be an integer between 0 and {max}")]
    Exponent { span: Span, max: u32 },
    #[error("{span}: duplicate {what} declaration")]
    Duplicate { span: Span, what: String },
}

impl ParseError {
    pub fn span(&self) -> Span {
        match self {
            ParseError::Lex { span, .. }
            | ParseError::Syntax { span, .. }
            | ParseError::Exponent { span, .. }
            | ParseError::Duplicate { span, .. } => *span,
        }
    }
}

fn unclosed_note(u: &Option<(String, Span)>) -> String {
    match u {
        Some((tok, at)) => format!(" (unclosed {tok} opened at {at})"),
        None => String::new(),
    }
}
