use std::fmt;

use super::ast::Span;
use super::ParseError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(String),
    Colon,
    Semi,
    Comma,
    LBrace,
    RBrace,
    LParen,
    RParen,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Eq,
    NotEq,
    Prime,
    Underscore,
    Arrow,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Ident(name) => return write!(f, "identifier `{name}`"),
            Tok::Int(n) => return write!(f, "integer `{n}`"),
            Tok::Colon => "`:`",
            Tok::Semi => "`;`",
            Tok::Comma => "`,`",
            Tok::LBrace => "`{`",
            Tok::RBrace => "`}`",
            Tok::LParen => "`(`",
            Tok::RParen => "`)`",
            Tok::Plus => "`+`",
            Tok::Minus => "`-`",
            Tok::Star => "`*`",
            Tok::Slash => "`/`",
            Tok::Caret => "`^`",
            Tok::Eq => "`=`",
            Tok::NotEq => "`!=`",
            Tok::Prime => "`'`",
            Tok::Underscore => "`_`",
            Tok::Arrow => "`->`",
            Tok::Eof => "end of input",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

/// Split source text into tokens. `#` starts a comment running to the end
/// of the line.
pub fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let mut chars = src.chars().peekable();
    let (mut line, mut col) = (1u32, 1u32);
    while let Some(&c) = chars.peek() {
        let span = Span { line, col };
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars>| {
            let c = chars.next();
            if c == Some('\n') {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            c
        };
        if c.is_whitespace() {
            bump(&mut chars);
            continue;
        }
        if c == '#' {
            while chars.peek().is_some_and(|&c| c != '\n') {
                bump(&mut chars);
            }
            continue;
        }
        if c.is_ascii_alphabetic() {
            let mut s = String::new();
            while let Some(&c) = chars.peek() {
                if !c.is_ascii_alphanumeric() {
                    break;
                }
                s.push(c);
                bump(&mut chars);
            }
            out.push(Token {
                tok: Tok::Ident(s),
                span,
            });
            continue;
        }
        if c.is_ascii_digit() {
            let mut s = String::new();
            while let Some(&c) = chars.peek() {
                if !c.is_ascii_digit() {
                    break;
                }
                s.push(c);
                bump(&mut chars);
            }
            out.push(Token {
                tok: Tok::Int(s),
                span,
            });
            continue;
        }
        bump(&mut chars);
        let tok = match c {
            ':' => Tok::Colon,
            ';' => Tok::Semi,
            ',' => Tok::Comma,
            '{' => Tok::LBrace,
            '}' => Tok::RBrace,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '+' => Tok::Plus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '=' => Tok::Eq,
            '\'' => Tok::Prime,
            '_' => Tok::Underscore,
            '-' if chars.peek() == Some(&'>') => {
                bump(&mut chars);
                Tok::Arrow
            }
            '-' => Tok::Minus,
            '!' if chars.peek() == Some(&'=') => {
                bump(&mut chars);
                Tok::NotEq
            }
            other => return Err(ParseError::Lex { span, ch: other }),
        };
        out.push(Token { tok, span });
    }
    out.push(Token {
        tok: Tok::Eof,
        span: Span { line, col },
    });
    Ok(out)
}
