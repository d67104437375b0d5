use super::ast::*;
use super::lexer::{tokenize, Tok, Token};
use super::ParseError;

const ITEM_KEYWORDS: &[&str] = &[
    "independent",
    "dependent",
    "parameters",
    "functions",
    "system",
    "balance",
    "substitute",
    "generator",
    "law",
];

const MAX_EXPONENT: u32 = 64;

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    expected: Vec<String>,
    open: Vec<(Tok, Span)>,
}

impl Parser {
    fn new(src: &str) -> Result<Self, ParseError> {
        Ok(Parser {
            toks: tokenize(src)?,
            pos: 0,
            expected: Vec::new(),
            open: Vec::new(),
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn span(&self) -> Span {
        self.toks[self.pos].span
    }

    fn advance(&mut self) -> Token {
        self.expected.clear();
        let t = self.toks[self.pos].clone();
        if t.tok != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn at(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            return true;
        }
        self.expected.push(t.to_string());
        false
    }

    fn at_kw(&mut self, kw: &str) -> bool {
        if matches!(self.peek(), Tok::Ident(s) if s == kw) {
            return true;
        }
        self.expected.push(format!("`{kw}`"));
        false
    }

    fn eat(&mut self, t: &Tok) -> bool {
        let hit = self.at(t);
        if hit {
            self.advance();
        }
        hit
    }

    fn expect(&mut self, t: &Tok) -> Result<Span, ParseError> {
        let span = self.span();
        if self.eat(t) {
            Ok(span)
        } else {
            Err(self.error())
        }
    }

    fn expect_kw(&mut self, kw: &str) -> Result<Span, ParseError> {
        let span = self.span();
        if self.at_kw(kw) {
            self.advance();
            Ok(span)
        } else {
            Err(self.error())
        }
    }

    fn open(&mut self, t: Tok) -> Result<(), ParseError> {
        let span = self.expect(&t)?;
        self.open.push((t, span));
        Ok(())
    }

    fn close(&mut self, t: Tok) -> Result<(), ParseError> {
        self.expect(&t)?;
        self.open.pop();
        Ok(())
    }

    fn error(&self) -> ParseError {
        let mut expected = self.expected.clone();
        expected.sort();
        expected.dedup();
        let unclosed = match (self.peek(), self.open.last()) {
            (Tok::Eof, Some((t, s))) => Some((t.to_string(), *s)),
            _ => None,
        };
        ParseError::Syntax {
            span: self.span(),
            found: self.peek().to_string(),
            expected,
            unclosed,
        }
    }

    fn ident(&mut self) -> Result<Ident, ParseError> {
        if let Tok::Ident(name) = self.peek() {
            let name = name.clone();
            let span = self.advance().span;
            return Ok(Ident { name, span });
        }
        self.expected.push("identifier".into());
        Err(self.error())
    }

    fn ident_list(&mut self) -> Result<Vec<Ident>, ParseError> {
        let mut out = vec![self.ident()?];
        while self.eat(&Tok::Comma) {
            out.push(self.ident()?);
        }
        Ok(out)
    }

    fn file(&mut self) -> Result<ProblemFile, ParseError> {
        self.expect_kw("jetnoether")?;
        self.expect_kw("v1")?;
        let mut file = ProblemFile::default();
        while !self.at(&Tok::Eof) {
            self.item(&mut file)?;
            self.eat(&Tok::Semi);
        }
        Ok(file)
    }

    fn item(&mut self, file: &mut ProblemFile) -> Result<(), ParseError> {
        let Some(kw) = ITEM_KEYWORDS.iter().copied().find(|kw| self.at_kw(kw)) else {
            return Err(self.error());
        };
        let span = self.advance().span;
        match kw {
            "independent" => {
                self.expect(&Tok::Colon)?;
                file.independent.extend(self.ident_list()?);
            }
            "dependent" => {
                self.expect(&Tok::Colon)?;
                loop {
                    let name = self.ident()?;
                    let dummy = if self.eat(&Tok::Arrow) {
                        Some(self.ident()?)
                    } else {
                        None
                    };
                    file.dependent.push(Dependent { name, dummy });
                    if !self.eat(&Tok::Comma) {
                        break;
                    }
                }
            }
            "parameters" => {
                self.expect(&Tok::Colon)?;
                loop {
                    let name = self.ident()?;
                    let nonzero = self.eat(&Tok::NotEq);
                    if nonzero {
                        self.zero_literal()?;
                    }
                    file.parameters.push(ParamDecl { name, nonzero });
                    if !self.eat(&Tok::Comma) {
                        break;
                    }
                }
            }
            "functions" => {
                self.expect(&Tok::Colon)?;
                loop {
                    let name = self.ident()?;
                    let args = self.arguments()?;
                    file.functions.push(FuncDecl { name, args });
                    if !self.eat(&Tok::Comma) {
                        break;
                    }
                }
            }
            "system" => {
                self.open(Tok::LBrace)?;
                while !self.at(&Tok::RBrace) {
                    file.equations.push(self.equation()?);
                    self.eat(&Tok::Semi);
                }
                self.close(Tok::RBrace)?;
            }
            "balance" => {
                self.expect(&Tok::Colon)?;
                let decl = if self.at_kw("generic") {
                    BalanceDecl::Generic(self.advance().span)
                } else if self.at_kw("formal") {
                    BalanceDecl::Formal(self.advance().span)
                } else {
                    BalanceDecl::Expr(self.expr()?)
                };
                if file.balance.is_some() {
                    return Err(ParseError::Duplicate {
                        span,
                        what: "balance".into(),
                    });
                }
                file.balance = Some(decl);
            }
            "substitute" => {
                self.open(Tok::LBrace)?;
                while !self.at(&Tok::RBrace) {
                    let target = self.ident()?;
                    self.expect(&Tok::Eq)?;
                    let expr = self.expr()?;
                    file.substitutions.push(Assignment { target, expr });
                    self.eat(&Tok::Semi);
                }
                self.close(Tok::RBrace)?;
            }
            "generator" => {
                let name = self.ident()?;
                self.open(Tok::LBrace)?;
                let mut entries = Vec::new();
                while !self.at(&Tok::RBrace) {
                    entries.push(self.entry()?);
                    self.eat(&Tok::Semi);
                }
                self.close(Tok::RBrace)?;
                file.generators.push(GeneratorDecl { name, entries });
            }
            "law" => {
                let name = self.ident()?;
                self.open(Tok::LBrace)?;
                let mut law = LawDecl {
                    name,
                    characteristic: Vec::new(),
                    fluxes: Vec::new(),
                };
                while !self.at(&Tok::RBrace) {
                    if self.at_kw("char") {
                        self.advance();
                        law.characteristic.push(self.entry()?);
                    } else if self.at_kw("flux") {
                        self.advance();
                        law.fluxes.push(self.entry()?);
                    } else {
                        return Err(self.error());
                    }
                    self.eat(&Tok::Semi);
                }
                self.close(Tok::RBrace)?;
                file.laws.push(law);
            }
            _ => unreachable!(),
        }
        Ok(())
    }

    fn zero_literal(&mut self) -> Result<(), ParseError> {
        if matches!(self.peek(), Tok::Int(n) if n.bytes().all(|b| b == b'0')) {
            self.advance();
            return Ok(());
        }
        self.expected.push("`0`".into());
        Err(self.error())
    }

    fn arguments(&mut self) -> Result<Vec<Ident>, ParseError> {
        self.open(Tok::LParen)?;
        let args = self.ident_list()?;
        self.close(Tok::RParen)?;
        Ok(args)
    }

    fn equation(&mut self) -> Result<Equation, ParseError> {
        let name = self.ident()?;
        let field = if self.at_kw("for") {
            self.advance();
            Some(self.ident()?)
        } else {
            None
        };
        self.expect(&Tok::Eq)?;
        let expr = self.expr()?;
        let solve = if self.at_kw("solve") {
            self.advance();
            Some(self.expr()?)
        } else {
            None
        };
        Ok(Equation {
            name,
            field,
            expr,
            solve,
        })
    }

    fn entry(&mut self) -> Result<Assignment, ParseError> {
        let target = self.ident()?;
        self.expect(&Tok::Colon)?;
        let expr = self.expr()?;
        Ok(Assignment { target, expr })
    }

    pub(super) fn expr(&mut self) -> Result<Ex, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let span = self.span();
            if self.eat(&Tok::Plus) {
                lhs = Ex::Add(Box::new(lhs), Box::new(self.term()?), span);
            } else if self.eat(&Tok::Minus) {
                lhs = Ex::Sub(Box::new(lhs), Box::new(self.term()?), span);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Ex, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let span = self.span();
            if self.eat(&Tok::Star) {
                lhs = Ex::Mul(Box::new(lhs), Box::new(self.unary()?), span);
            } else if self.eat(&Tok::Slash) {
                lhs = Ex::Div(Box::new(lhs), Box::new(self.unary()?), span);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Ex, ParseError> {
        let span = self.span();
        if self.eat(&Tok::Minus) {
            return Ok(Ex::Neg(Box::new(self.unary()?), span));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Ex, ParseError> {
        let base = self.primary()?;
        let span = self.span();
        if !self.eat(&Tok::Caret) {
            return Ok(base);
        }
        if let Tok::Int(n) = self.peek() {
            let exp_span = self.span();
            let n = n.parse::<u32>().ok().filter(|&n| n <= MAX_EXPONENT);
            let Some(n) = n else {
                return Err(ParseError::Exponent {
                    span: exp_span,
                    max: MAX_EXPONENT,
                });
            };
            self.advance();
            return Ok(Ex::Pow(Box::new(base), n, span));
        }
        self.expected.push("integer".into());
        Err(self.error())
    }

    fn primary(&mut self) -> Result<Ex, ParseError> {
        let span = self.span();
        match self.peek().clone() {
            Tok::Int(n) => {
                self.advance();
                Ok(Ex::Int(n, span))
            }
            Tok::LParen => {
                self.open(Tok::LParen)?;
                let e = self.expr()?;
                self.close(Tok::RParen)?;
                Ok(e)
            }
            Tok::Ident(name) => {
                self.advance();
                let mut primes = 0;
                while self.eat(&Tok::Prime) {
                    primes += 1;
                }
                let sub = if primes == 0 && self.eat(&Tok::Underscore) {
                    Some(self.subscript()?)
                } else {
                    None
                };
                if primes > 0 || self.at(&Tok::LParen) {
                    let args = self.arguments()?;
                    return Ok(Ex::Call {
                        name,
                        primes,
                        sub,
                        args,
                        span,
                    });
                }
                Ok(Ex::Var { name, sub, span })
            }
            _ => {
                self.expected
                    .extend(["integer", "identifier", "`(`", "`-`"].map(String::from));
                Err(self.error())
            }
        }
    }

    fn subscript(&mut self) -> Result<Vec<String>, ParseError> {
        if self.at(&Tok::LBrace) {
            self.open(Tok::LBrace)?;
            let items = self.ident_list()?.into_iter().map(|i| i.name).collect();
            self.close(Tok::RBrace)?;
            return Ok(items);
        }
        Ok(vec![self.ident()?.name])
    }
}

/// Parse a complete problem file.
pub fn parse_problem(src: &str) -> Result<ProblemFile, ParseError> {
    Parser::new(src)?.file()
}

/// Parse a standalone expression; trailing tokens are an error.
pub fn parse_expr(src: &str) -> Result<Ex, ParseError> {
    let mut p = Parser::new(src)?;
    let e = p.expr()?;
    if !p.at(&Tok::Eof) {
        return Err(p.error());
    }
    Ok(e)
}
