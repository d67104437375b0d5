use std::fmt;

/// Source position of a node. Spans never take part in equality, so two
/// trees parsed from differently formatted text compare equal.
#[derive(Clone, Copy, Debug, Default)]
pub struct Span {
    pub line: u32,
    pub col: u32,
}

impl PartialEq for Span {
    fn eq(&self, _: &Span) -> bool {
        true
    }
}

impl Eq for Span {}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ident {
    pub name: String,
    pub span: Span,
}

impl Ident {
    pub fn new(name: &str) -> Self {
        Ident {
            name: name.to_string(),
            span: Span::default(),
        }
    }
}

/// Expression tree as written. Subscripts are kept raw (`u_{txx}` holds
/// `["txx"]`, `u_{x1,x2}` holds `["x1", "x2"]`) and resolved later
/// against the declared variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Ex {
    /// Non-negative integer literal, decimal digits.
    Int(String, Span),
    Var {
        name: String,
        sub: Option<Vec<String>>,
        span: Span,
    },
    Call {
        name: String,
        primes: u32,
        sub: Option<Vec<String>>,
        args: Vec<Ident>,
        span: Span,
    },
    Neg(Box<Ex>, Span),
    Add(Box<Ex>, Box<Ex>, Span),
    Sub(Box<Ex>, Box<Ex>, Span),
    Mul(Box<Ex>, Box<Ex>, Span),
    Div(Box<Ex>, Box<Ex>, Span),
    Pow(Box<Ex>, u32, Span),
}

impl Ex {
    pub fn span(&self) -> Span {
        match self {
            Ex::Int(_, s)
            | Ex::Var { span: s, .. }
            | Ex::Call { span: s, .. }
            | Ex::Neg(_, s)
            | Ex::Add(_, _, s)
            | Ex::Sub(_, _, s)
            | Ex::Mul(_, _, s)
            | Ex::Div(_, _, s)
            | Ex::Pow(_, _, s) => *s,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dependent {
    pub name: Ident,
    pub dummy: Option<Ident>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParamDecl {
    pub name: Ident,
    pub nonzero: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FuncDecl {
    pub name: Ident,
    pub args: Vec<Ident>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Equation {
    pub name: Ident,
    pub field: Option<Ident>,
    pub expr: Ex,
    pub solve: Option<Ex>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BalanceDecl {
    Generic(Span),
    Formal(Span),
    Expr(Ex),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Assignment {
    pub target: Ident,
    pub expr: Ex,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorDecl {
    pub name: Ident,
    pub entries: Vec<Assignment>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LawDecl {
    pub name: Ident,
    pub characteristic: Vec<Assignment>,
    pub fluxes: Vec<Assignment>,
}

/// A whole problem file. Sections may appear in any order and repeat;
/// entries keep their relative order within each section.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ProblemFile {
    pub independent: Vec<Ident>,
    pub dependent: Vec<Dependent>,
    pub parameters: Vec<ParamDecl>,
    pub functions: Vec<FuncDecl>,
    pub equations: Vec<Equation>,
    pub balance: Option<BalanceDecl>,
    pub substitutions: Vec<Assignment>,
    pub generators: Vec<GeneratorDecl>,
    pub laws: Vec<LawDecl>,
}
