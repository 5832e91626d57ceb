//! Surface syntax tree and its pretty-printer.

use std::fmt;

use super::Pos;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UnOp {
    Neg,
    Not,
    Abs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Mod,
    Eq,
    Neq,
    Lt,
    Leq,
    Gt,
    Geq,
    And,
    Or,
    Implies,
    Iff,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Mod => "%",
            BinOp::Eq => "=",
            BinOp::Neq => "!=",
            BinOp::Lt => "<",
            BinOp::Leq => "<=",
            BinOp::Gt => ">",
            BinOp::Geq => ">=",
            BinOp::And => "/\\",
            BinOp::Or => "\\/",
            BinOp::Implies => "->",
            BinOp::Iff => "<->",
        }
    }

    pub fn is_arithmetic(self) -> bool {
        matches!(self, BinOp::Add | BinOp::Sub | BinOp::Mul | BinOp::Div | BinOp::Mod)
    }

    pub fn is_relational(self) -> bool {
        matches!(
            self,
            BinOp::Eq | BinOp::Neq | BinOp::Lt | BinOp::Leq | BinOp::Gt | BinOp::Geq
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    AllDiff,
    Sum,
    ToInt,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::AllDiff => "allDiff",
            Func::Sum => "sum",
            Func::ToInt => "toInt",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Quantifier {
    ForAll,
    Exists,
    Sum,
}

impl Quantifier {
    pub fn keyword(self) -> &'static str {
        match self {
            Quantifier::ForAll => "forAll",
            Quantifier::Exists => "exists",
            Quantifier::Sum => "sum",
        }
    }
}

/// One element of a quantifier or comprehension header.
#[derive(Clone, Debug, PartialEq)]
pub enum Generator {
    /// `i, j : int(..)`
    Range(Vec<String>, SDomain),
    /// Boolean condition filtering the bindings so far.
    Guard(SExpr),
}

#[derive(Clone, Debug, PartialEq)]
pub enum SRange {
    Single(SExpr),
    Span(SExpr, SExpr),
}

#[derive(Clone, Debug, PartialEq)]
pub enum SDomain {
    Bool,
    /// `int` alone when the list is empty.
    Int(Vec<SRange>),
    Matrix(Vec<SDomain>, Box<SDomain>),
}

#[derive(Clone, Debug)]
pub struct SExpr {
    pub kind: SKind,
    pub pos: Pos,
}

/// Positions are ignored: two trees are equal when their shapes are.
impl PartialEq for SExpr {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SKind {
    Int(i64),
    Bool(bool),
    Ident(String),
    Unary(UnOp, Box<SExpr>),
    Binary(BinOp, Box<SExpr>, Box<SExpr>),
    /// `m[i, .., j]`; `None` marks a `..` slice.
    Index(Box<SExpr>, Vec<Option<SExpr>>),
    Call(Func, Vec<SExpr>),
    MatrixLit(Vec<SExpr>),
    Comprehension(Box<SExpr>, Vec<Generator>),
    Quant(Quantifier, Vec<Generator>, Box<SExpr>),
    InSet(Box<SExpr>, Vec<SExpr>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SSense {
    Minimising,
    Maximising,
}

#[derive(Clone, Debug)]
pub struct Decl {
    pub name: String,
    pub domain: SDomain,
    pub pos: Pos,
}

impl PartialEq for Decl {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.domain == other.domain
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Letting {
    pub name: String,
    pub value: SExpr,
}

/// A parsed, name-resolved and type-checked model file.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct ModelSource {
    pub params: Vec<Decl>,
    pub constants: Vec<Letting>,
    pub vars: Vec<Decl>,
    pub constraints: Vec<SExpr>,
    pub objective: Option<(SSense, SExpr)>,
}

fn comma_list<T: fmt::Display>(f: &mut fmt::Formatter<'_>, xs: &[T]) -> fmt::Result {
    for (i, x) in xs.iter().enumerate() {
        if i > 0 {
            write!(f, ", ")?;
        }
        write!(f, "{x}")?;
    }
    Ok(())
}

impl fmt::Display for SRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SRange::Single(e) => write!(f, "{e}"),
            SRange::Span(a, b) => write!(f, "{a}..{b}"),
        }
    }
}

impl fmt::Display for SDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SDomain::Bool => write!(f, "bool"),
            SDomain::Int(rs) if rs.is_empty() => write!(f, "int"),
            SDomain::Int(rs) => {
                write!(f, "int(")?;
                comma_list(f, rs)?;
                write!(f, ")")
            }
            SDomain::Matrix(idx, elem) => {
                write!(f, "matrix indexed by [")?;
                comma_list(f, idx)?;
                write!(f, "] of {elem}")
            }
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::Range(names, d) => write!(f, "{} : {d}", names.join(", ")),
            Generator::Guard(e) => write!(f, "{e}"),
        }
    }
}

impl fmt::Display for SExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            SKind::Int(v) if *v < 0 => write!(f, "(-{})", v.unsigned_abs()),
            SKind::Int(v) => write!(f, "{v}"),
            SKind::Bool(b) => write!(f, "{b}"),
            SKind::Ident(s) => write!(f, "{s}"),
            SKind::Unary(UnOp::Neg, a) => write!(f, "(-{a})"),
            SKind::Unary(UnOp::Not, a) => write!(f, "(!{a})"),
            SKind::Unary(UnOp::Abs, a) => write!(f, "|{a}|"),
            SKind::Binary(op, a, b) => write!(f, "({a} {} {b})", op.symbol()),
            SKind::Index(m, idx) => {
                write!(f, "{m}[")?;
                for (i, x) in idx.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    match x {
                        Some(e) => write!(f, "{e}")?,
                        None => write!(f, "..")?,
                    }
                }
                write!(f, "]")
            }
            SKind::Call(func, args) => {
                write!(f, "{}(", func.name())?;
                comma_list(f, args)?;
                write!(f, ")")
            }
            SKind::MatrixLit(items) => {
                write!(f, "[")?;
                comma_list(f, items)?;
                write!(f, "]")
            }
            SKind::Comprehension(body, gens) => {
                write!(f, "[{body} | ")?;
                comma_list(f, gens)?;
                write!(f, "]")
            }
            SKind::Quant(q, gens, body) => {
                write!(f, "({} ", q.keyword())?;
                comma_list(f, gens)?;
                write!(f, " . {body})")
            }
            SKind::InSet(a, set) => {
                write!(f, "({a} in {{")?;
                comma_list(f, set)?;
                write!(f, "}})")
            }
        }
    }
}

impl fmt::Display for ModelSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.params {
            writeln!(f, "given {} : {}", p.name, p.domain)?;
        }
        for c in &self.constants {
            writeln!(f, "letting {} = {}", c.name, c.value)?;
        }
        for v in &self.vars {
            writeln!(f, "find {} : {}", v.name, v.domain)?;
        }
        if let Some((sense, e)) = &self.objective {
            let kw = match sense {
                SSense::Minimising => "minimising",
                SSense::Maximising => "maximising",
            };
            writeln!(f, "{kw} {e}")?;
        }
        if !self.constraints.is_empty() {
            writeln!(f, "such that")?;
            for (i, c) in self.constraints.iter().enumerate() {
                let sep = if i + 1 < self.constraints.len() { "," } else { "" };
                writeln!(f, "    {c}{sep}")?;
            }
        }
        Ok(())
    }
}
