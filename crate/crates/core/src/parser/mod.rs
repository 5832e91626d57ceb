//! Model and parameter file front end.
//!
//! ```text
//! given n : int
//! find x : matrix indexed by [int(1..n)] of int(1..n)
//! such that allDiff(x), forAll i : int(1..n-1) . x[i] < x[i+1] + 2
//! ```

mod check;
mod grammar;
mod lexer;
mod syntax;

use std::collections::BTreeMap;
use std::fmt;

pub use syntax::{
    BinOp, Decl, Func, Generator, Letting, ModelSource, Quantifier, SDomain, SExpr, SKind, SRange,
    SSense, UnOp,
};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("{pos}: syntax error: {msg}")]
    Syntax { pos: Pos, msg: String },
    #[error("{pos}: unknown identifier `{name}`")]
    UnknownIdentifier { pos: Pos, name: String },
    #[error("{pos}: type mismatch: {msg}")]
    TypeMismatch { pos: Pos, msg: String },
    #[error("{pos}: `{name}` is declared more than once")]
    Duplicate { pos: Pos, name: String },
}

impl ParseError {
    pub(crate) fn syntax(pos: Pos, msg: String) -> Self {
        ParseError::Syntax { pos, msg }
    }

    pub fn pos(&self) -> Pos {
        match self {
            ParseError::Syntax { pos, .. }
            | ParseError::UnknownIdentifier { pos, .. }
            | ParseError::TypeMismatch { pos, .. }
            | ParseError::Duplicate { pos, .. } => *pos,
        }
    }
}

/// Parses and type-checks a model file.
pub fn parse_model(text: &str) -> Result<ModelSource, ParseError> {
    let src = grammar::Parser::new(lexer::lex(text)?).model()?;
    check::check_model(&src)?;
    Ok(src)
}

/// A parameter value: an integer or a (nested) matrix literal indexed from 1
/// unless the model declares other index domains.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Value {
    Int(i64),
    Matrix(Vec<Value>),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(v) => write!(f, "{v}"),
            Value::Matrix(items) => {
                write!(f, "[")?;
                for (i, x) in items.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, "]")
            }
        }
    }
}

/// Values for the `given` parameters of a model.
pub type ParamBinding = BTreeMap<String, Value>;

fn literal_value(e: &SExpr) -> Result<Value, ParseError> {
    match &e.kind {
        SKind::Int(v) => Ok(Value::Int(*v)),
        SKind::Bool(b) => Ok(Value::Int(*b as i64)),
        SKind::MatrixLit(items) => Ok(Value::Matrix(
            items.iter().map(literal_value).collect::<Result<_, _>>()?,
        )),
        _ => Err(ParseError::syntax(
            e.pos,
            "parameter value must be an integer or matrix literal".into(),
        )),
    }
}

/// Parses a sequence of `letting name = value` statements.
pub fn parse_params(text: &str) -> Result<ParamBinding, ParseError> {
    let stmts = grammar::Parser::new(lexer::lex(text)?).params()?;
    let mut out = ParamBinding::new();
    for s in stmts {
        let v = literal_value(&s.value)?;
        if out.insert(s.name.clone(), v).is_some() {
            return Err(ParseError::Duplicate { pos: s.pos, name: s.name });
        }
    }
    Ok(out)
}
