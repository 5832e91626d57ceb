use std::fmt;
use std::sync::Arc;

use crate::table::Table;

/// Name of a scalar decision variable.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarName(Arc<str>);

impl VarName {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for VarName {
    fn from(s: &str) -> Self {
        VarName(Arc::from(s))
    }
}

impl From<String> for VarName {
    fn from(s: String) -> Self {
        VarName(Arc::from(s))
    }
}

impl fmt::Display for VarName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for VarName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CmpOp {
    Eq,
    Neq,
    Lt,
    Leq,
    Gt,
    Geq,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::Neq => "!=",
            CmpOp::Lt => "<",
            CmpOp::Leq => "<=",
            CmpOp::Gt => ">",
            CmpOp::Geq => ">=",
        }
    }

    pub fn holds(self, a: i64, b: i64) -> bool {
        match self {
            CmpOp::Eq => a == b,
            CmpOp::Neq => a != b,
            CmpOp::Lt => a < b,
            CmpOp::Leq => a <= b,
            CmpOp::Gt => a > b,
            CmpOp::Geq => a >= b,
        }
    }

    pub fn is_commutative(self) -> bool {
        matches!(self, CmpOp::Eq | CmpOp::Neq)
    }
}

/// One `coef * expr` summand of a [`Expr::Sum`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Term {
    pub coef: i64,
    pub expr: Expr,
}

/// Immutable expression tree for constraints and integer terms.
///
/// Booleans and integers share one tree; Boolean values coerce to 0/1 inside
/// arithmetic. `Div` and `Mod` truncate toward zero. An undefined subterm
/// (division by zero, element index out of range) falsifies the nearest
/// enclosing Boolean node.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr {
    Int(i64),
    Bool(bool),
    Var(VarName),
    /// `sum(coef_i * expr_i) + offset`
    Sum(Vec<Term>, i64),
    Product(Vec<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Mod(Box<Expr>, Box<Expr>),
    Abs(Box<Expr>),
    Neg(Box<Expr>),
    Cmp(CmpOp, Box<Expr>, Box<Expr>),
    And(Vec<Expr>),
    Or(Vec<Expr>),
    Not(Box<Expr>),
    Implies(Box<Expr>, Box<Expr>),
    Iff(Box<Expr>, Box<Expr>),
    AllDiff(Vec<Expr>),
    /// Zero-based `array[index]`.
    Element(Vec<Expr>, Box<Expr>),
    /// Membership in a sorted constant set.
    InSet(Box<Expr>, Vec<i64>),
    /// Extensional constraint; scope entries are variables or constants.
    Table(Vec<Expr>, Arc<Table>),
}

impl Expr {
    pub fn var(name: &str) -> Expr {
        Expr::Var(VarName::from(name))
    }

    pub fn sum(terms: Vec<(i64, Expr)>, offset: i64) -> Expr {
        Expr::Sum(
            terms.into_iter().map(|(coef, expr)| Term { coef, expr }).collect(),
            offset,
        )
    }

    pub fn cmp(op: CmpOp, a: Expr, b: Expr) -> Expr {
        Expr::Cmp(op, Box::new(a), Box::new(b))
    }

    pub fn eq(a: Expr, b: Expr) -> Expr {
        Expr::cmp(CmpOp::Eq, a, b)
    }

    pub fn not(a: Expr) -> Expr {
        Expr::Not(Box::new(a))
    }

    pub fn div(a: Expr, b: Expr) -> Expr {
        Expr::Div(Box::new(a), Box::new(b))
    }

    pub fn modulo(a: Expr, b: Expr) -> Expr {
        Expr::Mod(Box::new(a), Box::new(b))
    }

    pub fn abs(a: Expr) -> Expr {
        Expr::Abs(Box::new(a))
    }

    pub fn implies(a: Expr, b: Expr) -> Expr {
        Expr::Implies(Box::new(a), Box::new(b))
    }

    pub fn table(scope: Vec<VarName>, table: Arc<Table>) -> Expr {
        Expr::Table(scope.into_iter().map(Expr::Var).collect(), table)
    }

    /// Statically Boolean node. Variables report `false`; Boolean variables
    /// are told apart by their declaration.
    pub fn is_boolean(&self) -> bool {
        matches!(
            self,
            Expr::Bool(_)
                | Expr::Cmp(..)
                | Expr::And(_)
                | Expr::Or(_)
                | Expr::Not(_)
                | Expr::Implies(..)
                | Expr::Iff(..)
                | Expr::AllDiff(_)
                | Expr::InSet(..)
                | Expr::Table(..)
        )
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            Expr::Int(v) => Some(*v),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Expr::Bool(b) => Some(*b),
            _ => None,
        }
    }

    pub fn as_var(&self) -> Option<&VarName> {
        match self {
            Expr::Var(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, Expr::Int(_) | Expr::Bool(_) | Expr::Var(_))
    }

    /// Direct subexpressions in left-to-right order.
    pub fn children(&self) -> Vec<&Expr> {
        match self {
            Expr::Int(_) | Expr::Bool(_) | Expr::Var(_) => Vec::new(),
            Expr::Sum(terms, _) => terms.iter().map(|t| &t.expr).collect(),
            Expr::Product(xs) | Expr::And(xs) | Expr::Or(xs) | Expr::AllDiff(xs) => {
                xs.iter().collect()
            }
            Expr::Div(a, b)
            | Expr::Mod(a, b)
            | Expr::Cmp(_, a, b)
            | Expr::Implies(a, b)
            | Expr::Iff(a, b) => vec![a, b],
            Expr::Abs(a) | Expr::Neg(a) | Expr::Not(a) | Expr::InSet(a, _) => vec![a],
            Expr::Element(arr, idx) => arr.iter().chain(std::iter::once(&**idx)).collect(),
            Expr::Table(scope, _) => scope.iter().collect(),
        }
    }

    pub fn children_mut(&mut self) -> Vec<&mut Expr> {
        match self {
            Expr::Int(_) | Expr::Bool(_) | Expr::Var(_) => Vec::new(),
            Expr::Sum(terms, _) => terms.iter_mut().map(|t| &mut t.expr).collect(),
            Expr::Product(xs) | Expr::And(xs) | Expr::Or(xs) | Expr::AllDiff(xs) => {
                xs.iter_mut().collect()
            }
            Expr::Div(a, b)
            | Expr::Mod(a, b)
            | Expr::Cmp(_, a, b)
            | Expr::Implies(a, b)
            | Expr::Iff(a, b) => vec![a, b],
            Expr::Abs(a) | Expr::Neg(a) | Expr::Not(a) | Expr::InSet(a, _) => vec![a],
            Expr::Element(arr, idx) => {
                arr.iter_mut().chain(std::iter::once(&mut **idx)).collect()
            }
            Expr::Table(scope, _) => scope.iter_mut().collect(),
        }
    }

    /// Calls `f` on every variable leaf, depth-first, left-first.
    pub fn visit_vars(&self, f: &mut impl FnMut(&VarName)) {
        match self {
            Expr::Var(v) => f(v),
            _ => {
                for c in self.children() {
                    c.visit_vars(f);
                }
            }
        }
    }

    pub fn contains_var(&self, name: &VarName) -> bool {
        let mut found = false;
        self.visit_vars(&mut |v| found |= v == name);
        found
    }

    pub fn at(&self, path: &[usize]) -> &Expr {
        path.iter().fold(self, |e, &i| e.children()[i])
    }

    pub fn replace_at(&mut self, path: &[usize], with: Expr) {
        match path.split_first() {
            None => *self = with,
            Some((&i, rest)) => {
                let mut children = self.children_mut();
                children.swap_remove(i).replace_at(rest, with);
            }
        }
    }

    /// Whether `self` contains a node structurally equal to `other`.
    pub fn contains(&self, other: &Expr) -> bool {
        self == other || self.children().into_iter().any(|c| c.contains(other))
    }

    /// Applies `f` to every variable leaf.
    pub fn map_vars(&self, f: &impl Fn(&VarName) -> Expr) -> Expr {
        match self {
            Expr::Var(v) => f(v),
            _ => {
                let mut out = self.clone();
                for c in out.children_mut() {
                    *c = c.map_vars(f);
                }
                out
            }
        }
    }
}
