use std::fmt::Write as _;
use std::sync::Arc;

use super::{CmpOp, Expr};
use crate::table::Table;

/// Deterministic prefix form, used for alphabetical ordering and cache keys.
/// Nested tables print their tuples in full.
pub fn prefix(e: &Expr) -> String {
    let mut s = String::new();
    write_prefix(e, &mut s);
    s
}

fn write_prefix(e: &Expr, s: &mut String) {
    let list = |s: &mut String, op: &str, xs: &[Expr]| {
        s.push('(');
        s.push_str(op);
        for x in xs {
            s.push(' ');
            write_prefix(x, s);
        }
        s.push(')');
    };
    match e {
        Expr::Int(v) => {
            let _ = write!(s, "{v}");
        }
        Expr::Bool(b) => s.push_str(if *b { "true" } else { "false" }),
        Expr::Var(v) => s.push_str(v.as_str()),
        Expr::Sum(terms, offset) => {
            s.push_str("(+");
            for t in terms {
                s.push(' ');
                write_term(t.coef, &t.expr, s);
            }
            if *offset != 0 {
                let _ = write!(s, " {offset}");
            }
            s.push(')');
        }
        Expr::Product(xs) => list(s, "*", xs),
        Expr::And(xs) => list(s, "and", xs),
        Expr::Or(xs) => list(s, "or", xs),
        Expr::AllDiff(xs) => list(s, "alldiff", xs),
        Expr::Div(a, b) => list(s, "/", &[(**a).clone(), (**b).clone()]),
        Expr::Mod(a, b) => list(s, "%", &[(**a).clone(), (**b).clone()]),
        Expr::Abs(a) => list(s, "abs", std::slice::from_ref(a)),
        Expr::Neg(a) => list(s, "neg", std::slice::from_ref(a)),
        Expr::Not(a) => list(s, "not", std::slice::from_ref(a)),
        Expr::Cmp(op, a, b) => list(s, op.symbol(), &[(**a).clone(), (**b).clone()]),
        Expr::Implies(a, b) => list(s, "->", &[(**a).clone(), (**b).clone()]),
        Expr::Iff(a, b) => list(s, "<->", &[(**a).clone(), (**b).clone()]),
        Expr::Element(arr, idx) => {
            s.push_str("(elem [");
            for (i, x) in arr.iter().enumerate() {
                if i > 0 {
                    s.push(' ');
                }
                write_prefix(x, s);
            }
            s.push_str("] ");
            write_prefix(idx, s);
            s.push(')');
        }
        Expr::InSet(a, set) => {
            s.push_str("(in ");
            write_prefix(a, s);
            let _ = write!(s, " {set:?})");
        }
        Expr::Table(scope, t) => {
            list(s, "table", scope);
            s.pop();
            let _ = write!(s, " {:?})", t.tuples());
        }
    }
}

fn write_term(coef: i64, e: &Expr, s: &mut String) {
    if coef == 1 {
        write_prefix(e, s);
    } else {
        let _ = write!(s, "(* {coef} ");
        write_prefix(e, s);
        s.push(')');
    }
}

/// Names tables in order of first appearance, sharing one name between
/// references to the same tuple list.
#[derive(Default)]
pub struct TableNames {
    entries: Vec<(String, Arc<Table>)>,
}

impl TableNames {
    pub fn name_of(&mut self, t: &Arc<Table>) -> String {
        if let Some((n, _)) = self.entries.iter().find(|(_, x)| Arc::ptr_eq(x, t)) {
            return n.clone();
        }
        let n = format!("t{}", self.entries.len());
        self.entries.push((n.clone(), t.clone()));
        n
    }

    pub fn entries(&self) -> &[(String, Arc<Table>)] {
        &self.entries
    }

    pub fn dump(&self) -> String {
        self.entries.iter().map(|(n, t)| t.dump(n)).collect()
    }
}

/// Fully parenthesised surface syntax.
pub(crate) fn infix(e: &Expr, names: &mut TableNames) -> String {
    let join = |xs: &[Expr], sep: &str, names: &mut TableNames| -> String {
        xs.iter().map(|x| infix(x, names)).collect::<Vec<_>>().join(sep)
    };
    match e {
        Expr::Int(v) => v.to_string(),
        Expr::Bool(b) => b.to_string(),
        Expr::Var(v) => v.to_string(),
        Expr::Sum(terms, offset) => {
            let mut s = String::from("(");
            for (i, t) in terms.iter().enumerate() {
                let inner = infix(&t.expr, names);
                let body = match t.coef.abs() {
                    1 => inner,
                    c => format!("{c} * {inner}"),
                };
                match (i, t.coef < 0) {
                    (0, false) => s.push_str(&body),
                    (0, true) => s.push_str(&format!("-{body}")),
                    (_, false) => s.push_str(&format!(" + {body}")),
                    (_, true) => s.push_str(&format!(" - {body}")),
                }
            }
            if terms.is_empty() {
                s.push_str(&offset.to_string());
            } else if *offset > 0 {
                s.push_str(&format!(" + {offset}"));
            } else if *offset < 0 {
                s.push_str(&format!(" - {}", offset.unsigned_abs()));
            }
            s.push(')');
            s
        }
        Expr::Product(xs) => format!("({})", join(xs, " * ", names)),
        Expr::Div(a, b) => format!("({} / {})", infix(a, names), infix(b, names)),
        Expr::Mod(a, b) => format!("({} % {})", infix(a, names), infix(b, names)),
        Expr::Abs(a) => format!("|{}|", infix(a, names)),
        Expr::Neg(a) => format!("(-{})", infix(a, names)),
        Expr::Cmp(op, a, b) => format!("({} {} {})", infix(a, names), op.symbol(), infix(b, names)),
        Expr::And(xs) if xs.is_empty() => "true".into(),
        Expr::Or(xs) if xs.is_empty() => "false".into(),
        Expr::And(xs) => format!("({})", join(xs, " /\\ ", names)),
        Expr::Or(xs) => format!("({})", join(xs, " \\/ ", names)),
        Expr::Not(a) => format!("!{}", infix(a, names)),
        Expr::Implies(a, b) => format!("({} -> {})", infix(a, names), infix(b, names)),
        Expr::Iff(a, b) => format!("({} <-> {})", infix(a, names), infix(b, names)),
        Expr::AllDiff(xs) => format!("allDiff([{}])", join(xs, ", ", names)),
        Expr::Element(arr, idx) => {
            // matrix literals index from 1 in the surface language
            let idx = infix(idx, names);
            format!("[{}][{} + 1]", join(arr, ", ", names), idx)
        }
        Expr::InSet(a, set) => {
            let set: Vec<String> = set.iter().map(i64::to_string).collect();
            format!("({} in {{{}}})", infix(a, names), set.join(", "))
        }
        Expr::Table(scope, t) => {
            format!("table([{}], {})", join(scope, ", ", names), names.name_of(t))
        }
    }
}

impl std::fmt::Display for Expr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&infix(self, &mut TableNames::default()))
    }
}

impl CmpOp {
    /// `b op' a` equivalent to `a op b`.
    pub fn flipped(self) -> CmpOp {
        match self {
            CmpOp::Eq => CmpOp::Eq,
            CmpOp::Neq => CmpOp::Neq,
            CmpOp::Lt => CmpOp::Gt,
            CmpOp::Leq => CmpOp::Geq,
            CmpOp::Gt => CmpOp::Lt,
            CmpOp::Geq => CmpOp::Leq,
        }
    }
}
