//! Partial evaluation and local rewriting.
//!
//! Boolean positions never become undefined: a fault below a relation or
//! connective turns that node into `false`. Integer positions report an
//! undefined value as `None`.

use std::collections::HashMap;

use super::{CmpOp, Expr, Term, VarName};

type Asg<'a> = &'a dyn Fn(&VarName) -> Option<i64>;

/// Simplifies without any variable assignment.
pub fn simplify(e: &Expr) -> Expr {
    simplify_with(e, &|_| None)
}

/// Simplifies under the partial assignment `values`.
pub fn simplify_map(e: &Expr, values: &HashMap<VarName, i64>) -> Expr {
    simplify_with(e, &|v| values.get(v).copied())
}

/// Simplifies a constraint under `values`. The root is always read as a
/// Boolean, so a bare variable reduces to `true`/`false` once assigned.
pub fn simplify_constraint(e: &Expr, values: &HashMap<VarName, i64>) -> Expr {
    sb(e, &|v| values.get(v).copied())
}

/// Boolean roots are simplified in a Boolean context; anything else as an
/// integer term, with an undefined result printed as `0 / 0`.
pub fn simplify_with(e: &Expr, asg: Asg) -> Expr {
    if e.is_boolean() {
        sb(e, asg)
    } else {
        si(e, asg).unwrap_or_else(undefined)
    }
}

/// Integer-context simplification; `None` when `e` is undefined.
pub fn simplify_int(e: &Expr, asg: Asg) -> Option<Expr> {
    si(e, asg)
}

/// Syntactic guarantee that an integer term is defined everywhere.
pub fn is_total(e: &Expr) -> bool {
    match e {
        _ if e.is_boolean() => true,
        Expr::Div(a, b) | Expr::Mod(a, b) => {
            matches!(b.as_int(), Some(v) if v != 0) && is_total(a)
        }
        Expr::Element(..) => false,
        _ => e.children().into_iter().all(is_total),
    }
}

fn undefined() -> Expr {
    Expr::div(Expr::Int(0), Expr::Int(0))
}

fn sb(e: &Expr, asg: Asg) -> Expr {
    match e {
        Expr::Bool(b) => Expr::Bool(*b),
        Expr::Int(v) => Expr::Bool(*v != 0),
        Expr::Var(v) => match asg(v) {
            Some(x) => Expr::Bool(x != 0),
            None => e.clone(),
        },
        Expr::Cmp(op, a, b) => cmp(*op, si(a, asg), si(b, asg)),
        Expr::And(xs) => and(xs.iter().map(|x| sb(x, asg)).collect()),
        Expr::Or(xs) => or(xs.iter().map(|x| sb(x, asg)).collect()),
        Expr::Not(a) => negate(sb(a, asg)),
        Expr::Implies(a, b) => implies(sb(a, asg), sb(b, asg)),
        Expr::Iff(a, b) => iff(sb(a, asg), sb(b, asg)),
        Expr::AllDiff(xs) => alldiff(xs.iter().map(|x| si(x, asg)).collect()),
        Expr::InSet(a, set) => match si(a, asg) {
            None => Expr::Bool(false),
            Some(Expr::Int(v)) => Expr::Bool(set.binary_search(&v).is_ok()),
            Some(_) if set.is_empty() => Expr::Bool(false),
            Some(x) => Expr::InSet(Box::new(x), set.clone()),
        },
        Expr::Table(scope, t) => {
            if t.is_empty() {
                return Expr::Bool(false);
            }
            let scope: Vec<Expr> = scope
                .iter()
                .map(|x| si(x, asg).unwrap_or_else(undefined))
                .collect();
            let fixed: Vec<(usize, i64)> = scope
                .iter()
                .enumerate()
                .filter_map(|(i, x)| x.as_int().map(|v| (i, v)))
                .collect();
            if fixed.len() == scope.len() {
                let tuple: Vec<i64> = fixed.iter().map(|&(_, v)| v).collect();
                return Expr::Bool(t.contains(&tuple));
            }
            if !fixed.is_empty()
                && !t.tuples().iter().any(|tp| fixed.iter().all(|&(i, v)| tp[i] == v))
            {
                return Expr::Bool(false);
            }
            Expr::Table(scope, t.clone())
        }
        _ => match si(e, asg) {
            None => Expr::Bool(false),
            Some(Expr::Int(v)) => Expr::Bool(v != 0),
            Some(x) => x,
        },
    }
}

fn si(e: &Expr, asg: Asg) -> Option<Expr> {
    Some(match e {
        Expr::Int(v) => Expr::Int(*v),
        Expr::Bool(b) => Expr::Int(*b as i64),
        Expr::Var(v) => asg(v).map(Expr::Int).unwrap_or_else(|| e.clone()),
        Expr::Sum(terms, offset) => {
            let mut acc = SumAcc::new(*offset);
            for t in terms {
                acc.add(t.coef, si(&t.expr, asg)?)?;
            }
            acc.finish()
        }
        Expr::Neg(a) => {
            let mut acc = SumAcc::new(0);
            acc.add(-1, si(a, asg)?)?;
            acc.finish()
        }
        Expr::Product(xs) => {
            let mut c: i64 = 1;
            let mut factors = Vec::new();
            for x in xs {
                match si(x, asg)? {
                    Expr::Int(v) => c = c.checked_mul(v)?,
                    Expr::Product(ys) => factors.extend(ys),
                    Expr::Sum(mut ts, 0) if ts.len() == 1 => {
                        let t = ts.pop().unwrap();
                        c = c.checked_mul(t.coef)?;
                        factors.push(t.expr);
                    }
                    other => factors.push(other),
                }
            }
            if factors.is_empty() || (c == 0 && factors.iter().all(is_total)) {
                return Some(Expr::Int(c));
            }
            let core = if factors.len() == 1 {
                factors.pop().unwrap()
            } else {
                Expr::Product(factors)
            };
            if c == 1 {
                core
            } else {
                Expr::Sum(vec![Term { coef: c, expr: core }], 0)
            }
        }
        Expr::Div(a, b) => {
            let (a, b) = (si(a, asg)?, si(b, asg)?);
            match (a.as_int(), b.as_int()) {
                (_, Some(0)) => return None,
                (Some(x), Some(y)) => Expr::Int(x.checked_div(y)?),
                (_, Some(1)) => a,
                _ => Expr::div(a, b),
            }
        }
        Expr::Mod(a, b) => {
            let (a, b) = (si(a, asg)?, si(b, asg)?);
            match (a.as_int(), b.as_int()) {
                (_, Some(0)) => return None,
                (Some(x), Some(y)) => Expr::Int(x.checked_rem(y)?),
                (_, Some(1 | -1)) if is_total(&a) => Expr::Int(0),
                _ => Expr::modulo(a, b),
            }
        }
        Expr::Abs(a) => match si(a, asg)? {
            Expr::Int(v) => Expr::Int(v.checked_abs()?),
            x => Expr::abs(x),
        },
        Expr::Element(arr, idx) => {
            let i = si(idx, asg)?;
            match i.as_int() {
                Some(k) if k < 0 || k >= arr.len() as i64 => return None,
                Some(k) => return si(&arr[k as usize], asg),
                None => Expr::Element(
                    arr.iter()
                        .map(|x| si(x, asg).unwrap_or_else(undefined))
                        .collect(),
                    Box::new(i),
                ),
            }
        }
        _ => match sb(e, asg) {
            Expr::Bool(b) => Expr::Int(b as i64),
            x => x,
        },
    })
}

/// Accumulates a flattened linear sum, merging equal summands.
struct SumAcc {
    terms: Vec<Term>,
    offset: i64,
}

impl SumAcc {
    fn new(offset: i64) -> Self {
        SumAcc { terms: Vec::new(), offset }
    }

    fn add(&mut self, coef: i64, e: Expr) -> Option<()> {
        match e {
            Expr::Int(v) => self.offset = self.offset.checked_add(coef.checked_mul(v)?)?,
            Expr::Sum(ts, o) => {
                self.offset = self.offset.checked_add(coef.checked_mul(o)?)?;
                for t in ts {
                    self.add_term(coef.checked_mul(t.coef)?, t.expr)?;
                }
            }
            other => self.add_term(coef, other)?,
        }
        Some(())
    }

    fn add_term(&mut self, coef: i64, e: Expr) -> Option<()> {
        match self.terms.iter_mut().find(|t| t.expr == e) {
            Some(t) => t.coef = t.coef.checked_add(coef)?,
            None => self.terms.push(Term { coef, expr: e }),
        }
        Some(())
    }

    fn finish(mut self) -> Expr {
        self.terms.retain(|t| t.coef != 0 || !is_total(&t.expr));
        match self.terms.as_slice() {
            [] => Expr::Int(self.offset),
            [t] if t.coef == 1 && self.offset == 0 => self.terms.pop().unwrap().expr,
            _ => Expr::Sum(self.terms, self.offset),
        }
    }
}

fn cmp(op: CmpOp, a: Option<Expr>, b: Option<Expr>) -> Expr {
    let (Some(a), Some(b)) = (a, b) else {
        return Expr::Bool(false);
    };
    let (op, a, b) = match op {
        CmpOp::Gt => (CmpOp::Lt, b, a),
        CmpOp::Geq => (CmpOp::Leq, b, a),
        _ => (op, a, b),
    };
    if let (Some(x), Some(y)) = (a.as_int(), b.as_int()) {
        return Expr::Bool(op.holds(x, y));
    }
    if a == b && is_total(&a) {
        return Expr::Bool(matches!(op, CmpOp::Eq | CmpOp::Leq));
    }
    Expr::cmp(op, a, b)
}

fn and(xs: Vec<Expr>) -> Expr {
    let mut out = Vec::with_capacity(xs.len());
    for x in xs {
        match x {
            Expr::Bool(true) => {}
            Expr::Bool(false) => return Expr::Bool(false),
            Expr::And(ys) => out.extend(ys),
            other => out.push(other),
        }
    }
    match out.len() {
        0 => Expr::Bool(true),
        1 => out.pop().unwrap(),
        _ => Expr::And(out),
    }
}

fn or(xs: Vec<Expr>) -> Expr {
    let mut out = Vec::with_capacity(xs.len());
    for x in xs {
        match x {
            Expr::Bool(false) => {}
            Expr::Bool(true) => return Expr::Bool(true),
            Expr::Or(ys) => out.extend(ys),
            other => out.push(other),
        }
    }
    match out.len() {
        0 => Expr::Bool(false),
        1 => out.pop().unwrap(),
        _ => Expr::Or(out),
    }
}

/// Negation of an already simplified Boolean expression, pushed as far
/// down as definedness allows.
pub(crate) fn negate(e: Expr) -> Expr {
    match e {
        Expr::Bool(b) => Expr::Bool(!b),
        Expr::Not(a) => *a,
        Expr::And(xs) => or(xs.into_iter().map(negate).collect()),
        Expr::Or(xs) => and(xs.into_iter().map(negate).collect()),
        Expr::Implies(a, b) => and(vec![*a, negate(*b)]),
        Expr::Iff(a, b) => iff(*a, negate(*b)),
        Expr::Cmp(op, a, b) if is_total(&a) && is_total(&b) => {
            cmp(op_negated(op), Some(*a), Some(*b))
        }
        other => Expr::not(other),
    }
}

fn op_negated(op: CmpOp) -> CmpOp {
    match op {
        CmpOp::Eq => CmpOp::Neq,
        CmpOp::Neq => CmpOp::Eq,
        CmpOp::Lt => CmpOp::Geq,
        CmpOp::Leq => CmpOp::Gt,
        CmpOp::Gt => CmpOp::Leq,
        CmpOp::Geq => CmpOp::Lt,
    }
}

fn implies(a: Expr, b: Expr) -> Expr {
    match (a.as_bool(), b.as_bool()) {
        (Some(false), _) | (_, Some(true)) => Expr::Bool(true),
        (Some(true), _) => b,
        (_, Some(false)) => negate(a),
        _ => Expr::implies(a, b),
    }
}

fn iff(a: Expr, b: Expr) -> Expr {
    match (a.as_bool(), b.as_bool()) {
        (Some(true), _) => b,
        (Some(false), _) => negate(b),
        (_, Some(true)) => a,
        (_, Some(false)) => negate(a),
        _ => Expr::Iff(Box::new(a), Box::new(b)),
    }
}

fn alldiff(items: Vec<Option<Expr>>) -> Expr {
    let Some(items) = items.into_iter().collect::<Option<Vec<Expr>>>() else {
        return Expr::Bool(false);
    };
    if items.len() <= 1 {
        return Expr::Bool(true);
    }
    let mut consts: Vec<i64> = items.iter().filter_map(Expr::as_int).collect();
    consts.sort_unstable();
    if consts.windows(2).any(|w| w[0] == w[1]) {
        return Expr::Bool(false);
    }
    if consts.len() == items.len() {
        return Expr::Bool(true);
    }
    for (i, x) in items.iter().enumerate() {
        if x.as_int().is_none() && is_total(x) && items[i + 1..].contains(x) {
            return Expr::Bool(false);
        }
    }
    Expr::AllDiff(items)
}
