//! Expressions over variable indices and their three-valued evaluation
//! against current domains.

use std::collections::HashMap;
use std::sync::Arc;

use super::domains::Layout;
use crate::ast::{CmpOp, Expr, VarName};
use crate::table::Table;

#[derive(Clone, Debug)]
pub(crate) enum CExpr {
    Int(i64),
    Bool(bool),
    Var(usize),
    Sum(Vec<(i64, CExpr)>, i64),
    Product(Vec<CExpr>),
    Div(Box<CExpr>, Box<CExpr>),
    Mod(Box<CExpr>, Box<CExpr>),
    Abs(Box<CExpr>),
    Neg(Box<CExpr>),
    Cmp(CmpOp, Box<CExpr>, Box<CExpr>),
    And(Vec<CExpr>),
    Or(Vec<CExpr>),
    Not(Box<CExpr>),
    Implies(Box<CExpr>, Box<CExpr>),
    Iff(Box<CExpr>, Box<CExpr>),
    AllDiff(Vec<CExpr>),
    Element(Vec<CExpr>, Box<CExpr>),
    InSet(Box<CExpr>, Vec<i64>),
    Table(Vec<CExpr>, Arc<Table>),
}

pub(crate) fn compile(e: &Expr, index: &HashMap<VarName, usize>) -> CExpr {
    let c = |x: &Expr| Box::new(compile(x, index));
    let list = |xs: &[Expr]| xs.iter().map(|x| compile(x, index)).collect::<Vec<_>>();
    match e {
        Expr::Int(v) => CExpr::Int(*v),
        Expr::Bool(b) => CExpr::Bool(*b),
        Expr::Var(v) => CExpr::Var(index[v]),
        Expr::Sum(terms, k) => {
            CExpr::Sum(terms.iter().map(|t| (t.coef, compile(&t.expr, index))).collect(), *k)
        }
        Expr::Product(xs) => CExpr::Product(list(xs)),
        Expr::Div(a, b) => CExpr::Div(c(a), c(b)),
        Expr::Mod(a, b) => CExpr::Mod(c(a), c(b)),
        Expr::Abs(a) => CExpr::Abs(c(a)),
        Expr::Neg(a) => CExpr::Neg(c(a)),
        Expr::Cmp(op, a, b) => CExpr::Cmp(*op, c(a), c(b)),
        Expr::And(xs) => CExpr::And(list(xs)),
        Expr::Or(xs) => CExpr::Or(list(xs)),
        Expr::Not(a) => CExpr::Not(c(a)),
        Expr::Implies(a, b) => CExpr::Implies(c(a), c(b)),
        Expr::Iff(a, b) => CExpr::Iff(c(a), c(b)),
        Expr::AllDiff(xs) => CExpr::AllDiff(list(xs)),
        Expr::Element(xs, i) => CExpr::Element(list(xs), c(i)),
        Expr::InSet(a, set) => CExpr::InSet(c(a), set.clone()),
        Expr::Table(scope, t) => CExpr::Table(list(scope), t.clone()),
    }
}

impl CExpr {
    fn is_boolean(&self) -> bool {
        matches!(
            self,
            CExpr::Bool(_)
                | CExpr::Cmp(..)
                | CExpr::And(_)
                | CExpr::Or(_)
                | CExpr::Not(_)
                | CExpr::Implies(..)
                | CExpr::Iff(..)
                | CExpr::AllDiff(_)
                | CExpr::InSet(..)
                | CExpr::Table(..)
        )
    }

    pub fn vars(&self, out: &mut Vec<usize>) {
        match self {
            CExpr::Var(i) => {
                if !out.contains(i) {
                    out.push(*i)
                }
            }
            CExpr::Int(_) | CExpr::Bool(_) => {}
            CExpr::Sum(ts, _) => ts.iter().for_each(|(_, x)| x.vars(out)),
            CExpr::Product(xs) | CExpr::And(xs) | CExpr::Or(xs) | CExpr::AllDiff(xs) => {
                xs.iter().for_each(|x| x.vars(out))
            }
            CExpr::Table(xs, _) => xs.iter().for_each(|x| x.vars(out)),
            CExpr::Element(xs, i) => {
                xs.iter().for_each(|x| x.vars(out));
                i.vars(out)
            }
            CExpr::Div(a, b)
            | CExpr::Mod(a, b)
            | CExpr::Cmp(_, a, b)
            | CExpr::Implies(a, b)
            | CExpr::Iff(a, b) => {
                a.vars(out);
                b.vars(out)
            }
            CExpr::Abs(a) | CExpr::Neg(a) | CExpr::Not(a) | CExpr::InSet(a, _) => a.vars(out),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Tri {
    False,
    True,
    Unknown,
}

impl Tri {
    fn not(self) -> Tri {
        match self {
            Tri::False => Tri::True,
            Tri::True => Tri::False,
            Tri::Unknown => Tri::Unknown,
        }
    }
}

/// Definedness of an integer subterm over the current domains.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Def {
    Yes,
    Maybe,
    Never,
}

#[derive(Clone, Copy, Debug)]
struct Iv {
    lo: i128,
    hi: i128,
    def: Def,
}

const NEVER: Iv = Iv { lo: 0, hi: 0, def: Def::Never };

fn iv(lo: i128, hi: i128, def: Def) -> Iv {
    Iv { lo, hi, def }
}

/// Evaluation context: current domains, optionally with one variable fixed.
pub(crate) struct Ctx<'a> {
    pub layout: &'a Layout,
    pub state: &'a [u64],
    pub fixed: Option<(usize, i64)>,
}

impl Ctx<'_> {
    fn bounds(&self, i: usize) -> (i64, i64) {
        match self.fixed {
            Some((j, v)) if j == i => (v, v),
            _ => (
                self.layout.min(self.state, i).unwrap_or(0),
                self.layout.max(self.state, i).unwrap_or(0),
            ),
        }
    }

    fn contains(&self, i: usize, v: i64) -> bool {
        match self.fixed {
            Some((j, w)) if j == i => v == w,
            _ => self.layout.contains(self.state, i, v),
        }
    }
}

fn tdiv(a: i128, b: i128) -> i128 {
    a / b
}

fn ival(e: &CExpr, ctx: &Ctx) -> Iv {
    if e.is_boolean() {
        return match tri(e, ctx) {
            Tri::True => iv(1, 1, Def::Yes),
            Tri::False => iv(0, 0, Def::Yes),
            Tri::Unknown => iv(0, 1, Def::Yes),
        };
    }
    match e {
        CExpr::Int(v) => iv(*v as i128, *v as i128, Def::Yes),
        CExpr::Var(i) => {
            let (a, b) = ctx.bounds(*i);
            iv(a as i128, b as i128, Def::Yes)
        }
        CExpr::Sum(ts, k) => {
            let (mut lo, mut hi, mut def) = (*k as i128, *k as i128, Def::Yes);
            for (c, x) in ts {
                let r = ival(x, ctx);
                if r.def == Def::Never {
                    return NEVER;
                }
                def = def.max(r.def);
                let (p, q) = (r.lo * *c as i128, r.hi * *c as i128);
                lo += p.min(q);
                hi += p.max(q);
            }
            iv(lo, hi, def)
        }
        CExpr::Product(xs) => {
            let (mut lo, mut hi, mut def) = (1i128, 1i128, Def::Yes);
            for x in xs {
                let r = ival(x, ctx);
                if r.def == Def::Never {
                    return NEVER;
                }
                def = def.max(r.def);
                let c = [lo * r.lo, lo * r.hi, hi * r.lo, hi * r.hi];
                lo = *c.iter().min().unwrap();
                hi = *c.iter().max().unwrap();
                // keep magnitudes bounded
                lo = lo.max(-(i64::MAX as i128));
                hi = hi.min(i64::MAX as i128);
            }
            iv(lo, hi, def)
        }
        CExpr::Div(a, b) => {
            let (x, y) = (ival(a, ctx), ival(b, ctx));
            if x.def == Def::Never || y.def == Def::Never || (y.lo == 0 && y.hi == 0) {
                return NEVER;
            }
            let mut def = x.def.max(y.def);
            if y.lo <= 0 && y.hi >= 0 {
                def = def.max(Def::Maybe);
            }
            let mut ends = Vec::new();
            if y.lo < 0 {
                ends.push(y.lo);
                ends.push(y.hi.min(-1));
            }
            if y.hi > 0 {
                ends.push(y.lo.max(1));
                ends.push(y.hi);
            }
            let mut lo = i128::MAX;
            let mut hi = i128::MIN;
            for &d in &ends {
                for n in [x.lo, x.hi] {
                    let q = tdiv(n, d);
                    lo = lo.min(q);
                    hi = hi.max(q);
                }
            }
            if x.lo <= 0 && x.hi >= 0 {
                lo = lo.min(0);
                hi = hi.max(0);
            }
            iv(lo, hi, def)
        }
        CExpr::Mod(a, b) => {
            let (x, y) = (ival(a, ctx), ival(b, ctx));
            if x.def == Def::Never || y.def == Def::Never || (y.lo == 0 && y.hi == 0) {
                return NEVER;
            }
            let mut def = x.def.max(y.def);
            if y.lo <= 0 && y.hi >= 0 {
                def = def.max(Def::Maybe);
            }
            if x.lo == x.hi && y.lo == y.hi {
                return iv(x.lo % y.lo, x.lo % y.lo, def);
            }
            let m = y.lo.abs().max(y.hi.abs()) - 1;
            // a non-negative dividend below the divisor is returned unchanged
            if x.lo >= 0 && y.lo > 0 && x.hi < y.lo {
                return iv(x.lo, x.hi, def);
            }
            let lo = if x.lo >= 0 { 0 } else { x.lo.max(-m) };
            let hi = if x.hi <= 0 { 0 } else { x.hi.min(m) };
            iv(lo, hi, def)
        }
        CExpr::Abs(a) => {
            let x = ival(a, ctx);
            if x.def == Def::Never {
                return NEVER;
            }
            if x.lo >= 0 {
                iv(x.lo, x.hi, x.def)
            } else if x.hi <= 0 {
                iv(-x.hi, -x.lo, x.def)
            } else {
                iv(0, x.hi.max(-x.lo), x.def)
            }
        }
        CExpr::Neg(a) => {
            let x = ival(a, ctx);
            if x.def == Def::Never {
                return NEVER;
            }
            iv(-x.hi, -x.lo, x.def)
        }
        CExpr::Element(xs, i) => {
            let r = ival(i, ctx);
            if r.def == Def::Never {
                return NEVER;
            }
            let n = xs.len() as i128;
            let (a, b) = (r.lo.max(0), r.hi.min(n - 1));
            if a > b {
                return NEVER;
            }
            let mut def = r.def;
            if r.lo < 0 || r.hi >= n {
                def = def.max(Def::Maybe);
            }
            let mut lo = i128::MAX;
            let mut hi = i128::MIN;
            let mut any = false;
            for k in a..=b {
                if let CExpr::Var(j) = **i {
                    if !ctx.contains(j, k as i64) {
                        continue;
                    }
                }
                let x = ival(&xs[k as usize], ctx);
                if x.def == Def::Never {
                    def = def.max(Def::Maybe);
                    continue;
                }
                any = true;
                def = def.max(x.def);
                lo = lo.min(x.lo);
                hi = hi.max(x.hi);
            }
            if !any {
                return NEVER;
            }
            iv(lo, hi, def)
        }
        _ => unreachable!("Boolean node handled above"),
    }
}

fn cmp_tri(op: CmpOp, x: Iv, y: Iv) -> Tri {
    if x.def == Def::Never || y.def == Def::Never {
        return Tri::False;
    }
    let t = match op {
        CmpOp::Eq => {
            if x.hi < y.lo || y.hi < x.lo {
                Tri::False
            } else if x.lo == x.hi && y.lo == y.hi {
                Tri::True
            } else {
                Tri::Unknown
            }
        }
        CmpOp::Neq => {
            if x.hi < y.lo || y.hi < x.lo {
                Tri::True
            } else if x.lo == x.hi && y.lo == y.hi {
                Tri::False
            } else {
                Tri::Unknown
            }
        }
        CmpOp::Lt => {
            if x.hi < y.lo {
                Tri::True
            } else if x.lo >= y.hi {
                Tri::False
            } else {
                Tri::Unknown
            }
        }
        CmpOp::Leq => {
            if x.hi <= y.lo {
                Tri::True
            } else if x.lo > y.hi {
                Tri::False
            } else {
                Tri::Unknown
            }
        }
        CmpOp::Gt => return cmp_tri(CmpOp::Lt, y, x),
        CmpOp::Geq => return cmp_tri(CmpOp::Leq, y, x),
    };
    if t == Tri::True && (x.def == Def::Maybe || y.def == Def::Maybe) {
        Tri::Unknown
    } else {
        t
    }
}

/// Interval of an integer (or 0/1 Boolean) term; `None` unless the term is
/// defined everywhere in the current domains.
pub(crate) fn int_bounds(e: &CExpr, ctx: &Ctx) -> Option<(i128, i128)> {
    let r = ival(e, ctx);
    (r.def == Def::Yes).then_some((r.lo, r.hi))
}

/// Three-valued truth of a Boolean expression over the current domains.
pub(crate) fn tri(e: &CExpr, ctx: &Ctx) -> Tri {
    match e {
        CExpr::Bool(b) => {
            if *b {
                Tri::True
            } else {
                Tri::False
            }
        }
        CExpr::Cmp(op, a, b) => cmp_tri(*op, ival(a, ctx), ival(b, ctx)),
        CExpr::And(xs) => {
            let mut out = Tri::True;
            for x in xs {
                match tri(x, ctx) {
                    Tri::False => return Tri::False,
                    Tri::Unknown => out = Tri::Unknown,
                    Tri::True => {}
                }
            }
            out
        }
        CExpr::Or(xs) => {
            let mut out = Tri::False;
            for x in xs {
                match tri(x, ctx) {
                    Tri::True => return Tri::True,
                    Tri::Unknown => out = Tri::Unknown,
                    Tri::False => {}
                }
            }
            out
        }
        CExpr::Not(a) => tri(a, ctx).not(),
        CExpr::Implies(a, b) => match (tri(a, ctx), tri(b, ctx)) {
            (Tri::False, _) | (_, Tri::True) => Tri::True,
            (Tri::True, Tri::False) => Tri::False,
            _ => Tri::Unknown,
        },
        CExpr::Iff(a, b) => match (tri(a, ctx), tri(b, ctx)) {
            (Tri::Unknown, _) | (_, Tri::Unknown) => Tri::Unknown,
            (x, y) => {
                if x == y {
                    Tri::True
                } else {
                    Tri::False
                }
            }
        },
        CExpr::AllDiff(xs) => {
            let ivs: Vec<Iv> = xs.iter().map(|x| ival(x, ctx)).collect();
            if ivs.iter().any(|x| x.def == Def::Never) {
                return Tri::False;
            }
            let mut all_disjoint = true;
            for i in 0..ivs.len() {
                for j in i + 1..ivs.len() {
                    let (x, y) = (ivs[i], ivs[j]);
                    if x.lo == x.hi && y.lo == y.hi && x.lo == y.lo {
                        return Tri::False;
                    }
                    if !(x.hi < y.lo || y.hi < x.lo) {
                        all_disjoint = false;
                    }
                }
            }
            if all_disjoint && ivs.iter().all(|x| x.def == Def::Yes) {
                Tri::True
            } else {
                Tri::Unknown
            }
        }
        CExpr::InSet(a, set) => {
            let x = ival(a, ctx);
            if x.def == Def::Never {
                return Tri::False;
            }
            let inside = set.iter().filter(|&&v| (v as i128) >= x.lo && (v as i128) <= x.hi).count();
            if inside == 0 {
                Tri::False
            } else if x.def == Def::Yes && (x.hi - x.lo + 1) as usize == inside {
                Tri::True
            } else {
                Tri::Unknown
            }
        }
        CExpr::Table(scope, t) => {
            let mut all_fixed = true;
            let mut fixed = Vec::with_capacity(scope.len());
            for s in scope {
                let x = ival(s, ctx);
                if x.lo != x.hi {
                    all_fixed = false;
                }
                fixed.push(x.lo as i64);
            }
            if all_fixed {
                return if t.contains(&fixed) { Tri::True } else { Tri::False };
            }
            let consistent = t.tuples().iter().any(|tup| {
                scope.iter().zip(tup).all(|(s, &v)| match s {
                    CExpr::Var(j) => ctx.contains(*j, v),
                    CExpr::Int(c) => *c == v,
                    other => {
                        let x = ival(other, ctx);
                        (v as i128) >= x.lo && (v as i128) <= x.hi
                    }
                })
            });
            if consistent {
                Tri::Unknown
            } else {
                Tri::False
            }
        }
        // an integer in Boolean position is a 0/1 variable
        other => {
            let x = ival(other, ctx);
            if x.def == Def::Never || x.hi < 1 {
                Tri::False
            } else if x.lo >= 1 {
                Tri::True
            } else {
                Tri::Unknown
            }
        }
    }
}
