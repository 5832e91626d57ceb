//! Canonical normal form and renaming-invariant cache keys.

use std::collections::HashMap;

use itertools::Itertools;

use super::print::prefix;
use super::simplify::{negate, simplify};
use super::{scope, Domain, DomainLookup, Expr, VarName};

/// Exhaustive permutation search is used up to this many variables.
const EXACT_RENAMING_LIMIT: usize = 6;

/// Sorts commutative argument lists by their printed prefix form and
/// simplifies, repeating until nothing changes. Sorting comes first so the
/// result does not depend on the incoming argument order.
pub fn normalize(e: &Expr) -> Expr {
    let mut cur = sort(e);
    for _ in 0..64 {
        let next = sort(&simplify(&cur));
        if next == cur {
            break;
        }
        cur = next;
    }
    cur
}

fn sort_list(xs: &[Expr]) -> Vec<Expr> {
    let mut out: Vec<Expr> = xs.iter().map(sort).collect();
    out.sort_by_cached_key(prefix);
    out
}

fn sort(e: &Expr) -> Expr {
    match e {
        Expr::And(xs) => {
            let mut v = sort_list(xs);
            v.dedup();
            Expr::And(v)
        }
        Expr::Or(xs) => {
            let mut v = sort_list(xs);
            v.dedup();
            Expr::Or(v)
        }
        Expr::Product(xs) => Expr::Product(sort_list(xs)),
        Expr::AllDiff(xs) => Expr::AllDiff(sort_list(xs)),
        Expr::Sum(terms, offset) => {
            let mut ts: Vec<_> = terms
                .iter()
                .map(|t| super::Term { coef: t.coef, expr: sort(&t.expr) })
                .collect();
            ts.sort_by_cached_key(|t| (prefix(&t.expr), t.coef));
            Expr::Sum(ts, *offset)
        }
        Expr::Cmp(op, a, b) if op.is_commutative() => {
            let mut v = sort_list(&[(**a).clone(), (**b).clone()]);
            let b = v.pop().unwrap();
            let a = v.pop().unwrap();
            Expr::cmp(*op, a, b)
        }
        Expr::Implies(a, b) => sort(&Expr::Or(vec![negate((**a).clone()), (**b).clone()])),
        // a <-> b and !a <-> !b are the same constraint; keep whichever
        // prints first so the choice survives renaming
        Expr::Iff(a, b) => {
            let pair = |x: Expr, y: Expr| {
                let mut v = sort_list(&[x, y]);
                let b = v.pop().unwrap();
                let a = v.pop().unwrap();
                Expr::Iff(Box::new(a), Box::new(b))
            };
            let (a, b) = (sort(a), sort(b));
            let flipped = pair(sort(&negate(a.clone())), sort(&negate(b.clone())));
            let plain = pair(a, b);
            if prefix(&flipped) < prefix(&plain) {
                flipped
            } else {
                plain
            }
        }
        _ => {
            let mut out = e.clone();
            for c in out.children_mut() {
                *c = sort(c);
            }
            out
        }
    }
}

/// Key shared by all expressions equal up to commutative reordering and a
/// consistent renaming of variables with equal domains.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CacheKey {
    pub expr: String,
    pub domains: Vec<Domain>,
}

/// Canonical representative of an expression.
///
/// `expr` mentions only the placeholder variables `V0, V1, ...`, numbered
/// by first occurrence, and `vars[i]` is the original variable standing
/// behind the i-th placeholder.
#[derive(Clone, Debug)]
pub struct Canonical {
    pub key: CacheKey,
    pub expr: Expr,
    pub vars: Vec<VarName>,
}

fn placeholder(i: usize, width: usize) -> VarName {
    VarName::from(format!("V{i:0width$}"))
}

fn rename(e: &Expr, map: &HashMap<VarName, VarName>) -> Expr {
    e.map_vars(&|v| Expr::Var(map[v].clone()))
}

pub fn cache_key(e: &Expr, dom: &dyn DomainLookup) -> CacheKey {
    canonicalize(e, dom).key
}

pub fn canonicalize(e: &Expr, dom: &dyn DomainLookup) -> Canonical {
    let n = normalize(e);
    let vars = scope(&n);
    let k = vars.len();
    let width = (k.max(2) - 1).to_string().len();
    let domains: Vec<Domain> = vars
        .iter()
        .map(|v| dom.domain_of(v).cloned().unwrap_or_default())
        .collect();

    // (printed form, placeholder domains, expression, placeholder -> original)
    let mut best: Option<(String, Vec<Domain>, Expr, Vec<VarName>)> = None;
    let mut consider = |perm: &[usize]| {
        let map: HashMap<VarName, VarName> = vars
            .iter()
            .zip(perm)
            .map(|(v, &p)| (v.clone(), placeholder(p, width)))
            .collect();
        let c = normalize(&rename(&n, &map));
        let mut d = vec![Domain::default(); k];
        let mut back = vars.clone();
        for (i, &p) in perm.iter().enumerate() {
            d[p] = domains[i].clone();
            back[p] = vars[i].clone();
        }
        let s = prefix(&c);
        let better = match &best {
            None => true,
            Some((bs, bd, _, _)) => (&s, &d) < (bs, bd),
        };
        if better {
            best = Some((s, d, c, back));
        }
    };
    if k == 0 {
        consider(&[]);
    } else if k <= EXACT_RENAMING_LIMIT {
        for perm in (0..k).permutations(k) {
            consider(&perm);
        }
    } else {
        let order = erased_order(&n, dom);
        let mut perm = vec![0; k];
        for (p, v) in order.iter().enumerate() {
            perm[vars.iter().position(|x| x == v).unwrap()] = p;
        }
        consider(&perm);
    }
    let (_, d, c, back) = best.unwrap();

    // Relabel by first occurrence so column i of a table is placeholder i.
    let index = |v: &VarName| {
        (0..k)
            .find(|&p| &placeholder(p, width) == v)
            .expect("placeholder")
    };
    let seq: Vec<usize> = scope(&c).iter().map(index).collect();
    let map: HashMap<VarName, VarName> = seq
        .iter()
        .enumerate()
        .map(|(j, &p)| (placeholder(p, width), placeholder(j, width)))
        .collect();
    let expr = rename(&c, &map);
    Canonical {
        key: CacheKey { expr: prefix(&expr), domains: seq.iter().map(|&p| d[p].clone()).collect() },
        expr,
        vars: seq.iter().map(|&p| back[p].clone()).collect(),
    }
}

/// Variable order for large scopes: first occurrence in a traversal that
/// visits commutative children sorted by their form with names replaced by
/// domains.
fn erased_order(e: &Expr, dom: &dyn DomainLookup) -> Vec<VarName> {
    let erase = |x: &Expr| {
        prefix(&x.map_vars(&|v| {
            let d = dom.domain_of(v).cloned().unwrap_or_default();
            Expr::Var(VarName::from(format!("_{d}")))
        }))
    };
    let mut out = Vec::new();
    visit_erased(e, &erase, &mut out);
    out
}

fn visit_erased(e: &Expr, erase: &dyn Fn(&Expr) -> String, out: &mut Vec<VarName>) {
    if let Expr::Var(v) = e {
        if !out.contains(v) {
            out.push(v.clone());
        }
        return;
    }
    let mut kids = e.children();
    let commutative = match e {
        Expr::And(_) | Expr::Or(_) | Expr::Product(_) | Expr::AllDiff(_) | Expr::Sum(..) => true,
        Expr::Iff(..) => true,
        Expr::Cmp(op, ..) => op.is_commutative(),
        _ => false,
    };
    if commutative {
        kids.sort_by_cached_key(|c| erase(c));
    }
    for c in kids {
        visit_erased(c, erase, out);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::CmpOp;

    fn v(n: &str) -> Expr {
        Expr::var(n)
    }

    fn doms(names: &[&str], d: Domain) -> HashMap<VarName, Domain> {
        names.iter().map(|n| (VarName::from(*n), d.clone())).collect()
    }

    #[test]
    fn commutative_sort() {
        let e = Expr::sum(vec![(1, v("y")), (1, v("x"))], 0);
        assert_eq!(normalize(&e), Expr::sum(vec![(1, v("x")), (1, v("y"))], 0));
        assert_eq!(normalize(&Expr::eq(v("b"), v("a"))), Expr::eq(v("a"), v("b")));
    }

    #[test]
    fn renaming_invariant_key() {
        let d = doms(&["x", "y", "p", "q"], Domain::range(0, 3));
        let e1 = Expr::cmp(CmpOp::Neq, Expr::sum(vec![(1, v("x")), (2, v("y"))], 0), Expr::Int(3));
        let e2 = Expr::cmp(CmpOp::Neq, Expr::Int(3), Expr::sum(vec![(2, v("q")), (1, v("p"))], 0));
        let c1 = canonicalize(&e1, &d);
        let c2 = canonicalize(&e2, &d);
        assert_eq!(c1.key, c2.key);
        assert_eq!(c1.vars, vec![VarName::from("y"), VarName::from("x")]);
        assert_eq!(c2.vars, vec![VarName::from("q"), VarName::from("p")]);
    }

    #[test]
    fn domains_distinguish_keys() {
        let mut d = doms(&["x", "y"], Domain::range(0, 3));
        let e = Expr::cmp(CmpOp::Lt, v("x"), v("y"));
        let k1 = cache_key(&e, &d);
        d.insert(VarName::from("y"), Domain::range(0, 4));
        assert_ne!(k1, cache_key(&e, &d));
    }
}
