//! Random flat expressions and a direct evaluator for them.

use std::collections::HashMap;
use std::sync::Arc;

use autotab::ast::{CmpOp, Domain, Expr, Term, VarName};
use autotab::table::Table;
use proptest::prelude::*;

pub const NAMES: [&str; 3] = ["x", "y", "z"];

/// Value of `e`, `None` when undefined. Relations and membership tests over
/// an undefined operand are false; connectives only see defined values.
pub fn eval(e: &Expr, a: &HashMap<VarName, i64>) -> Option<i64> {
    let b = |x: bool| Some(x as i64);
    let truth = |x: &Expr| eval(x, a).map(|v| v != 0).unwrap_or(false);
    match e {
        Expr::Int(v) => Some(*v),
        Expr::Bool(v) => b(*v),
        Expr::Var(n) => Some(a[n]),
        Expr::Sum(ts, off) => {
            let mut s = *off;
            for t in ts {
                s = s.checked_add(t.coef.checked_mul(eval(&t.expr, a)?)?)?;
            }
            Some(s)
        }
        Expr::Product(xs) => xs.iter().try_fold(1i64, |p, x| p.checked_mul(eval(x, a)?)),
        Expr::Div(x, y) => {
            let (x, y) = (eval(x, a)?, eval(y, a)?);
            if y == 0 { None } else { Some(x / y) }
        }
        Expr::Mod(x, y) => {
            let (x, y) = (eval(x, a)?, eval(y, a)?);
            if y == 0 { None } else { Some(x % y) }
        }
        Expr::Abs(x) => Some(eval(x, a)?.abs()),
        Expr::Neg(x) => Some(-eval(x, a)?),
        Expr::Cmp(op, x, y) => match (eval(x, a), eval(y, a)) {
            (Some(x), Some(y)) => b(op.holds(x, y)),
            _ => b(false),
        },
        Expr::And(xs) => b(xs.iter().all(truth)),
        Expr::Or(xs) => b(xs.iter().any(truth)),
        Expr::Not(x) => b(!truth(x)),
        Expr::Implies(x, y) => b(!truth(x) || truth(y)),
        Expr::Iff(x, y) => b(truth(x) == truth(y)),
        Expr::AllDiff(xs) => {
            let vs: Option<Vec<i64>> = xs.iter().map(|x| eval(x, a)).collect();
            match vs {
                Some(vs) => b((0..vs.len()).all(|i| (i + 1..vs.len()).all(|j| vs[i] != vs[j]))),
                None => b(false),
            }
        }
        Expr::Element(arr, idx) => {
            let i = eval(idx, a)?;
            let x = arr.get(usize::try_from(i).ok()?)?;
            eval(x, a)
        }
        Expr::InSet(x, set) => b(eval(x, a).is_some_and(|v| set.contains(&v))),
        Expr::Table(scope, t) => {
            let vs: Option<Vec<i64>> = scope.iter().map(|x| eval(x, a)).collect();
            b(vs.is_some_and(|vs| t.contains(&vs)))
        }
    }
}

/// Every total assignment of `vars` over `doms`, in odometer order.
pub fn assignments(vars: &[VarName], doms: &HashMap<VarName, Domain>) -> Vec<HashMap<VarName, i64>> {
    let mut out = vec![HashMap::new()];
    for v in vars {
        let mut next = Vec::new();
        for a in &out {
            for &x in doms[v].values() {
                let mut a = a.clone();
                a.insert(v.clone(), x);
                next.push(a);
            }
        }
        out = next;
    }
    out
}

/// Truth of a Boolean expression under every assignment of `vars`.
pub fn truth_table(e: &Expr, vars: &[VarName], doms: &HashMap<VarName, Domain>) -> Vec<bool> {
    assignments(vars, doms).iter().map(|a| eval(e, a).is_some_and(|v| v != 0)).collect()
}

fn var() -> impl Strategy<Value = Expr> {
    prop::sample::select(&NAMES[..]).prop_map(Expr::var)
}

pub fn int_expr(depth: u32) -> BoxedStrategy<Expr> {
    let leaf = prop_oneof![3 => var(), 1 => (-3i64..=3).prop_map(Expr::Int)];
    if depth == 0 {
        return leaf.boxed();
    }
    let sub = int_expr(depth - 1);
    let coef = prop_oneof![Just(1i64), Just(-1), Just(2), Just(-2), Just(3)];
    prop_oneof![
        3 => leaf,
        3 => (prop::collection::vec((coef, sub.clone()), 1..=3), -3i64..=3)
            .prop_map(|(ts, off)| Expr::Sum(ts.into_iter().map(|(coef, expr)| Term { coef, expr }).collect(), off)),
        1 => prop::collection::vec(sub.clone(), 2..=2).prop_map(Expr::Product),
        1 => (sub.clone(), sub.clone()).prop_map(|(a, b)| Expr::div(a, b)),
        1 => (sub.clone(), sub.clone()).prop_map(|(a, b)| Expr::modulo(a, b)),
        1 => sub.clone().prop_map(Expr::abs),
        1 => sub.clone().prop_map(|a| Expr::Neg(Box::new(a))),
        1 => (prop::collection::vec((-3i64..=3).prop_map(Expr::Int), 2..=4), sub)
            .prop_map(|(arr, i)| Expr::Element(arr, Box::new(i))),
    ]
    .boxed()
}

fn op() -> impl Strategy<Value = CmpOp> {
    prop::sample::select(vec![CmpOp::Eq, CmpOp::Neq, CmpOp::Lt, CmpOp::Leq, CmpOp::Gt, CmpOp::Geq])
}

fn small_table() -> impl Strategy<Value = Expr> {
    (prop::sample::subsequence(NAMES.to_vec(), 1..=2), prop::collection::vec(prop::collection::vec(-1i64..=2, 2), 0..6))
        .prop_map(|(scope, tuples)| {
            let k = scope.len();
            let tuples = tuples.into_iter().map(|t| t[..k].to_vec()).collect();
            Expr::Table(scope.into_iter().map(Expr::var).collect(), Arc::new(Table::new(k, tuples)))
        })
}

pub fn bool_expr(depth: u32) -> BoxedStrategy<Expr> {
    let int = int_expr(depth.min(2));
    let atom = prop_oneof![
        6 => (op(), int.clone(), int.clone()).prop_map(|(o, a, b)| Expr::cmp(o, a, b)),
        1 => (int.clone(), prop::collection::btree_set(-2i64..=3, 1..=3))
            .prop_map(|(a, s)| Expr::InSet(Box::new(a), s.into_iter().collect())),
        1 => prop::collection::vec(int, 2..=3).prop_map(Expr::AllDiff),
        1 => small_table(),
    ];
    if depth == 0 {
        return atom.boxed();
    }
    let sub = bool_expr(depth - 1);
    prop_oneof![
        3 => atom,
        2 => prop::collection::vec(sub.clone(), 2..=3).prop_map(Expr::And),
        2 => prop::collection::vec(sub.clone(), 2..=3).prop_map(Expr::Or),
        1 => sub.clone().prop_map(Expr::not),
        1 => (sub.clone(), sub.clone()).prop_map(|(a, b)| Expr::implies(a, b)),
        1 => (sub.clone(), sub).prop_map(|(a, b)| Expr::Iff(Box::new(a), Box::new(b))),
    ]
    .boxed()
}

/// Domains for `x`, `y`, `z`, drawn from a few shapes so that some keys
/// differ only by domain.
pub fn domains() -> impl Strategy<Value = HashMap<VarName, Domain>> {
    let dom = prop::sample::select(vec![
        Domain::range(-2, 3),
        Domain::range(0, 4),
        Domain::new(vec![-1, 0, 2, 5]),
        Domain::range(1, 3),
    ]);
    [dom.clone(), dom.clone(), dom].prop_map(|ds| NAMES.iter().map(|n| VarName::from(*n)).zip(ds).collect())
}

/// Reorders the children of every commutative node, using `seed` to pick
/// the permutation at each node.
pub fn shuffle(e: &Expr, seed: &mut u64) -> Expr {
    fn next(seed: &mut u64) -> u64 {
        *seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        *seed >> 33
    }
    fn perm<T>(mut xs: Vec<T>, seed: &mut u64) -> Vec<T> {
        for i in (1..xs.len()).rev() {
            let j = (next(seed) % (i as u64 + 1)) as usize;
            xs.swap(i, j);
        }
        xs
    }
    let bx = |x: &Expr, seed: &mut u64| Box::new(shuffle(x, seed));
    match e {
        Expr::Sum(ts, off) => {
            let ts = ts.iter().map(|t| Term { coef: t.coef, expr: shuffle(&t.expr, seed) }).collect();
            Expr::Sum(perm(ts, seed), *off)
        }
        Expr::Product(xs) => Expr::Product(perm(xs.iter().map(|x| shuffle(x, seed)).collect(), seed)),
        Expr::And(xs) => Expr::And(perm(xs.iter().map(|x| shuffle(x, seed)).collect(), seed)),
        Expr::Or(xs) => Expr::Or(perm(xs.iter().map(|x| shuffle(x, seed)).collect(), seed)),
        Expr::AllDiff(xs) => Expr::AllDiff(perm(xs.iter().map(|x| shuffle(x, seed)).collect(), seed)),
        Expr::Cmp(op, a, b) => {
            let (a, b) = (bx(a, seed), bx(b, seed));
            if op.is_commutative() && next(seed).is_multiple_of(2) {
                Expr::Cmp(*op, b, a)
            } else {
                Expr::Cmp(*op, a, b)
            }
        }
        Expr::Iff(a, b) => {
            let (a, b) = (bx(a, seed), bx(b, seed));
            if next(seed).is_multiple_of(2) { Expr::Iff(b, a) } else { Expr::Iff(a, b) }
        }
        Expr::Div(a, b) => Expr::Div(bx(a, seed), bx(b, seed)),
        Expr::Mod(a, b) => Expr::Mod(bx(a, seed), bx(b, seed)),
        Expr::Abs(a) => Expr::Abs(bx(a, seed)),
        Expr::Neg(a) => Expr::Neg(bx(a, seed)),
        Expr::Not(a) => Expr::Not(bx(a, seed)),
        Expr::Implies(a, b) => Expr::Implies(bx(a, seed), bx(b, seed)),
        Expr::Element(arr, i) => Expr::Element(arr.iter().map(|x| shuffle(x, seed)).collect(), bx(i, seed)),
        Expr::InSet(a, s) => Expr::InSet(bx(a, seed), s.clone()),
        Expr::Table(scope, t) => Expr::Table(scope.iter().map(|x| shuffle(x, seed)).collect(), t.clone()),
        leaf => leaf.clone(),
    }
}

/// Renames `x`, `y`, `z` through `perm` to `p`, `q`, `r`, carrying the
/// domains along.
pub fn rename(
    e: &Expr,
    doms: &HashMap<VarName, Domain>,
    perm: &[usize],
) -> (Expr, HashMap<VarName, Domain>) {
    const TO: [&str; 3] = ["p", "q", "r"];
    let map: HashMap<VarName, VarName> =
        NAMES.iter().enumerate().map(|(i, n)| (VarName::from(*n), VarName::from(TO[perm[i]]))).collect();
    let e = e.map_vars(&|v| Expr::Var(map[v].clone()));
    let d = doms.iter().map(|(k, v)| (map[k].clone(), v.clone())).collect();
    (e, d)
}

/// Variables whose value can change the truth of `e`, with the truth
/// table over just those (the others held at their smallest value).
fn relevant(e: &Expr, d: &HashMap<VarName, Domain>) -> (Vec<VarName>, Vec<bool>) {
    let vars = autotab::ast::scope(e);
    let holds = |a: &HashMap<VarName, i64>| eval(e, a).is_some_and(|v| v != 0);
    let rel: Vec<VarName> = vars
        .iter()
        .filter(|v| {
            assignments(&vars, d).iter().any(|a| {
                d[*v].values().iter().any(|&x| {
                    let mut b = a.clone();
                    b.insert((*v).clone(), x);
                    holds(&b) != holds(a)
                })
            })
        })
        .cloned()
        .collect();
    let table = assignments(&rel, d)
        .into_iter()
        .map(|mut a| {
            for v in &vars {
                a.entry(v.clone()).or_insert(d[v].values()[0]);
            }
            holds(&a)
        })
        .collect();
    (rel, table)
}

/// True when the two Boolean expressions denote the same relation over
/// their relevant variables, up to a domain-preserving bijection.
pub fn equivalent_up_to_renaming(
    a: &Expr,
    da: &HashMap<VarName, Domain>,
    b: &Expr,
    db: &HashMap<VarName, Domain>,
) -> bool {
    let (va, ta) = relevant(a, da);
    let (vb, _) = relevant(b, db);
    if va.len() != vb.len() {
        return false;
    }
    let k = va.len();
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        if (0..k).all(|i| da[&va[i]] == db[&vb[idx[i]]]) {
            // present b's relevant variables in the order matching a's
            let order: Vec<VarName> = (0..k).map(|i| vb[idx[i]].clone()).collect();
            let vars = autotab::ast::scope(b);
            let tb: Vec<bool> = assignments(&order, db)
                .into_iter()
                .map(|mut x| {
                    for v in &vars {
                        x.entry(v.clone()).or_insert(db[v].values()[0]);
                    }
                    eval(b, &x).is_some_and(|v| v != 0)
                })
                .collect();
            if ta == tb {
                return true;
            }
        }
        if !next_permutation(&mut idx) {
            return false;
        }
    }
}

fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}
