//! Backtracking solver used to count search nodes.
//!
//! Static variable order (declaration order), ascending values, d-way
//! branching, and propagation to a fixpoint after every decision.

mod domains;
mod eval;

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::ast::{is_total, simplify_constraint, simplify_map, CmpOp, Domain, Expr, Model, Sense, VarName};
use crate::table::Table;
use domains::{Layout, State};
use eval::{compile, int_bounds, tri, CExpr, Ctx, Tri};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    FirstSolution,
    AllSolutions,
    Optimize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Sat,
    Unsat,
    AllSolutions,
    OptimalFound,
    NodeBudgetExhausted,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Sat => "Sat",
            Status::Unsat => "Unsat",
            Status::AllSolutions => "AllSolutions",
            Status::OptimalFound => "OptimalFound",
            Status::NodeBudgetExhausted => "NodeBudgetExhausted",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchStats {
    pub nodes: u64,
    pub solutions: u64,
    pub status: Status,
    pub best_objective: Option<i64>,
}

impl fmt::Display for SearchStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "status={} nodes={} solutions={}", self.status.name(), self.nodes, self.solutions)?;
        if let Some(b) = self.best_objective {
            write!(f, " objective={b}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default)]
pub struct SolveOptions {
    pub mode: Option<Mode>,
    /// Stop after this many branching decisions.
    pub node_budget: Option<u64>,
    /// Randomizes the order in which queued propagators run.
    pub schedule_seed: Option<u64>,
}

impl SolveOptions {
    pub fn new(mode: Mode) -> Self {
        SolveOptions { mode: Some(mode), ..Default::default() }
    }
}

/// A full solution: every model variable (including deleted assigned ones,
/// excluding auxiliaries) in declaration order.
pub type Solution = Vec<(VarName, i64)>;

#[derive(Clone, Debug)]
pub struct SolveResult {
    pub stats: SearchStats,
    pub solutions: Vec<Solution>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strength {
    Gac,
    Bounds,
    AssignmentCheck,
}

enum Prop {
    Table { scope: Vec<Col>, table: Arc<Table>, residues: Vec<HashMap<i64, usize>> },
    AllDiff { items: Vec<Col> },
    Linear { terms: Vec<(i64, usize)>, constant: i64, rel: LinRel },
    /// A sum comparison whose terms include non-linear subexpressions.
    SumView { terms: Vec<(i64, View)>, neg: Vec<(i64, View)>, constant: i64, rel: LinRel },
    Generic { expr: CExpr, vars: Vec<usize> },
}

#[derive(Clone, Debug)]
enum View {
    Var(usize),
    /// The 0/1 value of `x = c`.
    Lit(usize, i64),
    Expr(CExpr, Vec<usize>),
}

#[derive(Clone, Copy, Debug)]
enum Col {
    Var(usize),
    Const(i64),
}

/// `sum + constant rel 0`
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum LinRel {
    Leq,
    Eq,
    Neq,
}

impl Prop {
    fn strength(&self) -> Strength {
        match self {
            Prop::Table { .. } | Prop::AllDiff { .. } => Strength::Gac,
            Prop::Linear { .. } | Prop::SumView { .. } => Strength::Bounds,
            Prop::Generic { .. } => Strength::AssignmentCheck,
        }
    }

    fn vars(&self) -> Vec<usize> {
        let cols = |cs: &[Col]| {
            let mut v: Vec<usize> = cs
                .iter()
                .filter_map(|c| match c {
                    Col::Var(i) => Some(*i),
                    Col::Const(_) => None,
                })
                .collect();
            v.sort_unstable();
            v.dedup();
            v
        };
        match self {
            Prop::Table { scope, .. } => cols(scope),
            Prop::AllDiff { items } => cols(items),
            Prop::Linear { terms, .. } => terms.iter().map(|t| t.1).collect(),
            Prop::SumView { terms, .. } => {
                let mut v = Vec::new();
                for (_, t) in terms {
                    match t {
                        View::Var(x) | View::Lit(x, _) => v.push(*x),
                        View::Expr(_, xs) => v.extend(xs),
                    }
                }
                v.sort_unstable();
                v.dedup();
                v
            }
            Prop::Generic { vars, .. } => vars.clone(),
        }
    }
}

fn linearize(e: &Expr, coef: i64, index: &HashMap<VarName, usize>, acc: &mut HashMap<usize, i64>, k: &mut i64) -> bool {
    match e {
        Expr::Int(v) => {
            *k += coef * v;
            true
        }
        Expr::Var(v) => {
            *acc.entry(index[v]).or_insert(0) += coef;
            true
        }
        Expr::Sum(terms, off) => {
            *k += coef * off;
            terms.iter().all(|t| linearize(&t.expr, coef * t.coef, index, acc, k))
        }
        Expr::Neg(a) => linearize(a, -coef, index, acc, k),
        _ => false,
    }
}

/// Like `linearize`, but total non-linear subterms become views.
fn split_views(
    e: &Expr,
    coef: i64,
    index: &HashMap<VarName, usize>,
    acc: &mut Vec<(i64, View)>,
    k: &mut i64,
) -> bool {
    match e {
        Expr::Int(v) => {
            *k += coef * v;
            true
        }
        Expr::Var(v) => {
            acc.push((coef, View::Var(index[v])));
            true
        }
        Expr::Sum(terms, off) => {
            *k += coef * off;
            terms.iter().all(|t| split_views(&t.expr, coef * t.coef, index, acc, k))
        }
        Expr::Neg(a) => split_views(a, -coef, index, acc, k),
        Expr::Cmp(CmpOp::Eq, a, b) if matches!((&**a, &**b), (Expr::Var(_), Expr::Int(_)) | (Expr::Int(_), Expr::Var(_))) => {
            let (x, c) = match (&**a, &**b) {
                (Expr::Var(x), Expr::Int(c)) | (Expr::Int(c), Expr::Var(x)) => (x, *c),
                _ => unreachable!(),
            };
            acc.push((coef, View::Lit(index[x], c)));
            true
        }
        _ if is_total(e) => {
            let c = compile(e, index);
            let mut vars = Vec::new();
            c.vars(&mut vars);
            acc.push((coef, View::Expr(c, vars)));
            true
        }
        _ => false,
    }
}

fn col(e: &Expr, index: &HashMap<VarName, usize>) -> Option<Col> {
    match e {
        Expr::Var(v) => Some(Col::Var(index[v])),
        Expr::Int(c) => Some(Col::Const(*c)),
        Expr::Bool(b) => Some(Col::Const(*b as i64)),
        _ => None,
    }
}

fn make_prop(e: &Expr, index: &HashMap<VarName, usize>) -> Prop {
    match e {
        Expr::Table(scope, t) => {
            if let Some(cols) = scope.iter().map(|s| col(s, index)).collect::<Option<Vec<_>>>() {
                let residues = vec![HashMap::new(); cols.len()];
                return Prop::Table { scope: cols, table: t.clone(), residues };
            }
        }
        Expr::AllDiff(items) => {
            if let Some(cols) = items.iter().map(|s| col(s, index)).collect::<Option<Vec<_>>>() {
                return Prop::AllDiff { items: cols };
            }
        }
        Expr::Cmp(op, a, b) if *op != CmpOp::Gt && *op != CmpOp::Geq => {
            let mut acc = HashMap::new();
            let mut k = 0i64;
            if linearize(a, 1, index, &mut acc, &mut k) && linearize(b, -1, index, &mut acc, &mut k) {
                let mut terms: Vec<(i64, usize)> =
                    acc.into_iter().filter(|&(_, c)| c != 0).map(|(v, c)| (c, v)).collect();
                terms.sort_by_key(|t| t.1);
                let (rel, constant) = match op {
                    CmpOp::Lt => (LinRel::Leq, k + 1),
                    CmpOp::Leq => (LinRel::Leq, k),
                    CmpOp::Eq => (LinRel::Eq, k),
                    _ => (LinRel::Neq, k),
                };
                return Prop::Linear { terms, constant, rel };
            }
            let is_sum = |x: &Expr| matches!(x, Expr::Sum(ts, _) if ts.len() > 1);
            if *op != CmpOp::Neq && (is_sum(a) || is_sum(b)) {
                let mut terms = Vec::new();
                let mut k = 0i64;
                if split_views(a, 1, index, &mut terms, &mut k) && split_views(b, -1, index, &mut terms, &mut k) {
                    let (rel, constant) = match op {
                        CmpOp::Lt => (LinRel::Leq, k + 1),
                        CmpOp::Leq => (LinRel::Leq, k),
                        _ => (LinRel::Eq, k),
                    };
                    let neg = terms.iter().map(|(c, t)| (-c, t.clone())).collect();
                    return Prop::SumView { terms, neg, constant, rel };
                }
            }
        }
        _ => {}
    }
    let expr = compile(e, index);
    let mut vars = Vec::new();
    expr.vars(&mut vars);
    vars.sort_unstable();
    Prop::Generic { expr, vars }
}

/// Outcome of one propagator run: `None` on wipeout, otherwise the
/// variables whose domains changed.
type Changed = Option<Vec<usize>>;

fn floor_div(a: i128, b: i128) -> i128 {
    let q = a / b;
    if (a % b != 0) && ((a < 0) != (b < 0)) {
        q - 1
    } else {
        q
    }
}

fn ceil_div(a: i128, b: i128) -> i128 {
    -floor_div(-a, b)
}

impl Prop {
    fn run(&mut self, l: &Layout, s: &mut State) -> Changed {
        match self {
            Prop::Table { scope, table, residues } => propagate_table_cols(scope, table, residues, l, s),
            Prop::AllDiff { items } => {
                let mut changed = Vec::new();
                loop {
                    let mut again = false;
                    for i in 0..items.len() {
                        let (v, own) = match items[i] {
                            Col::Const(c) => (c, None),
                            Col::Var(x) => match l.value(s, x) {
                                Some(v) => (v, Some(x)),
                                None => continue,
                            },
                        };
                        for (j, other) in items.iter().enumerate() {
                            if i == j {
                                continue;
                            }
                            match *other {
                                Col::Const(c) if c == v => return None,
                                Col::Const(_) => {}
                                // the same variable twice can never differ
                                Col::Var(y) if Some(y) == own => return None,
                                Col::Var(y) => {
                                    if l.remove(s, y, v) {
                                        if l.is_empty(s, y) {
                                            return None;
                                        }
                                        changed.push(y);
                                        again |= l.value(s, y).is_some();
                                    }
                                }
                            }
                        }
                    }
                    if !again {
                        break;
                    }
                }
                Some(changed)
            }
            Prop::Linear { terms, constant, rel } => {
                let terms = &*terms;
                match rel {
                    LinRel::Leq => linear_leq(terms, *constant, l, s),
                    LinRel::Eq => {
                        let mut changed = Vec::new();
                        let neg: Vec<(i64, usize)> = terms.iter().map(|&(c, v)| (-c, v)).collect();
                        loop {
                            let a = linear_leq(terms, *constant, l, s)?;
                            let b = linear_leq(&neg, -*constant, l, s)?;
                            if a.is_empty() && b.is_empty() {
                                break;
                            }
                            changed.extend(a);
                            changed.extend(b);
                        }
                        Some(changed)
                    }
                    LinRel::Neq => linear_neq(terms, *constant, l, s),
                }
            }
            Prop::SumView { terms, neg, constant, rel } => {
                let mut changed = Vec::new();
                loop {
                    let a = view_leq(terms, *constant, l, s)?;
                    let b = if *rel == LinRel::Eq { view_leq(neg, -*constant, l, s)? } else { Vec::new() };
                    if a.is_empty() && b.is_empty() {
                        break;
                    }
                    changed.extend(a);
                    changed.extend(b);
                }
                Some(changed)
            }
            Prop::Generic { expr, vars } => {
                let mut changed = Vec::new();
                loop {
                    let ctx = Ctx { layout: l, state: s, fixed: None };
                    match tri(expr, &ctx) {
                        Tri::False => return None,
                        Tri::True => return Some(changed),
                        Tri::Unknown => {}
                    }
                    let mut removals = Vec::new();
                    for &x in vars.iter() {
                        let values = l.values(s, x);
                        if values.len() <= 1 {
                            continue;
                        }
                        for v in values {
                            let ctx = Ctx { layout: l, state: s, fixed: Some((x, v)) };
                            if tri(expr, &ctx) == Tri::False {
                                removals.push((x, v));
                            }
                        }
                    }
                    if removals.is_empty() {
                        return Some(changed);
                    }
                    for (x, v) in removals {
                        l.remove(s, x, v);
                        if l.is_empty(s, x) {
                            return None;
                        }
                        changed.push(x);
                    }
                }
            }
        }
    }
}

fn term_bounds(c: i64, x: usize, l: &Layout, s: &State) -> (i128, i128) {
    let (a, b) = (l.min(s, x).unwrap() as i128 * c as i128, l.max(s, x).unwrap() as i128 * c as i128);
    (a.min(b), a.max(b))
}

/// Bounds propagation for `sum(c_i * x_i) + k <= 0`.
fn linear_leq(terms: &[(i64, usize)], k: i64, l: &Layout, s: &mut State) -> Changed {
    let mins: Vec<i128> = terms.iter().map(|&(c, x)| term_bounds(c, x, l, s).0).collect();
    let total: i128 = mins.iter().sum::<i128>() + k as i128;
    if total > 0 {
        return None;
    }
    let mut changed = Vec::new();
    for (i, &(c, x)) in terms.iter().enumerate() {
        // c * x <= -(total - mins[i])
        let room = -(total - mins[i]);
        let c = c as i128;
        let hit = if c > 0 {
            let hi = floor_div(room, c);
            l.clamp(s, x, i64::MIN, hi.clamp(i64::MIN as i128, i64::MAX as i128) as i64)
        } else {
            let lo = ceil_div(room, c);
            l.clamp(s, x, lo.clamp(i64::MIN as i128, i64::MAX as i128) as i64, i64::MAX)
        };
        if hit {
            if l.is_empty(s, x) {
                return None;
            }
            changed.push(x);
        }
    }
    Some(changed)
}

fn view_bounds(c: i64, t: &View, l: &Layout, s: &State, fixed: Option<(usize, i64)>) -> (i128, i128) {
    let (a, b) = match t {
        View::Var(x) => match fixed {
            Some((y, v)) if y == *x => (v as i128, v as i128),
            _ => (l.min(s, *x).unwrap() as i128, l.max(s, *x).unwrap() as i128),
        },
        View::Lit(x, k) => {
            let (has, single) = match fixed {
                Some((y, v)) if y == *x => (v == *k, true),
                _ => (l.contains(s, *x, *k), l.value(s, *x).is_some()),
            };
            match (has, single) {
                (false, _) => (0, 0),
                (true, true) => (1, 1),
                (true, false) => (0, 1),
            }
        }
        View::Expr(e, _) => int_bounds(e, &Ctx { layout: l, state: s, fixed }).expect("view is total"),
    };
    let c = c as i128;
    ((a * c).min(b * c), (a * c).max(b * c))
}

/// One bounds pass for `sum(c_i * t_i) + k <= 0` where terms may be views.
/// A view exceeding its room loses every literal that cannot bring it back
/// under.
fn view_leq(terms: &[(i64, View)], k: i64, l: &Layout, s: &mut State) -> Changed {
    let mins: Vec<i128> = terms.iter().map(|(c, t)| view_bounds(*c, t, l, s, None).0).collect();
    let total: i128 = mins.iter().sum::<i128>() + k as i128;
    if total > 0 {
        return None;
    }
    let mut changed = Vec::new();
    for (i, (c, t)) in terms.iter().enumerate() {
        let room = -(total - mins[i]);
        if view_bounds(*c, t, l, s, None).1 <= room {
            continue;
        }
        let vars = match t {
            View::Var(x) | View::Lit(x, _) => std::slice::from_ref(x),
            View::Expr(_, xs) => xs.as_slice(),
        };
        for &x in vars {
            let mut hit = false;
            for v in l.values(s, x) {
                if view_bounds(*c, t, l, s, Some((x, v))).0 > room {
                    l.remove(s, x, v);
                    hit = true;
                }
            }
            if hit {
                if l.is_empty(s, x) {
                    return None;
                }
                changed.push(x);
            }
        }
    }
    Some(changed)
}

/// `sum + k != 0`: checked when fixed; with one free variable the single
/// forbidden value is removed only when it is a bound of that domain.
fn linear_neq(terms: &[(i64, usize)], k: i64, l: &Layout, s: &mut State) -> Changed {
    let mut free = None;
    let mut rest = k as i128;
    for &(c, x) in terms {
        match l.value(s, x) {
            Some(v) => rest += c as i128 * v as i128,
            None => {
                if free.is_some() {
                    return Some(Vec::new());
                }
                free = Some((c, x));
            }
        }
    }
    match free {
        None => (rest != 0).then(Vec::new),
        Some((c, x)) => {
            let c = c as i128;
            if rest % c != 0 {
                return Some(Vec::new());
            }
            let v = (-rest / c) as i64;
            if (l.min(s, x) == Some(v) || l.max(s, x) == Some(v)) && l.remove(s, x, v) {
                if l.is_empty(s, x) {
                    return None;
                }
                return Some(vec![x]);
            }
            Some(Vec::new())
        }
    }
}

fn tuple_valid(tup: &[i64], scope: &[Col], l: &Layout, s: &State) -> bool {
    scope.iter().zip(tup).all(|(c, &v)| match *c {
        Col::Var(x) => l.contains(s, x, v),
        Col::Const(k) => k == v,
    })
}

fn propagate_table_cols(
    scope: &[Col],
    table: &Table,
    residues: &mut [HashMap<i64, usize>],
    l: &Layout,
    s: &mut State,
) -> Changed {
    let tuples = table.tuples();
    // literals still needing a support
    let mut pending: Vec<Vec<i64>> = Vec::with_capacity(scope.len());
    for (k, c) in scope.iter().enumerate() {
        let mut need = Vec::new();
        if let Col::Var(x) = *c {
            for v in l.values(s, x) {
                match residues[k].get(&v) {
                    Some(&t) if tuple_valid(&tuples[t], scope, l, s) => {}
                    _ => need.push(v),
                }
            }
        }
        pending.push(need);
    }
    let mut remaining: usize = pending.iter().map(Vec::len).sum();
    if remaining > 0 {
        for (ti, tup) in tuples.iter().enumerate() {
            if !tuple_valid(tup, scope, l, s) {
                continue;
            }
            for k in 0..scope.len() {
                if let Some(p) = pending[k].iter().position(|&v| v == tup[k]) {
                    pending[k].swap_remove(p);
                    residues[k].insert(tup[k], ti);
                    remaining -= 1;
                }
            }
            if remaining == 0 {
                break;
            }
        }
    } else if !scope.iter().any(|c| matches!(c, Col::Var(_))) && !tuples.iter().any(|t| tuple_valid(t, scope, l, s)) {
        return None;
    }
    let mut changed = Vec::new();
    for (k, c) in scope.iter().enumerate() {
        if let Col::Var(x) = *c {
            for &v in &pending[k] {
                l.remove(s, x, v);
                if !changed.contains(&x) {
                    changed.push(x);
                }
            }
            if l.is_empty(s, x) {
                return None;
            }
        }
    }
    Some(changed)
}

/// GAC on a table constraint: keeps exactly the values with a support among
/// the tuples consistent with `domains`. Returns `false` on wipeout.
pub fn propagate_table(t: &Table, domains: &mut [Domain]) -> bool {
    let refs: Vec<&Domain> = domains.iter().collect();
    let (l, mut s) = Layout::new(&refs);
    if domains.iter().any(Domain::is_empty) {
        return false;
    }
    let scope: Vec<Col> = (0..domains.len()).map(Col::Var).collect();
    let mut residues = vec![HashMap::new(); domains.len()];
    let ok = propagate_table_cols(&scope, t, &mut residues, &l, &mut s).is_some();
    for (i, d) in domains.iter_mut().enumerate() {
        *d = l.to_domain(&s, i);
    }
    ok && domains.iter().all(|d| !d.is_empty())
}

/// True iff every constraint of `m` holds under `assignment`.
pub fn verify_solution(m: &Model, assignment: &HashMap<VarName, i64>) -> bool {
    m.constraints.iter().all(|c| simplify_constraint(c, assignment).as_bool() == Some(true))
}

struct Search<'a> {
    model: &'a Model,
    names: Vec<VarName>,
    layout: Layout,
    props: Vec<Prop>,
    watchers: Vec<Vec<usize>>,
    mode: Mode,
    budget: Option<u64>,
    rng: Option<StdRng>,
    nodes: u64,
    solutions: Vec<Solution>,
    count: u64,
    best: Option<i64>,
    objective: Option<(Sense, Expr)>,
    bound_prop: Option<usize>,
    index: HashMap<VarName, usize>,
    stop: bool,
    exhausted: bool,
}

impl Search<'_> {
    fn propagate(&mut self, s: &mut State, seeds: Option<&[usize]>) -> bool {
        let n = self.props.len();
        let mut queued = vec![false; n];
        let mut queue: VecDeque<usize> = VecDeque::new();
        let push = |p: usize, queue: &mut VecDeque<usize>, queued: &mut Vec<bool>| {
            if !queued[p] {
                queued[p] = true;
                queue.push_back(p);
            }
        };
        match seeds {
            None => (0..n).for_each(|p| push(p, &mut queue, &mut queued)),
            Some(vars) => {
                for &v in vars {
                    for &p in &self.watchers[v] {
                        push(p, &mut queue, &mut queued);
                    }
                }
            }
        }
        loop {
            let p = match &mut self.rng {
                Some(rng) if !queue.is_empty() => {
                    let k = rng.gen_range(0..queue.len());
                    queue.remove(k)
                }
                _ => queue.pop_front(),
            };
            let Some(p) = p else { return true };
            queued[p] = false;
            match self.props[p].run(&self.layout, s) {
                None => return false,
                Some(changed) => {
                    for v in changed {
                        for &q in &self.watchers[v] {
                            push(q, &mut queue, &mut queued);
                        }
                    }
                }
            }
        }
    }

    fn record(&mut self, s: &State) {
        let values: HashMap<VarName, i64> = self
            .names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), self.layout.value(s, i).unwrap()))
            .collect();
        debug_assert!(verify_solution(self.model, &values));
        self.count += 1;
        if let Some((sense, obj)) = &self.objective {
            if self.mode == Mode::Optimize {
                let f = simplify_map(obj, &values).as_int().expect("objective must be defined");
                self.best = Some(f);
                let op = match sense {
                    Sense::Minimise => CmpOp::Lt,
                    Sense::Maximise => CmpOp::Gt,
                };
                let bound = Expr::cmp(op, obj.clone(), Expr::Int(f));
                let bound = crate::ast::simplify(&bound);
                let p = self.bound_prop.unwrap();
                self.props[p] = make_prop(&bound, &self.index);
                self.solutions.clear();
            }
        }
        self.solutions.push(self.model.full_solution(&values));
        if self.mode == Mode::FirstSolution {
            self.stop = true;
        }
    }

    fn dfs(&mut self, s: State) {
        let Some(x) = (0..self.names.len()).find(|&i| self.layout.value(&s, i).is_none()) else {
            self.record(&s);
            return;
        };
        for v in self.layout.values(&s, x) {
            if self.stop {
                return;
            }
            if let Some(b) = self.budget {
                if self.nodes >= b {
                    self.stop = true;
                    self.exhausted = true;
                    return;
                }
            }
            self.nodes += 1;
            let mut child = s.clone();
            self.layout.assign(&mut child, x, v);
            let mut seeds = vec![x];
            if let Some(p) = self.bound_prop {
                // the objective bound may have tightened since the parent
                seeds.extend(self.props[p].vars());
                if self.props[p].run(&self.layout, &mut child).is_none() {
                    continue;
                }
            }
            if self.propagate(&mut child, Some(&seeds)) {
                self.dfs(child);
            }
        }
    }
}

/// Solves `m`. Solutions are full assignments of the non-auxiliary
/// variables, assigned variables re-attached.
pub fn solve(m: &Model, opts: &SolveOptions) -> SolveResult {
    let mut mode = opts.mode.unwrap_or(Mode::FirstSolution);
    if mode == Mode::Optimize && m.objective.is_none() {
        mode = Mode::FirstSolution;
    }
    let mut vars: Vec<_> = m.variables().iter().collect();
    vars.sort_by_key(|v| v.position);
    let names: Vec<VarName> = vars.iter().map(|v| v.name.clone()).collect();
    let index: HashMap<VarName, usize> = names.iter().cloned().enumerate().map(|(i, n)| (n, i)).collect();
    let doms: Vec<&Domain> = vars.iter().map(|v| &v.domain).collect();
    let (layout, state) = Layout::new(&doms);

    let mut props: Vec<Prop> = m.constraints.iter().map(|c| make_prop(c, &index)).collect();
    let objective = m.objective.as_ref().map(|o| (o.sense, o.expr.clone()));
    let bound_prop = if mode == Mode::Optimize && objective.is_some() {
        props.push(make_prop(&Expr::Bool(true), &index));
        Some(props.len() - 1)
    } else {
        None
    };
    let mut watchers = vec![Vec::new(); names.len()];
    for (p, prop) in props.iter().enumerate() {
        for v in prop.vars() {
            watchers[v].push(p);
        }
    }
    if let (Some(p), Some((_, obj))) = (bound_prop, &objective) {
        for v in crate::ast::scope(obj) {
            watchers[index[&v]].push(p);
        }
    }
    let mut search = Search {
        model: m,
        names,
        layout,
        props,
        watchers,
        mode,
        budget: opts.node_budget,
        rng: opts.schedule_seed.map(StdRng::seed_from_u64),
        nodes: 0,
        solutions: Vec::new(),
        count: 0,
        best: None,
        objective,
        bound_prop,
        index,
        stop: false,
        exhausted: false,
    };
    let mut root = state;
    let empty = (0..search.names.len()).any(|i| search.layout.is_empty(&root, i));
    if !empty && search.propagate(&mut root, None) {
        search.dfs(root);
    }
    let status = if search.exhausted {
        Status::NodeBudgetExhausted
    } else if search.count == 0 {
        Status::Unsat
    } else {
        match mode {
            Mode::FirstSolution => Status::Sat,
            Mode::AllSolutions => Status::AllSolutions,
            Mode::Optimize => Status::OptimalFound,
        }
    };
    SolveResult {
        stats: SearchStats { nodes: search.nodes, solutions: search.count, status, best_objective: search.best },
        solutions: search.solutions,
    }
}

/// Final domains after root propagation, or `None` on wipeout. Exposed for
/// checking that propagation is independent of scheduling order.
pub fn root_domains(m: &Model, schedule_seed: Option<u64>) -> Option<Vec<(VarName, Domain)>> {
    let mut vars: Vec<_> = m.variables().iter().collect();
    vars.sort_by_key(|v| v.position);
    let names: Vec<VarName> = vars.iter().map(|v| v.name.clone()).collect();
    let index: HashMap<VarName, usize> = names.iter().cloned().enumerate().map(|(i, n)| (n, i)).collect();
    let doms: Vec<&Domain> = vars.iter().map(|v| &v.domain).collect();
    let (layout, mut state) = Layout::new(&doms);
    let props: Vec<Prop> = m.constraints.iter().map(|c| make_prop(c, &index)).collect();
    let mut watchers = vec![Vec::new(); names.len()];
    for (p, prop) in props.iter().enumerate() {
        for v in prop.vars() {
            watchers[v].push(p);
        }
    }
    let mut search = Search {
        model: m,
        names: names.clone(),
        layout,
        props,
        watchers,
        mode: Mode::FirstSolution,
        budget: None,
        rng: schedule_seed.map(StdRng::seed_from_u64),
        nodes: 0,
        solutions: Vec::new(),
        count: 0,
        best: None,
        objective: None,
        bound_prop: None,
        index,
        stop: false,
        exhausted: false,
    };
    if !search.propagate(&mut state, None) {
        return None;
    }
    Some(names.into_iter().enumerate().map(|(i, n)| (n, search.layout.to_domain(&state, i))).collect())
}

/// Declared strength of the propagator each constraint of `m` receives.
pub fn propagator_strengths(m: &Model) -> Vec<Strength> {
    let index: HashMap<VarName, usize> =
        m.variables().iter().enumerate().map(|(i, v)| (v.name.clone(), i)).collect();
    m.constraints.iter().map(|c| make_prop(c, &index).strength()).collect()
}
