//! Reference brute-force semantics, written against the surface syntax so it
//! shares nothing with instantiation, simplification or the solver.

#![allow(dead_code)]

pub mod flat;

use std::cell::RefCell;
use std::collections::{BTreeSet, HashMap};
use std::path::PathBuf;

use autotab::parser::{
    parse_model, parse_params, BinOp, Func, Generator, ModelSource, ParamBinding, Quantifier,
    SDomain, SExpr, SKind, SRange, SSense, UnOp, Value,
};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn read_fixture(name: &str) -> String {
    std::fs::read_to_string(fixture(name)).unwrap()
}

/// A value during evaluation. `Pend` means "depends on an unassigned
/// variable"; `Undef` is an undefined integer.
#[derive(Clone, Debug, PartialEq)]
pub enum V {
    I(i64),
    B(bool),
    M(Vec<i64>, Vec<V>),
    Cell(usize),
    Pend,
    Undef,
}

#[derive(Clone, Debug)]
pub struct OVar {
    pub name: String,
    pub values: Vec<i64>,
}

/// A top-level constraint instance with its quantifier bindings.
#[derive(Clone, Debug)]
struct Inst {
    expr: SExpr,
    env: Vec<(String, V)>,
}

pub struct Oracle {
    pub vars: Vec<OVar>,
    globals: HashMap<String, V>,
    insts: Vec<Inst>,
    bools: Vec<bool>,
    /// Instances to check when each variable is assigned.
    watch: Vec<Vec<usize>>,
    /// Instances reading no variable.
    constant: Vec<usize>,
    pub objective: Option<(SSense, SExpr)>,
}

fn cell_name(base: &str, idx: &[i64]) -> String {
    let mut s = base.to_string();
    for i in idx {
        if *i < 0 {
            s.push_str(&format!("_n{}", -i));
        } else {
            s.push_str(&format!("_{i}"));
        }
    }
    s
}

struct Ev<'a> {
    globals: &'a HashMap<String, V>,
    asg: &'a [Option<i64>],
    bools: &'a [bool],
    /// Cells read during evaluation, when recording.
    touched: Option<RefCell<Vec<usize>>>,
}

fn as_int(v: &V) -> Option<i64> {
    match v {
        V::I(x) => Some(*x),
        V::B(b) => Some(*b as i64),
        _ => None,
    }
}

impl Ev<'_> {
    fn lookup(&self, env: &[(String, V)], name: &str) -> V {
        for (n, v) in env.iter().rev() {
            if n == name {
                return v.clone();
            }
        }
        self.globals.get(name).cloned().unwrap_or_else(|| panic!("unbound {name}"))
    }

    fn deref(&self, v: V) -> V {
        match v {
            V::Cell(i) => {
                if let Some(t) = &self.touched {
                    t.borrow_mut().push(i);
                }
                match self.asg[i] {
                    Some(x) if self.bools[i] => V::B(x != 0),
                    Some(x) => V::I(x),
                    None => V::Pend,
                }
            }
            V::M(idx, items) => V::M(idx, items.into_iter().map(|x| self.deref(x)).collect()),
            v => v,
        }
    }

    fn int(&self, e: &SExpr, env: &mut Vec<(String, V)>) -> V {
        let v = self.eval(e, env);
        match v {
            V::B(b) => V::I(b as i64),
            v => v,
        }
    }

    fn domain(&self, d: &SDomain, env: &mut Vec<(String, V)>) -> Vec<i64> {
        match d {
            SDomain::Bool => vec![0, 1],
            SDomain::Int(rs) => {
                let mut out = BTreeSet::new();
                for r in rs {
                    match r {
                        SRange::Single(e) => {
                            out.insert(as_int(&self.eval(e, env)).unwrap());
                        }
                        SRange::Span(a, b) => {
                            let (a, b) = (as_int(&self.eval(a, env)).unwrap(), as_int(&self.eval(b, env)).unwrap());
                            out.extend(a..=b);
                        }
                    }
                }
                out.into_iter().collect()
            }
            SDomain::Matrix(..) => panic!("matrix domain in generator"),
        }
    }

    /// Every binding produced by a generator list, in order.
    fn bindings(&self, gens: &[Generator], env: &mut Vec<(String, V)>, out: &mut Vec<Vec<(String, V)>>) {
        let Some((g, rest)) = gens.split_first() else {
            out.push(env.clone());
            return;
        };
        match g {
            Generator::Guard(e) => match self.eval(e, env) {
                V::B(true) => self.bindings(rest, env, out),
                V::B(false) => {}
                v => panic!("guard must be constant, got {v:?}"),
            },
            Generator::Range(names, d) => {
                let vals = self.domain(d, env);
                self.names(names, &vals, rest, env, out);
            }
        }
    }

    fn names(&self, names: &[String], vals: &[i64], rest: &[Generator], env: &mut Vec<(String, V)>, out: &mut Vec<Vec<(String, V)>>) {
        let Some((n, more)) = names.split_first() else {
            return self.bindings(rest, env, out);
        };
        for &v in vals {
            env.push((n.clone(), V::I(v)));
            self.names(more, vals, rest, env, out);
            env.pop();
        }
    }

    fn index(&self, m: V, idx: &[Option<V>]) -> V {
        let Some((first, rest)) = idx.split_first() else {
            return m;
        };
        let V::M(ixs, items) = m else { panic!("indexing a non-matrix") };
        match first {
            None => V::M(ixs, items.into_iter().map(|x| self.index(x, rest)).collect()),
            Some(V::Pend) => {
                // any cell could be selected
                self.deref(V::M(ixs, items));
                V::Pend
            }
            Some(i) => match as_int(i) {
                None => V::Undef,
                Some(i) => match ixs.iter().position(|&k| k == i) {
                    Some(p) => self.index(items[p].clone(), rest),
                    None => V::Undef,
                },
            },
        }
    }

    fn leaves(v: &V, out: &mut Vec<V>) {
        match v {
            V::M(_, items) => items.iter().for_each(|x| Self::leaves(x, out)),
            v => out.push(v.clone()),
        }
    }

    fn eval(&self, e: &SExpr, env: &mut Vec<(String, V)>) -> V {
        match &e.kind {
            SKind::Int(v) => V::I(*v),
            SKind::Bool(b) => V::B(*b),
            SKind::Ident(n) => self.deref(self.lookup(env, n)),
            SKind::Unary(op, a) => {
                let a = self.eval(a, env);
                match (op, a) {
                    (UnOp::Not, V::B(b)) => V::B(!b),
                    (UnOp::Not, _) => V::Pend,
                    (_, V::Pend) => V::Pend,
                    (_, V::Undef) => V::Undef,
                    (UnOp::Neg, a) => V::I(-as_int(&a).unwrap()),
                    (UnOp::Abs, a) => V::I(as_int(&a).unwrap().abs()),
                }
            }
            SKind::Binary(op, a, b) => self.binary(*op, a, b, env),
            SKind::Index(m, idx) => {
                // index the raw matrix so only the selected cells are read
                let m = match &m.kind {
                    SKind::Ident(n) => self.lookup(env, n),
                    _ => self.eval(m, env),
                };
                let idx: Vec<Option<V>> = idx.iter().map(|x| x.as_ref().map(|x| self.int(x, env))).collect();
                let v = self.index(m, &idx);
                self.deref(v)
            }
            SKind::MatrixLit(items) => {
                V::M((1..=items.len() as i64).collect(), items.iter().map(|x| self.eval(x, env)).collect())
            }
            SKind::Comprehension(body, gens) => {
                let mut bs = Vec::new();
                self.bindings(gens, env, &mut bs);
                let items: Vec<V> = bs
                    .into_iter()
                    .map(|mut b| self.eval(body, &mut b))
                    .collect();
                V::M((1..=items.len() as i64).collect(), items)
            }
            SKind::Call(f, args) => {
                let mut xs = Vec::new();
                for a in args {
                    Self::leaves(&self.eval(a, env), &mut xs);
                }
                match f {
                    Func::ToInt => match &xs[0] {
                        V::B(b) => V::I(*b as i64),
                        v => v.clone(),
                    },
                    Func::Sum => sum(xs),
                    Func::AllDiff => all_diff(&xs),
                }
            }
            SKind::Quant(q, gens, body) => {
                let mut bs = Vec::new();
                self.bindings(gens, env, &mut bs);
                let xs: Vec<V> = bs.into_iter().map(|mut b| self.eval(body, &mut b)).collect();
                match q {
                    Quantifier::ForAll => and(xs),
                    Quantifier::Exists => or(xs),
                    Quantifier::Sum => sum(xs),
                }
            }
            SKind::InSet(a, set) => {
                let a = self.int(a, env);
                let set: Vec<i64> = set.iter().map(|x| as_int(&self.eval(x, env)).unwrap()).collect();
                match a {
                    V::Pend => V::Pend,
                    V::Undef => V::B(false),
                    a => V::B(set.contains(&as_int(&a).unwrap())),
                }
            }
        }
    }

    fn binary(&self, op: BinOp, a: &SExpr, b: &SExpr, env: &mut Vec<(String, V)>) -> V {
        match op {
            BinOp::And => return and(vec![self.eval(a, env), self.eval(b, env)]),
            BinOp::Or => return or(vec![self.eval(a, env), self.eval(b, env)]),
            BinOp::Implies => {
                let x = match self.eval(a, env) {
                    V::B(x) => V::B(!x),
                    _ => V::Pend,
                };
                return or(vec![x, self.eval(b, env)]);
            }
            BinOp::Iff => {
                return match (self.eval(a, env), self.eval(b, env)) {
                    (V::B(x), V::B(y)) => V::B(x == y),
                    _ => V::Pend,
                }
            }
            _ => {}
        }
        let (x, y) = (self.int(a, env), self.int(b, env));
        if op.is_relational() {
            // undefined falsifies the relation whatever the other side is
            if x == V::Undef || y == V::Undef {
                return V::B(false);
            }
            if x == V::Pend || y == V::Pend {
                return V::Pend;
            }
            let (x, y) = (as_int(&x).unwrap(), as_int(&y).unwrap());
            return V::B(match op {
                BinOp::Eq => x == y,
                BinOp::Neq => x != y,
                BinOp::Lt => x < y,
                BinOp::Leq => x <= y,
                BinOp::Gt => x > y,
                _ => x >= y,
            });
        }
        if x == V::Undef || y == V::Undef {
            return V::Undef;
        }
        if x == V::Pend || y == V::Pend {
            return V::Pend;
        }
        let (x, y) = (as_int(&x).unwrap(), as_int(&y).unwrap());
        match op {
            BinOp::Add => V::I(x + y),
            BinOp::Sub => V::I(x - y),
            BinOp::Mul => V::I(x * y),
            BinOp::Div if y == 0 => V::Undef,
            BinOp::Div => V::I(x / y),
            BinOp::Mod if y == 0 => V::Undef,
            _ => V::I(x % y),
        }
    }
}

fn and(xs: Vec<V>) -> V {
    if xs.contains(&V::B(false)) {
        V::B(false)
    } else if xs.iter().all(|x| *x == V::B(true)) {
        V::B(true)
    } else {
        V::Pend
    }
}

fn or(xs: Vec<V>) -> V {
    if xs.contains(&V::B(true)) {
        V::B(true)
    } else if xs.iter().all(|x| *x == V::B(false)) {
        V::B(false)
    } else {
        V::Pend
    }
}

fn sum(xs: Vec<V>) -> V {
    let mut t = 0;
    let mut pend = false;
    for x in &xs {
        match x {
            V::Undef => return V::Undef,
            V::Pend => pend = true,
            x => t += as_int(x).unwrap(),
        }
    }
    if pend {
        V::Pend
    } else {
        V::I(t)
    }
}

fn all_diff(xs: &[V]) -> V {
    if xs.contains(&V::Undef) {
        return V::B(false);
    }
    let known: Vec<i64> = xs.iter().filter_map(as_int).collect();
    let mut seen = BTreeSet::new();
    if known.iter().any(|v| !seen.insert(*v)) {
        return V::B(false);
    }
    if known.len() < xs.len() {
        V::Pend
    } else {
        V::B(true)
    }
}

fn param_value(v: &Value, dims: &[Vec<i64>]) -> V {
    match v {
        Value::Int(x) => V::I(*x),
        Value::Matrix(items) => {
            let (idx, rest) = match dims.split_first() {
                Some((d, rest)) => (d.clone(), rest),
                None => ((1..=items.len() as i64).collect(), &[][..]),
            };
            V::M(idx, items.iter().map(|x| param_value(x, rest)).collect())
        }
    }
}

impl Oracle {
    pub fn new(src: &ModelSource, params: &ParamBinding) -> Oracle {
        let mut globals = HashMap::new();
        let mut vars: Vec<OVar> = Vec::new();
        let mut bools = Vec::new();
        let asg: Vec<Option<i64>> = Vec::new();
        for d in &src.params {
            let ev = Ev { globals: &globals, asg: &asg, bools: &bools, touched: None };
            let dims: Vec<Vec<i64>> = match &d.domain {
                SDomain::Matrix(idx, _) => idx.iter().map(|x| ev.domain(x, &mut Vec::new())).collect(),
                _ => Vec::new(),
            };
            let v = param_value(&params[&d.name], &dims);
            globals.insert(d.name.clone(), v);
        }
        for c in &src.constants {
            let ev = Ev { globals: &globals, asg: &asg, bools: &bools, touched: None };
            let v = ev.eval(&c.value, &mut Vec::new());
            globals.insert(c.name.clone(), v);
        }
        for d in &src.vars {
            let ev = Ev { globals: &globals, asg: &asg, bools: &bools, touched: None };
            let (dims, elem) = match &d.domain {
                SDomain::Matrix(idx, elem) => {
                    (idx.iter().map(|x| ev.domain(x, &mut Vec::new())).collect::<Vec<_>>(), &**elem)
                }
                e => (Vec::new(), e),
            };
            let values = ev.domain(elem, &mut Vec::new());
            let is_bool = matches!(elem, SDomain::Bool);
            fn build(
                base: &str,
                dims: &[Vec<i64>],
                prefix: &mut Vec<i64>,
                values: &[i64],
                is_bool: bool,
                vars: &mut Vec<OVar>,
                bools: &mut Vec<bool>,
            ) -> V {
                match dims.split_first() {
                    None => {
                        vars.push(OVar { name: cell_name(base, prefix), values: values.to_vec() });
                        bools.push(is_bool);
                        V::Cell(vars.len() - 1)
                    }
                    Some((d, rest)) => {
                        let mut items = Vec::new();
                        for &i in d {
                            prefix.push(i);
                            items.push(build(base, rest, prefix, values, is_bool, vars, bools));
                            prefix.pop();
                        }
                        V::M(d.clone(), items)
                    }
                }
            }
            let v = build(&d.name, &dims, &mut Vec::new(), &values, is_bool, &mut vars, &mut bools);
            globals.insert(d.name.clone(), v);
        }
        let mut oracle = Oracle { vars, globals, insts: Vec::new(), bools, watch: Vec::new(), constant: Vec::new(), objective: src.objective.clone() };
        for c in &src.constraints {
            oracle.expand(c, &mut Vec::new());
        }
        oracle.watch = vec![Vec::new(); oracle.vars.len()];
        let none = vec![None; oracle.vars.len()];
        for (k, inst) in oracle.insts.iter().enumerate() {
            let ev = Ev { globals: &oracle.globals, asg: &none, bools: &oracle.bools, touched: Some(RefCell::new(Vec::new())) };
            ev.eval(&inst.expr, &mut inst.env.clone());
            let mut cells = ev.touched.unwrap().into_inner();
            cells.sort_unstable();
            cells.dedup();
            // allDiff can fail early; everything else is checked once complete
            let partial = matches!(inst.expr.kind, SKind::Call(Func::AllDiff, _));
            if partial {
                for c in cells {
                    oracle.watch[c].push(k);
                }
            } else if let Some(&last) = cells.last() {
                oracle.watch[last].push(k);
            } else {
                oracle.constant.push(k);
            }
        }
        oracle
    }

    fn expand(&mut self, e: &SExpr, env: &mut Vec<(String, V)>) {
        match &e.kind {
            SKind::Binary(BinOp::And, a, b) => {
                self.expand(a, env);
                self.expand(b, env);
            }
            SKind::Quant(Quantifier::ForAll, gens, body) => {
                let asg = vec![None; self.vars.len()];
                let ev = Ev { globals: &self.globals, asg: &asg, bools: &self.bools, touched: None };
                let mut bs = Vec::new();
                ev.bindings(gens, env, &mut bs);
                for mut b in bs {
                    self.expand(body, &mut b);
                }
            }
            _ => self.insts.push(Inst { expr: e.clone(), env: env.clone() }),
        }
    }

    fn check(&self, i: usize, asg: &[Option<i64>]) -> V {
        let ev = Ev { globals: &self.globals, asg, bools: &self.bools, touched: None };
        let inst = &self.insts[i];
        ev.eval(&inst.expr, &mut inst.env.clone())
    }

    pub fn objective_value(&self, asg: &[i64]) -> Option<i64> {
        let (_, e) = self.objective.as_ref()?;
        let asg: Vec<Option<i64>> = asg.iter().map(|&v| Some(v)).collect();
        let ev = Ev { globals: &self.globals, asg: &asg, bools: &self.bools, touched: None };
        as_int(&ev.eval(e, &mut Vec::new()))
    }

    /// Every satisfying assignment (objective ignored), each as
    /// `name=value` pairs in declaration order.
    pub fn solutions(&self) -> Vec<Vec<(String, i64)>> {
        let mut out = Vec::new();
        let mut asg = vec![None; self.vars.len()];
        let mut settled = vec![false; self.insts.len()];
        self.dfs(0, &mut asg, &mut settled, &mut out);
        out
    }

    fn consistent(&self, asg: &[Option<i64>], which: &[usize], settled: &mut [bool], newly: &mut Vec<usize>) -> bool {
        for &i in which {
            if settled[i] {
                continue;
            }
            match self.check(i, asg) {
                V::B(false) => return false,
                V::B(true) => {
                    settled[i] = true;
                    newly.push(i);
                }
                _ => {}
            }
        }
        true
    }

    fn dfs(&self, depth: usize, asg: &mut Vec<Option<i64>>, settled: &mut Vec<bool>, out: &mut Vec<Vec<(String, i64)>>) {
        let mut newly = Vec::new();
        let which = if depth == 0 {
            &self.constant
        } else {
            &self.watch[depth - 1]
        };
        let ok = self.consistent(asg, which, settled, &mut newly);
        if ok {
            if depth == self.vars.len() {
                assert!(settled.iter().all(|&s| s), "complete assignment left a constraint undecided");
                out.push(self.vars.iter().zip(asg.iter()).map(|(v, x)| (v.name.clone(), x.unwrap())).collect());
            } else {
                for &v in &self.vars[depth].values {
                    asg[depth] = Some(v);
                    self.dfs(depth + 1, asg, settled, out);
                }
                asg[depth] = None;
            }
        }
        for i in newly {
            settled[i] = false;
        }
    }
}

pub fn oracle_for(model: &str, param: Option<&str>) -> Oracle {
    let src = parse_model(&read_fixture(model)).unwrap();
    let params = param.map_or_else(ParamBinding::new, |p| parse_params(&read_fixture(p)).unwrap());
    Oracle::new(&src, &params)
}

/// Knight's tours over an `n`x`n` board from square `start`, enumerated by
/// following moves rather than by trying every value. Squares are numbered
/// `col + row * n`.
pub fn knight_tours(n: i64, start: i64) -> Vec<Vec<(String, i64)>> {
    fn go(n: i64, path: &mut Vec<i64>, seen: &mut Vec<bool>, out: &mut Vec<Vec<(String, i64)>>) {
        if path.len() as i64 == n * n {
            out.push(path.iter().enumerate().map(|(i, &s)| (format!("tour_{i}"), s)).collect());
            return;
        }
        let cur = *path.last().unwrap();
        let (c, r) = (cur % n, cur / n);
        for (dc, dr) in [(1, 2), (2, 1), (2, -1), (1, -2), (-1, -2), (-2, -1), (-2, 1), (-1, 2)] {
            let (c2, r2) = (c + dc, r + dr);
            if !(0..n).contains(&c2) || !(0..n).contains(&r2) {
                continue;
            }
            let s = c2 + r2 * n;
            if seen[s as usize] {
                continue;
            }
            seen[s as usize] = true;
            path.push(s);
            go(n, path, seen, out);
            path.pop();
            seen[s as usize] = false;
        }
    }
    let mut seen = vec![false; (n * n) as usize];
    seen[start as usize] = true;
    let mut out = Vec::new();
    go(n, &mut vec![start], &mut seen, &mut out);
    out.sort();
    out
}

/// Peaceable queens placements: every board over {empty, white, black}
/// where no white and black queen share a row, column or diagonal and the
/// armies have equal size.
pub fn peaceable_boards(n: i64) -> Vec<Vec<(String, i64)>> {
    fn attacks(a: (i64, i64), b: (i64, i64)) -> bool {
        a.0 == b.0 || a.1 == b.1 || a.0 + a.1 == b.0 + b.1 || a.0 - a.1 == b.0 - b.1
    }
    let cells: Vec<(i64, i64)> = (1..=n).flat_map(|i| (1..=n).map(move |j| (i, j))).collect();
    let mut out = Vec::new();
    let mut board = vec![0i64; cells.len()];
    fn go(k: usize, cells: &[(i64, i64)], board: &mut Vec<i64>, out: &mut Vec<Vec<(String, i64)>>) {
        if k == cells.len() {
            let white = board.iter().filter(|&&x| x == 1).count() as i64;
            let black = board.iter().filter(|&&x| x == 2).count() as i64;
            if white == black {
                let mut s: Vec<(String, i64)> = cells
                    .iter()
                    .zip(board.iter())
                    .map(|(&(i, j), &x)| (format!("b_{i}_{j}"), x))
                    .collect();
                s.push(("armySize".to_string(), white));
                out.push(s);
            }
            return;
        }
        for x in 0..3 {
            let clash = x != 0
                && (0..k).any(|p| board[p] != 0 && board[p] != x && attacks(cells[p], cells[k]));
            if !clash {
                board[k] = x;
                go(k + 1, cells, board, out);
            }
        }
        board[k] = 0;
    }
    go(0, &cells, &mut board, &mut out);
    out.sort();
    out
}

/// Loads, filters and tabulates a fixture with default settings.
pub fn tabulated(model: &str, param: Option<&str>) -> autotab::ast::Model {
    let m = autotab::cli::load(&fixture(model), param.map(fixture).as_deref(), true).unwrap();
    let (m, _) = autotab::tabulate::tabulate_pass(m, &Default::default(), &Default::default());
    m
}

/// All solutions found by the solver, sorted, auxiliaries already dropped.
pub fn solver_solutions(m: &autotab::ast::Model) -> Vec<Vec<(String, i64)>> {
    use autotab::solver::{solve, Mode, SolveOptions, Status};
    let r = solve(m, &SolveOptions::new(Mode::AllSolutions));
    assert!(matches!(r.stats.status, Status::AllSolutions | Status::Unsat));
    let mut out: Vec<Vec<(String, i64)>> = r
        .solutions
        .into_iter()
        .map(|s| s.into_iter().map(|(n, v)| (n.as_str().to_string(), v)).collect())
        .collect();
    out.sort();
    out
}

pub fn sorted(mut s: Vec<Vec<(String, i64)>>) -> Vec<Vec<(String, i64)>> {
    s.sort();
    s
}
