//! Table generation with progress checks, result caches and the model
//! rewrites that install tables.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use crate::ast::{
    canonicalize, normalize, scope, simplify_constraint, CacheKey, Domain, DomainLookup, Expr, Model,
    VarName, Variable, WithVar,
};
use crate::heuristics::{
    aux_domain, scan_integer_exprs, scan_nested_bool, scan_top_level, Candidate, CandidateKind,
    HeuristicConfig, AUX_PLACEHOLDER,
};
use crate::table::Table;

/// Sentinel for an assignment space too large to represent.
pub const HUGE: u128 = i64::MAX as u128;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TabLimits {
    pub node_limit: u64,
}

impl Default for TabLimits {
    fn default() -> Self {
        TabLimits { node_limit: 100_000 }
    }
}

impl TabLimits {
    /// Progress checks happen after 1000 and 10000 nodes, then every 10000.
    pub fn is_checkpoint(nodes: u64) -> bool {
        nodes == 1000 || (nodes >= 10_000 && nodes.is_multiple_of(10_000))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TabResult {
    Success(Arc<Table>),
    CacheHit(Arc<Table>),
    /// The search fell behind: `c * node_limit < nodes * a` at a checkpoint.
    AbandonedProgress { nodes: u64, c: u128, a: u128 },
    AbandonedNodeLimit,
    RejectedNestedSize { a: u128 },
    /// An earlier search for an equivalent expression failed.
    KnownFailure,
}

impl TabResult {
    pub fn table(&self) -> Option<&Arc<Table>> {
        match self {
            TabResult::Success(t) | TabResult::CacheHit(t) => Some(t),
            _ => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            TabResult::Success(_) => "tabulated",
            TabResult::CacheHit(_) => "cache-hit",
            TabResult::AbandonedProgress { .. } => "abandoned-at-check",
            TabResult::AbandonedNodeLimit => "node-limit",
            TabResult::RejectedNestedSize { .. } => "rejected-nested-size",
            TabResult::KnownFailure => "failure-cache-hit",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TabOutcome {
    pub result: TabResult,
    pub nodes: u64,
}

/// Product of domain sizes, saturating at [`HUGE`].
pub fn assignment_space(domains: &[&Domain]) -> u128 {
    domains
        .iter()
        .fold(1u128, |acc, d| acc.saturating_mul(d.len() as u128))
        .min(HUGE)
}

/// Mixed-radix rank of the partial assignment `values` completed with the
/// minimum of every remaining domain. `None` if a value is not in its
/// domain.
pub fn position_index(values: &[i64], domains: &[&Domain]) -> Option<u128> {
    let mut c: u128 = 0;
    for (i, d) in domains.iter().enumerate() {
        let rank = match values.get(i) {
            Some(&v) => d.rank(v)? as u128,
            None => 0,
        };
        c = c.saturating_mul(d.len() as u128).saturating_add(rank);
    }
    Some(c.min(HUGE))
}

/// Enumerates the satisfying assignments of the Boolean expression `e` over
/// `scope` (columns in that order) by depth-first search with ascending
/// values, pruning when `e` simplifies to false.
pub fn generate_table(
    e: &Expr,
    scope: &[VarName],
    dom: &dyn DomainLookup,
    limits: &TabLimits,
    nested_size_cap: bool,
) -> TabOutcome {
    let domains: Vec<&Domain> = scope
        .iter()
        .map(|v| dom.domain_of(v).expect("scope variable without domain"))
        .collect();
    let a = assignment_space(&domains);
    if nested_size_cap && a > limits.node_limit as u128 {
        return TabOutcome { result: TabResult::RejectedNestedSize { a }, nodes: 0 };
    }
    let mut search = Dfs {
        scope,
        domains: &domains,
        limits,
        a,
        nodes: 0,
        path: Vec::with_capacity(scope.len()),
        tuples: Vec::new(),
    };
    match search.run(0, e) {
        Ok(()) => TabOutcome {
            result: TabResult::Success(Arc::new(Table::from_sorted(scope.len(), search.tuples))),
            nodes: search.nodes,
        },
        Err(result) => TabOutcome { result, nodes: search.nodes },
    }
}

struct Dfs<'a> {
    scope: &'a [VarName],
    domains: &'a [&'a Domain],
    limits: &'a TabLimits,
    a: u128,
    nodes: u64,
    path: Vec<i64>,
    tuples: Vec<Vec<i64>>,
}

impl Dfs<'_> {
    fn run(&mut self, depth: usize, e: &Expr) -> Result<(), TabResult> {
        if depth == self.scope.len() {
            // already folded unless the scope was empty
            if simplify_constraint(e, &HashMap::new()).as_bool() == Some(true) {
                self.tuples.push(self.path.clone());
            }
            return Ok(());
        }
        for &v in self.domains[depth].values() {
            self.nodes += 1;
            if self.nodes > self.limits.node_limit {
                return Err(TabResult::AbandonedNodeLimit);
            }
            self.path.push(v);
            if TabLimits::is_checkpoint(self.nodes) {
                let c = position_index(&self.path, self.domains).unwrap();
                if c * (self.limits.node_limit as u128) < (self.nodes as u128) * self.a {
                    return Err(TabResult::AbandonedProgress { nodes: self.nodes, c, a: self.a });
                }
            }
            let sub = simplify_constraint(e, &HashMap::from([(self.scope[depth].clone(), v)]));
            if sub.as_bool() != Some(false) {
                self.run(depth + 1, &sub)?;
            }
            self.path.pop();
        }
        Ok(())
    }
}

/// Success and failure caches keyed by canonical form plus domains.
#[derive(Default)]
pub struct Caches {
    pub tables: HashMap<CacheKey, Arc<Table>>,
    pub failures: HashMap<CacheKey, TabResult>,
    /// Number of table searches actually run.
    pub searches: usize,
}

impl Caches {
    /// Tabulates `e` (after normalization) through the caches. On success the
    /// returned scope lists the original variables in table column order.
    pub fn tabulate(
        &mut self,
        e: &Expr,
        dom: &dyn DomainLookup,
        limits: &TabLimits,
        nested_size_cap: bool,
    ) -> (TabOutcome, Vec<VarName>) {
        let canon = canonicalize(e, dom);
        if let Some(t) = self.tables.get(&canon.key) {
            return (TabOutcome { result: TabResult::CacheHit(t.clone()), nodes: 0 }, canon.vars);
        }
        if self.failures.contains_key(&canon.key) {
            return (TabOutcome { result: TabResult::KnownFailure, nodes: 0 }, canon.vars);
        }
        let placeholders = scope(&canon.expr);
        let doms: HashMap<VarName, Domain> = placeholders
            .iter()
            .cloned()
            .zip(canon.key.domains.iter().cloned())
            .collect();
        self.searches += 1;
        let out = generate_table(&canon.expr, &placeholders, &doms, limits, nested_size_cap);
        match &out.result {
            TabResult::Success(t) => {
                self.tables.insert(canon.key, t.clone());
            }
            // the size cap depends on the context, not the expression
            TabResult::RejectedNestedSize { .. } => {}
            other => {
                self.failures.insert(canon.key, other.clone());
            }
        }
        (out, canon.vars)
    }
}

/// What happened to one candidate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TabulationReport {
    pub kind: CandidateKind,
    /// Heuristic with context suffix.
    pub heuristic: String,
    pub target: String,
    pub outcome: String,
    pub nodes: u64,
    pub table_size: Option<usize>,
    pub scope: Vec<VarName>,
    /// `(nodes, C, A)` when abandoned by a progress check.
    pub progress: Option<(u64, u128, u128)>,
}

impl fmt::Display for TabulationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let scope: Vec<&str> = self.scope.iter().map(VarName::as_str).collect();
        write!(
            f,
            "heuristic={} outcome={} nodes={} scope={}",
            self.heuristic,
            self.outcome,
            self.nodes,
            scope.join(",")
        )?;
        if let Some(n) = self.table_size {
            write!(f, " tuples={n}")?;
        }
        if let Some((n, c, a)) = self.progress {
            write!(f, " check_nodes={n} C={c} A={a}")?;
        }
        write!(f, " target={}", self.target)
    }
}

fn report(c: &Candidate, out: &TabOutcome, scope: Vec<VarName>) -> TabulationReport {
    TabulationReport {
        kind: c.kind,
        heuristic: c.label(),
        target: c.target.to_string(),
        outcome: out.result.label().to_string(),
        nodes: out.nodes,
        table_size: out.result.table().map(|t| t.len()),
        scope,
        progress: match out.result {
            TabResult::AbandonedProgress { nodes, c, a } => Some((nodes, c, a)),
            _ => None,
        },
    }
}

fn table_expr(vars: &[VarName], t: &Arc<Table>) -> Expr {
    Expr::table(vars.to_vec(), t.clone())
}

fn is_prefix(p: &[usize], q: &[usize]) -> bool {
    p.len() <= q.len() && q[..p.len()] == *p
}

/// Runs the three scan phases (top-level, nested Boolean, integer) and
/// installs every table that was generated or found in the caches.
pub struct Tabulator {
    pub cfg: HeuristicConfig,
    pub limits: TabLimits,
    pub caches: Caches,
    /// Integer expression -> auxiliary variable standing for it.
    pub aux: HashMap<Expr, VarName>,
    pub reports: Vec<TabulationReport>,
}

impl Tabulator {
    pub fn new(cfg: HeuristicConfig, limits: TabLimits) -> Self {
        Tabulator { cfg, limits, caches: Caches::default(), aux: HashMap::new(), reports: Vec::new() }
    }

    pub fn run(&mut self, mut m: Model) -> Model {
        if m.is_unsat() {
            return m;
        }
        m = self.top_level(m);
        m = self.nested(m);
        self.integer(m)
    }

    fn top_level(&mut self, mut m: Model) -> Model {
        let cands = scan_top_level(&m, &self.cfg);
        let mut removed = HashSet::new();
        let mut added = Vec::new();
        for c in &cands {
            let (out, vars) = self.caches.tabulate(&c.generator, &m, &self.limits, false);
            if let Some(t) = out.result.table() {
                removed.extend(c.constraints.iter().copied());
                added.push(table_expr(&vars, t));
            }
            self.reports.push(report(c, &out, vars));
        }
        let old = std::mem::take(&mut m.constraints);
        m.constraints = old
            .into_iter()
            .enumerate()
            .filter(|(i, _)| !removed.contains(i))
            .map(|(_, c)| c)
            .chain(added)
            .collect();
        m
    }

    fn nested(&mut self, mut m: Model) -> Model {
        let cands = scan_nested_bool(&m, &self.cfg);
        let mut done: Vec<(usize, Vec<usize>)> = Vec::new();
        for c in &cands {
            let i = c.constraints[0];
            if done.iter().any(|(j, p)| *j == i && is_prefix(p, &c.path)) {
                continue;
            }
            let (out, vars) = self.caches.tabulate(&c.generator, &m, &self.limits, true);
            if let Some(t) = out.result.table() {
                m.constraints[i].replace_at(&c.path, table_expr(&vars, t));
                done.push((i, c.path.clone()));
            }
            self.reports.push(report(c, &out, vars));
        }
        m
    }

    fn fresh_aux(&self, m: &Model) -> VarName {
        (0..)
            .map(|k| VarName::from(format!("aux{k}")))
            .find(|n| m.variable(n).is_none() && !m.assigned.iter().any(|a| &a.name == n))
            .unwrap()
    }

    fn integer(&mut self, mut m: Model) -> Model {
        let cands = scan_integer_exprs(&m, &self.cfg);
        let temp = VarName::from(AUX_PLACEHOLDER);
        let mut done: Vec<(usize, Vec<usize>)> = Vec::new();
        for c in &cands {
            let i = c.constraints[0];
            if done.iter().any(|(j, p)| *j == i && is_prefix(p, &c.path)) {
                continue;
            }
            if let Some(a) = self.aux.get(&c.target) {
                m.constraints[i].replace_at(&c.path, Expr::Var(a.clone()));
                done.push((i, c.path.clone()));
                self.reports.push(TabulationReport {
                    kind: c.kind,
                    heuristic: c.label(),
                    target: c.target.to_string(),
                    outcome: "aux-reuse".into(),
                    nodes: 0,
                    table_size: None,
                    scope: vec![a.clone()],
                    progress: None,
                });
                continue;
            }
            let name = self.fresh_aux(&m);
            let domain = aux_domain(&c.target, &m, self.limits.node_limit as u128);
            let generator = normalize(&c.generator.map_vars(&|v| {
                Expr::Var(if *v == temp { name.clone() } else { v.clone() })
            }));
            let lookup = WithVar { base: &m, name: &name, domain: &domain };
            let (out, vars) = self.caches.tabulate(&generator, &lookup, &self.limits, false);
            if let Some(t) = out.result.table() {
                let t = t.clone();
                let position = m.next_position();
                m.add_variable(Variable { name: name.clone(), domain, boolean: false, aux: true, position });
                m.constraints[i].replace_at(&c.path, Expr::Var(name.clone()));
                m.constraints.push(table_expr(&vars, &t));
                self.aux.insert(c.target.clone(), name);
                done.push((i, c.path.clone()));
            }
            self.reports.push(report(c, &out, vars));
        }
        m
    }
}

/// Applies all three phases with fresh caches.
pub fn tabulate_pass(
    m: Model,
    cfg: &HeuristicConfig,
    limits: &TabLimits,
) -> (Model, Vec<TabulationReport>) {
    let mut t = Tabulator::new(*cfg, *limits);
    let m = t.run(m);
    (m, t.reports)
}
