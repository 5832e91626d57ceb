//! Candidate selection for tabulation.
//!
//! Four heuristics are tried on each expression, always in the same order:
//! identical scopes, duplicate variables, large AST, weak propagation. The
//! first one that fires is recorded.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::ast::interval::{bounds, may_be_undefined};
use crate::ast::{
    count_nodes, count_occurrences, scope, simplify_map, CmpOp, Domain, DomainLookup, Expr, Model,
    VarName, WithVar,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strength {
    Strong,
    Weak,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Heuristic {
    IdenticalScopes,
    DuplicateVariables,
    LargeAst,
    WeakPropagation,
}

impl Heuristic {
    pub fn name(self) -> &'static str {
        match self {
            Heuristic::IdenticalScopes => "IdenticalScopes",
            Heuristic::DuplicateVariables => "DuplicateVariables",
            Heuristic::LargeAst => "LargeAST",
            Heuristic::WeakPropagation => "WeakPropagation",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CandidateKind {
    TopLevel,
    NestedBool,
    IntegerExpr,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Candidate {
    pub kind: CandidateKind,
    pub heuristic: Heuristic,
    /// Top-level constraints involved. For a top-level candidate all of them
    /// are replaced; otherwise the first holds the target.
    pub constraints: Vec<usize>,
    /// Child-index path from the containing constraint to the target.
    pub path: Vec<usize>,
    /// The node to replace (the whole constraint for top-level candidates).
    pub target: Expr,
    /// What to enumerate. For integer candidates this mentions `aux`.
    pub generator: Expr,
    /// Placeholder variable standing for the integer target in `generator`.
    pub aux: Option<(VarName, Domain)>,
}

impl Candidate {
    /// Heuristic name with the context suffix, e.g. `WeakPropagation(Integer)`.
    pub fn label(&self) -> String {
        match self.kind {
            CandidateKind::TopLevel => self.heuristic.name().to_string(),
            CandidateKind::NestedBool => format!("{}(Nested)", self.heuristic.name()),
            CandidateKind::IntegerExpr => format!("{}(Integer)", self.heuristic.name()),
        }
    }
}

impl fmt::Display for Candidate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.label(), self.target)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HeuristicConfig {
    pub max_distinct_vars: usize,
    pub large_ast_factor: usize,
}

impl Default for HeuristicConfig {
    fn default() -> Self {
        HeuristicConfig { max_distinct_vars: 10, large_ast_factor: 5 }
    }
}

fn is_var_or_const(e: &Expr) -> bool {
    matches!(e, Expr::Var(_) | Expr::Int(_) | Expr::Bool(_))
}

/// Index that is a variable, possibly shifted by a constant.
fn is_view_of_var(e: &Expr) -> bool {
    match e {
        Expr::Var(_) => true,
        Expr::Sum(terms, _) => terms.len() == 1 && terms[0].coef == 1 && terms[0].expr.as_var().is_some(),
        _ => false,
    }
}

/// Syntactic estimate of whether a reference solver would enforce GAC on
/// `e`. Integer expressions are judged as the constraint `a = e`.
pub fn gac_estimate(e: &Expr, dom: &dyn DomainLookup) -> Strength {
    if strong(e, dom) {
        Strength::Strong
    } else {
        Strength::Weak
    }
}

fn strong(e: &Expr, dom: &dyn DomainLookup) -> bool {
    match e {
        Expr::Int(_) | Expr::Bool(_) | Expr::Var(_) | Expr::Table(..) => true,
        Expr::Sum(terms, _) => terms.iter().all(|t| {
            strong(&t.expr, dom)
                && matches!(bounds(&t.expr, dom), Some((a, b))
                    if (b as i128 - a as i128) * (t.coef as i128).abs() <= 1)
        }),
        Expr::Element(arr, idx) => arr.iter().all(is_var_or_const) && is_view_of_var(idx),
        Expr::Product(xs) => xs.iter().filter(|x| x.as_int().is_none()).count() == 0,
        Expr::Div(a, b) | Expr::Mod(a, b) => a.as_int().is_some() && b.as_int().is_some(),
        Expr::Abs(a) | Expr::Neg(a) => a.as_int().is_some(),
        Expr::Cmp(..)
        | Expr::And(_)
        | Expr::Or(_)
        | Expr::Not(_)
        | Expr::Implies(..)
        | Expr::Iff(..)
        | Expr::AllDiff(_)
        | Expr::InSet(..) => e.children().into_iter().all(|c| strong(c, dom)),
    }
}

fn var_set(e: &Expr) -> BTreeSet<VarName> {
    scope(e).into_iter().collect()
}

fn has_duplicates(e: &Expr) -> bool {
    count_occurrences(e).values().any(|&c| c >= 2)
}

/// Does `e` share a variable with some top-level constraint (other than
/// `skip`) that is estimated Strong?
fn overlaps_strong(e_vars: &BTreeSet<VarName>, m: &Model, skip: Option<usize>, dom: &dyn DomainLookup) -> bool {
    m.constraints.iter().enumerate().any(|(j, c)| {
        Some(j) != skip
            && scope(c).iter().any(|v| e_vars.contains(v))
            && gac_estimate(c, dom) == Strength::Strong
    })
}

/// The three heuristics that look at a single expression.
fn single_heuristic(
    e: &Expr,
    m: &Model,
    skip: Option<usize>,
    cfg: &HeuristicConfig,
    dom: &dyn DomainLookup,
) -> Option<Heuristic> {
    let vars = var_set(e);
    if vars.is_empty() {
        return None;
    }
    if vars.len() <= cfg.max_distinct_vars && has_duplicates(e) {
        return Some(Heuristic::DuplicateVariables);
    }
    if count_nodes(e) > cfg.large_ast_factor * vars.len() {
        return Some(Heuristic::LargeAst);
    }
    if vars.len() <= cfg.max_distinct_vars
        && gac_estimate(e, dom) == Strength::Weak
        && overlaps_strong(&vars, m, skip, dom)
    {
        return Some(Heuristic::WeakPropagation);
    }
    None
}

/// Top-level candidates in constraint order. Groups of two or more
/// constraints over the same variable set become one candidate; existing
/// tables are never candidates.
pub fn scan_top_level(m: &Model, cfg: &HeuristicConfig) -> Vec<Candidate> {
    let mut groups: HashMap<BTreeSet<VarName>, Vec<usize>> = HashMap::new();
    for (i, c) in m.constraints.iter().enumerate() {
        if !matches!(c, Expr::Table(..)) {
            groups.entry(var_set(c)).or_default().push(i);
        }
    }
    let mut out = Vec::new();
    for (i, c) in m.constraints.iter().enumerate() {
        if matches!(c, Expr::Table(..)) {
            continue;
        }
        let group = &groups[&var_set(c)];
        if group.len() >= 2 && !var_set(c).is_empty() {
            if group[0] == i {
                let members: Vec<Expr> = group.iter().map(|&j| m.constraints[j].clone()).collect();
                out.push(Candidate {
                    kind: CandidateKind::TopLevel,
                    heuristic: Heuristic::IdenticalScopes,
                    constraints: group.clone(),
                    path: Vec::new(),
                    target: c.clone(),
                    generator: Expr::And(members),
                    aux: None,
                });
            }
            continue;
        }
        if let Some(h) = single_heuristic(c, m, Some(i), cfg, m) {
            out.push(Candidate {
                kind: CandidateKind::TopLevel,
                heuristic: h,
                constraints: vec![i],
                path: Vec::new(),
                target: c.clone(),
                generator: c.clone(),
                aux: None,
            });
        }
    }
    out
}

fn walk<'a>(e: &'a Expr, path: &mut Vec<usize>, f: &mut dyn FnMut(&'a Expr, &[usize])) {
    f(e, path);
    for (k, c) in e.children().into_iter().enumerate() {
        path.push(k);
        walk(c, path, f);
        path.pop();
    }
}

/// Top-level constraints other than `own` whose variable set is `vars`.
fn same_scope(m: &Model, own: usize, vars: &BTreeSet<VarName>) -> Vec<usize> {
    m.constraints
        .iter()
        .enumerate()
        .filter(|&(j, c)| j != own && var_set(c) == *vars)
        .map(|(j, _)| j)
        .collect()
}

/// Candidates among Boolean nodes strictly below the top level, parents
/// before children. The caller skips descendants of a node it tabulated.
pub fn scan_nested_bool(m: &Model, cfg: &HeuristicConfig) -> Vec<Candidate> {
    let mut out = Vec::new();
    for (i, c) in m.constraints.iter().enumerate() {
        if matches!(c, Expr::Table(..)) {
            continue;
        }
        walk(c, &mut Vec::new(), &mut |e, path| {
            if path.is_empty() || !e.is_boolean() || e.is_leaf() || matches!(e, Expr::Table(..)) {
                return;
            }
            let vars = var_set(e);
            if vars.is_empty() {
                return;
            }
            let others = same_scope(m, i, &vars);
            let (heuristic, generator) = if !others.is_empty() {
                let mut parts = vec![e.clone()];
                parts.extend(others.iter().map(|&j| m.constraints[j].clone()));
                (Heuristic::IdenticalScopes, Expr::And(parts))
            } else {
                match single_heuristic(e, m, Some(i), cfg, m) {
                    Some(h) => (h, e.clone()),
                    None => return,
                }
            };
            let mut constraints = vec![i];
            if heuristic == Heuristic::IdenticalScopes {
                constraints.extend(others);
            }
            out.push(Candidate {
                kind: CandidateKind::NestedBool,
                heuristic,
                constraints,
                path: path.to_vec(),
                target: e.clone(),
                generator,
                aux: None,
            });
        });
    }
    out
}

/// Integer subexpressions that general flattening would extract: non-leaf,
/// not the sum directly below a top-level relation, not a shifted variable,
/// and always defined (an auxiliary variable cannot stand for an undefined
/// value).
fn extractable(e: &Expr, path: &[usize], dom: &dyn DomainLookup) -> bool {
    if path.is_empty() || e.is_boolean() || e.is_leaf() || is_view_of_var(e) {
        return false;
    }
    if path.len() == 1 && matches!(e, Expr::Sum(..)) {
        return false;
    }
    !may_be_undefined(e, dom)
}

/// Name of the placeholder used for an integer candidate's value.
pub const AUX_PLACEHOLDER: &str = "aux_temp";

/// Candidates among integer subexpressions, parents before children. Each
/// is judged as the constraint `aux_temp = e`.
pub fn scan_integer_exprs(m: &Model, cfg: &HeuristicConfig) -> Vec<Candidate> {
    let temp = VarName::from(AUX_PLACEHOLDER);
    let mut out = Vec::new();
    for (i, c) in m.constraints.iter().enumerate() {
        if matches!(c, Expr::Table(..)) {
            continue;
        }
        walk(c, &mut Vec::new(), &mut |e, path| {
            if !extractable(e, path, m) {
                return;
            }
            let vars = var_set(e);
            if vars.is_empty() {
                return;
            }
            let Some((lo, hi)) = bounds(e, m) else { return };
            let domain = Domain::range(lo, hi);
            let lookup = WithVar { base: m, name: &temp, domain: &domain };
            let defn = Expr::cmp(CmpOp::Eq, Expr::Var(temp.clone()), e.clone());

            let others = if vars.len() > 1 { same_scope(m, i, &vars) } else { Vec::new() };
            let heuristic = if !others.is_empty() {
                Heuristic::IdenticalScopes
            } else {
                let n_vars = vars.len() + 1;
                if n_vars <= cfg.max_distinct_vars && has_duplicates(e) {
                    Heuristic::DuplicateVariables
                } else if count_nodes(&defn) > cfg.large_ast_factor * n_vars {
                    Heuristic::LargeAst
                } else if gac_estimate(e, &lookup) == Strength::Weak && {
                    let mut replaced = c.clone();
                    replaced.replace_at(path, Expr::Var(temp.clone()));
                    gac_estimate(&replaced, &lookup) == Strength::Strong
                        || (n_vars <= cfg.max_distinct_vars && overlaps_strong(&vars, m, None, &lookup))
                } {
                    Heuristic::WeakPropagation
                } else {
                    return;
                }
            };
            let mut parts = vec![defn];
            parts.extend(others.iter().map(|&j| m.constraints[j].clone()));
            let mut constraints = vec![i];
            constraints.extend(others);
            out.push(Candidate {
                kind: CandidateKind::IntegerExpr,
                heuristic,
                constraints,
                path: path.to_vec(),
                target: e.clone(),
                generator: if parts.len() == 1 { parts.pop().unwrap() } else { Expr::And(parts) },
                aux: Some((temp.clone(), domain)),
            });
        });
    }
    out
}

/// Values `e` can take. Exact when the assignment space of its scope is at
/// most `limit`, otherwise the interval bounds.
pub fn aux_domain(e: &Expr, dom: &dyn DomainLookup, limit: u128) -> Domain {
    let vars = scope(e);
    let doms: Vec<&Domain> = vars.iter().map(|v| dom.domain_of(v).expect("unknown variable")).collect();
    let space = doms.iter().fold(1u128, |acc, d| acc.saturating_mul(d.len() as u128));
    if space > limit {
        let (lo, hi) = bounds(e, dom).expect("aux expression must have bounds");
        return Domain::range(lo, hi);
    }
    let mut values = Vec::new();
    let mut asg = HashMap::new();
    fn rec(
        k: usize,
        e: &Expr,
        vars: &[VarName],
        doms: &[&Domain],
        asg: &mut HashMap<VarName, i64>,
        out: &mut Vec<i64>,
    ) {
        if k == vars.len() {
            if let Some(v) = simplify_map(e, asg).as_int() {
                out.push(v);
            }
            return;
        }
        for &x in doms[k].values() {
            asg.insert(vars[k].clone(), x);
            rec(k + 1, e, vars, doms, asg, out);
        }
        asg.remove(&vars[k]);
    }
    rec(0, e, &vars, &doms, &mut asg, &mut values);
    Domain::new(values)
}
