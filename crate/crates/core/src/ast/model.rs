use std::collections::HashMap;
use std::fmt;

use super::print::{infix, TableNames};
use super::{Domain, Expr, VarName};

/// Read access to variable domains.
pub trait DomainLookup {
    fn domain_of(&self, name: &VarName) -> Option<&Domain>;
}

impl DomainLookup for HashMap<VarName, Domain> {
    fn domain_of(&self, name: &VarName) -> Option<&Domain> {
        self.get(name)
    }
}

impl<T: DomainLookup + ?Sized> DomainLookup for &T {
    fn domain_of(&self, name: &VarName) -> Option<&Domain> {
        (**self).domain_of(name)
    }
}

/// A base lookup with one extra variable layered on top.
pub struct WithVar<'a, L: ?Sized> {
    pub base: &'a L,
    pub name: &'a VarName,
    pub domain: &'a Domain,
}

impl<L: DomainLookup + ?Sized> DomainLookup for WithVar<'_, L> {
    fn domain_of(&self, name: &VarName) -> Option<&Domain> {
        if name == self.name {
            Some(self.domain)
        } else {
            self.base.domain_of(name)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Variable {
    pub name: VarName,
    pub domain: Domain,
    pub boolean: bool,
    /// Introduced by tabulation of an integer expression.
    pub aux: bool,
    /// Declaration position, used to order printed solutions.
    pub position: usize,
}

/// A variable removed from the model because its value was forced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Assigned {
    pub name: VarName,
    pub value: i64,
    pub boolean: bool,
    pub position: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Minimise,
    Maximise,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Objective {
    pub sense: Sense,
    pub expr: Expr,
}

/// Flat model: scalar variables, a top-level conjunction and an optional
/// objective.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Model {
    variables: Vec<Variable>,
    index: HashMap<VarName, usize>,
    pub constraints: Vec<Expr>,
    pub objective: Option<Objective>,
    pub assigned: Vec<Assigned>,
}

impl DomainLookup for Model {
    fn domain_of(&self, name: &VarName) -> Option<&Domain> {
        self.variable(name).map(|v| &v.domain)
    }
}

impl Model {
    pub fn new() -> Self {
        Model::default()
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn variable(&self, name: &VarName) -> Option<&Variable> {
        self.index.get(name).map(|&i| &self.variables[i])
    }

    pub fn position_of(&self, name: &VarName) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn next_position(&self) -> usize {
        self.variables
            .iter()
            .map(|v| v.position + 1)
            .chain(self.assigned.iter().map(|a| a.position + 1))
            .max()
            .unwrap_or(0)
    }

    pub fn add_variable(&mut self, var: Variable) {
        assert!(
            !self.index.contains_key(&var.name),
            "duplicate variable {}",
            var.name
        );
        self.index.insert(var.name.clone(), self.variables.len());
        self.variables.push(var);
    }

    pub fn set_domain(&mut self, name: &VarName, domain: Domain) {
        let i = self.index[name];
        self.variables[i].domain = domain;
    }

    pub fn remove_variable(&mut self, name: &VarName) -> Option<Variable> {
        let i = self.index.remove(name)?;
        let var = self.variables.remove(i);
        for slot in self.index.values_mut() {
            if *slot > i {
                *slot -= 1;
            }
        }
        Some(var)
    }

    /// A `false` constraint marks a model proven unsatisfiable.
    pub fn is_unsat(&self) -> bool {
        self.constraints.iter().any(|c| c == &Expr::Bool(false))
    }

    pub fn mark_unsat(&mut self) {
        self.constraints = vec![Expr::Bool(false)];
    }

    /// Size of the Cartesian product of all domains, saturating.
    pub fn assignment_space(&self) -> u128 {
        self.variables
            .iter()
            .fold(1u128, |acc, v| acc.saturating_mul(v.domain.len() as u128))
    }

    /// Merges `values` for the model's non-auxiliary variables with the
    /// deleted assigned variables, in declaration order.
    pub fn full_solution(&self, values: &HashMap<VarName, i64>) -> Vec<(VarName, i64)> {
        let mut out: Vec<(usize, VarName, i64)> = self
            .variables
            .iter()
            .filter(|v| !v.aux)
            .filter_map(|v| values.get(&v.name).map(|&x| (v.position, v.name.clone(), x)))
            .chain(
                self.assigned
                    .iter()
                    .map(|a| (a.position, a.name.clone(), a.value)),
            )
            .collect();
        out.sort_by_key(|(p, _, _)| *p);
        out.into_iter().map(|(_, n, x)| (n, x)).collect()
    }

    /// Prints the model in the surface syntax; tables print as
    /// `table([x, y], tN)` with names registered in `names`.
    pub fn write_flat(&self, names: &mut TableNames) -> String {
        let mut decls: Vec<(usize, String)> = Vec::new();
        for v in &self.variables {
            let dom = if v.boolean && v.domain == Domain::boolean() {
                "bool".to_string()
            } else {
                v.domain.to_string()
            };
            decls.push((v.position, format!("find {} : {}", v.name, dom)));
        }
        for a in &self.assigned {
            decls.push((
                a.position,
                format!("find {} : int({}..{})", a.name, a.value, a.value),
            ));
        }
        decls.sort_by_key(|(p, _)| *p);
        let mut out = String::new();
        for (_, d) in decls {
            out.push_str(&d);
            out.push('\n');
        }
        if let Some(obj) = &self.objective {
            let kw = match obj.sense {
                Sense::Minimise => "minimising",
                Sense::Maximise => "maximising",
            };
            out.push_str(&format!("{kw} {}\n", infix(&obj.expr, names)));
        }
        out.push_str("such that\n");
        let body: Vec<String> = if self.constraints.is_empty() {
            vec!["true".to_string()]
        } else {
            self.constraints.iter().map(|c| infix(c, names)).collect()
        };
        out.push_str(&body.join(",\n"));
        out.push('\n');
        out
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.write_flat(&mut TableNames::default()))
    }
}
