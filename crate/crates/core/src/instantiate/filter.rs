use std::collections::HashMap;

use crate::ast::{normalize, scope, simplify_constraint, simplify_map, Assigned, Expr, Model, Objective, VarName};

/// Domain filtering to a fixpoint: unary constraints shrink their variable's
/// domain and disappear, variables left with one value are substituted and
/// moved to `assigned`, and constants in an `allDiff` are removed from the
/// domains of its plain-variable arguments.
pub fn filter_domains(mut model: Model) -> Model {
    if model.is_unsat() {
        return model;
    }
    loop {
        let mut changed = false;
        let mut kept = Vec::with_capacity(model.constraints.len());
        let constraints = std::mem::take(&mut model.constraints);
        for c in constraints {
            let vars = scope(&c);
            match vars.len() {
                0 => match normalize(&c).as_bool() {
                    Some(true) => changed = true,
                    _ => {
                        model.mark_unsat();
                        return model;
                    }
                },
                1 => {
                    let v = &vars[0];
                    let mut dom = model.variable(v).unwrap().domain.clone();
                    dom.retain(|&x| {
                        let asg = HashMap::from([(v.clone(), x)]);
                        simplify_constraint(&c, &asg).as_bool() == Some(true)
                    });
                    if dom.is_empty() {
                        model.mark_unsat();
                        return model;
                    }
                    model.set_domain(v, dom);
                    changed = true;
                }
                _ => {
                    if let Expr::AllDiff(items) = &c {
                        let consts: Vec<i64> = items.iter().filter_map(Expr::as_int).collect();
                        if !consts.is_empty() {
                            for item in items {
                                if let Some(v) = item.as_var() {
                                    let mut dom = model.variable(v).unwrap().domain.clone();
                                    if dom.retain(|x| !consts.contains(x)) {
                                        if dom.is_empty() {
                                            model.mark_unsat();
                                            return model;
                                        }
                                        model.set_domain(v, dom);
                                        changed = true;
                                    }
                                }
                            }
                            // constants can be dropped once every other argument
                            // is a variable that no longer holds them
                            if items.iter().all(|x| x.as_int().is_some() || x.as_var().is_some()) {
                                let rest: Vec<Expr> =
                                    items.iter().filter(|x| x.as_var().is_some()).cloned().collect();
                                kept.push(normalize(&Expr::AllDiff(rest)));
                                changed = true;
                                continue;
                            }
                        }
                    }
                    kept.push(c);
                }
            }
        }
        model.constraints = kept;

        let fixed: HashMap<VarName, i64> = model
            .variables()
            .iter()
            .filter_map(|v| v.domain.single_value().map(|x| (v.name.clone(), x)))
            .collect();
        if !fixed.is_empty() {
            changed = true;
            for name in fixed.keys() {
                let var = model.remove_variable(name).unwrap();
                model.assigned.push(Assigned {
                    name: var.name,
                    value: fixed[name],
                    boolean: var.boolean,
                    position: var.position,
                });
            }
            model.assigned.sort_by_key(|a| a.position);
            let mut next = Vec::new();
            for c in &model.constraints {
                match normalize(&simplify_constraint(c, &fixed)) {
                    Expr::Bool(true) => {}
                    Expr::Bool(false) => {
                        model.mark_unsat();
                        return model;
                    }
                    Expr::And(xs) => next.extend(xs),
                    e => next.push(e),
                }
            }
            model.constraints = next;
            if let Some(obj) = &model.objective {
                model.objective = Some(Objective {
                    sense: obj.sense,
                    expr: normalize(&simplify_map(&obj.expr, &fixed)),
                });
            }
        }
        if !changed {
            return model;
        }
    }
}
