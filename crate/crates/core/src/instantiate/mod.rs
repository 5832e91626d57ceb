//! From a parsed model plus parameters to a flat model of scalar variables.

mod filter;

pub use filter::filter_domains;

use std::collections::HashMap;

use crate::ast::{self, normalize, simplify, Domain, Expr, Model, Objective, Sense, VarName, Variable};
use crate::parser::{
    BinOp, Func, Generator, ModelSource, ParamBinding, Pos, Quantifier, SDomain, SExpr, SKind,
    SRange, SSense, UnOp, Value,
};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum InstantiateError {
    #[error("missing parameter `{0}`")]
    MissingParam(String),
    #[error("parameter `{0}` is not declared by the model")]
    ExtraParam(String),
    #[error("parameter `{name}`: value {value} is outside its declared domain")]
    OutOfRange { name: String, value: String },
    #[error("parameter `{name}`: {msg}")]
    BadShape { name: String, msg: String },
    #[error("{pos}: index {index} out of bounds for `{what}`")]
    IndexOutOfBounds { pos: Pos, what: String, index: i64 },
    #[error("{pos}: {what} must be constant after substituting parameters")]
    NotConstant { pos: Pos, what: String },
    #[error("{pos}: {msg}")]
    Invalid { pos: Pos, msg: String },
}

type Result<T> = std::result::Result<T, InstantiateError>;

/// A matrix with contiguous index ranges, stored row-major.
#[derive(Clone, Debug)]
struct Mat {
    /// (lowest index, length) per dimension
    dims: Vec<(i64, usize)>,
    items: Vec<Expr>,
    name: String,
}

impl Mat {
    fn strides(&self) -> Vec<usize> {
        let mut s = vec![1; self.dims.len()];
        for d in (0..self.dims.len().saturating_sub(1)).rev() {
            s[d] = s[d + 1] * self.dims[d + 1].1;
        }
        s
    }
}

#[derive(Clone, Debug)]
enum Val {
    Scalar(Expr),
    Matrix(Mat),
}

/// Scalar name for one matrix cell, e.g. `tour_0`, `P_1_2`, `x_n1` for -1.
pub fn cell_name(base: &str, index: &[i64]) -> String {
    let mut s = base.to_string();
    for &i in index {
        if i < 0 {
            s.push_str(&format!("_n{}", i.unsigned_abs()));
        } else {
            s.push_str(&format!("_{i}"));
        }
    }
    s
}

struct Instantiator {
    globals: HashMap<String, Val>,
    locals: Vec<(String, i64)>,
    domains: HashMap<VarName, Domain>,
}

fn value_to_val(name: &str, v: &Value, dims: Option<&[(i64, usize)]>) -> Result<Val> {
    match v {
        Value::Int(x) => Ok(Val::Scalar(Expr::Int(*x))),
        Value::Matrix(_) => {
            let mut shape = Vec::new();
            let mut items = Vec::new();
            flatten_value(v, 0, &mut shape, &mut items)
                .map_err(|msg| InstantiateError::BadShape { name: name.into(), msg })?;
            let dims = match dims {
                Some(d) => {
                    let lens: Vec<usize> = d.iter().map(|x| x.1).collect();
                    if lens != shape {
                        return Err(InstantiateError::BadShape {
                            name: name.into(),
                            msg: format!("expected shape {lens:?}, found {shape:?}"),
                        });
                    }
                    d.to_vec()
                }
                None => shape.iter().map(|&l| (1, l)).collect(),
            };
            Ok(Val::Matrix(Mat { dims, items, name: name.into() }))
        }
    }
}

fn flatten_value(
    v: &Value,
    depth: usize,
    shape: &mut Vec<usize>,
    items: &mut Vec<Expr>,
) -> std::result::Result<(), String> {
    match v {
        Value::Int(x) => {
            if depth != shape.len() {
                return Err("ragged matrix".into());
            }
            items.push(Expr::Int(*x));
        }
        Value::Matrix(xs) => {
            if depth == shape.len() {
                if !items.is_empty() {
                    return Err("ragged matrix".into());
                }
                shape.push(xs.len());
            } else if shape[depth] != xs.len() {
                return Err("ragged matrix".into());
            }
            for x in xs {
                flatten_value(x, depth + 1, shape, items)?;
            }
        }
    }
    Ok(())
}

impl Instantiator {
    fn lookup(&self, name: &str) -> Option<Val> {
        if let Some((_, v)) = self.locals.iter().rev().find(|(n, _)| n == name) {
            return Some(Val::Scalar(Expr::Int(*v)));
        }
        self.globals.get(name).cloned()
    }

    fn constant(&mut self, e: &SExpr, what: &str) -> Result<i64> {
        let x = simplify(&self.scalar(e)?);
        x.as_int()
            .or_else(|| x.as_bool().map(i64::from))
            .ok_or(InstantiateError::NotConstant { pos: e.pos, what: what.into() })
    }

    fn domain(&mut self, d: &SDomain, pos: Pos) -> Result<Domain> {
        match d {
            SDomain::Bool => Ok(Domain::boolean()),
            SDomain::Int(ranges) => {
                let mut values = Vec::new();
                for r in ranges {
                    match r {
                        SRange::Single(e) => values.push(self.constant(e, "domain bound")?),
                        SRange::Span(a, b) => {
                            let (lo, hi) = (self.constant(a, "domain bound")?, self.constant(b, "domain bound")?);
                            if hi.saturating_sub(lo) > 10_000_000 {
                                return Err(InstantiateError::Invalid {
                                    pos,
                                    msg: format!("domain {lo}..{hi} is too large"),
                                });
                            }
                            values.extend(lo..=hi);
                        }
                    }
                }
                Ok(Domain::new(values))
            }
            SDomain::Matrix(..) => Err(InstantiateError::Invalid {
                pos,
                msg: "matrix domain where a scalar domain is required".into(),
            }),
        }
    }

    fn index_dims(&mut self, idx: &[SDomain], pos: Pos) -> Result<Vec<(i64, usize)>> {
        idx.iter()
            .map(|d| {
                let dom = self.domain(d, pos)?;
                match dom.intervals().as_slice() {
                    [(lo, hi)] => Ok((*lo, (hi - lo + 1) as usize)),
                    [] => Ok((1, 0)),
                    _ => Err(InstantiateError::Invalid {
                        pos,
                        msg: "matrix index domains must be contiguous".into(),
                    }),
                }
            })
            .collect()
    }

    fn scalar(&mut self, e: &SExpr) -> Result<Expr> {
        match self.eval(e)? {
            Val::Scalar(x) => Ok(x),
            Val::Matrix(_) => Err(InstantiateError::Invalid {
                pos: e.pos,
                msg: "matrix used where a scalar is required".into(),
            }),
        }
    }

    fn matrix(&mut self, e: &SExpr) -> Result<Mat> {
        match self.eval(e)? {
            Val::Matrix(m) => Ok(m),
            Val::Scalar(_) => Err(InstantiateError::Invalid {
                pos: e.pos,
                msg: "scalar used where a matrix is required".into(),
            }),
        }
    }

    fn eval(&mut self, e: &SExpr) -> Result<Val> {
        let s = |x: Expr| Ok(Val::Scalar(x));
        match &e.kind {
            SKind::Int(v) => s(Expr::Int(*v)),
            SKind::Bool(b) => s(Expr::Bool(*b)),
            SKind::Ident(n) => self.lookup(n).ok_or_else(|| InstantiateError::Invalid {
                pos: e.pos,
                msg: format!("unbound identifier `{n}`"),
            }),
            SKind::Unary(op, a) => {
                let a = self.scalar(a)?;
                s(match op {
                    UnOp::Neg => Expr::Neg(Box::new(a)),
                    UnOp::Not => Expr::not(a),
                    UnOp::Abs => Expr::abs(a),
                })
            }
            SKind::Binary(op, a, b) => {
                let (a, b) = (self.scalar(a)?, self.scalar(b)?);
                s(match op {
                    BinOp::Add => Expr::sum(vec![(1, a), (1, b)], 0),
                    BinOp::Sub => Expr::sum(vec![(1, a), (-1, b)], 0),
                    BinOp::Mul => Expr::Product(vec![a, b]),
                    BinOp::Div => Expr::div(a, b),
                    BinOp::Mod => Expr::modulo(a, b),
                    BinOp::Eq => Expr::cmp(ast::CmpOp::Eq, a, b),
                    BinOp::Neq => Expr::cmp(ast::CmpOp::Neq, a, b),
                    BinOp::Lt => Expr::cmp(ast::CmpOp::Lt, a, b),
                    BinOp::Leq => Expr::cmp(ast::CmpOp::Leq, a, b),
                    BinOp::Gt => Expr::cmp(ast::CmpOp::Gt, a, b),
                    BinOp::Geq => Expr::cmp(ast::CmpOp::Geq, a, b),
                    BinOp::And => Expr::And(vec![a, b]),
                    BinOp::Or => Expr::Or(vec![a, b]),
                    BinOp::Implies => Expr::implies(a, b),
                    BinOp::Iff => Expr::Iff(Box::new(a), Box::new(b)),
                })
            }
            SKind::Index(m, idx) => {
                let mat = self.matrix(m)?;
                self.index(mat, idx, e.pos)
            }
            SKind::Call(func, args) => match func {
                Func::ToInt => self.eval(&args[0]),
                Func::AllDiff => s(Expr::AllDiff(self.matrix(&args[0])?.items)),
                Func::Sum => {
                    let items = self.matrix(&args[0])?.items;
                    s(Expr::sum(items.into_iter().map(|x| (1, x)).collect(), 0))
                }
            },
            SKind::MatrixLit(items) => {
                let vals: Vec<Val> = items.iter().map(|x| self.eval(x)).collect::<Result<_>>()?;
                literal_matrix(vals, e.pos)
            }
            SKind::Comprehension(body, gens) => {
                let mut items = Vec::new();
                self.expand(gens, &mut |this| {
                    items.push(this.scalar(body)?);
                    Ok(())
                })?;
                let len = items.len();
                Ok(Val::Matrix(Mat { dims: vec![(1, len)], items, name: "comprehension".into() }))
            }
            SKind::Quant(q, gens, body) => {
                let mut items = Vec::new();
                self.expand(gens, &mut |this| {
                    items.push(this.scalar(body)?);
                    Ok(())
                })?;
                s(match q {
                    Quantifier::ForAll => Expr::And(items),
                    Quantifier::Exists => Expr::Or(items),
                    Quantifier::Sum => Expr::sum(items.into_iter().map(|x| (1, x)).collect(), 0),
                })
            }
            SKind::InSet(a, set) => {
                let a = self.scalar(a)?;
                let mut vals = Vec::new();
                for x in set {
                    vals.push(self.constant(x, "set element")?);
                }
                vals.sort_unstable();
                vals.dedup();
                s(Expr::InSet(Box::new(a), vals))
            }
        }
    }

    /// Calls `body` once per binding of the generators, in order.
    fn expand(
        &mut self,
        gens: &[Generator],
        body: &mut dyn FnMut(&mut Self) -> Result<()>,
    ) -> Result<()> {
        let Some((first, rest)) = gens.split_first() else {
            return body(self);
        };
        match first {
            Generator::Guard(g) => {
                let v = self.scalar(g)?;
                match simplify(&v).as_bool() {
                    Some(true) => self.expand(rest, body),
                    Some(false) => Ok(()),
                    None => Err(InstantiateError::NotConstant { pos: g.pos, what: "guard".into() }),
                }
            }
            Generator::Range(names, d) => {
                let dom = self.domain(d, Pos::default())?;
                self.expand_names(names, &dom, rest, body)
            }
        }
    }

    fn expand_names(
        &mut self,
        names: &[String],
        dom: &Domain,
        rest: &[Generator],
        body: &mut dyn FnMut(&mut Self) -> Result<()>,
    ) -> Result<()> {
        let Some((name, more)) = names.split_first() else {
            return self.expand(rest, body);
        };
        for &v in dom.values() {
            self.locals.push((name.clone(), v));
            let r = self.expand_names(more, dom, rest, body);
            self.locals.pop();
            r?;
        }
        Ok(())
    }

    fn index(&mut self, mat: Mat, idx: &[Option<SExpr>], pos: Pos) -> Result<Val> {
        if idx.len() != mat.dims.len() {
            return Err(InstantiateError::Invalid {
                pos,
                msg: format!("`{}` has {} dimensions", mat.name, mat.dims.len()),
            });
        }
        let mut exprs: Vec<Option<Expr>> = Vec::new();
        for i in idx {
            exprs.push(match i {
                Some(x) => Some(simplify(&self.scalar(x)?)),
                None => None,
            });
        }
        let all_const = exprs.iter().all(|x| x.as_ref().is_none_or(|e| e.as_int().is_some()));
        if all_const {
            return self.constant_index(&mat, &exprs, pos);
        }
        if exprs.iter().any(Option::is_none) {
            return Err(InstantiateError::NotConstant {
                pos,
                what: "index of a sliced matrix".into(),
            });
        }
        let idx: Vec<Expr> = exprs.into_iter().map(Option::unwrap).collect();
        Ok(Val::Scalar(self.element(&mat, &idx, pos)?))
    }

    fn constant_index(&self, mat: &Mat, idx: &[Option<Expr>], pos: Pos) -> Result<Val> {
        let strides = mat.strides();
        let mut bases = vec![0usize];
        let mut dims = Vec::new();
        for (d, i) in idx.iter().enumerate() {
            let (lo, len) = mat.dims[d];
            match i {
                Some(e) => {
                    let v = e.as_int().unwrap();
                    if v < lo || v >= lo + len as i64 {
                        return Err(InstantiateError::IndexOutOfBounds {
                            pos,
                            what: mat.name.clone(),
                            index: v,
                        });
                    }
                    let off = (v - lo) as usize * strides[d];
                    bases.iter_mut().for_each(|b| *b += off);
                }
                None => {
                    dims.push((lo, len));
                    let s = strides[d];
                    bases = bases
                        .iter()
                        .flat_map(|&b| (0..len).map(move |k| b + k * s))
                        .collect();
                }
            }
        }
        let items: Vec<Expr> = bases.iter().map(|&b| mat.items[b].clone()).collect();
        if dims.is_empty() {
            Ok(Val::Scalar(items.into_iter().next().unwrap()))
        } else {
            Ok(Val::Matrix(Mat { dims, items, name: mat.name.clone() }))
        }
    }

    /// Indexing with at least one non-constant index. Flattened to a single
    /// zero-based element index when no index can leave its dimension;
    /// otherwise one element per dimension so that an out-of-range index in
    /// any position stays undefined.
    fn element(&self, mat: &Mat, idx: &[Expr], pos: Pos) -> Result<Expr> {
        let in_range = idx.iter().zip(&mat.dims).all(|(e, &(lo, len))| {
            matches!(ast::interval::bounds(e, &self.domains),
                Some((a, b)) if a >= lo && b < lo + len as i64)
        });
        if in_range || idx.len() == 1 {
            let strides = mat.strides();
            let mut terms = Vec::new();
            let mut offset: i64 = 0;
            for ((e, &(lo, _)), &s) in idx.iter().zip(&mat.dims).zip(&strides) {
                terms.push((s as i64, e.clone()));
                offset -= lo * s as i64;
            }
            let flat = simplify(&Expr::sum(terms, offset));
            return Ok(Expr::Element(mat.items.clone(), Box::new(flat)));
        }
        // peel the first dimension
        let (lo, len) = mat.dims[0];
        let stride = mat.strides()[0];
        let mut rows = Vec::new();
        for k in 0..len {
            let sub = Mat {
                dims: mat.dims[1..].to_vec(),
                items: mat.items[k * stride..(k + 1) * stride].to_vec(),
                name: mat.name.clone(),
            };
            let rest: Vec<Option<Expr>> = idx[1..].iter().cloned().map(Some).collect();
            let row = if rest.iter().all(|x| x.as_ref().unwrap().as_int().is_some()) {
                match self.constant_index(&sub, &rest, pos) {
                    Ok(Val::Scalar(x)) => x,
                    _ => Expr::div(Expr::Int(0), Expr::Int(0)),
                }
            } else {
                self.element(&sub, &idx[1..], pos)?
            };
            rows.push(row);
        }
        let first = simplify(&Expr::sum(vec![(1, idx[0].clone())], -lo));
        Ok(Expr::Element(rows, Box::new(first)))
    }
}

fn literal_matrix(vals: Vec<Val>, pos: Pos) -> Result<Val> {
    let n = vals.len();
    if vals.iter().all(|v| matches!(v, Val::Scalar(_))) {
        let items = vals
            .into_iter()
            .map(|v| match v {
                Val::Scalar(x) => x,
                Val::Matrix(_) => unreachable!(),
            })
            .collect();
        return Ok(Val::Matrix(Mat { dims: vec![(1, n)], items, name: "literal".into() }));
    }
    let mut dims = None;
    let mut items = Vec::new();
    for v in vals {
        let Val::Matrix(m) = v else {
            return Err(InstantiateError::Invalid { pos, msg: "ragged matrix literal".into() });
        };
        let lens: Vec<usize> = m.dims.iter().map(|d| d.1).collect();
        match &dims {
            None => dims = Some(lens),
            Some(d) if *d != lens => {
                return Err(InstantiateError::Invalid { pos, msg: "ragged matrix literal".into() })
            }
            _ => {}
        }
        items.extend(m.items);
    }
    let mut all = vec![(1, n)];
    all.extend(dims.unwrap().into_iter().map(|l| (1, l)));
    Ok(Val::Matrix(Mat { dims: all, items, name: "literal".into() }))
}

/// Checks `params` against the model's `given` declarations.
pub fn check_params(src: &ModelSource, params: &ParamBinding) -> Result<()> {
    let mut inst = Instantiator {
        globals: HashMap::new(),
        locals: Vec::new(),
        domains: HashMap::new(),
    };
    bind_params(&mut inst, src, params)
}

fn bind_params(inst: &mut Instantiator, src: &ModelSource, params: &ParamBinding) -> Result<()> {
    for name in params.keys() {
        if !src.params.iter().any(|p| &p.name == name) {
            return Err(InstantiateError::ExtraParam(name.clone()));
        }
    }
    for p in &src.params {
        let v = params
            .get(&p.name)
            .ok_or_else(|| InstantiateError::MissingParam(p.name.clone()))?;
        let (dims, elem) = match &p.domain {
            SDomain::Matrix(idx, elem) => (Some(inst.index_dims(idx, p.pos)?), &**elem),
            d => (None, d),
        };
        if dims.is_none() && matches!(v, Value::Matrix(_)) {
            return Err(InstantiateError::BadShape {
                name: p.name.clone(),
                msg: "matrix given for a scalar parameter".into(),
            });
        }
        if dims.is_some() && matches!(v, Value::Int(_)) {
            return Err(InstantiateError::BadShape {
                name: p.name.clone(),
                msg: "scalar given for a matrix parameter".into(),
            });
        }
        let val = value_to_val(&p.name, v, dims.as_deref())?;
        let bounded = !matches!(elem, SDomain::Int(r) if r.is_empty());
        if bounded {
            let dom = inst.domain(elem, p.pos)?;
            let items: Vec<&Expr> = match &val {
                Val::Scalar(x) => vec![x],
                Val::Matrix(m) => m.items.iter().collect(),
            };
            for x in items {
                let x = x.as_int().unwrap();
                if !dom.contains(x) {
                    return Err(InstantiateError::OutOfRange {
                        name: p.name.clone(),
                        value: x.to_string(),
                    });
                }
            }
        }
        inst.globals.insert(p.name.clone(), val);
    }
    Ok(())
}

/// Substitutes parameters, unrolls quantifiers and comprehensions, replaces
/// matrices by scalar variables and simplifies every constraint.
pub fn instantiate(src: &ModelSource, params: &ParamBinding) -> Result<Model> {
    let mut inst = Instantiator {
        globals: HashMap::new(),
        locals: Vec::new(),
        domains: HashMap::new(),
    };
    bind_params(&mut inst, src, params)?;
    for c in &src.constants {
        let v = inst.eval(&c.value)?;
        let v = match v {
            Val::Scalar(x) => Val::Scalar(simplify(&x)),
            Val::Matrix(mut m) => {
                m.items = m.items.iter().map(simplify).collect();
                m.name = c.name.clone();
                Val::Matrix(m)
            }
        };
        inst.globals.insert(c.name.clone(), v);
    }

    let mut model = Model::new();
    let mut position = 0;
    for decl in &src.vars {
        let (dims, elem) = match &decl.domain {
            SDomain::Matrix(idx, elem) => (inst.index_dims(idx, decl.pos)?, &**elem),
            d => (Vec::new(), d),
        };
        let boolean = matches!(elem, SDomain::Bool);
        let domain = inst.domain(elem, decl.pos)?;
        if domain.is_empty() {
            return Err(InstantiateError::Invalid {
                pos: decl.pos,
                msg: format!("`{}` has an empty domain", decl.name),
            });
        }
        let mut items = Vec::new();
        let count: usize = dims.iter().map(|d| d.1).product();
        for flat in 0..count {
            let mut rem = flat;
            let mut index = vec![0i64; dims.len()];
            for d in (0..dims.len()).rev() {
                index[d] = dims[d].0 + (rem % dims[d].1) as i64;
                rem /= dims[d].1;
            }
            let name = VarName::from(if dims.is_empty() {
                decl.name.clone()
            } else {
                cell_name(&decl.name, &index)
            });
            if model.variable(&name).is_some() || inst.globals.contains_key(name.as_str()) {
                return Err(InstantiateError::Invalid {
                    pos: decl.pos,
                    msg: format!("generated name `{name}` clashes with another declaration"),
                });
            }
            inst.domains.insert(name.clone(), domain.clone());
            model.add_variable(Variable {
                name: name.clone(),
                domain: domain.clone(),
                boolean,
                aux: false,
                position,
            });
            position += 1;
            items.push(Expr::Var(name));
        }
        let val = if dims.is_empty() {
            Val::Scalar(items.pop().unwrap())
        } else {
            Val::Matrix(Mat { dims, items, name: decl.name.clone() })
        };
        inst.globals.insert(decl.name.clone(), val);
    }

    for c in &src.constraints {
        let e = normalize(&inst.scalar(c)?);
        match e {
            Expr::Bool(true) => {}
            Expr::And(xs) => model.constraints.extend(xs),
            other => model.constraints.push(other),
        }
    }
    if model.constraints.iter().any(|c| c == &Expr::Bool(false)) {
        model.mark_unsat();
    }
    if let Some((sense, e)) = &src.objective {
        let expr = normalize(&inst.scalar(e)?);
        let sense = match sense {
            SSense::Minimising => Sense::Minimise,
            SSense::Maximising => Sense::Maximise,
        };
        model.objective = Some(Objective { sense, expr });
    }
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_model, parse_params};

    fn build(model: &str, params: &str) -> Result<Model> {
        instantiate(&parse_model(model).unwrap(), &parse_params(params).unwrap())
    }

    #[test]
    fn cell_names() {
        assert_eq!(cell_name("tour", &[0]), "tour_0");
        assert_eq!(cell_name("P", &[1, 2]), "P_1_2");
        assert_eq!(cell_name("x", &[-1]), "x_n1");
    }

    #[test]
    fn empty_forall_is_dropped() {
        let m = build("find x : matrix indexed by [int(1..2)] of int(0..3) such that forAll i : int(1..0) . x[i] = 1", "").unwrap();
        assert!(m.constraints.is_empty());
        let m = build("find x : int(0..3) such that exists i : int(1..0) . x = i", "").unwrap();
        assert!(m.is_unsat());
    }

    #[test]
    fn constant_index_out_of_bounds() {
        let err = build("find x : matrix indexed by [int(1..2)] of int(0..3) such that x[3] = 1", "").unwrap_err();
        assert!(matches!(err, InstantiateError::IndexOutOfBounds { index: 3, .. }));
    }

    #[test]
    fn variable_index_becomes_element() {
        let m = build(
            "letting t = [5, 6, 7] find i : int(1..3) find y : int(0..9) such that t[i] = y",
            "",
        )
        .unwrap();
        assert_eq!(m.constraints.len(), 1);
        let mut found = false;
        let mut stack = vec![&m.constraints[0]];
        while let Some(e) = stack.pop() {
            if let Expr::Element(arr, idx) = e {
                assert_eq!(arr.len(), 3);
                assert_eq!(**idx, Expr::sum(vec![(1, Expr::var("i"))], -1));
                found = true;
            }
            stack.extend(e.children());
        }
        assert!(found);
    }

    #[test]
    fn params_are_checked() {
        let model = "given n : int given s : int(0..n-1) find x : int(0..1) such that x <= s";
        let src = parse_model(model).unwrap();
        let err = instantiate(&src, &parse_params("letting n = 4").unwrap()).unwrap_err();
        assert_eq!(err, InstantiateError::MissingParam("s".into()));
        let err = instantiate(&src, &parse_params("letting n = 4 letting s = 4").unwrap()).unwrap_err();
        assert!(matches!(err, InstantiateError::OutOfRange { .. }));
        let err = instantiate(&src, &parse_params("letting n = 4 letting s = 0 letting z = 1").unwrap())
            .unwrap_err();
        assert_eq!(err, InstantiateError::ExtraParam("z".into()));
    }
}
