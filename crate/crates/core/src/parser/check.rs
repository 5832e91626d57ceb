//! Identifier resolution and static typing of a parsed model.

use std::collections::HashMap;

use super::syntax::*;
use super::{ParseError, Pos};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Ty {
    Int,
    Bool,
    /// Element is Boolean when the flag is set; second field is the rank.
    Matrix(bool, usize),
}

impl Ty {
    fn is_scalar(self) -> bool {
        matches!(self, Ty::Int | Ty::Bool)
    }

    fn describe(self) -> String {
        match self {
            Ty::Int => "int".into(),
            Ty::Bool => "bool".into(),
            Ty::Matrix(b, d) => {
                format!("{d}-dimensional matrix of {}", if b { "bool" } else { "int" })
            }
        }
    }
}

struct Env {
    frames: Vec<HashMap<String, Ty>>,
}

impl Env {
    fn lookup(&self, name: &str) -> Option<Ty> {
        self.frames.iter().rev().find_map(|f| f.get(name).copied())
    }

    fn declare(&mut self, name: &str, ty: Ty, pos: Pos) -> Result<(), ParseError> {
        if self.lookup(name).is_some() {
            return Err(ParseError::Duplicate { pos, name: name.to_string() });
        }
        self.frames.last_mut().unwrap().insert(name.to_string(), ty);
        Ok(())
    }
}

fn mismatch<T>(pos: Pos, msg: String) -> Result<T, ParseError> {
    Err(ParseError::TypeMismatch { pos, msg })
}

fn expect_scalar(e: &SExpr, env: &mut Env, what: &str) -> Result<Ty, ParseError> {
    let t = check(e, env)?;
    if !t.is_scalar() {
        return mismatch(e.pos, format!("{what} must be a scalar, found {}", t.describe()));
    }
    Ok(t)
}

fn expect_bool(e: &SExpr, env: &mut Env, what: &str) -> Result<(), ParseError> {
    let t = check(e, env)?;
    if t != Ty::Bool {
        return mismatch(e.pos, format!("{what} must be bool, found {}", t.describe()));
    }
    Ok(())
}

fn check_domain(d: &SDomain, env: &mut Env, pos: Pos) -> Result<Ty, ParseError> {
    Ok(match d {
        SDomain::Bool => Ty::Bool,
        SDomain::Int(ranges) => {
            for r in ranges {
                match r {
                    SRange::Single(e) => {
                        expect_scalar(e, env, "domain bound")?;
                    }
                    SRange::Span(a, b) => {
                        expect_scalar(a, env, "domain bound")?;
                        expect_scalar(b, env, "domain bound")?;
                    }
                }
            }
            Ty::Int
        }
        SDomain::Matrix(idx, elem) => {
            for i in idx {
                if check_domain(i, env, pos)? != Ty::Int {
                    return mismatch(pos, "matrix index domain must be int".into());
                }
            }
            let el = check_domain(elem, env, pos)?;
            if !el.is_scalar() {
                return mismatch(pos, "matrix of matrices".into());
            }
            Ty::Matrix(el == Ty::Bool, idx.len())
        }
    })
}

fn check_generators(gens: &[Generator], env: &mut Env, pos: Pos) -> Result<(), ParseError> {
    for g in gens {
        match g {
            Generator::Range(names, d) => {
                if check_domain(d, env, pos)? != Ty::Int {
                    return mismatch(pos, "quantifier domain must be int".into());
                }
                for n in names {
                    if env.lookup(n).is_some() {
                        return Err(ParseError::Duplicate { pos, name: n.clone() });
                    }
                    env.frames.last_mut().unwrap().insert(n.clone(), Ty::Int);
                }
            }
            Generator::Guard(e) => expect_bool(e, env, "guard")?,
        }
    }
    Ok(())
}

fn check(e: &SExpr, env: &mut Env) -> Result<Ty, ParseError> {
    Ok(match &e.kind {
        SKind::Int(_) => Ty::Int,
        SKind::Bool(_) => Ty::Bool,
        SKind::Ident(n) => env
            .lookup(n)
            .ok_or_else(|| ParseError::UnknownIdentifier { pos: e.pos, name: n.clone() })?,
        SKind::Unary(UnOp::Not, a) => {
            expect_bool(a, env, "operand of `!`")?;
            Ty::Bool
        }
        SKind::Unary(_, a) => {
            expect_scalar(a, env, "arithmetic operand")?;
            Ty::Int
        }
        SKind::Binary(op, a, b) => {
            if op.is_arithmetic() {
                expect_scalar(a, env, "arithmetic operand")?;
                expect_scalar(b, env, "arithmetic operand")?;
                Ty::Int
            } else if op.is_relational() {
                expect_scalar(a, env, "operand of a relation")?;
                expect_scalar(b, env, "operand of a relation")?;
                Ty::Bool
            } else {
                let what = format!("operand of `{}`", op.symbol());
                expect_bool(a, env, &what)?;
                expect_bool(b, env, &what)?;
                Ty::Bool
            }
        }
        SKind::Index(m, idx) => {
            let t = check(m, env)?;
            let Ty::Matrix(elem_bool, dims) = t else {
                return mismatch(e.pos, format!("cannot index a {}", t.describe()));
            };
            if idx.len() != dims {
                return mismatch(
                    e.pos,
                    format!("{dims}-dimensional matrix indexed with {} indices", idx.len()),
                );
            }
            for i in idx.iter().flatten() {
                expect_scalar(i, env, "index")?;
            }
            let slices = idx.iter().filter(|i| i.is_none()).count();
            match (slices, elem_bool) {
                (0, true) => Ty::Bool,
                (0, false) => Ty::Int,
                (s, b) => Ty::Matrix(b, s),
            }
        }
        SKind::Call(func, args) => {
            let arg = &args[0];
            let t = check(arg, env)?;
            match func {
                Func::ToInt => {
                    if t != Ty::Bool {
                        return mismatch(arg.pos, format!("toInt expects bool, found {}", t.describe()));
                    }
                    Ty::Int
                }
                Func::AllDiff | Func::Sum => {
                    if t.is_scalar() {
                        return mismatch(
                            arg.pos,
                            format!("{} expects a matrix, found {}", func.name(), t.describe()),
                        );
                    }
                    if *func == Func::AllDiff {
                        Ty::Bool
                    } else {
                        Ty::Int
                    }
                }
            }
        }
        SKind::MatrixLit(items) => {
            let mut tys = Vec::new();
            for it in items {
                tys.push(check(it, env)?);
            }
            match tys.first().copied() {
                None => Ty::Matrix(false, 1),
                Some(Ty::Matrix(b, d)) => {
                    if tys.iter().any(|&t| t != Ty::Matrix(b, d)) {
                        return mismatch(e.pos, "ragged matrix literal".into());
                    }
                    Ty::Matrix(b, d + 1)
                }
                Some(_) => {
                    if tys.iter().any(|t| !t.is_scalar()) {
                        return mismatch(e.pos, "matrix literal mixes scalars and matrices".into());
                    }
                    Ty::Matrix(tys.iter().all(|&t| t == Ty::Bool), 1)
                }
            }
        }
        SKind::Comprehension(body, gens) => {
            env.frames.push(HashMap::new());
            let r = check_generators(gens, env, e.pos).and_then(|_| expect_scalar(body, env, "comprehension body"));
            env.frames.pop();
            Ty::Matrix(r? == Ty::Bool, 1)
        }
        SKind::Quant(q, gens, body) => {
            env.frames.push(HashMap::new());
            let r = check_generators(gens, env, e.pos).and_then(|_| match q {
                Quantifier::Sum => expect_scalar(body, env, "sum body").map(|_| Ty::Int),
                _ => expect_bool(body, env, "quantifier body").map(|_| Ty::Bool),
            });
            env.frames.pop();
            r?
        }
        SKind::InSet(a, set) => {
            expect_scalar(a, env, "operand of `in`")?;
            for s in set {
                expect_scalar(s, env, "set element")?;
            }
            Ty::Bool
        }
    })
}

/// Resolves every identifier and checks operator typing.
pub fn check_model(src: &ModelSource) -> Result<(), ParseError> {
    let mut env = Env { frames: vec![HashMap::new()] };
    for p in &src.params {
        let t = check_domain(&p.domain, &mut env, p.pos)?;
        env.declare(&p.name, t, p.pos)?;
    }
    for c in &src.constants {
        let t = check(&c.value, &mut env)?;
        env.declare(&c.name, t, c.value.pos)?;
    }
    for v in &src.vars {
        if matches!(v.domain, SDomain::Int(ref r) if r.is_empty()) {
            return mismatch(v.pos, format!("decision variable `{}` needs a finite domain", v.name));
        }
        let t = check_domain(&v.domain, &mut env, v.pos)?;
        env.declare(&v.name, t, v.pos)?;
    }
    for c in &src.constraints {
        expect_bool(c, &mut env, "constraint")?;
    }
    if let Some((_, e)) = &src.objective {
        expect_scalar(e, &mut env, "objective")?;
    }
    Ok(())
}
