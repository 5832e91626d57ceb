//! Recursive-descent parser for model and parameter files.

use super::lexer::Tok;
use super::syntax::*;
use super::{ParseError, Pos};

const KEYWORDS: &[&str] = &[
    "given", "letting", "find", "such", "that", "minimising", "maximising", "forAll", "exists",
    "sum", "allDiff", "toInt", "true", "false", "int", "bool", "matrix", "indexed", "by", "of",
    "in", "be",
];

pub struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
}

/// A `letting` statement from a parameter file.
pub struct ParamStmt {
    pub name: String,
    pub value: SExpr,
    pub pos: Pos,
}

impl Parser {
    pub fn new(toks: Vec<(Tok, Pos)>) -> Self {
        Parser { toks, at: 0 }
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.at + k).min(self.toks.len() - 1)].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn error<T>(&self, expected: &str) -> Result<T, ParseError> {
        Err(ParseError::syntax(
            self.pos(),
            format!("expected {expected}, found {}", self.peek().describe()),
        ))
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: Tok) -> Result<(), ParseError> {
        if self.eat(&t) {
            Ok(())
        } else {
            self.error(&t.describe())
        }
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn eat_kw(&mut self, kw: &str) -> bool {
        if self.is_kw(kw) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_kw(&mut self, kw: &str) -> Result<(), ParseError> {
        if self.eat_kw(kw) {
            Ok(())
        } else {
            self.error(&format!("`{kw}`"))
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                let s = s.clone();
                self.bump();
                Ok(s)
            }
            _ => self.error("an identifier"),
        }
    }

    fn names(&mut self) -> Result<Vec<(String, Pos)>, ParseError> {
        let mut out = vec![(self.pos(), self.ident()?)];
        while self.eat(&Tok::Comma) {
            out.push((self.pos(), self.ident()?));
        }
        Ok(out.into_iter().map(|(p, n)| (n, p)).collect())
    }

    fn at_statement_start(&self) -> bool {
        ["given", "letting", "find", "such", "minimising", "maximising"]
            .iter()
            .any(|k| self.is_kw(k))
            || *self.peek() == Tok::Eof
    }

    pub fn model(&mut self) -> Result<ModelSource, ParseError> {
        let mut src = ModelSource::default();
        loop {
            let pos = self.pos();
            if self.eat_kw("given") {
                let names = self.names()?;
                self.expect(Tok::Colon)?;
                let domain = self.domain()?;
                for (name, pos) in names {
                    src.params.push(Decl { name, domain: domain.clone(), pos });
                }
            } else if self.eat_kw("letting") {
                let name = self.ident()?;
                if !self.eat_kw("be") {
                    self.expect(Tok::Eq)?;
                }
                let value = self.expr()?;
                src.constants.push(Letting { name, value });
            } else if self.eat_kw("find") {
                let names = self.names()?;
                self.expect(Tok::Colon)?;
                let domain = self.domain()?;
                for (name, pos) in names {
                    src.vars.push(Decl { name, domain: domain.clone(), pos });
                }
            } else if self.eat_kw("such") {
                self.expect_kw("that")?;
                loop {
                    if self.at_statement_start() {
                        break;
                    }
                    src.constraints.push(self.expr()?);
                    if !self.eat(&Tok::Comma) {
                        break;
                    }
                }
            } else if self.is_kw("minimising") || self.is_kw("maximising") {
                let sense = if self.eat_kw("minimising") {
                    SSense::Minimising
                } else {
                    self.bump();
                    SSense::Maximising
                };
                if src.objective.is_some() {
                    return Err(ParseError::syntax(pos, "more than one objective".into()));
                }
                src.objective = Some((sense, self.expr()?));
            } else if *self.peek() == Tok::Eof {
                return Ok(src);
            } else {
                return self.error("a statement (`given`, `letting`, `find`, `such that`, `minimising` or `maximising`)");
            }
        }
    }

    pub fn params(&mut self) -> Result<Vec<ParamStmt>, ParseError> {
        let mut out = Vec::new();
        while *self.peek() != Tok::Eof {
            self.expect_kw("letting")?;
            let pos = self.pos();
            let name = self.ident()?;
            if !self.eat_kw("be") {
                self.expect(Tok::Eq)?;
            }
            let value = self.expr()?;
            out.push(ParamStmt { name, value, pos });
        }
        Ok(out)
    }

    fn domain(&mut self) -> Result<SDomain, ParseError> {
        if self.eat_kw("bool") {
            return Ok(SDomain::Bool);
        }
        if self.eat_kw("int") {
            let mut ranges = Vec::new();
            if self.eat(&Tok::LParen) {
                loop {
                    let lo = self.expr()?;
                    if self.eat(&Tok::DotDot) {
                        ranges.push(SRange::Span(lo, self.expr()?));
                    } else {
                        ranges.push(SRange::Single(lo));
                    }
                    if !self.eat(&Tok::Comma) {
                        break;
                    }
                }
                self.expect(Tok::RParen)?;
            }
            return Ok(SDomain::Int(ranges));
        }
        if self.eat_kw("matrix") {
            self.expect_kw("indexed")?;
            self.expect_kw("by")?;
            self.expect(Tok::LBracket)?;
            let mut idx = vec![self.domain()?];
            while self.eat(&Tok::Comma) {
                idx.push(self.domain()?);
            }
            self.expect(Tok::RBracket)?;
            self.expect_kw("of")?;
            let elem = self.domain()?;
            return Ok(SDomain::Matrix(idx, Box::new(elem)));
        }
        self.error("a domain (`int(..)`, `bool` or `matrix indexed by`)")
    }

    pub fn expr(&mut self) -> Result<SExpr, ParseError> {
        let mut l = self.implies()?;
        while *self.peek() == Tok::Iff {
            self.bump();
            let r = self.implies()?;
            l = bin(BinOp::Iff, l, r);
        }
        Ok(l)
    }

    fn implies(&mut self) -> Result<SExpr, ParseError> {
        let l = self.or()?;
        if self.eat(&Tok::Implies) {
            let r = self.implies()?;
            return Ok(bin(BinOp::Implies, l, r));
        }
        Ok(l)
    }

    fn or(&mut self) -> Result<SExpr, ParseError> {
        let mut l = self.and()?;
        while self.eat(&Tok::Or) {
            let r = self.and()?;
            l = bin(BinOp::Or, l, r);
        }
        Ok(l)
    }

    fn and(&mut self) -> Result<SExpr, ParseError> {
        let mut l = self.relation()?;
        while self.eat(&Tok::And) {
            let r = self.relation()?;
            l = bin(BinOp::And, l, r);
        }
        Ok(l)
    }

    fn relation(&mut self) -> Result<SExpr, ParseError> {
        let l = self.additive()?;
        let op = match self.peek() {
            Tok::Eq => BinOp::Eq,
            Tok::Neq => BinOp::Neq,
            Tok::Lt => BinOp::Lt,
            Tok::Leq => BinOp::Leq,
            Tok::Gt => BinOp::Gt,
            Tok::Geq => BinOp::Geq,
            Tok::Ident(s) if s == "in" => {
                self.bump();
                self.expect(Tok::LBrace)?;
                let mut set = Vec::new();
                if *self.peek() != Tok::RBrace {
                    set.push(self.expr()?);
                    while self.eat(&Tok::Comma) {
                        set.push(self.expr()?);
                    }
                }
                self.expect(Tok::RBrace)?;
                let pos = l.pos;
                return Ok(SExpr { kind: SKind::InSet(Box::new(l), set), pos });
            }
            _ => return Ok(l),
        };
        self.bump();
        let r = self.additive()?;
        Ok(bin(op, l, r))
    }

    fn additive(&mut self) -> Result<SExpr, ParseError> {
        let mut l = self.multiplicative()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(l),
            };
            self.bump();
            let r = self.multiplicative()?;
            l = bin(op, l, r);
        }
    }

    fn multiplicative(&mut self) -> Result<SExpr, ParseError> {
        let mut l = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                Tok::Percent => BinOp::Mod,
                _ => return Ok(l),
            };
            self.bump();
            let r = self.unary()?;
            l = bin(op, l, r);
        }
    }

    fn unary(&mut self) -> Result<SExpr, ParseError> {
        let pos = self.pos();
        if self.eat(&Tok::Minus) {
            let a = self.unary()?;
            let kind = match a.kind {
                SKind::Int(v) => SKind::Int(v.checked_neg().ok_or_else(|| {
                    ParseError::syntax(pos, "integer literal out of range".into())
                })?),
                _ => SKind::Unary(UnOp::Neg, Box::new(a)),
            };
            return Ok(SExpr { kind, pos });
        }
        if self.eat(&Tok::Bang) {
            let a = self.unary()?;
            return Ok(SExpr { kind: SKind::Unary(UnOp::Not, Box::new(a)), pos });
        }
        self.postfix()
    }

    fn postfix(&mut self) -> Result<SExpr, ParseError> {
        let mut e = self.primary()?;
        while *self.peek() == Tok::LBracket {
            self.bump();
            let mut idx = vec![self.index_item()?];
            while self.eat(&Tok::Comma) {
                idx.push(self.index_item()?);
            }
            self.expect(Tok::RBracket)?;
            let pos = e.pos;
            e = SExpr { kind: SKind::Index(Box::new(e), idx), pos };
        }
        Ok(e)
    }

    fn index_item(&mut self) -> Result<Option<SExpr>, ParseError> {
        if self.eat(&Tok::DotDot) {
            Ok(None)
        } else {
            Ok(Some(self.expr()?))
        }
    }

    fn primary(&mut self) -> Result<SExpr, ParseError> {
        let pos = self.pos();
        let kind = match self.peek().clone() {
            Tok::Int(v) => {
                self.bump();
                SKind::Int(v)
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                return Ok(e);
            }
            Tok::Bar => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::Bar)?;
                SKind::Unary(UnOp::Abs, Box::new(e))
            }
            Tok::LBracket => {
                self.bump();
                if self.eat(&Tok::RBracket) {
                    SKind::MatrixLit(Vec::new())
                } else {
                    let first = self.expr()?;
                    if self.eat(&Tok::Bar) {
                        let gens = self.generators()?;
                        self.expect(Tok::RBracket)?;
                        SKind::Comprehension(Box::new(first), gens)
                    } else {
                        let mut items = vec![first];
                        while self.eat(&Tok::Comma) {
                            items.push(self.expr()?);
                        }
                        self.expect(Tok::RBracket)?;
                        SKind::MatrixLit(items)
                    }
                }
            }
            Tok::Ident(s) => match s.as_str() {
                "true" | "false" => {
                    self.bump();
                    SKind::Bool(s == "true")
                }
                "forAll" | "exists" => {
                    self.bump();
                    let q = if s == "forAll" { Quantifier::ForAll } else { Quantifier::Exists };
                    self.quantified(q)?
                }
                "sum" if *self.peek_at(1) != Tok::LParen => {
                    self.bump();
                    self.quantified(Quantifier::Sum)?
                }
                "allDiff" | "sum" | "toInt" => {
                    self.bump();
                    let func = match s.as_str() {
                        "allDiff" => Func::AllDiff,
                        "sum" => Func::Sum,
                        _ => Func::ToInt,
                    };
                    self.expect(Tok::LParen)?;
                    let arg = self.expr()?;
                    self.expect(Tok::RParen)?;
                    SKind::Call(func, vec![arg])
                }
                _ => SKind::Ident(self.ident()?),
            },
            _ => return self.error("an expression"),
        };
        Ok(SExpr { kind, pos })
    }

    fn quantified(&mut self, q: Quantifier) -> Result<SKind, ParseError> {
        let gens = self.generators()?;
        self.expect(Tok::Dot)?;
        let body = self.expr()?;
        Ok(SKind::Quant(q, gens, Box::new(body)))
    }

    /// Whether the tokens ahead read `name (, name)* :`.
    fn generator_ahead(&self) -> bool {
        let mut k = 0;
        loop {
            match self.peek_at(k) {
                Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {}
                _ => return false,
            }
            match self.peek_at(k + 1) {
                Tok::Colon => return true,
                Tok::Comma => k += 2,
                _ => return false,
            }
        }
    }

    fn generators(&mut self) -> Result<Vec<Generator>, ParseError> {
        let mut gens = Vec::new();
        loop {
            if self.generator_ahead() {
                let names = self.names()?.into_iter().map(|(n, _)| n).collect();
                self.expect(Tok::Colon)?;
                gens.push(Generator::Range(names, self.domain()?));
            } else {
                gens.push(Generator::Guard(self.expr()?));
            }
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        if !matches!(gens.first(), Some(Generator::Range(..))) {
            return self.error("a generator `name : domain`");
        }
        Ok(gens)
    }
}

fn bin(op: BinOp, l: SExpr, r: SExpr) -> SExpr {
    let pos = l.pos;
    SExpr { kind: SKind::Binary(op, Box::new(l), Box::new(r)), pos }
}
