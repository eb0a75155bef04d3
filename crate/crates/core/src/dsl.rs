//! The `.pde` system description language.
//!
//! ```text
//! # Macaulay
//! field rational(x1,x2,x3)
//! unknowns y
//! eq D[3,3] y = 0
//! eq D[1,3] y - D[2] y = 0
//! ```

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::coefficients::{Poly, Scalar};
use crate::janet::{CoordChange, JanetError, JetSystem};
use crate::ore::{Jet, MultiIndex, Names, OpMatrix, Row};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}, column {col}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    Rational,
    Constants,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Equation {
    /// Left side minus the unknown part of the right side.
    pub lhs: Row,
    /// Right side in the source names.
    pub rhs: Row,
}

#[derive(Debug, Clone)]
pub struct SystemFile {
    pub name: Option<String>,
    pub field: FieldKind,
    pub vars: Vec<String>,
    pub unknowns: Vec<String>,
    pub sources: Vec<String>,
    pub lets: Vec<(String, Scalar)>,
    pub order: Option<u32>,
    pub coords: Option<Vec<Vec<i64>>>,
    pub tasks: Option<Vec<String>>,
    pub params: BTreeMap<String, String>,
    pub equations: Vec<Equation>,
    /// `(line, column)` of each equation.
    pub spans: Vec<(usize, usize)>,
}

impl PartialEq for SystemFile {
    fn eq(&self, o: &Self) -> bool {
        self.name == o.name
            && self.field == o.field
            && self.vars == o.vars
            && self.unknowns == o.unknowns
            && self.sources == o.sources
            && self.lets == o.lets
            && self.order == o.order
            && self.coords == o.coords
            && self.tasks == o.tasks
            && self.params == o.params
            && self.equations == o.equations
    }
}

impl SystemFile {
    pub fn n(&self) -> usize {
        self.vars.len()
    }

    pub fn m(&self) -> usize {
        self.unknowns.len()
    }

    pub fn names(&self) -> Names {
        Names::new(self.vars.clone(), self.unknowns.clone())
    }

    pub fn source_names(&self) -> Names {
        Names::new(self.vars.clone(), self.sources.clone())
    }

    pub fn matrix(&self) -> OpMatrix {
        OpMatrix::from_rows(self.n(), self.m(), self.equations.iter().map(|e| e.lhs.clone()).collect())
    }

    /// Right sides as a matrix over the sources.
    pub fn source_matrix(&self) -> OpMatrix {
        OpMatrix::from_rows(self.n(), self.sources.len(), self.equations.iter().map(|e| e.rhs.clone()).collect())
    }

    /// The system in the declared coordinates, with the `coords` change applied.
    pub fn system(&self) -> Result<JetSystem, JanetError> {
        let mut s = JetSystem::new(self.n(), self.m(), self.equations.iter().map(|e| e.lhs.clone()).collect());
        if let Some(q) = self.order {
            s = s.with_order(q);
        }
        match self.coordinate_change() {
            Some(c) => s.change_coordinates_by(&c),
            None => Ok(s),
        }
    }

    pub fn coordinate_change(&self) -> Option<CoordChange> {
        self.coords.as_ref().and_then(|c| CoordChange::from_ints(c))
    }

    /// `(P, C)` when every source appears alone on the right of one equation and
    /// the other right sides vanish: row `j` of `P` is the equation for source `j`.
    pub fn sourced_split(&self) -> Option<(OpMatrix, OpMatrix)> {
        let mut p: Vec<Option<Row>> = vec![None; self.sources.len()];
        let mut c = Vec::new();
        for e in &self.equations {
            if e.rhs.is_zero() {
                c.push(e.lhs.clone());
                continue;
            }
            let (j, coef) = e.rhs.leading()?;
            if e.rhs.len() != 1 || !j.mu.is_zero() || p[j.unknown].is_some() {
                return None;
            }
            p[j.unknown] = Some(e.lhs.scale(&Scalar::one().div(coef).ok()?));
        }
        let p: Vec<Row> = p.into_iter().collect::<Option<_>>()?;
        Some((OpMatrix::from_rows(self.n(), self.m(), p), OpMatrix::from_rows(self.n(), self.m(), c)))
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Num(BigInt),
    Sym(char),
}

struct Lexer {
    toks: Vec<(Tok, usize)>,
}

fn lex(line: &str, lineno: usize) -> Result<Lexer, ParseError> {
    let chars: Vec<char> = line.chars().collect();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c == '#' {
            break;
        } else if c.is_ascii_alphabetic() || c == '_' {
            let s = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            toks.push((Tok::Ident(chars[s..i].iter().collect()), s + 1));
        } else if c.is_ascii_digit() {
            let s = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let txt: String = chars[s..i].iter().collect();
            toks.push((Tok::Num(txt.parse().expect("digits")), s + 1));
        } else if "+-*/^()[],=".contains(c) {
            toks.push((Tok::Sym(c), i + 1));
            i += 1;
        } else {
            return Err(ParseError { line: lineno, col: i + 1, msg: format!("unexpected character '{c}'") });
        }
    }
    Ok(Lexer { toks })
}

#[derive(Clone, Debug)]
enum Val {
    Scalar(Scalar),
    Lin(Row, Row),
}

struct Ctx<'a> {
    vars: &'a [String],
    unknowns: &'a [String],
    sources: &'a [String],
    lets: &'a [(String, Scalar)],
    constants: bool,
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    line: usize,
    end_col: usize,
    ctx: &'a Ctx<'a>,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        let col = self.toks.get(self.pos).map_or(self.end_col, |t| t.1);
        Err(ParseError { line: self.line, col, msg: msg.into() })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.pos + k).map(|t| &t.0)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(format!("syntax error: expected '{c}'"))
        }
    }

    fn expr(&mut self) -> Result<Val, ParseError> {
        let mut acc = if self.eat('-') {
            let t = self.term()?;
            self.neg(t)
        } else {
            self.eat('+');
            self.term()?
        };
        loop {
            if self.eat('+') {
                let t = self.term()?;
                acc = self.add(acc, t)?;
            } else if self.eat('-') {
                let t = self.term()?;
                let t = self.neg(t);
                acc = self.add(acc, t)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn neg(&self, v: Val) -> Val {
        match v {
            Val::Scalar(s) => Val::Scalar(-s),
            Val::Lin(a, b) => Val::Lin(-&a, -&b),
        }
    }

    fn add(&self, a: Val, b: Val) -> Result<Val, ParseError> {
        match (a, b) {
            (Val::Scalar(x), Val::Scalar(y)) => Ok(Val::Scalar(x + y)),
            (Val::Lin(a1, b1), Val::Lin(a2, b2)) => Ok(Val::Lin(&a1 + &a2, &b1 + &b2)),
            (Val::Scalar(x), l @ Val::Lin(..)) | (l @ Val::Lin(..), Val::Scalar(x)) if x.is_zero() => Ok(l),
            _ => self.err("inhomogeneous term"),
        }
    }

    fn term(&mut self) -> Result<Val, ParseError> {
        let mut acc = self.factor()?;
        loop {
            if self.eat('*') {
                let f = self.factor()?;
                acc = self.mul(acc, f)?;
            } else if self.eat('/') {
                let f = self.factor()?;
                let Val::Scalar(d) = f else { return self.err("division by a jet") };
                let Ok(inv) = d.inverse() else { return self.err("zero-divisor") };
                acc = self.mul(acc, Val::Scalar(inv))?;
            } else if matches!(self.peek(), Some(Tok::Ident(s)) if s == "D") && matches!(acc, Val::Scalar(_)) {
                // juxtaposition `2 D[1] y`
                let f = self.factor()?;
                acc = self.mul(acc, f)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn mul(&self, a: Val, b: Val) -> Result<Val, ParseError> {
        match (a, b) {
            (Val::Scalar(x), Val::Scalar(y)) => Ok(Val::Scalar(x * y)),
            (Val::Scalar(x), Val::Lin(r, s)) | (Val::Lin(r, s), Val::Scalar(x)) => Ok(Val::Lin(r.scale(&x), s.scale(&x))),
            _ => self.err("product of jets"),
        }
    }

    fn factor(&mut self) -> Result<Val, ParseError> {
        let base = self.atom()?;
        if self.peek() == Some(&Tok::Sym('^')) {
            if let Val::Scalar(s) = &base {
                self.pos += 1;
                let neg = self.eat('-');
                let Some(Tok::Num(e)) = self.peek().cloned() else { return self.err("syntax error: expected exponent") };
                self.pos += 1;
                let e: u32 = e
                    .try_into()
                    .ok()
                    .filter(|e| *e <= MAX_EXPONENT)
                    .ok_or_else(|| ParseError { line: self.line, col: 0, msg: "exponent too large".into() })?;
                let p = s.pow(e);
                return if neg {
                    match p.inverse() {
                        Ok(i) => Ok(Val::Scalar(i)),
                        Err(_) => self.err("zero-divisor"),
                    }
                } else {
                    Ok(Val::Scalar(p))
                };
            }
            return self.err("power of a jet");
        }
        Ok(base)
    }

    /// Identifier possibly followed by `^digits` when that names an unknown or source.
    fn name(&mut self, id: String) -> String {
        if let (Some(Tok::Sym('^')), Some(Tok::Num(k))) = (self.peek(), self.peek_at(1)) {
            let full = format!("{id}^{k}");
            if self.ctx.unknowns.contains(&full) || self.ctx.sources.contains(&full) {
                self.pos += 2;
                return full;
            }
        }
        id
    }

    fn jet_of(&self, name: &str, mu: MultiIndex) -> Result<Val, ParseError> {
        if let Some(k) = self.ctx.unknowns.iter().position(|u| u == name) {
            return Ok(Val::Lin(Row::jet(Jet::new(k, mu)), Row::zero()));
        }
        if let Some(k) = self.ctx.sources.iter().position(|u| u == name) {
            return Ok(Val::Lin(Row::zero(), Row::jet(Jet::new(k, mu))));
        }
        self.err(format!("unknown variable '{name}'"))
    }

    fn sugar(&self, axes: &str) -> Result<MultiIndex, ParseError> {
        let n = self.ctx.vars.len();
        if n > 9 {
            return self.err("bad multi-index");
        }
        let mut v = Vec::new();
        for ch in axes.chars() {
            let a = ch.to_digit(10).ok_or(()).or_else(|_| self.err("bad multi-index"))? as usize;
            if a == 0 || a > n {
                return self.err("axis out of range");
            }
            v.push(a - 1);
        }
        if v.is_empty() {
            return self.err("bad multi-index");
        }
        Ok(MultiIndex::from_axes(&v))
    }

    fn atom(&mut self) -> Result<Val, ParseError> {
        let Some(t) = self.peek().cloned() else { return self.err("syntax error: unexpected end of line") };
        match t {
            Tok::Num(v) => {
                self.pos += 1;
                Ok(Val::Scalar(Scalar::from_rational(BigRational::from_integer(v))))
            }
            Tok::Sym('(') => {
                self.pos += 1;
                let v = self.expr()?;
                self.expect(')')?;
                Ok(v)
            }
            Tok::Ident(id) if id == "D" && self.peek_at(1) == Some(&Tok::Sym('[')) => {
                self.pos += 2;
                let mut axes = Vec::new();
                loop {
                    let Some(Tok::Num(a)) = self.peek().cloned() else { return self.err("bad multi-index") };
                    let a: usize = a.try_into().unwrap_or(usize::MAX);
                    if a == 0 || a > self.ctx.vars.len() {
                        return self.err("axis out of range");
                    }
                    axes.push(a - 1);
                    self.pos += 1;
                    if self.eat(']') {
                        break;
                    }
                    self.expect(',')?;
                }
                let Some(Tok::Ident(u)) = self.peek().cloned() else { return self.err("syntax error: expected unknown") };
                self.pos += 1;
                let u = self.name(u);
                self.jet_of(&u, MultiIndex::from_axes(&axes))
            }
            Tok::Ident(id) => {
                self.pos += 1;
                let id = self.name(id);
                // `y^1_22` lexes as the name followed by an identifier `_22`
                if let Some(Tok::Ident(s)) = self.peek().cloned() {
                    if let Some(rest) = s.strip_prefix('_') {
                        if self.ctx.unknowns.contains(&id) || self.ctx.sources.contains(&id) {
                            self.pos += 1;
                            let mu = self.sugar(rest)?;
                            return self.jet_of(&id, mu);
                        }
                    }
                }
                if self.ctx.unknowns.contains(&id) || self.ctx.sources.contains(&id) {
                    return self.jet_of(&id, MultiIndex::zero());
                }
                if let Some(i) = self.ctx.vars.iter().position(|v| *v == id) {
                    if self.ctx.constants {
                        return self.err(format!("coefficient '{id}' not allowed over constants"));
                    }
                    return Ok(Val::Scalar(Scalar::var(i)));
                }
                if let Some((_, s)) = self.ctx.lets.iter().rev().find(|(n, _)| *n == id) {
                    return Ok(Val::Scalar(s.clone()));
                }
                if let Some((base, axes)) = id.rsplit_once('_') {
                    if self.ctx.unknowns.iter().any(|u| u == base) || self.ctx.sources.iter().any(|u| u == base) {
                        let mu = self.sugar(axes)?;
                        return self.jet_of(base, mu);
                    }
                }
                self.err(format!("unknown variable '{id}'"))
            }
            Tok::Sym(c) => self.err(format!("syntax error: unexpected '{c}'")),
        }
    }
}

fn split_names(rest: &str) -> Vec<String> {
    rest.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()).map(str::to_string).collect()
}

fn valid_name(s: &str) -> bool {
    let (base, sup) = match s.split_once('^') {
        Some((b, k)) => (b, Some(k)),
        None => (s, None),
    };
    let mut ch = base.chars();
    matches!(ch.next(), Some(c) if c.is_ascii_alphabetic())
        && base.chars().all(|c| c.is_ascii_alphanumeric())
        && base != "D"
        && sup.is_none_or(|k| !k.is_empty() && k.chars().all(|c| c.is_ascii_digit()))
}

/// Parse a `.pde` source.
/// Largest exponent accepted after `^`.
pub const MAX_EXPONENT: u32 = 64;

pub fn parse(src: &str) -> Result<SystemFile, ParseError> {
    let mut f = SystemFile {
        name: None,
        field: FieldKind::Rational,
        vars: Vec::new(),
        unknowns: Vec::new(),
        sources: Vec::new(),
        lets: Vec::new(),
        order: None,
        coords: None,
        tasks: None,
        params: BTreeMap::new(),
        equations: Vec::new(),
        spans: Vec::new(),
    };
    let mut have_field = false;
    for (ln, raw) in src.lines().enumerate() {
        let line = ln + 1;
        let text = raw.split('#').next().unwrap_or("");
        let trimmed = text.trim_start();
        if trimmed.trim().is_empty() {
            continue;
        }
        let indent = text.len() - trimmed.len();
        let (kw, rest) = match trimmed.find(char::is_whitespace) {
            Some(p) => (&trimmed[..p], trimmed[p..].trim()),
            None => (trimmed.trim(), ""),
        };
        let rest_col = indent + kw.len() + 2;
        let err = |col: usize, msg: &str| ParseError { line, col, msg: msg.to_string() };
        match kw {
            "name" => f.name = Some(rest.to_string()),
            "field" => {
                let (kind, inner) = if let Some(x) = rest.strip_prefix("rational") {
                    (FieldKind::Rational, x)
                } else if let Some(x) = rest.strip_prefix("constants") {
                    (FieldKind::Constants, x)
                } else {
                    return Err(err(rest_col, "syntax error: expected rational(...) or constants(...)"));
                };
                let inner = inner.trim();
                let Some(body) = inner.strip_prefix('(').and_then(|x| x.strip_suffix(')')) else {
                    return Err(err(rest_col, "syntax error: expected variable list"));
                };
                let vars = split_names(body);
                if vars.is_empty() || vars.iter().any(|v| !valid_name(v) || v.contains('^')) {
                    return Err(err(rest_col, "syntax error: bad variable list"));
                }
                f.field = kind;
                f.vars = vars;
                have_field = true;
            }
            "unknowns" | "sources" => {
                let names = split_names(rest);
                if names.is_empty() || names.iter().any(|v| !valid_name(v)) {
                    return Err(err(rest_col, "syntax error: bad name list"));
                }
                if kw == "unknowns" {
                    f.unknowns = names;
                } else {
                    f.sources = names;
                }
            }
            "order" => {
                f.order = Some(rest.parse().map_err(|_| err(rest_col, "syntax error: expected order"))?);
            }
            "tasks" => f.tasks = Some(split_names(rest)),
            "param" => {
                let (k, v) = rest.split_once('=').ok_or_else(|| err(rest_col, "syntax error: expected '='"))?;
                f.params.insert(k.trim().to_string(), v.trim().to_string());
            }
            "coords" => {
                let rows: Vec<Vec<i64>> = rest
                    .split(';')
                    .map(|r| r.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()).map(str::parse).collect())
                    .collect::<Result<_, _>>()
                    .map_err(|_| err(rest_col, "syntax error: bad coordinate matrix"))?;
                let n = rows.len();
                if n == 0 || rows.iter().any(|r| r.len() != n) {
                    return Err(err(rest_col, "syntax error: bad coordinate matrix"));
                }
                f.coords = Some(rows);
            }
            "let" | "eq" => {
                if !have_field {
                    return Err(err(indent + 1, "missing field declaration"));
                }
                let lx = lex(text, line)?;
                let toks: Vec<(Tok, usize)> = lx.toks.into_iter().skip(1).collect();
                let ctx = Ctx {
                    vars: &f.vars,
                    unknowns: &f.unknowns,
                    sources: &f.sources,
                    lets: &f.lets,
                    constants: f.field == FieldKind::Constants,
                };
                let mut p = Parser { toks, pos: 0, line, end_col: text.len() + 1, ctx: &ctx };
                if kw == "let" {
                    let Some(Tok::Ident(name)) = p.peek().cloned() else { return p.err("syntax error: expected name") };
                    p.pos += 1;
                    p.expect('=')?;
                    let v = p.expr()?;
                    if p.pos < p.toks.len() {
                        return p.err("syntax error: trailing input");
                    }
                    let Val::Scalar(s) = v else { return p.err("let must be a scalar") };
                    f.lets.push((name, s));
                } else {
                    if f.unknowns.is_empty() {
                        return Err(err(indent + 1, "missing unknowns declaration"));
                    }
                    let l = p.expr()?;
                    p.expect('=')?;
                    let r = p.expr()?;
                    if p.pos < p.toks.len() {
                        return p.err("syntax error: trailing input");
                    }
                    let lin = |v: Val| match v {
                        Val::Scalar(s) if s.is_zero() => Some((Row::zero(), Row::zero())),
                        Val::Scalar(_) => None,
                        Val::Lin(a, b) => Some((a, b)),
                    };
                    let (Some((la, lb)), Some((ra, rb))) = (lin(l), lin(r)) else {
                        return Err(err(rest_col, "inhomogeneous term"));
                    };
                    f.equations.push(Equation { lhs: &la - &ra, rhs: &rb - &lb });
                    f.spans.push((line, rest_col));
                }
            }
            _ => return Err(err(indent + 1, &format!("syntax error: unknown directive '{kw}'"))),
        }
    }
    if !have_field {
        return Err(ParseError { line: 1, col: 1, msg: "missing field declaration".into() });
    }
    if f.unknowns.is_empty() {
        return Err(ParseError { line: 1, col: 1, msg: "missing unknowns declaration".into() });
    }
    if let Some(c) = &f.coords {
        if c.len() != f.vars.len() {
            return Err(ParseError { line: 1, col: 1, msg: "coordinate matrix size".into() });
        }
        if CoordChange::from_ints(c).is_none() {
            return Err(ParseError { line: 1, col: 1, msg: "singular coordinate matrix".into() });
        }
    }
    Ok(f)
}

fn print_scalar_decl(s: &Scalar, vars: &[String]) -> String {
    s.render(vars)
}

/// Canonical text form; `parse(print(f)) == f`.
pub fn print(f: &SystemFile) -> String {
    let mut out = String::new();
    if let Some(n) = &f.name {
        out.push_str(&format!("name {n}\n"));
    }
    let kind = match f.field {
        FieldKind::Rational => "rational",
        FieldKind::Constants => "constants",
    };
    out.push_str(&format!("field {kind}({})\n", f.vars.join(",")));
    out.push_str(&format!("unknowns {}\n", f.unknowns.join(", ")));
    if !f.sources.is_empty() {
        out.push_str(&format!("sources {}\n", f.sources.join(", ")));
    }
    if let Some(q) = f.order {
        out.push_str(&format!("order {q}\n"));
    }
    if let Some(c) = &f.coords {
        let rows: Vec<String> =
            c.iter().map(|r| r.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")).collect();
        out.push_str(&format!("coords {}\n", rows.join("; ")));
    }
    if let Some(t) = &f.tasks {
        out.push_str(&format!("tasks {}\n", t.join(", ")));
    }
    for (k, v) in &f.params {
        out.push_str(&format!("param {k} = {v}\n"));
    }
    for (n, s) in &f.lets {
        out.push_str(&format!("let {n} = {}\n", print_scalar_decl(s, &f.vars)));
    }
    let names = f.names();
    let snames = f.source_names();
    for e in &f.equations {
        out.push_str(&format!("eq {} = {}\n", names.row(&e.lhs), snames.row(&e.rhs)));
    }
    out
}

impl fmt::Display for SystemFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print(self))
    }
}

/// Parse a standalone scalar such as `(x1 + 1)/x2^2` over the given variables.
pub fn parse_scalar(src: &str, vars: &[String]) -> Result<Scalar, ParseError> {
    let lx = lex(src, 1)?;
    let ctx = Ctx { vars, unknowns: &[], sources: &[], lets: &[], constants: false };
    let mut p = Parser { toks: lx.toks, pos: 0, line: 1, end_col: src.len() + 1, ctx: &ctx };
    let v = p.expr()?;
    if p.pos < p.toks.len() {
        return p.err("syntax error: trailing input");
    }
    match v {
        Val::Scalar(s) => Ok(s),
        Val::Lin(..) => p.err("expected a scalar"),
    }
}

/// Polynomial helper for callers building coefficients programmatically.
pub fn poly_var(i: usize) -> Poly {
    Poly::var(i)
}
