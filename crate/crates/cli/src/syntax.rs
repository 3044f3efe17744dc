//! Lexer, parser and printer for `.fol` input files.

use std::collections::BTreeMap;
use std::fmt;

use folia_core::algebra::{AlgebraicValue, GaussianRational, Polynomial, Value, VarContext};
use folia_core::foliation::{Domain, SeparatrixCandidate};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use thiserror::Error;

const MAX_DEPTH: usize = 128;
const MAX_DEGREE: u32 = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorKind {
    Lex,
    Parse,
    Semantic,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub struct SyntaxError {
    pub kind: ErrorKind,
    pub line: usize,
    pub col: usize,
    pub message: String,
    pub snippet: String,
}

impl fmt::Display for SyntaxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            ErrorKind::Lex => "lex error",
            ErrorKind::Parse => "parse error",
            ErrorKind::Semantic => "semantic error",
        };
        write!(f, "{kind} at {}:{}: {}", self.line, self.col, self.message)?;
        if !self.snippet.is_empty() {
            write!(f, "\n{}", self.snippet)?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Int(BigInt),
    Str(String),
    Sym(&'static str),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "'{s}'"),
            Tok::Int(n) => write!(f, "'{n}'"),
            Tok::Str(s) => write!(f, "\"{s}\""),
            Tok::Sym(s) => write!(f, "'{s}'"),
            Tok::Eof => write!(f, "end of input"),
        }
    }
}

const SYMBOLS: [&str; 17] = ["->", "!=", "{", "}", "(", ")", "[", "]", ",", ";", ":", "+", "-", "*", "/", "^", "="];

fn snippet(src: &str, pos: Pos) -> String {
    let Some(line) = src.lines().nth(pos.line.saturating_sub(1)) else { return String::new() };
    let caret = " ".repeat(pos.col.saturating_sub(1)) + "^";
    format!("{line}\n{caret}")
}

fn err(src: &str, kind: ErrorKind, pos: Pos, message: impl Into<String>) -> SyntaxError {
    SyntaxError { kind, line: pos.line, col: pos.col, message: message.into(), snippet: snippet(src, pos) }
}

fn lex(src: &str) -> Result<Vec<(Tok, Pos)>, SyntaxError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            col += i - start;
            out.push((Tok::Ident(chars[start..i].iter().collect()), pos));
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            col += i - start;
            let s: String = chars[start..i].iter().collect();
            out.push((Tok::Int(s.parse().expect("digits")), pos));
            continue;
        }
        if c == '"' {
            let start = i + 1;
            i += 1;
            while i < chars.len() && chars[i] != '"' && chars[i] != '\n' {
                i += 1;
            }
            if i >= chars.len() || chars[i] != '"' {
                return Err(err(src, ErrorKind::Lex, pos, "unterminated string"));
            }
            col += i + 1 - (start - 1);
            out.push((Tok::Str(chars[start..i].iter().collect()), pos));
            i += 1;
            continue;
        }
        let rest: String = chars[i..chars.len().min(i + 2)].iter().collect();
        match SYMBOLS.iter().find(|s| rest.starts_with(*s)) {
            Some(s) => {
                i += s.len();
                col += s.len();
                out.push((Tok::Sym(s), pos));
            }
            None => return Err(err(src, ErrorKind::Lex, pos, format!("unexpected character '{c}'"))),
        }
    }
    out.push((Tok::Eof, Pos { line, col }));
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
enum Expr {
    Num(BigInt),
    Name(String, Pos),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>, Pos),
    Pow(Box<Expr>, u32, Pos),
    Root(Box<Expr>, usize, Pos),
}

#[derive(Clone, Debug)]
enum Decl {
    Vars(Vec<(String, Pos)>),
    Params(Vec<(String, Pos, Option<Expr>)>),
    Field(Vec<(String, Pos, Expr)>),
    Domain(Option<Expr>, Pos),
    Invariant(Expr),
    Separatrix(Vec<Expr>, Vec<Expr>, Pos),
    Factor(Expr, Vec<Expr>, Pos),
    Query(Vec<Expr>, Pos),
    QueryComponents,
    Assume(String),
    Change(Vec<Vec<Expr>>, Pos),
    Product(String, Pos),
}

struct Parser<'a> {
    src: &'a str,
    toks: Vec<(Tok, Pos)>,
    at: usize,
    depth: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn fail<T>(&self, msg: impl Into<String>) -> Result<T, SyntaxError> {
        Err(err(self.src, ErrorKind::Parse, self.pos(), msg))
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(x) if *x == s)
    }

    fn is_word(&self, w: &str) -> bool {
        matches!(self.peek(), Tok::Ident(x) if x == w)
    }

    fn expect_sym(&mut self, s: &str) -> Result<Pos, SyntaxError> {
        if self.is_sym(s) {
            Ok(self.bump().1)
        } else {
            self.fail(format!("expected '{s}', found {}", self.peek()))
        }
    }

    fn expect_word(&mut self, w: &str) -> Result<Pos, SyntaxError> {
        if self.is_word(w) {
            Ok(self.bump().1)
        } else {
            self.fail(format!("expected '{w}', found {}", self.peek()))
        }
    }

    fn ident(&mut self) -> Result<(String, Pos), SyntaxError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                let p = self.bump().1;
                Ok((s, p))
            }
            t => self.fail(format!("expected a name, found {t}")),
        }
    }

    fn file(&mut self) -> Result<(String, Vec<(Decl, Pos)>), SyntaxError> {
        self.expect_word("foliation")?;
        let name = match self.peek().clone() {
            Tok::Str(s) => {
                self.bump();
                s
            }
            t => return self.fail(format!("expected a quoted name, found {t}")),
        };
        self.expect_sym("{")?;
        let mut decls = Vec::new();
        while !self.is_sym("}") {
            let p = self.pos();
            decls.push((self.decl()?, p));
        }
        self.expect_sym("}")?;
        if *self.peek() != Tok::Eof {
            return self.fail(format!("unexpected {} after the closing brace", self.peek()));
        }
        Ok((name, decls))
    }

    fn decl(&mut self) -> Result<Decl, SyntaxError> {
        let (word, pos) = self.ident()?;
        let d = match word.as_str() {
            "vars" => {
                self.expect_sym(":")?;
                let mut names = vec![self.ident()?];
                while self.is_sym(",") {
                    self.bump();
                    names.push(self.ident()?);
                }
                Decl::Vars(names)
            }
            "params" => {
                self.expect_sym(":")?;
                let mut out = Vec::new();
                loop {
                    let (n, p) = self.ident()?;
                    let ex = if self.is_sym("!=") {
                        self.bump();
                        Some(self.expr()?)
                    } else {
                        None
                    };
                    out.push((n, p, ex));
                    if !self.is_sym(",") {
                        break;
                    }
                    self.bump();
                }
                Decl::Params(out)
            }
            "field" => {
                self.expect_sym("{")?;
                let mut comps = Vec::new();
                while !self.is_sym("}") {
                    let (n, p) = self.ident()?;
                    self.expect_sym(":")?;
                    let e = self.expr()?;
                    self.expect_sym(";")?;
                    comps.push((n, p, e));
                }
                self.expect_sym("}")?;
                if comps.is_empty() {
                    return Err(err(self.src, ErrorKind::Parse, pos, "empty field"));
                }
                return Ok(Decl::Field(comps));
            }
            "domain" => {
                self.expect_sym(":")?;
                let p = self.pos();
                if self.is_word("affine") {
                    self.bump();
                    Decl::Domain(None, p)
                } else {
                    self.expect_word("polydisc")?;
                    Decl::Domain(Some(self.expr()?), p)
                }
            }
            "invariant" => {
                self.expect_sym(":")?;
                Decl::Invariant(self.expr()?)
            }
            "separatrix" => {
                self.expect_word("at")?;
                let pt = self.point()?;
                self.expect_sym(":")?;
                self.expect_word("t")?;
                self.expect_sym("->")?;
                let curve = self.point()?;
                Decl::Separatrix(pt, curve, pos)
            }
            "factor" => {
                let lhs = self.expr()?;
                self.expect_sym("=")?;
                let mut fs = vec![self.unary()?];
                while self.is_sym("*") {
                    self.bump();
                    fs.push(self.unary()?);
                }
                Decl::Factor(lhs, fs, pos)
            }
            "query" => {
                if self.is_word("components") {
                    self.bump();
                    Decl::QueryComponents
                } else {
                    let p = self.pos();
                    Decl::Query(self.point()?, p)
                }
            }
            "assume" => {
                let (w, p) = self.ident()?;
                if w != "ncp" && w != "exhaustive" {
                    return Err(err(self.src, ErrorKind::Parse, p, format!("unknown assumption '{w}'")));
                }
                Decl::Assume(w)
            }
            "change" => {
                let p = self.pos();
                self.expect_sym("[")?;
                let mut rows = Vec::new();
                loop {
                    self.expect_sym("[")?;
                    let mut row = vec![self.expr()?];
                    while self.is_sym(",") {
                        self.bump();
                        row.push(self.expr()?);
                    }
                    self.expect_sym("]")?;
                    rows.push(row);
                    if !self.is_sym(",") {
                        break;
                    }
                    self.bump();
                }
                self.expect_sym("]")?;
                Decl::Change(rows, p)
            }
            "product" => {
                self.expect_sym(":")?;
                let (n, p) = self.ident()?;
                Decl::Product(n, p)
            }
            other => return Err(err(self.src, ErrorKind::Parse, pos, format!("unknown declaration '{other}'"))),
        };
        self.expect_sym(";")?;
        Ok(d)
    }

    fn point(&mut self) -> Result<Vec<Expr>, SyntaxError> {
        self.expect_sym("(")?;
        let mut out = vec![self.expr()?];
        while self.is_sym(",") {
            self.bump();
            out.push(self.expr()?);
        }
        self.expect_sym(")")?;
        Ok(out)
    }

    fn enter(&mut self) -> Result<(), SyntaxError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return self.fail("expression nested too deeply");
        }
        Ok(())
    }

    fn expr(&mut self) -> Result<Expr, SyntaxError> {
        self.enter()?;
        let mut lhs = self.term()?;
        loop {
            if self.is_sym("+") {
                self.bump();
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.is_sym("-") {
                self.bump();
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                break;
            }
        }
        self.depth -= 1;
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, SyntaxError> {
        let mut lhs = self.unary()?;
        loop {
            if self.is_sym("*") {
                self.bump();
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.is_sym("/") {
                let p = self.bump().1;
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?), p);
            } else {
                break;
            }
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, SyntaxError> {
        if self.is_sym("-") {
            self.bump();
            self.enter()?;
            let e = Expr::Neg(Box::new(self.unary()?));
            self.depth -= 1;
            return Ok(e);
        }
        if self.is_sym("+") {
            self.bump();
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, SyntaxError> {
        let base = self.atom()?;
        if self.is_sym("^") {
            let p = self.bump().1;
            let e = match self.peek().clone() {
                Tok::Int(n) => {
                    self.bump();
                    u32::try_from(n).ok().filter(|&e| e <= MAX_DEGREE)
                }
                _ => None,
            };
            let Some(e) = e else { return self.fail(format!("exponent must be an integer in 0..={MAX_DEGREE}")) };
            return Ok(Expr::Pow(Box::new(base), e, p));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, SyntaxError> {
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(Expr::Num(n))
            }
            Tok::Ident(s) if s == "root" => {
                let p = self.bump().1;
                self.expect_sym("(")?;
                let poly = self.expr()?;
                self.expect_sym(",")?;
                let k = match self.peek().clone() {
                    Tok::Int(n) => {
                        self.bump();
                        usize::try_from(n).ok()
                    }
                    _ => None,
                };
                let Some(k) = k else { return self.fail("expected a root index") };
                self.expect_sym(")")?;
                Ok(Expr::Root(Box::new(poly), k, p))
            }
            Tok::Ident(s) => {
                let p = self.bump().1;
                Ok(Expr::Name(s, p))
            }
            Tok::Sym("(") => {
                self.bump();
                let e = self.expr()?;
                self.expect_sym(")")?;
                Ok(e)
            }
            t => self.fail(format!("expected an expression, found {t}")),
        }
    }
}

/// Names visible to an expression and the slots they denote.
struct Scope<'a> {
    names: &'a BTreeMap<String, usize>,
    nslots: usize,
    what: &'a str,
}

struct Resolver<'a> {
    src: &'a str,
}

impl Resolver<'_> {
    fn sem<T>(&self, pos: Pos, msg: impl Into<String>) -> Result<T, SyntaxError> {
        Err(err(self.src, ErrorKind::Semantic, pos, msg))
    }

    fn poly(&self, e: &Expr, scope: &Scope) -> Result<Polynomial, SyntaxError> {
        let n = scope.nslots;
        Ok(match e {
            Expr::Num(k) => Polynomial::constant(n, GaussianRational::from_rational(BigRational::from_integer(k.clone()))),
            Expr::Name(s, p) => {
                if s == "i" {
                    Polynomial::constant(n, GaussianRational::i())
                } else {
                    match scope.names.get(s) {
                        Some(&slot) => Polynomial::var(n, slot),
                        None => return self.sem(*p, format!("unknown variable '{s}' in {}", scope.what)),
                    }
                }
            }
            Expr::Neg(a) => -&self.poly(a, scope)?,
            Expr::Add(a, b) => &self.poly(a, scope)? + &self.poly(b, scope)?,
            Expr::Sub(a, b) => &self.poly(a, scope)? - &self.poly(b, scope)?,
            Expr::Mul(a, b) => {
                let (x, y) = (self.poly(a, scope)?, self.poly(b, scope)?);
                if x.total_degree() + y.total_degree() > MAX_DEGREE {
                    return self.sem(Pos::default(), "polynomial degree too large");
                }
                &x * &y
            }
            Expr::Div(a, b, p) => {
                let den = self.poly(b, scope)?;
                match den.constant_value().and_then(|c| c.inv()) {
                    Some(inv) => self.poly(a, scope)?.scale(&inv),
                    None => return self.sem(*p, "division is only allowed by nonzero constants"),
                }
            }
            Expr::Pow(a, k, p) => {
                let x = self.poly(a, scope)?;
                if x.total_degree().saturating_mul(*k) > MAX_DEGREE || (x.nterms() > 1 && *k > 64) {
                    return self.sem(*p, "polynomial degree too large");
                }
                x.pow(*k)
            }
            Expr::Root(_, _, p) => return self.sem(*p, format!("root(...) is not allowed in {}", scope.what)),
        })
    }

    fn constant(&self, e: &Expr, pos: Pos, what: &str) -> Result<GaussianRational, SyntaxError> {
        let names = BTreeMap::new();
        let p = self.poly(e, &Scope { names: &names, nslots: 0, what })?;
        match p.constant_value() {
            Some(c) => Ok(c),
            None => self.sem(pos, format!("{what} must be a constant")),
        }
    }

    fn value(&self, e: &Expr, scope: &Scope) -> Result<Value, SyntaxError> {
        if let Expr::Root(poly, k, p) = e {
            let names: BTreeMap<String, usize> = [("t".to_string(), 0)].into_iter().collect();
            let q = self.poly(poly, &Scope { names: &names, nslots: 1, what: "a minimal polynomial" })?;
            let dense = AlgebraicValue::dense_from(&q, 0).filter(|d| d.len() >= 2);
            let Some(dense) = dense else { return self.sem(*p, "root(...) needs a nonconstant polynomial in t") };
            return match AlgebraicValue::new(dense, *k) {
                Ok(a) => Ok(match a.as_rational() {
                    Some(c) => Value::number(scope.nslots, c),
                    None => Value::Root(a),
                }),
                Err(e) => self.sem(*p, e.to_string()),
            };
        }
        Ok(Value::Sym(self.poly(e, scope)?))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FactorDecl {
    pub lhs: Polynomial,
    pub factors: Vec<Polynomial>,
}

/// A parsed and resolved input file. Polynomials live in the slots of `ctx`.
#[derive(Clone, Debug, PartialEq)]
pub struct FoliationFile {
    pub name: String,
    pub ctx: VarContext,
    /// Declared parameters with their excluded values, in declaration order.
    pub params: Vec<(String, Option<GaussianRational>)>,
    pub field: Vec<Polynomial>,
    pub domain: Domain,
    pub invariants: Vec<Polynomial>,
    pub separatrices: Vec<SeparatrixCandidate>,
    pub factors: Vec<FactorDecl>,
    pub queries: Vec<Vec<Value>>,
    pub query_components: bool,
    pub change: Option<Vec<Vec<GaussianRational>>>,
    pub assume_ncp: bool,
    pub assume_exhaustive: bool,
    pub product: Option<usize>,
}

pub fn parse_foliation_file(src: &str) -> Result<FoliationFile, SyntaxError> {
    let toks = lex(src)?;
    let mut parser = Parser { src, toks, at: 0, depth: 0 };
    let (name, decls) = parser.file()?;
    let r = Resolver { src };

    let mut vars: Option<Vec<(String, Pos)>> = None;
    let mut params: Vec<(String, Pos, Option<Expr>)> = Vec::new();
    let mut params_seen = false;
    for (d, pos) in &decls {
        match d {
            Decl::Vars(v) => {
                if vars.is_some() {
                    return r.sem(*pos, "duplicate vars declaration");
                }
                vars = Some(v.clone());
            }
            Decl::Params(p) => {
                if params_seen {
                    return r.sem(*pos, "duplicate params declaration");
                }
                params_seen = true;
                params = p.clone();
            }
            _ => {}
        }
    }
    let Some(vars) = vars else { return r.sem(Pos { line: 1, col: 1 }, "missing vars declaration") };
    let mut seen: BTreeMap<String, Pos> = BTreeMap::new();
    for (n, p) in vars.iter().map(|(n, p)| (n, p)).chain(params.iter().map(|(n, p, _)| (n, p))) {
        if n == "i" || n == "root" {
            return r.sem(*p, format!("'{n}' is reserved"));
        }
        if seen.insert(n.clone(), *p).is_some() {
            return r.sem(*p, format!("'{n}' is declared twice (parameter/variable clash)"));
        }
    }
    let mut side = Vec::new();
    let mut param_decls = Vec::new();
    for (n, p, ex) in &params {
        let value = match ex {
            Some(e) => {
                let c = r.constant(e, *p, "an excluded parameter value")?;
                side.push((n.clone(), c.clone()));
                Some(c)
            }
            None => None,
        };
        param_decls.push((n.clone(), value));
    }
    let ctx = VarContext::new(
        vars.iter().map(|(n, _)| n.clone()).collect(),
        params.iter().map(|(n, _, _)| n.clone()).collect(),
        side,
    )
    .map_err(|e| err(src, ErrorKind::Semantic, vars[0].1, e.to_string()))?;
    let nv = ctx.nvars();
    let ns = ctx.nslots();
    let user: BTreeMap<String, usize> = vars
        .iter()
        .map(|(n, _)| n.clone())
        .chain(params.iter().map(|(n, _, _)| n.clone()))
        .map(|n| {
            let s = ctx.slot(&n).expect("declared");
            (n, s)
        })
        .collect();
    let param_names: BTreeMap<String, usize> =
        user.iter().filter(|(_, &s)| s >= nv).map(|(n, &s)| (n.clone(), s)).collect();
    let mut curve_names = param_names.clone();
    curve_names.insert("t".into(), ns);
    let poly_scope = Scope { names: &user, nslots: ns, what: "a polynomial" };
    let point_scope = Scope { names: &param_names, nslots: ns, what: "a point (only parameters are allowed)" };
    let curve_scope = Scope { names: &curve_names, nslots: ns + 1, what: "a curve (only t and parameters are allowed)" };

    let mut file = FoliationFile {
        name,
        ctx: ctx.clone(),
        params: param_decls,
        field: Vec::new(),
        domain: Domain::Affine,
        invariants: Vec::new(),
        separatrices: Vec::new(),
        factors: Vec::new(),
        queries: Vec::new(),
        query_components: false,
        change: None,
        assume_ncp: false,
        assume_exhaustive: false,
        product: None,
    };
    let mut field: Option<Vec<Option<Polynomial>>> = None;
    let mut domain_seen = false;
    let point = |exprs: &[Expr], pos: Pos| -> Result<Vec<Value>, SyntaxError> {
        if exprs.len() != nv {
            return r.sem(pos, format!("point has {} coordinates, expected {nv}", exprs.len()));
        }
        let vals: Vec<Value> = exprs.iter().map(|e| r.value(e, &point_scope)).collect::<Result<_, _>>()?;
        if vals.iter().filter(|v| v.root().is_some()).map(|v| v.root()).collect::<std::collections::BTreeSet<_>>().len() > 1 {
            return r.sem(pos, "a point may use at most one algebraic number");
        }
        Ok(vals)
    };
    for (d, pos) in &decls {
        match d {
            Decl::Vars(_) | Decl::Params(_) => {}
            Decl::Field(comps) => {
                if field.is_some() {
                    return r.sem(*pos, "duplicate field declaration");
                }
                let mut f: Vec<Option<Polynomial>> = vec![None; nv];
                for (n, p, e) in comps {
                    let Some(k) = ctx.var_index(n) else {
                        return r.sem(*p, format!("unknown variable '{n}' in field component"));
                    };
                    if f[k].is_some() {
                        return r.sem(*p, format!("duplicate field component '{n}'"));
                    }
                    f[k] = Some(r.poly(e, &poly_scope)?);
                }
                field = Some(f);
            }
            Decl::Domain(e, p) => {
                if domain_seen {
                    return r.sem(*p, "duplicate domain declaration");
                }
                domain_seen = true;
                if let Some(e) = e {
                    let c = r.constant(e, *p, "the polydisc radius")?;
                    if !c.is_real() || c.re <= BigRational::zero() {
                        return r.sem(*p, "the polydisc radius must be a positive rational");
                    }
                    file.domain = Domain::Polydisc(c);
                }
            }
            Decl::Invariant(e) => {
                let f = r.poly(e, &poly_scope)?;
                if f.is_constant() {
                    return r.sem(*pos, "an invariant hypersurface needs a nonconstant polynomial");
                }
                file.invariants.push(f);
            }
            Decl::Separatrix(pt, curve, p) => {
                if ctx.slot("t").is_some() {
                    return r.sem(*p, "'t' is the curve parameter and cannot also be declared");
                }
                let base = point(pt, *p)?;
                if curve.len() != nv {
                    return r.sem(*p, format!("curve has {} components, expected {nv}", curve.len()));
                }
                let c = curve.iter().map(|e| r.poly(e, &curve_scope)).collect::<Result<Vec<_>, _>>()?;
                file.separatrices.push(SeparatrixCandidate { base, curve: c });
            }
            Decl::Factor(lhs, fs, p) => {
                let lhs = r.poly(lhs, &poly_scope)?;
                let factors = fs.iter().map(|e| r.poly(e, &poly_scope)).collect::<Result<Vec<_>, _>>()?;
                let product = factors.iter().fold(Polynomial::one(ns), |a, b| &a * b);
                if product != lhs {
                    return r.sem(*p, "declared factorization does not expand to the left-hand side");
                }
                file.factors.push(FactorDecl { lhs, factors });
            }
            Decl::Query(pt, p) => {
                let q = point(pt, *p)?;
                if !file.queries.contains(&q) {
                    file.queries.push(q);
                }
            }
            Decl::QueryComponents => file.query_components = true,
            Decl::Assume(w) => match w.as_str() {
                "ncp" => file.assume_ncp = true,
                _ => file.assume_exhaustive = true,
            },
            Decl::Change(rows, p) => {
                if file.change.is_some() {
                    return r.sem(*p, "duplicate change declaration");
                }
                if rows.len() != nv || rows.iter().any(|row| row.len() != nv) {
                    return r.sem(*p, format!("change matrix must be {nv} x {nv}"));
                }
                let m = rows
                    .iter()
                    .map(|row| row.iter().map(|e| r.constant(e, *p, "a matrix entry")).collect::<Result<Vec<_>, _>>())
                    .collect::<Result<Vec<_>, _>>()?;
                if folia_core::algebra::invert(&m).is_none() {
                    return r.sem(*p, "change matrix is singular");
                }
                file.change = Some(m);
            }
            Decl::Product(n, p) => {
                if file.product.is_some() {
                    return r.sem(*p, "duplicate product declaration");
                }
                match ctx.var_index(n) {
                    Some(k) => file.product = Some(k),
                    None => return r.sem(*p, format!("unknown variable '{n}'")),
                }
            }
        }
    }
    let Some(field) = field else { return r.sem(Pos { line: 1, col: 1 }, "missing field declaration") };
    file.field = field.into_iter().map(|c| c.unwrap_or_else(|| Polynomial::zero(ns))).collect();
    if file.field.iter().all(|c| c.is_zero()) {
        return r.sem(Pos { line: 1, col: 1 }, "the field is identically zero");
    }
    Ok(file)
}

/// Parses a point such as `(0, c, root(t^2 - 2, 1))` in the file's context.
pub fn parse_point(text: &str, ctx: &VarContext) -> Result<Vec<Value>, SyntaxError> {
    let toks = lex(text)?;
    let mut parser = Parser { src: text, toks, at: 0, depth: 0 };
    let pos = parser.pos();
    let exprs = parser.point()?;
    if *parser.peek() != Tok::Eof {
        return parser.fail("unexpected input after the point");
    }
    let r = Resolver { src: text };
    let nv = ctx.nvars();
    let names: BTreeMap<String, usize> = ctx
        .params
        .iter()
        .filter(|p| !p.generic)
        .map(|p| (p.name.clone(), ctx.param_slot(&p.name).expect("declared")))
        .collect();
    let scope = Scope { names: &names, nslots: ctx.nslots(), what: "a point (only parameters are allowed)" };
    if exprs.len() != nv {
        return r.sem(pos, format!("point has {} coordinates, expected {nv}", exprs.len()));
    }
    exprs.iter().map(|e| r.value(e, &scope)).collect()
}

/// Parses `x=0, w=c` into coordinate assignments.
pub fn parse_assignments(text: &str, ctx: &VarContext) -> Result<BTreeMap<usize, Value>, SyntaxError> {
    let toks = lex(text)?;
    let mut parser = Parser { src: text, toks, at: 0, depth: 0 };
    let r = Resolver { src: text };
    let names: BTreeMap<String, usize> = ctx
        .params
        .iter()
        .filter(|p| !p.generic)
        .map(|p| (p.name.clone(), ctx.param_slot(&p.name).expect("declared")))
        .collect();
    let scope = Scope { names: &names, nslots: ctx.nslots(), what: "an assignment" };
    let mut out = BTreeMap::new();
    loop {
        let (n, p) = parser.ident()?;
        let Some(k) = ctx.var_index(&n) else { return r.sem(p, format!("unknown variable '{n}'")) };
        parser.expect_sym("=")?;
        let e = parser.expr()?;
        if out.insert(k, r.value(&e, &scope)?).is_some() {
            return r.sem(p, format!("'{n}' is assigned twice"));
        }
        if !parser.is_sym(",") {
            break;
        }
        parser.bump();
    }
    if *parser.peek() != Tok::Eof {
        return parser.fail("unexpected input after the assignments");
    }
    Ok(out)
}

fn user_names(ctx: &VarContext) -> Vec<String> {
    (0..ctx.nslots()).map(|s| ctx.slot_name(s).to_string()).collect()
}

fn fmt_point(p: &[Value], ctx: &VarContext) -> String {
    folia_core::algebra::render_point(p, ctx)
}

/// Canonical text of a file; parsing it yields the same `FoliationFile`.
pub fn print_foliation_file(f: &FoliationFile) -> String {
    let ctx = &f.ctx;
    let mut out = String::new();
    out.push_str(&format!("foliation \"{}\" {{\n", f.name));
    out.push_str(&format!("  vars: {};\n", ctx.vars.join(", ")));
    if !f.params.is_empty() {
        let ps: Vec<String> = f
            .params
            .iter()
            .map(|(n, ex)| match ex {
                Some(c) => format!("{n} != {}", constant_text(c)),
                None => n.clone(),
            })
            .collect();
        out.push_str(&format!("  params: {};\n", ps.join(", ")));
    }
    out.push_str("  field {\n");
    for (i, c) in f.field.iter().enumerate() {
        out.push_str(&format!("    {}: {};\n", ctx.vars[i], c.display(ctx)));
    }
    out.push_str("  }\n");
    match &f.domain {
        Domain::Affine => out.push_str("  domain: affine;\n"),
        Domain::Polydisc(r) => out.push_str(&format!("  domain: polydisc {r};\n")),
    }
    if let Some(m) = &f.change {
        let rows: Vec<String> = m
            .iter()
            .map(|row| format!("[{}]", row.iter().map(constant_text).collect::<Vec<_>>().join(", ")))
            .collect();
        out.push_str(&format!("  change [{}];\n", rows.join(", ")));
    }
    for fd in &f.factors {
        let fs: Vec<String> = fd.factors.iter().map(|q| format!("({})", q.display(ctx))).collect();
        out.push_str(&format!("  factor {} = {};\n", fd.lhs.display(ctx), fs.join(" * ")));
    }
    for inv in &f.invariants {
        out.push_str(&format!("  invariant: {};\n", inv.display(ctx)));
    }
    let mut curve_names = user_names(ctx);
    curve_names.push("t".into());
    for s in &f.separatrices {
        let cs: Vec<String> = s.curve.iter().map(|c| c.display_with(&curve_names).to_string()).collect();
        out.push_str(&format!("  separatrix at {}: t -> ({});\n", fmt_point(&s.base, ctx), cs.join(", ")));
    }
    for q in &f.queries {
        out.push_str(&format!("  query {};\n", fmt_point(q, ctx)));
    }
    if f.query_components {
        out.push_str("  query components;\n");
    }
    if let Some(k) = f.product {
        out.push_str(&format!("  product: {};\n", ctx.vars[k]));
    }
    if f.assume_ncp {
        out.push_str("  assume ncp;\n");
    }
    if f.assume_exhaustive {
        out.push_str("  assume exhaustive;\n");
    }
    out.push_str("}\n");
    out
}

fn constant_text(c: &GaussianRational) -> String {
    if c.is_compound() {
        format!("({c})")
    } else {
        c.to_string()
    }
}
