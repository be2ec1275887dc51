//! Monomorphic typing of hint metavariables.
//!
//! Each identifier is instantiated freshly from its prelude type scheme; each
//! metavariable gets one monomorphic type. Both sides of a hint must agree on
//! a result type. Leftover type variables default to `Integer` (which has Eq,
//! Ord and Num instances), and function-typed results are eta-expanded with
//! fresh metavariables until the observable result is first-order.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::syntax::lexer::Tok;
use crate::syntax::{Expr, Hint, ParseMode, Parser, SyntaxError};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Type {
    Integer,
    Bool,
    Char,
    Unit,
    Ordering,
    List(Box<Type>),
    Pair(Box<Type>, Box<Type>),
    Maybe(Box<Type>),
    Fun(Box<Type>, Box<Type>),
    Var(u32),
}

impl Type {
    pub fn list(t: Type) -> Type {
        Type::List(Box::new(t))
    }

    pub fn pair(a: Type, b: Type) -> Type {
        Type::Pair(Box::new(a), Box::new(b))
    }

    pub fn maybe(t: Type) -> Type {
        Type::Maybe(Box::new(t))
    }

    pub fn fun(a: Type, b: Type) -> Type {
        Type::Fun(Box::new(a), Box::new(b))
    }

    pub fn is_ground(&self) -> bool {
        self.vars().is_empty()
    }

    pub fn is_first_order(&self) -> bool {
        match self {
            Type::Fun(..) => false,
            Type::List(a) | Type::Maybe(a) => a.is_first_order(),
            Type::Pair(a, b) => a.is_first_order() && b.is_first_order(),
            _ => true,
        }
    }

    pub fn vars(&self) -> BTreeSet<u32> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<u32>) {
        match self {
            Type::Var(v) => {
                out.insert(*v);
            }
            Type::List(a) | Type::Maybe(a) => a.collect_vars(out),
            Type::Pair(a, b) | Type::Fun(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            _ => {}
        }
    }

    fn occurs(&self, v: u32) -> bool {
        match self {
            Type::Var(w) => *w == v,
            Type::List(a) | Type::Maybe(a) => a.occurs(v),
            Type::Pair(a, b) | Type::Fun(a, b) => a.occurs(v) || b.occurs(v),
            _ => false,
        }
    }

    fn fmt_prec(&self, prec: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Type::Integer => f.write_str("Integer"),
            Type::Bool => f.write_str("Bool"),
            Type::Char => f.write_str("Char"),
            Type::Unit => f.write_str("()"),
            Type::Ordering => f.write_str("Ordering"),
            Type::Var(v) => write!(f, "t{v}"),
            Type::List(a) => {
                f.write_str("[")?;
                a.fmt_prec(0, f)?;
                f.write_str("]")
            }
            Type::Pair(a, b) => {
                f.write_str("(")?;
                a.fmt_prec(0, f)?;
                f.write_str(", ")?;
                b.fmt_prec(0, f)?;
                f.write_str(")")
            }
            Type::Maybe(a) => {
                if prec > 1 {
                    f.write_str("(")?;
                }
                f.write_str("Maybe ")?;
                a.fmt_prec(2, f)?;
                if prec > 1 {
                    f.write_str(")")?;
                }
                Ok(())
            }
            Type::Fun(a, b) => {
                if prec > 0 {
                    f.write_str("(")?;
                }
                a.fmt_prec(1, f)?;
                f.write_str(" -> ")?;
                b.fmt_prec(0, f)?;
                if prec > 0 {
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(0, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Class {
    Eq,
    Ord,
    Num,
}

impl fmt::Display for Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Class::Eq => "Eq",
            Class::Ord => "Ord",
            Class::Num => "Num",
        })
    }
}

/// A type quantified over all of its variables, with class constraints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scheme {
    pub constraints: Vec<(Class, u32)>,
    pub ty: Type,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.constraints.is_empty() {
            let cs: Vec<String> = self
                .constraints
                .iter()
                .map(|(c, v)| format!("{c} t{v}"))
                .collect();
            if cs.len() == 1 {
                write!(f, "{} => ", cs[0])?;
            } else {
                write!(f, "({}) => ", cs.join(", "))?;
            }
        }
        write!(f, "{}", self.ty)
    }
}

/// Type schemes of every prelude identifier and constructor.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Signature {
    entries: BTreeMap<String, Scheme>,
}

impl Signature {
    pub fn new() -> Signature {
        Signature::default()
    }

    pub fn insert(&mut self, name: impl Into<String>, scheme: Scheme) -> Option<Scheme> {
        self.entries.insert(name.into(), scheme)
    }

    pub fn get(&self, name: &str) -> Option<&Scheme> {
        self.entries.get(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TypeError {
    #[error("cannot match `{0}` with `{1}`")]
    Mismatch(Type, Type),
    #[error("occurs check: cannot construct the infinite type t{0} ~ {1}")]
    Occurs(u32, Type),
    #[error("no {0} instance for `{1}`")]
    NoInstance(Class, Type),
    #[error("unknown identifier `{0}`")]
    UnknownIdent(String),
    #[error("lambda abstractions are not supported in checked hints")]
    Lambda,
    #[error("bad type signature: {0}")]
    Syntax(#[from] SyntaxError),
}

/// A most general unifier, mapping variables to types over the remaining
/// free variables.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Substitution(pub BTreeMap<u32, Type>);

impl Substitution {
    pub fn apply(&self, t: &Type) -> Type {
        match t {
            Type::Var(v) => match self.0.get(v) {
                Some(s) => self.apply(s),
                None => t.clone(),
            },
            Type::List(a) => Type::list(self.apply(a)),
            Type::Maybe(a) => Type::maybe(self.apply(a)),
            Type::Pair(a, b) => Type::pair(self.apply(a), self.apply(b)),
            Type::Fun(a, b) => Type::fun(self.apply(a), self.apply(b)),
            _ => t.clone(),
        }
    }
}

/// Union-find style unifier with per-variable class constraints.
#[derive(Debug, Default)]
struct Unifier {
    bindings: Vec<Option<Type>>,
    classes: Vec<BTreeSet<Class>>,
}

impl Unifier {
    fn with_vars(n: usize) -> Unifier {
        Unifier {
            bindings: vec![None; n],
            classes: vec![BTreeSet::new(); n],
        }
    }

    fn fresh(&mut self) -> Type {
        self.bindings.push(None);
        self.classes.push(BTreeSet::new());
        Type::Var((self.bindings.len() - 1) as u32)
    }

    fn shallow(&self, t: &Type) -> Type {
        let mut cur = t.clone();
        while let Type::Var(v) = cur {
            match &self.bindings[v as usize] {
                Some(b) => cur = b.clone(),
                None => break,
            }
        }
        cur
    }

    fn zonk(&self, t: &Type) -> Type {
        match self.shallow(t) {
            Type::List(a) => Type::list(self.zonk(&a)),
            Type::Maybe(a) => Type::maybe(self.zonk(&a)),
            Type::Pair(a, b) => Type::pair(self.zonk(&a), self.zonk(&b)),
            Type::Fun(a, b) => Type::fun(self.zonk(&a), self.zonk(&b)),
            other => other,
        }
    }

    fn unify(&mut self, a: &Type, b: &Type) -> Result<(), TypeError> {
        let (a, b) = (self.shallow(a), self.shallow(b));
        match (&a, &b) {
            (Type::Var(x), Type::Var(y)) if x == y => Ok(()),
            (Type::Var(x), _) => self.bind(*x, &b),
            (_, Type::Var(y)) => self.bind(*y, &a),
            (Type::List(x), Type::List(y)) | (Type::Maybe(x), Type::Maybe(y)) => self.unify(x, y),
            (Type::Pair(a1, b1), Type::Pair(a2, b2)) | (Type::Fun(a1, b1), Type::Fun(a2, b2)) => {
                self.unify(a1, a2)?;
                self.unify(b1, b2)
            }
            _ if a == b => Ok(()),
            _ => Err(TypeError::Mismatch(self.zonk(&a), self.zonk(&b))),
        }
    }

    fn bind(&mut self, v: u32, t: &Type) -> Result<(), TypeError> {
        let full = self.zonk(t);
        if full.occurs(v) {
            return Err(TypeError::Occurs(v, full));
        }
        self.bindings[v as usize] = Some(t.clone());
        let classes = std::mem::take(&mut self.classes[v as usize]);
        for c in classes {
            self.require(t, c)?;
        }
        Ok(())
    }

    fn require(&mut self, t: &Type, c: Class) -> Result<(), TypeError> {
        match self.shallow(t) {
            Type::Var(v) => {
                self.classes[v as usize].insert(c);
                Ok(())
            }
            Type::Integer => Ok(()),
            Type::Char | Type::Bool | Type::Unit | Type::Ordering if c != Class::Num => Ok(()),
            Type::List(a) | Type::Maybe(a) if c != Class::Num => self.require(&a, c),
            Type::Pair(a, b) if c != Class::Num => {
                self.require(&a, c)?;
                self.require(&b, c)
            }
            other => Err(TypeError::NoInstance(c, self.zonk(&other))),
        }
    }

    fn instantiate(&mut self, s: &Scheme) -> Result<Type, TypeError> {
        let mut map = BTreeMap::new();
        for v in s.ty.vars() {
            map.insert(v, self.fresh());
        }
        for (c, v) in &s.constraints {
            let t = map.get(v).cloned().unwrap_or(Type::Var(*v));
            self.require(&t, *c)?;
        }
        Ok(rename(&s.ty, &map))
    }
}

fn rename(t: &Type, map: &BTreeMap<u32, Type>) -> Type {
    match t {
        Type::Var(v) => map.get(v).cloned().unwrap_or(Type::Var(*v)),
        Type::List(a) => Type::list(rename(a, map)),
        Type::Maybe(a) => Type::maybe(rename(a, map)),
        Type::Pair(a, b) => Type::pair(rename(a, map), rename(b, map)),
        Type::Fun(a, b) => Type::fun(rename(a, map), rename(b, map)),
        _ => t.clone(),
    }
}

/// Most general unifier of two types.
pub fn unify(a: &Type, b: &Type) -> Result<Substitution, TypeError> {
    let n = a
        .vars()
        .into_iter()
        .chain(b.vars())
        .max()
        .map_or(0, |m| m as usize + 1);
    let mut u = Unifier::with_vars(n);
    u.unify(a, b)?;
    let mut out = BTreeMap::new();
    for v in 0..n as u32 {
        if u.bindings[v as usize].is_some() {
            out.insert(v, u.zonk(&Type::Var(v)));
        }
    }
    Ok(Substitution(out))
}

/// Result of typing a hint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Typing {
    /// Ground type of every metavariable, including eta-expansion variables.
    pub vars: BTreeMap<String, Type>,
    /// Left-hand side, eta-expanded to a first-order result.
    pub lhs: Expr,
    pub rhs: Expr,
    /// Common result type of both sides after expansion.
    pub result: Type,
    /// Metavariables introduced by eta-expansion, in order.
    pub eta: Vec<String>,
    /// True when some type variable had to be defaulted, i.e. the hint is
    /// polymorphic and is only checked at one instance.
    pub defaulted: bool,
}

/// Types a hint against the prelude signature.
pub fn infer(h: &Hint, sig: &Signature) -> Result<Typing, TypeError> {
    infer_sides(&h.lhs, &h.rhs, sig)
}

/// Types two expressions that must share a result type.
pub fn infer_sides(lhs: &Expr, rhs: &Expr, sig: &Signature) -> Result<Typing, TypeError> {
    if lhs.contains_lambda() || rhs.contains_lambda() {
        return Err(TypeError::Lambda);
    }
    let mut u = Unifier::default();
    let mut metas: BTreeMap<String, Type> = BTreeMap::new();
    for m in lhs.metavars().into_iter().chain(rhs.metavars()) {
        metas.entry(m).or_insert_with(|| u.fresh());
    }
    let lt = type_of(lhs, sig, &mut u, &metas)?;
    let rt = type_of(rhs, sig, &mut u, &metas)?;
    u.unify(&lt, &rt)?;

    let mut lhs = lhs.clone();
    let mut rhs = rhs.clone();
    let mut eta = Vec::new();
    let mut result = lt;
    while let Type::Fun(arg, res) = u.shallow(&result) {
        let name = ('a'..='z')
            .map(String::from)
            .find(|c| !metas.contains_key(c))
            .expect("ran out of metavariable names");
        lhs = Expr::app(lhs, Expr::MetaVar(name.clone()));
        rhs = Expr::app(rhs, Expr::MetaVar(name.clone()));
        metas.insert(name.clone(), *arg);
        eta.push(name);
        result = *res;
    }

    let mut defaulted = false;
    let mut vars = BTreeMap::new();
    for t in metas.values().chain(std::iter::once(&result)) {
        for v in u.zonk(t).vars() {
            u.unify(&Type::Var(v), &Type::Integer)?;
            defaulted = true;
        }
    }
    for (m, t) in &metas {
        vars.insert(m.clone(), u.zonk(t));
    }
    Ok(Typing {
        vars,
        lhs,
        rhs,
        result: u.zonk(&result),
        eta,
        defaulted,
    })
}

fn type_of(
    e: &Expr,
    sig: &Signature,
    u: &mut Unifier,
    metas: &BTreeMap<String, Type>,
) -> Result<Type, TypeError> {
    Ok(match e {
        Expr::MetaVar(m) => metas[m].clone(),
        Expr::Ident(n) => {
            let s = sig
                .get(n)
                .ok_or_else(|| TypeError::UnknownIdent(n.clone()))?;
            u.instantiate(s)?
        }
        Expr::Int(_) => Type::Integer,
        Expr::Char(_) => Type::Char,
        Expr::Str(_) => Type::list(Type::Char),
        Expr::List(xs) => {
            let elem = u.fresh();
            for x in xs {
                let t = type_of(x, sig, u, metas)?;
                u.unify(&elem, &t)?;
            }
            Type::list(elem)
        }
        Expr::Tuple(a, b) => Type::pair(type_of(a, sig, u, metas)?, type_of(b, sig, u, metas)?),
        Expr::App(f, x) => {
            let ft = type_of(f, sig, u, metas)?;
            let xt = type_of(x, sig, u, metas)?;
            let res = u.fresh();
            u.unify(&ft, &Type::fun(xt, res.clone()))?;
            res
        }
        Expr::Lambda(..) => return Err(TypeError::Lambda),
    })
}

/// Parses a Haskell-style type such as `Eq a => a -> [a] -> Bool`.
pub fn parse_scheme(text: &str) -> Result<Scheme, TypeError> {
    let mut p = Parser::new(text, ParseMode::Source)?;
    let mut names = BTreeMap::new();
    let s = scheme(&mut p, &mut names)?;
    p.finish()?;
    Ok(s)
}

pub(crate) fn scheme(
    p: &mut Parser,
    names: &mut BTreeMap<String, u32>,
) -> Result<Scheme, SyntaxError> {
    let mut constraints = Vec::new();
    if p.ahead(&Tok::FatArrow) {
        let parens = p.peek() == Some(&Tok::LParen);
        if parens {
            p.bump();
        }
        loop {
            let class = match p.bump().map(|t| t.tok) {
                Some(Tok::Name(c)) if c == "Eq" => Class::Eq,
                Some(Tok::Name(c)) if c == "Ord" => Class::Ord,
                Some(Tok::Name(c)) if c == "Num" => Class::Num,
                _ => return Err(p.error("expected class name")),
            };
            let v = match p.bump().map(|t| t.tok) {
                Some(Tok::Name(v)) => var_id(names, &v),
                _ => return Err(p.error("expected type variable")),
            };
            constraints.push((class, v));
            if parens && p.peek() == Some(&Tok::Comma) {
                p.bump();
                continue;
            }
            break;
        }
        if parens {
            p.expect(Tok::RParen)?;
        }
        p.expect(Tok::FatArrow)?;
    }
    let ty = fun_type(p, names)?;
    Ok(Scheme { constraints, ty })
}

fn var_id(names: &mut BTreeMap<String, u32>, n: &str) -> u32 {
    let next = names.len() as u32;
    *names.entry(n.to_string()).or_insert(next)
}

fn fun_type(p: &mut Parser, names: &mut BTreeMap<String, u32>) -> Result<Type, SyntaxError> {
    let a = app_type(p, names)?;
    if p.peek() == Some(&Tok::Arrow) {
        p.bump();
        let b = fun_type(p, names)?;
        Ok(Type::fun(a, b))
    } else {
        Ok(a)
    }
}

fn app_type(p: &mut Parser, names: &mut BTreeMap<String, u32>) -> Result<Type, SyntaxError> {
    if p.peek() == Some(&Tok::Name("Maybe".into())) {
        p.bump();
        return Ok(Type::maybe(atom_type(p, names)?));
    }
    atom_type(p, names)
}

fn atom_type(p: &mut Parser, names: &mut BTreeMap<String, u32>) -> Result<Type, SyntaxError> {
    match p.peek().cloned() {
        Some(Tok::Name(n)) => {
            p.bump();
            match n.as_str() {
                "Integer" | "Int" => Ok(Type::Integer),
                "Bool" => Ok(Type::Bool),
                "Char" => Ok(Type::Char),
                "Ordering" => Ok(Type::Ordering),
                "String" => Ok(Type::list(Type::Char)),
                v if v.starts_with(|c: char| c.is_ascii_lowercase()) => {
                    Ok(Type::Var(var_id(names, v)))
                }
                other => Err(p.error(format!("unknown type `{other}`"))),
            }
        }
        Some(Tok::LBracket) => {
            p.bump();
            let t = fun_type(p, names)?;
            p.expect(Tok::RBracket)?;
            Ok(Type::list(t))
        }
        Some(Tok::LParen) => {
            p.bump();
            if p.peek() == Some(&Tok::RParen) {
                p.bump();
                return Ok(Type::Unit);
            }
            let a = fun_type(p, names)?;
            if p.peek() == Some(&Tok::Comma) {
                p.bump();
                let b = fun_type(p, names)?;
                p.expect(Tok::RParen)?;
                return Ok(Type::pair(a, b));
            }
            p.expect(Tok::RParen)?;
            Ok(a)
        }
        _ => Err(p.unexpected("type")),
    }
}
