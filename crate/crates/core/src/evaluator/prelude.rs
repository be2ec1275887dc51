//! Loading the embedded prelude: signatures, equations, and their compiled
//! form.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use num_bigint::BigInt;
use thiserror::Error;

use crate::domain::Tag;
use crate::syntax::lexer::Tok;
use crate::syntax::{Expr, ParseMode, Parser, SyntaxError};
use crate::typing::{self, Scheme, Signature};

const SOURCE: &str = include_str!("prelude.hs");

/// Compiled expression. Locals index the frame of the enclosing equation.
#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Core {
    Local(usize),
    Global(usize),
    Con(Tag),
    Int(BigInt),
    Char(char),
    App(Box<Core>, Vec<Core>),
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Pat {
    Var(usize),
    Wild,
    Int(BigInt),
    Char(char),
    Con(Tag, Vec<Pat>),
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Equation {
    pub pats: Vec<Pat>,
    pub guard: Option<Core>,
    pub body: Core,
    pub slots: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Prim {
    Add,
    Sub,
    Mul,
    Eq,
    Compare,
    Seq,
    Error,
}

impl Prim {
    fn from_name(name: &str) -> Option<Prim> {
        Some(match name {
            "+" => Prim::Add,
            "-" => Prim::Sub,
            "*" => Prim::Mul,
            "==" => Prim::Eq,
            "compare" => Prim::Compare,
            "seq" => Prim::Seq,
            "error" => Prim::Error,
            _ => return None,
        })
    }

    fn arity(self) -> usize {
        match self {
            Prim::Error => 1,
            _ => 2,
        }
    }

    fn describe(self) -> &'static str {
        match self {
            Prim::Add | Prim::Sub | Prim::Mul => "strict in both arguments, left first",
            Prim::Eq => "derived structural equality, forcing left then right",
            Prim::Compare => "derived structural ordering, forcing left then right",
            Prim::Seq => "forces the first argument to weak head normal form",
            Prim::Error => "definite bottom",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Rule {
    Equations(Vec<Equation>),
    Primitive(Prim),
}

/// One prelude function.
#[derive(Debug, Clone, PartialEq)]
pub struct PreludeDef {
    pub name: String,
    pub arity: usize,
    pub scheme: Scheme,
    /// Signature and equation lines exactly as written.
    pub source: Vec<String>,
    pub(crate) rule: Rule,
}

impl PreludeDef {
    pub fn is_primitive(&self) -> bool {
        matches!(self.rule, Rule::Primitive(_))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prelude {
    defs: Vec<PreludeDef>,
    index: BTreeMap<String, usize>,
    signature: Signature,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("prelude line {line}: {message}")]
pub struct PreludeError {
    pub line: usize,
    pub message: String,
}

/// The embedded prelude, loaded once per process.
pub fn prelude() -> &'static Prelude {
    static PRELUDE: OnceLock<Prelude> = OnceLock::new();
    PRELUDE.get_or_init(|| Prelude::parse(SOURCE).expect("embedded prelude is well formed"))
}

impl Prelude {
    pub fn defs(&self) -> &[PreludeDef] {
        &self.defs
    }

    pub fn get(&self, name: &str) -> Option<&PreludeDef> {
        self.index.get(name).map(|&i| &self.defs[i])
    }

    pub(crate) fn def(&self, i: usize) -> &PreludeDef {
        &self.defs[i]
    }

    pub(crate) fn index(&self) -> &BTreeMap<String, usize> {
        &self.index
    }

    /// Types of every function and constructor.
    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    /// Human-readable listing of every definition as used by the evaluator.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for d in &self.defs {
            for line in &d.source {
                out.push_str(line);
                out.push('\n');
            }
            if let Rule::Primitive(p) = d.rule {
                out.push_str(&format!("-- primitive: {}\n", p.describe()));
            }
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<Prelude, PreludeError> {
        let mut sigs: Vec<(String, Scheme, String, usize)> = Vec::new();
        let mut eqs: BTreeMap<String, Vec<(RawEquation, String, usize)>> = BTreeMap::new();
        let mut last_eq: Option<String> = None;
        for (idx, raw) in text.lines().enumerate() {
            let lineno = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with("--") {
                continue;
            }
            let wrap = |e: SyntaxError| PreludeError {
                line: lineno,
                message: e.message,
            };
            match parse_line(line).map_err(wrap)? {
                Line::Sig(name, scheme) => {
                    if sigs.iter().any(|s| s.0 == name) {
                        return Err(PreludeError {
                            line: lineno,
                            message: format!("duplicate signature for `{name}`"),
                        });
                    }
                    sigs.push((name, scheme, line.to_string(), lineno));
                    last_eq = None;
                }
                Line::Eq(name, eq) => {
                    if eqs.contains_key(&name) && last_eq.as_deref() != Some(&name) {
                        return Err(PreludeError {
                            line: lineno,
                            message: format!("equations for `{name}` are not contiguous"),
                        });
                    }
                    last_eq = Some(name.clone());
                    eqs.entry(name)
                        .or_default()
                        .push((eq, line.to_string(), lineno));
                }
            }
        }

        let mut signature = Signature::new();
        let mut index = BTreeMap::new();
        let mut pending = Vec::new();
        for (name, scheme, line, lineno) in sigs {
            signature.insert(name.clone(), scheme.clone());
            if Tag::from_name(&name).is_some() {
                if eqs.contains_key(&name) {
                    return Err(PreludeError {
                        line: lineno,
                        message: format!("constructor `{name}` cannot have equations"),
                    });
                }
                continue;
            }
            index.insert(name.clone(), pending.len());
            pending.push((name, scheme, line, lineno));
        }
        if let Some((name, list)) = eqs.iter().find(|(n, _)| !index.contains_key(*n)) {
            return Err(PreludeError {
                line: list[0].2,
                message: format!("`{name}` has equations but no signature"),
            });
        }

        let mut defs = Vec::new();
        for (name, scheme, sig_line, lineno) in pending {
            let mut source = vec![sig_line];
            let (arity, rule) = match eqs.remove(&name) {
                None => {
                    let prim = Prim::from_name(&name).ok_or_else(|| PreludeError {
                        line: lineno,
                        message: format!("`{name}` has no equations and is not a primitive"),
                    })?;
                    (prim.arity(), Rule::Primitive(prim))
                }
                Some(list) => {
                    let arity = list[0].0.pats.len();
                    let mut compiled = Vec::new();
                    for (raw, text, eq_line) in list {
                        let err = |message: String| PreludeError {
                            line: eq_line,
                            message,
                        };
                        if raw.pats.len() != arity {
                            return Err(err(format!("equations for `{name}` differ in arity")));
                        }
                        compiled.push(compile_equation(&raw, &index).map_err(err)?);
                        source.push(text);
                    }
                    (arity, Rule::Equations(compiled))
                }
            };
            defs.push(PreludeDef {
                name,
                arity,
                scheme,
                source,
                rule,
            });
        }
        Ok(Prelude {
            defs,
            index,
            signature,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
enum RawPat {
    Var(String),
    Wild,
    Int(BigInt),
    Char(char),
    Con(Tag, Vec<RawPat>),
}

#[derive(Debug, Clone, PartialEq)]
struct RawEquation {
    pats: Vec<RawPat>,
    guard: Option<Expr>,
    body: Expr,
}

enum Line {
    Sig(String, Scheme),
    Eq(String, RawEquation),
}

fn parse_line(line: &str) -> Result<Line, SyntaxError> {
    let mut p = Parser::new(line, ParseMode::Source)?;
    if p.ahead(&Tok::DoubleColon) {
        let name = match p.bump().map(|t| t.tok) {
            Some(Tok::Name(n)) => n,
            Some(Tok::LParen) => {
                let n = match p.bump().map(|t| t.tok) {
                    Some(Tok::Op(o)) => o,
                    Some(Tok::RParen) => return sig_rest(&mut p, "()".into()),
                    _ => return Err(p.error("expected operator name")),
                };
                p.expect(Tok::RParen)?;
                n
            }
            _ => return Err(p.error("expected name in signature")),
        };
        return sig_rest(&mut p, name);
    }

    let first = apat(&mut p)?;
    let (name, pats) = match p.peek().cloned() {
        Some(Tok::Op(op)) => {
            p.bump();
            let second = apat(&mut p)?;
            (op, vec![first, second])
        }
        Some(Tok::Backtick) => {
            p.bump();
            let name = match p.bump().map(|t| t.tok) {
                Some(Tok::Name(n)) => n,
                _ => return Err(p.error("expected name in backticks")),
            };
            p.expect(Tok::Backtick)?;
            let second = apat(&mut p)?;
            (name, vec![first, second])
        }
        _ => {
            let RawPat::Var(name) = first else {
                return Err(p.error("equation must start with a function name"));
            };
            let mut pats = Vec::new();
            while !matches!(p.peek(), Some(Tok::Equals) | Some(Tok::Bar) | None) {
                pats.push(apat(&mut p)?);
            }
            (name, pats)
        }
    };
    let guard = if p.peek() == Some(&Tok::Bar) {
        p.bump();
        Some(p.expr()?.to_expr())
    } else {
        None
    };
    p.expect(Tok::Equals)?;
    let body = p.expr()?.to_expr();
    p.finish()?;
    Ok(Line::Eq(name, RawEquation { pats, guard, body }))
}

fn sig_rest(p: &mut Parser, name: String) -> Result<Line, SyntaxError> {
    p.expect(Tok::DoubleColon)?;
    let scheme = typing::scheme(p, &mut BTreeMap::new())?;
    p.finish()?;
    Ok(Line::Sig(name, scheme))
}

fn apat(p: &mut Parser) -> Result<RawPat, SyntaxError> {
    match p.peek().cloned() {
        Some(Tok::Name(n)) => {
            p.bump();
            if n == "_" {
                Ok(RawPat::Wild)
            } else if let Some(tag) = Tag::from_name(&n) {
                if tag.arity() != 0 {
                    return Err(p.error(format!("constructor `{n}` needs parentheses")));
                }
                Ok(RawPat::Con(tag, vec![]))
            } else if n.starts_with(|c: char| c.is_ascii_uppercase()) {
                Err(p.error(format!("unknown constructor `{n}`")))
            } else {
                Ok(RawPat::Var(n))
            }
        }
        Some(Tok::Int(n)) => {
            p.bump();
            Ok(RawPat::Int(n))
        }
        Some(Tok::Char(c)) => {
            p.bump();
            Ok(RawPat::Char(c))
        }
        Some(Tok::LBracket) => {
            p.bump();
            let mut items = Vec::new();
            if p.peek() != Some(&Tok::RBracket) {
                loop {
                    items.push(pat(p)?);
                    if p.peek() == Some(&Tok::Comma) {
                        p.bump();
                    } else {
                        break;
                    }
                }
            }
            p.expect(Tok::RBracket)?;
            Ok(items
                .into_iter()
                .rev()
                .fold(RawPat::Con(Tag::Nil, vec![]), |tl, hd| {
                    RawPat::Con(Tag::Cons, vec![hd, tl])
                }))
        }
        Some(Tok::LParen) => {
            p.bump();
            if p.peek() == Some(&Tok::RParen) {
                p.bump();
                return Ok(RawPat::Con(Tag::Unit, vec![]));
            }
            let a = pat(p)?;
            let out = if p.peek() == Some(&Tok::Comma) {
                p.bump();
                let b = pat(p)?;
                RawPat::Con(Tag::Pair, vec![a, b])
            } else {
                a
            };
            p.expect(Tok::RParen)?;
            Ok(out)
        }
        _ => Err(p.unexpected("pattern")),
    }
}

/// `Con apat*` or `apat`, optionally followed by `: pat`.
fn pat(p: &mut Parser) -> Result<RawPat, SyntaxError> {
    let head = match p.peek().cloned() {
        Some(Tok::Name(n)) if Tag::from_name(&n).is_some_and(|t| t.arity() > 0) => {
            p.bump();
            let tag = Tag::from_name(&n).unwrap();
            let mut args = Vec::new();
            for _ in 0..tag.arity() {
                args.push(apat(p)?);
            }
            RawPat::Con(tag, args)
        }
        _ => apat(p)?,
    };
    if p.peek() == Some(&Tok::Op(":".into())) {
        p.bump();
        let tail = pat(p)?;
        return Ok(RawPat::Con(Tag::Cons, vec![head, tail]));
    }
    Ok(head)
}

fn compile_equation(
    raw: &RawEquation,
    globals: &BTreeMap<String, usize>,
) -> Result<Equation, String> {
    let mut locals = Vec::new();
    let pats = raw
        .pats
        .iter()
        .map(|p| compile_pat(p, &mut locals))
        .collect::<Result<Vec<_>, _>>()?;
    let resolve = |name: &str| -> Result<Core, String> {
        if let Some(i) = locals.iter().position(|l| l == name) {
            Ok(Core::Local(i))
        } else {
            resolve_global(name, globals)
        }
    };
    let guard = raw
        .guard
        .as_ref()
        .map(|g| compile_expr(g, &resolve))
        .transpose()?;
    let body = compile_expr(&raw.body, &resolve)?;
    Ok(Equation {
        pats,
        guard,
        body,
        slots: locals.len(),
    })
}

fn compile_pat(p: &RawPat, locals: &mut Vec<String>) -> Result<Pat, String> {
    Ok(match p {
        RawPat::Var(v) => {
            if locals.contains(v) {
                return Err(format!("variable `{v}` bound twice in one equation"));
            }
            locals.push(v.clone());
            Pat::Var(locals.len() - 1)
        }
        RawPat::Wild => Pat::Wild,
        RawPat::Int(n) => Pat::Int(n.clone()),
        RawPat::Char(c) => Pat::Char(*c),
        RawPat::Con(t, ps) => Pat::Con(
            *t,
            ps.iter()
                .map(|p| compile_pat(p, locals))
                .collect::<Result<_, _>>()?,
        ),
    })
}

pub(crate) fn resolve_global(
    name: &str,
    globals: &BTreeMap<String, usize>,
) -> Result<Core, String> {
    if let Some(&g) = globals.get(name) {
        Ok(Core::Global(g))
    } else if let Some(tag) = Tag::from_name(name) {
        Ok(Core::Con(tag))
    } else {
        Err(format!("unknown identifier `{name}`"))
    }
}

/// Compiles an expression; `resolve` maps names and metavariables to code.
pub(crate) fn compile_expr(
    e: &Expr,
    resolve: &dyn Fn(&str) -> Result<Core, String>,
) -> Result<Core, String> {
    Ok(match e {
        Expr::MetaVar(m) | Expr::Ident(m) => resolve(m)?,
        Expr::Int(n) => Core::Int(n.clone()),
        Expr::Char(c) => Core::Char(*c),
        Expr::Str(s) => list(s.chars().map(Core::Char).collect()),
        Expr::List(xs) => list(
            xs.iter()
                .map(|x| compile_expr(x, resolve))
                .collect::<Result<_, _>>()?,
        ),
        Expr::Tuple(a, b) => Core::App(
            Box::new(Core::Con(Tag::Pair)),
            vec![compile_expr(a, resolve)?, compile_expr(b, resolve)?],
        ),
        Expr::App(..) => {
            let (head, args) = e.spine();
            Core::App(
                Box::new(compile_expr(head, resolve)?),
                args.into_iter()
                    .map(|a| compile_expr(a, resolve))
                    .collect::<Result<_, _>>()?,
            )
        }
        Expr::Lambda(..) => return Err("lambda abstractions cannot be evaluated".into()),
    })
}

fn list(items: Vec<Core>) -> Core {
    items.into_iter().rev().fold(Core::Con(Tag::Nil), |tl, hd| {
        Core::App(Box::new(Core::Con(Tag::Cons)), vec![hd, tl])
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedded_prelude_loads() {
        let p = prelude();
        for name in [
            "not",
            "&&",
            "||",
            "otherwise",
            "+",
            "-",
            "*",
            "negate",
            "abs",
            "==",
            "/=",
            "<",
            "<=",
            ">",
            ">=",
            "compare",
            "min",
            "max",
            "fst",
            "snd",
            "maybe",
            "fromMaybe",
            "isJust",
            "isNothing",
            "++",
            "head",
            "last",
            "tail",
            "init",
            "null",
            "length",
            "reverse",
            "take",
            "drop",
            "splitAt",
            "!!",
            "repeat",
            "replicate",
            "map",
            "filter",
            "foldr",
            "foldl",
            "concat",
            "concatMap",
            "elem",
            "notElem",
            "isPrefixOf",
            "isSuffixOf",
            "insert",
            "sort",
            "seq",
            "error",
            "undefined",
            "id",
            "const",
            "flip",
        ] {
            assert!(p.get(name).is_some(), "missing {name}");
            assert!(p.signature().get(name).is_some(), "no signature for {name}");
        }
        for con in [
            "True", "False", "Nothing", "Just", "LT", "EQ", "GT", "()", ":",
        ] {
            assert!(p.signature().get(con).is_some(), "no signature for {con}");
        }
        assert_eq!(p.get("take").unwrap().arity, 2);
        assert_eq!(p.get("otherwise").unwrap().arity, 0);
        assert!(p.get("seq").unwrap().is_primitive());
        assert!(p.get("print").is_none());
    }

    #[test]
    fn dump_lists_report_equations() {
        let d = prelude().dump();
        assert!(d.contains("take n _ | n <= 0 = []\n"));
        assert!(d.contains("drop n xs | n <= 0 = xs\n"));
        assert!(d.contains("xs !! n | n < 0 = error"));
        assert!(d.contains("False && _ = False\n"));
        assert!(d.contains("sort xs = foldr insert [] xs\n"));
        assert!(d.contains("reverse (x:xs) = reverse xs ++ [x]\n"));
        assert!(d.contains("-- primitive: forces the first argument"));
    }

    #[test]
    fn patterns() {
        let Line::Eq(name, eq) = parse_line("catMaybes (Just m:ms) = m : catMaybes ms").unwrap()
        else {
            panic!()
        };
        assert_eq!(name, "catMaybes");
        assert_eq!(
            eq.pats,
            vec![RawPat::Con(
                Tag::Cons,
                vec![
                    RawPat::Con(Tag::Just, vec![RawPat::Var("m".into())]),
                    RawPat::Var("ms".into())
                ]
            )]
        );
        let Line::Eq(name, eq) = parse_line("(x:_) !! 0 = x").unwrap() else {
            panic!()
        };
        assert_eq!(name, "!!");
        assert_eq!(eq.pats[1], RawPat::Int(0.into()));
        let Line::Eq(_, eq) = parse_line("last [x] = x").unwrap() else {
            panic!()
        };
        assert_eq!(
            eq.pats,
            vec![RawPat::Con(
                Tag::Cons,
                vec![RawPat::Var("x".into()), RawPat::Con(Tag::Nil, vec![])]
            )]
        );
    }

    #[test]
    fn malformed_preludes_are_rejected() {
        let bad = |src: &str| Prelude::parse(src).unwrap_err();
        assert!(bad("f x = x").message.contains("no signature"));
        assert!(bad("f :: a -> a").message.contains("not a primitive"));
        assert!(bad("f :: a -> a\nf x = y")
            .message
            .contains("unknown identifier"));
        assert!(bad("f :: a -> a -> a\nf x x = x")
            .message
            .contains("bound twice"));
        assert!(bad("f :: a -> a\nf x = x\ng :: a\ng = f\nf y = y")
            .message
            .contains("contiguous"));
        assert_eq!(bad("f :: a -> a\n\nf x = (").line, 3);
    }
}
