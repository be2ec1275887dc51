//! Surface syntax of the core language: expressions, hints, and source files.
//!
//! Everything the parser returns is already *normalized*: infix operators and
//! backticked names become curried applications of a prefix [`Expr::Ident`],
//! `f $ x` becomes `f x`, and string literals become lists of characters.
//! [`normalize`] performs the same rewriting on programmatically built trees.

mod hint;
pub(crate) mod lexer;
mod parser;
mod pretty;
mod source;

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use thiserror::Error;

pub use hint::{parse_hint, parse_hints, EqRequirement, Hint, HintParseError, Note, Severity};
pub(crate) use parser::Parser;
pub use parser::{parse_expr, parse_expr_located, parse_source_expr, ParseMode};
pub(crate) use pretty::escape_char;
pub use pretty::pretty;
pub use source::{parse_source, SourceBinding, SourceError};

/// Expression tree of the core language.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Expr {
    /// Single lowercase letter in a hint; matches any expression.
    MetaVar(String),
    /// Any other name, including operator names such as `++`.
    Ident(String),
    Int(BigInt),
    Char(char),
    /// Only present before normalization.
    Str(String),
    List(Vec<Expr>),
    Tuple(Box<Expr>, Box<Expr>),
    App(Box<Expr>, Box<Expr>),
    Lambda(String, Box<Expr>),
}

impl Expr {
    pub fn ident(name: impl Into<String>) -> Expr {
        Expr::Ident(name.into())
    }

    pub fn meta(name: impl Into<String>) -> Expr {
        Expr::MetaVar(name.into())
    }

    pub fn int(n: i64) -> Expr {
        Expr::Int(BigInt::from(n))
    }

    pub fn app(f: Expr, x: Expr) -> Expr {
        Expr::App(Box::new(f), Box::new(x))
    }

    /// `head a1 a2 …` as a left-nested application.
    pub fn apps(head: Expr, args: impl IntoIterator<Item = Expr>) -> Expr {
        args.into_iter().fold(head, Expr::app)
    }

    /// Splits `f a b c` into `f` and `[a, b, c]`.
    pub fn spine(&self) -> (&Expr, Vec<&Expr>) {
        let mut args = Vec::new();
        let mut cur = self;
        while let Expr::App(f, x) = cur {
            args.push(&**x);
            cur = f;
        }
        args.reverse();
        (cur, args)
    }

    pub fn metavars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_metavars(&mut out);
        out
    }

    fn collect_metavars(&self, out: &mut BTreeSet<String>) {
        match self {
            Expr::MetaVar(m) => {
                out.insert(m.clone());
            }
            Expr::Ident(_) | Expr::Int(_) | Expr::Char(_) | Expr::Str(_) => {}
            Expr::List(xs) => xs.iter().for_each(|x| x.collect_metavars(out)),
            Expr::Tuple(a, b) | Expr::App(a, b) => {
                a.collect_metavars(out);
                b.collect_metavars(out);
            }
            Expr::Lambda(_, body) => body.collect_metavars(out),
        }
    }

    pub fn contains_lambda(&self) -> bool {
        self.any(&|e| matches!(e, Expr::Lambda(..)))
    }

    /// True if `pred` holds for this node or any descendant.
    pub fn any(&self, pred: &dyn Fn(&Expr) -> bool) -> bool {
        if pred(self) {
            return true;
        }
        match self {
            Expr::List(xs) => xs.iter().any(|x| x.any(pred)),
            Expr::Tuple(a, b) | Expr::App(a, b) => a.any(pred) || b.any(pred),
            Expr::Lambda(_, body) => body.any(pred),
            _ => false,
        }
    }

    /// Identifiers referenced anywhere in the expression.
    pub fn idents(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |e| {
            if let Expr::Ident(n) = e {
                out.insert(n.clone());
            }
        });
        out
    }

    pub fn visit(&self, f: &mut dyn FnMut(&Expr)) {
        f(self);
        match self {
            Expr::List(xs) => xs.iter().for_each(|x| x.visit(f)),
            Expr::Tuple(a, b) | Expr::App(a, b) => {
                a.visit(f);
                b.visit(f);
            }
            Expr::Lambda(_, body) => body.visit(f),
            _ => {}
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&pretty(self))
    }
}

/// Rewrites `$`, string literals, and `($)` away. Idempotent.
pub fn normalize(e: &Expr) -> Expr {
    match e {
        Expr::Str(s) => Expr::List(s.chars().map(Expr::Char).collect()),
        Expr::Ident(n) if n == "$" => Expr::ident("id"),
        Expr::App(f, x) => match &**f {
            Expr::App(g, h) if matches!(&**g, Expr::Ident(n) if n == "$") => {
                Expr::app(normalize(h), normalize(x))
            }
            Expr::Ident(n) if n == "$" => normalize(x),
            _ => Expr::app(normalize(f), normalize(x)),
        },
        Expr::List(xs) => Expr::List(xs.iter().map(normalize).collect()),
        Expr::Tuple(a, b) => Expr::Tuple(Box::new(normalize(a)), Box::new(normalize(b))),
        Expr::Lambda(p, body) => Expr::Lambda(p.clone(), Box::new(normalize(body))),
        Expr::MetaVar(_) | Expr::Ident(_) | Expr::Int(_) | Expr::Char(_) => e.clone(),
    }
}

/// Byte range in the parsed text.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn to(self, other: Span) -> Span {
        Span {
            start: self.start.min(other.start),
            end: self.end.max(other.end),
        }
    }
}

/// Normalized expression annotated with the source span of every node.
#[derive(Debug, Clone, PartialEq)]
pub struct Located {
    /// Text of the node itself, without enclosing parentheses.
    pub span: Span,
    /// Including any enclosing parentheses.
    pub outer: Span,
    pub node: LocNode,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LocNode {
    /// MetaVar, Ident, Int, or Char.
    Leaf(Expr),
    List(Vec<Located>),
    Tuple(Box<Located>, Box<Located>),
    App(Box<Located>, Box<Located>),
    Lambda(String, Box<Located>),
}

impl Located {
    pub fn to_expr(&self) -> Expr {
        match &self.node {
            LocNode::Leaf(e) => e.clone(),
            LocNode::List(xs) => Expr::List(xs.iter().map(Located::to_expr).collect()),
            LocNode::Tuple(a, b) => Expr::Tuple(Box::new(a.to_expr()), Box::new(b.to_expr())),
            LocNode::App(f, x) => Expr::app(f.to_expr(), x.to_expr()),
            LocNode::Lambda(p, body) => Expr::Lambda(p.clone(), Box::new(body.to_expr())),
        }
    }

    /// Direct children, left to right.
    pub fn children(&self) -> Vec<&Located> {
        match &self.node {
            LocNode::Leaf(_) => vec![],
            LocNode::List(xs) => xs.iter().collect(),
            LocNode::Tuple(a, b) | LocNode::App(a, b) => vec![a, b],
            LocNode::Lambda(_, body) => vec![body],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Assoc {
    Left,
    Right,
    None,
}

/// Report fixity of an accepted operator symbol, or `None` if unknown.
pub fn operator_fixity(op: &str) -> Option<(u8, Assoc)> {
    Some(match op {
        "!!" => (9, Assoc::Left),
        "*" => (7, Assoc::Left),
        "+" | "-" => (6, Assoc::Left),
        ":" | "++" => (5, Assoc::Right),
        "==" | "/=" | "<" | "<=" | ">" | ">=" => (4, Assoc::None),
        "&&" => (3, Assoc::Right),
        "||" => (2, Assoc::Right),
        "$" => (0, Assoc::Right),
        _ => return None,
    })
}

/// Fixity of a backticked name; unlisted names are `infixl 9`.
pub fn backtick_fixity(name: &str) -> (u8, Assoc) {
    match name {
        "elem" | "notElem" => (4, Assoc::None),
        "seq" => (0, Assoc::Right),
        "div" | "mod" | "quot" | "rem" => (7, Assoc::Left),
        _ => (9, Assoc::Left),
    }
}

pub fn is_operator_name(name: &str) -> bool {
    name.chars()
        .next()
        .is_some_and(|c| !c.is_alphanumeric() && c != '_' && c != '(')
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{message} (at byte {offset})")]
pub struct SyntaxError {
    pub offset: usize,
    pub message: String,
}

impl SyntaxError {
    pub(crate) fn new(offset: usize, message: impl Into<String>) -> SyntaxError {
        SyntaxError {
            offset,
            message: message.into(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalize_removes_dollar_and_strings() {
        let raw = Expr::apps(
            Expr::ident("$"),
            [Expr::ident("reverse"), Expr::Str("ab".into())],
        );
        let n = normalize(&raw);
        assert_eq!(
            n,
            Expr::app(
                Expr::ident("reverse"),
                Expr::List(vec![Expr::Char('a'), Expr::Char('b')])
            )
        );
        assert_eq!(normalize(&n), n);
    }

    #[test]
    fn spine_of_application() {
        let e = Expr::apps(Expr::ident("take"), [Expr::int(1), Expr::meta("x")]);
        let (h, args) = e.spine();
        assert_eq!(h, &Expr::ident("take"));
        assert_eq!(args, vec![&Expr::int(1), &Expr::meta("x")]);
    }
}
