//! Isabelle/HOLCF goal lines for hints.

use lazyhint_core::syntax::{parse_expr, Expr, Hint, Note, SyntaxError};
use num_traits::Signed;

/// Haskell operators and constructors whose HOLCF names differ.
pub const NAME_TABLE: &[(&str, &str)] = &[
    ("!!", "nth"),
    ("++", "append"),
    ("==", "eq"),
    ("/=", "neq"),
    ("<", "lt"),
    ("<=", "le"),
    (">", "gt"),
    (">=", "ge"),
    ("&&", "trand"),
    ("||", "tror"),
    ("+", "plus"),
    ("-", "minus"),
    ("*", "times"),
    (":", "Cons"),
    ("True", "TT"),
    ("False", "FF"),
];

pub const CDOT: &str = "\\<cdot>";
pub const SQSUBSETEQ: &str = "\\<sqsubseteq>";
pub const LAMBDA: &str = "\\<Lambda>";

fn isabelle_name(name: &str) -> &str {
    NAME_TABLE
        .iter()
        .find(|(h, _)| *h == name)
        .map_or(name, |(_, i)| i)
}

fn haskell_name(name: &str) -> &str {
    NAME_TABLE
        .iter()
        .find(|(_, i)| *i == name)
        .map_or(name, |(h, _)| h)
}

/// `reverse\<cdot>(reverse\<cdot>x) \<sqsubseteq> x`
pub fn goal(h: &Hint) -> String {
    let rel = match h.note {
        Some(Note::IncreasesLaziness) => SQSUBSETEQ,
        None => "=",
    };
    format!("{} {rel} {}", term(&h.lhs), term(&h.rhs))
}

/// Renders an expression with every application written `f\<cdot>x`.
pub fn term(e: &Expr) -> String {
    let mut out = String::new();
    write(e, false, &mut out);
    out
}

fn write(e: &Expr, arg: bool, out: &mut String) {
    match e {
        Expr::MetaVar(n) => out.push_str(n),
        Expr::Ident(n) => out.push_str(isabelle_name(n)),
        Expr::Int(n) if n.is_negative() && arg => out.push_str(&format!("({n})")),
        Expr::Int(n) => out.push_str(&n.to_string()),
        Expr::Char(c) => out.push_str(&format!("{c:?}")),
        Expr::Str(s) => out.push_str(&format!("{s:?}")),
        Expr::List(xs) => {
            out.push('[');
            for (i, x) in xs.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write(x, false, out);
            }
            out.push(']');
        }
        Expr::Tuple(a, b) => {
            out.push('(');
            write(a, false, out);
            out.push_str(", ");
            write(b, false, out);
            out.push(')');
        }
        Expr::App(f, x) => {
            if arg {
                out.push('(');
            }
            write(f, false, out);
            out.push_str(CDOT);
            write(x, true, out);
            if arg {
                out.push(')');
            }
        }
        Expr::Lambda(v, body) => {
            out.push('(');
            out.push_str(&format!("{LAMBDA} {v}. "));
            write(body, false, out);
            out.push(')');
        }
    }
}

/// Reads a goal line back into `(lhs, rhs, note)`. Inverse of [`goal`] for
/// hints without lambdas or character data.
pub fn parse_goal(line: &str) -> Result<(Expr, Expr, Option<Note>), SyntaxError> {
    let (l, r, note) = match line.split_once(&format!(" {SQSUBSETEQ} ")) {
        Some((l, r)) => (l, r, Some(Note::IncreasesLaziness)),
        None => {
            let (l, r) = line.split_once(" = ").ok_or_else(|| SyntaxError {
                offset: 0,
                message: "goal has no relation".into(),
            })?;
            (l, r, None)
        }
    };
    let side = |s: &str| parse_expr(&s.replace(CDOT, " ")).map(|e| rename(&e));
    Ok((side(l)?, side(r)?, note))
}

fn rename(e: &Expr) -> Expr {
    match e {
        Expr::Ident(n) => Expr::Ident(haskell_name(n).to_string()),
        Expr::App(f, x) => Expr::app(rename(f), rename(x)),
        Expr::Tuple(a, b) => Expr::Tuple(Box::new(rename(a)), Box::new(rename(b))),
        Expr::List(xs) => Expr::List(xs.iter().map(rename).collect()),
        _ => e.clone(),
    }
}
