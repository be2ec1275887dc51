//! Hint lines: `<severity> = <lhs> ==> <rhs> [where key = Value, ...]`.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use super::lexer::Tok;
use super::{Expr, ParseMode, Parser, SyntaxError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warn,
}

impl Severity {
    /// Label used in lint output.
    pub fn label(self) -> &'static str {
        match self {
            Severity::Error => "Error",
            Severity::Warn => "Warning",
        }
    }
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Error => "error",
            Severity::Warn => "warn",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Note {
    IncreasesLaziness,
}

impl fmt::Display for Note {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("IncreasesLaziness")
    }
}

/// Which properties of `==` a hint relies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EqRequirement {
    #[default]
    None,
    /// Only that `==` and `/=` exist.
    Syntactic,
    /// `==` is strict and symmetric.
    Sym,
    /// `==` is a strict equivalence relation.
    Equiv,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hint {
    pub severity: Severity,
    pub lhs: Expr,
    pub rhs: Expr,
    pub note: Option<Note>,
    pub eq_requirement: EqRequirement,
    pub source_text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HintParseError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("unknown severity `{0}` (expected `error` or `warn`)")]
    UnknownSeverity(String),
    #[error("unknown note `{0}`")]
    UnknownNote(String),
    #[error("unknown Eq requirement `{0}` (expected syntactic, sym or equiv)")]
    UnknownEqRequirement(String),
    #[error("unknown annotation key `{0}`")]
    UnknownKey(String),
    #[error("metavariable `{0}` appears on the right-hand side but not on the left")]
    UnboundMetaVar(String),
}

fn expect_name(p: &mut Parser, what: &str) -> Result<String, SyntaxError> {
    match p.peek() {
        Some(Tok::Name(n)) => {
            let n = n.clone();
            p.bump();
            Ok(n)
        }
        _ => Err(p.unexpected(what)),
    }
}

pub fn parse_hint(line: &str) -> Result<Hint, HintParseError> {
    let mut p = Parser::new(line, ParseMode::Hint)?;
    let severity = match expect_name(&mut p, "severity")?.as_str() {
        "error" => Severity::Error,
        "warn" => Severity::Warn,
        other => return Err(HintParseError::UnknownSeverity(other.to_string())),
    };
    p.expect(Tok::Equals)?;
    let lhs = p.expr()?.to_expr();
    p.expect(Tok::Rewrite)?;
    let rhs = p.expr()?.to_expr();

    let mut note = None;
    let mut eq_requirement = EqRequirement::None;
    if p.peek() == Some(&Tok::Name("where".into())) {
        p.bump();
        loop {
            let key = expect_name(&mut p, "annotation key")?;
            p.expect(Tok::Equals)?;
            let value = expect_name(&mut p, "annotation value")?;
            match key.as_str() {
                "note" => match value.as_str() {
                    "IncreasesLaziness" => note = Some(Note::IncreasesLaziness),
                    _ => return Err(HintParseError::UnknownNote(value)),
                },
                "eq" => {
                    eq_requirement = match value.as_str() {
                        "syntactic" => EqRequirement::Syntactic,
                        "sym" => EqRequirement::Sym,
                        "equiv" => EqRequirement::Equiv,
                        _ => return Err(HintParseError::UnknownEqRequirement(value)),
                    }
                }
                _ => return Err(HintParseError::UnknownKey(key)),
            }
            if p.peek() == Some(&Tok::Comma) {
                p.bump();
            } else {
                break;
            }
        }
    }
    p.finish()?;

    let bound = lhs.metavars();
    if let Some(free) = rhs.metavars().into_iter().find(|m| !bound.contains(m)) {
        return Err(HintParseError::UnboundMetaVar(free));
    }
    Ok(Hint {
        severity,
        lhs,
        rhs,
        note,
        eq_requirement,
        source_text: line.trim().to_string(),
    })
}

/// Parses a hint file, skipping blank lines and `--` comments. Each entry
/// carries its 1-indexed line number.
pub fn parse_hints(text: &str) -> Vec<(usize, Result<Hint, HintParseError>)> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| {
            let t = l.trim();
            !t.is_empty() && !t.starts_with("--")
        })
        .map(|(i, l)| (i + 1, parse_hint(l)))
        .collect()
}

impl fmt::Display for Hint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {} ==> {}", self.severity, self.lhs, self.rhs)?;
        let mut notes = Vec::new();
        if let Some(n) = self.note {
            notes.push(format!("note = {n}"));
        }
        match self.eq_requirement {
            EqRequirement::None => {}
            EqRequirement::Syntactic => notes.push("eq = syntactic".into()),
            EqRequirement::Sym => notes.push("eq = sym".into()),
            EqRequirement::Equiv => notes.push("eq = equiv".into()),
        }
        if !notes.is_empty() {
            write!(f, " where {}", notes.join(", "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_expr;

    #[test]
    fn reverse_reverse_with_note() {
        let h =
            parse_hint("warn = reverse (reverse x) ==> x where note = IncreasesLaziness").unwrap();
        assert_eq!(h.severity, Severity::Warn);
        assert_eq!(h.lhs, parse_expr("reverse (reverse x)").unwrap());
        assert_eq!(h.rhs, Expr::meta("x"));
        assert_eq!(h.note, Some(Note::IncreasesLaziness));
        assert_eq!(h.eq_requirement, EqRequirement::None);
    }

    #[test]
    fn take_prefix_hint() {
        let h =
            parse_hint("warn = take i s == t ==> (i == length t) && (t `isPrefixOf` s)").unwrap();
        assert_eq!(h.note, None);
        assert_eq!(h.lhs, parse_expr("take i s == t").unwrap());
        assert_eq!(
            h.rhs,
            parse_expr("i == length t && isPrefixOf t s").unwrap()
        );
    }

    #[test]
    fn identity_hint() {
        let h = parse_hint("warn = x ==> x").unwrap();
        assert_eq!(
            (h.lhs, h.rhs, h.note),
            (Expr::meta("x"), Expr::meta("x"), None)
        );
    }

    #[test]
    fn eq_annotation() {
        let h = parse_hint("error = elem x [y] ==> x == y where eq = sym").unwrap();
        assert_eq!(h.severity, Severity::Error);
        assert_eq!(h.eq_requirement, EqRequirement::Sym);
        let h = parse_hint("warn = a ==> a where note = IncreasesLaziness, eq = equiv").unwrap();
        assert_eq!(h.eq_requirement, EqRequirement::Equiv);
        assert_eq!(h.note, Some(Note::IncreasesLaziness));
    }

    #[test]
    fn rejections() {
        assert!(matches!(
            parse_hint("info = x ==> x"),
            Err(HintParseError::UnknownSeverity(_))
        ));
        assert!(matches!(
            parse_hint("warn = x ==> x where note = RemovesLaziness"),
            Err(HintParseError::UnknownNote(_))
        ));
        assert!(
            matches!(parse_hint("warn = x ==> y"), Err(HintParseError::UnboundMetaVar(v)) if v == "y")
        );
        assert!(matches!(
            parse_hint("warn = x => x"),
            Err(HintParseError::Syntax(_))
        ));
        assert!(matches!(
            parse_hint("warn = x ==> x )"),
            Err(HintParseError::Syntax(_))
        ));
    }

    #[test]
    fn lambdas_parse_in_hints() {
        let h = parse_hint("warn = map (\\a -> a) x ==> x").unwrap();
        assert!(h.lhs.contains_lambda());
    }

    #[test]
    fn file_skips_comments_and_blanks() {
        let hints = parse_hints("-- header\n\nwarn = x ==> x\n  -- indented comment\nbogus\n");
        assert_eq!(hints.len(), 2);
        assert_eq!(hints[0].0, 3);
        assert!(hints[0].1.is_ok());
        assert_eq!(hints[1].0, 5);
        assert!(hints[1].1.is_err());
    }

    #[test]
    fn display_reparses() {
        let line = "warn = reverse (reverse x) ==> x where note = IncreasesLaziness";
        let h = parse_hint(line).unwrap();
        assert_eq!(h.to_string(), line);
        assert_eq!(parse_hint(&h.to_string()).unwrap().lhs, h.lhs);
    }
}
