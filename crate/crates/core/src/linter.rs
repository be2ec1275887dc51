//! Applying hints to source files.

use std::collections::BTreeMap;

use crate::syntax::{parse_source, Expr, Hint, LocNode, Located, Note, SourceBinding, SourceError};

/// Metavariable bindings produced by [`match_expr`].
pub type Subst = BTreeMap<String, Expr>;

/// First-order structural matching of a hint pattern against a normalized
/// expression. Repeated metavariables must match equal subexpressions.
pub fn match_expr(pattern: &Expr, subject: &Expr) -> Option<Subst> {
    let mut s = Subst::new();
    go(pattern, subject, &mut s).then_some(s)
}

fn go(p: &Expr, e: &Expr, s: &mut Subst) -> bool {
    match (p, e) {
        (Expr::MetaVar(m), _) => match s.get(m) {
            Some(bound) => bound == e,
            None => {
                s.insert(m.clone(), e.clone());
                true
            }
        },
        (Expr::App(f, x), Expr::App(g, y)) => go(f, g, s) && go(x, y, s),
        (Expr::Tuple(a, b), Expr::Tuple(c, d)) => go(a, c, s) && go(b, d, s),
        (Expr::List(xs), Expr::List(ys)) => {
            xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| go(x, y, s))
        }
        (Expr::Lambda(..), _) => false,
        _ => p == e,
    }
}

/// Replaces metavariables in `e` by their bindings.
pub fn substitute(e: &Expr, s: &Subst) -> Expr {
    match e {
        Expr::MetaVar(m) => s.get(m).cloned().unwrap_or_else(|| e.clone()),
        Expr::App(f, x) => Expr::app(substitute(f, s), substitute(x, s)),
        Expr::Tuple(a, b) => Expr::Tuple(Box::new(substitute(a, s)), Box::new(substitute(b, s))),
        Expr::List(xs) => Expr::List(xs.iter().map(|x| substitute(x, s)).collect()),
        Expr::Lambda(v, body) => Expr::Lambda(v.clone(), Box::new(substitute(body, s))),
        _ => e.clone(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Suggestion {
    pub file: String,
    pub line: usize,
    pub column: usize,
    /// Source text of the matched subexpression.
    pub found: String,
    /// Normalized form of the matched subexpression.
    pub found_expr: Expr,
    pub replacement: Expr,
    pub hint: Hint,
    pub note: Option<String>,
}

/// Finds hint matches in a source file, outermost first, ordered by
/// position. Only the first matching hint is reported for a subexpression,
/// and nothing inside a match is reported.
pub fn scan(file: &str, text: &str, hints: &[Hint]) -> Result<Vec<Suggestion>, SourceError> {
    let lines: Vec<&str> = text.lines().collect();
    let mut out = Vec::new();
    for b in parse_source(text)? {
        let line_text = lines[b.line - 1];
        visit(&b, &b.located, line_text, file, hints, &mut out);
    }
    out.sort_by_key(|s| (s.line, s.column));
    Ok(out)
}

fn visit(
    b: &SourceBinding,
    node: &Located,
    line_text: &str,
    file: &str,
    hints: &[Hint],
    out: &mut Vec<Suggestion>,
) {
    let subject = node.to_expr();
    for h in hints {
        if let Some(s) = match_expr(&h.lhs, &subject) {
            out.push(Suggestion {
                file: file.to_string(),
                line: b.line,
                column: b.column_of(node.span.start),
                found: line_text[node.span.start..node.span.end].to_string(),
                found_expr: subject,
                replacement: substitute(&h.rhs, &s),
                hint: h.clone(),
                note: h
                    .note
                    .map(|Note::IncreasesLaziness| "increases laziness".to_string()),
            });
            return;
        }
    }
    if let LocNode::Lambda(..) = node.node {
        return;
    }
    for c in node.children() {
        visit(b, c, line_text, file, hints, out);
    }
}

/// HLint's tty block for one suggestion, newline-terminated.
pub fn render_suggestion(s: &Suggestion) -> String {
    let mut out = format!(
        "{}:{}:{}: {}: Use alternative\nFound:\n  {}\nWhy not:\n  {}\n",
        s.file,
        s.line,
        s.column,
        s.hint.severity.label(),
        s.found,
        s.replacement
    );
    if let Some(n) = &s.note {
        out.push_str(&format!("Note: {n}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_expr, parse_hint, parse_source_expr};

    fn reverse_hint() -> Hint {
        parse_hint("warn = reverse (reverse x) ==> x where note = IncreasesLaziness").unwrap()
    }

    #[test]
    fn matching() {
        let p = parse_expr("reverse (reverse x)").unwrap();
        let s = match_expr(
            &p,
            &parse_source_expr("reverse (reverse (sort xs))").unwrap(),
        )
        .unwrap();
        assert_eq!(s["x"], parse_source_expr("sort xs").unwrap());
        let s = match_expr(&p, &parse_source_expr("reverse $ reverse xs").unwrap()).unwrap();
        assert_eq!(s["x"], Expr::ident("xs"));
        let p = parse_expr("head (drop n x)").unwrap();
        assert!(match_expr(&p, &parse_source_expr("head xs").unwrap()).is_none());
    }

    #[test]
    fn repeated_metavariables_must_agree() {
        let p = parse_expr("x == x").unwrap();
        assert!(match_expr(&p, &parse_source_expr("a == a").unwrap()).is_some());
        assert!(match_expr(&p, &parse_source_expr("a == b").unwrap()).is_none());
    }

    #[test]
    fn reverse_of_sorted_list() {
        let s = scan(
            "test.hs",
            "output xs = print (reverse (reverse (sort xs)))",
            &[reverse_hint()],
        )
        .unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(
            render_suggestion(&s[0]),
            "test.hs:1:20: Warning: Use alternative\nFound:\n  reverse (reverse (sort xs))\nWhy not:\n  sort xs\nNote: increases laziness\n"
        );
    }

    #[test]
    fn outermost_only() {
        let s = scan(
            "a.hs",
            "f a = reverse (reverse (reverse (reverse a)))",
            &[reverse_hint()],
        )
        .unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].replacement.to_string(), "reverse (reverse a)");
        assert_eq!(s[0].column, 7);
    }

    #[test]
    fn empty_file_and_severity_label() {
        assert!(scan("e.hs", "", &[reverse_hint()]).unwrap().is_empty());
        let h = parse_hint("error = reverse (reverse x) ==> x").unwrap();
        let s = scan("t.hs", "g = reverse (reverse [1])", &[h]).unwrap();
        let block = render_suggestion(&s[0]);
        assert!(block.starts_with("t.hs:1:5: Error: Use alternative\n"));
        assert!(!block.contains("Note:"));
    }

    #[test]
    fn suggestions_are_sorted_by_position() {
        let text = "b = reverse (reverse [2])\na = (reverse (reverse [1]), reverse (reverse [3]))";
        let s = scan("m.hs", text, &[reverse_hint()]).unwrap();
        let pos: Vec<(usize, usize)> = s.iter().map(|s| (s.line, s.column)).collect();
        assert_eq!(pos, vec![(1, 5), (2, 6), (2, 29)]);
    }
}
