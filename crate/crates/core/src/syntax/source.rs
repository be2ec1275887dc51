use thiserror::Error;

use super::lexer::Tok;
use super::{Expr, Located, ParseMode, Parser, SyntaxError};

/// One `name params… = body` line of a source file.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceBinding {
    pub name: String,
    pub params: Vec<String>,
    pub body: Expr,
    /// Body with spans; byte offsets are relative to the start of `line`.
    pub located: Located,
    /// 1-indexed line number.
    pub line: usize,
    /// 1-indexed byte column where the body starts.
    pub column: usize,
}

impl SourceBinding {
    /// 1-indexed byte column of a span offset within this binding's line.
    pub fn column_of(&self, offset: usize) -> usize {
        offset + 1
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct SourceError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

pub fn parse_source(text: &str) -> Result<Vec<SourceBinding>, SourceError> {
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with("--") {
            continue;
        }
        let lineno = idx + 1;
        let wrap = |e: SyntaxError| SourceError {
            line: lineno,
            column: e.offset + 1,
            message: e.message,
        };
        out.push(parse_binding(line, lineno).map_err(wrap)?);
    }
    Ok(out)
}

fn parse_binding(line: &str, lineno: usize) -> Result<SourceBinding, SyntaxError> {
    let mut p = Parser::new(line, ParseMode::Source)?;
    let mut names = Vec::new();
    while let Some(Tok::Name(n)) = p.peek() {
        names.push(n.clone());
        p.bump();
    }
    if names.is_empty() {
        return Err(p.unexpected("binding name"));
    }
    p.expect(Tok::Equals)?;
    let body_start = p.offset();
    let located = p.expr()?;
    p.finish()?;
    let name = names.remove(0);
    Ok(SourceBinding {
        name,
        params: names,
        body: located.to_expr(),
        located,
        line: lineno,
        column: body_start + 1,
    })
}
