//! Tokenizer shared by the expression, hint, source, and type parsers.

use num_bigint::BigInt;

use super::SyntaxError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Name(String),
    Op(String),
    Int(BigInt),
    Char(char),
    Str(String),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Backtick,
    Backslash,
    Arrow,
    FatArrow,
    DoubleColon,
    Equals,
    Bar,
    Rewrite,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Name(n) => format!("`{n}`"),
            Tok::Op(o) => format!("operator `{o}`"),
            Tok::Int(n) => format!("literal {n}"),
            Tok::Char(c) => format!("literal {c:?}"),
            Tok::Str(s) => format!("literal {s:?}"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Backtick => "backtick".into(),
            Tok::Backslash => "`\\`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::FatArrow => "`=>`".into(),
            Tok::DoubleColon => "`::`".into(),
            Tok::Equals => "`=`".into(),
            Tok::Bar => "`|`".into(),
            Tok::Rewrite => "`==>`".into(),
        }
    }
}

/// A token with its byte span in the lexed text.
#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub tok: Tok,
    pub start: usize,
    pub end: usize,
}

fn is_symbol(c: char) -> bool {
    "!#$%&*+./<=>?@\\^|-~:".contains(c)
}

fn is_name_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_name_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

pub(crate) fn tokenize(text: &str) -> Result<Vec<Token>, SyntaxError> {
    let bytes: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let end_of = |i: usize| bytes.get(i).map_or(text.len(), |&(o, _)| o);

    while i < bytes.len() {
        let (start, c) = bytes[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let tok = if is_name_start(c) {
            let mut j = i;
            while j < bytes.len() && is_name_char(bytes[j].1) {
                j += 1;
            }
            let name = text[start..end_of(j)].to_string();
            i = j;
            Tok::Name(name)
        } else if c.is_ascii_digit() {
            let mut j = i;
            while j < bytes.len() && bytes[j].1.is_ascii_digit() {
                j += 1;
            }
            let digits = &text[start..end_of(j)];
            i = j;
            Tok::Int(digits.parse().expect("digits"))
        } else if c == '\'' {
            let (ch, next) = lex_char_body(text, &bytes, i + 1, '\'')?;
            match bytes.get(next) {
                Some(&(_, '\'')) => {}
                _ => return Err(SyntaxError::new(start, "unterminated character literal")),
            }
            i = next + 1;
            Tok::Char(ch)
        } else if c == '"' {
            let mut j = i + 1;
            let mut s = String::new();
            loop {
                match bytes.get(j) {
                    None => return Err(SyntaxError::new(start, "unterminated string literal")),
                    Some(&(_, '"')) => break,
                    Some(_) => {
                        let (ch, next) = lex_char_body(text, &bytes, j, '"')?;
                        s.push(ch);
                        j = next;
                    }
                }
            }
            i = j + 1;
            Tok::Str(s)
        } else if is_symbol(c) {
            let mut j = i;
            while j < bytes.len() && is_symbol(bytes[j].1) {
                j += 1;
            }
            let sym = &text[start..end_of(j)];
            if sym.len() >= 2 && sym.chars().all(|c| c == '-') {
                // line comment
                while j < bytes.len() && bytes[j].1 != '\n' {
                    j += 1;
                }
                i = j;
                continue;
            }
            i = j;
            match sym {
                "\\" => Tok::Backslash,
                "->" => Tok::Arrow,
                "=>" => Tok::FatArrow,
                "::" => Tok::DoubleColon,
                "=" => Tok::Equals,
                "|" => Tok::Bar,
                "==>" => Tok::Rewrite,
                _ => Tok::Op(sym.to_string()),
            }
        } else {
            i += 1;
            match c {
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                '[' => Tok::LBracket,
                ']' => Tok::RBracket,
                ',' => Tok::Comma,
                '`' => Tok::Backtick,
                _ => {
                    return Err(SyntaxError::new(
                        start,
                        format!("unexpected character {c:?}"),
                    ))
                }
            }
        };
        out.push(Token {
            tok,
            start,
            end: end_of(i),
        });
    }
    Ok(out)
}

/// Reads one (possibly escaped) character starting at index `i`.
fn lex_char_body(
    text: &str,
    bytes: &[(usize, char)],
    i: usize,
    quote: char,
) -> Result<(char, usize), SyntaxError> {
    let at = bytes.get(i).map_or(text.len(), |&(o, _)| o);
    match bytes.get(i) {
        None => Err(SyntaxError::new(at, "unexpected end of literal")),
        Some(&(_, '\\')) => {
            let esc = match bytes.get(i + 1) {
                Some(&(_, 'n')) => '\n',
                Some(&(_, 't')) => '\t',
                Some(&(_, '\\')) => '\\',
                Some(&(_, '\'')) => '\'',
                Some(&(_, '"')) => '"',
                _ => return Err(SyntaxError::new(at, "unknown escape sequence")),
            };
            Ok((esc, i + 2))
        }
        Some(&(_, c)) if c == quote && quote == '\'' => {
            Err(SyntaxError::new(at, "empty character literal"))
        }
        Some(&(_, c)) => Ok((c, i + 1)),
    }
}
