use super::lexer::{tokenize, Tok, Token};
use super::{backtick_fixity, operator_fixity, Assoc, Expr, LocNode, Located, Span, SyntaxError};

/// How bare names are classified.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseMode {
    /// Single lowercase letters are metavariables.
    Hint,
    /// Every name is an identifier.
    Source,
}

/// Parses a complete hint-side expression.
pub fn parse_expr(text: &str) -> Result<Expr, SyntaxError> {
    parse_expr_located(text, ParseMode::Hint).map(|l| l.to_expr())
}

/// Parses a complete expression in which every name is an identifier.
pub fn parse_source_expr(text: &str) -> Result<Expr, SyntaxError> {
    parse_expr_located(text, ParseMode::Source).map(|l| l.to_expr())
}

pub fn parse_expr_located(text: &str, mode: ParseMode) -> Result<Located, SyntaxError> {
    let mut p = Parser::new(text, mode)?;
    let e = p.expr()?;
    p.finish()?;
    Ok(e)
}

pub(crate) struct Parser {
    toks: Vec<Token>,
    pos: usize,
    text_len: usize,
    mode: ParseMode,
}

fn node(span: Span, node: LocNode) -> Located {
    Located {
        span,
        outer: span,
        node,
    }
}

fn leaf(e: Expr, span: Span) -> Located {
    node(span, LocNode::Leaf(e))
}

fn app(f: Located, x: Located) -> Located {
    node(f.outer.to(x.outer), LocNode::App(Box::new(f), Box::new(x)))
}

impl Parser {
    pub(crate) fn new(text: &str, mode: ParseMode) -> Result<Parser, SyntaxError> {
        Ok(Parser {
            toks: tokenize(text)?,
            pos: 0,
            text_len: text.len(),
            mode,
        })
    }

    pub(crate) fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.pos + k).map(|t| &t.tok)
    }

    /// True if `tok` occurs anywhere in the remaining input.
    pub(crate) fn ahead(&self, tok: &Tok) -> bool {
        self.toks[self.pos..].iter().any(|t| &t.tok == tok)
    }

    pub(crate) fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.text_len, |t| t.start)
    }

    pub(crate) fn bump(&mut self) -> Option<Token> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    pub(crate) fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    pub(crate) fn error(&self, msg: impl Into<String>) -> SyntaxError {
        SyntaxError::new(self.offset(), msg)
    }

    pub(crate) fn unexpected(&self, wanted: &str) -> SyntaxError {
        match self.peek() {
            Some(t) => self.error(format!("expected {wanted}, found {}", t.describe())),
            None => self.error(format!("expected {wanted}, found end of input")),
        }
    }

    pub(crate) fn expect(&mut self, tok: Tok) -> Result<Token, SyntaxError> {
        if self.peek() == Some(&tok) {
            Ok(self.bump().unwrap())
        } else {
            Err(self.unexpected(&tok.describe()))
        }
    }

    pub(crate) fn finish(&self) -> Result<(), SyntaxError> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.unexpected("end of input"))
        }
    }

    fn name_expr(&self, name: &str) -> Expr {
        let single_lower = name.len() == 1 && name.chars().all(|c| c.is_ascii_lowercase());
        if self.mode == ParseMode::Hint && single_lower {
            Expr::MetaVar(name.to_string())
        } else {
            Expr::Ident(name.to_string())
        }
    }

    pub(crate) fn expr(&mut self) -> Result<Located, SyntaxError> {
        self.infix(0)
    }

    /// Infix operator at the cursor: name, fixity, and token count.
    fn peek_infix(&self) -> Result<Option<(String, u8, Assoc, usize)>, SyntaxError> {
        match self.peek() {
            Some(Tok::Op(sym)) => match operator_fixity(sym) {
                Some((p, a)) => Ok(Some((sym.clone(), p, a, 1))),
                None => Err(self.error(format!("unknown operator `{sym}`"))),
            },
            Some(Tok::Backtick) => match (self.peek_at(1), self.peek_at(2)) {
                (Some(Tok::Name(n)), Some(Tok::Backtick)) => {
                    let (p, a) = backtick_fixity(n);
                    Ok(Some((n.clone(), p, a, 3)))
                }
                _ => Err(self.error("malformed backtick operator")),
            },
            _ => Ok(None),
        }
    }

    fn infix(&mut self, min: u8) -> Result<Located, SyntaxError> {
        let mut lhs = match self.peek() {
            Some(Tok::Op(o)) if o == "-" => {
                let minus = self.bump().unwrap();
                let operand = self.infix(7)?;
                negate(
                    Span {
                        start: minus.start,
                        end: minus.end,
                    },
                    operand,
                )
            }
            Some(Tok::Backslash) => return self.lambda(),
            _ => self.application()?,
        };
        while let Some((name, prec, assoc, ntoks)) = self.peek_infix()? {
            if prec < min {
                break;
            }
            let first = &self.toks[self.pos];
            let last = &self.toks[self.pos + ntoks - 1];
            let op_span = Span {
                start: first.start,
                end: last.end,
            };
            self.pos += ntoks;
            let rhs = if self.peek() == Some(&Tok::Backslash) {
                self.lambda()?
            } else {
                self.infix(if assoc == Assoc::Right {
                    prec
                } else {
                    prec + 1
                })?
            };
            lhs = if name == "$" {
                app(lhs, rhs)
            } else {
                let op = leaf(self.name_expr(&name), op_span);
                let partial = app(op, lhs);
                app(partial, rhs)
            };
            if assoc == Assoc::None {
                if let Some((next, p2, Assoc::None, _)) = self.peek_infix()? {
                    if p2 == prec {
                        return Err(self.error(format!(
                            "cannot mix non-associative operators `{name}` and `{next}`"
                        )));
                    }
                }
            }
        }
        Ok(lhs)
    }

    fn lambda(&mut self) -> Result<Located, SyntaxError> {
        let start = self.expect(Tok::Backslash)?.start;
        let mut params = Vec::new();
        while let Some(Tok::Name(n)) = self.peek() {
            params.push(n.clone());
            self.bump();
        }
        if params.is_empty() {
            return Err(self.unexpected("lambda parameter"));
        }
        self.expect(Tok::Arrow)?;
        let body = self.expr()?;
        let end = body.span.end;
        Ok(params.into_iter().rev().fold(body, |body, p| {
            node(Span { start, end }, LocNode::Lambda(p, Box::new(body)))
        }))
    }

    fn starts_atom(&self) -> bool {
        matches!(
            self.peek(),
            Some(Tok::Int(_) | Tok::Char(_) | Tok::Str(_) | Tok::LParen | Tok::LBracket)
        ) || matches!(self.peek(), Some(Tok::Name(n)) if n != "where")
    }

    fn application(&mut self) -> Result<Located, SyntaxError> {
        if !self.starts_atom() {
            return Err(self.unexpected("expression"));
        }
        let mut e = self.atom()?;
        while self.starts_atom() {
            let arg = self.atom()?;
            e = app(e, arg);
        }
        Ok(e)
    }

    fn atom(&mut self) -> Result<Located, SyntaxError> {
        let t = self.bump().ok_or_else(|| self.unexpected("expression"))?;
        let span = Span {
            start: t.start,
            end: t.end,
        };
        match t.tok {
            Tok::Name(n) if n != "where" => Ok(leaf(self.name_expr(&n), span)),
            Tok::Int(n) => Ok(leaf(Expr::Int(n), span)),
            Tok::Char(c) => Ok(leaf(Expr::Char(c), span)),
            Tok::Str(s) => Ok(node(
                span,
                LocNode::List(s.chars().map(|c| leaf(Expr::Char(c), span)).collect()),
            )),
            Tok::LBracket => {
                let mut items = Vec::new();
                if self.peek() != Some(&Tok::RBracket) {
                    items.push(self.expr()?);
                    while self.peek() == Some(&Tok::Comma) {
                        self.bump();
                        items.push(self.expr()?);
                    }
                }
                let close = self.expect(Tok::RBracket)?;
                Ok(node(
                    Span {
                        start: t.start,
                        end: close.end,
                    },
                    LocNode::List(items),
                ))
            }
            Tok::LParen => self.paren(t.start),
            _ => {
                self.pos -= 1;
                Err(self.unexpected("expression"))
            }
        }
    }

    fn paren(&mut self, start: usize) -> Result<Located, SyntaxError> {
        match (self.peek().cloned(), self.peek_at(1)) {
            (Some(Tok::RParen), _) => {
                let close = self.bump().unwrap();
                return Ok(leaf(
                    Expr::ident("()"),
                    Span {
                        start,
                        end: close.end,
                    },
                ));
            }
            (Some(Tok::Op(sym)), Some(Tok::RParen)) => {
                if operator_fixity(&sym).is_none() {
                    return Err(self.error(format!("unknown operator `{sym}`")));
                }
                self.bump();
                let close = self.bump().unwrap();
                let span = Span {
                    start,
                    end: close.end,
                };
                let name = if sym == "$" { "id".to_string() } else { sym };
                return Ok(leaf(Expr::Ident(name), span));
            }
            (Some(Tok::Op(sym)), _) if sym != "-" => {
                return Err(self.error("operator sections are not supported"));
            }
            (Some(Tok::Backtick), _) => {
                return Err(self.error("operator sections are not supported"));
            }
            _ => {}
        }
        let first = self.expr()?;
        match self.peek() {
            Some(Tok::Comma) => {
                self.bump();
                let second = self.expr()?;
                if self.peek() == Some(&Tok::Comma) {
                    return Err(self.error("only pairs are supported"));
                }
                let close = self.expect(Tok::RParen)?;
                Ok(node(
                    Span {
                        start,
                        end: close.end,
                    },
                    LocNode::Tuple(Box::new(first), Box::new(second)),
                ))
            }
            Some(Tok::RParen) => {
                let close = self.bump().unwrap();
                Ok(Located {
                    outer: Span {
                        start,
                        end: close.end,
                    },
                    ..first
                })
            }
            Some(Tok::Op(_) | Tok::Backtick) => {
                Err(self.error("operator sections are not supported"))
            }
            _ => Err(self.unexpected("`)`")),
        }
    }
}

fn negate(minus: Span, operand: Located) -> Located {
    match operand.node {
        LocNode::Leaf(Expr::Int(n)) => leaf(Expr::Int(-n), minus.to(operand.outer)),
        _ => app(leaf(Expr::ident("negate"), minus), operand),
    }
}
