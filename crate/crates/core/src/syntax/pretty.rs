//! Minimal-parenthesis rendering. `parse_expr(&pretty(e)) == e` for every
//! normalized `e` whose names obey the metavariable rule.

use num_traits::Signed;

use super::{is_operator_name, operator_fixity, Assoc, Expr};

const APP_PREC: u8 = 10;
const ARG_PREC: u8 = 11;

pub fn pretty(e: &Expr) -> String {
    let mut out = String::new();
    write(e, 0, &mut out);
    out
}

fn name_text(name: &str) -> String {
    if is_operator_name(name) {
        format!("({name})")
    } else {
        name.to_string()
    }
}

fn paren_if(cond: bool, out: &mut String, body: impl FnOnce(&mut String)) {
    if cond {
        out.push('(');
    }
    body(out);
    if cond {
        out.push(')');
    }
}

pub(crate) fn escape_char(c: char, quote: char, out: &mut String) {
    match c {
        '\n' => out.push_str("\\n"),
        '\t' => out.push_str("\\t"),
        '\\' => out.push_str("\\\\"),
        c if c == quote => {
            out.push('\\');
            out.push(c);
        }
        c => out.push(c),
    }
}

fn write(e: &Expr, ctx: u8, out: &mut String) {
    match e {
        Expr::MetaVar(n) => out.push_str(n),
        Expr::Ident(n) => out.push_str(&name_text(n)),
        Expr::Int(n) => paren_if(n.is_negative() && ctx > 6, out, |o| {
            o.push_str(&n.to_string())
        }),
        Expr::Char(c) => {
            out.push('\'');
            escape_char(*c, '\'', out);
            out.push('\'');
        }
        Expr::Str(s) => {
            out.push('"');
            s.chars().for_each(|c| escape_char(c, '"', out));
            out.push('"');
        }
        Expr::List(xs) if !xs.is_empty() && xs.iter().all(|x| matches!(x, Expr::Char(_))) => {
            out.push('"');
            for x in xs {
                if let Expr::Char(c) = x {
                    escape_char(*c, '"', out);
                }
            }
            out.push('"');
        }
        Expr::List(xs) => {
            out.push('[');
            for (i, x) in xs.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write(x, 0, out);
            }
            out.push(']');
        }
        Expr::Tuple(a, b) => {
            out.push('(');
            write(a, 0, out);
            out.push_str(", ");
            write(b, 0, out);
            out.push(')');
        }
        Expr::Lambda(..) => paren_if(ctx > 0, out, |o| {
            o.push('\\');
            let mut cur = e;
            let mut first = true;
            while let Expr::Lambda(p, body) = cur {
                if !first {
                    o.push(' ');
                }
                o.push_str(p);
                first = false;
                cur = body;
            }
            o.push_str(" -> ");
            write(cur, 0, o);
        }),
        Expr::App(..) => write_app(e, ctx, out),
    }
}

fn write_app(e: &Expr, ctx: u8, out: &mut String) {
    let (head, args) = e.spine();
    if let Expr::Ident(op) = head {
        if let (Some((prec, assoc)), true) = (operator_fixity(op), args.len() >= 2) {
            let infix = |o: &mut String| {
                let (lctx, rctx) = match assoc {
                    Assoc::Left => (prec, prec + 1),
                    Assoc::Right => (prec + 1, prec),
                    Assoc::None => (prec + 1, prec + 1),
                };
                write(args[0], lctx, o);
                o.push(' ');
                o.push_str(op);
                o.push(' ');
                write(args[1], rctx, o);
            };
            if args.len() == 2 {
                paren_if(prec < ctx, out, infix);
            } else {
                paren_if(ctx > APP_PREC, out, |o| {
                    paren_if(true, o, infix);
                    for a in &args[2..] {
                        o.push(' ');
                        write(a, ARG_PREC, o);
                    }
                });
            }
            return;
        }
    }
    paren_if(ctx > APP_PREC, out, |o| {
        write(head, ARG_PREC, o);
        for a in &args {
            o.push(' ');
            write(a, ARG_PREC, o);
        }
    });
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_expr;
    use proptest::prelude::*;

    fn rt(s: &str) -> String {
        pretty(&parse_expr(s).unwrap())
    }

    #[test]
    fn examples() {
        assert_eq!(
            pretty(&Expr::app(
                Expr::ident("reverse"),
                Expr::app(Expr::ident("sort"), Expr::ident("xs"))
            )),
            "reverse (sort xs)"
        );
        assert_eq!(pretty(&Expr::int(3)), "3");
    }

    #[test]
    fn minimal_parentheses() {
        assert_eq!(rt("(a ++ b) ++ c"), "(a ++ b) ++ c");
        assert_eq!(rt("a ++ (b ++ c)"), "a ++ b ++ c");
        assert_eq!(rt("(a - b) - c"), "a - b - c");
        assert_eq!(rt("a - (b - c)"), "a - (b - c)");
        assert_eq!(rt("(f x) y"), "f x y");
        assert_eq!(rt("f (g x)"), "f (g x)");
        assert_eq!(
            rt("(i == length t) && (t `isPrefixOf` s)"),
            "i == length t && isPrefixOf t s"
        );
        assert_eq!(rt("take (-1) xs"), "take (-1) xs");
        assert_eq!(rt("-1"), "-1");
        assert_eq!(rt("(++) a"), "(++) a");
        assert_eq!(rt("\"ab\""), "\"ab\"");
        assert_eq!(rt("map (\\a -> a) xs"), "map (\\a -> a) xs");
    }

    fn leaf() -> impl Strategy<Value = Expr> {
        prop_oneof![
            "[a-z]".prop_map(Expr::MetaVar),
            prop::sample::select(vec![
                "reverse", "xs", "map", "True", "Nothing", "()", "++", ":", "-", "==", "&&", "!!",
                "elem", "foo'",
            ])
            .prop_map(Expr::ident),
            (-3i64..20).prop_map(Expr::int),
            prop::sample::select(vec!['a', 'z', '\'', '"', '\\', '\n', ' ']).prop_map(Expr::Char),
        ]
    }

    pub(crate) fn normalized_expr() -> impl Strategy<Value = Expr> {
        leaf().prop_recursive(5, 40, 4, |inner| {
            prop_oneof![
                4 => (inner.clone(), inner.clone()).prop_map(|(f, x)| Expr::app(f, x)),
                2 => (
                    prop::sample::select(vec!["++", ":", "-", "+", "==", "&&", "||", "!!", "<="]),
                    inner.clone(),
                    inner.clone()
                )
                    .prop_map(|(op, a, b)| Expr::apps(Expr::ident(op), [a, b])),
                1 => prop::collection::vec(inner.clone(), 0..3).prop_map(Expr::List),
                1 => (inner.clone(), inner.clone())
                    .prop_map(|(a, b)| Expr::Tuple(Box::new(a), Box::new(b))),
                1 => ("[a-z]", inner).prop_map(|(p, b)| Expr::Lambda(p, Box::new(b))),
            ]
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn parse_inverts_pretty(e in normalized_expr()) {
            let text = pretty(&e);
            let back = parse_expr(&text);
            prop_assert_eq!(back.as_ref().ok(), Some(&e), "text: {}", text);
        }

        #[test]
        fn normalize_is_idempotent(e in normalized_expr()) {
            let once = crate::syntax::normalize(&e);
            prop_assert_eq!(&crate::syntax::normalize(&once), &once);
            prop_assert!(!once.any(&|x| matches!(x, Expr::Str(_)) || matches!(x, Expr::Ident(n) if n == "$")));
        }
    }
}
