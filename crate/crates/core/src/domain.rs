//! Finite partial values and the definedness order.
//!
//! A [`PValue`] is a constructor tree whose leaves may be bottom. There are two
//! kinds of bottom: a *definite* one, which the evaluator has proven (a crash,
//! `error`, a failed pattern match), and an *indefinite* one, which only
//! records that observation stopped early (fuel ran out, or the value was
//! truncated at the observation depth). Definite bottom is the least element
//! of every type. An indefinite leaf stands for an unknown value, so any
//! comparison it could influence is reported as indefinite.

use std::fmt;
use std::hash::{Hash, Hasher};

use num_bigint::BigInt;
use num_traits::Signed;
use thiserror::Error;

/// Constructor tags of the first-order data types.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tag {
    Nil,
    Cons,
    False,
    True,
    Nothing,
    Just,
    Pair,
    Unit,
    LT,
    EQ,
    GT,
}

impl Tag {
    pub fn arity(self) -> usize {
        match self {
            Tag::Nil | Tag::True | Tag::False | Tag::Nothing | Tag::Unit => 0,
            Tag::LT | Tag::EQ | Tag::GT => 0,
            Tag::Just => 1,
            Tag::Cons | Tag::Pair => 2,
        }
    }

    /// Source-level name of the constructor.
    pub fn name(self) -> &'static str {
        match self {
            Tag::Nil => "[]",
            Tag::Cons => ":",
            Tag::True => "True",
            Tag::False => "False",
            Tag::Nothing => "Nothing",
            Tag::Just => "Just",
            Tag::Pair => "(,)",
            Tag::Unit => "()",
            Tag::LT => "LT",
            Tag::EQ => "EQ",
            Tag::GT => "GT",
        }
    }

    pub fn from_name(name: &str) -> Option<Tag> {
        Some(match name {
            "[]" => Tag::Nil,
            ":" => Tag::Cons,
            "True" => Tag::True,
            "False" => Tag::False,
            "Nothing" => Tag::Nothing,
            "Just" => Tag::Just,
            "(,)" => Tag::Pair,
            "()" => Tag::Unit,
            "LT" => Tag::LT,
            "EQ" => Tag::EQ,
            "GT" => Tag::GT,
            _ => return None,
        })
    }

    /// Data type this constructor belongs to.
    pub fn family(self) -> &'static str {
        match self {
            Tag::Nil | Tag::Cons => "list",
            Tag::True | Tag::False => "Bool",
            Tag::Nothing | Tag::Just => "Maybe",
            Tag::Pair => "pair",
            Tag::Unit => "unit",
            Tag::LT | Tag::EQ | Tag::GT => "Ordering",
        }
    }

    /// Declaration order within the data type (the order `compare` uses).
    pub fn ordinal(self) -> u8 {
        match self {
            Tag::Nil | Tag::False | Tag::Nothing | Tag::Pair | Tag::Unit | Tag::LT => 0,
            Tag::Cons | Tag::True | Tag::Just | Tag::EQ => 1,
            Tag::GT => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Cause {
    FuelExhausted,
    DepthTruncated,
}

#[derive(Debug, Clone)]
pub enum Bottom {
    /// Provably undefined; the reason is informational only.
    Definite(String),
    /// Not observed.
    Indefinite(Cause),
}

impl PartialEq for Bottom {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Bottom::Definite(_), Bottom::Definite(_)) => true,
            (Bottom::Indefinite(a), Bottom::Indefinite(b)) => a == b,
            _ => false,
        }
    }
}

impl Eq for Bottom {}

impl Hash for Bottom {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match self {
            Bottom::Definite(_) => 0u8.hash(state),
            Bottom::Indefinite(c) => {
                1u8.hash(state);
                c.hash(state);
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PValue {
    Bottom(Bottom),
    Con(Tag, Vec<PValue>),
    Int(BigInt),
    Char(char),
}

impl PValue {
    /// Definite bottom.
    pub fn bottom() -> PValue {
        PValue::Bottom(Bottom::Definite("undefined".into()))
    }

    pub fn definite(reason: impl Into<String>) -> PValue {
        PValue::Bottom(Bottom::Definite(reason.into()))
    }

    pub fn indefinite(cause: Cause) -> PValue {
        PValue::Bottom(Bottom::Indefinite(cause))
    }

    pub fn int(n: i64) -> PValue {
        PValue::Int(BigInt::from(n))
    }

    pub fn con(tag: Tag) -> PValue {
        PValue::Con(tag, vec![])
    }

    pub fn nil() -> PValue {
        PValue::con(Tag::Nil)
    }

    pub fn cons(head: PValue, tail: PValue) -> PValue {
        PValue::Con(Tag::Cons, vec![head, tail])
    }

    pub fn bool(b: bool) -> PValue {
        PValue::con(if b { Tag::True } else { Tag::False })
    }

    pub fn just(v: PValue) -> PValue {
        PValue::Con(Tag::Just, vec![v])
    }

    pub fn pair(a: PValue, b: PValue) -> PValue {
        PValue::Con(Tag::Pair, vec![a, b])
    }

    /// Fully spined list.
    pub fn list(items: impl IntoIterator<Item = PValue>) -> PValue {
        let items: Vec<PValue> = items.into_iter().collect();
        items
            .into_iter()
            .rev()
            .fold(PValue::nil(), |tail, head| PValue::cons(head, tail))
    }

    pub fn is_definite_bottom(&self) -> bool {
        matches!(self, PValue::Bottom(Bottom::Definite(_)))
    }

    pub fn is_indefinite(&self) -> bool {
        matches!(self, PValue::Bottom(Bottom::Indefinite(_)))
    }

    pub fn indefinite_free(&self) -> bool {
        match self {
            PValue::Bottom(b) => matches!(b, Bottom::Definite(_)),
            PValue::Con(_, xs) => xs.iter().all(PValue::indefinite_free),
            PValue::Int(_) | PValue::Char(_) => true,
        }
    }

    /// Enumeration rank: bottom 0, atoms and nullary constructors 1,
    /// otherwise one more than the largest child.
    pub fn rank(&self) -> usize {
        match self {
            PValue::Bottom(_) => 0,
            PValue::Int(_) | PValue::Char(_) => 1,
            PValue::Con(_, xs) => 1 + xs.iter().map(PValue::rank).max().unwrap_or(0),
        }
    }

    /// Number of non-bottom nodes.
    pub fn size(&self) -> usize {
        match self {
            PValue::Bottom(_) => 0,
            PValue::Int(_) | PValue::Char(_) => 1,
            PValue::Con(_, xs) => 1 + xs.iter().map(PValue::size).sum::<usize>(),
        }
    }

    fn check_arity(&self) -> Result<(), DomainError> {
        if let PValue::Con(tag, xs) = self {
            if xs.len() != tag.arity() {
                return Err(DomainError::Arity {
                    tag: *tag,
                    found: xs.len(),
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DomainError {
    #[error("constructor {} expects {} children, found {found}", tag.name(), tag.arity())]
    Arity { tag: Tag, found: usize },
    #[error("cannot compare values of different types: {0} and {1}")]
    TypeMismatch(String, String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub enum Relation {
    Equal,
    StrictlyLess,
    StrictlyGreater,
    Incomparable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub enum Definiteness {
    Definite,
    Indefinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct OrderResult {
    pub relation: Relation,
    pub definiteness: Definiteness,
}

impl OrderResult {
    pub fn is_definite(&self) -> bool {
        self.definiteness == Definiteness::Definite
    }
}

/// Truth value that may depend on how indefinite leaves get refined.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Tri {
    Yes,
    No,
    Unknown,
}

impl Tri {
    fn and(self, other: Tri) -> Tri {
        match (self, other) {
            (Tri::No, _) | (_, Tri::No) => Tri::No,
            (Tri::Yes, Tri::Yes) => Tri::Yes,
            _ => Tri::Unknown,
        }
    }
}

/// `a ⊑ b`, three-valued over all refinements of indefinite leaves.
fn below(a: &PValue, b: &PValue) -> Result<Tri, DomainError> {
    a.check_arity()?;
    b.check_arity()?;
    Ok(match (a, b) {
        (PValue::Bottom(Bottom::Definite(_)), _) => Tri::Yes,
        (PValue::Bottom(Bottom::Indefinite(_)), _) => Tri::Unknown,
        (_, PValue::Bottom(Bottom::Definite(_))) => Tri::No,
        (_, PValue::Bottom(Bottom::Indefinite(_))) => Tri::Unknown,
        (PValue::Int(x), PValue::Int(y)) => yes_if(x == y),
        (PValue::Char(x), PValue::Char(y)) => yes_if(x == y),
        (PValue::Con(s, xs), PValue::Con(t, ys)) => {
            if s.family() != t.family() {
                return Err(mismatch(a, b));
            }
            if s != t {
                Tri::No
            } else {
                let mut acc = Tri::Yes;
                for (x, y) in xs.iter().zip(ys) {
                    acc = acc.and(below(x, y)?);
                }
                acc
            }
        }
        _ => return Err(mismatch(a, b)),
    })
}

fn yes_if(b: bool) -> Tri {
    if b {
        Tri::Yes
    } else {
        Tri::No
    }
}

fn mismatch(a: &PValue, b: &PValue) -> DomainError {
    DomainError::TypeMismatch(a.to_string(), b.to_string())
}

/// `a ⊑ b` with every indefinite leaf read as bottom.
fn below_as_bottom(a: &PValue, b: &PValue) -> bool {
    match (a, b) {
        (PValue::Bottom(_), _) => true,
        (_, PValue::Bottom(_)) => false,
        (PValue::Int(x), PValue::Int(y)) => x == y,
        (PValue::Char(x), PValue::Char(y)) => x == y,
        (PValue::Con(s, xs), PValue::Con(t, ys)) => {
            s == t && xs.iter().zip(ys).all(|(x, y)| below_as_bottom(x, y))
        }
        _ => false,
    }
}

/// Compares two values of the same type under the definedness order.
///
/// The relation is computed as if indefinite leaves were bottom; it is marked
/// [`Definiteness::Definite`] only when no refinement of those leaves could
/// change it.
pub fn compare_pv(a: &PValue, b: &PValue) -> Result<OrderResult, DomainError> {
    let ab = below(a, b)?;
    let ba = below(b, a)?;
    let relation = match (below_as_bottom(a, b), below_as_bottom(b, a)) {
        (true, true) => Relation::Equal,
        (true, false) => Relation::StrictlyLess,
        (false, true) => Relation::StrictlyGreater,
        (false, false) => Relation::Incomparable,
    };
    let definiteness = if ab != Tri::Unknown && ba != Tri::Unknown {
        Definiteness::Definite
    } else {
        Definiteness::Indefinite
    };
    Ok(OrderResult {
        relation,
        definiteness,
    })
}

/// Replaces every subterm below constructor depth `depth` with an
/// indefinite leaf. Atoms and bottoms count no depth of their own.
pub fn truncate(v: &PValue, depth: usize) -> PValue {
    match v {
        PValue::Con(tag, xs) => {
            if depth == 0 {
                PValue::indefinite(Cause::DepthTruncated)
            } else {
                PValue::Con(*tag, xs.iter().map(|x| truncate(x, depth - 1)).collect())
            }
        }
        other => other.clone(),
    }
}

impl fmt::Display for PValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(self, Ctx::Top))
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Ctx {
    Top,
    ConsHead,
    Arg,
}

fn render(v: &PValue, ctx: Ctx) -> String {
    match v {
        PValue::Bottom(Bottom::Definite(_)) => "_|_".into(),
        PValue::Bottom(Bottom::Indefinite(_)) => "?".into(),
        PValue::Int(n) if n.is_negative() && ctx == Ctx::Arg => format!("({n})"),
        PValue::Int(n) => n.to_string(),
        PValue::Char(c) => {
            let mut s = String::from("'");
            crate::syntax::escape_char(*c, '\'', &mut s);
            s.push('\'');
            s
        }
        PValue::Con(Tag::Cons, _) | PValue::Con(Tag::Nil, _) => render_list(v, ctx),
        PValue::Con(Tag::Pair, xs) if xs.len() == 2 => {
            format!(
                "({}, {})",
                render(&xs[0], Ctx::Top),
                render(&xs[1], Ctx::Top)
            )
        }
        PValue::Con(tag, xs) if xs.is_empty() => tag.name().to_string(),
        PValue::Con(tag, xs) => {
            let mut s = tag.name().to_string();
            for x in xs {
                s.push(' ');
                s.push_str(&render(x, Ctx::Arg));
            }
            if ctx == Ctx::Arg {
                format!("({s})")
            } else {
                s
            }
        }
    }
}

fn render_list(v: &PValue, ctx: Ctx) -> String {
    let mut items = Vec::new();
    let mut cur = v;
    while let PValue::Con(Tag::Cons, xs) = cur {
        items.push(&xs[0]);
        cur = &xs[1];
    }
    if matches!(cur, PValue::Con(Tag::Nil, _)) {
        let body: Vec<String> = items.iter().map(|x| render(x, Ctx::Top)).collect();
        return format!("[{}]", body.join(", "));
    }
    let mut parts: Vec<String> = items.iter().map(|x| render(x, Ctx::ConsHead)).collect();
    parts.push(render(cur, Ctx::ConsHead));
    let s = parts.join(" : ");
    if ctx > Ctx::Top {
        format!("({s})")
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: &PValue, b: &PValue) -> (Relation, Definiteness) {
        let r = compare_pv(a, b).unwrap();
        (r.relation, r.definiteness)
    }

    fn q() -> PValue {
        PValue::indefinite(Cause::DepthTruncated)
    }

    #[test]
    fn bottom_against_bottom() {
        let b = PValue::bottom();
        assert_eq!(rel(&b, &b), (Relation::Equal, Definiteness::Definite));
    }

    #[test]
    fn bottom_is_least() {
        let v = PValue::cons(PValue::int(1), PValue::nil());
        assert_eq!(
            rel(&PValue::bottom(), &v),
            (Relation::StrictlyLess, Definiteness::Definite)
        );
    }

    #[test]
    fn pointwise_incomparable() {
        let a = PValue::cons(PValue::bottom(), PValue::nil());
        let b = PValue::cons(PValue::int(1), PValue::bottom());
        assert_eq!(
            rel(&a, &b),
            (Relation::Incomparable, Definiteness::Definite)
        );
    }

    #[test]
    fn indefinite_leaves() {
        // ⊥ vs ?: equal if ? is ⊥, less otherwise
        assert_eq!(
            rel(&PValue::bottom(), &PValue::indefinite(Cause::FuelExhausted)),
            (Relation::Equal, Definiteness::Indefinite)
        );
        // distinct heads stay incomparable whatever the tails become
        let a = PValue::cons(PValue::int(1), q());
        let b = PValue::cons(PValue::int(2), q());
        assert_eq!(
            rel(&a, &b),
            (Relation::Incomparable, Definiteness::Definite)
        );
        // 1 : ? vs 1 : []: could be equal or incomparable
        let c = PValue::cons(PValue::int(1), PValue::nil());
        assert_eq!(
            rel(&a, &c),
            (Relation::StrictlyLess, Definiteness::Indefinite)
        );
    }

    #[test]
    fn mismatches_are_errors() {
        assert!(compare_pv(&PValue::int(1), &PValue::nil()).is_err());
        assert!(compare_pv(&PValue::bool(true), &PValue::nil()).is_err());
        assert!(compare_pv(&PValue::Con(Tag::Cons, vec![]), &PValue::nil()).is_err());
    }

    #[test]
    fn truncate_examples() {
        fn ones(n: usize) -> PValue {
            if n == 0 {
                PValue::bottom()
            } else {
                PValue::cons(PValue::int(1), ones(n - 1))
            }
        }
        assert_eq!(
            truncate(&ones(10), 2),
            PValue::cons(PValue::int(1), PValue::cons(PValue::int(1), q()))
        );
        assert_eq!(truncate(&PValue::nil(), 0), q());
        assert_eq!(truncate(&PValue::int(5), 0), PValue::int(5));
        assert_eq!(truncate(&PValue::bottom(), 0), PValue::bottom());
    }

    #[test]
    fn rendering() {
        assert_eq!(PValue::bottom().to_string(), "_|_");
        assert_eq!(q().to_string(), "?");
        assert_eq!(
            PValue::cons(PValue::int(1), PValue::bottom()).to_string(),
            "1 : _|_"
        );
        assert_eq!(
            PValue::list([PValue::int(1), PValue::int(2)]).to_string(),
            "[1, 2]"
        );
        assert_eq!(
            PValue::cons(PValue::bottom(), PValue::bottom()).to_string(),
            "_|_ : _|_"
        );
        assert_eq!(
            PValue::just(PValue::cons(PValue::int(-1), q())).to_string(),
            "Just (-1 : ?)"
        );
        assert_eq!(PValue::just(PValue::int(-1)).to_string(), "Just (-1)");
        assert_eq!(
            PValue::cons(
                PValue::cons(PValue::int(0), PValue::bottom()),
                PValue::nil()
            )
            .to_string(),
            "[0 : _|_]"
        );
        assert_eq!(
            PValue::cons(
                PValue::cons(PValue::int(0), PValue::bottom()),
                PValue::bottom()
            )
            .to_string(),
            "(0 : _|_) : _|_"
        );
        assert_eq!(
            PValue::pair(PValue::bool(true), PValue::Char('a')).to_string(),
            "(True, 'a')"
        );
    }

    #[test]
    fn rank_and_size() {
        let v = PValue::cons(PValue::int(0), PValue::bottom());
        assert_eq!((v.rank(), v.size()), (2, 2));
        assert_eq!(PValue::cons(PValue::bottom(), PValue::bottom()).rank(), 1);
        assert_eq!(PValue::bottom().rank(), 0);
    }
}
