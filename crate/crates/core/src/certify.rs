//! Certification of hints by bounded-exhaustive comparison of both sides.

use std::collections::BTreeMap;
use std::fmt;
use std::time::{Duration, Instant};

use serde::Serialize;
use serde_json::{json, Value as Json};
use thiserror::Error;

use crate::domain::{compare_pv, DomainError, PValue, Relation};
use crate::enumeration::{enum_valuations, EnumConfig, EnumError};
use crate::evaluator::{prelude, Compiled, Env, EvalError, DEFAULT_FUEL, DEFAULT_OBS_DEPTH};
use crate::syntax::{EqRequirement, Expr, Hint, Note};
use crate::typing::{infer_sides, Type, TypeError, Typing};

/// Search bounds for one certification run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckConfig {
    pub enumeration: EnumConfig,
    pub fuel: u64,
    pub obs_depth: usize,
}

impl Default for CheckConfig {
    fn default() -> CheckConfig {
        CheckConfig {
            enumeration: EnumConfig::default(),
            fuel: DEFAULT_FUEL,
            obs_depth: DEFAULT_OBS_DEPTH,
        }
    }
}

impl fmt::Display for CheckConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ints: Vec<String> = self
            .enumeration
            .ints
            .iter()
            .map(|n| n.to_string())
            .collect();
        let chars: String = self.enumeration.chars.iter().collect();
        write!(
            f,
            "depth {}, fuel {}, observation depth {}, ints {{{}}}, chars {{{}}}",
            self.enumeration.depth,
            self.fuel,
            self.obs_depth,
            ints.join(", "),
            chars
        )
    }
}

/// One valuation together with what both sides evaluated to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub env: Env,
    pub lhs: PValue,
    pub rhs: PValue,
    pub relation: Relation,
    /// Position of the valuation in enumeration order.
    pub index: usize,
}

impl Witness {
    /// `x = [], y = _|_`
    pub fn env_text(&self) -> String {
        if self.env.is_empty() {
            return "(no variables)".into();
        }
        self.env
            .iter()
            .map(|(k, v)| format!("{k} = {v}"))
            .collect::<Vec<_>>()
            .join(", ")
    }

    fn to_json(&self) -> Json {
        let env: serde_json::Map<String, Json> = self
            .env
            .iter()
            .map(|(k, v)| (k.clone(), Json::String(v.to_string())))
            .collect();
        json!({
            "env": env,
            "lhs": self.lhs.to_string(),
            "rhs": self.rhs.to_string(),
            "relation": self.relation,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    /// Every comparison was definitely Equal.
    Equivalent,
    /// lhs ⊑ rhs everywhere, strictly somewhere.
    IncreasesLaziness(Witness),
    /// rhs ⊑ lhs everywhere, strictly somewhere.
    LessDefined(Witness),
    Incomparable(Witness),
    /// Strictly less at one valuation and strictly greater at another.
    Mixed {
        less: Witness,
        greater: Witness,
    },
    /// No definite difference, but some comparisons were undetermined.
    Inconclusive {
        indefinite: usize,
        first: Witness,
    },
    /// The hint could not be checked at all.
    Rejected(String),
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Equivalent => "Equivalent",
            Verdict::IncreasesLaziness(_) => "IncreasesLaziness",
            Verdict::LessDefined(_) => "LessDefined",
            Verdict::Incomparable(_) => "Incomparable",
            Verdict::Mixed { .. } => "Mixed",
            Verdict::Inconclusive { .. } => "Inconclusive",
            Verdict::Rejected(_) => "Rejected",
        }
    }

    /// The minimal failing valuation, if the verdict carries one.
    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Verdict::IncreasesLaziness(w) | Verdict::LessDefined(w) | Verdict::Incomparable(w) => {
                Some(w)
            }
            Verdict::Mixed { less, greater } => Some(if less.index < greater.index {
                less
            } else {
                greater
            }),
            _ => None,
        }
    }

    /// Whether `lhs ⊑ rhs` held on every valuation; `None` when undetermined
    /// or not checked.
    pub fn refines(&self) -> Option<bool> {
        match self {
            Verdict::Equivalent | Verdict::IncreasesLaziness(_) => Some(true),
            Verdict::Inconclusive { .. } | Verdict::Rejected(_) => None,
            _ => Some(false),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Consistency {
    Consistent,
    MissingNote,
    UnnecessaryNote,
    InvalidHint,
}

impl Consistency {
    pub fn of(verdict: &Verdict, note: Option<Note>) -> Consistency {
        match (verdict, note) {
            (Verdict::Equivalent, None) => Consistency::Consistent,
            (Verdict::Equivalent, Some(Note::IncreasesLaziness)) => Consistency::UnnecessaryNote,
            (Verdict::IncreasesLaziness(_), Some(Note::IncreasesLaziness)) => {
                Consistency::Consistent
            }
            (Verdict::IncreasesLaziness(_), None) => Consistency::MissingNote,
            (Verdict::Inconclusive { .. }, _) => Consistency::Consistent,
            _ => Consistency::InvalidHint,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Consistency::Consistent => "consistent",
            Consistency::MissingNote => "missing_note",
            Consistency::UnnecessaryNote => "unnecessary_note",
            Consistency::InvalidHint => "invalid_hint",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error("ill-typed: {0}")]
    Type(#[from] TypeError),
    #[error("{0}")]
    Enum(#[from] EnumError),
    #[error("{0}")]
    Eval(#[from] EvalError),
    #[error("internal: {0}")]
    Domain(#[from] DomainError),
}

#[derive(Debug, Clone)]
pub struct CheckReport {
    pub hint: Hint,
    pub verdict: Verdict,
    /// Valuations evaluated. A definite Incomparable settles the verdict, so
    /// the search stops there.
    pub tested: usize,
    /// Comparisons whose outcome depended on fuel or observation depth.
    pub indefinite: usize,
    pub consistency: Consistency,
    pub duration: Duration,
    /// Types the metavariables were checked at (after eta-expansion).
    pub types: BTreeMap<String, Type>,
    /// True when the hint is polymorphic and was checked at one instance.
    pub instance_checked: bool,
    pub notes: Vec<String>,
}

impl CheckReport {
    pub fn to_json(&self) -> Json {
        let witness = self.verdict.witness();
        let second = match &self.verdict {
            Verdict::Mixed { less, greater } => Some(if less.index < greater.index {
                greater
            } else {
                less
            }),
            Verdict::Inconclusive { first, .. } => Some(first),
            _ => None,
        };
        let types: serde_json::Map<String, Json> = self
            .types
            .iter()
            .map(|(k, t)| (k.clone(), Json::String(t.to_string())))
            .collect();
        json!({
            "hint": self.hint.source_text,
            "severity": self.hint.severity,
            "verdict": self.verdict.name(),
            "witness": witness.map(Witness::to_json),
            "other": second.map(Witness::to_json),
            "tested": self.tested,
            "indefinite": self.indefinite,
            "consistency": self.consistency,
            "types": types,
            "instance_checked": self.instance_checked,
            "notes": self.notes,
            "reason": match &self.verdict { Verdict::Rejected(r) => Some(r.clone()), _ => None },
            "duration_ms": self.duration.as_secs_f64() * 1000.0,
        })
    }
}

/// Outcome of comparing two expressions over all valuations.
#[derive(Debug, Clone)]
pub struct Comparison {
    pub verdict: Verdict,
    pub tested: usize,
    pub indefinite: usize,
    /// True when every undetermined comparison was Equal with unobserved
    /// parts read as ⊥.
    pub indefinite_all_equal: bool,
    pub typing: Typing,
}

/// Types both sides, enumerates valuations, and aggregates the comparisons
/// of `lhs` against `rhs`.
pub fn compare_sides(lhs: &Expr, rhs: &Expr, cfg: &CheckConfig) -> Result<Comparison, CheckError> {
    let typing = infer_sides(lhs, rhs, prelude().signature())?;
    let left = Compiled::new(&typing.lhs)?;
    let right = Compiled::new(&typing.rhs)?;
    let valuations = enum_valuations(&typing.vars, &cfg.enumeration)?;

    let mut tested = 0;
    let mut indefinite = 0;
    let mut indefinite_all_equal = true;
    let mut first_indefinite = None;
    let mut less: Option<Witness> = None;
    let mut greater: Option<Witness> = None;
    let mut incomparable: Option<Witness> = None;
    for (index, env) in valuations.enumerate() {
        tested += 1;
        let l = left.run(&env, cfg.fuel, cfg.obs_depth)?;
        let r = right.run(&env, cfg.fuel, cfg.obs_depth)?;
        let o = compare_pv(&l, &r)?;
        let witness = || Witness {
            env: env.clone(),
            lhs: l.clone(),
            rhs: r.clone(),
            relation: o.relation,
            index,
        };
        if !o.is_definite() {
            indefinite += 1;
            indefinite_all_equal &= o.relation == Relation::Equal;
            first_indefinite.get_or_insert_with(witness);
            continue;
        }
        match o.relation {
            Relation::Equal => {}
            Relation::StrictlyLess => {
                less.get_or_insert_with(witness);
            }
            Relation::StrictlyGreater => {
                greater.get_or_insert_with(witness);
            }
            Relation::Incomparable => {
                incomparable = Some(witness());
                break;
            }
        }
    }

    let verdict = match (incomparable, less, greater) {
        (Some(w), _, _) => Verdict::Incomparable(w),
        (None, Some(less), Some(greater)) => Verdict::Mixed { less, greater },
        (None, Some(w), None) => Verdict::IncreasesLaziness(w),
        (None, None, Some(w)) => Verdict::LessDefined(w),
        (None, None, None) => match first_indefinite {
            Some(first) => Verdict::Inconclusive { indefinite, first },
            None => Verdict::Equivalent,
        },
    };
    Ok(Comparison {
        verdict,
        tested,
        indefinite,
        indefinite_all_equal,
        typing,
    })
}

/// Checks the property `∀ inputs. lhs ⊑ rhs`; see [`Verdict::refines`].
pub fn check_refinement(lhs: &Expr, rhs: &Expr, cfg: &CheckConfig) -> Result<Verdict, CheckError> {
    Ok(compare_sides(lhs, rhs, cfg)?.verdict)
}

/// Certifies one hint and checks its annotations against the verdict.
pub fn check_hint(h: &Hint, cfg: &CheckConfig) -> CheckReport {
    let start = Instant::now();
    let mut notes = Vec::new();
    let (verdict, tested, indefinite, types, instance_checked) =
        match compare_sides(&h.lhs, &h.rhs, cfg) {
            Err(e) => (
                Verdict::Rejected(e.to_string()),
                0,
                0,
                BTreeMap::new(),
                false,
            ),
            Ok(c) => {
                match &c.verdict {
                    Verdict::Equivalent => notes.push(format!(
                        "bounded-exhaustive: equal on every valuation at {cfg}"
                    )),
                    Verdict::Inconclusive { .. } => {
                        if c.indefinite_all_equal {
                            notes.push(
                            "equal under the divergence-as-bottom assumption: every undetermined \
                             comparison is Equal when unobserved parts are read as _|_"
                                .into(),
                        );
                        }
                        notes.push(format!(
                        "{} of {} comparisons hit the fuel limit ({}) or observation depth ({})",
                        c.indefinite, c.tested, cfg.fuel, cfg.obs_depth
                    ));
                    }
                    _ => {}
                }
                if !c.typing.eta.is_empty() {
                    notes.push(format!("eta-expanded with {}", c.typing.eta.join(", ")));
                }
                if c.typing.defaulted {
                    let at: Vec<String> = c
                        .typing
                        .vars
                        .iter()
                        .map(|(k, t)| format!("{k} :: {t}"))
                        .collect();
                    notes.push(format!("instance-checked at {}", at.join(", ")));
                }
                (
                    c.verdict,
                    c.tested,
                    c.indefinite,
                    c.typing.vars,
                    c.typing.defaulted,
                )
            }
        };
    match h.eq_requirement {
        EqRequirement::None => {}
        EqRequirement::Syntactic => {
            notes.push("checked at Integer; relies only on == and /= existing".into())
        }
        EqRequirement::Sym => {
            notes.push("checked at Integer; assumes strict, symmetric equality".into())
        }
        EqRequirement::Equiv => {
            notes.push("checked at Integer; assumes == is a strict equivalence relation".into())
        }
    }
    let consistency = Consistency::of(&verdict, h.note);
    CheckReport {
        hint: h.clone(),
        verdict,
        tested,
        indefinite,
        consistency,
        duration: start.elapsed(),
        types,
        instance_checked,
        notes,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_expr, parse_hint};

    fn check(line: &str) -> CheckReport {
        check_hint(&parse_hint(line).unwrap(), &CheckConfig::default())
    }

    #[test]
    fn reverse_reverse_increases_laziness() {
        let r = check("warn = reverse (reverse x) ==> x where note = IncreasesLaziness");
        let Verdict::IncreasesLaziness(w) = &r.verdict else {
            panic!("{:?}", r.verdict)
        };
        assert_eq!(w.env["x"].to_string(), "_|_ : _|_");
        assert!(w.lhs.is_definite_bottom());
        assert_eq!(w.rhs.to_string(), "_|_ : _|_");
        assert_eq!(r.consistency, Consistency::Consistent);
        let r = check("warn = reverse (reverse x) ==> x");
        assert_eq!(r.consistency, Consistency::MissingNote);
    }

    #[test]
    fn identity_is_equivalent() {
        let r = check("warn = x ==> x");
        assert_eq!(r.verdict, Verdict::Equivalent);
        assert_eq!(r.indefinite, 0);
        assert_eq!(r.consistency, Consistency::Consistent);
        assert!(r.verdict.witness().is_none());
        assert!(r.notes[0].starts_with("bounded-exhaustive"));
    }

    #[test]
    fn head_drop_needs_a_negative_index() {
        let r = check("warn = head (drop n x) ==> x !! n");
        let Verdict::LessDefined(w) = &r.verdict else {
            panic!("{:?}", r.verdict)
        };
        assert_eq!(w.env["n"].to_string(), "-1");
        assert_eq!(w.env["x"].to_string(), "0 : _|_");
        assert_eq!(w.lhs, PValue::int(0));
        assert!(w.rhs.is_definite_bottom());
        assert_eq!(r.consistency, Consistency::InvalidHint);

        let cfg = CheckConfig {
            enumeration: EnumConfig::default().with_ints([0, 1, 2]),
            ..CheckConfig::default()
        };
        let r = check_hint(
            &parse_hint("warn = head (drop n x) ==> x !! n").unwrap(),
            &cfg,
        );
        assert_eq!(r.verdict, Verdict::Equivalent);
    }

    #[test]
    fn take_length_init_fails_on_the_empty_list() {
        let r = check("warn = take (length x - 1) x ==> init x");
        let w = r.verdict.witness().unwrap();
        assert_eq!(w.env["x"], PValue::nil());
        assert_eq!(w.lhs, PValue::nil());
        assert!(w.rhs.is_definite_bottom());
        assert_eq!(w.relation, Relation::StrictlyGreater);
        assert_eq!(r.consistency, Consistency::InvalidHint);
    }

    #[test]
    fn divergence_is_inconclusive() {
        let r = check("warn = head [] ==> last (repeat 1)");
        let Verdict::Inconclusive { indefinite, first } = &r.verdict else {
            panic!("{:?}", r.verdict)
        };
        assert_eq!(*indefinite, 1);
        assert!(first.lhs.is_definite_bottom());
        assert_eq!(
            first.rhs,
            PValue::indefinite(crate::domain::Cause::FuelExhausted)
        );
        assert!(r.notes.iter().any(|n| n.contains("divergence-as-bottom")));
        assert_eq!(r.consistency, Consistency::Consistent);
    }

    #[test]
    fn rejected_hints() {
        for line in [
            "warn = map (\\a -> a) x ==> x",
            "warn = print x ==> x",
            "warn = not x ==> length x",
            "warn = map f x ==> map f x",
        ] {
            let r = check(line);
            assert!(matches!(r.verdict, Verdict::Rejected(_)), "{line}");
            assert_eq!(r.consistency, Consistency::InvalidHint);
        }
    }

    #[test]
    fn refinement_lemmas() {
        let cfg = CheckConfig::default();
        let e = |s: &str| parse_expr(s).unwrap();
        assert_eq!(
            check_refinement(&e("reverse (reverse x)"), &e("x"), &cfg)
                .unwrap()
                .refines(),
            Some(true)
        );
        assert_eq!(
            check_refinement(&e("x"), &e("x"), &cfg).unwrap(),
            Verdict::Equivalent
        );
        let small = CheckConfig {
            enumeration: EnumConfig::default().with_depth(2),
            ..cfg
        };
        let v =
            check_refinement(&e("reverse (x ++ y)"), &e("reverse y ++ reverse x"), &small).unwrap();
        assert!(matches!(v, Verdict::IncreasesLaziness(_)), "{v:?}");
        let v = check_refinement(&e("x"), &e("reverse (reverse x)"), &small).unwrap();
        assert_eq!(v.refines(), Some(false));
    }

    #[test]
    fn json_fields() {
        let j = check("warn = reverse (reverse x) ==> x where note = IncreasesLaziness").to_json();
        for key in [
            "hint",
            "severity",
            "verdict",
            "witness",
            "tested",
            "indefinite",
            "consistency",
        ] {
            assert!(j.get(key).is_some(), "{key}");
        }
        assert_eq!(j["verdict"], "IncreasesLaziness");
        assert_eq!(j["witness"]["env"]["x"], "_|_ : _|_");
        assert_eq!(j["consistency"], "consistent");
        assert_eq!(j["severity"], "warn");
    }

    #[test]
    fn consistency_table() {
        use Consistency::*;
        let w = Witness {
            env: Env::new(),
            lhs: PValue::bottom(),
            rhs: PValue::bottom(),
            relation: Relation::StrictlyLess,
            index: 0,
        };
        let lazy = Some(Note::IncreasesLaziness);
        assert_eq!(Consistency::of(&Verdict::Equivalent, None), Consistent);
        assert_eq!(Consistency::of(&Verdict::Equivalent, lazy), UnnecessaryNote);
        assert_eq!(
            Consistency::of(&Verdict::IncreasesLaziness(w.clone()), lazy),
            Consistent
        );
        assert_eq!(
            Consistency::of(&Verdict::IncreasesLaziness(w.clone()), None),
            MissingNote
        );
        for v in [
            Verdict::LessDefined(w.clone()),
            Verdict::Incomparable(w.clone()),
            Verdict::Mixed {
                less: w.clone(),
                greater: w.clone(),
            },
        ] {
            assert_eq!(Consistency::of(&v, None), InvalidHint);
            assert_eq!(Consistency::of(&v, lazy), InvalidHint);
        }
    }
}
