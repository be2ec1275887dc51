//! Exhaustive enumeration of finite partial values.
//!
//! Values of a type are produced in ascending (rank, size, canonical order),
//! so the first element satisfying any predicate is a minimal one. The
//! canonical order puts ⊥ first, then constructors in enumeration order
//! (`[]` before `:`, `True` before `False`, `Nothing` before `Just`), then
//! atoms simplest first (`0, -1, 1, -2, 2, …`; characters in pool order),
//! then children left to right.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap, VecDeque};
use std::rc::Rc;

use num_bigint::BigInt;
use num_traits::Signed;
use thiserror::Error;

use crate::domain::{PValue, Tag};
use crate::evaluator::Env;
use crate::typing::Type;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnumConfig {
    /// Maximum rank of generated values.
    pub depth: usize,
    pub ints: Vec<BigInt>,
    pub chars: Vec<char>,
}

impl Default for EnumConfig {
    fn default() -> EnumConfig {
        EnumConfig {
            depth: 3,
            ints: [-1, 0, 1, 2].into_iter().map(BigInt::from).collect(),
            chars: vec!['a', 'b'],
        }
    }
}

impl EnumConfig {
    pub fn with_depth(mut self, depth: usize) -> EnumConfig {
        self.depth = depth;
        self
    }

    pub fn with_ints(mut self, ints: impl IntoIterator<Item = i64>) -> EnumConfig {
        self.ints = ints.into_iter().map(BigInt::from).collect();
        self
    }

    fn validate(&self) -> Result<(), EnumError> {
        if self.ints.is_empty() {
            return Err(EnumError::EmptyPool("integer"));
        }
        if self.chars.is_empty() {
            return Err(EnumError::EmptyPool("character"));
        }
        Ok(())
    }

    /// Integer pool in canonical order, without duplicates.
    fn int_pool(&self) -> Vec<BigInt> {
        let mut v = self.ints.clone();
        v.sort_by(cmp_int);
        v.dedup();
        v
    }

    fn char_pool(&self) -> Vec<char> {
        let mut v: Vec<char> = Vec::new();
        for &c in &self.chars {
            if !v.contains(&c) {
                v.push(c);
            }
        }
        v
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnumError {
    #[error("cannot enumerate values of type `{0}`")]
    Unsupported(Type),
    #[error("the {0} pool is empty")]
    EmptyPool(&'static str),
}

fn cmp_int(a: &BigInt, b: &BigInt) -> Ordering {
    a.abs().cmp(&b.abs()).then(a.cmp(b))
}

fn tag_order(t: Tag) -> u8 {
    match t {
        Tag::Nil | Tag::True | Tag::Nothing | Tag::Pair | Tag::Unit | Tag::LT => 0,
        Tag::Cons | Tag::False | Tag::Just | Tag::EQ => 1,
        Tag::GT => 2,
    }
}

/// Canonical order on values of one type.
pub fn canonical_cmp(a: &PValue, b: &PValue, cfg: &EnumConfig) -> Ordering {
    match (a, b) {
        (PValue::Bottom(_), PValue::Bottom(_)) => Ordering::Equal,
        (PValue::Bottom(_), _) => Ordering::Less,
        (_, PValue::Bottom(_)) => Ordering::Greater,
        (PValue::Int(x), PValue::Int(y)) => cmp_int(x, y),
        (PValue::Char(x), PValue::Char(y)) => {
            let pos = |c: &char| cfg.chars.iter().position(|d| d == c);
            pos(x).cmp(&pos(y)).then(x.cmp(y))
        }
        (PValue::Con(s, xs), PValue::Con(t, ys)) => {
            tag_order(*s).cmp(&tag_order(*t)).then_with(|| {
                xs.iter()
                    .zip(ys)
                    .map(|(x, y)| canonical_cmp(x, y, cfg))
                    .find(|o| o.is_ne())
                    .unwrap_or(Ordering::Equal)
            })
        }
        _ => Ordering::Equal,
    }
}

/// Enumeration order: rank, then size, then canonical order.
pub fn enum_cmp(a: &PValue, b: &PValue, cfg: &EnumConfig) -> Ordering {
    a.rank()
        .cmp(&b.rank())
        .then(a.size().cmp(&b.size()))
        .then_with(|| canonical_cmp(a, b, cfg))
}

fn check_type(t: &Type) -> Result<(), EnumError> {
    match t {
        Type::Var(_) | Type::Fun(..) => Err(EnumError::Unsupported(t.clone())),
        Type::List(a) | Type::Maybe(a) => check_type(a),
        Type::Pair(a, b) => {
            check_type(a)?;
            check_type(b)
        }
        _ => Ok(()),
    }
}

/// Memoized generator of the values of each exact rank.
struct Gen {
    cfg: EnumConfig,
    ints: Vec<BigInt>,
    chars: Vec<char>,
    cache: HashMap<(Type, usize), Rc<Vec<PValue>>>,
}

impl Gen {
    fn new(cfg: &EnumConfig) -> Gen {
        Gen {
            cfg: cfg.clone(),
            ints: cfg.int_pool(),
            chars: cfg.char_pool(),
            cache: HashMap::new(),
        }
    }

    /// Values of rank at most `r`.
    fn up_to(&mut self, t: &Type, r: usize) -> Vec<PValue> {
        (0..=r)
            .flat_map(|k| self.exact(t, k).as_ref().clone())
            .collect()
    }

    /// Values of rank exactly `r`, sorted by size then canonical order.
    fn exact(&mut self, t: &Type, r: usize) -> Rc<Vec<PValue>> {
        if let Some(v) = self.cache.get(&(t.clone(), r)) {
            return v.clone();
        }
        let mut out = if r == 0 {
            vec![PValue::bottom()]
        } else {
            match t {
                Type::Integer if r == 1 => self.ints.iter().cloned().map(PValue::Int).collect(),
                Type::Char if r == 1 => self.chars.iter().copied().map(PValue::Char).collect(),
                Type::Bool if r == 1 => vec![PValue::bool(true), PValue::bool(false)],
                Type::Unit if r == 1 => vec![PValue::con(Tag::Unit)],
                Type::Ordering if r == 1 => [Tag::LT, Tag::EQ, Tag::GT].map(PValue::con).to_vec(),
                Type::List(e) => {
                    let mut v = if r == 1 { vec![PValue::nil()] } else { vec![] };
                    v.extend(self.children(Tag::Cons, &[(**e).clone(), t.clone()], r - 1));
                    v
                }
                Type::Maybe(e) => {
                    let mut v = if r == 1 {
                        vec![PValue::con(Tag::Nothing)]
                    } else {
                        vec![]
                    };
                    v.extend(self.children(Tag::Just, &[(**e).clone()], r - 1));
                    v
                }
                Type::Pair(a, b) => {
                    self.children(Tag::Pair, &[(**a).clone(), (**b).clone()], r - 1)
                }
                _ => vec![],
            }
        };
        let cfg = &self.cfg;
        out.sort_by(|a, b| {
            a.size()
                .cmp(&b.size())
                .then_with(|| canonical_cmp(a, b, cfg))
        });
        let out = Rc::new(out);
        self.cache.insert((t.clone(), r), out.clone());
        out
    }

    /// `tag` applied to children whose maximum rank is exactly `r`.
    fn children(&mut self, tag: Tag, types: &[Type], r: usize) -> Vec<PValue> {
        let pools: Vec<Vec<PValue>> = types.iter().map(|t| self.up_to(t, r)).collect();
        let mut out = Vec::new();
        let mut current = Vec::new();
        product(&pools, &mut current, &mut |kids| {
            if kids.iter().map(PValue::rank).max() == Some(r) {
                out.push(PValue::Con(tag, kids.to_vec()));
            }
        });
        out
    }
}

fn product(pools: &[Vec<PValue>], current: &mut Vec<PValue>, f: &mut dyn FnMut(&[PValue])) {
    if current.len() == pools.len() {
        f(current);
        return;
    }
    for v in &pools[current.len()] {
        current.push(v.clone());
        product(pools, current, f);
        current.pop();
    }
}

/// Stream of the values of one type, one rank bucket at a time.
pub struct Values {
    gen: Gen,
    ty: Type,
    next_rank: usize,
    bucket: VecDeque<PValue>,
}

impl Iterator for Values {
    type Item = PValue;

    fn next(&mut self) -> Option<PValue> {
        while self.bucket.is_empty() {
            if self.next_rank > self.gen.cfg.depth {
                return None;
            }
            let b = self.gen.exact(&self.ty, self.next_rank);
            self.bucket.extend(b.iter().cloned());
            self.next_rank += 1;
        }
        self.bucket.pop_front()
    }
}

/// Every partial value of `t` with rank at most `cfg.depth`, each once, in
/// enumeration order. No indefinite leaves are produced.
pub fn enum_values(t: &Type, cfg: &EnumConfig) -> Result<Values, EnumError> {
    cfg.validate()?;
    check_type(t)?;
    Ok(Values {
        gen: Gen::new(cfg),
        ty: t.clone(),
        next_rank: 0,
        bucket: VecDeque::new(),
    })
}

/// Stream of environments ordered by the sum of the ranks, then
/// lexicographically by each variable's position in its own sequence.
pub struct Valuations {
    names: Vec<String>,
    /// Per variable: all values in enumeration order, and the index where
    /// each rank starts (with a final sentinel).
    seqs: Vec<(Vec<PValue>, Vec<usize>)>,
    depth: usize,
    next_sum: usize,
    bucket: VecDeque<Vec<usize>>,
}

impl Valuations {
    /// Total number of valuations the stream will yield.
    pub fn total(&self) -> usize {
        self.seqs.iter().map(|(v, _)| v.len()).product()
    }

    fn fill(&mut self, sum: usize) {
        let n = self.seqs.len();
        let mut picked = Vec::with_capacity(n);
        self.rec(0, sum, &mut picked, n);
    }

    fn rec(&mut self, k: usize, remaining: usize, picked: &mut Vec<usize>, n: usize) {
        if k == n {
            if remaining == 0 {
                self.bucket.push_back(picked.clone());
            }
            return;
        }
        let rest_max = (n - k - 1) * self.depth;
        let lo_rank = remaining.saturating_sub(rest_max);
        let hi_rank = remaining.min(self.depth);
        if lo_rank > hi_rank {
            return;
        }
        let starts = &self.seqs[k].1;
        let (lo, hi) = (starts[lo_rank], starts[hi_rank + 1]);
        for i in lo..hi {
            let r = self.seqs[k].0[i].rank();
            picked.push(i);
            self.rec(k + 1, remaining - r, picked, n);
            picked.pop();
        }
    }
}

impl Iterator for Valuations {
    type Item = Env;

    fn next(&mut self) -> Option<Env> {
        let max_sum = self.seqs.len() * self.depth;
        while self.bucket.is_empty() {
            if self.next_sum > max_sum {
                return None;
            }
            let s = self.next_sum;
            self.next_sum += 1;
            self.fill(s);
        }
        let idx = self.bucket.pop_front()?;
        Some(
            self.names
                .iter()
                .zip(idx)
                .enumerate()
                .map(|(k, (name, i))| (name.clone(), self.seqs[k].0[i].clone()))
                .collect(),
        )
    }
}

/// Cartesian product of the per-variable value sequences.
pub fn enum_valuations(
    vars: &BTreeMap<String, Type>,
    cfg: &EnumConfig,
) -> Result<Valuations, EnumError> {
    cfg.validate()?;
    let mut names = Vec::new();
    let mut seqs = Vec::new();
    for (name, t) in vars {
        let values: Vec<PValue> = enum_values(t, cfg)?.collect();
        let starts: Vec<usize> = (0..=cfg.depth + 1)
            .map(|r| values.iter().take_while(|v| v.rank() < r).count())
            .collect();
        names.push(name.clone());
        seqs.push((values, starts));
    }
    Ok(Valuations {
        names,
        seqs,
        depth: cfg.depth,
        next_sum: 0,
        bucket: VecDeque::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn values(t: &Type, cfg: &EnumConfig) -> Vec<PValue> {
        enum_values(t, cfg).unwrap().collect()
    }

    #[test]
    fn bool_at_depth_one() {
        let v = values(&Type::Bool, &EnumConfig::default().with_depth(1));
        assert_eq!(
            v,
            vec![PValue::bottom(), PValue::bool(true), PValue::bool(false)]
        );
    }

    #[test]
    fn depth_zero_is_bottom_only() {
        let v = values(
            &Type::list(Type::Integer),
            &EnumConfig::default().with_depth(0),
        );
        assert_eq!(v, vec![PValue::bottom()]);
    }

    #[test]
    fn list_of_integers_at_depth_two() {
        let cfg = EnumConfig::default().with_depth(2).with_ints([0, 1]);
        let v = values(&Type::list(Type::Integer), &cfg);
        assert_eq!(v.len(), 11);
        let shown: Vec<String> = v.iter().map(|x| x.to_string()).collect();
        assert_eq!(
            shown,
            [
                "_|_",
                "[]",
                "_|_ : _|_",
                "[_|_]",
                "_|_ : _|_ : _|_",
                "0 : _|_",
                "1 : _|_",
                "[0]",
                "0 : _|_ : _|_",
                "[1]",
                "1 : _|_ : _|_",
            ]
        );
    }

    #[test]
    fn integers_simplest_first() {
        let v = values(&Type::Integer, &EnumConfig::default());
        let shown: Vec<String> = v.iter().map(|x| x.to_string()).collect();
        assert_eq!(shown, ["_|_", "0", "-1", "1", "2"]);
    }

    #[test]
    fn unsupported_types() {
        let cfg = EnumConfig::default();
        assert!(matches!(
            enum_values(&Type::Var(0), &cfg),
            Err(EnumError::Unsupported(_))
        ));
        assert!(matches!(
            enum_values(&Type::list(Type::fun(Type::Integer, Type::Integer)), &cfg),
            Err(EnumError::Unsupported(_))
        ));
        let empty = EnumConfig {
            ints: vec![],
            ..EnumConfig::default()
        };
        assert!(matches!(
            enum_values(&Type::Integer, &empty),
            Err(EnumError::EmptyPool(_))
        ));
    }

    #[test]
    fn valuation_examples() {
        let cfg = EnumConfig::default();
        let none: Vec<Env> = enum_valuations(&BTreeMap::new(), &cfg).unwrap().collect();
        assert_eq!(none, vec![Env::new()]);

        let one = BTreeMap::from([("x".to_string(), Type::Bool)]);
        let got: Vec<PValue> = enum_valuations(&one, &cfg.clone().with_depth(1))
            .unwrap()
            .map(|e| e["x"].clone())
            .collect();
        assert_eq!(got, values(&Type::Bool, &cfg.clone().with_depth(1)));

        let two = BTreeMap::from([
            ("n".to_string(), Type::Integer),
            ("x".to_string(), Type::list(Type::Integer)),
        ]);
        let cfg2 = cfg.with_depth(2);
        let vals = enum_valuations(&two, &cfg2).unwrap();
        assert_eq!(vals.total(), 5 * 17);
        let all: Vec<Env> = vals.collect();
        assert_eq!(all.len(), 5 * 17);
        let sums: Vec<usize> = all
            .iter()
            .map(|e| e.values().map(PValue::rank).sum())
            .collect();
        assert!(sums.windows(2).all(|w| w[0] <= w[1]));
    }
}
