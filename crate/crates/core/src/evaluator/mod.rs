//! Fuel-bounded call-by-need evaluation.
//!
//! Fuel counts calls of prelude functions (equation unfoldings and primitive
//! applications), so results do not depend on how the machine is organised.
//! When fuel runs out every further demand yields an indefinite bottom, and
//! the observed value is whatever was computed before that point.

mod prelude;

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::rc::Rc;

use num_bigint::BigInt;
use thiserror::Error;

use crate::domain::{Bottom, Cause, PValue, Tag};
use crate::syntax::Expr;

use prelude::{compile_expr, resolve_global, Core, Pat, Prim, Rule};
pub use prelude::{prelude, Prelude, PreludeDef, PreludeError};

pub const DEFAULT_FUEL: u64 = 10_000;
pub const DEFAULT_OBS_DEPTH: usize = 5;

/// Values of the metavariables of an expression.
pub type Env = BTreeMap<String, PValue>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("cannot evaluate: {0}")]
    Compile(String),
    #[error("metavariable `{0}` has no value")]
    Unbound(String),
    #[error("internal evaluation error: {0}")]
    Internal(String),
}

/// Evaluates `e` with at most `fuel` unfoldings and observes the result to
/// constructor depth `depth`.
pub fn eval(e: &Expr, env: &Env, fuel: u64, depth: usize) -> Result<PValue, EvalError> {
    Compiled::new(e)?.run(env, fuel, depth)
}

/// An expression compiled once for evaluation under many environments.
#[derive(Debug, Clone)]
pub struct Compiled {
    core: Core,
    vars: Vec<String>,
}

impl Compiled {
    pub fn new(e: &Expr) -> Result<Compiled, EvalError> {
        let p = prelude();
        let vars: Vec<String> = e.metavars().into_iter().collect();
        let resolve = |name: &str| -> Result<Core, String> {
            match vars.iter().position(|v| v == name) {
                Some(i) => Ok(Core::Local(i)),
                None => resolve_global(name, p.index()),
            }
        };
        let core = compile_expr(e, &resolve).map_err(EvalError::Compile)?;
        Ok(Compiled { core, vars })
    }

    pub fn run(&self, env: &Env, fuel: u64, depth: usize) -> Result<PValue, EvalError> {
        Ok(self.run_counted(env, fuel, depth)?.0)
    }

    /// Like [`Compiled::run`], also returning the fuel consumed.
    pub fn run_counted(
        &self,
        env: &Env,
        fuel: u64,
        depth: usize,
    ) -> Result<(PValue, u64), EvalError> {
        let frame: Vec<Thunk> = self
            .vars
            .iter()
            .map(|v| {
                env.get(v)
                    .map(inject)
                    .ok_or_else(|| EvalError::Unbound(v.clone()))
            })
            .collect::<Result<_, _>>()?;
        let mut m = Machine {
            prelude: prelude(),
            fuel,
            used: 0,
        };
        let root = m.delay(&self.core, &Rc::new(frame));
        let v = m.observe(&root, depth).map_err(EvalError::Internal)?;
        Ok((v, m.used))
    }
}

type Frame<'a> = Rc<Vec<Thunk<'a>>>;
type Thunk<'a> = Rc<RefCell<Cell<'a>>>;

enum State<'a> {
    Delayed(&'a Core, Frame<'a>),
    Busy,
    Done(Result<Value<'a>, Bottom>),
}

struct Cell<'a>(State<'a>);

/// Long lists are chains of cells; dropping them recursively would overflow
/// the stack, so uniquely owned children are released from a worklist.
impl Drop for Cell<'_> {
    fn drop(&mut self) {
        let mut work = Vec::new();
        release(self, &mut work);
        while let Some(t) = work.pop() {
            if let Ok(cell) = Rc::try_unwrap(t) {
                let mut cell = cell.into_inner();
                release(&mut cell, &mut work);
            }
        }
    }
}

fn release<'a>(cell: &mut Cell<'a>, work: &mut Vec<Thunk<'a>>) {
    let kids = match std::mem::replace(&mut cell.0, State::Busy) {
        State::Delayed(_, frame) => frame,
        State::Done(Ok(Value::Con(_, kids))) | State::Done(Ok(Value::Fun(_, kids))) => kids,
        _ => return,
    };
    if let Ok(kids) = Rc::try_unwrap(kids) {
        work.extend(kids);
    }
}

#[derive(Clone)]
enum Value<'a> {
    Con(Tag, Rc<Vec<Thunk<'a>>>),
    Int(BigInt),
    Char(char),
    /// Partial application of a function or constructor.
    Fun(Head, Rc<Vec<Thunk<'a>>>),
}

#[derive(Clone, Copy)]
enum Head {
    Global(usize),
    Con(Tag),
}

enum Halt {
    Bot(Bottom),
    Bug(String),
}

impl From<Bottom> for Halt {
    fn from(b: Bottom) -> Halt {
        Halt::Bot(b)
    }
}

type R<T> = Result<T, Halt>;

enum Step<'a> {
    Done(Value<'a>),
    Enter(&'a Core, Frame<'a>),
}

fn done(v: Result<Value<'_>, Bottom>) -> Thunk<'_> {
    Rc::new(RefCell::new(Cell(State::Done(v))))
}

fn inject<'a>(v: &PValue) -> Thunk<'a> {
    done(match v {
        PValue::Bottom(b) => Err(b.clone()),
        PValue::Int(n) => Ok(Value::Int(n.clone())),
        PValue::Char(c) => Ok(Value::Char(*c)),
        PValue::Con(t, kids) => Ok(Value::Con(*t, Rc::new(kids.iter().map(inject).collect()))),
    })
}

fn bug<T>(msg: impl Into<String>) -> R<T> {
    Err(Halt::Bug(msg.into()))
}

struct Machine<'a> {
    prelude: &'a Prelude,
    fuel: u64,
    used: u64,
}

impl<'a> Machine<'a> {
    fn spend(&mut self) -> R<()> {
        if self.used >= self.fuel {
            return Err(Halt::Bot(Bottom::Indefinite(Cause::FuelExhausted)));
        }
        self.used += 1;
        Ok(())
    }

    fn delay(&self, core: &'a Core, frame: &Frame<'a>) -> Thunk<'a> {
        match core {
            Core::Local(i) => frame[*i].clone(),
            Core::Int(n) => done(Ok(Value::Int(n.clone()))),
            Core::Char(c) => done(Ok(Value::Char(*c))),
            _ => Rc::new(RefCell::new(Cell(State::Delayed(core, frame.clone())))),
        }
    }

    fn force(&mut self, t: &Thunk<'a>) -> R<Value<'a>> {
        let state = std::mem::replace(&mut t.borrow_mut().0, State::Busy);
        match state {
            State::Done(r) => {
                t.borrow_mut().0 = State::Done(r.clone());
                Ok(r?)
            }
            State::Busy => {
                let b = Bottom::Definite("<<loop>>".into());
                t.borrow_mut().0 = State::Done(Err(b.clone()));
                Err(Halt::Bot(b))
            }
            State::Delayed(core, frame) => {
                let r = stacker::maybe_grow(64 * 1024, 4 * 1024 * 1024, || self.eval(core, frame));
                match r {
                    Ok(v) => {
                        t.borrow_mut().0 = State::Done(Ok(v.clone()));
                        Ok(v)
                    }
                    Err(Halt::Bot(b)) => {
                        t.borrow_mut().0 = State::Done(Err(b.clone()));
                        Err(Halt::Bot(b))
                    }
                    Err(e) => Err(e),
                }
            }
        }
    }

    /// Weak head normal form, looping through tail calls.
    fn eval(&mut self, mut core: &'a Core, mut frame: Frame<'a>) -> R<Value<'a>> {
        loop {
            let step = match core {
                Core::Local(i) => return self.force(&frame[*i].clone()),
                Core::Int(n) => return Ok(Value::Int(n.clone())),
                Core::Char(c) => return Ok(Value::Char(*c)),
                Core::Con(tag) => self.call(Head::Con(*tag), Vec::new())?,
                Core::Global(g) => self.call(Head::Global(*g), Vec::new())?,
                Core::App(f, args) => {
                    let fv = self.eval(f, frame.clone())?;
                    let thunks = args.iter().map(|a| self.delay(a, &frame)).collect();
                    self.apply(fv, thunks)?
                }
            };
            match step {
                Step::Done(v) => return Ok(v),
                Step::Enter(c, f) => {
                    core = c;
                    frame = f;
                }
            }
        }
    }

    fn finish(&mut self, step: Step<'a>) -> R<Value<'a>> {
        match step {
            Step::Done(v) => Ok(v),
            Step::Enter(c, f) => self.eval(c, f),
        }
    }

    fn arity(&self, head: Head) -> usize {
        match head {
            Head::Global(g) => self.prelude.def(g).arity,
            Head::Con(t) => t.arity(),
        }
    }

    fn apply(&mut self, mut f: Value<'a>, mut args: Vec<Thunk<'a>>) -> R<Step<'a>> {
        loop {
            let Value::Fun(head, held) = f else {
                return bug("application of a non-function");
            };
            let mut all: Vec<Thunk<'a>> = held.iter().cloned().collect();
            all.append(&mut args);
            let rest = self.split_saturated(head, &mut all);
            let Some(rest) = rest else {
                return Ok(Step::Done(Value::Fun(head, Rc::new(all))));
            };
            let step = self.call(head, all)?;
            if rest.is_empty() {
                return Ok(step);
            }
            f = self.finish(step)?;
            args = rest;
        }
    }

    /// Splits off arguments beyond the head's arity; `None` if unsaturated.
    fn split_saturated(&self, head: Head, all: &mut Vec<Thunk<'a>>) -> Option<Vec<Thunk<'a>>> {
        let ar = self.arity(head);
        (all.len() >= ar).then(|| all.split_off(ar))
    }

    /// Calls a head with exactly its arity of arguments (or fewer, yielding a
    /// partial application).
    fn call(&mut self, head: Head, args: Vec<Thunk<'a>>) -> R<Step<'a>> {
        if args.len() < self.arity(head) {
            return Ok(Step::Done(Value::Fun(head, Rc::new(args))));
        }
        match head {
            Head::Con(tag) => Ok(Step::Done(Value::Con(tag, Rc::new(args)))),
            Head::Global(g) => {
                self.spend()?;
                let def = self.prelude.def(g);
                match &def.rule {
                    Rule::Primitive(p) => self.primitive(*p, &args).map(Step::Done),
                    Rule::Equations(eqs) => {
                        for eq in eqs {
                            let mut slots: Vec<Option<Thunk<'a>>> = vec![None; eq.slots];
                            if !self.match_all(&eq.pats, &args, &mut slots)? {
                                continue;
                            }
                            let frame: Frame<'a> = Rc::new(
                                slots
                                    .into_iter()
                                    .map(|s| s.expect("every pattern variable is bound"))
                                    .collect(),
                            );
                            if let Some(guard) = &eq.guard {
                                match self.eval(guard, frame.clone())? {
                                    Value::Con(Tag::True, _) => {}
                                    Value::Con(Tag::False, _) => continue,
                                    _ => return bug("guard is not a Bool"),
                                }
                            }
                            return Ok(Step::Enter(&eq.body, frame));
                        }
                        Err(Halt::Bot(Bottom::Definite(format!(
                            "non-exhaustive patterns in {}",
                            def.name
                        ))))
                    }
                }
            }
        }
    }

    fn match_all(
        &mut self,
        pats: &[Pat],
        args: &[Thunk<'a>],
        slots: &mut [Option<Thunk<'a>>],
    ) -> R<bool> {
        for (p, a) in pats.iter().zip(args) {
            if !self.match_pat(p, a, slots)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn match_pat(&mut self, p: &Pat, t: &Thunk<'a>, slots: &mut [Option<Thunk<'a>>]) -> R<bool> {
        match p {
            Pat::Var(i) => {
                slots[*i] = Some(t.clone());
                Ok(true)
            }
            Pat::Wild => Ok(true),
            Pat::Int(n) => match self.force(t)? {
                Value::Int(m) => Ok(&m == n),
                _ => bug("integer pattern against non-integer"),
            },
            Pat::Char(c) => match self.force(t)? {
                Value::Char(d) => Ok(d == *c),
                _ => bug("character pattern against non-character"),
            },
            Pat::Con(tag, ps) => match self.force(t)? {
                Value::Con(t2, kids) => {
                    if t2 != *tag {
                        return Ok(false);
                    }
                    self.match_all(ps, &kids, slots)
                }
                _ => bug("constructor pattern against non-constructor"),
            },
        }
    }

    fn int(&mut self, t: &Thunk<'a>) -> R<BigInt> {
        match self.force(t)? {
            Value::Int(n) => Ok(n),
            _ => bug("arithmetic on a non-integer"),
        }
    }

    fn primitive(&mut self, p: Prim, args: &[Thunk<'a>]) -> R<Value<'a>> {
        match p {
            Prim::Add | Prim::Sub | Prim::Mul => {
                let a = self.int(&args[0])?;
                let b = self.int(&args[1])?;
                Ok(Value::Int(match p {
                    Prim::Add => a + b,
                    Prim::Sub => a - b,
                    _ => a * b,
                }))
            }
            Prim::Eq => {
                let eq = self.structural(&args[0], &args[1], true)? == std::cmp::Ordering::Equal;
                Ok(Value::Con(
                    if eq { Tag::True } else { Tag::False },
                    Rc::new(Vec::new()),
                ))
            }
            Prim::Compare => {
                let tag = match self.structural(&args[0], &args[1], false)? {
                    std::cmp::Ordering::Less => Tag::LT,
                    std::cmp::Ordering::Equal => Tag::EQ,
                    std::cmp::Ordering::Greater => Tag::GT,
                };
                Ok(Value::Con(tag, Rc::new(Vec::new())))
            }
            Prim::Seq => {
                self.force(&args[0])?;
                self.force(&args[1])
            }
            Prim::Error => Err(Halt::Bot(Bottom::Definite(self.message(&args[0])))),
        }
    }

    /// Derived `==` (when `eq_only`, any difference is reported as Less) or
    /// derived `compare`. Forces left then right, children left to right,
    /// stopping at the first difference.
    fn structural(&mut self, a: &Thunk<'a>, b: &Thunk<'a>, eq_only: bool) -> R<std::cmp::Ordering> {
        use std::cmp::Ordering;
        let (mut a, mut b) = (a.clone(), b.clone());
        loop {
            let va = self.force(&a)?;
            let vb = self.force(&b)?;
            let (ka, kb) = match (va, vb) {
                (Value::Int(x), Value::Int(y)) => return Ok(x.cmp(&y)),
                (Value::Char(x), Value::Char(y)) => return Ok(x.cmp(&y)),
                (Value::Con(t1, k1), Value::Con(t2, k2)) => {
                    if t1 != t2 {
                        return Ok(if eq_only {
                            Ordering::Less
                        } else {
                            t1.ordinal().cmp(&t2.ordinal())
                        });
                    }
                    (k1, k2)
                }
                _ => return bug("comparison of incompatible values"),
            };
            let Some((last_a, init_a)) = ka.split_last() else {
                return Ok(Ordering::Equal);
            };
            for (x, y) in init_a.iter().zip(kb.iter()) {
                self.spend()?;
                let o = stacker::maybe_grow(64 * 1024, 4 * 1024 * 1024, || {
                    self.structural(x, y, eq_only)
                })?;
                if o != Ordering::Equal {
                    return Ok(o);
                }
            }
            self.spend()?;
            a = last_a.clone();
            b = kb[kb.len() - 1].clone();
        }
    }

    /// Best-effort rendering of an `error` message; stops at anything
    /// undefined.
    fn message(&mut self, t: &Thunk<'a>) -> String {
        let mut out = String::new();
        let mut cur = t.clone();
        while out.len() < 120 {
            match self.force(&cur) {
                Ok(Value::Con(Tag::Cons, kids)) => {
                    match self.force(&kids[0]) {
                        Ok(Value::Char(c)) => out.push(c),
                        _ => break,
                    }
                    cur = kids[1].clone();
                }
                _ => break,
            }
        }
        if out.is_empty() {
            "error".into()
        } else {
            out
        }
    }

    fn observe(&mut self, t: &Thunk<'a>, depth: usize) -> Result<PValue, String> {
        match self.force(t) {
            Err(Halt::Bot(b)) => Ok(PValue::Bottom(b)),
            Err(Halt::Bug(m)) => Err(m),
            Ok(Value::Int(n)) => Ok(PValue::Int(n)),
            Ok(Value::Char(c)) => Ok(PValue::Char(c)),
            Ok(Value::Con(tag, kids)) => {
                if depth == 0 {
                    return Ok(PValue::indefinite(Cause::DepthTruncated));
                }
                let kids = kids
                    .iter()
                    .map(|k| self.observe(k, depth - 1))
                    .collect::<Result<_, _>>()?;
                Ok(PValue::Con(tag, kids))
            }
            Ok(Value::Fun(..)) => Err("function-valued result cannot be observed".into()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{compare_pv, Relation};
    use crate::syntax::parse_expr;

    fn ev(src: &str, env: &[(&str, PValue)]) -> PValue {
        let env: Env = env
            .iter()
            .map(|(k, v)| (k.to_string(), v.clone()))
            .collect();
        eval(
            &parse_expr(src).unwrap(),
            &env,
            DEFAULT_FUEL,
            DEFAULT_OBS_DEPTH,
        )
        .unwrap()
    }

    fn ints(xs: &[i64]) -> PValue {
        PValue::list(xs.iter().map(|&n| PValue::int(n)))
    }

    #[test]
    fn reverse_examples() {
        assert_eq!(ev("reverse [1, 2]", &[]), ints(&[2, 1]));
        let partial = PValue::cons(PValue::int(1), PValue::bottom());
        assert!(ev("reverse x", &[("x", partial)]).is_definite_bottom());
    }

    #[test]
    fn head_of_empty_and_last_of_repeat() {
        let h = ev("head []", &[]);
        assert!(h.is_definite_bottom());
        assert_eq!(h.to_string(), "_|_");
        let l = eval(&parse_expr("last (repeat 1)").unwrap(), &Env::new(), 500, 5).unwrap();
        assert_eq!(l, PValue::indefinite(Cause::FuelExhausted));
    }

    #[test]
    fn report_equations() {
        assert_eq!(ev("take (-1) []", &[]), PValue::nil());
        assert!(ev("init []", &[]).is_definite_bottom());
        let x = PValue::cons(PValue::int(0), PValue::bottom());
        assert!(ev("x !! (-1)", &[("x", x.clone())]).is_definite_bottom());
        assert_eq!(ev("head (drop (-1) x)", &[("x", x)]), PValue::int(0));
        assert_eq!(ev("False && undefined", &[]), PValue::bool(false));
        assert!(ev("undefined && False", &[]).is_definite_bottom());
        assert_eq!(ev("sort [2, 0, 1, 0]", &[]), ints(&[0, 0, 1, 2]));
        assert_eq!(ev("length [3, 4, 5] - 1", &[]), PValue::int(2));
        assert_eq!(ev("take 2 (repeat 7)", &[]), ints(&[7, 7]));
        assert_eq!(ev("fst (splitAt 1 [1, 2])", &[]), ints(&[1]));
        assert_eq!(ev("[1, 2] `isPrefixOf` [1, 2, 3]", &[]), PValue::bool(true));
        assert_eq!(ev("\"ab\" `isSuffixOf` \"cab\"", &[]), PValue::bool(true));
        assert_eq!(ev("compare [1] [1, 0]", &[]), PValue::con(Tag::LT));
        assert_eq!(ev("max 3 (-2)", &[]), PValue::int(3));
        assert_eq!(ev("fromMaybe 0 (Just 4)", &[]), PValue::int(4));
        assert_eq!(
            ev("concatMap (replicate 2) [1, 2]", &[]),
            ints(&[1, 1, 2, 2])
        );
        assert_eq!(ev("foldl (flip (:)) [] [1, 2, 3]", &[]), ints(&[3, 2, 1]));
        assert_eq!(
            ev("filter (elem 1) [[0], [1, 2]]", &[]),
            PValue::list([ints(&[1, 2])])
        );
        assert_eq!(
            ev("lookup 2 (zip [1, 2] \"ab\")", &[]),
            PValue::just(PValue::Char('b'))
        );
        assert_eq!(ev("abs (negate 5) * 2", &[]), PValue::int(10));
    }

    #[test]
    fn seq_strictness() {
        assert!(ev("seq undefined 1", &[]).is_definite_bottom());
        assert_eq!(ev("seq 0 1", &[]), PValue::int(1));
        assert_eq!(ev("seq (repeat 1) 5", &[]), PValue::int(5));
        assert_eq!(ev("length x `seq` x", &[("x", ints(&[1]))]), ints(&[1]));
    }

    #[test]
    fn infinite_values_are_truncated() {
        let v = eval(
            &parse_expr("repeat 1").unwrap(),
            &Env::new(),
            DEFAULT_FUEL,
            2,
        )
        .unwrap();
        assert_eq!(
            v,
            PValue::cons(
                PValue::int(1),
                PValue::cons(PValue::int(1), PValue::indefinite(Cause::DepthTruncated))
            )
        );
        assert_eq!(v.to_string(), "1 : 1 : ?");
    }

    #[test]
    fn error_messages_are_kept() {
        let PValue::Bottom(Bottom::Definite(why)) = ev("init []", &[]) else {
            panic!()
        };
        assert_eq!(why, "Prelude.init: empty list");
        let PValue::Bottom(Bottom::Definite(why)) = ev("not x", &[("x", PValue::bottom())]) else {
            panic!()
        };
        assert_eq!(why, "undefined");
    }

    #[test]
    fn fuel_is_counted_in_unfoldings() {
        let c = Compiled::new(&parse_expr("length [1, 2, 3]").unwrap()).unwrap();
        // length is unfolded four times and (+) applied three times.
        assert_eq!(
            c.run_counted(&Env::new(), 100, 5).unwrap(),
            (PValue::int(3), 7)
        );
        assert_eq!(
            c.run(&Env::new(), 6, 5).unwrap(),
            PValue::indefinite(Cause::FuelExhausted)
        );
    }

    #[test]
    fn partial_results_survive_fuel_exhaustion() {
        let v = eval(&parse_expr("map id [1, 2, 3]").unwrap(), &Env::new(), 3, 5).unwrap();
        let full = ev("map id [1, 2, 3]", &[]);
        assert_ne!(v, full);
        let r = compare_pv(&v, &full).unwrap();
        assert_eq!(r.relation, Relation::StrictlyLess);
    }

    #[test]
    fn compile_errors() {
        let e = |s: &str| eval(&parse_expr(s).unwrap(), &Env::new(), 10, 5).unwrap_err();
        assert!(matches!(e("print 1"), EvalError::Compile(_)));
        assert!(matches!(e("reverse x"), EvalError::Unbound(v) if v == "x"));
        assert!(matches!(e("map (\\a -> a) []"), EvalError::Compile(_)));
        assert!(matches!(e("map"), EvalError::Internal(_)));
    }

    #[test]
    fn deep_recursion_does_not_overflow() {
        let v = eval(
            &parse_expr("length (replicate 20000 0)").unwrap(),
            &Env::new(),
            1_000_000,
            5,
        )
        .unwrap();
        assert_eq!(v, PValue::int(20000));
    }
}
