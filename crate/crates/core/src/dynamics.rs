//! Small-step, left-to-right, call-by-value evaluators.
//!
//! Both evaluators work by substitution on closed terms. `pred 0` is `0`.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::syntax::{SrcTerm, Subst, Syntax, TgtTerm};

/// Outcome of running a term for at most `fuel` steps.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum EvalResult<T> {
    Value {
        #[serde(skip)]
        value: T,
        steps: u64,
    },
    Timeout {
        fuel: u64,
    },
    Stuck {
        #[serde(skip)]
        term: T,
    },
}

impl<T> EvalResult<T> {
    pub fn value(&self) -> Option<&T> {
        match self {
            EvalResult::Value { value, .. } => Some(value),
            _ => None,
        }
    }

    pub fn steps(&self) -> Option<u64> {
        match self {
            EvalResult::Value { steps, .. } => Some(*steps),
            _ => None,
        }
    }

    pub fn is_timeout(&self) -> bool {
        matches!(self, EvalResult::Timeout { .. })
    }
}

/// An evaluation context one level deep, waiting for the value of its hole.
pub struct Frame<T>(Box<dyn FnOnce(T) -> T>);

impl<T> Frame<T> {
    fn plug(self, t: T) -> T {
        (self.0)(t)
    }
}

/// Where evaluation of a term continues.
pub enum Focus<T> {
    Value(T),
    /// Every operand is a value, so the term itself reduces or is stuck.
    Redex(T),
    /// Evaluation continues inside a subterm.
    Inner(T, Frame<T>),
}

/// Languages with a left-to-right call-by-value reduction relation.
///
/// Evaluation keeps the context as an explicit stack of frames, so deeply
/// nested contexts do not consume native stack.
pub trait Step: Syntax + 'static {
    fn focus(self) -> Focus<Self>;

    /// Contracts a redex, handing it back unchanged when it is stuck.
    fn contract(self) -> Result<Self, Self>;

    /// One reduction step, or `None` for values and stuck terms.
    fn step(&self) -> Option<Self> {
        let mut frames = Vec::new();
        let mut cur = self.clone();
        loop {
            match cur.focus() {
                Focus::Value(_) => return None,
                Focus::Inner(sub, frame) => {
                    frames.push(frame);
                    cur = sub;
                }
                Focus::Redex(r) => return r.contract().ok().map(|t| plug_all(frames, t)),
            }
        }
    }
}

fn plug_all<T>(frames: Vec<Frame<T>>, t: T) -> T {
    frames.into_iter().rev().fold(t, |acc, f| f.plug(acc))
}

/// Runs `m` for at most `fuel` reduction steps.
pub fn eval<T: Step>(m: &T, fuel: u64) -> EvalResult<T> {
    let mut frames: Vec<Frame<T>> = Vec::new();
    let mut cur = m.clone();
    let mut steps = 0;
    loop {
        match cur.focus() {
            Focus::Value(v) => match frames.pop() {
                Some(f) => cur = f.plug(v),
                None => return EvalResult::Value { value: v, steps },
            },
            Focus::Inner(sub, frame) => {
                frames.push(frame);
                cur = sub;
            }
            Focus::Redex(r) => {
                if steps == fuel {
                    return EvalResult::Timeout { fuel };
                }
                match r.contract() {
                    Ok(next) => {
                        cur = next;
                        steps += 1;
                    }
                    Err(term) => {
                        return EvalResult::Stuck {
                            term: plug_all(frames, term),
                        }
                    }
                }
            }
        }
    }
}

pub fn step_src(m: &SrcTerm) -> Option<SrcTerm> {
    m.step()
}

pub fn step_tgt(m: &TgtTerm) -> Option<TgtTerm> {
    m.step()
}

pub fn eval_src(m: &SrcTerm, fuel: u64) -> EvalResult<SrcTerm> {
    eval(m, fuel)
}

pub fn eval_tgt(m: &TgtTerm, fuel: u64) -> EvalResult<TgtTerm> {
    eval(m, fuel)
}

fn predecessor(n: BigUint) -> BigUint {
    if n.is_zero() {
        n
    } else {
        n - BigUint::one()
    }
}

fn inner<T: Step>(sub: T, plug: impl FnOnce(T) -> T + 'static) -> Focus<T> {
    Focus::Inner(sub, Frame(Box::new(plug)))
}

fn unary<T: Step>(a: Box<T>, wrap: fn(Box<T>) -> T) -> Focus<T> {
    if a.is_value() {
        Focus::Redex(wrap(a))
    } else {
        inner(*a, move |a| wrap(Box::new(a)))
    }
}

fn binary<T: Step>(a: Box<T>, b: Box<T>, wrap: fn(Box<T>, Box<T>) -> T) -> Focus<T> {
    if !a.is_value() {
        inner(*a, move |a| wrap(Box::new(a), b))
    } else if !b.is_value() {
        inner(*b, move |b| wrap(a, Box::new(b)))
    } else {
        Focus::Redex(wrap(a, b))
    }
}

impl Step for SrcTerm {
    fn focus(self) -> Focus<Self> {
        use SrcTerm::*;
        if self.is_value() {
            return Focus::Value(self);
        }
        match self {
            Pred(a) => unary(a, Pred),
            Fst(a) => unary(a, Fst),
            Snd(a) => unary(a, Snd),
            Plus(a, b) => binary(a, b, Plus),
            Pair(a, b) => binary(a, b, Pair),
            App(a, b) => binary(a, b, App),
            Ifz(c, z, s) if !c.is_value() => inner(*c, move |c| Ifz(Box::new(c), z, s)),
            Let(a, x, body) if !a.is_value() => inner(*a, move |a| Let(Box::new(a), x, body)),
            t => Focus::Redex(t),
        }
    }

    fn contract(self) -> Result<Self, Self> {
        use SrcTerm::*;
        match self {
            Pred(a) => match *a {
                Num(n) => Ok(Num(predecessor(n))),
                a => Err(Pred(Box::new(a))),
            },
            Plus(a, b) => match (*a, *b) {
                (Num(x), Num(y)) => Ok(Num(x + y)),
                (a, b) => Err(Plus(Box::new(a), Box::new(b))),
            },
            Ifz(c, z, s) => match *c {
                Num(n) if n.is_zero() => Ok(*z),
                Num(_) => Ok(*s),
                c => Err(Ifz(Box::new(c), z, s)),
            },
            Fst(a) => match *a {
                Pair(l, _) => Ok(*l),
                a => Err(Fst(Box::new(a))),
            },
            Snd(a) => match *a {
                Pair(_, r) => Ok(*r),
                a => Err(Snd(Box::new(a))),
            },
            Let(a, x, body) => Ok(body.subst(&Subst::single(x, *a))),
            App(f, a) => match *f {
                Fix {
                    fun_ty,
                    arg_ty,
                    fun,
                    arg,
                    body,
                } => {
                    let s = Subst::new()
                        .with(
                            fun.clone(),
                            Fix {
                                fun_ty,
                                arg_ty,
                                fun,
                                arg: arg.clone(),
                                body: body.clone(),
                            },
                        )
                        .with(arg, *a);
                    Ok(body.subst(&s))
                }
                f => Err(App(Box::new(f), a)),
            },
            t => Err(t),
        }
    }
}

impl Step for TgtTerm {
    fn focus(self) -> Focus<Self> {
        use TgtTerm::*;
        if self.is_value() {
            return Focus::Value(self);
        }
        match self {
            Pred(a) => unary(a, Pred),
            Fst(a) => unary(a, Fst),
            Snd(a) => unary(a, Snd),
            Plus(a, b) => binary(a, b, Plus),
            Pair(a, b) => binary(a, b, Pair),
            Clos(a, b) => binary(a, b, Clos),
            App(a, b) => binary(a, b, App),
            Ifz(c, z, s) if !c.is_value() => inner(*c, move |c| Ifz(Box::new(c), z, s)),
            Let(a, x, body) if !a.is_value() => inner(*a, move |a| Let(Box::new(a), x, body)),
            Open {
                scrut,
                fun,
                env,
                body,
            } if !scrut.is_value() => inner(*scrut, move |scrut| Open {
                scrut: Box::new(scrut),
                fun,
                env,
                body,
            }),
            t => Focus::Redex(t),
        }
    }

    fn contract(self) -> Result<Self, Self> {
        use TgtTerm::*;
        match self {
            Pred(a) => match *a {
                Num(n) => Ok(Num(predecessor(n))),
                a => Err(Pred(Box::new(a))),
            },
            Plus(a, b) => match (*a, *b) {
                (Num(x), Num(y)) => Ok(Num(x + y)),
                (a, b) => Err(Plus(Box::new(a), Box::new(b))),
            },
            Ifz(c, z, s) => match *c {
                Num(n) if n.is_zero() => Ok(*z),
                Num(_) => Ok(*s),
                c => Err(Ifz(Box::new(c), z, s)),
            },
            Fst(a) => match *a {
                Pair(l, _) => Ok(*l),
                a => Err(Fst(Box::new(a))),
            },
            Snd(a) => match *a {
                Pair(_, r) => Ok(*r),
                a => Err(Snd(Box::new(a))),
            },
            Let(a, x, body) => Ok(body.subst(&Subst::single(x, *a))),
            App(f, a) => match *f {
                Abs { param, body, .. } => Ok(body.subst(&Subst::single(param, *a))),
                f => Err(App(Box::new(f), a)),
            },
            Open {
                scrut,
                fun,
                env,
                body,
            } => match *scrut {
                Clos(code, e) => Ok(body.subst(&Subst::new().with(fun, *code).with(env, *e))),
                scrut => Err(Open {
                    scrut: Box::new(scrut),
                    fun,
                    env,
                    body,
                }),
            },
            t => Err(t),
        }
    }
}
