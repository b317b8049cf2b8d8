use std::collections::HashSet;

use num_bigint::BigUint;

use super::{lookup_bound, note_free, Scope, Syntax};
use crate::name::Name;
use crate::syntax::TgtType;

/// Terms of the target language: the source constructs minus `fix`, plus
/// plain abstraction and closure formation/elimination.
#[derive(Clone, Debug, PartialEq)]
pub enum TgtTerm {
    Num(BigUint),
    Var(Name),
    Pred(Box<TgtTerm>),
    Plus(Box<TgtTerm>, Box<TgtTerm>),
    Ifz(Box<TgtTerm>, Box<TgtTerm>, Box<TgtTerm>),
    Unit,
    Pair(Box<TgtTerm>, Box<TgtTerm>),
    Fst(Box<TgtTerm>),
    Snd(Box<TgtTerm>),
    Let(Box<TgtTerm>, Name, Box<TgtTerm>),
    Abs {
        param_ty: TgtType,
        param: Name,
        body: Box<TgtTerm>,
    },
    App(Box<TgtTerm>, Box<TgtTerm>),
    /// `<code, env>`
    Clos(Box<TgtTerm>, Box<TgtTerm>),
    /// `open scrut as (fun, env) in body`
    Open {
        scrut: Box<TgtTerm>,
        fun: Name,
        env: Name,
        body: Box<TgtTerm>,
    },
}

impl TgtTerm {
    pub fn num(n: u64) -> Self {
        TgtTerm::Num(BigUint::from(n))
    }

    pub fn pred(m: TgtTerm) -> Self {
        TgtTerm::Pred(Box::new(m))
    }

    pub fn plus(a: TgtTerm, b: TgtTerm) -> Self {
        TgtTerm::Plus(Box::new(a), Box::new(b))
    }

    pub fn ifz(c: TgtTerm, z: TgtTerm, s: TgtTerm) -> Self {
        TgtTerm::Ifz(Box::new(c), Box::new(z), Box::new(s))
    }

    pub fn pair(a: TgtTerm, b: TgtTerm) -> Self {
        TgtTerm::Pair(Box::new(a), Box::new(b))
    }

    pub fn fst(m: TgtTerm) -> Self {
        TgtTerm::Fst(Box::new(m))
    }

    pub fn snd(m: TgtTerm) -> Self {
        TgtTerm::Snd(Box::new(m))
    }

    pub fn let_(x: Name, bound: TgtTerm, body: TgtTerm) -> Self {
        TgtTerm::Let(Box::new(bound), x, Box::new(body))
    }

    pub fn abs(param: Name, param_ty: TgtType, body: TgtTerm) -> Self {
        TgtTerm::Abs {
            param_ty,
            param,
            body: Box::new(body),
        }
    }

    pub fn app(a: TgtTerm, b: TgtTerm) -> Self {
        TgtTerm::App(Box::new(a), Box::new(b))
    }

    pub fn clos(code: TgtTerm, env: TgtTerm) -> Self {
        TgtTerm::Clos(Box::new(code), Box::new(env))
    }

    pub fn open(scrut: TgtTerm, fun: Name, env: Name, body: TgtTerm) -> Self {
        TgtTerm::Open {
            scrut: Box::new(scrut),
            fun,
            env,
            body: Box::new(body),
        }
    }

    /// Right-nested tuple `(m1, ..., mn)` ending in unit.
    pub fn tuple(items: impl IntoIterator<Item = TgtTerm>) -> Self {
        let items: Vec<_> = items.into_iter().collect();
        items
            .into_iter()
            .rev()
            .fold(TgtTerm::Unit, |acc, t| TgtTerm::pair(t, acc))
    }

    /// The `i`-th projection (1-based): `fst` of `snd` applied `i - 1` times.
    pub fn proj(i: usize, m: TgtTerm) -> Self {
        assert!(i >= 1, "projections are 1-based");
        let mut t = m;
        for _ in 1..i {
            t = TgtTerm::snd(t);
        }
        TgtTerm::fst(t)
    }

    pub fn as_num(&self) -> Option<&BigUint> {
        match self {
            TgtTerm::Num(n) => Some(n),
            _ => None,
        }
    }

    /// Components of a right-nested unit-terminated tuple, or `None` when the
    /// term is not of that shape.
    pub fn tuple_items(&self) -> Option<Vec<&TgtTerm>> {
        let mut out = Vec::new();
        let mut t = self;
        loop {
            match t {
                TgtTerm::Unit => return Some(out),
                TgtTerm::Pair(a, b) => {
                    out.push(a.as_ref());
                    t = b;
                }
                _ => return None,
            }
        }
    }
}

impl Syntax for TgtTerm {
    fn var(name: Name) -> Self {
        TgtTerm::Var(name)
    }

    fn as_var(&self) -> Option<&Name> {
        match self {
            TgtTerm::Var(x) => Some(x),
            _ => None,
        }
    }

    fn collect_free(&self, bound: &mut Vec<Name>, seen: &mut HashSet<Name>, out: &mut Vec<Name>) {
        match self {
            TgtTerm::Num(_) | TgtTerm::Unit => {}
            TgtTerm::Var(x) => note_free(x, bound, seen, out),
            TgtTerm::Pred(m) | TgtTerm::Fst(m) | TgtTerm::Snd(m) => {
                m.collect_free(bound, seen, out)
            }
            TgtTerm::Plus(a, b)
            | TgtTerm::Pair(a, b)
            | TgtTerm::App(a, b)
            | TgtTerm::Clos(a, b) => {
                a.collect_free(bound, seen, out);
                b.collect_free(bound, seen, out);
            }
            TgtTerm::Ifz(c, z, s) => {
                c.collect_free(bound, seen, out);
                z.collect_free(bound, seen, out);
                s.collect_free(bound, seen, out);
            }
            TgtTerm::Let(m, x, body) => {
                m.collect_free(bound, seen, out);
                bound.push(x.clone());
                body.collect_free(bound, seen, out);
                bound.pop();
            }
            TgtTerm::Abs { param, body, .. } => {
                bound.push(param.clone());
                body.collect_free(bound, seen, out);
                bound.pop();
            }
            TgtTerm::Open {
                scrut,
                fun,
                env,
                body,
            } => {
                scrut.collect_free(bound, seen, out);
                bound.push(fun.clone());
                bound.push(env.clone());
                body.collect_free(bound, seen, out);
                bound.truncate(bound.len() - 2);
            }
        }
    }

    fn subst_with(&self, s: &mut Scope<'_, Self>) -> Self {
        let mut go = |m: &TgtTerm| Box::new(m.subst_with(s));
        match self {
            TgtTerm::Num(_) | TgtTerm::Unit => self.clone(),
            TgtTerm::Var(x) => s.lookup(x),
            TgtTerm::Pred(m) => TgtTerm::Pred(go(m)),
            TgtTerm::Fst(m) => TgtTerm::Fst(go(m)),
            TgtTerm::Snd(m) => TgtTerm::Snd(go(m)),
            TgtTerm::Plus(a, b) => TgtTerm::Plus(go(a), go(b)),
            TgtTerm::Pair(a, b) => TgtTerm::Pair(go(a), go(b)),
            TgtTerm::App(a, b) => TgtTerm::App(go(a), go(b)),
            TgtTerm::Clos(a, b) => TgtTerm::Clos(go(a), go(b)),
            TgtTerm::Ifz(c, z, n) => TgtTerm::Ifz(go(c), go(z), go(n)),
            TgtTerm::Let(m, x, body) => {
                let m = go(m);
                let x2 = s.bind(x);
                let body = Box::new(body.subst_with(s));
                s.unbind(1);
                TgtTerm::Let(m, x2, body)
            }
            TgtTerm::Abs {
                param_ty,
                param,
                body,
            } => {
                let p2 = s.bind(param);
                let body = Box::new(body.subst_with(s));
                s.unbind(1);
                TgtTerm::Abs {
                    param_ty: param_ty.clone(),
                    param: p2,
                    body,
                }
            }
            TgtTerm::Open {
                scrut,
                fun,
                env,
                body,
            } => {
                let scrut = go(scrut);
                let fun2 = s.bind(fun);
                let env2 = s.bind(env);
                let body = Box::new(body.subst_with(s));
                s.unbind(2);
                TgtTerm::Open {
                    scrut,
                    fun: fun2,
                    env: env2,
                    body,
                }
            }
        }
    }

    fn alpha_eq_in(&self, other: &Self, env: &mut Vec<(Name, Name)>) -> bool {
        use TgtTerm::*;
        match (self, other) {
            (Num(a), Num(b)) => a == b,
            (Unit, Unit) => true,
            (Var(a), Var(b)) => lookup_bound(env, a, b),
            (Pred(a), Pred(b)) | (Fst(a), Fst(b)) | (Snd(a), Snd(b)) => a.alpha_eq_in(b, env),
            (Plus(a1, a2), Plus(b1, b2))
            | (Pair(a1, a2), Pair(b1, b2))
            | (App(a1, a2), App(b1, b2))
            | (Clos(a1, a2), Clos(b1, b2)) => a1.alpha_eq_in(b1, env) && a2.alpha_eq_in(b2, env),
            (Ifz(a1, a2, a3), Ifz(b1, b2, b3)) => {
                a1.alpha_eq_in(b1, env) && a2.alpha_eq_in(b2, env) && a3.alpha_eq_in(b3, env)
            }
            (Let(m1, x1, b1), Let(m2, x2, b2)) => {
                if !m1.alpha_eq_in(m2, env) {
                    return false;
                }
                env.push((x1.clone(), x2.clone()));
                let r = b1.alpha_eq_in(b2, env);
                env.pop();
                r
            }
            (
                Abs {
                    param_ty: t1,
                    param: p1,
                    body: b1,
                },
                Abs {
                    param_ty: t2,
                    param: p2,
                    body: b2,
                },
            ) => {
                if t1 != t2 {
                    return false;
                }
                env.push((p1.clone(), p2.clone()));
                let r = b1.alpha_eq_in(b2, env);
                env.pop();
                r
            }
            (
                Open {
                    scrut: s1,
                    fun: f1,
                    env: e1,
                    body: b1,
                },
                Open {
                    scrut: s2,
                    fun: f2,
                    env: e2,
                    body: b2,
                },
            ) => {
                if !s1.alpha_eq_in(s2, env) {
                    return false;
                }
                env.push((f1.clone(), f2.clone()));
                env.push((e1.clone(), e2.clone()));
                let r = b1.alpha_eq_in(b2, env);
                env.truncate(env.len() - 2);
                r
            }
            _ => false,
        }
    }

    fn is_value(&self) -> bool {
        match self {
            TgtTerm::Num(_) | TgtTerm::Unit | TgtTerm::Abs { .. } => true,
            TgtTerm::Pair(a, b) | TgtTerm::Clos(a, b) => a.is_value() && b.is_value(),
            _ => false,
        }
    }

    fn size(&self) -> usize {
        match self {
            TgtTerm::Num(_) | TgtTerm::Unit | TgtTerm::Var(_) => 1,
            TgtTerm::Pred(m) | TgtTerm::Fst(m) | TgtTerm::Snd(m) => 1 + m.size(),
            TgtTerm::Plus(a, b)
            | TgtTerm::Pair(a, b)
            | TgtTerm::App(a, b)
            | TgtTerm::Clos(a, b)
            | TgtTerm::Let(a, _, b)
            | TgtTerm::Open {
                scrut: a, body: b, ..
            } => 1 + a.size() + b.size(),
            TgtTerm::Ifz(c, z, s) => 1 + c.size() + z.size() + s.size(),
            TgtTerm::Abs { body, .. } => 1 + body.size(),
        }
    }
}
