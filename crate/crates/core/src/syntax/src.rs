use std::collections::HashSet;

use num_bigint::BigUint;

use super::{lookup_bound, note_free, Scope, Syntax};
use crate::name::Name;
use crate::syntax::SrcType;

/// Terms of the source language.
#[derive(Clone, Debug, PartialEq)]
pub enum SrcTerm {
    Num(BigUint),
    Var(Name),
    Pred(Box<SrcTerm>),
    Plus(Box<SrcTerm>, Box<SrcTerm>),
    Ifz(Box<SrcTerm>, Box<SrcTerm>, Box<SrcTerm>),
    Unit,
    Pair(Box<SrcTerm>, Box<SrcTerm>),
    Fst(Box<SrcTerm>),
    Snd(Box<SrcTerm>),
    /// `let x = bound in body`
    Let(Box<SrcTerm>, Name, Box<SrcTerm>),
    /// Recursive function. `fun_ty` is the arrow type of `fun`, `arg_ty` the
    /// type of `arg`; both are bound in `body`.
    Fix {
        fun_ty: SrcType,
        arg_ty: SrcType,
        fun: Name,
        arg: Name,
        body: Box<SrcTerm>,
    },
    App(Box<SrcTerm>, Box<SrcTerm>),
}

impl SrcTerm {
    pub fn num(n: u64) -> Self {
        SrcTerm::Num(BigUint::from(n))
    }

    pub fn pred(m: SrcTerm) -> Self {
        SrcTerm::Pred(Box::new(m))
    }

    pub fn plus(a: SrcTerm, b: SrcTerm) -> Self {
        SrcTerm::Plus(Box::new(a), Box::new(b))
    }

    pub fn ifz(c: SrcTerm, z: SrcTerm, s: SrcTerm) -> Self {
        SrcTerm::Ifz(Box::new(c), Box::new(z), Box::new(s))
    }

    pub fn pair(a: SrcTerm, b: SrcTerm) -> Self {
        SrcTerm::Pair(Box::new(a), Box::new(b))
    }

    pub fn fst(m: SrcTerm) -> Self {
        SrcTerm::Fst(Box::new(m))
    }

    pub fn snd(m: SrcTerm) -> Self {
        SrcTerm::Snd(Box::new(m))
    }

    pub fn let_(x: Name, bound: SrcTerm, body: SrcTerm) -> Self {
        SrcTerm::Let(Box::new(bound), x, Box::new(body))
    }

    /// `fix (fun : arg_ty -> res_ty) (arg : arg_ty) body`
    pub fn fix(fun: Name, arg: Name, arg_ty: SrcType, res_ty: SrcType, body: SrcTerm) -> Self {
        SrcTerm::Fix {
            fun_ty: SrcType::arr(arg_ty.clone(), res_ty),
            arg_ty,
            fun,
            arg,
            body: Box::new(body),
        }
    }

    pub fn app(a: SrcTerm, b: SrcTerm) -> Self {
        SrcTerm::App(Box::new(a), Box::new(b))
    }

    pub fn as_num(&self) -> Option<&BigUint> {
        match self {
            SrcTerm::Num(n) => Some(n),
            _ => None,
        }
    }
}

impl Syntax for SrcTerm {
    fn var(name: Name) -> Self {
        SrcTerm::Var(name)
    }

    fn as_var(&self) -> Option<&Name> {
        match self {
            SrcTerm::Var(x) => Some(x),
            _ => None,
        }
    }

    fn collect_free(&self, bound: &mut Vec<Name>, seen: &mut HashSet<Name>, out: &mut Vec<Name>) {
        match self {
            SrcTerm::Num(_) | SrcTerm::Unit => {}
            SrcTerm::Var(x) => note_free(x, bound, seen, out),
            SrcTerm::Pred(m) | SrcTerm::Fst(m) | SrcTerm::Snd(m) => {
                m.collect_free(bound, seen, out)
            }
            SrcTerm::Plus(a, b) | SrcTerm::Pair(a, b) | SrcTerm::App(a, b) => {
                a.collect_free(bound, seen, out);
                b.collect_free(bound, seen, out);
            }
            SrcTerm::Ifz(c, z, s) => {
                c.collect_free(bound, seen, out);
                z.collect_free(bound, seen, out);
                s.collect_free(bound, seen, out);
            }
            SrcTerm::Let(m, x, body) => {
                m.collect_free(bound, seen, out);
                bound.push(x.clone());
                body.collect_free(bound, seen, out);
                bound.pop();
            }
            SrcTerm::Fix { fun, arg, body, .. } => {
                bound.push(fun.clone());
                bound.push(arg.clone());
                body.collect_free(bound, seen, out);
                bound.truncate(bound.len() - 2);
            }
        }
    }

    fn subst_with(&self, s: &mut Scope<'_, Self>) -> Self {
        let mut go = |m: &SrcTerm| Box::new(m.subst_with(s));
        match self {
            SrcTerm::Num(_) | SrcTerm::Unit => self.clone(),
            SrcTerm::Var(x) => s.lookup(x),
            SrcTerm::Pred(m) => SrcTerm::Pred(go(m)),
            SrcTerm::Fst(m) => SrcTerm::Fst(go(m)),
            SrcTerm::Snd(m) => SrcTerm::Snd(go(m)),
            SrcTerm::Plus(a, b) => SrcTerm::Plus(go(a), go(b)),
            SrcTerm::Pair(a, b) => SrcTerm::Pair(go(a), go(b)),
            SrcTerm::App(a, b) => SrcTerm::App(go(a), go(b)),
            SrcTerm::Ifz(c, z, n) => SrcTerm::Ifz(go(c), go(z), go(n)),
            SrcTerm::Let(m, x, body) => {
                let m = go(m);
                let x2 = s.bind(x);
                let body = Box::new(body.subst_with(s));
                s.unbind(1);
                SrcTerm::Let(m, x2, body)
            }
            SrcTerm::Fix {
                fun_ty,
                arg_ty,
                fun,
                arg,
                body,
            } => {
                let fun2 = s.bind(fun);
                let arg2 = s.bind(arg);
                let body = Box::new(body.subst_with(s));
                s.unbind(2);
                SrcTerm::Fix {
                    fun_ty: fun_ty.clone(),
                    arg_ty: arg_ty.clone(),
                    fun: fun2,
                    arg: arg2,
                    body,
                }
            }
        }
    }

    fn alpha_eq_in(&self, other: &Self, env: &mut Vec<(Name, Name)>) -> bool {
        use SrcTerm::*;
        match (self, other) {
            (Num(a), Num(b)) => a == b,
            (Unit, Unit) => true,
            (Var(a), Var(b)) => lookup_bound(env, a, b),
            (Pred(a), Pred(b)) | (Fst(a), Fst(b)) | (Snd(a), Snd(b)) => a.alpha_eq_in(b, env),
            (Plus(a1, a2), Plus(b1, b2))
            | (Pair(a1, a2), Pair(b1, b2))
            | (App(a1, a2), App(b1, b2)) => a1.alpha_eq_in(b1, env) && a2.alpha_eq_in(b2, env),
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
                Fix {
                    fun_ty: ft1,
                    arg_ty: at1,
                    fun: f1,
                    arg: x1,
                    body: b1,
                },
                Fix {
                    fun_ty: ft2,
                    arg_ty: at2,
                    fun: f2,
                    arg: x2,
                    body: b2,
                },
            ) => {
                if ft1 != ft2 || at1 != at2 {
                    return false;
                }
                env.push((f1.clone(), f2.clone()));
                env.push((x1.clone(), x2.clone()));
                let r = b1.alpha_eq_in(b2, env);
                env.truncate(env.len() - 2);
                r
            }
            _ => false,
        }
    }

    fn is_value(&self) -> bool {
        match self {
            SrcTerm::Num(_) | SrcTerm::Unit | SrcTerm::Fix { .. } => true,
            SrcTerm::Pair(a, b) => a.is_value() && b.is_value(),
            _ => false,
        }
    }

    fn size(&self) -> usize {
        match self {
            SrcTerm::Num(_) | SrcTerm::Unit | SrcTerm::Var(_) => 1,
            SrcTerm::Pred(m) | SrcTerm::Fst(m) | SrcTerm::Snd(m) => 1 + m.size(),
            SrcTerm::Plus(a, b)
            | SrcTerm::Pair(a, b)
            | SrcTerm::App(a, b)
            | SrcTerm::Let(a, _, b) => 1 + a.size() + b.size(),
            SrcTerm::Ifz(c, z, s) => 1 + c.size() + z.size() + s.size(),
            SrcTerm::Fix { body, .. } => 1 + body.size(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::Subst;

    fn v(n: &Name) -> SrcTerm {
        SrcTerm::Var(n.clone())
    }

    /// Independent free-variable walk: collect every variable occurrence with
    /// the set of binders above it, then keep the unbound ones in order.
    fn occurrences(m: &SrcTerm, bound: &[Name], out: &mut Vec<(Name, Vec<Name>)>) {
        let mut inner = bound.to_vec();
        match m {
            SrcTerm::Var(x) => out.push((x.clone(), bound.to_vec())),
            SrcTerm::Let(a, x, b) => {
                occurrences(a, bound, out);
                inner.push(x.clone());
                occurrences(b, &inner, out);
            }
            SrcTerm::Fix { fun, arg, body, .. } => {
                inner.push(fun.clone());
                inner.push(arg.clone());
                occurrences(body, &inner, out);
            }
            SrcTerm::Num(_) | SrcTerm::Unit => {}
            SrcTerm::Pred(a) | SrcTerm::Fst(a) | SrcTerm::Snd(a) => occurrences(a, bound, out),
            SrcTerm::Plus(a, b) | SrcTerm::Pair(a, b) | SrcTerm::App(a, b) => {
                occurrences(a, bound, out);
                occurrences(b, bound, out);
            }
            SrcTerm::Ifz(a, b, c) => {
                occurrences(a, bound, out);
                occurrences(b, bound, out);
                occurrences(c, bound, out);
            }
        }
    }

    fn oracle_free(m: &SrcTerm) -> Vec<Name> {
        let mut occ = Vec::new();
        occurrences(m, &[], &mut occ);
        let mut out: Vec<Name> = Vec::new();
        for (x, above) in occ {
            if !above.contains(&x) && !out.contains(&x) {
                out.push(x);
            }
        }
        out
    }

    #[test]
    fn free_vars_examples() {
        let (x, y, z) = (Name::global("x"), Name::global("y"), Name::global("z"));
        assert!(SrcTerm::num(3).free_vars().is_empty());
        assert_eq!(
            SrcTerm::plus(v(&x), v(&y)).free_vars(),
            vec![x.clone(), y.clone()]
        );

        let f = Name::fresh("f");
        let a = Name::fresh("x");
        let m = SrcTerm::fix(
            f.clone(),
            a.clone(),
            SrcType::Nat,
            SrcType::Nat,
            SrcTerm::app(v(&f), SrcTerm::plus(v(&a), v(&z))),
        );
        assert_eq!(oracle_free(&m), vec![z.clone()]);
        assert_eq!(m.free_vars(), vec![z]);
    }

    #[test]
    fn free_vars_first_occurrence_order() {
        let (x, y) = (Name::global("x"), Name::global("y"));
        let b = Name::fresh("b");
        let m = SrcTerm::pair(
            SrcTerm::let_(b.clone(), v(&y), SrcTerm::plus(v(&b), v(&x))),
            SrcTerm::plus(v(&x), v(&y)),
        );
        assert_eq!(m.free_vars(), vec![y, x]);
        assert_eq!(m.free_vars(), oracle_free(&m));
    }

    #[test]
    fn subst_examples() {
        let x = Name::global("x");
        let y = Name::global("y");
        let s = Subst::single(x.clone(), SrcTerm::num(2));
        assert_eq!(v(&x).subst(&s), SrcTerm::num(2));
        assert_eq!(
            SrcTerm::num(5).subst(&Subst::single(x, SrcTerm::num(9))),
            SrcTerm::num(5)
        );

        let f = Name::fresh("f");
        let a = Name::fresh("x");
        let m = SrcTerm::fix(f.clone(), a.clone(), SrcType::Nat, SrcType::Nat, v(&y));
        let out = m.subst(&Subst::single(y, SrcTerm::num(1)));
        let expected = SrcTerm::fix(f, a, SrcType::Nat, SrcType::Nat, SrcTerm::num(1));
        assert!(out.alpha_eq(&expected));
    }

    #[test]
    fn subst_respects_shadowing() {
        let x = Name::global("x");
        let m = SrcTerm::let_(x.clone(), SrcTerm::num(1), v(&x));
        let out = m.subst(&Subst::single(x, SrcTerm::num(7)));
        assert!(out.alpha_eq(&m));
    }

    #[test]
    fn subst_avoids_capture_of_open_range() {
        // (let y = 1 in x)[y/x] must not capture y.
        let x = Name::global("x");
        let y = Name::global("y");
        let m = SrcTerm::let_(y.clone(), SrcTerm::num(1), v(&x));
        let out = m.subst(&Subst::single(x, v(&y)));
        assert_eq!(out.free_vars(), vec![y.clone()]);
        match out {
            SrcTerm::Let(_, bound, body) => {
                assert_ne!(bound, y);
                assert_eq!(*body, v(&y));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn subst_renamed_binder_is_used_in_body() {
        // (let y = y in (y, x))[y/x] renames the binder but keeps the bound use.
        let x = Name::global("x");
        let y = Name::global("y");
        let m = SrcTerm::let_(y.clone(), v(&y), SrcTerm::pair(v(&y), v(&x)));
        let out = m.subst(&Subst::single(x, v(&y)));
        let z = Name::fresh("z");
        let expected = SrcTerm::let_(z.clone(), v(&y), SrcTerm::pair(v(&z), v(&y)));
        assert!(out.alpha_eq(&expected), "{out:?}");
    }

    #[test]
    fn subst_under_deep_binders() {
        let x = Name::global("x");
        let big = (0..200).fold(SrcTerm::num(0), |acc, n| {
            SrcTerm::pair(SrcTerm::num(n), acc)
        });
        let mut m = v(&x);
        for i in 0..300 {
            m = SrcTerm::let_(Name::fresh(&format!("y{i}")), SrcTerm::num(i), m);
        }
        let out = m.subst(&Subst::single(x, big.clone()));
        let mut body = &out;
        while let SrcTerm::Let(_, _, b) = body {
            body = b;
        }
        assert!(body.alpha_eq(&big));
    }

    #[test]
    fn alpha_eq_examples() {
        let x = Name::fresh("x");
        let y = Name::fresh("y");
        let a = SrcTerm::let_(x.clone(), SrcTerm::num(1), v(&x));
        let b = SrcTerm::let_(y.clone(), SrcTerm::num(1), v(&y));
        assert!(a.alpha_eq(&b));
        assert!(!v(&Name::global("x")).alpha_eq(&v(&Name::global("y"))));
        // bound vs free
        let c = SrcTerm::let_(y.clone(), SrcTerm::num(1), v(&x));
        assert!(!a.alpha_eq(&c));
    }

    #[test]
    fn values() {
        assert!(SrcTerm::num(3).is_value());
        let f = Name::fresh("f");
        let a = Name::fresh("x");
        let app = SrcTerm::app(
            SrcTerm::fix(f, a.clone(), SrcType::Nat, SrcType::Nat, v(&a)),
            SrcTerm::num(1),
        );
        assert!(!SrcTerm::pair(SrcTerm::num(1), app).is_value());
        assert!(SrcTerm::pair(SrcTerm::num(1), SrcTerm::Unit).is_value());
    }
}
