//! One-pass call-by-value CPS transformation on the source language.
//!
//! Continuations are either *static* (host closures, applied at
//! transformation time so no administrative redex is built) or *dynamic*
//! (an object-level continuation variable). A source function
//! `fix (f : A -> B) (x : A) M` becomes
//!
//! ```text
//! fix (f : (A' * (B' -> nat)) -> nat) (a : A' * (B' -> nat))
//!   let x = fst a in let k = snd a in [[M]] k
//! ```
//!
//! so the output stays inside the source language and runs on its
//! evaluator. Answers are of type `nat`.

use std::collections::HashSet;

use crate::name::Name;
use crate::syntax::{SrcTerm, SrcType};
use crate::typing::{type_of_src, SrcCtx, TypeError};

/// A continuation during transformation.
pub enum MetaCont<'a> {
    Static(&'a dyn Fn(SrcTerm, &mut Cps) -> SrcTerm),
    Dynamic(Name),
}

/// Translation of types: functions take their argument paired with a
/// continuation and return the answer type.
pub fn cps_type(t: &SrcType) -> SrcType {
    match t {
        SrcType::Nat => SrcType::Nat,
        SrcType::Unit => SrcType::Unit,
        SrcType::Prod(a, b) => SrcType::prod(cps_type(a), cps_type(b)),
        SrcType::Arr(a, b) => SrcType::arr(SrcType::prod(cps_type(a), cont_type(b)), SrcType::Nat),
    }
}

fn cont_type(t: &SrcType) -> SrcType {
    SrcType::arr(cps_type(t), SrcType::Nat)
}

/// Transformation state: the typing context of the input and the names of
/// every continuation abstraction the transform introduced.
#[derive(Default)]
pub struct Cps {
    ctx: SrcCtx,
    introduced: HashSet<Name>,
}

impl Cps {
    pub fn new(ctx: SrcCtx) -> Self {
        Cps {
            ctx,
            introduced: HashSet::new(),
        }
    }

    /// Binders (the `fix` function names) of continuations built by the
    /// transform.
    pub fn introduced(&self) -> &HashSet<Name> {
        &self.introduced
    }

    fn apply(&mut self, k: &MetaCont<'_>, v: SrcTerm) -> SrcTerm {
        match k {
            MetaCont::Static(f) => f(v, self),
            MetaCont::Dynamic(c) => SrcTerm::app(SrcTerm::Var(c.clone()), v),
        }
    }

    /// Turns `k` into an object-level continuation accepting values of `ty`.
    fn reify(&mut self, k: &MetaCont<'_>, ty: &SrcType) -> SrcTerm {
        match k {
            MetaCont::Dynamic(c) => SrcTerm::Var(c.clone()),
            MetaCont::Static(f) => {
                let kf = Name::fresh("k");
                let v = Name::fresh("v");
                self.introduced.insert(kf.clone());
                let body = f(SrcTerm::Var(v.clone()), self);
                SrcTerm::fix(kf, v, cps_type(ty), SrcType::Nat, body)
            }
        }
    }

    /// Transforms `m`, handing its value to `k`. `m` must be well typed in
    /// the context this transformer was created with.
    pub fn cps(&mut self, m: &SrcTerm, k: &MetaCont<'_>) -> Result<SrcTerm, TypeError> {
        type_of_src(&self.ctx, m)?;
        Ok(self.go(m, k))
    }

    fn type_of(&self, m: &SrcTerm) -> SrcType {
        type_of_src(&self.ctx, m).expect("input was type checked on entry")
    }

    fn go(&mut self, m: &SrcTerm, k: &MetaCont<'_>) -> SrcTerm {
        match m {
            SrcTerm::Num(_) | SrcTerm::Unit | SrcTerm::Var(_) => self.apply(k, m.clone()),
            SrcTerm::Fix {
                fun_ty,
                arg_ty,
                fun,
                arg,
                body,
            } => {
                let SrcType::Arr(_, res_ty) = fun_ty else {
                    unreachable!("fix annotations were checked on entry")
                };
                let a = Name::fresh("a");
                let c = Name::fresh("c");
                self.ctx.push(fun.clone(), fun_ty.clone());
                self.ctx.push(arg.clone(), arg_ty.clone());
                let body2 = self.go(body, &MetaCont::Dynamic(c.clone()));
                self.ctx.pop();
                self.ctx.pop();
                let param_ty = SrcType::prod(cps_type(arg_ty), cont_type(res_ty));
                let f2 = SrcTerm::Fix {
                    fun_ty: SrcType::arr(param_ty.clone(), SrcType::Nat),
                    arg_ty: param_ty,
                    fun: fun.clone(),
                    arg: a.clone(),
                    body: Box::new(SrcTerm::let_(
                        arg.clone(),
                        SrcTerm::fst(SrcTerm::Var(a.clone())),
                        SrcTerm::let_(c, SrcTerm::snd(SrcTerm::Var(a)), body2),
                    )),
                };
                self.apply(k, f2)
            }
            // Primitive operations on values are trivial: the operation is
            // passed on to the continuation unevaluated.
            SrcTerm::Pred(a) => self.unary(a, k, SrcTerm::pred),
            SrcTerm::Fst(a) => self.unary(a, k, SrcTerm::fst),
            SrcTerm::Snd(a) => self.unary(a, k, SrcTerm::snd),
            SrcTerm::Plus(a, b) => self.binary(a, b, k, SrcTerm::plus),
            SrcTerm::Pair(a, b) => self.binary(a, b, k, SrcTerm::pair),
            SrcTerm::Ifz(c, z, s) => {
                let cont = |v: SrcTerm, st: &mut Cps| {
                    let z2 = st.go(z, k);
                    let s2 = st.go(s, k);
                    SrcTerm::ifz(v, z2, s2)
                };
                self.go(c, &MetaCont::Static(&cont))
            }
            SrcTerm::Let(a, x, body) => {
                let ty = self.type_of(a);
                let cont = |v: SrcTerm, st: &mut Cps| {
                    st.ctx.push(x.clone(), ty.clone());
                    let b = st.go(body, k);
                    st.ctx.pop();
                    SrcTerm::let_(x.clone(), v, b)
                };
                self.go(a, &MetaCont::Static(&cont))
            }
            SrcTerm::App(f, a) => {
                let res_ty = self.type_of(m);
                let cont = |fv: SrcTerm, st: &mut Cps| {
                    let inner = |av: SrcTerm, st: &mut Cps| {
                        let kv = st.reify(k, &res_ty);
                        SrcTerm::app(fv.clone(), SrcTerm::pair(av, kv))
                    };
                    st.go(a, &MetaCont::Static(&inner))
                };
                self.go(f, &MetaCont::Static(&cont))
            }
        }
    }

    fn unary(&mut self, a: &SrcTerm, k: &MetaCont<'_>, wrap: fn(SrcTerm) -> SrcTerm) -> SrcTerm {
        let cont = |v: SrcTerm, st: &mut Cps| st.apply(k, wrap(v));
        self.go(a, &MetaCont::Static(&cont))
    }

    fn binary(
        &mut self,
        a: &SrcTerm,
        b: &SrcTerm,
        k: &MetaCont<'_>,
        wrap: fn(SrcTerm, SrcTerm) -> SrcTerm,
    ) -> SrcTerm {
        let cont = |va: SrcTerm, st: &mut Cps| {
            let inner = |vb: SrcTerm, st: &mut Cps| st.apply(k, wrap(va.clone(), vb));
            st.go(b, &MetaCont::Static(&inner))
        };
        self.go(a, &MetaCont::Static(&cont))
    }
}

/// Transforms a closed program of type `nat` under the identity
/// continuation.
pub fn cps_program(m: &SrcTerm) -> Result<SrcTerm, TypeError> {
    cps_program_with_tags(m).map(|(t, _)| t)
}

/// Like [`cps_program`], also returning the binders of the continuations
/// the transform introduced.
pub fn cps_program_with_tags(m: &SrcTerm) -> Result<(SrcTerm, HashSet<Name>), TypeError> {
    let ty = type_of_src(&SrcCtx::new(), m)?;
    if ty != SrcType::Nat {
        return Err(TypeError::Mismatch {
            expected: SrcType::Nat.to_string(),
            found: ty.to_string(),
            location: crate::frontend::print_src(m),
        });
    }
    let mut st = Cps::new(SrcCtx::new());
    let id = |v: SrcTerm, _: &mut Cps| v;
    let out = st.cps(m, &MetaCont::Static(&id))?;
    Ok((out, st.introduced))
}

/// Counts application nodes whose operator is a continuation abstraction
/// introduced by the transform, i.e. administrative redexes.
pub fn administrative_redexes(m: &SrcTerm, introduced: &HashSet<Name>) -> usize {
    let here = match m {
        SrcTerm::App(f, _) => match f.as_ref() {
            SrcTerm::Fix { fun, .. } if introduced.contains(fun) => 1,
            _ => 0,
        },
        _ => 0,
    };
    here + match m {
        SrcTerm::Num(_) | SrcTerm::Unit | SrcTerm::Var(_) => 0,
        SrcTerm::Pred(a) | SrcTerm::Fst(a) | SrcTerm::Snd(a) => {
            administrative_redexes(a, introduced)
        }
        SrcTerm::Fix { body, .. } => administrative_redexes(body, introduced),
        SrcTerm::Plus(a, b) | SrcTerm::Pair(a, b) | SrcTerm::App(a, b) | SrcTerm::Let(a, _, b) => {
            administrative_redexes(a, introduced) + administrative_redexes(b, introduced)
        }
        SrcTerm::Ifz(a, b, c) => {
            administrative_redexes(a, introduced)
                + administrative_redexes(b, introduced)
                + administrative_redexes(c, introduced)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::eval_src;
    use crate::frontend::parse_src;

    fn run(text: &str) -> (SrcTerm, HashSet<Name>) {
        cps_program_with_tags(&parse_src(text).unwrap()).unwrap()
    }

    #[test]
    fn value_goes_straight_to_the_continuation() {
        let (out, tags) = run("3");
        assert_eq!(out, SrcTerm::num(3));
        assert!(tags.is_empty());
    }

    #[test]
    fn dynamic_continuation_is_applied() {
        let c = Name::fresh("c");
        let out = Cps::default()
            .cps(&SrcTerm::num(3), &MetaCont::Dynamic(c.clone()))
            .unwrap();
        assert_eq!(out, SrcTerm::app(SrcTerm::Var(c), SrcTerm::num(3)));
    }

    #[test]
    fn arithmetic_needs_no_continuations() {
        let (out, tags) = run("(plus 1 2)");
        assert_eq!(out, SrcTerm::plus(SrcTerm::num(1), SrcTerm::num(2)));
        assert_eq!(administrative_redexes(&out, &tags), 0);
    }

    #[test]
    fn conditional() {
        let (out, _) = run("(ifz 0 1 2)");
        assert_eq!(eval_src(&out, 100).value(), Some(&SrcTerm::num(1)));
    }

    #[test]
    fn function_types() {
        let t = SrcType::arr(SrcType::Nat, SrcType::Nat);
        let k = SrcType::arr(SrcType::Nat, SrcType::Nat);
        assert_eq!(
            cps_type(&t),
            SrcType::arr(SrcType::prod(SrcType::Nat, k), SrcType::Nat)
        );
        assert_eq!(
            cps_type(&SrcType::prod(SrcType::Unit, SrcType::Nat)),
            SrcType::prod(SrcType::Unit, SrcType::Nat)
        );
    }

    #[test]
    fn application_reifies_the_continuation() {
        let (out, tags) = run("(plus 1 ((fix (f : (-> nat nat)) (x : nat) (plus x x)) 4))");
        assert_eq!(tags.len(), 1);
        assert_eq!(administrative_redexes(&out, &tags), 0);
        assert_eq!(eval_src(&out, 1000).value(), Some(&SrcTerm::num(9)));
        assert_eq!(type_of_src(&SrcCtx::new(), &out), Ok(SrcType::Nat));
    }

    #[test]
    fn recursion() {
        let text = "((fix (f : (-> nat nat)) (n : nat) (ifz n 0 (plus n (f (pred n))))) 4)";
        let m = parse_src(text).unwrap();
        let (out, tags) = cps_program_with_tags(&m).unwrap();
        assert_eq!(eval_src(&out, 10_000).value(), Some(&SrcTerm::num(10)));
        assert_eq!(administrative_redexes(&out, &tags), 0);
        assert_eq!(type_of_src(&SrcCtx::new(), &out), Ok(SrcType::Nat));
    }

    #[test]
    fn higher_order_and_pairs() {
        let text = "(let ((twice (fix (t : (-> (-> nat nat) (-> nat nat))) (g : (-> nat nat)) \
                    (fix (h : (-> nat nat)) (y : nat) (g (g y)))))) \
                    (let ((p (pair (twice (fix (s : (-> nat nat)) (z : nat) (plus z 3))) 1))) \
                    ((fst p) (snd p))))";
        let m = parse_src(text).unwrap();
        let expected = eval_src(&m, 10_000);
        let (out, tags) = cps_program_with_tags(&m).unwrap();
        assert_eq!(expected.value(), Some(&SrcTerm::num(7)));
        assert_eq!(eval_src(&out, 10_000).value(), Some(&SrcTerm::num(7)));
        assert_eq!(administrative_redexes(&out, &tags), 0);
        assert_eq!(type_of_src(&SrcCtx::new(), &out), Ok(SrcType::Nat));
    }

    #[test]
    fn divergence_is_preserved() {
        let (out, _) = run("((fix (f : (-> nat nat)) (x : nat) (f x)) 0)");
        assert!(eval_src(&out, 500).is_timeout());
    }

    #[test]
    fn scan_counts_redexes_on_tagged_binders() {
        let k = Name::fresh("k");
        let v = Name::fresh("v");
        let redex = SrcTerm::app(
            SrcTerm::fix(
                k.clone(),
                v.clone(),
                SrcType::Nat,
                SrcType::Nat,
                SrcTerm::Var(v),
            ),
            SrcTerm::num(1),
        );
        let tags: HashSet<Name> = [k].into_iter().collect();
        assert_eq!(administrative_redexes(&redex, &tags), 1);
        assert_eq!(administrative_redexes(&redex, &HashSet::new()), 0);
    }

    #[test]
    fn programs_must_be_nat() {
        assert!(cps_program(&parse_src("unit").unwrap()).is_err());
        assert!(cps_program(&parse_src("(plus unit 1)").unwrap()).is_err());
    }
}
