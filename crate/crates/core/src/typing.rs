//! Syntax-directed type checking for both languages.

use std::sync::atomic::{AtomicU64, Ordering};

use thiserror::Error;

use crate::frontend::{print_src, print_tgt};
use crate::name::Name;
use crate::syntax::{SrcTerm, SrcType, TgtTerm, TgtType};

static NEXT_RIGID: AtomicU64 = AtomicU64::new(1);

/// Allocates an opaque type id never handed out before.
pub fn fresh_rigid() -> u64 {
    NEXT_RIGID.fetch_add(1, Ordering::Relaxed)
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum TypeError {
    #[error("type mismatch in `{location}`: expected {expected}, found {found}")]
    Mismatch {
        expected: String,
        found: String,
        location: String,
    },
    #[error("unbound variable `{0}`")]
    UnboundVariable(Name),
    #[error("opaque environment type (rigid {0}) escapes its open")]
    RigidEscape(u64),
    #[error("closure code refers to `{0}` from the enclosing context")]
    ClosureNotClosed(Name),
}

pub(crate) fn snippet(text: String) -> String {
    const MAX: usize = 72;
    if text.chars().count() <= MAX {
        text
    } else {
        let cut: String = text.chars().take(MAX).collect();
        format!("{cut}...")
    }
}

fn src_mismatch(expected: impl ToString, found: &SrcType, at: &SrcTerm) -> TypeError {
    TypeError::Mismatch {
        expected: expected.to_string(),
        found: found.to_string(),
        location: snippet(print_src(at)),
    }
}

fn tgt_mismatch(expected: impl ToString, found: &TgtType, at: &TgtTerm) -> TypeError {
    TypeError::Mismatch {
        expected: expected.to_string(),
        found: found.to_string(),
        location: snippet(print_tgt(at)),
    }
}

/// An ordered typing context. Lookup finds the most recent binding.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypingCtx<T> {
    entries: Vec<(Name, T)>,
}

pub type SrcCtx = TypingCtx<SrcType>;
pub type TgtCtx = TypingCtx<TgtType>;

impl<T> Default for TypingCtx<T> {
    fn default() -> Self {
        TypingCtx {
            entries: Vec::new(),
        }
    }
}

impl<T: Clone> TypingCtx<T> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn lookup(&self, x: &Name) -> Option<&T> {
        self.entries
            .iter()
            .rev()
            .find(|(n, _)| n == x)
            .map(|(_, t)| t)
    }

    pub fn push(&mut self, x: Name, t: T) {
        self.entries.push((x, t));
    }

    pub fn pop(&mut self) {
        self.entries.pop();
    }

    pub fn extended(&self, x: Name, t: T) -> Self {
        let mut c = self.clone();
        c.push(x, t);
        c
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &(Name, T)> {
        self.entries.iter()
    }

    pub fn names(&self) -> Vec<Name> {
        self.entries.iter().map(|(n, _)| n.clone()).collect()
    }

    pub fn contains(&self, x: &Name) -> bool {
        self.lookup(x).is_some()
    }
}

impl<T> FromIterator<(Name, T)> for TypingCtx<T> {
    fn from_iter<I: IntoIterator<Item = (Name, T)>>(iter: I) -> Self {
        TypingCtx {
            entries: iter.into_iter().collect(),
        }
    }
}

/// Restricts `ctx` to `vars`, in the order of `vars`.
pub fn prune_ctx<T: Clone>(vars: &[Name], ctx: &TypingCtx<T>) -> Result<TypingCtx<T>, TypeError> {
    vars.iter()
        .map(|x| {
            ctx.lookup(x)
                .map(|t| (x.clone(), t.clone()))
                .ok_or_else(|| TypeError::UnboundVariable(x.clone()))
        })
        .collect()
}

pub fn translate_type(t: &SrcType) -> TgtType {
    match t {
        SrcType::Nat => TgtType::Nat,
        SrcType::Unit => TgtType::Unit,
        SrcType::Prod(a, b) => TgtType::prod(translate_type(a), translate_type(b)),
        SrcType::Arr(a, b) => TgtType::arr(translate_type(a), translate_type(b)),
    }
}

pub fn type_of_src(ctx: &SrcCtx, m: &SrcTerm) -> Result<SrcType, TypeError> {
    let mut ctx = ctx.clone();
    src(&mut ctx, m)
}

fn expect_src(ctx: &mut SrcCtx, m: &SrcTerm, want: &SrcType) -> Result<(), TypeError> {
    let t = src(ctx, m)?;
    if &t == want {
        Ok(())
    } else {
        Err(src_mismatch(want, &t, m))
    }
}

fn src(ctx: &mut SrcCtx, m: &SrcTerm) -> Result<SrcType, TypeError> {
    match m {
        SrcTerm::Num(_) => Ok(SrcType::Nat),
        SrcTerm::Unit => Ok(SrcType::Unit),
        SrcTerm::Var(x) => ctx
            .lookup(x)
            .cloned()
            .ok_or_else(|| TypeError::UnboundVariable(x.clone())),
        SrcTerm::Pred(a) => {
            expect_src(ctx, a, &SrcType::Nat)?;
            Ok(SrcType::Nat)
        }
        SrcTerm::Plus(a, b) => {
            expect_src(ctx, a, &SrcType::Nat)?;
            expect_src(ctx, b, &SrcType::Nat)?;
            Ok(SrcType::Nat)
        }
        SrcTerm::Ifz(c, z, s) => {
            expect_src(ctx, c, &SrcType::Nat)?;
            let t = src(ctx, z)?;
            expect_src(ctx, s, &t)?;
            Ok(t)
        }
        SrcTerm::Pair(a, b) => Ok(SrcType::prod(src(ctx, a)?, src(ctx, b)?)),
        SrcTerm::Fst(a) => match src(ctx, a)? {
            SrcType::Prod(l, _) => Ok(*l),
            t => Err(src_mismatch("a product type", &t, a)),
        },
        SrcTerm::Snd(a) => match src(ctx, a)? {
            SrcType::Prod(_, r) => Ok(*r),
            t => Err(src_mismatch("a product type", &t, a)),
        },
        SrcTerm::Let(a, x, body) => {
            let t = src(ctx, a)?;
            ctx.push(x.clone(), t);
            let r = src(ctx, body);
            ctx.pop();
            r
        }
        SrcTerm::Fix {
            fun_ty,
            arg_ty,
            fun,
            arg,
            body,
        } => {
            let res_ty = match fun_ty {
                SrcType::Arr(d, r) if d.as_ref() == arg_ty => r.as_ref().clone(),
                _ => return Err(src_mismatch(format!("(-> {arg_ty} _)"), fun_ty, m)),
            };
            ctx.push(fun.clone(), fun_ty.clone());
            ctx.push(arg.clone(), arg_ty.clone());
            let r = expect_src(ctx, body, &res_ty);
            ctx.pop();
            ctx.pop();
            r.map(|()| fun_ty.clone())
        }
        SrcTerm::App(f, a) => match src(ctx, f)? {
            SrcType::Arr(d, r) => {
                expect_src(ctx, a, &d)?;
                Ok(*r)
            }
            t => Err(src_mismatch("a function type", &t, f)),
        },
    }
}

pub fn type_of_tgt(ctx: &TgtCtx, m: &TgtTerm) -> Result<TgtType, TypeError> {
    let mut ctx = ctx.clone();
    tgt(&mut ctx, m)
}

fn expect_tgt(ctx: &mut TgtCtx, m: &TgtTerm, want: &TgtType) -> Result<(), TypeError> {
    let t = tgt(ctx, m)?;
    if &t == want {
        Ok(())
    } else {
        Err(tgt_mismatch(want, &t, m))
    }
}

/// The type a closure's code must have for a closure of type
/// `arg -> res` with environment type `env`.
pub fn closure_code_type(arg: &TgtType, res: &TgtType, env: TgtType) -> TgtType {
    TgtType::code(
        TgtType::prod(
            TgtType::arr(arg.clone(), res.clone()),
            TgtType::prod(arg.clone(), env),
        ),
        res.clone(),
    )
}

fn tgt(ctx: &mut TgtCtx, m: &TgtTerm) -> Result<TgtType, TypeError> {
    match m {
        TgtTerm::Num(_) => Ok(TgtType::Nat),
        TgtTerm::Unit => Ok(TgtType::Unit),
        TgtTerm::Var(x) => ctx
            .lookup(x)
            .cloned()
            .ok_or_else(|| TypeError::UnboundVariable(x.clone())),
        TgtTerm::Pred(a) => {
            expect_tgt(ctx, a, &TgtType::Nat)?;
            Ok(TgtType::Nat)
        }
        TgtTerm::Plus(a, b) => {
            expect_tgt(ctx, a, &TgtType::Nat)?;
            expect_tgt(ctx, b, &TgtType::Nat)?;
            Ok(TgtType::Nat)
        }
        TgtTerm::Ifz(c, z, s) => {
            expect_tgt(ctx, c, &TgtType::Nat)?;
            let t = tgt(ctx, z)?;
            expect_tgt(ctx, s, &t)?;
            Ok(t)
        }
        TgtTerm::Pair(a, b) => Ok(TgtType::prod(tgt(ctx, a)?, tgt(ctx, b)?)),
        TgtTerm::Fst(a) => match tgt(ctx, a)? {
            TgtType::Prod(l, _) => Ok(*l),
            t => Err(tgt_mismatch("a product type", &t, a)),
        },
        TgtTerm::Snd(a) => match tgt(ctx, a)? {
            TgtType::Prod(_, r) => Ok(*r),
            t => Err(tgt_mismatch("a product type", &t, a)),
        },
        TgtTerm::Let(a, x, body) => {
            let t = tgt(ctx, a)?;
            ctx.push(x.clone(), t);
            let r = tgt(ctx, body);
            ctx.pop();
            r
        }
        TgtTerm::Abs {
            param_ty,
            param,
            body,
        } => {
            ctx.push(param.clone(), param_ty.clone());
            let r = tgt(ctx, body);
            ctx.pop();
            Ok(TgtType::code(param_ty.clone(), r?))
        }
        TgtTerm::App(f, a) => match tgt(ctx, f)? {
            TgtType::Code(d, r) => {
                expect_tgt(ctx, a, &d)?;
                Ok(*r)
            }
            t => Err(tgt_mismatch("a code type (=> _ _)", &t, f)),
        },
        TgtTerm::Clos(code, env) => {
            let code_ty = match type_of_tgt(&TgtCtx::new(), code) {
                Ok(t) => t,
                Err(TypeError::UnboundVariable(x)) if ctx.contains(&x) => {
                    return Err(TypeError::ClosureNotClosed(x))
                }
                Err(e) => return Err(e),
            };
            let env_ty = tgt(ctx, env)?;
            let shape_err = || tgt_mismatch("(=> (* (-> T1 T2) (* T1 Te)) T2)", &code_ty, code);
            let (arg, res) = match &code_ty {
                TgtType::Code(p, r) => match p.as_ref() {
                    TgtType::Prod(self_ty, rest) => match (self_ty.as_ref(), rest.as_ref()) {
                        (TgtType::Arr(a1, r1), TgtType::Prod(a2, _)) if a1 == a2 && r1 == r => {
                            (a1.as_ref().clone(), r1.as_ref().clone())
                        }
                        _ => return Err(shape_err()),
                    },
                    _ => return Err(shape_err()),
                },
                _ => return Err(shape_err()),
            };
            let want = closure_code_type(&arg, &res, env_ty.clone());
            if want != code_ty {
                return Err(tgt_mismatch(want, &code_ty, code));
            }
            Ok(TgtType::arr(arg, res))
        }
        TgtTerm::Open {
            scrut,
            fun,
            env,
            body,
        } => {
            let (arg, res) = match tgt(ctx, scrut)? {
                TgtType::Arr(a, r) => (*a, *r),
                t => return Err(tgt_mismatch("a closure type (-> _ _)", &t, scrut)),
            };
            let l = fresh_rigid();
            ctx.push(
                fun.clone(),
                closure_code_type(&arg, &res, TgtType::Rigid(l)),
            );
            ctx.push(env.clone(), TgtType::Rigid(l));
            let r = tgt(ctx, body);
            ctx.pop();
            ctx.pop();
            let t = r?;
            if t.mentions_rigid(l) {
                return Err(TypeError::RigidEscape(l));
            }
            Ok(t)
        }
    }
}
