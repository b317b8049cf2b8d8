//! Code hoisting: lifts every abstraction to a flat list of closed top-level
//! functions.
//!
//! An abstraction `abs (x : T) M` whose body extracted functions `f1..fn`
//! becomes a new top-level function
//!
//! ```text
//! g = abs (fs : (T1 * ... * Tn * unit)) (abs (x : T) M[pi_i(fs)/f_i])
//! ```
//!
//! and is replaced in place by `(g (f1, ..., fn))`. An extracted function may
//! not mention a variable bound between its origin and the top level; that
//! is reported as [`HoistError::Dependency`].

use thiserror::Error;

use crate::name::Name;
use crate::syntax::{Subst, Syntax, TgtTerm, TgtType};
use crate::typing::{closure_code_type, fresh_rigid, type_of_tgt, TgtCtx, TypeError};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum HoistError {
    #[error("cannot hoist `{function}` out of the scope of `{var}`, which it depends on")]
    Dependency { var: Name, function: Name },
    #[error("input is not closed: `{0}` is free")]
    FreeVariable(Name),
    #[error(transparent)]
    Type(#[from] TypeError),
}

/// `letfun f1 = M1 ... fn = Mn in main`
#[derive(Clone, Debug)]
pub struct HoistedProgram {
    pub funs: Vec<(Name, TgtTerm)>,
    pub main: TgtTerm,
}

impl HoistedProgram {
    /// Right-nested `let`s binding each function around `main`.
    pub fn reify(&self) -> TgtTerm {
        self.funs
            .iter()
            .rev()
            .fold(self.main.clone(), |acc, (f, m)| {
                TgtTerm::let_(f.clone(), m.clone(), acc)
            })
    }

    /// Every function body is a closed abstraction and `main` mentions only
    /// function names.
    pub fn is_well_formed(&self) -> bool {
        let names: Vec<&Name> = self.funs.iter().map(|(f, _)| f).collect();
        self.funs
            .iter()
            .all(|(_, m)| matches!(m, TgtTerm::Abs { .. }) && m.is_closed())
            && self.main.free_vars().iter().all(|x| names.contains(&x))
    }
}

struct Extracted {
    name: Name,
    body: TgtTerm,
    ty: TgtType,
}

pub fn hoist(m: &TgtTerm) -> Result<HoistedProgram, HoistError> {
    if let Some(x) = m.free_vars().into_iter().next() {
        return Err(HoistError::FreeVariable(x));
    }
    let mut ctx = TgtCtx::new();
    let (funs, main) = walk(&mut ctx, m)?;
    Ok(HoistedProgram {
        funs: funs.into_iter().map(|e| (e.name, e.body)).collect(),
        main,
    })
}

fn check_independent(var: &Name, funs: &[Extracted]) -> Result<(), HoistError> {
    match funs.iter().find(|e| e.body.free_vars().contains(var)) {
        Some(e) => Err(HoistError::Dependency {
            var: var.clone(),
            function: e.name.clone(),
        }),
        None => Ok(()),
    }
}

type Walked = (Vec<Extracted>, TgtTerm);

fn walk(ctx: &mut TgtCtx, m: &TgtTerm) -> Result<Walked, HoistError> {
    let mut funs = Vec::new();
    let mut go = |ctx: &mut TgtCtx, t: &TgtTerm| -> Result<Box<TgtTerm>, HoistError> {
        let (fs, t2) = walk(ctx, t)?;
        funs.extend(fs);
        Ok(Box::new(t2))
    };
    let main = match m {
        TgtTerm::Num(_) | TgtTerm::Unit | TgtTerm::Var(_) => m.clone(),
        TgtTerm::Pred(a) => TgtTerm::Pred(go(ctx, a)?),
        TgtTerm::Fst(a) => TgtTerm::Fst(go(ctx, a)?),
        TgtTerm::Snd(a) => TgtTerm::Snd(go(ctx, a)?),
        TgtTerm::Plus(a, b) => TgtTerm::Plus(go(ctx, a)?, go(ctx, b)?),
        TgtTerm::Pair(a, b) => TgtTerm::Pair(go(ctx, a)?, go(ctx, b)?),
        TgtTerm::App(a, b) => TgtTerm::App(go(ctx, a)?, go(ctx, b)?),
        TgtTerm::Clos(a, b) => TgtTerm::Clos(go(ctx, a)?, go(ctx, b)?),
        TgtTerm::Ifz(a, b, c) => TgtTerm::Ifz(go(ctx, a)?, go(ctx, b)?, go(ctx, c)?),
        TgtTerm::Let(a, x, body) => {
            let a2 = go(ctx, a)?;
            let ty = type_of_tgt(ctx, a)?;
            ctx.push(x.clone(), ty);
            let inner = walk(ctx, body);
            ctx.pop();
            let (fs, body2) = inner?;
            check_independent(x, &fs)?;
            funs.extend(fs);
            TgtTerm::Let(a2, x.clone(), Box::new(body2))
        }
        TgtTerm::Open {
            scrut,
            fun,
            env,
            body,
        } => {
            let scrut2 = go(ctx, scrut)?;
            let (arg, res) = match type_of_tgt(ctx, scrut)? {
                TgtType::Arr(a, r) => (*a, *r),
                t => {
                    return Err(TypeError::Mismatch {
                        expected: "a closure type (-> _ _)".into(),
                        found: t.to_string(),
                        location: crate::frontend::print_tgt(scrut),
                    }
                    .into())
                }
            };
            let l = fresh_rigid();
            ctx.push(
                fun.clone(),
                closure_code_type(&arg, &res, TgtType::Rigid(l)),
            );
            ctx.push(env.clone(), TgtType::Rigid(l));
            let inner = walk(ctx, body);
            ctx.pop();
            ctx.pop();
            let (fs, body2) = inner?;
            check_independent(fun, &fs)?;
            check_independent(env, &fs)?;
            funs.extend(fs);
            TgtTerm::Open {
                scrut: scrut2,
                fun: fun.clone(),
                env: env.clone(),
                body: Box::new(body2),
            }
        }
        TgtTerm::Abs {
            param_ty,
            param,
            body,
        } => {
            let abs_ty = type_of_tgt(ctx, m)?;
            ctx.push(param.clone(), param_ty.clone());
            let inner = walk(ctx, body);
            ctx.pop();
            let (fs, body2) = inner?;
            check_independent(param, &fs)?;

            let tuple = Name::fresh("fs");
            let projections: Subst<TgtTerm> = fs
                .iter()
                .enumerate()
                .map(|(i, e)| {
                    (
                        e.name.clone(),
                        TgtTerm::proj(i + 1, TgtTerm::Var(tuple.clone())),
                    )
                })
                .collect();
            let tuple_ty = TgtType::tuple(fs.iter().map(|e| e.ty.clone()));
            let g = Name::fresh("g");
            let code = TgtTerm::abs(
                tuple,
                tuple_ty.clone(),
                TgtTerm::abs(param.clone(), param_ty.clone(), body2.subst(&projections)),
            );
            let call = TgtTerm::app(
                TgtTerm::Var(g.clone()),
                TgtTerm::tuple(fs.iter().map(|e| TgtTerm::Var(e.name.clone()))),
            );
            funs.extend(fs);
            funs.push(Extracted {
                name: g,
                body: code,
                ty: TgtType::code(tuple_ty, abs_ty),
            });
            call
        }
    };
    Ok((funs, main))
}

/// Number of abstraction nodes in a term; [`hoist`] extracts exactly one
/// function per abstraction.
pub fn count_abs(m: &TgtTerm) -> usize {
    let mut n = 0;
    crate::cc::visit_tgt(m, &mut |t| {
        if matches!(t, TgtTerm::Abs { .. }) {
            n += 1;
        }
    });
    n
}
