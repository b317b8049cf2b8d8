//! Closure conversion.
//!
//! Every `fix` becomes a closure whose code takes a triple
//! `(self, (arg, env))` and whose environment is a unit-terminated tuple of
//! the function's free variables. Applications open the closure and feed it
//! to its own code.

use std::collections::HashSet;

use thiserror::Error;

use crate::name::Name;
use crate::syntax::{SrcTerm, SrcType, Syntax, TgtTerm, TgtType};
use crate::typing::{translate_type, type_of_src, SrcCtx, TypeError};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum CcError {
    #[error("no mapping for variable `{0}`")]
    UnmappedVariable(Name),
    #[error("variable `{0}` is free but not in scope")]
    ScopeViolation(Name),
    #[error("variable `{0}` is already mapped")]
    Shadowed(Name),
    #[error(transparent)]
    Type(#[from] TypeError),
}

/// Mapping from source variables to the target terms that stand for them.
#[derive(Clone, Debug, Default)]
pub struct VarMap {
    entries: Vec<(Name, TgtTerm)>,
}

impl VarMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, x: Name, m: TgtTerm) -> Result<(), CcError> {
        if self.get(&x).is_some() {
            return Err(CcError::Shadowed(x));
        }
        self.entries.push((x, m));
        Ok(())
    }

    pub fn get(&self, x: &Name) -> Option<&TgtTerm> {
        self.entries.iter().find(|(n, _)| n == x).map(|(_, m)| m)
    }

    pub fn iter(&self) -> impl Iterator<Item = &(Name, TgtTerm)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// The variables of `scope` that occur free in `m`, deduplicated, in order
/// of first occurrence.
pub fn fvars(m: &SrcTerm, scope: &[Name]) -> Vec<Name> {
    fn walk(m: &SrcTerm, scope: &[Name], notfree: &mut Vec<Name>, out: &mut Vec<Name>) {
        match m {
            SrcTerm::Var(x) => {
                if !notfree.contains(x) && scope.contains(x) && !out.contains(x) {
                    out.push(x.clone());
                }
            }
            SrcTerm::Num(_) | SrcTerm::Unit => {}
            SrcTerm::Pred(a) | SrcTerm::Fst(a) | SrcTerm::Snd(a) => walk(a, scope, notfree, out),
            SrcTerm::Plus(a, b) | SrcTerm::Pair(a, b) | SrcTerm::App(a, b) => {
                walk(a, scope, notfree, out);
                walk(b, scope, notfree, out);
            }
            SrcTerm::Ifz(a, b, c) => {
                walk(a, scope, notfree, out);
                walk(b, scope, notfree, out);
                walk(c, scope, notfree, out);
            }
            SrcTerm::Let(a, x, b) => {
                walk(a, scope, notfree, out);
                notfree.push(x.clone());
                walk(b, scope, notfree, out);
                notfree.pop();
            }
            SrcTerm::Fix { fun, arg, body, .. } => {
                notfree.push(fun.clone());
                notfree.push(arg.clone());
                walk(body, scope, notfree, out);
                notfree.truncate(notfree.len() - 2);
            }
        }
    }
    let mut out = Vec::new();
    walk(m, scope, &mut Vec::new(), &mut out);
    out
}

/// The environment tuple `(rho(x1), ..., rho(xn))`.
pub fn mapenv(fvs: &[Name], rho: &VarMap) -> Result<TgtTerm, CcError> {
    let items = fvs
        .iter()
        .map(|x| {
            rho.get(x)
                .cloned()
                .ok_or_else(|| CcError::UnmappedVariable(x.clone()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(TgtTerm::tuple(items))
}

/// Maps each `xi` to the `i`-th projection of `env`.
pub fn mapvar(fvs: &[Name], env: &Name) -> VarMap {
    VarMap {
        entries: fvs
            .iter()
            .enumerate()
            .map(|(i, x)| (x.clone(), TgtTerm::proj(i + 1, TgtTerm::Var(env.clone()))))
            .collect(),
    }
}

/// Closure-converts `m` under `rho`. `scope` types every variable that may
/// occur free in `m`.
pub fn cc(rho: &VarMap, scope: &SrcCtx, m: &SrcTerm) -> Result<TgtTerm, CcError> {
    if let Some(x) = m.free_vars().into_iter().find(|x| !scope.contains(x)) {
        return Err(CcError::ScopeViolation(x));
    }
    let mut scope = scope.clone();
    convert(rho, &mut scope, m)
}

/// Converts a closed program.
pub fn cc_program(m: &SrcTerm) -> Result<TgtTerm, CcError> {
    cc(&VarMap::new(), &SrcCtx::new(), m)
}

fn convert(rho: &VarMap, scope: &mut SrcCtx, m: &SrcTerm) -> Result<TgtTerm, CcError> {
    let mut go = |m: &SrcTerm| convert(rho, scope, m);
    Ok(match m {
        SrcTerm::Num(n) => TgtTerm::Num(n.clone()),
        SrcTerm::Unit => TgtTerm::Unit,
        SrcTerm::Var(x) => rho
            .get(x)
            .cloned()
            .ok_or_else(|| CcError::UnmappedVariable(x.clone()))?,
        SrcTerm::Pred(a) => TgtTerm::pred(go(a)?),
        SrcTerm::Fst(a) => TgtTerm::fst(go(a)?),
        SrcTerm::Snd(a) => TgtTerm::snd(go(a)?),
        SrcTerm::Plus(a, b) => TgtTerm::plus(go(a)?, go(b)?),
        SrcTerm::Pair(a, b) => TgtTerm::pair(go(a)?, go(b)?),
        SrcTerm::Ifz(c, z, s) => TgtTerm::ifz(go(c)?, go(z)?, go(s)?),
        SrcTerm::Let(a, x, body) => {
            let a2 = go(a)?;
            let ty = type_of_src(scope, a)?;
            let y = x.refresh();
            let mut rho2 = rho.clone();
            rho2.insert(x.clone(), TgtTerm::Var(y.clone()))?;
            scope.push(x.clone(), ty);
            let body2 = convert(&rho2, scope, body);
            scope.pop();
            TgtTerm::let_(y, a2, body2?)
        }
        SrcTerm::App(f, a) => {
            let f2 = go(f)?;
            let a2 = go(a)?;
            cc_app(f2, a2)
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
                _ => {
                    return Err(type_of_src(scope, m)
                        .expect_err("ill-formed fix annotation")
                        .into())
                }
            };
            let fvs = fvars(m, &scope.names());
            let env = mapenv(&fvs, rho)?;
            let env_ty = TgtType::tuple(
                fvs.iter()
                    .map(|x| translate_type(scope.lookup(x).expect("fvars are in scope"))),
            );
            let arg_t = translate_type(arg_ty);
            let res_t = translate_type(&res_ty);
            let p = Name::fresh("p");
            let g = fun.refresh();
            let y = arg.refresh();
            let xe = Name::fresh("e");

            let mut rho2 = VarMap::new();
            rho2.insert(arg.clone(), TgtTerm::Var(y.clone()))?;
            rho2.insert(fun.clone(), TgtTerm::Var(g.clone()))?;
            for (x, proj) in mapvar(&fvs, &xe).entries {
                rho2.insert(x, proj)?;
            }
            let mut scope2: SrcCtx = fvs
                .iter()
                .map(|x| {
                    (
                        x.clone(),
                        scope.lookup(x).cloned().expect("fvars are in scope"),
                    )
                })
                .collect();
            scope2.push(fun.clone(), fun_ty.clone());
            scope2.push(arg.clone(), arg_ty.clone());
            let body2 = convert(&rho2, &mut scope2, body)?;

            let p_ty = TgtType::prod(
                TgtType::arr(arg_t.clone(), res_t),
                TgtType::prod(arg_t, env_ty),
            );
            let pv = || TgtTerm::Var(p.clone());
            let code = TgtTerm::abs(
                p.clone(),
                p_ty,
                TgtTerm::let_(
                    g,
                    TgtTerm::fst(pv()),
                    TgtTerm::let_(
                        y,
                        TgtTerm::fst(TgtTerm::snd(pv())),
                        TgtTerm::let_(xe, TgtTerm::snd(TgtTerm::snd(pv())), body2),
                    ),
                ),
            );
            TgtTerm::clos(code, env)
        }
    })
}

/// The converted application `let g = f in open g (xf xe) (xf (g, (a, xe)))`.
pub fn cc_app(f: TgtTerm, a: TgtTerm) -> TgtTerm {
    let g = Name::fresh("g");
    let xf = Name::fresh("xf");
    let xe = Name::fresh("xe");
    TgtTerm::let_(
        g.clone(),
        f,
        TgtTerm::open(
            TgtTerm::Var(g.clone()),
            xf.clone(),
            xe.clone(),
            TgtTerm::app(
                TgtTerm::Var(xf),
                TgtTerm::pair(TgtTerm::Var(g), TgtTerm::pair(a, TgtTerm::Var(xe))),
            ),
        ),
    )
}

/// Every `clos` node of `m` has closed code.
pub fn closures_are_closed(m: &TgtTerm) -> bool {
    let mut ok = true;
    visit_tgt(m, &mut |t| {
        if let TgtTerm::Clos(code, _) = t {
            ok &= code.is_closed();
        }
    });
    ok
}

pub(crate) fn visit_tgt(m: &TgtTerm, f: &mut impl FnMut(&TgtTerm)) {
    f(m);
    match m {
        TgtTerm::Num(_) | TgtTerm::Unit | TgtTerm::Var(_) => {}
        TgtTerm::Pred(a) | TgtTerm::Fst(a) | TgtTerm::Snd(a) => visit_tgt(a, f),
        TgtTerm::Abs { body: a, .. } => visit_tgt(a, f),
        TgtTerm::Plus(a, b)
        | TgtTerm::Pair(a, b)
        | TgtTerm::App(a, b)
        | TgtTerm::Clos(a, b)
        | TgtTerm::Let(a, _, b)
        | TgtTerm::Open {
            scrut: a, body: b, ..
        } => {
            visit_tgt(a, f);
            visit_tgt(b, f);
        }
        TgtTerm::Ifz(a, b, c) => {
            visit_tgt(a, f);
            visit_tgt(b, f);
            visit_tgt(c, f);
        }
    }
}

pub(crate) fn visit_src(m: &SrcTerm, f: &mut impl FnMut(&SrcTerm)) {
    f(m);
    match m {
        SrcTerm::Num(_) | SrcTerm::Unit | SrcTerm::Var(_) => {}
        SrcTerm::Pred(a) | SrcTerm::Fst(a) | SrcTerm::Snd(a) => visit_src(a, f),
        SrcTerm::Fix { body: a, .. } => visit_src(a, f),
        SrcTerm::Plus(a, b) | SrcTerm::Pair(a, b) | SrcTerm::App(a, b) | SrcTerm::Let(a, _, b) => {
            visit_src(a, f);
            visit_src(b, f);
        }
        SrcTerm::Ifz(a, b, c) => {
            visit_src(a, f);
            visit_src(b, f);
            visit_src(c, f);
        }
    }
}

/// Names bound anywhere in a source term; used to check the unique-binder
/// precondition of [`cc`].
pub fn binders_are_unique(m: &SrcTerm) -> bool {
    fn walk(m: &SrcTerm, seen: &mut HashSet<Name>) -> bool {
        match m {
            SrcTerm::Num(_) | SrcTerm::Unit | SrcTerm::Var(_) => true,
            SrcTerm::Pred(a) | SrcTerm::Fst(a) | SrcTerm::Snd(a) => walk(a, seen),
            SrcTerm::Plus(a, b) | SrcTerm::Pair(a, b) | SrcTerm::App(a, b) => {
                walk(a, seen) && walk(b, seen)
            }
            SrcTerm::Ifz(a, b, c) => walk(a, seen) && walk(b, seen) && walk(c, seen),
            SrcTerm::Let(a, x, b) => walk(a, seen) && seen.insert(x.clone()) && walk(b, seen),
            SrcTerm::Fix { fun, arg, body, .. } => {
                seen.insert(fun.clone()) && seen.insert(arg.clone()) && walk(body, seen)
            }
        }
    }
    walk(m, &mut HashSet::new())
}
