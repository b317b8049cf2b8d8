use num_bigint::BigUint;
use num_traits::Zero;

use crate::syntax::{SrcTerm, Syntax};
use crate::typing::{type_of_src, SrcCtx};

fn magnitude(m: &SrcTerm) -> BigUint {
    let mut total = BigUint::zero();
    crate::cc::visit_src(m, &mut |t| {
        if let SrcTerm::Num(n) = t {
            total += n;
        }
    });
    total
}

fn smaller(a: &SrcTerm, b: &SrcTerm) -> bool {
    (a.size(), magnitude(a)) < (b.size(), magnitude(b))
}

/// One-step reductions of `m`: some subterm replaced by one of its
/// descendants or by `0`, or a numeral made smaller. Candidates need not be
/// well typed.
pub fn shrink_candidates(m: &SrcTerm) -> Vec<SrcTerm> {
    let mut out = Vec::new();
    match m {
        SrcTerm::Num(n) => {
            if !n.is_zero() {
                out.push(SrcTerm::num(0));
                let half = n / 2u32;
                if !half.is_zero() {
                    out.push(SrcTerm::Num(half));
                }
                out.push(SrcTerm::Num(n - 1u32));
            }
        }
        _ => out.push(SrcTerm::num(0)),
    }
    let rebuild: Vec<SrcTerm> = match m {
        SrcTerm::Num(_) | SrcTerm::Unit | SrcTerm::Var(_) => Vec::new(),
        SrcTerm::Pred(a) => shrink_candidates(a)
            .into_iter()
            .map(SrcTerm::pred)
            .collect(),
        SrcTerm::Fst(a) => shrink_candidates(a).into_iter().map(SrcTerm::fst).collect(),
        SrcTerm::Snd(a) => shrink_candidates(a).into_iter().map(SrcTerm::snd).collect(),
        SrcTerm::Plus(a, b) => pairwise(a, b, SrcTerm::plus),
        SrcTerm::Pair(a, b) => pairwise(a, b, SrcTerm::pair),
        SrcTerm::App(a, b) => pairwise(a, b, SrcTerm::app),
        SrcTerm::Let(a, x, b) => pairwise(a, b, |a, b| SrcTerm::let_(x.clone(), a, b)),
        SrcTerm::Ifz(a, b, c) => {
            let mut v: Vec<SrcTerm> = shrink_candidates(a)
                .into_iter()
                .map(|a| SrcTerm::ifz(a, (**b).clone(), (**c).clone()))
                .collect();
            v.extend(
                shrink_candidates(b)
                    .into_iter()
                    .map(|b| SrcTerm::ifz((**a).clone(), b, (**c).clone())),
            );
            v.extend(
                shrink_candidates(c)
                    .into_iter()
                    .map(|c| SrcTerm::ifz((**a).clone(), (**b).clone(), c)),
            );
            v
        }
        SrcTerm::Fix {
            fun_ty,
            arg_ty,
            fun,
            arg,
            body,
        } => shrink_candidates(body)
            .into_iter()
            .map(|body| SrcTerm::Fix {
                fun_ty: fun_ty.clone(),
                arg_ty: arg_ty.clone(),
                fun: fun.clone(),
                arg: arg.clone(),
                body: Box::new(body),
            })
            .collect(),
    };
    let mut below = Vec::new();
    crate::cc::visit_src(m, &mut |t| below.push(t.clone()));
    below.remove(0);
    below.sort_by_key(|t| t.size());
    out.extend(below);
    out.extend(rebuild);
    out
}

fn pairwise(a: &SrcTerm, b: &SrcTerm, f: impl Fn(SrcTerm, SrcTerm) -> SrcTerm) -> Vec<SrcTerm> {
    let mut v: Vec<SrcTerm> = shrink_candidates(a)
        .into_iter()
        .map(|a| f(a, b.clone()))
        .collect();
    v.extend(shrink_candidates(b).into_iter().map(|b| f(a.clone(), b)));
    v
}

/// Greedily reduces a failing closed term while it stays closed, keeps its
/// type, keeps failing and gets strictly smaller.
pub fn shrink(m: &SrcTerm, fails: impl Fn(&SrcTerm) -> bool) -> SrcTerm {
    let ctx = SrcCtx::new();
    let Ok(ty) = type_of_src(&ctx, m) else {
        return m.clone();
    };
    let mut cur = m.clone();
    'outer: loop {
        for c in shrink_candidates(&cur) {
            if smaller(&c, &cur)
                && c.is_closed()
                && type_of_src(&ctx, &c).as_ref() == Ok(&ty)
                && fails(&c)
            {
                cur = c;
                continue 'outer;
            }
        }
        return cur;
    }
}
