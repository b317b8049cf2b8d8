//! Bounded step-indexed logical relations.
//!
//! `sim` relates closed terms and `equiv` relates closed values, both at a
//! type and a step index. Quantifiers over related argument values are
//! replaced by a finite sample: small synthesized values of the argument
//! type plus the pairs in [`EquivCfg::corpus`]. A [`Verdict::Related`] at an
//! arrow type therefore means that no counterexample was found.
//!
//! At index 0 an arrow-type pair is related when it has the right shape:
//! a closed `fix` against a closed closure over an abstraction with a value
//! environment.

use serde::Serialize;
use thiserror::Error;

use crate::cc::cc_program;
use crate::dynamics::{eval_src, eval_tgt, EvalResult};
use crate::frontend::{parse_src, print_src, print_tgt};
use crate::name::Name;
use crate::syntax::{SrcTerm, SrcType, Subst, Syntax, TgtTerm, TgtType, ValueSubst};
use crate::typing::{snippet, translate_type, SrcCtx};

/// Step index.
pub type RelIndex = u64;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Related,
    /// `witness` runs from the outermost check to the failing one.
    Unrelated {
        witness: Vec<String>,
    },
    /// A budget ran out before the check could be decided.
    Unknown {
        reason: String,
    },
}

impl Verdict {
    fn unrelated(why: impl Into<String>) -> Self {
        Verdict::Unrelated {
            witness: vec![why.into()],
        }
    }

    fn unknown(why: impl Into<String>) -> Self {
        Verdict::Unknown { reason: why.into() }
    }

    pub fn is_related(&self) -> bool {
        matches!(self, Verdict::Related)
    }

    pub fn is_unrelated(&self) -> bool {
        matches!(self, Verdict::Unrelated { .. })
    }

    /// Conjunction: a counterexample wins over an unknown, which wins over
    /// related.
    pub fn and(self, other: Verdict) -> Verdict {
        match (self, other) {
            (v @ Verdict::Unrelated { .. }, _) | (_, v @ Verdict::Unrelated { .. }) => v,
            (v @ Verdict::Unknown { .. }, _) | (_, v @ Verdict::Unknown { .. }) => v,
            _ => Verdict::Related,
        }
    }

    fn context(self, line: impl FnOnce() -> String) -> Verdict {
        match self {
            Verdict::Unrelated { mut witness } => {
                witness.insert(0, line());
                Verdict::Unrelated { witness }
            }
            v => v,
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::Related => write!(f, "related"),
            Verdict::Unrelated { witness } => {
                write!(f, "unrelated")?;
                for line in witness {
                    write!(f, "\n  {line}")?;
                }
                Ok(())
            }
            Verdict::Unknown { reason } => write!(f, "unknown: {reason}"),
        }
    }
}

/// A source value, a target value and the source type they are expected to
/// be related at.
#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub src: SrcTerm,
    pub tgt: TgtTerm,
    pub ty: SrcType,
}

impl CorpusEntry {
    /// Pairs a closed source value with its closure conversion.
    pub fn converted(src: SrcTerm, ty: SrcType) -> Self {
        let tgt = cc_program(&src).expect("corpus values are closed and well typed");
        CorpusEntry { src, tgt, ty }
    }
}

#[derive(Clone, Debug)]
pub struct EquivCfg {
    /// Step budget for evaluating target terms. Must be positive.
    pub fuel: u64,
    /// Candidates drawn per universally quantified value.
    pub samples: usize,
    pub corpus: Vec<CorpusEntry>,
}

impl Default for EquivCfg {
    fn default() -> Self {
        EquivCfg {
            fuel: 20_000,
            samples: 4,
            corpus: default_corpus(),
        }
    }
}

/// Functions paired with their closure conversions.
pub fn default_corpus() -> Vec<CorpusEntry> {
    let nat_nat = SrcType::arr(SrcType::Nat, SrcType::Nat);
    let unary = [
        "(fix (f : (-> nat nat)) (x : nat) x)",
        "(fix (f : (-> nat nat)) (x : nat) (plus x 1))",
        "(fix (f : (-> nat nat)) (x : nat) (plus x x))",
        "(fix (f : (-> nat nat)) (x : nat) (ifz x 1 0))",
        "(fix (f : (-> nat nat)) (n : nat) (ifz n 0 (plus n (f (pred n)))))",
        "(let ((k 3)) (fix (f : (-> nat nat)) (x : nat) (plus x k)))",
    ];
    let higher = [
        "(fix (h : (-> (-> nat nat) nat)) (g : (-> nat nat)) (g 3))",
        "(fix (h : (-> (-> nat nat) nat)) (g : (-> nat nat)) (plus (g 0) (g 1)))",
    ];
    let mut out = Vec::new();
    for text in unary {
        out.push(corpus_entry(text, &nat_nat));
    }
    let ty = SrcType::arr(nat_nat.clone(), SrcType::Nat);
    for text in higher {
        out.push(corpus_entry(text, &ty));
    }
    out
}

fn corpus_entry(text: &str, ty: &SrcType) -> CorpusEntry {
    let m = parse_src(text).expect("corpus text parses");
    // values under a `let` are produced by running the source and its image
    let src = eval_src(&m, 1000)
        .value()
        .cloned()
        .expect("corpus term terminates");
    let tgt = eval_tgt(&cc_program(&m).expect("corpus term converts"), 1000)
        .value()
        .cloned()
        .expect("converted corpus term terminates");
    CorpusEntry {
        src,
        tgt,
        ty: ty.clone(),
    }
}

/// Small closed source values of `ty`; functions are constant.
fn synth_src(ty: &SrcType, n: usize) -> Vec<SrcTerm> {
    match ty {
        SrcType::Nat => [0u64, 1, 2, 5, 13]
            .iter()
            .take(n.max(1))
            .map(|&i| SrcTerm::num(i))
            .collect(),
        SrcType::Unit => vec![SrcTerm::Unit],
        SrcType::Prod(a, b) => {
            let xs = synth_src(a, n);
            let ys = synth_src(b, n);
            let len = xs.len().max(ys.len()).min(n.max(1));
            (0..len)
                .map(|i| SrcTerm::pair(xs[i % xs.len()].clone(), ys[i % ys.len()].clone()))
                .collect()
        }
        SrcType::Arr(a, b) => synth_src(b, n)
            .into_iter()
            .map(|v| {
                SrcTerm::fix(
                    Name::fresh("f"),
                    Name::fresh("x"),
                    a.as_ref().clone(),
                    b.as_ref().clone(),
                    v,
                )
            })
            .collect(),
    }
}

/// Related candidate pairs at `ty`: corpus entries first, then synthesized
/// values with their conversions.
fn candidates(ty: &SrcType, cfg: &EquivCfg) -> Vec<(SrcTerm, TgtTerm)> {
    let mut out: Vec<(SrcTerm, TgtTerm)> = cfg
        .corpus
        .iter()
        .filter(|e| &e.ty == ty)
        .map(|e| (e.src.clone(), e.tgt.clone()))
        .collect();
    for v in synth_src(ty, cfg.samples) {
        let v2 = cc_program(&v).expect("synthesized values are closed and well typed");
        out.push((v, v2));
    }
    out.truncate(cfg.samples.max(1));
    out
}

fn show_src(m: &SrcTerm) -> String {
    snippet(print_src(m))
}

fn show_tgt(m: &TgtTerm) -> String {
    snippet(print_tgt(m))
}

/// `M ~T_k M'`: if `M` reaches a value `V` in `j <= k` steps then `M'`
/// evaluates to some `V'` with `V ≈T_{k-j} V'`.
pub fn sim_check(ty: &SrcType, k: RelIndex, m: &SrcTerm, m2: &TgtTerm, cfg: &EquivCfg) -> Verdict {
    if let Some(x) = m.free_vars().first() {
        return Verdict::unrelated(format!("source term is open in `{x}`"));
    }
    if let Some(x) = m2.free_vars().first() {
        return Verdict::unrelated(format!("target term is open in `{x}`"));
    }
    let (v, j) = match eval_src(m, k) {
        EvalResult::Value { value, steps } => (value, steps),
        _ => return Verdict::Related,
    };
    match eval_tgt(m2, cfg.fuel) {
        EvalResult::Value { value, .. } => equiv_check(ty, k - j, &v, &value, cfg)
            .context(|| format!("source reaches {} in {j} steps", show_src(&v))),
        EvalResult::Timeout { fuel } => Verdict::unknown(format!(
            "target {} did not finish in {fuel} steps",
            show_tgt(m2)
        )),
        EvalResult::Stuck { term } => Verdict::unrelated(format!(
            "source reaches {} but target is stuck at {}",
            show_src(&v),
            show_tgt(&term)
        )),
    }
}

/// `V ≈T_k V'`.
pub fn equiv_check(
    ty: &SrcType,
    k: RelIndex,
    v: &SrcTerm,
    v2: &TgtTerm,
    cfg: &EquivCfg,
) -> Verdict {
    if !v.is_value() || !v2.is_value() {
        return Verdict::unrelated(format!(
            "not a pair of values: {} and {}",
            show_src(v),
            show_tgt(v2)
        ));
    }
    match (ty, v, v2) {
        (SrcType::Nat, SrcTerm::Num(a), TgtTerm::Num(b)) => {
            if a == b {
                Verdict::Related
            } else {
                Verdict::unrelated(format!("{a} differs from {b}"))
            }
        }
        (SrcType::Unit, SrcTerm::Unit, TgtTerm::Unit) => Verdict::Related,
        (SrcType::Prod(t1, t2), SrcTerm::Pair(a, b), TgtTerm::Pair(a2, b2)) => {
            let first = equiv_check(t1, k, a, a2, cfg).context(|| "in the first component".into());
            if first.is_unrelated() {
                return first;
            }
            first.and(equiv_check(t2, k, b, b2, cfg).context(|| "in the second component".into()))
        }
        (SrcType::Arr(t1, t2), SrcTerm::Fix { .. }, TgtTerm::Clos(..)) => {
            equiv_arrow(t1, t2, k, v, v2, cfg)
        }
        _ => Verdict::unrelated(format!(
            "shape mismatch at {ty}: {} against {}",
            show_src(v),
            show_tgt(v2)
        )),
    }
}

fn equiv_arrow(
    t1: &SrcType,
    t2: &SrcType,
    k: RelIndex,
    v: &SrcTerm,
    v2: &TgtTerm,
    cfg: &EquivCfg,
) -> Verdict {
    let SrcTerm::Fix { fun, arg, body, .. } = v else {
        unreachable!()
    };
    let TgtTerm::Clos(code, env) = v2 else {
        unreachable!()
    };
    let TgtTerm::Abs {
        param, body: body2, ..
    } = code.as_ref()
    else {
        return Verdict::unrelated(format!(
            "closure code {} is not an abstraction",
            show_tgt(code)
        ));
    };
    if !env.is_value() || !v.is_closed() || !v2.is_closed() {
        return Verdict::unrelated("function or closure is not a closed value");
    }
    if k == 0 {
        return Verdict::Related;
    }
    let kk = k - 1;
    let below = equiv_arrow(t1, t2, kk, v, v2, cfg);
    if below.is_unrelated() {
        return below;
    }
    let arr = SrcType::arr(t1.clone(), t2.clone());
    let mut selves = vec![(v.clone(), v2.clone())];
    selves.extend(candidates(&arr, cfg));
    selves.truncate(cfg.samples.max(1));

    let mut verdict = below;
    let mut exercised = false;
    for (a, a2) in candidates(t1, cfg) {
        for (g, g2) in &selves {
            let lhs = body.subst(
                &Subst::new()
                    .with(fun.clone(), g.clone())
                    .with(arg.clone(), a.clone()),
            );
            let rhs = body2.subst(&Subst::single(
                param.clone(),
                TgtTerm::pair(g2.clone(), TgtTerm::pair(a2.clone(), env.as_ref().clone())),
            ));
            exercised = true;
            verdict = verdict.and(sim_check(t2, kk, &lhs, &rhs, cfg).context(|| {
                format!(
                    "applying {} and {} to {} at index {kk}",
                    show_src(v),
                    show_tgt(v2),
                    show_src(&a)
                )
            }));
            if verdict.is_unrelated() {
                return verdict;
            }
        }
    }
    if !exercised {
        return verdict.and(Verdict::unknown(format!(
            "no sample arguments of type {t1}"
        )));
    }
    verdict
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum RelError {
    #[error("`{0}` is in the context but not in the source substitution")]
    Unmapped(Name),
    #[error("{direct} direct target values for a context of {ctx} variables")]
    Arity { direct: usize, ctx: usize },
}

/// Equivalence of a source substitution with a target substitution whose
/// entries for the most recent `direct.len()` context variables are given
/// directly (in context order) and whose remaining entries are packed, in
/// context order, into the unit-terminated tuple `env`.
pub fn subst_equiv_check(
    gamma: &SrcCtx,
    k: RelIndex,
    delta: &ValueSubst<SrcTerm>,
    direct: &[TgtTerm],
    env: &TgtTerm,
    cfg: &EquivCfg,
) -> Result<Verdict, RelError> {
    let entries: Vec<&(Name, SrcType)> = gamma.iter().collect();
    if direct.len() > entries.len() {
        return Err(RelError::Arity {
            direct: direct.len(),
            ctx: entries.len(),
        });
    }
    let source = |x: &Name| delta.get(x).ok_or_else(|| RelError::Unmapped(x.clone()));
    let split = entries.len() - direct.len();
    let (packed, unpacked) = entries.split_at(split);

    let mut verdict = Verdict::Related;
    for ((x, t), v2) in unpacked.iter().zip(direct) {
        verdict =
            verdict.and(equiv_check(t, k, source(x)?, v2, cfg).context(|| format!("at `{x}`")));
    }
    let mut rest = env;
    for (x, t) in packed {
        let TgtTerm::Pair(v2, tail) = rest else {
            return Ok(verdict.and(Verdict::unrelated(format!(
                "environment ends before `{x}`: {}",
                show_tgt(rest)
            ))));
        };
        verdict = verdict.and(
            equiv_check(t, k, source(x)?, v2, cfg)
                .context(|| format!("at environment entry `{x}`")),
        );
        rest = tail;
    }
    if *rest != TgtTerm::Unit {
        verdict = verdict.and(Verdict::unrelated(format!(
            "environment has extra entries {}",
            show_tgt(rest)
        )));
    }
    Ok(verdict)
}

/// Small closed target values of `ty`; functions are constant.
fn synth_tgt(ty: &TgtType, n: usize) -> Vec<TgtTerm> {
    match ty {
        TgtType::Nat => [0u64, 1, 2, 5, 13]
            .iter()
            .take(n.max(1))
            .map(|&i| TgtTerm::num(i))
            .collect(),
        TgtType::Unit => vec![TgtTerm::Unit],
        TgtType::Prod(a, b) => {
            let xs = synth_tgt(a, n);
            let ys = synth_tgt(b, n);
            if xs.is_empty() || ys.is_empty() {
                return Vec::new();
            }
            let len = xs.len().max(ys.len()).min(n.max(1));
            (0..len)
                .map(|i| TgtTerm::pair(xs[i % xs.len()].clone(), ys[i % ys.len()].clone()))
                .collect()
        }
        TgtType::Code(a, b) => synth_tgt(b, n)
            .into_iter()
            .map(|v| TgtTerm::abs(Name::fresh("x"), a.as_ref().clone(), v))
            .collect(),
        TgtType::Arr(a, b) => {
            let p_ty = TgtType::prod(ty.clone(), TgtType::prod(a.as_ref().clone(), TgtType::Unit));
            synth_tgt(b, n)
                .into_iter()
                .map(|v| {
                    TgtTerm::clos(
                        TgtTerm::abs(Name::fresh("p"), p_ty.clone(), v),
                        TgtTerm::Unit,
                    )
                })
                .collect()
        }
        TgtType::Rigid(_) => Vec::new(),
    }
}

fn tgt_candidates(ty: &TgtType, cfg: &EquivCfg) -> Vec<(TgtTerm, TgtTerm)> {
    let mut out: Vec<(TgtTerm, TgtTerm)> = cfg
        .corpus
        .iter()
        .filter(|e| &translate_type(&e.ty) == ty)
        .map(|e| (e.tgt.clone(), e.tgt.clone()))
        .collect();
    out.extend(
        synth_tgt(ty, cfg.samples)
            .into_iter()
            .map(|v| (v.clone(), v)),
    );
    out.truncate(cfg.samples.max(1));
    out
}

/// Target-to-target simulation `M ~'T_k M'`.
pub fn sim_tgt_check(
    ty: &TgtType,
    k: RelIndex,
    m: &TgtTerm,
    m2: &TgtTerm,
    cfg: &EquivCfg,
) -> Verdict {
    if let Some(x) = m.free_vars().first().or(m2.free_vars().first()) {
        return Verdict::unrelated(format!("term is open in `{x}`"));
    }
    let (v, j) = match eval_tgt(m, k) {
        EvalResult::Value { value, steps } => (value, steps),
        _ => return Verdict::Related,
    };
    match eval_tgt(m2, cfg.fuel) {
        EvalResult::Value { value, .. } => equiv_tgt_check(ty, k - j, &v, &value, cfg)
            .context(|| format!("left side reaches {} in {j} steps", show_tgt(&v))),
        EvalResult::Timeout { fuel } => Verdict::unknown(format!(
            "right side {} did not finish in {fuel} steps",
            show_tgt(m2)
        )),
        EvalResult::Stuck { term } => Verdict::unrelated(format!(
            "left side reaches {} but right side is stuck at {}",
            show_tgt(&v),
            show_tgt(&term)
        )),
    }
}

/// Target-to-target equivalence `V ≈'T_k V'`.
pub fn equiv_tgt_check(
    ty: &TgtType,
    k: RelIndex,
    v: &TgtTerm,
    v2: &TgtTerm,
    cfg: &EquivCfg,
) -> Verdict {
    if !v.is_value() || !v2.is_value() {
        return Verdict::unrelated(format!(
            "not a pair of values: {} and {}",
            show_tgt(v),
            show_tgt(v2)
        ));
    }
    match (ty, v, v2) {
        (TgtType::Nat, TgtTerm::Num(a), TgtTerm::Num(b)) => {
            if a == b {
                Verdict::Related
            } else {
                Verdict::unrelated(format!("{a} differs from {b}"))
            }
        }
        (TgtType::Unit, TgtTerm::Unit, TgtTerm::Unit) => Verdict::Related,
        (TgtType::Prod(t1, t2), TgtTerm::Pair(a, b), TgtTerm::Pair(a2, b2)) => {
            let first =
                equiv_tgt_check(t1, k, a, a2, cfg).context(|| "in the first component".into());
            if first.is_unrelated() {
                return first;
            }
            first.and(
                equiv_tgt_check(t2, k, b, b2, cfg).context(|| "in the second component".into()),
            )
        }
        (TgtType::Code(t1, t2), TgtTerm::Abs { .. }, TgtTerm::Abs { .. }) => {
            equiv_tgt_fn(t1, t2, k, v, v2, cfg, &|v, a, _| instantiate_code(v, a))
        }
        (TgtType::Arr(t1, t2), TgtTerm::Clos(c, e), TgtTerm::Clos(c2, e2)) => {
            if !matches!(c.as_ref(), TgtTerm::Abs { .. })
                || !matches!(c2.as_ref(), TgtTerm::Abs { .. })
            {
                return Verdict::unrelated("closure code is not an abstraction");
            }
            let (n1, n2) = (
                e.tuple_items().map(|i| i.len()),
                e2.tuple_items().map(|i| i.len()),
            );
            if n1 != n2 {
                return Verdict::unrelated(format!(
                    "environments {} and {} differ in arity",
                    show_tgt(e),
                    show_tgt(e2)
                ));
            }
            equiv_tgt_fn(t1, t2, k, v, v2, cfg, &instantiate_closure)
        }
        (TgtType::Rigid(_), _, _) => {
            Verdict::unknown("values of an opaque environment type are not compared")
        }
        _ => Verdict::unrelated(format!(
            "shape mismatch at {ty}: {} against {}",
            show_tgt(v),
            show_tgt(v2)
        )),
    }
}

/// Body of code `abs x M` instantiated at `a`.
fn instantiate_code(v: &TgtTerm, a: &TgtTerm) -> TgtTerm {
    let TgtTerm::Abs { param, body, .. } = v else {
        unreachable!()
    };
    body.subst(&Subst::single(param.clone(), a.clone()))
}

/// Body of closure `clos (abs p M) e` instantiated as `M[(g, (a, e))/p]`.
fn instantiate_closure(v: &TgtTerm, a: &TgtTerm, g: &TgtTerm) -> TgtTerm {
    let TgtTerm::Clos(code, env) = v else {
        unreachable!()
    };
    let TgtTerm::Abs { param, body, .. } = code.as_ref() else {
        unreachable!()
    };
    body.subst(&Subst::single(
        param.clone(),
        TgtTerm::pair(g.clone(), TgtTerm::pair(a.clone(), env.as_ref().clone())),
    ))
}

type Instantiate = dyn Fn(&TgtTerm, &TgtTerm, &TgtTerm) -> TgtTerm;

fn equiv_tgt_fn(
    t1: &TgtType,
    t2: &TgtType,
    k: RelIndex,
    v: &TgtTerm,
    v2: &TgtTerm,
    cfg: &EquivCfg,
    inst: &Instantiate,
) -> Verdict {
    if !v.is_closed() || !v2.is_closed() {
        return Verdict::unrelated("function is not closed");
    }
    if k == 0 {
        return Verdict::Related;
    }
    let kk = k - 1;
    let below = equiv_tgt_fn(t1, t2, kk, v, v2, cfg, inst);
    if below.is_unrelated() {
        return below;
    }
    let is_closure = matches!(v, TgtTerm::Clos(..));
    let mut selves = vec![(v.clone(), v2.clone())];
    if is_closure {
        selves.extend(tgt_candidates(&TgtType::arr(t1.clone(), t2.clone()), cfg));
        selves.truncate(cfg.samples.max(1));
    }
    let mut verdict = below;
    let mut exercised = false;
    for (a, a2) in tgt_candidates(t1, cfg) {
        for (g, g2) in &selves {
            exercised = true;
            verdict = verdict.and(
                sim_tgt_check(t2, kk, &inst(v, &a, g), &inst(v2, &a2, g2), cfg).context(|| {
                    format!(
                        "applying {} and {} to {} at index {kk}",
                        show_tgt(v),
                        show_tgt(v2),
                        show_tgt(&a)
                    )
                }),
            );
            if verdict.is_unrelated() {
                return verdict;
            }
        }
    }
    if !exercised {
        return verdict.and(Verdict::unknown(format!(
            "no sample arguments of type {t1}"
        )));
    }
    verdict
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parse_tgt;
    use crate::hoist::hoist;

    fn src(text: &str) -> SrcTerm {
        parse_src(text).unwrap()
    }

    fn tgt(text: &str) -> TgtTerm {
        parse_tgt(text).unwrap()
    }

    fn nat_nat() -> SrcType {
        SrcType::arr(SrcType::Nat, SrcType::Nat)
    }

    #[test]
    fn numerals() {
        let cfg = EquivCfg::default();
        assert_eq!(
            sim_check(&SrcType::Nat, 5, &src("2"), &tgt("2"), &cfg),
            Verdict::Related
        );
        assert!(sim_check(&SrcType::Nat, 5, &src("2"), &tgt("3"), &cfg).is_unrelated());
        assert!(sim_check(
            &SrcType::Nat,
            5,
            &src("(plus 1 1)"),
            &tgt("(plus 1 1)"),
            &cfg
        )
        .is_related());
    }

    #[test]
    fn index_zero_is_vacuous_for_non_values() {
        let cfg = EquivCfg::default();
        assert_eq!(
            sim_check(&SrcType::Nat, 0, &src("(plus 1 1)"), &tgt("7"), &cfg),
            Verdict::Related
        );
        assert!(sim_check(&SrcType::Nat, 1, &src("(plus 1 1)"), &tgt("7"), &cfg).is_unrelated());
    }

    #[test]
    fn unit_and_pairs() {
        let cfg = EquivCfg::default();
        assert!(equiv_check(&SrcType::Unit, 9, &SrcTerm::Unit, &TgtTerm::Unit, &cfg).is_related());
        let ty = SrcType::prod(SrcType::Nat, SrcType::Nat);
        match equiv_check(&ty, 2, &src("(pair 1 2)"), &tgt("(pair 1 3)"), &cfg) {
            Verdict::Unrelated { witness } => assert_eq!(witness[0], "in the second component"),
            v => panic!("expected unrelated, got {v:?}"),
        }
    }

    #[test]
    fn identity_against_its_conversion() {
        let cfg = EquivCfg::default();
        let id = src("(fix (f : (-> nat nat)) (x : nat) x)");
        let id2 = cc_program(&id).unwrap();
        for k in 0..=5 {
            assert_eq!(
                equiv_check(&nat_nat(), k, &id, &id2, &cfg),
                Verdict::Related,
                "k = {k}"
            );
        }
    }

    #[test]
    fn wrong_closure_is_found_above_index_zero() {
        let cfg = EquivCfg::default();
        let id = src("(fix (f : (-> nat nat)) (x : nat) x)");
        let succ = cc_program(&src("(fix (f : (-> nat nat)) (x : nat) (plus x 1))")).unwrap();
        assert!(equiv_check(&nat_nat(), 0, &id, &succ, &cfg).is_related());
        // the body needs no steps, so index 1 already sees the numerals
        assert!(equiv_check(&nat_nat(), 1, &id, &succ, &cfg).is_unrelated());
    }

    #[test]
    fn shape_mismatch() {
        let cfg = EquivCfg::default();
        let id = src("(fix (f : (-> nat nat)) (x : nat) x)");
        assert!(equiv_check(&nat_nat(), 0, &id, &tgt("(pair 1 2)"), &cfg).is_unrelated());
        assert!(equiv_check(&SrcType::Nat, 3, &src("1"), &TgtTerm::Unit, &cfg).is_unrelated());
    }

    #[test]
    fn target_divergence_is_unknown() {
        let cfg = EquivCfg {
            fuel: 200,
            ..EquivCfg::default()
        };
        let omega = cc_program(&src("((fix (f : (-> nat nat)) (x : nat) (f x)) 0)")).unwrap();
        assert!(matches!(
            sim_check(&SrcType::Nat, 5, &src("1"), &omega, &cfg),
            Verdict::Unknown { .. }
        ));
    }

    #[test]
    fn recursive_functions_and_their_conversions() {
        let cfg = EquivCfg::default();
        for entry in &cfg.corpus {
            for k in 0..=3 {
                let v = equiv_check(&entry.ty, k, &entry.src, &entry.tgt, &cfg);
                assert!(v.is_related(), "{} at {k}: {v}", print_src(&entry.src));
            }
        }
    }

    #[test]
    fn downward_closed_on_a_counterexample() {
        let cfg = EquivCfg::default();
        let f = src("(fix (f : (-> nat nat)) (x : nat) (ifz x 0 (plus (f (pred x)) 2)))");
        let g = cc_program(&src(
            "(fix (f : (-> nat nat)) (x : nat) (ifz x 0 (plus (f (pred x)) 3)))",
        ))
        .unwrap();
        let verdicts: Vec<bool> = (0..=8)
            .map(|k| equiv_check(&nat_nat(), k, &f, &g, &cfg).is_related())
            .collect();
        let first_bad = verdicts
            .iter()
            .position(|r| !r)
            .expect("difference is observable");
        assert!(first_bad > 0);
        assert!(verdicts[first_bad..].iter().all(|r| !r));
    }

    #[test]
    fn substitutions() {
        let cfg = EquivCfg::default();
        let empty = SrcCtx::new();
        assert_eq!(
            subst_equiv_check(&empty, 3, &Subst::new(), &[], &TgtTerm::Unit, &cfg),
            Ok(Verdict::Related)
        );
        let a = Name::fresh("a");
        let b = Name::fresh("b");
        let gamma: SrcCtx = [(a.clone(), SrcType::Nat), (b.clone(), SrcType::Nat)]
            .into_iter()
            .collect();
        let delta = Subst::new()
            .with(a.clone(), SrcTerm::num(1))
            .with(b.clone(), SrcTerm::num(2));
        assert_eq!(
            subst_equiv_check(
                &gamma,
                3,
                &delta,
                &[TgtTerm::num(2)],
                &tgt("(pair 1 ())"),
                &cfg
            ),
            Ok(Verdict::Related)
        );
        let orders = [
            TgtTerm::tuple([TgtTerm::num(1), TgtTerm::num(2)]),
            TgtTerm::tuple([TgtTerm::num(2), TgtTerm::num(1)]),
        ];
        let related: Vec<bool> = orders
            .iter()
            .map(|env| {
                subst_equiv_check(&gamma, 3, &delta, &[], env, &cfg)
                    .unwrap()
                    .is_related()
            })
            .collect();
        assert_eq!(related, [true, false]);
        assert!(
            subst_equiv_check(&gamma, 3, &delta, &[], &tgt("(pair 1 ())"), &cfg)
                .unwrap()
                .is_unrelated()
        );
        assert_eq!(
            subst_equiv_check(
                &gamma,
                3,
                &delta,
                &[TgtTerm::Unit, TgtTerm::Unit, TgtTerm::Unit],
                &TgtTerm::Unit,
                &cfg
            ),
            Err(RelError::Arity { direct: 3, ctx: 2 })
        );
        let partial = Subst::single(a, SrcTerm::num(1));
        assert_eq!(
            subst_equiv_check(&gamma, 3, &partial, &[], &orders[0], &cfg),
            Err(RelError::Unmapped(b))
        );
    }

    #[test]
    fn target_relations() {
        let cfg = EquivCfg::default();
        assert!(sim_tgt_check(&TgtType::Nat, 3, &tgt("2"), &tgt("2"), &cfg).is_related());
        let code = TgtType::code(TgtType::Nat, TgtType::Nat);
        let id = tgt("(abs (x : nat) x)");
        assert!(
            equiv_tgt_check(&code, 3, &id, &tgt("(abs (y : nat) (plus y 0))"), &cfg).is_related()
        );
        assert!(
            equiv_tgt_check(&code, 3, &id, &tgt("(abs (y : nat) (plus y 1))"), &cfg).is_unrelated()
        );
    }

    #[test]
    fn environment_arity_mismatch() {
        let cfg = EquivCfg::default();
        let ty = TgtType::arr(TgtType::Nat, TgtType::Nat);
        let p = "(p : (* (-> nat nat) (* nat (* nat unit))))";
        let c1 = tgt(&format!("(clos (abs {p} (fst (snd p))) (pair 1 ()))"));
        let c2 = tgt(&format!(
            "(clos (abs {p} (fst (snd p))) (pair 1 (pair 2 ())))"
        ));
        assert!(equiv_tgt_check(&ty, 0, &c1, &c2, &cfg).is_unrelated());
        assert!(equiv_tgt_check(&ty, 3, &c1, &c1, &cfg).is_related());
    }

    #[test]
    fn hoisting_the_running_example() {
        let cfg = EquivCfg::default();
        let m = src(
            "(let ((x 2)) (let ((y 3)) (fix (f : (-> nat nat)) (z : nat) (plus z (plus x y)))))",
        );
        let t = cc_program(&m).unwrap();
        let h = hoist(&t).unwrap().reify();
        let ty = TgtType::arr(TgtType::Nat, TgtType::Nat);
        for k in 0..=3 {
            assert!(sim_tgt_check(&ty, k, &t, &h, &cfg).is_related());
            assert!(sim_check(&nat_nat(), k, &m, &t, &cfg).is_related());
        }
    }

    #[test]
    fn verdicts_serialize() {
        assert_eq!(
            serde_json::to_string(&Verdict::Related).unwrap(),
            r#"{"verdict":"related"}"#
        );
        let v = Verdict::unrelated("1 differs from 2");
        assert_eq!(
            serde_json::to_string(&v).unwrap(),
            r#"{"verdict":"unrelated","witness":["1 differs from 2"]}"#
        );
    }

    #[test]
    fn conjunction() {
        let u = Verdict::unknown("x");
        assert_eq!(Verdict::Related.and(u.clone()), u);
        assert!(u.and(Verdict::unrelated("y")).is_unrelated());
    }
}
