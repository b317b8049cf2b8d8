//! Acceptance gate: runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any fails.

use std::path::PathBuf;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use fcc_core::cc::{cc_app, cc_program, closures_are_closed, fvars};
use fcc_core::cps::{administrative_redexes, cps_program_with_tags};
use fcc_core::dynamics::{eval_src, eval_tgt};
use fcc_core::equivalence::{equiv_check, sim_check, EquivCfg, Verdict};
use fcc_core::frontend::{parse_src, parse_tgt};
use fcc_core::hoist::{hoist, HoistError};
use fcc_core::name::Name;
use fcc_core::testkit::{differential_run, gen_case, gen_open, DiffCfg, GenCfg, Generator, Pass};
use fcc_core::typing::{prune_ctx, translate_type, type_of_src, type_of_tgt, SrcCtx, TgtCtx};
use fcc_core::{SrcTerm, SrcType, Syntax, TgtTerm};

const SEED: u64 = 42;
const CORPUS: u64 = 1000;

type Check = Result<String, String>;

struct Criterion {
    name: &'static str,
    limit: Duration,
    check: fn() -> Check,
}

fn corpus_cfg() -> GenCfg {
    GenCfg {
        seed: SEED,
        ..GenCfg::default()
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

/// Closure conversion of the running example, written out by hand from the
/// conversion rules: the environment is `(x, (y, ()))` and the body reads
/// `x` and `y` as the first and second projections of `e`.
const GOLDEN_CC: &str = "(let ((x 2)) (let ((y 3)) \
    (clos (abs (p : (* (-> nat nat) (* nat (* nat (* nat unit))))) \
      (let ((f (fst p))) (let ((z (fst (snd p)))) (let ((e (snd (snd p)))) \
        (plus z (plus (fst e) (fst (snd e)))))))) \
    (pair x (pair y ())))))";

fn golden_example() -> Check {
    let out = Command::new(env!("CARGO_BIN_EXE_fcc"))
        .arg("cc")
        .arg(fixture("running.fsrc"))
        .output()
        .map_err(|e| format!("cannot run fcc: {e}"))?;
    ensure(out.status.success(), || {
        format!("fcc cc failed: {}", String::from_utf8_lossy(&out.stderr))
    })?;
    let printed = String::from_utf8(out.stdout).map_err(|e| e.to_string())?;
    let target = parse_tgt(&printed).map_err(|e| format!("output does not parse: {e}"))?;
    let golden = parse_tgt(GOLDEN_CC).expect("golden text parses");
    ensure(target.alpha_eq(&golden), || {
        format!("output differs from the expected shape: {printed}")
    })?;

    let src = parse_src(&std::fs::read_to_string(fixture("running.fsrc")).unwrap()).unwrap();
    let applied_src = SrcTerm::app(src, SrcTerm::num(1));
    let applied_tgt = cc_app(target, TgtTerm::num(1));
    let a = eval_src(&applied_src, 1000);
    let b = eval_tgt(&applied_tgt, 1000);
    ensure(a.value() == Some(&SrcTerm::num(6)), || {
        format!("source applied to 1 gives {a:?}")
    })?;
    ensure(b.value() == Some(&TgtTerm::num(6)), || {
        format!("target applied to 1 gives {b:?}")
    })?;
    Ok("fcc cc output matches; both sides give 6 on 1".into())
}

fn differential() -> Check {
    let cfg = DiffCfg {
        gen: corpus_cfg(),
        count: CORPUS,
        ..DiffCfg::default()
    };
    let mut parts = Vec::new();
    for pass in [Pass::Cc, Pass::CcHoist, Pass::Cps] {
        let r = differential_run(pass, &cfg);
        if let Some(c) = r.counterexamples.first() {
            return Err(format!(
                "{pass}: case {} {}: {}",
                c.index, c.reason, c.shrunk
            ));
        }
        ensure(r.agreed == r.terminated, || {
            format!("{pass}: agreed {} of {}", r.agreed, r.terminated)
        })?;
        parts.push(format!("{pass} {}/{}", r.agreed, r.terminated));
    }
    Ok(format!(
        "{CORPUS} programs; agreed/terminated: {}",
        parts.join(", ")
    ))
}

fn type_preservation() -> Check {
    let cfg = corpus_cfg();
    for i in 0..CORPUS {
        let (m, ty) = gen_case(&cfg, i);
        let t = cc_program(&m).map_err(|e| format!("case {i}: {e}"))?;
        let got = type_of_tgt(&TgtCtx::new(), &t).map_err(|e| format!("case {i}: {e}"))?;
        ensure(got == translate_type(&ty), || {
            format!("case {i}: type {got}, expected {ty}")
        })?;
        ensure(closures_are_closed(&t), || {
            format!("case {i}: closure code is open")
        })?;
    }
    Ok(format!(
        "{CORPUS} of {CORPUS} typed at the translated type, all closures closed"
    ))
}

/// Free variables by a direct walk with an explicit bound list, in order of
/// first occurrence.
fn oracle_free(m: &SrcTerm) -> Vec<Name> {
    fn walk(m: &SrcTerm, bound: &mut Vec<Name>, out: &mut Vec<Name>) {
        match m {
            SrcTerm::Var(x) => {
                if !bound.contains(x) && !out.contains(x) {
                    out.push(x.clone());
                }
            }
            SrcTerm::Num(_) | SrcTerm::Unit => {}
            SrcTerm::Pred(a) | SrcTerm::Fst(a) | SrcTerm::Snd(a) => walk(a, bound, out),
            SrcTerm::Plus(a, b) | SrcTerm::Pair(a, b) | SrcTerm::App(a, b) => {
                walk(a, bound, out);
                walk(b, bound, out);
            }
            SrcTerm::Ifz(a, b, c) => {
                walk(a, bound, out);
                walk(b, bound, out);
                walk(c, bound, out);
            }
            SrcTerm::Let(a, x, b) => {
                walk(a, bound, out);
                bound.push(x.clone());
                walk(b, bound, out);
                bound.pop();
            }
            SrcTerm::Fix { fun, arg, body, .. } => {
                bound.push(fun.clone());
                bound.push(arg.clone());
                walk(body, bound, out);
                bound.pop();
                bound.pop();
            }
        }
    }
    let mut out = Vec::new();
    walk(m, &mut Vec::new(), &mut out);
    out
}

fn fvars_oracle() -> Check {
    let cfg = GenCfg {
        seed: SEED,
        target: None,
        ..GenCfg::default()
    };
    for i in 0..1000u64 {
        let (ctx, m, _) = gen_open(&cfg, i);
        // drop every third context variable from the scope
        let scope: Vec<Name> = ctx
            .names()
            .into_iter()
            .enumerate()
            .filter(|(j, _)| !(i as usize + j).is_multiple_of(3))
            .map(|(_, x)| x)
            .collect();
        let expected: Vec<Name> = oracle_free(&m)
            .into_iter()
            .filter(|x| scope.contains(x))
            .collect();
        let got = fvars(&m, &scope);
        ensure(got == expected, || {
            format!("case {i}: fvars {got:?}, oracle {expected:?}")
        })?;
    }
    Ok("1000 of 1000 agree with the oracle".into())
}

fn hoisting() -> Check {
    let cfg = corpus_cfg();
    let mut functions = 0;
    for i in 0..CORPUS {
        let (m, _) = gen_case(&cfg, i);
        let t = cc_program(&m).map_err(|e| format!("case {i}: {e}"))?;
        let p = hoist(&t).map_err(|e| format!("case {i}: {e}"))?;
        for (f, body) in &p.funs {
            ensure(body.free_vars().is_empty(), || {
                format!("case {i}: function {f} is open")
            })?;
        }
        ensure(p.is_well_formed(), || {
            format!("case {i}: ill-formed hoisted program")
        })?;
        functions += p.funs.len();
    }
    let escaping = [
        "(abs (x : nat) (abs (y : nat) x))",
        "(let ((k 1)) (abs (y : nat) k))",
        "(pair 1 (let ((k (pair 1 2))) (abs (y : nat) (plus y (fst k)))))",
        "(abs (x : nat) (pair (abs (y : nat) y) (abs (z : nat) (plus z x))))",
    ];
    for text in escaping {
        let m = parse_tgt(text).unwrap();
        match hoist(&m) {
            Err(HoistError::Dependency { .. }) => {}
            other => {
                return Err(format!(
                    "{text}: expected a dependency error, got {other:?}"
                ))
            }
        }
    }
    Ok(format!(
        "{functions} extracted functions all closed; {} escaping inputs rejected",
        escaping.len()
    ))
}

struct RelStats {
    instances: usize,
}

fn expect_related(what: &str, k: u64, v: Verdict, stats: &mut RelStats) -> Result<(), String> {
    stats.instances += 1;
    match v {
        Verdict::Related => Ok(()),
        v => Err(format!("{what} at k={k}: {v}")),
    }
}

/// A source term of `ty` paired with its closure conversion.
fn sample(seed: u64, index: u64, ty: &SrcType, size: usize) -> (SrcTerm, TgtTerm) {
    let m = Generator::new(seed, index).term(ty, size);
    let t = cc_program(&m).expect("generated terms convert");
    (m, t)
}

fn downward_closed(verdicts: &[Verdict]) -> bool {
    // Related at k implies Related at every j <= k
    verdicts
        .iter()
        .enumerate()
        .all(|(k, v)| !v.is_related() || verdicts[..k].iter().all(Verdict::is_related))
}

fn relations() -> Check {
    let cfg = EquivCfg::default();
    let nat = SrcType::Nat;
    let prod = SrcType::prod(SrcType::Nat, SrcType::Nat);
    let arr = SrcType::arr(SrcType::Nat, SrcType::Nat);
    let mut stats = RelStats { instances: 0 };
    let pairs = 200u64;
    for i in 0..pairs {
        let (m, m2) = sample(SEED, 4 * i, &nat, 12);
        let (n, n2) = sample(SEED, 4 * i + 1, &nat, 12);
        let (p, p2) = sample(SEED, 4 * i + 2, &prod, 12);
        let (f, f2) = sample(SEED, 4 * i + 3, &arr, 12);
        let mut history = Vec::new();
        for k in 0..=5 {
            let base = sim_check(&nat, k, &m, &m2, &cfg);
            history.push(base.clone());
            expect_related(&format!("pair {i}"), k, base, &mut stats)?;
            expect_related(
                "the second operand",
                k,
                sim_check(&nat, k, &n, &n2, &cfg),
                &mut stats,
            )?;
            expect_related(
                "the product",
                k,
                sim_check(&prod, k, &p, &p2, &cfg),
                &mut stats,
            )?;
            expect_related(
                "the function",
                k,
                sim_check(&arr, k, &f, &f2, &cfg),
                &mut stats,
            )?;

            let pred = sim_check(
                &nat,
                k,
                &SrcTerm::pred(m.clone()),
                &TgtTerm::pred(m2.clone()),
                &cfg,
            );
            expect_related("pred", k, pred, &mut stats)?;
            let plus = sim_check(
                &nat,
                k,
                &SrcTerm::plus(m.clone(), n.clone()),
                &TgtTerm::plus(m2.clone(), n2.clone()),
                &cfg,
            );
            expect_related("plus", k, plus, &mut stats)?;
            let fst = sim_check(
                &nat,
                k,
                &SrcTerm::fst(p.clone()),
                &TgtTerm::fst(p2.clone()),
                &cfg,
            );
            expect_related("fst", k, fst, &mut stats)?;
            let snd = sim_check(
                &nat,
                k,
                &SrcTerm::snd(p.clone()),
                &TgtTerm::snd(p2.clone()),
                &cfg,
            );
            expect_related("snd", k, snd, &mut stats)?;
            let pair = sim_check(
                &prod,
                k,
                &SrcTerm::pair(m.clone(), n.clone()),
                &TgtTerm::pair(m2.clone(), n2.clone()),
                &cfg,
            );
            expect_related("pair", k, pair, &mut stats)?;
            let ifz = sim_check(
                &nat,
                k,
                &SrcTerm::ifz(m.clone(), n.clone(), SrcTerm::fst(p.clone())),
                &TgtTerm::ifz(m2.clone(), n2.clone(), TgtTerm::fst(p2.clone())),
                &cfg,
            );
            expect_related("ifz", k, ifz, &mut stats)?;
            let app = sim_check(
                &nat,
                k,
                &SrcTerm::app(f.clone(), m.clone()),
                &cc_app(f2.clone(), m2.clone()),
                &cfg,
            );
            expect_related("application", k, app, &mut stats)?;
        }
        ensure(downward_closed(&history), || {
            format!("pair {i}: not downward closed: {history:?}")
        })?;
    }

    // functions against their conversions
    let mut values = 0;
    for i in 0..60u64 {
        let (f, _) = sample(SEED + 1, i, &arr, 16);
        let Some(v) = eval_src(&f, 500).value().cloned() else {
            continue;
        };
        let v2 = cc_program(&v).expect("values convert");
        let verdicts: Vec<Verdict> = (0..=3)
            .map(|k| equiv_check(&arr, k, &v, &v2, &cfg))
            .collect();
        for (k, verdict) in verdicts.iter().enumerate() {
            expect_related("function value", k as u64, verdict.clone(), &mut stats)?;
        }
        ensure(downward_closed(&verdicts), || {
            format!("function {i}: not downward closed")
        })?;
        values += 1;
    }
    for entry in &cfg.corpus {
        for k in 0..=3 {
            expect_related(
                "corpus entry",
                k,
                equiv_check(&entry.ty, k, &entry.src, &entry.tgt, &cfg),
                &mut stats,
            )?;
        }
    }
    ensure(values >= 30, || {
        format!("only {values} function values terminated")
    })?;
    Ok(format!(
        "{pairs} pairs, {values} function values, {} related instances",
        stats.instances
    ))
}

fn strengthening() -> Check {
    let cfg = GenCfg {
        seed: SEED,
        target: None,
        ..GenCfg::default()
    };
    let mut pruned = 0;
    for i in 0..500u64 {
        let (ctx, m, ty) = gen_open(&cfg, i);
        let small: SrcCtx =
            prune_ctx(&m.free_vars(), &ctx).map_err(|e| format!("case {i}: {e}"))?;
        pruned += ctx.len() - small.len();
        let got = type_of_src(&small, &m).map_err(|e| format!("case {i}: {e}"))?;
        ensure(got == ty, || {
            format!("case {i}: {got} after pruning, expected {ty}")
        })?;
    }
    Ok(format!(
        "500 of 500 still typed; {pruned} unused bindings dropped"
    ))
}

fn cps_scan() -> Check {
    let cfg = corpus_cfg();
    let mut continuations = 0;
    for i in 0..CORPUS {
        let (m, _) = gen_case(&cfg, i);
        let (out, tags) = cps_program_with_tags(&m).map_err(|e| format!("case {i}: {e}"))?;
        continuations += tags.len();
        let n = administrative_redexes(&out, &tags);
        ensure(n == 0, || format!("case {i}: {n} administrative redexes"))?;
    }
    Ok(format!(
        "0 administrative redexes; {continuations} continuations introduced"
    ))
}

fn main() -> ExitCode {
    let secs = Duration::from_secs;
    let criteria = [
        (
            "golden example",
            Duration::from_secs(1),
            golden_example as fn() -> Check,
        ),
        (
            "differential semantics preservation",
            secs(120),
            differential,
        ),
        ("type preservation", secs(60), type_preservation),
        ("fvars oracle", secs(60), fvars_oracle),
        ("hoisting invariant", secs(60), hoisting),
        ("bounded logical relations", secs(120), relations),
        ("strengthening", secs(60), strengthening),
        ("cps administrative redexes", secs(60), cps_scan),
    ]
    .map(|(name, limit, check)| Criterion { name, limit, check });
    let mut failed = 0;
    for (i, Criterion { name, limit, check }) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let took = start.elapsed();
        let result = match result {
            Ok(detail) if took > limit => {
                Err(format!("{detail}; took {took:.2?}, limit {limit:?}"))
            }
            r => r,
        };
        match result {
            Ok(detail) => println!("criterion {}: PASS {name} ({detail}; {took:.2?})", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: {why} ({took:.2?})", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
