use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use super::gen::{gen_case, GenCfg};
use super::shrink::shrink;
use crate::cc::cc_program;
use crate::cps::cps_program;
use crate::dynamics::{eval_src, eval_tgt, EvalResult};
use crate::frontend::print_src;
use crate::hoist::hoist;
use crate::syntax::{SrcTerm, SrcType};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Pass {
    Cc,
    CcHoist,
    Cps,
}

impl fmt::Display for Pass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Pass::Cc => "cc",
            Pass::CcHoist => "cc+hoist",
            Pass::Cps => "cps",
        })
    }
}

impl std::str::FromStr for Pass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "cc" => Ok(Pass::Cc),
            "cc+hoist" | "hoist" => Ok(Pass::CcHoist),
            "cps" => Ok(Pass::Cps),
            _ => Err(format!("unknown pass `{s}` (expected cc, cc+hoist or cps)")),
        }
    }
}

#[derive(Clone, Debug)]
pub struct DiffCfg {
    /// Generation settings; `gen.fuel` bounds source evaluation and the
    /// target type is forced to `nat`.
    pub gen: GenCfg,
    pub count: u64,
    /// Step budget for the transformed program.
    pub tgt_fuel: u64,
}

impl Default for DiffCfg {
    fn default() -> Self {
        DiffCfg {
            gen: GenCfg::default(),
            count: 1000,
            tgt_fuel: 20_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    /// The source program did not finish within its fuel.
    Skipped,
    Agreed,
    Failed(String),
}

fn nat_result<T: fmt::Debug>(
    r: EvalResult<T>,
    as_num: impl Fn(&T) -> Option<String>,
) -> Result<String, String> {
    match r {
        EvalResult::Value { value, .. } => {
            as_num(&value).ok_or_else(|| format!("result is not a numeral: {value:?}"))
        }
        EvalResult::Timeout { fuel } => Err(format!(
            "transformed program did not finish in {fuel} steps"
        )),
        EvalResult::Stuck { term } => Err(format!("transformed program is stuck at {term:?}")),
    }
}

/// Runs one program through `pass` and compares numerals.
pub fn check_case(pass: Pass, m: &SrcTerm, cfg: &DiffCfg) -> Outcome {
    let expected = match eval_src(m, cfg.gen.fuel) {
        EvalResult::Value { value, .. } => match value.as_num() {
            Some(n) => n.to_string(),
            None => return Outcome::Failed("source result is not a numeral".into()),
        },
        _ => return Outcome::Skipped,
    };
    let got = match pass {
        Pass::Cc | Pass::CcHoist => {
            let t = match cc_program(m) {
                Ok(t) => t,
                Err(e) => return Outcome::Failed(format!("closure conversion failed: {e}")),
            };
            let t = if pass == Pass::CcHoist {
                match hoist(&t) {
                    Ok(p) => p.reify(),
                    Err(e) => return Outcome::Failed(format!("hoisting failed: {e}")),
                }
            } else {
                t
            };
            nat_result(eval_tgt(&t, cfg.tgt_fuel), |v| {
                v.as_num().map(|n| n.to_string())
            })
        }
        Pass::Cps => match cps_program(m) {
            Ok(t) => nat_result(eval_src(&t, cfg.tgt_fuel), |v| {
                v.as_num().map(|n| n.to_string())
            }),
            Err(e) => return Outcome::Failed(format!("cps failed: {e}")),
        },
    };
    match got {
        Ok(n) if n == expected => Outcome::Agreed,
        Ok(n) => Outcome::Failed(format!(
            "source gives {expected}, transformed program gives {n}"
        )),
        Err(e) => Outcome::Failed(e),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Counterexample {
    pub index: u64,
    pub reason: String,
    pub program: String,
    pub shrunk: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema: u32,
    pub pass: Pass,
    pub seed: u64,
    pub src_fuel: u64,
    pub tgt_fuel: u64,
    pub total: u64,
    pub terminated: u64,
    pub agreed: u64,
    pub counterexamples: Vec<Counterexample>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.counterexamples.is_empty() && self.agreed == self.terminated
    }
}

/// Generates `cfg.count` programs of type `nat` and checks `pass` on each
/// one that terminates. Failing programs are shrunk.
pub fn differential_run(pass: Pass, cfg: &DiffCfg) -> Report {
    let gen = GenCfg {
        target: Some(SrcType::Nat),
        ..cfg.gen.clone()
    };
    let outcomes: Vec<(u64, SrcTerm, Outcome)> = (0..cfg.count)
        .into_par_iter()
        .map(|i| {
            let (m, _) = gen_case(&gen, i);
            let outcome = check_case(pass, &m, cfg);
            (i, m, outcome)
        })
        .collect();

    let mut report = Report {
        schema: 1,
        pass,
        seed: gen.seed,
        src_fuel: gen.fuel,
        tgt_fuel: cfg.tgt_fuel,
        total: cfg.count,
        terminated: 0,
        agreed: 0,
        counterexamples: Vec::new(),
    };
    for (index, m, outcome) in outcomes {
        match outcome {
            Outcome::Skipped => {}
            Outcome::Agreed => {
                report.terminated += 1;
                report.agreed += 1;
            }
            Outcome::Failed(reason) => {
                report.terminated += 1;
                let small = shrink(&m, |t| {
                    matches!(check_case(pass, t, cfg), Outcome::Failed(_))
                });
                report.counterexamples.push(Counterexample {
                    index,
                    reason,
                    program: print_src(&m),
                    shrunk: print_src(&small),
                });
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parse_src;

    const RUNNING: &str =
        "((let ((x 2)) (let ((y 3)) (fix (f : (-> nat nat)) (z : nat) (plus z (plus x y))))) 1)";

    #[test]
    fn running_example_agrees() {
        let m = parse_src(RUNNING).unwrap();
        for pass in [Pass::Cc, Pass::CcHoist, Pass::Cps] {
            assert_eq!(check_case(pass, &m, &DiffCfg::default()), Outcome::Agreed);
        }
    }

    #[test]
    fn numeral_agrees() {
        assert_eq!(
            check_case(Pass::Cc, &SrcTerm::num(7), &DiffCfg::default()),
            Outcome::Agreed
        );
    }

    #[test]
    fn divergent_program_is_skipped() {
        let m = parse_src("((fix (f : (-> nat nat)) (x : nat) (f x)) 0)").unwrap();
        assert_eq!(
            check_case(Pass::Cps, &m, &DiffCfg::default()),
            Outcome::Skipped
        );
    }

    #[test]
    fn small_runs_agree_and_are_deterministic() {
        let cfg = DiffCfg {
            count: 60,
            ..DiffCfg::default()
        };
        for pass in [Pass::Cc, Pass::CcHoist, Pass::Cps] {
            let a = differential_run(pass, &cfg);
            assert!(a.passed(), "{pass}: {:?}", a.counterexamples);
            assert!(a.terminated > 0);
            let b = differential_run(pass, &cfg);
            assert_eq!(
                serde_json::to_string(&a).unwrap(),
                serde_json::to_string(&b).unwrap()
            );
        }
    }

    #[test]
    fn pass_names() {
        for pass in [Pass::Cc, Pass::CcHoist, Pass::Cps] {
            assert_eq!(pass.to_string().parse::<Pass>(), Ok(pass));
        }
        assert!("cc+cps".parse::<Pass>().is_err());
    }
}
