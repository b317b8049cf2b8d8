//! `fcc`: check, run and transform programs, and run test campaigns.

mod pipeline;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use fcc_core::cc::cc_program;
use fcc_core::cps::cps_program;
use fcc_core::dynamics::{eval_src, eval_tgt, EvalResult};
use fcc_core::equivalence::{sim_check, sim_tgt_check, EquivCfg, Verdict};
use fcc_core::frontend::{
    parse_src, parse_src_type, parse_tgt, parse_tgt_type, print_hoisted, print_src, print_tgt,
};
use fcc_core::hoist::hoist;
use fcc_core::testkit::{differential_run, DiffCfg, GenCfg, Pass};
use fcc_core::typing::{type_of_src, type_of_tgt, SrcCtx, TgtCtx};
use fcc_core::{SrcTerm, TgtTerm};

use pipeline::{Lang, PipelineSpec, Stage};

const RUN_FUEL: u64 = 1_000_000;

#[derive(Parser)]
#[command(
    name = "fcc",
    version,
    about = "Closure conversion, hoisting and CPS for a small typed language"
)]
struct Cli {
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Type-check a program and print its type.
    Check { file: PathBuf },
    /// Evaluate a program and print its value and step count.
    Run {
        file: PathBuf,
        /// Step budget (default: $FCC_FUEL, else 1000000).
        #[arg(long)]
        fuel: Option<u64>,
    },
    /// Closure-convert a source program.
    Cc { file: PathBuf },
    /// Hoist functions to the top level (source input is closure-converted first).
    Hoist { file: PathBuf },
    /// CPS-transform a source program.
    Cps { file: PathBuf },
    /// Apply a comma-separated list of passes.
    Pipeline {
        #[arg(long, value_delimiter = ',', required = true)]
        passes: Vec<Stage>,
        file: PathBuf,
    },
    /// Differential test campaign over generated programs.
    Test {
        /// cc, cc+hoist or cps.
        #[arg(long)]
        pass: Pass,
        #[arg(long, default_value_t = 1000)]
        count: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Source step budget (default: $FCC_FUEL, else 500).
        #[arg(long)]
        fuel: Option<u64>,
        /// Step budget for transformed programs.
        #[arg(long, default_value_t = 20_000)]
        target_fuel: u64,
        #[arg(long, default_value_t = 40)]
        max_size: usize,
        /// Write shrunk counterexamples here as .fsrc files.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Bounded simulation check between two programs at a type and index.
    Relcheck {
        /// Source type, or target type when both programs are .ftgt.
        #[arg(long = "type")]
        ty: String,
        #[arg(long)]
        index: u64,
        left: PathBuf,
        right: PathBuf,
    },
}

/// A failure reported as `fcc: <class>: <message>`.
struct Failure {
    class: &'static str,
    message: String,
    code: u8,
}

impl Failure {
    fn usage(class: &'static str, message: impl ToString) -> Self {
        Failure {
            class,
            message: message.to_string(),
            code: 2,
        }
    }

    fn property(class: &'static str, message: impl ToString) -> Self {
        Failure {
            class,
            message: message.to_string(),
            code: 1,
        }
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.to_string();
            let first = text
                .lines()
                .next()
                .unwrap_or("")
                .trim_start_matches("error: ");
            eprintln!("fcc: usage: {first}");
            for line in text.lines().skip(1) {
                eprintln!("{line}");
            }
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("fcc: {}: {}", f.class, f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> Outcome {
    let json = cli.json;
    match cli.command {
        Command::Check { file } => check(&file, json),
        Command::Run { file, fuel } => {
            run_file(&file, fuel.or_else(env_fuel).unwrap_or(RUN_FUEL), json)
        }
        Command::Cc { file } => {
            transform(PipelineSpec::new(vec![Stage::Cc], file, json).map_err(usage)?)
        }
        Command::Hoist { file } => {
            let stages = match Lang::of_path(&file) {
                Lang::Src => vec![Stage::Cc, Stage::Hoist],
                Lang::Tgt => vec![Stage::Hoist],
            };
            transform(PipelineSpec::new(stages, file, json).map_err(usage)?)
        }
        Command::Cps { file } => {
            transform(PipelineSpec::new(vec![Stage::Cps], file, json).map_err(usage)?)
        }
        Command::Pipeline { passes, file } => {
            transform(PipelineSpec::new(passes, file, json).map_err(usage)?)
        }
        Command::Test {
            pass,
            count,
            seed,
            fuel,
            target_fuel,
            max_size,
            out_dir,
        } => {
            let cfg = DiffCfg {
                gen: GenCfg {
                    seed,
                    max_size,
                    fuel: fuel.or_else(env_fuel).unwrap_or(GenCfg::default().fuel),
                    ..GenCfg::default()
                },
                count,
                tgt_fuel: target_fuel,
            };
            campaign(pass, &cfg, out_dir.as_deref(), json)
        }
        Command::Relcheck {
            ty,
            index,
            left,
            right,
        } => relcheck(&ty, index, &left, &right, json),
    }
}

fn usage(message: String) -> Failure {
    Failure::usage("usage", message)
}

fn env_fuel() -> Option<u64> {
    std::env::var("FCC_FUEL")
        .ok()
        .and_then(|v| v.trim().parse().ok())
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .map(|t| t.replace("\r\n", "\n"))
        .map_err(|e| Failure::usage("io", format!("{}: {e}", path.display())))
}

fn read_src(path: &Path) -> Result<SrcTerm, Failure> {
    parse_src(&read(path)?).map_err(|e| Failure::usage("parse", format!("{}:{e}", path.display())))
}

fn read_tgt(path: &Path) -> Result<TgtTerm, Failure> {
    parse_tgt(&read(path)?).map_err(|e| Failure::usage("parse", format!("{}:{e}", path.display())))
}

fn emit(json: bool, text: impl std::fmt::Display, value: serde_json::Value) {
    if json {
        println!("{value}");
    } else {
        println!("{text}");
    }
}

fn type_error(e: impl ToString) -> Failure {
    Failure::usage("type", e)
}

fn check(file: &Path, json: bool) -> Outcome {
    let ty = match Lang::of_path(file) {
        Lang::Src => type_of_src(&SrcCtx::new(), &read_src(file)?)
            .map_err(type_error)?
            .to_string(),
        Lang::Tgt => type_of_tgt(&TgtCtx::new(), &read_tgt(file)?)
            .map_err(type_error)?
            .to_string(),
    };
    emit(json, &ty, json!({ "schema": 1, "type": ty }));
    Ok(())
}

fn report_eval<T>(r: EvalResult<T>, show: impl Fn(&T) -> String, json: bool) -> Outcome {
    match r {
        EvalResult::Value { value, steps } => {
            let v = show(&value);
            emit(
                json,
                format!("{v}\nsteps: {steps}"),
                json!({ "schema": 1, "outcome": "value", "value": v, "steps": steps }),
            );
            Ok(())
        }
        EvalResult::Timeout { fuel } => {
            if json {
                println!(
                    "{}",
                    json!({ "schema": 1, "outcome": "timeout", "fuel": fuel })
                );
            }
            Err(Failure::property(
                "timeout",
                format!("no value within {fuel} steps"),
            ))
        }
        EvalResult::Stuck { term } => {
            let t = show(&term);
            if json {
                println!("{}", json!({ "schema": 1, "outcome": "stuck", "term": t }));
            }
            Err(Failure::property(
                "stuck",
                format!("evaluation is stuck at {t}"),
            ))
        }
    }
}

fn run_file(file: &Path, fuel: u64, json: bool) -> Outcome {
    match Lang::of_path(file) {
        Lang::Src => {
            let m = read_src(file)?;
            type_of_src(&SrcCtx::new(), &m).map_err(type_error)?;
            report_eval(eval_src(&m, fuel), print_src, json)
        }
        Lang::Tgt => {
            let m = read_tgt(file)?;
            type_of_tgt(&TgtCtx::new(), &m).map_err(type_error)?;
            report_eval(eval_tgt(&m, fuel), print_tgt, json)
        }
    }
}

enum Program {
    Src(SrcTerm),
    Tgt(TgtTerm),
    Hoisted(fcc_core::hoist::HoistedProgram),
}

fn transform(spec: PipelineSpec) -> Outcome {
    let mut prog = match spec.lang() {
        Lang::Src => {
            let m = read_src(&spec.input)?;
            type_of_src(&SrcCtx::new(), &m).map_err(type_error)?;
            Program::Src(m)
        }
        Lang::Tgt => {
            let m = read_tgt(&spec.input)?;
            type_of_tgt(&TgtCtx::new(), &m).map_err(type_error)?;
            Program::Tgt(m)
        }
    };
    for stage in &spec.stages {
        prog = match (stage, prog) {
            (Stage::Cc, Program::Src(m)) => {
                Program::Tgt(cc_program(&m).map_err(|e| Failure::usage("cc", e))?)
            }
            (Stage::Hoist, Program::Tgt(m)) => {
                Program::Hoisted(hoist(&m).map_err(|e| Failure::usage("hoist", e))?)
            }
            (Stage::Cps, Program::Src(m)) => {
                Program::Src(cps_program(&m).map_err(|e| Failure::usage("cps", e))?)
            }
            _ => unreachable!("pipeline was validated"),
        };
    }
    let text = match &prog {
        Program::Src(m) => print_src(m),
        Program::Tgt(m) => print_tgt(m),
        Program::Hoisted(p) => print_hoisted(p),
    };
    let passes: Vec<String> = spec.stages.iter().map(|s| s.to_string()).collect();
    emit(
        spec.json,
        &text,
        json!({ "schema": 1, "passes": passes, "program": text }),
    );
    Ok(())
}

fn campaign(pass: Pass, cfg: &DiffCfg, out_dir: Option<&Path>, json: bool) -> Outcome {
    let report = differential_run(pass, cfg);
    if let Some(dir) = out_dir {
        fs::create_dir_all(dir)
            .map_err(|e| Failure::usage("io", format!("{}: {e}", dir.display())))?;
        for c in &report.counterexamples {
            let path = dir.join(format!("counterexample-{}.fsrc", c.index));
            let text = format!("; {}\n; original: {}\n{}\n", c.reason, c.program, c.shrunk);
            fs::write(&path, text)
                .map_err(|e| Failure::usage("io", format!("{}: {e}", path.display())))?;
        }
    }
    if json {
        println!(
            "{}",
            serde_json::to_string(&report).expect("report serializes")
        );
    } else {
        println!(
            "pass {}: {} programs, {} terminated, {} agreed, {} counterexamples",
            report.pass,
            report.total,
            report.terminated,
            report.agreed,
            report.counterexamples.len()
        );
        for c in &report.counterexamples {
            println!("case {}: {}\n  {}", c.index, c.reason, c.shrunk);
        }
    }
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::property(
            "property",
            format!(
                "{} counterexamples for {}",
                report.counterexamples.len(),
                report.pass
            ),
        ))
    }
}

#[derive(Serialize)]
struct RelReport<'a> {
    schema: u32,
    #[serde(rename = "type")]
    ty: &'a str,
    index: u64,
    #[serde(flatten)]
    verdict: &'a Verdict,
}

fn relcheck(ty: &str, index: u64, left: &Path, right: &Path, json: bool) -> Outcome {
    let cfg = EquivCfg::default();
    let parse_err =
        |e: fcc_core::frontend::SyntaxError| Failure::usage("parse", format!("type: {e}"));
    let verdict = match (Lang::of_path(left), Lang::of_path(right)) {
        (Lang::Src, Lang::Tgt) => {
            let t = parse_src_type(ty).map_err(parse_err)?;
            let m = read_src(left)?;
            let m2 = read_tgt(right)?;
            sim_check(&t, index, &m, &m2, &cfg)
        }
        (Lang::Tgt, Lang::Tgt) => {
            let t = parse_tgt_type(ty).map_err(parse_err)?;
            sim_tgt_check(&t, index, &read_tgt(left)?, &read_tgt(right)?, &cfg)
        }
        _ => {
            return Err(Failure::usage(
                "usage",
                "relcheck takes a .fsrc and a .ftgt file, or two .ftgt files",
            ))
        }
    };
    let report = RelReport {
        schema: 1,
        ty,
        index,
        verdict: &verdict,
    };
    emit(
        json,
        &verdict,
        serde_json::to_value(&report).expect("report serializes"),
    );
    match verdict {
        Verdict::Related => Ok(()),
        Verdict::Unrelated { .. } => {
            Err(Failure::property("unrelated", "programs are not related"))
        }
        Verdict::Unknown { reason } => Err(Failure::property("unknown", reason)),
    }
}
