//! `hrrc`: command-line frontend for hrrc-core.
//!
//! Exit codes: 0 positive verdict, 1 negative verdict, 2 usage or input
//! error, 3 no applicable solver.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use hrrc_core::exhaustive::{exists_strongly_stable, strongly_stable_set, strongly_stable_set_parallel};
use hrrc_core::model::{load_instance, load_matching, save_instance, save_matching};
use hrrc_core::reductions::{parse_dimacs, reduce, to_ppn, CnfFormula, PpnProvenance, ReductionVariant};
use hrrc_core::solvers::{solve_with, Algorithm, DEFAULT_BRUTE_LIMIT};
use hrrc_core::stability::{check, describe_region, BlockingKind};
use hrrc_core::{Assignment, Error, Instance, SolveOutcome};

const OK: u8 = 0;
const NEGATIVE: u8 = 1;
const INPUT_ERROR: u8 = 2;
const UNKNOWN: u8 = 3;

#[derive(Parser)]
#[command(
    name = "hrrc",
    version,
    about = "Strong stability for Hospitals/Residents with regional caps"
)]
struct Cli {
    /// Emit verdicts as JSON documents on stdout.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the parameter class (alpha, beta, gamma, disjointness).
    Classify { instance: PathBuf },
    /// Find a strongly stable matching.
    Solve {
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = AlgorithmArg::Auto)]
        algorithm: AlgorithmArg,
        #[command(flatten)]
        limit: BruteLimit,
        /// Write the matching document here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Report feasibility, blocking pairs and strong blocking pairs.
    Check { instance: PathBuf, matching: PathBuf },
    /// Exhaustive search for strongly stable matchings.
    Brute {
        instance: PathBuf,
        /// List every strongly stable matching instead of the first.
        #[arg(long)]
        all: bool,
        /// Run even above the size limit.
        #[arg(long)]
        force: bool,
        /// Worker threads for --all.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[command(flatten)]
        limit: BruteLimit,
    },
    /// Build the instance of a DIMACS formula under one of the reductions.
    Reduce {
        cnf: PathBuf,
        #[arg(long, value_parser = parse_variant)]
        target: ReductionVariant,
        /// Rewrite the formula into PPN form first (ppn-* targets only).
        #[arg(long)]
        normalize_ppn: bool,
        /// Write the instance here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the occurrence table of a ppn-* reduction here.
        #[arg(long)]
        occurrences: Option<PathBuf>,
    },
    /// Read the assignment off a matching of a reduced instance.
    Decode {
        cnf: PathBuf,
        matching: PathBuf,
        #[arg(long, value_parser = parse_variant)]
        target: ReductionVariant,
        #[arg(long)]
        normalize_ppn: bool,
    },
}

#[derive(Args)]
struct BruteLimit {
    /// Largest |R| + |H| searched exhaustively.
    #[arg(long, env = "HRRC_BRUTE_LIMIT", default_value_t = DEFAULT_BRUTE_LIMIT)]
    brute_limit: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgorithmArg {
    Auto,
    Alg1,
    Alg2,
    Alg3,
    Alg4,
    Alg5,
    Brute,
}

impl From<AlgorithmArg> for Algorithm {
    fn from(a: AlgorithmArg) -> Self {
        match a {
            AlgorithmArg::Auto => Algorithm::Auto,
            AlgorithmArg::Alg1 => Algorithm::Alg1,
            AlgorithmArg::Alg2 => Algorithm::Alg2,
            AlgorithmArg::Alg3 => Algorithm::Alg3,
            AlgorithmArg::Alg4 => Algorithm::Alg4,
            AlgorithmArg::Alg5 => Algorithm::Alg5,
            AlgorithmArg::Brute => Algorithm::Brute,
        }
    }
}

fn parse_variant(s: &str) -> Result<ReductionVariant, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Failure that ends the run with exit code 2.
#[derive(Debug)]
struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

type Run = Result<u8, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn read_instance(path: &Path) -> Result<Instance, Failure> {
    load_instance(&read(path)?).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn read_matching(instance: &Instance, path: &Path) -> Result<Assignment, Failure> {
    let doc = load_matching(&read(path)?).map_err(|e| Failure(format!("{}: {e}", path.display())))?;
    instance
        .assignment_from_doc(&doc)
        .map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn read_cnf(path: &Path) -> Result<CnfFormula, Failure> {
    parse_dimacs(&read(path)?).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn pairs_json(instance: &Instance, m: &Assignment) -> Value {
    serde_json::to_value(instance.assignment_to_doc(m).pairs).expect("pairs serialize")
}

fn emit(json_mode: bool, doc: Value, text: impl FnOnce() -> String) {
    if json_mode {
        println!(
            "{}",
            serde_json::to_string_pretty(&doc).expect("json values serialize")
        );
    } else {
        println!("{}", text());
    }
}

fn classify_cmd(json_mode: bool, path: &Path) -> Run {
    let instance = read_instance(path)?;
    let class = instance.classify();
    emit(json_mode, serde_json::to_value(class)?, || class.to_string());
    Ok(OK)
}

fn outcome_code(outcome: &SolveOutcome) -> u8 {
    match outcome {
        SolveOutcome::Found(_) => OK,
        SolveOutcome::NoneExists => NEGATIVE,
        SolveOutcome::Unknown(_) => UNKNOWN,
    }
}

fn solve_cmd(json_mode: bool, path: &Path, algorithm: Algorithm, limit: usize, out: Option<&Path>) -> Run {
    let instance = read_instance(path)?;
    let outcome = solve_with(&instance, algorithm, limit)?;
    let mut doc = json!({ "outcome": outcome.label(), "algorithm": algorithm });
    match &outcome {
        SolveOutcome::Found(m) => {
            let matching = instance.assignment_to_doc(m);
            if let Some(out) = out {
                write(out, &save_matching(&matching))?;
                emit(json_mode, doc, || "Found".to_string());
            } else if json_mode {
                doc["matching"] = serde_json::to_value(&matching)?;
                emit(true, doc, String::new);
            } else {
                println!("Found");
                println!("{}", save_matching(&matching));
            }
        }
        SolveOutcome::NoneExists => emit(json_mode, doc, || "NoneExists".to_string()),
        SolveOutcome::Unknown(reason) => {
            doc["reason"] = json!(reason);
            emit(json_mode, doc, || format!("Unknown: {reason}"));
        }
    }
    Ok(outcome_code(&outcome))
}

fn check_cmd(json_mode: bool, instance_path: &Path, matching_path: &Path) -> Run {
    let instance = read_instance(instance_path)?;
    let m = read_matching(&instance, matching_path)?;
    let report = check(&instance, &m);
    if let Some(err) = &report.matching_error {
        return Err(Failure(format!("{}: {err}", matching_path.display())));
    }
    let overloaded: Vec<String> = report
        .overloaded
        .iter()
        .map(|&e| describe_region(&instance, e))
        .collect();
    let describe = |kind: BlockingKind| -> Vec<String> {
        report
            .blocking
            .iter()
            .filter(|w| w.kind == kind)
            .map(|w| w.describe(&instance))
            .collect()
    };
    let bps = describe(BlockingKind::Bp);
    let sbps = describe(BlockingKind::Sbp);
    let stable = report.strongly_stable();
    if json_mode {
        let witnesses: Vec<Value> = report
            .blocking
            .iter()
            .map(|w| {
                json!({
                    "resident": instance.resident(w.resident).id,
                    "hospital": instance.hospital(w.hospital).id,
                    "kind": w.kind.to_string(),
                    "description": w.describe(&instance),
                })
            })
            .collect();
        emit(
            true,
            json!({
                "feasible": report.feasible,
                "overloaded_regions": overloaded,
                "blocking_pairs": witnesses,
                "strongly_stable": stable,
            }),
            String::new,
        );
    } else {
        println!("feasible: {}", if report.feasible { "yes" } else { "no" });
        for e in &overloaded {
            println!("overloaded region: {e}");
        }
        println!("blocking pairs tolerated by regional caps: {}", list(&bps));
        println!("strong blocking pairs: {}", list(&sbps));
        println!(
            "{}",
            if stable {
                "strongly stable"
            } else {
                "not strongly stable"
            }
        );
    }
    Ok(if stable { OK } else { NEGATIVE })
}

fn list(items: &[String]) -> String {
    if items.is_empty() {
        "none".to_string()
    } else {
        items.join(", ")
    }
}

fn brute_cmd(json_mode: bool, path: &Path, all: bool, force: bool, jobs: usize, limit: usize) -> Run {
    let instance = read_instance(path)?;
    let size = instance.num_residents() + instance.num_hospitals();
    if size > limit && !force {
        return Err(Failure(format!(
            "instance has {size} agents, above the brute-force limit of {limit}; pass --force to search anyway"
        )));
    }
    if all {
        let set = if jobs > 1 {
            strongly_stable_set_parallel(&instance, jobs)
        } else {
            strongly_stable_set(&instance)
        };
        let docs: Vec<Value> = set.iter().map(|m| pairs_json(&instance, m)).collect();
        emit(
            json_mode,
            json!({ "count": set.len(), "matchings": docs }),
            || {
                let mut lines = vec![format!("{} strongly stable matching(s)", set.len())];
                lines.extend(set.iter().map(|m| instance.display_assignment(m)));
                lines.join("\n")
            },
        );
        return Ok(if set.is_empty() { NEGATIVE } else { OK });
    }
    let outcome = exists_strongly_stable(&instance);
    let mut doc = json!({ "outcome": outcome.label() });
    if let Some(m) = outcome.found() {
        doc["matching"] = pairs_json(&instance, m);
    }
    emit(json_mode, doc, || match outcome.found() {
        Some(m) => format!("Found {}", instance.display_assignment(m)),
        None => outcome.label().to_string(),
    });
    Ok(outcome_code(&outcome))
}

/// The formula handed to the reduction, with the map back to the input
/// variables when it was normalized.
fn prepare(
    formula: CnfFormula,
    target: ReductionVariant,
    normalize: bool,
) -> Result<(CnfFormula, Option<PpnProvenance>), Failure> {
    if !normalize {
        return Ok((formula, None));
    }
    if target == ReductionVariant::OneInThree222 {
        return Err(Failure("--normalize-ppn applies to ppn-* targets only".into()));
    }
    let (g, prov) = to_ppn(&formula)?;
    Ok((g, Some(prov)))
}

fn reduce_cmd(
    json_mode: bool,
    cnf: &Path,
    target: ReductionVariant,
    normalize: bool,
    out: Option<&Path>,
    occurrences: Option<&Path>,
) -> Run {
    let (formula, _) = prepare(read_cnf(cnf)?, target, normalize)?;
    let reduced = reduce(&formula, target)?;
    let text = save_instance(&reduced.instance);
    if let Some(path) = occurrences {
        let table = reduced
            .occurrences
            .as_ref()
            .ok_or_else(|| Failure(format!("{target} has no occurrence table")))?;
        write(path, &table.to_json())?;
    }
    match out {
        Some(path) => {
            write(path, &text)?;
            let class = reduced.instance.classify();
            emit(
                json_mode,
                json!({
                    "target": target.name(),
                    "residents": reduced.instance.num_residents(),
                    "hospitals": reduced.instance.num_hospitals(),
                    "regions": reduced.instance.regions().len(),
                    "class": class,
                }),
                || {
                    format!(
                        "{target}: {} residents, {} hospitals, {} regions, class {class}",
                        reduced.instance.num_residents(),
                        reduced.instance.num_hospitals(),
                        reduced.instance.regions().len()
                    )
                },
            );
        }
        None => println!("{text}"),
    }
    Ok(OK)
}

fn decode_cmd(
    json_mode: bool,
    cnf: &Path,
    matching: &Path,
    target: ReductionVariant,
    normalize: bool,
) -> Run {
    let original = read_cnf(cnf)?;
    let (formula, provenance) = prepare(original.clone(), target, normalize)?;
    let reduced = reduce(&formula, target)?;
    let m = read_matching(&reduced.instance, matching)?;
    let stable = check(&reduced.instance, &m).strongly_stable();
    if !stable {
        log::warn!("matching is not strongly stable; the decoded assignment need not satisfy the formula");
    }
    let mut assignment = reduced.decode(&m);
    if let Some(prov) = &provenance {
        assignment = prov.project(&assignment);
    }
    let satisfies = original.satisfied_by(&assignment, target.sat_mode());
    emit(
        json_mode,
        json!({
            "assignment": assignment.values(),
            "satisfies": satisfies,
            "matching_strongly_stable": stable,
        }),
        || {
            let verdict = if satisfies {
                "satisfies the formula"
            } else {
                "does not satisfy the formula"
            };
            format!("{assignment}\n{verdict}")
        },
    );
    Ok(if satisfies { OK } else { NEGATIVE })
}

fn run(cli: Cli) -> Run {
    let j = cli.json;
    match cli.command {
        Command::Classify { instance } => classify_cmd(j, &instance),
        Command::Solve {
            instance,
            algorithm,
            limit,
            out,
        } => solve_cmd(j, &instance, algorithm.into(), limit.brute_limit, out.as_deref()),
        Command::Check { instance, matching } => check_cmd(j, &instance, &matching),
        Command::Brute {
            instance,
            all,
            force,
            jobs,
            limit,
        } => brute_cmd(j, &instance, all, force, jobs.max(1), limit.brute_limit),
        Command::Reduce {
            cnf,
            target,
            normalize_ppn,
            out,
            occurrences,
        } => reduce_cmd(
            j,
            &cnf,
            target,
            normalize_ppn,
            out.as_deref(),
            occurrences.as_deref(),
        ),
        Command::Decode {
            cnf,
            matching,
            target,
            normalize_ppn,
        } => decode_cmd(j, &cnf, &matching, target, normalize_ppn),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { INPUT_ERROR } else { OK });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(INPUT_ERROR)
        }
    }
}
