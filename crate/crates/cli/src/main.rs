//! `wm`: randomized and classical bipartite matching from the command line.
//!
//! Exit status: 0 for YES / success, 1 for NO / failure, 2 for unusable
//! input, 3 when an enumeration would exceed `--budget`.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use wm_core::bipartite::{matching_weight, BipartiteGraph, WeightAssignment};
use wm_core::classical::{hungarian_max_weight, mwpm};
use wm_core::edmonds::{extract_pm, lovasz_trial};
use wm_core::mvv::{mvv_find_pm_with, MvvFailure};
use wm_core::verify::{render_text, run_suite, trial_seed, Suite, VerifyConfig, DEFAULT_SEED};
use wm_core::Error;

const EXIT_YES: u8 = 0;
const EXIT_NO: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_BUDGET: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "wm", version, about = "Bipartite perfect matchings via determinants, with exhaustive verification")]
struct Cli {
    /// Base seed (decimal or 0x-prefixed hex), or `random` for a fresh one.
    #[arg(long, global = true, default_value_t = SeedArg::Fixed(DEFAULT_SEED), value_parser = parse_seed)]
    seed: SeedArg,

    /// Number of randomized trials for `decide` and `find`.
    #[arg(long, global = true, default_value_t = 20, value_parser = clap::value_parser!(u64).range(1..))]
    trials: u64,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Largest dimension the verification suites may use.
    #[arg(long, global = true, default_value_t = VerifyConfig::default().max_n)]
    max_n: usize,

    /// Largest sample-set size for the zero-set witnesses.
    #[arg(long, global = true, default_value_t = VerifyConfig::default().max_s)]
    max_s: u64,

    /// Largest weight range for the isolation suite.
    #[arg(long, global = true, default_value_t = VerifyConfig::default().max_k)]
    max_k: u64,

    /// Maximum number of elements any single enumeration may visit.
    #[arg(long, global = true, default_value_t = VerifyConfig::default().budget)]
    budget: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide whether a graph has a perfect matching with random evaluations.
    Decide { graph: PathBuf },
    /// Find a perfect matching with random power-of-two weights.
    Find { graph: PathBuf },
    /// Maximum-weight matching of a complete weighted graph, with its cover.
    Hungarian { weights: PathBuf },
    /// Minimum-weight perfect matching of a weighted graph.
    Mwpm { graph: PathBuf, weights: PathBuf },
    /// Run a verification suite: det, sz, iso, mvv, classical or all.
    Verify { suite: Suite },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug)]
enum SeedArg {
    Fixed(u64),
    Random,
}

impl std::fmt::Display for SeedArg {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SeedArg::Fixed(s) => write!(f, "{s:#x}"),
            SeedArg::Random => f.write_str("random"),
        }
    }
}

fn parse_seed(s: &str) -> Result<SeedArg, String> {
    if s == "random" {
        return Ok(SeedArg::Random);
    }
    let parsed = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    };
    parsed
        .map(SeedArg::Fixed)
        .map_err(|_| format!("expected a 64-bit unsigned integer or `random`, found {s:?}"))
}

struct Outcome {
    code: u8,
    text: String,
    json: Value,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }

    fn from_core(context: &str, e: Error) -> Self {
        match e {
            Error::BudgetExceeded { needed, budget } => Self {
                code: EXIT_BUDGET,
                message: format!(
                    "{context}: enumeration of {needed} elements exceeds --budget {budget}; \
                     raise --budget or lower --max-n/--max-s/--max-k"
                ),
            },
            Error::Parse { line, message } => Self::input(format!("{context}:{line}: {message}")),
            other => Self::input(format!("{context}: {other}")),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn load_graph(path: &Path) -> Result<BipartiteGraph, Failure> {
    BipartiteGraph::parse(&read(path)?).map_err(|e| Failure::from_core(&path.display().to_string(), e))
}

fn load_weights(path: &Path) -> Result<WeightAssignment, Failure> {
    WeightAssignment::parse(&read(path)?).map_err(|e| Failure::from_core(&path.display().to_string(), e))
}

fn rows_i64(w: &WeightAssignment) -> Value {
    json!(w.values().chunks(w.n()).collect::<Vec<_>>())
}

fn decide(g: &BipartiteGraph, seed: u64, trials: u64) -> Result<Outcome, Failure> {
    for t in 0..trials {
        let s = trial_seed(seed, t);
        let trial = lovasz_trial(g, s);
        if trial.accepts() {
            let m = extract_pm(g, &trial.evaluation).map_err(|e| Failure::from_core("extract", e))?;
            return Ok(Outcome {
                code: EXIT_YES,
                text: format!(
                    "YES\nperfect matching: {m}\nfound at trial {} of {trials} (trial seed {s:#x}), determinant {}\n",
                    t + 1,
                    trial.determinant
                ),
                json: json!({
                    "command": "decide",
                    "answer": "YES",
                    "seed": seed,
                    "trials": trials,
                    "trial": t + 1,
                    "trial_seed": s,
                    "matching": m,
                    "evaluation": trial.evaluation,
                    "determinant": trial.determinant.to_string(),
                }),
            });
        }
    }
    Ok(Outcome {
        code: EXIT_NO,
        text: format!("NO\nevery evaluation was singular in {trials} trials\n"),
        json: json!({ "command": "decide", "answer": "NO", "seed": seed, "trials": trials }),
    })
}

fn find(g: &BipartiteGraph, seed: u64, trials: u64) -> Result<Outcome, Failure> {
    let (mut singular, mut not_isolated) = (0u64, 0u64);
    for t in 0..trials {
        let s = trial_seed(seed, t);
        match mvv_find_pm_with(g, s, true) {
            Ok(found) => {
                let w = matching_weight(&found.matching, &found.weights);
                let mut text = format!("FOUND\nperfect matching: {}\nweight: {w}\np: {}\n", found.matching, found.p);
                let _ = write!(text, "weights:\n{}", found.weights);
                let _ = writeln!(text, "found at trial {} of {trials} (trial seed {s:#x})", t + 1);
                return Ok(Outcome {
                    code: EXIT_YES,
                    text,
                    json: json!({
                        "command": "find",
                        "found": true,
                        "seed": seed,
                        "trials": trials,
                        "trial": t + 1,
                        "trial_seed": s,
                        "matching": found.matching,
                        "weight": w,
                        "weights": rows_i64(&found.weights),
                        "p": found.p,
                        "failures": { "singular_determinant": singular, "not_isolated": not_isolated },
                    }),
                });
            }
            Err(MvvFailure::SingularDeterminant { .. }) => singular += 1,
            Err(MvvFailure::NotIsolated { .. }) => not_isolated += 1,
        }
    }
    Ok(Outcome {
        code: EXIT_NO,
        text: format!(
            "NOT FOUND\n{trials} trials: {singular} singular, {not_isolated} without a unique minimum\n"
        ),
        json: json!({
            "command": "find",
            "found": false,
            "seed": seed,
            "trials": trials,
            "failures": { "singular_determinant": singular, "not_isolated": not_isolated },
        }),
    })
}

fn hungarian(w: &WeightAssignment) -> Result<Outcome, Failure> {
    let h = hungarian_max_weight(w.n(), w.values()).map_err(|e| Failure::from_core("hungarian", e))?;
    let weight = h.weight(w.values());
    let cost = h.cover.cost();
    let fmt_vec = |v: &[i64]| v.iter().map(i64::to_string).collect::<Vec<_>>().join(" ");
    Ok(Outcome {
        code: EXIT_YES,
        text: format!(
            "matching: {}\nweight: {weight}\ncover u: {}\ncover v: {}\ncover cost: {cost}\noptimal: {}\n",
            h.matching,
            fmt_vec(&h.cover.u),
            fmt_vec(&h.cover.v),
            if weight == cost { "yes (weight equals cover cost)" } else { "no" }
        ),
        json: json!({
            "command": "hungarian",
            "matching": h.matching,
            "weight": weight,
            "cover": { "u": h.cover.u, "v": h.cover.v },
            "cover_cost": cost,
            "optimal": weight == cost,
            "rounds": h.rounds,
        }),
    })
}

fn min_weight(g: &BipartiteGraph, w: &WeightAssignment) -> Result<Outcome, Failure> {
    if g.n() != w.n() {
        return Err(Failure::input(format!(
            "graph has dimension {} but weights have dimension {}",
            g.n(),
            w.n()
        )));
    }
    Ok(match mwpm(g, w).map_err(|e| Failure::from_core("mwpm", e))? {
        Some(m) => {
            let weight = matching_weight(&m, w);
            Outcome {
                code: EXIT_YES,
                text: format!("perfect matching: {m}\nweight: {weight}\n"),
                json: json!({ "command": "mwpm", "found": true, "matching": m, "weight": weight }),
            }
        }
        None => Outcome {
            code: EXIT_NO,
            text: "no perfect matching\n".into(),
            json: json!({ "command": "mwpm", "found": false }),
        },
    })
}

fn verify(suite: Suite, cfg: &VerifyConfig) -> Result<Outcome, Failure> {
    let report = run_suite(suite, cfg).map_err(|e| Failure::from_core(&format!("verify {suite}"), e))?;
    let mut value = serde_json::to_value(&report).expect("serializable");
    value["command"] = json!("verify");
    Ok(Outcome {
        code: if report.passed { EXIT_YES } else { EXIT_NO },
        text: render_text(&report),
        json: value,
    })
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("WM_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::input(format!("WM_THREADS must be a positive integer, found {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::input(format!("WM_THREADS: {e}")))
}

fn run(cli: &Cli) -> Result<Outcome, Failure> {
    configure_threads()?;
    let seed = match cli.seed {
        SeedArg::Fixed(s) => s,
        SeedArg::Random => rand::random(),
    };
    match &cli.command {
        Command::Decide { graph } => decide(&load_graph(graph)?, seed, cli.trials),
        Command::Find { graph } => find(&load_graph(graph)?, seed, cli.trials),
        Command::Hungarian { weights } => hungarian(&load_weights(weights)?),
        Command::Mwpm { graph, weights } => min_weight(&load_graph(graph)?, &load_weights(weights)?),
        Command::Verify { suite } => verify(
            *suite,
            &VerifyConfig {
                seed,
                max_n: cli.max_n,
                max_s: cli.max_s,
                max_k: cli.max_k,
                budget: cli.budget,
            },
        ),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            match cli.format {
                Format::Text => print!("{}", out.text),
                Format::Json => println!("{}", serde_json::to_string_pretty(&out.json).expect("serializable")),
            }
            ExitCode::from(out.code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            if cli.format == Format::Json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&json!({ "command": "error", "exit_code": f.code, "message": f.message }))
                        .expect("serializable")
                );
            }
            ExitCode::from(f.code)
        }
    }
}
