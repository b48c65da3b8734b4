//! Command-line front end: reduce NAE-3SAT formulas, decide supports, verify
//! round trips and structure, check consistency, export DOT.
//!
//! Exit codes: 0 = YES / all checks pass, 1 = NO / check failed, 2 = input
//! error, 3 = unbalanced formula, 4 = node-limit reached.

mod dot;
mod random;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use sortsupport::consistency::{
    bounds_d_consistent, bounds_z_consistent, prune_domain_consistency,
};
use sortsupport::error::Error;
use sortsupport::instance::validate_witness;
use sortsupport::nae::{balance_occurrences, parse_dimacs};
use sortsupport::reduction::{reduce, roundtrip_verify, verify_structure, ReductionTrace};
use sortsupport::solver::{decide_support, Outcome, Pin, Side, SolveOptions};
use sortsupport::{SortInstance, Variant};

#[derive(Parser)]
#[command(name = "sortsupport", about = "sortedness-constraint decision tools")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Overlapping,
    Disjoint,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Variant {
        match v {
            VariantArg::Overlapping => Variant::Overlapping,
            VariantArg::Disjoint => Variant::Disjoint,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum LevelArg {
    Domain,
    #[value(name = "boundsD")]
    BoundsD,
    #[value(name = "boundsZ")]
    BoundsZ,
}

#[derive(Subcommand)]
enum Command {
    /// Build a sortsupport instance from a DIMACS NAE-3SAT formula.
    Reduce {
        cnf: PathBuf,
        #[arg(long, value_enum, default_value = "overlapping")]
        variant: VariantArg,
        /// Equalize positive/negative occurrences first instead of failing.
        #[arg(long)]
        balance: bool,
        /// Output prefix; writes <prefix>.instance and <prefix>.trace.json.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Decide whether an instance file admits a support.
    Solve {
        instance: PathBuf,
        /// Pin a variable, e.g. `u:3=17` or `v:19=145` (1-based).
        #[arg(long = "pin")]
        pins: Vec<String>,
        /// Honor permutation domains even if absent from the file header.
        #[arg(long)]
        perm: bool,
        /// Require stable sorting even if absent from the file header.
        #[arg(long)]
        stable: bool,
        /// Print the support witness on YES.
        #[arg(long)]
        witness: bool,
        #[arg(long)]
        node_limit: Option<u64>,
        /// Disable the matching-based feasibility pruning.
        #[arg(long)]
        no_prune: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Check formula/instance equivalence end to end: NAE oracle vs solver,
    /// with witness and assignment extraction cross-checked.
    VerifyRoundtrip {
        /// DIMACS file; omit when using --random.
        cnf: Option<PathBuf>,
        /// Generate random formulas: <vars> <clauses> <count>.
        #[arg(long, num_args = 3, value_names = ["VARS", "CLAUSES", "COUNT"])]
        random: Option<Vec<u64>>,
        #[arg(long, default_value = "0")]
        seed: u64,
        #[arg(long, value_enum, default_value = "overlapping")]
        variant: VariantArg,
    },
    /// Compare an instance's intersection graph against its reduction trace.
    CheckStructure { instance: PathBuf, trace: PathBuf },
    /// Check definition-level consistency of every variable.
    Consistency {
        instance: PathBuf,
        #[arg(long, value_enum, default_value = "domain")]
        level: LevelArg,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Render the intersection graph in DOT, colored by edge role when a
    /// trace is given.
    ExportDot {
        instance: PathBuf,
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(match err {
                Error::Unbalanced { .. } | Error::UnusedVariable(_) => 3,
                _ => 2,
            })
        }
    }
}

fn read(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Error> {
    std::fs::write(path, text)
        .map_err(|e| Error::Parse(format!("cannot write {}: {e}", path.display())))
}

fn load_trace(path: &Path) -> Result<ReductionTrace, Error> {
    serde_json::from_str(&read(path)?)
        .map_err(|e| Error::Parse(format!("bad trace {}: {e}", path.display())))
}

fn parse_pin(spec: &str) -> Result<Pin, Error> {
    let bad = || Error::Parse(format!("bad pin `{spec}`, expected u:<i>=<val> or v:<j>=<val>"));
    let (side, rest) = spec.split_once(':').ok_or_else(bad)?;
    let side = match side {
        "u" => Side::U,
        "v" => Side::V,
        _ => return Err(bad()),
    };
    let (idx, val) = rest.split_once('=').ok_or_else(bad)?;
    let index: usize = idx.parse().map_err(|_| bad())?;
    if index == 0 {
        return Err(bad());
    }
    let value: i64 = val.parse().map_err(|_| bad())?;
    Ok(Pin { side, index: index - 1, value })
}

fn run(cli: Cli) -> Result<u8, Error> {
    match cli.command {
        Command::Reduce { cnf, variant, balance, out } => {
            let mut f = parse_dimacs(&read(&cnf)?)?;
            if balance {
                f = balance_occurrences(&f);
            }
            let (inst, trace) = reduce(&f, variant.into())?;
            let prefix = out.unwrap_or_else(|| cnf.with_extension(""));
            let instance_path = prefix.with_extension("instance");
            let trace_path = prefix.with_extension("trace.json");
            write(&instance_path, &inst.render())?;
            let trace_json = serde_json::to_string_pretty(&trace)
                .map_err(|e| Error::Parse(format!("trace serialization failed: {e}")))?;
            write(&trace_path, &trace_json)?;
            println!(
                "n={} k={} t={} m={} q={} edges={}",
                trace.n,
                trace.k,
                trace.t,
                trace.m,
                trace.q,
                trace.edges.len()
            );
            Ok(0)
        }
        Command::Solve {
            instance,
            pins,
            perm,
            stable,
            witness,
            node_limit,
            no_prune,
            format,
        } => {
            let inst = SortInstance::parse(&read(&instance)?)?;
            let mut opts = SolveOptions {
                pins: pins.iter().map(|s| parse_pin(s)).collect::<Result<_, _>>()?,
                respect_p: perm || inst.p_domains.is_some(),
                respect_stability: stable || inst.stable,
                prune: !no_prune,
                ..SolveOptions::default()
            };
            if node_limit.is_some() {
                opts.node_limit = node_limit;
            }
            let verdict = decide_support(&inst, &opts)?;
            let (word, code) = match &verdict.outcome {
                Outcome::Yes(_) => ("YES", 0),
                Outcome::No => ("NO", 1),
                Outcome::Limit => ("LIMIT", 4),
            };
            match format {
                Format::Text => {
                    println!("{word}");
                    println!(
                        "nodes: {} prunes: {}",
                        verdict.stats.nodes, verdict.stats.prunes
                    );
                    if witness {
                        if let Some(w) = verdict.witness() {
                            print!("{}", w.render());
                        }
                    }
                }
                Format::Json => {
                    let mut obj = json!({
                        "outcome": word,
                        "nodes": verdict.stats.nodes,
                        "prunes": verdict.stats.prunes,
                    });
                    if witness {
                        if let Some(w) = verdict.witness() {
                            obj["values"] = json!(w.values);
                            obj["perm"] = json!(w.perm);
                            obj["sigma"] =
                                json!(w.sigma.iter().map(|u| u + 1).collect::<Vec<_>>());
                        }
                    }
                    println!("{obj}");
                }
            }
            if let Some(w) = verdict.witness() {
                let report = validate_witness(&inst, w);
                if !report.ok() {
                    eprintln!("internal witness validation failed:\n{report}");
                    return Ok(2);
                }
            }
            Ok(code)
        }
        Command::VerifyRoundtrip { cnf, random, seed, variant } => {
            let formulas = match (cnf, random) {
                (Some(path), None) => vec![parse_dimacs(&read(&path)?)?],
                (None, Some(args)) => {
                    let (vars, clauses, count) = (args[0], args[1], args[2]);
                    random::formulas(vars as usize, clauses as usize, count as usize, seed)
                }
                _ => {
                    return Err(Error::Parse(
                        "give either a CNF file or --random, not both".into(),
                    ))
                }
            };
            let mut all_ok = true;
            for f in &formulas {
                let report = roundtrip_verify(f, variant.into())?;
                print!("{report}");
                all_ok &= report.ok();
            }
            Ok(if all_ok { 0 } else { 1 })
        }
        Command::CheckStructure { instance, trace } => {
            let inst = SortInstance::parse(&read(&instance)?)?;
            let trace = load_trace(&trace)?;
            let diff = verify_structure(&inst, &trace);
            println!("{diff}");
            Ok(if diff.ok() { 0 } else { 1 })
        }
        Command::Consistency { instance, level, format } => {
            let inst = SortInstance::parse(&read(&instance)?)?;
            let base = SolveOptions {
                respect_p: inst.p_domains.is_some(),
                respect_stability: inst.stable,
                ..SolveOptions::default()
            };
            let report = match level {
                LevelArg::Domain => prune_domain_consistency(&inst, &base)?,
                LevelArg::BoundsD => bounds_d_consistent(&inst, &base)?,
                LevelArg::BoundsZ => bounds_z_consistent(&inst, &base)?,
            };
            match format {
                Format::Text => print!("{report}"),
                Format::Json => {
                    let obj = serde_json::to_value(&report)
                        .map_err(|e| Error::Parse(format!("report serialization: {e}")))?;
                    println!("{obj}");
                }
            }
            Ok(if report.unknown {
                4
            } else if report.consistent {
                0
            } else {
                1
            })
        }
        Command::ExportDot { instance, trace, out } => {
            let inst = SortInstance::parse(&read(&instance)?)?;
            let trace = trace.map(|p| load_trace(&p)).transpose()?;
            let text = dot::render(&inst, trace.as_ref());
            match out {
                Some(path) => write(&path, &text)?,
                None => print!("{text}"),
            }
            Ok(0)
        }
    }
}
