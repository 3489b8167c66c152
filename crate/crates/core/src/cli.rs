//! Command-line front end.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use crate::error::Error;
use crate::grouping::{assign_groups, Strategy};
use crate::harness::{run_experiment, run_trial_traced, ExperimentPlan, SUMMARY_CSV};
use crate::io::{load_group, load_needs, load_roster, load_weights};
use crate::needs::{GroupNeedsMatrix, NeedsVector};
use crate::sim::{Scenario, TraceRow};
use crate::trust::{agent_agent_trust, agent_group_trust, group_group_trust, LogBase, RneConfig};

#[derive(Debug, Parser)]
#[command(name = "rne-rescue", version, about = "RNE trust, grouping and rescue simulation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Trust of p toward q, printed to 6 decimals.
    Trust {
        #[arg(long)]
        p: PathBuf,
        #[arg(long)]
        q: PathBuf,
        #[arg(long)]
        weights: PathBuf,
        /// Read q as a group matrix.
        #[arg(long)]
        group_q: bool,
        /// Read p as a group matrix.
        #[arg(long)]
        group_p: bool,
        #[arg(long, default_value = "natural")]
        log_base: LogBase,
        /// Floor both distributions to N decimals.
        #[arg(long)]
        truncate: Option<u32>,
        /// Return infinity instead of smoothing zero components.
        #[arg(long)]
        strict: bool,
    },
    /// Splits a roster into hard and easy groups.
    Group {
        #[arg(long)]
        roster: PathBuf,
        #[arg(long, default_value = "rne")]
        strategy: Strategy,
        #[arg(long)]
        weights: PathBuf,
    },
    /// Runs one seeded trial and writes its metrics as JSON.
    Simulate {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        strategy: Option<Strategy>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
        /// Per-tick CSV trace.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Runs every strategy over seeded trials and writes CSV and JSON reports.
    Experiment {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "rne,dis,eng,hp_dis")]
        strategies: Vec<Strategy>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        master_seed: Option<u64>,
        #[arg(long)]
        out_dir: PathBuf,
    },
}

/// Failure of a CLI run: bad input (exit 2) or anything else (exit 1).
#[derive(Debug)]
pub enum CliError {
    Input(Error),
    Output(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Input(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Output(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(e) => write!(f, "{e}"),
            CliError::Output(e) => f.write_str(e),
        }
    }
}

fn write_file(path: &Path, body: &[u8]) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Output(format!("{}: {e}", dir.display())))?;
    }
    std::fs::write(path, body).map_err(|e| CliError::Output(format!("{}: {e}", path.display())))
}

enum Operand {
    Agent(NeedsVector),
    Group(GroupNeedsMatrix),
}

fn operand(path: &Path, group: bool) -> crate::Result<Operand> {
    Ok(if group {
        Operand::Group(load_group(path)?)
    } else {
        Operand::Agent(load_needs(path)?)
    })
}

/// Runs a parsed command, writing user-facing output to `out`.
pub fn run(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    let print = |out: &mut dyn Write, s: &str| {
        writeln!(out, "{s}").map_err(|e| CliError::Output(e.to_string()))
    };
    match cli.command {
        Command::Trust {
            p,
            q,
            weights,
            group_q,
            group_p,
            log_base,
            truncate,
            strict,
        } => {
            let w = load_weights(&weights)?;
            let mut cfg = RneConfig::default().with_log_base(log_base);
            if let Some(n) = truncate {
                cfg = cfg.with_truncation(n);
            }
            if strict {
                cfg = cfg.strict();
            }
            let t = match (operand(&p, group_p)?, operand(&q, group_q)?) {
                (Operand::Agent(a), Operand::Agent(b)) => agent_agent_trust(&a, &b, &w, &cfg)?,
                (Operand::Agent(a), Operand::Group(g)) => agent_group_trust(&a, &g, &w, &cfg)?,
                (Operand::Group(a), Operand::Group(b)) => group_group_trust(&a, &b, &w, &cfg)?,
                (Operand::Group(_), Operand::Agent(_)) => {
                    return Err(Error::Config(
                        "group-to-agent trust is not defined; pass --group-q as well".into(),
                    )
                    .into())
                }
            };
            print(out, &format!("{t}"))
        }
        Command::Group {
            roster,
            strategy,
            weights,
        } => {
            let w = load_weights(&weights)?;
            let roster = load_roster(&roster)?;
            let a = assign_groups(strategy, &roster.robots, &roster.tasks, &w, &RneConfig::default())?;
            let body = json!({
                "hard": a.hard_group,
                "easy": a.easy_group,
                "scores": a.diagnostics,
            });
            print(out, &serde_json::to_string_pretty(&body).expect("plain JSON values"))
        }
        Command::Simulate {
            scenario,
            strategy,
            seed,
            out: path,
            trace,
        } => {
            let sc = Scenario::load(&scenario)?;
            let strategy = strategy.unwrap_or(sc.strategy);
            let seed = seed.or(sc.seeds.first().copied()).unwrap_or(sc.master_seed);
            let metrics = match &trace {
                Some(trace_path) => {
                    let mut w = csv::Writer::from_writer(Vec::new());
                    let mut failed = None;
                    let mut sink = |row: TraceRow| {
                        if failed.is_none() {
                            failed = w.serialize(row).err();
                        }
                    };
                    let m = run_trial_traced(&sc, strategy, seed, Some(&mut sink))?;
                    if let Some(e) = failed {
                        return Err(CliError::Output(e.to_string()));
                    }
                    let bytes = w.into_inner().map_err(|e| CliError::Output(e.to_string()))?;
                    write_file(trace_path, &bytes)?;
                    m
                }
                None => run_trial_traced(&sc, strategy, seed, None)?,
            };
            let body = json!({
                "strategy": strategy,
                "seed": seed,
                "metrics": metrics,
            });
            write_file(&path, serde_json::to_string_pretty(&body).expect("plain JSON values").as_bytes())?;
            print(
                out,
                &format!(
                    "{strategy} seed {seed}: easy {} hard {} total {}",
                    metrics.rescued_easy,
                    metrics.rescued_hard,
                    metrics.rescued_total()
                ),
            )
        }
        Command::Experiment {
            scenario,
            strategies,
            trials,
            master_seed,
            out_dir,
        } => {
            let sc = Scenario::load(&scenario)?;
            let plan = ExperimentPlan {
                trials: trials.unwrap_or(sc.trials),
                master_seed: master_seed.unwrap_or(sc.master_seed),
                scenario: sc,
                strategies,
                out_dir: None,
            };
            let report = run_experiment(&plan)?;
            report.write(&out_dir).map_err(|e| CliError::Output(e.to_string()))?;
            print(out, &report.summary_csv()?)?;
            print(out, &format!("wrote {}", out_dir.join(SUMMARY_CSV).display()))
        }
    }
}

fn init_logging() {
    let env = env_logger::Env::new().filter_or("RNE_LOG", "warn");
    let _ = env_logger::Builder::from_env(env).format_timestamp(None).try_init();
}

/// Entry point shared by the binary.
pub fn main() -> ExitCode {
    init_logging();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli, &mut std::io::stdout().lock()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
