//! Multi-trial, multi-strategy experiments over one scenario.

use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::grouping::{Difficulty, Strategy};
use crate::sim::{InitialSpec, RobotInitials, Scenario, Simulation, TraceRow, TrialMetrics};

/// Draws that stay non-positive this many times in a row are a config error.
const MAX_RESAMPLES: usize = 10_000;

/// Per-robot starting energy and HP, one set per trial index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitialConditionSet {
    pub master_seed: u64,
    pub robot_ids: Vec<String>,
    pub trials: Vec<Vec<RobotInitials>>,
}

impl InitialConditionSet {
    pub fn trial(&self, index: usize) -> Option<&[RobotInitials]> {
        self.trials.get(index).map(Vec::as_slice)
    }

    /// Hex sha256 over ids and the exact bit patterns of every draw.
    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.master_seed.to_le_bytes());
        for id in &self.robot_ids {
            h.update(id.as_bytes());
            h.update([0]);
        }
        for trial in &self.trials {
            h.update(hash_trial(trial));
        }
        hex::encode(h.finalize())
    }
}

fn hash_trial(trial: &[RobotInitials]) -> [u8; 32] {
    let mut h = Sha256::new();
    for r in trial {
        h.update(r.energy.to_bits().to_le_bytes());
        h.update(r.hp.to_bits().to_le_bytes());
    }
    h.finalize().into()
}

fn draw(rng: &mut impl Rng, normal: &Normal<f64>, what: &str) -> Result<f64> {
    for _ in 0..MAX_RESAMPLES {
        let v = normal.sample(rng);
        if v > 0.0 {
            return Ok(v.min(100.0));
        }
    }
    Err(Error::Config(format!(
        "{what} distribution never produced a positive value"
    )))
}

/// Samples energy ~ N(energy_mean, energy_std) and HP ~ N(hp_mean, hp_std)
/// for every robot in every trial. Non-positive draws are redrawn and values
/// above 100 are clamped. Trial `t` uses ChaCha8 stream `t` of the master
/// seed, so a trial's draws do not depend on how many trials are requested.
pub fn sample_initials(
    master_seed: u64,
    robot_ids: &[String],
    trials: usize,
    spec: &InitialSpec,
) -> Result<InitialConditionSet> {
    if trials == 0 {
        return Err(Error::Config("trials must be at least 1".into()));
    }
    let normal = |mean: f64, std: f64, what: &str| {
        Normal::new(mean, std).map_err(|e| Error::Config(format!("{what}: {e}")))
    };
    let energy = normal(spec.energy_mean, spec.energy_std, "energy")?;
    let hp = normal(spec.hp_mean, spec.hp_std, "hp")?;
    let sets = (0..trials)
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
            rng.set_stream(t as u64);
            robot_ids
                .iter()
                .map(|_| {
                    Ok(RobotInitials {
                        energy: draw(&mut rng, &energy, "energy")?,
                        hp: draw(&mut rng, &hp, "hp")?,
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(InitialConditionSet {
        master_seed,
        robot_ids: robot_ids.to_vec(),
        trials: sets,
    })
}

fn robot_ids(scenario: &Scenario) -> Vec<String> {
    scenario.robots.iter().map(|r| r.id.clone()).collect()
}

/// One seeded trial: initials come from trial index 0 of `seed`.
pub fn run_trial(scenario: &Scenario, strategy: Strategy, seed: u64) -> Result<TrialMetrics> {
    run_trial_traced(scenario, strategy, seed, None)
}

pub fn run_trial_traced(
    scenario: &Scenario,
    strategy: Strategy,
    seed: u64,
    trace: Option<&mut dyn FnMut(TraceRow)>,
) -> Result<TrialMetrics> {
    let initials = sample_initials(seed, &robot_ids(scenario), 1, &scenario.initial)?;
    Simulation::new(scenario, strategy, &initials.trials[0])?.run(trace)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentPlan {
    pub scenario: Scenario,
    pub strategies: Vec<Strategy>,
    pub trials: usize,
    pub master_seed: u64,
    pub out_dir: Option<PathBuf>,
}

impl ExperimentPlan {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.strategies.is_empty() {
            return Err(Error::Config("at least one strategy is required".into()));
        }
        let mut seen = self.strategies.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.strategies.len() {
            return Err(Error::Config("strategies must not repeat".into()));
        }
        self.scenario.validate()
    }
}

/// Cost per rescuee for one task (or both combined). `None` when nobody
/// was rescued.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostRow {
    pub task: TaskScope,
    pub rescued: u32,
    pub energy_spent: f64,
    pub hp_spent: f64,
    pub energy_per_rescuee: Option<f64>,
    pub hp_per_rescuee: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskScope {
    Easy,
    Hard,
    Total,
}

impl TaskScope {
    pub const ALL: [TaskScope; 3] = [TaskScope::Easy, TaskScope::Hard, TaskScope::Total];

    pub fn label(self) -> &'static str {
        match self {
            TaskScope::Easy => "easy",
            TaskScope::Hard => "hard",
            TaskScope::Total => "total",
        }
    }
}

fn per_rescuee(spent: f64, rescued: u32) -> Option<f64> {
    (rescued > 0).then(|| spent / f64::from(rescued))
}

/// Easy, hard and total cost rows, in that order.
pub fn compute_costs(metrics: &TrialMetrics) -> [CostRow; 3] {
    let row = |task, rescued, energy_spent, hp_spent| CostRow {
        task,
        rescued,
        energy_spent,
        hp_spent,
        energy_per_rescuee: per_rescuee(energy_spent, rescued),
        hp_per_rescuee: per_rescuee(hp_spent, rescued),
    };
    let e = metrics.tally(Difficulty::Easy);
    let h = metrics.tally(Difficulty::Hard);
    [
        row(TaskScope::Easy, e.rescued, e.energy_spent, e.hp_spent),
        row(TaskScope::Hard, h.rescued, h.energy_spent, h.hp_spent),
        row(
            TaskScope::Total,
            e.rescued + h.rescued,
            e.energy_spent + h.energy_spent,
            e.hp_spent + h.hp_spent,
        ),
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub strategy: Strategy,
    pub trial: usize,
    /// Hash of this trial's initial conditions; equal across strategies.
    pub initial_hash: String,
    pub costs: [CostRow; 3],
    pub metrics: TrialMetrics,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Rescued,
    EnergyPerRescuee,
    HpPerRescuee,
}

impl Metric {
    pub const ALL: [Metric; 3] = [Metric::Rescued, Metric::EnergyPerRescuee, Metric::HpPerRescuee];

    pub fn label(self) -> &'static str {
        match self {
            Metric::Rescued => "rescued",
            Metric::EnergyPerRescuee => "energy_per_rescuee",
            Metric::HpPerRescuee => "hp_per_rescuee",
        }
    }

    fn of(self, row: &CostRow) -> Option<f64> {
        match self {
            Metric::Rescued => Some(f64::from(row.rescued)),
            Metric::EnergyPerRescuee => row.energy_per_rescuee,
            Metric::HpPerRescuee => row.hp_per_rescuee,
        }
    }
}

/// Mean and sample standard deviation over the trials where the metric is
/// defined. `std` is 0 for a single sample; both are `None` for none.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stat {
    pub n: usize,
    pub mean: Option<f64>,
    pub std: Option<f64>,
}

impl Stat {
    pub fn of(values: &[f64]) -> Self {
        let n = values.len();
        if n == 0 {
            return Self {
                n,
                mean: None,
                std: None,
            };
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let std = if n == 1 {
            0.0
        } else {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        };
        Self {
            n,
            mean: Some(mean),
            std: Some(std),
        }
    }
}

/// One aggregate row: a strategy and a metric, with easy/hard/total stats.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub strategy: Strategy,
    pub metric: Metric,
    pub easy: Stat,
    pub hard: Stat,
    pub total: Stat,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub strategies: Vec<Strategy>,
    pub trials: usize,
    pub master_seed: u64,
    pub initial_hash: String,
    pub summary: Vec<SummaryRow>,
    pub records: Vec<TrialRecord>,
}

/// Runs every strategy on every trial index with shared initial
/// conditions. Trials run in parallel; records are sorted by
/// (strategy, trial) before aggregation.
pub fn run_experiment(plan: &ExperimentPlan) -> Result<ExperimentReport> {
    plan.validate()?;
    let initials = sample_initials(
        plan.master_seed,
        &robot_ids(&plan.scenario),
        plan.trials,
        &plan.scenario.initial,
    )?;
    let jobs: Vec<(Strategy, usize)> = plan
        .strategies
        .iter()
        .flat_map(|&s| (0..plan.trials).map(move |t| (s, t)))
        .collect();
    let mut records = jobs
        .par_iter()
        .map(|&(strategy, trial)| {
            let init = &initials.trials[trial];
            let metrics = Simulation::new(&plan.scenario, strategy, init)?.run(None)?;
            log::info!(
                "{strategy} trial {trial}: easy {} hard {}",
                metrics.rescued_easy,
                metrics.rescued_hard
            );
            Ok(TrialRecord {
                strategy,
                trial,
                initial_hash: hex::encode(hash_trial(init)),
                costs: compute_costs(&metrics),
                metrics,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    records.sort_by_key(|r| (r.strategy, r.trial));
    let summary = summarize(&plan.strategies, &records);
    let report = ExperimentReport {
        strategies: plan.strategies.clone(),
        trials: plan.trials,
        master_seed: plan.master_seed,
        initial_hash: initials.hash(),
        summary,
        records,
    };
    if let Some(dir) = &plan.out_dir {
        report.write(dir)?;
    }
    Ok(report)
}

pub fn summarize(strategies: &[Strategy], records: &[TrialRecord]) -> Vec<SummaryRow> {
    let mut rows = Vec::new();
    for &strategy in strategies {
        let mine: Vec<&TrialRecord> = records.iter().filter(|r| r.strategy == strategy).collect();
        for metric in Metric::ALL {
            let stat = |i: usize| {
                let values: Vec<f64> = mine.iter().filter_map(|r| metric.of(&r.costs[i])).collect();
                Stat::of(&values)
            };
            rows.push(SummaryRow {
                strategy,
                metric,
                easy: stat(0),
                hard: stat(1),
                total: stat(2),
            });
        }
    }
    rows
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub const TRIALS_CSV: &str = "trials.csv";
pub const SUMMARY_CSV: &str = "summary.csv";
pub const REPORT_JSON: &str = "report.json";

impl ExperimentReport {
    /// One row per (strategy, trial). Absent costs are empty cells.
    pub fn trials_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["strategy".to_string(), "trial".to_string()];
        for scope in TaskScope::ALL {
            for col in ["rescued", "energy_spent", "hp_spent", "energy_per_rescuee", "hp_per_rescuee"] {
                header.push(format!("{col}_{}", scope.label()));
            }
        }
        header.push("rest_events".into());
        header.push("collisions".into());
        header.push("deadlocks".into());
        w.write_record(&header)?;
        for r in &self.records {
            let mut row = vec![r.strategy.to_string(), r.trial.to_string()];
            for c in &r.costs {
                row.push(c.rescued.to_string());
                row.push(c.energy_spent.to_string());
                row.push(c.hp_spent.to_string());
                row.push(opt(c.energy_per_rescuee));
                row.push(opt(c.hp_per_rescuee));
            }
            row.push(r.metrics.rest_events.to_string());
            row.push(r.metrics.collisions.to_string());
            row.push(r.metrics.deadlocks.to_string());
            w.write_record(&row)?;
        }
        finish_csv(w)
    }

    /// One row per (strategy, metric) with n/mean/std for each task scope.
    pub fn summary_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["strategy".to_string(), "metric".to_string()];
        for scope in TaskScope::ALL {
            for col in ["n", "mean", "std"] {
                header.push(format!("{}_{col}", scope.label()));
            }
        }
        w.write_record(&header)?;
        for s in &self.summary {
            let mut row = vec![s.strategy.to_string(), s.metric.label().to_string()];
            for stat in [&s.easy, &s.hard, &s.total] {
                row.push(stat.n.to_string());
                row.push(opt(stat.mean));
                row.push(opt(stat.std));
            }
            w.write_record(&row)?;
        }
        finish_csv(w)
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Domain(e.to_string()))
    }

    pub fn summary_row(&self, strategy: Strategy, metric: Metric) -> Option<&SummaryRow> {
        self.summary
            .iter()
            .find(|r| r.strategy == strategy && r.metric == metric)
    }

    /// Writes `trials.csv`, `summary.csv` and `report.json` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|source| Error::Io {
            path: dir.display().to_string(),
            source,
        })?;
        for (name, body) in [
            (TRIALS_CSV, self.trials_csv()?),
            (SUMMARY_CSV, self.summary_csv()?),
            (REPORT_JSON, self.to_json()?),
        ] {
            let path = dir.join(name);
            std::fs::write(&path, body).map_err(|source| Error::Io {
                path: path.display().to_string(),
                source,
            })?;
        }
        Ok(())
    }
}

fn finish_csv(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w
        .into_inner()
        .map_err(|e| Error::Domain(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Domain(e.to_string()))
}
