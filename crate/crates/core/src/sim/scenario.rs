//! Scenario files: map geometry, task sites, roster, role stats, weights and
//! experiment settings.

use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::robot::RoleTable;
use crate::error::{Error, Result};
use crate::geometry::Cell;
use crate::grouping::{Difficulty, Role, Strategy, TaskTarget, NEEDS_DIM};
use crate::needs::WeightVector;
use crate::trust::RneConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskSiteConfig {
    pub name: String,
    /// The rescuee pile. Robots rescue from any adjacent cell.
    pub position: Cell,
    pub difficulty: Difficulty,
    pub rescuee_count: u32,
    #[serde(default)]
    pub debris_cells: Vec<Cell>,
    #[serde(default)]
    pub radiation_cells: Vec<Cell>,
}

fn default_tick_seconds() -> f64 {
    0.1
}
fn default_mission_seconds() -> f64 {
    600.0
}
fn default_rest_seconds() -> f64 {
    30.0
}
fn default_rescue_seconds() -> f64 {
    1.0
}
fn default_rest_radius() -> i32 {
    2
}
fn default_energy_per_step() -> f64 {
    0.0045
}
fn default_hp_per_radiation_tick() -> f64 {
    0.0003
}
fn default_rest_threshold() -> f64 {
    30.0
}
fn default_radiation_penalty() -> u32 {
    40
}

/// Map and timing of one mission.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorldConfig {
    pub width: i32,
    pub height: i32,
    pub task_sites: Vec<TaskSiteConfig>,
    pub rest_position: Cell,
    /// Robots rest anywhere within this king-move radius of `rest_position`.
    #[serde(default = "default_rest_radius")]
    pub rest_radius: i32,
    #[serde(default = "default_tick_seconds")]
    pub tick_seconds: f64,
    #[serde(default = "default_mission_seconds")]
    pub mission_seconds: f64,
    #[serde(default = "default_rest_seconds")]
    pub rest_seconds: f64,
    /// Time to pick up one rescuee.
    #[serde(default = "default_rescue_seconds")]
    pub rescue_seconds: f64,
    /// Energy percentage points per cell moved.
    #[serde(default = "default_energy_per_step")]
    pub energy_per_step: f64,
    /// HP percentage points per tick on a radiation cell.
    #[serde(default = "default_hp_per_radiation_tick")]
    pub hp_per_radiation_tick: f64,
    /// Below this energy or HP percentage a robot goes to rest.
    #[serde(default = "default_rest_threshold")]
    pub rest_threshold: f64,
    /// Extra path cost of a radiation cell for robots that can sense it.
    #[serde(default = "default_radiation_penalty")]
    pub radiation_penalty: u32,
}

impl WorldConfig {
    pub fn ticks(&self) -> u64 {
        (self.mission_seconds / self.tick_seconds).round() as u64
    }

    pub fn rest_ticks(&self) -> u32 {
        (self.rest_seconds / self.tick_seconds).round() as u32
    }

    pub fn rescue_ticks(&self) -> u32 {
        ((self.rescue_seconds / self.tick_seconds).round() as u32).max(1)
    }

    pub fn site(&self, difficulty: Difficulty) -> Option<&TaskSiteConfig> {
        self.task_sites.iter().find(|s| s.difficulty == difficulty)
    }

    pub fn task_targets(&self) -> Vec<TaskTarget> {
        self.task_sites
            .iter()
            .map(|s| TaskTarget {
                position: s.position,
                difficulty: s.difficulty,
            })
            .collect()
    }

    /// Checks bounds, site layout and the hard/easy ordering relative to
    /// the given start cells.
    pub fn validate(&self, starts: &[Cell]) -> Result<()> {
        if self.width <= 0 || self.height <= 0 {
            return Err(Error::Config("grid must have positive size".into()));
        }
        for (name, v) in [
            ("tick_seconds", self.tick_seconds),
            ("mission_seconds", self.mission_seconds),
            ("rescue_seconds", self.rescue_seconds),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Config(format!("{name} must be positive")));
            }
        }
        if self.rest_seconds < 0.0 || self.energy_per_step < 0.0 || self.hp_per_radiation_tick < 0.0 {
            return Err(Error::Config("rates and durations must be non-negative".into()));
        }
        let in_bounds = |c: Cell| c.x >= 0 && c.y >= 0 && c.x < self.width && c.y < self.height;
        if self.task_sites.len() != 2 {
            return Err(Error::Config(format!(
                "exactly two task sites are required, got {}",
                self.task_sites.len()
            )));
        }
        let easy = self
            .site(Difficulty::Easy)
            .ok_or_else(|| Error::Config("missing easy task site".into()))?;
        let hard = self
            .site(Difficulty::Hard)
            .ok_or_else(|| Error::Config("missing hard task site".into()))?;

        let mut seen = BTreeSet::new();
        for site in &self.task_sites {
            let cells: BTreeSet<Cell> = std::iter::once(site.position)
                .chain(site.debris_cells.iter().copied())
                .chain(site.radiation_cells.iter().copied())
                .collect();
            for &c in &cells {
                if !in_bounds(c) {
                    return Err(Error::Config(format!("site {}: cell {c} out of bounds", site.name)));
                }
                if !seen.insert(c) {
                    return Err(Error::Config(format!("task sites overlap at {c}")));
                }
            }
            if site.debris_cells.contains(&site.position) {
                return Err(Error::Config(format!("site {}: pile sits on debris", site.name)));
            }
        }
        if hard.debris_cells.len() <= easy.debris_cells.len()
            || hard.radiation_cells.len() <= easy.radiation_cells.len()
        {
            return Err(Error::Config(
                "hard site needs strictly more debris and radiation cells than the easy site"
                    .into(),
            ));
        }
        if !in_bounds(self.rest_position) {
            return Err(Error::Config("rest position out of bounds".into()));
        }
        if !starts.is_empty() {
            let n = starts.len() as f64;
            let cx = starts.iter().map(|c| f64::from(c.x)).sum::<f64>() / n;
            let cy = starts.iter().map(|c| f64::from(c.y)).sum::<f64>() / n;
            let dist = |c: Cell| (f64::from(c.x) - cx).hypot(f64::from(c.y) - cy);
            if dist(hard.position) <= dist(easy.position) {
                return Err(Error::Config(
                    "hard site must lie farther from the start area than the easy site".into(),
                ));
            }
        }
        let debris: BTreeSet<Cell> = self
            .task_sites
            .iter()
            .flat_map(|s| s.debris_cells.iter().copied())
            .collect();
        for &s in starts {
            if !in_bounds(s) || debris.contains(&s) {
                return Err(Error::Config(format!("start cell {s} is out of bounds or on debris")));
            }
        }
        if debris.contains(&self.rest_position) {
            return Err(Error::Config("rest position is on debris".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RobotConfig {
    pub id: String,
    pub role: Role,
    pub start: Cell,
}

/// Gaussian initial energy and HP, in percent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitialSpec {
    pub energy_mean: f64,
    pub energy_std: f64,
    pub hp_mean: f64,
    pub hp_std: f64,
}

impl Default for InitialSpec {
    fn default() -> Self {
        Self {
            energy_mean: 80.0,
            energy_std: 20.0,
            hp_mean: 90.0,
            hp_std: 10.0,
        }
    }
}

fn default_trials() -> usize {
    10
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub world: WorldConfig,
    #[serde(default)]
    pub roles: RoleTable,
    pub robots: Vec<RobotConfig>,
    pub weights: Vec<f64>,
    #[serde(default)]
    pub rne: RneConfig,
    #[serde(default = "default_strategy")]
    pub strategy: Strategy,
    #[serde(default = "default_trials")]
    pub trials: usize,
    /// Seeds for single-trial runs; experiments derive initials from
    /// `master_seed` instead.
    #[serde(default)]
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default)]
    pub initial: InitialSpec,
}

fn default_strategy() -> Strategy {
    Strategy::Rne
}

impl Scenario {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        let scenario: Scenario = serde_json::from_str(&text).map_err(|source| Error::Json {
            path: path.display().to_string(),
            source,
        })?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn weight_vector(&self) -> Result<WeightVector> {
        if self.weights.len() != NEEDS_DIM {
            return Err(Error::Config(format!(
                "weights must have {NEEDS_DIM} entries, got {}",
                self.weights.len()
            )));
        }
        WeightVector::new(self.weights.clone()).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn starts(&self) -> Vec<Cell> {
        self.robots.iter().map(|r| r.start).collect()
    }

    pub fn validate(&self) -> Result<()> {
        self.world.validate(&self.starts())?;
        self.roles.check_ratios()?;
        self.weight_vector()?;
        self.rne.validate()?;
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        let mut ids = BTreeSet::new();
        let mut starts = BTreeSet::new();
        let piles: BTreeSet<Cell> = self.world.task_sites.iter().map(|s| s.position).collect();
        for r in &self.robots {
            if !ids.insert(r.id.as_str()) {
                return Err(Error::Config(format!("duplicate robot id {}", r.id)));
            }
            if !starts.insert(r.start) {
                return Err(Error::Config(format!("robots share start cell {}", r.start)));
            }
            if piles.contains(&r.start) {
                return Err(Error::Config(format!("robot {} starts on a rescuee pile", r.id)));
            }
        }
        for role in Role::ALL {
            let n = self.robots.iter().filter(|r| r.role == role).count();
            if n % 2 != 0 {
                return Err(Error::Config(format!("odd number of {role}s ({n})")));
            }
        }
        for (name, v) in [
            ("energy_std", self.initial.energy_std),
            ("hp_std", self.initial.hp_std),
        ] {
            if v < 0.0 || !v.is_finite() {
                return Err(Error::Config(format!("{name} must be non-negative")));
            }
        }
        Ok(())
    }

    /// The 40 x 40 desk-scale mission: six carriers, four suppliers and two
    /// observers starting along the bottom edge, an easy site up and to the
    /// left, and a walled, irradiated hard site in the far corner.
    pub fn desk_scale() -> Self {
        let mut robots = Vec::new();
        let roster = [
            (Role::Carrier, 6, "c"),
            (Role::Supplier, 4, "s"),
            (Role::Observer, 2, "o"),
        ];
        let mut x = 8;
        for (role, count, prefix) in roster {
            for i in 1..=count {
                robots.push(RobotConfig {
                    id: format!("{prefix}{i}"),
                    role,
                    start: Cell::new(x, 2),
                });
                x += 2;
            }
        }

        let rect = |x0: i32, x1: i32, y0: i32, y1: i32| -> Vec<Cell> {
            (y0..=y1)
                .flat_map(|y| (x0..=x1).map(move |x| Cell::new(x, y)))
                .collect()
        };

        // Easy site: one short wall and a small radiation patch.
        let easy_debris: Vec<Cell> = (6..=11).map(|x| Cell::new(x, 13)).collect();
        let easy_radiation = rect(13, 14, 15, 16);

        // Hard site: two walls with single gaps funnel robots through a
        // radiation field around the pile.
        let mut hard_debris: Vec<Cell> = (18..=36)
            .filter(|&x| x != 21)
            .map(|x| Cell::new(x, 22))
            .collect();
        hard_debris.extend((22..=38).filter(|&x| x != 34).map(|x| Cell::new(x, 28)));
        hard_debris.extend(rect(36, 37, 33, 34));
        let hard_radiation: Vec<Cell> = rect(26, 33, 30, 35)
            .into_iter()
            .filter(|&c| c != Cell::new(29, 33))
            .chain(rect(30, 35, 25, 26))
            .collect();

        Scenario {
            world: WorldConfig {
                width: 40,
                height: 40,
                task_sites: vec![
                    TaskSiteConfig {
                        name: "easy".into(),
                        position: Cell::new(10, 16),
                        difficulty: Difficulty::Easy,
                        rescuee_count: 1000,
                        debris_cells: easy_debris,
                        radiation_cells: easy_radiation,
                    },
                    TaskSiteConfig {
                        name: "hard".into(),
                        position: Cell::new(29, 33),
                        difficulty: Difficulty::Hard,
                        rescuee_count: 1000,
                        debris_cells: hard_debris,
                        radiation_cells: hard_radiation,
                    },
                ],
                rest_position: Cell::new(36, 4),
                rest_radius: default_rest_radius(),
                tick_seconds: default_tick_seconds(),
                mission_seconds: default_mission_seconds(),
                rest_seconds: default_rest_seconds(),
                rescue_seconds: default_rescue_seconds(),
                energy_per_step: default_energy_per_step(),
                hp_per_radiation_tick: default_hp_per_radiation_tick(),
                rest_threshold: default_rest_threshold(),
                radiation_penalty: default_radiation_penalty(),
            },
            roles: RoleTable::default(),
            robots,
            weights: crate::grouping::default_weights().values().to_vec(),
            rne: RneConfig::default(),
            strategy: Strategy::Rne,
            trials: default_trials(),
            seeds: vec![7],
            master_seed: 42,
            initial: InitialSpec::default(),
        }
    }
}
