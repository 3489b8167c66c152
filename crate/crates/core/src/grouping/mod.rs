//! Splitting a heterogeneous team into a hard-task and an easy-task group.
//!
//! Four strategies are available: hierarchical RNE trust grouping and the
//! distance, energy and health/distance baselines.

mod baselines;
mod bipartition;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Cell;
use crate::needs::{GroupNeedsMatrix, NeedsVector, WeightVector};
use crate::trust::RneConfig;

pub use baselines::{dis_grouping, eng_grouping, hp_dis_grouping};
pub use bipartition::{all_bipartitions, best_split, merge_step, rne_grouping, Bipartition};

/// Dimension of the rescue needs space.
pub const NEEDS_DIM: usize = 7;

/// Component order of a rescue needs vector.
pub const NEEDS_LABELS: [&str; NEEDS_DIM] = ["hp", "v", "sen", "eng", "res", "cap", "obs"];

pub const HP: usize = 0;
pub const SPEED: usize = 1;
pub const SENSING: usize = 2;
pub const ENERGY: usize = 3;
pub const RESOURCES: usize = 4;
pub const CAPACITY: usize = 5;
pub const OBSERVING: usize = 6;

/// Safety needs weigh 6, basic 4, capability 2.
pub fn default_weights() -> WeightVector {
    WeightVector::new(vec![6.0, 6.0, 6.0, 4.0, 2.0, 2.0, 2.0]).expect("static weights are valid")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Carrier,
    Supplier,
    Observer,
}

impl Role {
    pub const ALL: [Role; 3] = [Role::Carrier, Role::Supplier, Role::Observer];

    pub fn name(self) -> &'static str {
        match self {
            Role::Carrier => "carrier",
            Role::Supplier => "supplier",
            Role::Observer => "observer",
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Difficulty {
    Easy,
    Hard,
}

impl fmt::Display for Difficulty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Difficulty::Easy => "easy",
            Difficulty::Hard => "hard",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Strategy {
    #[serde(rename = "rne")]
    Rne,
    #[serde(rename = "dis")]
    Dis,
    #[serde(rename = "eng")]
    Eng,
    #[serde(rename = "hp_dis")]
    HpDis,
}

impl Strategy {
    pub const ALL: [Strategy; 4] = [Strategy::Rne, Strategy::Dis, Strategy::Eng, Strategy::HpDis];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Rne => "rne",
            Strategy::Dis => "dis",
            Strategy::Eng => "eng",
            Strategy::HpDis => "hp_dis",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rne" => Ok(Strategy::Rne),
            "dis" => Ok(Strategy::Dis),
            "eng" => Ok(Strategy::Eng),
            "hp_dis" | "hpdis" | "hp-dis" => Ok(Strategy::HpDis),
            other => Err(Error::Config(format!(
                "unknown strategy {other:?}; expected rne, dis, eng or hp_dis"
            ))),
        }
    }
}

/// What the grouping strategies know about one robot at regroup time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobotSnapshot {
    pub id: String,
    pub role: Role,
    /// `(hp, v, sen, eng, res, cap, obs)`
    pub needs: NeedsVector,
    pub position: Cell,
}

impl RobotSnapshot {
    pub fn new(id: impl Into<String>, role: Role, needs: Vec<f64>, position: Cell) -> Result<Self> {
        let s = Self {
            id: id.into(),
            role,
            needs: NeedsVector::new(needs)?,
            position,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        self.needs.validate()?;
        if self.needs.len() != NEEDS_DIM {
            return Err(Error::Dimension {
                expected: NEEDS_DIM,
                actual: self.needs.len(),
            });
        }
        for idx in [HP, ENERGY] {
            let v = self.needs.values()[idx];
            if v > 100.0 {
                return Err(Error::Domain(format!(
                    "robot {}: {} must be within [0, 100], got {v}",
                    self.id, NEEDS_LABELS[idx]
                )));
            }
        }
        Ok(())
    }

    pub fn need(&self, idx: usize) -> f64 {
        self.needs.values()[idx]
    }
}

/// A task location as seen by the distance-based strategies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskTarget {
    pub position: Cell,
    pub difficulty: Difficulty,
}

/// Final split of the team: one group per task.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupAssignment {
    pub hard_group: Vec<String>,
    pub easy_group: Vec<String>,
    pub strategy: Strategy,
    pub diagnostics: BTreeMap<String, f64>,
}

impl GroupAssignment {
    pub fn group_of(&self, id: &str) -> Option<Difficulty> {
        if self.hard_group.iter().any(|m| m == id) {
            Some(Difficulty::Hard)
        } else if self.easy_group.iter().any(|m| m == id) {
            Some(Difficulty::Easy)
        } else {
            None
        }
    }

    pub fn members(&self, difficulty: Difficulty) -> &[String] {
        match difficulty {
            Difficulty::Hard => &self.hard_group,
            Difficulty::Easy => &self.easy_group,
        }
    }

    /// Checks that the assignment partitions `roster` with half of every role
    /// in each group.
    pub fn validate(&self, roster: &[RobotSnapshot]) -> Result<()> {
        self.validate_partition(roster)?;
        let hard: BTreeSet<&str> = self.hard_group.iter().map(String::as_str).collect();
        for role in Role::ALL {
            let total = roster.iter().filter(|r| r.role == role).count();
            let in_hard = roster
                .iter()
                .filter(|r| r.role == role && hard.contains(r.id.as_str()))
                .count();
            if in_hard * 2 != total {
                return Err(Error::Partition(format!(
                    "hard group holds {in_hard} of {total} {role}s"
                )));
            }
        }
        Ok(())
    }

    /// Checks only that every robot of `roster` is in exactly one group.
    pub fn validate_partition(&self, roster: &[RobotSnapshot]) -> Result<()> {
        let hard: BTreeSet<&str> = self.hard_group.iter().map(String::as_str).collect();
        let easy: BTreeSet<&str> = self.easy_group.iter().map(String::as_str).collect();
        if hard.len() != self.hard_group.len() || easy.len() != self.easy_group.len() {
            return Err(Error::Partition("duplicate member in a group".into()));
        }
        if !hard.is_disjoint(&easy) {
            return Err(Error::Partition("groups overlap".into()));
        }
        let all: BTreeSet<&str> = roster.iter().map(|r| r.id.as_str()).collect();
        let assigned: BTreeSet<&str> = hard.union(&easy).copied().collect();
        if all != assigned {
            return Err(Error::Partition("groups do not cover the roster".into()));
        }
        Ok(())
    }
}

/// Runs one grouping strategy. `tasks` is only consulted by the distance
/// based strategies; `weights` and `cfg` only by RNE grouping.
pub fn assign_groups(
    strategy: Strategy,
    robots: &[RobotSnapshot],
    tasks: &[TaskTarget],
    weights: &WeightVector,
    cfg: &RneConfig,
) -> Result<GroupAssignment> {
    match strategy {
        Strategy::Rne => rne_grouping(robots, weights, cfg),
        Strategy::Dis => dis_grouping(robots, tasks),
        Strategy::Eng => eng_grouping(robots),
        Strategy::HpDis => hp_dis_grouping(robots, tasks),
    }
}

pub(crate) fn needs_matrix<'a>(
    robots: impl IntoIterator<Item = &'a RobotSnapshot>,
) -> Result<GroupNeedsMatrix> {
    GroupNeedsMatrix::new(robots.into_iter().map(|r| r.needs.clone()).collect())
}

/// Robots of each role in id order, and an error for odd role counts.
pub(crate) fn split_by_role(robots: &[RobotSnapshot]) -> Result<Vec<(Role, Vec<&RobotSnapshot>)>> {
    let mut ids = BTreeSet::new();
    for r in robots {
        r.validate()?;
        if !ids.insert(r.id.as_str()) {
            return Err(Error::Partition(format!("duplicate robot id {}", r.id)));
        }
    }
    let mut out = Vec::new();
    for role in Role::ALL {
        let mut members: Vec<&RobotSnapshot> = robots.iter().filter(|r| r.role == role).collect();
        if !members.len().is_multiple_of(2) {
            return Err(Error::Partition(format!(
                "{} {role}s cannot be split into two equal halves",
                members.len()
            )));
        }
        members.sort_by(|a, b| a.id.cmp(&b.id));
        out.push((role, members));
    }
    Ok(out)
}
