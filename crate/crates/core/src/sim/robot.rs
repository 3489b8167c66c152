use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Cell;
use crate::grouping::{Difficulty, Role, RobotSnapshot};
use crate::needs::{NeedsVector, WeightVector};

/// Full-health base stats of a role.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoleStats {
    /// Needs value of HP at 100 %.
    pub max_hp: f64,
    /// Cells per tick at full HP.
    pub base_speed: f64,
    /// Cells.
    pub sensing_range: f64,
    /// Needs value of energy at 100 %.
    pub max_energy: f64,
    pub resources: u32,
    pub capacity: u32,
    /// Cells.
    pub observing_range: f64,
}

/// Base stats per role.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoleTable {
    pub carrier: RoleStats,
    pub supplier: RoleStats,
    pub observer: RoleStats,
}

impl RoleTable {
    pub fn get(&self, role: Role) -> &RoleStats {
        match role {
            Role::Carrier => &self.carrier,
            Role::Supplier => &self.supplier,
            Role::Observer => &self.observer,
        }
    }

    /// Checks the fixed inter-role needs ratios:
    /// `hp_s = hp_c = 2 hp_o`, `v_c = v_s = 1.5 v_o`, `sen_o = 6 sen_c = 6 sen_s`,
    /// `eng_s = eng_c = 1.5 eng_o`, `cap_c = 6 cap_s`, `cap_o = 0`,
    /// `res_s = 10 res_c`, `res_o = 0`, `obs_o = 1000 obs_c = 1000 obs_s`.
    pub fn check_ratios(&self) -> Result<()> {
        let (c, s, o) = (&self.carrier, &self.supplier, &self.observer);
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0);
        let checks: [(&str, bool); 13] = [
            ("hp_s = hp_c", close(s.max_hp, c.max_hp)),
            ("hp_c = 2 hp_o", close(c.max_hp, 2.0 * o.max_hp)),
            ("v_c = v_s", close(c.base_speed, s.base_speed)),
            ("v_c = 1.5 v_o", close(c.base_speed, 1.5 * o.base_speed)),
            ("sen_o = 6 sen_c", close(o.sensing_range, 6.0 * c.sensing_range)),
            ("sen_c = sen_s", close(c.sensing_range, s.sensing_range)),
            ("eng_s = eng_c", close(s.max_energy, c.max_energy)),
            ("eng_c = 1.5 eng_o", close(c.max_energy, 1.5 * o.max_energy)),
            ("cap_c = 6 cap_s", c.capacity == 6 * s.capacity),
            ("cap_o = 0", o.capacity == 0),
            ("res_s = 10 res_c", s.resources == 10 * c.resources),
            ("res_o = 0", o.resources == 0),
            (
                "obs_o = 1000 obs_c = 1000 obs_s",
                close(o.observing_range, 1000.0 * c.observing_range)
                    && close(c.observing_range, s.observing_range),
            ),
        ];
        for (name, ok) in checks {
            if !ok {
                return Err(Error::Config(format!("role stats violate {name}")));
            }
        }
        for role in Role::ALL {
            let st = self.get(role);
            for (name, v) in [
                ("max_hp", st.max_hp),
                ("base_speed", st.base_speed),
                ("max_energy", st.max_energy),
            ] {
                if !(v > 0.0) {
                    return Err(Error::Config(format!("{role} {name} must be positive")));
                }
            }
            if st.max_hp > 100.0 || st.max_energy > 100.0 {
                return Err(Error::Config(format!(
                    "{role} max_hp and max_energy must not exceed 100"
                )));
            }
            if st.base_speed > 1.0 {
                return Err(Error::Config(format!(
                    "{role} base_speed is capped at 1 cell per tick"
                )));
            }
        }
        Ok(())
    }
}

impl Default for RoleTable {
    fn default() -> Self {
        Self {
            carrier: RoleStats {
                max_hp: 100.0,
                base_speed: 0.9,
                sensing_range: 2.0,
                max_energy: 100.0,
                resources: 2,
                capacity: 6,
                observing_range: 0.01,
            },
            supplier: RoleStats {
                max_hp: 100.0,
                base_speed: 0.9,
                sensing_range: 2.0,
                max_energy: 100.0,
                resources: 20,
                capacity: 1,
                observing_range: 0.01,
            },
            observer: RoleStats {
                max_hp: 50.0,
                base_speed: 0.6,
                sensing_range: 12.0,
                max_energy: 100.0 / 1.5,
                resources: 0,
                capacity: 0,
                observing_range: 10.0,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum Mode {
    /// On the mission; see [`Goal`].
    Active,
    /// Heading to the rest position.
    ToRest,
    Resting { ticks_left: u32 },
    /// At the start cell, waiting for the next round.
    Waiting,
}

impl Mode {
    pub fn label(&self) -> &'static str {
        match self {
            Mode::Active => "active",
            Mode::ToRest => "to_rest",
            Mode::Resting { .. } => "resting",
            Mode::Waiting => "waiting",
        }
    }
}

/// Where an active robot is headed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Goal {
    /// Travelling to its group's task site.
    Task,
    /// Next to the rescuee pile, rescuing.
    Work,
    Home,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobotState {
    pub id: String,
    pub role: Role,
    pub stats: RoleStats,
    pub start: Cell,
    pub position: Cell,
    /// Percent.
    pub hp: f64,
    /// Percent.
    pub energy: f64,
    pub resources: u32,
    pub carried: u32,
    pub mode: Mode,
    pub goal: Goal,
    pub group: Option<Difficulty>,
    /// Task the carried rescuees came from.
    pub carried_from: Option<Difficulty>,
    /// Fraction of the next cell already travelled.
    pub progress: f64,
    /// Ticks spent on the current rescue.
    pub work_ticks: u32,
}

impl RobotState {
    pub fn new(id: impl Into<String>, role: Role, stats: RoleStats, start: Cell) -> Self {
        Self {
            id: id.into(),
            role,
            stats,
            start,
            position: start,
            hp: 100.0,
            energy: 100.0,
            resources: stats.resources,
            carried: 0,
            mode: Mode::Waiting,
            goal: Goal::Home,
            group: None,
            carried_from: None,
            progress: 0.0,
            work_ticks: 0,
        }
    }

    pub fn base_speed(&self) -> f64 {
        self.stats.base_speed
    }

    pub fn capacity(&self) -> u32 {
        self.stats.capacity
    }

    fn hp_factor(&self) -> f64 {
        (self.hp / 100.0).clamp(0.0, 1.0)
    }

    pub fn effective_sensing(&self) -> f64 {
        self.stats.sensing_range * self.hp_factor()
    }

    pub fn effective_observing(&self) -> f64 {
        self.stats.observing_range * self.hp_factor()
    }

    /// Current needs `(hp, v, sen, eng, res, cap, obs)`. HP scales speed and
    /// both ranges; capacity counts free slots.
    pub fn needs(&self) -> [f64; 7] {
        let f = self.hp_factor();
        [
            self.stats.max_hp * f,
            self.stats.base_speed * f,
            self.stats.sensing_range * f,
            self.stats.max_energy * (self.energy / 100.0).clamp(0.0, 1.0),
            f64::from(self.resources),
            f64::from(self.stats.capacity.saturating_sub(self.carried)),
            self.stats.observing_range * f,
        ]
    }

    /// Collision priority: total weighted needs mass.
    pub fn priority(&self, weights: &WeightVector) -> f64 {
        self.needs()
            .iter()
            .zip(weights.values())
            .map(|(n, w)| n * w)
            .sum()
    }

    pub fn snapshot(&self) -> Result<RobotSnapshot> {
        Ok(RobotSnapshot {
            id: self.id.clone(),
            role: self.role,
            needs: NeedsVector::new(self.needs().to_vec())?,
            position: self.position,
        })
    }

    pub fn is_resting(&self) -> bool {
        matches!(self.mode, Mode::ToRest | Mode::Resting { .. })
    }

    /// Still working on the current round's task.
    pub fn on_task(&self) -> bool {
        self.mode == Mode::Active && matches!(self.goal, Goal::Task | Goal::Work)
    }
}

/// Cells per tick, scaled linearly by HP and cut by 30 % when the robot's
/// group has no observer.
pub fn effective_speed(robot: &RobotState, group_has_observer: bool) -> f64 {
    let observer_factor = if group_has_observer { 1.0 } else { 0.7 };
    robot.base_speed() * robot.hp_factor() * observer_factor
}
