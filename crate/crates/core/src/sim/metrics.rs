use serde::{Deserialize, Serialize};

use crate::grouping::Difficulty;

/// Rescues and costs accumulated for one task.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct TaskTally {
    pub rescued: u32,
    /// Energy percentage points spent by robots assigned to the task.
    pub energy_spent: f64,
    /// HP percentage points spent by robots assigned to the task.
    pub hp_spent: f64,
}

impl TaskTally {
    fn add(&mut self, other: &TaskTally) {
        self.rescued += other.rescued;
        self.energy_spent += other.energy_spent;
        self.hp_spent += other.hp_spent;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundMetrics {
    pub index: usize,
    pub start_tick: u64,
    /// `None` when the mission clock ran out mid-round.
    pub end_tick: Option<u64>,
    pub hard_group: Vec<String>,
    pub easy_group: Vec<String>,
    pub easy: TaskTally,
    pub hard: TaskTally,
}

impl RoundMetrics {
    pub fn tally_mut(&mut self, d: Difficulty) -> &mut TaskTally {
        match d {
            Difficulty::Easy => &mut self.easy,
            Difficulty::Hard => &mut self.hard,
        }
    }
}

/// Outcome of one trial.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TrialMetrics {
    pub rescued_easy: u32,
    pub rescued_hard: u32,
    pub energy_spent_total: f64,
    pub hp_spent_total: f64,
    pub easy: TaskTally,
    pub hard: TaskTally,
    pub initial_rescuees: u32,
    pub ticks: u64,
    pub rest_events: u32,
    pub collisions: u64,
    pub deadlocks: u64,
    pub deadlock_stalls: u64,
    pub unreachable_targets: u64,
    pub rounds: Vec<RoundMetrics>,
}

impl TrialMetrics {
    pub fn rescued_total(&self) -> u32 {
        self.rescued_easy + self.rescued_hard
    }

    pub fn tally(&self, d: Difficulty) -> &TaskTally {
        match d {
            Difficulty::Easy => &self.easy,
            Difficulty::Hard => &self.hard,
        }
    }

    /// Recomputes task and total tallies from the per-round breakdown.
    pub(crate) fn finalize(&mut self) {
        let mut easy = TaskTally::default();
        let mut hard = TaskTally::default();
        for r in &self.rounds {
            easy.add(&r.easy);
            hard.add(&r.hard);
        }
        self.easy = easy;
        self.hard = hard;
        self.rescued_easy = easy.rescued;
        self.rescued_hard = hard.rescued;
        self.energy_spent_total = easy.energy_spent + hard.energy_spent;
        self.hp_spent_total = easy.hp_spent + hard.hp_spent;
    }
}
