use serde::{Deserialize, Serialize};

use super::grid::{DistanceField, Grid};
use super::metrics::{RoundMetrics, TrialMetrics};
use super::motion::{movement_tick, Mover, Occupancy};
use super::robot::{effective_speed, Goal, Mode, RobotState};
use super::scenario::{Scenario, TaskSiteConfig, WorldConfig};
use crate::error::{Error, Result};
use crate::geometry::Cell;
use crate::grouping::{assign_groups, Difficulty, GroupAssignment, Role, RobotSnapshot, Strategy};
use crate::needs::WeightVector;
use crate::trust::RneConfig;

/// Starting energy and HP (percent) of every robot, in roster order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobotInitials {
    pub energy: f64,
    pub hp: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SiteState {
    pub config: TaskSiteConfig,
    pub remaining: u32,
}

/// Why a rescue attempt was turned down.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RescueRefusal {
    NoCapacity,
    NoResources,
    NothingLeft,
    NotAdjacent,
}

/// One robot picks up one rescuee: the site loses one, the robot fills one
/// capacity slot, and the group member holding the most resources (lowest
/// index on ties) gives up one resource.
pub fn rescue(
    robots: &mut [RobotState],
    rescuer: usize,
    group: &[usize],
    site: &mut SiteState,
) -> std::result::Result<(), RescueRefusal> {
    let r = &robots[rescuer];
    if r.position.chebyshev(site.config.position) > 1 {
        return Err(RescueRefusal::NotAdjacent);
    }
    if site.remaining == 0 {
        return Err(RescueRefusal::NothingLeft);
    }
    if r.carried >= r.capacity() {
        return Err(RescueRefusal::NoCapacity);
    }
    let donor = group
        .iter()
        .copied()
        .filter(|&i| robots[i].resources > 0)
        .max_by(|&a, &b| robots[a].resources.cmp(&robots[b].resources).then(b.cmp(&a)))
        .ok_or(RescueRefusal::NoResources)?;
    robots[donor].resources -= 1;
    site.remaining -= 1;
    let r = &mut robots[rescuer];
    r.carried += 1;
    r.carried_from = Some(site.config.difficulty);
    Ok(())
}

/// One line of the optional per-tick trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub tick: u64,
    pub robot_id: String,
    pub x: i32,
    pub y: i32,
    pub hp: f64,
    pub energy: f64,
    pub mode: String,
}

struct Fields {
    // Index 0: plain; index 1: radiation-avoiding.
    home: Vec<[DistanceField; 2]>,
    rest: [DistanceField; 2],
    easy: [DistanceField; 2],
    hard: [DistanceField; 2],
}

fn pick_field<'a>(fields: &'a Fields, r: &RobotState, i: usize) -> Option<&'a DistanceField> {
    let avoid = usize::from(r.effective_sensing() >= 1.0);
    match (r.mode, r.goal) {
        (Mode::ToRest, _) => Some(&fields.rest[avoid]),
        (Mode::Active, Goal::Home) => Some(&fields.home[i][avoid]),
        (Mode::Active, Goal::Task) => match r.group {
            Some(Difficulty::Easy) => Some(&fields.easy[avoid]),
            Some(Difficulty::Hard) => Some(&fields.hard[avoid]),
            None => None,
        },
        _ => None,
    }
}

/// A running mission.
pub struct Simulation {
    world: WorldConfig,
    grid: Grid,
    robots: Vec<RobotState>,
    sites: Vec<SiteState>,
    weights: WeightVector,
    rne: RneConfig,
    strategy: Strategy,
    occupancy: Occupancy,
    fields: Fields,
    tick: u64,
    total_ticks: u64,
    round_active: bool,
    assignment: Option<GroupAssignment>,
    metrics: TrialMetrics,
}

impl Simulation {
    /// Builds the world from a validated scenario with the given initial
    /// energy/HP per robot.
    pub fn new(scenario: &Scenario, strategy: Strategy, initials: &[RobotInitials]) -> Result<Self> {
        scenario.validate()?;
        if initials.len() != scenario.robots.len() {
            return Err(Error::Config(format!(
                "{} initial conditions for {} robots",
                initials.len(),
                scenario.robots.len()
            )));
        }
        let robots = scenario
            .robots
            .iter()
            .zip(initials)
            .map(|(cfg, init)| {
                let mut r = RobotState::new(
                    cfg.id.clone(),
                    cfg.role,
                    *scenario.roles.get(cfg.role),
                    cfg.start,
                );
                r.energy = init.energy.clamp(0.0, 100.0);
                r.hp = init.hp.clamp(0.0, 100.0);
                r
            })
            .collect();
        Self::from_parts(
            scenario.world.clone(),
            robots,
            scenario.weight_vector()?,
            scenario.rne,
            strategy,
        )
    }

    /// Builds a simulation from explicit robots, skipping scenario-level
    /// checks. Used for hand-made fixtures.
    pub fn from_parts(
        world: WorldConfig,
        robots: Vec<RobotState>,
        weights: WeightVector,
        rne: RneConfig,
        strategy: Strategy,
    ) -> Result<Self> {
        let mut grid = Grid::new(world.width, world.height);
        for site in &world.task_sites {
            for &c in &site.debris_cells {
                grid.add_debris(c);
            }
            for &c in &site.radiation_cells {
                grid.add_radiation(c);
            }
            grid.reserve(site.position);
        }
        let mut occupancy = Occupancy::new();
        for (i, r) in robots.iter().enumerate() {
            if !grid.passable(r.position) || !occupancy.place(i, r.position) {
                return Err(Error::Config(format!(
                    "robot {} cannot stand on {}",
                    r.id, r.position
                )));
            }
        }
        let both = |goals: &[Cell]| {
            [
                grid.distance_field(goals, 0),
                grid.distance_field(goals, world.radiation_penalty),
            ]
        };
        let site_goals = |d: Difficulty| -> Result<Vec<Cell>> {
            let site = world
                .site(d)
                .ok_or_else(|| Error::Config(format!("missing {d} site")))?;
            Ok(site.position.neighbors().filter(|&c| grid.passable(c)).collect())
        };
        let rest_goals: Vec<Cell> = (-world.rest_radius..=world.rest_radius)
            .flat_map(|dy| {
                (-world.rest_radius..=world.rest_radius)
                    .map(move |dx| Cell::new(world.rest_position.x + dx, world.rest_position.y + dy))
            })
            .filter(|&c| grid.passable(c))
            .collect();
        let fields = Fields {
            home: robots.iter().map(|r| both(&[r.start])).collect(),
            rest: both(&rest_goals),
            easy: both(&site_goals(Difficulty::Easy)?),
            hard: both(&site_goals(Difficulty::Hard)?),
        };
        let sites = world
            .task_sites
            .iter()
            .map(|c| SiteState {
                config: c.clone(),
                remaining: c.rescuee_count,
            })
            .collect::<Vec<_>>();
        let metrics = TrialMetrics {
            initial_rescuees: sites.iter().map(|s| s.remaining).sum(),
            ..TrialMetrics::default()
        };
        Ok(Self {
            total_ticks: world.ticks(),
            world,
            grid,
            robots,
            sites,
            weights,
            rne,
            strategy,
            occupancy,
            fields,
            tick: 0,
            round_active: false,
            assignment: None,
            metrics,
        })
    }

    pub fn robots(&self) -> &[RobotState] {
        &self.robots
    }

    pub fn robots_mut(&mut self) -> &mut [RobotState] {
        &mut self.robots
    }

    pub fn sites(&self) -> &[SiteState] {
        &self.sites
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn tick_count(&self) -> u64 {
        self.tick
    }

    pub fn total_ticks(&self) -> u64 {
        self.total_ticks
    }

    pub fn finished(&self) -> bool {
        self.tick >= self.total_ticks
    }

    pub fn round_active(&self) -> bool {
        self.round_active
    }

    pub fn assignment(&self) -> Option<&GroupAssignment> {
        self.assignment.as_ref()
    }

    pub fn metrics(&self) -> TrialMetrics {
        let mut m = self.metrics.clone();
        m.ticks = self.tick;
        m.finalize();
        m
    }

    pub fn snapshots(&self) -> Result<Vec<RobotSnapshot>> {
        self.robots.iter().map(RobotState::snapshot).collect()
    }

    pub fn trace_rows(&self) -> impl Iterator<Item = TraceRow> + '_ {
        self.robots.iter().map(move |r| TraceRow {
            tick: self.tick,
            robot_id: r.id.clone(),
            x: r.position.x,
            y: r.position.y,
            hp: r.hp,
            energy: r.energy,
            mode: r.mode.label().to_string(),
        })
    }

    /// Runs the whole mission: regroup whenever a round ends, until the
    /// clock runs out.
    pub fn run(&mut self, mut trace: Option<&mut dyn FnMut(TraceRow)>) -> Result<TrialMetrics> {
        while !self.finished() {
            self.step_with_regroup()?;
            if let Some(t) = trace.as_deref_mut() {
                for row in self.trace_rows() {
                    t(row);
                }
            }
        }
        Ok(self.metrics())
    }

    /// Plays one round under `assignment`, stopping when every robot is
    /// back at its start or resting, or when the clock runs out.
    pub fn run_round(&mut self, assignment: GroupAssignment) -> Result<RoundMetrics> {
        self.begin_round(assignment)?;
        while self.round_active && !self.finished() {
            self.step();
            self.close_round_if_done();
        }
        Ok(self
            .metrics
            .rounds
            .last()
            .cloned()
            .expect("a round was started"))
    }

    /// Regroups with the configured strategy if a round can start, then
    /// advances one tick.
    pub fn step_with_regroup(&mut self) -> Result<()> {
        self.close_round_if_done();
        if !self.round_active && self.robots.iter().any(|r| r.mode == Mode::Waiting) {
            let snapshots = self.snapshots()?;
            let assignment = assign_groups(
                self.strategy,
                &snapshots,
                &self.world.task_targets(),
                &self.weights,
                &self.rne,
            )?;
            log::debug!(
                "tick {}: round {} hard={:?} easy={:?}",
                self.tick,
                self.metrics.rounds.len(),
                assignment.hard_group,
                assignment.easy_group
            );
            self.begin_round(assignment)?;
        }
        self.step();
        Ok(())
    }

    fn close_round_if_done(&mut self) {
        if self.round_active
            && self
                .robots
                .iter()
                .all(|r| matches!(r.mode, Mode::Waiting | Mode::ToRest | Mode::Resting { .. }))
        {
            self.round_active = false;
            if let Some(round) = self.metrics.rounds.last_mut() {
                round.end_tick = Some(self.tick);
            }
        }
    }

    /// Assigns groups and sends every waiting robot to its task. Role
    /// quotas are not enforced here so hand-built fixtures can use any
    /// partition of the roster.
    pub fn begin_round(&mut self, assignment: GroupAssignment) -> Result<()> {
        assignment.validate_partition(&self.snapshots()?)?;
        for r in &mut self.robots {
            r.group = assignment.group_of(&r.id);
            if r.mode == Mode::Waiting {
                r.resources = r.stats.resources;
                r.mode = Mode::Active;
                r.goal = Goal::Task;
                r.progress = 0.0;
                r.work_ticks = 0;
            }
        }
        self.metrics.rounds.push(RoundMetrics {
            index: self.metrics.rounds.len(),
            start_tick: self.tick,
            end_tick: None,
            hard_group: assignment.hard_group.clone(),
            easy_group: assignment.easy_group.clone(),
            easy: Default::default(),
            hard: Default::default(),
        });
        self.assignment = Some(assignment);
        self.round_active = true;
        Ok(())
    }

    /// Advances the world by one tick without regrouping.
    pub fn step(&mut self) {
        self.advance_rest();
        self.move_robots();
        self.apply_radiation();
        self.arrivals();
        self.work();
        self.check_thresholds();
        self.tick += 1;
    }

    fn group_has_observer(&self, group: Option<Difficulty>) -> bool {
        group.is_some_and(|g| {
            self.robots
                .iter()
                .any(|r| r.role == Role::Observer && r.group == Some(g) && !r.is_resting())
        })
    }

    fn field_for(&self, i: usize) -> Option<&DistanceField> {
        pick_field(&self.fields, &self.robots[i], i)
    }

    fn record_cost(&mut self, group: Option<Difficulty>, energy: f64, hp: f64) {
        if let (Some(g), Some(round)) = (group, self.metrics.rounds.last_mut()) {
            let t = round.tally_mut(g);
            t.energy_spent += energy;
            t.hp_spent += hp;
        }
    }

    fn advance_rest(&mut self) {
        let threshold = self.world.rest_threshold;
        for r in &mut self.robots {
            if let Mode::Resting { ticks_left } = r.mode {
                let left = ticks_left.saturating_sub(1);
                if left == 0 {
                    if r.energy < threshold {
                        r.energy = 100.0;
                    }
                    if r.hp < threshold {
                        r.hp = 100.0;
                    }
                    r.mode = Mode::Active;
                    r.goal = Goal::Home;
                    r.progress = 0.0;
                } else {
                    r.mode = Mode::Resting { ticks_left: left };
                }
            }
        }
    }

    fn move_robots(&mut self) {
        let mut due = Vec::new();
        for i in 0..self.robots.len() {
            let Some(field) = self.field_for(i) else {
                continue;
            };
            let pos = self.robots[i].position;
            if !field.reachable(pos) {
                self.metrics.unreachable_targets += 1;
                log::warn!("robot {} cannot reach its target from {pos}", self.robots[i].id);
                let r = &mut self.robots[i];
                match (r.mode, r.goal) {
                    (Mode::Active, Goal::Task) => r.goal = Goal::Home,
                    (Mode::Active, _) => r.mode = Mode::Waiting,
                    (Mode::ToRest, _) => {
                        r.mode = Mode::Resting {
                            ticks_left: self.world.rest_ticks().max(1),
                        }
                    }
                    _ => {}
                }
                continue;
            }
            if field.at_goal(pos) {
                continue;
            }
            let speed = effective_speed(&self.robots[i], self.group_has_observer(self.robots[i].group));
            let r = &mut self.robots[i];
            r.progress += speed;
            if r.progress >= 1.0 {
                due.push(i);
            }
        }

        let moves = {
            let movers: Vec<Mover<'_>> = due
                .iter()
                .map(|&i| Mover {
                    robot: i,
                    id: &self.robots[i].id,
                    position: self.robots[i].position,
                    priority: self.robots[i].priority(&self.weights),
                    field: pick_field(&self.fields, &self.robots[i], i)
                        .expect("due robots have a field"),
                })
                .collect();
            movement_tick(&self.grid, &mut self.occupancy, &movers)
        };
        self.metrics.collisions += moves.collisions as u64;
        self.metrics.deadlocks += moves.deadlocks as u64;
        self.metrics.deadlock_stalls += moves.stalls as u64;

        let cost = self.world.energy_per_step;
        for m in &moves.moves {
            let r = &mut self.robots[m.robot];
            r.position = m.to;
            r.progress -= 1.0;
            let spent = cost.min(r.energy);
            r.energy -= spent;
            let group = r.group;
            self.record_cost(group, spent, 0.0);
        }
        for &i in &due {
            let r = &mut self.robots[i];
            r.progress = r.progress.min(1.0);
        }
    }

    fn apply_radiation(&mut self) {
        let cost = self.world.hp_per_radiation_tick;
        for i in 0..self.robots.len() {
            if self.grid.is_radiation(self.robots[i].position) {
                let r = &mut self.robots[i];
                let spent = cost.min(r.hp);
                r.hp -= spent;
                let group = r.group;
                self.record_cost(group, 0.0, spent);
            }
        }
    }

    fn arrivals(&mut self) {
        let rest_ticks = self.world.rest_ticks();
        for i in 0..self.robots.len() {
            let at_goal = self.field_for(i).is_some_and(|f| f.at_goal(self.robots[i].position));
            let r = &mut self.robots[i];
            match (r.mode, r.goal) {
                (Mode::Active, Goal::Task) if at_goal => {
                    r.goal = Goal::Work;
                    r.work_ticks = 0;
                }
                (Mode::Active, Goal::Home) if r.position == r.start => {
                    if r.carried > 0 {
                        let from = r.carried_from.unwrap_or(Difficulty::Easy);
                        let n = r.carried;
                        if let Some(round) = self.metrics.rounds.last_mut() {
                            round.tally_mut(from).rescued += n;
                        }
                    }
                    r.carried = 0;
                    r.carried_from = None;
                    r.mode = Mode::Waiting;
                    r.progress = 0.0;
                }
                (Mode::ToRest, _) if at_goal => {
                    r.mode = if rest_ticks == 0 {
                        Mode::Active
                    } else {
                        Mode::Resting {
                            ticks_left: rest_ticks,
                        }
                    };
                    r.goal = Goal::Home;
                    r.progress = 0.0;
                }
                _ => {}
            }
        }
    }

    fn site_index(&self, d: Difficulty) -> usize {
        self.sites
            .iter()
            .position(|s| s.config.difficulty == d)
            .expect("validated worlds have both sites")
    }

    fn work(&mut self) {
        let rescue_ticks = self.world.rescue_ticks();
        for i in 0..self.robots.len() {
            let r = &self.robots[i];
            if !(r.mode == Mode::Active && r.goal == Goal::Work) {
                continue;
            }
            let Some(g) = r.group else { continue };
            let site_idx = self.site_index(g);
            let group: Vec<usize> = (0..self.robots.len())
                .filter(|&j| self.robots[j].group == Some(g) && self.robots[j].mode == Mode::Active)
                .collect();
            let pooled: u32 = group.iter().map(|&j| self.robots[j].resources).sum();
            let can_rescue = self.sites[site_idx].remaining > 0 && r.carried < r.capacity() && pooled > 0;

            if can_rescue {
                self.robots[i].work_ticks += 1;
                if self.robots[i].work_ticks >= rescue_ticks {
                    self.robots[i].work_ticks = 0;
                    let site = &mut self.sites[site_idx];
                    if let Err(why) = rescue(&mut self.robots, i, &group, site) {
                        log::debug!("rescue by {} refused: {why:?}", self.robots[i].id);
                    }
                }
                continue;
            }

            let helpers_busy = self.robots.iter().enumerate().any(|(j, o)| {
                j != i && o.group == Some(g) && o.on_task() && o.capacity() > 0
            });
            if r.capacity() > 0 || !helpers_busy {
                let r = &mut self.robots[i];
                r.goal = Goal::Home;
                r.work_ticks = 0;
                r.progress = 0.0;
            }
        }
    }

    fn check_thresholds(&mut self) {
        let threshold = self.world.rest_threshold;
        for r in &mut self.robots {
            if matches!(r.mode, Mode::Active | Mode::Waiting)
                && (r.energy < threshold || r.hp < threshold)
            {
                log::debug!(
                    "tick {}: {} heads to rest (energy {:.4}, hp {:.4})",
                    self.tick,
                    r.id,
                    r.energy,
                    r.hp
                );
                r.mode = Mode::ToRest;
                r.work_ticks = 0;
                r.progress = 0.0;
                self.metrics.rest_events += 1;
            }
        }
    }
}
