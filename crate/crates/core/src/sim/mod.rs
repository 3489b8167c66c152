//! Grid world for the two-task rescue mission.

pub mod grid;
pub mod metrics;
pub mod motion;
pub mod robot;
pub mod scenario;
pub mod world;

pub use grid::{DistanceField, Grid};
pub use metrics::{RoundMetrics, TaskTally, TrialMetrics};
pub use motion::{avoid_collisions, movement_tick, plan_step, resolve_deadlock, CollisionList, Contender, Mover, Occupancy};
pub use robot::{effective_speed, Goal, Mode, RobotState, RoleStats, RoleTable};
pub use scenario::{InitialSpec, RobotConfig, Scenario, TaskSiteConfig, WorldConfig};
pub use world::{rescue, RescueRefusal, RobotInitials, Simulation, SiteState, TraceRow};
