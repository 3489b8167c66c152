//! Distance, energy and health/distance grouping baselines.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use super::{
    split_by_role, Difficulty, GroupAssignment, RobotSnapshot, Role, Strategy, TaskTarget, ENERGY,
    HP,
};
use crate::error::{Error, Result};

fn check_tasks(tasks: &[TaskTarget]) -> Result<(usize, usize)> {
    if tasks.len() != 2 {
        return Err(Error::Config(format!(
            "exactly two tasks are required, got {}",
            tasks.len()
        )));
    }
    let hard = tasks
        .iter()
        .position(|t| t.difficulty == Difficulty::Hard)
        .ok_or_else(|| Error::Config("no hard task".into()))?;
    let easy = tasks
        .iter()
        .position(|t| t.difficulty == Difficulty::Easy)
        .ok_or_else(|| Error::Config("no easy task".into()))?;
    Ok((hard, easy))
}

fn finish(
    strategy: Strategy,
    mut hard: Vec<String>,
    mut easy: Vec<String>,
    diagnostics: BTreeMap<String, f64>,
) -> GroupAssignment {
    hard.sort();
    easy.sort();
    GroupAssignment {
        hard_group: hard,
        easy_group: easy,
        strategy,
        diagnostics,
    }
}

/// Each robot, nearest first, joins its closest task until that task holds
/// half of the robot's role; later robots of that role overflow to the other
/// task. Equidistant robots pick the task listed first.
pub fn dis_grouping(robots: &[RobotSnapshot], tasks: &[TaskTarget]) -> Result<GroupAssignment> {
    let (hard_idx, _) = check_tasks(tasks)?;
    let by_role = split_by_role(robots)?;
    let quota: BTreeMap<Role, usize> = by_role
        .iter()
        .map(|(role, members)| (*role, members.len() / 2))
        .collect();

    let nearest = |r: &RobotSnapshot| -> (usize, f64) {
        let d0 = r.position.euclidean(tasks[0].position);
        let d1 = r.position.euclidean(tasks[1].position);
        if d1 < d0 {
            (1, d1)
        } else {
            (0, d0)
        }
    };

    let mut order: Vec<(&RobotSnapshot, usize, f64)> = robots
        .iter()
        .map(|r| {
            let (task, dist) = nearest(r);
            (r, task, dist)
        })
        .collect();
    order.sort_by(|a, b| a.2.total_cmp(&b.2).then_with(|| a.0.id.cmp(&b.0.id)));

    let mut filled: BTreeMap<(Role, usize), usize> = BTreeMap::new();
    let mut members: [Vec<String>; 2] = [Vec::new(), Vec::new()];
    let mut overflow = 0usize;
    for (r, preferred, _) in order {
        let q = quota[&r.role];
        let task = if filled.get(&(r.role, preferred)).copied().unwrap_or(0) < q {
            preferred
        } else {
            overflow += 1;
            1 - preferred
        };
        *filled.entry((r.role, task)).or_default() += 1;
        members[task].push(r.id.clone());
    }

    let [m0, m1] = members;
    let (hard, easy) = if hard_idx == 0 { (m0, m1) } else { (m1, m0) };
    let mut diagnostics = BTreeMap::new();
    diagnostics.insert("overflowed".into(), overflow as f64);
    Ok(finish(Strategy::Dis, hard, easy, diagnostics))
}

/// Within each role, robots are ranked by `key` and the top half goes to the
/// hard task.
fn ranked_split<F>(
    strategy: Strategy,
    robots: &[RobotSnapshot],
    mut cmp: F,
    diag_key: Option<usize>,
) -> Result<GroupAssignment>
where
    F: FnMut(&RobotSnapshot, &RobotSnapshot) -> Ordering,
{
    let mut hard = Vec::new();
    let mut easy = Vec::new();
    let mut diagnostics = BTreeMap::new();
    for (role, mut members) in split_by_role(robots)? {
        if members.is_empty() {
            continue;
        }
        members.sort_by(|a, b| cmp(a, b).then_with(|| a.id.cmp(&b.id)));
        let half = members.len() / 2;
        if let Some(idx) = diag_key {
            let mean = |rs: &[&RobotSnapshot]| rs.iter().map(|r| r.need(idx)).sum::<f64>() / rs.len() as f64;
            diagnostics.insert(format!("{role}_hard_mean"), mean(&members[..half]));
            diagnostics.insert(format!("{role}_easy_mean"), mean(&members[half..]));
        }
        hard.extend(members[..half].iter().map(|r| r.id.clone()));
        easy.extend(members[half..].iter().map(|r| r.id.clone()));
    }
    Ok(finish(strategy, hard, easy, diagnostics))
}

/// Higher-energy half of every role takes the hard task.
pub fn eng_grouping(robots: &[RobotSnapshot]) -> Result<GroupAssignment> {
    ranked_split(
        Strategy::Eng,
        robots,
        |a, b| b.need(ENERGY).total_cmp(&a.need(ENERGY)),
        Some(ENERGY),
    )
}

/// Higher-HP half of every role takes the hard task. Equal HP is broken by
/// distance to the hard task, nearer first.
pub fn hp_dis_grouping(robots: &[RobotSnapshot], tasks: &[TaskTarget]) -> Result<GroupAssignment> {
    let (hard_idx, _) = check_tasks(tasks)?;
    let hard_pos = tasks[hard_idx].position;
    ranked_split(
        Strategy::HpDis,
        robots,
        |a, b| {
            b.need(HP).total_cmp(&a.need(HP)).then_with(|| {
                a.position
                    .euclidean(hard_pos)
                    .total_cmp(&b.position.euclidean(hard_pos))
            })
        },
        Some(HP),
    )
}
