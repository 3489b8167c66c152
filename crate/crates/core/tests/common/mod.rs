//! Fixtures shared by the integration test targets.
#![allow(dead_code)]

pub mod props;

use std::collections::BTreeSet;

use rne_rescue::geometry::Cell;
use rne_rescue::grouping::{RobotSnapshot, Role, Strategy};
use rne_rescue::harness::sample_initials;
use rne_rescue::needs::{GroupNeedsMatrix, WeightVector};
use rne_rescue::sim::{movement_tick, plan_step, DistanceField, Grid, Mode, Mover, Occupancy, Scenario, Simulation};
use rne_rescue::trust::{group_group_trust, RneConfig};

const STEP: f64 = 0.0045;
const RAD: f64 = 0.0003;

pub fn ids(s: &Scenario) -> Vec<String> {
    s.robots.iter().map(|r| r.id.clone()).collect()
}

/// Plays a whole desk-scale trial tick by tick and checks every invariant
/// after each tick.
pub fn audited_trial(strategy: Strategy, seed: u64) -> u32 {
    let scenario = Scenario::desk_scale();
    let init = sample_initials(seed, &ids(&scenario), 1, &scenario.initial).unwrap();
    let mut sim = Simulation::new(&scenario, strategy, &init.trials[0]).unwrap();
    let initial: u32 = sim.sites().iter().map(|s| s.remaining).sum();
    let mut delivered_before = 0u32;
    let mut restorations = 0u32;

    while !sim.finished() {
        let before = sim.robots().to_vec();
        let remaining_before: u32 = sim.sites().iter().map(|s| s.remaining).sum();
        let round_before = sim.metrics().rounds.len();
        sim.step_with_regroup().unwrap();
        let after = sim.robots();
        let started_round = sim.metrics().rounds.len() > round_before;

        // Occupancy.
        let cells: BTreeSet<Cell> = after.iter().map(|r| r.position).collect();
        assert_eq!(cells.len(), after.len(), "tick {}: shared cell", sim.tick_count());
        for r in after {
            assert!(sim.grid().passable(r.position), "{} on blocked cell {}", r.id, r.position);
        }

        // Exact drains, or a restoration at rest completion.
        let mut carried_gain = 0u32;
        let mut resources_used = 0u32;
        for (b, a) in before.iter().zip(after) {
            let moved = b.position != a.position;
            assert!(b.position.chebyshev(a.position) <= 1);
            let restored = matches!(b.mode, Mode::Resting { ticks_left: 1 });
            if restored && (a.energy == 100.0 || a.hp == 100.0) {
                restorations += 1;
            } else {
                let de = b.energy - a.energy;
                let expect_e = if moved { STEP.min(b.energy) } else { 0.0 };
                assert!((de - expect_e).abs() < 1e-12, "{} energy drop {de}", a.id);
                let dh = b.hp - a.hp;
                let expect_h = if sim.grid().is_radiation(a.position) { RAD.min(b.hp) } else { 0.0 };
                assert!((dh - expect_h).abs() < 1e-12, "{} hp drop {dh}", a.id);
            }
            assert!((0.0..=100.0).contains(&a.energy) && (0.0..=100.0).contains(&a.hp));
            assert!(a.carried <= a.capacity());
            if a.carried > b.carried {
                carried_gain += a.carried - b.carried;
            }
            if !started_round && a.resources < b.resources {
                resources_used += b.resources - a.resources;
            }
        }

        // Each rescue takes one rescuee, one capacity slot and one resource.
        let remaining: u32 = sim.sites().iter().map(|s| s.remaining).sum();
        let rescued_now = remaining_before - remaining;
        assert_eq!(rescued_now, carried_gain);
        if !started_round {
            assert_eq!(rescued_now, resources_used);
        }

        let m = sim.metrics();
        let carried: u32 = after.iter().map(|r| r.carried).sum();
        assert_eq!(m.rescued_total() + carried + remaining, initial);
        assert!(m.rescued_total() >= delivered_before);
        delivered_before = m.rescued_total();
        assert!(m.energy_spent_total >= 0.0 && m.hp_spent_total >= 0.0);
    }
    let m = sim.metrics();
    assert_eq!(m.ticks, 6000);
    assert!(m.rescued_total() <= m.initial_rescuees);
    eprintln!(
        "{strategy}: rescued {} ({restorations} restorations, {} rounds)",
        m.rescued_total(),
        m.rounds.len()
    );
    m.rescued_total()
}

/// A one-wide corridor along y = 1 with side pockets at the given x.
pub fn corridor(len: i32, pockets: &[i32]) -> Grid {
    let mut g = Grid::new(len, 3);
    for x in 0..len {
        g.add_debris(Cell::new(x, 2));
        if !pockets.contains(&x) {
            g.add_debris(Cell::new(x, 0));
        }
    }
    g
}

/// Drives robots toward their goals with the movement rules alone, checking
/// that no contender (a robot with a planned step) goes 100 ticks without
/// moving.
/// Returns the ticks needed for everyone to arrive, or `None` if they had
/// not after 2000 ticks.
pub fn try_drive(grid: &Grid, starts: &[Cell], goals: &[Cell]) -> Option<usize> {
    let fields: Vec<DistanceField> = goals.iter().map(|&g| grid.distance_field(&[g], 0)).collect();
    let names: Vec<String> = (0..starts.len()).map(|i| format!("r{i}")).collect();
    let mut pos = starts.to_vec();
    let mut occ = Occupancy::new();
    for (i, &p) in pos.iter().enumerate() {
        assert!(occ.place(i, p));
    }
    let mut waited = vec![0usize; pos.len()];
    for tick in 1..=2000 {
        let movers: Vec<Mover<'_>> = (0..pos.len())
            .filter(|&i| pos[i] != goals[i])
            .map(|i| Mover {
                robot: i,
                id: &names[i],
                position: pos[i],
                priority: (pos.len() - i) as f64,
                field: &fields[i],
            })
            .collect();
        if movers.is_empty() {
            return Some(tick - 1);
        }
        let travelling: BTreeSet<usize> = movers.iter().map(|m| m.robot).collect();
        let contenders: Vec<usize> = movers
            .iter()
            .filter(|m| plan_step(m, grid, &occ, |r| !travelling.contains(&r)).is_some())
            .map(|m| m.robot)
            .collect();
        let out = movement_tick(grid, &mut occ, &movers);
        for m in &out.moves {
            assert_eq!(pos[m.robot], m.from);
            assert!(grid.passable(m.to));
            pos[m.robot] = m.to;
        }
        let distinct: BTreeSet<Cell> = pos.iter().copied().collect();
        assert_eq!(distinct.len(), pos.len());
        for i in 0..pos.len() {
            if out.moves.iter().any(|m| m.robot == i) {
                waited[i] = 0;
            } else if contenders.contains(&i) {
                waited[i] += 1;
                assert!(waited[i] < 100, "contender r{i} waited 100 ticks at tick {tick}");
            }
        }
    }
    None
}

pub fn drive(grid: &Grid, starts: &[Cell], goals: &[Cell]) -> usize {
    try_drive(grid, starts, goals).expect("robots never reached their goals")
}

pub fn team(needs: &[[f64; 7]; 6]) -> Vec<RobotSnapshot> {
    let roles = [
        ("c1", Role::Carrier),
        ("c2", Role::Carrier),
        ("s1", Role::Supplier),
        ("s2", Role::Supplier),
        ("o1", Role::Observer),
        ("o2", Role::Observer),
    ];
    roles
        .iter()
        .zip(needs)
        .enumerate()
        .map(|(i, ((id, role), n))| {
            RobotSnapshot::new(*id, *role, n.to_vec(), Cell::new(i as i32, 0)).unwrap()
        })
        .collect()
}

/// Maximizer of T(X||Y) over the 8 ordered splits that put one robot of
/// each role in X. Returns (X ids, Y ids, score).
pub fn brute_force(
    robots: &[RobotSnapshot],
    w: &WeightVector,
    cfg: &RneConfig,
) -> (BTreeSet<String>, BTreeSet<String>, f64) {
    let mut best: Option<(BTreeSet<String>, BTreeSet<String>, f64)> = None;
    for mask in 0u32..8 {
        let mut x = Vec::new();
        let mut y = Vec::new();
        for role in 0..3 {
            let (a, b) = (&robots[2 * role], &robots[2 * role + 1]);
            if mask >> role & 1 == 0 {
                x.push(a);
                y.push(b);
            } else {
                x.push(b);
                y.push(a);
            }
        }
        let matrix = |g: &[&RobotSnapshot]| {
            GroupNeedsMatrix::new(g.iter().map(|r| r.needs.clone()).collect()).unwrap()
        };
        let t = group_group_trust(&matrix(&x), &matrix(&y), w, cfg).unwrap().value();
        if best.as_ref().is_none_or(|b| t > b.2) {
            let ids = |g: &[&RobotSnapshot]| g.iter().map(|r| r.id.clone()).collect();
            best = Some((ids(&x), ids(&y), t));
        }
    }
    best.unwrap()
}

/// All subsets of size m of 0..2m containing element 0, built by bitmask.
pub fn subset_oracle(m: usize) -> BTreeSet<Vec<usize>> {
    let n = 2 * m;
    (0u32..1 << n)
        .filter(|mask| mask.count_ones() as usize == m && mask & 1 == 1)
        .map(|mask| (0..n).filter(|i| mask >> i & 1 == 1).collect())
        .collect()
}

pub fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}
