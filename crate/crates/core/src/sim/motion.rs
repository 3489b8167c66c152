//! One movement tick for every robot that is due to step: greedy descent of
//! a distance field, priority-ordered collision avoidance and deadlock
//! resolution by switching the execution order.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use super::grid::{DistanceField, Grid};
use crate::geometry::Cell;

/// Which robot stands on which cell.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Occupancy {
    cells: BTreeMap<Cell, usize>,
}

impl Occupancy {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn place(&mut self, robot: usize, at: Cell) -> bool {
        self.cells.insert(at, robot).is_none()
    }

    pub fn occupant(&self, c: Cell) -> Option<usize> {
        self.cells.get(&c).copied()
    }

    pub fn is_free(&self, c: Cell) -> bool {
        !self.cells.contains_key(&c)
    }

    fn relocate(&mut self, robot: usize, from: Cell, to: Cell) {
        debug_assert_eq!(self.cells.get(&from), Some(&robot));
        self.cells.remove(&from);
        let previous = self.cells.insert(to, robot);
        debug_assert!(previous.is_none(), "moved onto an occupied cell");
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Move {
    pub robot: usize,
    pub from: Cell,
    pub to: Cell,
}

/// A robot that wants to step this tick.
#[derive(Debug, Clone)]
pub struct Mover<'a> {
    pub robot: usize,
    pub id: &'a str,
    pub position: Cell,
    /// Weighted needs mass; higher moves first.
    pub priority: f64,
    pub field: &'a DistanceField,
}

/// A contender in a collision, with the cell it planned to enter.
#[derive(Debug, Clone)]
pub struct Contender<'a> {
    pub mover: Mover<'a>,
    pub target: Cell,
}

fn by_priority(a: &Mover<'_>, b: &Mover<'_>) -> Ordering {
    b.priority
        .total_cmp(&a.priority)
        .then_with(|| a.id.cmp(b.id))
}

/// Contenders sorted by descending priority, ties by id.
#[derive(Debug, Clone)]
pub struct CollisionList<'a> {
    contenders: Vec<Contender<'a>>,
}

impl<'a> CollisionList<'a> {
    /// Returns `None` for an empty contender set.
    pub fn new(mut contenders: Vec<Contender<'a>>) -> Option<Self> {
        if contenders.is_empty() {
            return None;
        }
        contenders.sort_by(|a, b| by_priority(&a.mover, &b.mover));
        Some(Self { contenders })
    }

    pub fn contenders(&self) -> &[Contender<'a>] {
        &self.contenders
    }

    pub fn ids(&self) -> Vec<&'a str> {
        self.contenders.iter().map(|c| c.mover.id).collect()
    }

    pub fn len(&self) -> usize {
        self.contenders.len()
    }

    pub fn is_empty(&self) -> bool {
        self.contenders.is_empty()
    }
}

/// Resolves a collision list level by level: at each level the
/// highest-priority contender whose planned cell is free moves and leaves
/// the list, everyone else holds. Stops when the list is empty or nobody
/// can move. Returns the moves in level order.
pub fn avoid_collisions(list: &CollisionList<'_>, occupancy: &mut Occupancy) -> Vec<Move> {
    avoid_in_order(list.contenders.iter().collect(), occupancy)
}

fn avoid_in_order(mut remaining: Vec<&Contender<'_>>, occupancy: &mut Occupancy) -> Vec<Move> {
    let mut moves = Vec::new();
    while let Some(pos) = remaining
        .iter()
        .position(|c| occupancy.is_free(c.target))
    {
        let c = remaining.remove(pos);
        occupancy.relocate(c.mover.robot, c.mover.position, c.target);
        moves.push(Move {
            robot: c.mover.robot,
            from: c.mover.position,
            to: c.target,
        });
    }
    moves
}

/// Outcome of [`resolve_deadlock`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DeadlockOutcome {
    pub moves: Vec<Move>,
    /// Number of order switches performed.
    pub swaps: usize,
    /// True when a full rotation moved nobody; the list waits a tick.
    pub stalled: bool,
}

/// Switches the head of the execution order with the 1st, 2nd, ... member.
/// The new head moves to its planned cell if that is free, otherwise it
/// makes room: it steps aside onto a free cell (nearest to its goal first),
/// or backs into a cell held by another contender that can itself make
/// room. The remaining order then re-runs collision avoidance.
///
/// A switch is kept as soon as it lets somebody besides the robots it
/// displaced move. If no switch does, the first switch that moved anybody
/// is kept, and if nobody can move at all the list stalls for this tick.
pub fn resolve_deadlock(
    list: &CollisionList<'_>,
    grid: &Grid,
    occupancy: &mut Occupancy,
) -> DeadlockOutcome {
    let mut order: Vec<&Contender<'_>> = list.contenders.iter().collect();
    let mut outcome = DeadlockOutcome::default();
    let mut fallback: Option<(Vec<Move>, Occupancy)> = None;
    for i in 1..order.len() {
        order.swap(0, i);
        outcome.swaps += 1;
        let head = order[0];
        let mut trial = occupancy.clone();
        let chain = if trial.is_free(head.target) {
            Some(vec![Move {
                robot: head.mover.robot,
                from: head.mover.position,
                to: head.target,
            }])
        } else {
            let mut visited = vec![head.mover.robot];
            make_room(&head.mover, &list.contenders, grid, &trial, &mut visited, list.len())
        };
        let Some(mut moves) = chain else { continue };
        for m in &moves {
            trial.relocate(m.robot, m.from, m.to);
        }
        let rest: Vec<&Contender<'_>> = order[1..]
            .iter()
            .copied()
            .filter(|c| moves.iter().all(|m| m.robot != c.mover.robot))
            .collect();
        let rest = avoid_in_order(rest, &mut trial);
        if !rest.is_empty() {
            moves.extend(rest);
            *occupancy = trial;
            outcome.moves = moves;
            return outcome;
        }
        if fallback.is_none() {
            fallback = Some((moves, trial));
        }
    }
    match fallback {
        Some((moves, trial)) => {
            *occupancy = trial;
            outcome.moves = moves;
        }
        None => outcome.stalled = true,
    }
    outcome
}

/// Moves that free `mover`'s cell: a step onto a free cell, or a step into
/// a contender's cell after that contender makes room in turn. Moves are
/// returned innermost first so they can be applied in order.
fn make_room(
    mover: &Mover<'_>,
    contenders: &[Contender<'_>],
    grid: &Grid,
    occupancy: &Occupancy,
    visited: &mut Vec<usize>,
    depth: usize,
) -> Option<Vec<Move>> {
    if let Some(to) = sidestep(mover, grid, occupancy) {
        return Some(vec![Move {
            robot: mover.robot,
            from: mover.position,
            to,
        }]);
    }
    if depth == 0 {
        return None;
    }
    let mut cells: Vec<(Cell, &Contender<'_>)> = mover
        .position
        .neighbors()
        .filter(|&n| grid.passable(n) && mover.field.reachable(n))
        .filter_map(|n| {
            let o = occupancy.occupant(n)?;
            let c = contenders.iter().find(|c| c.mover.robot == o)?;
            (!visited.contains(&o)).then_some((n, c))
        })
        .collect();
    cells.sort_by_key(|&(n, _)| mover.field.get(n));
    for (n, other) in cells {
        visited.push(other.mover.robot);
        if let Some(mut chain) = make_room(&other.mover, contenders, grid, occupancy, visited, depth - 1) {
            chain.push(Move {
                robot: mover.robot,
                from: mover.position,
                to: n,
            });
            return Some(chain);
        }
        visited.pop();
    }
    None
}

/// Best free neighbour regardless of progress, for stepping aside.
fn sidestep(mover: &Mover<'_>, grid: &Grid, occupancy: &Occupancy) -> Option<Cell> {
    mover
        .position
        .neighbors()
        .filter(|&n| grid.passable(n) && occupancy.is_free(n) && mover.field.reachable(n))
        .min_by_key(|&n| mover.field.get(n))
}

/// Next cell along the field that is not blocked by a robot that stays put
/// this tick. When every improving neighbour is held by such a robot, the
/// step follows a detour field that treats stationary robots as debris.
/// `None` when nothing improves on the current cell.
pub fn plan_step(
    mover: &Mover<'_>,
    grid: &Grid,
    occupancy: &Occupancy,
    is_stationary: impl Fn(usize) -> bool,
) -> Option<Cell> {
    let parked = |c: Cell| occupancy.occupant(c).is_some_and(|o| o != mover.robot && is_stationary(o));
    let here = mover.field.get(mover.position);
    let improving = |field: &DistanceField, here: u32| {
        mover
            .position
            .neighbors()
            .filter(|&n| grid.passable(n) && field.get(n) < here)
            .collect::<Vec<_>>()
    };
    let cells = improving(mover.field, here);
    if let Some(step) = cells
        .iter()
        .copied()
        .filter(|&n| !parked(n))
        .min_by_key(|&n| mover.field.get(n))
    {
        return Some(step);
    }
    if cells.is_empty() {
        return None;
    }
    let detour = grid.detour_field(mover.field, parked);
    let here = detour.get(mover.position);
    improving(&detour, here)
        .into_iter()
        .min_by_key(|&n| detour.get(n))
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TickMoves {
    pub moves: Vec<Move>,
    pub collisions: usize,
    pub deadlocks: usize,
    pub stalls: usize,
}

/// Moves every robot in `movers` by at most one cell.
///
/// Robots with an uncontested free target move first. The rest are grouped
/// into collision lists (shared target, or target held by another robot),
/// each resolved by [`avoid_collisions`] and, if nobody in it moved, by
/// [`resolve_deadlock`].
pub fn movement_tick(grid: &Grid, occupancy: &mut Occupancy, movers: &[Mover<'_>]) -> TickMoves {
    let moving: std::collections::BTreeSet<usize> = movers.iter().map(|m| m.robot).collect();
    let stationary = |r: usize| !moving.contains(&r);

    let mut planned: Vec<Contender<'_>> = movers
        .iter()
        .filter_map(|m| {
            plan_step(m, grid, occupancy, stationary).map(|target| Contender {
                mover: m.clone(),
                target,
            })
        })
        .collect();
    planned.sort_by(|a, b| by_priority(&a.mover, &b.mover));

    let mut demand: BTreeMap<Cell, usize> = BTreeMap::new();
    for c in &planned {
        *demand.entry(c.target).or_default() += 1;
    }

    let mut out = TickMoves::default();
    let (free, contested): (Vec<_>, Vec<_>) = planned
        .into_iter()
        .partition(|c| demand[&c.target] == 1 && occupancy.is_free(c.target));
    for c in free {
        occupancy.relocate(c.mover.robot, c.mover.position, c.target);
        out.moves.push(Move {
            robot: c.mover.robot,
            from: c.mover.position,
            to: c.target,
        });
    }

    for list in conflict_components(contested) {
        out.collisions += 1;
        let moved = avoid_collisions(&list, occupancy);
        if moved.is_empty() {
            out.deadlocks += 1;
            let resolved = resolve_deadlock(&list, grid, occupancy);
            if resolved.stalled {
                out.stalls += 1;
            }
            out.moves.extend(resolved.moves);
        } else {
            out.moves.extend(moved);
        }
    }
    out
}

/// Splits contenders into independent collision lists: two contenders are
/// linked when they want the same cell or one wants the other's cell.
fn conflict_components(contested: Vec<Contender<'_>>) -> Vec<CollisionList<'_>> {
    let n = contested.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while parent[r] != r {
            r = parent[r];
        }
        let mut j = i;
        while parent[j] != r {
            let next = parent[j];
            parent[j] = r;
            j = next;
        }
        r
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let (a, b) = (&contested[i], &contested[j]);
            if a.target == b.target || a.target == b.mover.position || b.target == a.mover.position
            {
                let (ra, rb) = (find(&mut parent, i), find(&mut parent, j));
                if ra != rb {
                    parent[ra.max(rb)] = ra.min(rb);
                }
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<Contender<'_>>> = BTreeMap::new();
    for (i, c) in contested.into_iter().enumerate() {
        let root = find(&mut parent, i);
        groups.entry(root).or_default().push(c);
    }
    // Roots are the lowest index, and the input is priority-sorted, so the
    // lists come out ordered by their highest-priority member.
    groups
        .into_values()
        .filter_map(CollisionList::new)
        .collect()
}
