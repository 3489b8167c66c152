use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::geometry::Cell;

/// Static map: bounds, debris (impassable) and radiation cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grid {
    width: i32,
    height: i32,
    debris: Vec<bool>,
    radiation: Vec<bool>,
    /// Cells robots may not enter besides debris, e.g. rescuee piles.
    reserved: Vec<bool>,
}

impl Grid {
    pub fn new(width: i32, height: i32) -> Self {
        let n = (width.max(0) * height.max(0)) as usize;
        Self {
            width,
            height,
            debris: vec![false; n],
            radiation: vec![false; n],
            reserved: vec![false; n],
        }
    }

    pub fn width(&self) -> i32 {
        self.width
    }

    pub fn height(&self) -> i32 {
        self.height
    }

    pub fn in_bounds(&self, c: Cell) -> bool {
        c.x >= 0 && c.y >= 0 && c.x < self.width && c.y < self.height
    }

    fn idx(&self, c: Cell) -> usize {
        (c.y * self.width + c.x) as usize
    }

    pub fn add_debris(&mut self, c: Cell) {
        if self.in_bounds(c) {
            let i = self.idx(c);
            self.debris[i] = true;
        }
    }

    pub fn add_radiation(&mut self, c: Cell) {
        if self.in_bounds(c) {
            let i = self.idx(c);
            self.radiation[i] = true;
        }
    }

    pub fn reserve(&mut self, c: Cell) {
        if self.in_bounds(c) {
            let i = self.idx(c);
            self.reserved[i] = true;
        }
    }

    pub fn is_debris(&self, c: Cell) -> bool {
        self.in_bounds(c) && self.debris[self.idx(c)]
    }

    pub fn is_radiation(&self, c: Cell) -> bool {
        self.in_bounds(c) && self.radiation[self.idx(c)]
    }

    /// In bounds, not debris, not reserved.
    pub fn passable(&self, c: Cell) -> bool {
        self.in_bounds(c) && {
            let i = self.idx(c);
            !self.debris[i] && !self.reserved[i]
        }
    }

    /// Costs to the nearest goal cell. Each move costs [`STEP_COST`];
    /// entering a radiation cell adds `radiation_penalty`.
    pub fn distance_field(&self, goals: &[Cell], radiation_penalty: u32) -> DistanceField {
        self.search(goals, radiation_penalty, |_| false)
    }

    /// The same field recomputed with `blocked` cells treated as debris.
    pub fn detour_field(&self, field: &DistanceField, blocked: impl Fn(Cell) -> bool) -> DistanceField {
        self.search(&field.goals, field.radiation_penalty, blocked)
    }

    fn search(&self, goals: &[Cell], radiation_penalty: u32, blocked: impl Fn(Cell) -> bool) -> DistanceField {
        let open = |c: Cell| self.passable(c) && !blocked(c);
        let mut dist = vec![UNREACHABLE; self.debris.len()];
        let mut heap = BinaryHeap::new();
        for &g in goals {
            if open(g) {
                let i = self.idx(g);
                dist[i] = 0;
                heap.push(Reverse((0u32, g.y, g.x)));
            }
        }
        while let Some(Reverse((d, y, x))) = heap.pop() {
            let c = Cell::new(x, y);
            if d > dist[self.idx(c)] {
                continue;
            }
            // Reverse search: cost of stepping from `n` into `c`.
            let enter = STEP_COST + if self.is_radiation(c) { radiation_penalty } else { 0 };
            for n in c.neighbors() {
                if !open(n) {
                    continue;
                }
                let nd = d + enter;
                let ni = self.idx(n);
                if nd < dist[ni] {
                    dist[ni] = nd;
                    heap.push(Reverse((nd, n.y, n.x)));
                }
            }
        }
        DistanceField {
            width: self.width,
            height: self.height,
            dist,
            goals: goals.iter().copied().filter(|&g| self.passable(g)).collect(),
            radiation_penalty,
        }
    }
}

pub const STEP_COST: u32 = 10;
pub const UNREACHABLE: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceField {
    width: i32,
    height: i32,
    dist: Vec<u32>,
    goals: Vec<Cell>,
    radiation_penalty: u32,
}

impl DistanceField {
    pub fn get(&self, c: Cell) -> u32 {
        if c.x < 0 || c.y < 0 || c.x >= self.width || c.y >= self.height {
            return UNREACHABLE;
        }
        self.dist[(c.y * self.width + c.x) as usize]
    }

    pub fn reachable(&self, c: Cell) -> bool {
        self.get(c) != UNREACHABLE
    }

    pub fn at_goal(&self, c: Cell) -> bool {
        self.get(c) == 0
    }
}
