// SPDX-License-Identifier: Apache-2.0

//! Random white-space insertion that keeps the remaining cells and macros
//! spatially connected.

use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::grid::{CellState, Grid};
use crate::connectivity::UnionFind;
use crate::geom::{GridPoint, Rect};
use crate::{Error, Result};

/// Reusable scratch state for connectivity queries.
pub struct ConnectivityProbe {
    stamp: Vec<u32>,
    owner: Vec<u8>,
    epoch: u32,
    queues: [VecDeque<usize>; 4],
}

impl ConnectivityProbe {
    pub fn new(grid: &Grid) -> Self {
        ConnectivityProbe {
            stamp: vec![0; grid.len()],
            owner: vec![0; grid.len()],
            epoch: 0,
            queues: Default::default(),
        }
    }

    /// Whether the solid neighbors of `c` stay mutually connected once `c`
    /// itself turns white. Exact: searches run in lockstep from every
    /// neighbor and stop as soon as they all meet or one group runs dry, so
    /// the cost tracks the smaller side of any cut.
    pub fn removable(&mut self, grid: &Grid, c: GridPoint) -> bool {
        let sources: Vec<GridPoint> = grid.neighbors(c).filter(|&q| grid.is_solid(q)).collect();
        if sources.len() <= 1 {
            return true;
        }
        if ring_connected(grid, c) {
            return true;
        }
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.epoch = 1;
        }
        let k = sources.len();
        let ci = grid.idx(c);
        let mut uf = UnionFind::new(k);
        for (s, &p) in sources.iter().enumerate() {
            let i = grid.idx(p);
            self.queues[s].clear();
            self.queues[s].push_back(i);
            self.stamp[i] = self.epoch;
            self.owner[i] = s as u8;
        }
        loop {
            let mut progressed = false;
            for s in 0..k {
                let Some(i) = self.queues[s].pop_front() else { continue };
                progressed = true;
                let p = grid.point(i);
                for q in grid.neighbors(p) {
                    let j = grid.idx(q);
                    if j == ci || grid.state_at(j) == CellState::WhiteSpace {
                        continue;
                    }
                    if self.stamp[j] == self.epoch {
                        let o = self.owner[j] as usize;
                        if o != s && uf.union(s, o) && uf.set_count() == 1 {
                            return true;
                        }
                    } else {
                        self.stamp[j] = self.epoch;
                        self.owner[j] = s as u8;
                        self.queues[s].push_back(j);
                    }
                }
                if self.queues[s].is_empty() {
                    let root = uf.find(s);
                    let exhausted = (0..k).all(|t| uf.find(t) != root || self.queues[t].is_empty());
                    if exhausted {
                        return false;
                    }
                }
            }
            if !progressed {
                return uf.set_count() == 1;
            }
        }
    }
}

/// Fast accept: the solid edge-neighbors of `c` are joined through the solid
/// cells of its 3x3 ring.
fn ring_connected(grid: &Grid, c: GridPoint) -> bool {
    const RING: [(i64, i64); 8] = [(1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1)];
    let solid: Vec<bool> = RING.iter().map(|&(dx, dy)| grid.is_solid(GridPoint::new(c.x + dx, c.y + dy))).collect();
    let edges = [0usize, 2, 4, 6];
    if solid.iter().all(|&s| s) {
        return true;
    }
    // Start walking just after a gap so each run of solid ring cells is seen once.
    let start = (0..8).find(|&i| !solid[i]).unwrap();
    let mut runs_with_edge = 0;
    let mut in_run = false;
    let mut run_has_edge = false;
    for step in 1..=8 {
        let i = (start + step) % 8;
        if solid[i] {
            if !in_run {
                in_run = true;
                run_has_edge = false;
            }
            // Corner ring cells do not connect two edge cells on their own unless solid,
            // and consecutive ring cells are always 4-adjacent.
            if edges.contains(&i) {
                run_has_edge = true;
            }
        } else if in_run {
            in_run = false;
            if run_has_edge {
                runs_with_edge += 1;
            }
        }
    }
    if in_run && run_has_edge {
        runs_with_edge += 1;
    }
    runs_with_edge <= 1
}

fn candidates(grid: &Grid, area: Rect) -> Vec<GridPoint> {
    area.points()
        .filter(|&p| grid.contains(p) && matches!(grid.state(p), CellState::Unassigned | CellState::StandardCell))
        .collect()
}

/// Whitens `count` randomly chosen non-macro cells inside `area` (the whole
/// grid when `None`), skipping any cell whose removal would disconnect its
/// neighbors.
pub fn insert_white_space<R: Rng>(grid: &mut Grid, count: usize, area: Option<Rect>, rng: &mut R) -> Result<()> {
    let mut pool = candidates(grid, area.unwrap_or_else(|| grid.bounds()));
    pool.shuffle(rng);
    let mut probe = ConnectivityProbe::new(grid);
    let mut remaining = count;
    // A rejected cell can become removable once a whole branch behind it is
    // gone, so rejected cells are revisited until a pass makes no progress.
    while remaining > 0 {
        let before = remaining;
        pool.retain(|&c| {
            if remaining == 0 || !probe.removable(grid, c) {
                return true;
            }
            grid.set_state(c, CellState::WhiteSpace);
            remaining -= 1;
            false
        });
        if remaining == before {
            break;
        }
    }
    if remaining > 0 {
        return Err(Error::WhiteSpaceShortfall { remaining });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinWhiteSpace {
    pub bin: (usize, usize),
    /// Cells not covered by fixed macros.
    pub free_cells: usize,
    pub target_white: usize,
    pub placed_white: usize,
    pub iterations: usize,
}

impl BinWhiteSpace {
    pub fn shortfall(&self) -> usize {
        self.target_white.saturating_sub(self.placed_white)
    }
}

/// Per-bin variant: bins of `bin_side` cells are visited in row-major order
/// and each gets enough white space for its movable content to reach
/// `utilization` of its free area, within `iteration_limit` connectivity
/// checks per bin. Shortfalls are reported, not treated as failures.
pub fn insert_white_space_per_bin<R: Rng>(
    grid: &mut Grid,
    bin_side: usize,
    utilization: f64,
    iteration_limit: usize,
    rng: &mut R,
) -> Vec<BinWhiteSpace> {
    let side = bin_side.max(1) as i64;
    let bins_x = (grid.width + side - 1) / side;
    let bins_y = (grid.height + side - 1) / side;
    let mut probe = ConnectivityProbe::new(grid);
    let mut out = Vec::new();
    for by in 0..bins_y {
        for bx in 0..bins_x {
            let area = Rect::new(
                GridPoint::new(bx * side, by * side),
                GridPoint::new(((bx + 1) * side).min(grid.width) - 1, ((by + 1) * side).min(grid.height) - 1),
            );
            let mut free = 0usize;
            let mut movable_macro = 0usize;
            let mut open = 0usize;
            let mut white = 0usize;
            for p in area.points() {
                match grid.state(p) {
                    s @ (CellState::MacroInterior(_) | CellState::MacroBoundary(_)) => {
                        if grid.macros[s.macro_index().unwrap()].movable {
                            free += 1;
                            movable_macro += 1;
                        }
                    }
                    CellState::WhiteSpace => {
                        free += 1;
                        white += 1;
                    }
                    _ => {
                        free += 1;
                        open += 1;
                    }
                }
            }
            let movable_target = (utilization * free as f64).round() as usize;
            let std_target = movable_target.saturating_sub(movable_macro).min(open);
            let target_white = open - std_target;
            let mut report = BinWhiteSpace { bin: (bx as usize, by as usize), free_cells: free, target_white, placed_white: 0, iterations: 0 };
            let _ = white;
            if free > 0 && target_white > 0 {
                let mut pool = candidates(grid, area);
                pool.shuffle(rng);
                for c in pool {
                    if report.placed_white == target_white || report.iterations >= iteration_limit {
                        break;
                    }
                    report.iterations += 1;
                    if probe.removable(grid, c) {
                        grid.set_state(c, CellState::WhiteSpace);
                        report.placed_white += 1;
                    }
                }
            }
            out.push(report);
        }
    }
    out
}
