// SPDX-License-Identifier: Apache-2.0

//! Growth of minimum-wirelength local nets by enlarging a seed box one
//! row or column at a time.

use std::collections::VecDeque;

use rustc_hash::{FxHashMap, FxHashSet};

use serde::{Deserialize, Serialize};

use super::grid::{CellState, Grid};
use crate::geom::{GridPoint, Rect};
use crate::wirelength::{grid_hpwl, min_hpwl};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Direction {
    North,
    South,
    East,
    West,
}

impl Direction {
    pub const ALL: [Direction; 4] = [Direction::North, Direction::South, Direction::East, Direction::West];

    /// `r` with one more row or column on this side.
    pub fn grow(self, r: Rect) -> Rect {
        let (mut lo, mut hi) = (r.lo, r.hi);
        match self {
            Direction::North => hi.y += 1,
            Direction::South => lo.y -= 1,
            Direction::East => hi.x += 1,
            Direction::West => lo.x -= 1,
        }
        Rect { lo, hi }
    }
}

/// A box around a set of seed pins plus the enlargements applied to it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedBox {
    pub rect: Rect,
    pub seeds: Vec<GridPoint>,
    pub steps: Vec<Direction>,
}

impl SeedBox {
    pub fn new(seeds: Vec<GridPoint>) -> Option<Self> {
        let rect = Rect::bounding(seeds.iter().copied())?;
        Some(SeedBox { rect, seeds, steps: Vec::new() })
    }

    pub fn enlarged(&self, d: Direction) -> SeedBox {
        let mut steps = self.steps.clone();
        steps.push(d);
        SeedBox { rect: d.grow(self.rect), seeds: self.seeds.clone(), steps }
    }

    /// Direction counts; sequences with equal counts describe the same box.
    pub fn counts(&self) -> [usize; 4] {
        let mut c = [0; 4];
        for d in &self.steps {
            c[*d as usize] += 1;
        }
        c
    }
}

/// Every canonical enlargement sequence of exactly `depth` steps: directions
/// appear in non-decreasing order, one sequence per direction multiset.
pub fn canonical_sequences(depth: usize) -> Vec<Vec<Direction>> {
    fn rec(from: usize, left: usize, cur: &mut Vec<Direction>, out: &mut Vec<Vec<Direction>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for i in from..4 {
            cur.push(Direction::ALL[i]);
            rec(i, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, depth, &mut Vec::new(), &mut out);
    out
}

/// Upper bound on available pin slots per rectangle: counts standard cells
/// and all macro-boundary cells, whether or not their pin is taken.
pub struct PinCapacity {
    width: i64,
    sums: Vec<u32>,
}

impl PinCapacity {
    pub fn new(grid: &Grid) -> Self {
        let w = grid.width as usize + 1;
        let h = grid.height as usize + 1;
        let mut sums = vec![0u32; w * h];
        for y in 0..grid.height as usize {
            let mut row = 0u32;
            for x in 0..grid.width as usize {
                let s = grid.state_at(y * grid.width as usize + x);
                if matches!(s, CellState::StandardCell | CellState::MacroBoundary(_)) {
                    row += 1;
                }
                sums[(y + 1) * w + x + 1] = sums[y * w + x + 1] + row;
            }
        }
        PinCapacity { width: w as i64, sums }
    }

    pub fn count(&self, r: Rect) -> usize {
        let at = |x: i64, y: i64| self.sums[(y * self.width + x) as usize];
        (at(r.hi.x + 1, r.hi.y + 1) + at(r.lo.x, r.lo.y) - at(r.lo.x, r.hi.y + 1) - at(r.hi.x + 1, r.lo.y)) as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrowParams {
    /// Enlargement levels explored in all four directions before switching to
    /// the single most promising direction.
    pub full_depth: usize,
    /// Largest tolerated excess over the minimum HPWL for the degree.
    pub slack: i64,
    /// Exact reachability checks allowed per call.
    pub max_checks: usize,
    /// Whether free macro-boundary cells may join a net beyond its seeds.
    #[serde(default = "yes")]
    pub macro_extras: bool,
}

fn yes() -> bool {
    true
}

impl Default for GrowParams {
    fn default() -> Self {
        GrowParams { full_depth: 6, slack: 1, max_checks: 16, macro_extras: true }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalNet {
    /// Distinct, rectilinearly connected pin cells; seeds first.
    pub pins: Vec<GridPoint>,
    pub hpwl: i64,
    pub bound: i64,
}

impl LocalNet {
    pub fn degree(&self) -> usize {
        self.pins.len()
    }
}

struct Candidate {
    rect: Rect,
    hp: i64,
    cap: usize,
}

fn candidate_boxes(grid: &Grid, cap: &PinCapacity, base: Rect, depth_limit: i64, full_depth: usize) -> Vec<Candidate> {
    let bounds = grid.bounds();
    let inside = |r: &Rect| r.lo.x >= 0 && r.lo.y >= 0 && r.hi.x <= bounds.hi.x && r.hi.y <= bounds.hi.y;
    let full = (depth_limit.max(0) as usize).min(full_depth);
    // Count tuples give distinct boxes; only greedy extensions can meet.
    let mut seen = FxHashSet::default();
    let mut out = Vec::new();
    let mut layer = Vec::new();
    // Direction-count tuples (n, s, e, w) enumerate each multiset once.
    for d in 0..=full {
        for n in 0..=d {
            for s in 0..=d - n {
                for e in 0..=d - n - s {
                    let w = d - n - s - e;
                    let r = Rect {
                        lo: GridPoint::new(base.lo.x - w as i64, base.lo.y - s as i64),
                        hi: GridPoint::new(base.hi.x + e as i64, base.hi.y + n as i64),
                    };
                    if !inside(&r) {
                        continue;
                    }
                    out.push(Candidate { rect: r, hp: r.half_perimeter(), cap: cap.count(r) });
                    if d == full {
                        layer.push(r);
                    }
                }
            }
        }
    }
    let extra = depth_limit - full as i64;
    for mut r in layer {
        for _ in 0..extra.max(0) {
            let base_cap = cap.count(r);
            let next = Direction::ALL
                .iter()
                .map(|d| d.grow(r))
                .filter(inside)
                .max_by_key(|g| (cap.count(*g) - base_cap, std::cmp::Reverse(g.area())));
            let Some(g) = next else { break };
            r = g;
            if !seen.insert(r) {
                break;
            }
            out.push(Candidate { rect: r, hp: r.half_perimeter(), cap: cap.count(r) });
        }
    }
    // Ascending hp, then descending capacity, then ascending area; the
    // generation index keeps ties in order.
    let mut keyed: Vec<(u128, Candidate)> = out
        .into_iter()
        .enumerate()
        .map(|(i, c)| {
            let key = (c.hp as u128) << 96 | ((u32::MAX - c.cap as u32) as u128) << 64 | (c.rect.area() as u128) << 32 | i as u128;
            (key, c)
        })
        .collect();
    keyed.sort_unstable_by_key(|k| k.0);
    keyed.into_iter().map(|k| k.1).collect()
}

/// Breadth-first order of available cells reachable from the seeds inside
/// `rect`; seeds come first. Without `macro_extras` only standard cells are
/// added.
fn reachable(grid: &Grid, seeds: &[GridPoint], rect: Rect, limit: usize, macro_extras: bool) -> Vec<GridPoint> {
    let mut seen: FxHashSet<GridPoint> = seeds.iter().copied().collect();
    let mut order: Vec<GridPoint> = seeds.to_vec();
    let mut queue: VecDeque<GridPoint> = seeds.iter().copied().collect();
    while let Some(p) = queue.pop_front() {
        if order.len() >= limit {
            break;
        }
        for q in grid.neighbors(p) {
            let usable = grid.is_available(q) && (macro_extras || grid.state(q) == CellState::StandardCell);
            if rect.contains(q) && usable && seen.insert(q) {
                order.push(q);
                queue.push_back(q);
            }
        }
    }
    order
}

/// Builds the highest-degree net containing every seed whose HPWL is within
/// `params.slack` of the optimum for its degree. Exact nets are preferred
/// over higher-degree nets that need slack. Degrees run from `tmax` down and
/// must pass `allowed`. The grid is not modified.
pub fn grow_local_net(
    grid: &Grid,
    cap: &PinCapacity,
    seeds: &[GridPoint],
    tmax: usize,
    allowed: impl Fn(usize) -> bool,
    params: &GrowParams,
) -> Option<LocalNet> {
    let sb = SeedBox::new(seeds.to_vec())?;
    if seeds.iter().any(|&p| !grid.is_available(p)) {
        return None;
    }
    let t_lo = seeds.len().max(2);
    if tmax < t_lo {
        return None;
    }
    let top = min_hpwl(tmax).ok()? as i64 + params.slack;
    let base_hp = sb.rect.half_perimeter();
    if base_hp > top {
        return None;
    }
    // Every candidate lies inside the seed box widened by the spare depth.
    let t_min = (t_lo..=tmax).find(|&t| allowed(t))?;
    let spare = top - base_hp;
    let window = Rect {
        lo: GridPoint::new(sb.rect.lo.x - spare, sb.rect.lo.y - spare),
        hi: GridPoint::new(sb.rect.hi.x + spare, sb.rect.hi.y + spare),
    };
    if reachable(grid, seeds, window, t_min, params.macro_extras).len() < t_min {
        return None;
    }
    let cands = candidate_boxes(grid, cap, sb.rect, spare, params.full_depth);
    let mut checked: FxHashMap<Rect, usize> = FxHashMap::default();
    let mut checks = 0;
    for slack in 0..=params.slack {
        for t in (t_lo..=tmax).rev() {
            if !allowed(t) {
                continue;
            }
            let bound = min_hpwl(t).ok()? as i64;
            let limit = bound + slack;
            if limit < base_hp {
                continue;
            }
            for c in cands.iter().take_while(|c| c.hp <= limit) {
                if c.cap < t {
                    continue;
                }
                let got = match checked.get(&c.rect) {
                    Some(&n) => n,
                    None => {
                        if checks == params.max_checks {
                            continue;
                        }
                        checks += 1;
                        let n = reachable(grid, seeds, c.rect, usize::MAX, params.macro_extras).len();
                        checked.insert(c.rect, n);
                        n
                    }
                };
                if got >= t {
                    let pins = reachable(grid, seeds, c.rect, t, params.macro_extras);
                    let pins = pins[..t].to_vec();
                    let hpwl = grid_hpwl(&pins);
                    debug_assert!(hpwl >= bound && hpwl <= limit);
                    return Some(LocalNet { pins, hpwl, bound });
                }
            }
        }
    }
    None
}

/// Claims the macro-boundary pin slots of `net`.
pub fn commit_local_net(grid: &mut Grid, net: &LocalNet) {
    for &p in &net.pins {
        grid.use_pin(p);
    }
}
