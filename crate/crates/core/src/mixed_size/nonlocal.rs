// SPDX-License-Identifier: Apache-2.0

//! Monotone chains of nonlocal nets between far-apart fixed terminals.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::grid::{CellState, Grid};
use crate::chain::validate_chain_points;
use crate::geom::{GridPoint, Rect};
use crate::netlist::DegreeHistogram;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainOptions {
    pub enabled: bool,
    /// Pads spread evenly around the region outline.
    pub pads: usize,
    /// Fixed-macro boundary cells may also serve as terminals.
    pub fixed_macro_terminals: bool,
    /// Typical corner-to-corner step as a fraction of the grid width/height.
    pub span_fraction: f64,
}

impl Default for ChainOptions {
    fn default() -> Self {
        ChainOptions { enabled: false, pads: 32, fixed_macro_terminals: false, span_fraction: 0.1 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainNets {
    pub start: usize,
    pub end: usize,
    /// Path vertices: start terminal, net-box corners, end terminal.
    pub path: Vec<GridPoint>,
    /// Pins per net; net i spans `path[i]` and `path[i + 1]`.
    pub nets: Vec<Vec<GridPoint>>,
}

impl ChainNets {
    pub fn length(&self) -> i64 {
        self.path.windows(2).map(|w| w[0].manhattan(w[1])).sum()
    }
}

/// Pairs terminals that lie on opposite sides of their centroid: sorted by
/// angle, each terminal is matched with the one half the list away.
pub fn pair_terminals(terminals: &[GridPoint]) -> Vec<(usize, usize)> {
    let n = terminals.len();
    if n < 2 {
        return Vec::new();
    }
    let cx = terminals.iter().map(|p| p.x as f64).sum::<f64>() / n as f64;
    let cy = terminals.iter().map(|p| p.y as f64).sum::<f64>() / n as f64;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        let ang = |i: usize| (terminals[i].y as f64 - cy).atan2(terminals[i].x as f64 - cx);
        ang(a).total_cmp(&ang(b)).then(a.cmp(&b))
    });
    let half = n / 2;
    (0..half).map(|i| (order[i], order[i + half])).collect()
}

/// Pad locations one cell outside the grid, evenly spaced along the outline.
pub fn perimeter_pads(width: i64, height: i64, count: usize) -> Vec<GridPoint> {
    let perim = 2 * (width + height + 2);
    (0..count)
        .map(|i| {
            let mut s = (i as i64 * perim) / count.max(1) as i64;
            // Walk the ring (-1..=width, -1..=height) counter-clockwise from (-1, -1).
            let w = width + 1;
            let h = height + 1;
            if s < w {
                return GridPoint::new(-1 + s, -1);
            }
            s -= w;
            if s < h {
                return GridPoint::new(width, -1 + s);
            }
            s -= h;
            if s < w {
                return GridPoint::new(width - s, height);
            }
            s -= w;
            GridPoint::new(-1, height - s)
        })
        .collect()
}

fn pick_degree<R: Rng>(hist: &DegreeHistogram, fits: usize, rng: &mut R) -> Option<usize> {
    let options: Vec<(usize, u64)> = hist.iter().filter(|&(k, _)| k >= 2 && k <= fits).collect();
    let total: u64 = options.iter().map(|o| o.1).sum();
    if total == 0 {
        return None;
    }
    let mut r = rng.random_range(0..total);
    for (k, n) in options {
        if r < n {
            return Some(k);
        }
        r -= n;
    }
    None
}

fn next_corner<R: Rng>(grid: &Grid, head: GridPoint, end: GridPoint, frac: f64, rng: &mut R) -> GridPoint {
    let step = |extent: i64, rng: &mut R| ((extent as f64 * frac * rng.random_range(0.5..1.5)).round() as i64).max(1);
    let (sx, sy) = (step(grid.width, rng), step(grid.height, rng));
    let (dx, dy) = (end.x - head.x, end.y - head.y);
    if dx.abs() <= sx && dy.abs() <= sy {
        return end;
    }
    let target = GridPoint::new(head.x + dx.signum() * dx.abs().min(sx), head.y + dy.signum() * dy.abs().min(sy));
    let window = Rect::spanning(head, end);
    let max_r = sx + sy;
    for r in 0..=max_r {
        for k in 0..=r {
            for (ox, oy) in [(k, r - k), (-k, r - k), (k, k - r), (-k, k - r)] {
                let q = GridPoint::new(target.x + ox, target.y + oy);
                if q != head && window.contains(q) && grid.contains(q) && grid.state(q) == CellState::StandardCell {
                    return q;
                }
            }
        }
    }
    end
}

/// Builds one chain per terminal pair, charging each net's degree to `hist`.
/// Corners advance from the start toward the end terminal by randomized
/// steps of about `span_fraction` of the grid; every net also takes random
/// extra pins inside its box. A chain that cannot be completed is rolled
/// back and skipped.
pub fn add_nonlocal_chains<R: Rng>(
    grid: &mut Grid,
    terminals: &[GridPoint],
    hist: &mut DegreeHistogram,
    span_fraction: f64,
    rng: &mut R,
) -> Vec<ChainNets> {
    let pairs = pair_terminals(terminals);
    if pairs.is_empty() && !terminals.is_empty() {
        log::warn!("only {} terminal available; no chains built", terminals.len());
    }
    let mut chains = Vec::new();
    for (a, b) in pairs {
        let (s, e) = if rng.random_bool(0.5) { (a, b) } else { (b, a) };
        let saved = hist.clone();
        match build_chain(grid, terminals[s], terminals[e], hist, span_fraction, rng) {
            Some((path, nets)) => {
                for net in &nets {
                    for &p in net {
                        if grid.contains(p) {
                            grid.use_pin(p);
                        }
                    }
                }
                chains.push(ChainNets { start: s, end: e, path, nets });
            }
            None => {
                log::warn!("chain between terminals {s} and {e} abandoned");
                *hist = saved;
            }
        }
    }
    chains
}

type Built = (Vec<GridPoint>, Vec<Vec<GridPoint>>);

fn build_chain<R: Rng>(grid: &Grid, start: GridPoint, end: GridPoint, hist: &mut DegreeHistogram, frac: f64, rng: &mut R) -> Option<Built> {
    if start == end {
        return None;
    }
    let usable = |p: GridPoint| !grid.contains(p) || grid.is_available(p);
    if !usable(start) || !usable(end) {
        return None;
    }
    let mut path = vec![start];
    let mut nets: Vec<Vec<GridPoint>> = Vec::new();
    let mut head = start;
    while head != end {
        let corner = next_corner(grid, head, end, frac, rng);
        let bx = Rect::spanning(head, corner);
        let prev: HashSet<GridPoint> = nets.last().map(|n| n.iter().copied().collect()).unwrap_or_default();
        let mut pool: Vec<GridPoint> = bx
            .points()
            .filter(|&q| q != head && q != corner && grid.is_available(q) && !prev.contains(&q))
            .collect();
        let t = pick_degree(hist, pool.len() + 2, rng)?;
        hist.decrement(t);
        let (extra, _) = pool.partial_shuffle(rng, t - 2);
        let mut pins = vec![head, corner];
        pins.extend_from_slice(extra);
        nets.push(pins);
        path.push(corner);
        head = corner;
    }
    let report = validate_chain_points(&path, &nets);
    if !report.valid {
        log::warn!("discarding chain: {}", report.problem.unwrap_or_default());
        return None;
    }
    Some((path, nets))
}
