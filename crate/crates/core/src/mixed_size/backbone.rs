// SPDX-License-Identifier: Apache-2.0

//! Minimal connected netlist covering every standard cell and macro.

use std::collections::{HashMap, HashSet, VecDeque};

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::grid::{CellState, Grid};
use super::local_net::{commit_local_net, grow_local_net, GrowParams, LocalNet, PinCapacity};
use crate::geom::GridPoint;
use crate::netlist::DegreeHistogram;
use crate::{Error, Result};

/// Degrees a new net may take: either still budgeted, or absorbable by
/// splitting the next larger budgeted degree into two valid nets.
pub fn allowed_degrees(hist: &DegreeHistogram) -> Vec<bool> {
    let max = hist.max_degree().unwrap_or(0);
    let mut out = vec![false; max + 1];
    let mut next: Option<usize> = None;
    for t in (0..=max).rev() {
        if t >= 2 {
            out[t] = hist.get(t) > 0 || next.is_some_and(|k| k - t >= 2);
        }
        if hist.get(t) > 0 {
            next = Some(t);
        }
    }
    out
}

/// Charges a net of degree `d` to the budget. Returns true when the
/// compromise rule had to split a larger degree.
pub fn charge(hist: &mut DegreeHistogram, d: usize) -> bool {
    if hist.decrement(d) {
        return false;
    }
    let k = hist.next_above(d).expect("degree checked against allowed_degrees");
    hist.decrement(k);
    hist.increment(k - d);
    true
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Backbone {
    pub nets: Vec<LocalNet>,
    /// Nets accepted through the compromise rule.
    pub compromises: usize,
    /// Standard cells moved out of pockets the backbone could not reach.
    pub relocated: usize,
}

struct Coverage {
    cell: Vec<bool>,
    macro_: Vec<bool>,
    queued: Vec<bool>,
    frontier: Vec<usize>,
    remaining: usize,
}

impl Coverage {
    fn vertex_done(&self, grid: &Grid, i: usize) -> bool {
        match grid.state_at(i) {
            CellState::StandardCell => self.cell[i],
            CellState::MacroBoundary(m) => self.macro_[m as usize],
            _ => true,
        }
    }

    fn enqueue_neighbors(&mut self, grid: &Grid, p: GridPoint) {
        for q in grid.neighbors(p) {
            let j = grid.idx(q);
            if !self.queued[j] && !self.vertex_done(grid, j) {
                self.queued[j] = true;
                self.frontier.push(j);
            }
        }
    }

    fn connect(&mut self, grid: &Grid, p: GridPoint) {
        let i = grid.idx(p);
        match grid.state_at(i) {
            CellState::StandardCell if !self.cell[i] => {
                self.cell[i] = true;
                self.remaining -= 1;
                self.enqueue_neighbors(grid, p);
            }
            CellState::MacroBoundary(m) if !self.macro_[m as usize] => {
                self.macro_[m as usize] = true;
                self.remaining -= 1;
                let boundary: Vec<GridPoint> = grid.macro_boundary(m as usize).collect();
                for b in boundary {
                    self.enqueue_neighbors(grid, b);
                }
            }
            _ => {}
        }
    }

    /// A connected neighbor of `b` that can still take a pin.
    fn anchor<R: Rng>(&self, grid: &Grid, b: GridPoint, rng: &mut R) -> Option<GridPoint> {
        let opts: Vec<GridPoint> = grid
            .neighbors(b)
            .filter(|&q| grid.is_available(q) && self.vertex_done(grid, grid.idx(q)))
            .collect();
        if opts.is_empty() {
            None
        } else {
            Some(opts[rng.random_range(0..opts.len())])
        }
    }

    /// A cell that can host a new standard cell wired straight into the
    /// connected region.
    fn dock(&self, grid: &Grid, p: GridPoint) -> bool {
        grid.state(p) == CellState::WhiteSpace
            && grid.neighbors(p).any(|q| grid.is_available(q) && self.vertex_done(grid, grid.idx(q)))
    }
}

/// Removal candidates tried per cell before a bridge is abandoned.
const REMOVAL_TRIES: usize = 64;

impl Coverage {
    /// A free pin cell not yet reached by the backbone.
    fn open(&self, grid: &Grid, j: usize) -> bool {
        grid.is_available(grid.point(j)) && !self.vertex_done(grid, j)
    }
}

/// Whether the members flagged `inside` form one piece, with all boundary
/// cells of a macro adjacent to each other.
fn spans_one_piece(grid: &Grid, members: &[usize], inside: &[bool]) -> bool {
    let Some(&start) = members.iter().find(|&&j| inside[j]) else {
        return true;
    };
    let want = members.iter().filter(|&&j| inside[j]).count();
    let mut seen = HashSet::from([start]);
    let mut expanded = HashSet::new();
    let mut queue = VecDeque::from([start]);
    while let Some(i) = queue.pop_front() {
        let p = grid.point(i);
        let mut next: Vec<usize> = grid.neighbors(p).map(|q| grid.idx(q)).collect();
        if let CellState::MacroBoundary(m) = grid.state_at(i) {
            if expanded.insert(m) {
                next.extend(grid.macro_boundary(m as usize).map(|q| grid.idx(q)));
            }
        }
        for j in next {
            if inside[j] && seen.insert(j) {
                queue.push_back(j);
            }
        }
    }
    seen.len() == want
}

/// Unconnected free pin cells reachable from `i`, whether the set touches
/// the connected region, and whether it holds a macro.
fn unconnected_component(grid: &Grid, cov: &Coverage, i: usize, mark: &mut [bool]) -> (Vec<usize>, bool, bool) {
    let (mut comp, mut linked, mut holds_macro) = (vec![i], false, false);
    let mut expanded = HashSet::new();
    mark[i] = true;
    let mut k = 0;
    while k < comp.len() {
        let j = comp[k];
        k += 1;
        let p = grid.point(j);
        let mut next: Vec<usize> = grid.neighbors(p).map(|q| grid.idx(q)).collect();
        if let CellState::MacroBoundary(m) = grid.state_at(j) {
            holds_macro = true;
            if expanded.insert(m) {
                next.extend(grid.macro_boundary(m as usize).map(|q| grid.idx(q)));
            }
        }
        for q in next {
            if !grid.is_available(grid.point(q)) {
                continue;
            }
            if cov.vertex_done(grid, q) {
                linked = true;
            } else if !mark[q] {
                mark[q] = true;
                comp.push(q);
            }
        }
    }
    (comp, linked, holds_macro)
}

/// Shortest run of white cells from `comp` to a dock, dock last.
fn white_bridge(grid: &Grid, cov: &Coverage, comp: &[usize]) -> Option<Vec<usize>> {
    let mut parent: HashMap<usize, Option<usize>> = HashMap::new();
    let mut queue = VecDeque::new();
    for &j in comp {
        for q in grid.neighbors(grid.point(j)) {
            let w = grid.idx(q);
            if grid.state_at(w) == CellState::WhiteSpace && !parent.contains_key(&w) {
                parent.insert(w, None);
                queue.push_back(w);
            }
        }
    }
    while let Some(w) = queue.pop_front() {
        if cov.dock(grid, grid.point(w)) {
            let mut path = vec![w];
            while let Some(Some(prev)) = parent.get(path.last().unwrap()) {
                path.push(*prev);
            }
            path.reverse();
            return Some(path);
        }
        for q in grid.neighbors(grid.point(w)) {
            let x = grid.idx(q);
            if grid.state_at(x) == CellState::WhiteSpace && !parent.contains_key(&x) {
                parent.insert(x, Some(w));
                queue.push_back(x);
            }
        }
    }
    None
}

/// Standard cells of `comp` whose removal leaves `comp` plus `path` in one
/// piece, one per bridge cell. None if too few can be spared.
fn spare_cells(grid: &Grid, comp: &[usize], path: &[usize]) -> Option<Vec<usize>> {
    let mut inside = vec![false; grid.len()];
    let mut members = comp.to_vec();
    members.extend_from_slice(path);
    for &j in &members {
        inside[j] = true;
    }
    let degree = |j: usize, inside: &[bool]| grid.neighbors(grid.point(j)).filter(|&q| inside[grid.idx(q)]).count();
    let mut spared = Vec::new();
    while spared.len() < path.len() {
        let mut cands: Vec<usize> = comp
            .iter()
            .copied()
            .filter(|&j| inside[j] && grid.state_at(j) == CellState::StandardCell)
            .collect();
        cands.sort_by_key(|&j| (degree(j, &inside), j));
        let pick = cands.into_iter().take(REMOVAL_TRIES).find(|&j| {
            inside[j] = false;
            let ok = spans_one_piece(grid, &members, &inside);
            inside[j] = true;
            ok
        })?;
        inside[pick] = false;
        spared.push(pick);
    }
    Some(spared)
}

/// Reconnects components of unconnected cells and macros that no longer
/// touch the connected region. A component is joined through the shortest
/// run of white cells, paid for by whitening as many of its own standard
/// cells; a macro-free component that cannot spare them is moved next to
/// the connected region instead. Returns the number of cells moved. The
/// standard-cell count and macros are unchanged.
fn relocate_stranded(grid: &mut Grid, cov: &mut Coverage) -> usize {
    let n = grid.len();
    let mut mark = vec![false; n];
    let mut moves: Vec<(Vec<usize>, Vec<GridPoint>)> = Vec::new();
    for i in 0..n {
        if mark[i] || !cov.open(grid, i) {
            continue;
        }
        let (comp, linked, holds_macro) = unconnected_component(grid, cov, i, &mut mark);
        if linked {
            continue;
        }
        let bridged = white_bridge(grid, cov, &comp)
            .and_then(|path| spare_cells(grid, &comp, &path).map(|spared| (spared, path.into_iter().map(|w| grid.point(w)).collect())));
        match bridged {
            Some(m) => moves.push(m),
            None if !holds_macro => moves.push((comp.clone(), docks(grid, cov, &comp))),
            None => {}
        }
    }

    let mut moved = 0;
    for (from, to) in moves {
        // Earlier moves in this pass may have used the same white cells.
        if to.iter().any(|&p| grid.state(p) != CellState::WhiteSpace) || to.len() < from.len() {
            continue;
        }
        for (&f, &t) in from.iter().zip(&to) {
            grid.set_state(grid.point(f), CellState::WhiteSpace);
            grid.set_state(t, CellState::StandardCell);
            moved += 1;
        }
        for &t in &to {
            cov.queued[grid.idx(t)] = true;
            cov.frontier.push(grid.idx(t));
        }
    }
    moved
}

/// The free white cells next to the connected region nearest to `comp`, one
/// per cell of `comp`.
fn docks(grid: &Grid, cov: &Coverage, comp: &[usize]) -> Vec<GridPoint> {
    let mut seen = vec![false; grid.len()];
    let mut queue: VecDeque<usize> = comp.iter().copied().collect();
    for &i in comp {
        seen[i] = true;
    }
    let mut out = Vec::new();
    while let Some(i) = queue.pop_front() {
        if out.len() == comp.len() {
            break;
        }
        let p = grid.point(i);
        if cov.dock(grid, p) {
            out.push(p);
        }
        for q in grid.neighbors(p) {
            let j = grid.idx(q);
            if !seen[j] {
                seen[j] = true;
                queue.push_back(j);
            }
        }
    }
    out
}

/// Connects every standard cell and macro with local nets drawn from `hist`,
/// growing outward from one random net. Each new net joins an unconnected
/// frontier cell to an adjacent connected one and takes as many further
/// standard cells as the budget allows; a degree missing from the budget is charged to the next
/// larger one, whose remainder goes back into the budget. Pockets whose only
/// link to the rest is a macro pin already taken are moved next to the
/// connected region, and `cap` is rebuilt to match.
pub fn build_backbone<R: Rng>(
    grid: &mut Grid,
    cap: &mut PinCapacity,
    hist: &mut DegreeHistogram,
    params: &GrowParams,
    rng: &mut R,
) -> Result<Backbone> {
    // Macro ports are single-use, so beyond its seeds a backbone net takes
    // standard cells only.
    let params = &GrowParams { macro_extras: false, ..*params };
    let n = grid.len();
    let std_cells = grid.count(|s| s == CellState::StandardCell);
    let mut cov = Coverage {
        cell: vec![false; n],
        macro_: vec![false; grid.macros.len()],
        queued: vec![false; n],
        frontier: Vec::new(),
        remaining: std_cells + grid.macros.len(),
    };
    let mut out = Backbone::default();
    if cov.remaining <= 1 {
        return Ok(out);
    }

    let mut starts: Vec<usize> = (0..n).filter(|&i| matches!(grid.state_at(i), CellState::StandardCell | CellState::MacroBoundary(_))).collect();
    let first = loop {
        if starts.is_empty() {
            return Err(Error::Stalled { unconnected: cov.remaining });
        }
        let Some(tmax) = hist.max_degree() else {
            return Err(Error::BudgetExhausted { frontier: cov.remaining });
        };
        let i = starts.swap_remove(rng.random_range(0..starts.len()));
        let allowed = allowed_degrees(hist);
        if let Some(net) = grow_local_net(grid, cap, &[grid.point(i)], tmax, |t| allowed[t], params) {
            break net;
        }
    };
    accept(grid, hist, &mut cov, &mut out, first);

    let mut deferred = Vec::new();
    let mut progress = false;
    while cov.remaining > 0 {
        if cov.frontier.is_empty() {
            if deferred.is_empty() || !progress {
                let moved = relocate_stranded(grid, &mut cov);
                if moved == 0 {
                    return Err(Error::Stalled { unconnected: cov.remaining });
                }
                out.relocated += moved;
                *cap = PinCapacity::new(grid);
            }
            cov.frontier.append(&mut deferred);
            progress = false;
        }
        let bi = cov.frontier.swap_remove(rng.random_range(0..cov.frontier.len()));
        if cov.vertex_done(grid, bi) {
            continue;
        }
        let Some(tmax) = hist.max_degree() else {
            return Err(Error::BudgetExhausted { frontier: cov.remaining });
        };
        let b = grid.point(bi);
        let grown = cov.anchor(grid, b, rng).and_then(|c| {
            let allowed = allowed_degrees(hist);
            grow_local_net(grid, cap, &[b, c], tmax, |t| allowed[t], params)
        });
        match grown {
            Some(net) => {
                accept(grid, hist, &mut cov, &mut out, net);
                progress = true;
            }
            None => deferred.push(bi),
        }
    }
    Ok(out)
}

fn accept(grid: &mut Grid, hist: &mut DegreeHistogram, cov: &mut Coverage, out: &mut Backbone, net: LocalNet) {
    if charge(hist, net.degree()) {
        out.compromises += 1;
    }
    commit_local_net(grid, &net);
    for &p in &net.pins {
        cov.connect(grid, p);
    }
    out.nets.push(net);
}
