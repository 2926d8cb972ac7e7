// SPDX-License-Identifier: Apache-2.0

//! Local nets added after the backbone until the degree budget runs out.

use rand::Rng;

use super::grid::{CellState, Grid};
use super::local_net::{commit_local_net, grow_local_net, GrowParams, LocalNet, PinCapacity};
use crate::netlist::DegreeHistogram;

/// Replaces every degree above `threshold` by the fewest near-equal parts
/// that fit under it, keeping the pin total.
pub fn split_big_nets(hist: &DegreeHistogram, threshold: usize) -> DegreeHistogram {
    let threshold = threshold.max(2);
    let mut out = DegreeHistogram::new();
    for (k, n) in hist.iter() {
        if k <= threshold {
            out.add(k, n);
            continue;
        }
        let parts = k.div_ceil(threshold);
        let (base, extra) = (k / parts, k % parts);
        out.add(base + 1, n * extra as u64);
        out.add(base, n * (parts - extra) as u64);
    }
    out
}

/// Grows nets at random available locations, each of the largest degree
/// still budgeted. A first pass forms exact nets only; slack is spent only on
/// budget no exact net could take. A location that cannot host any budgeted
/// net is retired for the pass. Stops when the budget is empty or no location
/// remains; whatever is left in `hist` is unmet.
pub fn fill_nets<R: Rng>(grid: &mut Grid, cap: &PinCapacity, hist: &mut DegreeHistogram, params: &GrowParams, rng: &mut R) -> Vec<LocalNet> {
    let mut nets = Vec::new();
    let exact = GrowParams { slack: 0, ..*params };
    fill_pass(grid, cap, hist, &exact, rng, &mut nets);
    if params.slack > 0 {
        fill_pass(grid, cap, hist, params, rng, &mut nets);
    }
    nets
}

fn fill_pass<R: Rng>(grid: &mut Grid, cap: &PinCapacity, hist: &mut DegreeHistogram, params: &GrowParams, rng: &mut R, nets: &mut Vec<LocalNet>) {
    let mut locations: Vec<usize> =
        (0..grid.len()).filter(|&i| matches!(grid.state_at(i), CellState::StandardCell | CellState::MacroBoundary(_))).collect();
    while !locations.is_empty() {
        let Some(tmax) = hist.max_degree() else { break };
        let slot = rng.random_range(0..locations.len());
        let p = grid.point(locations[slot]);
        if !grid.is_available(p) {
            locations.swap_remove(slot);
            continue;
        }
        let budget = &*hist;
        match grow_local_net(grid, cap, &[p], tmax, |t| budget.get(t) > 0, params) {
            Some(net) => {
                hist.decrement(net.degree());
                commit_local_net(grid, &net);
                nets.push(net);
            }
            None => {
                locations.swap_remove(slot);
            }
        }
    }
}
