// SPDX-License-Identifier: Apache-2.0

//! Exhaustive HPWL optimum over injective assignments of movable modules to
//! slots. Fixed modules keep their positions.

use crate::netlist::{ModuleId, Netlist, Placement};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleLimits {
    pub max_movables: usize,
    pub max_slots: usize,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits { max_movables: 8, max_slots: 16 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub optimum: f64,
    /// One argmin: `placement` with every movable module moved to its slot.
    pub placement: Placement,
    pub nodes: u64,
}

#[derive(Clone, Copy)]
struct Bbox {
    xlo: f64,
    xhi: f64,
    ylo: f64,
    yhi: f64,
}

impl Bbox {
    const EMPTY: Bbox = Bbox { xlo: f64::INFINITY, xhi: f64::NEG_INFINITY, ylo: f64::INFINITY, yhi: f64::NEG_INFINITY };

    fn add(&mut self, x: f64, y: f64) {
        self.xlo = self.xlo.min(x);
        self.xhi = self.xhi.max(x);
        self.ylo = self.ylo.min(y);
        self.yhi = self.yhi.max(y);
    }

    fn hpwl(&self) -> f64 {
        if self.xlo > self.xhi {
            0.0
        } else {
            self.xhi - self.xlo + self.yhi - self.ylo
        }
    }
}

struct Search<'a> {
    slots: &'a [(f64, f64)],
    /// Per movable (in search order): `(net, x offset, y offset)` of each pin.
    pins: Vec<Vec<(usize, f64, f64)>>,
    boxes: Vec<Bbox>,
    used: Vec<bool>,
    assign: Vec<usize>,
    best: f64,
    best_assign: Vec<usize>,
    nodes: u64,
}

impl Search<'_> {
    fn descend(&mut self, depth: usize, cost: f64) {
        self.nodes += 1;
        if cost >= self.best - 1e-9 {
            return;
        }
        if depth == self.pins.len() {
            self.best = cost;
            self.best_assign.clone_from(&self.assign);
            return;
        }
        for s in 0..self.slots.len() {
            if self.used[s] {
                continue;
            }
            let (sx, sy) = self.slots[s];
            let saved: Vec<(usize, Bbox)> = self.pins[depth].iter().map(|&(k, _, _)| (k, self.boxes[k])).collect();
            let mut next = cost;
            for i in 0..self.pins[depth].len() {
                let (k, ox, oy) = self.pins[depth][i];
                let before = self.boxes[k].hpwl();
                self.boxes[k].add(sx + ox, sy + oy);
                next += self.boxes[k].hpwl() - before;
            }
            self.used[s] = true;
            self.assign[depth] = s;
            self.descend(depth + 1, next);
            self.used[s] = false;
            for (k, b) in saved.into_iter().rev() {
                self.boxes[k] = b;
            }
        }
    }
}

/// Slots are lower-left corners; every movable module is placed with its
/// lower-left corner on a distinct slot.
pub fn brute_force_optimum(netlist: &Netlist, placement: &Placement, slots: &[(f64, f64)], limits: OracleLimits) -> Result<OracleResult> {
    let movables: Vec<ModuleId> = (0..netlist.modules.len()).map(ModuleId).filter(|&m| netlist.module(m).movable).collect();
    if movables.len() > limits.max_movables {
        return Err(Error::OracleLimits(format!("{} movable modules, cap {}", movables.len(), limits.max_movables)));
    }
    if slots.len() > limits.max_slots {
        return Err(Error::OracleLimits(format!("{} slots, cap {}", slots.len(), limits.max_slots)));
    }
    if slots.len() < movables.len() {
        return Err(Error::OracleLimits(format!("{} slots for {} movable modules", slots.len(), movables.len())));
    }
    let mut order_of = vec![usize::MAX; netlist.modules.len()];
    let mut degree = vec![0usize; netlist.modules.len()];
    for net in &netlist.nets {
        for p in &net.pins {
            degree[p.module.0] += 1;
        }
    }
    let mut ordered = movables.clone();
    ordered.sort_by_key(|m| std::cmp::Reverse(degree[m.0]));
    for (i, m) in ordered.iter().enumerate() {
        order_of[m.0] = i;
    }
    let mut boxes = vec![Bbox::EMPTY; netlist.nets.len()];
    let mut pins = vec![Vec::new(); ordered.len()];
    for (k, net) in netlist.nets.iter().enumerate() {
        for p in &net.pins {
            let m = netlist.module(p.module);
            match order_of[p.module.0] {
                usize::MAX => {
                    let (x, y) = placement.pin_location(netlist, p)?;
                    boxes[k].add(x, y);
                }
                i => pins[i].push((k, m.width / 2.0 + p.dx, m.height / 2.0 + p.dy)),
            }
        }
    }
    let base: f64 = boxes.iter().map(Bbox::hpwl).sum();
    let mut search = Search {
        slots,
        pins,
        boxes,
        used: vec![false; slots.len()],
        assign: vec![0; ordered.len()],
        best: f64::INFINITY,
        best_assign: Vec::new(),
        nodes: 0,
    };
    search.descend(0, base);
    let mut out = placement.clone();
    for (i, m) in ordered.iter().enumerate() {
        let (x, y) = slots[search.best_assign[i]];
        out.set(*m, x, y);
    }
    Ok(OracleResult { optimum: search.best, placement: out, nodes: search.nodes })
}
