// SPDX-License-Identifier: Apache-2.0

//! Hypergraph netlist, placements, and degree histograms.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::geom::{BoxF, GridPoint};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ModuleId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NetId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModuleKind {
    StandardCell,
    /// Anything taller than one standard-cell row, fixed or movable.
    Macro,
    /// Fixed connection point (pads and other fixed objects one row tall).
    Terminal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Module {
    pub name: String,
    pub kind: ModuleKind,
    pub width: f64,
    pub height: f64,
    pub movable: bool,
    /// Trailing `.nodes` tokens (e.g. `terminal`), kept verbatim.
    pub annotations: Vec<String>,
}

impl Module {
    pub fn new(name: impl Into<String>, kind: ModuleKind, width: f64, height: f64, movable: bool) -> Self {
        let annotations = if movable { Vec::new() } else { vec!["terminal".to_string()] };
        Module { name: name.into(), kind, width, height, movable, annotations }
    }

    pub fn area(&self) -> f64 {
        self.width * self.height
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PinDirection {
    Input,
    Output,
    Bidirectional,
}

impl PinDirection {
    pub fn as_str(self) -> &'static str {
        match self {
            PinDirection::Input => "I",
            PinDirection::Output => "O",
            PinDirection::Bidirectional => "B",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "I" | "i" => Some(PinDirection::Input),
            "O" | "o" => Some(PinDirection::Output),
            "B" | "b" => Some(PinDirection::Bidirectional),
            _ => None,
        }
    }
}

/// Pin offset is measured from the module center, as in Bookshelf.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pin {
    pub module: ModuleId,
    pub direction: PinDirection,
    pub dx: f64,
    pub dy: f64,
}

impl Pin {
    pub fn centered(module: ModuleId) -> Self {
        Pin { module, direction: PinDirection::Bidirectional, dx: 0.0, dy: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Net {
    pub name: String,
    pub pins: Vec<Pin>,
}

impl Net {
    pub fn degree(&self) -> usize {
        self.pins.len()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Netlist {
    pub modules: Vec<Module>,
    pub nets: Vec<Net>,
    pub region: BoxF,
}

impl Netlist {
    pub fn new(region: BoxF) -> Self {
        Netlist { modules: Vec::new(), nets: Vec::new(), region }
    }

    pub fn add_module(&mut self, module: Module) -> ModuleId {
        self.modules.push(module);
        ModuleId(self.modules.len() - 1)
    }

    pub fn add_net(&mut self, net: Net) -> NetId {
        self.nets.push(net);
        NetId(self.nets.len() - 1)
    }

    pub fn module(&self, id: ModuleId) -> &Module {
        &self.modules[id.0]
    }

    pub fn net(&self, id: NetId) -> &Net {
        &self.nets[id.0]
    }

    pub fn module_index(&self) -> HashMap<&str, ModuleId> {
        self.modules.iter().enumerate().map(|(i, m)| (m.name.as_str(), ModuleId(i))).collect()
    }

    pub fn pin_count(&self) -> usize {
        self.nets.iter().map(Net::degree).sum()
    }

    /// Number of nets touching each module.
    pub fn module_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0usize; self.modules.len()];
        for net in &self.nets {
            let mut seen: Vec<usize> = net.pins.iter().map(|p| p.module.0).collect();
            seen.sort_unstable();
            seen.dedup();
            for m in seen {
                deg[m] += 1;
            }
        }
        deg
    }
}

/// Coordinate frame of a placement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    /// Physical length of one grid unit.
    pub grid_unit: f64,
    pub row_height: f64,
}

impl Default for Frame {
    fn default() -> Self {
        Frame { grid_unit: 1.0, row_height: 1.0 }
    }
}

/// Module positions (lower-left corners) indexed by [`ModuleId`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Placement {
    pub positions: Vec<Option<(f64, f64)>>,
    pub orientations: Vec<String>,
    pub frame: Frame,
}

impl Placement {
    pub fn new(module_count: usize, frame: Frame) -> Self {
        Placement { positions: vec![None; module_count], orientations: vec!["N".to_string(); module_count], frame }
    }

    pub fn set(&mut self, id: ModuleId, x: f64, y: f64) {
        self.positions[id.0] = Some((x, y));
    }

    pub fn get(&self, id: ModuleId) -> Option<(f64, f64)> {
        self.positions.get(id.0).copied().flatten()
    }

    /// Absolute pin location in the placement frame.
    pub fn pin_location(&self, netlist: &Netlist, pin: &Pin) -> Result<(f64, f64)> {
        let m = netlist.module(pin.module);
        let (x, y) = self.get(pin.module).ok_or_else(|| Error::Unplaced(m.name.clone()))?;
        Ok((x + m.width / 2.0 + pin.dx, y + m.height / 2.0 + pin.dy))
    }

    /// Grid cell whose center carries the pin.
    pub fn pin_grid_point(&self, netlist: &Netlist, pin: &Pin) -> Result<GridPoint> {
        let (x, y) = self.pin_location(netlist, pin)?;
        let gx = x / self.frame.grid_unit - 0.5;
        let gy = y / self.frame.grid_unit - 0.5;
        let (rx, ry) = (gx.round(), gy.round());
        if (gx - rx).abs() > 1e-9 || (gy - ry).abs() > 1e-9 {
            return Err(Error::NotGridIntegral { module: netlist.module(pin.module).name.clone(), x, y });
        }
        Ok(GridPoint::new(rx as i64, ry as i64))
    }

    pub fn net_grid_points(&self, netlist: &Netlist, net: &Net) -> Result<Vec<GridPoint>> {
        net.pins.iter().map(|p| self.pin_grid_point(netlist, p)).collect()
    }

    /// Occupied box of a placed module.
    pub fn module_box(&self, netlist: &Netlist, id: ModuleId) -> Option<BoxF> {
        let m = netlist.module(id);
        self.get(id).map(|(x, y)| BoxF::new(x, y, x + m.width, y + m.height))
    }
}

/// Target or observed number of nets per degree.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeHistogram {
    counts: Vec<u64>,
}

impl DegreeHistogram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_counts(counts: Vec<u64>) -> Self {
        let mut h = DegreeHistogram { counts };
        h.trim();
        h
    }

    pub fn from_pairs<I: IntoIterator<Item = (usize, u64)>>(pairs: I) -> Self {
        let mut h = DegreeHistogram::new();
        for (k, n) in pairs {
            h.add(k, n);
        }
        h
    }

    pub fn get(&self, degree: usize) -> u64 {
        self.counts.get(degree).copied().unwrap_or(0)
    }

    pub fn add(&mut self, degree: usize, n: u64) {
        if n == 0 {
            return;
        }
        if self.counts.len() <= degree {
            self.counts.resize(degree + 1, 0);
        }
        self.counts[degree] += n;
    }

    pub fn increment(&mut self, degree: usize) {
        self.add(degree, 1);
    }

    /// Returns false when the entry is already zero.
    pub fn decrement(&mut self, degree: usize) -> bool {
        match self.counts.get_mut(degree) {
            Some(c) if *c > 0 => {
                *c -= 1;
                self.trim();
                true
            }
            _ => false,
        }
    }

    fn trim(&mut self) {
        while self.counts.last() == Some(&0) {
            self.counts.pop();
        }
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn max_degree(&self) -> Option<usize> {
        self.counts.iter().rposition(|&c| c > 0)
    }

    /// Largest degree in `lo..=hi` with a nonzero count.
    pub fn max_degree_in(&self, lo: usize, hi: usize) -> Option<usize> {
        let hi = hi.min(self.counts.len().saturating_sub(1));
        (lo..=hi).rev().find(|&k| self.get(k) > 0)
    }

    /// Smallest degree strictly above `d` with a nonzero count.
    pub fn next_above(&self, d: usize) -> Option<usize> {
        (d + 1..self.counts.len()).find(|&k| self.counts[k] > 0)
    }

    pub fn total_nets(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn total_pins(&self) -> u64 {
        self.counts.iter().enumerate().map(|(k, &n)| k as u64 * n).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, u64)> + '_ {
        self.counts.iter().enumerate().filter(|(_, &n)| n > 0).map(|(k, &n)| (k, n))
    }

    /// Entrywise `self - other`, as signed differences.
    pub fn diff(&self, other: &DegreeHistogram) -> Vec<(usize, i64)> {
        let len = self.counts.len().max(other.counts.len());
        (0..len)
            .map(|k| (k, self.get(k) as i64 - other.get(k) as i64))
            .filter(|&(_, d)| d != 0)
            .collect()
    }

    /// Observed degrees of a netlist.
    pub fn of_netlist(netlist: &Netlist) -> Self {
        let mut h = DegreeHistogram::new();
        for net in &netlist.nets {
            h.increment(net.degree());
        }
        h
    }

    /// Scale to roughly `target_nets` nets, keeping at least one net for every
    /// degree present.
    pub fn scaled_to(&self, target_nets: u64) -> Self {
        let total = self.total_nets();
        if total == 0 {
            return self.clone();
        }
        let f = target_nets as f64 / total as f64;
        DegreeHistogram::from_pairs(self.iter().map(|(k, n)| (k, ((n as f64 * f).round() as u64).max(1))))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn histogram_bookkeeping() {
        let mut h = DegreeHistogram::from_pairs([(2, 2), (3, 1)]);
        assert_eq!(h.total_nets(), 3);
        assert_eq!(h.total_pins(), 7);
        assert_eq!(h.max_degree(), Some(3));
        assert!(h.decrement(3));
        assert!(!h.decrement(3));
        assert_eq!(h.max_degree(), Some(2));
        assert_eq!(h.next_above(1), Some(2));
        assert_eq!(h.next_above(2), None);
    }

    #[test]
    fn pin_resolution_requires_cell_centers() {
        let mut nl = Netlist::new(BoxF::new(0.0, 0.0, 4.0, 4.0));
        let a = nl.add_module(Module::new("a", ModuleKind::StandardCell, 1.0, 1.0, true));
        let mut pl = Placement::new(1, Frame::default());
        pl.set(a, 2.0, 3.0);
        assert_eq!(pl.pin_grid_point(&nl, &Pin::centered(a)).unwrap(), GridPoint::new(2, 3));
        pl.set(a, 2.25, 3.0);
        assert!(matches!(pl.pin_grid_point(&nl, &Pin::centered(a)), Err(Error::NotGridIntegral { .. })));
    }
}
