// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};

use crate::netlist::Netlist;

/// Disjoint-set forest with path halving and union by size.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
    sets: usize,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect(), size: vec![1; n], sets: n }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns true when two distinct sets were merged.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
        self.sets -= 1;
        true
    }

    pub fn same(&mut self, a: usize, b: usize) -> bool {
        self.find(a) == self.find(b)
    }

    pub fn set_count(&self) -> usize {
        self.sets
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConnectivityReport {
    pub connected: bool,
    pub component_count: usize,
}

/// Components of the module graph in which modules sharing a net are joined.
pub fn connectivity_check(netlist: &Netlist) -> ConnectivityReport {
    let mut uf = UnionFind::new(netlist.modules.len());
    for net in &netlist.nets {
        if let Some(first) = net.pins.first() {
            for pin in &net.pins[1..] {
                uf.union(first.module.0, pin.module.0);
            }
        }
    }
    let component_count = uf.set_count();
    ConnectivityReport { connected: component_count <= 1, component_count }
}
