// SPDX-License-Identifier: Apache-2.0

//! Synthetic seed benchmarks: unit cells scattered over a grid with white
//! space, spatially clustered nets, and pads around the outline.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bookshelf::{uniform_rows, BenchmarkBundle};
use crate::geom::{BoxF, GridPoint};
use crate::mixed_size::nonlocal::perimeter_pads;
use crate::netlist::{DegreeHistogram, Frame, Module, ModuleId, ModuleKind, Net, Netlist, Pin, PinDirection, Placement};
use crate::rng::seeded;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedSpec {
    pub name: String,
    pub cells: usize,
    pub white_fraction: f64,
    pub pads: usize,
    pub histogram: DegreeHistogram,
    /// Half-width of the window net pins are drawn from, in cells.
    pub cluster_radius: i64,
    pub seed: u64,
}

impl SeedSpec {
    /// A standard-cell-like degree mix with about 1.05 nets per cell.
    pub fn typical(name: impl Into<String>, cells: usize, seed: u64) -> Self {
        let nets = (cells as f64 * 1.05) as u64;
        let shares: [(usize, f64); 12] =
            [(2, 0.58), (3, 0.18), (4, 0.08), (5, 0.05), (6, 0.03), (7, 0.02), (8, 0.02), (9, 0.01), (10, 0.01), (12, 0.01), (16, 0.007), (24, 0.003)];
        let histogram = DegreeHistogram::from_pairs(shares.iter().map(|&(k, f)| (k, ((nets as f64 * f).round() as u64).max(1))));
        SeedSpec {
            name: name.into(),
            cells,
            white_fraction: 0.2,
            pads: ((cells as f64).sqrt() as usize).max(4),
            histogram,
            cluster_radius: 3,
            seed,
        }
    }
}

/// Builds a seed bundle whose pins all sit at grid-cell centers.
pub fn clustered_seed(spec: &SeedSpec) -> BenchmarkBundle {
    let mut rng = seeded(spec.seed);
    let sites = (spec.cells as f64 / (1.0 - spec.white_fraction).max(0.05)).ceil() as usize;
    let w = ((sites as f64).sqrt().ceil() as usize).max(2);
    let h = sites.div_ceil(w).max(2);
    let mut all: Vec<usize> = (0..w * h).collect();
    all.shuffle(&mut rng);
    let mut chosen: Vec<usize> = all[..spec.cells.min(w * h)].to_vec();
    chosen.sort_unstable();

    let region = BoxF::new(0.0, 0.0, w as f64, h as f64);
    let mut nl = Netlist::new(region);
    let mut at: HashMap<GridPoint, ModuleId> = HashMap::new();
    let mut cell_points = Vec::with_capacity(chosen.len());
    for (i, &s) in chosen.iter().enumerate() {
        let id = nl.add_module(Module::new(format!("o{i}"), ModuleKind::StandardCell, 1.0, 1.0, true));
        let p = GridPoint::new((s % w) as i64, (s / w) as i64);
        at.insert(p, id);
        cell_points.push(p);
    }
    let pads = perimeter_pads(w as i64, h as i64, spec.pads);
    let mut pad_ids = Vec::new();
    for (i, &p) in pads.iter().enumerate() {
        let id = nl.add_module(Module::new(format!("p{i}"), ModuleKind::Terminal, 1.0, 1.0, false));
        pad_ids.push((id, p));
    }

    let total_nets = spec.histogram.total_nets().max(1) as f64;
    let pad_rate = (3.0 * pad_ids.len() as f64 / total_nets).min(1.0);
    let mut degrees: Vec<usize> = spec.histogram.iter().flat_map(|(k, n)| std::iter::repeat_n(k, n as usize)).collect();
    degrees.shuffle(&mut rng);
    for (ni, &k) in degrees.iter().enumerate() {
        let (anchor_module, center) = if !pad_ids.is_empty() && rng.random_bool(pad_rate) {
            let (id, p) = pad_ids[rng.random_range(0..pad_ids.len())];
            (Some(id), GridPoint::new(p.x.clamp(0, w as i64 - 1), p.y.clamp(0, h as i64 - 1)))
        } else {
            (None, cell_points[rng.random_range(0..cell_points.len())])
        };
        let need = k - usize::from(anchor_module.is_some());
        let mut r = spec.cluster_radius.max(1);
        let mut pool: Vec<ModuleId> = loop {
            let mut v = Vec::new();
            for y in center.y - r..=center.y + r {
                for x in center.x - r..=center.x + r {
                    if let Some(&m) = at.get(&GridPoint::new(x, y)) {
                        v.push(m);
                    }
                }
            }
            if v.len() >= need || r > (w + h) as i64 {
                break v;
            }
            r += 1;
        };
        pool.shuffle(&mut rng);
        let mut members: Vec<ModuleId> = anchor_module.into_iter().collect();
        members.extend(pool.into_iter().take(need));
        let pins = members
            .iter()
            .enumerate()
            .map(|(j, &m)| Pin { direction: if j == 0 { PinDirection::Output } else { PinDirection::Input }, ..Pin::centered(m) })
            .collect();
        nl.add_net(Net { name: format!("n{ni}"), pins });
    }

    let mut placement = Placement::new(nl.modules.len(), Frame::default());
    for (i, p) in cell_points.iter().enumerate() {
        placement.set(ModuleId(i), p.x as f64, p.y as f64);
    }
    for &(id, p) in &pad_ids {
        placement.set(id, p.x as f64, p.y as f64);
    }
    BenchmarkBundle { name: spec.name.clone(), netlist: nl, placement, rows: uniform_rows(region, 1.0, 1.0), sources: Vec::new() }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_matches_histogram_and_is_grid_integral() {
        let spec = SeedSpec::typical("s", 500, 3);
        let b = clustered_seed(&spec);
        assert_eq!(DegreeHistogram::of_netlist(&b.netlist), spec.histogram);
        for net in &b.netlist.nets {
            b.placement.net_grid_points(&b.netlist, net).unwrap();
        }
        assert_eq!(b.netlist.modules.iter().filter(|m| m.kind == ModuleKind::StandardCell).count(), 500);
    }
}
