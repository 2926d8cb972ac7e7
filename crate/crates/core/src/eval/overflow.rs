// SPDX-License-Identifier: Apache-2.0

//! Per-bin scaled area overflow against a utilization target.

use serde::{Deserialize, Serialize};

use crate::geom::BoxF;
use crate::netlist::{ModuleId, Netlist, Placement};
use crate::par::{self, Execution};
use crate::Result;

/// Uniform bins tiling the placement region, plus the utilization target.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UtilizationGrid {
    pub region: BoxF,
    pub bin_w: f64,
    pub bin_h: f64,
    pub nx: usize,
    pub ny: usize,
    pub target: f64,
}

impl UtilizationGrid {
    /// Bins start at the region's lower-left corner; the last row and column
    /// are clipped to the region.
    pub fn covering(region: BoxF, bin_w: f64, bin_h: f64, target: f64) -> Self {
        assert!(bin_w > 0.0 && bin_h > 0.0, "bin size must be positive");
        let nx = ((region.width() / bin_w) - 1e-9).ceil().max(1.0) as usize;
        let ny = ((region.height() / bin_h) - 1e-9).ceil().max(1.0) as usize;
        UtilizationGrid { region, bin_w, bin_h, nx, ny, target }
    }

    /// Square bins `rows` row heights on a side.
    pub fn with_rows(region: BoxF, row_height: f64, rows: f64, target: f64) -> Self {
        Self::covering(region, rows * row_height, rows * row_height, target)
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn bin_box(&self, i: usize, j: usize) -> BoxF {
        let x = self.region.xlo + i as f64 * self.bin_w;
        let y = self.region.ylo + j as f64 * self.bin_h;
        BoxF::new(x, y, (x + self.bin_w).min(self.region.xhi), (y + self.bin_h).min(self.region.yhi))
    }

    fn span(lo: f64, hi: f64, origin: f64, size: f64, n: usize) -> Option<(usize, usize)> {
        let a = ((lo - origin) / size).floor() as i64;
        let b = ((hi - origin) / size).ceil() as i64 - 1;
        let (a, b) = (a.max(0), b.min(n as i64 - 1));
        (a <= b).then_some((a as usize, b as usize))
    }

    /// Bins touched by `b`, as inclusive index ranges.
    fn touched(&self, b: &BoxF) -> Option<((usize, usize), (usize, usize))> {
        let xs = Self::span(b.xlo, b.xhi, self.region.xlo, self.bin_w, self.nx)?;
        let ys = Self::span(b.ylo, b.yhi, self.region.ylo, self.bin_h, self.ny)?;
        Some((xs, ys))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverflowReport {
    pub nx: usize,
    pub ny: usize,
    /// Row-major from the lower-left bin; `None` marks a bin with no free area.
    pub sigma: Vec<Option<f64>>,
    pub movable_area: Vec<f64>,
    pub free_area: Vec<f64>,
    /// Mean σ over bins with free area.
    pub sov_per_bin: f64,
    pub excluded_bins: usize,
}

/// σ of each bin: movable area inside it over target × free area, where free
/// area is the bin (clipped to the region) minus fixed-object coverage.
pub fn bin_overflow(netlist: &Netlist, placement: &Placement, grid: &UtilizationGrid) -> Result<OverflowReport> {
    bin_overflow_with(netlist, placement, grid, Execution::default())
}

pub fn bin_overflow_with(netlist: &Netlist, placement: &Placement, grid: &UtilizationGrid, exec: Execution) -> Result<OverflowReport> {
    let contributions = par::map_range(exec, netlist.modules.len(), |i| {
        let mut out = Vec::new();
        let Some(b) = placement.module_box(netlist, ModuleId(i)) else {
            return out;
        };
        let Some(((i0, i1), (j0, j1))) = grid.touched(&b) else {
            return out;
        };
        for j in j0..=j1 {
            for i in i0..=i1 {
                let a = grid.bin_box(i, j).overlap_area(&b);
                if a > 0.0 {
                    out.push((j * grid.nx + i, a));
                }
            }
        }
        out
    });
    let n = grid.len();
    let mut movable = vec![0.0; n];
    let mut fixed = vec![0.0; n];
    for (m, bins) in netlist.modules.iter().zip(contributions) {
        let acc = if m.movable { &mut movable } else { &mut fixed };
        for (k, a) in bins {
            acc[k] += a;
        }
    }
    let mut free = vec![0.0; n];
    let mut sigma = vec![None; n];
    let (mut sum, mut counted) = (0.0, 0usize);
    for k in 0..n {
        let area = grid.bin_box(k % grid.nx, k / grid.nx).area();
        free[k] = (area - fixed[k]).max(0.0);
        if free[k] > 1e-9 * area && grid.target > 0.0 {
            let s = movable[k] / (grid.target * free[k]);
            sigma[k] = Some(s);
            sum += s;
            counted += 1;
        }
    }
    let sov_per_bin = if counted == 0 { 0.0 } else { sum / counted as f64 };
    Ok(OverflowReport { nx: grid.nx, ny: grid.ny, sigma, movable_area: movable, free_area: free, sov_per_bin, excluded_bins: n - counted })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netlist::{Frame, Module, ModuleKind};

    fn one_bin(target: f64) -> UtilizationGrid {
        UtilizationGrid::covering(BoxF::new(0.0, 0.0, 10.0, 10.0), 10.0, 10.0, target)
    }

    #[test]
    fn direct_substitution() {
        // Free area 100, target 0.8, movable overlap 40.
        let mut nl = Netlist::new(BoxF::new(0.0, 0.0, 10.0, 10.0));
        let a = nl.add_module(Module::new("a", ModuleKind::StandardCell, 4.0, 10.0, true));
        let mut pl = Placement::new(1, Frame::default());
        pl.set(a, 0.0, 0.0);
        let r = bin_overflow(&nl, &pl, &one_bin(0.8)).unwrap();
        assert!((r.sigma[0].unwrap() - 0.5).abs() < 1e-12);
        assert!((r.sov_per_bin - 0.5).abs() < 1e-12);
    }

    #[test]
    fn empty_bin_is_zero() {
        let nl = Netlist::new(BoxF::new(0.0, 0.0, 10.0, 10.0));
        let r = bin_overflow(&nl, &Placement::new(0, Frame::default()), &one_bin(0.8)).unwrap();
        assert_eq!(r.sigma, vec![Some(0.0)]);
    }

    #[test]
    fn half_inside_counts_half() {
        let mut nl = Netlist::new(BoxF::new(0.0, 0.0, 20.0, 10.0));
        let a = nl.add_module(Module::new("a", ModuleKind::StandardCell, 2.0, 2.0, true));
        let mut pl = Placement::new(1, Frame::default());
        pl.set(a, 9.0, 3.0);
        let g = UtilizationGrid::covering(nl.region, 10.0, 10.0, 1.0);
        let r = bin_overflow(&nl, &pl, &g).unwrap();
        assert_eq!(r.movable_area, vec![2.0, 2.0]);
    }

    #[test]
    fn fixed_cover_excludes_bin() {
        let mut nl = Netlist::new(BoxF::new(0.0, 0.0, 20.0, 10.0));
        let f = nl.add_module(Module::new("f", ModuleKind::Macro, 10.0, 10.0, false));
        let a = nl.add_module(Module::new("a", ModuleKind::StandardCell, 5.0, 10.0, true));
        let mut pl = Placement::new(2, Frame::default());
        pl.set(f, 0.0, 0.0);
        pl.set(a, 10.0, 0.0);
        let g = UtilizationGrid::covering(nl.region, 10.0, 10.0, 1.0);
        let r = bin_overflow(&nl, &pl, &g).unwrap();
        assert_eq!(r.sigma, vec![None, Some(0.5)]);
        assert_eq!(r.excluded_bins, 1);
        assert!((r.sov_per_bin - 0.5).abs() < 1e-12);
    }

    #[test]
    fn partial_last_bin_is_clipped() {
        let g = UtilizationGrid::covering(BoxF::new(0.0, 0.0, 25.0, 10.0), 10.0, 10.0, 1.0);
        assert_eq!((g.nx, g.ny), (3, 1));
        assert_eq!(g.bin_box(2, 0).area(), 50.0);
    }
}
