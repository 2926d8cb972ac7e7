// SPDX-License-Identifier: Apache-2.0

//! Optimal-global-placement stress benchmarks: movable modules of a
//! certified placement are pulled to the centers of the bins containing
//! them, stacked concentrically, with no legalization.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::bookshelf::{write_bundle, BenchmarkBundle};
use crate::certificate::OptimalityCertificate;
use crate::geom::BoxF;
use crate::netlist::{ModuleId, ModuleKind, Netlist, Placement};
use crate::par::{self, Execution};
use crate::{Error, Result};

/// Uniform bins tiling a region from its lower-left corner.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BinGrid {
    pub x0: f64,
    pub y0: f64,
    pub bin_w: f64,
    pub bin_h: f64,
    pub nx: usize,
    pub ny: usize,
}

impl BinGrid {
    pub fn covering(region: BoxF, bin_w: f64, bin_h: f64) -> Result<Self> {
        if !(bin_w > 0.0 && bin_h > 0.0) {
            return Err(Error::Config(format!("bin size {bin_w} x {bin_h} must be positive")));
        }
        let nx = ((region.width() / bin_w) - 1e-9).ceil().max(1.0) as usize;
        let ny = ((region.height() / bin_h) - 1e-9).ceil().max(1.0) as usize;
        Ok(BinGrid { x0: region.xlo, y0: region.ylo, bin_w, bin_h, nx, ny })
    }

    fn axis(c: f64, origin: f64, size: f64, n: usize) -> usize {
        // A point on a bin edge goes to the lower-index bin.
        let k = ((c - origin) / size).ceil() as i64 - 1;
        k.clamp(0, n as i64 - 1) as usize
    }

    /// Bin `(i, j)` containing point `(x, y)`.
    pub fn bin_of(&self, x: f64, y: f64) -> (usize, usize) {
        (Self::axis(x, self.x0, self.bin_w, self.nx), Self::axis(y, self.y0, self.bin_h, self.ny))
    }

    pub fn center(&self, i: usize, j: usize) -> (f64, f64) {
        (self.x0 + (i as f64 + 0.5) * self.bin_w, self.y0 + (j as f64 + 0.5) * self.bin_h)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SnapMode {
    /// Macros stay put; only standard cells are aggregated.
    FixMacros,
    /// Movable macros are snapped too.
    MoveAll,
}

/// Moves every eligible movable module so its center is the center of the
/// bin holding its current center. Fixed modules never move; a macro whose
/// center sits on an inner bin edge keeps that coordinate.
pub fn snap_to_bins(netlist: &Netlist, placement: &Placement, bins: &BinGrid, mode: SnapMode) -> Placement {
    snap_to_bins_with(netlist, placement, bins, mode, Execution::default())
}

pub fn snap_to_bins_with(netlist: &Netlist, placement: &Placement, bins: &BinGrid, mode: SnapMode, exec: Execution) -> Placement {
    let moved = par::map_range(exec, netlist.modules.len(), |i| {
        let m = &netlist.modules[i];
        let pos = placement.positions[i]?;
        let eligible = m.movable && (mode == SnapMode::MoveAll || m.kind != ModuleKind::Macro);
        if !eligible {
            return Some(pos);
        }
        let (x, y) = (pos.0 + m.width / 2.0, pos.1 + m.height / 2.0);
        let (i, j) = bins.bin_of(x, y);
        let (mut cx, mut cy) = bins.center(i, j);
        // A macro centered on a bin edge has no unique nearest center and
        // keeps that coordinate.
        if m.kind == ModuleKind::Macro {
            if on_inner_edge(x, bins.x0, bins.bin_w, bins.nx) {
                cx = x;
            }
            if on_inner_edge(y, bins.y0, bins.bin_h, bins.ny) {
                cy = y;
            }
        }
        Some((cx - m.width / 2.0, cy - m.height / 2.0))
    });
    Placement { positions: moved, orientations: placement.orientations.clone(), frame: placement.frame }
}

fn on_inner_edge(c: f64, origin: f64, size: f64, n: usize) -> bool {
    let f = (c - origin) / size;
    (f - f.round()).abs() < 1e-9 && f.round() > 0.0 && f.round() < n as f64
}

/// Largest per-axis move between two placements of the same modules.
pub fn max_displacement(a: &Placement, b: &Placement) -> (f64, f64) {
    a.positions.iter().zip(&b.positions).fold((0.0f64, 0.0f64), |acc, (p, q)| match (p, q) {
        (Some(p), Some(q)) => (acc.0.max((p.0 - q.0).abs()), acc.1.max((p.1 - q.1).abs())),
        _ => acc,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OgpEntry {
    pub name: String,
    /// Bin size in grid units.
    pub bin_w: f64,
    pub bin_h: f64,
    pub mode: SnapMode,
    pub files: Vec<PathBuf>,
    pub source_certificate: Option<PathBuf>,
    pub source_rho: f64,
    pub max_displacement: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OgpManifest {
    pub source: String,
    pub entries: Vec<OgpEntry>,
}

/// Writes one snapped bundle per bin size (given in grid units) under
/// `out_dir/<name>_ogp<w>x<h>/`, plus `ogp_manifest.json`.
pub fn ogp_sweep(
    bundle: &BenchmarkBundle,
    certificate: &OptimalityCertificate,
    certificate_path: Option<&Path>,
    sizes: &[(f64, f64)],
    mode: SnapMode,
    out_dir: impl AsRef<Path>,
) -> Result<OgpManifest> {
    let out_dir = out_dir.as_ref();
    let unit = bundle.placement.frame.grid_unit;
    let mut entries = Vec::new();
    for &(w, h) in sizes {
        let bins = BinGrid::covering(bundle.netlist.region, w * unit, h * unit)?;
        let placement = snap_to_bins(&bundle.netlist, &bundle.placement, &bins, mode);
        let name = format!("{}_ogp{w}x{h}", bundle.name);
        let snapped = BenchmarkBundle { name: name.clone(), placement, sources: Vec::new(), ..bundle.clone() };
        let dir = out_dir.join(&name);
        let files = write_bundle(&snapped, &dir)?;
        entries.push(OgpEntry {
            name,
            bin_w: w,
            bin_h: h,
            mode,
            files,
            source_certificate: certificate_path.map(Path::to_path_buf),
            source_rho: certificate.rho(),
            max_displacement: max_displacement(&bundle.placement, &snapped.placement),
        });
    }
    let manifest = OgpManifest { source: bundle.name.clone(), entries };
    let path = out_dir.join("ogp_manifest.json");
    std::fs::write(&path, serde_json::to_string_pretty(&manifest)?).map_err(|e| Error::io(&path, e))?;
    Ok(manifest)
}

/// Positions of `id` in both placements, for callers that report per-module moves.
pub fn module_shift(a: &Placement, b: &Placement, id: ModuleId) -> Option<(f64, f64)> {
    let (p, q) = (a.get(id)?, b.get(id)?);
    Some((q.0 - p.0, q.1 - p.1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netlist::{Frame, Module};

    fn layout(n: usize) -> (Netlist, Placement) {
        let mut nl = Netlist::new(BoxF::new(0.0, 0.0, n as f64, n as f64));
        let mut pl = Placement::new(0, Frame::default());
        for y in 0..n {
            for x in 0..n {
                let id = nl.add_module(Module::new(format!("c{x}_{y}"), ModuleKind::StandardCell, 1.0, 1.0, true));
                pl.positions.push(None);
                pl.orientations.push("N".into());
                pl.set(id, x as f64, y as f64);
            }
        }
        (nl, pl)
    }

    #[test]
    fn unit_bins_are_identity() {
        let (nl, pl) = layout(5);
        let bins = BinGrid::covering(nl.region, 1.0, 1.0).unwrap();
        assert_eq!(snap_to_bins(&nl, &pl, &bins, SnapMode::FixMacros), pl);
    }

    #[test]
    fn two_by_two_bins_make_four_stacks() {
        let (nl, pl) = layout(4);
        let bins = BinGrid::covering(nl.region, 2.0, 2.0).unwrap();
        let out = snap_to_bins(&nl, &pl, &bins, SnapMode::FixMacros);
        let mut stacks = std::collections::BTreeMap::new();
        for p in out.positions.iter().flatten() {
            *stacks.entry(((p.0 * 2.0) as i64, (p.1 * 2.0) as i64)).or_insert(0) += 1;
        }
        assert_eq!(stacks.len(), 4);
        assert!(stacks.values().all(|&c| c == 4));
        let (dx, dy) = max_displacement(&pl, &out);
        assert!(dx <= 1.0 && dy <= 1.0);
    }

    #[test]
    fn boundary_goes_to_lower_bin() {
        let b = BinGrid::covering(BoxF::new(0.0, 0.0, 8.0, 8.0), 2.0, 2.0).unwrap();
        assert_eq!(b.bin_of(2.0, 4.0), (0, 1));
        assert_eq!(b.bin_of(0.0, 0.0), (0, 0));
        assert_eq!(b.bin_of(8.0, 7.9), (3, 3));
    }

    #[test]
    fn macros_follow_mode() {
        let mut nl = Netlist::new(BoxF::new(0.0, 0.0, 10.0, 10.0));
        let m = nl.add_module(Module::new("m", ModuleKind::Macro, 3.0, 5.0, true));
        let f = nl.add_module(Module::new("f", ModuleKind::Macro, 2.0, 2.0, false));
        let mut pl = Placement::new(2, Frame::default());
        pl.set(m, 1.0, 1.0);
        pl.set(f, 6.0, 6.0);
        let bins = BinGrid::covering(nl.region, 2.0, 2.0).unwrap();
        let fixed = snap_to_bins(&nl, &pl, &bins, SnapMode::FixMacros);
        assert_eq!(fixed, pl);
        let all = snap_to_bins(&nl, &pl, &bins, SnapMode::MoveAll);
        // Center (2.5, 3.5) lies in bin (1, 1) whose center is (3, 3).
        assert_eq!(all.get(m), Some((1.5, 0.5)));
        assert_eq!(all.get(f), Some((6.0, 6.0)));
    }

    #[test]
    fn macro_on_bin_edge_keeps_that_axis() {
        let mut nl = Netlist::new(BoxF::new(0.0, 0.0, 10.0, 10.0));
        let m = nl.add_module(Module::new("m", ModuleKind::Macro, 1.0, 4.0, true));
        let mut pl = Placement::new(1, Frame::default());
        pl.set(m, 3.0, 3.0);
        let unit = BinGrid::covering(nl.region, 1.0, 1.0).unwrap();
        assert_eq!(snap_to_bins(&nl, &pl, &unit, SnapMode::MoveAll), pl);
        // Center (3.5, 5.0): x snaps to bin center 3.0, y sits on an edge.
        let two = BinGrid::covering(nl.region, 2.0, 2.0).unwrap();
        assert_eq!(snap_to_bins(&nl, &pl, &two, SnapMode::MoveAll).get(m), Some((2.5, 3.0)));
    }
}
