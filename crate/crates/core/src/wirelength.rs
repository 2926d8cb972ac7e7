// SPDX-License-Identifier: Apache-2.0

//! HPWL arithmetic, the t-pin lower bound, and equivalent edges.

use serde::{Deserialize, Serialize};

use crate::geom::{GridPoint, Rect};
use crate::netlist::{Net, Netlist, Placement};
use crate::par::{self, Execution};
use crate::{Error, Result};

/// Half-perimeter of the pin bounding box of `net`, in placement units.
pub fn hpwl(netlist: &Netlist, placement: &Placement, net: &Net) -> Result<f64> {
    let (xlo, xhi, ylo, yhi) = pin_extent(netlist, placement, net)?;
    Ok((xhi - xlo) + (yhi - ylo))
}

fn pin_extent(netlist: &Netlist, placement: &Placement, net: &Net) -> Result<(f64, f64, f64, f64)> {
    let mut ext = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for pin in &net.pins {
        let (x, y) = placement.pin_location(netlist, pin)?;
        ext.0 = ext.0.min(x);
        ext.1 = ext.1.max(x);
        ext.2 = ext.2.min(y);
        ext.3 = ext.3.max(y);
    }
    if net.pins.is_empty() {
        return Ok((0.0, 0.0, 0.0, 0.0));
    }
    Ok(ext)
}

/// HPWL of grid points, in grid units.
pub fn grid_hpwl(points: &[GridPoint]) -> i64 {
    Rect::bounding(points.iter().copied()).map_or(0, |r| r.half_perimeter())
}

/// Sum of net HPWLs in net order.
pub fn total_hpwl(netlist: &Netlist, placement: &Placement) -> Result<f64> {
    total_hpwl_with(netlist, placement, Execution::default())
}

/// [`total_hpwl`] with an explicit execution mode. Per-net extents may be
/// computed in parallel; the reduction is always sequential in net order.
///
/// When every pin coordinate is a multiple of one half the sum is carried out
/// exactly in integers, otherwise with compensated summation.
pub fn total_hpwl_with(netlist: &Netlist, placement: &Placement, exec: Execution) -> Result<f64> {
    let extents = par::map(exec, &netlist.nets, |net| pin_extent(netlist, placement, net));
    let mut doubled: i128 = 0;
    let mut integral = true;
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for ext in extents {
        let (xlo, xhi, ylo, yhi) = ext?;
        if integral {
            match [xlo, xhi, ylo, yhi].map(half_units) {
                [Some(a), Some(b), Some(c), Some(d)] => doubled += (b - a + d - c) as i128,
                _ => integral = false,
            }
        }
        let v = (xhi - xlo) + (yhi - ylo);
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    if integral {
        Ok(doubled as f64 / 2.0)
    } else {
        Ok(sum + comp)
    }
}

fn half_units(v: f64) -> Option<i64> {
    let d = v * 2.0;
    (d.fract() == 0.0 && d.abs() < 9.0e15).then_some(d as i64)
}

/// Smallest `r` with `r * r >= t`.
fn ceil_sqrt(t: u64) -> u64 {
    let mut r = (t as f64).sqrt() as u64;
    while r * r < t {
        r += 1;
    }
    while r > 0 && (r - 1) * (r - 1) >= t {
        r -= 1;
    }
    r
}

/// Minimum HPWL of a `t`-pin net whose pins sit at distinct grid-cell
/// centers: `r + s - 2` with `r = ceil(sqrt(t))`, `s = ceil(t / r)`.
pub fn min_hpwl(t: usize) -> Result<u64> {
    if t == 0 {
        return Err(Error::ZeroDegree);
    }
    let t = t as u64;
    let r = ceil_sqrt(t);
    let s = t.div_ceil(r);
    Ok(r + s - 2)
}

/// Number of distinct enlargement multisets of length `n` over {n, s, e, w}.
pub fn p4_sequences(n: u64) -> u128 {
    let n = n as u128;
    (n * n * n + 6 * n * n + 11 * n + 6) / 6
}

/// A pin pair spanning the whole bounding box of its net.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquivalentEdge {
    /// Pin indices into the net.
    pub a: usize,
    pub b: usize,
    /// Usable by chains running lower-left to upper-right.
    pub rising: bool,
    /// Usable by chains running lower-right to upper-left.
    pub falling: bool,
}

/// Equivalent edges of a placed net given its pin grid points. The candidates
/// are the two diagonals of the bounding box; a degenerate (flat) box has a
/// single candidate serving both directions.
pub fn equivalent_edges(points: &[GridPoint]) -> Vec<EquivalentEdge> {
    let Some(bb) = Rect::bounding(points.iter().copied()) else {
        return Vec::new();
    };
    let find = |p: GridPoint, skip: Option<usize>| points.iter().enumerate().position(|(i, &q)| q == p && Some(i) != skip);
    let pair = |p: GridPoint, q: GridPoint| -> Option<(usize, usize)> {
        let a = find(p, None)?;
        let b = find(q, Some(a))?;
        Some((a, b))
    };
    let flat = bb.lo.x == bb.hi.x || bb.lo.y == bb.hi.y;
    let mut out = Vec::new();
    if flat {
        if let Some((a, b)) = pair(bb.lo, bb.hi) {
            out.push(EquivalentEdge { a, b, rising: true, falling: true });
        }
        return out;
    }
    if let Some((a, b)) = pair(bb.lo, bb.hi) {
        out.push(EquivalentEdge { a, b, rising: true, falling: false });
    }
    if let Some((a, b)) = pair(GridPoint::new(bb.hi.x, bb.lo.y), GridPoint::new(bb.lo.x, bb.hi.y)) {
        out.push(EquivalentEdge { a, b, rising: false, falling: true });
    }
    out
}

/// Equivalent edges of a net resolved through a grid-integral placement.
pub fn net_equivalent_edges(netlist: &Netlist, placement: &Placement, net: &Net) -> Result<Vec<EquivalentEdge>> {
    Ok(equivalent_edges(&placement.net_grid_points(netlist, net)?))
}

fn distinct_count(points: &[GridPoint]) -> usize {
    let mut v = points.to_vec();
    v.sort_unstable();
    v.dedup();
    v.len()
}

/// HPWL in excess of the lower bound for the net's distinct pin locations.
pub fn grid_slack(points: &[GridPoint]) -> i64 {
    if points.is_empty() {
        return 0;
    }
    let bound = min_hpwl(distinct_count(points)).expect("nonempty") as i64;
    grid_hpwl(points) - bound
}

/// A net is local when its grid HPWL attains the bound for its degree.
pub fn is_local_points(points: &[GridPoint]) -> bool {
    grid_slack(points) == 0
}

pub fn is_local_net(netlist: &Netlist, placement: &Placement, net: &Net) -> Result<bool> {
    Ok(is_local_points(&placement.net_grid_points(netlist, net)?))
}
