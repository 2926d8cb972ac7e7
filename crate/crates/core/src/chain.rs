// SPDX-License-Identifier: Apache-2.0

//! Monotone paths and monotone chains of nets.
//!
//! A chain whose equivalent path never backtracks in x or y has total HPWL
//! equal to the Manhattan distance between its two terminals. With both
//! terminals fixed, no placement can shorten it, which is what makes a chain
//! usable as an optimality certificate.

use serde::{Deserialize, Serialize};

use crate::geom::{GridPoint, Rect};
use crate::netlist::{NetId, Netlist, Placement};
use crate::wirelength::grid_hpwl;
use crate::{Error, Result};

/// Monotonicity by the per-step inequalities: every vertex lies in the
/// bounding box of its predecessor and the final vertex.
pub fn is_monotone(path: &[GridPoint]) -> Result<bool> {
    if path.len() < 2 {
        return Err(Error::ShortPath(path.len()));
    }
    let end = path[path.len() - 1];
    Ok(path.windows(2).all(|w| Rect::spanning(w[0], end).contains(w[1])))
}

/// Monotonicity by length: the path is as short as its endpoints allow.
pub fn is_monotone_by_length(path: &[GridPoint]) -> Result<bool> {
    if path.len() < 2 {
        return Err(Error::ShortPath(path.len()));
    }
    let walked: i64 = path.windows(2).map(|w| w[0].manhattan(w[1])).sum();
    Ok(walked == path[0].manhattan(path[path.len() - 1]))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonotoneChain {
    pub nets: Vec<NetId>,
    /// Vertices `v_0 ..= v_n`; net `i` spans `path[i]..path[i + 1]`.
    pub path: Vec<GridPoint>,
}

impl MonotoneChain {
    pub fn terminals(&self) -> Option<(GridPoint, GridPoint)> {
        Some((*self.path.first()?, *self.path.last()?))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainReport {
    pub valid: bool,
    /// Sum of member-net HPWLs in grid units.
    pub length: i64,
    pub terminal_hpwl: i64,
    pub problem: Option<String>,
}

pub fn validate_chain(chain: &MonotoneChain, netlist: &Netlist, placement: &Placement) -> Result<ChainReport> {
    let mut points = Vec::with_capacity(chain.nets.len());
    for &id in &chain.nets {
        let net = netlist.nets.get(id.0).ok_or_else(|| Error::MissingNet(format!("#{}", id.0)))?;
        points.push(placement.net_grid_points(netlist, net)?);
    }
    Ok(validate_chain_points(&chain.path, &points))
}

/// Core of [`validate_chain`] over already-resolved pin locations.
pub fn validate_chain_points(path: &[GridPoint], nets: &[Vec<GridPoint>]) -> ChainReport {
    let length: i64 = nets.iter().map(|p| grid_hpwl(p)).sum();
    let terminal_hpwl = match (path.first(), path.last()) {
        (Some(a), Some(b)) => a.manhattan(*b),
        _ => 0,
    };
    let fail = |msg: String| ChainReport { valid: false, length, terminal_hpwl, problem: Some(msg) };
    if nets.is_empty() || path.len() != nets.len() + 1 {
        return fail(format!("{} nets need {} path vertices, got {}", nets.len(), nets.len() + 1, path.len()));
    }
    for (i, pts) in nets.iter().enumerate() {
        let (a, b) = (path[i], path[i + 1]);
        if !pts.contains(&a) || !pts.contains(&b) {
            return fail(format!("net {i} lacks a pin at its path vertices"));
        }
        if Rect::bounding(pts.iter().copied()) != Some(Rect::spanning(a, b)) {
            return fail(format!("path edge {i} is not an equivalent edge of its net"));
        }
    }
    for i in 0..nets.len().saturating_sub(1) {
        let v = path[i + 1];
        if nets[i].iter().any(|p| *p != v && nets[i + 1].contains(p)) {
            return fail(format!("nets {i} and {} share more than vertex ({}, {})", i + 1, v.x, v.y));
        }
    }
    match is_monotone(path) {
        Ok(true) => {}
        _ => return fail("equivalent path is not monotone".to_string()),
    }
    if length != terminal_hpwl {
        return fail(format!("chain length {length} differs from terminal HPWL {terminal_hpwl}"));
    }
    ChainReport { valid: true, length, terminal_hpwl, problem: None }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(v: &[(i64, i64)]) -> Vec<GridPoint> {
        v.iter().map(|&p| p.into()).collect()
    }

    #[test]
    fn monotone_examples() {
        assert!(is_monotone(&pts(&[(0, 0), (1, 1), (2, 2)])).unwrap());
        assert!(!is_monotone(&pts(&[(0, 0), (3, 0), (1, 0)])).unwrap());
        assert!(!is_monotone(&pts(&[(0, 0), (2, 1), (1, 3)])).unwrap());
        assert!(matches!(is_monotone(&pts(&[(0, 0)])), Err(Error::ShortPath(1))));
        assert!(is_monotone_by_length(&pts(&[(0, 0), (1, 1), (2, 2)])).unwrap());
        assert!(!is_monotone_by_length(&pts(&[(0, 0), (2, 1), (1, 3)])).unwrap());
    }

    #[test]
    fn chain_examples() {
        let ok = validate_chain_points(&pts(&[(0, 0), (2, 1), (5, 3)]), &[pts(&[(0, 0), (2, 1)]), pts(&[(2, 1), (5, 3)])]);
        assert!(ok.valid, "{:?}", ok.problem);
        assert_eq!(ok.length, 8);
        assert_eq!(ok.terminal_hpwl, 8);

        let bad = validate_chain_points(&pts(&[(0, 0), (2, 1), (1, 3)]), &[pts(&[(0, 0), (2, 1)]), pts(&[(2, 1), (1, 3)])]);
        assert!(!bad.valid);

        let single = validate_chain_points(&pts(&[(0, 0), (3, 2)]), &[pts(&[(0, 0), (3, 2), (1, 1)])]);
        assert!(single.valid);
    }

    #[test]
    fn extra_shared_pin_is_rejected() {
        let r = validate_chain_points(
            &pts(&[(0, 0), (2, 0), (4, 0)]),
            &[pts(&[(0, 0), (1, 0), (2, 0)]), pts(&[(2, 0), (1, 0), (4, 0)])],
        );
        assert!(!r.valid);
    }
}
