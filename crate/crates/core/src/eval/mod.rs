// SPDX-License-Identifier: Apache-2.0

//! Placement scoring: quality ratios, bin overflow, scaled HPWL,
//! displacement and locality reports, and an exhaustive optimum for tiny
//! instances.

pub mod oracle;
pub mod overflow;
pub mod report;

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::certificate::OptimalityCertificate;
use crate::netlist::{Netlist, Placement};
use crate::par::{self, Execution};
use crate::wirelength::{hpwl, is_local_net};
use crate::{Error, Result};

pub use oracle::{brute_force_optimum, OracleLimits, OracleResult};
pub use overflow::{bin_overflow, OverflowReport, UtilizationGrid};
pub use report::{evaluate, median_report, reports_csv, EvalReport, UtilizationConfig};

/// `attained / bound`.
pub fn quality_ratio(attained: f64, bound: f64) -> Result<f64> {
    if bound > 0.0 {
        Ok(attained / bound)
    } else {
        Err(Error::ZeroBound(bound))
    }
}

/// HPWL scaled by `1 + 0.01 * sov_per_bin`.
pub fn shpwl(hpwl: f64, sov_per_bin: f64) -> f64 {
    hpwl * (1.0 + 0.01 * sov_per_bin)
}

pub fn sratio(attained_shpwl: f64, certified_shpwl: f64) -> Result<f64> {
    quality_ratio(attained_shpwl, certified_shpwl)
}

/// Lower median; `None` for an empty slice.
pub fn lower_median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    Some(v[(v.len() - 1) / 2])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Displacement {
    pub module: String,
    pub x: f64,
    pub y: f64,
    pub dx: f64,
    pub dy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisplacementReport {
    pub rows: Vec<Displacement>,
    /// Mean Euclidean move length.
    pub mean: f64,
    pub max: f64,
    /// Mean signed displacement.
    pub bias: (f64, f64),
}

impl DisplacementReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("module,x,y,dx,dy\n");
        for r in &self.rows {
            writeln!(s, "{},{},{},{},{}", r.module, r.x, r.y, r.dx, r.dy).unwrap();
        }
        s
    }
}

/// Moves of each module from `reference` to `placement`, matched by name.
/// `(x, y)` is the reference position. Unplaced modules are skipped.
pub fn displacement_report(netlist: &Netlist, placement: &Placement, ref_netlist: &Netlist, reference: &Placement) -> Result<DisplacementReport> {
    let left: BTreeSet<&str> = netlist.modules.iter().map(|m| m.name.as_str()).collect();
    let right: BTreeSet<&str> = ref_netlist.modules.iter().map(|m| m.name.as_str()).collect();
    if left != right {
        return Err(Error::ModuleMismatch {
            only_left: left.difference(&right).map(|s| s.to_string()).collect(),
            only_right: right.difference(&left).map(|s| s.to_string()).collect(),
        });
    }
    let index = ref_netlist.module_index();
    let mut rows = Vec::new();
    for (i, m) in netlist.modules.iter().enumerate() {
        let (Some(p), Some(q)) = (placement.positions[i], reference.get(index[m.name.as_str()])) else {
            continue;
        };
        rows.push(Displacement { module: m.name.clone(), x: q.0, y: q.1, dx: p.0 - q.0, dy: p.1 - q.1 });
    }
    let n = rows.len().max(1) as f64;
    let lens = rows.iter().map(|r| r.dx.hypot(r.dy));
    let mean = lens.clone().sum::<f64>() / n;
    let max = lens.fold(0.0, f64::max);
    let bias = (rows.iter().map(|r| r.dx).sum::<f64>() / n, rows.iter().map(|r| r.dy).sum::<f64>() / n);
    Ok(DisplacementReport { rows, mean, max, bias })
}

pub const LENGTH_BUCKETS: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalityStats {
    pub nets: usize,
    pub nonlocal_nets: usize,
    pub nonlocal_fraction: f64,
    pub total_hpwl: f64,
    pub nonlocal_hpwl: f64,
    pub nonlocal_hpwl_fraction: f64,
    /// Net counts by HPWL over the region half-perimeter, in tenths; the last
    /// bucket also takes lengths at or above the half-perimeter.
    pub length_buckets: Vec<usize>,
}

impl LocalityStats {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("key,value\n");
        writeln!(s, "nets,{}", self.nets).unwrap();
        writeln!(s, "nonlocal_nets,{}", self.nonlocal_nets).unwrap();
        writeln!(s, "nonlocal_fraction,{}", self.nonlocal_fraction).unwrap();
        writeln!(s, "total_hpwl,{}", self.total_hpwl).unwrap();
        writeln!(s, "nonlocal_hpwl,{}", self.nonlocal_hpwl).unwrap();
        writeln!(s, "nonlocal_hpwl_fraction,{}", self.nonlocal_hpwl_fraction).unwrap();
        for (i, c) in self.length_buckets.iter().enumerate() {
            writeln!(s, "length_{:.1}_{:.1},{c}", i as f64 / 10.0, (i + 1) as f64 / 10.0).unwrap();
        }
        s
    }
}

/// Nets in a certificate chain are nonlocal; without a certificate a net is
/// nonlocal when its grid pins are not at minimum HPWL.
pub fn locality_stats(netlist: &Netlist, placement: &Placement, certificate: Option<&OptimalityCertificate>) -> Result<LocalityStats> {
    locality_stats_with(netlist, placement, certificate, Execution::default())
}

pub fn locality_stats_with(
    netlist: &Netlist,
    placement: &Placement,
    certificate: Option<&OptimalityCertificate>,
    exec: Execution,
) -> Result<LocalityStats> {
    let chained: Option<BTreeSet<&str>> =
        certificate.map(|c| c.nets.iter().filter(|r| r.chain.is_some()).map(|r| r.net.as_str()).collect());
    let per_net = par::map(exec, &netlist.nets, |net| -> Result<(f64, bool)> {
        let len = hpwl(netlist, placement, net)?;
        let nonlocal = match &chained {
            Some(set) => set.contains(net.name.as_str()),
            None => !is_local_net(netlist, placement, net)?,
        };
        Ok((len, nonlocal))
    });
    let half = netlist.region.width() + netlist.region.height();
    let mut s = LocalityStats {
        nets: netlist.nets.len(),
        nonlocal_nets: 0,
        nonlocal_fraction: 0.0,
        total_hpwl: 0.0,
        nonlocal_hpwl: 0.0,
        nonlocal_hpwl_fraction: 0.0,
        length_buckets: vec![0; LENGTH_BUCKETS],
    };
    for r in per_net {
        let (len, nonlocal) = r?;
        s.total_hpwl += len;
        if nonlocal {
            s.nonlocal_nets += 1;
            s.nonlocal_hpwl += len;
        }
        let b = if half > 0.0 { ((len / half) * LENGTH_BUCKETS as f64) as usize } else { 0 };
        s.length_buckets[b.min(LENGTH_BUCKETS - 1)] += 1;
    }
    if s.nets > 0 {
        s.nonlocal_fraction = s.nonlocal_nets as f64 / s.nets as f64;
    }
    if s.total_hpwl > 0.0 {
        s.nonlocal_hpwl_fraction = s.nonlocal_hpwl / s.total_hpwl;
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::BoxF;
    use crate::netlist::{Frame, Module, ModuleKind};

    #[test]
    fn ratios() {
        assert!((quality_ratio(1.27 * 20_056_216.0, 20_056_216.0).unwrap() - 1.27).abs() < 1e-12);
        assert_eq!(quality_ratio(7.0, 7.0).unwrap(), 1.0);
        assert_eq!(quality_ratio(14.0, 7.0).unwrap(), 2.0);
        assert!(matches!(quality_ratio(1.0, 0.0), Err(Error::ZeroBound(_))));
    }

    #[test]
    fn scaled_hpwl() {
        assert_eq!(shpwl(100.0, 0.0), 100.0);
        assert_eq!(shpwl(100.0, 50.0), 150.0);
        let s = shpwl(81_893_792.0, 9.99);
        assert!((s / 9.01e7 - 1.0).abs() < 0.005);
    }

    #[test]
    fn median_is_lower() {
        assert_eq!(lower_median(&[4.0, 1.0, 3.0, 2.0]), Some(2.0));
        assert_eq!(lower_median(&[5.0, 1.0, 3.0]), Some(3.0));
        assert_eq!(lower_median(&[]), None);
    }

    fn cells(n: usize) -> (Netlist, Placement) {
        let mut nl = Netlist::new(BoxF::new(0.0, 0.0, 10.0, 10.0));
        let mut pl = Placement::new(n, Frame::default());
        for i in 0..n {
            let id = nl.add_module(Module::new(format!("c{i}"), ModuleKind::StandardCell, 1.0, 1.0, true));
            pl.set(id, i as f64, 0.0);
        }
        (nl, pl)
    }

    #[test]
    fn displacement_bias() {
        let (nl, pl) = cells(4);
        let same = displacement_report(&nl, &pl, &nl, &pl).unwrap();
        assert_eq!(same.bias, (0.0, 0.0));
        assert_eq!(same.max, 0.0);
        let mut shifted = pl.clone();
        for p in shifted.positions.iter_mut().flatten() {
            p.0 += 1.0;
        }
        let r = displacement_report(&nl, &shifted, &nl, &pl).unwrap();
        assert_eq!(r.bias, (1.0, 0.0));
        assert!(r.to_csv().starts_with("module,x,y,dx,dy\nc0,0,0,1,0\n"));
    }

    #[test]
    fn displacement_mismatch_lists_both_sides() {
        let (a, pa) = cells(2);
        let (mut b, mut pb) = cells(1);
        let id = b.add_module(Module::new("z", ModuleKind::StandardCell, 1.0, 1.0, true));
        pb.positions.push(None);
        pb.orientations.push("N".into());
        pb.set(id, 0.0, 0.0);
        match displacement_report(&a, &pa, &b, &pb) {
            Err(Error::ModuleMismatch { only_left, only_right }) => {
                assert_eq!(only_left, vec!["c1"]);
                assert_eq!(only_right, vec!["z"]);
            }
            other => panic!("expected mismatch, got {other:?}"),
        }
    }
}
