// SPDX-License-Identifier: Apache-2.0

//! One-call scoring of a placement and CSV report assembly.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::overflow::{bin_overflow_with, OverflowReport, UtilizationGrid};
use super::{displacement_report, locality_stats_with, lower_median, quality_ratio, shpwl, LocalityStats};
use crate::bookshelf::BenchmarkBundle;
use crate::certificate::OptimalityCertificate;
use crate::par::Execution;
use crate::wirelength::total_hpwl_with;
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UtilizationConfig {
    pub target: f64,
    /// Bin side in row heights.
    pub bin_rows: f64,
}

impl Default for UtilizationConfig {
    fn default() -> Self {
        UtilizationConfig { target: 1.0, bin_rows: 10.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisplacementSummary {
    pub mean: f64,
    pub max: f64,
    pub bias: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub name: String,
    pub hpwl: f64,
    pub bound: Option<f64>,
    pub hratio: Option<f64>,
    pub overflow: Option<OverflowReport>,
    pub sov_per_bin: Option<f64>,
    pub shpwl: f64,
    pub certified_shpwl: Option<f64>,
    pub sratio: Option<f64>,
    pub displacement: Option<DisplacementSummary>,
    /// Absent when locality cannot be decided (no certificate and off-grid pins).
    pub locality: Option<LocalityStats>,
}

impl EvalReport {
    /// Per-bin σ as CSV; empty bins print an empty σ.
    pub fn sigma_csv(&self) -> String {
        let mut s = String::from("i,j,free_area,movable_area,sigma\n");
        if let Some(o) = &self.overflow {
            for k in 0..o.sigma.len() {
                let sigma = o.sigma[k].map_or(String::new(), |v| v.to_string());
                writeln!(s, "{},{},{},{},{sigma}", k % o.nx, k / o.nx, o.free_area[k], o.movable_area[k]).unwrap();
            }
        }
        s
    }
}

/// Scores `bundle`'s placement. With a certificate, Hratio compares HPWL to
/// the certified bound and Sratio compares SHPWL to the bound scaled by the
/// certificate's own SOV/bin. With a reference, displacement is reported.
pub fn evaluate(
    bundle: &BenchmarkBundle,
    certificate: Option<&OptimalityCertificate>,
    utilization: Option<UtilizationConfig>,
    reference: Option<&BenchmarkBundle>,
    exec: Execution,
) -> Result<EvalReport> {
    let (nl, pl) = (&bundle.netlist, &bundle.placement);
    let hpwl = total_hpwl_with(nl, pl, exec)?;
    let bound = certificate.map(OptimalityCertificate::bound_length);
    let hratio = bound.map(|b| quality_ratio(hpwl, b)).transpose()?;
    let overflow = utilization
        .map(|u| {
            let grid = UtilizationGrid::with_rows(nl.region, pl.frame.row_height, u.bin_rows, u.target);
            bin_overflow_with(nl, pl, &grid, exec)
        })
        .transpose()?;
    let sov_per_bin = overflow.as_ref().map(|o| o.sov_per_bin);
    let scaled = shpwl(hpwl, sov_per_bin.unwrap_or(0.0));
    let certified_shpwl = certificate.map(|c| shpwl(c.bound_length(), c.header.sov_per_bin.unwrap_or(0.0)));
    let sratio = certified_shpwl.map(|c| quality_ratio(scaled, c)).transpose()?;
    let displacement = reference
        .map(|r| displacement_report(nl, pl, &r.netlist, &r.placement))
        .transpose()?
        .map(|d| DisplacementSummary { mean: d.mean, max: d.max, bias: d.bias });
    let locality = locality_stats_with(nl, pl, certificate, exec).ok();
    Ok(EvalReport {
        name: bundle.name.clone(),
        hpwl,
        bound,
        hratio,
        overflow,
        sov_per_bin,
        shpwl: scaled,
        certified_shpwl,
        sratio,
        displacement,
        locality,
    })
}

/// Flat numeric summary of a report, one CSV row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub name: String,
    pub hpwl: f64,
    pub hratio: Option<f64>,
    pub sov_per_bin: Option<f64>,
    pub shpwl: f64,
    pub sratio: Option<f64>,
}

impl From<&EvalReport> for ReportRow {
    fn from(r: &EvalReport) -> Self {
        ReportRow { name: r.name.clone(), hpwl: r.hpwl, hratio: r.hratio, sov_per_bin: r.sov_per_bin, shpwl: r.shpwl, sratio: r.sratio }
    }
}

fn median_of(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let v: Vec<f64> = values.flatten().collect();
    lower_median(&v)
}

/// Column-wise lower medians, named `median`.
pub fn median_report(rows: &[ReportRow]) -> ReportRow {
    ReportRow {
        name: "median".into(),
        hpwl: median_of(rows.iter().map(|r| Some(r.hpwl))).unwrap_or(0.0),
        hratio: median_of(rows.iter().map(|r| r.hratio)),
        sov_per_bin: median_of(rows.iter().map(|r| r.sov_per_bin)),
        shpwl: median_of(rows.iter().map(|r| Some(r.shpwl))).unwrap_or(0.0),
        sratio: median_of(rows.iter().map(|r| r.sratio)),
    }
}

pub const REPORT_HEADER: &str = "name,HPWL,Hratio,Hratio_2dp,SOV/bin,SOV/bin_2dp,SHPWL,Sratio,Sratio_2dp";

fn cell(v: Option<f64>) -> (String, String) {
    v.map_or((String::new(), String::new()), |v| (v.to_string(), format!("{v:.2}")))
}

/// Full-precision values plus two-decimal display columns.
pub fn reports_csv(rows: &[ReportRow], with_median: bool) -> String {
    let mut s = format!("{REPORT_HEADER}\n");
    let median = with_median.then(|| median_report(rows));
    for r in rows.iter().chain(median.as_ref()) {
        let (h, h2) = cell(r.hratio);
        let (o, o2) = cell(r.sov_per_bin);
        let (q, q2) = cell(r.sratio);
        writeln!(s, "{},{},{h},{h2},{o},{o2},{},{q},{q2}", r.name, r.hpwl, r.shpwl).unwrap();
    }
    s
}
