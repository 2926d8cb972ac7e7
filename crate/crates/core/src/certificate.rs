// SPDX-License-Identifier: Apache-2.0

//! Optimality certificates and their on-disk sidecar
//! (`<name>.cert.json` header plus `<name>.cert.csv`, one row per net).

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetRecord {
    pub net: String,
    pub degree: usize,
    /// Attained HPWL in grid units.
    pub attained: i64,
    /// Lower bound: `min_hpwl(degree)` for local nets, the net's share of its
    /// chain's terminal distance otherwise.
    pub bound: i64,
    pub chain: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateHeader {
    pub name: String,
    pub generator: String,
    pub seed: u64,
    pub rho: f64,
    pub attained_total: i64,
    pub bound_total: i64,
    pub grid_width: i64,
    pub grid_height: i64,
    /// Physical length of one grid unit in the emitted placement.
    pub grid_unit: f64,
    pub chains: usize,
    pub local_nets: usize,
    pub nonlocal_nets: usize,
    /// Average scaled overflow per bin of the certified placement itself,
    /// when a utilization target was in force.
    pub sov_per_bin: Option<f64>,
    /// Histogram entries the generator could not realize, `(degree, count)`.
    pub unmet: Vec<(usize, u64)>,
    pub params: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimalityCertificate {
    pub header: CertificateHeader,
    pub nets: Vec<NetRecord>,
}

impl OptimalityCertificate {
    /// Builds a certificate, filling totals, counts, and ρ from the records.
    pub fn new(mut header: CertificateHeader, nets: Vec<NetRecord>) -> Self {
        header.attained_total = nets.iter().map(|r| r.attained).sum();
        header.bound_total = nets.iter().map(|r| r.bound).sum();
        header.local_nets = nets.iter().filter(|r| r.chain.is_none()).count();
        header.nonlocal_nets = nets.len() - header.local_nets;
        header.chains = nets.iter().filter_map(|r| r.chain).max().map_or(0, |c| c + 1);
        header.rho = ratio(header.attained_total, header.bound_total);
        OptimalityCertificate { header, nets }
    }

    pub fn rho(&self) -> f64 {
        self.header.rho
    }

    /// Certified lower bound in placement units.
    pub fn bound_length(&self) -> f64 {
        self.header.bound_total as f64 * self.header.grid_unit
    }

    pub fn attained_length(&self) -> f64 {
        self.header.attained_total as f64 * self.header.grid_unit
    }

    pub fn paths(dir: &Path, name: &str) -> (PathBuf, PathBuf) {
        (dir.join(format!("{name}.cert.json")), dir.join(format!("{name}.cert.csv")))
    }

    pub fn write(&self, dir: impl AsRef<Path>) -> Result<(PathBuf, PathBuf)> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let (json, csv) = Self::paths(dir, &self.header.name);
        let body = serde_json::to_string_pretty(&self.header)? + "\n";
        fs::write(&json, body).map_err(|e| Error::io(&json, e))?;
        let mut s = String::from("net,degree,attained,bound,chain\n");
        for r in &self.nets {
            let chain = r.chain.map_or_else(|| "local".to_string(), |c| c.to_string());
            writeln!(s, "{},{},{},{},{}", r.net, r.degree, r.attained, r.bound, chain).unwrap();
        }
        fs::write(&csv, s).map_err(|e| Error::io(&csv, e))?;
        Ok((json, csv))
    }

    /// Reads `<stem>.cert.json` and the matching `.cert.csv`.
    pub fn read(json: impl AsRef<Path>) -> Result<Self> {
        let json = json.as_ref();
        let text = fs::read_to_string(json).map_err(|e| Error::io(json, e))?;
        let header: CertificateHeader = serde_json::from_str(&text)?;
        let csv = json.with_file_name(format!("{}.cert.csv", header.name));
        let text = fs::read_to_string(&csv).map_err(|e| Error::io(&csv, e))?;
        let mut nets = Vec::new();
        for (i, line) in text.lines().enumerate().skip(1) {
            let bad = |msg: &str| Error::Parse { path: csv.clone(), line: i + 1, msg: msg.to_string() };
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 5 {
                return Err(bad("expected 5 fields"));
            }
            let int = |s: &str| s.parse::<i64>().map_err(|_| bad("bad integer"));
            nets.push(NetRecord {
                net: f[0].to_string(),
                degree: int(f[1])? as usize,
                attained: int(f[2])?,
                bound: int(f[3])?,
                chain: if f[4] == "local" { None } else { Some(int(f[4])? as usize) },
            });
        }
        Ok(OptimalityCertificate { header, nets })
    }
}

fn ratio(attained: i64, bound: i64) -> f64 {
    if bound == 0 {
        if attained == 0 {
            1.0
        } else {
            f64::INFINITY
        }
    } else {
        attained as f64 / bound as f64
    }
}

impl CertificateHeader {
    pub fn new(name: impl Into<String>, generator: impl Into<String>, seed: u64) -> Self {
        CertificateHeader {
            name: name.into(),
            generator: generator.into(),
            seed,
            rho: 1.0,
            attained_total: 0,
            bound_total: 0,
            grid_width: 0,
            grid_height: 0,
            grid_unit: 1.0,
            chains: 0,
            local_nets: 0,
            nonlocal_nets: 0,
            sov_per_bin: None,
            unmet: Vec::new(),
            params: BTreeMap::new(),
        }
    }
}
