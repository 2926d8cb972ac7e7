// SPDX-License-Identifier: Apache-2.0

//! Rewrites a netlist around a fixed placement so that the placement becomes
//! wirelength-optimal for the new netlist.
//!
//! Local nets are kept. Nets with an equivalent edge are strung into
//! monotone chains between fixed terminals; the gaps along each chain are
//! spanned by replacement nets that take over the names and degrees of nets
//! that cannot join a chain. Module set, sizes, placement, net count, and
//! the degree histogram are unchanged.

pub mod chains;
pub mod cover;
pub mod layout;
pub mod seed;

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::bookshelf::BenchmarkBundle;
use crate::certificate::{CertificateHeader, NetRecord, OptimalityCertificate};
use crate::chain::{validate_chain, MonotoneChain};
use crate::geom::GridPoint;
use crate::netlist::{Net, NetId, Netlist, PinDirection};
use crate::rng::seeded;
use crate::wirelength::{grid_hpwl, is_local_points, min_hpwl};
use crate::{Error, Result};

pub use chains::{categorize_points, generate_chains, prune_chains, ChainDraft, ChainSearch, InterveningRegion, Link, NetCategory};
pub use cover::{cover_gaps, Cover, Segment};
pub use layout::Layout;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct McConfig {
    pub seed: u64,
    /// Chains each fixed terminal may anchor.
    pub max_chains_per_terminal: usize,
    /// Random tries per surplus net when splitting a gap.
    pub split_attempts: usize,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig { seed: 1, max_chains_per_terminal: 4, split_attempts: 32 }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct McStats {
    pub nets: usize,
    pub retained: usize,
    pub replaced: usize,
    pub local_in: usize,
    pub no_edge_in: usize,
    pub with_edge_in: usize,
    pub chains_found: usize,
    pub chains_kept: usize,
    pub gaps: usize,
    pub split_gaps: usize,
    pub local_replacements: usize,
    pub terminal_spans: usize,
    pub nonlocal_out: usize,
    /// `|new degree - seed degree|` per module, as (difference, modules).
    pub degree_difference: Vec<(usize, usize)>,
    /// Net HPWL over the layout half-perimeter in tenths, seed netlist.
    pub length_buckets_seed: Vec<usize>,
    /// The same for the rewritten netlist.
    pub length_buckets_out: Vec<usize>,
}

impl McStats {
    pub fn retained_fraction(&self) -> f64 {
        self.retained as f64 / self.nets.max(1) as f64
    }

    pub fn nonlocal_fraction(&self) -> f64 {
        self.nonlocal_out as f64 / self.nets.max(1) as f64
    }

    /// One `section,key,value` line per statistic.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("section,key,value\n");
        let mut row = |sec: &str, k: &dyn std::fmt::Display, v: &dyn std::fmt::Display| {
            let _ = writeln!(s, "{sec},{k},{v}");
        };
        row("summary", &"nets", &self.nets);
        row("summary", &"retained", &self.retained);
        row("summary", &"replaced", &self.replaced);
        row("summary", &"retained_fraction", &format!("{:.6}", self.retained_fraction()));
        row("summary", &"nonlocal_fraction", &format!("{:.6}", self.nonlocal_fraction()));
        row("summary", &"local_in", &self.local_in);
        row("summary", &"no_edge_in", &self.no_edge_in);
        row("summary", &"with_edge_in", &self.with_edge_in);
        row("summary", &"chains_found", &self.chains_found);
        row("summary", &"chains_kept", &self.chains_kept);
        row("summary", &"gaps", &self.gaps);
        row("summary", &"split_gaps", &self.split_gaps);
        row("summary", &"local_replacements", &self.local_replacements);
        row("summary", &"terminal_spans", &self.terminal_spans);
        for (d, n) in &self.degree_difference {
            row("degree_difference", d, n);
        }
        for (i, n) in self.length_buckets_seed.iter().enumerate() {
            row("length_seed", &format!("{:.1}", (i + 1) as f64 / 10.0), n);
        }
        for (i, n) in self.length_buckets_out.iter().enumerate() {
            row("length_out", &format!("{:.1}", (i + 1) as f64 / 10.0), n);
        }
        s
    }
}

#[derive(Debug, Clone)]
pub struct McOutput {
    pub bundle: BenchmarkBundle,
    pub certificate: OptimalityCertificate,
    pub chains: Vec<MonotoneChain>,
    pub stats: McStats,
}

pub fn categorize_nets(netlist: &Netlist, placement: &crate::netlist::Placement) -> Result<Vec<NetCategory>> {
    let mut pts = Vec::with_capacity(netlist.nets.len());
    for net in &netlist.nets {
        pts.push(placement.net_grid_points(netlist, net)?);
    }
    Ok(categorize_points(&pts))
}

fn length_buckets(points: &[Vec<GridPoint>], half_perimeter: i64) -> Vec<usize> {
    let mut b = vec![0usize; 10];
    for p in points {
        let f = grid_hpwl(p) as f64 / half_perimeter.max(1) as f64;
        b[((f * 10.0).ceil() as usize).clamp(1, 10) - 1] += 1;
    }
    b
}

/// Rewrites `seed`'s netlist so that its placement is optimal. Every pin of
/// the seed must sit at a grid-cell center of the placement frame.
pub fn generate_mc(seed: &BenchmarkBundle, config: &McConfig) -> Result<McOutput> {
    let mut rng = seeded(config.seed);
    let nl = &seed.netlist;
    let layout = Layout::new(nl, &seed.placement)?;
    let cats = categorize_points(&layout.points);
    let terminals: Vec<GridPoint> = layout.terminals.iter().map(|t| t.1).collect();
    let mut stats = McStats { nets: nl.nets.len(), ..McStats::default() };
    for c in &cats {
        match c {
            NetCategory::Local => stats.local_in += 1,
            NetCategory::NoEquivalentEdge => stats.no_edge_in += 1,
            NetCategory::HasEquivalentEdge { .. } => stats.with_edge_in += 1,
        }
    }

    let search = generate_chains(&layout.points, &cats, &terminals, config.max_chains_per_terminal);
    stats.chains_found = search.chains.len();
    let mut available: Vec<NetId> = (0..nl.nets.len()).filter(|&n| cats[n] == NetCategory::NoEquivalentEdge).map(NetId).collect();
    available.extend(&search.unassigned);
    let (kept, freed) = prune_chains(search.chains, available.len())?;
    available.extend(freed);
    available.sort_unstable();
    stats.chains_kept = kept.len();

    let replaced: Vec<bool> = {
        let mut r = vec![false; nl.nets.len()];
        for n in &available {
            r[n.0] = true;
        }
        r
    };
    let mut excess: Vec<i64> = layout.original_degree.iter().map(|&d| -(d as i64)).collect();
    for (n, net) in nl.nets.iter().enumerate() {
        if !replaced[n] {
            let mut ms: Vec<usize> = net.pins.iter().map(|p| p.module.0).collect();
            ms.sort_unstable();
            ms.dedup();
            for m in ms {
                excess[m] += 1;
            }
        }
    }

    let gaps: Vec<InterveningRegion> =
        kept.iter().flat_map(|c| c.links.iter().filter_map(|l| if let Link::Gap(g) = l { Some(*g) } else { None })).collect();
    stats.gaps = gaps.len();
    let avail_deg: Vec<(NetId, usize)> = available.iter().map(|&n| (n, nl.nets[n.0].degree())).collect();
    let cover = cover_gaps(&layout, &gaps, &avail_deg, &terminals, &mut excess, config.split_attempts, &mut rng)?;
    stats.split_gaps = cover.splits;
    stats.local_replacements = cover.local.len();
    stats.terminal_spans = cover.terminal_spans.len();

    // New netlist: replaced nets keep their name and position in the list.
    let mut out = Netlist { modules: nl.modules.clone(), nets: Vec::with_capacity(nl.nets.len()), region: nl.region };
    let mut out_points = layout.points.clone();
    for (n, net) in nl.nets.iter().enumerate() {
        if !replaced[n] {
            out.nets.push(net.clone());
            continue;
        }
        let pts = cover.pins.get(&NetId(n)).ok_or_else(|| Error::Certification(format!("net `{}` was never rebuilt", net.name)))?;
        let pins = pts
            .iter()
            .enumerate()
            .map(|(k, p)| {
                let mut pin = layout.at[p];
                pin.direction = if k == 0 { PinDirection::Output } else { PinDirection::Input };
                pin
            })
            .collect();
        out.nets.push(Net { name: net.name.clone(), pins });
        out_points[n] = pts.clone();
    }

    // Final chains: gaps expanded into their covering segments.
    let mut final_chains = Vec::new();
    let mut gi = 0;
    for c in &kept {
        let mut nets = Vec::new();
        let mut path = vec![terminals[c.start]];
        for l in &c.links {
            match l {
                Link::Net { net, to, .. } => {
                    nets.push(*net);
                    path.push(*to);
                }
                Link::Gap(_) => {
                    for s in &cover.segments[gi] {
                        nets.push(s.net);
                        path.push(s.to);
                    }
                    gi += 1;
                }
            }
        }
        final_chains.push(MonotoneChain { nets, path });
    }
    for &(net, s, e) in &cover.terminal_spans {
        final_chains.push(MonotoneChain { nets: vec![net], path: vec![terminals[s], terminals[e]] });
    }

    let bundle = BenchmarkBundle {
        name: seed.name.clone(),
        netlist: out,
        placement: seed.placement.clone(),
        rows: seed.rows.clone(),
        sources: Vec::new(),
    };
    let mut chain_of: Vec<Option<usize>> = vec![None; nl.nets.len()];
    for (ci, ch) in final_chains.iter().enumerate() {
        let report = validate_chain(ch, &bundle.netlist, &bundle.placement)?;
        if !report.valid {
            return Err(Error::Certification(format!("chain {ci}: {}", report.problem.unwrap_or_default())));
        }
        for n in &ch.nets {
            if chain_of[n.0].replace(ci).is_some() {
                return Err(Error::Certification(format!("net `{}` sits in two chains", nl.nets[n.0].name)));
            }
        }
    }
    let mut records = Vec::with_capacity(nl.nets.len());
    for (n, pts) in out_points.iter().enumerate() {
        let attained = grid_hpwl(pts);
        let bound = match chain_of[n] {
            Some(_) => attained,
            None => {
                let mut d = pts.clone();
                d.sort_unstable();
                d.dedup();
                let b = min_hpwl(d.len())? as i64;
                if b != attained {
                    return Err(Error::Certification(format!("net `{}` is neither local nor in a chain", bundle.netlist.nets[n].name)));
                }
                b
            }
        };
        if !is_local_points(pts) {
            stats.nonlocal_out += 1;
        }
        records.push(NetRecord { net: bundle.netlist.nets[n].name.clone(), degree: pts.len(), attained, bound, chain: chain_of[n] });
    }
    stats.replaced = available.len();
    stats.retained = nl.nets.len() - available.len();

    let mut new_degree = vec![0usize; nl.modules.len()];
    for net in &bundle.netlist.nets {
        let mut ms: Vec<usize> = net.pins.iter().map(|p| p.module.0).collect();
        ms.sort_unstable();
        ms.dedup();
        for m in ms {
            new_degree[m] += 1;
        }
    }
    let mut diff: BTreeMap<usize, usize> = BTreeMap::new();
    for (m, &d) in new_degree.iter().enumerate() {
        *diff.entry(d.abs_diff(layout.original_degree[m])).or_default() += 1;
    }
    stats.degree_difference = diff.into_iter().collect();
    let hp = layout.bounds().half_perimeter();
    stats.length_buckets_seed = length_buckets(&layout.points, hp);
    stats.length_buckets_out = length_buckets(&out_points, hp);

    let mut header = CertificateHeader::new(seed.name.clone(), "monotone-rewrite", config.seed);
    let b = layout.bounds();
    header.grid_width = b.width();
    header.grid_height = b.height();
    header.grid_unit = seed.placement.frame.grid_unit;
    header.params.insert("max_chains_per_terminal".into(), config.max_chains_per_terminal.to_string());
    header.params.insert("split_attempts".into(), config.split_attempts.to_string());
    let certificate = OptimalityCertificate::new(header, records);
    Ok(McOutput { bundle, certificate, chains: final_chains, stats })
}
