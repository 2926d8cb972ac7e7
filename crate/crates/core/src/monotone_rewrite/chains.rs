// SPDX-License-Identifier: Apache-2.0

//! Net categories, chain search between terminal pairs, and chain pruning.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::chain::is_monotone;
use crate::geom::{GridPoint, Rect};
use crate::mixed_size::nonlocal::pair_terminals;
use crate::netlist::NetId;
use crate::wirelength::{equivalent_edges, is_local_points};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NetCategory {
    /// Already at the minimum HPWL for its pin count.
    Local,
    /// No pin pair spans the bounding box; cannot sit in a chain.
    NoEquivalentEdge,
    /// Chain candidate; flags give the usable diagonal slopes.
    HasEquivalentEdge { rising: bool, falling: bool },
}

pub fn categorize_points(points: &[Vec<GridPoint>]) -> Vec<NetCategory> {
    points
        .iter()
        .map(|pts| {
            if is_local_points(pts) {
                return NetCategory::Local;
            }
            let edges = equivalent_edges(pts);
            if edges.is_empty() {
                NetCategory::NoEquivalentEdge
            } else {
                NetCategory::HasEquivalentEdge { rising: edges.iter().any(|e| e.rising), falling: edges.iter().any(|e| e.falling) }
            }
        })
        .collect()
}

/// Box between two facing chain vertices that a new net must later span.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct InterveningRegion {
    pub rect: Rect,
    pub from: GridPoint,
    pub to: GridPoint,
    pub chain: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Link {
    Net { net: NetId, from: GridPoint, to: GridPoint },
    Gap(InterveningRegion),
}

impl Link {
    pub fn to(&self) -> GridPoint {
        match self {
            Link::Net { to, .. } => *to,
            Link::Gap(g) => g.to,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainDraft {
    /// Indices into the terminal list.
    pub start: usize,
    pub end: usize,
    pub links: Vec<Link>,
}

impl ChainDraft {
    pub fn nets(&self) -> impl Iterator<Item = NetId> + '_ {
        self.links.iter().filter_map(|l| match l {
            Link::Net { net, .. } => Some(*net),
            Link::Gap(_) => None,
        })
    }

    pub fn gap_count(&self) -> usize {
        self.links.iter().filter(|l| matches!(l, Link::Gap(_))).count()
    }

    pub fn net_count(&self) -> usize {
        self.links.len() - self.gap_count()
    }

    pub fn gap_ratio(&self) -> f64 {
        self.gap_count() as f64 / self.net_count().max(1) as f64
    }

    /// Path vertices: start terminal, then the end of every link.
    pub fn path(&self, terminals: &[GridPoint]) -> Vec<GridPoint> {
        let mut p = vec![terminals[self.start]];
        p.extend(self.links.iter().map(Link::to));
        p
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainSearch {
    pub chains: Vec<ChainDraft>,
    /// Chain candidates no terminal pair could carry.
    pub unassigned: Vec<NetId>,
}

struct EdgeIndex {
    by_point: HashMap<GridPoint, Vec<(usize, GridPoint)>>,
}

impl EdgeIndex {
    fn new(points: &[Vec<GridPoint>], cats: &[NetCategory]) -> Self {
        let mut by_point: HashMap<GridPoint, Vec<(usize, GridPoint)>> = HashMap::new();
        for (n, pts) in points.iter().enumerate() {
            if !matches!(cats[n], NetCategory::HasEquivalentEdge { .. }) {
                continue;
            }
            for e in equivalent_edges(pts) {
                let (a, b) = (pts[e.a], pts[e.b]);
                by_point.entry(a).or_default().push((n, b));
                by_point.entry(b).or_default().push((n, a));
            }
        }
        EdgeIndex { by_point }
    }

    /// Nearest unassigned net with an edge `p -> q` such that
    /// `head, p, q, end` is monotone.
    fn nearest(&self, head: GridPoint, end: GridPoint, taken: &[bool]) -> Option<(usize, GridPoint, GridPoint)> {
        let (sx, sy) = ((end.x - head.x).signum(), (end.y - head.y).signum());
        let (dx, dy) = ((end.x - head.x).abs(), (end.y - head.y).abs());
        for r in 0..=dx + dy {
            for ox in r.saturating_sub(dy).max(0)..=r.min(dx) {
                let p = GridPoint::new(head.x + sx * ox, head.y + sy * (r - ox));
                let Some(list) = self.by_point.get(&p) else { continue };
                for &(n, q) in list {
                    if !taken[n] && q != p && Rect::spanning(p, end).contains(q) {
                        return Some((n, p, q));
                    }
                }
            }
        }
        None
    }
}

fn push_gap(links: &mut Vec<Link>, chain: usize, from: GridPoint, to: GridPoint) {
    if from != to {
        links.push(Link::Gap(InterveningRegion { rect: Rect::spanning(from, to), from, to, chain }));
    }
}

/// Greedy chain search. Terminal pairs are formed by antipodal matching,
/// repeated with shifted partners so that each terminal anchors up to
/// `max_per_terminal` chains. From the chain head, the nearest unassigned
/// candidate net whose equivalent edge advances toward the end terminal is
/// appended, leaving a gap when it does not start at the head. Candidates
/// left over become single-net chains between the closest dominating
/// terminal pair, when one exists.
pub fn generate_chains(points: &[Vec<GridPoint>], cats: &[NetCategory], terminals: &[GridPoint], max_per_terminal: usize) -> ChainSearch {
    let index = EdgeIndex::new(points, cats);
    let mut taken = vec![false; points.len()];
    let mut anchored = vec![0usize; terminals.len()];
    let mut chains: Vec<ChainDraft> = Vec::new();
    let n = terminals.len();
    if n >= 2 {
        let base = pair_terminals(terminals);
        // Angular order recovered from the antipodal pairing.
        let mut order: Vec<usize> = base.iter().map(|p| p.0).collect();
        order.extend(base.iter().map(|p| p.1));
        if order.len() < n {
            let seen: std::collections::HashSet<usize> = order.iter().copied().collect();
            order.extend((0..n).filter(|i| !seen.contains(i)));
        }
        let half = n / 2;
        let mut used_pairs = std::collections::HashSet::new();
        for round in 0..max_per_terminal {
            for i in 0..n {
                let (a, b) = (order[i], order[(i + half + round) % n]);
                if a == b || terminals[a] == terminals[b] || !used_pairs.insert((a.min(b), a.max(b))) {
                    continue;
                }
                if anchored[a] >= max_per_terminal || anchored[b] >= max_per_terminal {
                    continue;
                }
                let id = chains.len();
                let end = terminals[b];
                let mut head = terminals[a];
                let mut links = Vec::new();
                while head != end {
                    let Some((net, p, q)) = index.nearest(head, end, &taken) else { break };
                    taken[net] = true;
                    push_gap(&mut links, id, head, p);
                    links.push(Link::Net { net: NetId(net), from: p, to: q });
                    head = q;
                }
                if links.is_empty() {
                    continue;
                }
                push_gap(&mut links, id, head, end);
                anchored[a] += 1;
                anchored[b] += 1;
                chains.push(ChainDraft { start: a, end: b, links });
            }
        }
    }

    let mut unassigned = Vec::new();
    for (net, pts) in points.iter().enumerate() {
        if taken[net] || !matches!(cats[net], NetCategory::HasEquivalentEdge { .. }) {
            continue;
        }
        let mut placed = false;
        for e in equivalent_edges(pts) {
            for (p, q) in [(pts[e.a], pts[e.b]), (pts[e.b], pts[e.a])] {
                if let Some((s, t)) = dominating_pair(terminals, &anchored, max_per_terminal, p, q) {
                    let id = chains.len();
                    let mut links = Vec::new();
                    push_gap(&mut links, id, terminals[s], p);
                    links.push(Link::Net { net: NetId(net), from: p, to: q });
                    push_gap(&mut links, id, q, terminals[t]);
                    anchored[s] += 1;
                    anchored[t] += 1;
                    chains.push(ChainDraft { start: s, end: t, links });
                    placed = true;
                    break;
                }
            }
            if placed {
                break;
            }
        }
        taken[net] = true;
        if !placed {
            unassigned.push(NetId(net));
        }
    }
    ChainSearch { chains, unassigned }
}

fn dominating_pair(terminals: &[GridPoint], anchored: &[usize], cap: usize, p: GridPoint, q: GridPoint) -> Option<(usize, usize)> {
    let free = |i: usize| anchored[i] < cap;
    let s = (0..terminals.len())
        .filter(|&i| free(i) && is_monotone(&[terminals[i], p, q]).unwrap_or(false))
        .min_by_key(|&i| (terminals[i].manhattan(p), i))?;
    let t = (0..terminals.len())
        .filter(|&i| i != s && free(i) && terminals[i] != terminals[s] && is_monotone(&[terminals[s], p, q, terminals[i]]).unwrap_or(false))
        .min_by_key(|&i| (terminals[i].manhattan(q), i))?;
    Some((s, t))
}

/// Drops chains with the most gaps per net until the gaps left can be
/// covered by the available nets. Returns the kept chains and the nets
/// freed from dropped chains.
pub fn prune_chains(mut chains: Vec<ChainDraft>, available: usize) -> Result<(Vec<ChainDraft>, Vec<NetId>)> {
    let mut gaps: usize = chains.iter().map(ChainDraft::gap_count).sum();
    let mut avail = available;
    let mut order: Vec<usize> = (0..chains.len()).collect();
    order.sort_by(|&a, &b| chains[b].gap_ratio().total_cmp(&chains[a].gap_ratio()).then(a.cmp(&b)));
    let mut drop = vec![false; chains.len()];
    let mut freed = Vec::new();
    for i in order {
        if gaps <= avail {
            break;
        }
        drop[i] = true;
        gaps -= chains[i].gap_count();
        avail += chains[i].net_count();
        freed.extend(chains[i].nets());
    }
    if gaps > avail {
        return Err(Error::Certification(format!("{gaps} gaps but only {avail} replaceable nets")));
    }
    let mut k = 0;
    chains.retain(|_| {
        k += 1;
        !drop[k - 1]
    });
    Ok((chains, freed))
}
