// SPDX-License-Identifier: Apache-2.0

//! Replacement nets that fill the gaps of the kept chains.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::chains::InterveningRegion;
use super::layout::Layout;
use crate::geom::{GridPoint, Rect};
use crate::netlist::NetId;
use crate::wirelength::min_hpwl;
use crate::{Error, Result};

/// One replacement net spanning `from -> to`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    pub from: GridPoint,
    pub to: GridPoint,
    pub net: NetId,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cover {
    /// Per gap, the replacement nets spanning it in path order.
    pub segments: Vec<Vec<Segment>>,
    /// Pins of every replacement net.
    pub pins: BTreeMap<NetId, Vec<GridPoint>>,
    /// Replacement nets built as minimum-HPWL local nets.
    pub local: Vec<NetId>,
    /// Replacement nets spanning two terminals on their own: (net, start, end).
    pub terminal_spans: Vec<(NetId, usize, usize)>,
    /// Gaps split to absorb surplus nets.
    pub splits: usize,
}

/// Orders candidate filler points: modules that lost the most nets relative
/// to the seed netlist come first, ties broken at random.
fn by_priority<R: Rng>(layout: &Layout, excess: &[i64], mut pts: Vec<GridPoint>, rng: &mut R) -> Vec<GridPoint> {
    let mut keyed: Vec<(i64, u64, GridPoint)> = pts.drain(..).map(|p| (excess[layout.at[&p].module.0], rng.random(), p)).collect();
    keyed.sort_unstable();
    keyed.into_iter().map(|k| k.2).collect()
}

fn take_pins<R: Rng>(layout: &Layout, excess: &mut [i64], ends: &[GridPoint], pool: Vec<GridPoint>, degree: usize, rng: &mut R) -> Vec<GridPoint> {
    let mut pins = ends.to_vec();
    let fill = degree - ends.len();
    pins.extend(by_priority(layout, excess, pool, rng).into_iter().take(fill));
    for p in &pins {
        excess[layout.at[p].module.0] += 1;
    }
    pins
}

fn local_box<R: Rng>(layout: &Layout, anchors: &[GridPoint], degree: usize, rng: &mut R) -> Option<Rect> {
    let l = min_hpwl(degree).ok()? as i64;
    let shapes: Vec<(i64, i64)> = (1..=l + 1).map(|w| (w, l + 2 - w)).filter(|&(w, h)| (w * h) as usize >= degree).collect();
    for _ in 0..256 {
        let a = anchors[rng.random_range(0..anchors.len())];
        let (w, h) = shapes[rng.random_range(0..shapes.len())];
        let r = Rect::new(a, GridPoint::new(a.x + w - 1, a.y + h - 1));
        if layout.count(r) >= degree {
            return Some(r);
        }
    }
    None
}

/// Covers every gap with one replacement net drawn from `available`
/// (`(net, degree)` pairs), the widest gaps taking the largest nets that
/// fit. Surplus nets split a covered gap in two where the gap has room,
/// otherwise become minimum-HPWL local nets, otherwise span the widest
/// terminal pair alone. `excess[m]` tracks each module's net count minus its
/// seed count and steers filler choice.
pub fn cover_gaps<R: Rng>(
    layout: &Layout,
    gaps: &[InterveningRegion],
    available: &[(NetId, usize)],
    terminals: &[GridPoint],
    excess: &mut [i64],
    split_attempts: usize,
    rng: &mut R,
) -> Result<Cover> {
    if gaps.len() > available.len() {
        return Err(Error::Certification(format!("{} gaps but only {} replaceable nets", gaps.len(), available.len())));
    }
    let degree: BTreeMap<NetId, usize> = available.iter().copied().collect();
    let mut pool: BTreeMap<usize, Vec<NetId>> = BTreeMap::new();
    for &(n, d) in available {
        pool.entry(d).or_default().push(n);
    }
    let caps: Vec<usize> = gaps.iter().map(|g| layout.interior_count(g.from, g.to)).collect();
    let mut order: Vec<usize> = (0..gaps.len()).collect();
    order.sort_by_key(|&g| (std::cmp::Reverse(caps[g]), g));
    let mut cover = Cover { segments: vec![Vec::new(); gaps.len()], ..Cover::default() };
    for g in order {
        let fit = caps[g] + 2;
        let d = *pool.range(..=fit).next_back().map(|(d, _)| d).ok_or_else(|| {
            Error::Certification(format!("no replaceable net fits the gap at ({}, {})", gaps[g].from.x, gaps[g].from.y))
        })?;
        let list = pool.get_mut(&d).unwrap();
        let net = list.pop().unwrap();
        if list.is_empty() {
            pool.remove(&d);
        }
        cover.segments[g].push(Segment { from: gaps[g].from, to: gaps[g].to, net });
    }

    let mut surplus: Vec<(usize, NetId)> = pool.into_iter().flat_map(|(d, v)| v.into_iter().map(move |n| (d, n))).collect();
    surplus.reverse();
    let mut anchors: Vec<GridPoint> = layout.at.keys().copied().collect();
    anchors.sort_unstable();
    let span = widest_terminal_pair(layout, terminals);
    for (d, net) in surplus {
        if try_split(layout, &mut cover.segments, &degree, net, d, split_attempts, rng) {
            cover.splits += 1;
            continue;
        }
        if !anchors.is_empty() {
            if let Some(r) = local_box(layout, &anchors, d, rng) {
                let pts: Vec<GridPoint> = r.points().filter(|p| layout.at.contains_key(p)).collect();
                let pins = take_pins(layout, excess, &[], pts, d, rng);
                cover.pins.insert(net, pins);
                cover.local.push(net);
                continue;
            }
        }
        match span {
            Some((s, e, room)) if room + 2 >= d => {
                let (a, b) = (terminals[s], terminals[e]);
                let pins = take_pins(layout, excess, &[a, b], layout.interior_points(a, b), d, rng);
                cover.pins.insert(net, pins);
                cover.terminal_spans.push((net, s, e));
            }
            _ => return Err(Error::Certification(format!("replacement net of degree {d} has nowhere to go"))),
        }
    }

    for segs in &cover.segments {
        for s in segs {
            let pins = take_pins(layout, excess, &[s.from, s.to], layout.interior_points(s.from, s.to), degree[&s.net], rng);
            cover.pins.insert(s.net, pins);
        }
    }
    Ok(cover)
}

fn widest_terminal_pair(layout: &Layout, terminals: &[GridPoint]) -> Option<(usize, usize, usize)> {
    let mut best: Option<(usize, usize, usize)> = None;
    for i in 0..terminals.len() {
        for j in i + 1..terminals.len() {
            if terminals[i] == terminals[j] {
                continue;
            }
            let room = layout.interior_count(terminals[i], terminals[j]);
            if best.is_none_or(|b| room > b.2) {
                best = Some((i, j, room));
            }
        }
    }
    best
}

fn try_split<R: Rng>(
    layout: &Layout,
    segments: &mut [Vec<Segment>],
    degree: &BTreeMap<NetId, usize>,
    net: NetId,
    d: usize,
    attempts: usize,
    rng: &mut R,
) -> bool {
    let roomy: Vec<(usize, usize)> = segments
        .iter()
        .enumerate()
        .flat_map(|(g, segs)| segs.iter().enumerate().map(move |(k, _)| (g, k)))
        .filter(|&(g, k)| {
            let s = segments[g][k];
            layout.interior_count(s.from, s.to) + 2 >= d + degree[&s.net] - 1
        })
        .collect();
    if roomy.is_empty() {
        return false;
    }
    for _ in 0..attempts {
        let (g, k) = roomy[rng.random_range(0..roomy.len())];
        let s = segments[g][k];
        let inner = layout.interior_points(s.from, s.to);
        if inner.is_empty() {
            continue;
        }
        let m = inner[rng.random_range(0..inner.len())];
        let (c1, c2) = (layout.interior_count(s.from, m), layout.interior_count(m, s.to));
        let d1 = degree[&s.net];
        let (first, second) = if c1 + 2 >= d1 && c2 + 2 >= d {
            (s.net, net)
        } else if c1 + 2 >= d && c2 + 2 >= d1 {
            (net, s.net)
        } else {
            continue;
        };
        segments[g][k] = Segment { from: s.from, to: m, net: first };
        segments[g].insert(k + 1, Segment { from: m, to: s.to, net: second });
        return true;
    }
    false
}
