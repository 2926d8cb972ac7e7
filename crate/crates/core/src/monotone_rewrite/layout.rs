// SPDX-License-Identifier: Apache-2.0

//! Grid view of a fixed placement: pin locations per net, which module pin
//! can be placed at each grid point, and point counts per rectangle.

use std::collections::HashMap;

use crate::geom::{GridPoint, Rect};
use crate::netlist::{ModuleId, Netlist, Pin, Placement};
use crate::Result;

pub struct Layout {
    /// Pin grid points per net.
    pub points: Vec<Vec<GridPoint>>,
    /// Pin template usable at each occupied grid point.
    pub at: HashMap<GridPoint, Pin>,
    /// Fixed modules with a grid-integral center.
    pub terminals: Vec<(ModuleId, GridPoint)>,
    /// Nets containing each module in the seed netlist.
    pub original_degree: Vec<usize>,
    bounds: Rect,
    sums: Vec<u32>,
}

impl Layout {
    pub fn new(netlist: &Netlist, placement: &Placement) -> Result<Self> {
        let mut points = Vec::with_capacity(netlist.nets.len());
        for net in &netlist.nets {
            points.push(placement.net_grid_points(netlist, net)?);
        }
        let mut at: HashMap<GridPoint, Pin> = HashMap::new();
        let mut terminals = Vec::new();
        for (i, m) in netlist.modules.iter().enumerate() {
            let pin = Pin::centered(ModuleId(i));
            if let Ok(p) = placement.pin_grid_point(netlist, &pin) {
                at.entry(p).or_insert(pin);
                if !m.movable {
                    terminals.push((ModuleId(i), p));
                }
            }
        }
        for (net, pts) in netlist.nets.iter().zip(&points) {
            for (pin, &p) in net.pins.iter().zip(pts) {
                at.entry(p).or_insert(Pin { direction: crate::netlist::PinDirection::Bidirectional, ..*pin });
            }
        }
        let mut original_degree = vec![0; netlist.modules.len()];
        for net in &netlist.nets {
            let mut ms: Vec<usize> = net.pins.iter().map(|p| p.module.0).collect();
            ms.sort_unstable();
            ms.dedup();
            for m in ms {
                original_degree[m] += 1;
            }
        }
        let bounds = Rect::bounding(at.keys().copied()).unwrap_or(Rect::new(GridPoint::new(0, 0), GridPoint::new(0, 0)));
        let (w, h) = (bounds.width() as usize + 1, bounds.height() as usize + 1);
        let mut grid = vec![0u32; (w + 1) * (h + 1)];
        for p in at.keys() {
            let (x, y) = ((p.x - bounds.lo.x) as usize, (p.y - bounds.lo.y) as usize);
            grid[(y + 1) * (w + 1) + x + 1] = 1;
        }
        for y in 1..=h {
            for x in 1..=w {
                let i = y * (w + 1) + x;
                grid[i] += grid[i - 1] + grid[i - (w + 1)] - grid[i - (w + 1) - 1];
            }
        }
        Ok(Layout { points, at, terminals, original_degree, bounds, sums: grid })
    }

    /// Occupied grid points inside `r`.
    pub fn count(&self, r: Rect) -> usize {
        let lo = GridPoint::new(r.lo.x.max(self.bounds.lo.x), r.lo.y.max(self.bounds.lo.y));
        let hi = GridPoint::new(r.hi.x.min(self.bounds.hi.x), r.hi.y.min(self.bounds.hi.y));
        if lo.x > hi.x || lo.y > hi.y {
            return 0;
        }
        let w = self.bounds.width() as usize + 2;
        let at = |x: i64, y: i64| self.sums[(y - self.bounds.lo.y) as usize * w + (x - self.bounds.lo.x) as usize] as i64;
        (at(hi.x + 1, hi.y + 1) - at(lo.x, hi.y + 1) - at(hi.x + 1, lo.y) + at(lo.x, lo.y)) as usize
    }

    /// Occupied grid points strictly usable as fillers between `a` and `b`:
    /// inside their box, excluding the two endpoints.
    pub fn interior_count(&self, a: GridPoint, b: GridPoint) -> usize {
        let r = Rect::spanning(a, b);
        let ends = [a, b].iter().filter(|p| self.at.contains_key(p)).count() - usize::from(a == b && self.at.contains_key(&a));
        self.count(r) - ends
    }

    pub fn interior_points(&self, a: GridPoint, b: GridPoint) -> Vec<GridPoint> {
        let r = Rect::spanning(a, b);
        if (r.area() as usize) > 4 * self.at.len() {
            let mut v: Vec<GridPoint> = self.at.keys().copied().filter(|p| r.contains(*p) && *p != a && *p != b).collect();
            v.sort_unstable();
            return v;
        }
        r.points().filter(|p| *p != a && *p != b && self.at.contains_key(p)).collect()
    }

    pub fn bounds(&self) -> Rect {
        self.bounds
    }
}
