// SPDX-License-Identifier: Apache-2.0

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::plan::MacroSpec;
use crate::geom::{BoxF, GridPoint, Rect};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CellState {
    Unassigned,
    WhiteSpace,
    StandardCell,
    MacroInterior(u32),
    MacroBoundary(u32),
}

impl CellState {
    pub fn is_macro(self) -> bool {
        matches!(self, CellState::MacroInterior(_) | CellState::MacroBoundary(_))
    }

    pub fn macro_index(self) -> Option<usize> {
        match self {
            CellState::MacroInterior(m) | CellState::MacroBoundary(m) => Some(m as usize),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridMacro {
    pub name: String,
    pub rect: Rect,
    pub movable: bool,
    /// Index into the input macro list.
    pub source: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum DiscardReason {
    ZeroExtent,
    Overlap { with: String },
    OutsideRegion,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Discarded {
    pub name: String,
    pub reason: DiscardReason,
}

pub const DIRS: [(i64, i64); 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];

/// Uniform occupancy raster of the placement region.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub width: i64,
    pub height: i64,
    cells: Vec<CellState>,
    pin_used: Vec<bool>,
    pub macros: Vec<GridMacro>,
}

impl Grid {
    pub fn new(width: usize, height: usize) -> Self {
        let n = width * height;
        Grid {
            width: width as i64,
            height: height as i64,
            cells: vec![CellState::Unassigned; n],
            pin_used: vec![false; n],
            macros: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn bounds(&self) -> Rect {
        Rect::new(GridPoint::new(0, 0), GridPoint::new(self.width - 1, self.height - 1))
    }

    pub fn contains(&self, p: GridPoint) -> bool {
        p.x >= 0 && p.y >= 0 && p.x < self.width && p.y < self.height
    }

    #[inline]
    pub fn idx(&self, p: GridPoint) -> usize {
        (p.y * self.width + p.x) as usize
    }

    #[inline]
    pub fn point(&self, i: usize) -> GridPoint {
        GridPoint::new(i as i64 % self.width, i as i64 / self.width)
    }

    pub fn state(&self, p: GridPoint) -> CellState {
        self.cells[self.idx(p)]
    }

    pub fn state_at(&self, i: usize) -> CellState {
        self.cells[i]
    }

    pub fn set_state(&mut self, p: GridPoint, s: CellState) {
        let i = self.idx(p);
        self.cells[i] = s;
    }

    pub fn states(&self) -> &[CellState] {
        &self.cells
    }

    /// Part of the spatial graph in which white space must keep connectivity.
    pub fn is_solid(&self, p: GridPoint) -> bool {
        self.contains(p) && self.state(p) != CellState::WhiteSpace
    }

    /// Can still host a pin of a new net.
    pub fn is_available(&self, p: GridPoint) -> bool {
        if !self.contains(p) {
            return false;
        }
        let i = self.idx(p);
        match self.cells[i] {
            CellState::StandardCell => true,
            CellState::MacroBoundary(_) => !self.pin_used[i],
            _ => false,
        }
    }

    pub fn pin_used(&self, p: GridPoint) -> bool {
        self.pin_used[self.idx(p)]
    }

    pub fn use_pin(&mut self, p: GridPoint) {
        if let CellState::MacroBoundary(_) = self.state(p) {
            let i = self.idx(p);
            debug_assert!(!self.pin_used[i], "macro pin used twice at {p:?}");
            self.pin_used[i] = true;
        }
    }

    pub fn neighbors(&self, p: GridPoint) -> impl Iterator<Item = GridPoint> + '_ {
        DIRS.iter().map(move |&(dx, dy)| GridPoint::new(p.x + dx, p.y + dy)).filter(move |q| self.contains(*q))
    }

    /// Turns every still-unassigned cell into a standard cell.
    pub fn finalize_standard_cells(&mut self) -> usize {
        let mut n = 0;
        for c in &mut self.cells {
            if *c == CellState::Unassigned {
                *c = CellState::StandardCell;
            }
            if *c == CellState::StandardCell {
                n += 1;
            }
        }
        n
    }

    pub fn count(&self, pred: impl Fn(CellState) -> bool) -> usize {
        self.cells.iter().filter(|c| pred(**c)).count()
    }

    /// Boundary cells of macro `m`.
    pub fn macro_boundary(&self, m: usize) -> impl Iterator<Item = GridPoint> + '_ {
        let r = self.macros[m].rect;
        r.points().filter(move |p| r.on_boundary(*p))
    }

    /// Number of 4-connected components formed by non-white cells.
    pub fn solid_components(&self) -> usize {
        let mut seen = vec![false; self.cells.len()];
        let mut comps = 0;
        let mut queue = VecDeque::new();
        for start in 0..self.cells.len() {
            if seen[start] || self.cells[start] == CellState::WhiteSpace {
                continue;
            }
            comps += 1;
            seen[start] = true;
            queue.push_back(start);
            while let Some(i) = queue.pop_front() {
                let p = self.point(i);
                for q in self.neighbors(p) {
                    let j = self.idx(q);
                    if !seen[j] && self.cells[j] != CellState::WhiteSpace {
                        seen[j] = true;
                        queue.push_back(j);
                    }
                }
            }
        }
        comps
    }
}

/// Maps real-coordinate macros onto the grid by scaling to fractions of the
/// region and truncating each edge to a grid line. Macros that vanish or
/// collide with an earlier macro after truncation are dropped and reported.
pub fn snap_macros(region: BoxF, macros: &[MacroSpec], grid: &mut Grid) -> Vec<Discarded> {
    let mut discarded = Vec::new();
    let (w, h) = (grid.width as f64, grid.height as f64);
    let to_x = |x: f64| ((x - region.xlo) / region.width() * w + 1e-9).floor() as i64;
    let to_y = |y: f64| ((y - region.ylo) / region.height() * h + 1e-9).floor() as i64;
    for (src, m) in macros.iter().enumerate() {
        let x0 = to_x(m.x).max(0);
        let y0 = to_y(m.y).max(0);
        let x1 = to_x(m.x + m.width).min(grid.width);
        let y1 = to_y(m.y + m.height).min(grid.height);
        if m.x + m.width <= region.xlo || m.x >= region.xhi || m.y + m.height <= region.ylo || m.y >= region.yhi {
            discarded.push(Discarded { name: m.name.clone(), reason: DiscardReason::OutsideRegion });
            continue;
        }
        if x1 <= x0 || y1 <= y0 {
            discarded.push(Discarded { name: m.name.clone(), reason: DiscardReason::ZeroExtent });
            continue;
        }
        let rect = Rect::new(GridPoint::new(x0, y0), GridPoint::new(x1 - 1, y1 - 1));
        if let Some(other) = grid.macros.iter().find(|g| g.rect.intersects(&rect)) {
            discarded.push(Discarded { name: m.name.clone(), reason: DiscardReason::Overlap { with: other.name.clone() } });
            continue;
        }
        let id = grid.macros.len() as u32;
        for p in rect.points() {
            let s = if rect.on_boundary(p) { CellState::MacroBoundary(id) } else { CellState::MacroInterior(id) };
            grid.set_state(p, s);
        }
        grid.macros.push(GridMacro { name: m.name.clone(), rect, movable: m.movable, source: src });
    }
    discarded
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(name: &str, x: f64, y: f64, w: f64, h: f64) -> MacroSpec {
        MacroSpec { name: name.into(), x, y, width: w, height: h, movable: false }
    }

    #[test]
    fn quarter_area_macro_snaps_exactly() {
        let mut g = Grid::new(100, 100);
        let d = snap_macros(BoxF::new(0.0, 0.0, 1.0, 1.0), &[spec("a", 0.25, 0.25, 0.5, 0.5)], &mut g);
        assert!(d.is_empty());
        assert_eq!(g.macros[0].rect.width(), 50);
        assert_eq!(g.macros[0].rect.height(), 50);
        assert_eq!(g.count(|c| c.is_macro()), 2500);
        assert_eq!(g.count(|c| matches!(c, CellState::MacroBoundary(_))), 196);
    }

    #[test]
    fn thin_macro_is_discarded() {
        let mut g = Grid::new(10, 10);
        let d = snap_macros(BoxF::new(0.0, 0.0, 10.0, 10.0), &[spec("thin", 2.2, 0.0, 0.3, 5.0)], &mut g);
        assert_eq!(d, vec![Discarded { name: "thin".into(), reason: DiscardReason::ZeroExtent }]);
        assert!(g.macros.is_empty());
    }

    #[test]
    fn abutting_overlap_drops_second() {
        let mut g = Grid::new(100, 100);
        let region = BoxF::new(0.0, 0.0, 1.0, 1.0);
        let d = snap_macros(region, &[spec("a", 0.0, 0.0, 0.5000001, 0.5), spec("b", 0.4999999, 0.0, 0.5, 0.5)], &mut g);
        assert_eq!(g.macros.len(), 1);
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].reason, DiscardReason::Overlap { with: "a".into() });
    }

    #[test]
    fn components_count() {
        let mut g = Grid::new(3, 1);
        assert_eq!(g.solid_components(), 1);
        g.set_state(GridPoint::new(1, 0), CellState::WhiteSpace);
        assert_eq!(g.solid_components(), 2);
    }
}
