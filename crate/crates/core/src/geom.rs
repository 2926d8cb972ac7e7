// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};

/// A grid cell, addressed by integer column and row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GridPoint {
    pub x: i64,
    pub y: i64,
}

impl GridPoint {
    pub const fn new(x: i64, y: i64) -> Self {
        GridPoint { x, y }
    }

    pub fn manhattan(self, other: GridPoint) -> i64 {
        (self.x - other.x).abs() + (self.y - other.y).abs()
    }
}

impl From<(i64, i64)> for GridPoint {
    fn from((x, y): (i64, i64)) -> Self {
        GridPoint { x, y }
    }
}

/// Inclusive rectangle of grid cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rect {
    pub lo: GridPoint,
    pub hi: GridPoint,
}

impl Rect {
    pub fn new(lo: GridPoint, hi: GridPoint) -> Self {
        debug_assert!(lo.x <= hi.x && lo.y <= hi.y);
        Rect { lo, hi }
    }

    /// Smallest rectangle holding both points.
    pub fn spanning(a: GridPoint, b: GridPoint) -> Self {
        Rect {
            lo: GridPoint::new(a.x.min(b.x), a.y.min(b.y)),
            hi: GridPoint::new(a.x.max(b.x), a.y.max(b.y)),
        }
    }

    /// Bounding box of a point set; `None` when empty.
    pub fn bounding<I: IntoIterator<Item = GridPoint>>(points: I) -> Option<Self> {
        let mut it = points.into_iter();
        let first = it.next()?;
        let mut r = Rect { lo: first, hi: first };
        for p in it {
            r.lo.x = r.lo.x.min(p.x);
            r.lo.y = r.lo.y.min(p.y);
            r.hi.x = r.hi.x.max(p.x);
            r.hi.y = r.hi.y.max(p.y);
        }
        Some(r)
    }

    pub fn width(&self) -> i64 {
        self.hi.x - self.lo.x + 1
    }

    pub fn height(&self) -> i64 {
        self.hi.y - self.lo.y + 1
    }

    pub fn area(&self) -> i64 {
        self.width() * self.height()
    }

    /// Half-perimeter of the box measured between cell centers.
    pub fn half_perimeter(&self) -> i64 {
        (self.hi.x - self.lo.x) + (self.hi.y - self.lo.y)
    }

    pub fn contains(&self, p: GridPoint) -> bool {
        p.x >= self.lo.x && p.x <= self.hi.x && p.y >= self.lo.y && p.y <= self.hi.y
    }

    pub fn intersects(&self, other: &Rect) -> bool {
        self.lo.x <= other.hi.x && other.lo.x <= self.hi.x && self.lo.y <= other.hi.y && other.lo.y <= self.hi.y
    }

    /// Cells on the rectangle's outline.
    pub fn on_boundary(&self, p: GridPoint) -> bool {
        self.contains(p) && (p.x == self.lo.x || p.x == self.hi.x || p.y == self.lo.y || p.y == self.hi.y)
    }

    pub fn points(self) -> impl Iterator<Item = GridPoint> {
        let (lo, hi) = (self.lo, self.hi);
        (lo.y..=hi.y).flat_map(move |y| (lo.x..=hi.x).map(move |x| GridPoint::new(x, y)))
    }
}

/// Axis-aligned box in real (placement-frame) coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxF {
    pub xlo: f64,
    pub ylo: f64,
    pub xhi: f64,
    pub yhi: f64,
}

impl BoxF {
    pub fn new(xlo: f64, ylo: f64, xhi: f64, yhi: f64) -> Self {
        BoxF { xlo, ylo, xhi, yhi }
    }

    pub fn width(&self) -> f64 {
        self.xhi - self.xlo
    }

    pub fn height(&self) -> f64 {
        self.yhi - self.ylo
    }

    pub fn area(&self) -> f64 {
        self.width().max(0.0) * self.height().max(0.0)
    }

    pub fn overlap_area(&self, other: &BoxF) -> f64 {
        let w = self.xhi.min(other.xhi) - self.xlo.max(other.xlo);
        let h = self.yhi.min(other.yhi) - self.ylo.max(other.ylo);
        if w > 0.0 && h > 0.0 {
            w * h
        } else {
            0.0
        }
    }

    pub fn translate(&self, dx: f64, dy: f64) -> BoxF {
        BoxF::new(self.xlo + dx, self.ylo + dy, self.xhi + dx, self.yhi + dy)
    }
}
