// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};

use crate::geom::BoxF;
use crate::{Error, Result};

/// A macro in real region coordinates (lower-left corner plus size).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MacroSpec {
    pub name: String,
    pub x: f64,
    pub y: f64,
    pub width: f64,
    pub height: f64,
    pub movable: bool,
}

impl MacroSpec {
    pub fn area(&self) -> f64 {
        self.width * self.height
    }

    pub fn bbox(&self) -> BoxF {
        BoxF::new(self.x, self.y, self.x + self.width, self.y + self.height)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridPlan {
    /// Target number of grid cells before rounding to a rectangle.
    pub cells: usize,
    pub width: usize,
    pub height: usize,
    pub std_cells: usize,
    pub phi_mac: f64,
    pub phi_sc: f64,
    pub phi_ws: f64,
    /// White-space cells implied by `phi_ws` (before macro truncation).
    pub white_cells: usize,
    pub cap: usize,
}

/// Sizes the grid from the macro area fraction, the standard-cell count, and
/// the requested white-space fraction, clamping white space to what the macros
/// and the grid-resolution cap leave room for.
pub fn plan_grid(region: BoxF, macros: &[MacroSpec], std_cells: usize, phi_ws_requested: f64, cap: usize) -> Result<GridPlan> {
    if std_cells == 0 {
        return Err(Error::Config("need at least one standard cell".into()));
    }
    if cap < std_cells {
        return Err(Error::Config(format!("grid cap {cap} is below the standard-cell count {std_cells}")));
    }
    if !(0.0..=1.0).contains(&phi_ws_requested) {
        return Err(Error::Config(format!("white-space fraction {phi_ws_requested} outside [0, 1]")));
    }
    let area = region.area();
    if area <= 0.0 {
        return Err(Error::Config("placement region has no area".into()));
    }
    let phi_mac = macros.iter().map(MacroSpec::area).sum::<f64>() / area;
    let mut phi_ws = phi_ws_requested.min(1.0 - phi_mac - std_cells as f64 / cap as f64).max(0.0);
    let mut phi_sc = 1.0 - phi_mac - phi_ws;
    if phi_sc <= 0.0 {
        return Err(Error::Config(format!("no room for standard cells (macro fraction {phi_mac:.3})")));
    }
    let mut cells = (std_cells as f64 / phi_sc).ceil() as usize;
    if cells > cap {
        cells = cap;
        phi_sc = std_cells as f64 / cells as f64;
        phi_ws = (1.0 - phi_mac - phi_sc).max(0.0);
    }
    let (width, height) = aspect_dims(cells, region.width() / region.height());
    Ok(GridPlan {
        cells,
        width,
        height,
        std_cells,
        phi_mac,
        phi_sc,
        phi_ws,
        white_cells: (phi_ws * cells as f64).round() as usize,
        cap,
    })
}

/// The `(W, H)` with `W * H >= cells` whose ratio best matches `aspect`,
/// taking the smallest `W` for each `H`; ties go to the smaller product.
pub fn aspect_dims(cells: usize, aspect: f64) -> (usize, usize) {
    let cells = cells.max(1);
    let mut best = (cells, 1usize);
    let mut best_key = (f64::INFINITY, usize::MAX);
    // W/H near `aspect` means H near sqrt(cells / aspect); search a generous band.
    let h0 = ((cells as f64 / aspect).sqrt()).max(1.0);
    let lo = ((h0 * 0.5).floor() as usize).max(1);
    let hi = ((h0 * 2.0).ceil() as usize).min(cells);
    for h in lo..=hi {
        let w = cells.div_ceil(h);
        let key = ((w as f64 / h as f64 - aspect).abs(), w * h);
        if key.0 < best_key.0 - 1e-12 || ((key.0 - best_key.0).abs() <= 1e-12 && key.1 < best_key.1) {
            best_key = key;
            best = (w, h);
        }
    }
    best
}
