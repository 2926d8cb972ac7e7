// SPDX-License-Identifier: Apache-2.0

//! Mixed-size benchmarks with parametrized white space whose given placement
//! comes with an explicit wirelength suboptimality bound.
//!
//! The pipeline sizes a uniform grid ([`plan`]), snaps the macros into it
//! ([`grid`]), whitens cells without disconnecting the rest
//! ([`whitespace`]), connects everything with a backbone of local nets
//! ([`backbone`]), optionally adds monotone chains of nonlocal nets
//! ([`nonlocal`]), and spends the remaining degree budget on further local
//! nets ([`fill`]). Every net is either minimum-HPWL for its degree (up to a
//! per-net slack) or part of a chain whose length equals the distance
//! between its fixed terminals, so the summed bounds certify the placement.

pub mod backbone;
pub mod fill;
pub mod grid;
pub mod local_net;
pub mod nonlocal;
pub mod plan;
pub mod whitespace;

use std::collections::HashMap;

use rand::seq::IndexedRandom;
use serde::{Deserialize, Serialize};

use crate::bookshelf::{uniform_rows, BenchmarkBundle};
use crate::certificate::{CertificateHeader, NetRecord, OptimalityCertificate};
use crate::eval::overflow::{bin_overflow, UtilizationGrid};
use crate::geom::{BoxF, GridPoint, Rect};
use crate::netlist::{DegreeHistogram, Frame, Module, ModuleId, ModuleKind, Net, Netlist, Pin, PinDirection, Placement};
use crate::rng::seeded;
use crate::wirelength::grid_hpwl;
use crate::{Error, Result};

pub use backbone::Backbone;
pub use grid::{CellState, Discarded, Grid};
pub use local_net::{GrowParams, LocalNet};
pub use nonlocal::ChainOptions;
pub use plan::{GridPlan, MacroSpec};
pub use whitespace::BinWhiteSpace;

/// How white space is distributed over the grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum WhiteSpace {
    /// Requested fraction of the region, spread uniformly at random.
    Uniform(f64),
    /// As much as the grid cap and the macros allow.
    Max,
    /// Zero white space on the left half, 10% on the right half.
    Packed,
    /// Target movable-area utilization per bin.
    PerBin { utilization: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MsConfig {
    pub name: String,
    pub histogram: DegreeHistogram,
    pub region: BoxF,
    pub macros: Vec<MacroSpec>,
    pub std_cells: usize,
    pub white_space: WhiteSpace,
    /// Largest grid-cell count; bounds the white space `Max` can reach.
    /// Defaults to eight cells per standard cell.
    pub grid_cap: usize,
    pub seed: u64,
    /// Physical size of one grid cell (and standard-cell row) in the output.
    pub grid_unit: f64,
    /// Side of a utilization bin, in rows.
    pub bin_rows: usize,
    pub bin_iteration_limit: usize,
    pub big_net_threshold: usize,
    pub grow: GrowParams,
    pub chains: ChainOptions,
}

impl MsConfig {
    pub fn new(name: impl Into<String>, histogram: DegreeHistogram, std_cells: usize) -> Self {
        MsConfig {
            name: name.into(),
            histogram,
            region: BoxF::new(0.0, 0.0, 1.0, 1.0),
            macros: Vec::new(),
            std_cells,
            white_space: WhiteSpace::Uniform(0.1),
            grid_cap: std_cells.saturating_mul(8).max(64),
            seed: 1,
            grid_unit: 1.0,
            bin_rows: 10,
            bin_iteration_limit: 400,
            big_net_threshold: 500,
            grow: GrowParams::default(),
            chains: ChainOptions::default(),
        }
    }

    /// Targets taken from an existing benchmark: its degree histogram,
    /// standard-cell count, region, and macro placement.
    pub fn from_bundle(bundle: &BenchmarkBundle) -> Result<Self> {
        let nl = &bundle.netlist;
        let mut macros = Vec::new();
        let mut std_cells = 0;
        for (i, m) in nl.modules.iter().enumerate() {
            match m.kind {
                ModuleKind::StandardCell => std_cells += 1,
                ModuleKind::Macro => {
                    let (x, y) = bundle.placement.get(ModuleId(i)).ok_or_else(|| Error::Unplaced(m.name.clone()))?;
                    macros.push(MacroSpec { name: m.name.clone(), x, y, width: m.width, height: m.height, movable: m.movable });
                }
                ModuleKind::Terminal => {}
            }
        }
        let mut cfg = MsConfig::new(bundle.name.clone(), DegreeHistogram::of_netlist(nl), std_cells);
        cfg.region = nl.region;
        cfg.macros = macros;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        if self.std_cells == 0 {
            return Err(Error::Config("std_cells must be at least 1".into()));
        }
        if self.grid_cap < self.std_cells {
            return Err(Error::Config("grid_cap must be at least std_cells".into()));
        }
        if self.histogram.iter().any(|(k, _)| k < 2) {
            return Err(Error::Config("histogram degrees must be at least 2".into()));
        }
        if self.grid_unit.is_nan() || self.grid_unit <= 0.0 {
            return Err(Error::Config("grid_unit must be positive".into()));
        }
        match self.white_space {
            WhiteSpace::Uniform(f) if !(0.0..1.0).contains(&f) => Err(Error::Config(format!("white-space fraction {f} outside [0, 1)"))),
            WhiteSpace::PerBin { utilization } if !(utilization > 0.0 && utilization <= 1.0) => {
                Err(Error::Config(format!("utilization {utilization} outside (0, 1]")))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MsStats {
    pub std_cells: usize,
    pub white_cells: usize,
    pub macros: usize,
    pub pads: usize,
    pub backbone_nets: usize,
    pub chain_nets: usize,
    pub fill_nets: usize,
    pub compromises: usize,
    /// Standard cells moved next to the connected region to keep it whole.
    pub relocated: usize,
    pub per_bin: Vec<BinWhiteSpace>,
}

#[derive(Debug, Clone)]
pub struct MsOutput {
    pub bundle: BenchmarkBundle,
    pub certificate: OptimalityCertificate,
    pub plan: GridPlan,
    pub discarded: Vec<Discarded>,
    pub stats: MsStats,
    pub grid: Grid,
}

enum NetSource {
    Local(LocalNet),
    Chain { chain: usize, pins: Vec<GridPoint> },
}

/// Runs the whole generator. Identical configurations give identical output.
pub fn generate_ms(config: &MsConfig) -> Result<MsOutput> {
    config.validate()?;
    let mut rng = seeded(config.seed);
    let mut hist = fill::split_big_nets(&config.histogram, config.big_net_threshold);
    let area = config.region.area();
    let phi_mac = config.macros.iter().map(MacroSpec::area).sum::<f64>() / area.max(f64::MIN_POSITIVE);
    let requested = match config.white_space {
        WhiteSpace::Uniform(f) => f,
        WhiteSpace::Max => 1.0,
        WhiteSpace::Packed => 0.05,
        WhiteSpace::PerBin { utilization } => ((1.0 - utilization) * (1.0 - phi_mac)).clamp(0.0, 1.0),
    };
    let plan = plan::plan_grid(config.region, &config.macros, config.std_cells, requested, config.grid_cap)?;
    let mut grid = Grid::new(plan.width, plan.height);
    let discarded = grid::snap_macros(config.region, &config.macros, &mut grid);
    let non_macro = grid.count(|s| !s.is_macro());
    let mut stats = MsStats::default();

    match config.white_space {
        WhiteSpace::PerBin { utilization } => {
            stats.per_bin = whitespace::insert_white_space_per_bin(
                &mut grid,
                config.bin_rows,
                utilization,
                config.bin_iteration_limit,
                &mut rng,
            );
        }
        mode => {
            let white = non_macro.checked_sub(config.std_cells).ok_or_else(|| {
                Error::Config(format!("{} standard cells do not fit in {non_macro} free grid cells", config.std_cells))
            })?;
            let area = match mode {
                WhiteSpace::Packed => {
                    let b = grid.bounds();
                    Some(Rect::new(GridPoint::new(grid.width / 2, 0), b.hi))
                }
                _ => None,
            };
            whitespace::insert_white_space(&mut grid, white, area, &mut rng)?;
        }
    }
    stats.std_cells = grid.finalize_standard_cells();
    stats.white_cells = grid.count(|s| s == CellState::WhiteSpace);
    stats.macros = grid.macros.len();

    let mut cap = local_net::PinCapacity::new(&grid);
    let bb = backbone::build_backbone(&mut grid, &mut cap, &mut hist, &config.grow, &mut rng)?;
    stats.backbone_nets = bb.nets.len();
    stats.compromises = bb.compromises;
    stats.relocated = bb.relocated;
    let mut sources: Vec<NetSource> = bb.nets.into_iter().map(NetSource::Local).collect();

    let mut pads = Vec::new();
    if config.chains.enabled {
        let mut terminals = nonlocal::perimeter_pads(grid.width, grid.height, config.chains.pads);
        if config.chains.fixed_macro_terminals {
            let pins: Vec<GridPoint> = (0..grid.macros.len())
                .filter(|&m| !grid.macros[m].movable)
                .flat_map(|m| grid.macro_boundary(m).collect::<Vec<_>>())
                .filter(|&p| grid.is_available(p))
                .collect();
            let take = config.chains.pads.min(pins.len());
            terminals.extend(pins.choose_multiple(&mut rng, take).copied());
        }
        let chains = nonlocal::add_nonlocal_chains(&mut grid, &terminals, &mut hist, config.chains.span_fraction, &mut rng);
        for (ci, c) in chains.into_iter().enumerate() {
            for net in c.nets {
                stats.chain_nets += 1;
                sources.push(NetSource::Chain { chain: ci, pins: net });
            }
        }
        pads = terminals.into_iter().filter(|p| !grid.contains(*p)).collect();
    }

    let filled = fill::fill_nets(&mut grid, &cap, &mut hist, &config.grow, &mut rng);
    stats.fill_nets = filled.len();
    sources.extend(filled.into_iter().map(NetSource::Local));

    let (bundle, records, used_pads) = emit(config, &grid, &sources, &pads);
    stats.pads = used_pads;
    let mut header = CertificateHeader::new(config.name.clone(), "mixed-size", config.seed);
    header.grid_width = grid.width;
    header.grid_height = grid.height;
    header.grid_unit = config.grid_unit;
    header.unmet = hist.iter().collect();
    header.params = params_of(config, &plan);
    if let WhiteSpace::PerBin { utilization } = config.white_space {
        let bin = config.bin_rows as f64 * config.grid_unit;
        let ug = UtilizationGrid::covering(bundle.netlist.region, bin, bin, utilization);
        header.sov_per_bin = Some(bin_overflow(&bundle.netlist, &bundle.placement, &ug)?.sov_per_bin);
    }
    let certificate = OptimalityCertificate::new(header, records);
    Ok(MsOutput { bundle, certificate, plan, discarded, stats, grid })
}

fn params_of(config: &MsConfig, plan: &GridPlan) -> std::collections::BTreeMap<String, String> {
    let mut p = std::collections::BTreeMap::new();
    p.insert("std_cells".into(), config.std_cells.to_string());
    p.insert("white_space".into(), format!("{:?}", config.white_space));
    p.insert("grid_cap".into(), config.grid_cap.to_string());
    p.insert("phi_mac".into(), format!("{:.6}", plan.phi_mac));
    p.insert("phi_ws".into(), format!("{:.6}", plan.phi_ws));
    p.insert("slack".into(), config.grow.slack.to_string());
    p.insert("full_depth".into(), config.grow.full_depth.to_string());
    p.insert("big_net_threshold".into(), config.big_net_threshold.to_string());
    p.insert("chains".into(), config.chains.enabled.to_string());
    p
}

/// Converts grid nets into a Bookshelf bundle plus certificate records.
/// Grid cell (x, y) becomes the unit square with lower-left corner
/// (x·u, y·u); pins sit at cell centers.
fn emit(config: &MsConfig, grid: &Grid, sources: &[NetSource], pads: &[GridPoint]) -> (BenchmarkBundle, Vec<NetRecord>, usize) {
    let u = config.grid_unit;
    let region = BoxF::new(0.0, 0.0, grid.width as f64 * u, grid.height as f64 * u);
    let mut nl = Netlist::new(region);
    let mut cell_module = vec![usize::MAX; grid.len()];
    for (i, slot) in cell_module.iter_mut().enumerate() {
        if grid.state_at(i) == CellState::StandardCell {
            *slot = nl.add_module(Module::new(format!("c{i}"), ModuleKind::StandardCell, u, u, true)).0;
        }
    }
    let mut macro_module = Vec::with_capacity(grid.macros.len());
    for gm in &grid.macros {
        let kind = if gm.rect.height() > 1 { ModuleKind::Macro } else { ModuleKind::StandardCell };
        let w = gm.rect.width() as f64 * u;
        let h = gm.rect.height() as f64 * u;
        macro_module.push(nl.add_module(Module::new(gm.name.clone(), kind, w, h, gm.movable)).0);
    }
    let pad_index: HashMap<GridPoint, usize> = pads.iter().enumerate().map(|(i, p)| (*p, i)).collect();
    let mut pad_module: Vec<Option<usize>> = vec![None; pads.len()];

    let mut pin_of = |nl: &mut Netlist, p: GridPoint| -> Pin {
        if grid.contains(p) {
            let i = grid.idx(p);
            match grid.state_at(i) {
                CellState::MacroBoundary(m) => {
                    let r = grid.macros[m as usize].rect;
                    let cx = (r.lo.x + r.hi.x + 1) as f64 / 2.0;
                    let cy = (r.lo.y + r.hi.y + 1) as f64 / 2.0;
                    let mut pin = Pin::centered(ModuleId(macro_module[m as usize]));
                    pin.dx = (p.x as f64 + 0.5 - cx) * u;
                    pin.dy = (p.y as f64 + 0.5 - cy) * u;
                    pin
                }
                _ => Pin::centered(ModuleId(cell_module[i])),
            }
        } else {
            let k = pad_index[&p];
            let id = *pad_module[k].get_or_insert_with(|| {
                nl.add_module(Module::new(format!("p{k}"), ModuleKind::Terminal, u, u, false)).0
            });
            Pin::centered(ModuleId(id))
        }
    };

    let mut records = Vec::with_capacity(sources.len());
    for (ni, src) in sources.iter().enumerate() {
        let (pts, chain, bound): (&[GridPoint], Option<usize>, Option<i64>) = match src {
            NetSource::Local(n) => (&n.pins, None, Some(n.bound)),
            NetSource::Chain { chain, pins } => (pins, Some(*chain), None),
        };
        let mut pins: Vec<Pin> = pts.iter().map(|&p| pin_of(&mut nl, p)).collect();
        for (k, pin) in pins.iter_mut().enumerate() {
            pin.direction = if k == 0 { PinDirection::Output } else { PinDirection::Input };
        }
        let name = format!("n{ni}");
        let attained = grid_hpwl(pts);
        records.push(NetRecord { net: name.clone(), degree: pts.len(), attained, bound: bound.unwrap_or(attained), chain });
        nl.add_net(Net { name, pins });
    }

    let mut placement = Placement::new(nl.modules.len(), Frame { grid_unit: u, row_height: u });
    for (i, &m) in cell_module.iter().enumerate() {
        if m != usize::MAX {
            let p = grid.point(i);
            placement.set(ModuleId(m), p.x as f64 * u, p.y as f64 * u);
        }
    }
    for (m, gm) in grid.macros.iter().enumerate() {
        placement.set(ModuleId(macro_module[m]), gm.rect.lo.x as f64 * u, gm.rect.lo.y as f64 * u);
    }
    let mut used = 0;
    for (k, id) in pad_module.iter().enumerate() {
        if let Some(id) = id {
            placement.set(ModuleId(*id), pads[k].x as f64 * u, pads[k].y as f64 * u);
            used += 1;
        }
    }
    let rows = uniform_rows(region, u, u);
    let bundle = BenchmarkBundle { name: config.name.clone(), netlist: nl, placement, rows, sources: Vec::new() };
    (bundle, records, used)
}
