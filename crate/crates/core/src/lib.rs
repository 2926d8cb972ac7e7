// SPDX-License-Identifier: Apache-2.0

//! Placement benchmarks whose given placements carry an explicit wirelength
//! optimality certificate, plus tools to score arbitrary placements against
//! those certificates.
//!
//! The crate is organized bottom-up:
//!
//! * [`geom`], [`netlist`], [`wirelength`], [`chain`], [`connectivity`] hold the
//!   hypergraph model and the HPWL arithmetic every generator relies on.
//! * [`bookshelf`] and [`certificate`] read and write benchmark bundles.
//! * [`mixed_size`] builds mixed-size netlists with parametrized white space.
//! * [`monotone_rewrite`] rewrites an existing netlist around a fixed placement
//!   so that the placement becomes optimal.
//! * [`ogp`] coarsens certified placements onto bin centers.
//! * [`eval`] scores placements (quality ratios, bin overflow, displacement).

pub mod bookshelf;
pub mod certificate;
pub mod chain;
pub mod connectivity;
mod error;
pub mod eval;
pub mod geom;
pub mod mixed_size;
pub mod monotone_rewrite;
pub mod netlist;
pub mod ogp;
pub mod par;
pub mod rng;
pub mod wirelength;

pub use error::{Error, Result};
pub use geom::{GridPoint, Rect};
pub use netlist::{DegreeHistogram, Module, ModuleId, ModuleKind, Net, NetId, Netlist, Pin, Placement};
