// SPDX-License-Identifier: Apache-2.0

use proptest::prelude::*;

use optbench::bookshelf::{parse_bundle, uniform_rows, write_bundle, BenchmarkBundle};
use optbench::chain::{is_monotone, is_monotone_by_length};
use optbench::eval::overflow::{bin_overflow, UtilizationGrid};
use optbench::eval::{displacement_report, quality_ratio, shpwl};
use optbench::geom::{BoxF, GridPoint, Rect};
use optbench::mixed_size::backbone::{allowed_degrees, charge};
use optbench::netlist::{Frame, Module, ModuleKind, Net, Netlist, Pin, PinDirection, Placement};
use optbench::wirelength::{equivalent_edges, grid_hpwl, min_hpwl};
use optbench::DegreeHistogram;

/// Smallest bounding box half-perimeter holding `t` distinct cells, by trying
/// every box width.
fn packing_oracle(t: usize) -> u64 {
    (1..=t).map(|w| (w - 1 + t.div_ceil(w) - 1) as u64).min().unwrap()
}

fn point() -> impl Strategy<Value = GridPoint> {
    (-6i64..6, -6i64..6).prop_map(|(x, y)| GridPoint::new(x, y))
}

proptest! {
    #[test]
    fn min_hpwl_matches_packing(t in 1usize..3000) {
        prop_assert_eq!(min_hpwl(t).unwrap(), packing_oracle(t));
    }

    #[test]
    fn monotone_definitions_agree(path in prop::collection::vec(point(), 2..8)) {
        prop_assert_eq!(is_monotone(&path).unwrap(), is_monotone_by_length(&path).unwrap());
    }

    #[test]
    fn equivalent_edges_are_the_spanning_pairs(pts in prop::collection::vec(point(), 2..7)) {
        let bb = Rect::bounding(pts.iter().copied()).unwrap();
        let edges = equivalent_edges(&pts);
        for e in &edges {
            prop_assert_ne!(e.a, e.b);
            prop_assert_eq!(Rect::spanning(pts[e.a], pts[e.b]), bb);
        }
        let any_pair = (0..pts.len()).any(|i| (0..pts.len()).any(|j| i != j && Rect::spanning(pts[i], pts[j]) == bb));
        prop_assert_eq!(any_pair, !edges.is_empty());
    }

    #[test]
    fn grid_hpwl_never_beats_the_bound(pts in prop::collection::hash_set((0i64..10, 0i64..10), 1..30)) {
        let pts: Vec<GridPoint> = pts.into_iter().map(GridPoint::from).collect();
        prop_assert!(grid_hpwl(&pts) as u64 >= min_hpwl(pts.len()).unwrap());
    }

    /// Charging any allowed degree consumes exactly that many pins from the budget.
    #[test]
    fn compromise_conserves_pins(
        counts in prop::collection::vec((2usize..12, 1u64..6), 1..6),
        picks in prop::collection::vec(2usize..12, 1..20),
    ) {
        let mut hist = DegreeHistogram::from_pairs(counts);
        for d in picks {
            let allowed = allowed_degrees(&hist);
            if !allowed.get(d).copied().unwrap_or(false) {
                continue;
            }
            let before = hist.total_pins();
            charge(&mut hist, d);
            prop_assert_eq!(hist.total_pins() + d as u64, before);
            prop_assert!(hist.iter().all(|(k, _)| k >= 2));
        }
    }

    #[test]
    fn ratio_times_bound_is_attained(attained in 0u32..1_000_000, bound in 1u32..1_000_000) {
        let r = quality_ratio(attained as f64, bound as f64).unwrap();
        prop_assert!((r * bound as f64 - attained as f64).abs() <= 1e-6 * attained.max(1) as f64);
    }

    #[test]
    fn shpwl_is_monotone_in_overflow(h in 0.0f64..1e9, a in 0.0f64..100.0, b in 0.0f64..100.0) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(shpwl(h, lo) <= shpwl(h, hi));
        prop_assert!(shpwl(h, lo) >= h);
    }

    #[test]
    fn overflow_is_translation_invariant(
        cells in prop::collection::vec((0.0f64..18.0, 0.0f64..18.0, 0.5f64..3.0, 0.5f64..3.0, any::<bool>()), 1..25),
        dx in -50i32..50, dy in -50i32..50,
    ) {
        let region = BoxF::new(0.0, 0.0, 20.0, 20.0);
        let build = |ox: f64, oy: f64| {
            let mut nl = Netlist::new(region.translate(ox, oy));
            let mut pl = Placement::new(0, Frame::default());
            for (i, &(x, y, w, h, movable)) in cells.iter().enumerate() {
                let id = nl.add_module(Module::new(format!("m{i}"), ModuleKind::StandardCell, w, h, movable));
                pl.positions.push(None);
                pl.orientations.push("N".into());
                pl.set(id, x + ox, y + oy);
            }
            let grid = UtilizationGrid::covering(nl.region, 5.0, 5.0, 0.7);
            bin_overflow(&nl, &pl, &grid).unwrap()
        };
        let a = build(0.0, 0.0);
        let b = build(dx as f64, dy as f64);
        prop_assert_eq!(a.sigma.len(), b.sigma.len());
        for (s, t) in a.sigma.iter().zip(&b.sigma) {
            match (s, t) {
                (Some(s), Some(t)) => prop_assert!((s - t).abs() < 1e-9),
                (None, None) => {}
                _ => prop_assert!(false, "exclusion flags differ"),
            }
        }
        let counted = a.sigma.iter().flatten().count();
        if counted > 0 {
            prop_assert!((a.sigma.iter().flatten().sum::<f64>() / counted as f64 - a.sov_per_bin).abs() < 1e-9);
        }
    }

    #[test]
    fn bookshelf_round_trip(
        mods in prop::collection::vec((1u8..4, 0u16..40, 0u16..40, any::<bool>()), 2..12),
        nets in prop::collection::vec(prop::collection::vec((0usize..12, -2i8..3, -2i8..3), 2..5), 1..10),
    ) {
        let mut nl = Netlist::new(BoxF::new(0.0, 0.0, 40.0, 40.0));
        let mut pl = Placement::new(mods.len(), Frame::default());
        for (i, &(w, x, y, movable)) in mods.iter().enumerate() {
            let kind = if !movable { ModuleKind::Terminal } else { ModuleKind::StandardCell };
            let id = nl.add_module(Module::new(format!("m{i}"), kind, w as f64, 1.0, movable));
            pl.set(id, x as f64, y as f64);
        }
        for (k, pins) in nets.iter().enumerate() {
            let pins = pins
                .iter()
                .enumerate()
                .map(|(j, &(m, dx, dy))| Pin {
                    module: optbench::ModuleId(m % mods.len()),
                    direction: if j == 0 { PinDirection::Output } else { PinDirection::Input },
                    dx: dx as f64 * 0.5,
                    dy: dy as f64 * 0.25,
                })
                .collect();
            nl.add_net(Net { name: format!("n{k}"), pins });
        }
        let rows = uniform_rows(nl.region, 1.0, 1.0);
        let b = BenchmarkBundle { name: "prop".into(), netlist: nl, placement: pl, rows, sources: Vec::new() };
        let tmp = tempfile::tempdir().unwrap();
        let first: Vec<Vec<u8>> = write_bundle(&b, tmp.path().join("a")).unwrap().iter().map(|p| std::fs::read(p).unwrap()).collect();
        let parsed = parse_bundle(tmp.path().join("a/prop.aux")).unwrap();
        prop_assert!(parsed.same_model(&b));
        let second: Vec<Vec<u8>> = write_bundle(&parsed, tmp.path().join("b")).unwrap().iter().map(|p| std::fs::read(p).unwrap()).collect();
        prop_assert_eq!(first, second);
    }

    #[test]
    fn displacement_against_itself_is_zero(xs in prop::collection::vec((0.0f64..100.0, 0.0f64..100.0), 1..20)) {
        let mut nl = Netlist::new(BoxF::new(0.0, 0.0, 100.0, 100.0));
        let mut pl = Placement::new(xs.len(), Frame::default());
        for (i, &(x, y)) in xs.iter().enumerate() {
            let id = nl.add_module(Module::new(format!("m{i}"), ModuleKind::StandardCell, 1.0, 1.0, true));
            pl.set(id, x, y);
        }
        let r = displacement_report(&nl, &pl, &nl, &pl).unwrap();
        prop_assert_eq!(r.bias, (0.0, 0.0));
        prop_assert_eq!(r.max, 0.0);
    }
}

#[test]
fn min_hpwl_small_cases() {
    assert_eq!(min_hpwl(7).unwrap(), 4);
    assert_eq!(min_hpwl(1).unwrap(), 0);
    assert_eq!(min_hpwl(2).unwrap(), 1);
    assert_eq!(min_hpwl(9).unwrap(), 4);
    assert_eq!(min_hpwl(10).unwrap(), 5);
}
