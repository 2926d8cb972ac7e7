// SPDX-License-Identifier: Apache-2.0

mod common;

use common::*;
use optbench::bookshelf::{extract_degree_histogram, parse_bundle, parse_placement};
use optbench::netlist::{ModuleKind, PinDirection};
use optbench::wirelength::total_hpwl;
use optbench::{Error, ModuleId};

#[test]
fn corpus_has_at_least_ten_fixtures() {
    assert!(fixture_auxes().len() >= 10, "{:?}", fixture_auxes());
}

#[test]
fn second_write_is_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    for aux in fixture_auxes() {
        let b = parse_bundle(&aux).unwrap();
        let first = written_bytes(&b, &tmp.path().join("a"));
        let again = parse_bundle(tmp.path().join("a").join(format!("{}.aux", b.name))).unwrap();
        let second = written_bytes(&again, &tmp.path().join("b"));
        assert_eq!(first, second, "{}", aux.display());
        assert!(b.same_model(&again), "{}", aux.display());
    }
}

#[test]
fn hand_written_details_survive_parsing() {
    let b = fixture("hand_tiny");
    let nl = &b.netlist;
    assert_eq!(nl.modules.len(), 7);
    assert_eq!(nl.nets.len(), 4);
    let idx = nl.module_index();
    assert_eq!(nl.module(idx["pad0"]).kind, ModuleKind::Terminal);
    assert!(!nl.module(idx["pad0"]).movable);
    assert_eq!(nl.module(idx["c"]).width, 2.0);
    assert_eq!(nl.nets[0].name, "clk");
    assert_eq!(nl.nets[1].name, "net1", "unnamed nets are numbered by position");
    assert_eq!(nl.nets[1].pins[1].dx, 0.25);
    assert_eq!(nl.nets[1].pins[1].dy, -0.25);
    assert_eq!(nl.nets[2].pins[2].direction, PinDirection::Bidirectional);
    assert_eq!(b.placement.orientations[idx["b"].0], "FS");
    assert_eq!((nl.region.xlo, nl.region.xhi, nl.region.yhi), (0.0, 6.0, 2.0));
    let hist = extract_degree_histogram(nl);
    assert_eq!((hist.get(2), hist.get(3)), (2, 2));
    assert_eq!(hist.total_pins(), nl.pin_count() as u64);
}

#[test]
fn tall_nodes_are_macros_and_sites_set_the_unit() {
    let b = fixture("hand_macro");
    let idx = b.netlist.module_index();
    assert_eq!(b.netlist.module(idx["blockA"]).kind, ModuleKind::Macro);
    assert!(!b.netlist.module(idx["blockA"]).movable);
    assert_eq!(b.netlist.module(idx["blockB"]).kind, ModuleKind::Macro);
    assert!(b.netlist.module(idx["blockB"]).movable);
    assert_eq!(b.netlist.module(idx["io0"]).kind, ModuleKind::Terminal);
    assert_eq!(b.placement.frame.grid_unit, 2.0);
    assert_eq!(b.placement.frame.row_height, 12.0);
    assert_eq!((b.netlist.region.xlo, b.netlist.region.xhi, b.netlist.region.yhi), (10.0, 70.0, 48.0));
}

#[test]
fn replacement_placement_is_read_against_the_netlist() {
    let b = fixture("hand_tiny");
    let pl = parse_placement(fixture_dir().join("hand_tiny/hand_tiny.pl"), &b.netlist, b.placement.frame).unwrap();
    assert_eq!(pl, b.placement);
    assert_eq!(total_hpwl(&b.netlist, &pl).unwrap(), total_hpwl(&b.netlist, &b.placement).unwrap());
    assert_eq!(pl.get(ModuleId(0)), Some((1.0, 0.0)));
}

#[test]
fn parse_errors_carry_file_and_line() {
    let tmp = tempfile::tempdir().unwrap();
    let src = fixture_dir().join("hand_tiny");
    for f in ["hand_tiny.aux", "hand_tiny.nodes", "hand_tiny.pl", "hand_tiny.scl"] {
        std::fs::copy(src.join(f), tmp.path().join(f)).unwrap();
    }
    std::fs::write(tmp.path().join("hand_tiny.nets"), "UCLA nets 1.0\nNetDegree : 2 x\n  a O\n  ghost I\n").unwrap();
    match parse_bundle(tmp.path().join("hand_tiny.aux")) {
        Err(Error::Parse { line, msg, .. }) => {
            assert_eq!(line, 4);
            assert!(msg.contains("ghost"));
        }
        other => panic!("expected a parse error, got {other:?}"),
    }
    assert!(matches!(parse_bundle(tmp.path().join("missing.aux")), Err(Error::Io { .. })));
}

#[test]
fn certificates_round_trip_and_match_the_placement() {
    let tmp = tempfile::tempdir().unwrap();
    let certified = certified_fixtures();
    assert!(certified.len() >= 6);
    for (b, cert) in certified {
        let (json, _) = cert.write(tmp.path()).unwrap();
        let again = optbench::certificate::OptimalityCertificate::read(json).unwrap();
        assert_eq!(again, cert);
        let hpwl = total_hpwl(&b.netlist, &b.placement).unwrap();
        assert!((hpwl - cert.attained_length()).abs() < 1e-6, "{}: {hpwl} vs {}", b.name, cert.attained_length());
        assert_eq!(cert.nets.len(), b.netlist.nets.len());
    }
}
