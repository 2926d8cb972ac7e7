// SPDX-License-Identifier: Apache-2.0

mod common;

use std::collections::BTreeSet;

use common::*;
use optbench::chain::validate_chain;
use optbench::connectivity::connectivity_check;
use optbench::eval::{evaluate, UtilizationConfig};
use optbench::mixed_size::{generate_ms, MacroSpec, MsConfig, WhiteSpace};
use optbench::monotone_rewrite::seed::{clustered_seed, SeedSpec};
use optbench::monotone_rewrite::{generate_mc, McConfig};
use optbench::netlist::ModuleKind;
use optbench::ogp::{ogp_sweep, SnapMode};
use optbench::par::Execution;
use optbench::wirelength::{grid_hpwl, min_hpwl, total_hpwl};
use optbench::{DegreeHistogram, Error, ModuleId};

fn mixed_config(seed: u64) -> MsConfig {
    let hist = DegreeHistogram::from_pairs([(2, 1400), (3, 500), (4, 250), (6, 80), (12, 10)]);
    let mut cfg = MsConfig::new("mixed", hist, 2000);
    cfg.macros = vec![
        MacroSpec { name: "fixed".into(), x: 0.1, y: 0.1, width: 0.3, height: 0.25, movable: false },
        MacroSpec { name: "loose".into(), x: 0.6, y: 0.55, width: 0.2, height: 0.3, movable: true },
    ];
    cfg.white_space = WhiteSpace::Uniform(0.15);
    cfg.seed = seed;
    cfg
}

#[test]
fn mixed_size_output_is_certified_and_connected() {
    let out = generate_ms(&mixed_config(5)).unwrap();
    let (nl, pl) = (&out.bundle.netlist, &out.bundle.placement);
    assert!(connectivity_check(nl).connected);
    assert_eq!(nl.modules.iter().filter(|m| m.kind == ModuleKind::StandardCell).count(), 2000);
    assert_eq!(nl.modules.iter().filter(|m| m.kind == ModuleKind::Macro).count(), 2);
    let mut attained = 0;
    for (net, rec) in nl.nets.iter().zip(&out.certificate.nets) {
        let pts = pl.net_grid_points(nl, net).unwrap();
        assert_eq!(rec.net, net.name);
        assert_eq!(rec.attained, grid_hpwl(&pts));
        assert_eq!(rec.bound, min_hpwl(net.degree()).unwrap() as i64);
        assert!(rec.attained >= rec.bound);
        assert_eq!(pts.iter().collect::<BTreeSet<_>>().len(), pts.len(), "pins of a net share a cell");
        attained += rec.attained;
    }
    assert_eq!(attained, out.certificate.header.attained_total);
    assert!(out.certificate.rho() <= 1.08, "rho {}", out.certificate.rho());
    assert_eq!(total_hpwl(nl, pl).unwrap(), out.certificate.attained_length());
}

#[test]
fn macro_boundary_cells_carry_one_pin_each() {
    let out = generate_ms(&mixed_config(9)).unwrap();
    let (nl, pl) = (&out.bundle.netlist, &out.bundle.placement);
    let mut seen = BTreeSet::new();
    for net in &nl.nets {
        for pin in &net.pins {
            if nl.module(pin.module).kind == ModuleKind::Macro {
                assert!(seen.insert(pl.pin_grid_point(nl, pin).unwrap()), "two nets on one macro cell");
            }
        }
    }
    assert!(!seen.is_empty());
}

#[test]
fn same_seed_same_bytes() {
    let tmp = tempfile::tempdir().unwrap();
    let a = generate_ms(&mixed_config(3)).unwrap();
    let b = generate_ms(&mixed_config(3)).unwrap();
    assert_eq!(written_bytes(&a.bundle, &tmp.path().join("a")), written_bytes(&b.bundle, &tmp.path().join("b")));
    let c = generate_ms(&mixed_config(4)).unwrap();
    assert_ne!(written_bytes(&a.bundle, &tmp.path().join("a")), written_bytes(&c.bundle, &tmp.path().join("c")));
}

#[test]
fn impossible_white_space_is_a_config_error() {
    let mut cfg = MsConfig::new("bad", DegreeHistogram::from_pairs([(2, 10)]), 10);
    cfg.white_space = WhiteSpace::Uniform(1.2);
    assert!(matches!(generate_ms(&cfg), Err(Error::Config(_))));
    let cfg = MsConfig::new("bad", DegreeHistogram::from_pairs([(1, 10)]), 10);
    assert!(matches!(generate_ms(&cfg), Err(Error::Config(_))));
}

#[test]
fn per_bin_utilization_reports_its_own_overflow() {
    let mut cfg = mixed_config(2);
    cfg.white_space = WhiteSpace::PerBin { utilization: 0.8 };
    let out = generate_ms(&cfg).unwrap();
    let sov = out.certificate.header.sov_per_bin.unwrap();
    assert!(sov > 0.0);
    let report = evaluate(&out.bundle, Some(&out.certificate), Some(UtilizationConfig { target: 0.8, bin_rows: 10.0 }), None, Execution::default())
        .unwrap();
    assert!((report.sov_per_bin.unwrap() - sov).abs() < 1e-9);
    assert!((report.sratio.unwrap() - out.certificate.rho()).abs() < 1e-9);
    assert!(out.stats.per_bin.iter().all(|b| b.placed_white <= b.target_white));
}

#[test]
fn chains_validate_and_stay_exact() {
    let mut cfg = MsConfig::new("chains", DegreeHistogram::from_pairs([(2, 2500), (3, 800), (4, 300)]), 3000);
    cfg.chains.enabled = true;
    cfg.chains.pads = 16;
    let out = generate_ms(&cfg).unwrap();
    assert!(out.stats.chain_nets > 0);
    let chained = out.certificate.nets.iter().filter(|r| r.chain.is_some());
    for r in chained {
        assert_eq!(r.attained, r.bound);
    }
    assert!(connectivity_check(&out.bundle.netlist).connected);
}

#[test]
fn tiny_instances_meet_the_oracle() {
    let mut checked = 0;
    for seed in 0..30 {
        let Some(out) = tiny_instance(seed) else { continue };
        let bound = out.certificate.header.bound_total as f64;
        assert_eq!(out.certificate.rho(), 1.0, "seed {seed}");
        assert_eq!(oracle_optimum(&out), bound, "seed {seed}");
        checked += 1;
    }
    assert!(checked >= 15, "only {checked} tiny instances generated");
}

#[test]
fn monotone_rewrite_conserves_the_seed() {
    let seed = clustered_seed(&SeedSpec::typical("seed", 1500, 7));
    let out = generate_mc(&seed, &McConfig::default()).unwrap();
    let (nl, pl) = (&out.bundle.netlist, &out.bundle.placement);
    assert_eq!(nl.nets.len(), seed.netlist.nets.len());
    assert_eq!(DegreeHistogram::of_netlist(nl), DegreeHistogram::of_netlist(&seed.netlist));
    assert_eq!(pl, &seed.placement);
    assert_eq!(nl.modules, seed.netlist.modules);
    for chain in &out.chains {
        validate_chain(chain, nl, pl).unwrap();
    }
    assert_eq!(out.certificate.rho(), 1.0);
    assert_eq!(total_hpwl(nl, pl).unwrap(), out.certificate.attained_length());
    assert!(out.stats.nonlocal_fraction() >= 0.5, "{}", out.stats.nonlocal_fraction());
}

#[test]
fn monotone_rewrite_leaves_all_local_input_alone() {
    let b = fixture("ms_uniform");
    let out = generate_mc(&b, &McConfig::default()).unwrap();
    assert_eq!(out.bundle.netlist, b.netlist);
    assert_eq!(out.stats.replaced, 0);
}

#[test]
fn monotone_rewrite_rejects_off_grid_pins() {
    let b = fixture("hand_tiny");
    assert!(matches!(generate_mc(&b, &McConfig::default()), Err(Error::NotGridIntegral { .. })));
}

#[test]
fn ogp_sweep_writes_bundles_and_manifest() {
    let b = fixture("ms_perbin");
    let cert = optbench::certificate::OptimalityCertificate::read(fixture_dir().join("ms_perbin/ms_perbin.cert.json")).unwrap();
    let tmp = tempfile::tempdir().unwrap();
    let m = ogp_sweep(&b, &cert, None, &[(1.0, 1.0), (2.0, 2.0), (4.0, 4.0)], SnapMode::FixMacros, tmp.path()).unwrap();
    assert_eq!(m.entries.len(), 3);
    assert!(tmp.path().join("ogp_manifest.json").exists());
    assert_eq!(m.entries[0].max_displacement, (0.0, 0.0));
    assert!(m.entries[1].max_displacement.0 <= 1.0 && m.entries[1].max_displacement.1 <= 1.0);
    let snapped = optbench::bookshelf::parse_bundle(&m.entries[2].files[0]).unwrap();
    for (i, module) in b.netlist.modules.iter().enumerate() {
        if module.kind == ModuleKind::Macro {
            assert_eq!(snapped.placement.get(ModuleId(i)), b.placement.get(ModuleId(i)));
        }
    }
}

#[test]
fn self_evaluation_reproduces_rho() {
    for (b, cert) in certified_fixtures() {
        let r = evaluate(&b, Some(&cert), None, Some(&b), Execution::Sequential).unwrap();
        assert!((r.hratio.unwrap() - cert.rho()).abs() < 1e-12, "{}", b.name);
        assert_eq!(r.displacement.unwrap().max, 0.0);
        let l = r.locality.unwrap();
        assert_eq!(l.nonlocal_nets, cert.header.nonlocal_nets);
    }
}
