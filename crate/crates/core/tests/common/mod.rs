// SPDX-License-Identifier: Apache-2.0

#![allow(dead_code)]

use std::path::{Path, PathBuf};

use optbench::bookshelf::{parse_bundle, write_bundle, BenchmarkBundle};
use optbench::certificate::OptimalityCertificate;

pub fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

/// Every `.aux` under the fixture directory, sorted.
pub fn fixture_auxes() -> Vec<PathBuf> {
    let mut out = Vec::new();
    for entry in std::fs::read_dir(fixture_dir()).unwrap() {
        let dir = entry.unwrap().path();
        for f in std::fs::read_dir(&dir).unwrap() {
            let p = f.unwrap().path();
            if p.extension().is_some_and(|e| e == "aux") {
                out.push(p);
            }
        }
    }
    out.sort();
    out
}

pub fn fixture(name: &str) -> BenchmarkBundle {
    parse_bundle(fixture_dir().join(name).join(format!("{name}.aux"))).unwrap()
}

/// Certified fixtures: `(bundle, certificate)` for every fixture with a sidecar.
pub fn certified_fixtures() -> Vec<(BenchmarkBundle, OptimalityCertificate)> {
    fixture_auxes()
        .into_iter()
        .filter_map(|aux| {
            let b = parse_bundle(&aux).unwrap();
            let cert = aux.with_file_name(format!("{}.cert.json", b.name));
            cert.exists().then(|| (b, OptimalityCertificate::read(&cert).unwrap()))
        })
        .collect()
}

/// Bytes of every file `write_bundle` produces, in write order.
pub fn written_bytes(bundle: &BenchmarkBundle, dir: &Path) -> Vec<(String, Vec<u8>)> {
    write_bundle(bundle, dir)
        .unwrap()
        .into_iter()
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect()
}

use optbench::eval::oracle::{brute_force_optimum, OracleLimits};
use optbench::mixed_size::{generate_ms, MsConfig, MsOutput, WhiteSpace};
use optbench::DegreeHistogram;

/// A generated instance small enough for the exhaustive oracle: at most 8
/// cells on at most 16 grid sites, local nets only, zero HPWL slack.
pub fn tiny_instance(seed: u64) -> Option<MsOutput> {
    let cells = 3 + (seed % 6) as usize;
    let white = [0.0, 0.1, 0.25, 0.4][(seed / 6 % 4) as usize];
    let mut pairs = vec![(2usize, cells as u64)];
    if cells >= 4 {
        pairs.push((3, 1 + seed % 2));
    }
    if cells >= 6 {
        pairs.push((4, 1));
    }
    let mut cfg = MsConfig::new(format!("tiny{seed}"), DegreeHistogram::from_pairs(pairs), cells);
    cfg.white_space = WhiteSpace::Uniform(white);
    cfg.grid_cap = 16;
    cfg.grow.slack = 0;
    cfg.seed = seed;
    let out = generate_ms(&cfg).ok()?;
    (out.plan.width * out.plan.height <= 16).then_some(out)
}

/// Optimum over every grid site, compared in grid units.
pub fn oracle_optimum(out: &MsOutput) -> f64 {
    let unit = out.bundle.placement.frame.grid_unit;
    let slots: Vec<(f64, f64)> =
        (0..out.plan.height).flat_map(|y| (0..out.plan.width).map(move |x| (x as f64 * unit, y as f64 * unit))).collect();
    brute_force_optimum(&out.bundle.netlist, &out.bundle.placement, &slots, OracleLimits::default()).unwrap().optimum / unit
}

/// The clustered seed netlist kept under `fixtures/mc_seed`.
pub fn seed_fixture() -> BenchmarkBundle {
    parse_bundle(fixture_dir().join("mc_seed").join("seed150.aux")).unwrap()
}
