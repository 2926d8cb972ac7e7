// SPDX-License-Identifier: Apache-2.0

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use optbench::bookshelf::parse_bundle;
use optbench::certificate::OptimalityCertificate;

fn optbench(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_optbench"))
        .arg("-o")
        .arg(out)
        .args(args)
        .env_remove("OPTBENCH_OUT")
        .output()
        .expect("binary runs")
}

fn ok(out: &Path, args: &[&str]) -> String {
    let o = optbench(out, args);
    assert!(o.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout).unwrap()
}

/// Bundle and certificate files of `dir`, by name.
fn bundle_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| {
            let name = p.file_name().unwrap().to_string_lossy().into_owned();
            ["aux", "nodes", "nets", "pl", "scl"].iter().any(|e| name.ends_with(&format!(".{e}"))) || name.ends_with(".cert.json")
        })
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    out.sort();
    out
}

fn aux(out: &Path, name: &str) -> PathBuf {
    out.join(name).join(format!("{name}.aux"))
}

fn cert(out: &Path, name: &str) -> OptimalityCertificate {
    OptimalityCertificate::read(out.join(name).join(format!("{name}.cert.json"))).unwrap()
}

const SMALL: &[&str] = &["gen-ms", "--cells", "120", "--histogram", "2:80,3:30,4:10", "--white-space", "0.2", "--name", "small", "--seed", "3"];

#[test]
fn gen_ms_is_deterministic_and_manifest_replays() {
    let (a, b, c) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    ok(a.path(), SMALL);
    ok(b.path(), SMALL);
    let first = bundle_files(&a.path().join("small"));
    assert!(first.len() >= 6);
    assert_eq!(first, bundle_files(&b.path().join("small")));

    let manifest = a.path().join("small").join("small.manifest.json");
    ok(c.path(), &["gen-ms", "--config", manifest.to_str().unwrap()]);
    assert_eq!(first, bundle_files(&c.path().join("small")));
}

#[test]
fn white_space_sweep_writes_one_bundle_per_value() {
    let out = tempfile::tempdir().unwrap();
    let stdout = ok(out.path(), &["gen-ms", "--cells", "100", "--histogram", "2:60,3:30", "--white-space", "0.05,0.2,max", "--name", "sw"]);
    assert_eq!(stdout.lines().filter(|l| l.contains("rho=")).count(), 3);
    let dirs: Vec<PathBuf> = fs::read_dir(out.path()).unwrap().map(|e| e.unwrap().path()).filter(|p| p.is_dir()).collect();
    assert_eq!(dirs.len(), 3);
    for d in dirs {
        let name = d.file_name().unwrap().to_string_lossy().into_owned();
        assert!(name.starts_with("sw_ws"), "{name}");
        parse_bundle(d.join(format!("{name}.aux"))).unwrap();
    }
}

#[test]
fn pack_keeps_white_space_in_the_right_half() {
    let out = tempfile::tempdir().unwrap();
    ok(out.path(), &["gen-ms", "--cells", "80", "--histogram", "2:50,3:20", "--pack", "--name", "p"]);
    let b = parse_bundle(aux(out.path(), "p")).unwrap();
    let u = b.placement.frame.grid_unit;
    let (w, h) = ((b.netlist.region.width() / u) as i64, (b.netlist.region.height() / u) as i64);
    let occupied: std::collections::HashSet<(i64, i64)> = b
        .placement
        .positions
        .iter()
        .flatten()
        .map(|&(x, y)| ((x / u).round() as i64, (y / u).round() as i64))
        .collect();
    for x in 0..w / 2 {
        for y in 0..h {
            assert!(occupied.contains(&(x, y)), "white cell at ({x}, {y}) in the packed half");
        }
    }
    assert_eq!(cert(out.path(), "p").rho(), 1.0);
}

#[test]
fn gen_mc_synthetic_keeps_the_seed_placement() {
    let out = tempfile::tempdir().unwrap();
    ok(out.path(), &["gen-mc", "--synthetic", "300", "--seed", "5", "--name", "mc"]);
    let dir = out.path().join("mc");
    assert!(dir.join("mc.mc_stats.csv").exists());
    let made = parse_bundle(aux(out.path(), "mc")).unwrap();
    let seed_aux = fs::read_dir(dir.join("seed"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .find(|p| p.extension().is_some_and(|e| e == "aux"))
        .unwrap();
    let seed = parse_bundle(seed_aux).unwrap();
    assert_eq!(made.placement.positions, seed.placement.positions);
    assert_eq!(made.netlist.nets.len(), seed.netlist.nets.len());
    assert_eq!(cert(out.path(), "mc").rho(), 1.0);
}

#[test]
fn ogp_unit_bins_are_identity() {
    let out = tempfile::tempdir().unwrap();
    ok(out.path(), SMALL);
    let stdout = ok(out.path(), &["ogp", "--aux", aux(out.path(), "small").to_str().unwrap(), "--bins", "1x1,2x2", "--move-all"]);
    assert!(stdout.contains("bins=1x1 max_displacement=(0, 0)"), "{stdout}");
    let src = parse_bundle(aux(out.path(), "small")).unwrap();
    let one = parse_bundle(aux(out.path(), "small_ogp1x1")).unwrap();
    assert_eq!(one.placement.positions, src.placement.positions);
    assert!(out.path().join("ogp_manifest.json").exists());
}

#[test]
fn eval_of_a_generated_bundle_reports_its_certificate_ratio() {
    let out = tempfile::tempdir().unwrap();
    ok(out.path(), &["gen-ms", "--cells", "150", "--histogram", "2:120,3:40,9:8", "--white-space", "0.3", "--name", "e", "--seed", "9"]);
    let rho = cert(out.path(), "e").rho();
    let a = aux(out.path(), "e");
    let c = out.path().join("e").join("e.cert.json");
    ok(out.path(), &["eval", "--aux", a.to_str().unwrap(), "--cert", c.to_str().unwrap()]);
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.path().join("e.eval.json")).unwrap()).unwrap();
    let hratio = report["hratio"].as_f64().unwrap();
    assert!((hratio - rho).abs() < 1e-12, "{hratio} vs {rho}");
    let csv = fs::read_to_string(out.path().join("report.csv")).unwrap();
    assert!(csv.starts_with("name,HPWL,Hratio"));
}

#[test]
fn eval_batch_appends_a_median_row() {
    let out = tempfile::tempdir().unwrap();
    let mut auxes = Vec::new();
    let mut certs = Vec::new();
    for (i, name) in ["b0", "b1", "b2"].iter().enumerate() {
        let seed = i.to_string();
        ok(out.path(), &["gen-ms", "--cells", "90", "--histogram", "2:50,3:25", "--name", name, "--seed", &seed]);
        auxes.push(aux(out.path(), name).display().to_string());
        certs.push(out.path().join(name).join(format!("{name}.cert.json")).display().to_string());
    }
    let mut args = vec!["eval", "--median", "--utilization", "0.9", "--report", "batch", "--aux"];
    args.extend(auxes.iter().map(String::as_str));
    args.push("--cert");
    args.extend(certs.iter().map(String::as_str));
    let stdout = ok(out.path(), &args);
    let csv = fs::read_to_string(out.path().join("batch.csv")).unwrap();
    assert_eq!(stdout, csv);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 5);
    assert!(lines[4].starts_with("median,"));
    assert!(out.path().join("batch.manifest.json").exists());
}

#[test]
fn exit_codes_follow_the_error_class() {
    let out = tempfile::tempdir().unwrap();
    let code = |args: &[&str]| optbench(out.path(), args).status.code();
    assert_eq!(code(&["gen-ms", "--cells", "50", "--set", "bogus=1"]), Some(2));
    assert_eq!(code(&["eval", "--aux", "/definitely/missing.aux"]), Some(3));
    let shortfall = ["gen-ms", "--cells", "2", "--histogram", "2:2", "--white-space", "max", "--set", "macros=a:0:0:0.2:0.2;b:0.8:0.8:0.2:0.2"];
    assert_eq!(code(&shortfall), Some(4));
}

#[test]
fn json_errors_are_machine_readable() {
    let out = tempfile::tempdir().unwrap();
    let o = optbench(out.path(), &["--json-errors", "gen-ms", "--cells", "50", "--set", "bogus=1"]);
    assert_eq!(o.status.code(), Some(2));
    let body: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(body["code"], 2);
    assert_eq!(body["kind"], "config");
    assert!(body["error"].as_str().unwrap().contains("bogus"));
}

#[test]
fn output_directory_comes_from_the_environment() {
    let out = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_optbench"))
        .args(["gen-ms", "--cells", "40", "--histogram", "2:50", "--name", "env"])
        .env("OPTBENCH_OUT", out.path())
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(aux(out.path(), "env").exists());
}
