// SPDX-License-Identifier: Apache-2.0

use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{anyhow, Context, Result};
use rayon::prelude::*;

use optbench::bookshelf::{parse_bundle, parse_placement, write_bundle, BenchmarkBundle};
use optbench::certificate::OptimalityCertificate;
use optbench::eval::report::ReportRow;
use optbench::eval::{displacement_report, evaluate, reports_csv, UtilizationConfig};
use optbench::mixed_size::generate_ms;
use optbench::monotone_rewrite::seed::{clustered_seed, SeedSpec};
use optbench::monotone_rewrite::{generate_mc, McConfig};
use optbench::ogp::{ogp_sweep, SnapMode};
use optbench::par::Execution;
use optbench::Error;

use crate::config::{self, KeyValues};
use crate::manifest::RunManifest;
use crate::{Cli, Command, EvalArgs, GenMcArgs, GenMsArgs, OgpArgs};

pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::GenMs(a) => gen_ms(a, &cli.out),
        Command::GenMc(a) => gen_mc(a, &cli.out),
        Command::Ogp(a) => ogp(a, &cli.out),
        Command::Eval(a) => eval(a, &cli.out),
    }
}

fn core_error(e: &anyhow::Error) -> Option<&Error> {
    e.chain().find_map(|c| c.downcast_ref::<Error>())
}

pub fn exit_code(e: &anyhow::Error) -> u8 {
    match core_error(e) {
        Some(Error::Config(_) | Error::ModuleMismatch { .. } | Error::OracleLimits(_) | Error::ZeroBound(_)) => 2,
        Some(
            Error::Io { .. }
            | Error::Parse { .. }
            | Error::Json(_)
            | Error::Unplaced(_)
            | Error::NotGridIntegral { .. }
            | Error::MissingNet(_),
        ) => 3,
        Some(Error::WhiteSpaceShortfall { .. } | Error::BudgetExhausted { .. } | Error::Stalled { .. }) => 4,
        Some(Error::Certification(_)) => 5,
        Some(_) => 1,
        None if e.chain().any(|c| c.is::<std::io::Error>()) => 3,
        None => 1,
    }
}

pub fn error_kind(e: &anyhow::Error) -> &'static str {
    match exit_code(e) {
        2 => "config",
        3 => "io",
        4 => "shortfall",
        5 => "certification",
        _ => "other",
    }
}

/// The error chain joined by `: `, skipping causes already quoted by the
/// message above them.
pub fn describe(e: &anyhow::Error) -> String {
    let mut out = String::new();
    for cause in e.chain() {
        let msg = cause.to_string();
        if out.ends_with(&msg) {
            continue;
        }
        if !out.is_empty() {
            out.push_str(": ");
        }
        out.push_str(&msg);
    }
    out
}

fn write_text(path: &Path, body: &str) -> Result<PathBuf> {
    std::fs::write(path, body).map_err(|e| Error::Io { path: path.to_path_buf(), source: e })?;
    Ok(path.to_path_buf())
}

/// Writes a bundle and its certificate under `out/<name>/`.
fn emit(bundle: &BenchmarkBundle, cert: &OptimalityCertificate, out: &Path) -> Result<(PathBuf, Vec<PathBuf>)> {
    let dir = out.join(&bundle.name);
    let mut files = write_bundle(bundle, &dir)?;
    let (json, csv) = cert.write(&dir)?;
    files.push(json);
    files.push(csv);
    Ok((dir, files))
}

fn gen_ms(a: &GenMsArgs, out: &Path) -> Result<()> {
    let mut kv = match &a.config {
        Some(p) => config::load(p)?,
        None => KeyValues::new(),
    };
    config::apply_pairs(&mut kv, &a.set)?;
    let mut put = |k: &str, v: Option<String>| {
        if let Some(v) = v {
            kv.insert(k.into(), v);
        }
    };
    put("name", a.name.clone());
    put("seed", a.seed.map(|s| s.to_string()));
    put("cells", a.cells.map(|c| c.to_string()));
    put("histogram", a.histogram.clone());
    put("from_bundle", a.from_bundle.as_ref().map(|p| p.display().to_string()));
    if a.chains {
        kv.insert("chains".into(), "true".into());
    }
    let mut sweep = a.white_space.clone();
    if a.pack {
        sweep.push("pack".into());
    }
    if let Some(u) = a.utilization {
        sweep.push(format!("util:{u}"));
    }
    let base = kv.get("name").cloned().unwrap_or_else(|| "ms".into());
    let items: Vec<KeyValues> = if sweep.is_empty() {
        vec![kv.clone()]
    } else {
        sweep
            .iter()
            .map(|w| {
                let mut k = kv.clone();
                k.insert("white_space".into(), w.clone());
                if sweep.len() > 1 {
                    let tag: String = w.chars().map(|c| if c.is_ascii_alphanumeric() { c } else { '_' }).collect();
                    k.insert("name".into(), format!("{base}_ws{tag}"));
                }
                k
            })
            .collect()
    };
    let results: Vec<Result<()>> = items.par_iter().map(|k| gen_ms_one(k, out)).collect();
    results.into_iter().collect()
}

fn gen_ms_one(kv: &KeyValues, out: &Path) -> Result<()> {
    let start = Instant::now();
    let (cfg, resolved) = config::ms_config(kv)?;
    let result = generate_ms(&cfg).with_context(|| format!("generating `{}`", cfg.name))?;
    let (dir, mut files) = emit(&result.bundle, &result.certificate, out)?;
    let stats = serde_json::json!({ "plan": result.plan, "stats": result.stats, "discarded": result.discarded });
    files.push(write_text(&dir.join(format!("{}.stats.json", cfg.name)), &(serde_json::to_string_pretty(&stats)? + "\n"))?);
    let mut m = RunManifest::new("gen-ms", resolved, Some(cfg.seed));
    m.inputs.extend(kv.get("from_bundle").map(PathBuf::from));
    m.outputs = files;
    m.wall_time_s = start.elapsed().as_secs_f64();
    m.write(&dir, &cfg.name)?;
    println!(
        "{} rho={:.4} grid={}x{} nets={} unmet={}",
        cfg.name,
        result.certificate.rho(),
        result.plan.width,
        result.plan.height,
        result.bundle.netlist.nets.len(),
        result.certificate.header.unmet.iter().map(|(_, n)| n).sum::<u64>()
    );
    Ok(())
}

fn load_bundle(aux: &Path, pl: Option<&Path>) -> Result<BenchmarkBundle> {
    let mut b = parse_bundle(aux)?;
    if let Some(pl) = pl {
        b.placement = parse_placement(pl, &b.netlist, b.placement.frame)?;
    }
    Ok(b)
}

fn gen_mc(a: &GenMcArgs, out: &Path) -> Result<()> {
    let start = Instant::now();
    let mut kv = KeyValues::new();
    let mut inputs = Vec::new();
    let seed_bundle = match (&a.aux, a.synthetic) {
        (Some(aux), _) => {
            kv.insert("aux".into(), aux.display().to_string());
            inputs.push(aux.clone());
            if let Some(pl) = &a.pl {
                kv.insert("pl".into(), pl.display().to_string());
                inputs.push(pl.clone());
            }
            load_bundle(aux, a.pl.as_deref())?
        }
        (None, Some(cells)) => {
            kv.insert("synthetic".into(), cells.to_string());
            clustered_seed(&SeedSpec::typical(format!("seed{cells}"), cells, a.seed))
        }
        (None, None) => return Err(Error::Config("either --aux or --synthetic is required".into()).into()),
    };
    let config = McConfig { seed: a.seed, max_chains_per_terminal: a.max_chains_per_terminal, ..McConfig::default() };
    kv.insert("seed".into(), a.seed.to_string());
    kv.insert("max_chains_per_terminal".into(), a.max_chains_per_terminal.to_string());
    let mut result = generate_mc(&seed_bundle, &config)?;
    result.bundle.name = a.name.clone().unwrap_or_else(|| format!("{}_mc", seed_bundle.name));
    result.certificate.header.name = result.bundle.name.clone();
    let name = result.bundle.name.clone();
    let (dir, mut files) = emit(&result.bundle, &result.certificate, out)?;
    if a.synthetic.is_some() {
        files.extend(write_bundle(&seed_bundle, dir.join("seed"))?);
    }
    files.push(write_text(&dir.join(format!("{name}.mc_stats.csv")), &result.stats.to_csv())?);
    let mut m = RunManifest::new("gen-mc", kv, Some(a.seed));
    m.inputs = inputs;
    m.outputs = files;
    m.wall_time_s = start.elapsed().as_secs_f64();
    m.write(&dir, &name)?;
    println!(
        "{name} rho={:.4} nets={} retained={:.3} nonlocal={:.3} chains={}",
        result.certificate.rho(),
        result.stats.nets,
        result.stats.retained_fraction(),
        result.stats.nonlocal_fraction(),
        result.chains.len()
    );
    Ok(())
}

fn parse_bin(s: &str) -> Result<(f64, f64)> {
    let bad = || anyhow!(Error::Config(format!("bin size `{s}` is not WxH")));
    let (w, h) = s.trim().split_once(['x', 'X']).ok_or_else(bad)?;
    Ok((w.parse().map_err(|_| bad())?, h.parse().map_err(|_| bad())?))
}

fn default_certificate(aux: &Path, name: &str) -> PathBuf {
    aux.with_file_name(format!("{name}.cert.json"))
}

fn ogp(a: &OgpArgs, out: &Path) -> Result<()> {
    let start = Instant::now();
    let bundle = parse_bundle(&a.aux)?;
    let cert_path = a.cert.clone().unwrap_or_else(|| default_certificate(&a.aux, &bundle.name));
    let cert = OptimalityCertificate::read(&cert_path)?;
    let sizes = a.bins.iter().map(|s| parse_bin(s)).collect::<Result<Vec<_>>>()?;
    let mode = if a.move_all { SnapMode::MoveAll } else { SnapMode::FixMacros };
    let manifest = ogp_sweep(&bundle, &cert, Some(&cert_path), &sizes, mode, out)?;
    let mut kv = KeyValues::new();
    kv.insert("aux".into(), a.aux.display().to_string());
    kv.insert("cert".into(), cert_path.display().to_string());
    kv.insert("bins".into(), a.bins.join(","));
    kv.insert("mode".into(), format!("{mode:?}"));
    let mut m = RunManifest::new("ogp", kv, None);
    m.inputs = vec![a.aux.clone(), cert_path];
    m.outputs = manifest.entries.iter().flat_map(|e| e.files.clone()).collect();
    m.outputs.push(out.join("ogp_manifest.json"));
    m.wall_time_s = start.elapsed().as_secs_f64();
    m.write(out, &format!("{}_ogp", bundle.name))?;
    for e in &manifest.entries {
        println!("{} bins={}x{} max_displacement=({}, {})", e.name, e.bin_w, e.bin_h, e.max_displacement.0, e.max_displacement.1);
    }
    Ok(())
}

fn eval(a: &EvalArgs, out: &Path) -> Result<()> {
    let start = Instant::now();
    if a.pl.is_some() && a.aux.len() != 1 {
        return Err(Error::Config("--pl applies to a single bundle".into()).into());
    }
    if a.cert.len() > 1 && a.cert.len() != a.aux.len() {
        return Err(Error::Config(format!("{} certificates for {} bundles", a.cert.len(), a.aux.len())).into());
    }
    std::fs::create_dir_all(out).map_err(|e| Error::Io { path: out.to_path_buf(), source: e })?;
    let reference = a.reference.as_deref().map(parse_bundle).transpose()?;
    let utilization = a.utilization.map(|target| UtilizationConfig { target, bin_rows: a.bin_rows });
    let jobs: Vec<Result<(ReportRow, Vec<PathBuf>)>> = a
        .aux
        .par_iter()
        .enumerate()
        .map(|(i, aux)| {
            let bundle = load_bundle(aux, a.pl.as_deref())?;
            let cert = match a.cert.len() {
                0 => None,
                1 => Some(OptimalityCertificate::read(&a.cert[0])?),
                _ => Some(OptimalityCertificate::read(&a.cert[i])?),
            };
            // Batch items already run in parallel; score each one sequentially.
            let exec = if a.aux.len() > 1 { Execution::Sequential } else { Execution::Parallel };
            let report = evaluate(&bundle, cert.as_ref(), utilization, reference.as_ref(), exec)?;
            let mut files = Vec::new();
            let stem = out.join(&bundle.name);
            let with = |ext: &str| PathBuf::from(format!("{}.{ext}", stem.display()));
            files.push(write_text(&with("eval.json"), &(serde_json::to_string_pretty(&report)? + "\n"))?);
            if utilization.is_some() {
                files.push(write_text(&with("sigma.csv"), &report.sigma_csv())?);
            }
            if let Some(l) = &report.locality {
                files.push(write_text(&with("locality.csv"), &l.to_csv())?);
            } else if cert.is_none() {
                log::info!("{}: locality needs a certificate or grid-aligned pins", bundle.name);
            }
            if let Some(r) = &reference {
                let d = displacement_report(&bundle.netlist, &bundle.placement, &r.netlist, &r.placement)?;
                files.push(write_text(&with("displacement.csv"), &d.to_csv())?);
            }
            Ok((ReportRow::from(&report), files))
        })
        .collect();
    let mut rows = Vec::new();
    let mut outputs = Vec::new();
    for j in jobs {
        let (row, files) = j?;
        rows.push(row);
        outputs.extend(files);
    }
    let csv = reports_csv(&rows, a.median);
    outputs.push(write_text(&out.join(format!("{}.csv", a.report)), &csv)?);
    let mut kv = KeyValues::new();
    kv.insert("aux".into(), a.aux.iter().map(|p| p.display().to_string()).collect::<Vec<_>>().join(","));
    if let Some(u) = a.utilization {
        kv.insert("utilization".into(), u.to_string());
        kv.insert("bin_rows".into(), a.bin_rows.to_string());
    }
    kv.insert("median".into(), a.median.to_string());
    let mut m = RunManifest::new("eval", kv, None);
    m.inputs = a.aux.iter().chain(&a.cert).chain(a.pl.iter()).chain(a.reference.iter()).cloned().collect();
    m.outputs = outputs;
    m.wall_time_s = start.elapsed().as_secs_f64();
    m.write(out, &a.report)?;
    print!("{csv}");
    Ok(())
}

