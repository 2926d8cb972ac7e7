// SPDX-License-Identifier: Apache-2.0

//! Flat `key = value` configuration. Later sources override earlier ones:
//! file, then `--set` pairs, then dedicated flags.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use optbench::bookshelf::parse_bundle;
use optbench::geom::BoxF;
use optbench::mixed_size::{MacroSpec, MsConfig, WhiteSpace};
use optbench::monotone_rewrite::seed::SeedSpec;
use optbench::{DegreeHistogram, Error};

pub type KeyValues = BTreeMap<String, String>;

fn config_error(msg: impl Into<String>) -> anyhow::Error {
    Error::Config(msg.into()).into()
}

/// Reads a `key = value` file (`#` starts a comment) or the `config` object
/// of a run manifest.
pub fn load(path: &Path) -> Result<KeyValues> {
    let text = std::fs::read_to_string(path).map_err(|e| anyhow!(Error::Io { path: path.to_path_buf(), source: e }))?;
    if path.extension().is_some_and(|e| e == "json") {
        let v: serde_json::Value = serde_json::from_str(&text).with_context(|| format!("{}", path.display()))?;
        let obj = v.get("config").and_then(|c| c.as_object()).ok_or_else(|| config_error("manifest has no `config` object"))?;
        return Ok(obj.iter().map(|(k, v)| (k.clone(), v.as_str().map_or_else(|| v.to_string(), str::to_string))).collect());
    }
    let mut out = KeyValues::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| config_error(format!("{}:{}: expected key = value", path.display(), i + 1)))?;
        out.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(out)
}

pub fn apply_pairs(kv: &mut KeyValues, pairs: &[String]) -> Result<()> {
    for p in pairs {
        let (k, v) = p.split_once('=').ok_or_else(|| config_error(format!("`{p}` is not key=value")))?;
        kv.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(())
}

fn parse<T: std::str::FromStr>(kv: &KeyValues, key: &str) -> Result<Option<T>> {
    kv.get(key)
        .map(|v| v.parse::<T>().map_err(|_| config_error(format!("bad value `{v}` for `{key}`"))))
        .transpose()
}

fn parse_bool(kv: &KeyValues, key: &str) -> Result<Option<bool>> {
    kv.get(key)
        .map(|v| match v.as_str() {
            "1" | "true" | "yes" | "on" => Ok(true),
            "0" | "false" | "no" | "off" => Ok(false),
            _ => Err(config_error(format!("bad boolean `{v}` for `{key}`"))),
        })
        .transpose()
}

/// `2:100, 3:40` style degree counts.
pub fn parse_histogram(s: &str) -> Result<DegreeHistogram> {
    let mut pairs = Vec::new();
    for item in s.split([',', ' ', ';']).filter(|t| !t.is_empty()) {
        let (k, n) = item.split_once(':').ok_or_else(|| config_error(format!("histogram entry `{item}` is not degree:count")))?;
        let k: usize = k.trim().parse().map_err(|_| config_error(format!("bad degree `{k}`")))?;
        let n: u64 = n.trim().parse().map_err(|_| config_error(format!("bad count `{n}`")))?;
        pairs.push((k, n));
    }
    Ok(DegreeHistogram::from_pairs(pairs))
}

pub fn format_histogram(h: &DegreeHistogram) -> String {
    h.iter().map(|(k, n)| format!("{k}:{n}")).collect::<Vec<_>>().join(",")
}

/// `0.1`, `max`, `pack`, or `util:0.8`.
pub fn parse_white_space(s: &str) -> Result<WhiteSpace> {
    match s {
        "max" => Ok(WhiteSpace::Max),
        "pack" => Ok(WhiteSpace::Packed),
        _ => {
            if let Some(u) = s.strip_prefix("util:") {
                let utilization = u.parse().map_err(|_| config_error(format!("bad utilization `{u}`")))?;
                return Ok(WhiteSpace::PerBin { utilization });
            }
            s.parse().map(WhiteSpace::Uniform).map_err(|_| config_error(format!("bad white space `{s}`")))
        }
    }
}

pub fn format_white_space(w: WhiteSpace) -> String {
    match w {
        WhiteSpace::Uniform(f) => f.to_string(),
        WhiteSpace::Max => "max".into(),
        WhiteSpace::Packed => "pack".into(),
        WhiteSpace::PerBin { utilization } => format!("util:{utilization}"),
    }
}

/// `name:x:y:w:h[:movable]` entries separated by `;`, in region coordinates.
fn parse_macros(s: &str) -> Result<Vec<MacroSpec>> {
    let mut out = Vec::new();
    for item in s.split(';').map(str::trim).filter(|t| !t.is_empty()) {
        let f: Vec<&str> = item.split(':').collect();
        if !(5..=6).contains(&f.len()) {
            bail!(config_error(format!("macro `{item}` is not name:x:y:w:h[:movable]")));
        }
        let n = |i: usize| -> Result<f64> { f[i].parse().map_err(|_| config_error(format!("bad number `{}` in macro `{item}`", f[i]))) };
        out.push(MacroSpec { name: f[0].into(), x: n(1)?, y: n(2)?, width: n(3)?, height: n(4)?, movable: f.get(5) == Some(&"movable") });
    }
    Ok(out)
}

pub const MS_KEYS: &[&str] = &[
    "name",
    "cells",
    "histogram",
    "from_bundle",
    "region",
    "macros",
    "white_space",
    "seed",
    "grid_cap",
    "grid_unit",
    "bin_rows",
    "bin_iteration_limit",
    "big_net_threshold",
    "grow_depth",
    "grow_slack",
    "grow_checks",
    "chains",
    "chain_pads",
    "chain_span",
    "chain_macro_terminals",
];

/// Builds a generator configuration from resolved keys. Returns the config and
/// the keys completed with every value actually used.
pub fn ms_config(kv: &KeyValues) -> Result<(MsConfig, KeyValues)> {
    if let Some(k) = kv.keys().find(|k| !MS_KEYS.contains(&k.as_str())) {
        bail!(config_error(format!("unknown key `{k}`")));
    }
    let name = kv.get("name").cloned().unwrap_or_else(|| "ms".into());
    let mut cfg = match kv.get("from_bundle") {
        Some(aux) => {
            let b = parse_bundle(aux)?;
            let mut c = MsConfig::from_bundle(&b)?;
            c.name = name;
            c
        }
        None => {
            let cells: usize = parse(kv, "cells")?.ok_or_else(|| config_error("`cells` or `from_bundle` is required"))?;
            let hist = match kv.get("histogram") {
                Some(h) => parse_histogram(h)?,
                None => SeedSpec::typical("", cells, 0).histogram,
            };
            MsConfig::new(name, hist, cells)
        }
    };
    if let Some(c) = parse(kv, "cells")? {
        cfg.std_cells = c;
    }
    if let Some(h) = kv.get("histogram") {
        cfg.histogram = parse_histogram(h)?;
    }
    if let Some(r) = kv.get("region") {
        let v: Vec<f64> = r.split(',').map(|t| t.trim().parse()).collect::<Result<_, _>>().map_err(|_| config_error(format!("bad region `{r}`")))?;
        if v.len() != 4 {
            bail!(config_error("region needs xlo,ylo,xhi,yhi"));
        }
        cfg.region = BoxF::new(v[0], v[1], v[2], v[3]);
    }
    if let Some(m) = kv.get("macros") {
        cfg.macros = parse_macros(m)?;
    }
    if let Some(w) = kv.get("white_space") {
        cfg.white_space = parse_white_space(w)?;
    }
    macro_rules! set {
        ($key:literal, $field:expr) => {
            if let Some(v) = parse(kv, $key)? {
                $field = v;
            }
        };
    }
    set!("seed", cfg.seed);
    set!("grid_cap", cfg.grid_cap);
    set!("grid_unit", cfg.grid_unit);
    set!("bin_rows", cfg.bin_rows);
    set!("bin_iteration_limit", cfg.bin_iteration_limit);
    set!("big_net_threshold", cfg.big_net_threshold);
    set!("grow_depth", cfg.grow.full_depth);
    set!("grow_slack", cfg.grow.slack);
    set!("grow_checks", cfg.grow.max_checks);
    set!("chain_pads", cfg.chains.pads);
    set!("chain_span", cfg.chains.span_fraction);
    if let Some(b) = parse_bool(kv, "chains")? {
        cfg.chains.enabled = b;
    }
    if let Some(b) = parse_bool(kv, "chain_macro_terminals")? {
        cfg.chains.fixed_macro_terminals = b;
    }

    let mut resolved = kv.clone();
    let mut put = |k: &str, v: String| {
        resolved.insert(k.to_string(), v);
    };
    put("name", cfg.name.clone());
    put("cells", cfg.std_cells.to_string());
    put("histogram", format_histogram(&cfg.histogram));
    put("seed", cfg.seed.to_string());
    put("white_space", format_white_space(cfg.white_space));
    put("grid_cap", cfg.grid_cap.to_string());
    put("grid_unit", cfg.grid_unit.to_string());
    put("bin_rows", cfg.bin_rows.to_string());
    put("bin_iteration_limit", cfg.bin_iteration_limit.to_string());
    put("big_net_threshold", cfg.big_net_threshold.to_string());
    put("grow_depth", cfg.grow.full_depth.to_string());
    put("grow_slack", cfg.grow.slack.to_string());
    put("grow_checks", cfg.grow.max_checks.to_string());
    put("chains", cfg.chains.enabled.to_string());
    put("chain_pads", cfg.chains.pads.to_string());
    put("chain_span", cfg.chains.span_fraction.to_string());
    put("chain_macro_terminals", cfg.chains.fixed_macro_terminals.to_string());
    Ok((cfg, resolved))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn histogram_round_trip() {
        let h = parse_histogram("2:10, 3:4,7:1").unwrap();
        assert_eq!(h.get(3), 4);
        assert_eq!(format_histogram(&h), "2:10,3:4,7:1");
        assert!(parse_histogram("2-10").is_err());
    }

    #[test]
    fn white_space_forms() {
        assert_eq!(parse_white_space("0.25").unwrap(), WhiteSpace::Uniform(0.25));
        assert_eq!(parse_white_space("max").unwrap(), WhiteSpace::Max);
        assert_eq!(parse_white_space("pack").unwrap(), WhiteSpace::Packed);
        assert_eq!(parse_white_space("util:0.8").unwrap(), WhiteSpace::PerBin { utilization: 0.8 });
        for w in ["0.1", "max", "pack", "util:0.9"] {
            assert_eq!(format_white_space(parse_white_space(w).unwrap()), w);
        }
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let mut kv = KeyValues::new();
        kv.insert("cells".into(), "10".into());
        kv.insert("colour".into(), "red".into());
        assert!(ms_config(&kv).is_err());
    }

    #[test]
    fn resolved_keys_rebuild_the_same_config() {
        let mut kv = KeyValues::new();
        apply_pairs(&mut kv, &["cells=100".into(), "histogram=2:60,3:20".into(), "macros=m:0.1:0.1:0.2:0.3;k:0.5:0.5:0.1:0.1:movable".into()]).unwrap();
        let (a, resolved) = ms_config(&kv).unwrap();
        let (b, again) = ms_config(&resolved).unwrap();
        assert_eq!(a, b);
        assert_eq!(resolved, again);
        assert!(b.macros[1].movable && !b.macros[0].movable);
    }
}
