// SPDX-License-Identifier: Apache-2.0

//! Reader and writer for the Bookshelf placement format family
//! (`.aux`, `.nodes`, `.nets`, `.pl`, `.scl`).
//!
//! Records are whitespace separated and `#` starts a comment. Fixed nodes
//! carry the `terminal` keyword in `.nodes`; nets are written as
//! `NetDegree : k name` followed by `k` pin lines `node dir : dx dy`, with
//! offsets measured from the node center. Numbers are written with the
//! shortest representation that parses back to the same `f64`, so a written
//! bundle re-reads to an identical data model.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use log::warn;
use serde::{Deserialize, Serialize};

use crate::geom::BoxF;
use crate::netlist::{
    DegreeHistogram, Frame, Module, ModuleId, ModuleKind, Net, Netlist, Pin, PinDirection, Placement,
};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub y: f64,
    pub height: f64,
    pub site_width: f64,
    pub site_spacing: f64,
    pub orient: String,
    pub symmetry: String,
    pub x: f64,
    pub num_sites: u64,
}

impl Row {
    pub fn x_end(&self) -> f64 {
        self.x + self.num_sites as f64 * self.site_spacing
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkBundle {
    pub name: String,
    pub netlist: Netlist,
    pub placement: Placement,
    pub rows: Vec<Row>,
    /// Files the bundle was read from; empty for generated bundles.
    pub sources: Vec<PathBuf>,
}

impl BenchmarkBundle {
    /// Same data model, ignoring where it was read from.
    pub fn same_model(&self, other: &BenchmarkBundle) -> bool {
        self.name == other.name
            && self.netlist == other.netlist
            && self.placement == other.placement
            && self.rows == other.rows
    }
}

/// Rows of `height` covering `region`, sites `site` wide.
pub fn uniform_rows(region: BoxF, height: f64, site: f64) -> Vec<Row> {
    let n = (region.height() / height).round() as u64;
    let sites = (region.width() / site).round() as u64;
    (0..n)
        .map(|i| Row {
            y: region.ylo + i as f64 * height,
            height,
            site_width: site,
            site_spacing: site,
            orient: "1".into(),
            symmetry: "1".into(),
            x: region.xlo,
            num_sites: sites,
        })
        .collect()
}

pub fn extract_degree_histogram(netlist: &Netlist) -> DegreeHistogram {
    DegreeHistogram::of_netlist(netlist)
}

struct Lines<'a> {
    path: &'a Path,
    iter: std::iter::Peekable<std::iter::Enumerate<std::str::Lines<'a>>>,
}

impl<'a> Lines<'a> {
    fn new(path: &'a Path, text: &'a str) -> Self {
        Lines { path, iter: text.lines().enumerate().peekable() }
    }

    /// Next non-empty line with comments stripped, as (1-based line no, tokens).
    fn next_record(&mut self) -> Option<(usize, Vec<&'a str>)> {
        for (i, raw) in self.iter.by_ref() {
            let line = raw.split('#').next().unwrap_or("");
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.is_empty() || toks[0] == "UCLA" {
                continue;
            }
            return Some((i + 1, toks));
        }
        None
    }

    fn err(&self, line: usize, msg: impl Into<String>) -> Error {
        Error::Parse { path: self.path.to_path_buf(), line, msg: msg.into() }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn num(lines: &Lines, line: usize, tok: Option<&&str>) -> Result<f64> {
    let t = tok.ok_or_else(|| lines.err(line, "missing number"))?;
    t.parse().map_err(|_| lines.err(line, format!("bad number `{t}`")))
}

/// `Key : value` header; returns the value token when the key matches.
fn header_value<'a>(toks: &[&'a str], key: &str) -> Option<&'a str> {
    if !toks[0].eq_ignore_ascii_case(key) {
        return None;
    }
    match toks.get(1) {
        Some(&":") => toks.get(2).copied(),
        other => other.copied(),
    }
}

pub fn parse_bundle(aux: impl AsRef<Path>) -> Result<BenchmarkBundle> {
    let aux = aux.as_ref();
    let text = read(aux)?;
    let dir = aux.parent().unwrap_or(Path::new("."));
    let mut files: HashMap<&str, PathBuf> = HashMap::new();
    let mut lines = Lines::new(aux, &text);
    while let Some((_, toks)) = lines.next_record() {
        for t in toks.iter().skip_while(|t| **t != ":").skip(1) {
            if let Some(ext) = Path::new(t).extension().and_then(|e| e.to_str()) {
                for known in ["nodes", "nets", "pl", "scl"] {
                    if ext == known {
                        files.insert(known, dir.join(t));
                    }
                }
            }
        }
    }
    let get = |k: &str| {
        files.get(k).cloned().ok_or_else(|| Error::Parse { path: aux.to_path_buf(), line: 1, msg: format!("no .{k} file listed") })
    };
    let nodes_path = get("nodes")?;
    let nets_path = get("nets")?;
    let pl_path = get("pl")?;
    let scl_path = files.get("scl").cloned();

    let rows = match &scl_path {
        Some(p) => parse_scl(p, &read(p)?)?,
        None => Vec::new(),
    };
    let mut modules = parse_nodes(&nodes_path, &read(&nodes_path)?)?;
    let row_height = rows.first().map(|r| r.height).unwrap_or_else(|| {
        modules.iter().filter(|m| m.movable).map(|m| m.height).fold(f64::INFINITY, f64::min)
    });
    let row_height = if row_height.is_finite() && row_height > 0.0 { row_height } else { 1.0 };
    for m in &mut modules {
        m.kind = if m.height > row_height {
            ModuleKind::Macro
        } else if !m.movable {
            ModuleKind::Terminal
        } else {
            ModuleKind::StandardCell
        };
    }
    let mut netlist = Netlist::new(BoxF::new(0.0, 0.0, 0.0, 0.0));
    netlist.modules = modules;
    let index: HashMap<String, ModuleId> = netlist.module_index().into_iter().map(|(k, v)| (k.to_string(), v)).collect();
    netlist.nets = parse_nets(&nets_path, &read(&nets_path)?, &index)?;

    let frame = Frame { grid_unit: rows.first().map_or(1.0, |r| r.site_width), row_height };
    let placement = parse_pl(&pl_path, &read(&pl_path)?, &index, frame)?;
    netlist.region = region_of(&rows, &netlist, &placement);

    let name = aux.file_stem().and_then(|s| s.to_str()).unwrap_or("bundle").to_string();
    let mut sources = vec![aux.to_path_buf(), nodes_path, nets_path, pl_path];
    sources.extend(scl_path);
    Ok(BenchmarkBundle { name, netlist, placement, rows, sources })
}

/// Reads a `.pl` file against an already parsed netlist, for scoring a
/// placement produced by another tool.
pub fn parse_placement(pl: impl AsRef<Path>, netlist: &Netlist, frame: Frame) -> Result<Placement> {
    let pl = pl.as_ref();
    let index: HashMap<String, ModuleId> = netlist.module_index().into_iter().map(|(k, v)| (k.to_string(), v)).collect();
    parse_pl(pl, &read(pl)?, &index, frame)
}

fn region_of(rows: &[Row], netlist: &Netlist, placement: &Placement) -> BoxF {
    if !rows.is_empty() {
        let mut r = BoxF::new(f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
        for row in rows {
            r.xlo = r.xlo.min(row.x);
            r.xhi = r.xhi.max(row.x_end());
            r.ylo = r.ylo.min(row.y);
            r.yhi = r.yhi.max(row.y + row.height);
        }
        return r;
    }
    let mut r = BoxF::new(f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for i in 0..netlist.modules.len() {
        if let Some(b) = placement.module_box(netlist, ModuleId(i)) {
            r.xlo = r.xlo.min(b.xlo);
            r.ylo = r.ylo.min(b.ylo);
            r.xhi = r.xhi.max(b.xhi);
            r.yhi = r.yhi.max(b.yhi);
        }
    }
    if r.xlo.is_finite() {
        r
    } else {
        BoxF::new(0.0, 0.0, 0.0, 0.0)
    }
}

fn parse_nodes(path: &Path, text: &str) -> Result<Vec<Module>> {
    let mut lines = Lines::new(path, text);
    let mut out = Vec::new();
    while let Some((ln, toks)) = lines.next_record() {
        if header_value(&toks, "NumNodes").is_some() || header_value(&toks, "NumTerminals").is_some() {
            continue;
        }
        if toks.len() < 3 {
            return Err(lines.err(ln, "node record needs name, width, height"));
        }
        let width = num(&lines, ln, toks.get(1))?;
        let height = num(&lines, ln, toks.get(2))?;
        let annotations: Vec<String> = toks[3..].iter().map(|s| s.to_string()).collect();
        let movable = !annotations.iter().any(|a| a.starts_with("terminal"));
        out.push(Module { name: toks[0].to_string(), kind: ModuleKind::StandardCell, width, height, movable, annotations });
    }
    Ok(out)
}

fn parse_nets(path: &Path, text: &str, index: &HashMap<String, ModuleId>) -> Result<Vec<Net>> {
    let mut lines = Lines::new(path, text);
    let mut nets = Vec::new();
    let mut dropped = 0usize;
    while let Some((ln, toks)) = lines.next_record() {
        if header_value(&toks, "NumNets").is_some() || header_value(&toks, "NumPins").is_some() {
            continue;
        }
        let Some(deg) = header_value(&toks, "NetDegree") else {
            return Err(lines.err(ln, format!("expected NetDegree, found `{}`", toks.join(" "))));
        };
        let degree: usize = deg.parse().map_err(|_| lines.err(ln, format!("bad degree `{deg}`")))?;
        let name_at = if toks.get(1) == Some(&":") { 3 } else { 2 };
        let name = toks.get(name_at).map_or_else(|| format!("net{}", nets.len() + dropped), |s| s.to_string());
        let mut pins = Vec::with_capacity(degree);
        for _ in 0..degree {
            let (pl, pt) = lines.next_record().ok_or_else(|| lines.err(ln, format!("net `{name}` ends early")))?;
            let module = *index.get(pt[0]).ok_or_else(|| lines.err(pl, format!("undeclared node `{}`", pt[0])))?;
            let direction = pt.get(1).and_then(|d| PinDirection::parse(d)).unwrap_or(PinDirection::Bidirectional);
            let colon = pt.iter().position(|t| *t == ":");
            let (dx, dy) = match colon {
                Some(c) => (num(&lines, pl, pt.get(c + 1))?, num(&lines, pl, pt.get(c + 2))?),
                None => (0.0, 0.0),
            };
            pins.push(Pin { module, direction, dx, dy });
        }
        if degree < 2 {
            warn!("{}:{ln}: dropping net `{name}` of degree {degree}", path.display());
            dropped += 1;
            continue;
        }
        nets.push(Net { name, pins });
    }
    Ok(nets)
}

fn parse_pl(path: &Path, text: &str, index: &HashMap<String, ModuleId>, frame: Frame) -> Result<Placement> {
    let mut lines = Lines::new(path, text);
    let mut placement = Placement::new(index.len(), frame);
    while let Some((ln, toks)) = lines.next_record() {
        if toks.len() < 3 {
            return Err(lines.err(ln, "placement record needs name, x, y"));
        }
        let id = *index.get(toks[0]).ok_or_else(|| lines.err(ln, format!("undeclared node `{}`", toks[0])))?;
        let x = num(&lines, ln, toks.get(1))?;
        let y = num(&lines, ln, toks.get(2))?;
        placement.set(id, x, y);
        if let Some(c) = toks.iter().position(|t| *t == ":") {
            if let Some(o) = toks.get(c + 1) {
                placement.orientations[id.0] = o.to_string();
            }
        }
    }
    Ok(placement)
}

fn parse_scl(path: &Path, text: &str) -> Result<Vec<Row>> {
    let mut lines = Lines::new(path, text);
    let mut rows = Vec::new();
    let mut cur: Option<Row> = None;
    while let Some((ln, toks)) = lines.next_record() {
        let key = toks[0].to_ascii_lowercase();
        let val = |i: usize| toks.iter().filter(|t| **t != ":").nth(i).copied();
        match key.as_str() {
            "numrows" => {}
            "corerow" => {
                cur = Some(Row {
                    y: 0.0,
                    height: 1.0,
                    site_width: 1.0,
                    site_spacing: 1.0,
                    orient: "1".into(),
                    symmetry: "1".into(),
                    x: 0.0,
                    num_sites: 0,
                })
            }
            "end" => {
                rows.push(cur.take().ok_or_else(|| lines.err(ln, "End without CoreRow"))?);
            }
            _ => {
                let row = cur.as_mut().ok_or_else(|| lines.err(ln, format!("`{}` outside CoreRow", toks[0])))?;
                let parse = |t: Option<&str>| -> Result<f64> {
                    let t = t.ok_or_else(|| lines.err(ln, "missing value"))?;
                    t.parse().map_err(|_| lines.err(ln, format!("bad number `{t}`")))
                };
                match key.as_str() {
                    "coordinate" => row.y = parse(val(1))?,
                    "height" => row.height = parse(val(1))?,
                    "sitewidth" => row.site_width = parse(val(1))?,
                    "sitespacing" => row.site_spacing = parse(val(1))?,
                    "siteorient" | "siteorientation" => row.orient = val(1).unwrap_or("1").to_string(),
                    "sitesymmetry" => row.symmetry = val(1).unwrap_or("1").to_string(),
                    "subroworigin" => {
                        row.x = parse(val(1))?;
                        if let Some(k) = val(2) {
                            if k.eq_ignore_ascii_case("numsites") {
                                row.num_sites = parse(val(3))? as u64;
                            }
                        }
                    }
                    _ => warn!("{}:{ln}: ignoring `{}`", path.display(), toks[0]),
                }
            }
        }
    }
    Ok(rows)
}

fn write_file(path: &Path, body: &str) -> Result<()> {
    fs::write(path, body).map_err(|e| Error::io(path, e))
}

/// Writes `<name>.aux/.nodes/.nets/.pl/.scl` into `dir`.
pub fn write_bundle(bundle: &BenchmarkBundle, dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let name = &bundle.name;
    let nl = &bundle.netlist;
    let mut out = Vec::new();

    let mut emit = |ext: &str, body: String| -> Result<()> {
        let p = dir.join(format!("{name}.{ext}"));
        write_file(&p, &body)?;
        out.push(p);
        Ok(())
    };

    emit("aux", format!("RowBasedPlacement : {name}.nodes {name}.nets {name}.pl {name}.scl\n"))?;

    let mut s = String::from("UCLA nodes 1.0\n\n");
    let terminals = nl.modules.iter().filter(|m| !m.movable).count();
    writeln!(s, "NumNodes : {}\nNumTerminals : {}", nl.modules.len(), terminals).unwrap();
    for m in &nl.modules {
        write!(s, "\t{}\t{}\t{}", m.name, m.width, m.height).unwrap();
        if !m.annotations.is_empty() {
            write!(s, "\t{}", m.annotations.join(" ")).unwrap();
        } else if !m.movable {
            s.push_str("\tterminal");
        }
        s.push('\n');
    }
    emit("nodes", s)?;

    let mut s = String::from("UCLA nets 1.0\n\n");
    writeln!(s, "NumNets : {}\nNumPins : {}", nl.nets.len(), nl.pin_count()).unwrap();
    for net in &nl.nets {
        writeln!(s, "NetDegree : {} {}", net.degree(), net.name).unwrap();
        for p in &net.pins {
            writeln!(s, "\t{} {} : {} {}", nl.module(p.module).name, p.direction.as_str(), p.dx, p.dy).unwrap();
        }
    }
    emit("nets", s)?;

    let mut s = String::from("UCLA pl 1.0\n\n");
    for (i, m) in nl.modules.iter().enumerate() {
        if let Some((x, y)) = bundle.placement.positions[i] {
            write!(s, "{}\t{}\t{}\t: {}", m.name, x, y, bundle.placement.orientations[i]).unwrap();
            if !m.movable {
                let ni = m.annotations.iter().any(|a| a == "terminal_NI");
                s.push_str(if ni { " /FIXED_NI" } else { " /FIXED" });
            }
            s.push('\n');
        }
    }
    emit("pl", s)?;

    let mut s = String::from("UCLA scl 1.0\n\n");
    writeln!(s, "NumRows : {}\n", bundle.rows.len()).unwrap();
    for r in &bundle.rows {
        writeln!(s, "CoreRow Horizontal").unwrap();
        writeln!(s, "  Coordinate    :   {}", r.y).unwrap();
        writeln!(s, "  Height        :   {}", r.height).unwrap();
        writeln!(s, "  Sitewidth     :   {}", r.site_width).unwrap();
        writeln!(s, "  Sitespacing   :   {}", r.site_spacing).unwrap();
        writeln!(s, "  Siteorient    :   {}", r.orient).unwrap();
        writeln!(s, "  Sitesymmetry  :   {}", r.symmetry).unwrap();
        writeln!(s, "  SubrowOrigin  :   {}\tNumSites  :  {}", r.x, r.num_sites).unwrap();
        writeln!(s, "End").unwrap();
    }
    emit("scl", s)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(dir: &Path, name: &str, body: &str) {
        fs::write(dir.join(name), body).unwrap();
    }

    fn tiny(dir: &Path, nets: &str) -> PathBuf {
        write(dir, "t.aux", "RowBasedPlacement : t.nodes t.nets t.wts t.pl t.scl\n");
        write(
            dir,
            "t.nodes",
            "UCLA nodes 1.0\n# comment\nNumNodes : 3\nNumTerminals : 1\n a 1 1\n b 2 1\n M 4 10 terminal\n",
        );
        write(dir, "t.nets", nets);
        write(dir, "t.pl", "UCLA pl 1.0\n a 0 0 : N\n b 1 0 : N\n M 3 0 : N /FIXED\n");
        write(
            dir,
            "t.scl",
            "UCLA scl 1.0\nNumRows : 1\nCoreRow Horizontal\n Coordinate : 0\n Height : 1\n Sitewidth : 1\n Sitespacing : 1\n Siteorient : 1\n Sitesymmetry : 1\n SubrowOrigin : 0 NumSites : 8\nEnd\n",
        );
        dir.join("t.aux")
    }

    #[test]
    fn parses_handcrafted_bundle() {
        let d = tempfile::tempdir().unwrap();
        let aux = tiny(
            d.path(),
            "UCLA nets 1.0\nNumNets : 2\nNumPins : 5\nNetDegree : 2 n0\n a I : 0 0\n b O : 0.5 0\nNetDegree : 3 n1\n a I\n b I\n M O : -1 4\n",
        );
        let b = parse_bundle(&aux).unwrap();
        assert_eq!(b.netlist.modules.len(), 3);
        assert_eq!(b.netlist.nets.len(), 2);
        assert_eq!(b.netlist.modules[2].kind, ModuleKind::Macro);
        assert!(!b.netlist.modules[2].movable);
        assert_eq!(b.netlist.nets[1].pins[2].dy, 4.0);
        let h = extract_degree_histogram(&b.netlist);
        assert_eq!((h.get(2), h.get(3)), (1, 1));
        assert_eq!(b.netlist.region, BoxF::new(0.0, 0.0, 8.0, 1.0));
    }

    #[test]
    fn undeclared_node_is_named() {
        let d = tempfile::tempdir().unwrap();
        let aux = tiny(d.path(), "UCLA nets 1.0\nNetDegree : 2 n0\n a I\n ghost I\n");
        let err = parse_bundle(&aux).unwrap_err().to_string();
        assert!(err.contains("ghost"), "{err}");
        assert!(err.contains("t.nets:4"), "{err}");
    }

    #[test]
    fn degree_one_nets_are_dropped() {
        let d = tempfile::tempdir().unwrap();
        let aux = tiny(d.path(), "UCLA nets 1.0\nNetDegree : 1 lone\n a I\nNetDegree : 2 n0\n a I\n b I\n");
        let b = parse_bundle(&aux).unwrap();
        assert_eq!(b.netlist.nets.len(), 1);
        assert_eq!(b.netlist.nets[0].name, "n0");
    }

    #[test]
    fn round_trip_is_stable() {
        let d = tempfile::tempdir().unwrap();
        let aux = tiny(d.path(), "UCLA nets 1.0\nNetDegree : 2 n0\n a I : 0.25 -0.5\n M B : 1 1\n");
        let b1 = parse_bundle(&aux).unwrap();
        let o1 = d.path().join("o1");
        write_bundle(&b1, &o1).unwrap();
        let b2 = parse_bundle(o1.join("t.aux")).unwrap();
        assert!(b1.same_model(&b2));
        let o2 = d.path().join("o2");
        write_bundle(&b2, &o2).unwrap();
        for ext in ["aux", "nodes", "nets", "pl", "scl"] {
            let f = format!("t.{ext}");
            assert_eq!(fs::read(o1.join(&f)).unwrap(), fs::read(o2.join(&f)).unwrap(), "{f}");
        }
    }

    #[test]
    fn missing_file_is_io_error() {
        assert!(matches!(parse_bundle("/nonexistent/x.aux"), Err(Error::Io { .. })));
    }
}
