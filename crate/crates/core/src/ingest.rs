//! Readers for the three input corpora and the dated snapshot layout.
//!
//! * RIB dumps: pipe-delimited one-line format
//!   (`marker|timestamp|type|peer-ip|peer-asn|prefix|as-path|...`). Only
//!   peer-asn, prefix and as-path are consumed.
//! * ROA exports: CSV with header `ASN,IP Prefix,Max Length,Trust Anchor`.
//! * AS relationships: `a|b|-1` (a provides transit to b) or `a|b|0` (peers).
//!
//! Malformed lines are counted and skipped; they never abort a parse. Blank
//! lines are ignored and not counted.

use std::collections::HashSet;
use std::fs::{self, File};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{AsPath, Asn, IpPrefix, RelationshipKind, RoaRecord, RouteEntry};

pub const ROA_HEADER: [&str; 4] = ["ASN", "IP Prefix", "Max Length", "Trust Anchor"];
pub const RIB_FILE: &str = "rib.txt";
pub const ROA_FILE: &str = "roas.csv";
pub const REL_FILE: &str = "as-rel.txt";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestStats {
    pub lines_read: u64,
    pub lines_parsed: u64,
    pub lines_skipped: u64,
    pub canonicalization_warnings: u64,
}

impl IngestStats {
    fn parsed(&mut self) {
        self.lines_read += 1;
        self.lines_parsed += 1;
    }

    fn skipped(&mut self) {
        self.lines_read += 1;
        self.lines_skipped += 1;
    }
}

//------------ RIB -----------------------------------------------------------

fn parse_rib_line(line: &str, stats: &mut IngestStats) -> Option<RouteEntry> {
    let mut fields = line.split('|');
    let peer = fields.nth(4)?.trim();
    let prefix = fields.next()?.trim();
    let path = fields.next()?;

    let peer = if peer.is_empty() {
        None
    } else {
        Some(peer.parse::<Asn>().ok()?)
    };
    let (prefix, masked) = IpPrefix::parse_lenient(prefix).ok()?;
    let path: AsPath = path.parse().ok()?;
    if masked {
        stats.canonicalization_warnings += 1;
    }
    Some(RouteEntry { prefix, path, peer })
}

/// Parses a pipe-delimited RIB dump.
pub fn parse_rib<R: BufRead>(reader: R) -> Result<(Vec<RouteEntry>, IngestStats)> {
    let mut stats = IngestStats::default();
    let mut routes = Vec::new();
    for line in reader.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        match parse_rib_line(&line, &mut stats) {
            Some(route) => {
                routes.push(route);
                stats.parsed();
            }
            None => stats.skipped(),
        }
    }
    if stats.canonicalization_warnings > 0 {
        tracing::warn!(
            count = stats.canonicalization_warnings,
            "RIB prefixes with host bits set were masked"
        );
    }
    Ok((routes, stats))
}

/// Renders a route as a RIB dump line that [`parse_rib`] reads back
/// unchanged.
pub fn rib_line(route: &RouteEntry) -> String {
    let peer = route.peer.map(|a| a.to_string()).unwrap_or_default();
    format!(
        "TABLE_DUMP2|0|B|0.0.0.0|{}|{}|{}|IGP",
        peer, route.prefix, route.path
    )
}

pub fn write_rib<W: Write>(mut out: W, routes: &[RouteEntry]) -> Result<()> {
    for route in routes {
        writeln!(out, "{}", rib_line(route))?;
    }
    Ok(())
}

pub fn read_rib_file(path: &Path) -> Result<(Vec<RouteEntry>, IngestStats)> {
    let file = File::open(path).map_err(|e| Error::file(path, e))?;
    parse_rib(BufReader::new(file))
}

//------------ ROAs ----------------------------------------------------------

fn parse_roa_row(row: &csv::StringRecord, stats: &mut IngestStats) -> Option<RoaRecord> {
    if row.len() != 4 {
        return None;
    }
    let asn: Asn = row[0].trim().parse().ok()?;
    let (prefix, masked) = IpPrefix::parse_lenient(row[1].trim()).ok()?;
    let max_length = match row[2].trim() {
        "" => prefix.len(),
        s => s.parse().ok()?,
    };
    let roa = RoaRecord::new(asn, prefix, max_length, row[3].trim()).ok()?;
    if masked {
        stats.canonicalization_warnings += 1;
    }
    Some(roa)
}

/// Parses a validated-ROA CSV export.
///
/// Identical payloads under different trust anchors stay separate records.
pub fn parse_roas<R: std::io::Read>(reader: R) -> Result<(Vec<RoaRecord>, IngestStats)> {
    let mut csv = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);
    let header = csv.headers().map_err(csv_to_error)?.clone();
    let header_ok =
        header.len() == ROA_HEADER.len() && header.iter().zip(ROA_HEADER).all(|(a, b)| a.trim() == b);
    if !header_ok {
        return Err(Error::Format(format!(
            "ROA file must start with header `{}`",
            ROA_HEADER.join(",")
        )));
    }

    let mut stats = IngestStats::default();
    let mut roas = Vec::new();
    let mut row = csv::StringRecord::new();
    loop {
        match csv.read_record(&mut row) {
            Ok(false) => break,
            Ok(true) => {
                if row.iter().all(|f| f.trim().is_empty()) {
                    continue;
                }
                match parse_roa_row(&row, &mut stats) {
                    Some(roa) => {
                        roas.push(roa);
                        stats.parsed();
                    }
                    None => stats.skipped(),
                }
            }
            Err(e) if e.is_io_error() => return Err(csv_to_error(e)),
            Err(_) => stats.skipped(),
        }
    }
    Ok((roas, stats))
}

fn csv_to_error(e: csv::Error) -> Error {
    if e.is_io_error() {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::Io(io),
            _ => unreachable!(),
        }
    } else {
        Error::Csv(e)
    }
}

pub fn write_roas<W: Write>(out: W, roas: &[RoaRecord]) -> Result<()> {
    let mut csv = csv::Writer::from_writer(out);
    csv.write_record(ROA_HEADER)?;
    for roa in roas {
        csv.write_record([
            format!("AS{}", roa.asn),
            roa.prefix.to_string(),
            roa.max_length.to_string(),
            roa.trust_anchor.clone(),
        ])?;
    }
    csv.flush()?;
    Ok(())
}

pub fn read_roas_file(path: &Path) -> Result<(Vec<RoaRecord>, IngestStats)> {
    let file = File::open(path).map_err(|e| Error::file(path, e))?;
    parse_roas(BufReader::new(file))
}

//------------ Relationships -------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Relationship {
    pub a: Asn,
    pub b: Asn,
    pub kind: RelationshipKind,
}

impl Relationship {
    fn key(&self) -> (Asn, Asn, RelationshipKind) {
        match self.kind {
            RelationshipKind::ProviderOf => (self.a, self.b, self.kind),
            RelationshipKind::PeerWith => (self.a.min(self.b), self.a.max(self.b), self.kind),
        }
    }
}

fn parse_rel_line(line: &str) -> Option<Relationship> {
    let mut fields = line.split('|');
    let a: Asn = fields.next()?.trim().parse().ok()?;
    let b: Asn = fields.next()?.trim().parse().ok()?;
    let kind = match fields.next()?.trim() {
        "-1" => RelationshipKind::ProviderOf,
        "0" => RelationshipKind::PeerWith,
        _ => return None,
    };
    if a == b {
        return None;
    }
    Some(Relationship { a, b, kind })
}

/// Parses relationship lines. Duplicates, including a peering listed in
/// both directions, are dropped. Self-edges and unknown codes are skipped.
pub fn parse_relationships<R: BufRead>(reader: R) -> Result<(Vec<Relationship>, IngestStats)> {
    let mut stats = IngestStats::default();
    let mut seen = HashSet::new();
    let mut edges = Vec::new();
    for line in reader.lines() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        match parse_rel_line(trimmed) {
            Some(rel) => {
                stats.parsed();
                if seen.insert(rel.key()) {
                    edges.push(rel);
                }
            }
            None => stats.skipped(),
        }
    }
    Ok((edges, stats))
}

pub fn write_relationships<W: Write>(mut out: W, edges: &[Relationship]) -> Result<()> {
    for rel in edges {
        let code = match rel.kind {
            RelationshipKind::ProviderOf => "-1",
            RelationshipKind::PeerWith => "0",
        };
        writeln!(out, "{}|{}|{}", rel.a, rel.b, code)?;
    }
    Ok(())
}

pub fn read_relationships_file(path: &Path) -> Result<(Vec<Relationship>, IngestStats)> {
    let file = File::open(path).map_err(|e| Error::file(path, e))?;
    parse_relationships(BufReader::new(file))
}

//------------ Snapshot series -----------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SnapshotRef {
    pub date: NaiveDate,
    pub rib_path: PathBuf,
    pub roa_path: PathBuf,
}

/// Dated snapshots in strictly increasing date order.
#[derive(Clone, Debug)]
pub struct SnapshotSeries {
    pub root: PathBuf,
    pub snapshots: Vec<SnapshotRef>,
    /// `<root>/as-rel.txt`, when present.
    pub relationships: Option<PathBuf>,
}

impl SnapshotSeries {
    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.is_empty()
    }

    pub fn dates(&self) -> Vec<NaiveDate> {
        self.snapshots.iter().map(|s| s.date).collect()
    }
}

/// Loads `<root>/<YYYY-MM-DD>/{rib.txt,roas.csv}`. Dated directories missing
/// either file are excluded with a warning; other entries are ignored.
pub fn load_series(root: &Path) -> Result<SnapshotSeries> {
    let entries = fs::read_dir(root).map_err(|e| Error::file(root, e))?;
    let mut snapshots = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|e| Error::file(root, e))?;
        let path = entry.path();
        if !path.is_dir() {
            continue;
        }
        let Some(date) = path
            .file_name()
            .and_then(|n| n.to_str())
            .and_then(|n| NaiveDate::parse_from_str(n, "%Y-%m-%d").ok())
        else {
            continue;
        };
        let rib_path = path.join(RIB_FILE);
        let roa_path = path.join(ROA_FILE);
        if !rib_path.is_file() || !roa_path.is_file() {
            tracing::warn!(%date, dir = %path.display(), "snapshot excluded: missing {RIB_FILE} or {ROA_FILE}");
            continue;
        }
        snapshots.push(SnapshotRef {
            date,
            rib_path,
            roa_path,
        });
    }
    if snapshots.is_empty() {
        return Err(Error::Config(format!(
            "no usable snapshots under {}",
            root.display()
        )));
    }
    snapshots.sort_by_key(|s| s.date);
    let rel = root.join(REL_FILE);
    Ok(SnapshotSeries {
        root: root.to_path_buf(),
        snapshots,
        relationships: rel.is_file().then_some(rel),
    })
}
