//! Report container, JSON/CSV output, and the read-only query service.

mod serve;

pub use serve::{router, serve, serve_blocking, ReportStore, SharedStore};

use std::io::{Read, Write};
use std::str::FromStr;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::classifier::{Classification, ClassifiedInvalid, PredicateVector, ProbeStatus};
use crate::error::{Error, Result};
use crate::model::{AsPath, Asn, InvalidClass, IpPrefix, RoaRecord};
use crate::rov::ValidationSummary;
use crate::stability::{long_lived, stability_report, StabilityReport, Threshold, Timelines};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassCount {
    pub class: InvalidClass,
    pub count: u64,
    pub pct: f64,
}

/// One invalid pair as published.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairRecord {
    pub prefix: IpPrefix,
    pub origin: Asn,
    pub class: InvalidClass,
    pub matched_rule_row: Option<u8>,
    pub path: AsPath,
    pub predicates: PredicateVector,
    pub covering_roas: Vec<RoaRecord>,
    pub relgraph_miss: bool,
    pub probe_status: Option<ProbeStatus>,
    /// Set when the report carries stability data.
    pub long_lived: Option<bool>,
}

impl From<&ClassifiedInvalid> for PairRecord {
    fn from(c: &ClassifiedInvalid) -> Self {
        PairRecord {
            prefix: c.prefix,
            origin: c.origin,
            class: c.class,
            matched_rule_row: c.matched_rule_row,
            path: c.path.clone(),
            predicates: c.vector,
            covering_roas: c.covering_roas.clone(),
            relgraph_miss: c.relgraph_miss,
            probe_status: c.probe_status,
            long_lived: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub date: Option<NaiveDate>,
    pub validation_summary: ValidationSummary,
    /// Every class in rule-table order.
    pub per_class: Vec<ClassCount>,
    pub pairs: Vec<PairRecord>,
    pub stability: Option<StabilityReport>,
}

impl ClassificationReport {
    pub fn new(date: Option<NaiveDate>, classification: &Classification) -> Self {
        let counts = &classification.counts;
        ClassificationReport {
            date,
            validation_summary: classification.summary.clone(),
            per_class: counts
                .iter()
                .map(|(class, count)| ClassCount {
                    class,
                    count,
                    pct: counts.percent(class),
                })
                .collect(),
            pairs: classification.pairs.iter().map(PairRecord::from).collect(),
            stability: None,
        }
    }

    /// Adds the stability section and marks each pair long-lived or not.
    pub fn with_stability(mut self, timelines: &Timelines, threshold: Threshold) -> Self {
        for pair in &mut self.pairs {
            pair.long_lived = Some(
                timelines
                    .get(&pair.prefix, pair.origin)
                    .is_some_and(|t| long_lived(t, threshold)),
            );
        }
        self.stability = Some(stability_report(timelines, threshold));
        self
    }

    pub fn class_count(&self, class: InvalidClass) -> u64 {
        self.per_class
            .iter()
            .find(|c| c.class == class)
            .map_or(0, |c| c.count)
    }

    pub fn from_json<R: Read>(reader: R) -> Result<Self> {
        Ok(serde_json::from_reader(reader)?)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            _ => Err(Error::Config(format!("unknown format {s:?}"))),
        }
    }
}

pub const CSV_COLUMNS: [&str; 7] = [
    "prefix",
    "origin_asn",
    "class",
    "matched_roas",
    "long_lived",
    "relgraph_miss",
    "probe_status",
];

fn probe_str(s: Option<ProbeStatus>) -> &'static str {
    match s {
        None => "",
        Some(ProbeStatus::Confirmed) => "confirmed",
        Some(ProbeStatus::Unconfirmed) => "unconfirmed",
        Some(ProbeStatus::Skipped) => "skipped",
    }
}

/// Writes the report. JSON is the full report; CSV is one row per pair.
pub fn emit<W: Write>(report: &ClassificationReport, format: Format, mut out: W) -> Result<()> {
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut out, report)?;
            out.write_all(b"\n")?;
        }
        Format::Csv => {
            let mut csv = csv::Writer::from_writer(out);
            csv.write_record(CSV_COLUMNS)?;
            for pair in &report.pairs {
                let roas = pair
                    .covering_roas
                    .iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>()
                    .join(";");
                csv.write_record([
                    pair.prefix.to_string().as_str(),
                    pair.origin.to_string().as_str(),
                    pair.class.as_str(),
                    roas.as_str(),
                    match pair.long_lived {
                        None => "",
                        Some(true) => "true",
                        Some(false) => "false",
                    },
                    if pair.relgraph_miss { "true" } else { "false" },
                    probe_str(pair.probe_status),
                ])?;
            }
            csv.flush()?;
        }
    }
    Ok(())
}
