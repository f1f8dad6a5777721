//! Longitudinal tracking of invalid (prefix, origin) pairs across dated
//! snapshots.
//!
//! Presence counts snapshots in which the pair was announced *and* Invalid.
//! A pair that turns Valid stops accruing presence. A pair is long-lived
//! when its presence fraction reaches the threshold; the default of 1.0
//! means present in every snapshot.

use std::collections::HashMap;

use chrono::NaiveDate;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classifier::{Classification, ClassifiedInvalid};
use crate::error::{Error, Result};
use crate::ingest::{SnapshotRef, SnapshotSeries};
use crate::model::{Asn, InvalidClass, IpPrefix};
use crate::rov::percentage;

/// Minimum presence fraction in (0, 1].
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Threshold(f64);

impl Threshold {
    pub const ALL_SNAPSHOTS: Threshold = Threshold(1.0);

    pub fn new(value: f64) -> Result<Self> {
        if value > 0.0 && value <= 1.0 {
            Ok(Threshold(value))
        } else {
            Err(Error::Config(format!(
                "stability threshold {value} must be in (0, 1]"
            )))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl Default for Threshold {
    fn default() -> Self {
        Threshold::ALL_SNAPSHOTS
    }
}

impl TryFrom<f64> for Threshold {
    type Error = Error;

    fn try_from(v: f64) -> Result<Self> {
        Threshold::new(v)
    }
}

impl From<Threshold> for f64 {
    fn from(t: Threshold) -> f64 {
        t.0
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairTimeline {
    pub prefix: IpPrefix,
    pub origin: Asn,
    /// One flag per snapshot: announced and Invalid.
    pub present: Vec<bool>,
    /// Class per snapshot where the pair was Invalid.
    pub classes: Vec<Option<InvalidClass>>,
}

impl PairTimeline {
    pub fn present_count(&self) -> usize {
        self.present.iter().filter(|&&p| p).count()
    }

    /// Class from the most recent snapshot in which the pair was Invalid.
    pub fn class(&self) -> Option<InvalidClass> {
        self.classes.iter().rev().flatten().next().copied()
    }

    pub fn in_final_snapshot(&self) -> bool {
        self.present.last().copied().unwrap_or(false)
    }

    /// Presence as a bit string, first snapshot leftmost.
    pub fn presence_string(&self) -> String {
        self.present.iter().map(|&p| if p { '1' } else { '0' }).collect()
    }
}

/// True iff the pair was present in at least `threshold` of the snapshots.
pub fn long_lived(timeline: &PairTimeline, threshold: Threshold) -> bool {
    let total = timeline.present.len();
    total > 0 && timeline.present_count() as f64 / total as f64 >= threshold.value()
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Timelines {
    pub dates: Vec<NaiveDate>,
    /// Sorted by (prefix, origin).
    pub timelines: Vec<PairTimeline>,
}

impl Timelines {
    pub fn get(&self, prefix: &IpPrefix, origin: Asn) -> Option<&PairTimeline> {
        self.timelines
            .binary_search_by(|t| (t.prefix, t.origin).cmp(&(*prefix, origin)))
            .ok()
            .map(|i| &self.timelines[i])
    }
}

/// Merges per-snapshot invalid pairs, given in date order, into timelines.
pub fn merge_snapshots<I>(dates: Vec<NaiveDate>, snapshots: I) -> Timelines
where
    I: IntoIterator,
    I::Item: IntoIterator<Item = (IpPrefix, Asn, InvalidClass)>,
{
    let n = dates.len();
    let mut map: HashMap<(IpPrefix, Asn), PairTimeline> = HashMap::new();
    for (i, snapshot) in snapshots.into_iter().enumerate() {
        assert!(i < n, "more snapshots than dates");
        for (prefix, origin, class) in snapshot {
            let timeline = map.entry((prefix, origin)).or_insert_with(|| PairTimeline {
                prefix,
                origin,
                present: vec![false; n],
                classes: vec![None; n],
            });
            timeline.present[i] = true;
            timeline.classes[i] = Some(class);
        }
    }
    let mut timelines: Vec<_> = map.into_values().collect();
    timelines.sort_unstable_by_key(|t| (t.prefix, t.origin));
    Timelines { dates, timelines }
}

fn pair_keys(pairs: &[ClassifiedInvalid]) -> Vec<(IpPrefix, Asn, InvalidClass)> {
    pairs.iter().map(|p| (p.prefix, p.origin, p.class)).collect()
}

/// Runs `pipeline` on every snapshot (concurrently) and merges the results.
pub fn build_timelines<F>(series: &SnapshotSeries, pipeline: F) -> Result<Timelines>
where
    F: Fn(&SnapshotRef) -> Result<Vec<ClassifiedInvalid>> + Sync,
{
    let per_snapshot: Vec<Vec<_>> = series
        .snapshots
        .par_iter()
        .map(|s| pipeline(s).map(|pairs| pair_keys(&pairs)))
        .collect::<Result<_>>()?;
    Ok(merge_snapshots(series.dates(), per_snapshot))
}

/// Like [`build_timelines`], but keeps the final snapshot's full
/// classification for reporting.
pub fn build_timelines_with_final<F>(
    series: &SnapshotSeries,
    pipeline: F,
) -> Result<(Timelines, Classification)>
where
    F: Fn(&SnapshotRef) -> Result<Classification> + Sync,
{
    let last = series
        .len()
        .checked_sub(1)
        .ok_or_else(|| Error::Config("snapshot series is empty".into()))?;
    let mut results: Vec<(Vec<_>, Option<Classification>)> = series
        .snapshots
        .par_iter()
        .enumerate()
        .map(|(i, s)| {
            let c = pipeline(s)?;
            let keys = pair_keys(&c.pairs);
            Ok((keys, (i == last).then_some(c)))
        })
        .collect::<Result<_>>()?;
    let final_classification = results[last].1.take().expect("final snapshot kept");
    let timelines = merge_snapshots(series.dates(), results.into_iter().map(|(k, _)| k));
    Ok((timelines, final_classification))
}

//------------ Report --------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassStability {
    pub class: InvalidClass,
    pub total: u64,
    pub long_lived: u64,
    pub long_lived_pct: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub threshold: Threshold,
    pub snapshots: usize,
    pub first_date: Option<NaiveDate>,
    pub last_date: Option<NaiveDate>,
    /// One entry per class in rule-table order, counting pairs invalid in
    /// the final snapshot under their final class.
    pub per_class: Vec<ClassStability>,
    /// Pairs invalid at some point but not in the final snapshot.
    pub expired: u64,
}

impl StabilityReport {
    pub fn class(&self, class: InvalidClass) -> &ClassStability {
        &self.per_class[class.index()]
    }
}

pub fn stability_report(timelines: &Timelines, threshold: Threshold) -> StabilityReport {
    let mut totals = [0u64; 7];
    let mut lived = [0u64; 7];
    let mut expired = 0;
    for t in &timelines.timelines {
        if !t.in_final_snapshot() {
            expired += 1;
            continue;
        }
        let Some(class) = t.class() else { continue };
        totals[class.index()] += 1;
        if long_lived(t, threshold) {
            lived[class.index()] += 1;
        }
    }
    let per_class = InvalidClass::ALL
        .into_iter()
        .map(|class| {
            let (total, long) = (totals[class.index()], lived[class.index()]);
            ClassStability {
                class,
                total,
                long_lived: long,
                long_lived_pct: percentage(long, total, 1),
            }
        })
        .collect();
    StabilityReport {
        threshold,
        snapshots: timelines.dates.len(),
        first_date: timelines.dates.first().copied(),
        last_date: timelines.dates.last().copied(),
        per_class,
        expired,
    }
}
