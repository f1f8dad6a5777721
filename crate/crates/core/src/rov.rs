//! Three-state route origin validation.
//!
//! A route is Unknown when no ROA covers its prefix, Valid when some covering
//! ROA authorizes its origin at its length, and Invalid otherwise. One
//! matching ROA is enough for Valid even if other covering ROAs disagree.

use std::collections::HashSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::forest::RoaIndex;
use crate::model::{Asn, IpPrefix, RoaRecord, RouteEntry, ValidationState};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationOutcome<'a> {
    pub state: ValidationState,
    pub covering: Vec<&'a RoaRecord>,
    /// Covering ROAs that authorize the route.
    pub matching: Vec<&'a RoaRecord>,
}

/// Validates a (prefix, origin) pair.
pub fn validate_pair<'a>(prefix: &IpPrefix, origin: Asn, index: &'a RoaIndex) -> ValidationOutcome<'a> {
    let covering = index.lookup_covering(prefix);
    let matching: Vec<_> = covering
        .iter()
        .copied()
        .filter(|r| prefix.len() <= r.max_length && r.asn == origin)
        .collect();
    let state = if covering.is_empty() {
        ValidationState::Unknown
    } else if matching.is_empty() {
        ValidationState::Invalid
    } else {
        ValidationState::Valid
    };
    ValidationOutcome {
        state,
        covering,
        matching,
    }
}

/// Validates a route. Routes with an AS_SET origin must be filtered out by
/// the caller; their last hop is used as-is.
pub fn validate<'a>(route: &RouteEntry, index: &'a RoaIndex) -> ValidationOutcome<'a> {
    debug_assert!(!route.path.contains_set());
    validate_pair(&route.prefix, route.origin(), index)
}

//------------ Table summaries -----------------------------------------------

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CountingMode {
    /// One count per distinct (prefix, origin) pair.
    #[default]
    Distinct,
    /// One count per RIB line.
    Raw,
}

/// `count / total` as a percentage, rounded half-up to `decimals` places.
/// An empty total yields 0.
pub fn percentage(count: u64, total: u64, decimals: u32) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let scale = 100u128 * 10u128.pow(decimals);
    let num = count as u128 * scale;
    let rounded = (2 * num + total as u128) / (2 * total as u128);
    rounded as f64 / 10f64.powi(decimals as i32)
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationSummary {
    pub mode: CountingMode,
    pub unknown: u64,
    pub valid: u64,
    pub invalid: u64,
    pub total: u64,
    pub unknown_pct: f64,
    pub valid_pct: f64,
    pub invalid_pct: f64,
    /// Routes skipped because their path ends in an AS_SET.
    pub as_set_excluded: u64,
}

impl ValidationSummary {
    pub fn from_counts(mode: CountingMode, unknown: u64, valid: u64, invalid: u64) -> Self {
        let total = unknown + valid + invalid;
        ValidationSummary {
            mode,
            unknown,
            valid,
            invalid,
            total,
            unknown_pct: percentage(unknown, total, 2),
            valid_pct: percentage(valid, total, 2),
            invalid_pct: percentage(invalid, total, 2),
            as_set_excluded: 0,
        }
    }

    fn record(&mut self, state: ValidationState) {
        match state {
            ValidationState::Unknown => self.unknown += 1,
            ValidationState::Valid => self.valid += 1,
            ValidationState::Invalid => self.invalid += 1,
        }
    }

    fn finish(mut self) -> Self {
        let excluded = self.as_set_excluded;
        self = Self::from_counts(self.mode, self.unknown, self.valid, self.invalid);
        self.as_set_excluded = excluded;
        self
    }
}

#[derive(Clone, Debug)]
pub struct TableValidation<'a> {
    pub summary: ValidationSummary,
    /// One entry per input route; `None` for AS_SET routes.
    pub outcomes: Vec<Option<ValidationOutcome<'a>>>,
}

/// Validates every route and summarizes the states.
pub fn validate_table<'a>(
    routes: &[RouteEntry],
    index: &'a RoaIndex,
    mode: CountingMode,
) -> TableValidation<'a> {
    let outcomes: Vec<_> = routes
        .par_iter()
        .map(|r| (!r.path.contains_set()).then(|| validate(r, index)))
        .collect();

    let mut summary = ValidationSummary {
        mode,
        ..Default::default()
    };
    let mut seen: HashSet<(IpPrefix, Asn)> = HashSet::new();
    for (route, outcome) in routes.iter().zip(&outcomes) {
        let Some(outcome) = outcome else {
            summary.as_set_excluded += 1;
            continue;
        };
        if mode == CountingMode::Distinct && !seen.insert((route.prefix, route.origin())) {
            continue;
        }
        summary.record(outcome.state);
    }
    TableValidation {
        summary: summary.finish(),
        outcomes,
    }
}

/// Summary only, without retaining per-route outcomes.
pub fn summarize(routes: &[RouteEntry], index: &RoaIndex, mode: CountingMode) -> ValidationSummary {
    let mut summary = ValidationSummary {
        mode,
        ..Default::default()
    };
    let mut evaluated: Vec<&RouteEntry> = Vec::with_capacity(routes.len());
    let mut seen: HashSet<(IpPrefix, Asn)> = HashSet::new();
    for route in routes {
        if route.path.contains_set() {
            summary.as_set_excluded += 1;
        } else if mode == CountingMode::Raw || seen.insert((route.prefix, route.origin())) {
            evaluated.push(route);
        }
    }
    let counts = evaluated
        .par_iter()
        .map(|r| {
            let mut c = [0u64; 3];
            c[validate(r, index).state as usize] += 1;
            c
        })
        .reduce(|| [0; 3], |a, b| [a[0] + b[0], a[1] + b[1], a[2] + b[2]]);
    summary.unknown = counts[ValidationState::Unknown as usize];
    summary.valid = counts[ValidationState::Valid as usize];
    summary.invalid = counts[ValidationState::Invalid as usize];
    summary.finish()
}
