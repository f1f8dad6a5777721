//! Classification of invalid (prefix, origin) pairs into false-alarm
//! categories.
//!
//! Six predicates are evaluated per pair:
//!
//! | # | predicate                                                   |
//! |---|-------------------------------------------------------------|
//! | 1 | some covering ROA names the origin AS                       |
//! | 2 | some covering ROA's AS is a provider of the origin          |
//! | 3 | the origin is a provider of some covering ROA's AS          |
//! | 4 | the origin has two or more providers                        |
//! | 5 | the parent or a sibling prefix carries a different AS path  |
//! | 6 | the parent or a sibling prefix carries the same AS path     |
//!
//! Predicates 1-3 are aggregated over the covering ROAs with priority
//! 1 > 2 > 3, so at most one of them holds. Paths are compared after
//! collapsing prepends. The rule rows are then tried in order:
//!
//! | class                | 1 | 2 | 3 | 4 | 5 | 6 |
//! |----------------------|---|---|---|---|---|---|
//! | load-balancing       | T | F | F | - | T | - |
//! | failing-to-aggregate | T | F | F | - | F | T |
//! | multihoming          | F | T | F | T | T | - |
//! | singlehoming         | F | T | F | F | T | - |
//! | provider             | F | F | T | - | - | - |
//! | transfer             | F | F | F | - | - | - |
//!
//! Anything left over is `other`.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forest::{Forest, RoaIndex};
use crate::model::{AsPath, Asn, InvalidClass, IpPrefix, RoaRecord, RouteEntry, ValidationState};
use crate::relgraph::{ProviderMode, RelGraph};
use crate::rov::{percentage, validate_pair, CountingMode, ValidationOutcome, ValidationSummary};

//------------ PredicateVector -----------------------------------------------

/// Predicate values; `None` means not evaluated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PredicateVector {
    pub roa_asn_is_origin: Option<bool>,
    pub roa_asn_provides_origin: Option<bool>,
    pub origin_provides_roa_asn: Option<bool>,
    pub multiple_providers: Option<bool>,
    pub cover_with_different_path: Option<bool>,
    pub cover_with_same_path: Option<bool>,
}

impl PredicateVector {
    pub fn as_array(&self) -> [Option<bool>; 6] {
        [
            self.roa_asn_is_origin,
            self.roa_asn_provides_origin,
            self.origin_provides_roa_asn,
            self.multiple_providers,
            self.cover_with_different_path,
            self.cover_with_same_path,
        ]
    }

    pub fn from_array(v: [Option<bool>; 6]) -> Self {
        PredicateVector {
            roa_asn_is_origin: v[0],
            roa_asn_provides_origin: v[1],
            origin_provides_roa_asn: v[2],
            multiple_providers: v[3],
            cover_with_different_path: v[4],
            cover_with_same_path: v[5],
        }
    }
}

const T: Option<bool> = Some(true);
const F: Option<bool> = Some(false);
const ANY: Option<bool> = None;

/// Rule rows in table order. `None` cells are don't-care.
pub const RULES: [(InvalidClass, [Option<bool>; 6]); 6] = [
    (InvalidClass::LoadBalancing, [T, F, F, ANY, T, ANY]),
    (InvalidClass::FailingToAggregate, [T, F, F, ANY, F, T]),
    (InvalidClass::Multihoming, [F, T, F, T, T, ANY]),
    (InvalidClass::Singlehoming, [F, T, F, F, T, ANY]),
    (InvalidClass::Provider, [F, F, T, ANY, ANY, ANY]),
    (InvalidClass::Transfer, [F, F, F, ANY, ANY, ANY]),
];

/// First matching rule row, or `Other`. A required cell that was not
/// evaluated never matches.
pub fn classify(vector: &PredicateVector) -> InvalidClass {
    let values = vector.as_array();
    RULES
        .iter()
        .find(|(_, row)| {
            row.iter()
                .zip(values)
                .all(|(want, got)| want.is_none() || *want == got)
        })
        .map(|(class, _)| *class)
        .unwrap_or(InvalidClass::Other)
}

//------------ Predicate evaluation ------------------------------------------

#[derive(Clone, Copy, Debug, Default)]
pub struct ClassifyOptions {
    pub provider_mode: ProviderMode,
}

/// Predicates 1-4, which only look at the covering ROAs and the graph.
fn relationship_predicates(
    origin: Asn,
    covering: &[&RoaRecord],
    graph: &RelGraph,
    mode: ProviderMode,
) -> [bool; 4] {
    let p1 = covering.iter().any(|r| r.asn == origin);
    let p2 = !p1
        && covering
            .iter()
            .any(|r| graph.is_provider_with(mode, r.asn, origin));
    let p3 = !p1
        && !p2
        && covering
            .iter()
            .any(|r| graph.is_provider_with(mode, origin, r.asn));
    let p4 = graph.provider_count(origin) >= 2;
    [p1, p2, p3, p4]
}

/// Predicates 5 and 6 for a node against its parent and siblings.
fn relative_path_predicates(forest: &Forest, prefix: &IpPrefix, path: &AsPath) -> Result<(bool, bool)> {
    let id = forest.lookup(prefix).ok_or(Error::NotFound(*prefix))?;
    let own = path.collapse_prepends();
    let node = forest.node(id);
    let relatives = node
        .parent
        .into_iter()
        .chain(forest.siblings(id))
        .flat_map(|r| forest.node(r).collapsed_paths.iter());
    let (mut different, mut same) = (false, false);
    for rel_path in relatives {
        if *rel_path == own {
            same = true;
        } else {
            different = true;
        }
        if same && different {
            break;
        }
    }
    Ok((different, same))
}

/// Evaluates all six predicates for an invalid pair.
pub fn eval_predicates(
    prefix: &IpPrefix,
    origin: Asn,
    path: &AsPath,
    outcome: &ValidationOutcome<'_>,
    forest: &Forest,
    graph: &RelGraph,
    options: &ClassifyOptions,
) -> Result<PredicateVector> {
    if outcome.state != ValidationState::Invalid {
        return Err(Error::Contract(format!(
            "{prefix} from AS{origin} is {:?}, not invalid",
            outcome.state
        )));
    }
    let [p1, p2, p3, p4] = relationship_predicates(origin, &outcome.covering, graph, options.provider_mode);
    let (p5, p6) = relative_path_predicates(forest, prefix, path)?;
    Ok(PredicateVector::from_array([p1, p2, p3, p4, p5, p6].map(Some)))
}

//------------ Transfer probe hook -------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProbeStatus {
    Confirmed,
    Unconfirmed,
    Skipped,
}

/// Confirms that address space which looks transferred is in active use by
/// its new origin. Only consulted for `transfer` pairs; it annotates and
/// never changes the class.
pub trait TransferProbe: Sync {
    fn probe(&self, prefix: &IpPrefix, origin: Asn) -> ProbeStatus;
}

/// Performs no measurement and reports every transfer as unconfirmed.
#[derive(Clone, Copy, Debug, Default)]
pub struct NoopProbe;

impl TransferProbe for NoopProbe {
    fn probe(&self, _prefix: &IpPrefix, _origin: Asn) -> ProbeStatus {
        ProbeStatus::Unconfirmed
    }
}

impl<F> TransferProbe for F
where
    F: Fn(&IpPrefix, Asn) -> ProbeStatus + Sync,
{
    fn probe(&self, prefix: &IpPrefix, origin: Asn) -> ProbeStatus {
        self(prefix, origin)
    }
}

//------------ ClassifiedInvalid ---------------------------------------------

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassifiedInvalid {
    pub prefix: IpPrefix,
    pub origin: Asn,
    /// The path the predicates were evaluated against.
    pub path: AsPath,
    pub vector: PredicateVector,
    pub class: InvalidClass,
    pub matched_rule_row: Option<u8>,
    pub covering_roas: Vec<RoaRecord>,
    /// The origin has no edge in the relationship data.
    pub relgraph_miss: bool,
    /// Probe result; only set for transfer pairs.
    pub probe_status: Option<ProbeStatus>,
}

/// Per-class pair counts, indexed in rule-table order.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ClassCounts([u64; 7]);

impl ClassCounts {
    pub fn from_counts(counts: [u64; 7]) -> Self {
        ClassCounts(counts)
    }

    pub fn get(&self, class: InvalidClass) -> u64 {
        self.0[class.index()]
    }

    pub fn add(&mut self, class: InvalidClass) {
        self.0[class.index()] += 1;
    }

    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }

    /// Share of the total, rounded half-up to one decimal.
    pub fn percent(&self, class: InvalidClass) -> f64 {
        percentage(self.get(class), self.total(), 1)
    }

    pub fn as_array(&self) -> [u64; 7] {
        self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = (InvalidClass, u64)> + '_ {
        InvalidClass::ALL.into_iter().map(|c| (c, self.get(c)))
    }
}

impl FromIterator<InvalidClass> for ClassCounts {
    fn from_iter<I: IntoIterator<Item = InvalidClass>>(iter: I) -> Self {
        let mut counts = ClassCounts::default();
        for class in iter {
            counts.add(class);
        }
        counts
    }
}

#[derive(Clone, Debug)]
pub struct Classification {
    /// Distinct-mode validation summary over the same routes.
    pub summary: ValidationSummary,
    /// Sorted by (prefix, origin).
    pub pairs: Vec<ClassifiedInvalid>,
    pub counts: ClassCounts,
}

/// Distinct (prefix, origin) pairs with a representative path each: the
/// smallest prepend-collapsed path seen for the pair. AS_SET routes are
/// left out; their count is returned alongside.
pub fn distinct_pairs(routes: &[RouteEntry]) -> (Vec<(IpPrefix, Asn, AsPath)>, u64) {
    let mut reps: HashMap<(IpPrefix, Asn), &AsPath> = HashMap::new();
    let mut excluded = 0;
    for route in routes {
        if route.path.contains_set() {
            excluded += 1;
            continue;
        }
        reps.entry((route.prefix, route.origin()))
            .and_modify(|cur| {
                if route.path.collapse_prepends() < cur.collapse_prepends() {
                    *cur = &route.path;
                }
            })
            .or_insert(&route.path);
    }
    let mut pairs: Vec<_> = reps
        .into_iter()
        .map(|((prefix, origin), path)| (prefix, origin, path.collapse_prepends()))
        .collect();
    pairs.sort_unstable_by_key(|p| (p.0, p.1));
    (pairs, excluded)
}

/// Validates every distinct pair and classifies the invalid ones.
///
/// `forest` must be built from the same routes.
pub fn classify_all(
    routes: &[RouteEntry],
    index: &RoaIndex,
    forest: &Forest,
    graph: &RelGraph,
    options: &ClassifyOptions,
    probe: &dyn TransferProbe,
) -> Result<Classification> {
    let (pairs, as_set_excluded) = distinct_pairs(routes);

    let results: Vec<(ValidationState, Option<ClassifiedInvalid>)> = pairs
        .par_iter()
        .map(|(prefix, origin, path)| {
            let outcome = validate_pair(prefix, *origin, index);
            if outcome.state != ValidationState::Invalid {
                return Ok((outcome.state, None));
            }
            let vector = eval_predicates(prefix, *origin, path, &outcome, forest, graph, options)?;
            let class = classify(&vector);
            let probe_status = (class == InvalidClass::Transfer).then(|| probe.probe(prefix, *origin));
            Ok((
                outcome.state,
                Some(ClassifiedInvalid {
                    prefix: *prefix,
                    origin: *origin,
                    path: path.clone(),
                    vector,
                    class,
                    matched_rule_row: class.rule_row(),
                    covering_roas: outcome.covering.into_iter().cloned().collect(),
                    relgraph_miss: !graph.contains(*origin),
                    probe_status,
                }),
            ))
        })
        .collect::<Result<_>>()?;

    let mut counts = [0u64; 3];
    let mut classified = Vec::new();
    for (state, pair) in results {
        counts[state as usize] += 1;
        classified.extend(pair);
    }
    let mut summary = ValidationSummary::from_counts(
        CountingMode::Distinct,
        counts[ValidationState::Unknown as usize],
        counts[ValidationState::Valid as usize],
        counts[ValidationState::Invalid as usize],
    );
    summary.as_set_excluded = as_set_excluded;
    let counts = classified.iter().map(|c| c.class).collect();
    Ok(Classification {
        summary,
        pairs: classified,
        counts,
    })
}
