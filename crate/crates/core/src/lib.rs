//! Route origin validation of BGP routes against RPKI ROA data, and
//! classification of the resulting invalid announcements into likely
//! false-alarm categories.
//!
//! The pipeline:
//!
//! 1. [`ingest`] reads RIB dumps, ROA exports and AS relationship files.
//! 2. [`forest`] builds the prefix aggregation forest over announced prefixes
//!    and a coverage index over ROAs.
//! 3. [`rov`] assigns Unknown / Valid / Invalid.
//! 4. [`classifier`] assigns each invalid (prefix, origin) pair a class
//!    using AS path, aggregation and relationship structure ([`relgraph`]).
//! 5. [`stability`] follows pairs across dated snapshots.
//! 6. [`report`] writes JSON/CSV and serves a read-only query API.
//!
//! [`scenarios`] generates small ground-truth fixtures for each class. The
//! crate's `examples/` directory has one runnable program per stage.

pub mod classifier;
pub mod cli;
pub mod error;
pub mod forest;
pub mod ingest;
pub mod model;
pub mod pipeline;
pub mod relgraph;
pub mod report;
pub mod rov;
pub mod scenarios;
pub mod stability;
pub mod trie;

pub use classifier::{
    classify, classify_all, eval_predicates, ClassifiedInvalid, ClassifyOptions, PredicateVector,
};
pub use error::{Error, Result};
pub use forest::{build_forest, Forest, ForestNode, RoaIndex};
pub use model::{
    covers, AsPath, Asn, Family, InvalidClass, IpPrefix, RoaRecord, RouteEntry, ValidationState,
};
pub use relgraph::RelGraph;
pub use rov::{validate, validate_table, CountingMode, ValidationOutcome, ValidationSummary};
