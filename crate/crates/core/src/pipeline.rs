//! End-to-end helpers: files in, classification out.

use std::path::Path;

use crate::classifier::{classify_all, Classification, ClassifyOptions, TransferProbe};
use crate::error::Result;
use crate::forest::{build_forest, RoaIndex};
use crate::ingest::{self, SnapshotSeries};
use crate::model::{RoaRecord, RouteEntry};
use crate::relgraph::RelGraph;
use crate::stability::{build_timelines_with_final, Timelines};

pub fn load_relgraph(path: &Path) -> Result<RelGraph> {
    let (edges, stats) = ingest::read_relationships_file(path)?;
    if stats.lines_skipped > 0 {
        tracing::warn!(skipped = stats.lines_skipped, file = %path.display(), "relationship lines skipped");
    }
    Ok(RelGraph::from_edges(&edges))
}

/// Builds the forest and ROA index and classifies.
pub fn classify_routes(
    routes: &[RouteEntry],
    roas: Vec<RoaRecord>,
    graph: &RelGraph,
    options: &ClassifyOptions,
    probe: &dyn TransferProbe,
) -> Result<Classification> {
    let (forest, index) = rayon::join(|| build_forest(routes), || RoaIndex::new(roas));
    classify_all(routes, &index, &forest, graph, options, probe)
}

pub fn classify_files(
    rib: &Path,
    roas: &Path,
    graph: &RelGraph,
    options: &ClassifyOptions,
    probe: &dyn TransferProbe,
) -> Result<Classification> {
    let (routes, rib_stats) = ingest::read_rib_file(rib)?;
    let (roas, roa_stats) = ingest::read_roas_file(roas)?;
    tracing::info!(
        routes = routes.len(),
        rib_skipped = rib_stats.lines_skipped,
        roas = roas.len(),
        roa_skipped = roa_stats.lines_skipped,
        "inputs loaded"
    );
    classify_routes(&routes, roas, graph, options, probe)
}

/// Classifies every snapshot of a series. Returns the timelines and the
/// final snapshot's classification.
pub fn run_series(
    series: &SnapshotSeries,
    graph: &RelGraph,
    options: &ClassifyOptions,
    probe: &dyn TransferProbe,
) -> Result<(Timelines, Classification)> {
    build_timelines_with_final(series, |snapshot| {
        classify_files(&snapshot.rib_path, &snapshot.roa_path, graph, options, probe)
    })
}
