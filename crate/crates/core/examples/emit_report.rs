//! Classifies the multihoming scenario and writes the report as JSON and
//! as CSV to standard output.

use chrono::NaiveDate;

use rovclass::classifier::NoopProbe;
use rovclass::pipeline::classify_routes;
use rovclass::report::{emit, ClassificationReport, Format};
use rovclass::scenarios::{build, ScenarioName, ScenarioSpec};
use rovclass::RelGraph;

fn main() -> rovclass::Result<()> {
    let fixture = build(ScenarioSpec {
        name: ScenarioName::Multihoming,
        seed: 7,
    });
    let graph = RelGraph::from_edges(&fixture.relationships);
    let result = classify_routes(
        &fixture.routes,
        fixture.roas.clone(),
        &graph,
        &Default::default(),
        &NoopProbe,
    )?;
    let report = ClassificationReport::new(NaiveDate::from_ymd_opt(2018, 5, 16), &result);

    let stdout = std::io::stdout();
    emit(&report, Format::Json, stdout.lock())?;
    println!();
    emit(&report, Format::Csv, stdout.lock())?;
    Ok(())
}
