//! Writes a three-snapshot series where pairs appear at different times,
//! then reports how many pairs of each class count as long-lived under two
//! thresholds.

use std::fs::{self, File};

use rovclass::classifier::NoopProbe;
use rovclass::ingest::{self, load_series};
use rovclass::pipeline::{load_relgraph, run_series};
use rovclass::scenarios::{compose, units_for_counts, Unit};
use rovclass::stability::{stability_report, Threshold};

fn main() -> rovclass::Result<()> {
    let tmp = tempfile::tempdir()?;
    let all = units_for_counts([4, 3, 2, 2, 2, 3, 5]);
    let snapshots: [(&str, Vec<Unit>); 3] = [
        (
            "2018-02-28",
            all.iter().copied().filter(|u| u.slot % 3 == 0).collect(),
        ),
        (
            "2018-04-01",
            all.iter().copied().filter(|u| u.slot % 3 != 2).collect(),
        ),
        ("2018-05-16", all.clone()),
    ];
    for (date, units) in &snapshots {
        let dir = tmp.path().join(date);
        fs::create_dir(&dir)?;
        let f = compose(units);
        ingest::write_rib(File::create(dir.join(ingest::RIB_FILE))?, &f.routes)?;
        ingest::write_roas(File::create(dir.join(ingest::ROA_FILE))?, &f.roas)?;
    }
    ingest::write_relationships(
        File::create(tmp.path().join(ingest::REL_FILE))?,
        &compose(&all).relationships,
    )?;

    let series = load_series(tmp.path())?;
    let graph = load_relgraph(series.relationships.as_ref().unwrap())?;
    let (timelines, last) = run_series(&series, &graph, &Default::default(), &NoopProbe)?;
    println!(
        "{} snapshots, {} pairs invalid in the last",
        series.len(),
        last.pairs.len()
    );
    for t in timelines.timelines.iter().take(6) {
        println!("  {} {:?} {}", t.prefix, t.origin, t.presence_string());
    }

    for threshold in [1.0, 0.5] {
        let report = stability_report(&timelines, Threshold::new(threshold)?);
        println!("threshold {threshold}:");
        for c in &report.per_class {
            println!(
                "  {:<22} {:>3} / {:>3}  {:>5.1}%",
                c.class.as_str(),
                c.long_lived,
                c.total,
                c.long_lived_pct
            );
        }
    }
    Ok(())
}
