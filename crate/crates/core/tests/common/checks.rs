use std::collections::{BTreeSet, HashMap};
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::Path;
use std::time::{Duration, Instant};

use chrono::NaiveDate;
use rand::Rng;

use rovclass::classifier::{classify, ClassifyOptions, NoopProbe};
use rovclass::ingest::{self, REL_FILE, RIB_FILE, ROA_FILE};
use rovclass::pipeline::{classify_routes, load_relgraph, run_series};
use rovclass::report::ClassificationReport;
use rovclass::rov::validate_pair;
use rovclass::scenarios::{self, compose, units_for_counts, ScenarioName, ScenarioSpec, Unit};
use rovclass::stability::{stability_report, Threshold};
use rovclass::{
    build_forest, validate_table, Asn, CountingMode, InvalidClass, IpPrefix, RelGraph, RoaIndex, RoaRecord,
    RouteEntry, ValidationState,
};

use super::*;

pub type Check<T = ()> = Result<T, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

pub const CLASS_COUNTS: [u64; 7] = [923, 703, 378, 204, 186, 737, 1818];
pub const CLASS_PCT: [f64; 7] = [18.7, 14.2, 7.6, 4.1, 3.8, 14.9, 36.7];
pub const LONG_LIVED_PCT: [f64; 7] = [83.4, 97.3, 93.9, 86.8, 79.0, 89.3, 93.2];
pub const LONG_LIVED: [u64; 7] = [770, 684, 355, 177, 147, 658, 1695];

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol + 1e-9
}

//------------ Scenario golden suite -----------------------------------------

pub fn golden(names: &[ScenarioName], seeds: std::ops::Range<u64>) -> Check<(usize, Duration)> {
    let start = Instant::now();
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut passed = 0;
    for &name in names {
        for seed in seeds.clone() {
            let dir = tmp.path().join(format!("{name}-{seed}"));
            let (expected, actual) = run_scenario(ScenarioSpec { name, seed }, &dir);
            ensure!(
                expected == actual,
                "{name} seed {seed}: expected {expected:?}, got {actual:?}"
            );
            passed += 1;
        }
    }
    Ok((passed, start.elapsed()))
}

//------------ Summary shares ------------------------------------------------

pub fn summary_shares(counts: [u32; 3], want_pct: [f64; 3], tol: f64) -> Check {
    let (routes, roas) = partitioned_table(counts[0], counts[1], counts[2]);
    let index = RoaIndex::new(roas);
    let s = validate_table(&routes, &index, CountingMode::Distinct).summary;
    let got = [s.unknown, s.valid, s.invalid];
    ensure!(got == counts.map(u64::from), "counts {got:?}, wanted {counts:?}");
    let pct = [s.unknown_pct, s.valid_pct, s.invalid_pct];
    for (g, w) in pct.iter().zip(want_pct) {
        ensure!(
            close(*g, w, tol),
            "percentages {pct:?}, wanted {want_pct:?} within {tol}"
        );
    }
    Ok(())
}

//------------ Class distribution --------------------------------------------

pub fn class_distribution() -> Check {
    let fixture = compose(&units_for_counts(CLASS_COUNTS));
    let c = classify_routes(
        &fixture.routes,
        fixture.roas.clone(),
        &RelGraph::from_edges(&fixture.relationships),
        &ClassifyOptions::default(),
        &NoopProbe,
    )
    .map_err(|e| e.to_string())?;
    ensure!(
        c.counts.as_array() == CLASS_COUNTS,
        "counts {:?}",
        c.counts.as_array()
    );
    let pct: Vec<f64> = InvalidClass::ALL.iter().map(|&k| c.counts.percent(k)).collect();
    ensure!(pct == CLASS_PCT, "percentages {pct:?}");
    Ok(())
}

fn write_snapshot(dir: &Path, units: &[Unit]) -> Check {
    let f = compose(units);
    fs::create_dir_all(dir).map_err(|e| e.to_string())?;
    let open = |name: &str| {
        File::create(dir.join(name))
            .map(BufWriter::new)
            .map_err(|e| e.to_string())
    };
    ingest::write_rib(open(RIB_FILE)?, &f.routes).map_err(|e| e.to_string())?;
    ingest::write_roas(open(ROA_FILE)?, &f.roas).map_err(|e| e.to_string())?;
    Ok(())
}

/// Three snapshots: the long-lived pairs of each class in all of them, the
/// remaining pairs only in the last.
pub fn long_lived_series() -> Check {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let all = units_for_counts(CLASS_COUNTS);
    let mut seen = [0u64; 7];
    let lived: Vec<Unit> = all
        .iter()
        .filter(|u| {
            let i = u.class.index();
            seen[i] += 1;
            seen[i] <= LONG_LIVED[i]
        })
        .copied()
        .collect();
    let dates = ["2018-05-14", "2018-05-15", "2018-05-16"];
    write_snapshot(&tmp.path().join(dates[0]), &lived)?;
    write_snapshot(&tmp.path().join(dates[1]), &lived)?;
    write_snapshot(&tmp.path().join(dates[2]), &all)?;
    let rels = compose(&all).relationships;
    let rel_file = File::create(tmp.path().join(REL_FILE)).map_err(|e| e.to_string())?;
    ingest::write_relationships(BufWriter::new(rel_file), &rels).map_err(|e| e.to_string())?;

    let series = ingest::load_series(tmp.path()).map_err(|e| e.to_string())?;
    ensure!(series.len() == 3, "{} snapshots loaded", series.len());
    let graph = load_relgraph(series.relationships.as_ref().ok_or("no relationship file")?)
        .map_err(|e| e.to_string())?;
    let (timelines, last) =
        run_series(&series, &graph, &ClassifyOptions::default(), &NoopProbe).map_err(|e| e.to_string())?;
    let report = stability_report(&timelines, Threshold::ALL_SNAPSHOTS);
    ensure!(
        report.first_date == NaiveDate::from_ymd_opt(2018, 5, 14),
        "first date {:?}",
        report.first_date
    );
    for class in InvalidClass::ALL {
        let s = report.class(class);
        let i = class.index();
        ensure!(
            s.total == last.counts.get(class) && s.total == CLASS_COUNTS[i],
            "{class}: total {} vs final {}",
            s.total,
            last.counts.get(class)
        );
        ensure!(
            s.long_lived == LONG_LIVED[i],
            "{class}: long-lived {}",
            s.long_lived
        );
        ensure!(
            s.long_lived_pct == LONG_LIVED_PCT[i],
            "{class}: long-lived {}%",
            s.long_lived_pct
        );
    }
    Ok(())
}

//------------ ROV oracle and properties -------------------------------------

fn sorted(v: Vec<&RoaRecord>) -> Vec<&RoaRecord> {
    let mut v = v;
    v.sort();
    v
}

pub fn oracle_equivalence(instances: usize, seed: u64) -> Check {
    let mut rng = rng(seed);
    for i in 0..instances {
        let roas: Vec<RoaRecord> = (0..rng.random_range(0..=50))
            .map(|_| random_roa(&mut rng, true))
            .collect();
        let index = RoaIndex::new(roas.clone());
        let route = random_route(&mut rng, true);
        let outcome = rovclass::validate(&route, &index);
        let want = oracle_state(&route.prefix, route.origin(), &roas);
        ensure!(
            outcome.state == want,
            "instance {i}: {} from {:?} is {:?}, oracle says {want:?}",
            route.prefix,
            route.origin(),
            outcome.state
        );
        let got = sorted(index.lookup_covering(&route.prefix));
        let want = sorted(oracle_covering(&route.prefix, &roas));
        ensure!(
            got == want,
            "instance {i}: covering set differs for {}",
            route.prefix
        );
    }
    Ok(())
}

pub fn trichotomy(routes: usize, trials: usize, seed: u64) -> Check {
    let mut rng = rng(seed);
    let roas: Vec<RoaRecord> = (0..200).map(|_| random_roa(&mut rng, true)).collect();
    let index = RoaIndex::new(roas.clone());
    for _ in 0..routes {
        let route = random_route(&mut rng, true);
        let o = rovclass::validate(&route, &index);
        let origin = route.origin();
        let any_match = o
            .covering
            .iter()
            .any(|r| r.asn == origin && route.prefix.len() <= r.max_length);
        ensure!(
            (o.state == ValidationState::Unknown) == o.covering.is_empty(),
            "{}: Unknown iff no cover violated",
            route.prefix
        );
        ensure!(
            (o.state == ValidationState::Valid) == any_match,
            "{}: Valid iff matching ROA violated",
            route.prefix
        );
        ensure!(
            (o.state == ValidationState::Valid) == !o.matching.is_empty()
                && o.matching
                    .iter()
                    .all(|r| r.asn == origin && route.prefix.len() <= r.max_length),
            "{}: matching ROAs reported inconsistently",
            route.prefix
        );
    }
    for t in 0..trials {
        let mut set: Vec<RoaRecord> = (0..rng.random_range(0..30))
            .map(|_| random_roa(&mut rng, false))
            .collect();
        let route = random_route(&mut rng, false);
        let before = validate_pair(&route.prefix, route.origin(), &RoaIndex::new(set.clone())).state;
        let extra = if rng.random_bool(0.5) {
            RoaRecord::new(route.origin(), route.prefix, route.prefix.len(), "TA").unwrap()
        } else {
            random_roa(&mut rng, false)
        };
        set.push(extra.clone());
        let after = validate_pair(&route.prefix, route.origin(), &RoaIndex::new(set.clone())).state;
        let allowed = match before {
            ValidationState::Valid => after == ValidationState::Valid,
            ValidationState::Invalid => after != ValidationState::Unknown,
            ValidationState::Unknown => {
                after == ValidationState::Unknown || extra.prefix.covers(&route.prefix)
            }
        };
        ensure!(allowed, "trial {t}: adding {extra} moved {before:?} to {after:?}");
        set.pop();
        let restored = validate_pair(&route.prefix, route.origin(), &RoaIndex::new(set)).state;
        ensure!(
            restored == before,
            "trial {t}: removing {extra} did not restore {before:?}"
        );
    }
    Ok(())
}

//------------ Forest --------------------------------------------------------

pub fn forest_properties(sets: usize, max_prefixes: usize, seed: u64) -> Check {
    let mut rng = rng(seed);
    for s in 0..sets {
        let n = rng.random_range(0..=max_prefixes);
        let routes: Vec<RouteEntry> = (0..n).map(|_| random_route(&mut rng, true)).collect();
        let distinct: BTreeSet<IpPrefix> = routes.iter().map(|r| r.prefix).collect();
        let forest = build_forest(&routes);
        ensure!(
            forest.len() == distinct.len(),
            "set {s}: {} nodes for {} prefixes",
            forest.len(),
            distinct.len()
        );
        let roots: BTreeSet<IpPrefix> = forest.roots().iter().map(|&i| forest.node(i).prefix).collect();
        ensure!(roots == oracle_maximal(&distinct), "set {s}: roots differ");
        ensure!(
            forest.maximal_prefixes().into_iter().collect::<BTreeSet<_>>() == roots,
            "set {s}: maximal_prefixes disagrees with roots"
        );
        for (id, node) in forest.nodes().iter().enumerate() {
            let parent = node.parent.map(|p| forest.node(p).prefix);
            ensure!(
                parent == oracle_parent(&node.prefix, &distinct),
                "set {s}: parent of {} is {parent:?}",
                node.prefix
            );
            if let Some(p) = node.parent {
                ensure!(
                    forest.node(p).children.contains(&id),
                    "set {s}: child link missing"
                );
            }
        }
    }
    Ok(())
}

//------------ Classifier ----------------------------------------------------

type Classes = HashMap<(IpPrefix, Asn), (InvalidClass, [Option<bool>; 6])>;

fn classify_map(routes: &[RouteEntry], roas: &[RoaRecord], graph: &RelGraph) -> Check<Classes> {
    let c = classify_routes(
        routes,
        roas.to_vec(),
        graph,
        &ClassifyOptions::default(),
        &NoopProbe,
    )
    .map_err(|e| e.to_string())?;
    let mut out = HashMap::new();
    for p in &c.pairs {
        ensure!(
            p.class == classify(&p.vector),
            "{}: class disagrees with its vector",
            p.prefix
        );
        ensure!(
            p.matched_rule_row == p.class.rule_row(),
            "{}: rule row mismatch",
            p.prefix
        );
        ensure!(
            out.insert((p.prefix, p.origin), (p.class, p.vector.as_array()))
                .is_none(),
            "{} from {:?} classified twice",
            p.prefix,
            p.origin
        );
    }
    ensure!(
        c.counts.total() == out.len() as u64 && c.summary.invalid == out.len() as u64,
        "class counts {} / summary invalid {} / pairs {}",
        c.counts.total(),
        c.summary.invalid,
        out.len()
    );
    Ok(out)
}

pub fn partition_and_prepend(trials: usize, seed: u64) -> Check {
    let mut rng = rng(seed);
    let mut seen = [0u64; 7];
    for t in 0..trials {
        let routes: Vec<RouteEntry> = (0..rng.random_range(1..150))
            .map(|_| random_route(&mut rng, false))
            .collect();
        let roas: Vec<RoaRecord> = (0..rng.random_range(1..30))
            .map(|_| random_roa(&mut rng, false))
            .collect();
        let graph = RelGraph::from_edges(&random_relationships(&mut rng, 30));
        let classes = classify_map(&routes, &roas, &graph)?;
        for (class, _) in classes.values() {
            seen[class.index()] += 1;
        }

        let invalid: BTreeSet<(IpPrefix, Asn)> = routes
            .iter()
            .filter(|r| oracle_state(&r.prefix, r.origin(), &roas) == ValidationState::Invalid)
            .map(|r| (r.prefix, r.origin()))
            .collect();
        let got: BTreeSet<(IpPrefix, Asn)> = classes.keys().copied().collect();
        ensure!(
            got == invalid,
            "trial {t}: classified pairs differ from invalid pairs"
        );

        let prepended: Vec<RouteEntry> = routes
            .iter()
            .map(|r| RouteEntry {
                path: prepend_randomly(&mut rng, &r.path),
                ..r.clone()
            })
            .collect();
        let again = classify_map(&prepended, &roas, &graph)?;
        ensure!(again == classes, "trial {t}: prepending changed a classification");
    }
    if trials >= 100 {
        ensure!(seen.iter().all(|&n| n > 0), "some class never produced: {seen:?}");
    }
    Ok(())
}

//------------ Throughput ----------------------------------------------------

pub struct Throughput {
    pub elapsed: Duration,
    pub routes: usize,
    pub roas: usize,
    pub invalid_pairs: usize,
}

/// Serializes a synthetic table to text, then times parsing through
/// classification.
pub fn throughput(n_routes: usize, n_roas: usize) -> Check<Throughput> {
    let table = synthetic_table(n_routes, n_roas, 7);
    let mut rib = Vec::new();
    let mut roas = Vec::new();
    let mut rels = Vec::new();
    ingest::write_rib(&mut rib, &table.routes).map_err(|e| e.to_string())?;
    ingest::write_roas(&mut roas, &table.roas).map_err(|e| e.to_string())?;
    ingest::write_relationships(&mut rels, &table.relationships).map_err(|e| e.to_string())?;
    drop(table);

    let start = Instant::now();
    let (routes, _) = ingest::parse_rib(rib.as_slice()).map_err(|e| e.to_string())?;
    let (roa_records, _) = ingest::parse_roas(roas.as_slice()).map_err(|e| e.to_string())?;
    let (edges, _) = ingest::parse_relationships(rels.as_slice()).map_err(|e| e.to_string())?;
    let graph = RelGraph::from_edges(&edges);
    let c = classify_routes(
        &routes,
        roa_records,
        &graph,
        &ClassifyOptions::default(),
        &NoopProbe,
    )
    .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure!(routes.len() == n_routes, "parsed {} routes", routes.len());
    ensure!(!c.pairs.is_empty(), "no invalid pairs in synthetic table");
    Ok(Throughput {
        elapsed,
        routes: routes.len(),
        roas: n_roas,
        invalid_pairs: c.pairs.len(),
    })
}

//------------ Query service -------------------------------------------------

/// A report with one pair per class.
pub fn fixture_report() -> ClassificationReport {
    let units: Vec<Unit> = InvalidClass::ALL
        .iter()
        .enumerate()
        .map(|(slot, &class)| Unit {
            class,
            slot: slot as u32,
        })
        .collect();
    let f = compose(&units);
    let c = classify_routes(
        &f.routes,
        f.roas.clone(),
        &RelGraph::from_edges(&f.relationships),
        &ClassifyOptions::default(),
        &NoopProbe,
    )
    .unwrap();
    ClassificationReport::new(NaiveDate::from_ymd_opt(2018, 5, 16), &c)
}

pub fn query_contract() -> Check {
    let report = fixture_report();
    let first = report.pairs.first().ok_or("fixture report is empty")?.clone();
    let addr = spawn_server(report);

    let (status, body) = http_get(addr, "/v1/prefix/10.0.0.0/8");
    ensure!(status == 200, "aggregate query returned {status}");
    let v: serde_json::Value = serde_json::from_str(&body).map_err(|e| e.to_string())?;
    ensure!(
        v["pairs"].as_array().map(Vec::len) == Some(7),
        "aggregate query body {body}"
    );

    let (status, body) = http_get(addr, &format!("/v1/prefix/{}", first.prefix));
    ensure!(status == 200, "exact query returned {status}");
    let v: serde_json::Value = serde_json::from_str(&body).map_err(|e| e.to_string())?;
    let pairs = v["pairs"].as_array().ok_or("no pairs array")?;
    ensure!(
        pairs.iter().any(|p| p["prefix"] == first.prefix.to_string()
            && p["origin"] == first.origin.0
            && p["class"] == first.class.as_str()),
        "exact query body {body}"
    );

    let (status, body) = http_get(addr, "/v1/prefix/192.0.2.0/24");
    ensure!(status == 200, "empty query returned {status}");
    let v: serde_json::Value = serde_json::from_str(&body).map_err(|e| e.to_string())?;
    ensure!(v == serde_json::json!({ "pairs": [] }), "empty query body {body}");

    for bad in ["not-a-prefix", "10.0.0.0/33", "10.0.0.0"] {
        let (status, body) = http_get(addr, &format!("/v1/prefix/{bad}"));
        ensure!(status == 400, "malformed query {bad} returned {status}");
        let v: serde_json::Value = serde_json::from_str(&body).map_err(|e| e.to_string())?;
        ensure!(
            v["error"]["code"] == "malformed-prefix",
            "malformed query body {body}"
        );
    }

    let path = "/v1/prefix/10.0.0.0/16";
    let handles: Vec<_> = (0..100)
        .map(|_| std::thread::spawn(move || http_get(addr, path)))
        .collect();
    let results: Vec<(u16, String)> = handles.into_iter().map(|h| h.join().unwrap()).collect();
    ensure!(
        results.iter().all(|(s, _)| *s == 200),
        "a concurrent query failed"
    );
    ensure!(
        results.windows(2).all(|w| w[0].1 == w[1].1),
        "concurrent queries returned different bodies"
    );
    Ok(())
}

pub fn generate(name: ScenarioName, seed: u64, dir: &Path) {
    scenarios::generate(ScenarioSpec { name, seed }, dir).unwrap();
}
