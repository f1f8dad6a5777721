//! Generates every scenario fixture, classifies it and compares the result
//! with the fixture's expected pairs. Transfer pairs go through a toy probe
//! closure that confirms every /24.

use rovclass::classifier::ProbeStatus;
use rovclass::pipeline::classify_routes;
use rovclass::scenarios::{build, ScenarioName, ScenarioSpec};
use rovclass::{Asn, IpPrefix, RelGraph};

fn main() -> rovclass::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0);
    let probe = |prefix: &IpPrefix, _origin: Asn| {
        if prefix.len() == 24 {
            ProbeStatus::Confirmed
        } else {
            ProbeStatus::Unconfirmed
        }
    };

    for name in ScenarioName::ALL {
        let fixture = build(ScenarioSpec { name, seed });
        let graph = RelGraph::from_edges(&fixture.relationships);
        let result = classify_routes(
            &fixture.routes,
            fixture.roas.clone(),
            &graph,
            &Default::default(),
            &probe,
        )?;
        let ok = result.pairs.len() == fixture.expected.len()
            && result.pairs.iter().zip(&fixture.expected).all(|(got, want)| {
                got.prefix == want.prefix && got.origin == want.origin && got.class == want.class
            });
        println!(
            "{name} (seed {seed}): {}",
            if ok { "matches" } else { "MISMATCH" }
        );
        for pair in &result.pairs {
            println!(
                "    {} from {:?}: {} via rule {:?}, predicates {:?}, probe {:?}",
                pair.prefix,
                pair.origin,
                pair.class,
                pair.matched_rule_row,
                pair.vector.as_array(),
                pair.probe_status
            );
        }
    }
    Ok(())
}
