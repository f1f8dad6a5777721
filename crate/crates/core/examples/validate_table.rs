//! Validates a small RIB against a handful of ROAs and prints the summary
//! in both counting modes, then each route's state.

use rovclass::ingest::{parse_rib, parse_roas};
use rovclass::{validate_table, CountingMode, RoaIndex};

const RIB: &str = "\
TABLE_DUMP2|0|B|0.0.0.0|64496|192.0.2.0/24|64496 64511|IGP
TABLE_DUMP2|0|B|0.0.0.0|64497|192.0.2.0/24|64497 64500 64511|IGP
TABLE_DUMP2|0|B|0.0.0.0|64496|192.0.2.128/25|64496 64511|IGP
TABLE_DUMP2|0|B|0.0.0.0|64496|198.51.100.0/24|64496 64502|IGP
TABLE_DUMP2|0|B|0.0.0.0|64496|203.0.113.0/24|64496 64503|IGP
TABLE_DUMP2|0|B|0.0.0.0|64496|203.0.113.0/25|64496 {64504,64505}|IGP
";

const ROAS: &str = "\
ASN,IP Prefix,Max Length,Trust Anchor
AS64511,192.0.2.0/24,24,RIPE
AS64501,198.51.100.0/22,24,ARIN
";

fn main() -> rovclass::Result<()> {
    let (routes, rib_stats) = parse_rib(RIB.as_bytes())?;
    let (roas, _) = parse_roas(ROAS.as_bytes())?;
    println!(
        "{} routes parsed, {} skipped",
        rib_stats.lines_parsed, rib_stats.lines_skipped
    );
    let index = RoaIndex::new(roas);

    for mode in [CountingMode::Distinct, CountingMode::Raw] {
        let s = validate_table(&routes, &index, mode).summary;
        println!(
            "{mode:?}: unknown {} ({}%), valid {} ({}%), invalid {} ({}%), AS_SET excluded {}",
            s.unknown, s.unknown_pct, s.valid, s.valid_pct, s.invalid, s.invalid_pct, s.as_set_excluded
        );
    }

    let table = validate_table(&routes, &index, CountingMode::Raw);
    for (route, outcome) in routes.iter().zip(&table.outcomes) {
        match outcome {
            Some(o) => println!(
                "{:<18} AS{:<6} {:?} ({} covering ROA(s))",
                route.prefix,
                route.origin(),
                o.state,
                o.covering.len()
            ),
            None => println!("{:<18} {:<8} excluded (AS_SET)", route.prefix, route.path),
        }
    }
    Ok(())
}
