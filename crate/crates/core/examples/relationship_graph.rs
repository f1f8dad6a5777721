//! Loads a relationship file and answers provider questions in direct and
//! transitive mode.

use rovclass::ingest::parse_relationships;
use rovclass::relgraph::ProviderMode;
use rovclass::{Asn, RelGraph};

const REL: &str = "\
# provider|customer|-1, peer|peer|0
64500|64510|-1
64501|64510|-1
64520|64500|-1
64500|64501|0
64510|64530|-1
64530|64530|-1
";

fn main() -> rovclass::Result<()> {
    let (edges, stats) = parse_relationships(REL.as_bytes())?;
    println!("{} edges, {} lines skipped", edges.len(), stats.lines_skipped);
    let graph = RelGraph::from_edges(&edges);

    for asn in [64510, 64530, 64599].map(Asn) {
        println!(
            "{asn:?}: providers {:?}, peers {:?}, in graph: {}",
            graph.providers(asn),
            graph.peers(asn),
            graph.contains(asn)
        );
    }
    for mode in [ProviderMode::Direct, ProviderMode::Transitive] {
        println!(
            "{mode:?}: AS64520 provides AS64530? {}",
            graph.is_provider_with(mode, Asn(64520), Asn(64530))
        );
    }
    Ok(())
}
