//! Builds the prefix aggregation forest for a few announcements and prints
//! it as an indented tree with each node's distinct paths.

use rovclass::forest::NodeId;
use rovclass::{build_forest, AsPath, Forest, IpPrefix, RouteEntry};

fn route(prefix: &str, path: &str) -> RouteEntry {
    let prefix: IpPrefix = prefix.parse().unwrap();
    let path: AsPath = path.parse().unwrap();
    RouteEntry::new(prefix, path)
}

fn print(forest: &Forest, id: NodeId, depth: usize) {
    let node = forest.node(id);
    let paths: Vec<String> = node.collapsed_paths.iter().map(ToString::to_string).collect();
    println!(
        "{:indent$}{}  [{}]",
        "",
        node.prefix,
        paths.join("; "),
        indent = depth * 2
    );
    for &child in &node.children {
        print(forest, child, depth + 1);
    }
}

fn main() {
    let routes = [
        route("10.0.0.0/8", "64496 64500"),
        route("10.1.0.0/16", "64496 64500"),
        route("10.1.0.0/24", "64496 64501 64501 64501"),
        route("10.1.1.0/24", "64497 64502"),
        route("10.2.0.0/16", "64496 64500"),
        route("172.16.0.0/12", "64496 64503"),
        route("2001:db8::/32", "64496 64504"),
        route("2001:db8:1::/48", "64496 64505"),
    ];
    let forest = build_forest(&routes);
    println!("{} nodes, {} roots", forest.len(), forest.roots().len());
    for &root in forest.roots() {
        print(&forest, root, 0);
    }

    let query: IpPrefix = "10.1.0.0/24".parse().unwrap();
    let (parent, siblings) = forest.parent_and_siblings(&query).unwrap();
    println!(
        "{query}: parent {}, siblings {:?}",
        parent.map_or("none".into(), |p| p.prefix.to_string()),
        siblings.iter().map(|s| s.prefix.to_string()).collect::<Vec<_>>()
    );
}
