#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet};
use std::io::{Read, Write};
use std::net::{SocketAddr, TcpStream};
use std::path::Path;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rovclass::classifier::{ClassifyOptions, NoopProbe};
use rovclass::ingest::Relationship;
use rovclass::model::RelationshipKind;
use rovclass::pipeline::{classify_files, load_relgraph};
use rovclass::scenarios::{self, ExpectedPair, ScenarioSpec};
use rovclass::{AsPath, Asn, Family, IpPrefix, RoaRecord, RouteEntry, ValidationState};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

//------------ Random inputs -------------------------------------------------

/// A prefix inside a small address window so that random prefixes overlap
/// often. v4 lives under 10.0.0.0/12, v6 under 2001:db8::/32.
pub fn small_prefix(rng: &mut impl Rng, allow_v6: bool) -> IpPrefix {
    if allow_v6 && rng.random_bool(0.2) {
        let len = rng.random_range(32..=48u8);
        let bits = (0x2001_0db8u128 << 96) | ((rng.random::<u16>() as u128) << 80);
        IpPrefix::from_raw(Family::V6, bits, len).unwrap()
    } else {
        let len = rng.random_range(12..=24u8);
        let bits = ((10u128 << 24) | (rng.random_range(0..1u128 << 12) << 8)) << 96;
        IpPrefix::from_raw(Family::V4, bits, len).unwrap()
    }
}

pub fn small_asn(rng: &mut impl Rng) -> Asn {
    Asn(rng.random_range(1..=12))
}

pub fn random_roa(rng: &mut impl Rng, allow_v6: bool) -> RoaRecord {
    let prefix = small_prefix(rng, allow_v6);
    let max = rng.random_range(prefix.len()..=prefix.family().max_len().min(prefix.len() + 8));
    RoaRecord::new(small_asn(rng), prefix, max, "TA").unwrap()
}

pub fn random_path(rng: &mut impl Rng, origin: Asn) -> AsPath {
    let n = rng.random_range(0..4);
    let mut hops: Vec<Asn> = (0..n).map(|_| small_asn(rng)).collect();
    hops.push(origin);
    AsPath::from_sequence(hops).unwrap()
}

pub fn random_route(rng: &mut impl Rng, allow_v6: bool) -> RouteEntry {
    let prefix = small_prefix(rng, allow_v6);
    let origin = small_asn(rng);
    RouteEntry::new(prefix, random_path(rng, origin))
}

pub fn random_relationships(rng: &mut impl Rng, n: usize) -> Vec<Relationship> {
    let mut seen = HashSet::new();
    let mut edges = Vec::new();
    for _ in 0..n {
        let a = small_asn(rng);
        let b = small_asn(rng);
        if a == b || !seen.insert((a.min(b), a.max(b))) {
            continue;
        }
        let kind = if rng.random_bool(0.8) {
            RelationshipKind::ProviderOf
        } else {
            RelationshipKind::PeerWith
        };
        edges.push(Relationship { a, b, kind });
    }
    edges
}

/// Repeats random hops in place. The prepend-collapsed path is unchanged.
pub fn prepend_randomly(rng: &mut impl Rng, path: &AsPath) -> AsPath {
    let mut hops = Vec::new();
    for &h in path.hops() {
        let copies = if rng.random_bool(0.3) {
            rng.random_range(2..=4)
        } else {
            1
        };
        hops.extend(std::iter::repeat_n(h, copies));
    }
    AsPath::from_sequence(hops).unwrap()
}

//------------ Brute-force oracles -------------------------------------------

pub fn oracle_covering<'a>(prefix: &IpPrefix, roas: &'a [RoaRecord]) -> Vec<&'a RoaRecord> {
    roas.iter().filter(|r| r.prefix.covers(prefix)).collect()
}

pub fn oracle_state(prefix: &IpPrefix, origin: Asn, roas: &[RoaRecord]) -> ValidationState {
    let covering = oracle_covering(prefix, roas);
    if covering.is_empty() {
        ValidationState::Unknown
    } else if covering
        .iter()
        .any(|r| r.asn == origin && prefix.len() <= r.max_length)
    {
        ValidationState::Valid
    } else {
        ValidationState::Invalid
    }
}

/// The longest announced prefix properly covering `p`.
pub fn oracle_parent(p: &IpPrefix, all: &BTreeSet<IpPrefix>) -> Option<IpPrefix> {
    all.iter()
        .filter(|q| *q != p && q.covers(p))
        .max_by_key(|q| q.len())
        .copied()
}

pub fn oracle_maximal(all: &BTreeSet<IpPrefix>) -> BTreeSet<IpPrefix> {
    all.iter()
        .filter(|p| !all.iter().any(|q| q != *p && q.covers(p)))
        .copied()
        .collect()
}

//------------ Large synthetic tables ----------------------------------------

/// A /24 per index starting at 1.0.0.0.
pub fn nth_slash24(i: u32) -> IpPrefix {
    let addr = (1u32 << 24) + i * 256;
    IpPrefix::from_raw(Family::V4, (addr as u128) << 96, 24).unwrap()
}

/// Routes and ROAs partitioned into exactly `unknown`, `valid` and
/// `invalid` distinct pairs.
pub fn partitioned_table(unknown: u32, valid: u32, invalid: u32) -> (Vec<RouteEntry>, Vec<RoaRecord>) {
    let mut routes = Vec::new();
    let mut roas = Vec::new();
    let origin = Asn(64500);
    let path = AsPath::from_sequence(vec![Asn(64496), origin]).unwrap();
    for i in 0..unknown + valid + invalid {
        let prefix = nth_slash24(i);
        routes.push(RouteEntry::new(prefix, path.clone()));
        if i >= unknown {
            let holder = if i < unknown + valid { origin } else { Asn(64501) };
            roas.push(RoaRecord::new(holder, prefix, 24, "TA").unwrap());
        }
    }
    (routes, roas)
}

/// A realistic-looking table: ROAs on /20 blocks with mixed max lengths,
/// routes announcing blocks and their more-specifics with multi-hop paths,
/// and a provider graph over the origin pool.
pub struct SyntheticTable {
    pub routes: Vec<RouteEntry>,
    pub roas: Vec<RoaRecord>,
    pub relationships: Vec<Relationship>,
}

pub fn synthetic_table(n_routes: usize, n_roas: usize, seed: u64) -> SyntheticTable {
    let mut rng = rng(seed);
    let n_asns = 40_000u32;
    let asn = |i: u32| Asn(100_000 + i);
    let blocks = (n_roas as u32) * 5 / 4;
    let block = |k: u32| (16u32 << 24) + k * 4096;

    let mut holders = Vec::with_capacity(n_roas);
    let mut roas = Vec::with_capacity(n_roas);
    for k in 0..n_roas as u32 {
        let holder = asn(rng.random_range(0..n_asns));
        holders.push(holder);
        let prefix = IpPrefix::from_raw(Family::V4, (block(k) as u128) << 96, 20).unwrap();
        let max = *[20u8, 22, 24].choose(&mut rng).unwrap();
        roas.push(RoaRecord::new(holder, prefix, max, "TA").unwrap());
    }

    let peers: Vec<Asn> = (0..30).map(|i| Asn(3000 + i)).collect();
    let mut routes = Vec::with_capacity(n_routes);
    for _ in 0..n_routes {
        let k = rng.random_range(0..blocks);
        let len = *[20u8, 21, 22, 23, 24].choose(&mut rng).unwrap();
        let offset = rng.random_range(0..4096u32) & !((1u32 << (32 - len)) - 1);
        let prefix = IpPrefix::from_raw(Family::V4, ((block(k) + offset) as u128) << 96, len).unwrap();
        let origin = match holders.get(k as usize) {
            Some(&h) if rng.random_bool(0.85) => h,
            _ => asn(rng.random_range(0..n_asns)),
        };
        let mut hops = vec![*peers.choose(&mut rng).unwrap()];
        for _ in 0..rng.random_range(0..4) {
            hops.push(asn(rng.random_range(0..n_asns)));
        }
        if rng.random_bool(0.1) {
            hops.push(origin);
        }
        hops.push(origin);
        let mut route = RouteEntry::new(prefix, AsPath::from_sequence(hops).unwrap());
        route.peer = route.path.hops().first().copied();
        routes.push(route);
    }

    let mut relationships = Vec::new();
    let mut seen = HashSet::new();
    for _ in 0..n_asns as usize * 2 {
        let a = asn(rng.random_range(0..n_asns));
        let b = asn(rng.random_range(0..n_asns));
        if a != b && seen.insert((a.min(b), a.max(b))) {
            relationships.push(Relationship {
                a,
                b,
                kind: RelationshipKind::ProviderOf,
            });
        }
    }
    SyntheticTable {
        routes,
        roas,
        relationships,
    }
}

//------------ Scenarios -----------------------------------------------------

/// Generates a scenario into `dir`, runs the file-based pipeline on it and
/// returns (expected, actual), both sorted.
pub fn run_scenario(spec: ScenarioSpec, dir: &Path) -> (Vec<ExpectedPair>, Vec<ExpectedPair>) {
    let manifest = scenarios::generate(spec, dir).unwrap();
    let expected = scenarios::read_expected(&manifest.expected_path).unwrap();
    let graph = load_relgraph(&manifest.relationships).unwrap();
    let c = classify_files(
        &manifest.rib,
        &manifest.roas,
        &graph,
        &ClassifyOptions::default(),
        &NoopProbe,
    )
    .unwrap();
    let mut actual: Vec<ExpectedPair> = c
        .pairs
        .iter()
        .map(|p| ExpectedPair {
            prefix: p.prefix,
            origin: p.origin,
            class: p.class,
        })
        .collect();
    actual.sort();
    (expected, actual)
}

//------------ HTTP ----------------------------------------------------------

/// A minimal blocking HTTP/1.1 GET. Returns (status, body).
pub fn http_get(addr: SocketAddr, path: &str) -> (u16, String) {
    let mut stream = TcpStream::connect(addr).unwrap();
    write!(
        stream,
        "GET {path} HTTP/1.1\r\nHost: {addr}\r\nConnection: close\r\n\r\n"
    )
    .unwrap();
    let mut raw = Vec::new();
    stream.read_to_end(&mut raw).unwrap();
    let text = String::from_utf8(raw).unwrap();
    let (head, body) = text.split_once("\r\n\r\n").expect("http response");
    let status = head
        .split_whitespace()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .expect("status code");
    let chunked = head
        .lines()
        .any(|l| l.eq_ignore_ascii_case("transfer-encoding: chunked"));
    let body = if chunked { dechunk(body) } else { body.to_string() };
    (status, body)
}

fn dechunk(mut s: &str) -> String {
    let mut out = String::new();
    loop {
        let (size, rest) = s.split_once("\r\n").unwrap();
        let n = usize::from_str_radix(size.trim(), 16).unwrap();
        if n == 0 {
            return out;
        }
        out.push_str(&rest[..n]);
        s = &rest[n + 2..];
    }
}

/// Serves `report` on an ephemeral local port from a background thread.
pub fn spawn_server(report: rovclass::report::ClassificationReport) -> SocketAddr {
    let listener = std::net::TcpListener::bind("127.0.0.1:0").unwrap();
    listener.set_nonblocking(true).unwrap();
    let addr = listener.local_addr().unwrap();
    let store = std::sync::Arc::new(rovclass::report::SharedStore::new(report));
    std::thread::spawn(move || {
        let runtime = tokio::runtime::Builder::new_multi_thread()
            .worker_threads(4)
            .enable_all()
            .build()
            .unwrap();
        runtime.block_on(async move {
            let listener = tokio::net::TcpListener::from_std(listener).unwrap();
            rovclass::report::serve(store, listener).await.unwrap();
        });
    });
    addr
}
pub mod checks;
