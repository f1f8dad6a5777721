//! Synthetic ground-truth fixtures, one topology per false-alarm class plus
//! negative controls.
//!
//! Each topology uses the minimal set of ASes needed to reproduce the
//! scenario. ASNs come from the 16-bit private range (64512-65534) and
//! prefixes from the benchmarking block 198.18.0.0/15, both relabeled per
//! seed. The same (name, seed) always produces byte-identical files.
//!
//! [`compose`] builds larger fixtures out of one-pair units for scale and
//! proportion tests.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{self, Relationship};
use crate::model::{AsPath, Asn, InvalidClass, IpPrefix, RelationshipKind, RoaRecord, RouteEntry};

pub const EXPECTED_FILE: &str = "expected.json";

const PRIVATE_ASN_FIRST: u32 = 64512;
const PRIVATE_ASN_COUNT: usize = 1023;
const TRUST_ANCHORS: [&str; 5] = ["AFRINIC", "APNIC", "ARIN", "LACNIC", "RIPE"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioName {
    LoadBalancing,
    FailingToAggregate,
    Multihoming,
    Singlehoming,
    Provider,
    Transfer,
    ValidControl,
    UnknownControl,
    HijackControl,
}

impl ScenarioName {
    pub const ALL: [ScenarioName; 9] = [
        ScenarioName::LoadBalancing,
        ScenarioName::FailingToAggregate,
        ScenarioName::Multihoming,
        ScenarioName::Singlehoming,
        ScenarioName::Provider,
        ScenarioName::Transfer,
        ScenarioName::ValidControl,
        ScenarioName::UnknownControl,
        ScenarioName::HijackControl,
    ];

    /// The six class scenarios.
    pub const CLASSES: [ScenarioName; 6] = [
        ScenarioName::LoadBalancing,
        ScenarioName::FailingToAggregate,
        ScenarioName::Multihoming,
        ScenarioName::Singlehoming,
        ScenarioName::Provider,
        ScenarioName::Transfer,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ScenarioName::LoadBalancing => "load-balancing",
            ScenarioName::FailingToAggregate => "failing-to-aggregate",
            ScenarioName::Multihoming => "multihoming",
            ScenarioName::Singlehoming => "singlehoming",
            ScenarioName::Provider => "provider",
            ScenarioName::Transfer => "transfer",
            ScenarioName::ValidControl => "valid-control",
            ScenarioName::UnknownControl => "unknown-control",
            ScenarioName::HijackControl => "hijack-control",
        }
    }

    /// The class a class scenario exercises.
    pub fn class(self) -> Option<InvalidClass> {
        match self {
            ScenarioName::LoadBalancing => Some(InvalidClass::LoadBalancing),
            ScenarioName::FailingToAggregate => Some(InvalidClass::FailingToAggregate),
            ScenarioName::Multihoming => Some(InvalidClass::Multihoming),
            ScenarioName::Singlehoming => Some(InvalidClass::Singlehoming),
            ScenarioName::Provider => Some(InvalidClass::Provider),
            ScenarioName::Transfer => Some(InvalidClass::Transfer),
            _ => None,
        }
    }
}

impl fmt::Display for ScenarioName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ScenarioName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ScenarioName::ALL
            .into_iter()
            .find(|n| n.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown scenario {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ScenarioSpec {
    pub name: ScenarioName,
    pub seed: u64,
}

/// One expected invalid pair.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ExpectedPair {
    pub prefix: IpPrefix,
    pub origin: Asn,
    pub class: InvalidClass,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Fixture {
    pub routes: Vec<RouteEntry>,
    pub roas: Vec<RoaRecord>,
    pub relationships: Vec<Relationship>,
    /// Sorted by (prefix, origin).
    pub expected: Vec<ExpectedPair>,
}

#[derive(Clone, Debug)]
pub struct Manifest {
    pub rib: PathBuf,
    pub roas: PathBuf,
    pub relationships: PathBuf,
    pub expected_path: PathBuf,
    pub expected: Vec<ExpectedPair>,
}

//------------ Builders ------------------------------------------------------

#[derive(Default)]
struct Builder {
    fixture: Fixture,
    collector: Option<Asn>,
}

impl Builder {
    fn announce(&mut self, prefix: IpPrefix, path: &[Asn]) {
        let path = AsPath::from_sequence(path.to_vec()).expect("non-empty path");
        self.fixture.routes.push(RouteEntry {
            prefix,
            path,
            peer: self.collector,
        });
    }

    fn roa(&mut self, asn: Asn, prefix: IpPrefix, max_length: u8, ta: &str) {
        self.fixture
            .roas
            .push(RoaRecord::new(asn, prefix, max_length, ta).expect("valid fixture ROA"));
    }

    fn provider(&mut self, provider: Asn, customer: Asn) {
        self.fixture.relationships.push(Relationship {
            a: provider,
            b: customer,
            kind: RelationshipKind::ProviderOf,
        });
    }

    fn expect(&mut self, prefix: IpPrefix, origin: Asn, class: InvalidClass) {
        self.fixture.expected.push(ExpectedPair {
            prefix,
            origin,
            class,
        });
    }

    fn finish(mut self) -> Fixture {
        self.fixture.expected.sort();
        self.fixture
    }
}

/// A /23 and its two /24 halves.
#[derive(Clone, Copy)]
struct Block {
    whole: IpPrefix,
    low: IpPrefix,
    high: IpPrefix,
}

impl Block {
    fn new(base: u32) -> Block {
        let p =
            |bits: u32, len| IpPrefix::from_raw(crate::model::Family::V4, (bits as u128) << 96, len).unwrap();
        Block {
            whole: p(base, 23),
            low: p(base, 24),
            high: p(base + 256, 24),
        }
    }
}

/// Relabeling for one seeded fixture: five distinct ASNs, two disjoint
/// blocks and a trust anchor.
struct Labels {
    asn: [Asn; 5],
    block: Block,
    other_block: Block,
    trust_anchor: &'static str,
}

impl Labels {
    fn new(seed: u64) -> Labels {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let picked = sample(&mut rng, PRIVATE_ASN_COUNT, 5);
        let mut asn = [Asn(0); 5];
        for (slot, i) in asn.iter_mut().zip(picked.iter()) {
            *slot = Asn(PRIVATE_ASN_FIRST + i as u32);
        }
        let blocks = sample(&mut rng, 256, 2);
        // 198.18.0.0/15 holds 256 /23 blocks
        let base = u32::from(std::net::Ipv4Addr::new(198, 18, 0, 0));
        let ta = TRUST_ANCHORS[rng.random_range(0..TRUST_ANCHORS.len())];
        Labels {
            asn,
            block: Block::new(base + blocks.index(0) as u32 * 512),
            other_block: Block::new(base + blocks.index(1) as u32 * 512),
            trust_anchor: ta,
        }
    }
}

/// Builds a fixture in memory.
pub fn build(spec: ScenarioSpec) -> Fixture {
    let labels = Labels::new(spec.seed);
    // `as1` .. `as5` follow the AS numbering of the scenario drawings.
    let [as1, as2, as3, as4, as5] = labels.asn;
    let b = labels.block;
    let ta = labels.trust_anchor;
    let mut f = Builder::default();
    use InvalidClass as C;

    match spec.name {
        ScenarioName::LoadBalancing => {
            // AS1 splits its /23 over providers AS2 and AS3; AS4 validates.
            f.collector = Some(as4);
            f.roa(as1, b.whole, 23, ta);
            f.announce(b.whole, &[as4, as2, as1]);
            f.announce(b.low, &[as4, as2, as1]);
            f.announce(b.high, &[as4, as3, as1]);
            f.provider(as2, as1);
            f.provider(as3, as1);
            f.provider(as4, as2);
            f.provider(as4, as3);
            f.expect(b.low, as1, C::LoadBalancing);
            f.expect(b.high, as1, C::LoadBalancing);
        }
        ScenarioName::FailingToAggregate => {
            // AS1 announces the /23 and a /24 under the same export policy.
            f.collector = Some(as4);
            f.roa(as1, b.whole, 23, ta);
            f.announce(b.whole, &[as4, as3, as2, as1]);
            f.announce(b.low, &[as4, as3, as2, as1]);
            f.provider(as2, as1);
            f.provider(as3, as2);
            f.provider(as4, as3);
            f.expect(b.low, as1, C::FailingToAggregate);
        }
        ScenarioName::Multihoming => {
            // AS2 delegates a /24 to AS1, which is also homed to AS3.
            f.collector = Some(as4);
            f.roa(as2, b.whole, 24, ta);
            f.announce(b.whole, &[as4, as2]);
            f.announce(b.low, &[as4, as3, as1]);
            f.provider(as2, as1);
            f.provider(as3, as1);
            f.provider(as4, as2);
            f.provider(as4, as3);
            f.expect(b.low, as1, C::Multihoming);
        }
        ScenarioName::Singlehoming => {
            // AS1's only provider AS2 passes the customer /24 through
            // without aggregating it.
            f.collector = Some(as3);
            f.roa(as2, b.whole, 24, ta);
            f.announce(b.whole, &[as3, as2]);
            f.announce(b.low, &[as3, as2, as1]);
            f.provider(as2, as1);
            f.provider(as3, as2);
            f.expect(b.low, as1, C::Singlehoming);
        }
        ScenarioName::Provider => {
            // AS1 holds the ROA but AS2 originates the /24 itself.
            f.collector = Some(as3);
            f.roa(as1, b.low, 24, ta);
            f.announce(b.low, &[as3, as2]);
            f.provider(as2, as1);
            f.provider(as3, as2);
            f.expect(b.low, as2, C::Provider);
        }
        ScenarioName::Transfer => {
            // The /24 moved from AS2 to AS5; AS2's ROA was never updated.
            f.collector = Some(as3);
            f.roa(as2, b.whole, 24, ta);
            f.announce(b.low, &[as3, as5]);
            f.provider(as3, as5);
            f.provider(as3, as2);
            f.expect(b.low, as5, C::Transfer);
        }
        ScenarioName::ValidControl => {
            f.collector = Some(as2);
            f.roa(as1, b.whole, 24, ta);
            f.announce(b.whole, &[as2, as1]);
            f.announce(b.low, &[as2, as1]);
            f.provider(as2, as1);
        }
        ScenarioName::UnknownControl => {
            f.collector = Some(as2);
            f.roa(as1, b.whole, 24, ta);
            f.announce(labels.other_block.whole, &[as2, as3]);
            f.provider(as2, as1);
            f.provider(as2, as3);
        }
        ScenarioName::HijackControl => {
            // AS4 announces a more-specific of AS1's space. It is related
            // to neither AS1 nor AS1's providers, so the rules cannot tell
            // it from a transfer.
            f.collector = Some(as3);
            f.roa(as1, b.whole, 23, ta);
            f.announce(b.whole, &[as3, as2, as1]);
            f.announce(b.low, &[as3, as4]);
            f.provider(as2, as1);
            f.provider(as3, as2);
            f.provider(as3, as4);
            f.expect(b.low, as4, C::Transfer);
        }
    }
    f.finish()
}

fn write_file(path: &Path, write: impl FnOnce(&mut Vec<u8>) -> Result<()>) -> Result<()> {
    let mut buf = Vec::new();
    write(&mut buf)?;
    fs::write(path, buf).map_err(|e| Error::file(path, e))
}

/// Writes a fixture as `rib.txt`, `roas.csv`, `as-rel.txt` and
/// `expected.json` into `dir`, creating it if needed.
pub fn write_fixture(fixture: &Fixture, dir: &Path) -> Result<Manifest> {
    fs::create_dir_all(dir).map_err(|e| Error::file(dir, e))?;
    let manifest = Manifest {
        rib: dir.join(ingest::RIB_FILE),
        roas: dir.join(ingest::ROA_FILE),
        relationships: dir.join(ingest::REL_FILE),
        expected_path: dir.join(EXPECTED_FILE),
        expected: fixture.expected.clone(),
    };
    write_file(&manifest.rib, |b| ingest::write_rib(b, &fixture.routes))?;
    write_file(&manifest.roas, |b| ingest::write_roas(b, &fixture.roas))?;
    write_file(&manifest.relationships, |b| {
        ingest::write_relationships(b, &fixture.relationships)
    })?;
    write_file(&manifest.expected_path, |b| {
        serde_json::to_writer_pretty(&mut *b, &fixture.expected)?;
        b.push(b'\n');
        Ok(())
    })?;
    Ok(manifest)
}

/// Generates the fixture for `spec` into `out`.
pub fn generate(spec: ScenarioSpec, out: &Path) -> Result<Manifest> {
    write_fixture(&build(spec), out)
}

pub fn read_expected(path: &Path) -> Result<Vec<ExpectedPair>> {
    let data = fs::read(path).map_err(|e| Error::file(path, e))?;
    Ok(serde_json::from_slice(&data)?)
}

//------------ Composite fixtures --------------------------------------------

/// One building block of a composite fixture, yielding exactly one invalid
/// pair of `class`. `slot` selects a disjoint /23 inside 10.0.0.0/8 and a
/// private block of 32-bit ASNs; distinct units need distinct slots.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Unit {
    pub class: InvalidClass,
    pub slot: u32,
}

pub const MAX_SLOTS: u32 = 1 << 15;
const UNIT_ASN_BASE: u32 = 4_200_000_000;
const UNIT_ASN_STRIDE: u32 = 8;

fn add_unit(f: &mut Builder, unit: Unit) {
    assert!(unit.slot < MAX_SLOTS, "slot {} out of range", unit.slot);
    let block = Block::new((10u32 << 24) + unit.slot * 512);
    let a = |i: u32| Asn(UNIT_ASN_BASE + unit.slot * UNIT_ASN_STRIDE + i);
    let (collector, origin, up1, up2) = (a(0), a(1), a(2), a(3));
    let ta = "TA-UNIT";
    let p = |f: &mut Builder, path: &[Asn], prefix| {
        f.fixture.routes.push(RouteEntry {
            prefix,
            path: AsPath::from_sequence(path.to_vec()).unwrap(),
            peer: Some(collector),
        })
    };
    use InvalidClass as C;
    match unit.class {
        C::LoadBalancing => {
            f.roa(origin, block.whole, 23, ta);
            p(f, &[collector, up1, origin], block.whole);
            p(f, &[collector, up2, origin], block.low);
            f.provider(up1, origin);
            f.provider(up2, origin);
            f.expect(block.low, origin, C::LoadBalancing);
        }
        C::FailingToAggregate => {
            f.roa(origin, block.whole, 23, ta);
            p(f, &[collector, up1, origin], block.whole);
            p(f, &[collector, up1, origin], block.low);
            f.provider(up1, origin);
            f.expect(block.low, origin, C::FailingToAggregate);
        }
        C::Multihoming => {
            f.roa(up1, block.whole, 24, ta);
            p(f, &[collector, up1], block.whole);
            p(f, &[collector, up2, origin], block.low);
            f.provider(up1, origin);
            f.provider(up2, origin);
            f.expect(block.low, origin, C::Multihoming);
        }
        C::Singlehoming => {
            f.roa(up1, block.whole, 24, ta);
            p(f, &[collector, up1], block.whole);
            p(f, &[collector, up1, origin], block.low);
            f.provider(up1, origin);
            f.expect(block.low, origin, C::Singlehoming);
        }
        C::Provider => {
            f.roa(origin, block.low, 24, ta);
            p(f, &[collector, up1], block.low);
            f.provider(up1, origin);
            f.expect(block.low, up1, C::Provider);
        }
        C::Transfer => {
            f.roa(up1, block.whole, 24, ta);
            p(f, &[collector, origin], block.low);
            f.provider(collector, origin);
            f.expect(block.low, origin, C::Transfer);
        }
        C::Other => {
            // Over-long announcement by the ROA holder with no announced
            // parent or sibling.
            f.roa(origin, block.whole, 23, ta);
            p(f, &[collector, up1, origin], block.low);
            f.provider(up1, origin);
            f.expect(block.low, origin, C::Other);
        }
    }
}

/// Builds a fixture from units.
pub fn compose(units: &[Unit]) -> Fixture {
    let mut f = Builder::default();
    for &unit in units {
        add_unit(&mut f, unit);
    }
    f.finish()
}

/// Units for a per-class count vector (rule-table order), assigned
/// consecutive slots.
pub fn units_for_counts(counts: [u64; 7]) -> Vec<Unit> {
    let mut units = Vec::new();
    for (class, &n) in InvalidClass::ALL.iter().zip(&counts) {
        for _ in 0..n {
            units.push(Unit {
                class: *class,
                slot: units.len() as u32,
            });
        }
    }
    units
}
