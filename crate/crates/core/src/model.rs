//! Shared domain vocabulary: prefixes, AS numbers and paths, routes, ROAs,
//! and the enumerations used by validation and classification.
//!
//! Everything here is immutable after construction and `Send + Sync`.

use std::fmt;
use std::net::{IpAddr, Ipv4Addr, Ipv6Addr};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

//------------ Family --------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    V4,
    V6,
}

impl Family {
    pub const fn max_len(self) -> u8 {
        match self {
            Family::V4 => 32,
            Family::V6 => 128,
        }
    }
}

//------------ IpPrefix ------------------------------------------------------

/// An address-family-tagged network prefix in canonical form.
///
/// The network address is stored left-aligned in a `u128`, so bit `i` of the
/// prefix is bit `127 - i` of `bits` for both families. All bits past `len`
/// are zero.
///
/// The derived ordering (family, address, length) places every prefix before
/// all prefixes it covers, which makes a sorted sequence a pre-order walk of
/// the coverage forest.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IpPrefix {
    family: Family,
    bits: u128,
    len: u8,
}

const fn mask(len: u8) -> u128 {
    if len == 0 {
        0
    } else {
        u128::MAX << (128 - len as u32)
    }
}

#[allow(clippy::len_without_is_empty)]
impl IpPrefix {
    /// Builds a prefix from left-aligned bits, masking anything past `len`.
    pub fn from_raw(family: Family, bits: u128, len: u8) -> Result<Self> {
        if len > family.max_len() {
            return Err(Error::Format(format!(
                "prefix length {len} exceeds {} for {family:?}",
                family.max_len()
            )));
        }
        let bits = if family == Family::V4 {
            bits & mask(32)
        } else {
            bits
        };
        Ok(IpPrefix {
            family,
            bits: bits & mask(len),
            len,
        })
    }

    /// Builds a prefix from an address and length. The flag is true when the
    /// address carried host bits that had to be masked off.
    pub fn from_addr(addr: IpAddr, len: u8) -> Result<(Self, bool)> {
        let (family, bits) = match addr {
            IpAddr::V4(a) => (Family::V4, (u32::from(a) as u128) << 96),
            IpAddr::V6(a) => (Family::V6, u128::from(a)),
        };
        let prefix = Self::from_raw(family, bits, len)?;
        Ok((prefix, prefix.bits != bits))
    }

    pub fn v4(a: u8, b: u8, c: u8, d: u8, len: u8) -> Result<Self> {
        Self::from_addr(IpAddr::V4(Ipv4Addr::new(a, b, c, d)), len).map(|(p, _)| p)
    }

    /// Parses `addr/len`, reporting whether host bits were masked.
    pub fn parse_lenient(s: &str) -> Result<(Self, bool)> {
        let (addr, len) = s
            .split_once('/')
            .ok_or_else(|| Error::Format(format!("prefix {s:?} has no length")))?;
        let addr: IpAddr = addr
            .parse()
            .map_err(|_| Error::Format(format!("bad address in prefix {s:?}")))?;
        let len: u8 = len
            .parse()
            .map_err(|_| Error::Format(format!("bad length in prefix {s:?}")))?;
        Self::from_addr(addr, len)
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn len(&self) -> u8 {
        self.len
    }

    /// Left-aligned network bits.
    pub fn bits(&self) -> u128 {
        self.bits
    }

    pub fn addr(&self) -> IpAddr {
        match self.family {
            Family::V4 => IpAddr::V4(Ipv4Addr::from((self.bits >> 96) as u32)),
            Family::V6 => IpAddr::V6(Ipv6Addr::from(self.bits)),
        }
    }

    /// Value of bit `i` (0 is the most significant).
    pub fn bit(&self, i: u8) -> u8 {
        debug_assert!(i < 128);
        ((self.bits >> (127 - i as u32)) & 1) as u8
    }

    /// True iff `self` is no longer than `other` and the first `self.len()`
    /// bits of both agree. Prefixes of different families never cover.
    pub fn covers(&self, other: &IpPrefix) -> bool {
        self.family == other.family && self.len <= other.len && (other.bits & mask(self.len)) == self.bits
    }

    /// Longest prefix covering both `self` and `other`. Both must share a
    /// family.
    pub fn common(&self, other: &IpPrefix) -> IpPrefix {
        debug_assert_eq!(self.family, other.family);
        let diff = (self.bits ^ other.bits).leading_zeros().min(128) as u8;
        let len = diff.min(self.len).min(other.len);
        IpPrefix {
            family: self.family,
            bits: self.bits & mask(len),
            len,
        }
    }

    /// The zero-length prefix of a family.
    pub fn root(family: Family) -> IpPrefix {
        IpPrefix {
            family,
            bits: 0,
            len: 0,
        }
    }
}

/// Free-function form of [`IpPrefix::covers`].
pub fn covers(a: &IpPrefix, b: &IpPrefix) -> bool {
    a.covers(b)
}

impl fmt::Display for IpPrefix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.addr(), self.len)
    }
}

impl fmt::Debug for IpPrefix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for IpPrefix {
    type Err = Error;

    /// Parses `addr/len`; host bits are masked silently.
    fn from_str(s: &str) -> Result<Self> {
        Self::parse_lenient(s).map(|(p, _)| p)
    }
}

impl Serialize for IpPrefix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for IpPrefix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

//------------ Asn -----------------------------------------------------------

/// A 32-bit autonomous system number.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Asn(pub u32);

impl fmt::Display for Asn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Debug for Asn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AS{}", self.0)
    }
}

impl FromStr for Asn {
    type Err = Error;

    /// Accepts `64496`, `AS64496` or `as64496`.
    fn from_str(s: &str) -> Result<Self> {
        let digits = s.strip_prefix("AS").or_else(|| s.strip_prefix("as")).unwrap_or(s);
        digits
            .parse()
            .map(Asn)
            .map_err(|_| Error::Format(format!("bad AS number {s:?}")))
    }
}

impl From<u32> for Asn {
    fn from(v: u32) -> Self {
        Asn(v)
    }
}

//------------ AsPath --------------------------------------------------------

/// An AS path. Hops are stored flat; `sets` marks the half-open hop ranges
/// that came from AS_SET segments.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AsPath {
    hops: Vec<Asn>,
    sets: Vec<(u16, u16)>,
}

#[allow(clippy::len_without_is_empty)]
impl AsPath {
    /// A plain AS_SEQUENCE path. Returns `None` for an empty sequence.
    pub fn from_sequence(hops: Vec<Asn>) -> Option<Self> {
        if hops.is_empty() || hops.len() > u16::MAX as usize {
            return None;
        }
        Some(AsPath {
            hops,
            sets: Vec::new(),
        })
    }

    pub fn hops(&self) -> &[Asn] {
        &self.hops
    }

    /// The last hop. For paths ending in an AS_SET this is the set's last
    /// member and not a meaningful origin; check [`AsPath::contains_set`].
    pub fn origin(&self) -> Asn {
        *self.hops.last().expect("AS paths are never empty")
    }

    pub fn contains_set(&self) -> bool {
        !self.sets.is_empty()
    }

    pub fn len(&self) -> usize {
        self.hops.len()
    }

    /// Removes consecutive duplicate hops outside AS_SET segments.
    pub fn collapse_prepends(&self) -> AsPath {
        if self.sets.is_empty() {
            let mut hops = self.hops.clone();
            hops.dedup();
            return AsPath {
                hops,
                sets: Vec::new(),
            };
        }
        let mut hops = Vec::with_capacity(self.hops.len());
        let mut sets = Vec::with_capacity(self.sets.len());
        let mut i = 0usize;
        let mut set_iter = self.sets.iter().peekable();
        while i < self.hops.len() {
            if let Some(&&(start, end)) = set_iter.peek() {
                if i == start as usize {
                    let new_start = hops.len() as u16;
                    hops.extend_from_slice(&self.hops[start as usize..end as usize]);
                    sets.push((new_start, hops.len() as u16));
                    i = end as usize;
                    set_iter.next();
                    continue;
                }
            }
            let in_seq_tail = sets.last().is_none_or(|&(_, e)| (e as usize) < hops.len());
            if !(in_seq_tail && hops.last() == Some(&self.hops[i])) {
                hops.push(self.hops[i]);
            }
            i += 1;
        }
        AsPath { hops, sets }
    }
}

impl fmt::Display for AsPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut i = 0usize;
        let mut sets = self.sets.iter().peekable();
        let mut first = true;
        while i < self.hops.len() {
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            match sets.peek() {
                Some(&&(start, end)) if start as usize == i => {
                    f.write_str("{")?;
                    for (k, asn) in self.hops[start as usize..end as usize].iter().enumerate() {
                        if k > 0 {
                            f.write_str(",")?;
                        }
                        write!(f, "{asn}")?;
                    }
                    f.write_str("}")?;
                    i = end as usize;
                    sets.next();
                }
                _ => {
                    write!(f, "{}", self.hops[i])?;
                    i += 1;
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for AsPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AsPath({self})")
    }
}

impl FromStr for AsPath {
    type Err = Error;

    /// Space-separated hops; AS_SET segments written as `{a,b,...}`.
    fn from_str(s: &str) -> Result<Self> {
        let mut hops = Vec::new();
        let mut sets = Vec::new();
        for token in s.split_ascii_whitespace() {
            if let Some(inner) = token.strip_prefix('{') {
                let inner = inner
                    .strip_suffix('}')
                    .ok_or_else(|| Error::Format(format!("unterminated AS_SET {token:?}")))?;
                let start = hops.len();
                for member in inner.split(',') {
                    hops.push(member.trim().parse::<Asn>()?);
                }
                sets.push((start, hops.len()));
            } else {
                hops.push(token.parse::<Asn>()?);
            }
        }
        if hops.is_empty() {
            return Err(Error::Format("empty AS path".into()));
        }
        if hops.len() > u16::MAX as usize {
            return Err(Error::Format("AS path too long".into()));
        }
        let sets = sets.into_iter().map(|(a, b)| (a as u16, b as u16)).collect();
        Ok(AsPath { hops, sets })
    }
}

impl Serialize for AsPath {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for AsPath {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

//------------ RouteEntry ----------------------------------------------------

/// One RIB line: a prefix and the AS path it was learned over.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RouteEntry {
    pub prefix: IpPrefix,
    pub path: AsPath,
    pub peer: Option<Asn>,
}

impl RouteEntry {
    pub fn new(prefix: IpPrefix, path: AsPath) -> Self {
        RouteEntry {
            prefix,
            path,
            peer: None,
        }
    }

    pub fn origin(&self) -> Asn {
        self.path.origin()
    }
}

//------------ RoaRecord -----------------------------------------------------

/// A validated ROA payload.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RoaRecord {
    pub asn: Asn,
    pub prefix: IpPrefix,
    pub max_length: u8,
    pub trust_anchor: String,
}

impl RoaRecord {
    pub fn new(asn: Asn, prefix: IpPrefix, max_length: u8, trust_anchor: impl Into<String>) -> Result<Self> {
        if max_length < prefix.len() || max_length > prefix.family().max_len() {
            return Err(Error::Format(format!(
                "max length {max_length} out of range for {prefix}"
            )));
        }
        Ok(RoaRecord {
            asn,
            prefix,
            max_length,
            trust_anchor: trust_anchor.into(),
        })
    }
}

impl fmt::Display for RoaRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "AS{}|{}|{}|{}",
            self.asn, self.prefix, self.max_length, self.trust_anchor
        )
    }
}

//------------ Enumerations --------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ValidationState {
    Unknown,
    Valid,
    Invalid,
}

/// The false-alarm category assigned to an invalid (prefix, origin) pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InvalidClass {
    LoadBalancing,
    FailingToAggregate,
    Multihoming,
    Singlehoming,
    Provider,
    Transfer,
    Other,
}

impl InvalidClass {
    /// All classes in rule-table order, `Other` last.
    pub const ALL: [InvalidClass; 7] = [
        InvalidClass::LoadBalancing,
        InvalidClass::FailingToAggregate,
        InvalidClass::Multihoming,
        InvalidClass::Singlehoming,
        InvalidClass::Provider,
        InvalidClass::Transfer,
        InvalidClass::Other,
    ];

    /// Stable identifier used in files and the query API.
    pub fn as_str(self) -> &'static str {
        match self {
            InvalidClass::LoadBalancing => "load-balancing",
            InvalidClass::FailingToAggregate => "failing-to-aggregate",
            InvalidClass::Multihoming => "multihoming",
            InvalidClass::Singlehoming => "singlehoming",
            InvalidClass::Provider => "provider",
            InvalidClass::Transfer => "transfer",
            InvalidClass::Other => "other",
        }
    }

    /// 1-based rule row, `None` for `Other`.
    pub fn rule_row(self) -> Option<u8> {
        match self {
            InvalidClass::Other => None,
            c => Some(c as u8 + 1),
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for InvalidClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for InvalidClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        InvalidClass::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::Format(format!("unknown class {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RelationshipKind {
    /// The first AS is a provider of the second.
    ProviderOf,
    /// Settlement-free peering; symmetric.
    PeerWith,
}
