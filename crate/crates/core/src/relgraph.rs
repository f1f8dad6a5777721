//! Directed AS relationship graph.
//!
//! Provider tests are direct-edge by default. [`ProviderMode::Transitive`]
//! follows provider chains upward and exists for sensitivity runs.

use std::collections::{HashMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::ingest::Relationship;
use crate::model::{Asn, RelationshipKind};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProviderMode {
    #[default]
    Direct,
    Transitive,
}

#[derive(Clone, Debug, Default)]
pub struct RelGraph {
    provider_edges: HashSet<(Asn, Asn)>,
    providers_of: HashMap<Asn, Vec<Asn>>,
    peers_of: HashMap<Asn, Vec<Asn>>,
    members: HashSet<Asn>,
}

impl RelGraph {
    pub fn from_edges(edges: &[Relationship]) -> Self {
        let mut graph = RelGraph::default();
        for rel in edges {
            if rel.a == rel.b {
                continue;
            }
            graph.members.insert(rel.a);
            graph.members.insert(rel.b);
            match rel.kind {
                RelationshipKind::ProviderOf => {
                    if graph.provider_edges.insert((rel.a, rel.b)) {
                        graph.providers_of.entry(rel.b).or_default().push(rel.a);
                    }
                }
                RelationshipKind::PeerWith => {
                    graph.peers_of.entry(rel.a).or_default().push(rel.b);
                    graph.peers_of.entry(rel.b).or_default().push(rel.a);
                }
            }
        }
        for list in graph.providers_of.values_mut().chain(graph.peers_of.values_mut()) {
            list.sort_unstable();
            list.dedup();
        }
        graph
    }

    /// True iff `provider -> customer` is a direct edge.
    pub fn is_provider(&self, provider: Asn, customer: Asn) -> bool {
        self.provider_edges.contains(&(provider, customer))
    }

    /// True iff `provider` is reachable from `customer` by following
    /// provider edges upward.
    pub fn is_provider_transitive(&self, provider: Asn, customer: Asn) -> bool {
        let mut seen = HashSet::new();
        let mut queue = VecDeque::from([customer]);
        while let Some(asn) = queue.pop_front() {
            for &p in self.providers(asn) {
                if p == provider {
                    return true;
                }
                if seen.insert(p) {
                    queue.push_back(p);
                }
            }
        }
        false
    }

    pub fn is_provider_with(&self, mode: ProviderMode, provider: Asn, customer: Asn) -> bool {
        match mode {
            ProviderMode::Direct => self.is_provider(provider, customer),
            ProviderMode::Transitive => self.is_provider_transitive(provider, customer),
        }
    }

    pub fn providers(&self, asn: Asn) -> &[Asn] {
        self.providers_of.get(&asn).map(Vec::as_slice).unwrap_or_default()
    }

    pub fn provider_count(&self, asn: Asn) -> usize {
        self.providers(asn).len()
    }

    pub fn peers(&self, asn: Asn) -> &[Asn] {
        self.peers_of.get(&asn).map(Vec::as_slice).unwrap_or_default()
    }

    /// True if the AS appears in any edge.
    pub fn contains(&self, asn: Asn) -> bool {
        self.members.contains(&asn)
    }

    pub fn provider_edge_count(&self) -> usize {
        self.provider_edges.len()
    }
}
