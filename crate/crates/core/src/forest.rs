//! The prefix aggregation forest over announced prefixes, and a coverage
//! index over ROAs.
//!
//! A node's parent is the longest announced prefix that properly covers it;
//! nodes without a parent are the maximal prefixes. Both structures are
//! frozen once built.

use crate::error::{Error, Result};
use crate::model::{AsPath, IpPrefix, RoaRecord, RouteEntry};
use crate::trie::PrefixTrie;

pub type NodeId = usize;

#[derive(Clone, Debug)]
pub struct ForestNode {
    pub prefix: IpPrefix,
    /// Distinct AS paths seen for this prefix, in first-seen order.
    pub paths: Vec<AsPath>,
    /// Distinct prepend-collapsed forms of `paths`, sorted.
    pub collapsed_paths: Vec<AsPath>,
    pub parent: Option<NodeId>,
    pub children: Vec<NodeId>,
}

#[derive(Clone, Debug, Default)]
pub struct Forest {
    nodes: Vec<ForestNode>,
    roots: Vec<NodeId>,
    // prefix -> insertion slot; `slot_to_node` maps slots to node ids
    index: PrefixTrie<u32>,
    slot_to_node: Vec<NodeId>,
}

/// Builds the forest. Node ids follow prefix order (v4 before v6), so the
/// node vector is a pre-order traversal of the forest.
pub fn build_forest(routes: &[RouteEntry]) -> Forest {
    let mut index: PrefixTrie<u32> = PrefixTrie::new();
    let mut slot_paths: Vec<Vec<AsPath>> = Vec::new();
    for route in routes {
        let slot = *index.entry_or_insert_with(route.prefix, || {
            slot_paths.push(Vec::new());
            (slot_paths.len() - 1) as u32
        });
        let paths = &mut slot_paths[slot as usize];
        if !paths.contains(&route.path) {
            paths.push(route.path.clone());
        }
    }

    let mut nodes: Vec<ForestNode> = Vec::with_capacity(slot_paths.len());
    let mut roots = Vec::new();
    let mut slot_to_node = vec![0; slot_paths.len()];
    let mut ancestors: Vec<NodeId> = Vec::new();
    for (prefix, &slot, depth) in index.iter() {
        ancestors.truncate(depth);
        let id = nodes.len();
        let parent = ancestors.last().copied();
        match parent {
            Some(p) => nodes[p].children.push(id),
            None => roots.push(id),
        }
        let paths = std::mem::take(&mut slot_paths[slot as usize]);
        let mut collapsed: Vec<AsPath> = paths.iter().map(AsPath::collapse_prepends).collect();
        collapsed.sort();
        collapsed.dedup();
        nodes.push(ForestNode {
            prefix: *prefix,
            paths,
            collapsed_paths: collapsed,
            parent,
            children: Vec::new(),
        });
        slot_to_node[slot as usize] = id;
        ancestors.push(id);
    }

    Forest {
        nodes,
        roots,
        index,
        slot_to_node,
    }
}

impl Forest {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[ForestNode] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> &ForestNode {
        &self.nodes[id]
    }

    pub fn roots(&self) -> &[NodeId] {
        &self.roots
    }

    pub fn lookup(&self, prefix: &IpPrefix) -> Option<NodeId> {
        self.index
            .get(prefix)
            .map(|&slot| self.slot_to_node[slot as usize])
    }

    /// Prefixes not covered by any other announced prefix.
    pub fn maximal_prefixes(&self) -> Vec<IpPrefix> {
        self.roots.iter().map(|&id| self.nodes[id].prefix).collect()
    }

    /// Parent of the node and its co-children. Roots have neither.
    pub fn parent_and_siblings(&self, prefix: &IpPrefix) -> Result<(Option<&ForestNode>, Vec<&ForestNode>)> {
        let id = self.lookup(prefix).ok_or(Error::NotFound(*prefix))?;
        let Some(parent) = self.nodes[id].parent else {
            return Ok((None, Vec::new()));
        };
        let siblings = self.siblings(id).map(|s| &self.nodes[s]).collect();
        Ok((Some(&self.nodes[parent]), siblings))
    }

    /// Ids of the co-children of `id` under its parent.
    pub fn siblings(&self, id: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes[id]
            .parent
            .map(|p| self.nodes[p].children.as_slice())
            .unwrap_or_default()
            .iter()
            .copied()
            .filter(move |&s| s != id)
    }
}

//------------ RoaIndex ------------------------------------------------------

/// ROAs keyed by prefix for coverage lookups.
#[derive(Clone, Debug, Default)]
pub struct RoaIndex {
    records: Vec<RoaRecord>,
    trie: PrefixTrie<Vec<u32>>,
}

impl RoaIndex {
    pub fn new(records: Vec<RoaRecord>) -> Self {
        let mut trie: PrefixTrie<Vec<u32>> = PrefixTrie::new();
        for (i, roa) in records.iter().enumerate() {
            trie.entry_or_insert_with(roa.prefix, Vec::new).push(i as u32);
        }
        RoaIndex { records, trie }
    }

    pub fn records(&self) -> &[RoaRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Every ROA whose prefix covers `prefix`, shortest ROA prefix first.
    pub fn lookup_covering(&self, prefix: &IpPrefix) -> Vec<&RoaRecord> {
        self.covering_iter(prefix).collect()
    }

    pub fn covering_iter<'a>(&'a self, prefix: &IpPrefix) -> impl Iterator<Item = &'a RoaRecord> + 'a {
        self.trie
            .covering(prefix)
            .flat_map(move |(_, ids)| ids.iter().map(move |&i| &self.records[i as usize]))
    }
}

impl FromIterator<RoaRecord> for RoaIndex {
    fn from_iter<I: IntoIterator<Item = RoaRecord>>(iter: I) -> Self {
        RoaIndex::new(iter.into_iter().collect())
    }
}
