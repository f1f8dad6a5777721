//! Path-compressed binary radix trie keyed by [`IpPrefix`], one tree per
//! address family.
//!
//! Nodes live in an arena. Internal branching nodes carry no value; only
//! inserted prefixes do. Each node's prefix covers the prefixes of all nodes
//! below it, and a child hangs off the bit right after its parent's length.

use crate::model::{Family, IpPrefix};

type NodeIdx = u32;

#[derive(Clone, Debug)]
struct Node<T> {
    prefix: IpPrefix,
    value: Option<T>,
    children: [Option<NodeIdx>; 2],
}

#[derive(Clone, Debug)]
pub struct PrefixTrie<T> {
    nodes: Vec<Node<T>>,
    len: usize,
}

impl<T> Default for PrefixTrie<T> {
    fn default() -> Self {
        Self::new()
    }
}

const V4_ROOT: NodeIdx = 0;
const V6_ROOT: NodeIdx = 1;

fn root_of(family: Family) -> NodeIdx {
    match family {
        Family::V4 => V4_ROOT,
        Family::V6 => V6_ROOT,
    }
}

impl<T> PrefixTrie<T> {
    pub fn new() -> Self {
        let root = |family| Node {
            prefix: IpPrefix::root(family),
            value: None,
            children: [None, None],
        };
        PrefixTrie {
            nodes: vec![root(Family::V4), root(Family::V6)],
            len: 0,
        }
    }

    /// Number of stored prefixes.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    fn push(&mut self, prefix: IpPrefix, value: Option<T>) -> NodeIdx {
        let idx = self.nodes.len() as NodeIdx;
        self.nodes.push(Node {
            prefix,
            value,
            children: [None, None],
        });
        idx
    }

    /// Returns the value slot for `prefix`, inserting `default()` if absent.
    pub fn entry_or_insert_with(&mut self, prefix: IpPrefix, default: impl FnOnce() -> T) -> &mut T {
        let idx = self.locate_or_create(prefix);
        let node = &mut self.nodes[idx as usize];
        if node.value.is_none() {
            self.len += 1;
        }
        node.value.get_or_insert_with(default)
    }

    /// Inserts `value`, returning any previous value for the prefix.
    pub fn insert(&mut self, prefix: IpPrefix, value: T) -> Option<T> {
        let idx = self.locate_or_create(prefix);
        let old = self.nodes[idx as usize].value.replace(value);
        if old.is_none() {
            self.len += 1;
        }
        old
    }

    fn locate_or_create(&mut self, prefix: IpPrefix) -> NodeIdx {
        let mut cur = root_of(prefix.family());
        loop {
            let cur_prefix = self.nodes[cur as usize].prefix;
            debug_assert!(cur_prefix.covers(&prefix));
            if cur_prefix.len() == prefix.len() {
                return cur;
            }
            let bit = prefix.bit(cur_prefix.len()) as usize;
            let Some(child) = self.nodes[cur as usize].children[bit] else {
                let new = self.push(prefix, None);
                self.nodes[cur as usize].children[bit] = Some(new);
                return new;
            };
            let child_prefix = self.nodes[child as usize].prefix;
            if child_prefix.covers(&prefix) {
                cur = child;
                continue;
            }
            let common = child_prefix.common(&prefix);
            if common.len() == prefix.len() {
                // The new prefix sits between `cur` and `child`.
                let new = self.push(prefix, None);
                let child_bit = child_prefix.bit(prefix.len()) as usize;
                self.nodes[new as usize].children[child_bit] = Some(child);
                self.nodes[cur as usize].children[bit] = Some(new);
                return new;
            }
            let branch = self.push(common, None);
            let new = self.push(prefix, None);
            let child_bit = child_prefix.bit(common.len()) as usize;
            let branch_node = &mut self.nodes[branch as usize];
            branch_node.children[child_bit] = Some(child);
            branch_node.children[1 - child_bit] = Some(new);
            self.nodes[cur as usize].children[bit] = Some(branch);
            return new;
        }
    }

    fn find(&self, prefix: &IpPrefix) -> Option<NodeIdx> {
        let mut cur = root_of(prefix.family());
        loop {
            let node = &self.nodes[cur as usize];
            if !node.prefix.covers(prefix) {
                return None;
            }
            if node.prefix.len() == prefix.len() {
                return Some(cur);
            }
            cur = node.children[prefix.bit(node.prefix.len()) as usize]?;
        }
    }

    pub fn get(&self, prefix: &IpPrefix) -> Option<&T> {
        self.find(prefix)
            .and_then(|idx| self.nodes[idx as usize].value.as_ref())
    }

    pub fn contains(&self, prefix: &IpPrefix) -> bool {
        self.get(prefix).is_some()
    }

    /// All stored entries whose prefix covers `prefix` (including an exact
    /// match), shortest first.
    pub fn covering<'a>(&'a self, prefix: &IpPrefix) -> Covering<'a, T> {
        Covering {
            trie: self,
            target: *prefix,
            next: Some(root_of(prefix.family())),
        }
    }

    /// All stored entries covered by `prefix` (including an exact match), in
    /// prefix order.
    pub fn covered_by<'a>(&'a self, prefix: &IpPrefix) -> Walk<'a, T> {
        let mut cur = Some(root_of(prefix.family()));
        let mut start = None;
        while let Some(idx) = cur {
            let node = &self.nodes[idx as usize];
            if prefix.covers(&node.prefix) {
                start = Some(idx);
                break;
            }
            if !node.prefix.covers(prefix) {
                break;
            }
            cur = node.children[prefix.bit(node.prefix.len()) as usize];
        }
        Walk {
            trie: self,
            stack: start.map(|s| vec![(s, 0)]).unwrap_or_default(),
        }
    }

    /// Pre-order walk over every stored entry (v4 then v6). Each item carries
    /// the number of stored ancestors of the entry.
    pub fn iter(&self) -> Walk<'_, T> {
        Walk {
            trie: self,
            stack: vec![(V6_ROOT, 0), (V4_ROOT, 0)],
        }
    }
}

pub struct Covering<'a, T> {
    trie: &'a PrefixTrie<T>,
    target: IpPrefix,
    next: Option<NodeIdx>,
}

impl<'a, T> Iterator for Covering<'a, T> {
    type Item = (&'a IpPrefix, &'a T);

    fn next(&mut self) -> Option<Self::Item> {
        while let Some(idx) = self.next {
            let node = &self.trie.nodes[idx as usize];
            if !node.prefix.covers(&self.target) {
                self.next = None;
                return None;
            }
            self.next = if node.prefix.len() < self.target.len() {
                node.children[self.target.bit(node.prefix.len()) as usize]
            } else {
                None
            };
            if let Some(value) = &node.value {
                return Some((&node.prefix, value));
            }
        }
        None
    }
}

/// Depth-first pre-order walk. Yields `(prefix, value, stored_ancestors)`
/// where `stored_ancestors` counts valued nodes above the entry within the
/// walked subtree.
pub struct Walk<'a, T> {
    trie: &'a PrefixTrie<T>,
    stack: Vec<(NodeIdx, usize)>,
}

impl<'a, T> Iterator for Walk<'a, T> {
    type Item = (&'a IpPrefix, &'a T, usize);

    fn next(&mut self) -> Option<Self::Item> {
        while let Some((idx, depth)) = self.stack.pop() {
            let node = &self.trie.nodes[idx as usize];
            let child_depth = depth + node.value.is_some() as usize;
            for child in node.children.iter().rev().flatten() {
                self.stack.push((*child, child_depth));
            }
            if let Some(value) = &node.value {
                return Some((&node.prefix, value, depth));
            }
        }
        None
    }
}
