//! An ordered-children trie over symbol sequences.

use crate::strings::Symbol;

#[derive(Clone, Debug, Default)]
struct Node {
    /// Sorted by symbol.
    children: Vec<(Symbol, u32)>,
    terminal: bool,
}

/// Set of symbol sequences with membership queries in
/// `O(len · log(branching))`.
#[derive(Clone, Debug)]
pub struct FingerprintTrie {
    nodes: Vec<Node>,
    keys: usize,
}

impl Default for FingerprintTrie {
    fn default() -> Self {
        Self::new()
    }
}

impl FingerprintTrie {
    pub fn new() -> Self {
        FingerprintTrie {
            nodes: vec![Node::default()],
            keys: 0,
        }
    }

    /// Number of distinct keys stored.
    pub fn len(&self) -> usize {
        self.keys
    }

    pub fn is_empty(&self) -> bool {
        self.keys == 0
    }

    pub fn insert(&mut self, key: &[Symbol]) -> bool {
        let mut at = 0usize;
        for &s in key {
            at = match self.nodes[at].children.binary_search_by_key(&s, |c| c.0) {
                Ok(k) => self.nodes[at].children[k].1 as usize,
                Err(k) => {
                    let id = self.nodes.len();
                    self.nodes.push(Node::default());
                    self.nodes[at].children.insert(k, (s, id as u32));
                    id
                }
            };
        }
        let fresh = !self.nodes[at].terminal;
        self.nodes[at].terminal = true;
        self.keys += usize::from(fresh);
        fresh
    }

    pub fn contains(&self, key: &[Symbol]) -> bool {
        let mut at = 0usize;
        for &s in key {
            match self.nodes[at].children.binary_search_by_key(&s, |c| c.0) {
                Ok(k) => at = self.nodes[at].children[k].1 as usize,
                Err(_) => return false,
            }
        }
        self.nodes[at].terminal
    }
}

impl<K: AsRef<[Symbol]>> FromIterator<K> for FingerprintTrie {
    fn from_iter<I: IntoIterator<Item = K>>(iter: I) -> Self {
        let mut t = FingerprintTrie::new();
        for k in iter {
            t.insert(k.as_ref());
        }
        t
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::HashSet;

    #[test]
    fn basics() {
        let mut t = FingerprintTrie::new();
        assert!(!t.contains(&[]));
        assert!(t.insert(&[1, 2, 3]));
        assert!(!t.insert(&[1, 2, 3]));
        assert!(t.insert(&[1, 2]));
        assert!(t.contains(&[1, 2, 3]));
        assert!(t.contains(&[1, 2]));
        assert!(!t.contains(&[1]));
        assert!(!t.contains(&[1, 2, 3, 4]));
        assert_eq!(t.len(), 2);
    }

    proptest! {
        #[test]
        fn matches_hash_set(
            keys in prop::collection::vec(prop::collection::vec(0u32..4, 0..=64), 0..=200),
            probes in prop::collection::vec(prop::collection::vec(0u32..4, 0..=64), 0..=50),
        ) {
            let trie: FingerprintTrie = keys.iter().collect();
            let set: HashSet<&Vec<u32>> = keys.iter().collect();
            prop_assert_eq!(trie.len(), set.len());
            for k in keys.iter().chain(&probes) {
                prop_assert_eq!(trie.contains(k), set.contains(k));
            }
        }
    }
}
