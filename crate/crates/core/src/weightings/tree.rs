//! Leaf-labeled trees with internal valence at least 3: Newick parsing,
//! T-partitions, enumeration of unrooted binary trees, and the cyclic
//! orderings induced by planar embeddings.

use super::CyclicOrdering;
use std::collections::BTreeSet;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TreeError {
    #[error("malformed tree literal: {0}")]
    Parse(String),
    #[error("leaf labels must be exactly 1..={expected}, found {found:?}")]
    BadLabels { expected: usize, found: Vec<usize> },
    #[error("internal node of valence {0} < 3")]
    LowValence(usize),
    #[error("tree is not binary")]
    NotBinary,
    #[error("a tree needs at least 3 leaves")]
    TooSmall,
}

/// An `[n]`-labeled tree: leaves carry labels `1..=n`, internal nodes have
/// valence at least 3. Nodes `0..n` are the leaves (node `i` has label
/// `i + 1`); internal nodes follow.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledTree {
    n: usize,
    adjacency: Vec<Vec<usize>>,
}

impl LabeledTree {
    /// Builds a tree from its edge list over nodes `0..node_count`, where
    /// nodes `0..n` are leaves labeled `1..=n`.
    pub fn from_edges(
        n: usize,
        node_count: usize,
        edges: &[(usize, usize)],
    ) -> Result<Self, TreeError> {
        if n < 3 {
            return Err(TreeError::TooSmall);
        }
        let mut adjacency = vec![Vec::new(); node_count];
        for &(a, b) in edges {
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        let tree = LabeledTree { n, adjacency };
        tree.validate()?;
        Ok(tree)
    }

    fn validate(&self) -> Result<(), TreeError> {
        let nodes = self.adjacency.len();
        let edges: usize = self.adjacency.iter().map(Vec::len).sum::<usize>() / 2;
        if edges + 1 != nodes {
            return Err(TreeError::Parse("not a tree (wrong edge count)".into()));
        }
        // connectivity
        let mut seen = vec![false; nodes];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &w in &self.adjacency[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(TreeError::Parse("not connected".into()));
        }
        for (v, nbrs) in self.adjacency.iter().enumerate() {
            if v < self.n {
                if nbrs.len() != 1 {
                    return Err(TreeError::Parse(format!(
                        "leaf {} has valence {}",
                        v + 1,
                        nbrs.len()
                    )));
                }
            } else if nbrs.len() < 3 {
                return Err(TreeError::LowValence(nbrs.len()));
            }
        }
        Ok(())
    }

    pub fn leaf_count(&self) -> usize {
        self.n
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn is_binary(&self) -> bool {
        self.adjacency
            .iter()
            .enumerate()
            .all(|(v, nbrs)| v < self.n || nbrs.len() == 3)
    }

    /// Leaf sets (as bitmasks over labels-1) of the component on the `a` side
    /// after deleting edge `(a, b)`.
    fn side_mask(&self, a: usize, b: usize) -> u32 {
        let mut mask = 0u32;
        let mut stack = vec![a];
        let mut seen = vec![false; self.adjacency.len()];
        seen[a] = true;
        seen[b] = true;
        while let Some(v) = stack.pop() {
            if v < self.n {
                mask |= 1 << v;
            }
            for &w in &self.adjacency[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        mask
    }

    /// The partitions of `[n]` induced by internal edges (both leaf sides of
    /// size >= 2), each as the bitmask of the side not containing label `n`.
    pub fn tree_partitions(&self) -> Vec<u32> {
        let mut out = BTreeSet::new();
        let full = (1u32 << self.n) - 1;
        let last = 1u32 << (self.n - 1);
        for a in self.n..self.adjacency.len() {
            for &b in &self.adjacency[a] {
                if b < a {
                    continue;
                }
                if b < self.n {
                    continue; // leaf edge: singleton side
                }
                let mask = self.side_mask(a, b);
                let side = if mask & last == 0 { mask } else { full & !mask };
                if side.count_ones() >= 2 && (full & !side).count_ones() >= 2 {
                    out.insert(side);
                }
            }
        }
        out.into_iter().collect()
    }

    /// All cyclic orderings induced by planar embeddings (clockwise leaf
    /// order), one per reflection class: exactly `2^(n-3)` for binary trees.
    pub fn planar_orderings(&self) -> Result<Vec<CyclicOrdering>, TreeError> {
        if !self.is_binary() {
            return Err(TreeError::NotBinary);
        }
        // walk from leaf 0 (label 1); at each internal node choose the order
        // of the two non-entry branches
        let root_internal = self.adjacency[0][0];
        let mut results: Vec<Vec<usize>> = Vec::new();
        expand(self, root_internal, 0, vec![1usize], &mut results);
        let mut seen = BTreeSet::new();
        for seq in results {
            // canonical representative of the reflection pair: a cyclic
            // ordering and its reversal induce the same contiguity structure
            let rev: Vec<usize> = std::iter::once(seq[0])
                .chain(seq[1..].iter().rev().copied())
                .collect();
            seen.insert(seq.min(rev));
        }
        Ok(seen
            .into_iter()
            .map(|seq| CyclicOrdering::new(seq).expect("valid ordering"))
            .collect())
    }

    /// Newick-style literal, e.g. `((1,2),(3,4),5);`.
    pub fn parse(text: &str) -> Result<Self, TreeError> {
        let s = text.trim().trim_end_matches(';').trim();
        // first pass: collect leaf labels
        let mut chars = s.chars().peekable();
        let mut raw_labels = Vec::new();
        while let Some(c) = chars.next() {
            if c.is_ascii_digit() {
                let mut num = c.to_digit(10).unwrap() as usize;
                while let Some(d) = chars.peek().and_then(|c| c.to_digit(10)) {
                    num = num * 10 + d as usize;
                    chars.next();
                }
                raw_labels.push(num);
            }
        }
        let n = raw_labels.len();
        if n < 3 {
            return Err(TreeError::TooSmall);
        }
        let mut sorted = raw_labels;
        sorted.sort_unstable();
        if sorted != (1..=n).collect::<Vec<_>>() {
            return Err(TreeError::BadLabels {
                expected: n,
                found: sorted,
            });
        }
        let mut edges = Vec::new();
        let mut next_node = n;
        let mut pos = 0usize;
        let bytes: Vec<char> = s.chars().collect();
        let root = parse_node(&bytes, &mut pos, n, &mut next_node, &mut edges)?;
        if pos != bytes.len() {
            return Err(TreeError::Parse(format!(
                "trailing input at byte {pos} of `{s}`"
            )));
        }
        // rooted binary notation has a degree-2 root: suppress it, as the
        // trees here are unrooted
        let degree = edges
            .iter()
            .filter(|&&(a, b)| a == root || b == root)
            .count();
        if degree == 2 {
            let nbrs: Vec<usize> = edges
                .iter()
                .filter(|&&(a, b)| a == root || b == root)
                .map(|&(a, b)| if a == root { b } else { a })
                .collect();
            edges.retain(|&(a, b)| a != root && b != root);
            edges.push((nbrs[0], nbrs[1]));
            // compact node ids above the removed root
            for e in edges.iter_mut() {
                if e.0 > root {
                    e.0 -= 1;
                }
                if e.1 > root {
                    e.1 -= 1;
                }
            }
            next_node -= 1;
        }
        LabeledTree::from_edges(n, next_node, &edges)
    }

    /// Newick rendering with node `n`'s internal neighbor as the root.
    pub fn to_newick(&self) -> String {
        let root = self.adjacency[self.n - 1][0];
        let mut parts = Vec::new();
        for &w in &self.adjacency[root] {
            parts.push(render(self, w, root));
        }
        format!("({});", parts.join(","))
    }
}

fn render(t: &LabeledTree, v: usize, parent: usize) -> String {
    if v < t.leaf_count() {
        return (v + 1).to_string();
    }
    let parts: Vec<String> = t.adjacency[v]
        .iter()
        .filter(|&&w| w != parent)
        .map(|&w| render(t, w, v))
        .collect();
    format!("({})", parts.join(","))
}

/// Appends all clockwise leaf sequences of the subtree at `v` (entered from
/// `parent`) to each prefix.
fn expand(t: &LabeledTree, v: usize, parent: usize, prefix: Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if v < t.leaf_count() {
        let mut p = prefix;
        p.push(v + 1);
        out.push(p);
        return;
    }
    let children: Vec<usize> = t.adjacency[v].iter().copied().filter(|&w| w != parent).collect();
    debug_assert_eq!(children.len(), 2);
    for (a, b) in [(children[0], children[1]), (children[1], children[0])] {
        let mut mid = Vec::new();
        expand(t, a, v, prefix.clone(), &mut mid);
        for seq in mid {
            expand(t, b, v, seq, out);
        }
    }
}

fn parse_node(
    s: &[char],
    pos: &mut usize,
    n: usize,
    next_node: &mut usize,
    edges: &mut Vec<(usize, usize)>,
) -> Result<usize, TreeError> {
    if *pos >= s.len() {
        return Err(TreeError::Parse("unexpected end of input".into()));
    }
    if s[*pos] == '(' {
        *pos += 1;
        let node = *next_node;
        *next_node += 1;
        loop {
            let child = parse_node(s, pos, n, next_node, edges)?;
            edges.push((node, child));
            match s.get(*pos) {
                Some(',') => {
                    *pos += 1;
                }
                Some(')') => {
                    *pos += 1;
                    break;
                }
                other => {
                    return Err(TreeError::Parse(format!(
                        "expected `,` or `)` at position {pos:?}, found {other:?}"
                    )))
                }
            }
        }
        Ok(node)
    } else if s[*pos].is_ascii_digit() {
        let mut num = 0usize;
        while let Some(d) = s.get(*pos).and_then(|c| c.to_digit(10)) {
            num = num * 10 + d as usize;
            *pos += 1;
        }
        if num == 0 || num > n {
            return Err(TreeError::BadLabels {
                expected: n,
                found: vec![num],
            });
        }
        Ok(num - 1)
    } else {
        Err(TreeError::Parse(format!(
            "unexpected character `{}` at {}",
            s[*pos], *pos
        )))
    }
}

/// Enumerates all `[n]`-labeled unrooted binary trees ((2n-5)!! of them) by
/// inserting leaves into every edge of the smaller trees.
pub fn all_binary_trees(n: usize) -> Vec<LabeledTree> {
    assert!(n >= 3);
    // seed: the 3-star on leaves 0,1,2 with internal node `n`
    let seed: Vec<(usize, usize)> = vec![(0, n), (1, n), (2, n)];
    let mut trees = vec![seed];
    for leaf in 3..n {
        let mut next = Vec::new();
        for edges in &trees {
            for (i, &(a, b)) in edges.iter().enumerate() {
                // subdivide edge (a,b) with new internal node, attach leaf
                let new_internal = n + leaf - 2;
                let mut e = edges.clone();
                e[i] = (a, new_internal);
                e.push((new_internal, b));
                e.push((new_internal, leaf));
                next.push(e);
            }
        }
        trees = next;
    }
    trees
        .into_iter()
        .map(|edges| {
            let node_count = 2 * n - 2;
            LabeledTree::from_edges(n, node_count, &edges).expect("generated trees are valid")
        })
        .collect()
}

impl fmt::Display for LabeledTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_newick())
    }
}
