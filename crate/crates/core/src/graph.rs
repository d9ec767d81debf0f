//! Undirected simple graphs with stable vertex labels, vertex subsets, and the
//! cover/independence/clique predicates together with the profit function.
//!
//! Vertices are addressed by dense indices `0..n`. Each index carries an
//! opaque `u64` label that survives subgraph and complement operations, so a
//! vertex of a reduced graph can always be traced back to its origin.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Undirected simple graph. Immutable after construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    labels: Vec<u64>,
    adj: Vec<Vec<usize>>,
    num_edges: usize,
}

impl Graph {
    /// Edgeless graph on `n` vertices labelled `0..n`.
    pub fn empty(n: usize) -> Self {
        Self {
            labels: (0..n as u64).collect(),
            adj: vec![Vec::new(); n],
            num_edges: 0,
        }
    }

    /// Builds a graph on `n` vertices labelled `0..n`. Duplicate edges (in
    /// either orientation) are merged; self-loops and out-of-range endpoints
    /// are rejected.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        Self::with_labels((0..n as u64).collect(), edges)
    }

    /// Same as [`Graph::from_edges`] with explicit labels. Labels must be
    /// distinct.
    pub fn with_labels<I>(labels: Vec<u64>, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let n = labels.len();
        {
            let mut sorted = labels.clone();
            sorted.sort_unstable();
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                return Err(domain("vertex labels must be distinct"));
            }
        }
        let mut adj = vec![Vec::new(); n];
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(domain(format!(
                    "edge ({u}, {v}) has an endpoint outside 0..{n}"
                )));
            }
            if u == v {
                return Err(domain(format!("self-loop at vertex {u}")));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        let mut twice = 0;
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
            twice += list.len();
        }
        Ok(Self {
            labels,
            adj,
            num_edges: twice / 2,
        })
    }

    /// Complete graph on `n` vertices.
    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
        Self::from_edges(n, edges).expect("complete graph edges are valid")
    }

    /// Cycle `0-1-...-(n-1)-0`; `n >= 3`.
    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "a cycle needs at least three vertices");
        Self::from_edges(n, (0..n).map(|i| (i, (i + 1) % n))).expect("cycle edges are valid")
    }

    /// Path `0-1-...-(n-1)`.
    pub fn path(n: usize) -> Self {
        Self::from_edges(n, (1..n).map(|i| (i - 1, i))).expect("path edges are valid")
    }

    /// Star with center 0 and `leaves` leaves.
    pub fn star(leaves: usize) -> Self {
        Self::from_edges(leaves + 1, (1..=leaves).map(|i| (0, i))).expect("star edges are valid")
    }

    pub fn num_vertices(&self) -> usize {
        self.adj.len()
    }

    pub fn num_edges(&self) -> usize {
        self.num_edges
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn labels(&self) -> &[u64] {
        &self.labels
    }

    pub fn label(&self, v: usize) -> u64 {
        self.labels[v]
    }

    /// Dense index of the vertex carrying `label`, if any.
    pub fn index_of(&self, label: u64) -> Option<usize> {
        self.labels.iter().position(|&l| l == label)
    }

    /// Sorted neighbor list of `v`.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u != v && self.adj[u].binary_search(&v).is_ok()
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, ns)| ns.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    /// Edge set expressed in labels, each pair ordered `(min, max)` and the
    /// list sorted. Useful for comparing graphs across relabelings.
    pub fn label_edges(&self) -> Vec<(u64, u64)> {
        let mut out: Vec<_> = self
            .edges()
            .map(|(u, v)| {
                let (a, b) = (self.labels[u], self.labels[v]);
                (a.min(b), a.max(b))
            })
            .collect();
        out.sort_unstable();
        out
    }

    /// Complement graph on the same labelled vertex set.
    pub fn complement(&self) -> Graph {
        let n = self.num_vertices();
        let mut adj = Vec::with_capacity(n);
        let mut twice = 0;
        for u in 0..n {
            let mine = &self.adj[u];
            let mut j = 0;
            let mut list = Vec::with_capacity(n.saturating_sub(1 + mine.len()));
            for v in 0..n {
                if j < mine.len() && mine[j] == v {
                    j += 1;
                    continue;
                }
                if v != u {
                    list.push(v);
                }
            }
            twice += list.len();
            adj.push(list);
        }
        Graph {
            labels: self.labels.clone(),
            adj,
            num_edges: twice / 2,
        }
    }

    /// Subgraph induced on `keep` (dense indices of `self`). The new graph
    /// lists vertices in the order given; labels are carried over.
    pub fn induced_subgraph(&self, keep: &[usize]) -> Graph {
        let mut position = HashMap::with_capacity(keep.len());
        for (i, &v) in keep.iter().enumerate() {
            position.insert(v, i);
        }
        let labels = keep.iter().map(|&v| self.labels[v]).collect();
        let mut edges = Vec::new();
        for (i, &v) in keep.iter().enumerate() {
            for w in &self.adj[v] {
                if let Some(&j) = position.get(w) {
                    if i < j {
                        edges.push((i, j));
                    }
                }
            }
        }
        Graph::with_labels(labels, edges).expect("induced subgraph of a simple graph is simple")
    }

    fn check_host(&self, s: &VertexSubset) -> Result<()> {
        if s.host_size() != self.num_vertices() {
            return Err(domain(format!(
                "subset indexes a graph with {} vertices, this graph has {}",
                s.host_size(),
                self.num_vertices()
            )));
        }
        Ok(())
    }

    /// True iff every edge has at least one endpoint in `s`.
    pub fn is_vertex_cover(&self, s: &VertexSubset) -> Result<bool> {
        self.check_host(s)?;
        Ok(self.edges().all(|(u, v)| s.contains(u) || s.contains(v)))
    }

    /// True iff no edge has both endpoints in `s`.
    pub fn is_independent_set(&self, s: &VertexSubset) -> Result<bool> {
        self.check_host(s)?;
        Ok(self.edges().all(|(u, v)| !(s.contains(u) && s.contains(v))))
    }

    /// True iff every pair of distinct members of `s` is adjacent.
    pub fn is_clique(&self, s: &VertexSubset) -> Result<bool> {
        self.check_host(s)?;
        let k = s.len();
        Ok(s
            .iter()
            .all(|u| self.adj[u].iter().filter(|&&w| s.contains(w)).count() == k - 1))
    }

    /// Number of edges with at least one endpoint in `s`.
    pub fn covered_edges(&self, s: &VertexSubset) -> Result<usize> {
        self.check_host(s)?;
        Ok(self
            .edges()
            .filter(|&(u, v)| s.contains(u) || s.contains(v))
            .count())
    }

    /// Profit-cover value `|E(s)| - |s|`, where `E(s)` are the edges touching
    /// `s`. Every subset is admissible.
    pub fn profit(&self, s: &VertexSubset) -> Result<i64> {
        Ok(self.covered_edges(s)? as i64 - s.len() as i64)
    }
}

/// A set of vertices of one particular host graph, stored as a membership mask.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct VertexSubset {
    mask: Vec<bool>,
    len: usize,
}

impl VertexSubset {
    pub fn empty(host_size: usize) -> Self {
        Self {
            mask: vec![false; host_size],
            len: 0,
        }
    }

    pub fn full(host_size: usize) -> Self {
        Self {
            mask: vec![true; host_size],
            len: host_size,
        }
    }

    /// Subset from member indices; duplicates are merged.
    pub fn from_members<I>(host_size: usize, members: I) -> Result<Self>
    where
        I: IntoIterator<Item = usize>,
    {
        let mut s = Self::empty(host_size);
        for v in members {
            if v >= host_size {
                return Err(domain(format!(
                    "vertex {v} is not in a graph with {host_size} vertices"
                )));
            }
            s.insert(v);
        }
        Ok(s)
    }

    pub fn from_mask(mask: Vec<bool>) -> Self {
        let len = mask.iter().filter(|&&b| b).count();
        Self { mask, len }
    }

    /// Subset encoded by the low `host_size` bits of `bits`; bit `v` set means
    /// vertex `v` is a member.
    pub fn from_bits(host_size: usize, bits: u64) -> Self {
        assert!(host_size <= 64, "bit encoding holds at most 64 vertices");
        Self::from_mask((0..host_size).map(|v| bits >> v & 1 == 1).collect())
    }

    /// Inverse of [`VertexSubset::from_bits`].
    pub fn to_bits(&self) -> u64 {
        assert!(self.host_size() <= 64, "bit encoding holds at most 64 vertices");
        self.iter().fold(0u64, |acc, v| acc | 1 << v)
    }

    pub fn host_size(&self) -> usize {
        self.mask.len()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn contains(&self, v: usize) -> bool {
        self.mask.get(v).copied().unwrap_or(false)
    }

    pub fn insert(&mut self, v: usize) -> bool {
        let fresh = !self.mask[v];
        if fresh {
            self.mask[v] = true;
            self.len += 1;
        }
        fresh
    }

    pub fn remove(&mut self, v: usize) -> bool {
        let present = self.mask[v];
        if present {
            self.mask[v] = false;
            self.len -= 1;
        }
        present
    }

    /// Members in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.mask
            .iter()
            .enumerate()
            .filter_map(|(v, &b)| b.then_some(v))
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    /// `V \ self` within the same host.
    pub fn complement(&self) -> Self {
        Self {
            mask: self.mask.iter().map(|b| !b).collect(),
            len: self.mask.len() - self.len,
        }
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn subset(n: usize, m: &[usize]) -> VertexSubset {
        VertexSubset::from_members(n, m.iter().copied()).unwrap()
    }

    #[test]
    fn complement_of_triangle_is_edgeless() {
        let c = Graph::complete(3).complement();
        assert_eq!(c.num_vertices(), 3);
        assert_eq!(c.num_edges(), 0);
    }

    #[test]
    fn complement_of_path_is_single_edge() {
        let c = Graph::path(3).complement();
        assert_eq!(c.edges().collect::<Vec<_>>(), vec![(0, 2)]);
    }

    #[test]
    fn complement_edge_count() {
        let g = Graph::from_edges(6, [(0, 1), (1, 2), (2, 3), (4, 5), (0, 5)]).unwrap();
        assert_eq!(g.complement().num_edges(), 15 - 5);
        assert_eq!(g.complement().complement(), g);
    }

    #[test]
    fn duplicates_merged_self_loop_rejected() {
        let g = Graph::from_edges(3, [(0, 1), (1, 0), (0, 1), (1, 2)]).unwrap();
        assert_eq!(g.num_edges(), 2);
        assert!(Graph::from_edges(3, [(1, 1)]).is_err());
        assert!(Graph::from_edges(3, [(0, 3)]).is_err());
        assert!(Graph::with_labels(vec![4, 4], []).is_err());
    }

    #[test]
    fn cover_examples() {
        let k2 = Graph::complete(2);
        assert!(k2.is_vertex_cover(&subset(2, &[0])).unwrap());
        let c4 = Graph::cycle(4);
        assert!(c4.is_vertex_cover(&subset(4, &[0, 2])).unwrap());
        assert!(!c4.is_vertex_cover(&subset(4, &[0, 1])).unwrap());
        let e = Graph::empty(0);
        assert!(e.is_vertex_cover(&VertexSubset::empty(0)).unwrap());
    }

    #[test]
    fn clique_and_independence_examples() {
        let k3 = Graph::complete(3);
        let uv = subset(3, &[0, 1]);
        assert!(k3.is_clique(&uv).unwrap());
        assert!(!k3.is_independent_set(&uv).unwrap());
        for v in 0..3 {
            let s = subset(3, &[v]);
            assert!(k3.is_clique(&s).unwrap());
            assert!(k3.is_independent_set(&s).unwrap());
        }
    }

    #[test]
    fn profit_examples() {
        assert_eq!(Graph::complete(2).profit(&subset(2, &[0])).unwrap(), 0);
        assert_eq!(Graph::complete(3).profit(&subset(3, &[0, 1])).unwrap(), 1);
    }

    #[test]
    fn host_mismatch_is_domain_error() {
        let g = Graph::complete(3);
        assert!(g.is_vertex_cover(&VertexSubset::empty(4)).is_err());
        assert!(g.profit(&VertexSubset::empty(2)).is_err());
        assert!(VertexSubset::from_members(3, [3]).is_err());
    }

    #[test]
    fn induced_subgraph_keeps_labels() {
        let g = Graph::with_labels(vec![10, 20, 30, 40], [(0, 1), (1, 2), (2, 3)]).unwrap();
        let h = g.induced_subgraph(&[3, 2, 1]);
        assert_eq!(h.labels(), &[40, 30, 20]);
        assert_eq!(h.label_edges(), vec![(20, 30), (30, 40)]);
        assert_eq!(g.complement().labels(), g.labels());
    }

    #[test]
    fn bits_roundtrip() {
        let s = subset(5, &[0, 3, 4]);
        assert_eq!(s.to_bits(), 0b11001);
        assert_eq!(VertexSubset::from_bits(5, 0b11001), s);
    }
}
