//! Core k-uniform hypergraph representation: links, degrees, induced
//! subgraphs, and the canonical text format.
//!
//! Vertices are dense integers `0..n`. `n` may exceed the support of the
//! edge set, so isolated vertices are first-class. Every edge is stored as a
//! sorted vector of distinct indices and the edge list itself is kept in
//! lexicographic order, which doubles as the canonical serialization order.

use std::collections::HashMap;
use std::fmt;
use std::sync::OnceLock;

use itertools::Itertools;
use thiserror::Error;

use crate::bits::Bits;

/// Vertex indices are packed 16 bits apiece into edge keys.
pub const MAX_VERTICES: usize = 1 << 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("vertex {vertex} out of range for n={n}")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("vertex set of size {size} too large for uniformity {k}")]
    SetTooLarge { size: usize, k: usize },
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invariant violation: {0}")]
    InvariantViolation(String),
}

/// Packs a short sorted vertex sequence into a single key; edges encoded this
/// way compare in the same order as the sequences themselves.
pub(crate) fn encode_set(vs: &[usize]) -> u128 {
    debug_assert!(vs.len() <= 8);
    let mut key = 0u128;
    for &v in vs {
        debug_assert!(v < MAX_VERTICES);
        key = key << 16 | v as u128;
    }
    key | (vs.len() as u128) << 120
}

/// A k-uniform hypergraph on vertex set `0..n`.
#[derive(Debug)]
pub struct KGraph {
    k: usize,
    n: usize,
    edges: Vec<Vec<usize>>,
    keys: Vec<u128>,
    completions: OnceLock<HashMap<u128, Bits>>,
}

impl Clone for KGraph {
    fn clone(&self) -> Self {
        KGraph {
            k: self.k,
            n: self.n,
            edges: self.edges.clone(),
            keys: self.keys.clone(),
            completions: OnceLock::new(),
        }
    }
}

impl PartialEq for KGraph {
    fn eq(&self, other: &Self) -> bool {
        self.k == other.k && self.n == other.n && self.keys == other.keys
    }
}
impl Eq for KGraph {}

/// A graph together with the order-preserving relabeling that produced it.
/// `old_of_new[v]` is the vertex of the original graph that became `v`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relabeled {
    pub graph: KGraph,
    pub old_of_new: Vec<usize>,
}

impl Relabeled {
    /// Inverse map: original vertex to new index, if retained.
    pub fn new_of_old(&self, old: usize) -> Option<usize> {
        self.old_of_new.binary_search(&old).ok()
    }
}

impl KGraph {
    pub fn new<I>(k: usize, n: usize, edges: I) -> Result<KGraph, GraphError>
    where
        I: IntoIterator<Item = Vec<usize>>,
    {
        if k == 0 || k > 8 {
            return Err(GraphError::InvalidParameters(format!(
                "uniformity must be in 1..=8, got {k}"
            )));
        }
        if n > MAX_VERTICES {
            return Err(GraphError::InvalidParameters(format!(
                "n={n} exceeds the supported maximum {MAX_VERTICES}"
            )));
        }
        let mut sorted: Vec<Vec<usize>> = Vec::new();
        for mut e in edges {
            e.sort_unstable();
            if e.len() != k || e.windows(2).any(|w| w[0] == w[1]) {
                return Err(GraphError::InvariantViolation(format!(
                    "edge {e:?} is not a {k}-element set"
                )));
            }
            if let Some(&v) = e.iter().find(|&&v| v >= n) {
                return Err(GraphError::VertexOutOfRange { vertex: v, n });
            }
            sorted.push(e);
        }
        if !sorted.is_empty() && k > n {
            return Err(GraphError::InvariantViolation(format!(
                "k={k} > n={n} but the edge set is nonempty"
            )));
        }
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(GraphError::InvariantViolation("duplicate edge".into()));
        }
        let keys = sorted.iter().map(|e| encode_set(e)).collect();
        Ok(KGraph {
            k,
            n,
            edges: sorted,
            keys,
            completions: OnceLock::new(),
        })
    }

    pub fn empty(k: usize, n: usize) -> KGraph {
        KGraph::new(k, n, []).expect("empty graph is always valid")
    }

    /// The complete k-graph on `r` vertices.
    pub fn complete(r: usize, k: usize) -> Result<KGraph, GraphError> {
        if k < 1 || k > r {
            return Err(GraphError::InvalidParameters(format!(
                "complete({r},{k}) requires 1 <= k <= r"
            )));
        }
        KGraph::new(k, r, (0..r).combinations(k))
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of edges.
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn edges(&self) -> &[Vec<usize>] {
        &self.edges
    }

    /// Membership test; `set` need not be sorted.
    pub fn has_edge(&self, set: &[usize]) -> bool {
        if set.len() != self.k {
            return false;
        }
        let mut s: Vec<usize> = set.to_vec();
        s.sort_unstable();
        self.keys.binary_search(&encode_set(&s)).is_ok()
    }

    pub(crate) fn has_edge_sorted(&self, sorted: &[usize]) -> bool {
        self.keys.binary_search(&encode_set(sorted)).is_ok()
    }

    /// For each (k-1)-subset of an edge, the bitset of vertices completing it
    /// to an edge. Built once on first use.
    pub(crate) fn completions(&self) -> &HashMap<u128, Bits> {
        self.completions.get_or_init(|| {
            let mut map: HashMap<u128, Bits> = HashMap::new();
            let mut sub = Vec::with_capacity(self.k.saturating_sub(1));
            for e in &self.edges {
                for drop in 0..self.k {
                    sub.clear();
                    sub.extend(e.iter().enumerate().filter(|&(i, _)| i != drop).map(|(_, &v)| v));
                    map.entry(encode_set(&sub))
                        .or_insert_with(|| Bits::zeros(self.n))
                        .set(e[drop]);
                }
            }
            map
        })
    }

    /// The link of `x`: the (k-1)-graph on the remaining n-1 vertices whose
    /// edges are the sets completing `x` to an edge. Vertices keep their
    /// relative order; the map back to original labels is in the result.
    pub fn link(&self, x: usize) -> Result<Relabeled, GraphError> {
        if x >= self.n {
            return Err(GraphError::VertexOutOfRange { vertex: x, n: self.n });
        }
        if self.k < 1 {
            unreachable!();
        }
        let relabel = |v: usize| if v < x { v } else { v - 1 };
        let edges = self
            .edges
            .iter()
            .filter(|e| e.contains(&x))
            .map(|e| e.iter().filter(|&&v| v != x).map(|&v| relabel(v)).collect())
            .collect::<Vec<Vec<usize>>>();
        let graph = if self.k == 1 {
            // Link of a vertex in a 1-graph would be 0-uniform; not supported.
            return Err(GraphError::InvalidParameters(
                "link is undefined for 1-uniform graphs".into(),
            ));
        } else {
            KGraph::new(self.k - 1, self.n - 1, edges)?
        };
        let old_of_new = (0..self.n).filter(|&v| v != x).collect();
        Ok(Relabeled { graph, old_of_new })
    }

    /// d_H(S): the number of (k-|S|)-sets T disjoint from S with T ∪ S ∈ H.
    pub fn degree(&self, s: &[usize]) -> Result<usize, GraphError> {
        if s.len() >= self.k {
            return Err(GraphError::SetTooLarge { size: s.len(), k: self.k });
        }
        if let Some(&v) = s.iter().find(|&&v| v >= self.n) {
            return Err(GraphError::VertexOutOfRange { vertex: v, n: self.n });
        }
        Ok(self
            .edges
            .iter()
            .filter(|e| s.iter().all(|v| e.contains(v)))
            .count())
    }

    /// Minimum of `degree` over all ell-subsets of the vertex set.
    pub fn min_degree(&self, ell: usize) -> Result<usize, GraphError> {
        if ell < 1 || ell >= self.k {
            return Err(GraphError::InvalidParameters(format!(
                "min_degree requires 1 <= ell <= k-1, got ell={ell}, k={}",
                self.k
            )));
        }
        if self.n < ell {
            return Ok(0);
        }
        let mut best = None;
        for s in (0..self.n).combinations(ell) {
            let d = self.degree(&s)?;
            best = Some(best.map_or(d, |b: usize| b.min(d)));
            if best == Some(0) {
                break;
            }
        }
        Ok(best.unwrap_or(0))
    }

    /// Subgraph induced on `w`, relabeled order-preservingly.
    pub fn induced(&self, w: &VertexSet) -> Result<Relabeled, GraphError> {
        if let Some(&v) = w.iter().find(|&&v| v >= self.n) {
            return Err(GraphError::VertexOutOfRange { vertex: v, n: self.n });
        }
        let old_of_new: Vec<usize> = w.iter().copied().collect();
        let mut new_of_old = vec![usize::MAX; self.n];
        for (new, &old) in old_of_new.iter().enumerate() {
            new_of_old[old] = new;
        }
        let edges = self
            .edges
            .iter()
            .filter(|e| e.iter().all(|&v| new_of_old[v] != usize::MAX))
            .map(|e| e.iter().map(|&v| new_of_old[v]).collect())
            .collect::<Vec<Vec<usize>>>();
        let graph = if edges.is_empty() {
            KGraph::empty(self.k, old_of_new.len())
        } else {
            KGraph::new(self.k, old_of_new.len(), edges)?
        };
        Ok(Relabeled { graph, old_of_new })
    }

    /// Parses text format v1: header "k n m", then m edge lines of k
    /// space-separated ascending vertex indices. '#' starts a comment line.
    pub fn parse(text: &str) -> Result<KGraph, GraphError> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim_start().starts_with('#') && !l.trim().is_empty());
        let (lno, header) = lines.next().ok_or(GraphError::Parse {
            line: 1,
            message: "missing header".into(),
        })?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        let parse_num = |s: &str, line: usize| {
            s.parse::<usize>().map_err(|_| GraphError::Parse {
                line,
                message: format!("expected integer, got {s:?}"),
            })
        };
        if fields.len() != 3 {
            return Err(GraphError::Parse {
                line: lno + 1,
                message: "header must be \"k n m\"".into(),
            });
        }
        let k = parse_num(fields[0], lno + 1)?;
        let n = parse_num(fields[1], lno + 1)?;
        let m = parse_num(fields[2], lno + 1)?;
        let mut edges = Vec::with_capacity(m);
        for _ in 0..m {
            let (lno, line) = lines.next().ok_or(GraphError::Parse {
                line: 0,
                message: format!("expected {m} edge lines"),
            })?;
            let mut edge = Vec::with_capacity(k);
            for f in line.split_whitespace() {
                edge.push(parse_num(f, lno + 1)?);
            }
            if edge.len() != k {
                return Err(GraphError::Parse {
                    line: lno + 1,
                    message: format!("expected {k} vertices, got {}", edge.len()),
                });
            }
            if edge.windows(2).any(|w| w[0] >= w[1]) {
                return Err(GraphError::Parse {
                    line: lno + 1,
                    message: "edge vertices must be strictly ascending".into(),
                });
            }
            edges.push(edge);
        }
        if let Some((lno, _)) = lines.next() {
            return Err(GraphError::Parse {
                line: lno + 1,
                message: "trailing content after edge list".into(),
            });
        }
        let mut seen = edges.clone();
        seen.sort_unstable();
        if seen.windows(2).any(|w| w[0] == w[1]) {
            return Err(GraphError::Parse {
                line: 0,
                message: "duplicate edge".into(),
            });
        }
        KGraph::new(k, n, edges)
    }

    /// Canonical serialization: header then lexicographically sorted edges.
    pub fn serialize(&self) -> String {
        let mut out = format!("{} {} {}\n", self.k, self.n, self.edges.len());
        for e in &self.edges {
            out.push_str(&e.iter().map(|v| v.to_string()).join(" "));
            out.push('\n');
        }
        out
    }
}

impl fmt::Display for KGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.serialize())
    }
}

/// A sorted, duplicate-free set of vertex indices.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct VertexSet {
    members: Vec<usize>,
}

impl VertexSet {
    pub fn new<I: IntoIterator<Item = usize>>(members: I) -> VertexSet {
        let mut m: Vec<usize> = members.into_iter().collect();
        m.sort_unstable();
        m.dedup();
        VertexSet { members: m }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.members.binary_search(&v).is_ok()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, usize> {
        self.members.iter()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.members
    }

    pub fn union(&self, other: &VertexSet) -> VertexSet {
        VertexSet::new(self.members.iter().chain(other.members.iter()).copied())
    }

    pub fn is_disjoint(&self, other: &VertexSet) -> bool {
        self.members.iter().all(|&v| !other.contains(v))
    }

    /// All vertices of `0..n` not in `self`.
    pub fn complement(&self, n: usize) -> VertexSet {
        VertexSet::new((0..n).filter(|&v| !self.contains(v)))
    }
}

impl fmt::Display for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.members.iter().join(" "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binom(n: usize, k: usize) -> usize {
        if k > n {
            return 0;
        }
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn complete_counts() {
        assert_eq!(KGraph::complete(3, 2).unwrap().len(), 3);
        assert_eq!(KGraph::complete(4, 3).unwrap().len(), 4);
        assert_eq!(KGraph::complete(5, 5).unwrap().len(), 1);
        assert!(matches!(
            KGraph::complete(2, 3),
            Err(GraphError::InvalidParameters(_))
        ));
    }

    #[test]
    fn link_basics() {
        let h = KGraph::new(3, 3, vec![vec![0, 1, 2]]).unwrap();
        let l = h.link(0).unwrap();
        assert_eq!(l.graph.k(), 2);
        assert_eq!(l.graph.n(), 2);
        assert_eq!(l.graph.edges(), &[vec![0, 1]]);
        assert_eq!(l.old_of_new, vec![1, 2]);

        let k4 = KGraph::complete(4, 3).unwrap();
        for x in 0..4 {
            let l = k4.link(x).unwrap();
            assert_eq!(l.graph, KGraph::complete(3, 2).unwrap());
        }

        // vertex in no edge
        let h = KGraph::new(3, 5, vec![vec![0, 1, 2]]).unwrap();
        assert!(h.link(4).unwrap().graph.is_empty());
        assert!(matches!(
            h.link(9),
            Err(GraphError::VertexOutOfRange { .. })
        ));
    }

    #[test]
    fn degree_and_min_degree() {
        let k6 = KGraph::complete(6, 3).unwrap();
        for ell in 1..3 {
            let s: Vec<usize> = (0..ell).collect();
            assert_eq!(k6.degree(&s).unwrap(), binom(6 - ell, 3 - ell));
        }
        assert_eq!(k6.min_degree(1).unwrap(), binom(5, 2));

        let h = KGraph::new(3, 4, vec![vec![0, 1, 2], vec![0, 1, 3]]).unwrap();
        assert_eq!(h.degree(&[0, 1]).unwrap(), 2);
        assert_eq!(h.min_degree(1).unwrap(), 1);
        assert!(matches!(
            h.degree(&[0, 1, 2]),
            Err(GraphError::SetTooLarge { .. })
        ));

        let e = KGraph::empty(3, 5);
        assert_eq!(e.min_degree(1).unwrap(), 0);
    }

    #[test]
    fn min_degree_isolated_vertex() {
        let h = KGraph::new(3, 4, vec![vec![0, 1, 2]]).unwrap();
        assert_eq!(h.min_degree(1).unwrap(), 0);
    }

    #[test]
    fn induced_subgraphs() {
        let k5 = KGraph::complete(5, 3).unwrap();
        let w = VertexSet::new([0, 2, 3, 4]);
        let ind = k5.induced(&w).unwrap();
        assert_eq!(ind.graph, KGraph::complete(4, 3).unwrap());
        assert_eq!(ind.old_of_new, vec![0, 2, 3, 4]);
        assert_eq!(ind.new_of_old(2), Some(1));
        assert_eq!(ind.new_of_old(1), None);

        let all = VertexSet::new(0..5);
        assert_eq!(k5.induced(&all).unwrap().graph, k5);
        let none = k5.induced(&VertexSet::default()).unwrap();
        assert_eq!(none.graph.n(), 0);
        assert!(none.graph.is_empty());
    }

    #[test]
    fn link_degree_consistency() {
        let h = KGraph::new(
            3,
            6,
            vec![vec![0, 1, 2], vec![0, 1, 3], vec![2, 4, 5], vec![0, 4, 5]],
        )
        .unwrap();
        for x in 0..6 {
            assert_eq!(h.link(x).unwrap().graph.len(), h.degree(&[x]).unwrap());
        }
    }

    #[test]
    fn parse_and_serialize() {
        let h = KGraph::parse("3 4 1\n0 1 2\n").unwrap();
        assert_eq!(h.k(), 3);
        assert_eq!(h.n(), 4);
        assert_eq!(h.edges(), &[vec![0, 1, 2]]);

        let text = "# comment\n3 5 2\n1 2 4\n0 1 2\n";
        let h = KGraph::parse(text).unwrap();
        assert_eq!(h.serialize(), "3 5 2\n0 1 2\n1 2 4\n");
        // round trip on canonical form
        assert_eq!(KGraph::parse(&h.serialize()).unwrap().serialize(), h.serialize());

        let dup = "3 4 2\n0 1 2\n0 1 2\n";
        assert!(matches!(KGraph::parse(dup), Err(GraphError::Parse { .. })));
        let bad = "3 4 1\n2 1 0\n";
        assert!(matches!(KGraph::parse(bad), Err(GraphError::Parse { line: 2, .. })));
    }

    #[test]
    fn rejects_bad_edges() {
        assert!(KGraph::new(3, 4, vec![vec![0, 1]]).is_err());
        assert!(KGraph::new(3, 4, vec![vec![0, 1, 4]]).is_err());
        assert!(KGraph::new(3, 4, vec![vec![0, 1, 1]]).is_err());
        assert!(KGraph::new(3, 2, vec![vec![0, 1, 2]]).is_err());
        // n < k is fine while empty
        assert!(KGraph::new(3, 2, vec![]).is_ok());
    }
}
