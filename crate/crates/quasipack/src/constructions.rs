//! Seeded hypergraph generators: the color-sum construction, binomial random
//! k-graphs, and the link-replacement graph, plus the zero-color witness
//! layout.
//!
//! All randomness flows through a fixed, versioned discipline so runs are
//! bit-for-bit reproducible across platforms: each subset draws an
//! independent 64-bit word `splitmix64`-derived from (master seed, a
//! per-purpose tag, the subset's canonical encoding). Subsets can therefore
//! be evaluated in any order, or in parallel, with identical output.

use std::collections::BTreeMap;

use itertools::Itertools;
use num::bigint::BigUint;
use num::{BigRational, One, Signed};
use thiserror::Error;

use crate::hypercore::{encode_set, GraphError, KGraph};
use crate::layouts::{Antichain, Layout, LayoutError, LayoutPart};
use crate::ratio::ratio_int;

/// Bump when the seeding discipline or any draw changes meaning.
pub const GENERATOR_VERSION: u32 = 1;

/// Classical two-color Ramsey number r(3,3); stored for labeling only.
pub const RAMSEY_R_3_3: usize = 6;
/// Classical three-color Ramsey number r(3,3,3); stored for labeling only.
pub const RAMSEY_R_3_3_3: usize = 17;

const TAG_COLORING: u64 = 0x636f_6c6f_7269_6e67; // "coloring"
const TAG_GNP: u64 = 0x0000_0000_0067_6e70; // "gnp"
const TAG_LINK: u64 = 0x0000_0000_6c69_6e6b; // "link"

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConstructError {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Layout(#[from] LayoutError),
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// The per-subset word of the seeding discipline (generator version 1).
pub fn subset_word(seed: u64, tag: u64, subset: &[usize]) -> u64 {
    let key = encode_set(subset);
    let mut s = splitmix64(seed ^ splitmix64(tag));
    s = splitmix64(s ^ key as u64);
    s = splitmix64(s ^ (key >> 64) as u64);
    s
}

/// A total k-coloring of the (k-1)-subsets of [0,n).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coloring {
    k: usize,
    n: usize,
    colors: BTreeMap<Vec<usize>, u8>,
}

impl Coloring {
    pub fn new(
        k: usize,
        n: usize,
        colors: BTreeMap<Vec<usize>, u8>,
    ) -> Result<Coloring, ConstructError> {
        if k < 2 || n < k - 1 {
            return Err(ConstructError::InvalidParameters(format!(
                "coloring needs k >= 2 and n >= k-1, got k={k} n={n}"
            )));
        }
        let mut expected = 0usize;
        for (set, &c) in &colors {
            if set.len() != k - 1
                || !set.windows(2).all(|w| w[0] < w[1])
                || set.iter().any(|&v| v >= n)
            {
                return Err(ConstructError::InvalidParameters(format!(
                    "{set:?} is not a sorted (k-1)-subset of [0,{n})"
                )));
            }
            if usize::from(c) >= k {
                return Err(ConstructError::InvalidParameters(format!(
                    "color {c} out of range on {set:?}"
                )));
            }
            expected += 1;
        }
        let total = binomial(n, k - 1);
        if expected as u128 != total {
            return Err(ConstructError::InvalidParameters(format!(
                "coloring covers {expected} of {total} subsets"
            )));
        }
        Ok(Coloring { k, n, colors })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn color(&self, set: &[usize]) -> Option<u8> {
        self.colors.get(set).copied()
    }

    /// Sorted (k-1)-sets carrying a given color.
    pub fn class(&self, color: u8) -> Vec<Vec<usize>> {
        self.colors
            .iter()
            .filter(|(_, &c)| c == color)
            .map(|(s, _)| s.clone())
            .collect()
    }

    pub fn serialize(&self) -> String {
        let mut out = format!("coloring {} {}\n", self.k, self.n);
        for (set, c) in &self.colors {
            out.push_str(&set.iter().join(" "));
            out.push(' ');
            out.push_str(&c.to_string());
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<Coloring, ConstructError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (line, header) = lines.next().ok_or(ConstructError::Parse {
            line: 1,
            message: "empty input".into(),
        })?;
        let mut it = header.split_whitespace();
        if it.next() != Some("coloring") {
            return Err(ConstructError::Parse {
                line,
                message: "expected 'coloring k n' header".into(),
            });
        }
        let parse_num = |tok: Option<&str>, line: usize| -> Result<usize, ConstructError> {
            tok.and_then(|t| t.parse().ok()).ok_or(ConstructError::Parse {
                line,
                message: "expected 'coloring k n' header".into(),
            })
        };
        let k = parse_num(it.next(), line)?;
        let n = parse_num(it.next(), line)?;
        let mut colors = BTreeMap::new();
        for (line, l) in lines {
            let nums: Result<Vec<usize>, _> =
                l.split_whitespace().map(|t| t.parse::<usize>()).collect();
            let nums = nums.map_err(|_| ConstructError::Parse {
                line,
                message: format!("expected k-1 vertices and a color: {l:?}"),
            })?;
            if nums.len() != k {
                return Err(ConstructError::Parse {
                    line,
                    message: format!("expected {} numbers, got {}", k, nums.len()),
                });
            }
            let (set, c) = nums.split_at(k - 1);
            if colors.insert(set.to_vec(), c[0] as u8).is_some() {
                return Err(ConstructError::Parse {
                    line,
                    message: format!("duplicate subset {set:?}"),
                });
            }
        }
        Coloring::new(k, n, colors)
    }
}

fn binomial(n: usize, r: usize) -> u128 {
    if r > n {
        return 0;
    }
    let mut acc: u128 = 1;
    for i in 0..r {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Draws a uniform k-coloring of the (k-1)-sets and keeps each k-set whose
/// (k-1)-subset colors sum to something nonzero mod k.
pub fn gen_a(k: usize, n: usize, seed: u64) -> Result<(KGraph, Coloring), ConstructError> {
    if k < 2 || n < k {
        return Err(ConstructError::InvalidParameters(format!(
            "need k >= 2 and n >= k, got k={k} n={n}"
        )));
    }
    let mut colors = BTreeMap::new();
    for set in (0..n).combinations(k - 1) {
        let c = (subset_word(seed, TAG_COLORING, &set) % k as u64) as u8;
        colors.insert(set, c);
    }
    let mut edges = Vec::new();
    for cand in (0..n).combinations(k) {
        let mut sum = 0usize;
        for drop in 0..k {
            let sub: Vec<usize> = cand
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != drop)
                .map(|(_, &v)| v)
                .collect();
            sum += usize::from(colors[&sub]);
        }
        if sum % k != 0 {
            edges.push(cand);
        }
    }
    let graph = KGraph::new(k, n, edges)?;
    let coloring = Coloring::new(k, n, colors)?;
    Ok((graph, coloring))
}

/// Binomial random k-graph: each k-set kept independently with probability p.
pub fn gen_gnp(k: usize, n: usize, p: &BigRational, seed: u64) -> Result<KGraph, ConstructError> {
    if k == 0 {
        return Err(ConstructError::InvalidParameters("k must be positive".into()));
    }
    if p.is_negative() || *p > BigRational::one() {
        return Err(ConstructError::InvalidParameters(format!(
            "p must lie in [0,1], got {p}"
        )));
    }
    let num: BigUint = p.numer().to_biguint().expect("nonnegative");
    let den: BigUint = p.denom().to_biguint().expect("positive");
    let threshold = &num << 64u32; // keep iff word * den < p * 2^64 * den
    let mut edges = Vec::new();
    for cand in (0..n).combinations(k) {
        let word = BigUint::from(subset_word(seed, TAG_GNP, &cand));
        if word * &den < threshold {
            edges.push(cand);
        }
    }
    Ok(KGraph::new(k, n, edges)?)
}

/// A binomial k-graph with one vertex's link replaced by a fresh (k-1)-level
/// color-sum construction on the other n-1 vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinkReplacement {
    pub graph: KGraph,
    pub special: usize,
    /// The coloring behind the replacement link, on the n-1 non-special
    /// vertices (link vertex i corresponds to host vertex i+1).
    pub link_coloring: Coloring,
}

/// Builds the link-replacement graph: G^(k)(n,p) with special vertex 0 whose
/// link is replaced by the (k-1)-uniform color-sum graph on vertices 1..n.
pub fn gen_link_replacement(
    k: usize,
    n: usize,
    p: &BigRational,
    seed: u64,
) -> Result<LinkReplacement, ConstructError> {
    if k < 3 || n < k {
        return Err(ConstructError::InvalidParameters(format!(
            "need k >= 3 and n >= k, got k={k} n={n}"
        )));
    }
    let base = gen_gnp(k, n, p, seed)?;
    let special = 0usize;
    let (link, link_coloring) = gen_a(k - 1, n - 1, splitmix64(seed ^ splitmix64(TAG_LINK)))?;
    let mut edges: Vec<Vec<usize>> = base
        .edges()
        .iter()
        .filter(|e| !e.contains(&special))
        .cloned()
        .collect();
    for e in link.edges() {
        let mut full: Vec<usize> = e.iter().map(|&v| v + 1).collect();
        full.insert(0, special);
        edges.push(full);
    }
    edges.sort();
    let graph = KGraph::new(k, n, edges)?;
    Ok(LinkReplacement {
        graph,
        special,
        link_coloring,
    })
}

/// Default edge probability of the constructions: (k-1)/k.
pub fn default_density(k: usize) -> BigRational {
    ratio_int((k - 1) as u128) / ratio_int(k as u128)
}

/// The slack below which the zero-color layout witnesses a discrepancy
/// violation: (1/20)(k-1)/k^(k+1).
pub fn zero_layout_slack(k: usize) -> BigRational {
    ratio_int((k - 1) as u128) / (ratio_int(20) * ratio_int((k as u128).pow(k as u32 + 1)))
}

/// The layout with the color-0 class of (k-1)-sets in every coordinate of
/// the all-(k-1)-subsets antichain. The color-sum graph meets none of its
/// cliques.
pub fn zero_color_layout(c: &Coloring) -> Result<Layout, ConstructError> {
    let k = c.k();
    let antichain = Antichain::all_subsets_of_size(k, k - 1);
    let zero = KGraph::new(k - 1, c.n(), c.class(0))?;
    let parts = antichain
        .members()
        .iter()
        .map(|_| LayoutPart::Graph(zero.clone()))
        .collect();
    Ok(Layout::new(antichain, c.n(), parts)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::parse_ratio;

    #[test]
    fn deterministic() {
        let (g1, c1) = gen_a(3, 12, 42).unwrap();
        let (g2, c2) = gen_a(3, 12, 42).unwrap();
        assert_eq!(g1, g2);
        assert_eq!(c1, c2);
        let (g3, _) = gen_a(3, 12, 43).unwrap();
        assert_ne!(g1, g3);
    }

    #[test]
    fn color_sum_rule_exhaustive() {
        let (g, c) = gen_a(3, 14, 7).unwrap();
        for cand in (0..14).combinations(3) {
            let sum: usize = (0..3)
                .map(|d| {
                    let sub: Vec<usize> = cand
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| *i != d)
                        .map(|(_, &v)| v)
                        .collect();
                    usize::from(c.color(&sub).unwrap())
                })
                .sum();
            assert_eq!(g.has_edge(&cand), sum % 3 != 0, "at {cand:?}");
        }
    }

    #[test]
    fn monochromatic_triples_are_non_edges() {
        let (g, c) = gen_a(3, 16, 99).unwrap();
        for cand in (0..16).combinations(3) {
            let cols: Vec<u8> = (0..3)
                .map(|d| {
                    let sub: Vec<usize> = cand
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| *i != d)
                        .map(|(_, &v)| v)
                        .collect();
                    c.color(&sub).unwrap()
                })
                .collect();
            if cols[0] == cols[1] && cols[1] == cols[2] {
                assert!(!g.has_edge(&cand));
            }
        }
    }

    #[test]
    fn level_two_is_complete_bipartite() {
        // with k=2 the rule keeps exactly the pairs whose endpoint colors
        // differ
        let (g, c) = gen_a(2, 20, 5).unwrap();
        for cand in (0..20).combinations(2) {
            let a = c.color(&[cand[0]]).unwrap();
            let b = c.color(&[cand[1]]).unwrap();
            assert_eq!(g.has_edge(&cand), a != b);
        }
    }

    #[test]
    fn gnp_extremes() {
        let one = parse_ratio("1").unwrap();
        let zero = parse_ratio("0").unwrap();
        assert_eq!(gen_gnp(3, 8, &one, 1).unwrap(), KGraph::complete(8, 3).unwrap());
        assert_eq!(gen_gnp(3, 8, &zero, 1).unwrap(), KGraph::empty(3, 8));
        assert!(gen_gnp(3, 8, &parse_ratio("3/2").unwrap(), 1).is_err());
    }

    #[test]
    fn gnp_density_concentrates() {
        let p = parse_ratio("1/2").unwrap();
        let mut total = 0u128;
        let mut possible = 0u128;
        for seed in 0..50 {
            let g = gen_gnp(3, 30, &p, seed).unwrap();
            total += g.len() as u128;
            possible += binomial(30, 3);
        }
        let density = total as f64 / possible as f64;
        assert!((density - 0.5).abs() < 0.05, "density {density}");
    }

    #[test]
    fn link_replacement_structure() {
        let p = default_density(3);
        let lr = gen_link_replacement(3, 20, &p, 11).unwrap();
        assert_eq!(lr.special, 0);
        let link = lr.graph.link(0).unwrap();
        // the link is exactly the embedded 2-level construction
        let (a, _) = gen_a(2, 19, splitmix64(11 ^ splitmix64(TAG_LINK))).unwrap();
        let expect: Vec<Vec<usize>> = a
            .edges()
            .iter()
            .map(|e| {
                e.iter()
                    .map(|&v| link.new_of_old(v + 1).unwrap())
                    .sorted()
                    .collect()
            })
            .sorted()
            .collect();
        assert_eq!(link.graph.edges(), &expect[..]);
        // bipartite link: no triangle
        for t in (0..19).combinations(3) {
            let tri = (0..3).all(|d| {
                let pair: Vec<usize> = t
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| *i != d)
                    .map(|(_, &v)| v)
                    .collect();
                link.graph.has_edge(&pair)
            });
            assert!(!tri, "triangle {t:?} in replaced link");
        }
        // edges avoiding the special vertex match the plain binomial draw
        let base = gen_gnp(3, 20, &p, 11).unwrap();
        let away = |g: &KGraph| -> Vec<Vec<usize>> {
            g.edges().iter().filter(|e| !e.contains(&0)).cloned().collect()
        };
        assert_eq!(away(&lr.graph), away(&base));
    }

    #[test]
    fn zero_layout_misses_everything() {
        for seed in [3, 4, 5] {
            let (g, c) = gen_a(3, 13, seed).unwrap();
            let layout = zero_color_layout(&c).unwrap();
            assert_eq!(layout.antichain().members().len(), 3);
            assert_eq!(layout.intersect_count(&g).unwrap(), 0);
        }
    }

    #[test]
    fn coloring_round_trip() {
        let (_, c) = gen_a(3, 9, 2).unwrap();
        let text = c.serialize();
        assert!(text.starts_with("coloring 3 9\n"));
        assert_eq!(Coloring::parse(&text).unwrap(), c);
        assert!(Coloring::parse("coloring 3 9\n0 1 5\n").is_err());
        assert!(Coloring::parse("coloring 3 3\n0 1 0\n").is_err()); // incomplete
    }

    #[test]
    fn named_constants() {
        assert_eq!(zero_layout_slack(3), parse_ratio("1/810").unwrap());
        assert_eq!(default_density(3), parse_ratio("2/3").unwrap());
        assert_eq!(RAMSEY_R_3_3, 6);
        assert_eq!(RAMSEY_R_3_3_3, 17);
    }
}
