//! Certificate-producing decision procedures for adapted hypergraphs, the
//! antichain implication test, and the grid-graph builder used by the
//! absorber search.
//!
//! A certificate fixes an ordering of the pattern's edges and a labeling
//! (bijection onto [k], or onto [k-1] when a pinned vertex is excluded) per
//! edge; it verifies when every backward intersection's label set fits inside
//! some antichain member. Whether a partial ordering can be completed depends
//! only on the *set* of already-placed edges, so the search memoizes failed
//! placement sets and either returns a certificate, proves none exists, or
//! reports that the node budget ran out.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use itertools::Itertools;
use thiserror::Error;

use crate::hypercore::{GraphError, KGraph, VertexSet};
use crate::layouts::Antichain;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AdaptError {
    #[error("ground mismatch: {left} vs {right}")]
    GroundMismatch { left: usize, right: usize },
    #[error("malformed certificate: {0}")]
    MalformedCertificate(String),
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// One edge ordering with a label map per edge. `order[i]` indexes into the
/// pattern's canonical edge list; `labels[i]` maps each labeled vertex of
/// that edge to a label in 1..=k (pinned vertices of adapted-at edges are
/// omitted and the remaining vertices map onto 1..=k-1).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderedLabeling {
    pub order: Vec<usize>,
    pub labels: Vec<BTreeMap<usize, usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AdaptednessCertificate {
    /// Witness that F is I-adapted.
    Adapted { labeling: OrderedLabeling },
    /// Witness that F is (I,J)-adapted: the plain I-adapted part plus a
    /// special vertex labeled k in every edge through it.
    IjAdapted {
        i_labeling: OrderedLabeling,
        special_vertex: usize,
        special_labeling: OrderedLabeling,
    },
    /// Witness that F is (I,J)-adapted at the pinned vertices.
    AdaptedAt {
        pins: Vec<usize>,
        labeling: OrderedLabeling,
    },
}

/// Search mode for `find_certificate`.
#[derive(Debug, Clone)]
pub enum AdaptMode {
    Adapted,
    IjAdapted(Antichain),
    AdaptedAt(Antichain, VertexSet),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchOutcome {
    Found(AdaptednessCertificate),
    /// The whole search space was exhausted: no certificate exists.
    ProvenNone,
    /// The node cap was hit before the space was exhausted.
    BudgetExceeded,
}

impl SearchOutcome {
    pub fn certificate(&self) -> Option<&AdaptednessCertificate> {
        match self {
            SearchOutcome::Found(c) => Some(c),
            _ => None,
        }
    }
}

/// True iff every member of `b` is contained in some member of `a`,
/// i.e. discrepancy over `a` implies discrepancy over `b`.
pub fn antichain_implies(a: &Antichain, b: &Antichain) -> Result<bool, AdaptError> {
    if a.ground() != b.ground() {
        return Err(AdaptError::GroundMismatch {
            left: a.ground(),
            right: b.ground(),
        });
    }
    Ok(a.covers(b))
}

fn fits(labels: &BTreeSet<usize>, antichain: &Antichain) -> bool {
    antichain
        .members()
        .iter()
        .any(|m| labels.iter().all(|l| m.contains(l)))
}

/// Which rule an edge is labeled under.
enum EdgeRule {
    /// Bijection onto [k]; backward intersections judged against I.
    Plain,
    /// The excluded vertex is dropped (or labeled k in ij mode); the rest is
    /// a bijection onto [k-1] and backward intersections minus the excluded
    /// vertex are judged against J.
    Special { excluded: usize },
}

struct SearchCtx<'a> {
    edges: &'a [Vec<usize>],
    i_chain: &'a Antichain,
    j_chain: Option<&'a Antichain>,
    rules: Vec<EdgeRule>,
    budget: u64,
}

impl<'a> SearchCtx<'a> {
    /// First label map making `edge` placeable after every edge of `mask`.
    fn feasible_labels(&self, idx: usize, mask: u64) -> Option<BTreeMap<usize, usize>> {
        let edge = &self.edges[idx];
        let (labeled, chain, excluded): (Vec<usize>, &Antichain, Option<usize>) =
            match self.rules[idx] {
                EdgeRule::Plain => (edge.clone(), self.i_chain, None),
                EdgeRule::Special { excluded } => (
                    edge.iter().copied().filter(|&v| v != excluded).collect(),
                    self.j_chain.expect("special rule implies J"),
                    Some(excluded),
                ),
            };
        let width = labeled.len();
        'perm: for perm in (1..=width).permutations(width) {
            let map: BTreeMap<usize, usize> =
                labeled.iter().copied().zip(perm.iter().copied()).collect();
            for j in 0..self.edges.len() {
                if mask >> j & 1 == 0 {
                    continue;
                }
                let inter: BTreeSet<usize> = self.edges[j]
                    .iter()
                    .filter(|v| edge.contains(v) && Some(**v) != excluded)
                    .map(|v| map[v])
                    .collect();
                if !fits(&inter, chain) {
                    continue 'perm;
                }
            }
            return Some(map);
        }
        None
    }

    /// Memoized depth-first search over placement sets. Candidate edges are
    /// tried special-rule-first, then by descending overlap with the rest of
    /// the pattern.
    fn run(&self) -> Result<Option<OrderedLabeling>, ()> {
        let m = self.edges.len();
        let mut priority: Vec<usize> = (0..m).collect();
        let overlap: Vec<usize> = (0..m)
            .map(|i| {
                (0..m)
                    .filter(|&j| {
                        j != i && self.edges[j].iter().any(|v| self.edges[i].contains(v))
                    })
                    .count()
            })
            .collect();
        priority.sort_by_key(|&i| {
            let special = matches!(self.rules[i], EdgeRule::Special { .. });
            (std::cmp::Reverse(special), std::cmp::Reverse(overlap[i]), i)
        });

        let mut failed: HashSet<u64> = HashSet::new();
        let mut nodes: u64 = 0;
        let mut order = Vec::with_capacity(m);
        let mut labels = Vec::with_capacity(m);
        match self.rec(0, &priority, &mut order, &mut labels, &mut failed, &mut nodes) {
            Ok(true) => Ok(Some(OrderedLabeling { order, labels })),
            Ok(false) => Ok(None),
            Err(()) => Err(()),
        }
    }

    fn rec(
        &self,
        mask: u64,
        priority: &[usize],
        order: &mut Vec<usize>,
        labels: &mut Vec<BTreeMap<usize, usize>>,
        failed: &mut HashSet<u64>,
        nodes: &mut u64,
    ) -> Result<bool, ()> {
        let m = self.edges.len();
        if order.len() == m {
            return Ok(true);
        }
        if failed.contains(&mask) {
            return Ok(false);
        }
        *nodes += 1;
        if *nodes > self.budget {
            return Err(());
        }
        for &idx in priority {
            if mask >> idx & 1 == 1 {
                continue;
            }
            if let Some(map) = self.feasible_labels(idx, mask) {
                order.push(idx);
                labels.push(map);
                if self.rec(mask | 1 << idx, priority, order, labels, failed, nodes)? {
                    return Ok(true);
                }
                order.pop();
                labels.pop();
            }
        }
        failed.insert(mask);
        Ok(false)
    }
}

fn validate_j(k: usize, j: &Antichain) -> Result<(), AdaptError> {
    if j.ground() != k - 1 {
        return Err(AdaptError::GroundMismatch {
            left: k - 1,
            right: j.ground(),
        });
    }
    Ok(())
}

/// Complete backtracking search for an adaptedness certificate. A `budget`
/// bound on search nodes separates proven nonexistence from an aborted
/// search.
pub fn find_certificate(
    f: &KGraph,
    a: &Antichain,
    mode: &AdaptMode,
    budget: u64,
) -> Result<SearchOutcome, AdaptError> {
    let k = f.k();
    if a.ground() != k {
        return Err(AdaptError::GroundMismatch {
            left: k,
            right: a.ground(),
        });
    }
    if f.len() > 64 {
        return Err(AdaptError::InvalidParameters(
            "certificate search supports at most 64 edges".into(),
        ));
    }
    let plain_rules = || (0..f.len()).map(|_| EdgeRule::Plain).collect();
    match mode {
        AdaptMode::Adapted => {
            let ctx = SearchCtx {
                edges: f.edges(),
                i_chain: a,
                j_chain: None,
                rules: plain_rules(),
                budget,
            };
            Ok(match ctx.run() {
                Ok(Some(labeling)) => {
                    SearchOutcome::Found(AdaptednessCertificate::Adapted { labeling })
                }
                Ok(None) => SearchOutcome::ProvenNone,
                Err(()) => SearchOutcome::BudgetExceeded,
            })
        }
        AdaptMode::IjAdapted(j) => {
            validate_j(k, j)?;
            let plain = SearchCtx {
                edges: f.edges(),
                i_chain: a,
                j_chain: None,
                rules: plain_rules(),
                budget,
            };
            let i_labeling = match plain.run() {
                Ok(Some(l)) => l,
                Ok(None) => return Ok(SearchOutcome::ProvenNone),
                Err(()) => return Ok(SearchOutcome::BudgetExceeded),
            };
            let mut any_budget = false;
            for x in 0..f.n() {
                let ctx = SearchCtx {
                    edges: f.edges(),
                    i_chain: a,
                    j_chain: Some(j),
                    rules: f
                        .edges()
                        .iter()
                        .map(|e| {
                            if e.contains(&x) {
                                EdgeRule::Special { excluded: x }
                            } else {
                                EdgeRule::Plain
                            }
                        })
                        .collect(),
                    budget,
                };
                match ctx.run() {
                    Ok(Some(mut special_labeling)) => {
                        // in ij form the special vertex carries label k
                        for (&idx, map) in special_labeling
                            .order
                            .iter()
                            .zip(special_labeling.labels.iter_mut())
                        {
                            if f.edges()[idx].contains(&x) {
                                map.insert(x, k);
                            }
                        }
                        return Ok(SearchOutcome::Found(AdaptednessCertificate::IjAdapted {
                            i_labeling,
                            special_vertex: x,
                            special_labeling,
                        }));
                    }
                    Ok(None) => {}
                    Err(()) => any_budget = true,
                }
            }
            Ok(if any_budget {
                SearchOutcome::BudgetExceeded
            } else {
                SearchOutcome::ProvenNone
            })
        }
        AdaptMode::AdaptedAt(j, pins) => {
            validate_j(k, j)?;
            if let Some(&v) = pins.iter().find(|&&v| v >= f.n()) {
                return Err(AdaptError::InvalidParameters(format!(
                    "pinned vertex {v} outside the pattern"
                )));
            }
            // every edge may meet the pinned set at most once, regardless of
            // ordering
            for e in f.edges() {
                if e.iter().filter(|&&v| pins.contains(v)).count() > 1 {
                    return Ok(SearchOutcome::ProvenNone);
                }
            }
            let ctx = SearchCtx {
                edges: f.edges(),
                i_chain: a,
                j_chain: Some(j),
                rules: f
                    .edges()
                    .iter()
                    .map(|e| match e.iter().find(|&&v| pins.contains(v)) {
                        Some(&s) => EdgeRule::Special { excluded: s },
                        None => EdgeRule::Plain,
                    })
                    .collect(),
                budget,
            };
            Ok(match ctx.run() {
                Ok(Some(labeling)) => SearchOutcome::Found(AdaptednessCertificate::AdaptedAt {
                    pins: pins.iter().copied().collect(),
                    labeling,
                }),
                Ok(None) => SearchOutcome::ProvenNone,
                Err(()) => SearchOutcome::BudgetExceeded,
            })
        }
    }
}

fn verify_labeling(
    f: &KGraph,
    i_chain: &Antichain,
    j_chain: Option<&Antichain>,
    labeling: &OrderedLabeling,
    excluded_of_edge: impl Fn(&[usize]) -> Option<usize>,
    ij_label_convention: bool,
) -> Result<bool, AdaptError> {
    let m = f.len();
    let k = f.k();
    if labeling.order.len() != m || labeling.labels.len() != m {
        return Err(AdaptError::MalformedCertificate(format!(
            "labeling covers {} of {m} edges",
            labeling.order.len()
        )));
    }
    let mut seen = vec![false; m];
    for &idx in &labeling.order {
        if idx >= m || seen[idx] {
            return Err(AdaptError::MalformedCertificate(
                "edge order is not a permutation".into(),
            ));
        }
        seen[idx] = true;
    }
    // structural check of each label map
    for (&idx, map) in labeling.order.iter().zip(&labeling.labels) {
        let edge = &f.edges()[idx];
        let excluded = excluded_of_edge(edge);
        let expect: Vec<usize> = match excluded {
            Some(s) if ij_label_convention => {
                // full bijection onto [k] with the special vertex at k
                if map.get(&s) != Some(&k) {
                    return Err(AdaptError::MalformedCertificate(format!(
                        "special vertex {s} must carry label {k}"
                    )));
                }
                edge.clone()
            }
            Some(s) => edge.iter().copied().filter(|&v| v != s).collect(),
            None => edge.clone(),
        };
        if map.len() != expect.len() || expect.iter().any(|v| !map.contains_key(v)) {
            return Err(AdaptError::MalformedCertificate(format!(
                "label map domain mismatch on edge {edge:?}"
            )));
        }
        let range: BTreeSet<usize> = map.values().copied().collect();
        let width = expect.len();
        let expected_range: BTreeSet<usize> = if excluded.is_some() && ij_label_convention {
            (1..=k).collect()
        } else {
            (1..=width).collect()
        };
        if range != expected_range {
            return Err(AdaptError::MalformedCertificate(format!(
                "labels on edge {edge:?} are not a bijection"
            )));
        }
    }
    // the actual adaptedness conditions
    for i in 0..m {
        let ei = &f.edges()[labeling.order[i]];
        let excluded = excluded_of_edge(ei);
        let chain = match excluded {
            Some(_) => j_chain.ok_or_else(|| {
                AdaptError::MalformedCertificate("special edge but no J antichain".into())
            })?,
            None => i_chain,
        };
        for j in 0..i {
            let ej = &f.edges()[labeling.order[j]];
            let inter: BTreeSet<usize> = ej
                .iter()
                .filter(|v| ei.contains(v) && Some(**v) != excluded)
                .map(|v| labeling.labels[i][v])
                .collect();
            if !fits(&inter, chain) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Checks a certificate against the definition; structural defects are
/// errors, a structurally sound certificate that fails the intersection
/// conditions returns false.
pub fn verify_certificate(
    f: &KGraph,
    a: &Antichain,
    j: Option<&Antichain>,
    cert: &AdaptednessCertificate,
) -> Result<bool, AdaptError> {
    if a.ground() != f.k() {
        return Err(AdaptError::GroundMismatch {
            left: f.k(),
            right: a.ground(),
        });
    }
    match cert {
        AdaptednessCertificate::Adapted { labeling } => {
            verify_labeling(f, a, None, labeling, |_| None, false)
        }
        AdaptednessCertificate::IjAdapted {
            i_labeling,
            special_vertex,
            special_labeling,
        } => {
            let j = j.ok_or_else(|| {
                AdaptError::MalformedCertificate("ij certificate requires J".into())
            })?;
            validate_j(f.k(), j)?;
            let x = *special_vertex;
            if x >= f.n() {
                return Err(AdaptError::MalformedCertificate(format!(
                    "special vertex {x} outside the pattern"
                )));
            }
            let plain_ok = verify_labeling(f, a, None, i_labeling, |_| None, false)?;
            let special_ok = verify_labeling(
                f,
                a,
                Some(j),
                special_labeling,
                |e| if e.contains(&x) { Some(x) } else { None },
                true,
            )?;
            Ok(plain_ok && special_ok)
        }
        AdaptednessCertificate::AdaptedAt { pins, labeling } => {
            let j = j.ok_or_else(|| {
                AdaptError::MalformedCertificate("adapted-at certificate requires J".into())
            })?;
            validate_j(f.k(), j)?;
            let pin_set = VertexSet::new(pins.iter().copied());
            for e in f.edges() {
                if e.iter().filter(|&&v| pin_set.contains(v)).count() > 1 {
                    return Ok(false);
                }
            }
            verify_labeling(
                f,
                a,
                Some(j),
                labeling,
                |e| e.iter().copied().find(|&v| pin_set.contains(v)),
                false,
            )
        }
    }
}

/// Grid graph on f^2 vertices (f = v(F)): vertex (i,j) has index i*f + j.
/// Every column induces a copy of F, and every row except the zeroth does
/// too; the zeroth row is the set the rows 1..f-1 absorb. Vertex 0 of F is
/// taken as the (I,J)-adaptedness special vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridGraph {
    pub graph: KGraph,
    /// Grid vertices of the zeroth row, in column order.
    pub zeroth_row: Vec<usize>,
    /// One placement per column: `column_copies[j][w]` is the image of
    /// pattern vertex w.
    pub column_copies: Vec<Vec<usize>>,
    /// One placement per row 1..f-1.
    pub row_copies: Vec<Vec<usize>>,
}

pub fn grid_graph(f: &KGraph) -> Result<GridGraph, AdaptError> {
    let fv = f.n();
    if fv < f.k() {
        return Err(AdaptError::InvalidParameters(format!(
            "pattern must have at least k={} vertices, has {fv}",
            f.k()
        )));
    }
    let at = |row: usize, col: usize| row * fv + col;
    let mut edges: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut column_copies = Vec::with_capacity(fv);
    for col in 0..fv {
        let placement: Vec<usize> = (0..fv).map(|w| at(w, col)).collect();
        for e in f.edges() {
            let mut img: Vec<usize> = e.iter().map(|&w| placement[w]).collect();
            img.sort_unstable();
            edges.insert(img);
        }
        column_copies.push(placement);
    }
    let mut row_copies = Vec::with_capacity(fv.saturating_sub(1));
    for row in 1..fv {
        let placement: Vec<usize> = (0..fv).map(|w| at(row, w)).collect();
        for e in f.edges() {
            let mut img: Vec<usize> = e.iter().map(|&w| placement[w]).collect();
            img.sort_unstable();
            edges.insert(img);
        }
        row_copies.push(placement);
    }
    let graph = KGraph::new(f.k(), fv * fv, edges.into_iter().collect::<Vec<_>>())?;
    Ok(GridGraph {
        graph,
        zeroth_row: (0..fv).collect(),
        column_copies,
        row_copies,
    })
}

impl fmt::Display for AdaptednessCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let write_labeling = |f: &mut fmt::Formatter<'_>,
                              title: &str,
                              l: &OrderedLabeling|
         -> fmt::Result {
            writeln!(f, "{title}")?;
            for (&idx, map) in l.order.iter().zip(&l.labels) {
                let assigns = map
                    .iter()
                    .map(|(v, lab)| format!("{v}->{lab}"))
                    .join(" ");
                writeln!(f, "edge {idx} {assigns}")?;
            }
            Ok(())
        };
        match self {
            AdaptednessCertificate::Adapted { labeling } => {
                write_labeling(f, "adapted", labeling)
            }
            AdaptednessCertificate::IjAdapted {
                i_labeling,
                special_vertex,
                special_labeling,
            } => {
                write_labeling(f, "adapted", i_labeling)?;
                writeln!(f, "special {special_vertex}")?;
                write_labeling(f, "ij-adapted", special_labeling)
            }
            AdaptednessCertificate::AdaptedAt { pins, labeling } => {
                writeln!(f, "pinned {}", pins.iter().join(" "))?;
                write_labeling(f, "adapted-at", labeling)
            }
        }
    }
}
