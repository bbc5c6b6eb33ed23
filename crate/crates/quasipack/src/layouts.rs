//! Antichains over [k], I-layouts, and enumeration of the ordered clique set
//! K_k(Λ) together with its intersection with a host graph.
//!
//! Clique counting is over *ordered* tuples of distinct vertices. Enumeration
//! is lexicographic, so streams are deterministic.

use std::fmt;

use itertools::Itertools;
use thiserror::Error;

use crate::bits::Bits;
use crate::hypercore::{encode_set, GraphError, KGraph};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LayoutError {
    #[error("invalid antichain: {0}")]
    InvalidAntichain(String),
    #[error("ground mismatch: {left} vs {right}")]
    GroundMismatch { left: usize, right: usize },
    #[error("layout/graph mismatch: {0}")]
    Mismatch(String),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// A set family over [g] = {1..g} with no strict containment between distinct
/// members. The single member ∅ is allowed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Antichain {
    ground: usize,
    members: Vec<Vec<usize>>, // each sorted ascending, 1-based; list lex-sorted
}

impl Antichain {
    pub fn new<I>(ground: usize, members: I) -> Result<Antichain, LayoutError>
    where
        I: IntoIterator<Item = Vec<usize>>,
    {
        let mut ms: Vec<Vec<usize>> = Vec::new();
        for mut m in members {
            m.sort_unstable();
            m.dedup();
            if let Some(&x) = m.iter().find(|&&x| x < 1 || x > ground) {
                return Err(LayoutError::InvalidAntichain(format!(
                    "element {x} outside [1,{ground}]"
                )));
            }
            ms.push(m);
        }
        ms.sort_unstable();
        if ms.is_empty() {
            return Err(LayoutError::InvalidAntichain("no members".into()));
        }
        if ms.windows(2).any(|w| w[0] == w[1]) {
            return Err(LayoutError::InvalidAntichain("duplicate member".into()));
        }
        for (i, a) in ms.iter().enumerate() {
            for (j, b) in ms.iter().enumerate() {
                if i != j && a.iter().all(|x| b.contains(x)) {
                    return Err(LayoutError::InvalidAntichain(format!(
                        "member {a:?} is contained in {b:?}"
                    )));
                }
            }
        }
        Ok(Antichain { ground, members: ms })
    }

    /// All (g-1)-subsets of [g]; the antichain behind codegree-style
    /// discrepancy and the zero-color witness layout.
    pub fn all_subsets_of_size(ground: usize, size: usize) -> Antichain {
        Antichain::new(ground, (1..=ground).combinations(size))
            .expect("uniform level sets form an antichain")
    }

    /// The antichain {∅}.
    pub fn empty_set(ground: usize) -> Antichain {
        Antichain::new(ground, vec![vec![]]).expect("single empty member is valid")
    }

    /// Parses CLI syntax: members separated by '|', elements by ',', "e" for
    /// the empty set. Example: "1,2|3" over ground 3.
    pub fn parse(ground: usize, s: &str) -> Result<Antichain, LayoutError> {
        let members = s
            .split('|')
            .map(|m| {
                let m = m.trim();
                if m == "e" {
                    Ok(vec![])
                } else {
                    m.split(',')
                        .map(|x| {
                            x.trim().parse::<usize>().map_err(|_| {
                                LayoutError::InvalidAntichain(format!("bad element {x:?}"))
                            })
                        })
                        .collect()
                }
            })
            .collect::<Result<Vec<Vec<usize>>, _>>()?;
        Antichain::new(ground, members)
    }

    pub fn ground(&self) -> usize {
        self.ground
    }

    pub fn members(&self) -> &[Vec<usize>] {
        &self.members
    }

    /// True iff there are at least two members and every element of the
    /// ground set is covered.
    pub fn is_full(&self) -> bool {
        self.members.len() >= 2
            && (1..=self.ground).all(|x| self.members.iter().any(|m| m.contains(&x)))
    }

    /// Every member of `other` is contained in some member of self.
    pub(crate) fn covers(&self, other: &Antichain) -> bool {
        other
            .members
            .iter()
            .all(|b| self.members.iter().any(|a| b.iter().all(|x| a.contains(x))))
    }
}

impl fmt::Display for Antichain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rendered = self
            .members
            .iter()
            .map(|m| {
                if m.is_empty() {
                    "e".to_string()
                } else {
                    m.iter().join(",")
                }
            })
            .join("|");
        f.write_str(&rendered)
    }
}

/// One coordinate graph of a layout.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LayoutPart {
    Graph(KGraph),
    /// For the member ∅: whether the 0-uniform graph contains the empty edge.
    Empty { present: bool },
}

/// An I-layout: an |I|-uniform hypergraph on a common vertex set for every
/// member I of the antichain (a presence flag for I = ∅).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layout {
    antichain: Antichain,
    n: usize,
    parts: Vec<LayoutPart>, // aligned with antichain.members()
}

impl Layout {
    pub fn new(
        antichain: Antichain,
        n: usize,
        parts: Vec<LayoutPart>,
    ) -> Result<Layout, LayoutError> {
        if parts.len() != antichain.members().len() {
            return Err(LayoutError::Mismatch(format!(
                "{} members but {} parts",
                antichain.members().len(),
                parts.len()
            )));
        }
        for (m, p) in antichain.members().iter().zip(&parts) {
            match p {
                LayoutPart::Graph(g) => {
                    if m.is_empty() {
                        return Err(LayoutError::Mismatch(
                            "member ∅ needs a presence flag, not a graph".into(),
                        ));
                    }
                    if g.k() != m.len() {
                        return Err(LayoutError::Mismatch(format!(
                            "member {m:?} assigned a {}-uniform graph",
                            g.k()
                        )));
                    }
                    if g.n() != n {
                        return Err(LayoutError::Mismatch(format!(
                            "graph on {} vertices in a layout on {n}",
                            g.n()
                        )));
                    }
                }
                LayoutPart::Empty { .. } => {
                    if !m.is_empty() {
                        return Err(LayoutError::Mismatch(format!(
                            "member {m:?} assigned the empty-edge flag"
                        )));
                    }
                }
            }
        }
        Ok(Layout { antichain, n, parts })
    }

    pub fn antichain(&self) -> &Antichain {
        &self.antichain
    }

    pub fn k(&self) -> usize {
        self.antichain.ground()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn parts(&self) -> &[LayoutPart] {
        &self.parts
    }

    pub fn part_mut(&mut self, idx: usize) -> &mut LayoutPart {
        &mut self.parts[idx]
    }

    fn engine<'a>(&'a self, host: Option<&'a KGraph>) -> Option<CliqueEngine<'a>> {
        let k = self.k();
        let mut constraints: Vec<(Vec<usize>, &KGraph)> = Vec::new();
        for (m, p) in self.antichain.members().iter().zip(&self.parts) {
            match p {
                LayoutPart::Graph(g) => {
                    // positions are 0-based coordinates of the tuple
                    constraints.push((m.iter().map(|&x| x - 1).collect(), g));
                }
                LayoutPart::Empty { present } => {
                    if !present {
                        return None; // K_k(Λ) is empty
                    }
                }
            }
        }
        if let Some(h) = host {
            constraints.push(((0..k).collect(), h));
        }
        Some(CliqueEngine::new(self.n, k, constraints))
    }

    /// |K_k(Λ)|: the number of ordered tuples of distinct vertices whose
    /// I-indexed subsets are edges of λ_I for every member.
    pub fn count_cliques(&self) -> u128 {
        match self.engine(None) {
            Some(e) => e.count(),
            None => 0,
        }
    }

    /// Visits every clique tuple in lexicographic order.
    pub fn for_each_clique(&self, mut visit: impl FnMut(&[usize])) {
        if let Some(e) = self.engine(None) {
            e.visit(&mut visit);
        }
    }

    /// All clique tuples, lexicographically. Prefer `for_each_clique` when
    /// the set may be large.
    pub fn enumerate_cliques(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        self.for_each_clique(|t| out.push(t.to_vec()));
        out
    }

    /// |H ∩ K_k(Λ)|: clique tuples whose underlying set is an edge of H.
    pub fn intersect_count(&self, h: &KGraph) -> Result<u128, LayoutError> {
        if h.k() != self.k() || h.n() != self.n {
            return Err(LayoutError::Mismatch(format!(
                "host is a {}-graph on {} vertices; layout expects k={} n={}",
                h.k(),
                h.n(),
                self.k(),
                self.n
            )));
        }
        Ok(match self.engine(Some(h)) {
            Some(e) => e.count(),
            None => 0,
        })
    }

    /// Layout text format: header "layout k n", then per member a line
    /// "I: i1,i2" (or "I: empty" followed by "present"/"absent") and, for
    /// non-empty members, an embedded graph in format v1.
    pub fn serialize(&self) -> String {
        let mut out = format!("layout {} {}\n", self.k(), self.n);
        for (m, p) in self.antichain.members().iter().zip(&self.parts) {
            match p {
                LayoutPart::Graph(g) => {
                    out.push_str(&format!("I: {}\n", m.iter().join(",")));
                    out.push_str(&g.serialize());
                }
                LayoutPart::Empty { present } => {
                    out.push_str("I: empty\n");
                    out.push_str(if *present { "present\n" } else { "absent\n" });
                }
            }
        }
        out
    }

    pub fn parse(text: &str) -> Result<Layout, LayoutError> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim_start().starts_with('#') && !l.trim().is_empty())
            .peekable();
        let err = |line: usize, message: &str| LayoutError::Parse {
            line,
            message: message.to_string(),
        };
        let (lno, header) = lines.next().ok_or_else(|| err(1, "missing header"))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 3 || fields[0] != "layout" {
            return Err(err(lno + 1, "header must be \"layout k n\""));
        }
        let k: usize = fields[1]
            .parse()
            .map_err(|_| err(lno + 1, "bad k in header"))?;
        let n: usize = fields[2]
            .parse()
            .map_err(|_| err(lno + 1, "bad n in header"))?;
        let mut members: Vec<Vec<usize>> = Vec::new();
        let mut parts: Vec<LayoutPart> = Vec::new();
        while let Some((lno, line)) = lines.next() {
            let rest = line
                .strip_prefix("I:")
                .ok_or_else(|| err(lno + 1, "expected member line \"I: ...\""))?
                .trim();
            if rest == "empty" {
                let (lno2, flag) = lines
                    .next()
                    .ok_or_else(|| err(lno + 1, "missing present/absent line"))?;
                let present = match flag.trim() {
                    "present" => true,
                    "absent" => false,
                    other => return Err(err(lno2 + 1, &format!("expected present/absent, got {other:?}"))),
                };
                members.push(vec![]);
                parts.push(LayoutPart::Empty { present });
            } else {
                let member = rest
                    .split(',')
                    .map(|x| x.trim().parse::<usize>())
                    .collect::<Result<Vec<usize>, _>>()
                    .map_err(|_| err(lno + 1, "bad member element"))?;
                // embedded graph block: header plus m edge lines
                let (glno, gheader) = lines
                    .next()
                    .ok_or_else(|| err(lno + 1, "missing embedded graph"))?;
                let gm: usize = gheader
                    .split_whitespace()
                    .nth(2)
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| err(glno + 1, "bad embedded graph header"))?;
                let mut block = String::from(gheader);
                block.push('\n');
                for _ in 0..gm {
                    let (_, el) = lines
                        .next()
                        .ok_or_else(|| err(glno + 1, "truncated embedded graph"))?;
                    block.push_str(el);
                    block.push('\n');
                }
                let g = KGraph::parse(&block)?;
                members.push(member);
                parts.push(LayoutPart::Graph(g));
            }
        }
        // align parts with the antichain's canonical member order
        let mut paired: Vec<(Vec<usize>, LayoutPart)> =
            members.iter().cloned().zip(parts).collect();
        paired.sort_by(|a, b| a.0.cmp(&b.0));
        let antichain = Antichain::new(k, members)?;
        Layout::new(antichain, n, paired.into_iter().map(|(_, p)| p).collect())
    }
}

/// Backtracking enumerator for ordered k-tuples of distinct vertices subject
/// to set-membership constraints on coordinate subsets. Coordinates are
/// filled in ascending order; a constraint is enforced the moment its last
/// coordinate is assigned, via precomputed completion bitsets.
struct CliqueEngine<'a> {
    n: usize,
    k: usize,
    closing: Vec<Vec<(Vec<usize>, &'a KGraph)>>,
}

impl<'a> CliqueEngine<'a> {
    fn new(n: usize, k: usize, constraints: Vec<(Vec<usize>, &'a KGraph)>) -> Self {
        let mut closing: Vec<Vec<(Vec<usize>, &'a KGraph)>> = vec![Vec::new(); k];
        for (positions, g) in constraints {
            let last = *positions.iter().max().expect("nonempty member");
            let others = positions.iter().copied().filter(|&p| p != last).collect();
            closing[last].push((others, g));
        }
        CliqueEngine { n, k, closing }
    }

    fn candidates(&self, pos: usize, assigned: &[usize], free: &Bits, cand: &mut Bits) -> bool {
        cand.clone_from(free);
        let mut key_buf: Vec<usize> = Vec::with_capacity(self.k);
        for (others, g) in &self.closing[pos] {
            key_buf.clear();
            key_buf.extend(others.iter().map(|&p| assigned[p]));
            key_buf.sort_unstable();
            match g.completions().get(&encode_set(&key_buf)) {
                Some(bits) => cand.and_assign(bits),
                None => return false,
            }
        }
        true
    }

    fn count(&self) -> u128 {
        if self.n < self.k {
            return 0;
        }
        let mut free = Bits::ones(self.n);
        let mut assigned = Vec::with_capacity(self.k);
        let mut scratch: Vec<Bits> = (0..self.k).map(|_| Bits::zeros(self.n)).collect();
        self.count_rec(0, &mut assigned, &mut free, &mut scratch)
    }

    fn count_rec(
        &self,
        pos: usize,
        assigned: &mut Vec<usize>,
        free: &mut Bits,
        scratch: &mut [Bits],
    ) -> u128 {
        let (cand, rest) = scratch.split_first_mut().expect("depth bounded by k");
        if !self.candidates(pos, assigned, free, cand) {
            return 0;
        }
        if pos == self.k - 1 {
            return cand.count_ones() as u128;
        }
        let mut total = 0u128;
        for v in cand.iter_ones() {
            assigned.push(v);
            free.clear(v);
            total += self.count_rec(pos + 1, assigned, free, rest);
            free.set(v);
            assigned.pop();
        }
        total
    }

    fn visit(&self, visit: &mut impl FnMut(&[usize])) {
        if self.n < self.k {
            return;
        }
        let mut free = Bits::ones(self.n);
        let mut assigned = Vec::with_capacity(self.k);
        let mut scratch: Vec<Bits> = (0..self.k).map(|_| Bits::zeros(self.n)).collect();
        self.visit_rec(0, &mut assigned, &mut free, &mut scratch, visit);
    }

    fn visit_rec(
        &self,
        pos: usize,
        assigned: &mut Vec<usize>,
        free: &mut Bits,
        scratch: &mut [Bits],
        visit: &mut impl FnMut(&[usize]),
    ) {
        let (cand, rest) = scratch.split_first_mut().expect("depth bounded by k");
        if !self.candidates(pos, assigned, free, cand) {
            return;
        }
        for v in cand.iter_ones() {
            assigned.push(v);
            if pos == self.k - 1 {
                visit(assigned);
            } else {
                free.clear(v);
                self.visit_rec(pos + 1, assigned, free, rest, visit);
                free.set(v);
            }
            assigned.pop();
        }
    }
}
