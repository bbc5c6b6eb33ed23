//! Layout-discrepancy verdicts: exact witness checking, a closed form for
//! the empty-antichain special case, seeded adversarial layout search, and
//! exhaustive checking when the layout space is small enough to enumerate.
//!
//! All margins are exact rationals; a witness "holds" or "violates" with no
//! tolerance. The universal quantifier over layouts is only ever discharged
//! by `exhaustive_check`; the hill-climbing search reports `Undetermined`
//! when it fails to find a violation.

use std::fmt;

use itertools::Itertools;
use num::{BigRational, Signed};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::hypercore::{GraphError, KGraph};
use crate::layouts::{Antichain, Layout, LayoutError, LayoutPart};
use crate::ratio::{format_ratio, in_open_unit_interval, ratio_int, ratio_pow};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DiscError {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("layout space has {required} members, over the cap")]
    CapExceeded { required: u128 },
    #[error(transparent)]
    Layout(#[from] LayoutError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiscMode {
    /// |H ∩ K| ≥ p|K| − μn^k.
    Lower,
    /// | |H ∩ K| − p|K| | ≤ μn^k.
    TwoSided,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiscParams {
    pub p: BigRational,
    pub mu: BigRational,
    pub mode: DiscMode,
}

impl DiscParams {
    pub fn new(p: BigRational, mu: BigRational, mode: DiscMode) -> Result<DiscParams, DiscError> {
        if !in_open_unit_interval(&p) {
            return Err(DiscError::InvalidParameters(format!(
                "p must lie in (0,1), got {p}"
            )));
        }
        if !in_open_unit_interval(&mu) {
            return Err(DiscError::InvalidParameters(format!(
                "mu must lie in (0,1), got {mu}"
            )));
        }
        Ok(DiscParams { p, mu, mode })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiscStatus {
    SatisfiedExhaustive,
    Violated,
    Undetermined,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiscVerdict {
    pub status: DiscStatus,
    /// Present exactly when the status is `Violated`; re-checks as a true
    /// violation.
    pub witness: Option<Layout>,
    /// Slack at the witness, or the worst slack seen when no witness exists.
    pub margin: Option<BigRational>,
}

impl DiscVerdict {
    pub fn serialize(&self) -> String {
        let status = match self.status {
            DiscStatus::SatisfiedExhaustive => "satisfied-exhaustive",
            DiscStatus::Violated => "violated",
            DiscStatus::Undetermined => "undetermined",
        };
        let mut out = format!("status {status}\n");
        if let Some(m) = &self.margin {
            out.push_str(&format!("margin {}\n", format_ratio(m)));
        }
        if let Some(w) = &self.witness {
            out.push_str(&w.serialize());
        }
        out
    }
}

impl fmt::Display for DiscVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.serialize())
    }
}

/// Exact slack of the discrepancy condition at one layout: nonnegative iff
/// the condition holds there. Lower mode: |H∩K| − p|K| + μn^k; two-sided:
/// μn^k − | |H∩K| − p|K| |.
pub fn margin_at(h: &KGraph, l: &Layout, params: &DiscParams) -> Result<BigRational, DiscError> {
    if l.k() != h.k() || l.n() != h.n() {
        return Err(DiscError::InvalidParameters(format!(
            "layout on ground {} / {} vertices vs graph k={} n={}",
            l.k(),
            l.n(),
            h.k(),
            h.n()
        )));
    }
    let intersect = ratio_int(l.intersect_count(h)?);
    let cliques = ratio_int(l.count_cliques());
    let slackterm = &params.mu * ratio_pow(h.n(), h.k() as u32);
    let deviation = intersect - &params.p * cliques;
    Ok(match params.mode {
        DiscMode::Lower => deviation + slackterm,
        DiscMode::TwoSided => slackterm - deviation.abs(),
    })
}

pub fn check_witness(
    h: &KGraph,
    l: &Layout,
    params: &DiscParams,
) -> Result<(bool, BigRational), DiscError> {
    let margin = margin_at(h, l, params)?;
    Ok((!margin.is_negative(), margin))
}

/// Closed form of the condition at the {∅}-layout with the empty edge
/// present: the cliques are all (n)_k ordered k-tuples and the intersection
/// is the k!·|H| labeled edges.
pub fn edge_density_disc(h: &KGraph, params: &DiscParams) -> bool {
    let k = h.k();
    let n = h.n();
    let mut falling: u128 = 1;
    for i in 0..k {
        falling *= (n - i) as u128;
    }
    let mut factorial: u128 = 1;
    for i in 1..=k {
        factorial *= i as u128;
    }
    let labeled = ratio_int(h.len() as u128 * factorial);
    let deviation = labeled - &params.p * ratio_int(falling);
    let slackterm = &params.mu * ratio_pow(n, k as u32);
    let margin = match params.mode {
        DiscMode::Lower => deviation + slackterm,
        DiscMode::TwoSided => slackterm - deviation.abs(),
    };
    !margin.is_negative()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBudget {
    pub restarts: usize,
    pub moves: usize,
    /// Consecutive sideways (equal-margin) moves tolerated before a restart.
    pub plateau: usize,
}

impl Default for SearchBudget {
    fn default() -> SearchBudget {
        SearchBudget {
            restarts: 8,
            moves: 400,
            plateau: 20,
        }
    }
}

/// Mutable counterpart of a layout used inside the search.
struct Candidate {
    antichain: Antichain,
    n: usize,
    /// Per member: sorted edge list (empty member: present flag as 0/1 via
    /// `empty_present`).
    edges: Vec<Vec<Vec<usize>>>,
    empty_present: Vec<bool>,
}

impl Candidate {
    fn from_layout(l: &Layout) -> Candidate {
        let mut edges = Vec::new();
        let mut empty_present = Vec::new();
        for p in l.parts() {
            match p {
                LayoutPart::Graph(g) => {
                    edges.push(g.edges().to_vec());
                    empty_present.push(false);
                }
                LayoutPart::Empty { present } => {
                    edges.push(Vec::new());
                    empty_present.push(*present);
                }
            }
        }
        Candidate {
            antichain: l.antichain().clone(),
            n: l.n(),
            edges,
            empty_present,
        }
    }

    fn random(a: &Antichain, n: usize, rng: &mut ChaCha8Rng) -> Candidate {
        let mut edges = Vec::new();
        let mut empty_present = Vec::new();
        for m in a.members() {
            if m.is_empty() {
                edges.push(Vec::new());
                empty_present.push(rng.gen::<bool>());
            } else {
                let chosen: Vec<Vec<usize>> = (0..n)
                    .combinations(m.len())
                    .filter(|_| rng.gen::<bool>())
                    .collect();
                edges.push(chosen);
                empty_present.push(false);
            }
        }
        Candidate {
            antichain: a.clone(),
            n,
            edges,
            empty_present,
        }
    }

    /// Toggles one edge (or the empty-edge flag) in one coordinate; returns
    /// an undo token.
    fn random_toggle(&mut self, rng: &mut ChaCha8Rng) -> (usize, Option<Vec<usize>>) {
        let idx = rng.gen_range(0..self.antichain.members().len());
        let width = self.antichain.members()[idx].len();
        if width == 0 {
            self.empty_present[idx] = !self.empty_present[idx];
            return (idx, None);
        }
        let mut set: Vec<usize> = (0..self.n).collect();
        set.partial_shuffle(rng, width);
        let mut edge: Vec<usize> = set[..width].to_vec();
        edge.sort_unstable();
        self.toggle(idx, &edge);
        (idx, Some(edge))
    }

    fn toggle(&mut self, idx: usize, edge: &[usize]) {
        let list = &mut self.edges[idx];
        match list.binary_search_by(|e| e.as_slice().cmp(edge)) {
            Ok(pos) => {
                list.remove(pos);
            }
            Err(pos) => list.insert(pos, edge.to_vec()),
        }
    }

    fn undo(&mut self, token: (usize, Option<Vec<usize>>)) {
        match token {
            (idx, None) => self.empty_present[idx] = !self.empty_present[idx],
            (idx, Some(edge)) => self.toggle(idx, &edge),
        }
    }

    fn to_layout(&self) -> Result<Layout, DiscError> {
        let parts: Result<Vec<LayoutPart>, GraphError> = self
            .antichain
            .members()
            .iter()
            .zip(&self.edges)
            .zip(&self.empty_present)
            .map(|((m, edges), &present)| {
                if m.is_empty() {
                    Ok(LayoutPart::Empty { present })
                } else {
                    Ok(LayoutPart::Graph(KGraph::new(
                        m.len(),
                        self.n,
                        edges.clone(),
                    )?))
                }
            })
            .collect();
        Ok(Layout::new(self.antichain.clone(), self.n, parts?)?)
    }
}

/// Seeded hill-climbing over layouts, minimizing the margin by single-edge
/// toggles. Restarts run from the provided hint layouts first, then from
/// random layouts. Finding a negative margin settles `Violated`; otherwise
/// the verdict is `Undetermined` with the worst margin seen — this search
/// can never certify satisfaction.
pub fn search_violation(
    h: &KGraph,
    a: &Antichain,
    params: &DiscParams,
    budget: &SearchBudget,
    seed: u64,
    hints: &[Layout],
) -> Result<DiscVerdict, DiscError> {
    if a.ground() != h.k() {
        return Err(DiscError::InvalidParameters(format!(
            "antichain over [{}] against a {}-graph",
            a.ground(),
            h.k()
        )));
    }
    for hint in hints {
        if hint.antichain() != a || hint.n() != h.n() {
            return Err(DiscError::InvalidParameters(
                "hint layout does not match the antichain and host".into(),
            ));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(BigRational, Layout)> = None;

    for restart in 0..budget.restarts {
        let mut cand = match hints.get(restart) {
            Some(l) => Candidate::from_layout(l),
            None => Candidate::random(a, h.n(), &mut rng),
        };
        let mut margin = margin_at(h, &cand.to_layout()?, params)?;
        let mut plateau = 0usize;
        let consider = |margin: &BigRational, cand: &Candidate, best: &mut Option<(BigRational, Layout)>| -> Result<(), DiscError> {
            if best.as_ref().map_or(true, |(m, _)| margin < m) {
                *best = Some((margin.clone(), cand.to_layout()?));
            }
            Ok(())
        };
        consider(&margin, &cand, &mut best)?;
        for _ in 0..budget.moves {
            if margin.is_negative() {
                break;
            }
            let token = cand.random_toggle(&mut rng);
            let next = margin_at(h, &cand.to_layout()?, params)?;
            if next < margin {
                margin = next;
                plateau = 0;
                consider(&margin, &cand, &mut best)?;
            } else if next == margin && plateau < budget.plateau {
                plateau += 1;
            } else {
                cand.undo(token);
            }
        }
        if let Some((m, _)) = &best {
            if m.is_negative() {
                break;
            }
        }
    }

    Ok(match best {
        Some((margin, witness)) if margin.is_negative() => {
            // a returned witness must re-check as a genuine violation
            let (holds, again) = check_witness(h, &witness, params)?;
            debug_assert!(!holds && again == margin);
            DiscVerdict {
                status: DiscStatus::Violated,
                witness: Some(witness),
                margin: Some(margin),
            }
        }
        Some((margin, _)) => DiscVerdict {
            status: DiscStatus::Undetermined,
            witness: None,
            margin: Some(margin),
        },
        None => DiscVerdict {
            status: DiscStatus::Undetermined,
            witness: None,
            margin: None,
        },
    })
}

/// Number of layouts over the antichain on n vertices: Π over members of
/// 2^C(n,|I|). Saturates at u128::MAX.
pub fn layout_space_size(a: &Antichain, n: usize) -> u128 {
    let mut total: u128 = 1;
    for m in a.members() {
        let mut choose: u128 = 1;
        for i in 0..m.len() {
            choose = choose.saturating_mul((n - i) as u128) / (i as u128 + 1);
        }
        if choose >= 127 {
            return u128::MAX;
        }
        total = total.saturating_mul(1u128 << choose);
    }
    total
}

/// Enumerates every layout; the only operation that can certify the
/// condition. Fails upfront when the space exceeds `cap`.
pub fn exhaustive_check(
    h: &KGraph,
    a: &Antichain,
    params: &DiscParams,
    cap: u128,
) -> Result<DiscVerdict, DiscError> {
    if a.ground() != h.k() {
        return Err(DiscError::InvalidParameters(format!(
            "antichain over [{}] against a {}-graph",
            a.ground(),
            h.k()
        )));
    }
    let required = layout_space_size(a, h.n());
    if required > cap {
        return Err(DiscError::CapExceeded { required });
    }
    let n = h.n();
    // per-member list of possible edges; a subset is a bitmask over it
    let universes: Vec<Vec<Vec<usize>>> = a
        .members()
        .iter()
        .map(|m| (0..n).combinations(m.len()).collect())
        .collect();
    let mut masks: Vec<u128> = vec![0; universes.len()];
    let mut worst: Option<(BigRational, Layout)> = None;
    loop {
        let parts: Result<Vec<LayoutPart>, GraphError> = a
            .members()
            .iter()
            .zip(&universes)
            .zip(&masks)
            .map(|((m, universe), &mask)| {
                if m.is_empty() {
                    Ok(LayoutPart::Empty { present: mask & 1 == 1 })
                } else {
                    let edges: Vec<Vec<usize>> = universe
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| mask >> i & 1 == 1)
                        .map(|(_, e)| e.clone())
                        .collect();
                    Ok(LayoutPart::Graph(KGraph::new(m.len(), n, edges)?))
                }
            })
            .collect();
        let layout = Layout::new(a.clone(), n, parts?)?;
        let margin = margin_at(h, &layout, params)?;
        if worst.as_ref().map_or(true, |(m, _)| margin < *m) {
            worst = Some((margin.clone(), layout));
        }
        if margin.is_negative() {
            break;
        }
        // odometer over the per-member subset masks
        let mut pos = 0;
        loop {
            if pos == masks.len() {
                let (margin, _) = worst.expect("at least one layout");
                return Ok(DiscVerdict {
                    status: DiscStatus::SatisfiedExhaustive,
                    witness: None,
                    margin: Some(margin),
                });
            }
            masks[pos] += 1;
            if masks[pos] < (1u128 << universes[pos].len()) {
                break;
            }
            masks[pos] = 0;
            pos += 1;
        }
    }
    let (margin, witness) = worst.expect("violation found");
    Ok(DiscVerdict {
        status: DiscStatus::Violated,
        witness: Some(witness),
        margin: Some(margin),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{gen_a, zero_color_layout, zero_layout_slack};
    use num::Zero;
    use crate::ratio::parse_ratio;

    fn params(p: &str, mu: &str, mode: DiscMode) -> DiscParams {
        DiscParams::new(parse_ratio(p).unwrap(), parse_ratio(mu).unwrap(), mode).unwrap()
    }

    fn empty_layout(k: usize, n: usize, present: bool) -> Layout {
        Layout::new(
            Antichain::empty_set(k),
            n,
            vec![LayoutPart::Empty { present }],
        )
        .unwrap()
    }

    #[test]
    fn complete_host_always_holds() {
        let h = KGraph::complete(6, 3).unwrap();
        let l = empty_layout(3, 6, true);
        let (holds, margin) = check_witness(&h, &l, &params("9/10", "1/100", DiscMode::Lower)).unwrap();
        assert!(holds);
        assert!(margin > BigRational::zero());
    }

    #[test]
    fn cliqueless_layout_holds_lower() {
        let h = KGraph::empty(3, 6);
        let l = empty_layout(3, 6, false);
        let (holds, _) = check_witness(&h, &l, &params("1/2", "1/1000", DiscMode::Lower)).unwrap();
        assert!(holds);
    }

    #[test]
    fn zero_layout_violates_construction() {
        let (h, c) = gen_a(3, 15, 8).unwrap();
        let l = zero_color_layout(&c).unwrap();
        let mu = zero_layout_slack(3);
        // violated whenever μ·n³ < p·|K|; check that regime explicitly
        let cliques = l.count_cliques();
        let lhs = &mu * ratio_pow(15, 3);
        let rhs = parse_ratio("2/3").unwrap() * ratio_int(cliques);
        if lhs < rhs {
            let p = DiscParams::new(parse_ratio("2/3").unwrap(), mu, DiscMode::Lower).unwrap();
            let (holds, margin) = check_witness(&h, &l, &p).unwrap();
            assert!(!holds);
            assert!(margin.is_negative());
        }
    }

    #[test]
    fn density_special_case_matches_witness_check() {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..50 {
            let n = rng.gen_range(3..8);
            let k = rng.gen_range(2..=3.min(n));
            let edges: Vec<Vec<usize>> = (0..n)
                .combinations(k)
                .filter(|_| rng.gen::<bool>())
                .collect();
            let h = KGraph::new(k, n, edges).unwrap();
            let p = format!("{}/{}", rng.gen_range(1..10), 10);
            let mu = format!("{}/{}", rng.gen_range(1..50), 50);
            for mode in [DiscMode::Lower, DiscMode::TwoSided] {
                let params = params(&p, &mu, mode);
                let l = empty_layout(k, n, true);
                let (holds, _) = check_witness(&h, &l, &params).unwrap();
                assert_eq!(edge_density_disc(&h, &params), holds, "n={n} k={k} p={p} mu={mu}");
            }
        }
    }

    #[test]
    fn two_sided_catches_excess() {
        // complete graph exceeds p|K| by far, so two-sided fails where lower
        // holds
        let h = KGraph::complete(7, 2).unwrap();
        let lower = params("1/10", "1/100", DiscMode::Lower);
        let two = params("1/10", "1/100", DiscMode::TwoSided);
        assert!(edge_density_disc(&h, &lower));
        assert!(!edge_density_disc(&h, &two));
    }

    #[test]
    fn mu_monotonicity() {
        let h = KGraph::new(2, 5, vec![vec![0, 1], vec![2, 3]]).unwrap();
        let l = empty_layout(2, 5, true);
        let big = params("9/10", "1/10", DiscMode::Lower);
        let small = params("9/10", "1/100", DiscMode::Lower);
        let (_, m_big) = check_witness(&h, &l, &big).unwrap();
        let (_, m_small) = check_witness(&h, &l, &small).unwrap();
        assert!(m_small < m_big);
    }

    #[test]
    fn exhaustive_tiny() {
        // complete host: satisfied for any p < 1 in lower mode
        let h = KGraph::complete(4, 2).unwrap();
        let a = Antichain::parse(2, "1|2").unwrap();
        let p = params("1/2", "1/10", DiscMode::Lower);
        let v = exhaustive_check(&h, &a, &p, 1 << 20).unwrap();
        assert_eq!(v.status, DiscStatus::SatisfiedExhaustive);
        assert!(v.witness.is_none());

        // empty host at high p: some layout violates
        let h = KGraph::empty(2, 4);
        let p = params("9/10", "1/100", DiscMode::Lower);
        let v = exhaustive_check(&h, &a, &p, 1 << 20).unwrap();
        assert_eq!(v.status, DiscStatus::Violated);
        let w = v.witness.expect("witness");
        let (holds, margin) = check_witness(&h, &w, &p).unwrap();
        assert!(!holds);
        assert_eq!(Some(margin), v.margin);
    }

    #[test]
    fn exhaustive_cap() {
        let h = KGraph::empty(3, 12);
        let a = Antichain::parse(3, "1,2|3").unwrap();
        let err = exhaustive_check(&h, &a, &params("1/2", "1/10", DiscMode::Lower), 100)
            .unwrap_err();
        assert!(matches!(err, DiscError::CapExceeded { .. }));
    }

    #[test]
    fn search_finds_planted_violation() {
        let h = KGraph::empty(2, 6);
        let a = Antichain::parse(2, "1|2").unwrap();
        let p = params("9/10", "1/100", DiscMode::Lower);
        let v = search_violation(&h, &a, &p, &SearchBudget::default(), 5, &[]).unwrap();
        assert_eq!(v.status, DiscStatus::Violated);
        let w = v.witness.as_ref().expect("witness");
        let (holds, _) = check_witness(&h, w, &p).unwrap();
        assert!(!holds);
        // deterministic per seed
        let again = search_violation(&h, &a, &p, &SearchBudget::default(), 5, &[]).unwrap();
        assert_eq!(v, again);
    }

    #[test]
    fn search_on_complete_is_undetermined() {
        let h = KGraph::complete(6, 2).unwrap();
        let a = Antichain::parse(2, "1|2").unwrap();
        let p = params("1/2", "1/10", DiscMode::Lower);
        let v = search_violation(&h, &a, &p, &SearchBudget::default(), 3, &[]).unwrap();
        assert_eq!(v.status, DiscStatus::Undetermined);
        assert!(v.witness.is_none());
    }

    #[test]
    fn hint_layout_is_used() {
        let (h, c) = gen_a(3, 12, 21).unwrap();
        let hint = zero_color_layout(&c).unwrap();
        let a = hint.antichain().clone();
        let mu = zero_layout_slack(3);
        let cliques = hint.count_cliques();
        let lhs = &mu * ratio_pow(12, 3);
        let rhs = parse_ratio("2/3").unwrap() * ratio_int(cliques);
        if lhs < rhs {
            let p = DiscParams::new(parse_ratio("2/3").unwrap(), mu, DiscMode::Lower).unwrap();
            let budget = SearchBudget { restarts: 1, moves: 0, plateau: 0 };
            let v = search_violation(&h, &a, &p, &budget, 1, &[hint]).unwrap();
            assert_eq!(v.status, DiscStatus::Violated);
        }
    }

    #[test]
    fn verdict_serialization() {
        let h = KGraph::empty(2, 4);
        let a = Antichain::parse(2, "1|2").unwrap();
        let p = params("9/10", "1/100", DiscMode::Lower);
        let v = exhaustive_check(&h, &a, &p, 1 << 20).unwrap();
        let text = v.serialize();
        assert!(text.starts_with("status violated\nmargin "));
        assert!(text.contains("layout 2 4"));
    }
}
