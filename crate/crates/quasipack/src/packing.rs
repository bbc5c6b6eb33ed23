//! Perfect-packing machinery: an exact cover solver, a greedy
//! almost-packing with divisibility adjustment, absorber testing and search
//! through the grid construction, richness diagnostics, absorbing-family
//! selection, and the end-to-end absorb-and-pack pipeline.

use std::collections::{BTreeMap, BTreeSet};

use num::{BigRational, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::adapted::{grid_graph, AdaptError};
use crate::counting::{for_each_embedding, CountError, EmbeddingConstraints};
use crate::hypercore::{GraphError, KGraph, Relabeled, VertexSet};
use crate::ratio::{ratio_usize, in_open_unit_interval};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PackError {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("found {found} of {target} disjoint absorbers")]
    InsufficientAbsorbers { found: usize, target: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Count(#[from] CountError),
    #[error(transparent)]
    Adapt(#[from] AdaptError),
}

/// A list of vertex-disjoint, edge-preserving placements of the pattern.
/// `copies[i][w]` is the host image of pattern vertex w in the i-th copy.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Packing {
    pub copies: Vec<Vec<usize>>,
}

impl Packing {
    /// One line per copy: "w0->h0 w1->h1 ...".
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        for copy in &self.copies {
            let line: Vec<String> = copy
                .iter()
                .enumerate()
                .map(|(w, h)| format!("{w}->{h}"))
                .collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn covered(&self) -> VertexSet {
        VertexSet::new(self.copies.iter().flatten().copied())
    }
}

/// True iff every copy is a valid placement, images are pairwise disjoint,
/// and together they cover the host.
pub fn is_perfect_packing(h: &KGraph, f: &KGraph, p: &Packing) -> bool {
    if f.k() != h.k() {
        return false;
    }
    let mut seen = vec![false; h.n()];
    for copy in &p.copies {
        if copy.len() != f.n() {
            return false;
        }
        for &v in copy {
            if v >= h.n() || seen[v] {
                return false;
            }
            seen[v] = true;
        }
        for e in f.edges() {
            let img: Vec<usize> = e.iter().map(|&w| copy[w]).collect();
            if !h.has_edge(&img) {
                return false;
            }
        }
    }
    seen.into_iter().all(|s| s)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PackOutcome {
    Found(Packing),
    /// The search space was exhausted: no perfect packing exists (also the
    /// immediate answer when v(F) does not divide v(H)).
    ProvenNone,
    BudgetExceeded,
}

impl PackOutcome {
    pub fn packing(&self) -> Option<&Packing> {
        match self {
            PackOutcome::Found(p) => Some(p),
            _ => None,
        }
    }
}

struct CoverSearch<'a> {
    h: &'a KGraph,
    f: &'a KGraph,
    budget: u64,
    nodes: u64,
}

impl<'a> CoverSearch<'a> {
    /// All distinct copy images through `v` inside `free`, one placement per
    /// image. Charges each streamed embedding against the budget.
    fn copies_through(
        &mut self,
        v: usize,
        free: &VertexSet,
    ) -> Result<BTreeMap<Vec<usize>, Vec<usize>>, ()> {
        let mut found: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
        let mut exceeded = false;
        for w in 0..self.f.n() {
            let mut c = EmbeddingConstraints::none().pin(w, v);
            for t in 0..self.f.n() {
                if t != w {
                    c = c.target(t, free.clone());
                }
            }
            for_each_embedding(self.f, self.h, &c, |images| {
                self.nodes += 1;
                if self.nodes > self.budget {
                    exceeded = true;
                    return false;
                }
                let mut key = images.to_vec();
                key.sort_unstable();
                found.entry(key).or_insert_with(|| images.to_vec());
                true
            })
            .expect("constraints are valid by construction");
            if exceeded {
                return Err(());
            }
        }
        Ok(found)
    }

    fn rec(&mut self, free: &VertexSet, chosen: &mut Vec<Vec<usize>>) -> Result<bool, ()> {
        if free.is_empty() {
            return Ok(true);
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(());
        }
        // branch on the vertex with the fewest copies through it
        let mut best: Option<(usize, BTreeMap<Vec<usize>, Vec<usize>>)> = None;
        for &v in free.iter() {
            let cands = self.copies_through(v, free)?;
            let better = best.as_ref().map_or(true, |(_, b)| cands.len() < b.len());
            if better {
                let empty = cands.is_empty();
                best = Some((v, cands));
                if empty {
                    break;
                }
            }
        }
        let (_, cands) = best.expect("free set is nonempty");
        for placement in cands.into_values() {
            let remaining = VertexSet::new(
                free.iter().copied().filter(|u| !placement.contains(u)),
            );
            chosen.push(placement);
            if self.rec(&remaining, chosen)? {
                return Ok(true);
            }
            chosen.pop();
        }
        Ok(false)
    }
}

/// Exact-cover search for a perfect packing: branch on the least-coverable
/// free vertex, generating its copies lazily. `budget` caps search effort
/// (nodes plus streamed embeddings) so an aborted search is distinguishable
/// from proven nonexistence.
pub fn exact_perfect_packing(
    h: &KGraph,
    f: &KGraph,
    budget: u64,
) -> Result<PackOutcome, PackError> {
    if f.k() != h.k() {
        return Err(PackError::InvalidParameters(format!(
            "uniformity mismatch: {} vs {}",
            f.k(),
            h.k()
        )));
    }
    if f.n() == 0 {
        return Err(PackError::InvalidParameters("pattern has no vertices".into()));
    }
    if h.n() % f.n() != 0 {
        return Ok(PackOutcome::ProvenNone);
    }
    let mut search = CoverSearch { h, f, budget, nodes: 0 };
    let free = VertexSet::new(0..h.n());
    let mut chosen = Vec::new();
    match search.rec(&free, &mut chosen) {
        Ok(true) => {
            let packing = Packing { copies: chosen };
            debug_assert!(is_perfect_packing(h, f, &packing));
            Ok(PackOutcome::Found(packing))
        }
        Ok(false) => Ok(PackOutcome::ProvenNone),
        Err(()) => Ok(PackOutcome::BudgetExceeded),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GreedyResult {
    pub packing: Packing,
    /// Free vertices after the divisibility adjustment.
    pub leftover: VertexSet,
    /// Free vertices before the adjustment; contains no copy of the pattern.
    pub raw_leftover: VertexSet,
}

fn random_copy_in(
    h: &KGraph,
    f: &KGraph,
    free: &VertexSet,
    rng: &mut ChaCha8Rng,
    attempts: usize,
) -> Option<Vec<usize>> {
    let fv = f.n();
    if free.len() < fv {
        return None;
    }
    let pool: Vec<usize> = free.iter().copied().collect();
    for _ in 0..attempts {
        let mut shuffled = pool.clone();
        shuffled.partial_shuffle(rng, fv);
        let placement = &shuffled[..fv];
        if f
            .edges()
            .iter()
            .all(|e| h.has_edge(&e.iter().map(|&w| placement[w]).collect::<Vec<_>>()))
        {
            return Some(placement.to_vec());
        }
    }
    None
}

fn first_copy_in(h: &KGraph, f: &KGraph, free: &VertexSet) -> Option<Vec<usize>> {
    let mut constraints = EmbeddingConstraints::none();
    for w in 0..f.n() {
        constraints = constraints.target(w, free.clone());
    }
    let mut found = None;
    for_each_embedding(f, h, &constraints, |images| {
        found = Some(images.to_vec());
        false
    })
    .expect("constraints are valid by construction");
    found
}

/// Greedily removes pattern copies (randomized attempts, then a
/// deterministic sweep) until none remains, then — when v(F) divides v(H) —
/// returns y copies to the leftover so that b divides its size.
pub fn greedy_packing(
    h: &KGraph,
    f: &KGraph,
    b: usize,
    seed: u64,
) -> Result<GreedyResult, PackError> {
    if f.k() != h.k() {
        return Err(PackError::InvalidParameters(format!(
            "uniformity mismatch: {} vs {}",
            f.k(),
            h.k()
        )));
    }
    let fv = f.n();
    if fv == 0 || b % fv != 0 {
        return Err(PackError::InvalidParameters(format!(
            "pattern order {fv} must divide b={b}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut free = VertexSet::new(0..h.n());
    let mut copies: Vec<Vec<usize>> = Vec::new();
    loop {
        let copy = random_copy_in(h, f, &free, &mut rng, 50)
            .or_else(|| first_copy_in(h, f, &free));
        match copy {
            Some(c) => {
                free = VertexSet::new(free.iter().copied().filter(|v| !c.contains(v)));
                copies.push(c);
            }
            None => break,
        }
    }
    let raw_leftover = free.clone();
    let mut leftover = free;
    if h.n() % fv == 0 {
        let t = b / fv;
        let copies_in_leftover = leftover.len() / fv; // fv | leftover here
        let y = (t - copies_in_leftover % t) % t;
        if y <= copies.len() {
            for _ in 0..y {
                let c = copies.pop().expect("y <= copies");
                leftover = leftover.union(&VertexSet::new(c));
            }
        }
    }
    Ok(GreedyResult {
        packing: Packing { copies },
        leftover,
        raw_leftover,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AbsorbCheck {
    Absorbs,
    Fails,
    /// A packing search hit its budget; neither answer is proven.
    Undetermined,
}

fn lift(relabeled: &Relabeled, copies: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
    copies
        .into_iter()
        .map(|c| c.into_iter().map(|v| relabeled.old_of_new[v]).collect())
        .collect()
}

/// A F-absorbs B iff both H[A] and H[A ∪ B] have perfect packings.
pub fn is_absorber(
    h: &KGraph,
    f: &KGraph,
    a: &VertexSet,
    b: &VertexSet,
    budget: u64,
) -> Result<AbsorbCheck, PackError> {
    if !a.is_disjoint(b) {
        return Err(PackError::InvalidParameters(
            "absorber and absorbed set must be disjoint".into(),
        ));
    }
    if f.n() == 0 || a.len() % f.n() != 0 || (a.len() + b.len()) % f.n() != 0 {
        return Err(PackError::InvalidParameters(format!(
            "pattern order {} must divide |A|={} and |A|+|B|={}",
            f.n(),
            a.len(),
            a.len() + b.len()
        )));
    }
    let mut undetermined = false;
    for set in [a.clone(), a.union(b)] {
        let sub = h.induced(&set)?;
        match exact_perfect_packing(&sub.graph, f, budget)? {
            PackOutcome::Found(_) => {}
            PackOutcome::ProvenNone => return Ok(AbsorbCheck::Fails),
            PackOutcome::BudgetExceeded => undetermined = true,
        }
    }
    Ok(if undetermined {
        AbsorbCheck::Undetermined
    } else {
        AbsorbCheck::Absorbs
    })
}

/// At most this many orderings of B are tried exhaustively; beyond it a
/// seeded sample of orderings is used instead.
const PERMUTATION_CAP: usize = 720;

/// Searches for absorbers of B by embedding the grid construction with its
/// zeroth row pinned to an ordering of B; each embedding's non-zeroth-row
/// image is a candidate, and only candidates re-verified by `is_absorber`
/// are returned.
pub fn find_absorbers(
    h: &KGraph,
    f: &KGraph,
    b: &VertexSet,
    budget: u64,
    seed: u64,
) -> Result<Vec<VertexSet>, PackError> {
    if b.len() != f.n() {
        return Err(PackError::InvalidParameters(format!(
            "absorbed set has {} vertices, pattern has {}",
            b.len(),
            f.n()
        )));
    }
    let grid = grid_graph(f)?;
    let fv = f.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut factorial: usize = 1;
    for i in 1..=fv {
        factorial = factorial.saturating_mul(i);
    }
    let orderings: Vec<Vec<usize>> = if factorial <= PERMUTATION_CAP {
        permutations_of(b.as_slice())
    } else {
        (0..PERMUTATION_CAP)
            .map(|_| {
                let mut p: Vec<usize> = b.iter().copied().collect();
                p.shuffle(&mut rng);
                p
            })
            .collect()
    };
    let others = VertexSet::new((0..h.n()).filter(|v| !b.contains(*v)));
    let mut results: Vec<VertexSet> = Vec::new();
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    for ordering in orderings {
        let mut constraints = EmbeddingConstraints::none();
        for (j, &target) in ordering.iter().enumerate() {
            constraints = constraints.pin(grid.zeroth_row[j], target);
        }
        for v in 0..grid.graph.n() {
            if !grid.zeroth_row.contains(&v) {
                constraints = constraints.target(v, others.clone());
            }
        }
        let mut image: Option<Vec<usize>> = None;
        for_each_embedding(&grid.graph, h, &constraints, |images| {
            image = Some(
                (0..grid.graph.n())
                    .filter(|v| !grid.zeroth_row.contains(v))
                    .map(|v| images[v])
                    .collect(),
            );
            false
        })?;
        if let Some(mut img) = image {
            img.sort_unstable();
            if !seen.insert(img.clone()) {
                continue;
            }
            let a = VertexSet::new(img);
            if is_absorber(h, f, &a, b, budget)? == AbsorbCheck::Absorbs {
                results.push(a);
            }
        }
    }
    Ok(results)
}

fn permutations_of(items: &[usize]) -> Vec<Vec<usize>> {
    use itertools::Itertools;
    items.iter().copied().permutations(items.len()).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbsorberParams {
    /// Absorber size; the grid construction yields f²−f.
    pub a: usize,
    /// Absorbed-set size, default f.
    pub b: usize,
    /// Richness density threshold (diagnostic).
    pub epsilon: BigRational,
    /// Fraction of the host the family should be able to absorb.
    pub omega: BigRational,
}

impl AbsorberParams {
    pub fn new(
        f: &KGraph,
        a: usize,
        b: usize,
        epsilon: BigRational,
        omega: BigRational,
    ) -> Result<AbsorberParams, PackError> {
        let fv = f.n();
        if fv == 0 || a % fv != 0 || b % fv != 0 {
            return Err(PackError::InvalidParameters(format!(
                "pattern order {fv} must divide a={a} and b={b}"
            )));
        }
        if !in_open_unit_interval(&epsilon) || !in_open_unit_interval(&omega) {
            return Err(PackError::InvalidParameters(
                "epsilon and omega must lie in (0,1)".into(),
            ));
        }
        Ok(AbsorberParams { a, b, epsilon, omega })
    }

    /// Grid-construction defaults: a = f²−f, b = f, ω = 1/(4f²).
    pub fn for_pattern(f: &KGraph) -> Result<AbsorberParams, PackError> {
        let fv = f.n();
        if fv == 0 {
            return Err(PackError::InvalidParameters("pattern has no vertices".into()));
        }
        AbsorberParams::new(
            f,
            fv * fv - fv,
            fv,
            BigRational::new(1.into(), 100.into()),
            BigRational::new(1.into(), (4 * fv * fv).into()),
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RichnessReport {
    /// Fraction of sampled (B, A) pairs where A absorbs B.
    pub overall: BigRational,
    /// Worst per-B absorbing fraction among the sampled B's.
    pub per_b_min: BigRational,
    pub b_sets: usize,
    pub trials_per_b: usize,
    /// Pairs whose packing search hit its budget (counted as non-absorbing).
    pub undetermined: usize,
}

/// Samples random b-sets and, for each, random disjoint a-sets, reporting
/// empirical absorber fractions. Diagnostic only; deterministic per seed.
pub fn richness_estimate(
    h: &KGraph,
    f: &KGraph,
    params: &AbsorberParams,
    trials: usize,
    seed: u64,
) -> Result<RichnessReport, PackError> {
    if trials == 0 {
        return Err(PackError::InvalidParameters("trials must be positive".into()));
    }
    if params.a + params.b > h.n() {
        return Err(PackError::InvalidParameters(format!(
            "host has {} vertices, need a+b = {}",
            h.n(),
            params.a + params.b
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let b_sets = std::cmp::max(1, (trials as f64).sqrt() as usize);
    let trials_per_b = std::cmp::max(1, trials / b_sets);
    let all: Vec<usize> = (0..h.n()).collect();
    let mut hits_total = 0usize;
    let mut total = 0usize;
    let mut per_b_min: Option<BigRational> = None;
    let mut undetermined = 0usize;
    for _ in 0..b_sets {
        let mut pool = all.clone();
        pool.partial_shuffle(&mut rng, params.b);
        let b_set = VertexSet::new(pool[..params.b].iter().copied());
        let mut hits = 0usize;
        for _ in 0..trials_per_b {
            let mut rest: Vec<usize> = all
                .iter()
                .copied()
                .filter(|v| !b_set.contains(*v))
                .collect();
            rest.partial_shuffle(&mut rng, params.a);
            let a_set = VertexSet::new(rest[..params.a].iter().copied());
            match is_absorber(h, f, &a_set, &b_set, 100_000)? {
                AbsorbCheck::Absorbs => hits += 1,
                AbsorbCheck::Fails => {}
                AbsorbCheck::Undetermined => undetermined += 1,
            }
            total += 1;
        }
        hits_total += hits;
        let frac = ratio_usize(hits) / ratio_usize(trials_per_b);
        if per_b_min.as_ref().map_or(true, |m| frac < *m) {
            per_b_min = Some(frac);
        }
    }
    Ok(RichnessReport {
        overall: ratio_usize(hits_total) / ratio_usize(total),
        per_b_min: per_b_min.unwrap_or_else(BigRational::zero),
        b_sets,
        trials_per_b,
        undetermined,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyConfig {
    /// Random b-sets tried as absorber generators.
    pub candidate_rounds: usize,
    /// Foreign b-sets each kept absorber is validated against.
    pub validation_samples: usize,
    /// Minimum fraction of validation b-sets a candidate must absorb.
    pub min_valid_numer: usize,
    pub min_valid_denom: usize,
    /// Budget for every packing search along the way.
    pub pack_budget: u64,
}

impl Default for FamilyConfig {
    fn default() -> FamilyConfig {
        FamilyConfig {
            candidate_rounds: 200,
            validation_samples: 6,
            min_valid_numer: 1,
            min_valid_denom: 2,
            pack_budget: 200_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AbsorbingFamily {
    /// Union of the selected pairwise-disjoint absorbers; a divides its size.
    pub union: VertexSet,
    pub absorbers: Vec<VertexSet>,
    /// min(ω, |family|·b / n): the fraction the family is sized to absorb.
    pub omega_achieved: BigRational,
}

/// Selects pairwise-disjoint absorbers by seeded sampling until the family
/// can cover an ω-fraction of the host (one absorber per future b-set);
/// each candidate is kept only when it also absorbs a sampled set of other
/// b-sets.
pub fn build_absorbing_family(
    h: &KGraph,
    f: &KGraph,
    params: &AbsorberParams,
    seed: u64,
    config: &FamilyConfig,
) -> Result<AbsorbingFamily, PackError> {
    let n = h.n();
    if params.a + params.b > n {
        return Err(PackError::InvalidParameters(format!(
            "host has {n} vertices, need a+b = {}",
            params.a + params.b
        )));
    }
    // enough absorbers for ω·n vertices in b-sized bites, at least one
    let omega_vertices = &params.omega * ratio_usize(n);
    let target = (omega_vertices / ratio_usize(params.b))
        .ceil()
        .to_integer()
        .to_usize()
        .unwrap_or(usize::MAX)
        .max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let all: Vec<usize> = (0..n).collect();
    let mut family: Vec<VertexSet> = Vec::new();
    let mut used = VertexSet::new(std::iter::empty());
    for _ in 0..config.candidate_rounds {
        if family.len() >= target {
            break;
        }
        let mut pool: Vec<usize> = all.iter().copied().filter(|v| !used.contains(*v)).collect();
        if pool.len() < params.b {
            break;
        }
        pool.partial_shuffle(&mut rng, params.b);
        let b_set = VertexSet::new(pool[..params.b].iter().copied());
        let found = find_absorbers(h, f, &b_set, config.pack_budget, rng.gen())?;
        let candidate = found
            .into_iter()
            .find(|a| a.is_disjoint(&used) && a.len() == params.a);
        let Some(candidate) = candidate else { continue };
        // validate against foreign b-sets drawn from outside the candidate
        let mut valid = 0usize;
        for _ in 0..config.validation_samples {
            let mut rest: Vec<usize> = all
                .iter()
                .copied()
                .filter(|v| !candidate.contains(*v))
                .collect();
            rest.partial_shuffle(&mut rng, params.b);
            let probe = VertexSet::new(rest[..params.b].iter().copied());
            if is_absorber(h, f, &candidate, &probe, config.pack_budget)?
                == AbsorbCheck::Absorbs
            {
                valid += 1;
            }
        }
        if valid * config.min_valid_denom < config.validation_samples * config.min_valid_numer {
            continue;
        }
        used = used.union(&candidate);
        family.push(candidate);
    }
    if family.len() < target {
        return Err(PackError::InsufficientAbsorbers {
            found: family.len(),
            target,
        });
    }
    let achieved = ratio_usize(family.len() * params.b) / ratio_usize(n);
    let omega_achieved = if achieved < params.omega {
        achieved
    } else {
        params.omega.clone()
    };
    Ok(AbsorbingFamily {
        union: used,
        absorbers: family,
        omega_achieved,
    })
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AbsorbPackError {
    #[error("pattern order {f} does not divide host order {h}")]
    Divisibility { f: usize, h: usize },
    #[error("no perfect packing exists")]
    NoPacking,
    #[error("packing search budget exceeded")]
    Budget,
    #[error("absorbing family: {0}")]
    Family(String),
    #[error("greedy stage: {0}")]
    Greedy(String),
    #[error("absorb stage: {0}")]
    Absorb(String),
    #[error(transparent)]
    Pack(#[from] PackError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbsorbPackConfig {
    /// Hosts up to this order skip the pipeline and go straight to the
    /// exact solver.
    pub exact_threshold: usize,
    pub family: FamilyConfig,
}

impl Default for AbsorbPackConfig {
    fn default() -> AbsorbPackConfig {
        AbsorbPackConfig {
            exact_threshold: 24,
            family: FamilyConfig::default(),
        }
    }
}

/// Full pipeline: absorbing family → greedy packing of the rest → leftover
/// checks → exact packing of family ∪ leftover → assembled, verified
/// perfect packing. Small hosts fall back to the exact solver directly.
pub fn absorb_pack(
    h: &KGraph,
    f: &KGraph,
    params: &AbsorberParams,
    seed: u64,
    budget: u64,
    config: &AbsorbPackConfig,
) -> Result<Packing, AbsorbPackError> {
    let fv = f.n();
    if fv == 0 || h.n() % fv != 0 {
        return Err(AbsorbPackError::Divisibility { f: fv, h: h.n() });
    }
    if h.n() <= config.exact_threshold {
        return match exact_perfect_packing(h, f, budget)? {
            PackOutcome::Found(p) => Ok(p),
            PackOutcome::ProvenNone => Err(AbsorbPackError::NoPacking),
            PackOutcome::BudgetExceeded => Err(AbsorbPackError::Budget),
        };
    }
    let family = build_absorbing_family(h, f, params, seed, &config.family)
        .map_err(|e| AbsorbPackError::Family(e.to_string()))?;
    let rest = family.union.complement(h.n());
    let sub = h.induced(&rest).map_err(PackError::from)?;
    let greedy = greedy_packing(&sub.graph, f, params.b, seed ^ 0x9e37_79b9)?;
    let leftover_host = VertexSet::new(
        greedy.leftover.iter().map(|&v| sub.old_of_new[v]),
    );
    let omega_vertices = &family.omega_achieved * ratio_usize(h.n());
    if ratio_usize(leftover_host.len()) > omega_vertices {
        return Err(AbsorbPackError::Greedy(format!(
            "leftover of {} vertices exceeds the absorbable fraction",
            leftover_host.len()
        )));
    }
    if leftover_host.len() % params.b != 0 {
        return Err(AbsorbPackError::Greedy(format!(
            "leftover size {} not divisible by b={}",
            leftover_host.len(),
            params.b
        )));
    }
    let absorb_set = family.union.union(&leftover_host);
    let absorb_sub = h.induced(&absorb_set).map_err(PackError::from)?;
    let closing = match exact_perfect_packing(&absorb_sub.graph, f, budget)? {
        PackOutcome::Found(p) => p,
        PackOutcome::ProvenNone => {
            return Err(AbsorbPackError::Absorb(
                "family plus leftover has no perfect packing".into(),
            ))
        }
        PackOutcome::BudgetExceeded => return Err(AbsorbPackError::Budget),
    };
    let mut copies = lift(&sub, greedy.packing.copies);
    copies.extend(lift(&absorb_sub, closing.copies));
    let packing = Packing { copies };
    if !is_perfect_packing(h, f, &packing) {
        return Err(AbsorbPackError::Absorb(
            "assembled packing failed verification".into(),
        ));
    }
    Ok(packing)
}
