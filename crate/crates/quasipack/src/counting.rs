//! Exact and sampled counting of constrained labeled embeddings
//! inj[F -> H; pins, target sets], and the embedding lower bound they are
//! compared against.

use std::collections::BTreeMap;

use num::{BigRational, FromPrimitive, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::bits::Bits;
use crate::hypercore::{encode_set, KGraph, VertexSet};
use crate::ratio::{in_open_unit_interval, ratio_int, ratio_powi, ratio_usize};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CountError {
    #[error("uniformity mismatch: pattern is {f}-uniform, host is {h}-uniform")]
    UniformityMismatch { f: usize, h: usize },
    #[error("invalid constraints: {0}")]
    InvalidConstraints(String),
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
}

/// Pinned images and per-vertex target sets for embedding counts.
/// Unconstrained vertices default to the whole host vertex set.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EmbeddingConstraints {
    pins: Vec<(usize, usize)>,
    targets: BTreeMap<usize, VertexSet>,
}

impl EmbeddingConstraints {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn pin(mut self, f_vertex: usize, h_vertex: usize) -> Self {
        self.pins.push((f_vertex, h_vertex));
        self
    }

    pub fn target(mut self, f_vertex: usize, allowed: VertexSet) -> Self {
        self.targets.insert(f_vertex, allowed);
        self
    }

    pub fn pins(&self) -> &[(usize, usize)] {
        &self.pins
    }

    pub fn targets(&self) -> &BTreeMap<usize, VertexSet> {
        &self.targets
    }

    fn validate(&self, f: &KGraph, h_n: usize) -> Result<(), CountError> {
        let mut seen_f = std::collections::HashSet::new();
        let mut seen_h = std::collections::HashSet::new();
        for &(w, y) in &self.pins {
            if w >= f.n() {
                return Err(CountError::InvalidConstraints(format!(
                    "pinned pattern vertex {w} out of range"
                )));
            }
            if y >= h_n {
                return Err(CountError::InvalidConstraints(format!(
                    "pinned host vertex {y} out of range"
                )));
            }
            if !seen_f.insert(w) {
                return Err(CountError::InvalidConstraints(format!(
                    "pattern vertex {w} pinned twice"
                )));
            }
            if !seen_h.insert(y) {
                return Err(CountError::InvalidConstraints(format!(
                    "host vertex {y} used by two pins"
                )));
            }
        }
        for (&w, t) in &self.targets {
            if w >= f.n() {
                return Err(CountError::InvalidConstraints(format!(
                    "target for pattern vertex {w} out of range"
                )));
            }
            if seen_f.contains(&w) {
                return Err(CountError::InvalidConstraints(format!(
                    "pattern vertex {w} is pinned; targets apply to unpinned vertices"
                )));
            }
            if let Some(&v) = t.iter().find(|&&v| v >= h_n) {
                return Err(CountError::InvalidConstraints(format!(
                    "target vertex {v} out of range"
                )));
            }
        }
        Ok(())
    }
}

/// Assignment order plus, per position, the pattern edges that become fully
/// assigned there (each listed by its other endpoints).
struct EmbedEngine<'a> {
    h: &'a KGraph,
    order: Vec<usize>,
    allowed: Vec<Bits>,
    closing: Vec<Vec<Vec<usize>>>, // per position: edges as "other endpoint" f-vertex lists
}

impl<'a> EmbedEngine<'a> {
    fn new(f: &'a KGraph, h: &'a KGraph, c: &EmbeddingConstraints) -> Self {
        let fv = f.n();
        let n = h.n();
        // pins first, then greedily the vertex closing the most edges,
        // breaking ties by degree so constrained vertices come early.
        let mut order: Vec<usize> = c.pins().iter().map(|&(w, _)| w).collect();
        let mut placed = vec![false; fv];
        for &w in &order {
            placed[w] = true;
        }
        let degree: Vec<usize> = (0..fv)
            .map(|w| f.edges().iter().filter(|e| e.contains(&w)).count())
            .collect();
        while order.len() < fv {
            let best = (0..fv)
                .filter(|&w| !placed[w])
                .max_by_key(|&w| {
                    let closes = f
                        .edges()
                        .iter()
                        .filter(|e| e.contains(&w) && e.iter().all(|&u| u == w || placed[u]))
                        .count();
                    (closes, degree[w], std::cmp::Reverse(w))
                })
                .expect("unplaced vertex exists");
            placed[best] = true;
            order.push(best);
        }

        let mut allowed = Vec::with_capacity(fv);
        for &w in &order {
            let pin = c.pins().iter().find(|&&(pw, _)| pw == w);
            let bits = if let Some(&(_, y)) = pin {
                let mut b = Bits::zeros(n);
                b.set(y);
                b
            } else if let Some(t) = c.targets().get(&w) {
                let mut b = Bits::zeros(n);
                for &v in t.iter() {
                    b.set(v);
                }
                b
            } else {
                Bits::ones(n)
            };
            allowed.push(bits);
        }

        let mut pos_of = vec![usize::MAX; fv];
        for (p, &w) in order.iter().enumerate() {
            pos_of[w] = p;
        }
        let mut closing: Vec<Vec<Vec<usize>>> = vec![Vec::new(); fv];
        for e in f.edges() {
            let last = *e.iter().max_by_key(|&&w| pos_of[w]).expect("nonempty edge");
            let others = e.iter().copied().filter(|&w| w != last).collect();
            closing[pos_of[last]].push(others);
        }
        EmbedEngine {
            h,
            order,
            allowed,
            closing,
        }
    }

    fn candidates(&self, pos: usize, images: &[usize], free: &Bits, cand: &mut Bits) -> bool {
        cand.clone_from(free);
        cand.and_assign(&self.allowed[pos]);
        let mut key_buf: Vec<usize> = Vec::new();
        for others in &self.closing[pos] {
            key_buf.clear();
            key_buf.extend(others.iter().map(|&w| images[w]));
            key_buf.sort_unstable();
            match self.h.completions().get(&encode_set(&key_buf)) {
                Some(bits) => cand.and_assign(bits),
                None => return false,
            }
        }
        true
    }

    fn count(&self) -> u128 {
        let fv = self.order.len();
        if fv == 0 {
            return 1;
        }
        if self.h.n() < fv {
            return 0;
        }
        let mut free = Bits::ones(self.h.n());
        let mut images = vec![usize::MAX; fv];
        let mut scratch: Vec<Bits> = (0..fv).map(|_| Bits::zeros(self.h.n())).collect();
        self.count_rec(0, &mut images, &mut free, &mut scratch)
    }

    fn count_rec(
        &self,
        pos: usize,
        images: &mut Vec<usize>,
        free: &mut Bits,
        scratch: &mut [Bits],
    ) -> u128 {
        let (cand, rest) = scratch.split_first_mut().expect("depth bounded");
        if !self.candidates(pos, images, free, cand) {
            return 0;
        }
        if pos == self.order.len() - 1 {
            return cand.count_ones() as u128;
        }
        let w = self.order[pos];
        let mut total = 0u128;
        for v in cand.iter_ones() {
            images[w] = v;
            free.clear(v);
            total += self.count_rec(pos + 1, images, free, rest);
            free.set(v);
        }
        images[w] = usize::MAX;
        total
    }

    /// Visits embeddings as `images[f_vertex] = h_vertex` slices; the
    /// callback returns false to stop early.
    fn visit(&self, visit: &mut dyn FnMut(&[usize]) -> bool) {
        let fv = self.order.len();
        if fv == 0 {
            visit(&[]);
            return;
        }
        if self.h.n() < fv {
            return;
        }
        let mut free = Bits::ones(self.h.n());
        let mut images = vec![usize::MAX; fv];
        let mut scratch: Vec<Bits> = (0..fv).map(|_| Bits::zeros(self.h.n())).collect();
        self.visit_rec(0, &mut images, &mut free, &mut scratch, visit);
    }

    fn visit_rec(
        &self,
        pos: usize,
        images: &mut Vec<usize>,
        free: &mut Bits,
        scratch: &mut [Bits],
        visit: &mut dyn FnMut(&[usize]) -> bool,
    ) -> bool {
        let (cand, rest) = scratch.split_first_mut().expect("depth bounded");
        if !self.candidates(pos, images, free, cand) {
            return true;
        }
        let w = self.order[pos];
        for v in cand.iter_ones() {
            images[w] = v;
            let keep_going = if pos == self.order.len() - 1 {
                visit(images)
            } else {
                free.clear(v);
                let k = self.visit_rec(pos + 1, images, free, rest, visit);
                free.set(v);
                k
            };
            if !keep_going {
                images[w] = usize::MAX;
                return false;
            }
        }
        images[w] = usize::MAX;
        true
    }
}

fn check_uniformity(f: &KGraph, h: &KGraph) -> Result<(), CountError> {
    if f.k() != h.k() {
        return Err(CountError::UniformityMismatch { f: f.k(), h: h.k() });
    }
    Ok(())
}

/// Exact count of edge-preserving injections V(F) -> V(H) honoring the
/// constraints. Non-edges of F are unconstrained.
pub fn count_inj(f: &KGraph, h: &KGraph, c: &EmbeddingConstraints) -> Result<u128, CountError> {
    check_uniformity(f, h)?;
    c.validate(f, h.n())?;
    Ok(EmbedEngine::new(f, h, c).count())
}

/// Streams embeddings (as `images[f_vertex] = h_vertex`) until the callback
/// returns false.
pub fn for_each_embedding(
    f: &KGraph,
    h: &KGraph,
    c: &EmbeddingConstraints,
    mut visit: impl FnMut(&[usize]) -> bool,
) -> Result<(), CountError> {
    check_uniformity(f, h)?;
    c.validate(f, h.n())?;
    EmbedEngine::new(f, h, c).visit(&mut visit);
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityEstimate {
    /// Estimate of inj[F -> H] / n^{v(F)}.
    pub density: BigRational,
    /// Binomial standard error of the estimate.
    pub std_error: f64,
    pub hits: u64,
    /// Edge-preserving but non-injective samples, for diagnostics only.
    pub degenerate_hits: u64,
    pub samples: u64,
}

/// Monte Carlo estimate of inj[F -> H] / n^{v(F)}: uniform vertex tuples,
/// injectivity included in the indicator. Deterministic per seed.
pub fn estimate_density(
    f: &KGraph,
    h: &KGraph,
    samples: u64,
    seed: u64,
) -> Result<DensityEstimate, CountError> {
    check_uniformity(f, h)?;
    if samples == 0 {
        return Err(CountError::InvalidParameters("samples must be >= 1".into()));
    }
    if h.n() == 0 {
        return Err(CountError::InvalidParameters("host has no vertices".into()));
    }
    let fv = f.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = 0u64;
    let mut degenerate = 0u64;
    let mut tuple = vec![0usize; fv];
    let mut image = Vec::with_capacity(f.k());
    'sample: for _ in 0..samples {
        for t in tuple.iter_mut() {
            *t = rng.gen_range(0..h.n());
        }
        for e in f.edges() {
            image.clear();
            image.extend(e.iter().map(|&w| tuple[w]));
            image.sort_unstable();
            if image.windows(2).any(|w| w[0] == w[1]) || !h.has_edge_sorted(&image) {
                continue 'sample;
            }
        }
        let injective = {
            let mut seen = tuple.clone();
            seen.sort_unstable();
            seen.windows(2).all(|w| w[0] != w[1])
        };
        if injective {
            hits += 1;
        } else {
            degenerate += 1;
        }
    }
    let density = ratio_int(hits as u128) / ratio_int(samples as u128);
    let phat = density.to_f64().unwrap_or(0.0);
    let std_error = (phat * (1.0 - phat) / samples as f64).sqrt();
    Ok(DensityEstimate {
        density,
        std_error,
        hits,
        degenerate_hits: degenerate,
        samples,
    })
}

/// Parameters of the embedding lower bound.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbedBoundParams {
    pub alpha: BigRational,
    pub p: BigRational,
    pub gamma: BigRational,
}

impl EmbedBoundParams {
    pub fn new(
        alpha: BigRational,
        p: BigRational,
        gamma: BigRational,
    ) -> Result<Self, CountError> {
        for (name, v) in [("alpha", &alpha), ("p", &p), ("gamma", &gamma)] {
            if !in_open_unit_interval(v) {
                return Err(CountError::InvalidParameters(format!(
                    "{name} must lie in (0,1)"
                )));
            }
        }
        Ok(EmbedBoundParams { alpha, p, gamma })
    }
}

/// The guaranteed lower bound for constrained embedding counts:
/// alpha^{Σ d_F(s_i)} * p^{|F| - Σ d_F(s_i)} * Π |V_j| - gamma * n^{f-m},
/// with unset targets defaulting to the full host vertex set.
pub fn embedding_bound(
    f: &KGraph,
    c: &EmbeddingConstraints,
    params: &EmbedBoundParams,
    n: usize,
) -> Result<BigRational, CountError> {
    c.validate(f, n)?;
    let m = c.pins().len();
    let fv = f.n();
    let mut sum_d: i64 = 0;
    for &(w, _) in c.pins() {
        sum_d += f
            .degree(&[w])
            .map_err(|e| CountError::InvalidConstraints(e.to_string()))? as i64;
    }
    let mut product = ratio_powi(&params.alpha, sum_d)
        * ratio_powi(&params.p, f.len() as i64 - sum_d);
    let pinned: std::collections::HashSet<usize> = c.pins().iter().map(|&(w, _)| w).collect();
    for w in 0..fv {
        if pinned.contains(&w) {
            continue;
        }
        let size = c.targets().get(&w).map_or(n, |t| t.len());
        product *= ratio_usize(size);
    }
    let slack = params.gamma.clone()
        * BigRational::from_u64(n as u64).unwrap().pow((fv - m) as i32);
    Ok(product - slack)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::parse_ratio;

    #[test]
    fn single_edge_counts() {
        // F = one edge of K_2^(2) into K_3^(2): 3*2 ordered pairs
        let f = KGraph::complete(2, 2).unwrap();
        let h = KGraph::complete(3, 2).unwrap();
        assert_eq!(count_inj(&f, &h, &EmbeddingConstraints::none()).unwrap(), 6);

        // F = single k-edge, any H: k! * |H|
        let f = KGraph::new(3, 3, vec![vec![0, 1, 2]]).unwrap();
        let h = KGraph::new(3, 6, vec![vec![0, 1, 2], vec![1, 2, 5], vec![0, 4, 5]]).unwrap();
        assert_eq!(
            count_inj(&f, &h, &EmbeddingConstraints::none()).unwrap(),
            6 * h.len() as u128
        );
    }

    #[test]
    fn pinned_triangle() {
        let f = KGraph::complete(3, 2).unwrap();
        let h = KGraph::complete(4, 2).unwrap();
        let c = EmbeddingConstraints::none().pin(0, 0);
        assert_eq!(count_inj(&f, &h, &c).unwrap(), 6);
    }

    #[test]
    fn pin_consistency_sums_to_unpinned() {
        let f = KGraph::new(3, 4, vec![vec![0, 1, 2], vec![1, 2, 3]]).unwrap();
        let h = KGraph::complete(6, 3).unwrap();
        let total = count_inj(&f, &h, &EmbeddingConstraints::none()).unwrap();
        let split: u128 = (0..h.n())
            .map(|y| count_inj(&f, &h, &EmbeddingConstraints::none().pin(1, y)).unwrap())
            .sum();
        assert_eq!(total, split);
    }

    #[test]
    fn target_monotonicity() {
        let f = KGraph::new(3, 4, vec![vec![0, 1, 2], vec![1, 2, 3]]).unwrap();
        let h = KGraph::complete(7, 3).unwrap();
        let big = VertexSet::new(0..6);
        let small = VertexSet::new(0..4);
        let cb = EmbeddingConstraints::none().target(3, big);
        let cs = EmbeddingConstraints::none().target(3, small);
        assert!(count_inj(&f, &h, &cs).unwrap() <= count_inj(&f, &h, &cb).unwrap());
    }

    #[test]
    fn degenerate_and_empty_hosts() {
        let f = KGraph::new(3, 3, vec![vec![0, 1, 2]]).unwrap();
        let h = KGraph::empty(3, 5);
        assert_eq!(count_inj(&f, &h, &EmbeddingConstraints::none()).unwrap(), 0);
        let est = estimate_density(&f, &h, 100, 7).unwrap();
        assert_eq!(est.hits, 0);
    }

    #[test]
    fn estimate_matches_complete_host() {
        // H complete: density approaches (n)_f / n^f
        let f = KGraph::new(3, 3, vec![vec![0, 1, 2]]).unwrap();
        let h = KGraph::complete(10, 3).unwrap();
        let est = estimate_density(&f, &h, 20_000, 42).unwrap();
        let exact = 10.0 * 9.0 * 8.0 / 1000.0;
        let got = est.density.to_f64().unwrap();
        assert!((got - exact).abs() < 0.02, "got {got}, want {exact}");
    }

    #[test]
    fn estimate_is_deterministic() {
        let f = KGraph::new(3, 3, vec![vec![0, 1, 2]]).unwrap();
        let h = KGraph::complete(8, 3).unwrap();
        let a = estimate_density(&f, &h, 5000, 11).unwrap();
        let b = estimate_density(&f, &h, 5000, 11).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn bound_special_cases() {
        let params = EmbedBoundParams::new(
            parse_ratio("1/2").unwrap(),
            parse_ratio("2/3").unwrap(),
            parse_ratio("1/10").unwrap(),
        )
        .unwrap();
        // m = 0, default targets: p^|F| n^f - gamma n^f
        let f = KGraph::new(3, 4, vec![vec![0, 1, 2], vec![1, 2, 3]]).unwrap();
        let n = 9usize;
        let b = embedding_bound(&f, &EmbeddingConstraints::none(), &params, n).unwrap();
        let expect = parse_ratio("4/9").unwrap() * ratio_usize(n).pow(4)
            - parse_ratio("1/10").unwrap() * ratio_usize(n).pow(4);
        assert_eq!(b, expect);

        // edgeless F: product of target sizes minus slack
        let f = KGraph::empty(3, 2);
        let c = EmbeddingConstraints::none().target(0, VertexSet::new(0..5));
        let b = embedding_bound(&f, &c, &params, n).unwrap();
        let expect = ratio_usize(5) * ratio_usize(9) - parse_ratio("1/10").unwrap() * ratio_usize(81);
        assert_eq!(b, expect);
    }

    #[test]
    fn constraint_validation() {
        let f = KGraph::new(3, 4, vec![vec![0, 1, 2]]).unwrap();
        let h = KGraph::complete(5, 3).unwrap();
        let double_pin = EmbeddingConstraints::none().pin(0, 1).pin(0, 2);
        assert!(count_inj(&f, &h, &double_pin).is_err());
        let shared_image = EmbeddingConstraints::none().pin(0, 1).pin(1, 1);
        assert!(count_inj(&f, &h, &shared_image).is_err());
        let target_on_pin = EmbeddingConstraints::none()
            .pin(0, 1)
            .target(0, VertexSet::new([2]));
        assert!(count_inj(&f, &h, &target_on_pin).is_err());
        let g2 = KGraph::complete(4, 2).unwrap();
        assert!(matches!(
            count_inj(&g2, &h, &EmbeddingConstraints::none()),
            Err(CountError::UniformityMismatch { .. })
        ));
    }
}
