//! Independent brute-force oracles for the integration suite. These favor
//! obvious correctness over speed: full enumeration with no memoization,
//! no heuristics, and no shared code with the implementations they check.

use itertools::Itertools;
use quasipack::counting::EmbeddingConstraints;
use quasipack::hypercore::KGraph;
use quasipack::layouts::Antichain;

/// Counts edge-preserving injections by enumerating every injective tuple.
pub fn naive_count_inj(f: &KGraph, h: &KGraph, c: &EmbeddingConstraints) -> u128 {
    let fv = f.n();
    let mut count = 0u128;
    for tuple in (0..h.n()).permutations(fv) {
        if c.pins().iter().any(|&(w, y)| tuple[w] != y) {
            continue;
        }
        if c.targets().iter().any(|(&w, set)| !set.contains(tuple[w])) {
            continue;
        }
        let ok = f.edges().iter().all(|e| {
            let img: Vec<usize> = e.iter().map(|&w| tuple[w]).collect();
            h.has_edge(&img)
        });
        if ok {
            count += 1;
        }
    }
    count
}

fn label_set_fits(labels: &[usize], antichain: &Antichain) -> bool {
    antichain
        .members()
        .iter()
        .any(|m| labels.iter().all(|l| m.contains(l)))
}

/// Plain adaptedness by full enumeration: every edge order, and for each
/// prefix every bijection of the next edge onto [k], accepting when some
/// complete assignment satisfies all backward-intersection conditions.
pub fn naive_adapted(f: &KGraph, antichain: &Antichain) -> bool {
    let edges = f.edges();
    let k = f.k();
    let m = edges.len();
    if m == 0 {
        return true;
    }
    for order in (0..m).permutations(m) {
        if order_admits_labels(edges, k, antichain, &order, &mut Vec::new()) {
            return true;
        }
    }
    false
}

fn order_admits_labels(
    edges: &[Vec<usize>],
    k: usize,
    antichain: &Antichain,
    order: &[usize],
    labels: &mut Vec<Vec<usize>>, // labels[i][pos-in-edge] for order[i]
) -> bool {
    let i = labels.len();
    if i == order.len() {
        return true;
    }
    let edge = &edges[order[i]];
    'labeling: for assignment in (1..=k).permutations(k) {
        for j in 0..i {
            let prev = &edges[order[j]];
            let inter: Vec<usize> = edge
                .iter()
                .enumerate()
                .filter(|(_, v)| prev.contains(v))
                .map(|(pos, _)| assignment[pos])
                .collect();
            if !label_set_fits(&inter, antichain) {
                continue 'labeling;
            }
        }
        labels.push(assignment.clone());
        if order_admits_labels(edges, k, antichain, order, labels) {
            return true;
        }
        labels.pop();
    }
    false
}

/// Whether `set` (sorted) carries a copy of F, by trying every bijection.
fn set_carries_copy(h: &KGraph, f: &KGraph, set: &[usize]) -> bool {
    set.iter().copied().permutations(set.len()).any(|placement| {
        f.edges().iter().all(|e| {
            let img: Vec<usize> = e.iter().map(|&w| placement[w]).collect();
            h.has_edge(&img)
        })
    })
}

/// Perfect-packing existence by enumerating vertex partitions directly:
/// always group the lowest uncovered vertex with each choice of partners.
pub fn naive_perfect_packing_exists(h: &KGraph, f: &KGraph) -> bool {
    if h.n() % f.n() != 0 {
        return false;
    }
    fn rec(h: &KGraph, f: &KGraph, free: &[usize]) -> bool {
        let Some((&first, rest)) = free.split_first() else {
            return true;
        };
        for partners in rest.iter().copied().combinations(f.n() - 1) {
            let mut block = vec![first];
            block.extend(&partners);
            if set_carries_copy(h, f, &block) {
                let remaining: Vec<usize> = rest
                    .iter()
                    .copied()
                    .filter(|v| !partners.contains(v))
                    .collect();
                if rec(h, f, &remaining) {
                    return true;
                }
            }
        }
        false
    }
    let all: Vec<usize> = (0..h.n()).collect();
    rec(h, f, &all)
}
