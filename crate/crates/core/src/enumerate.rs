//! Isomorph-free enumeration of minimal (K, L) networks.
//!
//! Two stages. First, canonical edge-definition sets `Q` of size `L`: every
//! edge defined once, no dependency cycle. Second, for each `Q` with every
//! source read by some edge, canonical sink-definition sets `W` under the
//! stabilizer of `Q`. Sink definitions are drawn from pairs `(i, A)` whose
//! inputs reach source `i` through some edge, and pairs are kept mutually
//! compatible (no nested inputs for one demand, no sink reading a source
//! that a smaller sink decodes). Survivors are filtered by the full
//! minimality check.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::minimality::is_minimal;
use crate::model::{Label, Network};
use crate::symmetry::{full_group, group_order, subset_transversal, Permutation, SubsetSize};

/// Edge definitions `(label, inputs)`.
pub type EdgeSet = Vec<(Label, Vec<Label>)>;

/// Which networks to enumerate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    General,
    /// Every edge reads all sources; sinks read only edges.
    Idsc,
}

/// One canonical minimal network.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Enumerated {
    pub network: Network,
    /// Stabilizer elements.
    pub stabilizer: Vec<Permutation>,
    pub orbit_size: u64,
}

/// A (label, input bitmask) pair; bit `x - 1` stands for label `x`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
struct Pair {
    label: Label,
    mask: u32,
}

fn mask_labels(mask: u32) -> Vec<Label> {
    (0..32)
        .filter(|b| mask >> b & 1 == 1)
        .map(|b| b + 1)
        .collect()
}

/// Sorts pairs in the network order: label, then input sequence.
fn sort_pairs(v: &mut [Pair]) {
    v.sort_by_key(|p| (p.label, mask_labels(p.mask)));
}

fn permute_mask(p: &Permutation, mask: u32) -> u32 {
    mask_labels(mask)
        .iter()
        .fold(0, |m, &x| m | 1 << (p.image(x) - 1))
}

/// Index permutations of `universe` induced by `group`.
fn induced(universe: &[Pair], group: &[Permutation]) -> Vec<Vec<usize>> {
    let index: HashMap<Pair, usize> = universe.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    group
        .iter()
        .map(|g| {
            universe
                .iter()
                .map(|p| {
                    index[&Pair {
                        label: g.image(p.label),
                        mask: permute_mask(g, p.mask),
                    }]
                })
                .collect()
        })
        .collect()
}

fn edge_universe(k: u32, l: u32) -> Vec<Pair> {
    let n = k + l;
    let mut u = Vec::new();
    for e in k + 1..=n {
        for mask in 1u32..(1 << n) {
            if mask >> (e - 1) & 1 == 0 {
                u.push(Pair { label: e, mask });
            }
        }
    }
    sort_pairs(&mut u);
    u
}

fn acyclic(defs: &[Pair]) -> bool {
    // repeatedly retire edges whose edge inputs are retired
    let edges: u32 = defs.iter().fold(0, |m, p| m | 1 << (p.label - 1));
    let mut done = 0u32;
    let mut left: Vec<&Pair> = defs.iter().collect();
    while !left.is_empty() {
        let before = left.len();
        left.retain(|p| {
            if p.mask & edges & !done == 0 {
                done |= 1 << (p.label - 1);
                false
            } else {
                true
            }
        });
        if left.len() == before {
            return false;
        }
    }
    true
}

/// Canonical edge-definition sets with their stabilizers.
fn edge_sets(k: u32, l: u32, group: &[Permutation]) -> Vec<(Vec<Pair>, Vec<usize>)> {
    let universe = edge_universe(k, l);
    let action = induced(&universe, group);
    let reps = subset_transversal(
        universe.len(),
        &action,
        SubsetSize::Exactly(l as usize),
        |s| {
            let last = universe[*s.last().unwrap()];
            if s[..s.len() - 1]
                .iter()
                .any(|&i| universe[i].label == last.label)
            {
                return false;
            }
            let defs: Vec<Pair> = s.iter().map(|&i| universe[i]).collect();
            acyclic(&defs)
        },
    );
    let all_sources = (1u32 << k) - 1;
    reps.into_iter()
        .map(|r| {
            (
                r.subset.iter().map(|&i| universe[i]).collect::<Vec<_>>(),
                r.stabilizer,
            )
        })
        .filter(|(q, _)| q.iter().fold(0, |m, p| m | p.mask) & all_sources == all_sources)
        .collect()
}

/// Edges reachable from label `x`, as a mask.
fn reach(q: &[Pair], x: Label) -> u32 {
    let mut out = 0u32;
    let mut frontier = 1u32 << (x - 1);
    while frontier != 0 {
        let mut next = 0;
        for p in q {
            let bit = 1 << (p.label - 1);
            if p.mask & frontier != 0 && out & bit == 0 {
                out |= bit;
                next |= bit;
            }
        }
        frontier = next;
    }
    out
}

fn sink_universe(k: u32, l: u32, q: &[Pair], mode: Mode) -> Vec<Pair> {
    let n = k + l;
    let edge_mask = ((1u32 << n) - 1) & !((1u32 << k) - 1);
    let mut u = Vec::new();
    for s in 1..=k {
        let r = reach(q, s);
        for mask in 1u32..(1 << n) {
            if mask >> (s - 1) & 1 == 1 || mask & r == 0 {
                continue;
            }
            if mode == Mode::Idsc && mask & !edge_mask != 0 {
                continue;
            }
            u.push(Pair { label: s, mask });
        }
    }
    sort_pairs(&mut u);
    u
}

/// Pairwise sink compatibility.
fn compatible(a: Pair, b: Pair) -> bool {
    let strict_sub = |x: u32, y: u32| x != y && x & y == x;
    if a.label == b.label && (strict_sub(a.mask, b.mask) || strict_sub(b.mask, a.mask)) {
        return false;
    }
    let reads = |m: u32, s: Label| m >> (s - 1) & 1 == 1;
    if strict_sub(a.mask, b.mask) && reads(b.mask, a.label) {
        return false;
    }
    if strict_sub(b.mask, a.mask) && reads(a.mask, b.label) {
        return false;
    }
    true
}

fn to_network(k: u32, l: u32, q: &[Pair], w: &[Pair]) -> Network {
    Network::new(
        k,
        l,
        q.iter().map(|p| (p.label, mask_labels(p.mask))),
        w.iter().map(|p| (p.label, mask_labels(p.mask))),
    )
}

/// Canonical minimal networks for one canonical edge set.
fn complete(k: u32, l: u32, q: &[Pair], q_stab: &[Permutation], mode: Mode) -> Vec<Enumerated> {
    let universe = sink_universe(k, l, q, mode);
    let action = induced(&universe, q_stab);
    let reps = subset_transversal(universe.len(), &action, SubsetSize::AnyNonEmpty, |s| {
        let last = universe[*s.last().unwrap()];
        s[..s.len() - 1]
            .iter()
            .all(|&i| compatible(universe[i], last))
    });
    let order = group_order(k, l);
    reps.into_iter()
        .filter_map(|r| {
            let w: Vec<Pair> = r.subset.iter().map(|&i| universe[i]).collect();
            let net = to_network(k, l, q, &w);
            if !is_minimal(&net) {
                return None;
            }
            let stabilizer: Vec<Permutation> =
                r.stabilizer.iter().map(|&i| q_stab[i].clone()).collect();
            let orbit_size = order / stabilizer.len() as u64;
            Some(Enumerated {
                network: net,
                stabilizer,
                orbit_size,
            })
        })
        .collect()
}

/// Canonical edge sets, for staged or resumable runs. Each entry is the
/// edge set as a network with empty `W`, plus its stabilizer.
pub fn canonical_edge_sets(k: u32, l: u32, mode: Mode) -> Vec<(EdgeSet, Vec<Permutation>)> {
    let group = full_group(k, l);
    let sets: Vec<(Vec<Pair>, Vec<usize>)> = match mode {
        Mode::General => edge_sets(k, l, &group),
        Mode::Idsc => {
            let all = (1u32 << k) - 1;
            let q = (k + 1..=k + l)
                .map(|e| Pair {
                    label: e,
                    mask: all,
                })
                .collect();
            vec![(q, (0..group.len()).collect())]
        }
    };
    sets.into_iter()
        .map(|(q, stab)| {
            (
                q.iter().map(|p| (p.label, mask_labels(p.mask))).collect(),
                stab.iter().map(|&i| group[i].clone()).collect(),
            )
        })
        .collect()
}

/// Canonical minimal networks whose edge set is `q` (canonical, with
/// stabilizer `q_stab`).
pub fn complete_edge_set(
    k: u32,
    l: u32,
    q: &[(Label, Vec<Label>)],
    q_stab: &[Permutation],
    mode: Mode,
) -> Vec<Enumerated> {
    let pairs: Vec<Pair> = q
        .iter()
        .map(|(e, ins)| Pair {
            label: *e,
            mask: ins.iter().fold(0, |m, &x| m | 1 << (x - 1)),
        })
        .collect();
    complete(k, l, &pairs, q_stab, mode)
}

/// All canonical minimal (K, L) networks, sorted.
pub fn enumerate(k: u32, l: u32, mode: Mode) -> Vec<Enumerated> {
    let sets = canonical_edge_sets(k, l, mode);
    let mut out: Vec<Enumerated> = sets
        .par_iter()
        .flat_map_iter(|(q, stab)| complete_edge_set(k, l, q, stab, mode))
        .collect();
    out.sort_by(|a, b| a.network.cmp(&b.network));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symmetry::canonicalize;

    #[test]
    fn one_one() {
        let v = enumerate(1, 1, Mode::General);
        assert_eq!(v.len(), 1);
        assert_eq!(
            v[0].network,
            Network::new(1, 1, [(2, vec![1])], [(1, vec![2])])
        );
    }

    #[test]
    fn two_one() {
        let v = enumerate(2, 1, Mode::General);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].orbit_size, 1);
    }

    #[test]
    fn one_two_are_canonical() {
        let v = enumerate(1, 2, Mode::General);
        assert_eq!(v.len(), 4);
        assert_eq!(v.iter().map(|e| e.orbit_size).sum::<u64>(), 7);
        for e in &v {
            assert_eq!(canonicalize(&e.network).0, e.network);
        }
    }
}
