use std::cmp::Ordering;
use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use netcode::enumerate::{enumerate, Mode};
use netcode::model::Network;
use netcode::symmetry::{
    apply, canonicalize, full_group, group_order, orbit_size, stabilizer, subset_transversal,
    SubsetSize,
};

fn random_network(seed: u64) -> Network {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(2..=6u32);
    let k = rng.gen_range(1..n);
    random_sized(&mut rng, k, n)
}

fn random_sized(rng: &mut ChaCha8Rng, k: u32, n: u32) -> Network {
    let q: Vec<(u32, Vec<u32>)> = (k + 1..=n)
        .map(|e| {
            let mut ins: Vec<u32> = (1..e).filter(|_| rng.gen_bool(0.4)).collect();
            if ins.is_empty() {
                ins.push(rng.gen_range(1..e));
            }
            (e, ins)
        })
        .collect();
    let w: Vec<(u32, Vec<u32>)> = (0..rng.gen_range(1..=3))
        .map(|_| {
            let d = rng.gen_range(1..=k);
            let mut ins: Vec<u32> = (1..=n).filter(|&x| x != d && rng.gen_bool(0.5)).collect();
            if ins.is_empty() {
                ins.push(n);
            }
            (d, ins)
        })
        .collect();
    Network::new(k, n - k, q, w)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn render_parse_is_stable(seed in any::<u64>()) {
        let net = random_network(seed);
        prop_assume!(net.validate().is_empty());
        let text = net.render();
        let back = Network::parse(&text).unwrap();
        prop_assert_eq!(back.render(), text);
        prop_assert_eq!(back, net);
    }

    #[test]
    fn node_view_merges_equal_input_sets(seed in any::<u64>()) {
        let net = random_network(seed);
        prop_assume!(net.validate().is_empty());
        let v = net.node_view().unwrap();
        let nodes: BTreeSet<_> = v.nodes.iter().map(|n| n.inputs.clone()).collect();
        let sinks: BTreeSet<_> = v.sinks.iter().map(|s| s.inputs.clone()).collect();
        prop_assert_eq!(nodes.len(), v.nodes.len());
        prop_assert_eq!(sinks.len(), v.sinks.len());
        let order = net.topological_edges();
        for e in &order {
            let at = order.iter().position(|x| x == e).unwrap();
            for x in net.edge_inputs(*e).unwrap() {
                if !net.is_source(*x) {
                    prop_assert!(order.iter().position(|y| y == x).unwrap() < at);
                }
            }
        }
    }

    #[test]
    fn compare_is_a_total_order(seed in any::<u64>(), k in 1..3u32, n in 3..5u32) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (x, y, z) = (random_sized(&mut rng, k, n), random_sized(&mut rng, k, n), random_sized(&mut rng, k, n));
        let xy = x.compare(&y).unwrap();
        prop_assert_eq!(y.compare(&x).unwrap(), xy.reverse());
        prop_assert_eq!(xy == Ordering::Equal, x == y);
        if xy != Ordering::Greater && y.compare(&z).unwrap() != Ordering::Greater {
            prop_assert!(x.compare(&z).unwrap() != Ordering::Greater);
        }
    }

    #[test]
    fn canonical_form_is_orbit_invariant(seed in any::<u64>(), g in any::<usize>()) {
        let net = random_network(seed);
        prop_assume!(net.validate().is_empty());
        let group = full_group(net.k(), net.l());
        let moved = apply(&group[g % group.len()], &net).unwrap();
        prop_assert_eq!(canonicalize(&moved).0, canonicalize(&net).0);
        prop_assert_eq!(stabilizer(&net).order() as u64 * orbit_size(&net), group_order(net.k(), net.l()));
    }
}

#[test]
fn orbit_sizes_match_brute_force() {
    for (k, l) in [(1, 2), (2, 1), (3, 1), (1, 3), (2, 2), (4, 1)] {
        let group = full_group(k, l);
        for e in enumerate(k, l, Mode::General) {
            let orbit: BTreeSet<Network> = group
                .iter()
                .map(|g| apply(g, &e.network).unwrap())
                .collect();
            assert_eq!(orbit.len() as u64, e.orbit_size, "{}", e.network);
            assert_eq!(orbit.iter().next(), Some(&e.network));
        }
    }
}

/// The symmetric group on 4 points acting on the 6 pairs, and on the
/// 12 ordered pairs.
fn pair_actions(ordered: bool) -> (usize, Vec<Vec<usize>>) {
    let pairs: Vec<(usize, usize)> = (0..4)
        .flat_map(|a| (0..4).map(move |b| (a, b)))
        .filter(|&(a, b)| if ordered { a != b } else { a < b })
        .collect();
    let mut group = Vec::new();
    for p in netcode::symmetry::permutations_of(4) {
        group.push(
            pairs
                .iter()
                .map(|&(a, b)| {
                    let (x, y) = (p[a], p[b]);
                    let img = if ordered || x < y { (x, y) } else { (y, x) };
                    pairs.iter().position(|&q| q == img).unwrap()
                })
                .collect(),
        );
    }
    (pairs.len(), group)
}

#[test]
fn transversal_partitions_every_level() {
    for ordered in [false, true] {
        let (n, group) = pair_actions(ordered);
        // no two chosen pairs share their first point: hereditary
        let test = |s: &[usize]| {
            let pts: Vec<usize> = s.iter().map(|&i| i / 3).collect();
            let set: BTreeSet<_> = pts.iter().collect();
            !ordered || set.len() == pts.len()
        };
        let reps = subset_transversal(n, &group, SubsetSize::AnyNonEmpty, test);
        let mut covered: BTreeSet<Vec<usize>> = BTreeSet::new();
        for r in &reps {
            let mut orbit: BTreeSet<Vec<usize>> = BTreeSet::new();
            for g in &group {
                let mut img: Vec<usize> = r.subset.iter().map(|&i| g[i]).collect();
                img.sort();
                orbit.insert(img);
            }
            assert_eq!(orbit.len() * r.stabilizer.len(), group.len());
            for s in orbit {
                assert!(covered.insert(s), "orbits overlap");
            }
        }
        let all: BTreeSet<Vec<usize>> = (1u32..1 << n)
            .map(|m| (0..n).filter(|i| m >> i & 1 == 1).collect::<Vec<usize>>())
            .filter(|s| (1..=s.len()).all(|j| test(&s[..j])) && test(s))
            .collect();
        assert_eq!(covered, all, "ordered {ordered}");
    }
}
