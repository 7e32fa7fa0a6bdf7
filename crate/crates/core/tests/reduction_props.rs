use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use netcode::bounds::{code_region_raw, outer_region, outer_region_raw, scalar_inner_region};
use netcode::minimality::{lift_region, minimalize, minimalize_raw, push_region};
use netcode::raw::{RawNetwork, Set};
use netcode::symmetry::{apply, canonicalize, full_group};

/// A random acyclic network with up to `max_n` sources and edges.
fn random_raw(seed: u64, max_n: u32) -> RawNetwork {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(2..=max_n);
    let k = rng.gen_range(1..n);
    let mut raw = RawNetwork::default();
    raw.sources.extend(1..=k);
    for e in k + 1..=n {
        let mut ins = Set::new();
        while ins.is_empty() {
            ins = (1..e).filter(|_| rng.gen_bool(0.4)).collect();
        }
        raw.edges.insert(e, ins);
    }
    for _ in 0..rng.gen_range(1..=3) {
        let d = rng.gen_range(1..=k);
        let ins: Set = (1..=n).filter(|&x| x != d && rng.gen_bool(0.5)).collect();
        if !ins.is_empty() {
            raw.sinks.insert((d, ins));
        }
    }
    raw
}

fn scalar_raw(raw: &RawNetwork) -> netcode::polyhedra::Cone {
    code_region_raw(raw, raw.ids().len() as u32).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn reduction_transfers_outer_bound(seed in any::<u64>()) {
        let raw = random_raw(seed, 5);
        let trace = minimalize_raw(&raw);
        let budget = 14 * (raw.sources.len() + raw.edges.len() + raw.sinks.len());
        prop_assert!(trace.steps.len() <= budget);
        let start = outer_region_raw(&raw).unwrap();
        let parts: Vec<_> = trace.parts.iter().map(|p| outer_region(&p.network).unwrap()).collect();
        prop_assert_eq!(&push_region(&trace, &start).unwrap(), &parts);
        prop_assert_eq!(lift_region(&trace, &parts).unwrap(), start);
    }

    #[test]
    fn reduction_transfers_scalar_bound(seed in any::<u64>()) {
        let raw = random_raw(seed, 4);
        let trace = minimalize_raw(&raw);
        let parts: Vec<_> = trace.parts.iter().map(|p| scalar_inner_region(&p.network, 2).unwrap()).collect();
        prop_assert_eq!(lift_region(&trace, &parts).unwrap(), scalar_raw(&raw));
    }

    #[test]
    fn reduction_commutes_with_relabeling(seed in any::<u64>(), g in 0usize..1000) {
        let (net, _) = random_raw(seed, 5).compact();
        let group = full_group(net.k(), net.l());
        let moved = apply(&group[g % group.len()], &net).unwrap();
        let canon = |n| {
            let (_, t) = minimalize(n);
            let mut v: Vec<_> = t.parts.iter().map(|p| canonicalize(&p.network).0).collect();
            v.sort();
            v
        };
        prop_assert_eq!(canon(&net), canon(&moved));
    }
}

#[test]
fn split_into_two_components() {
    let mut raw = RawNetwork::default();
    raw.sources.extend([1, 2, 4, 5]);
    raw.edges.insert(3, Set::from([1, 2]));
    raw.edges.insert(6, Set::from([4, 5]));
    for (a, b, e) in [(1, 2, 3), (4, 5, 6)] {
        raw.sinks.insert((a, Set::from([b, e])));
        raw.sinks.insert((b, Set::from([a, e])));
    }
    let trace = minimalize_raw(&raw);
    assert_eq!(trace.parts.len(), 2);
    let parts: Vec<_> = trace
        .parts
        .iter()
        .map(|p| outer_region(&p.network).unwrap())
        .collect();
    assert_eq!(parts[0], parts[1]);
    let start = outer_region_raw(&raw).unwrap();
    assert_eq!(push_region(&trace, &start).unwrap(), parts);
    assert_eq!(lift_region(&trace, &parts).unwrap(), start);
}
