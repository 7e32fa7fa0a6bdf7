use netcode::bounds::{outer_region, region, scalar_inner_region, BoundTag};
use netcode::enumerate::{enumerate, Mode};
use netcode::model::Network;
use netcode::operators::{
    all_embeddings, all_pairings, combine, combine_region, embed_region, is_minor, replay,
    smallest_seeds, EmbedKind, MinorSearch,
};

fn small_canonicals(max_n: u32) -> Vec<Network> {
    let mut out = Vec::new();
    for n in 2..=max_n {
        for k in 1..n {
            out.extend(
                enumerate(k, n - k, Mode::General)
                    .into_iter()
                    .map(|e| e.network),
            );
        }
    }
    out
}

fn seeds() -> Vec<Network> {
    smallest_seeds()
        .iter()
        .map(|s| Network::parse(s).unwrap())
        .collect()
}

fn scalar_sufficient(n: &Network) -> bool {
    scalar_inner_region(n, 2).unwrap() == outer_region(n).unwrap()
}

#[test]
fn embedding_transfer_matches_direct_bounds() {
    let mut outer_count = 0;
    for big in small_canonicals(4) {
        let suff = scalar_sufficient(&big);
        for tag in [
            BoundTag::Outer,
            BoundTag::Scalar { field: 2 },
            BoundTag::vector_plus(&big, 1),
        ] {
            let r = region(&big, tag).unwrap();
            for step in all_embeddings(&big) {
                let t = embed_region(&step, &r, tag).unwrap();
                for ((c, part), ptag) in t.regions.iter().zip(&step.post).zip(&t.tags) {
                    let direct = region(&part.network, *ptag).unwrap();
                    let at = format!("{} {} {} {tag}", big.render(), step.kind, step.target);
                    if t.exact {
                        assert_eq!(c, &direct, "{at}");
                    } else {
                        assert_eq!(
                            (step.kind, tag),
                            (EmbedKind::EdgeContract, BoundTag::Scalar { field: 2 })
                        );
                        assert!(c.is_subcone(&direct).unwrap(), "{at}");
                    }
                    if tag == BoundTag::Outer {
                        outer_count += 1;
                        if suff {
                            assert!(scalar_sufficient(&part.network), "{at}");
                        }
                    }
                }
            }
        }
    }
    assert!(outer_count >= 500, "{outer_count}");
}

#[test]
fn combination_transfer_matches_direct_bounds() {
    let seeds = seeds();
    let mut count = 0;
    for a in &seeds {
        for b in &seeds {
            let both = scalar_sufficient(a) && scalar_sufficient(b);
            for p in all_pairings(a, b) {
                let step = combine(a, b, &p).unwrap();
                if step.result.iter().any(|part| part.network.n() > 5) {
                    continue;
                }
                for tag in [BoundTag::Outer, BoundTag::Scalar { field: 2 }] {
                    let got =
                        combine_region(&step, &region(a, tag).unwrap(), &region(b, tag).unwrap())
                            .unwrap();
                    for (c, part) in got.iter().zip(&step.result) {
                        count += 1;
                        let direct = region(&part.network, tag).unwrap();
                        assert_eq!(
                            c,
                            &direct,
                            "{} + {} by {:?} {tag}",
                            a.render(),
                            b.render(),
                            p
                        );
                        if both && tag == BoundTag::Outer {
                            assert!(scalar_sufficient(&part.network));
                        }
                    }
                }
            }
        }
    }
    assert!(count >= 100, "{count}");
}

#[test]
fn insufficiency_survives_merging_with_seeds() {
    let bad: Vec<Network> = enumerate(3, 1, Mode::General)
        .into_iter()
        .map(|e| e.network)
        .filter(|n| !scalar_sufficient(n))
        .collect();
    assert_eq!(bad.len(), 5);
    let one_one = &seeds()[0];
    for a in &bad {
        for p in all_pairings(a, one_one) {
            let step = combine(a, one_one, &p).unwrap();
            if let [part] = step.result.as_slice() {
                if part.network.n() <= 6 {
                    assert!(
                        !scalar_sufficient(&part.network),
                        "{} by {:?}",
                        a.render(),
                        p
                    );
                }
            }
        }
    }
}

#[test]
fn minor_witnesses_replay() {
    let nets = small_canonicals(4);
    let big = nets.iter().filter(|n| n.n() == 4).nth(7).unwrap();
    for step in all_embeddings(big) {
        for part in &step.post {
            for second in all_embeddings(&part.network) {
                for small in &second.post {
                    match is_minor(&small.network, big, 1000) {
                        MinorSearch::Found(w) => assert!(replay(big, &small.network, &w)),
                        other => panic!("{other:?}"),
                    }
                }
            }
        }
    }
}

#[test]
fn larger_network_is_not_a_minor() {
    let nets = small_canonicals(3);
    let big = nets.iter().find(|n| n.n() == 3).unwrap();
    assert_eq!(is_minor(big, &seeds()[0], 100), MinorSearch::NotMinor);
}
