//! Embedding and combination operators with their rate-region transfers,
//! minor search, forbidden-minor filtering, and closure generation.
//!
//! Every operator acts on a [`RawNetwork`], then reduces the result with
//! [`minimalize_raw`] and puts each minimal part in canonical form. Regions
//! follow the same path: the operator's own cone operation, then the
//! reduction trace, then the canonical relabeling.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bounds::BoundTag;
use crate::minimality::{
    is_minimal, minimalize_raw, omega, push_region, rate, rate_names, MinimalityError,
    ReductionTrace,
};
use crate::model::{Label, Network};
use crate::polyhedra::{Cone, PolyError};
use crate::raw::{RawNetwork, Set};
use crate::symmetry::{canonicalize, Permutation};

#[derive(Debug, Error)]
pub enum OperatorError {
    #[error("{0} is not a source")]
    NotASource(Label),
    #[error("{0} is not a non-source edge")]
    NotAnEdge(Label),
    #[error("operand is not a minimal network")]
    NotMinimal,
    #[error("invalid pairing: {0}")]
    Pairing(String),
    #[error("region coordinates do not match the network: {0}")]
    Coordinates(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Minimality(#[from] MinimalityError),
}

/// A minimal connected network in canonical form, with the relabeling that
/// took the reduced part there.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalPart {
    pub network: Network,
    /// Maps the part's compact labels to canonical labels.
    pub perm: Permutation,
}

fn canonical_parts(trace: &ReductionTrace) -> Vec<CanonicalPart> {
    trace
        .parts
        .iter()
        .map(|p| {
            let (network, perm) = canonicalize(&p.network);
            CanonicalPart { network, perm }
        })
        .collect()
}

/// Renames every coordinate of a cone.
fn rename(c: &Cone, f: impl Fn(&str) -> String) -> Result<Cone, PolyError> {
    let from: Vec<&str> = c.space().names().iter().map(|s| s.as_str()).collect();
    let to: Vec<String> = from.iter().map(|s| f(s)).collect();
    c.relabel(&from, &to)
}

fn split_name(name: &str) -> (char, Label) {
    let mut ch = name.chars();
    let head = ch.next().unwrap_or('?');
    (head, ch.as_str().parse().unwrap_or(0))
}

fn relabel_name(name: &str, f: impl Fn(Label) -> Label) -> String {
    let (head, id) = split_name(name);
    format!("{head}{}", f(id))
}

/// Moves a region of a part (compact labels) to its canonical labels.
fn to_canonical(c: &Cone, part: &CanonicalPart) -> Result<Cone, PolyError> {
    let renamed = rename(c, |n| relabel_name(n, |x| part.perm.image(x)))?;
    renamed.reorder(&crate::bounds::region_names(&part.network))
}

fn transfer_through(
    trace: &ReductionTrace,
    parts: &[CanonicalPart],
    c: &Cone,
) -> Result<Vec<Cone>, OperatorError> {
    let pushed = push_region(trace, c)?;
    Ok(pushed
        .iter()
        .zip(parts)
        .map(|(c, p)| to_canonical(c, p))
        .collect::<Result<_, _>>()?)
}

fn check_space(c: &Cone, names: &[String]) -> Result<(), OperatorError> {
    let have: BTreeSet<&String> = c.space().names().iter().collect();
    let want: BTreeSet<&String> = names.iter().collect();
    if have != want {
        return Err(OperatorError::Coordinates(c.space().to_string()));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EmbedKind {
    SourceDelete,
    EdgeContract,
    EdgeDelete,
}

impl fmt::Display for EmbedKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EmbedKind::SourceDelete => "source-delete",
            EmbedKind::EdgeContract => "edge-contract",
            EmbedKind::EdgeDelete => "edge-delete",
        })
    }
}

/// One embedding operation and its reduction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmbedStep {
    pub kind: EmbedKind,
    pub target: Label,
    pub pre: Network,
    /// The network right after the operation, before reduction.
    pub raw: RawNetwork,
    pub trace: ReductionTrace,
    /// Canonical minimal parts of the result; empty if nothing is left.
    pub post: Vec<CanonicalPart>,
}

/// Applies one embedding operation by kind.
pub fn embed(net: &Network, kind: EmbedKind, target: Label) -> Result<EmbedStep, OperatorError> {
    let mut raw = RawNetwork::from_network(net);
    match kind {
        EmbedKind::SourceDelete => {
            if !net.is_source(target) {
                return Err(OperatorError::NotASource(target));
            }
            raw.delete_source(target);
        }
        EmbedKind::EdgeContract => {
            let ins = raw
                .edges
                .remove(&target)
                .ok_or(OperatorError::NotAnEdge(target))?;
            raw.substitute(target, &ins);
        }
        EmbedKind::EdgeDelete => {
            raw.edges
                .remove(&target)
                .ok_or(OperatorError::NotAnEdge(target))?;
            raw.remove_from_inputs(target);
        }
    }
    let trace = minimalize_raw(&raw);
    let post = canonical_parts(&trace);
    Ok(EmbedStep {
        kind,
        target,
        pre: net.clone(),
        raw,
        trace,
        post,
    })
}

/// Deletes source `s`: it leaves every input set and every demand.
pub fn delete_source(net: &Network, s: Label) -> Result<EmbedStep, OperatorError> {
    embed(net, EmbedKind::SourceDelete, s)
}

/// Contracts edge `e`: its readers read the inputs of its tail instead.
pub fn contract_edge(net: &Network, e: Label) -> Result<EmbedStep, OperatorError> {
    embed(net, EmbedKind::EdgeContract, e)
}

/// Deletes edge `e` from the network and from every input set.
pub fn delete_edge(net: &Network, e: Label) -> Result<EmbedStep, OperatorError> {
    embed(net, EmbedKind::EdgeDelete, e)
}

/// Every single embedding operation applicable to `net`.
pub fn all_embeddings(net: &Network) -> Vec<EmbedStep> {
    let mut out = Vec::new();
    for s in net.sources() {
        out.push(delete_source(net, s).expect("label is a source"));
    }
    for e in net.edges() {
        out.push(contract_edge(net, e).expect("label is an edge"));
        out.push(delete_edge(net, e).expect("label is an edge"));
    }
    out
}

/// Regions transferred to the parts of a result, in canonical labels.
#[derive(Clone, Debug, PartialEq)]
pub struct Transferred {
    pub regions: Vec<Cone>,
    /// The bound each region stands for on its part.
    pub tags: Vec<BoundTag>,
    /// False when only an inclusion holds: the transferred region lies
    /// inside the part's own bound.
    pub exact: bool,
}

/// The tag of the same bound on a minor: vector bounds keep their ground
/// elements beyond `N`, so the ground shrinks with the variable count.
pub fn minor_tag(tag: BoundTag, big: &Network, small: &Network) -> BoundTag {
    match tag {
        BoundTag::Vector { field, ground } => BoundTag::Vector {
            field,
            ground: ground + small.n() - big.n(),
        },
        t => t,
    }
}

/// Maps a bound of `step.pre` to the same bound of each part of the minor.
///
/// Source deletion fixes the source rate to zero, edge deletion fixes the
/// capacity to zero, contraction projects the capacity out. Scalar codes
/// do not survive contraction, so that case is only an inclusion.
pub fn embed_region(
    step: &EmbedStep,
    region: &Cone,
    tag: BoundTag,
) -> Result<Transferred, OperatorError> {
    check_space(region, &crate::bounds::region_names(&step.pre))?;
    let c = match step.kind {
        EmbedKind::SourceDelete => region.slice_zero(&omega(step.target))?,
        EmbedKind::EdgeDelete => region.slice_zero(&rate(step.target))?,
        EmbedKind::EdgeContract => {
            let gone = rate(step.target);
            let keep: Vec<&str> = region
                .space()
                .names()
                .iter()
                .map(|s| s.as_str())
                .filter(|s| *s != gone)
                .collect();
            region.project_auto(&keep)?
        }
    };
    let exact = match tag {
        BoundTag::Outer | BoundTag::Vector { .. } => true,
        BoundTag::Scalar { .. } => step.kind != EmbedKind::EdgeContract,
        BoundTag::Ingleton => false,
    };
    Ok(Transferred {
        regions: transfer_through(&step.trace, &step.post, &c)?,
        tags: step
            .post
            .iter()
            .map(|p| minor_tag(tag, &step.pre, &p.network))
            .collect(),
        exact,
    })
}

/// Outcome of a minor search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MinorSearch {
    /// Steps from `big` to `small`. Each step starts from the canonical
    /// form of a part produced by the previous one.
    Found(Vec<EmbedStep>),
    NotMinor,
    /// The budget ran out first.
    Unknown,
}

/// Breadth-first search for `small` among the minors of `big`, expanding at
/// most `budget` networks. Both must be canonical and minimal. A part of a
/// disconnected result counts as a minor.
pub fn is_minor(small: &Network, big: &Network, budget: usize) -> MinorSearch {
    if small == big {
        return MinorSearch::Found(Vec::new());
    }
    let fits = |n: &Network| n.k() >= small.k() && n.l() >= small.l() && n.n() > small.n();
    if !fits(big) {
        return MinorSearch::NotMinor;
    }
    let mut parent: HashMap<Network, Option<(Network, EmbedStep)>> = HashMap::new();
    parent.insert(big.clone(), None);
    let mut queue = VecDeque::from([big.clone()]);
    let mut expanded = 0;
    while let Some(cur) = queue.pop_front() {
        if expanded == budget {
            return MinorSearch::Unknown;
        }
        expanded += 1;
        for step in all_embeddings(&cur) {
            for part in &step.post {
                let n = &part.network;
                if parent.contains_key(n) {
                    continue;
                }
                if n == small {
                    let mut path = vec![step.clone()];
                    let mut at = cur.clone();
                    while let Some(Some((prev, st))) = parent.get(&at) {
                        path.push(st.clone());
                        at = prev.clone();
                    }
                    path.reverse();
                    return MinorSearch::Found(path);
                }
                if fits(n) {
                    parent.insert(n.clone(), Some((cur.clone(), step.clone())));
                    queue.push_back(n.clone());
                }
            }
        }
    }
    MinorSearch::NotMinor
}

/// Replays a witness from `big`; returns whether it ends at `small`.
pub fn replay(big: &Network, small: &Network, witness: &[EmbedStep]) -> bool {
    let mut cur = big.clone();
    for (i, st) in witness.iter().enumerate() {
        if st.pre != cur {
            return false;
        }
        let Ok(again) = embed(&cur, st.kind, st.target) else {
            return false;
        };
        let next = witness.get(i + 1).map_or(small, |s| &s.pre);
        if !again.post.iter().any(|p| &p.network == next) {
            return false;
        }
        cur = next.clone();
    }
    &cur == small
}

/// Classification of one network by [`forbidden_minor_filter`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MinorClass {
    /// Contains the listed smaller network as a minor.
    HasForbiddenMinor {
        minor: Network,
        witness: Vec<EmbedStep>,
    },
    /// No smaller listed network is a minor.
    NewForbiddenMinor,
    /// Some search ran out of budget and none succeeded.
    Unknown,
}

/// Splits a list of networks for which some code class is insufficient into
/// those containing a smaller listed network as a minor and new forbidden
/// minors.
pub fn forbidden_minor_filter(
    insufficient: &[Network],
    budget: usize,
) -> Vec<(Network, MinorClass)> {
    let mut sorted: Vec<Network> = insufficient.to_vec();
    sorted.sort_by_key(|n| (n.n(), n.clone()));
    sorted.dedup();
    sorted
        .par_iter()
        .map(|big| {
            let mut unknown = false;
            for small in sorted.iter().filter(|s| s.n() < big.n()) {
                match is_minor(small, big, budget) {
                    MinorSearch::Found(witness) => {
                        return (
                            big.clone(),
                            MinorClass::HasForbiddenMinor {
                                minor: small.clone(),
                                witness,
                            },
                        )
                    }
                    MinorSearch::Unknown => unknown = true,
                    MinorSearch::NotMinor => {}
                }
            }
            let class = if unknown {
                MinorClass::Unknown
            } else {
                MinorClass::NewForbiddenMinor
            };
            (big.clone(), class)
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CombineKind {
    SourceMerge,
    SinkMerge,
    NodeMerge,
    EdgeMerge,
}

impl fmt::Display for CombineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CombineKind::SourceMerge => "source-merge",
            CombineKind::SinkMerge => "sink-merge",
            CombineKind::NodeMerge => "node-merge",
            CombineKind::EdgeMerge => "edge-merge",
        })
    }
}

/// Which parts of the two operands are merged.
///
/// Sources and edges are named by label. Sinks and nodes are named by
/// index into [`Network::node_view`]'s `sinks` and `nodes`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Pairing {
    pub kind: CombineKind,
    pub pairs: Vec<(u32, u32)>,
}

/// One combination and its reduction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CombineStep {
    pub pairing: Pairing,
    pub left: Network,
    pub right: Network,
    /// Operand label to id in `merged`.
    pub left_map: BTreeMap<Label, Label>,
    pub right_map: BTreeMap<Label, Label>,
    /// For an edge merge, the ids of the four new edges: the two feeding
    /// the new node, then the two leaving it.
    pub new_edges: Vec<Label>,
    /// The merged network before reduction.
    pub merged: RawNetwork,
    pub trace: ReductionTrace,
    pub result: Vec<CanonicalPart>,
}

/// Places two networks side by side: sources of the left, sources of the
/// right, edges of the left, edges of the right.
fn disjoint(
    left: &Network,
    right: &Network,
) -> (RawNetwork, BTreeMap<Label, Label>, BTreeMap<Label, Label>) {
    let (k1, k2, l1) = (left.k(), right.k(), left.l());
    let lmap: BTreeMap<Label, Label> = (1..=left.n())
        .map(|x| (x, if x <= k1 { x } else { x + k2 }))
        .collect();
    let rmap: BTreeMap<Label, Label> = (1..=right.n())
        .map(|x| (x, if x <= k2 { x + k1 } else { x + k1 + l1 }))
        .collect();
    let mut raw = RawNetwork::default();
    for (net, map) in [(left, &lmap), (right, &rmap)] {
        let m = |v: &[Label]| v.iter().map(|x| map[x]).collect::<Set>();
        raw.sources.extend(net.sources().map(|s| map[&s]));
        for d in net.q() {
            raw.edges.insert(map[&d.edge], m(&d.inputs));
        }
        for d in net.w() {
            raw.sinks.insert((map[&d.demand], m(&d.inputs)));
        }
    }
    (raw, lmap, rmap)
}

fn check_injective(pairs: &[(u32, u32)]) -> Result<(), OperatorError> {
    let a: BTreeSet<u32> = pairs.iter().map(|p| p.0).collect();
    let b: BTreeSet<u32> = pairs.iter().map(|p| p.1).collect();
    if pairs.is_empty() || a.len() != pairs.len() || b.len() != pairs.len() {
        return Err(OperatorError::Pairing(format!(
            "{pairs:?} is not a nonempty bijection"
        )));
    }
    Ok(())
}

/// Merges two minimal networks.
pub fn combine(
    left: &Network,
    right: &Network,
    pairing: &Pairing,
) -> Result<CombineStep, OperatorError> {
    if !is_minimal(left) || !is_minimal(right) {
        return Err(OperatorError::NotMinimal);
    }
    check_injective(&pairing.pairs)?;
    let (mut raw, lmap, rmap) = disjoint(left, right);
    let mut new_edges = Vec::new();
    let bad = |msg: String| OperatorError::Pairing(msg);
    match pairing.kind {
        CombineKind::SourceMerge => {
            for &(a, b) in &pairing.pairs {
                if !left.is_source(a) || !right.is_source(b) {
                    return Err(bad(format!("({a},{b}) are not both sources")));
                }
            }
            for &(a, b) in &pairing.pairs {
                let (s, t) = (lmap[&a], rmap[&b]);
                raw.sources.remove(&t);
                raw.substitute(t, &Set::from([s]));
                raw.sinks = std::mem::take(&mut raw.sinks)
                    .into_iter()
                    .map(|(d, ins)| (if d == t { s } else { d }, ins))
                    .collect();
            }
        }
        CombineKind::SinkMerge => {
            let (v1, v2) = (
                left.node_view().expect("minimal"),
                right.node_view().expect("minimal"),
            );
            let mut merged_inputs: Vec<(Set, Set, Set)> = Vec::new();
            for &(a, b) in &pairing.pairs {
                let (Some(t1), Some(t2)) = (v1.sinks.get(a as usize), v2.sinks.get(b as usize))
                else {
                    return Err(bad(format!("no sink pair ({a},{b})")));
                };
                let i1: Set = t1.inputs.iter().map(|x| lmap[x]).collect();
                let i2: Set = t2.inputs.iter().map(|x| rmap[x]).collect();
                merged_inputs.push((i1.clone(), i2.clone(), i1.union(&i2).copied().collect()));
            }
            raw.sinks = std::mem::take(&mut raw.sinks)
                .into_iter()
                .map(|(d, ins)| {
                    for (i1, i2, u) in &merged_inputs {
                        let side = if lmap.values().any(|&x| x == d) {
                            i1
                        } else {
                            i2
                        };
                        if &ins == side {
                            return (d, u.clone());
                        }
                    }
                    (d, ins)
                })
                .collect();
        }
        CombineKind::NodeMerge => {
            let (v1, v2) = (
                left.node_view().expect("minimal"),
                right.node_view().expect("minimal"),
            );
            let mut unions: Vec<(Set, Set, Set)> = Vec::new();
            for &(a, b) in &pairing.pairs {
                let (Some(g1), Some(g2)) = (v1.nodes.get(a as usize), v2.nodes.get(b as usize))
                else {
                    return Err(bad(format!("no node pair ({a},{b})")));
                };
                let i1: Set = g1.inputs.iter().map(|x| lmap[x]).collect();
                let i2: Set = g2.inputs.iter().map(|x| rmap[x]).collect();
                let u = i1.union(&i2).copied().collect();
                unions.push((i1, i2, u));
            }
            for ins in raw.edges.values_mut() {
                if let Some((_, _, u)) = unions.iter().find(|(a, b, _)| ins == a || ins == b) {
                    *ins = u.clone();
                }
            }
        }
        CombineKind::EdgeMerge => {
            if pairing.pairs.len() != 1 {
                return Err(bad(
                    "an edge merge pairs exactly one edge of each operand".into()
                ));
            }
            let (a, b) = pairing.pairs[0];
            if left.edge_inputs(a).is_none() || right.edge_inputs(b).is_none() {
                return Err(bad(format!("({a},{b}) are not both non-source edges")));
            }
            let (e, f) = (lmap[&a], rmap[&b]);
            let base = raw.next_id();
            let ids = [base, base + 1, base + 2, base + 3];
            let ein = raw.edges.remove(&e).expect("edge present");
            let fin = raw.edges.remove(&f).expect("edge present");
            raw.substitute(e, &Set::from([ids[2]]));
            raw.substitute(f, &Set::from([ids[3]]));
            raw.edges.insert(ids[0], ein);
            raw.edges.insert(ids[1], fin);
            raw.edges.insert(ids[2], Set::from([ids[0], ids[1]]));
            raw.edges.insert(ids[3], Set::from([ids[0], ids[1]]));
            new_edges = ids.to_vec();
        }
    }
    let trace = minimalize_raw(&raw);
    let result = canonical_parts(&trace);
    Ok(CombineStep {
        pairing: pairing.clone(),
        left: left.clone(),
        right: right.clone(),
        left_map: lmap,
        right_map: rmap,
        new_edges,
        merged: raw,
        trace,
        result,
    })
}

/// Region of the merged network from the operands' regions (same bound),
/// pushed through the reduction to the canonical result parts.
///
/// Source merge identifies the paired source rates; sink and node merges
/// take the product; edge merge takes the product, requires each of the
/// four new capacities to cover the merged edge it replaces, and projects
/// the two old capacities out.
pub fn combine_region(
    step: &CombineStep,
    left: &Cone,
    right: &Cone,
) -> Result<Vec<Cone>, OperatorError> {
    check_space(left, &crate::bounds::region_names(&step.left))?;
    check_space(right, &crate::bounds::region_names(&step.right))?;
    let l = rename(left, |n| relabel_name(n, |x| step.left_map[&x]))?;
    let r = rename(right, |n| relabel_name(n, |x| step.right_map[&x]))?;
    let mut c = l.product(&r)?;
    match step.pairing.kind {
        CombineKind::SourceMerge => {
            for &(a, b) in &step.pairing.pairs {
                c = c.identify(&omega(step.left_map[&a]), &omega(step.right_map[&b]))?;
            }
        }
        CombineKind::SinkMerge | CombineKind::NodeMerge => {}
        CombineKind::EdgeMerge => {
            let (a, b) = step.pairing.pairs[0];
            let (e, f) = (rate(step.left_map[&a]), rate(step.right_map[&b]));
            let ids: Vec<String> = step.new_edges.iter().map(|&x| rate(x)).collect();
            for n in &ids {
                c = c.add_coord(n)?;
            }
            let rows = [
                c.form(&[(&ids[0], 1), (&e, -1)])?,
                c.form(&[(&ids[2], 1), (&e, -1)])?,
                c.form(&[(&ids[1], 1), (&f, -1)])?,
                c.form(&[(&ids[3], 1), (&f, -1)])?,
            ];
            c = c.intersect(&rows, &[])?;
            let keep: Vec<&str> = c
                .space()
                .names()
                .iter()
                .map(|s| s.as_str())
                .filter(|s| *s != e && *s != f)
                .collect();
            c = c.project_auto(&keep)?;
        }
    }
    let c = c.reorder(&rate_names(&step.merged))?;
    transfer_through(&step.trace, &step.result, &c)
}

/// Worst-case `(K, L)` of a merge, before any reduction.
pub fn predicted_size(left: &Network, right: &Network, pairing: &Pairing) -> (u32, u32) {
    let (k, l) = (left.k() + right.k(), left.l() + right.l());
    match pairing.kind {
        CombineKind::SourceMerge => (k - pairing.pairs.len() as u32, l),
        CombineKind::SinkMerge | CombineKind::NodeMerge => (k, l),
        CombineKind::EdgeMerge => (k, l + 2),
    }
}

/// Injective maps from a nonempty subset of `0..a` into `0..b`.
fn partial_injections(a: usize, b: usize) -> Vec<Vec<(u32, u32)>> {
    let mut out = Vec::new();
    fn rec(
        i: usize,
        a: usize,
        b: usize,
        used: &mut Vec<bool>,
        cur: &mut Vec<(u32, u32)>,
        out: &mut Vec<Vec<(u32, u32)>>,
    ) {
        if i == a {
            if !cur.is_empty() {
                out.push(cur.clone());
            }
            return;
        }
        rec(i + 1, a, b, used, cur, out);
        for j in 0..b {
            if !used[j] {
                used[j] = true;
                cur.push((i as u32, j as u32));
                rec(i + 1, a, b, used, cur, out);
                cur.pop();
                used[j] = false;
            }
        }
    }
    rec(0, a, b, &mut vec![false; b], &mut Vec::new(), &mut out);
    out
}

/// Every pairing of every combination kind between two networks.
pub fn all_pairings(left: &Network, right: &Network) -> Vec<Pairing> {
    let mut out = Vec::new();
    for p in partial_injections(left.k() as usize, right.k() as usize) {
        let pairs = p.iter().map(|&(a, b)| (a + 1, b + 1)).collect();
        out.push(Pairing {
            kind: CombineKind::SourceMerge,
            pairs,
        });
    }
    let (v1, v2) = (
        left.node_view().expect("valid"),
        right.node_view().expect("valid"),
    );
    for pairs in partial_injections(v1.sinks.len(), v2.sinks.len()) {
        out.push(Pairing {
            kind: CombineKind::SinkMerge,
            pairs,
        });
    }
    for a in 0..v1.nodes.len() as u32 {
        for b in 0..v2.nodes.len() as u32 {
            out.push(Pairing {
                kind: CombineKind::NodeMerge,
                pairs: vec![(a, b)],
            });
        }
    }
    for a in left.edges() {
        for b in right.edges() {
            out.push(Pairing {
                kind: CombineKind::EdgeMerge,
                pairs: vec![(a, b)],
            });
        }
    }
    out
}

/// The six smallest canonical networks, one (1,1), four (1,2) and one
/// (2,1), as rendered text.
pub fn smallest_seeds() -> Vec<String> {
    let mut v = Vec::new();
    for (k, l) in [(1, 1), (1, 2), (2, 1)] {
        v.extend(
            crate::enumerate::enumerate(k, l, crate::enumerate::Mode::General)
                .into_iter()
                .map(|e| e.network.render()),
        );
    }
    v
}

/// Settings for [`closure`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosureConfig {
    /// Seed networks as rendered text.
    pub seeds: Vec<String>,
    pub k_max: u32,
    pub l_max: u32,
    pub allow_embedding: bool,
    /// Maximum number of operations to attempt.
    pub budget: usize,
}

/// How a network entered the closure.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub result_key: String,
    /// `seed`, a combination kind, or an embedding kind.
    pub op_kind: String,
    pub operand_keys: Vec<String>,
    pub pairing: Vec<(u32, u32)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosureResult {
    /// Canonical networks keyed by rendered text, with first provenance.
    pub networks: BTreeMap<String, (Network, Provenance)>,
    /// Number of networks added by each generation, seeds first.
    pub generations: Vec<usize>,
    pub converged: bool,
}

impl ClosureResult {
    /// Networks of exactly size `(k, l)`.
    pub fn of_size(&self, k: u32, l: u32) -> Vec<&Network> {
        self.networks
            .values()
            .map(|(n, _)| n)
            .filter(|n| n.k() == k && n.l() == l)
            .collect()
    }

    /// Networks that are not seeds.
    pub fn new_networks(&self) -> usize {
        self.networks
            .values()
            .filter(|(_, p)| p.op_kind != "seed")
            .count()
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ClosureError {
    #[error("seed {0} is not a valid minimal network")]
    BadSeed(String),
    #[error("seed {0} exceeds the size caps")]
    SeedTooLarge(String),
}

enum Task {
    Merge(usize, usize),
    Embed(usize),
}

/// Grows the seed set to a fixed point under pairwise combination (and,
/// if enabled, single embeddings). A merge is attempted only if its
/// worst-case size fits the caps; its result is admitted when it reduces
/// to one nonempty connected minimal network.
pub fn closure(config: &ClosureConfig) -> Result<ClosureResult, ClosureError> {
    let mut all: Vec<Network> = Vec::new();
    let mut networks: BTreeMap<String, (Network, Provenance)> = BTreeMap::new();
    let mut seeds: Vec<Network> = Vec::new();
    for s in &config.seeds {
        let n = Network::parse(s).map_err(|_| ClosureError::BadSeed(s.clone()))?;
        if !is_minimal(&n) {
            return Err(ClosureError::BadSeed(s.clone()));
        }
        if n.k() > config.k_max || n.l() > config.l_max {
            return Err(ClosureError::SeedTooLarge(s.clone()));
        }
        seeds.push(canonicalize(&n).0);
    }
    seeds.sort();
    seeds.dedup();
    for n in seeds {
        let key = n.render();
        let prov = Provenance {
            result_key: key.clone(),
            op_kind: "seed".into(),
            operand_keys: Vec::new(),
            pairing: Vec::new(),
        };
        networks.insert(key, (n.clone(), prov));
        all.push(n);
    }
    let mut generations = vec![all.len()];
    let mut fresh = 0..all.len();
    let mut spent = 0usize;
    let fits = |k: u32, l: u32| k <= config.k_max && l <= config.l_max;
    loop {
        let mut tasks = Vec::new();
        for j in fresh.clone() {
            for i in 0..=j {
                tasks.push(Task::Merge(i, j));
                if i != j {
                    tasks.push(Task::Merge(j, i));
                }
            }
            if config.allow_embedding {
                tasks.push(Task::Embed(j));
            }
        }
        let results: Vec<(Vec<(Network, Provenance)>, usize)> = tasks
            .par_iter()
            .map(|t| {
                let mut out = Vec::new();
                let mut ops = 0;
                match *t {
                    Task::Merge(i, j) => {
                        let (a, b) = (&all[i], &all[j]);
                        for p in all_pairings(a, b) {
                            let (k, l) = predicted_size(a, b, &p);
                            if !fits(k, l) {
                                continue;
                            }
                            ops += 1;
                            let step = combine(a, b, &p).expect("operands minimal");
                            if let [part] = step.result.as_slice() {
                                let key = part.network.render();
                                out.push((
                                    part.network.clone(),
                                    Provenance {
                                        result_key: key,
                                        op_kind: p.kind.to_string(),
                                        operand_keys: vec![a.render(), b.render()],
                                        pairing: p.pairs,
                                    },
                                ));
                            }
                        }
                    }
                    Task::Embed(j) => {
                        for st in all_embeddings(&all[j]) {
                            ops += 1;
                            for part in &st.post {
                                let key = part.network.render();
                                out.push((
                                    part.network.clone(),
                                    Provenance {
                                        result_key: key,
                                        op_kind: st.kind.to_string(),
                                        operand_keys: vec![all[j].render()],
                                        pairing: vec![(st.target, 0)],
                                    },
                                ));
                            }
                        }
                    }
                }
                (out, ops)
            })
            .collect();
        let start = all.len();
        for (found, ops) in results {
            spent += ops;
            for (n, prov) in found {
                if fits(n.k(), n.l()) && !networks.contains_key(&prov.result_key) {
                    networks.insert(prov.result_key.clone(), (n.clone(), prov));
                    all.push(n);
                }
            }
        }
        generations.push(all.len() - start);
        if all.len() == start {
            return Ok(ClosureResult {
                networks,
                generations,
                converged: true,
            });
        }
        if spent >= config.budget {
            return Ok(ClosureResult {
                networks,
                generations,
                converged: false,
            });
        }
        fresh = start..all.len();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::outer_region;
    use crate::polyhedra::cone_from_terms;

    fn net11() -> Network {
        Network::new(1, 1, [(2, vec![1])], [(1, vec![2])])
    }

    #[test]
    fn contracting_the_only_edge_empties() {
        let st = contract_edge(&net11(), 2).unwrap();
        assert!(st.post.is_empty());
    }

    #[test]
    fn deleting_the_only_source_empties() {
        let st = delete_source(&net11(), 1).unwrap();
        assert!(st.post.is_empty());
        assert!(matches!(
            delete_source(&net11(), 2),
            Err(OperatorError::NotASource(2))
        ));
    }

    #[test]
    fn edge_merge_adds_one_node_and_four_edges() {
        let p = Pairing {
            kind: CombineKind::EdgeMerge,
            pairs: vec![(2, 2)],
        };
        let st = combine(&net11(), &net11(), &p).unwrap();
        assert_eq!(st.merged.edges.len(), 4);
        assert_eq!(st.merged.nodes().len(), 3);
    }

    #[test]
    fn node_merge_region_is_a_product() {
        let p = Pairing {
            kind: CombineKind::NodeMerge,
            pairs: vec![(0, 0)],
        };
        let st = combine(&net11(), &net11(), &p).unwrap();
        let r = outer_region(&net11()).unwrap();
        let out = combine_region(&st, &r, &r).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0], outer_region(&st.result[0].network).unwrap());
    }

    #[test]
    fn source_merge_of_two_single_edges() {
        let p = Pairing {
            kind: CombineKind::SourceMerge,
            pairs: vec![(1, 1)],
        };
        let st = combine(&net11(), &net11(), &p).unwrap();
        let r = outer_region(&net11()).unwrap();
        let out = combine_region(&st, &r, &r).unwrap();
        let n = &st.result[0].network;
        assert_eq!((n.k(), n.l()), (1, 2));
        let want = cone_from_terms(
            &["w1", "r2", "r3"],
            &[
                &[("r2", 1), ("w1", -1)],
                &[("r3", 1), ("w1", -1)],
                &[("w1", 1)],
            ],
            &[],
        )
        .unwrap();
        assert_eq!(out[0], want);
    }

    #[test]
    fn minor_of_itself() {
        assert_eq!(
            is_minor(&net11(), &net11(), 10),
            MinorSearch::Found(Vec::new())
        );
    }

    #[test]
    fn trivial_closure() {
        let cfg = ClosureConfig {
            seeds: vec![net11().render()],
            k_max: 1,
            l_max: 1,
            allow_embedding: false,
            budget: 1000,
        };
        let r = closure(&cfg).unwrap();
        assert_eq!(r.networks.len(), 1);
        assert!(r.converged);
    }
}
