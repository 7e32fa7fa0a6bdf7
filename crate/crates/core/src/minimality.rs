//! Minimality conditions C1–C14, reduction to minimal form, and the rate
//! region transfer carried by each reduction step.
//!
//! Reductions run on a [`RawNetwork`] so that ids survive deletions.
//! Conditions are checked in the order C1, C2, C6, C5, C3, C4, C7–C14 and
//! the scan restarts at C1 after every step. C5 and C11 hold by
//! construction in (Q, W) form.
//!
//! Rate regions are cones over coordinates `w<id>` (source rates) and
//! `r<id>` (edge capacities). Each step records how a region of the network
//! before the step relates to one after it; [`push_region`] maps a region
//! forward through a trace and [`lift_region`] maps it back.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Label, Network};
use crate::polyhedra::{Cone, CoordSpace, PolyError};
use crate::raw::{RawNetwork, Reader, Set};

#[derive(Debug, Error)]
pub enum MinimalityError {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("expected {want} regions, got {got}")]
    PartCount { want: usize, got: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ConditionId {
    C1,
    C2,
    C3,
    C4,
    C5,
    C6,
    C7,
    C8,
    C9,
    C10,
    C11,
    C12,
    C13,
    C14,
}

impl fmt::Display for ConditionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// The offending part of the network.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Witness {
    Source(Label),
    Edge(Label),
    Sources(Label, Label),
    Edges(Label, Label),
    Sink {
        demand: Label,
        inputs: Vec<Label>,
    },
    /// Two sink demands; the second is the one to weaken.
    Sinks {
        first: (Label, Vec<Label>),
        second: (Label, Vec<Label>),
    },
    /// A unit node reading `input` and writing `output`.
    Node {
        input: Label,
        output: Label,
    },
    Components(Vec<Vec<Label>>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionViolation {
    pub condition: ConditionId,
    pub witness: Witness,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum StepKind {
    D1,
    D2,
    D3,
    D4,
    D6,
    D7,
    D8,
    D9,
    D10,
    D12,
    D13,
    D14,
}

/// How rate regions before and after a step relate. Coordinates are named
/// in the pre-step space.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Transfer {
    /// Region unchanged.
    Identity,
    /// The coordinate is forced to zero before the step.
    FixZero(String),
    /// The coordinate is unconstrained (beyond `≥ 0`) before the step.
    Free(String),
    /// `keep` after the step stands for `keep + gone` before it.
    Sum { keep: String, gone: String },
    /// `keep` after the step stands for `min(keep, gone)` before it.
    Min { keep: String, gone: String },
    /// Before the step the only extra requirement is `gone ≥ by`.
    Bound { gone: String, by: String },
    /// The network falls apart; the region is the product over groups.
    Split(Vec<Vec<String>>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionStep {
    pub kind: StepKind,
    pub violation: ConditionViolation,
    pub transfer: Transfer,
}

/// A connected minimal piece of a reduced network.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Part {
    /// Compact labels.
    pub network: Network,
    /// Raw id behind label `i + 1`.
    pub ids: Vec<Label>,
}

/// Result of [`minimalize`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Reduced {
    Minimal(Network),
    /// Nothing is left.
    Empty,
    /// Several disconnected minimal networks.
    Split(Vec<Network>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionTrace {
    pub start: RawNetwork,
    pub steps: Vec<ReductionStep>,
    /// Coordinate names before each step, plus the final space.
    pub spaces: Vec<Vec<String>>,
    pub end: RawNetwork,
    pub parts: Vec<Part>,
}

impl ReductionTrace {
    pub fn outcome(&self) -> Reduced {
        match self.parts.len() {
            0 => Reduced::Empty,
            1 => Reduced::Minimal(self.parts[0].network.clone()),
            _ => Reduced::Split(self.parts.iter().map(|p| p.network.clone()).collect()),
        }
    }

    /// One JSON object per step.
    pub fn to_json_lines(&self) -> String {
        let mut s = String::new();
        for st in &self.steps {
            s.push_str(&serde_json::to_string(st).expect("steps serialize"));
            s.push('\n');
        }
        s
    }
}

pub fn omega(id: Label) -> String {
    format!("w{id}")
}

pub fn rate(id: Label) -> String {
    format!("r{id}")
}

/// Rate coordinates of a raw network: source rates then edge capacities.
pub fn rate_names(raw: &RawNetwork) -> Vec<String> {
    raw.sources
        .iter()
        .map(|&s| omega(s))
        .chain(raw.edges.keys().map(|&e| rate(e)))
        .collect()
}

pub fn rate_space(raw: &RawNetwork) -> CoordSpace {
    CoordSpace::new(rate_names(raw)).expect("ids are unique")
}

/// Rate coordinates of a compact network.
pub fn network_rate_names(net: &Network) -> Vec<String> {
    net.sources()
        .map(omega)
        .chain(net.edges().map(rate))
        .collect()
}

fn v(s: &Set) -> Vec<Label> {
    s.iter().copied().collect()
}

fn c1(raw: &RawNetwork) -> Option<Witness> {
    raw.sources
        .iter()
        .find(|s| !raw.edges.values().any(|ins| ins.contains(s)))
        .map(|&s| Witness::Source(s))
}

fn c2(raw: &RawNetwork) -> Option<Witness> {
    raw.sinks
        .iter()
        .find(|(d, a)| a.contains(d))
        .map(|(d, a)| Witness::Sink {
            demand: *d,
            inputs: v(a),
        })
}

fn c6(raw: &RawNetwork) -> Option<Witness> {
    if let Some((&e, _)) = raw.edges.iter().find(|(_, ins)| ins.is_empty()) {
        return Some(Witness::Edge(e));
    }
    raw.sinks
        .iter()
        .find(|(_, a)| a.is_empty())
        .map(|(d, a)| Witness::Sink {
            demand: *d,
            inputs: v(a),
        })
}

fn c3(raw: &RawNetwork) -> Option<Witness> {
    raw.sources
        .iter()
        .find(|s| !raw.sinks.iter().any(|(d, _)| d == *s))
        .map(|&s| Witness::Source(s))
}

fn c4(raw: &RawNetwork) -> Option<Witness> {
    let sig: Vec<(Label, BTreeSet<Reader>, BTreeSet<Set>)> = raw
        .sources
        .iter()
        .map(|&s| (s, raw.heads(s), raw.demanded_at(s)))
        .collect();
    for (i, a) in sig.iter().enumerate() {
        for b in &sig[i + 1..] {
            if a.1 == b.1 && a.2 == b.2 {
                return Some(Witness::Sources(a.0, b.0));
            }
        }
    }
    None
}

fn c7(raw: &RawNetwork) -> Option<Witness> {
    raw.edges
        .keys()
        .find(|&&e| raw.heads(e).is_empty())
        .map(|&e| Witness::Edge(e))
}

fn c8(raw: &RawNetwork) -> Option<Witness> {
    let es: Vec<(&Label, &Set)> = raw.edges.iter().collect();
    for (i, (e, a)) in es.iter().enumerate() {
        for (f, b) in &es[i + 1..] {
            if a == b && raw.heads(**e) == raw.heads(**f) {
                return Some(Witness::Edges(**e, **f));
            }
        }
    }
    None
}

fn c9(raw: &RawNetwork) -> Option<Witness> {
    let nodes = raw.nodes();
    let mut source_case = None;
    for (ins, outs) in &nodes {
        if ins.len() != 1 || outs.len() != 1 {
            continue;
        }
        let x = *ins.iter().next().unwrap();
        let only_here = raw.heads(x).len() == 1;
        if !only_here {
            continue;
        }
        if raw.sources.contains(&x) {
            // a single-edge network keeps its source relay
            if raw.edges.len() >= 2 && source_case.is_none() {
                source_case = Some(Witness::Node {
                    input: x,
                    output: outs[0],
                });
            }
        } else {
            return Some(Witness::Node {
                input: x,
                output: outs[0],
            });
        }
    }
    source_case
}

fn c10(raw: &RawNetwork) -> Option<Witness> {
    raw.sinks
        .iter()
        .find(|(d, a)| raw.descendants(*d).is_disjoint(a))
        .map(|(d, a)| Witness::Sink {
            demand: *d,
            inputs: v(a),
        })
}

fn c12(raw: &RawNetwork) -> Option<Witness> {
    for (i, a) in &raw.sinks {
        for (j, b) in &raw.sinks {
            if i == j && a != b && a.is_subset(b) {
                return Some(Witness::Sinks {
                    first: (*i, v(a)),
                    second: (*j, v(b)),
                });
            }
        }
    }
    None
}

fn c13(raw: &RawNetwork) -> Option<Witness> {
    for (i, a) in &raw.sinks {
        for (j, b) in &raw.sinks {
            if a != b && a.is_subset(b) && b.contains(i) {
                return Some(Witness::Sinks {
                    first: (*i, v(a)),
                    second: (*j, v(b)),
                });
            }
        }
    }
    None
}

fn c14(raw: &RawNetwork) -> Option<Witness> {
    let comps = raw.components();
    (comps.len() > 1).then(|| Witness::Components(comps.iter().map(|c| c.ids()).collect()))
}

type Check = fn(&RawNetwork) -> Option<Witness>;

const ORDER: [(ConditionId, Check); 12] = [
    (ConditionId::C1, c1),
    (ConditionId::C2, c2),
    (ConditionId::C6, c6),
    (ConditionId::C3, c3),
    (ConditionId::C4, c4),
    (ConditionId::C7, c7),
    (ConditionId::C8, c8),
    (ConditionId::C9, c9),
    (ConditionId::C10, c10),
    (ConditionId::C12, c12),
    (ConditionId::C13, c13),
    (ConditionId::C14, c14),
];

/// The first violated condition in reduction order.
pub fn first_violation(raw: &RawNetwork) -> Option<ConditionViolation> {
    ORDER.iter().find_map(|(id, f)| {
        f(raw).map(|w| ConditionViolation {
            condition: *id,
            witness: w,
        })
    })
}

/// One witness for every violated condition, in reduction order.
pub fn check_raw(raw: &RawNetwork) -> Vec<ConditionViolation> {
    ORDER
        .iter()
        .filter_map(|(id, f)| {
            f(raw).map(|w| ConditionViolation {
                condition: *id,
                witness: w,
            })
        })
        .collect()
}

/// Violated minimality conditions of `net`; empty iff `net` is minimal.
pub fn check_conditions(net: &Network) -> Vec<ConditionViolation> {
    check_raw(&RawNetwork::from_network(net))
}

pub fn is_minimal(net: &Network) -> bool {
    first_violation(&RawNetwork::from_network(net)).is_none()
}

/// Applies the reduction for `viol` in place.
fn reduce(raw: &mut RawNetwork, viol: ConditionViolation) -> ReductionStep {
    use ConditionId as C;
    let (kind, transfer) = match (&viol.condition, &viol.witness) {
        (C::C1, Witness::Source(s)) => {
            let s = *s;
            let blind = raw.sinks.iter().any(|(d, a)| *d == s && !a.contains(&s));
            raw.delete_source(s);
            let t = if blind {
                Transfer::FixZero(omega(s))
            } else {
                Transfer::Free(omega(s))
            };
            (StepKind::D1, t)
        }
        (C::C2, Witness::Sink { demand, inputs }) => {
            raw.sinks
                .remove(&(*demand, inputs.iter().copied().collect()));
            (StepKind::D2, Transfer::Identity)
        }
        (C::C6, Witness::Edge(e)) => {
            let e = *e;
            raw.edges.remove(&e);
            raw.remove_from_inputs(e);
            (StepKind::D6, Transfer::Free(rate(e)))
        }
        (C::C6, Witness::Sink { demand, .. }) => {
            let s = *demand;
            raw.delete_source(s);
            (StepKind::D6, Transfer::FixZero(omega(s)))
        }
        (C::C3, Witness::Source(s)) => {
            let s = *s;
            raw.delete_source(s);
            (StepKind::D3, Transfer::Free(omega(s)))
        }
        (C::C4, Witness::Sources(s, t)) => {
            let (s, t) = (*s, *t);
            raw.delete_source(t);
            (
                StepKind::D4,
                Transfer::Sum {
                    keep: omega(s),
                    gone: omega(t),
                },
            )
        }
        (C::C7, Witness::Edge(e)) => {
            raw.edges.remove(e);
            (StepKind::D7, Transfer::Free(rate(*e)))
        }
        (C::C8, Witness::Edges(e, f)) => {
            let (e, f) = (*e, *f);
            raw.edges.remove(&f);
            raw.remove_from_inputs(f);
            (
                StepKind::D8,
                Transfer::Sum {
                    keep: rate(e),
                    gone: rate(f),
                },
            )
        }
        (C::C9, Witness::Node { input, output }) => {
            let (x, f) = (*input, *output);
            raw.edges.remove(&f);
            raw.substitute(f, &[x].into());
            let t = if raw.sources.contains(&x) {
                Transfer::Bound {
                    gone: rate(f),
                    by: omega(x),
                }
            } else {
                Transfer::Min {
                    keep: rate(x),
                    gone: rate(f),
                }
            };
            (StepKind::D9, t)
        }
        (C::C10, Witness::Sink { demand, .. }) => {
            let s = *demand;
            raw.delete_source(s);
            (StepKind::D10, Transfer::FixZero(omega(s)))
        }
        (C::C12, Witness::Sinks { second, .. }) => {
            raw.sinks
                .remove(&(second.0, second.1.iter().copied().collect()));
            (StepKind::D12, Transfer::Identity)
        }
        (C::C13, Witness::Sinks { first, second }) => {
            let i = first.0;
            let b: Set = second.1.iter().copied().collect();
            let sinks = std::mem::take(&mut raw.sinks);
            raw.sinks = sinks
                .into_iter()
                .map(|(d, mut a)| {
                    if a == b {
                        a.remove(&i);
                    }
                    (d, a)
                })
                .collect();
            (StepKind::D13, Transfer::Identity)
        }
        (C::C14, Witness::Components(groups)) => {
            let names = groups
                .iter()
                .map(|g| {
                    g.iter()
                        .map(|&x| {
                            if raw.sources.contains(&x) {
                                omega(x)
                            } else {
                                rate(x)
                            }
                        })
                        .collect()
                })
                .collect();
            (StepKind::D14, Transfer::Split(names))
        }
        (c, w) => unreachable!("no reduction for {c:?} with {w:?}"),
    };
    ReductionStep {
        kind,
        violation: viol,
        transfer,
    }
}

/// Reduces a raw network to minimal form, recording every step.
pub fn minimalize_raw(start: &RawNetwork) -> ReductionTrace {
    let mut raw = start.clone();
    let mut steps = Vec::new();
    let mut spaces = vec![rate_names(&raw)];
    let mut split = false;
    while let Some(viol) = first_violation(&raw) {
        let step = reduce(&mut raw, viol);
        split = step.kind == StepKind::D14;
        steps.push(step);
        spaces.push(rate_names(&raw));
        if split {
            break;
        }
    }
    let comps = if split {
        raw.components()
    } else if raw.is_empty() {
        Vec::new()
    } else {
        vec![raw.clone()]
    };
    let parts = comps
        .iter()
        .map(|c| {
            let (network, ids) = c.compact();
            Part { network, ids }
        })
        .collect();
    ReductionTrace {
        start: start.clone(),
        steps,
        spaces,
        end: raw,
        parts,
    }
}

/// Reduces `net` to minimal form.
pub fn minimalize(net: &Network) -> (Reduced, ReductionTrace) {
    let t = minimalize_raw(&RawNetwork::from_network(net));
    (t.outcome(), t)
}

fn names_to_refs(v: &[String]) -> Vec<&str> {
    v.iter().map(|s| s.as_str()).collect()
}

fn push_step(t: &Transfer, c: &Cone) -> Result<Cone, PolyError> {
    Ok(match t {
        Transfer::Identity | Transfer::Split(_) => c.clone(),
        Transfer::FixZero(x) => c.slice_zero(x)?,
        Transfer::Sum { gone, .. } => c.slice_zero(gone)?,
        Transfer::Min { keep, gone } => c.identify(keep, gone)?,
        Transfer::Free(x) | Transfer::Bound { gone: x, .. } => {
            let keep: Vec<&str> = c
                .space()
                .names()
                .iter()
                .map(|s| s.as_str())
                .filter(|s| s != x)
                .collect();
            c.project_auto(&keep)?
        }
    })
}

fn lift_step(t: &Transfer, c: &Cone, before: &[String]) -> Result<Cone, PolyError> {
    let lifted = match t {
        Transfer::Identity | Transfer::Split(_) => c.clone(),
        Transfer::FixZero(x) => {
            let a = c.add_coord(x)?;
            let row = a.form(&[(x, 1)])?;
            a.intersect(&[], &[row])?
        }
        Transfer::Free(x) => {
            let a = c.add_coord(x)?;
            let row = a.form(&[(x, 1)])?;
            a.intersect(&[row], &[])?
        }
        Transfer::Sum { keep, gone } => {
            let a = c.split_coord(keep, gone)?;
            let rows = [a.form(&[(keep, 1)])?, a.form(&[(gone, 1)])?];
            a.intersect(&rows, &[])?
        }
        Transfer::Min { keep, gone } => {
            // upward closed in `keep`, so min(keep, gone) ∈ C iff both are
            let a = c.add_coord(gone)?;
            let j = a.space().index(keep).unwrap();
            let g = a.space().index(gone).unwrap();
            let moved: Vec<_> = a
                .inequalities()
                .iter()
                .map(|r| {
                    let mut r = r.clone();
                    r.swap(j, g);
                    r
                })
                .collect();
            let moved_eq: Vec<_> = a
                .equalities()
                .iter()
                .map(|r| {
                    let mut r = r.clone();
                    r.swap(j, g);
                    r
                })
                .collect();
            a.intersect(&moved, &moved_eq)?
        }
        Transfer::Bound { gone, by } => {
            let a = c.add_coord(gone)?;
            let row = a.form(&[(gone, 1), (by, -1)])?;
            a.intersect(&[row], &[])?
        }
    };
    lifted.reorder(before)
}

/// Maps a region of the trace's start network to regions of its parts, in
/// compact labels.
pub fn push_region(trace: &ReductionTrace, region: &Cone) -> Result<Vec<Cone>, MinimalityError> {
    let mut c = region.reorder(&trace.spaces[0])?;
    for st in &trace.steps {
        c = push_step(&st.transfer, &c)?;
    }
    let mut out = Vec::new();
    for p in &trace.parts {
        let raw_names: Vec<String> = raw_part_names(p);
        let part = if trace.parts.len() == 1 {
            c.reorder(&raw_names)?
        } else {
            c.project_auto(&names_to_refs(&raw_names))?
        };
        out.push(part.relabel(&names_to_refs(&raw_names), &network_rate_names(&p.network))?);
    }
    Ok(out)
}

fn raw_part_names(p: &Part) -> Vec<String> {
    let k = p.network.k() as usize;
    p.ids
        .iter()
        .enumerate()
        .map(|(i, &id)| if i < k { omega(id) } else { rate(id) })
        .collect()
}

/// Maps regions of the parts (compact labels, one per part) back to a
/// region of the start network.
pub fn lift_region(trace: &ReductionTrace, parts: &[Cone]) -> Result<Cone, MinimalityError> {
    if parts.len() != trace.parts.len() {
        return Err(MinimalityError::PartCount {
            want: trace.parts.len(),
            got: parts.len(),
        });
    }
    let mut c = Cone::full(CoordSpace::new(Vec::new())?);
    for (p, region) in trace.parts.iter().zip(parts) {
        let raw_names = raw_part_names(p);
        let compact = network_rate_names(&p.network);
        let r = region.relabel(&names_to_refs(&compact), &raw_names)?;
        c = c.product(&r)?;
    }
    let mut c = c.reorder(trace.spaces.last().unwrap())?;
    for (i, st) in trace.steps.iter().enumerate().rev() {
        c = lift_step(&st.transfer, &c, &trace.spaces[i])?;
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn net11() -> Network {
        Network::new(1, 1, [(2, vec![1])], [(1, vec![2])])
    }

    #[test]
    fn seed_is_minimal() {
        assert!(check_conditions(&net11()).is_empty());
        let (r, t) = minimalize(&net11());
        assert_eq!(r, Reduced::Minimal(net11()));
        assert!(t.steps.is_empty());
    }

    #[test]
    fn undemanded_source_violates_c3() {
        let n = Network::new(2, 1, [(3, vec![1, 2])], [(1, vec![3])]);
        let v = check_conditions(&n);
        assert_eq!(v[0].condition, ConditionId::C3);
        assert_eq!(v[0].witness, Witness::Source(2));
    }

    #[test]
    fn parallel_edges_violate_c8() {
        let n = Network::new(1, 2, [(2, vec![1]), (3, vec![1])], [(1, vec![2, 3])]);
        assert!(check_conditions(&n)
            .iter()
            .any(|v| v.condition == ConditionId::C8));
    }

    #[test]
    fn chain_relay_reduces_with_min_substitution() {
        let n = Network::new(1, 2, [(2, vec![1]), (3, vec![2])], [(1, vec![3])]);
        let (r, t) = minimalize(&n);
        assert_eq!(r, Reduced::Minimal(net11()));
        assert_eq!(t.steps.len(), 1);
        assert_eq!(t.steps[0].kind, StepKind::D9);
        assert_eq!(
            t.steps[0].transfer,
            Transfer::Min {
                keep: "r2".into(),
                gone: "r3".into()
            }
        );
    }

    #[test]
    fn trace_lines_are_json() {
        let n = Network::new(1, 2, [(2, vec![1]), (3, vec![2])], [(1, vec![3])]);
        let (_, t) = minimalize(&n);
        let line = t.to_json_lines();
        let v: serde_json::Value = serde_json::from_str(line.trim()).unwrap();
        assert_eq!(v["kind"], "D9");
    }
}
