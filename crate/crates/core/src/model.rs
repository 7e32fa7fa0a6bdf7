//! The (Q, W) encoding of a multi-source hyperedge network coding problem.
//!
//! Labels `1..=K` name sources and `K+1..=K+L` name the non-source edges.
//! `Q` holds one definition per edge (the labels its tail node reads) and
//! `W` holds sink definitions as (demanded source, sink inputs) pairs. Nodes
//! and sinks are not stored: they are the distinct input sets of `Q` and `W`.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A source or edge label.
pub type Label = u32;

/// Definition of one non-source edge: the labels available at its tail node.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeDef {
    pub edge: Label,
    pub inputs: Vec<Label>,
}

/// One demand of one sink: `demand` must be decodable from `inputs`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SinkDef {
    pub demand: Label,
    pub inputs: Vec<Label>,
}

/// A (K, L) network in (Q, W) form.
///
/// Both sets are kept sorted and duplicate-free, so derived equality is set
/// equality and [`Ord`] is the documented total order: `Q` first, then `W`,
/// each compared as a sorted list of pairs, pairs by label then input set,
/// and input sets as sorted sequences (a proper prefix sorts first).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Network {
    k: u32,
    l: u32,
    q: Vec<EdgeDef>,
    w: Vec<SinkDef>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("invalid network: {0:?}")]
    Invalid(Vec<Violation>),
    #[error("networks have different sizes ({0},{1}) vs ({2},{3})")]
    SizeMismatch(u32, u32, u32, u32),
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

/// A structural rule broken by a network.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// `|Q|` differs from `L` after duplicate definitions collapse.
    Cardinality {
        expected: u32,
        found: usize,
    },
    DuplicateEdge(Label),
    LabelOutOfRange(Label),
    /// A `Q` entry names a source as the defined edge.
    NotAnEdge(Label),
    /// A `W` entry demands something other than a source.
    NotASource(Label),
    EmptyEdgeInputs(Label),
    SelfInput(Label),
    SinkReadsDemand(Label),
    /// Edges on a dependency cycle.
    Cycle(Vec<Label>),
}

fn normalize(v: &mut Vec<Label>) {
    v.sort_unstable();
    v.dedup();
}

impl Network {
    /// Builds a network, sorting every set. Does not validate.
    pub fn new(
        k: u32,
        l: u32,
        q: impl IntoIterator<Item = (Label, Vec<Label>)>,
        w: impl IntoIterator<Item = (Label, Vec<Label>)>,
    ) -> Network {
        let mut q: Vec<EdgeDef> = q
            .into_iter()
            .map(|(edge, mut inputs)| {
                normalize(&mut inputs);
                EdgeDef { edge, inputs }
            })
            .collect();
        q.sort();
        q.dedup();
        let mut w: Vec<SinkDef> = w
            .into_iter()
            .map(|(demand, mut inputs)| {
                normalize(&mut inputs);
                SinkDef { demand, inputs }
            })
            .collect();
        w.sort();
        w.dedup();
        Network { k, l, q, w }
    }

    /// Builds and validates.
    pub fn checked(
        k: u32,
        l: u32,
        q: impl IntoIterator<Item = (Label, Vec<Label>)>,
        w: impl IntoIterator<Item = (Label, Vec<Label>)>,
    ) -> Result<Network, ModelError> {
        let net = Network::new(k, l, q, w);
        let report = net.validate();
        if report.is_empty() {
            Ok(net)
        } else {
            Err(ModelError::Invalid(report))
        }
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn l(&self) -> u32 {
        self.l
    }

    /// Number of variables, `K + L`.
    pub fn n(&self) -> u32 {
        self.k + self.l
    }

    pub fn q(&self) -> &[EdgeDef] {
        &self.q
    }

    pub fn w(&self) -> &[SinkDef] {
        &self.w
    }

    pub fn is_source(&self, x: Label) -> bool {
        x >= 1 && x <= self.k
    }

    pub fn sources(&self) -> impl Iterator<Item = Label> {
        1..=self.k
    }

    pub fn edges(&self) -> impl Iterator<Item = Label> {
        self.k + 1..=self.k + self.l
    }

    /// Input set of edge `e`, if defined.
    pub fn edge_inputs(&self, e: Label) -> Option<&[Label]> {
        self.q
            .iter()
            .find(|d| d.edge == e)
            .map(|d| d.inputs.as_slice())
    }

    /// Every structural rule the network breaks; empty when well formed.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let n = self.n();
        if self.q.len() != self.l as usize {
            out.push(Violation::Cardinality {
                expected: self.l,
                found: self.q.len(),
            });
        }
        let mut seen = BTreeSet::new();
        for d in &self.q {
            if !seen.insert(d.edge) {
                out.push(Violation::DuplicateEdge(d.edge));
            }
            if d.edge < 1 || d.edge > n {
                out.push(Violation::LabelOutOfRange(d.edge));
            } else if d.edge <= self.k {
                out.push(Violation::NotAnEdge(d.edge));
            }
            if d.inputs.is_empty() {
                out.push(Violation::EmptyEdgeInputs(d.edge));
            }
            for &x in &d.inputs {
                if x < 1 || x > n {
                    out.push(Violation::LabelOutOfRange(x));
                }
                if x == d.edge {
                    out.push(Violation::SelfInput(d.edge));
                }
            }
        }
        for s in &self.w {
            if s.demand < 1 || s.demand > n {
                out.push(Violation::LabelOutOfRange(s.demand));
            } else if s.demand > self.k {
                out.push(Violation::NotASource(s.demand));
            }
            for &x in &s.inputs {
                if x < 1 || x > n {
                    out.push(Violation::LabelOutOfRange(x));
                }
                if x == s.demand {
                    out.push(Violation::SinkReadsDemand(s.demand));
                }
            }
        }
        if let Some(cycle) = self.find_cycle() {
            out.push(Violation::Cycle(cycle));
        }
        out.dedup();
        out
    }

    fn find_cycle(&self) -> Option<Vec<Label>> {
        let deps: BTreeMap<Label, &[Label]> = self
            .q
            .iter()
            .map(|d| (d.edge, d.inputs.as_slice()))
            .collect();
        // 0 = unvisited, 1 = on stack, 2 = done
        let mut state: BTreeMap<Label, u8> = BTreeMap::new();
        fn visit(
            e: Label,
            deps: &BTreeMap<Label, &[Label]>,
            state: &mut BTreeMap<Label, u8>,
            stack: &mut Vec<Label>,
        ) -> Option<Vec<Label>> {
            match state.get(&e).copied().unwrap_or(0) {
                2 => return None,
                1 => {
                    let start = stack.iter().position(|&x| x == e).unwrap_or(0);
                    return Some(stack[start..].to_vec());
                }
                _ => {}
            }
            state.insert(e, 1);
            stack.push(e);
            if let Some(ins) = deps.get(&e) {
                for &x in ins.iter() {
                    if deps.contains_key(&x) {
                        if let Some(c) = visit(x, deps, state, stack) {
                            return Some(c);
                        }
                    }
                }
            }
            stack.pop();
            state.insert(e, 2);
            None
        }
        for &e in deps.keys() {
            let mut stack = Vec::new();
            if let Some(c) = visit(e, &deps, &mut state, &mut stack) {
                return Some(c);
            }
        }
        None
    }

    /// Edges in an order where every edge follows the edges it reads.
    pub fn topological_edges(&self) -> Vec<Label> {
        let mut done: BTreeSet<Label> = self.sources().collect();
        let mut order = Vec::with_capacity(self.q.len());
        let mut pending: Vec<&EdgeDef> = self.q.iter().collect();
        while !pending.is_empty() {
            let before = pending.len();
            pending.retain(|d| {
                if d.inputs.iter().all(|x| done.contains(x) || *x == d.edge) {
                    done.insert(d.edge);
                    order.push(d.edge);
                    false
                } else {
                    true
                }
            });
            if pending.len() == before {
                // cyclic input; append the rest in label order
                order.extend(pending.iter().map(|d| d.edge));
                break;
            }
        }
        order
    }

    /// The documented total order. Fails on networks of different sizes.
    pub fn compare(&self, other: &Network) -> Result<Ordering, ModelError> {
        if (self.k, self.l) != (other.k, other.l) {
            return Err(ModelError::SizeMismatch(self.k, self.l, other.k, other.l));
        }
        Ok(self.cmp(other))
    }

    /// Derived node/sink structure.
    pub fn node_view(&self) -> Result<NodeView, ModelError> {
        let report = self.validate();
        if !report.is_empty() {
            return Err(ModelError::Invalid(report));
        }
        Ok(NodeView::build(self))
    }

    /// Network file text: one JSON object with sorted lists.
    pub fn render(&self) -> String {
        let mut s = format!("{{\"k\":{},\"l\":{},\"q\":[", self.k, self.l);
        for (i, d) in self.q.iter().enumerate() {
            if i > 0 {
                s.push(',');
            }
            s.push_str(&format!("[{},{}]", d.edge, render_list(&d.inputs)));
        }
        s.push_str("],\"w\":[");
        for (i, d) in self.w.iter().enumerate() {
            if i > 0 {
                s.push(',');
            }
            s.push_str(&format!("[{},{}]", d.demand, render_list(&d.inputs)));
        }
        s.push_str("]}");
        s
    }

    /// Parses the network file format and validates the result.
    pub fn parse(text: &str) -> Result<Network, ModelError> {
        let file: NetworkFile = serde_json::from_str(text).map_err(|e| ModelError::Parse {
            pos: byte_offset(text, e.line(), e.column()),
            msg: e.to_string(),
        })?;
        Network::checked(file.k, file.l, file.q, file.w)
    }
}

fn byte_offset(text: &str, line: usize, column: usize) -> usize {
    let mut off = 0;
    for (i, l) in text.split_inclusive('\n').enumerate() {
        if i + 1 == line {
            return off + column.saturating_sub(1);
        }
        off += l.len();
    }
    off
}

fn render_list(v: &[Label]) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("[{}]", parts.join(","))
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NetworkFile {
    k: u32,
    l: u32,
    q: Vec<(Label, Vec<Label>)>,
    w: Vec<(Label, Vec<Label>)>,
}

impl Ord for Network {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.k, self.l, &self.q, &self.w).cmp(&(other.k, other.l, &other.q, &other.w))
    }
}

impl PartialOrd for Network {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Network {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Who reads a label: an intermediate node or a sink, by index into
/// [`NodeView::nodes`] or [`NodeView::sinks`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Head {
    Node(usize),
    Sink(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Node {
    pub inputs: Vec<Label>,
    pub outputs: Vec<Label>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sink {
    pub inputs: Vec<Label>,
    pub demands: Vec<Label>,
}

/// Node-and-sink view of a network. Nodes and sinks are ordered by their
/// input sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodeView {
    pub sources: Vec<Label>,
    pub nodes: Vec<Node>,
    pub sinks: Vec<Sink>,
    /// Heads of each label's (hyper)edge.
    pub heads: BTreeMap<Label, Vec<Head>>,
    /// Index of the node each non-source edge leaves.
    pub tail: BTreeMap<Label, usize>,
}

impl NodeView {
    fn build(net: &Network) -> NodeView {
        let mut nodes: BTreeMap<&[Label], Vec<Label>> = BTreeMap::new();
        for d in &net.q {
            nodes.entry(d.inputs.as_slice()).or_default().push(d.edge);
        }
        let mut sinks: BTreeMap<&[Label], Vec<Label>> = BTreeMap::new();
        for d in &net.w {
            sinks.entry(d.inputs.as_slice()).or_default().push(d.demand);
        }
        let nodes: Vec<Node> = nodes
            .into_iter()
            .map(|(i, o)| Node {
                inputs: i.to_vec(),
                outputs: o,
            })
            .collect();
        let sinks: Vec<Sink> = sinks
            .into_iter()
            .map(|(i, d)| Sink {
                inputs: i.to_vec(),
                demands: d,
            })
            .collect();
        let mut heads: BTreeMap<Label, Vec<Head>> =
            (1..=net.n()).map(|x| (x, Vec::new())).collect();
        let mut tail = BTreeMap::new();
        for (gi, g) in nodes.iter().enumerate() {
            for &x in &g.inputs {
                heads.entry(x).or_default().push(Head::Node(gi));
            }
            for &e in &g.outputs {
                tail.insert(e, gi);
            }
        }
        for (ti, t) in sinks.iter().enumerate() {
            for &x in &t.inputs {
                heads.entry(x).or_default().push(Head::Sink(ti));
            }
        }
        NodeView {
            sources: net.sources().collect(),
            nodes,
            sinks,
            heads,
            tail,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn net11() -> Network {
        Network::new(1, 1, [(2, vec![1])], [(1, vec![2])])
    }

    #[test]
    fn smallest_network_is_valid() {
        assert!(net11().validate().is_empty());
    }

    #[test]
    fn two_cycle_detected() {
        let n = Network::new(1, 2, [(2, vec![3]), (3, vec![2])], [(1, vec![3])]);
        assert!(n
            .validate()
            .iter()
            .any(|v| matches!(v, Violation::Cycle(_))));
    }

    #[test]
    fn duplicate_definition_collapses() {
        let n = Network::new(1, 2, [(2, vec![1]), (2, vec![1])], [(1, vec![2])]);
        assert_eq!(
            n.validate()[0],
            Violation::Cardinality {
                expected: 2,
                found: 1
            }
        );
    }

    #[test]
    fn node_view_of_two_source_network() {
        let n = Network::new(2, 1, [(3, vec![1, 2])], [(1, vec![2, 3]), (2, vec![1, 3])]);
        let v = n.node_view().unwrap();
        assert_eq!(v.nodes.len(), 1);
        let inputs: Vec<_> = v.sinks.iter().map(|s| s.inputs.clone()).collect();
        assert_eq!(inputs, vec![vec![1, 3], vec![2, 3]]);
        assert_eq!(v.sinks[0].demands, vec![2]);
    }

    #[test]
    fn node_view_of_relay() {
        let n = Network::new(2, 2, [(3, vec![1]), (4, vec![1, 3])], [(1, vec![4])]);
        let v = n.node_view().unwrap();
        assert_eq!(
            v.nodes[0],
            Node {
                inputs: vec![1],
                outputs: vec![3]
            }
        );
        assert_eq!(
            v.nodes[1],
            Node {
                inputs: vec![1, 3],
                outputs: vec![4]
            }
        );
        assert_eq!(v.heads[&1], vec![Head::Node(0), Head::Node(1)]);
    }

    #[test]
    fn shorter_input_set_sorts_first() {
        let a = Network::new(1, 1, [(2, vec![1])], [(1, vec![2])]);
        let b = Network::new(1, 1, [(2, vec![1, 3])], [(1, vec![2])]);
        assert_eq!(a.compare(&b).unwrap(), Ordering::Less);
        assert_eq!(a.compare(&a).unwrap(), Ordering::Equal);
    }

    #[test]
    fn render_parse_round_trip() {
        let n = net11();
        let text = n.render();
        assert_eq!(text, r#"{"k":1,"l":1,"q":[[2,[1]]],"w":[[1,[2]]]}"#);
        assert_eq!(Network::parse(&text).unwrap(), n);
    }

    #[test]
    fn parse_requires_w() {
        let err = Network::parse(r#"{"k":1,"l":1,"q":[[2,[1]]]}"#).unwrap_err();
        assert!(matches!(err, ModelError::Parse { .. }));
    }
}
