//! Networks over arbitrary ids.
//!
//! Reductions and operators delete and merge sources and edges, which
//! leaves gaps in the label range. [`RawNetwork`] keeps the original ids
//! until [`RawNetwork::compact`] renumbers them into a [`Network`].

use std::collections::{BTreeMap, BTreeSet};

use crate::model::{Label, Network};

pub type Set = BTreeSet<Label>;

/// Something that reads a label: a node or a sink, named by its input set.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Reader {
    Node(Set),
    Sink(Set),
}

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RawNetwork {
    pub sources: Set,
    /// Edge id to input set.
    pub edges: BTreeMap<Label, Set>,
    /// (demand, sink inputs) pairs.
    pub sinks: BTreeSet<(Label, Set)>,
}

impl RawNetwork {
    pub fn from_network(net: &Network) -> RawNetwork {
        RawNetwork {
            sources: net.sources().collect(),
            edges: net
                .q()
                .iter()
                .map(|d| (d.edge, d.inputs.iter().copied().collect()))
                .collect(),
            sinks: net
                .w()
                .iter()
                .map(|d| (d.demand, d.inputs.iter().copied().collect()))
                .collect(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.sources.is_empty() && self.edges.is_empty() && self.sinks.is_empty()
    }

    /// Sources then edges, each ascending: the order of rate coordinates.
    pub fn ids(&self) -> Vec<Label> {
        self.sources
            .iter()
            .chain(self.edges.keys())
            .copied()
            .collect()
    }

    /// A fresh id larger than every id in use.
    pub fn next_id(&self) -> Label {
        let mut m = 0;
        for &s in &self.sources {
            m = m.max(s);
        }
        for (&e, ins) in &self.edges {
            m = m.max(e);
            if let Some(&x) = ins.iter().next_back() {
                m = m.max(x);
            }
        }
        for (d, ins) in &self.sinks {
            m = m.max(*d);
            if let Some(&x) = ins.iter().next_back() {
                m = m.max(x);
            }
        }
        m + 1
    }

    /// Renumbers sources to `1..=K` and edges to `K+1..=K+L`, keeping id
    /// order. Returns the network and the id behind each label.
    pub fn compact(&self) -> (Network, Vec<Label>) {
        let ids = self.ids();
        let pos: BTreeMap<Label, Label> = ids
            .iter()
            .enumerate()
            .map(|(i, &x)| (x, i as Label + 1))
            .collect();
        let map = |s: &Set| {
            s.iter()
                .filter_map(|x| pos.get(x).copied())
                .collect::<Vec<_>>()
        };
        let net = Network::new(
            self.sources.len() as u32,
            self.edges.len() as u32,
            self.edges.iter().map(|(e, ins)| (pos[e], map(ins))),
            self.sinks
                .iter()
                .map(|(d, ins)| (pos.get(d).copied().unwrap_or(0), map(ins))),
        );
        (net, ids)
    }

    /// Nodes keyed by input set, with their output edges.
    pub fn nodes(&self) -> BTreeMap<Set, Vec<Label>> {
        let mut m: BTreeMap<Set, Vec<Label>> = BTreeMap::new();
        for (&e, ins) in &self.edges {
            m.entry(ins.clone()).or_default().push(e);
        }
        m
    }

    /// Sinks keyed by input set, with their demands.
    pub fn sink_map(&self) -> BTreeMap<Set, Vec<Label>> {
        let mut m: BTreeMap<Set, Vec<Label>> = BTreeMap::new();
        for (d, ins) in &self.sinks {
            m.entry(ins.clone()).or_default().push(*d);
        }
        m
    }

    /// Nodes and sinks reading `x`.
    pub fn heads(&self, x: Label) -> BTreeSet<Reader> {
        let mut h = BTreeSet::new();
        for ins in self.edges.values() {
            if ins.contains(&x) {
                h.insert(Reader::Node(ins.clone()));
            }
        }
        for (_, ins) in &self.sinks {
            if ins.contains(&x) {
                h.insert(Reader::Sink(ins.clone()));
            }
        }
        h
    }

    /// Input sets of the sinks demanding `s`.
    pub fn demanded_at(&self, s: Label) -> BTreeSet<Set> {
        self.sinks
            .iter()
            .filter(|(d, _)| *d == s)
            .map(|(_, a)| a.clone())
            .collect()
    }

    /// Edges reachable from `x` along edge dependencies.
    pub fn descendants(&self, x: Label) -> Set {
        let mut out = Set::new();
        let mut stack = vec![x];
        while let Some(y) = stack.pop() {
            for (&e, ins) in &self.edges {
                if ins.contains(&y) && out.insert(e) {
                    stack.push(e);
                }
            }
        }
        out
    }

    /// Applies `f` to every edge and sink input set.
    pub fn map_inputs(&mut self, mut f: impl FnMut(&mut Set)) {
        for ins in self.edges.values_mut() {
            f(ins);
        }
        let sinks = std::mem::take(&mut self.sinks);
        self.sinks = sinks
            .into_iter()
            .map(|(d, mut ins)| {
                f(&mut ins);
                (d, ins)
            })
            .collect();
    }

    /// Replaces `old` by the labels in `new` in every input set.
    pub fn substitute(&mut self, old: Label, new: &Set) {
        self.map_inputs(|ins| {
            if ins.remove(&old) {
                ins.extend(new.iter().copied());
            }
        });
    }

    pub fn remove_from_inputs(&mut self, x: Label) {
        self.map_inputs(|ins| {
            ins.remove(&x);
        });
    }

    /// Removes a source from every set it appears in, including demands.
    pub fn delete_source(&mut self, s: Label) {
        self.sources.remove(&s);
        self.remove_from_inputs(s);
        self.sinks.retain(|(d, _)| *d != s);
    }

    /// Weakly connected components, each as its own network. Sinks join the
    /// component of their inputs and of their demand.
    pub fn components(&self) -> Vec<RawNetwork> {
        let ids = self.ids();
        let index: BTreeMap<Label, usize> = ids.iter().enumerate().map(|(i, &x)| (x, i)).collect();
        let mut parent: Vec<usize> = (0..ids.len()).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut y = x;
            while p[y] != r {
                let n = p[y];
                p[y] = r;
                y = n;
            }
            r
        }
        let union = |p: &mut Vec<usize>, a: Label, b: Label| {
            if let (Some(&x), Some(&y)) = (index.get(&a), index.get(&b)) {
                let (rx, ry) = (find(p, x), find(p, y));
                if rx != ry {
                    p[rx] = ry;
                }
            }
        };
        for (&e, ins) in &self.edges {
            for &x in ins {
                union(&mut parent, e, x);
            }
        }
        for (d, ins) in &self.sinks {
            for &x in ins {
                union(&mut parent, *d, x);
            }
        }
        let mut groups: BTreeMap<usize, RawNetwork> = BTreeMap::new();
        for (i, &x) in ids.iter().enumerate() {
            let r = find(&mut parent, i);
            let g = groups.entry(r).or_default();
            if self.sources.contains(&x) {
                g.sources.insert(x);
            } else {
                g.edges.insert(x, self.edges[&x].clone());
            }
        }
        for (d, ins) in &self.sinks {
            let anchor = ins.iter().next().copied().unwrap_or(*d);
            if let Some(&i) = index.get(&anchor) {
                let r = find(&mut parent, i);
                groups.get_mut(&r).unwrap().sinks.insert((*d, ins.clone()));
            }
        }
        let mut out: Vec<RawNetwork> = groups.into_values().collect();
        out.sort_by_key(|g| g.ids().first().copied());
        out
    }
}
