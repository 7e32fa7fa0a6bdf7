//! Relabelings of sources and edges, canonical forms, stabilizers, and
//! orderly generation of orbit transversals on subsets.
//!
//! The acting group is `S_K × S_L`. At the sizes handled here it has at most
//! a few hundred elements, so canonical forms and stabilizers are computed
//! by scanning every element.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::model::{Label, Network};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SymmetryError {
    #[error("permutation acts on ({0},{1}) but network is ({2},{3})")]
    SizeMismatch(u32, u32, u32, u32),
    #[error("malformed permutation: {0}")]
    Malformed(String),
}

/// A block permutation: sources to sources, edges to edges.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Permutation {
    k: u32,
    l: u32,
    /// `img[x - 1]` is the image of label `x`.
    img: Vec<Label>,
}

impl Permutation {
    pub fn identity(k: u32, l: u32) -> Permutation {
        Permutation {
            k,
            l,
            img: (1..=k + l).collect(),
        }
    }

    /// Builds from the source images and edge images.
    pub fn from_maps(
        source_map: &[Label],
        edge_map: &[Label],
    ) -> Result<Permutation, SymmetryError> {
        let k = source_map.len() as u32;
        let l = edge_map.len() as u32;
        let mut img = source_map.to_vec();
        img.extend_from_slice(edge_map);
        let p = Permutation { k, l, img };
        p.check()?;
        Ok(p)
    }

    fn check(&self) -> Result<(), SymmetryError> {
        let s: BTreeSet<Label> = self.img[..self.k as usize].iter().copied().collect();
        let e: BTreeSet<Label> = self.img[self.k as usize..].iter().copied().collect();
        let want_s: BTreeSet<Label> = (1..=self.k).collect();
        let want_e: BTreeSet<Label> = (self.k + 1..=self.k + self.l).collect();
        if s != want_s || e != want_e {
            return Err(SymmetryError::Malformed(self.render()));
        }
        Ok(())
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn l(&self) -> u32 {
        self.l
    }

    pub fn image(&self, x: Label) -> Label {
        self.img[(x - 1) as usize]
    }

    pub fn images(&self) -> &[Label] {
        &self.img
    }

    pub fn is_identity(&self) -> bool {
        self.img.iter().enumerate().all(|(i, &x)| x == i as u32 + 1)
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        Permutation {
            k: self.k,
            l: self.l,
            img: other.img.iter().map(|&x| self.image(x)).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut img = vec![0; self.img.len()];
        for (i, &x) in self.img.iter().enumerate() {
            img[(x - 1) as usize] = i as u32 + 1;
        }
        Permutation {
            k: self.k,
            l: self.l,
            img,
        }
    }

    /// Two one-line images, e.g. `s:[2,1] e:[3,4]`.
    pub fn render(&self) -> String {
        let list = |v: &[Label]| {
            let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
            format!("[{}]", parts.join(","))
        };
        format!(
            "s:{} e:{}",
            list(&self.img[..self.k as usize]),
            list(&self.img[self.k as usize..])
        )
    }

    pub fn parse(text: &str) -> Result<Permutation, SymmetryError> {
        let bad = || SymmetryError::Malformed(text.to_string());
        let mut parts = text.split_whitespace();
        let s = parts
            .next()
            .and_then(|p| p.strip_prefix("s:"))
            .ok_or_else(bad)?;
        let e = parts
            .next()
            .and_then(|p| p.strip_prefix("e:"))
            .ok_or_else(bad)?;
        if parts.next().is_some() {
            return Err(bad());
        }
        let list = |p: &str| -> Result<Vec<Label>, SymmetryError> {
            let inner = p
                .strip_prefix('[')
                .and_then(|p| p.strip_suffix(']'))
                .ok_or_else(bad)?;
            if inner.is_empty() {
                return Ok(Vec::new());
            }
            inner
                .split(',')
                .map(|x| x.trim().parse::<Label>().map_err(|_| bad()))
                .collect()
        };
        Permutation::from_maps(&list(s)?, &list(e)?)
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Relabels every label of `net` by `perm`.
pub fn apply(perm: &Permutation, net: &Network) -> Result<Network, SymmetryError> {
    if (perm.k, perm.l) != (net.k(), net.l()) {
        return Err(SymmetryError::SizeMismatch(
            perm.k,
            perm.l,
            net.k(),
            net.l(),
        ));
    }
    Ok(apply_unchecked(perm, net))
}

fn apply_unchecked(perm: &Permutation, net: &Network) -> Network {
    let map = |v: &[Label]| v.iter().map(|&x| perm.image(x)).collect::<Vec<_>>();
    Network::new(
        net.k(),
        net.l(),
        net.q().iter().map(|d| (perm.image(d.edge), map(&d.inputs))),
        net.w()
            .iter()
            .map(|d| (perm.image(d.demand), map(&d.inputs))),
    )
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations_of(n: usize) -> Vec<Vec<usize>> {
    let mut cur: Vec<usize> = (0..n).collect();
    let mut out = vec![cur.clone()];
    while let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) {
        let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).unwrap();
        cur.swap(i - 1, j);
        cur[i..].reverse();
        out.push(cur.clone());
    }
    out
}

/// Every element of `S_K × S_L`.
pub fn full_group(k: u32, l: u32) -> Vec<Permutation> {
    let ps = permutations_of(k as usize);
    let pe = permutations_of(l as usize);
    let mut out = Vec::with_capacity(ps.len() * pe.len());
    for s in &ps {
        for e in &pe {
            let mut img: Vec<Label> = s.iter().map(|&x| x as u32 + 1).collect();
            img.extend(e.iter().map(|&x| x as u32 + k + 1));
            out.push(Permutation { k, l, img });
        }
    }
    out
}

/// `K! · L!`.
pub fn group_order(k: u32, l: u32) -> u64 {
    let f = |n: u32| (1..=n as u64).product::<u64>();
    f(k) * f(l)
}

/// A subgroup of `S_K × S_L`, stored with its full element list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PermGroup {
    k: u32,
    l: u32,
    generators: Vec<Permutation>,
    elements: Vec<Permutation>,
}

impl PermGroup {
    /// The group generated by `generators`.
    pub fn generated(k: u32, l: u32, generators: Vec<Permutation>) -> PermGroup {
        let elements = close(k, l, &generators);
        PermGroup {
            k,
            l,
            generators,
            elements,
        }
    }

    /// Wraps a list already closed under composition; picks a small
    /// generating set greedily.
    pub fn from_elements(k: u32, l: u32, mut elements: Vec<Permutation>) -> PermGroup {
        elements.sort();
        elements.dedup();
        let mut generators = Vec::new();
        let mut reached: BTreeSet<Permutation> = BTreeSet::new();
        reached.insert(Permutation::identity(k, l));
        for g in &elements {
            if !reached.contains(g) {
                generators.push(g.clone());
                reached = close(k, l, &generators).into_iter().collect();
            }
        }
        PermGroup {
            k,
            l,
            generators,
            elements,
        }
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    /// Sorted element list, identity first.
    pub fn elements(&self) -> &[Permutation] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, p: &Permutation) -> bool {
        self.elements.binary_search(p).is_ok()
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn l(&self) -> u32 {
        self.l
    }
}

fn close(k: u32, l: u32, gens: &[Permutation]) -> Vec<Permutation> {
    let mut seen: BTreeSet<Permutation> = BTreeSet::new();
    let id = Permutation::identity(k, l);
    seen.insert(id.clone());
    let mut frontier = vec![id];
    while let Some(p) = frontier.pop() {
        for g in gens {
            let q = g.compose(&p);
            if seen.insert(q.clone()) {
                frontier.push(q);
            }
        }
    }
    seen.into_iter().collect()
}

/// Least network in the orbit of `net` and a permutation reaching it.
pub fn canonicalize(net: &Network) -> (Network, Permutation) {
    let mut best: Option<(Network, Permutation)> = None;
    for g in full_group(net.k(), net.l()) {
        let img = apply_unchecked(&g, net);
        let better = match &best {
            None => true,
            Some((b, _)) => img < *b,
        };
        if better {
            best = Some((img, g));
        }
    }
    best.expect("group is never empty")
}

/// The set of relabelings fixing `net`.
pub fn stabilizer(net: &Network) -> PermGroup {
    let els: Vec<Permutation> = full_group(net.k(), net.l())
        .into_iter()
        .filter(|g| apply_unchecked(g, net) == *net)
        .collect();
    PermGroup::from_elements(net.k(), net.l(), els)
}

/// Number of distinct labeled networks isomorphic to `net`.
pub fn orbit_size(net: &Network) -> u64 {
    group_order(net.k(), net.l()) / stabilizer(net).order() as u64
}

/// Target size for [`subset_transversal`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SubsetSize {
    Exactly(usize),
    /// Every nonempty size.
    AnyNonEmpty,
}

/// One orbit representative returned by [`subset_transversal`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Representative {
    /// Sorted universe indices.
    pub subset: Vec<usize>,
    /// Indices into the group list of the elements fixing `subset`.
    pub stabilizer: Vec<usize>,
}

/// Orbit representatives of subsets of `0..universe_len` under `group`.
///
/// `group` lists permutations of the universe indices (a full group, not
/// just generators). The universe must be sorted in the element order, so
/// comparing sorted index lists compares subsets. Every subset is grown one
/// element at a time; a subset is kept only if it is the least member of
/// its orbit and passes `test`. Since a least subset minus its largest
/// element is again least, each orbit is reached exactly once. `test` must
/// be hereditary.
pub fn subset_transversal(
    universe_len: usize,
    group: &[Vec<usize>],
    size: SubsetSize,
    test: impl Fn(&[usize]) -> bool + Sync,
) -> Vec<Representative> {
    let mut out = Vec::new();
    let max = match size {
        SubsetSize::Exactly(n) => n,
        SubsetSize::AnyNonEmpty => universe_len,
    };
    if max == 0 {
        if matches!(size, SubsetSize::Exactly(0)) {
            out.push(Representative {
                subset: Vec::new(),
                stabilizer: (0..group.len()).collect(),
            });
        }
        return out;
    }
    let mut cur = Vec::new();
    grow(universe_len, group, size, max, &test, &mut cur, &mut out);
    out
}

fn grow(
    n: usize,
    group: &[Vec<usize>],
    size: SubsetSize,
    max: usize,
    test: &dyn Fn(&[usize]) -> bool,
    cur: &mut Vec<usize>,
    out: &mut Vec<Representative>,
) {
    let start = cur.last().map_or(0, |&x| x + 1);
    for x in start..n {
        if let SubsetSize::Exactly(t) = size {
            // not enough elements left to reach the target
            if n - x < t - cur.len() {
                break;
            }
        }
        cur.push(x);
        if test(cur) {
            if let Some(stab) = least_in_orbit(cur, group) {
                let done = cur.len() == max;
                if matches!(size, SubsetSize::AnyNonEmpty) || done {
                    out.push(Representative {
                        subset: cur.clone(),
                        stabilizer: stab,
                    });
                }
                if !done {
                    grow(n, group, size, max, test, cur, out);
                }
            }
        }
        cur.pop();
    }
}

/// `Some(stabilizer)` if `set` is the least element of its orbit.
pub fn least_in_orbit(set: &[usize], group: &[Vec<usize>]) -> Option<Vec<usize>> {
    let mut stab = Vec::new();
    let mut img = Vec::with_capacity(set.len());
    for (gi, g) in group.iter().enumerate() {
        img.clear();
        img.extend(set.iter().map(|&x| g[x]));
        img.sort_unstable();
        match img.as_slice().cmp(set) {
            std::cmp::Ordering::Less => return None,
            std::cmp::Ordering::Equal => stab.push(gi),
            std::cmp::Ordering::Greater => {}
        }
    }
    Some(stab)
}
