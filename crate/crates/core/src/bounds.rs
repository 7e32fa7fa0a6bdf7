//! Polyhedral bounds on rate regions.
//!
//! The outer bound `R_o` projects the Shannon cone, cut by the network
//! constraints, onto source rates `w*` and edge capacities `r*`. Encoder and
//! decoder constraints are functional dependencies, so on the constrained
//! cone every joint entropy equals the entropy of its closure; the linear
//! programs run over closed sets only. The projection itself is recovered
//! facet by facet with [`hull_from_oracle`].
//!
//! Inner bounds come from binary linear codes. A point of the vector bound
//! with `N'` ground elements is a choice of subspaces, one per variable,
//! with dimensions summing (each counted as at least one) to at most `N'`.
//! Sources are independent coordinate blocks and every edge is a subspace
//! of the span of its inputs. [`matroid_inner_region`] builds the same
//! region literally from binary matroid rank vectors and set partitions.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::minimality::{is_minimal, omega, rate, rate_names, rate_space};
use crate::model::{Label, Network};
use crate::polyhedra::linalg::Vector;
use crate::polyhedra::lp::{self, Rel, Q};
use crate::polyhedra::{hull_from_oracle, Cone, CoordSpace, PolyError};
use crate::raw::{RawNetwork, Set};

/// Largest `N` accepted by [`shannon_cone`] and the outer bound.
pub const MAX_N: u32 = 6;
/// Largest ground set for matroid enumeration and vector bounds.
pub const MAX_GROUND: u32 = 8;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BoundsError {
    #[error("network is not minimal; reduce it first")]
    NotMinimal,
    #[error("network is invalid")]
    Invalid,
    #[error("{what} = {value} exceeds the cap {cap}")]
    Cap {
        what: &'static str,
        value: u32,
        cap: u32,
    },
    #[error("ground size {n_prime} is below N = {n}")]
    GroundTooSmall { n_prime: u32, n: u32 },
    #[error("the Ingleton region needs N = 4, got {0}")]
    NotFour(u32),
    #[error("only the binary field is supported, got q = {0}")]
    Field(u32),
    #[error("unknown bound tag {0:?}")]
    UnknownTag(String),
    #[error("{0} region is not contained in the outer bound")]
    NotInner(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// A set of variables as a bitmask over positions `0..N`.
pub type Mask = u32;

/// A linear form in joint entropies: `Σ coeff · h(mask)`.
pub type EntropyForm = Vec<(Mask, i64)>;

fn bit(i: usize) -> Mask {
    1 << i
}

/// Coordinate name of a joint entropy, e.g. `h13` for positions {0, 2}.
/// Positions are printed one-based; unambiguous for `N ≤ 9`.
pub fn entropy_name(mask: Mask) -> String {
    let mut s = String::from("h");
    for i in 0..32 {
        if mask >> i & 1 == 1 {
            s.push_str(&(i + 1).to_string());
        }
    }
    s
}

/// Elemental Shannon inequalities on `n` variables, each `form ≥ 0`:
/// `h(N) - h(N∖i)` and `I(i; j | K)` for `i < j`, `K ⊆ N∖{i, j}`.
pub fn elemental_forms(n: usize) -> Vec<EntropyForm> {
    let full: Mask = (1 << n) - 1;
    let mut out = Vec::new();
    for i in 0..n {
        out.push(vec![(full, 1), (full & !bit(i), -1)]);
    }
    for i in 0..n {
        for j in i + 1..n {
            let rest = full & !bit(i) & !bit(j);
            let mut k = rest;
            loop {
                out.push(vec![
                    (k | bit(i), 1),
                    (k | bit(j), 1),
                    (k | bit(i) | bit(j), -1),
                    (k, -1),
                ]);
                if k == 0 {
                    break;
                }
                k = (k - 1) & rest;
            }
        }
    }
    out
}

/// Every monotonicity and submodularity inequality on `n` variables.
pub fn polymatroid_forms(n: usize) -> Vec<EntropyForm> {
    let all = 1u32 << n;
    let mut out = Vec::new();
    for a in 0..all {
        for b in a + 1..all {
            if a & b == a {
                out.push(vec![(b, 1), (a, -1)]);
            }
            if a != 0 {
                out.push(vec![(a, 1), (b, 1), (a | b, -1), (a & b, -1)]);
            }
        }
    }
    out
}

/// The Ingleton instances on 4 variables, one per pair `{a, b}`:
/// `I(a;b|c) + I(a;b|d) + I(c;d) - I(a;b) ≥ 0`.
pub fn ingleton_forms() -> Vec<EntropyForm> {
    let mut out = Vec::new();
    for a in 0..4 {
        for b in a + 1..4 {
            let rest: Vec<usize> = (0..4).filter(|&x| x != a && x != b).collect();
            let (a, b, c, d) = (bit(a), bit(b), bit(rest[0]), bit(rest[1]));
            out.push(vec![
                (a | c, 1),
                (b | c, 1),
                (a | d, 1),
                (b | d, 1),
                (a | b, 1),
                (a | b | c, -1),
                (a | b | d, -1),
                (c | d, -1),
                (a, -1),
                (b, -1),
            ]);
        }
    }
    out
}

fn form_row(form: &EntropyForm, dim: usize) -> Vector {
    let mut v = vec![BigInt::zero(); dim];
    for &(m, c) in form {
        if m != 0 {
            v[m as usize - 1] += c;
        }
    }
    v
}

fn entropy_space(n: usize) -> CoordSpace {
    CoordSpace::new((1..1u32 << n).map(entropy_name).collect()).expect("distinct names")
}

/// The Shannon cone `Γ_N` over the `2^N - 1` joint entropies, from the
/// elemental inequalities.
pub fn shannon_cone(n: u32) -> Result<Cone, BoundsError> {
    check_cap("N", n, MAX_N)?;
    if n == 0 {
        return Err(BoundsError::Cap {
            what: "N",
            value: 0,
            cap: MAX_N,
        });
    }
    let n = n as usize;
    let d = (1 << n) - 1;
    let rows = elemental_forms(n).iter().map(|f| form_row(f, d)).collect();
    Ok(Cone::new(entropy_space(n), rows, Vec::new())?)
}

/// `Γ_N` from the full monotonicity and submodularity lists.
pub fn polymatroid_cone(n: u32) -> Result<Cone, BoundsError> {
    check_cap("N", n, 4)?;
    let n = n as usize;
    let d = (1 << n) - 1;
    let rows = polymatroid_forms(n)
        .iter()
        .map(|f| form_row(f, d))
        .collect();
    Ok(Cone::new(entropy_space(n), rows, Vec::new())?)
}

fn check_cap(what: &'static str, value: u32, cap: u32) -> Result<(), BoundsError> {
    if value > cap {
        Err(BoundsError::Cap { what, value, cap })
    } else {
        Ok(())
    }
}

/// A network's linear constraints, over positions of [`RawNetwork::ids`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NetworkConstraints {
    /// Source labels then edge labels; position `i` is `ids[i]`.
    pub ids: Vec<Label>,
    /// Source independence, `= 0`. Empty for a single source.
    pub l1: Vec<EntropyForm>,
    /// One per node: `h(In ∪ Out) - h(In) = 0`.
    pub l3: Vec<EntropyForm>,
    /// `(edge position, R_e ≥ h(edge))`.
    pub l4p: Vec<usize>,
    /// One per sink: `h(In ∪ demands) - h(In) = 0`.
    pub l5: Vec<EntropyForm>,
}

struct Positions {
    ids: Vec<Label>,
    pos: HashMap<Label, usize>,
    k: usize,
}

impl Positions {
    fn of(raw: &RawNetwork) -> Positions {
        let ids = raw.ids();
        let pos = ids.iter().enumerate().map(|(i, &x)| (x, i)).collect();
        Positions {
            ids,
            pos,
            k: raw.sources.len(),
        }
    }

    fn mask(&self, s: &Set) -> Mask {
        s.iter()
            .filter_map(|x| self.pos.get(x))
            .fold(0, |m, &i| m | bit(i))
    }

    fn n(&self) -> usize {
        self.ids.len()
    }
}

fn constraints_of(raw: &RawNetwork) -> (Positions, NetworkConstraints) {
    let p = Positions::of(raw);
    let sources: Mask = (1 << p.k) - 1;
    let mut l1 = Vec::new();
    if p.k >= 2 {
        let mut f: EntropyForm = vec![(sources, 1)];
        f.extend((0..p.k).map(|i| (bit(i), -1)));
        l1.push(f);
    }
    let l3 = raw
        .nodes()
        .iter()
        .map(|(ins, outs)| {
            let i = p.mask(ins);
            let o = outs.iter().fold(0, |m, e| m | bit(p.pos[e]));
            vec![(i | o, 1), (i, -1)]
        })
        .collect();
    let l4p = raw.edges.keys().map(|e| p.pos[e]).collect();
    let l5 = raw
        .sink_map()
        .iter()
        .map(|(ins, ds)| {
            let i = p.mask(ins);
            let d = ds.iter().fold(0, |m, s| m | bit(p.pos[s]));
            vec![(i | d, 1), (i, -1)]
        })
        .collect();
    let ids = p.ids.clone();
    (
        p,
        NetworkConstraints {
            ids,
            l1,
            l3,
            l4p,
            l5,
        },
    )
}

/// Constraint sets of a minimal network.
pub fn constraint_set(net: &Network) -> Result<NetworkConstraints, BoundsError> {
    require_minimal(net)?;
    Ok(constraints_of(&RawNetwork::from_network(net)).1)
}

fn require_minimal(net: &Network) -> Result<(), BoundsError> {
    if !net.validate().is_empty() {
        return Err(BoundsError::Invalid);
    }
    if !is_minimal(net) {
        return Err(BoundsError::NotMinimal);
    }
    Ok(())
}

/// Closure of every mask under the encoder and decoder dependencies.
fn closures(raw: &RawNetwork, p: &Positions) -> Vec<Mask> {
    let mut fds: Vec<(Mask, Mask)> = raw
        .edges
        .iter()
        .map(|(e, ins)| (p.mask(ins), bit(p.pos[e])))
        .collect();
    fds.extend(
        raw.sinks
            .iter()
            .map(|(d, ins)| (p.mask(ins), bit(p.pos[d]))),
    );
    (0..1u32 << p.n())
        .map(|m| {
            let mut c = m;
            loop {
                let next = fds
                    .iter()
                    .filter(|(a, _)| a & c == *a)
                    .fold(c, |c, (_, b)| c | b);
                if next == c {
                    return c;
                }
                c = next;
            }
        })
        .collect()
}

fn q(x: i64) -> Q {
    BigRational::from_integer(x.into())
}

/// The linear program behind the outer bound, over closed sets.
struct OuterProgram {
    solver: lp::Solver,
    /// Each output coordinate as an LP expression.
    coords: Vec<Vec<(usize, Q)>>,
}

impl OuterProgram {
    fn new(raw: &RawNetwork, extra: &[EntropyForm]) -> OuterProgram {
        let (p, cons) = constraints_of(raw);
        let cl = closures(raw, &p);
        let zero = cl[0];
        let mut b = lp::Builder::new();
        let mut var_of: BTreeMap<Mask, usize> = BTreeMap::new();
        for &c in &cl {
            if c != zero && !var_of.contains_key(&c) {
                var_of.insert(c, b.var(false));
            }
        }
        let subst = |form: &EntropyForm| -> Vec<(usize, Q)> {
            let mut acc: BTreeMap<usize, i64> = BTreeMap::new();
            for &(m, c) in form {
                if let Some(&v) = var_of.get(&cl[m as usize]) {
                    *acc.entry(v).or_default() += c;
                }
            }
            acc.into_iter()
                .filter(|(_, c)| *c != 0)
                .map(|(v, c)| (v, q(c)))
                .collect()
        };
        let mut seen = BTreeSet::new();
        for f in elemental_forms(p.n()).iter().chain(extra) {
            let row = subst(f);
            if !row.is_empty() && seen.insert(row.clone()) {
                b.row(row, Rel::Ge, Q::zero());
            }
        }
        for f in &cons.l1 {
            let row = subst(f);
            if !row.is_empty() {
                b.row(row, Rel::Eq, Q::zero());
            }
        }
        let mut coords: Vec<Vec<(usize, Q)>> =
            (0..p.k).map(|i| subst(&vec![(bit(i), 1)])).collect();
        for &e in &cons.l4p {
            let r = b.var(false);
            let mut row = vec![(r, Q::one())];
            for (v, c) in subst(&vec![(bit(e), 1)]) {
                row.push((v, -c));
            }
            b.row(row, Rel::Ge, Q::zero());
            coords.push(vec![(r, Q::one())]);
        }
        let mut norm: BTreeMap<usize, Q> = BTreeMap::new();
        for c in &coords {
            for (v, x) in c {
                *norm.entry(*v).or_insert_with(Q::zero) += x;
            }
        }
        b.row(norm.into_iter().collect(), Rel::Eq, Q::one());
        OuterProgram {
            solver: b.build(),
            coords,
        }
    }

    fn minimize(&mut self, c: &[BigInt]) -> Option<(BigRational, Vec<BigRational>)> {
        let mut obj: BTreeMap<usize, Q> = BTreeMap::new();
        for (ci, expr) in c.iter().zip(&self.coords) {
            if ci.is_zero() {
                continue;
            }
            for (v, x) in expr {
                *obj.entry(*v).or_insert_with(Q::zero) += x * BigRational::from_integer(ci.clone());
            }
        }
        let obj: Vec<(usize, Q)> = obj.into_iter().collect();
        match self.solver.minimize(&obj) {
            lp::Outcome::Optimal(val, x) => {
                let y = self
                    .coords
                    .iter()
                    .map(|e| e.iter().fold(Q::zero(), |s, (v, a)| s + a * &x[*v]))
                    .collect();
                Some((val, y))
            }
            _ => None,
        }
    }
}

fn outer_with(raw: &RawNetwork, extra: &[EntropyForm]) -> Cone {
    let mut prog = OuterProgram::new(raw, extra);
    hull_from_oracle(rate_space(raw), |c| prog.minimize(c))
}

/// `R_o` of any well-formed raw network, over [`rate_space`]. Used for
/// intermediate networks of reductions and operators.
pub fn outer_region_raw(raw: &RawNetwork) -> Result<Cone, BoundsError> {
    check_cap("N", raw.ids().len() as u32, MAX_N + 2)?;
    Ok(outer_with(raw, &[]))
}

/// The Shannon outer bound `R_o` of a minimal network over
/// `w1..wK rK+1..rK+L`.
pub fn outer_region(net: &Network) -> Result<Cone, BoundsError> {
    require_minimal(net)?;
    check_cap("N", net.n(), MAX_N)?;
    Ok(outer_with(&RawNetwork::from_network(net), &[]))
}

/// `R_o` with the Ingleton inequalities added; an outer bound on the
/// linear-coding region. Needs `N = 4`.
pub fn ingleton_region(net: &Network) -> Result<Cone, BoundsError> {
    require_minimal(net)?;
    if net.n() != 4 {
        return Err(BoundsError::NotFour(net.n()));
    }
    Ok(outer_with(
        &RawNetwork::from_network(net),
        &ingleton_forms(),
    ))
}

/// Rank function of a matroid on `m` labeled elements; `values[A - 1]` is
/// the rank of the subset with bitmask `A`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RankVector {
    pub m: u32,
    pub values: Vec<u8>,
}

impl RankVector {
    pub fn rank(&self, a: Mask) -> u32 {
        if a == 0 {
            0
        } else {
            self.values[a as usize - 1] as u32
        }
    }

    /// Cardinality, monotonicity and submodularity, checked exhaustively.
    pub fn is_matroid_rank(&self) -> bool {
        let all = 1u32 << self.m;
        for a in 0..all {
            if self.rank(a) > a.count_ones() {
                return false;
            }
            for b in 0..all {
                if a & b == a && self.rank(a) > self.rank(b) {
                    return false;
                }
                if self.rank(a | b) + self.rank(a & b) > self.rank(a) + self.rank(b) {
                    return false;
                }
            }
        }
        true
    }
}

/// Inserts `v` into an xor basis kept by leading bit; returns whether it
/// was independent.
fn insert(basis: &mut Vec<u16>, mut v: u16) -> bool {
    for &b in basis.iter() {
        v = v.min(v ^ b);
    }
    if v == 0 {
        return false;
    }
    basis.push(v);
    basis.sort_unstable_by(|a, b| b.cmp(a));
    true
}

fn rank_of(vs: impl IntoIterator<Item = u16>) -> u32 {
    let mut basis = Vec::new();
    vs.into_iter().filter(|&v| insert(&mut basis, v)).count() as u32
}

fn rank_vector(cols: &[u16]) -> RankVector {
    let m = cols.len() as u32;
    let values = (1..1u32 << m)
        .map(|a| rank_of((0..m).filter(|i| a >> i & 1 == 1).map(|i| cols[i as usize])) as u8)
        .collect();
    RankVector { m, values }
}

/// All distinct rank vectors of binary matroids on `m` labeled elements,
/// loops included, sorted.
pub fn matroid_ranks(m: u32, field: u32) -> Result<Vec<RankVector>, BoundsError> {
    if field != 2 {
        return Err(BoundsError::Field(field));
    }
    check_cap("ground size", m, MAX_GROUND)?;
    // one representing matrix per matroid, columns as bitmasks in
    // coordinates 0..rank
    let mut reps: Vec<(Vec<u16>, u32)> = vec![(Vec::new(), 0)];
    for _ in 0..m {
        let mut seen: HashSet<Vec<u8>> = HashSet::new();
        let mut next = Vec::new();
        for (cols, r) in &reps {
            for c in (0..1u16 << r).chain([1u16 << r]) {
                let mut ext = cols.clone();
                ext.push(c);
                let rv = rank_vector(&ext);
                if seen.insert(rv.values.clone()) {
                    let r2 = if c == 1 << r { r + 1 } else { *r };
                    next.push((ext, r2));
                }
            }
        }
        reps = next;
    }
    let mut out: Vec<RankVector> = reps.iter().map(|(c, _)| rank_vector(c)).collect();
    out.sort();
    Ok(out)
}

/// Surjections of `0..n_prime` onto `0..n`, as block index per element.
pub fn partitions(n_prime: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0; n_prime];
    fn rec(
        i: usize,
        n: usize,
        cur: &mut Vec<usize>,
        used: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if i == cur.len() {
            if used.iter().all(|&u| u > 0) {
                out.push(cur.clone());
            }
            return;
        }
        let empty = used.iter().filter(|&&u| u == 0).count();
        if cur.len() - i < empty {
            return;
        }
        for b in 0..n {
            cur[i] = b;
            used[b] += 1;
            rec(i + 1, n, cur, used, out);
            used[b] -= 1;
        }
    }
    let mut used = vec![0; n];
    rec(0, n, &mut cur, &mut used, &mut out);
    out
}

fn rays_to_region(raw: &RawNetwork, points: &BTreeSet<Vec<i64>>) -> Cone {
    let space = rate_space(raw);
    let d = space.dim();
    let k = raw.sources.len();
    let mut rays: Vec<Vector> = points
        .iter()
        .filter(|p| p.iter().any(|&x| x != 0))
        .map(|p| p.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    for i in k..d {
        let mut u = vec![BigInt::zero(); d];
        u[i] = BigInt::one();
        rays.push(u);
    }
    Cone::conic_hull(space, &rays, &[])
}

/// Rate points `(h_s, h_e)` of matroid-derived entropy vectors obeying the
/// network constraints, with `n_prime` ground elements.
pub fn matroid_points(raw: &RawNetwork, n_prime: u32) -> Result<BTreeSet<Vec<i64>>, BoundsError> {
    let (p, cons) = constraints_of(raw);
    let n = p.n();
    if (n_prime as usize) < n {
        return Err(BoundsError::GroundTooSmall {
            n_prime,
            n: n as u32,
        });
    }
    let ranks = matroid_ranks(n_prime, 2)?;
    let parts = partitions(n_prime as usize, n);
    let eqs: Vec<&EntropyForm> = cons.l1.iter().chain(&cons.l3).chain(&cons.l5).collect();
    let mut out = BTreeSet::new();
    for rv in &ranks {
        for part in &parts {
            let lift = |a: Mask| -> Mask {
                (0..n_prime as usize)
                    .filter(|&x| a >> part[x] & 1 == 1)
                    .fold(0, |m, x| m | bit(x))
            };
            let h = |a: Mask| rv.rank(lift(a)) as i64;
            if eqs
                .iter()
                .all(|f| f.iter().map(|&(m, c)| c * h(m)).sum::<i64>() == 0)
            {
                out.insert((0..n).map(|i| h(bit(i))).collect());
            }
        }
    }
    Ok(out)
}

/// The vector binary inner bound with `n_prime` ground elements, computed
/// literally from [`matroid_ranks`] and [`partitions`]. Slow; kept as a
/// cross-check for [`vector_inner_region`].
pub fn matroid_inner_region(net: &Network, n_prime: u32) -> Result<Cone, BoundsError> {
    let raw = RawNetwork::from_network(net);
    Ok(rays_to_region(&raw, &matroid_points(&raw, n_prime)?))
}

/// Reduced echelon bases of all `k`-dimensional subspaces of `F_2^m`.
fn subspaces(m: usize, k: usize) -> Vec<Vec<u16>> {
    let mut out = Vec::new();
    // pivots as increasing bit positions; row i has its pivot as lowest set
    // bit, zeros at the other pivots, free bits above its pivot
    fn pick(m: usize, k: usize, start: usize, piv: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if piv.len() == k {
            out.push(piv.clone());
            return;
        }
        for p in start..m {
            piv.push(p);
            pick(m, k, p + 1, piv, out);
            piv.pop();
        }
    }
    let mut pivs = Vec::new();
    pick(m, k, 0, &mut Vec::new(), &mut pivs);
    for piv in pivs {
        let free: Vec<Vec<usize>> = piv
            .iter()
            .map(|&p| (p + 1..m).filter(|x| !piv.contains(x)).collect())
            .collect();
        let total: usize = free.iter().map(|f| f.len()).sum();
        for bits in 0u32..1 << total {
            let mut off = 0;
            let basis = piv
                .iter()
                .zip(&free)
                .map(|(&p, f)| {
                    let mut v = 1u16 << p;
                    for (j, &x) in f.iter().enumerate() {
                        if bits >> (off + j) & 1 == 1 {
                            v |= 1 << x;
                        }
                    }
                    off += f.len();
                    v
                })
                .collect();
            out.push(basis);
        }
    }
    out
}

struct CodeSearch<'a> {
    /// Edge positions in dependency order, with input positions.
    order: Vec<(usize, Vec<usize>)>,
    /// Sinks (input positions, demand positions) checked after step `i`.
    sinks_at: Vec<Vec<(Vec<usize>, Vec<usize>)>>,
    cache: HashMap<(usize, usize), Vec<Vec<u16>>>,
    out: &'a mut BTreeSet<Vec<i64>>,
}

impl CodeSearch<'_> {
    fn span(spaces: &[Vec<u16>], of: &[usize]) -> Vec<u16> {
        let mut basis = Vec::new();
        for &x in of {
            for &v in &spaces[x] {
                insert(&mut basis, v);
            }
        }
        basis
    }

    fn sinks_ok(spaces: &[Vec<u16>], sinks: &[(Vec<usize>, Vec<usize>)]) -> bool {
        sinks.iter().all(|(ins, ds)| {
            let base = Self::span(spaces, ins);
            let r = base.len();
            let mut b = base;
            ds.iter()
                .all(|&d| spaces[d].iter().all(|&v| !insert(&mut b, v)))
                && b.len() == r
        })
    }

    fn run(&mut self, step: usize, budget: usize, spaces: &mut Vec<Vec<u16>>) {
        if step == self.order.len() {
            self.out
                .insert(spaces.iter().map(|s| s.len() as i64).collect());
            return;
        }
        let (e, ins) = self.order[step].clone();
        let span = Self::span(spaces, &ins);
        let later = self.order.len() - step - 1;
        let room = budget - later;
        let m = span.len();
        for k in 0..=m.min(room) {
            let subs = self
                .cache
                .entry((m, k))
                .or_insert_with(|| subspaces(m, k))
                .clone();
            for coords in subs {
                spaces[e] = coords
                    .iter()
                    .map(|&c| {
                        (0..m)
                            .filter(|i| c >> i & 1 == 1)
                            .fold(0, |v, i| v ^ span[i])
                    })
                    .collect();
                if Self::sinks_ok(spaces, &self.sinks_at[step + 1]) {
                    self.run(step + 1, budget - k.max(1), spaces);
                }
            }
        }
        spaces[e].clear();
    }
}

/// Rate points `(h_s, h_e)` of binary linear codes using at most `n_prime`
/// ground elements.
pub fn code_points(raw: &RawNetwork, n_prime: u32) -> Result<BTreeSet<Vec<i64>>, BoundsError> {
    let p = Positions::of(raw);
    let n = p.n();
    if (n_prime as usize) < n {
        return Err(BoundsError::GroundTooSmall {
            n_prime,
            n: n as u32,
        });
    }
    check_cap("ground size", n_prime, 16)?;
    let k = p.k;
    // dependency order of edges
    let mut order: Vec<(usize, Vec<usize>)> = Vec::new();
    let mut done: BTreeSet<Label> = raw.sources.clone();
    let mut pending: Vec<(&Label, &Set)> = raw.edges.iter().collect();
    while !pending.is_empty() {
        let before = pending.len();
        pending.retain(|(e, ins)| {
            if ins
                .iter()
                .all(|x| done.contains(x) || !p.pos.contains_key(x))
            {
                done.insert(**e);
                order.push((
                    p.pos[e],
                    ins.iter().filter_map(|x| p.pos.get(x).copied()).collect(),
                ));
                false
            } else {
                true
            }
        });
        if pending.len() == before {
            return Err(BoundsError::Invalid);
        }
    }
    let step_of: HashMap<usize, usize> = order
        .iter()
        .enumerate()
        .map(|(i, (e, _))| (*e, i + 1))
        .collect();
    let mut sinks_at = vec![Vec::new(); order.len() + 1];
    for (ins, ds) in raw.sink_map() {
        let ins: Vec<usize> = ins.iter().filter_map(|x| p.pos.get(x).copied()).collect();
        let ds: Vec<usize> = ds.iter().map(|d| p.pos[d]).collect();
        let at = ins
            .iter()
            .map(|x| step_of.get(x).copied().unwrap_or(0))
            .max()
            .unwrap_or(0);
        sinks_at[at].push((ins, ds));
    }
    let mut out = BTreeSet::new();
    let n_prime = n_prime as usize;
    let edge_min = order.len();
    // source dimensions
    let mut dims = vec![0usize; k];
    loop {
        let used: usize = dims.iter().map(|&d| d.max(1)).sum();
        if used + edge_min <= n_prime && dims.iter().sum::<usize>() <= 16 {
            let mut spaces: Vec<Vec<u16>> = vec![Vec::new(); n];
            let mut off = 0;
            for (s, &d) in dims.iter().enumerate() {
                spaces[s] = (0..d).map(|i| 1u16 << (off + i)).collect();
                off += d;
            }
            if CodeSearch::sinks_ok(&spaces, &sinks_at[0]) {
                let mut search = CodeSearch {
                    order: order.clone(),
                    sinks_at: sinks_at.clone(),
                    cache: HashMap::new(),
                    out: &mut out,
                };
                search.run(0, n_prime - used, &mut spaces);
            }
        }
        // next dims vector, odometer style
        let mut i = 0;
        loop {
            if i == k {
                return Ok(out);
            }
            dims[i] += 1;
            if dims[i] <= n_prime {
                break;
            }
            dims[i] = 0;
            i += 1;
        }
    }
}

/// Conic hull of [`code_points`] plus the free capacity directions.
pub fn code_region_raw(raw: &RawNetwork, n_prime: u32) -> Result<Cone, BoundsError> {
    Ok(rays_to_region(raw, &code_points(raw, n_prime)?))
}

/// The scalar binary inner bound `R_{s,2}`.
pub fn scalar_inner_region(net: &Network, field: u32) -> Result<Cone, BoundsError> {
    if field != 2 {
        return Err(BoundsError::Field(field));
    }
    require_minimal(net)?;
    code_region_raw(&RawNetwork::from_network(net), net.n())
}

/// The vector binary inner bound `R_2^{N'}` with `N' = n_prime` ground
/// elements.
pub fn vector_inner_region(net: &Network, field: u32, n_prime: u32) -> Result<Cone, BoundsError> {
    if field != 2 {
        return Err(BoundsError::Field(field));
    }
    require_minimal(net)?;
    check_cap("ground size", n_prime, MAX_GROUND)?;
    if n_prime < net.n() {
        return Err(BoundsError::GroundTooSmall {
            n_prime,
            n: net.n(),
        });
    }
    code_region_raw(&RawNetwork::from_network(net), n_prime)
}

/// Which bound to compute.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BoundTag {
    Outer,
    /// `scalar-2`
    Scalar {
        field: u32,
    },
    /// `vector-2-7`: binary, 7 ground elements.
    Vector {
        field: u32,
        ground: u32,
    },
    Ingleton,
}

impl BoundTag {
    /// The vector tag with `N + extra` ground elements.
    pub fn vector_plus(net: &Network, extra: u32) -> BoundTag {
        BoundTag::Vector {
            field: 2,
            ground: net.n() + extra,
        }
    }
}

impl fmt::Display for BoundTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundTag::Outer => write!(f, "outer"),
            BoundTag::Scalar { field } => write!(f, "scalar-{field}"),
            BoundTag::Vector { field, ground } => write!(f, "vector-{field}-{ground}"),
            BoundTag::Ingleton => write!(f, "ingleton"),
        }
    }
}

impl FromStr for BoundTag {
    type Err = BoundsError;

    fn from_str(s: &str) -> Result<BoundTag, BoundsError> {
        let bad = || BoundsError::UnknownTag(s.to_string());
        let parts: Vec<&str> = s.split('-').collect();
        let num = |x: &str| x.parse::<u32>().map_err(|_| bad());
        match parts.as_slice() {
            ["outer"] => Ok(BoundTag::Outer),
            ["ingleton"] => Ok(BoundTag::Ingleton),
            ["scalar", q] => Ok(BoundTag::Scalar { field: num(q)? }),
            ["vector", q, g] => Ok(BoundTag::Vector {
                field: num(q)?,
                ground: num(g)?,
            }),
            _ => Err(bad()),
        }
    }
}

impl Serialize for BoundTag {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for BoundTag {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<BoundTag, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// One bound of one network.
pub fn region(net: &Network, tag: BoundTag) -> Result<Cone, BoundsError> {
    match tag {
        BoundTag::Outer => outer_region(net),
        BoundTag::Scalar { field } => scalar_inner_region(net, field),
        BoundTag::Vector { field, ground } => vector_inner_region(net, field, ground),
        BoundTag::Ingleton => ingleton_region(net),
    }
}

/// The outer bound and a set of other bounds of one network, with a flag
/// per bound saying whether it equals the outer bound.
#[derive(Clone, Debug, PartialEq)]
pub struct RegionBundle {
    pub key: String,
    pub outer: Cone,
    pub bounds: BTreeMap<BoundTag, Cone>,
    pub sufficient: BTreeMap<BoundTag, bool>,
}

/// Computes `R_o` and each requested bound, checks that every inner bound
/// lies inside `R_o`, and flags equality.
pub fn sufficiency_report(net: &Network, tags: &[BoundTag]) -> Result<RegionBundle, BoundsError> {
    let outer = outer_region(net)?;
    let mut bounds = BTreeMap::new();
    let mut sufficient = BTreeMap::new();
    for &tag in tags {
        if tag == BoundTag::Outer {
            continue;
        }
        let r = region(net, tag)?;
        if !r.is_subcone(&outer)? {
            return Err(BoundsError::NotInner(tag.to_string()));
        }
        sufficient.insert(tag, outer.is_subcone(&r)?);
        bounds.insert(tag, r);
    }
    Ok(RegionBundle {
        key: net.render(),
        outer,
        bounds,
        sufficient,
    })
}

/// Names of the rate coordinates of a network, `w*` then `r*`.
pub fn region_names(net: &Network) -> Vec<String> {
    net.sources()
        .map(omega)
        .chain(net.edges().map(rate))
        .collect()
}

/// Raw-network rate names, re-exported for operator code.
pub fn raw_region_names(raw: &RawNetwork) -> Vec<String> {
    rate_names(raw)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyhedra::{cone_from_terms, ivec};

    fn net11() -> Network {
        Network::new(1, 1, [(2, vec![1])], [(1, vec![2])])
    }

    #[test]
    fn elemental_count() {
        for n in 1..=5usize {
            let expect = n + n * (n - 1) * (1 << n) / 8;
            let expect = if n == 1 { 1 } else { expect };
            assert_eq!(elemental_forms(n).len(), expect);
        }
    }

    #[test]
    fn gamma1_and_gamma2() {
        let g1 = shannon_cone(1).unwrap();
        assert_eq!(g1.inequalities(), &[ivec(&[1])]);
        let g2 = shannon_cone(2).unwrap();
        assert_eq!(g2.inequalities().len(), 3);
        let mut rays = g2.extreme_rays();
        rays.sort();
        assert_eq!(
            rays,
            vec![ivec(&[0, 1, 1]), ivec(&[1, 0, 1]), ivec(&[1, 1, 1])]
        );
    }

    #[test]
    fn one_one_constraints() {
        let c = constraint_set(&net11()).unwrap();
        assert!(c.l1.is_empty());
        assert_eq!(c.l3, vec![vec![(0b11, 1), (0b01, -1)]]);
        assert_eq!(c.l5, vec![vec![(0b11, 1), (0b10, -1)]]);
        assert_eq!(c.l4p, vec![1]);
    }

    #[test]
    fn one_one_outer() {
        let r = outer_region(&net11()).unwrap();
        let want = cone_from_terms(
            &["w1", "r2"],
            &[&[("r2", 1), ("w1", -1)], &[("w1", 1)]],
            &[],
        )
        .unwrap();
        assert_eq!(r, want);
        assert_eq!(scalar_inner_region(&net11(), 2).unwrap(), want);
    }

    #[test]
    fn non_minimal_rejected() {
        let n = Network::new(1, 2, [(2, vec![1]), (3, vec![2])], [(1, vec![3])]);
        assert_eq!(outer_region(&n), Err(BoundsError::NotMinimal));
    }

    #[test]
    fn binary_matroids_on_two_elements() {
        let m = matroid_ranks(2, 2).unwrap();
        let vals: BTreeSet<Vec<u8>> = m.iter().map(|r| r.values.clone()).collect();
        let want: BTreeSet<Vec<u8>> = [[0, 0, 0], [1, 0, 1], [0, 1, 1], [1, 1, 1], [1, 1, 2]]
            .iter()
            .map(|v| v.to_vec())
            .collect();
        assert_eq!(vals, want);
        assert_eq!(matroid_ranks(1, 2).unwrap().len(), 2);
    }

    #[test]
    fn tag_text() {
        for t in ["outer", "scalar-2", "vector-2-6", "ingleton"] {
            assert_eq!(t.parse::<BoundTag>().unwrap().to_string(), t);
        }
        assert!("vector-2".parse::<BoundTag>().is_err());
    }

    #[test]
    fn partitions_count() {
        // 3! S(4, 3) = 36
        assert_eq!(partitions(4, 3).len(), 36);
        assert_eq!(partitions(3, 3).len(), 6);
    }
}
