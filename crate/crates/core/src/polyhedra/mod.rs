//! Exact rational polyhedral cones over named coordinates.
//!
//! A [`Cone`] is `{x : a·x ≥ 0 for each inequality, a·x = 0 for each
//! equality}` with primitive integer rows. Generators come from the double
//! description method ([`dd`]); projections use Fourier–Motzkin elimination
//! or ray dropping; redundancy is removed either by exact LP tests or by
//! re-hulling the generators.

pub mod dd;
pub mod fm;
pub mod linalg;
pub mod lp;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub use dd::Generators;
use linalg::{dot, is_zero, primitive, primitive_signed, reduce_mod, rref, Vector};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PolyError {
    #[error("coordinate spaces differ: [{0}] vs [{1}]")]
    SpaceMismatch(String, String),
    #[error("unknown coordinate {0}")]
    UnknownCoord(String),
    #[error("duplicate coordinate {0}")]
    DuplicateCoord(String),
    #[error("row has {got} entries, space has {want}")]
    RowLength { got: usize, want: usize },
    #[error("H-rep parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Ordered, unique coordinate names.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CoordSpace {
    names: Vec<String>,
}

impl CoordSpace {
    pub fn new(names: Vec<String>) -> Result<CoordSpace, PolyError> {
        let mut seen = BTreeSet::new();
        for n in &names {
            if !seen.insert(n) {
                return Err(PolyError::DuplicateCoord(n.clone()));
            }
        }
        Ok(CoordSpace { names })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    fn index_or_err(&self, name: &str) -> Result<usize, PolyError> {
        self.index(name)
            .ok_or_else(|| PolyError::UnknownCoord(name.to_string()))
    }
}

impl fmt::Display for CoordSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.names.join(" "))
    }
}

/// Integer vector from small integers.
pub fn ivec(x: &[i64]) -> Vector {
    x.iter().map(|&a| BigInt::from(a)).collect()
}

/// A polyhedral cone in H-representation.
#[derive(Clone, Debug)]
pub struct Cone {
    space: CoordSpace,
    ineqs: Vec<Vector>,
    eqs: Vec<Vector>,
}

/// Which projection algorithm to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProjectStrategy {
    FourierMotzkin,
    Rays,
    /// Fourier–Motzkin when at most `threshold` coordinates are removed.
    Auto {
        threshold: usize,
    },
}

impl Cone {
    /// Builds a cone; rows are made primitive, zero rows and duplicates
    /// dropped.
    pub fn new(space: CoordSpace, ineqs: Vec<Vector>, eqs: Vec<Vector>) -> Result<Cone, PolyError> {
        let d = space.dim();
        for r in ineqs.iter().chain(&eqs) {
            if r.len() != d {
                return Err(PolyError::RowLength {
                    got: r.len(),
                    want: d,
                });
            }
        }
        Ok(Cone::from_rows(space, ineqs, eqs))
    }

    fn from_rows(space: CoordSpace, ineqs: Vec<Vector>, eqs: Vec<Vector>) -> Cone {
        let mut seen = BTreeSet::new();
        let ineqs = ineqs
            .into_iter()
            .filter(|r| !is_zero(r))
            .map(primitive)
            .filter(|r| seen.insert(r.clone()))
            .collect();
        let mut seen = BTreeSet::new();
        let eqs = eqs
            .into_iter()
            .filter(|r| !is_zero(r))
            .map(primitive_signed)
            .filter(|r| seen.insert(r.clone()))
            .collect();
        Cone { space, ineqs, eqs }
    }

    /// The whole space.
    pub fn full(space: CoordSpace) -> Cone {
        Cone {
            space,
            ineqs: Vec::new(),
            eqs: Vec::new(),
        }
    }

    /// The nonnegative orthant.
    pub fn orthant(space: CoordSpace) -> Cone {
        let d = space.dim();
        let ineqs = (0..d).map(|i| unit(d, i)).collect();
        Cone {
            space,
            ineqs,
            eqs: Vec::new(),
        }
    }

    pub fn space(&self) -> &CoordSpace {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn inequalities(&self) -> &[Vector] {
        &self.ineqs
    }

    pub fn equalities(&self) -> &[Vector] {
        &self.eqs
    }

    /// Adds rows.
    pub fn intersect(&self, ineqs: &[Vector], eqs: &[Vector]) -> Result<Cone, PolyError> {
        let mut i = self.ineqs.clone();
        i.extend_from_slice(ineqs);
        let mut e = self.eqs.clone();
        e.extend_from_slice(eqs);
        Cone::new(self.space.clone(), i, e)
    }

    /// Intersection with another cone over the same space.
    pub fn meet(&self, other: &Cone) -> Result<Cone, PolyError> {
        self.same_space(other)?;
        self.intersect(&other.ineqs, &other.eqs)
    }

    fn same_space(&self, other: &Cone) -> Result<(), PolyError> {
        if self.space != other.space {
            return Err(PolyError::SpaceMismatch(
                self.space.to_string(),
                other.space.to_string(),
            ));
        }
        Ok(())
    }

    /// Extreme rays (primitive, reduced modulo the lineality space, sorted)
    /// and a lineality basis in echelon form.
    pub fn generators(&self) -> Generators {
        let g = dd::generators(self.dim(), &self.ineqs, &self.eqs);
        let (lin, piv) = rref(&g.lineality, self.dim());
        let mut rays: Vec<Vector> = g
            .rays
            .iter()
            .map(|r| reduce_mod(r, &lin, &piv))
            .filter(|r| !is_zero(r))
            .collect();
        rays.sort();
        rays.dedup();
        Generators {
            rays,
            lineality: lin,
        }
    }

    pub fn extreme_rays(&self) -> Vec<Vector> {
        self.generators().rays
    }

    /// True when `x` satisfies every row.
    pub fn contains(&self, x: &[BigInt]) -> bool {
        self.ineqs.iter().all(|a| !dot(a, x).is_negative())
            && self.eqs.iter().all(|a| dot(a, x).is_zero())
    }

    /// True when the whole line through `x` lies in the cone.
    pub fn contains_line(&self, x: &[BigInt]) -> bool {
        self.ineqs
            .iter()
            .chain(&self.eqs)
            .all(|a| dot(a, x).is_zero())
    }

    /// `self ⊆ other`.
    pub fn is_subcone(&self, other: &Cone) -> Result<bool, PolyError> {
        Ok(self.subcone_witness(other)?.is_none())
    }

    /// A generator of `self` outside `other`, if any.
    pub fn subcone_witness(&self, other: &Cone) -> Result<Option<Vector>, PolyError> {
        self.same_space(other)?;
        let g = self.generators();
        for r in &g.rays {
            if !other.contains(r) {
                return Ok(Some(r.clone()));
            }
        }
        for l in &g.lineality {
            if !other.contains_line(l) {
                return Ok(Some(l.clone()));
            }
        }
        Ok(None)
    }

    pub fn cone_equal(&self, other: &Cone) -> Result<bool, PolyError> {
        Ok(self.is_subcone(other)? && other.is_subcone(self)?)
    }

    /// The cone generated by `rays` plus the span of `lineality`, with a
    /// minimal H-representation.
    pub fn conic_hull(space: CoordSpace, rays: &[Vector], lineality: &[Vector]) -> Cone {
        let d = space.dim();
        let polar = dd::generators(d, rays, lineality);
        let (eqs, piv) = rref(&polar.lineality, d);
        let mut ineqs: Vec<Vector> = polar
            .rays
            .iter()
            .map(|r| reduce_mod(r, &eqs, &piv))
            .filter(|r| !is_zero(r))
            .collect();
        ineqs.sort();
        ineqs.dedup();
        Cone { space, ineqs, eqs }
    }

    /// Irredundant H-representation in a canonical form (echelon
    /// equalities, facets reduced modulo equalities, sorted). Equal cones
    /// give identical forms.
    pub fn canonical(&self) -> Cone {
        let g = self.generators();
        Cone::conic_hull(self.space.clone(), &g.rays, &g.lineality)
    }

    /// Removes inequalities implied by the others, testing each one with
    /// an exact LP. Implicit equalities are kept as inequality pairs.
    pub fn remove_redundancy(&self) -> Cone {
        let d = self.dim();
        let mut keep: Vec<bool> = vec![true; self.ineqs.len()];
        for i in 0..self.ineqs.len() {
            let mut b = lp::Builder::new();
            let vars: Vec<usize> = (0..d).map(|_| b.var(true)).collect();
            let row = |a: &Vector| -> Vec<(usize, lp::Q)> {
                a.iter()
                    .enumerate()
                    .filter(|(_, x)| !x.is_zero())
                    .map(|(j, x)| (vars[j], BigRational::from_integer(x.clone())))
                    .collect()
            };
            for (j, a) in self.ineqs.iter().enumerate() {
                if j != i && keep[j] {
                    b.row(row(a), lp::Rel::Ge, lp::Q::zero());
                }
            }
            for a in &self.eqs {
                b.row(row(a), lp::Rel::Eq, lp::Q::zero());
            }
            b.row(row(&self.ineqs[i]), lp::Rel::Ge, -lp::Q::one());
            let mut s = b.build();
            if let lp::Outcome::Optimal(v, _) = s.minimize(&row(&self.ineqs[i])) {
                if !v.is_negative() {
                    keep[i] = false;
                }
            }
        }
        let ineqs = self
            .ineqs
            .iter()
            .zip(&keep)
            .filter(|(_, k)| **k)
            .map(|(a, _)| a.clone())
            .collect();
        let (eqs, _) = rref(&self.eqs, d);
        Cone {
            space: self.space.clone(),
            ineqs,
            eqs,
        }
    }

    /// Keeps the named coordinates (in the given order) and projects the
    /// rest away.
    pub fn project(&self, keep: &[&str], strategy: ProjectStrategy) -> Result<Cone, PolyError> {
        let idx: Vec<usize> = keep
            .iter()
            .map(|n| self.space.index_or_err(n))
            .collect::<Result<_, _>>()?;
        let drop: Vec<usize> = (0..self.dim()).filter(|i| !idx.contains(i)).collect();
        let use_fm = match strategy {
            ProjectStrategy::FourierMotzkin => true,
            ProjectStrategy::Rays => false,
            ProjectStrategy::Auto { threshold } => drop.len() <= threshold,
        };
        let space = CoordSpace::new(keep.iter().map(|s| s.to_string()).collect())?;
        if use_fm {
            let mut rows: Vec<(Vector, fm::History)> = self
                .ineqs
                .iter()
                .enumerate()
                .map(|(i, a)| (a.clone(), fm::History::from([i])))
                .collect();
            let mut eqs = self.eqs.clone();
            let mut cols: Vec<usize> = (0..self.dim()).collect();
            let mut step = 0;
            for &j in drop.iter().rev() {
                let pos = cols.iter().position(|&c| c == j).unwrap();
                let (r2, e2) = fm::eliminate_tracked(&rows, &eqs, pos, step + 2);
                rows = r2;
                eqs = e2;
                cols.remove(pos);
                step += 1;
                if rows.len() > 2 * cols.len() + 8 {
                    (rows, eqs) = Self::prune(&rows, &eqs, cols.len());
                    step = 0;
                }
            }
            let ineqs: Vec<Vector> = rows.into_iter().map(|(a, _)| a).collect();
            // reorder to `keep`
            let order: Vec<usize> = idx
                .iter()
                .map(|c| cols.iter().position(|x| x == c).unwrap())
                .collect();
            let pick = |r: &Vector| order.iter().map(|&p| r[p].clone()).collect::<Vector>();
            let c = Cone::from_rows(
                space,
                ineqs.iter().map(pick).collect(),
                eqs.iter().map(pick).collect(),
            );
            Ok(c.canonical())
        } else {
            let g = dd::generators(self.dim(), &self.ineqs, &self.eqs);
            let pick = |r: &Vector| idx.iter().map(|&p| r[p].clone()).collect::<Vector>();
            let rays: Vec<Vector> = g.rays.iter().map(pick).filter(|r| !is_zero(r)).collect();
            let lin: Vec<Vector> = g
                .lineality
                .iter()
                .map(pick)
                .filter(|r| !is_zero(r))
                .collect();
            Ok(Cone::conic_hull(space, &rays, &lin))
        }
    }

    /// Replaces a grown system by its facets. Histories restart, so the
    /// caller's step count must restart too.
    fn prune(
        rows: &[(Vector, fm::History)],
        eqs: &[Vector],
        dim: usize,
    ) -> (Vec<(Vector, fm::History)>, Vec<Vector>) {
        let space =
            CoordSpace::new((0..dim).map(|i| format!("c{i}")).collect()).expect("distinct names");
        let ineqs = rows.iter().map(|(a, _)| a.clone()).collect();
        let c = Cone {
            space,
            ineqs,
            eqs: eqs.to_vec(),
        }
        .canonical();
        let rows = c
            .ineqs
            .into_iter()
            .enumerate()
            .map(|(i, a)| (a, fm::History::from([i])))
            .collect();
        (rows, c.eqs)
    }

    /// Projection with the default strategy.
    pub fn project_auto(&self, keep: &[&str]) -> Result<Cone, PolyError> {
        self.project(keep, ProjectStrategy::Auto { threshold: 2 })
    }

    /// Removes coordinate `name` after fixing it to zero.
    pub fn slice_zero(&self, name: &str) -> Result<Cone, PolyError> {
        let j = self.space.index_or_err(name)?;
        let mut names = self.space.names.clone();
        names.remove(j);
        let cut = |r: &Vector| {
            let mut r = r.clone();
            r.remove(j);
            r
        };
        Ok(Cone::from_rows(
            CoordSpace { names },
            self.ineqs.iter().map(cut).collect(),
            self.eqs.iter().map(cut).collect(),
        ))
    }

    /// Reorders (and possibly renames) coordinates: new coordinate `i` is
    /// old coordinate `from[i]`, called `to[i]`. `from` must list every
    /// coordinate exactly once.
    pub fn relabel(&self, from: &[&str], to: &[String]) -> Result<Cone, PolyError> {
        let idx: Vec<usize> = from
            .iter()
            .map(|n| self.space.index_or_err(n))
            .collect::<Result<_, _>>()?;
        if idx.len() != self.dim() || idx.iter().collect::<BTreeSet<_>>().len() != idx.len() {
            return Err(PolyError::SpaceMismatch(
                self.space.to_string(),
                from.join(" "),
            ));
        }
        let space = CoordSpace::new(to.to_vec())?;
        let pick = |r: &Vector| idx.iter().map(|&p| r[p].clone()).collect::<Vector>();
        Ok(Cone::from_rows(
            space,
            self.ineqs.iter().map(pick).collect(),
            self.eqs.iter().map(pick).collect(),
        ))
    }

    /// Reorders coordinates to `order` (same names).
    pub fn reorder(&self, order: &[String]) -> Result<Cone, PolyError> {
        let from: Vec<&str> = order.iter().map(|s| s.as_str()).collect();
        self.relabel(&from, order)
    }

    /// Appends a new coordinate that no row mentions.
    pub fn add_coord(&self, name: &str) -> Result<Cone, PolyError> {
        let mut names = self.space.names.clone();
        names.push(name.to_string());
        let space = CoordSpace::new(names)?;
        let ext = |r: &Vector| {
            let mut r = r.clone();
            r.push(BigInt::zero());
            r
        };
        Ok(Cone {
            space,
            ineqs: self.ineqs.iter().map(ext).collect(),
            eqs: self.eqs.iter().map(ext).collect(),
        })
    }

    /// Row with coefficient `c` at each named coordinate.
    pub fn form(&self, terms: &[(&str, i64)]) -> Result<Vector, PolyError> {
        let mut r = vec![BigInt::zero(); self.dim()];
        for (n, c) in terms {
            r[self.space.index_or_err(n)?] += BigInt::from(*c);
        }
        Ok(r)
    }

    /// Substitutes `x ↦ x + y` for a new coordinate `y`: the result holds
    /// `(…, x, y)` exactly when `(…, x + y)` is in `self`.
    pub fn split_coord(&self, x: &str, y: &str) -> Result<Cone, PolyError> {
        let j = self.space.index_or_err(x)?;
        let mut c = self.add_coord(y)?;
        let last = c.dim() - 1;
        for r in c.ineqs.iter_mut().chain(c.eqs.iter_mut()) {
            r[last] = r[j].clone();
        }
        Ok(c)
    }

    /// Replaces `y` by `x` everywhere (the slice `y = x`) and drops `y`.
    pub fn identify(&self, x: &str, y: &str) -> Result<Cone, PolyError> {
        let jx = self.space.index_or_err(x)?;
        let jy = self.space.index_or_err(y)?;
        let mut c = self.clone();
        for r in c.ineqs.iter_mut().chain(c.eqs.iter_mut()) {
            let v = r[jy].clone();
            r[jx] += v;
            r[jy] = BigInt::zero();
        }
        let c = Cone::from_rows(c.space, c.ineqs, c.eqs);
        c.slice_zero(y)
    }

    /// Cartesian product; the spaces must not share names.
    pub fn product(&self, other: &Cone) -> Result<Cone, PolyError> {
        let mut names = self.space.names.clone();
        names.extend(other.space.names.iter().cloned());
        let space = CoordSpace::new(names)?;
        let (d1, d2) = (self.dim(), other.dim());
        let left = |r: &Vector| {
            let mut r = r.clone();
            r.extend(std::iter::repeat_n(BigInt::zero(), d2));
            r
        };
        let right = |r: &Vector| {
            let mut v = vec![BigInt::zero(); d1];
            v.extend(r.iter().cloned());
            v
        };
        let mut ineqs: Vec<Vector> = self.ineqs.iter().map(left).collect();
        ineqs.extend(other.ineqs.iter().map(right));
        let mut eqs: Vec<Vector> = self.eqs.iter().map(left).collect();
        eqs.extend(other.eqs.iter().map(right));
        Ok(Cone { space, ineqs, eqs })
    }

    /// H-representation text: a header of coordinate names, then one row
    /// per line, `>= 0` or `= 0`.
    pub fn render_hrep(&self) -> String {
        let mut s = self.space.names.join(" ");
        s.push('\n');
        for (rows, rel) in [(&self.eqs, "="), (&self.ineqs, ">=")] {
            for r in rows.iter() {
                let parts: Vec<String> = r.iter().map(|x| x.to_string()).collect();
                s.push_str(&format!("{} {} 0\n", parts.join(" "), rel));
            }
        }
        s
    }

    pub fn parse_hrep(text: &str) -> Result<Cone, PolyError> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or(PolyError::Parse {
            line: 1,
            msg: "missing header".into(),
        })?;
        let space = CoordSpace::new(header.split_whitespace().map(String::from).collect())?;
        let d = space.dim();
        let mut ineqs = Vec::new();
        let mut eqs = Vec::new();
        for (ln, l) in lines {
            let err = |msg: &str| PolyError::Parse {
                line: ln + 1,
                msg: msg.to_string(),
            };
            let toks: Vec<&str> = l.split_whitespace().collect();
            if toks.len() != d + 2 || toks[d + 1] != "0" {
                return Err(err("expected coefficients, relation, 0"));
            }
            let row: Vector = toks[..d]
                .iter()
                .map(|t| t.parse::<BigInt>().map_err(|_| err("bad integer")))
                .collect::<Result<_, _>>()?;
            match toks[d] {
                ">=" => ineqs.push(row),
                "=" => eqs.push(row),
                _ => return Err(err("relation must be >= or =")),
            }
        }
        Cone::new(space, ineqs, eqs)
    }
}

impl PartialEq for Cone {
    /// Exact set equality (spaces must match).
    fn eq(&self, other: &Self) -> bool {
        self.cone_equal(other).unwrap_or(false)
    }
}

fn unit(d: usize, i: usize) -> Vector {
    let mut v = vec![BigInt::zero(); d];
    v[i] = BigInt::one();
    v
}

/// Computes `{y ≥ 0 : …}` from an optimization oracle.
///
/// The target is a pointed cone `P` inside the nonnegative orthant of
/// `space`. `oracle(c)` must minimize `c·y` over `P ∩ {Σ y = 1}`, returning
/// the value and an optimal vertex, or `None` if that slice is empty. First
/// the linear hull is found by probing directions orthogonal to the points
/// found so far; then facets of the current inner hull are checked one at a
/// time, each either confirmed or cut by a new vertex.
pub fn hull_from_oracle<F>(space: CoordSpace, mut oracle: F) -> Cone
where
    F: FnMut(&[BigInt]) -> Option<(BigRational, Vec<BigRational>)>,
{
    let d = space.dim();
    let zero = vec![BigInt::zero(); d];
    let Some((_, p0)) = oracle(&zero) else {
        let eqs = (0..d).map(|i| unit(d, i)).collect();
        return Cone {
            space,
            ineqs: Vec::new(),
            eqs,
        };
    };
    let mut pts: Vec<Vector> = vec![linalg::rational_to_integer(&p0)];
    'span: loop {
        let comp = linalg::nullspace(&pts, d);
        for c in &comp {
            for c in [c.clone(), c.iter().map(|x| -x).collect::<Vector>()] {
                if let Some((v, p)) = oracle(&c) {
                    if v.is_negative() {
                        pts.push(linalg::rational_to_integer(&p));
                        continue 'span;
                    }
                }
            }
        }
        break;
    }
    let mut confirmed: BTreeSet<Vector> = BTreeSet::new();
    loop {
        let hull = Cone::conic_hull(space.clone(), &pts, &[]);
        let open: Vec<Vector> = hull
            .ineqs
            .iter()
            .filter(|f| !confirmed.contains(*f))
            .cloned()
            .collect();
        if open.is_empty() {
            return hull;
        }
        let mut grew = false;
        for f in open {
            match oracle(&f) {
                Some((v, p)) if v.is_negative() => {
                    pts.push(linalg::rational_to_integer(&p));
                    grew = true;
                    break;
                }
                _ => {
                    confirmed.insert(f);
                }
            }
        }
        if !grew {
            return Cone::conic_hull(space, &pts, &[]);
        }
    }
}

/// Convenience: a cone from named terms, e.g. `[("r2", 1), ("w1", -1)]`.
pub fn cone_from_terms(
    names: &[&str],
    ineqs: &[&[(&str, i64)]],
    eqs: &[&[(&str, i64)]],
) -> Result<Cone, PolyError> {
    let space = CoordSpace::new(names.iter().map(|s| s.to_string()).collect())?;
    let full = Cone::full(space.clone());
    let i = ineqs
        .iter()
        .map(|t| full.form(t))
        .collect::<Result<Vec<_>, _>>()?;
    let e = eqs
        .iter()
        .map(|t| full.form(t))
        .collect::<Result<Vec<_>, _>>()?;
    Cone::new(space, i, e)
}

/// Named-coordinate view of a vector, for messages.
pub fn describe(space: &CoordSpace, v: &[BigInt]) -> String {
    let m: BTreeMap<&str, String> = space
        .names
        .iter()
        .zip(v)
        .filter(|(_, x)| !x.is_zero())
        .map(|(n, x)| (n.as_str(), x.to_string()))
        .collect();
    format!("{m:?}")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sp(names: &[&str]) -> CoordSpace {
        CoordSpace::new(names.iter().map(|s| s.to_string()).collect()).unwrap()
    }

    #[test]
    fn orthant_meets_diagonal() {
        let c = Cone::orthant(sp(&["x", "y"]))
            .intersect(&[], &[ivec(&[1, -1])])
            .unwrap();
        assert_eq!(c.extreme_rays(), vec![ivec(&[1, 1])]);
    }

    #[test]
    fn gamma2_rays() {
        // h1, h2, h12: h12 - h1 ≥ 0, h12 - h2 ≥ 0, h1 + h2 - h12 ≥ 0
        let c = Cone::new(
            sp(&["h1", "h2", "h12"]),
            vec![ivec(&[-1, 0, 1]), ivec(&[0, -1, 1]), ivec(&[1, 1, -1])],
            vec![],
        )
        .unwrap();
        assert_eq!(
            c.extreme_rays(),
            vec![ivec(&[0, 1, 1]), ivec(&[1, 0, 1]), ivec(&[1, 1, 1])]
        );
        let ind = c.intersect(&[], &[ivec(&[1, 1, -1])]).unwrap();
        assert_eq!(ind.extreme_rays(), vec![ivec(&[0, 1, 1]), ivec(&[1, 0, 1])]);
        let back = Cone::conic_hull(c.space().clone(), &c.extreme_rays(), &[]);
        assert_eq!(back.inequalities().len(), 3);
        assert!(back.cone_equal(&c).unwrap());
    }

    #[test]
    fn one_ray_hull_is_a_line_of_equalities() {
        let c = Cone::conic_hull(sp(&["x", "y", "z"]), &[ivec(&[1, 2, 0])], &[]);
        assert_eq!(c.equalities().len(), 2);
        assert_eq!(c.inequalities().len(), 1);
    }

    #[test]
    fn redundancy_removed() {
        let c = Cone::new(
            sp(&["x", "y"]),
            vec![ivec(&[1, 0]), ivec(&[0, 1]), ivec(&[1, 1]), ivec(&[2, 0])],
            vec![],
        )
        .unwrap();
        let r = c.remove_redundancy();
        assert_eq!(r.inequalities().len(), 2);
        assert!(r.cone_equal(&c).unwrap());
    }

    #[test]
    fn projection_of_sum() {
        let c = Cone::new(
            sp(&["x", "y", "z"]),
            vec![ivec(&[1, 0, 0]), ivec(&[0, 1, 0])],
            vec![ivec(&[1, 1, -1])],
        )
        .unwrap();
        for s in [ProjectStrategy::FourierMotzkin, ProjectStrategy::Rays] {
            let p = c.project(&["x", "y"], s).unwrap();
            assert!(p.cone_equal(&Cone::orthant(sp(&["x", "y"]))).unwrap());
        }
    }

    #[test]
    fn inequality_witness() {
        let o = Cone::orthant(sp(&["x", "y"]));
        let cut = o.intersect(&[ivec(&[-1, 2])], &[]).unwrap();
        assert!(!o.cone_equal(&cut).unwrap());
        assert_eq!(o.subcone_witness(&cut).unwrap(), Some(ivec(&[1, 0])));
    }

    #[test]
    fn hrep_text_round_trip() {
        let c = cone_from_terms(
            &["w1", "r2"],
            &[&[("r2", 1), ("w1", -1)], &[("w1", 1)]],
            &[],
        )
        .unwrap();
        let t = c.render_hrep();
        assert_eq!(t, "w1 r2\n-1 1 >= 0\n1 0 >= 0\n");
        assert!(Cone::parse_hrep(&t).unwrap().cone_equal(&c).unwrap());
    }

    #[test]
    fn split_and_identify() {
        // {r ≥ w} with r ↦ r + s is {r + s ≥ w}; identifying s with r gives {2r ≥ w}
        let c = cone_from_terms(&["w", "r"], &[&[("r", 1), ("w", -1)]], &[]).unwrap();
        let s = c.split_coord("r", "s").unwrap();
        assert_eq!(s.inequalities(), &[ivec(&[-1, 1, 1])]);
        let i = s.identify("r", "s").unwrap();
        assert_eq!(i.inequalities(), &[ivec(&[-1, 2])]);
    }
}
