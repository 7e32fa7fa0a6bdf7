//! Fourier–Motzkin elimination of one coordinate.

use std::collections::BTreeSet;

use num_traits::{Signed, Zero};

use super::linalg::{combine, is_zero, primitive, primitive_signed, Vector};

/// Original inequalities a derived row is a nonnegative combination of.
pub type History = BTreeSet<usize>;

/// Eliminates column `j` from `{A x ≥ 0, E x = 0}`; the returned rows no
/// longer have column `j`. An equality touching `j` is used as a
/// substitution. Otherwise positive and negative inequalities are paired
/// under Chernikov's rule: a row whose history has more than
/// `max_history` members is implied by the others and dropped. Other
/// redundancy is left to the caller.
pub fn eliminate_tracked(
    ineqs: &[(Vector, History)],
    eqs: &[Vector],
    j: usize,
    max_history: usize,
) -> (Vec<(Vector, History)>, Vec<Vector>) {
    let cut = |mut r: Vector| {
        r.remove(j);
        r
    };
    let mut out: Vec<(Vector, History)> = Vec::new();
    if let Some(p) = eqs.iter().position(|e| !e[j].is_zero()) {
        let mut e = eqs[p].clone();
        if e[j].is_negative() {
            e = e.iter().map(|x| -x).collect();
        }
        let ej = e[j].clone();
        let sub = |r: &Vector| -> Vector {
            if r[j].is_zero() {
                r.clone()
            } else {
                combine(&ej, r, &-&r[j], &e)
            }
        };
        for (a, h) in ineqs {
            out.push((cut(sub(a)), h.clone()));
        }
        let eqs = dedup(
            eqs.iter()
                .enumerate()
                .filter(|(i, _)| *i != p)
                .map(|(_, r)| cut(sub(r)))
                .collect(),
            true,
        );
        return (dedup_tracked(out), eqs);
    }
    for (a, h) in ineqs.iter().filter(|(a, _)| a[j].is_zero()) {
        out.push((cut(a.clone()), h.clone()));
    }
    let pos: Vec<&(Vector, History)> = ineqs.iter().filter(|(a, _)| a[j].is_positive()).collect();
    let neg: Vec<&(Vector, History)> = ineqs.iter().filter(|(a, _)| a[j].is_negative()).collect();
    for (p, hp) in &pos {
        for (n, hn) in &neg {
            let h: History = hp.union(hn).copied().collect();
            if h.len() <= max_history {
                out.push((cut(combine(&-&n[j], p, &p[j], n)), h));
            }
        }
    }
    let eqs = eqs.iter().map(|e| cut(e.clone())).collect();
    (dedup_tracked(out), dedup(eqs, true))
}

fn dedup_tracked(rows: Vec<(Vector, History)>) -> Vec<(Vector, History)> {
    let mut seen = BTreeSet::new();
    rows.into_iter()
        .filter(|(r, _)| !is_zero(r))
        .map(|(r, h)| (primitive(r), h))
        .filter(|(r, _)| seen.insert(r.clone()))
        .collect()
}

fn dedup(rows: Vec<Vector>, signless: bool) -> Vec<Vector> {
    let mut seen = BTreeSet::new();
    rows.into_iter()
        .filter(|r| !is_zero(r))
        .map(|r| {
            if signless {
                primitive_signed(r)
            } else {
                primitive(r)
            }
        })
        .filter(|r| seen.insert(r.clone()))
        .collect()
}
