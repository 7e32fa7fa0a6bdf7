//! Double description: generators of `{x : A x ≥ 0, E x = 0}`.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::linalg::{combine, dot, nullspace, primitive, Vector};

/// Extreme rays and a lineality basis.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Generators {
    pub rays: Vec<Vector>,
    pub lineality: Vec<Vector>,
}

#[derive(Clone)]
struct Ray {
    v: Vector,
    /// Processed inequalities tight at this ray, as a bitset.
    zeros: Vec<u64>,
}

fn bit_set(z: &mut [u64], i: usize) {
    z[i / 64] |= 1 << (i % 64);
}

fn subset(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x & !y == 0)
}

fn popcount(a: &[u64]) -> u32 {
    a.iter().map(|x| x.count_ones()).sum()
}

/// Generators of the cone cut out by `ineqs` (rows `a`, meaning `a·x ≥ 0`)
/// and `eqs` (`a·x = 0`) in dimension `dim`.
pub fn generators(dim: usize, ineqs: &[Vector], eqs: &[Vector]) -> Generators {
    let mut lin: Vec<Vector> = if eqs.is_empty() {
        (0..dim)
            .map(|i| {
                let mut v = vec![BigInt::zero(); dim];
                v[i] = BigInt::from(1);
                v
            })
            .collect()
    } else {
        nullspace(eqs, dim)
    };
    let space_dim = lin.len();
    let words = ineqs.len().div_ceil(64).max(1);
    let mut rays: Vec<Ray> = Vec::new();

    for (ci, a) in ineqs.iter().enumerate() {
        if let Some(pos) = lin.iter().position(|l| !dot(a, l).is_zero()) {
            let mut l = lin.swap_remove(pos);
            let mut al = dot(a, &l);
            if al.is_negative() {
                l = l.iter().map(|x| -x).collect();
                al = -al;
            }
            for l2 in lin.iter_mut() {
                let a2 = dot(a, l2);
                if !a2.is_zero() {
                    *l2 = combine(&al, l2, &-a2, &l);
                }
            }
            for r in rays.iter_mut() {
                let ar = dot(a, &r.v);
                if !ar.is_zero() {
                    r.v = combine(&al, &r.v, &-ar, &l);
                }
                bit_set(&mut r.zeros, ci);
            }
            let mut zeros = vec![0u64; words];
            for j in 0..ci {
                bit_set(&mut zeros, j);
            }
            rays.push(Ray {
                v: primitive(l),
                zeros,
            });
            continue;
        }

        let vals: Vec<BigInt> = rays.iter().map(|r| dot(a, &r.v)).collect();
        if vals.iter().all(|x| !x.is_negative()) {
            for (r, x) in rays.iter_mut().zip(&vals) {
                if x.is_zero() {
                    bit_set(&mut r.zeros, ci);
                }
            }
            continue;
        }
        let pointed_dim = space_dim - lin.len();
        let need = pointed_dim.saturating_sub(2) as u32;
        let pos: Vec<usize> = (0..rays.len()).filter(|&i| vals[i].is_positive()).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&i| vals[i].is_negative()).collect();
        let mut fresh = Vec::new();
        let mut common = vec![0u64; words];
        for &p in &pos {
            for &n in &neg {
                for (c, (x, y)) in common
                    .iter_mut()
                    .zip(rays[p].zeros.iter().zip(&rays[n].zeros))
                {
                    *c = x & y;
                }
                if popcount(&common) < need {
                    continue;
                }
                let adjacent = rays
                    .iter()
                    .enumerate()
                    .all(|(i, r)| i == p || i == n || !subset(&common, &r.zeros));
                if !adjacent {
                    continue;
                }
                let v = combine(&vals[p], &rays[n].v, &-&vals[n], &rays[p].v);
                let mut zeros = common.clone();
                bit_set(&mut zeros, ci);
                fresh.push(Ray { v, zeros });
            }
        }
        let mut next = Vec::with_capacity(pos.len() + fresh.len());
        for (i, mut r) in rays.into_iter().enumerate() {
            if vals[i].is_negative() {
                continue;
            }
            if vals[i].is_zero() {
                bit_set(&mut r.zeros, ci);
            }
            next.push(r);
        }
        next.extend(fresh);
        rays = next;
    }

    Generators {
        rays: rays.into_iter().map(|r| r.v).collect(),
        lineality: lin,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[i64]) -> Vector {
        x.iter().map(|&a| BigInt::from(a)).collect()
    }

    #[test]
    fn orthant() {
        let g = generators(3, &[v(&[1, 0, 0]), v(&[0, 1, 0]), v(&[0, 0, 1])], &[]);
        assert!(g.lineality.is_empty());
        let mut r = g.rays;
        r.sort();
        assert_eq!(r, vec![v(&[0, 0, 1]), v(&[0, 1, 0]), v(&[1, 0, 0])]);
    }

    #[test]
    fn half_plane_has_a_line() {
        let g = generators(2, &[v(&[1, 0])], &[]);
        assert_eq!(g.rays, vec![v(&[1, 0])]);
        assert_eq!(g.lineality.len(), 1);
    }

    #[test]
    fn square_pyramid_rays() {
        // x ≤ z, -x ≤ z, y ≤ z, -y ≤ z in 3D: four rays (±1, ±1, 1)
        let g = generators(
            3,
            &[v(&[-1, 0, 1]), v(&[1, 0, 1]), v(&[0, -1, 1]), v(&[0, 1, 1])],
            &[],
        );
        assert_eq!(g.rays.len(), 4);
        for r in &g.rays {
            assert_eq!(r[2], BigInt::from(1));
        }
    }
}
