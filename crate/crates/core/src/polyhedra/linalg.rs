//! Exact integer and rational vector helpers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Vector = Vec<BigInt>;

pub fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    let mut s = BigInt::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            s += x * y;
        }
    }
    s
}

pub fn is_zero(v: &[BigInt]) -> bool {
    v.iter().all(Zero::is_zero)
}

/// Divides by the gcd of the entries. Sign is kept.
pub fn primitive(mut v: Vector) -> Vector {
    let mut g = BigInt::zero();
    for x in &v {
        if !x.is_zero() {
            g = g.gcd(x);
            if g.is_one() {
                return v;
            }
        }
    }
    if !g.is_zero() && !g.is_one() {
        for x in v.iter_mut() {
            *x /= &g;
        }
    }
    v
}

/// Primitive with the first nonzero entry positive.
pub fn primitive_signed(v: Vector) -> Vector {
    let mut v = primitive(v);
    if let Some(x) = v.iter().find(|x| !x.is_zero()) {
        if x.is_negative() {
            for y in v.iter_mut() {
                *y = -&*y;
            }
        }
    }
    v
}

/// `a·x + b·y`, made primitive.
pub fn combine(a: &BigInt, x: &[BigInt], b: &BigInt, y: &[BigInt]) -> Vector {
    primitive(x.iter().zip(y).map(|(p, q)| a * p + b * q).collect())
}

/// Scales a rational vector to a primitive integer vector of the same
/// direction.
pub fn rational_to_integer(v: &[BigRational]) -> Vector {
    let mut l = BigInt::one();
    for x in v {
        l = l.lcm(x.denom());
    }
    primitive(
        v.iter()
            .map(|x| (x * BigRational::from_integer(l.clone())).to_integer())
            .collect(),
    )
}

pub fn to_rational(v: &[BigInt]) -> Vec<BigRational> {
    v.iter()
        .map(|x| BigRational::from_integer(x.clone()))
        .collect()
}

/// Reduced row echelon form of integer rows. Returns primitive integer rows
/// (each pivot positive, zero above and below every pivot) and their pivot
/// columns. Zero rows are dropped.
pub fn rref(rows: &[Vector], dim: usize) -> (Vec<Vector>, Vec<usize>) {
    let mut m: Vec<Vec<BigRational>> = rows.iter().map(|r| to_rational(r)).collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..dim {
        if r >= m.len() {
            break;
        }
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    if !y.is_zero() {
                        *x -= &f * y;
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    m.truncate(r);
    let out = m.iter().map(|row| rational_to_integer(row)).collect();
    (out, pivots)
}

pub fn rank(rows: &[Vector], dim: usize) -> usize {
    rref(rows, dim).1.len()
}

/// Integer basis of `{x : row·x = 0 for every row}`.
pub fn nullspace(rows: &[Vector], dim: usize) -> Vec<Vector> {
    let (r, pivots) = rref(rows, dim);
    let mut out = Vec::new();
    for f in 0..dim {
        if pivots.contains(&f) {
            continue;
        }
        // x_f = 1, x_pivot = -row[f]/row[pivot]
        let mut v = vec![BigRational::zero(); dim];
        v[f] = BigRational::one();
        for (row, &p) in r.iter().zip(&pivots) {
            if !row[f].is_zero() {
                v[p] = -BigRational::new(row[f].clone(), row[p].clone());
            }
        }
        out.push(rational_to_integer(&v));
    }
    out
}

/// Reduces `v` modulo the row space of `basis`, which must be in the form
/// returned by [`rref`]. The result has zeros in every pivot column and is
/// primitive. Positive multiples of `v` are used, so inequality direction is
/// kept when `basis` spans equalities.
pub fn reduce_mod(v: &[BigInt], basis: &[Vector], pivots: &[usize]) -> Vector {
    let mut v = v.to_vec();
    for (row, &p) in basis.iter().zip(pivots) {
        if !v[p].is_zero() {
            // row[p] > 0
            let f = v[p].clone();
            v = combine(&row[p], &v, &-f, row);
        }
    }
    primitive(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[i64]) -> Vector {
        x.iter().map(|&a| BigInt::from(a)).collect()
    }

    #[test]
    fn nullspace_of_one_row() {
        let ns = nullspace(&[v(&[1, 1, -1])], 3);
        assert_eq!(ns.len(), 2);
        for n in &ns {
            assert!(dot(n, &v(&[1, 1, -1])).is_zero());
        }
    }

    #[test]
    fn rref_is_integer_and_primitive() {
        let (r, p) = rref(&[v(&[2, 4, 6]), v(&[1, 1, 1])], 3);
        assert_eq!(p, vec![0, 1]);
        assert_eq!(r[0], v(&[1, 0, -1]));
        assert_eq!(r[1], v(&[0, 1, 2]));
    }
}
