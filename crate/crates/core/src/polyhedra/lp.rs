//! Exact rational simplex (dense tableau, Bland's rule).
//!
//! Used for redundancy tests and for the facet oracle behind projections
//! of large cones. Not exposed as a general LP interface.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Q = BigRational;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rel {
    Ge,
    Le,
    Eq,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Outcome {
    /// Optimal value and a primal solution in the builder's variables.
    Optimal(Q, Vec<Q>),
    Unbounded,
    Infeasible,
}

/// Sparse left side, relation, right side.
type Row = (Vec<(usize, Q)>, Rel, Q);

/// Rows and variable signs of a linear program.
#[derive(Clone, Debug, Default)]
pub struct Builder {
    nvars: usize,
    free: Vec<bool>,
    rows: Vec<Row>,
}

impl Builder {
    pub fn new() -> Builder {
        Builder::default()
    }

    /// Adds a variable, nonnegative unless `free`.
    pub fn var(&mut self, free: bool) -> usize {
        self.free.push(free);
        self.nvars += 1;
        self.nvars - 1
    }

    pub fn row(&mut self, coeffs: Vec<(usize, Q)>, rel: Rel, rhs: Q) {
        self.rows.push((coeffs, rel, rhs));
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Runs phase one. The returned solver can optimize any number of
    /// objectives over the same feasible set, each starting from the last
    /// optimal basis.
    pub fn build(self) -> Solver {
        // column layout: for each var one column (two if free), then slacks
        let mut col_of = Vec::with_capacity(self.nvars);
        let mut ncols = 0;
        for &f in &self.free {
            col_of.push(ncols);
            ncols += if f { 2 } else { 1 };
        }
        let nslack = self.rows.iter().filter(|r| r.1 != Rel::Eq).count();
        let structural = ncols + nslack;
        let m = self.rows.len();
        let width = structural + m + 1;
        let mut tab = vec![vec![Q::zero(); width]; m];
        let mut slack = ncols;
        for (i, (coeffs, rel, rhs)) in self.rows.iter().enumerate() {
            let row = &mut tab[i];
            for (v, c) in coeffs {
                let col = col_of[*v];
                row[col] += c;
                if self.free[*v] {
                    row[col + 1] -= c;
                }
            }
            match rel {
                Rel::Ge => {
                    row[slack] = -Q::one();
                    slack += 1;
                }
                Rel::Le => {
                    row[slack] = Q::one();
                    slack += 1;
                }
                Rel::Eq => {}
            }
            row[width - 1] = rhs.clone();
            if rhs.is_negative() {
                for x in row.iter_mut() {
                    *x = -&*x;
                }
            }
            row[structural + i] = Q::one();
        }
        let basis: Vec<usize> = (structural..structural + m).collect();
        let mut s = Solver {
            tab,
            obj: vec![Q::zero(); width],
            basis,
            structural,
            width,
            col_of,
            free: self.free,
            feasible: false,
        };
        s.phase_one();
        s
    }
}

pub struct Solver {
    tab: Vec<Vec<Q>>,
    /// Reduced costs; last entry is minus the objective value.
    obj: Vec<Q>,
    basis: Vec<usize>,
    structural: usize,
    width: usize,
    col_of: Vec<usize>,
    free: Vec<bool>,
    feasible: bool,
}

impl Solver {
    pub fn is_feasible(&self) -> bool {
        self.feasible
    }

    fn rhs(&self) -> usize {
        self.width - 1
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let rhs = self.rhs();
        let inv = self.tab[r][c].recip();
        for x in self.tab[r].iter_mut() {
            if !x.is_zero() {
                *x *= &inv;
            }
        }
        let nz: Vec<usize> = (0..=rhs).filter(|&j| !self.tab[r][j].is_zero()).collect();
        let prow = std::mem::take(&mut self.tab[r]);
        for (i, row) in self.tab.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for &j in &nz {
                row[j] -= &f * &prow[j];
            }
        }
        if !self.obj[c].is_zero() {
            let f = self.obj[c].clone();
            for &j in &nz {
                self.obj[j] -= &f * &prow[j];
            }
        }
        self.tab[r] = prow;
        self.basis[r] = c;
    }

    /// Bland's rule iterations over columns `< limit`. Returns false when
    /// unbounded.
    fn iterate(&mut self, limit: usize) -> bool {
        let rhs = self.rhs();
        loop {
            let Some(c) = (0..limit).find(|&j| self.obj[j].is_negative()) else {
                return true;
            };
            let mut best: Option<(usize, Q)> = None;
            for (i, row) in self.tab.iter().enumerate() {
                if row[c].is_positive() {
                    let ratio = &row[rhs] / &row[c];
                    let take = match &best {
                        None => true,
                        Some((bi, br)) => {
                            ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi])
                        }
                    };
                    if take {
                        best = Some((i, ratio));
                    }
                }
            }
            match best {
                None => return false,
                Some((r, _)) => self.pivot(r, c),
            }
        }
    }

    fn phase_one(&mut self) {
        let rhs = self.rhs();
        let m = self.tab.len();
        // minimize the sum of artificials
        self.obj = vec![Q::zero(); self.width];
        for j in self.structural..self.structural + m {
            self.obj[j] = Q::one();
        }
        for row in &self.tab {
            for (o, x) in self.obj.iter_mut().zip(row) {
                if !x.is_zero() {
                    *o -= x;
                }
            }
        }
        self.iterate(self.structural + m);
        if !self.obj[rhs].is_zero() {
            self.feasible = false;
            return;
        }
        self.feasible = true;
        // drive artificials out of the basis; drop redundant rows
        let mut r = 0;
        while r < self.tab.len() {
            if self.basis[r] >= self.structural {
                if let Some(c) = (0..self.structural).find(|&j| !self.tab[r][j].is_zero()) {
                    self.pivot(r, c);
                    r += 1;
                } else {
                    self.tab.remove(r);
                    self.basis.remove(r);
                }
            } else {
                r += 1;
            }
        }
        // artificial columns are dead from here on
        for row in self.tab.iter_mut() {
            for x in &mut row[self.structural..self.structural + m] {
                *x = Q::zero();
            }
        }
    }

    /// Minimizes `c` (indexed by builder variables) over the feasible set.
    pub fn minimize(&mut self, c: &[(usize, Q)]) -> Outcome {
        if !self.feasible {
            return Outcome::Infeasible;
        }
        let rhs = self.rhs();
        let mut cost = vec![Q::zero(); self.width];
        for (v, x) in c {
            let col = self.col_of[*v];
            cost[col] += x;
            if self.free[*v] {
                cost[col + 1] -= x;
            }
        }
        let mut obj = cost.clone();
        obj[rhs] = Q::zero();
        for (i, row) in self.tab.iter().enumerate() {
            let cb = &cost[self.basis[i]];
            if cb.is_zero() {
                continue;
            }
            for j in 0..self.width {
                if !row[j].is_zero() {
                    obj[j] -= cb * &row[j];
                }
            }
        }
        self.obj = obj;
        if !self.iterate(self.structural) {
            return Outcome::Unbounded;
        }
        let value = -self.obj[rhs].clone();
        let mut colval = vec![Q::zero(); self.structural];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < self.structural {
                colval[b] = self.tab[i][rhs].clone();
            }
        }
        let x = (0..self.free.len())
            .map(|v| {
                let c = self.col_of[v];
                if self.free[v] {
                    &colval[c] - &colval[c + 1]
                } else {
                    colval[c].clone()
                }
            })
            .collect();
        Outcome::Optimal(value, x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Q {
        Q::from_integer(n.into())
    }

    #[test]
    fn small_lp() {
        // min -x - y, x + 2y ≤ 4, 3x + y ≤ 6, x,y ≥ 0 → x = 8/5, y = 6/5
        let mut b = Builder::new();
        let x = b.var(false);
        let y = b.var(false);
        b.row(vec![(x, q(1)), (y, q(2))], Rel::Le, q(4));
        b.row(vec![(x, q(3)), (y, q(1))], Rel::Le, q(6));
        let mut s = b.build();
        match s.minimize(&[(x, q(-1)), (y, q(-1))]) {
            Outcome::Optimal(v, sol) => {
                assert_eq!(v, Q::new((-14).into(), 5.into()));
                assert_eq!(
                    sol,
                    vec![Q::new(8.into(), 5.into()), Q::new(6.into(), 5.into())]
                );
            }
            o => panic!("{o:?}"),
        }
        // warm start with another objective
        match s.minimize(&[(x, q(1))]) {
            Outcome::Optimal(v, _) => assert_eq!(v, q(0)),
            o => panic!("{o:?}"),
        }
    }

    #[test]
    fn free_variable_and_unbounded() {
        let mut b = Builder::new();
        let x = b.var(true);
        b.row(vec![(x, q(1))], Rel::Le, q(3));
        let mut s = b.build();
        assert_eq!(s.minimize(&[(x, q(1))]), Outcome::Unbounded);
        assert!(matches!(s.minimize(&[(x, q(-1))]), Outcome::Optimal(v, _) if v == q(-3)));
    }

    #[test]
    fn infeasible() {
        let mut b = Builder::new();
        let x = b.var(false);
        b.row(vec![(x, q(1))], Rel::Eq, q(-1));
        let mut s = b.build();
        assert!(!s.is_feasible());
        assert_eq!(s.minimize(&[]), Outcome::Infeasible);
    }
}
