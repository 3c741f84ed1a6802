//! Exact fields and dense Gaussian elimination over them.
//!
//! Two fields appear in the kernel: the rationals (coefficients of evaluated
//! series) and `Q(w)` (coefficients of symbolic series). Elimination picks the
//! first row with a nonzero candidate pivot, so traces are deterministic.

use std::fmt::Debug;

use num_traits::{One, Zero};

use crate::poly::Q;

pub trait Field: Clone + PartialEq + Debug + Send + Sync {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn is_one(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    /// Multiplicative inverse; panics on zero.
    fn inv(&self) -> Self;

    fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    fn div(&self, o: &Self) -> Self {
        self.mul(&o.inv())
    }
}

impl Field for Q {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_one(&self) -> bool {
        One::is_one(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn inv(&self) -> Self {
        self.recip()
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
}

/// Reduced row echelon form of a dense matrix (rows of equal length).
#[derive(Clone, Debug)]
pub struct Rref<F: Field> {
    pub rows: Vec<Vec<F>>,
    /// Pivot column of each nonzero row, in order.
    pub pivots: Vec<usize>,
    pub ncols: usize,
}

impl<F: Field> Rref<F> {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Columns without a pivot.
    pub fn free_columns(&self) -> Vec<usize> {
        (0..self.ncols).filter(|c| !self.pivots.contains(c)).collect()
    }

    /// Kernel basis: one vector per free column, with that column set to one
    /// and the other free columns zero.
    pub fn kernel(&self) -> Vec<Vec<F>> {
        self.free_columns()
            .into_iter()
            .map(|f| {
                let mut v = vec![F::zero(); self.ncols];
                v[f] = F::one();
                for (r, &p) in self.pivots.iter().enumerate() {
                    v[p] = self.rows[r][f].neg();
                }
                v
            })
            .collect()
    }
}

/// Row-reduces `m`, limiting pivot search to the first `pivot_cols` columns.
pub fn rref_limited<F: Field>(mut m: Vec<Vec<F>>, pivot_cols: usize) -> Rref<F> {
    let ncols = m.first().map_or(0, Vec::len);
    let nrows = m.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..pivot_cols.min(ncols) {
        let Some(p) = (r..nrows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].inv();
        if !inv.is_one() {
            for x in m[r].iter_mut().skip(c) {
                if !x.is_zero() {
                    *x = x.mul(&inv);
                }
            }
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let factor = row[c].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row).skip(c) {
                if !p.is_zero() {
                    *x = x.sub(&factor.mul(p));
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == nrows {
            break;
        }
    }
    m.truncate(r);
    Rref { rows: m, pivots, ncols }
}

pub fn rref<F: Field>(m: Vec<Vec<F>>) -> Rref<F> {
    let n = m.first().map_or(0, Vec::len);
    rref_limited(m, n)
}

/// Particular solution of `a x = b` with free variables zero, or `None` when
/// `b` is outside the column space.
pub fn solve<F: Field>(a: &[Vec<F>], b: &[F]) -> Option<Vec<F>> {
    let ncols = a.first().map_or(0, Vec::len);
    let aug: Vec<Vec<F>> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let red = rref_limited(aug, ncols);
    // Any zero row of the coefficient part must have a zero right-hand side;
    // after truncation those rows are gone, so check consistency against the
    // full system instead.
    let mut x = vec![F::zero(); ncols];
    for (row, &p) in red.rows.iter().zip(&red.pivots) {
        x[p] = row[ncols].clone();
    }
    let consistent = a.iter().zip(b).all(|(row, bi)| {
        let mut acc = F::zero();
        for (aij, xj) in row.iter().zip(&x) {
            if !aij.is_zero() && !xj.is_zero() {
                acc = acc.add(&aij.mul(xj));
            }
        }
        acc == *bi
    });
    consistent.then_some(x)
}

/// Inverse of a square matrix, or `None` when singular.
pub fn invert<F: Field>(a: &[Vec<F>]) -> Option<Vec<Vec<F>>> {
    let n = a.len();
    let aug: Vec<Vec<F>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { F::one() } else { F::zero() }));
            r
        })
        .collect();
    let red = rref_limited(aug, n);
    if red.rank() < n {
        return None;
    }
    Some(red.rows.into_iter().map(|r| r[n..].to_vec()).collect())
}
