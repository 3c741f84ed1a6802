//! Operators on tensor products of finite-dimensional spaces.
//!
//! Basis vectors of `k^{d_1} ⊗ … ⊗ k^{d_n}` are ordered row-major: leg 1 is
//! the most significant digit. Leg indices in the public API are 1-based.

use std::fmt::Debug;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{rref, solve, Field};
use crate::poly::Q;
use crate::ratfn::RatFn;
use crate::series::{HSeries, Scalar};

/// Ring of matrix entries: graded by powers of `h` with field coefficients.
pub trait Entry: Clone + PartialEq + Debug + Send + Sync {
    type Coeff: Field;

    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn inv(&self) -> Result<Self>;
    fn is_unit(&self) -> bool;
    fn valuation(&self) -> Option<usize>;
    fn truncation(&self) -> usize;
    fn grade(&self, m: usize) -> Self::Coeff;
    /// Same ring (truncation, mode) as `self`, with the given grades.
    fn with_grades(&self, grades: Vec<Self::Coeff>) -> Self;
}

impl Entry for HSeries {
    type Coeff = Q;

    fn zero_like(&self) -> Self {
        HSeries::zero(self.truncation())
    }
    fn one_like(&self) -> Self {
        HSeries::one(self.truncation())
    }
    fn is_zero(&self) -> bool {
        HSeries::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self.checked_add(o).expect("entry truncation mismatch")
    }
    fn sub(&self, o: &Self) -> Self {
        self.checked_sub(o).expect("entry truncation mismatch")
    }
    fn neg(&self) -> Self {
        HSeries::neg(self)
    }
    fn mul(&self, o: &Self) -> Self {
        self.checked_mul(o).expect("entry truncation mismatch")
    }
    fn inv(&self) -> Result<Self> {
        HSeries::inv(self)
    }
    fn is_unit(&self) -> bool {
        HSeries::is_unit(self)
    }
    fn valuation(&self) -> Option<usize> {
        HSeries::valuation(self)
    }
    fn truncation(&self) -> usize {
        HSeries::truncation(self)
    }
    fn grade(&self, m: usize) -> Q {
        HSeries::grade(self, m).clone()
    }
    fn with_grades(&self, grades: Vec<Q>) -> Self {
        HSeries::from_grades(grades, self.truncation())
    }
}

impl Entry for Scalar {
    type Coeff = RatFn;

    fn zero_like(&self) -> Self {
        Scalar::zero(self.truncation(), self.mode())
    }
    fn one_like(&self) -> Self {
        Scalar::one(self.truncation(), self.mode())
    }
    fn is_zero(&self) -> bool {
        Scalar::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self.checked_add(o).expect("entry ring mismatch")
    }
    fn sub(&self, o: &Self) -> Self {
        self.checked_sub(o).expect("entry ring mismatch")
    }
    fn neg(&self) -> Self {
        Scalar::neg(self)
    }
    fn mul(&self, o: &Self) -> Self {
        self.checked_mul(o).expect("entry ring mismatch")
    }
    fn inv(&self) -> Result<Self> {
        Scalar::inv(self)
    }
    fn is_unit(&self) -> bool {
        Scalar::is_unit(self)
    }
    fn valuation(&self) -> Option<usize> {
        Scalar::valuation(self)
    }
    fn truncation(&self) -> usize {
        Scalar::truncation(self)
    }
    fn grade(&self, m: usize) -> RatFn {
        Scalar::grade(self, m).clone()
    }
    fn with_grades(&self, grades: Vec<RatFn>) -> Self {
        Scalar::from_grades(grades, self.truncation(), self.mode())
    }
}

/// Dimensions of the tensor legs, in order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LegShape {
    dims: Vec<usize>,
}

impl LegShape {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.contains(&0) {
            return Err(Error::Dimension("legs must have positive dimension".into()));
        }
        Ok(LegShape { dims })
    }

    /// `n` legs of dimension `d`.
    pub fn uniform(d: usize, n: usize) -> Self {
        LegShape { dims: vec![d; n] }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn legs(&self) -> usize {
        self.dims.len()
    }

    pub fn total(&self) -> usize {
        self.dims.iter().product()
    }

    /// Concatenation `self ⊗ o`.
    pub fn concat(&self, o: &LegShape) -> LegShape {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&o.dims);
        LegShape { dims }
    }

    /// Multi-index of a flat index.
    pub fn unflatten(&self, mut i: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dims.len()];
        for (k, &d) in self.dims.iter().enumerate().rev() {
            idx[k] = i % d;
            i /= d;
        }
        idx
    }

    pub fn flatten(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.dims).fold(0, |acc, (&i, &d)| acc * d + i)
    }

    /// Shape with legs reordered: new leg `p` is old leg `perm[p]` (1-based).
    pub fn permuted(&self, perm: &[usize]) -> Result<LegShape> {
        check_permutation(perm, self.legs())?;
        Ok(LegShape {
            dims: perm.iter().map(|&p| self.dims[p - 1]).collect(),
        })
    }
}

fn check_permutation(perm: &[usize], n: usize) -> Result<()> {
    if perm.len() != n {
        return Err(Error::Dimension(format!("permutation of {} legs for {n} legs", perm.len())));
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p == 0 || p > n {
            return Err(Error::BadLeg(p));
        }
        if seen[p - 1] {
            return Err(Error::RepeatedLeg(p));
        }
        seen[p - 1] = true;
    }
    Ok(())
}

/// Dense matrix between tensor-product spaces, row-major storage.
#[derive(Clone, Debug, PartialEq)]
pub struct LegMatrix<T: Entry> {
    rows: LegShape,
    cols: LegShape,
    data: Vec<T>,
}

impl<T: Entry> LegMatrix<T> {
    pub fn zeros(rows: LegShape, cols: LegShape, proto: &T) -> Self {
        let data = vec![proto.zero_like(); rows.total() * cols.total()];
        LegMatrix { rows, cols, data }
    }

    pub fn identity(shape: LegShape, proto: &T) -> Self {
        let n = shape.total();
        let mut m = Self::zeros(shape.clone(), shape, proto);
        for i in 0..n {
            m.data[i * n + i] = proto.one_like();
        }
        m
    }

    /// Scalar multiple of the identity.
    pub fn scalar(shape: LegShape, c: &T) -> Self {
        let n = shape.total();
        let mut m = Self::zeros(shape.clone(), shape, c);
        for i in 0..n {
            m.data[i * n + i] = c.clone();
        }
        m
    }

    pub fn from_fn(rows: LegShape, cols: LegShape, f: impl Fn(usize, usize) -> T) -> Self {
        let nc = cols.total();
        let data = (0..rows.total() * nc).map(|k| f(k / nc, k % nc)).collect();
        LegMatrix { rows, cols, data }
    }

    pub fn from_rows(rows: LegShape, cols: LegShape, data: Vec<T>) -> Result<Self> {
        if data.len() != rows.total() * cols.total() {
            return Err(Error::Dimension(format!(
                "{} entries for a {}x{} matrix",
                data.len(),
                rows.total(),
                cols.total()
            )));
        }
        Ok(LegMatrix { rows, cols, data })
    }

    pub fn rows(&self) -> &LegShape {
        &self.rows
    }

    pub fn cols(&self) -> &LegShape {
        &self.cols
    }

    /// The shape of a square operator (rows and columns agree).
    pub fn shape(&self) -> &LegShape {
        &self.rows
    }

    pub fn nrows(&self) -> usize {
        self.rows.total()
    }

    pub fn ncols(&self) -> usize {
        self.cols.total()
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[T] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.ncols() + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        let nc = self.ncols();
        self.data[i * nc + j] = v;
    }

    /// Any entry, used as a prototype for the entry ring.
    pub fn proto(&self) -> &T {
        &self.data[0]
    }

    pub fn map<U: Entry>(&self, f: impl Fn(&T) -> U + Sync + Send) -> LegMatrix<U> {
        LegMatrix {
            rows: self.rows.clone(),
            cols: self.cols.clone(),
            data: self.data.par_iter().map(f).collect(),
        }
    }

    pub fn try_map<U: Entry>(&self, f: impl Fn(&T) -> Result<U> + Sync + Send) -> Result<LegMatrix<U>> {
        let data = self.data.par_iter().map(f).collect::<Result<Vec<U>>>()?;
        Ok(LegMatrix { rows: self.rows.clone(), cols: self.cols.clone(), data })
    }

    fn same_shape(&self, o: &Self) -> Result<()> {
        if self.rows != o.rows || self.cols != o.cols {
            return Err(Error::Dimension(format!(
                "{:?}x{:?} vs {:?}x{:?}",
                self.rows.dims, self.cols.dims, o.rows.dims, o.cols.dims
            )));
        }
        Ok(())
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.same_shape(o)?;
        Ok(LegMatrix {
            rows: self.rows.clone(),
            cols: self.cols.clone(),
            data: self.data.iter().zip(&o.data).map(|(a, b)| a.add(b)).collect(),
        })
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.same_shape(o)?;
        Ok(LegMatrix {
            rows: self.rows.clone(),
            cols: self.cols.clone(),
            data: self.data.iter().zip(&o.data).map(|(a, b)| a.sub(b)).collect(),
        })
    }

    pub fn scale(&self, c: &T) -> Self {
        self.map(|x| if x.is_zero() { x.clone() } else { x.mul(c) })
    }

    /// Matrix product; rows are computed in parallel, each row sequentially,
    /// so the result does not depend on the thread count.
    pub fn mul(&self, o: &Self) -> Result<Self> {
        if self.cols.total() != o.rows.total() || self.cols.dims != o.rows.dims {
            return Err(Error::Dimension(format!(
                "product of {:?} columns with {:?} rows",
                self.cols.dims, o.rows.dims
            )));
        }
        let (n, k, m) = (self.nrows(), self.ncols(), o.ncols());
        let zero = self.proto().zero_like();
        let data: Vec<T> = (0..n)
            .into_par_iter()
            .flat_map_iter(|i| {
                let mut row = vec![zero.clone(); m];
                for l in 0..k {
                    let a = &self.data[i * k + l];
                    if a.is_zero() {
                        continue;
                    }
                    for (j, r) in row.iter_mut().enumerate() {
                        let b = &o.data[l * m + j];
                        if !b.is_zero() {
                            *r = r.add(&a.mul(b));
                        }
                    }
                }
                row
            })
            .collect();
        Ok(LegMatrix { rows: self.rows.clone(), cols: o.cols.clone(), data })
    }

    /// Product of a sequence of matrices, left to right.
    pub fn product<'a>(factors: impl IntoIterator<Item = &'a Self>) -> Result<Self>
    where
        T: 'a,
    {
        let mut it = factors.into_iter();
        let first = it.next().ok_or_else(|| Error::Dimension("empty product".into()))?.clone();
        it.try_fold(first, |acc, f| acc.mul(f))
    }

    pub fn apply(&self, v: &[T]) -> Result<Vec<T>> {
        if v.len() != self.ncols() {
            return Err(Error::Dimension(format!("vector of length {} for {} columns", v.len(), self.ncols())));
        }
        let nc = self.ncols();
        Ok((0..self.nrows())
            .map(|i| {
                let mut acc = self.proto().zero_like();
                for (a, x) in self.data[i * nc..(i + 1) * nc].iter().zip(v) {
                    if !a.is_zero() && !x.is_zero() {
                        acc = acc.add(&a.mul(x));
                    }
                }
                acc
            })
            .collect())
    }

    /// Kronecker product `self ⊗ o`.
    pub fn kron(&self, o: &Self) -> Self {
        let rows = self.rows.concat(&o.rows);
        let cols = self.cols.concat(&o.cols);
        let (onr, onc) = (o.nrows(), o.ncols());
        let zero = self.proto().zero_like();
        let mut out = Self::zeros(rows, cols, &zero);
        let nc = out.ncols();
        for i in 0..self.nrows() {
            for j in 0..self.ncols() {
                let a = self.get(i, j);
                if a.is_zero() {
                    continue;
                }
                for p in 0..onr {
                    for q in 0..onc {
                        let b = o.get(p, q);
                        if !b.is_zero() {
                            out.data[(i * onr + p) * nc + j * onc + q] = a.mul(b);
                        }
                    }
                }
            }
        }
        out
    }

    /// Places a square operator on the listed legs of `target` (1-based, in
    /// the operator's own leg order), acting as the identity elsewhere.
    pub fn embed(&self, target: &LegShape, legs: &[usize]) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::Dimension("embed needs a square operator".into()));
        }
        if legs.len() != self.rows.legs() {
            return Err(Error::Dimension(format!(
                "{} legs listed for an operator on {} legs",
                legs.len(),
                self.rows.legs()
            )));
        }
        let mut seen = vec![false; target.legs()];
        for (&l, &d) in legs.iter().zip(&self.rows.dims) {
            if l == 0 || l > target.legs() {
                return Err(Error::BadLeg(l));
            }
            if seen[l - 1] {
                return Err(Error::RepeatedLeg(l));
            }
            seen[l - 1] = true;
            if target.dims[l - 1] != d {
                return Err(Error::Dimension(format!(
                    "leg {l} has dimension {} but operator leg has {d}",
                    target.dims[l - 1]
                )));
            }
        }
        let others: Vec<usize> = (0..target.legs()).filter(|&k| !seen[k]).collect();
        let other_shape = LegShape { dims: others.iter().map(|&k| target.dims[k]).collect() };
        let zero = self.proto().zero_like();
        let mut out = Self::zeros(target.clone(), target.clone(), &zero);
        let n = target.total();
        let mut full = vec![0; target.legs()];
        for i in 0..self.nrows() {
            let ri = self.rows.unflatten(i);
            for j in 0..self.ncols() {
                let a = self.get(i, j);
                if a.is_zero() {
                    continue;
                }
                let cj = self.cols.unflatten(j);
                for o in 0..other_shape.total() {
                    let oi = other_shape.unflatten(o);
                    for (&k, &v) in others.iter().zip(&oi) {
                        full[k] = v;
                    }
                    for (&l, &v) in legs.iter().zip(&ri) {
                        full[l - 1] = v;
                    }
                    let r = target.flatten(&full);
                    for (&l, &v) in legs.iter().zip(&cj) {
                        full[l - 1] = v;
                    }
                    let c = target.flatten(&full);
                    out.data[r * n + c] = a.clone();
                }
            }
        }
        Ok(out)
    }

    /// Permutation operator from `from` to `from.permuted(perm)`: sends
    /// `e_{i_1} ⊗ … ⊗ e_{i_n}` to the tensor whose leg `p` carries `i_{perm[p]}`.
    pub fn permutation(from: &LegShape, perm: &[usize], proto: &T) -> Result<Self> {
        let to = from.permuted(perm)?;
        let mut out = Self::zeros(to.clone(), from.clone(), proto);
        let nc = from.total();
        for j in 0..nc {
            let idx = from.unflatten(j);
            let new: Vec<usize> = perm.iter().map(|&p| idx[p - 1]).collect();
            let i = to.flatten(&new);
            out.data[i * nc + j] = proto.one_like();
        }
        Ok(out)
    }

    /// The flip `σ` on two legs of dimension `n`.
    pub fn flip(n: usize, proto: &T) -> Self {
        Self::permutation(&LegShape::uniform(n, 2), &[2, 1], proto).expect("valid permutation")
    }

    pub fn transpose(&self) -> Self {
        let (nr, nc) = (self.nrows(), self.ncols());
        let data = (0..nr * nc).map(|k| self.data[(k % nr) * nc + k / nr].clone()).collect();
        LegMatrix { rows: self.cols.clone(), cols: self.rows.clone(), data }
    }

    /// Transpose in one leg of a square operator.
    pub fn partial_transpose(&self, leg: usize) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::Dimension("partial transpose needs a square operator".into()));
        }
        if leg == 0 || leg > self.rows.legs() {
            return Err(Error::BadLeg(leg));
        }
        let n = self.nrows();
        let mut out = self.clone();
        for i in 0..n {
            let mut ri = self.rows.unflatten(i);
            for j in 0..n {
                let mut cj = self.cols.unflatten(j);
                std::mem::swap(&mut ri[leg - 1], &mut cj[leg - 1]);
                let (si, sj) = (self.rows.flatten(&ri), self.cols.flatten(&cj));
                std::mem::swap(&mut ri[leg - 1], &mut cj[leg - 1]);
                out.data[si * n + sj] = self.data[i * n + j].clone();
            }
        }
        Ok(out)
    }

    /// Exact inverse by Gauss–Jordan elimination with unit pivots: in each
    /// column the first remaining row whose entry is a unit is used.
    pub fn inv(&self) -> Result<Self> {
        if self.nrows() != self.ncols() {
            return Err(Error::Dimension("inverse of a non-square matrix".into()));
        }
        let n = self.nrows();
        let one = self.proto().one_like();
        let zero = self.proto().zero_like();
        let mut a: Vec<Vec<T>> = (0..n).map(|i| self.data[i * n..(i + 1) * n].to_vec()).collect();
        let mut b: Vec<Vec<T>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { one.clone() } else { zero.clone() }).collect())
            .collect();
        for c in 0..n {
            let p = (c..n).find(|&i| a[i][c].is_unit()).ok_or(Error::Singular)?;
            a.swap(c, p);
            b.swap(c, p);
            let inv = a[c][c].inv()?;
            for x in a[c].iter_mut().chain(b[c].iter_mut()) {
                if !x.is_zero() {
                    *x = x.mul(&inv);
                }
            }
            let (prow_a, prow_b) = (a[c].clone(), b[c].clone());
            for i in 0..n {
                if i == c || a[i][c].is_zero() {
                    continue;
                }
                let f = a[i][c].clone();
                for (x, p) in a[i].iter_mut().zip(&prow_a) {
                    if !p.is_zero() {
                        *x = x.sub(&f.mul(p));
                    }
                }
                for (x, p) in b[i].iter_mut().zip(&prow_b) {
                    if !p.is_zero() {
                        *x = x.sub(&f.mul(p));
                    }
                }
            }
        }
        Ok(LegMatrix {
            rows: self.cols.clone(),
            cols: self.rows.clone(),
            data: b.into_iter().flatten().collect(),
        })
    }

    /// `θ(X) = (X^{-1})^{t_1}`.
    pub fn theta(&self) -> Result<Self> {
        self.inv()?.partial_transpose(1)
    }

    /// Lowest nonzero grade over all entries; `None` when the matrix is zero
    /// in the truncated ring.
    pub fn valuation(&self) -> Option<usize> {
        self.data.iter().filter_map(Entry::valuation).min()
    }

    pub fn is_zero(&self) -> bool {
        self.valuation().is_none()
    }

    /// The common diagonal value when the matrix is a scalar multiple of the
    /// identity.
    pub fn as_scalar(&self) -> Option<T> {
        if self.nrows() != self.ncols() {
            return None;
        }
        let n = self.nrows();
        let c = self.get(0, 0).clone();
        for i in 0..n {
            for j in 0..n {
                let x = self.get(i, j);
                let ok = if i == j { *x == c } else { x.is_zero() };
                if !ok {
                    return None;
                }
            }
        }
        Some(c)
    }

    pub fn is_identity(&self) -> bool {
        self.as_scalar().is_some_and(|c| c == c.one_like())
    }

    /// Block of a square operator at first-leg indices `(a, b)`, acting on the
    /// remaining legs.
    pub fn first_leg_block(&self, a: usize, b: usize) -> Result<Self> {
        if !self.is_square() || self.rows.legs() < 2 {
            return Err(Error::Dimension("block extraction needs a square operator on ≥ 2 legs".into()));
        }
        let rest = LegShape { dims: self.rows.dims[1..].to_vec() };
        let m = rest.total();
        let n = self.ncols();
        let data = (0..m * m)
            .map(|k| self.data[(a * m + k / m) * n + b * m + k % m].clone())
            .collect();
        Ok(LegMatrix { rows: rest.clone(), cols: rest, data })
    }

    /// Truncation-aware grade matrix over the coefficient field.
    fn grade_rows(&self, m: usize) -> Vec<Vec<T::Coeff>> {
        let nc = self.ncols();
        (0..self.nrows())
            .map(|i| (0..nc).map(|j| self.data[i * nc + j].grade(m)).collect())
            .collect()
    }

    /// Kernel basis over the truncated ring: the kernel of the `h^0`
    /// reduction, each vector scaled so its first nonzero coordinate is 1,
    /// then lifted grade by grade with that coordinate held fixed.
    pub fn nullspace(&self) -> Result<Vec<Vec<T>>> {
        let d = self.proto().truncation();
        let a0 = self.grade_rows(0);
        let higher: Vec<Vec<Vec<T::Coeff>>> = (1..=d).map(|m| self.grade_rows(m)).collect();
        let red = rref(a0.clone());
        let mut out = Vec::new();
        for k in red.kernel() {
            let lead = k.iter().position(|x| !x.is_zero()).expect("kernel vectors are nonzero");
            let s = k[lead].inv();
            let k: Vec<T::Coeff> = k.iter().map(|x| x.mul(&s)).collect();
            let mut lifts = vec![k.clone()];
            for g in 1..=d {
                let mut rhs = vec![<T::Coeff as Field>::zero(); self.nrows()];
                for s in 1..=g {
                    let a = &higher[s - 1];
                    let v = &lifts[g - s];
                    for (r, row) in rhs.iter_mut().zip(a) {
                        for (x, y) in row.iter().zip(v) {
                            if !x.is_zero() && !y.is_zero() {
                                *r = r.sub(&x.mul(y));
                            }
                        }
                    }
                }
                let mut x = solve(&a0, &rhs).ok_or(Error::LiftFailure(g))?;
                let c = x[lead].clone();
                if !c.is_zero() {
                    for (xi, ki) in x.iter_mut().zip(&k) {
                        *xi = xi.sub(&c.mul(ki));
                    }
                }
                lifts.push(x);
            }
            let proto = self.proto();
            let v: Vec<T> = (0..self.ncols())
                .map(|j| proto.with_grades(lifts.iter().map(|l| l[j].clone()).collect()))
                .collect();
            if self.apply(&v)?.iter().any(|x| !x.is_zero()) {
                return Err(Error::LiftFailure(d));
            }
            out.push(v);
        }
        Ok(out)
    }
}

impl LegMatrix<HSeries> {
    /// Constant-in-`w` copy over `Scalar`.
    pub fn to_scalar(&self, mode: crate::series::Mode) -> LegMatrix<Scalar> {
        self.map(|x| Scalar::from_hseries(x, mode))
    }
}

impl LegMatrix<Scalar> {
    /// Translates the coordinate in every entry.
    pub fn translate(&self, g: &crate::series::Point) -> Result<Self> {
        self.try_map(|x| if x.is_zero() { Ok(x.clone()) } else { x.translate(g) })
    }

    /// Evaluates every entry at a point.
    pub fn eval(&self, p: &crate::series::Point) -> Result<LegMatrix<HSeries>> {
        self.try_map(|x| x.eval(p))
    }

    pub fn reflect(&self) -> Self {
        self.map(Scalar::reflect)
    }

    pub fn truncate(&self, d: usize) -> Self {
        self.map(|x| x.truncate(d))
    }
}
