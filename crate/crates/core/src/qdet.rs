//! Quantum determinant and the normalizing function.
//!
//! The qdet vector `v₀ = Σ C_{i₁…i_N} e_{i₁}⊗…⊗e_{i_N}` spans the line in
//! `(k^N)^{⊗N}` on which the auxiliary-leg action
//! `M(w) = R^{1,0}(w+l₁)⋯R^{N,0}(w+l_N)` is scalar, where
//! `l_k = h(k - 1 - (N-1)/2)` is the ladder. With `C` in hand,
//!
//! ```text
//! qdet(X)(w) = Σ C_{i₁…i_N} X_{1i₁}(w+l₁)⋯X_{Ni_N}(w+l_N).
//! ```

use crate::check::Status;
use crate::error::{Error, Result};
use crate::poly::{q, qr, Q};
use crate::rmatrix::RMatrixFamily;
use crate::series::{Mode, Point, Scalar};
use crate::tensor::{Entry, LegMatrix, LegShape};

/// The ladder `l_1 < … < l_N`, as group elements.
pub fn ladder(n: usize, mode: Mode, d: usize) -> Vec<Point> {
    (0..n)
        .map(|k| {
            let c = q(k as i64) - qr(n as i64 - 1, 2);
            Point::h_multiple(&c, mode, d)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct QDetData {
    n: usize,
    /// `C`, indexed like basis vectors of `(k^N)^{⊗N}` (leg 1 most significant).
    c: Vec<Scalar>,
    ladder: Vec<Point>,
}

impl QDetData {
    pub fn new(n: usize, c: Vec<Scalar>) -> Result<Self> {
        if c.len() != n.pow(n as u32) {
            return Err(Error::Dimension(format!("{} coefficients for N = {n}", c.len())));
        }
        let (mode, d) = (c[0].mode(), c[0].truncation());
        Ok(QDetData { n, c, ladder: ladder(n, mode, d) })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coefficients(&self) -> &[Scalar] {
        &self.c
    }

    pub fn ladder(&self) -> &[Point] {
        &self.ladder
    }

    pub fn mode(&self) -> Mode {
        self.c[0].mode()
    }

    pub fn truncation(&self) -> usize {
        self.c[0].truncation()
    }

    fn shape(&self) -> LegShape {
        LegShape::uniform(self.n, self.n)
    }

    /// `C_{i₁…i_N}` for 0-based indices.
    pub fn coefficient(&self, idx: &[usize]) -> &Scalar {
        &self.c[self.shape().flatten(idx)]
    }

    /// Nonzero coefficients with their index tuples, in lexicographic order.
    pub fn support(&self) -> Vec<(Vec<usize>, &Scalar)> {
        let shape = self.shape();
        self.c
            .iter()
            .enumerate()
            .filter(|(_, x)| !x.is_zero())
            .map(|(i, x)| (shape.unflatten(i), x))
            .collect()
    }
}

/// `M(w)` on legs `[aux, 1, …, N]`.
fn aux_product(r: &LegMatrix<Scalar>, n: usize, ladder: &[Point]) -> Result<LegMatrix<Scalar>> {
    let full = LegShape::uniform(n, n + 1);
    let factors = ladder
        .iter()
        .enumerate()
        .map(|(k, l)| r.translate(l)?.embed(&full, &[k + 2, 1]))
        .collect::<Result<Vec<_>>>()?;
    LegMatrix::product(&factors)
}

/// Blocks `M_{pq}` of the auxiliary leg.
fn aux_blocks(m: &LegMatrix<Scalar>, n: usize) -> Result<Vec<Vec<LegMatrix<Scalar>>>> {
    (0..n).map(|p| (0..n).map(|q| m.first_leg_block(p, q)).collect()).collect()
}

/// Computes `C`, normalized by `C_{1…N} = 1`.
///
/// The conditions `M_{pq} v = 0` (p ≠ q) and `(M_{pp} - M_{11}) v = 0` are
/// linear in `v` and vanish identically at `h⁰`; after dividing by `h` the
/// kernel is found at `h⁰` and lifted. Dividing by `h` costs one order, so the
/// family is rebuilt one order higher.
pub fn find_qdet_vector(f: &RMatrixFamily) -> Result<QDetData> {
    let (n, d, mode) = (f.n(), f.d(), f.mode());
    let hi = f.with_truncation(d + 1)?;
    let m = aux_product(hi.matrix(), n, &ladder(n, mode, d + 1))?;
    let blocks = aux_blocks(&m, n)?;
    let mut eqs: Vec<LegMatrix<Scalar>> = Vec::new();
    for p in 0..n {
        for qq in 0..n {
            if p != qq {
                eqs.push(blocks[p][qq].clone());
            }
        }
    }
    for p in 1..n {
        eqs.push(blocks[p][p].sub(&blocks[0][0])?);
    }
    let vdim = n.pow(n as u32);
    let cols = LegShape::uniform(n, n);
    let rows = LegShape::new(vec![eqs.len(), vdim])?;
    let data = eqs
        .iter()
        .flat_map(|e| e.entries().iter())
        .map(|x| x.lower_by_h(1))
        .collect::<Result<Vec<_>>>()?;
    let system = LegMatrix::from_rows(rows, cols.clone(), data)?;
    let kernel = system.nullspace()?;
    if kernel.len() != 1 {
        return Err(Error::EigenDimension(kernel.len()));
    }
    let v = &kernel[0];
    let id: Vec<usize> = (0..n).collect();
    let lead = v[cols.flatten(&id)].inv()?;
    let c = v.iter().map(|x| x.checked_mul(&lead)).collect::<Result<Vec<_>>>()?;
    QDetData::new(n, c)
}

/// `M(w)v₀ - λ(w)v₀` over all auxiliary blocks, with `λ` read off the
/// `(1…N)` coordinate.
pub fn qdet_vector_residual(f: &RMatrixFamily, data: &QDetData) -> Result<Status> {
    let n = f.n();
    let m = aux_product(f.matrix(), n, data.ladder())?;
    let blocks = aux_blocks(&m, n)?;
    let v = data.coefficients();
    let id: Vec<usize> = (0..n).collect();
    let lead = LegShape::uniform(n, n).flatten(&id);
    let lambda = blocks[0][0].apply(v)?[lead].clone();
    let mut st = Status::ExactZero;
    for (p, row) in blocks.iter().enumerate() {
        for (qq, b) in row.iter().enumerate() {
            let mv = b.apply(v)?;
            let res: Vec<Scalar> = if p == qq {
                mv.iter().zip(v).map(|(a, x)| a.sub(&x.mul(&lambda))).collect()
            } else {
                mv
            };
            st = st.combine(Status::of_vector(&res));
        }
    }
    Ok(st)
}

/// `qdet(X)` for `X(w)` acting on `[N, V…]`; the result acts on `V`.
pub fn qdet_apply(data: &QDetData, x: &LegMatrix<Scalar>) -> Result<LegMatrix<Scalar>> {
    let n = data.n();
    if !x.is_square() || x.shape().dims().first() != Some(&n) {
        return Err(Error::Dimension("qdet needs an operator whose first leg is k^N".into()));
    }
    let blocks: Vec<Vec<LegMatrix<Scalar>>> = data
        .ladder()
        .iter()
        .enumerate()
        .map(|(k, l)| {
            let xk = x.translate(l)?;
            (0..n).map(|i| xk.first_leg_block(k, i)).collect()
        })
        .collect::<Result<_>>()?;
    let mut acc: Option<LegMatrix<Scalar>> = None;
    for (idx, c) in data.support() {
        let factors: Vec<&LegMatrix<Scalar>> = idx.iter().enumerate().map(|(k, &i)| &blocks[k][i]).collect();
        let term = LegMatrix::product(factors)?.scale(c);
        acc = Some(match acc {
            None => term,
            Some(a) => a.add(&term)?,
        });
    }
    acc.ok_or_else(|| Error::Precondition("empty qdet vector".into()))
}

/// `ρ(w)` with `qdet(R)(w) = ρ(w)·1`.
pub fn compute_rho(r: &LegMatrix<Scalar>, data: &QDetData) -> Result<Scalar> {
    qdet_apply(data, r)?
        .as_scalar()
        .ok_or_else(|| Error::NotScalar("qdet of R is not scalar".into()))
}

/// `Π_k f(w + l_k)`.
pub fn ladder_product(f: &Scalar, ladder: &[Point]) -> Result<Scalar> {
    ladder.iter().try_fold(Scalar::one(f.truncation(), f.mode()), |acc, l| acc.checked_mul(&f.translate(l)?))
}

/// The unique `f = 1 + O(h)` with `Π_k f(w + l_k) = target`, solved grade by
/// grade: each factor contributes `f_m(w)` to grade `m` and everything else
/// there comes from lower grades.
pub fn solve_ladder_product(target: &Scalar, ladder: &[Point]) -> Result<Scalar> {
    let (d, mode) = (target.truncation(), target.mode());
    if !target.grade(0).as_constant().is_some_and(|c| c == q(1)) {
        return Err(Error::Precondition("ladder product target must be 1 + O(h)".into()));
    }
    let n = Q::from_integer((ladder.len() as i64).into());
    let mut grades = vec![crate::ratfn::RatFn::constant(q(1))];
    grades.resize(d + 1, crate::ratfn::RatFn::constant(q(0)));
    for m in 1..=d {
        let f = Scalar::from_grades(grades.clone(), d, mode);
        let p = ladder_product(&f, ladder)?;
        let diff = crate::field::Field::sub(target.grade(m), p.grade(m));
        grades[m] = crate::field::Field::mul(&diff, &crate::ratfn::RatFn::constant(n.recip()));
    }
    let f = Scalar::from_grades(grades, d, mode);
    if ladder_product(&f, ladder)? != *target {
        return Err(Error::Precondition("ladder product equation not satisfied after solving".into()));
    }
    Ok(f)
}

/// The normalizing function: `qdet(f₀R) = Π_k f₀(w+l_k) · ρ = 1`.
pub fn solve_f0(rho: &Scalar, ladder: &[Point]) -> Result<Scalar> {
    solve_ladder_product(&rho.inv()?, ladder)
}

/// A family with its qdet data, normalizing function and `R̄ = f₀R`.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalizedFamily {
    base: RMatrixFamily,
    qdet: QDetData,
    f0: Scalar,
    rbar: LegMatrix<Scalar>,
}

impl NormalizedFamily {
    /// Reassembles a normalized family from stored `C` and `f₀`.
    pub fn from_parts(base: RMatrixFamily, qdet: QDetData, f0: Scalar) -> Result<Self> {
        if f0.truncation() != base.d() || f0.mode() != base.mode() {
            return Err(Error::Precondition("f0 does not match the family ring".into()));
        }
        let rbar = base.matrix().scale(&f0);
        Ok(NormalizedFamily { base, qdet, f0, rbar })
    }

    pub fn base(&self) -> &RMatrixFamily {
        &self.base
    }

    pub fn qdet(&self) -> &QDetData {
        &self.qdet
    }

    pub fn f0(&self) -> &Scalar {
        &self.f0
    }

    pub fn rbar(&self) -> &LegMatrix<Scalar> {
        &self.rbar
    }

    pub fn n(&self) -> usize {
        self.base.n()
    }

    pub fn d(&self) -> usize {
        self.base.d()
    }

    pub fn mode(&self) -> Mode {
        self.base.mode()
    }

    /// `ρ̄` computed from `R̄`; equals 1 for a correct normalization.
    pub fn rho_bar(&self) -> Result<Scalar> {
        compute_rho(&self.rbar, &self.qdet)
    }
}

/// Full pipeline: `C`, `ρ`, `f₀`, `R̄`.
pub fn normalize(f: &RMatrixFamily) -> Result<NormalizedFamily> {
    let qd = find_qdet_vector(f)?;
    let rho = compute_rho(f.matrix(), &qd)?;
    let f0 = solve_f0(&rho, qd.ladder())?;
    NormalizedFamily::from_parts(f.clone(), qd, f0)
}

/// `qdet` in the auxiliary leg of `Π_{j=n..1} R^{0j}(w - v_j + y)`, to be
/// compared with the identity on legs `1..n`.
pub fn pairing_qdet(data: &QDetData, r: &LegMatrix<Scalar>, vs: &[Point], y: &Point) -> Result<LegMatrix<Scalar>> {
    let n = data.n();
    let full = LegShape::uniform(n, vs.len() + 1);
    let factors = vs
        .iter()
        .enumerate()
        .rev()
        .map(|(j, v)| r.translate(&y.minus(v)?)?.embed(&full, &[1, j + 2]))
        .collect::<Result<Vec<_>>>()?;
    qdet_apply(data, &LegMatrix::product(&factors)?)
}

/// Status of `pairing_qdet - 1`.
pub fn check_pairing_qdet(data: &QDetData, r: &LegMatrix<Scalar>, vs: &[Point], y: &Point) -> Result<Status> {
    let x = pairing_qdet(data, r, vs, y)?;
    let id = LegMatrix::identity(x.shape().clone(), &x.proto().one_like());
    Ok(Status::of_difference(&x, &id))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratfn::RatFn;
    use crate::rmatrix::{check_crossing, unitarity_scalar};

    fn sign(p: &[usize]) -> i64 {
        let mut s = 1;
        for i in 0..p.len() {
            for j in i + 1..p.len() {
                if p[i] > p[j] {
                    s = -s;
                }
            }
        }
        s
    }

    #[test]
    fn ladder_is_symmetric() {
        let l = ladder(3, Mode::Additive, 2);
        assert_eq!(l[0].value().grade(1), &q(-1));
        assert_eq!(l[1].value().grade(1), &q(0));
        assert_eq!(l[2].value().grade(1), &q(1));
    }

    #[test]
    fn rational_c_is_sign_table() {
        for n in [2usize, 3] {
            let f = RMatrixFamily::build_rational(n, 2).unwrap();
            let qd = find_qdet_vector(&f).unwrap();
            let supp = qd.support();
            assert_eq!(supp.len(), (1..=n).product::<usize>());
            for (idx, c) in supp {
                let mut sorted = idx.clone();
                sorted.sort();
                assert_eq!(sorted, (0..n).collect::<Vec<_>>());
                assert_eq!(*c, Scalar::from_q(q(sign(&idx)), 2, Mode::Additive));
            }
            assert_eq!(qdet_vector_residual(&f, &qd).unwrap(), Status::ExactZero);
        }
    }

    #[test]
    fn qdet_of_identity_is_one() {
        let f = RMatrixFamily::build_rational(2, 2).unwrap();
        let qd = find_qdet_vector(&f).unwrap();
        let one = Scalar::one(2, Mode::Additive);
        let id = LegMatrix::identity(LegShape::uniform(2, 2), &one);
        assert!(qdet_apply(&qd, &id).unwrap().is_identity());
    }

    #[test]
    fn normalization_rational() {
        let f = RMatrixFamily::build_rational(2, 3).unwrap();
        let nf = normalize(&f).unwrap();
        let rho = compute_rho(f.matrix(), nf.qdet()).unwrap();
        assert_eq!(rho.grade(0), &RatFn::constant(q(1)));
        assert!(!rho.is_one());
        assert_eq!(rho.grade(1), &RatFn::constant(q(0)));
        assert!(nf.rho_bar().unwrap().is_one());
        assert_eq!(nf.f0().grade(0), &RatFn::constant(q(1)));
        let c = check_crossing(nf.rbar(), &f.crossing_shift()).unwrap();
        assert!(c.forms_agree);
        assert!(c.g.is_one());
        assert!(unitarity_scalar(nf.rbar()).unwrap().is_one());
    }

    #[test]
    fn normalization_trigonometric() {
        let f = RMatrixFamily::build_trigonometric(3).unwrap();
        let nf = normalize(&f).unwrap();
        let qd = nf.qdet();
        assert_eq!(qdet_vector_residual(&f, qd).unwrap(), Status::ExactZero);
        assert_eq!(qd.support().len(), 2);
        assert_eq!(qd.coefficient(&[1, 0]).grade(0), &RatFn::constant(q(-1)));
        assert!(nf.rho_bar().unwrap().is_one());
        let c = check_crossing(nf.rbar(), &f.crossing_shift()).unwrap();
        assert!(c.forms_agree && c.g.is_one());
        assert!(unitarity_scalar(nf.rbar()).unwrap().is_one());
    }

    #[test]
    fn ladder_solver_is_order_independent() {
        let f = RMatrixFamily::build_rational(3, 3).unwrap();
        let qd = find_qdet_vector(&f).unwrap();
        let rho = compute_rho(f.matrix(), &qd).unwrap();
        let mut rev = qd.ladder().to_vec();
        rev.reverse();
        assert_eq!(solve_f0(&rho, qd.ladder()).unwrap(), solve_f0(&rho, &rev).unwrap());
        let one = Scalar::one(3, Mode::Additive);
        assert_eq!(solve_ladder_product(&one, qd.ladder()).unwrap(), one);
    }

    #[test]
    fn pairing_contraction() {
        let f = RMatrixFamily::build_rational(2, 3).unwrap();
        let nf = normalize(&f).unwrap();
        let p = |c: Q| Point::constant(c, Mode::Additive, 3).unwrap();
        let y = p(qr(7, 5));
        for vs in [vec![p(q(1))], vec![p(q(1)), p(qr(-1, 3))]] {
            assert_eq!(check_pairing_qdet(nf.qdet(), nf.rbar(), &vs, &y).unwrap(), Status::ExactZero);
            assert!(!check_pairing_qdet(nf.qdet(), f.matrix(), &vs, &y).unwrap().is_zero());
        }
    }
}
