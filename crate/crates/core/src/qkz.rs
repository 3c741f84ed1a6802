//! The quantum Knizhnik–Zamolodchikov difference connection.
//!
//! For points `z₁…zₙ` carrying words `V¹…Vⁿ`, the operator
//!
//! ```text
//! ∇_i(z) = Π_{j=i-1..1} R_{V^jV^i}^{ji}(z_j - z_i + κh) · Π_{j=n..i+1} R_{V^jV^i}^{ji}(z_j - z_i)
//! ```
//!
//! acts on the fiber `V¹⊗…⊗Vⁿ` and the system reads
//! `F(z - κh e_i) = ∇_i(z) F(z)`, with `κ = K + N`.

use rayon::prelude::*;

use crate::check::Status;
use crate::error::{Error, Result};
use crate::poly::q;
use crate::reps::{braid_word, rvw_at, ComoduleWord};
use crate::rmatrix::classical_grade;
use crate::series::{HSeries, Mode, Point, Scalar};
use crate::tensor::{Entry, LegMatrix, LegShape};

/// Deliberate defects for control runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NablaFault {
    /// Omit `+κh` from the first factor of the left product of the last
    /// operator `∇_n`. Only grade 2 and higher of `∇_n` change, so flatness
    /// sees it from grade 3 on.
    DropKappaShift,
    /// Use `z_i - z_j` instead of `z_j - z_i` in that same factor, which
    /// already changes grade 1.
    ReversedArgument,
}

#[derive(Clone, Debug, PartialEq)]
pub struct QKZInstance {
    rbar: LegMatrix<Scalar>,
    z: Vec<Point>,
    words: Vec<ComoduleWord>,
    k: HSeries,
    kappa: HSeries,
}

impl QKZInstance {
    /// Checks sizes, truncations and regularity of `R̄` at every pairwise
    /// difference of factor positions.
    pub fn new(rbar: LegMatrix<Scalar>, z: Vec<Point>, words: Vec<ComoduleWord>, k: HSeries) -> Result<Self> {
        let proto = rbar.proto().clone();
        let (mode, d) = (proto.mode(), proto.truncation());
        if z.len() != words.len() || z.is_empty() {
            return Err(Error::Dimension(format!("{} points for {} words", z.len(), words.len())));
        }
        if k.truncation() != d {
            return Err(Error::TruncationMismatch(d, k.truncation()));
        }
        for p in &z {
            if p.mode() != mode {
                return Err(Error::ModeMismatch);
            }
            if p.truncation() != d {
                return Err(Error::TruncationMismatch(d, p.truncation()));
            }
        }
        for w in &words {
            if w.truncation() != d {
                return Err(Error::TruncationMismatch(d, w.truncation()));
            }
        }
        let n = rbar.shape().dims()[0];
        let kappa = k.checked_add(&HSeries::from_int(n as i64, d))?;
        let inst = QKZInstance { rbar, z, words, k, kappa };
        inst.check_regular()?;
        Ok(inst)
    }

    fn check_regular(&self) -> Result<()> {
        let mode = self.mode();
        for (i, (zi, vi)) in self.z.iter().zip(&self.words).enumerate() {
            for (j, (zj, vj)) in self.z.iter().zip(&self.words).enumerate() {
                if i == j {
                    continue;
                }
                for a in vi.points(mode)? {
                    for b in vj.points(mode)? {
                        let p = zi.compose(&a)?.minus(&zj.compose(&b)?)?;
                        if !self.rbar.entries().iter().all(|x| x.is_regular_at(&p)) {
                            return Err(Error::Pole(format!("points {} and {} collide", i + 1, j + 1)));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn n_points(&self) -> usize {
        self.z.len()
    }

    /// Dimension `N` of the basic comodule.
    pub fn dim(&self) -> usize {
        self.rbar.shape().dims()[0]
    }

    pub fn mode(&self) -> Mode {
        self.rbar.proto().mode()
    }

    pub fn truncation(&self) -> usize {
        self.rbar.proto().truncation()
    }

    pub fn points(&self) -> &[Point] {
        &self.z
    }

    pub fn words(&self) -> &[ComoduleWord] {
        &self.words
    }

    pub fn k(&self) -> &HSeries {
        &self.k
    }

    pub fn kappa(&self) -> &HSeries {
        &self.kappa
    }

    pub fn rbar(&self) -> &LegMatrix<Scalar> {
        &self.rbar
    }

    pub fn fiber(&self) -> LegShape {
        LegShape::uniform(self.dim(), self.words.iter().map(ComoduleWord::len).sum())
    }

    fn offsets(&self) -> Vec<usize> {
        self.words
            .iter()
            .scan(0, |acc, w| {
                let o = *acc;
                *acc += w.len();
                Some(o)
            })
            .collect()
    }

    /// The group element `κh`.
    pub fn kappa_step(&self) -> Result<Point> {
        let kh = self.kappa.checked_mul(&HSeries::h(self.truncation()))?;
        Point::from_additive(&kh, self.mode())
    }

    /// `z - κh e_i` (0-based `i`).
    pub fn stepped(&self, z: &[Point], i: usize) -> Result<Vec<Point>> {
        let mut out = z.to_vec();
        out[i] = out[i].minus(&self.kappa_step()?)?;
        Ok(out)
    }

    /// Same instance at other base points.
    pub fn at_points(&self, z: Vec<Point>) -> Result<Self> {
        QKZInstance::new(self.rbar.clone(), z, self.words.clone(), self.k.clone())
    }

    /// Same instance with a different central charge.
    pub fn with_k(&self, k: HSeries) -> Result<Self> {
        QKZInstance::new(self.rbar.clone(), self.z.clone(), self.words.clone(), k)
    }

    fn factor(&self, z: &[Point], j: usize, i: usize, shift: Option<&Point>, reversed: bool) -> Result<LegMatrix<HSeries>> {
        let offs = self.offsets();
        let mut arg = if reversed { z[i].minus(&z[j])? } else { z[j].minus(&z[i])? };
        if let Some(s) = shift {
            arg = arg.compose(s)?;
        }
        let r = rvw_at(&self.rbar, &self.words[j], &self.words[i], &arg)?;
        let legs: Vec<usize> = (offs[j] + 1..=offs[j] + self.words[j].len())
            .chain(offs[i] + 1..=offs[i] + self.words[i].len())
            .collect();
        r.embed(&self.fiber(), &legs)
    }

    /// `∇_i` at base point `z` (0-based `i`).
    pub fn nabla_at(&self, z: &[Point], i: usize, fault: Option<NablaFault>) -> Result<LegMatrix<HSeries>> {
        let n = self.n_points();
        if i >= n || z.len() != n {
            return Err(Error::BadLeg(i + 1));
        }
        let step = self.kappa_step()?;
        let mut factors = Vec::with_capacity(n - 1);
        for j in (0..i).rev() {
            let target = i == n - 1 && j == i - 1;
            let drop = target && fault == Some(NablaFault::DropKappaShift);
            let reversed = target && fault == Some(NablaFault::ReversedArgument);
            factors.push(self.factor(z, j, i, if drop { None } else { Some(&step) }, reversed)?);
        }
        for j in (i + 1..n).rev() {
            factors.push(self.factor(z, j, i, None, false)?);
        }
        if factors.is_empty() {
            return Ok(LegMatrix::identity(self.fiber(), &HSeries::one(self.truncation())));
        }
        LegMatrix::product(&factors)
    }

    /// `∇_i(z)` at the instance's own base point.
    pub fn build_nabla(&self, i: usize) -> Result<LegMatrix<HSeries>> {
        self.nabla_at(&self.z, i, None)
    }
}

/// `∇_j(z - κh e_i) ∇_i(z) - ∇_i(z - κh e_j) ∇_j(z)` for one pair.
pub fn flatness_pair(inst: &QKZInstance, i: usize, j: usize, fault: Option<NablaFault>) -> Result<Status> {
    let z = inst.points();
    let lhs = inst.nabla_at(&inst.stepped(z, i)?, j, fault)?.mul(&inst.nabla_at(z, i, fault)?)?;
    let rhs = inst.nabla_at(&inst.stepped(z, j)?, i, fault)?.mul(&inst.nabla_at(z, j, fault)?)?;
    Ok(Status::of_difference(&lhs, &rhs))
}

/// Flatness over all pairs `i < j`, in pair order.
pub fn check_flatness(inst: &QKZInstance, fault: Option<NablaFault>) -> Result<Vec<((usize, usize), Status)>> {
    let n = inst.n_points();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    pairs
        .par_iter()
        .map(|&(i, j)| flatness_pair(inst, i, j, fault).map(|s| ((i, j), s)))
        .collect()
}

/// `B(z) ∇_i(z) = ∇_n(z′) B(z)`-style check: with
/// `B(z) = β^{(n-1,n)}⋯β^{(i,i+1)}` moving `V^i` to the last slot,
/// verifies `B(z - κh e_i) ∇_i(z) = ∇_n(z′) B(z)`.
pub fn check_braiding_equivariance(inst: &QKZInstance, i: usize) -> Result<Status> {
    let n = inst.n_points();
    if i >= n {
        return Err(Error::BadLeg(i + 1));
    }
    let z = inst.points();
    let arrangement = |pts: &[Point]| -> Vec<(ComoduleWord, Point)> {
        inst.words().iter().cloned().zip(pts.iter().cloned()).collect()
    };
    let swaps: Vec<usize> = (i..n - 1).collect();
    let b_z = braid_word(inst.rbar(), &arrangement(z), &swaps)?;
    let b_step = braid_word(inst.rbar(), &arrangement(&inst.stepped(z, i)?), &swaps)?;
    let perm = |v: &[Point]| -> Vec<Point> {
        let mut out: Vec<Point> = v.iter().enumerate().filter(|&(k, _)| k != i).map(|(_, p)| p.clone()).collect();
        out.push(v[i].clone());
        out
    };
    let mut words: Vec<ComoduleWord> = inst.words().to_vec();
    let moved = words.remove(i);
    words.push(moved);
    let permuted = QKZInstance::new(inst.rbar().clone(), perm(z), words, inst.k().clone())?;
    let lhs = b_step.mul(&inst.build_nabla(i)?)?;
    let rhs = permuted.build_nabla(n - 1)?.mul(&b_z)?;
    Ok(Status::of_difference(&lhs, &rhs))
}

/// Grade-1 part of a matrix, as a truncation-0 matrix.
pub fn grade_one(m: &LegMatrix<HSeries>) -> LegMatrix<HSeries> {
    m.map(|x| HSeries::from_q(x.grade(1).clone(), 0))
}

/// `-Σ_{j≠i} r̄^{ji}_{V^jV^i}(z_j - z_i)` on the fiber, truncation 0, where a
/// word pair contributes one term per pair of factors.
pub fn classical_kz(inst: &QKZInstance, i: usize) -> Result<LegMatrix<HSeries>> {
    let mode = inst.mode();
    let r = classical_grade(inst.rbar());
    let offs = inst.offsets();
    let fiber = inst.fiber();
    let z0: Vec<Point> = inst.points().iter().map(|p| p.truncate(0)).collect();
    let mut acc = LegMatrix::zeros(fiber.clone(), fiber.clone(), &HSeries::zero(0));
    for j in (0..inst.n_points()).filter(|&j| j != i) {
        let (vj, vi) = (&inst.words()[j], &inst.words()[i]);
        for (a, pa) in vj.points(mode)?.iter().enumerate() {
            for (b, pb) in vi.points(mode)?.iter().enumerate() {
                let arg = z0[j].compose(&pa.truncate(0))?.minus(&z0[i].compose(&pb.truncate(0))?)?;
                let term = r.eval(&arg)?.embed(&fiber, &[offs[j] + a + 1, offs[i] + b + 1])?;
                acc = acc.sub(&term)?;
            }
        }
    }
    Ok(acc)
}

/// Returns the grade-1 part of `∇_i(z)` and whether it matches the classical
/// KZ operator.
pub fn quasiclassical_limit(inst: &QKZInstance, i: usize) -> Result<(LegMatrix<HSeries>, Status)> {
    let g1 = grade_one(&inst.build_nabla(i)?);
    let expected = classical_kz(inst, i)?;
    let st = Status::of_difference(&g1, &expected);
    Ok((g1, st))
}

/// `F(z - κh e_i) - ∇_i(z) F(z)`.
pub fn residual_qkz(inst: &QKZInstance, i: usize, f_at_z: &[HSeries], f_at_step: &[HSeries]) -> Result<Vec<HSeries>> {
    let nabla = inst.build_nabla(i)?;
    if f_at_step.len() != nabla.nrows() {
        return Err(Error::Dimension(format!("vector of length {} on a fiber of dimension {}", f_at_step.len(), nabla.nrows())));
    }
    let image = nabla.apply(f_at_z)?;
    Ok(f_at_step.iter().zip(&image).map(|(a, b)| a.sub(b)).collect())
}

/// Residual with `F` given as a function of the base point.
pub fn residual_qkz_with(
    inst: &QKZInstance,
    i: usize,
    f: impl Fn(&[Point]) -> Result<Vec<HSeries>>,
) -> Result<Vec<HSeries>> {
    let z = inst.points();
    residual_qkz(inst, i, &f(z)?, &f(&inst.stepped(z, i)?)?)
}

/// `∇_i(z + (a,…,a)) = ∇_i(z)` for every `i`.
pub fn translation_invariance(inst: &QKZInstance, a: &Point) -> Result<Status> {
    let shifted: Vec<Point> = inst.points().iter().map(|p| p.compose(a)).collect::<Result<_>>()?;
    let other = inst.at_points(shifted)?;
    let mut st = Status::ExactZero;
    for i in 0..inst.n_points() {
        st = st.combine(Status::of_difference(&inst.build_nabla(i)?, &other.build_nabla(i)?));
    }
    Ok(st)
}

/// At `K = -N` the steps vanish and flatness becomes `[∇_i(z), ∇_j(z)] = 0`.
pub fn commutativity_at_zero_kappa(inst: &QKZInstance) -> Result<Status> {
    let d = inst.truncation();
    let k = HSeries::from_q(-q(inst.dim() as i64), d);
    let zero = inst.with_k(k)?;
    let n = zero.n_points();
    let ops = (0..n).map(|i| zero.build_nabla(i)).collect::<Result<Vec<_>>>()?;
    let mut st = Status::ExactZero;
    for i in 0..n {
        for j in i + 1..n {
            st = st.combine(Status::of_difference(&ops[i].mul(&ops[j])?, &ops[j].mul(&ops[i])?));
        }
    }
    Ok(st)
}

/// Whether the `h⁰` grade of `m` is the identity.
pub fn is_identity_at_h0(m: &LegMatrix<HSeries>) -> bool {
    let n = m.nrows();
    (0..n).all(|i| (0..n).all(|j| *m.get(i, j).grade(0) == if i == j { q(1) } else { q(0) }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{qr, Q};
    use crate::qdet::normalize;
    use crate::rmatrix::RMatrixFamily;

    const D: usize = 3;

    fn rbar(n: usize) -> LegMatrix<Scalar> {
        normalize(&RMatrixFamily::build_rational(n, D).unwrap()).unwrap().rbar().clone()
    }

    fn pts(cs: &[Q]) -> Vec<Point> {
        cs.iter().map(|c| Point::constant(c.clone(), Mode::Additive, D).unwrap()).collect()
    }

    fn basic(n: usize) -> Vec<ComoduleWord> {
        vec![ComoduleWord::basic(D); n]
    }

    #[test]
    fn two_point_operators() {
        let rb = rbar(2);
        let inst = QKZInstance::new(rb.clone(), pts(&[q(0), q(1)]), basic(2), HSeries::from_int(1, D)).unwrap();
        // ∇₂ = R^{12}(z₁ - z₂ + κh); ∇₁ = R^{21}(z₂ - z₁).
        let arg = Point::constant(q(-1), Mode::Additive, D).unwrap().compose(&inst.kappa_step().unwrap()).unwrap();
        assert_eq!(inst.build_nabla(1).unwrap(), rb.eval(&arg).unwrap());
        let s = LegMatrix::flip(2, &HSeries::one(D));
        let r21 = s.mul(&rb.eval(&Point::constant(q(1), Mode::Additive, D).unwrap()).unwrap()).unwrap().mul(&s).unwrap();
        assert_eq!(inst.build_nabla(0).unwrap(), r21);
        assert!(is_identity_at_h0(&inst.build_nabla(0).unwrap()));
        assert!(check_flatness(&inst, None).unwrap().iter().all(|(_, s)| s.is_zero()));
    }

    #[test]
    fn three_points_flat_and_equivariant() {
        let inst = QKZInstance::new(rbar(2), pts(&[q(0), q(1), qr(5, 2)]), basic(3), HSeries::from_int(1, D)).unwrap();
        for (_, s) in check_flatness(&inst, None).unwrap() {
            assert_eq!(s, Status::ExactZero);
        }
        let dropped = check_flatness(&inst, Some(NablaFault::DropKappaShift)).unwrap();
        assert_eq!(Status::all(dropped.iter().map(|p| p.1)), Status::FailsAtGrade(3));
        let reversed = check_flatness(&inst, Some(NablaFault::ReversedArgument)).unwrap();
        assert!(Status::all(reversed.iter().map(|p| p.1)).grade().is_some_and(|g| g <= 2));
        for i in 0..3 {
            assert_eq!(check_braiding_equivariance(&inst, i).unwrap(), Status::ExactZero);
            assert_eq!(quasiclassical_limit(&inst, i).unwrap().1, Status::ExactZero);
        }
        let a = Point::constant(qr(2, 3), Mode::Additive, D).unwrap();
        assert_eq!(translation_invariance(&inst, &a).unwrap(), Status::ExactZero);
        assert_eq!(commutativity_at_zero_kappa(&inst).unwrap(), Status::ExactZero);
    }

    #[test]
    fn colliding_points_are_rejected() {
        let r = QKZInstance::new(rbar(2), pts(&[q(1), q(1)]), basic(2), HSeries::from_int(1, D));
        assert!(matches!(r, Err(Error::Pole(_))));
    }

    #[test]
    fn grade_one_solution() {
        // v = e₁⊗e₂ - e₂⊗e₁ is a σ-eigenvector, so F(z) = (z₂ - z₁) v solves
        // the two-point system to first order when κ₀ = 3/2.
        let k = HSeries::from_q(qr(-1, 2), D);
        let inst = QKZInstance::new(rbar(2), pts(&[q(0), q(1)]), basic(2), k).unwrap();
        let f = |z: &[Point]| -> Result<Vec<HSeries>> {
            let dz = z[1].minus(&z[0])?.value().clone();
            Ok([0, 1, -1, 0].iter().map(|&c| dz.scale(&q(c))).collect())
        };
        let res = residual_qkz_with(&inst, 0, f).unwrap();
        assert!(Status::of_vector(&res).grade().is_none_or(|g| g >= 2));
        // With κ₀ = 2 instead the first-order balance fails.
        let off = inst.with_k(HSeries::zero(D)).unwrap();
        let res = residual_qkz_with(&off, 0, f).unwrap();
        assert_eq!(Status::of_vector(&res), Status::FailsAtGrade(1));
    }
}
