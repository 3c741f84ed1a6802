//! Rational and trigonometric R-matrix families on `k^N ⊗ k^N`.
//!
//! `R(w)` is stored as a matrix over [`Scalar`], one symbolic coordinate. The
//! rational family lives in the additive coordinate `w = u`; the
//! trigonometric one (N = 2, six-vertex) in the multiplicative coordinate
//! `w = e^u`, with `q = e^h` expanded to the truncation order.

use num_traits::One;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::check::Status;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::poly::{q, qr, Poly, Q};
use crate::ratfn::RatFn;
use crate::series::{HSeries, Mode, Point, Scalar};
use crate::tensor::{Entry, LegMatrix, LegShape};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyKind {
    Rational,
    Trigonometric,
    /// Reserved; always rejected.
    Elliptic,
}

impl FamilyKind {
    pub fn name(self) -> &'static str {
        match self {
            FamilyKind::Rational => "rational",
            FamilyKind::Trigonometric => "trigonometric",
            FamilyKind::Elliptic => "elliptic",
        }
    }
}

/// `{"family": ..., "N": ..., "D": ...}`
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyDescriptor {
    pub family: FamilyKind,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "D")]
    pub d: usize,
}

impl FamilyDescriptor {
    pub fn new(family: FamilyKind, n: usize, d: usize) -> Self {
        FamilyDescriptor { family, n, d }
    }

    pub fn mode(&self) -> Mode {
        match self.family {
            FamilyKind::Trigonometric => Mode::Multiplicative,
            _ => Mode::Additive,
        }
    }

    /// Checks that the family can be built.
    pub fn validate(&self) -> Result<()> {
        match self.family {
            FamilyKind::Elliptic => Err(Error::OutOfScope("elliptic family out of scope".into())),
            FamilyKind::Rational if self.n < 2 => {
                Err(Error::Precondition(format!("rational family needs N >= 2, got {}", self.n)))
            }
            FamilyKind::Trigonometric if self.n != 2 => {
                Err(Error::Precondition(format!("trigonometric family is built for N = 2 only, got {}", self.n)))
            }
            _ => Ok(()),
        }
    }
}

/// An R-matrix family together with the data needed to rebuild it at another
/// truncation order.
#[derive(Clone, Debug, PartialEq)]
pub struct RMatrixFamily {
    desc: FamilyDescriptor,
    /// Extra `h` added to entry `(0, 0)`; a fault-injection control.
    perturbed: bool,
    r: LegMatrix<Scalar>,
}

impl RMatrixFamily {
    pub fn build(desc: FamilyDescriptor) -> Result<Self> {
        desc.validate()?;
        let r = match desc.family {
            FamilyKind::Rational => rational_matrix(desc.n, desc.d)?,
            FamilyKind::Trigonometric => trigonometric_matrix(desc.d)?,
            FamilyKind::Elliptic => unreachable!("rejected by validate"),
        };
        Ok(RMatrixFamily { desc, perturbed: false, r })
    }

    pub fn build_rational(n: usize, d: usize) -> Result<Self> {
        Self::build(FamilyDescriptor::new(FamilyKind::Rational, n, d))
    }

    pub fn build_trigonometric(d: usize) -> Result<Self> {
        Self::build(FamilyDescriptor::new(FamilyKind::Trigonometric, 2, d))
    }

    /// Copy with `h` added to the `(e_1⊗e_1, e_1⊗e_1)` entry.
    pub fn perturbed(&self) -> Self {
        let mut r = self.r.clone();
        let h = Scalar::h(self.d(), self.mode());
        let e = r.get(0, 0).checked_add(&h).expect("same ring");
        r.set(0, 0, e);
        RMatrixFamily { desc: self.desc, perturbed: true, r }
    }

    pub fn is_perturbed(&self) -> bool {
        self.perturbed
    }

    /// The same family rebuilt at truncation order `d`.
    pub fn with_truncation(&self, d: usize) -> Result<Self> {
        let base = Self::build(FamilyDescriptor { d, ..self.desc })?;
        Ok(if self.perturbed { base.perturbed() } else { base })
    }

    pub fn descriptor(&self) -> FamilyDescriptor {
        self.desc
    }

    pub fn kind(&self) -> FamilyKind {
        self.desc.family
    }

    pub fn n(&self) -> usize {
        self.desc.n
    }

    pub fn d(&self) -> usize {
        self.desc.d
    }

    pub fn mode(&self) -> Mode {
        self.desc.mode()
    }

    pub fn matrix(&self) -> &LegMatrix<Scalar> {
        &self.r
    }

    /// The group element `N h`.
    pub fn crossing_shift(&self) -> Point {
        Point::h_multiple(&q(self.n() as i64), self.mode(), self.d())
    }

    /// The classical grade `r` in `R = 1 - h r + O(h^2)`, as a matrix with
    /// truncation 0.
    pub fn classical_r(&self) -> LegMatrix<Scalar> {
        classical_grade(&self.r)
    }
}

/// `1 - h (σ - 1/N) / (w - h/N)`.
fn rational_matrix(n: usize, d: usize) -> Result<LegMatrix<Scalar>> {
    let mode = Mode::Additive;
    let h = Scalar::h(d, mode);
    let den = Scalar::w(d, mode).checked_sub(&h.scale_q(&qr(1, n as i64)))?;
    let s = h.checked_div(&den)?;
    let shape = LegShape::uniform(n, 2);
    let one = Scalar::one(d, mode);
    let sigma = LegMatrix::flip(n, &one);
    let id = LegMatrix::identity(shape.clone(), &one);
    let inner = sigma.sub(&id.scale(&Scalar::from_q(qr(1, n as i64), d, mode)))?;
    id.sub(&inner.scale(&s))
}

/// Polynomial in `w` with `h`-series coefficients, `terms[k]` multiplying `w^k`.
fn hpoly(terms: &[HSeries], d: usize, mode: Mode) -> Scalar {
    let grades = (0..=d)
        .map(|m| RatFn::poly(Poly::from_coeffs(terms.iter().map(|t| t.grade(m).clone()).collect())))
        .collect();
    Scalar::from_grades(grades, d, mode)
}

/// Six-vertex matrix in the symmetric gauge, normalized so that the weight of
/// `e_1⊗e_1 → e_1⊗e_1` is one at `h = 0`:
///
/// ```text
/// a = (w² q^{-1/2} - q^{3/2}) / (w² - q)
/// b = q^{1/2} (w² - 1) / (w² - q)
/// c = -(q^{3/2} - q^{-1/2}) w / (w² - q)
/// ```
fn trigonometric_matrix(d: usize) -> Result<LegMatrix<Scalar>> {
    let mode = Mode::Multiplicative;
    let e = |num: i64, den: i64| HSeries::exp_ch(&qr(num, den), d);
    let zero = HSeries::zero(d);
    let den = hpoly(&[e(1, 1).neg(), zero.clone(), HSeries::one(d)], d, mode);
    let a = hpoly(&[e(3, 2).neg(), zero.clone(), e(-1, 2)], d, mode).checked_div(&den)?;
    let b = hpoly(&[e(1, 2).neg(), zero.clone(), e(1, 2)], d, mode).checked_div(&den)?;
    let c = hpoly(&[zero, e(-1, 2).checked_sub(&e(3, 2))?], d, mode).checked_div(&den)?;
    let shape = LegShape::uniform(2, 2);
    let mut r = LegMatrix::zeros(shape.clone(), shape, &Scalar::zero(d, mode));
    r.set(0, 0, a.clone());
    r.set(3, 3, a);
    r.set(1, 1, b.clone());
    r.set(2, 2, b);
    r.set(1, 2, c.clone());
    r.set(2, 1, c);
    Ok(r)
}

/// `-R_1` as a truncation-0 matrix.
pub fn classical_grade(r: &LegMatrix<Scalar>) -> LegMatrix<Scalar> {
    r.map(|x| {
        let g = if x.truncation() >= 1 { Field::neg(x.grade(1)) } else { <RatFn as Field>::zero() };
        Scalar::from_ratfn(g, 0, x.mode())
    })
}

/// Deterministic sample coordinates for the non-symbolic spectral variables.
pub fn sample_values() -> Vec<Q> {
    vec![q(1), qr(1, 2), qr(-1, 3), qr(7, 5), q(-2)]
}

/// A pair `(u_2, u_3)` substituted into a three-leg identity with `u_1 = w`.
pub type SampleTuple = (Q, Q);

/// Candidate tuples: consecutive pairs of the sample values (cyclically),
/// followed by every other ordered pair as replacements.
pub fn candidate_tuples(values: &[Q]) -> Vec<SampleTuple> {
    let n = values.len();
    let mut out: Vec<SampleTuple> = (0..n).map(|k| (values[k].clone(), values[(k + 1) % n].clone())).collect();
    for i in 0..n {
        for j in 0..n {
            let t = (values[i].clone(), values[j].clone());
            if i != j && !out.contains(&t) {
                out.push(t);
            }
        }
    }
    out
}

fn point(c: &Q, mode: Mode, d: usize) -> Result<Point> {
    Point::constant(c.clone(), mode, d)
}

fn matrix_regular_at(r: &LegMatrix<Scalar>, p: &Point) -> bool {
    r.entries().iter().all(|x| x.is_regular_at(p))
}

/// `R^{12}(u1-u2) R^{13}(u1-u3) R^{23}(u2-u3) - R^{23}(u2-u3) R^{13}(u1-u3) R^{12}(u1-u2)`
/// with `u1 = w` symbolic.
pub fn qybe_residual(r: &LegMatrix<Scalar>, tuple: &SampleTuple) -> Result<LegMatrix<Scalar>> {
    let proto = r.proto();
    let (mode, d) = (proto.mode(), proto.truncation());
    let n = r.shape().dims()[0];
    let target = LegShape::uniform(n, 3);
    let p2 = point(&tuple.0, mode, d)?;
    let p3 = point(&tuple.1, mode, d)?;
    let r12 = r.translate(&p2.inverse())?.embed(&target, &[1, 2])?;
    let r13 = r.translate(&p3.inverse())?.embed(&target, &[1, 3])?;
    let r23 = r.eval(&p2.minus(&p3)?)?.to_scalar(mode).embed(&target, &[2, 3])?;
    let lhs = LegMatrix::product([&r12, &r13, &r23])?;
    let rhs = LegMatrix::product([&r23, &r13, &r12])?;
    lhs.sub(&rhs)
}

/// Classical Yang–Baxter residual of a truncation-0 matrix `r`.
pub fn cybe_residual(r: &LegMatrix<Scalar>, tuple: &SampleTuple) -> Result<LegMatrix<Scalar>> {
    let proto = r.proto();
    let mode = proto.mode();
    let n = r.shape().dims()[0];
    let target = LegShape::uniform(n, 3);
    let p2 = point(&tuple.0, mode, 0)?;
    let p3 = point(&tuple.1, mode, 0)?;
    let r12 = r.translate(&p2.inverse())?.embed(&target, &[1, 2])?;
    let r13 = r.translate(&p3.inverse())?.embed(&target, &[1, 3])?;
    let r23 = r.eval(&p2.minus(&p3)?)?.to_scalar(mode).embed(&target, &[2, 3])?;
    let comm = |a: &LegMatrix<Scalar>, b: &LegMatrix<Scalar>| -> Result<LegMatrix<Scalar>> {
        a.mul(b)?.sub(&b.mul(a)?)
    };
    comm(&r12, &r13)?.add(&comm(&r12, &r23)?)?.add(&comm(&r13, &r23)?)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SampledCheck {
    /// Tuples actually used, in order.
    pub tuples: Vec<SampleTuple>,
    /// Candidates rejected by pole screening.
    pub replaced: Vec<SampleTuple>,
    pub statuses: Vec<Status>,
}

impl SampledCheck {
    pub fn status(&self) -> Status {
        Status::all(self.statuses.iter().copied())
    }
}

/// Picks `count` tuples whose constant difference `u2 - u3` is a regular
/// point of `r` (and a valid point in multiplicative mode); rejected
/// candidates are returned separately.
pub fn screen_tuples(r: &LegMatrix<Scalar>, values: &[Q], count: usize) -> Result<(Vec<SampleTuple>, Vec<SampleTuple>)> {
    let proto = r.proto();
    let (mode, d) = (proto.mode(), proto.truncation());
    let mut used = Vec::new();
    let mut replaced = Vec::new();
    for t in candidate_tuples(values) {
        if used.len() == count {
            break;
        }
        let ok = match (point(&t.0, mode, d), point(&t.1, mode, d)) {
            (Ok(a), Ok(b)) => matrix_regular_at(r, &a.minus(&b)?),
            _ => false,
        };
        if ok {
            used.push(t);
        } else {
            replaced.push(t);
        }
    }
    if used.len() < count {
        return Err(Error::Pole(format!("only {} of {count} sample tuples avoid poles", used.len())));
    }
    Ok((used, replaced))
}

/// QYBE with one symbolic variable over `count` screened sample tuples.
pub fn check_qybe(r: &LegMatrix<Scalar>, values: &[Q], count: usize) -> Result<SampledCheck> {
    let (tuples, replaced) = screen_tuples(r, values, count)?;
    let statuses = tuples
        .par_iter()
        .map(|t| qybe_residual(r, t).map(|res| Status::of(&res)))
        .collect::<Result<Vec<_>>>()?;
    Ok(SampledCheck { tuples, replaced, statuses })
}

/// Classical YBE on the grade-1 part of `r`.
pub fn check_cybe(r: &LegMatrix<Scalar>, values: &[Q], count: usize) -> Result<SampledCheck> {
    let cr = classical_grade(r);
    let (tuples, replaced) = screen_tuples(&cr, values, count)?;
    let statuses = tuples
        .par_iter()
        .map(|t| cybe_residual(&cr, t).map(|res| Status::of(&res)))
        .collect::<Result<Vec<_>>>()?;
    Ok(SampledCheck { tuples, replaced, statuses })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Crossing {
    /// Whether the `t_1` and `t_2` forms agree exactly.
    pub forms_agree: bool,
    /// `X(w) = g(w) R(w + Nh)`.
    pub g: Scalar,
}

/// `(((R^{-1})^{t_k})^{-1})^{t_k}`.
pub fn crossing_form(r: &LegMatrix<Scalar>, leg: usize) -> Result<LegMatrix<Scalar>> {
    r.inv()?.partial_transpose(leg)?.inv()?.partial_transpose(leg)
}

/// Computes both crossing forms and the proportionality scalar `g` against
/// `R(w + shift)`.
pub fn check_crossing(r: &LegMatrix<Scalar>, shift: &Point) -> Result<Crossing> {
    let x = crossing_form(r, 1)?;
    let y = crossing_form(r, 2)?;
    let forms_agree = x == y;
    let target = r.translate(shift)?;
    let k = (0..target.nrows())
        .find(|&i| target.get(i, i).is_unit())
        .ok_or_else(|| Error::NotProportional("no unit diagonal entry".into()))?;
    let g = x.get(k, k).checked_div(target.get(k, k))?;
    if x != target.scale(&g) {
        return Err(Error::NotProportional("crossing form is not a multiple of R(w + Nh)".into()));
    }
    Ok(Crossing { forms_agree, g })
}

/// Status of `θ²(R(w)) - R(w + shift)`.
pub fn theta_squared_residual(r: &LegMatrix<Scalar>, shift: &Point) -> Result<Status> {
    Ok(Status::of_difference(&r.theta()?.theta()?, &r.translate(shift)?))
}

/// `R(w) · σ R(w⁻) σ` where `w⁻` is the group inverse; must be a scalar.
pub fn unitarity_scalar(r: &LegMatrix<Scalar>) -> Result<Scalar> {
    let n = r.shape().dims()[0];
    let sigma = LegMatrix::flip(n, &r.proto().one_like());
    let r21 = sigma.mul(&r.reflect())?.mul(&sigma)?;
    r.mul(&r21)?
        .as_scalar()
        .ok_or_else(|| Error::NotScalar("R(w) R^{21}(w^{-1}) is not scalar".into()))
}

/// Leading behaviour of the trigonometric family under `(u, h) -> (su, sh)`
/// as `s -> 0`, compared entrywise with the rational family at the same
/// truncation: grade `m` of the former must have a pole of order at most
/// `m` at `w = 1` with leading coefficient equal to `u^m` times grade `m` of
/// the latter.
pub fn check_degeneration(trig: &LegMatrix<Scalar>, rational: &LegMatrix<Scalar>) -> Result<Status> {
    if trig.nrows() != rational.nrows() {
        return Err(Error::Dimension("families act on different spaces".into()));
    }
    let d = trig.proto().truncation().min(rational.proto().truncation());
    let one = <Q as One>::one();
    let wm1 = Poly::from_coeffs(vec![-one.clone(), one.clone()]);
    for m in 0..=d {
        let pw = wm1.pow(m);
        let um = Poly::monomial(one.clone(), m);
        for (t, r) in trig.entries().iter().zip(rational.entries()) {
            let lt = RatFn::new(t.grade(m).num() * &pw, t.grade(m).den().clone()).eval(&one);
            let lr = RatFn::new(r.grade(m).num() * &um, r.grade(m).den().clone()).as_constant();
            match (lt, lr) {
                (Some(a), Some(b)) if a == b => {}
                _ => return Ok(Status::FailsAtGrade(m)),
            }
        }
    }
    Ok(Status::ExactZero)
}

/// `true` when every entry of the `h^0` grade equals the identity.
pub fn is_identity_at_h0(r: &LegMatrix<Scalar>) -> bool {
    let n = r.nrows();
    (0..n).all(|i| {
        (0..n).all(|j| {
            let g = r.get(i, j).grade(0);
            if i == j {
                g.as_constant().is_some_and(|c| One::is_one(&c))
            } else {
                g.num().is_zero()
            }
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c_over_w(c: Q) -> RatFn {
        RatFn::new(Poly::constant(c), Poly::x())
    }

    #[test]
    fn rational_entries() {
        let f = RMatrixFamily::build_rational(2, 4).unwrap();
        let r = f.matrix();
        // (e1e1, e1e1): 1 - (h/2)/(w - h/2); grade 1 is -1/(2w).
        assert_eq!(r.get(0, 0).grade(1), &c_over_w(qr(-1, 2)));
        // (e1e2, e2e1): -h/(w - h/2); grade 1 is -1/w, grade 2 is -1/(2w^2).
        assert_eq!(r.get(1, 2).grade(1), &c_over_w(q(-1)));
        assert_eq!(
            r.get(1, 2).grade(2),
            &RatFn::new(Poly::constant(qr(-1, 2)), Poly::monomial(q(1), 2))
        );
        assert!(is_identity_at_h0(r));
        let cr = f.classical_r();
        // r = (σ - 1/2)/w
        assert_eq!(cr.get(1, 2).grade(0), &c_over_w(q(1)));
        assert_eq!(cr.get(1, 1).grade(0), &c_over_w(qr(-1, 2)));
    }

    #[test]
    fn trigonometric_is_identity_at_h0() {
        let f = RMatrixFamily::build_trigonometric(3).unwrap();
        assert!(is_identity_at_h0(f.matrix()));
        assert_eq!(f.mode(), Mode::Multiplicative);
    }

    #[test]
    fn qybe_holds_and_perturbation_fails() {
        let f = RMatrixFamily::build_rational(2, 3).unwrap();
        let samples = sample_values();
        let rep = check_qybe(f.matrix(), &samples, 2).unwrap();
        assert_eq!(rep.status(), Status::ExactZero);
        let bad = f.perturbed();
        // Grade 1 of both sides is r12 + r13 + r23, so a fault shows at grade 2.
        let rep = check_qybe(bad.matrix(), &samples, 1).unwrap();
        assert_eq!(rep.status(), Status::FailsAtGrade(2));
    }

    #[test]
    fn qybe_trigonometric() {
        let f = RMatrixFamily::build_trigonometric(3).unwrap();
        let rep = check_qybe(f.matrix(), &sample_values(), 2).unwrap();
        assert_eq!(rep.status(), Status::ExactZero);
    }

    #[test]
    fn screening_replaces_pole_tuples() {
        let f = RMatrixFamily::build_rational(2, 2).unwrap();
        // u2 = u3 sits on the pole of R at w = h/N.
        let vals = vec![q(1), q(1), q(2)];
        let (used, replaced) = screen_tuples(f.matrix(), &vals, 2).unwrap();
        assert_eq!(replaced, vec![(q(1), q(1))]);
        assert!(used.iter().all(|(a, b)| a != b));
    }

    #[test]
    fn crossing_rational() {
        let f = RMatrixFamily::build_rational(2, 3).unwrap();
        let c = check_crossing(f.matrix(), &f.crossing_shift()).unwrap();
        assert!(c.forms_agree);
        assert_eq!(c.g.grade(0), &RatFn::constant(q(1)));
    }

    #[test]
    fn unitarity_rational() {
        let f = RMatrixFamily::build_rational(2, 3).unwrap();
        let s = unitarity_scalar(f.matrix()).unwrap();
        assert_eq!(s.grade(0), &RatFn::constant(q(1)));
        assert!(!s.is_one());
    }

    #[test]
    fn degeneration() {
        let t = RMatrixFamily::build_trigonometric(4).unwrap();
        let r = RMatrixFamily::build_rational(2, 4).unwrap();
        assert_eq!(check_degeneration(t.matrix(), r.matrix()).unwrap(), Status::ExactZero);
        // A constant h-term disappears in the limit; an h/w term does not.
        assert_eq!(check_degeneration(t.perturbed().matrix(), r.matrix()).unwrap(), Status::ExactZero);
        let mut bad = r.matrix().clone();
        let hw = Scalar::from_grades(vec![RatFn::constant(q(0)), c_over_w(q(1)), RatFn::constant(q(0)), RatFn::constant(q(0)), RatFn::constant(q(0))], 4, Mode::Additive);
        bad.set(0, 0, bad.get(0, 0).checked_add(&hw).unwrap());
        assert_eq!(check_degeneration(t.matrix(), &bad).unwrap(), Status::FailsAtGrade(1));
    }

    #[test]
    fn descriptors() {
        let e = FamilyDescriptor::new(FamilyKind::Elliptic, 2, 2);
        assert_eq!(RMatrixFamily::build(e), Err(Error::OutOfScope("elliptic family out of scope".into())));
        assert!(RMatrixFamily::build(FamilyDescriptor::new(FamilyKind::Trigonometric, 3, 2)).is_err());
        let json = r#"{"family":"rational","N":3,"D":4}"#;
        let d: FamilyDescriptor = serde_json::from_str(json).unwrap();
        assert_eq!(d, FamilyDescriptor::new(FamilyKind::Rational, 3, 4));
        assert_eq!(serde_json::to_string(&d).unwrap(), json);
    }
}
