//! Tensor words of shifted basic comodules and their R-matrices.
//!
//! A word `V = E(a₁)⊗…⊗E(a_p)` occupies `p` legs of dimension `N`. Every
//! operator here is assembled from one matrix `R̄(w)`:
//!
//! ```text
//! R_{E(a)E(b)}(u) = R̄(u + a - b)
//! R_{VW}(u)       = Π_{i=p..1} Π_{j=1..q} R̄^{V_i W_j}(u + a_i - b_j)
//! L_V(w)          = R_{E,V}(w) = Π_{j=1..p} R̄^{0,V_j}(w - a_j)
//! β_{VW}(u)       = σ_{VW} R_{VW}(u)^{-1}
//! ```

use crate::check::Status;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::poly::Q;
use crate::rmatrix::SampleTuple;
use crate::series::{HSeries, Mode, Point, Scalar};
use crate::tensor::{Entry, LegMatrix, LegShape};

/// Ordered shifts of the factors; each shift is an additive displacement of
/// the spectral parameter.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ComoduleWord {
    shifts: Vec<HSeries>,
}

impl ComoduleWord {
    pub fn new(shifts: Vec<HSeries>) -> Result<Self> {
        if shifts.is_empty() {
            return Err(Error::Precondition("a word needs at least one factor".into()));
        }
        let d = shifts[0].truncation();
        if let Some(s) = shifts.iter().find(|s| s.truncation() != d) {
            return Err(Error::TruncationMismatch(d, s.truncation()));
        }
        Ok(ComoduleWord { shifts })
    }

    /// The basic comodule `E`.
    pub fn basic(d: usize) -> Self {
        ComoduleWord { shifts: vec![HSeries::zero(d)] }
    }

    /// `E(a)`.
    pub fn shifted(a: HSeries) -> Self {
        ComoduleWord { shifts: vec![a] }
    }

    pub fn shifts(&self) -> &[HSeries] {
        &self.shifts
    }

    pub fn len(&self) -> usize {
        self.shifts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shifts.is_empty()
    }

    pub fn truncation(&self) -> usize {
        self.shifts[0].truncation()
    }

    pub fn shape(&self, n: usize) -> LegShape {
        LegShape::uniform(n, self.len())
    }

    /// `V ⊗ W`.
    pub fn concat(&self, o: &ComoduleWord) -> ComoduleWord {
        let mut shifts = self.shifts.clone();
        shifts.extend(o.shifts.iter().cloned());
        ComoduleWord { shifts }
    }

    /// Every factor shifted by `t`.
    pub fn translated(&self, t: &HSeries) -> Result<ComoduleWord> {
        let shifts = self.shifts.iter().map(|s| s.checked_add(t)).collect::<Result<Vec<_>>>()?;
        Ok(ComoduleWord { shifts })
    }

    /// Whether some shift has a nonzero `h⁰` part (allowed, but outside
    /// `h·Q[[h]]`).
    pub fn has_constant_parts(&self) -> bool {
        self.shifts.iter().any(|s| !Field::is_zero(s.grade(0)))
    }

    /// Shifts as group elements of the given coordinate.
    pub fn points(&self, mode: Mode) -> Result<Vec<Point>> {
        self.shifts.iter().map(|s| Point::from_additive(s, mode)).collect()
    }
}

fn check_rbar(rbar: &LegMatrix<Scalar>) -> Result<usize> {
    let dims = rbar.shape().dims();
    if dims.len() != 2 || dims[0] != dims[1] || !rbar.is_square() {
        return Err(Error::Dimension("R-matrix must act on k^N ⊗ k^N".into()));
    }
    Ok(dims[0])
}

/// Pairs `(i, j)` of the hexagon product in multiplication order.
fn hexagon_order(p: usize, q: usize) -> Vec<(usize, usize)> {
    (0..p).rev().flat_map(|i| (0..q).map(move |j| (i, j))).collect()
}

/// `R_{VW}(w)` with `w` symbolic, on legs `[V…, W…]`.
pub fn build_rvw(rbar: &LegMatrix<Scalar>, v: &ComoduleWord, w: &ComoduleWord) -> Result<LegMatrix<Scalar>> {
    let n = check_rbar(rbar)?;
    let mode = rbar.proto().mode();
    let (a, b) = (v.points(mode)?, w.points(mode)?);
    let (p, q) = (v.len(), w.len());
    let full = v.shape(n).concat(&w.shape(n));
    let factors = hexagon_order(p, q)
        .into_iter()
        .map(|(i, j)| rbar.translate(&a[i].minus(&b[j])?)?.embed(&full, &[i + 1, p + j + 1]))
        .collect::<Result<Vec<_>>>()?;
    LegMatrix::product(&factors)
}

/// `R_{VW}(u)` at a point, evaluated factor by factor.
pub fn rvw_at(rbar: &LegMatrix<Scalar>, v: &ComoduleWord, w: &ComoduleWord, u: &Point) -> Result<LegMatrix<HSeries>> {
    let n = check_rbar(rbar)?;
    let mode = rbar.proto().mode();
    let (a, b) = (v.points(mode)?, w.points(mode)?);
    let (p, q) = (v.len(), w.len());
    let full = v.shape(n).concat(&w.shape(n));
    let factors = hexagon_order(p, q)
        .into_iter()
        .map(|(i, j)| rbar.eval(&u.compose(&a[i].minus(&b[j])?)?)?.embed(&full, &[i + 1, p + j + 1]))
        .collect::<Result<Vec<_>>>()?;
    LegMatrix::product(&factors)
}

/// `L_V(w)` on legs `[aux, V…]`.
pub fn build_l(rbar: &LegMatrix<Scalar>, v: &ComoduleWord) -> Result<LegMatrix<Scalar>> {
    let d = rbar.proto().truncation();
    build_rvw(rbar, &ComoduleWord::basic(d), v)
}

/// The block flip `V ⊗ W → W ⊗ V`.
pub fn word_flip<T: Entry>(n: usize, p: usize, q: usize, proto: &T) -> LegMatrix<T> {
    let perm: Vec<usize> = (p + 1..=p + q).chain(1..=p).collect();
    LegMatrix::permutation(&LegShape::uniform(n, p + q), &perm, proto).expect("block flip is a permutation")
}

/// `β_{VW}(u) = σ R_{VW}(u)^{-1}`, a map `V ⊗ W → W ⊗ V`.
pub fn build_braiding(rbar: &LegMatrix<Scalar>, v: &ComoduleWord, w: &ComoduleWord, u: &Point) -> Result<LegMatrix<HSeries>> {
    let n = check_rbar(rbar)?;
    let r = rvw_at(rbar, v, w, u)?;
    let flip = word_flip(n, v.len(), w.len(), r.proto());
    flip.mul(&r.inv()?)
}

/// `σ R_{VW}(w) σ R_{WV}(w⁻)`, which must be the identity on `W ⊗ V`.
pub fn unitarity_residual(rbar: &LegMatrix<Scalar>, v: &ComoduleWord, w: &ComoduleWord) -> Result<Status> {
    let n = check_rbar(rbar)?;
    let rvw = build_rvw(rbar, v, w)?;
    let rwv = build_rvw(rbar, w, v)?.reflect();
    let one = rbar.proto().one_like();
    let s_vw = word_flip(n, v.len(), w.len(), &one);
    let s_wv = word_flip(n, w.len(), v.len(), &one);
    let prod = LegMatrix::product([&s_vw, &rvw, &s_wv, &rwv])?;
    let id = LegMatrix::identity(prod.rows().clone(), &one);
    Ok(Status::of_difference(&prod, &id))
}

fn legs_of(offset: usize, len: usize) -> Vec<usize> {
    (offset + 1..=offset + len).collect()
}

/// Mixed Yang–Baxter equation for three words, `u₁ = w` symbolic and
/// `(u₂, u₃)` substituted.
pub fn mixed_ybe_residual(
    rbar: &LegMatrix<Scalar>,
    words: [&ComoduleWord; 3],
    tuple: &SampleTuple,
) -> Result<Status> {
    let n = check_rbar(rbar)?;
    let proto = rbar.proto();
    let (mode, d) = (proto.mode(), proto.truncation());
    let [v1, v2, v3] = words;
    let full = v1.shape(n).concat(&v2.shape(n)).concat(&v3.shape(n));
    let (l1, l2, l3) = (legs_of(0, v1.len()), legs_of(v1.len(), v2.len()), legs_of(v1.len() + v2.len(), v3.len()));
    let p2 = Point::constant(tuple.0.clone(), mode, d)?;
    let p3 = Point::constant(tuple.1.clone(), mode, d)?;
    let cat = |a: &[usize], b: &[usize]| -> Vec<usize> { a.iter().chain(b).copied().collect() };
    let r12 = build_rvw(rbar, v1, v2)?.translate(&p2.inverse())?.embed(&full, &cat(&l1, &l2))?;
    let r13 = build_rvw(rbar, v1, v3)?.translate(&p3.inverse())?.embed(&full, &cat(&l1, &l3))?;
    let r23 = rvw_at(rbar, v2, v3, &p2.minus(&p3)?)?.to_scalar(mode).embed(&full, &cat(&l2, &l3))?;
    let lhs = LegMatrix::product([&r12, &r13, &r23])?;
    let rhs = LegMatrix::product([&r23, &r13, &r12])?;
    Ok(Status::of_difference(&lhs, &rhs))
}

/// `I_left ⊗ X ⊗ I_right`.
pub fn pad<T: Entry>(x: &LegMatrix<T>, n: usize, left: usize, right: usize) -> LegMatrix<T> {
    let proto = x.proto();
    let mut out = if left > 0 { LegMatrix::identity(LegShape::uniform(n, left), proto).kron(x) } else { x.clone() };
    if right > 0 {
        out = out.kron(&LegMatrix::identity(LegShape::uniform(n, right), proto));
    }
    out
}

/// Applies braidings to adjacent positions of an arrangement of
/// `(word, point)` pairs; the argument of each braiding is the difference of
/// the points it swaps. Returns the composite map.
pub fn braid_word(
    rbar: &LegMatrix<Scalar>,
    start: &[(ComoduleWord, Point)],
    swaps: &[usize],
) -> Result<LegMatrix<HSeries>> {
    let n = check_rbar(rbar)?;
    let d = rbar.proto().truncation();
    let mut arr = start.to_vec();
    let total: usize = arr.iter().map(|(v, _)| v.len()).sum();
    let mut acc = LegMatrix::identity(LegShape::uniform(n, total), &HSeries::one(d));
    for &k in swaps {
        if k + 1 >= arr.len() {
            return Err(Error::BadLeg(k + 1));
        }
        let left: usize = arr[..k].iter().map(|(v, _)| v.len()).sum();
        let right = total - left - arr[k].0.len() - arr[k + 1].0.len();
        let (v, zv) = &arr[k];
        let (w, zw) = &arr[k + 1];
        let b = build_braiding(rbar, v, w, &zv.minus(zw)?)?;
        acc = pad(&b, n, left, right).mul(&acc)?;
        arr.swap(k, k + 1);
    }
    Ok(acc)
}

/// Braid relation `β₁β₂β₁ = β₂β₁β₂` (positions 0-based, applied right to left).
pub fn braid_residual(rbar: &LegMatrix<Scalar>, start: &[(ComoduleWord, Point); 3]) -> Result<Status> {
    let lhs = braid_word(rbar, start, &[0, 1, 0])?;
    let rhs = braid_word(rbar, start, &[1, 0, 1])?;
    Ok(Status::of_difference(&lhs, &rhs))
}

/// `β (L_{V(a)}^{0V}(w) L_W^{0W}(w)) = (L_W^{0W}(w) L_{V(a)}^{0V}(w)) β` with
/// `β = 1 ⊗ β_{VW}(a)` and `L_{V(a)}(w) = L_V(w - a)`.
pub fn intertwiner_residual(rbar: &LegMatrix<Scalar>, v: &ComoduleWord, w: &ComoduleWord, a: &Point) -> Result<Status> {
    let n = check_rbar(rbar)?;
    let mode = rbar.proto().mode();
    let (p, q) = (v.len(), w.len());
    let beta = pad(&build_braiding(rbar, v, w, a)?, n, 1, 0).to_scalar(mode);
    let lv = build_l(rbar, v)?.translate(&a.inverse())?;
    let lw = build_l(rbar, w)?;
    let vw = LegShape::uniform(n, 1 + p + q);
    let aux_then = |legs: Vec<usize>| -> Vec<usize> { std::iter::once(1).chain(legs).collect() };
    let lhs_act = lv
        .embed(&vw, &aux_then(legs_of(1, p)))?
        .mul(&lw.embed(&vw, &aux_then(legs_of(1 + p, q)))?)?;
    let rhs_act = lw
        .embed(&vw, &aux_then(legs_of(1, q)))?
        .mul(&lv.embed(&vw, &aux_then(legs_of(1 + q, p)))?)?;
    let lhs = beta.mul(&lhs_act)?;
    let rhs = rhs_act.mul(&beta)?;
    Ok(Status::of_difference(&lhs, &rhs))
}

/// `L_{V⊗W}(w) = L_V^{0,V}(w) L_W^{0,W}(w)`.
pub fn monoidality_residual(rbar: &LegMatrix<Scalar>, v: &ComoduleWord, w: &ComoduleWord) -> Result<Status> {
    check_rbar(rbar)?;
    let whole = build_l(rbar, &v.concat(w))?;
    let full = whole.shape().clone();
    let lv = build_l(rbar, v)?.embed(&full, &std::iter::once(1).chain(legs_of(1, v.len())).collect::<Vec<_>>())?;
    let lw = build_l(rbar, w)?.embed(&full, &std::iter::once(1).chain(legs_of(1 + v.len(), w.len())).collect::<Vec<_>>())?;
    Ok(Status::of_difference(&whole, &lv.mul(&lw)?))
}

/// `R_{VW}` is unchanged when both words are shifted by the same `t`.
pub fn translation_residual(rbar: &LegMatrix<Scalar>, v: &ComoduleWord, w: &ComoduleWord, t: &HSeries) -> Result<Status> {
    let a = build_rvw(rbar, v, w)?;
    let b = build_rvw(rbar, &v.translated(t)?, &w.translated(t)?)?;
    Ok(Status::of_difference(&a, &b))
}

/// `Π_{i=1..p} Π_{j=q..1} R̄^{i,p+j}(u_i - v_j + y)` at concrete arguments.
pub fn pairing_product(rbar: &LegMatrix<Scalar>, us: &[Point], vs: &[Point], y: &Point) -> Result<LegMatrix<HSeries>> {
    let n = check_rbar(rbar)?;
    let (p, q) = (us.len(), vs.len());
    if p == 0 || q == 0 {
        return Err(Error::Precondition("pairing product needs p, q >= 1".into()));
    }
    let full = LegShape::uniform(n, p + q);
    let mut factors = Vec::with_capacity(p * q);
    for (i, u) in us.iter().enumerate() {
        for (j, v) in vs.iter().enumerate().rev() {
            let arg = u.minus(v)?.compose(y)?;
            factors.push(rbar.eval(&arg)?.embed(&full, &[i + 1, p + j + 1])?);
        }
    }
    LegMatrix::product(&factors)
}

/// Small deterministic word set used by the representation suite: every
/// pair `(V, W)` with total length at most 3.
pub fn sample_words(d: usize) -> Vec<ComoduleWord> {
    let h = |c: i64, den: i64| HSeries::h(d).scale(&crate::poly::qr(c, den));
    vec![
        ComoduleWord::basic(d),
        ComoduleWord::shifted(h(1, 2)),
        ComoduleWord::new(vec![h(0, 1), h(-1, 3)]).expect("nonempty"),
        ComoduleWord::new(vec![h(2, 1), h(1, 1)]).expect("nonempty"),
    ]
}

/// Scales a rational into a constant point.
pub fn const_point(c: &Q, mode: Mode, d: usize) -> Result<Point> {
    Point::constant(c.clone(), mode, d)
}
