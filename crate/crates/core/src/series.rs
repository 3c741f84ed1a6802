//! The ground ring `k(Σ)[[h]] / (h^{D+1})` and its rational-coefficient
//! subring `Q[[h]] / (h^{D+1})`.
//!
//! A [`Scalar`] stores one canonical rational function of the curve
//! coordinate `w` per power of `h`. In additive mode `w` is the additive
//! coordinate `u`; in multiplicative mode `w = e^u`, so translating `u` by `t`
//! becomes `w ↦ w·e^t`.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::Field;
use crate::poly::{Poly, Q};
use crate::ratfn::RatFn;

/// Truncated power series in `h` over a field. The length is always `D + 1`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Series<F: Field> {
    c: Vec<F>,
}

/// Element of `Q[[h]]` truncated at order `D`.
pub type HSeries = Series<Q>;

impl<F: Field> Series<F> {
    pub fn zero(d: usize) -> Self {
        Series { c: vec![F::zero(); d + 1] }
    }

    pub fn one(d: usize) -> Self {
        Self::constant(F::one(), d)
    }

    pub fn constant(x: F, d: usize) -> Self {
        let mut c = vec![F::zero(); d + 1];
        c[0] = x;
        Series { c }
    }

    /// The series `h` itself.
    pub fn h(d: usize) -> Self {
        let mut s = Self::zero(d);
        if d >= 1 {
            s.c[1] = F::one();
        }
        s
    }

    /// Builds from grades; missing grades are zero, extra grades are dropped.
    pub fn from_grades(mut c: Vec<F>, d: usize) -> Self {
        c.resize(d + 1, F::zero());
        Series { c }
    }

    pub fn truncation(&self) -> usize {
        self.c.len() - 1
    }

    pub fn grades(&self) -> &[F] {
        &self.c
    }

    pub fn grade(&self, m: usize) -> &F {
        &self.c[m]
    }

    pub fn into_grades(self) -> Vec<F> {
        self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(F::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.c[0].is_one() && self.c[1..].iter().all(F::is_zero)
    }

    /// Lowest nonzero grade; `None` for zero.
    pub fn valuation(&self) -> Option<usize> {
        self.c.iter().position(|x| !x.is_zero())
    }

    pub fn is_unit(&self) -> bool {
        !self.c[0].is_zero()
    }

    fn check(&self, o: &Self) -> Result<()> {
        if self.c.len() != o.c.len() {
            return Err(Error::TruncationMismatch(self.truncation(), o.truncation()));
        }
        Ok(())
    }

    pub fn checked_add(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        Ok(Series {
            c: self.c.iter().zip(&o.c).map(|(a, b)| a.add(b)).collect(),
        })
    }

    pub fn checked_sub(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        Ok(Series {
            c: self.c.iter().zip(&o.c).map(|(a, b)| a.sub(b)).collect(),
        })
    }

    pub fn checked_mul(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        let n = self.c.len();
        let mut out = vec![F::zero(); n];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c[..n - i].iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] = out[i + j].add(&a.mul(b));
                }
            }
        }
        Ok(Series { c: out })
    }

    pub fn neg(&self) -> Self {
        Series {
            c: self.c.iter().map(F::neg).collect(),
        }
    }

    pub fn scale(&self, x: &F) -> Self {
        Series {
            c: self.c.iter().map(|a| a.mul(x)).collect(),
        }
    }

    /// Inverse of a unit: `b_0 = 1/a_0`, `b_m = -b_0 Σ_{k≥1} a_k b_{m-k}`.
    pub fn inv(&self) -> Result<Self> {
        if !self.is_unit() {
            return Err(Error::NotUnit);
        }
        let n = self.c.len();
        let b0 = self.c[0].inv();
        let mut b = Vec::with_capacity(n);
        b.push(b0.clone());
        for m in 1..n {
            let mut acc = F::zero();
            for k in 1..=m {
                if !self.c[k].is_zero() && !b[m - k].is_zero() {
                    acc = acc.add(&self.c[k].mul(&b[m - k]));
                }
            }
            b.push(acc.mul(&b0).neg());
        }
        Ok(Series { c: b })
    }

    /// `self / h^k` when the first `k` grades vanish; the result is known to
    /// order `D - k` only, so it carries truncation `D - k`.
    pub fn lower_by_h(&self, k: usize) -> Result<Self> {
        if k > self.truncation() || self.c[..k].iter().any(|x| !x.is_zero()) {
            return Err(Error::NotUnit);
        }
        Ok(Series { c: self.c[k..].to_vec() })
    }

    /// Division allowing a pure power of `h` in the divisor: `self / o` where
    /// `o = h^k u` with `u` a unit; the result has truncation `D - k`.
    pub fn checked_div(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        let k = o.valuation().ok_or(Error::NotUnit)?;
        let num = self.lower_by_h(k)?;
        let den = o.lower_by_h(k)?;
        num.checked_mul(&den.inv()?)
    }

    /// Drops grades above `d` (or pads with zeros).
    pub fn truncate(&self, d: usize) -> Self {
        Self::from_grades(self.c.clone(), d)
    }

    /// Apply a map to every grade.
    pub fn map_grades<G: Field>(&self, f: impl Fn(&F) -> G) -> Series<G> {
        Series {
            c: self.c.iter().map(f).collect(),
        }
    }

    pub fn pow(&self, k: usize) -> Self {
        let mut acc = Self::one(self.truncation());
        for _ in 0..k {
            acc = acc.checked_mul(self).expect("same truncation");
        }
        acc
    }
}

impl HSeries {
    pub fn from_q(x: Q, d: usize) -> Self {
        Self::constant(x, d)
    }

    pub fn from_int(n: i64, d: usize) -> Self {
        Self::constant(Q::from_integer(BigInt::from(n)), d)
    }

    /// `exp(t)` for `t` with vanishing constant term.
    pub fn exp(&self) -> Result<Self> {
        if !Zero::is_zero(&self.c[0]) {
            return Err(Error::InvalidShift(
                "exp of a series with nonzero constant term".into(),
            ));
        }
        let d = self.truncation();
        let mut acc = Self::one(d);
        let mut term = Self::one(d);
        for k in 1..=d {
            term = term.checked_mul(self)?.scale(&Q::new(BigInt::one(), BigInt::from(k)));
            acc = acc.checked_add(&term)?;
        }
        Ok(acc)
    }

    /// `exp(c h)` with rational `c`.
    pub fn exp_ch(c: &Q, d: usize) -> Self {
        Self::h(d).scale(c).exp().expect("zero constant term")
    }

    pub fn to_poly(&self) -> Poly {
        Poly::from_coeffs(self.c.clone())
    }

    pub fn from_poly(p: &Poly, d: usize) -> Self {
        Self::from_grades(p.coeffs().to_vec(), d)
    }

    /// Text form as a polynomial in `h`, e.g. `1/2*h^2 + 1`.
    pub fn to_text(&self) -> String {
        self.to_poly().display_with("h")
    }
}

impl<F: Field> fmt::Debug for Series<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.c).finish()
    }
}

/// Which group the curve coordinate lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// `Σ = G_a`; translation is `w ↦ w + t`.
    Additive,
    /// `Σ = G_m`; translation is `w ↦ w·t`.
    Multiplicative,
}

/// A point of `Σ(Q[[h]])`, also used as a group element acting by
/// translation on functions of `w`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Point {
    value: HSeries,
    mode: Mode,
}

impl Point {
    /// Wraps a raw coordinate value; in multiplicative mode its constant term
    /// must be nonzero.
    pub fn new(value: HSeries, mode: Mode) -> Result<Self> {
        if mode == Mode::Multiplicative && Zero::is_zero(&value.c[0]) {
            return Err(Error::InvalidShift(
                "multiplicative point with vanishing h^0 part".into(),
            ));
        }
        Ok(Point { value, mode })
    }

    pub fn identity(mode: Mode, d: usize) -> Self {
        let value = match mode {
            Mode::Additive => HSeries::zero(d),
            Mode::Multiplicative => HSeries::one(d),
        };
        Point { value, mode }
    }

    /// Point with constant coordinate value `c`.
    pub fn constant(c: Q, mode: Mode, d: usize) -> Result<Self> {
        Self::new(HSeries::from_q(c, d), mode)
    }

    /// The group element corresponding to the additive displacement `t` of
    /// the canonical parameter `u`: `t` itself, or `e^t` in multiplicative
    /// mode (where `t` must vanish at `h = 0`).
    pub fn from_additive(t: &HSeries, mode: Mode) -> Result<Self> {
        match mode {
            Mode::Additive => Ok(Point { value: t.clone(), mode }),
            Mode::Multiplicative => Ok(Point { value: t.exp()?, mode }),
        }
    }

    /// The displacement `c·h`.
    pub fn h_multiple(c: &Q, mode: Mode, d: usize) -> Self {
        Self::from_additive(&HSeries::h(d).scale(c), mode).expect("c h vanishes at h = 0")
    }

    pub fn value(&self) -> &HSeries {
        &self.value
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn truncation(&self) -> usize {
        self.value.truncation()
    }

    /// Reduction mod `h`.
    pub fn h0(&self) -> &Q {
        &self.value.c[0]
    }

    /// Group law: `a + b` or `a·b`.
    pub fn compose(&self, o: &Point) -> Result<Point> {
        if self.mode != o.mode {
            return Err(Error::ModeMismatch);
        }
        let value = match self.mode {
            Mode::Additive => self.value.checked_add(&o.value)?,
            Mode::Multiplicative => self.value.checked_mul(&o.value)?,
        };
        Ok(Point { value, mode: self.mode })
    }

    pub fn inverse(&self) -> Point {
        let value = match self.mode {
            Mode::Additive => self.value.neg(),
            Mode::Multiplicative => self.value.inv().expect("multiplicative points are units"),
        };
        Point { value, mode: self.mode }
    }

    /// `self ∘ o^{-1}`: the difference `a - b` (or quotient `a / b`).
    pub fn minus(&self, o: &Point) -> Result<Point> {
        self.compose(&o.inverse())
    }

    pub fn truncate(&self, d: usize) -> Point {
        Point { value: self.value.truncate(d), mode: self.mode }
    }
}

/// Element of `Q(w)[[h]] / (h^{D+1})` in a fixed coordinate mode.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Scalar {
    s: Series<RatFn>,
    mode: Mode,
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.s.fmt(f)
    }
}

impl Scalar {
    pub fn zero(d: usize, mode: Mode) -> Self {
        Scalar { s: Series::zero(d), mode }
    }

    pub fn one(d: usize, mode: Mode) -> Self {
        Scalar { s: Series::one(d), mode }
    }

    /// The coordinate `w` placed at grade 0.
    pub fn w(d: usize, mode: Mode) -> Self {
        Self::from_ratfn(RatFn::w(), d, mode)
    }

    pub fn h(d: usize, mode: Mode) -> Self {
        Scalar { s: Series::h(d), mode }
    }

    pub fn from_ratfn(r: RatFn, d: usize, mode: Mode) -> Self {
        Scalar { s: Series::constant(r, d), mode }
    }

    pub fn from_grades(grades: Vec<RatFn>, d: usize, mode: Mode) -> Self {
        Scalar { s: Series::from_grades(grades, d), mode }
    }

    pub fn from_series(s: Series<RatFn>, mode: Mode) -> Self {
        Scalar { s, mode }
    }

    /// A `w`-independent scalar.
    pub fn from_hseries(x: &HSeries, mode: Mode) -> Self {
        Scalar {
            s: x.map_grades(|c| RatFn::constant(c.clone())),
            mode,
        }
    }

    pub fn from_q(c: Q, d: usize, mode: Mode) -> Self {
        Self::from_ratfn(RatFn::constant(c), d, mode)
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn truncation(&self) -> usize {
        self.s.truncation()
    }

    pub fn series(&self) -> &Series<RatFn> {
        &self.s
    }

    pub fn grade(&self, m: usize) -> &RatFn {
        self.s.grade(m)
    }

    pub fn grades(&self) -> &[RatFn] {
        self.s.grades()
    }

    pub fn is_zero(&self) -> bool {
        self.s.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.s.is_one()
    }

    pub fn is_unit(&self) -> bool {
        self.s.is_unit()
    }

    pub fn valuation(&self) -> Option<usize> {
        self.s.valuation()
    }

    /// The `h`-series when no grade depends on `w`.
    pub fn as_hseries(&self) -> Option<HSeries> {
        let c: Option<Vec<Q>> = self.s.grades().iter().map(RatFn::as_constant).collect();
        c.map(|c| Series { c })
    }

    fn check(&self, o: &Scalar) -> Result<()> {
        if self.mode != o.mode {
            return Err(Error::ModeMismatch);
        }
        Ok(())
    }

    pub fn checked_add(&self, o: &Scalar) -> Result<Scalar> {
        self.check(o)?;
        Ok(Scalar { s: self.s.checked_add(&o.s)?, mode: self.mode })
    }

    pub fn checked_sub(&self, o: &Scalar) -> Result<Scalar> {
        self.check(o)?;
        Ok(Scalar { s: self.s.checked_sub(&o.s)?, mode: self.mode })
    }

    pub fn checked_mul(&self, o: &Scalar) -> Result<Scalar> {
        self.check(o)?;
        Ok(Scalar { s: self.s.checked_mul(&o.s)?, mode: self.mode })
    }

    /// Inverse of a unit (`r_0 ≠ 0`).
    pub fn inv(&self) -> Result<Scalar> {
        Ok(Scalar { s: self.s.inv()?, mode: self.mode })
    }

    /// `self / o`, allowing `o = h^k · unit`; the quotient has truncation `D - k`.
    pub fn checked_div(&self, o: &Scalar) -> Result<Scalar> {
        self.check(o)?;
        Ok(Scalar { s: self.s.checked_div(&o.s)?, mode: self.mode })
    }

    pub fn neg(&self) -> Scalar {
        Scalar { s: self.s.neg(), mode: self.mode }
    }

    pub fn scale_q(&self, c: &Q) -> Scalar {
        let r = RatFn::constant(c.clone());
        Scalar { s: self.s.scale(&r), mode: self.mode }
    }

    pub fn truncate(&self, d: usize) -> Scalar {
        Scalar { s: self.s.truncate(d), mode: self.mode }
    }

    pub fn lower_by_h(&self, k: usize) -> Result<Scalar> {
        Ok(Scalar { s: self.s.lower_by_h(k)?, mode: self.mode })
    }

    /// Grade-wise `d/dw`.
    pub fn diff(&self) -> Scalar {
        Scalar { s: self.s.map_grades(RatFn::derivative), mode: self.mode }
    }

    /// `Σ_k a^{(k)} δ^k / k!` for `δ` vanishing at `h = 0`.
    fn taylor(&self, delta: &Scalar) -> Scalar {
        if delta.is_zero() {
            return self.clone();
        }
        let d = self.truncation();
        let mut acc = self.clone();
        let mut deriv = self.clone();
        let mut dpow = Scalar::one(d, self.mode);
        let mut fact = <Q as One>::one();
        for k in 1..=d {
            // δ^k has valuation ≥ k, so only grades ≤ D - k of a^{(k)} matter.
            deriv = Scalar {
                s: Series::from_grades(
                    deriv.s.grades()[..=d - k].iter().map(RatFn::derivative).collect(),
                    d,
                ),
                mode: self.mode,
            };
            dpow = dpow.checked_mul(delta).expect("same ring");
            fact *= Q::from_integer(BigInt::from(k));
            let term = deriv.checked_mul(&dpow).expect("same ring").scale_q(&fact.recip());
            acc = acc.checked_add(&term).expect("same ring");
        }
        acc
    }

    /// `a(w ∘ g)`: translation of the coordinate by the group element `g`
    /// (`w + g` additively, `w·g` multiplicatively), expanded exactly in `h`.
    pub fn translate(&self, g: &Point) -> Result<Scalar> {
        if g.mode() != self.mode {
            return Err(Error::ModeMismatch);
        }
        let d = self.truncation();
        if g.truncation() != d {
            return Err(Error::TruncationMismatch(d, g.truncation()));
        }
        let p0 = g.h0().clone();
        let mut tail = g.value().clone();
        tail.c[0] = <Q as Zero>::zero();
        match self.mode {
            Mode::Additive => {
                let base = Scalar { s: self.s.map_grades(|r| r.shift(&p0)), mode: self.mode };
                Ok(base.taylor(&Scalar::from_hseries(&tail, self.mode)))
            }
            Mode::Multiplicative => {
                // w·g = (p0 w)(1 + ε) with ε = tail / p0.
                let base = Scalar { s: self.s.map_grades(|r| r.scale_arg(&p0)), mode: self.mode };
                let eps = tail.scale(&p0.recip());
                let delta = Scalar {
                    s: eps.map_grades(|c| RatFn::poly(Poly::monomial(c.clone(), 1))),
                    mode: self.mode,
                };
                Ok(base.taylor(&delta))
            }
        }
    }

    /// Translation by the displacement `t` of the canonical parameter:
    /// `a(w + t)` or `a(w·e^t)`; multiplicative shifts need `t(0) = 0`.
    pub fn shift(&self, t: &HSeries) -> Result<Scalar> {
        self.translate(&Point::from_additive(t, self.mode)?)
    }

    /// `a(-w)` additively, `a(1/w)` multiplicatively.
    pub fn reflect(&self) -> Scalar {
        let s = match self.mode {
            Mode::Additive => self.s.map_grades(RatFn::negate_arg),
            Mode::Multiplicative => self.s.map_grades(RatFn::invert_arg),
        };
        Scalar { s, mode: self.mode }
    }

    /// Whether every grade is regular at the reduction of `p`.
    pub fn is_regular_at(&self, p: &Point) -> bool {
        self.s.grades().iter().all(|r| r.is_regular_at(p.h0()))
    }

    /// Exact substitution `w = p`, expanded to order `D`.
    pub fn eval(&self, p: &Point) -> Result<HSeries> {
        if p.mode() != self.mode {
            return Err(Error::ModeMismatch);
        }
        let d = self.truncation();
        if p.truncation() != d {
            return Err(Error::TruncationMismatch(d, p.truncation()));
        }
        let p0 = p.h0().clone();
        let mut tail = p.value().clone();
        tail.c[0] = <Q as Zero>::zero();
        // tail^k / k!
        let mut powers = vec![HSeries::one(d)];
        for k in 1..=d {
            let prev = powers[k - 1].checked_mul(&tail)?;
            powers.push(prev);
        }
        let mut fact = <Q as One>::one();
        let facts: Vec<Q> = (0..=d)
            .map(|k| {
                if k > 0 {
                    fact *= Q::from_integer(BigInt::from(k));
                }
                fact.clone()
            })
            .collect();
        let mut out = vec![<Q as Zero>::zero(); d + 1];
        for m in 0..=d {
            let mut r = self.s.grade(m).clone();
            if r.is_zero() {
                continue;
            }
            for k in 0..=d - m {
                if k > 0 {
                    r = r.derivative();
                }
                if r.is_zero() {
                    break;
                }
                let v = r.eval(&p0).ok_or_else(|| Error::Pole(format!("w = {p0}")))?;
                if Zero::is_zero(&v) {
                    continue;
                }
                let coef = v / &facts[k];
                for (j, pc) in powers[k].c.iter().enumerate() {
                    if m + j <= d && !Zero::is_zero(pc) {
                        out[m + j] += &coef * pc;
                    }
                }
            }
        }
        Ok(Series { c: out })
    }

    /// Grade strings `(num) / (den)` in `w`.
    pub fn to_strings(&self) -> Vec<String> {
        self.s.grades().iter().map(|r| r.display_with("w")).collect()
    }
}
