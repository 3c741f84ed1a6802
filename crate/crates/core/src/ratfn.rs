//! The rational function field `Q(w)` in canonical form.

use std::fmt;

use num_traits::{One, Zero};

use crate::field::Field;
use crate::poly::{Poly, Q};

/// `num / den` with `den` monic and `gcd(num, den) = 1`; zero is `0 / 1`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatFn {
    num: Poly,
    den: Poly,
}

impl RatFn {
    /// Builds and canonicalizes `num / den`. Panics on a zero denominator.
    pub fn new(num: Poly, den: Poly) -> Self {
        assert!(!den.is_zero(), "rational function with zero denominator");
        if num.is_zero() {
            return Self::zero();
        }
        let g = Poly::gcd(&num, &den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (num.div_exact(&g), den.div_exact(&g))
        };
        Self::from_reduced(num, den)
    }

    /// Scales a coprime pair so the denominator is monic.
    fn from_reduced(num: Poly, den: Poly) -> Self {
        let lead = den.lead();
        if One::is_one(&lead) {
            RatFn { num, den }
        } else {
            let inv = lead.recip();
            RatFn {
                num: num.scale(&inv),
                den: den.scale(&inv),
            }
        }
    }

    pub fn poly(p: Poly) -> Self {
        RatFn { num: p, den: Poly::one() }
    }

    pub fn constant(c: Q) -> Self {
        Self::poly(Poly::constant(c))
    }

    /// The coordinate `w`.
    pub fn w() -> Self {
        Self::poly(Poly::x())
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    /// The constant value when this function does not depend on `w`.
    pub fn as_constant(&self) -> Option<Q> {
        (self.den.is_one() && self.num.is_constant()).then(|| self.num.coeff(0))
    }

    pub fn derivative(&self) -> RatFn {
        if self.den.is_one() {
            return Self::poly(self.num.derivative());
        }
        let n = &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative());
        RatFn::new(n, &self.den * &self.den)
    }

    /// Whether the function has no pole at `x`.
    pub fn is_regular_at(&self, x: &Q) -> bool {
        !Zero::is_zero(&self.den.eval(x))
    }

    /// Value at `x`, or `None` at a pole.
    pub fn eval(&self, x: &Q) -> Option<Q> {
        let d = self.den.eval(x);
        if Zero::is_zero(&d) {
            None
        } else {
            Some(self.num.eval(x) / d)
        }
    }

    /// `f(w + c)`
    pub fn shift(&self, c: &Q) -> RatFn {
        if Zero::is_zero(c) {
            return self.clone();
        }
        // Translation preserves coprimality and leading coefficients.
        RatFn {
            num: self.num.shift(c),
            den: self.den.shift(c),
        }
    }

    /// `f(c w)` for nonzero `c`.
    pub fn scale_arg(&self, c: &Q) -> RatFn {
        assert!(!Zero::is_zero(c), "argument scaling by zero");
        Self::from_reduced(self.num.scale_arg(c), self.den.scale_arg(c))
    }

    /// `f(-w)`
    pub fn negate_arg(&self) -> RatFn {
        self.scale_arg(&-<Q as One>::one())
    }

    /// `f(1/w)`
    pub fn invert_arg(&self) -> RatFn {
        let dn = self.num.degree().unwrap_or(0);
        let dd = self.den.degree().unwrap_or(0);
        let m = dn.max(dd);
        // f(1/w) = w^m num(1/w) / (w^m den(1/w))
        RatFn::new(self.num.reversed(dn).mul_xpow(m - dn), self.den.reversed(dd).mul_xpow(m - dd))
    }

    /// Multiplicity of `w = x` as a pole (0 when regular there).
    pub fn pole_order_at(&self, x: &Q) -> usize {
        let lin = Poly::from_coeffs(vec![-x.clone(), <Q as One>::one()]);
        let mut d = self.den.clone();
        let mut k = 0;
        loop {
            let (quot, rem) = d.div_rem(&lin);
            if !rem.is_zero() {
                return k;
            }
            d = quot;
            k += 1;
        }
    }

    pub fn display_with(&self, var: &str) -> String {
        format!("({}) / ({})", self.num.display_with(var), self.den.display_with(var))
    }
}

trait MulXPow {
    fn mul_xpow(&self, k: usize) -> Poly;
}

impl MulXPow for Poly {
    fn mul_xpow(&self, k: usize) -> Poly {
        if k == 0 || self.is_zero() {
            return self.clone();
        }
        let mut c = vec![<Q as Zero>::zero(); k];
        c.extend_from_slice(self.coeffs());
        Poly::from_coeffs(c)
    }
}

impl fmt::Debug for RatFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            f.write_str(&self.num.display_with("w"))
        } else {
            f.write_str(&self.display_with("w"))
        }
    }
}

impl Field for RatFn {
    fn zero() -> Self {
        RatFn { num: Poly::zero(), den: Poly::one() }
    }

    fn one() -> Self {
        Self::poly(Poly::one())
    }

    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    fn is_one(&self) -> bool {
        self.den.is_one() && self.num.is_one()
    }

    fn add(&self, o: &Self) -> Self {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        if self.den == o.den {
            if self.den.is_one() {
                return Self::poly(&self.num + &o.num);
            }
            return RatFn::new(&self.num + &o.num, self.den.clone());
        }
        // a/b + c/d with g = gcd(b, d): the result's common factor divides g.
        let g = Poly::gcd(&self.den, &o.den);
        let b1 = self.den.div_exact(&g);
        let d1 = o.den.div_exact(&g);
        let num = &(&self.num * &d1) + &(&o.num * &b1);
        if num.is_zero() {
            return Self::zero();
        }
        let den = &(&b1 * &o.den);
        if g.is_one() {
            return Self::from_reduced(num, den.clone());
        }
        let g2 = Poly::gcd(&num, &g);
        if g2.is_one() {
            Self::from_reduced(num, den.clone())
        } else {
            Self::from_reduced(num.div_exact(&g2), den.div_exact(&g2))
        }
    }

    fn neg(&self) -> Self {
        RatFn { num: -&self.num, den: self.den.clone() }
    }

    fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        if self.is_one() {
            return o.clone();
        }
        if o.is_one() {
            return self.clone();
        }
        if self.den.is_one() && o.den.is_one() {
            return Self::poly(&self.num * &o.num);
        }
        let g1 = Poly::gcd(&self.num, &o.den);
        let g2 = Poly::gcd(&o.num, &self.den);
        let n = &self.num.div_exact(&g1) * &o.num.div_exact(&g2);
        let d = &self.den.div_exact(&g2) * &o.den.div_exact(&g1);
        Self::from_reduced(n, d)
    }

    fn inv(&self) -> Self {
        assert!(!self.is_zero(), "inverse of zero rational function");
        Self::from_reduced(self.den.clone(), self.num.clone())
    }
}
