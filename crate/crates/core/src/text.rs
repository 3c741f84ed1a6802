//! Exact text forms.
//!
//! * rationals: `3`, `-7/5`
//! * polynomials: `1/2*w^2 - 3*w + 1` (any order of terms on input)
//! * rational functions: `(num) / (den)`, or a bare polynomial
//! * `h`-series: a polynomial in `h` of degree at most `D`
//! * `Scalar`: one rational function per grade
//! * matrices: `{"dims": [...], "entries": [...]}`, row-major

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{Poly, Q};
use crate::ratfn::RatFn;
use crate::series::{HSeries, Mode, Scalar};
use crate::tensor::{Entry, LegMatrix, LegShape};

fn perr(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

pub fn format_q(x: &Q) -> String {
    x.to_string()
}

pub fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| perr(format!("bad rational `{s}`")))?;
    let d: BigInt = d.parse().map_err(|_| perr(format!("bad rational `{s}`")))?;
    if d.is_zero() {
        return Err(perr(format!("zero denominator in `{s}`")));
    }
    Ok(Q::new(n, d))
}

/// Splits `a - b + c` into signed terms.
fn terms(s: &str) -> Result<Vec<(bool, String)>> {
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(perr("empty expression"));
    }
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut neg = false;
    for (i, ch) in compact.chars().enumerate() {
        if (ch == '+' || ch == '-') && !cur.is_empty() {
            out.push((neg, std::mem::take(&mut cur)));
            neg = ch == '-';
        } else if (ch == '+' || ch == '-') && i == 0 {
            neg = ch == '-';
        } else if ch == '+' || ch == '-' {
            return Err(perr(format!("dangling sign in `{s}`")));
        } else {
            cur.push(ch);
        }
    }
    if cur.is_empty() {
        return Err(perr(format!("trailing sign in `{s}`")));
    }
    out.push((neg, cur));
    Ok(out)
}

pub fn parse_poly(s: &str, var: &str) -> Result<Poly> {
    let mut coeffs: Vec<Q> = Vec::new();
    for (neg, t) in terms(s)? {
        let (c, k) = match t.find(var) {
            None => (parse_q(&t)?, 0usize),
            Some(pos) => {
                let head = &t[..pos];
                let tail = &t[pos + var.len()..];
                let c = match head {
                    "" => Q::from_integer(1.into()),
                    _ => parse_q(head.strip_suffix('*').ok_or_else(|| perr(format!("expected `*` in `{t}`")))?)?,
                };
                let k = match tail {
                    "" => 1,
                    _ => tail
                        .strip_prefix('^')
                        .and_then(|e| e.parse::<usize>().ok())
                        .ok_or_else(|| perr(format!("bad exponent in `{t}`")))?,
                };
                (c, k)
            }
        };
        if coeffs.len() <= k {
            coeffs.resize(k + 1, Q::zero());
        }
        coeffs[k] += if neg { -c } else { c };
    }
    Ok(Poly::from_coeffs(coeffs))
}

pub fn format_poly(p: &Poly, var: &str) -> String {
    p.display_with(var)
}

pub fn format_ratfn(r: &RatFn) -> String {
    r.display_with("w")
}

pub fn parse_ratfn(s: &str) -> Result<RatFn> {
    let s = s.trim();
    if let Some(rest) = s.strip_prefix('(') {
        let (num, rest) = rest.split_once(')').ok_or_else(|| perr(format!("unbalanced `(` in `{s}`")))?;
        let rest = rest.trim();
        let den = rest
            .strip_prefix('/')
            .map(str::trim)
            .and_then(|d| d.strip_prefix('('))
            .and_then(|d| d.strip_suffix(')'))
            .ok_or_else(|| perr(format!("expected `(num) / (den)`, got `{s}`")))?;
        let den = parse_poly(den, "w")?;
        if den.is_zero() {
            return Err(perr(format!("zero denominator in `{s}`")));
        }
        return Ok(RatFn::new(parse_poly(num, "w")?, den));
    }
    Ok(RatFn::poly(parse_poly(s, "w")?))
}

pub fn format_hseries(x: &HSeries) -> String {
    x.to_text()
}

/// Parses a polynomial in `h` of degree at most `d`.
pub fn parse_hseries(s: &str, d: usize) -> Result<HSeries> {
    let p = parse_poly(s, "h")?;
    if p.degree().is_some_and(|k| k > d) {
        return Err(perr(format!("`{s}` has degree above the truncation order {d}")));
    }
    Ok(HSeries::from_poly(&p, d))
}

pub fn format_scalar(x: &Scalar) -> Vec<String> {
    x.to_strings()
}

/// One string per grade; the truncation is the number of grades minus one.
pub fn parse_scalar(grades: &[String], mode: Mode) -> Result<Scalar> {
    if grades.is_empty() {
        return Err(perr("a scalar needs at least one grade"));
    }
    let g = grades.iter().map(|s| parse_ratfn(s)).collect::<Result<Vec<_>>>()?;
    let d = g.len() - 1;
    Ok(Scalar::from_grades(g, d, mode))
}

/// JSON form of a square matrix over `Scalar`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalarMatrixText {
    pub dims: Vec<usize>,
    pub entries: Vec<Vec<String>>,
}

/// JSON form of a square matrix over `HSeries`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesMatrixText {
    pub dims: Vec<usize>,
    pub entries: Vec<String>,
}

fn square_dims<T: Entry>(m: &LegMatrix<T>) -> Result<Vec<usize>> {
    if !m.is_square() {
        return Err(Error::Dimension("only square operators have a text form".into()));
    }
    Ok(m.shape().dims().to_vec())
}

pub fn scalar_matrix_to_text(m: &LegMatrix<Scalar>) -> Result<ScalarMatrixText> {
    Ok(ScalarMatrixText { dims: square_dims(m)?, entries: m.entries().iter().map(format_scalar).collect() })
}

pub fn scalar_matrix_from_text(t: &ScalarMatrixText, mode: Mode) -> Result<LegMatrix<Scalar>> {
    let shape = LegShape::new(t.dims.clone())?;
    let data = t.entries.iter().map(|e| parse_scalar(e, mode)).collect::<Result<Vec<_>>>()?;
    if let Some(first) = data.first() {
        if data.iter().any(|x| x.truncation() != first.truncation()) {
            return Err(perr("entries have different numbers of grades"));
        }
    }
    LegMatrix::from_rows(shape.clone(), shape, data)
}

pub fn series_matrix_to_text(m: &LegMatrix<HSeries>) -> Result<SeriesMatrixText> {
    Ok(SeriesMatrixText { dims: square_dims(m)?, entries: m.entries().iter().map(format_hseries).collect() })
}

pub fn series_matrix_from_text(t: &SeriesMatrixText, d: usize) -> Result<LegMatrix<HSeries>> {
    let shape = LegShape::new(t.dims.clone())?;
    let data = t.entries.iter().map(|e| parse_hseries(e, d)).collect::<Result<Vec<_>>>()?;
    LegMatrix::from_rows(shape.clone(), shape, data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{q, qr};

    #[test]
    fn rationals() {
        assert_eq!(parse_q("-7/5").unwrap(), qr(-7, 5));
        assert_eq!(parse_q(" 4 / 6 ").unwrap(), qr(2, 3));
        assert_eq!(format_q(&qr(-7, 5)), "-7/5");
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("x").is_err());
    }

    #[test]
    fn polynomials() {
        let p = parse_poly("1/2*w^2 - 3*w + 1", "w").unwrap();
        assert_eq!(p, Poly::from_coeffs(vec![q(1), q(-3), qr(1, 2)]));
        assert_eq!(format_poly(&p, "w"), "1/2*w^2 - 3*w + 1");
        assert_eq!(parse_poly("-w + w^3 - w", "w").unwrap(), Poly::from_ints(&[0, -2, 0, 1]));
        assert!(parse_poly("2w", "w").is_err());
        assert!(parse_poly("w^", "w").is_err());
        assert!(parse_poly("1 +", "w").is_err());
    }

    #[test]
    fn rational_functions() {
        let r = parse_ratfn("(1) / (w - 1/2)").unwrap();
        assert_eq!(format_ratfn(&r), "(1) / (w - 1/2)");
        assert_eq!(parse_ratfn(&format_ratfn(&r)).unwrap(), r);
        // Non-canonical input is reduced.
        assert_eq!(parse_ratfn("(2*w^2 - 2) / (2*w - 2)").unwrap(), RatFn::poly(Poly::from_ints(&[1, 1])));
        assert!(parse_ratfn("(1) / (0)").is_err());
    }

    #[test]
    fn series() {
        let x = parse_hseries("1 + 1/2*h^2", 3).unwrap();
        assert_eq!(x.grades(), &[q(1), q(0), qr(1, 2), q(0)]);
        assert_eq!(parse_hseries(&format_hseries(&x), 3).unwrap(), x);
        assert!(parse_hseries("h^4", 3).is_err());
    }

    #[test]
    fn matrices_round_trip() {
        let r = crate::rmatrix::RMatrixFamily::build_rational(2, 2).unwrap();
        let t = scalar_matrix_to_text(r.matrix()).unwrap();
        let json = serde_json::to_string(&t).unwrap();
        let back: ScalarMatrixText = serde_json::from_str(&json).unwrap();
        assert_eq!(scalar_matrix_from_text(&back, Mode::Additive).unwrap(), *r.matrix());
        let p = crate::series::Point::constant(q(3), Mode::Additive, 2).unwrap();
        let m = r.matrix().eval(&p).unwrap();
        let t = series_matrix_to_text(&m).unwrap();
        assert_eq!(series_matrix_from_text(&t, 2).unwrap(), m);
        assert!(serde_json::from_str::<ScalarMatrixText>(r#"{"dims":[2],"entries":[],"x":1}"#).is_err());
    }
}
