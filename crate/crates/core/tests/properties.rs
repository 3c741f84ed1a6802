use proptest::prelude::*;
use qkz_core::poly::{q, qr};
use qkz_core::rmatrix::{check_qybe, unitarity_scalar};
use qkz_core::text::{format_hseries, format_ratfn, format_scalar, parse_hseries, parse_ratfn, parse_scalar};
use qkz_core::{HSeries, LegMatrix, LegShape, Mode, Point, Poly, RatFn, RMatrixFamily, Scalar, Q};

fn small_q() -> impl Strategy<Value = Q> {
    (-20i64..20, 1i64..7).prop_map(|(n, d)| qr(n, d))
}

fn hseries(d: usize) -> impl Strategy<Value = HSeries> {
    prop::collection::vec(small_q(), d + 1).prop_map(move |c| HSeries::from_grades(c, d))
}

fn poly() -> impl Strategy<Value = Poly> {
    prop::collection::vec(small_q(), 0..4).prop_map(Poly::from_coeffs)
}

fn ratfn() -> impl Strategy<Value = RatFn> {
    (poly(), poly()).prop_filter_map("zero denominator", |(a, b)| (!b.is_zero()).then(|| RatFn::new(a, b)))
}

fn scalar(d: usize) -> impl Strategy<Value = Scalar> {
    prop::collection::vec(ratfn(), d + 1).prop_map(move |g| Scalar::from_grades(g, d, Mode::Additive))
}

fn unit_hseries(d: usize) -> impl Strategy<Value = HSeries> {
    hseries(d).prop_filter("not a unit", |x| x.is_unit())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn series_ring_laws(a in hseries(3), b in hseries(3), c in hseries(3)) {
        let ab = a.checked_mul(&b).unwrap();
        prop_assert_eq!(&ab, &b.checked_mul(&a).unwrap());
        prop_assert_eq!(
            ab.checked_mul(&c).unwrap(),
            a.checked_mul(&b.checked_mul(&c).unwrap()).unwrap()
        );
        prop_assert_eq!(
            a.checked_mul(&b.checked_add(&c).unwrap()).unwrap(),
            ab.checked_add(&a.checked_mul(&c).unwrap()).unwrap()
        );
    }

    #[test]
    fn series_inverse_is_exact(a in unit_hseries(4)) {
        prop_assert!(a.checked_mul(&a.inv().unwrap()).unwrap().is_one());
    }

    #[test]
    fn translations_commute(x in scalar(2), s in small_q(), t in small_q()) {
        let d = 2;
        let ps = Point::new(HSeries::from_grades(vec![s, q(1)], d), Mode::Additive).unwrap();
        let pt = Point::new(HSeries::from_grades(vec![t, qr(1, 2)], d), Mode::Additive).unwrap();
        let a = x.translate(&ps).and_then(|y| y.translate(&pt));
        let b = x.translate(&pt).and_then(|y| y.translate(&ps));
        if let (Ok(a), Ok(b)) = (a, b) {
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn hseries_text_round_trip(a in hseries(4)) {
        prop_assert_eq!(parse_hseries(&format_hseries(&a), 4).unwrap(), a);
    }

    #[test]
    fn ratfn_text_round_trip(r in ratfn()) {
        prop_assert_eq!(parse_ratfn(&format_ratfn(&r)).unwrap(), r);
    }

    #[test]
    fn scalar_text_round_trip(x in scalar(2)) {
        prop_assert_eq!(parse_scalar(&format_scalar(&x), Mode::Additive).unwrap(), x);
    }

    #[test]
    fn matrix_inverse_is_exact(v in prop::collection::vec(hseries(3), 4)) {
        let shape = LegShape::uniform(2, 1);
        let one = HSeries::one(3);
        // Unit diagonal at h^0 keeps the matrix invertible.
        let entries: Vec<HSeries> = v
            .iter()
            .enumerate()
            .map(|(k, x)| if k == 0 || k == 3 { x.checked_mul(&HSeries::h(3)).unwrap().checked_add(&one).unwrap() } else { x.clone() })
            .collect();
        let m = LegMatrix::from_rows(shape.clone(), shape.clone(), entries).unwrap();
        let id = LegMatrix::identity(shape, &one);
        prop_assert_eq!(m.mul(&m.inv().unwrap()).unwrap(), id);
    }

    #[test]
    fn embedding_respects_products(v in prop::collection::vec(hseries(1), 8)) {
        let two = LegShape::uniform(2, 1);
        let a = LegMatrix::from_rows(two.clone(), two.clone(), v[..4].to_vec()).unwrap();
        let b = LegMatrix::from_rows(two.clone(), two, v[4..].to_vec()).unwrap();
        let full = LegShape::uniform(2, 3);
        let lhs = a.mul(&b).unwrap().embed(&full, &[2]).unwrap();
        let rhs = a.embed(&full, &[2]).unwrap().mul(&b.embed(&full, &[2]).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
        // Operators on disjoint legs commute.
        let x = a.embed(&full, &[1]).unwrap();
        let y = b.embed(&full, &[3]).unwrap();
        prop_assert_eq!(x.mul(&y).unwrap(), y.mul(&x).unwrap());
    }
}

#[test]
fn rational_unitarity_is_scalar() {
    for n in [2, 3] {
        let r = RMatrixFamily::build_rational(n, 3).unwrap();
        assert!(unitarity_scalar(r.matrix()).is_ok());
    }
}

#[test]
fn qybe_at_low_truncation() {
    let r = RMatrixFamily::build_rational(2, 2).unwrap();
    let values = qkz_core::rmatrix::sample_values();
    assert!(check_qybe(r.matrix(), &values, 5).unwrap().status().is_zero());
}
