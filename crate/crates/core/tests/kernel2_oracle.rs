mod common;

use common::{gauss_legendre, gl_1d};
use corrbound::kernel2::{k00, kernel2_eval, kernel2_f64};
use proptest::prelude::*;
use rug::Rational;
use std::f64::consts::PI;

fn s(z: f64) -> f64 {
    if z == 0.0 {
        1.0
    } else {
        (PI * z).sin() / (PI * z)
    }
}

fn s_pm(w: f64, z: f64, plus: bool) -> f64 {
    if plus {
        (s(w - z) + s(w + z)) / 2.0
    } else {
        (s(w - z) - s(w + z)) / 2.0
    }
}

#[test]
fn reproduces_shifted_sinc() {
    // f(t) = s(t - w0) lies in the space for m = 1
    let w0 = 1.0 / 3.0;
    let x = 0.3;
    let rule = gauss_legendre(16);
    let integrand = |t: f64| s(t - w0) * kernel2_f64(1, x, t) * (1.0 - s(t) * s(t));
    let mut total = 0.0;
    for cell in -60..60 {
        total += gl_1d(&rule, cell as f64, cell as f64 + 1.0, integrand);
    }
    // the integrand averages to B/t^2 far out; estimate B on [60, 62] each side
    for sign in [1.0, -1.0] {
        let mut b = 0.0;
        for cell in 60..62 {
            let (lo, hi) = (cell as f64, cell as f64 + 1.0);
            b += gl_1d(&rule, lo, hi, |t| t * t * integrand(sign * t));
        }
        total += (b / 2.0) / 60.0;
    }
    let want = s(x - w0);
    assert!((total - want).abs() < 1e-4, "{} vs {}", total, want);
}

#[test]
fn closed_form_stable_across_precision() {
    let (_, lo) = k00(1, 128);
    let (_, hi) = k00(1, 512);
    let digits = |v: &corrbound::arith::Scalar| match v {
        corrbound::arith::Scalar::Approx(iv) => iv.mid().to_string_radix(10, Some(30)),
        _ => unreachable!(),
    };
    assert_eq!(digits(&lo), digits(&hi));
    assert!(lo.overlaps(&hi));
}

#[test]
fn kernel_grows_with_m() {
    let c1 = k00(1, 128).1.to_f64();
    let c2 = k00(2, 128).1.to_f64();
    assert!(c2 > c1 && c1 > 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn sminus_identity(x in -3.0f64..3.0, t in -3.0f64..3.0) {
        prop_assume!(t.abs() > 1e-3);
        let lhs = x * s_pm(x, t, false) / t;
        let rhs = s_pm(x, t, true) - (PI * x).cos() * s(t);
        prop_assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn symmetric_at_random_rationals(a in -40i64..40, b in 1i64..9, c in -40i64..40, d in 1i64..9) {
        let x = Rational::from((a, b));
        let y = Rational::from((c, d));
        let kxy = kernel2_eval(1, &x, &y, 128).unwrap();
        let kyx = kernel2_eval(1, &y, &x, 128).unwrap();
        prop_assert!(kxy.overlaps(&kyx));
    }
}
