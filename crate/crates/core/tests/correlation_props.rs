use corrbound::arith::{Rational, Scalar};
use corrbound::correlation::{
    assemble_gram, w_eval, GramMeta, GramParams, GramSystem, Parametrization, TruncationParams,
};
use corrbound::solver::{certify_bound, optimize};
use corrbound::symmetry::invariant_shift_basis;
use proptest::prelude::*;

fn ratio(sys: &GramSystem) -> Scalar {
    sys.a[0][0].checked_div(&(&sys.b[0] * &sys.b[0])).unwrap()
}

#[test]
fn d0_value_does_not_depend_on_the_shift() {
    let basis = invariant_shift_basis(3, 1, 0).unwrap();
    let standard = TruncationParams::standard(3, 1, 400).unwrap();
    let other = TruncationParams::new(3, 1, 400, vec![Rational::from((1, 7)), Rational::from((2, 7))], 1e-3).unwrap();
    let a = assemble_gram(3, 1, &basis, &GramParams::Shift(standard), 128).unwrap();
    let b = assemble_gram(3, 1, &basis, &GramParams::Shift(other), 128).unwrap();
    let (ra, rb) = (ratio(&a), ratio(&b));
    assert!(ra.overlaps(&rb), "{} vs {}", ra, rb);
    assert!((ra.to_f64() - 13.0 / 90.0).abs() < 5e-4 * 13.0 / 90.0, "{}", ra);
}

#[test]
fn diagonal_is_positive() {
    let basis = invariant_shift_basis(3, 1, 2).unwrap();
    let t = TruncationParams::standard(3, 1, 400).unwrap();
    let sys = assemble_gram(3, 1, &basis, &GramParams::Shift(t), 128).unwrap();
    for i in 0..sys.len() {
        assert!(sys.a[i][i].is_positive(), "A[{}][{}] = {}", i, i, sys.a[i][i]);
    }
}

fn meta() -> GramMeta {
    GramMeta { n: 3, m: 1, parametrization: Parametrization::Poly, d: 0, truncation: None, prec: 128 }
}

/// `A = M^T M + I` with small integer `M`, exact.
fn system(m: &[i64], b: &[i64]) -> GramSystem {
    let k = b.len();
    let mut a = vec![vec![Scalar::zero(); k]; k];
    for i in 0..k {
        for j in 0..k {
            let v: i64 = (0..k).map(|r| m[r * k + i] * m[r * k + j]).sum::<i64>() + (i == j) as i64;
            a[i][j] = Scalar::int(v);
        }
    }
    GramSystem { a, b: b.iter().map(|&v| Scalar::int(v)).collect(), meta: meta(), diagnostics: Vec::new() }
}

fn bound(sys: &GramSystem) -> Rational {
    optimize(sys).unwrap().bound_upper()
}

prop_compose! {
    fn psd_system()(k in 2usize..5)
        (m in prop::collection::vec(-4i64..5, k * k), b in prop::collection::vec(1i64..6, k)) -> (Vec<i64>, Vec<i64>) {
        (m, b)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn w_lies_in_unit_interval(v in prop::collection::vec((-30i64..30, 1i64..7), 1..4)) {
        let x: Vec<Scalar> = v.iter().map(|&(a, b)| Scalar::ratio(a, b)).collect();
        let w = w_eval(&x, 128).to_f64();
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&w), "{}", w);
    }

    #[test]
    fn bound_is_scale_invariant((m, b) in psd_system(), s in 2i64..6) {
        let sys = system(&m, &b);
        let mut scaled = sys.clone();
        for row in scaled.a.iter_mut() {
            for v in row.iter_mut() {
                *v = v.mul_rational(&Rational::from(s * s));
            }
        }
        for v in scaled.b.iter_mut() {
            *v = v.mul_rational(&Rational::from(s));
        }
        prop_assert_eq!(bound(&sys), bound(&scaled));
    }

    #[test]
    fn optimum_beats_perturbations((m, b) in psd_system(), seed in 0u64..1000) {
        use rand::{rngs::StdRng, Rng, SeedableRng};
        let sys = system(&m, &b);
        let cert = optimize(&sys).unwrap();
        let mut rng = StdRng::seed_from_u64(seed);
        for _ in 0..100 {
            let c: Vec<Scalar> = cert
                .c
                .iter()
                .map(|v| &Scalar::Exact(v.mid_rational()) + &Scalar::ratio(rng.gen_range(-50..=50), 100))
                .collect();
            if let Ok(other) = certify_bound(&sys, &c) {
                prop_assert!(cert.bound_upper() <= other.bound_upper());
            }
        }
    }

    #[test]
    fn larger_basis_never_increases_bound((m, b) in psd_system()) {
        let sys = system(&m, &b);
        let full = bound(&sys);
        for k in 1..sys.len() {
            prop_assert!(full <= bound(&sys.principal(k)));
        }
    }
}
