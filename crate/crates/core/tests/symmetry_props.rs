use std::collections::BTreeSet;

use corrbound::arith::linalg::int_matvec;
use corrbound::arith::{Monomial, MultiPoly, Rational};
use corrbound::symmetry::{
    build_gamma, doubled_vertices, invariant_shift_basis, projection_operator, reynolds_poly, BasisFunction,
    Representation, ShiftCombination,
};
use proptest::prelude::*;

fn poly_from(coeffs: &[i64], nvars: usize) -> MultiPoly {
    // coefficients fill monomials x^a y^b (z^c) in a fixed order up to degree 3
    let mut p = MultiPoly::zero(nvars);
    let mut k = 0;
    for a in 0..=3u32 {
        for b in 0..=3 - a {
            let exps: Vec<u32> = if nvars == 2 { vec![a, b] } else { vec![a, b, 3 - a - b] };
            if let Some(&c) = coeffs.get(k) {
                p.add_term(Monomial::new(&exps), Rational::from(c));
            }
            k += 1;
        }
    }
    p
}

#[test]
fn group_orders_and_vertices() {
    for (n, order) in [(3, 12), (4, 48)] {
        let g = build_gamma(n).unwrap();
        assert_eq!(g.order(), order);
        let verts = doubled_vertices(n - 1);
        for e in &g.elements {
            let sp = e.spatial();
            let image: BTreeSet<Vec<i64>> = verts.iter().map(|v| int_matvec(&sp, v)).collect();
            assert_eq!(image, verts);
        }
    }
}

#[test]
fn nontrivial_projections_vanish_at_origin() {
    let g = build_gamma(3).unwrap();
    let reps = Representation::irreducibles_n3(&g).unwrap();
    assert_eq!(reps.iter().map(|r| r.dim * r.dim).sum::<usize>(), 12);
    let p = poly_from(&[3, -1, 4, 1, -5, 9, 2, -6, 5, 3], 2);
    let mut f = ShiftCombination::new();
    f.insert(vec![1, 0], Rational::from(2));
    f.insert(vec![2, -1], Rational::from(-3));
    f.insert(vec![0, 0], Rational::from(7));
    for rep in reps.iter().filter(|r| !r.is_trivial()) {
        for j in 0..rep.dim {
            let proj = projection_operator(&g, rep, j, j);
            let q = proj.apply_poly(&p);
            assert_eq!(q.eval(&[Rational::new(), Rational::new()]), 0, "{}", rep.name);
            // g_λ(0) depends only on the orbit of λ, so each orbit's weights cancel
            let s = proj.apply_shift(&f);
            for orbit in [g.orbit(&[1, 0]), g.orbit(&[2, -1]), g.orbit(&[0, 0])] {
                let total: Rational = orbit.iter().filter_map(|v| s.get(v)).sum();
                assert_eq!(total, 0, "{}", rep.name);
            }
        }
    }
}

#[test]
fn shift_orbits_partition_the_ball() {
    let b = invariant_shift_basis(4, 1, 3).unwrap();
    let mut seen = BTreeSet::new();
    for f in &b.functions {
        if let BasisFunction::Orbit { points, .. } = f {
            for p in points {
                assert!(seen.insert(p.clone()), "{:?} appears twice", p);
            }
        }
    }
    assert!(seen.contains(&vec![0, 0, 0]));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn reynolds_is_idempotent_and_invariant(coeffs in prop::collection::vec(-9i64..9, 10), n in 3usize..5) {
        let g = build_gamma(n).unwrap();
        let p = poly_from(&coeffs, n - 1);
        let r = reynolds_poly(&g, &p);
        prop_assert!(reynolds_poly(&g, &r) == r);
        for e in &g.elements {
            prop_assert!(r.compose_matrix(&e.spatial()) == r);
        }
    }
}
