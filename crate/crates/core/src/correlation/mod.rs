//! Correlation functionals `b_i = g_i(0)` and `A_{ij} = ν_n(g_i g_j)`.
//!
//! Two parametrizations are supported. The polynomial path (`n = 3`, `m = 1`)
//! is exact rational arithmetic throughout; the shift path uses Poisson
//! summation over a shifted lattice and returns enclosures.

pub mod ball;
pub mod cache;
pub mod poly;
pub mod shift;

use rug::Rational;
use serde::{Deserialize, Serialize};

use crate::arith::{Interval, Scalar};
use crate::error::{Error, Result};
use crate::symmetry::{invariant_poly_basis, invariant_shift_basis, perm_sign, BasisFunction, BasisKind, InvariantBasis};

pub use cache::GramCache;
pub use shift::{b_shift, EntryDiagnostics, TruncationParams};

/// Dyson's determinant `W_n(x) = det[sinc(x_i - x_j)]` with unit diagonal.
///
/// Callers append the trailing `0` of `W_n(x, 0)` themselves.
pub fn w_eval(x: &[Scalar], prec: u32) -> Scalar {
    let n = x.len();
    let mut s = vec![vec![Interval::one(prec); n]; n];
    for a in 0..n {
        for b in a + 1..n {
            let d = &x[a] - &x[b];
            let v = match d.as_rational() {
                Some(q) if *q == 0 => Interval::one(prec),
                _ => d.to_interval(prec).sinc_pi(),
            };
            s[a][b] = v.clone();
            s[b][a] = v;
        }
    }
    let mut perm: Vec<usize> = (0..n).collect();
    let mut det = Interval::zero(prec);
    loop {
        let mut t = Interval::from_int(perm_sign(&perm), prec);
        for (i, &j) in perm.iter().enumerate() {
            if i != j {
                t = &t * &s[i][j];
            }
        }
        det = &det + &t;
        if !next_permutation(&mut perm) {
            break;
        }
    }
    Scalar::Approx(det)
}

fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parametrization {
    Poly,
    Shift,
}

/// How Gram entries are evaluated.
#[derive(Clone, Debug)]
pub enum GramParams {
    /// Exact rationals, polynomial basis.
    Exact,
    /// Truncated Poisson summation, shift basis.
    Shift(TruncationParams),
}

/// Identifies a Gram system. `d` is the polynomial degree or the shift radius.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GramMeta {
    pub n: usize,
    pub m: u32,
    pub parametrization: Parametrization,
    pub d: u32,
    pub truncation: Option<TruncationParams>,
    pub prec: u32,
}

impl GramMeta {
    /// Same system family, ignoring `d`.
    pub fn same_family(&self, o: &GramMeta) -> bool {
        self.n == o.n
            && self.m == o.m
            && self.parametrization == o.parametrization
            && self.truncation == o.truncation
            && self.prec == o.prec
    }

    pub fn basis(&self) -> Result<InvariantBasis> {
        match self.parametrization {
            Parametrization::Poly => {
                if (self.n, self.m) != (3, 1) {
                    return Err(Error::Unsupported("polynomial path needs (n, m) = (3, 1)".into()));
                }
                invariant_poly_basis(3, self.d)
            }
            Parametrization::Shift => invariant_shift_basis(self.n, self.m, self.d),
        }
    }

    pub fn params(&self) -> Result<GramParams> {
        match (&self.parametrization, &self.truncation) {
            (Parametrization::Poly, _) => Ok(GramParams::Exact),
            (Parametrization::Shift, Some(t)) => Ok(GramParams::Shift(t.clone())),
            (Parametrization::Shift, None) => Err(Error::Unsupported("shift path needs truncation parameters".into())),
        }
    }
}

#[derive(Clone, Debug)]
pub struct GramSystem {
    pub a: Vec<Vec<Scalar>>,
    pub b: Vec<Scalar>,
    pub meta: GramMeta,
    /// Tail diagnostics per upper-triangle entry (shift path only).
    pub diagnostics: Vec<EntryDiagnostics>,
}

impl GramSystem {
    pub fn len(&self) -> usize {
        self.b.len()
    }

    pub fn is_empty(&self) -> bool {
        self.b.is_empty()
    }

    pub fn is_exact(&self) -> bool {
        self.b.iter().all(Scalar::is_exact) && self.a.iter().flatten().all(Scalar::is_exact)
    }

    /// Leading `k x k` block, i.e. the system of the first `k` basis functions.
    pub fn principal(&self, k: usize) -> GramSystem {
        GramSystem {
            a: self.a[..k].iter().map(|r| r[..k].to_vec()).collect(),
            b: self.b[..k].to_vec(),
            meta: self.meta.clone(),
            diagnostics: self.diagnostics.iter().filter(|d| d.i < k && d.j < k).cloned().collect(),
        }
    }
}

/// Assemble `A` (upper triangle computed, then mirrored) and `b`.
pub fn assemble_gram(n: usize, m: u32, basis: &InvariantBasis, params: &GramParams, prec: u32) -> Result<GramSystem> {
    match (params, &basis.kind) {
        (GramParams::Exact, BasisKind::Polynomial) => {
            if (n, m) != (3, 1) {
                return Err(Error::Unsupported("polynomial path needs (n, m) = (3, 1)".into()));
            }
            let polys = basis.polys();
            let g = poly::PolyGram::new(&polys)?;
            let a = g
                .matrix()
                .into_iter()
                .map(|r| r.into_iter().map(Scalar::from).collect())
                .collect();
            let b = g.b().iter().cloned().map(Scalar::from).collect();
            let meta = GramMeta {
                n,
                m,
                parametrization: Parametrization::Poly,
                d: basis.d,
                truncation: None,
                prec,
            };
            Ok(GramSystem { a, b, meta, diagnostics: Vec::new() })
        }
        (GramParams::Shift(t), BasisKind::Shift { .. }) => {
            let b = b_shift(n, m, basis, prec)?;
            let g = shift::shift_gram(n, m, basis, t, prec)?;
            let meta = GramMeta {
                n,
                m,
                parametrization: Parametrization::Shift,
                d: basis.d,
                truncation: Some(t.clone()),
                prec,
            };
            Ok(GramSystem { a: g.a, b, meta, diagnostics: g.diagnostics })
        }
        _ => Err(Error::Unsupported("parameters do not match the basis kind".into())),
    }
}

/// One shift-path Gram entry `ν_n(g_i g_j)`.
pub fn nu_shift(n: usize, m: u32, fi: &BasisFunction, fj: &BasisFunction, t: &TruncationParams, prec: u32) -> Result<Scalar> {
    let functions = if fi == fj { vec![fi.clone()] } else { vec![fi.clone(), fj.clone()] };
    let basis = InvariantBasis { n, d: 0, kind: BasisKind::Shift { m }, functions };
    let g = shift::shift_gram(n, m, &basis, t, prec)?;
    Ok(g.a[0][basis.len() - 1].clone())
}

/// Rational constant as a scalar.
pub fn exact(q: Rational) -> Scalar {
    Scalar::Exact(q)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn w_examples() {
        let z = w_eval(&[Scalar::zero(), Scalar::zero()], 128);
        assert!(z.contains(&Rational::new()));
        let w = w_eval(&[Scalar::ratio(1, 2), Scalar::zero()], 128);
        let want = 1.0 - 4.0 / std::f64::consts::PI.powi(2);
        assert!((w.to_f64() - want).abs() < 1e-15);
        let w3 = w_eval(&[Scalar::ratio(1, 3), Scalar::ratio(-2, 5), Scalar::zero()], 128).to_f64();
        assert!((0.0..=1.0).contains(&w3));
    }

    #[test]
    fn poly_and_shift_d0_agree() {
        let basis = invariant_poly_basis(3, 0).unwrap();
        let p = assemble_gram(3, 1, &basis, &GramParams::Exact, 128).unwrap();
        let exact = p.a[0][0].as_rational().unwrap() / Rational::from(p.b[0].as_rational().unwrap().square_ref());
        assert_eq!(exact, Rational::from((13, 90)));
        let basis = invariant_shift_basis(3, 1, 0).unwrap();
        let t = TruncationParams::standard(3, 1, 400).unwrap();
        let s = assemble_gram(3, 1, &basis, &GramParams::Shift(t), 128).unwrap();
        let v = s.a[0][0].to_f64() / s.b[0].to_f64().powi(2);
        assert!((v - 13.0 / 90.0).abs() < 5e-4 * 13.0 / 90.0, "{}", v);
    }

    #[test]
    fn principal_block_matches_smaller_basis() {
        let big = assemble_gram(3, 1, &invariant_poly_basis(3, 4).unwrap(), &GramParams::Exact, 128).unwrap();
        let small = assemble_gram(3, 1, &invariant_poly_basis(3, 2).unwrap(), &GramParams::Exact, 128).unwrap();
        let k = small.len();
        let sub = big.principal(k);
        for i in 0..k {
            assert_eq!(sub.b[i].as_rational(), small.b[i].as_rational());
            for j in 0..k {
                assert_eq!(sub.a[i][j].as_rational(), small.a[i][j].as_rational());
            }
        }
    }
}
