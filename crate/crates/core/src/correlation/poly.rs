//! Exact Gram entries for the polynomial parametrization at `(n, m) = (3, 1)`.
//!
//! Basis functions are `g_i = \hat{p_i chi_{H_2}}` for invariant polynomials
//! `p_i`, and for a product `g = g_i g_j`
//!
//! `ν_3(g) = 2 g(0) + \hat g(0) + 6 ∫_0^1 \hat g(u, -u)(u - 1) du
//!           - 12 ∫_0^1 ∫_{-u_2}^0 \hat g(u_1, u_2) u_2 du_1 du_2`,
//!
//! with `\hat g(u) = ∫ p_i(x) p_j(x - u) dx` over `x, x - u ∈ H_2`.
//!
//! [`nu3_poly`] evaluates this with the piecewise `u`-regions written out
//! directly. [`PolyGram`] computes the same numbers faster: it swaps the
//! order of integration, so each term is `∫_{H_2} p_i Ψ_j` for a piecewise
//! polynomial `Ψ_j` that depends on one basis element only, and reduces
//! everything to precomputed moments of `p_i` over a few polygons.

use std::collections::HashMap;

use rug::Rational;

use crate::arith::{Affine, Limit, Monomial, MultiPoly};
use crate::error::Result;

fn r(n: i64, d: i64) -> Rational {
    Rational::from((n, d))
}

/// Affine form in `nv` variables with integer coefficients and constant `c`.
fn af(nv: usize, terms: &[(usize, i64)], c: Rational) -> Affine {
    let t: Vec<(usize, Rational)> = terms.iter().map(|&(v, k)| (v, Rational::from(k))).collect();
    Affine::new(nv, &t, c)
}

fn lim(v: usize, lo: Affine, hi: Affine) -> Limit {
    Limit::new(v, lo, hi)
}

/// `p(forms)` where `forms` are affine combinations given as polynomials.
fn affine_poly(nv: usize, terms: &[(usize, i64)]) -> MultiPoly {
    af(nv, terms, Rational::new()).to_poly()
}

/// `∫_{H_2} p` via `H_2 = C ∪ σC ∪ σ²C`, `C = [-1/2, 0] × [0, 1/2]`,
/// `σ(x_1, x_2) = (x_2, -x_1 - x_2)`. Exact for any polynomial.
pub fn integrate_hexagon(p: &MultiPoly) -> Result<Rational> {
    let sigma = vec![vec![0, 1], vec![-1, -1]];
    let limits = [
        lim(0, Affine::constant(2, r(-1, 2)), Affine::constant(2, r(0, 1))),
        lim(1, Affine::constant(2, r(0, 1)), Affine::constant(2, r(1, 2))),
    ];
    let mut total = Rational::new();
    let mut q = p.clone();
    for _ in 0..3 {
        total += q.integrate_iterated(&limits)?;
        q = q.compose_matrix(&sigma);
    }
    Ok(total)
}

/// `b_i = g_i(0) = ∫_{H_2} p_i`.
pub fn b_poly(polys: &[&MultiPoly]) -> Result<Vec<Rational>> {
    polys.iter().map(|p| integrate_hexagon(p)).collect()
}

/// `ν_3(g_p g_q)` following the piecewise regions term by term.
pub fn nu3_poly(p: &MultiPoly, q: &MultiPoly) -> Result<Rational> {
    let h = r(1, 2);
    let neg_h = r(-1, 2);
    let b = integrate_hexagon(p)? * integrate_hexagon(q)?;
    let ghat0 = integrate_hexagon(&p.mul(q))?;

    // single integral: vars (x1, x2, u)
    let nv = 3;
    let pj = p.extend_vars(nv);
    let qj = q.substitute(&[affine_poly(nv, &[(0, 1), (2, 1)]), affine_poly(nv, &[(1, 1), (2, -1)])]);
    let f = pj.mul(&qj);
    let c = |v: Rational| Affine::constant(nv, v);
    let x2 = |k: i64, v: Rational| af(nv, &[(1, k)], v);
    let u = |k: i64, v: Rational| af(nv, &[(2, k)], v);
    let mut jx1 = f.integrate_partial(0, &x2(-1, neg_h.clone()), &u(-1, h.clone()))?;
    jx1 = jx1.integrate_partial(1, &u(1, neg_h.clone()), &c(r(0, 1)))?;
    let mut t = f.integrate_partial(0, &c(neg_h.clone()), &u(-1, h.clone()))?;
    t = t.integrate_partial(1, &c(r(0, 1)), &u(1, r(0, 1)))?;
    jx1.add_assign(&t);
    let mut t = f.integrate_partial(0, &c(neg_h.clone()), &x2(-1, h.clone()))?;
    t = t.integrate_partial(1, &u(1, r(0, 1)), &c(h.clone()))?;
    jx1.add_assign(&t);
    let mut jx2 = f.integrate_partial(0, &c(neg_h.clone()), &u(-1, h.clone()))?;
    jx2 = jx2.integrate_partial(1, &u(1, neg_h.clone()), &c(h.clone()))?;
    let w = affine_poly(nv, &[(2, 1)]).sub(&MultiPoly::one(nv));
    let j = jx1.mul(&w).integrate_iterated(&[lim(2, c(r(0, 1)), c(h.clone()))])?
        + jx2.mul(&w).integrate_iterated(&[lim(2, c(h.clone()), c(r(1, 1)))])?;

    // double integral: vars (x1, x2, u1, u2)
    let nv = 4;
    let pi = p.extend_vars(nv);
    let qi = q.substitute(&[affine_poly(nv, &[(0, 1), (2, -1)]), affine_poly(nv, &[(1, 1), (3, -1)])]);
    let g = pi.mul(&qi).mul(&affine_poly(nv, &[(3, 1)]));
    let c = |v: Rational| Affine::constant(nv, v);
    let a = |t: &[(usize, i64)], v: Rational| af(nv, t, v);
    // x-integrals (x1 inner, then x2) for each region
    let piece = |x1lo: Affine, x1hi: Affine, x2lo: Affine, x2hi: Affine| -> Result<MultiPoly> {
        g.integrate_partial(0, &x1lo, &x1hi)?.integrate_partial(1, &x2lo, &x2hi)
    };
    let i1 = piece(c(neg_h.clone()), a(&[(2, 1)], h.clone()), a(&[(3, 1)], neg_h.clone()), c(h.clone()))?;
    let i2 = piece(
        a(&[(1, -1), (2, 1), (3, 1)], neg_h.clone()),
        a(&[(1, -1)], h.clone()),
        a(&[(3, 1)], neg_h.clone()),
        c(h.clone()),
    )?;
    let i3 = piece(c(neg_h.clone()), a(&[(1, -1)], h.clone()), a(&[(2, 1), (3, 1)], r(0, 1)), c(h.clone()))?
        .add(&piece(
            a(&[(2, 1), (3, 1), (1, -1)], neg_h.clone()),
            a(&[(1, -1)], h.clone()),
            a(&[(2, -1)], r(0, 1)),
            a(&[(2, 1), (3, 1)], r(0, 1)),
        )?)
        .add(&piece(
            a(&[(2, 1), (3, 1), (1, -1)], neg_h.clone()),
            a(&[(2, 1)], h.clone()),
            a(&[(3, 1)], neg_h.clone()),
            a(&[(2, -1)], r(0, 1)),
        )?);
    let i4 = piece(c(neg_h.clone()), a(&[(1, -1)], h.clone()), a(&[(2, -1)], r(0, 1)), c(h.clone()))?
        .add(&piece(
            c(neg_h.clone()),
            a(&[(2, 1)], h.clone()),
            a(&[(2, 1), (3, 1)], r(0, 1)),
            a(&[(2, -1)], r(0, 1)),
        )?)
        .add(&piece(
            a(&[(2, 1), (3, 1), (1, -1)], neg_h.clone()),
            a(&[(2, 1)], h.clone()),
            a(&[(3, 1)], neg_h.clone()),
            a(&[(2, 1), (3, 1)], r(0, 1)),
        )?);
    // u-regions (u2 inner, then u1)
    let i = i1.integrate_iterated(&[
        lim(3, a(&[(2, -1)], r(0, 1)), c(r(1, 1))),
        lim(2, c(r(-1, 1)), c(neg_h.clone())),
    ])? + i2.integrate_iterated(&[
        lim(3, a(&[(2, -1)], h.clone()), c(r(1, 1))),
        lim(2, c(neg_h.clone()), c(r(0, 1))),
    ])? + i3.integrate_iterated(&[
        lim(3, a(&[(2, -2)], r(0, 1)), a(&[(2, -1)], h.clone())),
        lim(2, c(neg_h.clone()), c(r(0, 1))),
    ])? + i4.integrate_iterated(&[
        lim(3, a(&[(2, -1)], r(0, 1)), a(&[(2, -2)], r(0, 1))),
        lim(2, c(neg_h.clone()), c(r(0, 1))),
    ])?;

    Ok(Rational::from(2 * b) + ghat0 + Rational::from(6 * j) - Rational::from(12 * i))
}

/// A polygon in the `(x_1, x_2)` plane given as an iterated integral.
#[derive(Clone, Debug)]
struct Piece {
    limits: [Limit; 2],
}

impl Piece {
    /// Inner variable first.
    fn new(inner: usize, lo: Affine, hi: Affine, outer_lo: Rational, outer_hi: Rational) -> Piece {
        Piece {
            limits: [
                Limit::new(inner, lo, hi),
                Limit::new(1 - inner, Affine::constant(2, outer_lo), Affine::constant(2, outer_hi)),
            ],
        }
    }
}

/// Moments `∫_P x^γ` of a polygon, memoized.
#[derive(Debug)]
struct Moments {
    piece: Piece,
    cache: HashMap<Monomial, Rational>,
}

impl Moments {
    fn get(&mut self, m: Monomial) -> Result<Rational> {
        if let Some(v) = self.cache.get(&m) {
            return Ok(v.clone());
        }
        let v = MultiPoly::monomial(2, &m.exponents(2), r(1, 1)).integrate_iterated(&self.piece.limits)?;
        self.cache.insert(m, v.clone());
        Ok(v)
    }

    /// `γ -> ∫_P p x^γ` for every `γ` in `needed`.
    fn weighted(&mut self, p: &MultiPoly, needed: &[Monomial]) -> Result<HashMap<Monomial, Rational>> {
        let mut out = HashMap::with_capacity(needed.len());
        for &g in needed {
            let mut acc = Rational::new();
            for (a, c) in p.terms() {
                acc += Rational::from(c * &self.get(a.mul(g))?);
            }
            out.insert(g, acc);
        }
        Ok(out)
    }
}

fn pair(mu: &HashMap<Monomial, Rational>, q: &MultiPoly) -> Rational {
    let mut acc = Rational::new();
    for (m, c) in q.terms() {
        acc += Rational::from(c * &mu[m]);
    }
    acc
}

/// `Ψ^J(x) = ∫_0^{U} (u - 1) q(x_1 + u, x_2 - u) du` for `U = 1/2 - x_1`
/// (`plus`, used where `x_1 + x_2 >= 0`) or `U = 1/2 + x_2`.
fn psi_j(q: &MultiPoly, plus: bool) -> Result<MultiPoly> {
    let nv = 3;
    let shifted = q.substitute(&[affine_poly(nv, &[(0, 1), (2, 1)]), affine_poly(nv, &[(1, 1), (2, -1)])]);
    let f = shifted.mul(&affine_poly(nv, &[(2, 1)]).sub(&MultiPoly::one(nv)));
    let upper = if plus { af(nv, &[(0, -1)], r(1, 2)) } else { af(nv, &[(1, 1)], r(1, 2)) };
    let out = f.integrate_partial(2, &Affine::constant(nv, r(0, 1)), &upper)?;
    Ok(out.rename_vars(2, &[0, 1, 0]))
}

/// `Ψ^I(x) = ∫ q(y) (x_2 - y_2) dy` over `y ∈ H_2` with `x - y` in
/// `{-1 <= u_1 <= 0, -u_1 <= u_2 <= 1}`. With `s = x_1 + x_2` this is
/// `y_1 ∈ [x_1, min(1/2, s + 1/2)]`, `y_2 ∈ [lo(y_1), s - y_1]` where
/// `lo = -1/2 - y_1` for `y_1 < 0` and `-1/2` otherwise; the formula is
/// polynomial on each sign pattern of `(x_1, s)`.
fn psi_i(q: &MultiPoly, x1_neg: bool, s_neg: bool) -> Result<MultiPoly> {
    let nv = 4;
    let qy = q.rename_vars(nv, &[2, 3]);
    let f = qy.mul(&affine_poly(nv, &[(1, 1), (3, -1)]));
    let top = af(nv, &[(0, 1), (1, 1), (2, -1)], r(0, 1));
    let zero = Affine::constant(nv, r(0, 1));
    let end = if s_neg { af(nv, &[(0, 1), (1, 1)], r(1, 2)) } else { Affine::constant(nv, r(1, 2)) };
    let right = f.integrate_partial(3, &Affine::constant(nv, r(-1, 2)), &top)?;
    let out = if x1_neg {
        let left = f.integrate_partial(3, &af(nv, &[(2, -1)], r(-1, 2)), &top)?;
        left.integrate_partial(2, &af(nv, &[(0, 1)], r(0, 1)), &zero)?
            .add(&right.integrate_partial(2, &zero, &end)?)
    } else {
        right.integrate_partial(2, &af(nv, &[(0, 1)], r(0, 1)), &end)?
    };
    Ok(out.rename_vars(2, &[0, 1, 0, 0]))
}

/// Gram data for a polynomial basis, built from per-function kernels.
pub struct PolyGram {
    polys: Vec<MultiPoly>,
    b: Vec<Rational>,
    /// `∫_P p_i x^γ` for the pieces, indexed `[piece][i]`.
    mu: Vec<Vec<HashMap<Monomial, Rational>>>,
    psi_j: Vec<[MultiPoly; 2]>,
    psi_i: Vec<[MultiPoly; 4]>,
}

// pieces 0..4 split H by the signs of (x1, x1 + x2) and carry Ψ^I;
// pieces 4..8 split it by the signs of (x1 + x2, x2) and carry Ψ^J
const I_PIECES: [(bool, bool); 4] = [(false, false), (false, true), (true, false), (true, true)];
const J_PIECES: [(usize, bool); 4] = [(4, true), (5, true), (6, false), (7, false)];

fn pieces() -> Vec<Piece> {
    let h = || r(1, 2);
    let nh = || r(-1, 2);
    let z = || r(0, 1);
    let a = |t: &[(usize, i64)], c: Rational| af(2, t, c);
    vec![
        // x1 >= 0, s >= 0: x2 ∈ [-x1, 1/2 - x1]
        Piece::new(1, a(&[(0, -1)], z()), a(&[(0, -1)], h()), z(), h()),
        // x1 >= 0, s <= 0: x2 ∈ [-1/2, -x1]
        Piece::new(1, Affine::constant(2, nh()), a(&[(0, -1)], z()), z(), h()),
        // x1 <= 0, s >= 0: x2 ∈ [-x1, 1/2]
        Piece::new(1, a(&[(0, -1)], z()), Affine::constant(2, h()), nh(), z()),
        // x1 <= 0, s <= 0: x2 ∈ [-1/2 - x1, -x1]
        Piece::new(1, a(&[(0, -1)], nh()), a(&[(0, -1)], z()), nh(), z()),
        // s >= 0, x2 <= 0: x1 ∈ [-x2, 1/2]
        Piece::new(0, a(&[(1, -1)], z()), Affine::constant(2, h()), nh(), z()),
        // s >= 0, x2 >= 0: x1 ∈ [-x2, 1/2 - x2]
        Piece::new(0, a(&[(1, -1)], z()), a(&[(1, -1)], h()), z(), h()),
        // s <= 0, x2 <= 0: x1 ∈ [-1/2 - x2, -x2]
        Piece::new(0, a(&[(1, -1)], nh()), a(&[(1, -1)], z()), nh(), z()),
        // s <= 0, x2 >= 0: x1 ∈ [-1/2, -x2]
        Piece::new(0, Affine::constant(2, nh()), a(&[(1, -1)], z()), z(), h()),
    ]
}

impl PolyGram {
    pub fn new(polys: &[&MultiPoly]) -> Result<PolyGram> {
        let polys: Vec<MultiPoly> = polys.iter().map(|p| (*p).clone()).collect();
        let refs: Vec<&MultiPoly> = polys.iter().collect();
        let b = b_poly(&refs)?;
        let mut psi_j_all = Vec::with_capacity(polys.len());
        let mut psi_i_all: Vec<[MultiPoly; 4]> = Vec::with_capacity(polys.len());
        for q in &polys {
            psi_j_all.push([psi_j(q, true)?, psi_j(q, false)?]);
            let mut kernels: Vec<MultiPoly> = Vec::with_capacity(I_PIECES.len());
            for &(x1_neg, s_neg) in &I_PIECES {
                kernels.push(psi_i(q, x1_neg, s_neg)?);
            }
            psi_i_all.push(kernels.try_into().expect("four pieces"));
        }
        // monomials each piece must be paired against
        let mut needed: Vec<Vec<Monomial>> = vec![Vec::new(); 8];
        let mut add = |k: usize, p: &MultiPoly| needed[k].extend(p.terms().map(|(m, _)| *m));
        for (j, q) in polys.iter().enumerate() {
            for k in 0..I_PIECES.len() {
                add(k, q);
                add(k, &psi_i_all[j][k]);
            }
            for &(k, plus) in &J_PIECES {
                add(k, &psi_j_all[j][if plus { 0 } else { 1 }]);
            }
        }
        let mut mu = Vec::with_capacity(8);
        for (k, piece) in pieces().into_iter().enumerate() {
            needed[k].sort();
            needed[k].dedup();
            let mut mom = Moments { piece, cache: HashMap::new() };
            let per: Result<Vec<_>> = polys.iter().map(|p| mom.weighted(p, &needed[k])).collect();
            mu.push(per?);
        }
        Ok(PolyGram { polys, b, mu, psi_j: psi_j_all, psi_i: psi_i_all })
    }

    pub fn len(&self) -> usize {
        self.polys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polys.is_empty()
    }

    pub fn b(&self) -> &[Rational] {
        &self.b
    }

    /// `ν_3(g_i g_j)`.
    pub fn entry(&self, i: usize, j: usize) -> Rational {
        let q = &self.polys[j];
        let mut ghat0 = Rational::new();
        let mut it = Rational::new();
        for k in 0..I_PIECES.len() {
            ghat0 += pair(&self.mu[k][i], q);
            it += pair(&self.mu[k][i], &self.psi_i[j][k]);
        }
        let mut jt = Rational::new();
        for &(k, plus) in &J_PIECES {
            jt += pair(&self.mu[k][i], &self.psi_j[j][if plus { 0 } else { 1 }]);
        }
        Rational::from(2 * Rational::from(&self.b[i] * &self.b[j])) + ghat0 + Rational::from(6 * jt)
            - Rational::from(12 * it)
    }

    /// Full symmetric matrix, computed on the upper triangle.
    pub fn matrix(&self) -> Vec<Vec<Rational>> {
        let n = self.len();
        let mut a = vec![vec![Rational::new(); n]; n];
        for i in 0..n {
            for j in i..n {
                let v = self.entry(i, j);
                a[j][i] = v.clone();
                a[i][j] = v;
            }
        }
        a
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symmetry::invariant_poly_basis;

    #[test]
    fn hexagon_integrals() {
        assert_eq!(integrate_hexagon(&MultiPoly::one(2)).unwrap(), r(3, 4));
        assert_eq!(integrate_hexagon(&MultiPoly::var(2, 0)).unwrap(), r(0, 1));
    }

    #[test]
    fn constant_function_value() {
        let one = MultiPoly::one(2);
        let nu = nu3_poly(&one, &one).unwrap();
        assert_eq!(nu, r(13, 160));
        assert_eq!(nu / r(9, 16), r(13, 90));
    }

    #[test]
    fn fast_route_matches_direct_route() {
        let basis = invariant_poly_basis(3, 4).unwrap();
        let polys = basis.polys();
        let fast = PolyGram::new(&polys).unwrap();
        for i in 0..polys.len() {
            for j in 0..polys.len() {
                assert_eq!(fast.entry(i, j), nu3_poly(polys[i], polys[j]).unwrap(), "({}, {})", i, j);
            }
        }
    }
}
