//! Rank-one reduction of the single-constraint semidefinite program.
//!
//! For positive semidefinite `A` the optimum of `min <A, X>` subject to
//! `<b b^T, X> = 1`, `X ⪰ 0` is attained at `X = c c^T / (c^T b)^2` with
//! `A c = b`. Rigour never depends on the solve: any `c` with `c^T b != 0`
//! gives the valid upper bound `c^T A c / (c^T b)^2`, which is what
//! [`certify_bound`] evaluates.

use rug::Rational;
use serde_json::{json, Value};

use crate::arith::{factorial, linalg, Interval, Scalar};
use crate::correlation::{GramMeta, GramSystem};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct BoundCertificate {
    pub c: Vec<Scalar>,
    /// Enclosure of `c^T A c / (c^T b)^2`.
    pub bound: Scalar,
    /// Enclosure of `1 - bound/(n-1)!`.
    pub fraction: Scalar,
    pub meta: GramMeta,
    /// Basis indices removed by the rank decision.
    pub dropped: Vec<usize>,
}

impl BoundCertificate {
    /// Upper end of the bound enclosure as a rational.
    pub fn bound_upper(&self) -> Rational {
        match &self.bound {
            Scalar::Exact(q) => q.clone(),
            Scalar::Approx(iv) => iv.upper().to_rational().expect("finite"),
        }
    }

    /// Lower end of the fraction enclosure as a rational.
    pub fn fraction_lower(&self) -> Rational {
        match &self.fraction {
            Scalar::Exact(q) => q.clone(),
            Scalar::Approx(iv) => iv.lower().to_rational().expect("finite"),
        }
    }

    pub fn to_json(&self) -> Value {
        let t = self.meta.truncation.as_ref();
        json!({
            "meta": self.meta,
            "c": self.c.iter().map(decimal).collect::<Vec<_>>(),
            "bound": { "mid": decimal(&self.bound), "rad": format!("{:e}", self.bound.rad_f64()) },
            "fraction": { "mid": decimal(&self.fraction), "rad": format!("{:e}", self.fraction.rad_f64()) },
            "dropped": self.dropped,
            "provenance": {
                "precision": self.meta.prec,
                "exact": self.bound.is_exact(),
                "C": t.map(|t| t.c),
                "shift": t.map(|t| t.shift.iter().map(|q| q.to_string()).collect::<Vec<_>>()),
            },
        })
    }
}

/// Decimal string of a scalar's midpoint with 20 significant digits.
pub fn decimal(s: &Scalar) -> String {
    match s {
        Scalar::Exact(q) => rug::Float::with_val(96, q).to_string_radix(10, Some(20)),
        Scalar::Approx(iv) => iv.mid().to_string_radix(10, Some(20)),
    }
}

/// Solve `A c = b`: exact elimination on rational systems, interval
/// Gaussian elimination with verified pivots otherwise.
///
/// The interval path eliminates on the midpoint matrix. Entry radii would
/// otherwise compound through the elimination, and [`certify_bound`]
/// accounts for them anyway.
pub fn solve_rank1(sys: &GramSystem) -> Result<Vec<Scalar>> {
    let n = sys.len();
    if sys.a.len() != n || sys.a.iter().any(|r| r.len() != n) {
        return Err(Error::Unsupported("Gram matrix must be square and match b".into()));
    }
    if sys.is_exact() {
        let a: Vec<Vec<Rational>> = sys
            .a
            .iter()
            .map(|r| r.iter().map(|v| v.as_rational().unwrap().clone()).collect())
            .collect();
        let b: Vec<Rational> = sys.b.iter().map(|v| v.as_rational().unwrap().clone()).collect();
        return Ok(linalg::solve(&a, &b)?.into_iter().map(Scalar::Exact).collect());
    }
    let prec = sys.meta.prec.max(64);
    let mut m: Vec<Vec<Interval>> = sys
        .a
        .iter()
        .zip(&sys.b)
        .map(|(row, bi)| {
            let point = |v: &Scalar| Interval::from_rational(&v.mid_rational(), prec);
            let mut r: Vec<Interval> = row.iter().map(point).collect();
            r.push(point(bi));
            r
        })
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    for col in 0..n {
        let p = (col..n)
            .max_by(|&x, &y| m[x][col].abs_lower().partial_cmp(&m[y][col].abs_lower()).unwrap())
            .unwrap();
        if m[p][col].contains_zero() {
            return Err(Error::SingularSystem { index: order[col] });
        }
        m.swap(col, p);
        order.swap(col, p);
        let pivot_row = m[col].clone();
        for row in m.iter_mut().skip(col + 1) {
            let f = row[col].checked_div(&pivot_row[col])?;
            for k in col..=n {
                row[k] = &row[k] - &(&f * &pivot_row[k]);
            }
        }
    }
    let mut x = vec![Interval::zero(prec); n];
    for i in (0..n).rev() {
        let mut acc = m[i][n].clone();
        for k in i + 1..n {
            acc = &acc - &(&m[i][k] * &x[k]);
        }
        x[i] = acc.checked_div(&m[i][i])?;
    }
    Ok(x.into_iter().map(Scalar::Approx).collect())
}

/// Incremental Cholesky with an interval-safe rank decision: a basis element
/// whose pivot is not verifiably positive is dropped. Returns the kept indices.
///
/// Exact systems use exact `LDL^T` instead, so only exactly dependent
/// elements are dropped (square roots would force enclosures).
pub fn rank_reduce(sys: &GramSystem) -> Vec<usize> {
    if sys.is_exact() {
        return midpoint_rank_reduce(sys, &Rational::new());
    }
    let n = sys.len();
    let prec = sys.meta.prec.max(64);
    let mut keep: Vec<usize> = Vec::new();
    // rows of L for the kept indices, in kept order
    let mut l: Vec<Vec<Scalar>> = Vec::new();
    for i in 0..n {
        let mut row = Vec::with_capacity(keep.len());
        let mut ok = true;
        for (r, &k) in keep.iter().enumerate() {
            let mut acc = sys.a[i][k].clone();
            for t in 0..r {
                acc = &acc - &(&row[t] * &l[r][t]);
            }
            match acc.checked_div(&l[r][r]) {
                Ok(v) => row.push(v),
                Err(_) => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            continue;
        }
        let mut piv = sys.a[i][i].clone();
        for v in &row {
            piv = &piv - &(v * v);
        }
        if !piv.is_positive() {
            continue;
        }
        let sqrt = match &piv {
            Scalar::Exact(q) => match exact_sqrt(q) {
                Some(s) => Scalar::Exact(s),
                None => Scalar::Approx(Interval::from_rational(q, prec).sqrt().expect("positive")),
            },
            Scalar::Approx(iv) => Scalar::Approx(iv.sqrt().expect("positive")),
        };
        row.push(sqrt);
        l.push(row);
        keep.push(i);
    }
    keep
}

fn exact_sqrt(q: &Rational) -> Option<Rational> {
    let (n, d) = (q.numer(), q.denom());
    if n.is_perfect_square() && d.is_perfect_square() {
        Some(Rational::from((n.clone().sqrt(), d.clone().sqrt())))
    } else {
        None
    }
}

/// Interval Cholesky of `A`; fails with the first pivot that is not
/// verifiably positive.
pub fn psd_check(sys: &GramSystem) -> Result<()> {
    let keep = rank_reduce(sys);
    match (0..sys.len()).find(|i| !keep.contains(i)) {
        Some(index) => Err(Error::SingularSystem { index }),
        None => Ok(()),
    }
}

/// Rank decision on the midpoint matrix: exact `LDL^T`, dropping elements
/// whose pivot is at most `rel_tol` times their diagonal entry.
pub fn midpoint_rank_reduce(sys: &GramSystem, rel_tol: &Rational) -> Vec<usize> {
    let n = sys.len();
    let a: Vec<Vec<Rational>> = sys.a.iter().map(|r| r.iter().map(Scalar::mid_rational).collect()).collect();
    let mut keep: Vec<usize> = Vec::new();
    // l[r] holds L entries against kept columns, d[r] the pivots
    let mut l: Vec<Vec<Rational>> = Vec::new();
    let mut d: Vec<Rational> = Vec::new();
    for i in 0..n {
        let mut row: Vec<Rational> = Vec::with_capacity(keep.len());
        for (r, &k) in keep.iter().enumerate() {
            let mut acc = a[i][k].clone();
            for t in 0..r {
                acc -= Rational::from(&row[t] * &l[r][t]) * &d[t];
            }
            row.push(acc / &d[r]);
        }
        let mut piv = a[i][i].clone();
        for (t, v) in row.iter().enumerate() {
            piv -= Rational::from(v * v) * &d[t];
        }
        if piv > Rational::from(&a[i][i] * rel_tol) && piv > 0 {
            l.push(row);
            d.push(piv);
            keep.push(i);
        }
    }
    keep
}

fn solve_subset(sys: &GramSystem, keep: &[usize]) -> Result<Vec<Scalar>> {
    if keep.is_empty() {
        return Err(Error::SingularSystem { index: 0 });
    }
    let sub = GramSystem {
        a: keep.iter().map(|&i| keep.iter().map(|&j| sys.a[i][j].clone()).collect()).collect(),
        b: keep.iter().map(|&i| sys.b[i].clone()).collect(),
        meta: sys.meta.clone(),
        diagnostics: Vec::new(),
    };
    let cs = solve_rank1(&sub)?;
    let mut c = vec![Scalar::zero(); sys.len()];
    for (k, &i) in keep.iter().enumerate() {
        c[i] = cs[k].clone();
    }
    Ok(c)
}

/// Solve after dropping basis elements with unverifiable pivots; dropped
/// coefficients are zero.
pub fn solve_reduced(sys: &GramSystem) -> Result<(Vec<Scalar>, Vec<usize>)> {
    let keep = rank_reduce(sys);
    let c = solve_subset(sys, &keep)?;
    let dropped = (0..sys.len()).filter(|i| !keep.contains(i)).collect();
    Ok((c, dropped))
}

/// Relative pivot threshold of the midpoint rank decision.
pub const MIDPOINT_PIVOT_TOL: (i64, i64) = (1, 1_000_000_000_000);

/// Solve and certify. Exact systems are solved directly. Enclosure systems
/// try the interval-safe and the midpoint rank decisions and keep the
/// certificate with the smaller upper bound; both are valid certificates.
pub fn optimize(sys: &GramSystem) -> Result<BoundCertificate> {
    let mut keeps = vec![rank_reduce(sys)];
    if !sys.is_exact() {
        let mid = midpoint_rank_reduce(sys, &Rational::from(MIDPOINT_PIVOT_TOL));
        if mid != keeps[0] {
            keeps.push(mid);
        }
    }
    let mut best: Option<BoundCertificate> = None;
    let mut last_err = None;
    for keep in keeps {
        let cert = solve_subset(sys, &keep).and_then(|c| certify_bound(sys, &c));
        match cert {
            Ok(mut cert) => {
                cert.dropped = (0..sys.len()).filter(|i| !keep.contains(i)).collect();
                if best.as_ref().map_or(true, |b| cert.bound_upper() < b.bound_upper()) {
                    best = Some(cert);
                }
            }
            Err(e) => last_err = Some(e),
        }
    }
    best.ok_or_else(|| last_err.unwrap_or(Error::SingularSystem { index: 0 }))
}

/// Certified `c^T A c / (c^T b)^2` for an arbitrary coefficient vector.
///
/// Enclosure coefficients are replaced by their rational midpoints first:
/// the bound holds for any fixed `c`, and a point vector avoids the
/// dependency blow-up of evaluating the quadratic form on intervals.
pub fn certify_bound(sys: &GramSystem, c: &[Scalar]) -> Result<BoundCertificate> {
    let n = sys.len();
    if c.len() != n {
        return Err(Error::Unsupported("coefficient vector has the wrong length".into()));
    }
    let c: Vec<Scalar> = c.iter().map(|v| Scalar::Exact(v.mid_rational())).collect();
    let mut cb = Scalar::zero();
    for (ci, bi) in c.iter().zip(&sys.b) {
        if !ci.is_exact_zero() {
            cb = &cb + &(ci * bi);
        }
    }
    if cb.contains_zero() {
        return Err(Error::Normalization);
    }
    let mut q = Scalar::zero();
    for i in 0..n {
        if c[i].is_exact_zero() {
            continue;
        }
        let mut row = Scalar::zero();
        for j in 0..n {
            if !c[j].is_exact_zero() {
                row = &row + &(&sys.a[i][j] * &c[j]);
            }
        }
        q = &q + &(&c[i] * &row);
    }
    let bound = q.checked_div(&(&cb * &cb))?;
    let fraction = fraction_bound(sys.meta.n, &bound);
    Ok(BoundCertificate { c, bound, fraction, meta: sys.meta.clone(), dropped: Vec::new() })
}

/// `1 - bound/(n-1)!` with `(n-1)!` exact.
pub fn fraction_bound(n: usize, bound: &Scalar) -> Scalar {
    assert!(n >= 2, "fraction bound needs n >= 2");
    let f = Rational::from((1, factorial((n - 1) as u32)));
    &Scalar::one() - &bound.mul_rational(&f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::correlation::Parametrization;

    fn sys(a: Vec<Vec<i64>>, b: Vec<i64>) -> GramSystem {
        GramSystem {
            a: a.into_iter().map(|r| r.into_iter().map(Scalar::int).collect()).collect(),
            b: b.into_iter().map(Scalar::int).collect(),
            meta: GramMeta { n: 3, m: 1, parametrization: Parametrization::Poly, d: 0, truncation: None, prec: 128 },
            diagnostics: Vec::new(),
        }
    }

    #[test]
    fn identity_system() {
        let s = sys(vec![vec![1, 0], vec![0, 1]], vec![1, 0]);
        let c = solve_rank1(&s).unwrap();
        let cert = certify_bound(&s, &c).unwrap();
        assert_eq!(cert.bound.as_rational().unwrap(), &Rational::from(1));
    }

    #[test]
    fn diagonal_system_optimum() {
        let s = sys(vec![vec![1, 0], vec![0, 2]], vec![1, 1]);
        let c = solve_rank1(&s).unwrap();
        assert_eq!(c[1].as_rational().unwrap(), &Rational::from((1, 2)));
        let best = certify_bound(&s, &c).unwrap().bound.as_rational().unwrap().clone();
        assert_eq!(best, Rational::from((2, 3)));
        // every rank-one feasible point on a grid does no better
        for k in -40..=40 {
            let t = Rational::from((k, 10));
            let v = vec![Scalar::one(), Scalar::Exact(t)];
            if let Ok(cert) = certify_bound(&s, &v) {
                assert!(cert.bound.as_rational().unwrap() >= &best);
            }
        }
    }

    #[test]
    fn interval_path_matches_exact() {
        let s = sys(vec![vec![4, 1, 0], vec![1, 3, 1], vec![0, 1, 2]], vec![1, 2, -1]);
        let exact = certify_bound(&s, &solve_rank1(&s).unwrap()).unwrap();
        let mut si = s.clone();
        for row in si.a.iter_mut() {
            for v in row.iter_mut() {
                *v = Scalar::Approx(v.to_interval(128).widen(&rug::Float::with_val(64, 1e-30)));
            }
        }
        let c = solve_rank1(&si).unwrap();
        let cert = certify_bound(&si, &c).unwrap();
        assert!(cert.bound.contains(exact.bound.as_rational().unwrap()));
    }

    #[test]
    fn rank_deficient_basis_is_reduced() {
        let s = sys(vec![vec![2, 2, 1], vec![2, 2, 1], vec![1, 1, 3]], vec![1, 1, 1]);
        assert!(psd_check(&s).is_err());
        let (c, dropped) = solve_reduced(&s).unwrap();
        assert_eq!(dropped, vec![1]);
        assert!(c[1].is_exact_zero());
    }

    #[test]
    fn fraction_examples() {
        let f = fraction_bound(4, &Scalar::Exact(Rational::from((447, 3500))));
        assert!(f.as_rational().unwrap() >= &Rational::from((9787, 10000)));
        assert_eq!(fraction_bound(2, &Scalar::zero()).as_rational().unwrap(), &Rational::from(1));
        let f = fraction_bound(3, &Scalar::Exact(Rational::from((77197284, 1_000_000_000))));
        assert!(f.as_rational().unwrap() >= &Rational::from((9614, 10000)));
    }
}
