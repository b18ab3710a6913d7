//! Sparse multivariate polynomials with exact rational coefficients.

use std::collections::BTreeMap;
use std::fmt;

use rug::Rational;

use crate::error::{Error, Result};

/// Maximum number of variables a polynomial can carry.
pub const MAX_VARS: usize = 8;

/// Exponent vector packed into a `u64`, one byte per variable (variable 0 in
/// the most significant byte, so the natural order is lexicographic).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Monomial(u64);

impl Monomial {
    pub fn new(exps: &[u32]) -> Monomial {
        assert!(exps.len() <= MAX_VARS, "too many variables");
        let mut m = Monomial(0);
        for (i, &e) in exps.iter().enumerate() {
            m = m.with(i, e);
        }
        m
    }

    #[inline]
    pub fn get(self, var: usize) -> u32 {
        ((self.0 >> (8 * (7 - var))) & 0xff) as u32
    }

    #[inline]
    pub fn with(self, var: usize, e: u32) -> Monomial {
        assert!(e < 256, "exponent {} out of range", e);
        let shift = 8 * (7 - var);
        Monomial((self.0 & !(0xffu64 << shift)) | ((e as u64) << shift))
    }

    #[inline]
    pub fn mul(self, o: Monomial) -> Monomial {
        // per-byte addition; overflow would carry into the next variable
        for v in 0..MAX_VARS {
            debug_assert!(self.get(v) + o.get(v) < 256, "exponent overflow");
        }
        Monomial(self.0 + o.0)
    }

    pub fn degree(self) -> u32 {
        (0..MAX_VARS).map(|v| self.get(v)).sum()
    }

    pub fn exponents(self, nvars: usize) -> Vec<u32> {
        (0..nvars).map(|v| self.get(v)).collect()
    }
}

/// Affine form `c_0 x_0 + ... + c_{k-1} x_{k-1} + constant`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Affine {
    pub coeffs: Vec<Rational>,
    pub constant: Rational,
}

impl Affine {
    pub fn constant(nvars: usize, c: Rational) -> Affine {
        Affine { coeffs: vec![Rational::new(); nvars], constant: c }
    }

    /// Build from `(variable, coefficient)` pairs and a constant.
    pub fn new(nvars: usize, terms: &[(usize, Rational)], constant: Rational) -> Affine {
        let mut coeffs = vec![Rational::new(); nvars];
        for (v, c) in terms {
            coeffs[*v] += c;
        }
        Affine { coeffs, constant }
    }

    pub fn depends_on(&self, var: usize) -> bool {
        self.coeffs.get(var).map_or(false, |c| *c != 0)
    }

    pub fn to_poly(&self) -> MultiPoly {
        let n = self.coeffs.len();
        let mut p = MultiPoly::constant(n, self.constant.clone());
        for (v, c) in self.coeffs.iter().enumerate() {
            if *c != 0 {
                p.add_term(Monomial::default().with(v, 1), c.clone());
            }
        }
        p
    }

    pub fn eval(&self, x: &[Rational]) -> Rational {
        let mut acc = self.constant.clone();
        for (c, xi) in self.coeffs.iter().zip(x) {
            acc += Rational::from(c * xi);
        }
        acc
    }
}

/// One step of an iterated integral: integrate `var` from `lower` to `upper`.
#[derive(Clone, Debug)]
pub struct Limit {
    pub var: usize,
    pub lower: Affine,
    pub upper: Affine,
}

impl Limit {
    pub fn new(var: usize, lower: Affine, upper: Affine) -> Limit {
        Limit { var, lower, upper }
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct MultiPoly {
    nvars: usize,
    terms: BTreeMap<Monomial, Rational>,
}

impl MultiPoly {
    pub fn zero(nvars: usize) -> MultiPoly {
        assert!(nvars <= MAX_VARS);
        MultiPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Rational) -> MultiPoly {
        let mut p = MultiPoly::zero(nvars);
        p.add_term(Monomial::default(), c);
        p
    }

    pub fn one(nvars: usize) -> MultiPoly {
        MultiPoly::constant(nvars, Rational::from(1))
    }

    pub fn var(nvars: usize, v: usize) -> MultiPoly {
        assert!(v < nvars);
        let mut p = MultiPoly::zero(nvars);
        p.add_term(Monomial::default().with(v, 1), Rational::from(1));
        p
    }

    pub fn monomial(nvars: usize, exps: &[u32], c: Rational) -> MultiPoly {
        assert_eq!(exps.len(), nvars);
        let mut p = MultiPoly::zero(nvars);
        p.add_term(Monomial::new(exps), c);
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: Monomial) -> Rational {
        self.terms.get(&m).cloned().unwrap_or_default()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    /// Add `c * m`, dropping the term if it cancels.
    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c == 0 {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if *e.get() == 0 {
                    e.remove();
                }
            }
        }
    }

    fn add_term_ref(&mut self, m: Monomial, c: &Rational) {
        if *c == 0 {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if *e.get() == 0 {
                    e.remove();
                }
            }
        }
    }

    pub fn add(&self, o: &MultiPoly) -> MultiPoly {
        assert_eq!(self.nvars, o.nvars);
        let mut r = self.clone();
        for (m, c) in &o.terms {
            r.add_term_ref(*m, c);
        }
        r
    }

    pub fn add_assign(&mut self, o: &MultiPoly) {
        assert_eq!(self.nvars, o.nvars);
        for (m, c) in &o.terms {
            self.add_term_ref(*m, c);
        }
    }

    pub fn sub(&self, o: &MultiPoly) -> MultiPoly {
        self.add(&o.scale(&Rational::from(-1)))
    }

    pub fn scale(&self, k: &Rational) -> MultiPoly {
        if *k == 0 {
            return MultiPoly::zero(self.nvars);
        }
        MultiPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (*m, Rational::from(c * k))).collect(),
        }
    }

    pub fn mul(&self, o: &MultiPoly) -> MultiPoly {
        assert_eq!(self.nvars, o.nvars);
        let mut r = MultiPoly::zero(self.nvars);
        let mut tmp = Rational::new();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                tmp.assign_mul(c1, c2);
                r.add_term_ref(m1.mul(*m2), &tmp);
            }
        }
        r
    }

    pub fn pow(&self, k: u32) -> MultiPoly {
        let mut acc = MultiPoly::one(self.nvars);
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn eval(&self, x: &[Rational]) -> Rational {
        assert_eq!(x.len(), self.nvars);
        let mut acc = Rational::new();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (v, xv) in x.iter().enumerate() {
                let e = m.get(v);
                if e > 0 {
                    t *= rat_pow(xv, e);
                }
            }
            acc += t;
        }
        acc
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (m, c) in &self.terms {
            let mut t = c.to_f64();
            for (v, xv) in x.iter().enumerate() {
                t *= xv.powi(m.get(v) as i32);
            }
            acc += t;
        }
        acc
    }

    /// Substitute `x_v -> forms[v]`; the result lives in the variables of the forms.
    pub fn substitute(&self, forms: &[MultiPoly]) -> MultiPoly {
        assert_eq!(forms.len(), self.nvars);
        let out_vars = forms.first().map_or(0, |f| f.nvars);
        let mut powers: Vec<Vec<MultiPoly>> =
            forms.iter().map(|_| vec![MultiPoly::one(out_vars)]).collect();
        let mut r = MultiPoly::zero(out_vars);
        for (m, c) in &self.terms {
            let mut t = MultiPoly::constant(out_vars, c.clone());
            for v in 0..self.nvars {
                let e = m.get(v) as usize;
                if e == 0 {
                    continue;
                }
                while powers[v].len() <= e {
                    let next = powers[v].last().unwrap().mul(&forms[v]);
                    powers[v].push(next);
                }
                t = t.mul(&powers[v][e]);
            }
            r.add_assign(&t);
        }
        r
    }

    /// `p(M x)` for an integer matrix `M` (row-major).
    pub fn compose_matrix(&self, mat: &[Vec<i64>]) -> MultiPoly {
        let n = self.nvars;
        let forms: Vec<MultiPoly> = (0..n)
            .map(|i| {
                let mut f = MultiPoly::zero(n);
                for j in 0..n {
                    if mat[i][j] != 0 {
                        f.add_term(Monomial::default().with(j, 1), Rational::from(mat[i][j]));
                    }
                }
                f
            })
            .collect();
        self.substitute(&forms)
    }

    /// Extend to `nvars` variables (new variables appended, unused).
    pub fn extend_vars(&self, nvars: usize) -> MultiPoly {
        assert!(nvars >= self.nvars && nvars <= MAX_VARS);
        MultiPoly { nvars, terms: self.terms.clone() }
    }

    /// Map variable `v` of `self` to variable `map[v]` of a polynomial with `nvars` variables.
    pub fn rename_vars(&self, nvars: usize, map: &[usize]) -> MultiPoly {
        let mut r = MultiPoly::zero(nvars);
        for (m, c) in &self.terms {
            let mut nm = Monomial::default();
            for v in 0..self.nvars {
                let e = m.get(v);
                if e > 0 {
                    nm = nm.with(map[v], nm.get(map[v]) + e);
                }
            }
            r.add_term_ref(nm, c);
        }
        r
    }

    fn depends_on(&self, var: usize) -> bool {
        self.terms.keys().any(|m| m.get(var) > 0)
    }

    /// `∫_{lower}^{upper} p d(var)` with affine limits not involving `var`.
    pub fn integrate_partial(&self, var: usize, lower: &Affine, upper: &Affine) -> Result<MultiPoly> {
        if var >= self.nvars {
            return Err(Error::InvalidLimits(format!("variable {} out of range", var)));
        }
        if lower.coeffs.len() != self.nvars || upper.coeffs.len() != self.nvars {
            return Err(Error::InvalidLimits("limit arity does not match polynomial".into()));
        }
        if lower.depends_on(var) || upper.depends_on(var) {
            return Err(Error::InvalidLimits(format!(
                "limit of variable {} refers to the variable itself",
                var
            )));
        }
        // group terms by the exponent of `var`
        let mut groups: BTreeMap<u32, MultiPoly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let e = m.get(var);
            groups
                .entry(e)
                .or_insert_with(|| MultiPoly::zero(self.nvars))
                .add_term_ref(m.with(var, 0), c);
        }
        let hi = upper.to_poly();
        let lo = lower.to_poly();
        let mut hi_pow = vec![MultiPoly::one(self.nvars)];
        let mut lo_pow = vec![MultiPoly::one(self.nvars)];
        let mut r = MultiPoly::zero(self.nvars);
        for (e, rest) in groups {
            let k = e as usize + 1;
            while hi_pow.len() <= k {
                let h = hi_pow.last().unwrap().mul(&hi);
                let l = lo_pow.last().unwrap().mul(&lo);
                hi_pow.push(h);
                lo_pow.push(l);
            }
            let diff = hi_pow[k].sub(&lo_pow[k]).scale(&Rational::from((1, k as u32)));
            r.add_assign(&rest.mul(&diff));
        }
        Ok(r)
    }

    /// Exact iterated integral; `limits[0]` is the innermost integration.
    pub fn integrate_iterated(&self, limits: &[Limit]) -> Result<Rational> {
        let mut done = vec![false; self.nvars];
        let mut p = self.clone();
        for lim in limits {
            if lim.var >= self.nvars || done[lim.var] {
                return Err(Error::InvalidLimits(format!("variable {} integrated twice", lim.var)));
            }
            for (v, &d) in done.iter().enumerate() {
                if d && (lim.lower.depends_on(v) || lim.upper.depends_on(v)) {
                    return Err(Error::InvalidLimits(format!(
                        "limit for variable {} refers to already integrated variable {}",
                        lim.var, v
                    )));
                }
            }
            p = p.integrate_partial(lim.var, &lim.lower, &lim.upper)?;
            done[lim.var] = true;
        }
        for v in 0..self.nvars {
            if !done[v] && p.depends_on(v) {
                return Err(Error::InvalidLimits(format!("variable {} is not integrated", v)));
            }
        }
        Ok(p.coeff(Monomial::default()))
    }

    /// Parse-free constructor from `(exponents, coefficient)` pairs.
    pub fn from_terms(nvars: usize, terms: &[(&[u32], Rational)]) -> MultiPoly {
        let mut p = MultiPoly::zero(nvars);
        for (e, c) in terms {
            p.add_term(Monomial::new(e), c.clone());
        }
        p
    }
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{}", c)?;
            for v in 0..self.nvars {
                match m.get(v) {
                    0 => {}
                    1 => write!(f, "*x{}", v + 1)?,
                    e => write!(f, "*x{}^{}", v + 1, e)?,
                }
            }
        }
        Ok(())
    }
}

/// `q^e` for a nonnegative exponent.
pub fn rat_pow(q: &Rational, e: u32) -> Rational {
    use rug::ops::Pow;
    Rational::from(q.pow(e as i32))
}

trait AssignMul {
    fn assign_mul(&mut self, a: &Rational, b: &Rational);
}

impl AssignMul for Rational {
    #[inline]
    fn assign_mul(&mut self, a: &Rational, b: &Rational) {
        use rug::Assign;
        self.assign(a * b);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    fn cst(c: Rational) -> Affine {
        Affine::constant(2, c)
    }

    #[test]
    fn box_volume() {
        let p = MultiPoly::one(2);
        let lims = [Limit::new(0, cst(q(-1, 2)), cst(q(0, 1))), Limit::new(1, cst(q(0, 1)), cst(q(1, 2)))];
        assert_eq!(p.integrate_iterated(&lims).unwrap(), q(1, 4));
    }

    #[test]
    fn triangle_moment() {
        let p = MultiPoly::var(2, 0);
        let x2 = Affine::new(2, &[(1, q(1, 1))], q(0, 1));
        let lims = [Limit::new(0, cst(q(0, 1)), x2), Limit::new(1, cst(q(0, 1)), cst(q(1, 1)))];
        assert_eq!(p.integrate_iterated(&lims).unwrap(), q(1, 6));
    }

    #[test]
    fn quadratic_over_box() {
        let p = MultiPoly::from_terms(2, &[(&[2, 0], q(1, 1)), (&[0, 2], q(1, 1))]);
        let lims = [Limit::new(0, cst(q(-1, 2)), cst(q(0, 1))), Limit::new(1, cst(q(0, 1)), cst(q(1, 2)))];
        let exact = p.integrate_iterated(&lims).unwrap();
        // each square contributes 1/48
        assert_eq!(exact, q(1, 24));
        let n = 400;
        let h = 0.5 / n as f64;
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                let x1 = -0.5 + (i as f64 + 0.5) * h;
                let x2 = (j as f64 + 0.5) * h;
                acc += (x1 * x1 + x2 * x2) * h * h;
            }
        }
        assert!((acc - exact.to_f64()).abs() < 1e-6);
    }

    #[test]
    fn rejects_bad_limits() {
        let p = MultiPoly::one(2);
        let x1 = Affine::new(2, &[(0, q(1, 1))], q(0, 1));
        let lims = [Limit::new(0, cst(q(0, 1)), cst(q(1, 1))), Limit::new(1, cst(q(0, 1)), x1.clone())];
        assert!(p.integrate_iterated(&lims).is_err());
        let self_ref = [Limit::new(0, cst(q(0, 1)), x1)];
        assert!(p.integrate_iterated(&self_ref).is_err());
        let partial = [Limit::new(0, cst(q(0, 1)), cst(q(1, 1)))];
        assert!(MultiPoly::var(2, 1).integrate_iterated(&partial).is_err());
    }

    #[test]
    fn monomial_packing() {
        let m = Monomial::new(&[3, 0, 7]);
        assert_eq!(m.get(0), 3);
        assert_eq!(m.get(2), 7);
        assert_eq!(m.mul(Monomial::new(&[1, 2, 0])).exponents(3), vec![4, 2, 7]);
        assert_eq!(m.degree(), 10);
    }

    #[test]
    fn substitution_matches_evaluation() {
        let p = MultiPoly::from_terms(2, &[(&[2, 1], q(3, 1)), (&[0, 1], q(-1, 2)), (&[0, 0], q(5, 1))]);
        let m = vec![vec![0, 1], vec![-1, -1]];
        let c = p.compose_matrix(&m);
        let x = [q(1, 3), q(-2, 7)];
        let mx = [x[1].clone(), Rational::from(-Rational::from(&x[0] + &x[1]))];
        assert_eq!(c.eval(&x), p.eval(&mx));
    }
}
