//! Truncated Laurent series in one small parameter `eps`.
//!
//! Used to evaluate removable singularities: a function is expanded along
//! `y + eps*v`, the negative powers must cancel, and the `eps^0` coefficient
//! is the limit.

use rug::Rational;

use super::interval::Interval;
use super::scalar::Scalar;
use crate::error::{Error, Result};

/// `sum_k coeffs[k] * eps^(val + k) + O(eps^(val + coeffs.len()))`.
#[derive(Clone, Debug)]
pub struct Series {
    val: i32,
    coeffs: Vec<Scalar>,
    prec: u32,
}

impl Series {
    /// Constant series with `order` tracked coefficients.
    pub fn constant(c: Scalar, order: usize, prec: u32) -> Series {
        let mut coeffs = vec![Scalar::zero(); order.max(1)];
        coeffs[0] = c;
        Series { val: 0, coeffs, prec }
    }

    /// `c + d * eps`.
    pub fn linear(c: Scalar, d: Scalar, order: usize, prec: u32) -> Series {
        let mut s = Series::constant(c, order.max(2), prec);
        s.coeffs[1] = d;
        s.normalize()
    }

    pub fn valuation(&self) -> i32 {
        self.val
    }

    /// Exponent of the first untracked power.
    pub fn abs_order(&self) -> i32 {
        self.val + self.coeffs.len() as i32
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    /// Coefficient of `eps^k` if it is tracked.
    pub fn coeff(&self, k: i32) -> Option<Scalar> {
        if k >= self.abs_order() {
            None
        } else if k < self.val {
            Some(Scalar::zero())
        } else {
            Some(self.coeffs[(k - self.val) as usize].clone())
        }
    }

    /// Drop leading coefficients that are exactly zero.
    fn normalize(mut self) -> Series {
        let lead = self.coeffs.iter().take_while(|c| c.is_exact_zero()).count();
        if lead == self.coeffs.len() {
            // keep one exact zero so the order information survives
            self.val += lead as i32 - 1;
            self.coeffs = vec![Scalar::zero()];
            return self;
        }
        if lead > 0 {
            self.coeffs.drain(..lead);
            self.val += lead as i32;
        }
        self
    }

    fn from_parts(val: i32, coeffs: Vec<Scalar>, prec: u32) -> Series {
        Series { val, coeffs, prec }.normalize()
    }

    fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_exact_zero())
    }

    pub fn add(&self, o: &Series) -> Series {
        let v = self.val.min(o.val);
        let top = self.abs_order().min(o.abs_order());
        let len = (top - v).max(1) as usize;
        let coeffs = (0..len)
            .map(|k| {
                let e = v + k as i32;
                let a = self.coeff(e).unwrap_or_else(Scalar::zero);
                let b = o.coeff(e).unwrap_or_else(Scalar::zero);
                &a + &b
            })
            .collect();
        Series::from_parts(v, coeffs, self.prec.max(o.prec))
    }

    pub fn neg(&self) -> Series {
        Series { val: self.val, coeffs: self.coeffs.iter().map(|c| -c).collect(), prec: self.prec }
    }

    pub fn sub(&self, o: &Series) -> Series {
        self.add(&o.neg())
    }

    pub fn scale(&self, k: &Scalar) -> Series {
        Series::from_parts(self.val, self.coeffs.iter().map(|c| c * k).collect(), self.prec)
    }

    pub fn mul(&self, o: &Series) -> Series {
        let prec = self.prec.max(o.prec);
        if self.is_zero() || o.is_zero() {
            // the product is known to vanish up to the combined order
            let top = (self.abs_order() + o.val).min(o.abs_order() + self.val);
            return Series { val: top - 1, coeffs: vec![Scalar::zero()], prec };
        }
        let len = self.coeffs.len().min(o.coeffs.len());
        let mut coeffs = Vec::with_capacity(len);
        for k in 0..len {
            let mut acc = Scalar::zero();
            for j in 0..=k {
                let a = &self.coeffs[j];
                let b = &o.coeffs[k - j];
                if a.is_exact_zero() || b.is_exact_zero() {
                    continue;
                }
                acc = &acc + &(a * b);
            }
            coeffs.push(acc);
        }
        Series::from_parts(self.val + o.val, coeffs, prec)
    }

    /// Multiplicative inverse; the leading coefficient must be nonzero.
    pub fn recip(&self) -> Result<Series> {
        let c0 = &self.coeffs[0];
        if c0.contains_zero() {
            return Err(Error::Singular("series with vanishing leading coefficient".into()));
        }
        let inv0 = Scalar::one().checked_div(c0)?;
        let len = self.coeffs.len();
        let mut b: Vec<Scalar> = Vec::with_capacity(len);
        b.push(inv0.clone());
        for k in 1..len {
            let mut acc = Scalar::zero();
            for j in 1..=k {
                if self.coeffs[j].is_exact_zero() {
                    continue;
                }
                acc = &acc + &(&self.coeffs[j] * &b[k - j]);
            }
            b.push(-&(&acc * &inv0));
        }
        Ok(Series::from_parts(-self.val, b, self.prec))
    }

    pub fn div(&self, o: &Series) -> Result<Series> {
        Ok(self.mul(&o.recip()?))
    }

    /// Split into the `eps^0` coefficient and the part of positive valuation.
    fn split_constant(&self) -> Result<(Scalar, Series)> {
        if self.val < 0 {
            return Err(Error::Singular("transcendental function of a pole".into()));
        }
        let c = self.coeff(0).ok_or(Error::ExpansionCap(self.coeffs.len()))?;
        let mut rest = self.clone();
        if rest.val == 0 {
            rest.coeffs[0] = Scalar::zero();
            rest = rest.normalize();
        }
        Ok((c, rest))
    }

    fn pi_series(&self) -> Scalar {
        Scalar::Approx(Interval::pi(self.prec))
    }

    /// `(cos(pi t), sin(pi t))` for `t` of positive valuation.
    fn trig_small(&self, t: &Series) -> (Series, Series) {
        let target = self.abs_order().max(1);
        let order = target as usize;
        let mut c = Series::constant(Scalar::one(), order, self.prec);
        let mut s = Series::constant(Scalar::zero(), order, self.prec);
        if t.is_zero() {
            return (c, s);
        }
        let pt = t.scale(&self.pi_series());
        let mut power = Series::constant(Scalar::one(), order, self.prec);
        let mut k: u32 = 0;
        loop {
            k += 1;
            power = power.mul(&pt).scale(&Scalar::ratio(1, k as i64));
            if power.is_zero() || power.val >= target {
                break;
            }
            // (pi t)^k / k! enters cos for even k and sin for odd k, signs alternating in pairs
            let term = if (k / 2) % 2 == 0 { power.clone() } else { power.neg() };
            if k % 2 == 0 {
                c = c.add(&term);
            } else {
                s = s.add(&term);
            }
        }
        (c, s)
    }

    fn truncate(mut self, abs: i32) -> Series {
        let keep = (abs - self.val).max(1) as usize;
        if self.coeffs.len() > keep {
            self.coeffs.truncate(keep);
        }
        self
    }

    fn const_trig(&self, c: &Scalar) -> (Scalar, Scalar) {
        match c {
            Scalar::Exact(q) => (
                Scalar::Approx(Interval::cos_pi_rational(q, self.prec)),
                Scalar::Approx(Interval::sin_pi_rational(q, self.prec)),
            ),
            Scalar::Approx(iv) => (Scalar::Approx(iv.cos_pi()), Scalar::Approx(iv.sin_pi())),
        }
    }

    /// `cos(pi s)`.
    pub fn cos_pi(&self) -> Result<Series> {
        let (c, t) = self.split_constant()?;
        let (cc, sc) = self.const_trig(&c);
        let (ct, st) = self.trig_small(&t);
        Ok(ct.scale(&cc).sub(&st.scale(&sc)).truncate(self.abs_order()))
    }

    /// `sin(pi s)`.
    pub fn sin_pi(&self) -> Result<Series> {
        let (c, t) = self.split_constant()?;
        let (cc, sc) = self.const_trig(&c);
        let (ct, st) = self.trig_small(&t);
        Ok(st.scale(&cc).add(&ct.scale(&sc)).truncate(self.abs_order()))
    }

    /// `sin(pi s)/(pi s)`, analytic through `s = 0`.
    pub fn sinc_pi(&self) -> Result<Series> {
        let (c, _) = self.split_constant()?;
        if !c.is_exact_zero() {
            let den = self.scale(&self.pi_series());
            return self.sin_pi()?.div(&den);
        }
        let target = self.abs_order();
        if self.is_zero() {
            return Ok(Series::constant(Scalar::one(), target.max(1) as usize, self.prec));
        }
        // s has positive valuation: sinc(s) = sum (-1)^k (pi s)^{2k} / (2k+1)!
        let ps = self.scale(&self.pi_series());
        let ps2 = ps.mul(&ps);
        let mut acc = Series::constant(Scalar::one(), target as usize, self.prec);
        let mut term = acc.clone();
        let mut k: i64 = 0;
        loop {
            k += 1;
            term = term.mul(&ps2).scale(&Scalar::ratio(-1, (2 * k) * (2 * k + 1)));
            if term.is_zero() || term.val >= target {
                break;
            }
            acc = acc.add(&term);
        }
        Ok(acc.truncate(target))
    }

    /// The `eps^0` coefficient, after checking that all negative powers
    /// are compatible with zero (i.e. cancelled).
    pub fn limit(&self) -> Result<Scalar> {
        if self.abs_order() <= 0 {
            return Err(Error::ExpansionCap(self.coeffs.len()));
        }
        for k in self.val..0 {
            let c = self.coeff(k).expect("tracked");
            if !c.contains_zero() {
                return Err(Error::Singular(format!(
                    "pole of order {} does not cancel (coefficient {})",
                    -k, c
                )));
            }
        }
        Ok(self.coeff(0).expect("tracked"))
    }
}

/// Convenience: a series for `q + d*eps` with rational data.
pub fn rational_line(q: &Rational, d: &Rational, order: usize, prec: u32) -> Series {
    Series::linear(Scalar::Exact(q.clone()), Scalar::Exact(d.clone()), order, prec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sin_over_x_limit() {
        // sin(pi eps) / eps -> pi
        let eps = rational_line(&Rational::new(), &Rational::from(1), 6, 128);
        let f = eps.sin_pi().unwrap().div(&eps).unwrap();
        let v = f.limit().unwrap();
        assert!((v.to_f64() - std::f64::consts::PI).abs() < 1e-14);
    }

    #[test]
    fn cancelling_poles() {
        // (1 - cos(pi eps)) / eps^2 -> pi^2/2
        let eps = rational_line(&Rational::new(), &Rational::from(1), 8, 128);
        let num = Series::constant(Scalar::one(), 8, 128).sub(&eps.cos_pi().unwrap());
        let f = num.div(&eps.mul(&eps)).unwrap();
        let want = std::f64::consts::PI.powi(2) / 2.0;
        assert!((f.limit().unwrap().to_f64() - want).abs() < 1e-13);
    }

    #[test]
    fn uncancelled_pole_is_reported() {
        let eps = rational_line(&Rational::new(), &Rational::from(1), 4, 64);
        let f = Series::constant(Scalar::one(), 4, 64).div(&eps).unwrap();
        assert!(f.limit().is_err());
    }

    #[test]
    fn shifted_trig() {
        // cos(pi (1/3 + eps)) at eps^1 has coefficient -pi sin(pi/3)
        let s = rational_line(&Rational::from((1, 3)), &Rational::from(1), 4, 128);
        let c = s.cos_pi().unwrap();
        let c1 = c.coeff(1).unwrap().to_f64();
        let want = -std::f64::consts::PI * (std::f64::consts::PI / 3.0).sin();
        assert!((c1 - want).abs() < 1e-14);
    }

    #[test]
    fn sinc_through_zero() {
        let eps = rational_line(&Rational::new(), &Rational::from(2), 6, 128);
        let s = eps.sinc_pi().unwrap();
        assert!(s.coeff(0).unwrap().contains(&Rational::from(1)));
        // second-order coefficient: -(2 pi)^2/6
        let c2 = s.coeff(2).unwrap().to_f64();
        assert!((c2 + (2.0 * std::f64::consts::PI).powi(2) / 6.0).abs() < 1e-12);
    }
}
