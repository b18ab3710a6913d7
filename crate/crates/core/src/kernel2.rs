//! Reproducing kernel for `n = 2`.
//!
//! With `s(x) = sin(πx)/(πx)`, `s_±(w, z) = (s(w - z) ± s(w + z))/2` and
//! `u = 1/(πm√2)`,
//!
//! `k_+(x, y) = (s_+(x, y) - s_+(u, y) a(x)/a(u)) / (1 - 1/(2(πmx)^2))`,
//! `k_-(x, y) = (s_-(x, y) - s_-(u, y) b(x)/b(u)) / (1 - 1/(2(πmx)^2))`,
//!
//! where `a(x) = -s(x)/m + (πx sin πx + cos πx)/(2(πmx)^2)` and
//! `b(x) = cos(πx)/(2(πm)^2 x)`. Then `K(x, y) = (k_+ + k_-)(x/m, y/m)/m`.
//! Everything is written over [`Series`] so the removable singularity at
//! `x = 0` is a limit along `x = ε`.

use rug::Rational;

use crate::arith::{Interval, Scalar, Series};
use crate::error::{Error, Result};
use crate::fourier::EXPANSION_ORDERS;

/// `K(0, 0)` and `c_{2,m} = 1/K(0, 0) = cot(1/(√2 m))/√2 - (2m-1)/(2m)`.
pub fn k00(m: u32, prec: u32) -> (Scalar, Scalar) {
    assert!(m >= 1);
    let sqrt2 = Interval::from_int(2, prec).sqrt().expect("positive");
    let t = sqrt2.mul_int(m as i64).recip().expect("nonzero");
    let cot = t.cos().checked_div(&t.sin()).expect("t in (0, 1)");
    let c = cot.checked_div(&sqrt2).expect("nonzero") - Interval::from_rational(&Rational::from((2 * m as i64 - 1, 2 * m as i64)), prec);
    let k = c.recip().expect("K(0,0) is finite");
    (Scalar::Approx(k), Scalar::Approx(c))
}

struct Consts {
    m: Scalar,
    pi: Series,
    /// `2 π^2 m^2`
    two_pi2m2: Series,
    u: Series,
    order: usize,
    prec: u32,
}

impl Consts {
    fn new(m: u32, order: usize, prec: u32) -> Consts {
        let pi = Interval::pi(prec);
        let two_pi2m2 = pi.sqr().mul_int(2 * (m as i64) * (m as i64));
        let u = two_pi2m2.sqrt().expect("positive").recip().expect("nonzero");
        let c = |v: Interval| Series::constant(Scalar::Approx(v), order, prec);
        Consts { m: Scalar::int(m as i64), pi: c(pi), two_pi2m2: c(two_pi2m2), u: c(u), order, prec }
    }

    fn one(&self) -> Series {
        Series::constant(Scalar::one(), self.order, self.prec)
    }

    fn half(&self, s: Series) -> Series {
        s.scale(&Scalar::ratio(1, 2))
    }

    fn s_pm(&self, w: &Series, z: &Series, plus: bool) -> Result<Series> {
        let a = w.sub(z).sinc_pi()?;
        let b = w.add(z).sinc_pi()?;
        Ok(self.half(if plus { a.add(&b) } else { a.sub(&b) }))
    }

    fn a(&self, x: &Series) -> Result<Series> {
        let px = x.mul(&self.pi);
        let num = px.mul(&x.sin_pi()?).add(&x.cos_pi()?);
        let den = self.two_pi2m2.mul(&x.mul(x));
        let m_inv = Scalar::one().checked_div(&self.m)?;
        Ok(num.div(&den)?.sub(&x.sinc_pi()?.scale(&m_inv)))
    }

    fn b(&self, x: &Series) -> Result<Series> {
        x.cos_pi()?.div(&self.two_pi2m2.mul(x))
    }

    fn den(&self, x: &Series) -> Result<Series> {
        Ok(self.one().sub(&self.two_pi2m2.mul(&x.mul(x)).recip()?))
    }

    /// `(k_+ + k_-)(x, y)` for already scaled arguments.
    fn k_sum(&self, x: &Series, y: &Series) -> Result<Series> {
        let u = &self.u;
        let den = self.den(x)?;
        let kp = self.s_pm(x, y, true)?.sub(&self.s_pm(u, y, true)?.mul(&self.a(x)?.div(&self.a(u)?)?));
        let km = self.s_pm(x, y, false)?.sub(&self.s_pm(u, y, false)?.mul(&self.b(x)?.div(&self.b(u)?)?));
        kp.add(&km).div(&den)
    }
}

fn eval_at(m: u32, x: &Rational, y: &Rational, prec: u32) -> Result<Scalar> {
    let xs = Rational::from(x / m);
    let ys = Rational::from(y / m);
    let line = |q: &Rational, order: usize, step: i64| {
        Series::linear(Scalar::Exact(q.clone()), Scalar::int(step), order, prec)
    };
    let scale = Rational::from((1, m));
    if xs != 0 {
        let c = Consts::new(m, 1, prec);
        let v = c.k_sum(&Series::constant(Scalar::Exact(xs), 1, prec), &Series::constant(Scalar::Exact(ys), 1, prec))?;
        return Ok(v.coeff(0).expect("constant").mul_rational(&scale));
    }
    for &order in EXPANSION_ORDERS.iter() {
        let c = Consts::new(m, order, prec);
        match c.k_sum(&line(&xs, order, 1), &Series::constant(Scalar::Exact(ys.clone()), order, prec)).and_then(|s| s.limit()) {
            Ok(v) => return Ok(v.mul_rational(&scale)),
            Err(Error::ExpansionCap(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::ExpansionCap(*EXPANSION_ORDERS.last().unwrap()))
}

/// `K(x, y)` at rational points.
///
/// `x = 0` is resolved as a limit. Near the zeros of the denominator
/// the evaluation is retried at higher precision and, failing that, with the
/// arguments swapped (`K` is symmetric).
pub fn kernel2_eval(m: u32, x: &Rational, y: &Rational, prec: u32) -> Result<Scalar> {
    assert!(m >= 1);
    let mut last = Error::DivisionByZero;
    for (a, b) in [(x, y), (y, x)] {
        let mut p = prec;
        for _ in 0..4 {
            match eval_at(m, a, b, p) {
                Ok(v) => return Ok(v),
                Err(e @ Error::DivisionByZero) => last = e,
                Err(e) => return Err(e),
            }
            p *= 2;
        }
    }
    Err(last)
}

/// `f64` convenience used by quadrature checks.
pub fn kernel2_f64(m: u32, x: f64, y: f64) -> f64 {
    let q = |v: f64| Rational::from_f64(v).expect("finite");
    kernel2_eval(m, &q(x), &q(y), 128).expect("kernel evaluates").to_f64()
}
