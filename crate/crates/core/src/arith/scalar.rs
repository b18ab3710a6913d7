//! Values that are either exact rationals or enclosures.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rug::Rational;

use super::interval::Interval;
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub enum Scalar {
    Exact(Rational),
    Approx(Interval),
}

impl Scalar {
    pub fn int(v: i64) -> Scalar {
        Scalar::Exact(Rational::from(v))
    }

    pub fn ratio(n: i64, d: i64) -> Scalar {
        Scalar::Exact(Rational::from((n, d)))
    }

    pub fn zero() -> Scalar {
        Scalar::Exact(Rational::new())
    }

    pub fn one() -> Scalar {
        Scalar::int(1)
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            Scalar::Exact(q) => Some(q),
            Scalar::Approx(_) => None,
        }
    }

    /// Working precision, if this is an enclosure.
    pub fn prec(&self) -> Option<u32> {
        match self {
            Scalar::Exact(_) => None,
            Scalar::Approx(iv) => Some(iv.prec()),
        }
    }

    pub fn to_interval(&self, prec: u32) -> Interval {
        match self {
            Scalar::Exact(q) => Interval::from_rational(q, prec),
            Scalar::Approx(iv) => iv.clone(),
        }
    }

    pub fn is_exact_zero(&self) -> bool {
        matches!(self, Scalar::Exact(q) if *q == 0)
    }

    pub fn contains_zero(&self) -> bool {
        match self {
            Scalar::Exact(q) => *q == 0,
            Scalar::Approx(iv) => iv.contains_zero(),
        }
    }

    pub fn is_positive(&self) -> bool {
        match self {
            Scalar::Exact(q) => *q > 0,
            Scalar::Approx(iv) => iv.is_positive(),
        }
    }

    pub fn contains(&self, q: &Rational) -> bool {
        match self {
            Scalar::Exact(v) => v == q,
            Scalar::Approx(iv) => iv.contains_rational(q),
        }
    }

    /// Enclosures intersect (exact values must be equal).
    pub fn overlaps(&self, other: &Scalar) -> bool {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
            (Scalar::Exact(a), Scalar::Approx(b)) | (Scalar::Approx(b), Scalar::Exact(a)) => {
                b.contains_rational(a)
            }
            (Scalar::Approx(a), Scalar::Approx(b)) => a.overlaps(b),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(q) => q.to_f64(),
            Scalar::Approx(iv) => iv.to_f64(),
        }
    }

    /// Radius of the enclosure (0 for exact values).
    pub fn rad_f64(&self) -> f64 {
        match self {
            Scalar::Exact(_) => 0.0,
            Scalar::Approx(iv) => iv.rad_f64(),
        }
    }

    /// Midpoint as an exact rational.
    pub fn mid_rational(&self) -> Rational {
        match self {
            Scalar::Exact(q) => q.clone(),
            Scalar::Approx(iv) => iv.mid_rational(),
        }
    }

    pub fn checked_div(&self, o: &Scalar) -> Result<Scalar> {
        match (self, o) {
            (Scalar::Exact(a), Scalar::Exact(b)) => {
                if *b == 0 {
                    Err(Error::DivisionByZero)
                } else {
                    Ok(Scalar::Exact(Rational::from(a / b)))
                }
            }
            _ => {
                let p = common_prec(self, o);
                Ok(Scalar::Approx(self.to_interval(p).checked_div(&o.to_interval(p))?))
            }
        }
    }

    pub fn mul_rational(&self, q: &Rational) -> Scalar {
        match self {
            Scalar::Exact(a) => Scalar::Exact(Rational::from(a * q)),
            Scalar::Approx(iv) => Scalar::Approx(iv.mul_rational(q)),
        }
    }

    pub fn pow(&self, k: u32) -> Scalar {
        match self {
            Scalar::Exact(a) => Scalar::Exact(super::poly::rat_pow(a, k)),
            Scalar::Approx(iv) => Scalar::Approx(iv.pow(k)),
        }
    }
}

fn common_prec(a: &Scalar, b: &Scalar) -> u32 {
    a.prec().max(b.prec()).expect("at least one enclosure")
}

impl From<Rational> for Scalar {
    fn from(q: Rational) -> Self {
        Scalar::Exact(q)
    }
}

impl From<Interval> for Scalar {
    fn from(iv: Interval) -> Self {
        Scalar::Approx(iv)
    }
}

macro_rules! scalar_op {
    ($tr:ident, $f:ident) => {
        impl<'a> $tr<&'a Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $f(self, o: &'a Scalar) -> Scalar {
                match (self, o) {
                    (Scalar::Exact(a), Scalar::Exact(b)) => {
                        Scalar::Exact(Rational::from(a.$f(b)))
                    }
                    (Scalar::Approx(a), Scalar::Approx(b)) => Scalar::Approx(a.$f(b)),
                    (Scalar::Exact(a), Scalar::Approx(b)) => {
                        Scalar::Approx(Interval::from_rational(a, b.prec()).$f(b))
                    }
                    (Scalar::Approx(a), Scalar::Exact(b)) => {
                        Scalar::Approx(a.$f(&Interval::from_rational(b, a.prec())))
                    }
                }
            }
        }
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $f(self, o: Scalar) -> Scalar {
                (&self).$f(&o)
            }
        }
        impl<'a> $tr<&'a Scalar> for Scalar {
            type Output = Scalar;
            fn $f(self, o: &'a Scalar) -> Scalar {
                (&self).$f(o)
            }
        }
    };
}
scalar_op!(Add, add);
scalar_op!(Sub, sub);
scalar_op!(Mul, mul);

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(a) => Scalar::Exact(Rational::from(-a)),
            Scalar::Approx(a) => Scalar::Approx(-a),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(q) => write!(f, "{}", q),
            Scalar::Approx(iv) => fmt::Display::fmt(iv, f),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn promotion() {
        let a = Scalar::ratio(1, 3);
        let b = Scalar::Approx(Interval::from_int(2, 128));
        let c = &a * &b;
        assert!(c.contains(&Rational::from((2, 3))));
        assert!(!c.is_exact());
        assert!((&a + &a).is_exact());
    }

    #[test]
    fn exact_division_by_zero() {
        assert!(Scalar::one().checked_div(&Scalar::zero()).is_err());
    }
}
