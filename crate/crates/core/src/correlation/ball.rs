//! Double-precision midpoint-radius arithmetic for the lattice sums.
//!
//! Every operation rounds to nearest and then inflates the radius by a bound
//! on the rounding error: each radius is a sum of at most a few
//! nonnegative products, whose own floating-point error is covered by the
//! factor `1 + 2^-50`, plus `f64::MIN_POSITIVE` against underflow.

use rug::float::Round;
use rug::Float;

use crate::arith::Interval;

const U: f64 = f64::EPSILON / 2.0;
const INFLATE: f64 = 1.0 + 4.0 * f64::EPSILON;

#[inline]
fn up(x: f64) -> f64 {
    x * INFLATE + f64::MIN_POSITIVE
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Ball {
    pub mid: f64,
    pub rad: f64,
}

impl Ball {
    pub const ZERO: Ball = Ball { mid: 0.0, rad: 0.0 };

    /// Exact small integer (`|v| < 2^53`).
    #[inline]
    pub fn int(v: i64) -> Ball {
        debug_assert!(v.unsigned_abs() < 1 << 53);
        Ball { mid: v as f64, rad: 0.0 }
    }

    /// Enclose an MPFR interval.
    pub fn from_interval(iv: &Interval) -> Ball {
        let mid = iv.mid().to_f64();
        let err = Float::with_val(iv.prec() + 64, iv.mid() - mid).abs();
        let rad = Float::with_val_round(64, iv.rad() + &err, Round::Up).0;
        Ball { mid, rad: up(rad.to_f64_round(Round::Up)) }
    }

    pub fn to_interval(self, prec: u32) -> Interval {
        Interval::from_parts(Float::with_val(prec, self.mid), &Float::with_val(64, self.rad))
    }

    #[inline]
    pub fn add(self, o: Ball) -> Ball {
        let mid = self.mid + o.mid;
        Ball { mid, rad: up(self.rad + o.rad + U * mid.abs()) }
    }

    #[inline]
    pub fn sub(self, o: Ball) -> Ball {
        self.add(o.neg())
    }

    #[inline]
    pub fn neg(self) -> Ball {
        Ball { mid: -self.mid, rad: self.rad }
    }

    #[inline]
    pub fn mul(self, o: Ball) -> Ball {
        let mid = self.mid * o.mid;
        let rad = self.mid.abs() * o.rad + o.mid.abs() * self.rad + self.rad * o.rad + U * mid.abs();
        Ball { mid, rad: up(rad) }
    }

    /// Multiply by an exactly representable value.
    #[inline]
    pub fn scale(self, k: f64) -> Ball {
        let mid = self.mid * k;
        Ball { mid, rad: up(self.rad * k.abs() + U * mid.abs()) }
    }

    /// Divide by an exactly representable nonzero value.
    #[inline]
    pub fn div_exact(self, k: f64) -> Ball {
        debug_assert!(k != 0.0);
        let mid = self.mid / k;
        Ball { mid, rad: up(self.rad / k.abs() * INFLATE + U * mid.abs()) }
    }

    pub fn contains_zero(self) -> bool {
        self.mid.abs() <= self.rad
    }

    /// Upper bound on `|x|` over the ball.
    pub fn abs_upper(self) -> f64 {
        up(self.mid.abs() + self.rad)
    }

    pub fn widen(self, e: f64) -> Ball {
        Ball { mid: self.mid, rad: up(self.rad + e.abs()) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::Rational;

    #[test]
    fn encloses_thirds() {
        let third = Ball::int(1).div_exact(3.0);
        let sum = third.add(third).add(third);
        let iv = sum.to_interval(128);
        assert!(iv.contains_rational(&Rational::from(1)));
    }

    #[test]
    fn from_pi() {
        let b = Ball::from_interval(&Interval::pi(256));
        assert!(b.to_interval(256).contains(&Interval::pi(256)));
        assert!(b.rad < 1e-15);
    }

    #[test]
    fn long_sum_stays_valid() {
        let tenth = Ball::from_interval(&Interval::from_ratio(1, 10, 128));
        let mut acc = Ball::ZERO;
        for _ in 0..100_000 {
            acc = acc.add(tenth.mul(tenth));
        }
        assert!(acc.to_interval(128).contains_rational(&Rational::from(1000)));
    }
}
