//! Midpoint-radius enclosures over MPFR floats.
//!
//! The midpoint carries the working precision; the radius is kept at a fixed
//! low precision and every radius computation rounds up.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rug::float::{Constant, Round};
use rug::ops::AssignRound;
use rug::{Float, Integer, Rational};

use crate::error::{Error, Result};

/// Precision (bits) of interval radii.
pub const RAD_PREC: u32 = 64;

/// A closed ball `[mid - rad, mid + rad]` guaranteed to contain the exact value.
#[derive(Clone, Debug)]
pub struct Interval {
    mid: Float,
    rad: Float,
}

fn up<T>(v: T) -> Float
where
    Float: AssignRound<T, Round = Round, Ordering = Ordering>,
{
    Float::with_val_round(RAD_PREC, v, Round::Up).0
}

fn down<T>(v: T) -> Float
where
    Float: AssignRound<T, Round = Round, Ordering = Ordering>,
{
    Float::with_val_round(RAD_PREC, v, Round::Down).0
}

fn abs_up(x: &Float) -> Float {
    up(x.abs_ref())
}

/// Bound on |exact - mid| for a value rounded to nearest, given the MPFR ternary.
fn rounding_err(mid: &Float, ord: Ordering) -> Float {
    if ord == Ordering::Equal {
        return Float::new(RAD_PREC);
    }
    let mut e = abs_up(mid);
    e >>= mid.prec() - 1;
    e
}

fn nearest<T>(prec: u32, v: T) -> (Float, Float)
where
    Float: AssignRound<T, Round = Round, Ordering = Ordering>,
{
    let (mid, ord) = Float::with_val_round(prec, v, Round::Nearest);
    let err = rounding_err(&mid, ord);
    (mid, err)
}

impl Interval {
    /// Enclosure of a rational at `prec` bits.
    pub fn from_rational(q: &Rational, prec: u32) -> Self {
        let (mid, rad) = nearest(prec, q);
        Interval { mid, rad }
    }

    pub fn from_int(v: i64, prec: u32) -> Self {
        let (mid, rad) = nearest(prec, v);
        Interval { mid, rad }
    }

    pub fn from_integer(v: &Integer, prec: u32) -> Self {
        let (mid, rad) = nearest(prec, v);
        Interval { mid, rad }
    }

    /// `num / den` rounded once.
    pub fn from_ratio(num: i128, den: i128, prec: u32) -> Self {
        assert!(den != 0, "zero denominator");
        let n = Integer::from(num);
        let d = Integer::from(den);
        let (mid, rad) = nearest(prec, Rational::from((n, d)));
        Interval { mid, rad }
    }

    /// Ball with the given midpoint and radius; the radius is rounded up.
    pub fn from_parts(mid: Float, rad: &Float) -> Self {
        assert!(!rad.is_sign_negative() || rad.is_zero(), "negative radius");
        Interval { mid, rad: up(rad) }
    }

    pub fn zero(prec: u32) -> Self {
        Interval { mid: Float::new(prec), rad: Float::new(RAD_PREC) }
    }

    pub fn one(prec: u32) -> Self {
        Interval::from_int(1, prec)
    }

    pub fn pi(prec: u32) -> Self {
        let (mid, rad) = nearest(prec, Constant::Pi);
        Interval { mid, rad }
    }

    pub fn mid(&self) -> &Float {
        &self.mid
    }

    pub fn rad(&self) -> &Float {
        &self.rad
    }

    pub fn prec(&self) -> u32 {
        self.mid.prec()
    }

    /// Lower endpoint, rounded down at the working precision.
    pub fn lower(&self) -> Float {
        Float::with_val_round(self.prec(), &self.mid - &self.rad, Round::Down).0
    }

    /// Upper endpoint, rounded up at the working precision.
    pub fn upper(&self) -> Float {
        Float::with_val_round(self.prec(), &self.mid + &self.rad, Round::Up).0
    }

    /// Upper bound on `|x|` for every `x` in the ball.
    pub fn abs_upper(&self) -> Float {
        up(&abs_up(&self.mid) + &self.rad)
    }

    /// Lower bound on `|x|`; zero when the ball contains zero.
    pub fn abs_lower(&self) -> Float {
        let a = down(self.mid.abs_ref());
        let l = down(&a - &self.rad);
        if l.is_sign_negative() {
            Float::new(RAD_PREC)
        } else {
            l
        }
    }

    pub fn contains_zero(&self) -> bool {
        abs_down_cmp(&self.mid, &self.rad) != Ordering::Greater
    }

    pub fn is_positive(&self) -> bool {
        self.mid.is_sign_positive() && !self.contains_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mid.is_sign_negative() && !self.contains_zero()
    }

    pub fn is_exact(&self) -> bool {
        self.rad.is_zero()
    }

    /// True iff `|q - mid| <= rad`, decided exactly.
    pub fn contains_rational(&self, q: &Rational) -> bool {
        let m = self.mid.to_rational().expect("finite midpoint");
        let r = self.rad.to_rational().expect("finite radius");
        Rational::from(q - &m).abs() <= r
    }

    /// True iff the two balls intersect, decided exactly.
    pub fn overlaps(&self, other: &Interval) -> bool {
        let d = Rational::from(
            self.mid.to_rational().expect("finite") - other.mid.to_rational().expect("finite"),
        )
        .abs();
        let r = Rational::from(
            self.rad.to_rational().expect("finite") + other.rad.to_rational().expect("finite"),
        );
        d <= r
    }

    /// True iff `other` lies inside `self`.
    pub fn contains(&self, other: &Interval) -> bool {
        let d = Rational::from(
            self.mid.to_rational().expect("finite") - other.mid.to_rational().expect("finite"),
        )
        .abs();
        let slack = Rational::from(
            self.rad.to_rational().expect("finite") - other.rad.to_rational().expect("finite"),
        );
        d <= slack
    }

    pub fn to_f64(&self) -> f64 {
        self.mid.to_f64()
    }

    pub fn rad_f64(&self) -> f64 {
        self.rad.to_f64_round(Round::Up)
    }

    /// Midpoint as an exact rational.
    pub fn mid_rational(&self) -> Rational {
        self.mid.to_rational().expect("finite midpoint")
    }

    /// Enlarge the radius by `e` (rounded up).
    pub fn widen(&self, e: &Float) -> Interval {
        Interval { mid: self.mid.clone(), rad: up(&self.rad + e) }
    }

    /// Round the midpoint to a new precision, keeping the enclosure.
    pub fn with_prec(&self, prec: u32) -> Interval {
        let (mid, err) = nearest(prec, &self.mid);
        Interval { mid, rad: up(&self.rad + &err) }
    }

    /// Smallest ball (up to rounding) containing both inputs.
    pub fn hull(&self, other: &Interval) -> Interval {
        let prec = self.prec().max(other.prec());
        let lo = Float::with_val_round(prec, &self.mid - &self.rad, Round::Down).0;
        let lo2 = Float::with_val_round(prec, &other.mid - &other.rad, Round::Down).0;
        let hi = Float::with_val_round(prec, &self.mid + &self.rad, Round::Up).0;
        let hi2 = Float::with_val_round(prec, &other.mid + &other.rad, Round::Up).0;
        let lo = if lo < lo2 { lo } else { lo2 };
        let hi = if hi > hi2 { hi } else { hi2 };
        let mut mid = Float::with_val(prec, &lo + &hi);
        mid >>= 1;
        let r1 = up(&hi - &mid);
        let r2 = up(&mid - &lo);
        Interval { mid, rad: if r1 > r2 { r1 } else { r2 } }
    }

    pub fn mul_int(&self, k: i64) -> Interval {
        let (mid, err) = nearest(self.prec(), &self.mid * k);
        let rad = up(&self.rad * k.unsigned_abs());
        Interval { mid, rad: up(&rad + &err) }
    }

    pub fn mul_rational(&self, q: &Rational) -> Interval {
        self * &Interval::from_rational(q, self.prec())
    }

    pub fn sqr(&self) -> Interval {
        let (mid, err) = nearest(self.prec(), self.mid.square_ref());
        // |x^2 - m^2| <= 2|m|r + r^2
        let a = abs_up(&self.mid);
        let t = up(&a * &self.rad);
        let t = up(&t * 2u32);
        let r2 = up(self.rad.square_ref());
        let rad = up(&up(&t + &r2) + &err);
        Interval { mid, rad }
    }

    pub fn pow(&self, k: u32) -> Interval {
        let mut acc = Interval::one(self.prec());
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = base.sqr();
            }
        }
        acc
    }

    /// `1/self`; fails when the ball contains zero.
    pub fn recip(&self) -> Result<Interval> {
        Interval::one(self.prec()).checked_div(self)
    }

    /// `self / other`; fails when `other` contains zero.
    pub fn checked_div(&self, other: &Interval) -> Result<Interval> {
        if other.contains_zero() {
            return Err(Error::DivisionByZero);
        }
        let prec = self.prec().max(other.prec());
        let (mid, err) = nearest(prec, &self.mid / &other.mid);
        if self.rad.is_zero() && other.rad.is_zero() {
            return Ok(Interval { mid, rad: err });
        }
        // |x/y - a/b| <= (ra|b| + |a|rb) / (|b|(|b| - rb))
        let a = abs_up(&self.mid);
        let b_up = abs_up(&other.mid);
        let b_dn = down(other.mid.abs_ref());
        let num = up(&up(&self.rad * &b_up) + &up(&a * &other.rad));
        let gap = down(&b_dn - &other.rad);
        let den = down(&b_dn * &gap);
        let rad = up(&up(&num / &den) + &err);
        Ok(Interval { mid, rad })
    }

    pub fn sqrt(&self) -> Result<Interval> {
        if !self.is_positive() && !(self.is_exact() && self.mid.is_zero()) {
            return Err(Error::Singular("square root of a ball reaching non-positive values".into()));
        }
        let (mid, err) = nearest(self.prec(), self.mid.sqrt_ref());
        if self.rad.is_zero() {
            return Ok(Interval { mid, rad: err });
        }
        // |sqrt(x) - sqrt(m)| <= r / sqrt(m - r)
        let lo = down(&down(&self.mid - &self.rad));
        let s = down(lo.sqrt_ref());
        let rad = up(&up(&self.rad / &s) + &err);
        Ok(Interval { mid, rad })
    }

    pub fn sin(&self) -> Interval {
        let wp = self.prec();
        let (mid, err) = nearest(wp, self.mid.sin_ref());
        Interval { mid, rad: up(&self.rad + &err) }
    }

    pub fn cos(&self) -> Interval {
        let wp = self.prec();
        let (mid, err) = nearest(wp, self.mid.cos_ref());
        Interval { mid, rad: up(&self.rad + &err) }
    }

    /// `sin(pi q)` for exact rational `q`; exact at multiples of 1/2.
    pub fn sin_pi_rational(q: &Rational, prec: u32) -> Interval {
        let r = reduce_mod2(q);
        let twice = Rational::from(&r * 2u32);
        if twice.denom() == &1u32 {
            let v = match twice.numer().to_u32().unwrap_or(0) {
                0 | 2 => 0,
                1 => 1,
                _ => -1,
            };
            return Interval::from_int(v, prec);
        }
        let wp = prec + 24;
        let x = Interval::pi(wp).mul_rational(&r);
        x.sin().with_prec(prec)
    }

    /// `cos(pi q)` for exact rational `q`; exact at multiples of 1/2.
    pub fn cos_pi_rational(q: &Rational, prec: u32) -> Interval {
        let half = Rational::from((1, 2));
        Interval::sin_pi_rational(&Rational::from(&half - q), prec)
    }

    /// `sin(pi x)`.
    pub fn sin_pi(&self) -> Interval {
        if self.is_exact() {
            return Interval::sin_pi_rational(&self.mid_rational(), self.prec());
        }
        let wp = self.prec() + 24;
        (&Interval::pi(wp) * &self.with_prec(wp)).sin().with_prec(self.prec())
    }

    /// `cos(pi x)`.
    pub fn cos_pi(&self) -> Interval {
        if self.is_exact() {
            return Interval::cos_pi_rational(&self.mid_rational(), self.prec());
        }
        let wp = self.prec() + 24;
        (&Interval::pi(wp) * &self.with_prec(wp)).cos().with_prec(self.prec())
    }

    /// `sin(pi x)/(pi x)` with value 1 at the origin.
    pub fn sinc_pi(&self) -> Interval {
        let prec = self.prec();
        let eighth = Float::with_val(RAD_PREC, 0.125);
        if self.abs_lower() > eighth {
            let num = self.sin_pi();
            let den = &Interval::pi(prec) * self;
            return num.checked_div(&den).expect("argument bounded away from zero");
        }
        // Taylor series in t = pi x with an explicit tail bound.
        let wp = prec + 16;
        let t = &Interval::pi(wp) * &self.with_prec(wp);
        let t2 = t.sqr();
        let tmax = t.abs_upper();
        let tmax2 = up(tmax.square_ref());
        let mut sum = Interval::one(wp);
        let mut term = Interval::one(wp);
        let mut tail = Float::with_val(RAD_PREC, 1);
        let mut k: u32 = 0;
        loop {
            k += 1;
            let f = (2 * k) * (2 * k + 1);
            term = -&(&term * &t2).checked_div(&Interval::from_int(f as i64, wp)).expect("nonzero");
            sum = &sum + &term;
            // next omitted term magnitude: tail_k = T^{2k+2}/(2k+3)!
            tail = up(&tail * &tmax2);
            tail = up(&tail / f);
            let next = up(&up(&tail * &tmax2) / ((2 * k + 2) * (2 * k + 3)));
            if next.is_zero() || next.get_exp().unwrap_or(i32::MIN) < -(wp as i32) - 8 || k > 4 * wp {
                // tail of an alternating series with decreasing terms, doubled for safety
                let bound = up(&next * 2u32);
                return sum.widen(&bound).with_prec(prec);
            }
        }
    }
}

fn abs_down_cmp(mid: &Float, rad: &Float) -> Ordering {
    // compare |mid| with rad exactly
    let a = Float::with_val(mid.prec(), mid.abs_ref());
    a.partial_cmp(rad).expect("finite")
}

/// Representative of `q` modulo 2 in `[0, 2)`.
pub fn reduce_mod2(q: &Rational) -> Rational {
    let half = Rational::from(q / 2u32);
    let fl = half.floor();
    Rational::from(q - Rational::from(fl * 2u32))
}

impl<'a> Add<&'a Interval> for &'a Interval {
    type Output = Interval;
    fn add(self, o: &'a Interval) -> Interval {
        let prec = self.prec().max(o.prec());
        let (mid, err) = nearest(prec, &self.mid + &o.mid);
        let rad = up(&up(&self.rad + &o.rad) + &err);
        Interval { mid, rad }
    }
}

impl<'a> Sub<&'a Interval> for &'a Interval {
    type Output = Interval;
    fn sub(self, o: &'a Interval) -> Interval {
        let prec = self.prec().max(o.prec());
        let (mid, err) = nearest(prec, &self.mid - &o.mid);
        let rad = up(&up(&self.rad + &o.rad) + &err);
        Interval { mid, rad }
    }
}

impl<'a> Mul<&'a Interval> for &'a Interval {
    type Output = Interval;
    fn mul(self, o: &'a Interval) -> Interval {
        let prec = self.prec().max(o.prec());
        let (mid, err) = nearest(prec, &self.mid * &o.mid);
        if self.rad.is_zero() && o.rad.is_zero() {
            return Interval { mid, rad: err };
        }
        let a = abs_up(&self.mid);
        let b = abs_up(&o.mid);
        let t1 = up(&a * &o.rad);
        let t2 = up(&b * &self.rad);
        let t3 = up(&self.rad * &o.rad);
        let rad = up(&up(&up(&t1 + &t2) + &t3) + &err);
        Interval { mid, rad }
    }
}

impl Neg for &Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        Interval { mid: Float::with_val(self.prec(), -&self.mid), rad: self.rad.clone() }
    }
}

impl Neg for Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        Interval { mid: -self.mid, rad: self.rad }
    }
}

macro_rules! owned_ops {
    ($tr:ident, $f:ident) => {
        impl $tr<Interval> for Interval {
            type Output = Interval;
            fn $f(self, o: Interval) -> Interval {
                (&self).$f(&o)
            }
        }
        impl<'a> $tr<&'a Interval> for Interval {
            type Output = Interval;
            fn $f(self, o: &'a Interval) -> Interval {
                (&self).$f(o)
            }
        }
    };
}
owned_ops!(Add, add);
owned_ops!(Sub, sub);
owned_ops!(Mul, mul);

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(20);
        write!(
            f,
            "{} +/- {:.3e}",
            self.mid.to_string_radix(10, Some(digits)),
            self.rad.to_f64_round(Round::Up)
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    #[test]
    fn contains_examples() {
        let unit = Interval::from_parts(Float::new(64), &Float::with_val(64, 1));
        assert!(unit.contains_rational(&q(1, 2)));
        assert!(!unit.contains_rational(&q(2, 1)));
        let iv = Interval::from_parts(Float::with_val(64, 0.1444444), &Float::with_val(64, 1e-6));
        assert!(iv.contains_rational(&q(13, 90)));
    }

    #[test]
    fn exact_trig_points() {
        for (n, d, s) in [(0, 1, 0), (1, 2, 1), (1, 1, 0), (3, 2, -1), (-1, 2, -1), (7, 2, -1)] {
            let v = Interval::sin_pi_rational(&q(n, d), 128);
            assert!(v.is_exact());
            assert_eq!(v.mid().to_f64(), s as f64);
        }
    }

    #[test]
    fn pi_sixth() {
        let v = Interval::sin_pi_rational(&q(1, 6), 256);
        assert!(v.contains_rational(&q(1, 2)));
        assert!(v.rad_f64() < 1e-70);
    }

    #[test]
    fn division_by_ball_with_zero_fails() {
        let z = Interval::from_parts(Float::with_val(64, 0.0), &Float::with_val(64, 0.1));
        assert!(Interval::one(64).checked_div(&z).is_err());
    }

    #[test]
    fn sinc_small_and_large() {
        let tiny = Interval::from_rational(&q(1, 1000), 200);
        let direct = tiny.sin_pi().checked_div(&(&Interval::pi(200) * &tiny)).unwrap();
        assert!(tiny.sinc_pi().overlaps(&direct));
        assert!(Interval::zero(100).sinc_pi().contains_rational(&q(1, 1)));
        let half = Interval::from_rational(&q(1, 2), 128);
        let want = 2.0 / std::f64::consts::PI;
        assert!((half.sinc_pi().to_f64() - want).abs() < 1e-15);
    }

    #[test]
    fn sqrt_two() {
        let s = Interval::from_int(2, 128).sqrt().unwrap();
        assert!((s.to_f64() - 2f64.sqrt()).abs() < 1e-15);
        assert!(s.sqr().contains_rational(&q(2, 1)));
    }
}
