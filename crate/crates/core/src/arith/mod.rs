//! Exact rationals, enclosures, polynomials and series.

pub mod interval;
pub mod linalg;
pub mod poly;
pub mod scalar;
pub mod series;

pub use interval::Interval;
pub use poly::{Affine, Limit, Monomial, MultiPoly};
pub use rug::{Float, Integer, Rational};
pub use scalar::Scalar;
pub use series::Series;

/// Decimal rendering of a rational, truncated toward zero to `digits` places.
pub fn rational_to_decimal(q: &Rational, digits: usize) -> String {
    let scale = Integer::from(Integer::u_pow_u(10, digits as u32));
    let mag = Integer::from(Rational::from(Rational::from(q.abs_ref()) * &scale).floor_ref());
    format_scaled(*q < 0, mag, digits)
}

/// Decimal rendering rounded toward `+inf`, as used for printed upper bounds.
pub fn rational_to_decimal_ceil(q: &Rational, digits: usize) -> String {
    let scale = Integer::from(Integer::u_pow_u(10, digits as u32));
    let scaled = Integer::from(Rational::from(q * &scale).ceil_ref());
    let neg = scaled < 0;
    format_scaled(neg, scaled.abs(), digits)
}

/// Decimal rendering rounded toward `-inf`, for printed lower bounds.
pub fn rational_to_decimal_floor(q: &Rational, digits: usize) -> String {
    let scale = Integer::from(Integer::u_pow_u(10, digits as u32));
    let scaled = Integer::from(Rational::from(q * &scale).floor_ref());
    let neg = scaled < 0;
    format_scaled(neg, scaled.abs(), digits)
}

fn format_scaled(neg: bool, mag: Integer, digits: usize) -> String {
    let mut s = mag.to_string();
    if s.len() <= digits {
        s = format!("{}{}", "0".repeat(digits + 1 - s.len()), s);
    }
    let (ip, fp) = s.split_at(s.len() - digits);
    let sign = if neg { "-" } else { "" };
    if digits == 0 {
        format!("{}{}", sign, ip)
    } else {
        format!("{}{}.{}", sign, ip, fp)
    }
}

/// `n!` as an exact integer.
pub fn factorial(n: u32) -> Integer {
    Integer::from(Integer::factorial(n))
}

/// Binomial coefficient as an exact integer.
pub fn binomial(n: u32, k: u32) -> Integer {
    Integer::from(Integer::binomial_u(n, k))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_rendering() {
        assert_eq!(rational_to_decimal(&Rational::from((13, 90)), 9), "0.144444444");
        assert_eq!(rational_to_decimal(&Rational::from((-1, 8)), 2), "-0.12");
        assert_eq!(rational_to_decimal(&Rational::from(3), 0), "3");
        assert_eq!(rational_to_decimal_ceil(&Rational::from((13, 90)), 9), "0.144444445");
        assert_eq!(rational_to_decimal_ceil(&Rational::from((-1, 8)), 2), "-0.12");
        assert_eq!(rational_to_decimal_ceil(&Rational::from((1, 4)), 2), "0.25");
        assert_eq!(rational_to_decimal_floor(&Rational::from((-1, 8)), 2), "-0.13");
        assert_eq!(rational_to_decimal_floor(&Rational::from((13, 90)), 9), "0.144444444");
    }
}
