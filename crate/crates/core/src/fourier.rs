//! Fourier transforms of the simplex, the cross-polytope and its
//! hyperplane section `H_{n-1}`.
//!
//! Convention: `\hat f(y) = \int f(x) e^{-2 pi i <x, y>} dx`.
//!
//! The closed forms divide by products of coordinates and coordinate
//! differences. At points where such a factor vanishes the transform is
//! still analytic; it is evaluated there by expanding the closed form as a
//! Laurent series along `y + eps * v` for a fixed generic direction `v` and
//! reading off the constant coefficient.

use rug::Rational;

use crate::arith::{binomial, factorial, Interval, Scalar, Series};
use crate::error::{Error, Result};

/// Expansion orders tried when resolving removable singularities.
pub const EXPANSION_ORDERS: [usize; 4] = [4, 8, 16, 32];

/// The polytope `scale * H_{n-1}` with
/// `H_{n-1} = {x in R^{n-1} : |x_1| + ... + |x_{n-1}| + |x_1 + ... + x_{n-1}| <= 1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HPolytope {
    pub n: usize,
    pub scale: Rational,
}

impl HPolytope {
    pub fn new(n: usize, scale: Rational) -> Result<HPolytope> {
        if n < 2 {
            return Err(Error::Unsupported(format!("H_{{n-1}} needs n >= 2, got {}", n)));
        }
        if scale <= 0 {
            return Err(Error::Unsupported("scale must be positive".into()));
        }
        Ok(HPolytope { n, scale })
    }

    pub fn unit(n: usize) -> HPolytope {
        HPolytope::new(n, Rational::from(1)).expect("valid")
    }

    /// Dimension `n - 1` of the polytope.
    pub fn dim(&self) -> usize {
        self.n - 1
    }

    /// Exact volume of `scale * H_{n-1}`.
    pub fn volume(&self) -> Rational {
        let k = self.dim() as u32;
        let scale_pow = crate::arith::poly::rat_pow(&self.scale, k);
        Rational::from(h_volume(self.n) * scale_pow)
    }
}

/// Volume of `H_{n-1}`: `binom(2k, k) / (2^k k!)` with `k = n - 1`.
pub fn h_volume(n: usize) -> Rational {
    let k = (n - 1) as u32;
    let num = binomial(2 * k, k);
    let den = factorial(k) << k;
    Rational::from((num, den))
}

/// Volume `2^n / n!` of the cross-polytope `C_n`.
pub fn cross_polytope_volume(n: usize) -> Rational {
    let n = n as u32;
    Rational::from((rug::Integer::from(1) << n, factorial(n)))
}

/// Real and imaginary parts of a complex value.
#[derive(Clone, Debug)]
pub struct Complex {
    pub re: Scalar,
    pub im: Scalar,
}

/// Which coincidences make a point singular for the `H_{n-1}` closed form.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SingularPattern {
    /// Coordinates equal to zero.
    pub zeros: Vec<usize>,
    /// Pairs `(i, j)`, `i < j`, with `y_i = y_j`.
    pub equal: Vec<(usize, usize)>,
}

impl SingularPattern {
    pub fn is_regular(&self) -> bool {
        self.zeros.is_empty() && self.equal.is_empty()
    }

    /// Classify a point by exact comparison (rational entries) or by interval
    /// sign determination; `None` if an enclosure cannot decide.
    pub fn classify(y: &[Scalar]) -> Option<SingularPattern> {
        let mut p = SingularPattern::default();
        for (i, yi) in y.iter().enumerate() {
            match decide_zero(yi)? {
                true => p.zeros.push(i),
                false => {}
            }
        }
        for i in 0..y.len() {
            for j in i + 1..y.len() {
                if decide_zero(&(&y[i] - &y[j]))? {
                    p.equal.push((i, j));
                }
            }
        }
        Some(p)
    }

    /// Check that `y` really satisfies every recorded coincidence.
    fn holds_at(&self, y: &[Scalar]) -> bool {
        self.zeros.iter().all(|&i| y[i].is_exact_zero())
            && self.equal.iter().all(|&(i, j)| (&y[i] - &y[j]).is_exact_zero())
    }
}

fn decide_zero(v: &Scalar) -> Option<bool> {
    match v {
        Scalar::Exact(q) => Some(*q == 0),
        Scalar::Approx(iv) => {
            if iv.contains_zero() {
                None
            } else {
                Some(false)
            }
        }
    }
}

fn pow_series(s: &Series, e: i32) -> Result<Series> {
    let order = s.abs_order().max(1) as usize;
    let mut acc = Series::constant(Scalar::one(), order, s.prec());
    for _ in 0..e.unsigned_abs() {
        acc = acc.mul(s);
    }
    if e < 0 {
        acc = acc.recip()?;
    }
    Ok(acc)
}

fn pi_power(prec: u32, k: u32) -> Scalar {
    Scalar::Approx(Interval::pi(prec).pow(k))
}

/// Closed form of `\hat chi_{H_{n-1}}` over series arguments.
fn h_closed_form(n: usize, y: &[Series], prec: u32) -> Result<Series> {
    let k = n - 1;
    assert_eq!(y.len(), k);
    let odd = n % 2 == 1;
    let order = y.iter().map(|s| s.abs_order()).max().unwrap_or(1).max(1) as usize;
    let e = n as i32 - 3;
    let trig = |s: &Series| if odd { s.cos_pi() } else { s.sin_pi() };
    let mut sum = Series::constant(Scalar::zero(), order, prec);
    for j in 0..k {
        for l in j + 1..k {
            let d = y[j].sub(&y[l]);
            let num = pow_series(&d, e)?.mul(&trig(&d)?);
            let mut den = y[j].mul(&y[l]);
            for i in 0..k {
                if i != j && i != l {
                    den = den.mul(&y[j].sub(&y[i])).mul(&y[l].sub(&y[i]));
                }
            }
            let term = num.div(&den)?;
            sum = if odd { sum.sub(&term) } else { sum.add(&term) };
        }
    }
    for j in 0..k {
        let num = pow_series(&y[j], e)?.mul(&trig(&y[j])?);
        let mut den = Series::constant(Scalar::one(), order, prec);
        for i in 0..k {
            if i != j {
                den = den.mul(&y[j].sub(&y[i])).mul(&y[i]);
            }
        }
        sum = sum.add(&num.div(&den)?);
    }
    let sign = if odd { ((n - 1) / 2) % 2 } else { (n / 2 - 1) % 2 };
    let mut pref =
        Scalar::one().checked_div(&pi_power(prec, k as u32).mul_rational(&Rational::from(1u64 << (n - 2))))?;
    if sign == 1 {
        pref = -pref;
    }
    Ok(sum.scale(&pref))
}

/// Closed form of `\hat chi_{C_n}` over series arguments.
fn cross_closed_form(n: usize, y: &[Series], prec: u32) -> Result<Series> {
    assert_eq!(y.len(), n);
    let odd = n % 2 == 1;
    let order = y.iter().map(|s| s.abs_order()).max().unwrap_or(1).max(1) as usize;
    let sq: Vec<Series> = y.iter().map(|s| s.mul(s)).collect();
    let mut sum = Series::constant(Scalar::zero(), order, prec);
    for j in 0..n {
        let pw = pow_series(&y[j], n as i32 - 2)?;
        let num = if odd {
            let two_y = y[j].scale(&Scalar::int(2));
            pw.mul(&two_y.sin_pi()?)
        } else {
            let s = y[j].sin_pi()?;
            pw.mul(&s).mul(&s).scale(&Scalar::int(2))
        };
        let mut den = Series::constant(Scalar::one(), order, prec);
        for i in 0..n {
            if i != j {
                den = den.mul(&sq[j].sub(&sq[i]));
            }
        }
        sum = sum.add(&num.div(&den)?);
    }
    let sign = if odd { ((n - 1) / 2) % 2 } else { (n / 2 - 1) % 2 };
    let mut pref = Scalar::one().checked_div(&pi_power(prec, n as u32))?;
    if sign == 1 {
        pref = -pref;
    }
    Ok(sum.scale(&pref))
}

/// Closed form of `\hat chi_{S_n}` (real and imaginary parts) over series arguments.
fn simplex_closed_form(n: usize, y: &[Series], prec: u32) -> Result<(Series, Series)> {
    assert_eq!(y.len(), n);
    let order = y.iter().map(|s| s.abs_order()).max().unwrap_or(1).max(1) as usize;
    let mut re = Series::constant(Scalar::zero(), order, prec);
    let mut im = Series::constant(Scalar::zero(), order, prec);
    let one = Series::constant(Scalar::one(), order, prec);
    for j in 0..n {
        // 1 - e^{-2 pi i y} = (1 - cos 2 pi y) + i sin 2 pi y
        let t = y[j].scale(&Scalar::int(2));
        let a = one.sub(&t.cos_pi()?);
        let b = t.sin_pi()?;
        let mut den = y[j].clone();
        for i in 0..n {
            if i != j {
                den = den.mul(&y[j].sub(&y[i]));
            }
        }
        let inv = den.recip()?;
        re = re.add(&a.mul(&inv));
        im = im.add(&b.mul(&inv));
    }
    // prefactor (-1)^{n+1} (2 pi)^{-n} (-i)^n
    let mag = Scalar::one().checked_div(&pi_power(prec, n as u32).mul_rational(&Rational::from(1u64 << n)))?;
    let mag = if n % 2 == 0 { -mag } else { mag };
    let (r, i) = match n % 4 {
        0 => (re.scale(&mag), im.scale(&mag)),
        1 => (im.scale(&mag), re.scale(&-&mag)),
        2 => (re.scale(&-&mag), im.scale(&-&mag)),
        _ => (im.scale(&-&mag), re.scale(&mag)),
    };
    Ok((r, i))
}

fn constant_args(y: &[Scalar], prec: u32) -> Vec<Series> {
    y.iter().map(|v| Series::constant(v.clone(), 1, prec)).collect()
}

fn map_singular(e: Error) -> Error {
    match e {
        Error::Singular(_) | Error::DivisionByZero => {
            Error::Singular("closed form evaluated on its singular set; use the limit evaluation".into())
        }
        other => other,
    }
}

/// Direction used for directional limits: `v_i = i + 1` (nonzero, distinct,
/// with distinct squares).
fn direction(len: usize) -> Vec<Scalar> {
    (0..len).map(|i| Scalar::int(i as i64 + 1)).collect()
}

/// Constant term of `f(y + eps v)` with increasing expansion order.
fn directional_limit<F>(y: &[Scalar], prec: u32, f: F) -> Result<Scalar>
where
    F: Fn(&[Series]) -> Result<Series>,
{
    let v = direction(y.len());
    for &order in EXPANSION_ORDERS.iter() {
        let args: Vec<Series> = y
            .iter()
            .zip(&v)
            .map(|(yi, vi)| Series::linear(yi.clone(), vi.clone(), order, prec))
            .collect();
        match f(&args).and_then(|s| s.limit()) {
            Ok(v) => return Ok(v),
            Err(Error::ExpansionCap(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::ExpansionCap(*EXPANSION_ORDERS.last().unwrap()))
}

/// `\hat chi_{S_n}(y)` at a point with nonzero, pairwise distinct coordinates.
pub fn ft_simplex(n: usize, y: &[Scalar], prec: u32) -> Result<Complex> {
    check_len(y, n)?;
    let (re, im) = simplex_closed_form(n, &constant_args(y, prec), prec).map_err(map_singular)?;
    Ok(Complex { re: re.coeff(0).expect("constant"), im: im.coeff(0).expect("constant") })
}

/// `\hat chi_{S_n}` at any point, resolving removable singularities.
pub fn ft_simplex_limit(n: usize, y: &[Scalar], prec: u32) -> Result<Complex> {
    check_len(y, n)?;
    let re = directional_limit(y, prec, |a| simplex_closed_form(n, a, prec).map(|p| p.0))?;
    let im = directional_limit(y, prec, |a| simplex_closed_form(n, a, prec).map(|p| p.1))?;
    Ok(Complex { re, im })
}

/// `\hat chi_{C_n}(y)` at a point with nonzero coordinates of distinct squares.
pub fn ft_cross_polytope(n: usize, y: &[Scalar], prec: u32) -> Result<Scalar> {
    check_len(y, n)?;
    let s = cross_closed_form(n, &constant_args(y, prec), prec).map_err(map_singular)?;
    Ok(s.coeff(0).expect("constant"))
}

/// `\hat chi_{C_n}` at any point, resolving removable singularities.
pub fn ft_cross_polytope_limit(n: usize, y: &[Scalar], prec: u32) -> Result<Scalar> {
    check_len(y, n)?;
    directional_limit(y, prec, |a| cross_closed_form(n, a, prec))
}

/// `\hat chi_{C_n}` computed as the sum of simplex transforms over all sign
/// patterns; the imaginary part must vanish.
pub fn ft_cross_polytope_via_simplex(n: usize, y: &[Scalar], prec: u32) -> Result<Complex> {
    check_len(y, n)?;
    let mut re = Scalar::zero();
    let mut im = Scalar::zero();
    for mask in 0..(1u32 << n) {
        let z: Vec<Scalar> = y
            .iter()
            .enumerate()
            .map(|(i, v)| if mask >> i & 1 == 1 { -v } else { v.clone() })
            .collect();
        let c = ft_simplex(n, &z, prec)?;
        re = &re + &c.re;
        im = &im + &c.im;
    }
    Ok(Complex { re, im })
}

/// `\hat chi_{scale H_{n-1}}(y) = scale^{n-1} \hat chi_{H_{n-1}}(scale y)`.
///
/// Total: singular points are resolved by directional limits, and enclosures
/// that straddle the singular set are handled through the Lipschitz bound
/// `|\hat chi_K(y) - \hat chi_K(y')| <= pi * scale * vol(K) * ||y - y'||_1`.
pub fn ft_h(h: &HPolytope, y: &[Scalar], prec: u32) -> Result<Scalar> {
    check_len(y, h.dim())?;
    let z: Vec<Scalar> = y.iter().map(|v| v.mul_rational(&h.scale)).collect();
    let base = match SingularPattern::classify(&z) {
        Some(p) if p.is_regular() => h_regular(h.n, &z, prec)?,
        Some(p) => ft_h_unit_limit(h.n, &z, &p, prec)?,
        None => return ft_h_straddling(h, y, prec),
    };
    let k = h.dim() as u32;
    Ok(base.mul_rational(&crate::arith::poly::rat_pow(&h.scale, k)))
}

fn h_regular(n: usize, z: &[Scalar], prec: u32) -> Result<Scalar> {
    let s = h_closed_form(n, &constant_args(z, prec), prec).map_err(map_singular)?;
    Ok(s.coeff(0).expect("constant"))
}

fn ft_h_straddling(h: &HPolytope, y: &[Scalar], prec: u32) -> Result<Scalar> {
    let mid: Vec<Scalar> = y.iter().map(|v| Scalar::Exact(v.mid_rational())).collect();
    let centre = ft_h(h, &mid, prec)?;
    let mut dist = Rational::new();
    for v in y {
        if let Scalar::Approx(iv) = v {
            dist += iv.rad().to_rational().expect("finite radius");
        }
    }
    let lip = Rational::from(h.volume() * &h.scale * dist);
    let widen = Interval::pi(prec).mul_rational(&lip).abs_upper();
    Ok(Scalar::Approx(centre.to_interval(prec).widen(&widen)))
}

/// Limit of `\hat chi_{scale H_{n-1}}` at a point on the singular set.
pub fn ft_h_singular_limit(
    h: &HPolytope,
    y: &[Scalar],
    pattern: &SingularPattern,
    prec: u32,
) -> Result<Scalar> {
    check_len(y, h.dim())?;
    let z: Vec<Scalar> = y.iter().map(|v| v.mul_rational(&h.scale)).collect();
    let base = ft_h_unit_limit(h.n, &z, pattern, prec)?;
    let k = h.dim() as u32;
    Ok(base.mul_rational(&crate::arith::poly::rat_pow(&h.scale, k)))
}

fn ft_h_unit_limit(n: usize, z: &[Scalar], pattern: &SingularPattern, prec: u32) -> Result<Scalar> {
    if !pattern.holds_at(z) {
        return Err(Error::Singular("point does not lie on the stated singular pattern".into()));
    }
    directional_limit(z, prec, |a| h_closed_form(n, a, prec))
}

fn check_len(y: &[Scalar], want: usize) -> Result<()> {
    if y.len() != want {
        return Err(Error::Unsupported(format!("expected {} coordinates, got {}", want, y.len())));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Scalar {
        Scalar::ratio(n, d)
    }

    #[test]
    fn hexagon_area_at_origin() {
        let v = ft_h(&HPolytope::unit(3), &[q(0, 1), q(0, 1)], 256).unwrap();
        assert!(v.contains(&Rational::from((3, 4))));
        assert!(v.rad_f64() < 1e-60);
    }

    #[test]
    fn h3_volume_at_origin() {
        let v = ft_h(&HPolytope::unit(4), &[q(0, 1), q(0, 1), q(0, 1)], 256).unwrap();
        assert!(v.contains(&h_volume(4)));
        assert_eq!(h_volume(4), Rational::from((5, 12)));
    }

    #[test]
    fn n2_is_sinc() {
        let v = ft_h(&HPolytope::unit(2), &[q(1, 3)], 128).unwrap();
        let want = (std::f64::consts::PI / 3.0).sin() / (std::f64::consts::PI / 3.0);
        assert!((v.to_f64() - want).abs() < 1e-15);
    }

    #[test]
    fn cross_polytope_n1() {
        let v = ft_cross_polytope(1, &[q(1, 4)], 128).unwrap();
        assert!((v.to_f64() - 4.0 / std::f64::consts::PI).abs() < 1e-15);
    }

    #[test]
    fn cross_polytope_volumes() {
        for n in 1..=5 {
            let zero = vec![Scalar::zero(); n];
            let v = ft_cross_polytope_limit(n, &zero, 256).unwrap();
            assert!(v.contains(&cross_polytope_volume(n)), "n = {}", n);
        }
    }

    #[test]
    fn simplex_origin_is_volume() {
        let v = ft_simplex_limit(1, &[Scalar::zero()], 128).unwrap();
        assert!(v.re.contains(&Rational::from(1)));
        assert!(v.im.contains_zero());
        let v = ft_simplex_limit(3, &vec![Scalar::zero(); 3], 128).unwrap();
        assert!(v.re.contains(&Rational::from((1, 6))));
    }

    #[test]
    fn singular_input_is_rejected_by_closed_forms() {
        assert!(ft_cross_polytope(2, &[q(1, 3), q(-1, 3)], 64).is_err());
        assert!(ft_simplex(2, &[q(1, 3), q(1, 3)], 64).is_err());
    }

    #[test]
    fn scaled_transform() {
        let h = HPolytope::new(3, Rational::from((1, 2))).unwrap();
        let v = ft_h(&h, &[q(0, 1), q(0, 1)], 128).unwrap();
        assert!(v.contains(&Rational::from((3, 16))));
    }

    #[test]
    fn straddling_enclosure() {
        let tiny = Interval::from_parts(rug::Float::with_val(128, 0), &rug::Float::with_val(64, 1e-20));
        let y = [Scalar::Approx(tiny), q(1, 3)];
        let v = ft_h(&HPolytope::unit(3), &y, 128).unwrap();
        let exact = ft_h(&HPolytope::unit(3), &[q(0, 1), q(1, 3)], 128).unwrap();
        assert!(v.overlaps(&exact));
        assert!(v.rad_f64() < 1e-18);
    }
}
