//! Gram entries for the shift parametrization by Poisson summation.
//!
//! With `g_{mμ}(x) = m^{-(n-1)} \hat chi_H(x/m - μ)` and `x = m z`, the
//! integrand `g_i(mz) g_j(mz) W_n(mz, 0)` has Fourier support in
//! `[-(m+1), m+1]^{n-1}`, so
//!
//! `ν_n(g_i g_j) = (m/(m+1))^{n-1} Σ_{k ∈ Z^{n-1}/(m+1)} G_i(k+s) G_j(k+s) W_n(m(k+s), 0)`
//!
//! for any shift `s`, where `G_i = m^{-(n-1)} Σ_{μ ∈ orbit} \hat chi_H(· - μ)`.
//! Every sample point has coordinates `N/D` for a fixed denominator `D`, so
//! all trigonometric values come from one table of `cos(π r/D)`, `sin(π r/D)`
//! and the closed form of `\hat chi_H` reduces to integer arithmetic plus
//! table lookups. The sum runs over the box `|j|_∞ <= C` and the remainder is
//! estimated by Richardson extrapolation in `1/R` over nested boxes.

use rayon::prelude::*;
use rug::{Integer, Rational};
use serde::{Deserialize, Serialize};

use super::ball::Ball;
use crate::arith::{Interval, Scalar};
use crate::error::{Error, Result};
use crate::fourier::{ft_h, HPolytope};
use crate::symmetry::{perm_sign, BasisFunction, InvariantBasis};

/// Safety factor applied to the extrapolation disagreement.
pub const TAIL_SAFETY: f64 = 10.0;

/// Default bound on the tail radius relative to `sqrt(A_ii A_jj)`.
pub const DEFAULT_TAIL_TOLERANCE: f64 = 1e-2;

/// Number of nested boxes whose partial sums feed the extrapolation.
pub const CHECKPOINTS: i64 = 6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruncationParams {
    /// Box half-width in lattice steps: `|j|_∞ <= c`, `k = j/(m+1)`.
    pub c: u32,
    /// Shift `s`, one rational per coordinate.
    #[serde(with = "rational_vec")]
    pub shift: Vec<Rational>,
    /// Largest accepted tail radius relative to `sqrt(A_ii A_jj)`.
    pub tail_tolerance: f64,
}

mod rational_vec {
    use rug::Rational;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(|q| q.to_string()).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        raw.iter()
            .map(|s| s.parse::<Rational>().map_err(serde::de::Error::custom))
            .collect()
    }
}

impl TruncationParams {
    /// Validate that no sample point hits the singular set of `\hat chi_H`
    /// or a coincidence in `W_n`: `s_i ∉ Z/(m+1)` and `s_a - s_b ∉ Z/(m+1)`.
    /// Sample coordinates are `k_i + s_i - μ_i` with `k ∈ Z/(m+1)`, `μ ∈ Z`.
    pub fn new(n: usize, m: u32, c: u32, shift: Vec<Rational>, tail_tolerance: f64) -> Result<Self> {
        if shift.len() != n - 1 {
            return Err(Error::InvalidShift(format!("expected {} shift coordinates", n - 1)));
        }
        if c < 8 {
            return Err(Error::InvalidShift("truncation scale C must be at least 8".into()));
        }
        let step = Rational::from(m + 1);
        let on_lattice = |q: &Rational| Rational::from(q * &step).denom() == &1;
        for (i, s) in shift.iter().enumerate() {
            if on_lattice(s) {
                return Err(Error::InvalidShift(format!("s_{} = {} lies on Z/(m+1)", i + 1, s)));
            }
            for (j, t) in shift.iter().enumerate().skip(i + 1) {
                if on_lattice(&Rational::from(s - t)) {
                    return Err(Error::InvalidShift(format!(
                        "s_{} - s_{} = {} lies on Z/(m+1)",
                        i + 1,
                        j + 1,
                        Rational::from(s - t)
                    )));
                }
            }
        }
        Ok(TruncationParams { c, shift, tail_tolerance })
    }

    /// `s = (1, 2, ..., n-1) / (m(m+1)n)`.
    pub fn standard(n: usize, m: u32, c: u32) -> Result<Self> {
        let den = (m * (m + 1)) as i64 * n as i64;
        let shift = (1..n as i64).map(|i| Rational::from((i, den))).collect();
        TruncationParams::new(n, m, c, shift, DEFAULT_TAIL_TOLERANCE)
    }

    /// Checkpoint radii near `kC/6` for `k = 1..6`, rounded to multiples of
    /// the summand period `2(m+1)` so every partial sum ends on the same
    /// residue class, without repeats. The last one is rounded up, so the box
    /// covers `|j|_∞ <= C`.
    pub fn checkpoints(&self, m: u32) -> Vec<i64> {
        let l = 2 * (m as i64 + 1);
        let c = self.c as i64;
        let near = |v: i64| (((v + l / 2) / l) * l).max(l);
        let mut out: Vec<i64> = (1..CHECKPOINTS).map(|k| near(k * c / CHECKPOINTS)).collect();
        out.push(((c + l - 1) / l) * l);
        out.dedup();
        out
    }
}

/// `b_i = g_i(0) = m^{-(n-1)} Σ_{μ ∈ orbit} \hat chi_H(-μ)`, each term through
/// the singularity-resolving evaluator.
pub fn b_shift(n: usize, m: u32, basis: &InvariantBasis, prec: u32) -> Result<Vec<Scalar>> {
    let h = HPolytope::unit(n);
    let scale = Rational::from((1, Integer::from(Integer::u_pow_u(m, (n - 1) as u32))));
    let mut out = Vec::with_capacity(basis.len());
    for f in &basis.functions {
        let BasisFunction::Orbit { points, .. } = f else {
            return Err(Error::Unsupported("b_shift needs a shift basis".into()));
        };
        let mut acc = Scalar::zero();
        for mu in points {
            let y: Vec<Scalar> = mu.iter().map(|&v| Scalar::int(-v)).collect();
            acc = &acc + &ft_h(&h, &y, prec)?;
        }
        out.push(acc.mul_rational(&scale));
    }
    Ok(out)
}

/// `cos(π r / D)` and `sin(π r / D)` for `r mod 2D`.
struct TrigTable {
    d: i64,
    cos: Vec<Ball>,
    sin: Vec<Ball>,
}

impl TrigTable {
    fn new(d: i64, prec: u32) -> TrigTable {
        let mut cos = Vec::with_capacity(2 * d as usize);
        let mut sin = Vec::with_capacity(2 * d as usize);
        for r in 0..2 * d {
            let q = Rational::from((r, d));
            cos.push(Ball::from_interval(&Interval::cos_pi_rational(&q, prec)));
            sin.push(Ball::from_interval(&Interval::sin_pi_rational(&q, prec)));
        }
        TrigTable { d, cos, sin }
    }

    #[inline]
    fn idx(&self, r: i64) -> usize {
        r.rem_euclid(2 * self.d) as usize
    }

    #[inline]
    fn cos(&self, r: i64) -> Ball {
        self.cos[self.idx(r)]
    }

    #[inline]
    fn sin(&self, r: i64) -> Ball {
        self.sin[self.idx(r)]
    }
}

/// `trig * num / den` for exact integers, with rounding of large integers
/// accounted for.
#[inline]
fn ratio_term(trig: Ball, num: i128, den: i128) -> Ball {
    const EXACT: u128 = 1 << 53;
    if num.unsigned_abs() < EXACT && den.unsigned_abs() < EXACT {
        trig.scale(num as f64).div_exact(den as f64)
    } else {
        let v = trig.scale(num as f64).div_exact(den as f64);
        v.widen(v.mid.abs() * 4.0 * f64::EPSILON)
    }
}

/// Precomputed data for sampling the orbit sums and `W_n` on the shifted lattice.
struct Sampler {
    n: usize,
    m: i64,
    table: TrigTable,
    /// `D / (m+1)` and `D s_i`.
    step: i64,
    offset: Vec<i64>,
    /// `1/π`
    inv_pi: Ball,
    perms: Vec<(Vec<usize>, i64)>,
}

impl Sampler {
    fn new(n: usize, m: u32, t: &TruncationParams, prec: u32) -> Sampler {
        let mut d = Integer::from(m + 1);
        for s in &t.shift {
            d.lcm_mut(s.denom());
        }
        let d = d.to_i64().expect("small denominator");
        let offset = t
            .shift
            .iter()
            .map(|s| Rational::from(s * d).numer().to_i64().expect("integral"))
            .collect();
        let inv_pi = Ball::from_interval(&Interval::one(prec).checked_div(&Interval::pi(prec)).expect("pi"));
        Sampler {
            n,
            m: m as i64,
            table: TrigTable::new(d, prec),
            step: d / (m as i64 + 1),
            offset,
            inv_pi,
            perms: permutations(n),
        }
    }

    /// Closed form of `\hat chi_H(N/D)` without the constant
    /// `sign D^{n-1} / (2^{n-2} π^{n-1})`.
    #[inline]
    fn h_core(&self, nv: &[i64]) -> Ball {
        let k = nv.len();
        let e = self.n as i32 - 3;
        let odd = self.n % 2 == 1;
        let trig = |r: i64| if odd { self.table.cos(r) } else { self.table.sin(r) };
        let mut acc = Ball::ZERO;
        for j in 0..k {
            for l in j + 1..k {
                let d = (nv[j] - nv[l]) as i128;
                let mut den = nv[j] as i128 * nv[l] as i128;
                for i in 0..k {
                    if i != j && i != l {
                        den *= (nv[j] - nv[i]) as i128 * (nv[l] - nv[i]) as i128;
                    }
                }
                let (num, den) = if e >= 0 { (d.pow(e as u32), den) } else { (1, den * d.pow((-e) as u32)) };
                let t = ratio_term(trig(nv[j] - nv[l]), num, den);
                acc = if odd { acc.sub(t) } else { acc.add(t) };
            }
        }
        for j in 0..k {
            let y = nv[j] as i128;
            let mut den: i128 = 1;
            for i in 0..k {
                if i != j {
                    den *= (nv[j] - nv[i]) as i128 * nv[i] as i128;
                }
            }
            let (num, den) = if e >= 0 { (y.pow(e as u32), den) } else { (1, den * y.pow((-e) as u32)) };
            acc = acc.add(ratio_term(trig(nv[j]), num, den));
        }
        acc
    }

    /// `sinc(m q / D)` for an integer `q`.
    #[inline]
    fn sinc(&self, q: i64) -> Ball {
        if q == 0 {
            return Ball::int(1);
        }
        let d = self.table.d;
        self.table
            .sin(self.m * q)
            .scale(d as f64)
            .div_exact((self.m * q) as f64)
            .mul(self.inv_pi)
    }

    /// `W_n(m(k+s), 0)` for the sample with numerators `p = D(k+s)`.
    fn w(&self, p: &[i64]) -> Ball {
        let n = self.n;
        let pos = |i: usize| if i < n - 1 { p[i] } else { 0 };
        let mut s = vec![vec![Ball::int(1); n]; n];
        for a in 0..n {
            for b in a + 1..n {
                let v = self.sinc(pos(a) - pos(b));
                s[a][b] = v;
                s[b][a] = v;
            }
        }
        let mut det = Ball::ZERO;
        for (perm, sign) in &self.perms {
            let mut t = Ball::int(*sign);
            for (i, &j) in perm.iter().enumerate() {
                if i != j {
                    t = t.mul(s[i][j]);
                }
            }
            det = det.add(t);
        }
        det
    }

    /// `sign D^{n-1} / (2^{n-2} π^{n-1}) · m^{-(n-1)}`, squared, times `(m/(m+1))^{n-1}`.
    fn gram_constant(&self, prec: u32) -> Ball {
        let n = self.n;
        let k = (n - 1) as u32;
        let d = Rational::from(self.table.d);
        let m = Rational::from(self.m);
        let rat = crate::arith::poly::rat_pow(&Rational::from(&d / &m), k)
            / Rational::from(1u64 << (n - 2));
        let c = Interval::pi(prec).pow(k).recip().expect("pi").mul_rational(&rat);
        let ratio = crate::arith::poly::rat_pow(&Rational::from((self.m, self.m + 1)), k);
        Ball::from_interval(&c.sqr().mul_rational(&ratio))
    }
}

fn permutations(n: usize) -> Vec<(Vec<usize>, i64)> {
    fn rec(cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                rec(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out.into_iter().map(|p| {
        let s = perm_sign(&p);
        (p, s)
    }).collect()
}

/// Partial sums of one Gram entry at the checkpoint radii and the resulting estimate.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EntryDiagnostics {
    pub i: usize,
    pub j: usize,
    pub radii: Vec<i64>,
    pub partial: Vec<f64>,
    pub estimate: f64,
    pub tail_radius: f64,
}

/// Shift-path Gram matrix (upper triangle mirrored) with diagnostics.
#[derive(Clone, Debug)]
pub struct ShiftGram {
    pub a: Vec<Vec<Scalar>>,
    pub diagnostics: Vec<EntryDiagnostics>,
}

/// Limit at `R = ∞` of the partial sums `s_i = S(r_i)`.
///
/// Box sums over the lattice behave like
/// `S(R) = E + a/R + b log(R)/R^2 + c/R^2 + d log(R)/R^3 + e/R^3 + ...`;
/// the expansion is truncated to as many terms as there are points and
/// solved exactly. Radii are rescaled by the largest one, which leaves `E`
/// unchanged and keeps the system well conditioned.
pub fn extrapolate(r: &[f64], s: &[f64]) -> f64 {
    let n = r.len();
    let top = r[n - 1];
    let basis = |k: usize, x: f64| match k {
        0 => 1.0,
        1 => 1.0 / x,
        2 => x.ln() / (x * x),
        3 => 1.0 / (x * x),
        4 => x.ln() / (x * x * x),
        5 => 1.0 / (x * x * x),
        k => x.powi(-(k as i32 - 2)),
    };
    let mut a: Vec<Vec<f64>> = r
        .iter()
        .zip(s)
        .map(|(&ri, &si)| {
            let mut row: Vec<f64> = (0..n).map(|k| basis(k, ri / top)).collect();
            row.push(si);
            row
        })
        .collect();
    // Gaussian elimination with partial pivoting, then back substitution
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))
            .unwrap();
        a.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..=n {
                a[row][k] -= f * a[col][k];
            }
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let t: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (a[row][n] - t) / a[row][row];
    }
    x[0]
}

/// Sum all Gram entries of an orbit basis over the truncated shifted lattice.
pub fn shift_gram(
    n: usize,
    m: u32,
    basis: &InvariantBasis,
    t: &TruncationParams,
    prec: u32,
) -> Result<ShiftGram> {
    let orbits = basis.orbits();
    if orbits.len() != basis.len() {
        return Err(Error::Unsupported("shift_gram needs a shift basis".into()));
    }
    if t.shift.len() != n - 1 {
        return Err(Error::InvalidShift("shift dimension does not match n".into()));
    }
    let sampler = Sampler::new(n, m, t, prec);
    let k = n - 1;
    let nf = orbits.len();
    let mut points: Vec<Vec<i64>> = Vec::new();
    let mut ranges = Vec::with_capacity(nf);
    for o in &orbits {
        let start = points.len();
        points.extend(o.iter().cloned());
        ranges.push(start..points.len());
    }
    let dmu: Vec<Vec<i64>> = points.iter().map(|mu| mu.iter().map(|v| v * sampler.table.d).collect()).collect();
    let pairs: Vec<(usize, usize)> = (0..nf).flat_map(|i| (i..nf).map(move |j| (i, j))).collect();
    let radii = t.checkpoints(m);
    let nb = radii.len();
    let c = radii[nb - 1];
    let np = pairs.len();

    let rows: Vec<Vec<Ball>> = (-c..=c)
        .into_par_iter()
        .map(|j0| {
            let mut acc = vec![Ball::ZERO; nb * np];
            let mut j = vec![-c; k];
            j[0] = j0;
            let mut p = vec![0i64; k];
            let mut nv = vec![0i64; k];
            let mut h = vec![Ball::ZERO; points.len()];
            let mut g = vec![Ball::ZERO; nf];
            loop {
                for i in 0..k {
                    p[i] = sampler.step * j[i] + sampler.offset[i];
                }
                for (hi, mu) in h.iter_mut().zip(&dmu) {
                    for i in 0..k {
                        nv[i] = p[i] - mu[i];
                    }
                    *hi = sampler.h_core(&nv);
                }
                for (gi, r) in g.iter_mut().zip(&ranges) {
                    *gi = h[r.clone()].iter().fold(Ball::ZERO, |a, b| a.add(*b));
                }
                let w = sampler.w(&p);
                let r = j.iter().map(|v| v.abs()).max().unwrap();
                if let Some(band) = radii.iter().position(|&rb| r <= rb) {
                    let slot = &mut acc[band * np..(band + 1) * np];
                    for (s, &(a, b)) in slot.iter_mut().zip(&pairs) {
                        *s = s.add(g[a].mul(g[b]).mul(w));
                    }
                }
                // odometer over coordinates 1..k
                let mut i = 1;
                while i < k {
                    if j[i] < c {
                        j[i] += 1;
                        break;
                    }
                    j[i] = -c;
                    i += 1;
                }
                if i >= k {
                    break;
                }
            }
            acc
        })
        .collect();

    let mut bands = vec![Ball::ZERO; nb * np];
    for row in &rows {
        for (b, v) in bands.iter_mut().zip(row) {
            *b = b.add(*v);
        }
    }
    let kc = sampler.gram_constant(prec);
    let mut a = vec![vec![Scalar::zero(); nf]; nf];
    let mut diagnostics = Vec::with_capacity(np);
    let rf: Vec<f64> = radii.iter().map(|&v| v as f64).collect();
    let mut est = vec![vec![0.0; nf]; nf];
    for (pi, &(i, j)) in pairs.iter().enumerate() {
        let mut cum = Ball::ZERO;
        let mut partial = Vec::with_capacity(nb);
        for b in 0..nb {
            cum = cum.add(bands[b * np + pi]);
            partial.push(cum.mul(kc));
        }
        let mids: Vec<f64> = partial.iter().map(|b| b.mid).collect();
        let last = mids[nb - 1];
        let e = extrapolate(&rf, &mids);
        // with a single box there is nothing to compare; report 100% uncertainty
        let e_prev = if nb > 1 { extrapolate(&rf[1..], &mids[1..]) } else { 0.0 };
        let tail = TAIL_SAFETY * (e - e_prev).abs() + (e - last).abs() * f64::EPSILON;
        let value = Ball { mid: e, rad: partial[nb - 1].rad }.widen(tail);
        est[i][j] = e;
        est[j][i] = e;
        let s = Scalar::Approx(value.to_interval(prec));
        a[i][j] = s.clone();
        a[j][i] = s;
        diagnostics.push(EntryDiagnostics { i, j, radii: radii.clone(), partial: mids, estimate: e, tail_radius: tail });
    }
    for d in &diagnostics {
        let scale = (est[d.i][d.i].abs() * est[d.j][d.j].abs()).sqrt();
        if d.tail_radius > t.tail_tolerance * scale {
            return Err(Error::TailTolerance {
                i: d.i,
                j: d.j,
                achieved: d.tail_radius / scale,
                tolerance: t.tail_tolerance,
            });
        }
    }
    Ok(ShiftGram { a, diagnostics })
}
