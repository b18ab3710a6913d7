//! Independent floating-point oracles shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

/// Gauss-Legendre nodes and weights on [-1, 1] (Newton on P_n).
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// Integral of `f` over `[a, b]`.
pub fn gl_1d(rule: &[(f64, f64)], a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
    let (c, h) = ((a + b) / 2.0, (b - a) / 2.0);
    rule.iter().map(|&(x, w)| w * f(c + h * x)).sum::<f64>() * h
}

/// Integral over `H_{k}` = {|x_1|+..+|x_k|+|x_1+..+x_k| <= 1}: split into
/// sign orthants, where the region is {sum of positive parts <= 1/2,
/// sum of negative parts <= 1/2}, and integrate iteratively.
pub fn integrate_h(k: usize, nodes: usize, f: &dyn Fn(&[f64]) -> f64) -> f64 {
    let rule = gauss_legendre(nodes);
    let mut total = 0.0;
    for mask in 0..(1u32 << k) {
        let mut x = vec![0.0; k];
        total += nested(&rule, mask, 0, 0.5, 0.5, &mut x, f);
    }
    total
}

fn nested(
    rule: &[(f64, f64)],
    mask: u32,
    i: usize,
    pos: f64,
    neg: f64,
    x: &mut Vec<f64>,
    f: &dyn Fn(&[f64]) -> f64,
) -> f64 {
    if i == x.len() {
        return f(x);
    }
    let positive = mask >> i & 1 == 0;
    let (a, b) = if positive { (0.0, pos) } else { (-neg, 0.0) };
    if b - a <= 0.0 {
        return 0.0;
    }
    let (c, h) = ((a + b) / 2.0, (b - a) / 2.0);
    let mut acc = 0.0;
    for &(t, w) in rule {
        let xi = c + h * t;
        x[i] = xi;
        let (p, q) = if positive { (pos - xi, neg) } else { (pos, neg + xi) };
        acc += w * nested(rule, mask, i + 1, p, q, x, f);
    }
    acc * h
}

/// Real part of the transform of `H_k` by quadrature (the set is symmetric,
/// so the transform is real).
pub fn ft_h_quadrature(y: &[f64], nodes: usize) -> f64 {
    integrate_h(y.len(), nodes, &|x| {
        let dot: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
        (2.0 * PI * dot).cos()
    })
}

/// Integral over the standard simplex `{x >= 0, x_1 + .. + x_k <= 1}`.
pub fn integrate_simplex(k: usize, nodes: usize, f: &dyn Fn(&[f64]) -> f64) -> f64 {
    fn rec(rule: &[(f64, f64)], i: usize, left: f64, x: &mut Vec<f64>, f: &dyn Fn(&[f64]) -> f64) -> f64 {
        if i == x.len() {
            return f(x);
        }
        let h = left / 2.0;
        let mut acc = 0.0;
        for &(t, w) in rule {
            x[i] = h * (1.0 + t);
            acc += w * rec(rule, i + 1, left - x[i], x, f);
        }
        acc * h
    }
    rec(&gauss_legendre(nodes), 0, 1.0, &mut vec![0.0; k], f)
}

/// Transform of the standard simplex by quadrature, as `(re, im)`.
pub fn ft_simplex_quadrature(y: &[f64], nodes: usize) -> (f64, f64) {
    let phase = |x: &[f64]| -2.0 * PI * x.iter().zip(y).map(|(a, b)| a * b).sum::<f64>();
    let re = integrate_simplex(y.len(), nodes, &|x| phase(x).cos());
    let im = integrate_simplex(y.len(), nodes, &|x| phase(x).sin());
    (re, im)
}

/// Transform of the cross-polytope `{‖x‖_1 <= 1}`, summed over orthants.
pub fn ft_cross_quadrature(y: &[f64], nodes: usize) -> f64 {
    let mut total = 0.0;
    for mask in 0..(1u32 << y.len()) {
        let z: Vec<f64> = y
            .iter()
            .enumerate()
            .map(|(i, &v)| if mask >> i & 1 == 1 { -v } else { v })
            .collect();
        total += ft_simplex_quadrature(&z, nodes).0;
    }
    total
}

/// Seeded random rational points with denominators up to 12 in `[-3, 3]`.
pub fn random_points(seed: u64, dim: usize, count: usize, ok: impl Fn(&[(i64, i64)]) -> bool) -> Vec<Vec<(i64, i64)>> {
    use rand::{rngs::StdRng, Rng, SeedableRng};
    let mut rng = StdRng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let p: Vec<(i64, i64)> = (0..dim)
            .map(|_| {
                let d = rng.gen_range(1..=12);
                (rng.gen_range(-3 * d..=3 * d), d)
            })
            .collect();
        if ok(&p) {
            out.push(p);
        }
    }
    out
}

/// Nonzero, pairwise distinct coordinates (or distinct squares).
pub fn generic(p: &[(i64, i64)], squares: bool) -> bool {
    let v: Vec<f64> = p.iter().map(|&(n, d)| n as f64 / d as f64).collect();
    let key = |x: f64| if squares { x * x } else { x };
    v.iter().all(|&x| x.abs() > 1e-3)
        && v.iter().enumerate().all(|(i, &a)| v[i + 1..].iter().all(|&b| (key(a) - key(b)).abs() > 1e-3))
}
