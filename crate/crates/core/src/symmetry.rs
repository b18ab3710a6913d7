//! The finite symmetry group acting on frequency space, and bases of
//! invariant functions.
//!
//! `H_{n-1}` is identified with `C_n ∩ {x_1 + ... + x_n = 0}` through the
//! chart that drops the last coordinate. Permuting the `n` ambient
//! coordinates and negating give its symmetry group `Sym(H)`, acting on the
//! spatial side by integer matrices `M`. The frequency-side group is
//! `Γ = {M^T}`; for `γ ∈ Γ` we have `\hat chi_H(γ y) = \hat chi_H(y)`.
//!
//! Elements carry a label `(π, s)` with `π ∈ S_n`, `s = ±1`, and the label
//! map is a homomorphism, so representations can be written on labels.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use rug::Rational;

use crate::arith::linalg::{int_matvec, int_transpose, rref};
use crate::arith::{Monomial, MultiPoly};
use crate::error::{Error, Result};

const GROUP_CAP: usize = 10_000;

pub type IntMatrix = Vec<Vec<i64>>;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupElement {
    /// Action on frequency space.
    pub matrix: IntMatrix,
    /// Permutation of the ambient coordinates (`perm[i]` is the image of `i`).
    pub perm: Vec<usize>,
    pub sign: i64,
}

impl GroupElement {
    /// Matrix of the corresponding spatial symmetry of `H_{n-1}` (the transpose).
    pub fn spatial(&self) -> IntMatrix {
        int_transpose(&self.matrix)
    }

    pub fn apply(&self, v: &[i64]) -> Vec<i64> {
        int_matvec(&self.matrix, v)
    }

    pub fn is_identity(&self) -> bool {
        self.sign == 1 && self.perm.iter().enumerate().all(|(i, &p)| i == p)
    }
}

#[derive(Clone, Debug)]
pub struct Group {
    pub n: usize,
    pub elements: Vec<GroupElement>,
    /// Indices into `elements`.
    pub generators: Vec<usize>,
    inverse: Vec<usize>,
}

impl Group {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    /// Dimension `n - 1` of the space acted on.
    pub fn dim(&self) -> usize {
        self.n - 1
    }

    pub fn inverse_index(&self, i: usize) -> usize {
        self.inverse[i]
    }

    pub fn index_of_label(&self, perm: &[usize], sign: i64) -> Option<usize> {
        self.elements.iter().position(|g| g.perm == perm && g.sign == sign)
    }

    /// Orbit of a lattice point, sorted.
    pub fn orbit(&self, v: &[i64]) -> Vec<Vec<i64>> {
        let set: BTreeSet<Vec<i64>> = self.elements.iter().map(|g| g.apply(v)).collect();
        set.into_iter().collect()
    }
}

/// Chart matrix of the ambient permutation `π` acting by `X'_{π(i)} = X_i`
/// on the hyperplane `{ΣX = 0}`, in the coordinates `x = (X_1..X_{n-1})`.
fn chart_matrix(perm: &[usize]) -> IntMatrix {
    let n = perm.len();
    let k = n - 1;
    let mut inv = vec![0; n];
    for (i, &p) in perm.iter().enumerate() {
        inv[p] = i;
    }
    (0..k)
        .map(|i| {
            let src = inv[i];
            if src < k {
                (0..k).map(|j| i64::from(j == src)).collect()
            } else {
                vec![-1; k]
            }
        })
        .collect()
}

fn invert_perm(p: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; p.len()];
    for (i, &v) in p.iter().enumerate() {
        inv[v] = i;
    }
    inv
}

fn compose(a: &[usize], b: &[usize]) -> Vec<usize> {
    b.iter().map(|&i| a[i]).collect()
}

fn element(perm: Vec<usize>, sign: i64) -> GroupElement {
    let m = chart_matrix(&invert_perm(&perm));
    let matrix = int_transpose(&m)
        .into_iter()
        .map(|row| row.into_iter().map(|v| v * sign).collect())
        .collect();
    GroupElement { matrix, perm, sign }
}

/// Doubled vertices of `H_{n-1}`: `±e_i` and `e_i - e_j`.
pub fn doubled_vertices(k: usize) -> BTreeSet<Vec<i64>> {
    let mut out = BTreeSet::new();
    for i in 0..k {
        for s in [-1, 1] {
            let mut v = vec![0; k];
            v[i] = s;
            out.insert(v);
        }
        for j in 0..k {
            if i != j {
                let mut v = vec![0; k];
                v[i] = 1;
                v[j] = -1;
                out.insert(v);
            }
        }
    }
    out
}

/// Build `Γ_n` by closure from transpositions and negation, then verify
/// that every spatial matrix permutes the vertex set of `H_{n-1}`.
pub fn build_gamma(n: usize) -> Result<Group> {
    if !(2..=4).contains(&n) {
        return Err(Error::Unsupported(format!("symmetry group supported for 2 <= n <= 4, got {}", n)));
    }
    let id: Vec<usize> = (0..n).collect();
    let mut gens = vec![element(id.clone(), -1)];
    for i in 0..n - 1 {
        let mut p = id.clone();
        p.swap(i, i + 1);
        gens.push(element(p, 1));
    }
    let mut elements = vec![element(id, 1)];
    let mut seen: HashMap<IntMatrix, usize> = HashMap::new();
    seen.insert(elements[0].matrix.clone(), 0);
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for g in &gens {
            let h = element(compose(&elements[i].perm, &g.perm), elements[i].sign * g.sign);
            debug_assert_eq!(h.matrix, crate::arith::linalg::int_matmul(&elements[i].matrix, &g.matrix));
            if !seen.contains_key(&h.matrix) {
                if elements.len() >= GROUP_CAP {
                    return Err(Error::GroupCap(GROUP_CAP));
                }
                seen.insert(h.matrix.clone(), elements.len());
                queue.push_back(elements.len());
                elements.push(h);
            }
        }
    }
    let verts = doubled_vertices(n - 1);
    for g in &elements {
        let sp = g.spatial();
        let image: BTreeSet<Vec<i64>> = verts.iter().map(|v| int_matvec(&sp, v)).collect();
        if image != verts {
            return Err(Error::Unsupported(format!("element {:?} does not preserve H", g.matrix)));
        }
    }
    let generators = gens.iter().map(|g| seen[&g.matrix]).collect();
    let inverse = elements
        .iter()
        .map(|g| {
            let inv = element(invert_perm(&g.perm), g.sign);
            seen[&inv.matrix]
        })
        .collect();
    Ok(Group { n, elements, generators, inverse })
}

/// A matrix representation on the group labels.
#[derive(Clone, Debug)]
pub struct Representation {
    pub name: String,
    pub dim: usize,
    /// `matrices[g]` for each group element index.
    pub matrices: Vec<Vec<Vec<Rational>>>,
}

impl Representation {
    pub fn trivial(g: &Group) -> Representation {
        Representation::scalar("trivial", g, |_| 1)
    }

    pub fn is_trivial(&self) -> bool {
        self.dim == 1 && self.matrices.iter().all(|m| m[0][0] == 1)
    }

    fn scalar(name: &str, g: &Group, f: impl Fn(&GroupElement) -> i64) -> Representation {
        Representation {
            name: name.into(),
            dim: 1,
            matrices: g.elements.iter().map(|e| vec![vec![Rational::from(f(e))]]).collect(),
        }
    }

    /// All irreducible representations of `Γ_3 ≅ S_3 × {±1}`, written with
    /// integer matrices: four characters and two copies of the standard
    /// representation (the permutation action on the sum-zero plane).
    pub fn irreducibles_n3(g: &Group) -> Result<Vec<Representation>> {
        if g.n != 3 {
            return Err(Error::Unsupported("explicit irreducibles are provided for n = 3".into()));
        }
        let mut out = Vec::new();
        for (a, b) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
            let name = format!("char(sgn^{}, neg^{})", a, b);
            out.push(Representation::scalar(&name, g, |e| {
                perm_sign(&e.perm).pow(a) * e.sign.pow(b)
            }));
        }
        for b in 0..2u32 {
            let matrices = g
                .elements
                .iter()
                .map(|e| {
                    let s = e.sign.pow(b);
                    chart_matrix(&e.perm)
                        .into_iter()
                        .map(|row| row.into_iter().map(|v| Rational::from(v * s)).collect())
                        .collect()
                })
                .collect();
            out.push(Representation { name: format!("standard(neg^{})", b), dim: 2, matrices });
        }
        Ok(out)
    }
}

pub fn perm_sign(p: &[usize]) -> i64 {
    let mut sign = 1;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                sign = -sign;
            }
        }
    }
    sign
}

/// Finite combination `Σ c_λ g_λ` of shifted functions, keyed by the integer
/// lattice point `λ` (the actual shift is `mλ`).
pub type ShiftCombination = BTreeMap<Vec<i64>, Rational>;

/// `P = (d/|Γ|) Σ_γ π(γ^{-1})_{j,j'} L(γ)`, with `L(γ)g_λ = g_{γλ}` on
/// shifts and `(L(γ)p)(x) = p(γ^T x)` on polynomials of the spatial variable.
#[derive(Clone, Debug)]
pub struct ProjectionOperator<'a> {
    group: &'a Group,
    weights: Vec<Rational>,
}

pub fn projection_operator<'a>(
    group: &'a Group,
    rep: &Representation,
    j: usize,
    jp: usize,
) -> ProjectionOperator<'a> {
    let scale = Rational::from((rep.dim as i64, group.order() as i64));
    let weights = (0..group.order())
        .map(|g| Rational::from(&rep.matrices[group.inverse_index(g)][j][jp] * &scale))
        .collect();
    ProjectionOperator { group, weights }
}

impl ProjectionOperator<'_> {
    pub fn apply_poly(&self, p: &MultiPoly) -> MultiPoly {
        let mut out = MultiPoly::zero(p.nvars());
        for (g, w) in self.group.elements.iter().zip(&self.weights) {
            if *w != 0 {
                out.add_assign(&p.compose_matrix(&g.spatial()).scale(w));
            }
        }
        out
    }

    pub fn apply_shift(&self, f: &ShiftCombination) -> ShiftCombination {
        let mut out = ShiftCombination::new();
        for (g, w) in self.group.elements.iter().zip(&self.weights) {
            if *w == 0 {
                continue;
            }
            for (lam, c) in f {
                *out.entry(g.apply(lam)).or_default() += Rational::from(w * c);
            }
        }
        out.retain(|_, c| *c != 0);
        out
    }
}

/// Reynolds averaging of a polynomial over the spatial symmetries.
pub fn reynolds_poly(g: &Group, p: &MultiPoly) -> MultiPoly {
    projection_operator(g, &Representation::trivial(g), 0, 0).apply_poly(p)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BasisKind {
    Polynomial,
    Shift { m: u32 },
}

#[derive(Clone, Debug, PartialEq)]
pub enum BasisFunction {
    /// Invariant polynomial `p` on `H_{n-1}`.
    Poly(MultiPoly),
    /// Orbit sum `Σ_{μ ∈ Γλ} g_{mμ}`; `level` is the least `‖μ‖_1` on the orbit.
    Orbit { points: Vec<Vec<i64>>, level: u32 },
}

#[derive(Clone, Debug)]
pub struct InvariantBasis {
    pub n: usize,
    /// Requested degree (polynomial) or orbit radius (shift).
    pub d: u32,
    pub kind: BasisKind,
    pub functions: Vec<BasisFunction>,
}

impl InvariantBasis {
    pub fn len(&self) -> usize {
        self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }

    pub fn polys(&self) -> Vec<&MultiPoly> {
        self.functions
            .iter()
            .filter_map(|f| match f {
                BasisFunction::Poly(p) => Some(p),
                _ => None,
            })
            .collect()
    }

    pub fn orbits(&self) -> Vec<&Vec<Vec<i64>>> {
        self.functions
            .iter()
            .filter_map(|f| match f {
                BasisFunction::Orbit { points, .. } => Some(points),
                _ => None,
            })
            .collect()
    }
}

fn monomials_of_degree(nvars: usize, deg: u32) -> Vec<Monomial> {
    fn rec(nvars: usize, i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if i + 1 == nvars {
            cur.push(left);
            out.push(Monomial::new(cur));
            cur.pop();
            return;
        }
        for e in (0..=left).rev() {
            cur.push(e);
            rec(nvars, i + 1, left - e, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(nvars, 0, deg, &mut Vec::new(), &mut out);
    out
}

/// Invariant polynomials of degree `<= d`, graded: for each degree the
/// averaged monomials are reduced to echelon form, so the basis for `d` is a
/// prefix of the basis for any larger `d`.
pub fn invariant_poly_basis(n: usize, d: u32) -> Result<InvariantBasis> {
    let g = build_gamma(n)?;
    let k = n - 1;
    let mut functions = Vec::new();
    for deg in 0..=d {
        let monos = monomials_of_degree(k, deg);
        let col: HashMap<Monomial, usize> = monos.iter().enumerate().map(|(i, m)| (*m, i)).collect();
        let rows: Vec<Vec<Rational>> = monos
            .iter()
            .map(|&m| {
                let avg = reynolds_poly(&g, &MultiPoly::monomial(k, &m.exponents(k), Rational::from(1)));
                let mut row = vec![Rational::new(); monos.len()];
                for (mm, c) in avg.terms() {
                    row[col[mm]] = c.clone();
                }
                row
            })
            .collect();
        let (reduced, _) = rref(rows);
        for row in reduced {
            let mut p = MultiPoly::zero(k);
            for (m, c) in monos.iter().zip(row) {
                p.add_term(*m, c);
            }
            functions.push(BasisFunction::Poly(p));
        }
    }
    Ok(InvariantBasis { n, d, kind: BasisKind::Polynomial, functions })
}

/// One orbit sum per `Γ_n`-orbit meeting `{λ ∈ Z^{n-1} : ‖λ‖_1 <= d}`,
/// ordered by level and then by the smallest orbit point.
pub fn invariant_shift_basis(n: usize, m: u32, d: u32) -> Result<InvariantBasis> {
    if m == 0 {
        return Err(Error::Unsupported("m must be positive".into()));
    }
    let g = build_gamma(n)?;
    let k = n - 1;
    let mut orbits: BTreeMap<(u32, Vec<i64>), Vec<Vec<i64>>> = BTreeMap::new();
    let mut covered: BTreeSet<Vec<i64>> = BTreeSet::new();
    for lam in l1_ball(k, d) {
        if covered.contains(&lam) {
            continue;
        }
        let orbit = g.orbit(&lam);
        let level = orbit.iter().map(|v| l1(v)).min().unwrap();
        covered.extend(orbit.iter().cloned());
        orbits.insert((level, orbit[0].clone()), orbit);
    }
    let functions = orbits
        .into_iter()
        .map(|((level, _), points)| BasisFunction::Orbit { points, level })
        .collect();
    Ok(InvariantBasis { n, d, kind: BasisKind::Shift { m }, functions })
}

fn l1(v: &[i64]) -> u32 {
    v.iter().map(|x| x.unsigned_abs() as u32).sum()
}

/// Integer points with `‖λ‖_1 <= d`.
pub fn l1_ball(k: usize, d: u32) -> Vec<Vec<i64>> {
    fn rec(k: usize, left: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for v in -left..=left {
            cur.push(v);
            rec(k, left - v.abs(), cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(k, d as i64, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::linalg::int_matmul;

    #[test]
    fn orders() {
        assert_eq!(build_gamma(2).unwrap().order(), 2);
        assert_eq!(build_gamma(3).unwrap().order(), 12);
        assert_eq!(build_gamma(4).unwrap().order(), 48);
    }

    #[test]
    fn contains_minus_identity_and_order_six() {
        let g = build_gamma(3).unwrap();
        assert!(g.elements.iter().any(|e| e.matrix == vec![vec![-1, 0], vec![0, -1]]));
        let order = |e: &GroupElement| {
            let mut p = e.matrix.clone();
            let mut k = 1;
            while p != vec![vec![1, 0], vec![0, 1]] {
                p = int_matmul(&p, &e.matrix);
                k += 1;
            }
            k
        };
        assert!(g.elements.iter().any(|e| order(e) == 6));
    }

    #[test]
    fn labels_are_homomorphic() {
        for n in [3, 4] {
            let g = build_gamma(n).unwrap();
            for a in &g.elements {
                for b in &g.elements {
                    let prod = int_matmul(&a.matrix, &b.matrix);
                    let lab = g.index_of_label(&compose(&a.perm, &b.perm), a.sign * b.sign).unwrap();
                    assert_eq!(g.elements[lab].matrix, prod);
                }
            }
        }
    }

    #[test]
    fn inverses() {
        let g = build_gamma(4).unwrap();
        for (i, e) in g.elements.iter().enumerate() {
            let p = int_matmul(&e.matrix, &g.elements[g.inverse_index(i)].matrix);
            assert_eq!(p, crate::arith::linalg::int_identity(3));
        }
    }

    #[test]
    fn poly_basis_small_degrees() {
        assert_eq!(invariant_poly_basis(3, 0).unwrap().len(), 1);
        assert_eq!(invariant_poly_basis(3, 1).unwrap().len(), 1);
        assert_eq!(invariant_poly_basis(3, 2).unwrap().len(), 2);
    }

    #[test]
    fn poly_basis_is_invariant() {
        let g = build_gamma(3).unwrap();
        for p in invariant_poly_basis(3, 6).unwrap().polys() {
            for e in &g.elements {
                assert_eq!(&p.compose_matrix(&e.spatial()), p);
            }
        }
    }

    #[test]
    fn shift_orbits_d1() {
        // {0} and {±e1, ±e2, ±(e1+e2)}: the frequency action is by transposes
        let b = invariant_shift_basis(3, 1, 1).unwrap();
        assert_eq!(b.len(), 2);
        let orbits = b.orbits();
        assert_eq!(orbits[1].len(), 6);
        assert!(orbits[1].contains(&vec![1, 1]));
    }

    #[test]
    fn shift_basis_nested() {
        let small = invariant_shift_basis(3, 2, 2).unwrap();
        let big = invariant_shift_basis(3, 2, 4).unwrap();
        for (a, b) in small.orbits().iter().zip(big.orbits()) {
            assert_eq!(*a, b);
        }
    }

    #[test]
    fn irreducibles_are_representations() {
        let g = build_gamma(3).unwrap();
        let irr = Representation::irreducibles_n3(&g).unwrap();
        assert_eq!(irr.iter().map(|r| r.dim * r.dim).sum::<usize>(), 12);
        for r in &irr {
            for (i, a) in g.elements.iter().enumerate() {
                for (j, b) in g.elements.iter().enumerate() {
                    let k = g.index_of_label(&compose(&a.perm, &b.perm), a.sign * b.sign).unwrap();
                    let prod: Vec<Vec<Rational>> = (0..r.dim)
                        .map(|x| {
                            (0..r.dim)
                                .map(|y| {
                                    (0..r.dim)
                                        .map(|z| Rational::from(&r.matrices[i][x][z] * &r.matrices[j][z][y]))
                                        .sum()
                                })
                                .collect()
                        })
                        .collect();
                    assert_eq!(prod, r.matrices[k], "{}", r.name);
                }
            }
        }
    }
}
