//! Wronski projections of Grassmannians, the universal pole placement map
//! and the signed real subspace problem.
//!
//! Homogeneous binary forms of degree `d` in `(t0, t1)` are stored as
//! [`RatPoly`] in `x = t0` (with `t1 = 1`). Coefficient vectors in
//! `S^d W0^∨` list the coefficient of `t0^{d-r} t1^r` in row `r`, so the
//! leading `t0` power comes first. Wedge bases use lexicographic index sets.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::degree::{degree, is_regular_value, solve_fibre, DegreeCertificate, DegreeOptions};
use crate::error::{Error, Result};
use crate::manifold::{lex_subsets, make_plucker, permutation_sign, plucker_basis, plucker_vector, Submanifold};
use crate::numeric::{proj_dist, proj_normalize, rank_with, Matrix, ProjPoint, Subspace, Vector};
use crate::poly::{fpoly_add_scaled, fpoly_mul, rat, RatPoly};
use crate::projection::{local_degree, ProjectionMap};
use crate::report::Check;

/// Fibre computations on Grassmannians are capped at `pq ≤ 6`.
pub const DESK_SCALE_PQ: usize = 6;

/// Determinant of a square matrix of exact polynomials by cofactor expansion.
pub fn poly_det(m: &[Vec<RatPoly>]) -> RatPoly {
    let n = m.len();
    match n {
        0 => RatPoly::one(),
        1 => m[0][0].clone(),
        _ => {
            let mut acc = RatPoly::zero();
            for c in 0..n {
                if m[0][c].is_zero() {
                    continue;
                }
                let minor: Vec<Vec<RatPoly>> = m[1..]
                    .iter()
                    .map(|row| row.iter().enumerate().filter(|(j, _)| *j != c).map(|(_, e)| e.clone()).collect())
                    .collect();
                let term = &m[0][c] * &poly_det(&minor);
                acc = if c % 2 == 0 { &acc + &term } else { &acc - &term };
            }
            acc
        }
    }
}

fn fpoly_det(m: &[Vec<Vec<f64>>]) -> Vec<f64> {
    let n = m.len();
    match n {
        0 => vec![1.0],
        1 => m[0][0].clone(),
        _ => {
            let mut acc = Vec::new();
            for c in 0..n {
                let minor: Vec<Vec<Vec<f64>>> = m[1..]
                    .iter()
                    .map(|row| row.iter().enumerate().filter(|(j, _)| *j != c).map(|(_, e)| e.clone()).collect())
                    .collect();
                let term = fpoly_mul(&m[0][c], &fpoly_det(&minor));
                fpoly_add_scaled(&mut acc, &term, if c % 2 == 0 { 1.0 } else { -1.0 });
            }
            acc
        }
    }
}

fn factorial(n: usize) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * BigUint::from(k))
}

/// Matrix of the homogeneous Wronskian `∧^q S^{p+q-1} → S^{pq}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WronskiOperator {
    pub p: usize,
    pub q: usize,
    /// `(pq+1) × C(p+q, q)`; column `I` is `W(s^{i_1}, …, s^{i_q})`.
    pub matrix: ProjectionMap,
}

/// Exact Wronskian of polynomials in `s`.
pub fn wronskian(fs: &[RatPoly]) -> RatPoly {
    let q = fs.len();
    let mut rows = Vec::with_capacity(q);
    let mut cur: Vec<RatPoly> = fs.to_vec();
    for _ in 0..q {
        rows.push(cur.clone());
        cur = cur.iter().map(RatPoly::derivative).collect();
    }
    poly_det(&rows)
}

pub fn wronski_operator(p: usize, q: usize) -> Result<WronskiOperator> {
    if p == 0 || q == 0 {
        return Err(Error::InvalidInput("wronski needs p, q >= 1".into()));
    }
    let pq = p * q;
    let subsets = lex_subsets(p + q, q);
    let mut m = Matrix::zeros(pq + 1, subsets.len());
    for (col, s) in subsets.iter().enumerate() {
        let fs: Vec<RatPoly> = s.iter().map(|&i| RatPoly::monomial(rat(1), i)).collect();
        let w = wronskian(&fs);
        for (e, c) in w.coeffs().iter().enumerate() {
            if !c.is_zero() {
                m[(pq - e, col)] = c.to_f64().expect("small integer");
            }
        }
    }
    Ok(WronskiOperator {
        p,
        q,
        matrix: ProjectionMap::new(m)?,
    })
}

/// Absolute real degree of the Wronski projection.
pub fn eg_count(p: usize, q: usize) -> Result<BigUint> {
    if p == 0 || q == 0 {
        return Err(Error::InvalidInput("eg_count needs p, q >= 1".into()));
    }
    let (p, q) = (p.min(q), p.max(q));
    if p == 1 {
        // the Wronski map is a linear isomorphism of projective spaces
        return Ok(BigUint::one());
    }
    if p % 2 == 0 && q % 2 == 0 {
        return Err(Error::NotRelativelyOrientable);
    }
    if p % 2 == 1 && q % 2 == 1 {
        return Ok(BigUint::zero());
    }
    let mut num = factorial(p * q / 2);
    let mut den = BigUint::one();
    for k in 1..p {
        num *= factorial(k) * factorial(q - k);
        den *= factorial(q - p + 2 * k);
    }
    for k in 1..=p {
        den *= factorial((q - p + 2 * k - 1) / 2);
    }
    debug_assert!((&num % &den).is_zero());
    Ok(num / den)
}

/// Degree of the complex Grassmannian `G_q(C^{p+q})` in its Plücker
/// embedding.
pub fn complex_schubert_degree(p: usize, q: usize) -> BigUint {
    let mut num = factorial(p * q);
    let mut den = BigUint::one();
    for i in 0..q {
        num *= factorial(i);
        den *= factorial(p + i);
    }
    num / den
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WronskiDegree {
    pub p: usize,
    pub q: usize,
    pub degree: i64,
    pub eg_count: String,
    pub complex_degree: String,
    pub checks: Vec<Check>,
    pub certificate: DegreeCertificate,
}

/// Degree of the Wronski projection by fibre counting on the Plücker
/// manifold, checked against [`eg_count`] and the complex degree.
pub fn wronski_real_degree(p: usize, q: usize, opts: &DegreeOptions) -> Result<WronskiDegree> {
    if p * q > DESK_SCALE_PQ {
        return Err(Error::InvalidInput(format!("pq = {} exceeds the fibre-solving cap {DESK_SCALE_PQ}", p * q)));
    }
    let eg = eg_count(p, q)?;
    let cd = complex_schubert_degree(p, q);
    let w = wronski_operator(p, q)?;
    let x = make_plucker(p, q)?;
    let cert = degree(&w.matrix, &x, opts)?;
    let d = cert.degree;
    let eg_i = eg.to_i64().unwrap_or(i64::MAX);
    let cd_i = cd.to_i64().unwrap_or(i64::MAX);
    let checks = vec![
        Check::new("abs_degree_eq_eg_count", d.abs() == eg_i, format!("|{d}| = {eg}")),
        Check::new("parity_vs_complex", (d - cd_i).rem_euclid(2) == 0, format!("{d} = {cd} mod 2")),
        Check::new("bounded_by_complex", d.abs() <= cd_i, format!("|{d}| <= {cd}")),
    ];
    if !checks[0].pass {
        return Err(Error::IncompleteFibres(format!("|degree| = {} but eg_count = {eg}", d.abs())));
    }
    Ok(WronskiDegree {
        p,
        q,
        degree: d,
        eg_count: eg.to_string(),
        complex_degree: cd.to_string(),
        checks,
        certificate: cert,
    })
}

/// Kernel map `k_s : ker(s) → V0` of a quotient, as a `(p+q) × p` matrix of
/// binary forms with column degrees `d_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuotientDatum {
    p: usize,
    q: usize,
    degrees: Vec<usize>,
    entries: Vec<Vec<RatPoly>>,
}

impl QuotientDatum {
    pub fn new(q: usize, degrees: Vec<usize>, entries: Vec<Vec<RatPoly>>) -> Result<Self> {
        let p = degrees.len();
        if p == 0 || q == 0 {
            return Err(Error::InvalidInput("quotient datum needs p, q >= 1".into()));
        }
        if entries.len() != p + q || entries.iter().any(|r| r.len() != p) {
            return Err(Error::InvalidInput(format!("kernel map must be {} x {p}", p + q)));
        }
        for row in &entries {
            for (e, &d) in row.iter().zip(&degrees) {
                if e.degree().is_some_and(|k| k > d) {
                    return Err(Error::InvalidInput("entry exceeds its column degree".into()));
                }
            }
        }
        let s = Self { p, q, degrees, entries };
        s.validate()?;
        Ok(s)
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> usize {
        self.q
    }

    /// Total twist `Σ d_j`.
    pub fn nu(&self) -> usize {
        self.degrees.iter().sum()
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn entries(&self) -> &[Vec<RatPoly>] {
        &self.entries
    }

    /// Maximal minor on the rows `rows`.
    pub fn minor(&self, rows: &[usize]) -> RatPoly {
        let m: Vec<Vec<RatPoly>> = rows.iter().map(|&r| self.entries[r].clone()).collect();
        poly_det(&m)
    }

    /// Rank `p` at every point of `P^1`: the minors have no common finite
    /// root and some minor has full degree (no common root at infinity).
    fn validate(&self) -> Result<()> {
        let minors: Vec<RatPoly> = lex_subsets(self.p + self.q, self.p).iter().map(|r| self.minor(r)).collect();
        let g = minors.iter().fold(RatPoly::zero(), |acc, m| acc.gcd(m));
        if g.degree() != Some(0) {
            return Err(Error::InvalidInput(format!("kernel map drops rank where {g} = 0")));
        }
        let nu = self.nu();
        if minors.iter().all(|m| m.coeff(nu).is_zero()) {
            return Err(Error::InvalidInput("kernel map drops rank at [1:0]".into()));
        }
        Ok(())
    }

    /// Column values `k(ξ)` at a point `ξ = [a : b]` of `P^1`.
    pub fn eval(&self, xi: &ProjPoint) -> Matrix {
        let (a, b) = (xi.as_slice()[0], xi.as_slice()[1]);
        Matrix::from_fn(self.p + self.q, self.p, |i, j| {
            let d = self.degrees[j];
            self.entries[i][j]
                .to_f64()
                .iter()
                .enumerate()
                .map(|(e, c)| c * a.powi(e as i32) * b.powi((d - e) as i32))
                .sum()
        })
    }
}

/// Quotient whose pole placement map is the Wronski projection: the kernel
/// at `[t0 : t1]` is spanned by `(t1 s - t0)^q s^j`, `j < p`.
pub fn wronski_datum(p: usize, q: usize) -> Result<QuotientDatum> {
    let mut entries = vec![vec![RatPoly::zero(); p]; p + q];
    let mut binom = BigRational::one();
    for r in 0..=q {
        // C(q, r) (-t0)^{q-r} t1^r
        let sign = if (q - r).is_multiple_of(2) { rat(1) } else { rat(-1) };
        let c = RatPoly::monomial(&binom * sign, q - r);
        for j in 0..p {
            entries[r + j][j] = c.clone();
        }
        binom = binom * rat((q - r) as i64) / rat(r as i64 + 1);
    }
    QuotientDatum::new(q, vec![q; p], entries)
}

/// `∧^p k_s` as a map `∧^q V0 → S^ν`, through the pairing
/// `∧^p V0 ⊗ ∧^q V0 → det V0`.
pub fn qpl(s: &QuotientDatum) -> Result<ProjectionMap> {
    let (p, q, nu) = (s.p, s.q, s.nu());
    let n = p + q;
    let cols = lex_subsets(n, q);
    let mut m = Matrix::zeros(nu + 1, cols.len());
    for (c, i) in cols.iter().enumerate() {
        let comp: Vec<usize> = (0..n).filter(|r| !i.contains(r)).collect();
        let eps = permutation_sign(&[comp.as_slice(), i.as_slice()].concat()) as f64;
        let minor = s.minor(&comp);
        for r in 0..=nu {
            m[(r, c)] = eps * minor.coeff(nu - r).to_f64().expect("finite");
        }
    }
    ProjectionMap::new(m)
}

/// Rows spanning the annihilator of `U`.
fn annihilator(u: &Subspace) -> Matrix {
    u.complement().basis().transpose()
}

/// `[det(ρ_U ∘ k_s)]` as a point of `P(S^ν)`.
pub fn pole_place(s: &QuotientDatum, u: &Subspace) -> Result<ProjPoint> {
    if u.ambient_dim() != s.p + s.q || u.dim() != s.q {
        return Err(Error::InvalidInput(format!("U must be a {}-plane in R^{}", s.q, s.p + s.q)));
    }
    let r = annihilator(u);
    let kf: Vec<Vec<Vec<f64>>> = s.entries.iter().map(|row| row.iter().map(RatPoly::to_f64).collect()).collect();
    let kmax = kf.iter().flatten().flatten().fold(0.0f64, |a, c| a.max(c.abs()));
    let mut rk = vec![vec![Vec::new(); s.p]; s.p];
    for (a, row) in rk.iter_mut().enumerate() {
        for (j, e) in row.iter_mut().enumerate() {
            for i in 0..s.p + s.q {
                fpoly_add_scaled(e, &kf[i][j], r[(a, i)]);
            }
        }
    }
    let det = fpoly_det(&rk);
    let nu = s.nu();
    let v = Vector::from_fn(nu + 1, |row, _| det.get(nu - row).copied().unwrap_or(0.0));
    let scale = kmax.max(1.0).powi(s.p as i32);
    if v.amax() <= 1e-12 * scale {
        return Err(Error::SubspaceOnCenter);
    }
    proj_normalize(&v)
}

/// Coefficients of `∏ (b_i t0 - a_i t1)` for points `[a_i : b_i]`.
pub fn configuration_polynomial(points: &[ProjPoint]) -> Vector {
    let mut acc = vec![1.0];
    for pt in points {
        let (a, b) = (pt.as_slice()[0], pt.as_slice()[1]);
        acc = fpoly_mul(&acc, &[-a, b]);
    }
    let d = points.len();
    Vector::from_fn(d + 1, |r, _| acc.get(d - r).copied().unwrap_or(0.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubspaceSolution {
    /// Basis of `U`, normalized to the identity on its dominant Plücker index set.
    pub basis: Vec<Vec<f64>>,
    pub sign: i32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubspaceReport {
    pub solutions: Vec<SubspaceSolution>,
    pub total: i64,
    pub degree: i64,
    pub checks: Vec<Check>,
}

/// Signed `q`-planes meeting every `γ(ξ)`, `ξ ∈ 𝔰`.
pub fn subspace_solve(gamma: &QuotientDatum, points: &[ProjPoint], opts: &DegreeOptions) -> Result<SubspaceReport> {
    let (p, q) = (gamma.p, gamma.q);
    if gamma.nu() != p * q {
        return Err(Error::InvalidInput(format!("need ν = pq = {}, got {}", p * q, gamma.nu())));
    }
    if points.len() != p * q {
        return Err(Error::InvalidInput(format!("need {} points, got {}", p * q, points.len())));
    }
    if points.iter().any(|x| x.dim() != 2) {
        return Err(Error::InvalidInput("configuration points must lie in P^1".into()));
    }
    for i in 0..points.len() {
        for j in 0..i {
            if proj_dist(&points[i], &points[j]) < 1e-9 {
                return Err(Error::InvalidInput("configuration has a repeated point".into()));
            }
        }
    }
    let f = qpl(gamma)?;
    let x: Submanifold = make_plucker(p, q)?;
    crate::degree::check_orientable(&x)?;
    let zeta = proj_normalize(&configuration_polynomial(points))?;
    let fibre = solve_fibre(&f, &x, &zeta, &opts.fibre)?;
    if !is_regular_value(&f, &x, &zeta, &fibre)? {
        return Err(Error::NonGenericConfiguration("[P_s] is not a regular value".into()));
    }
    let n = p + q;
    let mut solutions = Vec::new();
    let mut meets = true;
    for pt in &fibre {
        let sign = local_degree(&f, &x, pt)?;
        let basis = plucker_basis(&x.lift(pt), n, q);
        for xi in points {
            let k = gamma.eval(xi);
            let mut joint = Matrix::zeros(n, n);
            joint.view_mut((0, 0), (n, q)).copy_from(&basis);
            joint.view_mut((0, q), (n, p)).copy_from(&k);
            let unit = Matrix::from_fn(n, n, |i, j| joint[(i, j)] / joint.column(j).norm().max(1e-300));
            meets &= rank_with(&unit, 1e-7) < n;
        }
        solutions.push(SubspaceSolution {
            basis: basis.row_iter().map(|r| r.iter().copied().collect()).collect(),
            sign,
        });
    }
    let total: i64 = solutions.iter().map(|s| s.sign as i64).sum();
    let deg = degree(&f, &x, opts)?.degree;
    let checks = vec![
        Check::new("solutions_meet_every_line", meets, format!("{} solutions", solutions.len())),
        Check::new("total_eq_degree", total == deg, format!("{total} = {deg}")),
    ];
    if total != deg {
        return Err(Error::IncompleteFibres(format!("signed total {total} but degree {deg}")));
    }
    Ok(SubspaceReport {
        solutions,
        total,
        degree: deg,
        checks,
    })
}

/// `project(qpl(s))` at the Plücker point of `U`.
pub fn qpl_image(s: &QuotientDatum, u: &Subspace) -> Result<ProjPoint> {
    let f = qpl(s)?;
    proj_normalize(&(f.matrix() * plucker_vector(u.basis())))
}

/// Largest projective distance between the two sides of the pole placement
/// diagram over the given subspaces.
pub fn diagram_defect(s: &QuotientDatum, subspaces: &[Subspace]) -> Result<f64> {
    let mut worst = 0.0f64;
    for u in subspaces {
        worst = worst.max(proj_dist(&pole_place(s, u)?, &qpl_image(s, u)?));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn vandermonde(i: &[usize]) -> i64 {
        let mut v = 1i64;
        for a in 0..i.len() {
            for b in a + 1..i.len() {
                v *= i[b] as i64 - i[a] as i64;
            }
        }
        v
    }

    fn random_subspace(rng: &mut ChaCha8Rng, n: usize, q: usize) -> Subspace {
        let m = Matrix::from_fn(n, q, |_, _| StandardNormal.sample(rng));
        Subspace::from_columns(&m).unwrap()
    }

    #[test]
    fn wronski_matches_vandermonde() {
        for (p, q) in [(1, 1), (1, 2), (2, 2), (2, 3), (3, 2)] {
            let w = wronski_operator(p, q).unwrap();
            let subsets = lex_subsets(p + q, q);
            for (col, i) in subsets.iter().enumerate() {
                let e: usize = i.iter().sum::<usize>() - q * (q - 1) / 2;
                for r in 0..=p * q {
                    let expect = if r == p * q - e { vandermonde(i) as f64 } else { 0.0 };
                    assert_eq!(w.matrix.matrix()[(r, col)], expect);
                }
            }
        }
    }

    #[test]
    fn wronski_is_surjective() {
        for (p, q) in [(1, 2), (2, 3), (3, 2)] {
            let w = wronski_operator(p, q).unwrap();
            assert_eq!(crate::numeric::rank(w.matrix.matrix()), p * q + 1);
        }
    }

    #[test]
    fn eg_values() {
        assert_eq!(eg_count(2, 3).unwrap(), BigUint::from(1u32));
        assert_eq!(eg_count(3, 2).unwrap(), BigUint::from(1u32));
        assert_eq!(eg_count(3, 3).unwrap(), BigUint::zero());
        assert_eq!(eg_count(2, 5).unwrap(), BigUint::from(2u32));
        assert_eq!(eg_count(3, 4).unwrap(), BigUint::from(2u32));
        assert!(matches!(eg_count(2, 4), Err(Error::NotRelativelyOrientable)));
        assert_eq!(complex_schubert_degree(2, 3), BigUint::from(5u32));
        assert_eq!(complex_schubert_degree(2, 2), BigUint::from(2u32));
    }

    #[test]
    fn small_wronski_degrees() {
        for (p, q) in [(1, 1), (1, 2)] {
            let r = wronski_real_degree(p, q, &DegreeOptions::default()).unwrap();
            assert_eq!(r.degree.abs(), 1);
            assert!(r.checks.iter().all(|c| c.pass));
        }
    }

    #[test]
    fn pole_place_by_hand() {
        let s = QuotientDatum::new(1, vec![1], vec![vec![RatPoly::from_ints(&[0, 1])], vec![RatPoly::from_ints(&[1])]]).unwrap();
        let u = Subspace::from_columns(&Matrix::from_column_slice(2, 1, &[1.0, 0.0])).unwrap();
        let pp = pole_place(&s, &u).unwrap();
        assert!(proj_dist(&pp, &ProjPoint::new(&[0.0, 1.0]).unwrap()) < 1e-15);
    }

    #[test]
    fn pole_place_identically_zero() {
        // constant kernel e0 with U = span(e0)
        let s = QuotientDatum::new(1, vec![0], vec![vec![RatPoly::from_ints(&[1])], vec![RatPoly::zero()]]).unwrap();
        let u = Subspace::from_columns(&Matrix::from_column_slice(2, 1, &[1.0, 0.0])).unwrap();
        assert!(matches!(pole_place(&s, &u), Err(Error::SubspaceOnCenter)));
    }

    #[test]
    fn invalid_datum_rejected() {
        // both entries vanish at t0 = 0
        let r = QuotientDatum::new(1, vec![1], vec![vec![RatPoly::from_ints(&[0, 1])], vec![RatPoly::from_ints(&[0, 2])]]);
        assert!(r.is_err());
    }

    #[test]
    fn diagram_commutes() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for (p, q) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
            let s = wronski_datum(p, q).unwrap();
            let us: Vec<Subspace> = (0..20).map(|_| random_subspace(&mut rng, p + q, q)).collect();
            assert!(diagram_defect(&s, &us).unwrap() < 1e-10);
        }
    }

    #[test]
    fn wronski_datum_recovers_wronski_operator() {
        for (p, q) in [(1, 1), (1, 2), (2, 2), (2, 3)] {
            let a = qpl(&wronski_datum(p, q).unwrap()).unwrap();
            let b = wronski_operator(p, q).unwrap();
            let va = proj_normalize(&Vector::from_column_slice(a.matrix().as_slice())).unwrap();
            let vb = proj_normalize(&Vector::from_column_slice(b.matrix.matrix().as_slice())).unwrap();
            assert!(proj_dist(&va, &vb) < 1e-12, "({p},{q})");
        }
    }

    #[test]
    fn plucker_basis_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for (n, q) in [(3, 1), (4, 2), (5, 2), (5, 3)] {
            let m = Matrix::from_fn(n, q, |_, _| StandardNormal.sample(&mut rng));
            let v = plucker_vector(&m);
            let back = plucker_vector(&plucker_basis(&v, n, q));
            let a = proj_normalize(&v).unwrap();
            let b = proj_normalize(&back).unwrap();
            assert!(proj_dist(&a, &b) < 1e-12);
        }
    }

    fn conic() -> QuotientDatum {
        let e = |c: &[i64]| vec![RatPoly::from_ints(c)];
        QuotientDatum::new(2, vec![2], vec![e(&[1, 2, -1]), e(&[-3, 1, 2]), e(&[2, 0, 1])]).unwrap()
    }

    #[test]
    fn two_lines_determine_a_plane() {
        let pts = [ProjPoint::new(&[0.3, 1.0]).unwrap(), ProjPoint::new(&[-1.2, 0.8]).unwrap()];
        let r = subspace_solve(&conic(), &pts, &DegreeOptions::default()).unwrap();
        assert_eq!(r.solutions.len(), 1);
        assert_eq!(r.total.abs(), 1);
        assert!(r.checks.iter().all(|c| c.pass));
        // the plane is spanned by the two conic points
        let g = conic();
        let basis = Matrix::from_fn(3, 2, |i, j| r.solutions[0].basis[i][j]);
        for xi in &pts {
            let mut m = Matrix::zeros(3, 3);
            m.view_mut((0, 0), (3, 2)).copy_from(&basis);
            m.set_column(2, &g.eval(xi).column(0));
            assert!(m.determinant().abs() < 1e-8);
        }
    }

    #[test]
    fn repeated_point_rejected() {
        let pts = [ProjPoint::new(&[0.3, 1.0]).unwrap(), ProjPoint::new(&[0.6, 2.0]).unwrap()];
        assert!(matches!(
            subspace_solve(&conic(), &pts, &DegreeOptions::default()),
            Err(Error::InvalidInput(_))
        ));
    }
}
