//! Dense linear algebra and projective-point primitives.
//!
//! Everything here is double precision. Rank decisions use a relative
//! singular-value cutoff of [`RANK_EPS`] times the largest singular value.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Matrix = DMatrix<f64>;
pub type Vector = DVector<f64>;

/// Relative singular-value cutoff used for all rank and sign decisions.
pub const RANK_EPS: f64 = 1e-10;

/// Singular values of `m`, padded with zeros up to `max(rows, cols)`.
fn padded_svd(m: &Matrix) -> (Vec<f64>, Matrix) {
    let (r, c) = m.shape();
    let n = r.max(c);
    let mut sq = Matrix::zeros(n, c);
    sq.view_mut((0, 0), (r, c)).copy_from(m);
    let svd = sq.svd(false, true);
    let v_t = svd.v_t.expect("v_t requested");
    (svd.singular_values.iter().copied().collect(), v_t)
}

/// Singular values in decreasing order.
pub fn singular_values(m: &Matrix) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Numerical rank with relative cutoff `eps`.
pub fn rank_with(m: &Matrix, eps: f64) -> usize {
    let s = singular_values(m);
    let Some(&top) = s.first() else { return 0 };
    if top == 0.0 {
        return 0;
    }
    s.iter().filter(|&&x| x > eps * top).count()
}

pub fn rank(m: &Matrix) -> usize {
    rank_with(m, RANK_EPS)
}

/// Ratio of largest to smallest singular value (infinite when singular).
pub fn condition_number(m: &Matrix) -> f64 {
    let s = singular_values(m);
    match (s.first(), s.last()) {
        (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
        _ => f64::INFINITY,
    }
}

/// A linear subspace held as an orthonormal column basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    ambient_dim: usize,
    basis: Matrix,
}

impl Subspace {
    /// Orthonormalizes the columns of `spanning`; fails when they are not
    /// independent within [`RANK_EPS`].
    pub fn from_columns(spanning: &Matrix) -> Result<Self> {
        let (n, k) = spanning.shape();
        if k == 0 {
            return Ok(Self::zero(n));
        }
        if rank(spanning) < k {
            return Err(Error::InvalidInput(
                "subspace basis vectors are linearly dependent".into(),
            ));
        }
        let q = spanning.clone().qr().q();
        Ok(Self {
            ambient_dim: n,
            basis: q.columns(0, k).into_owned(),
        })
    }

    pub fn zero(ambient_dim: usize) -> Self {
        Self {
            ambient_dim,
            basis: Matrix::zeros(ambient_dim, 0),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    /// Orthonormal basis, one vector per column.
    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    /// Orthonormal basis of the orthogonal complement.
    pub fn complement(&self) -> Subspace {
        kernel(&self.basis.transpose())
    }

    pub fn contains(&self, v: &Vector, tol: f64) -> bool {
        let proj = &self.basis * (self.basis.transpose() * v);
        (v - proj).norm() <= tol * v.norm().max(1.0)
    }
}

/// Orthonormal basis of the null space of `m`.
///
/// A direction is in the kernel when its singular value is at most
/// `RANK_EPS` times the largest one; the zero map has the whole space.
pub fn kernel(m: &Matrix) -> Subspace {
    let c = m.ncols();
    if c == 0 {
        return Subspace::zero(0);
    }
    if m.nrows() == 0 {
        return Subspace {
            ambient_dim: c,
            basis: Matrix::identity(c, c),
        };
    }
    let (s, v_t) = padded_svd(m);
    let top = s.iter().copied().fold(0.0, f64::max);
    let cols: Vec<Vector> = s
        .iter()
        .enumerate()
        .filter(|(_, &x)| top == 0.0 || x <= RANK_EPS * top)
        .map(|(i, _)| v_t.row(i).transpose())
        .collect();
    if cols.is_empty() {
        return Subspace::zero(c);
    }
    Subspace {
        ambient_dim: c,
        basis: Matrix::from_columns(&cols),
    }
}

/// Sign of the determinant of a square matrix, or 0 when the matrix is
/// singular relative to its own scale.
pub fn det_sign(m: &Matrix) -> i32 {
    assert!(m.is_square(), "det_sign needs a square matrix");
    if m.nrows() == 0 {
        return 1;
    }
    let s = singular_values(m);
    let top = s[0];
    let bottom = *s.last().unwrap();
    if top == 0.0 || bottom <= RANK_EPS * top {
        return 0;
    }
    let d = m.clone().lu().determinant();
    if d > 0.0 {
        1
    } else if d < 0.0 {
        -1
    } else {
        0
    }
}

/// A point of a real projective space, stored as a unit representative.
/// `rep` and `-rep` describe the same point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjPoint {
    rep: Vec<f64>,
}

impl ProjPoint {
    pub fn new(v: &[f64]) -> Result<Self> {
        proj_normalize(&Vector::from_column_slice(v))
    }

    pub fn rep(&self) -> Vector {
        Vector::from_column_slice(&self.rep)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.rep
    }

    pub fn dim(&self) -> usize {
        self.rep.len()
    }

    /// Same point with the representative chosen so that its largest
    /// magnitude entry is positive.
    pub fn canonical(&self) -> ProjPoint {
        let idx = self
            .rep
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
            .map(|(i, _)| i)
            .unwrap_or(0);
        if self.rep.get(idx).copied().unwrap_or(0.0) < 0.0 {
            ProjPoint {
                rep: self.rep.iter().map(|x| -x).collect(),
            }
        } else {
            self.clone()
        }
    }
}

pub fn proj_normalize(v: &Vector) -> Result<ProjPoint> {
    let n = v.norm();
    if n == 0.0 || !n.is_finite() {
        return Err(Error::NotProjectivePoint);
    }
    Ok(ProjPoint {
        rep: v.iter().map(|x| x / n).collect(),
    })
}

/// Distance on the sphere modulo the antipodal map.
pub fn proj_dist(a: &ProjPoint, b: &ProjPoint) -> f64 {
    assert_eq!(a.dim(), b.dim(), "projective points of different dimension");
    let (mut minus, mut plus) = (0.0, 0.0);
    for (x, y) in a.rep.iter().zip(&b.rep) {
        minus += (x - y) * (x - y);
        plus += (x + y) * (x + y);
    }
    minus.min(plus).sqrt()
}

/// Least-squares coefficients `c` with `a * c ≈ b`.
pub fn lstsq(a: &Matrix, b: &Matrix) -> Matrix {
    let svd = a.clone().svd(true, true);
    svd.solve(b, 1e-14).expect("svd with u and v_t")
}

/// Orthonormal basis of the orthogonal complement of `v` (columns).
pub fn orth_complement(v: &Vector) -> Matrix {
    kernel(&Matrix::from_row_slice(1, v.len(), v.as_slice())).basis().clone()
}

/// Orthonormal basis of the complement of `v`, ordered so that
/// `det[v/|v|, basis] > 0`.
pub fn oriented_complement(v: &Vector) -> Matrix {
    let mut b = orth_complement(v);
    if b.ncols() == 0 {
        return b;
    }
    let mut full = Matrix::zeros(v.len(), v.len());
    full.set_column(0, &(v / v.norm()));
    full.view_mut((0, 1), (v.len(), b.ncols())).copy_from(&b);
    if full.determinant() < 0.0 {
        let c = b.column(0).clone_owned();
        b.set_column(0, &(-c));
    }
    b
}

/// Frobenius norm; the scale used for all relative wall tolerances.
pub fn frob(m: &Matrix) -> f64 {
    m.norm()
}
