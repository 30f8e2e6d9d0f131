//! Central projections `[f]_X : X → P(W)` and their local behaviour.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::manifold::{ChartPoint, Submanifold};
use crate::numeric::{det_sign, oriented_complement, proj_normalize, Matrix, ProjPoint, Vector};

/// `|f̂ · lift| / |lift|` below this flags the point as on the centre.
pub const CENTER_TOL: f64 = 1e-9;

/// A linear map `f : V → W` stored in the standard bases.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionMap {
    matrix: Matrix,
}

impl ProjectionMap {
    pub fn new(matrix: Matrix) -> Result<Self> {
        if matrix.nrows() == 0 || matrix.ncols() == 0 {
            return Err(Error::InvalidInput("projection matrix must be non-empty".into()));
        }
        if matrix.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("projection matrix has non-finite entries".into()));
        }
        Ok(Self { matrix })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::InvalidInput("ragged projection matrix".into()));
        }
        Self::new(Matrix::from_fn(r, c, |i, j| rows[i][j]))
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    /// `dim W`.
    pub fn target_dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// `dim V`.
    pub fn source_dim(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn norm(&self) -> f64 {
        self.matrix.norm()
    }

    /// `Φ ∘ f`.
    pub fn compose(&self, phi: &Matrix) -> Result<Self> {
        if phi.ncols() != self.target_dim() {
            return Err(Error::InvalidInput("Φ has the wrong number of columns".into()));
        }
        Self::new(phi * &self.matrix)
    }

    /// Rejects maps whose shape does not fit `X` (`n = m + 1`, `N = dim V`).
    pub fn check_shape(&self, x: &Submanifold) -> Result<()> {
        if self.source_dim() != x.ambient_dim() || self.target_dim() != x.dim() + 1 {
            return Err(Error::InvalidInput(format!(
                "map is {}x{}, expected {}x{} for this manifold",
                self.target_dim(),
                self.source_dim(),
                x.dim() + 1,
                x.ambient_dim()
            )));
        }
        Ok(())
    }

    /// Scale-free distance of `x` from the centre `P(ker f)`.
    pub fn indicator(&self, x: &Submanifold, p: &ChartPoint) -> f64 {
        let l = x.lift(p);
        let n = self.norm();
        if n == 0.0 {
            return 0.0;
        }
        (&self.matrix * &l).norm() / (n * l.norm())
    }
}

impl Serialize for ProjectionMap {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<f64>> = self.matrix.row_iter().map(|r| r.iter().copied().collect()).collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ProjectionMap {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(d)?;
        ProjectionMap::from_rows(&rows).map_err(serde::de::Error::custom)
    }
}

/// `[f]_X(x)`.
pub fn project(f: &ProjectionMap, x: &Submanifold, p: &ChartPoint) -> Result<ProjPoint> {
    f.check_shape(x)?;
    if f.indicator(x, p) < CENTER_TOL {
        return Err(Error::OnCenter);
    }
    proj_normalize(&(f.matrix() * x.lift(p)))
}

/// The square matrix `[f y0, …, f ym]` for the oriented frame at `p`.
pub fn frame_image(f: &ProjectionMap, x: &Submanifold, p: &ChartPoint) -> Result<Matrix> {
    f.check_shape(x)?;
    Ok(f.matrix() * x.y_frame(p)?)
}

/// Whether `ker f ∩ Y = 0` at `p`.
pub fn is_local_diffeo(f: &ProjectionMap, x: &Submanifold, p: &ChartPoint) -> Result<bool> {
    Ok(det_sign(&frame_image(f, x, p)?) != 0)
}

/// Signed local degree at `p` relative to the manifold's frame rule.
pub fn local_degree(f: &ProjectionMap, x: &Submanifold, p: &ChartPoint) -> Result<i32> {
    if x.orientation().is_none() {
        return Err(Error::InconsistentOrientation(
            "manifold admits no consistent frame rule".into(),
        ));
    }
    match det_sign(&frame_image(f, x, p)?) {
        0 => Err(Error::CriticalPoint),
        s => Ok(s),
    }
}

/// Matrix of the differential of `[f]_X` at `p`, from chart coordinates to
/// an orthonormal frame of the tangent plane of the unit sphere at the
/// image. The frame is ordered so that `det[ŵ, frame] > 0`.
pub fn differential(f: &ProjectionMap, x: &Submanifold, p: &ChartPoint) -> Result<Matrix> {
    f.check_shape(x)?;
    let w: Vector = f.matrix() * x.lift(p);
    if f.indicator(x, p) < CENTER_TOL {
        return Err(Error::OnCenter);
    }
    let wn = w.norm();
    let what = &w / wn;
    let b = oriented_complement(&w);
    let fj = f.matrix() * x.jacobian(p);
    let tangential = &fj - &what * (what.transpose() * &fj);
    Ok(b.transpose() * tangential / wn)
}

/// Coordinates of the normalized image in the tangent frame used by
/// [`differential`]; used for finite-difference checks.
pub fn tangent_coordinates(w: &Vector, frame: &Matrix) -> Vector {
    frame.transpose() * (w / w.norm())
}
