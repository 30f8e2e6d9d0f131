//! Compact submanifolds of a real projective space, given by chart atlases.
//!
//! Each chart maps an open box in `R^m` to homogeneous representatives in
//! `V`. The ordered frame `(lift, ∂_1 lift, …, ∂_m lift)` spans the bundle `Y`
//! at the point, and a per-chart sign on the last column turns these frames
//! into one globally consistent orientation rule whenever one exists.

mod custom;
mod hyperquadric;
mod plucker;
mod veronese;

use std::collections::VecDeque;
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{det_sign, lstsq, proj_dist, proj_normalize, rank, Matrix, Vector};

pub use custom::{parse_custom, parse_rational, CustomAtlas};
pub use plucker::{lex_subsets, permutation_sign, plucker_basis, plucker_vector};

/// A point of the manifold expressed in one chart.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChartPoint {
    pub chart: usize,
    pub coords: Vec<f64>,
}

impl ChartPoint {
    pub fn new(chart: usize, coords: Vec<f64>) -> Self {
        Self { chart, coords }
    }
}

/// Family tag with the parameters the orientability predicate needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum Family {
    Hyperquadric { n: usize },
    Veronese { n: usize },
    Plucker { p: usize, q: usize },
    Custom { orientable: Option<bool> },
}

/// Chart-level geometry of one family. Implementors only describe charts;
/// orientation and sampling are handled generically.
pub(crate) trait Atlas: Send + Sync + fmt::Debug {
    fn ambient_dim(&self) -> usize;
    fn dim(&self) -> usize;
    fn n_charts(&self) -> usize;
    fn half_width(&self, chart: usize) -> f64;
    fn lift(&self, chart: usize, u: &[f64]) -> Vector;
    /// `N x m` matrix of partial derivatives of the lift.
    fn jacobian(&self, chart: usize, u: &[f64]) -> Matrix;
    /// Chart coordinates of a point of `X` given by any representative, or
    /// `None` when the point is outside the chart's image.
    fn locate(&self, chart: usize, v: &Vector) -> Option<Vec<f64>>;
    /// Representative of a random point; `i` of `count` allows stratifying.
    fn sample_point(&self, rng: &mut ChaCha8Rng, i: usize, count: usize) -> Vector;
}

#[derive(Clone)]
pub struct Submanifold {
    family: Family,
    atlas: Arc<dyn Atlas>,
    /// Sign applied to the last frame column in each chart.
    orientation: Option<Vec<f64>>,
}

impl fmt::Debug for Submanifold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Submanifold")
            .field("family", &self.family)
            .field("ambient_dim", &self.ambient_dim())
            .field("dim", &self.dim())
            .field("orientation", &self.orientation)
            .finish()
    }
}

/// Points sampled when comparing frames on chart overlaps.
const ORIENTATION_SAMPLES: usize = 400;
const ORIENTATION_SEED: u64 = 0x5eed_0f_f4a3e;

/// The sphere `x0^2 = x1^2 + … + xn^2` in `P^n`.
pub fn make_hyperquadric(n: usize) -> Result<Submanifold> {
    if n < 2 {
        return Err(Error::InvalidInput(format!("hyperquadric needs n >= 2, got {n}")));
    }
    let atlas: Arc<dyn Atlas> = if n == 2 {
        Arc::new(hyperquadric::Circle)
    } else {
        Arc::new(hyperquadric::Sphere { n })
    };
    let mut x = Submanifold::build(Family::Hyperquadric { n }, atlas);
    // anchor: dropping x0 must have local degree +1 at the first chart centre
    let origin = ChartPoint::new(0, vec![0.0; n - 1]);
    let image = x.raw_frame(&origin).rows(1, n).into_owned();
    if det_sign(&image) < 0 {
        if let Some(signs) = x.orientation.as_mut() {
            signs.iter_mut().for_each(|s| *s = -*s);
        }
    }
    Ok(x)
}

/// The rational normal curve `[t0^n : t0^(n-1) t1 : … : t1^n]`.
pub fn make_veronese(n: usize) -> Result<Submanifold> {
    if n < 1 {
        return Err(Error::InvalidInput("veronese needs n >= 1".into()));
    }
    Ok(Submanifold::build(Family::Veronese { n }, Arc::new(veronese::Veronese { n })))
}

/// The Plücker embedding of the Grassmannian of `q`-planes in `R^(p+q)`.
pub fn make_plucker(p: usize, q: usize) -> Result<Submanifold> {
    if p < 1 || q < 1 {
        return Err(Error::InvalidInput("plucker needs p, q >= 1".into()));
    }
    let ambient = plucker::binomial(p + q, q);
    if p * q + 1 > ambient {
        return Err(Error::InvalidInput(format!(
            "plucker({p},{q}) has no room for a projection: pq + 1 = {} > {ambient}",
            p * q + 1
        )));
    }
    Ok(Submanifold::build(Family::Plucker { p, q }, Arc::new(plucker::Plucker::new(p, q))))
}

/// A user-described manifold with polynomial chart lifts.
pub fn make_custom(atlas: CustomAtlas) -> Result<Submanifold> {
    atlas.validate()?;
    let orientable = atlas.declared_orientable();
    Ok(Submanifold::build(Family::Custom { orientable }, Arc::new(atlas)))
}

impl Submanifold {
    fn build(family: Family, atlas: Arc<dyn Atlas>) -> Self {
        let mut x = Self {
            family,
            atlas,
            orientation: None,
        };
        x.orientation = x.compute_orientation();
        x
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    /// `N = dim V`.
    pub fn ambient_dim(&self) -> usize {
        self.atlas.ambient_dim()
    }

    /// `m = dim X`.
    pub fn dim(&self) -> usize {
        self.atlas.dim()
    }

    pub fn n_charts(&self) -> usize {
        self.atlas.n_charts()
    }

    pub fn half_width(&self, chart: usize) -> f64 {
        self.atlas.half_width(chart)
    }

    pub fn lift(&self, x: &ChartPoint) -> Vector {
        self.atlas.lift(x.chart, &x.coords)
    }

    pub fn jacobian(&self, x: &ChartPoint) -> Matrix {
        self.atlas.jacobian(x.chart, &x.coords)
    }

    pub fn point(&self, x: &ChartPoint) -> crate::numeric::ProjPoint {
        proj_normalize(&self.lift(x)).expect("chart lifts never vanish")
    }

    pub fn in_domain(&self, x: &ChartPoint) -> bool {
        let w = self.half_width(x.chart);
        x.chart < self.n_charts() && x.coords.iter().all(|c| c.is_finite() && c.abs() < w)
    }

    /// Per-chart signs of the orientation rule, when one exists.
    pub fn orientation(&self) -> Option<&[f64]> {
        self.orientation.as_deref()
    }

    fn raw_frame(&self, x: &ChartPoint) -> Matrix {
        let l = self.lift(x);
        let j = self.jacobian(x);
        let m = self.dim();
        let mut f = Matrix::zeros(self.ambient_dim(), m + 1);
        f.set_column(0, &l);
        f.view_mut((0, 1), (self.ambient_dim(), m)).copy_from(&j);
        f
    }

    /// Ordered frame `(y0, …, ym)` of `Y` at `x` with `y0 = lift(x)`.
    /// The orientation sign of the chart, if known, is applied to `ym`.
    pub fn y_frame(&self, x: &ChartPoint) -> Result<Matrix> {
        let mut f = self.raw_frame(x);
        if rank(&f) < self.dim() + 1 {
            return Err(Error::ImmersionFailure(format!(
                "frame degenerate in chart {} at {:?}",
                x.chart, x.coords
            )));
        }
        if let Some(signs) = &self.orientation {
            let m = self.dim();
            let s = signs[x.chart];
            f.column_mut(m).scale_mut(s);
        }
        Ok(f)
    }

    /// Same point expressed in `chart`, if it lies inside that chart's box.
    pub fn to_chart(&self, x: &ChartPoint, chart: usize) -> Option<ChartPoint> {
        if chart == x.chart {
            return Some(x.clone());
        }
        let v = self.lift(x);
        self.locate_in(&v, chart)
    }

    fn locate_in(&self, v: &Vector, chart: usize) -> Option<ChartPoint> {
        let u = self.atlas.locate(chart, v)?;
        let p = ChartPoint::new(chart, u);
        self.in_domain(&p).then_some(p)
    }

    /// Chart point for an ambient representative of a point on `X`, using
    /// the chart where the point is most central.
    pub fn chart_point_of(&self, v: &Vector) -> Option<ChartPoint> {
        let mut best: Option<(f64, ChartPoint)> = None;
        for c in 0..self.n_charts() {
            if let Some(p) = self.locate_in(v, c) {
                let r = p.coords.iter().fold(0.0f64, |a, x| a.max(x.abs())) / self.half_width(c);
                if best.as_ref().is_none_or(|(b, _)| r < *b) {
                    best = Some((r, p));
                }
            }
        }
        best.map(|(_, p)| p)
    }

    /// Re-expresses `x` in its most central chart.
    pub fn best_chart(&self, x: &ChartPoint) -> ChartPoint {
        self.chart_point_of(&self.lift(x)).unwrap_or_else(|| x.clone())
    }

    /// Whether the ambient vector represents a point of `X` up to `tol`.
    pub fn contains(&self, v: &Vector, tol: f64) -> bool {
        let Ok(target) = proj_normalize(v) else { return false };
        self.chart_point_of(v)
            .is_some_and(|p| proj_dist(&self.point(&p), &target) < tol)
    }

    /// Deterministic quasi-uniform sample of `count` points, each in its
    /// most central chart.
    pub fn sample(&self, count: usize, seed: u64) -> Vec<ChartPoint> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::with_capacity(count);
        let mut i = 0;
        while out.len() < count {
            let v = self.atlas.sample_point(&mut rng, i % count.max(1), count);
            i += 1;
            if let Some(p) = self.chart_point_of(&v) {
                out.push(p);
            }
            if i > 100 * count + 100 {
                break;
            }
        }
        out
    }

    /// Uniform random point in a given chart's box, shrunk by `shrink`.
    pub fn random_in_chart(&self, rng: &mut impl Rng, chart: usize, shrink: f64) -> ChartPoint {
        let w = self.half_width(chart) * shrink;
        ChartPoint::new(chart, (0..self.dim()).map(|_| rng.random_range(-w..w)).collect())
    }

    /// Closed-form relative orientability of projections into `P(W)` with
    /// `dim W = target_dim`.
    pub fn is_relatively_orientable(&self, target_dim: usize) -> Result<bool> {
        if target_dim != self.dim() + 1 {
            return Err(Error::InvalidInput(format!(
                "target dimension must be dim X + 1 = {}, got {target_dim}",
                self.dim() + 1
            )));
        }
        match self.family {
            Family::Hyperquadric { .. } => Ok(true),
            Family::Veronese { n } => {
                let d = n as i64;
                Ok((target_dim as i64 * (1 - d)).rem_euclid(2) == 0)
            }
            Family::Plucker { p, q } => Ok(!(p % 2 == 0 && q % 2 == 0)),
            Family::Custom { orientable } => orientable.ok_or(Error::OrientabilityUnknown),
        }
    }

    /// Compares frames on chart overlaps and propagates one sign per chart.
    /// Returns `None` when the overlap signs admit no consistent choice.
    fn compute_orientation(&self) -> Option<Vec<f64>> {
        let k = self.n_charts();
        // edge[a][b]: observed sign of det(F_a^+ F_b), 0 if unseen, 2 if mixed
        let mut edge = vec![vec![0i32; k]; k];
        let mut rng = ChaCha8Rng::seed_from_u64(ORIENTATION_SEED);
        for i in 0..ORIENTATION_SAMPLES {
            let v = self.atlas.sample_point(&mut rng, i, ORIENTATION_SAMPLES);
            let members: Vec<ChartPoint> = (0..k).filter_map(|c| self.locate_in(&v, c)).collect();
            for a in 0..members.len() {
                for b in a + 1..members.len() {
                    let fa = self.raw_frame(&members[a]);
                    let fb = self.raw_frame(&members[b]);
                    let t = lstsq(&fa, &fb);
                    let s = det_sign(&t);
                    if s == 0 {
                        continue;
                    }
                    let (ca, cb) = (members[a].chart, members[b].chart);
                    for (x, y) in [(ca, cb), (cb, ca)] {
                        let e = &mut edge[x][y];
                        if *e == 0 {
                            *e = s;
                        } else if *e != s {
                            *e = 2;
                        }
                    }
                }
            }
        }
        let mut sign = vec![0i32; k];
        sign[0] = 1;
        let mut queue = VecDeque::from([0usize]);
        while let Some(a) = queue.pop_front() {
            for b in 0..k {
                match edge[a][b] {
                    0 => {}
                    2 => return None,
                    s => {
                        let want = sign[a] * s;
                        if sign[b] == 0 {
                            sign[b] = want;
                            queue.push_back(b);
                        } else if sign[b] != want {
                            return None;
                        }
                    }
                }
            }
        }
        if sign.contains(&0) {
            return None;
        }
        Some(sign.into_iter().map(f64::from).collect())
    }

    /// Overlap consistency check used by tests and diagnostics: the change
    /// of frame between any two charts containing the same sampled point
    /// has positive determinant.
    pub fn check_orientation(&self, samples: usize, seed: u64) -> Result<()> {
        if self.orientation.is_none() {
            return Err(Error::InconsistentOrientation("no consistent frame rule".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for i in 0..samples {
            let v = self.atlas.sample_point(&mut rng, i, samples);
            let members: Vec<ChartPoint> =
                (0..self.n_charts()).filter_map(|c| self.locate_in(&v, c)).collect();
            for a in 0..members.len() {
                for b in a + 1..members.len() {
                    let fa = self.y_frame(&members[a])?;
                    let fb = self.y_frame(&members[b])?;
                    if det_sign(&lstsq(&fa, &fb)) < 0 {
                        return Err(Error::InconsistentOrientation(format!(
                            "charts {} and {} disagree",
                            members[a].chart, members[b].chart
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(a: &Vector, b: &[f64], tol: f64) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() < tol, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn circle_frame_at_zero() {
        let x = make_hyperquadric(2).unwrap();
        let f = x.y_frame(&ChartPoint::new(0, vec![0.0])).unwrap();
        assert_close(&f.column(0).into_owned(), &[1.0, 1.0, 0.0], 1e-15);
        assert_close(&f.column(1).into_owned(), &[0.0, 0.0, 1.0], 1e-15);
    }

    #[test]
    fn circle_contains_known_point() {
        let x = make_hyperquadric(2).unwrap();
        assert!(x.contains(&Vector::from_vec(vec![1.0, 1.0, 0.0]), 1e-12));
        assert!(!x.contains(&Vector::from_vec(vec![1.0, 0.0, 0.0]), 1e-6));
    }

    #[test]
    fn hyperquadric_points_satisfy_equation() {
        for n in 2..6 {
            let x = make_hyperquadric(n).unwrap();
            for p in x.sample(50, 3) {
                let v = x.point(&p);
                let s = v.as_slice();
                let q = s[0] * s[0] - s[1..].iter().map(|a| a * a).sum::<f64>();
                assert!(q.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn veronese_frame_at_origin() {
        let x = make_veronese(2).unwrap();
        let f = x.y_frame(&ChartPoint::new(0, vec![0.0])).unwrap();
        assert_close(&f.column(0).into_owned(), &[1.0, 0.0, 0.0], 1e-15);
        assert_close(&f.column(1).into_owned().abs(), &[0.0, 1.0, 0.0], 1e-15);
    }

    #[test]
    fn veronese_euler_relation() {
        // the lift lies in the span of the two homogeneous partials
        for n in 1..6 {
            let x = make_veronese(n).unwrap();
            for p in x.sample(20, 9) {
                let v = x.lift(&p);
                let (t0, t1) = if p.chart == 0 { (1.0, p.coords[0]) } else { (p.coords[0], 1.0) };
                let mut d0 = Vector::zeros(n + 1);
                let mut d1 = Vector::zeros(n + 1);
                for k in 0..=n {
                    let (a, b) = ((n - k) as i32, k as i32);
                    if a > 0 {
                        d0[k] = a as f64 * t0.powi(a - 1) * t1.powi(b);
                    }
                    if b > 0 {
                        d1[k] = b as f64 * t0.powi(a) * t1.powi(b - 1);
                    }
                }
                let e = (&d0 * t0 + &d1 * t1) / n as f64;
                assert!((e - v).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn veronese_n1_is_the_line() {
        let x = make_veronese(1).unwrap();
        assert_eq!(x.ambient_dim(), 2);
        let f = x.y_frame(&ChartPoint::new(0, vec![0.3])).unwrap();
        assert_eq!(rank(&f), 2);
    }

    #[test]
    fn plucker_dimensions() {
        let x = make_plucker(1, 2).unwrap();
        assert_eq!((x.ambient_dim(), x.dim()), (3, 2));
        let x = make_plucker(2, 3).unwrap();
        assert_eq!((x.ambient_dim(), x.dim(), x.n_charts()), (10, 6, 10));
        assert!(make_plucker(3, 1).is_ok());
    }

    #[test]
    fn plucker_quadratic_relations() {
        for (p, q) in [(1, 2), (2, 2), (3, 2)] {
            let x = make_plucker(p, q).unwrap();
            let idx = lex_subsets(p + q, 2);
            let at = |i: usize, j: usize| idx.iter().position(|s| s == &vec![i, j]).unwrap();
            for pt in x.sample(20, 1) {
                let v = x.lift(&pt);
                let n = p + q;
                for i in 0..n {
                    for j in i + 1..n {
                        for k in j + 1..n {
                            for l in k + 1..n {
                                let r = v[at(i, j)] * v[at(k, l)] - v[at(i, k)] * v[at(j, l)]
                                    + v[at(i, l)] * v[at(j, k)];
                                assert!(r.abs() < 1e-10);
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn orientability_predicates() {
        assert!(make_hyperquadric(3).unwrap().is_relatively_orientable(3).unwrap());
        assert!(!make_plucker(2, 2).unwrap().is_relatively_orientable(5).unwrap());
        assert!(make_plucker(2, 3).unwrap().is_relatively_orientable(7).unwrap());
        assert!(make_veronese(3).unwrap().is_relatively_orientable(2).unwrap());
        assert!(make_veronese(2).unwrap().is_relatively_orientable(3).is_err());
    }

    #[test]
    fn frame_rules_are_consistent_when_orientable() {
        let cases = [
            make_hyperquadric(2),
            make_hyperquadric(3),
            make_hyperquadric(4),
            make_veronese(1),
            make_veronese(2),
            make_veronese(3),
            make_veronese(4),
            make_plucker(1, 2),
            make_plucker(2, 3),
            make_plucker(1, 3),
        ];
        for x in cases {
            let x = x.unwrap();
            assert!(x.orientation().is_some(), "{x:?}");
            x.check_orientation(200, 77).unwrap();
        }
    }

    #[test]
    fn plucker_2_2_has_no_frame_rule() {
        assert!(make_plucker(2, 2).unwrap().orientation().is_none());
    }

    #[test]
    fn charts_cover_the_manifold() {
        for x in [make_hyperquadric(3).unwrap(), make_veronese(3).unwrap(), make_plucker(2, 3).unwrap()] {
            let mut rng = ChaCha8Rng::seed_from_u64(5);
            for i in 0..200 {
                let v = x.atlas.sample_point(&mut rng, i, 200);
                let p = x.chart_point_of(&v).expect("every point lies in some chart");
                let back = x.point(&p);
                assert!(proj_dist(&back, &proj_normalize(&v).unwrap()) < 1e-10);
            }
        }
    }

    #[test]
    fn jacobians_match_finite_differences() {
        let h = 1e-6;
        for x in [
            make_hyperquadric(2).unwrap(),
            make_hyperquadric(4).unwrap(),
            make_veronese(3).unwrap(),
            make_plucker(2, 3).unwrap(),
        ] {
            for p in x.sample(10, 4) {
                let j = x.jacobian(&p);
                for k in 0..x.dim() {
                    let mut a = p.clone();
                    let mut b = p.clone();
                    a.coords[k] += h;
                    b.coords[k] -= h;
                    let fd = (x.lift(&a) - x.lift(&b)) / (2.0 * h);
                    assert!((fd - j.column(k)).norm() < 1e-6 * (1.0 + j.column(k).norm()));
                }
            }
        }
    }

    #[test]
    fn sample_is_deterministic() {
        let x = make_hyperquadric(2).unwrap();
        assert_eq!(x.sample(4, 11), x.sample(4, 11));
        assert_eq!(x.sample(4, 11).len(), 4);
        assert!(x.sample(0, 11).is_empty());
    }

    #[test]
    fn bad_parameters_are_rejected() {
        assert!(make_hyperquadric(1).is_err());
        assert!(make_veronese(0).is_err());
        assert!(make_plucker(0, 2).is_err());
    }
}
