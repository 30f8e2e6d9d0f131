//! Wall membership, regularity of wall points, and crossing signs.
//!
//! The wall indicator of `f` at `x` is `|f̂ · lift(x)| / |lift(x)|` with `f̂`
//! the Frobenius-normalized map; it vanishes exactly where the centre
//! `P(ker f)` meets `X`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::manifold::{ChartPoint, Submanifold};
use crate::numeric::{proj_dist, rank, singular_values, Matrix, Vector};
use crate::projection::ProjectionMap;

pub const WALL_TOL: f64 = 1e-8;
/// Indicator values in `[WALL_TOL, AMBIGUOUS_FACTOR * WALL_TOL)` are too close
/// to call.
pub const AMBIGUOUS_FACTOR: f64 = 10.0;
/// Two minima closer than this (projective distance) are the same point.
pub const WALL_DEDUP: f64 = 1e-5;
/// Singular-value cutoff, relative to `|f0|`, when checking `rank f0|Y = m`.
pub const Y_RANK_EPS: f64 = 1e-6;
/// `|det| / prod |columns|` below this is treated as a zero determinant.
pub const TRANSVERSAL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct WallOptions {
    /// Multi-start count for the indicator minimization; 0 picks a default
    /// from the manifold size.
    pub starts: usize,
    pub wall_tol: f64,
    pub dedup_radius: f64,
    pub max_iters: usize,
    pub seed: u64,
}

impl Default for WallOptions {
    fn default() -> Self {
        Self {
            starts: 0,
            wall_tol: WALL_TOL,
            dedup_radius: WALL_DEDUP,
            max_iters: 200,
            seed: 0x3a11,
        }
    }
}

impl WallOptions {
    pub fn effective_starts(&self, x: &Submanifold) -> usize {
        if self.starts > 0 {
            self.starts
        } else {
            (12 * x.n_charts() * x.dim()).clamp(32, 400)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WallReason {
    NotSurjective,
    MultipleIntersections,
    KernelMeetsY,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WallVerdict {
    pub on_wall: bool,
    /// Minimum indicator within the ambiguous band above `wall_tol`.
    pub ambiguous: bool,
    pub min_indicator: f64,
    pub xi: Option<ChartPoint>,
    /// Distinct points of `X ∩ P(ker f)` found.
    pub intersections: Vec<ChartPoint>,
    pub regular: Option<bool>,
    pub reason: Option<WallReason>,
}

/// Levenberg–Marquardt descent of the wall indicator of `fhat` from `start`.
/// Returns the final point (in a chart containing it) and its indicator.
pub(crate) fn minimize_indicator(
    fhat: &Matrix,
    x: &Submanifold,
    start: &ChartPoint,
    max_iters: usize,
) -> (ChartPoint, f64) {
    let eval = |p: &ChartPoint| -> (Vector, f64) {
        let l = x.lift(p);
        let r = fhat * &l / l.norm();
        let e = r.norm();
        (r, e)
    };
    let mut p = start.clone();
    let (mut r, mut e) = eval(&p);
    let mut lambda = 1e-4;
    let m = x.dim();
    for _ in 0..max_iters {
        if e < 1e-16 {
            break;
        }
        let l = x.lift(&p);
        let ln = l.norm();
        let lhat = &l / ln;
        let j = x.jacobian(&p);
        let tang = &j - &lhat * (lhat.transpose() * &j);
        let jr = fhat * tang / ln;
        let jt = jr.transpose();
        let g = &jt * &r;
        let h = &jt * &jr;
        let mut improved = false;
        while lambda < 1e10 {
            let mut a = h.clone();
            for k in 0..m {
                a[(k, k)] += lambda * (h[(k, k)] + 1e-12);
            }
            let Some(step) = a.lu().solve(&(-&g)) else {
                lambda *= 10.0;
                continue;
            };
            let mut cand = p.clone();
            for (c, s) in cand.coords.iter_mut().zip(step.iter()) {
                *c += s;
            }
            if !x.in_domain(&cand) {
                cand = x.best_chart(&cand);
            }
            let (rc, ec) = eval(&cand);
            if ec < e {
                let small = step.norm() < 1e-15 * (1.0 + p.coords.iter().map(|c| c * c).sum::<f64>().sqrt());
                p = cand;
                r = rc;
                e = ec;
                lambda = (lambda * 0.2).max(1e-15);
                improved = !small;
                break;
            }
            lambda *= 8.0;
        }
        if !improved {
            break;
        }
    }
    (x.best_chart(&p), e)
}

fn normalized(f: &ProjectionMap) -> Matrix {
    let n = f.norm();
    if n == 0.0 {
        f.matrix().clone()
    } else {
        f.matrix() / n
    }
}

/// Local minima of the indicator reached from each start, in start order.
pub fn indicator_minima(f: &ProjectionMap, x: &Submanifold, starts: &[ChartPoint], max_iters: usize) -> Vec<(ChartPoint, f64)> {
    let fhat = normalized(f);
    starts
        .par_iter()
        .map(|s| minimize_indicator(&fhat, x, s, max_iters))
        .collect()
}

/// Keeps the first representative of each cluster of nearby points.
pub(crate) fn dedup_points(x: &Submanifold, pts: impl IntoIterator<Item = ChartPoint>, radius: f64) -> Vec<ChartPoint> {
    let mut out: Vec<(ChartPoint, crate::numeric::ProjPoint)> = Vec::new();
    for p in pts {
        let pp = x.point(&p);
        if out.iter().all(|(_, q)| proj_dist(q, &pp) >= radius) {
            out.push((p, pp));
        }
    }
    out.into_iter().map(|(p, _)| p).collect()
}

/// Searches `X ∩ P(ker f)` by multi-start minimization of the indicator.
pub fn locate_wall_point(f: &ProjectionMap, x: &Submanifold, opts: &WallOptions) -> Result<WallVerdict> {
    f.check_shape(x)?;
    let starts = x.sample(opts.effective_starts(x), opts.seed);
    let minima = indicator_minima(f, x, &starts, opts.max_iters);
    Ok(verdict_from_minima(x, minima, opts))
}

pub(crate) fn verdict_from_minima(x: &Submanifold, mut minima: Vec<(ChartPoint, f64)>, opts: &WallOptions) -> WallVerdict {
    minima.sort_by(|a, b| a.1.total_cmp(&b.1));
    let min = minima.first().map_or(f64::INFINITY, |m| m.1);
    let on_wall = min < opts.wall_tol;
    let ambiguous = !on_wall && min < AMBIGUOUS_FACTOR * opts.wall_tol;
    let hits = minima
        .iter()
        .filter(|(_, v)| *v < AMBIGUOUS_FACTOR * opts.wall_tol)
        .map(|(p, _)| p.clone());
    let intersections = if on_wall { dedup_points(x, hits, opts.dedup_radius) } else { Vec::new() };
    WallVerdict {
        on_wall,
        ambiguous,
        min_indicator: min,
        xi: on_wall.then(|| minima[0].0.clone()),
        intersections,
        regular: None,
        reason: None,
    }
}

/// Applies the three regularity conditions to a wall verdict for `f0`.
pub fn classify(f0: &ProjectionMap, x: &Submanifold, verdict: &WallVerdict) -> Result<WallVerdict> {
    f0.check_shape(x)?;
    let mut v = verdict.clone();
    if !v.on_wall {
        return Ok(v);
    }
    let xi = v
        .xi
        .clone()
        .ok_or_else(|| Error::InvalidInput("wall verdict without a wall point".into()))?;
    let n = f0.target_dim();
    let reason = if rank(f0.matrix()) < n {
        Some(WallReason::NotSurjective)
    } else if v.intersections.len() > 1 {
        Some(WallReason::MultipleIntersections)
    } else {
        let q = x.y_frame(&xi)?.qr().q();
        // Q is orthonormal, so singular values are measured against |f0|
        let restricted = f0.matrix() * q;
        let cutoff = Y_RANK_EPS * f0.norm();
        let r = singular_values(&restricted).iter().filter(|&&s| s > cutoff).count();
        (r != x.dim()).then_some(WallReason::KernelMeetsY)
    };
    v.regular = Some(reason.is_none());
    v.reason = reason;
    Ok(v)
}

/// Crossing sign with an explicit frame `(y0, …, ym)` at the wall point.
pub fn crossing_sign_with_frame(f0: &Matrix, frame: &Matrix, fdot: &Matrix) -> Result<i32> {
    let mut m = f0 * frame;
    let first = fdot * frame.column(0);
    m.set_column(0, &first);
    let scale: f64 = m.column_iter().map(|c| c.norm()).product();
    if scale == 0.0 {
        return Err(Error::NonTransversal);
    }
    let d = m.clone().lu().determinant();
    if !(d.abs() / scale >= TRANSVERSAL_TOL) {
        return Err(Error::NonTransversal);
    }
    Ok(if d > 0.0 { 1 } else { -1 })
}

/// Sign of `det[ḟ y0, f0 y1, …, f0 ym]` at the wall point `xi0`.
pub fn crossing_sign(f0: &ProjectionMap, xi0: &ChartPoint, fdot: &Matrix, x: &Submanifold) -> Result<i32> {
    f0.check_shape(x)?;
    if fdot.shape() != f0.matrix().shape() {
        return Err(Error::InvalidInput("velocity has the wrong shape".into()));
    }
    let frame = x.y_frame(xi0)?;
    crossing_sign_with_frame(f0.matrix(), &frame, fdot)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::{make_hyperquadric, make_veronese};

    fn f_t(t: f64) -> ProjectionMap {
        // (1-t) f0 + t f1
        ProjectionMap::from_rows(&[vec![t, 1.0 - t, 0.0], vec![0.0, t, 1.0 - t]]).unwrap()
    }

    fn t_star() -> f64 {
        // S = t/(1-t) with S^2 = (sqrt 5 - 1)/2
        let s = ((5f64.sqrt() - 1.0) / 2.0).sqrt();
        s / (1.0 + s)
    }

    #[test]
    fn constructed_kernel_is_found() {
        let x = make_veronese(2).unwrap();
        let p = ChartPoint::new(0, vec![0.4]);
        let l = x.lift(&p);
        // rows orthogonal to l
        let b = crate::numeric::orth_complement(&l);
        let f = ProjectionMap::new(b.transpose()).unwrap();
        let v = locate_wall_point(&f, &x, &WallOptions::default()).unwrap();
        assert!(v.on_wall);
        let xi = v.xi.unwrap();
        assert!(proj_dist(&x.point(&xi), &x.point(&p)) < 1e-7);
    }

    #[test]
    fn f0_is_off_the_wall() {
        let x = make_hyperquadric(2).unwrap();
        let v = locate_wall_point(&f_t(0.0), &x, &WallOptions::default()).unwrap();
        assert!(!v.on_wall);
        assert!(v.min_indicator > 0.1);
    }

    #[test]
    fn straight_path_meets_the_wall_at_t_star() {
        let x = make_hyperquadric(2).unwrap();
        let f = f_t(t_star());
        let v = classify(&f, &x, &locate_wall_point(&f, &x, &WallOptions::default()).unwrap()).unwrap();
        assert!(v.on_wall);
        assert_eq!(v.regular, Some(true));
        let fdot = f_t(1.0).matrix() - f_t(0.0).matrix();
        let xi = v.xi.unwrap();
        assert_eq!(crossing_sign(&f, &xi, &fdot, &x).unwrap(), -1);
        assert_eq!(crossing_sign(&f, &xi, &(-&fdot), &x).unwrap(), 1);
        assert_eq!(crossing_sign(&f, &xi, &(&fdot * 3.0), &x).unwrap(), -1);
    }

    #[test]
    fn zero_map_is_not_surjective() {
        let x = make_hyperquadric(2).unwrap();
        let f = ProjectionMap::new(Matrix::zeros(2, 3)).unwrap();
        let v = locate_wall_point(&f, &x, &WallOptions::default()).unwrap();
        let v = classify(&f, &x, &v).unwrap();
        assert_eq!(v.regular, Some(false));
        assert_eq!(v.reason, Some(WallReason::NotSurjective));
    }

    #[test]
    fn tangent_line_kernel_meets_y() {
        // on the twisted cubic, the kernel of f0 is the tangent line at s = 0:
        // span{(1,0,0,0), (0,1,0,0)}; X meets it only at that point
        let x = make_veronese(3).unwrap();
        let f = ProjectionMap::from_rows(&[vec![0.0, 0.0, 1.0, 0.0], vec![0.0, 0.0, 0.0, 1.0]]).unwrap();
        let v = classify(&f, &x, &locate_wall_point(&f, &x, &WallOptions::default()).unwrap()).unwrap();
        assert!(v.on_wall);
        assert_eq!(v.intersections.len(), 1);
        assert_eq!(v.reason, Some(WallReason::KernelMeetsY));
    }

    #[test]
    fn two_intersections_are_detected() {
        // kernel {x1 = 0} meets the circle in [1:0:1] and [1:0:-1]
        let x = make_hyperquadric(2).unwrap();
        let f = ProjectionMap::from_rows(&[vec![0.0, 1.0, 0.0], vec![0.0, 1.0, 0.0]]).unwrap();
        let v = locate_wall_point(&f, &x, &WallOptions::default()).unwrap();
        assert!(v.on_wall);
        assert_eq!(v.intersections.len(), 2);
    }

    #[test]
    fn frame_change_fixing_the_point_keeps_the_sign() {
        let x = make_hyperquadric(2).unwrap();
        let f = f_t(t_star());
        let v = locate_wall_point(&f, &x, &WallOptions::default()).unwrap();
        let xi = v.xi.unwrap();
        let frame = x.y_frame(&xi).unwrap();
        // y0 -> 2 y0, y1 -> 0.5 y1 + 3 y0 : positive determinant, y0 ray fixed
        let t = Matrix::from_row_slice(2, 2, &[2.0, 3.0, 0.0, 0.5]);
        let fdot = f_t(1.0).matrix() - f_t(0.0).matrix();
        let a = crossing_sign_with_frame(f.matrix(), &frame, &fdot).unwrap();
        let b = crossing_sign_with_frame(f.matrix(), &(&frame * t), &fdot).unwrap();
        assert_eq!(a, b);
    }
}
