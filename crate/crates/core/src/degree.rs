//! Global degree of `[f]_X` by signed counts over regular fibres.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::manifold::{ChartPoint, Submanifold};
use crate::numeric::{det_sign, proj_dist, proj_normalize, Matrix, ProjPoint, Vector};
use crate::projection::{frame_image, local_degree, ProjectionMap, CENTER_TOL};
use crate::report::Check;
use crate::wall::{dedup_points, indicator_minima, verdict_from_minima, WallOptions};

/// Targets whose fibre has a point where the tangential part of the
/// differential has relative singular value below this are rejected.
pub const REGULAR_SV_MIN: f64 = 1e-5;

#[derive(Debug, Clone, PartialEq)]
pub struct FibreSolveOptions {
    /// Newton multi-starts; 0 picks a default from the manifold size.
    pub starts: usize,
    pub newton_tol: f64,
    pub dedup_radius: f64,
    pub max_iters: usize,
    pub seed: u64,
}

impl Default for FibreSolveOptions {
    fn default() -> Self {
        Self {
            starts: 0,
            newton_tol: 1e-11,
            dedup_radius: 1e-7,
            max_iters: 60,
            seed: 0xf1b7e,
        }
    }
}

impl FibreSolveOptions {
    pub fn effective_starts(&self, x: &Submanifold) -> usize {
        if self.starts > 0 {
            self.starts
        } else {
            (16 * x.n_charts() * x.dim()).clamp(48, 1600)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DegreeOptions {
    pub fibre: FibreSolveOptions,
    pub wall: WallOptions,
    /// Number of regular targets that must agree.
    pub targets: usize,
    pub max_rejections: usize,
    pub seed: u64,
}

impl Default for DegreeOptions {
    fn default() -> Self {
        Self {
            fibre: FibreSolveOptions::default(),
            wall: WallOptions::default(),
            targets: 5,
            max_rejections: 50,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FibrePoint {
    pub point: ChartPoint,
    pub local_degree: i32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeCertificate {
    pub degree: i64,
    pub targets: Vec<ProjPoint>,
    pub fibres: Vec<Vec<FibrePoint>>,
    /// Signed count for each target.
    pub sums: Vec<i64>,
    pub unanimous: bool,
}

impl DegreeCertificate {
    pub fn max_fibre_size(&self) -> usize {
        self.fibres.iter().map(Vec::len).max().unwrap_or(0)
    }
}

/// Rows spanning `ζ^⊥`.
fn perp_rows(zeta: &ProjPoint) -> Matrix {
    crate::numeric::orth_complement(&zeta.rep()).transpose()
}

/// Damped Newton for `Q f lift(u) = 0` from one start.
fn newton_fibre(fm: &Matrix, q: &Matrix, x: &Submanifold, start: &ChartPoint, opts: &FibreSolveOptions) -> Option<ChartPoint> {
    let fnorm = fm.norm();
    let resid = |p: &ChartPoint| -> (Vector, f64) {
        let l = x.lift(p);
        let g = q * (fm * &l);
        let e = g.norm() / (fnorm * l.norm());
        (g, e)
    };
    let mut p = start.clone();
    let (mut g, mut e) = resid(&p);
    for _ in 0..opts.max_iters {
        if e < opts.newton_tol * 1e-2 {
            break;
        }
        let jac = q * (fm * x.jacobian(&p));
        let step = match jac.clone().lu().solve(&(-&g)) {
            Some(s) if s.iter().all(|v| v.is_finite()) => s,
            _ => crate::numeric::lstsq(&jac, &Matrix::from_column_slice(g.len(), 1, (-&g).as_slice())).column(0).into_owned(),
        };
        let mut damp = 1.0;
        let mut accepted = false;
        for _ in 0..10 {
            let mut cand = p.clone();
            for (c, s) in cand.coords.iter_mut().zip(step.iter()) {
                *c += damp * s;
            }
            if !cand.coords.iter().all(|c| c.is_finite()) {
                break;
            }
            if !x.in_domain(&cand) {
                cand = x.best_chart(&cand);
                if !x.in_domain(&cand) {
                    damp *= 0.5;
                    continue;
                }
            }
            let (gc, ec) = resid(&cand);
            if ec < e {
                p = cand;
                g = gc;
                e = ec;
                accepted = true;
                break;
            }
            damp *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    (e < opts.newton_tol).then(|| x.best_chart(&p))
}

/// Points of `X` mapping to `ζ`, from multi-start Newton.
pub fn solve_fibre(f: &ProjectionMap, x: &Submanifold, zeta: &ProjPoint, opts: &FibreSolveOptions) -> Result<Vec<ChartPoint>> {
    solve_fibre_seeded(f, x, zeta, opts, &[])
}

/// [`solve_fibre`] with extra Newton starts, e.g. near points where the map
/// is close to its centre and fibres concentrate in a tiny region.
pub fn solve_fibre_seeded(
    f: &ProjectionMap,
    x: &Submanifold,
    zeta: &ProjPoint,
    opts: &FibreSolveOptions,
    hints: &[ChartPoint],
) -> Result<Vec<ChartPoint>> {
    f.check_shape(x)?;
    if zeta.dim() != f.target_dim() {
        return Err(Error::InvalidInput("target point has the wrong dimension".into()));
    }
    let q = perp_rows(zeta);
    let mut starts = x.sample(opts.effective_starts(x), opts.seed);
    starts.extend_from_slice(hints);
    let found: Vec<ChartPoint> = starts
        .par_iter()
        .filter_map(|s| newton_fibre(f.matrix(), &q, x, s, opts))
        // Q f l = 0 also holds on the centre; keep only honest preimages
        .filter(|p| f.indicator(x, p) > CENTER_TOL)
        .collect();
    let mut pts = dedup_points(x, found, opts.dedup_radius);
    pts.sort_by(|a, b| {
        let (pa, pb) = (x.point(a).canonical(), x.point(b).canonical());
        pa.as_slice()
            .iter()
            .zip(pb.as_slice())
            .map(|(u, v)| u.total_cmp(v))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(pts)
}

/// Smallest singular value of `(I - ŵŵᵀ) f Q₁ / |f|`, where `Q₁` is an
/// orthonormal basis of `Y` orthogonal to the point's line and `w = f · lift`.
/// Unlike the differential itself this stays bounded near the centre, and it
/// vanishes at critical points.
pub fn restricted_margin(f: &ProjectionMap, x: &Submanifold, p: &ChartPoint) -> Result<f64> {
    let q = x.y_frame(p)?.qr().q();
    let m = x.dim();
    let fm = f.matrix();
    let w = fm * q.column(0);
    let fq1 = fm * q.columns(1, m);
    let tangential = if w.norm() > 0.0 {
        let what = &w / w.norm();
        &fq1 - &what * (what.transpose() * &fq1)
    } else {
        fq1
    };
    let sv = crate::numeric::singular_values(&tangential);
    Ok(sv.last().copied().unwrap_or(0.0) / fm.norm())
}

/// Every fibre point is non-critical with a well-conditioned differential.
pub fn is_regular_value(f: &ProjectionMap, x: &Submanifold, _zeta: &ProjPoint, fibre: &[ChartPoint]) -> Result<bool> {
    for p in fibre {
        if det_sign(&frame_image(f, x, p)?) == 0 {
            return Ok(false);
        }
        if restricted_margin(f, x, p)? < REGULAR_SV_MIN {
            return Ok(false);
        }
    }
    Ok(true)
}

fn random_target(rng: &mut ChaCha8Rng, n: usize) -> ProjPoint {
    loop {
        let v = Vector::from_iterator(n, (0..n).map(|_| StandardNormal.sample(rng)));
        if let Ok(p) = proj_normalize(&v) {
            return p;
        }
    }
}

/// Orientability and frame-rule preconditions shared by every signed
/// computation.
pub fn check_orientable(x: &Submanifold) -> Result<()> {
    if !x.is_relatively_orientable(x.dim() + 1)? {
        return Err(Error::NotRelativelyOrientable);
    }
    if x.orientation().is_none() {
        return Err(Error::InconsistentOrientation(
            "no consistent frame rule found on chart overlaps".into(),
        ));
    }
    Ok(())
}

fn certify(
    f: &ProjectionMap,
    x: &Submanifold,
    opts: &DegreeOptions,
    fibre_opts: &FibreSolveOptions,
    hints: &[ChartPoint],
) -> Result<DegreeCertificate> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let n = f.target_dim();
    let mut targets = Vec::new();
    let mut fibres = Vec::new();
    let mut sums = Vec::new();
    let mut rejections = 0;
    while targets.len() < opts.targets {
        let zeta = random_target(&mut rng, n);
        let fibre = solve_fibre_seeded(f, x, &zeta, fibre_opts, hints)?;
        if !is_regular_value(f, x, &zeta, &fibre)? {
            rejections += 1;
            if rejections >= opts.max_rejections {
                return Err(Error::NoRegularValue(rejections));
            }
            continue;
        }
        let pts = fibre
            .into_iter()
            .map(|p| {
                let d = local_degree(f, x, &p)?;
                Ok(FibrePoint { point: p, local_degree: d })
            })
            .collect::<Result<Vec<_>>>()?;
        sums.push(pts.iter().map(|p| p.local_degree as i64).sum());
        fibres.push(pts);
        targets.push(zeta);
    }
    let unanimous = sums.windows(2).all(|w| w[0] == w[1]);
    Ok(DegreeCertificate {
        degree: sums[0],
        targets,
        fibres,
        sums,
        unanimous,
    })
}

/// Indicator below which a point counts as close to the centre.
const NEAR_CENTRE: f64 = 1e-2;

/// Newton starts around local minima of the indicator that come close to the
/// centre. Near such a point a small patch of `X` covers much of `P(W)`, so
/// uniform starts can miss a fibre point in every fibre.
fn near_centre_hints(x: &Submanifold, mut minima: Vec<(ChartPoint, f64)>, seed: u64) -> Vec<ChartPoint> {
    minima.retain(|(_, v)| *v < NEAR_CENTRE);
    minima.sort_by(|a, b| a.1.total_cmp(&b.1));
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x4e43);
    let mut hints = Vec::new();
    let mut centres: Vec<(ChartPoint, f64)> = Vec::new();
    for (p, v) in minima {
        let pp = x.point(&p);
        if centres.iter().all(|(c, _)| proj_dist(&x.point(c), &pp) > 1e-6) {
            centres.push((p, v));
        }
        if centres.len() == 8 {
            break;
        }
    }
    for (p, v) in centres {
        hints.push(p.clone());
        for scale in [1.0, 10.0, 100.0] {
            for _ in 0..4 {
                let mut c = p.clone();
                for u in c.coords.iter_mut() {
                    let g: f64 = StandardNormal.sample(&mut rng);
                    *u += scale * v * g;
                }
                if x.in_domain(&c) {
                    hints.push(c);
                }
            }
        }
    }
    hints
}

/// Degree of `[f]_X` relative to the manifold's frame rule.
pub fn degree(f: &ProjectionMap, x: &Submanifold, opts: &DegreeOptions) -> Result<DegreeCertificate> {
    f.check_shape(x)?;
    check_orientable(x)?;
    if opts.targets == 0 {
        return Err(Error::InvalidInput("need at least one target".into()));
    }
    let starts = x.sample(opts.wall.effective_starts(x), opts.wall.seed);
    let minima = indicator_minima(f, x, &starts, opts.wall.max_iters);
    let verdict = verdict_from_minima(x, minima.clone(), &opts.wall);
    if verdict.on_wall || verdict.ambiguous {
        return Err(Error::WallPoint);
    }
    let hints = near_centre_hints(x, minima, opts.seed);
    let cert = certify(f, x, opts, &opts.fibre, &hints)?;
    if cert.unanimous {
        return Ok(cert);
    }
    // one retry with a denser start set before giving up
    let mut dense = opts.fibre.clone();
    dense.starts = opts.fibre.effective_starts(x) * 4;
    dense.seed = opts.fibre.seed ^ 0x9e37_79b9;
    let cert = certify(f, x, opts, &dense, &hints)?;
    if cert.unanimous {
        Ok(cert)
    } else {
        Err(Error::IncompleteFibres(format!("signed counts per target: {:?}", cert.sums)))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatesReport {
    pub pass: bool,
    pub checks: Vec<Check>,
}

/// Inequalities `|deg_R| ≤ mass ≤ deg_C` and the two congruences mod 2.
pub fn estimates_check(real_deg: i64, fibre_masses: &[i64], complex_deg: i64) -> EstimatesReport {
    let mut checks = Vec::new();
    for (i, &mass) in fibre_masses.iter().enumerate() {
        checks.push(Check::new(
            format!("lower_bound[{i}]"),
            real_deg.abs() <= mass,
            format!("|{real_deg}| <= {mass}"),
        ));
        checks.push(Check::new(
            format!("upper_bound[{i}]"),
            mass <= complex_deg,
            format!("{mass} <= {complex_deg}"),
        ));
        checks.push(Check::new(
            format!("mass_parity[{i}]"),
            (mass - real_deg).rem_euclid(2) == 0,
            format!("{mass} = {real_deg} mod 2"),
        ));
    }
    checks.push(Check::new(
        "degree_parity",
        (real_deg - complex_deg).rem_euclid(2) == 0,
        format!("{real_deg} = {complex_deg} mod 2"),
    ));
    EstimatesReport {
        pass: checks.iter().all(|c| c.pass),
        checks,
    }
}
