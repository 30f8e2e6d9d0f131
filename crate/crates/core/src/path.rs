//! Tracking piecewise-linear paths in `Hom(V, W)` through the wall.
//!
//! Each segment `g_s = A + s (B - A)` is scanned with a Lipschitz bound on
//! the wall indicator: an interval `[a, b]` can only contain a wall point if
//! `ν(a) + ν(b) ≤ |B - A| (b - a)`, where `ν(s) = min_x |g_s lift| / |lift|`.
//! Surviving leaves are resolved by Newton on the square system
//! `g_s · lift(u) = 0` in the unknowns `(s, u)`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::degree::{degree, DegreeOptions};
use crate::error::{Error, Result};
use crate::manifold::{ChartPoint, Submanifold};
use crate::numeric::{proj_dist, Matrix, Vector};
use crate::projection::ProjectionMap;
use crate::wall::{
    classify, crossing_sign, dedup_points, locate_wall_point, minimize_indicator, verdict_from_minima, WallOptions,
    WallReason, AMBIGUOUS_FACTOR,
};

/// Crossings closer than this in `t` are treated as a possible tangency.
pub const CLOSE_CROSSINGS: f64 = 1e-6;

/// Piecewise-linear path with uniformly spaced knots on `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct HomPath {
    knots: Vec<Matrix>,
}

impl HomPath {
    pub fn straight(g0: &ProjectionMap, g1: &ProjectionMap) -> Result<Self> {
        Self::from_knots(vec![g0.matrix().clone(), g1.matrix().clone()])
    }

    pub fn from_knots(knots: Vec<Matrix>) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::InvalidInput("a path needs at least two knots".into()));
        }
        let shape = knots[0].shape();
        if knots.iter().any(|k| k.shape() != shape) {
            return Err(Error::InvalidInput("path knots have different shapes".into()));
        }
        Ok(Self { knots })
    }

    pub fn knots(&self) -> &[Matrix] {
        &self.knots
    }

    pub fn segments(&self) -> usize {
        self.knots.len() - 1
    }

    pub fn start(&self) -> ProjectionMap {
        ProjectionMap::new(self.knots[0].clone()).expect("knots are finite")
    }

    pub fn end(&self) -> ProjectionMap {
        ProjectionMap::new(self.knots[self.segments()].clone()).expect("knots are finite")
    }

    fn locate(&self, t: f64) -> (usize, f64) {
        let k = self.segments();
        let x = t.clamp(0.0, 1.0) * k as f64;
        let i = (x.floor() as usize).min(k - 1);
        (i, x - i as f64)
    }

    pub fn eval(&self, t: f64) -> ProjectionMap {
        let (i, s) = self.locate(t);
        ProjectionMap::new(&self.knots[i] * (1.0 - s) + &self.knots[i + 1] * s).expect("finite")
    }

    /// `dg/dt` on segment `i`.
    pub fn velocity(&self, i: usize) -> Matrix {
        (&self.knots[i + 1] - &self.knots[i]) * self.segments() as f64
    }

    /// Same path traversed backwards.
    pub fn reversed(&self) -> Self {
        let mut k = self.knots.clone();
        k.reverse();
        Self { knots: k }
    }
}

/// Inserts random interior control points of size at most
/// `delta · |g1 - g0|`; endpoints are unchanged and `delta = 0` is the
/// identity.
pub fn perturb_path(path: &HomPath, delta: f64, seed: u64) -> HomPath {
    if delta == 0.0 {
        return path.clone();
    }
    let segs = path.segments().max(4);
    let g0 = path.knots[0].clone();
    let g1 = path.knots[path.segments()].clone();
    let mut scale = (&g1 - &g0).norm();
    if scale == 0.0 {
        scale = g0.norm().max(1.0);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let size = Uniform::new(0.5, 1.0).expect("valid range");
    let mut knots = Vec::with_capacity(segs + 1);
    for j in 0..=segs {
        let mut k = path.eval(j as f64 / segs as f64).matrix().clone();
        if j > 0 && j < segs {
            let e = Matrix::from_fn(k.nrows(), k.ncols(), |_, _| StandardNormal.sample(&mut rng));
            let e = &e / e.norm();
            k += e * (delta * scale * size.sample(&mut rng));
        }
        knots.push(k);
    }
    HomPath { knots }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrackOptions {
    pub wall: WallOptions,
    pub seed: u64,
    /// Perturbation size, relative to `|g1 - g0|`.
    pub perturb_delta: f64,
    pub max_retries: usize,
    /// Initial uniform grid per segment.
    pub grid: usize,
    /// Smallest interval width before Newton takes over.
    pub min_width: f64,
    pub newton_tol: f64,
    /// Fresh indicator starts at each grid point; 0 uses the wall default.
    pub scan_starts: usize,
}

impl Default for TrackOptions {
    fn default() -> Self {
        Self {
            wall: WallOptions::default(),
            seed: 0,
            perturb_delta: 0.05,
            max_retries: 5,
            grid: 16,
            min_width: 1.0 / 512.0,
            newton_tol: 1e-12,
            scan_starts: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossingRecord {
    pub t_star: f64,
    pub xi_star: ChartPoint,
    pub sign: Option<i32>,
    pub regular: bool,
    pub transversal: bool,
    pub reason: Option<WallReason>,
}

#[derive(Debug, Clone)]
pub struct TrackResult {
    pub crossings: Vec<CrossingRecord>,
    pub delta: i64,
    /// How many perturbations were needed (0 when the input path was generic).
    pub perturbations: usize,
    /// The path actually tracked.
    pub path: HomPath,
}

/// Indicator scan data at one parameter value.
struct Sample {
    s: f64,
    nu: f64,
    minima: Vec<ChartPoint>,
}

struct Segment<'a> {
    a: &'a Matrix,
    d: Matrix,
    x: &'a Submanifold,
    fresh: Vec<ChartPoint>,
    opts: &'a TrackOptions,
}

impl Segment<'_> {
    fn g(&self, s: f64) -> Matrix {
        self.a + &self.d * s
    }

    /// `ν(s)` plus a few best minimizers for warm starts.
    fn sample(&self, s: f64, warm: &[ChartPoint]) -> Sample {
        let g = self.g(s);
        let starts: Vec<&ChartPoint> = self.fresh.iter().chain(warm).collect();
        let mut mins: Vec<(ChartPoint, f64)> = starts
            .par_iter()
            .map(|p| minimize_indicator(&g, self.x, p, self.opts.wall.max_iters))
            .collect();
        mins.sort_by(|a, b| a.1.total_cmp(&b.1));
        let nu = mins.first().map_or(f64::INFINITY, |m| m.1);
        let best = dedup_points(self.x, mins.into_iter().take(12).map(|m| m.0), 1e-4);
        Sample {
            s,
            nu,
            minima: best.into_iter().take(4).collect(),
        }
    }

    /// Newton on `g_s lift(u) = 0` from `(s, u)`.
    fn newton(&self, s0: f64, start: &ChartPoint) -> Option<(f64, ChartPoint)> {
        let x = self.x;
        let resid = |s: f64, p: &ChartPoint| -> (Vector, f64) {
            let g = self.g(s);
            let l = x.lift(p);
            let r = &g * &l;
            let e = r.norm() / (g.norm() * l.norm());
            (r, e)
        };
        let (mut s, mut p) = (s0, start.clone());
        let (mut r, mut e) = resid(s, &p);
        for _ in 0..60 {
            if e < self.opts.newton_tol * 1e-2 {
                break;
            }
            let g = self.g(s);
            let l = x.lift(&p);
            let n = r.len();
            let mut jac = Matrix::zeros(n, n);
            jac.set_column(0, &(&self.d * &l));
            jac.view_mut((0, 1), (n, n - 1)).copy_from(&(&g * x.jacobian(&p)));
            let Some(step) = jac.lu().solve(&(-&r)) else { return None };
            let mut damp = 1.0;
            let mut ok = false;
            for _ in 0..10 {
                let sc = s + damp * step[0];
                let mut pc = p.clone();
                for (c, d) in pc.coords.iter_mut().zip(step.iter().skip(1)) {
                    *c += damp * d;
                }
                if !pc.coords.iter().all(|c| c.is_finite()) || !sc.is_finite() {
                    break;
                }
                if !x.in_domain(&pc) {
                    pc = x.best_chart(&pc);
                }
                let (rc, ec) = resid(sc, &pc);
                if ec < e {
                    s = sc;
                    p = pc;
                    r = rc;
                    e = ec;
                    ok = true;
                    break;
                }
                damp *= 0.5;
            }
            if !ok {
                break;
            }
        }
        (e < self.opts.newton_tol && (-1e-9..=1.0 + 1e-9).contains(&s)).then(|| (s.clamp(0.0, 1.0), x.best_chart(&p)))
    }

    /// Golden-section refinement of `ν` on `[a, b]` from warm starts.
    fn refine_min(&self, a: f64, b: f64, warm: &[ChartPoint]) -> f64 {
        let phi = 0.618_033_988_749_895;
        let (mut lo, mut hi) = (a, b);
        let eval = |s: f64| {
            let g = self.g(s);
            let gn = g.norm();
            warm.iter()
                .map(|p| minimize_indicator(&g, self.x, p, self.opts.wall.max_iters).1)
                .fold(f64::INFINITY, f64::min)
                / gn.max(1e-300)
        };
        let mut c = hi - phi * (hi - lo);
        let mut d = lo + phi * (hi - lo);
        let (mut fc, mut fd) = (eval(c), eval(d));
        for _ in 0..40 {
            if fc < fd {
                hi = d;
                d = c;
                fd = fc;
                c = hi - phi * (hi - lo);
                fc = eval(c);
            } else {
                lo = c;
                c = d;
                fc = fd;
                d = lo + phi * (hi - lo);
                fd = eval(d);
            }
        }
        fc.min(fd)
    }
}

/// Raw roots found on one segment, plus whether a wall contact was seen
/// that Newton could not resolve.
struct SegmentScan {
    roots: Vec<(f64, ChartPoint)>,
    unresolved: bool,
}

fn scan_segment(seg: &Segment) -> SegmentScan {
    let lip = seg.d.norm();
    let mut roots: Vec<(f64, ChartPoint)> = Vec::new();
    let mut unresolved = false;
    if lip == 0.0 {
        return SegmentScan { roots, unresolved };
    }
    let grid = seg.opts.grid.max(1);
    let mut samples: Vec<Sample> = Vec::with_capacity(grid + 1);
    let mut warm: Vec<ChartPoint> = Vec::new();
    for i in 0..=grid {
        let smp = seg.sample(i as f64 / grid as f64, &warm);
        warm = smp.minima.clone();
        samples.push(smp);
    }
    let mut stack: Vec<(Sample, Sample)> = Vec::new();
    let mut it = samples.into_iter();
    let mut prev = it.next().expect("grid has points");
    for next in it {
        let cloned = Sample {
            s: next.s,
            nu: next.nu,
            minima: next.minima.clone(),
        };
        stack.push((prev, next));
        prev = cloned;
    }
    while let Some((a, b)) = stack.pop() {
        let width = b.s - a.s;
        if a.nu + b.nu > lip * width * (1.0 + 1e-9) {
            continue;
        }
        if width > seg.opts.min_width {
            let warm: Vec<ChartPoint> = a.minima.iter().chain(&b.minima).cloned().collect();
            let mid = seg.sample(0.5 * (a.s + b.s), &warm);
            let mid2 = Sample {
                s: mid.s,
                nu: mid.nu,
                minima: mid.minima.clone(),
            };
            stack.push((a, mid));
            stack.push((mid2, b));
            continue;
        }
        // leaf: Newton from each warm start, anchored at the Lipschitz guess
        let guess = (a.s + (a.nu / lip)).min(b.s);
        let warm: Vec<ChartPoint> = a.minima.iter().chain(&b.minima).cloned().collect();
        let mut found = false;
        for p in &warm {
            for s0 in [guess, 0.5 * (a.s + b.s)] {
                if let Some(root) = seg.newton(s0, p) {
                    if root.0 >= a.s - 1e-6 && root.0 <= b.s + 1e-6 {
                        found = true;
                    }
                    roots.push(root);
                }
            }
        }
        if !found && seg.refine_min(a.s, b.s, &warm) < AMBIGUOUS_FACTOR * seg.opts.wall.wall_tol {
            unresolved = true;
        }
    }
    SegmentScan { roots, unresolved }
}

/// Outcome of scanning a whole path once.
struct Scan {
    crossings: Vec<CrossingRecord>,
    /// Why the path is not generic, if it is not.
    trouble: Option<String>,
}

fn scan_path(path: &HomPath, x: &Submanifold, opts: &TrackOptions) -> Result<Scan> {
    let fresh = x.sample(
        if opts.scan_starts > 0 { opts.scan_starts } else { opts.wall.effective_starts(x) },
        opts.wall.seed,
    );
    let k = path.segments();
    let mut raw: Vec<(f64, usize, ChartPoint)> = Vec::new();
    let mut trouble = None;
    for i in 0..k {
        let seg = Segment {
            a: &path.knots[i],
            d: &path.knots[i + 1] - &path.knots[i],
            x,
            fresh: fresh.clone(),
            opts,
        };
        let sc = scan_segment(&seg);
        if sc.unresolved {
            trouble = Some(format!("unresolved wall contact on segment {i}"));
        }
        for (s, p) in sc.roots {
            raw.push(((i as f64 + s) / k as f64, i, p));
        }
    }
    raw.sort_by(|a, b| a.0.total_cmp(&b.0));
    // merge duplicates: same t and same point
    let mut uniq: Vec<(f64, usize, ChartPoint)> = Vec::new();
    for r in raw {
        let dup = uniq
            .iter()
            .any(|u| (u.0 - r.0).abs() < 1e-9 && proj_dist(&x.point(&u.2), &x.point(&r.2)) < 1e-5);
        if !dup {
            uniq.push(r);
        }
    }
    let mut crossings = Vec::new();
    for (idx, (t, seg, xi)) in uniq.iter().enumerate() {
        let f0 = path.eval(*t);
        // every other wall point of the same map, from the scan and a fresh search
        let mut verdict = locate_wall_point(&f0, x, &opts.wall)?;
        let mut minima: Vec<(ChartPoint, f64)> = vec![(xi.clone(), f0.indicator(x, xi))];
        for (j, (t2, _, p2)) in uniq.iter().enumerate() {
            if j != idx && (t2 - t).abs() < 1e-9 {
                minima.push((p2.clone(), f0.indicator(x, p2)));
            }
        }
        for p in verdict.intersections.drain(..) {
            let v = f0.indicator(x, &p);
            minima.push((p, v));
        }
        let mut merged = verdict_from_minima(x, minima, &opts.wall);
        merged.xi = Some(xi.clone());
        merged.on_wall = true;
        let cls = classify(&f0, x, &merged)?;
        let regular = cls.regular == Some(true);
        let at_knot = {
            let u = t * k as f64;
            (u - u.round()).abs() < 1e-9 && u.round() > 0.0 && (u.round() as usize) < k
        };
        let (sign, transversal) = if regular && !at_knot {
            match crossing_sign(&f0, xi, &path.velocity(*seg), x) {
                Ok(s) => (Some(s), true),
                Err(Error::NonTransversal) => (None, false),
                Err(e) => return Err(e),
            }
        } else {
            (None, !at_knot)
        };
        crossings.push(CrossingRecord {
            t_star: *t,
            xi_star: xi.clone(),
            sign,
            regular,
            transversal,
            reason: cls.reason,
        });
    }
    if trouble.is_none() {
        if let Some(c) = crossings.iter().find(|c| !c.regular || !c.transversal) {
            trouble = Some(format!("non-generic crossing at t = {:.9}", c.t_star));
        }
    }
    if trouble.is_none() {
        if let Some(w) = crossings.windows(2).find(|w| w[1].t_star - w[0].t_star < CLOSE_CROSSINGS) {
            trouble = Some(format!("crossings at t = {:.9} and {:.9} too close", w[0].t_star, w[1].t_star));
        }
    }
    Ok(Scan { crossings, trouble })
}

fn check_endpoint(f: &ProjectionMap, x: &Submanifold, opts: &TrackOptions, which: &str) -> Result<()> {
    let v = locate_wall_point(f, x, &opts.wall)?;
    if v.on_wall || v.ambiguous {
        return Err(Error::InvalidInput(format!("path {which} point lies on the wall")));
    }
    Ok(())
}

/// Localizes, classifies and signs every wall crossing along `path`.
/// Non-generic paths are perturbed (endpoints fixed) and retried.
pub fn track(path: &HomPath, x: &Submanifold, opts: &TrackOptions) -> Result<TrackResult> {
    path.start().check_shape(x)?;
    crate::degree::check_orientable(x)?;
    check_endpoint(&path.start(), x, opts, "start")?;
    check_endpoint(&path.end(), x, opts, "end")?;
    let mut current = path.clone();
    for attempt in 0..=opts.max_retries {
        if attempt > 0 {
            current = perturb_path(path, opts.perturb_delta, opts.seed.wrapping_add(attempt as u64));
        }
        let scan = scan_path(&current, x, opts)?;
        if scan.trouble.is_none() {
            let delta = 2 * scan.crossings.iter().map(|c| c.sign.unwrap_or(0) as i64).sum::<i64>();
            return Ok(TrackResult {
                crossings: scan.crossings,
                delta,
                perturbations: attempt,
                path: current,
            });
        }
    }
    Err(Error::NoGenericPath(opts.max_retries))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DifferenceReport {
    pub degree_start: i64,
    pub degree_end: i64,
    pub delta: i64,
    pub crossings: Vec<CrossingRecord>,
    pub perturbations: usize,
    pub pass: bool,
}

/// Tracks the path and compares the signed crossing sum with directly
/// computed endpoint degrees.
pub fn verify_difference(
    path: &HomPath,
    x: &Submanifold,
    track_opts: &TrackOptions,
    degree_opts: &DegreeOptions,
) -> Result<DifferenceReport> {
    let tr = track(path, x, track_opts)?;
    let d0 = degree(&path.start(), x, degree_opts)?.degree;
    let d1 = degree(&path.end(), x, degree_opts)?.degree;
    let report = DifferenceReport {
        degree_start: d0,
        degree_end: d1,
        delta: tr.delta,
        crossings: tr.crossings,
        perturbations: tr.perturbations,
        pass: d1 - d0 == tr.delta,
    };
    if !report.pass {
        return Err(Error::DifferenceMismatch(format!(
            "deg(g1) - deg(g0) = {} - {} but crossings give {}; crossings: {:?}",
            d1, d0, report.delta, report.crossings
        )));
    }
    Ok(report)
}

/// Degree at the start, between consecutive crossings, and at the end,
/// as `(t, degree)` pairs.
pub fn chamber_degrees(
    path: &HomPath,
    x: &Submanifold,
    crossings: &[CrossingRecord],
    opts: &DegreeOptions,
) -> Result<Vec<(f64, i64)>> {
    let mut ts = vec![0.0];
    for w in crossings.windows(2) {
        ts.push(0.5 * (w[0].t_star + w[1].t_star));
    }
    ts.push(1.0);
    ts.dedup();
    ts.iter()
        .map(|&t| Ok((t, degree(&path.eval(t), x, opts)?.degree)))
        .collect()
}
