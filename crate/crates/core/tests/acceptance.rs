//! Acceptance checks, one PASS/FAIL line per criterion. Exits non-zero if any
//! criterion fails.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use wallcross::degree::{degree, estimates_check, DegreeOptions};
use wallcross::manifold::{make_hyperquadric, make_plucker, make_veronese, ChartPoint, Family, Submanifold};
use wallcross::numeric::{det_sign, proj_dist, singular_values, Matrix, Subspace};
use wallcross::path::{track, verify_difference, HomPath, TrackOptions};
use wallcross::projection::ProjectionMap;
use wallcross::rational::{as_central_projection, brockett_degree, generator, random_pair, real_fibre_mass};
use wallcross::schubert::{eg_count, pole_place, qpl_image, wronski_datum, wronski_real_degree, QuotientDatum};
use wallcross::wall::{classify, crossing_sign, locate_wall_point, WallOptions};
use wallcross::Error;

const T_STAR_TOL: f64 = 1e-6;
const DIAGRAM_TOL: f64 = 1e-10;
/// Relative steps to either side of a wall point in the jump check.
const JUMP_EPS: [f64; 3] = [1e-5, 1e-4, 1e-3];
/// Sampled crossings must be regular and transversal by at least this margin.
const CROSSING_MARGIN: f64 = 0.05;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn drop_map(n: usize, first: bool) -> ProjectionMap {
    let off = usize::from(first);
    ProjectionMap::new(Matrix::from_fn(n, n + 1, |i, j| if j == i + off { 1.0 } else { 0.0 })).unwrap()
}

fn gaussian(rng: &mut ChaCha8Rng, r: usize, c: usize) -> Matrix {
    Matrix::from_fn(r, c, |_, _| StandardNormal.sample(rng))
}

fn criterion_1() -> Outcome {
    let mut notes = Vec::new();
    let mut pass = true;
    for n in [2, 3] {
        let x = make_hyperquadric(n).unwrap();
        for (first, expect) in [(true, 2), (false, 0)] {
            let start = Instant::now();
            let r = degree(&drop_map(n, first), &x, &DegreeOptions::default());
            let el = start.elapsed();
            let ok = matches!(&r, Ok(c) if c.degree == expect && c.unanimous && c.sums.len() == 5)
                && el < Duration::from_secs(1);
            pass &= ok;
            notes.push(format!(
                "n={n} f{}={:?} in {:.0}ms",
                u8::from(!first),
                r.map(|c| c.degree),
                el.as_secs_f64() * 1e3
            ));
        }
    }
    outcome(pass, notes.join(", "))
}

/// Root of y^2 + y^4 = 1 with y = t/(1-t), by bisection on [0, 1).
fn t_star_oracle() -> f64 {
    let g = |t: f64| {
        let y = t / (1.0 - t);
        y * y + y.powi(4) - 1.0
    };
    let (mut a, mut b) = (0.0, 0.9);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if g(m) > 0.0 {
            b = m;
        } else {
            a = m;
        }
    }
    0.5 * (a + b)
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let x = make_hyperquadric(2).unwrap();
    let path = HomPath::straight(&drop_map(2, true), &drop_map(2, false)).unwrap();
    let r = verify_difference(&path, &x, &TrackOptions::default(), &DegreeOptions::default());
    let el = start.elapsed();
    let oracle = t_star_oracle();
    match r {
        Ok(v) => {
            let one = v.crossings.len() == 1;
            let t = v.crossings.first().map_or(f64::NAN, |c| c.t_star);
            let sign = v.crossings.first().and_then(|c| c.sign);
            let pass = one
                && (t - oracle).abs() < T_STAR_TOL
                && sign == Some(-1)
                && v.delta == -2
                && v.degree_end - v.degree_start == -2
                && el < Duration::from_secs(5);
            outcome(
                pass,
                format!(
                    "{} crossing(s), t*={t:.9} (oracle {oracle:.9}), sign {sign:?}, delta {}, degrees {} -> {}, {:.2}s",
                    v.crossings.len(),
                    v.delta,
                    v.degree_start,
                    v.degree_end,
                    el.as_secs_f64()
                ),
            )
        }
        Err(e) => outcome(false, format!("error: {e}")),
    }
}

/// Random map with a prescribed wall point at `p`.
fn map_through(x: &Submanifold, p: &ChartPoint, rng: &mut ChaCha8Rng) -> Matrix {
    let l = x.lift(p);
    let l = &l / l.norm();
    let m = gaussian(rng, x.dim() + 1, x.ambient_dim());
    &m - (&m * &l) * l.transpose()
}

/// Smaller of the relative rank margin of `f0` on `Y` and the Hadamard
/// ratio of the crossing matrix. Both vanish at degenerate crossings.
fn crossing_margin(f0: &ProjectionMap, fdot: &Matrix, x: &Submanifold, p: &ChartPoint) -> f64 {
    let frame = x.y_frame(p).unwrap();
    let sv = singular_values(&(f0.matrix() * frame.clone().qr().q()));
    let rank_margin = sv[x.dim() - 1] / f0.norm();
    let mut m = f0.matrix() * &frame;
    m.set_column(0, &(fdot * frame.column(0)));
    let scale: f64 = m.column_iter().map(|c| c.norm()).product();
    rank_margin.min(m.determinant().abs() / scale)
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x3);
    let mut checked = 0;
    let mut failures = Vec::new();
    let mut skipped = 0;
    let dopts = DegreeOptions::default();
    for n in [2, 3, 4] {
        let x = make_veronese(n).unwrap();
        let mut done = 0;
        while done < 40 {
            let chart = rng.random_range(0..x.n_charts());
            let p = x.random_in_chart(&mut rng, chart, 0.9);
            let f0 = ProjectionMap::new(map_through(&x, &p, &mut rng)).unwrap();
            let v = classify(&f0, &x, &locate_wall_point(&f0, &x, &WallOptions::default()).unwrap()).unwrap();
            if v.regular != Some(true) {
                skipped += 1;
                continue;
            }
            let fdot = gaussian(&mut rng, x.dim() + 1, x.ambient_dim());
            let Ok(s) = crossing_sign(&f0, &p, &fdot, &x) else {
                skipped += 1;
                continue;
            };
            if crossing_margin(&f0, &fdot, &x, &p) < CROSSING_MARGIN {
                skipped += 1;
                continue;
            }
            // smallest step for which both sides are certifiably off the wall
            let mut verdict = None;
            for eps in JUMP_EPS {
                let h = eps * f0.norm() / fdot.norm();
                let plus = ProjectionMap::new(f0.matrix() + &fdot * h).unwrap();
                let minus = ProjectionMap::new(f0.matrix() - &fdot * h).unwrap();
                match (degree(&plus, &x, &dopts), degree(&minus, &x, &dopts)) {
                    (Ok(a), Ok(b)) => {
                        verdict = Some(Ok((a.degree, b.degree)));
                        break;
                    }
                    (Err(Error::WallPoint), _) | (_, Err(Error::WallPoint)) => continue,
                    (a, b) => {
                        verdict = Some(Err(format!("{:?} / {:?}", a.err(), b.err())));
                        break;
                    }
                }
            }
            match verdict {
                Some(Ok((a, b))) if a - b == 2 * s as i64 => {}
                Some(Ok((a, b))) => failures.push(format!("n={n}: {a} - {b} vs sign {s}")),
                Some(Err(e)) => failures.push(format!("n={n}: {e}")),
                None => failures.push(format!("n={n}: no off-wall step")),
            }
            done += 1;
            checked += 1;
        }
    }
    let el = start.elapsed();
    let pass = failures.is_empty() && checked >= 100 && el < Duration::from_secs(120);
    outcome(
        pass,
        format!(
            "{checked} crossings, {} failures, {skipped} degenerate or ill-conditioned samples skipped, {:.1}s{}",
            failures.len(),
            el.as_secs_f64(),
            failures.first().map(|f| format!(", first: {f}")).unwrap_or_default()
        ),
    )
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x4);
    let mut pass = true;
    let mut notes = Vec::new();
    for n in 1..=4usize {
        let mut seen = BTreeSet::new();
        for _ in 0..200 {
            let pair = random_pair(n, &mut rng);
            match brockett_degree(&pair) {
                Ok(d) => {
                    pass &= d.abs() <= n as i64 && (d - n as i64).rem_euclid(2) == 0;
                    seen.insert(d);
                }
                Err(_) => pass = false,
            }
        }
        if n == 3 {
            let all: BTreeSet<i64> = [-3, -1, 1, 3].into();
            pass &= seen == all;
        }
        notes.push(format!("n={n} saw {seen:?}"));
    }
    for n in 1..=5usize {
        for u in 0..=n {
            let ok = generator(u, n - u)
                .and_then(|g| brockett_degree(&g))
                .is_ok_and(|d| d == u as i64 - (n - u) as i64);
            pass &= ok;
        }
    }
    let el = start.elapsed();
    pass &= el < Duration::from_secs(60);
    outcome(pass, format!("{}, generators n<=5 checked, {:.2}s", notes.join("; "), el.as_secs_f64()))
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5);
    let mut pass = true;
    let mut notes = Vec::new();
    for n in 1..=4usize {
        let mut rel = BTreeSet::new();
        let mut bad = 0;
        for _ in 0..200 {
            let pair = random_pair(n, &mut rng);
            let b = brockett_degree(&pair).unwrap();
            let (x, f) = as_central_projection(&pair).unwrap();
            match degree(&f, &x, &DegreeOptions::default()) {
                Ok(c) if c.degree.abs() == b.abs() => {
                    if b != 0 {
                        rel.insert(b.signum() * c.degree.signum());
                    }
                }
                _ => bad += 1,
            }
        }
        pass &= bad == 0 && rel.len() <= 1;
        notes.push(format!("n={n}: {bad} mismatches, relative sign {rel:?}"));
    }
    let el = start.elapsed();
    pass &= el < Duration::from_secs(180);
    outcome(pass, format!("{}, {:.1}s", notes.join("; "), el.as_secs_f64()))
}

/// Number of standard Young tableaux of the `q × p` rectangle.
fn hook_length_oracle(p: usize, q: usize) -> u128 {
    let cells: u128 = (1..=(p * q) as u128).product();
    let hooks: u128 = (0..q)
        .flat_map(|i| (0..p).map(move |j| ((p - j) + (q - i) - 1) as u128))
        .product();
    cells / hooks
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let mut pass = eg_count(2, 3).map(|v| v == 1u32.into()).unwrap_or(false)
        && eg_count(3, 3).map(|v| v == 0u32.into()).unwrap_or(false);
    let mut notes = vec![format!("eg(2,3)={:?} eg(3,3)={:?}", eg_count(2, 3).ok(), eg_count(3, 3).ok())];
    for (p, q) in [(1, 2), (2, 3)] {
        let oracle = hook_length_oracle(p, q) as i64;
        match wronski_real_degree(p, q, &DegreeOptions::default()) {
            Ok(r) => {
                let eg: i64 = r.eg_count.parse().unwrap();
                let ok = r.degree.abs() == eg && (r.degree - oracle).rem_euclid(2) == 0;
                pass &= ok;
                notes.push(format!("({p},{q}) degree {} eg {eg} complex {oracle}", r.degree));
            }
            Err(e) => {
                pass = false;
                notes.push(format!("({p},{q}) error {e}"));
            }
        }
    }
    pass &= hook_length_oracle(2, 3) == 5;
    let el = start.elapsed();
    pass &= el < Duration::from_secs(60);
    outcome(pass, format!("{}, {:.2}s", notes.join("; "), el.as_secs_f64()))
}

fn random_datum(p: usize, q: usize, rng: &mut ChaCha8Rng) -> QuotientDatum {
    loop {
        let entries = (0..p + q)
            .map(|_| {
                (0..p)
                    .map(|_| {
                        wallcross::poly::RatPoly::from_ints(&(0..=q).map(|_| rng.random_range(-4..=4)).collect::<Vec<i64>>())
                    })
                    .collect()
            })
            .collect();
        if let Ok(d) = QuotientDatum::new(q, vec![q; p], entries) {
            return d;
        }
    }
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x7);
    let mut worst = 0.0f64;
    let mut pass = true;
    for (p, q) in [(1, 1), (1, 2)] {
        for datum in [wronski_datum(p, q).unwrap(), random_datum(p, q, &mut rng)] {
            for _ in 0..100 {
                let u = Subspace::from_columns(&gaussian(&mut rng, p + q, q)).unwrap();
                match (pole_place(&datum, &u), qpl_image(&datum, &u)) {
                    (Ok(a), Ok(b)) => worst = worst.max(proj_dist(&a, &b)),
                    _ => pass = false,
                }
            }
        }
    }
    let el = start.elapsed();
    pass &= worst < DIAGRAM_TOL && el < Duration::from_secs(30);
    outcome(pass, format!("max projective defect {worst:.2e} over 400 subspaces, {:.2}s", el.as_secs_f64()))
}

fn criterion_8() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x8);
    let mut failures: Vec<String> = Vec::new();
    let manifolds = [make_hyperquadric(2).unwrap(), make_hyperquadric(3).unwrap(), make_veronese(3).unwrap(), make_plucker(1, 2).unwrap()];

    // target independence and functoriality
    for x in &manifolds {
        for _ in 0..6 {
            let f = ProjectionMap::new(gaussian(&mut rng, x.dim() + 1, x.ambient_dim())).unwrap();
            let base = match degree(&f, x, &DegreeOptions::default()) {
                Ok(c) => c.degree,
                Err(Error::WallPoint) => continue,
                Err(e) => {
                    failures.push(format!("degree: {e}"));
                    continue;
                }
            };
            let other = DegreeOptions {
                seed: rng.random(),
                ..DegreeOptions::default()
            };
            if degree(&f, x, &other).map(|c| c.degree).ok() != Some(base) {
                failures.push("target independence".into());
            }
            let phi = gaussian(&mut rng, x.dim() + 1, x.dim() + 1);
            let g = f.compose(&phi).unwrap();
            let expect = det_sign(&phi) as i64 * base;
            if degree(&g, x, &DegreeOptions::default()).map(|c| c.degree).ok() != Some(expect) {
                failures.push("functoriality".into());
            }
            // parity is constant across chambers: compare with a reference map
            let reference = match x.family() {
                Family::Hyperquadric { .. } => 2,
                Family::Veronese { n } => *n as i64,
                _ => 1,
            };
            if (base - reference).rem_euclid(2) != 0 {
                failures.push(format!("parity: {base} vs {reference}"));
            }
        }
    }

    // estimates on rational instances
    for n in 1..=4 {
        for _ in 0..25 {
            let pair = random_pair(n, &mut rng);
            let d = brockett_degree(&pair).unwrap();
            let masses: Vec<i64> = (-3..=4)
                .filter(|&w| w != 1)
                .map(|w| real_fibre_mass(&pair, &wallcross::poly::rat(w)).unwrap() as i64)
                .collect();
            if !estimates_check(d, &masses, n as i64).pass {
                failures.push(format!("estimates n={n}"));
            }
        }
    }

    // crossing-sign antisymmetry and positive homogeneity
    let x = make_veronese(3).unwrap();
    let mut signed = 0;
    while signed < 30 {
        let p = x.random_in_chart(&mut rng, 0, 0.9);
        let f0 = ProjectionMap::new(map_through(&x, &p, &mut rng)).unwrap();
        let fdot = gaussian(&mut rng, 2, 4);
        let Ok(s) = crossing_sign(&f0, &p, &fdot, &x) else { continue };
        let c: f64 = rng.random_range(0.1..10.0);
        if crossing_sign(&f0, &p, &(-&fdot), &x).ok() != Some(-s) {
            failures.push("antisymmetry".into());
        }
        if crossing_sign(&f0, &p, &(&fdot * c), &x).ok() != Some(s) {
            failures.push("homogeneity".into());
        }
        signed += 1;
    }

    // reversing a path negates the signed crossing sum
    let hq = make_hyperquadric(2).unwrap();
    for _ in 0..3 {
        let a = ProjectionMap::new(gaussian(&mut rng, 2, 3)).unwrap();
        let b = ProjectionMap::new(gaussian(&mut rng, 2, 3)).unwrap();
        let path = HomPath::straight(&a, &b).unwrap();
        let opts = TrackOptions::default();
        if let (Ok(f), Ok(r)) = (track(&path, &hq, &opts), track(&path.reversed(), &hq, &opts)) {
            if f.delta != -r.delta {
                failures.push("reversal".into());
            }
        }
    }

    let el = start.elapsed();
    let pass = failures.is_empty() && el < Duration::from_secs(120);
    outcome(
        pass,
        format!(
            "{} failures{}, {:.1}s",
            failures.len(),
            failures.first().map(|f| format!(" (first: {f})")).unwrap_or_default(),
            el.as_secs_f64()
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("hyperquadric degrees", criterion_1),
        ("hyperquadric wall crossing", criterion_2),
        ("jump property on Veronese curves", criterion_3),
        ("Brockett chambers", criterion_4),
        ("pipeline equivalence", criterion_5),
        ("Wronski degrees", criterion_6),
        ("pole placement diagram", criterion_7),
        ("property suite", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        if !o.pass {
            failed += 1;
        }
        println!("criterion {} {}: {} ({})", i + 1, if o.pass { "PASS" } else { "FAIL" }, name, o.detail);
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
