//! Command-line front end. Every run writes one report (json or csv) and
//! exits with 0 on success, 1 on invalid input and 2 when the numerics could
//! not certify a result.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;
use serde_json::{json, Value};

use crate::degree::{degree, estimates_check, DegreeOptions, REGULAR_SV_MIN};
use crate::error::{Error, Result};
use crate::manifold::{make_custom, make_hyperquadric, make_plucker, make_veronese, parse_custom, parse_rational, Family, Submanifold};
use crate::numeric::{Matrix, ProjPoint, Subspace};
use crate::path::{chamber_degrees, track, verify_difference, HomPath, TrackOptions};
use crate::poly::RatPoly;
use crate::projection::{ProjectionMap, CENTER_TOL};
use crate::rational::{
    as_central_projection, brockett_degree, chamber_of, complex_degree, generator, random_pair, real_fibre_mass, RationalPair,
};
use crate::report::{Check, Report};
use crate::schubert::{
    complex_schubert_degree, diagram_defect, eg_count, qpl, subspace_solve, wronski_datum, wronski_operator,
    wronski_real_degree, QuotientDatum, DESK_SCALE_PQ,
};
use crate::wall::{classify, crossing_sign, locate_wall_point, WallOptions, AMBIGUOUS_FACTOR, TRANSVERSAL_TOL, WALL_DEDUP, WALL_TOL, Y_RANK_EPS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser, Serialize)]
#[command(name = "wallcross", version, about = "Degrees and wall crossings of real central projections")]
pub struct Cli {
    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Seed for every randomized step.
    #[arg(long, default_value_t = 0, global = true)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "name", rename_all = "lowercase")]
pub enum Command {
    /// Degree certificate of [f]_X.
    Degree {
        /// hyperquadric:<n>, veronese:<n>, plucker:<p>,<q> or custom:<file>
        #[arg(long)]
        manifold: String,
        /// Inline matrix such as "[[0,1,0],[0,0,1]]", @file, or f0/f1 on a hyperquadric.
        #[arg(long)]
        map: String,
        #[arg(long, default_value_t = 5)]
        targets: usize,
    },
    /// Locate and classify X ∩ P(ker f).
    Wall {
        #[arg(long)]
        manifold: String,
        #[arg(long)]
        map: String,
        /// Velocity for the crossing sign at a regular wall point.
        #[arg(long)]
        fdot: Option<String>,
    },
    /// Track the straight path between two maps through the wall.
    Track {
        #[arg(long)]
        manifold: String,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        /// Write degree-vs-t plot data as CSV.
        #[arg(long)]
        emit_plot: Option<PathBuf>,
    },
    /// Brockett degree of p/q, or a chamber scan over random pairs.
    Brockett {
        /// Coefficients of p from t^0 upward, leading 1 included.
        #[arg(long, allow_hyphen_values = true)]
        p: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        q: Option<String>,
        /// Degree for a random scan.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        /// Also compare with the Veronese projection degree.
        #[arg(long)]
        pipeline: bool,
    },
    /// Wronski operator, eg_count and the real degree.
    Wronski {
        #[arg(long)]
        p: usize,
        #[arg(long)]
        q: usize,
    },
    /// Pole placement diagram check for the Wronski quotient.
    Poleplace {
        #[arg(long)]
        p: usize,
        #[arg(long)]
        q: usize,
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
    /// Signed solutions of the real subspace problem.
    Subspace {
        #[arg(long)]
        p: usize,
        #[arg(long)]
        q: usize,
        /// Points "a:b;a:b;…" of P^1; random when omitted.
        #[arg(long)]
        points: Option<String>,
        /// wronski or random
        #[arg(long, default_value = "wronski")]
        gamma: String,
    },
}

/// Parses a manifold spec.
pub fn parse_manifold(spec: &str) -> Result<Submanifold> {
    let (kind, arg) = spec
        .split_once(':')
        .ok_or_else(|| Error::Parse(format!("manifold spec `{spec}` needs a family tag")))?;
    let int = |s: &str| -> Result<usize> {
        s.trim()
            .parse()
            .map_err(|_| Error::Parse(format!("`{s}` is not a non-negative integer")))
    };
    match kind {
        "hyperquadric" => make_hyperquadric(int(arg)?),
        "veronese" => make_veronese(int(arg)?),
        "plucker" => {
            let (p, q) = arg
                .split_once(',')
                .ok_or_else(|| Error::Parse("plucker spec is plucker:<p>,<q>".into()))?;
            make_plucker(int(p)?, int(q)?)
        }
        "custom" => make_custom(parse_custom(&std::fs::read_to_string(arg)?)?),
        _ => Err(Error::Parse(format!("unknown manifold family `{kind}`"))),
    }
}

/// Parses `[[a,b],[c,d]]` with rational or decimal entries.
pub fn parse_matrix(text: &str) -> Result<ProjectionMap> {
    let t = text.trim();
    let inner = t
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| Error::Parse("matrix must be wrapped in [ ]".into()))?;
    let mut rows = Vec::new();
    for part in inner.split(']') {
        let part = part.trim().trim_start_matches(',').trim();
        if part.is_empty() {
            continue;
        }
        let body = part
            .strip_prefix('[')
            .ok_or_else(|| Error::Parse(format!("bad matrix row `{part}`")))?;
        let row = body
            .split(',')
            .map(|e| parse_rational(e.trim()).map(|r| num_traits::ToPrimitive::to_f64(&r).unwrap_or(f64::NAN)))
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    ProjectionMap::from_rows(&rows)
}

/// Map spec: inline matrix, `@file`, or `f0` / `f1` on a hyperquadric
/// (drop the first or last coordinate).
pub fn parse_map(spec: &str, x: &Submanifold) -> Result<ProjectionMap> {
    match (spec, x.family()) {
        ("f0" | "f1", Family::Hyperquadric { n }) => {
            let n = *n;
            let off = usize::from(spec == "f0");
            ProjectionMap::new(Matrix::from_fn(n, n + 1, |i, j| if j == i + off { 1.0 } else { 0.0 }))
        }
        ("f0" | "f1", _) => Err(Error::InvalidInput("named maps f0/f1 exist only on hyperquadrics".into())),
        _ => match spec.strip_prefix('@') {
            Some(file) => parse_matrix(&std::fs::read_to_string(file)?),
            None => parse_matrix(spec),
        },
    }
}

fn parse_poly(spec: &str) -> Result<RatPoly> {
    spec.split(',')
        .map(|c| parse_rational(c.trim()))
        .collect::<Result<Vec<_>>>()
        .map(RatPoly::new)
}

fn parse_points(spec: &str) -> Result<Vec<ProjPoint>> {
    spec.split(';')
        .map(|s| {
            let (a, b) = s
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("point `{s}` is not a:b")))?;
            let num = |v: &str| {
                v.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Parse(format!("`{v}` is not a number")))
            };
            ProjPoint::new(&[num(a)?, num(b)?])
        })
        .collect()
}

fn tolerances() -> Value {
    json!({
        "wall_tol": WALL_TOL,
        "ambiguous_factor": AMBIGUOUS_FACTOR,
        "wall_dedup": WALL_DEDUP,
        "y_rank_eps": Y_RANK_EPS,
        "transversal_tol": TRANSVERSAL_TOL,
        "center_tol": CENTER_TOL,
        "regular_sv_min": REGULAR_SV_MIN,
        "newton_tol": DegreeOptions::default().fibre.newton_tol,
        "fibre_dedup": DegreeOptions::default().fibre.dedup_radius,
        "track_newton_tol": TrackOptions::default().newton_tol,
        "perturb_delta": TrackOptions::default().perturb_delta,
    })
}

fn degree_options(seed: u64) -> DegreeOptions {
    DegreeOptions {
        seed,
        ..DegreeOptions::default()
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report data serializes")
}

/// Runs one command and returns its report.
pub fn execute(cli: &Cli) -> Result<Report> {
    let mut report = Report::new(command_name(&cli.command), to_value(cli), tolerances());
    let seed = cli.seed;
    match &cli.command {
        Command::Degree { manifold, map, targets } => {
            let x = parse_manifold(manifold)?;
            let f = parse_map(map, &x)?;
            let opts = DegreeOptions {
                targets: *targets,
                ..degree_options(seed)
            };
            let cert = degree(&f, &x, &opts)?;
            report.degree = Some(cert.degree);
            report.checks.push(Check::new("unanimous", cert.unanimous, format!("sums {:?}", cert.sums)));
            report.certificate = Some(to_value(&cert));
        }
        Command::Wall { manifold, map, fdot } => {
            let x = parse_manifold(manifold)?;
            let f = parse_map(map, &x)?;
            let v = classify(&f, &x, &locate_wall_point(&f, &x, &WallOptions::default())?)?;
            let mut result = to_value(&v);
            if let (Some(fd), Some(xi), Some(true)) = (fdot, &v.xi, v.regular) {
                let fd = parse_map(fd, &x)?;
                let s = crossing_sign(&f, xi, fd.matrix(), &x)?;
                result["crossing_sign"] = json!(s);
            }
            report.result = Some(result);
        }
        Command::Track {
            manifold,
            from,
            to,
            emit_plot,
        } => {
            let x = parse_manifold(manifold)?;
            let path = HomPath::straight(&parse_map(from, &x)?, &parse_map(to, &x)?)?;
            let topts = TrackOptions {
                seed,
                ..TrackOptions::default()
            };
            let dopts = degree_options(seed);
            let vd = verify_difference(&path, &x, &topts, &dopts)?;
            report.delta = Some(vd.delta);
            report.crossings = Some(vd.crossings.iter().map(to_value).collect());
            report.checks.push(Check::new(
                "difference_formula",
                vd.pass,
                format!("deg(g1) - deg(g0) = {} - {}, crossings give {}", vd.degree_end, vd.degree_start, vd.delta),
            ));
            report.result = Some(json!({
                "degree_start": vd.degree_start,
                "degree_end": vd.degree_end,
                "perturbations": vd.perturbations,
            }));
            if let Some(plot) = emit_plot {
                let tracked = track(&path, &x, &topts)?;
                let pts = chamber_degrees(&tracked.path, &x, &tracked.crossings, &dopts)?;
                write_plot(plot, &pts)?;
            }
        }
        Command::Brockett { p, q, n, samples, pipeline } => brockett(&mut report, p, q, *n, *samples, *pipeline, seed)?,
        Command::Wronski { p, q } => {
            let (p, q) = (*p, *q);
            let w = wronski_operator(p, q)?;
            let eg = eg_count(p, q)?;
            let cd = complex_schubert_degree(p, q);
            let mut result = json!({
                "p": p, "q": q,
                "eg_count": eg.to_string(),
                "complex_degree": cd.to_string(),
                "operator": w.matrix,
            });
            if p * q <= DESK_SCALE_PQ {
                let r = wronski_real_degree(p, q, &degree_options(seed))?;
                report.degree = Some(r.degree);
                report.checks.extend(r.checks.iter().cloned());
                result["real_degree"] = json!(r.degree);
            } else {
                let parity = (&eg % 2u32) == (&cd % 2u32);
                report.checks.push(Check::new("parity_vs_complex", parity, format!("{eg} = {cd} mod 2")));
            }
            report.result = Some(result);
        }
        Command::Poleplace { p, q, samples } => {
            let s = wronski_datum(*p, *q)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let us = (0..*samples)
                .map(|_| {
                    let m = Matrix::from_fn(p + q, *q, |_, _| StandardNormal.sample(&mut rng));
                    Subspace::from_columns(&m)
                })
                .collect::<Result<Vec<_>>>()?;
            let defect = diagram_defect(&s, &us)?;
            let a = qpl(&s)?;
            let b = wronski_operator(*p, *q)?;
            let prop = crate::numeric::proj_dist(
                &crate::numeric::proj_normalize(&crate::numeric::Vector::from_column_slice(a.matrix().as_slice()))?,
                &crate::numeric::proj_normalize(&crate::numeric::Vector::from_column_slice(b.matrix.matrix().as_slice()))?,
            );
            report.checks.push(Check::new("diagram_commutes", defect < 1e-10, format!("max defect {defect:.3e}")));
            report.checks.push(Check::new("qpl_matches_wronski", prop < 1e-10, format!("distance {prop:.3e}")));
            report.result = Some(json!({ "defect": defect, "qpl": a, "samples": samples }));
        }
        Command::Subspace { p, q, points, gamma } => {
            let (p, q) = (*p, *q);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = match gamma.as_str() {
                "wronski" => wronski_datum(p, q)?,
                "random" => random_datum(p, q, &mut rng),
                other => return Err(Error::InvalidInput(format!("unknown gamma `{other}`"))),
            };
            let pts = match points {
                Some(s) => parse_points(s)?,
                None => (0..p * q)
                    .map(|_| ProjPoint::new(&[StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)]))
                    .collect::<Result<Vec<_>>>()?,
            };
            let r = subspace_solve(&g, &pts, &degree_options(seed))?;
            report.degree = Some(r.degree);
            report.checks.extend(r.checks.iter().cloned());
            report.result = Some(json!({ "points": pts, "solutions": r.solutions, "total": r.total }));
        }
    }
    Ok(report)
}

fn brockett(
    report: &mut Report,
    p: &Option<String>,
    q: &Option<String>,
    n: Option<usize>,
    samples: usize,
    pipeline: bool,
    seed: u64,
) -> Result<()> {
    let single = |pair: &RationalPair, report: &mut Report| -> Result<Value> {
        let d = brockett_degree(pair)?;
        let (u, v) = chamber_of(pair)?;
        let mut out = json!({ "pair": pair, "degree": d, "chamber": [u, v] });
        let masses: Vec<i64> = [-2i64, 0, 3]
            .iter()
            .map(|&w| real_fibre_mass(pair, &crate::poly::rat(w)).map(|m| m as i64))
            .collect::<Result<_>>()?;
        let est = estimates_check(d, &masses, complex_degree(pair));
        if pipeline {
            let (x, f) = as_central_projection(pair)?;
            let pd = degree(&f, &x, &degree_options(seed))?.degree;
            out["projection_degree"] = json!(pd);
            report
                .checks
                .push(Check::new("pipeline_abs_equal", pd.abs() == d.abs(), format!("|{pd}| = |{d}|")));
        }
        report.checks.push(Check::new("estimates", est.pass, format!("masses {masses:?}")));
        Ok(out)
    };
    match (p, q, n) {
        (Some(p), Some(q), _) => {
            let pair = RationalPair::new(parse_poly(p)?, parse_poly(q)?)?;
            let out = single(&pair, report)?;
            report.degree = out["degree"].as_i64();
            report.result = Some(out);
        }
        (None, None, Some(n)) => {
            if n == 0 {
                return Err(Error::InvalidInput("n must be positive".into()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut hist = std::collections::BTreeMap::<i64, usize>::new();
            let mut rel = std::collections::BTreeSet::new();
            for _ in 0..samples {
                let pair = random_pair(n, &mut rng);
                let d = brockett_degree(&pair)?;
                *hist.entry(d).or_default() += 1;
                if pipeline {
                    let (x, f) = as_central_projection(&pair)?;
                    let pd = degree(&f, &x, &degree_options(seed))?.degree;
                    if pd.abs() != d.abs() {
                        report.checks.push(Check::new("pipeline_abs_equal", false, format!("{pair:?}: {pd} vs {d}")));
                    }
                    if d != 0 {
                        rel.insert(d.signum() * pd.signum());
                    }
                }
            }
            let range_ok = hist.keys().all(|d| d.abs() <= n as i64 && (d - n as i64).rem_euclid(2) == 0);
            report.checks.push(Check::new("degree_range_and_parity", range_ok, format!("{hist:?}")));
            let gens = (0..=n).all(|u| {
                generator(u, n - u)
                    .and_then(|g| brockett_degree(&g))
                    .is_ok_and(|d| d == u as i64 - (n - u) as i64)
            });
            report.checks.push(Check::new("generators", gens, format!("g_uv with u + v = {n}")));
            if pipeline {
                report
                    .checks
                    .push(Check::new("pipeline_constant_sign", rel.len() <= 1, format!("relative signs {rel:?}")));
            }
            report.result = Some(json!({
                "n": n,
                "samples": samples,
                "histogram": hist.iter().map(|(d, c)| json!({"degree": d, "count": c})).collect::<Vec<_>>(),
            }));
        }
        _ => return Err(Error::InvalidInput("give either --p and --q, or --n".into())),
    }
    Ok(())
}

/// Random valid quotient datum with column degrees `q`.
pub fn random_datum(p: usize, q: usize, rng: &mut ChaCha8Rng) -> QuotientDatum {
    use rand::Rng;
    loop {
        let entries: Vec<Vec<RatPoly>> = (0..p + q)
            .map(|_| {
                (0..p)
                    .map(|_| RatPoly::from_ints(&(0..=q).map(|_| rng.random_range(-4..=4)).collect::<Vec<i64>>()))
                    .collect()
            })
            .collect();
        if let Ok(d) = QuotientDatum::new(q, vec![q; p], entries) {
            return d;
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Degree { .. } => "degree",
        Command::Wall { .. } => "wall",
        Command::Track { .. } => "track",
        Command::Brockett { .. } => "brockett",
        Command::Wronski { .. } => "wronski",
        Command::Poleplace { .. } => "poleplace",
        Command::Subspace { .. } => "subspace",
    }
}

fn write_plot(path: &Path, pts: &[(f64, i64)]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(["t", "degree"]).map_err(csv_err)?;
    for (t, d) in pts {
        w.write_record([format!("{t}"), d.to_string()]).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

/// Serializes a report in the requested format.
pub fn render(report: &Report, format: Format) -> Result<Vec<u8>> {
    match format {
        Format::Json => {
            let mut out = serde_json::to_vec_pretty(report).map_err(|e| Error::Io(e.into()))?;
            out.push(b'\n');
            Ok(out)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            if let Some(cs) = &report.crossings {
                w.write_record(["t", "chart", "coords", "sign", "regular", "transversal"]).map_err(csv_err)?;
                for c in cs {
                    let coords = c["xi_star"]["coords"]
                        .as_array()
                        .map(|a| a.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" "))
                        .unwrap_or_default();
                    w.write_record([
                        c["t_star"].to_string(),
                        c["xi_star"]["chart"].to_string(),
                        coords,
                        c["sign"].to_string(),
                        c["regular"].to_string(),
                        c["transversal"].to_string(),
                    ])
                    .map_err(csv_err)?;
                }
            } else {
                w.write_record(["name", "value"]).map_err(csv_err)?;
                w.write_record(["command", report.command.as_str()]).map_err(csv_err)?;
                if let Some(d) = report.degree {
                    w.write_record(["degree".to_string(), d.to_string()]).map_err(csv_err)?;
                }
                if let Some(d) = report.delta {
                    w.write_record(["delta".to_string(), d.to_string()]).map_err(csv_err)?;
                }
                for c in &report.checks {
                    w.write_record([format!("check:{}", c.name), c.pass.to_string()]).map_err(csv_err)?;
                }
            }
            w.into_inner().map_err(|e| Error::Io(std::io::Error::other(e.to_string())))
        }
    }
}

fn emit(bytes: &[u8], output: Option<&Path>) -> Result<()> {
    match output {
        Some(p) => std::fs::write(p, bytes)?,
        None => std::io::stdout().write_all(bytes)?,
    }
    Ok(())
}

/// Runs the CLI and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    if let Some(n) = std::env::var("WALLCROSS_THREADS").ok().and_then(|s| s.parse::<usize>().ok()) {
        // ignore the error when a pool already exists (repeated in-process runs)
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    match execute(&cli) {
        Ok(report) => {
            let code = if report.all_pass() { 0 } else { 2 };
            match render(&report, cli.format).and_then(|b| emit(&b, cli.output.as_deref())) {
                Ok(()) => code,
                Err(e) => {
                    eprintln!("error: {e}");
                    1
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_certification_failure() {
                2
            } else {
                1
            }
        }
    }
}
