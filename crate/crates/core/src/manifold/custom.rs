//! User-described manifolds with polynomial chart lifts.
//!
//! File layout, one directive per line (`#` starts a comment):
//!
//! ```text
//! ambient 3
//! dim 1
//! orientable true
//! chart 1.5
//! 1
//! u0
//! u0^2
//! chart 1.5
//! u0^2
//! u0
//! 1
//! ```
//!
//! Each `chart <half-width>` is followed by `ambient` polynomial lines in the
//! chart variables `u0, u1, …`, with exact rational coefficients such as
//! `3/4*u0^2*u1 - 2`.

use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::Atlas;
use crate::error::{Error, Result};
use crate::numeric::{proj_normalize, Matrix, Vector};

#[derive(Debug, Clone, PartialEq)]
struct Term {
    coeff: f64,
    exps: Vec<u32>,
}

/// Multivariate polynomial; coefficients are parsed exactly, then evaluated
/// in floating point.
#[derive(Debug, Clone, PartialEq)]
pub struct MPoly {
    terms: Vec<Term>,
}

impl MPoly {
    fn eval(&self, u: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|t| t.coeff * t.exps.iter().zip(u).map(|(&e, x)| x.powi(e as i32)).product::<f64>())
            .sum()
    }

    fn partial(&self, u: &[f64], k: usize) -> f64 {
        self.terms
            .iter()
            .filter(|t| t.exps[k] > 0)
            .map(|t| {
                let mut v = t.coeff * t.exps[k] as f64;
                for (i, (&e, x)) in t.exps.iter().zip(u).enumerate() {
                    let e = if i == k { e - 1 } else { e };
                    v *= x.powi(e as i32);
                }
                v
            })
            .sum()
    }
}

#[derive(Debug, Clone)]
struct CustomChart {
    half_width: f64,
    lift: Vec<MPoly>,
}

#[derive(Debug, Clone)]
pub struct CustomAtlas {
    ambient: usize,
    dim: usize,
    orientable: Option<bool>,
    charts: Vec<CustomChart>,
}

impl CustomAtlas {
    pub fn declared_orientable(&self) -> Option<bool> {
        self.orientable
    }

    pub(super) fn validate(&self) -> Result<()> {
        if self.dim == 0 || self.ambient < self.dim + 1 {
            return Err(Error::InvalidInput(format!(
                "custom manifold needs dim >= 1 and ambient >= dim + 1, got ambient {} dim {}",
                self.ambient, self.dim
            )));
        }
        if self.charts.is_empty() {
            return Err(Error::InvalidInput("custom manifold has no charts".into()));
        }
        for (i, c) in self.charts.iter().enumerate() {
            if c.lift.len() != self.ambient {
                return Err(Error::InvalidInput(format!(
                    "chart {i} lists {} coordinates, expected {}",
                    c.lift.len(),
                    self.ambient
                )));
            }
            if !(c.half_width > 0.0) {
                return Err(Error::InvalidInput(format!("chart {i} has non-positive half-width")));
            }
        }
        Ok(())
    }
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
        let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (int, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    let neg = int.starts_with('-');
    let int = int.trim_start_matches(['-', '+']);
    if int.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int}{frac}");
    let n = BigInt::from_str(if digits.is_empty() { "0" } else { &digits }).map_err(|_| bad())?;
    let scale = exp - frac.len() as i32;
    let ten = BigInt::from(10);
    let mut r = BigRational::from_integer(n);
    if scale >= 0 {
        r *= BigRational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        r /= BigRational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Ok(if neg { -r } else { r })
}

fn parse_term(src: &str, nvars: usize) -> Result<Term> {
    let mut coeff = BigRational::from_integer(BigInt::from(1));
    let mut exps = vec![0u32; nvars];
    for factor in src.split('*').map(str::trim) {
        if factor.is_empty() {
            return Err(Error::Parse(format!("empty factor in term {src:?}")));
        }
        if let Some(rest) = factor.strip_prefix('u') {
            let (var, e) = rest.split_once('^').unwrap_or((rest, "1"));
            let var: usize = var
                .parse()
                .map_err(|_| Error::Parse(format!("bad variable in {factor:?}")))?;
            let e: u32 = e
                .parse()
                .map_err(|_| Error::Parse(format!("bad exponent in {factor:?}")))?;
            if var >= nvars {
                return Err(Error::Parse(format!("variable u{var} exceeds dim {nvars}")));
            }
            exps[var] += e;
        } else {
            coeff *= parse_rational(factor)?;
        }
    }
    Ok(Term {
        coeff: coeff.to_f64().unwrap_or(f64::NAN),
        exps,
    })
}

pub fn parse_mpoly(src: &str, nvars: usize) -> Result<MPoly> {
    let mut terms = Vec::new();
    let s: String = src.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(Error::Parse("empty polynomial".into()));
    }
    // split on + and - that are not part of an exponent or a number exponent
    let mut start = 0;
    let bytes = s.as_bytes();
    let mut pieces = Vec::new();
    for i in 1..bytes.len() {
        let c = bytes[i];
        let prev = bytes[i - 1];
        if (c == b'+' || c == b'-') && prev != b'^' && prev != b'e' && prev != b'E' && prev != b'*' {
            pieces.push(&s[start..i]);
            start = i;
        }
    }
    pieces.push(&s[start..]);
    for p in pieces {
        let (neg, body) = match p.as_bytes()[0] {
            b'+' => (false, &p[1..]),
            b'-' => (true, &p[1..]),
            _ => (false, p),
        };
        let mut t = parse_term(body, nvars)?;
        if neg {
            t.coeff = -t.coeff;
        }
        terms.push(t);
    }
    Ok(MPoly { terms })
}

/// Parses the custom manifold file format described in the module docs.
pub fn parse_custom(text: &str) -> Result<CustomAtlas> {
    let mut ambient = None;
    let mut dim = None;
    let mut orientable = None;
    let mut charts: Vec<(f64, Vec<String>)> = Vec::new();
    for raw in text.lines() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut words = line.splitn(2, char::is_whitespace);
        let head = words.next().unwrap_or("");
        let rest = words.next().unwrap_or("").trim();
        match head {
            "ambient" => ambient = Some(rest.parse::<usize>().map_err(|_| Error::Parse(format!("bad ambient: {rest}")))?),
            "dim" => dim = Some(rest.parse::<usize>().map_err(|_| Error::Parse(format!("bad dim: {rest}")))?),
            "orientable" => {
                orientable = Some(match rest {
                    "true" => true,
                    "false" => false,
                    _ => return Err(Error::Parse(format!("orientable must be true or false, got {rest}"))),
                })
            }
            "chart" => {
                let w = if rest.is_empty() {
                    1.5
                } else {
                    rest.parse::<f64>().map_err(|_| Error::Parse(format!("bad chart half-width: {rest}")))?
                };
                charts.push((w, Vec::new()));
            }
            _ => match charts.last_mut() {
                Some((_, lines)) => lines.push(line.to_string()),
                None => return Err(Error::Parse(format!("polynomial before any chart: {line}"))),
            },
        }
    }
    let ambient = ambient.ok_or_else(|| Error::Parse("missing 'ambient'".into()))?;
    let dim = dim.ok_or_else(|| Error::Parse("missing 'dim'".into()))?;
    let charts = charts
        .into_iter()
        .map(|(w, lines)| {
            Ok(CustomChart {
                half_width: w,
                lift: lines.iter().map(|l| parse_mpoly(l, dim)).collect::<Result<_>>()?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let atlas = CustomAtlas {
        ambient,
        dim,
        orientable,
        charts,
    };
    atlas.validate()?;
    Ok(atlas)
}

impl CustomAtlas {
    /// Levenberg–Marquardt fit of the chart lift to the line through `v`.
    fn fit(&self, chart: usize, target: &Vector, start: Vec<f64>) -> Option<Vec<f64>> {
        let mut u = start;
        let mut lambda = 1e-3;
        let resid = |u: &[f64]| -> Option<(Vector, f64)> {
            let l = self.lift(chart, u);
            let n = l.norm();
            if n == 0.0 {
                return None;
            }
            let r = &l / n - target * (target.dot(&l) / n);
            let e = r.norm();
            Some((r, e))
        };
        let (mut r, mut e) = resid(&u)?;
        for _ in 0..100 {
            if e < 1e-14 {
                break;
            }
            // numerical jacobian of the residual
            let h = 1e-7;
            let mut jac = Matrix::zeros(target.len(), self.dim);
            for k in 0..self.dim {
                let mut up = u.clone();
                up[k] += h;
                let (rp, _) = resid(&up)?;
                jac.set_column(k, &((rp - &r) / h));
            }
            let jt = jac.transpose();
            let mut a = &jt * &jac;
            for k in 0..self.dim {
                a[(k, k)] += lambda * (1.0 + a[(k, k)]);
            }
            let step = a.lu().solve(&(-(&jt * &r)))?;
            let cand: Vec<f64> = u.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
            match resid(&cand) {
                Some((rc, ec)) if ec < e => {
                    u = cand;
                    r = rc;
                    e = ec;
                    lambda = (lambda * 0.3).max(1e-12);
                }
                _ => {
                    lambda *= 10.0;
                    if lambda > 1e8 {
                        break;
                    }
                }
            }
        }
        (e < 1e-10).then_some(u)
    }
}

impl Atlas for CustomAtlas {
    fn ambient_dim(&self) -> usize {
        self.ambient
    }
    fn dim(&self) -> usize {
        self.dim
    }
    fn n_charts(&self) -> usize {
        self.charts.len()
    }
    fn half_width(&self, chart: usize) -> f64 {
        self.charts[chart].half_width
    }
    fn lift(&self, chart: usize, u: &[f64]) -> Vector {
        Vector::from_iterator(self.ambient, self.charts[chart].lift.iter().map(|p| p.eval(u)))
    }
    fn jacobian(&self, chart: usize, u: &[f64]) -> Matrix {
        let lift = &self.charts[chart].lift;
        Matrix::from_fn(self.ambient, self.dim, |i, k| lift[i].partial(u, k))
    }
    fn locate(&self, chart: usize, v: &Vector) -> Option<Vec<f64>> {
        let target = proj_normalize(v).ok()?.rep();
        let w = self.half_width(chart);
        let mut starts = vec![vec![0.0; self.dim]];
        // a fixed lattice of extra starts inside the box
        for k in 1..=8u32 {
            starts.push(
                (0..self.dim)
                    .map(|i| {
                        let x = ((k as f64) * (0.618_033_988_75 + 0.414_213_562 * i as f64)).fract();
                        (2.0 * x - 1.0) * 0.9 * w
                    })
                    .collect(),
            );
        }
        starts
            .into_iter()
            .filter_map(|s| self.fit(chart, &target, s))
            .find(|u| u.iter().all(|x| x.abs() < w))
    }
    fn sample_point(&self, rng: &mut ChaCha8Rng, _: usize, _: usize) -> Vector {
        let c = rng.random_range(0..self.charts.len());
        let w = 0.9 * self.half_width(c);
        let u: Vec<f64> = (0..self.dim).map(|_| rng.random_range(-w..w)).collect();
        self.lift(c, &u)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const CONIC: &str = "ambient 3\ndim 1\norientable true\nchart 1.5\n1\nu0\nu0^2\nchart 1.5\nu0^2\nu0\n1\n";

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("3/4").unwrap(), BigRational::new(3.into(), 4.into()));
        assert_eq!(parse_rational("-1.25").unwrap(), BigRational::new((-5).into(), 4.into()));
        assert_eq!(parse_rational("2e2").unwrap(), BigRational::from_integer(200.into()));
        assert!(parse_rational("x").is_err());
        assert!(parse_rational("1/0").is_err());
    }

    #[test]
    fn polynomials() {
        let p = parse_mpoly("3/4*u0^2*u1 - 2 + u1", 2).unwrap();
        assert!((p.eval(&[2.0, 3.0]) - (9.0 - 2.0 + 3.0)).abs() < 1e-12);
        assert!((p.partial(&[2.0, 3.0], 0) - 9.0).abs() < 1e-12);
        assert!(parse_mpoly("u2", 2).is_err());
    }

    #[test]
    fn conic_file_round_trip() {
        let a = parse_custom(CONIC).unwrap();
        assert_eq!((a.ambient, a.dim, a.charts.len()), (3, 1, 2));
        let v = a.lift(0, &[0.5]);
        let u = a.locate(0, &v).unwrap();
        assert!((u[0] - 0.5).abs() < 1e-8);
        // s = 2 in the second chart, outside its box
        assert!(a.locate(1, &v).is_none());
    }

    #[test]
    fn malformed_files() {
        assert!(parse_custom("dim 1\nchart\n1\nu0\n").is_err());
        assert!(parse_custom("ambient 3\ndim 1\nchart\n1\nu0\n").is_err());
        assert!(parse_custom("ambient 3\ndim 1\n1\n").is_err());
    }
}
