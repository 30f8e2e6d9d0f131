//! Real rational functions `p/q` of degree `n` and their Brockett chambers.
//!
//! Degrees use the convention in which `g_{u,v}` has degree `u - v`: the
//! degree is minus the sum of `sign (p/q)'` over a regular fibre. Root counting
//! is exact (Sturm sequences over the rationals).

use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::manifold::{make_veronese, Submanifold};
use crate::numeric::Matrix;
use crate::poly::{rat, ratio, RatPoly};
use crate::projection::ProjectionMap;

/// Pair of monic degree-`n` polynomials without a common factor.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalPair {
    p: RatPoly,
    q: RatPoly,
}

impl RationalPair {
    pub fn new(p: RatPoly, q: RatPoly) -> Result<Self> {
        let n = p.degree().unwrap_or(0);
        if n == 0 || q.degree() != Some(n) {
            return Err(Error::InvalidInput("p and q must have the same positive degree".into()));
        }
        if !p.leading().is_one() || !q.leading().is_one() {
            return Err(Error::InvalidInput("p and q must be monic".into()));
        }
        if p.resultant(&q).is_zero() {
            return Err(Error::CommonFactor);
        }
        Ok(Self { p, q })
    }

    /// From the lower coefficients `a_0..a_{n-1}` and `b_0..b_{n-1}`.
    pub fn from_coeffs(a: &[BigRational], b: &[BigRational]) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::InvalidInput("coefficient lists differ in length".into()));
        }
        let mono = |c: &[BigRational]| {
            let mut v = c.to_vec();
            v.push(rat(1));
            RatPoly::new(v)
        };
        Self::new(mono(a), mono(b))
    }

    pub fn from_ints(a: &[i64], b: &[i64]) -> Result<Self> {
        let conv = |c: &[i64]| c.iter().map(|&x| rat(x)).collect::<Vec<_>>();
        Self::from_coeffs(&conv(a), &conv(b))
    }

    pub fn n(&self) -> usize {
        self.p.degree().expect("nonzero")
    }

    pub fn p(&self) -> &RatPoly {
        &self.p
    }

    pub fn q(&self) -> &RatPoly {
        &self.q
    }

    /// `p - w q`.
    pub fn level(&self, w: &BigRational) -> RatPoly {
        &self.p - &self.q.scale(w)
    }

    /// `w` is a regular value: not the value at infinity and `p - wq` has
    /// only simple roots.
    pub fn is_regular(&self, w: &BigRational) -> bool {
        !w.is_one() && self.level(w).is_squarefree()
    }

    /// Signed count over the fibre of `w`; requires a regular `w`.
    pub fn signed_count(&self, w: &BigRational) -> i64 {
        let h = self.level(w);
        // sign (p/q)' at a root of h is sign(q h')
        -RatPoly::tarski_query(&(&self.q * &h.derivative()), &h)
    }
}

/// Fixed sequence of candidate regular values: 0, -1, 2, -2, 1/2, 3, ...
fn candidate_values() -> impl Iterator<Item = BigRational> {
    (1i64..).flat_map(|k| {
        [
            ratio(k - 1, 1),
            ratio(-k, 1),
            ratio(1, k + 1),
            ratio(-1, k + 1),
            ratio(2 * k + 1, 2),
            ratio(-(2 * k + 1), 3),
        ]
    })
}

/// Brockett degree of `p/q`, certified by two regular values.
pub fn brockett_degree(pair: &RationalPair) -> Result<i64> {
    let mut values = candidate_values().filter(|w| pair.is_regular(w));
    let w1 = values.next().expect("regular values are dense");
    let w2 = values.next().expect("regular values are dense");
    let (d1, d2) = (pair.signed_count(&w1), pair.signed_count(&w2));
    if d1 != d2 {
        return Err(Error::RegularValueDisagreement(d1, d2));
    }
    Ok(d1)
}

/// `(u, v)` with `u + v = n` and `u - v = deg`.
pub fn chamber_of(pair: &RationalPair) -> Result<(usize, usize)> {
    let n = pair.n() as i64;
    let d = brockett_degree(pair)?;
    Ok((((n + d) / 2) as usize, ((n - d) / 2) as usize))
}

/// Clears denominators of `1 - Σ 1/(t+i) + Σ 1/(t-j)`.
pub fn generator(u: usize, v: usize) -> Result<RationalPair> {
    if u + v == 0 {
        return Err(Error::InvalidInput("generator needs u + v >= 1".into()));
    }
    let neg: Vec<RatPoly> = (1..=v as i64).map(|i| RatPoly::linear_root(rat(-i))).collect();
    let pos: Vec<RatPoly> = (1..=u as i64).map(|j| RatPoly::linear_root(rat(j))).collect();
    let all: Vec<&RatPoly> = neg.iter().chain(&pos).collect();
    let product_except = |skip: usize| {
        all.iter()
            .enumerate()
            .filter(|(k, _)| *k != skip)
            .fold(RatPoly::one(), |acc, (_, f)| &acc * f)
    };
    let q = product_except(usize::MAX);
    let mut p = q.clone();
    for k in 0..all.len() {
        let term = product_except(k);
        p = if k < v { &p - &term } else { &p + &term };
    }
    RationalPair::new(p, q)
}

/// The Veronese curve and the `2 × (n+1)` matrix whose rows are the
/// coefficients of `P`, `Q` in the order of the lift `(1, s, …, s^n)`,
/// i.e. leading coefficient first.
pub fn as_central_projection(pair: &RationalPair) -> Result<(Submanifold, ProjectionMap)> {
    let n = pair.n();
    let x = make_veronese(n)?;
    let row = |f: &RatPoly| -> Vec<f64> { (0..=n).map(|k| to_f64(&f.coeff(n - k))).collect() };
    let m = Matrix::from_fn(2, n + 1, |i, j| if i == 0 { row(&pair.p)[j] } else { row(&pair.q)[j] });
    Ok((x, ProjectionMap::new(m)?))
}

/// Degree of the complexification.
pub fn complex_degree(pair: &RationalPair) -> i64 {
    pair.n() as i64
}

/// Real roots of `p - wq` with multiplicity.
pub fn real_fibre_mass(pair: &RationalPair, w: &BigRational) -> Result<usize> {
    if w.is_one() {
        return Err(Error::InvalidInput("w = 1 is the value at infinity".into()));
    }
    Ok(pair.level(w).count_real_roots_with_multiplicity())
}

fn to_f64(x: &BigRational) -> f64 {
    num_traits::ToPrimitive::to_f64(x).unwrap_or(f64::NAN)
}

/// Random valid pair with small integer data. Half of the draws build `p`
/// and `q` from real integer roots so that extreme chambers are reached.
pub fn random_pair(n: usize, rng: &mut impl Rng) -> RationalPair {
    loop {
        let poly = |rng: &mut dyn rand::RngCore| -> RatPoly {
            if rng.random_bool(0.5) {
                (0..n).fold(RatPoly::one(), |acc, _| {
                    &acc * &RatPoly::linear_root(rat(rng.random_range(-6..=6)))
                })
            } else {
                let mut c: Vec<BigRational> = (0..n).map(|_| rat(rng.random_range(-5..=5))).collect();
                c.push(rat(1));
                RatPoly::new(c)
            }
        };
        let p = poly(rng);
        let q = poly(rng);
        if let Ok(pair) = RationalPair::new(p, q) {
            return pair;
        }
    }
}

impl Serialize for RationalPair {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            n: usize,
            p: Vec<String>,
            q: Vec<String>,
        }
        let c = |f: &RatPoly| f.coeffs().iter().map(|x| x.to_string()).collect();
        Repr {
            n: self.n(),
            p: c(&self.p),
            q: c(&self.q),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for RationalPair {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            p: Vec<String>,
            q: Vec<String>,
        }
        let r = Repr::deserialize(d)?;
        let parse = |v: &[String]| -> std::result::Result<RatPoly, D::Error> {
            v.iter()
                .map(|s| crate::manifold::parse_rational(s).map_err(serde::de::Error::custom))
                .collect::<std::result::Result<Vec<_>, _>>()
                .map(RatPoly::new)
        };
        RationalPair::new(parse(&r.p)?, parse(&r.q)?).map_err(serde::de::Error::custom)
    }
}
