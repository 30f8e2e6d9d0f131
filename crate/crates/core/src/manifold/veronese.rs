use std::f64::consts::PI;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::Atlas;
use crate::numeric::{Matrix, Vector};

/// Rational normal curve of degree `n`. Chart 0 is `(t0, t1) = (1, s)`,
/// chart 1 is `(t0, t1) = (s, 1)`.
#[derive(Debug)]
pub(super) struct Veronese {
    pub n: usize,
}

impl Veronese {
    fn homogeneous(&self, t0: f64, t1: f64) -> Vector {
        let n = self.n;
        Vector::from_fn(n + 1, |k, _| t0.powi((n - k) as i32) * t1.powi(k as i32))
    }
}

impl Atlas for Veronese {
    fn ambient_dim(&self) -> usize {
        self.n + 1
    }
    fn dim(&self) -> usize {
        1
    }
    fn n_charts(&self) -> usize {
        2
    }
    fn half_width(&self, _: usize) -> f64 {
        1.5
    }
    fn lift(&self, chart: usize, u: &[f64]) -> Vector {
        let s = u[0];
        if chart == 0 {
            self.homogeneous(1.0, s)
        } else {
            self.homogeneous(s, 1.0)
        }
    }
    fn jacobian(&self, chart: usize, u: &[f64]) -> Matrix {
        let (n, s) = (self.n, u[0]);
        // d/ds of s^k, placed at index k (chart 0) or n - k (chart 1)
        let mut col = Vector::zeros(n + 1);
        for k in 1..=n {
            let d = k as f64 * s.powi(k as i32 - 1);
            let idx = if chart == 0 { k } else { n - k };
            col[idx] = d;
        }
        Matrix::from_column_slice(n + 1, 1, col.as_slice())
    }
    fn locate(&self, chart: usize, v: &Vector) -> Option<Vec<f64>> {
        let n = self.n;
        let (num, den) = if chart == 0 { (v[1], v[0]) } else { (v[n - 1], v[n]) };
        if den.abs() <= 1e-14 * v.norm() {
            return None;
        }
        Some(vec![num / den])
    }
    fn sample_point(&self, rng: &mut ChaCha8Rng, i: usize, count: usize) -> Vector {
        let r: f64 = rng.random();
        let a = PI * (i as f64 + r) / count.max(1) as f64;
        self.homogeneous(a.cos(), a.sin())
    }
}
