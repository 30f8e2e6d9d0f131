use std::f64::consts::PI;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::Atlas;
use crate::numeric::{Matrix, Vector};

/// `n = 2`: two angle charts centred at `θ = 0` and `θ = π`.
#[derive(Debug)]
pub(super) struct Circle;

const ARC: f64 = 0.75 * PI;

fn center(chart: usize) -> f64 {
    if chart == 0 {
        0.0
    } else {
        PI
    }
}

impl Atlas for Circle {
    fn ambient_dim(&self) -> usize {
        3
    }
    fn dim(&self) -> usize {
        1
    }
    fn n_charts(&self) -> usize {
        2
    }
    fn half_width(&self, _: usize) -> f64 {
        ARC
    }
    fn lift(&self, chart: usize, u: &[f64]) -> Vector {
        let t = center(chart) + u[0];
        Vector::from_vec(vec![1.0, t.cos(), t.sin()])
    }
    fn jacobian(&self, chart: usize, u: &[f64]) -> Matrix {
        let t = center(chart) + u[0];
        Matrix::from_column_slice(3, 1, &[0.0, -t.sin(), t.cos()])
    }
    fn locate(&self, chart: usize, v: &Vector) -> Option<Vec<f64>> {
        if v[0] == 0.0 {
            return None;
        }
        let (c, s) = (v[1] / v[0], v[2] / v[0]);
        let mut u = s.atan2(c) - center(chart);
        while u > PI {
            u -= 2.0 * PI;
        }
        while u <= -PI {
            u += 2.0 * PI;
        }
        Some(vec![u])
    }
    fn sample_point(&self, rng: &mut ChaCha8Rng, i: usize, count: usize) -> Vector {
        let r: f64 = rng.random();
        let t = 2.0 * PI * (i as f64 + r) / count.max(1) as f64;
        Vector::from_vec(vec![1.0, t.cos(), t.sin()])
    }
}

/// `n >= 3`: stereographic charts from the two poles `±e_n` of `S^(n-1)`,
/// with the polynomial lift `(1 + |u|^2, 2u, ±(1 - |u|^2))`.
#[derive(Debug)]
pub(super) struct Sphere {
    pub n: usize,
}

fn pole(chart: usize) -> f64 {
    if chart == 0 {
        1.0
    } else {
        -1.0
    }
}

impl Atlas for Sphere {
    fn ambient_dim(&self) -> usize {
        self.n + 1
    }
    fn dim(&self) -> usize {
        self.n - 1
    }
    fn n_charts(&self) -> usize {
        2
    }
    fn half_width(&self, _: usize) -> f64 {
        1.5
    }
    fn lift(&self, chart: usize, u: &[f64]) -> Vector {
        let r2: f64 = u.iter().map(|x| x * x).sum();
        let mut v = Vector::zeros(self.n + 1);
        v[0] = 1.0 + r2;
        for (i, x) in u.iter().enumerate() {
            v[i + 1] = 2.0 * x;
        }
        v[self.n] = pole(chart) * (1.0 - r2);
        v
    }
    fn jacobian(&self, chart: usize, u: &[f64]) -> Matrix {
        let m = self.n - 1;
        let mut j = Matrix::zeros(self.n + 1, m);
        for (k, x) in u.iter().enumerate() {
            j[(0, k)] = 2.0 * x;
            j[(k + 1, k)] = 2.0;
            j[(self.n, k)] = -2.0 * pole(chart) * x;
        }
        j
    }
    fn locate(&self, chart: usize, v: &Vector) -> Option<Vec<f64>> {
        if v[0] == 0.0 {
            return None;
        }
        let y: Vec<f64> = v.iter().skip(1).map(|x| x / v[0]).collect();
        let denom = 1.0 + pole(chart) * y[self.n - 1];
        if denom <= 1e-12 {
            return None;
        }
        Some(y[..self.n - 1].iter().map(|x| x / denom).collect())
    }
    fn sample_point(&self, rng: &mut ChaCha8Rng, _: usize, _: usize) -> Vector {
        let mut v = Vector::zeros(self.n + 1);
        v[0] = 1.0;
        let g: Vec<f64> = (0..self.n).map(|_| rng.sample(StandardNormal)).collect();
        let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-300);
        for (i, x) in g.iter().enumerate() {
            v[i + 1] = x / norm;
        }
        v
    }
}
