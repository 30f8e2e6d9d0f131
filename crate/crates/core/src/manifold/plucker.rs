use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::Atlas;
use crate::numeric::{Matrix, Vector};

pub(crate) fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn lex_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Sign of the permutation that sorts `seq` (entries distinct).
pub fn permutation_sign(seq: &[usize]) -> i32 {
    let mut inv = 0;
    for i in 0..seq.len() {
        for j in i + 1..seq.len() {
            if seq[i] > seq[j] {
                inv += 1;
            }
        }
    }
    if inv % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Grassmannian of `q`-planes in `R^(p+q)` in Plücker coordinates. The
/// chart for a `q`-subset `S` uses matrices with identity rows `S` and a
/// free `p x q` block `A` (row-major coordinates) in the remaining rows.
#[derive(Debug)]
pub(super) struct Plucker {
    p: usize,
    q: usize,
    subsets: Vec<Vec<usize>>,
    /// Rows outside each chart's identity block, increasing.
    free_rows: Vec<Vec<usize>>,
}

impl Plucker {
    pub fn new(p: usize, q: usize) -> Self {
        let subsets = lex_subsets(p + q, q);
        let free_rows = subsets
            .iter()
            .map(|s| (0..p + q).filter(|r| !s.contains(r)).collect())
            .collect();
        Self {
            p,
            q,
            subsets,
            free_rows,
        }
    }

    fn basis_matrix(&self, chart: usize, u: &[f64]) -> Matrix {
        let mut m = Matrix::zeros(self.p + self.q, self.q);
        for (j, &r) in self.subsets[chart].iter().enumerate() {
            m[(r, j)] = 1.0;
        }
        for (i, &r) in self.free_rows[chart].iter().enumerate() {
            for c in 0..self.q {
                m[(r, c)] = u[i * self.q + c];
            }
        }
        m
    }

    fn minor(m: &Matrix, rows: &[usize]) -> f64 {
        let k = rows.len();
        let sub = Matrix::from_fn(k, k, |i, j| m[(rows[i], j)]);
        sub.determinant()
    }
}

/// Plücker vector of the column span of a `(p+q) x q` matrix.
pub fn plucker_vector(m: &Matrix) -> Vector {
    let subsets = lex_subsets(m.nrows(), m.ncols());
    Vector::from_iterator(subsets.len(), subsets.iter().map(|s| Plucker::minor(m, s)))
}

/// Basis of the `q`-plane with Plücker vector `v` (lex order on `q`-subsets
/// of `0..n`), normalized to the identity on the largest coordinate.
pub fn plucker_basis(v: &Vector, n: usize, q: usize) -> Matrix {
    let subsets = lex_subsets(n, q);
    let (best, _) = v
        .iter()
        .enumerate()
        .fold((0, 0.0f64), |acc, (i, x)| if x.abs() > acc.1 { (i, x.abs()) } else { acc });
    let s = &subsets[best];
    let vs = v[best];
    let mut m = Matrix::zeros(n, q);
    for (c, &sc) in s.iter().enumerate() {
        m[(sc, c)] = 1.0;
        for i in (0..n).filter(|i| !s.contains(i)) {
            let mut rows: Vec<usize> = s.iter().copied().filter(|&r| r != sc).collect();
            rows.push(i);
            rows.sort_unstable();
            let pos = rows.iter().position(|&r| r == i).expect("inserted");
            let idx = subsets.binary_search(&rows).expect("q-subset");
            let sign = if (pos + c) % 2 == 0 { 1.0 } else { -1.0 };
            m[(i, c)] = sign * v[idx] / vs;
        }
    }
    m
}

impl Atlas for Plucker {
    fn ambient_dim(&self) -> usize {
        self.subsets.len()
    }
    fn dim(&self) -> usize {
        self.p * self.q
    }
    fn n_charts(&self) -> usize {
        self.subsets.len()
    }
    fn half_width(&self, _: usize) -> f64 {
        1.5
    }
    fn lift(&self, chart: usize, u: &[f64]) -> Vector {
        plucker_vector(&self.basis_matrix(chart, u))
    }
    fn jacobian(&self, chart: usize, u: &[f64]) -> Matrix {
        let m = self.basis_matrix(chart, u);
        let mut j = Matrix::zeros(self.subsets.len(), self.p * self.q);
        for (i, &r) in self.free_rows[chart].iter().enumerate() {
            for c in 0..self.q {
                let col = i * self.q + c;
                for (k, s) in self.subsets.iter().enumerate() {
                    let Some(pos) = s.iter().position(|&x| x == r) else { continue };
                    let sub = Matrix::from_fn(self.q, self.q, |a, b| {
                        if a == pos {
                            if b == c {
                                1.0
                            } else {
                                0.0
                            }
                        } else {
                            m[(s[a], b)]
                        }
                    });
                    j[(k, col)] = sub.determinant();
                }
            }
        }
        j
    }
    fn locate(&self, chart: usize, v: &Vector) -> Option<Vec<f64>> {
        let s = &self.subsets[chart];
        let vs = v[chart];
        if vs.abs() <= 1e-12 * v.norm() {
            return None;
        }
        let mut u = vec![0.0; self.p * self.q];
        for (i, &r) in self.free_rows[chart].iter().enumerate() {
            for c in 0..self.q {
                // rows S with S[c] replaced by r give the minor A[r, c]
                let mut l = s.clone();
                l[c] = r;
                let sign = permutation_sign(&l) as f64;
                l.sort_unstable();
                let idx = self.subsets.binary_search(&l).expect("subset is lexicographic");
                u[i * self.q + c] = sign * v[idx] / vs;
            }
        }
        Some(u)
    }
    fn sample_point(&self, rng: &mut ChaCha8Rng, _: usize, _: usize) -> Vector {
        let m = Matrix::from_fn(self.p + self.q, self.q, |_, _| rng.sample(StandardNormal));
        plucker_vector(&m)
    }
}
