//! Test-side references: dense linear algebra through nalgebra, and divergences
//! and rescaling written out directly from their definitions.
#![allow(dead_code, clippy::needless_range_loop)]

use nalgebra::{DMatrix, DVector};
use nna_core::SparseMatrix;
use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

pub type Gen = Xoshiro256PlusPlus;

pub fn rng(seed: u64) -> Gen {
    Gen::seed_from_u64(seed)
}

pub fn uniform(g: &mut Gen, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|_| g.random_range(lo..hi)).collect()
}

pub fn uniform_matrix(g: &mut Gen, r: usize, c: usize, lo: f64, hi: f64) -> DMatrix<f64> {
    DMatrix::from_fn(r, c, |_, _| g.random_range(lo..hi))
}

pub fn sparse(a: &DMatrix<f64>) -> SparseMatrix {
    let mut t = Vec::new();
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            if a[(i, j)] != 0.0 {
                t.push((i, j, a[(i, j)]));
            }
        }
    }
    SparseMatrix::from_triplets(a.nrows(), a.ncols(), &t).unwrap()
}

pub fn dense(a: &SparseMatrix) -> DMatrix<f64> {
    let mut d = DMatrix::zeros(a.nrows(), a.ncols());
    for (i, j, v) in a.entries() {
        d[(i, j)] = v;
    }
    d
}

pub fn mul(a: &DMatrix<f64>, x: &[f64]) -> Vec<f64> {
    (a * DVector::from_column_slice(x)).as_slice().to_vec()
}

pub fn solve(a: &DMatrix<f64>, b: &[f64]) -> Option<Vec<f64>> {
    a.clone()
        .lu()
        .solve(&DVector::from_column_slice(b))
        .map(|x| x.as_slice().to_vec())
}

pub fn linf(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max)
}

pub fn l2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt()
}

pub fn residual(a: &DMatrix<f64>, x: &[f64], b: &[f64]) -> f64 {
    l2(&mul(a, x), b)
}

/// `Σ u log(u/v)`, with `0 log 0 = 0`.
pub fn kl(u: &[f64], v: &[f64]) -> f64 {
    u.iter()
        .zip(v)
        .filter(|(p, _)| **p > 0.0)
        .map(|(p, q)| if *q == 0.0 { f64::INFINITY } else { p * (p / q).ln() })
        .sum()
}

/// `Σ u log(u/v) − u + v`, summed so each term stays accurate near `u = v`.
/// Equal to [`kl`] for vectors of the same mass.
pub fn kl_fine(u: &[f64], v: &[f64]) -> f64 {
    u.iter()
        .zip(v)
        .map(|(p, q)| {
            if *p == 0.0 {
                *q
            } else if *q == 0.0 {
                f64::INFINITY
            } else {
                let r = (q - p) / p;
                p * (r - r.ln_1p())
            }
        })
        .sum()
}

/// Column-stochastic form of a nonnegative system.
pub struct Rescaled {
    pub a: DMatrix<f64>,
    pub b: Vec<f64>,
    pub col_sums: Vec<f64>,
    pub total: f64,
}

impl Rescaled {
    pub fn new(a: &DMatrix<f64>, b: &[f64]) -> Self {
        let col_sums: Vec<f64> = (0..a.ncols()).map(|j| a.column(j).sum()).collect();
        let total: f64 = b.iter().sum();
        let mut at = a.clone();
        for j in 0..a.ncols() {
            at.column_mut(j).scale_mut(1.0 / col_sums[j]);
        }
        Self {
            a: at,
            b: b.iter().map(|v| v / total).collect(),
            col_sums,
            total,
        }
    }

    pub fn tilde(&self, x: &[f64]) -> Vec<f64> {
        x.iter().zip(&self.col_sums).map(|(x, s)| x * s / self.total).collect()
    }

    pub fn image(&self, xt: &[f64]) -> Vec<f64> {
        mul(&self.a, xt)
    }
}

pub fn simplex(g: &mut Gen, n: usize) -> Vec<f64> {
    let v = uniform(g, n, 0.05, 1.0);
    let s: f64 = v.iter().sum();
    v.into_iter().map(|x| x / s).collect()
}
