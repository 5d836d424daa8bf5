//! Dense oracles and a small generator shared by the unit tests.

use std::vec;
use std::vec::Vec;

use crate::sparse::SparseMatrix;

/// SplitMix64.
pub(crate) struct Lcg(pub u64);

impl Lcg {
    pub(crate) fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    pub(crate) fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        let u = (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
        lo + (hi - lo) * u
    }
}

pub(crate) fn rand_matrix(rng: &mut Lcg, r: usize, c: usize, lo: f64, hi: f64) -> Vec<Vec<f64>> {
    (0..r).map(|_| (0..c).map(|_| rng.uniform(lo, hi)).collect()).collect()
}

pub(crate) fn from_dense(a: &[Vec<f64>]) -> SparseMatrix {
    let mut t = Vec::new();
    for (i, row) in a.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            t.push((i, j, v));
        }
    }
    SparseMatrix::from_triplets(a.len(), a[0].len(), &t).unwrap()
}

/// Gaussian elimination with partial pivoting.
pub(crate) fn dense_solve(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .zip(b)
        .map(|(r, &bi)| {
            let mut r = r.clone();
            r.push(bi);
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| m[i][c].abs().total_cmp(&m[j][c].abs()))?;
        if m[p][c] == 0.0 {
            return None;
        }
        m.swap(c, p);
        for r in c + 1..n {
            let f = m[r][c] / m[c][c];
            for k in c..=n {
                m[r][k] -= f * m[c][k];
            }
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        x[i] = (m[i][n] - (i + 1..n).map(|k| m[i][k] * x[k]).sum::<f64>()) / m[i][i];
    }
    Some(x)
}
