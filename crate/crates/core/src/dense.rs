//! Small dense helpers for diagnostics that need an explicit inverse.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::abs;
use crate::sparse::SparseMatrix;

/// Row-major square matrix.
pub(crate) struct Dense {
    n: usize,
    data: Vec<f64>,
}

impl Dense {
    pub(crate) fn from_sparse(a: &SparseMatrix) -> Self {
        let n = a.nrows();
        let mut data = vec![0.0; n * n];
        for (i, j, v) in a.entries() {
            data[i * n + j] = v;
        }
        Self { n, data }
    }

    /// Gauss–Jordan inverse with partial pivoting.
    pub(crate) fn inverse(&self) -> Result<Dense> {
        let n = self.n;
        let mut a = self.data.clone();
        let mut inv = vec![0.0; n * n];
        for i in 0..n {
            inv[i * n + i] = 1.0;
        }
        let scale = a.iter().fold(0.0f64, |m, &v| m.max(abs(v)));
        let tiny = scale * f64::EPSILON * n as f64;
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&p, &q| abs(a[p * n + col]).total_cmp(&abs(a[q * n + col])))
                .unwrap();
            if !(abs(a[pivot * n + col]) > tiny) {
                return Err(Error::SingularMatrix);
            }
            if pivot != col {
                for k in 0..n {
                    a.swap(col * n + k, pivot * n + k);
                    inv.swap(col * n + k, pivot * n + k);
                }
            }
            let p = a[col * n + col];
            for k in 0..n {
                a[col * n + k] /= p;
                inv[col * n + k] /= p;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a[r * n + col];
                if f == 0.0 {
                    continue;
                }
                for k in 0..n {
                    a[r * n + k] -= f * a[col * n + k];
                    inv[r * n + k] -= f * inv[col * n + k];
                }
            }
        }
        Ok(Dense { n, data: inv })
    }

    /// Maximum absolute column sum.
    pub(crate) fn norm1(&self) -> f64 {
        let n = self.n;
        (0..n)
            .map(|j| (0..n).map(|i| abs(self.data[i * n + j])).sum::<f64>())
            .fold(0.0, f64::max)
    }
}
