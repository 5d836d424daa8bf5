//! Reproducible random problem instances.
//!
//! Every generator draws from `Xoshiro256PlusPlus` seeded through
//! `seed_from_u64`, which expands the 64-bit seed with SplitMix64. The stream is
//! fixed across platforms, so an instance is a pure function of its parameters
//! and seed.

use nna_core::{DenseVector, SparseMatrix};
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::error::{IoError, Result};

pub type Rng64 = Xoshiro256PlusPlus;

pub fn rng(seed: u64) -> Rng64 {
    Xoshiro256PlusPlus::seed_from_u64(seed)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemInstance {
    pub a: SparseMatrix,
    pub b: DenseVector,
    /// Known solution, when `b` was synthesised from one.
    pub x_star: Option<DenseVector>,
    pub seed: u64,
    pub descriptor: String,
}

/// `x*` with entries `U[0.5, 1.5]`.
pub fn uniform_solution(rng: &mut Rng64, n: usize) -> DenseVector {
    DenseVector::new((0..n).map(|_| rng.random_range(0.5..1.5)).collect()).expect("finite draws")
}

/// `m × m` with every entry `U[0,1]` and `b` entries `U[0,1]`; no known solution.
pub fn gen_dense_uniform(m: usize, seed: u64) -> ProblemInstance {
    let mut rng = rng(seed);
    let mut triplets = Vec::with_capacity(m * m);
    for i in 0..m {
        for j in 0..m {
            triplets.push((i, j, rng.random::<f64>()));
        }
    }
    let a = SparseMatrix::from_triplets(m, m, &triplets).expect("in-range finite triplets");
    let b = DenseVector::new((0..m).map(|_| rng.random::<f64>()).collect()).expect("finite draws");
    ProblemInstance {
        a,
        b,
        x_star: None,
        seed,
        descriptor: format!("dense-uniform:m={m} seed={seed} a_ij~U[0,1] b_i~U[0,1]"),
    }
}

/// Sparse `m × m`: diagonal `U[0, diag_hi]`, `offdiag_nnz` off-diagonal
/// positions drawn without replacement with values `U[0,1]`, and `b = A x*` for
/// `x* ~ U[0.5, 1.5]`.
pub fn gen_sparse_random(m: usize, offdiag_nnz: usize, diag_hi: f64, seed: u64) -> Result<ProblemInstance> {
    let slots = m * m.saturating_sub(1);
    if offdiag_nnz > slots {
        return Err(IoError::TooManyNonzeros {
            requested: offdiag_nnz,
            max: slots,
        });
    }
    let mut rng = rng(seed);
    let mut triplets = Vec::with_capacity(m + offdiag_nnz);
    for i in 0..m {
        triplets.push((i, i, rng.random::<f64>() * diag_hi));
    }
    let mut picks = index::sample(&mut rng, slots, offdiag_nnz).into_vec();
    picks.sort_unstable();
    for p in picks {
        // Row i owns slots [i(m−1), (i+1)(m−1)); skip the diagonal column.
        let (i, k) = (p / (m - 1), p % (m - 1));
        let j = if k >= i { k + 1 } else { k };
        triplets.push((i, j, rng.random::<f64>()));
    }
    let a = SparseMatrix::from_triplets(m, m, &triplets)?;
    let x_star = uniform_solution(&mut rng, m);
    let b = a.spmv(&x_star)?;
    Ok(ProblemInstance {
        a,
        b,
        x_star: Some(x_star),
        seed,
        descriptor: format!(
            "sparse-random:m={m},offdiag={offdiag_nnz},diag-hi={diag_hi} seed={seed} b=A*x_star x_star~U[0.5,1.5] (b synthesised)"
        ),
    })
}
