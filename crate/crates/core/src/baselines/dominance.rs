//! Diagonal dominance, the sufficient condition for Jacobi and Gauss–Seidel.

use alloc::vec;
use alloc::vec::Vec;

use super::require_square;
use crate::error::Result;
use crate::math::abs;
use crate::sparse::SparseMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dominance {
    /// `|a_jj| > Σ_{i≠j} |a_ji|` on every row.
    StrictlyDominant,
    /// Weakly dominant, irreducible, and strict on at least one row.
    IrreduciblyDominant,
    /// `|a_jj| ≥ Σ_{i≠j} |a_ji|` on every row.
    WeaklyDominant,
    NotDominant,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DominanceClass {
    pub class: Dominance,
    /// Value symmetry within relative `1e-12`.
    pub symmetric: bool,
}

impl DominanceClass {
    /// Strict or irreducible dominance: Jacobi and Gauss–Seidel converge.
    pub fn guarantees_stationary(&self) -> bool {
        matches!(self.class, Dominance::StrictlyDominant | Dominance::IrreduciblyDominant)
    }
}

/// Strong connectivity of the off-diagonal sparsity digraph, by a forward and
/// a reverse search from vertex 0.
fn irreducible(a: &SparseMatrix) -> bool {
    let n = a.nrows();
    if n <= 1 {
        return true;
    }
    let rows = a.to_row_major();
    let reach_all = |forward: bool| {
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            let next: Vec<usize> = if forward {
                rows.row(u).map(|(j, _)| j).collect()
            } else {
                a.column(u).map(|(i, _)| i).collect()
            };
            for w in next {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.iter().all(|&s| s)
    };
    reach_all(true) && reach_all(false)
}

pub fn dominance_class(a: &SparseMatrix) -> Result<DominanceClass> {
    require_square(a)?;
    let n = a.nrows();
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n];
    for (i, j, v) in a.entries() {
        if i == j {
            diag[i] = abs(v);
        } else {
            off[i] += abs(v);
        }
    }
    let weak = (0..n).all(|i| diag[i] >= off[i]);
    let strict_rows = (0..n).filter(|&i| diag[i] > off[i]).count();
    let class = if !weak {
        Dominance::NotDominant
    } else if strict_rows == n {
        Dominance::StrictlyDominant
    } else if strict_rows > 0 && irreducible(a) {
        Dominance::IrreduciblyDominant
    } else {
        Dominance::WeaklyDominant
    };
    Ok(DominanceClass {
        class,
        symmetric: a.is_symmetric(1e-12),
    })
}
