use std::collections::HashMap;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use super::program::SparseMatrix;
use super::ConicError;

/// Cached factorization of `A A^T`.
///
/// Rows that share no column are independent, so the matrix is split into
/// connected components and each one is factored on its own. Singleton
/// components reduce to a division.
#[derive(Clone, Debug)]
pub struct NormalFactor {
    groups: Vec<Group>,
    nrows: usize,
}

#[derive(Clone, Debug)]
enum Group {
    Scalar { row: usize, inv: f64 },
    Dense { rows: Vec<usize>, chol: Cholesky<f64, Dyn> },
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, mut i: usize) -> usize {
        while self.0[i] != i {
            self.0[i] = self.0[self.0[i]];
            i = self.0[i];
        }
        i
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

impl NormalFactor {
    pub fn new(a: &SparseMatrix) -> Result<Self, ConicError> {
        let m = a.nrows();
        let columns = a.columns();
        let mut uf = UnionFind((0..m).collect());
        for col in &columns {
            for w in col.windows(2) {
                uf.union(w[0].0, w[1].0);
            }
        }
        let mut members: HashMap<usize, Vec<usize>> = HashMap::new();
        for r in 0..m {
            let root = uf.find(r);
            members.entry(root).or_default().push(r);
        }
        let mut roots: Vec<usize> = members.keys().copied().collect();
        roots.sort_unstable();

        let mut groups = Vec::with_capacity(roots.len());
        for root in roots {
            let rows = members.remove(&root).unwrap();
            if rows.len() == 1 {
                let r = rows[0];
                let norm2: f64 = a.row(r).1.iter().map(|v| v * v).sum();
                if norm2 <= 0.0 {
                    return Err(ConicError::Invalid(format!("constraint row {r} is empty")));
                }
                groups.push(Group::Scalar { row: r, inv: 1.0 / norm2 });
                continue;
            }
            let local: HashMap<usize, usize> = rows.iter().enumerate().map(|(k, &r)| (r, k)).collect();
            let k = rows.len();
            let mut gram = DMatrix::<f64>::zeros(k, k);
            let mut seen_cols = Vec::new();
            for &r in &rows {
                seen_cols.extend_from_slice(a.row(r).0);
            }
            seen_cols.sort_unstable();
            seen_cols.dedup();
            for &c in &seen_cols {
                let col = &columns[c];
                for &(ri, vi) in col {
                    let li = local[&ri];
                    for &(rj, vj) in col {
                        gram[(li, local[&rj])] += vi * vj;
                    }
                }
            }
            let scale = (0..k).map(|i| gram[(i, i)]).fold(0.0, f64::max);
            let chol = factor_with_shift(gram, scale)
                .ok_or_else(|| ConicError::Numerical("normal equations could not be factored".into()))?;
            groups.push(Group::Dense { rows, chol });
        }
        Ok(Self { groups, nrows: m })
    }

    /// Number of independent row groups.
    pub fn num_groups(&self) -> usize {
        self.groups.len()
    }

    /// Overwrites `r` with `(A A^T)^{-1} r`.
    pub fn solve_in_place(&self, r: &mut [f64]) {
        debug_assert_eq!(r.len(), self.nrows);
        for g in &self.groups {
            match g {
                Group::Scalar { row, inv } => r[*row] *= inv,
                Group::Dense { rows, chol } => {
                    let rhs = DVector::from_iterator(rows.len(), rows.iter().map(|&i| r[i]));
                    let sol = chol.solve(&rhs);
                    for (k, &i) in rows.iter().enumerate() {
                        r[i] = sol[k];
                    }
                }
            }
        }
    }
}

// Redundant rows make A A^T singular; a small diagonal shift turns the solve
// into a least-squares one without visibly moving the projection.
fn factor_with_shift(gram: DMatrix<f64>, scale: f64) -> Option<Cholesky<f64, Dyn>> {
    let mut shift = 1e-13 * scale.max(1e-300);
    for _ in 0..8 {
        let mut g = gram.clone();
        for i in 0..g.nrows() {
            g[(i, i)] += shift;
        }
        if let Some(c) = Cholesky::new(g) {
            return Some(c);
        }
        shift *= 100.0;
    }
    None
}
