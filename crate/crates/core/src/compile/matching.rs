use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::CompileError;
use crate::poly::{Exponent, MonomialBasis, Polynomial};

/// One coefficient-matching row: `sum weight * Q[i][j] = rhs` over upper-triangle
/// positions `i <= j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatchingRow {
    pub alpha: Exponent,
    pub entries: Vec<(usize, usize, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatchingSystem {
    pub basis: MonomialBasis,
    pub rows: Vec<MatchingRow>,
    pub rhs: Vec<f64>,
}

impl MatchingSystem {
    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    /// Nonzeros of the stacked matrix with each `A_alpha` vectorised in full,
    /// so an off-diagonal position counts twice.
    pub fn nnz(&self) -> usize {
        self.rows.iter().flat_map(|r| &r.entries).map(|&(i, j, _)| if i == j { 1 } else { 2 }).sum()
    }

    /// `<A_alpha, Q>` for every row.
    pub fn apply(&self, q: &nalgebra::DMatrix<f64>) -> Vec<f64> {
        self.rows.iter().map(|r| r.entries.iter().map(|&(i, j, w)| w * q[(i, j)]).sum()).collect()
    }
}

/// Coefficient-matching rows of `p = z^T Q z` over the monomial `basis`.
///
/// There is one row per monomial that is a product of two basis monomials,
/// including monomials absent from `p` (right-hand side 0).
pub fn matching_system(p: &Polynomial, basis: &MonomialBasis) -> Result<MatchingSystem, CompileError> {
    if !basis.is_empty() && basis.n() != p.n() {
        return Err(CompileError::DimensionMismatch { expected: p.n(), found: basis.n() });
    }
    let mut rows: BTreeMap<Exponent, Vec<(usize, usize, f64)>> = BTreeMap::new();
    let entries = basis.entries();
    for j in 0..entries.len() {
        for i in 0..=j {
            let w = if i == j { 1.0 } else { 2.0 };
            rows.entry(entries[i].product(&entries[j])).or_default().push((i, j, w));
        }
    }
    for (alpha, _) in p.terms() {
        if !rows.contains_key(alpha) {
            return Err(CompileError::Uncoverable(alpha.to_string()));
        }
    }
    let rhs = rows.keys().map(|a| p.coefficient(a)).collect();
    let rows = rows.into_iter().map(|(alpha, entries)| MatchingRow { alpha, entries }).collect();
    Ok(MatchingSystem { basis: basis.clone(), rows, rhs })
}

/// `nnz(A) / (m N^2)`
pub fn matching_density(ms: &MatchingSystem) -> f64 {
    let n = ms.basis.len() as f64;
    ms.nnz() as f64 / (ms.num_rows() as f64 * n * n)
}
