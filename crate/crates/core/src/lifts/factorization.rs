use nalgebra::{DMatrix, Matrix2};
use serde::{Deserialize, Serialize};

/// Claimed factorization `S[i, j] = sum_k <A[i][k], B[j][k]>` with every
/// factor a 2x2 PSD matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct S2Witness {
    pub a: Vec<Vec<[[f64; 2]; 2]>>,
    pub b: Vec<Vec<[[f64; 2]; 2]>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FactorSide {
    A,
    B,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum S2Violation {
    Shape(String),
    NotSymmetric { side: FactorSide, index: usize, k: usize },
    NotPsd { side: FactorSide, index: usize, k: usize, min_eigenvalue: f64 },
    Mismatch { i: usize, j: usize, expected: f64, found: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct S2Report {
    pub p: usize,
    pub max_residual: f64,
    pub violations: Vec<S2Violation>,
}

impl S2Report {
    pub fn accepted(&self) -> bool {
        self.violations.is_empty()
    }
}

fn to_matrix(m: &[[f64; 2]; 2]) -> Matrix2<f64> {
    Matrix2::new(m[0][0], m[0][1], m[1][0], m[1][1])
}

fn min_eigenvalue(m: &Matrix2<f64>) -> f64 {
    let mid = 0.5 * (m[(0, 0)] + m[(1, 1)]);
    let half = 0.5 * (m[(0, 0)] - m[(1, 1)]);
    mid - half.hypot(m[(0, 1)])
}

fn check_factors(side: FactorSide, rows: &[Vec<[[f64; 2]; 2]>], p: usize, tol: f64, out: &mut Vec<S2Violation>) {
    for (index, row) in rows.iter().enumerate() {
        if row.len() != p {
            out.push(S2Violation::Shape(format!("{side:?}[{index}] has {} factors, expected {p}", row.len())));
            continue;
        }
        for (k, f) in row.iter().enumerate() {
            let m = to_matrix(f);
            if (m[(0, 1)] - m[(1, 0)]).abs() > tol {
                out.push(S2Violation::NotSymmetric { side, index, k });
            }
            let lam = min_eigenvalue(&m);
            if lam < -tol {
                out.push(S2Violation::NotPsd { side, index, k, min_eigenvalue: lam });
            }
        }
    }
}

/// Checks PSD-ness of every factor and the entrywise identity. Each entry is
/// summed in both directions over `k` and the worse residual is kept.
pub fn verify_s2_factorization(s: &DMatrix<f64>, witness: &S2Witness, tol: f64) -> S2Report {
    let mut violations = Vec::new();
    let p = witness.a.first().or(witness.b.first()).map_or(0, Vec::len);
    if witness.a.len() != s.nrows() || witness.b.len() != s.ncols() {
        violations.push(S2Violation::Shape(format!(
            "witness is {}x{}, matrix is {}x{}",
            witness.a.len(),
            witness.b.len(),
            s.nrows(),
            s.ncols()
        )));
        return S2Report { p, max_residual: f64::INFINITY, violations };
    }
    check_factors(FactorSide::A, &witness.a, p, tol, &mut violations);
    check_factors(FactorSide::B, &witness.b, p, tol, &mut violations);
    if violations.iter().any(|v| matches!(v, S2Violation::Shape(_))) {
        return S2Report { p, max_residual: f64::INFINITY, violations };
    }
    let mut max_residual: f64 = 0.0;
    for i in 0..s.nrows() {
        for j in 0..s.ncols() {
            let term = |k: usize| to_matrix(&witness.a[i][k]).dot(&to_matrix(&witness.b[j][k]));
            let forward: f64 = (0..p).map(term).sum();
            let backward: f64 = (0..p).rev().map(term).sum();
            let residual = (forward - s[(i, j)]).abs().max((backward - s[(i, j)]).abs());
            max_residual = max_residual.max(residual);
            if residual > tol {
                violations.push(S2Violation::Mismatch { i, j, expected: s[(i, j)], found: forward });
            }
        }
    }
    S2Report { p, max_residual, violations }
}
