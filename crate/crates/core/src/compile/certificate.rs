use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::CompileError;
use crate::poly::{MonomialBasis, Polynomial};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateBlock {
    pub basis: MonomialBasis,
    pub gram: DMatrix<f64>,
}

/// `sum_k z_k^T Q_k z_k` over monomial vectors `z_k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GramCertificate {
    pub blocks: Vec<CertificateBlock>,
}

impl GramCertificate {
    /// Expands the certificate into a polynomial in `n` variables.
    pub fn expand(&self, n: usize) -> Result<Polynomial, CompileError> {
        let mut total = Polynomial::zero(n);
        for block in &self.blocks {
            let side = block.basis.len();
            if block.gram.nrows() != side || block.gram.ncols() != side {
                return Err(CompileError::Invalid(format!(
                    "Gram matrix is {}x{} for a basis of {side}",
                    block.gram.nrows(),
                    block.gram.ncols()
                )));
            }
            let z: Vec<Polynomial> = block.basis.iter().map(|e| Polynomial::monomial(e.clone(), 1.0)).collect();
            for i in 0..side {
                for j in 0..side {
                    let q = block.gram[(i, j)];
                    if q != 0.0 {
                        total = total.add(&z[i].mul(&z[j])?.scale(q))?;
                    }
                }
            }
        }
        Ok(total)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    /// Largest coefficient difference between the expansion and the target.
    pub max_mismatch: f64,
    /// Smallest eigenvalue of each (symmetrised) Gram block.
    pub min_eigenvalues: Vec<f64>,
    pub certified: bool,
}

/// Checks a certificate by symbolic expansion and eigenvalues.
pub fn verify_certificate(p: &Polynomial, cert: &GramCertificate, tol: f64) -> Result<CertificateReport, CompileError> {
    let expanded = cert.expand(p.n())?;
    let max_mismatch = expanded.max_coefficient_gap(p)?;
    let min_eigenvalues: Vec<f64> = cert
        .blocks
        .iter()
        .map(|b| {
            let sym = (&b.gram + b.gram.transpose()) * 0.5;
            SymmetricEigen::new(sym).eigenvalues.min()
        })
        .collect();
    let certified = max_mismatch <= tol && min_eigenvalues.iter().all(|&l| l >= -tol);
    Ok(CertificateReport { max_mismatch, min_eigenvalues, certified })
}

/// Row diagonal dominance `q_ii >= sum_{j != i} |q_ij| - tol`.
pub fn is_diagonally_dominant(q: &DMatrix<f64>, tol: f64) -> bool {
    (0..q.nrows()).all(|i| {
        let off: f64 = (0..q.ncols()).filter(|&j| j != i).map(|j| q[(i, j)].abs()).sum();
        q[(i, i)] >= off - tol
    })
}
