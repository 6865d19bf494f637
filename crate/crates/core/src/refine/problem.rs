use serde::{Deserialize, Serialize};

use super::RefineError;
use crate::compile::{compile_bound, CompileError, CompiledProgram, GramBasis, GramCone};
use crate::poly::{monomials_of_degree, monomials_up_to, MonomialBasis, Polynomial};

/// `maximize gamma s.t. target - gamma * weight = z^T Q z` over one basis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundProblem {
    pub target: Polynomial,
    pub weight: Polynomial,
    pub basis: MonomialBasis,
}

fn half_degree(p: &Polynomial) -> Result<u32, RefineError> {
    let deg = p.degree();
    if deg % 2 == 1 {
        return Err(CompileError::OddDegree(deg).into());
    }
    Ok(deg / 2)
}

impl BoundProblem {
    /// Global lower bound: weight 1, all monomials up to half the degree.
    pub fn pop(p: &Polynomial) -> Result<Self, RefineError> {
        let d = half_degree(p)?;
        Ok(Self { target: p.clone(), weight: Polynomial::constant(p.n(), 1.0), basis: monomials_up_to(p.n(), d) })
    }

    /// Minimum of a form of degree `2d` on the unit sphere: weight
    /// `(x_1^2 + ... + x_n^2)^d`, monomials of degree exactly `d`.
    pub fn form_on_sphere(f: &Polynomial) -> Result<Self, RefineError> {
        let d = half_degree(f)?;
        if !f.is_homogeneous() {
            return Err(RefineError::Invalid("polynomial is not homogeneous".into()));
        }
        Ok(Self {
            target: f.clone(),
            weight: Polynomial::squared_norm_power(f.n(), d),
            basis: monomials_of_degree(f.n(), d),
        })
    }

    pub fn compile(&self, cone: GramCone) -> Result<CompiledProgram, RefineError> {
        Ok(compile_bound(&self.target, Some(&self.weight), vec![GramBasis::Monomials(self.basis.clone())], cone)?)
    }
}
