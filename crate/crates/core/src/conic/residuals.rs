use serde::{Deserialize, Serialize};

use super::cones::product_distance;
use super::program::{Cone, ConicProgram};

/// Relative residuals of a primal-dual pair.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    /// `|Ax - b| / (1 + |b|)`
    pub primal: f64,
    /// distance of `c - A^T y` from the dual cone, over `1 + |c|`
    pub dual: f64,
    /// `|c^T x - b^T y| / (1 + |c^T x| + |b^T y|)`
    pub gap: f64,
}

impl Residuals {
    pub fn max(&self) -> f64 {
        self.primal.max(self.dual).max(self.gap)
    }
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn dual_cones(cones: &[Cone]) -> Vec<Cone> {
    cones.iter().map(Cone::dual).collect()
}

/// Residuals of `(x, y)` computed from the problem data alone.
///
/// The primal point is not projected first: a point outside the cone is
/// charged its distance to the cone as well.
pub fn compute_residuals(p: &ConicProgram, x: &[f64], y: &[f64]) -> Residuals {
    let mut ax = vec![0.0; p.num_rows()];
    p.a.mul_vec(x, &mut ax);
    let pres: Vec<f64> = ax.iter().zip(&p.b).map(|(a, b)| a - b).collect();
    let infeas = product_distance(x, &p.cones);
    let primal = (norm(&pres).powi(2) + infeas * infeas).sqrt() / (1.0 + norm(&p.b));

    let mut aty = vec![0.0; p.num_vars];
    p.a.tmul_vec(y, &mut aty);
    let slack: Vec<f64> = p.objective.iter().zip(&aty).map(|(c, a)| c - a).collect();
    let dual = product_distance(&slack, &dual_cones(&p.cones)) / (1.0 + norm(&p.objective));

    let pobj = dot(&p.objective, x);
    let dobj = dot(&p.b, y);
    let gap = (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs());
    Residuals { primal, dual, gap }
}
