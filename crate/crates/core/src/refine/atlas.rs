use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::RefineError;

/// Sign-canonical `{-1, 0, 1}` vectors with at most `k` nonzeros; the first
/// nonzero of each ray is `+1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RayAtlas {
    pub n: usize,
    pub k: usize,
    pub rays: Vec<Vec<i8>>,
}

impl RayAtlas {
    pub fn len(&self) -> usize {
        self.rays.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rays.is_empty()
    }

    pub fn contains(&self, ray: &[i8]) -> bool {
        let canon = canonical(ray);
        self.rays.iter().any(|r| *r == canon)
    }

    /// Appends `ray` (after sign canonicalisation) unless already present.
    pub fn push(&mut self, ray: &[i8]) -> bool {
        assert_eq!(ray.len(), self.n, "ray length");
        let canon = canonical(ray);
        if canon.iter().all(|&v| v == 0) || self.rays.contains(&canon) {
            return false;
        }
        self.k = self.k.max(canon.iter().filter(|&&v| v != 0).count());
        self.rays.push(canon);
        true
    }

    /// `sum_r alpha_r v_r v_r^T`
    pub fn combine(&self, alpha: &[f64]) -> DMatrix<f64> {
        let mut q = DMatrix::zeros(self.n, self.n);
        for (ray, &a) in self.rays.iter().zip(alpha) {
            if a == 0.0 {
                continue;
            }
            let support: Vec<(usize, f64)> =
                ray.iter().enumerate().filter(|(_, &v)| v != 0).map(|(i, &v)| (i, v as f64)).collect();
            for &(i, vi) in &support {
                for &(j, vj) in &support {
                    q[(i, j)] += a * vi * vj;
                }
            }
        }
        q
    }
}

pub(crate) fn canonical(ray: &[i8]) -> Vec<i8> {
    match ray.iter().find(|&&v| v != 0) {
        Some(&first) if first < 0 => ray.iter().map(|&v| -v).collect(),
        _ => ray.to_vec(),
    }
}

/// All sign-canonical rays with at most `k` nonzeros, grouped by support
/// size, then support, then sign pattern.
pub fn dd_extreme_rays(n: usize, k: usize) -> Result<RayAtlas, RefineError> {
    if k == 0 || k > n {
        return Err(RefineError::Invalid(format!("sparsity cap {k} must lie in 1..={n}")));
    }
    let mut rays = Vec::new();
    for size in 1..=k {
        let mut support: Vec<usize> = (0..size).collect();
        loop {
            for signs in 0..(1u32 << (size - 1)) {
                let mut v = vec![0i8; n];
                v[support[0]] = 1;
                for (t, &i) in support.iter().enumerate().skip(1) {
                    v[i] = if signs >> (size - 1 - t) & 1 == 1 { -1 } else { 1 };
                }
                rays.push(v);
            }
            if !next_combination(&mut support, n) {
                break;
            }
        }
    }
    Ok(RayAtlas { n, k, rays })
}

fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Writes a diagonally dominant `q` as a nonnegative combination of the
/// singleton and pair rays of `atlas`.
pub fn reconstruct_dd(q: &DMatrix<f64>, atlas: &RayAtlas) -> Result<Vec<f64>, RefineError> {
    let n = atlas.n;
    if q.nrows() != n || q.ncols() != n {
        return Err(RefineError::DimensionMismatch { expected: n, found: q.nrows() });
    }
    let index_of = |ray: &[i8]| atlas.rays.iter().position(|r| r == ray);
    let mut alpha = vec![0.0; atlas.len()];
    let mut leftover: Vec<f64> = (0..n).map(|i| q[(i, i)]).collect();
    for j in 0..n {
        for i in 0..j {
            let v = 0.5 * (q[(i, j)] + q[(j, i)]);
            if v == 0.0 {
                continue;
            }
            let mut ray = vec![0i8; n];
            ray[i] = 1;
            ray[j] = if v > 0.0 { 1 } else { -1 };
            let r = index_of(&ray).ok_or_else(|| RefineError::Invalid("atlas lacks a pair ray".into()))?;
            alpha[r] = v.abs();
            leftover[i] -= v.abs();
            leftover[j] -= v.abs();
        }
    }
    let scale = (0..n).map(|i| q[(i, i)].abs()).fold(0.0, f64::max);
    for (i, rest) in leftover.into_iter().enumerate() {
        if rest < -1e-12 * scale.max(1.0) {
            return Err(RefineError::NotDiagonallyDominant { row: i, deficit: -rest });
        }
        let mut ray = vec![0i8; n];
        ray[i] = 1;
        let r = index_of(&ray).ok_or_else(|| RefineError::Invalid("atlas lacks a singleton ray".into()))?;
        alpha[r] = rest.max(0.0);
    }
    Ok(alpha)
}
