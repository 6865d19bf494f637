use serde::{Deserialize, Serialize};

use super::ConicError;

/// One block of the product cone, in variable order.
///
/// `Psd(side)` occupies `side * (side + 1) / 2` variables in scaled
/// symmetric-vector form (see [`svec_index`]). `RotSoc(k)` is the rotated
/// cone `{(a, b, u) : a, b >= 0, 2ab >= |u|^2}` of total dimension `k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "size")]
pub enum Cone {
    Zero(usize),
    Free(usize),
    NonNeg(usize),
    Soc(usize),
    RotSoc(usize),
    Psd(usize),
}

impl Cone {
    pub fn dim(&self) -> usize {
        match *self {
            Cone::Zero(k) | Cone::Free(k) | Cone::NonNeg(k) | Cone::Soc(k) | Cone::RotSoc(k) => k,
            Cone::Psd(side) => side * (side + 1) / 2,
        }
    }

    /// Dual cone; every kind is self-dual except `Zero` and `Free`.
    pub fn dual(&self) -> Cone {
        match *self {
            Cone::Zero(k) => Cone::Free(k),
            Cone::Free(k) => Cone::Zero(k),
            other => other,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Cone::Zero(_) => "zero",
            Cone::Free(_) => "free",
            Cone::NonNeg(_) => "nonneg",
            Cone::Soc(_) => "soc",
            Cone::RotSoc(_) => "rotsoc",
            Cone::Psd(_) => "psd",
        }
    }
}

/// Position of entry `(i, j)` of a symmetric matrix in its scaled vector.
///
/// Upper triangle, column by column. Off-diagonal entries are stored times
/// sqrt(2) so the Euclidean product of vectors equals the Frobenius product
/// of matrices.
pub fn svec_index(i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    j * (j + 1) / 2 + i
}

/// Inverse of [`svec_index`].
pub fn svec_position(k: usize) -> (usize, usize) {
    let mut j = ((((8 * k + 1) as f64).sqrt() - 1.0) / 2.0) as usize;
    while j * (j + 1) / 2 > k {
        j -= 1;
    }
    while (j + 1) * (j + 2) / 2 <= k {
        j += 1;
    }
    (k - j * (j + 1) / 2, j)
}

pub fn svec_to_matrix(v: &[f64], side: usize) -> nalgebra::DMatrix<f64> {
    let mut m = nalgebra::DMatrix::zeros(side, side);
    for j in 0..side {
        for i in 0..=j {
            let x = v[svec_index(i, j)];
            if i == j {
                m[(i, i)] = x;
            } else {
                let x = x / std::f64::consts::SQRT_2;
                m[(i, j)] = x;
                m[(j, i)] = x;
            }
        }
    }
    m
}

pub fn matrix_to_svec(m: &nalgebra::DMatrix<f64>, out: &mut [f64]) {
    let side = m.nrows();
    for j in 0..side {
        for i in 0..=j {
            out[svec_index(i, j)] = if i == j {
                m[(i, i)]
            } else {
                0.5 * (m[(i, j)] + m[(j, i)]) * std::f64::consts::SQRT_2
            };
        }
    }
}

/// Row-compressed sparse matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SparseMatrix {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    /// Builds from per-row `(column, value)` lists. Repeated columns are
    /// summed and exact zeros dropped; columns end up sorted within a row.
    pub fn from_rows(ncols: usize, rows: Vec<Vec<(usize, f64)>>) -> Result<Self, ConicError> {
        let mut row_ptr = Vec::with_capacity(rows.len() + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for (r, mut row) in rows.into_iter().enumerate() {
            row.sort_by_key(|&(c, _)| c);
            let start = col_idx.len();
            for (c, v) in row {
                if c >= ncols {
                    return Err(ConicError::Invalid(format!("row {r} references column {c} of {ncols}")));
                }
                if col_idx.len() > start && *col_idx.last().unwrap() == c {
                    *values.last_mut().unwrap() += v;
                } else {
                    col_idx.push(c);
                    values.push(v);
                }
            }
            // drop entries that cancelled
            let mut keep = start;
            for k in start..col_idx.len() {
                if values[k] != 0.0 {
                    col_idx[keep] = col_idx[k];
                    values[keep] = values[k];
                    keep += 1;
                }
            }
            col_idx.truncate(keep);
            values.truncate(keep);
            row_ptr.push(col_idx.len());
        }
        Ok(Self { nrows: row_ptr.len() - 1, ncols, row_ptr, col_idx, values })
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, r: usize) -> (&[usize], &[f64]) {
        let range = self.row_ptr[r]..self.row_ptr[r + 1];
        (&self.col_idx[range.clone()], &self.values[range])
    }

    pub fn rows(&self) -> impl Iterator<Item = (&[usize], &[f64])> + '_ {
        (0..self.nrows).map(move |r| self.row(r))
    }

    /// `out = A x`
    pub fn mul_vec(&self, x: &[f64], out: &mut [f64]) {
        for (r, o) in out.iter_mut().enumerate().take(self.nrows) {
            let (cols, vals) = self.row(r);
            *o = cols.iter().zip(vals).map(|(&c, &v)| v * x[c]).sum();
        }
    }

    /// `out = A^T y`
    pub fn tmul_vec(&self, y: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        for (r, &yr) in y.iter().enumerate().take(self.nrows) {
            if yr == 0.0 {
                continue;
            }
            let (cols, vals) = self.row(r);
            for (&c, &v) in cols.iter().zip(vals) {
                out[c] += v * yr;
            }
        }
    }

    /// Column-major copy of the pattern: for each column, `(row, value)` pairs.
    pub fn columns(&self) -> Vec<Vec<(usize, f64)>> {
        let mut cols = vec![Vec::new(); self.ncols];
        for r in 0..self.nrows {
            let (cs, vs) = self.row(r);
            for (&c, &v) in cs.iter().zip(vs) {
                cols[c].push((r, v));
            }
        }
        cols
    }
}

/// Standard-form conic program
///
/// ```text
/// minimize    c^T x
/// subject to  A x = b,  x in K_1 x ... x K_p
/// ```
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConicProgram {
    pub num_vars: usize,
    pub objective: Vec<f64>,
    pub a: SparseMatrix,
    pub b: Vec<f64>,
    pub cones: Vec<Cone>,
}

impl ConicProgram {
    pub fn new(objective: Vec<f64>, a: SparseMatrix, b: Vec<f64>, cones: Vec<Cone>) -> Result<Self, ConicError> {
        let p = Self { num_vars: objective.len(), objective, a, b, cones };
        p.validate()?;
        Ok(p)
    }

    pub fn num_rows(&self) -> usize {
        self.b.len()
    }

    pub fn validate(&self) -> Result<(), ConicError> {
        let cone_dim: usize = self.cones.iter().map(Cone::dim).sum();
        if cone_dim != self.num_vars {
            return Err(ConicError::Invalid(format!(
                "cone dimensions sum to {cone_dim} but there are {} variables",
                self.num_vars
            )));
        }
        if self.objective.len() != self.num_vars || self.a.ncols() != self.num_vars {
            return Err(ConicError::Invalid("objective or constraint width differs from num_vars".into()));
        }
        if self.a.nrows() != self.b.len() {
            return Err(ConicError::Invalid(format!(
                "{} constraint rows but {} right-hand sides",
                self.a.nrows(),
                self.b.len()
            )));
        }
        for (r, (cols, _)) in self.a.rows().enumerate() {
            if cols.is_empty() {
                return Err(ConicError::Invalid(format!("constraint row {r} is empty")));
            }
        }
        for cone in &self.cones {
            let ok = match *cone {
                Cone::Soc(k) => k >= 1,
                Cone::RotSoc(k) => k >= 2,
                _ => true,
            };
            if !ok {
                return Err(ConicError::Invalid(format!("{} cone of size {} is too small", cone.name(), cone.dim())));
            }
        }
        let finite = self.objective.iter().chain(&self.b).chain(&self.a.values).all(|v| v.is_finite());
        if !finite {
            return Err(ConicError::Invalid("non-finite problem data".into()));
        }
        Ok(())
    }

    /// Variable offset of each cone block.
    pub fn cone_offsets(&self) -> Vec<usize> {
        let mut off = 0;
        self.cones
            .iter()
            .map(|c| {
                let o = off;
                off += c.dim();
                o
            })
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("program serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, ConicError> {
        let p: ConicProgram = serde_json::from_str(text).map_err(|e| ConicError::Invalid(e.to_string()))?;
        p.validate()?;
        Ok(p)
    }
}
