use std::collections::BTreeMap;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::cliques::CliqueTree;
use super::graph::single_psd;
use super::ChordalError;
use crate::conic::{svec_index, svec_position, Cone, ConicProgram, SparseMatrix};

/// A program whose PSD block was split over the cliques of a tree.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecomposedProgram {
    pub program: ConicProgram,
    pub tree: CliqueTree,
    /// Offset of each clique block in the new variable vector.
    pub clique_offsets: Vec<usize>,
    /// Variables before and after the replaced block keep their values but
    /// shift by this layout: `(old_start, new_start, len)`.
    pub kept: Vec<(usize, usize, usize)>,
    pub psd_side: usize,
    pub psd_offset: usize,
    pub num_consensus_rows: usize,
}

impl DecomposedProgram {
    /// Entries of the original matrix on the extended pattern, read from the
    /// owning clique.
    pub fn partial_matrix(&self, x: &[f64]) -> PartialSymMatrix {
        let mut m = PartialSymMatrix::new(self.psd_side);
        for (k, clique) in self.tree.cliques.iter().enumerate() {
            for (lj, &j) in clique.iter().enumerate() {
                for (li, &i) in clique.iter().enumerate().take(lj + 1) {
                    if self.tree.owner(i, j) == Some(k) {
                        m.set(i, j, self.clique_entry(x, k, li, lj));
                    }
                }
            }
        }
        m
    }

    fn clique_entry(&self, x: &[f64], k: usize, li: usize, lj: usize) -> f64 {
        let v = x[self.clique_offsets[k] + svec_index(li, lj)];
        if li == lj {
            v
        } else {
            v / std::f64::consts::SQRT_2
        }
    }

    /// Clique copy `k` as a dense matrix.
    pub fn clique_matrix(&self, x: &[f64], k: usize) -> DMatrix<f64> {
        let side = self.tree.cliques[k].len();
        crate::conic::svec_to_matrix(&x[self.clique_offsets[k]..self.clique_offsets[k] + side * (side + 1) / 2], side)
    }

    /// Maps a point of the decomposed program back to the original layout;
    /// entries outside the pattern are set to zero.
    pub fn lift(&self, x: &[f64]) -> Vec<f64> {
        let total: usize = self.kept.iter().map(|k| k.2).sum::<usize>() + self.psd_side * (self.psd_side + 1) / 2;
        let mut out = vec![0.0; total];
        for &(old, new, len) in &self.kept {
            out[old..old + len].copy_from_slice(&x[new..new + len]);
        }
        let pm = self.partial_matrix(x);
        for (&(i, j), &v) in pm.entries() {
            out[self.psd_offset + svec_index(i, j)] = if i == j { v } else { v * std::f64::consts::SQRT_2 };
        }
        out
    }
}

/// Replaces the single PSD block of `p` by one PSD block per clique, linked
/// by equality rows along the tree edges.
pub fn decompose_psd(p: &ConicProgram, tree: &CliqueTree) -> Result<DecomposedProgram, ChordalError> {
    let (block, side) = single_psd(p)?;
    if tree.n != side {
        return Err(ChordalError::SizeMismatch { expected: side, found: tree.n });
    }
    let offsets = p.cone_offsets();
    let psd_offset = offsets[block];
    let psd_len = side * (side + 1) / 2;

    // new layout: cones before, clique blocks, cones after
    let mut cones = Vec::new();
    let mut kept = Vec::new();
    let mut next = 0;
    for c in &p.cones[..block] {
        cones.push(*c);
    }
    if psd_offset > 0 {
        kept.push((0, 0, psd_offset));
        next = psd_offset;
    }
    let mut clique_offsets = Vec::with_capacity(tree.cliques.len());
    for c in &tree.cliques {
        clique_offsets.push(next);
        cones.push(Cone::Psd(c.len()));
        next += c.len() * (c.len() + 1) / 2;
    }
    let tail_old = psd_offset + psd_len;
    let tail_len = p.num_vars - tail_old;
    if tail_len > 0 {
        kept.push((tail_old, next, tail_len));
    }
    cones.extend_from_slice(&p.cones[block + 1..]);
    let num_vars = next + tail_len;

    let local_pos: Vec<BTreeMap<usize, usize>> =
        tree.cliques.iter().map(|c| c.iter().enumerate().map(|(l, &v)| (v, l)).collect()).collect();
    let remap = |var: usize| -> Result<usize, ChordalError> {
        if var < psd_offset {
            Ok(var)
        } else if var >= tail_old {
            Ok(var - tail_old + next)
        } else {
            let (i, j) = svec_position(var - psd_offset);
            let k = tree.owner(i, j).ok_or(ChordalError::OutsidePattern { i, j })?;
            let (li, lj) = (local_pos[k][&i], local_pos[k][&j]);
            Ok(clique_offsets[k] + svec_index(li, lj))
        }
    };

    let mut objective = vec![0.0; num_vars];
    for (v, &c) in p.objective.iter().enumerate() {
        if c != 0.0 {
            objective[remap(v)?] += c;
        }
    }
    let mut rows = Vec::with_capacity(p.num_rows());
    for (cols, vals) in p.a.rows() {
        let row = cols.iter().zip(vals).map(|(&c, &v)| Ok((remap(c)?, v))).collect::<Result<Vec<_>, ChordalError>>()?;
        rows.push(row);
    }
    let mut b = p.b.clone();

    let mut consensus = 0;
    for &(ka, kb) in &tree.tree_edges {
        let shared = tree.intersection(ka, kb);
        for (t, &j) in shared.iter().enumerate() {
            for &i in &shared[..=t] {
                let va = clique_offsets[ka] + svec_index(local_pos[ka][&i], local_pos[ka][&j]);
                let vb = clique_offsets[kb] + svec_index(local_pos[kb][&i], local_pos[kb][&j]);
                rows.push(vec![(va, 1.0), (vb, -1.0)]);
                b.push(0.0);
                consensus += 1;
            }
        }
    }
    let a = SparseMatrix::from_rows(num_vars, rows)?;
    let program = ConicProgram::new(objective, a, b, cones)?;
    Ok(DecomposedProgram {
        program,
        tree: tree.clone(),
        clique_offsets,
        kept,
        psd_side: side,
        psd_offset,
        num_consensus_rows: consensus,
    })
}

/// Symmetric matrix known only on some entries `(i, j)`, `i <= j`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PartialSymMatrix {
    n: usize,
    entries: BTreeMap<(usize, usize), f64>,
}

impl PartialSymMatrix {
    pub fn new(n: usize) -> Self {
        Self { n, entries: BTreeMap::new() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        assert!(i < self.n && j < self.n, "index out of range");
        self.entries.insert((i.min(j), i.max(j)), v);
    }

    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        self.entries.get(&(i.min(j), i.max(j))).copied()
    }

    pub fn entries(&self) -> &BTreeMap<(usize, usize), f64> {
        &self.entries
    }

    /// Entries of `m` on the pattern of `tree`.
    pub fn from_dense(m: &DMatrix<f64>, tree: &CliqueTree) -> Self {
        let mut out = Self::new(m.nrows());
        for j in 0..m.nrows() {
            for i in 0..=j {
                if tree.in_pattern(i, j) {
                    out.set(i, j, m[(i, j)]);
                }
            }
        }
        out
    }
}

/// A partial matrix on a chordal pattern has a PSD completion exactly when
/// each clique submatrix is PSD; this checks the latter up to `tol`.
pub fn completable(x: &PartialSymMatrix, tree: &CliqueTree, tol: f64) -> Result<bool, ChordalError> {
    if x.n() != tree.n {
        return Err(ChordalError::SizeMismatch { expected: tree.n, found: x.n() });
    }
    for clique in &tree.cliques {
        let k = clique.len();
        let mut sub = DMatrix::zeros(k, k);
        for a in 0..k {
            for b in 0..=a {
                let (i, j) = (clique[b], clique[a]);
                let v = x.get(i, j).ok_or(ChordalError::MissingEntry { i, j })?;
                sub[(a, b)] = v;
                sub[(b, a)] = v;
            }
        }
        if SymmetricEigen::new(sub).eigenvalues.min() < -tol {
            return Ok(false);
        }
    }
    Ok(true)
}
