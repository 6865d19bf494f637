use std::collections::BTreeMap;
use std::f64::consts::SQRT_2;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::certificate::{CertificateBlock, GramCertificate};
use super::CompileError;
use crate::conic::{svec_index, svec_to_matrix, Cone, ConicProgram, SparseMatrix};
use crate::poly::{Exponent, MonomialBasis, Polynomial};

/// Inner approximation used for each Gram matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GramCone {
    Sos,
    Sdsos,
    Dsos,
}

impl GramCone {
    pub const ALL: [GramCone; 3] = [GramCone::Dsos, GramCone::Sdsos, GramCone::Sos];

    pub fn name(&self) -> &'static str {
        match self {
            GramCone::Sos => "sos",
            GramCone::Sdsos => "sdsos",
            GramCone::Dsos => "dsos",
        }
    }
}

impl std::str::FromStr for GramCone {
    type Err = CompileError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "sos" => Ok(GramCone::Sos),
            "sdsos" => Ok(GramCone::Sdsos),
            "dsos" => Ok(GramCone::Dsos),
            other => Err(CompileError::UnknownCone(other.to_string())),
        }
    }
}

impl std::fmt::Display for GramCone {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Cone family plus, for the sparse form, one monomial basis per clique.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConeSpec {
    pub tag: GramCone,
    pub clique_bases: Option<Vec<MonomialBasis>>,
}

impl ConeSpec {
    pub fn dense(tag: GramCone) -> Self {
        Self { tag, clique_bases: None }
    }
}

/// Vector of polynomials a Gram matrix is taken over.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum GramBasis {
    Monomials(MonomialBasis),
    /// Entry `k` is `sum_l transform[(k, l)] * monomials[l]`.
    Transformed { monomials: MonomialBasis, transform: DMatrix<f64> },
}

impl GramBasis {
    pub fn len(&self) -> usize {
        match self {
            GramBasis::Monomials(b) => b.len(),
            GramBasis::Transformed { transform, .. } => transform.nrows(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn monomials(&self) -> &MonomialBasis {
        match self {
            GramBasis::Monomials(b) | GramBasis::Transformed { monomials: b, .. } => b,
        }
    }

    /// Change of coordinates to the monomial vector (identity for monomials).
    pub fn transform(&self) -> DMatrix<f64> {
        match self {
            GramBasis::Monomials(b) => DMatrix::identity(b.len(), b.len()),
            GramBasis::Transformed { transform, .. } => transform.clone(),
        }
    }

    /// The basis entries as polynomials in `n` variables.
    pub fn polynomials(&self, n: usize) -> Vec<Polynomial> {
        let mons = self.monomials();
        match self {
            GramBasis::Monomials(b) => b.iter().map(|e| Polynomial::monomial(e.clone(), 1.0)).collect(),
            GramBasis::Transformed { transform, .. } => (0..transform.nrows())
                .map(|k| {
                    let mut p = Polynomial::zero(n);
                    for (l, e) in mons.iter().enumerate() {
                        p.add_term(e.clone(), transform[(k, l)]);
                    }
                    p
                })
                .collect(),
        }
    }

    /// Coefficients of `b_k * b_l` for `k <= l`, keyed by `(k, l)`.
    fn pair_products(&self) -> Vec<((usize, usize), Vec<(Exponent, f64)>)> {
        let mons = self.monomials().entries();
        let len = self.len();
        let mut out = Vec::with_capacity(len * (len + 1) / 2);
        match self {
            GramBasis::Monomials(_) => {
                for l in 0..len {
                    for k in 0..=l {
                        out.push(((k, l), vec![(mons[k].product(&mons[l]), 1.0)]));
                    }
                }
            }
            GramBasis::Transformed { transform, .. } => {
                // products of monomial pairs, grouped by exponent, shared by all (k, l)
                let mut table: BTreeMap<Exponent, Vec<(usize, usize)>> = BTreeMap::new();
                for b in 0..mons.len() {
                    for a in 0..mons.len() {
                        table.entry(mons[a].product(&mons[b])).or_default().push((a, b));
                    }
                }
                for l in 0..len {
                    for k in 0..=l {
                        let terms = table
                            .iter()
                            .map(|(e, pairs)| {
                                let c = pairs.iter().map(|&(a, b)| transform[(k, a)] * transform[(l, b)]).sum();
                                (e.clone(), c)
                            })
                            .collect();
                        out.push(((k, l), terms));
                    }
                }
            }
        }
        out
    }
}

/// Where one Gram matrix lives among the program variables.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GramBlock {
    pub basis: GramBasis,
    pub cone: GramCone,
    pub offset: usize,
    pub num_vars: usize,
}

fn pair_slot(i: usize, j: usize) -> usize {
    debug_assert!(i < j);
    j * (j - 1) / 2 + i
}

impl GramBlock {
    fn cones(&self) -> Vec<Cone> {
        let side = self.basis.len();
        match self.cone {
            GramCone::Sos => vec![Cone::Psd(side)],
            GramCone::Dsos => vec![Cone::NonNeg(self.num_vars)],
            GramCone::Sdsos if side == 1 => vec![Cone::NonNeg(1)],
            GramCone::Sdsos => vec![Cone::RotSoc(3); side * (side - 1) / 2],
        }
    }

    fn var_count(cone: GramCone, side: usize) -> usize {
        let pairs = side * side.saturating_sub(1) / 2;
        match cone {
            GramCone::Sos => side * (side + 1) / 2,
            GramCone::Dsos if side == 1 => 1,
            GramCone::Dsos => 2 * side + 2 * pairs,
            GramCone::Sdsos if side == 1 => 1,
            GramCone::Sdsos => 3 * pairs,
        }
    }

    /// Variables (with multipliers) whose combination equals `Q[(i, j)]`, `i <= j`.
    fn entry_vars(&self, i: usize, j: usize) -> Vec<(usize, f64)> {
        let side = self.basis.len();
        let o = self.offset;
        let pairs = side * side.saturating_sub(1) / 2;
        match self.cone {
            GramCone::Sos => {
                vec![(o + svec_index(i, j), if i == j { 1.0 } else { 1.0 / SQRT_2 })]
            }
            GramCone::Dsos if i == j => vec![(o + i, 1.0)],
            GramCone::Dsos => {
                let s = pair_slot(i, j);
                vec![(o + side + s, 1.0), (o + side + pairs + s, -1.0)]
            }
            GramCone::Sdsos if side == 1 => vec![(o, 1.0)],
            GramCone::Sdsos if i == j => (0..side)
                .filter(|&k| k != i)
                .map(|k| {
                    let (a, b) = (i.min(k), i.max(k));
                    let base = o + 3 * pair_slot(a, b);
                    (if i == a { base } else { base + 1 }, 1.0)
                })
                .collect(),
            GramCone::Sdsos => vec![(o + 3 * pair_slot(i, j) + 2, 1.0 / SQRT_2)],
        }
    }

    /// Extra equality rows the block needs (diagonal dominance slacks).
    fn side_rows(&self) -> Vec<Vec<(usize, f64)>> {
        let side = self.basis.len();
        if self.cone != GramCone::Dsos || side == 1 {
            return Vec::new();
        }
        let o = self.offset;
        let pairs = side * (side - 1) / 2;
        (0..side)
            .map(|i| {
                // Q_ii - sum_j |Q_ij| - slack_i = 0
                let mut row = vec![(o + i, 1.0), (o + side + 2 * pairs + i, -1.0)];
                for k in (0..side).filter(|&k| k != i) {
                    let s = pair_slot(i.min(k), i.max(k));
                    row.push((o + side + s, -1.0));
                    row.push((o + side + pairs + s, -1.0));
                }
                row
            })
            .collect()
    }

    /// Gram matrix in the block's own basis coordinates.
    pub fn gram(&self, x: &[f64]) -> DMatrix<f64> {
        let side = self.basis.len();
        if self.cone == GramCone::Sos {
            return svec_to_matrix(&x[self.offset..self.offset + self.num_vars], side);
        }
        let mut q = DMatrix::zeros(side, side);
        for j in 0..side {
            for i in 0..=j {
                let v: f64 = self.entry_vars(i, j).iter().map(|&(k, c)| c * x[k]).sum();
                q[(i, j)] = v;
                q[(j, i)] = v;
            }
        }
        q
    }
}

/// A conic program together with the map back to Gram matrices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompiledProgram {
    pub program: ConicProgram,
    pub blocks: Vec<GramBlock>,
    /// Index of the bound variable, when the program maximises one.
    pub gamma: Option<usize>,
    /// Monomial matched by each leading row of the program.
    pub row_monomials: Vec<Exponent>,
    pub target: Polynomial,
    /// Polynomial multiplying the bound variable.
    pub weight: Option<Polynomial>,
}

impl CompiledProgram {
    pub fn gamma_value(&self, x: &[f64]) -> Option<f64> {
        self.gamma.map(|g| x[g])
    }

    pub fn gram_matrices(&self, x: &[f64]) -> Vec<DMatrix<f64>> {
        self.blocks.iter().map(|b| b.gram(x)).collect()
    }

    /// Gram matrices rewritten over plain monomial vectors.
    pub fn certificate(&self, x: &[f64]) -> GramCertificate {
        let blocks = self
            .blocks
            .iter()
            .map(|b| {
                let q = b.gram(x);
                let gram = match &b.basis {
                    GramBasis::Monomials(_) => q,
                    GramBasis::Transformed { transform, .. } => transform.transpose() * q * transform,
                };
                CertificateBlock { basis: b.basis.monomials().clone(), gram }
            })
            .collect();
        GramCertificate { blocks }
    }

    /// The polynomial the certificate at `x` should reproduce: the target
    /// minus the bound times its weight.
    pub fn certified_polynomial(&self, x: &[f64]) -> Polynomial {
        match (&self.weight, self.gamma_value(x)) {
            (Some(w), Some(g)) => self.target.sub(&w.scale(g)).expect("same variable count"),
            _ => self.target.clone(),
        }
    }

    /// Program point with every Gram matrix equal to the identity and the
    /// bound variable at `gamma`.
    pub fn identity_point(&self, gamma: f64) -> Vec<f64> {
        let mut x = vec![0.0; self.program.num_vars];
        if let Some(g) = self.gamma {
            x[g] = gamma;
        }
        for b in &self.blocks {
            let side = b.basis.len();
            let o = b.offset;
            match b.cone {
                GramCone::Sos => (0..side).for_each(|i| x[o + svec_index(i, i)] = 1.0),
                GramCone::Dsos if side == 1 => x[o] = 1.0,
                GramCone::Dsos => {
                    let pairs = side * (side - 1) / 2;
                    for i in 0..side {
                        x[o + i] = 1.0;
                        x[o + side + 2 * pairs + i] = 1.0;
                    }
                }
                GramCone::Sdsos if side == 1 => x[o] = 1.0,
                GramCone::Sdsos => {
                    let share = 1.0 / (side - 1) as f64;
                    for p in 0..side * (side - 1) / 2 {
                        x[o + 3 * p] = share;
                        x[o + 3 * p + 1] = share;
                    }
                }
            }
        }
        x
    }

    pub fn num_matching_rows(&self) -> usize {
        self.row_monomials.len()
    }

    /// Largest Gram side and the number of matching rows not taken up by
    /// the bound variable.
    pub fn size_summary(&self) -> (usize, usize) {
        let side = self.blocks.iter().map(|b| b.basis.len()).max().unwrap_or(0);
        let absorbed = match &self.weight {
            Some(w) if self.gamma.is_some() => w.len(),
            _ => 0,
        };
        (side, self.num_matching_rows() - absorbed)
    }
}

/// Builds `target - gamma * weight = sum_k b_k^T Q_k b_k` with each `Q_k` in `cone`,
/// maximising `gamma` when a weight is given and plain feasibility otherwise.
pub fn compile_bound(
    target: &Polynomial,
    weight: Option<&Polynomial>,
    bases: Vec<GramBasis>,
    cone: GramCone,
) -> Result<CompiledProgram, CompileError> {
    let n = target.n();
    if let Some(w) = weight {
        if w.n() != n {
            return Err(CompileError::DimensionMismatch { expected: n, found: w.n() });
        }
        if w.is_zero() {
            return Err(CompileError::Invalid("bound weight is the zero polynomial".into()));
        }
    }
    if bases.is_empty() || bases.iter().any(GramBasis::is_empty) {
        return Err(CompileError::Invalid("empty Gram basis".into()));
    }
    for b in &bases {
        let bn = b.monomials().n();
        if bn != n {
            return Err(CompileError::DimensionMismatch { expected: n, found: bn });
        }
        if let GramBasis::Transformed { monomials, transform } = b {
            if transform.ncols() != monomials.len() {
                return Err(CompileError::Invalid("basis transform width differs from its monomial count".into()));
            }
        }
    }

    let mut cones = Vec::new();
    let mut offset = 0;
    let gamma = weight.map(|_| {
        cones.push(Cone::Free(1));
        offset = 1;
        0
    });
    let mut blocks = Vec::with_capacity(bases.len());
    for basis in bases {
        let num_vars = GramBlock::var_count(cone, basis.len());
        let block = GramBlock { basis, cone, offset, num_vars };
        cones.extend(block.cones());
        offset += num_vars;
        blocks.push(block);
    }
    let num_vars = offset;

    let mut rows: BTreeMap<Exponent, Vec<(usize, f64)>> = BTreeMap::new();
    for block in &blocks {
        for ((k, l), terms) in block.basis.pair_products() {
            let w = if k == l { 1.0 } else { 2.0 };
            let vars = block.entry_vars(k, l);
            for (e, c) in terms {
                let row = rows.entry(e).or_default();
                if c != 0.0 {
                    row.extend(vars.iter().map(|&(v, m)| (v, w * c * m)));
                }
            }
        }
    }
    for (alpha, _) in target.terms().chain(weight.into_iter().flat_map(|w| w.terms())) {
        if !rows.contains_key(alpha) {
            return Err(CompileError::Uncoverable(alpha.to_string()));
        }
    }
    if let (Some(w), Some(g)) = (weight, gamma) {
        for (alpha, h) in w.terms() {
            rows.get_mut(alpha).unwrap().push((g, h));
        }
    }

    let mut row_monomials = Vec::with_capacity(rows.len());
    let mut a_rows = Vec::with_capacity(rows.len());
    let mut b = Vec::with_capacity(rows.len());
    for (alpha, mut entries) in rows {
        let rhs = target.coefficient(&alpha);
        merge_entries(&mut entries);
        // transformed bases can cancel a product exactly
        if entries.is_empty() {
            if rhs != 0.0 {
                return Err(CompileError::Uncoverable(alpha.to_string()));
            }
            continue;
        }
        row_monomials.push(alpha);
        a_rows.push(entries);
        b.push(rhs);
    }
    for block in &blocks {
        for row in block.side_rows() {
            a_rows.push(row);
            b.push(0.0);
        }
    }

    let mut objective = vec![0.0; num_vars];
    if let Some(g) = gamma {
        objective[g] = -1.0;
    }
    let a = SparseMatrix::from_rows(num_vars, a_rows)?;
    let program = ConicProgram::new(objective, a, b, cones)?;
    Ok(CompiledProgram {
        program,
        blocks,
        gamma,
        row_monomials,
        target: target.clone(),
        weight: weight.cloned(),
    })
}

fn merge_entries(entries: &mut Vec<(usize, f64)>) {
    entries.sort_by_key(|&(v, _)| v);
    let mut out: Vec<(usize, f64)> = Vec::with_capacity(entries.len());
    for &(v, c) in entries.iter() {
        match out.last_mut() {
            Some(last) if last.0 == v => last.1 += c,
            _ => out.push((v, c)),
        }
    }
    out.retain(|&(_, c)| c != 0.0);
    *entries = out;
}
