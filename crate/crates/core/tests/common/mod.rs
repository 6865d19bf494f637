#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use sosrelax::conic::{matrix_to_svec, project_cone, Cone};

pub fn gaussian(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample::<f64, _>(StandardNormal) * 3.0).collect()
}

/// A random point of `cone`, built from its generators rather than by projection.
pub fn cone_member(rng: &mut impl Rng, cone: &Cone) -> Vec<f64> {
    let d = cone.dim();
    match *cone {
        Cone::Zero(_) => vec![0.0; d],
        Cone::Free(_) => gaussian(rng, d),
        Cone::NonNeg(_) => gaussian(rng, d).into_iter().map(f64::abs).collect(),
        Cone::Soc(_) => {
            let mut v = gaussian(rng, d);
            let norm = v[1..].iter().map(|x| x * x).sum::<f64>().sqrt();
            v[0] = norm + v[0].abs();
            v
        }
        Cone::RotSoc(_) => {
            let mut v = gaussian(rng, d);
            let u2: f64 = v[2..].iter().map(|x| x * x).sum();
            v[0] = v[0].abs() + 1e-3;
            v[1] = u2 / (2.0 * v[0]) + v[1].abs();
            v
        }
        Cone::Psd(side) => {
            let k = rng.random_range(1..=side);
            let b = DMatrix::from_fn(side, k, |_, _| rng.sample::<f64, _>(StandardNormal));
            let mut v = vec![0.0; d];
            matrix_to_svec(&(&b * b.transpose()), &mut v);
            v
        }
    }
}

pub fn cone_kinds() -> Vec<Cone> {
    vec![Cone::Zero(4), Cone::Free(4), Cone::NonNeg(5), Cone::Soc(5), Cone::RotSoc(5), Cone::Psd(4)]
}

/// `|v - P(v)|^2 - |v - w|^2`, nonpositive when the projection is no worse than `w`.
pub fn optimality_slack(v: &[f64], w: &[f64], cone: &Cone) -> f64 {
    let p = project_cone(v, cone);
    let dp: f64 = v.iter().zip(&p).map(|(a, b)| (a - b) * (a - b)).sum();
    let dw: f64 = v.iter().zip(w).map(|(a, b)| (a - b) * (a - b)).sum();
    dp - dw
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

use sosrelax::chordal::SparsityGraph;
use sosrelax::conic::{svec_index, ConicProgram, SparseMatrix};

pub fn random_graph(rng: &mut impl Rng, n: usize, p: f64) -> SparsityGraph {
    let mut g = SparsityGraph::new(n);
    for j in 0..n {
        for i in 0..j {
            if rng.random_bool(p) {
                g.add_edge(i, j);
            }
        }
    }
    g
}

/// Maximal cliques by Bron-Kerbosch, each sorted, list sorted.
pub fn maximal_cliques(g: &SparsityGraph) -> Vec<Vec<usize>> {
    let adj = g.adjacency();
    let mut out = Vec::new();
    fn bk(
        r: Vec<usize>,
        p: Vec<usize>,
        x: Vec<usize>,
        adj: &[std::collections::BTreeSet<usize>],
        out: &mut Vec<Vec<usize>>,
    ) {
        if p.is_empty() && x.is_empty() {
            let mut r = r;
            r.sort_unstable();
            out.push(r);
            return;
        }
        let mut p = p;
        let mut x = x;
        while let Some(v) = p.pop() {
            let mut r2 = r.clone();
            r2.push(v);
            let p2 = p.iter().copied().filter(|w| adj[v].contains(w)).collect();
            let x2 = x.iter().copied().filter(|w| adj[v].contains(w)).collect();
            bk(r2, p2, x2, adj, out);
            x.push(v);
        }
    }
    bk(Vec::new(), (0..g.n()).collect(), Vec::new(), &adj, &mut out);
    out.sort();
    out
}

/// Chordal iff no vertex subset of size >= 4 induces a cycle.
pub fn chordal_by_brute_force(g: &SparsityGraph) -> bool {
    let n = g.n();
    for mask in 0u32..(1 << n) {
        if mask.count_ones() < 4 {
            continue;
        }
        let verts: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
        let two_regular = verts.iter().all(|&v| verts.iter().filter(|&&w| g.has_edge(v, w)).count() == 2);
        if !two_regular {
            continue;
        }
        // connected?
        let mut seen = vec![verts[0]];
        let mut k = 0;
        while k < seen.len() {
            let v = seen[k];
            for &w in &verts {
                if g.has_edge(v, w) && !seen.contains(&w) {
                    seen.push(w);
                }
            }
            k += 1;
        }
        if seen.len() == verts.len() {
            return false;
        }
    }
    true
}

pub fn band_graph(n: usize, width: usize) -> SparsityGraph {
    let mut g = SparsityGraph::new(n);
    for j in 0..n {
        for i in j.saturating_sub(width)..j {
            g.add_edge(i, j);
        }
    }
    g
}

/// `min <C, X>` over `X >= 0` with banded data, feasible (an interior point
/// satisfies the rows) and bounded (`C` minus a row combination is positive
/// definite on the band).
pub fn random_band_sdp(rng: &mut impl Rng, n: usize, width: usize, m: usize) -> ConicProgram {
    let dim = n * (n + 1) / 2;
    let in_band = |i: usize, j: usize| i.max(j) - i.min(j) <= width;
    let sym_band = |rng: &mut dyn rand::RngCore| {
        let mut a = DMatrix::zeros(n, n);
        for j in 0..n {
            for i in 0..=j {
                if in_band(i, j) && rng.random_bool(0.7) {
                    let v: f64 = rng.sample(StandardNormal);
                    a[(i, j)] = v;
                    a[(j, i)] = v;
                }
            }
        }
        a
    };
    let x0 = DMatrix::<f64>::identity(n, n);
    let mut rows = Vec::with_capacity(m + 1);
    let mut b = Vec::with_capacity(m + 1);
    let mut mats = Vec::new();
    // trace row keeps the feasible set bounded
    mats.push(DMatrix::<f64>::identity(n, n));
    for _ in 0..m {
        mats.push(sym_band(rng));
    }
    for a in &mats {
        let mut v = vec![0.0; dim];
        matrix_to_svec(a, &mut v);
        rows.push(v.iter().enumerate().filter(|(_, &c)| c != 0.0).map(|(k, &c)| (k, c)).collect());
        b.push(a.dot(&x0));
    }
    let mut c = sym_band(rng);
    for i in 0..n {
        c[(i, i)] += 1.0;
    }
    let mut obj = vec![0.0; dim];
    matrix_to_svec(&c, &mut obj);
    ConicProgram::new(obj, SparseMatrix::from_rows(dim, rows).unwrap(), b, vec![Cone::Psd(n)]).unwrap()
}

/// `X_ij = value` rows for every specified entry; feasible iff a PSD
/// completion exists.
pub fn completion_program(n: usize, entries: &[((usize, usize), f64)]) -> ConicProgram {
    let dim = n * (n + 1) / 2;
    let mut rows = Vec::new();
    let mut b = Vec::new();
    for &((i, j), v) in entries {
        let coeff = if i == j { 1.0 } else { std::f64::consts::FRAC_1_SQRT_2 };
        rows.push(vec![(svec_index(i, j), coeff)]);
        b.push(v);
    }
    ConicProgram::new(vec![0.0; dim], SparseMatrix::from_rows(dim, rows).unwrap(), b, vec![Cone::Psd(n)]).unwrap()
}

/// A partial matrix on the tree's pattern and the smallest clique eigenvalue;
/// roughly half the draws are not completable.
pub fn random_partial(
    rng: &mut impl Rng,
    tree: &sosrelax::chordal::CliqueTree,
) -> (sosrelax::chordal::PartialSymMatrix, f64) {
    let n = tree.n;
    let b = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    let mut m = &b * b.transpose() * (1.0 / n as f64);
    for i in 0..n {
        m[(i, i)] += 0.1;
    }
    if rng.random_bool(0.5) {
        // push one pattern entry past what the diagonal allows
        let clique = &tree.cliques[rng.random_range(0..tree.cliques.len())];
        if clique.len() >= 2 {
            let (i, j) = (clique[0], clique[1]);
            let v = (m[(i, i)] * m[(j, j)]).sqrt() * rng.random_range(1.1..1.6);
            m[(i, j)] = v;
            m[(j, i)] = v;
        } else {
            let i = clique[0];
            m[(i, i)] = -rng.random_range(0.1..1.0);
        }
    }
    let x = sosrelax::chordal::PartialSymMatrix::from_dense(&m, tree);
    let margin = tree
        .cliques
        .iter()
        .map(|c| {
            let sub = DMatrix::from_fn(c.len(), c.len(), |a, b| m[(c[a], c[b])]);
            nalgebra::SymmetricEigen::new(sub).eigenvalues.min()
        })
        .fold(f64::INFINITY, f64::min);
    (x, margin)
}
