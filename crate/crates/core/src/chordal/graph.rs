use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::ChordalError;
use crate::conic::{svec_position, Cone, ConicProgram};
use crate::poly::Polynomial;

/// Undirected simple graph on vertices `0..n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SparsityGraph {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl SparsityGraph {
    pub fn new(n: usize) -> Self {
        Self { n, edges: BTreeSet::new() }
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Self::new(n);
        for j in 0..n {
            for i in 0..j {
                g.add_edge(i, j);
            }
        }
        g
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, ChordalError> {
        let mut g = Self::new(n);
        for (i, j) in edges {
            if i >= n || j >= n {
                return Err(ChordalError::VertexOutOfRange { vertex: i.max(j), n });
            }
            g.add_edge(i, j);
        }
        Ok(g)
    }

    /// Adds `{i, j}`; self-loops are ignored.
    pub fn add_edge(&mut self, i: usize, j: usize) {
        assert!(i < self.n && j < self.n, "vertex out of range");
        if i != j {
            self.edges.insert((i.min(j), i.max(j)));
        }
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.edges.contains(&(i.min(j), i.max(j)))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn adjacency(&self) -> Vec<BTreeSet<usize>> {
        let mut adj = vec![BTreeSet::new(); self.n];
        for &(i, j) in &self.edges {
            adj[i].insert(j);
            adj[j].insert(i);
        }
        adj
    }
}

/// Variables that share a term are adjacent.
pub fn correlative_graph(p: &Polynomial) -> SparsityGraph {
    let mut g = SparsityGraph::new(p.n());
    for (e, _) in p.terms() {
        let support: Vec<usize> = e.support().collect();
        for (k, &i) in support.iter().enumerate() {
            for &j in &support[k + 1..] {
                g.add_edge(i, j);
            }
        }
    }
    g
}

/// Index of the single PSD block of `p` and its side.
pub(crate) fn single_psd(p: &ConicProgram) -> Result<(usize, usize), ChordalError> {
    let psd: Vec<(usize, usize)> = p
        .cones
        .iter()
        .enumerate()
        .filter_map(|(k, c)| match c {
            Cone::Psd(side) => Some((k, *side)),
            _ => None,
        })
        .collect();
    match psd.as_slice() {
        [one] => Ok(*one),
        [] => Err(ChordalError::PsdBlockCount(0)),
        many => Err(ChordalError::PsdBlockCount(many.len())),
    }
}

/// Union of the off-diagonal patterns of the cost and constraint matrices of
/// the program's only PSD block.
pub fn aggregate_graph(p: &ConicProgram) -> Result<SparsityGraph, ChordalError> {
    let (block, side) = single_psd(p)?;
    let offset = p.cone_offsets()[block];
    let len = side * (side + 1) / 2;
    let mut g = SparsityGraph::new(side);
    let mut mark = |var: usize| {
        if (offset..offset + len).contains(&var) {
            let (i, j) = svec_position(var - offset);
            g.add_edge(i, j);
        }
    };
    for (v, &c) in p.objective.iter().enumerate() {
        if c != 0.0 {
            mark(v);
        }
    }
    for (cols, _) in p.a.rows() {
        cols.iter().for_each(|&v| mark(v));
    }
    Ok(g)
}
