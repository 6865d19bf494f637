use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::graph::SparsityGraph;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtendOptions {
    /// Merge clique-tree neighbours whose overlap ratio
    /// `|C_a & C_b| / |C_a | C_b|` exceeds `merge_ratio`.
    pub merge: bool,
    pub merge_ratio: f64,
}

impl Default for ExtendOptions {
    fn default() -> Self {
        Self { merge: true, merge_ratio: 0.75 }
    }
}

/// Maximal cliques of a chordal extension, arranged on a tree (a forest when
/// the graph is disconnected).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CliqueTree {
    pub n: usize,
    /// Sorted vertex lists; also the row selectors of each clique.
    pub cliques: Vec<Vec<usize>>,
    /// Edges added to make the graph chordal, including those from merging.
    pub fill_edges: Vec<(usize, usize)>,
    /// Pairs of clique indices.
    pub tree_edges: Vec<(usize, usize)>,
}

impl CliqueTree {
    /// True when `(i, j)` lies inside some clique (diagonal entries always do).
    pub fn in_pattern(&self, i: usize, j: usize) -> bool {
        i == j || self.cliques.iter().any(|c| c.binary_search(&i).is_ok() && c.binary_search(&j).is_ok())
    }

    /// First clique containing both `i` and `j`.
    pub fn owner(&self, i: usize, j: usize) -> Option<usize> {
        self.cliques.iter().position(|c| c.binary_search(&i).is_ok() && c.binary_search(&j).is_ok())
    }

    pub fn intersection(&self, a: usize, b: usize) -> Vec<usize> {
        intersect(&self.cliques[a], &self.cliques[b])
    }

    /// The chordal graph whose maximal cliques these are.
    pub fn extended_graph(&self) -> SparsityGraph {
        let mut g = SparsityGraph::new(self.n);
        for c in &self.cliques {
            for (k, &i) in c.iter().enumerate() {
                for &j in &c[k + 1..] {
                    g.add_edge(i, j);
                }
            }
        }
        g
    }

    /// Every vertex's cliques form a connected subtree.
    pub fn running_intersection_holds(&self) -> bool {
        let p = self.cliques.len();
        let mut adj = vec![Vec::new(); p];
        for &(a, b) in &self.tree_edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        (0..self.n).all(|v| {
            let holders: Vec<usize> = (0..p).filter(|&k| self.cliques[k].binary_search(&v).is_ok()).collect();
            let Some(&start) = holders.first() else { return true };
            // walk the tree restricted to cliques holding v
            let mut seen = vec![false; p];
            let mut stack = vec![start];
            seen[start] = true;
            let mut reached = 1;
            while let Some(k) = stack.pop() {
                for &nb in &adj[k] {
                    if !seen[nb] && self.cliques[nb].binary_search(&v).is_ok() {
                        seen[nb] = true;
                        reached += 1;
                        stack.push(nb);
                    }
                }
            }
            reached == holders.len()
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("clique tree serializes")
    }
}

pub(crate) fn intersect(a: &[usize], b: &[usize]) -> Vec<usize> {
    a.iter().copied().filter(|v| b.binary_search(v).is_ok()).collect()
}

/// Chordal extension by greedy minimum-degree elimination (ties to the lowest
/// index), with clique merging on.
pub fn chordal_extend(g: &SparsityGraph) -> CliqueTree {
    chordal_extend_with(g, &ExtendOptions::default())
}

pub fn chordal_extend_with(g: &SparsityGraph, opts: &ExtendOptions) -> CliqueTree {
    let n = g.n();
    let mut adj = g.adjacency();
    let mut alive = vec![true; n];
    let mut fill = BTreeSet::new();
    let mut candidates: Vec<Vec<usize>> = Vec::with_capacity(n);
    for _ in 0..n {
        let v = (0..n).filter(|&v| alive[v]).min_by_key(|&v| (adj[v].len(), v)).unwrap();
        let nbrs: Vec<usize> = adj[v].iter().copied().collect();
        for (k, &a) in nbrs.iter().enumerate() {
            for &b in &nbrs[k + 1..] {
                if adj[a].insert(b) {
                    adj[b].insert(a);
                    fill.insert((a.min(b), a.max(b)));
                }
            }
        }
        for &a in &nbrs {
            adj[a].remove(&v);
        }
        alive[v] = false;
        let mut clique = nbrs;
        clique.push(v);
        clique.sort_unstable();
        candidates.push(clique);
    }
    let mut cliques = maximal_only(candidates);

    if opts.merge {
        while let Some((a, b)) = merge_candidate(&cliques, opts.merge_ratio) {
            let mut union = cliques[a].clone();
            union.extend_from_slice(&cliques[b]);
            union.sort_unstable();
            union.dedup();
            for (k, &i) in union.iter().enumerate() {
                for &j in &union[k + 1..] {
                    let in_graph = g.has_edge(i, j) || fill.contains(&(i, j));
                    if !in_graph {
                        fill.insert((i, j));
                    }
                }
            }
            let (hi, lo) = (a.max(b), a.min(b));
            cliques.remove(hi);
            cliques[lo] = union;
            cliques = maximal_only(cliques);
        }
    }
    cliques.sort();
    let tree_edges = spanning_tree(&cliques);
    CliqueTree { n, cliques, fill_edges: fill.into_iter().collect(), tree_edges }
}

fn maximal_only(mut sets: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
    sets.sort_by_key(|c| std::cmp::Reverse(c.len()));
    let mut kept: Vec<Vec<usize>> = Vec::new();
    for c in sets {
        let covered = kept.iter().any(|k| c.iter().all(|v| k.binary_search(v).is_ok()));
        if !covered {
            kept.push(c);
        }
    }
    kept
}

fn merge_candidate(cliques: &[Vec<usize>], ratio: f64) -> Option<(usize, usize)> {
    let mut best: Option<(f64, usize, usize)> = None;
    for (a, b) in spanning_tree(cliques) {
        let shared = intersect(&cliques[a], &cliques[b]).len() as f64;
        let union = (cliques[a].len() + cliques[b].len()) as f64 - shared;
        let r = shared / union;
        if r > ratio && best.is_none_or(|(br, _, _)| r > br) {
            best = Some((r, a, b));
        }
    }
    best.map(|(_, a, b)| (a, b))
}

/// Maximum-weight spanning forest of the clique intersection graph (Kruskal,
/// positive weights only).
fn spanning_tree(cliques: &[Vec<usize>]) -> Vec<(usize, usize)> {
    let p = cliques.len();
    let mut pairs = Vec::new();
    for b in 0..p {
        for a in 0..b {
            let w = intersect(&cliques[a], &cliques[b]).len();
            if w > 0 {
                pairs.push((w, a, b));
            }
        }
    }
    pairs.sort_by(|x, y| y.0.cmp(&x.0).then((x.1, x.2).cmp(&(y.1, y.2))));
    let mut parent: Vec<usize> = (0..p).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    let mut edges = Vec::new();
    for (_, a, b) in pairs {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra] = rb;
            edges.push((a, b));
        }
    }
    edges
}

/// Chordality test: maximum cardinality search, then a check that the
/// reversed visit order is a perfect elimination ordering.
pub fn is_chordal(g: &SparsityGraph) -> bool {
    let n = g.n();
    let adj = g.adjacency();
    let mut weight = vec![0usize; n];
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let v = (0..n).filter(|&v| !visited[v]).max_by_key(|&v| (weight[v], std::cmp::Reverse(v))).unwrap();
        visited[v] = true;
        order.push(v);
        for &w in &adj[v] {
            if !visited[w] {
                weight[w] += 1;
            }
        }
    }
    // position in the elimination order (reverse of the visit order)
    let mut pos = vec![0; n];
    for (k, &v) in order.iter().rev().enumerate() {
        pos[v] = k;
    }
    for v in 0..n {
        // neighbours eliminated after v must be pairwise adjacent; it suffices
        // that they are all adjacent to the earliest one among them
        let later: Vec<usize> = adj[v].iter().copied().filter(|&w| pos[w] > pos[v]).collect();
        if let Some(&first) = later.iter().min_by_key(|&&w| pos[w]) {
            if later.iter().any(|&w| w != first && !adj[first].contains(&w)) {
                return false;
            }
        }
    }
    true
}
