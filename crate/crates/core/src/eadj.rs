//! Binary adjacency matrices and the distance-threshold construction of the
//! electrical adjacency.

use fixedbitset::FixedBitSet;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::resistance::ResistanceMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AdjacencySource {
    Topological,
    Electrical,
}

/// Symmetric 0/1 matrix with a unit diagonal, stored as one bitset per row
/// (each row is the closed neighbourhood of its vertex).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryAdjacency {
    rows: Vec<FixedBitSet>,
    edge_count: usize,
    source: AdjacencySource,
}

impl BinaryAdjacency {
    /// Identity plus the given unordered pairs. Self-loops and repeated pairs
    /// are ignored.
    pub fn from_edges(
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
        source: AdjacencySource,
    ) -> Self {
        let mut rows: Vec<FixedBitSet> = (0..n)
            .map(|i| {
                let mut row = FixedBitSet::with_capacity(n);
                row.insert(i);
                row
            })
            .collect();
        let mut edge_count = 0;
        for (i, j) in edges {
            assert!(i < n && j < n, "edge ({i}, {j}) out of range for n = {n}");
            if i != j && !rows[i].contains(j) {
                rows[i].insert(j);
                rows[j].insert(i);
                edge_count += 1;
            }
        }
        Self {
            rows,
            edge_count,
            source,
        }
    }

    /// From a dense 0/1 matrix; rejects asymmetry, a zero diagonal entry or
    /// any value other than 0 and 1.
    pub fn from_dense(rows: &[Vec<u8>], source: AdjacencySource) -> Result<Self> {
        let n = rows.len();
        let mut edges = Vec::new();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: row.len(),
                });
            }
            for (j, &v) in row.iter().enumerate() {
                if v > 1 {
                    return Err(Error::Validation(format!(
                        "entry ({i}, {j}) = {v} is not binary"
                    )));
                }
                if v != rows[j][i] {
                    return Err(Error::Validation(format!("not symmetric at ({i}, {j})")));
                }
                if i == j && v != 1 {
                    return Err(Error::Validation(format!("diagonal entry {i} is zero")));
                }
                if i < j && v == 1 {
                    edges.push((i, j));
                }
            }
        }
        Ok(Self::from_edges(n, edges, source))
    }

    pub fn identity(n: usize, source: AdjacencySource) -> Self {
        Self::from_edges(n, std::iter::empty(), source)
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.rows[i].contains(j)
    }

    /// Closed neighbourhood of `i`.
    pub fn row(&self, i: usize) -> &FixedBitSet {
        &self.rows[i]
    }

    /// Open neighbours of `i` in ascending order.
    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.rows[i].ones().filter(move |&j| j != i)
    }

    /// Number of off-diagonal neighbours.
    pub fn degree(&self, i: usize) -> usize {
        self.rows[i].count_ones(..) - 1
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n()).map(|i| self.degree(i)).max().unwrap_or(0)
    }

    /// Unordered off-diagonal pairs set to one.
    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn source(&self) -> AdjacencySource {
        self.source
    }

    /// Upper-triangle edge list in (i, j) lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.n())
            .flat_map(|i| {
                self.rows[i]
                    .ones()
                    .filter(move |&j| j > i)
                    .map(move |j| (i, j))
            })
            .collect()
    }

    pub fn to_dense(&self) -> Vec<Vec<u8>> {
        (0..self.n())
            .map(|i| (0..self.n()).map(|j| u8::from(self.get(i, j))).collect())
            .collect()
    }

    /// Adjacency restricted to `vertices`, renumbered in the given order.
    pub fn induced(&self, vertices: &[usize]) -> Self {
        let mut edges = Vec::new();
        for (a, &i) in vertices.iter().enumerate() {
            for (b, &j) in vertices.iter().enumerate().skip(a + 1) {
                if self.get(i, j) {
                    edges.push((a, b));
                }
            }
        }
        Self::from_edges(vertices.len(), edges, self.source)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdResult {
    pub adjacency: BinaryAdjacency,
    /// Smallest distance among the unselected pairs (+∞ if every pair was
    /// selected). Selected pairs satisfy e ≤ τ, strictly when there is no tie
    /// at the boundary.
    pub tau: f64,
    /// Unselected pairs whose distance ties the largest selected distance.
    pub ties_broken: usize,
}

/// Distances closer than this fraction of the largest entry are treated as
/// equal when ordering pairs, so that ties survive floating-point noise and
/// are resolved by index order.
pub const TIE_RELATIVE_TOLERANCE: f64 = 1e-12;

/// All unordered pairs (i < j) sorted by distance, with near-equal
/// distances grouped and ordered lexicographically by (i, j).
pub fn sorted_pairs(e: &ResistanceMatrix) -> Vec<(f64, usize, usize)> {
    let n = e.n();
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            pairs.push((e.get(i, j), i, j));
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then((a.1, a.2).cmp(&(b.1, b.2))));

    let scale = pairs
        .iter()
        .fold(0.0f64, |m, p| m.max(p.0.abs()))
        .max(f64::MIN_POSITIVE);
    let tol = TIE_RELATIVE_TOLERANCE * scale;
    let mut start = 0;
    while start < pairs.len() {
        let mut end = start + 1;
        while end < pairs.len() && pairs[end].0 - pairs[start].0 <= tol {
            end += 1;
        }
        pairs[start..end].sort_by_key(|p| (p.1, p.2));
        start = end;
    }
    pairs
}

/// Selects exactly `m` pairs with the smallest distances.
pub fn threshold_adjacency(e: &ResistanceMatrix, m: usize) -> Result<ThresholdResult> {
    let n = e.n();
    let max = n * n.saturating_sub(1) / 2;
    if m < 1 || m > max {
        return Err(Error::EdgeCountOutOfRange { m, max });
    }
    let pairs = sorted_pairs(e);
    let adjacency = BinaryAdjacency::from_edges(
        n,
        pairs[..m].iter().map(|&(_, i, j)| (i, j)),
        AdjacencySource::Electrical,
    );
    let tau = pairs.get(m).map_or(f64::INFINITY, |p| p.0);

    let scale = pairs
        .iter()
        .fold(0.0f64, |s, p| s.max(p.0.abs()))
        .max(f64::MIN_POSITIVE);
    let boundary = pairs[m - 1].0;
    let ties_broken = pairs[m..]
        .iter()
        .take_while(|p| (p.0 - boundary).abs() <= TIE_RELATIVE_TOLERANCE * scale)
        .count();

    Ok(ThresholdResult {
        adjacency,
        tau,
        ties_broken,
    })
}

/// Graphviz rendering. Isolated vertices are drawn as filled boxes and each
/// connected component with two or more vertices gets its own cluster.
pub fn to_dot(adj: &BinaryAdjacency, labels: &[i64], name: &str) -> String {
    use std::fmt::Write as _;

    let decomposition = crate::structural::connected_components(adj);
    let mut out = String::new();
    let _ = writeln!(out, "graph \"{name}\" {{");
    let _ = writeln!(out, "  node [shape=circle];");
    for (k, comp) in decomposition.components.iter().enumerate() {
        if comp.len() == 1 {
            continue;
        }
        let complete = decomposition.clique_components.contains(comp);
        let _ = writeln!(out, "  subgraph cluster_{k} {{");
        let _ = writeln!(
            out,
            "    label=\"component {k} ({} buses{})\";",
            comp.len(),
            if complete { ", complete" } else { "" }
        );
        for &v in comp {
            let _ = writeln!(out, "    {};", labels[v]);
        }
        let _ = writeln!(out, "  }}");
    }
    for comp in &decomposition.isolated {
        let v = comp[0];
        let _ = writeln!(
            out,
            "  {} [shape=box, style=filled, fillcolor=lightgray, xlabel=\"isolated\"];",
            labels[v]
        );
    }
    for (i, j) in adj.edges() {
        let _ = writeln!(out, "  {} -- {};", labels[i], labels[j]);
    }
    let _ = writeln!(out, "}}");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::DenseMatrix;

    fn e(rows: &[&[f64]]) -> ResistanceMatrix {
        ResistanceMatrix::from_matrix(DenseMatrix::from_rows(
            &rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>(),
        ))
    }

    #[test]
    fn triangle_tie_break() {
        let t = 2.0 / 3.0;
        let r = threshold_adjacency(&e(&[&[0.0, t, t], &[t, 0.0, t], &[t, t, 0.0]]), 2).unwrap();
        assert_eq!(r.adjacency.edges(), vec![(0, 1), (0, 2)]);
        assert_eq!(r.ties_broken, 1);
        assert_eq!(r.adjacency.edge_count(), 2);
    }

    #[test]
    fn triangle_tie_break_survives_rounding_noise() {
        let t = 2.0 / 3.0;
        let u = t + 1e-16;
        let r = threshold_adjacency(&e(&[&[0.0, u, t], &[u, 0.0, t], &[t, t, 0.0]]), 2).unwrap();
        assert_eq!(r.adjacency.edges(), vec![(0, 1), (0, 2)]);
    }

    #[test]
    fn path_threshold() {
        let r = threshold_adjacency(
            &e(&[&[0.0, 1.0, 2.0], &[1.0, 0.0, 1.0], &[2.0, 1.0, 0.0]]),
            2,
        )
        .unwrap();
        assert_eq!(r.adjacency.edges(), vec![(0, 1), (1, 2)]);
        assert_eq!(r.tau, 2.0);
        assert_eq!(r.ties_broken, 0);
        assert!((0..3).all(|i| r.adjacency.get(i, i)));
    }

    #[test]
    fn edge_count_range() {
        let m = e(&[&[0.0, 1.0], &[1.0, 0.0]]);
        assert!(matches!(
            threshold_adjacency(&m, 0),
            Err(Error::EdgeCountOutOfRange { .. })
        ));
        assert!(matches!(
            threshold_adjacency(&m, 2),
            Err(Error::EdgeCountOutOfRange { max: 1, .. })
        ));
        let all = threshold_adjacency(&m, 1).unwrap();
        assert_eq!(all.tau, f64::INFINITY);
    }

    #[test]
    fn from_dense_rejects_bad_input() {
        let src = AdjacencySource::Topological;
        assert!(BinaryAdjacency::from_dense(&[vec![1, 1], vec![0, 1]], src).is_err());
        assert!(BinaryAdjacency::from_dense(&[vec![0, 1], vec![1, 1]], src).is_err());
        assert!(BinaryAdjacency::from_dense(&[vec![1, 2], vec![2, 1]], src).is_err());
        let ok = BinaryAdjacency::from_dense(&[vec![1, 1], vec![1, 1]], src).unwrap();
        assert_eq!(ok.edge_count(), 1);
        assert_eq!(ok.to_dense(), vec![vec![1, 1], vec![1, 1]]);
    }

    #[test]
    fn parallel_edges_collapse() {
        let a =
            BinaryAdjacency::from_edges(3, [(0, 1), (1, 0), (0, 1)], AdjacencySource::Topological);
        assert_eq!(a.edge_count(), 1);
    }

    #[test]
    fn dot_flags_isolated() {
        let a =
            BinaryAdjacency::from_edges(4, [(0, 1), (1, 2), (0, 2)], AdjacencySource::Electrical);
        let dot = to_dot(&a, &[1, 2, 3, 4], "g");
        assert!(dot.contains("4 [shape=box"));
        assert!(dot.contains("3 buses, complete"));
        assert!(dot.contains("1 -- 2;"));
    }
}
