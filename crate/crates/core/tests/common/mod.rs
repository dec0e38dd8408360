#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use pmuplace::{AdjacencySource, BinaryAdjacency, DenseMatrix, PowerCase};

pub fn case(name: &str) -> PowerCase {
    pmuplace::bundled::load(name)
        .expect("bundled case")
        .expect("parses")
}

/// Weighted edge list of a random connected graph: a random spanning tree
/// plus extra edges with probability `extra`.
pub fn random_connected(rng: &mut ChaCha8Rng, n: usize, extra: f64) -> Vec<(usize, usize, f64)> {
    let mut edges = Vec::new();
    for k in 1..n {
        let parent = rng.gen_range(0..k);
        edges.push((parent, k, rng.gen_range(0.1..10.0)));
    }
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(extra)
                && !edges
                    .iter()
                    .any(|&(a, b, _)| (a, b) == (i, j) || (a, b) == (j, i))
            {
                edges.push((i, j, rng.gen_range(0.1..10.0)));
            }
        }
    }
    edges
}

/// Laplacian with the given edge conductances.
pub fn laplacian(n: usize, edges: &[(usize, usize, f64)]) -> DenseMatrix {
    let mut l = DenseMatrix::zeros(n, n);
    for &(i, j, g) in edges {
        l[(i, i)] += g;
        l[(j, j)] += g;
        l[(i, j)] -= g;
        l[(j, i)] -= g;
    }
    l
}

/// e(i,j) = L⁺_ii + L⁺_jj − 2L⁺_ij with L⁺ from an SVD pseudoinverse.
pub fn pinv_resistance(l: &DenseMatrix) -> DenseMatrix {
    let n = l.rows();
    let m = DMatrix::from_fn(n, n, |i, j| l[(i, j)]);
    let p = m.pseudo_inverse(1e-10).expect("svd");
    DenseMatrix::from_fn(n, n, |i, j| p[(i, i)] + p[(j, j)] - 2.0 * p[(i, j)])
}

/// Random symmetric unit-diagonal 0/1 matrix.
pub fn random_adjacency(rng: &mut ChaCha8Rng, n: usize, density: f64) -> BinaryAdjacency {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(density) {
                edges.push((i, j));
            }
        }
    }
    BinaryAdjacency::from_edges(n, edges, AdjacencySource::Topological)
}
