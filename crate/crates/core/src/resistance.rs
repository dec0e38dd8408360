//! Resistance distance from a Laplacian-like conductance matrix.
//!
//! The conductance matrix is grounded at one node, the remaining block is
//! inverted, and the distance between every pair of nodes is read off the
//! inverse:
//!
//! ```text
//! e(i,j) = g⁻¹_ii + g⁻¹_jj − g⁻¹_ij − g⁻¹_ji       (i, j ≠ r)
//! e(r,k) = e(k,r) = g⁻¹_kk
//! e(i,i) = 0
//! ```

use serde::Serialize;

use crate::caseio::PowerCase;
use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, Lu};
use crate::netmat::{power_angle_jacobian, PAngleJacobian, VoltageProfile};

/// Inverse of the conductance matrix with the ground row and column removed.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundedInverse {
    ground: usize,
    entries: DenseMatrix,
    gamma: Vec<f64>,
}

impl GroundedInverse {
    pub fn ground(&self) -> usize {
        self.ground
    }

    pub fn n_reduced(&self) -> usize {
        self.gamma.len()
    }

    pub fn entries(&self) -> &DenseMatrix {
        &self.entries
    }

    /// Diagonal of the inverse.
    pub fn gamma(&self) -> &[f64] {
        &self.gamma
    }

    /// ‖G_kk · G_kk⁻¹ − I‖_max against the matrix that was inverted.
    pub fn residual(&self, g: &DenseMatrix) -> f64 {
        let reduced = g.without(self.ground);
        reduced
            .matmul(&self.entries)
            .max_abs_diff(&DenseMatrix::identity(self.n_reduced()))
    }

    /// Maps a reduced index back to the original node index.
    fn original(&self, k: usize) -> usize {
        if k < self.ground {
            k
        } else {
            k + 1
        }
    }
}

pub fn ground_and_invert(g: &DenseMatrix, ground: usize) -> Result<GroundedInverse> {
    if !g.is_square() {
        return Err(Error::DimensionMismatch {
            expected: g.rows(),
            got: g.cols(),
        });
    }
    let n = g.rows();
    if n < 2 {
        return Err(Error::Validation(format!("need at least 2 nodes, got {n}")));
    }
    if ground >= n {
        return Err(Error::IndexOutOfRange { index: ground, n });
    }
    let reduced = g.without(ground);
    let lu = Lu::factor(&reduced).map_err(|zp| Error::Singular {
        node: if zp.0 < ground { zp.0 } else { zp.0 + 1 },
    })?;
    let entries = lu.inverse();
    let gamma = (0..n - 1).map(|k| entries[(k, k)]).collect();
    Ok(GroundedInverse {
        ground,
        entries,
        gamma,
    })
}

/// Full N×N resistance-distance matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ResistanceMatrix {
    entries: DenseMatrix,
    ground: usize,
}

impl ResistanceMatrix {
    /// Wraps an arbitrary square matrix, e.g. for checking metric properties
    /// of hand-built data. No invariants are enforced.
    pub fn from_matrix(entries: DenseMatrix) -> Self {
        assert!(entries.is_square());
        Self { entries, ground: 0 }
    }

    pub fn n(&self) -> usize {
        self.entries.rows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[(i, j)]
    }

    pub fn entries(&self) -> &DenseMatrix {
        &self.entries
    }

    pub fn ground_index(&self) -> usize {
        self.ground
    }
}

pub fn resistance_from_inverse(inv: &GroundedInverse) -> ResistanceMatrix {
    let n = inv.n_reduced() + 1;
    let g = inv.entries();
    let gamma = inv.gamma();
    let mut e = DenseMatrix::zeros(n, n);
    for a in 0..inv.n_reduced() {
        let i = inv.original(a);
        for b in 0..inv.n_reduced() {
            let j = inv.original(b);
            if i != j {
                e[(i, j)] = gamma[a] + gamma[b] - g[(a, b)] - g[(b, a)];
            }
        }
        e[(inv.ground, i)] = gamma[a];
        e[(i, inv.ground)] = gamma[a];
    }
    ResistanceMatrix {
        entries: e,
        ground: inv.ground,
    }
}

pub fn resistance_matrix(g: &DenseMatrix, ground: usize) -> Result<ResistanceMatrix> {
    Ok(resistance_from_inverse(&ground_and_invert(g, ground)?))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricReport {
    pub n: usize,
    pub max_diagonal: f64,
    pub max_symmetry_violation: f64,
    pub min_entry: f64,
    pub max_triangle_violation: f64,
    /// (i, k, j) with e(i,k) − e(i,j) − e(j,k) maximal, if any triple exists.
    pub worst_triple: Option<(usize, usize, usize)>,
    pub triples_checked: u64,
    pub tolerance: f64,
    pub passed: bool,
}

pub const METRIC_TOLERANCE: f64 = 1e-9;

/// Exhaustive check of the metric axioms over every pair and every triple.
pub fn check_metric(e: &ResistanceMatrix) -> MetricReport {
    let n = e.n();
    let m = e.entries();
    let mut max_diagonal: f64 = 0.0;
    let mut max_sym: f64 = 0.0;
    let mut min_entry = f64::INFINITY;
    for i in 0..n {
        max_diagonal = max_diagonal.max(m[(i, i)].abs());
        for j in 0..n {
            if i != j {
                min_entry = min_entry.min(m[(i, j)]);
                max_sym = max_sym.max((m[(i, j)] - m[(j, i)]).abs());
            }
        }
    }
    if n < 2 {
        min_entry = 0.0;
    }

    let mut worst = f64::NEG_INFINITY;
    let mut worst_triple = None;
    let mut triples = 0u64;
    for i in 0..n {
        for k in i + 1..n {
            let direct = m[(i, k)];
            for j in 0..n {
                if j == i || j == k {
                    continue;
                }
                triples += 1;
                let v = direct - m[(i, j)] - m[(j, k)];
                if v > worst {
                    worst = v;
                    worst_triple = Some((i, k, j));
                }
            }
        }
    }
    let max_triangle = if worst_triple.is_some() {
        worst.max(0.0)
    } else {
        0.0
    };
    let tol = METRIC_TOLERANCE;
    MetricReport {
        n,
        max_diagonal,
        max_symmetry_violation: max_sym,
        min_entry,
        max_triangle_violation: max_triangle,
        worst_triple: if max_triangle > 0.0 {
            worst_triple
        } else {
            None
        },
        triples_checked: triples,
        tolerance: tol,
        passed: max_diagonal <= tol && max_sym <= tol && min_entry >= -tol && max_triangle <= tol,
    }
}

/// Turns a power-angle Jacobian into a symmetric conductance matrix.
/// Returns the asymmetry that was removed, if any (phase shifters).
pub fn conductance_from_jacobian(h: PAngleJacobian) -> (DenseMatrix, Option<f64>) {
    let m = h.into_matrix();
    let asym = m.asymmetry();
    if asym > 1e-12 * m.max_abs().max(1.0) {
        (m.symmetrized(), Some(asym))
    } else {
        (m, None)
    }
}

/// Resistance distances of a case at a voltage profile.
#[derive(Debug, Clone)]
pub struct ElectricalDistance {
    pub distances: ResistanceMatrix,
    /// Set when ∂P/∂θ was asymmetric and had to be symmetrized.
    pub symmetrized: Option<f64>,
}

/// Jacobian → grounding → inversion. `ground` defaults to the slack bus.
pub fn electrical_distance(
    case: &PowerCase,
    profile: &VoltageProfile,
    ground: Option<usize>,
) -> Result<ElectricalDistance> {
    let h = power_angle_jacobian(case, profile)?;
    let (g, symmetrized) = conductance_from_jacobian(h);
    let r = ground.unwrap_or(case.slack_index());
    Ok(ElectricalDistance {
        distances: resistance_matrix(&g, r)?,
        symmetrized,
    })
}
