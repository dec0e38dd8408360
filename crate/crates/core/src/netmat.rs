//! Network matrices: bus admittance, topological adjacency and the
//! power-angle block of the power-flow Jacobian.

use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::caseio::PowerCase;
use crate::eadj::{AdjacencySource, BinaryAdjacency};
use crate::error::{Error, Result};
use crate::fmt::sig12;
use crate::linalg::DenseMatrix;

/// Dense complex Ybus in p.u. on the system base.
#[derive(Debug, Clone, PartialEq)]
pub struct AdmittanceMatrix {
    n: usize,
    entries: Vec<Complex64>,
    /// Entries that received at least one branch or shunt contribution.
    pattern: Vec<bool>,
}

impl AdmittanceMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.n + j]
    }

    pub fn is_structural_nonzero(&self, i: usize, j: usize) -> bool {
        self.pattern[i * self.n + j]
    }

    pub fn structural_nonzeros(&self) -> usize {
        self.pattern.iter().filter(|&&p| p).count()
    }

    pub fn real(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j).re)
    }

    pub fn imag(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j).im)
    }

    fn add(&mut self, i: usize, j: usize, v: Complex64) {
        self.entries[i * self.n + j] += v;
        self.pattern[i * self.n + j] = true;
    }

    /// Long-format CSV over structural nonzeros: `from_bus,to_bus,g,b`.
    pub fn to_csv(&self, case: &PowerCase) -> String {
        let mut out = String::from("from_bus,to_bus,g,b\n");
        for i in 0..self.n {
            for j in 0..self.n {
                if self.is_structural_nonzero(i, j) {
                    let y = self.get(i, j);
                    let _ = writeln!(
                        out,
                        "{},{},{},{}",
                        case.bus_label(i),
                        case.bus_label(j),
                        sig12(y.re),
                        sig12(y.im)
                    );
                }
            }
        }
        out
    }

    pub fn to_json(&self, case: &PowerCase) -> Result<String> {
        #[derive(Serialize)]
        struct Dump {
            n: usize,
            bus_ids: Vec<i64>,
            real: Vec<Vec<f64>>,
            imag: Vec<Vec<f64>>,
        }
        let dump = Dump {
            n: self.n,
            bus_ids: case.buses().iter().map(|b| b.id).collect(),
            real: self.real().to_rows(),
            imag: self.imag().to_rows(),
        };
        Ok(serde_json::to_string_pretty(&dump)?)
    }
}

pub fn build_ybus(case: &PowerCase) -> Result<AdmittanceMatrix> {
    let n = case.bus_count();
    let mut y = AdmittanceMatrix {
        n,
        entries: vec![Complex64::new(0.0, 0.0); n * n],
        pattern: vec![false; n * n],
    };
    for br in case.in_service_branches() {
        if br.r == 0.0 && br.x == 0.0 {
            return Err(Error::SingularBranch {
                from: br.from_bus,
                to: br.to_bus,
            });
        }
        let (f, t) = case.endpoints(br);
        let ys = Complex64::new(br.r, br.x).inv();
        let charging = Complex64::new(0.0, br.b_charging / 2.0);
        let ratio = br.ratio();
        let tap = Complex64::from_polar(ratio, br.shift.to_radians());

        y.add(f, f, (ys + charging) / (ratio * ratio));
        y.add(t, t, ys + charging);
        y.add(f, t, -ys / tap.conj());
        y.add(t, f, -ys / tap);
    }
    for i in 0..n {
        let (g, b) = case.shunt_pu(i);
        if g != 0.0 || b != 0.0 {
            y.add(i, i, Complex64::new(g, b));
        }
    }
    Ok(y)
}

/// Closed-neighbourhood adjacency of the physical network: unit diagonal and
/// a one for every bus pair joined by at least one in-service branch.
pub fn topological_adjacency(case: &PowerCase) -> BinaryAdjacency {
    let edges = case.in_service_branches().map(|br| case.endpoints(br));
    BinaryAdjacency::from_edges(case.bus_count(), edges, AdjacencySource::Topological)
}

/// Bus voltage magnitudes (p.u.) and angles (radians).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VoltageProfile {
    v_mag: Vec<f64>,
    v_ang: Vec<f64>,
}

#[derive(Deserialize)]
struct ProfileFile {
    v_mag: Vec<f64>,
    v_ang_deg: Vec<f64>,
}

impl VoltageProfile {
    pub fn new(v_mag: Vec<f64>, v_ang: Vec<f64>) -> Result<Self> {
        if v_mag.len() != v_ang.len() {
            return Err(Error::DimensionMismatch {
                expected: v_mag.len(),
                got: v_ang.len(),
            });
        }
        if let Some(i) = v_mag.iter().position(|&v| v.is_nan() || v <= 0.0) {
            return Err(Error::Validation(format!(
                "voltage magnitude at index {i} must be positive, got {}",
                v_mag[i]
            )));
        }
        Ok(Self { v_mag, v_ang })
    }

    /// Reads `{"v_mag": [...], "v_ang_deg": [...]}` and checks it has `n`
    /// entries.
    pub fn from_json(text: &str, n: usize) -> Result<Self> {
        let file: ProfileFile = serde_json::from_str(text)?;
        if file.v_mag.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: file.v_mag.len(),
            });
        }
        let v_ang = file.v_ang_deg.iter().map(|d| d.to_radians()).collect();
        Self::new(file.v_mag, v_ang)
    }

    /// Profile stored in the case's own Vm/Va columns.
    pub fn from_case(case: &PowerCase) -> Self {
        Self {
            v_mag: case.buses().iter().map(|b| b.v_mag).collect(),
            v_ang: case.buses().iter().map(|b| b.v_ang.to_radians()).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.v_mag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.v_mag.is_empty()
    }

    pub fn v_mag(&self) -> &[f64] {
        &self.v_mag
    }

    /// Radians.
    pub fn v_ang(&self) -> &[f64] {
        &self.v_ang
    }
}

/// V = 1, θ = 0 at every bus.
pub fn flat_profile(case: &PowerCase) -> VoltageProfile {
    let n = case.bus_count();
    VoltageProfile {
        v_mag: vec![1.0; n],
        v_ang: vec![0.0; n],
    }
}

/// ∂P/∂θ evaluated at a voltage profile.
#[derive(Debug, Clone, PartialEq)]
pub struct PAngleJacobian {
    entries: DenseMatrix,
    evaluated_at: VoltageProfile,
}

impl PAngleJacobian {
    pub fn n(&self) -> usize {
        self.entries.rows()
    }

    pub fn entries(&self) -> &DenseMatrix {
        &self.entries
    }

    pub fn evaluated_at(&self) -> &VoltageProfile {
        &self.evaluated_at
    }

    pub fn into_matrix(self) -> DenseMatrix {
        self.entries
    }

    pub fn to_csv(&self, case: &PowerCase) -> String {
        matrix_csv(&self.entries, case)
    }
}

/// ∂P/∂θ with H_ij = V_i V_j (G_ij sin θ_ij − B_ij cos θ_ij) off the diagonal
/// and H_ii = −Σ_{j≠i} H_ij.
pub fn power_angle_jacobian(case: &PowerCase, profile: &VoltageProfile) -> Result<PAngleJacobian> {
    let n = case.bus_count();
    if profile.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: profile.len(),
        });
    }
    let y = build_ybus(case)?;
    let (vm, va) = (profile.v_mag(), profile.v_ang());
    let mut h = DenseMatrix::zeros(n, n);
    for i in 0..n {
        let mut diag = 0.0;
        for j in 0..n {
            if i == j || !y.is_structural_nonzero(i, j) {
                continue;
            }
            let yij = y.get(i, j);
            let (s, c) = (va[i] - va[j]).sin_cos();
            let hij = vm[i] * vm[j] * (yij.re * s - yij.im * c);
            h[(i, j)] = hij;
            diag -= hij;
        }
        h[(i, i)] = diag;
    }
    Ok(PAngleJacobian {
        entries: h,
        evaluated_at: profile.clone(),
    })
}

/// Dense matrix as CSV with a header row of bus labels and a label column.
pub fn matrix_csv(m: &DenseMatrix, case: &PowerCase) -> String {
    let mut out = String::from("bus");
    for b in case.buses() {
        let _ = write!(out, ",{}", b.id);
    }
    out.push('\n');
    for i in 0..m.rows() {
        let _ = write!(out, "{}", case.bus_label(i));
        for v in m.row(i) {
            let _ = write!(out, ",{}", sig12(*v));
        }
        out.push('\n');
    }
    out
}
