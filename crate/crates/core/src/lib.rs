//! Electrical structure of power networks and minimum PMU placement.
//!
//! The crate reads MATPOWER cases, builds the bus admittance matrix and the
//! power-angle Jacobian ∂P/∂θ, turns the Jacobian into a resistance-distance
//! matrix, thresholds that into a binary "electrical" adjacency with as many
//! edges as the network has branches, and solves the minimum PMU placement
//! (a minimum dominating set) on either the physical or the electrical
//! adjacency.
//!
//! ```
//! use pmuplace::{bundled, harness, placement, netmat};
//!
//! let case = bundled::load("case9").unwrap().unwrap();
//! let topo = netmat::topological_adjacency(&case);
//! let r = placement::solve_placement(&topo, placement::DEFAULT_BUDGET);
//! assert_eq!(r.count, 3);
//!
//! let elec = harness::electrical_structure(&case, &Default::default()).unwrap();
//! assert_eq!(elec.adjacency().edge_count(), case.branch_count());
//! ```

pub mod bundled;
pub mod caseio;
pub mod eadj;
pub mod error;
pub mod fmt;
pub mod harness;
pub mod linalg;
pub mod netmat;
pub mod placement;
pub mod resistance;
pub mod structural;

pub use caseio::{parse_case, validate_case, Branch, Bus, BusKind, CaseWarning, PowerCase};
pub use eadj::{threshold_adjacency, AdjacencySource, BinaryAdjacency, ThresholdResult};
pub use error::{Error, Result};
pub use linalg::DenseMatrix;
pub use netmat::{
    build_ybus, flat_profile, power_angle_jacobian, topological_adjacency, AdmittanceMatrix,
    PAngleJacobian, VoltageProfile,
};
pub use placement::{
    brute_force_placement, greedy_cover, solve_placement, PlacementResult, SolveStatus,
};
pub use resistance::{
    check_metric, ground_and_invert, resistance_matrix, GroundedInverse, MetricReport,
    ResistanceMatrix,
};
pub use structural::{
    connected_components, consistency_check, heuristic_placement, lambda_vector,
    ComponentDecomposition, HeuristicPlacement, LambdaVector,
};
