//! End-to-end pipeline: case → topological and electrical adjacency →
//! placement, plus the comparison table and figure data exports.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::caseio::{load_case, validate_case, CaseWarning, PowerCase};
use crate::eadj::{threshold_adjacency, to_dot, BinaryAdjacency, ThresholdResult};
use crate::error::{Error, Result};
use crate::fmt::sig12;
use crate::netmat::{flat_profile, topological_adjacency, VoltageProfile};
use crate::placement::{solve_placement, PlacementResult, SolveStatus, DEFAULT_BUDGET};
use crate::resistance::{electrical_distance, ElectricalDistance};
use crate::structural::{
    connected_components, consistency_check, heuristic_placement, lambda_vector,
    ComponentDecomposition, Consistency, HeuristicPlacement, LambdaVector,
};

#[derive(Debug, Clone)]
pub struct PipelineOptions {
    /// Operating point for ∂P/∂θ; flat start when `None`.
    pub profile: Option<VoltageProfile>,
    /// External label of the ground bus; slack bus when `None`.
    pub ground: Option<i64>,
    /// Number of electrical edges; the in-service branch count when `None`.
    pub edges: Option<usize>,
    pub budget: Duration,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        Self {
            profile: None,
            ground: None,
            edges: None,
            budget: DEFAULT_BUDGET,
        }
    }
}

impl PipelineOptions {
    pub fn ground_index(&self, case: &PowerCase) -> Result<Option<usize>> {
        self.ground
            .map(|id| case.bus_index(id).ok_or(Error::UnknownBus(id)))
            .transpose()
    }
}

/// Resistance distances and the thresholded electrical adjacency of a case.
#[derive(Debug, Clone)]
pub struct ElectricalStructure {
    pub distance: ElectricalDistance,
    pub threshold: ThresholdResult,
    pub flat_start: bool,
}

impl ElectricalStructure {
    pub fn adjacency(&self) -> &BinaryAdjacency {
        &self.threshold.adjacency
    }
}

pub fn electrical_structure(
    case: &PowerCase,
    opts: &PipelineOptions,
) -> Result<ElectricalStructure> {
    let flat = flat_profile(case);
    let profile = opts.profile.as_ref().unwrap_or(&flat);
    let distance = electrical_distance(case, profile, opts.ground_index(case)?)?;
    let m = opts.edges.unwrap_or_else(|| case.branch_count());
    let threshold = threshold_adjacency(&distance.distances, m)?;
    Ok(ElectricalStructure {
        distance,
        threshold,
        flat_start: opts.profile.is_none(),
    })
}

/// Everything the structural analysis produces for one electrical adjacency.
#[derive(Debug, Clone, Serialize)]
pub struct StructuralReport {
    pub case: String,
    pub bus_ids: Vec<i64>,
    pub lambda_electrical: LambdaVector,
    pub lambda_topological: LambdaVector,
    pub components: ComponentDecomposition,
    pub heuristic: HeuristicPlacement,
    pub heuristic_bus_ids: Vec<i64>,
}

pub fn structural_report(case: &PowerCase, opts: &PipelineOptions) -> Result<StructuralReport> {
    let elec = electrical_structure(case, opts)?;
    let b = elec.adjacency();
    let lambda = lambda_vector(b);
    let heuristic = heuristic_placement(b, &lambda, opts.budget);
    Ok(StructuralReport {
        case: case.name().to_string(),
        bus_ids: case.buses().iter().map(|b| b.id).collect(),
        lambda_topological: lambda_vector(&topological_adjacency(case)),
        components: connected_components(b),
        heuristic_bus_ids: heuristic.sites.iter().map(|&i| case.bus_label(i)).collect(),
        lambda_electrical: lambda,
        heuristic,
    })
}

/// Heuristic and exact placement on the same electrical adjacency.
pub fn structural_compare(case: &PowerCase, opts: &PipelineOptions) -> Result<Consistency> {
    let elec = electrical_structure(case, opts)?;
    let b = elec.adjacency();
    let heuristic = heuristic_placement(b, &lambda_vector(b), opts.budget);
    let ilp = solve_placement(b, opts.budget);
    Ok(consistency_check(&heuristic, &ilp))
}

/// Published minimum PMU counts keyed by bus count: (N, topological, electrical).
pub const PUBLISHED: [(usize, usize, usize); 7] = [
    (9, 3, 4),
    (14, 4, 7),
    (30, 10, 17),
    (39, 13, 22),
    (57, 17, 35),
    (118, 32, 93),
    (162, 43, 125),
];

pub fn published_counts(n_buses: usize) -> Option<(usize, usize)> {
    PUBLISHED
        .iter()
        .find(|r| r.0 == n_buses)
        .map(|r| (r.1, r.2))
}

#[derive(Debug, Clone, Serialize)]
pub struct TableOneRow {
    pub case_name: String,
    pub n_buses: usize,
    pub n_branches: usize,
    pub topo_count: usize,
    pub topo_status: SolveStatus,
    pub elec_count: usize,
    pub elec_status: SolveStatus,
    pub heuristic_count: usize,
    pub isolated: usize,
    pub flat_start: bool,
    pub published_topo: Option<usize>,
    pub published_elec: Option<usize>,
    #[serde(skip)]
    pub topo_elapsed: Duration,
    #[serde(skip)]
    pub elec_elapsed: Duration,
}

impl TableOneRow {
    pub fn all_optimal(&self) -> bool {
        self.topo_status == SolveStatus::Optimal && self.elec_status == SolveStatus::Optimal
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TableEntry {
    pub case_name: String,
    #[serde(flatten)]
    pub outcome: RowOutcome,
}

#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum RowOutcome {
    Row(TableOneRow),
    Failed { error: String },
}

#[derive(Debug, Clone)]
pub enum CaseSource {
    Bundled(String),
    File(PathBuf),
}

impl CaseSource {
    pub fn name(&self) -> String {
        match self {
            CaseSource::Bundled(n) => n.clone(),
            CaseSource::File(p) => p
                .file_stem()
                .and_then(|s| s.to_str())
                .unwrap_or("case")
                .to_string(),
        }
    }

    pub fn load(&self) -> Result<PowerCase> {
        match self {
            CaseSource::Bundled(n) => crate::bundled::load(n)
                .unwrap_or_else(|| Err(Error::Validation(format!("no bundled case named {n}")))),
            CaseSource::File(p) => load_case(p),
        }
    }
}

pub fn table_row(case: &PowerCase, opts: &PipelineOptions) -> Result<TableOneRow> {
    let t0 = Instant::now();
    let topo = solve_placement(&topological_adjacency(case), opts.budget);
    let topo_elapsed = t0.elapsed();

    let t1 = Instant::now();
    let elec = electrical_structure(case, opts)?;
    let b = elec.adjacency();
    let ilp = solve_placement(b, opts.budget);
    let elec_elapsed = t1.elapsed();

    let heuristic = heuristic_placement(b, &lambda_vector(b), opts.budget);
    let published = published_counts(case.bus_count());
    Ok(TableOneRow {
        case_name: case.name().to_string(),
        n_buses: case.bus_count(),
        n_branches: case.branch_count(),
        topo_count: topo.count,
        topo_status: topo.status,
        elec_count: ilp.count,
        elec_status: ilp.status,
        heuristic_count: heuristic.count,
        isolated: connected_components(b).isolated_count(),
        flat_start: elec.flat_start,
        published_topo: published.map(|p| p.0),
        published_elec: published.map(|p| p.1),
        topo_elapsed,
        elec_elapsed,
    })
}

/// One row per source, in input order. A failing case yields a failed row
/// and does not stop the others.
pub fn run_table(sources: &[CaseSource], opts: &PipelineOptions) -> Vec<TableEntry> {
    sources
        .iter()
        .map(|src| {
            let outcome = src
                .load()
                .and_then(|case| table_row(&case, opts))
                .map_or_else(
                    |e| RowOutcome::Failed {
                        error: e.to_string(),
                    },
                    RowOutcome::Row,
                );
            TableEntry {
                case_name: src.name(),
                outcome,
            }
        })
        .collect()
}

fn opt(v: Option<usize>) -> String {
    v.map_or_else(String::new, |v| v.to_string())
}

fn status(s: SolveStatus) -> &'static str {
    match s {
        SolveStatus::Optimal => "optimal",
        SolveStatus::FeasibleUpperBound => "feasible-upper-bound",
    }
}

pub fn render_table_csv(entries: &[TableEntry], timings: bool) -> String {
    let mut out = String::from(
        "case,n_buses,n_branches,topo_count,topo_status,elec_count,elec_status,heuristic_count,isolated,published_topo,published_elec,error",
    );
    if timings {
        out.push_str(",topo_seconds,elec_seconds");
    }
    out.push('\n');
    for e in entries {
        match &e.outcome {
            RowOutcome::Row(r) => {
                let _ = write!(
                    out,
                    "{},{},{},{},{},{},{},{},{},{},{},",
                    r.case_name,
                    r.n_buses,
                    r.n_branches,
                    r.topo_count,
                    status(r.topo_status),
                    r.elec_count,
                    status(r.elec_status),
                    r.heuristic_count,
                    r.isolated,
                    opt(r.published_topo),
                    opt(r.published_elec)
                );
                if timings {
                    let _ = write!(
                        out,
                        ",{},{}",
                        sig12(r.topo_elapsed.as_secs_f64()),
                        sig12(r.elec_elapsed.as_secs_f64())
                    );
                }
            }
            RowOutcome::Failed { error } => {
                let _ = write!(
                    out,
                    "{},,,,,,,,,,,\"{}\"",
                    e.case_name,
                    error.replace('"', "'")
                );
                if timings {
                    out.push_str(",,");
                }
            }
        }
        out.push('\n');
    }
    out
}

pub fn render_table_json(entries: &[TableEntry]) -> Result<String> {
    Ok(serde_json::to_string_pretty(entries)?)
}

/// Side-by-side comparison with the published counts.
pub fn render_table_diff(entries: &[TableEntry]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<10} {:>5} | {:>5} {:>9} {:>5} | {:>5} {:>9} {:>5} | {:>9}",
        "case", "buses", "topo", "published", "match", "elec", "published", "match", "component"
    );
    let mut any_flat_mismatch = false;
    for e in entries {
        match &e.outcome {
            RowOutcome::Row(r) => {
                let mark = |ours: usize, theirs: Option<usize>| match theirs {
                    Some(t) if t == ours => "yes",
                    Some(_) => "NO",
                    None => "-",
                };
                if r.flat_start && r.published_elec.is_some_and(|p| p != r.elec_count) {
                    any_flat_mismatch = true;
                }
                let _ = writeln!(
                    out,
                    "{:<10} {:>5} | {:>5} {:>9} {:>5} | {:>5} {:>9} {:>5} | {:>9}",
                    r.case_name,
                    r.n_buses,
                    format!(
                        "{}{}",
                        r.topo_count,
                        if r.topo_status == SolveStatus::Optimal {
                            ""
                        } else {
                            "*"
                        }
                    ),
                    opt(r.published_topo),
                    mark(r.topo_count, r.published_topo),
                    format!(
                        "{}{}",
                        r.elec_count,
                        if r.elec_status == SolveStatus::Optimal {
                            ""
                        } else {
                            "*"
                        }
                    ),
                    opt(r.published_elec),
                    mark(r.elec_count, r.published_elec),
                    r.heuristic_count
                );
            }
            RowOutcome::Failed { error } => {
                let _ = writeln!(out, "{:<10} failed: {}", e.case_name, error);
            }
        }
    }
    if entries
        .iter()
        .any(|e| matches!(&e.outcome, RowOutcome::Row(r) if !r.all_optimal()))
    {
        let _ = writeln!(out, "* budget expired before optimality was proven");
    }
    if any_flat_mismatch {
        let _ = writeln!(
            out,
            "note: electrical counts use dP/dtheta at a flat start (V = 1, theta = 0); the published \
             operating point is unknown, so electrical mismatches may reflect that assumption"
        );
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureKind {
    LambdaElectrical,
    LambdaTopological,
    GraphElectrical,
    GraphTopological,
}

impl std::str::FromStr for FigureKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lambda-elec" => Ok(FigureKind::LambdaElectrical),
            "lambda-topo" => Ok(FigureKind::LambdaTopological),
            "graph-elec" => Ok(FigureKind::GraphElectrical),
            "graph-topo" => Ok(FigureKind::GraphTopological),
            other => Err(Error::Validation(format!("unknown figure `{other}`"))),
        }
    }
}

/// `bus,lambda,is_argmin,x` with x from the exact placement on the same
/// adjacency.
pub fn lambda_csv(case: &PowerCase, adj: &BinaryAdjacency, placement: &PlacementResult) -> String {
    let lambda = lambda_vector(adj);
    let mut out = String::from("bus,lambda,is_argmin,x\n");
    for (i, v) in lambda.values.iter().enumerate() {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            case.bus_label(i),
            sig12(*v),
            u8::from(lambda.argmin_set.contains(&i)),
            placement.x[i]
        );
    }
    out
}

pub fn export_figure_data(
    case: &PowerCase,
    which: FigureKind,
    opts: &PipelineOptions,
) -> Result<String> {
    let labels: Vec<i64> = case.buses().iter().map(|b| b.id).collect();
    let adj = match which {
        FigureKind::LambdaTopological | FigureKind::GraphTopological => topological_adjacency(case),
        FigureKind::LambdaElectrical | FigureKind::GraphElectrical => {
            electrical_structure(case, opts)?.threshold.adjacency
        }
    };
    Ok(match which {
        FigureKind::LambdaElectrical | FigureKind::LambdaTopological => {
            let placement = solve_placement(&adj, opts.budget);
            lambda_csv(case, &adj, &placement)
        }
        FigureKind::GraphElectrical | FigureKind::GraphTopological => {
            to_dot(&adj, &labels, case.name())
        }
    })
}

/// Case warnings plus a note when the Jacobian had to be symmetrized.
pub fn pipeline_warnings(case: &PowerCase, elec: Option<&ElectricalStructure>) -> Vec<String> {
    let mut out: Vec<String> = validate_case(case)
        .iter()
        .map(CaseWarning::to_string)
        .collect();
    if let Some(asym) = elec.and_then(|e| e.distance.symmetrized) {
        out.push(format!(
            "dP/dtheta is asymmetric (max |H_ij - H_ji| = {}); using (H + H^T)/2",
            sig12(asym)
        ));
    }
    out
}
