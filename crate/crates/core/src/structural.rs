//! Structure of an adjacency matrix: average distances (λ), connected
//! components, and the component-based placement that avoids integer
//! programming.
//!
//! The placement rule: every isolated vertex needs its own PMU, and a
//! complete component needs exactly one. Components that are connected but
//! not complete are solved exactly with [`solve_placement`].

use std::time::Duration;

use serde::Serialize;

use crate::eadj::{AdjacencySource, BinaryAdjacency};
use crate::placement::{solve_placement, PlacementResult, SolveStatus};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LambdaVector {
    pub values: Vec<f64>,
    pub lambda_min: f64,
    pub argmin_set: Vec<usize>,
    pub source: AdjacencySource,
}

/// λ_i = Σ_j a_ij / (N − 1), diagonal included.
pub fn lambda_vector(adj: &BinaryAdjacency) -> LambdaVector {
    let n = adj.n();
    assert!(n >= 2, "λ needs at least two buses");
    let sums: Vec<usize> = (0..n).map(|i| adj.row(i).count_ones(..)).collect();
    let min_sum = *sums.iter().min().expect("n >= 2");
    let denom = (n - 1) as f64;
    LambdaVector {
        values: sums.iter().map(|&s| s as f64 / denom).collect(),
        lambda_min: min_sum as f64 / denom,
        argmin_set: (0..n).filter(|&i| sums[i] == min_sum).collect(),
        source: adj.source(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComponentDecomposition {
    /// Vertex sets in order of their smallest member; each set ascending.
    pub components: Vec<Vec<usize>>,
    pub isolated: Vec<Vec<usize>>,
    /// Components of size ≥ 2 in which every pair is adjacent.
    pub clique_components: Vec<Vec<usize>>,
}

impl ComponentDecomposition {
    pub fn isolated_count(&self) -> usize {
        self.isolated.len()
    }

    /// Sizes of the components with two or more vertices.
    pub fn non_trivial_sizes(&self) -> Vec<usize> {
        self.components
            .iter()
            .map(Vec::len)
            .filter(|&s| s > 1)
            .collect()
    }
}

pub fn connected_components(adj: &BinaryAdjacency) -> ComponentDecomposition {
    let n = adj.n();
    let mut seen = vec![false; n];
    let mut components = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut comp = vec![start];
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            for w in adj.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    comp.push(w);
                    stack.push(w);
                }
            }
        }
        comp.sort_unstable();
        components.push(comp);
    }
    let isolated = components
        .iter()
        .filter(|c| c.len() == 1)
        .cloned()
        .collect();
    let clique_components = components
        .iter()
        .filter(|c| c.len() >= 2 && c.iter().all(|&v| adj.degree(v) == c.len() - 1))
        .cloned()
        .collect();
    ComponentDecomposition {
        components,
        isolated,
        clique_components,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ComponentKind {
    Isolated,
    Clique,
    /// Connected but not complete; placed by exact search.
    General,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComponentPlacement {
    pub vertices: Vec<usize>,
    pub kind: ComponentKind,
    pub sites: Vec<usize>,
    /// False only if the exact search on a general component ran out of time.
    pub proven: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HeuristicPlacement {
    pub count: usize,
    pub sites: Vec<usize>,
    pub per_component: Vec<ComponentPlacement>,
}

/// One PMU per isolated vertex, one per complete component (at its lowest
/// index), exact search on anything else. `lambda` must come from `adj`.
pub fn heuristic_placement(
    adj: &BinaryAdjacency,
    lambda: &LambdaVector,
    budget: Duration,
) -> HeuristicPlacement {
    assert_eq!(
        lambda.values.len(),
        adj.n(),
        "λ does not belong to this adjacency"
    );
    let decomposition = connected_components(adj);
    let mut per_component = Vec::with_capacity(decomposition.components.len());
    for comp in &decomposition.components {
        let placement = if comp.len() == 1 {
            ComponentPlacement {
                vertices: comp.clone(),
                kind: ComponentKind::Isolated,
                sites: comp.clone(),
                proven: true,
            }
        } else if decomposition.clique_components.contains(comp) {
            ComponentPlacement {
                vertices: comp.clone(),
                kind: ComponentKind::Clique,
                sites: vec![comp[0]],
                proven: true,
            }
        } else {
            let sub = adj.induced(comp);
            let r = solve_placement(&sub, budget);
            ComponentPlacement {
                vertices: comp.clone(),
                kind: ComponentKind::General,
                sites: r.sites().into_iter().map(|k| comp[k]).collect(),
                proven: r.status == SolveStatus::Optimal,
            }
        };
        per_component.push(placement);
    }
    let mut sites: Vec<usize> = per_component
        .iter()
        .flat_map(|c| c.sites.iter().copied())
        .collect();
    sites.sort_unstable();
    HeuristicPlacement {
        count: sites.len(),
        sites,
        per_component,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Consistency {
    pub agree: bool,
    pub heuristic_count: usize,
    pub ilp_count: usize,
    pub ilp_status: SolveStatus,
    pub detail: String,
}

pub fn consistency_check(heuristic: &HeuristicPlacement, ilp: &PlacementResult) -> Consistency {
    let agree = heuristic.count == ilp.count;
    let detail = if agree {
        format!("both methods place {} PMUs", ilp.count)
    } else {
        let isolated = heuristic
            .per_component
            .iter()
            .filter(|c| c.kind == ComponentKind::Isolated)
            .count();
        format!(
            "component rule gives {} ({} isolated, {} other components) but exact search gives {} ({:?})",
            heuristic.count,
            isolated,
            heuristic.per_component.len() - isolated,
            ilp.count,
            ilp.status
        )
    };
    Consistency {
        agree,
        heuristic_count: heuristic.count,
        ilp_count: ilp.count,
        ilp_status: ilp.status,
        detail,
    }
}
