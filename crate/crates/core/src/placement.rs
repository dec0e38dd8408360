//! Minimum PMU placement for complete observability.
//!
//! With a unit-diagonal adjacency A, `min Σx s.t. Ax ≥ 1, x ∈ {0,1}` is a
//! minimum dominating set, solved here as a set cover: row i is covered by
//! any column j with a_ij = 1.
//!
//! The exact solver is a depth-first branch and bound:
//!
//! * incumbent seeded by the greedy cover;
//! * branch on the uncovered row with the fewest admissible columns, trying
//!   each admissible column in turn and forbidding the earlier siblings in
//!   later branches, so no cover is visited twice;
//! * bound by a greedy packing of uncovered rows whose admissible column sets
//!   are pairwise disjoint (each needs its own column), combined with
//!   ⌈uncovered / best column gain⌉.

use std::time::{Duration, Instant};

use fixedbitset::FixedBitSet;
use serde::Serialize;

use crate::eadj::BinaryAdjacency;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveStatus {
    Optimal,
    FeasibleUpperBound,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlacementResult {
    /// x_i = 1 if a PMU is installed at bus i.
    pub x: Vec<u8>,
    pub count: usize,
    pub status: SolveStatus,
    pub lower_bound: usize,
    #[serde(skip)]
    pub elapsed: Duration,
    pub node_count: u64,
}

impl PlacementResult {
    fn from_sites(n: usize, sites: &[usize], status: SolveStatus, lower_bound: usize) -> Self {
        let mut x = vec![0u8; n];
        for &s in sites {
            x[s] = 1;
        }
        Self {
            x,
            count: sites.len(),
            status,
            lower_bound,
            elapsed: Duration::ZERO,
            node_count: 0,
        }
    }

    /// Indices with x_i = 1, ascending.
    pub fn sites(&self) -> Vec<usize> {
        self.x
            .iter()
            .enumerate()
            .filter(|(_, &v)| v == 1)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn is_optimal(&self) -> bool {
        self.status == SolveStatus::Optimal
    }
}

pub const DEFAULT_BUDGET: Duration = Duration::from_secs(600);

/// True when every row of A·x is at least one.
pub fn is_feasible(a: &BinaryAdjacency, x: &[u8]) -> bool {
    (0..a.n()).all(|i| a.row(i).ones().any(|j| x[j] == 1))
}

fn check_well_formed(a: &BinaryAdjacency) {
    for i in 0..a.n() {
        assert!(a.get(i, i), "adjacency row {i} has a zero diagonal");
    }
}

/// ⌈N / (1 + Δ)⌉: one column covers at most 1 + Δ rows.
pub fn degree_bound(a: &BinaryAdjacency) -> usize {
    let n = a.n();
    if n == 0 {
        return 0;
    }
    n.div_ceil(1 + a.max_degree())
}

pub fn greedy_cover(a: &BinaryAdjacency) -> PlacementResult {
    check_well_formed(a);
    let start = Instant::now();
    let n = a.n();
    let mut uncovered = FixedBitSet::with_capacity(n);
    uncovered.insert_range(..);
    let mut sites = Vec::new();
    while !uncovered.is_clear() {
        let (best, _) = (0..n)
            .map(|j| (j, a.row(j).intersection(&uncovered).count()))
            .fold((0, 0), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
        sites.push(best);
        uncovered.difference_with(a.row(best));
    }
    sites.sort_unstable();
    let mut result =
        PlacementResult::from_sites(n, &sites, SolveStatus::FeasibleUpperBound, degree_bound(a));
    result.elapsed = start.elapsed();
    assert!(is_feasible(a, &result.x));
    result
}

pub const BRUTE_FORCE_LIMIT: usize = 25;

/// Enumerates subsets by increasing size, each size in lexicographic order,
/// and returns the first cover found.
pub fn brute_force_placement(a: &BinaryAdjacency) -> Result<PlacementResult> {
    check_well_formed(a);
    let n = a.n();
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLarge {
            n,
            max: BRUTE_FORCE_LIMIT,
        });
    }
    let start = Instant::now();
    let masks: Vec<u32> = (0..n)
        .map(|j| a.row(j).ones().fold(0u32, |m, i| m | (1 << i)))
        .collect();
    let full: u32 = if n == 0 { 0 } else { u32::MAX >> (32 - n) };
    let mut checked = 0u64;
    for k in 0..=n {
        let mut combo: Vec<usize> = (0..k).collect();
        loop {
            checked += 1;
            let covered = combo.iter().fold(0u32, |m, &j| m | masks[j]);
            if covered == full {
                let mut r = PlacementResult::from_sites(n, &combo, SolveStatus::Optimal, k);
                r.elapsed = start.elapsed();
                r.node_count = checked;
                return Ok(r);
            }
            if !next_combination(&mut combo, n) {
                break;
            }
        }
    }
    unreachable!("the full vertex set always covers a unit-diagonal matrix")
}

fn next_combination(combo: &mut [usize], n: usize) -> bool {
    let k = combo.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if combo[i] < n - k + i {
            combo[i] += 1;
            for j in i + 1..k {
                combo[j] = combo[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

struct Search<'a> {
    a: &'a BinaryAdjacency,
    n: usize,
    best: Vec<usize>,
    nodes: u64,
    deadline: Instant,
    timed_out: bool,
}

impl Search<'_> {
    /// Lower bound on columns still needed and the row to branch on.
    /// `None` when some uncovered row has no admissible column left.
    fn bound(&self, uncovered: &FixedBitSet, allowed: &FixedBitSet) -> Option<(usize, usize)> {
        let mut options: Vec<(usize, usize)> = Vec::with_capacity(uncovered.count_ones(..));
        for i in uncovered.ones() {
            let c = self.a.row(i).intersection(allowed).count();
            if c == 0 {
                return None;
            }
            options.push((c, i));
        }
        options.sort_unstable();
        let branch_row = options[0].1;

        let mut blocked = FixedBitSet::with_capacity(self.n);
        let mut packing = 0;
        for &(_, i) in &options {
            let row = self.a.row(i);
            if row.intersection(allowed).all(|j| !blocked.contains(j)) {
                for j in row.intersection(allowed) {
                    blocked.insert(j);
                }
                packing += 1;
            }
        }

        let max_gain = allowed
            .ones()
            .map(|j| self.a.row(j).intersection(uncovered).count())
            .max()
            .unwrap_or(0);
        let by_gain = options.len().div_ceil(max_gain.max(1));
        Some((packing.max(by_gain), branch_row))
    }

    fn run(&mut self, uncovered: FixedBitSet, mut allowed: FixedBitSet, chosen: &mut Vec<usize>) {
        self.nodes += 1;
        if self.nodes.is_multiple_of(1024) && Instant::now() >= self.deadline {
            self.timed_out = true;
        }
        if self.timed_out {
            return;
        }
        if uncovered.is_clear() {
            if chosen.len() < self.best.len() {
                self.best = chosen.clone();
            }
            return;
        }
        let Some((lb, row)) = self.bound(&uncovered, &allowed) else {
            return;
        };
        if chosen.len() + lb >= self.best.len() {
            return;
        }

        let mut candidates: Vec<(usize, usize)> = self
            .a
            .row(row)
            .intersection(&allowed)
            .map(|j| (self.a.row(j).intersection(&uncovered).count(), j))
            .collect();
        candidates.sort_unstable_by(|x, y| y.0.cmp(&x.0).then(x.1.cmp(&y.1)));

        for (_, j) in candidates {
            let mut next = uncovered.clone();
            next.difference_with(self.a.row(j));
            chosen.push(j);
            self.run(next, allowed.clone(), chosen);
            chosen.pop();
            allowed.set(j, false);
            if self.timed_out {
                return;
            }
        }
    }
}

/// Exact minimum placement within `budget`. On expiry the best cover found is
/// returned with status `FeasibleUpperBound` and the root lower bound.
pub fn solve_placement(a: &BinaryAdjacency, budget: Duration) -> PlacementResult {
    check_well_formed(a);
    let start = Instant::now();
    let n = a.n();
    let greedy = greedy_cover(a);

    let mut uncovered = FixedBitSet::with_capacity(n);
    uncovered.insert_range(..);
    let mut allowed = FixedBitSet::with_capacity(n);
    allowed.insert_range(..);

    let mut search = Search {
        a,
        n,
        best: greedy.sites(),
        nodes: 0,
        deadline: start + budget,
        timed_out: false,
    };
    let root_bound = if n == 0 {
        0
    } else {
        search
            .bound(&uncovered, &allowed)
            .map(|(lb, _)| lb)
            .expect("unit diagonal makes every row coverable")
            .max(degree_bound(a))
    };
    let mut chosen = Vec::new();
    search.run(uncovered, allowed, &mut chosen);

    let mut sites = search.best.clone();
    sites.sort_unstable();
    let (status, lower_bound) = if search.timed_out {
        (SolveStatus::FeasibleUpperBound, root_bound.min(sites.len()))
    } else {
        (SolveStatus::Optimal, sites.len())
    };
    let mut result = PlacementResult::from_sites(n, &sites, status, lower_bound);
    result.node_count = search.nodes;
    result.elapsed = start.elapsed();
    assert!(
        is_feasible(a, &result.x),
        "solver returned an infeasible placement"
    );
    result
}
