mod common;

use std::time::Duration;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pmuplace::placement::{degree_bound, is_feasible, DEFAULT_BUDGET};
use pmuplace::{
    brute_force_placement, greedy_cover, solve_placement, topological_adjacency, BinaryAdjacency,
};

#[test]
fn matches_brute_force_on_random_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..200 {
        let n = rng.gen_range(4..=18);
        let density = rng.gen_range(0.1..=0.6);
        let a = common::random_adjacency(&mut rng, n, density);
        let exact = solve_placement(&a, DEFAULT_BUDGET);
        let brute = brute_force_placement(&a).unwrap();
        assert_eq!(exact.count, brute.count);
        assert!(exact.is_optimal());
        assert!(is_feasible(&a, &exact.x) && is_feasible(&a, &brute.x));
        assert_eq!(exact.lower_bound, exact.count);
        let g = greedy_cover(&a);
        assert!(is_feasible(&a, &g.x));
        assert!(g.count >= exact.count);
    }
}

#[test]
fn adding_edges_never_increases_the_optimum() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..30 {
        let n = rng.gen_range(5..=25);
        let mut edges: Vec<(usize, usize)> = Vec::new();
        let mut last = usize::MAX;
        for _ in 0..6 {
            for _ in 0..rng.gen_range(1..=n) {
                let i = rng.gen_range(0..n);
                let j = rng.gen_range(0..n);
                edges.push((i, j));
            }
            let a = BinaryAdjacency::from_edges(
                n,
                edges.iter().copied(),
                pmuplace::AdjacencySource::Topological,
            );
            let count = solve_placement(&a, DEFAULT_BUDGET).count;
            assert!(count <= last);
            last = count;
        }
    }
}

#[test]
fn bounds_are_sane_even_when_the_budget_expires() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let a = common::random_adjacency(&mut rng, 150, 0.03);
        let r = solve_placement(&a, Duration::ZERO);
        assert!(is_feasible(&a, &r.x));
        assert!(r.lower_bound <= r.count);
        assert!(r.lower_bound >= degree_bound(&a));
    }
}

#[test]
fn topological_counts_for_small_cases() {
    let a9 = topological_adjacency(&common::case("case9"));
    assert_eq!(solve_placement(&a9, DEFAULT_BUDGET).count, 3);
    assert_eq!(brute_force_placement(&a9).unwrap().count, 3);
    let a14 = topological_adjacency(&common::case("case14"));
    assert_eq!(solve_placement(&a14, DEFAULT_BUDGET).count, 4);
    assert_eq!(brute_force_placement(&a14).unwrap().count, 4);
}

#[test]
fn result_is_deterministic() {
    let a = topological_adjacency(&common::case("case57"));
    let first = solve_placement(&a, DEFAULT_BUDGET);
    let second = solve_placement(&a, DEFAULT_BUDGET);
    assert_eq!(first.x, second.x);
    assert_eq!(first.node_count, second.node_count);
}
