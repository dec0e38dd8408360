mod common;

use proptest::prelude::*;

use pmuplace::eadj::{sorted_pairs, threshold_adjacency};
use pmuplace::harness::{electrical_structure, PipelineOptions};
use pmuplace::resistance::{resistance_matrix, ResistanceMatrix};
use pmuplace::{AdjacencySource, DenseMatrix};

fn distances() -> impl Strategy<Value = ResistanceMatrix> {
    (3usize..12).prop_flat_map(|n| {
        // small integer grid so that ties are common
        prop::collection::vec(1u8..6, n * (n - 1) / 2).prop_map(move |vals| {
            let mut m = DenseMatrix::zeros(n, n);
            let mut k = 0;
            for i in 0..n {
                for j in i + 1..n {
                    m[(i, j)] = f64::from(vals[k]) / 3.0;
                    m[(j, i)] = m[(i, j)];
                    k += 1;
                }
            }
            ResistanceMatrix::from_matrix(m)
        })
    })
}

proptest! {
    #[test]
    fn edge_sets_are_nested(e in distances(), a in 1usize..100, b in 1usize..100) {
        let max = e.n() * (e.n() - 1) / 2;
        let (m1, m2) = (a.min(b).min(max), a.max(b).min(max));
        let small = threshold_adjacency(&e, m1).unwrap().adjacency;
        let large = threshold_adjacency(&e, m2).unwrap().adjacency;
        for (i, j) in small.edges() {
            prop_assert!(large.get(i, j));
        }
    }

    #[test]
    fn selected_distances_are_the_m_smallest(e in distances(), m in 1usize..100) {
        let n = e.n();
        let m = m.min(n * (n - 1) / 2);
        let r = threshold_adjacency(&e, m).unwrap();
        let mut selected: Vec<f64> = r.adjacency.edges().iter().map(|&(i, j)| e.get(i, j)).collect();
        let mut all: Vec<f64> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).map(|(i, j)| e.get(i, j)).collect();
        selected.sort_by(f64::total_cmp);
        all.sort_by(f64::total_cmp);
        prop_assert_eq!(&selected[..], &all[..m]);

        let adj = &r.adjacency;
        prop_assert_eq!(adj.edge_count(), m);
        prop_assert_eq!(adj.source(), AdjacencySource::Electrical);
        let worst_selected = selected.last().copied().unwrap();
        for i in 0..n {
            prop_assert!(adj.get(i, i));
            for j in 0..n {
                prop_assert_eq!(adj.get(i, j), adj.get(j, i));
                if i != j && !adj.get(i, j) {
                    prop_assert!(e.get(i, j) >= worst_selected);
                }
            }
        }
        prop_assert!(r.tau >= worst_selected);
    }
}

#[test]
fn unit_path_threshold() {
    let l = common::laplacian(3, &[(0, 1, 1.0), (1, 2, 1.0)]);
    let e = resistance_matrix(&l, 0).unwrap();
    let r = threshold_adjacency(&e, 2).unwrap();
    assert_eq!(r.adjacency.edges(), vec![(0, 1), (1, 2)]);
    assert!((r.tau - 2.0).abs() < 1e-12);
}

#[test]
fn computed_unit_triangle_ties_break_lexicographically() {
    let l = common::laplacian(3, &[(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]);
    for ground in 0..3 {
        let e = resistance_matrix(&l, ground).unwrap();
        let r = threshold_adjacency(&e, 2).unwrap();
        assert_eq!(r.adjacency.edges(), vec![(0, 1), (0, 2)]);
        assert_eq!(r.ties_broken, 1);
    }
}

#[test]
fn bundled_cases_get_exactly_m_edges() {
    for name in pmuplace::bundled::NAMES {
        let case = common::case(name);
        let s = electrical_structure(&case, &PipelineOptions::default()).unwrap();
        assert_eq!(s.adjacency().edge_count(), case.branch_count(), "{name}");
        let pairs = sorted_pairs(&s.distance.distances);
        assert_eq!(pairs.len(), case.bus_count() * (case.bus_count() - 1) / 2);
    }
}

#[test]
fn edges_override() {
    let case = common::case("case14");
    let opts = PipelineOptions {
        edges: Some(5),
        ..Default::default()
    };
    let s = electrical_structure(&case, &opts).unwrap();
    assert_eq!(s.adjacency().edge_count(), 5);
}
