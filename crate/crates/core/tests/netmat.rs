mod common;

use pmuplace::netmat::{
    build_ybus, flat_profile, power_angle_jacobian, topological_adjacency, VoltageProfile,
};
use pmuplace::parse_case;

#[test]
fn case9_ybus_pattern_and_dominance() {
    let case = common::case("case9");
    let y = build_ybus(&case).unwrap();
    assert_eq!(y.structural_nonzeros(), 9 + 2 * 9);
    // line charging is the only thing that reduces |Y_ii| below Σ|Y_ij| here
    let mut charged = vec![false; 9];
    for br in case.in_service_branches() {
        if br.b_charging > 0.0 {
            let (f, t) = case.endpoints(br);
            charged[f] = true;
            charged[t] = true;
        }
    }
    for i in 0..9 {
        let off: f64 = (0..9).filter(|&j| j != i).map(|j| y.get(i, j).norm()).sum();
        let dominant = y.get(i, i).norm() >= off - 1e-12;
        assert_eq!(dominant, !charged[i], "bus {}", case.bus_label(i));
    }
}

#[test]
fn case14_topological_nonzeros() {
    let case = common::case("case14");
    let a = topological_adjacency(&case);
    let ones: usize = a.to_dense().iter().flatten().map(|&v| v as usize).sum();
    assert_eq!(ones, 14 + 2 * 20);
}

#[test]
fn adjacency_symmetric_unit_diagonal_and_at_most_m_pairs() {
    for name in pmuplace::bundled::NAMES {
        let case = common::case(name);
        let a = topological_adjacency(&case);
        let d = a.to_dense();
        for i in 0..a.n() {
            assert_eq!(d[i][i], 1);
            for j in 0..a.n() {
                assert_eq!(d[i][j], d[j][i]);
            }
        }
        assert!(a.edge_count() <= case.branch_count(), "{name}");
    }
}

#[test]
fn flat_jacobian_is_negated_susceptance_off_diagonal() {
    for name in pmuplace::bundled::NAMES {
        let case = common::case(name);
        let y = build_ybus(&case).unwrap();
        let h = power_angle_jacobian(&case, &flat_profile(&case)).unwrap();
        let n = case.bus_count();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    worst = worst.max((h.entries()[(i, j)] + y.get(i, j).im).abs());
                }
            }
        }
        assert!(worst <= 1e-12, "{name}: {worst}");
    }
}

#[test]
fn case9_flat_jacobian_matches_independent_susceptance_laplacian() {
    // −imag(Ybus) off the diagonal, diagonal rebuilt as minus the off-diagonal row sum
    // (which drops line charging and shunts)
    let case = common::case("case9");
    let y = build_ybus(&case).unwrap();
    let h = power_angle_jacobian(&case, &flat_profile(&case)).unwrap();
    let mut oracle = y.imag();
    for i in 0..9 {
        let mut s = 0.0;
        for j in 0..9 {
            if i != j {
                oracle[(i, j)] = -oracle[(i, j)];
                s += oracle[(i, j)];
            }
        }
        oracle[(i, i)] = -s;
    }
    assert!(h.entries().max_abs_diff(&oracle) < 1e-12);
}

#[test]
fn lossless_shunt_free_rows_sum_to_zero() {
    let text = "mpc.baseMVA = 100;\nmpc.bus = [\n1 3 0 0 0 0 1 1 0;\n2 1 0 0 0 0 1 1 0;\n3 1 0 0 0 0 1 1 0;\n4 1 0 0 0 0 1 1 0;\n];\nmpc.branch = [\n1 2 0 0.1 0 0 0 0 0 0 1;\n2 3 0 0.2 0 0 0 0 0 0 1;\n3 4 0 0.05 0 0 0 0 0 0 1;\n4 1 0 0.3 0 0 0 0 0 0 1;\n1 3 0 0.15 0 0 0 0 0 0 1;\n];\n";
    let case = parse_case(text).unwrap();
    let h = power_angle_jacobian(&case, &flat_profile(&case)).unwrap();
    assert!(h.entries().asymmetry() < 1e-12);
    for i in 0..4 {
        let s: f64 = h.entries().row(i).iter().sum();
        assert!(s.abs() < 1e-10);
    }
}

#[test]
fn non_flat_profile_changes_the_jacobian() {
    let case = common::case("case14");
    let flat = power_angle_jacobian(&case, &flat_profile(&case)).unwrap();
    let solved = power_angle_jacobian(&case, &VoltageProfile::from_case(&case)).unwrap();
    assert!(flat.entries().max_abs_diff(solved.entries()) > 1e-3);
    assert_eq!(solved.evaluated_at().len(), 14);
}
