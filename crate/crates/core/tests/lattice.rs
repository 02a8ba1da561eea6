use std::collections::HashSet;

use multree::enumerate::generate_all;
use multree::lattice::{
    build_hasse, covers, deg_minus, deg_plus, degree, lattice_distance, lub, max_degree_tree, present_edges,
    refinements_below, LatticeGraph,
};
use multree::{FMatrix, TreeShape};

/// Minimal common upper bounds of `a` and `b` under the transitive closure
/// of the covering relation.
fn minimal_common_upper_bounds(g: &LatticeGraph, ups: &[Vec<bool>], a: usize, b: usize) -> Vec<usize> {
    let common: Vec<usize> = (0..g.len()).filter(|&v| ups[a][v] && ups[b][v]).collect();
    common
        .iter()
        .copied()
        .filter(|&v| !common.iter().any(|&w| w != v && ups[w][v]))
        .collect()
}

#[test]
fn lub_matches_order_closure() {
    for n in 2..=6 {
        let g = build_hasse(n).unwrap();
        let ups: Vec<Vec<bool>> = (0..g.len()).map(|v| g.upper_set(v)).collect();
        for a in 0..g.len() {
            for b in 0..g.len() {
                let minimal = minimal_common_upper_bounds(&g, &ups, a, b);
                assert_eq!(minimal.len(), 1, "N={n}: {} {}", g.vertices()[a], g.vertices()[b]);
                let got = lub(&g.vertices()[a], &g.vertices()[b]).unwrap();
                assert_eq!(
                    got,
                    g.vertices()[minimal[0]],
                    "N={n}: {} {}",
                    g.vertices()[a],
                    g.vertices()[b]
                );
            }
        }
    }
}

#[test]
fn order_is_antisymmetric() {
    for n in 3..=6 {
        let g = build_hasse(n).unwrap();
        let ups: Vec<Vec<bool>> = (0..g.len()).map(|v| g.upper_set(v)).collect();
        for (a, ua) in ups.iter().enumerate() {
            for (b, ub) in ups.iter().enumerate() {
                if a != b {
                    assert!(!(ua[b] && ub[a]));
                }
            }
        }
    }
}

#[test]
fn distance_axioms_and_bounds() {
    for n in 3..=6 {
        let all = generate_all(n, None).unwrap();
        let d: Vec<Vec<usize>> = all
            .iter()
            .map(|a| all.iter().map(|b| lattice_distance(a, b).unwrap()).collect())
            .collect();
        for i in 0..all.len() {
            for j in 0..all.len() {
                let (ka, kb) = (all[i].n_internal(), all[j].n_internal());
                assert_eq!(d[i][j] == 0, i == j);
                assert_eq!(d[i][j], d[j][i]);
                assert!(ka.abs_diff(kb) <= d[i][j]);
                assert!(d[i][j] <= ka + kb - 2);
                for m in 0..all.len() {
                    assert!(d[i][j] <= d[i][m] + d[m][j]);
                }
            }
        }
    }
}

#[test]
fn binary_to_star_distance() {
    for n in 3..=8 {
        let star = TreeShape::star(n).unwrap();
        for s in generate_all(n, Some(n - 1)).unwrap() {
            assert_eq!(lattice_distance(&s, &star).unwrap(), n - 2);
        }
    }
}

#[test]
fn degree_formulas_match_graph() {
    for n in 2..=7 {
        let g = build_hasse(n).unwrap();
        for (v, s) in g.vertices().iter().enumerate() {
            let (up, down) = g.degrees(v);
            assert_eq!(deg_plus(s), up as u128);
            assert_eq!(deg_minus(s), down as u128);
            assert_eq!(covers(s).len(), up);
            let below: HashSet<TreeShape> = refinements_below(s).into_iter().collect();
            assert_eq!(below.len(), down);
            assert_eq!(deg_minus(s) == 0, s.is_binary());
        }
    }
}

#[test]
fn edge_tests_agree() {
    for n in 2..=7 {
        for s in generate_all(n, None).unwrap() {
            let f = FMatrix::from_shape(&s);
            let via_f: Vec<usize> = (1..s.n_internal()).filter(|&e| f.has_edge(e)).collect();
            assert_eq!(via_f, present_edges(&s));
        }
    }
}

#[test]
fn max_degree_tree_is_the_argmax() {
    for n in 4..=9 {
        let (tree, m) = max_degree_tree(n).unwrap();
        let all = generate_all(n, None).unwrap();
        let best = all.iter().map(degree).max().unwrap();
        assert_eq!(best, m);
        let argmax: Vec<&TreeShape> = all.iter().filter(|s| degree(s) == m).collect();
        assert_eq!(argmax, vec![&tree]);
    }
}

#[test]
fn hasse_structure() {
    for n in 2..=7 {
        let g = build_hasse(n).unwrap();
        assert!(g.is_connected());
        let star = g.index_of(&TreeShape::star(n).unwrap()).unwrap();
        let maxima: Vec<usize> = (0..g.len()).filter(|&v| g.up(v).is_empty()).collect();
        assert_eq!(maxima, vec![star]);
        for s in g.vertices() {
            let mut x = s.clone();
            for _ in 1..s.n_internal() {
                x = x.collapse_edge(1).unwrap();
            }
            assert!(x.is_star());
        }
        let handshake: usize = (0..g.len()).map(|v| g.degrees(v).1).sum();
        assert_eq!(handshake, g.edges().len());
        let total: u128 = g.vertices().iter().map(degree).sum();
        if n >= 4 {
            let (_, m) = max_degree_tree(n).unwrap();
            assert!(total <= g.len() as u128 * m);
        }
    }
}

#[test]
fn diameters() {
    let g4 = build_hasse(4).unwrap();
    assert_eq!(g4.diameter(), 3);
    for n in 5..=7 {
        let g = build_hasse(n).unwrap();
        assert!(g.diameter() >= 2 * (n - 3));
    }
    for n in 3..=7 {
        let g = build_hasse(n).unwrap();
        let star = g.index_of(&TreeShape::star(n).unwrap()).unwrap();
        let dist = g.distances_from(star);
        for (v, s) in g.vertices().iter().enumerate() {
            if s.is_binary() {
                assert!(dist[v].unwrap() <= n - 2);
            }
        }
    }
}
