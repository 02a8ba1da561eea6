use multree::chains::{chain_rng, semi_random_init};
use multree::coalescent::{CoalescentSampler, LambdaBeta};
use multree::lattice::{degree, lattice_distance, lub, neighbor_at, neighbors};
use multree::{collapse_edge_f, fmatrix_to_string, string_to_fmatrix, FMatrix, TreeShape};
use proptest::prelude::*;

fn coalescent_shape(n: usize, a: f64, b: f64, seed: u64) -> TreeShape {
    let sampler = CoalescentSampler::new(n, LambdaBeta::new(a, b).unwrap()).unwrap();
    sampler.sample(&mut chain_rng(seed, 0))
}

fn shape(max_n: usize) -> impl Strategy<Value = TreeShape> {
    (2..=max_n, 0.3f64..2.0, 0.3f64..2.0, any::<u64>()).prop_map(|(n, a, b, seed)| coalescent_shape(n, a, b, seed))
}

fn semi_random(max_n: usize) -> impl Strategy<Value = TreeShape> {
    (3..=max_n, any::<u64>())
        .prop_flat_map(|(n, seed)| (Just(n), 1..n, Just(seed)))
        .prop_map(|(n, k, seed)| semi_random_init(n, k, &mut chain_rng(seed, 0)).unwrap())
}

/// Two shapes with the same tip count, drawn from mixed sources.
fn pair(max_n: usize) -> impl Strategy<Value = (TreeShape, TreeShape)> {
    (3..=max_n, any::<u64>(), any::<u64>(), 1usize..100).prop_map(|(n, s1, s2, k)| {
        let x = coalescent_shape(n, 1.0, 1.0, s1);
        let y = semi_random_init(n, k % (n - 1) + 1, &mut chain_rng(s2, 0)).unwrap();
        (x, y)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn encodings_round_trip(s in shape(60)) {
        let f = string_to_fmatrix(&s);
        prop_assert!(f.validate().is_ok());
        prop_assert_eq!(fmatrix_to_string(&f).unwrap(), s.clone());
        prop_assert_eq!(f.to_string().parse::<FMatrix>().unwrap(), f);
        prop_assert_eq!(TreeShape::from_text(&s.to_text()).unwrap(), s.clone());
        prop_assert_eq!(TreeShape::from_json(&s.to_json()).unwrap(), s);
    }

    #[test]
    fn collapse_commutes_with_encoding(s in shape(40), pick in any::<prop::sample::Index>()) {
        let edges: Vec<usize> = (1..s.n_internal()).filter(|&e| s.has_edge(e)).collect();
        prop_assume!(!edges.is_empty());
        let e = edges[pick.index(edges.len())];
        let by_string = s.collapse_edge(e).unwrap();
        let by_matrix = collapse_edge_f(&string_to_fmatrix(&s), e).unwrap();
        prop_assert_eq!(string_to_fmatrix(&by_string), by_matrix);
    }

    #[test]
    fn semi_random_shapes_validate(s in semi_random(80)) {
        prop_assert!(string_to_fmatrix(&s).validate().is_ok());
    }

    #[test]
    fn lub_is_a_commutative_idempotent_upper_bound((x, y) in pair(24)) {
        let j = lub(&x, &y).unwrap();
        prop_assert_eq!(&j, &lub(&y, &x).unwrap());
        prop_assert_eq!(lub(&x, &x).unwrap(), x.clone());
        prop_assert_eq!(lub(&j, &x).unwrap(), j.clone());
        prop_assert_eq!(lub(&j, &y).unwrap(), j.clone());
        prop_assert!(j.n_internal() <= x.n_internal().min(y.n_internal()));
        let d = lattice_distance(&x, &y).unwrap();
        prop_assert_eq!(d, lattice_distance(&y, &x).unwrap());
        prop_assert!(d >= x.n_internal().abs_diff(y.n_internal()));
    }

    #[test]
    fn every_indexed_neighbor_is_adjacent(s in shape(9), u in any::<u64>()) {
        let d = degree(&s);
        prop_assume!(d > 0);
        let v = neighbor_at(&s, u as u128 % d);
        prop_assert_eq!(v.n_tips(), s.n_tips());
        prop_assert!(neighbors(&s).contains(&v));
        prop_assert_eq!(lattice_distance(&s, &v).unwrap(), 1);
    }
}
