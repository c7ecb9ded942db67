//! Randomized invariants over generated graphs, sets, and distributions.

use iset_core::dist::{separation_distance, total_variation, Distribution};
use iset_core::graph::{format_graph, parse_graph, random_bounded_degree_graph, Graph, VertexSet};
use iset_core::matching::{count_pm, has_perfect_matching, Skeleton};
use iset_core::rng::stream;
use iset_core::chain::bidc_step;
use proptest::prelude::*;

fn arb_graph() -> impl Strategy<Value = Graph> {
    (1usize..=7, 0u64..1000).prop_map(|(n, seed)| {
        random_bounded_degree_graph(n, 3, seed).expect("valid parameters")
    })
}

fn arb_distribution() -> impl Strategy<Value = Distribution<usize>> {
    prop::collection::vec(0.0f64..1.0, 2..6).prop_filter_map("all-zero weights", |w| {
        let total: f64 = w.iter().sum();
        if total == 0.0 {
            return None;
        }
        Distribution::from_pairs(w.iter().map(|x| x / total).enumerate()).ok()
    })
}

proptest! {
    #[test]
    fn prefix_families_are_nested(g in arb_graph()) {
        let m = g.num_edges();
        let mut prev = g.prefix_graph(0).unwrap().enumerate_independent_sets().unwrap();
        for k in 1..=m {
            let cur = g.prefix_graph(k).unwrap().enumerate_independent_sets().unwrap();
            prop_assert!(cur.len() <= prev.len());
            // Sets independent with more edges stay independent with fewer.
            for s in &cur {
                prop_assert!(prev.contains(s));
            }
            // The documented lower bound on the shrink ratio.
            prop_assert!(2 * cur.len() >= prev.len());
            prev = cur;
        }
    }

    #[test]
    fn bidc_step_stays_independent_and_local(g in arb_graph(), seed in 0u64..500) {
        let sets = g.enumerate_independent_sets().unwrap();
        let mut rng = stream(seed, &[99]);
        for s in &sets {
            let next = bidc_step(&g, s, &mut rng).unwrap();
            prop_assert!(g.is_independent(&next).unwrap());
            prop_assert!(s.symmetric_difference_size(&next) <= 1);
        }
    }

    #[test]
    fn graph_text_round_trip(g in arb_graph()) {
        let back = parse_graph(&format_graph(&g)).unwrap();
        prop_assert_eq!(back.num_vertices(), g.num_vertices());
        prop_assert_eq!(back.edges(), g.edges());
    }

    #[test]
    fn vertex_set_iter_round_trip(bits in 0u128..256, width in 8usize..=10) {
        let s = VertexSet::from_bits(bits, width);
        let vs: Vec<usize> = s.iter().collect();
        prop_assert_eq!(VertexSet::from_vertices(&vs, width), s);
        prop_assert_eq!(vs.len(), s.len());
    }

    #[test]
    fn distances_are_normalized_and_ordered(
        a in arb_distribution(),
        b in arb_distribution(),
    ) {
        // Pad onto a common universe before comparing.
        let size = a.support_size().max(b.support_size());
        let a = Distribution::from_pairs((0..size).map(|k| (k, a.prob(&k)))).unwrap();
        let b = Distribution::from_pairs((0..size).map(|k| (k, b.prob(&k)))).unwrap();
        let s = separation_distance(&a, &b);
        let tv = total_variation(&a, &b);
        prop_assert!((0.0..=1.0).contains(&s));
        prop_assert!((0.0..=1.0).contains(&tv));
        prop_assert!(tv <= s + 1e-12);
        prop_assert!((total_variation(&b, &a) - tv).abs() <= 1e-12);
    }

    #[test]
    fn matching_existence_matches_permanent(n in 2usize..=7, seed in 0u64..500) {
        let mut rng = stream(seed, &[7]);
        let s = Skeleton::bernoulli(n, 0.4, &mut rng).unwrap();
        prop_assert_eq!(has_perfect_matching(&s), count_pm(&s).unwrap() > 0);
    }
}
