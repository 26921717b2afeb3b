mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use topocoord::tasks::TaskKind;
use topocoord::topology::{
    diameter, generate, parse_edge_list, rewrite, round_budget, sample_points, triangulate,
    triangulation_edges, write_edge_list, Family, Graph, GraphSpec, TopologyError, TopologyVariant,
};

use common::{floyd_warshall_diameter, in_circle};

fn arb_family() -> impl Strategy<Value = Family> {
    prop_oneof![
        (1usize..4, 0.0f64..=1.0).prop_map(|(half, p)| Family::SmallWorld { k: 2 * half, p }),
        (1usize..4).prop_map(|m| Family::ScaleFree { m }),
        Just(Family::Delaunay),
    ]
}

fn arb_graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (arb_family(), 4..=max_n, any::<u64>())
        .prop_map(|(family, n, seed)| generate(&GraphSpec::new(family.fitted(n), n, seed)).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generation_is_deterministic(family in arb_family(), n in 4usize..40, seed in any::<u64>()) {
        let spec = GraphSpec::new(family.fitted(n), n, seed);
        prop_assert_eq!(generate(&spec).unwrap(), generate(&spec).unwrap());
    }

    #[test]
    fn generated_graphs_are_simple_and_connected(g in arb_graph(60)) {
        prop_assert!(g.is_connected());
        prop_assert!(g.edges().windows(2).all(|w| w[0] < w[1]));
        prop_assert!(g.edges().iter().all(|&(u, v)| u < v && v < g.node_count()));
    }

    #[test]
    fn rewrites_keep_vertices_and_shape(g in arb_graph(40)) {
        let n = g.node_count();
        for variant in TopologyVariant::ALL {
            let r = rewrite(&g, variant);
            prop_assert_eq!(r.node_count(), n);
            prop_assert!(r.is_connected());
        }
        let seq = rewrite(&g, TopologyVariant::Sequential);
        prop_assert!(seq.is_path());
        prop_assert_eq!(diameter(&seq).unwrap(), n - 1);
        let tree = rewrite(&g, TopologyVariant::Hierarchical);
        prop_assert!(tree.is_tree());
        let star = rewrite(&g, TopologyVariant::Star);
        prop_assert_eq!(star.edge_count(), n * (n - 1) / 2);
        prop_assert_eq!(diameter(&star).unwrap(), 1);
    }

    #[test]
    fn budgets_follow_task_class(g in arb_graph(40)) {
        let n = g.node_count();
        for task in TaskKind::ALL {
            let b = round_budget(&g, task, n).unwrap();
            match task {
                TaskKind::Consensus | TaskKind::LeaderElection => {
                    prop_assert!(b.total_rounds % 2 == 1 && b.total_rounds >= 3);
                    prop_assert_eq!(b.total_rounds, 2 * b.diameter + 1);
                }
                _ => prop_assert!(b.total_rounds >= 8),
            }
        }
    }

    #[test]
    fn diameter_matches_floyd_warshall(g in arb_graph(8)) {
        for variant in TopologyVariant::ALL {
            let r = rewrite(&g, variant);
            prop_assert_eq!(Some(diameter(&r).unwrap()), floyd_warshall_diameter(&r));
        }
    }

    #[test]
    fn edge_list_round_trip(g in arb_graph(50)) {
        prop_assert_eq!(parse_edge_list(&write_edge_list(&g)).unwrap(), g);
    }

    #[test]
    fn delaunay_circumcircles_are_empty(n in 3usize..40, seed in any::<u64>()) {
        let points = sample_points(n, &mut ChaCha8Rng::seed_from_u64(seed));
        let triangles = triangulate(&points);
        prop_assert!(!triangles.is_empty());
        for &[a, b, c] in &triangles {
            for (d, &p) in points.iter().enumerate() {
                if d == a || d == b || d == c {
                    continue;
                }
                prop_assert!(in_circle(points[a], points[b], points[c], p) <= 1e-12,
                    "point {} inside circumcircle of {:?}", d, [a, b, c]);
            }
        }
        // Euler: a triangulation of n points with h on the hull has 3n - 3 - h edges.
        let edges = triangulation_edges(&points).len();
        prop_assert!(edges <= 3 * n - 6);
        prop_assert!(edges >= 2 * n - 3);
    }
}

#[test]
fn disconnected_graphs_are_rejected() {
    assert_eq!(
        Graph::from_edges(4, [(0, 1), (2, 3)]),
        Err(TopologyError::Disconnected)
    );
}

#[test]
fn smallest_sizes_generate() {
    for family in [Family::small_world(), Family::scale_free(), Family::Delaunay] {
        for n in [4, 5] {
            let g = generate(&GraphSpec::new(family.fitted(n), n, 1)).unwrap();
            assert!(g.is_connected());
        }
    }
}
