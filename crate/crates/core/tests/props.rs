//! Property tests for the structural invariants.

use fkmc::{
    connected_components, rc_marginal, tilt_params, tv_distance, EdgeSet, Graph, RandomTape,
    RcParams,
};
use proptest::prelude::*;

fn arb_graph() -> impl Strategy<Value = Graph> {
    (1usize..7).prop_flat_map(|n| {
        proptest::collection::vec((0..n, 0..n), 0..10)
            .prop_map(move |edges| Graph::new(n, edges).unwrap())
    })
}

fn arb_graph_and_masks() -> impl Strategy<Value = (Graph, u64, u64)> {
    arb_graph().prop_flat_map(|g| {
        let m = g.edge_count() as u32;
        (Just(g), 0u64..(1u64 << m), 0u64..(1u64 << m))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    /// Adding edges never increases the component count, and components of
    /// the smaller set refine components of the larger.
    #[test]
    fn components_monotone_under_edge_addition((g, a_mask, b_mask) in arb_graph_and_masks()) {
        let m = g.edge_count();
        // Force a subset of b.
        let a = EdgeSet::from_index(m, a_mask & b_mask);
        let b = EdgeSet::from_index(m, b_mask);
        let ca = connected_components(&g, &a).unwrap();
        let cb = connected_components(&g, &b).unwrap();
        prop_assert!(ca.component_count() >= cb.component_count());
        for u in 0..g.vertex_count() {
            for v in (u + 1)..g.vertex_count() {
                if ca.label(u) == ca.label(v) {
                    prop_assert_eq!(cb.label(u), cb.label(v));
                }
            }
        }
    }

    /// The labeling is a pure function of the inputs.
    #[test]
    fn components_are_reproducible((g, mask, _) in arb_graph_and_masks()) {
        let s = EdgeSet::from_index(g.edge_count(), mask);
        let a = connected_components(&g, &s).unwrap();
        let b = connected_components(&g, &s).unwrap();
        prop_assert_eq!(a, b);
    }

    /// The conditional marginal of e ignores bit e of the configuration.
    #[test]
    fn marginal_ignores_own_bit(
        (g, mask, _) in arb_graph_and_masks()
            .prop_filter("needs an edge", |(g, _, _)| g.edge_count() > 0),
        seed in any::<u64>(),
    ) {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let params = {
            use rand::Rng;
            let p = (0..g.edge_count()).map(|_| 0.01 + 0.98 * rng.random::<f64>()).collect();
            let l = (0..g.vertex_count()).map(|_| 0.95 * rng.random::<f64>()).collect();
            RcParams::new(p, l).unwrap()
        };
        let s = EdgeSet::from_index(g.edge_count(), mask);
        for e in 0..g.edge_count() {
            let mut on = s.clone();
            on.set(e, true);
            let mut off = s.clone();
            off.set(e, false);
            prop_assert_eq!(
                rc_marginal(&g, &params, &on, e).unwrap(),
                rc_marginal(&g, &params, &off, e).unwrap()
            );
        }
    }

    /// Tilting strictly raises every edge probability.
    #[test]
    fn tilt_strictly_monotone(
        p in proptest::collection::vec(0.001f64..0.999, 1..6),
        theta in 0.001f64..0.999,
    ) {
        let params = RcParams::new(p, vec![0.0]).unwrap();
        let tilted = tilt_params(&params, theta).unwrap();
        for (pt, p) in tilted.p().iter().zip(params.p()) {
            prop_assert!(pt > p);
        }
    }

    /// Total variation is symmetric and satisfies the triangle inequality.
    #[test]
    fn tv_is_a_metric(
        raw_a in proptest::collection::vec(0.001f64..1.0, 4),
        raw_b in proptest::collection::vec(0.001f64..1.0, 4),
        raw_c in proptest::collection::vec(0.001f64..1.0, 4),
    ) {
        let norm = |v: Vec<f64>| -> Vec<f64> {
            let s: f64 = v.iter().sum();
            v.into_iter().map(|x| x / s).collect()
        };
        let a = norm(raw_a);
        let b = norm(raw_b);
        let c = norm(raw_c);
        let ab = tv_distance(&a, &b).unwrap();
        let ba = tv_distance(&b, &a).unwrap();
        let ac = tv_distance(&a, &c).unwrap();
        let cb = tv_distance(&c, &b).unwrap();
        prop_assert!((ab - ba).abs() < 1e-15);
        prop_assert!(ab <= ac + cb + 1e-12);
        prop_assert!((0.0..=1.0).contains(&ab));
    }

    /// The tape text format round-trips exactly, uniforms included.
    #[test]
    fn tape_text_round_trips(
        m in 1usize..6,
        raw in proptest::collection::vec((any::<u32>(), 0.0f64..1.0), 1..30),
        init_mask in any::<u64>(),
    ) {
        let initial = EdgeSet::from_index(m, init_mask & ((1 << m) - 1));
        let sites: Vec<u32> = raw.iter().map(|&(s, _)| s % m as u32).collect();
        let uniforms: Vec<f64> = raw.iter().map(|&(_, u)| u).collect();
        let tape = RandomTape::new(initial, sites, uniforms).unwrap();
        let back = RandomTape::from_text(&tape.to_text()).unwrap();
        prop_assert_eq!(back, tape);
    }
}
