use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use walkmix::estimators::{estimate_average_degree, ht_estimate, relative_error, sample_weights, VisitWeight};
use walkmix::generators::{barabasi_albert, chung_lu_power_law, fig1, random_connected};
use walkmix::graph::{load_edge_list, simplify_undirected};
use walkmix::oracle::{
    closed_form_for, detailed_balance_residual, stationary_closed_form, stationary_power_iteration, transition_matrix,
    true_average_degree,
};
use walkmix::walkers::{run_walk, run_walk_steps};
use walkmix::{Alpha, Graph, IdrwMode, NodeId, WalkerKind};

fn edge_pairs() -> impl Strategy<Value = Vec<(u64, u64)>> {
    prop::collection::vec((0u64..60, 0u64..60), 1..150)
}

fn connected_graph() -> impl Strategy<Value = Graph> {
    (3usize..120, 0usize..80, any::<u64>()).prop_map(|(n, extra, seed)| random_connected(n, extra, seed))
}

fn walker() -> impl Strategy<Value = WalkerKind> {
    prop_oneof![
        Just(WalkerKind::Srw),
        Just(WalkerKind::Nbrw),
        Just(WalkerKind::Mhrw),
        Just(WalkerKind::Idrw(IdrwMode::Categorical)),
        Just(WalkerKind::Idrw(IdrwMode::Rejection)),
        (0.0f64..3.0).prop_map(|a| WalkerKind::Eidrw(Alpha::new(a).unwrap(), IdrwMode::Categorical)),
        (0.0f64..3.0).prop_map(|a| WalkerKind::Eidrw(Alpha::new(a).unwrap(), IdrwMode::Rejection)),
    ]
}

fn edge_set(g: &Graph) -> Vec<(u64, u64)> {
    let mut out: Vec<(u64, u64)> = g
        .edges()
        .map(|(u, v)| {
            let (a, b) = (g.label(u).unwrap(), g.label(v).unwrap());
            (a.min(b), a.max(b))
        })
        .collect();
    out.sort_unstable();
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn simple_graph_structure(pairs in edge_pairs()) {
        let Ok(g) = Graph::from_edges(pairs) else { return Ok(()) };
        let mut degree_sum = 0;
        for i in g.nodes() {
            let nbrs = g.neighbors(i).unwrap();
            prop_assert_eq!(nbrs.len(), g.degree(i).unwrap());
            prop_assert!(nbrs.windows(2).all(|w| w[0] < w[1]));
            prop_assert!(!nbrs.contains(&i));
            for &j in nbrs {
                prop_assert!(g.has_edge(j, i));
            }
            degree_sum += nbrs.len();
        }
        prop_assert_eq!(degree_sum, 2 * g.edge_count());
        let stats = g.degree_stats();
        prop_assert_eq!(stats.average_degree, degree_sum as f64 / g.node_count() as f64);
    }

    #[test]
    fn edge_list_round_trip(pairs in edge_pairs()) {
        let Ok(g) = Graph::from_edges(pairs) else { return Ok(()) };
        let mut text = Vec::new();
        g.write_edge_list(&mut text).unwrap();
        let back = simplify_undirected(&load_edge_list(text.as_slice()).unwrap()).unwrap();
        prop_assert_eq!(back.node_count(), g.node_count() - g.degrees().iter().filter(|&&d| d == 0).count());
        prop_assert_eq!(edge_set(&back), edge_set(&g));
    }

    #[test]
    fn largest_component_is_connected(pairs in edge_pairs(), picks in prop::collection::vec(any::<prop::sample::Index>(), 10)) {
        let Ok(g) = Graph::from_edges(pairs) else { return Ok(()) };
        let lcc = g.largest_connected_component();
        prop_assert!(lcc.degrees().iter().all(|&d| d >= 1));
        for p in picks {
            let start = NodeId(p.index(lcc.node_count()));
            prop_assert_eq!(lcc.reachable_count(start).unwrap(), lcc.node_count());
        }
        let comp = g.components();
        let mut sizes = vec![0usize; comp.iter().max().map_or(0, |m| m + 1)];
        for c in comp {
            sizes[c] += 1;
        }
        let biggest = sizes.into_iter().max().unwrap_or(0);
        prop_assert_eq!(lcc.node_count(), biggest);
    }

    #[test]
    fn walk_sample_invariants(g in connected_graph(), kind in walker(), seed in any::<u64>(), frac in 0.05f64..1.0) {
        let budget = ((g.node_count() as f64 * frac) as usize).max(1);
        let s = run_walk(&g, kind, NodeId(0), budget, seed).unwrap();
        prop_assert_eq!(s.nodes.len(), s.degrees.len());
        prop_assert_eq!(s.ledger.unique_count(), if s.truncated { s.ledger.unique_count() } else { budget });
        prop_assert!(s.ledger.unique_count() <= s.ledger.step_count() + 1);
        for (t, &n) in s.nodes.iter().enumerate() {
            prop_assert_eq!(s.degrees[t], g.degree(n).unwrap());
        }
        for w in s.nodes.windows(2) {
            let repeat_ok = kind == WalkerKind::Mhrw && w[0] == w[1];
            prop_assert!(repeat_ok || g.has_edge(w[0], w[1]));
        }
        if kind == WalkerKind::Nbrw {
            for w in s.nodes.windows(3) {
                if g.degree(w[1]).unwrap() >= 2 {
                    prop_assert_ne!(w[0], w[2]);
                }
            }
        }
        let again = run_walk(&g, kind, NodeId(0), budget, seed).unwrap();
        prop_assert_eq!(again.nodes, s.nodes);
    }

    #[test]
    fn eidrw_zero_retraces_srw(g in connected_graph(), seed in any::<u64>()) {
        let zero = WalkerKind::Eidrw(Alpha::ZERO, IdrwMode::Categorical);
        let a = run_walk_steps(&g, WalkerKind::Srw, NodeId(0), 500, seed).unwrap();
        let b = run_walk_steps(&g, zero, NodeId(0), 500, seed).unwrap();
        prop_assert_eq!(a.nodes, b.nodes);
    }

    #[test]
    fn weight_scale_invariance(g in connected_graph(), kind in walker(), seed in any::<u64>(), c in 1e-6f64..1e6) {
        let s = run_walk_steps(&g, kind, NodeId(0), 300, seed).unwrap();
        let w = sample_weights::<f64>(&g, &s).unwrap();
        let scaled: Vec<VisitWeight<f64>> = w.iter().map(|v| VisitWeight { node: v.node, weight: c * v.weight }).collect();
        let f = |n: NodeId| g.degree(n).unwrap() as f64;
        let plain = ht_estimate(&s, f, &w).unwrap().value;
        let rescaled = ht_estimate(&s, f, &scaled).unwrap().value;
        prop_assert!((plain - rescaled).abs() <= 1e-12 * plain.abs());
    }

    #[test]
    fn closed_form_matches_power_iteration(g in connected_graph(), a in prop::sample::select(vec![0.0, 0.25, 0.5, 0.75, 1.0, 2.0])) {
        let alpha = Alpha::new(a).unwrap();
        for kind in [
            WalkerKind::Srw,
            WalkerKind::Mhrw,
            WalkerKind::Idrw(IdrwMode::Categorical),
            WalkerKind::Eidrw(alpha, IdrwMode::Categorical),
        ] {
            let p = transition_matrix::<f64>(&g, kind).unwrap();
            let closed = closed_form_for::<f64>(&g, kind).unwrap();
            let power = stationary_power_iteration(&p, 1e-13).unwrap().distribution;
            prop_assert!(closed.max_abs_diff(&power) <= 1e-9, "{kind}: {}", closed.max_abs_diff(&power));
            prop_assert!(detailed_balance_residual(&p, &closed) <= 1e-12);
        }
    }
}

#[test]
fn uniform_neighbor_is_uniform() {
    let g = fig1();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for i in g.nodes() {
        let nbrs = g.neighbors(i).unwrap();
        let mut counts = vec![0u64; g.node_count()];
        for _ in 0..1_000_000 {
            counts[g.uniform_neighbor(i, &mut rng).unwrap().index()] += 1;
        }
        for &j in nbrs {
            let f = counts[j.index()] as f64 / 1e6;
            assert!((f - 1.0 / nbrs.len() as f64).abs() <= 0.005, "node {i:?} -> {j:?}: {f}");
        }
        assert_eq!(counts.iter().sum::<u64>(), 1_000_000);
    }
}

#[test]
fn spread_shrinks_from_alpha_zero_to_one() {
    for seed in 0..20u64 {
        let g = if seed % 2 == 0 {
            chung_lu_power_law(400, 2.5, 2.0, seed).unwrap()
        } else {
            barabasi_albert(400, 2, seed).unwrap()
        };
        assert!(!g.is_regular());
        let s0 = stationary_closed_form::<f64>(&g, Alpha::ZERO).unwrap().spread();
        let s1 = stationary_closed_form::<f64>(&g, Alpha::ONE).unwrap().spread();
        assert!(s1 < s0, "seed {seed}: {s1} vs {s0}");
    }
}

#[test]
fn long_walk_estimates_within_one_percent() {
    let graphs = [fig1(), random_connected(50, 40, 3)];
    let kinds = [
        WalkerKind::Srw,
        WalkerKind::Nbrw,
        WalkerKind::Mhrw,
        WalkerKind::Idrw(IdrwMode::Categorical),
        WalkerKind::Idrw(IdrwMode::Rejection),
        WalkerKind::Eidrw(Alpha::new(0.5).unwrap(), IdrwMode::Categorical),
    ];
    for g in &graphs {
        let truth = true_average_degree::<f64>(g);
        for (k, kind) in kinds.into_iter().enumerate() {
            let s = run_walk_steps(g, kind, NodeId(0), 1_000_000, 40 + k as u64).unwrap();
            let err = relative_error(estimate_average_degree(g, &s).unwrap().value, truth).unwrap();
            assert!(err <= 0.01, "{kind} on {} nodes: {err}", g.node_count());
        }
    }
}
