use htruss::generate::{self, rng};
use htruss::graph::{all_h_supports, build_graph, h_support, EdgeMask, Graph};
use htruss::hindex::{decompose_mode, EngineConfig, FixpointEngine};
use htruss::peel::{brute_force_decompose, peel};
use htruss::Mode;

/// A 14-vertex social-network-style graph (vertex 0 unused).
fn reference_graph() -> Graph {
    build_graph(&[
        (1, 2),
        (1, 4),
        (2, 4),
        (2, 5),
        (3, 6),
        (4, 7),
        (5, 6),
        (5, 7),
        (6, 8),
        (7, 8),
        (7, 9),
        (8, 9),
        (8, 11),
        (9, 10),
        (9, 13),
        (10, 11),
        (11, 12),
        (11, 14),
        (12, 14),
        (13, 14),
    ])
    .unwrap()
}

#[test]
fn reference_graph_two_hop_supports() {
    let g = reference_graph();
    let sups = all_h_supports(&g, 2).unwrap();
    let expected = [
        ((1, 2), 3),
        ((1, 4), 3),
        ((2, 4), 3),
        ((2, 5), 4),
        ((3, 6), 2),
        ((4, 7), 5),
        ((5, 6), 5),
        ((5, 7), 6),
        ((6, 8), 5),
        ((7, 8), 7),
        ((7, 9), 7),
        ((8, 9), 8),
        ((8, 11), 7),
        ((9, 10), 5),
        ((9, 13), 5),
        ((10, 11), 6),
        ((11, 12), 4),
        ((11, 14), 5),
        ((12, 14), 4),
        ((13, 14), 5),
    ];
    for ((u, v), s) in expected {
        assert_eq!(sups[g.edge_between(u, v).unwrap()], s, "edge ({u},{v})");
    }
    let mask = EdgeMask::full(&g);
    assert_eq!(
        h_support(&g, &mask, g.edge_between(3, 6).unwrap(), 3).unwrap(),
        6
    );
}

#[test]
fn reference_graph_one_hop_trussness() {
    let g = reference_graph();
    let threes = [
        (1, 2),
        (1, 4),
        (2, 4),
        (7, 8),
        (7, 9),
        (8, 9),
        (11, 12),
        (11, 14),
        (12, 14),
    ];
    let t = peel(&g, 1).unwrap();
    for e in g.edges() {
        let expected = if threes.contains(&g.endpoints(e)) {
            3
        } else {
            2
        };
        assert_eq!(t.get(e), expected);
    }
}

#[test]
fn reference_graph_all_engines_agree() {
    let g = reference_graph();
    for h in 1..=4 {
        let expected = brute_force_decompose(&g, h).unwrap();
        assert_eq!(peel(&g, h).unwrap(), expected, "peel h={h}");
        for mode in [Mode::Sync, Mode::Async, Mode::Pruned] {
            for workers in [1, 3] {
                assert_eq!(
                    decompose_mode(&g, mode, h, workers).unwrap().0,
                    expected,
                    "{mode} h={h}"
                );
            }
        }
    }
    // The 2-hop decomposition is strictly richer than the 1-hop one here.
    let levels: std::collections::BTreeSet<u32> =
        peel(&g, 2).unwrap().trussness.into_iter().collect();
    assert!(levels.len() > 2);
}

#[test]
fn larger_random_graphs_agree_with_peeling() {
    for (i, (n, p)) in [(60, 0.08), (80, 0.05), (40, 0.2)].into_iter().enumerate() {
        let g = generate::erdos_renyi(n, p, &mut rng(i as u64));
        for h in 1..=3 {
            let expected = peel(&g, h).unwrap();
            for mode in [Mode::Sync, Mode::Async, Mode::Pruned] {
                assert_eq!(
                    decompose_mode(&g, mode, h, 4).unwrap().0,
                    expected,
                    "{mode} n={n} h={h}"
                );
            }
        }
    }
}

#[test]
fn preferential_attachment_graph_agrees_with_peeling() {
    let g = generate::barabasi_albert(150, 2, &mut rng(11));
    for h in 1..=2 {
        let expected = peel(&g, h).unwrap();
        for mode in [Mode::Sync, Mode::Async, Mode::Pruned] {
            assert_eq!(decompose_mode(&g, mode, h, 2).unwrap().0, expected);
        }
    }
}

#[test]
fn synchronous_rounds_are_identical_across_worker_counts() {
    let g = generate::erdos_renyi(50, 0.12, &mut rng(5));
    let trace = |workers| {
        let mut engine =
            FixpointEngine::new(&g, EngineConfig::new(Mode::Sync, 2, workers).unwrap()).unwrap();
        let mut rounds = Vec::new();
        engine
            .run_observed(|_, values| rounds.push(values.to_vec()))
            .unwrap();
        rounds
    };
    let single = trace(1);
    assert!(single.len() > 1);
    assert_eq!(single, trace(2));
    assert_eq!(single, trace(7));
}

#[test]
fn pruning_is_also_sound_on_synchronous_sweeps() {
    let g = generate::erdos_renyi(40, 0.15, &mut rng(9));
    for h in 1..=3 {
        let mut config = EngineConfig::new(Mode::Sync, h, 2).unwrap();
        config.pruning = true;
        let mut pruned = FixpointEngine::new(&g, config).unwrap();
        pruned.run().unwrap();
        let (plain, plain_stats) = decompose_mode(&g, Mode::Sync, h, 2).unwrap();
        assert_eq!(pruned.result(), plain);
        // Skipping reproduces the synchronous trajectory exactly.
        assert_eq!(pruned.stats().rounds, plain_stats.rounds);
        assert!(pruned.stats().evaluations <= plain_stats.evaluations);
    }
}

#[test]
fn dependency_cap_only_disables_pruning() {
    let g = generate::erdos_renyi(40, 0.2, &mut rng(2));
    let mut config = EngineConfig::new(Mode::Pruned, 2, 2).unwrap();
    config.dependency_cap = 10;
    let mut engine = FixpointEngine::new(&g, config).unwrap();
    assert!(engine.dependencies().unwrap().capped_count() > 0);
    engine.run().unwrap();
    assert_eq!(engine.result(), peel(&g, 2).unwrap());
}
