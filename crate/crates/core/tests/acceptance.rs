//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::Instant;

use htruss::generate::{self, rng};
use htruss::graph::{build_graph, h_support, EdgeMask, Graph};
use htruss::hindex::{decompose_mode, EngineConfig, FixpointEngine};
use htruss::io::{parse_edge_list, write_trussness};
use htruss::peel::{brute_force_decompose, peel, TrussnessResult};
use htruss::Mode;

const HOPS: [u32; 3] = [1, 2, 3];
const RANDOM_GRAPHS: usize = 200;
const PROBABILITIES: [f64; 3] = [0.1, 0.2, 0.4];

struct Named {
    name: String,
    graph: Graph,
}

fn fixed_suite() -> Vec<Named> {
    let diamond = build_graph(&[(0, 1), (0, 2), (1, 2), (1, 3), (2, 3)]).unwrap();
    vec![
        ("K4", generate::complete(4)),
        ("K5", generate::complete(5)),
        ("C5", generate::cycle(5)),
        ("P3", generate::path(3)),
        ("K1,4", generate::star(4)),
        ("two triangles sharing an edge", diamond),
    ]
    .into_iter()
    .map(|(name, graph)| Named {
        name: name.to_string(),
        graph,
    })
    .collect()
}

/// Erdős–Rényi graphs with 5..=30 vertices, cycling through the probabilities.
fn random_suite() -> Vec<Named> {
    (0..RANDOM_GRAPHS)
        .map(|i| {
            let n = 5 + (i % 26) as u64;
            let p = PROBABILITIES[i % PROBABILITIES.len()];
            Named {
                name: format!("G({n},{p}) #{i}"),
                graph: generate::erdos_renyi(n, p, &mut rng(1000 + i as u64)),
            }
        })
        .collect()
}

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn check(violations: &[String], summary: String) -> Self {
        if violations.is_empty() {
            Outcome {
                passed: true,
                detail: summary,
            }
        } else {
            let shown: Vec<&str> = violations.iter().take(5).map(String::as_str).collect();
            Outcome {
                passed: false,
                detail: format!(
                    "{summary}; {} violations, e.g. {}",
                    violations.len(),
                    shown.join(" | ")
                ),
            }
        }
    }
}

/// Criterion 1: every engine agrees with the definition, edge by edge.
fn oracle_equivalence(fixed: &[Named], random: &[Named]) -> Outcome {
    let start = Instant::now();
    let mut violations = Vec::new();
    let mut runs = 0;
    for (i, g) in fixed.iter().chain(random).enumerate() {
        for h in HOPS {
            let expected = brute_force_decompose(&g.graph, h).unwrap();
            let workers = 1 + i % 4;
            let mut candidates = vec![("peel", peel(&g.graph, h).unwrap())];
            for mode in [Mode::Sync, Mode::Async, Mode::Pruned] {
                candidates.push((
                    mode.as_str(),
                    decompose_mode(&g.graph, mode, h, workers).unwrap().0,
                ));
            }
            for (label, got) in candidates {
                runs += 1;
                if got != expected {
                    violations.push(format!("{label} on {} h={h}", g.name));
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    if secs >= 60.0 {
        violations.push(format!("took {secs:.1}s (limit 60s)"));
    }
    Outcome::check(
        &violations,
        format!(
            "{} graphs x h in {{1,2,3}}, {runs} runs matched brute force in {secs:.1}s",
            fixed.len() + random.len()
        ),
    )
}

/// Classical k-truss decomposition by triangle-support peeling, written
/// directly against edge sets.
fn classical_truss(g: &Graph) -> Vec<u32> {
    let n = g.vertex_count();
    let mut adj: Vec<BTreeSet<u32>> = vec![BTreeSet::new(); n];
    for &(u, v) in g.edge_list() {
        adj[u as usize].insert(v);
        adj[v as usize].insert(u);
    }
    let support = |adj: &Vec<BTreeSet<u32>>, u: u32, v: u32| {
        adj[u as usize].intersection(&adj[v as usize]).count() as u32
    };
    let mut remaining: BTreeSet<(u32, u32)> = g.edge_list().iter().copied().collect();
    let mut truss = vec![0u32; g.edge_count()];
    let mut level = 2u32;
    while !remaining.is_empty() {
        let (&(u, v), sup) = remaining
            .iter()
            .map(|e| (e, support(&adj, e.0, e.1)))
            .min_by_key(|&(_, s)| s)
            .unwrap();
        level = level.max(sup + 2);
        truss[g.edge_between(u, v).unwrap().index()] = level;
        remaining.remove(&(u, v));
        adj[u as usize].remove(&v);
        adj[v as usize].remove(&u);
    }
    truss
}

/// Criterion 2: h = 1 reduces to the classical truss decomposition.
fn classical_reduction(fixed: &[Named]) -> Outcome {
    let mut violations = Vec::new();
    for g in fixed {
        let expected = classical_truss(&g.graph);
        if peel(&g.graph, 1).unwrap().trussness != expected {
            violations.push(format!("peel on {}", g.name));
        }
        for mode in [Mode::Sync, Mode::Async, Mode::Pruned] {
            if decompose_mode(&g.graph, mode, 1, 2).unwrap().0.trussness != expected {
                violations.push(format!("{mode} on {}", g.name));
            }
        }
    }
    Outcome::check(
        &violations,
        format!("{} fixed graphs match triangle peeling", fixed.len()),
    )
}

/// Criterion 3: synchronous values never rise and never drop below t - 2.
fn monotone_and_bounded(random: &[Named]) -> Outcome {
    let mut violations = Vec::new();
    let mut rounds = 0u64;
    for g in random {
        for h in HOPS {
            let oracle = peel(&g.graph, h).unwrap();
            let mut engine =
                FixpointEngine::new(&g.graph, EngineConfig::new(Mode::Sync, h, 2).unwrap())
                    .unwrap();
            let mut last = engine.values();
            check_lower_bound(&g.name, h, 0, &last, &oracle, &mut violations);
            engine
                .run_observed(|round, values| {
                    rounds += 1;
                    for (i, (&now, &before)) in values.iter().zip(&last).enumerate() {
                        if now > before {
                            violations.push(format!(
                                "{} h={h} round {round} edge {i}: {before} -> {now}",
                                g.name
                            ));
                        }
                    }
                    check_lower_bound(&g.name, h, round, values, &oracle, &mut violations);
                    last = values.to_vec();
                })
                .unwrap();
        }
    }
    Outcome::check(&violations, format!("{rounds} synchronous rounds checked"))
}

fn check_lower_bound(
    name: &str,
    h: u32,
    round: u64,
    values: &[u32],
    oracle: &TrussnessResult,
    violations: &mut Vec<String>,
) {
    for (i, (&x, &t)) in values.iter().zip(&oracle.trussness).enumerate() {
        if x + 2 < t {
            violations.push(format!(
                "{name} h={h} round {round} edge {i}: {x} + 2 < {t}"
            ));
        }
    }
}

/// Criterion 4: the edges with trussness >= k form a subgraph in which every
/// edge has h-support >= k - 2.
fn containment(fixed: &[Named], random: &[Named]) -> Outcome {
    let mut violations = Vec::new();
    let mut checks = 0;
    for g in fixed.iter().chain(random) {
        for h in HOPS {
            let t = peel(&g.graph, h).unwrap();
            let levels: BTreeSet<u32> = t.trussness.iter().copied().collect();
            for k in levels {
                let mask = EdgeMask::from_fn(&g.graph, |e| t.get(e) >= k);
                for e in mask.alive_edges() {
                    checks += 1;
                    let sup = h_support(&g.graph, &mask, e, h).unwrap();
                    if sup + 2 < k {
                        violations.push(format!("{} h={h} k={k} {e}: support {sup}", g.name));
                    }
                }
            }
        }
    }
    Outcome::check(&violations, format!("{checks} (edge, k) pairs checked"))
}

/// Criterion 5: asynchronous sweeps need no more rounds than synchronous ones.
fn async_rounds(random: &[Named]) -> Outcome {
    let mut violations = Vec::new();
    let mut ratios = Vec::new();
    for g in random {
        if g.graph.edge_count() == 0 {
            continue;
        }
        let (_, sync) = decompose_mode(&g.graph, Mode::Sync, 2, 1).unwrap();
        let (_, asyn) = decompose_mode(&g.graph, Mode::Async, 2, 1).unwrap();
        ratios.push(asyn.rounds as f64 / sync.rounds as f64);
    }
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    if mean > 1.0 {
        violations.push(format!("mean ratio {mean:.3} > 1.0"));
    }
    Outcome::check(
        &violations,
        format!(
            "mean rounds(async)/rounds(sync) = {mean:.3} over {} graphs at h=2",
            ratios.len()
        ),
    )
}

/// Criterion 6: pruning never adds evaluations and never changes results.
fn pruning_benefit(fixed: &[Named], random: &[Named]) -> Outcome {
    let mut violations = Vec::new();
    let (mut pruned_evals, mut async_evals) = (0u64, 0u64);
    for g in fixed.iter().chain(random) {
        for h in HOPS {
            let (a, a_stats) = decompose_mode(&g.graph, Mode::Async, h, 1).unwrap();
            let (p, p_stats) = decompose_mode(&g.graph, Mode::Pruned, h, 1).unwrap();
            async_evals += a_stats.evaluations;
            pruned_evals += p_stats.evaluations;
            if a != p {
                violations.push(format!("{} h={h}: results differ", g.name));
            }
            if p_stats.evaluations > a_stats.evaluations {
                violations.push(format!(
                    "{} h={h}: pruned {} > async {}",
                    g.name, p_stats.evaluations, a_stats.evaluations
                ));
            }
        }
    }
    let saved = 100.0 * (1.0 - pruned_evals as f64 / async_evals.max(1) as f64);
    Outcome::check(
        &violations,
        format!("evaluations pruned {pruned_evals} vs async {async_evals} ({saved:.1}% saved)"),
    )
}

fn render(g: &Graph, result: &TrussnessResult) -> Vec<u8> {
    let mut text = Vec::new();
    for &(u, v) in g.edge_list() {
        text.extend(format!("{u} {v}\n").bytes());
    }
    let loaded = parse_edge_list(text.as_slice(), "suite").unwrap();
    let mut out = Vec::new();
    write_trussness(&mut out, &loaded, result).unwrap();
    out
}

/// Criterion 7: synchronous output is identical for 1, 2 and 8 workers, and 8
/// workers beat 1 on a ~30k-edge preferential-attachment graph at h = 2.
fn parallel_determinism_and_scaling(fixed: &[Named], random: &[Named]) -> Outcome {
    const REPS: usize = 3;
    let mut violations = Vec::new();
    for g in fixed.iter().chain(random) {
        for h in HOPS {
            let outputs: Vec<Vec<u8>> = [1, 2, 8]
                .iter()
                .map(|&w| {
                    render(
                        &g.graph,
                        &decompose_mode(&g.graph, Mode::Sync, h, w).unwrap().0,
                    )
                })
                .collect();
            if outputs[0] != outputs[1] || outputs[0] != outputs[2] {
                violations.push(format!(
                    "{} h={h}: outputs differ across worker counts",
                    g.name
                ));
            }
        }
    }

    let ba = generate::barabasi_albert(10_000, 3, &mut rng(7));
    let mut times = Vec::new();
    let mut outputs = Vec::new();
    for workers in [1, 2, 8] {
        let mut total = 0.0;
        let mut last = None;
        for _ in 0..REPS {
            let (result, stats) = decompose_mode(&ba, Mode::Sync, 2, workers).unwrap();
            total += stats.wall_time_ms;
            last = Some(result);
        }
        times.push((workers, total / REPS as f64));
        outputs.push(render(&ba, &last.unwrap()));
    }
    if outputs[0] != outputs[1] || outputs[0] != outputs[2] {
        violations.push("BA graph: outputs differ across worker counts".to_string());
    }
    let (t1, t8) = (times[0].1, times[2].1);
    if t8 >= t1 {
        violations.push(format!(
            "BA graph: 8 workers {t8:.1} ms not faster than 1 worker {t1:.1} ms ({} hardware threads available)",
            std::thread::available_parallelism().map_or(1, |n| n.get())
        ));
    }
    let shown: Vec<String> = times
        .iter()
        .map(|(w, t)| format!("{w}w {t:.1} ms"))
        .collect();
    Outcome::check(
        &violations,
        format!(
            "BA {} edges h=2 mean of {REPS}: {} (speedup {:.2})",
            ba.edge_count(),
            shown.join(", "),
            t1 / t8
        ),
    )
}

/// Criterion 8: one more sweep after convergence changes nothing.
fn fixpoint_stability(fixed: &[Named], random: &[Named]) -> Outcome {
    let mut violations = Vec::new();
    for g in fixed.iter().chain(random) {
        for h in HOPS {
            for mode in [Mode::Sync, Mode::Async, Mode::Pruned] {
                let mut engine =
                    FixpointEngine::new(&g.graph, EngineConfig::new(mode, h, 2).unwrap()).unwrap();
                engine.run().unwrap();
                let before = engine.values();
                let report = engine.step().unwrap();
                if report.changed != 0 || engine.values() != before {
                    violations.push(format!("{mode} on {} h={h}", g.name));
                }
            }
        }
    }
    Outcome::check(
        &violations,
        "extra sweep after convergence is a no-op".to_string(),
    )
}

fn main() -> ExitCode {
    let fixed = fixed_suite();
    let random = random_suite();
    assert!(random
        .iter()
        .all(|g| (5..=30).contains(&g.graph.vertex_count())));

    type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);
    let criteria: Vec<Criterion> = vec![
        (
            "1 oracle equivalence",
            Box::new(|| oracle_equivalence(&fixed, &random)),
        ),
        (
            "2 h=1 classical reduction",
            Box::new(|| classical_reduction(&fixed)),
        ),
        (
            "3 monotonicity and lower bound",
            Box::new(|| monotone_and_bounded(&random)),
        ),
        ("4 containment", Box::new(|| containment(&fixed, &random))),
        (
            "5 async round reduction",
            Box::new(|| async_rounds(&random)),
        ),
        (
            "6 pruning soundness",
            Box::new(|| pruning_benefit(&fixed, &random)),
        ),
        (
            "7 parallel determinism and scaling",
            Box::new(|| parallel_determinism_and_scaling(&fixed, &random)),
        ),
        (
            "8 fixpoint stability",
            Box::new(|| fixpoint_stability(&fixed, &random)),
        ),
    ];

    let mut failed = 0;
    for (name, run) in &criteria {
        let start = Instant::now();
        let outcome = run();
        let tag = if outcome.passed { "PASS" } else { "FAIL" };
        println!(
            "[{tag}] criterion {name}: {} ({:.1}s)",
            outcome.detail,
            start.elapsed().as_secs_f64()
        );
        if !outcome.passed {
            failed += 1;
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
