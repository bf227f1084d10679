//! Cross-module properties of the full flow: merge, place and route, then
//! simulate random applications and compare the NoC results against direct
//! graph evaluation.

use std::collections::BTreeMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use sdfnoc_core::graph::{evaluate, DataflowGraph, Vertex};
use sdfnoc_core::merge::{merge, AppId, PackedGraph, UnionVertex};
use sdfnoc_core::noc::build_mesh;
use sdfnoc_core::pnr::{check, placeable_vertices, pnr, PnrError, PnrResult};
use sdfnoc_core::randgraph::{random_app_set, scalar_pool};
use sdfnoc_core::registry::OperatorRegistry;
use sdfnoc_core::sim::{reconfigure_and_run, simulate, DelayModel, SimSetup};
use sdfnoc_core::token::{Stream, Token};

fn to_union_coords(
    packed: &PackedGraph,
    app: AppId,
    streams: &BTreeMap<Vertex, Stream>,
) -> BTreeMap<UnionVertex, Stream> {
    streams
        .iter()
        .map(|(v, s)| {
            let node = packed.union.sigma_n[&(app, v.node.clone())].clone();
            (
                UnionVertex {
                    node,
                    dir: v.dir,
                    port: v.port,
                },
                s.clone(),
            )
        })
        .collect()
}

fn random_inputs(rng: &mut impl Rng, g: &DataflowGraph, len: usize) -> BTreeMap<Vertex, Stream> {
    g.boundary_inputs()
        .into_iter()
        .map(|v| {
            let stream = (0..len)
                .map(|_| {
                    if rng.random_range(0..8) == 0 {
                        Token::Null
                    } else {
                        Token::Scalar(rng.random_range(-100..100))
                    }
                })
                .collect();
            (v, stream)
        })
        .collect()
}

/// Mesh just big enough (plus slack) for the packed graph.
fn fitting_mesh(packed: &PackedGraph) -> sdfnoc_core::noc::MeshNoc {
    let n = placeable_vertices(packed).len().max(1);
    let side = (n as f64).sqrt().ceil() as usize + 1;
    build_mesh(side, side).unwrap()
}

/// Runs merge + pnr; returns None when routing legitimately fails.
fn try_pnr(packed: &PackedGraph) -> Option<PnrResult> {
    let noc = fitting_mesh(packed);
    match pnr(packed, &noc, 11, 50) {
        Ok(result) => {
            let violations = check(packed, &noc, &result.placement, &result.routes);
            assert!(violations.is_empty(), "check failed: {violations:?}");
            Some(result)
        }
        Err(PnrError::Unroutable { .. }) => None,
        Err(other) => panic!("unexpected pnr error: {other}"),
    }
}

#[test]
fn simulation_matches_evaluation_for_every_delay() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let registry = OperatorRegistry::standard();
    let pool = scalar_pool();
    let mut simulated = 0;
    for round in 0..60 {
        let graphs = random_app_set(&mut rng, 1 + (round % 3), &pool, 8, 80);
        let packed = match merge(&graphs, None) {
            Ok(p) => p,
            Err(e) => panic!("merge failed: {e}"),
        };
        let Some(result) = try_pnr(&packed) else {
            continue;
        };
        let setup = SimSetup {
            noc: &result.mesh,
            packed: &packed,
            placement: &result.placement,
            registry: &registry,
        };
        for (i, g) in graphs.iter().enumerate() {
            let app = AppId(i as u32 + 1);
            let inputs = random_inputs(&mut rng, g, 4);
            let expected = evaluate(g, &inputs, &registry).unwrap();
            let union_inputs = to_union_coords(&packed, app, &inputs);
            let cfg = result.config_for(app);
            for (seed, d) in [(1u64, 0u64), (7, 5), (13, 16)] {
                let sim = simulate(
                    &setup,
                    &cfg,
                    app,
                    &union_inputs,
                    &DelayModel::new(seed, d),
                    false,
                )
                .unwrap_or_else(|e| panic!("simulate failed (seed {seed}, D {d}): {e}"));
                let got = to_union_coords(&packed, app, &expected);
                assert_eq!(sim.outputs, got, "app {app} seed {seed} D {d}");
                // conservation: every used link carried one token per index,
                // none duplicated or dropped
                let len = union_inputs.values().next().map(|s| s.len()).unwrap_or(0);
                for (link, count) in &sim.link_occupancy {
                    assert_eq!(*count as usize, len, "link {link} carried {count}");
                }
                for s in sim.outputs.values() {
                    assert_eq!(s.len(), len);
                }
                simulated += 1;
            }
        }
    }
    assert!(simulated >= 50, "only {simulated} runs exercised the NoC");
}

#[test]
fn evaluation_is_invariant_under_random_topological_orders() {
    use sdfnoc_core::graph::evaluate_with_order;
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    let registry = OperatorRegistry::standard();
    let pool = scalar_pool();
    for _ in 0..50 {
        let g = &random_app_set(&mut rng, 1, &pool, 9, 85)[0];
        let inputs = random_inputs(&mut rng, g, 3);
        let base_order = g.topo_order().unwrap();
        let base = evaluate_with_order(g, &base_order, &inputs, &registry).unwrap();
        // random restarts of Kahn's algorithm give other valid orders
        for round in 0..4 {
            let order = random_topo_order(&mut rng, g, round);
            let out = evaluate_with_order(g, &order, &inputs, &registry).unwrap();
            assert_eq!(out, base, "order {order:?} changed the result");
        }
    }
}

fn random_topo_order(rng: &mut impl Rng, g: &DataflowGraph, _round: u64) -> Vec<String> {
    let succ = g.successors();
    let mut indeg: std::collections::BTreeMap<&str, usize> = succ.keys().map(|&k| (k, 0)).collect();
    for outs in succ.values() {
        for o in outs {
            *indeg.get_mut(o).unwrap() += 1;
        }
    }
    let mut ready: Vec<&str> = indeg
        .iter()
        .filter(|(_, &d)| d == 0)
        .map(|(&k, _)| k)
        .collect();
    let mut order = Vec::new();
    while !ready.is_empty() {
        let pick = rng.random_range(0..ready.len());
        let n = ready.swap_remove(pick);
        order.push(n.to_string());
        for &m in &succ[n] {
            let d = indeg.get_mut(m).unwrap();
            *d -= 1;
            if *d == 0 {
                ready.push(m);
            }
        }
    }
    order
}

#[test]
fn null_inputs_only_affect_their_own_index() {
    let mut rng = ChaCha8Rng::seed_from_u64(5150);
    let registry = OperatorRegistry::standard();
    let pool = scalar_pool();
    for _ in 0..40 {
        let graphs = random_app_set(&mut rng, 1, &pool, 7, 85);
        let g = &graphs[0];
        let boundary = g.boundary_inputs();
        if boundary.is_empty() {
            continue;
        }
        let mut inputs: BTreeMap<Vertex, Stream> = boundary
            .iter()
            .map(|v| {
                let s = (0..4).map(|k| Token::Scalar(k + 1)).collect();
                (v.clone(), s)
            })
            .collect();
        let base = evaluate(g, &inputs, &registry).unwrap();
        let poke = boundary[0].clone();
        let k = 2;
        inputs.get_mut(&poke).unwrap()[k] = Token::Null;
        let nulled = evaluate(g, &inputs, &registry).unwrap();
        for (v, s) in &nulled {
            for (idx, tok) in s.iter().enumerate() {
                if idx != k {
                    assert_eq!(tok, &base[v][idx], "{v} index {idx} changed");
                }
            }
        }
    }
}

#[test]
fn reconfiguration_segments_are_independent() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let registry = OperatorRegistry::standard();
    let pool = scalar_pool();
    let mut exercised = 0;
    for _ in 0..30 {
        let graphs = random_app_set(&mut rng, 2, &pool, 6, 80);
        let Ok(packed) = merge(&graphs, None) else {
            continue;
        };
        let Some(result) = try_pnr(&packed) else {
            continue;
        };
        let setup = SimSetup {
            noc: &result.mesh,
            packed: &packed,
            placement: &result.placement,
            registry: &registry,
        };
        let configs: BTreeMap<AppId, _> = (1..=2u32)
            .map(|i| (AppId(i), result.config_for(AppId(i))))
            .collect();
        let delays = DelayModel::new(3, 4);

        let mk_inputs = |rng: &mut ChaCha8Rng, i: usize| {
            let inputs = random_inputs(rng, &graphs[i], 3);
            to_union_coords(&packed, AppId(i as u32 + 1), &inputs)
        };
        let in_a = mk_inputs(&mut rng, 0);
        let in_b = mk_inputs(&mut rng, 1);

        let scenario = vec![
            (AppId(1), in_a.clone()),
            (AppId(2), in_b.clone()),
            (AppId(1), in_a.clone()),
        ];
        let runs = reconfigure_and_run(&setup, &configs, &scenario, &delays).unwrap();
        let solo_a =
            simulate(&setup, &configs[&AppId(1)], AppId(1), &in_a, &delays, false).unwrap();
        let solo_b =
            simulate(&setup, &configs[&AppId(2)], AppId(2), &in_b, &delays, false).unwrap();
        assert_eq!(runs[0].outputs, solo_a.outputs);
        assert_eq!(runs[1].outputs, solo_b.outputs);
        assert_eq!(runs[2].outputs, solo_a.outputs);
        exercised += 1;
    }
    assert!(exercised >= 10, "only {exercised} scenarios ran");
}

#[test]
fn empty_scenario_is_empty() {
    let graphs =
        vec![sdfnoc_core::graph::parse_app_graph("app a\nnode x type=ID in=1 out=1").unwrap()];
    let packed = merge(&graphs, None).unwrap();
    let noc = build_mesh(2, 2).unwrap();
    let result = pnr(&packed, &noc, 0, 50).unwrap();
    let registry = OperatorRegistry::standard();
    let setup = SimSetup {
        noc: &result.mesh,
        packed: &packed,
        placement: &result.placement,
        registry: &registry,
    };
    let runs = reconfigure_and_run(&setup, &BTreeMap::new(), &[], &DelayModel::new(0, 0)).unwrap();
    assert!(runs.is_empty());
}

#[test]
fn resynchronization_is_skew_independent() {
    // Oracle: however arrival is interleaved across streams, the tuple
    // sequence equals the plain index zip.
    use sdfnoc_core::sim::resynchronize;
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..200 {
        let n_streams = rng.random_range(2..5);
        let len = rng.random_range(0..6);
        let streams: Vec<Stream> = (0..n_streams)
            .map(|s| {
                (0..len)
                    .map(|k| {
                        if rng.random_range(0..6) == 0 {
                            Token::Null
                        } else {
                            Token::Scalar((s * 100 + k) as i64)
                        }
                    })
                    .collect()
            })
            .collect();

        // simulate skewed arrival: per-stream queues fed in a random
        // interleaving, tuples popped whenever every queue is non-empty
        let mut queues: Vec<std::collections::VecDeque<Token>> =
            vec![std::collections::VecDeque::new(); n_streams];
        let mut feed: Vec<(usize, Token)> = Vec::new();
        for (s, stream) in streams.iter().enumerate() {
            for t in stream {
                feed.push((s, t.clone()));
            }
        }
        // random interleave preserving per-stream order
        let mut arrived: Vec<Vec<Token>> = streams.iter().map(|_| Vec::new()).collect();
        let mut remaining: Vec<usize> = streams.iter().map(|s| s.len()).collect();
        let mut tuples = Vec::new();
        while remaining.iter().any(|&r| r > 0) {
            let candidates: Vec<usize> = (0..n_streams).filter(|&s| remaining[s] > 0).collect();
            let s = candidates[rng.random_range(0..candidates.len())];
            let idx = streams[s].len() - remaining[s];
            queues[s].push_back(streams[s][idx].clone());
            arrived[s].push(streams[s][idx].clone());
            remaining[s] -= 1;
            while queues.iter().all(|q| !q.is_empty()) {
                tuples.push(
                    queues
                        .iter_mut()
                        .map(|q| q.pop_front().unwrap())
                        .collect::<Vec<_>>(),
                );
            }
        }
        assert_eq!(tuples, resynchronize(&streams));
    }
}
