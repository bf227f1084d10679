//! Seeded random application-graph generation, used by the verification
//! sweeps and available for fuzzing the flow end to end.
//!
//! Graphs are built over a shared type pool so that merging different apps
//! actually shares node copies. Edges only point from earlier to later
//! declared nodes, which guarantees acyclicity, and each input port takes at
//! most one load while an output port drives at most one (multi-load) edge.

use rand::Rng;

use crate::graph::{DataflowGraph, Edge, Node, TypeLabel, Vertex};

/// One operator type available to the generator: label, input and output
/// port counts.
#[derive(Debug, Clone)]
pub struct TypeSpec {
    pub label: String,
    pub in_arity: usize,
    pub out_arity: usize,
}

impl TypeSpec {
    pub fn new(label: &str, in_arity: usize, out_arity: usize) -> Self {
        TypeSpec {
            label: label.to_string(),
            in_arity,
            out_arity,
        }
    }
}

/// A pool of structural types with varied arities; nothing here is meant to
/// be fired, so there are no registry entries for these labels.
pub fn structural_pool() -> Vec<TypeSpec> {
    vec![
        TypeSpec::new("SRC", 0, 1),
        TypeSpec::new("TAP", 1, 2),
        TypeSpec::new("MIX", 2, 1),
        TypeSpec::new("PIPE", 1, 1),
        TypeSpec::new("DROP", 1, 0),
        TypeSpec::new("WIDE", 3, 2),
    ]
}

/// Scalar types covered by [`crate::registry::OperatorRegistry::standard`],
/// so generated graphs can be evaluated and simulated.
pub fn scalar_pool() -> Vec<TypeSpec> {
    vec![
        TypeSpec::new("ID", 1, 1),
        TypeSpec::new("ADDER", 2, 1),
        TypeSpec::new("CONST_3", 0, 1),
        TypeSpec::new("CONST_9", 0, 1),
        TypeSpec::new("SINK", 1, 0),
    ]
}

/// Generates one random acyclic application graph with up to `max_nodes`
/// nodes drawn from `pool`. `connectivity` in 0..=100 is the percent chance
/// that an input port gets wired to some earlier output.
pub fn random_app(
    rng: &mut impl Rng,
    name: &str,
    pool: &[TypeSpec],
    max_nodes: usize,
    connectivity: u32,
) -> DataflowGraph {
    let n = rng.random_range(1..=max_nodes.max(1));
    let mut nodes = Vec::with_capacity(n);
    for i in 0..n {
        let spec = &pool[rng.random_range(0..pool.len())];
        nodes.push(Node {
            id: format!("n{i}"),
            ty: TypeLabel::new(&spec.label).expect("pool labels are identifiers"),
            in_arity: spec.in_arity,
            out_arity: spec.out_arity,
        });
    }

    // loads grouped by chosen driver; one edge per driver
    let mut loads_of: std::collections::BTreeMap<Vertex, Vec<Vertex>> =
        std::collections::BTreeMap::new();
    for i in 1..n {
        for port in 0..nodes[i].in_arity {
            if rng.random_range(0..100) >= connectivity {
                continue;
            }
            let d = rng.random_range(0..i);
            if nodes[d].out_arity == 0 {
                continue;
            }
            let dport = rng.random_range(0..nodes[d].out_arity);
            loads_of
                .entry(Vertex::output(&nodes[d].id, dport))
                .or_default()
                .push(Vertex::input(&nodes[i].id, port));
        }
    }
    let edges = loads_of
        .into_iter()
        .map(|(driver, loads)| Edge { driver, loads })
        .collect();

    let g = DataflowGraph {
        name: name.to_string(),
        nodes,
        edges,
    };
    debug_assert!(g.validate_structure().is_ok());
    debug_assert!(crate::graph::validate_acyclic(&g).is_ok());
    g
}

/// Generates a set of applications over one shared pool.
pub fn random_app_set(
    rng: &mut impl Rng,
    n_apps: usize,
    pool: &[TypeSpec],
    max_nodes: usize,
    connectivity: u32,
) -> Vec<DataflowGraph> {
    (0..n_apps)
        .map(|i| random_app(rng, &format!("app{i}"), pool, max_nodes, connectivity))
        .collect()
}
