//! Direct stream evaluation of an application graph.
//!
//! Each node fires once per token index in topological order: token `k` of
//! every output therefore depends only on tokens `0..=k` of the inputs, and
//! the result is independent of which topological order is chosen.

use std::collections::BTreeMap;

use thiserror::Error;

use super::{DataflowGraph, GraphError, Vertex};
use crate::registry::{OpError, OperatorRegistry};
use crate::token::Stream;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("no registry entry for operator type {0}")]
    MissingOperator(String),
    #[error("node {node} declares in={got_in} out={got_out} but operator {ty} has in={want_in} out={want_out}")]
    ArityMismatch {
        node: String,
        ty: String,
        want_in: usize,
        want_out: usize,
        got_in: usize,
        got_out: usize,
    },
    #[error("input streams have unequal lengths: {0:?}")]
    UnequalInputLengths(Vec<(String, usize)>),
    #[error("missing input stream for boundary port {0}")]
    MissingInput(String),
    #[error("input supplied for {0}, which is not an unconnected input port")]
    UnexpectedInput(String),
    #[error(transparent)]
    Op(#[from] OpError),
}

/// Evaluates `g` on the given boundary input streams, returning the streams
/// produced at every unconnected output port. All input streams must have
/// equal length; outputs have the same length.
pub fn evaluate(
    g: &DataflowGraph,
    inputs: &BTreeMap<Vertex, Stream>,
    registry: &OperatorRegistry,
) -> Result<BTreeMap<Vertex, Stream>, EvalError> {
    let order = g.topo_order()?;
    evaluate_with_order(g, &order, inputs, registry)
}

/// Evaluation with a caller-chosen firing order; `order` must be a valid
/// topological order over the node ids of `g`. Exposed so order-invariance
/// can be tested directly.
pub fn evaluate_with_order(
    g: &DataflowGraph,
    order: &[String],
    inputs: &BTreeMap<Vertex, Stream>,
    registry: &OperatorRegistry,
) -> Result<BTreeMap<Vertex, Stream>, EvalError> {
    for n in &g.nodes {
        let (want_in, want_out) = registry
            .arity_of(&n.ty)
            .ok_or_else(|| EvalError::MissingOperator(n.ty.to_string()))?;
        if want_in != n.in_arity || want_out != n.out_arity {
            return Err(EvalError::ArityMismatch {
                node: n.id.clone(),
                ty: n.ty.to_string(),
                want_in,
                want_out,
                got_in: n.in_arity,
                got_out: n.out_arity,
            });
        }
    }

    let boundary_in = g.boundary_inputs();
    for v in &boundary_in {
        if !inputs.contains_key(v) {
            return Err(EvalError::MissingInput(v.to_string()));
        }
    }
    for v in inputs.keys() {
        if !boundary_in.contains(v) {
            return Err(EvalError::UnexpectedInput(v.to_string()));
        }
    }
    let lengths: Vec<(String, usize)> = boundary_in
        .iter()
        .map(|v| (v.to_string(), inputs[v].len()))
        .collect();
    let len = lengths.first().map(|(_, l)| *l).unwrap_or(0);
    if lengths.iter().any(|(_, l)| *l != len) {
        return Err(EvalError::UnequalInputLengths(lengths));
    }

    // feeds: input vertex -> driving output vertex
    let mut feeds: BTreeMap<&Vertex, &Vertex> = BTreeMap::new();
    for e in &g.edges {
        for l in &e.loads {
            feeds.insert(l, &e.driver);
        }
    }

    let mut produced: BTreeMap<Vertex, Stream> = BTreeMap::new();
    for k in 0..len {
        for id in order {
            let node = g.node(id).expect("order references known nodes");
            let mut args = Vec::with_capacity(node.in_arity);
            for p in 0..node.in_arity {
                let v = Vertex::input(id, p);
                let tok = match feeds.get(&v) {
                    Some(driver) => produced[driver][k].clone(),
                    None => inputs[&v][k].clone(),
                };
                args.push(tok);
            }
            let out = registry.fire(&node.ty, &args)?;
            for (p, tok) in out.into_iter().enumerate() {
                produced.entry(Vertex::output(id, p)).or_default().push(tok);
            }
        }
    }

    let mut result = BTreeMap::new();
    for v in g.boundary_outputs() {
        let stream = produced.remove(&v).unwrap_or_default();
        result.insert(v, stream);
    }
    Ok(result)
}
