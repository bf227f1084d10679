//! Application dataflow graphs: typed nodes with ordered ports, multi-load
//! edges, acyclicity validation, dead-node elimination, and direct stream
//! evaluation. Direct evaluation is the reference oracle the NoC simulation
//! is checked against.

mod eval;
mod parse;

pub use eval::{evaluate, evaluate_with_order, EvalError};
pub use parse::{parse_app_graph, write_app_graph, ParseError};

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use thiserror::Error;

/// Operator type of a node (e.g. `GAUSS3`, `CANNY`, `ADDER`). Must match
/// `[A-Za-z_][A-Za-z0-9_]*`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TypeLabel(String);

impl TypeLabel {
    pub fn new(name: &str) -> Result<Self, GraphError> {
        if is_identifier(name) {
            Ok(TypeLabel(name.to_string()))
        } else {
            Err(GraphError::BadIdentifier(name.to_string()))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for TypeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// A processing operator instance with fixed port counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    pub id: String,
    pub ty: TypeLabel,
    pub in_arity: usize,
    pub out_arity: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PortDir {
    In,
    Out,
}

/// A single input or output port of a node. Ports, not nodes, are what edges
/// attach to and what placement later assigns to router local ports.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Vertex {
    pub node: String,
    pub dir: PortDir,
    pub port: usize,
}

impl Vertex {
    pub fn input(node: &str, port: usize) -> Self {
        Vertex {
            node: node.to_string(),
            dir: PortDir::In,
            port,
        }
    }

    pub fn output(node: &str, port: usize) -> Self {
        Vertex {
            node: node.to_string(),
            dir: PortDir::Out,
            port,
        }
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let dir = match self.dir {
            PortDir::In => "in",
            PortDir::Out => "out",
        };
        write!(f, "{}.{}{}", self.node, dir, self.port)
    }
}

/// A single-driver, multi-load connection between ports.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub driver: Vertex,
    pub loads: Vec<Vertex>,
}

/// One application's dataflow graph. Node-level acyclicity is the admission
/// condition: acyclic graphs are immune to unknown link delays.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DataflowGraph {
    pub name: String,
    pub nodes: Vec<Node>,
    pub edges: Vec<Edge>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("invalid identifier {0:?}")]
    BadIdentifier(String),
    #[error("duplicate node id {0:?}")]
    DuplicateNode(String),
    #[error("edge references unknown node {0:?}")]
    UnknownNode(String),
    #[error("port {vertex} out of range: node declares {arity} {dir:?} port(s)")]
    PortOutOfRange {
        vertex: String,
        dir: PortDir,
        arity: usize,
    },
    #[error("vertex {0} drives more than one edge")]
    DuplicateDriver(String),
    #[error("vertex {0} is loaded more than once")]
    DuplicateLoad(String),
    #[error("edge driver {0} must be an output port")]
    DriverNotOutput(String),
    #[error("edge load {0} must be an input port")]
    LoadNotInput(String),
    #[error("graph contains a cycle: {}", .0.join(" -> "))]
    Cycle(Vec<String>),
    #[error("unknown output vertex {0}")]
    UnknownOutput(String),
}

impl DataflowGraph {
    pub fn node(&self, id: &str) -> Option<&Node> {
        self.nodes.iter().find(|n| n.id == id)
    }

    /// Structural validation: ids unique, edge endpoints exist and are in
    /// range, drivers are outputs with at most one edge each, loads are
    /// inputs loaded at most once. Does not check acyclicity.
    pub fn validate_structure(&self) -> Result<(), GraphError> {
        let mut ids = BTreeSet::new();
        for n in &self.nodes {
            if !is_identifier(&n.id) {
                return Err(GraphError::BadIdentifier(n.id.clone()));
            }
            if !ids.insert(n.id.as_str()) {
                return Err(GraphError::DuplicateNode(n.id.clone()));
            }
        }
        let mut drivers = BTreeSet::new();
        let mut loads = BTreeSet::new();
        for e in &self.edges {
            if e.driver.dir != PortDir::Out {
                return Err(GraphError::DriverNotOutput(e.driver.to_string()));
            }
            self.check_vertex(&e.driver)?;
            if !drivers.insert(e.driver.clone()) {
                return Err(GraphError::DuplicateDriver(e.driver.to_string()));
            }
            for l in &e.loads {
                if l.dir != PortDir::In {
                    return Err(GraphError::LoadNotInput(l.to_string()));
                }
                self.check_vertex(l)?;
                if !loads.insert(l.clone()) {
                    return Err(GraphError::DuplicateLoad(l.to_string()));
                }
            }
        }
        Ok(())
    }

    fn check_vertex(&self, v: &Vertex) -> Result<(), GraphError> {
        let node = self
            .node(&v.node)
            .ok_or_else(|| GraphError::UnknownNode(v.node.clone()))?;
        let arity = match v.dir {
            PortDir::In => node.in_arity,
            PortDir::Out => node.out_arity,
        };
        if v.port >= arity {
            return Err(GraphError::PortOutOfRange {
                vertex: v.to_string(),
                dir: v.dir,
                arity,
            });
        }
        Ok(())
    }

    /// Node-to-node successor map in canonical (sorted) order.
    pub fn successors(&self) -> BTreeMap<&str, BTreeSet<&str>> {
        let mut succ: BTreeMap<&str, BTreeSet<&str>> = self
            .nodes
            .iter()
            .map(|n| (n.id.as_str(), BTreeSet::new()))
            .collect();
        for e in &self.edges {
            for l in &e.loads {
                succ.get_mut(e.driver.node.as_str())
                    .expect("validated edge")
                    .insert(l.node.as_str());
            }
        }
        succ
    }

    /// Unconnected input ports: the graph's system inputs.
    pub fn boundary_inputs(&self) -> Vec<Vertex> {
        let loaded: BTreeSet<&Vertex> = self.edges.iter().flat_map(|e| e.loads.iter()).collect();
        let mut out = Vec::new();
        for n in &self.nodes {
            for p in 0..n.in_arity {
                let v = Vertex::input(&n.id, p);
                if !loaded.contains(&v) {
                    out.push(v);
                }
            }
        }
        out
    }

    /// Unconnected output ports: the graph's system outputs.
    pub fn boundary_outputs(&self) -> Vec<Vertex> {
        let driving: BTreeSet<&Vertex> = self.edges.iter().map(|e| &e.driver).collect();
        let mut out = Vec::new();
        for n in &self.nodes {
            for p in 0..n.out_arity {
                let v = Vertex::output(&n.id, p);
                if !driving.contains(&v) {
                    out.push(v);
                }
            }
        }
        out
    }

    /// A topological order of node ids, smallest id first among ready nodes.
    /// Errors with a witness cycle if none exists.
    pub fn topo_order(&self) -> Result<Vec<String>, GraphError> {
        validate_acyclic(self)?;
        let succ = self.successors();
        let mut indegree: BTreeMap<&str, usize> =
            self.nodes.iter().map(|n| (n.id.as_str(), 0)).collect();
        for outs in succ.values() {
            for o in outs {
                *indegree.get_mut(o).unwrap() += 1;
            }
        }
        let mut ready: BTreeSet<&str> = indegree
            .iter()
            .filter(|(_, &d)| d == 0)
            .map(|(&n, _)| n)
            .collect();
        let mut order = Vec::new();
        while let Some(&n) = ready.iter().next() {
            ready.remove(n);
            order.push(n.to_string());
            for &m in &succ[n] {
                let d = indegree.get_mut(m).unwrap();
                *d -= 1;
                if *d == 0 {
                    ready.insert(m);
                }
            }
        }
        Ok(order)
    }
}

/// Checks node-level acyclicity; on failure returns one witness cycle as a
/// node-id sequence (first node repeated at the end is omitted).
pub fn validate_acyclic(g: &DataflowGraph) -> Result<(), GraphError> {
    let succ = g.successors();
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        White,
        Gray,
        Black,
    }
    let mut mark: BTreeMap<&str, Mark> = succ.keys().map(|&n| (n, Mark::White)).collect();
    let mut parent: BTreeMap<&str, &str> = BTreeMap::new();

    for &start in succ.keys() {
        if mark[start] != Mark::White {
            continue;
        }
        // Iterative DFS with an explicit path stack.
        let mut stack: Vec<(&str, std::collections::btree_set::Iter<'_, &str>)> =
            vec![(start, succ[start].iter())];
        mark.insert(start, Mark::Gray);
        while let Some((node, iter)) = stack.last_mut() {
            let node = *node;
            match iter.next() {
                Some(&next) => match mark[next] {
                    Mark::White => {
                        mark.insert(next, Mark::Gray);
                        parent.insert(next, node);
                        stack.push((next, succ[next].iter()));
                    }
                    Mark::Gray => {
                        // Found a back edge; reconstruct the cycle.
                        let mut cycle = vec![node.to_string()];
                        let mut cur = node;
                        while cur != next {
                            cur = parent[cur];
                            cycle.push(cur.to_string());
                        }
                        cycle.reverse();
                        return Err(GraphError::Cycle(cycle));
                    }
                    Mark::Black => {}
                },
                None => {
                    mark.insert(node, Mark::Black);
                    stack.pop();
                }
            }
        }
    }
    Ok(())
}

/// Restricts `g` to the nodes from which some declared output vertex is
/// reachable. Edges are induced on the retained nodes; loads outside the
/// retained set are dropped, and edges with no remaining loads disappear.
/// Retained node ids are unchanged.
pub fn eliminate_dead_nodes(
    g: &DataflowGraph,
    outputs: &BTreeSet<Vertex>,
) -> Result<DataflowGraph, GraphError> {
    for v in outputs {
        if v.dir != PortDir::Out {
            return Err(GraphError::UnknownOutput(v.to_string()));
        }
        g.check_vertex(v)
            .map_err(|_| GraphError::UnknownOutput(v.to_string()))?;
    }

    // Reverse-reach from the output vertices' nodes.
    let mut preds: BTreeMap<&str, BTreeSet<&str>> = g
        .nodes
        .iter()
        .map(|n| (n.id.as_str(), BTreeSet::new()))
        .collect();
    for e in &g.edges {
        for l in &e.loads {
            preds
                .get_mut(l.node.as_str())
                .expect("validated edge")
                .insert(e.driver.node.as_str());
        }
    }
    let mut live: BTreeSet<&str> = BTreeSet::new();
    let mut queue: VecDeque<&str> = outputs.iter().map(|v| v.node.as_str()).collect();
    while let Some(n) = queue.pop_front() {
        if live.insert(n) {
            for &p in &preds[n] {
                queue.push_back(p);
            }
        }
    }

    let nodes = g
        .nodes
        .iter()
        .filter(|n| live.contains(n.id.as_str()))
        .cloned()
        .collect();
    let mut edges = Vec::new();
    for e in &g.edges {
        if !live.contains(e.driver.node.as_str()) {
            continue;
        }
        let loads: Vec<Vertex> = e
            .loads
            .iter()
            .filter(|l| live.contains(l.node.as_str()))
            .cloned()
            .collect();
        if !loads.is_empty() {
            edges.push(Edge {
                driver: e.driver.clone(),
                loads,
            });
        }
    }
    Ok(DataflowGraph {
        name: g.name.clone(),
        nodes,
        edges,
    })
}
