//! Union-graph construction over a set of temporally exclusive application
//! graphs.
//!
//! Nodes are labeled per type and occurrence, the union keeps the per-type
//! maximum copy count, edges accumulate one color per application that uses
//! the connection, color-combination flooding assigns packing marks, and the
//! division splits edges into hardwired internal arcs and NoC-routed external
//! edges. The area metric sums intrinsic node areas plus one router area per
//! pack.

pub(crate) mod format;
mod pack;

pub use format::{read_union, write_union, write_union_dot};
pub use pack::{pack, pack_in_order, packing_order};

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::graph::{validate_acyclic, DataflowGraph, GraphError, PortDir, TypeLabel, Vertex};

/// Application index, 1-based in project order. Doubles as the edge color and
/// as the route-conflict index: edges whose color sets intersect are active
/// simultaneously and must not share links.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AppId(pub u32);

impl fmt::Display for AppId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// The exact set of colors on an edge; the flood-fill equivalence key for
/// packing.
pub type ColorSet = BTreeSet<AppId>;

/// A node identified by type and occurrence within one application.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledNode {
    pub ty: TypeLabel,
    /// 1-based occurrence of this type within its application, in node
    /// declaration order.
    pub occurrence: u32,
    pub app: AppId,
}

/// A union-graph node: the `copy`-th shared instance of a type.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct UnionNodeId {
    pub ty: TypeLabel,
    pub copy: u32,
}

impl fmt::Display for UnionNodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}#{}", self.ty, self.copy)
    }
}

/// A port of a union node.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct UnionVertex {
    pub node: UnionNodeId,
    pub dir: PortDir,
    pub port: usize,
}

impl UnionVertex {
    pub fn input(node: &UnionNodeId, port: usize) -> Self {
        UnionVertex {
            node: node.clone(),
            dir: PortDir::In,
            port,
        }
    }

    pub fn output(node: &UnionNodeId, port: usize) -> Self {
        UnionVertex {
            node: node.clone(),
            dir: PortDir::Out,
            port,
        }
    }
}

impl fmt::Display for UnionVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let dir = match self.dir {
            PortDir::In => "in",
            PortDir::Out => "out",
        };
        write!(f, "{}.{}{}", self.node, dir, self.port)
    }
}

/// A colored union edge: single driver, canonicalized load list, and the set
/// of applications whose wiring maps onto it.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct UnionEdge {
    pub driver: UnionVertex,
    pub loads: Vec<UnionVertex>,
    pub colors: ColorSet,
}

impl UnionEdge {
    /// Driver node plus all load nodes (deduplicated, sorted).
    pub fn endpoint_nodes(&self) -> BTreeSet<&UnionNodeId> {
        let mut s: BTreeSet<&UnionNodeId> = self.loads.iter().map(|l| &l.node).collect();
        s.insert(&self.driver.node);
        s
    }
}

/// Arity record of a union node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UnionArity {
    pub in_arity: usize,
    pub out_arity: usize,
}

/// The merged graph plus the node and edge maps from every application.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnionGraph {
    /// Application names in input order; index + 1 is the AppId.
    pub apps: Vec<String>,
    pub nodes: BTreeMap<UnionNodeId, UnionArity>,
    /// Edges in canonical (sorted) order.
    pub edges: Vec<UnionEdge>,
    /// sigma_N: (app, app-graph node id) -> union node.
    pub sigma_n: BTreeMap<(AppId, String), UnionNodeId>,
    /// sigma_E: (app, index into that app graph's edge list) -> union edge index.
    pub sigma_e: BTreeMap<(AppId, usize), usize>,
}

impl UnionGraph {
    pub fn app_ids(&self) -> impl Iterator<Item = AppId> + '_ {
        (1..=self.apps.len() as u32).map(AppId)
    }

    pub fn app_id_by_name(&self, name: &str) -> Option<AppId> {
        self.apps
            .iter()
            .position(|a| a == name)
            .map(|i| AppId(i as u32 + 1))
    }

    /// Union nodes active in an application: the sigma_N image of its graph.
    pub fn active_nodes(&self, app: AppId) -> BTreeSet<UnionNodeId> {
        self.sigma_n
            .iter()
            .filter(|((a, _), _)| *a == app)
            .map(|(_, n)| n.clone())
            .collect()
    }

    /// Boundary input vertices of an application: input ports of active nodes
    /// not loaded by any edge carrying that color.
    pub fn boundary_inputs(&self, app: AppId) -> Vec<UnionVertex> {
        let active = self.active_nodes(app);
        let loaded: BTreeSet<&UnionVertex> = self
            .edges
            .iter()
            .filter(|e| e.colors.contains(&app))
            .flat_map(|e| e.loads.iter())
            .collect();
        let mut out = Vec::new();
        for n in &active {
            for p in 0..self.nodes[n].in_arity {
                let v = UnionVertex::input(n, p);
                if !loaded.contains(&v) {
                    out.push(v);
                }
            }
        }
        out
    }

    /// Boundary output vertices of an application: output ports of active
    /// nodes not driving any edge carrying that color.
    pub fn boundary_outputs(&self, app: AppId) -> Vec<UnionVertex> {
        let active = self.active_nodes(app);
        let driving: BTreeSet<&UnionVertex> = self
            .edges
            .iter()
            .filter(|e| e.colors.contains(&app))
            .map(|e| &e.driver)
            .collect();
        let mut out = Vec::new();
        for n in &active {
            for p in 0..self.nodes[n].out_arity {
                let v = UnionVertex::output(n, p);
                if !driving.contains(&v) {
                    out.push(v);
                }
            }
        }
        out
    }
}

/// One group of union nodes fused into a single NoC node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pack {
    pub mark: u32,
    pub nodes: Vec<UnionNodeId>,
    /// Ports of this pack that face the NoC, in canonical order; original
    /// port identities are preserved.
    pub external_ports: Vec<UnionVertex>,
}

/// The union graph divided into packs, with edges split into hardwired
/// internal arcs and NoC-routed external edges (by index into
/// `union.edges`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PackedGraph {
    pub union: UnionGraph,
    pub marks: BTreeMap<UnionNodeId, u32>,
    pub packs: Vec<Pack>,
    pub internal_edges: Vec<usize>,
    pub external_edges: Vec<usize>,
}

impl PackedGraph {
    pub fn mark_of(&self, node: &UnionNodeId) -> u32 {
        self.marks[node]
    }

    pub fn external(&self) -> impl Iterator<Item = (usize, &UnionEdge)> {
        self.external_edges
            .iter()
            .enumerate()
            .map(|(i, &e)| (i, &self.union.edges[e]))
    }

    pub fn is_internal(&self, edge_idx: usize) -> bool {
        self.internal_edges.contains(&edge_idx)
    }
}

/// Intrinsic per-type areas plus the per-node router area, in abstract units.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AreaTable {
    pub intrinsic: BTreeMap<TypeLabel, u64>,
    pub router_area: u64,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MergeError {
    #[error("application {app}: {source}")]
    InvalidGraph { app: String, source: GraphError },
    #[error("duplicate application name {0:?}")]
    DuplicateAppName(String),
    #[error(
        "type {ty} declared with in={a_in} out={a_out} in app {app_a} but in={b_in} out={b_out} in app {app_b}"
    )]
    TypeArityMismatch {
        ty: String,
        app_a: String,
        a_in: usize,
        a_out: usize,
        app_b: String,
        b_in: usize,
        b_out: usize,
    },
    #[error("app {app}: output {driver} drives two edges with different load sets")]
    SameAppDriverConflict { app: AppId, driver: String },
    #[error("no area table entry for type {0}")]
    MissingArea(String),
    #[error("union format: {0}")]
    Format(String),
}

/// Step 1: label every node `P_m^n` — type P, occurrence m (declaration
/// order), application n. Returns one id→label map per graph.
pub fn label_nodes(graphs: &[DataflowGraph]) -> Vec<BTreeMap<String, LabeledNode>> {
    graphs
        .iter()
        .enumerate()
        .map(|(i, g)| {
            let app = AppId(i as u32 + 1);
            let mut seen: BTreeMap<&TypeLabel, u32> = BTreeMap::new();
            g.nodes
                .iter()
                .map(|n| {
                    let m = seen.entry(&n.ty).or_insert(0);
                    *m += 1;
                    (
                        n.id.clone(),
                        LabeledNode {
                            ty: n.ty.clone(),
                            occurrence: *m,
                            app,
                        },
                    )
                })
                .collect()
        })
        .collect()
}

/// Step 2: the union keeps max-over-apps copies of each type; sigma_N sends
/// the m-th occurrence in every app to copy m.
pub fn build_union_nodes(
    graphs: &[DataflowGraph],
    labels: &[BTreeMap<String, LabeledNode>],
) -> (
    BTreeMap<UnionNodeId, UnionArity>,
    BTreeMap<(AppId, String), UnionNodeId>,
) {
    let mut copies: BTreeMap<TypeLabel, u32> = BTreeMap::new();
    let mut arities: BTreeMap<TypeLabel, UnionArity> = BTreeMap::new();
    let mut sigma_n = BTreeMap::new();

    for (g, labelmap) in graphs.iter().zip(labels) {
        for n in &g.nodes {
            let lab = &labelmap[&n.id];
            let c = copies.entry(n.ty.clone()).or_insert(0);
            *c = (*c).max(lab.occurrence);
            arities.entry(n.ty.clone()).or_insert(UnionArity {
                in_arity: n.in_arity,
                out_arity: n.out_arity,
            });
            sigma_n.insert(
                (lab.app, n.id.clone()),
                UnionNodeId {
                    ty: n.ty.clone(),
                    copy: lab.occurrence,
                },
            );
        }
    }

    let mut nodes = BTreeMap::new();
    for (ty, count) in &copies {
        for m in 1..=*count {
            nodes.insert(
                UnionNodeId {
                    ty: ty.clone(),
                    copy: m,
                },
                arities[ty],
            );
        }
    }
    (nodes, sigma_n)
}

/// sigma_E as built by [`build_union_edges`]: (app, app edge index) -> union
/// edge index.
pub type SigmaE = BTreeMap<(AppId, usize), usize>;

/// Step 3: map every application edge through sigma_N and color it with its
/// application index. Two app edges land on the same union edge exactly when
/// their mapped driver and mapped load set coincide; their colors accumulate.
pub fn build_union_edges(
    graphs: &[DataflowGraph],
    sigma_n: &BTreeMap<(AppId, String), UnionNodeId>,
) -> Result<(Vec<UnionEdge>, SigmaE), MergeError> {
    type Signature = (UnionVertex, Vec<UnionVertex>);
    let mut by_signature: BTreeMap<Signature, ColorSet> = BTreeMap::new();
    let mut app_edge_signatures: Vec<((AppId, usize), Signature)> = Vec::new();
    let mut per_app_driver: BTreeMap<(AppId, UnionVertex), Vec<UnionVertex>> = BTreeMap::new();

    for (i, g) in graphs.iter().enumerate() {
        let app = AppId(i as u32 + 1);
        for (ei, e) in g.edges.iter().enumerate() {
            let map = |v: &Vertex| -> UnionVertex {
                let node = &sigma_n[&(app, v.node.clone())];
                UnionVertex {
                    node: node.clone(),
                    dir: v.dir,
                    port: v.port,
                }
            };
            let driver = map(&e.driver);
            let mut loads: Vec<UnionVertex> = e.loads.iter().map(map).collect();
            loads.sort();
            loads.dedup();

            if let Some(prev) = per_app_driver.get(&(app, driver.clone())) {
                if *prev != loads {
                    return Err(MergeError::SameAppDriverConflict {
                        app,
                        driver: driver.to_string(),
                    });
                }
            } else {
                per_app_driver.insert((app, driver.clone()), loads.clone());
            }

            let sig = (driver, loads);
            by_signature.entry(sig.clone()).or_default().insert(app);
            app_edge_signatures.push(((app, ei), sig));
        }
    }

    let edges: Vec<UnionEdge> = by_signature
        .iter()
        .map(|((driver, loads), colors)| UnionEdge {
            driver: driver.clone(),
            loads: loads.clone(),
            colors: colors.clone(),
        })
        .collect();
    let index_of: BTreeMap<&Signature, usize> = by_signature
        .keys()
        .enumerate()
        .map(|(i, s)| (s, i))
        .collect();
    let sigma_e = app_edge_signatures
        .into_iter()
        .map(|(key, sig)| (key, index_of[&sig]))
        .collect();
    Ok((edges, sigma_e))
}

/// Step 7: packs are the mark equivalence classes. An edge whose driver and
/// every load share one mark becomes an internal hardwired arc; every other
/// edge is external and keeps its color set, its endpoints re-exposed at the
/// pack boundary.
pub fn divide(union: UnionGraph, marks: BTreeMap<UnionNodeId, u32>) -> PackedGraph {
    let mut internal = Vec::new();
    let mut external = Vec::new();
    for (i, e) in union.edges.iter().enumerate() {
        let nodes = e.endpoint_nodes();
        let mut it = nodes.iter();
        let first = marks[*it.next().expect("edge has endpoints")];
        if it.all(|n| marks[*n] == first) {
            internal.push(i);
        } else {
            external.push(i);
        }
    }

    let mut by_mark: BTreeMap<u32, Vec<UnionNodeId>> = BTreeMap::new();
    for (node, &m) in &marks {
        by_mark.entry(m).or_default().push(node.clone());
    }

    let mut ports_by_mark: BTreeMap<u32, BTreeSet<UnionVertex>> = BTreeMap::new();
    for &i in &external {
        let e = &union.edges[i];
        ports_by_mark
            .entry(marks[&e.driver.node])
            .or_default()
            .insert(e.driver.clone());
        for l in &e.loads {
            ports_by_mark
                .entry(marks[&l.node])
                .or_default()
                .insert(l.clone());
        }
    }

    let packs = by_mark
        .into_iter()
        .map(|(mark, nodes)| Pack {
            mark,
            nodes,
            external_ports: ports_by_mark
                .remove(&mark)
                .map(|s| s.into_iter().collect())
                .unwrap_or_default(),
        })
        .collect();

    PackedGraph {
        union,
        marks,
        packs,
        internal_edges: internal,
        external_edges: external,
    }
}

fn validate_inputs(graphs: &[DataflowGraph]) -> Result<(), MergeError> {
    let mut names = BTreeSet::new();
    for g in graphs {
        if !names.insert(g.name.as_str()) {
            return Err(MergeError::DuplicateAppName(g.name.clone()));
        }
        g.validate_structure()
            .map_err(|source| MergeError::InvalidGraph {
                app: g.name.clone(),
                source,
            })?;
        validate_acyclic(g).map_err(|source| MergeError::InvalidGraph {
            app: g.name.clone(),
            source,
        })?;
    }
    // Copies of one type are interchangeable, so arities must agree across apps.
    let mut seen: BTreeMap<&TypeLabel, (&DataflowGraph, usize, usize)> = BTreeMap::new();
    for g in graphs {
        for n in &g.nodes {
            match seen.get(&n.ty) {
                None => {
                    seen.insert(&n.ty, (g, n.in_arity, n.out_arity));
                }
                Some(&(g0, i0, o0)) => {
                    if i0 != n.in_arity || o0 != n.out_arity {
                        return Err(MergeError::TypeArityMismatch {
                            ty: n.ty.to_string(),
                            app_a: g0.name.clone(),
                            a_in: i0,
                            a_out: o0,
                            app_b: g.name.clone(),
                            b_in: n.in_arity,
                            b_out: n.out_arity,
                        });
                    }
                }
            }
        }
    }
    Ok(())
}

/// The full merging pipeline: label, build union nodes and edges, pack by
/// color-combination flooding, divide. Deterministic with `seed = None`.
pub fn merge(graphs: &[DataflowGraph], seed: Option<u64>) -> Result<PackedGraph, MergeError> {
    validate_inputs(graphs)?;
    let labels = label_nodes(graphs);
    let (nodes, sigma_n) = build_union_nodes(graphs, &labels);
    let (edges, sigma_e) = build_union_edges(graphs, &sigma_n)?;
    let union = UnionGraph {
        apps: graphs.iter().map(|g| g.name.clone()).collect(),
        nodes,
        edges,
        sigma_n,
        sigma_e,
    };
    let marks = pack(&union, seed);
    Ok(divide(union, marks))
}

/// The area metric: sum of intrinsic areas over union nodes plus one router
/// area per pack. Routing-wire area is not modeled.
pub fn area(packed: &PackedGraph, table: &AreaTable) -> Result<u64, MergeError> {
    let mut total = 0u64;
    for node in packed.union.nodes.keys() {
        let a = table
            .intrinsic
            .get(&node.ty)
            .ok_or_else(|| MergeError::MissingArea(node.ty.to_string()))?;
        total += a;
    }
    total += packed.packs.len() as u64 * table.router_area;
    Ok(total)
}

/// Parses an area table document: lines of `<TYPE> <area>`, plus
/// `ROUTER <area>` for the per-node router cost. `#` starts a comment.
pub fn parse_area_table(text: &str) -> Result<AreaTable, MergeError> {
    let mut table = AreaTable::default();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut it = line.split_whitespace();
        let (name, value) = (it.next(), it.next());
        let err = |msg: &str| MergeError::Format(format!("area table line {}: {msg}", idx + 1));
        let name = name.ok_or_else(|| err("missing type"))?;
        let value: u64 = value
            .ok_or_else(|| err("missing area value"))?
            .parse()
            .map_err(|_| err("bad area value"))?;
        if it.next().is_some() {
            return Err(err("trailing tokens"));
        }
        if name == "ROUTER" {
            table.router_area = value;
        } else {
            let ty = TypeLabel::new(name).map_err(|_| err("bad type label"))?;
            table.intrinsic.insert(ty, value);
        }
    }
    Ok(table)
}
