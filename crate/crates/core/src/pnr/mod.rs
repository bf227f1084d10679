//! Place and route of a packed union graph on a mesh NoC.
//!
//! Placement maps every NoC-facing port (pack external ports plus
//! application boundary ports) injectively onto router local ports.
//! Routing builds a driver-rooted link tree per external edge; edges whose
//! color sets intersect are active simultaneously and get disjoint links,
//! while color-disjoint edges may share links freely. An independent checker
//! re-verifies all constraints, and per-application crossbar configurations
//! are derived by switching on exactly the links of that application's edges.

mod check;
mod format;
mod place;
mod route;

pub use check::{check, CheckViolation};
pub use format::{read_pnr, write_pnr};
pub use place::{place, placeable_vertices};
pub use route::route;

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::merge::{AppId, ColorSet, PackedGraph, UnionVertex};
use crate::noc::{Link, MeshNoc, NocConfig, RouterId};

pub const DEFAULT_MAX_RIP_UP: usize = 50;

/// Injective map from NoC-facing vertices to router local ports.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Placement {
    pub assignments: BTreeMap<UnionVertex, RouterId>,
}

impl Placement {
    pub fn router_of(&self, v: &UnionVertex) -> Option<RouterId> {
        self.assignments.get(v).copied()
    }

    /// Inverse lookup: the vertex occupying a router's local port.
    pub fn vertex_at(&self, r: RouterId) -> Option<&UnionVertex> {
        self.assignments
            .iter()
            .find(|(_, &router)| router == r)
            .map(|(v, _)| v)
    }
}

/// A routed external edge: its link tree and the colors it serves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoutedEdge {
    pub links: BTreeSet<Link>,
    pub colors: ColorSet,
}

/// Per-application usage summary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct AppCost {
    pub links: usize,
    pub wirelength: u64,
}

/// Complete place-and-route result. Configurations are derived on demand
/// from the routes, so they can never drift out of sync with them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PnrResult {
    pub mesh: MeshNoc,
    pub seed: u64,
    pub placement: Placement,
    /// Keyed by external edge id (position among external edges in canonical
    /// union edge order).
    pub routes: BTreeMap<usize, RoutedEdge>,
}

impl PnrResult {
    /// Crossbar configuration for one application: the union of intra-router
    /// connections over the routes of every edge carrying its color.
    pub fn config_for(&self, app: AppId) -> NocConfig {
        let mut cfg = NocConfig::default();
        for routed in self.routes.values() {
            if !routed.colors.contains(&app) {
                continue;
            }
            for link in &routed.links {
                if let Link::Intra {
                    router,
                    input,
                    output,
                } = link
                {
                    cfg.connect(*router, *input, *output);
                }
            }
        }
        cfg
    }

    pub fn app_ids(&self) -> BTreeSet<AppId> {
        self.routes
            .values()
            .flat_map(|r| r.colors.iter().copied())
            .collect()
    }

    /// Links used and summed half-perimeter wirelength per application.
    pub fn cost_summary(&self) -> BTreeMap<AppId, AppCost> {
        let mut out: BTreeMap<AppId, AppCost> = BTreeMap::new();
        for app in self.app_ids() {
            let mut links: BTreeSet<&Link> = BTreeSet::new();
            let mut wirelength = 0u64;
            for routed in self.routes.values() {
                if !routed.colors.contains(&app) {
                    continue;
                }
                links.extend(routed.links.iter());
                wirelength += route_hpwl(&routed.links);
            }
            out.insert(
                app,
                AppCost {
                    links: links.len(),
                    wirelength,
                },
            );
        }
        out
    }
}

fn route_hpwl(links: &BTreeSet<Link>) -> u64 {
    let mut rows: Vec<usize> = Vec::new();
    let mut cols: Vec<usize> = Vec::new();
    for l in links {
        let rs: &[RouterId] = match l {
            Link::Intra { router, .. } => std::slice::from_ref(router),
            Link::Inter { from, to, .. } => {
                rows.push(to.row);
                cols.push(to.col);
                std::slice::from_ref(from)
            }
        };
        for r in rs {
            rows.push(r.row);
            cols.push(r.col);
        }
    }
    if rows.is_empty() {
        return 0;
    }
    let dr = rows.iter().max().unwrap() - rows.iter().min().unwrap();
    let dc = cols.iter().max().unwrap() - cols.iter().min().unwrap();
    (dr + dc) as u64
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PnrError {
    #[error("placement needs {needed} router local ports but the mesh has {available}")]
    Capacity { needed: usize, available: usize },
    #[error(
        "unroutable after {iterations} rip-up iterations; blocked external edges: {blocked:?}"
    )]
    Unroutable {
        iterations: usize,
        blocked: Vec<usize>,
    },
    #[error("external edge {edge} endpoint {vertex} is not placed")]
    UnplacedEndpoint { edge: usize, vertex: String },
    #[error("pnr format: {0}")]
    Format(String),
}

/// Full flow: place, route, wrap up. Deterministic for a fixed seed.
pub fn pnr(
    packed: &PackedGraph,
    noc: &MeshNoc,
    seed: u64,
    max_rip_up: usize,
) -> Result<PnrResult, PnrError> {
    let placement = place(packed, noc, seed)?;
    let routes = route(packed, noc, &placement, max_rip_up)?;
    Ok(PnrResult {
        mesh: *noc,
        seed,
        placement,
        routes,
    })
}

/// Test helper: a packed graph with every node in its own pack, one port per
/// edge endpoint, and explicit colors.
#[cfg(test)]
pub(crate) fn hand_packed(nodes: &[&str], edges: &[(&str, &str, &[u32])]) -> PackedGraph {
    use crate::graph::TypeLabel;
    use crate::merge::{divide, UnionArity, UnionEdge, UnionGraph, UnionNodeId};

    let unode = |s: &str| UnionNodeId {
        ty: TypeLabel::new(s).unwrap(),
        copy: 1,
    };
    let mut out_port: BTreeMap<String, usize> = BTreeMap::new();
    let mut in_port: BTreeMap<String, usize> = BTreeMap::new();
    let mut es: Vec<UnionEdge> = edges
        .iter()
        .map(|(a, b, colors)| {
            let po = out_port.entry(a.to_string()).or_insert(0);
            let pi = in_port.entry(b.to_string()).or_insert(0);
            let e = UnionEdge {
                driver: UnionVertex::output(&unode(a), *po),
                loads: vec![UnionVertex::input(&unode(b), *pi)],
                colors: colors.iter().map(|&c| AppId(c)).collect(),
            };
            *po += 1;
            *pi += 1;
            e
        })
        .collect();
    es.sort();
    let n_apps = es
        .iter()
        .flat_map(|e| e.colors.iter())
        .map(|a| a.0)
        .max()
        .unwrap_or(1);
    let union = UnionGraph {
        apps: (1..=n_apps).map(|i| format!("app{i}")).collect(),
        nodes: nodes
            .iter()
            .map(|n| {
                (
                    unode(n),
                    UnionArity {
                        in_arity: 4,
                        out_arity: 4,
                    },
                )
            })
            .collect(),
        edges: es,
        sigma_n: BTreeMap::new(),
        sigma_e: BTreeMap::new(),
    };
    let marks: BTreeMap<UnionNodeId, u32> = union
        .nodes
        .keys()
        .enumerate()
        .map(|(i, n)| (n.clone(), i as u32))
        .collect();
    divide(union, marks)
}
