//! Independent verification of a place-and-route result.
//!
//! Re-checks the three map-and-route constraints from first principles,
//! without reusing any router internals: placement injectivity, per-edge
//! route connectivity (a tree over the route's own links spanning driver and
//! all loads), pairwise link-disjointness of color-intersecting edges, and
//! validity of every derived per-application configuration.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use crate::merge::{AppId, PackedGraph};
use crate::noc::{validate_config, ConfigViolation, Link, MeshNoc, Port, Resource, RouterId};

use super::{Placement, PnrResult, RoutedEdge};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CheckViolation {
    PlacementCollision {
        router: RouterId,
        vertices: Vec<String>,
    },
    PlacementOffMesh {
        vertex: String,
        router: RouterId,
    },
    MissingPlacement {
        vertex: String,
    },
    LoadUnreachable {
        edge: usize,
        load: String,
    },
    DisconnectedLink {
        edge: usize,
        link: String,
    },
    NotATree {
        edge: usize,
        position: String,
    },
    SharedResource {
        edge_a: usize,
        edge_b: usize,
        resource: String,
    },
    BadConfig {
        app: AppId,
        violation: ConfigViolation,
    },
    MissingRoute {
        edge: usize,
    },
}

impl fmt::Display for CheckViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CheckViolation::PlacementCollision { router, vertices } => {
                write!(f, "router {router} hosts several vertices: {vertices:?}")
            }
            CheckViolation::PlacementOffMesh { vertex, router } => {
                write!(f, "vertex {vertex} placed on {router}, outside the mesh")
            }
            CheckViolation::MissingPlacement { vertex } => {
                write!(f, "vertex {vertex} has no placement")
            }
            CheckViolation::LoadUnreachable { edge, load } => {
                write!(f, "edge e{edge}: load {load} not reached by its route")
            }
            CheckViolation::DisconnectedLink { edge, link } => {
                write!(f, "edge e{edge}: link {link} unreachable from the driver")
            }
            CheckViolation::NotATree { edge, position } => {
                write!(f, "edge e{edge}: position {position} entered twice")
            }
            CheckViolation::SharedResource {
                edge_a,
                edge_b,
                resource,
            } => write!(
                f,
                "edges e{edge_a} and e{edge_b} share {resource:?} despite intersecting colors"
            ),
            CheckViolation::BadConfig { app, violation } => {
                write!(f, "config for app {app}: {violation}")
            }
            CheckViolation::MissingRoute { edge } => write!(f, "edge e{edge} has no route"),
        }
    }
}

/// Runs every check and returns all violations found (empty = ok).
pub fn check(
    packed: &PackedGraph,
    noc: &MeshNoc,
    placement: &Placement,
    routes: &BTreeMap<usize, RoutedEdge>,
) -> Vec<CheckViolation> {
    let mut violations = Vec::new();

    // (1) injectivity, mesh membership, domain coverage
    let mut by_router: BTreeMap<RouterId, Vec<String>> = BTreeMap::new();
    for (v, &r) in &placement.assignments {
        by_router.entry(r).or_default().push(v.to_string());
        if !noc.contains(r) {
            violations.push(CheckViolation::PlacementOffMesh {
                vertex: v.to_string(),
                router: r,
            });
        }
    }
    for (router, vertices) in by_router {
        if vertices.len() > 1 {
            violations.push(CheckViolation::PlacementCollision { router, vertices });
        }
    }
    for v in super::placeable_vertices(packed) {
        if placement.router_of(&v).is_none() {
            violations.push(CheckViolation::MissingPlacement {
                vertex: v.to_string(),
            });
        }
    }

    // (2) per-route connectivity and tree shape over its own links
    for (ext_id, e) in packed.external() {
        let Some(routed) = routes.get(&ext_id) else {
            violations.push(CheckViolation::MissingRoute { edge: ext_id });
            continue;
        };
        let Some(driver_router) = placement.router_of(&e.driver) else {
            continue; // reported as MissingPlacement above
        };

        // positions: (router, port, entering) encoded as strings-free tuples
        type Pos = (RouterId, Port, bool);
        let mut adjacency: BTreeMap<Pos, Vec<(Pos, &Link)>> = BTreeMap::new();
        let mut indegree: BTreeMap<Pos, usize> = BTreeMap::new();
        for link in &routed.links {
            let (from, to): (Pos, Pos) = match link {
                Link::Intra {
                    router,
                    input,
                    output,
                } => ((*router, *input, true), (*router, *output, false)),
                Link::Inter {
                    from,
                    from_port,
                    to,
                    to_port,
                } => ((*from, *from_port, false), (*to, *to_port, true)),
            };
            adjacency.entry(from).or_default().push((to, link));
            *indegree.entry(to).or_insert(0) += 1;
        }
        for (pos, deg) in &indegree {
            if *deg > 1 {
                violations.push(CheckViolation::NotATree {
                    edge: ext_id,
                    position: format!("{}{}{}", pos.0, pos.1, if pos.2 { "<" } else { ">" }),
                });
            }
        }

        let root: Pos = (driver_router, Port::Local, true);
        let mut reached_links: BTreeSet<&Link> = BTreeSet::new();
        let mut reached_pos: BTreeSet<Pos> = BTreeSet::from([root]);
        let mut queue = VecDeque::from([root]);
        while let Some(p) = queue.pop_front() {
            for (next, link) in adjacency.get(&p).into_iter().flatten() {
                reached_links.insert(link);
                if reached_pos.insert(*next) {
                    queue.push_back(*next);
                }
            }
        }
        for load in &e.loads {
            let Some(r) = placement.router_of(load) else {
                continue;
            };
            if !reached_pos.contains(&(r, Port::Local, false)) {
                violations.push(CheckViolation::LoadUnreachable {
                    edge: ext_id,
                    load: load.to_string(),
                });
            }
        }
        for link in &routed.links {
            if !reached_links.contains(link) {
                violations.push(CheckViolation::DisconnectedLink {
                    edge: ext_id,
                    link: link.to_string(),
                });
            }
        }
    }

    // (3) disjointness of color-intersecting edges
    let ids: Vec<usize> = routes.keys().copied().collect();
    for (i, &a) in ids.iter().enumerate() {
        for &b in &ids[i + 1..] {
            let (ra, rb) = (&routes[&a], &routes[&b]);
            if ra.colors.is_disjoint(&rb.colors) {
                continue;
            }
            let res_a: BTreeSet<Resource> = ra.links.iter().map(|l| l.resource()).collect();
            for link in &rb.links {
                if res_a.contains(&link.resource()) {
                    violations.push(CheckViolation::SharedResource {
                        edge_a: a,
                        edge_b: b,
                        resource: format!("{:?}", link.resource()),
                    });
                }
            }
        }
    }

    // (4) derived configurations are valid
    let result = PnrResult {
        mesh: *noc,
        seed: 0,
        placement: placement.clone(),
        routes: routes.clone(),
    };
    for app in packed.union.app_ids() {
        let cfg = result.config_for(app);
        for violation in validate_config(noc, &cfg) {
            violations.push(CheckViolation::BadConfig { app, violation });
        }
    }

    violations
}
