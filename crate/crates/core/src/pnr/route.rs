//! Negotiated-congestion maze routing of external edges.
//!
//! Nets are routed per color class, descending fanout then canonical order,
//! each net as a driver-rooted tree grown load by load with Dijkstra over
//! the link graph and free reuse of the net's own tree. Two nets contend for
//! a physical resource only when their color sets intersect; contention is
//! negotiated by ripping up conflicting nets and rerouting with a +1 history
//! cost on overused resources, up to an iteration cap.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};

use crate::merge::{ColorSet, PackedGraph, UnionVertex};
use crate::noc::{Link, MeshNoc, Port, Resource, RouterId, PORTS};

use super::{Placement, PnrError, RoutedEdge};

/// A point in the traversal graph: entering a crossbar at `port`
/// (`entering = true`) or having exited it at `port` (`entering = false`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct Pos {
    router: RouterId,
    port: Port,
    entering: bool,
}

fn successors(noc: &MeshNoc, pos: Pos) -> Vec<(Link, Pos)> {
    let mut out = Vec::new();
    if pos.entering {
        for output in PORTS {
            if output == pos.port {
                continue;
            }
            out.push((
                Link::Intra {
                    router: pos.router,
                    input: pos.port,
                    output,
                },
                Pos {
                    router: pos.router,
                    port: output,
                    entering: false,
                },
            ));
        }
    } else if pos.port != Port::Local {
        if let Some(nbr) = noc.neighbor(pos.router, pos.port) {
            let to_port = pos.port.opposite().expect("non-local port");
            out.push((
                Link::Inter {
                    from: pos.router,
                    from_port: pos.port,
                    to: nbr,
                    to_port,
                },
                Pos {
                    router: nbr,
                    port: to_port,
                    entering: true,
                },
            ));
        }
    }
    out
}

/// Resource claims of currently routed nets: per resource, which edge uses
/// it with which colors.
#[derive(Default)]
struct Claims {
    users: BTreeMap<Resource, BTreeMap<usize, ColorSet>>,
}

impl Claims {
    fn conflicts_for(&self, res: &Resource, edge: usize, colors: &ColorSet) -> usize {
        self.users
            .get(res)
            .map(|m| {
                m.iter()
                    .filter(|(&e, c)| e != edge && !c.is_disjoint(colors))
                    .count()
            })
            .unwrap_or(0)
    }

    fn claim(&mut self, res: Resource, edge: usize, colors: &ColorSet) {
        self.users
            .entry(res)
            .or_default()
            .insert(edge, colors.clone());
    }

    fn release(&mut self, edge: usize) {
        self.users.retain(|_, m| {
            m.remove(&edge);
            !m.is_empty()
        });
    }

    /// Resources claimed by two or more color-intersecting edges, plus the
    /// edges involved.
    fn overused(&self) -> (BTreeSet<Resource>, BTreeSet<usize>) {
        let mut resources = BTreeSet::new();
        let mut edges = BTreeSet::new();
        for (res, users) in &self.users {
            let list: Vec<(&usize, &ColorSet)> = users.iter().collect();
            for i in 0..list.len() {
                for j in i + 1..list.len() {
                    if !list[i].1.is_disjoint(list[j].1) {
                        resources.insert(*res);
                        edges.insert(*list[i].0);
                        edges.insert(*list[j].0);
                    }
                }
            }
        }
        (resources, edges)
    }
}

struct Net {
    edge_id: usize,
    driver: RouterId,
    loads: Vec<RouterId>,
    colors: ColorSet,
}

/// Routes every external edge as a tree over NoC links. Fails with the list
/// of blocked edges if negotiation does not converge within `max_rip_up`
/// iterations.
pub fn route(
    packed: &PackedGraph,
    noc: &MeshNoc,
    placement: &Placement,
    max_rip_up: usize,
) -> Result<BTreeMap<usize, RoutedEdge>, PnrError> {
    let mut nets = Vec::new();
    for (ext_id, e) in packed.external() {
        let look = |v: &UnionVertex| {
            placement
                .router_of(v)
                .ok_or_else(|| PnrError::UnplacedEndpoint {
                    edge: ext_id,
                    vertex: v.to_string(),
                })
        };
        let driver = look(&e.driver)?;
        let loads = e.loads.iter().map(look).collect::<Result<Vec<_>, _>>()?;
        nets.push(Net {
            edge_id: ext_id,
            driver,
            loads,
            colors: e.colors.clone(),
        });
    }

    // Per color class, descending fanout then canonical order.
    let mut order: Vec<usize> = Vec::new();
    let mut queued: BTreeSet<usize> = BTreeSet::new();
    for app in packed.union.app_ids() {
        let mut class: Vec<&Net> = nets
            .iter()
            .filter(|n| n.colors.contains(&app) && !queued.contains(&n.edge_id))
            .collect();
        class.sort_by_key(|n| (Reverse(n.loads.len()), n.edge_id));
        for n in class {
            order.push(n.edge_id);
            queued.insert(n.edge_id);
        }
    }
    // edges with colors outside 1..=N cannot occur; keep any stragglers stable
    for n in &nets {
        if queued.insert(n.edge_id) {
            order.push(n.edge_id);
        }
    }
    let net_by_id: BTreeMap<usize, &Net> = nets.iter().map(|n| (n.edge_id, n)).collect();

    let mut history: BTreeMap<Resource, u64> = BTreeMap::new();
    let mut claims = Claims::default();
    let mut trees: BTreeMap<usize, BTreeSet<Link>> = BTreeMap::new();
    let mut pending: Vec<usize> = order.clone();

    for iteration in 0..=max_rip_up {
        for &edge_id in &pending {
            let net = net_by_id[&edge_id];
            let links = route_net(noc, net, &history, &claims, iteration)?;
            for l in &links {
                claims.claim(l.resource(), edge_id, &net.colors);
            }
            trees.insert(edge_id, links);
        }
        let (over_res, over_edges) = claims.overused();
        if over_edges.is_empty() {
            let mut out = BTreeMap::new();
            for (edge_id, links) in trees {
                out.insert(
                    edge_id,
                    RoutedEdge {
                        links,
                        colors: net_by_id[&edge_id].colors.clone(),
                    },
                );
            }
            return Ok(out);
        }
        if iteration == max_rip_up {
            return Err(PnrError::Unroutable {
                iterations: iteration,
                blocked: over_edges.into_iter().collect(),
            });
        }
        for res in over_res {
            *history.entry(res).or_insert(0) += 1;
        }
        // rip up conflicting nets, keep the rest
        pending = order
            .iter()
            .copied()
            .filter(|id| over_edges.contains(id))
            .collect();
        for &id in &pending {
            claims.release(id);
            trees.remove(&id);
        }
    }
    unreachable!("loop returns or errors at the iteration cap");
}

/// Grows one net's tree: Dijkstra from the driver local port (and the
/// partial tree) to each load's local port in turn.
fn route_net(
    noc: &MeshNoc,
    net: &Net,
    history: &BTreeMap<Resource, u64>,
    claims: &Claims,
    iteration: usize,
) -> Result<BTreeSet<Link>, PnrError> {
    let root = Pos {
        router: net.driver,
        port: Port::Local,
        entering: true,
    };
    let mut tree_pos: BTreeSet<Pos> = BTreeSet::from([root]);
    let mut tree_links: BTreeSet<Link> = BTreeSet::new();

    let link_cost = |link: &Link| -> u64 {
        let res = link.resource();
        let conflicts = claims.conflicts_for(&res, net.edge_id, &net.colors) as u64;
        1 + history.get(&res).copied().unwrap_or(0) + conflicts * (2 + 2 * iteration as u64)
    };

    let mut loads = net.loads.clone();
    loads.sort();
    for load in loads {
        let target = Pos {
            router: load,
            port: Port::Local,
            entering: false,
        };
        if tree_pos.contains(&target) {
            continue;
        }
        let mut dist: BTreeMap<Pos, u64> = tree_pos.iter().map(|&p| (p, 0)).collect();
        let mut parent: BTreeMap<Pos, (Pos, Link)> = BTreeMap::new();
        let mut heap: BinaryHeap<Reverse<(u64, Pos)>> =
            tree_pos.iter().map(|&p| Reverse((0, p))).collect();
        let mut found = false;
        while let Some(Reverse((d, pos))) = heap.pop() {
            if d > dist.get(&pos).copied().unwrap_or(u64::MAX) {
                continue;
            }
            if pos == target {
                found = true;
                break;
            }
            for (link, next) in successors(noc, pos) {
                let nd = d + link_cost(&link);
                if nd < dist.get(&next).copied().unwrap_or(u64::MAX) {
                    dist.insert(next, nd);
                    parent.insert(next, (pos, link));
                    heap.push(Reverse((nd, next)));
                }
            }
        }
        if !found {
            // a mesh is connected, so this can only mean a degenerate search
            return Err(PnrError::Unroutable {
                iterations: iteration,
                blocked: vec![net.edge_id],
            });
        }
        // backtrack into the tree
        let mut cur = target;
        while !tree_pos.contains(&cur) {
            let (prev, link) = parent
                .remove(&cur)
                .expect("path leads back to a tree position");
            tree_links.insert(link);
            tree_pos.insert(cur);
            cur = prev;
        }
    }
    Ok(tree_links)
}
