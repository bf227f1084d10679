//! Placement: greedy constructive seeding in BFS order of the union graph,
//! refined by simulated-annealing pairwise swaps.
//!
//! Cost = sum over external edges of half-perimeter wirelength counted once
//! per color, plus the per-pack dispersion of its placed ports (alpha = 1).
//! Schedule: T starts at 1.0, multiplies by 0.95 after 100 accepted or 1000
//! attempted moves, and stops below 0.01.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::merge::{PackedGraph, UnionNodeId, UnionVertex};
use crate::noc::{MeshNoc, RouterId};

use super::{Placement, PnrError};

const T_START: f64 = 1.0;
const T_FACTOR: f64 = 0.95;
const T_STOP: f64 = 0.01;
const MOVES_PER_TEMP: usize = 1000;
const ACCEPTS_PER_TEMP: usize = 100;

/// Everything that needs a router local port: endpoints of external edges
/// plus boundary input/output vertices of every application. Sorted, deduped.
pub fn placeable_vertices(packed: &PackedGraph) -> Vec<UnionVertex> {
    let mut set: BTreeSet<UnionVertex> = BTreeSet::new();
    for (_, e) in packed.external() {
        set.insert(e.driver.clone());
        set.extend(e.loads.iter().cloned());
    }
    for app in packed.union.app_ids() {
        set.extend(packed.union.boundary_inputs(app));
        set.extend(packed.union.boundary_outputs(app));
    }
    set.into_iter().collect()
}

/// One additive term of the placement cost: a vertex group and its weight.
struct CostTerm {
    vertices: Vec<UnionVertex>,
    weight: u64,
}

struct CostModel {
    terms: Vec<CostTerm>,
    /// vertex -> indices of terms that mention it
    touching: BTreeMap<UnionVertex, Vec<usize>>,
}

impl CostModel {
    fn build(packed: &PackedGraph, domain: &[UnionVertex]) -> CostModel {
        let mut terms = Vec::new();
        for (_, e) in packed.external() {
            let mut vertices = vec![e.driver.clone()];
            vertices.extend(e.loads.iter().cloned());
            terms.push(CostTerm {
                vertices,
                weight: e.colors.len() as u64,
            });
        }
        // pack dispersion: all placed ports belonging to one pack's nodes
        let mut by_mark: BTreeMap<u32, Vec<UnionVertex>> = BTreeMap::new();
        for v in domain {
            by_mark
                .entry(packed.mark_of(&v.node))
                .or_default()
                .push(v.clone());
        }
        for (_, vertices) in by_mark {
            if vertices.len() > 1 {
                terms.push(CostTerm {
                    vertices,
                    weight: 1,
                });
            }
        }

        let mut touching: BTreeMap<UnionVertex, Vec<usize>> = BTreeMap::new();
        for (i, t) in terms.iter().enumerate() {
            for v in &t.vertices {
                touching.entry(v.clone()).or_default().push(i);
            }
        }
        CostModel { terms, touching }
    }

    /// Half-perimeter bounding box of a term over currently placed vertices.
    fn term_cost(&self, idx: usize, placed: &BTreeMap<UnionVertex, RouterId>) -> u64 {
        let term = &self.terms[idx];
        let mut rows: Option<(usize, usize)> = None;
        let mut cols: Option<(usize, usize)> = None;
        for v in &term.vertices {
            if let Some(r) = placed.get(v) {
                rows = Some(rows.map_or((r.row, r.row), |(lo, hi)| (lo.min(r.row), hi.max(r.row))));
                cols = Some(cols.map_or((r.col, r.col), |(lo, hi)| (lo.min(r.col), hi.max(r.col))));
            }
        }
        match (rows, cols) {
            (Some((rlo, rhi)), Some((clo, chi))) => {
                term.weight * ((rhi - rlo) + (chi - clo)) as u64
            }
            _ => 0,
        }
    }

    fn terms_of(&self, v: &UnionVertex) -> &[usize] {
        self.touching.get(v).map(|t| t.as_slice()).unwrap_or(&[])
    }

    fn total_cost(&self, placed: &BTreeMap<UnionVertex, RouterId>) -> u64 {
        (0..self.terms.len())
            .map(|i| self.term_cost(i, placed))
            .sum()
    }
}

/// Vertices in BFS order over the union graph (any-color adjacency), so
/// connected ports get placed near each other by the greedy pass.
fn bfs_vertex_order(packed: &PackedGraph, domain: &[UnionVertex]) -> Vec<UnionVertex> {
    let union = &packed.union;
    let mut adj: BTreeMap<&UnionNodeId, BTreeSet<&UnionNodeId>> = BTreeMap::new();
    for e in &union.edges {
        let nodes: Vec<&UnionNodeId> = e.endpoint_nodes().into_iter().collect();
        for a in &nodes {
            for b in &nodes {
                if a != b {
                    adj.entry(a).or_default().insert(b);
                }
            }
        }
    }

    let by_node: BTreeMap<&UnionNodeId, Vec<&UnionVertex>> = {
        let mut m: BTreeMap<&UnionNodeId, Vec<&UnionVertex>> = BTreeMap::new();
        for v in domain {
            m.entry(&v.node).or_default().push(v);
        }
        m
    };

    let mut order = Vec::new();
    let mut visited: BTreeSet<&UnionNodeId> = BTreeSet::new();
    for start in union.nodes.keys() {
        if visited.contains(start) {
            continue;
        }
        let mut queue = VecDeque::from([start]);
        visited.insert(start);
        while let Some(n) = queue.pop_front() {
            if let Some(vs) = by_node.get(n) {
                order.extend(vs.iter().map(|&v| v.clone()));
            }
            for &m in adj.get(n).into_iter().flatten() {
                if visited.insert(m) {
                    queue.push_back(m);
                }
            }
        }
    }
    order
}

/// Places every NoC-facing vertex on a distinct router local port,
/// heuristically minimizing colored wirelength plus pack dispersion.
/// Deterministic for a fixed seed.
pub fn place(packed: &PackedGraph, noc: &MeshNoc, seed: u64) -> Result<Placement, PnrError> {
    let domain = placeable_vertices(packed);
    if domain.len() > noc.router_count() {
        return Err(PnrError::Capacity {
            needed: domain.len(),
            available: noc.router_count(),
        });
    }
    if domain.is_empty() {
        // everything is hardwired inside one pack; nothing faces the NoC
        return Ok(Placement::default());
    }

    let model = CostModel::build(packed, &domain);
    let routers: Vec<RouterId> = noc.routers().collect();
    let mut placed: BTreeMap<UnionVertex, RouterId> = BTreeMap::new();

    // Greedy constructive pass.
    let mut free: BTreeSet<RouterId> = routers.iter().copied().collect();
    for v in bfs_vertex_order(packed, &domain) {
        let mut best: Option<(u64, RouterId)> = None;
        for &r in &free {
            placed.insert(v.clone(), r);
            let cost: u64 = model
                .terms_of(&v)
                .iter()
                .map(|&t| model.term_cost(t, &placed))
                .sum();
            placed.remove(&v);
            // row-major tie break: routers iterate in order, strict < keeps the first
            if best.is_none_or(|(c, _)| cost < c) {
                best = Some((cost, r));
            }
        }
        let (_, r) = best.expect("capacity checked");
        free.remove(&r);
        placed.insert(v, r);
    }

    // Simulated-annealing refinement over vertex<->router swaps.
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut occupant: BTreeMap<RouterId, UnionVertex> =
        placed.iter().map(|(v, &r)| (r, v.clone())).collect();
    let mut cost = model.total_cost(&placed) as i64;
    let mut temperature = T_START;

    while temperature >= T_STOP {
        let mut accepted = 0usize;
        let mut attempted = 0usize;
        while accepted < ACCEPTS_PER_TEMP && attempted < MOVES_PER_TEMP {
            attempted += 1;
            let v = domain[rng.random_range(0..domain.len())].clone();
            let target = routers[rng.random_range(0..routers.len())];
            let from = placed[&v];
            if target == from {
                continue;
            }
            let other = occupant.get(&target).cloned();

            let mut affected: BTreeSet<usize> = model.terms_of(&v).iter().copied().collect();
            if let Some(o) = &other {
                affected.extend(model.terms_of(o));
            }
            let before: u64 = affected.iter().map(|&t| model.term_cost(t, &placed)).sum();

            placed.insert(v.clone(), target);
            if let Some(o) = &other {
                placed.insert(o.clone(), from);
            }
            let after: u64 = affected.iter().map(|&t| model.term_cost(t, &placed)).sum();

            let delta = after as i64 - before as i64;
            let accept = delta <= 0 || rng.random::<f64>() < (-(delta as f64) / temperature).exp();
            if accept {
                occupant.remove(&from);
                occupant.insert(target, v.clone());
                if let Some(o) = &other {
                    occupant.insert(from, o.clone());
                }
                cost += delta;
                accepted += 1;
            } else {
                placed.insert(v, from);
                if let Some(o) = other {
                    placed.insert(o, target);
                }
            }
        }
        temperature *= T_FACTOR;
    }

    debug_assert_eq!(cost, model.total_cost(&placed) as i64);
    Ok(Placement {
        assignments: placed,
    })
}
