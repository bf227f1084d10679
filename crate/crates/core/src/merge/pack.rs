//! Color-combination packing (steps 4-6 of the merging algorithm).
//!
//! For each color combination in turn: while some edge of exactly that
//! combination has an unmarked endpoint, start a flood there — mark the
//! unmarked endpoints with the current mark, then keep expanding across
//! same-combination edges incident to newly marked nodes. Marked nodes are
//! never re-marked and floods never expand through previously marked nodes.
//! Nodes left untouched (no incident edges) each get a fresh mark.

use std::collections::BTreeMap;
use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{ColorSet, UnionGraph, UnionNodeId};

/// The order in which color combinations are flooded: lexicographic for
/// `seed = None`, a seeded shuffle otherwise. Every distinct color set
/// appearing on an edge occurs exactly once.
pub fn packing_order(union: &UnionGraph, seed: Option<u64>) -> Vec<ColorSet> {
    let mut combos: Vec<ColorSet> = union
        .edges
        .iter()
        .map(|e| e.colors.clone())
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
    if let Some(s) = seed {
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        combos.shuffle(&mut rng);
    }
    combos
}

/// Packing with an explicit combination order; exposed so an oracle can
/// replay the exact same choices.
pub fn pack_in_order(union: &UnionGraph, order: &[ColorSet]) -> BTreeMap<UnionNodeId, u32> {
    let mut marks: BTreeMap<UnionNodeId, u32> = BTreeMap::new();
    let mut q: u32 = 0;

    // incident edge indices per node, in canonical edge order
    let mut incident: BTreeMap<&UnionNodeId, Vec<usize>> = BTreeMap::new();
    for (i, e) in union.edges.iter().enumerate() {
        for n in e.endpoint_nodes() {
            incident.entry(n).or_default().push(i);
        }
    }

    for combo in order {
        loop {
            let start = union.edges.iter().position(|e| {
                e.colors == *combo && e.endpoint_nodes().iter().any(|n| !marks.contains_key(*n))
            });
            let Some(start) = start else { break };

            let mut worklist: VecDeque<UnionNodeId> = VecDeque::new();
            for n in union.edges[start].endpoint_nodes() {
                if !marks.contains_key(n) {
                    marks.insert(n.clone(), q);
                    worklist.push_back(n.clone());
                }
            }
            while let Some(n) = worklist.pop_front() {
                for &ei in incident.get(&n).into_iter().flatten() {
                    let e = &union.edges[ei];
                    if e.colors != *combo {
                        continue;
                    }
                    for m in e.endpoint_nodes() {
                        if !marks.contains_key(m) {
                            marks.insert(m.clone(), q);
                            worklist.push_back(m.clone());
                        }
                    }
                }
            }
            q += 1;
        }
    }

    // Step 6 fallback: nodes with no incident edges each form their own pack.
    for n in union.nodes.keys() {
        if !marks.contains_key(n) {
            marks.insert(n.clone(), q);
            q += 1;
        }
    }
    marks
}

/// Assigns a packing mark to every union node. With `seed = None` the
/// combination order and edge scan order are deterministic; with a seed the
/// combination choice is randomized but the result is still a valid packing.
pub fn pack(union: &UnionGraph, seed: Option<u64>) -> BTreeMap<UnionNodeId, u32> {
    pack_in_order(union, &packing_order(union, seed))
}
