//! Union graph file format and DOT export.
//!
//! ```text
//! union
//! app 1 day
//! node GAUSS3#1 in=1 out=1
//! edge LUMA#1.out0 -> GAUSS3#1.in0 colors={1,2}
//! pack 0: GAUSS3#1 CANNY#1
//! map 1:g1 -> GAUSS3#1
//! ```
//!
//! Edges are written in canonical order; external edges take their ids
//! (`e0`, `e1`, ...) from their position among external edges in that order.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::{
    divide, AppId, ColorSet, MergeError, PackedGraph, UnionArity, UnionEdge, UnionGraph,
    UnionNodeId, UnionVertex,
};
use crate::graph::{is_identifier, PortDir, TypeLabel};

pub fn write_union(packed: &PackedGraph) -> String {
    let u = &packed.union;
    let mut out = String::new();
    writeln!(out, "union").unwrap();
    for (i, name) in u.apps.iter().enumerate() {
        writeln!(out, "app {} {}", i + 1, name).unwrap();
    }
    for (node, ar) in &u.nodes {
        writeln!(out, "node {} in={} out={}", node, ar.in_arity, ar.out_arity).unwrap();
    }
    for e in &u.edges {
        let loads: Vec<String> = e.loads.iter().map(|l| l.to_string()).collect();
        writeln!(
            out,
            "edge {} -> {} colors={}",
            e.driver,
            loads.join(" "),
            format_colors(&e.colors)
        )
        .unwrap();
    }
    for p in &packed.packs {
        let nodes: Vec<String> = p.nodes.iter().map(|n| n.to_string()).collect();
        writeln!(out, "pack {}: {}", p.mark, nodes.join(" ")).unwrap();
    }
    for ((app, id), node) in &u.sigma_n {
        writeln!(out, "map {}:{} -> {}", app, id, node).unwrap();
    }
    out
}

pub(crate) fn format_colors(colors: &ColorSet) -> String {
    let items: Vec<String> = colors.iter().map(|c| c.to_string()).collect();
    format!("{{{}}}", items.join(","))
}

pub(crate) fn parse_colors(text: &str) -> Option<ColorSet> {
    let inner = text.strip_prefix('{')?.strip_suffix('}')?;
    let mut set = ColorSet::new();
    if inner.is_empty() {
        return Some(set);
    }
    for part in inner.split(',') {
        set.insert(AppId(part.parse().ok()?));
    }
    Some(set)
}

pub(crate) fn parse_union_node(text: &str) -> Option<UnionNodeId> {
    let (ty, copy) = text.rsplit_once('#')?;
    Some(UnionNodeId {
        ty: TypeLabel::new(ty).ok()?,
        copy: copy.parse().ok()?,
    })
}

pub(crate) fn parse_union_vertex(text: &str) -> Option<UnionVertex> {
    let (node, port_part) = text.rsplit_once('.')?;
    let node = parse_union_node(node)?;
    let (dir, idx) = if let Some(i) = port_part.strip_prefix("in") {
        (PortDir::In, i)
    } else {
        (PortDir::Out, port_part.strip_prefix("out")?)
    };
    Some(UnionVertex {
        node,
        dir,
        port: idx.parse().ok()?,
    })
}

/// Reads a union file back into a [`PackedGraph`]. sigma_E is not serialized
/// (it refers to the source application graphs), so the reconstructed value
/// has an empty sigma_E; everything the downstream flow needs is present.
pub fn read_union(text: &str) -> Result<PackedGraph, MergeError> {
    // '#' appears inside node names (TYPE#m), so it only opens a comment when
    // at line start or preceded by whitespace.
    let mut lines = text.lines().enumerate().filter_map(|(i, raw)| {
        let trimmed = strip_comment(raw).trim();
        if trimmed.is_empty() {
            None
        } else {
            Some((i + 1, trimmed.to_string()))
        }
    });

    let err = |line: usize, msg: &str| MergeError::Format(format!("line {line}: {msg}"));

    match lines.next() {
        Some((_, l)) if l == "union" => {}
        other => {
            return Err(MergeError::Format(format!(
                "expected 'union' header, found {other:?}"
            )))
        }
    }

    let mut apps: Vec<String> = Vec::new();
    let mut nodes: BTreeMap<UnionNodeId, UnionArity> = BTreeMap::new();
    let mut edges: Vec<UnionEdge> = Vec::new();
    let mut marks: BTreeMap<UnionNodeId, u32> = BTreeMap::new();
    let mut sigma_n: BTreeMap<(AppId, String), UnionNodeId> = BTreeMap::new();

    for (ln, line) in lines {
        let mut tok = line.split_whitespace();
        match tok.next() {
            Some("app") => {
                let idx: usize = tok
                    .next()
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| err(ln, "bad app index"))?;
                let name = tok.next().ok_or_else(|| err(ln, "missing app name"))?;
                if idx != apps.len() + 1 {
                    return Err(err(ln, "app indices must be dense and in order"));
                }
                if !is_identifier(name) {
                    return Err(err(ln, "bad app name"));
                }
                apps.push(name.to_string());
            }
            Some("node") => {
                let id = tok
                    .next()
                    .and_then(parse_union_node)
                    .ok_or_else(|| err(ln, "bad union node id"))?;
                let in_arity = parse_keyed(tok.next(), "in").ok_or_else(|| err(ln, "bad in="))?;
                let out_arity =
                    parse_keyed(tok.next(), "out").ok_or_else(|| err(ln, "bad out="))?;
                nodes.insert(
                    id,
                    UnionArity {
                        in_arity,
                        out_arity,
                    },
                );
            }
            Some("edge") => {
                let driver = tok
                    .next()
                    .and_then(parse_union_vertex)
                    .ok_or_else(|| err(ln, "bad driver vertex"))?;
                if tok.next() != Some("->") {
                    return Err(err(ln, "expected ->"));
                }
                let mut loads = Vec::new();
                let mut colors = None;
                for t in tok.by_ref() {
                    if let Some(c) = t.strip_prefix("colors=") {
                        colors = parse_colors(c);
                        break;
                    }
                    loads.push(parse_union_vertex(t).ok_or_else(|| err(ln, "bad load vertex"))?);
                }
                let colors = colors.ok_or_else(|| err(ln, "missing colors={..}"))?;
                if loads.is_empty() {
                    return Err(err(ln, "edge needs at least one load"));
                }
                edges.push(UnionEdge {
                    driver,
                    loads,
                    colors,
                });
            }
            Some("pack") => {
                let mark_txt = tok.next().ok_or_else(|| err(ln, "missing pack mark"))?;
                let mark: u32 = mark_txt
                    .strip_suffix(':')
                    .unwrap_or(mark_txt)
                    .parse()
                    .map_err(|_| err(ln, "bad pack mark"))?;
                for t in tok {
                    let node = parse_union_node(t).ok_or_else(|| err(ln, "bad pack node"))?;
                    marks.insert(node, mark);
                }
            }
            Some("map") => {
                let lhs = tok.next().ok_or_else(|| err(ln, "missing map source"))?;
                let (app, node_id) = lhs
                    .split_once(':')
                    .ok_or_else(|| err(ln, "expected <app>:<node>"))?;
                let app: u32 = app.parse().map_err(|_| err(ln, "bad app index"))?;
                if tok.next() != Some("->") {
                    return Err(err(ln, "expected ->"));
                }
                let target = tok
                    .next()
                    .and_then(parse_union_node)
                    .ok_or_else(|| err(ln, "bad map target"))?;
                sigma_n.insert((AppId(app), node_id.to_string()), target);
            }
            Some(other) => return Err(err(ln, &format!("unknown directive {other:?}"))),
            None => {}
        }
    }

    if marks.len() != nodes.len() || !nodes.keys().all(|n| marks.contains_key(n)) {
        return Err(MergeError::Format(
            "pack lines must cover every node exactly once".to_string(),
        ));
    }
    edges.sort();
    let union = UnionGraph {
        apps,
        nodes,
        edges,
        sigma_n,
        sigma_e: BTreeMap::new(),
    };
    Ok(divide(union, marks))
}

fn strip_comment(raw: &str) -> &str {
    let bytes = raw.as_bytes();
    for (i, &b) in bytes.iter().enumerate() {
        if b == b'#' && (i == 0 || bytes[i - 1].is_ascii_whitespace()) {
            return &raw[..i];
        }
    }
    raw
}

fn parse_keyed(tok: Option<&str>, key: &str) -> Option<usize> {
    tok?.strip_prefix(key)?.strip_prefix('=')?.parse().ok()
}

/// DOT export of the union graph: one cluster per pack, edge labels carry
/// the color set.
pub fn write_union_dot(packed: &PackedGraph) -> String {
    let mut out = String::new();
    writeln!(out, "digraph union {{").unwrap();
    writeln!(out, "  rankdir=LR;").unwrap();
    for p in &packed.packs {
        writeln!(out, "  subgraph cluster_{} {{", p.mark).unwrap();
        writeln!(out, "    label=\"pack {}\";", p.mark).unwrap();
        for n in &p.nodes {
            writeln!(out, "    \"{}\";", n).unwrap();
        }
        writeln!(out, "  }}").unwrap();
    }
    for e in &packed.union.edges {
        for l in &e.loads {
            writeln!(
                out,
                "  \"{}\" -> \"{}\" [label=\"{}\"];",
                e.driver.node,
                l.node,
                format_colors(&e.colors)
            )
            .unwrap();
        }
    }
    writeln!(out, "}}").unwrap();
    out
}
