//! PnR result file format.
//!
//! ```text
//! pnr mesh=2x5 seed=0
//! place p0.GAUSS3#1.out0 -> (0,1)
//! route e0 colors={2}: X(0,1)L>E I(0,1)E=(0,2)W X(0,2)W>L
//! cost app=1 links=3 wirelength=1
//! ```
//!
//! Intra links read `X(r,c)IN>OUT`, inter links `I(r1,c1)P1=(r2,c2)P2`.
//! Cost lines are informational and recomputed on write.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::merge::format::{format_colors, parse_colors, parse_union_vertex};
use crate::merge::PackedGraph;
use crate::noc::{parse_router, Link, MeshNoc, Port, RouterId};

use super::{Placement, PnrError, PnrResult, RoutedEdge};

pub fn write_pnr(result: &PnrResult, packed: &PackedGraph) -> String {
    let mut out = String::new();
    writeln!(out, "pnr mesh={} seed={}", result.mesh, result.seed).unwrap();
    for (v, r) in &result.placement.assignments {
        writeln!(out, "place p{}.{} -> {}", packed.mark_of(&v.node), v, r).unwrap();
    }
    for (id, routed) in &result.routes {
        let links: Vec<String> = routed.links.iter().map(|l| l.to_string()).collect();
        writeln!(
            out,
            "route e{} colors={}: {}",
            id,
            format_colors(&routed.colors),
            links.join(" ")
        )
        .unwrap();
    }
    for (app, cost) in result.cost_summary() {
        writeln!(
            out,
            "cost app={} links={} wirelength={}",
            app, cost.links, cost.wirelength
        )
        .unwrap();
    }
    out
}

fn parse_router_port(text: &str) -> Option<(RouterId, Port)> {
    let close = text.find(')')?;
    let router = parse_router(&text[..=close])?;
    let mut rest = text[close + 1..].chars();
    match (rest.next().and_then(Port::from_char), rest.next()) {
        (Some(p), None) => Some((router, p)),
        _ => None,
    }
}

pub(crate) fn parse_link(text: &str) -> Option<Link> {
    if let Some(body) = text.strip_prefix('X') {
        // X(r,c)IN>OUT
        let close = body.find(')')?;
        let router = parse_router(&body[..=close])?;
        let mut ports = body[close + 1..].chars();
        let input = ports.next().and_then(Port::from_char)?;
        if ports.next() != Some('>') {
            return None;
        }
        let output = ports.next().and_then(Port::from_char)?;
        if ports.next().is_some() || input == output {
            return None;
        }
        Some(Link::Intra {
            router,
            input,
            output,
        })
    } else if let Some(body) = text.strip_prefix('I') {
        // I(r1,c1)P1=(r2,c2)P2
        let (lhs, rhs) = body.split_once('=')?;
        let (from, from_port) = parse_router_port(lhs)?;
        let (to, to_port) = parse_router_port(rhs)?;
        Some(Link::Inter {
            from,
            from_port,
            to,
            to_port,
        })
    } else {
        None
    }
}

pub fn read_pnr(text: &str) -> Result<PnrResult, PnrError> {
    let err = |line: usize, msg: &str| PnrError::Format(format!("line {line}: {msg}"));
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());

    let (ln, header) = lines.next().ok_or_else(|| err(1, "empty pnr file"))?;
    let mut htok = header.split_whitespace();
    if htok.next() != Some("pnr") {
        return Err(err(ln, "expected 'pnr' header"));
    }
    let mesh = htok
        .next()
        .and_then(|t| t.strip_prefix("mesh="))
        .ok_or_else(|| err(ln, "expected mesh=<RxC>"))?;
    let mesh = MeshNoc::parse_spec(mesh).map_err(|e| err(ln, &e.to_string()))?;
    let seed: u64 = htok
        .next()
        .and_then(|t| t.strip_prefix("seed="))
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| err(ln, "expected seed=<n>"))?;

    let mut placement = Placement::default();
    let mut routes: BTreeMap<usize, RoutedEdge> = BTreeMap::new();

    for (ln, line) in lines {
        let mut tok = line.split_whitespace();
        match tok.next() {
            Some("place") => {
                let spec = tok.next().ok_or_else(|| err(ln, "missing placement"))?;
                // strip the informational pack prefix p<q>.
                let vertex_txt = spec
                    .strip_prefix('p')
                    .and_then(|s| s.split_once('.'))
                    .map(|(_, v)| v)
                    .ok_or_else(|| err(ln, "expected p<q>.<vertex>"))?;
                let vertex = parse_union_vertex(vertex_txt).ok_or_else(|| err(ln, "bad vertex"))?;
                if tok.next() != Some("->") {
                    return Err(err(ln, "expected ->"));
                }
                let router = tok
                    .next()
                    .and_then(parse_router)
                    .ok_or_else(|| err(ln, "bad router"))?;
                placement.assignments.insert(vertex, router);
            }
            Some("route") => {
                let id_txt = tok.next().ok_or_else(|| err(ln, "missing edge id"))?;
                let id: usize = id_txt
                    .strip_prefix('e')
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| err(ln, "expected e<k>"))?;
                let colors_txt = tok
                    .next()
                    .and_then(|t| t.strip_prefix("colors="))
                    .ok_or_else(|| err(ln, "expected colors={..}"))?;
                let colors = parse_colors(colors_txt.trim_end_matches(':'))
                    .ok_or_else(|| err(ln, "bad colors"))?;
                let mut links = std::collections::BTreeSet::new();
                for t in tok {
                    links.insert(parse_link(t).ok_or_else(|| err(ln, "bad link"))?);
                }
                routes.insert(id, RoutedEdge { links, colors });
            }
            Some("cost") => {} // informational, recomputed on write
            Some(other) => return Err(err(ln, &format!("unknown directive {other:?}"))),
            None => {}
        }
    }

    Ok(PnrResult {
        mesh,
        seed,
        placement,
        routes,
    })
}
