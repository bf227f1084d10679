//! Line-oriented application graph reader and writer.
//!
//! Format (UTF-8, `#` starts a comment, tokens whitespace-separated):
//!
//! ```text
//! app day
//! node gw1 type=GRAYWORLD in=1 out=1
//! node lm1 type=LUMA in=1 out=1
//! edge gw1.out0 -> lm1.in0
//! ```
//!
//! Edge lines take one driver and one or more loads:
//! `edge x.out0 -> y.in0 z.in1`. Unknown directives are errors.

use std::fmt::Write as _;

use thiserror::Error;

use super::{
    is_identifier, validate_acyclic, DataflowGraph, Edge, GraphError, Node, PortDir, TypeLabel,
    Vertex,
};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}, col {col}: {msg}")]
    Syntax {
        line: usize,
        col: usize,
        msg: String,
    },
    #[error("line {line}: {source}")]
    Graph { line: usize, source: GraphError },
    #[error("{0}")]
    Validation(GraphError),
}

struct Cursor<'a> {
    line_no: usize,
    line: &'a str,
    rest: &'a str,
}

impl<'a> Cursor<'a> {
    fn new(line_no: usize, line: &'a str) -> Self {
        Cursor {
            line_no,
            line,
            rest: line,
        }
    }

    fn col(&self) -> usize {
        self.line.len() - self.rest.len() + 1
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            line: self.line_no,
            col: self.col(),
            msg: msg.into(),
        })
    }

    fn next_token(&mut self) -> Option<&'a str> {
        self.rest = self.rest.trim_start();
        if self.rest.is_empty() {
            return None;
        }
        let end = self
            .rest
            .find(|c: char| c.is_ascii_whitespace())
            .unwrap_or(self.rest.len());
        let (tok, rest) = self.rest.split_at(end);
        self.rest = rest;
        Some(tok)
    }

    fn expect_token(&mut self, what: &str) -> Result<&'a str, ParseError> {
        self.rest = self.rest.trim_start();
        match self.next_token() {
            Some(t) => Ok(t),
            None => self.err(format!("expected {what}")),
        }
    }

    fn expect_end(&mut self) -> Result<(), ParseError> {
        self.rest = self.rest.trim_start();
        if self.rest.is_empty() {
            Ok(())
        } else {
            self.err("unexpected trailing tokens")
        }
    }
}

fn parse_keyed<'a>(cur: &mut Cursor<'a>, key: &str) -> Result<&'a str, ParseError> {
    let tok = cur.expect_token(&format!("{key}=<value>"))?;
    match tok.strip_prefix(key).and_then(|t| t.strip_prefix('=')) {
        Some(v) if !v.is_empty() => Ok(v),
        _ => cur.err(format!("expected {key}=<value>, found {tok:?}")),
    }
}

fn parse_usize(cur: &Cursor<'_>, text: &str) -> Result<usize, ParseError> {
    text.parse().map_err(|_| ParseError::Syntax {
        line: cur.line_no,
        col: cur.col(),
        msg: format!("expected unsigned integer, found {text:?}"),
    })
}

/// Parses a `<node>.<in|out><port>` reference.
fn parse_vertex(cur: &Cursor<'_>, text: &str) -> Result<Vertex, ParseError> {
    let bad = || ParseError::Syntax {
        line: cur.line_no,
        col: cur.col(),
        msg: format!("expected <node>.in<k> or <node>.out<k>, found {text:?}"),
    };
    let (node, port_part) = text.rsplit_once('.').ok_or_else(bad)?;
    if !is_identifier(node) {
        return Err(bad());
    }
    let (dir, idx) = if let Some(i) = port_part.strip_prefix("in") {
        (PortDir::In, i)
    } else if let Some(i) = port_part.strip_prefix("out") {
        (PortDir::Out, i)
    } else {
        return Err(bad());
    };
    if idx.is_empty() || !idx.bytes().all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    Ok(Vertex {
        node: node.to_string(),
        dir,
        port: idx.parse().map_err(|_| bad())?,
    })
}

/// Parses and fully validates one application graph document. The returned
/// graph is structurally valid and acyclic.
pub fn parse_app_graph(text: &str) -> Result<DataflowGraph, ParseError> {
    let mut name: Option<String> = None;
    let mut nodes: Vec<Node> = Vec::new();
    let mut edges: Vec<(usize, Edge)> = Vec::new();

    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw_line.find('#') {
            Some(i) => &raw_line[..i],
            None => raw_line,
        };
        if line.trim().is_empty() {
            continue;
        }
        let mut cur = Cursor::new(line_no, line);
        let directive = cur.expect_token("directive")?;
        match directive {
            "app" => {
                let ident = cur.expect_token("application name")?;
                if !is_identifier(ident) {
                    return cur.err(format!("invalid application name {ident:?}"));
                }
                if name.is_some() {
                    return cur.err("duplicate app line");
                }
                cur.expect_end()?;
                name = Some(ident.to_string());
            }
            "node" => {
                if name.is_none() {
                    return cur.err("app line must come first");
                }
                let id = cur.expect_token("node id")?;
                if !is_identifier(id) {
                    return cur.err(format!("invalid node id {id:?}"));
                }
                let ty = parse_keyed(&mut cur, "type")?;
                let ty = TypeLabel::new(ty).map_err(|e| ParseError::Graph {
                    line: line_no,
                    source: e,
                })?;
                let in_txt = parse_keyed(&mut cur, "in")?;
                let in_arity = parse_usize(&cur, in_txt)?;
                let out_txt = parse_keyed(&mut cur, "out")?;
                let out_arity = parse_usize(&cur, out_txt)?;
                cur.expect_end()?;
                nodes.push(Node {
                    id: id.to_string(),
                    ty,
                    in_arity,
                    out_arity,
                });
            }
            "edge" => {
                if name.is_none() {
                    return cur.err("app line must come first");
                }
                let driver_txt = cur.expect_token("driver vertex")?;
                let driver = parse_vertex(&cur, driver_txt)?;
                let arrow = cur.expect_token("->")?;
                if arrow != "->" {
                    return cur.err(format!("expected ->, found {arrow:?}"));
                }
                let mut loads = Vec::new();
                while let Some(tok) = cur.next_token() {
                    loads.push(parse_vertex(&cur, tok)?);
                }
                if loads.is_empty() {
                    return cur.err("edge needs at least one load");
                }
                edges.push((line_no, Edge { driver, loads }));
            }
            other => return cur.err(format!("unknown directive {other:?}")),
        }
    }

    let name = name.ok_or(ParseError::Syntax {
        line: 1,
        col: 1,
        msg: "missing app line".to_string(),
    })?;

    let graph = DataflowGraph {
        name,
        nodes,
        edges: edges.iter().map(|(_, e)| e.clone()).collect(),
    };
    graph.validate_structure().map_err(ParseError::Validation)?;
    validate_acyclic(&graph).map_err(ParseError::Validation)?;
    Ok(graph)
}

/// Writes a graph back into the application graph format. Output is
/// deterministic: nodes and edges appear in stored order.
pub fn write_app_graph(g: &DataflowGraph) -> String {
    let mut out = String::new();
    writeln!(out, "app {}", g.name).unwrap();
    for n in &g.nodes {
        writeln!(
            out,
            "node {} type={} in={} out={}",
            n.id, n.ty, n.in_arity, n.out_arity
        )
        .unwrap();
    }
    for e in &g.edges {
        let loads: Vec<String> = e.loads.iter().map(|l| l.to_string()).collect();
        writeln!(out, "edge {} -> {}", e.driver, loads.join(" ")).unwrap();
    }
    out
}
