//! Circuit-switched 2D-mesh NoC model: routers as 5x5 crossbars, the link
//! set (intra-crossbar and inter-router), and configuration validity rules.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fmt::Write as _;

use thiserror::Error;

/// The five crossbar ports of a router.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Port {
    North,
    East,
    South,
    West,
    Local,
}

pub const PORTS: [Port; 5] = [
    Port::North,
    Port::East,
    Port::South,
    Port::West,
    Port::Local,
];

impl Port {
    pub fn as_char(self) -> char {
        match self {
            Port::North => 'N',
            Port::East => 'E',
            Port::South => 'S',
            Port::West => 'W',
            Port::Local => 'L',
        }
    }

    pub fn from_char(c: char) -> Option<Port> {
        Some(match c {
            'N' => Port::North,
            'E' => Port::East,
            'S' => Port::South,
            'W' => Port::West,
            'L' => Port::Local,
            _ => return None,
        })
    }

    /// The port on the neighboring router that faces this one.
    pub fn opposite(self) -> Option<Port> {
        Some(match self {
            Port::North => Port::South,
            Port::South => Port::North,
            Port::East => Port::West,
            Port::West => Port::East,
            Port::Local => return None,
        })
    }
}

impl fmt::Display for Port {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// Grid coordinate of a router, row-major from the top-left.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RouterId {
    pub row: usize,
    pub col: usize,
}

impl fmt::Display for RouterId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.row, self.col)
    }
}

/// One link of the NoC graph: a crossbar pass-through inside a router, or
/// the wire between two neighboring routers, oriented by signal flow.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Link {
    Intra {
        router: RouterId,
        input: Port,
        output: Port,
    },
    Inter {
        from: RouterId,
        from_port: Port,
        to: RouterId,
        to_port: Port,
    },
}

impl Link {
    /// The exclusive physical resource this link occupies. The wire between
    /// two routers is one bidirectional resource, so opposite directions
    /// collide; distinct crossbar pass-throughs of one router do not.
    pub fn resource(&self) -> Resource {
        match self {
            Link::Intra {
                router,
                input,
                output,
            } => Resource::Xbar(*router, *input, *output),
            Link::Inter { from, to, .. } => Resource::Wire((*from).min(*to), (*from).max(*to)),
        }
    }
}

impl fmt::Display for Link {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Link::Intra {
                router,
                input,
                output,
            } => write!(f, "X{router}{input}>{output}"),
            Link::Inter {
                from,
                from_port,
                to,
                to_port,
            } => write!(f, "I{from}{from_port}={to}{to_port}"),
        }
    }
}

/// Contention unit for routing: a specific crossbar connection or the
/// bidirectional wire between two neighbor routers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Resource {
    Xbar(RouterId, Port, Port),
    Wire(RouterId, RouterId),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NocError {
    #[error("mesh dimensions must be at least 1x1, got {0}x{1}")]
    ZeroDimension(usize, usize),
    #[error("config format: {0}")]
    Format(String),
}

/// A rows x cols mesh of routers. Inter-router wires exist exactly between
/// orthogonal grid neighbors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MeshNoc {
    pub rows: usize,
    pub cols: usize,
}

/// Builds a mesh, rejecting zero dimensions.
pub fn build_mesh(rows: usize, cols: usize) -> Result<MeshNoc, NocError> {
    if rows == 0 || cols == 0 {
        return Err(NocError::ZeroDimension(rows, cols));
    }
    Ok(MeshNoc { rows, cols })
}

impl MeshNoc {
    pub fn contains(&self, r: RouterId) -> bool {
        r.row < self.rows && r.col < self.cols
    }

    /// Routers in row-major order.
    pub fn routers(&self) -> impl Iterator<Item = RouterId> + '_ {
        (0..self.rows).flat_map(move |row| (0..self.cols).map(move |col| RouterId { row, col }))
    }

    pub fn router_count(&self) -> usize {
        self.rows * self.cols
    }

    /// The neighbor reached by leaving through `port`, if any.
    pub fn neighbor(&self, r: RouterId, port: Port) -> Option<RouterId> {
        let (row, col) = (r.row as isize, r.col as isize);
        let (nr, nc) = match port {
            Port::North => (row - 1, col),
            Port::South => (row + 1, col),
            Port::East => (row, col + 1),
            Port::West => (row, col - 1),
            Port::Local => return None,
        };
        if nr < 0 || nc < 0 || nr as usize >= self.rows || nc as usize >= self.cols {
            None
        } else {
            Some(RouterId {
                row: nr as usize,
                col: nc as usize,
            })
        }
    }

    /// Number of undirected neighbor adjacencies:
    /// rows*(cols-1) + cols*(rows-1).
    pub fn inter_adjacency_count(&self) -> usize {
        self.rows * (self.cols - 1) + self.cols * (self.rows - 1)
    }

    /// Intra-crossbar links of one router: all ordered port pairs with
    /// distinct ports (self connections are meaningless for routing).
    pub fn intra_links(&self, router: RouterId) -> impl Iterator<Item = Link> + '_ {
        PORTS.into_iter().flat_map(move |input| {
            PORTS
                .into_iter()
                .filter(move |&output| output != input)
                .map(move |output| Link::Intra {
                    router,
                    input,
                    output,
                })
        })
    }

    pub fn parse_spec(text: &str) -> Result<MeshNoc, NocError> {
        let bad = || NocError::Format(format!("expected <rows>x<cols>, found {text:?}"));
        let (r, c) = text.split_once('x').ok_or_else(bad)?;
        let rows = r.parse().map_err(|_| bad())?;
        let cols = c.parse().map_err(|_| bad())?;
        build_mesh(rows, cols)
    }
}

impl fmt::Display for MeshNoc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.rows, self.cols)
    }
}

/// A whole-NoC crossbar configuration: per router, the set of in->out
/// connections that are switched on.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct NocConfig {
    pub connections: BTreeMap<RouterId, BTreeSet<(Port, Port)>>,
}

impl NocConfig {
    pub fn connect(&mut self, router: RouterId, input: Port, output: Port) {
        self.connections
            .entry(router)
            .or_default()
            .insert((input, output));
    }

    /// Output ports each input fans out to, for signal tracing.
    pub fn outputs_of(&self, router: RouterId, input: Port) -> Vec<Port> {
        self.connections
            .get(&router)
            .map(|c| {
                c.iter()
                    .filter(|(i, _)| *i == input)
                    .map(|&(_, o)| o)
                    .collect()
            })
            .unwrap_or_default()
    }
}

/// A configuration validity violation; violations are data, not errors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConfigViolation {
    /// Rule (a): each crossbar output may be driven by at most one input.
    OutputMultiplyDriven {
        router: RouterId,
        output: Port,
        drivers: Vec<Port>,
    },
    /// Rule (b): the wire between two routers carries data one way at a time.
    WireBothDirections { a: RouterId, b: RouterId },
    /// Rule (c): a local port is configured as input xor output.
    LocalBothDirections { router: RouterId },
    /// Self connections (p->p) are not links at all.
    SelfConnection { router: RouterId, port: Port },
    /// Connection mentions a router outside the mesh.
    UnknownRouter { router: RouterId },
}

impl fmt::Display for ConfigViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigViolation::OutputMultiplyDriven {
                router,
                output,
                drivers,
            } => {
                let d: Vec<String> = drivers.iter().map(|p| p.to_string()).collect();
                write!(
                    f,
                    "router {router}: output {output} driven by multiple inputs {{{}}}",
                    d.join(",")
                )
            }
            ConfigViolation::WireBothDirections { a, b } => {
                write!(f, "wire {a}<->{b} driven in both directions")
            }
            ConfigViolation::LocalBothDirections { router } => {
                write!(
                    f,
                    "router {router}: local port used as both input and output"
                )
            }
            ConfigViolation::SelfConnection { router, port } => {
                write!(f, "router {router}: self connection {port}->{port}")
            }
            ConfigViolation::UnknownRouter { router } => {
                write!(f, "router {router} outside the mesh")
            }
        }
    }
}

/// Checks a configuration against the crossbar rules: single-driver outputs,
/// one-directional wires, and local in-xor-out. Returns all violations.
pub fn validate_config(noc: &MeshNoc, cfg: &NocConfig) -> Vec<ConfigViolation> {
    let mut violations = Vec::new();

    for (&router, conns) in &cfg.connections {
        if !noc.contains(router) {
            violations.push(ConfigViolation::UnknownRouter { router });
            continue;
        }
        let mut drivers: BTreeMap<Port, Vec<Port>> = BTreeMap::new();
        let mut local_in = false;
        let mut local_out = false;
        for &(i, o) in conns {
            if i == o {
                violations.push(ConfigViolation::SelfConnection { router, port: i });
            }
            drivers.entry(o).or_default().push(i);
            if i == Port::Local {
                local_in = true;
            }
            if o == Port::Local {
                local_out = true;
            }
        }
        for (output, ins) in drivers {
            if ins.len() > 1 {
                violations.push(ConfigViolation::OutputMultiplyDriven {
                    router,
                    output,
                    drivers: ins,
                });
            }
        }
        if local_in && local_out {
            violations.push(ConfigViolation::LocalBothDirections { router });
        }
    }

    // Wire directions: router r drives its p-wire iff some connection (_ -> p)
    // exists at r. Both ends driving means both directions at once.
    let drives = |r: RouterId, p: Port| {
        cfg.connections
            .get(&r)
            .map(|c| c.iter().any(|&(_, o)| o == p))
            .unwrap_or(false)
    };
    for r in noc.routers() {
        for port in [Port::East, Port::South] {
            if let Some(nbr) = noc.neighbor(r, port) {
                let opposite = port.opposite().unwrap();
                if drives(r, port) && drives(nbr, opposite) {
                    violations.push(ConfigViolation::WireBothDirections { a: r, b: nbr });
                }
            }
        }
    }

    violations
}

/// Writes a configuration file:
/// `config app=<name> mesh=<RxC>` then one line per non-empty router.
pub fn write_config(app: &str, noc: &MeshNoc, cfg: &NocConfig) -> String {
    let mut out = String::new();
    writeln!(out, "config app={app} mesh={noc}").unwrap();
    for (router, conns) in &cfg.connections {
        if conns.is_empty() {
            continue;
        }
        let items: Vec<String> = conns.iter().map(|(i, o)| format!("{i}->{o}")).collect();
        writeln!(out, "router {router}: {}", items.join(",")).unwrap();
    }
    out
}

/// Parses a configuration file; returns (app name, mesh, config).
pub fn read_config(text: &str) -> Result<(String, MeshNoc, NocConfig), NocError> {
    let err = |line: usize, msg: &str| NocError::Format(format!("line {line}: {msg}"));
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim().to_string()))
        .filter(|(_, l)| !l.is_empty());

    let (ln, header) = lines.next().ok_or_else(|| err(1, "empty config file"))?;
    let mut htok = header.split_whitespace();
    if htok.next() != Some("config") {
        return Err(err(ln, "expected 'config' header"));
    }
    let app = htok
        .next()
        .and_then(|t| t.strip_prefix("app="))
        .ok_or_else(|| err(ln, "expected app=<name>"))?
        .to_string();
    let mesh = htok
        .next()
        .and_then(|t| t.strip_prefix("mesh="))
        .ok_or_else(|| err(ln, "expected mesh=<RxC>"))?;
    let noc = MeshNoc::parse_spec(mesh)?;

    let mut cfg = NocConfig::default();
    for (ln, line) in lines {
        let rest = line
            .strip_prefix("router ")
            .ok_or_else(|| err(ln, "expected router line"))?;
        let (router_txt, conns_txt) = rest
            .split_once(':')
            .ok_or_else(|| err(ln, "expected 'router (r,c): ...'"))?;
        let router = parse_router(router_txt.trim()).ok_or_else(|| err(ln, "bad router id"))?;
        for item in conns_txt.trim().split(',') {
            let item = item.trim();
            if item.is_empty() {
                continue;
            }
            let (i, o) = item
                .split_once("->")
                .ok_or_else(|| err(ln, "expected IN->OUT"))?;
            let parse_port = |s: &str| {
                let mut ch = s.chars();
                match (ch.next().and_then(Port::from_char), ch.next()) {
                    (Some(p), None) => Some(p),
                    _ => None,
                }
            };
            let input = parse_port(i).ok_or_else(|| err(ln, "bad input port"))?;
            let output = parse_port(o).ok_or_else(|| err(ln, "bad output port"))?;
            cfg.connect(router, input, output);
        }
    }
    Ok((app, noc, cfg))
}

pub(crate) fn parse_router(text: &str) -> Option<RouterId> {
    let inner = text.strip_prefix('(')?.strip_suffix(')')?;
    let (r, c) = inner.split_once(',')?;
    Some(RouterId {
        row: r.trim().parse().ok()?,
        col: c.trim().parse().ok()?,
    })
}
