//! One function per subcommand. All commands are deterministic for fixed
//! inputs and seeds; outputs are UTF-8, LF line endings.

use std::collections::BTreeMap;
use std::path::Path;

use sdfnoc_core::graph::{parse_app_graph, Vertex};
use sdfnoc_core::merge::{
    self, read_union, write_union, write_union_dot, AppId, PackedGraph, UnionVertex,
};
use sdfnoc_core::noc::{validate_config, write_config, MeshNoc};
use sdfnoc_core::pnr::{check, read_pnr, write_pnr, PnrResult};
use sdfnoc_core::registry::OperatorRegistry;
use sdfnoc_core::report::{format_report, report_given, report_model};
use sdfnoc_core::sim::{simulate as run_sim, DelayModel, SimSetup};
use sdfnoc_core::stream_file::{read_streams, render_streams};
use sdfnoc_core::token::Stream;

use crate::project::load_project;

type CmdResult = Result<(), String>;

fn read_file(path: &str) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("{path}: {e}"))
}

fn write_file(path: &str, content: &str) -> CmdResult {
    std::fs::write(path, content).map_err(|e| format!("{path}: {e}"))
}

pub fn validate(files: &[String]) -> CmdResult {
    if files.is_empty() {
        return Err("no input files".to_string());
    }
    let mut failed = false;
    for f in files {
        match read_file(f).and_then(|text| parse_app_graph(&text).map_err(|e| format!("{f}: {e}")))
        {
            Ok(g) => println!(
                "{f}: ok (app {}, {} nodes, {} edges)",
                g.name,
                g.nodes.len(),
                g.edges.len()
            ),
            Err(e) => {
                eprintln!("{e}");
                failed = true;
            }
        }
    }
    if failed {
        Err("validation failed".to_string())
    } else {
        Ok(())
    }
}

pub fn merge(files: &[String], out: &str, seed: Option<u64>) -> CmdResult {
    if files.is_empty() {
        return Err("no input files".to_string());
    }
    let mut graphs = Vec::new();
    for f in files {
        let text = read_file(f)?;
        graphs.push(parse_app_graph(&text).map_err(|e| format!("{f}: {e}"))?);
    }
    let packed = merge::merge(&graphs, seed).map_err(|e| e.to_string())?;
    write_file(out, &write_union(&packed))?;
    println!(
        "merged {} apps: {} union nodes, {} edges ({} external), {} packs",
        graphs.len(),
        packed.union.nodes.len(),
        packed.union.edges.len(),
        packed.external_edges.len(),
        packed.packs.len()
    );
    Ok(())
}

fn load_union(path: &str) -> Result<PackedGraph, String> {
    read_union(&read_file(path)?).map_err(|e| format!("{path}: {e}"))
}

fn load_pnr(path: &str) -> Result<PnrResult, String> {
    read_pnr(&read_file(path)?).map_err(|e| format!("{path}: {e}"))
}

pub fn pnr(union: &str, mesh: &str, seed: u64, max_rip_up: usize, out: &str) -> CmdResult {
    let packed = load_union(union)?;
    let noc = MeshNoc::parse_spec(mesh).map_err(|e| e.to_string())?;
    let result =
        sdfnoc_core::pnr::pnr(&packed, &noc, seed, max_rip_up).map_err(|e| e.to_string())?;
    let violations = check(&packed, &noc, &result.placement, &result.routes);
    if !violations.is_empty() {
        let lines: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
        return Err(format!(
            "pnr result failed verification:\n{}",
            lines.join("\n")
        ));
    }
    write_file(out, &write_pnr(&result, &packed))?;
    println!(
        "placed {} ports on {} mesh, routed {} external edges",
        result.placement.assignments.len(),
        noc,
        result.routes.len()
    );
    Ok(())
}

/// Resolves `--app` (name or 1-based id) against the union's app list.
fn resolve_app(packed: &PackedGraph, app: &str) -> Result<AppId, String> {
    if let Some(id) = packed.union.app_id_by_name(app) {
        return Ok(id);
    }
    if let Ok(n) = app.parse::<u32>() {
        if n >= 1 && n as usize <= packed.union.apps.len() {
            return Ok(AppId(n));
        }
    }
    let names: Vec<String> = packed
        .union
        .apps
        .iter()
        .enumerate()
        .map(|(i, n)| format!("{} ({})", n, i + 1))
        .collect();
    Err(format!(
        "unknown application {:?}; valid applications: {}",
        app,
        names.join(", ")
    ))
}

pub fn config(union: &str, pnr_path: &str, app: &str, out: &str) -> CmdResult {
    let packed = load_union(union)?;
    let result = load_pnr(pnr_path)?;
    let app_id = resolve_app(&packed, app)?;
    let cfg = result.config_for(app_id);
    let violations = validate_config(&result.mesh, &cfg);
    if !violations.is_empty() {
        let lines: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
        return Err(format!("derived config is invalid:\n{}", lines.join("\n")));
    }
    let name = &packed.union.apps[app_id.0 as usize - 1];
    write_file(out, &write_config(name, &result.mesh, &cfg))?;
    println!(
        "config for {name}: {} router(s) carry connections",
        cfg.connections.len()
    );
    Ok(())
}

/// Maps application-coordinate stream vertices through sigma_N into union
/// coordinates.
fn streams_to_union(
    packed: &PackedGraph,
    app: AppId,
    streams: BTreeMap<Vertex, Stream>,
) -> Result<BTreeMap<UnionVertex, Stream>, String> {
    let mut out = BTreeMap::new();
    for (v, s) in streams {
        let node = packed
            .union
            .sigma_n
            .get(&(app, v.node.clone()))
            .ok_or_else(|| format!("stream vertex {v} names an unknown node in this app"))?;
        out.insert(
            UnionVertex {
                node: node.clone(),
                dir: v.dir,
                port: v.port,
            },
            s,
        );
    }
    Ok(out)
}

/// Maps union-coordinate outputs back into application coordinates.
fn streams_to_app(
    packed: &PackedGraph,
    app: AppId,
    streams: BTreeMap<UnionVertex, Stream>,
) -> BTreeMap<Vertex, Stream> {
    let reverse: BTreeMap<_, _> = packed
        .union
        .sigma_n
        .iter()
        .filter(|((a, _), _)| *a == app)
        .map(|((_, id), node)| (node.clone(), id.clone()))
        .collect();
    streams
        .into_iter()
        .map(|(v, s)| {
            let node = reverse
                .get(&v.node)
                .cloned()
                .unwrap_or_else(|| v.node.to_string());
            (
                Vertex {
                    node,
                    dir: v.dir,
                    port: v.port,
                },
                s,
            )
        })
        .collect()
}

#[allow(clippy::too_many_arguments)]
pub fn simulate(
    union: &str,
    pnr_path: &str,
    app: &str,
    streams: &str,
    delay_max: u64,
    seed: u64,
    out: &str,
    trace: bool,
) -> CmdResult {
    let packed = load_union(union)?;
    let result = load_pnr(pnr_path)?;
    let app_id = resolve_app(&packed, app)?;
    let app_streams = read_streams(Path::new(streams)).map_err(|e| e.to_string())?;
    let inputs = streams_to_union(&packed, app_id, app_streams)?;

    let registry = OperatorRegistry::standard();
    let setup = SimSetup {
        noc: &result.mesh,
        packed: &packed,
        placement: &result.placement,
        registry: &registry,
    };
    let cfg = result.config_for(app_id);
    let delays = DelayModel::new(seed, delay_max);
    let sim = run_sim(&setup, &cfg, app_id, &inputs, &delays, trace).map_err(|e| e.to_string())?;
    if trace {
        for ev in &sim.trace {
            println!("{ev}");
        }
    }

    let outputs = streams_to_app(&packed, app_id, sim.outputs);
    let stem = Path::new(out)
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("out")
        .to_string();
    let (text, images) = render_streams(&outputs, &stem);
    let dir = Path::new(out)
        .parent()
        .map(Path::to_path_buf)
        .unwrap_or_default();
    for (name, content) in images {
        let path = dir.join(name);
        std::fs::write(&path, content).map_err(|e| format!("{}: {e}", path.display()))?;
    }
    write_file(out, &text)?;
    println!(
        "simulated app {} for {} tick(s), {} output stream(s)",
        app,
        sim.ticks,
        outputs.len()
    );
    Ok(())
}

pub fn report(
    mode: &str,
    project: Option<&str>,
    areas: Option<&str>,
    standalone: &[u64],
    reconfigurable: Option<u64>,
    seed: Option<u64>,
) -> CmdResult {
    let report = match mode {
        "given" => {
            if standalone.is_empty() {
                return Err("given mode needs at least one --standalone total".to_string());
            }
            let reconf = reconfigurable.ok_or("given mode needs --reconfigurable".to_string())?;
            let named: Vec<(String, u64)> = standalone
                .iter()
                .enumerate()
                .map(|(i, &a)| (format!("app{}", i + 1), a))
                .collect();
            report_given(&named, reconf)
        }
        "model" => {
            let path = project.ok_or("model mode needs --project".to_string())?;
            let project = load_project(path)?;
            let table = match areas {
                Some(path) => sdfnoc_core::merge::parse_area_table(&read_file(path)?)
                    .map_err(|e| format!("{path}: {e}"))?,
                None => project
                    .areas
                    .ok_or("project declares no area table and no --areas given".to_string())?,
            };
            report_model(&project.graphs, &table, seed).map_err(|e| e.to_string())?
        }
        other => return Err(format!("unknown mode {other:?}; use model or given")),
    };
    print!("{}", format_report(&report));
    Ok(())
}

pub fn export_dot(file: &str, out: &str) -> CmdResult {
    let text = read_file(file)?;
    let first = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .find(|l| !l.is_empty())
        .unwrap_or("");
    let dot = if first == "union" {
        let packed = read_union(&text).map_err(|e| format!("{file}: {e}"))?;
        write_union_dot(&packed)
    } else if first.starts_with("app ") {
        let g = parse_app_graph(&text).map_err(|e| format!("{file}: {e}"))?;
        app_graph_dot(&g)
    } else {
        return Err(format!("{file}: not an application graph or union file"));
    };
    write_file(out, &dot)
}

fn app_graph_dot(g: &sdfnoc_core::graph::DataflowGraph) -> String {
    use std::fmt::Write as _;
    let mut out = String::new();
    writeln!(out, "digraph {} {{", g.name).unwrap();
    writeln!(out, "  rankdir=LR;").unwrap();
    for n in &g.nodes {
        writeln!(out, "  \"{}\" [label=\"{}\\n{}\"];", n.id, n.id, n.ty).unwrap();
    }
    for e in &g.edges {
        for l in &e.loads {
            writeln!(
                out,
                "  \"{}\" -> \"{}\" [label=\"out{}->in{}\"];",
                e.driver.node, l.node, e.driver.port, l.port
            )
            .unwrap();
        }
    }
    writeln!(out, "}}").unwrap();
    out
}
