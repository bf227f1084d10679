//! Project files bundle a design: application graphs in id order, the target
//! mesh, an area table, and a default seed.
//!
//! ```text
//! project
//! app day.app
//! app night.app
//! mesh 2x5
//! areas areas.txt
//! seed 0
//! ```

use std::path::{Path, PathBuf};

use sdfnoc_core::graph::{parse_app_graph, DataflowGraph};
use sdfnoc_core::merge::{parse_area_table, AreaTable};
use sdfnoc_core::noc::MeshNoc;

pub struct Project {
    pub graphs: Vec<DataflowGraph>,
    pub mesh: Option<MeshNoc>,
    pub areas: Option<AreaTable>,
    pub seed: u64,
}

pub fn load_project(path: &str) -> Result<Project, String> {
    let path = Path::new(path);
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let base: PathBuf = path.parent().map(Path::to_path_buf).unwrap_or_default();

    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    match lines.next() {
        Some((_, "project")) => {}
        other => return Err(format!("expected 'project' header, found {other:?}")),
    }

    let mut project = Project {
        graphs: Vec::new(),
        mesh: None,
        areas: None,
        seed: 0,
    };
    for (ln, line) in lines {
        let (key, value) = line
            .split_once(char::is_whitespace)
            .ok_or_else(|| format!("line {ln}: expected '<key> <value>'"))?;
        let value = value.trim();
        match key {
            "app" => {
                let app_path = base.join(value);
                let text = std::fs::read_to_string(&app_path)
                    .map_err(|e| format!("{}: {e}", app_path.display()))?;
                let graph =
                    parse_app_graph(&text).map_err(|e| format!("{}: {e}", app_path.display()))?;
                project.graphs.push(graph);
            }
            "mesh" => {
                project.mesh =
                    Some(MeshNoc::parse_spec(value).map_err(|e| format!("line {ln}: {e}"))?);
            }
            "areas" => {
                let areas_path = base.join(value);
                let text = std::fs::read_to_string(&areas_path)
                    .map_err(|e| format!("{}: {e}", areas_path.display()))?;
                project.areas = Some(
                    parse_area_table(&text)
                        .map_err(|e| format!("{}: {e}", areas_path.display()))?,
                );
            }
            "seed" => {
                project.seed = value
                    .parse()
                    .map_err(|_| format!("line {ln}: bad seed {value:?}"))?;
            }
            other => return Err(format!("line {ln}: unknown directive {other:?}")),
        }
    }
    if project.graphs.is_empty() {
        return Err("project declares no applications".to_string());
    }
    Ok(project)
}
