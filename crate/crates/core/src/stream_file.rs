//! Stream files: token sequences attached to application graph ports.
//!
//! ```text
//! stream gw1.in0: @scene8.ppm N 42
//! ```
//!
//! A token is a decimal integer, `N` for null, or `@<path>` for an image
//! loaded from a PGM/PPM file (resolved relative to the stream file).
//! Writers emit images as side files and reference them the same way.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::graph::Vertex;
use crate::imaging::netpbm;
use crate::token::{ImageData, Stream, Token};

#[derive(Debug, Error)]
pub enum StreamFileError {
    #[error("line {line}: {msg}")]
    Format { line: usize, msg: String },
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {msg}")]
    Image { path: PathBuf, msg: String },
}

fn parse_vertex_ref(text: &str) -> Option<Vertex> {
    let (node, port_part) = text.rsplit_once('.')?;
    if !crate::graph::is_identifier(node) {
        return None;
    }
    let (dir, idx) = if let Some(i) = port_part.strip_prefix("in") {
        (crate::graph::PortDir::In, i)
    } else {
        (crate::graph::PortDir::Out, port_part.strip_prefix("out")?)
    };
    Some(Vertex {
        node: node.to_string(),
        dir,
        port: idx.parse().ok()?,
    })
}

/// Parses a stream file, loading `@path` image tokens through `load`.
pub fn read_streams_with(
    text: &str,
    mut load: impl FnMut(&str) -> Result<Token, StreamFileError>,
) -> Result<BTreeMap<Vertex, Stream>, StreamFileError> {
    let mut out = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| StreamFileError::Format { line: line_no, msg };
        let rest = line
            .strip_prefix("stream ")
            .ok_or_else(|| err("expected 'stream <vertex>: ...'".to_string()))?;
        let (vertex_txt, tokens_txt) = rest
            .split_once(':')
            .ok_or_else(|| err("expected ':' after vertex".to_string()))?;
        let vertex = parse_vertex_ref(vertex_txt.trim())
            .ok_or_else(|| err(format!("bad vertex {:?}", vertex_txt.trim())))?;
        let mut stream = Vec::new();
        for tok in tokens_txt.split_whitespace() {
            let token = if tok == "N" {
                Token::Null
            } else if let Some(path) = tok.strip_prefix('@') {
                load(path)?
            } else {
                Token::Scalar(tok.parse().map_err(|_| err(format!("bad token {tok:?}")))?)
            };
            stream.push(token);
        }
        if out.insert(vertex.clone(), stream).is_some() {
            return Err(err(format!("duplicate stream for {vertex}")));
        }
    }
    Ok(out)
}

/// Parses a stream file from disk, resolving image paths relative to it.
pub fn read_streams(path: &Path) -> Result<BTreeMap<Vertex, Stream>, StreamFileError> {
    let text = std::fs::read_to_string(path).map_err(|source| StreamFileError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    read_streams_with(&text, |rel| load_image_token(&base.join(rel)))
}

/// Loads one image token, choosing PGM or PPM by file extension.
pub fn load_image_token(path: &Path) -> Result<Token, StreamFileError> {
    let text = std::fs::read_to_string(path).map_err(|source| StreamFileError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
    let image = |msg: String| StreamFileError::Image {
        path: path.to_path_buf(),
        msg,
    };
    match ext {
        "pgm" => Ok(Token::gray(
            netpbm::read_pgm(&text).map_err(|e| image(e.to_string()))?,
        )),
        "ppm" => Ok(Token::rgb(
            netpbm::read_ppm(&text).map_err(|e| image(e.to_string()))?,
        )),
        other => Err(image(format!("unsupported image extension {other:?}"))),
    }
}

/// Renders streams into file text plus the image side files it references.
/// Image files are named `<prefix>_<node>_<dir><port>_<index>.<ext>` so the
/// output is deterministic.
pub fn render_streams(
    streams: &BTreeMap<Vertex, Stream>,
    prefix: &str,
) -> (String, Vec<(String, String)>) {
    let mut text = String::new();
    let mut files = Vec::new();
    for (vertex, stream) in streams {
        let mut toks = Vec::new();
        for (i, t) in stream.iter().enumerate() {
            toks.push(match t {
                Token::Null => "N".to_string(),
                Token::Scalar(v) => v.to_string(),
                Token::Image(img) => {
                    let dir = match vertex.dir {
                        crate::graph::PortDir::In => "in",
                        crate::graph::PortDir::Out => "out",
                    };
                    let (ext, content) = match img {
                        ImageData::Gray(g) => ("pgm", netpbm::write_pgm(g)),
                        ImageData::Rgb(c) => ("ppm", netpbm::write_ppm(c)),
                    };
                    let name = format!("{prefix}_{}_{dir}{}_{i}.{ext}", vertex.node, vertex.port);
                    files.push((name.clone(), content));
                    format!("@{name}")
                }
            });
        }
        writeln!(text, "stream {vertex}: {}", toks.join(" ")).unwrap();
    }
    (text, files)
}
