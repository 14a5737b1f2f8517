//! Edge-list input (SNAP/KONECT style) and trussness output.
//!
//! Input lines hold two whitespace-separated vertex ids; further columns
//! (weights, timestamps) are ignored. Lines starting with `%` or `#` and blank
//! lines are skipped. Ids are remapped to a dense range in ascending order of
//! the original id, so sorting by dense ids also sorts by original ids.

use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::{build_graph, Graph, VertexId};
use crate::peel::TrussnessResult;

#[derive(Clone, Debug)]
pub struct LoadedGraph {
    pub graph: Graph,
    /// Original id of each dense vertex id.
    pub original_ids: Vec<u64>,
}

impl LoadedGraph {
    pub fn original(&self, v: VertexId) -> u64 {
        self.original_ids[v as usize]
    }
}

pub fn load_edge_list(path: impl AsRef<Path>) -> Result<LoadedGraph> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_edge_list(BufReader::new(file), path)
}

/// Parses an edge list from any reader; `origin` names the source in errors.
pub fn parse_edge_list(reader: impl BufRead, origin: impl AsRef<Path>) -> Result<LoadedGraph> {
    let origin = origin.as_ref();
    let mut raw = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| Error::io(origin, e))?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') || trimmed.starts_with('#') {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let mut next_id = || -> Result<u64> {
            let token = tokens.next().ok_or_else(|| Error::Parse {
                path: origin.to_path_buf(),
                line: line_no,
                message: "expected two vertex ids".to_string(),
            })?;
            token.parse::<u64>().map_err(|_| Error::Parse {
                path: origin.to_path_buf(),
                line: line_no,
                message: format!("invalid vertex id {token:?}"),
            })
        };
        let u = next_id()?;
        let v = next_id()?;
        raw.push((u, v));
    }

    let mut original_ids: Vec<u64> = raw.iter().flat_map(|&(u, v)| [u, v]).collect();
    original_ids.sort_unstable();
    original_ids.dedup();
    if original_ids.len() >= VertexId::MAX as usize {
        return Err(Error::VertexOverflow(original_ids.len() as u64));
    }
    let dense = |id: u64| original_ids.binary_search(&id).unwrap() as u64;
    let edges: Vec<(u64, u64)> = raw.iter().map(|&(u, v)| (dense(u), dense(v))).collect();
    let graph = build_graph(&edges)?;
    debug_assert_eq!(graph.vertex_count(), original_ids.len());
    Ok(LoadedGraph {
        graph,
        original_ids,
    })
}

/// Writes `u<TAB>v<TAB>t` per edge in ascending `(u, v)` order, using original ids.
pub fn write_trussness(
    out: &mut impl Write,
    loaded: &LoadedGraph,
    result: &TrussnessResult,
) -> std::io::Result<()> {
    for e in loaded.graph.edges() {
        let (u, v) = loaded.graph.endpoints(e);
        writeln!(
            out,
            "{}\t{}\t{}",
            loaded.original(u),
            loaded.original(v),
            result.get(e)
        )?;
    }
    Ok(())
}

/// Writes a plain edge list, one `u v` pair per line.
pub fn write_edge_list(out: &mut impl Write, g: &Graph) -> std::io::Result<()> {
    for &(u, v) in g.edge_list() {
        writeln!(out, "{u} {v}")?;
    }
    Ok(())
}
