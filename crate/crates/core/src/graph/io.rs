use std::collections::HashMap;
use std::io::{BufRead, Write};

use super::Graph;
use crate::error::{Error, Result};

/// A graph read from an edge list, with the dense-id remapping.
#[derive(Debug, Clone)]
pub struct LoadedGraph {
    pub graph: Graph,
    /// `original_ids[dense] = id as written in the file`.
    pub original_ids: Vec<u64>,
    pub duplicates_dropped: usize,
    pub self_loops_dropped: usize,
}

impl LoadedGraph {
    pub fn dense_id(&self, original: u64) -> Option<usize> {
        self.original_ids.binary_search(&original).ok()
    }
}

/// Reads whitespace-separated `u v` pairs, one per line. Blank lines and
/// lines starting with `#` are skipped. Node ids are remapped to `0..n` in
/// ascending order of their original value, so an edge list over dense ids
/// without isolated nodes loads back unchanged.
pub fn load_edgelist<R: BufRead>(reader: R) -> Result<LoadedGraph> {
    let mut raw = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut fields = trimmed.split_whitespace();
        let mut next = |what: &str| -> Result<u64> {
            let tok = fields
                .next()
                .ok_or_else(|| Error::Parse { line: line_no, message: format!("missing {what} node id") })?;
            tok.parse::<u64>().map_err(|e| Error::Parse { line: line_no, message: format!("bad node id {tok:?}: {e}") })
        };
        let u = next("source")?;
        let v = next("target")?;
        if let Some(extra) = fields.next() {
            return Err(Error::Parse { line: line_no, message: format!("unexpected trailing field {extra:?}") });
        }
        raw.push((u, v));
    }

    let mut original_ids: Vec<u64> = raw.iter().flat_map(|&(u, v)| [u, v]).collect();
    original_ids.sort_unstable();
    original_ids.dedup();
    let index: HashMap<u64, usize> = original_ids.iter().enumerate().map(|(i, &id)| (id, i)).collect();
    let (graph, duplicates_dropped, self_loops_dropped) =
        Graph::from_edges_counted(original_ids.len(), raw.iter().map(|(u, v)| (index[u], index[v])))?;
    Ok(LoadedGraph { graph, original_ids, duplicates_dropped, self_loops_dropped })
}

/// Writes one `u v` line per edge with `u < v`, in ascending order.
pub fn save_edgelist<W: Write>(g: &Graph, mut w: W) -> Result<()> {
    for (u, v) in g.edges() {
        writeln!(w, "{u} {v}")?;
    }
    Ok(())
}
