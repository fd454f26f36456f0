//! Canonical byte encodings of counted items.

use std::sync::Arc;

use crate::error::{Error, Result};

const MAX_ENCODED: usize = 1 + 3 * 8;

/// One combinatorial object inserted into a counter. Two values are equal
/// exactly when they denote the same object, and so are their encodings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CanonicalItem {
    Node(usize),
    /// Undirected edge, endpoints stored `(min, max)`.
    Edge(usize, usize),
    OutEdge(usize, usize),
    InEdge(usize, usize),
    /// Sorted triple.
    Triangle([usize; 3]),
    /// Center plus `(min, max)` endpoints.
    Wedge {
        center: usize,
        lo: usize,
        hi: usize,
    },
    Graphlet(u64),
}

impl CanonicalItem {
    pub fn edge(u: usize, v: usize) -> Self {
        Self::Edge(u.min(v), u.max(v))
    }

    pub fn triangle(a: usize, b: usize, c: usize) -> Self {
        let mut t = [a, b, c];
        t.sort_unstable();
        Self::Triangle(t)
    }

    pub fn wedge(center: usize, i: usize, j: usize) -> Self {
        Self::Wedge { center, lo: i.min(j), hi: i.max(j) }
    }

    fn tag(&self) -> u8 {
        match self {
            Self::Node(_) => 1,
            Self::Edge(..) => 2,
            Self::OutEdge(..) => 3,
            Self::InEdge(..) => 4,
            Self::Triangle(_) => 5,
            Self::Wedge { .. } => 6,
            Self::Graphlet(_) => 7,
        }
    }

    pub fn encode(&self) -> ItemBytes {
        let mut out = ItemBytes { buf: [0; MAX_ENCODED], len: 1 };
        out.buf[0] = self.tag();
        match *self {
            Self::Node(v) => out.push(v as u64),
            Self::Edge(a, b) | Self::OutEdge(a, b) | Self::InEdge(a, b) => {
                out.push(a as u64);
                out.push(b as u64);
            }
            Self::Triangle([a, b, c]) => {
                out.push(a as u64);
                out.push(b as u64);
                out.push(c as u64);
            }
            Self::Wedge { center, lo, hi } => {
                out.push(center as u64);
                out.push(lo as u64);
                out.push(hi as u64);
            }
            Self::Graphlet(id) => out.push(id),
        }
        out
    }
}

#[derive(Clone, Copy)]
pub struct ItemBytes {
    buf: [u8; MAX_ENCODED],
    len: usize,
}

impl ItemBytes {
    fn push(&mut self, x: u64) {
        self.buf[self.len..self.len + 8].copy_from_slice(&x.to_le_bytes());
        self.len += 8;
    }
}

impl AsRef<[u8]> for ItemBytes {
    fn as_ref(&self) -> &[u8] {
        &self.buf[..self.len]
    }
}

/// Caller-supplied graphlet ids per node: `ids(v)` lists every graphlet that
/// contains `v`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GraphletLists {
    per_node: Vec<Vec<u64>>,
}

impl GraphletLists {
    pub fn new(n: usize, entries: impl IntoIterator<Item = (usize, Vec<u64>)>) -> Result<Self> {
        let mut per_node = vec![Vec::new(); n];
        for (v, ids) in entries {
            let slot =
                per_node.get_mut(v).ok_or_else(|| Error::Input(format!("graphlet list names unknown node {v}")))?;
            slot.extend(ids);
        }
        Ok(Self { per_node })
    }

    pub fn node_count(&self) -> usize {
        self.per_node.len()
    }

    pub fn ids(&self, v: usize) -> &[u64] {
        &self.per_node[v]
    }
}

/// What a ball run counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BallKind {
    Node,
    Edge,
    OutEdge,
    InEdge,
    Triangle,
    Wedge,
    Graphlet(Arc<GraphletLists>),
}

impl BallKind {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Node => "node",
            Self::Edge => "edge",
            Self::OutEdge => "outedge",
            Self::InEdge => "inedge",
            Self::Triangle => "triangle",
            Self::Wedge => "wedge",
            Self::Graphlet(_) => "graphlet",
        }
    }
}
