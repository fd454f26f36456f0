//! Undirected simple graphs in compressed adjacency form.

mod generate;
mod io;

pub use generate::{generate_planted_partition, PlantedPartitionParams};
pub use io::{load_edgelist, save_edgelist, LoadedGraph};

use crate::error::{Error, Result};

/// Undirected simple graph on dense node ids `0..n`.
///
/// Adjacency lists are sorted ascending, contain no self-loops or duplicates,
/// and are symmetric.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    neighbors: Vec<usize>,
}

impl Graph {
    /// Builds a graph from arbitrary edge pairs, dropping self-loops and
    /// duplicate edges. Returns the graph together with
    /// `(duplicates_dropped, self_loops_dropped)`.
    pub fn from_edges_counted(
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<(Self, usize, usize)> {
        let mut pairs = Vec::new();
        let mut self_loops = 0;
        for (u, v) in edges {
            for x in [u, v] {
                if x >= n {
                    return Err(Error::NodeOutOfRange { node: x, n });
                }
            }
            if u == v {
                self_loops += 1;
                continue;
            }
            pairs.push((u.min(v), u.max(v)));
        }
        let before = pairs.len();
        pairs.sort_unstable();
        pairs.dedup();
        let duplicates = before - pairs.len();

        let mut degree = vec![0usize; n];
        for &(u, v) in &pairs {
            degree[u] += 1;
            degree[v] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut cursor = offsets[..n].to_vec();
        let mut neighbors = vec![0usize; offsets[n]];
        // Pairs are sorted by (min, max), so the `u` side fills in order;
        // the `v` side is sorted afterwards.
        for &(u, v) in &pairs {
            neighbors[cursor[u]] = v;
            cursor[u] += 1;
            neighbors[cursor[v]] = u;
            cursor[v] += 1;
        }
        for v in 0..n {
            neighbors[offsets[v]..offsets[v + 1]].sort_unstable();
        }
        Ok((Self { offsets, neighbors }, duplicates, self_loops))
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        Self::from_edges_counted(n, edges).map(|(g, _, _)| g)
    }

    #[inline]
    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.neighbors.len() / 2
    }

    /// Sum of all degrees, `2m`.
    #[inline]
    pub fn total_volume(&self) -> usize {
        self.neighbors.len()
    }

    /// Unchecked neighbor slice; panics when `v >= n`.
    #[inline]
    pub fn adj(&self, v: usize) -> &[usize] {
        &self.neighbors[self.offsets[v]..self.offsets[v + 1]]
    }

    #[inline]
    pub fn deg(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn neighbors(&self, v: usize) -> Result<&[usize]> {
        self.check_node(v)?;
        Ok(self.adj(v))
    }

    pub fn degree(&self, v: usize) -> Result<usize> {
        self.check_node(v)?;
        Ok(self.deg(v))
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.node_count() && self.adj(u).binary_search(&v).is_ok()
    }

    pub fn check_node(&self, v: usize) -> Result<()> {
        if v < self.node_count() {
            Ok(())
        } else {
            Err(Error::NodeOutOfRange { node: v, n: self.node_count() })
        }
    }

    pub fn max_degree(&self) -> usize {
        (0..self.node_count()).map(|v| self.deg(v)).max().unwrap_or(0)
    }

    /// Undirected edges as `(u, v)` with `u < v`, in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.node_count()).flat_map(move |u| self.adj(u).iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    /// Full scan of the structural invariants.
    pub fn is_consistent(&self) -> bool {
        (0..self.node_count()).all(|v| {
            let a = self.adj(v);
            a.windows(2).all(|w| w[0] < w[1])
                && a.iter().all(|&w| w != v && w < self.node_count() && self.has_edge(w, v))
        })
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::Graph;

    pub fn path(n: usize) -> Graph {
        Graph::from_edges(n, (1..n).map(|i| (i - 1, i))).unwrap()
    }

    pub fn complete(n: usize) -> Graph {
        Graph::from_edges(n, (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)))).unwrap()
    }

    pub fn cycle(n: usize) -> Graph {
        Graph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
    }

    /// Hub 0 with leaves `1..=leaves`.
    pub fn star(leaves: usize) -> Graph {
        Graph::from_edges(leaves + 1, (1..=leaves).map(|i| (0, i))).unwrap()
    }

    pub fn gnp(n: usize, p: f64, seed: u64) -> Graph {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if rng.random::<f64>() < p {
                    edges.push((i, j));
                }
            }
        }
        Graph::from_edges(n, edges).unwrap()
    }
}
