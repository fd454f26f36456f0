use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Graph;
use crate::error::{Error, Result};

/// Planted partition with `k` equal communities of `n / k` consecutive nodes.
///
/// Each node expects `(1 - mu) * mean_degree` neighbors inside its community
/// and `mu * mean_degree` outside it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlantedPartitionParams {
    pub n: usize,
    pub k: usize,
    pub mean_degree: f64,
    pub mu: f64,
    pub rng_seed: u64,
}

impl PlantedPartitionParams {
    pub fn community_size(&self) -> usize {
        self.n / self.k
    }

    pub fn community_of(&self, v: usize) -> usize {
        v / self.community_size()
    }

    /// `(p_in, p_out)` edge probabilities.
    fn probabilities(&self) -> Result<(f64, f64)> {
        let cfg = |m: String| Err(Error::Config(m));
        if self.k == 0 || self.n == 0 || !self.n.is_multiple_of(self.k) {
            return cfg(format!("n={} must be a positive multiple of k={}", self.n, self.k));
        }
        if !(0.0..=1.0).contains(&self.mu) {
            return cfg(format!("mu={} outside [0, 1]", self.mu));
        }
        if !(self.mean_degree >= 0.0) || self.mean_degree >= self.n as f64 {
            return cfg(format!("mean_degree={} must be in [0, n)", self.mean_degree));
        }
        let s = self.community_size();
        let intra = (1.0 - self.mu) * self.mean_degree;
        let inter = self.mu * self.mean_degree;
        let p_in = if intra == 0.0 {
            0.0
        } else if s < 2 {
            return cfg("communities of size 1 cannot hold internal edges".into());
        } else {
            intra / (s - 1) as f64
        };
        let p_out = if inter == 0.0 {
            0.0
        } else if self.k < 2 {
            return cfg("mu > 0 requires at least two communities".into());
        } else {
            inter / (self.n - s) as f64
        };
        if p_in > 1.0 || p_out > 1.0 {
            return cfg(format!("infeasible: edge probabilities p_in={p_in:.3}, p_out={p_out:.3} exceed 1"));
        }
        Ok((p_in, p_out))
    }
}

pub fn generate_planted_partition(params: &PlantedPartitionParams) -> Result<Graph> {
    let (p_in, p_out) = params.probabilities()?;
    let s = params.community_size();
    let mut rng = ChaCha8Rng::seed_from_u64(params.rng_seed);
    let mut edges = Vec::new();

    for c in 0..params.k {
        let base = c * s;
        sample_cells(&mut rng, s * (s - 1) / 2, p_in, |idx| {
            let (i, j) = triangle_cell(idx);
            edges.push((base + i, base + j));
        });
    }
    for a in 0..params.k {
        for b in a + 1..params.k {
            sample_cells(&mut rng, s * s, p_out, |idx| {
                edges.push((a * s + idx / s, b * s + idx % s));
            });
        }
    }
    Graph::from_edges(params.n, edges)
}

/// Visits each index in `0..cells` independently with probability `p`,
/// jumping over misses with geometric skips.
fn sample_cells(rng: &mut ChaCha8Rng, cells: usize, p: f64, mut hit: impl FnMut(usize)) {
    if p <= 0.0 || cells == 0 {
        return;
    }
    if p >= 1.0 {
        (0..cells).for_each(hit);
        return;
    }
    let log_q = (1.0 - p).ln();
    let mut idx: usize = 0;
    loop {
        let u: f64 = rng.random();
        // floor(ln(1 - u) / ln(1 - p)) failures before the next success
        let skip = ((1.0 - u).ln() / log_q).floor();
        if skip >= (cells - idx) as f64 {
            return;
        }
        idx += skip as usize;
        hit(idx);
        idx += 1;
        if idx >= cells {
            return;
        }
    }
}

/// Maps a linear index onto the strict lower triangle: `(i, j)` with `i > j`.
fn triangle_cell(idx: usize) -> (usize, usize) {
    let mut i = ((((8 * idx + 1) as f64).sqrt() + 1.0) / 2.0).floor() as usize;
    while i * (i - 1) / 2 > idx {
        i -= 1;
    }
    while (i + 1) * i / 2 <= idx {
        i += 1;
    }
    (i, idx - i * (i - 1) / 2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(n: usize, k: usize, d: f64, mu: f64, seed: u64) -> PlantedPartitionParams {
        PlantedPartitionParams { n, k, mean_degree: d, mu, rng_seed: seed }
    }

    #[test]
    fn triangle_cells_enumerate_all_pairs_once() {
        let s = 9;
        let mut seen: Vec<(usize, usize)> = (0..s * (s - 1) / 2).map(triangle_cell).collect();
        assert!(seen.iter().all(|&(i, j)| i > j && i < s));
        seen.sort_unstable();
        seen.dedup();
        assert_eq!(seen.len(), s * (s - 1) / 2);
    }

    #[test]
    fn deterministic_per_seed() {
        let p = params(300, 3, 8.0, 0.2, 42);
        assert_eq!(generate_planted_partition(&p).unwrap(), generate_planted_partition(&p).unwrap());
        let q = PlantedPartitionParams { rng_seed: 43, ..p };
        assert_ne!(generate_planted_partition(&p).unwrap(), generate_planted_partition(&q).unwrap());
    }

    #[test]
    fn single_community_mean_degree() {
        let mut total = 0.0;
        for seed in 0..20 {
            let g = generate_planted_partition(&params(100, 1, 10.0, 0.0, seed)).unwrap();
            let mean = 2.0 * g.edge_count() as f64 / 100.0;
            assert!((mean - 10.0).abs() <= 2.0, "seed {seed}: mean degree {mean}");
            total += mean;
        }
        assert!((total / 20.0 - 10.0).abs() < 0.5);
    }

    #[test]
    fn zero_mixing_has_no_inter_edges() {
        let p = params(100, 10, 5.0, 0.0, 1);
        let g = generate_planted_partition(&p).unwrap();
        assert!(g.edge_count() > 0);
        assert!(g.edges().all(|(u, v)| p.community_of(u) == p.community_of(v)));
    }

    #[test]
    fn mixing_fraction_near_mu() {
        for seed in 0..20 {
            let p = params(1000, 10, 10.0, 0.3, seed);
            let g = generate_planted_partition(&p).unwrap();
            let inter = g.edges().filter(|&(u, v)| p.community_of(u) != p.community_of(v)).count();
            let frac = inter as f64 / g.edge_count() as f64;
            assert!((0.25..=0.35).contains(&frac), "seed {seed}: {frac}");
        }
    }

    #[test]
    fn infeasible_parameters() {
        let err = |p: PlantedPartitionParams| matches!(generate_planted_partition(&p), Err(Error::Config(_)));
        assert!(err(params(100, 10, 100.0, 0.3, 0)));
        assert!(err(params(100, 10, 20.0, 0.0, 0)));
        assert!(err(params(101, 10, 5.0, 0.3, 0)));
        assert!(err(params(100, 1, 5.0, 0.3, 0)));
        assert!(err(params(100, 10, 5.0, 1.5, 0)));
    }
}
