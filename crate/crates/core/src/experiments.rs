//! Estimator-versus-oracle experiments on generated graphs.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::estimators::{estimate_conductance, ratio_intervals_at};
use crate::graph::{generate_planted_partition, Graph, PlantedPartitionParams};
use crate::hyperball::{self, BallKind};
use crate::oracle;
use crate::sketch::HllConfig;

/// Exact and sketched conductance of one ball.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeConductance {
    pub node: usize,
    pub exact: f64,
    pub estimate: f64,
    pub edges: f64,
    pub out_edges: f64,
    pub edges_est: f64,
    pub out_edges_est: f64,
}

/// Per-radius comparisons for every node whose ball has positive volume,
/// indexed `[radius][node order]`.
pub fn conductance_samples(g: &Graph, max_radius: usize, config: HllConfig) -> Result<Vec<Vec<NodeConductance>>> {
    let edges = hyperball::run::<f64>(g, BallKind::Edge, max_radius, config)?;
    let out_edges = hyperball::run::<f64>(g, BallKind::OutEdge, max_radius, config)?;
    let by_node = oracle::triangles_by_node(g);
    let stats = (0..g.node_count())
        .into_par_iter()
        .map(|v| oracle::ball_stats_with(g, &by_node, v, max_radius))
        .collect::<Result<Vec<_>>>()?;
    let mut out = vec![Vec::new(); max_radius + 1];
    for (v, row) in stats.iter().enumerate() {
        for s in row {
            let Some(exact) = s.conductance() else { continue };
            let (e, o) = (edges.get(v, s.radius), out_edges.get(v, s.radius));
            let Ok(estimate) = estimate_conductance(e, o, false) else { continue };
            out[s.radius].push(NodeConductance {
                node: v,
                exact,
                estimate,
                edges: s.edgeball as f64,
                out_edges: s.out_edgeball as f64,
                edges_est: e,
                out_edges_est: o,
            });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverageReport {
    pub radius: usize,
    pub nodes: usize,
    /// Exact value inside the interval built from estimated counts around
    /// the estimate.
    pub vp_plug_in: f64,
    pub cheb_plug_in: f64,
    /// Estimate inside the interval built from exact counts around the
    /// exact value.
    pub vp_true: f64,
    pub cheb_true: f64,
}

pub fn coverage(
    samples: &[NodeConductance],
    radius: usize,
    registers: usize,
    confidence: f64,
) -> Result<CoverageReport> {
    if samples.is_empty() {
        return Err(Error::Input(format!("no balls of radius {radius} with positive volume")));
    }
    let (mut vp_p, mut ch_p, mut vp_t, mut ch_t) = (0usize, 0usize, 0usize, 0usize);
    for s in samples {
        if let Ok((c, v)) = ratio_intervals_at(s.edges_est, s.out_edges_est, s.estimate, registers, confidence) {
            ch_p += c.contains(s.exact) as usize;
            vp_p += v.contains(s.exact) as usize;
        }
        let (c, v) = ratio_intervals_at(s.edges, s.out_edges, s.exact, registers, confidence)?;
        ch_t += c.contains(s.estimate) as usize;
        vp_t += v.contains(s.estimate) as usize;
    }
    let frac = |k: usize| k as f64 / samples.len() as f64;
    Ok(CoverageReport {
        radius,
        nodes: samples.len(),
        vp_plug_in: frac(vp_p),
        cheb_plug_in: frac(ch_p),
        vp_true: frac(vp_t),
        cheb_true: frac(ch_t),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegisterSweepParams {
    pub bits: Vec<u8>,
    pub trials: usize,
    /// Trial `t` uses graph seed `graph.rng_seed + t` and hash seed `hash_seed + t`.
    pub graph: PlantedPartitionParams,
    pub radius: usize,
    pub confidence: f64,
    pub hash_seed: u64,
}

impl Default for RegisterSweepParams {
    fn default() -> Self {
        Self {
            bits: vec![8, 10, 12],
            trials: 20,
            graph: PlantedPartitionParams { n: 1000, k: 10, mean_degree: 10.0, mu: 0.3, rng_seed: 1 },
            radius: 1,
            confidence: 0.95,
            hash_seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegisterSweepRow {
    pub bits: u8,
    /// Mean half-width of the plug-in VP interval at the target confidence.
    pub vp_bound: f64,
    pub cheb_bound: f64,
    /// Mean of `estimate - exact`.
    pub mean_error: f64,
    pub mean_abs_error: f64,
    /// Population variance of `estimate - exact`.
    pub var_error: f64,
    pub samples: usize,
}

/// Conductance error statistics per register count, pooled over nodes and
/// trials. Every register count sees the same graphs.
pub fn register_sweep(params: &RegisterSweepParams) -> Result<Vec<RegisterSweepRow>> {
    if params.bits.is_empty() || params.trials == 0 {
        return Err(Error::Config("register sweep needs at least one bit width and one trial".into()));
    }
    let graphs = (0..params.trials)
        .map(|t| {
            let gp = PlantedPartitionParams { rng_seed: params.graph.rng_seed + t as u64, ..params.graph };
            generate_planted_partition(&gp)
        })
        .collect::<Result<Vec<_>>>()?;
    params
        .bits
        .iter()
        .map(|&bits| {
            let p = 1usize << bits;
            let (mut errs, mut vp, mut cheb) = (Vec::new(), Vec::new(), Vec::new());
            for (t, g) in graphs.iter().enumerate() {
                let config = HllConfig::new(bits, params.hash_seed + t as u64)?;
                let samples = conductance_samples(g, params.radius, config)?.swap_remove(params.radius);
                for s in &samples {
                    errs.push(s.estimate - s.exact);
                    let (c, v) = ratio_intervals_at(s.edges_est, s.out_edges_est, s.estimate, p, params.confidence)?;
                    if c.hi.is_finite() {
                        cheb.push(c.half_width());
                    }
                    if v.hi.is_finite() {
                        vp.push(v.half_width());
                    }
                }
            }
            let mean = |x: &[f64]| x.iter().sum::<f64>() / x.len() as f64;
            let mean_error = mean(&errs);
            let abs: Vec<f64> = errs.iter().map(|e| e.abs()).collect();
            let sq: Vec<f64> = errs.iter().map(|e| (e - mean_error).powi(2)).collect();
            Ok(RegisterSweepRow {
                bits,
                vp_bound: mean(&vp),
                cheb_bound: mean(&cheb),
                mean_error,
                mean_abs_error: mean(&abs),
                var_error: mean(&sq),
                samples: errs.len(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;

    #[test]
    fn samples_cover_positive_volume_balls() {
        let g = gnp(50, 0.1, 8);
        let s = conductance_samples(&g, 2, HllConfig::new(10, 1).unwrap()).unwrap();
        let isolated = (0..50).filter(|&v| g.deg(v) == 0).count();
        assert_eq!(s[1].len(), 50 - isolated);
        for x in &s[2] {
            assert_eq!(x.out_edges, oracle::exact_out_edgeball(&g, x.node, 2).unwrap() as f64);
        }
    }

    #[test]
    fn coverage_fractions() {
        let g = gnp(80, 0.08, 2);
        let s = conductance_samples(&g, 1, HllConfig::new(12, 3).unwrap()).unwrap();
        let c = coverage(&s[1], 1, 1 << 12, 0.95).unwrap();
        assert!(c.vp_plug_in > 0.9 && c.cheb_true >= c.vp_true);
        assert!(coverage(&[], 1, 1 << 12, 0.95).is_err());
    }

    #[test]
    fn small_sweep_rows() {
        let params = RegisterSweepParams {
            bits: vec![6, 10],
            trials: 2,
            graph: PlantedPartitionParams { n: 200, k: 4, mean_degree: 8.0, mu: 0.2, rng_seed: 3 },
            ..RegisterSweepParams::default()
        };
        let rows = register_sweep(&params).unwrap();
        assert_eq!(rows.len(), 2);
        assert!(rows[0].vp_bound < rows[0].cheb_bound);
        assert!(rows[1].cheb_bound < rows[0].cheb_bound);
        assert!(rows[1].var_error < rows[0].var_error);
        assert_eq!(rows[0].samples, rows[1].samples);
    }
}
