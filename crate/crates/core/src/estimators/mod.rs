//! Ratio estimators over ball counters, their error intervals and the dip test.

pub mod bounds;
pub mod dip;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::hyperball::{self, BallKind, BallRun};
use crate::oracle;
use crate::scalar::Scalar;
use crate::sketch::HllConfig;

pub use bounds::{
    beta, chebyshev_conductance_interval, chebyshev_transitivity_interval, chebyshev_triangle_interval, eta,
    ratio_intervals_at, triangle_intervals_at, vp_conductance_interval, vp_transitivity_interval, vp_triangle_interval,
    ConfidenceInterval, ErrorBoundConstants, IntervalStyle, DELTA1, DELTA2,
};
pub use dip::{dip_statistic, dip_test, DipResult, DEFAULT_DIP_TRIALS};

fn clamp_unit<F: Scalar>(x: F) -> F {
    x.max(F::zero()).min(F::one())
}

/// `2 * edges / out_edges - 1`. With `clamp`, the result is limited to `[0, 1]`.
pub fn estimate_conductance<F: Scalar>(edges: F, out_edges: F, clamp: bool) -> Result<F> {
    if !(out_edges > F::zero()) {
        return Err(Error::Undefined(format!("out-edgeball estimate {out_edges} is not positive")));
    }
    if edges < F::zero() {
        return Err(Error::Undefined(format!("edgeball estimate {edges} is negative")));
    }
    // same value as 2E/E- - 1, but exact when both counts are integers
    let phi = (F::lit(2.0) * edges - out_edges) / out_edges;
    Ok(if clamp { clamp_unit(phi) } else { phi })
}

/// `3 * triangles / wedges`. Raw values may exceed 1 under estimation noise.
pub fn estimate_transitivity<F: Scalar>(triangles: F, wedges: F, clamp: bool) -> Result<F> {
    if !(wedges > F::zero()) {
        return Err(Error::Undefined(format!("wedge estimate {wedges} is not positive")));
    }
    if triangles < F::zero() {
        return Err(Error::Undefined(format!("triangle estimate {triangles} is negative")));
    }
    let t = F::lit(3.0) * triangles / wedges;
    Ok(if clamp { clamp_unit(t) } else { t })
}

/// Per-node, per-radius cluster scores. Undefined ratios are stored as NaN.
#[derive(Debug, Clone)]
pub struct ClusterScores<F> {
    node_count: usize,
    max_radius: usize,
    phi: Vec<F>,
    triangles: Vec<F>,
    wedges: Vec<F>,
    transitivity: Vec<F>,
}

impl<F: Scalar> ClusterScores<F> {
    /// Combines edgeball, out-edgeball, triangle and wedge runs.
    pub fn from_runs(
        edges: &BallRun<F>,
        out_edges: &BallRun<F>,
        triangles: &BallRun<F>,
        wedges: &BallRun<F>,
    ) -> Result<Self> {
        let n = edges.node_count();
        let max_radius = edges.max_radius;
        for run in [out_edges, triangles, wedges] {
            if run.node_count() != n || run.max_radius != max_radius {
                return Err(Error::Input(format!(
                    "{} run covers {} nodes to radius {}, expected {n} to radius {max_radius}",
                    run.kind.name(),
                    run.node_count(),
                    run.max_radius
                )));
            }
        }
        let mut scores = Self::empty(n, max_radius);
        for v in 0..n {
            for r in 0..=max_radius {
                let i = v * (max_radius + 1) + r;
                scores.set(i, edges.get(v, r), out_edges.get(v, r), triangles.get(v, r), wedges.get(v, r));
            }
        }
        Ok(scores)
    }

    /// Runs the four counter kinds with a shared configuration.
    pub fn compute(g: &Graph, max_radius: usize, config: HllConfig) -> Result<Self> {
        let run = |kind| hyperball::run::<F>(g, kind, max_radius, config);
        let edges = run(BallKind::Edge)?;
        let out_edges = run(BallKind::OutEdge)?;
        let triangles = run(BallKind::Triangle)?;
        let wedges = run(BallKind::Wedge)?;
        Self::from_runs(&edges, &out_edges, &triangles, &wedges)
    }

    /// Scores from exact counts instead of sketches.
    pub fn exact(g: &Graph, max_radius: usize) -> Self {
        let n = g.node_count();
        let by_node = oracle::triangles_by_node(g);
        let stats: Vec<_> = (0..n)
            .into_par_iter()
            .map(|v| oracle::ball_stats_with(g, &by_node, v, max_radius).expect("node in range"))
            .collect();
        let mut scores = Self::empty(n, max_radius);
        let c = |x: usize| F::from_count(x as u64);
        for (v, row) in stats.iter().enumerate() {
            for s in row {
                let i = v * (max_radius + 1) + s.radius;
                scores.set(i, c(s.edgeball), c(s.out_edgeball), c(s.triangles_touching), c(s.wedges_centered));
            }
        }
        scores
    }

    fn empty(n: usize, max_radius: usize) -> Self {
        let len = n * (max_radius + 1);
        Self {
            node_count: n,
            max_radius,
            phi: vec![F::nan(); len],
            triangles: vec![F::zero(); len],
            wedges: vec![F::zero(); len],
            transitivity: vec![F::nan(); len],
        }
    }

    fn set(&mut self, i: usize, edges: F, out_edges: F, triangles: F, wedges: F) {
        self.phi[i] = estimate_conductance(edges, out_edges, false).unwrap_or(F::nan());
        self.triangles[i] = triangles;
        self.wedges[i] = wedges;
        self.transitivity[i] = estimate_transitivity(triangles, wedges, false).unwrap_or(F::nan());
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn max_radius(&self) -> usize {
        self.max_radius
    }

    fn index(&self, v: usize, r: usize) -> usize {
        assert!(v < self.node_count && r <= self.max_radius, "score ({v}, {r}) out of range");
        v * (self.max_radius + 1) + r
    }

    pub fn phi(&self, v: usize, r: usize) -> F {
        self.phi[self.index(v, r)]
    }

    pub fn triangles(&self, v: usize, r: usize) -> F {
        self.triangles[self.index(v, r)]
    }

    pub fn wedges(&self, v: usize, r: usize) -> F {
        self.wedges[self.index(v, r)]
    }

    pub fn transitivity(&self, v: usize, r: usize) -> F {
        self.transitivity[self.index(v, r)]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;

    #[test]
    fn closed_form_estimates() {
        assert_eq!(estimate_conductance(2.0f64, 2.0, false).unwrap(), 1.0);
        assert_eq!(estimate_conductance(7.0f64, 14.0, false).unwrap(), 0.0);
        assert_eq!(estimate_transitivity(4.0f64, 12.0, false).unwrap(), 1.0);
        assert_eq!(estimate_transitivity(1.0f64, 3.0, false).unwrap(), 1.0);
        assert_eq!(estimate_transitivity(0.0f64, 9.0, false).unwrap(), 0.0);
        assert!(matches!(estimate_conductance(1.0f64, 0.0, false), Err(Error::Undefined(_))));
        assert!(matches!(estimate_transitivity(1.0f64, 0.0, false), Err(Error::Undefined(_))));
    }

    #[test]
    fn clamping_is_opt_in() {
        assert_eq!(estimate_conductance(0.4f64, 1.0, false).unwrap(), -0.19999999999999996);
        assert_eq!(estimate_conductance(0.4f64, 1.0, true).unwrap(), 0.0);
        assert!(estimate_transitivity(5.0f64, 12.0, false).unwrap() > 1.0);
        assert_eq!(estimate_transitivity(5.0f64, 12.0, true).unwrap(), 1.0);
    }

    #[test]
    fn exact_scores_match_oracle_conductance() {
        let g = gnp(40, 0.12, 3);
        let scores = ClusterScores::<f64>::exact(&g, 3);
        for v in 0..g.node_count() {
            for r in 0..=3 {
                let ball = oracle::exact_ball(&g, v, r).unwrap();
                match oracle::exact_conductance(&g, &ball.members, oracle::ConductanceForm::Simplified) {
                    Ok(phi) => assert_eq!(scores.phi(v, r), phi),
                    Err(_) => assert!(scores.phi(v, r).is_nan()),
                }
            }
        }
    }

    #[test]
    fn sketched_scores_track_exact_on_small_graph() {
        let g = gnp(60, 0.08, 11);
        let config = HllConfig::new(12, 5).unwrap();
        let est = ClusterScores::<f64>::compute(&g, 2, config).unwrap();
        let exact = ClusterScores::<f64>::exact(&g, 2);
        let errs: Vec<f64> =
            (0..60).filter(|&v| exact.phi(v, 1).is_finite()).map(|v| (est.phi(v, 1) - exact.phi(v, 1)).abs()).collect();
        let mean = errs.iter().sum::<f64>() / errs.len() as f64;
        // a single register collision moves phi by about 2 / vol
        assert!(mean < 0.03, "mean phi error {mean}");
    }

    #[test]
    fn complete_graph_scores() {
        let g = complete(5);
        let s = ClusterScores::<f32>::exact(&g, 1);
        // touching/centered counts: 6 triangles over 6 wedges at radius 0
        assert_eq!(s.transitivity(0, 0), 3.0);
        assert_eq!(s.transitivity(0, 1), 1.0);
        assert_eq!(s.phi(0, 1), 0.0);
        assert_eq!(s.phi(0, 0), 1.0);
    }
}
