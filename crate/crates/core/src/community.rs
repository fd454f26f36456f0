//! Seed selection from cluster scores and PageRank-Nibble.

use std::collections::VecDeque;
use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::estimators::ClusterScores;
use crate::graph::Graph;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeedCriterion {
    /// Smallest estimated conductance of the radius-`r` ball.
    PhiMin(usize),
    /// Most triangles touching the radius-`r` ball.
    TriangleMax(usize),
    /// Highest transitivity of the radius-`r` ball.
    TransitivityMax(usize),
    DegreeMax,
    Random(u64),
}

impl SeedCriterion {
    pub fn radius(&self) -> Option<usize> {
        match *self {
            Self::PhiMin(r) | Self::TriangleMax(r) | Self::TransitivityMax(r) => Some(r),
            Self::DegreeMax | Self::Random(_) => None,
        }
    }
}

impl fmt::Display for SeedCriterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::PhiMin(r) => write!(f, "phi-min-r{r}"),
            Self::TriangleMax(r) => write!(f, "triangle-max-r{r}"),
            Self::TransitivityMax(r) => write!(f, "transitivity-max-r{r}"),
            Self::DegreeMax => write!(f, "degree-max"),
            Self::Random(s) => write!(f, "random-{s}"),
        }
    }
}

pub const DEFAULT_SEED_COUNT: usize = 100;
pub const MAX_SEED_RADIUS: usize = 2;

/// Top `k` nodes under `criterion`, ties broken by ascending node id and NaN
/// scores ranked last. Score criteria need `scores` covering their radius.
pub fn select_seeds<F: Scalar>(
    scores: Option<&ClusterScores<F>>,
    g: &Graph,
    criterion: SeedCriterion,
    k: usize,
) -> Result<Vec<usize>> {
    let n = g.node_count();
    if k > n {
        return Err(Error::Config(format!("cannot select {k} seeds from {n} nodes")));
    }
    let score_of: Box<dyn Fn(usize) -> F + '_> = match criterion {
        SeedCriterion::DegreeMax => Box::new(|v| -F::from_count(g.deg(v) as u64)),
        SeedCriterion::Random(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            return Ok(rand::seq::index::sample(&mut rng, n, k).into_vec());
        }
        SeedCriterion::PhiMin(r) | SeedCriterion::TriangleMax(r) | SeedCriterion::TransitivityMax(r) => {
            if r > MAX_SEED_RADIUS {
                return Err(Error::Config(format!("seed radius {r} exceeds {MAX_SEED_RADIUS}")));
            }
            let s = scores.ok_or_else(|| Error::Input(format!("{criterion} needs cluster scores")))?;
            if s.node_count() != n || s.max_radius() < r {
                return Err(Error::Input(format!(
                    "scores cover {} nodes to radius {}, {criterion} needs {n} nodes to radius {r}",
                    s.node_count(),
                    s.max_radius()
                )));
            }
            match criterion {
                SeedCriterion::PhiMin(_) => Box::new(move |v| s.phi(v, r)),
                SeedCriterion::TriangleMax(_) => Box::new(move |v| -s.triangles(v, r)),
                _ => Box::new(move |v| -s.transitivity(v, r)),
            }
        }
    };
    // ascending key, NaN last, then node id
    let mut keyed: Vec<(F, usize)> = (0..n).map(|v| (score_of(v), v)).collect();
    keyed.sort_by(|a, b| {
        a.0.is_nan()
            .cmp(&b.0.is_nan())
            .then(a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal))
            .then(a.1.cmp(&b.1))
    });
    Ok(keyed.into_iter().take(k).map(|(_, v)| v).collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PprConfig {
    /// Restart probability of the lazy personalised walk.
    pub alpha: f64,
    pub epsilon: f64,
    pub max_cut_size: usize,
    /// Only admit sweep prefixes holding at most half the total volume.
    pub half_volume: bool,
}

impl Default for PprConfig {
    fn default() -> Self {
        Self { alpha: 0.85, epsilon: 1e-8, max_cut_size: 200, half_volume: true }
    }
}

impl PprConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::Config(format!("alpha must be in (0, 1), got {}", self.alpha)));
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::Config(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        if self.max_cut_size == 0 {
            return Err(Error::Config("max cut size must be positive".into()));
        }
        Ok(())
    }
}

/// Sparse approximate personalised PageRank vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PprVector {
    pub seed: usize,
    /// `(node, mass)` with positive mass, sorted by node.
    pub mass: Vec<(usize, f64)>,
    /// Residual mass left unpushed.
    pub residual_total: f64,
    pub pushes: usize,
    /// The seed has no neighbours; all mass stays on it.
    pub degenerate: bool,
}

impl PprVector {
    pub fn get(&self, v: usize) -> f64 {
        self.mass.binary_search_by_key(&v, |&(u, _)| u).map_or(0.0, |i| self.mass[i].1)
    }

    pub fn total(&self) -> f64 {
        self.mass.iter().map(|&(_, p)| p).sum()
    }
}

/// Push procedure for the lazy walk: a push at `u` keeps `alpha * r(u)`,
/// leaves half the rest on `u` and spreads the other half over its
/// neighbours. Stops when every residual is below `epsilon * degree`.
pub fn approximate_pagerank(g: &Graph, seed: usize, cfg: &PprConfig) -> Result<PprVector> {
    cfg.validate()?;
    g.check_node(seed)?;
    if g.deg(seed) == 0 {
        return Ok(PprVector { seed, mass: vec![(seed, 1.0)], residual_total: 0.0, pushes: 0, degenerate: true });
    }
    let n = g.node_count();
    let mut p = vec![0.0f64; n];
    let mut r = vec![0.0f64; n];
    let mut queued = vec![false; n];
    let mut touched = vec![seed];
    let mut queue = VecDeque::new();
    let eps = cfg.epsilon;
    let above = |r: f64, d: usize| r >= eps * d as f64;

    r[seed] = 1.0;
    if above(1.0, g.deg(seed)) {
        queue.push_back(seed);
        queued[seed] = true;
    }
    let mut pushes = 0;
    while let Some(u) = queue.pop_front() {
        queued[u] = false;
        let d = g.deg(u);
        let ru = r[u];
        if !above(ru, d) {
            continue;
        }
        pushes += 1;
        p[u] += cfg.alpha * ru;
        let rest = (1.0 - cfg.alpha) * ru;
        r[u] = rest / 2.0;
        let share = rest / (2.0 * d as f64);
        for &w in g.adj(u) {
            if r[w] == 0.0 && p[w] == 0.0 {
                touched.push(w);
            }
            r[w] += share;
            if !queued[w] && above(r[w], g.deg(w)) {
                queued[w] = true;
                queue.push_back(w);
            }
        }
        if !queued[u] && above(r[u], d) {
            queued[u] = true;
            queue.push_back(u);
        }
    }
    touched.sort_unstable();
    touched.dedup();
    let residual_total = touched.iter().map(|&v| r[v]).sum();
    let mass = touched.into_iter().filter(|&v| p[v] > 0.0).map(|v| (v, p[v])).collect();
    Ok(PprVector { seed, mass, residual_total, pushes, degenerate: false })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub seed: usize,
    /// Support ordered by descending `mass / degree`, ties by node id.
    pub order: Vec<usize>,
    pub best_size: usize,
    /// Zero for an isolated seed, which has no boundary and no volume.
    pub best_conductance: f64,
    /// Conductance of every evaluated prefix; entry `i` is the prefix of size `i + 1`.
    pub curve: Vec<f64>,
    /// Whether each prefix was eligible under the half-volume rule.
    pub admissible: Vec<bool>,
}

impl SweepResult {
    pub fn best_set(&self) -> &[usize] {
        &self.order[..self.best_size]
    }
}

/// Conductance-minimising prefix of the degree-normalised PPR order, over
/// prefixes of at most `max_cut_size` nodes.
pub fn sweep_cut(g: &Graph, ppr: &PprVector, cfg: &PprConfig) -> Result<SweepResult> {
    cfg.validate()?;
    if ppr.mass.is_empty() {
        return Err(Error::Input("PageRank vector has empty support".into()));
    }
    let seed = ppr.seed;
    let norm = |v: usize, p: f64| if g.deg(v) == 0 { f64::INFINITY } else { p / g.deg(v) as f64 };
    let mut support: Vec<(f64, usize)> = ppr.mass.iter().map(|&(v, p)| (norm(v, p), v)).collect();
    for &(_, v) in &support {
        g.check_node(v)?;
    }
    support.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    let order: Vec<usize> = support.into_iter().map(|(_, v)| v).collect();

    let total = g.total_volume();
    let mut in_set = vec![false; g.node_count()];
    let (mut vol, mut boundary) = (0usize, 0usize);
    let limit = order.len().min(cfg.max_cut_size);
    let mut curve = Vec::with_capacity(limit);
    let mut admissible = Vec::with_capacity(limit);
    let mut best: Option<(usize, f64)> = None;
    for (i, &x) in order[..limit].iter().enumerate() {
        let inside = g.adj(x).iter().filter(|&&y| in_set[y]).count();
        in_set[x] = true;
        vol += g.deg(x);
        boundary = boundary + g.deg(x) - 2 * inside;
        let phi = if vol == 0 { 0.0 } else { boundary as f64 / vol as f64 };
        let ok = !cfg.half_volume || vol <= total - vol;
        curve.push(phi);
        admissible.push(ok);
        if ok && best.is_none_or(|(_, b)| phi < b) {
            best = Some((i + 1, phi));
        }
    }
    let (best_size, best_conductance) =
        best.ok_or_else(|| Error::Input(format!("no admissible sweep prefix for seed {seed}")))?;
    Ok(SweepResult { seed, order, best_size, best_conductance, curve, admissible })
}

pub fn pagerank_nibble(g: &Graph, seed: usize, cfg: &PprConfig) -> Result<SweepResult> {
    sweep_cut(g, &approximate_pagerank(g, seed, cfg)?, cfg)
}

/// Minimum, quartiles and maximum; quartiles interpolate linearly between
/// order statistics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiveNumberSummary {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

impl FiveNumberSummary {
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() || values.iter().any(|x| x.is_nan()) {
            return None;
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let q = |f: f64| {
            let h = f * (v.len() - 1) as f64;
            let (lo, hi) = (h.floor() as usize, h.ceil() as usize);
            v[lo] + (h - lo as f64) * (v[hi] - v[lo])
        };
        Some(Self { min: v[0], q1: q(0.25), median: q(0.5), q3: q(0.75), max: v[v.len() - 1] })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeedSetEvaluation {
    pub name: String,
    pub results: Vec<SweepResult>,
    pub summary: FiveNumberSummary,
}

/// Runs PageRank-Nibble from every seed of every named set. Seeds run in
/// parallel; results keep the input order.
pub fn evaluate_seed_sets(g: &Graph, sets: &[(String, Vec<usize>)], cfg: &PprConfig) -> Result<Vec<SeedSetEvaluation>> {
    sets.iter()
        .map(|(name, seeds)| {
            if seeds.is_empty() {
                return Err(Error::Input(format!("seed set {name} is empty")));
            }
            let results = seeds.par_iter().map(|&s| pagerank_nibble(g, s, cfg)).collect::<Result<Vec<_>>>()?;
            let phis: Vec<f64> = results.iter().map(|r| r.best_conductance).collect();
            let summary = FiveNumberSummary::of(&phis).expect("non-empty and finite");
            Ok(SeedSetEvaluation { name: name.clone(), results, summary })
        })
        .collect()
}
