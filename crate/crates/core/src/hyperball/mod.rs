//! HyperBall-style propagation of HyperLogLog counters over balls.
//!
//! Each node starts with a counter holding its radius-0 item set for the
//! chosen [`BallKind`]. Every round replaces each counter by the union of
//! itself and its neighbors' counters from the previous round, so after round
//! `k` the counter of `v` holds the items of all nodes in `B_k(v)`.
//! Rounds are synchronous: reads come from the previous buffer only.

mod item;

use std::io::{Read, Write};

use rayon::prelude::*;

pub use item::{BallKind, CanonicalItem, GraphletLists, ItemBytes};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::scalar::Scalar;
use crate::sketch::{self, HllConfig, HllCounter};

/// `n` counters sharing one configuration, stored as one flat register array.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CounterArray {
    config: HllConfig,
    registers: Vec<u8>,
}

impl CounterArray {
    pub fn new(config: HllConfig, n: usize) -> Self {
        Self { config, registers: vec![0; n * config.registers()] }
    }

    #[inline]
    pub fn config(&self) -> &HllConfig {
        &self.config
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.registers.len() / self.config.registers()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.registers.is_empty()
    }

    #[inline]
    pub fn counter(&self, v: usize) -> &[u8] {
        let p = self.config.registers();
        &self.registers[v * p..(v + 1) * p]
    }

    pub fn to_counter(&self, v: usize) -> HllCounter {
        HllCounter::from_registers(self.config, self.counter(v).to_vec()).expect("slice length matches config")
    }

    #[inline]
    pub fn add(&mut self, v: usize, item: &CanonicalItem) {
        let h = self.config.hash(item.encode().as_ref());
        let (i, rank) = self.config.locate(h);
        let slot = &mut self.registers[v * self.config.registers() + i];
        if rank > *slot {
            *slot = rank;
        }
    }

    pub fn estimate<F: Scalar>(&self, v: usize) -> F {
        sketch::estimate_registers(&self.config, self.counter(v))
    }

    /// Writes every counter as a consecutive snapshot record.
    pub fn write_snapshot<W: Write>(&self, mut w: W) -> Result<()> {
        for v in 0..self.len() {
            sketch::write_record(&mut w, &self.config, self.counter(v))?;
        }
        Ok(())
    }

    pub fn read_snapshot<R: Read>(mut r: R, n: usize) -> Result<Self> {
        let mut registers = Vec::new();
        let mut config = None;
        for _ in 0..n {
            let c = sketch::read_header(&mut r)?;
            if config.is_some_and(|prev| prev != c) {
                return Err(Error::Incompatible("snapshot records disagree on config".into()));
            }
            config = Some(c);
            let start = registers.len();
            registers.resize(start + c.registers(), 0);
            r.read_exact(&mut registers[start..])?;
        }
        let config = config.ok_or_else(|| Error::Input("empty counter snapshot".into()))?;
        Ok(Self { config, registers })
    }
}

/// Per-node, per-radius estimates from one propagation run.
#[derive(Debug, Clone)]
pub struct BallRun<F> {
    pub kind: BallKind,
    pub config: HllConfig,
    pub max_radius: usize,
    /// First radius whose counters equal every later radius, when the run
    /// detected a fixed point before `max_radius`.
    pub stop_radius: Option<usize>,
    estimates: Vec<F>,
}

impl<F: Scalar> BallRun<F> {
    pub fn node_count(&self) -> usize {
        self.estimates.len() / (self.max_radius + 1)
    }

    /// Estimate of the radius-`r` item count around `v`.
    #[inline]
    pub fn get(&self, v: usize, r: usize) -> F {
        assert!(r <= self.max_radius, "radius {r} beyond run maximum {}", self.max_radius);
        self.estimates[v * (self.max_radius + 1) + r]
    }

    /// Estimates for `v` over radii `0..=max_radius`.
    pub fn row(&self, v: usize) -> &[F] {
        let w = self.max_radius + 1;
        &self.estimates[v * w..(v + 1) * w]
    }
}

/// Radius-0 items of `v` for `kind`.
pub fn radius0_items(g: &Graph, kind: &BallKind, v: usize, mut emit: impl FnMut(CanonicalItem)) {
    match kind {
        BallKind::Node => emit(CanonicalItem::Node(v)),
        BallKind::Edge => g.adj(v).iter().for_each(|&w| emit(CanonicalItem::edge(v, w))),
        BallKind::OutEdge => g.adj(v).iter().for_each(|&w| emit(CanonicalItem::OutEdge(v, w))),
        BallKind::InEdge => g.adj(v).iter().for_each(|&w| emit(CanonicalItem::InEdge(w, v))),
        BallKind::Triangle | BallKind::Wedge => {
            let triangles = matches!(kind, BallKind::Triangle);
            let adj = g.adj(v);
            for (a, &i) in adj.iter().enumerate() {
                for &j in &adj[a + 1..] {
                    if triangles {
                        if g.has_edge(i, j) {
                            emit(CanonicalItem::triangle(v, i, j));
                        }
                    } else {
                        emit(CanonicalItem::wedge(v, i, j));
                    }
                }
            }
        }
        BallKind::Graphlet(lists) => lists.ids(v).iter().for_each(|&id| emit(CanonicalItem::Graphlet(id))),
    }
}

pub fn init_counters(g: &Graph, kind: &BallKind, config: HllConfig) -> Result<CounterArray> {
    if let BallKind::Graphlet(lists) = kind {
        if lists.node_count() != g.node_count() {
            return Err(Error::Input(format!(
                "graphlet lists cover {} nodes, graph has {}",
                lists.node_count(),
                g.node_count()
            )));
        }
    }
    let mut counters = CounterArray::new(config, g.node_count());
    let p = config.registers();
    counters.registers.par_chunks_mut(p).enumerate().for_each(|(v, regs)| {
        radius0_items(g, kind, v, |item| {
            let (i, rank) = config.locate(config.hash(item.encode().as_ref()));
            if rank > regs[i] {
                regs[i] = rank;
            }
        });
    });
    Ok(counters)
}

/// One synchronous round: `next[v] = prev[v] ∪ prev[w] for w in N(v)`.
/// Returns whether any register changed.
pub fn propagate_round(g: &Graph, prev: &CounterArray, next: &mut CounterArray) -> bool {
    debug_assert_eq!(prev.config, next.config);
    let p = prev.config.registers();
    next.registers
        .par_chunks_mut(p)
        .enumerate()
        .map(|(v, dst)| {
            dst.copy_from_slice(prev.counter(v));
            let mut changed = false;
            for &w in g.adj(v) {
                changed |= sketch::union_registers(dst, prev.counter(w));
            }
            changed
        })
        .reduce(|| false, |a, b| a | b)
}

fn sizes<F: Scalar>(counters: &CounterArray) -> Vec<F> {
    (0..counters.len()).into_par_iter().map(|v| counters.estimate(v)).collect()
}

/// Propagates up to `max_radius` rounds, calling `observe(radius, counters)`
/// on the state for every radius `0..=max_radius` that is computed. Stops early
/// once a round leaves every register unchanged.
pub fn count_ball_observed<F: Scalar>(
    g: &Graph,
    kind: BallKind,
    counters: CounterArray,
    max_radius: usize,
    mut observe: impl FnMut(usize, &CounterArray) -> Result<()>,
) -> Result<BallRun<F>> {
    let n = g.node_count();
    if counters.len() != n {
        return Err(Error::Input(format!("{} counters for {n} nodes", counters.len())));
    }
    let width = max_radius + 1;
    let mut estimates = vec![F::zero(); n * width];
    let store = |est: &mut Vec<F>, r: usize, s: &[F]| {
        for (v, &x) in s.iter().enumerate() {
            est[v * width + r] = x;
        }
    };

    observe(0, &counters)?;
    store(&mut estimates, 0, &sizes(&counters));
    let config = counters.config;
    let mut prev = counters;
    let mut next = CounterArray::new(config, n);
    let mut stop_radius = None;
    for r in 1..=max_radius {
        if !propagate_round(g, &prev, &mut next) {
            stop_radius = Some(r - 1);
            for v in 0..n {
                let x = estimates[v * width + r - 1];
                estimates[v * width + r..(v + 1) * width].fill(x);
            }
            break;
        }
        std::mem::swap(&mut prev, &mut next);
        observe(r, &prev)?;
        store(&mut estimates, r, &sizes(&prev));
    }
    Ok(BallRun { kind, config, max_radius, stop_radius, estimates })
}

pub fn count_ball<F: Scalar>(g: &Graph, kind: BallKind, counters: CounterArray, max_radius: usize) -> BallRun<F> {
    count_ball_observed(g, kind, counters, max_radius, |_, _| Ok(()))
        .expect("counters sized for the graph and a no-op observer")
}

/// Initialises counters for `kind` and propagates them to `max_radius`.
pub fn run<F: Scalar>(g: &Graph, kind: BallKind, max_radius: usize, config: HllConfig) -> Result<BallRun<F>> {
    let counters = init_counters(g, &kind, config)?;
    count_ball_observed(g, kind, counters, max_radius, |_, _| Ok(()))
}
