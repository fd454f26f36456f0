use std::io::Cursor;

use ballsketch::community::{self, PprConfig, SeedCriterion};
use ballsketch::estimators::{self, ratio_intervals_at};
use ballsketch::graph::{generate_planted_partition, load_edgelist, save_edgelist, PlantedPartitionParams};
use ballsketch::hyperball::{self, BallKind};
use ballsketch::{oracle, ClusterScores, ClusterScores32, CounterArray, HllConfig};

fn planted(seed: u64, mu: f64) -> ballsketch::Graph {
    let p = PlantedPartitionParams { n: 400, k: 4, mean_degree: 8.0, mu, rng_seed: seed };
    generate_planted_partition(&p).unwrap()
}

#[test]
fn edge_list_round_trip_feeds_the_estimators() {
    let g = planted(1, 0.2);
    let mut text = Vec::new();
    save_edgelist(&g, &mut text).unwrap();
    let loaded = load_edgelist(Cursor::new(&text)).unwrap();
    assert_eq!(loaded.graph, g);
    let a = ClusterScores::compute(&g, 2, HllConfig::new(10, 4).unwrap()).unwrap();
    let b = ClusterScores::compute(&loaded.graph, 2, HllConfig::new(10, 4).unwrap()).unwrap();
    for v in 0..g.node_count() {
        assert_eq!(a.phi(v, 2).to_bits(), b.phi(v, 2).to_bits());
    }
}

#[test]
fn single_and_double_precision_agree() {
    let g = planted(2, 0.3);
    let config = HllConfig::new(12, 9).unwrap();
    let s64 = ClusterScores::compute(&g, 1, config).unwrap();
    let s32 = ClusterScores32::compute(&g, 1, config).unwrap();
    for v in 0..g.node_count() {
        assert!((s64.phi(v, 1) - s32.phi(v, 1) as f64).abs() < 1e-4);
    }
}

#[test]
fn counter_snapshots_resume_propagation() {
    let g = planted(3, 0.3);
    let config = HllConfig::new(8, 2).unwrap();
    let full = hyperball::run::<f64>(&g, BallKind::Edge, 3, config).unwrap();

    let mut saved = Vec::new();
    let init = hyperball::init_counters(&g, &BallKind::Edge, config).unwrap();
    hyperball::count_ball_observed::<f64>(&g, BallKind::Edge, init, 1, |r, c| {
        if r == 1 {
            c.write_snapshot(&mut saved)?;
        }
        Ok(())
    })
    .unwrap();
    let resumed = CounterArray::read_snapshot(Cursor::new(saved), g.node_count()).unwrap();
    let rest = hyperball::count_ball::<f64>(&g, BallKind::Edge, resumed, 2);
    for v in 0..g.node_count() {
        assert_eq!(rest.get(v, 2), full.get(v, 3));
    }
}

#[test]
fn exact_scores_reproduce_oracle_identity() {
    let g = planted(4, 0.25);
    let scores = ClusterScores::exact(&g, 3);
    for v in (0..g.node_count()).step_by(7) {
        for r in 0..=3 {
            let ball = oracle::exact_ball(&g, v, r).unwrap();
            let phi = oracle::exact_conductance(&g, &ball.members, oracle::ConductanceForm::Simplified).unwrap();
            assert_eq!(scores.phi(v, r), phi);
        }
    }
}

#[test]
fn seeds_from_sketches_find_planted_communities() {
    let g = planted(5, 0.0);
    let scores = ClusterScores::compute(&g, 1, HllConfig::new(10, 1).unwrap()).unwrap();
    let seeds = community::select_seeds(Some(&scores), &g, SeedCriterion::PhiMin(1), 10).unwrap();
    let sets = vec![("phi".to_string(), seeds)];
    let ev = community::evaluate_seed_sets(&g, &sets, &PprConfig::default()).unwrap();
    // disconnected communities: every sweep finds a zero-conductance set
    assert_eq!(ev[0].summary.max, 0.0);
}

#[test]
fn plug_in_intervals_are_flagged_by_callers() {
    let (c, v) = ratio_intervals_at(300.0, 500.0, 0.2, 1 << 12, 0.95).unwrap();
    let v = v.with_plug_in(true).with_unimodality(true);
    assert!(v.plug_in && v.unimodality_established && !c.plug_in);
    assert!(v.asymptotic_constants);
    let e: f64 = estimators::eta(1 << 12).unwrap();
    assert!(c.epsilon > e);
}
