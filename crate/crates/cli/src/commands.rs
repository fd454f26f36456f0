use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use ballsketch::community::{self, PprConfig, SeedCriterion};
use ballsketch::estimators::{self, dip_test, ConfidenceInterval};
use ballsketch::experiments::{register_sweep, RegisterSweepParams};
use ballsketch::graph::{generate_planted_partition, load_edgelist, save_edgelist, PlantedPartitionParams};
use ballsketch::hyperball::{self, BallKind, GraphletLists};
use ballsketch::oracle::{self, BallStats};
use ballsketch::{ClusterScores, CounterArray, Error, HllConfig, LoadedGraph, Result};
use rayon::prelude::*;

use crate::args::*;
use crate::output::{num, open_out, Csv, Manifest};

pub fn run(cli: &Cli, m: &mut Manifest) -> Result<()> {
    let ctx = Ctx { out: cli.global.out.as_deref(), verbose: cli.global.verbose };
    match &cli.command {
        Command::Gen(a) => gen(&ctx, a, m),
        Command::Balls(a) => balls(&ctx, a, m),
        Command::Conductance(a) => estimate(&ctx, EstimatorArg::Conductance, a, m),
        Command::Triangles(a) => estimate(&ctx, EstimatorArg::Triangles, a, m),
        Command::Transitivity(a) => estimate(&ctx, EstimatorArg::Transitivity, a, m),
        Command::Bounds(a) => bounds(&ctx, a),
        Command::Seeds(a) => seeds(&ctx, a, m),
        Command::Nibble(a) => nibble(&ctx, a, m),
        Command::Exact(a) => exact(&ctx, a, m),
        Command::Diptest(a) => diptest(&ctx, a, m),
        Command::SweepRegisters(a) => sweep(&ctx, a, m),
    }
}

struct Ctx<'a> {
    out: Option<&'a Path>,
    verbose: bool,
}

impl Ctx<'_> {
    fn log(&self, msg: impl AsRef<str>) {
        if self.verbose {
            eprintln!("[ballsketch] {}", msg.as_ref());
        }
    }

    fn csv(&self, header: &[&str]) -> Result<Csv> {
        Csv::new(open_out(self.out)?, header)
    }
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|e| Error::Input(format!("{}: {e}", path.display())))
}

fn load_graph(ctx: &Ctx, path: &Path, m: &mut Manifest) -> Result<LoadedGraph> {
    m.graph = Some(path.to_path_buf());
    let lg = load_edgelist(open(path)?)?;
    ctx.log(format!(
        "loaded {} nodes, {} edges ({} duplicates, {} self-loops dropped)",
        lg.graph.node_count(),
        lg.graph.edge_count(),
        lg.duplicates_dropped,
        lg.self_loops_dropped
    ));
    Ok(lg)
}

fn oracle_guard(n: usize, limit: usize) -> Result<()> {
    if n > limit {
        return Err(Error::Config(format!(
            "exact computation refused for {n} nodes (limit {limit}, see --oracle-limit)"
        )));
    }
    Ok(())
}

fn hll_config(s: &SketchArgs, m: &mut Manifest) -> Result<HllConfig> {
    m.hash_seed = Some(s.seed);
    Ok(HllConfig::new(s.bits, s.seed)?.with_small_range_correction(!s.no_small_range_correction))
}

fn exact_stats(lg: &LoadedGraph, radius: usize) -> Vec<Vec<BallStats>> {
    let g = &lg.graph;
    let by_node = oracle::triangles_by_node(g);
    (0..g.node_count())
        .into_par_iter()
        .map(|v| oracle::ball_stats_with(g, &by_node, v, radius).expect("node in range"))
        .collect()
}

fn gen(ctx: &Ctx, a: &GenArgs, m: &mut Manifest) -> Result<()> {
    m.rng_seed = Some(a.seed);
    let params = PlantedPartitionParams { n: a.n, k: a.k, mean_degree: a.mean_degree, mu: a.mu, rng_seed: a.seed };
    let g = generate_planted_partition(&params)?;
    ctx.log(format!("generated {} edges", g.edge_count()));
    let mut out = open_out(ctx.out)?;
    save_edgelist(&g, &mut out)?;
    out.flush()?;
    Ok(())
}

fn read_graphlets(path: &Path, lg: &LoadedGraph) -> Result<GraphletLists> {
    let mut entries = Vec::new();
    for (i, line) in open(path)?.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let parse = |tok: &str| {
            tok.parse::<u64>().map_err(|e| Error::Parse { line: i + 1, message: format!("bad id {tok:?}: {e}") })
        };
        let mut toks = t.split_whitespace();
        let node = parse(toks.next().expect("non-empty line"))?;
        let v = lg
            .dense_id(node)
            .ok_or_else(|| Error::Parse { line: i + 1, message: format!("node {node} is not in the graph") })?;
        entries.push((v, toks.map(parse).collect::<Result<Vec<_>>>()?));
    }
    GraphletLists::new(lg.graph.node_count(), entries)
}

fn balls(ctx: &Ctx, a: &BallsArgs, m: &mut Manifest) -> Result<()> {
    let lg = load_graph(ctx, &a.sketch.graph, m)?;
    let g = &lg.graph;
    let config = hll_config(&a.sketch, m)?;
    if a.oracle.oracle {
        oracle_guard(g.node_count(), a.oracle.oracle_limit)?;
    }
    let kind = match (a.kind, &a.graphlets) {
        (KindArg::Graphlet, Some(p)) => BallKind::Graphlet(Arc::new(read_graphlets(p, &lg)?)),
        (KindArg::Graphlet, None) => return Err(Error::Config("--kind graphlet needs --graphlets".into())),
        (_, Some(_)) => return Err(Error::Config("--graphlets only applies to --kind graphlet".into())),
        (KindArg::Node, None) => BallKind::Node,
        (KindArg::Edge, None) => BallKind::Edge,
        (KindArg::Outedge, None) => BallKind::OutEdge,
        (KindArg::Inedge, None) => BallKind::InEdge,
        (KindArg::Triangle, None) => BallKind::Triangle,
        (KindArg::Wedge, None) => BallKind::Wedge,
    };
    let radius = a.sketch.radius;
    let counters = hyperball::init_counters(g, &kind, config)?;
    let mut last: Option<CounterArray> = None;
    let keep = a.snapshot.is_some();
    let run = hyperball::count_ball_observed::<f64>(g, kind.clone(), counters, radius, |_, c| {
        if keep {
            last = Some(c.clone());
        }
        Ok(())
    })?;
    if let Some(r) = run.stop_radius {
        ctx.log(format!("counters stable from radius {r}"));
    }
    if let (Some(path), Some(c)) = (&a.snapshot, &last) {
        c.write_snapshot(std::io::BufWriter::new(File::create(path)?))?;
    }

    let mut header = vec!["node", "radius", "estimate"];
    let exact: Option<Vec<Vec<usize>>> = if a.oracle.oracle {
        header.push("exact");
        Some(
            (0..g.node_count())
                .into_par_iter()
                .map(|v| {
                    (0..=radius)
                        .map(|r| oracle::ball_item_set(g, &kind, v, r).map(|s| s.len()))
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?,
        )
    } else {
        None
    };
    let mut csv = ctx.csv(&header)?;
    for v in 0..g.node_count() {
        for r in 0..=radius {
            let mut row = vec![lg.original_ids[v].to_string(), r.to_string(), num(Some(run.get(v, r)))];
            if let Some(e) = &exact {
                row.push(e[v][r].to_string());
            }
            csv.row(row)?;
        }
    }
    csv.finish()
}

fn estimate(ctx: &Ctx, which: EstimatorArg, a: &EstimateArgs, m: &mut Manifest) -> Result<()> {
    let lg = load_graph(ctx, &a.sketch.graph, m)?;
    let g = &lg.graph;
    let config = hll_config(&a.sketch, m)?;
    if a.oracle.oracle {
        oracle_guard(g.node_count(), a.oracle.oracle_limit)?;
    }
    let radius = a.sketch.radius;
    let p = config.registers();
    let runs = |kinds: &[BallKind]| {
        kinds.iter().map(|k| hyperball::run::<f64>(g, k.clone(), radius, config)).collect::<Result<Vec<_>>>()
    };
    let kinds: &[BallKind] = match which {
        EstimatorArg::Conductance => &[BallKind::Edge, BallKind::OutEdge],
        EstimatorArg::Triangles => &[BallKind::Triangle],
        EstimatorArg::Transitivity => &[BallKind::Triangle, BallKind::Wedge],
    };
    let runs = runs(kinds)?;
    let n = g.node_count();

    // (estimate, intervals) per node; None when the ratio is undefined
    type Row = Option<(f64, ConfidenceInterval<f64>, ConfidenceInterval<f64>)>;
    let rows: Vec<Row> = (0..n)
        .map(|v| -> Result<Row> {
            let x = runs[0].get(v, radius);
            let (value, pair) = match which {
                EstimatorArg::Triangles => (x, estimators::triangle_intervals_at(x, p, a.confidence)?),
                EstimatorArg::Conductance | EstimatorArg::Transitivity => {
                    let y = runs[1].get(v, radius);
                    let value = if which == EstimatorArg::Conductance {
                        estimators::estimate_conductance(x, y, false)
                    } else {
                        estimators::estimate_transitivity(x, y, false)
                    };
                    let Ok(value) = value else { return Ok(None) };
                    (value, estimators::ratio_intervals_at(x, y, value, p, a.confidence)?)
                }
            };
            Ok(Some((value, pair.0, pair.1)))
        })
        .collect::<Result<_>>()?;

    let unimodal = if a.dip_trials > 0 {
        m.rng_seed = Some(a.rng_seed);
        let values: Vec<f64> = rows.iter().flatten().map(|r| r.0).collect();
        let d = dip_test(&values, a.dip_trials, a.rng_seed)?;
        ctx.log(format!("dip {:.6}, p-value {:.4} over {} replicates", d.dip, d.p_value, d.trials));
        Some(d.p_value >= 0.05)
    } else {
        None
    };

    let exact = a.oracle.oracle.then(|| exact_stats(&lg, radius));
    let mut header = vec!["node", "radius", "estimate"];
    if exact.is_some() {
        header.push("exact");
    }
    header.extend(["cheb_lo", "cheb_hi", "vp_lo", "vp_hi", "confidence", "plug_in_flag", "unimodal"]);
    let mut csv = ctx.csv(&header)?;
    for (v, row) in rows.iter().enumerate() {
        let mut fields = vec![lg.original_ids[v].to_string(), radius.to_string()];
        let est = row.as_ref().map(|r| if a.clamp { r.0.clamp(0.0, 1.0) } else { r.0 });
        fields.push(num(est));
        if let Some(stats) = &exact {
            let s = &stats[v][radius];
            fields.push(num(match which {
                EstimatorArg::Conductance => s.conductance(),
                EstimatorArg::Triangles => Some(s.triangles_touching as f64),
                EstimatorArg::Transitivity => s.transitivity(),
            }));
        }
        match row {
            Some((_, c, vp)) => {
                let vp = vp.with_plug_in(true).with_unimodality(unimodal == Some(true));
                fields.extend([
                    num(Some(c.lo)),
                    num(Some(c.hi)),
                    num(Some(vp.lo)),
                    num(Some(vp.hi)),
                    num(Some(a.confidence)),
                    "true".into(),
                ]);
            }
            None => fields.extend(["", "", "", "", ""].map(String::from).into_iter().chain(["true".into()])),
        }
        fields.push(unimodal.map_or(String::new(), |u| u.to_string()));
        csv.row(fields)?;
    }
    csv.finish()
}

fn bounds(ctx: &Ctx, a: &BoundsArgs) -> Result<()> {
    let p = HllConfig::new(a.bits, 0)?.registers();
    let eta: f64 = estimators::eta(p)?;
    let (value, cheb, vp) = match a.estimator {
        EstimatorArg::Triangles => {
            let (c, v) = match a.width1 {
                Some(w) => (
                    estimators::chebyshev_triangle_interval(a.num, p, w)?,
                    estimators::vp_triangle_interval(a.num, p, w)?,
                ),
                None => estimators::triangle_intervals_at(a.num, p, a.confidence)?,
            };
            (a.num, c, v)
        }
        EstimatorArg::Conductance | EstimatorArg::Transitivity => {
            let den = a.den.ok_or_else(|| Error::Config("--den is required for ratio estimators".into()))?;
            let conductance = a.estimator == EstimatorArg::Conductance;
            let value = match a.value {
                Some(v) => v,
                None if conductance => estimators::estimate_conductance(a.num, den, false)?,
                None => estimators::estimate_transitivity(a.num, den, false)?,
            };
            let (c, v) = match (a.width1, a.width2) {
                (Some(w1), Some(w2)) if conductance => (
                    estimators::chebyshev_conductance_interval(a.num, den, value, p, w1, w2)?,
                    estimators::vp_conductance_interval(a.num, den, value, p, w1, w2)?,
                ),
                (Some(w1), Some(w2)) => (
                    estimators::chebyshev_transitivity_interval(a.num, den, value, p, w1, w2)?,
                    estimators::vp_transitivity_interval(a.num, den, value, p, w1, w2)?,
                ),
                (Some(_), None) => return Err(Error::Config("--width2 is required for ratio estimators".into())),
                _ => estimators::ratio_intervals_at(a.num, den, value, p, a.confidence)?,
            };
            (value, c, v)
        }
    };
    let name = match a.estimator {
        EstimatorArg::Conductance => "conductance",
        EstimatorArg::Triangles => "triangles",
        EstimatorArg::Transitivity => "transitivity",
    };
    let mut csv = ctx.csv(&[
        "estimator",
        "registers",
        "eta",
        "value",
        "cheb_lo",
        "cheb_hi",
        "cheb_confidence",
        "vp_lo",
        "vp_hi",
        "vp_confidence",
    ])?;
    csv.row([
        name.to_string(),
        p.to_string(),
        num(Some(eta)),
        num(Some(value)),
        num(Some(cheb.lo)),
        num(Some(cheb.hi)),
        num(Some(cheb.confidence_lower_bound)),
        num(Some(vp.lo)),
        num(Some(vp.hi)),
        num(Some(vp.confidence_lower_bound)),
    ])?;
    csv.finish()
}

fn parse_criterion(s: &str, default_radius: usize, rng_seed: u64) -> Result<SeedCriterion> {
    let (name, radius) = match s.split_once(':') {
        Some((n, r)) => {
            let r = r.parse::<usize>().map_err(|_| Error::Config(format!("bad radius in criterion {s:?}")))?;
            (n, r)
        }
        None => (s, default_radius),
    };
    Ok(match name {
        "phi-min" => SeedCriterion::PhiMin(radius),
        "triangle-max" => SeedCriterion::TriangleMax(radius),
        "transitivity-max" => SeedCriterion::TransitivityMax(radius),
        "degree-max" => SeedCriterion::DegreeMax,
        "random" => SeedCriterion::Random(rng_seed),
        _ => return Err(Error::Config(format!("unknown seed criterion {name:?}"))),
    })
}

/// Seed sets for the given criteria, computing sketch scores only when needed.
fn criterion_sets(
    lg: &LoadedGraph,
    criteria: &[SeedCriterion],
    k: usize,
    config: HllConfig,
) -> Result<Vec<(String, Vec<usize>)>> {
    let max_radius = criteria.iter().filter_map(|c| c.radius()).max();
    let scores = max_radius.map(|r| ClusterScores::compute(&lg.graph, r, config)).transpose()?;
    criteria.iter().map(|&c| Ok((c.to_string(), community::select_seeds(scores.as_ref(), &lg.graph, c, k)?))).collect()
}

fn seeds(ctx: &Ctx, a: &SeedsArgs, m: &mut Manifest) -> Result<()> {
    let lg = load_graph(ctx, &a.sketch.graph, m)?;
    let config = hll_config(&a.sketch, m)?;
    let criterion = parse_criterion(&a.criterion, a.sketch.radius, a.rng_seed)?;
    if let SeedCriterion::Random(s) = criterion {
        m.rng_seed = Some(s);
    }
    let sets = criterion_sets(&lg, &[criterion], a.k, config)?;
    let mut csv = ctx.csv(&["rank", "node"])?;
    for (i, &v) in sets[0].1.iter().enumerate() {
        csv.row([(i + 1).to_string(), lg.original_ids[v].to_string()])?;
    }
    csv.finish()
}

fn read_seed_file(path: &Path, lg: &LoadedGraph) -> Result<Vec<usize>> {
    let mut seeds = Vec::new();
    for (i, line) in open(path)?.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let id =
            t.parse::<u64>().map_err(|e| Error::Parse { line: i + 1, message: format!("bad node id {t:?}: {e}") })?;
        seeds.push(
            lg.dense_id(id)
                .ok_or_else(|| Error::Parse { line: i + 1, message: format!("node {id} is not in the graph") })?,
        );
    }
    Ok(seeds)
}

fn nibble(ctx: &Ctx, a: &NibbleArgs, m: &mut Manifest) -> Result<()> {
    let lg = load_graph(ctx, &a.sketch.graph, m)?;
    let config = hll_config(&a.sketch, m)?;
    m.rng_seed = Some(a.rng_seed);
    let cfg = PprConfig { alpha: a.alpha, epsilon: a.epsilon, max_cut_size: a.max_cut, half_volume: !a.no_half_volume };
    cfg.validate()?;
    let mut sets = Vec::new();
    if let Some(path) = &a.seeds {
        let name = path.file_name().map_or("seeds".into(), |n| n.to_string_lossy().into_owned());
        sets.push((name, read_seed_file(path, &lg)?));
    }
    let criteria =
        a.criterion.iter().map(|c| parse_criterion(c, a.sketch.radius, a.rng_seed)).collect::<Result<Vec<_>>>()?;
    sets.extend(criterion_sets(&lg, &criteria, a.k.min(lg.graph.node_count()), config)?);
    if sets.is_empty() {
        return Err(Error::Config("give --seeds FILE or at least one --criterion".into()));
    }
    let evaluations = community::evaluate_seed_sets(&lg.graph, &sets, &cfg)?;

    let mut csv = ctx.csv(&["set", "seed", "best_size", "best_conductance"])?;
    for ev in &evaluations {
        for r in &ev.results {
            csv.row([
                ev.name.clone(),
                lg.original_ids[r.seed].to_string(),
                r.best_size.to_string(),
                num(Some(r.best_conductance)),
            ])?;
        }
    }
    csv.finish()?;

    let summary_path: Option<PathBuf> = a.summary.clone().or_else(|| {
        ctx.out.map(|o| {
            let mut s = o.as_os_str().to_owned();
            s.push(".summary.csv");
            PathBuf::from(s)
        })
    });
    let sink: Box<dyn std::io::Write> = match &summary_path {
        Some(p) => open_out(Some(p))?,
        None => Box::new(std::io::stderr()),
    };
    let mut summary = Csv::new(sink, &["set", "seeds", "min", "q1", "median", "q3", "max"])?;
    for ev in &evaluations {
        let s = ev.summary;
        summary.row(
            [ev.name.clone(), ev.results.len().to_string()]
                .into_iter()
                .chain([s.min, s.q1, s.median, s.q3, s.max].map(|x| num(Some(x)))),
        )?;
    }
    summary.finish()
}

fn exact(ctx: &Ctx, a: &ExactArgs, m: &mut Manifest) -> Result<()> {
    let lg = load_graph(ctx, &a.graph, m)?;
    oracle_guard(lg.graph.node_count(), a.oracle_limit)?;
    let stats = exact_stats(&lg, a.radius);
    let mut csv = ctx.csv(&[
        "node",
        "radius",
        "ball_size",
        "edgeball",
        "out_edgeball",
        "in_edgeball",
        "boundary",
        "volume",
        "conductance",
        "triangles_touching",
        "wedges_centered",
        "transitivity",
    ])?;
    for (v, row) in stats.iter().enumerate() {
        for s in row {
            csv.row([
                lg.original_ids[v].to_string(),
                s.radius.to_string(),
                s.ball_size.to_string(),
                s.edgeball.to_string(),
                s.out_edgeball.to_string(),
                s.in_edgeball.to_string(),
                s.boundary.to_string(),
                s.volume.to_string(),
                num(s.conductance()),
                s.triangles_touching.to_string(),
                s.wedges_centered.to_string(),
                num(s.transitivity()),
            ])?;
        }
    }
    csv.finish()
}

fn read_samples(path: &Path) -> Result<Vec<f64>> {
    let mut values = Vec::new();
    for (i, line) in open(path)?.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        for tok in t.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()) {
            values.push(
                tok.parse::<f64>()
                    .map_err(|e| Error::Parse { line: i + 1, message: format!("bad number {tok:?}: {e}") })?,
            );
        }
    }
    Ok(values)
}

fn diptest(ctx: &Ctx, a: &DiptestArgs, m: &mut Manifest) -> Result<()> {
    m.rng_seed = Some(a.rng_seed);
    let values = match (&a.input, &a.graph) {
        (Some(p), _) => read_samples(p)?,
        (None, Some(p)) => {
            let lg = load_graph(ctx, p, m)?;
            m.hash_seed = Some(a.seed);
            let config = HllConfig::new(a.bits, a.seed)?;
            let scores = ClusterScores::compute(&lg.graph, a.radius, config)?;
            (0..lg.graph.node_count())
                .map(|v| match a.statistic {
                    StatisticArg::Conductance => scores.phi(v, a.radius),
                    StatisticArg::Transitivity => scores.transitivity(v, a.radius),
                })
                .filter(|x| x.is_finite())
                .collect()
        }
        (None, None) => return Err(Error::Config("give --input FILE or --graph FILE".into())),
    };
    let r = dip_test(&values, a.trials, a.rng_seed)?;
    let mut csv = ctx.csv(&["n", "dip", "p_value", "trials"])?;
    csv.row([values.len().to_string(), num(Some(r.dip)), num(Some(r.p_value)), r.trials.to_string()])?;
    csv.finish()
}

fn sweep(ctx: &Ctx, a: &SweepArgs, m: &mut Manifest) -> Result<()> {
    m.rng_seed = Some(a.rng_seed);
    m.hash_seed = Some(a.seed);
    let params = RegisterSweepParams {
        bits: a.bits.clone(),
        trials: a.trials,
        graph: PlantedPartitionParams { n: a.n, k: a.k, mean_degree: a.mean_degree, mu: a.mu, rng_seed: a.rng_seed },
        radius: a.radius,
        confidence: a.confidence,
        hash_seed: a.seed,
    };
    let rows = register_sweep(&params)?;
    let mut csv =
        ctx.csv(&["bits", "vp_bound", "cheb_bound", "mean_error", "mean_abs_error", "var_error", "samples"])?;
    for r in rows {
        csv.row(
            [r.bits.to_string()]
                .into_iter()
                .chain([r.vp_bound, r.cheb_bound, r.mean_error, r.mean_abs_error, r.var_error].map(|x| num(Some(x))))
                .chain([r.samples.to_string()]),
        )?;
    }
    csv.finish()
}
