use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_ballsketch"));
    c.env_remove("BALLSKETCH_THREADS");
    c
}

fn run(dir: &Path, args: &[&str]) -> Output {
    bin().current_dir(dir).args(args).output().expect("spawn")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let o = run(dir, args);
    assert!(o.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout).unwrap()
}

fn small_graph(dir: &Path) -> PathBuf {
    ok(dir, &["gen", "--n", "120", "--k", "4", "--mu", "0.2", "--mean-degree", "6", "--seed", "7", "--out", "g.txt"]);
    dir.join("g.txt")
}

fn rows(csv: &str) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_reader(csv.as_bytes());
    let mut out = vec![r.headers().unwrap().iter().map(String::from).collect()];
    out.extend(r.records().map(|x| x.unwrap().iter().map(String::from).collect()));
    out
}

#[test]
fn gen_is_deterministic() {
    let d = tempfile::tempdir().unwrap();
    let args = ["gen", "--n", "100", "--k", "5", "--mu", "0.3", "--mean-degree", "5", "--seed", "11"];
    let a = ok(d.path(), &args);
    let b = ok(d.path(), &args);
    assert_eq!(a, b);
    assert!(a.lines().count() > 100);
}

#[test]
fn exit_codes() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(run(d.path(), &["no-such-command"]).status.code(), Some(64));
    assert_eq!(run(d.path(), &["balls"]).status.code(), Some(64));
    assert_eq!(run(d.path(), &["balls", "--graph", "missing.txt"]).status.code(), Some(2));

    fs::write(d.path().join("bad.txt"), "0 1\n1 two\n").unwrap();
    let o = run(d.path(), &["balls", "--graph", "bad.txt"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));

    small_graph(d.path());
    assert_eq!(run(d.path(), &["balls", "--graph", "g.txt", "--bits", "2"]).status.code(), Some(3));
    assert_eq!(run(d.path(), &["conductance", "--graph", "g.txt", "--confidence", "0.5"]).status.code(), Some(3));
    assert_eq!(run(d.path(), &["--threads", "0", "exact", "--graph", "g.txt"]).status.code(), Some(3));
    let o = bin()
        .current_dir(d.path())
        .env("BALLSKETCH_THREADS", "lots")
        .args(["exact", "--graph", "g.txt"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn oracle_guard_refuses_large_graphs() {
    let d = tempfile::tempdir().unwrap();
    small_graph(d.path());
    let o = run(d.path(), &["exact", "--graph", "g.txt", "--oracle-limit", "50"]);
    assert_eq!(o.status.code(), Some(3));
    let o = run(d.path(), &["conductance", "--graph", "g.txt", "--oracle", "--oracle-limit", "50"]);
    assert_eq!(o.status.code(), Some(3));
    ok(d.path(), &["exact", "--graph", "g.txt", "--oracle-limit", "120"]);
}

#[test]
fn exact_csv_on_triangle_with_tail() {
    let d = tempfile::tempdir().unwrap();
    fs::write(d.path().join("t.txt"), "10 20\n20 30\n30 10\n30 40\n").unwrap();
    let t = rows(&ok(d.path(), &["exact", "--graph", "t.txt", "--radius", "1"]));
    assert_eq!(
        t[0],
        [
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
            "transitivity"
        ]
    );
    assert_eq!(t.len(), 1 + 4 * 2);
    // node 40 at radius 0: one edge out, nothing inside
    let r = t.iter().find(|r| r[0] == "40" && r[1] == "0").unwrap();
    assert_eq!(&r[2..9], ["1", "1", "1", "1", "1", "1", "1"]);
    // node 30 at radius 1 covers the whole graph
    let r = t.iter().find(|r| r[0] == "30" && r[1] == "1").unwrap();
    assert_eq!(r[2], "4");
    assert_eq!(r[6], "0");
    assert_eq!(r[8], "0");
    assert_eq!(r[9], "1");
}

#[test]
fn output_is_independent_of_thread_count() {
    let d = tempfile::tempdir().unwrap();
    small_graph(d.path());
    for args in [
        &["conductance", "--graph", "g.txt", "--radius", "2", "--dip-trials", "100", "--oracle"][..],
        &["nibble", "--graph", "g.txt", "--criterion", "phi-min,random", "--k", "8", "--summary", "s.csv"][..],
        &["diptest", "--graph", "g.txt", "--trials", "200", "--rng-seed", "4"][..],
    ] {
        let one = ok(d.path(), &[&["--threads", "1"][..], args].concat());
        let many = ok(d.path(), &[&["--threads", "4"][..], args].concat());
        assert_eq!(one, many, "{args:?}");
    }
}

#[test]
fn balls_exact_column_and_snapshot() {
    let d = tempfile::tempdir().unwrap();
    small_graph(d.path());
    let t = rows(&ok(
        d.path(),
        &["balls", "--graph", "g.txt", "--radius", "2", "--bits", "12", "--oracle", "--snapshot", "s.hllb"],
    ));
    assert_eq!(t[0], ["node", "radius", "estimate", "exact"]);
    assert_eq!(t.len(), 1 + 120 * 3);
    for r in &t[1..] {
        let est: f64 = r[2].parse().unwrap();
        let exact: f64 = r[3].parse().unwrap();
        assert!((est - exact).abs() <= 0.1 * exact + 1.0, "{r:?}");
    }
    assert!(fs::read(d.path().join("s.hllb")).unwrap().starts_with(b"HLLB"));
}

#[test]
fn graphlet_kind_needs_a_file() {
    let d = tempfile::tempdir().unwrap();
    fs::write(d.path().join("t.txt"), "1 2\n2 3\n").unwrap();
    assert_eq!(run(d.path(), &["balls", "--graph", "t.txt", "--kind", "graphlet"]).status.code(), Some(3));
    fs::write(d.path().join("gl.txt"), "1 7 8\n2 8\n3 9\n").unwrap();
    let t =
        rows(&ok(d.path(), &["balls", "--graph", "t.txt", "--kind", "graphlet", "--graphlets", "gl.txt", "--oracle"]));
    let r = t.iter().find(|r| r[0] == "2" && r[1] == "1").unwrap();
    assert_eq!(r[3], "3");
    fs::write(d.path().join("gl.txt"), "5 7\n").unwrap();
    let o = run(d.path(), &["balls", "--graph", "t.txt", "--kind", "graphlet", "--graphlets", "gl.txt"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bounds_calculator() {
    let d = tempfile::tempdir().unwrap();
    let t = rows(&ok(
        d.path(),
        &["bounds", "--estimator", "conductance", "--num", "1000", "--den", "600", "--confidence", "0.9"],
    ));
    assert_eq!(t[1][0], "conductance");
    assert_eq!(t[1][1], "16384");
    let value: f64 = t[1][3].parse().unwrap();
    assert!((value - 1400.0 / 600.0).abs() < 1e-12);
    let (lo, hi): (f64, f64) = (t[1][4].parse().unwrap(), t[1][5].parse().unwrap());
    assert!(lo < value && value < hi);
    assert_eq!(run(d.path(), &["bounds", "--estimator", "transitivity", "--num", "5"]).status.code(), Some(3));
}

#[test]
fn sweep_registers_columns() {
    let d = tempfile::tempdir().unwrap();
    let t = rows(&ok(
        d.path(),
        &["sweep-registers", "--bits", "6,10", "--trials", "2", "--n", "100", "--k", "4", "--mean-degree", "6"],
    ));
    assert_eq!(t[0], ["bits", "vp_bound", "cheb_bound", "mean_error", "mean_abs_error", "var_error", "samples"]);
    assert_eq!(t.len(), 3);
    let err = |i: usize| t[i][4].parse::<f64>().unwrap();
    assert!(err(2) < err(1));
    assert_eq!(t[1][6], "200");
}

#[test]
fn manifest_sidecar() {
    let d = tempfile::tempdir().unwrap();
    small_graph(d.path());
    ok(d.path(), &["--manifest", "m.json", "--out", "o.csv", "seeds", "--graph", "g.txt", "--seed", "9", "--k", "5"]);
    let m: serde_json::Value = serde_json::from_slice(&fs::read(d.path().join("m.json")).unwrap()).unwrap();
    assert_eq!(m["subcommand"], "seeds");
    assert_eq!(m["hash_seed"], 9);
    assert_eq!(m["graph"], "g.txt");
    assert!(m["threads"].as_u64().unwrap() >= 1);
    assert!(m["duration_secs"].as_f64().is_some());
    let seeds = rows(&fs::read_to_string(d.path().join("o.csv")).unwrap());
    assert_eq!(seeds.len(), 6);
}

#[test]
fn nibble_from_seed_file_and_summary_sidecar() {
    let d = tempfile::tempdir().unwrap();
    small_graph(d.path());
    fs::write(d.path().join("seeds.txt"), "# picked by hand\n0\n5\n").unwrap();
    ok(
        d.path(),
        &[
            "--out",
            "n.csv",
            "nibble",
            "--graph",
            "g.txt",
            "--seeds",
            "seeds.txt",
            "--criterion",
            "degree-max",
            "--k",
            "3",
        ],
    );
    let per_seed = rows(&fs::read_to_string(d.path().join("n.csv")).unwrap());
    assert_eq!(per_seed.len(), 1 + 2 + 3);
    assert!(per_seed[1..3].iter().all(|r| r[0] == "seeds.txt"));
    let summary = rows(&fs::read_to_string(d.path().join("n.csv.summary.csv")).unwrap());
    assert_eq!(summary[0], ["set", "seeds", "min", "q1", "median", "q3", "max"]);
    assert_eq!(summary[2][0], "degree-max");
    fs::write(d.path().join("seeds.txt"), "99999\n").unwrap();
    let o = run(d.path(), &["nibble", "--graph", "g.txt", "--seeds", "seeds.txt"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn diptest_on_sample_file() {
    let d = tempfile::tempdir().unwrap();
    fs::write(d.path().join("x.txt"), "0.1\n0.2\n0.5\n0.9\n1.3\n5\n5.2\n5.3\n").unwrap();
    let t = rows(&ok(d.path(), &["diptest", "--input", "x.txt", "--trials", "100"]));
    assert_eq!(t[1][0], "8");
    assert!((t[1][1].parse::<f64>().unwrap() - 0.1734375).abs() < 1e-12);
    assert_eq!(t[1][3], "100");
}

#[test]
fn conductance_csv_with_oracle() {
    let d = tempfile::tempdir().unwrap();
    small_graph(d.path());
    let t = rows(&ok(d.path(), &["conductance", "--graph", "g.txt", "--bits", "14", "--oracle"]));
    assert_eq!(
        t[0],
        [
            "node",
            "radius",
            "estimate",
            "exact",
            "cheb_lo",
            "cheb_hi",
            "vp_lo",
            "vp_hi",
            "confidence",
            "plug_in_flag",
            "unimodal"
        ]
    );
    assert_eq!(t.len(), 121);
    let inside = t[1..]
        .iter()
        .filter(|r| {
            let f = |i: usize| r[i].parse::<f64>().unwrap();
            f(6) <= f(3) && f(3) <= f(7)
        })
        .count();
    assert!(inside >= 108, "{inside}/120");
}
