use std::path::Path;
use std::process::{Command, Output};

fn run(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_blockmodel-lab"))
        .arg("--out")
        .arg(out)
        .args(args)
        .env("RUST_LOG", "error")
        .output()
        .unwrap()
}

fn metrics(dir: &Path) -> Vec<(String, String)> {
    let mut r = csv::Reader::from_path(dir.join("metrics.csv")).unwrap();
    let header = r.headers().unwrap().clone();
    let row = r.records().next().unwrap().unwrap();
    header.iter().map(String::from).zip(row.iter().map(String::from)).collect()
}

fn column<'a>(m: &'a [(String, String)], name: &str) -> &'a str {
    &m.iter().find(|(k, _)| k == name).unwrap().1
}

#[test]
fn generate_attack_and_recover() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g");
    let o = run(&g, &["gen", "--n", "1000", "--k", "2", "--d", "60", "--seed", "3"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let edges = std::fs::read_to_string(g.join("graph.edges")).unwrap();
    let labels = std::fs::read_to_string(g.join("labels.txt")).unwrap();
    let again = dir.path().join("again");
    run(&again, &["gen", "--n", "1000", "--k", "2", "--d", "60", "--seed", "3"]);
    assert_eq!(std::fs::read_to_string(again.join("graph.edges")).unwrap(), edges);

    let a = dir.path().join("a");
    let (ge, gl) = (g.join("graph.edges"), g.join("labels.txt"));
    let o = run(
        &a,
        &["attack", "--graph", ge.to_str().unwrap(), "--truth", gl.to_str().unwrap(), "--strategy", "random_rewire", "--d", "60", "--eta", "0.01"],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(std::fs::read_to_string(a.join("corrupted.txt")).unwrap().lines().count(), 10);
    assert_eq!(std::fs::read_to_string(a.join("labels.txt")).unwrap(), labels);

    let with = dir.path().join("with");
    let ae = a.join("graph.edges");
    let o = run(&with, &["pipeline", "--graph", ae.to_str().unwrap(), "--truth", gl.to_str().unwrap(), "--d", "60"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let m = metrics(&with);
    assert_eq!(column(&m, "status"), "ok");
    let e: f64 = column(&m, "final_error").parse().unwrap();
    assert!(e < 0.05, "{e}");
    for c in ["init_error", "bisection_error", "recursive_error"] {
        assert!(column(&m, c).parse::<f64>().is_ok(), "{c} empty");
    }
    assert!(with.join("recovered.txt").exists());

    let blind = dir.path().join("blind");
    let o = run(&blind, &["pipeline", "--graph", ae.to_str().unwrap(), "--k", "2", "--d", "60"]);
    assert!(o.status.success());
    let m = metrics(&blind);
    for c in ["init_error", "bisection_error", "recursive_error", "final_error", "log_error"] {
        assert_eq!(column(&m, c), "", "{c} should be empty");
    }
}

#[test]
fn stats_verify_exits_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["stats-verify", "--trials", "10000"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    assert!(String::from_utf8_lossy(&o.stdout).contains("0 violations"));
    let text = std::fs::read_to_string(dir.path().join("stats.csv")).unwrap();
    assert_eq!(text.lines().count(), 33);
}

#[test]
fn bench_writes_reproducible_results() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.toml");
    std::fs::write(&cfg, "seed = 5\ntrials = 2\n[model]\nn = 800\nk = 2\neps = 1.0\nc_over_k = [3.0, 5.0]\n").unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let o = run(out, &["bench", "--config", cfg.to_str().unwrap(), "--workers", "2"]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    for f in ["results.csv", "plotdata.csv", "config.resolved.toml"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }
    assert_eq!(std::fs::read_to_string(a.join("results.csv")).unwrap().lines().count(), 5);
    assert!(a.join("timings.csv").exists());
}

#[test]
fn bad_config_names_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "[model]\nn = 800\nk = 6\nd = 10.0\neps = 1.0\n").unwrap();
    let o = run(dir.path(), &["bench", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("model.k"));
}
