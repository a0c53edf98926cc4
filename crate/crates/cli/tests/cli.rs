use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn thresh(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_thresh"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn envelope_echoes_seed_version_and_params() {
    let out = thresh(&[
        "--seed",
        "7",
        "evaluate",
        "--scheme",
        "dicut7",
        "--dist",
        "and_biases4",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["command"], "evaluate");
    assert_eq!(v["seed"], 7);
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(v["params"]["scheme"], "dicut7");
    let r = &v["result"];
    let ratio = r["soundness"].as_f64().unwrap() / r["completeness"].as_f64().unwrap();
    assert!((ratio - r["ratio"].as_f64().unwrap()).abs() < 1e-12);
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(thresh(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(
        thresh(&["evaluate", "--scheme", "nope", "--dist", "dicut_pairs1"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        thresh(&["upper-bound", "--p1", "0.2"]).status.code(),
        Some(1)
    );
    assert_eq!(
        thresh(&["verify", "--scheme", "dicut7", "--alpha", "1.5"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(thresh(&["--help"]).status.code(), Some(0));
}

#[test]
fn verify_exit_codes() {
    let region = "0.1,0.25,0.1,0.25,-0.8,-0.5";
    let cx = thresh(&[
        "verify", "--scheme", "dicut7", "--alpha", "0.876", "--floor", "0.05", "--region", region,
    ]);
    assert_eq!(cx.status.code(), Some(2));
    let v = json(&cx);
    assert_eq!(v["result"]["verdict"], "counterexample");
    assert!(v["result"]["counterexample"]["ratio"].as_f64().unwrap() < 0.876);

    let budget = thresh(&[
        "verify",
        "--scheme",
        "dicut7",
        "--alpha",
        "0.8744",
        "--budget-boxes",
        "50",
    ]);
    assert_eq!(budget.status.code(), Some(3));
    assert_eq!(json(&budget)["result"]["verdict"], "budget_exhausted");

    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let ok = thresh(&[
        "verify",
        "--scheme",
        "dicut7",
        "--alpha",
        "0.87",
        "--floor",
        "0.05",
        "--region",
        "0.15,0.2,0.15,0.2,-0.7,-0.6",
        "--out",
        path(&report),
    ]);
    assert_eq!(ok.status.code(), Some(0));
    let saved: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(saved["verdict"], "certified");
    assert!(saved.get("counterexample").is_none());
}

#[test]
fn upper_bound_reports_critical_point() {
    let v = json(&thresh(&["upper-bound"]));
    let r = &v["result"];
    assert!((r["t0"].as_f64().unwrap() - 0.1887837358).abs() < 1e-6);
    assert!((r["ratio"].as_f64().unwrap() - 0.8746024732).abs() < 1e-6);
    assert_eq!(r["rigor"], "none");
}

#[test]
fn discover_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let o = thresh(&[
            "--seed",
            "3",
            "discover",
            "--mode",
            "dicut",
            "--T",
            "3",
            "--T-prime",
            "1",
            "--restarts",
            "2",
            "--out",
            path(&out),
        ]);
        assert_eq!(
            o.status.code(),
            Some(0),
            "{}",
            String::from_utf8_lossy(&o.stderr)
        );
        (std::fs::read(&out).unwrap(), json(&o))
    };
    let (a, va) = run("a.scheme");
    let (b, _) = run("b.scheme");
    assert_eq!(a, b);
    let log = std::fs::read_to_string(va["result"]["log"].as_str().unwrap()).unwrap();
    for line in log.lines() {
        let rec: Value = serde_json::from_str(line).unwrap();
        assert!(rec["alpha"].is_f64());
    }
    let eval = thresh(&[
        "evaluate",
        "--scheme",
        path(&dir.path().join("a.scheme")),
        "--dist",
        "dicut_family",
    ]);
    assert_eq!(eval.status.code(), Some(0));
}

#[test]
fn discover_2and_yields_odd_functions() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("and.scheme");
    let o = thresh(&[
        "discover",
        "--mode",
        "2and",
        "--T",
        "2",
        "--T-prime",
        "1",
        "--restarts",
        "2",
        "--out",
        path(&out),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["result"]["odd"], true);
}

#[test]
fn contour_writes_row_major_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("s.csv");
    let o = thresh(&[
        "contour",
        "--x",
        "-1,1",
        "--y",
        "-1,1",
        "--step",
        "0.01",
        "--out",
        path(&csv),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t1,t2,value"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 201 * 201);
    assert_eq!(rows[200][0], rows[0][0]);
    assert!(rows[201][0] > rows[200][0]);
    assert!(rows[1][1] > rows[0][1]);
    let ex = &json(&o)["result"]["extreme"];
    assert!((ex["x"].as_f64().unwrap() + 0.1887837358).abs() < 0.006);
    assert!((ex["y"].as_f64().unwrap() - 0.1887837358).abs() < 0.006);
}

#[test]
fn round_runs_on_files_and_demo() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("g.dicut");
    std::fs::write(&inst, "# a directed triangle\n0 1 1\n1 2 1\n2 0 1\n").unwrap();
    let demo = thresh(&[
        "round",
        "--instance",
        path(&inst),
        "--scheme",
        "dicut7",
        "--samples",
        "200",
    ]);
    assert_eq!(demo.status.code(), Some(0));
    let v = json(&demo);
    assert_eq!(v["result"]["canonical"], false);
    let e = v["result"]["expected_cut"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&e));

    let vecs = dir.path().join("g.vecs");
    std::fs::write(&vecs, "2 3\n1 0\n1 0\n-1 0\n0 1\n").unwrap();
    let o = thresh(&[
        "round",
        "--instance",
        path(&inst),
        "--vectors",
        path(&vecs),
        "--scheme",
        "llz1",
        "--samples",
        "10",
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    assert_eq!(json(&o)["result"]["canonical"], true);

    std::fs::write(&inst, "0 1 -2\n").unwrap();
    assert_eq!(
        thresh(&["round", "--instance", path(&inst), "--scheme", "dicut7"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn same_seed_same_output() {
    let args = [
        "--seed",
        "5",
        "upper-bound",
        "--table",
        "and_pair",
        "--restarts",
        "4",
    ];
    assert_eq!(thresh(&args).stdout, thresh(&args).stdout);
}
