use std::path::PathBuf;
use std::process::{Command, Output};

use k2lab::lab::report::read_json;
use k2lab::{parse_poly, FieldSpec};

fn k2lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_k2lab"))
        .args(args)
        .env_remove("K2LAB_WORKERS")
        .env_remove("K2LAB_Q")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("k2lab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn symbol_example() {
    let o = k2lab(&["symbol", "--q", "3", "--top", "T", "--bottom", "T+1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "-1");
}

#[test]
fn k2_examples_and_even_degree() {
    let o = k2lab(&["k2", "--q", "3", "--D", "T"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "1");
    let o = k2lab(&["k2", "--q", "3", "--D", "T^2"]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert_eq!(err.lines().count(), 1);
    assert!(err.starts_with("k2lab: error[even-degree]:"), "{err}");
}

#[test]
fn lpoly_prints_coefficients() {
    let o = k2lab(&["lpoly", "--q", "3", "--D", "T^3+T+1"]);
    assert_eq!(o.status.code(), Some(0));
    let cs: Vec<i64> = stdout(&o).split_whitespace().map(|c| c.parse().unwrap()).collect();
    assert_eq!(cs.len(), 3);
    assert_eq!(cs[2], 3 * cs[0]);
}

#[test]
fn usage_and_parse_errors_exit_2() {
    for args in [
        vec!["frobnicate"],
        vec!["symbol", "--q", "4", "--top", "T", "--bottom", "T"],
        vec!["symbol", "--q", "3", "--top", "T+", "--bottom", "T"],
        vec!["verify", "nonsense", "--q", "3"],
        vec!["verify", "fe", "--q", "3", "--workers", "0"],
        vec!["verify", "fe", "--q", "3", "--out", "xml", "/dev/null"],
        vec!["rosen", "--q", "3", "--M", "4"],
    ] {
        let o = k2lab(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert_eq!(stderr(&o).lines().count(), 1, "{args:?}: {}", stderr(&o));
        assert!(stderr(&o).starts_with("k2lab: error["));
    }
}

#[test]
fn budget_refusal_exits_3() {
    let o = k2lab(&["average", "--q", "3", "--g", "2", "--budget", "100"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).starts_with("k2lab: error[work-budget]:"));
    assert!(stdout(&o).is_empty());
}

#[test]
fn failed_check_exits_1() {
    // no float computation hits an absolute tolerance of 1e-300
    let o = k2lab(&["verify", "rh", "--q", "3", "--g", "1", "--tol", "1e-300"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("[FAIL] rh"));
}

#[test]
fn environment_mirrors_flags_and_flags_win() {
    let bin = env!("CARGO_BIN_EXE_k2lab");
    let o = Command::new(bin)
        .args(["average", "--q", "3", "--g", "2"])
        .env("K2LAB_BUDGET", "100")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
    let o = Command::new(bin)
        .args(["average", "--q", "3", "--g", "2", "--budget", "100000000"])
        .env("K2LAB_BUDGET", "100")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let o = Command::new(bin).args(["k2", "--D", "T"]).env("K2LAB_Q", "5").output().unwrap();
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn verify_all_passes_and_writes_reports() {
    let json = tmp("all.json");
    let o = k2lab(&["verify", "all", "--q", "3", "--g-max", "2", "--out", "json", json.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let reports = read_json(&std::fs::read_to_string(&json).unwrap()).unwrap();
    let ids: std::collections::BTreeSet<_> = reports.iter().map(|r| r.experiment_id.as_str()).collect();
    for id in ["lemma1", "lemma2", "lemma3", "pv", "fe", "rh", "square-term", "nonsquare-term"] {
        assert!(ids.contains(id), "missing {id}");
    }
    assert!(reports.iter().all(|r| r.pass));
}

#[test]
fn csv_output_has_header_and_rows() {
    let csv = tmp("mean.csv");
    let o = k2lab(&["average", "--q", "3", "--g", "1,2", "--out", "csv", csv.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines[0], "experiment_id,params,exact,empirical,predicted,ratio,pass,runtime_ms");
    assert_eq!(lines.len(), 4);
    assert!(lines[1].starts_with("mean-k2,q=3;g=1,"));
    assert!(lines[3].starts_with("mean-k2-trend,"));
}

#[test]
fn worker_count_does_not_change_json() {
    let run = |w: &str| {
        let path = tmp(&format!("rosen-{w}.json"));
        let o = k2lab(&[
            "rosen",
            "--q",
            "3",
            "--M",
            "3",
            "--workers",
            w,
            "--out",
            "json",
            path.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0));
        read_json(&std::fs::read_to_string(path).unwrap()).unwrap()[0].exact_values.clone()
    };
    assert_eq!(run("1"), run("3"));
}

#[test]
fn euler_prints_value_truncation_and_bound() {
    let o = k2lab(&["euler", "--q", "5", "--s", "4", "--rel-err", "1e-3"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("P(4) = 0.998667377588173"), "{out}");
    assert!(out.contains("N = 1"));
    assert!(out.contains("tail_bound = "));
    let o = k2lab(&["euler", "--q", "3", "--which", "c2"]);
    assert!(stdout(&o).starts_with("c(2) = 0.66048229972"));
}

#[test]
fn table_exit_code_matches_report() {
    let path = tmp("table.json");
    let o = k2lab(&["table", "--q", "3", "--g-max", "1", "--out", "json", path.to_str().unwrap()]);
    let report = &read_json(&std::fs::read_to_string(path).unwrap()).unwrap()[0];
    assert_eq!(o.status.code(), Some(if report.pass { 0 } else { 1 }));
    assert!(report.get("constant_ratio").is_some());
}

#[test]
fn printed_polynomials_reparse() {
    let path = tmp("lemma1.json");
    let o = k2lab(&[
        "verify",
        "lemma1",
        "--q",
        "5",
        "--g",
        "1",
        "--f",
        "2*T^2 + 7*T - 3",
        "--out",
        "json",
        path.to_str().unwrap(),
    ]);
    // non-monic modulus is rejected
    assert_eq!(o.status.code(), Some(2));
    let o = k2lab(&[
        "verify",
        "lemma1",
        "--q",
        "5",
        "--g",
        "1",
        "--f",
        "T^2 + 7*T - 3",
        "--out",
        "json",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let report = &read_json(&std::fs::read_to_string(path).unwrap()).unwrap()[0];
    let printed = &report.parameters.iter().find(|(k, _)| k == "f").unwrap().1;
    let spec = FieldSpec::new(5).unwrap();
    assert_eq!(printed, "T^2+2*T+2");
    assert_eq!(parse_poly(printed, spec).unwrap(), parse_poly("T^2 + 7*T - 3", spec).unwrap());
}
