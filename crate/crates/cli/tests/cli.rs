use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rcbbo"))
}

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn run(args: &[&str]) -> Output {
    let out = bin().args(args).output().expect("binary runs");
    if !out.status.success() {
        eprintln!("{}", String::from_utf8_lossy(&out.stderr));
    }
    out
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Data rows of a CSV with `#` manifest lines.
fn rows(file: &Path) -> Vec<csv::StringRecord> {
    let text = std::fs::read_to_string(file).unwrap();
    let body: String = text.lines().filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect();
    csv::Reader::from_reader(body.as_bytes()).records().map(|r| r.unwrap()).collect()
}

fn header(file: &Path) -> Vec<String> {
    let text = std::fs::read_to_string(file).unwrap();
    let line = text.lines().find(|l| !l.starts_with('#')).unwrap();
    line.split(',').map(String::from).collect()
}

#[test]
fn optimize_writes_a_non_increasing_history() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("opt");
    let cs1 = data("cs1.json");
    let costs = data("costs.json");
    let o = run(&[
        "optimize", "--model", path(&cs1), "--costs", path(&costs), "--out", path(&out), "--iterations", "25", "--seed", "9",
    ]);
    assert!(o.status.success());
    for f in ["history.csv", "cost.csv", "checks.csv", "best.json"] {
        assert!(out.join(f).exists(), "{f}");
    }
    assert_eq!(header(&out.join("history.csv")), ["iteration", "best", "mean"]);
    let best: Vec<f64> = rows(&out.join("history.csv")).iter().map(|r| r[1].parse().unwrap()).collect();
    assert_eq!(best.len(), 26);
    assert!(best.windows(2).all(|w| w[1] <= w[0]));

    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("best.json")).unwrap()).unwrap();
    assert_eq!(json["manifest"]["seed"], 9);
    let cost = rows(&out.join("cost.csv"));
    let total: f64 = cost.iter().find(|r| &r[0] == "total").unwrap()[5].parse().unwrap();
    let sum: f64 = cost.iter().filter(|r| &r[0] != "total").map(|r| r[5].parse::<f64>().unwrap()).sum();
    assert!((total - sum).abs() <= 1e-6 * total);
}

#[test]
fn missing_cost_file_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cs1 = data("cs1.json");
    let missing = dir.path().join("nope.json");
    let o = run(&["optimize", "--model", path(&cs1), "--costs", path(&missing), "--out", path(&dir.path().join("o"))]);
    assert_eq!(o.status.code(), Some(2));
    // and with no cost table at all
    let o = run(&["enumerate", "--model", path(&cs1), "--out", path(&dir.path().join("e"))]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn enumeration_ranks_every_candidate() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("enum");
    let o = run(&["enumerate", "--model", path(&data("cs1.json")), "--costs", path(&data("costs.json")), "--out", path(&out)]);
    assert!(o.status.success());
    let r = rows(&out.join("ranking.csv"));
    assert_eq!(r.len(), 324);
    let costs: Vec<f64> = r.iter().map(|x| x[4].parse().unwrap()).collect();
    assert!(costs.windows(2).all(|w| w[0] <= w[1]));
    let optimum: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("optimum.json")).unwrap()).unwrap();
    assert!(optimum.to_string().contains("1536.07"));
}

#[test]
fn no_feasible_candidate_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("tiny.json");
    std::fs::write(
        &spec,
        r#"{"variables": [
            {"name": "b", "kind": "dimension", "values": [0.2]},
            {"name": "hb", "kind": "dimension", "values": [0.3]},
            {"name": "hc", "kind": "dimension", "values": [0.25]}],
          "groups": [
            {"group": "beams", "role": "beam", "width": "b", "height": "hb"},
            {"group": "columns", "role": "column", "width": "b", "height": "hc"}]}"#,
    )
    .unwrap();
    let o = run(&[
        "enumerate", "--model", path(&data("cs1.json")), "--costs", path(&data("costs.json")), "--spec", path(&spec),
        "--feasible-only", "--out", path(&dir.path().join("e")),
    ]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn soil_interaction_changes_the_superstructure() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("an");
    let o = run(&[
        "analyze", "--model", path(&data("portal_sssi.json")), "--costs", path(&data("costs.json")),
        "--design", "b=0.25,hb=0.6,hc=0.3,r=1.2", "--out", path(&out),
    ]);
    assert!(o.status.success());
    let cmp = rows(&out.join("compare.csv"));
    let m_pos = cmp.iter().find(|r| r[0].ends_with(".m_pos")).unwrap();
    let off: f64 = m_pos[1].parse().unwrap();
    let on: f64 = m_pos[2].parse().unwrap();
    assert!((on - off).abs() > 1e-3 * off.abs());
    assert!(out.join("sssi_trace.csv").exists());
    // SSSI adds its convergence check
    let on = rows(&out.join("checks_on.csv"));
    assert_eq!(rows(&out.join("checks_off.csv")).len() + 1, on.len());
    assert!(on.iter().any(|r| &r[1] == "sssi_convergence"));
    assert!(!std::fs::read_to_string(out.join("cost_on.csv")).unwrap().contains(",-0"));
}

#[test]
fn bad_designs_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let args = |design: &str| {
        run(&[
            "analyze", "--model", path(&data("portal_sssi.json")), "--costs", path(&data("costs.json")),
            "--design", design, "--out", path(&dir.path().join("x")),
        ])
    };
    assert_eq!(args("b=0.25,hb=0.6,hc=0.3").status.code(), Some(2));
    assert_eq!(args("b=0.25,hb=0.6,hc=0.3,r=1.3").status.code(), Some(2));
    assert_eq!(args("b=0.25,hb=0.6,hc=0.3,r=1.2,q=1").status.code(), Some(2));
}

#[test]
fn one_cell_tuning_campaign() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("tune");
    let o = run(&[
        "tune", "--axis", "alpha=0.9", "--runs", "3", "--iterations", "20", "--dims", "2", "--bins", "9", "--out",
        path(&out),
    ]);
    assert!(o.status.success());
    let l = rows(&out.join("landscape.csv"));
    assert_eq!(l.len(), 1);
    assert_eq!(&l[0][1], "0.9");
    assert_eq!(&l[0][5], "100");
    let u: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("utilities.json")).unwrap()).unwrap();
    assert_eq!(u["manifest"]["subcommand"], "tune");
}

#[test]
fn unknown_tuning_axis_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["tune", "--axis", "speed=1,2", "--out", path(&dir.path().join("t"))]);
    assert_eq!(o.status.code(), Some(2));
}
