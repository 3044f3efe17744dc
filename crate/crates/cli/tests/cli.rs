use std::path::PathBuf;
use std::process::{Command, Output};

fn golden(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("golden").join(name)
}

fn folia(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_folia")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn scratch(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("folia-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn analyze_matches_stored_report() {
    let fol = golden("three_axes.fol");
    let o = folia(&["analyze", fol.to_str().unwrap(), "--recheck"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o), std::fs::read_to_string(golden("three_axes.json")).unwrap());
}

#[test]
fn analyze_writes_out_file() {
    let out = std::env::temp_dir().join(format!("folia-out-{}.json", std::process::id()));
    let fol = golden("cusp_hypersurface.fol");
    let o = folia(&["analyze", fol.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).is_empty());
    let written = std::fs::read_to_string(&out).unwrap();
    assert_eq!(written, std::fs::read_to_string(golden("cusp_hypersurface.json")).unwrap());
    std::fs::remove_file(out).ok();
}

#[test]
fn text_report_groups_by_class() {
    let fol = golden("crossing_axes.fol");
    let o = folia(&["analyze", fol.to_str().unwrap(), "--format", "text"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    for heading in ["singular set:", "A_0", "A_1", "transversal", "theorems"] {
        assert!(text.contains(heading), "missing {heading}");
    }
}

#[test]
fn parse_errors_exit_one_with_position() {
    let p = scratch("bad.fol", "foliation \"bad\" {\n  vars: x, y;\n  field { x: y +; y: x; }\n}\n");
    let o = folia(&["analyze", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("at 3:"), "{err}");
    assert!(err.contains('^'), "{err}");
}

#[test]
fn missing_file_exits_one() {
    let o = folia(&["analyze", "/nonexistent/file.fol"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("cannot read"));
}

#[test]
fn bad_thread_count_exits_two() {
    let fol = golden("three_axes.fol");
    let o = Command::new(env!("CARGO_BIN_EXE_folia"))
        .args(["analyze", fol.to_str().unwrap()])
        .env("FOLIA_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn single_thread_output_is_identical() {
    let fol = golden("plane_and_line.fol");
    let o = Command::new(env!("CARGO_BIN_EXE_folia"))
        .args(["analyze", fol.to_str().unwrap()])
        .env("FOLIA_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), std::fs::read_to_string(golden("plane_and_line.json")).unwrap());
}

#[test]
fn classify_with_submanifold() {
    let fol = golden("plane_and_line.fol");
    let o = folia(&["classify", fol.to_str().unwrap(), "--point", "(0, 1/2, 0, 0)", "--order", "1", "--sigma", "x=0, w=0"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("CertifiedYes"), "{text}");

    let o = folia(&["classify", fol.to_str().unwrap(), "--point", "(0, 1/2, 0, 0)", "--order", "1", "--sigma", "x=0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn classify_json_holds_a_ledger() {
    let fol = golden("crossing_axes.fol");
    let o = folia(&["classify", fol.to_str().unwrap(), "--point", "(0, 1, 0)", "--order", "1", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["ledger"].as_array().is_some_and(|a| !a.is_empty()));
}

#[test]
fn transversal_at_origin_is_refuted() {
    let fol = golden("three_axes.fol");
    let o = folia(&["transversal", fol.to_str().unwrap(), "--point", "(0, 0, 0)"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("witness arc"));
    let o = folia(&["transversal", fol.to_str().unwrap(), "--point", "(0, 0, 1/2)", "--cert-degree", "2"]);
    assert!(stdout(&o).contains("syzygy certificate"));
}

#[test]
fn point_arity_is_checked() {
    let fol = golden("three_axes.fol");
    let o = folia(&["transversal", fol.to_str().unwrap(), "--point", "(0, 0)"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn theorems_lists_all_three() {
    let fol = golden("three_axes.fol");
    let o = folia(&["theorems", fol.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    for label in ["continuity-L", "continuity-LM", "extension: Certified"] {
        assert!(text.contains(label), "{text}");
    }
}

#[test]
fn eta_scan_writes_csv() {
    let p = scratch(
        "disc.fol",
        "foliation \"discs\" {\n  vars: x, y;\n  field {\n    x: 1;\n    y: 0;\n  }\n  domain: polydisc 1;\n  product: x;\n}\n",
    );
    let o = folia(&["eta", p.to_str().unwrap(), "--scan", "(1/2, 0) -> (0, 0)", "--samples", "4"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let mut rows = csv::Reader::from_reader(o.stdout.as_slice());
    let headers = rows.headers().unwrap().clone();
    assert_eq!(headers.iter().collect::<Vec<_>>(), ["s", "x", "y", "lower_bound", "exact", "safe_radius"]);
    let records: Vec<csv::StringRecord> = rows.records().map(Result::unwrap).collect();
    assert_eq!(records.len(), 4);
    for r in &records {
        let lower: f64 = r[3].parse().unwrap();
        let exact: f64 = r[4].parse().unwrap();
        assert!(lower <= exact + 1e-6);
    }
}

#[test]
fn eta_needs_a_polydisc() {
    let fol = golden("crossing_axes.fol");
    let o = folia(&["eta", fol.to_str().unwrap(), "--scan", "(1, 1, 1) -> (0, 1, 1)", "--samples", "2"]);
    assert_eq!(o.status.code(), Some(2));
}
