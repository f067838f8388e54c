use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "fixtures", name]
        .iter()
        .collect();
    p.to_string_lossy().into_owned()
}

fn fid(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fid"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn ok(args: &[&str]) -> String {
    let o = fid(args);
    assert!(o.status.success(), "{args:?} failed: {}", stderr(&o));
    stdout(&o)
}

fn fails(args: &[&str], code: i32, prefix: &str) -> String {
    let o = fid(args);
    assert_eq!(o.status.code(), Some(code), "{args:?}: {}", stderr(&o));
    let err = stderr(&o);
    assert!(err.starts_with(prefix), "{err}");
    assert_eq!(err.trim_end().lines().count(), 1, "{err}");
    err
}

#[test]
fn analyze_table1_matches_report_layout() {
    let out = ok(&["analyze", &fixture("table1.spec.json")]);
    for line in [
        "X0[0,1]   0.2309 bits   0.3676 bits",
        "X1[0,1]   0.1886 bits   0.3512 bits",
        "X2[0,1]   0.3968 bits   0.4105 bits",
        "Synergy: 0.5463 bits",
        "Total Information: 1.3627 bits",
        "Output Entropy: 1.9527 bits",
        "Residual Entropy: 0.5900 bits",
    ] {
        assert!(out.lines().any(|l| l == line), "missing {line:?} in\n{out}");
    }
}

#[test]
fn analyze_machine_is_full_precision() {
    let out = ok(&["analyze", &fixture("xor.spec.json"), "--format", "machine"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!((v["synergy"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!((v["total_information"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(v["residual_entropy"].as_f64().unwrap(), 0.0);

    let out = ok(&[
        "analyze",
        &fixture("table1.spec.json"),
        "--format",
        "machine",
    ]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let ind0 = v["variables"][0]["independent"].as_f64().unwrap();
    assert!((ind0 - 0.230946).abs() < 1e-6 && format!("{ind0}").len() > 8);
}

#[test]
fn analyze_errors() {
    let err = fails(
        &["analyze", &fixture("or_xor.spec.json")],
        3,
        "error[input]:",
    );
    assert!(err.contains("spec is partial; use sweep"));
    let err = fails(
        &["analyze", &fixture("malformed.spec.json")],
        3,
        "error[input]:",
    );
    assert!(err.contains("line 4"), "{err}");
    let err = fails(
        &["analyze", &fixture("bad_sum.spec.json")],
        3,
        "error[input]:",
    );
    assert!(err.contains("row (0): row sum"), "{err}");
    fails(&["analyze", "/nonexistent/spec.json"], 3, "error[input]:");
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(fid(&[]).status.code(), Some(2));
    assert_eq!(
        fid(&["analyze", "x", "--format", "yaml"]).status.code(),
        Some(2)
    );
    assert_eq!(
        fid(&["merge", &fixture("xor.spec.json")]).status.code(),
        Some(2)
    );
    fails(&["gen", "nope"], 2, "error[usage]:");
    let err = fails(
        &[
            "sweep",
            &fixture("or_xor.spec.json"),
            "--no-enumerate",
            "--samples",
            "0",
        ],
        2,
        "error[usage]:",
    );
    assert!(err.contains("no completions requested"));
    fails(
        &["sweep", &fixture("or_xor.spec.json"), "--alphas", "1,-2"],
        2,
        "error[usage]:",
    );
}

#[test]
fn sweep_enumerated_bounds() {
    let out = ok(&["sweep", &fixture("or_xor.spec.json"), "--samples", "0"]);
    assert!(out.contains("(enumerated)"), "{out}");
    assert!(
        out.contains("Synergy            0.1887 - 1.0000 bits"),
        "{out}"
    );
    assert!(
        out.contains("I_ind(X1)          0.0000 - 0.3113 bits"),
        "{out}"
    );
    assert!(
        out.contains("I_ind(X2)          0.0000 - 0.3113 bits"),
        "{out}"
    );
}

#[test]
fn sweep_grid_refined_total() {
    let out = ok(&[
        "sweep",
        &fixture("or_xor.spec.json"),
        "--samples",
        "0",
        "--grid-refine",
    ]);
    assert!(out.contains("grid-refined"), "{out}");
    assert!(
        out.contains("Total Information  0.6887 - 1.0000 bits"),
        "{out}"
    );
}

#[test]
fn sweep_sampled_bounds_are_flagged() {
    let out = ok(&[
        "sweep",
        &fixture("or_xor.spec.json"),
        "--samples",
        "50",
        "--no-enumerate",
    ]);
    assert!(out.contains("sampled"), "{out}");
    let out = ok(&[
        "sweep",
        &fixture("or_xor.spec.json"),
        "--samples",
        "20",
        "--format",
        "machine",
    ]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["deterministic"], 2);
    assert_eq!(v["probabilistic"], 80);
    assert_eq!(v["max_entropy"], 1);
}

#[test]
fn sweep_cloud_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        ok(&[
            "sweep",
            &fixture("or_xor.spec.json"),
            "--samples",
            "25",
            "--alphas",
            "0.5,2",
            "--seed",
            "7",
            "--out",
            p.to_str().unwrap(),
        ]);
    }
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(text, fs::read_to_string(&b).unwrap());
    assert_eq!(text.lines().count(), 1 + 2 + 50 + 1);
    assert!(text.starts_with(
        "sample_id,kind,alpha,total,synergy,entropy_Y,residual,ind_X1,solo_X1,loss_X1"
    ));

    let c = dir.path().join("c.csv");
    ok(&[
        "sweep",
        &fixture("or_xor.spec.json"),
        "--samples",
        "25",
        "--alphas",
        "0.5,2",
        "--seed",
        "8",
        "--out",
        c.to_str().unwrap(),
    ]);
    assert_ne!(text, fs::read_to_string(&c).unwrap());
}

#[test]
fn sweep_rejects_complete_spec_and_cap() {
    fails(&["sweep", &fixture("xor.spec.json")], 3, "error[input]:");
    let err = fails(
        &["sweep", &fixture("or_xor.spec.json"), "--cap", "1"],
        4,
        "error[analysis]:",
    );
    assert!(err.contains("exceed the cap"), "{err}");
}

#[test]
fn classify_anchors() {
    let out = ok(&["classify", &fixture("led.spec.json")]);
    assert!(out.contains("s1: pseudo_injective"), "{out}");
    assert!(out.contains("s2: pseudo_injective"), "{out}");
    assert!(
        out.contains("U -> {A,B}") && out.contains("D -> {C,D}"),
        "{out}"
    );
    assert!(
        out.contains("U -> {A,C}") && out.contains("D -> {B,D}"),
        "{out}"
    );

    let out = ok(&["classify", &fixture("xor.spec.json")]);
    assert!(out.contains("X1: overjective") && out.contains("X2: overjective"));
    assert_eq!(out.matches("degeneracy: none").count(), 2);

    let out = ok(&["classify", &fixture("degenerate.spec.json")]);
    assert!(out.contains("degeneracy: {a,a2}"), "{out}");
    assert!(
        out.contains("changes the class to pseudo_injective"),
        "{out}"
    );

    let out = ok(&["classify", &fixture("led.spec.json"), "--format", "machine"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["variables"][0]["global_class"], "pseudo_injective");
}

#[test]
fn ingest_or_xor_observations() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("s.json");
    let report = ok(&[
        "ingest",
        &fixture("or_xor.csv"),
        "--out",
        spec.to_str().unwrap(),
    ]);
    assert!(
        report.contains("3 of 4 input patterns observed, 1 unknown"),
        "{report}"
    );
    let text = fs::read_to_string(&spec).unwrap();
    assert!(text.contains("\"partial\": true"));
    assert_eq!(text.matches("null").count(), 1);
    let out = ok(&["sweep", spec.to_str().unwrap(), "--samples", "0"]);
    assert!(out.contains("0.1887 - 1.0000"));
}

#[test]
fn ingest_flags_dependent_pair() {
    let o = fid(&["ingest", &fixture("weather.csv")]);
    assert!(o.status.success());
    let report = stderr(&o);
    assert!(
        report.contains("inputs Weather and Precipitation never co-occur in 3 combination(s)"),
        "{report}"
    );
    assert!(report.contains("merge --dependent"));
    assert!(stdout(&o).starts_with("{\n  \"partial\": true"));
}

#[test]
fn ingest_seven_input_table() {
    let dir = tempfile::tempdir().unwrap();
    let obs = dir.path().join("obs.csv");
    let mut text = String::from("A,B,C,D,E,F,G,Y\n");
    for r in 4..128u32 {
        let bits: Vec<String> = (0..7).rev().map(|k| ((r >> k) & 1).to_string()).collect();
        text.push_str(&format!("{},{}\n", bits.join(","), r.count_ones() % 2));
    }
    fs::write(&obs, text).unwrap();
    let o = fid(&["ingest", obs.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(stderr(&o).contains("124 of 128 input patterns observed, 4 unknown"));
    assert_eq!(stdout(&o).matches("\"p\":null").count(), 4);
}

#[test]
fn ingest_errors() {
    let err = fails(&["ingest", &fixture("ragged.csv")], 3, "error[input]:");
    assert!(err.contains("line 3"), "{err}");
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.csv");
    fs::write(&empty, "").unwrap();
    fails(&["ingest", empty.to_str().unwrap()], 3, "error[input]:");
    fails(
        &["ingest", &fixture("or_xor.csv"), "--states", "X1"],
        2,
        "error[usage]:",
    );
}

#[test]
fn gen_builtins() {
    let gol = ok(&["gen", "gol"]);
    assert_eq!(gol.matches("{\"in\":").count(), 512);
    let and = ok(&["gen", "and"]);
    assert_eq!(and.matches("{\"in\":").count(), 4);
    assert!(and.contains("{\"in\":[\"1\",\"1\"],\"p\":[0.0,1.0]}"));
    assert!(and.contains("{\"in\":[\"0\",\"1\"],\"p\":[1.0,0.0]}"));
    assert_eq!(ok(&["gen", "majority3"]).matches("{\"in\":").count(), 8);
    assert_eq!(
        ok(&["gen", "xor"]),
        fs::read_to_string(fixture("xor.spec.json")).unwrap()
    );
}

#[test]
fn gen_then_analyze_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("and.json");
    ok(&["gen", "and", "--out", p.to_str().unwrap()]);
    let out = ok(&["analyze", p.to_str().unwrap()]);
    assert!(out.contains("X1[0,1]   0.3113 bits   0.1887 bits"), "{out}");
    assert!(out.contains("Synergy: 0.1887 bits"));
    assert!(out.contains("Total Information: 0.8113 bits"));

    let gol = dir.path().join("gol.json");
    ok(&["gen", "gol", "--out", gol.to_str().unwrap()]);
    let out = ok(&["analyze", gol.to_str().unwrap(), "--format", "machine"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!((v["synergy"].as_f64().unwrap() - 0.637652).abs() < 5e-4);
}

#[test]
fn merge_dependent_weather() {
    let o = fid(&[
        "merge",
        &fixture("weather.csv"),
        "--dependent",
        "Weather,Precipitation",
    ]);
    assert!(o.status.success());
    assert!(stderr(&o).contains("with 3 states: Dry·None Rain·Heavy Rain·Light"));
    let table = stdout(&o);
    assert!(table.starts_with("Weather·Precipitation,Umbrella\n"));
    assert_eq!(table.lines().count(), 6);
    let by_index = fid(&["merge", &fixture("weather.csv"), "--dependent", "0,1"]);
    assert_eq!(stdout(&by_index), table);
    fails(
        &[
            "merge",
            &fixture("weather.csv"),
            "--dependent",
            "Weather,Nope",
        ],
        2,
        "error[usage]:",
    );
}

#[test]
fn merge_independent_pair_is_unwarranted() {
    let dir = tempfile::tempdir().unwrap();
    let obs = dir.path().join("obs.csv");
    fs::write(&obs, "A,B,Y\n0,0,0\n0,1,1\n1,0,1\n1,1,0\n").unwrap();
    let err = fails(
        &["merge", obs.to_str().unwrap(), "--dependent", "A,B"],
        4,
        "error[analysis]:",
    );
    assert!(err.contains("merge unwarranted"), "{err}");
}

#[test]
fn merge_degenerate() {
    let xor = fs::read_to_string(fixture("xor.spec.json")).unwrap();
    let o = fid(&["merge", &fixture("xor.spec.json"), "--degenerate"]);
    assert!(stderr(&o).contains("no degeneracy found"));
    assert_eq!(stdout(&o), xor);

    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("m.json");
    let report = ok(&[
        "merge",
        &fixture("dup_xor.spec.json"),
        "--degenerate",
        "--out",
        p.to_str().unwrap(),
    ]);
    assert!(report.contains("X1: 1b -> 1"));
    assert_eq!(fs::read_to_string(&p).unwrap(), xor);
}
