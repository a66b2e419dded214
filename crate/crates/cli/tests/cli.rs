use std::path::Path;
use std::process::{Command, Output};

use bmhull::estimators::{simulate_convex, simulate_star, simulate_topological};
use bmhull::sampling::{BoundaryMode, SimulationConfig};
use bmhull_cli::commands::table1_document;
use bmhull_cli::config::{resolve, Overrides, Target};
use bmhull_cli::document::{ResultDocument, ResultValue};

fn bmhull(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bmhull"))
        .args(args)
        .env_remove("BMHULL_WORKERS")
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn document(o: &Output) -> ResultDocument {
    ResultDocument::from_json(&String::from_utf8_lossy(&o.stdout)).expect("stdout is a result document")
}

fn value(doc: &ResultDocument, key: &str) -> f64 {
    doc.results[key].value()
}

#[test]
fn analytic_reports_constants_and_passes() {
    let o = bmhull(&["analytic"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let doc = document(&o);
    assert_eq!(doc.schema_version, 1);
    assert_eq!(doc.command, "analytic");
    assert!((value(&doc, "expected_m") - 0.511655).abs() < 1e-5);
    assert!((value(&doc, "expected_perimeter") - 3.214826).abs() < 1e-5);
    assert!(value(&doc, "conformal_max_discrepancy") < 1e-12);
    assert!(doc.checks.iter().all(|c| c.passed));
    assert!(stderr(&o).contains("expected_m_squared"));
}

#[test]
fn out_file_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("a.json");
    let o = bmhull(&["analytic", "--seed", "7", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let doc = ResultDocument::from_json(&text).unwrap();
    assert_eq!(doc.parameters.seed, 7);
    assert!(doc.overrides.iter().any(|l| l == "seed = 7 (flag)"));
    assert_eq!(ResultDocument::from_json(&doc.to_json().unwrap()).unwrap(), doc);
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn flags_beat_file_beats_environment() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "run.toml",
        "[run]\nseed = 11\nworkers = 2\nboundary_mode = \"CIRCLE_INTERPOLATED\"\n\n[convex]\ndt = 0.002\n",
    );
    let o = Command::new(env!("CARGO_BIN_EXE_bmhull"))
        .args(["analytic", "--config", &cfg, "--seed", "13"])
        .env("BMHULL_WORKERS", "3")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let p = document(&o).parameters;
    assert_eq!(p.seed, 13);
    assert_eq!(p.workers, 2);
    assert_eq!(p.boundary_mode, BoundaryMode::CircleInterpolated);
    assert_eq!(p.convex.dt, 0.002);

    let o = Command::new(env!("CARGO_BIN_EXE_bmhull"))
        .args(["analytic"])
        .env("BMHULL_WORKERS", "3")
        .output()
        .unwrap();
    assert_eq!(document(&o).parameters.workers, 3);
    assert!(stderr(&o).contains("workers = 3 (environment)"));
}

#[test]
fn paper_preset_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "p.toml", "[run]\npreset = \"paper\"\n");
    let o = bmhull(&["analytic", "--config", &cfg]);
    let p = document(&o).parameters;
    assert_eq!(p.convex.dt, 1e-7);
    assert_eq!(p.star.m_directions, 2000);
    assert_eq!(p.topological.kill_radius, 1000);
}

#[test]
fn bad_settings_exit_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let unknown = write(dir.path(), "u.toml", "[run]\nsed = 1\n");
    let o = bmhull(&["analytic", "--config", &unknown]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("u.toml"), "{}", stderr(&o));

    let o = bmhull(&["analytic", "--config", "/nonexistent/run.toml"]);
    assert_eq!(o.status.code(), Some(2));

    let o = bmhull(&["simulate", "perimeter", "--dt", "-1"]);
    assert_eq!(o.status.code(), Some(2));

    let o = bmhull(&["analytic", "--workers", "0"]);
    assert_eq!(o.status.code(), Some(2));

    let o = bmhull(&["cdf-export", "--grid", "1"]);
    assert_eq!(o.status.code(), Some(2));

    let o = Command::new(env!("CARGO_BIN_EXE_bmhull"))
        .arg("analytic")
        .env("BMHULL_WORKERS", "many")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("BMHULL_WORKERS"));
}

#[test]
fn cdf_export_rows() {
    let o = bmhull(&["cdf-export", "--grid", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = String::from_utf8(o.stdout).unwrap();
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "a,cdf_M,survival_M,survival_via_conformal,radial_survival");
    assert_eq!(rows.len(), 4);
    let mid: Vec<f64> = rows[2].split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(&mid[..4], &[0.5, 0.5, 0.5, 0.5]);
    for r in &rows[1..] {
        let v: Vec<f64> = r.split(',').map(|x| x.parse().unwrap()).collect();
        assert!((v[1] + v[2] - 1.0).abs() < 1e-11);
        assert!((v[2] - v[3]).abs() < 1e-11);
        // the ray in direction 0 never reaches past the rightmost point
        assert!(v[4] < v[2], "radial survival exceeds M survival at a = {}", v[0]);
    }
}

#[test]
fn cdf_export_is_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "e.toml", "[export]\ngrid = 50\n");
    let a = bmhull(&["cdf-export", "--config", &cfg]).stdout;
    let b = bmhull(&["cdf-export", "--grid", "50"]).stdout;
    assert_eq!(a, b);
    let rows = String::from_utf8(a).unwrap().lines().filter(|l| !l.starts_with('#')).count();
    assert_eq!(rows, 51);
}

#[test]
fn small_perimeter_run() {
    let o = bmhull(&["simulate", "perimeter", "--dt", "1e-3", "--n-paths", "200", "--workers", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let doc = document(&o);
    match doc.results["perimeter"] {
        ResultValue::Estimate(e) => {
            assert_eq!(e.n_samples, 200);
            assert!(e.ci95_low < e.mean && e.mean < e.ci95_high);
        }
        ResultValue::Scalar(_) => panic!("perimeter should carry an estimate"),
    }
    assert_eq!(doc.runs.len(), 1);
    assert_eq!(doc.runs[0].dt, Some(1e-3));
    assert_eq!(doc.parameters.star.n_paths, 5000, "--n-paths only applies to the convex run");
}

#[test]
fn failed_check_exits_with_code_one() {
    // a coarse step leaves the perimeter far from its exact value
    let o = bmhull(&["simulate", "perimeter", "--dt", "1.0", "--n-paths", "2000"]);
    assert_eq!(o.status.code(), Some(1));
    let doc = document(&o);
    assert!(!doc.passed());
    assert!(stderr(&o).contains("[FAIL] perimeter-vs-exact"));
}

#[test]
fn simulate_cdf_writes_table_beside_document() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("law.json");
    let o = bmhull(&[
        "simulate", "cdf", "--dt", "1e-3", "--n-paths", "300", "--out", out.to_str().unwrap(),
    ]);
    assert!(o.status.code().unwrap() <= 1, "{}", stderr(&o));
    let csv = std::fs::read_to_string(out.with_extension("csv")).unwrap();
    let rows: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "a,empirical,analytic");
    assert_eq!(rows.len(), 100);
    let doc = ResultDocument::from_json(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!(doc.results.contains_key("ks_distance"));
}

#[test]
fn worker_count_does_not_change_results() {
    let run = |w: &str| {
        document(&bmhull(&[
            "simulate", "star-area", "--dt", "1e-3", "--n-paths", "60", "--m-directions", "90", "--workers", w,
        ]))
    };
    let (a, b) = (run("1"), run("3"));
    assert_eq!(a.results_json().unwrap(), b.results_json().unwrap());
}

#[test]
fn table_from_small_runs() {
    let flags = Overrides {
        dt: Some(1e-3),
        n_paths: Some(300),
        m_directions: Some(180),
        kill_radius: Some(30),
        workers: Some(1),
        ..Overrides::default()
    };
    let r = resolve(None, &flags, Target::All, None).unwrap();
    let cfg = SimulationConfig::new(1e-3, r.config.seed, BoundaryMode::FirstExterior).unwrap();
    let convex = simulate_convex(&cfg, 300, 1).unwrap();
    let star = simulate_star(&cfg, 300, 180, 1).unwrap();
    let topo = simulate_topological(30, 300, r.config.seed, 1).unwrap();
    let doc = table1_document(&r, &convex, &star, &topo).unwrap();

    let rows = doc.table.as_ref().unwrap();
    assert_eq!(rows.len(), 3);
    assert!(rows[0].true_value.is_none());
    assert_eq!(rows[1].true_value, Some(std::f64::consts::PI - 8.0 / 3.0));
    assert_eq!(rows[2].lower_bound, Some(0.0));
    for name in ["convex-in-bracket", "star-near-exact", "topological-in-bracket", "ordering"] {
        assert!(doc.checks.iter().any(|c| c.name == name), "missing check {name}");
    }
    let text = doc.render();
    assert!(text.contains("quantity") && text.contains("MC estimate") && text.contains("E[area(star hull)]"));
    assert_eq!(doc.runs.len(), 3);
}
