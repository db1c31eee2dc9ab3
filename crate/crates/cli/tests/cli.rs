use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use ugame::game::{fourier_matrix, pguess_max_d2};
use ugame::mesh::{mesh_reconstruct, BeamSplitterOp, MeshPlan, Orientation, PlanExport};
use ugame::pipeline::published;

fn ugame(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ugame"))
        .args(args)
        .env_remove("UGAME_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    r.records().map(|rec| rec.unwrap().iter().map(str::to_string).collect()).collect()
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

fn write(dir: &Path, name: &str, content: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, content).unwrap();
    p.to_string_lossy().into_owned()
}

const MEASURED_REGISTER: &str = "[[[0.5124,0],[0.4955,-0.0157]],[[0.4955,0.0157],[0.4876,0]]]";

#[test]
fn curve_with_published_points() {
    let rows = csv_rows(&stdout(&ugame(&["curve-d2", "--paper-points"])));
    assert_eq!(rows.len(), 11);
    for (r, q) in rows.iter().zip(published::QUBIT_SWEEP) {
        assert!((num(&r[1]) - q.p_max).abs() < 1e-4);
        assert_eq!(r[1], format!("{:.6}", pguess_max_d2(q.gamma).unwrap()));
        assert_eq!(num(&r[3]), q.p_exp);
    }
}

#[test]
fn curve_single_point_and_errors() {
    let rows = csv_rows(&stdout(&ugame(&["curve-d2", "--gamma", "0"])));
    assert_eq!(rows, vec![vec!["0.000000", "0.853553", "0.853553", ""]]);
    let empty = ugame(&["curve-d2"]);
    assert_eq!(empty.status.code(), Some(2));
    assert!(!empty.stderr.is_empty() && empty.stdout.is_empty());
    assert_eq!(ugame(&["curve-d2", "--gamma", "1.5"]).status.code(), Some(2));
    assert_eq!(ugame(&["curve-d2", "--gamma", "abc"]).status.code(), Some(2));
}

#[test]
fn qutrit_strategy_table() {
    let rows = csv_rows(&stdout(&ugame(&["table2"])));
    assert_eq!(rows.len(), 8);
    assert!((num(&rows[2][11]) - 0.9753).abs() < 5e-4);
    assert!((num(&rows[7][11]) - 0.9326).abs() < 5e-4);
}

#[test]
fn fourier_tables() {
    let v: Value = serde_json::from_str(&stdout(&ugame(&["fourier", "1.0", "--format", "json"]))).unwrap();
    for i in 0..3 {
        for j in 0..3 {
            assert_eq!(v["probs"][i][j].as_f64().unwrap(), if i == j { 1.0 } else { 0.0 });
        }
    }
    let rows = csv_rows(&stdout(&ugame(&["fourier", "--v", "0.98"])));
    for (i, r) in rows.iter().enumerate() {
        for j in 0..3 {
            assert!((num(&r[j + 1]) - published::FOURIER_PREDICTED_V098[i][j]).abs() < 1e-4);
        }
    }
    assert_eq!(ugame(&["fourier", "1.2"]).status.code(), Some(2));
}

#[test]
fn decompose_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let f3 = fourier_matrix(3).unwrap();
    let path = write(dir.path(), "f3.json", &serde_json::to_string(&f3.to_pairs()).unwrap());
    let export: PlanExport = serde_json::from_str(&stdout(&ugame(&["decompose", &path, "--format", "json"]))).unwrap();
    assert_eq!(export.layers.len(), 3);
    let plan = MeshPlan {
        d: export.d,
        layers: export
            .layers
            .iter()
            .map(|l| BeamSplitterOp::new(l.m, l.theta_rad, l.phi_rad, l.orientation))
            .collect(),
        output_phases: export.output_phases_rad.clone(),
        labels: Vec::new(),
    };
    assert!(mesh_reconstruct(&plan).unwrap().max_abs_diff(&f3) < 1e-9);
    assert!(export.layers.iter().any(|l| l.orientation == Orientation::A));

    let csv = csv_rows(&stdout(&ugame(&["decompose", &path])));
    assert_eq!(csv.len(), 3);

    let bad = write(dir.path(), "bad.json", "[[[1,0],[0,0]],[[0,0],[2,0]]]");
    assert_eq!(ugame(&["decompose", &bad]).status.code(), Some(2));
    assert_eq!(ugame(&["decompose", "/nonexistent/u.json"]).status.code(), Some(2));
    let garbage = write(dir.path(), "garbage.json", "{not json");
    assert_eq!(ugame(&["decompose", &garbage]).status.code(), Some(2));
}

#[test]
fn optimize_qutrit_full_coherence() {
    let rows = csv_rows(&stdout(&ugame(&["optimize", "3", "1.0", "--restarts", "64", "--seed", "7"])));
    assert!(num(&rows[0][5]) >= 0.9788);
    let v: Value = serde_json::from_str(&stdout(&ugame(&[
        "optimize", "2", "--gamma", "0.5", "--method", "analytic-d2", "--format", "json",
    ])))
    .unwrap();
    assert_eq!(v["p_guess"].as_f64().unwrap(), 0.895285);
    assert_eq!(ugame(&["optimize", "3", "1.0", "--method", "annealing"]).status.code(), Some(2));
    assert_eq!(ugame(&["optimize", "3"]).status.code(), Some(2));
    assert_eq!(ugame(&["optimize", "3", "0.5", "--restarts", "0"]).status.code(), Some(2));
}

#[test]
fn outputs_are_byte_identical_and_thread_independent() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, threads: &str| {
        let out = dir.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_ugame"))
            .args(["optimize", "3", "0.8", "--restarts", "6", "--seed", "4", "--format", "json", "--out"])
            .arg(&out)
            .env("UGAME_THREADS", threads)
            .status()
            .unwrap();
        assert!(status.success());
        std::fs::read(out).unwrap()
    };
    let a = run("a.json", "1");
    let b = run("b.json", "1");
    let c = run("c.json", "3");
    assert_eq!(a, b);
    assert_eq!(a, c);
}

#[test]
fn simulate_run_descriptions() {
    let dir = tempfile::tempdir().unwrap();
    let d3 = format!(
        r#"{{"d":3,"noise":{{"v":0.98,"rho_R_exp":{MEASURED_REGISTER}}},
            "probe":{{"waveplates_deg":[26.6,5.9]}},
            "measurement":{{"elements":[
                [[[0.5003,0],[0.2027,0.4571]],[[0.2027,-0.4571],[0.4997,0]]],
                [[[0,0],[0,0]],[[0,0],[0,0]]],
                [[[0.4997,0],[-0.2027,-0.4571]],[[-0.2027,0.4571],[0.5003,0]]]]}}}}"#
    );
    let path = write(dir.path(), "d3.json", &d3);
    let v: Value = serde_json::from_str(&stdout(&ugame(&["simulate", &path, "--format", "json"]))).unwrap();
    assert!((v["p_guess"].as_f64().unwrap() - 0.9554).abs() < 1e-3);

    let d2 = format!(
        r#"{{"d":2,"noise":{{"v":0.99,"rho_R_exp":{MEASURED_REGISTER}}},
            "probe":{{"amplitudes":[[0.92388,0],[-0.38268,0]]}},
            "measurement":"optimal"}}"#
    );
    let path = write(dir.path(), "d2.json", &d2);
    let rows = csv_rows(&stdout(&ugame(&["simulate", &path])));
    assert_eq!(rows.len(), 4);
    assert!(num(&rows[0][3]) >= 0.9953 - 5e-4);

    let ideal = r#"{"d":2,"gamma":1.0,"noise":{"v":1.0},"probe":{"waveplates_deg":[11.25]},"measurement":"optimal"}"#;
    let path = write(dir.path(), "ideal.json", ideal);
    let rows = csv_rows(&stdout(&ugame(&["simulate", &path])));
    assert_eq!(rows[0][3], "1.000000");

    let bad = write(dir.path(), "bad.json", r#"{"d":3,"noise":{"v":0.98},"probe":{"waveplates_deg":[1.0]},"measurement":"optimal"}"#);
    assert_eq!(ugame(&["simulate", &bad]).status.code(), Some(2));
    let unknown = write(dir.path(), "unknown.json", r#"{"d":2,"noise":{"v":0.98},"probe":{"amplitudes":[[1,0],[0,0]]},"measurement":"optimal","extra":1}"#);
    assert_eq!(ugame(&["simulate", &unknown]).status.code(), Some(2));
}

#[test]
fn estimate_measured_register() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "rho.json", MEASURED_REGISTER);
    let rows = csv_rows(&stdout(&ugame(&["estimate-gamma", &path])));
    assert!((num(&rows[0][0]) - 0.9918).abs() <= 2e-4);
    assert!(num(&rows[0][1]) >= 0.9995);
    let not_state = write(dir.path(), "neg.json", "[[[1.5,0],[0,0]],[[0,0],[-0.5,0]]]");
    assert_eq!(ugame(&["estimate-gamma", &not_state]).status.code(), Some(2));
}

#[test]
fn bad_thread_cap_is_rejected() {
    let o = Command::new(env!("CARGO_BIN_EXE_ugame"))
        .arg("table2")
        .env("UGAME_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}
