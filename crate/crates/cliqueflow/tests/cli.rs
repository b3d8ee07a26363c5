//! End-to-end checks of the command-line interface, both in-process and
//! against the compiled binary.

use std::io::Write as _;
use std::process::Command;

use cliqueflow::cli::{run, serialize_dimacs, serialize_edgelist};
use cliqueflow::{Graph, LoadVector};

fn run_cli(args: &[&str]) -> (i32, String, String) {
    let argv: Vec<String> = std::iter::once("cliqueflow".to_string())
        .chain(args.iter().map(|s| s.to_string()))
        .collect();
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(&argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn write_file(dir: &tempfile::TempDir, name: &str, contents: &str) -> String {
    let path = dir.path().join(name);
    std::fs::File::create(&path)
        .unwrap()
        .write_all(contents.as_bytes())
        .unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn binary_emits_json_on_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_file(&dir, "c5.edges", &serialize_edgelist(&Graph::cycle(5).unwrap()));
    let output = Command::new(env!("CARGO_BIN_EXE_cliqueflow"))
        .args(["--input", &path, "--load", "2.0"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_slice(&output.stdout).unwrap();
    assert_eq!(json["method"], "closed-form/odd-cycle");
    assert_eq!(json["n"], 5);
    assert_eq!(json["edge_count"], 5);
    assert_eq!(json["omega"], 2);
    // flow = c * D^2 / 4 with D = 2
    assert!((json["flow"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!((json["bound"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn exit_codes_follow_error_classes() {
    let dir = tempfile::tempdir().unwrap();
    let ok = write_file(&dir, "k3.edges", "0 1\n1 2\n0 2\n");

    let (code, _, _) = run_cli(&["--input", &ok]);
    assert_eq!(code, 0);

    // missing file: i/o error
    let (code, _, err) = run_cli(&["--input", dir.path().join("nope").to_str().unwrap()]);
    assert_eq!(code, 2, "{err}");

    // malformed content: parse error
    let bad = write_file(&dir, "bad.edges", "0 1\n1 x\n");
    let (code, _, err) = run_cli(&["--input", &bad]);
    assert_eq!(code, 2);
    assert!(err.contains("line 2"), "stderr: {err}");

    // invalid arguments
    let (code, _, _) = run_cli(&["--input", &ok, "--load", "-1"]);
    assert_eq!(code, 3);
    let (code, _, _) = run_cli(&["--input", &ok, "--method", "closed-form"]);
    assert_eq!(code, 0); // K3 is complete, closed form applies
    let petersen = write_file(&dir, "p.edges", &serialize_edgelist(&Graph::petersen()));
    let (code, _, _) = run_cli(&["--input", &petersen, "--method", "closed-form"]);
    assert_eq!(code, 3); // general class rejected by the closed-form method
    let (code, _, _) = run_cli(&["--input", &petersen, "--method", "oracle", "--granularity", "100"]);
    assert_eq!(code, 3); // oracle guard exceeded
    let (code, _, _) = run_cli(&["--no-such-flag"]);
    assert_eq!(code, 3);
}

#[test]
fn edgeless_graph_reports_zero_flow() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_file(&dir, "lonely.edges", "n 4\n");
    let (code, out, err) = run_cli(&["--input", &path]);
    assert_eq!(code, 0, "{err}");
    let json: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(json["flow"].as_f64().unwrap(), 0.0);
    assert_eq!(json["omega"], 1);
    assert_eq!(json["bound"].as_f64().unwrap(), 0.0);
}

#[test]
fn dimacs_warning_goes_to_stderr() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_file(&dir, "odd.col", "p edge 3 9\ne 1 2\ne 2 3\n");
    let (code, out, err) = run_cli(&["--input", &path]);
    assert_eq!(code, 0);
    assert!(err.contains("warning"));
    let json: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(json["edge_count"], 2);
}

#[test]
fn trace_is_opt_in() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_file(&dir, "c5.edges", &serialize_edgelist(&Graph::cycle(5).unwrap()));
    let (code, out, _) = run_cli(&["--input", &path, "--method", "transform"]);
    assert_eq!(code, 0);
    let json: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!(json.get("trace").is_none());

    let (code, out, _) = run_cli(&["--input", &path, "--method", "transform", "--trace"]);
    assert_eq!(code, 0);
    let json: serde_json::Value = serde_json::from_str(&out).unwrap();
    let trace = json["trace"].as_array().unwrap();
    assert!(!trace.is_empty());
    for step in trace {
        assert!(step["flow_after"].as_f64().unwrap() >= step["flow_before"].as_f64().unwrap() - 1e-12);
        assert!(step["rule"].is_string());
    }
}

#[test]
fn initial_loads_drive_the_transform() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_file(&dir, "c5.edges", &serialize_edgelist(&Graph::cycle(5).unwrap()));
    let loads = write_file(&dir, "start.txt", "0.2\n0.2\n0.2\n0.2\n0.2\n");
    let (code, out, err) = run_cli(&[
        "--input", &path, "--method", "transform", "--initial", &loads,
    ]);
    assert_eq!(code, 0, "{err}");
    let json: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!((json["flow"].as_f64().unwrap() - 0.25).abs() < 1e-12);

    // wrong length is an argument error
    let short = write_file(&dir, "short.txt", "0.5\n0.5\n");
    let (code, _, _) = run_cli(&["--input", &path, "--method", "transform", "--initial", &short]);
    assert_eq!(code, 3);

    // wrong sum is an argument error
    let wrong = write_file(&dir, "wrong.txt", "0.5\n0.5\n0.5\n0.5\n0.5\n");
    let (code, _, _) = run_cli(&["--input", &path, "--method", "transform", "--initial", &wrong]);
    assert_eq!(code, 3);
}

#[test]
fn reports_are_internally_consistent_across_methods() {
    let dir = tempfile::tempdir().unwrap();
    for seed in 0..6u64 {
        let g = Graph::gnp(8, 0.5, 0xC11_0000 + seed).unwrap();
        if g.edge_count() == 0 {
            continue;
        }
        let path = write_file(&dir, &format!("g{seed}.edges"), &serialize_edgelist(&g));
        let mut flows = Vec::new();
        for method in ["auto", "transform", "qp", "replicator", "oracle"] {
            let (code, out, err) = run_cli(&[
                "--input", &path, "--method", method, "--granularity", "12", "--seed", "1",
            ]);
            assert_eq!(code, 0, "method {method}: {err}");
            let json: serde_json::Value = serde_json::from_str(&out).unwrap();
            let flow = json["flow"].as_f64().unwrap();
            let loads: Vec<f64> = json["loads"]
                .as_array()
                .unwrap()
                .iter()
                .map(|v| v.as_f64().unwrap())
                .collect();
            let recomputed = g.flow(&LoadVector::with_total(loads, 1.0).unwrap()).unwrap();
            assert!(
                (flow - recomputed).abs() <= 1e-12,
                "method {method}: reported {flow} recomputes to {recomputed}"
            );
            flows.push((method, flow));
        }
        let auto_flow = flows
            .iter()
            .find(|(m, _)| *m == "auto")
            .map(|&(_, f)| f)
            .unwrap();
        for &(method, flow) in &flows {
            assert!(
                auto_flow >= flow - 1e-9,
                "auto ({auto_flow}) reported below {method} ({flow})"
            );
        }
    }
}

#[test]
fn dimacs_round_trip_through_binary() {
    let dir = tempfile::tempdir().unwrap();
    let g = Graph::complete(4).unwrap();
    let path = write_file(&dir, "k4.clq", &serialize_dimacs(&g));
    let output = Command::new(env!("CARGO_BIN_EXE_cliqueflow"))
        .args(["--input", &path, "--method", "replicator", "--restarts", "8"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_slice(&output.stdout).unwrap();
    assert!((json["flow"].as_f64().unwrap() - 0.375).abs() < 1e-6);
    assert_eq!(json["omega"], 4);
    assert!(json["diagnostics"]["converged"].as_bool().unwrap());
}
