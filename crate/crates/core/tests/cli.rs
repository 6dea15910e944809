use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn odx(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_odx"))
        .args(args)
        .output()
        .unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn verify_passes_with_exit_zero() {
    let out = odx(&["verify"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v = json(&out);
    assert_eq!(v["schema"], "odx-report/1");
    assert_eq!(v["command"], "verify");
    let checks = v["checks"].as_array().unwrap();
    assert!(checks.len() >= 20);
    for c in checks {
        assert_eq!(c["pass"], true, "{c}");
        assert!(c["measured"].is_number() && c["tolerance"].is_number());
    }
    assert_eq!(
        v["results"]["decomposition"]["discrepancy"]
            .as_array()
            .unwrap()
            .len(),
        4
    );
}

#[test]
fn fault_injection_exits_one() {
    let out = odx(&["verify", "--perturb-theta1", "0.001"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    let failed: Vec<&str> = v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["pass"] == false)
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert!(failed.contains(&"decomposition_matches_u1"), "{failed:?}");
    // The reported discrepancy matrix carries the deviation.
    let max = v["results"]["decomposition"]["max_deviation"]
        .as_f64()
        .unwrap();
    assert!(max > 1e-10);

    let out = odx(&["verify", "--perturb-probe", "-0.01"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn usage_and_parse_errors_exit_two() {
    assert_eq!(odx(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(odx(&["sample", "--shots", "many"]).status.code(), Some(2));
    assert_eq!(odx(&["sample", "--shots", "0"]).status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let fam = dir.path().join("fam.txt");
    fs::write(&fam, "n=1 m=1 table=0,0\nn=1 m=1 table=1,q\n").unwrap();
    let out = odx(&["gram", "--family", fam.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2"), "{err}");

    let probe = dir.path().join("probe.txt");
    fs::write(&probe, "1 0\n0 0\n0 0\n").unwrap();
    let out = odx(&["srm", "--probe", probe.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("power of two"));

    let missing = dir.path().join("missing.txt");
    assert_eq!(
        odx(&["classical", "--family", missing.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn probe_file_is_normalized_with_warning() {
    let dir = tempfile::tempdir().unwrap();
    let probe = dir.path().join("probe.txt");
    // Twice the closed-form probe (a, b, a, b) with a, b written out.
    let a = (1.0 + 2f64.sqrt()) / (2.0 * 3f64.sqrt());
    let b = (1.0 - 2f64.sqrt()) / (2.0 * 3f64.sqrt());
    fs::write(
        &probe,
        format!(
            "# doubled\n{} 0\n{} 0\n{} 0\n{} 0\n",
            2.0 * a,
            2.0 * b,
            2.0 * a,
            2.0 * b
        ),
    )
    .unwrap();
    let out = odx(&["srm", "--probe", probe.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
    let v = json(&out);
    let avg = v["results"]["report"]["average_success"].as_f64().unwrap();
    assert!((avg - 0.75).abs() < 1e-12);
    assert_eq!(v["results"]["optimality"]["certified"], true);
}

#[test]
fn formats_and_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.csv");
    let out = odx(&[
        "classical",
        "--format",
        "csv",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let csv = fs::read_to_string(&path).unwrap();
    assert!(csv.starts_with("kind,name,value,pass,expected,tolerance\n"));
    assert!(csv.contains("check,classical_baseline,0.5,true"));

    let text = odx(&["gram", "--format", "text"]);
    assert_eq!(text.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&text.stdout).contains("trace_sqrt_gram = 3.46410161513775"));
}

#[test]
fn sample_and_optimize_are_deterministic() {
    let a = odx(&["sample", "--shots", "20000", "--seed", "9"]);
    let b = odx(&["sample", "--shots", "20000", "--seed", "9"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    let hist = v["results"]["histograms"]["f2"].as_array().unwrap();
    assert_eq!(hist.iter().map(|x| x.as_u64().unwrap()).sum::<u64>(), 20000);

    let o1 = odx(&["optimize", "--restarts", "4", "--seed", "3"]);
    let o2 = odx(&["optimize", "--restarts", "4", "--seed", "3"]);
    assert_eq!(o1.status.code(), Some(0));
    assert_eq!(o1.stdout, o2.stdout);
    let best = json(&o1)["results"]["best_value"].as_f64().unwrap();
    assert!((best - 0.75).abs() < 1e-6);
}

#[test]
fn custom_family_through_cli() {
    let dir = tempfile::tempdir().unwrap();
    let fam = dir.path().join("fam.txt");
    fs::write(
        &fam,
        "# constant functions only\nn=1 m=1 table=0,0\nn=1 m=1 table=1,1\n",
    )
    .unwrap();
    let out = odx(&["srm", "--family", fam.to_str().unwrap()]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v = json(&out);
    assert_eq!(v["inputs"]["family"].as_array().unwrap().len(), 2);
    let out = odx(&["classical", "--family", fam.to_str().unwrap()]);
    let v = json(&out);
    // Any query distinguishes the two constants classically.
    assert_eq!(v["results"]["classical_success"].as_f64().unwrap(), 1.0);
}
