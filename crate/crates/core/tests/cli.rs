use std::fs;
use std::path::Path;

use marginal_udp::cli::{run_with, EXIT_ARGUMENT, EXIT_INCONCLUSIVE, EXIT_OK};
use marginal_udp::states::MarginalSetJson;

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run_with(std::iter::once("marginal-udp").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn sample_then_marginals() {
    let dir = tempfile::tempdir().unwrap();
    let s = dir.path().join("s.json");
    let m = dir.path().join("m.json");
    assert_eq!(call(&["sample", "--dims", "2,2,2,2", "--seed", "1", "-o", path_str(&s)]).0, EXIT_OK);
    assert_eq!(call(&["marginals", path_str(&s), "--config", "AB", "-o", path_str(&m)]).0, EXIT_OK);
    let set: MarginalSetJson = serde_json::from_str(&fs::read_to_string(&m).unwrap()).unwrap();
    assert_eq!(set.marginals.len(), 1);
    assert_eq!(set.marginals[0].re.len(), 4);
    assert!(set.marginals[0].re.iter().all(|r| r.len() == 4));
    let rho = set.marginals.into_iter().next().unwrap().into_density().unwrap();
    assert!((rho.trace() - 1.0).abs() < 1e-12);
}

#[test]
fn unnormalized_file_needs_flag() {
    let dir = tempfile::tempdir().unwrap();
    let s = dir.path().join("s.json");
    fs::write(&s, r#"{"labels":["A","B"],"dims":[2,2],"re":[1,0,0,1],"im":[0,0,0,0]}"#).unwrap();
    let (code, _, err) = call(&["marginals", path_str(&s), "--config", "A"]);
    assert_eq!(code, EXIT_ARGUMENT);
    assert!(err.contains("renormalize"));
    assert_eq!(call(&["marginals", path_str(&s), "--config", "A", "--renormalize"]).0, EXIT_OK);
}

#[test]
fn certify_from_file_matches_sampled_run() {
    let dir = tempfile::tempdir().unwrap();
    let s = dir.path().join("s.json");
    call(&["sample", "--seed", "7", "-o", path_str(&s)]);
    let (c1, from_seed, _) = call(&["certify", "--seed", "7", "--d", "2", "--config", "AB,CD,BD"]);
    let (c2, from_file, _) = call(&["certify", path_str(&s), "--seed", "7", "--config", "AB,CD,BD"]);
    assert_eq!((c1, c2), (EXIT_OK, EXIT_OK));
    assert_eq!(from_seed, from_file);
    let v: serde_json::Value = serde_json::from_str(&from_seed).unwrap();
    assert_eq!(v["verdict"], "UNIQUE");
    assert_eq!(v["nullspace_dim"], 3);
    assert_eq!(v["span_dim"], 13);
}

#[test]
fn tolerance_flags_are_embedded() {
    let (_, out, _) = call(&["certify", "--seed", "3", "--kernel-tol", "1e-9", "--phase-tol", "1e-7"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["options"]["tolerances"]["kernel_tol"], 1e-9);
    assert_eq!(v["options"]["tolerances"]["phase_tol"], 1e-7);
}

#[test]
fn impossible_tolerance_gives_inconclusive_exit() {
    // No optimizer reaches a negative residual, so neither path can agree.
    let (code, out, _) = call(&["certify", "--seed", "3", "--oracle-residual-tol=-1"]);
    assert_eq!(code, EXIT_INCONCLUSIVE);
    assert!(out.contains("\"INCONCLUSIVE\""));
}

#[test]
fn certify_qutrits() {
    let (code, out, _) = call(&["certify", "--seed", "5", "--d", "3"]);
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["verdict"], "UNIQUE");
    assert_eq!(v["nullspace_dim"], 8);
}

#[test]
fn families_csv_rows() {
    for args in [&["families", "--grid", "20"][..], &["families", "verify", "--grid", "20"][..]] {
        let (code, out, _) = call(args);
        assert_eq!(code, EXIT_OK);
        let mut rdr = csv::Reader::from_reader(out.as_bytes());
        assert_eq!(rdr.headers().unwrap(), vec!["family", "parameters", "max_deviation", "min_fidelity"]);
        let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
        assert!(!rows.is_empty());
        for r in rows {
            assert!(r[2].parse::<f64>().unwrap() <= 1e-10);
        }
    }
}

#[test]
fn survey_is_reproducible_across_job_counts() {
    let base = ["survey", "--config", "AB,AC,BC", "--states", "4", "--restarts", "5", "--seed", "40"];
    let (c1, serial, _) = call(&[&base[..], &["--jobs", "1"]].concat());
    let (c2, parallel, _) = call(&[&base[..], &["--jobs", "3"]].concat());
    assert_eq!((c1, c2), (EXIT_OK, EXIT_OK));
    assert_eq!(serial, parallel);
    let mut rdr = csv::Reader::from_reader(serial.as_bytes());
    assert_eq!(
        rdr.headers().unwrap(),
        vec!["seed", "config", "mismatch", "fidelity_gap", "verdict", "mismatch_tol", "distinct_gap"]
    );
    let seeds: Vec<String> = rdr.records().map(|r| r.unwrap()[0].to_string()).collect();
    assert_eq!(seeds, ["40", "41", "42", "43"]);
}

#[test]
fn survey_json_carries_options() {
    let (code, out, _) =
        call(&["survey", "--config", "AB,CD", "--states", "1", "--restarts", "2", "--seed", "1", "--format", "json"]);
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["options"]["mismatch_tol"], 1e-6);
    assert_eq!(v["rows"].as_array().unwrap().len(), 1);
}

#[test]
fn corollary_output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    assert_eq!(call(&["corollary", "--n", "5", "--seed", "2", "--runs", "2", "-o", path_str(&a)]).0, EXIT_OK);
    assert_eq!(call(&["corollary", "--n", "5", "--seed", "2", "--runs", "2", "--jobs", "2", "-o", path_str(&b)]).0, EXIT_OK);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let v: serde_json::Value = serde_json::from_slice(&fs::read(&a).unwrap()).unwrap();
    assert_eq!(v["runs"][1]["seed"], 3);
    assert_eq!(v["runs"][0]["verdict"], "UNIQUE");
}

#[test]
fn argument_errors() {
    assert_eq!(call(&[]).0, EXIT_ARGUMENT);
    assert_eq!(call(&["frobnicate"]).0, EXIT_ARGUMENT);
    assert_eq!(call(&["corollary", "--n", "9", "--seed", "1"]).0, EXIT_ARGUMENT);
    assert_eq!(call(&["survey", "--config", "AB", "--seed", "1", "--jobs", "0"]).0, EXIT_ARGUMENT);
    assert_eq!(call(&["marginals", "/nonexistent/file.json", "--config", "AB"]).0, EXIT_ARGUMENT);
    let (code, out, err) = call(&["families", "--grid", "x"]);
    assert_eq!(code, EXIT_ARGUMENT);
    assert!(out.is_empty() && err.starts_with("error:"));
}
