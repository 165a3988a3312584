use std::path::Path;
use std::process::{Command, Output};

fn frontier(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_frontier")).args(args).output().expect("run frontier")
}

fn path(p: &Path) -> &str {
    p.to_str().expect("utf-8 path")
}

#[test]
fn simulate_then_estimate() {
    let dir = tempfile::tempdir().unwrap();
    let sample = dir.path().join("sample.csv");
    let out = frontier(&["simulate", "--frontier", "affine:1,0.5", "--n", "500", "--seed", "3", "--out", path(&sample)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&sample).unwrap();
    assert!(text.starts_with("# n=500 c=1 seed=3 frontier=affine:1,0.5\nx,y\n"), "{text}");

    let json = dir.path().join("estimate.json");
    let out = frontier(&["estimate", path(&sample), "--hprime", "2", "--dn", "4", "--out", path(&json)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let bundle: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(bundle["partition"]["k_n"], 16);
    assert_eq!(bundle["coefficients"].as_array().unwrap().len(), 4);
    let z = bundle["z_n"].as_f64().unwrap();
    let f_hat = bundle["f_hat"]["values"][0].as_f64().unwrap();
    let f_tilde = bundle["f_tilde"]["values"][0].as_f64().unwrap();
    assert!((f_tilde - f_hat - z).abs() < 1e-12);

    // Same seed, same sample.
    let again = frontier(&["simulate", "--frontier", "affine:1,0.5", "--n", "500", "--seed", "3"]);
    assert_eq!(again.stdout, text.as_bytes());
}

#[test]
fn list_presets_names_every_experiment() {
    let out = frontier(&["list-presets"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in ["cell_law", "local_bias", "variance", "mise", "supnorm", "weibull", "gumbel", "gaussian", "zn_moments"] {
        assert!(text.lines().any(|l| l.starts_with(name)), "{name} missing");
    }
    assert!(text.contains("k_n = o(n/ln n)"));
}

#[test]
fn experiment_writes_csv_and_manifest_with_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("zn.cfg");
    std::fs::write(&cfg, "# small run\nschedule = 2000:2:4\nreplicates = 400\nseed = 12\n").unwrap();
    let out_dir = dir.path().join("out");
    let out = frontier(&[
        "experiment", "zn_moments", "--config", path(&cfg), "--replicates", "300", "--out", path(&out_dir),
        "--workers", "2",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(out_dir.join("zn_moments.csv")).unwrap();
    assert!(csv.lines().nth(1).unwrap().starts_with("zn_moments,constant:1,2000,1,3,4,16,"));
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("zn_moments.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["config"]["replicates"], 300);
    assert_eq!(manifest["seed"], 12);
    assert!(manifest["wall_time_secs"].as_f64().unwrap() >= 0.0);
}

#[test]
fn exit_codes() {
    assert_eq!(frontier(&["--help"]).status.code(), Some(0));
    assert_eq!(frontier(&["--bogus"]).status.code(), Some(1));
    assert_eq!(frontier(&["experiment", "nonsense"]).status.code(), Some(1));
    assert_eq!(frontier(&["simulate", "--frontier", "wobbly:1", "--n", "10"]).status.code(), Some(1));
    assert_eq!(frontier(&["experiment", "gumbel", "--dn", "4", "--replicates", "5"]).status.code(), Some(1));

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "unknown_key = 3\n").unwrap();
    assert_eq!(frontier(&["experiment", "variance", "--config", path(&cfg)]).status.code(), Some(1));

    // The corrected Gaussian check fails at n c/k_n = 4; --strict turns
    // that into exit code 2, without it the run succeeds.
    let out = path(dir.path());
    let args = ["experiment", "gaussian", "--replicates", "500", "--out", out];
    assert_eq!(frontier(&args).status.code(), Some(0));
    let strict: Vec<&str> = args.iter().copied().chain(["--strict"]).collect();
    assert_eq!(frontier(&strict).status.code(), Some(2));
}
