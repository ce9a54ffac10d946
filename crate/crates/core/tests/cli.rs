//! End-to-end runs of the `catmap` binary.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn catmap(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_catmap"))
        .arg("--out-dir")
        .arg(out)
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(out: &Path, args: &[&str]) {
    let o = catmap(out, args);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
}

fn json(path: &Path) -> Value {
    serde_json::from_slice(&std::fs::read(path).unwrap()).unwrap()
}

fn column(path: &Path, name: &str) -> Vec<f64> {
    let mut rdr = csv::Reader::from_path(path).unwrap();
    let idx = rdr.headers().unwrap().iter().position(|h| h == name).unwrap();
    rdr.records().map(|r| r.unwrap()[idx].parse().unwrap()).collect()
}

#[test]
fn poincare_default_has_three_orbits_and_is_reproducible() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    ok(a.path(), &["poincare"]);
    ok(b.path(), &["poincare"]);
    let ids = column(&a.path().join("poincare.csv"), "orbit_id");
    let mut distinct = ids.clone();
    distinct.dedup();
    assert_eq!(distinct, vec![0.0, 1.0, 2.0]);
    for f in ["poincare.csv", "manifest.json"] {
        assert_eq!(std::fs::read(a.path().join(f)).unwrap(), std::fs::read(b.path().join(f)).unwrap(), "{f}");
    }
    let manifest = json(&a.path().join("manifest.json"));
    assert_eq!(manifest["command"], "poincare");
    assert_eq!(manifest["config_digest"].as_str().unwrap().len(), 64);
}

#[test]
fn bad_config_exits_with_config_code() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(catmap(d.path(), &["poincare", "--set", "poincare_iters=0"]).status.code(), Some(2));
    assert_eq!(catmap(d.path(), &["evolve", "--set", "n_qubits=4"]).status.code(), Some(2));
    assert_eq!(catmap(d.path(), &["gatecount", "--set", "nonsense=1"]).status.code(), Some(2));
    assert_eq!(catmap(d.path(), &["evolve", "--backend", "oracle", "--set", "epsilon=0.01"]).status.code(), Some(2));
    assert_eq!(catmap(d.path(), &["frobnicate"]).status.code(), Some(2));
    let missing = d.path().join("absent.cfg");
    assert_eq!(catmap(d.path(), &["gatecount", "--config", missing.to_str().unwrap()]).status.code(), Some(4));
}

#[test]
fn flat_series_fit_exits_with_numerical_code() {
    let d = tempfile::tempdir().unwrap();
    let input = d.path().join("flat.csv");
    let mut text = String::from("t,W_a\n");
    for t in 0..64 {
        text.push_str(&format!("{t},0.5\n"));
    }
    std::fs::write(&input, text).unwrap();
    let o = catmap(d.path(), &["fit", "--set", &format!("fit_input={}", input.display())]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn config_file_and_show_config() {
    let d = tempfile::tempdir().unwrap();
    let cfg = d.path().join("run.cfg");
    std::fs::write(&cfg, "# gate tally at seven qubits\nn_qubits = 7\n").unwrap();
    let o = catmap(d.path(), &["--config", cfg.to_str().unwrap(), "--show-config"]);
    assert!(o.status.success());
    let shown = String::from_utf8(o.stdout).unwrap();
    assert!(shown.contains("n_qubits = 7"));
    assert!(shown.contains("sweep_epsilon = 0.005,0.01,0.02"));
    ok(d.path(), &["gatecount", "--config", cfg.to_str().unwrap()]);
    assert_eq!(json(&d.path().join("gatecount.json"))["n_qubits"], 7);
}

#[test]
fn evolve_backends_agree_and_zero_iterations_gives_initial_state() {
    let (c, o) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    ok(c.path(), &["evolve", "--backend", "circuit"]);
    ok(o.path(), &["evolve", "--backend", "oracle"]);
    let (wc, wo) = (column(&c.path().join("wa.csv"), "W_a"), column(&o.path().join("wa.csv"), "W_a"));
    assert_eq!(wc.len(), 181);
    assert!(wc.iter().zip(&wo).all(|(x, y)| (x - y).abs() < 1e-6));
    // the first tunneling minimum, ignoring the small intra-well wiggle
    let first_min = (0..=90).min_by(|&i, &j| wc[i].total_cmp(&wc[j])).unwrap();
    assert!((35..=55).contains(&first_min), "first minimum at {first_min}");

    let z = tempfile::tempdir().unwrap();
    ok(z.path(), &["evolve", "--set", "iterations=0"]);
    assert_eq!(column(&z.path().join("wa.csv"), "t"), vec![0.0]);
    let w = column(&z.path().join("wx.csv"), "W");
    let p = catmap::MapParams::new(0.04, 1.6, 6).unwrap();
    let expect = catmap::distribution(&catmap::init_coherent(&p, -1.6, 0.0).unwrap());
    assert_eq!(w.len(), expect.len());
    assert!(w.iter().zip(&expect).all(|(x, y)| (x - y).abs() < 1e-15));
}

#[test]
fn noisy_evolve_is_byte_reproducible_and_seed_sensitive() {
    let (a, b, c) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let args = ["evolve", "--set", "epsilon=0.02", "--set", "realizations=4", "--set", "iterations=60"];
    ok(a.path(), &args);
    ok(b.path(), &[&args[..], &["--workers", "1"]].concat());
    ok(c.path(), &[&args[..], &["--seed", "2"]].concat());
    let read = |d: &tempfile::TempDir| std::fs::read(d.path().join("wa.csv")).unwrap();
    assert_eq!(read(&a), read(&b));
    assert_ne!(read(&a), read(&c));
}

#[test]
fn fit_reports_the_tunneling_period() {
    let d = tempfile::tempdir().unwrap();
    ok(d.path(), &["fit"]);
    let fit = json(&d.path().join("fit.json"));
    let t = fit["T_u"].as_f64().unwrap();
    assert!((t / 90.0 - 1.0).abs() < 0.05, "T_u = {t}");
    assert_eq!(fit["input_digest"].as_str().unwrap().len(), 64);
    for key in ["gamma", "amplitude", "phase", "baseline", "rms_residual", "config_digest", "seed", "version"] {
        assert!(fit.get(key).is_some(), "{key}");
    }

    // refitting the written series through fit_input gives the same answer
    let e = tempfile::tempdir().unwrap();
    ok(e.path(), &["evolve"]);
    let wa = e.path().join("wa.csv");
    ok(e.path(), &["fit", "--set", &format!("fit_input={}", wa.display())]);
    assert_eq!(json(&e.path().join("fit.json"))["T_u"], fit["T_u"]);
}

#[test]
fn gatecount_tallies() {
    let d = tempfile::tempdir().unwrap();
    ok(d.path(), &["gatecount", "--set", "dump_gates=true"]);
    let g = json(&d.path().join("gatecount.json"));
    let parts: u64 = ["kick_toffoli", "kick_phase", "qft_h", "qft_cphase", "kinetic_phase"]
        .iter()
        .map(|k| g[k].as_u64().unwrap())
        .sum();
    let total = g["total"].as_u64().unwrap();
    assert_eq!(parts, total);
    assert!((1045..=4180).contains(&total), "total {total}");
    let dump = std::fs::read_to_string(d.path().join("gates.txt")).unwrap();
    assert_eq!(dump.lines().count() as u64, total);
}

#[test]
fn compare_oracle_at_seven_qubits() {
    let d = tempfile::tempdir().unwrap();
    ok(d.path(), &["compare-oracle", "--set", "n_qubits=7"]);
    let r = json(&d.path().join("compare.json"));
    assert_eq!(r["iterations"], 100);
    assert!(r["min_fidelity"].as_f64().unwrap() >= 1.0 - 1e-8);
    assert_eq!(column(&d.path().join("compare.csv"), "fidelity").len(), 100);
}

#[test]
fn small_sweep_writes_canonical_table() {
    let d = tempfile::tempdir().unwrap();
    let args = [
        "sweep",
        "--set",
        "sweep_n_qubits=6",
        "--set",
        "sweep_epsilon=0.02,0,0.01",
        "--set",
        "sweep_iterations=400",
        "--set",
        "realizations=4",
    ];
    ok(d.path(), &args);
    let text = std::fs::read_to_string(d.path().join("sweep.csv")).unwrap();
    assert_eq!(text.lines().next().unwrap(), "n_q,K,a,epsilon,seed,realizations,T_u,gamma,rms_residual,status");
    let eps = column(&d.path().join("sweep.csv"), "epsilon");
    assert_eq!(eps, vec![0.0, 0.01, 0.02]);
    let gamma = column(&d.path().join("sweep.csv"), "gamma");
    assert!(gamma[0].abs() < 1e-6);
    assert!(gamma[1] > 0.0 && gamma[2] > gamma[1]);
    // a single qubit count cannot support the scaling fit
    let scaling = json(&d.path().join("scaling.json"));
    assert!(scaling["status"].as_str().unwrap().contains("insufficient spread"));

    let again = tempfile::tempdir().unwrap();
    ok(again.path(), &args);
    assert_eq!(std::fs::read(again.path().join("sweep.csv")).unwrap(), text.into_bytes());
}
