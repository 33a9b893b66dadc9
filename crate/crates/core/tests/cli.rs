//! Black-box tests of the command-line binary: exit codes, manifest
//! emission, and byte-level determinism of the CSV output.

use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mixedweak"))
}

fn workdir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join("mixedweak-cli-tests").join(name);
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write(path: &Path, text: &str) {
    std::fs::write(path, text).unwrap();
}

const VERIFY_CONFIG: &str = r#"{
    "half_width": 4.0,
    "cells": 256,
    "u": {"kind": "constant", "value": 1.0},
    "v": {"kind": "power", "alpha": -0.25},
    "r": 2.0,
    "phi": {"kind": "log_power", "r": 2.0, "delta": 1.0},
    "f": {"kind": "indicator", "low": [-0.125], "side": 0.25},
    "t_points": 6
}"#;

#[test]
fn verify_runs_and_is_deterministic() {
    let dir = workdir("verify-determinism");
    let cfg = dir.join("config.json");
    write(&cfg, VERIFY_CONFIG);
    for out in ["a", "b"] {
        let status = bin()
            .args(["verify", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(dir.join(out))
            .arg("--threads")
            .arg("2")
            .status()
            .unwrap();
        assert!(status.success());
    }
    let a = std::fs::read(dir.join("a/rows.csv")).unwrap();
    let b = std::fs::read(dir.join("b/rows.csv")).unwrap();
    assert_eq!(a, b, "identical config and seed must give byte-identical rows");
    assert!(a.starts_with(b"t,lhs,rhs,ratio,flags\n"));

    let manifest = std::fs::read_to_string(dir.join("a/manifest.json")).unwrap();
    let m: serde_json::Value = serde_json::from_str(&manifest).unwrap();
    assert_eq!(m["command"], "verify");
    assert_eq!(m["seed"], 0);
    assert_eq!(m["config_sha256"].as_str().unwrap().len(), 64);
    for field in ["u", "v", "f", "transform"] {
        assert!(dir.join(format!("a/fields/{field}.bin")).exists());
        assert!(dir.join(format!("a/fields/{field}.json")).exists());
    }
}

#[test]
fn seed_override_changes_manifest() {
    let dir = workdir("verify-seed");
    let cfg = dir.join("config.json");
    write(&cfg, VERIFY_CONFIG);
    let status = bin()
        .args(["verify", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("out"))
        .args(["--seed", "9"])
        .status()
        .unwrap();
    assert!(status.success());
    let m: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("out/manifest.json")).unwrap())
            .unwrap();
    assert_eq!(m["seed"], 9);
}

#[test]
fn nonpositive_threshold_is_a_usage_error() {
    let dir = workdir("decompose-bad");
    let cfg = dir.join("config.json");
    write(
        &cfg,
        r#"{
            "half_width": 4.0,
            "cells": 64,
            "g": {"kind": "indicator", "low": [0.0], "side": 1.0},
            "phi": {"kind": "identity"},
            "lambda": -0.5
        }"#,
    );
    let out = bin()
        .args(["decompose", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("out"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn out_of_class_weight_exits_three() {
    let dir = workdir("verify-hypothesis");
    let cfg = dir.join("config.json");
    write(
        &cfg,
        &VERIFY_CONFIG
            .replace("-0.25", "-0.6")
            .replace("\"cells\": 256", "\"cells\": 1024"),
    );
    let out = bin()
        .args(["verify", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("out"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3), "stderr: {}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn unknown_subcommand_and_missing_config_exit_one() {
    let out = bin().arg("frobnicate").output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let out = bin()
        .args(["verify", "--config", "/nonexistent/config.json"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn decompose_forest_round_trips_as_json() {
    let dir = workdir("decompose-ok");
    let cfg = dir.join("config.json");
    write(
        &cfg,
        r#"{
            "half_width": 4.0,
            "cells": 256,
            "g": {"kind": "indicator", "low": [0.0], "side": 1.0},
            "phi": {"kind": "identity"},
            "lambda": 0.25
        }"#,
    );
    let status = bin()
        .args(["decompose", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("out"))
        .status()
        .unwrap();
    assert!(status.success());
    let forest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("out/forest.json")).unwrap())
            .unwrap();
    assert!(!forest["cubes"].as_array().unwrap().is_empty());
    // cube wire format: {"grid": i, "k": k, "m": [...]}
    let cube = &forest["cubes"][0]["cube"];
    assert!(cube["grid"].is_number() && cube["k"].is_number() && cube["m"].is_array());
}

#[test]
fn claims_command_emits_battery() {
    let dir = workdir("claims-ok");
    let cfg = dir.join("config.json");
    write(
        &cfg,
        r#"{
            "experiment": {
                "half_width": 4.0,
                "cells": 512,
                "u": {"kind": "constant", "value": 1.0},
                "v": {"kind": "power", "alpha": -0.25},
                "r": 2.0,
                "phi": {"kind": "log_power", "r": 2.0, "delta": 1.0},
                "f": {"kind": "indicator", "low": [-0.125], "side": 0.25}
            },
            "t": 0.5,
            "n_trunc": -6
        }"#,
    );
    let status = bin()
        .args(["claims", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("out"))
        .status()
        .unwrap();
    assert!(status.success());
    let battery: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("out/claims.json")).unwrap())
            .unwrap();
    assert!(battery["claim1"]["constant"].as_f64().unwrap().is_finite());
    assert!(!battery["claim2"].as_array().unwrap().is_empty());
    assert_eq!(battery["claim3"].as_array().unwrap().len(), 5);
}
