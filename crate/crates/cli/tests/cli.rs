use std::path::Path;
use std::process::{Command, Output};

use drinfeld::field::{parse_poly, parse_ratfunc, Fq};
use serde_json::Value;

const CARLITZ3: &str = r#"{"p":3,"e":1,"r":1,"a":["1"]}"#;
const CARLITZ2: &str = r#"{"p":2,"e":1,"r":1,"a":["1"]}"#;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_drinfeld")).args(args).output().expect("spawn")
}

fn run_env(args: &[&str], key: &str, val: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_drinfeld")).args(args).env(key, val).output().expect("spawn")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json")
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn height_of_one_over_t() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "c3.json", CARLITZ3);
    let v = json(&run(&["height", "--module", &m, "--x", "1/t"]));
    assert_eq!(v["total"], "10/9");
    let places = v["places"].as_array().unwrap();
    let t = places.iter().find(|p| p["place"] == "t").unwrap();
    assert_eq!(t["value"], "1");
    let inf = places.iter().find(|p| p["place"] == "inf").unwrap();
    assert_eq!(inf["value"], "1/9");
}

#[test]
fn torsion_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "c2.json", CARLITZ2);
    let v = json(&run(&["torsion", "--module", &m, "--x", "t"]));
    assert_eq!(v, serde_json::json!({"verdict": "torsion", "annihilator": "t"}));
}

#[test]
fn haar_exact_value() {
    let v = json(&run(&["haar", "--q", "3", "--r", "1", "--N", "8"]));
    assert_eq!(v["exact"], "-1/2");
    assert_eq!(v["tail_bound"], "1/729");
}

#[test]
fn torsion_base_is_a_precondition_failure() {
    let out = run(&["scan", "--module", "carlitz:2", "--beta", "1", "--max-deg", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("t^2+t"));
}

#[test]
fn malformed_input_is_a_parse_failure() {
    assert_eq!(run(&["height", "--module", "carlitz:3", "--x", "1/(t"]).status.code(), Some(3));
    assert_eq!(run(&["height", "--module", "carlitz:3"]).status.code(), Some(3));
    assert_eq!(run(&["haar", "--q", "3", "--r", "1", "--N", "2", "--bogus"]).status.code(), Some(3));
    let bad_module = r#"{"p":3,"e":1,"r":1,"a":["0"]}"#;
    assert_eq!(run(&["height", "--module", bad_module, "--x", "1"]).status.code(), Some(3));
    let unknown_field = r#"{"p":3,"e":1,"r":1,"a":["1"],"extra":0}"#;
    assert_eq!(run(&["height", "--module", unknown_field, "--x", "1"]).status.code(), Some(3));
}

#[test]
fn output_is_deterministic() {
    let args = ["scan", "--module", "carlitz:3", "--beta", "1/t", "--max-deg", "2", "--seed", "11"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let cfg = format!(r#"{{"command":"height","module":{CARLITZ3},"params":{{"x":"1"}},"out":"{}"}}"#, out.display());
    let c = write(dir.path(), "cfg.json", &cfg);
    let status = run(&["--config", &c]);
    assert!(status.status.success());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["total"], "1/3");

    let over = run(&["--config", &c, "--x", "1/t", "--out", "-"]);
    assert_eq!(json(&over)["total"], "10/9");

    let bad = write(dir.path(), "bad.json", r#"{"command":"haar","nonsense":true}"#);
    assert_eq!(run(&["--config", &bad]).status.code(), Some(3));
}

#[test]
fn csv_tables() {
    let out = run(&["ball-report", "--module", "carlitz:3", "--q", "t^3", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "log_radius,count,cumulative_count,packet_fraction,ball_mass");
    assert_eq!(lines[1..], ["-3/2,2,2,1/13,1/9", "-1/2,6,8,4/13,1/3", "1/2,18,26,1,1"]);
    assert_eq!(run(&["torsion", "--module", "carlitz:3", "--x", "1", "--format", "csv"]).status.code(), Some(3));
}

#[test]
fn emitted_strings_reparse() {
    let f3 = Fq::prime(3).unwrap();
    let v = json(&run(&["convergence", "--module", "carlitz:3", "--beta", "1/t", "--n", "3"]));
    for row in v["rows"].as_array().unwrap() {
        let q = row["q"].as_str().unwrap();
        assert_eq!(parse_poly(&f3, q).unwrap().to_string(), q);
        for cell in row["places"].as_array().unwrap() {
            let p = cell["place"].as_str().unwrap();
            if p != "inf" {
                assert_eq!(parse_poly(&f3, p).unwrap().to_string(), p);
            }
        }
        assert_eq!(row["sum"], "0");
    }
    let v = json(&run(&["factor", "--p", "3", "--f", "2*t^5+t^2+1"]));
    for f in v["factors"].as_array().unwrap() {
        let s = f["factor"].as_str().unwrap();
        assert_eq!(parse_ratfunc(&f3, s).unwrap().to_string(), s);
    }
}

#[test]
fn every_verb_runs() {
    let cases: [&[&str]; 13] = [
        &["factor", "--p", "2", "--e", "2", "--modulus", "1,1,1", "--f", "t^4+t"],
        &["height", "--module", "carlitz:3", "--x", "t"],
        &["local-height", "--module", "carlitz:3", "--x", "1/t", "--place", "t"],
        &["torsion", "--module", "carlitz:3", "--x", "1"],
        &["packet-profile", "--module", "carlitz:3", "--q", "t^2", "--beta", "1/t", "--place", "t+1"],
        &["integrality", "--module", "carlitz:3", "--q", "t", "--beta", "t^2"],
        &["scan", "--module", "carlitz:3", "--beta", "1/t", "--max-deg", "1"],
        &["convergence", "--module", "carlitz:3", "--beta", "1/t", "--q-list", "t,t^2"],
        &["haar", "--q", "4", "--r", "2", "--N", "2", "--brute"],
        &["count", "--p", "3", "--Q", "t^2+1", "--target", "1", "--target", "2,0", "--brute"],
        &["ball-report", "--module", "carlitz:3", "--q", "t^2"],
        &["example-ih", "--p", "3", "--n", "1,2"],
        &["bosser", "--module", "carlitz:3", "--beta", "1", "--n", "4"],
    ];
    for args in cases {
        let out = run(args);
        assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        serde_json::from_slice::<Value>(&out.stdout).expect("json output");
    }
}

#[test]
fn integrality_none_verdict() {
    let v = json(&run(&["integrality", "--module", "carlitz:3", "--q", "t", "--beta", "t^2"]));
    assert_eq!(v["verdict"], "NONE");
}

#[test]
fn factor_cache_directory_is_populated() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let out = run_env(&["height", "--module", "carlitz:3", "--x", "1/(t^2+1)"], "DRINFELD_CACHE", &cache);
    assert!(out.status.success());
    assert!(std::fs::read_dir(&cache).map(|d| d.count() > 0).unwrap_or(false));
}
