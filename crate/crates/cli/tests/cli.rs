use std::process::{Command, Output};

use serde_json::Value;

fn walg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_walg")).args(args).output().unwrap()
}

fn json(args: &[&str]) -> (i32, Value) {
    let out = walg(args);
    let v = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (out.status.code().unwrap(), v)
}

fn integer_weights(v: &Value, key: &str) -> Vec<u64> {
    v["reports"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|r| r["weight2"].as_i64().unwrap() % 2 == 0)
        .map(|r| r[key].as_u64().unwrap())
        .collect()
}

#[test]
fn kernel_sl2_regular() {
    let (code, v) = json(&["kernel", "--preset", "sl2-regular", "--max-weight", "12"]);
    assert_eq!(code, 0);
    assert_eq!(integer_weights(&v, "kernel_dim"), vec![1, 0, 1, 1, 2, 2, 4]);
    assert_eq!(v["status"], "pass");
}

#[test]
fn kernel_osp12_and_sl3_subregular() {
    let (code, v) = json(&["kernel", "--preset", "osp1_2-regular", "--max-weight", "8"]);
    assert_eq!(code, 0);
    let dims: Vec<u64> = v["reports"].as_array().unwrap().iter().map(|r| r["kernel_dim"].as_u64().unwrap()).collect();
    assert_eq!(dims, vec![1, 0, 0, 1, 1, 1, 1, 2, 3]);
    let (code, v) = json(&["kernel", "--preset", "sl3-subregular", "--max-weight", "6"]);
    assert_eq!(code, 0);
    assert_eq!(integer_weights(&v, "kernel_dim"), vec![1, 2, 7, 16]);
    // exponential screenings need g_0 to be the Cartan subalgebra
    let out = walg(&["kernel", "--preset", "sl3-subregular", "--screenings", "exponential"]);
    assert_eq!(out.status.code(), Some(2));
    let (code, v) = json(&["kernel", "--preset", "sl2-regular", "--max-weight", "8", "--screenings", "exponential"]);
    assert_eq!(code, 0);
    assert_eq!(integer_weights(&v, "kernel_dim"), vec![1, 0, 1, 1, 2]);
}

#[test]
fn info_reports_generator_weights() {
    let weights = |p: &str| {
        let (code, v) = json(&["info", "--preset", p]);
        assert_eq!(code, 0);
        v["generator_weights"]
            .as_array()
            .unwrap()
            .iter()
            .map(|w| w["weight"].as_str().unwrap().to_string())
            .collect::<Vec<_>>()
    };
    assert_eq!(weights("sl2-regular"), vec!["2"]);
    assert_eq!(weights("osp1_2-regular"), vec!["3/2", "2"]);
    assert_eq!(weights("sl3-subregular"), vec!["1", "1", "2", "2"]);
}

#[test]
fn verify_suites_pass() {
    for args in [
        vec!["verify", "wbn", "--n", "3"],
        vec!["verify", "brst", "--preset", "sl2-regular", "--max-weight", "8"],
        vec!["verify", "wick", "--weight", "4"],
        vec!["verify", "fs", "--n", "3"],
        vec!["verify", "wakimoto", "--n", "3"],
        vec!["verify", "miura", "--preset", "sl2-regular", "--max-weight", "8"],
    ] {
        let (code, v) = json(&args);
        assert_eq!(code, 0, "{args:?}");
        assert_eq!(v["status"], "pass", "{args:?}");
    }
}

#[test]
fn output_is_deterministic() {
    let args = ["verify", "wick", "--preset", "sl3-subregular", "--weight", "4", "--seed", "11"];
    let a = walg(&args);
    let b = walg(&args);
    assert_eq!(a.stdout, b.stdout);
    let (_, v) = json(&args);
    assert_eq!(v["seed"], 11);
}

#[test]
fn out_file_matches_stdout() {
    let dir = std::env::temp_dir().join(format!("walg-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("info.json");
    let out = walg(&["info", "--preset", "sl2-regular", "--out", path.to_str().unwrap()]);
    assert_eq!(std::fs::read(&path).unwrap(), out.stdout);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        vec!["info", "--preset", "nope"],
        vec!["kernel", "--level", "x/y"],
        vec!["kernel", "--preset", "sl2-regular", "--level=-2"],
        vec!["frobnicate"],
        vec!["verify", "wakimoto", "--n", "2"],
        vec!["info", "--datum", "/nonexistent.json", "--labels", "2"],
    ] {
        assert_eq!(walg(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn custom_labels_on_a_preset() {
    // sl3 with labels (0, 1) and the default f
    let (code, v) = json(&["info", "--preset", "sl3-regular", "--labels", "0,2"]);
    assert_eq!(code, 0);
    assert_eq!(v["labels"], serde_json::json!(["0", "1"]));
    let (code, _) = json(&["info", "--preset", "sl2-regular", "--labels", "0"]);
    assert_eq!(code, 2);
}

#[test]
fn table_format() {
    let out = walg(&["kernel", "--preset", "sl2-regular", "--max-weight", "4", "--format", "table"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().next().unwrap().contains("kernel"));
    assert_eq!(text.lines().count(), 6);
}

#[test]
fn datum_file_round_trip() {
    let mut f = walg::superdata::build_sl(3).unwrap().to_file();
    f.grading_labels = Some(vec![0, 2]);
    f.f_support = Some(vec![vec![0, -1]]);
    let dir = std::env::temp_dir().join(format!("walg-datum-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("sl3.json");
    std::fs::write(&path, serde_json::to_string(&f).unwrap()).unwrap();
    let p = path.to_str().unwrap();
    let (code, from_file) = json(&["kernel", "--datum", p, "--max-weight", "4"]);
    assert_eq!(code, 0);
    let (_, from_preset) = json(&["kernel", "--preset", "sl3-subregular", "--max-weight", "4"]);
    assert_eq!(integer_weights(&from_file, "kernel_dim"), integer_weights(&from_preset, "kernel_dim"));
    // explicit labels override the file
    let (code, v) = json(&["info", "--datum", p, "--labels", "2,2"]);
    assert_eq!(code, 0);
    assert_eq!(v["generator_weights"].as_array().unwrap().len(), 2);
    std::fs::remove_dir_all(&dir).unwrap();
}
