use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn skrates(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_skrates")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

fn shipped(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn sweep_csv_format() {
    let o = skrates(&[
        "becbsc",
        "sweep",
        "--zeta",
        "0.01",
        "--eps",
        "0.05",
        "--beta-min",
        "0",
        "--beta-max",
        "1",
        "--steps",
        "5",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = stdout(&o);
    assert!(!text.contains('\r'));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "beta,outer,i_sep,i_sep_1l,i_jscc");
    assert_eq!(lines.len(), 6);
    for line in &lines[1..] {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 5, "{line}");
        for f in fields {
            let (_, frac) = f.split_once('.').unwrap_or_else(|| panic!("no decimal point in {f}"));
            assert_eq!(frac.len(), 6, "{f}");
            f.parse::<f64>().unwrap();
        }
    }
    assert!(lines[1].starts_with("0.000000,"));
    assert!(lines[5].starts_with("1.000000,"));
    assert!(text.ends_with('\n'));
}

#[test]
fn sweep_single_step_and_file_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep.csv");
    let o = skrates(&[
        "becbsc",
        "sweep",
        "--zeta",
        "0.01",
        "--eps",
        "0.05",
        "--beta-min",
        "0.3",
        "--beta-max",
        "0.3",
        "--steps",
        "1",
        "--out",
        path_str(&out),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 2);
    assert!(text.lines().nth(1).unwrap().starts_with("0.300000,"));
}

#[test]
fn sweep_json_matches_csv() {
    let args = [
        "becbsc",
        "sweep",
        "--zeta",
        "0.01",
        "--eps",
        "0.05",
        "--beta-min",
        "0.2",
        "--beta-max",
        "0.6",
        "--steps",
        "3",
    ];
    let csv = stdout(&skrates(&args));
    let mut jargs = args.to_vec();
    jargs.extend(["--format", "json"]);
    let doc = json(&skrates(&jargs));
    let rows = doc["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    for (row, line) in rows.iter().zip(csv.lines().skip(1)) {
        let fields: Vec<f64> = line.split(',').map(|f| f.parse().unwrap()).collect();
        for (i, key) in ["beta", "outer", "i_sep", "i_sep_1l", "i_jscc"].iter().enumerate() {
            assert!((row[key].as_f64().unwrap() - fields[i]).abs() <= 5e-7, "{key}");
        }
    }
}

#[test]
fn sweep_rejects_bad_ranges() {
    let base = ["becbsc", "sweep", "--zeta", "0.01", "--eps", "0.05"];
    for extra in [&["--steps", "0"][..], &["--beta-min", "0.8", "--beta-max", "0.2"], &["--beta-max", "1.5"]] {
        let mut args = base.to_vec();
        args.extend(extra);
        assert_eq!(code(&skrates(&args)), 2, "{extra:?}");
    }
    assert_eq!(code(&skrates(&["becbsc", "sweep", "--zeta", "0.01"])), 2);
    assert_eq!(code(&skrates(&["becbsc", "sweep", "--zeta", "x", "--eps", "0.05"])), 2);
}

#[test]
fn sweep_unwritable_output_is_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("missing").join("sweep.csv");
    let o = skrates(&["becbsc", "sweep", "--zeta", "0.01", "--eps", "0.05", "--steps", "2", "--out", path_str(&out)]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
}

#[test]
fn point_selects_bounds() {
    let all = json(&skrates(&["becbsc", "point", "--zeta", "0.01", "--eps", "0.05", "--beta", "0.2"]));
    for key in ["outer", "i_sep", "i_sep_1l", "i_jscc"] {
        assert!(all[key]["rk"].is_number(), "{key}");
    }
    let outer = all["outer"]["rk"].as_f64().unwrap();
    assert!(all["i_sep"]["rk"].as_f64().unwrap() <= outer + 1e-6);
    let one =
        json(&skrates(&["becbsc", "point", "--zeta", "0.01", "--eps", "0.05", "--beta", "0.2", "--bound", "outer"]));
    assert_eq!(one["outer"], all["outer"]);
    assert!(one.get("i_sep").is_none());
    assert_eq!(code(&skrates(&["becbsc", "point", "--zeta", "0.7", "--eps", "0.05", "--beta", "0.2"])), 2);
}

#[test]
fn classify_regimes() {
    let regime = |beta: &str| json(&skrates(&["classify", "--eps", "0.1", "--beta", beta]))["regime"].clone();
    // 2 eps = 0.2, 4 eps (1 - eps) = 0.36, h2(0.1) = 0.469
    assert_eq!(regime("0.1"), "degraded");
    assert_eq!(regime("0.3"), "less_noisy");
    assert_eq!(regime("0.4"), "more_capable");
    assert_eq!(regime("0.9"), "unordered");
    assert_eq!(code(&skrates(&["classify", "--eps", "0.1", "--beta", "1.2"])), 2);
}

#[test]
fn state_binary_and_gaussian() {
    let b = json(&skrates(&["state", "binary", "--a", "0.5", "--zeta", "0.1", "--beta", "0.0", "--eps", "0.5"]));
    assert!(b["inner"].as_f64().unwrap() <= b["outer"].as_f64().unwrap() + 1e-12);

    let g = json(&skrates(&["state", "gaussian", "--p", "1", "--q", "1", "--n1", "0.5", "--n2", "1"]));
    for key in ["outer", "inner", "gap", "argmax"] {
        assert!(g.get(key).is_some(), "{key}");
    }
    let (outer, inner) = (g["outer"].as_f64().unwrap(), g["inner"].as_f64().unwrap());
    assert!((g["gap"].as_f64().unwrap() - (outer - inner)).abs() <= 1e-12);
    let full = json(&skrates(&["state", "gaussian", "--p", "1", "--q", "1", "--n1", "0.5", "--n2", "1", "--full"]));
    assert!(full["inner"].as_f64().unwrap() >= inner - 1e-9);
    assert_eq!(full["method"], "full");

    let o = skrates(&["state", "gaussian", "--p", "1", "--q", "1", "--n1", "2", "--n2", "1"]);
    assert_eq!(code(&o), 2);
    assert!(!stderr(&o).is_empty());
}

#[test]
fn unknown_flag_is_usage_error() {
    assert_eq!(code(&skrates(&["classify", "--eps", "0.1", "--beta", "0.2", "--bogus"])), 2);
    assert_eq!(code(&skrates(&["frobnicate"])), 2);
}

#[test]
fn shipped_configs_parse() {
    for name in ["joint_in_region.json", "joint_outside.json"] {
        let text = std::fs::read_to_string(shipped(name)).unwrap();
        skrates::config::parse::<skrates::config::JointFile>(&text).unwrap();
    }
    let text = std::fs::read_to_string(shipped("separate_becbsc.json")).unwrap();
    skrates::config::parse::<skrates::config::SeparateFile>(&text).unwrap();
}

#[test]
fn simulate_in_region_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let o = skrates(&[
        "simulate",
        "joint",
        "--config",
        path_str(&shipped("joint_in_region.json")),
        "--out",
        path_str(&out),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(doc["scheme"], "joint");
    assert!(doc["report"]["agreement_rate"].as_f64().unwrap() >= 0.95);
    assert_eq!(doc["acceptance"][0]["pass"], true);
}

#[test]
fn simulate_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = shipped("joint_in_region.json");
    let run = |name: &str, seed: &str| {
        let out = dir.path().join(name);
        let o = skrates(&[
            "simulate",
            "joint",
            "--config",
            path_str(&cfg),
            "--trials",
            "60",
            "--seed",
            seed,
            "--out",
            path_str(&out),
        ]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        std::fs::read(out).unwrap()
    };
    let a = run("a.json", "11");
    assert_eq!(a, run("b.json", "11"));
    let doc: Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(doc["config"]["trials"], 60);
    assert_eq!(doc["config"]["seed"], 11);
}

#[test]
fn simulate_separate_runs() {
    let o = skrates(&["simulate", "separate", "--config", path_str(&shipped("separate_becbsc.json"))]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let doc = json(&o);
    assert_eq!(doc["scheme"], "separate");
    assert!(doc["report"]["decode_errors_by_stage"].is_object());
}

#[test]
fn failed_predicate_exits_4_after_writing() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("strict.json");
    let text = std::fs::read_to_string(shipped("joint_in_region.json")).unwrap();
    std::fs::write(&cfg, text.replace("\"min_agreement\": 0.95", "\"max_leakage\": 0.0")).unwrap();
    let out = dir.path().join("report.json");
    let o = skrates(&["simulate", "joint", "--config", path_str(&cfg), "--trials", "50", "--out", path_str(&out)]);
    assert_eq!(code(&o), 4, "{}", stderr(&o));
    assert!(stderr(&o).contains("max_leakage"));
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(doc["acceptance"][0]["pass"], false);
}

#[test]
fn malformed_config_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let good = std::fs::read_to_string(shipped("joint_in_region.json")).unwrap();
    let cases = [
        (good.replace("\"rk\": 0.2", "\"rk\": \"high\""), "rates.rk"),
        (good.replace("\"delta\"", "\"dleta\""), "dleta"),
        (good.replace("\"schema_version\": 1", "\"schema_version\": 2"), "schema_version"),
        (good.replace("\"n\": 10,", ""), "`n`"),
        (good.replace("\"zeta\": 0.1", "\"zeta\": 0.9"), "model"),
        (good.replace("\"rk\": 0.2", "\"rk\": 0.9"), "inconsistent rates"),
        ("{".to_string(), "EOF"),
    ];
    for (i, (text, field)) in cases.iter().enumerate() {
        let cfg = dir.path().join(format!("bad{i}.json"));
        std::fs::write(&cfg, text).unwrap();
        let o = skrates(&["simulate", "joint", "--config", path_str(&cfg)]);
        assert_eq!(code(&o), 2, "case {i}: {}", stderr(&o));
        assert!(stderr(&o).contains(field), "case {i}: {}", stderr(&o));
    }
    // A joint file is not a separate file.
    let o = skrates(&["simulate", "separate", "--config", path_str(&shipped("joint_in_region.json"))]);
    assert_eq!(code(&o), 2);
}

#[test]
fn missing_config_is_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = skrates(&["simulate", "joint", "--config", path_str(&dir.path().join("nope.json"))]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("nope.json"));
}
