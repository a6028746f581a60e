//! End-to-end checks of the command-line surface: subcommands, file
//! formats, and exit codes (0 success, 2 config error, 3 data error).

use std::io::Write;
use std::process::Command;

fn pnu() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pnu"))
}

fn write_file(dir: &tempfile::TempDir, name: &str, content: &str) -> std::path::PathBuf {
    let path = dir.path().join(name);
    let mut f = std::fs::File::create(&path).unwrap();
    f.write_all(content.as_bytes()).unwrap();
    path
}

fn labeled_csv(seed: u64, n_per_class: usize, n_u: usize) -> String {
    let data = pnu::data::synth_gaussians(0.5, n_per_class, n_per_class, n_u, 4.0, 2, seed)
        .unwrap();
    let mut out = String::from("x1,x2,label\n");
    for (set, label) in [
        (&data.positives, "1"),
        (&data.negatives, "-1"),
        (&data.unlabeled, "0"),
    ] {
        for p in set.iter() {
            out.push_str(&format!("{},{},{label}\n", p[0], p[1]));
        }
    }
    out
}

#[test]
fn train_then_predict_round_trips_through_json() {
    let dir = tempfile::tempdir().unwrap();
    let train_csv = write_file(&dir, "train.csv", &labeled_csv(7, 30, 100));
    let model_path = dir.path().join("model.json");

    let status = pnu()
        .args([
            "train",
            "--data",
            train_csv.to_str().unwrap(),
            "--prior",
            "0.5",
            "--family",
            "PNU",
            "--eta",
            "0.3",
            "--lambda",
            "0.01",
            "--out",
            model_path.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert!(status.success());

    // the model file is the documented classifier JSON
    let model: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&model_path).unwrap()).unwrap();
    assert_eq!(model["basis"]["kind"], "gaussian_kernel");
    assert!(model["basis"]["bandwidth"].as_f64().unwrap() > 0.0);
    assert!(!model["weights"].as_array().unwrap().is_empty());

    let predict_csv = write_file(
        &dir,
        "points.csv",
        "x1,x2,label\n2.5,0.0,0\n-2.5,0.0,0\n",
    );
    let output = pnu()
        .args([
            "predict",
            "--model",
            model_path.to_str().unwrap(),
            "--data",
            predict_csv.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(output.status.success());
    let stdout = String::from_utf8(output.stdout).unwrap();
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(lines[0], "prediction,decision");
    assert!(lines[1].starts_with("1,"));
    assert!(lines[2].starts_with("-1,"));

    // predictions come back in file order regardless of label values, and
    // feature-only CSVs work too
    let mixed = write_file(
        &dir,
        "mixed.csv",
        "x1,x2,label\n-2.5,0.0,1\n2.5,0.0,-1\n-2.5,0.0,0\n",
    );
    let output = pnu()
        .args([
            "predict",
            "--model",
            model_path.to_str().unwrap(),
            "--data",
            mixed.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    let stdout = String::from_utf8(output.stdout).unwrap();
    let lines: Vec<&str> = stdout.lines().collect();
    assert!(lines[1].starts_with("-1,"));
    assert!(lines[2].starts_with("1,"));
    assert!(lines[3].starts_with("-1,"));

    let bare = write_file(&dir, "bare.csv", "x1,x2\n2.5,0.0\n");
    let output = pnu()
        .args([
            "predict",
            "--model",
            model_path.to_str().unwrap(),
            "--data",
            bare.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(output.status.success());
    assert!(String::from_utf8(output.stdout)
        .unwrap()
        .lines()
        .nth(1)
        .unwrap()
        .starts_with("1,"));
}

#[test]
fn scaled_training_stores_and_applies_the_record() {
    let dir = tempfile::tempdir().unwrap();
    let train_csv = write_file(&dir, "train.csv", &labeled_csv(9, 25, 80));
    let model_path = dir.path().join("model.json");
    let status = pnu()
        .args([
            "train",
            "--data",
            train_csv.to_str().unwrap(),
            "--prior",
            "0.5",
            "--scale",
            "--out",
            model_path.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let model: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&model_path).unwrap()).unwrap();
    let mins = model["scaler"]["mins"].as_array().unwrap();
    assert_eq!(mins.len(), 2);

    // prediction still works on raw-coordinate inputs
    let predict_csv = write_file(&dir, "p.csv", "x1,x2,label\n3.0,0.0,0\n");
    let output = pnu()
        .args([
            "predict",
            "--model",
            model_path.to_str().unwrap(),
            "--data",
            predict_csv.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(output.status.success());
    assert!(String::from_utf8(output.stdout).unwrap().lines().nth(1).unwrap().starts_with("1,"));
}

#[test]
fn cv_reports_chosen_candidate() {
    let dir = tempfile::tempdir().unwrap();
    let grid = write_file(
        &dir,
        "grid.json",
        r#"{"lambdas":[0.01,0.1],"etas":[0.0,0.5],"gammas":[0.5],"bandwidth_multipliers":[1.0]}"#,
    );
    let out = dir.path().join("report.json");
    let status = pnu()
        .args([
            "cv",
            "--synthetic",
            "theta=0.5,n_p=15,n_n=15,n_u=60,sep=4,dim=2,seed=3",
            "--family",
            "PNU",
            "--k",
            "5",
            "--grid",
            grid.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report["family"], "PNU");
    assert_eq!(report["candidates"].as_array().unwrap().len(), 4);
    assert!(report["chosen"]["lambda"].as_f64().is_some());
}

#[test]
fn bound_emits_inputs_and_value() {
    let dir = tempfile::tempdir().unwrap();
    let model_path = dir.path().join("model.json");
    let synth = "theta=0.5,n_p=20,n_n=20,n_u=80,sep=3,dim=2,seed=5";
    assert!(pnu()
        .args(["train", "--synthetic", synth, "--lambda", "0.1", "--out", model_path.to_str().unwrap()])
        .status()
        .unwrap()
        .success());
    let output = pnu()
        .args([
            "bound",
            "--synthetic",
            synth,
            "--model",
            model_path.to_str().unwrap(),
            "--family",
            "N-PNPU",
            "--gamma",
            "0.4",
            "--delta",
            "0.05",
        ])
        .output()
        .unwrap();
    assert!(output.status.success());
    let record: serde_json::Value = serde_json::from_slice(&output.stdout).unwrap();
    assert_eq!(record["family"], "N-PNPU");
    assert_eq!(record["loss"], "ramp");
    assert!(record["bound"].as_f64().unwrap() > 0.0);
    assert!(record["inputs"]["c_w"].as_f64().unwrap() > 0.0);

    // convex families evaluate the truncated squared empirical risk
    let output = pnu()
        .args([
            "bound",
            "--synthetic",
            synth,
            "--model",
            model_path.to_str().unwrap(),
            "--family",
            "C-PUNU",
            "--gamma",
            "0.5",
        ])
        .output()
        .unwrap();
    let record: serde_json::Value = serde_json::from_slice(&output.stdout).unwrap();
    assert_eq!(record["loss"], "truncated_squared");
}

#[test]
fn estimate_prior_prints_theta_and_flag() {
    let dir = tempfile::tempdir().unwrap();
    let csv = write_file(&dir, "data.csv", &labeled_csv(11, 200, 300));
    let output = pnu()
        .args(["estimate-prior", "--data", csv.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(output.status.success());
    let record: serde_json::Value = serde_json::from_slice(&output.stdout).unwrap();
    let theta = record["theta_hat"].as_f64().unwrap();
    assert!((theta - 0.5).abs() < 0.1, "estimated {theta}");
    assert_eq!(record["degenerate"], false);
}

#[test]
fn experiment_writes_json_report_and_long_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let csv = dir.path().join("long.csv");
    let status = pnu()
        .args([
            "exp-variance",
            "--trials",
            "2",
            "--resamples",
            "40",
            "--n-u-val",
            "10,20",
            "--seed",
            "9",
            "--out",
            out.to_str().unwrap(),
            "--csv",
            csv.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report["experiment"], "variance_ratio");
    assert_eq!(report["config"]["seed"], 9);
    let long = std::fs::read_to_string(&csv).unwrap();
    assert!(long.starts_with("setting,trial,value\n"));
    assert_eq!(long.lines().count(), 1 + 2 * 2);
}

#[test]
fn config_errors_exit_2() {
    // eta outside [-1, 1]
    let output = pnu()
        .args([
            "train",
            "--synthetic",
            "theta=0.5,n_p=5,n_n=5,n_u=5,seed=1",
            "--eta",
            "1.5",
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));

    // incompatible loss/family pair
    let output = pnu()
        .args([
            "train",
            "--synthetic",
            "theta=0.5,n_p=5,n_n=5,n_u=5,seed=1",
            "--family",
            "C-PU",
            "--loss",
            "hinge",
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn data_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    // unknown label value
    let bad = write_file(&dir, "bad.csv", "x,label\n1.0,2\n");
    let output = pnu()
        .args(["estimate-prior", "--data", bad.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(3));
    assert!(String::from_utf8(output.stderr)
        .unwrap()
        .contains("row 1"));

    // missing file
    let output = pnu()
        .args(["estimate-prior", "--data", dir.path().join("nope.csv").to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(3));
}
