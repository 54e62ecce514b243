use std::path::Path;
use std::process::{Command, Output};

const SMALL: &str = r#"
[sweep]
axis = "p_bar_db"
values = [0.0, 6.0]

[averaging]
orientations = 3
phi_3db_deg = [20.0]
omni = true

[mc]
frames = 300

[roc]
phi_3db_deg = [20.0, 30.0]
pd_targets = [0.5, 0.9]
trials = 500

[beams]
phi_sr_deg = [10.0]
phi_3db_deg = [20.0, 40.0]
draws = 2000
"#;

fn sectorcap(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_sectorcap"));
    cmd.args(args).env_remove("SECTORCAP_SEED").env_remove("SECTORCAP_OUT");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn write_config(dir: &Path, text: &str) -> String {
    let p = dir.join("exp.toml");
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn sidecar(dir: &Path, name: &str) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join(format!("{name}.json"))).unwrap()).unwrap()
}

#[test]
fn unknown_key_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "[scenario]\nsectrs = 8\n");
    let o = sectorcap(&["roc", "--config", &cfg, "--out", tmp.path().to_str().unwrap()], &[]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(stderr(&o).starts_with("error category=config"), "{}", stderr(&o));
}

#[test]
fn malformed_toml_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "[scenario\n");
    let o = sectorcap(&["beams", "--config", &cfg], &[]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn out_of_range_value_is_a_validation_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "[scenario]\nrho = 1.5\n");
    let o = sectorcap(&["capacity", "--config", &cfg], &[]);
    assert_eq!(o.status.code(), Some(6));
    let e = stderr(&o);
    assert!(e.starts_with("error category=validation"), "{e}");
    assert!(e.contains("scenario.rho"), "{e}");
}

#[test]
fn sweep_value_outside_the_domain_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "[sweep]\naxis = \"pd_target\"\nvalues = [0.5, 1.2]\n");
    let o = sectorcap(&["capacity", "--config", &cfg], &[]);
    assert_eq!(o.status.code(), Some(6));
    assert!(stderr(&o).contains("sweep.values"));
}

#[test]
fn missing_config_file_is_an_io_error() {
    let o = sectorcap(&["roc", "--config", "/nonexistent/exp.toml"], &[]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stderr(&o).starts_with("error category=io"));
}

#[test]
fn zero_frames_is_rejected_by_the_parser() {
    let o = sectorcap(&["roc", "--frames", "0"], &[]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn reruns_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), SMALL);
    let out = tmp.path().join("o");
    let run = |cmd: &str| {
        let o = sectorcap(&[cmd, "--config", &cfg, "--out", out.to_str().unwrap()], &[]);
        assert!(o.status.success(), "{cmd}: {}", stderr(&o));
        ["csv", "json"].map(|ext| std::fs::read(out.join(format!("{cmd}.{ext}"))).unwrap())
    };
    for cmd in ["roc", "beams", "capacity", "reliability"] {
        let [table_a, meta_a] = run(cmd);
        let [table_b, meta_b] = run(cmd);
        assert!(table_a == table_b, "{cmd} table differs between runs");
        assert!(meta_a == meta_b, "{cmd} sidecar differs between runs");
    }
}

#[test]
fn sidecar_records_content_id_seed_and_config() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), SMALL);
    let out = tmp.path().join("o");
    let o = sectorcap(&["beams", "--config", &cfg, "--out", out.to_str().unwrap(), "--seed", "99"], &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let bytes = std::fs::read(out.join("beams.csv")).unwrap();
    let meta = sidecar(&out, "beams");
    assert_eq!(meta["content_id"], sectorcap::table::content_id(&bytes));
    assert_eq!(meta["seed"], 99);
    assert_eq!(meta["config"]["mc"]["seed"], 99);
    assert_eq!(meta["config"]["beams"]["draws"], 2000);
    assert_eq!(meta["rows"], 2);
    let header = String::from_utf8(bytes).unwrap();
    assert!(header.starts_with("phi_sr_deg,phi_3db_deg,"));
}

#[test]
fn flags_and_environment_override_the_file() {
    let tmp = tempfile::tempdir().unwrap();
    let text = format!("{SMALL}\n[output]\ndir = \"{}\"\n", tmp.path().join("from_file").display());
    let cfg = write_config(tmp.path(), &text.replace("[mc]\nframes = 300", "[mc]\nframes = 300\nseed = 5"));

    let o = sectorcap(&["roc", "--config", &cfg], &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(sidecar(&tmp.path().join("from_file"), "roc")["seed"], 5);

    let env_out = tmp.path().join("from_env");
    let o = sectorcap(
        &["roc", "--config", &cfg],
        &[("SECTORCAP_SEED", "17"), ("SECTORCAP_OUT", env_out.to_str().unwrap())],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(sidecar(&env_out, "roc")["seed"], 17);

    let flag_out = tmp.path().join("from_flag");
    let o = sectorcap(
        &["roc", "--config", &cfg, "--seed", "23", "--out", flag_out.to_str().unwrap(), "--frames", "40"],
        &[("SECTORCAP_SEED", "17"), ("SECTORCAP_OUT", env_out.to_str().unwrap())],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let meta = sidecar(&flag_out, "roc");
    assert_eq!(meta["seed"], 23);
    assert_eq!(meta["config"]["roc"]["trials"], 40);
}

#[test]
fn different_seeds_change_simulated_columns_only() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), SMALL);
    let read = |seed: &str| {
        let d = tmp.path().join(seed);
        let o = sectorcap(&["beams", "--config", &cfg, "--seed", seed, "--out", d.to_str().unwrap()], &[]);
        assert!(o.status.success());
        let mut r = csv::Reader::from_path(d.join("beams.csv")).unwrap();
        let h = r.headers().unwrap().clone();
        let rows: Vec<csv::StringRecord> = r.records().map(Result::unwrap).collect();
        (h, rows)
    };
    let (h, a) = read("1");
    let (_, b) = read("2");
    let col = |n: &str| h.iter().position(|c| c == n).unwrap();
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x[col("delta1")], y[col("delta1")]);
        assert_ne!(x[col("delta1_mc")], y[col("delta1_mc")]);
    }
}

#[test]
fn tsv_output() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), &format!("{SMALL}\n[output]\nformat = \"tsv\"\n"));
    let out = tmp.path().join("t");
    let o = sectorcap(&["roc", "--config", &cfg, "--out", out.to_str().unwrap()], &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(out.join("roc.tsv")).unwrap();
    assert!(text.lines().next().unwrap().split('\t').count() > 5);
    assert_eq!(text.lines().count(), 1 + 2 * 2);
}

#[test]
fn capacity_table_shape() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), SMALL);
    let out = tmp.path().join("c");
    let o = sectorcap(&["capacity", "--config", &cfg, "--out", out.to_str().unwrap()], &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let mut r = csv::Reader::from_path(out.join("capacity.csv")).unwrap();
    let h = r.headers().unwrap().clone();
    let rows: Vec<csv::StringRecord> = r.records().map(Result::unwrap).collect();
    // two sweep values, RA20 and omni
    assert_eq!(rows.len(), 4);
    let ant = h.iter().position(|c| c == "antenna").unwrap();
    let frames = h.iter().position(|c| c == "frames").unwrap();
    assert_eq!(&rows[0][ant], "ra20");
    assert_eq!(&rows[1][ant], "omni");
    for row in &rows {
        assert_eq!(&row[frames], "300");
    }
}
