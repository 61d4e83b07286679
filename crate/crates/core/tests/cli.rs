//! End-to-end runs of the `green-radio` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use green_radio::cli::{CsvTable, Document};

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_green-radio"));
    cmd.env_remove("GR_CONFIG_DIR");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn repeated_runs_write_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let example = crate_dir().join("configs/examples/de_ee_dense_urban.toml");
    let mut outputs = Vec::new();
    for i in 0..2 {
        let out = dir.path().join(format!("run{i}.csv"));
        let o = run(&[
            "run",
            example.to_str().unwrap(),
            "-o",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
        outputs.push(std::fs::read(out).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(
        outputs[0],
        std::fs::read(crate_dir().join("tests/golden/de_ee_dense_urban.csv")).unwrap()
    );
}

#[test]
fn exit_codes() {
    let o = run(&["curve", "se-ee", "--se", "0.1:1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("error[schema]:"));

    let o = run(&[
        "plan",
        "--scenario",
        "dense_urban",
        "--throughput",
        "1e9",
        "--budget",
        "10",
    ]);
    assert_eq!(o.status.code(), Some(3));
    let msg = stderr(&o);
    assert!(
        msg.contains("infeasible") && msg.lines().count() == 1,
        "{msg}"
    );

    let o = run(&[
        "peak",
        "dl-pw",
        "-o",
        "/nonexistent-dir/x.csv",
        "--static-power",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(4), "{}", stderr(&o));
    assert!(stderr(&o).starts_with("error[io]:"));

    let o = run(&["--version"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn run_file_with_unknown_parameter_is_a_schema_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(
        &path,
        "command = \"peak\"\nkind = \"se-ee\"\n[parameters]\nn0 = 1\nbandwith = 2\n",
    )
    .unwrap();
    let o = run(&["run", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("bandwith"));
}

#[test]
fn flags_override_config_values() {
    let cfg = crate_dir().join("configs/examples/peak_se_ee.toml");
    let o = run(&[
        "peak",
        "se-ee",
        "--config",
        cfg.to_str().unwrap(),
        "--circuit-psd",
        "2",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let table = CsvTable::parse(&String::from_utf8(o.stdout).unwrap()).unwrap();
    assert_eq!(table.params()["circuit_psd"], "2");
    assert_eq!(table.params()["n0"], "1");

    let o = run(&["plan", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn scenarios_resolve_through_config_dir() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(crate_dir().join("configs/suburb.toml")).unwrap();
    std::fs::write(
        dir.path().join("village.toml"),
        text.replace("area_m2 = 1.0e8", "area_m2 = 2.0e7"),
    )
    .unwrap();
    let o = bin()
        .env("GR_CONFIG_DIR", dir.path())
        .args(["curve", "de-ee", "--scenario", "village", "--points", "5"])
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    let table = CsvTable::parse(&String::from_utf8(o.stdout).unwrap()).unwrap();
    assert_eq!(table.metadata()["area_m2"], "20000000");
    assert_eq!(table.rows.len(), 5);

    let o = run(&["curve", "de-ee", "--scenario", "village"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn gnuplot_script_sits_next_to_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("contour.csv");
    let example = crate_dir().join("configs/examples/ee_contour.toml");
    let o = run(&[
        "run",
        example.to_str().unwrap(),
        "-o",
        out.to_str().unwrap(),
        "--gnuplot",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let script = std::fs::read_to_string(dir.path().join("contour.csv.gp")).unwrap();
    assert!(script.contains("'contour.csv'"));
    assert!(script.contains("title 'lower'") && script.contains("title 'upper'"));

    let o = run(&["run", example.to_str().unwrap(), "--gnuplot"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn report_format_carries_the_schedule() {
    let o = run(&[
        "schedule",
        "--bits",
        "1,1,1,1",
        "--deadline",
        "2",
        "--format",
        "report",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let durations = v["result"]["schedule"]["durations_s"].as_array().unwrap();
    assert!(durations.iter().all(|d| d.as_f64() == Some(0.5)));
}

fn golden_files() -> Vec<PathBuf> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(crate_dir().join("tests/golden"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    files.sort();
    files
}

#[test]
fn curve_csvs_round_trip() {
    let mut curves = 0;
    for path in golden_files() {
        let text = std::fs::read_to_string(&path).unwrap();
        let table = CsvTable::parse(&text).unwrap();
        let Ok(curve) = table.to_curve() else {
            continue;
        };
        curves += 1;
        let command = table.comment("command").unwrap();
        let again = Document::from_curve(command, table.params(), &curve).to_csv();
        assert_eq!(again, text, "{}", path.display());
        assert_eq!(CsvTable::parse(&again).unwrap().to_curve().unwrap(), curve);
    }
    assert!(curves >= 8);
}

#[test]
fn every_csv_lists_its_inputs() {
    for path in golden_files() {
        let table = CsvTable::parse(&std::fs::read_to_string(&path).unwrap()).unwrap();
        let stem = path.file_stem().unwrap().to_string_lossy().into_owned();
        let cfg_path = crate_dir().join(format!("configs/examples/{stem}.toml"));
        let cfg: toml::Table =
            toml::from_str(&std::fs::read_to_string(Path::new(&cfg_path)).unwrap()).unwrap();
        let params = table.params();
        for key in cfg["parameters"].as_table().unwrap().keys() {
            assert!(
                params.contains_key(key),
                "{stem}: {key} missing from the comment block"
            );
        }
        assert!(table.columns.iter().all(|c| !c.is_empty()));
    }
}
