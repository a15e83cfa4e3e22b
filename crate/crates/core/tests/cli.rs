use clusterbell::cli::{ChshRecord, LhvScanRecord};
use clusterbell::experiment::{RunRecord, TrialRequirement};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_clusterbell"));
    c.env_remove("CLUSTERBELL_THREADS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn csv_rows<T: serde::de::DeserializeOwned>(text: &str) -> Vec<T> {
    csv::Reader::from_reader(text.as_bytes()).deserialize().collect::<Result<_, _>>().unwrap()
}

#[test]
fn chsh_example() {
    let o = run(&["chsh", "--a1", "0,0,1", "--a2", "1,0,0", "--b1", "-0.7071,0,-0.7071", "--b2", "0.7071,0,-0.7071"]);
    assert!(o.status.success());
    let rows: Vec<ChshRecord> = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 1);
    assert!((rows[0].chsh - 2.0 * std::f64::consts::SQRT_2).abs() < 1e-12);
    assert!(stdout(&o).contains("2.828427"));
}

#[test]
fn lhv_scan_example() {
    let o = run(&["lhv-scan", "--models", "100000", "--seed", "7"]);
    assert!(o.status.success());
    let rows: Vec<LhvScanRecord> = csv_rows(&stdout(&o));
    assert_eq!(rows[0].deterministic_max, 2.0);
    assert!(rows[0].random_max_abs <= 2.0 + 1e-12);
    assert!(rows[0].bound_respected);
}

#[test]
fn overlap_oracle_example() {
    let o = run(&["overlap", "--p0", "1", "--sigma", "1", "--delta", "1", "--eta", "adaptive", "--t", "100", "--oracle"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let header = text.lines().next().unwrap();
    assert!(header.ends_with("residual,residual_kind,within_tolerance"));
    let fields: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    let closed: f64 = fields[2].parse().unwrap();
    let numeric: f64 = fields[3].parse().unwrap();
    assert!((closed / numeric - 1.0).abs() < 1e-6);
}

#[test]
fn json_round_trip() {
    let o = run(&["--format", "json", "montecarlo", "--t", "1", "--trials", "20000", "--seed", "4"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let rec: RunRecord = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    assert_eq!(serde_json::to_string(&rec).unwrap(), text.trim_end());
}

#[test]
fn csv_round_trip_with_missing_values() {
    let o = run(&["montecarlo", "--eta", "40", "--t", "0", "--trials", "100", "--seed", "1"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let rows: Vec<RunRecord> = csv_rows(&text);
    assert!(rows[0].zero_coincidences && rows[0].empirical_chsh.is_none());
    let mut w = csv::Writer::from_writer(Vec::new());
    w.serialize(&rows[0]).unwrap();
    assert_eq!(String::from_utf8(w.into_inner().unwrap()).unwrap(), text);
}

#[test]
fn significance_sweep_and_fit() {
    let o = run(&["significance", "--sweep", "time:100:1000:5:log"]);
    assert!(o.status.success());
    let rows: Vec<TrialRequirement> = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 5);
    assert!(rows.windows(2).all(|w| w[1].total_trials > w[0].total_trials));
    let o = run(&["significance", "--sweep", "time:100:1000:5:log", "--fit"]);
    let text = stdout(&o);
    let exponent: f64 = text.lines().nth(1).unwrap().split(',').nth(4).unwrap().parse().unwrap();
    assert!((exponent - 2.0).abs() < 0.1);
}

#[test]
fn config_file_and_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("scan.cfg");
    std::fs::write(&cfg, "# late-time scan\nformat = json\nsweep = time:0:10:3\np0 = 2\n").unwrap();
    let o = run(&["time-scan", "--config", cfg.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 3);
    assert!(text.lines().nth(1).unwrap().contains("\"eta\":10.0"));

    // command-line flags win over the file
    let o = run(&["time-scan", "--config", cfg.to_str().unwrap(), "--p0", "1", "--format", "csv"]);
    let text = stdout(&o);
    assert!(text.starts_with("t,eta,"));
    assert!(text.lines().nth(2).unwrap().starts_with("5.0,5.0,"));

    std::fs::write(&cfg, "p0 2\n").unwrap();
    assert_eq!(run(&["time-scan", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
    std::fs::write(&cfg, "no-such-flag = 1\n").unwrap();
    assert_eq!(run(&["time-scan", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn out_file_and_units_echo() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f.csv");
    let o = run(&["field2pt", "--sweep", "r:1:50:6", "--units", "--out", path.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    assert!(String::from_utf8_lossy(&o.stderr).contains("\"mass\":1.0"));
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 7);
}

#[test]
fn validation_errors_exit_two() {
    for args in [
        vec!["overlap", "--sigma", "0"],
        vec!["overlap", "--eta", "somewhere"],
        vec!["chsh", "--a1", "1,1,0"],
        vec!["time-scan", "--sweep", "time:5:1:3"],
        vec!["field2pt", "--r", "-1"],
        vec!["montecarlo", "--trials", "0"],
        vec!["overlap", "--eta", "schedule:0=0,5=1", "--t", "9"],
        vec!["nonsense"],
    ] {
        let o = run(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"), "{args:?}");
    }
    let o = bin().env("CLUSTERBELL_THREADS", "zero").args(["chsh"]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn grid_flags_reach_the_oracle() {
    let o = run(&["overlap", "--oracle", "--grid-x-min", "-3", "--grid-x-max", "3", "--grid-points", "1024"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["overlap", "--oracle", "--p0", "0", "--grid-x-min", "-40", "--grid-x-max", "40", "--grid-points", "4096"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains(",4096,"));
}

#[test]
fn output_independent_of_thread_count() {
    let args = ["montecarlo", "--sweep", "time:0:4:3", "--trials", "70000", "--seed", "9"];
    let outputs: Vec<Vec<u8>> = ["1", "3", "8"]
        .iter()
        .map(|n| bin().env("CLUSTERBELL_THREADS", n).args(args).output().unwrap().stdout)
        .collect();
    assert!(!outputs[0].is_empty());
    assert!(outputs.windows(2).all(|w| w[0] == w[1]));
}
