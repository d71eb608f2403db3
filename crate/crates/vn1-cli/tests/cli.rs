//! End-to-end checks of the `vn1` binary: config validation, output formats,
//! exit codes, and determinism.

use std::path::Path;
use std::process::{Command, Output};

fn vn1() -> Command {
    Command::new(env!("CARGO_BIN_EXE_vn1"))
}

fn write_config(dir: &Path, name: &str, body: &str) -> std::path::PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    vn1()
        .args(args)
        .env("SOURCE_DATE_EPOCH", "1754700000")
        .output()
        .unwrap()
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).unwrap()
}

const EXAMPLE_PAIR: &str = r#"
lambda = 1.0

[system]
axis = [0.0, 0.0, 1.0]

[preparation]
pure = [[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]]

[postselection]
pure = [[1.0, 0.0], [1.0, 0.0], [0.0, 0.0]]

[detector.gaussian]
sigma_q = 0.5
sigma_p = 1.0
"#;

#[test]
fn minimal_config_loads_and_measures() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "minimal.toml",
        r#"
[system]
axis = [0.0, 0.0, 1.0]

[preparation]
pure = [[1.0, 0.0], [0.0, 0.0], [0.0, 0.0]]

[detector.gaussian]
"#,
    );
    let out = run(&["measure", "--config", config.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    // eigenstate with identity postselection: P_f = 1, <P> = lambda = 1
    assert!(text.contains("\"p_f\":1.0000000000000000e0"), "{text}");
    assert!(text.contains("\"avg_output\":1.0000000000000000e0"), "{text}");

    // no postselection means the identity: the commuting case is flagged
    let wv = run(&["weak-values", "--config", config.to_str().unwrap()]);
    assert!(stdout(&wv).contains("\"flag_commutes_with_s\":true"));
}

#[test]
fn non_unit_axis_names_normalization() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "axis.toml",
        r#"
[system]
axis = [0.0, 0.0, 2.0]

[preparation]
pure = [[1.0, 0.0], [0.0, 0.0], [0.0, 0.0]]

[detector.gaussian]
"#,
    );
    let out = run(&["measure", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("unit vector"), "{err}");
}

#[test]
fn double_specification_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "double.toml",
        r#"
[system]
axis = [0.0, 0.0, 1.0]

[preparation]
pure = [[1.0, 0.0], [0.0, 0.0], [0.0, 0.0]]
matrix = { dim = 3, data = [[1.0,0.0],[0.0,0.0],[0.0,0.0],[0.0,0.0],[0.0,0.0],[0.0,0.0],[0.0,0.0],[0.0,0.0],[0.0,0.0]] }

[detector.gaussian]
"#,
    );
    let out = run(&["measure", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("exactly one"), "{err}");
}

#[test]
fn orthogonal_pair_exits_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "orth.toml",
        r#"
[system]
axis = [0.0, 0.0, 1.0]

[preparation]
pure = [[1.0, 0.0], [0.0, 0.0], [0.0, 0.0]]

[postselection]
pure = [[0.0, 0.0], [1.0, 0.0], [0.0, 0.0]]

[detector.gaussian]
"#,
    );
    for command in ["weak-values", "measure"] {
        let out = run(&[command, "--config", config.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(2), "command {command}");
        assert!(String::from_utf8_lossy(&out.stderr).contains("orthogonal"));
    }
}

#[test]
fn weak_values_record_carries_the_example_values() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "example.toml", EXAMPLE_PAIR);
    let out = run(&["weak-values", "--config", config.to_str().unwrap()]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("\"a_w\":{\"re\":5.0000000000000000e-1,\"im\":-5.0000000000000000e-1}"));
    assert!(text.contains("\"b_w\":5.0000000000000000e-1"));
    assert!(text.contains("\"flag_pure_pure\":true"));
    assert!(text.contains("\"config_hash\":\"sha256:"));
}

#[test]
fn measure_with_oracle_reports_tiny_deltas() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "discrete.toml",
        r#"
lambda = 1.0

[system]
axis = [0.0, 0.0, 1.0]

[preparation]
pure = [[0.6, 0.1], [0.2, -0.4], [0.5, 0.3]]

[detector.discrete]
d = 3
pointer_index = 0
"#,
    );
    let out = run(&["measure", "--config", config.to_str().unwrap(), "--oracle"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let delta: f64 = extract_float(&text, "oracle_avg_delta");
    assert!(delta < 1e-10, "delta {delta}: {text}");
    // the discrete phase-space route deviation is reported alongside
    assert!(text.contains("wigner_route_avg_delta"));
}

#[test]
fn oracle_check_passes_on_gaussian_setup() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "example.toml", EXAMPLE_PAIR);
    let out = run(&["oracle-check", "--config", config.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("\"pass\":true"));
}

#[test]
fn identical_configs_give_byte_identical_output() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "example.toml", EXAMPLE_PAIR);
    let first = run(&["measure", "--config", config.to_str().unwrap(), "--oracle"]);
    let second = run(&["measure", "--config", config.to_str().unwrap(), "--oracle"]);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);

    let sweep_config = write_config(
        dir.path(),
        "sweep.toml",
        &format!(
            "{EXAMPLE_PAIR}\n[sweep]\nparameter = \"lambda\"\nfrom = 1e-3\nto = 1e-1\nsteps = 5\n"
        ),
    );
    let a = run(&["sweep", "--config", sweep_config.to_str().unwrap()]);
    let b = run(&["sweep", "--config", sweep_config.to_str().unwrap()]);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn lambda_sweep_emits_one_row_per_point() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "sweep.toml",
        &format!(
            "{EXAMPLE_PAIR}\n[sweep]\nparameter = \"lambda\"\nfrom = 1e-4\nto = 1e-2\nsteps = 7\n"
        ),
    );
    let out = run(&["sweep", "--config", config.to_str().unwrap()]);
    assert!(out.status.success());
    let text = stdout(&out);
    let data_rows = text
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("lambda"))
        .filter(|l| !l.is_empty())
        .count();
    assert_eq!(data_rows, 7, "{text}");
    assert!(text.contains("fitted_slope_interpolation"));
}

#[test]
fn empty_sweep_range_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "sweep.toml",
        &format!(
            "{EXAMPLE_PAIR}\n[sweep]\nparameter = \"lambda\"\nfrom = 1e-2\nto = 1e-2\nsteps = 5\n"
        ),
    );
    let out = run(&["sweep", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("sweep"));
}

#[test]
fn sigma_sweep_crosses_the_weakness_threshold() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "sweep.toml",
        r#"
lambda = 0.1

[system]
axis = [0.0, 0.0, 1.0]

[preparation]
pure = [[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]]

[detector.gaussian]
sigma_q = 0.5
sigma_p = 4.0

[sweep]
parameter = "sigma_q"
from = 0.2
to = 0.8
steps = 7
scale = "linear"
"#,
    );
    let out = run(&["sweep", "--config", config.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    let passes: Vec<&str> = text
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("sigma_q") && !l.is_empty())
        .map(|l| l.rsplit(',').next().unwrap())
        .collect();
    // 2λσ crosses 0.1 at σ = 0.5: the pass flag flips inside the range
    assert!(passes.contains(&"1") && passes.contains(&"0"), "{text}");
}

#[test]
fn wigner_dump_has_d_squared_rows_and_unit_mass() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "wigner.toml",
        r#"
[system]
axis = [0.0, 0.0, 1.0]

[preparation]
pure = [[1.0, 0.0], [0.0, 0.0], [0.0, 0.0]]

[detector.discrete]
d = 5
state_matrix = { dim = 5, data = [
  [0.30,0.0],[0.05,0.02],[0.0,0.0],[0.0,0.0],[0.01,0.0],
  [0.05,-0.02],[0.25,0.0],[0.0,0.0],[0.0,0.0],[0.0,0.0],
  [0.0,0.0],[0.0,0.0],[0.20,0.0],[0.0,0.0],[0.0,0.0],
  [0.0,0.0],[0.0,0.0],[0.0,0.0],[0.15,0.0],[0.0,0.0],
  [0.01,0.0],[0.0,0.0],[0.0,0.0],[0.0,0.0],[0.10,0.0],
] }
"#,
    );
    let out = run(&["wigner", "--config", config.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    let rows: Vec<&str> = text
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("j_index") && !l.is_empty())
        .collect();
    assert_eq!(rows.len(), 25);
    let mass: f64 = rows
        .iter()
        .map(|l| l.split(',').nth(5).unwrap().parse::<f64>().unwrap())
        .sum();
    assert!((mass - 1.0).abs() < 1e-12, "total Wigner mass {mass}");
}

#[test]
fn format_flag_switches_single_run_output_to_csv() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "example.toml", EXAMPLE_PAIR);
    let out = run(&[
        "measure",
        "--config",
        config.to_str().unwrap(),
        "--format",
        "csv",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("key,value\n"));
    assert!(text.contains("p_f,"));

    // tabular commands refuse the record format
    let sweep_config = write_config(
        dir.path(),
        "sweep.toml",
        &format!(
            "{EXAMPLE_PAIR}\n[sweep]\nparameter = \"lambda\"\nfrom = 1e-3\nto = 1e-1\nsteps = 5\n"
        ),
    );
    let out = run(&[
        "sweep",
        "--config",
        sweep_config.to_str().unwrap(),
        "--format",
        "record",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn out_flag_writes_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "example.toml", EXAMPLE_PAIR);
    let target = dir.path().join("result.json");
    let out = run(&[
        "measure",
        "--config",
        config.to_str().unwrap(),
        "--out",
        target.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).is_empty());
    let written = std::fs::read_to_string(target).unwrap();
    assert!(written.contains("\"command\":\"measure\""));
}

fn extract_float(record: &str, key: &str) -> f64 {
    let marker = format!("\"{key}\":");
    let start = record.find(&marker).unwrap() + marker.len();
    let rest = &record[start..];
    let end = rest.find([',', '}']).unwrap();
    rest[..end].parse().unwrap()
}
