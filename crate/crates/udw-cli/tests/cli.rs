use std::fs;
use std::path::Path;
use std::process::{Command, Output};
use tempfile::TempDir;

const SPINOR_1D: &str = r#"
[field]
n = 1
length = 10.0
mass = 0.5
kind = "spinor"
"#;

fn udw(dir: &Path, config: &str, args: &[&str]) -> Output {
    let path = dir.join("run.toml");
    fs::write(&path, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_udw"))
        .args(args)
        .arg("--config")
        .arg(&path)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

/// Column `name` of a CSV table as strings.
fn column(csv_text: &str, name: &str) -> Vec<String> {
    let mut r = csv::Reader::from_reader(csv_text.as_bytes());
    let i = r.headers().unwrap().iter().position(|h| h == name).unwrap();
    r.records().map(|rec| rec.unwrap()[i].to_string()).collect()
}

fn gaussian_model4(width: f64) -> String {
    format!(
        "{SPINOR_1D}
[[detector]]
model = 4
gap = 1.0
coupling = 0.1
switching = {{ kind = \"gaussian\", width = {width} }}
"
    )
}

#[test]
fn model1_sudden_pointlike_3d_is_log_divergent() {
    let dir = TempDir::new().unwrap();
    let cfg = r#"
[field]
n = 3
length = 10.0
kind = "real_scalar"

[[detector]]
model = 1
gap = 1.0
coupling = 0.1
switching = { kind = "sudden", duration = 2.0 }

[vep]
cutoffs = [4, 8, 16, 32]
"#;
    let o = udw(dir.path(), cfg, &["vep"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.starts_with("cutoff,partial_sum,tail_bound,verdict,wall_time_s\n"));
    let verdicts = column(&out, "verdict");
    assert_eq!(verdicts.len(), 4);
    assert!(verdicts.iter().all(|v| v.starts_with("LogDivergent")), "{verdicts:?}");
}

#[test]
fn model4_gaussian_switching_converges() {
    let dir = TempDir::new().unwrap();
    let cfg = gaussian_model4(1.0) + "[vep]\ncutoffs = [2, 4, 8, 16]\nrequire_converged = true\n";
    let o = udw(dir.path(), &cfg, &["vep", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["verdict"]["name"], "Converged");
    let value = v["verdict"]["value"].as_f64().unwrap();
    let err = v["verdict"]["abs_err"].as_f64().unwrap();
    assert!(value > 0.0 && err < 1e-10 * value.max(1.0));
}

#[test]
fn required_convergence_failure_exits_3() {
    let dir = TempDir::new().unwrap();
    let cfg = r#"
[field]
n = 3
length = 10.0
kind = "real_scalar"

[[detector]]
model = 1
gap = 1.0
coupling = 0.1
switching = { kind = "sudden", duration = 2.0 }

[vep]
cutoffs = [4, 8, 16, 32]
require_converged = true
"#;
    let o = udw(dir.path(), cfg, &["vep"]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(stderr(&o).contains("not converged"));
}

#[test]
fn unknown_key_exits_2_and_names_it() {
    let dir = TempDir::new().unwrap();
    let cfg = gaussian_model4(1.0) + "[vep]\ncutofs = [2, 4]\n";
    let o = udw(dir.path(), &cfg, &["vep"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("cutofs"), "{}", stderr(&o));
}

#[test]
fn model_field_mismatch_exits_2() {
    let dir = TempDir::new().unwrap();
    let cfg = r#"
[field]
n = 1
length = 10.0
kind = "real_scalar"

[[detector]]
model = 4
gap = 1.0
coupling = 0.1
switching = { kind = "gaussian", width = 1.0 }

[vep]
cutoffs = [2, 4, 8]
"#;
    let o = udw(dir.path(), cfg, &["vep"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("detector"), "{}", stderr(&o));
}

#[test]
fn oracle_compare_passes() {
    let dir = TempDir::new().unwrap();
    let o = udw(dir.path(), "[oracle]\naction = \"compare\"\ncount = 200\nseed = 7\n", &["oracle", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["failures"], 0);
    assert_eq!(v["words"], 200);
    assert!(v["max_rel_diff"].as_f64().unwrap() < 1e-10);
}

#[test]
fn oracle_action_from_command_line() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("nested/compare.csv");
    let o = udw(dir.path(), "", &["oracle", "compare", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = fs::read_to_string(out).unwrap();
    assert!(column(&text, "pass").iter().all(|p| p == "yes"));
}

#[test]
fn untimed_runs_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let cfg = gaussian_model4(0.8) + "[vep]\ncutoffs = [2, 4, 8, 16]\n[output]\ntiming = false\n";
    let a = udw(dir.path(), &cfg, &["vep", "--threads", "2"]);
    let b = udw(dir.path(), &cfg, &["vep"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let first = column(&stdout(&a), "partial_sum")[0].clone();
    let mantissa = first.split('e').next().unwrap();
    assert_eq!(mantissa.chars().filter(char::is_ascii_digit).count(), 17);
}

#[test]
fn width_sweep_decreases() {
    let dir = TempDir::new().unwrap();
    let cfg = gaussian_model4(1.0) + "[sweep]\naxis = \"T\"\nvalues = [0.5, 1.0, 1.5, 2.0, 3.0]\ncutoffs = [2, 4, 8, 16]\n";
    let o = udw(dir.path(), &cfg, &["sweep", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["monotonicity"], "decreasing");
    assert_eq!(v["rows"].as_array().unwrap().len(), 5);
}

#[test]
fn smearing_sweep_decreases() {
    let dir = TempDir::new().unwrap();
    let cfg = format!(
        "{SPINOR_1D}
[[detector]]
model = 4
gap = 1.0
coupling = 0.1
switching = {{ kind = \"sudden\", duration = 2.0 }}
profile = {{ kind = \"gaussian\", sigma = 0.5 }}

[sweep]
axis = \"sigma\"
values = [0.25, 0.5, 1.0, 2.0, 4.0]
cutoffs = [250, 500, 1000, 2000]
tol = 1e-4
"
    );
    let o = udw(dir.path(), &cfg, &["sweep"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let values: Vec<f64> = column(&stdout(&o), "value").iter().map(|s| s.parse().unwrap()).collect();
    assert!(values.windows(2).all(|w| w[1] < w[0]), "{values:?}");
    assert!(stderr(&o).contains("decreasing"));
}

#[test]
fn coupling_sweep_fits_exponent_two() {
    let dir = TempDir::new().unwrap();
    let cfg = gaussian_model4(1.0) + "[sweep]\naxis = \"coupling\"\nvalues = [0.001, 0.01, 0.1, 1.0]\ncutoffs = [2, 4, 8, 16]\n";
    let o = udw(dir.path(), &cfg, &["sweep", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let p = v["coupling_exponent"].as_f64().unwrap();
    assert!((p - 2.0).abs() < 1e-6, "{p}");
}

#[test]
fn unknown_sweep_axis_exits_2() {
    let dir = TempDir::new().unwrap();
    let cfg = gaussian_model4(1.0) + "[sweep]\naxis = \"temperature\"\nvalues = [1.0]\ncutoffs = [2, 4, 8]\n";
    let o = udw(dir.path(), &cfg, &["sweep"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("sweep.axis"));
}

#[test]
fn pair_creation_diagrams_listing() {
    let dir = TempDir::new().unwrap();
    let cfg = gaussian_model4(0.5) + "[diagrams]\norder = 2\ninitial = { excited = [] }\nfinal = { excited = [], quanta = [\"a(1):up\", \"b(-1):up\"] }\n";
    let o = udw(dir.path(), &cfg, &["diagrams"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert_eq!(text.matches("diagram model=4 order=2").count(), 2);
    assert_eq!(text.matches("\nend\n").count(), 2);
    assert!(text.contains("sign=-1") && text.contains("sign=+1"));
}

#[test]
fn diagram_amplitudes_in_csv() {
    let dir = TempDir::new().unwrap();
    let cfg = gaussian_model4(0.5)
        + "[diagrams]\norder = 2\nevaluate = true\ninitial = { excited = [] }\nfinal = { excited = [], quanta = [\"a(1):up\", \"b(-1):up\"] }\n";
    let o = udw(dir.path(), &cfg, &["diagrams", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let re = column(&stdout(&o), "re");
    assert_eq!(re.len(), 2);
    assert!(re.iter().all(|s| s.parse::<f64>().unwrap() != 0.0));
}

#[test]
fn wick_terms_sum_to_total() {
    let dir = TempDir::new().unwrap();
    let cfg = r#"
[field]
n = 1
length = 10.0
mass = 0.5
kind = "real_scalar"

[[detector]]
model = 1
gap = 1.0
coupling = 0.1
switching = { kind = "gaussian", width = 1.0 }

[wick]
word = "a0(k=1) a0(p=-2) | T[ mu0(t1=1.0) phi0(y1=1.0;0.3) mu0(t2=0.2) phi0(y2=0.2;-0.4) ] |"
cutoff = 4
"#;
    let o = udw(dir.path(), cfg, &["wick", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let re: Vec<f64> = column(&stdout(&o), "re").iter().map(|s| s.parse().unwrap()).collect();
    assert_eq!(re.len(), 3);
    assert!((re[0] + re[1] - re[2]).abs() < 1e-15);
}

#[test]
fn evolve_converges_under_step_halving() {
    let dir = TempDir::new().unwrap();
    let cfg = r#"
[field]
n = 1
length = 8.0
mass = 0.5
kind = "real_scalar"

[[detector]]
model = 1
gap = 1.0
coupling = 0.01
switching = { kind = "gaussian", width = 1.0 }

[oracle]
action = "evolve"
cutoff = 2
halving_tol = 1e-8
"#;
    let o = udw(dir.path(), cfg, &["oracle"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let defect: f64 = column(&stdout(&o), "unitarity_defect")[0].parse().unwrap();
    assert!(defect < 1e-10);
}
