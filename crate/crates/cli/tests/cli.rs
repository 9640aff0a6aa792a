use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cutproject"))
}

fn scheme(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../schemes")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn fib() -> String {
    scheme("fibonacci.json").display().to_string()
}

#[test]
fn fibonacci_diffraction_has_the_central_peak() {
    let o = run(&[
        "diffract",
        "--scheme",
        &fib(),
        "--dual-box=-3,3",
        "--eps",
        "0.05",
        "--format",
        "csv",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("chi,re,im,intensity"));
    let central: Vec<f64> = lines
        .map(|l| {
            l.split(',')
                .map(|v| v.parse().unwrap())
                .collect::<Vec<f64>>()
        })
        .find(|row| row[0] == 0.0)
        .expect("peak at 0");
    assert!((central[3] - 0.2).abs() < 1e-12);
}

#[test]
fn output_is_deterministic() {
    let args = [
        "diffract",
        "--scheme",
        &fib(),
        "--dual-box=-4,4",
        "--eps",
        "1e-3",
        "--format",
        "json",
    ];
    let a = run(&args);
    let b = bin().args(args).args(["--jobs", "1"]).output().unwrap();
    assert_eq!(a.stdout, b.stdout);
    assert!(!a.stdout.is_empty());
}

#[test]
fn verify_exit_codes() {
    let ok = run(&["verify", "psf", "--scheme", &fib()]);
    assert_eq!(ok.status.code(), Some(0));
    let reports: serde_json::Value = serde_json::from_slice(&ok.stdout).unwrap();
    assert_eq!(reports[0]["pass"], true);

    let bad = run(&[
        "verify",
        "density",
        "--scheme",
        &fib(),
        "--n",
        "100",
        "--tol",
        "1e-9",
    ]);
    assert_eq!(bad.status.code(), Some(2));
    let reports: serde_json::Value = serde_json::from_slice(&bad.stdout).unwrap();
    assert_eq!(reports[0]["pass"], false);
    let r = &reports[0];
    let diff = (r["lhs"][0].as_f64().unwrap() - r["rhs"][0].as_f64().unwrap()).abs();
    assert!((r["residual"].as_f64().unwrap() - diff).abs() < 1e-15);
}

#[test]
fn non_positive_halfwidth_is_a_usage_error() {
    let o = run(&["points", "--scheme", &fib(), "--n", "0"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--n"));
}

#[test]
fn non_dense_cyclic_coupling_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"d":1,"m":0,"N":2,"M":[[1.0]],"c":[0]}"#).unwrap();
    let o = run(&["scheme", "validate", "--scheme", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("gcd"));
}

#[test]
fn ragged_matrix_reports_its_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ragged.json");
    std::fs::write(
        &path,
        "{\n  \"d\": 1, \"m\": 1,\n  \"M\": [\n    [1.0, 1.618],\n    [1.0]\n  ]\n}\n",
    )
    .unwrap();
    let o = run(&["scheme", "validate", "--scheme", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr).into_owned();
    assert!(
        err.contains("M[1]") && err.contains("ragged.json:5:"),
        "{err}"
    );
}

#[test]
fn integer_comb_plot_has_seven_equal_stems() {
    let o = run(&[
        "plot",
        "--scheme",
        scheme("z.json").to_str().unwrap(),
        "--window",
        "point",
        "--dual-box=-3,3",
        "--eps",
        "0.1",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let svg = stdout(&o);
    assert!(svg.starts_with("<svg"));
    assert_eq!(svg.matches("class=\"stem\"").count(), 7);
}

#[test]
fn job_file_matches_the_direct_invocation() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("peaks.csv");
    let job = dir.path().join("job.json");
    std::fs::write(
        &job,
        format!(
            r#"{{"command":["diffract"],"scheme":{:?},"window":"box:-0.5,0.5","dual_box":"-5,5","eps":1e-4,"format":"csv","out":{:?}}}"#,
            fib(),
            out.display().to_string()
        ),
    )
    .unwrap();
    let o = run(&["job", job.to_str().unwrap()]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let direct = run(&[
        "diffract",
        "--scheme",
        &fib(),
        "--window",
        "box:-0.5,0.5",
        "--dual-box=-5,5",
        "--eps",
        "1e-4",
        "--format",
        "csv",
    ]);
    assert_eq!(std::fs::read(&out).unwrap(), direct.stdout);
}

#[test]
fn point_cap_is_enforced() {
    let o = bin()
        .args(["points", "--scheme", &fib(), "--n", "1000"])
        .env("CUTPROJECT_POINT_CAP", "10")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn cyclic_window_density() {
    let o = run(&[
        "density",
        "--scheme",
        scheme("z4.json").to_str().unwrap(),
        "--n",
        "1000",
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    assert!(stdout(&o).contains("0.25"));
}
