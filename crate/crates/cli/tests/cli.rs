use std::io::Write;
use std::process::{Command, Output};

use tempfile::NamedTempFile;

fn aarhus(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_aarhus")).args(args).output().unwrap()
}

fn file(text: &str) -> NamedTempFile {
    let mut f = NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn bch_degree_two_is_struts_plus_half_bracket() {
    let o = aarhus(&["bch", "--degree", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let lines: Vec<String> = stdout(&o).lines().map(str::to_owned).collect();
    assert_eq!(
        lines,
        [
            "1\tD[leg(dx)-leg(z)]",
            "1\tD[leg(dy)-leg(z)]",
            "1/2\tD[leg(dx)-v1.0; leg(dy)-v1.1; leg(z)-v1.2]",
        ]
    );
}

#[test]
fn integrate_contracts_two_legs_with_inverse_covariance() {
    let cov = file("x\n2\n");
    let series = file("# two struts from x\n1\tD[leg(x)-leg(e); leg(x)-leg(f)]\n");
    let o = aarhus(&[
        "integrate",
        "--covariance",
        cov.path().to_str().unwrap(),
        "--series",
        series.path().to_str().unwrap(),
        "--vars",
        "x",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o), "-1/2\tD[leg(e)-leg(f)]\n");
}

#[test]
fn partial_integration_reports_the_remaining_covariance() {
    let cov = file("x,y\n2,1\n1,1\n");
    let series = file("1\tD[leg(x)-leg(e)]\n");
    let o = aarhus(&[
        "integrate",
        "--covariance",
        cov.path().to_str().unwrap(),
        "--series",
        series.path().to_str().unwrap(),
        "--vars",
        "x",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    // C - B^T A^{-1} B = 1 - 1/2
    assert!(out.contains("# remaining covariance\ny\n1/2\n"), "{out}");
    // the lone x-leg becomes -(A^{-1} B) y = -1/2 y
    assert!(out.contains("-1/2\tD[leg(e)-leg(y)]"), "{out}");
}

#[test]
fn malformed_series_exits_two_with_position() {
    let cov = file("x\n1\n");
    let series = file("1\tempty\n1\tD[leg(x)-v1.7]\n");
    let o = aarhus(&[
        "integrate",
        "--covariance",
        cov.path().to_str().unwrap(),
        "--series",
        series.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("line 2, column"), "{err}");
}

#[test]
fn asymmetric_covariance_is_rejected() {
    let cov = file("x,y\n1,2\n3,1\n");
    let series = file("1\tempty\n");
    let o = aarhus(&[
        "integrate",
        "--covariance",
        cov.path().to_str().unwrap(),
        "--series",
        series.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("not symmetric"));
}

#[test]
fn unknown_variable_and_bad_degree_exit_two() {
    let cov = file("x\n1\n");
    let series = file("1\tempty\n");
    let o = aarhus(&[
        "integrate",
        "--covariance",
        cov.path().to_str().unwrap(),
        "--series",
        series.path().to_str().unwrap(),
        "--vars",
        "q",
    ]);
    assert_eq!(o.status.code(), Some(2));
    let o = aarhus(&["check", "parity", "--max-degree", "9"]);
    assert_eq!(o.status.code(), Some(2));
    let o = aarhus(&["integrate", "--covariance", "/nonexistent", "--series", "/nonexistent"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn fubini_suite_passes_and_is_deterministic() {
    let args = ["check", "fubini", "--max-degree", "2", "--seed", "1"];
    let a = aarhus(&args);
    assert_eq!(a.status.code(), Some(0), "{}", stdout(&a));
    assert!(stdout(&a).ends_with("20/20 passed\n"));
    let b = aarhus(&args);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn quick_suites_pass_in_coords_format() {
    for suite in ["ogl", "bch", "parity"] {
        let o = aarhus(&["check", suite, "--max-degree", "2", "--seed", "3", "--format", "coords"]);
        assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    }
}

#[test]
fn coords_format_for_bch() {
    let o = aarhus(&["bch", "--degree", "2", "--format", "coords"]);
    assert_eq!(stdout(&o), "1\tV0[dx,z]#0\n1\tV0[dy,z]#0\n1/2\tV1[dx,dy,z]#0\n");
}
