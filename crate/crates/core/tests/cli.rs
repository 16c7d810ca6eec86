use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spin-squeeze"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn field<'a>(text: &'a str, key: &str) -> &'a str {
    text.lines()
        .find_map(|l| l.strip_prefix(key).filter(|rest| rest.starts_with(' ')))
        .unwrap_or_else(|| panic!("no line for {key} in:\n{text}"))
        .trim()
}

#[test]
fn point_coherent_state() {
    let o = run(&["point", "--beta", "0", "--mu", "0", "--nu", "0"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert_eq!(field(&text, "R"), "1.000000");
    assert_eq!(field(&text, "xi2_std"), "1.000000000000");
    assert_eq!(field(&text, "concurrence"), "0.000000000000");
    assert_eq!(field(&text, "frame_status"), "polar-degenerate");
}

#[test]
fn point_pure_bell_state_is_degenerate() {
    let o = run(&["point", "--beta", "1", "--mu", "0.5", "--nu", "0.3"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(field(&text, "frame_status"), "fully-degenerate");
    assert_eq!(field(&text, "method"), "all-directions");
    assert_eq!(field(&text, "concurrence"), "1.000000000000");
    assert_eq!(field(&text, "chi_min"), "undefined");
}

#[test]
fn point_generic_length_display() {
    let o = run(&[
        "point",
        "--beta",
        "0.6",
        "--mu",
        "1.0471975511965976",
        "--nu",
        "0.7853981633974483",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(field(&stdout(&o), "R"), "0.850261");
}

#[test]
fn point_json_output() {
    let o = run(&[
        "point",
        "--beta",
        "0.6",
        "--mu",
        "1.0",
        "--nu",
        "-1.0",
        "--format",
        "json",
        "--convention",
        "paper-literal",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let literal = v["oracle"]["xi2_literal"].as_f64().unwrap();
    assert_eq!(v["xi2"].as_f64().unwrap(), literal);
    assert_eq!(v["convention"], "paper-literal");
}

#[test]
fn usage_errors_exit_one() {
    for args in [
        vec!["point", "--beta", "0.5", "--mu", "0"],
        vec!["point", "--beta", "1.5", "--mu", "0", "--nu", "0"],
        vec!["point", "--beta", "x", "--mu", "0", "--nu", "0"],
        vec!["point", "--bogus"],
        vec!["sweep", "--nu-list", "0"],
        vec![
            "sweep",
            "--mu-list",
            "0",
            "--nu-list",
            "0",
            "--beta-steps",
            "1",
        ],
        vec![
            "sweep",
            "--mu-list",
            "0",
            "--nu-list",
            "0",
            "--convention",
            "other",
        ],
        vec!["crosscheck", "--tol", "-1"],
        vec!["figure", "fig3"],
        vec![],
    ] {
        let o = run(&args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        assert!(!stderr(&o).is_empty(), "{args:?}");
    }
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn sweep_writes_contract_header_and_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.csv");
    let o = run(&[
        "sweep",
        "--mu-list",
        "0,1.5707963267948966",
        "--nu-list",
        "-1.0471975511965976",
        "--beta-steps",
        "5",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "beta,mu,nu,jx_cf,jy_cf,jz_cf,jx_or,jy_or,jz_or,r_eq9,r_eq10,theta,phi,jn1sq,jn2sq,anticomm,lambda_min,chi_min,xi2_std,xi2_literal,concurrence,frame_status,method"
    );
    assert_eq!(lines.count(), 10);
}

#[test]
fn degenerate_rows_only_fail_under_strict() {
    let base = [
        "sweep",
        "--mu-list",
        "1.5707963267948966",
        "--nu-list",
        "0",
        "--beta-steps",
        "6",
    ];
    let o = run(&base);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text
        .lines()
        .skip(1)
        .all(|l| l.ends_with("fully-degenerate,all-directions")));
    let mut strict = base.to_vec();
    strict.push("--strict");
    assert_eq!(run(&strict).status.code(), Some(2));
}

#[test]
fn unwritable_output_exits_one() {
    let o = run(&[
        "sweep",
        "--mu-list",
        "0",
        "--nu-list",
        "0",
        "--beta-steps",
        "3",
        "--out",
        "/nonexistent-dir/x.csv",
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn sweep_is_byte_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let files: Vec<_> = ["1", "4"]
        .iter()
        .map(|t| {
            let path = dir.path().join(format!("t{t}.csv"));
            let o = run(&[
                "sweep",
                "--mu-list",
                "0,0.7,3.141592653589793",
                "--nu-list",
                "-1,0,2",
                "--beta-steps",
                "31",
                "--threads",
                t,
                "--out",
                path.to_str().unwrap(),
            ]);
            assert_eq!(o.status.code(), Some(0));
            fs::read(path).unwrap()
        })
        .collect();
    assert_eq!(files[0], files[1]);
}

#[test]
fn config_file_values_are_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(
        &cfg,
        "# point defaults\nbeta = 0.6\nmu=1.0471975511965976\nnu = 0.7853981633974483\n",
    )
    .unwrap();
    let o = run(&["point", "--config", cfg.to_str().unwrap()]);
    assert_eq!(field(&stdout(&o), "R"), "0.850261");
    let o = run(&["point", "--config", cfg.to_str().unwrap(), "--beta", "0"]);
    assert_eq!(field(&stdout(&o), "beta"), "0");

    fs::write(&cfg, "beta 0.5\n").unwrap();
    assert_eq!(
        run(&["point", "--config", cfg.to_str().unwrap()])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn crosscheck_zero_phase_is_inconclusive() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let o = run(&[
        "crosscheck",
        "--nu-list",
        "0",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("nu_sign=inconclusive"));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(report["nu_sign_hypothesis"], "inconclusive");
}

#[test]
fn crosscheck_default_names_hypotheses() {
    let o = run(&["crosscheck", "--tol", "1e-3"]);
    assert_eq!(o.status.code(), Some(0));
    let line = stdout(&o);
    assert!(line.contains("nu_sign=nu-negated"), "{line}");
    assert!(line.contains("eq12_factor=half-corrected"), "{line}");
    assert!(line.contains("convention_independent=pass"), "{line}");
}

fn figure_files(dir: &Path) -> Vec<String> {
    let mut names: Vec<String> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    names
}

#[test]
fn figure_one_passes_and_writes_one_file_per_mu() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["figure", "fig1", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert_eq!(
        figure_files(dir.path()),
        [
            "fig1_mu_0.csv",
            "fig1_mu_pi_2.csv",
            "fig1_mu_pi_3.csv",
            "fig1_summary.json"
        ]
    );
    let rows = fs::read_to_string(dir.path().join("fig1_mu_0.csv"))
        .unwrap()
        .lines()
        .count();
    assert_eq!(rows, 1 + 121 * 101);
}

#[test]
fn figure_two_reports_the_failing_slice() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["figure", "fig2", "--out", dir.path().to_str().unwrap()]);
    // The mu = pi curve is flat-then-falling, not rise-then-fall.
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("mu=pi nu=neg_pi_3"), "{}", stderr(&o));
    assert!(stdout(&o).contains("squeezed interval [standard]"));
    assert!(figure_files(dir.path()).contains(&"fig2_concurrence.csv".to_string()));
}
