use std::process::{Command, Output};

use serde_json::Value;

fn ghk(args: &[&str]) -> Output {
    ghk_env(args, None)
}

fn ghk_env(args: &[&str], profile: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_ghk"));
    cmd.args(args).env_remove("GHK_TOLERANCE_PROFILE");
    if let Some(p) = profile {
        cmd.env("GHK_TOLERANCE_PROFILE", p);
    }
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("valid JSON")
}

fn csv(o: &Output) -> (Vec<String>, Vec<Vec<String>>) {
    let text = stdout(o);
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    (header, rows)
}

fn col(header: &[String], rows: &[Vec<String>], name: &str) -> Vec<f64> {
    let i = header.iter().position(|h| h == name).unwrap();
    rows.iter().map(|r| r[i].parse().unwrap()).collect()
}

#[test]
fn report_sts_json() {
    let o = ghk(&["report", "--sts", "nbar1=1", "nbar2=1", "r=1"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let doc = json(&o);
    assert_eq!(doc["schema"], 1);
    assert_eq!(doc["input"]["source"], "sts");
    assert!(doc["provenance"]["library_version"].is_string());
    let d = doc["report"]["hellinger_discord"].as_f64().unwrap();
    assert!((d - 0.58003).abs() < 1e-5);
    assert!(doc["standard_form"]["c"].as_f64().unwrap() > 0.0);
}

#[test]
fn report_product_is_all_zero() {
    let o = ghk(&["report", "--std-form", "1.5,0.7,0,0", "--out", "csv"]);
    assert!(o.status.success());
    let (header, rows) = csv(&o);
    for name in ["hellinger", "mutual", "eof"] {
        assert_eq!(col(&header, &rows, name), vec![0.0], "{name}");
    }
    assert_eq!(col(&header, &rows, "max_affinity"), vec![1.0]);
    let i = header.iter().position(|h| h == "entropic").unwrap();
    assert_eq!(rows[0][i], "NA");
}

#[test]
fn unphysical_matrix_exits_2() {
    let o = ghk(&["report", "--matrix", "0.3 0 0 0; 0 0.3 0 0; 0 0 1 0; 0 0 0 1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("not physical"), "{}", stderr(&o));
    assert!(o.stdout.is_empty());
}

#[test]
fn malformed_inputs_exit_2() {
    for args in [
        &["report", "--std-form", "1,2,3"][..],
        &["report", "--sts", "nbar1=1", "r=1"],
        &["report", "--sts", "nbar1=1", "nbar2=1", "r=1", "--mts", "kappa1=2"],
        &["report"],
        &[
            "sweep",
            "--family",
            "sts",
            "--sweep-param",
            "r",
            "--range",
            "0:1:1",
            "--fixed",
            "nbar1=1,nbar2=1",
        ],
    ] {
        assert_eq!(ghk(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn report_round_trips_through_matrix_input() {
    let dir = tempfile::tempdir().unwrap();
    let first = ghk(&[
        "report",
        "--std-form",
        "2.2,1.4,0.9,-0.3,1.7,0.6",
        "--mean",
        "0.5,-1,0,2",
    ]);
    assert!(first.status.success(), "{}", stderr(&first));
    let path = dir.path().join("report.json");
    std::fs::write(&path, &first.stdout).unwrap();
    let second = ghk(&["report", "--matrix", path.to_str().unwrap()]);
    assert!(second.status.success(), "{}", stderr(&second));
    let (a, b) = (json(&first), json(&second));
    for key in ["cm", "mean", "standard_form", "report", "closest_product"] {
        assert_eq!(a[key], b[key], "{key}");
    }
    assert_eq!(b["input"]["source"], "matrix");
}

#[test]
fn matrix_file_in_plain_text() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tmsv.txt");
    let (ch, sh) = (1f64.cosh() * 1f64.cosh(), 1f64.cosh() * 1f64.sinh());
    let text = format!(
        "{a} 0 {c} 0\n0 {a} 0 {m}\n{c} 0 {a} 0\n0 {m} 0 {a}\n",
        a = 0.5 * (2.0 * ch - 1.0),
        c = sh,
        m = -sh
    );
    std::fs::write(&path, text).unwrap();
    let o = ghk(&["report", "--matrix", path.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let d = json(&o)["report"]["hellinger_discord"].as_f64().unwrap();
    assert!((d - 1f64.tanh().powi(2)).abs() < 1e-9);
}

#[test]
fn sweeps_are_byte_identical_across_runs() {
    let args = [
        "sweep",
        "--family",
        "symmetric",
        "--sweep-param",
        "b",
        "--range",
        "2.5:9:40",
        "--fixed",
        "det=6.25",
    ];
    let (a, b) = (ghk(&args), ghk(&args));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let mut json_args = args.to_vec();
    json_args.extend(["--out", "json"]);
    assert_eq!(ghk(&json_args).stdout, ghk(&json_args).stdout);
}

#[test]
fn sts_squeezing_sweep_increases_below_one() {
    let o = ghk(&[
        "sweep",
        "--family",
        "sts",
        "--sweep-param",
        "r",
        "--range",
        "0:3:31",
        "--fixed",
        "kappa1=0.5",
        "--fixed",
        "kappa2=20.5",
        "--columns",
        "hellinger",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let (header, rows) = csv(&o);
    assert_eq!(header, ["r", "physical", "hellinger"]);
    let d = col(&header, &rows, "hellinger");
    assert!(d.windows(2).all(|w| w[1] > w[0]) && d.iter().all(|&x| x < 1.0));
}

#[test]
fn fixed_purity_sweeps_share_classical_correlations() {
    let run = |dsign: &str| {
        let fixed = format!("det=6.25,dsign={dsign}");
        let o = ghk(&[
            "sweep",
            "--family",
            "symmetric",
            "--sweep-param",
            "b",
            "--range",
            "2.5:6.5:21",
            "--fixed",
            &fixed,
            "--columns",
            "hellinger,entropic,mutual,classical",
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
        csv(&o)
    };
    let (h, sts) = run("-1");
    let (_, mts) = run("1");
    let i = h.iter().position(|x| x == "classical").unwrap();
    assert!(sts.iter().zip(&mts).all(|(a, b)| a[i] == b[i]));
    for rows in [&sts, &mts] {
        let (m, e) = (col(&h, rows, "mutual"), col(&h, rows, "entropic"));
        assert!(m.iter().zip(&e).all(|(m, e)| m >= e));
    }
}

#[test]
fn eof_switches_on_past_the_separability_threshold() {
    let o = ghk(&[
        "sweep",
        "--family",
        "symmetric",
        "--sweep-param",
        "b",
        "--range",
        "2.5:10.5:17",
        "--fixed",
        "det=6.25",
        "--columns",
        "eof,hellinger",
    ]);
    let (h, rows) = csv(&o);
    let b = col(&h, &rows, "b");
    let eof = col(&h, &rows, "eof");
    for (b, e) in b.iter().zip(&eof) {
        assert_eq!(*b <= 6.5, *e == 0.0, "b = {b}, eof = {e}");
    }
}

#[test]
fn unphysical_sweep_points_are_flagged() {
    let o = ghk(&[
        "sweep",
        "--family",
        "symmetric",
        "--sweep-param",
        "b",
        "--range",
        "0.5:2:4",
        "--fixed",
        "c=1",
        "--columns",
        "hellinger",
    ]);
    assert!(o.status.success());
    let (_, rows) = csv(&o);
    assert_eq!(rows[0], ["0.5", "false", "NA"]);
    assert_eq!(rows[3][1], "true");
    assert!(stderr(&o).contains("not physical"));
}

#[test]
fn verify_default_run_passes() {
    let o = ghk(&["verify", "--seed", "42", "--trials", "100"]);
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("oracle-gap") && text.contains("holevo-sandwich"));
    assert!(!text.contains("BREACH"));
}

#[test]
fn verify_zero_trials_is_a_usage_error() {
    let o = ghk(&["verify", "--trials", "0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--trials"));
}

#[test]
fn injected_breach_exits_1_with_the_offending_state() {
    let o = ghk(&["verify", "--trials", "5", "--starts", "8", "--inject-breach", "1e-3"]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    assert!(text.contains("breach in oracle-gap"), "{text}");
    assert!(text.contains("standard form b1="));
}

#[test]
fn tolerance_profile_from_environment() {
    let args = ["verify", "--trials", "5", "--starts", "8", "--json"];
    let strict = ghk_env(&args, Some("strict"));
    assert!(strict.status.success(), "{}", stdout(&strict));
    let doc = json(&strict);
    assert_eq!(doc["profile"], "strict");
    assert_eq!(doc["passed"], true);
    assert_eq!(ghk_env(&args, Some("lenient")).status.code(), Some(2));
}
