use std::path::PathBuf;
use std::process::{Command, Output};

fn beltgrip(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_beltgrip")).args(args).output().unwrap()
}

fn scenario(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/scenarios")
        .join(format!("{name}.toml"))
        .to_string_lossy()
        .into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn payload() {
    let o = beltgrip(&["payload", "--mu", "0.5", "--torque-kgcm", "3.4", "--lc-cm", "5.965"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "max_payload_kg=0.5700");
}

#[test]
fn simulate_then_phases() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("sphere.csv");
    let o = beltgrip(&["simulate", "--scenario", &scenario("sphere_reorient"), "--out", csv.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("outcome=completed"));

    let o = beltgrip(&["phases", "--traj", csv.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("ordered=true"), "{}", stdout(&o));
}

#[test]
fn simulate_to_stdout() {
    let o = beltgrip(&["simulate", "--scenario", &scenario("cube_reposition"), "--t-end", "0.001"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 11);
    assert!(text.starts_with("t,x,v,alpha,omega,"));
}

#[test]
fn plans() {
    let o = beltgrip(&["plan", "reposition", "--scenario", &scenario("cube_reposition"), "--dx", "0.03", "--speed", "0.03"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o).lines().nth(1).unwrap(), "1,0.03,0.03");

    let o = beltgrip(&["plan", "reorient", "--scenario", &scenario("sphere_reorient"), "--alpha", "-90", "--speed", "0.0275"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let row = stdout(&o).lines().nth(1).unwrap().to_string();
    assert!(row.ends_with(",0.0275,-0.0275"), "{row}");
}

#[test]
fn trials_are_reproducible() {
    let args = [
        "trials", "--scenario", &scenario("cube_light_grip"), "--n", "8", "--seed", "3", "--mu-jitter", "0.3",
        "--target-dx", "0.02", "--csv",
    ];
    let a = beltgrip(&args);
    let b = beltgrip(&args);
    assert!(a.status.success(), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert_eq!(text.lines().count(), 10);
    assert!(text.lines().last().unwrap().starts_with("n=8 successes="));
}

#[test]
fn errors_are_one_line_with_a_kind() {
    let o = beltgrip(&["plan", "reposition", "--scenario", &scenario("cube_reposition"), "--dx", "0.2", "--speed", "0.03"]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert_eq!(err.lines().count(), 1);
    assert!(err.starts_with("error kind=outside_region:"), "{err}");

    let o = beltgrip(&["simulate", "--scenario", "/nonexistent.toml"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("error kind=io:"));

    let o = beltgrip(&["payload", "--mu", "-1", "--torque-kgcm", "3.4", "--lc-cm", "5.965"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let o = beltgrip(&["payload", "--bogus"]);
    assert_eq!(o.status.code(), Some(2));
    let o = beltgrip(&["trials", "--scenario", &scenario("cube_reposition")]);
    assert_eq!(o.status.code(), Some(2));
}
