use std::fs;
use std::process::{Command, Output};

const BRIDGE: &str = "((p |[1:1] q) &[2:2] (r |[1:1] s))";
const WORKED: &str = "((p |[1:1] q) |[2:1] (~p |[1:1] ~q))";

fn rifp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rifp"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn parse_prints_canonical_form() {
    let o = rifp(&["parse", "(p&[1:1]~q)"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "(p &[1:1] ~q)\n");
}

#[test]
fn parse_errors_report_offset() {
    let o = rifp(&["parse", "((p |[1:1]] q)"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("10"), "{}", stderr(&o));
}

#[test]
fn ill_formed_input_is_a_usage_error() {
    let o = rifp(&["valid", "((p &[1:1] q) |[1:1] r)"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("error:"));
}

#[test]
fn eval_prints_truth_value() {
    let yes = rifp(&["eval", BRIDGE, "-m", "p=1,q=0,r=1,s=0"]);
    assert_eq!(
        (yes.status.code(), stdout(&yes).as_str()),
        (Some(0), "true\n")
    );
    let no = rifp(&["eval", BRIDGE, "--model", "p=1,q=0,r=0,s=1"]);
    assert_eq!(
        (no.status.code(), stdout(&no).as_str()),
        (Some(0), "false\n")
    );
    let partial = rifp(&["eval", BRIDGE, "-m", "p=1"]);
    assert_eq!(partial.status.code(), Some(2));
}

#[test]
fn valid_exit_codes() {
    let o = rifp(&["valid", WORKED]);
    assert_eq!((o.status.code(), stdout(&o).as_str()), (Some(0), "valid\n"));
    let o = rifp(&["valid", BRIDGE]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o), "invalid, counterexample:\np=0,q=0,r=0,s=0\n");
    let o = rifp(&["--porcelain", "valid", BRIDGE]);
    assert_eq!(stdout(&o), "p=0,q=0,r=0,s=0\n");
}

#[test]
fn prove_then_check_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("worked.proof");
    let path = path.to_str().unwrap();
    let o = rifp(&["prove", WORKED, "-o", path]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("proof with 2 steps written to"));
    let text = fs::read_to_string(path).unwrap();
    assert!(text.starts_with("rifp-proof v1\n"));
    assert!(text.lines().last().unwrap().contains(WORKED));
    let o = rifp(&["check", path]);
    assert_eq!(
        (o.status.code(), stdout(&o).as_str()),
        (Some(0), "accepted\n")
    );
}

#[test]
fn prove_without_output_prints_the_proof() {
    let o = rifp(&["--porcelain", "prove", WORKED]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("rifp-proof v1\n"));
}

#[test]
fn prove_reports_counterexample() {
    let o = rifp(&["prove", BRIDGE]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o), "invalid, counterexample:\np=0,q=0,r=0,s=0\n");
}

#[test]
fn trace_goes_to_stderr() {
    let o = rifp(&["--porcelain", "prove", "--trace", BRIDGE]);
    let log = stderr(&o);
    assert!(!log.is_empty());
    assert!(log.lines().all(|l| l.starts_with("step=")), "{log}");
    assert!(log.contains("step=1 rule=II-"), "{log}");
    assert_eq!(stdout(&o), "p=0,q=0,r=0,s=0\n");
}

#[test]
fn tampered_proof_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.proof");
    let o = rifp(&["--porcelain", "prove", WORKED]);
    let text = stdout(&o);
    let (head, last) = text.trim_end().rsplit_once('\n').unwrap();
    let tampered = format!("{head}\n{}\n", last.replace("~q)", "~r)"));
    fs::write(&path, tampered).unwrap();
    let o = rifp(&["check", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("rejected at step"), "{}", stdout(&o));
}

#[test]
fn malformed_proof_file_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.proof");
    fs::write(&path, "not a proof\n").unwrap();
    let o = rifp(&["check", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let o = rifp(&["check", dir.path().join("missing").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn reads_cirquent_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.txt");
    fs::write(&path, format!("{WORKED}\n")).unwrap();
    let o = rifp(&["valid", "-f", path.to_str().unwrap()]);
    assert_eq!((o.status.code(), stdout(&o).as_str()), (Some(0), "valid\n"));
}

#[test]
fn caps_exceeded_exit_three() {
    let o = rifp(&["--max-atoms", "3", "valid", BRIDGE]);
    assert_eq!(o.status.code(), Some(3));
    let o = rifp(&["--max-clusters", "1", "prove", BRIDGE]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(rifp(&[]).status.code(), Some(2));
    assert_eq!(rifp(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(rifp(&["valid"]).status.code(), Some(2));
    assert_eq!(rifp(&["valid", WORKED, "-f", "x"]).status.code(), Some(2));
    assert_eq!(rifp(&["--help"]).status.code(), Some(0));
}

#[test]
fn run_is_usable_in_process() {
    let out = rifp_cli::run(["rifp", "parse", "p"]);
    assert_eq!(out.code, 0);
    assert_eq!(out.stdout, "p\n");
}
