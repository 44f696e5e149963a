use std::path::Path;
use std::process::{Command, Output};

use symplectic_index::cli::{execute, Command as Sub, IndexRecord, RunConfig, EXIT_DEGENERATE, EXIT_INPUT, EXIT_OK};
use symplectic_index::HalfInt;

const ROTATION: &str = r#"{"n":1,"segments":[{"S":[3.141592653589793,0,0,3.141592653589793],"d":1}]}"#;

fn symidx(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_symidx")).args(args).current_dir(dir).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn fixture(dir: &Path, name: &str, body: &str) {
    std::fs::write(dir.join(name), body).unwrap();
}

#[test]
fn rotation_file_has_index_one() {
    let dir = tempfile::tempdir().unwrap();
    fixture(dir.path(), "rot.json", ROTATION);
    let o = symidx(&["index", "rot.json"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().any(|l| l == "index = 1"), "{}", stdout(&o));
}

#[test]
fn stretched_periodic_rotation_has_index_two() {
    let dir = tempfile::tempdir().unwrap();
    fixture(dir.path(), "rot.json", ROTATION);
    let o = symidx(&["index", "rot.json", "--flavor", "periodic", "--duration", "2"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().any(|l| l == "index = 2"));
}

#[test]
fn flavor_in_the_file_is_used() {
    let dir = tempfile::tempdir().unwrap();
    let body = r#"{"n":1,"segments":[{"S":[6.283185307179586,0,0,6.283185307179586],"d":1}],"flavor":"periodic"}"#;
    fixture(dir.path(), "full.json", body);
    let o = symidx(&["index", "full.json"], dir.path());
    assert!(stdout(&o).lines().any(|l| l == "index = 2"));
}

#[test]
fn asymmetric_generator_is_an_input_error_naming_the_field() {
    let dir = tempfile::tempdir().unwrap();
    fixture(dir.path(), "bad.json", r#"{"n":1,"segments":[{"S":[1,0,0,1],"d":1},{"S":[1,2,0,1],"d":1}]}"#);
    let o = symidx(&["index", "bad.json"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("segments[1].S"));
}

#[test]
fn malformed_json_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    fixture(dir.path(), "broken.json", r#"{"n":1,"segments":"#);
    assert_eq!(symidx(&["index", "broken.json"], dir.path()).status.code(), Some(1));
    fixture(dir.path(), "extra.json", r#"{"n":1,"segments":[{"S":[1,0,0,1],"d":1}],"colour":1}"#);
    assert_eq!(symidx(&["index", "extra.json"], dir.path()).status.code(), Some(1));
}

#[test]
fn degenerate_periodic_endpoint_exits_two_when_demanded() {
    let dir = tempfile::tempdir().unwrap();
    fixture(dir.path(), "rot.json", ROTATION);
    let o = symidx(&["index", "rot.json", "--flavor", "periodic", "--duration", "2", "--nondegenerate"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn golden_novikov_check_prints_the_element() {
    let dir = tempfile::tempdir().unwrap();
    fixture(
        dir.path(),
        "psi.txt",
        r"\left[(01\overline{11}) − (11\overline{10})\right] e^{\frac{1}{2}(1000) + h[(0001)+(1000)]}",
    );
    let o = symidx(&["novikov", "psi.txt", "--golden"], dir.path());
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines, ["[(01)+(10)]e^{1/2*(10)+h*[(10)-(01)]}", "PASS"], "{text}");
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn unknown_class_is_reported_by_symbol() {
    let dir = tempfile::tempdir().unwrap();
    fixture(dir.path(), "u.txt", "(1010)e^{(0001)}");
    let o = symidx(&["novikov", "u.txt"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown class (1"));
}

#[test]
fn empty_element_prints_nothing() {
    let dir = tempfile::tempdir().unwrap();
    fixture(dir.path(), "z.txt", "\n");
    let o = symidx(&["novikov", "z.txt"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
}

#[test]
fn zero_trials_warns_and_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = symidx(&["suite", "--trials", "0"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("0 trials"));
}

#[test]
fn output_flag_writes_the_report() {
    let dir = tempfile::tempdir().unwrap();
    fixture(dir.path(), "rot.json", ROTATION);
    let o = symidx(&["index", "rot.json", "--output", "out.txt"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let written = std::fs::read_to_string(dir.path().join("out.txt")).unwrap();
    assert!(written.contains("index = 1"));
}

#[test]
fn hormander_command_reads_four_frames() {
    let dir = tempfile::tempdir().unwrap();
    fixture(dir.path(), "h.json", r#"{"n":1,"A":[1,0],"B":[0,1],"C":[1,0],"D":[1,0]}"#);
    let o = symidx(&["hormander", "h.json"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "s = 0");
    fixture(dir.path(), "bad.json", r#"{"n":1,"A":[1,0],"B":[0,1],"C":[1,0,0],"D":[1,0]}"#);
    let o = symidx(&["hormander", "bad.json"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("C:"));
}

#[test]
fn records_round_trip_in_process() {
    let dir = tempfile::tempdir().unwrap();
    fixture(dir.path(), "rot.json", ROTATION);
    let mut cfg = RunConfig::new(Sub::Index {
        input: dir.path().join("rot.json"),
        flavor: None,
        duration: Some(2.0),
        nondegenerate: false,
    });
    cfg.format = symplectic_index::cli::Format::Records;
    let out = execute(&cfg);
    assert_eq!(out.code, EXIT_OK);
    let rec: IndexRecord = serde_json::from_str(out.text.trim()).unwrap();
    assert_eq!(rec.value, HalfInt::from_int(2));
    assert_eq!(rec.crossings.len(), 3);
    assert_eq!(serde_json::to_string(&rec).unwrap(), out.text.trim());
}

#[test]
fn in_process_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    fixture(dir.path(), "rot.json", ROTATION);
    let missing = RunConfig::new(Sub::Double { input: dir.path().join("nope.json"), duration: None });
    assert_eq!(execute(&missing).code, EXIT_INPUT);
    let degenerate = RunConfig::new(Sub::Double { input: dir.path().join("rot.json"), duration: None });
    assert_eq!(execute(&degenerate).code, EXIT_DEGENERATE);
}
