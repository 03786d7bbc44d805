use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn addrvm(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_addrvm")).args(args).output().unwrap();
    Run {
        code: out.status.code().unwrap(),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name).display().to_string()
}

fn write(dir: &tempfile::TempDir, name: &str, text: &str) -> String {
    let p: PathBuf = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p.display().to_string()
}

#[test]
fn validate_reports_each_definition() {
    let r = addrvm(&["validate", &fixture("validity.am")]);
    assert_eq!(r.code, 3);
    let lines: Vec<&str> = r.stdout.lines().collect();
    assert_eq!(
        lines,
        [
            "P0: ok",
            "P1: ok",
            "P2: ok",
            "P3: ok",
            "P4: error: instruction 0: register 0 uninitialized",
            "P5: error: instruction 1: register 3 uninitialized",
            "P6: error: instruction 1: register 5 nonexistent",
        ]
    );
}

#[test]
fn validate_empty_and_single_files() {
    let dir = tempfile::tempdir().unwrap();
    let empty = write(&dir, "empty.am", "addrvm v1\n");
    let r = addrvm(&["validate", &empty]);
    assert_eq!((r.code, r.stdout.as_str()), (0, ""));

    let p5 = write(&dir, "p5.am", "addrvm v1\nmachine P5 { regs = [_, @x1, @x2, _]; prog = \"Load 0; Call 3\"; }\n");
    let r = addrvm(&["validate", &p5]);
    assert_eq!(r.code, 3);
    assert!(r.stdout.contains("register 3 uninitialized"), "{}", r.stdout);

    let ok = write(&dir, "ok.am", "addrvm v1\nmachine A { regs = [_]; prog = \"Load 0; Call 0\"; }\n");
    assert_eq!(addrvm(&["validate", &ok]).code, 0);
}

#[test]
fn malformed_input_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(&dir, "bad.am", "addrvm v1\nmachine A { regs = [K]; }\n");
    let r = addrvm(&["validate", &bad]);
    assert_eq!(r.code, 3);
    assert!(r.stderr.contains("line 2, column 21"), "{}", r.stderr);
    assert_eq!(addrvm(&["validate", "/nonexistent/file.am"]).code, 3);
    assert_eq!(addrvm(&["run", "Nope"]).code, 3);
    assert_eq!(addrvm(&["equiv", "K", "#99"]).code, 3);
}

#[test]
fn run_reports_outcomes() {
    let r = addrvm(&["run", "K x1 x2"]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.starts_with("final after "), "{}", r.stdout);
    assert!(r.stdout.trim_end().ends_with("regs=[_, _] prog=\"\" tape=[]"), "{}", r.stdout);

    let r = addrvm(&["run", "O", "--trace"]);
    assert_eq!(r.code, 0);
    let lines: Vec<&str> = r.stdout.lines().collect();
    assert_eq!(lines.len(), 4);
    assert!(lines[3].starts_with("cycle after 3 steps at "), "{}", r.stdout);

    let r = addrvm(&["run", "x0"]);
    assert_eq!((r.code, r.stdout.as_str()), (0, "final after 0 steps: regs=[_] prog=\"\" tape=[]\n"));

    let r = addrvm(&["run", "K"]);
    assert!(r.stdout.starts_with("stuck after 0 steps"), "{}", r.stdout);
    assert_eq!(r.code, 0);
}

#[test]
fn run_out_of_fuel_is_unknown() {
    let r = addrvm(&["run", "(\\x.x x)(\\x.x x)", "--fuel", "50"]);
    assert_eq!(r.code, 2);
    assert!(r.stdout.starts_with("out of fuel after 50 steps"), "{}", r.stdout);
}

#[test]
fn run_uses_session_definitions() {
    let dir = tempfile::tempdir().unwrap();
    let s = write(
        &dir,
        "s.am",
        "addrvm v1\nmachine KA { regs = [_]; prog = \"Load 0; Load 0; Call 0\"; tape = [@x1, @x2]; }\n",
    );
    let r = addrvm(&["--session", &s, "run", "KA"]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.contains("final after"), "{}", r.stdout);
    let broken = write(&dir, "b.am", "addrvm v1\nmachine B { prog = \"Call 0\"; }\n");
    let r = addrvm(&["--session", &broken, "run", "K"]);
    assert_eq!(r.code, 3);
    assert!(r.stderr.contains("B: instruction 0: register 0 nonexistent"), "{}", r.stderr);
}

#[test]
fn equiv_verdicts_and_exit_codes() {
    let r = addrvm(&["equiv", "--mode", "ae", "I", "1"]);
    assert_eq!(r.code, 1);
    assert!(r.stdout.starts_with("distinct"), "{}", r.stdout);

    let r = addrvm(&["equiv", "--mode", "eval", "K", "K"]);
    assert_eq!((r.code, r.stdout.as_str()), (0, "equiv\n"));

    let r = addrvm(&["equiv", "--mode", "eval", "S(KI)I", "I"]);
    assert_eq!(r.code, 1);
    assert!(r.stdout.starts_with("distinct"), "{}", r.stdout);

    let r = addrvm(&["equiv", "--mode", "ae", "S(KI)I", "I"]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.starts_with("equiv"), "{}", r.stdout);

    let r = addrvm(&["equiv", "--mode", "ae", "K", "K'", "--depth", "1"]);
    assert_eq!((r.code, r.stdout.as_str()), (2, "unknown(depth exhausted)\n"));

    let r = addrvm(&["equiv", "--mode", "ae", "\\x.O", "O"]);
    assert_eq!(r.code, 2);
    let r = addrvm(&["equiv", "--mode", "ae", "\\x.O", "O", "--strict-distinct"]);
    assert_eq!(r.code, 1);
}

#[test]
fn compile_needs_bound_variables() {
    let r = addrvm(&["compile", "x"]);
    assert_eq!(r.code, 3);
    assert!(r.stderr.contains("variable x is not bound"), "{}", r.stderr);

    let r = addrvm(&["compile", "\\x.x"]);
    assert_eq!((r.code, r.stdout.as_str()), (0, "#0: regs=[_] prog=\"Load 0; Call 0\" tape=[]\n"));

    let r = addrvm(&["compile", "@K"]);
    assert_eq!((r.code, r.stdout.as_str()), (0, "#1: regs=[#0] prog=\"Call 0\" tape=[]\n"));

    let r = addrvm(&["compile", "x", "--ctx", "y,x"]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.ends_with("regs=[_] prog=\"Load 1; Load 0; Call 0\" tape=[]\n"), "{}", r.stdout);
}

#[test]
fn underline_follows_the_plugged_machine() {
    let r = addrvm(&["underline", "--context", &fixture("underline.am"), "--machine", "K", "--fuel", "50"]);
    assert_eq!(r.code, 0, "{}{}", r.stdout, r.stderr);
    assert!(r.stdout.contains("occurrences: 2"), "{}", r.stdout);
    assert!(r.stdout.contains("agrees over"), "{}", r.stdout);
}

#[test]
fn output_is_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    let s = write(
        &dir,
        "s.am",
        "addrvm v1\nterm T = \"\\x y.y x\";\nmachine M { regs = [@T]; prog = \"Call 0\"; tape = [@K, @S]; }\n",
    );
    let a = addrvm(&["--session", &s, "--dump-table", "run", "M", "--trace"]);
    let b = addrvm(&["--session", &s, "--dump-table", "run", "M", "--trace"]);
    assert_eq!(a.stdout, b.stdout);
    let d1 = addrvm(&["--session", &s, "dump"]);
    assert_eq!(d1.stdout, addrvm(&["--session", &s, "dump"]).stdout);
    assert!(d1.stdout.starts_with("T = #"), "{}", d1.stdout);
    assert!(d1.stdout.lines().any(|l| l.starts_with("0: ")), "{}", d1.stdout);
}
