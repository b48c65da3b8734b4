//! End-to-end tests of the binary: every subcommand, every exit code.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const EXAMPLE_CNF: &str = "p cnf 3 2\n-1 2 3 0\n1 -2 -3 0\n";

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sortsupport"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn tmpdir(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write(path: &Path, text: &str) {
    std::fs::write(path, text).unwrap();
}

/// Reduces the example formula into `dir` and returns (instance, trace) paths.
fn reduce_example(dir: &Path) -> (PathBuf, PathBuf) {
    let cnf = dir.join("ex.cnf");
    write(&cnf, EXAMPLE_CNF);
    let out = run(&[
        "reduce",
        cnf.to_str().unwrap(),
        "-o",
        dir.join("ex").to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{out:?}");
    assert_eq!(stdout(&out).trim(), "n=22 k=2 t=24 m=144 q=148 edges=56");
    (dir.join("ex.instance"), dir.join("ex.trace.json"))
}

#[test]
fn reduce_solve_and_check_structure() {
    let dir = tmpdir("reduce_solve");
    let (instance, trace) = reduce_example(&dir);

    let out = run(&["solve", instance.to_str().unwrap(), "--witness"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("YES\n"), "{text}");
    assert!(text.contains("values: "), "{text}");
    assert!(text.contains("perm: "), "{text}");

    let out = run(&["check-structure", instance.to_str().unwrap(), trace.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "structure ok");
}

#[test]
fn check_structure_flags_tampering() {
    let dir = tmpdir("tamper");
    let (instance, trace) = reduce_example(&dir);
    let text = std::fs::read_to_string(&instance).unwrap();
    // widen u_1 so an unintended edge appears
    let tampered = text.replace("u 1 3..6,147..148,151..152", "u 1 3..7,147..148,151..152");
    assert_ne!(tampered, text);
    write(&instance, &tampered);
    let out = run(&["check-structure", instance.to_str().unwrap(), trace.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("extra edge"), "{}", stdout(&out));
}

#[test]
fn solve_pinned_and_json() {
    let dir = tmpdir("pinned");
    let (instance, _) = reduce_example(&dir);
    // d'_1 is v_19; pinning its lower endpoint must keep the instance YES
    let out = run(&[
        "solve",
        instance.to_str().unwrap(),
        "--pin",
        "v:19=145",
        "--format",
        "json",
        "--witness",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(v["outcome"], "YES");
    assert_eq!(v["values"][18], 145);
}

#[test]
fn solve_exit_codes() {
    let dir = tmpdir("codes");
    let no = dir.join("no.instance");
    write(&no, "sortsupport 2\nu 1 5\nu 2 5\nv 1 5\nv 2 4\n");
    assert_eq!(run(&["solve", no.to_str().unwrap()]).status.code(), Some(1));

    let garbled = dir.join("garbled.instance");
    write(&garbled, "not an instance\n");
    assert_eq!(run(&["solve", garbled.to_str().unwrap()]).status.code(), Some(2));

    // bad pin value
    let yes = dir.join("yes.instance");
    write(&yes, "sortsupport 1\nu 1 3\nv 1 3\n");
    let out = run(&["solve", yes.to_str().unwrap(), "--pin", "u:1=9"]);
    assert_eq!(out.status.code(), Some(2));

    // unsatisfiable with wide branching: a tiny budget runs out first
    let limit = dir.join("limit.instance");
    write(
        &limit,
        "sortsupport 6\nu 1 0..5\nu 2 0..5\nu 3 0..5\nu 4 0..5\nu 5 0..5\nu 6 0..5\n\
         v 1 0..5\nv 2 0..5\nv 3 0..5\nv 4 0..5\nv 5 0..5\nv 6 -1\n",
    );
    let out = run(&[
        "solve",
        limit.to_str().unwrap(),
        "--node-limit",
        "3",
        "--no-prune",
    ]);
    assert_eq!(out.status.code(), Some(4));
    assert!(stdout(&out).starts_with("LIMIT"));
}

#[test]
fn reduce_exit_codes() {
    let dir = tmpdir("reduce_codes");
    let unbalanced = dir.join("unbalanced.cnf");
    write(&unbalanced, "p cnf 3 1\n1 2 3 0\n");
    let out = run(&["reduce", unbalanced.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    // with --balance the same formula reduces fine
    let out = run(&["reduce", unbalanced.to_str().unwrap(), "--balance"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("k=4"), "{}", stdout(&out));

    let garbled = dir.join("garbled.cnf");
    write(&garbled, "p cnf x y\n");
    assert_eq!(run(&["reduce", garbled.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn verify_roundtrip_file_and_random() {
    let dir = tmpdir("roundtrip");
    let cnf = dir.join("ex.cnf");
    write(&cnf, EXAMPLE_CNF);
    let out = run(&["verify-roundtrip", cnf.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("agree"));

    for variant in ["overlapping", "disjoint"] {
        let out = run(&[
            "verify-roundtrip",
            "--random",
            "3",
            "2",
            "4",
            "--seed",
            "11",
            "--variant",
            variant,
        ]);
        assert_eq!(out.status.code(), Some(0), "{variant}: {out:?}");
        assert_eq!(stdout(&out).matches("agree").count(), 4);
    }
}

#[test]
fn consistency_levels() {
    let dir = tmpdir("consistency");
    let inst = dir.join("a.instance");
    write(&inst, "sortsupport 2\nu 1 1,3\nu 2 2\nv 1 1..2\nv 2 2..3\n");
    for level in ["domain", "boundsD", "boundsZ"] {
        let out = run(&["consistency", inst.to_str().unwrap(), "--level", level]);
        assert_eq!(out.status.code(), Some(0), "{level}: {out:?}");
        assert!(stdout(&out).contains("consistent=true"), "{level}");
    }

    let bad = dir.join("b.instance");
    write(&bad, "sortsupport 2\nu 1 2\nu 2 1\nv 1 1..2\nv 2 2\n");
    let out = run(&[
        "consistency",
        bad.to_str().unwrap(),
        "--level",
        "domain",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(v["consistent"], false);
    assert_eq!(v["pruned_v"][0], "1");
}

#[test]
fn export_dot_with_and_without_trace() {
    let dir = tmpdir("dot");
    let (instance, trace) = reduce_example(&dir);
    let out = run(&["export-dot", instance.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let plain = stdout(&out);
    assert!(plain.starts_with("graph sortsupport {"));
    assert!(plain.contains("u1 [label=\"u_1\"]"));

    let out = run(&[
        "export-dot",
        instance.to_str().unwrap(),
        "--trace",
        trace.to_str().unwrap(),
    ]);
    let colored = stdout(&out);
    assert!(colored.contains("a_x1_c2"));
    assert!(colored.contains("color=blue"));
    assert!(colored.contains("color=gray50"));
    assert!(!colored.contains("penwidth"), "no unexpected edges in a clean reduction");
}
