//! End-to-end runs of the `totality` binary.

use serde_json::Value;
use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

fn run(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_totality"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr_json(out: &Output) -> Value {
    let text = String::from_utf8(out.stderr.clone()).unwrap();
    assert_eq!(text.lines().count(), 1, "stderr: {text}");
    serde_json::from_str(text.trim()).unwrap()
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.display().to_string()
}

const USS_3_5_8: &str = r#"{"kind":"uss","a":["3","5"],"b":"8"}"#;

fn counterexample(m: i64) -> String {
    format!(r#"{{"kind":"ilpe","A":[["9","10","9"],["0","0","1"]],"b":["{m}","{m}"]}}"#)
}

#[test]
fn uss_small_example() {
    let out = run(&["uss", "solve"], USS_3_5_8);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "{\"x\":[\"1\",\"1\"],\"verified\":true}\n");

    let strict = run(&["uss", "solve", "--strict"], USS_3_5_8);
    assert_eq!(code(&strict), 2);
    assert_eq!(stderr_json(&strict)["outcome"], "not_in_regime");

    let none = run(&["uss", "solve"], r#"{"kind":"uss","a":["3","5"],"b":"7"}"#);
    assert_eq!(code(&none), 3);
}

#[test]
fn uss_check_reports_regime() {
    let deep = run(&["uss", "check"], r#"{"kind":"uss","a":["3","5"],"b":"30"}"#);
    assert_eq!(code(&deep), 0);
    let v: Value = serde_json::from_str(&stdout(&deep)).unwrap();
    assert_eq!(v["in_regime"], true);
    assert_eq!(code(&run(&["uss", "check"], USS_3_5_8)), 2);
}

#[test]
fn deep_infeasible_instance_is_outside_regime() {
    let out = run(&["ilpe", "solve"], &counterexample(100));
    assert_eq!(code(&out), 2, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stdout.is_empty());
    assert_eq!(stderr_json(&out)["outcome"], "not_in_regime");
    // Column search cannot rescue it: the instance is infeasible.
    assert_eq!(code(&run(&["ilpe", "solve", "--auto"], &counterexample(100))), 2);
}

#[test]
fn hardness_gen_writes_instance_and_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("lb.json");
    let report = dir.path().join("report.json");
    let out = run(
        &["hardness", "gen", "--d", "2", "--output", inst.to_str().unwrap(), "--report", report.to_str().unwrap()],
        "",
    );
    assert_eq!(code(&out), 0);
    let cert = dir.path().join("lb.cert.json");
    assert!(inst.exists() && cert.exists());
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(r["outcome"], "ok");
    assert_eq!(r["certificate"], cert.display().to_string());

    let ok = run(&["hardness", "verify", "--input", inst.to_str().unwrap(), "--certificate", cert.to_str().unwrap()], "");
    assert_eq!(code(&ok), 0);

    // The regime solver must not claim a solution for the generated instance.
    let solve = run(&["ilpe", "solve", "--input", inst.to_str().unwrap()], "");
    assert_ne!(code(&solve), 0);

    // A certificate does not transfer to a perturbed instance.
    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(&inst).unwrap()).unwrap();
    let b0: i64 = v["b"][0].as_str().unwrap().parse().unwrap();
    v["b"][0] = Value::String((b0 + 1).to_string());
    let tampered = write(dir.path(), "tampered.json", &v.to_string());
    let bad = run(&["hardness", "verify", "--input", &tampered, "--certificate", cert.to_str().unwrap()], "");
    assert_eq!(code(&bad), 3);
}

#[test]
fn outputs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        assert_eq!(code(&run(&["hardness", "gen", "--d", "3", "--output", p.to_str().unwrap()], "")), 0);
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(
        std::fs::read(dir.path().join("a.cert.json")).unwrap(),
        std::fs::read(dir.path().join("b.cert.json")).unwrap()
    );

    let deep = r#"{"kind":"ilpe","A":[["1","1","0"],["0","1","1"]],"b":["100","100"]}"#;
    assert_eq!(stdout(&run(&["ilpe", "solve"], deep)), stdout(&run(&["ilpe", "solve"], deep)));
}

#[test]
fn emitted_solutions_pass_oracle_check() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("uss", "solve", r#"{"kind":"uss","a":["6","9","20"],"b":"1000"}"#),
        ("ilpe", "solve", r#"{"kind":"ilpe","A":[["1","1","0"],["0","1","1"]],"b":["100","100"]}"#),
        ("ilp", "solve", r#"{"kind":"ilp","A":[["1","2"],["3","1"]],"b":["50","60"]}"#),
        (
            "hilp",
            "solve",
            r#"{"kind":"hilp","A1":[["1","1","1"]],"b1":["40"],"A2":[["1","-1","0"]],"b2":["5"]}"#,
        ),
    ];
    for (i, (kind, cmd, body)) in cases.iter().enumerate() {
        let input = write(dir.path(), &format!("in{i}.json"), body);
        let sol = dir.path().join(format!("out{i}.json"));
        let out = run(&[kind, cmd, "--input", &input, "--output", sol.to_str().unwrap()], "");
        assert_eq!(code(&out), 0, "{kind}: {}", String::from_utf8_lossy(&out.stderr));
        let check = run(&["oracle", "check", "--input", &input, "--solution", sol.to_str().unwrap()], "");
        assert_eq!(code(&check), 0, "{kind}");
    }

    let input = write(dir.path(), "uss.json", USS_3_5_8);
    let wrong = write(dir.path(), "wrong.json", r#"{"x":["2","1"],"verified":true}"#);
    assert_eq!(code(&run(&["oracle", "check", "--input", &input, "--solution", &wrong], "")), 3);
}

#[test]
fn malformed_input_is_a_single_line_error() {
    for bad in ["not json", r#"{"kind":"uss","a":["3","x"],"b":"8"}"#, r#"{"kind":"ilpe","A":[["1"]],"b":["1","2"]}"#] {
        let out = run(&["ilpe", "solve"], bad);
        assert_eq!(code(&out), 1, "{bad}");
        assert!(out.stdout.is_empty());
        assert_eq!(stderr_json(&out)["outcome"], "error");
    }
    let usage = run(&["ilpe", "frobnicate"], "");
    assert_eq!(code(&usage), 1);
    stderr_json(&usage);
}

#[test]
fn frobenius_and_lattice_commands() {
    let out = run(&["oracle", "frobenius", "--coins", "6,9,20"], "");
    assert_eq!(stdout(&out), "{\"frobenius\":\"43\"}\n");

    let hnf = run(&["lattice", "hnf"], r#"{"kind":"ilpe","A":[["2","4"],["0","6"]],"b":["0","0"]}"#);
    assert_eq!(code(&hnf), 0);
    let v: Value = serde_json::from_str(&stdout(&hnf)).unwrap();
    assert_eq!(v["rank"], 2);
    assert_eq!(v["volume"], "12");
}
