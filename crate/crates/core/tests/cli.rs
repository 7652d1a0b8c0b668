//! End-to-end runs of the `skein4` binary.

use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;
use skein_core::algebra::SkeinElt;

const TORUS: &str = r#"{"kind":"abelian","free_rank":2,"omega":[[0,1],[-1,0]]}"#;

fn kink() -> String {
    format!(
        r#"{{"surface":{TORUS},"components":[{{"twists":0,"items":[{{"cross":0}},{{"cross":0}}]}}],
        "crossings":[{{"id":0,"over":[0,0],"sign":1}}]}}"#
    )
}

fn ab_crossing() -> String {
    format!(
        r#"{{"surface":{TORUS},
        "components":[{{"twists":0,"items":[{{"gen":1}},{{"cross":0}}]}},{{"twists":0,"items":[{{"gen":2}},{{"cross":0}}]}}],
        "crossings":[{{"id":0,"over":[1,1],"sign":-1}}]}}"#
    )
}

/// Writes `text` to a file unique to this test and returns its path.
fn file(test: &str, name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("skein4-cli-{}-{test}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn skein4(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_skein4")).args(args).output().expect("binary runs");
    Run {
        code: out.status.code().expect("exit code"),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn lift_of_one_fifth() {
    let f = file("lift", "in.json", r#"{"torsion":[5],"lf":[["1/5"]]}"#);
    let r = skein4(&["lift", path(&f)]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(r.stdout, "{\"lift\":[[\"16/5\"]]}\n");
}

#[test]
fn torus_mul_exact_output() {
    let b = file("mul", "torus.json", TORUS);
    let x = file("mul", "x.json", r#"{"unit":"0+0A","terms":[{"class":[1,0],"coeff":"1+0A"}]}"#);
    let y = file("mul", "y.json", r#"{"unit":"0+0A","terms":[{"class":[0,1],"coeff":"1+0A"}]}"#);
    let r = skein4(&["mul", "--backend", path(&b), path(&x), path(&y)]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(
        r.stdout.trim_end(),
        r#"{"unit":"0+0A","terms":[{"class":[1,1],"coeff":"0+1A"},{"class":[1,-1],"coeff":"0-1A"}]}"#
    );
    let back: SkeinElt = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(serde_json::to_string(&back).unwrap(), r.stdout.trim_end());
}

#[test]
fn class_canonicalizes_over_backend() {
    let b = file("class", "torus.json", TORUS);
    let w = file("class", "w.json", "[-1,-2,2,-2]");
    let r = skein4(&["class", "--backend", path(&b), path(&w)]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v: Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(v["class"], serde_json::json!([1, 1]));
    assert_eq!(v["reliable"], Value::Bool(true));
}

#[test]
fn resolve_and_phi_agree_on_a_kink() {
    let d = file("kink", "kink.json", &kink());
    let r = skein4(&["resolve", path(&d)]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let terms: Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(terms.as_array().unwrap().len(), 1);
    assert_eq!(terms[0]["coeff"], "0+2A");
    assert_eq!(terms[0]["diagram"]["components"], serde_json::json!([]));
    let p = skein4(&["phi", path(&d)]);
    let v: Value = serde_json::from_str(&p.stdout).unwrap();
    assert_eq!(v["element"]["unit"], "0+2A");
    assert_eq!(v["audit"]["sum_big_d"], 3);
}

#[test]
fn product_of_diagrams_multiplies_phi() {
    let a = file("product", "a.json", &ab_crossing());
    let k = file("product", "k.json", &kink());
    let r = skein4(&["product", path(&a), path(&k)]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v: Value = serde_json::from_str(&r.stdout).unwrap();
    let e: SkeinElt = serde_json::from_value(v["element"].clone()).unwrap();
    // Phi(ab) = -A x_(1,1) + A x_(1,-1) and Phi(kink) = 2A
    let phi_ab: SkeinElt = serde_json::from_value(
        serde_json::from_str::<Value>(&skein4(&["phi", path(&a)]).stdout).unwrap()["element"].clone(),
    )
    .unwrap();
    assert_eq!(e, phi_ab.scale(skein_core::ring::CycCoeff::new(0, 2)));
}

#[test]
fn psi_then_phi_returns_the_generator() {
    let b = file("psi", "torus.json", TORUS);
    let c = file("psi", "c.json", "[2,-3]");
    let r = skein4(&["psi", "--backend", path(&b), path(&c)]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v: Value = serde_json::from_str(&r.stdout).unwrap();
    let d = file("psi", "d.json", &v["diagram"].to_string());
    let p: Value = serde_json::from_str(&skein4(&["phi", path(&d)]).stdout).unwrap();
    let terms = p["element"]["terms"].as_array().unwrap();
    assert_eq!(terms.len(), 1);
    assert_eq!(terms[0]["class"], serde_json::json!([2, -3]));
}

#[test]
fn case_one_phi_of_a_link() {
    let f = file(
        "case1",
        "link.json",
        r#"{"rhs":{"torsion":[5],"lf":[["1/5"]]},"link":{"components":[{"class":[1],"word":[1],"frame":"1/5"}],"lk":[["0"]]}}"#,
    );
    let r = skein4(&["phi", path(&f)]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v: Value = serde_json::from_str(&r.stdout).unwrap();
    assert!(v["element"].is_object());
    assert!(v["audit"]["exponent"].as_u64().unwrap() < 4);

    let bare = file("case1", "bare.json", &std::fs::read_to_string(&f).unwrap().replace(r#""word":[1],"#, ""));
    let r = skein4(&["phi", path(&bare)]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("no word"), "{}", r.stderr);
}

#[test]
fn verify_with_zero_cases_is_empty() {
    let r = skein4(&["verify", "--cases", "0"]);
    assert_eq!(r.code, 0);
    assert_eq!(r.stdout, "");
    assert_eq!(r.stderr, "0 checks, 0 failed\n");
}

#[test]
fn verify_is_deterministic() {
    let args = ["verify", "--suite", "skein", "--cases", "5", "--seed", "17"];
    let a = skein4(&args);
    let b = skein4(&args);
    assert_eq!(a.code, 0, "{}", a.stderr);
    assert_eq!(a.stdout, b.stdout);
    for line in a.stdout.lines() {
        let v: Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["status"], "pass");
    }
    let pretty = skein4(&["verify", "--suite", "lift", "--cases", "2", "--pretty"]);
    assert!(pretty.stdout.lines().all(|l| l.starts_with("PASS lift/")), "{}", pretty.stdout);
}

#[test]
fn input_errors_exit_one() {
    let bad = file("errors", "bad.json", r#"{"torsion":[4],"lf":[["1/4"]]}"#);
    let r = skein4(&["lift", path(&bad)]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.starts_with("error:"), "{}", r.stderr);

    let over = file("errors", "over.json", &ab_crossing().replace("[1,1]", "[0,0]"));
    let r = skein4(&["resolve", path(&over)]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("crossings[0].over"), "{}", r.stderr);

    assert_eq!(skein4(&["verify", "--suite", "nope"]).code, 1);
    assert_eq!(skein4(&["lift", "/nonexistent/input.json"]).code, 1);
    assert_eq!(skein4(&["frobnicate"]).code, 1);
    let w = file("errors", "w.json", "[1]");
    assert_eq!(skein4(&["class", path(&w)]).code, 1);
}
