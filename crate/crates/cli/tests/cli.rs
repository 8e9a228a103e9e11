use std::io::Write;
use std::process::{Command, Output, Stdio};
use std::sync::Arc;

use invlim_core::arith::rat;
use invlim_core::ladder::{DirectChain, InverseChain};
use invlim_core::systems::SetChain;
use invlim_core::{Atom, CheckStatus, Element, Extent, Hom, ModuleShape, Report};
use serde_json::{json, Value};

fn invlim(args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_invlim"))
        .args(args)
        .env_remove("INVLIM_SEED")
        .stdin(if stdin.is_some() { Stdio::piped() } else { Stdio::null() })
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn invlim");
    if let Some(s) = stdin {
        child.stdin.take().unwrap().write_all(s.as_bytes()).unwrap();
    }
    child.wait_with_output().unwrap()
}

fn report(out: &Output) -> Report {
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    assert_eq!(text.lines().count(), 1, "one report line: {text}");
    serde_json::from_str(&text).unwrap()
}

fn check<'a>(r: &'a Report, name: &str) -> &'a invlim_core::Check {
    r.checks.iter().find(|c| c.name == name).unwrap_or_else(|| panic!("no check {name}"))
}

#[test]
fn thm1_on_z_passes_intersection_check() {
    let out = invlim(&["thm1", "--seed", "7"], Some(r#"{"ngens":1,"relations":[]}"#));
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r.seed, 7);
    assert_eq!(r.command, "thm1");
    let c = check(&r, "intersection ≅ ker f = A");
    assert_eq!(c.status, CheckStatus::Pass);
    assert_eq!(c.cases, 100);
    assert_eq!(r.output, Some(json!({"rank": 1, "invariant_factors": []})));
}

#[test]
fn seed_comes_from_env_unless_flag_given() {
    let run = |args: &[&str], env: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_invlim"))
            .args(args)
            .env("INVLIM_SEED", env)
            .stdin(Stdio::null())
            .output()
            .unwrap();
        report(&out).seed
    };
    assert_eq!(run(&["ex6", "--samples", "3"], "11"), 11);
    assert_eq!(run(&["ex6", "--samples", "3", "--seed", "5"], "11"), 5);
}

#[test]
fn usage_and_input_errors_exit_2() {
    for args in [&["snf", "--bogus"][..], &["nosuch"], &["thm1", "--output", "xml"], &["bigdiv", "--primes", "4"]] {
        assert_eq!(invlim(args, Some("[]")).status.code(), Some(2), "{args:?}");
    }
    for cmd in ["snf", "hull", "thm1", "thm2", "ladder"] {
        let out = invlim(&[cmd], None);
        assert_eq!(out.status.code(), Some(2), "{cmd}");
        assert!(out.stdout.is_empty());
        let err = String::from_utf8(out.stderr).unwrap();
        assert_eq!(err.lines().count(), 1, "{err}");
        assert!(err.contains("missing input"), "{err}");
    }
    let out = invlim(&["hull"], Some(r#"{"ngens":2,"relations":[["1","x"]]}"#));
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("relations[0][1]"));
    let out = invlim(&["ex6", "--input", "-"], Some(r#"{"head":[],"tail":3}"#));
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("tail"));
}

#[test]
fn ex6_shows_the_refutation() {
    let out = invlim(&["ex6", "--k", "2", "--input", "-"], Some(r#"{"head":[],"tail":"1"}"#));
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    let division = &r.output.unwrap()["division"];
    assert_eq!(division, &json!({"refuted": {"k": "2", "tail": "1", "residue": "1"}}));
    let out = invlim(&["ex6", "--k", "3", "--input", "-"], Some(r#"{"head":["1/2"],"tail":"6"}"#));
    let division = report(&out).output.unwrap()["division"].clone();
    assert_eq!(division, json!({"quotient": {"head": ["1/6"], "tail": "2"}}));
}

#[test]
fn snf_reports_invariant_factors() {
    let out = invlim(&["snf"], Some(r#"[["2","4","4"],["-6","6","12"],["10","-4","-16"]]"#));
    assert_eq!(out.status.code(), Some(0));
    let o = report(&out).output.unwrap();
    assert_eq!(o["invariant_factors"], json!(["2", "6", "12"]));
}

#[test]
fn hull_output_feeds_thm2() {
    let out = invlim(&["hull", "--samples", "10"], Some(r#"[["2","0"],["0","0"]]"#));
    assert_eq!(out.status.code(), Some(0));
    let o = report(&out).output.unwrap();
    assert_eq!(o["presentation"]["decomposition"]["invariant_factors"], json!(["2"]));
    let out = invlim(&["thm2", "--samples", "10", "--stages", "2"], Some(&o.to_string()));
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r.checks.len(), 4);
    assert_eq!(r.output, Some(json!({"rank": 1, "invariant_factors": ["2"]})));
}

fn qz() -> Arc<ModuleShape> {
    Arc::new(ModuleShape::single("r", Atom::QmodZ, Extent::Finite(1)))
}

#[test]
fn ladder_from_input() {
    let inv = InverseChain::constant(&Hom::mult_by_int(&qz(), 2.into()), 3).unwrap();
    let x = Element::from_coords(&qz(), [("r", 0, rat(1, 3))]).unwrap();
    let doc = json!({ "chain": inv, "indices": ["2", "2", "2"], "x": x });
    let out = invlim(&["ladder", "--k", "3"], Some(&doc.to_string()));
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    let transcript = &r.output.unwrap()["transcript"];
    let want = Element::from_coords(&qz(), [("r", 0, rat(1, 192))]).unwrap();
    assert_eq!(transcript[3]["image"], serde_json::to_value(&want).unwrap());

    let direct = DirectChain::from_indices(&[2.into()]).unwrap();
    let doc = json!({ "chain": inv, "direct": direct, "x": x });
    let out = invlim(&["ladder", "--k", "3"], Some(&doc.to_string()));
    assert_eq!(out.status.code(), Some(1), "too short a direct chain fails");
    assert!(report(&out).checks[0].counterexample.is_some());
}

#[test]
fn bigdiv_certificate_from_input() {
    let inv = InverseChain::constant(&Hom::mult_by_int(&qz(), 2.into()), 2).unwrap();
    let x = Element::from_coords(&qz(), [("r", 0, rat(1, 5))]).unwrap();
    let doc = json!({ "chain": inv, "x": x });
    let out = invlim(&["bigdiv", "--primes", "2", "--k", "2", "--input", "-"], Some(&doc.to_string()));
    assert_eq!(out.status.code(), Some(0));
    let o = report(&out).output.unwrap();
    assert_eq!(o["direct"]["generators"], json!(["1", "1/2", "1/16"]));
    assert_eq!(o["certificate"]["c"], json!("16"));
    let y = Element::from_coords(&qz(), [("r", 0, rat(1, 320))]).unwrap();
    assert_eq!(o["certificate"]["y"], serde_json::to_value(&y).unwrap());
}

#[test]
fn zerolim_from_input() {
    let chain = SetChain::new(vec![2, 3, 3], vec![vec![0, 1, 1], vec![2, 0, 1]]).unwrap();
    let doc = json!({ "chain": chain, "atom": Atom::QmodZ });
    let out = invlim(&["zerolim", "--samples", "5", "--input", "-"], Some(&doc.to_string()));
    assert_eq!(out.status.code(), Some(0));
    assert!(report(&out).checks.iter().all(|c| c.cases > 0));
    let bad = r#"{"chain":{"sizes":[2,3],"maps":[[0,0,0]]},"atom":{"atom":"qmodz"}}"#;
    assert_eq!(invlim(&["zerolim", "--input", "-"], Some(bad)).status.code(), Some(2));
}

#[test]
fn reports_are_deterministic_and_round_trip() {
    let strip = |out: &Output| {
        let line = String::from_utf8(out.stdout.clone()).unwrap();
        let mut v: Value = serde_json::from_str(&line).unwrap();
        let r: Report = serde_json::from_value(v.clone()).unwrap();
        assert_eq!(serde_json::to_string(&r).unwrap() + "\n", line);
        v.as_object_mut().unwrap().remove("elapsed_ms");
        v
    };
    let args = ["zerolim", "--seed", "3", "--samples", "6"];
    assert_eq!(strip(&invlim(&args, None)), strip(&invlim(&args, None)));
    let args = ["bigdiv", "--seed", "3", "--samples", "6"];
    assert_eq!(strip(&invlim(&args, None)), strip(&invlim(&args, None)));
}

#[test]
fn text_output() {
    let out = invlim(&["ex6", "--samples", "5", "--output", "text"], None);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("ex6 (seed 0)"));
    assert!(text.contains("PASS k | tail ⇔ divisible"));
}
