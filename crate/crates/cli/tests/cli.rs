use std::process::Command;

use serde_json::Value;

use cylklrw::diagram::RawDiagram;
use cylklrw::golden::GoldenSet;
use cylklrw::normal::Engine;
use cylklrw::operator::Mode;
use cylklrw_cli::acceptance::{run_all, Scale};
use cylklrw_cli::expr;
use cylklrw_cli::render::{render_diagram, render_element, Format, RenderError};

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("cylklrw").chain(args.iter().copied());
    let code = cylklrw_cli::run_with(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(args: &[&str]) -> (i32, Value) {
    let (code, out, err) = run(args);
    assert!(!out.is_empty(), "no output; stderr: {err}");
    (code, serde_json::from_str(&out).unwrap())
}

#[test]
fn verify_plucker_passes() {
    let (code, r) = json(&["verify", "plucker"]);
    assert_eq!(code, 0);
    assert_eq!(r["status"], "pass");
    assert_eq!(r["command"], "verify plucker");
}

#[test]
fn degree_of_d13() {
    let (code, r) = json(&["degree", "--expr", "D13"]);
    assert_eq!(code, 0);
    assert_eq!(r["result"], serde_json::json!({"scaling": 0, "winding": [1, 1, 1], "twist": 1}));
}

#[test]
fn same_label_bigon_reduces_to_zero() {
    let (code, r) = json(&["reduce", "--expr", "[1 1; x1; x1]"]);
    assert_eq!(code, 0);
    assert_eq!(r["result"]["text"], "0");
    assert_eq!(r["result"]["normal_form"]["terms"], serde_json::json!([]));
}

#[test]
fn multiply_stacks_the_first_factor_on_top() {
    let (_, a) = json(&["multiply", "D13", "D24"]);
    let (_, b) = json(&["reduce", "--expr", "D13 * D24"]);
    assert_eq!(a["result"], b["result"]);
    assert_eq!(a["result"]["gradings"][0]["twist"], 2);
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(run(&["frobnicate"]).0, 2);
    assert_eq!(run(&["reduce", "--expr", "D12 +"]).0, 2);
    assert_eq!(run(&["reduce", "--expr", "nosuchname"]).0, 2);
    assert_eq!(run(&["reduce", "--expr", "[R2 1; d1]"]).0, 2);
    assert_eq!(run(&["--mode", "sideways", "verify", "plucker"]).0, 2);
    assert_eq!(run(&["classify", "--word", "R2 1 1 R2"]).0, 2);
    let (code, out, _) = run(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("selftest"));
}

#[test]
fn failing_checks_exit_with_one() {
    // b1 has scaling degree 2 and e has 0
    let (code, r) = json(&["degree", "--expr", "b1 + e"]);
    assert_eq!(code, 1, "{r}");
    assert_eq!(r["checks"][0]["status"], "fail");
}

#[test]
fn text_tables() {
    let (code, out, _) = run(&["--text", "verify", "k1", "--n", "3"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("verify k1: PASS"));
    assert!(out.contains("every exponent realized  [1, 4, 1]"));
}

#[test]
fn out_writes_a_file() {
    let dir = std::env::temp_dir().join(format!("cylklrw-out-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("r.json");
    let (code, out, _) = run(&["--out", path.to_str().unwrap(), "verify", "plucker"]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(r["status"], "pass");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn classify_words() {
    let (_, r) = json(&["classify", "--word", "R2 2 1 R2 2 3"]);
    assert_eq!(r["result"]["summands"], serde_json::json!(["R2 2 1 R2 2 3"]));
    assert_eq!(r["result"]["rank"], 2);
    let (_, r) = json(&["classify", "--word", "R1 R1 1"]);
    assert_eq!(r["result"]["line_bundle"], "O(-1)");
}

#[test]
fn transitions_flag_the_prose() {
    let (code, r) = json(&["verify", "transitions", "--word", "21223"]);
    assert_eq!(code, 0);
    let bundle = r["checks"].as_array().unwrap().iter().find(|c| c["name"] == "21223: bundle").unwrap();
    let detail = bundle["detail"].as_str().unwrap();
    assert!(detail.starts_with("T;"), "{detail}");
    assert!(detail.contains("lemma"));
}

#[test]
fn golden_override_from_the_environment() {
    let dir = std::env::temp_dir().join(format!("cylklrw-golden-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("golden.txt");
    std::fs::write(&path, "Cap: word=1 1; events=x1; x1\n").unwrap();
    let bin = env!("CARGO_BIN_EXE_cylklrw");
    let out = Command::new(bin).args(["reduce", "--expr", "Cap"]).env("CYLKLRW_GOLDEN", &path).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["result"]["text"], "0");
    let out = Command::new(bin).args(["verify", "golden"]).env("CYLKLRW_GOLDEN", dir.join("missing")).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_cylklrw");
    let code = |args: &[&str]| Command::new(bin).args(args).output().unwrap().status.code();
    assert_eq!(code(&["verify", "plucker"]), Some(0));
    assert_eq!(code(&["verify"]), Some(2));
    assert_eq!(code(&["degree", "--expr", "b1 + e"]), Some(1));
}

#[test]
fn idempotent_picture() {
    let (code, svg, _) = run(&["render", "--expr", "e"]);
    assert_eq!(code, 0);
    let strands: Vec<&str> = svg.lines().filter(|l| l.starts_with("<line") && !l.contains("gray")).collect();
    assert_eq!(strands.len(), 5);
    assert_eq!(strands.iter().filter(|l| l.contains("stroke=\"red\"")).count(), 2);
    assert_eq!(svg.matches("stroke-dasharray").count(), 2);
}

#[test]
fn zero_and_oversized_elements() {
    let eng = Engine::new(Mode::Plain);
    let zero = eng.reduce(&RawDiagram::parse("1 1", "x1; x1").unwrap()).unwrap();
    let svg = render_element(&zero, Format::Svg).unwrap();
    assert!(svg.contains("<rect") && svg.contains(">0</text>") && !svg.contains("<line"));
    let tikz = render_element(&zero, Format::Tikz).unwrap();
    assert!(tikz.contains("dashed") && tikz.contains("{0}"));
    let c = cylklrw::coulomb::Coulomb::new(4, 2, Mode::Deformed).unwrap();
    let e2 = c.chevalley(2, cylklrw::coulomb::Sign::E).unwrap();
    let f2 = c.chevalley(2, cylklrw::coulomb::Sign::F).unwrap();
    let big = c.engine.multiply(&e2, &f2).unwrap();
    assert!(big.len() > 8);
    assert_eq!(render_element(&big, Format::Svg), Err(RenderError::TooLarge(big.len())));
}

#[test]
fn d12_tikz_snapshot() {
    let d = GoldenSet::embedded().get("D12").unwrap();
    let got = render_diagram(d, Format::Tikz).unwrap();
    assert_eq!(got, include_str!("snapshots/d12.tikz"));
    assert!(got.starts_with("\\documentclass[tikz]{standalone}"));
    assert_eq!(got.matches("\\begin{").count(), got.matches("\\end{").count());
}

/// Printing a golden diagram, or any normal diagram of its reduction, and
/// parsing it back gives the same diagram.
#[test]
fn golden_round_trip() {
    let eng = Engine::new(Mode::Plain);
    for (name, d) in GoldenSet::embedded().iter() {
        let back = expr::parse_raw(&d.to_string()).unwrap();
        assert_eq!(&back, d, "{name}");
        for nd in eng.reduce(d).unwrap().terms().keys() {
            let raw = expr::parse_raw(&nd.to_string()).unwrap();
            assert_eq!(raw, nd.raw(), "{name}");
            let again = eng.reduce(&raw).unwrap();
            assert_eq!(again.terms().keys().collect::<Vec<_>>(), vec![nd], "{name}");
        }
    }
}

/// The report is the same across runs and between the parallel and
/// sequential paths, timings aside.
#[test]
fn selftest_is_reproducible() {
    let a = run_all(Scale::Quick, true);
    let b = run_all(Scale::Quick, false);
    let c = run_all(Scale::Quick, true);
    let strip = |r: &cylklrw_cli::report::Report| {
        let mut v = r.untimed();
        v["inputs"]["parallel"] = Value::Null;
        v
    };
    assert_eq!(strip(&a), strip(&b));
    assert_eq!(a.untimed(), c.untimed());
}
