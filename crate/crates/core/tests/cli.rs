mod common;

use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

use common::EXAMPLES;
use tgsafe::format::{parse_text, serialize_structured};
use tgsafe::{gen_random, RandomGraphParams};

fn tgsafe(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_tgsafe"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

const DIRECT: &str = "subject p\nsubject q\nedge p q r\n";
const COMMON_OBJECT: &str = "subject u\nsubject v\nobject o\nobject q\nedge u o t\nedge v o t\nedge v q r\n";
const BRIDGE: &str =
    "subject u\nsubject v\nobject o\nobject w\nobject q\nedge u o t\nedge o w g\nedge v w t\nedge v q r\n";

#[test]
fn analyze_direct_edge_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.tg");
    std::fs::write(&path, DIRECT).unwrap();
    let out = tgsafe(
        &["analyze", "-i", path.to_str().unwrap(), "--alpha", "r", "--from", "p", "--to", "q"],
        "",
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("direct edge: p -> q carries r"));
}

#[test]
fn analyze_negative_exits_one() {
    let out = tgsafe(&["analyze", "--alpha", "r", "--from", "u", "--to", "q"], COMMON_OBJECT);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("no witness"));
}

#[test]
fn unknown_vertex_exits_two() {
    let out = tgsafe(&["analyze", "--alpha", "r", "--from", "z", "--to", "q"], COMMON_OBJECT);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains('z'));
    assert!(stdout(&out).is_empty());
}

#[test]
fn syntax_errors_report_position() {
    let out = tgsafe(&["islands"], "subject p\nedge p\n");
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("<stdin>: syntax error at line 2, column 7"), "{}", stderr(&out));
}

#[test]
fn missing_query_flags_exit_two() {
    let out = tgsafe(&["analyze", "--alpha", "r"], DIRECT);
    assert_eq!(out.status.code(), Some(2));
    let out = tgsafe(&["oracle-check", "--from", "p", "--to", "q"], DIRECT);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn json_input_detected_by_extension_and_overridable() {
    let dir = tempfile::tempdir().unwrap();
    let doc = serialize_structured(&parse_text(BRIDGE).unwrap());
    let path = dir.path().join("g.json");
    std::fs::write(&path, &doc).unwrap();
    let args = ["analyze", "-i", path.to_str().unwrap(), "--alpha", "r", "--from", "u", "--to", "q"];
    assert_eq!(tgsafe(&args, "").status.code(), Some(0));

    let out = tgsafe(
        &["analyze", "--input-format", "structured", "--alpha", "r", "--from", "u", "--to", "q"],
        &doc,
    );
    assert_eq!(out.status.code(), Some(0));
    // Read as text, the document does not parse.
    let out = tgsafe(&["islands", "--input-format", "text", "-i", path.to_str().unwrap()], "");
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn text_and_structured_agree() {
    let mut docs: Vec<String> = EXAMPLES.iter().map(|d| d.to_string()).collect();
    for seed in 0..20 {
        docs.push(tgsafe::format::serialize_text(&gen_random(&RandomGraphParams::new(5, 0.35, seed))));
    }
    for doc in &docs {
        let g = parse_text(doc).unwrap();
        if g.vertex_count() < 2 {
            continue;
        }
        let (p, q) = (g.name(0).as_str(), g.name(g.vertex_count() - 1).as_str());
        let base = ["analyze", "--alpha", "r", "--from", p, "--to", q];
        let text = tgsafe(&base, doc);
        let mut args = base.to_vec();
        args.extend(["--format", "structured"]);
        let structured = tgsafe(&args, doc);
        assert_eq!(text.status.code(), structured.status.code());
        let v: Value = serde_json::from_str(&stdout(&structured)).unwrap();
        assert_eq!(v["holds"].as_bool(), Some(text.status.code() == Some(0)));
        let rendered = stdout(&text);
        if let Some(bridges) = v["witness"]["bridges"].as_array() {
            for b in bridges {
                let names: Vec<&str> = b["vertices"].as_array().unwrap().iter().map(|x| x.as_str().unwrap()).collect();
                let words: Vec<&str> = b["word"].as_array().unwrap().iter().map(|x| x.as_str().unwrap()).collect();
                let mut line = names[0].to_string();
                for (w, n) in words.iter().zip(&names[1..]) {
                    line.push_str(&format!(" -({w})- {n}"));
                }
                assert!(rendered.contains(&line), "{rendered} lacks {line}");
            }
        }
        if let Some(s) = v["witness"]["alpha_source"].as_str() {
            assert!(rendered.contains(&format!("alpha source: {s} ->")));
        }
    }
}

#[test]
fn oracle_check_reports_and_flags_disagreement() {
    let args = ["oracle-check", "--alpha", "r", "--from", "u", "--to", "q"];
    let out = tgsafe(&args, BRIDGE);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("verdict: agree"));
    assert!(text.contains("create_budget=4"));
    assert!(text.contains("states_explored="));

    let out = tgsafe(&args, COMMON_OBJECT);
    assert_eq!(out.status.code(), Some(1));

    // The bridge needs a created vertex, so with no budget the search cannot
    // confirm the decision.
    let mut starved = args.to_vec();
    starved.extend(["--create-budget", "0", "--format", "structured"]);
    let out = tgsafe(&starved, BRIDGE);
    assert_eq!(out.status.code(), Some(3));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["verdict"], "disagree");
    assert_eq!(v["decision"], true);
}

#[test]
fn gen_random_is_reproducible() {
    let args = ["gen-random", "--n", "12", "--density", "0.2", "--seed", "42"];
    let a = tgsafe(&args, "");
    let b = tgsafe(&args, "");
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let g = parse_text(&stdout(&a)).unwrap();
    assert_eq!(g, gen_random(&RandomGraphParams::new(12, 0.2, 42)));

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let mut with_output = args.to_vec();
    with_output.extend(["--format", "structured", "-o", path.to_str().unwrap()]);
    assert_eq!(tgsafe(&with_output, "").status.code(), Some(0));
    let written = std::fs::read_to_string(&path).unwrap();
    assert_eq!(tgsafe::format::parse_structured(&written).unwrap(), g);

    assert_eq!(tgsafe(&["gen-random", "--n", "3", "--density", "1.5"], "").status.code(), Some(2));
}

#[test]
fn listing_commands() {
    let out = tgsafe(&["bridges"], BRIDGE);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("u -(t>)- o -(g>)- w -(<t)- v : B3"));

    let out = tgsafe(&["spans", "--to", "q"], BRIDGE);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "");

    let out = tgsafe(&["spans", "--to", "p"], "subject p2\nobject o\nobject p\nedge p2 o t\nedge o p g\n");
    assert_eq!(stdout(&out), "p2 -(t>)- o -(g>)- p : initial\n");

    let out = tgsafe(&["path", "--from", "u", "--to", "v"], BRIDGE);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "u o w v\n");

    let out = tgsafe(&["export-dot"], DIRECT);
    assert_eq!(
        stdout(&out),
        "digraph protection {\n  \"p\" [shape=box];\n  \"q\" [shape=box];\n  \"p\" -> \"q\" [label=\"r\"];\n}\n"
    );
}
