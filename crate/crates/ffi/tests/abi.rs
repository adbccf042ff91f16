use std::ffi::{c_char, CStr, CString};
use std::process::Command;
use std::ptr;

use tgsafe_ffi::*;

const BRIDGE: &str =
    "subject u\nsubject v\nobject o\nobject w\nobject q\nedge u o t\nedge o w g\nedge v w t\nedge v q r\n";

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(tg_last_error_message()) }.to_str().unwrap().to_owned()
}

unsafe fn take_string(p: *mut c_char) -> String {
    let s = CStr::from_ptr(p).to_str().unwrap().to_owned();
    tg_string_free(p);
    s
}

fn parse(doc: &str) -> *mut TgGraph {
    let mut g = ptr::null_mut();
    let text = c(doc);
    assert_eq!(unsafe { tg_graph_parse(text.as_ptr(), TG_FORMAT_TEXT, &mut g) }, TgStatus::Ok);
    assert!(!g.is_null());
    g
}

#[test]
fn parse_query_and_free() {
    let g = parse(BRIDGE);
    unsafe {
        assert_eq!(tg_graph_vertex_count(g), 5);
        assert_eq!(tg_graph_edge_count(g), 4);
        let mut holds = false;
        let st = tg_can_share(g, c("r").as_ptr(), c("u").as_ptr(), c("q").as_ptr(), &mut holds);
        assert_eq!(st, TgStatus::Ok);
        assert!(holds);
        assert_eq!(last_error(), "");

        let st = tg_can_share(g, c("r").as_ptr(), c("q").as_ptr(), c("u").as_ptr(), &mut holds);
        assert_eq!(st, TgStatus::Ok);
        assert!(!holds);

        let mut json = ptr::null_mut();
        let st = tg_analyze_json(g, c("r").as_ptr(), c("u").as_ptr(), c("q").as_ptr(), &mut json);
        assert_eq!(st, TgStatus::Ok);
        let v: serde_json::Value = serde_json::from_str(&take_string(json)).unwrap();
        assert_eq!(v["holds"], true);
        assert!(v["witness"].is_object());
        tg_graph_free(g);
    }
}

#[test]
fn oracle_confirms_and_reports_exhaustion() {
    let g = parse(BRIDGE);
    unsafe {
        let (mut found, mut exhausted) = (false, false);
        let st = tg_oracle_can_share(
            g,
            c("r").as_ptr(),
            c("u").as_ptr(),
            c("q").as_ptr(),
            4,
            1_000_000,
            &mut found,
            &mut exhausted,
        );
        assert_eq!(st, TgStatus::Ok);
        assert!(found);
        let st = tg_oracle_can_share(
            g,
            c("r").as_ptr(),
            c("q").as_ptr(),
            c("u").as_ptr(),
            2,
            1_000_000,
            &mut found,
            &mut exhausted,
        );
        assert_eq!(st, TgStatus::Ok);
        assert!(!found && exhausted);
        tg_graph_free(g);
    }
}

#[test]
fn serialize_round_trips_through_both_formats() {
    let g = parse(BRIDGE);
    unsafe {
        let mut out = ptr::null_mut();
        assert_eq!(tg_graph_serialize(g, TG_FORMAT_STRUCTURED, &mut out), TgStatus::Ok);
        let doc = c(&take_string(out));
        let mut h = ptr::null_mut();
        assert_eq!(tg_graph_parse(doc.as_ptr(), TG_FORMAT_STRUCTURED, &mut h), TgStatus::Ok);

        let mut a = ptr::null_mut();
        let mut b = ptr::null_mut();
        assert_eq!(tg_graph_serialize(g, TG_FORMAT_TEXT, &mut a), TgStatus::Ok);
        assert_eq!(tg_graph_serialize(h, TG_FORMAT_TEXT, &mut b), TgStatus::Ok);
        assert_eq!(take_string(a), take_string(b));

        assert_eq!(tg_graph_export_dot(g, &mut out), TgStatus::Ok);
        assert!(take_string(out).starts_with("digraph"));

        assert_eq!(tg_islands_json(g, &mut out), TgStatus::Ok);
        let v: serde_json::Value = serde_json::from_str(&take_string(out)).unwrap();
        assert_eq!(v.as_array().unwrap().len(), 2);

        assert_eq!(tg_graph_serialize(g, 9, &mut out), TgStatus::InvalidArgument);
        tg_graph_free(g);
        tg_graph_free(h);
    }
}

#[test]
fn errors_map_to_status_codes() {
    unsafe {
        let mut g = ptr::null_mut();
        let bad = c("subject p\nedge p\n");
        assert_eq!(tg_graph_parse(bad.as_ptr(), TG_FORMAT_TEXT, &mut g), TgStatus::ParseError);
        assert!(g.is_null());
        assert!(last_error().contains("line 2"), "{}", last_error());

        assert_eq!(tg_graph_parse(ptr::null(), TG_FORMAT_TEXT, &mut g), TgStatus::NullArgument);
        let invalid = [0xffu8, 0];
        assert_eq!(
            tg_graph_parse(invalid.as_ptr().cast(), TG_FORMAT_TEXT, &mut g),
            TgStatus::InvalidUtf8
        );

        let g = parse(BRIDGE);
        let mut holds = false;
        let st = tg_can_share(g, c("r").as_ptr(), c("zz").as_ptr(), c("q").as_ptr(), &mut holds);
        assert_eq!(st, TgStatus::UnknownVertex);
        assert!(last_error().contains("zz"));
        let st = tg_can_share(ptr::null(), c("r").as_ptr(), c("u").as_ptr(), c("q").as_ptr(), &mut holds);
        assert_eq!(st, TgStatus::NullArgument);
        let st = tg_can_share(g, c("r").as_ptr(), c("u").as_ptr(), c("q").as_ptr(), ptr::null_mut());
        assert_eq!(st, TgStatus::NullArgument);

        assert_eq!(tg_graph_vertex_count(ptr::null()), 0);
        tg_graph_free(ptr::null_mut());
        tg_string_free(ptr::null_mut());
        tg_graph_free(g);
    }
}

#[test]
fn random_graphs_are_reproducible() {
    unsafe {
        let (mut a, mut b) = (ptr::null_mut(), ptr::null_mut());
        assert_eq!(tg_gen_random(20, 0.2, 7, &mut a), TgStatus::Ok);
        assert_eq!(tg_gen_random(20, 0.2, 7, &mut b), TgStatus::Ok);
        assert_eq!(tg_graph_vertex_count(a), 20);
        let (mut x, mut y) = (ptr::null_mut(), ptr::null_mut());
        tg_graph_serialize(a, TG_FORMAT_TEXT, &mut x);
        tg_graph_serialize(b, TG_FORMAT_TEXT, &mut y);
        assert_eq!(take_string(x), take_string(y));
        tg_graph_free(a);
        tg_graph_free(b);

        let mut g = ptr::null_mut();
        assert_eq!(tg_gen_random(5, 1.5, 0, &mut g), TgStatus::InvalidArgument);
        assert!(g.is_null());
    }
}

#[test]
fn header_declares_every_export() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/include/tgsafe.h");
    let header = std::fs::read_to_string(path).unwrap();
    for name in [
        "tg_last_error_message",
        "tg_graph_parse",
        "tg_gen_random",
        "tg_graph_free",
        "tg_string_free",
        "tg_graph_vertex_count",
        "tg_graph_edge_count",
        "tg_graph_serialize",
        "tg_graph_export_dot",
        "tg_can_share",
        "tg_analyze_json",
        "tg_oracle_can_share",
        "tg_islands_json",
        "TG_STATUS_PARSE_ERROR",
        "TG_FORMAT_STRUCTURED",
        "typedef struct TgGraph TgGraph;",
    ] {
        assert!(header.contains(name), "header lacks {name}");
    }
    // Compile the header when a C compiler is around.
    if let Ok(out) = Command::new("cc").args(["-fsyntax-only", "-x", "c", path]).output() {
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
}
