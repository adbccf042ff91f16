//! C interface to `tgsafe`.
//!
//! Graphs are exposed as opaque `TgGraph` handles created by
//! [`tg_graph_parse`] or [`tg_gen_random`] and released with
//! [`tg_graph_free`]. Every fallible call returns a [`TgStatus`]; on failure
//! [`tg_last_error_message`] describes the problem. Strings handed out by the
//! library are NUL-terminated UTF-8 and must be released with
//! [`tg_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use serde_json::json;
use tgsafe::decision::{Analysis, Query};
use tgsafe::format::{export_dot, parse_graph, serialize_graph, DocumentFormat};
use tgsafe::oracle::{oracle_can_share, SearchBounds};
use tgsafe::{gen_random, Error, ProtectionGraph, RandomGraphParams};

/// Line-based text document.
pub const TG_FORMAT_TEXT: u32 = 0;
/// JSON document.
pub const TG_FORMAT_STRUCTURED: u32 = 1;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TgStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    UnknownVertex = 4,
    InvalidArgument = 5,
    Panic = 6,
}

/// Opaque graph handle.
pub struct TgGraph {
    graph: ProtectionGraph,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let msg = CString::new(msg.replace('\0', " ")).expect("NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

struct Failure(TgStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::UnknownVertex(_) => TgStatus::UnknownVertex,
            Error::Syntax { .. }
            | Error::Structured(_)
            | Error::EmptyRights { .. }
            | Error::ConflictingKind(_)
            | Error::ReservedName(_)
            | Error::InvalidName(_) => TgStatus::ParseError,
            _ => TgStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

/// Runs `f`, translating errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> TgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            TgStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            TgStatus::Panic
        }
    }
}

unsafe fn text_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(TgStatus::NullArgument, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(TgStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

unsafe fn graph_arg<'a>(g: *const TgGraph) -> Result<&'a ProtectionGraph, Failure> {
    g.as_ref()
        .map(|h| &h.graph)
        .ok_or_else(|| Failure(TgStatus::NullArgument, "graph handle is null".into()))
}

fn null_out(what: &str) -> Failure {
    Failure(TgStatus::NullArgument, format!("{what} is null"))
}

fn format_arg(format: u32) -> Result<DocumentFormat, Failure> {
    match format {
        TG_FORMAT_TEXT => Ok(DocumentFormat::Text),
        TG_FORMAT_STRUCTURED => Ok(DocumentFormat::Structured),
        other => Err(Failure(TgStatus::InvalidArgument, format!("unknown document format {other}"))),
    }
}

unsafe fn give_string(s: String, out: *mut *mut c_char) -> Result<(), Failure> {
    let c = CString::new(s).map_err(|_| Failure(TgStatus::InvalidArgument, "output contains NUL".into()))?;
    *out = c.into_raw();
    Ok(())
}

unsafe fn query_args(alpha: *const c_char, source: *const c_char, target: *const c_char) -> Result<Query, Failure> {
    let q = Query::new(
        text_arg(alpha, "alpha")?,
        text_arg(source, "source")?,
        text_arg(target, "target")?,
    )?;
    Ok(q)
}

/// Message for the last failed call on this thread; empty after a
/// successful call. The pointer stays valid until the next call into the
/// library from the same thread.
#[no_mangle]
pub extern "C" fn tg_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Parses a graph document (`TG_FORMAT_TEXT` or `TG_FORMAT_STRUCTURED`).
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tg_graph_parse(text: *const c_char, format: u32, out: *mut *mut TgGraph) -> TgStatus {
    guard(|| {
        if out.is_null() {
            return Err(null_out("out"));
        }
        *out = ptr::null_mut();
        let text = text_arg(text, "text")?;
        let graph = parse_graph(text, format_arg(format)?)?;
        *out = Box::into_raw(Box::new(TgGraph { graph }));
        Ok(())
    })
}

/// Generates a random graph with the default alphabet {t, g, r} and half
/// the vertices subjects on average.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tg_gen_random(n: usize, density: f64, seed: u64, out: *mut *mut TgGraph) -> TgStatus {
    guard(|| {
        if out.is_null() {
            return Err(null_out("out"));
        }
        *out = ptr::null_mut();
        if !(0.0..=1.0).contains(&density) {
            return Err(Failure(TgStatus::InvalidArgument, "density must lie in [0, 1]".into()));
        }
        let graph = gen_random(&RandomGraphParams::new(n, density, seed));
        *out = Box::into_raw(Box::new(TgGraph { graph }));
        Ok(())
    })
}

/// Releases a graph handle. Null is ignored.
///
/// # Safety
/// `g` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn tg_graph_free(g: *mut TgGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Releases a string returned by the library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn tg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Number of vertices; 0 for a null handle.
///
/// # Safety
/// `g` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tg_graph_vertex_count(g: *const TgGraph) -> usize {
    g.as_ref().map_or(0, |h| h.graph.vertex_count())
}

/// Number of edges; 0 for a null handle.
///
/// # Safety
/// `g` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tg_graph_edge_count(g: *const TgGraph) -> usize {
    g.as_ref().map_or(0, |h| h.graph.edge_count())
}

/// Serializes the graph in canonical form.
///
/// # Safety
/// `g` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tg_graph_serialize(g: *const TgGraph, format: u32, out: *mut *mut c_char) -> TgStatus {
    guard(|| {
        if out.is_null() {
            return Err(null_out("out"));
        }
        let graph = graph_arg(g)?;
        give_string(serialize_graph(graph, format_arg(format)?), out)
    })
}

/// Renders the graph in Graphviz DOT.
///
/// # Safety
/// `g` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tg_graph_export_dot(g: *const TgGraph, out: *mut *mut c_char) -> TgStatus {
    guard(|| {
        if out.is_null() {
            return Err(null_out("out"));
        }
        give_string(export_dot(graph_arg(g)?), out)
    })
}

/// Decides whether `source` can obtain `alpha` over `target`.
///
/// # Safety
/// `g` must be a live handle, the strings NUL-terminated and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn tg_can_share(
    g: *const TgGraph,
    alpha: *const c_char,
    source: *const c_char,
    target: *const c_char,
    out: *mut bool,
) -> TgStatus {
    guard(|| {
        if out.is_null() {
            return Err(null_out("out"));
        }
        let graph = graph_arg(g)?;
        let q = query_args(alpha, source, target)?;
        *out = Analysis::new(graph).can_share(&q)?.holds;
        Ok(())
    })
}

/// Like [`tg_can_share`], returning a JSON report with the answer and its
/// witness.
///
/// # Safety
/// `g` must be a live handle, the strings NUL-terminated and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn tg_analyze_json(
    g: *const TgGraph,
    alpha: *const c_char,
    source: *const c_char,
    target: *const c_char,
    out: *mut *mut c_char,
) -> TgStatus {
    guard(|| {
        if out.is_null() {
            return Err(null_out("out"));
        }
        let graph = graph_arg(g)?;
        let q = query_args(alpha, source, target)?;
        let d = Analysis::new(graph).can_share(&q)?;
        let report = json!({ "query": q, "holds": d.holds, "witness": d.witness });
        give_string(report.to_string(), out)
    })
}

/// Runs the rule-search oracle. `out_found` receives whether a rule
/// sequence was found, `out_exhausted` whether the search finished within
/// `step_limit` (a negative answer is only definitive when it did).
///
/// # Safety
/// `g` must be a live handle, the strings NUL-terminated and the output
/// pointers valid.
#[no_mangle]
pub unsafe extern "C" fn tg_oracle_can_share(
    g: *const TgGraph,
    alpha: *const c_char,
    source: *const c_char,
    target: *const c_char,
    create_budget: usize,
    step_limit: usize,
    out_found: *mut bool,
    out_exhausted: *mut bool,
) -> TgStatus {
    guard(|| {
        if out_found.is_null() || out_exhausted.is_null() {
            return Err(null_out("output pointer"));
        }
        let graph = graph_arg(g)?;
        let q = query_args(alpha, source, target)?;
        let bounds = SearchBounds {
            create_budget,
            step_limit,
            ..SearchBounds::default()
        };
        let answer = oracle_can_share(graph, &q, &bounds)?;
        *out_found = answer.found();
        *out_exhausted = answer.exhausted();
        Ok(())
    })
}

/// Islands as a JSON array of `{"id", "members"}` objects.
///
/// # Safety
/// `g` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tg_islands_json(g: *const TgGraph, out: *mut *mut c_char) -> TgStatus {
    guard(|| {
        if out.is_null() {
            return Err(null_out("out"));
        }
        let islands = tgsafe::compute_islands(graph_arg(g)?);
        give_string(json!(islands).to_string(), out)
    })
}
