//! Graph documents: the line-oriented text format, the structured (JSON)
//! format, and DOT export.
//!
//! Text format:
//!
//! ```text
//! # comment
//! subject p
//! object o
//! edge p o t,r
//! ```

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::graph::{GraphBuilder, ProtectionGraph, Right, RightSet, VertexId, VertexKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum DocumentFormat {
    #[default]
    Text,
    Structured,
}

impl DocumentFormat {
    /// `.json` selects the structured format; anything else is text.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => DocumentFormat::Structured,
            _ => DocumentFormat::Text,
        }
    }
}

pub fn parse_graph(text: &str, format: DocumentFormat) -> Result<ProtectionGraph, Error> {
    match format {
        DocumentFormat::Text => parse_text(text),
        DocumentFormat::Structured => parse_structured(text),
    }
}

pub fn serialize_graph(g: &ProtectionGraph, format: DocumentFormat) -> String {
    match format {
        DocumentFormat::Text => serialize_text(g),
        DocumentFormat::Structured => serialize_structured(g),
    }
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        line,
        column,
        message: message.into(),
    }
}

/// Parses the line-oriented text format.
pub fn parse_text(text: &str) -> Result<ProtectionGraph, Error> {
    let mut builder = GraphBuilder::new();
    // Edges are resolved after all declarations are seen.
    let mut edges: Vec<(usize, VertexId, VertexId, RightSet)> = Vec::new();

    for (lineno, raw) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let content = raw.split('#').next().unwrap_or("");
        let tokens = tokenize(content);
        let Some(&(col, keyword)) = tokens.first() else {
            continue;
        };
        let arg = |i: usize, what: &str| -> Result<(usize, &str), Error> {
            tokens.get(i).copied().ok_or_else(|| {
                syntax(line_no, content.trim_end().len() + 1, format!("expected {what}"))
            })
        };
        let name = |(c, tok): (usize, &str)| -> Result<VertexId, Error> {
            VertexId::new(tok).map_err(|e| match e {
                Error::InvalidName(n) => syntax(line_no, c, format!("invalid vertex name `{n}`")),
                other => other,
            })
        };
        match keyword {
            "subject" | "object" => {
                let v = name(arg(1, "vertex name")?)?;
                if let Some(&(c, _)) = tokens.get(2) {
                    return Err(syntax(line_no, c, "unexpected token after vertex name"));
                }
                let kind = if keyword == "subject" {
                    VertexKind::Subject
                } else {
                    VertexKind::Object
                };
                builder.vertex(v, kind)?;
            }
            "edge" => {
                let from = name(arg(1, "source vertex")?)?;
                let to = name(arg(2, "target vertex")?)?;
                let (rc, rights_tok) = arg(3, "rights list")?;
                if let Some(&(c, _)) = tokens.get(4) {
                    return Err(syntax(line_no, c, "unexpected token after rights list"));
                }
                let rights = parse_rights_token(rights_tok, line_no, rc)?;
                if rights.is_empty() {
                    return Err(Error::EmptyRights {
                        from: from.to_string(),
                        to: to.to_string(),
                    });
                }
                edges.push((line_no, from, to, rights));
            }
            other => {
                return Err(syntax(line_no, col, format!("unknown keyword `{other}`")));
            }
        }
    }
    for (_, from, to, rights) in edges {
        builder.edge(from, to, rights)?;
    }
    builder.build()
}

/// Whitespace tokenizer that remembers 1-based columns.
fn tokenize(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in line.char_indices() {
        match (c.is_whitespace(), start) {
            (true, Some(s)) => {
                out.push((s + 1, &line[s..i]));
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s + 1, &line[s..]));
    }
    out
}

fn parse_rights_token(tok: &str, line: usize, col: usize) -> Result<RightSet, Error> {
    // `{}` and `{t,r}` are accepted as a courtesy; the canonical form is bare.
    let inner = tok
        .strip_prefix('{')
        .and_then(|t| t.strip_suffix('}'))
        .unwrap_or(tok);
    if inner.is_empty() {
        return Ok(RightSet::new());
    }
    let mut set = RightSet::new();
    let mut offset = col + (tok.len() - inner.len()) / 2;
    for label in inner.split(',') {
        let right =
            Right::new(label).map_err(|_| syntax(line, offset, format!("invalid right `{label}`")))?;
        set.insert(right);
        offset += label.len() + 1;
    }
    Ok(set)
}

pub fn serialize_text(g: &ProtectionGraph) -> String {
    let mut out = String::new();
    for v in g.vertices() {
        let _ = writeln!(out, "{} {}", v.kind.keyword(), v.name);
    }
    for e in g.edges() {
        let _ = writeln!(out, "edge {} {} {}", e.from, e.to, e.rights.joined());
    }
    out
}

#[derive(Serialize, Deserialize)]
struct StructuredVertex {
    name: String,
    kind: VertexKind,
}

#[derive(Serialize, Deserialize)]
struct StructuredEdge {
    from: String,
    to: String,
    rights: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct StructuredGraph {
    vertices: Vec<StructuredVertex>,
    edges: Vec<StructuredEdge>,
}

pub fn parse_structured(text: &str) -> Result<ProtectionGraph, Error> {
    let doc: StructuredGraph = serde_json::from_str(text)?;
    let mut builder = GraphBuilder::new();
    for v in doc.vertices {
        builder.vertex(VertexId::new(v.name)?, v.kind)?;
    }
    for e in doc.edges {
        let rights = e
            .rights
            .into_iter()
            .map(Right::new)
            .collect::<Result<RightSet, _>>()?;
        builder.edge(VertexId::new(e.from)?, VertexId::new(e.to)?, rights)?;
    }
    builder.build()
}

pub fn structured_value(g: &ProtectionGraph) -> serde_json::Value {
    let doc = StructuredGraph {
        vertices: g
            .vertices()
            .iter()
            .map(|v| StructuredVertex {
                name: v.name.to_string(),
                kind: v.kind,
            })
            .collect(),
        edges: g
            .edges()
            .iter()
            .map(|e| StructuredEdge {
                from: e.from.to_string(),
                to: e.to.to_string(),
                rights: e.rights.iter().map(|r| r.to_string()).collect(),
            })
            .collect(),
    };
    serde_json::to_value(doc).expect("graph documents always serialize")
}

pub fn serialize_structured(g: &ProtectionGraph) -> String {
    let mut s = serde_json::to_string_pretty(&structured_value(g)).expect("json");
    s.push('\n');
    s
}

/// Renders the graph as a DOT digraph. Subjects are boxes, objects ellipses.
pub fn export_dot(g: &ProtectionGraph) -> String {
    let mut out = String::from("digraph protection {\n");
    for v in g.vertices() {
        let shape = match v.kind {
            VertexKind::Subject => "box",
            VertexKind::Object => "ellipse",
        };
        let _ = writeln!(out, "  \"{}\" [shape={shape}];", v.name);
    }
    for e in g.edges() {
        let _ = writeln!(
            out,
            "  \"{}\" -> \"{}\" [label=\"{}\"];",
            e.from,
            e.to,
            e.rights.joined()
        );
    }
    out.push_str("}\n");
    out
}
