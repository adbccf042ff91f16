//! Protection graph data model.
//!
//! A [`ProtectionGraph`] is immutable once built. Vertices are kept sorted by
//! name and edges sorted by `(from, to)`, so iteration order is deterministic
//! and doubles as the canonical order used by serialization.

use std::borrow::Borrow;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Prefix reserved for vertices introduced by the create rule.
pub const CREATED_PREFIX: &str = "n$";

/// Name of a subject or object.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct VertexId(String);

impl VertexId {
    /// Validates a user-supplied vertex name.
    pub fn new(name: impl Into<String>) -> Result<Self, Error> {
        let name = name.into();
        if name.starts_with(CREATED_PREFIX) {
            return Err(Error::ReservedName(name));
        }
        if !is_name_token(&name) {
            return Err(Error::InvalidName(name));
        }
        Ok(VertexId(name))
    }

    /// Name for the `counter`-th vertex produced by the create rule.
    pub fn created(counter: usize) -> Self {
        VertexId(format!("{CREATED_PREFIX}{counter}"))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn is_created(&self) -> bool {
        self.0.starts_with(CREATED_PREFIX)
    }
}

fn is_name_token(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl TryFrom<String> for VertexId {
    type Error = Error;

    fn try_from(s: String) -> Result<Self, Error> {
        // Created names are legal in documents written by the oracle tooling.
        if let Some(rest) = s.strip_prefix(CREATED_PREFIX) {
            if !rest.is_empty() && rest.chars().all(|c| c.is_ascii_digit()) {
                return Ok(VertexId(s));
            }
            return Err(Error::ReservedName(s));
        }
        VertexId::new(s)
    }
}

impl From<VertexId> for String {
    fn from(v: VertexId) -> String {
        v.0
    }
}

impl Borrow<str> for VertexId {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VertexKind {
    Subject,
    Object,
}

impl VertexKind {
    pub fn keyword(self) -> &'static str {
        match self {
            VertexKind::Subject => "subject",
            VertexKind::Object => "object",
        }
    }
}

/// An access right label. `t` (take) and `g` (grant) are the distinguished
/// rights; every other label is opaque.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Right(String);

impl Right {
    pub const TAKE: &'static str = "t";
    pub const GRANT: &'static str = "g";

    pub fn new(label: impl Into<String>) -> Result<Self, Error> {
        let label = label.into();
        let mut chars = label.chars();
        let ok = matches!(chars.next(), Some(c) if c.is_ascii_lowercase())
            && chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_');
        if ok {
            Ok(Right(label))
        } else {
            Err(Error::InvalidRight(label))
        }
    }

    pub fn take() -> Self {
        Right(Self::TAKE.to_owned())
    }

    pub fn grant() -> Self {
        Right(Self::GRANT.to_owned())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn is_take(&self) -> bool {
        self.0 == Self::TAKE
    }

    pub fn is_grant(&self) -> bool {
        self.0 == Self::GRANT
    }
}

impl TryFrom<String> for Right {
    type Error = Error;

    fn try_from(s: String) -> Result<Self, Error> {
        Right::new(s)
    }
}

impl From<Right> for String {
    fn from(r: Right) -> String {
        r.0
    }
}

impl Borrow<str> for Right {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Right {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Set of rights carried by one edge.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RightSet(BTreeSet<Right>);

impl RightSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn contains(&self, label: &str) -> bool {
        self.0.contains(label)
    }

    pub fn has_take(&self) -> bool {
        self.contains(Right::TAKE)
    }

    pub fn has_grant(&self) -> bool {
        self.contains(Right::GRANT)
    }

    pub fn has_take_or_grant(&self) -> bool {
        self.has_take() || self.has_grant()
    }

    pub fn insert(&mut self, right: Right) -> bool {
        self.0.insert(right)
    }

    pub fn extend(&mut self, other: &RightSet) {
        self.0.extend(other.0.iter().cloned());
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_subset(&self, other: &RightSet) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Right> + '_ {
        self.0.iter()
    }

    /// Labels in sorted order joined by commas, e.g. `r,t`.
    pub fn joined(&self) -> String {
        let labels: Vec<&str> = self.0.iter().map(Right::as_str).collect();
        labels.join(",")
    }
}

impl FromIterator<Right> for RightSet {
    fn from_iter<I: IntoIterator<Item = Right>>(iter: I) -> Self {
        RightSet(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a RightSet {
    type Item = &'a Right;
    type IntoIter = std::collections::btree_set::Iter<'a, Right>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vertex {
    pub name: VertexId,
    pub kind: VertexKind,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub from: VertexId,
    pub to: VertexId,
    pub rights: RightSet,
}

/// A validated protection graph.
///
/// Besides the canonical vertex and edge lists the graph keeps index-based
/// adjacency (`out`/`inc` hold edge positions per vertex position) so the
/// analyses never go through name lookups in their inner loops.
#[derive(Clone, Debug)]
pub struct ProtectionGraph {
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    ends: Vec<(usize, usize)>,
    out: Vec<Vec<usize>>,
    inc: Vec<Vec<usize>>,
}

impl PartialEq for ProtectionGraph {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices && self.edges == other.edges
    }
}

impl Eq for ProtectionGraph {}

impl Default for ProtectionGraph {
    fn default() -> Self {
        GraphBuilder::new().build().expect("empty graph is valid")
    }
}

impl ProtectionGraph {
    pub fn builder() -> GraphBuilder {
        GraphBuilder::new()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Position of `name` in the sorted vertex list.
    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.vertices
            .binary_search_by(|v| v.name.as_str().cmp(name))
            .ok()
    }

    /// Like [`index_of`](Self::index_of) but reports unknown names as errors.
    pub fn require(&self, name: &str) -> Result<usize, Error> {
        self.index_of(name)
            .ok_or_else(|| Error::UnknownVertex(name.to_owned()))
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index_of(name).is_some()
    }

    pub fn name(&self, ix: usize) -> &VertexId {
        &self.vertices[ix].name
    }

    pub fn kind(&self, ix: usize) -> VertexKind {
        self.vertices[ix].kind
    }

    pub fn kind_of(&self, name: &str) -> Option<VertexKind> {
        self.index_of(name).map(|ix| self.kind(ix))
    }

    pub fn is_subject(&self, ix: usize) -> bool {
        self.kind(ix) == VertexKind::Subject
    }

    pub fn subject_count(&self) -> usize {
        self.vertices
            .iter()
            .filter(|v| v.kind == VertexKind::Subject)
            .count()
    }

    /// Endpoint positions of the edge at position `e`.
    pub fn ends(&self, e: usize) -> (usize, usize) {
        self.ends[e]
    }

    /// Edge positions leaving vertex `ix`, sorted by target.
    pub fn out_edges(&self, ix: usize) -> &[usize] {
        &self.out[ix]
    }

    /// Edge positions entering vertex `ix`, sorted by source.
    pub fn in_edges(&self, ix: usize) -> &[usize] {
        &self.inc[ix]
    }

    /// Rights on the edge between two positions, if such an edge exists.
    pub fn rights_at(&self, from: usize, to: usize) -> Option<&RightSet> {
        let out = &self.out[from];
        out.binary_search_by(|&e| self.ends[e].1.cmp(&to))
            .ok()
            .map(|k| &self.edges[out[k]].rights)
    }

    /// Rights on `from -> to`, looked up by name.
    pub fn rights(&self, from: &str, to: &str) -> Option<&RightSet> {
        let (f, t) = (self.index_of(from)?, self.index_of(to)?);
        self.rights_at(f, t)
    }

    pub fn has_right(&self, from: &str, to: &str, right: &str) -> bool {
        self.rights(from, to).is_some_and(|r| r.contains(right))
    }

    /// Every right label that occurs somewhere in the graph.
    pub fn alphabet(&self) -> RightSet {
        let mut all = RightSet::new();
        for e in &self.edges {
            all.extend(&e.rights);
        }
        all
    }

    /// Builder preloaded with this graph's contents.
    pub fn to_builder(&self) -> GraphBuilder {
        let mut b = GraphBuilder::new();
        for v in &self.vertices {
            b.vertices.insert(v.name.clone(), v.kind);
        }
        for e in &self.edges {
            b.edges
                .insert((e.from.clone(), e.to.clone()), e.rights.clone());
        }
        b
    }
}

/// Accumulates vertices and edges; duplicate edges merge their rights.
#[derive(Clone, Debug, Default)]
pub struct GraphBuilder {
    vertices: BTreeMap<VertexId, VertexKind>,
    edges: BTreeMap<(VertexId, VertexId), RightSet>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Declares a vertex. Re-declaring with the same kind is a no-op.
    pub fn vertex(&mut self, name: VertexId, kind: VertexKind) -> Result<&mut Self, Error> {
        match self.vertices.get(&name) {
            Some(&existing) if existing != kind => Err(Error::ConflictingKind(name.to_string())),
            _ => {
                self.vertices.insert(name, kind);
                Ok(self)
            }
        }
    }

    pub fn subject(&mut self, name: &str) -> Result<&mut Self, Error> {
        self.vertex(VertexId::new(name)?, VertexKind::Subject)
    }

    pub fn object(&mut self, name: &str) -> Result<&mut Self, Error> {
        self.vertex(VertexId::new(name)?, VertexKind::Object)
    }

    /// Adds (or merges into) the edge `from -> to`.
    pub fn edge(&mut self, from: VertexId, to: VertexId, rights: RightSet) -> Result<&mut Self, Error> {
        if rights.is_empty() {
            return Err(Error::EmptyRights {
                from: from.to_string(),
                to: to.to_string(),
            });
        }
        self.edges.entry((from, to)).or_default().extend(&rights);
        Ok(self)
    }

    /// Convenience form taking names and a comma-separated rights list.
    pub fn edge_str(&mut self, from: &str, to: &str, rights: &str) -> Result<&mut Self, Error> {
        let set = parse_rights(rights)?;
        let from = VertexId::try_from(from.to_owned())?;
        let to = VertexId::try_from(to.to_owned())?;
        self.edge(from, to, set)
    }

    pub fn build(&self) -> Result<ProtectionGraph, Error> {
        let vertices: Vec<Vertex> = self
            .vertices
            .iter()
            .map(|(name, &kind)| Vertex {
                name: name.clone(),
                kind,
            })
            .collect();
        let position: BTreeMap<&VertexId, usize> = vertices
            .iter()
            .enumerate()
            .map(|(i, v)| (&v.name, i))
            .collect();
        let n = vertices.len();
        let mut edges = Vec::with_capacity(self.edges.len());
        let mut ends = Vec::with_capacity(self.edges.len());
        let mut out = vec![Vec::new(); n];
        let mut inc = vec![Vec::new(); n];
        for ((from, to), rights) in &self.edges {
            let f = *position
                .get(from)
                .ok_or_else(|| Error::UnknownVertex(from.to_string()))?;
            let t = *position
                .get(to)
                .ok_or_else(|| Error::UnknownVertex(to.to_string()))?;
            let e = edges.len();
            edges.push(Edge {
                from: from.clone(),
                to: to.clone(),
                rights: rights.clone(),
            });
            ends.push((f, t));
            out[f].push(e);
            inc[t].push(e);
        }
        // BTreeMap order makes `out` sorted by target; `inc` needs a sort by source.
        for list in &mut inc {
            list.sort_by_key(|&e| ends[e].0);
        }
        Ok(ProtectionGraph {
            vertices,
            edges,
            ends,
            out,
            inc,
        })
    }
}

/// Parses `r,t,...` into a nonempty right set.
pub fn parse_rights(list: &str) -> Result<RightSet, Error> {
    if list.is_empty() {
        return Ok(RightSet::new());
    }
    list.split(',').map(|s| Right::new(s)).collect()
}
