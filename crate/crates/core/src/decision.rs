//! The can-share decision.
//!
//! `can_share(alpha, p, q)` holds iff `p -> q` already carries `alpha`, or
//! there is a vertex `s` with `s -> q` carrying `alpha` such that
//!
//! * some subject `p'` is `p` itself or initially spans to `p`,
//! * some subject `s'` is `s` itself or terminally spans to `s`,
//! * a chain of islands `I1 .. Ik` has `p'` in `I1`, `s'` in `Ik`, and
//!   consecutive islands joined by bridges.
//!
//! The vertex `s` is essential: without an existing `alpha` edge into `q`
//! there is nothing to propagate, whatever the connectivity.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fmt::Write as _;
use std::sync::OnceLock;

use serde::Serialize;

use crate::error::Error;
use crate::graph::{ProtectionGraph, Right, VertexId, VertexKind};
use crate::islands::{island_map, IslandMap};
use crate::path::tg_path;
use crate::walks::{
    bridge_patterns, lex_walks, plain_reach, reverse_distances, span_walk, to_walk, Matcher, SpanKind,
    StepTable, Walk, WordClass,
};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Query {
    pub alpha: Right,
    pub source: VertexId,
    pub target: VertexId,
}

impl Query {
    pub fn new(alpha: &str, source: &str, target: &str) -> Result<Self, Error> {
        Ok(Query {
            alpha: Right::new(alpha)?,
            source: VertexId::try_from(source.to_owned())?,
            target: VertexId::try_from(target.to_owned())?,
        })
    }
}

/// How a span endpoint is reached: the vertex is itself a subject, or a
/// subject reaches it through a span walk (whose start is that subject).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SpanLink {
    Itself,
    Span(Walk),
}

impl SpanLink {
    /// The subject standing for `endpoint`.
    pub fn subject<'a>(&'a self, endpoint: &'a VertexId) -> &'a VertexId {
        match self {
            SpanLink::Itself => endpoint,
            SpanLink::Span(w) => w.start(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ShareProof {
    /// A vertex holding `alpha` over the target.
    pub alpha_source: VertexId,
    /// Links the query source to a subject `p'` in the first island.
    pub initial: SpanLink,
    /// Links a subject `s'` in the last island to the alpha source.
    pub terminal: SpanLink,
    /// Island ids, numbered as by [`compute_islands`](crate::islands::compute_islands).
    pub island_chain: Vec<usize>,
    /// `bridges[i]` runs from island `island_chain[i]` to `island_chain[i + 1]`.
    pub bridges: Vec<Walk>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// The edge `source -> target` already carries the right.
    Direct,
    Composite(ShareProof),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Decision {
    pub holds: bool,
    pub witness: Option<Witness>,
}

impl Decision {
    fn no() -> Self {
        Decision {
            holds: false,
            witness: None,
        }
    }

    fn yes(w: Witness) -> Self {
        Decision {
            holds: true,
            witness: Some(w),
        }
    }
}

/// Per-graph analysis state. Islands, the oriented step table and island
/// bridge distances are computed on first use and then shared, so one
/// handle can serve many queries, from several threads if needed.
pub struct Analysis<'g> {
    g: &'g ProtectionGraph,
    islands: OnceLock<IslandMap>,
    table: OnceLock<StepTable>,
    rows: OnceLock<Vec<OnceLock<Vec<(usize, usize)>>>>,
}

type Cost = (usize, usize);

impl<'g> Analysis<'g> {
    pub fn new(g: &'g ProtectionGraph) -> Self {
        Analysis {
            g,
            islands: OnceLock::new(),
            table: OnceLock::new(),
            rows: OnceLock::new(),
        }
    }

    pub fn graph(&self) -> &'g ProtectionGraph {
        self.g
    }

    pub fn islands(&self) -> &IslandMap {
        self.islands.get_or_init(|| island_map(self.g))
    }

    pub(crate) fn table(&self) -> &StepTable {
        self.table.get_or_init(|| StepTable::new(self.g))
    }

    /// Shortest bridge length from island `id` to each other island it
    /// reaches, sorted by island id.
    fn bridge_row(&self, id: usize) -> &[(usize, usize)] {
        let rows = self
            .rows
            .get_or_init(|| (0..self.islands().len()).map(|_| OnceLock::new()).collect());
        rows[id].get_or_init(|| {
            let map = self.islands();
            let reach = plain_reach(self.table(), map.member_positions(id), Matcher::AnyBridge);
            let mut best: Vec<Option<usize>> = vec![None; map.len()];
            for (v, d) in reach.iter().enumerate() {
                let (Some(d), Some(j)) = (*d, map.island_of(v)) else {
                    continue;
                };
                if j != id && best[j].map_or(true, |b| d < b) {
                    best[j] = Some(d);
                }
            }
            best.into_iter()
                .enumerate()
                .filter_map(|(j, d)| d.map(|d| (j, d)))
                .collect()
        })
    }

    /// Shortest bridge from island `a` to island `b`, smallest vertex
    /// sequence among those.
    fn bridge_between(&self, a: usize, b: usize) -> Option<Walk> {
        let map = self.islands();
        let mut best: Option<(usize, Vec<usize>, Vec<_>)> = None;
        for &u in map.member_positions(a) {
            let found = lex_walks(self.table(), u, Matcher::AnyBridge, |v| {
                map.island_of(v) == Some(b)
            });
            for (_, path, word) in found {
                let better = match &best {
                    None => true,
                    Some((len, p, _)) => (word.len(), &path) < (*len, p),
                };
                if better {
                    best = Some((word.len(), path, word));
                }
            }
        }
        best.map(|(_, path, word)| to_walk(self.g, &path, word))
    }

    pub fn can_share(&self, q: &Query) -> Result<Decision, Error> {
        let g = self.g;
        let p = g.require(q.source.as_str())?;
        let t = g.require(q.target.as_str())?;
        let alpha = q.alpha.as_str();
        if g.rights_at(p, t).is_some_and(|r| r.contains(alpha)) {
            return Ok(Decision::yes(Witness::Direct));
        }
        let alpha_sources: Vec<usize> = g
            .in_edges(t)
            .iter()
            .filter(|&&e| g.edges()[e].rights.contains(alpha))
            .map(|&e| g.ends(e).0)
            .collect();
        if alpha_sources.is_empty() {
            return Ok(Decision::no());
        }
        let map = self.islands();
        let table = self.table();

        // Candidate links as (subject, steps); walks are only built for the
        // links the witness ends up using.
        let mut initial: Vec<(usize, usize)> = Vec::new();
        if g.is_subject(p) {
            initial.push((p, 0));
        }
        initial.extend(reverse_distances(table, p, Matcher::Class(WordClass::Span(SpanKind::Initial))));
        if initial.is_empty() {
            return Ok(Decision::no());
        }

        // Best initial link per island, then Dijkstra over islands with
        // cost (islands used, walk steps).
        let k = map.len();
        let mut dist: Vec<Option<Cost>> = vec![None; k];
        let mut parent: Vec<Option<usize>> = vec![None; k];
        let mut root_link: Vec<Option<usize>> = vec![None; k];
        let mut heap = BinaryHeap::new();
        for (i, &(pp, len)) in initial.iter().enumerate() {
            let id = map.island_of(pp).expect("span starts are subjects");
            let cost = (1, len);
            if dist[id].map_or(true, |d| cost < d) {
                dist[id] = Some(cost);
                root_link[id] = Some(i);
            }
        }
        for (id, d) in dist.iter().enumerate() {
            if let Some(d) = d {
                heap.push(Reverse((*d, id)));
            }
        }
        while let Some(Reverse((cost, id))) = heap.pop() {
            if dist[id] != Some(cost) {
                continue;
            }
            for &(j, len) in self.bridge_row(id) {
                let cand = (cost.0 + 1, cost.1 + len);
                if dist[j].map_or(true, |d| cand < d) {
                    dist[j] = Some(cand);
                    parent[j] = Some(id);
                    root_link[j] = None;
                    heap.push(Reverse((cand, j)));
                }
            }
        }

        let mut best: Option<(Cost, usize, usize, usize, usize)> = None;
        let terminal_m = Matcher::Class(WordClass::Span(SpanKind::Terminal));
        for &s in &alpha_sources {
            let mut terminal: Vec<(usize, usize)> = Vec::new();
            if g.is_subject(s) {
                terminal.push((s, 0));
            }
            terminal.extend(reverse_distances(table, s, terminal_m));
            for (sp, len) in terminal {
                let id = map.island_of(sp).expect("span starts are subjects");
                let Some(d) = dist[id] else { continue };
                let total = (d.0, d.1 + len);
                if best.map_or(true, |b| total < b.0) {
                    best = Some((total, id, s, sp, len));
                }
            }
        }
        let Some((_, last, s, sp, len)) = best else {
            return Ok(Decision::no());
        };
        let terminal = if len == 0 {
            SpanLink::Itself
        } else {
            SpanLink::Span(span_walk(g, table, sp, s, SpanKind::Terminal))
        };

        let mut chain = vec![last];
        while let Some(prev) = parent[*chain.last().unwrap()] {
            chain.push(prev);
        }
        chain.reverse();
        let first = chain[0];
        let (pp, len) = initial[root_link[first].expect("chain starts at a root island")];
        let initial_link = if len == 0 {
            SpanLink::Itself
        } else {
            SpanLink::Span(span_walk(g, table, pp, p, SpanKind::Initial))
        };
        let bridges = chain
            .windows(2)
            .map(|w| {
                self.bridge_between(w[0], w[1])
                    .expect("island distances come from existing bridges")
            })
            .collect();
        Ok(Decision::yes(Witness::Composite(ShareProof {
            alpha_source: g.name(s).clone(),
            initial: initial_link,
            terminal,
            island_chain: chain,
            bridges,
        })))
    }
}

/// Decides whether `q.source` can come to hold `q.alpha` over `q.target`.
pub fn can_share(g: &ProtectionGraph, q: &Query) -> Result<Decision, Error> {
    Analysis::new(g).can_share(q)
}

/// The same decision for graphs made of subjects only, where it reduces to
/// tg-connectivity between the source and some holder of `alpha` over the
/// target.
pub fn can_share_subject_only(g: &ProtectionGraph, q: &Query) -> Result<Decision, Error> {
    if let Some(obj) = g.vertices().iter().find(|v| v.kind == VertexKind::Object) {
        return Err(Error::ContainsObject(obj.name.to_string()));
    }
    let p = g.require(q.source.as_str())?;
    let t = g.require(q.target.as_str())?;
    let alpha = q.alpha.as_str();
    if g.rights_at(p, t).is_some_and(|r| r.contains(alpha)) {
        return Ok(Decision::yes(Witness::Direct));
    }
    let mut best: Option<(usize, usize)> = None;
    for &e in g.in_edges(t) {
        if !g.edges()[e].rights.contains(alpha) {
            continue;
        }
        let s = g.ends(e).0;
        if let Some(path) = tg_path(g, q.source.as_str(), g.name(s).as_str())? {
            if best.map_or(true, |(len, _)| path.len() < len) {
                best = Some((path.len(), s));
            }
        }
    }
    let Some((_, s)) = best else {
        return Ok(Decision::no());
    };
    let island = island_map(g).island_of(p).expect("all vertices are subjects");
    Ok(Decision::yes(Witness::Composite(ShareProof {
        alpha_source: g.name(s).clone(),
        initial: SpanLink::Itself,
        terminal: SpanLink::Itself,
        island_chain: vec![island],
        bridges: Vec::new(),
    })))
}

/// Structural validation of a witness against the graph, independent of the
/// search that produced it. Returns the first violated condition.
pub fn validate_witness(g: &ProtectionGraph, q: &Query, w: &Witness) -> Result<(), String> {
    let alpha = q.alpha.as_str();
    let source = q.source.as_str();
    let target = q.target.as_str();
    for v in [source, target] {
        if !g.contains(v) {
            return Err(format!("unknown vertex {v}"));
        }
    }
    let proof = match w {
        Witness::Direct => {
            return if g.has_right(source, target, alpha) {
                Ok(())
            } else {
                Err(format!("edge {source} -> {target} lacks {alpha}"))
            };
        }
        Witness::Composite(proof) => proof,
    };
    let s = proof.alpha_source.as_str();
    if !g.has_right(s, target, alpha) {
        return Err(format!("alpha source {s} has no {alpha} edge to {target}"));
    }
    let subject = |v: &str| g.kind_of(v) == Some(VertexKind::Subject);

    match &proof.initial {
        SpanLink::Itself if !subject(source) => {
            return Err(format!("source {source} is not a subject"));
        }
        SpanLink::Itself => {}
        SpanLink::Span(walk) => {
            walk.check_span(g, SpanKind::Initial)?;
            if walk.end() != &q.source {
                return Err("initial span does not end at the source".into());
            }
        }
    }
    match &proof.terminal {
        SpanLink::Itself if !subject(s) => {
            return Err(format!("alpha source {s} is not a subject"));
        }
        SpanLink::Itself => {}
        SpanLink::Span(walk) => {
            walk.check_span(g, SpanKind::Terminal)?;
            if walk.end() != &proof.alpha_source {
                return Err("terminal span does not end at the alpha source".into());
            }
        }
    }

    let map = island_map(g);
    let island_of = |v: &VertexId| g.index_of(v.as_str()).and_then(|ix| map.island_of(ix));
    let chain = &proof.island_chain;
    if chain.is_empty() || chain.iter().any(|&id| id >= map.len()) {
        return Err("island chain is empty or names unknown islands".into());
    }
    let p_sub = proof.initial.subject(&q.source);
    let s_sub = proof.terminal.subject(&proof.alpha_source);
    if island_of(p_sub) != Some(chain[0]) {
        return Err(format!("{p_sub} is not in the first island"));
    }
    if island_of(s_sub) != chain.last().copied() {
        return Err(format!("{s_sub} is not in the last island"));
    }
    if proof.bridges.len() + 1 != chain.len() {
        return Err("need exactly one bridge per consecutive island pair".into());
    }
    for (i, bridge) in proof.bridges.iter().enumerate() {
        bridge.check_bridge(g)?;
        if island_of(bridge.start()) != Some(chain[i]) || island_of(bridge.end()) != Some(chain[i + 1]) {
            return Err(format!("bridge {i} does not join islands {} and {}", chain[i], chain[i + 1]));
        }
        if chain[i] == chain[i + 1] {
            return Err(format!("bridge {i} stays inside island {}", chain[i]));
        }
    }
    Ok(())
}

pub fn check_witness(g: &ProtectionGraph, q: &Query, w: &Witness) -> bool {
    validate_witness(g, q, w).is_ok()
}

/// Renders a decision as an indented proof tree.
pub fn render_decision(g: &ProtectionGraph, q: &Query, d: &Decision) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "can_share({}, {}, {}): {}",
        q.alpha, q.source, q.target, d.holds
    );
    let Some(w) = &d.witness else {
        out.push_str("  no witness\n");
        return out;
    };
    match w {
        Witness::Direct => {
            let _ = writeln!(out, "  direct edge: {} -> {} carries {}", q.source, q.target, q.alpha);
        }
        Witness::Composite(proof) => {
            let map = island_map(g);
            let members = |id: usize| -> String {
                let names: Vec<&str> = map.islands()[id].members.iter().map(|m| m.as_str()).collect();
                names.join(",")
            };
            let _ = writeln!(
                out,
                "  alpha source: {} -> {} carries {}",
                proof.alpha_source, q.target, q.alpha
            );
            match &proof.initial {
                SpanLink::Itself => {
                    let _ = writeln!(out, "  initial span: {} is a subject", q.source);
                }
                SpanLink::Span(walk) => {
                    let _ = writeln!(out, "  initial span: {walk}");
                }
            }
            match &proof.terminal {
                SpanLink::Itself => {
                    let _ = writeln!(out, "  terminal span: {} is a subject", proof.alpha_source);
                }
                SpanLink::Span(walk) => {
                    let _ = writeln!(out, "  terminal span: {walk}");
                }
            }
            let chain: Vec<String> = proof
                .island_chain
                .iter()
                .map(|&id| format!("I{id} {{{}}}", members(id)))
                .collect();
            let _ = writeln!(out, "  island chain: {}", chain.join(" => "));
            for (i, walk) in proof.bridges.iter().enumerate() {
                let patterns: Vec<String> =
                    bridge_patterns(&walk.word).iter().map(|p| p.to_string()).collect();
                let _ = writeln!(
                    out,
                    "    bridge I{} -> I{}: {walk} : {}",
                    proof.island_chain[i],
                    proof.island_chain[i + 1],
                    patterns.join("/")
                );
            }
        }
    }
    out
}
