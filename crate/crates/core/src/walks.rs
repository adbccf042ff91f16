//! Bridges and spans: walks through objects whose oriented `t`/`g` word
//! matches one of a fixed set of regular patterns.
//!
//! Every pattern is a tiny deterministic automaton over the four oriented
//! symbols. Existence questions are answered by breadth-first search in the
//! product of an automaton with the oriented-symbol graph, where a step from
//! `x` to `y` reads `t>`/`g>` for an edge `x -> y` and `<t`/`<g` for an edge
//! `y -> x`. Interior vertices of a walk must be objects. A self-loop is a
//! step like any other and reads in both orientations: an object holding
//! `g` over itself lets whoever takes from it grant to it.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::Error;
use crate::graph::{ProtectionGraph, VertexId};
use crate::islands::{island_map, Island};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TgRight {
    Take,
    Grant,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Orientation {
    Forward,
    Reverse,
}

/// One oriented step of a walk: `t>`, `<t`, `g>` or `<g`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeSymbol {
    pub right: TgRight,
    pub orientation: Orientation,
}

impl EdgeSymbol {
    pub const TAKE_FWD: EdgeSymbol = EdgeSymbol::new(TgRight::Take, Orientation::Forward);
    pub const TAKE_REV: EdgeSymbol = EdgeSymbol::new(TgRight::Take, Orientation::Reverse);
    pub const GRANT_FWD: EdgeSymbol = EdgeSymbol::new(TgRight::Grant, Orientation::Forward);
    pub const GRANT_REV: EdgeSymbol = EdgeSymbol::new(TgRight::Grant, Orientation::Reverse);

    /// All four symbols in their fixed search order.
    pub const ALL: [EdgeSymbol; 4] = [
        Self::TAKE_FWD,
        Self::TAKE_REV,
        Self::GRANT_FWD,
        Self::GRANT_REV,
    ];

    pub const fn new(right: TgRight, orientation: Orientation) -> Self {
        EdgeSymbol { right, orientation }
    }

    /// The same step read in the opposite traversal direction.
    pub fn flipped(self) -> Self {
        let orientation = match self.orientation {
            Orientation::Forward => Orientation::Reverse,
            Orientation::Reverse => Orientation::Forward,
        };
        EdgeSymbol { orientation, ..self }
    }

    pub fn label(self) -> &'static str {
        match (self.right, self.orientation) {
            (TgRight::Take, Orientation::Forward) => "t>",
            (TgRight::Take, Orientation::Reverse) => "<t",
            (TgRight::Grant, Orientation::Forward) => "g>",
            (TgRight::Grant, Orientation::Reverse) => "<g",
        }
    }

    pub fn parse(label: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|s| s.label() == label)
    }

    fn bit(self) -> u8 {
        match (self.right, self.orientation) {
            (TgRight::Take, Orientation::Forward) => 1,
            (TgRight::Take, Orientation::Reverse) => 2,
            (TgRight::Grant, Orientation::Forward) => 4,
            (TgRight::Grant, Orientation::Reverse) => 8,
        }
    }

    fn right_label(self) -> &'static str {
        match self.right {
            TgRight::Take => "t",
            TgRight::Grant => "g",
        }
    }
}

impl fmt::Display for EdgeSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl Serialize for EdgeSymbol {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.label())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct PathWord(pub Vec<EdgeSymbol>);

impl PathWord {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The word read along the reversed walk.
    pub fn reversed(&self) -> PathWord {
        PathWord(self.0.iter().rev().map(|s| s.flipped()).collect())
    }
}

impl fmt::Display for PathWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels: Vec<&str> = self.0.iter().map(|s| s.label()).collect();
        f.write_str(&labels.join(" "))
    }
}

/// The four bridge forms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum BridgePattern {
    /// `t>*`
    B1,
    /// `<t*`
    B2,
    /// `t>* g> <t*`
    B3,
    /// `t>* <g <t*`
    B4,
}

impl BridgePattern {
    pub const ALL: [BridgePattern; 4] = [Self::B1, Self::B2, Self::B3, Self::B4];

    pub fn form(self) -> &'static str {
        match self {
            BridgePattern::B1 => "t>*",
            BridgePattern::B2 => "<t*",
            BridgePattern::B3 => "t>* g> <t*",
            BridgePattern::B4 => "t>* <g <t*",
        }
    }
}

impl fmt::Display for BridgePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum SpanKind {
    /// `t>* g>`
    Initial,
    /// `t>*`
    Terminal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum WordClass {
    Bridge(BridgePattern),
    Span(SpanKind),
}

impl fmt::Display for WordClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WordClass::Bridge(p) => write!(f, "{p}"),
            WordClass::Span(SpanKind::Initial) => f.write_str("initial"),
            WordClass::Span(SpanKind::Terminal) => f.write_str("terminal"),
        }
    }
}

/// Deterministic automata for the patterns. State 0 is the start state.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Matcher {
    Class(WordClass),
    /// Union of the four bridge forms, restricted to nonempty words.
    AnyBridge,
}

impl Matcher {
    pub(crate) fn states(self) -> usize {
        match self {
            Matcher::AnyBridge => 4,
            _ => 2,
        }
    }

    pub(crate) fn step(self, q: u8, sym: EdgeSymbol) -> Option<u8> {
        use BridgePattern::*;
        let tf = sym == EdgeSymbol::TAKE_FWD;
        let tr = sym == EdgeSymbol::TAKE_REV;
        let gf = sym == EdgeSymbol::GRANT_FWD;
        let gr = sym == EdgeSymbol::GRANT_REV;
        match self {
            Matcher::Class(WordClass::Bridge(B1)) | Matcher::Class(WordClass::Span(SpanKind::Terminal)) => {
                (q == 0 && tf).then_some(0)
            }
            Matcher::Class(WordClass::Bridge(B2)) => (q == 0 && tr).then_some(0),
            Matcher::Class(WordClass::Bridge(B3)) => match q {
                0 if tf => Some(0),
                0 if gf => Some(1),
                1 if tr => Some(1),
                _ => None,
            },
            Matcher::Class(WordClass::Bridge(B4)) => match q {
                0 if tf => Some(0),
                0 if gr => Some(1),
                1 if tr => Some(1),
                _ => None,
            },
            Matcher::Class(WordClass::Span(SpanKind::Initial)) => match q {
                0 if tf => Some(0),
                0 if gf => Some(1),
                _ => None,
            },
            // 0 start, 1 inside t>+, 2 inside <t+, 3 after the g step.
            Matcher::AnyBridge => match q {
                0 if tf => Some(1),
                0 if tr => Some(2),
                0 | 1 if gf || gr => Some(3),
                1 if tf => Some(1),
                2 if tr => Some(2),
                3 if tr => Some(3),
                _ => None,
            },
        }
    }

    pub(crate) fn accepts(self, q: u8) -> bool {
        use BridgePattern::*;
        match self {
            Matcher::Class(WordClass::Bridge(B1 | B2)) | Matcher::Class(WordClass::Span(SpanKind::Terminal)) => {
                q == 0
            }
            Matcher::Class(_) => q == 1,
            Matcher::AnyBridge => q != 0,
        }
    }

    fn matches(self, word: &PathWord) -> bool {
        let mut q = 0;
        for &sym in &word.0 {
            match self.step(q, sym) {
                Some(next) => q = next,
                None => return false,
            }
        }
        self.accepts(q)
    }
}

/// Every pattern and span form the word belongs to.
pub fn classify_word(word: &PathWord) -> BTreeSet<WordClass> {
    let all = BridgePattern::ALL
        .into_iter()
        .map(WordClass::Bridge)
        .chain([WordClass::Span(SpanKind::Initial), WordClass::Span(SpanKind::Terminal)]);
    all.filter(|&c| Matcher::Class(c).matches(word)).collect()
}

/// Bridge patterns matched by a word, ignoring span forms.
pub fn bridge_patterns(word: &PathWord) -> Vec<BridgePattern> {
    classify_word(word)
        .into_iter()
        .filter_map(|c| match c {
            WordClass::Bridge(p) => Some(p),
            WordClass::Span(_) => None,
        })
        .collect()
}

/// A walk through the protection graph together with its oriented word.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Walk {
    pub vertices: Vec<VertexId>,
    pub word: PathWord,
}

impl Walk {
    pub fn start(&self) -> &VertexId {
        &self.vertices[0]
    }

    pub fn end(&self) -> &VertexId {
        self.vertices.last().expect("walks are nonempty")
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    pub fn reversed(&self) -> Walk {
        Walk {
            vertices: self.vertices.iter().rev().cloned().collect(),
            word: self.word.reversed(),
        }
    }

    /// Checks that each step is realized by a base edge in the direction and
    /// with the right its symbol names, and that interior vertices are
    /// objects.
    pub fn check_steps(&self, g: &ProtectionGraph) -> Result<(), String> {
        if self.vertices.is_empty() || self.vertices.len() != self.word.len() + 1 {
            return Err("vertex count does not match word length".into());
        }
        for (i, sym) in self.word.0.iter().enumerate() {
            let (a, b) = (&self.vertices[i], &self.vertices[i + 1]);
            let (from, to) = match sym.orientation {
                Orientation::Forward => (a, b),
                Orientation::Reverse => (b, a),
            };
            if !g.has_right(from.as_str(), to.as_str(), sym.right_label()) {
                return Err(format!(
                    "step {i} needs edge {from} -> {to} with right {}",
                    sym.right_label()
                ));
            }
        }
        for v in &self.vertices {
            if !g.contains(v.as_str()) {
                return Err(format!("unknown vertex {v}"));
            }
        }
        let interior = self.vertices.len().saturating_sub(1);
        for v in self.vertices.iter().take(interior).skip(1) {
            if g.kind_of(v.as_str()) != Some(crate::graph::VertexKind::Object) {
                return Err(format!("interior vertex {v} is not an object"));
            }
        }
        Ok(())
    }

    /// Bridge invariants: valid steps, subject endpoints, nonempty word
    /// matching some bridge pattern.
    pub fn check_bridge(&self, g: &ProtectionGraph) -> Result<(), String> {
        self.check_steps(g)?;
        if self.is_empty() {
            return Err("bridges must have at least one step".into());
        }
        for v in [self.start(), self.end()] {
            if g.kind_of(v.as_str()) != Some(crate::graph::VertexKind::Subject) {
                return Err(format!("bridge endpoint {v} is not a subject"));
            }
        }
        if bridge_patterns(&self.word).is_empty() {
            return Err(format!("word `{}` matches no bridge pattern", self.word));
        }
        Ok(())
    }

    /// Span invariants: valid steps, subject start, nonempty word of the
    /// given kind.
    pub fn check_span(&self, g: &ProtectionGraph, kind: SpanKind) -> Result<(), String> {
        self.check_steps(g)?;
        if self.is_empty() {
            return Err("span walks must have at least one step".into());
        }
        if g.kind_of(self.start().as_str()) != Some(crate::graph::VertexKind::Subject) {
            return Err(format!("span start {} is not a subject", self.start()));
        }
        if !classify_word(&self.word).contains(&WordClass::Span(kind)) {
            return Err(format!("word `{}` is not a {kind:?} span", self.word));
        }
        Ok(())
    }
}

impl fmt::Display for Walk {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.vertices[0])?;
        for (sym, v) in self.word.0.iter().zip(&self.vertices[1..]) {
            write!(f, " -({sym})- {v}")?;
        }
        Ok(())
    }
}

/// Oriented-symbol adjacency: for each vertex, `(neighbour, symbol mask)`
/// sorted by neighbour. A self-loop contributes both orientations.
#[derive(Clone, Debug)]
pub(crate) struct StepTable {
    steps: Vec<Vec<(usize, u8)>>,
    object: Vec<bool>,
}

impl StepTable {
    pub(crate) fn new(g: &ProtectionGraph) -> Self {
        let n = g.vertex_count();
        let mut merged: Vec<BTreeMap<usize, u8>> = vec![BTreeMap::new(); n];
        for (e, edge) in g.edges().iter().enumerate() {
            let (u, v) = g.ends(e);
            let mut fwd = 0u8;
            if edge.rights.has_take() {
                fwd |= EdgeSymbol::TAKE_FWD.bit();
            }
            if edge.rights.has_grant() {
                fwd |= EdgeSymbol::GRANT_FWD.bit();
            }
            if fwd == 0 {
                continue;
            }
            // Forward bits shifted left by one are the matching reverse bits.
            *merged[u].entry(v).or_default() |= fwd;
            *merged[v].entry(u).or_default() |= fwd << 1;
        }
        StepTable {
            steps: merged
                .into_iter()
                .map(|m| m.into_iter().collect())
                .collect(),
            object: (0..n).map(|v| !g.is_subject(v)).collect(),
        }
    }

    fn len(&self) -> usize {
        self.steps.len()
    }

    fn symbols(mask: u8) -> impl Iterator<Item = EdgeSymbol> {
        EdgeSymbol::ALL.into_iter().filter(move |s| mask & s.bit() != 0)
    }
}

/// Shortest accepting distance from any of `starts` to each vertex, for
/// walks whose interior vertices are objects. Start vertices are treated as
/// subjects (never re-entered as interior).
pub(crate) fn plain_reach(table: &StepTable, starts: &[usize], m: Matcher) -> Vec<Option<usize>> {
    let n = table.len();
    let qn = m.states();
    let mut seen = vec![false; n * qn];
    let mut best = vec![None; n];
    let mut queue = VecDeque::new();
    for &s in starts {
        seen[s * qn] = true;
        queue.push_back((s, 0u8, 0usize, true));
    }
    while let Some((v, q, d, is_start)) = queue.pop_front() {
        if !is_start && !table.object[v] {
            continue;
        }
        for &(w, mask) in &table.steps[v] {
            for sym in StepTable::symbols(mask) {
                let Some(q2) = m.step(q, sym) else { continue };
                let id = w * qn + q2 as usize;
                if seen[id] {
                    continue;
                }
                seen[id] = true;
                if m.accepts(q2) && best[w].is_none() {
                    best[w] = Some(d + 1);
                }
                queue.push_back((w, q2, d + 1, false));
            }
        }
    }
    best
}

/// Subjects from which an accepting walk ends at `end`, each with the length
/// of its shortest such walk, found by breadth-first search of the reversed
/// product from `end`. Sorted by subject position.
pub(crate) fn reverse_distances(table: &StepTable, end: usize, m: Matcher) -> Vec<(usize, usize)> {
    let n = table.len();
    let qn = m.states();
    let mut seen = vec![false; n * qn];
    let mut found: BTreeMap<usize, usize> = BTreeMap::new();
    let mut queue = VecDeque::new();
    for q in 0..qn as u8 {
        if m.accepts(q) {
            seen[end * qn + q as usize] = true;
            queue.push_back((end, q, 0usize));
        }
    }
    while let Some((v, q, d)) = queue.pop_front() {
        for &(u, mask) in &table.steps[v] {
            for sym in StepTable::symbols(mask) {
                // `sym` is read going v -> u; the forward step u -> v reads its flip.
                let fwd = sym.flipped();
                for q0 in 0..qn as u8 {
                    if m.step(q0, fwd) != Some(q) {
                        continue;
                    }
                    if !table.object[u] {
                        if q0 == 0 && u != end {
                            found.entry(u).or_insert(d + 1);
                        }
                        continue;
                    }
                    let id = u * qn + q0 as usize;
                    if !seen[id] {
                        seen[id] = true;
                        queue.push_back((u, q0, d + 1));
                    }
                }
            }
        }
    }
    found.into_iter().collect()
}

/// Shortest walks from `start`, lexicographically smallest by vertex
/// sequence, to every vertex accepted by `is_end`. Returns `(end, path,
/// word)` triples in vertex order.
pub(crate) fn lex_walks(
    table: &StepTable,
    start: usize,
    m: Matcher,
    is_end: impl Fn(usize) -> bool,
) -> Vec<(usize, Vec<usize>, Vec<EdgeSymbol>)> {
    let n = table.len();
    let qn = m.states();
    let mut seen = vec![false; n * qn];
    let mut parent: Vec<Option<(usize, EdgeSymbol)>> = vec![None; n * qn];
    let mut best: BTreeMap<usize, usize> = BTreeMap::new();
    let start_id = start * qn;
    seen[start_id] = true;
    // Each layer entry carries a rank: equal ranks mean equal vertex sequences,
    // and ranks increase with the lexicographic order of those sequences.
    let mut layer: Vec<(usize, usize)> = vec![(start_id, 0)];
    let mut first = true;
    while !layer.is_empty() {
        let mut cands: Vec<(usize, usize, u8, usize, EdgeSymbol)> = Vec::new();
        for &(id, rank) in &layer {
            let (v, q) = (id / qn, (id % qn) as u8);
            if !first && !table.object[v] {
                continue;
            }
            for &(w, mask) in &table.steps[v] {
                for sym in StepTable::symbols(mask) {
                    if let Some(q2) = m.step(q, sym) {
                        if !seen[w * qn + q2 as usize] {
                            cands.push((rank, w, q2, id, sym));
                        }
                    }
                }
            }
        }
        first = false;
        cands.sort_by_key(|&(rank, w, q2, _, _)| (rank, w, q2));
        let mut next = Vec::new();
        let mut last_key = None;
        let mut next_rank = 0;
        for (rank, w, q2, pid, sym) in cands {
            let id = w * qn + q2 as usize;
            if seen[id] {
                continue;
            }
            seen[id] = true;
            parent[id] = Some((pid, sym));
            if last_key.is_some_and(|k| k != (rank, w)) {
                next_rank += 1;
            }
            last_key = Some((rank, w));
            if m.accepts(q2) && w != start && is_end(w) {
                best.entry(w).or_insert(id);
            }
            next.push((id, next_rank));
        }
        layer = next;
    }
    best.into_iter()
        .map(|(end, mut id)| {
            let mut path = vec![end];
            let mut word = Vec::new();
            while let Some((pid, sym)) = parent[id] {
                word.push(sym);
                path.push(pid / qn);
                id = pid;
            }
            path.reverse();
            word.reverse();
            (end, path, word)
        })
        .collect()
}

pub(crate) fn to_walk(g: &ProtectionGraph, path: &[usize], word: Vec<EdgeSymbol>) -> Walk {
    Walk {
        vertices: path.iter().map(|&v| g.name(v).clone()).collect(),
        word: PathWord(word),
    }
}

/// A bridge walk tagged with the pattern it was found for.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct BridgeWalk {
    pub pattern: BridgePattern,
    pub walk: Walk,
}

fn check_island(g: &ProtectionGraph, island: &Island) -> Result<(), Error> {
    let map = island_map(g);
    match map.islands().get(island.id) {
        Some(actual) if actual == island => Ok(()),
        _ => Err(Error::ForeignIsland),
    }
}

/// Bridges from island `a` to island `b`: one shortest walk for every
/// (start, end, pattern) combination that has one. Same-island queries
/// return nothing.
pub fn find_bridges(g: &ProtectionGraph, a: &Island, b: &Island) -> Result<Vec<BridgeWalk>, Error> {
    check_island(g, a)?;
    check_island(g, b)?;
    if a.id == b.id {
        return Ok(Vec::new());
    }
    let table = StepTable::new(g);
    let targets: BTreeSet<usize> = b
        .members
        .iter()
        .map(|m| g.require(m.as_str()))
        .collect::<Result<_, _>>()?;
    let mut out = Vec::new();
    for u in &a.members {
        let u = g.require(u.as_str())?;
        for pattern in BridgePattern::ALL {
            let m = Matcher::Class(WordClass::Bridge(pattern));
            for (_, path, word) in lex_walks(&table, u, m, |v| targets.contains(&v)) {
                out.push(BridgeWalk {
                    pattern,
                    walk: to_walk(g, &path, word),
                });
            }
        }
    }
    out.sort_by(|x, y| {
        (x.walk.start(), x.walk.end(), x.pattern).cmp(&(y.walk.start(), y.walk.end(), y.pattern))
    });
    Ok(out)
}

pub(crate) fn spans_into(
    g: &ProtectionGraph,
    table: &StepTable,
    end: usize,
    kind: SpanKind,
) -> Vec<(usize, Walk)> {
    let m = Matcher::Class(WordClass::Span(kind));
    let mut out = Vec::new();
    for (start, _) in reverse_distances(table, end, m) {
        out.push((start, span_walk(g, table, start, end, kind)));
    }
    out
}

/// The lexicographically smallest shortest span from `start` to `end`.
/// `start` must be one of the starts [`reverse_distances`] reports.
pub(crate) fn span_walk(g: &ProtectionGraph, table: &StepTable, start: usize, end: usize, kind: SpanKind) -> Walk {
    let m = Matcher::Class(WordClass::Span(kind));
    let (_, path, word) = lex_walks(table, start, m, |v| v == end)
        .into_iter()
        .next()
        .expect("reported span starts reach the end");
    to_walk(g, &path, word)
}

/// Subjects `p'` (other than `p`) with a `t>* g>` walk through objects to
/// `p`, each with one shortest such walk.
pub fn find_initial_spans(g: &ProtectionGraph, p: &str) -> Result<Vec<(VertexId, Walk)>, Error> {
    let end = g.require(p)?;
    let table = StepTable::new(g);
    Ok(spans_into(g, &table, end, SpanKind::Initial)
        .into_iter()
        .map(|(s, w)| (g.name(s).clone(), w))
        .collect())
}

/// Subjects `s'` (other than `s`) with a `t>*` walk through objects to `s`.
pub fn find_terminal_spans(g: &ProtectionGraph, s: &str) -> Result<Vec<(VertexId, Walk)>, Error> {
    let end = g.require(s)?;
    let table = StepTable::new(g);
    Ok(spans_into(g, &table, end, SpanKind::Terminal)
        .into_iter()
        .map(|(s, w)| (g.name(s).clone(), w))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::parse_text;
    use crate::islands::compute_islands;

    const TF: EdgeSymbol = EdgeSymbol::TAKE_FWD;
    const TR: EdgeSymbol = EdgeSymbol::TAKE_REV;
    const GF: EdgeSymbol = EdgeSymbol::GRANT_FWD;
    const GR: EdgeSymbol = EdgeSymbol::GRANT_REV;

    fn word(syms: &[EdgeSymbol]) -> PathWord {
        PathWord(syms.to_vec())
    }

    fn names(w: &Walk) -> Vec<&str> {
        w.vertices.iter().map(|v| v.as_str()).collect()
    }

    #[test]
    fn classify_examples() {
        use BridgePattern::*;
        assert_eq!(
            classify_word(&word(&[])),
            [
                WordClass::Bridge(B1),
                WordClass::Bridge(B2),
                WordClass::Span(SpanKind::Terminal)
            ]
            .into_iter()
            .collect()
        );
        assert_eq!(
            classify_word(&word(&[TF, GF, TR])),
            [WordClass::Bridge(B3)].into_iter().collect()
        );
        assert!(classify_word(&word(&[TF, TR])).is_empty());
        assert_eq!(
            classify_word(&word(&[TF, GF])),
            [WordClass::Bridge(B3), WordClass::Span(SpanKind::Initial)]
                .into_iter()
                .collect()
        );
        assert_eq!(
            classify_word(&word(&[GR, TR, TR])),
            [WordClass::Bridge(B4)].into_iter().collect()
        );
    }

    #[test]
    fn reversal_swaps_patterns() {
        assert_eq!(word(&[TF, GF, TR]).reversed(), word(&[TF, GR, TR]));
        assert_eq!(word(&[TF, TF]).reversed(), word(&[TR, TR]));
    }

    #[test]
    fn any_bridge_matcher_is_the_nonempty_union() {
        let mut words = vec![Vec::new()];
        for _ in 0..4 {
            let mut longer = Vec::new();
            for w in &words {
                for s in EdgeSymbol::ALL {
                    let mut x: Vec<EdgeSymbol> = w.clone();
                    x.push(s);
                    longer.push(x);
                }
            }
            words.extend(longer);
            words.sort();
            words.dedup();
        }
        for w in words {
            let w = PathWord(w);
            let expected = !w.is_empty() && !bridge_patterns(&w).is_empty();
            assert_eq!(Matcher::AnyBridge.matches(&w), expected, "{w}");
        }
    }

    const B3_DOC: &str = "subject u\nsubject v\nobject o\nobject w\nedge u o t\nedge o w g\nedge v w t\n";

    #[test]
    fn finds_grant_bridge() {
        let g = parse_text(B3_DOC).unwrap();
        let islands = compute_islands(&g);
        let found = find_bridges(&g, &islands[0], &islands[1]).unwrap();
        assert_eq!(found.len(), 1);
        assert_eq!(found[0].pattern, BridgePattern::B3);
        assert_eq!(names(&found[0].walk), vec!["u", "o", "w", "v"]);
        assert_eq!(found[0].walk.word, word(&[TF, GF, TR]));
        assert!(found[0].walk.check_bridge(&g).is_ok());

        let back = find_bridges(&g, &islands[1], &islands[0]).unwrap();
        assert_eq!(back.len(), 1);
        assert_eq!(back[0].pattern, BridgePattern::B4);
        assert_eq!(back[0].walk, found[0].walk.reversed());
    }

    #[test]
    fn two_takes_into_one_object_is_no_bridge() {
        let g = parse_text("subject u\nsubject v\nobject o\nedge u o t\nedge v o t\n").unwrap();
        let islands = compute_islands(&g);
        assert!(find_bridges(&g, &islands[0], &islands[1]).unwrap().is_empty());
    }

    #[test]
    fn foreign_island_is_rejected() {
        let g = parse_text(B3_DOC).unwrap();
        let other = parse_text("subject x\n").unwrap();
        let foreign = compute_islands(&other).remove(0);
        let islands = compute_islands(&g);
        assert!(matches!(
            find_bridges(&g, &foreign, &islands[0]),
            Err(Error::ForeignIsland)
        ));
    }

    #[test]
    fn initial_span_examples() {
        let g = parse_text("subject pp\nobject o\nobject p\nedge pp o t\nedge o p g\n").unwrap();
        let spans = find_initial_spans(&g, "p").unwrap();
        assert_eq!(spans.len(), 1);
        assert_eq!(spans[0].0.as_str(), "pp");
        assert_eq!(names(&spans[0].1), vec!["pp", "o", "p"]);
        assert_eq!(spans[0].1.word, word(&[TF, GF]));

        let g = parse_text("subject pp\nsubject p\nedge pp p g\n").unwrap();
        let spans = find_initial_spans(&g, "p").unwrap();
        assert_eq!(spans.len(), 1);
        assert_eq!(spans[0].1.word, word(&[GF]));

        let g = parse_text("subject a\nobject b\nsubject c\nedge a b t\nedge b c t\n").unwrap();
        assert!(find_initial_spans(&g, "c").unwrap().is_empty());
    }

    #[test]
    fn terminal_span_examples() {
        let g = parse_text("subject sp\nobject o\nobject s\nedge sp o t\nedge o s t\n").unwrap();
        let spans = find_terminal_spans(&g, "s").unwrap();
        assert_eq!(spans.len(), 1);
        assert_eq!(spans[0].1.word, word(&[TF, TF]));

        let g = parse_text("subject sp\nobject s\nedge sp s t\n").unwrap();
        assert_eq!(find_terminal_spans(&g, "s").unwrap()[0].1.word, word(&[TF]));

        let g = parse_text("subject a\nsubject b\nobject s\nedge a s g\nedge b s g\n").unwrap();
        assert!(find_terminal_spans(&g, "s").unwrap().is_empty());
        assert!(matches!(
            find_terminal_spans(&g, "zz"),
            Err(Error::UnknownVertex(_))
        ));
    }

    #[test]
    fn spans_pass_through_but_not_into_subjects() {
        // s2 is a subject in the middle, so only s2 spans to x, not s1.
        let g = parse_text("subject s1\nsubject s2\nobject x\nedge s1 s2 t\nedge s2 x t\n").unwrap();
        let spans = find_terminal_spans(&g, "x").unwrap();
        let starts: Vec<&str> = spans.iter().map(|(s, _)| s.as_str()).collect();
        assert_eq!(starts, vec!["s2"]);
    }

    #[test]
    fn walk_display_and_checks() {
        let g = parse_text(B3_DOC).unwrap();
        let w = Walk {
            vertices: ["u", "o", "w", "v"]
                .iter()
                .map(|s| VertexId::new(*s).unwrap())
                .collect(),
            word: word(&[TF, GF, TR]),
        };
        assert_eq!(w.to_string(), "u -(t>)- o -(g>)- w -(<t)- v");
        let mut bad = w.clone();
        bad.word = word(&[TF, GR, TR]);
        assert!(bad.check_steps(&g).is_err());
    }

    #[test]
    fn lex_order_among_shortest() {
        let g = parse_text(
            "subject s\nsubject e\nobject b\nobject a\nedge s b t\nedge b e t\nedge s a t\nedge a e t\n",
        )
        .unwrap();
        let spans = find_terminal_spans(&g, "e").unwrap();
        assert_eq!(names(&spans[0].1), vec!["s", "a", "e"]);
    }
}
