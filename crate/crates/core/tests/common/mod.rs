//! Helpers shared by the integration suites: small worked graphs and
//! brute-force oracles that do not go through the crate's automata.
#![allow(dead_code)]

use regex::Regex;
use tgsafe::walks::{EdgeSymbol, Orientation, PathWord, TgRight};
use tgsafe::{BridgePattern, ProtectionGraph, RightSet};

/// Worked examples used across suites.
pub const EXAMPLES: &[&str] = &[
    "subject p\nsubject q\nedge p q r\n",
    "subject p\nsubject s\nobject q\nedge p s t\nedge s q r\n",
    "subject p\nobject s\nobject q\nedge p s t\nedge s q r\n",
    "subject u\nsubject v\nobject o\nobject q\nedge u o t\nedge v o t\nedge v q r\n",
    "subject u\nsubject v\nobject o\nobject w\nobject q\nedge u o t\nedge o w g\nedge v w t\nedge v q r\n",
    "subject u\nsubject v\nobject o\nobject w\nedge u o t\nedge o w g\nedge v w t\n",
    "subject u\nsubject v\nobject o\nedge u o t\nedge v o t\n",
    "subject p\nsubject s\nsubject q\nedge p s g\nedge s q r\n",
    "subject p\nsubject s\nsubject q\nedge s q r\n",
    "subject p\nsubject q\nedge p q t\n",
    "subject a\nsubject b\nsubject c\nedge a b g\n",
    "subject p2\nobject o\nobject p\nedge p2 o t\nedge o p g\n",
    "subject p2\nobject p\nedge p2 p g\n",
    "subject s2\nobject o\nobject s\nedge s2 o t\nedge o s t\n",
    "subject s2\nobject s\nedge s2 s t\n",
    "subject p\nobject a\nsubject b\nsubject q\nedge p a g\nedge b a t\nedge b q g\n",
];

/// Single-letter encoding of a symbol for the regex oracle.
pub fn letter(sym: EdgeSymbol) -> char {
    match (sym.right, sym.orientation) {
        (TgRight::Take, Orientation::Forward) => 'a',
        (TgRight::Take, Orientation::Reverse) => 'b',
        (TgRight::Grant, Orientation::Forward) => 'c',
        (TgRight::Grant, Orientation::Reverse) => 'd',
    }
}

pub fn encode(word: &[EdgeSymbol]) -> String {
    word.iter().map(|&s| letter(s)).collect()
}

/// Bridge patterns written as regular expressions over the letter encoding.
pub struct PatternOracle {
    bridges: Vec<(BridgePattern, Regex)>,
    initial: Regex,
    terminal: Regex,
}

impl PatternOracle {
    pub fn new() -> Self {
        PatternOracle {
            bridges: vec![
                (BridgePattern::B1, Regex::new("^a*$").unwrap()),
                (BridgePattern::B2, Regex::new("^b*$").unwrap()),
                (BridgePattern::B3, Regex::new("^a*cb*$").unwrap()),
                (BridgePattern::B4, Regex::new("^a*db*$").unwrap()),
            ],
            initial: Regex::new("^a*c$").unwrap(),
            terminal: Regex::new("^a*$").unwrap(),
        }
    }

    pub fn bridge_patterns(&self, word: &[EdgeSymbol]) -> Vec<BridgePattern> {
        let s = encode(word);
        self.bridges
            .iter()
            .filter(|(_, re)| re.is_match(&s))
            .map(|(p, _)| *p)
            .collect()
    }

    pub fn is_initial(&self, word: &[EdgeSymbol]) -> bool {
        self.initial.is_match(&encode(word))
    }

    pub fn is_terminal(&self, word: &[EdgeSymbol]) -> bool {
        self.terminal.is_match(&encode(word))
    }
}

impl Default for PatternOracle {
    fn default() -> Self {
        Self::new()
    }
}

/// Oriented steps leaving each vertex position, read straight off the edge
/// list: `(neighbour, symbol)`.
pub fn oriented_steps(g: &ProtectionGraph) -> Vec<Vec<(usize, EdgeSymbol)>> {
    let mut steps = vec![Vec::new(); g.vertex_count()];
    for (e, edge) in g.edges().iter().enumerate() {
        let (u, v) = g.ends(e);
        for (right, ok) in [
            (TgRight::Take, edge.rights.has_take()),
            (TgRight::Grant, edge.rights.has_grant()),
        ] {
            if ok {
                steps[u].push((v, EdgeSymbol::new(right, Orientation::Forward)));
                steps[v].push((u, EdgeSymbol::new(right, Orientation::Reverse)));
            }
        }
    }
    steps
}

/// Calls `visit(path, word)` for every walk of 1..=`max_len` steps starting
/// at `start` whose interior vertices are objects.
pub fn enumerate_walks(
    g: &ProtectionGraph,
    start: usize,
    max_len: usize,
    visit: &mut dyn FnMut(&[usize], &[EdgeSymbol]),
) {
    let steps = oriented_steps(g);
    let mut path = vec![start];
    let mut word = Vec::new();
    fn go(
        g: &ProtectionGraph,
        steps: &[Vec<(usize, EdgeSymbol)>],
        path: &mut Vec<usize>,
        word: &mut Vec<EdgeSymbol>,
        max_len: usize,
        visit: &mut dyn FnMut(&[usize], &[EdgeSymbol]),
    ) {
        let here = *path.last().unwrap();
        if word.len() == max_len || (path.len() > 1 && g.is_subject(here)) {
            return;
        }
        for &(next, sym) in &steps[here] {
            path.push(next);
            word.push(sym);
            visit(path, word);
            go(g, steps, path, word, max_len, visit);
            path.pop();
            word.pop();
        }
    }
    go(g, &steps, &mut path, &mut word, max_len, visit);
}

/// All 2-vertex graphs on `a`, `b`: every kind assignment and every subset
/// of {t, g, r} on each of the four ordered pairs (self-loops included).
pub fn two_vertex_graphs() -> Vec<ProtectionGraph> {
    let rights = ["t", "g", "r"];
    let mut out = Vec::new();
    for kinds in 0..4u8 {
        for code in 0..4096u32 {
            let mut b = ProtectionGraph::builder();
            for (i, name) in ["a", "b"].into_iter().enumerate() {
                if kinds >> i & 1 == 1 {
                    b.subject(name).unwrap();
                } else {
                    b.object(name).unwrap();
                }
            }
            for (k, (x, y)) in [("a", "a"), ("a", "b"), ("b", "a"), ("b", "b")].into_iter().enumerate() {
                let mask = code >> (3 * k) & 7;
                let chosen: Vec<&str> = (0..3).filter(|i| mask >> i & 1 == 1).map(|i| rights[i]).collect();
                if !chosen.is_empty() {
                    b.edge_str(x, y, &chosen.join(",")).unwrap();
                }
            }
            out.push(b.build().unwrap());
        }
    }
    out
}

pub fn word_of(symbols: &[EdgeSymbol]) -> PathWord {
    PathWord(symbols.to_vec())
}

pub fn rights(list: &str) -> RightSet {
    tgsafe::graph::parse_rights(list).unwrap()
}
