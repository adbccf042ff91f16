//! Ground truth by brute force: apply the de jure take, grant and create
//! rules and search the reachable protection graphs.
//!
//! Two exploration strategies are offered.
//!
//! [`Strategy::Exhaustive`] is a plain breadth-first search over graphs, one
//! rule application per step, deduplicated by canonical serialization. It is
//! the literal definition and is only practical on very small inputs.
//!
//! [`Strategy::Saturating`] searches over create sequences instead, closing
//! every state under take and grant. It relies on facts about the rules that
//! hold because every precondition is positive:
//!
//! * Rights only grow and preconditions stay true, so take/grant
//!   applications commute with each other and with creates. Any reachable
//!   graph is contained in the take/grant closure of the initial graph plus
//!   the same creates performed up front.
//! * A created subject can do everything a created object can, so creating
//!   objects never reaches more.
//! * A vertex created by a created vertex `n` can instead be created by
//!   `n`'s creator, which then grants its rights over it to `n`.
//! * Creates by different actors commute up to renaming, so only create
//!   sequences ordered by actor need to be tried.
//! * Facts about rights other than `t`, `g` and the queried right never
//!   enable facts about those three, so they are left out of the closure.
//!
//! Both strategies report whether the create budget ever cut off a branch
//! and whether the step limit was hit; a negative answer is definitive for
//! the budget only when the step limit was not reached.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::decision::{validate_witness, Query, SpanLink, Witness};
use crate::error::Error;
use crate::graph::{ProtectionGraph, Right, RightSet, VertexId, VertexKind};
use crate::islands::path_within_island;
use crate::views::build_island_view;
use crate::walks::{bridge_patterns, BridgePattern, Walk};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum RuleInstance {
    /// `actor` takes `right` over `object` from `via`.
    Take {
        actor: VertexId,
        via: VertexId,
        object: VertexId,
        right: Right,
    },
    /// `actor` grants `right` over `object` to `to`.
    Grant {
        actor: VertexId,
        to: VertexId,
        object: VertexId,
        right: Right,
    },
    /// `actor` creates `name` and receives `rights` over it.
    Create {
        actor: VertexId,
        kind: VertexKind,
        name: VertexId,
        rights: RightSet,
    },
}

impl fmt::Display for RuleInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RuleInstance::Take {
                actor,
                via,
                object,
                right,
            } => write!(f, "{actor} takes ({right} to {object}) from {via}"),
            RuleInstance::Grant {
                actor,
                to,
                object,
                right,
            } => write!(f, "{actor} grants ({right} to {object}) to {to}"),
            RuleInstance::Create {
                actor,
                kind,
                name,
                rights,
            } => write!(
                f,
                "{actor} creates ({}) {} {name}",
                rights.joined(),
                kind.keyword()
            ),
        }
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("inapplicable rule `{rule}`: {}", .unmet.join("; "))]
pub struct RuleError {
    pub rule: String,
    pub unmet: Vec<String>,
}

/// Applies one rule, returning the new graph. The input is left untouched.
pub fn apply_rule(g: &ProtectionGraph, r: &RuleInstance) -> Result<ProtectionGraph, RuleError> {
    let mut unmet = Vec::new();
    let mut need_vertex = |v: &VertexId| {
        if !g.contains(v.as_str()) {
            unmet.push(format!("unknown vertex {v}"));
        }
    };
    match r {
        RuleInstance::Take {
            actor, via, object, ..
        } => [actor, via, object].into_iter().for_each(&mut need_vertex),
        RuleInstance::Grant {
            actor, to, object, ..
        } => [actor, to, object].into_iter().for_each(&mut need_vertex),
        RuleInstance::Create { actor, .. } => need_vertex(actor),
    }
    let actor = match r {
        RuleInstance::Take { actor, .. }
        | RuleInstance::Grant { actor, .. }
        | RuleInstance::Create { actor, .. } => actor,
    };
    if g.contains(actor.as_str()) && g.kind_of(actor.as_str()) != Some(VertexKind::Subject) {
        unmet.push("actor must be a subject".to_owned());
    }
    let has = |a: &VertexId, b: &VertexId, right: &str| g.has_right(a.as_str(), b.as_str(), right);
    let mut builder = g.to_builder();
    match r {
        RuleInstance::Take {
            actor,
            via,
            object,
            right,
        } => {
            if !has(actor, via, Right::TAKE) {
                unmet.push(format!("{actor} -> {via} lacks t"));
            }
            if !has(via, object, right.as_str()) {
                unmet.push(format!("{via} -> {object} lacks {right}"));
            }
            if unmet.is_empty() {
                let rights = std::iter::once(right.clone()).collect();
                builder
                    .edge(actor.clone(), object.clone(), rights)
                    .expect("nonempty rights");
            }
        }
        RuleInstance::Grant {
            actor,
            to,
            object,
            right,
        } => {
            if !has(actor, to, Right::GRANT) {
                unmet.push(format!("{actor} -> {to} lacks g"));
            }
            if !has(actor, object, right.as_str()) {
                unmet.push(format!("{actor} -> {object} lacks {right}"));
            }
            if unmet.is_empty() {
                let rights = std::iter::once(right.clone()).collect();
                builder
                    .edge(to.clone(), object.clone(), rights)
                    .expect("nonempty rights");
            }
        }
        RuleInstance::Create {
            actor,
            kind,
            name,
            rights,
        } => {
            if g.contains(name.as_str()) {
                unmet.push(format!("vertex {name} already exists"));
            }
            if rights.is_empty() {
                unmet.push("created edge needs at least one right".to_owned());
            }
            if unmet.is_empty() {
                builder.vertex(name.clone(), *kind).expect("fresh vertex");
                builder
                    .edge(actor.clone(), name.clone(), rights.clone())
                    .expect("nonempty rights");
            }
        }
    }
    if !unmet.is_empty() {
        return Err(RuleError {
            rule: r.to_string(),
            unmet,
        });
    }
    Ok(builder.build().expect("rule results stay valid"))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// Breadth-first over single rule applications.
    Exhaustive,
    /// Breadth-first over create sequences, each state closed under take
    /// and grant.
    #[default]
    Saturating,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SearchBounds {
    pub create_budget: usize,
    /// Maximum number of states expanded.
    pub step_limit: usize,
    pub strategy: Strategy,
    /// Rights given to the creator over a created vertex. `t` and `g` (and
    /// the queried right, for [`oracle_can_share`]) are always added.
    pub closure: RightSet,
}

impl Default for SearchBounds {
    fn default() -> Self {
        SearchBounds {
            create_budget: 4,
            step_limit: 1_000_000,
            strategy: Strategy::default(),
            closure: [Right::take(), Right::grant()].into_iter().collect(),
        }
    }
}

impl SearchBounds {
    pub fn with_budget(create_budget: usize) -> Self {
        SearchBounds {
            create_budget,
            ..Self::default()
        }
    }

    pub fn strategy(mut self, strategy: Strategy) -> Self {
        self.strategy = strategy;
        self
    }

    fn closure_with(&self, alpha: &Right) -> RightSet {
        let mut c = self.closure.clone();
        c.insert(Right::take());
        c.insert(Right::grant());
        c.insert(alpha.clone());
        c
    }
}

fn created_count(g: &ProtectionGraph) -> usize {
    g.vertices().iter().filter(|v| v.name.is_created()).count()
}

/// Every take and grant application that would add something, followed by
/// the create applications (subject kind first) when budget remains. Actors
/// are visited in vertex order.
pub fn enumerate_rules(g: &ProtectionGraph, b: &SearchBounds) -> Vec<RuleInstance> {
    let mut out = Vec::new();
    let subjects: Vec<usize> = (0..g.vertex_count()).filter(|&v| g.is_subject(v)).collect();
    for &a in &subjects {
        let actor = g.name(a);
        for &e in g.out_edges(a) {
            let (_, via) = g.ends(e);
            if !g.edges()[e].rights.has_take() {
                continue;
            }
            for &e2 in g.out_edges(via) {
                let (_, obj) = g.ends(e2);
                for right in &g.edges()[e2].rights {
                    if g.rights_at(a, obj).is_some_and(|r| r.contains(right.as_str())) {
                        continue;
                    }
                    out.push(RuleInstance::Take {
                        actor: actor.clone(),
                        via: g.name(via).clone(),
                        object: g.name(obj).clone(),
                        right: right.clone(),
                    });
                }
            }
        }
        for &e in g.out_edges(a) {
            let (_, to) = g.ends(e);
            if !g.edges()[e].rights.has_grant() {
                continue;
            }
            for &e2 in g.out_edges(a) {
                let (_, obj) = g.ends(e2);
                for right in &g.edges()[e2].rights {
                    if g.rights_at(to, obj).is_some_and(|r| r.contains(right.as_str())) {
                        continue;
                    }
                    out.push(RuleInstance::Grant {
                        actor: actor.clone(),
                        to: g.name(to).clone(),
                        object: g.name(obj).clone(),
                        right: right.clone(),
                    });
                }
            }
        }
    }
    let created = created_count(g);
    if created < b.create_budget {
        let name = VertexId::created(created + 1);
        for &a in &subjects {
            for kind in [VertexKind::Subject, VertexKind::Object] {
                out.push(RuleInstance::Create {
                    actor: g.name(a).clone(),
                    kind,
                    name: name.clone(),
                    rights: b.closure.clone(),
                });
            }
        }
    }
    out
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SearchStats {
    pub states_explored: usize,
    pub frontier_peak: usize,
    /// Some expanded state could not create because the budget was spent.
    pub budget_pruned: bool,
    /// The search stopped at the step limit with work left.
    pub step_limited: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleOutcome {
    Found(Vec<RuleInstance>),
    NotFoundWithinBounds,
}

impl Serialize for OracleOutcome {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            OracleOutcome::Found(rules) => {
                let lines: Vec<String> = rules.iter().map(|r| r.to_string()).collect();
                serde::Serialize::serialize(&serde_json::json!({ "found": lines }), s)
            }
            OracleOutcome::NotFoundWithinBounds => s.serialize_str("not_found_within_bounds"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OracleAnswer {
    pub outcome: OracleOutcome,
    pub stats: SearchStats,
}

impl OracleAnswer {
    pub fn found(&self) -> bool {
        matches!(self.outcome, OracleOutcome::Found(_))
    }

    /// True when the whole bounded state space was explored.
    pub fn exhausted(&self) -> bool {
        !self.stats.step_limited
    }

    pub fn rules(&self) -> Option<&[RuleInstance]> {
        match &self.outcome {
            OracleOutcome::Found(r) => Some(r),
            OracleOutcome::NotFoundWithinBounds => None,
        }
    }
}

/// Searches for a rule sequence that gives `q.source` the right `q.alpha`
/// over `q.target`.
pub fn oracle_can_share(g: &ProtectionGraph, q: &Query, b: &SearchBounds) -> Result<OracleAnswer, Error> {
    let src = g.require(q.source.as_str())?;
    let dst = g.require(q.target.as_str())?;
    let mut bounds = b.clone();
    bounds.closure = b.closure_with(&q.alpha);
    Ok(match b.strategy {
        Strategy::Exhaustive => exhaustive(g, q, &bounds)?,
        Strategy::Saturating => Saturator::new(g, src, dst, &q.alpha, &bounds).search(),
    })
}

#[derive(Clone, Copy, Debug)]
enum Step {
    Take(usize, usize, usize, u32),
    Grant(usize, usize, usize, u32),
    Create(usize, VertexKind),
}

/// One graph of the literal search: kinds plus a rights bitmask per cell,
/// over every right that occurs. Vertices past the original ones are the
/// created `n$` vertices in creation order.
#[derive(Clone)]
struct Literal {
    subject: Vec<bool>,
    cells: Vec<u64>,
}

impl Literal {
    fn n(&self) -> usize {
        self.subject.len()
    }

    fn key(&self) -> Vec<u8> {
        let mut key: Vec<u8> = self.subject.iter().map(|&s| s as u8).collect();
        for c in &self.cells {
            key.extend_from_slice(&c.to_le_bytes());
        }
        key
    }

    fn apply(&self, step: Step, create_bits: u64) -> Literal {
        let n = self.n();
        let mut next = self.clone();
        match step {
            Step::Take(a, _, c, bit) | Step::Grant(_, a, c, bit) => next.cells[a * n + c] |= 1 << bit,
            Step::Create(a, kind) => {
                let mut cells = vec![0u64; (n + 1) * (n + 1)];
                for r in 0..n {
                    cells[r * (n + 1)..r * (n + 1) + n].copy_from_slice(&self.cells[r * n..r * n + n]);
                }
                cells[a * (n + 1) + n] = create_bits;
                next.cells = cells;
                next.subject.push(kind == VertexKind::Subject);
            }
        }
        next
    }

    /// Every rule application that changes the graph, in the order of
    /// [`enumerate_rules`] for the original vertices.
    fn steps(&self, t: u32, g: u32, created: usize, budget: usize) -> Vec<Step> {
        let n = self.n();
        let mut out = Vec::new();
        let subjects = (0..n).filter(|&a| self.subject[a]);
        for a in subjects.clone() {
            for b in (0..n).filter(|&b| self.cells[a * n + b] >> t & 1 == 1) {
                for c in 0..n {
                    let mut fresh = self.cells[b * n + c] & !self.cells[a * n + c];
                    while fresh != 0 {
                        let bit = fresh.trailing_zeros();
                        fresh &= fresh - 1;
                        out.push(Step::Take(a, b, c, bit));
                    }
                }
            }
            for b in (0..n).filter(|&b| self.cells[a * n + b] >> g & 1 == 1) {
                for c in 0..n {
                    let mut fresh = self.cells[a * n + c] & !self.cells[b * n + c];
                    while fresh != 0 {
                        let bit = fresh.trailing_zeros();
                        fresh &= fresh - 1;
                        out.push(Step::Grant(a, b, c, bit));
                    }
                }
            }
        }
        if created < budget {
            for a in subjects {
                out.push(Step::Create(a, VertexKind::Subject));
                out.push(Step::Create(a, VertexKind::Object));
            }
        }
        out
    }
}

fn exhaustive(g: &ProtectionGraph, q: &Query, b: &SearchBounds) -> Result<OracleAnswer, Error> {
    let mut alphabet = g.alphabet();
    alphabet.extend(&b.closure);
    let rights: Vec<Right> = alphabet.iter().cloned().collect();
    if rights.len() > 64 {
        return Err(Error::Unsupported(format!(
            "exhaustive search handles at most 64 distinct rights, found {}",
            rights.len()
        )));
    }
    let bit_of = |r: &Right| rights.iter().position(|x| x == r).expect("right in alphabet") as u32;
    let (t, gr, alpha) = (bit_of(&Right::take()), bit_of(&Right::grant()), bit_of(&q.alpha));
    let create_bits = b.closure.iter().fold(0u64, |m, r| m | 1 << bit_of(r));
    let n0 = g.vertex_count();
    let base = created_count(g);
    let (src, dst) = (g.require(q.source.as_str())?, g.require(q.target.as_str())?);

    let mut root = Literal {
        subject: (0..n0).map(|v| g.is_subject(v)).collect(),
        cells: vec![0; n0 * n0],
    };
    for (e, edge) in g.edges().iter().enumerate() {
        let (x, y) = g.ends(e);
        for r in &edge.rights {
            root.cells[x * n0 + y] |= 1 << bit_of(r);
        }
    }
    let goal = |s: &Literal| s.cells[src * s.n() + dst] >> alpha & 1 == 1;
    let mut stats = SearchStats::default();
    if goal(&root) {
        return Ok(OracleAnswer {
            outcome: OracleOutcome::Found(Vec::new()),
            stats,
        });
    }

    let name = |v: usize| -> VertexId {
        if v < n0 {
            g.name(v).clone()
        } else {
            VertexId::created(base + v - n0 + 1)
        }
    };
    let to_rule = |step: Step, created_before: usize| match step {
        Step::Take(a, v, c, bit) => RuleInstance::Take {
            actor: name(a),
            via: name(v),
            object: name(c),
            right: rights[bit as usize].clone(),
        },
        Step::Grant(a, to, c, bit) => RuleInstance::Grant {
            actor: name(a),
            to: name(to),
            object: name(c),
            right: rights[bit as usize].clone(),
        },
        Step::Create(a, kind) => RuleInstance::Create {
            actor: name(a),
            kind,
            name: VertexId::created(base + created_before + 1),
            rights: b.closure.clone(),
        },
    };

    // Only frontier graphs are kept; expanded states survive as a parent
    // link and the step that produced them.
    let mut links: Vec<Option<(usize, Step, usize)>> = vec![None];
    let mut seen: HashSet<Vec<u8>> = HashSet::new();
    seen.insert(root.key());
    let mut queue = VecDeque::from([(0usize, root)]);
    stats.frontier_peak = 1;
    let budget = b.create_budget.saturating_sub(base);
    while let Some((i, current)) = queue.pop_front() {
        if stats.states_explored >= b.step_limit {
            stats.step_limited = true;
            break;
        }
        stats.states_explored += 1;
        let created = current.n() - n0;
        if created >= budget && current.subject.iter().any(|&s| s) {
            stats.budget_pruned = true;
        }
        for step in current.steps(t, gr, created, budget) {
            let next = current.apply(step, create_bits);
            if !seen.insert(next.key()) {
                continue;
            }
            links.push(Some((i, step, created)));
            let id = links.len() - 1;
            if goal(&next) {
                let mut rules = Vec::new();
                let mut at = id;
                while let Some((p, step, created)) = links[at] {
                    rules.push(to_rule(step, created));
                    at = p;
                }
                rules.reverse();
                return Ok(OracleAnswer {
                    outcome: OracleOutcome::Found(rules),
                    stats,
                });
            }
            queue.push_back((id, next));
            stats.frontier_peak = stats.frontier_peak.max(queue.len());
        }
    }
    Ok(OracleAnswer {
        outcome: OracleOutcome::NotFoundWithinBounds,
        stats,
    })
}

const BIT_T: u8 = 1;
const BIT_G: u8 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Derived {
    Take { actor: usize, via: usize, object: usize, bit: u8 },
    Grant { actor: usize, to: usize, object: usize, bit: u8 },
}

/// Rights matrix over at most three tracked rights (t, g, alpha).
#[derive(Clone, Debug)]
struct Compact {
    n: usize,
    subject: Vec<bool>,
    cells: Vec<u8>,
}

impl Compact {
    fn get(&self, a: usize, b: usize) -> u8 {
        self.cells[a * self.n + b]
    }

    fn key(&self) -> Vec<u8> {
        let mut key = Vec::with_capacity(self.n * (self.n + 1) + 8);
        key.extend_from_slice(&(self.n as u64).to_le_bytes());
        key.extend(self.subject.iter().map(|&s| s as u8));
        key.extend_from_slice(&self.cells);
        key
    }

    /// Adds a vertex created by `actor` holding `bits` over it.
    fn create(&mut self, actor: usize, bits: u8) -> usize {
        let n = self.n;
        let mut cells = vec![0u8; (n + 1) * (n + 1)];
        for a in 0..n {
            cells[a * (n + 1)..a * (n + 1) + n].copy_from_slice(&self.cells[a * n..a * n + n]);
        }
        self.cells = cells;
        self.n = n + 1;
        self.subject.push(true);
        self.cells[actor * self.n + n] = bits;
        n
    }

    /// Closes the matrix under take and grant. `pending` lists facts not yet
    /// propagated; with `log`, every derived fact records its rule.
    fn saturate(
        &mut self,
        mut pending: Vec<(usize, usize, u8)>,
        mut log: Option<&mut Vec<((usize, usize, u8), Derived)>>,
    ) {
        let n = self.n;
        while let Some((x, y, bit)) = pending.pop() {
            let mut adds: Vec<(usize, usize, u8, Derived)> = Vec::new();
            if bit == BIT_T && self.subject[x] {
                for c in 0..n {
                    let mut bits = self.get(y, c) & !self.get(x, c);
                    while bits != 0 {
                        let b = bits & bits.wrapping_neg();
                        bits &= !b;
                        adds.push((x, c, b, Derived::Take { actor: x, via: y, object: c, bit: b }));
                    }
                }
            }
            for a in 0..n {
                if self.subject[a] && self.get(a, x) & BIT_T != 0 && self.get(a, y) & bit == 0 {
                    adds.push((a, y, bit, Derived::Take { actor: a, via: x, object: y, bit }));
                }
            }
            if bit == BIT_G && self.subject[x] {
                for c in 0..n {
                    let mut bits = self.get(x, c) & !self.get(y, c);
                    while bits != 0 {
                        let b = bits & bits.wrapping_neg();
                        bits &= !b;
                        adds.push((y, c, b, Derived::Grant { actor: x, to: y, object: c, bit: b }));
                    }
                }
            }
            if self.subject[x] {
                for b in 0..n {
                    if self.get(x, b) & BIT_G != 0 && self.get(b, y) & bit == 0 {
                        adds.push((b, y, bit, Derived::Grant { actor: x, to: b, object: y, bit }));
                    }
                }
            }
            for (u, v, b, rule) in adds {
                let cell = &mut self.cells[u * n + v];
                if *cell & b == 0 {
                    *cell |= b;
                    pending.push((u, v, b));
                    if let Some(log) = log.as_deref_mut() {
                        log.push(((u, v, b), rule));
                    }
                }
            }
        }
    }

    fn all_facts(&self) -> Vec<(usize, usize, u8)> {
        let mut facts = Vec::new();
        for a in 0..self.n {
            for b in 0..self.n {
                let mut bits = self.get(a, b);
                while bits != 0 {
                    let bit = bits & bits.wrapping_neg();
                    bits &= !bit;
                    facts.push((a, b, bit));
                }
            }
        }
        facts
    }
}

struct Saturator<'a> {
    g: &'a ProtectionGraph,
    src: usize,
    dst: usize,
    alpha_bit: u8,
    alpha: &'a Right,
    bounds: &'a SearchBounds,
    create_bits: u8,
}

impl<'a> Saturator<'a> {
    fn new(g: &'a ProtectionGraph, src: usize, dst: usize, alpha: &'a Right, bounds: &'a SearchBounds) -> Self {
        let alpha_bit = if alpha.is_take() {
            BIT_T
        } else if alpha.is_grant() {
            BIT_G
        } else {
            4
        };
        let mut create_bits = 0;
        for r in &bounds.closure {
            create_bits |= Self::bit_of(r, alpha);
        }
        Saturator {
            g,
            src,
            dst,
            alpha_bit,
            alpha,
            bounds,
            create_bits,
        }
    }

    fn bit_of(r: &Right, alpha: &Right) -> u8 {
        if r.is_take() {
            BIT_T
        } else if r.is_grant() {
            BIT_G
        } else if r == alpha {
            4
        } else {
            0
        }
    }

    fn initial(&self) -> Compact {
        let n = self.g.vertex_count();
        let mut c = Compact {
            n,
            subject: (0..n).map(|v| self.g.is_subject(v)).collect(),
            cells: vec![0; n * n],
        };
        for (e, edge) in self.g.edges().iter().enumerate() {
            let (a, b) = self.g.ends(e);
            for r in &edge.rights {
                c.cells[a * n + b] |= Self::bit_of(r, self.alpha);
            }
        }
        c
    }

    fn goal(&self, c: &Compact) -> bool {
        c.get(self.src, self.dst) & self.alpha_bit != 0
    }

    fn search(&self) -> OracleAnswer {
        let mut stats = SearchStats::default();
        let actors: Vec<usize> = (0..self.g.vertex_count()).filter(|&v| self.g.is_subject(v)).collect();
        let budget = self.bounds.create_budget.saturating_sub(created_count(self.g));
        let mut root = self.initial();
        let facts = root.all_facts();
        root.saturate(facts, None);
        if self.goal(&root) {
            return self.found(&[], stats);
        }
        let mut seen: HashSet<Vec<u8>> = HashSet::new();
        seen.insert(root.key());
        // Plans hold positions into `actors`, nondecreasing.
        let mut queue: VecDeque<(Vec<usize>, Compact)> = VecDeque::from([(Vec::new(), root)]);
        stats.frontier_peak = 1;
        while let Some((plan, state)) = queue.pop_front() {
            if stats.states_explored >= self.bounds.step_limit {
                stats.step_limited = true;
                break;
            }
            stats.states_explored += 1;
            if plan.len() >= budget {
                if !actors.is_empty() {
                    stats.budget_pruned = true;
                }
                continue;
            }
            let from = plan.last().copied().unwrap_or(0);
            for k in from..actors.len() {
                let mut child = state.clone();
                let new = child.create(actors[k], self.create_bits);
                let fresh = (0..8)
                    .map(|i| 1u8 << i)
                    .filter(|b| self.create_bits & b != 0)
                    .map(|b| (actors[k], new, b))
                    .collect();
                child.saturate(fresh, None);
                let mut child_plan = plan.clone();
                child_plan.push(k);
                if self.goal(&child) {
                    return self.found(&child_plan, stats);
                }
                if seen.insert(child.key()) {
                    queue.push_back((child_plan, child));
                    stats.frontier_peak = stats.frontier_peak.max(queue.len());
                }
            }
        }
        OracleAnswer {
            outcome: OracleOutcome::NotFoundWithinBounds,
            stats,
        }
    }

    /// Replays `plan` with provenance and extracts the rules the goal fact
    /// depends on.
    fn found(&self, plan: &[usize], stats: SearchStats) -> OracleAnswer {
        let g = self.g;
        let actors: Vec<usize> = (0..g.vertex_count()).filter(|&v| g.is_subject(v)).collect();
        let mut state = self.initial();
        let mut log = Vec::new();
        let facts = state.all_facts();
        state.saturate(facts, Some(&mut log));
        let mut names: Vec<VertexId> = (0..g.vertex_count()).map(|v| g.name(v).clone()).collect();
        let base = created_count(g);
        let mut rules = Vec::new();
        for (i, &k) in plan.iter().enumerate() {
            let actor = actors[k];
            let new = state.create(actor, self.create_bits);
            let name = VertexId::created(base + i + 1);
            rules.push(RuleInstance::Create {
                actor: names[actor].clone(),
                kind: VertexKind::Subject,
                name: name.clone(),
                rights: self.bounds.closure.clone(),
            });
            names.push(name);
            let fresh = (0..8)
                .map(|i| 1u8 << i)
                .filter(|b| self.create_bits & b != 0)
                .map(|b| (actor, new, b))
                .collect();
            state.saturate(fresh, Some(&mut log));
        }
        debug_assert!(self.goal(&state));

        let producer: HashMap<(usize, usize, u8), usize> =
            log.iter().enumerate().map(|(i, (fact, _))| (*fact, i)).collect();
        let mut needed = vec![false; log.len()];
        let mut stack = vec![(self.src, self.dst, self.alpha_bit)];
        while let Some(fact) = stack.pop() {
            let Some(&i) = producer.get(&fact) else { continue };
            if needed[i] {
                continue;
            }
            needed[i] = true;
            match log[i].1 {
                Derived::Take { actor, via, object, bit } => {
                    stack.push((actor, via, BIT_T));
                    stack.push((via, object, bit));
                }
                Derived::Grant { actor, to, object, bit } => {
                    stack.push((actor, to, BIT_G));
                    stack.push((actor, object, bit));
                }
            }
        }
        let right_of = |bit: u8| match bit {
            BIT_T => Right::take(),
            BIT_G => Right::grant(),
            _ => self.alpha.clone(),
        };
        for (i, (_, rule)) in log.iter().enumerate() {
            if !needed[i] {
                continue;
            }
            rules.push(match *rule {
                Derived::Take { actor, via, object, bit } => RuleInstance::Take {
                    actor: names[actor].clone(),
                    via: names[via].clone(),
                    object: names[object].clone(),
                    right: right_of(bit),
                },
                Derived::Grant { actor, to, object, bit } => RuleInstance::Grant {
                    actor: names[actor].clone(),
                    to: names[to].clone(),
                    object: names[object].clone(),
                    right: right_of(bit),
                },
            });
        }
        OracleAnswer {
            outcome: OracleOutcome::Found(rules),
            stats,
        }
    }
}

/// Applies `rules` in order, failing on the first inapplicable one.
pub fn replay(g: &ProtectionGraph, rules: &[RuleInstance]) -> Result<ProtectionGraph, RuleError> {
    rules.iter().try_fold(g.clone(), |h, r| apply_rule(&h, r))
}

/// Working state for turning a witness into concrete rule applications.
struct Builder<'a> {
    base: &'a ProtectionGraph,
    work: ProtectionGraph,
    rules: Vec<RuleInstance>,
    next_created: usize,
    closure: RightSet,
}

impl<'a> Builder<'a> {
    fn has(&self, a: &VertexId, b: &VertexId, right: &str) -> bool {
        self.work.has_right(a.as_str(), b.as_str(), right)
    }

    fn apply(&mut self, rule: RuleInstance) -> Result<(), Error> {
        self.work = apply_rule(&self.work, &rule)?;
        self.rules.push(rule);
        Ok(())
    }

    fn take(&mut self, actor: &VertexId, via: &VertexId, object: &VertexId, right: &Right) -> Result<(), Error> {
        if self.has(actor, object, right.as_str()) {
            return Ok(());
        }
        self.apply(RuleInstance::Take {
            actor: actor.clone(),
            via: via.clone(),
            object: object.clone(),
            right: right.clone(),
        })
    }

    fn grant(&mut self, actor: &VertexId, to: &VertexId, object: &VertexId, right: &Right) -> Result<(), Error> {
        if self.has(to, object, right.as_str()) {
            return Ok(());
        }
        self.apply(RuleInstance::Grant {
            actor: actor.clone(),
            to: to.clone(),
            object: object.clone(),
            right: right.clone(),
        })
    }

    fn create(&mut self, actor: &VertexId) -> Result<VertexId, Error> {
        let name = VertexId::created(self.next_created);
        self.next_created += 1;
        self.apply(RuleInstance::Create {
            actor: actor.clone(),
            kind: VertexKind::Object,
            name: name.clone(),
            rights: self.closure.clone(),
        })?;
        Ok(name)
    }

    /// `path[0]` follows the `t` edges along `path` until it holds `t` over
    /// the last vertex.
    fn take_chain(&mut self, path: &[VertexId]) -> Result<(), Error> {
        let t = Right::take();
        for i in 2..path.len() {
            self.take(&path[0], &path[i - 1], &path[i], &t)?;
        }
        Ok(())
    }

    /// Passes `right` over `z` from subject `x` to subject `y`, which share a
    /// `t` or `g` edge in some direction.
    fn share(&mut self, x: &VertexId, y: &VertexId, z: &VertexId, right: &Right) -> Result<(), Error> {
        if x == y || self.has(y, z, right.as_str()) {
            return Ok(());
        }
        let g = Right::grant();
        if self.has(y, x, Right::TAKE) {
            self.take(y, x, z, right)
        } else if self.has(x, y, Right::GRANT) {
            self.grant(x, y, z, right)
        } else if self.has(y, x, Right::GRANT) {
            let n = self.create(y)?;
            self.grant(y, x, &n, &g)?;
            self.grant(x, &n, z, right)?;
            self.take(y, &n, z, right)
        } else if self.has(x, y, Right::TAKE) {
            let n = self.create(y)?;
            self.take(x, y, &n, &g)?;
            self.grant(x, &n, z, right)?;
            self.take(y, &n, z, right)
        } else {
            Err(Error::InvalidWitness(format!("{x} and {y} share no t/g edge")))
        }
    }

    /// Moves `right` over `z` from `from` to `to` inside one island.
    fn move_within_island(&mut self, from: &VertexId, to: &VertexId, z: &VertexId, right: &Right) -> Result<(), Error> {
        if from == to {
            return Ok(());
        }
        let view = build_island_view(self.base);
        let (a, b) = (self.base.require(from.as_str())?, self.base.require(to.as_str())?);
        let path = path_within_island(&view, a, b)
            .ok_or_else(|| Error::InvalidWitness(format!("{from} and {to} are not in one island")))?;
        for hop in path.windows(2) {
            let (x, y) = (self.base.name(hop[0]).clone(), self.base.name(hop[1]).clone());
            self.share(&x, &y, z, right)?;
        }
        Ok(())
    }

    /// Moves `right` over `z` across a bridge from its last vertex to its
    /// first.
    fn cross_bridge(&mut self, walk: &Walk, z: &VertexId, right: &Right) -> Result<(), Error> {
        let vs = &walk.vertices;
        let (u, v) = (walk.start().clone(), walk.end().clone());
        let pattern = bridge_patterns(&walk.word)
            .first()
            .copied()
            .ok_or_else(|| Error::InvalidWitness("bridge word matches no pattern".into()))?;
        let g = Right::grant();
        match pattern {
            BridgePattern::B1 => {
                self.take_chain(vs)?;
                self.take(&u, &v, z, right)
            }
            BridgePattern::B2 => {
                let back: Vec<VertexId> = vs.iter().rev().cloned().collect();
                self.take_chain(&back)?;
                self.share(&v, &u, z, right)
            }
            BridgePattern::B3 => {
                let j = grant_position(walk);
                let (o, w) = (vs[j].clone(), vs[j + 1].clone());
                self.take_chain(&vs[..=j])?;
                if j > 0 {
                    self.take(&u, &o, &w, &g)?;
                }
                let back: Vec<VertexId> = vs[j + 1..].iter().rev().cloned().collect();
                self.take_chain(&back)?;
                if w == v {
                    return self.share(&v, &u, z, right);
                }
                let n = self.create(&u)?;
                self.grant(&u, &w, &n, &g)?;
                self.take(&v, &w, &n, &g)?;
                self.grant(&v, &n, z, right)?;
                self.take(&u, &n, z, right)
            }
            BridgePattern::B4 => {
                let j = grant_position(walk);
                let (o, w) = (vs[j].clone(), vs[j + 1].clone());
                self.take_chain(&vs[..=j])?;
                let back: Vec<VertexId> = vs[j + 1..].iter().rev().cloned().collect();
                self.take_chain(&back)?;
                if w != v {
                    self.take(&v, &w, &o, &g)?;
                }
                if o == u {
                    return self.grant(&v, &u, z, right);
                }
                self.grant(&v, &o, z, right)?;
                self.take(&u, &o, z, right)
            }
        }
    }
}

fn grant_position(walk: &Walk) -> usize {
    walk.word
        .0
        .iter()
        .position(|s| s.right == crate::walks::TgRight::Grant)
        .expect("grant bridges contain a g step")
}

/// Turns a valid witness into a rule sequence that, replayed from the
/// graph, produces `q.source -> q.target` carrying `q.alpha`.
pub fn witness_to_rules(g: &ProtectionGraph, q: &Query, w: &Witness) -> Result<Vec<RuleInstance>, Error> {
    validate_witness(g, q, w).map_err(Error::InvalidWitness)?;
    let proof = match w {
        Witness::Direct => return Ok(Vec::new()),
        Witness::Composite(proof) => proof,
    };
    let alpha = &q.alpha;
    let z = &q.target;
    let mut b = Builder {
        base: g,
        work: g.clone(),
        rules: Vec::new(),
        next_created: created_count(g) + 1,
        closure: [Right::take(), Right::grant(), alpha.clone()].into_iter().collect(),
    };

    // The subject at the far end of the chain obtains the right first.
    let s = &proof.alpha_source;
    let mut holder = match &proof.terminal {
        SpanLink::Itself => s.clone(),
        SpanLink::Span(walk) => {
            let sp = walk.start().clone();
            b.take_chain(&walk.vertices)?;
            b.take(&sp, s, z, alpha)?;
            sp
        }
    };
    for bridge in proof.bridges.iter().rev() {
        b.move_within_island(&holder, bridge.end(), z, alpha)?;
        b.cross_bridge(bridge, z, alpha)?;
        holder = bridge.start().clone();
    }
    let p_sub = proof.initial.subject(&q.source).clone();
    b.move_within_island(&holder, &p_sub, z, alpha)?;
    if let SpanLink::Span(walk) = &proof.initial {
        let vs = &walk.vertices;
        let k = vs.len() - 1;
        b.take_chain(&vs[..k])?;
        if k > 1 {
            b.take(&p_sub, &vs[k - 1], &q.source, &Right::grant())?;
        }
        b.grant(&p_sub, &q.source, z, alpha)?;
    }
    Ok(b.rules)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decision::can_share;
    use crate::format::parse_text;

    fn v(s: &str) -> VertexId {
        VertexId::try_from(s.to_owned()).unwrap()
    }

    fn r(s: &str) -> Right {
        Right::new(s).unwrap()
    }

    const TAKE_CHAIN: &str = "subject p\nobject s\nobject q\nedge p s t\nedge s q r\n";

    #[test]
    fn take_adds_edge() {
        let g = parse_text(TAKE_CHAIN).unwrap();
        let rule = RuleInstance::Take {
            actor: v("p"),
            via: v("s"),
            object: v("q"),
            right: r("r"),
        };
        let h = apply_rule(&g, &rule).unwrap();
        assert!(h.has_right("p", "q", "r"));
        assert!(!g.has_right("p", "q", "r"));
    }

    #[test]
    fn grant_adds_edge() {
        let g = parse_text("subject s\nobject x\nobject y\nedge s x g\nedge s y r\n").unwrap();
        let rule = RuleInstance::Grant {
            actor: v("s"),
            to: v("x"),
            object: v("y"),
            right: r("r"),
        };
        assert!(apply_rule(&g, &rule).unwrap().has_right("x", "y", "r"));
    }

    #[test]
    fn inapplicable_rules_name_conditions() {
        let g = parse_text("object p\nobject s\nobject q\nedge p s t\nedge s q r\n").unwrap();
        let rule = RuleInstance::Take {
            actor: v("p"),
            via: v("s"),
            object: v("q"),
            right: r("r"),
        };
        let err = apply_rule(&g, &rule).unwrap_err();
        assert_eq!(err.unmet, vec!["actor must be a subject".to_owned()]);

        let g = parse_text("subject p\nobject s\n").unwrap();
        let rule = RuleInstance::Take {
            actor: v("p"),
            via: v("s"),
            object: v("s"),
            right: r("w"),
        };
        let err = apply_rule(&g, &rule).unwrap_err();
        assert_eq!(err.unmet.len(), 2);
    }

    #[test]
    fn enumerate_examples() {
        assert!(enumerate_rules(&ProtectionGraph::default(), &SearchBounds::default()).is_empty());
        let g = parse_text(TAKE_CHAIN).unwrap();
        let rules = enumerate_rules(&g, &SearchBounds::with_budget(0));
        assert_eq!(
            rules,
            vec![RuleInstance::Take {
                actor: v("p"),
                via: v("s"),
                object: v("q"),
                right: r("r"),
            }]
        );
        let rules = enumerate_rules(&g, &SearchBounds::with_budget(1));
        assert_eq!(rules.len(), 3);
        assert!(matches!(&rules[1], RuleInstance::Create { kind: VertexKind::Subject, name, .. } if name.as_str() == "n$1"));
    }

    #[test]
    fn oracle_examples() {
        let g = parse_text("subject p\nsubject q\nedge p q r\n").unwrap();
        let q = Query::new("r", "p", "q").unwrap();
        for strategy in [Strategy::Exhaustive, Strategy::Saturating] {
            let a = oracle_can_share(&g, &q, &SearchBounds::default().strategy(strategy)).unwrap();
            assert_eq!(a.rules(), Some(&[][..]));
        }

        let g = parse_text(TAKE_CHAIN).unwrap();
        for strategy in [Strategy::Exhaustive, Strategy::Saturating] {
            let a = oracle_can_share(&g, &q, &SearchBounds::default().strategy(strategy)).unwrap();
            let rules = a.rules().unwrap();
            assert_eq!(rules.len(), 1, "{strategy:?}");
            assert!(replay(&g, rules).unwrap().has_right("p", "q", "r"));
        }
    }

    #[test]
    fn oracle_negative_is_exhausted() {
        let g = parse_text(
            "subject u\nsubject v\nobject o\nobject q\nedge u o t\nedge v o t\nedge v q r\n",
        )
        .unwrap();
        let q = Query::new("r", "u", "q").unwrap();
        let a = oracle_can_share(&g, &q, &SearchBounds::with_budget(4)).unwrap();
        assert_eq!(a.outcome, OracleOutcome::NotFoundWithinBounds);
        assert!(a.exhausted());
        assert!(a.stats.budget_pruned);
    }

    #[test]
    fn exhaustive_step_limit_is_reported() {
        let g = parse_text(
            "subject u\nsubject v\nobject o\nobject q\nedge u o t\nedge v o t\nedge v q r\n",
        )
        .unwrap();
        let q = Query::new("r", "u", "q").unwrap();
        let mut b = SearchBounds::with_budget(2).strategy(Strategy::Exhaustive);
        b.step_limit = 5;
        let a = oracle_can_share(&g, &q, &b).unwrap();
        assert!(!a.found());
        assert!(!a.exhausted());
        assert_eq!(a.stats.states_explored, 5);
    }

    #[test]
    fn witness_replays() {
        let cases = [
            (TAKE_CHAIN, "r", "p", "q"),
            (
                "subject u\nsubject v\nobject o\nobject w\nobject q\nedge u o t\nedge o w g\nedge v w t\nedge v q r\n",
                "r",
                "u",
                "q",
            ),
            ("subject p\nsubject s\nsubject q\nedge p s g\nedge s q r\n", "r", "p", "q"),
            ("subject p\nsubject s\nobject q\nedge s p t\nedge s q r\n", "r", "p", "q"),
        ];
        for (doc, alpha, p, t) in cases {
            let g = parse_text(doc).unwrap();
            let q = Query::new(alpha, p, t).unwrap();
            let d = can_share(&g, &q).unwrap();
            let rules = witness_to_rules(&g, &q, d.witness.as_ref().unwrap()).unwrap();
            let h = replay(&g, &rules).unwrap();
            assert!(h.has_right(p, t, alpha), "{doc}");
        }
        let g = parse_text(TAKE_CHAIN).unwrap();
        let q = Query::new("r", "p", "q").unwrap();
        let d = can_share(&g, &q).unwrap();
        assert_eq!(
            witness_to_rules(&g, &q, d.witness.as_ref().unwrap()).unwrap(),
            vec![RuleInstance::Take {
                actor: v("p"),
                via: v("s"),
                object: v("q"),
                right: r("r"),
            }]
        );
    }

    #[test]
    fn invalid_witness_is_rejected() {
        let g = parse_text(TAKE_CHAIN).unwrap();
        let q = Query::new("w", "p", "q").unwrap();
        assert!(matches!(
            witness_to_rules(&g, &q, &Witness::Direct),
            Err(Error::InvalidWitness(_))
        ));
    }
}
