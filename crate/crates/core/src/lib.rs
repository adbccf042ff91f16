//! Take-Grant protection graph analysis.
//!
//! Graphs are parsed from a line-based text format or JSON
//! ([`format`]), analyzed for islands, bridges and spans ([`islands`],
//! [`walks`]), and queried with the can-share decision ([`decision`]).
//! Decisions come with witnesses that [`oracle::witness_to_rules`] turns into
//! concrete rule applications, and [`oracle::oracle_can_share`] answers the
//! same question by searching rule sequences directly.

pub mod cli;
pub mod decision;
pub mod error;
pub mod format;
pub mod graph;
pub mod islands;
pub mod oracle;
pub mod path;
pub mod random;
pub mod views;
pub mod walks;

pub use decision::{can_share, can_share_subject_only, check_witness, Analysis, Decision, Query, Witness};
pub use error::Error;
pub use format::{export_dot, parse_graph, serialize_graph, DocumentFormat};
pub use graph::{ProtectionGraph, Right, RightSet, VertexId, VertexKind};
pub use islands::{compute_islands, compute_islands_floyd, same_island, Island};
pub use oracle::{apply_rule, enumerate_rules, oracle_can_share, witness_to_rules, OracleAnswer, RuleInstance, SearchBounds, Strategy};
pub use path::{tg_path, TgPath};
pub use random::{gen_random, RandomGraphParams};
pub use walks::{find_bridges, find_initial_spans, find_terminal_spans, BridgePattern, PathWord, Walk};
