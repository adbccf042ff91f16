//! Command-line front end.
//!
//! Exit codes: 0 for success or a true answer, 1 for a false answer
//! (`analyze`, `path`, `oracle-check`), 2 for usage and input errors, 3 when
//! `oracle-check` finds the decision and the search disagreeing.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::decision::{render_decision, Analysis, Query};
use crate::error::Error;
use crate::format::{export_dot, parse_graph, serialize_graph, DocumentFormat};
use crate::graph::{ProtectionGraph, Right};
use crate::oracle::{oracle_can_share, OracleAnswer, OracleOutcome, SearchBounds, Strategy};
use crate::path::tg_path;
use crate::random::{gen_random, RandomGraphParams};
use crate::walks::{find_bridges, spans_into, SpanKind, StepTable, Walk};

pub const EXIT_TRUE: i32 = 0;
pub const EXIT_FALSE: i32 = 1;
pub const EXIT_ERROR: i32 = 2;
pub const EXIT_DISAGREE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "tgsafe", version, about = "Take-Grant protection graph analysis")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Structured,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    Exhaustive,
    Saturating,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Graph document; `-` reads standard input.
    #[arg(short, long, default_value = "-")]
    pub input: String,
    /// Input document format. Defaults to the file extension (`.json` is
    /// structured, anything else text).
    #[arg(long, value_enum)]
    pub input_format: Option<OutputFormat>,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    pub format: OutputFormat,
    /// Write the report here instead of standard output.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct QueryArgs {
    #[arg(long)]
    pub alpha: String,
    #[arg(long)]
    pub from: String,
    #[arg(long)]
    pub to: String,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide can_share and print the witness.
    Analyze {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        query: QueryArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// List the islands.
    Islands {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// List bridges between every ordered pair of islands.
    Bridges {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// List initial and terminal spans into each vertex (or one vertex).
    Spans {
        #[command(flatten)]
        input: InputArgs,
        /// Only spans ending at this vertex.
        #[arg(long)]
        to: Option<String>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Shortest tg-path between two vertices.
    Path {
        #[command(flatten)]
        input: InputArgs,
        /// Accepted for symmetry with the query commands; tg-paths do not
        /// depend on it.
        #[arg(long)]
        alpha: Option<String>,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Compare can_share with the rule-search oracle.
    OracleCheck {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        query: QueryArgs,
        #[arg(long, default_value_t = 4)]
        create_budget: usize,
        #[arg(long, default_value_t = 1_000_000)]
        step_limit: usize,
        #[arg(long, value_enum, default_value_t = StrategyArg::Saturating)]
        strategy: StrategyArg,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Emit the graph in Graphviz DOT.
    ExportDot {
        #[command(flatten)]
        input: InputArgs,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Generate a random graph document.
    GenRandom {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        density: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.5)]
        subject_fraction: f64,
        /// Comma-separated rights to draw from.
        #[arg(long, default_value = "t,g,r")]
        alphabet: String,
        #[command(flatten)]
        out: OutputArgs,
    },
}

struct Report {
    text: String,
    code: i32,
}

impl Report {
    fn ok(text: String) -> Self {
        Report { text, code: EXIT_TRUE }
    }
}

/// Parses `argv` (including the program name) and runs the command.
/// Returns the exit code.
pub fn run<I, S>(argv: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_TRUE };
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = stderr.write_all(rendered.as_bytes());
            } else {
                let _ = stdout.write_all(rendered.as_bytes());
            }
            return code;
        }
    };
    let output = match &cli.command {
        Command::Analyze { out, .. }
        | Command::Islands { out, .. }
        | Command::Bridges { out, .. }
        | Command::Spans { out, .. }
        | Command::Path { out, .. }
        | Command::OracleCheck { out, .. }
        | Command::GenRandom { out, .. } => out.output.clone(),
        Command::ExportDot { output, .. } => output.clone(),
    };
    match execute(&cli.command, stdin) {
        Ok(report) => {
            let written = match output {
                Some(path) => fs::write(&path, &report.text)
                    .map_err(|e| format!("cannot write {}: {e}", path.display())),
                None => stdout
                    .write_all(report.text.as_bytes())
                    .map_err(|e| format!("cannot write output: {e}")),
            };
            match written {
                Ok(()) => report.code,
                Err(msg) => {
                    let _ = writeln!(stderr, "error: {msg}");
                    EXIT_ERROR
                }
            }
        }
        Err(msg) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_ERROR
        }
    }
}

fn load(input: &InputArgs, stdin: &mut dyn Read) -> Result<ProtectionGraph, String> {
    let (text, guessed) = if input.input == "-" {
        let mut buf = String::new();
        stdin
            .read_to_string(&mut buf)
            .map_err(|e| format!("cannot read standard input: {e}"))?;
        (buf, DocumentFormat::Text)
    } else {
        let path = Path::new(&input.input);
        let text = fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        (text, DocumentFormat::from_path(path))
    };
    let format = match input.input_format {
        Some(OutputFormat::Text) => DocumentFormat::Text,
        Some(OutputFormat::Structured) => DocumentFormat::Structured,
        None => guessed,
    };
    let label = if input.input == "-" { "<stdin>" } else { input.input.as_str() };
    parse_graph(&text, format).map_err(|e| format!("{label}: {e}"))
}

fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

fn err(e: Error) -> String {
    e.to_string()
}

fn walk_line(walk: &Walk, label: &str) -> String {
    format!("{walk} : {label}\n")
}

fn execute(cmd: &Command, stdin: &mut dyn Read) -> Result<Report, String> {
    match cmd {
        Command::Analyze { input, query, out } => {
            let g = load(input, stdin)?;
            let q = Query::new(&query.alpha, &query.from, &query.to).map_err(err)?;
            let d = Analysis::new(&g).can_share(&q).map_err(err)?;
            let text = match out.format {
                OutputFormat::Text => render_decision(&g, &q, &d),
                OutputFormat::Structured => json_text(&json!({ "query": q, "holds": d.holds, "witness": d.witness })),
            };
            Ok(Report {
                text,
                code: if d.holds { EXIT_TRUE } else { EXIT_FALSE },
            })
        }
        Command::Islands { input, out } => {
            let g = load(input, stdin)?;
            let analysis = Analysis::new(&g);
            let islands = analysis.islands().islands();
            Ok(Report::ok(match out.format {
                OutputFormat::Text => islands
                    .iter()
                    .map(|i| {
                        let names: Vec<&str> = i.members.iter().map(|m| m.as_str()).collect();
                        format!("I{}: {}\n", i.id, names.join(" "))
                    })
                    .collect(),
                OutputFormat::Structured => json_text(&json!({ "islands": islands })),
            }))
        }
        Command::Bridges { input, out } => {
            let g = load(input, stdin)?;
            let analysis = Analysis::new(&g);
            let islands = analysis.islands().islands();
            let mut text = String::new();
            let mut rows = Vec::new();
            for a in islands {
                for b in islands.iter().filter(|b| b.id != a.id) {
                    for bw in find_bridges(&g, a, b).map_err(err)? {
                        text.push_str(&walk_line(&bw.walk, &bw.pattern.to_string()));
                        rows.push(json!({
                            "from_island": a.id,
                            "to_island": b.id,
                            "pattern": bw.pattern,
                            "walk": bw.walk,
                        }));
                    }
                }
            }
            Ok(Report::ok(match out.format {
                OutputFormat::Text => text,
                OutputFormat::Structured => json_text(&json!({ "bridges": rows })),
            }))
        }
        Command::Spans { input, to, out } => {
            let g = load(input, stdin)?;
            let ends: Vec<usize> = match to {
                Some(v) => vec![g.require(v).map_err(err)?],
                None => (0..g.vertex_count()).collect(),
            };
            let table = StepTable::new(&g);
            let mut text = String::new();
            let mut rows = Vec::new();
            for end in ends {
                for (kind, label) in [(SpanKind::Initial, "initial"), (SpanKind::Terminal, "terminal")] {
                    for (_, walk) in spans_into(&g, &table, end, kind) {
                        text.push_str(&walk_line(&walk, label));
                        rows.push(json!({ "kind": label, "to": g.name(end), "walk": walk }));
                    }
                }
            }
            Ok(Report::ok(match out.format {
                OutputFormat::Text => text,
                OutputFormat::Structured => json_text(&json!({ "spans": rows })),
            }))
        }
        Command::Path {
            input,
            alpha,
            from,
            to,
            out,
        } => {
            let g = load(input, stdin)?;
            if let Some(a) = alpha {
                Right::new(a.as_str()).map_err(err)?;
            }
            let path = tg_path(&g, from, to).map_err(err)?;
            let text = match (out.format, &path) {
                (OutputFormat::Text, Some(p)) => {
                    let names: Vec<&str> = p.vertices.iter().map(|v| v.as_str()).collect();
                    format!("{}\n", names.join(" "))
                }
                (OutputFormat::Text, None) => format!("no tg-path from {from} to {to}\n"),
                (OutputFormat::Structured, _) => json_text(&json!({ "from": from, "to": to, "path": path })),
            };
            Ok(Report {
                text,
                code: if path.is_some() { EXIT_TRUE } else { EXIT_FALSE },
            })
        }
        Command::OracleCheck {
            input,
            query,
            create_budget,
            step_limit,
            strategy,
            out,
        } => {
            let g = load(input, stdin)?;
            let q = Query::new(&query.alpha, &query.from, &query.to).map_err(err)?;
            let d = Analysis::new(&g).can_share(&q).map_err(err)?;
            let bounds = SearchBounds {
                create_budget: *create_budget,
                step_limit: *step_limit,
                strategy: match strategy {
                    StrategyArg::Exhaustive => Strategy::Exhaustive,
                    StrategyArg::Saturating => Strategy::Saturating,
                },
                ..SearchBounds::default()
            };
            let answer = oracle_can_share(&g, &q, &bounds).map_err(err)?;
            let verdict = compare(d.holds, &answer);
            let code = match verdict {
                Verdict::Disagree => EXIT_DISAGREE,
                _ if d.holds => EXIT_TRUE,
                _ => EXIT_FALSE,
            };
            let text = match out.format {
                OutputFormat::Text => oracle_text(&q, d.holds, &bounds, &answer, verdict),
                OutputFormat::Structured => json_text(&json!({
                    "query": q,
                    "decision": d.holds,
                    "oracle": answer,
                    "bounds": bounds,
                    "verdict": verdict.label(),
                })),
            };
            Ok(Report { text, code })
        }
        Command::ExportDot { input, .. } => {
            let g = load(input, stdin)?;
            Ok(Report::ok(export_dot(&g)))
        }
        Command::GenRandom {
            n,
            density,
            seed,
            subject_fraction,
            alphabet,
            out,
        } => {
            if !(0.0..=1.0).contains(density) || !(0.0..=1.0).contains(subject_fraction) {
                return Err("--density and --subject-fraction must lie in [0, 1]".into());
            }
            let rights: Vec<Right> = alphabet
                .split(',')
                .map(|r| Right::new(r.trim()))
                .collect::<Result<_, _>>()
                .map_err(err)?;
            let params = RandomGraphParams::new(*n, *density, *seed)
                .subject_fraction(*subject_fraction)
                .alphabet(rights);
            let g = gen_random(&params);
            let format = match out.format {
                OutputFormat::Text => DocumentFormat::Text,
                OutputFormat::Structured => DocumentFormat::Structured,
            };
            Ok(Report::ok(serialize_graph(&g, format)))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Verdict {
    Agree,
    /// The decision says true but the search stopped at its step limit.
    Inconclusive,
    Disagree,
}

impl Verdict {
    fn label(self) -> &'static str {
        match self {
            Verdict::Agree => "agree",
            Verdict::Inconclusive => "inconclusive",
            Verdict::Disagree => "disagree",
        }
    }
}

fn compare(holds: bool, answer: &OracleAnswer) -> Verdict {
    match (holds, answer.found()) {
        (a, b) if a == b => Verdict::Agree,
        (true, false) if !answer.exhausted() => Verdict::Inconclusive,
        _ => Verdict::Disagree,
    }
}

fn oracle_text(q: &Query, holds: bool, b: &SearchBounds, a: &OracleAnswer, v: Verdict) -> String {
    let mut s = format!("query: can_share({}, {}, {})\n", q.alpha, q.source, q.target);
    s.push_str(&format!("decision: {holds}\n"));
    match &a.outcome {
        OracleOutcome::Found(rules) => {
            s.push_str(&format!("oracle: found ({} rules)\n", rules.len()));
            for r in rules {
                s.push_str(&format!("  {r}\n"));
            }
        }
        OracleOutcome::NotFoundWithinBounds => s.push_str("oracle: not found within bounds\n"),
    }
    s.push_str(&format!(
        "bounds: create_budget={} step_limit={} strategy={:?}\n",
        b.create_budget, b.step_limit, b.strategy
    ));
    s.push_str(&format!(
        "stats: states_explored={} frontier_peak={} budget_pruned={} step_limited={}\n",
        a.stats.states_explored, a.stats.frontier_peak, a.stats.budget_pruned, a.stats.step_limited
    ));
    s.push_str(&format!("verdict: {}\n", v.label()));
    s
}
