//! `mpst`: batch checks over session types, global types, processes and
//! sessions stored in files.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value as Json};

use mpst::characteristic::{char_global, char_proc, preciseness_check, Outcome};
use mpst::parse::{parse, Category, Syntax};
use mpst::runtime::{step_all, stuck_search, ReductionTrace, SearchVerdict, SessionState};
use mpst::{check_process, check_session, decide, project, Env, GlobalType, Participant, Process, Session, SessionType, Verdict};

/// Directory searched for input files that do not exist as given.
const FIXTURES_VAR: &str = "MPST_FIXTURES";

#[derive(Parser)]
#[command(name = "mpst", version, about = "Checks for synchronous multiparty sessions")]
struct Cli {
    /// Print the report as JSON.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a file and print it in canonical form.
    Parse {
        file: PathBuf,
        /// Category; inferred from the extension when omitted.
        #[arg(long = "as", value_enum)]
        category: Option<Kind>,
    },
    /// Decide T <= T', printing a refutation when it fails.
    Subtype { left: PathBuf, right: PathBuf },
    /// Project a global type onto a participant.
    Project { global: PathBuf, participant: String },
    /// Type a process against a session type.
    CheckProc { process: PathBuf, session_type: PathBuf },
    /// Type a session against a global type.
    CheckSession { session: PathBuf, global: PathBuf },
    /// Run a session, always taking the first available step.
    Run {
        session: PathBuf,
        /// Maximum number of steps.
        #[arg(long, default_value_t = 10_000)]
        fuel: usize,
        /// Print every step.
        #[arg(long)]
        trace: bool,
    },
    /// Search all reachable states for a stuck one.
    Stuck {
        session: PathBuf,
        /// Maximum number of distinct states.
        #[arg(long, default_value_t = 10_000)]
        fuel: usize,
    },
    /// The characteristic global type of T for a participant not in T.
    CharGlobal { session_type: PathBuf, participant: String },
    /// The characteristic process of T.
    CharProc { session_type: PathBuf },
    /// Run the characteristic process of T against the environment of T'.
    Precise {
        left: PathBuf,
        right: PathBuf,
        /// Maximum number of distinct states.
        #[arg(long, default_value_t = 10_000)]
        fuel: usize,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Parse { .. } => "parse",
            Command::Subtype { .. } => "subtype",
            Command::Project { .. } => "project",
            Command::CheckProc { .. } => "check-proc",
            Command::CheckSession { .. } => "check-session",
            Command::Run { .. } => "run",
            Command::Stuck { .. } => "stuck",
            Command::CharGlobal { .. } => "char-global",
            Command::CharProc { .. } => "char-proc",
            Command::Precise { .. } => "precise",
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Expr,
    Proc,
    Session,
    Type,
    Global,
}

impl Kind {
    fn category(self) -> Category {
        match self {
            Kind::Expr => Category::Expr,
            Kind::Proc => Category::Process,
            Kind::Session => Category::Session,
            Kind::Type => Category::SessionType,
            Kind::Global => Category::GlobalType,
        }
    }

    fn from_path(path: &Path) -> Option<Kind> {
        match path.extension()?.to_str()? {
            "expr" => Some(Kind::Expr),
            "proc" => Some(Kind::Proc),
            "mps" => Some(Kind::Session),
            "mpst" => Some(Kind::Type),
            "gt" => Some(Kind::Global),
            _ => None,
        }
    }
}

/// A usage, input or parse error; exit code 2.
struct Usage(String);

struct Report {
    verdict: String,
    positive: bool,
    text: String,
    witness: Json,
}

impl Report {
    fn new(verdict: impl Into<String>, positive: bool, text: impl Into<String>, witness: Json) -> Self {
        Report { verdict: verdict.into(), positive, text: text.into(), witness }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let name = cli.command.name();
    let mut timings = Timings::default();
    match execute(cli.command, &mut timings) {
        Ok(report) => {
            if cli.json {
                let doc = json!({
                    "command": name,
                    "verdict": report.verdict,
                    "witness": report.witness,
                    "timings": { "parse_ms": timings.parse_ms, "check_ms": timings.check_ms },
                });
                println!("{}", serde_json::to_string_pretty(&doc).expect("json values serialize"));
            } else {
                println!("{}", report.text);
            }
            ExitCode::from(if report.positive { 0 } else { 1 })
        }
        Err(Usage(message)) => {
            if cli.json {
                let doc = json!({ "command": name, "verdict": "error", "witness": message, "timings": null });
                println!("{}", serde_json::to_string_pretty(&doc).expect("json values serialize"));
            } else {
                eprintln!("error: {message}");
            }
            ExitCode::from(2)
        }
    }
}

#[derive(Default)]
struct Timings {
    parse_ms: f64,
    check_ms: f64,
}

fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1000.0
}

/// The file as given, or else under the fixtures directory.
fn resolve(path: &Path) -> PathBuf {
    if path.exists() {
        return path.to_path_buf();
    }
    match (std::env::var_os(FIXTURES_VAR), path.file_name()) {
        (Some(dir), Some(name)) => Path::new(&dir).join(name),
        _ => path.to_path_buf(),
    }
}

fn load(path: &Path, category: Category, timings: &mut Timings) -> Result<Syntax, Usage> {
    let start = Instant::now();
    let path = resolve(path);
    let text = std::fs::read_to_string(&path).map_err(|e| Usage(format!("{}: {e}", path.display())))?;
    let parsed = parse(category, &text).map_err(|e| Usage(format!("{}:{e}", path.display())))?;
    timings.parse_ms += elapsed_ms(start);
    Ok(parsed)
}

fn load_type(path: &Path, timings: &mut Timings) -> Result<SessionType, Usage> {
    match load(path, Category::SessionType, timings)? {
        Syntax::SessionType(t) => Ok(t),
        _ => unreachable!("parsed as a session type"),
    }
}

fn load_global(path: &Path, timings: &mut Timings) -> Result<GlobalType, Usage> {
    match load(path, Category::GlobalType, timings)? {
        Syntax::GlobalType(g) => Ok(g),
        _ => unreachable!("parsed as a global type"),
    }
}

fn load_process(path: &Path, timings: &mut Timings) -> Result<Process, Usage> {
    match load(path, Category::Process, timings)? {
        Syntax::Process(p) => Ok(p),
        _ => unreachable!("parsed as a process"),
    }
}

fn load_session(path: &Path, timings: &mut Timings) -> Result<Session, Usage> {
    match load(path, Category::Session, timings)? {
        Syntax::Session(m) => Ok(m),
        _ => unreachable!("parsed as a session"),
    }
}

fn participant(name: &str) -> Result<Participant, Usage> {
    Participant::try_new(name).ok_or_else(|| Usage(format!("`{name}` is not a participant name")))
}

fn fuel(n: usize) -> Result<usize, Usage> {
    if n == 0 {
        Err(Usage("--fuel must be positive".into()))
    } else {
        Ok(n)
    }
}

fn show_trace(trace: &ReductionTrace) -> String {
    if trace.is_empty() {
        "(no steps: the initial state is stuck)".to_string()
    } else {
        trace.to_string()
    }
}

fn trace_json(trace: &ReductionTrace) -> Json {
    Json::Array(trace.steps.iter().map(|(step, _)| Json::String(step.to_string())).collect())
}

fn execute(command: Command, timings: &mut Timings) -> Result<Report, Usage> {
    match command {
        Command::Parse { file, category } => {
            let kind = category
                .or_else(|| Kind::from_path(&file))
                .ok_or_else(|| Usage(format!("{}: unknown extension; pass --as", file.display())))?;
            let parsed = load(&file, kind.category(), timings)?;
            let text = parsed.to_string();
            Ok(Report::new("ok", true, text.clone(), Json::String(text)))
        }
        Command::Subtype { left, right } => {
            let (t, u) = (load_type(&left, timings)?, load_type(&right, timings)?);
            let start = Instant::now();
            let verdict = decide(&t, &u).map_err(|e| Usage(e.to_string()))?;
            timings.check_ms = elapsed_ms(start);
            Ok(match verdict {
                Verdict::Leq => Report::new("≤", true, "≤", Json::Null),
                Verdict::Nleq(d) => {
                    let tree = d.to_string();
                    Report::new("⋬", false, format!("⋬\n{tree}"), Json::String(tree))
                }
            })
        }
        Command::Project { global, participant: name } => {
            let g = load_global(&global, timings)?;
            let r = participant(&name)?;
            let start = Instant::now();
            let result = project(&g, &r);
            timings.check_ms = elapsed_ms(start);
            Ok(match result {
                Ok(t) => Report::new("ok", true, t.to_string(), Json::String(t.to_string())),
                Err(e) => Report::new("undefined", false, e.to_string(), Json::String(e.to_string())),
            })
        }
        Command::CheckProc { process, session_type } => {
            let (p, t) = (load_process(&process, timings)?, load_type(&session_type, timings)?);
            let start = Instant::now();
            let result = check_process(&Env::new(), &p, &t);
            timings.check_ms = elapsed_ms(start);
            Ok(typing_report(result))
        }
        Command::CheckSession { session, global } => {
            let (m, g) = (load_session(&session, timings)?, load_global(&global, timings)?);
            let start = Instant::now();
            let result = check_session(&m, &g);
            timings.check_ms = elapsed_ms(start);
            Ok(typing_report(result))
        }
        Command::Run { session, fuel: n, trace } => {
            let m = load_session(&session, timings)?;
            let n = fuel(n)?;
            let start = Instant::now();
            let report = run(&m, n, trace);
            timings.check_ms = elapsed_ms(start);
            Ok(report)
        }
        Command::Stuck { session, fuel: n } => {
            let m = load_session(&session, timings)?;
            let n = fuel(n)?;
            let start = Instant::now();
            let report = stuck_search(&SessionState::new(&m), n).map_err(|e| Usage(e.to_string()))?;
            timings.check_ms = elapsed_ms(start);
            let explored = format!("{} states explored", report.explored);
            let verdict = report.verdict.name();
            Ok(match &report.verdict {
                SearchVerdict::StuckFound(t) => {
                    let text = format!("{verdict}\n{}\nstuck at: {}\n{explored}", show_trace(t), t.last());
                    Report::new(verdict, false, text, trace_json(t))
                }
                SearchVerdict::Terminated | SearchVerdict::NoStuckWithinFuel { .. } => {
                    Report::new(verdict, true, format!("{verdict}\n{explored}"), Json::Null)
                }
                SearchVerdict::Diverged { .. } => {
                    Report::new(verdict, false, format!("{verdict}\n{explored}"), Json::Null)
                }
            })
        }
        Command::CharGlobal { session_type, participant: name } => {
            let t = load_type(&session_type, timings)?;
            let p = participant(&name)?;
            let g = char_global(&t, &p).map_err(|e| Usage(e.to_string()))?;
            Ok(Report::new("ok", true, g.to_string(), Json::String(g.to_string())))
        }
        Command::CharProc { session_type } => {
            let t = load_type(&session_type, timings)?;
            let p = char_proc(&t);
            Ok(Report::new("ok", true, p.to_string(), Json::String(p.to_string())))
        }
        Command::Precise { left, right, fuel: n } => {
            let (t, u) = (load_type(&left, timings)?, load_type(&right, timings)?);
            let n = fuel(n)?;
            let start = Instant::now();
            let report = preciseness_check(&t, &u, n).map_err(|e| Usage(e.to_string()))?;
            timings.check_ms = elapsed_ms(start);
            let search = report.search.verdict.name();
            let mut text = vec![
                format!("participant: {}", report.participant),
                format!("session: {}", report.session),
                format!("search: {search} ({} states)", report.search.explored),
            ];
            if let Some(Err(e)) = &report.typed {
                text.push(format!("typing: {e}"));
            }
            let mut witness = json!({ "participant": report.participant.to_string(), "search": search });
            if let SearchVerdict::StuckFound(trace) = &report.search.verdict {
                text.push(format!("stuck trace:\n{}", show_trace(trace)));
                witness["trace"] = trace_json(trace);
            }
            if let Some(d) = report.derivation() {
                text.push(format!("derivation:\n{d}"));
                witness["derivation"] = Json::String(d.to_string());
            }
            let (verdict, positive) = match (report.outcome(), report.verdict.is_leq()) {
                (Outcome::Confirmed, true) => ("≤ safe", true),
                (Outcome::Confirmed, false) => ("⋬ stuck", false),
                (Outcome::Violated, _) => ("violated", false),
                (Outcome::FuelExhausted, _) => ("fuelExhausted", false),
            };
            text.insert(0, verdict.to_string());
            Ok(Report::new(verdict, positive, text.join("\n"), witness))
        }
    }
}

fn typing_report(result: Result<(), mpst::TypeError>) -> Report {
    match result {
        Ok(()) => Report::new("ok", true, "ok", Json::Null),
        Err(e) => Report::new("TypeError", false, e.to_string(), Json::String(e.to_string())),
    }
}

/// Follows the first successor of each state until no step remains or
/// `fuel` steps were taken.
fn run(m: &Session, fuel: usize, trace: bool) -> Report {
    let mut state = SessionState::new(m);
    let mut steps = Vec::new();
    while steps.len() < fuel {
        let Some((step, next)) = step_all(&state).into_iter().next() else { break };
        steps.push(step.to_string());
        state = next;
    }
    let (verdict, positive) = if state.is_terminated() {
        ("terminated", true)
    } else if step_all(&state).is_empty() {
        ("stuck", false)
    } else {
        ("outOfFuel", false)
    };
    let mut text = Vec::new();
    if trace {
        text.extend(steps.iter().cloned());
    }
    text.push(format!("{verdict} after {} steps: {state}", steps.len()));
    let witness = json!({ "steps": steps, "final": state.to_string() });
    Report::new(verdict, positive, text.join("\n"), witness)
}
