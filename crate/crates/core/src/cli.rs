//! Command-line front end.

use crate::kernel::{goal, Config, KernelError, Session, TraceLevel, DEFAULT_BUDGET};
use crate::library::{self, Entry, EntryOutcome, Registry};
use crate::syntax::{self, Pos, SourceFile, Statement};
use crate::term::{Signature, Term};
use crate::transform::{expand_lemmas, proof_stats, ProofStats};
use clap::{Parser, Subcommand, ValueEnum};
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

#[derive(Parser, Debug)]
#[command(name = "holcheck", version, about = "Check proofs with lemmas and definitions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Library of def_lemma/def_definition entries; later libraries may use earlier ones
    #[arg(long = "lib", value_name = "FILE", global = true)]
    pub libs: Vec<PathBuf>,
    /// Steps allowed per statement
    #[arg(long, default_value_t = DEFAULT_BUDGET, global = true,
          value_parser = clap::value_parser!(u64).range(1..))]
    pub budget: u64,
    #[arg(long, value_enum, default_value_t = Trace::Summary, global = true)]
    pub trace: Trace,
    /// Output file, or a directory when there are several inputs
    #[arg(short = 'o', value_name = "FILE", global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Subcommand, Debug, Clone, PartialEq, Eq)]
pub enum Command {
    /// Check every statement
    Check(Files),
    /// Inline all lemmas
    Expand(Files),
    /// Bundle library entries into each proof
    Package(Files),
    /// Print proof sizes
    Stats(Files),
    /// Reprint in canonical form
    Fmt(Files),
}

#[derive(clap::Args, Debug, Clone, PartialEq, Eq)]
pub struct Files {
    #[arg(required = true, value_name = "FILE")]
    pub files: Vec<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    Check,
    Expand,
    Package,
    Stats,
    Fmt,
}

impl Command {
    fn split(&self) -> (Kind, &[PathBuf]) {
        match self {
            Command::Check(f) => (Kind::Check, &f.files),
            Command::Expand(f) => (Kind::Expand, &f.files),
            Command::Package(f) => (Kind::Package, &f.files),
            Command::Stats(f) => (Kind::Stats, &f.files),
            Command::Fmt(f) => (Kind::Fmt, &f.files),
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Trace {
    Quiet,
    Summary,
    Trace,
}

impl From<Trace> for TraceLevel {
    fn from(t: Trace) -> TraceLevel {
        match t {
            Trace::Quiet => TraceLevel::Quiet,
            Trace::Summary => TraceLevel::Summary,
            Trace::Trace => TraceLevel::Trace,
        }
    }
}

/// Process exit status; the run reports the largest one seen.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Status {
    Ok = 0,
    Failure = 1,
    Error = 2,
    Resource = 3,
}

impl Status {
    fn of_kernel_error(e: &KernelError) -> Status {
        match e {
            KernelError::Resource(_) => Status::Resource,
            KernelError::Validity(_) | KernelError::Pattern(_) => Status::Error,
        }
    }
}

/// Everything a command has to say about one input.
#[derive(Default)]
struct Output {
    out: String,
    err: String,
    /// Text for the output file, for commands that write one.
    file: Option<String>,
    status: Option<Status>,
}

impl Output {
    fn raise(&mut self, s: Status) {
        self.status = Some(self.status.map_or(s, |t| t.max(s)));
    }

    fn status(&self) -> Status {
        self.status.unwrap_or(Status::Ok)
    }
}

/// Loaded and checked libraries.
struct Libraries {
    signature: Signature,
    registry: Registry,
}

/// Parse `args` (program name first) and run; returns the exit code.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli, out, err),
        Err(e) => {
            let code = if e.use_stderr() { Status::Error as i32 } else { 0 };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{}", text) } else { write!(out, "{}", text) };
            code
        }
    }
}

pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    run_status(cli, out, err) as i32
}

fn run_status(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Status {
    let (kind, files) = cli.command.split();
    let needs_output = matches!(kind, Kind::Expand | Kind::Package | Kind::Fmt);
    if needs_output && cli.output.is_none() {
        let _ = writeln!(err, "error: this command writes a file; give one with -o");
        return Status::Error;
    }
    if needs_output && files.len() > 1 && !cli.output.as_deref().is_some_and(Path::is_dir) {
        let _ = writeln!(err, "error: with several inputs, -o must name an existing directory");
        return Status::Error;
    }
    let config = Config {
        budget: cli.budget,
        trace: cli.trace.into(),
    };
    let check_libs = matches!(kind, Kind::Check | Kind::Package);
    let mut head = Output::default();
    let libs = load_libraries(&cli.libs, check_libs, &config, &mut head);
    let _ = write!(out, "{}", head.out);
    let _ = write!(err, "{}", head.err);
    let Some(libs) = libs else {
        return head.status();
    };
    let mut status = head.status();

    let results: Vec<Output> = std::thread::scope(|sc| {
        let handles: Vec<_> = files
            .iter()
            .map(|f| {
                let (libs, config) = (&libs, &config);
                sc.spawn(move || process(kind, f, libs, config))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|p| std::panic::resume_unwind(p)))
            .collect()
    });

    for (path, r) in files.iter().zip(results) {
        let _ = write!(out, "{}", r.out);
        let _ = write!(err, "{}", r.err);
        status = status.max(r.status());
        if let (Some(text), Some(dest)) = (&r.file, &cli.output) {
            let dest = if dest.is_dir() {
                dest.join(path.file_name().unwrap_or_default())
            } else {
                dest.clone()
            };
            if let Err(e) = std::fs::write(&dest, text) {
                let _ = writeln!(err, "{}: cannot write: {}", dest.display(), e);
                status = status.max(Status::Error);
            }
        }
    }
    status
}

fn load_libraries(paths: &[PathBuf], check: bool, config: &Config, o: &mut Output) -> Option<Libraries> {
    let mut signature = Signature::builtin();
    let mut registry = Registry::default();
    for path in paths {
        let text = match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => {
                let _ = writeln!(o.err, "{}: cannot read: {}", path.display(), e);
                o.raise(Status::Error);
                return None;
            }
        };
        let file = match syntax::parse(&text, &signature) {
            Ok(f) => f,
            Err(e) => {
                let _ = writeln!(o.err, "{}:{}", path.display(), e);
                o.raise(Status::Error);
                return None;
            }
        };
        match library::load_library(&file).and_then(|r| registry.extend(r)) {
            Ok(()) => signature = file.signature,
            Err(e) => {
                let _ = writeln!(o.err, "{}:{}", path.display(), e);
                o.raise(Status::Error);
                return None;
            }
        }
        if check {
            let mut session = Session::new(config.clone());
            if library::install(&registry, &mut session).is_err() {
                o.raise(Status::Error);
                return None;
            }
            for outcome in library::check_library(&mut registry, &mut session) {
                report_entry(&path.display().to_string(), &outcome, config, o);
            }
            if o.status() > Status::Ok {
                return None;
            }
        }
    }
    Some(Libraries { signature, registry })
}

fn report_entry(path: &str, e: &EntryOutcome, config: &Config, o: &mut Output) {
    let what = format!("{}:{}: {}", path, e.pos, e.name);
    match &e.result {
        Ok(r) if r.success() => {
            if config.trace > TraceLevel::Quiet {
                let _ = writeln!(o.out, "{}: ok ({} steps)", what, r.stats.steps);
            }
        }
        Ok(r) => {
            let _ = writeln!(o.out, "{}: FAILED", what);
            let _ = writeln!(
                o.err,
                "{}: entry does not check: {}",
                what,
                r.reason.as_deref().unwrap_or("no proof found")
            );
            if let Some(n) = &e.note {
                let _ = writeln!(o.err, "{}: note: {}", what, n);
            }
            describe_failure(r, config, o);
            o.raise(Status::Failure);
        }
        Err(k) => {
            let _ = writeln!(o.out, "{}: ERROR", what);
            let _ = writeln!(o.err, "{}: {}", what, k);
            o.raise(Status::of_kernel_error(k));
        }
    }
}

fn describe_failure(r: &crate::kernel::CheckReport, config: &Config, o: &mut Output) {
    if let Some(g) = &r.failed_goal {
        let _ = writeln!(o.err, "    could not prove: {}", g);
    }
    if config.trace >= TraceLevel::Trace {
        for (i, g) in r.trace.iter().enumerate() {
            let _ = writeln!(o.err, "    {:>3}. {}", i + 1, g);
        }
    }
}

fn process(cmd: Kind, path: &Path, libs: &Libraries, config: &Config) -> Output {
    let mut o = Output::default();
    let name = path.display().to_string();
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            let _ = writeln!(o.err, "{}: cannot read: {}", name, e);
            o.raise(Status::Error);
            return o;
        }
    };
    let file = match syntax::parse(&text, &libs.signature) {
        Ok(f) => f,
        Err(e) => {
            let _ = writeln!(o.err, "{}:{}", name, e);
            o.raise(Status::Error);
            return o;
        }
    };
    match cmd {
        Kind::Check => check_file(&name, &file, libs, config, &mut o),
        Kind::Expand => {
            let stmts: Vec<Statement> = file
                .statements
                .iter()
                .map(|s| match s {
                    Statement::Solve { goal } => Statement::Solve {
                        goal: expand_lemmas(goal),
                    },
                    other => other.clone(),
                })
                .collect();
            o.file = Some(syntax::print_file(&stmts));
        }
        Kind::Package => package_file(&name, &file, libs, config, &mut o),
        Kind::Stats => {
            for (s, pos) in file.statements.iter().zip(&file.positions) {
                if let Statement::Solve { goal } = s {
                    let st = goal_stats(goal);
                    let _ = writeln!(
                        o.out,
                        "{}:{}: nodes {} (tree {}), lemmas {}, definitions {}, depth {}",
                        name, pos, st.shared_nodes, st.tree_nodes, st.lemma_count, st.def_count, st.max_depth
                    );
                }
            }
        }
        Kind::Fmt => o.file = Some(syntax::print_file(&file.statements)),
    }
    o
}

/// Proof statistics summed over the proofs of a goal.
pub fn goal_stats(g: &Term) -> ProofStats {
    goal::proofs(g).into_iter().map(proof_stats).fold(ProofStats::default(), |a, b| ProofStats {
        shared_nodes: a.shared_nodes + b.shared_nodes,
        tree_nodes: a.tree_nodes.saturating_add(b.tree_nodes),
        lemma_count: a.lemma_count + b.lemma_count,
        def_count: a.def_count + b.def_count,
        max_depth: a.max_depth.max(b.max_depth),
    })
}

/// A session holding the libraries, plus the registry extended with the
/// file's own entries as they are checked.
fn check_statements(
    name: &str,
    file: &SourceFile,
    libs: &Libraries,
    config: &Config,
    o: &mut Output,
    mut on_goal: impl FnMut(&mut Session, &Registry, &Term, Pos, &mut Output),
) -> Registry {
    let mut session = Session::new(config.clone());
    let mut registry = libs.registry.clone();
    if let Err(e) = library::install(&registry, &mut session) {
        let _ = writeln!(o.err, "{}: {}", name, e);
        o.raise(Status::Error);
        return registry;
    }
    for (i, (s, pos)) in file.statements.iter().zip(&file.positions).enumerate() {
        match s {
            Statement::TypeDecl { .. } | Statement::InfixDecl { .. } => {}
            Statement::Solve { goal } => on_goal(&mut session, &registry, goal, *pos, o),
            _ => {
                let entry = library::entry_of(s).expect("entry statement");
                if let Err(e) = registry.clone().add(entry.clone(), *pos) {
                    let _ = writeln!(o.err, "{}:{}", name, e);
                    o.raise(Status::Error);
                    continue;
                }
                // a failing entry is dropped so later entries are not blamed for it
                let mut trial = registry.clone();
                trial.add(entry, *pos).expect("name was free");
                let mut ok = true;
                for mut outcome in library::check_library(&mut trial, &mut session) {
                    ok &= outcome.success();
                    if !outcome.success() && outcome.note.is_none() {
                        outcome.note = later_use(&file.statements[i + 1..], &trial, &outcome.name);
                    }
                    report_entry(name, &outcome, config, o);
                }
                if ok {
                    registry = trial;
                }
            }
        }
    }
    registry
}

/// A note naming a later entry of the file that the failing entry uses.
fn later_use(rest: &[Statement], reg: &Registry, failed: &str) -> Option<String> {
    let entry = reg.get(failed)?;
    rest.iter()
        .filter_map(library::entry_of)
        .map(|e| e.name().name.to_string())
        .find(|n| entry.mentions(n))
        .map(|n| format!("it uses `{}`, which is stored only later in the file", n))
}

fn check_file(name: &str, file: &SourceFile, libs: &Libraries, config: &Config, o: &mut Output) {
    check_statements(name, file, libs, config, o, |session, _, goal, pos, o| {
        match session.check(goal) {
            Ok(r) if r.success() => {
                if config.trace > TraceLevel::Quiet {
                    let s = &r.stats;
                    let _ = writeln!(
                        o.out,
                        "{}:{}: ok ({} steps, {} clauses, store depth {})",
                        name, pos, s.steps, s.clauses_pushed, s.max_store_depth
                    );
                }
            }
            Ok(r) => {
                let _ = writeln!(o.out, "{}:{}: FAILED", name, pos);
                let _ = writeln!(
                    o.err,
                    "{}:{}: proof does not check: {}",
                    name,
                    pos,
                    r.reason.as_deref().unwrap_or("no proof found")
                );
                describe_failure(&r, config, o);
                o.raise(Status::Failure);
            }
            Err(e) => {
                let _ = writeln!(o.out, "{}:{}: ERROR", name, pos);
                let _ = writeln!(o.err, "{}:{}: {}", name, pos, e);
                o.raise(Status::of_kernel_error(&e));
            }
        }
    });
}

fn package_file(name: &str, file: &SourceFile, libs: &Libraries, config: &Config, o: &mut Output) {
    let mut goals = Vec::new();
    let registry = check_statements(name, file, libs, config, o, |_, _, goal, pos, _| {
        goals.push((goal.clone(), pos));
    });
    if o.status() > Status::Ok {
        return;
    }
    let bound: Vec<&str> = registry.entries().iter().map(|e: &Entry| &*e.name().name).collect();
    let mut stmts = Vec::new();
    for s in &file.statements {
        match s {
            Statement::TypeDecl { name, .. } if bound.contains(&name.as_str()) => {}
            Statement::TypeDecl { .. } | Statement::InfixDecl { .. } => stmts.push(s.clone()),
            _ => {}
        }
    }
    for (g, pos) in goals {
        match library::package_goal(&g, &registry) {
            Ok(p) => stmts.push(Statement::Solve { goal: p }),
            Err(e) => {
                let _ = writeln!(o.err, "{}:{}: {}", name, pos, e);
                o.raise(Status::Error);
            }
        }
    }
    o.file = Some(syntax::print_file(&stmts));
}
