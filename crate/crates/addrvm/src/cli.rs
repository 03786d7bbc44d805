//! Command-line interface.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use addrvm_core::ae::{ae_check, AeConfig, AeVerdict};
use addrvm_core::context::ExtMachine;
use addrvm_core::lambda;
use addrvm_core::reduction::{EquivVerdict, Normalizer};
use addrvm_core::vm::{self, Outcome};
use addrvm_core::AddressTable;
use anyhow::{anyhow, bail, Context as _};
use clap::{Parser, Subcommand, ValueEnum};

use crate::format::{self, Item};
use crate::session::Session;

/// Exit codes.
pub mod exit {
    pub const OK: u8 = 0;
    pub const DISTINCT: u8 = 1;
    pub const UNKNOWN: u8 = 2;
    pub const INPUT: u8 = 3;
}

#[derive(Debug, Parser)]
#[command(name = "addrvm", version, about = "Run and compare addressing machines")]
pub struct Cli {
    /// Session file whose definitions are available to the command.
    #[arg(long, global = true)]
    pub session: Option<PathBuf>,
    /// Print every intermediate state.
    #[arg(long, global = true)]
    pub trace: bool,
    /// Print the address table after the command.
    #[arg(long, global = true)]
    pub dump_table: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    /// Compare normal forms.
    Eval,
    /// Compare behaviour on fresh arguments.
    Ae,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check every definition of a session file.
    Validate { file: PathBuf },
    /// Head-reduce a machine.
    Run {
        operand: String,
        #[arg(long, default_value_t = vm::DEFAULT_FUEL)]
        fuel: usize,
    },
    /// Compile a lambda term under a variable context.
    Compile {
        term: String,
        /// Comma-separated context variables.
        #[arg(long, value_delimiter = ',')]
        ctx: Vec<String>,
    },
    /// Compare two machines.
    Equiv {
        a: String,
        b: String,
        #[arg(long, value_enum, default_value_t = Mode::Eval)]
        mode: Mode,
        #[arg(long, default_value_t = 3)]
        depth: usize,
        #[arg(long, default_value_t = vm::DEFAULT_FUEL)]
        fuel: usize,
        /// In ae mode, tell a stuck machine apart from a divergent one.
        #[arg(long)]
        strict_distinct: bool,
    },
    /// Run underlined reduction of a context next to head reduction of the
    /// plugged machine.
    Underline {
        /// File whose last context or hole definition is used.
        #[arg(long)]
        context: PathBuf,
        #[arg(long)]
        machine: String,
        #[arg(long, default_value_t = vm::DEFAULT_FUEL)]
        fuel: usize,
    },
    /// Print the definitions and the address table.
    Dump,
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_session(session: &mut Session<'_>, path: &Path) -> anyhow::Result<()> {
    let doc = format::parse(&read(path)?).with_context(|| path.display().to_string())?;
    session.load_all(&doc).map_err(|(name, e)| anyhow!("{}: {name}: {e}", path.display()))
}

fn dump_table(out: &mut dyn Write, table: &AddressTable) -> anyhow::Result<()> {
    for (a, m) in table.entries() {
        writeln!(out, "{}: {m}", a.id())?;
    }
    Ok(())
}

fn outcome_line(outcome: &Outcome, steps: usize) -> String {
    match outcome {
        Outcome::Final(m) => format!("final after {steps} steps: {m}"),
        Outcome::Stuck(m) => format!("stuck after {steps} steps: {m}"),
        Outcome::OutOfFuel(m) => format!("out of fuel after {steps} steps: {m}"),
        Outcome::Cycle(m, a) => format!("cycle after {steps} steps at {a}: {m}"),
    }
}

/// Runs a parsed command line, writing to `out`. Errors are input errors.
pub fn execute(cli: &Cli, out: &mut dyn Write) -> anyhow::Result<u8> {
    let table = AddressTable::new();
    let mut session = Session::new(&table);
    if let Some(path) = &cli.session {
        load_session(&mut session, path)?;
    }
    let code = match &cli.command {
        Command::Validate { file } => {
            let doc = format::parse(&read(file)?).with_context(|| file.display().to_string())?;
            let mut code = exit::OK;
            for r in session.load(&doc) {
                match r.result {
                    Ok(()) => writeln!(out, "{}: ok", r.name)?,
                    Err(e) => {
                        code = exit::INPUT;
                        writeln!(out, "{}: error: {e}", r.name)?;
                    }
                }
            }
            code
        }
        Command::Run { operand, fuel } => {
            let a = session.operand(operand)?;
            let m = table.lookup(a)?;
            let t = vm::trace(&table, &m, *fuel);
            if cli.trace {
                for (i, s) in t.states.iter().enumerate() {
                    writeln!(out, "{i}: {s}")?;
                }
            }
            writeln!(out, "{}", outcome_line(&t.outcome, t.steps()))?;
            match t.outcome {
                Outcome::OutOfFuel(_) => exit::UNKNOWN,
                _ => exit::OK,
            }
        }
        Command::Compile { term, ctx } => {
            let t = session.parse_term(term)?;
            let m = lambda::compile(&table, &t, ctx)?;
            let a = table.intern(&m)?;
            writeln!(out, "{a}: {m}")?;
            exit::OK
        }
        Command::Equiv { a, b, mode, depth, fuel, strict_distinct } => {
            let (a, b) = (session.operand(a)?, session.operand(b)?);
            match mode {
                Mode::Eval => match Normalizer::new(&table, *fuel).eval_equiv(a, b)? {
                    EquivVerdict::Equiv => {
                        writeln!(out, "equiv")?;
                        exit::OK
                    }
                    EquivVerdict::Distinct(w) => {
                        writeln!(out, "distinct: {w}")?;
                        exit::DISTINCT
                    }
                    EquivVerdict::Unknown(why) => {
                        writeln!(out, "unknown({why})")?;
                        exit::UNKNOWN
                    }
                },
                Mode::Ae => {
                    let cfg = AeConfig { fuel: *fuel, depth: *depth, strict_distinct: *strict_distinct };
                    match ae_check(&table, a, b, cfg)? {
                        AeVerdict::EquivUpTo(d) => {
                            writeln!(out, "equiv: up to depth {d}")?;
                            exit::OK
                        }
                        AeVerdict::Distinct(w) => {
                            writeln!(out, "distinct: {w}")?;
                            exit::DISTINCT
                        }
                        AeVerdict::Unknown(why) => {
                            writeln!(out, "unknown({why})")?;
                            exit::UNKNOWN
                        }
                    }
                }
            }
        }
        Command::Underline { context, machine, fuel } => {
            let doc = format::parse_body(&read(context)?).with_context(|| context.display().to_string())?;
            let Some(name) = doc
                .items
                .iter()
                .rev()
                .find(|i| matches!(i, Item::Context { .. } | Item::Hole { .. }))
                .map(|i| i.name().to_string())
            else {
                bail!("{} defines no context", context.display());
            };
            session.load_all(&doc).map_err(|(n, e)| anyhow!("{}: {n}: {e}", context.display()))?;
            let c: ExtMachine = session.context(&name).expect("just defined").clone();
            let m = table.lookup(session.operand(machine)?)?;
            let ext = session.ext();
            writeln!(out, "context {name}: {c}")?;
            writeln!(out, "occurrences: {}", ext.occ(&c)?)?;
            let r = ext.correspondence(&c, &m, *fuel)?;
            if cli.trace {
                for (i, (u, p)) in r.pairs.iter().enumerate() {
                    writeln!(out, "{i}: {u}  ~  {p}")?;
                }
            }
            let state = if r.finished { "finished" } else { "cut off" };
            if r.agrees {
                writeln!(out, "agrees over {} states ({state})", r.pairs.len())?;
                exit::OK
            } else {
                writeln!(out, "disagrees at state {}", r.pairs.len() - 1)?;
                exit::DISTINCT
            }
        }
        Command::Dump => {
            for (name, b) in session.definitions() {
                match b {
                    crate::session::Binding::Machine(a) => writeln!(out, "{name} = {a}")?,
                    crate::session::Binding::Context(c) => writeln!(out, "{name} = context {c}")?,
                }
            }
            if !cli.dump_table {
                dump_table(out, &table)?;
            }
            exit::OK
        }
    };
    if cli.dump_table {
        dump_table(out, &table)?;
    }
    Ok(code)
}
