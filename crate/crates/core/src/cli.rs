//! The `gatecheck` command line.
//!
//! Exit status: 0 on success, 1 when the analysis finds a problem (invalid
//! program, failing logic check, refused distance query), 2 on usage or
//! I/O errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::circuit::{compile, Compiled};
use crate::distance::min_distance;
use crate::export::{export_nest, Format};
use crate::logic::{logical_operators, truth_table, verify_gate, TrialOptions};
use crate::nest::{build_nests, enumerate_error_locations, Nest};
use crate::program::{parse_program, validate_program, Diagnostic, GateName, NestKind, Program, Schedule};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "gatecheck", version, about = "Distance and logic checks for lattice surgery style surface code programs")]
pub struct Cli {
    /// More log output; repeat for more.
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug)]
pub struct Common {
    /// Program file.
    pub program: PathBuf,
    /// Repetitions of every repeating frame; defaults to twice the distance
    /// the lattice size allows.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub rounds: Option<u32>,
    /// CNOT order, a permutation of NWES.
    #[arg(long)]
    pub schedule: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum NestChoice {
    Primal,
    Dual,
    Both,
}

impl NestChoice {
    fn kinds(self) -> &'static [NestKind] {
        match self {
            NestChoice::Primal => &[NestKind::Primal],
            NestChoice::Dual => &[NestKind::Dual],
            NestChoice::Both => &NestKind::BOTH,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FormatChoice {
    SceneJson,
    Obj,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TableChoice {
    Identity,
    Hadamard,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Parse and check a program.
    Validate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        json: bool,
    },
    /// Shortest undetected error chains between boundaries.
    Distance {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        json: bool,
        #[arg(long, value_enum, default_value = "both")]
        nest: NestChoice,
        /// Also report the most probable chain for this per-location error probability.
        #[arg(long, value_name = "P")]
        weighted: Option<f64>,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write nests as scene files named `<stem>.<nest>.<ext>`.
    Export {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "both")]
        nest: NestChoice,
        #[arg(long, value_enum, default_value = "scene-json")]
        format: FormatChoice,
        /// Output directory.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Run the truth table of the program's gate on noiseless trials.
    VerifyLogic {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u32).range(1..))]
        trials: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Truth table to check instead of the program's `gate` line.
        #[arg(long, value_enum)]
        table: Option<TableChoice>,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

/// Result of a subcommand: exit status once the output is written.
type Outcome = Result<i32, i32>;

impl Io<'_> {
    fn usage(&mut self, msg: impl std::fmt::Display) -> i32 {
        let _ = writeln!(self.err, "error: {msg}");
        EXIT_USAGE
    }

    fn warn(&mut self, msg: impl std::fmt::Display) {
        let _ = writeln!(self.err, "warning: {msg}");
    }

    fn emit(&mut self, out: Option<&Path>, text: &str) -> Outcome {
        match out {
            Some(path) => std::fs::write(path, text).map_err(|e| self.usage(format!("{}: {e}", path.display()))),
            None => self.out.write_all(text.as_bytes()).map_err(|e| self.usage(e)),
        }
        .map(|_| EXIT_OK)
    }

    fn load(&mut self, c: &Common) -> Result<Program, i32> {
        let text = std::fs::read_to_string(&c.program)
            .map_err(|e| self.usage(format!("{}: {e}", c.program.display())))?;
        let mut p = parse_program(&text).map_err(|e| {
            self.diagnostics(&c.program, &e.0);
            EXIT_FAILURE
        })?;
        if let Some(s) = &c.schedule {
            p.schedule = Some(s.parse::<Schedule>().map_err(|e| self.usage(format!("--schedule: {e}")))?);
        }
        Ok(p)
    }

    fn diagnostics(&mut self, path: &Path, ds: &[Diagnostic]) {
        for d in ds {
            let _ = match d.line {
                0 => writeln!(self.err, "{}: {}", path.display(), d.message),
                _ => writeln!(self.err, "{}:{d}", path.display()),
            };
        }
    }
}

fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}

/// Everything `validate` checks, as diagnostics: the static rules, then
/// scheduling, set assignment and nest construction.
pub fn check_program(p: &Program, rounds: u32) -> Vec<Diagnostic> {
    let mut ds = validate_program(p);
    if !ds.is_empty() {
        return ds;
    }
    let c = match compile(p, rounds) {
        Ok(c) => c,
        Err(e) => return vec![Diagnostic::new(0, 0, e.to_string())],
    };
    if let Err(e) = build_nests(&c, &enumerate_error_locations(&c.circuit)) {
        ds.push(Diagnostic::new(0, 0, e.to_string()));
    }
    if !p.logicals.is_empty() {
        if let Err(e) = logical_operators(&c) {
            ds.push(Diagnostic::new(0, 0, e.to_string()));
        }
    }
    ds
}

fn prepare(io: &mut Io, common: &Common) -> Result<(Compiled, Nest, Nest), i32> {
    let p = io.load(common)?;
    let rounds = common.rounds.unwrap_or_else(|| p.default_rounds());
    let ds = validate_program(&p);
    if !ds.is_empty() {
        io.diagnostics(&common.program, &ds);
        return Err(EXIT_FAILURE);
    }
    let fail = |io: &mut Io, msg: String| {
        let _ = writeln!(io.err, "{}: {msg}", common.program.display());
        EXIT_FAILURE
    };
    let c = compile(&p, rounds).map_err(|e| fail(io, e.to_string()))?;
    let (primal, dual, stats) =
        build_nests(&c, &enumerate_error_locations(&c.circuit)).map_err(|e| fail(io, e.to_string()))?;
    if stats.cliques > 0 {
        io.warn(format!("{} faults light up more than two balls in one nest", stats.cliques));
    }
    Ok((c, primal, dual))
}

fn pick<'a>(choice: NestChoice, primal: &'a Nest, dual: &'a Nest) -> Vec<&'a Nest> {
    choice.kinds().iter().map(|k| if *k == NestKind::Primal { primal } else { dual }).collect()
}

fn validate(io: &mut Io, common: &Common, as_json: bool) -> Outcome {
    #[derive(Serialize)]
    struct Report<'a> {
        schema: u32,
        program: String,
        valid: bool,
        diagnostics: &'a [Diagnostic],
    }
    let p = io.load(common)?;
    let rounds = common.rounds.unwrap_or_else(|| p.default_rounds());
    let ds = check_program(&p, rounds);
    if as_json {
        let r = Report { schema: 1, program: common.program.display().to_string(), valid: ds.is_empty(), diagnostics: &ds };
        io.emit(None, &json(&r))?;
    } else {
        io.diagnostics(&common.program, &ds);
        if ds.is_empty() {
            let _ = writeln!(io.out, "{}: ok", common.program.display());
        }
    }
    Ok(if ds.is_empty() { EXIT_OK } else { EXIT_FAILURE })
}

fn distance(io: &mut Io, common: &Common, as_json: bool, nest: NestChoice, weighted: Option<f64>, out: Option<&Path>) -> Outcome {
    if let Some(w) = weighted {
        if !(w > 0.0 && w <= 1.0) {
            return Err(io.usage("--weighted takes a probability in (0, 1]"));
        }
    }
    let (c, primal, dual) = prepare(io, common)?;
    let report = min_distance(&c.program, &pick(nest, &primal, &dual), c.rounds, weighted).map_err(|e| {
        let _ = writeln!(io.err, "{}: {e}", common.program.display());
        EXIT_FAILURE
    })?;
    for n in &report.nests {
        if n.distance.is_none() {
            io.warn(format!("no failure pair of the {} nest is connected", n.nest));
        }
    }
    let text = if as_json { json(&report) } else { format!("{report}\n") };
    io.emit(out, &text)
}

fn export(io: &mut Io, common: &Common, nest: NestChoice, format: FormatChoice, out: &Path) -> Outcome {
    let (c, primal, dual) = prepare(io, common)?;
    let format = match format {
        FormatChoice::SceneJson => Format::SceneJson,
        FormatChoice::Obj => Format::Obj,
    };
    let stem = common.program.file_stem().map_or("program".into(), |s| s.to_string_lossy().into_owned());
    std::fs::create_dir_all(out).map_err(|e| io.usage(format!("{}: {e}", out.display())))?;
    for n in pick(nest, &primal, &dual) {
        let path = out.join(format!("{stem}.{}.{}", n.kind.name(), format.extension()));
        io.emit(Some(&path), &export_nest(&c.program, n, format))?;
        let _ = writeln!(io.out, "wrote {}", path.display());
    }
    Ok(EXIT_OK)
}

struct LogicArgs<'a> {
    trials: u32,
    seed: u64,
    table: Option<TableChoice>,
    json: bool,
    out: Option<&'a Path>,
}

fn verify_logic(io: &mut Io, common: &Common, a: LogicArgs) -> Outcome {
    let p = io.load(common)?;
    let gate = match (a.table, p.gate) {
        (Some(TableChoice::Identity), _) => GateName::Identity,
        (Some(TableChoice::Hadamard), _) => GateName::Hadamard,
        (None, Some(g)) => g,
        (None, None) => return Err(io.usage(crate::logic::LogicError::NoTable)),
    };
    let ds = validate_program(&p);
    if !ds.is_empty() {
        io.diagnostics(&common.program, &ds);
        return Err(EXIT_FAILURE);
    }
    let rounds = common.rounds.unwrap_or_else(|| p.default_rounds());
    let fail = |io: &mut Io, msg: String| {
        let _ = writeln!(io.err, "{}: {msg}", common.program.display());
        EXIT_FAILURE
    };
    let c = compile(&p, rounds).map_err(|e| fail(io, e.to_string()))?;
    let ops = logical_operators(&c).map_err(|e| fail(io, e.to_string()))?;
    let report = verify_gate(&c, &ops, gate, &truth_table(gate), a.trials, a.seed, TrialOptions::default());
    let text = if a.json { json(&report) } else { format!("{report}\n") };
    io.emit(a.out, &text)?;
    Ok(if report.pass { EXIT_OK } else { EXIT_FAILURE })
}

/// Runs the command line with the given arguments (including the program
/// name) and returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    let _ = env_logger::Builder::new().filter_level(log_level(cli.verbose)).parse_default_env().try_init();
    let mut io = Io { out, err };
    let result = match &cli.command {
        Command::Validate { common, json } => validate(&mut io, common, *json),
        Command::Distance { common, json, nest, weighted, out } => {
            distance(&mut io, common, *json, *nest, *weighted, out.as_deref())
        }
        Command::Export { common, nest, format, out } => export(&mut io, common, *nest, *format, out),
        Command::VerifyLogic { common, trials, seed, table, json, out } => verify_logic(
            &mut io,
            common,
            LogicArgs { trials: *trials, seed: *seed, table: *table, json: *json, out: out.as_deref() },
        ),
    };
    result.unwrap_or_else(|code| code)
}

/// Log level for `-v` counts.
pub fn log_level(verbose: u8) -> log::LevelFilter {
    match verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        2 => log::LevelFilter::Debug,
        _ => log::LevelFilter::Trace,
    }
}
