use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use c2ka::algebra::{CheckOptions, Elem};
use c2ka::analysis::{
    env_comm, is_stimuli_connected, pfc, pfc_allowing_self, stimuli_comm, whatif_replace,
    AgentSystem, AnalysisError, CommVerdict, Replacement,
};
use c2ka::dsl::{export_json, import_json, parse_model, serialize_model, ModelDocument};
use c2ka::report::{view_verdict, ReportDocument, WhatifView};

const EXIT_HOLDS: u8 = 0;
const EXIT_NEGATIVE: u8 = 1;
const EXIT_AXIOMS: u8 = 2;
const EXIT_INPUT: u8 = 3;
const EXIT_IO: u8 = 4;
const EXIT_PRECONDITION: u8 = 5;

/// Writes to stdout. A closed pipe ends output silently so that the exit
/// code still reflects the verdict; other write failures are I/O errors.
fn emit(args: std::fmt::Arguments<'_>) {
    use std::io::Write;
    if let Err(e) = std::io::stdout().lock().write_fmt(args) {
        if e.kind() != std::io::ErrorKind::BrokenPipe {
            eprintln!("error: cannot write output: {e}");
            std::process::exit(EXIT_IO.into());
        }
    }
}

macro_rules! out {
    ($($t:tt)*) => { emit(format_args!($($t)*)) };
}

macro_rules! outln {
    ($($t:tt)*) => { emit(format_args!("{}\n", format_args!($($t)*))) };
}

/// Directory searched for model files given by a relative path that does not
/// exist in the working directory.
const FIXTURE_DIR_VAR: &str = "C2KA_FIXTURE_DIR";

#[derive(Parser)]
#[command(
    name = "c2ka",
    version,
    about = "Check C2KA models and analyse potential for communication"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct Relax {
    /// Report failures of the cascaded-output axiom as warnings.
    #[arg(long)]
    relax_cascaded: bool,
    /// Report non-commutative parallel composition as a warning.
    #[arg(long)]
    relax_par_commutativity: bool,
    /// Collect every violation instead of stopping at the first per law.
    #[arg(long)]
    all_violations: bool,
}

impl Relax {
    fn options(self) -> CheckOptions {
        CheckOptions {
            collect_all: self.all_violations,
            par_commutativity_as_warning: self.relax_par_commutativity,
            cascaded_output_as_warning: self.relax_cascaded,
        }
    }
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Format {
    Text,
    Json,
    Dot,
}

#[derive(Subcommand)]
enum Command {
    /// Validate every axiom of a model.
    Check {
        file: PathBuf,
        #[command(flatten)]
        relax: Relax,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Produce the full analysis report.
    Analyze {
        file: PathBuf,
        #[command(flatten)]
        relax: Relax,
        /// Print the report as JSON.
        #[arg(long, conflicts_with_all = ["text", "dot"])]
        json: bool,
        /// Print the report as text (the default).
        #[arg(long, conflicts_with = "dot")]
        text: bool,
        /// Emit the direct communication digraph in DOT.
        #[arg(long)]
        dot: bool,
        /// Analyse even if the model fails its checks.
        #[arg(long)]
        unverified: bool,
    },
    /// Evaluate one relation for one pair of agents.
    Query {
        file: PathBuf,
        #[command(flatten)]
        relax: Relax,
        #[command(flatten)]
        what: QueryKind,
        /// Accept the same agent as source and sink for --pfc.
        #[arg(long)]
        allow_self: bool,
        /// Print the result as JSON.
        #[arg(long)]
        json: bool,
        /// Run even if the model fails its checks.
        #[arg(long)]
        unverified: bool,
    },
    /// Replace the behaviour of a relay agent and recompute.
    Whatif {
        file: PathBuf,
        #[command(flatten)]
        relax: Relax,
        /// The relay agent whose behaviour is replaced.
        #[arg(long)]
        agent: String,
        /// The source agent.
        #[arg(long)]
        from: String,
        /// The sink agent.
        #[arg(long)]
        to: String,
        /// seq:d, choice:d, seqstar, inactive, idle, orbit:c or fixed:c
        #[arg(long)]
        replace: String,
        /// Print the result as JSON.
        #[arg(long)]
        json: bool,
        /// Run even if the model fails its checks.
        #[arg(long)]
        unverified: bool,
    },
    /// Rewrite a model in canonical DSL or JSON form.
    Convert {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "dsl")]
        to: ConvertTarget,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ConvertTarget {
    Dsl,
    Json,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct QueryKind {
    /// Potential for communication from A to B, over any path.
    #[arg(long, num_args = 2, value_names = ["A", "B"])]
    pfc: Option<Vec<String>>,
    /// Potential for communication via stimuli from A to B.
    #[arg(long, num_args = 2, value_names = ["A", "B"])]
    stimuli: Option<Vec<String>>,
    /// Potential for communication via the shared environment from A to B.
    #[arg(long, num_args = 2, value_names = ["A", "B"])]
    env: Option<Vec<String>>,
    /// Whether the stimuli edges leave no agent set isolated from the rest.
    #[arg(long)]
    connected: bool,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

impl From<AnalysisError> for Failure {
    fn from(e: AnalysisError) -> Self {
        let code = match e {
            AnalysisError::HypothesisNotEstablished(_) | AnalysisError::PreconditionUnmet(_) => {
                EXIT_PRECONDITION
            }
            _ => EXIT_INPUT,
        };
        Failure::new(code, e.to_string())
    }
}

fn resolve_path(file: &Path) -> PathBuf {
    if file.exists() || file.is_absolute() {
        return file.to_path_buf();
    }
    if let Some(dir) = std::env::var_os(FIXTURE_DIR_VAR) {
        let candidate = Path::new(&dir).join(file);
        if candidate.exists() {
            return candidate;
        }
    }
    file.to_path_buf()
}

fn load(file: &Path) -> Result<ModelDocument, Failure> {
    let path = resolve_path(file);
    let text = std::fs::read_to_string(&path)
        .map_err(|e| Failure::new(EXIT_IO, format!("{}: {e}", path.display())))?;
    let is_json = path.extension().is_some_and(|x| x == "json");
    if is_json {
        import_json(&text).map_err(|e| Failure::new(EXIT_INPUT, format!("{}: {e}", path.display())))
    } else {
        parse_model(&text).map_err(|e| Failure::new(EXIT_INPUT, format!("{}:{e}", path.display())))
    }
}

/// Loads a system and, unless `unverified`, refuses one that fails its
/// checks.
fn load_system(
    file: &Path,
    opts: &CheckOptions,
    unverified: bool,
) -> Result<(AgentSystem, bool), Failure> {
    let doc = load(file)?;
    let sys = doc.to_system()?;
    let mut report = sys.model.check_all(opts).map_err(AnalysisError::from)?;
    report.merge(sys.dep.verify(&sys.model.cka, opts)?);
    let passed = report.passed();
    if !passed && !unverified {
        let mut msg = String::from("model fails its checks (use --unverified to analyse anyway):");
        for v in &report.violations {
            msg.push_str(&format!("\n  violated {v}"));
        }
        return Err(Failure::new(EXIT_AXIOMS, msg));
    }
    Ok((sys, passed))
}

fn pair(v: &[String]) -> (&str, &str) {
    (&v[0], &v[1])
}

fn print_verdict(sys: &AgentSystem, label: &str, v: &CommVerdict, json: bool) {
    let view = view_verdict(sys, v);
    if json {
        outln!("{}", serde_json_string(&view));
    } else {
        outln!(
            "{label}: {}",
            if v.holds { "holds" } else { "does not hold" }
        );
        if let Some(w) = &view.witness {
            outln!("witness: {}", serde_json_string(w));
        }
    }
}

fn serde_json_string<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("views always serialise")
}

fn parse_replacement(spec: &str, sys: &AgentSystem) -> Result<Replacement, Failure> {
    let elem = |name: &str| -> Result<Elem, Failure> {
        sys.model
            .cka
            .carrier
            .lookup(name)
            .map_err(|_| Failure::new(EXIT_INPUT, format!("unknown behaviour `{name}`")))
    };
    let (kind, arg) = match spec.split_once(':') {
        Some((k, a)) => (k, Some(a)),
        None => (spec, None),
    };
    Ok(match (kind, arg) {
        ("seq", Some(d)) => Replacement::Seq(elem(d)?),
        ("choice", Some(d)) => Replacement::Choice(elem(d)?),
        ("orbit", Some(c)) => Replacement::StrongOrbitMember(elem(c)?),
        ("fixed", Some(c)) => Replacement::FixedPoint(elem(c)?),
        ("seqstar", None) => Replacement::SeqStar,
        ("inactive", None) => Replacement::Inactive,
        ("idle", None) => Replacement::Idle,
        _ => {
            return Err(Failure::new(
                EXIT_INPUT,
                format!("bad replacement `{spec}`: expected seq:d, choice:d, seqstar, inactive, idle, orbit:c or fixed:c"),
            ))
        }
    })
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Check { file, relax, json } => {
            let opts = relax.options();
            let doc = load(&file)?;
            let sys = doc.to_system()?;
            let mut report = sys.model.check_all(&opts).map_err(AnalysisError::from)?;
            report.merge(sys.dep.verify(&sys.model.cka, &opts)?);
            if json {
                outln!(
                    "{}",
                    serde_json::to_string_pretty(&report).expect("reports serialise")
                );
            } else {
                outln!("{}", if report.passed() { "pass" } else { "FAIL" });
                for v in &report.violations {
                    outln!("violated {v}");
                }
                for w in &report.warnings {
                    outln!("warning {w}");
                }
            }
            Ok(if report.passed() {
                EXIT_HOLDS
            } else {
                EXIT_AXIOMS
            })
        }
        Command::Analyze {
            file,
            relax,
            json,
            text: _,
            dot,
            unverified,
        } => {
            let opts = relax.options();
            let (sys, passed) = load_system(&file, &opts, unverified)?;
            let report = ReportDocument::build(&sys, &opts, passed)?;
            let format = if json {
                Format::Json
            } else if dot {
                Format::Dot
            } else {
                Format::Text
            };
            match format {
                Format::Json => outln!("{}", report.to_json()),
                Format::Dot => out!("{}", report.to_dot()),
                Format::Text => out!("{}", report.to_text()),
            }
            Ok(EXIT_HOLDS)
        }
        Command::Query {
            file,
            relax,
            what,
            allow_self,
            json,
            unverified,
        } => {
            let (sys, _) = load_system(&file, &relax.options(), unverified)?;
            let (label, verdict) = if let Some(v) = &what.pfc {
                let (a, b) = pair(v);
                let verdict = if allow_self {
                    pfc_allowing_self(&sys, a, b)?
                } else {
                    pfc(&sys, a, b)?
                };
                (format!("pfc({a}, {b})"), verdict)
            } else if let Some(v) = &what.stimuli {
                let (a, b) = pair(v);
                (format!("stimuli({a}, {b})"), stimuli_comm(&sys, a, b)?)
            } else if let Some(v) = &what.env {
                let (a, b) = pair(v);
                (format!("env({a}, {b})"), env_comm(&sys, a, b)?)
            } else {
                ("stimuli-connected".to_string(), is_stimuli_connected(&sys))
            };
            print_verdict(&sys, &label, &verdict, json);
            Ok(if verdict.holds {
                EXIT_HOLDS
            } else {
                EXIT_NEGATIVE
            })
        }
        Command::Whatif {
            file,
            relax,
            agent,
            from,
            to,
            replace,
            json,
            unverified,
        } => {
            let (sys, _) = load_system(&file, &relax.options(), unverified)?;
            let replacement = parse_replacement(&replace, &sys)?;
            let report = whatif_replace(&sys, &from, &agent, &to, replacement)?;
            let view = WhatifView::new(&sys, &report);
            if json {
                outln!(
                    "{}",
                    serde_json::to_string_pretty(&view).expect("views serialise")
                );
            } else {
                out!("{}", view.to_text());
            }
            Ok(if report.preserved() {
                EXIT_HOLDS
            } else {
                EXIT_NEGATIVE
            })
        }
        Command::Convert { file, to } => {
            let doc = load(&file)?;
            match to {
                ConvertTarget::Dsl => out!("{}", serialize_model(&doc)),
                ConvertTarget::Json => outln!("{}", export_json(&doc)),
            }
            Ok(EXIT_HOLDS)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() {
                EXIT_INPUT
            } else {
                EXIT_HOLDS
            });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
