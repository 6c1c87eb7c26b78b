use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use csys::bayesnet::{bochman_bn, WeightConvention};
use csys::detsem::{
    causal_worlds, knows_that_with_diagnostics, knows_why, provides_demonstrations,
};
use csys::dsl::{
    emit_json, parse_formula, parse_json, parse_system, print_det, print_maxent, Model,
    ParsedSystem, SCHEMA_VERSION,
};
use csys::intervene::{do_knows, do_prob, modify_det, modify_maxent, InterventionAssignment};
use csys::loglin::{Distribution, LogLinearModel};
use csys::maxent::{
    causal_semantics, knows_why_prob, provides_demonstrations_prob, that_semantics, CptMode,
    SemanticsOptions, WhyAnswer,
};
use csys::system::validate_det;
use csys::{Alphabet, DetCausalSystem, Error, Formula, MaxEntCausalSystem};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Logit,
    Maxent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Convention {
    Logit,
    Paper,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Text,
    Json,
}

/// Causal systems: causal worlds, knowledge, interventions and
/// max-entropy semantics.
#[derive(Debug, Parser)]
#[command(name = "csys", version)]
struct Cli {
    /// How component tables are built from rule weights.
    #[arg(long, global = true, value_enum, default_value = "logit")]
    mode: Mode,
    /// Weight convention used when converting a Bayesian network.
    #[arg(long, global = true, value_enum, default_value = "logit")]
    convention: Convention,
    /// Largest alphabet that may be enumerated (at most 30).
    #[arg(long, global = true, env = "CSYS_ATOM_CAP", default_value_t = csys::alphabet::DEFAULT_ATOM_CAP)]
    cap: usize,
    /// Convergence tolerance of the entropy solver.
    #[arg(long, global = true, default_value_t = csys::maxent::solver::DEFAULT_TOLERANCE)]
    tolerance: f64,
    #[arg(long, global = true, value_enum, default_value = "text")]
    output: OutputFormat,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// List the causal worlds.
    Worlds { file: PathBuf },
    /// Truth in every causal world (probability for max-entropy systems).
    KnowsThat { expr: String, file: PathBuf },
    /// Knowledge-why of a formula.
    KnowsWhy { expr: String, file: PathBuf },
    /// Whether the system provides demonstrations.
    Check { file: PathBuf },
    /// Intervene, e.g. `do "~sprinkler, rain"`.
    Do {
        assign: String,
        #[arg(long)]
        query: Option<String>,
        file: PathBuf,
    },
    /// Probability of a formula under the causal semantics.
    Prob {
        expr: String,
        #[arg(long)]
        given: Option<String>,
        file: PathBuf,
    },
    /// Full distribution.
    Semantics { file: PathBuf },
    /// Convert a Bayesian network (JSON) to a max-entropy causal system.
    FromBn { file: PathBuf },
    /// Convert a structural causal model (JSON) to a causal system.
    FromScm { file: PathBuf },
    /// Print the input as JSON.
    ToJson { file: PathBuf },
}

enum Failure {
    Input(String),
    Scale(String),
    Semantic(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match &e {
            Error::CapExceeded { .. } | Error::Undecided(_) => Failure::Scale(e.to_string()),
            Error::InconsistentHardConstraints
            | Error::ZeroEvidence
            | Error::NoDemonstrations(_)
            | Error::InterventionNotFeasible(_)
            | Error::NotKnowledgeWhy { .. }
            | Error::NonFunctional(_)
            | Error::IncoherentWeights(_) => Failure::Semantic(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

type CliResult = std::result::Result<Report, Failure>;

/// Rendered output plus whether the answer counts as negative (exit 1).
struct Report {
    text: String,
    json: Value,
    negative: bool,
}

impl Report {
    fn new(text: String, json: Value) -> Self {
        Report {
            text,
            json,
            negative: false,
        }
    }

    fn negative_if(mut self, cond: bool) -> Self {
        self.negative = cond;
        self
    }
}

enum Loaded {
    Det(String, DetCausalSystem),
    MaxEnt(String, MaxEntCausalSystem),
    LogLinear(LogLinearModel),
}

struct Ctx {
    options: SemanticsOptions,
    convention: WeightConvention,
    cap: usize,
}

fn read(path: &Path) -> std::result::Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))
}

fn is_json(path: &Path) -> bool {
    path.extension().is_some_and(|e| e == "json")
}

fn stem(path: &Path) -> String {
    let s = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let cleaned: String = s
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '_' {
                c
            } else {
                '_'
            }
        })
        .collect();
    if cleaned.starts_with(|c: char| c.is_ascii_alphabetic() || c == '_') {
        cleaned
    } else {
        format!("s_{cleaned}")
    }
}

fn with_cap(ab: &Alphabet, cap: usize) -> std::result::Result<Alphabet, Failure> {
    Ok(ab.with_cap(cap)?)
}

fn load(path: &Path, ctx: &Ctx) -> std::result::Result<Loaded, Failure> {
    let text = read(path)?;
    let loaded = if is_json(path) {
        let name = stem(path);
        match parse_json(&text)? {
            Model::Det(s) => Loaded::Det(name, s),
            Model::MaxEnt(s) => Loaded::MaxEnt(name, s),
            Model::Bn(bn) => Loaded::MaxEnt(name, bochman_bn(&bn, ctx.convention)?),
            Model::Scm(m) => Loaded::Det(name, m.bochman_det()?),
            Model::ProbScm(pm) => Loaded::MaxEnt(name, pm.bochman_prob()?),
            Model::LogLinear(m) => Loaded::LogLinear(m),
        }
    } else {
        let file = parse_system(&text)?;
        match file.system {
            ParsedSystem::Det(s) => Loaded::Det(file.name, s),
            ParsedSystem::MaxEnt(s) => Loaded::MaxEnt(file.name, s),
        }
    };
    Ok(match loaded {
        Loaded::Det(n, mut s) => {
            s.alphabet = with_cap(&s.alphabet, ctx.cap)?;
            Loaded::Det(n, s)
        }
        Loaded::MaxEnt(n, mut s) => {
            s.alphabet = with_cap(&s.alphabet, ctx.cap)?;
            Loaded::MaxEnt(n, s)
        }
        Loaded::LogLinear(m) => {
            let ab = with_cap(m.alphabet(), ctx.cap)?;
            Loaded::LogLinear(m.rebind(ab))
        }
    })
}

/// Nine significant digits, without trailing zeros.
fn show_prob(p: f64) -> String {
    let rounded: f64 = format!("{p:.8e}").parse().unwrap_or(p);
    format!("{rounded}")
}

fn formula(ab: &Alphabet, text: &str) -> std::result::Result<Formula, Failure> {
    Ok(parse_formula(ab, text)?)
}

fn unsupported(command: &str, what: &str) -> Failure {
    Failure::Input(format!("`{command}` is not available for {what}"))
}

fn envelope(command: &str, body: Value) -> Value {
    let mut v = json!({ "version": SCHEMA_VERSION, "command": command });
    if let (Some(obj), Value::Object(extra)) = (v.as_object_mut(), body) {
        obj.extend(extra);
    }
    v
}

fn worlds_report(command: &str, ab: &Alphabet, worlds: &[csys::World]) -> Report {
    let names: Vec<String> = worlds.iter().map(|&w| ab.show_world(w)).collect();
    let sets: Vec<Vec<&str>> = worlds
        .iter()
        .map(|&w| {
            (0..ab.len())
                .filter(|&a| w.get(a))
                .map(|a| ab.name(a))
                .collect()
        })
        .collect();
    let mut text = names.join("\n");
    if !text.is_empty() {
        text.push('\n');
    }
    Report::new(text, envelope(command, json!({ "worlds": sets })))
}

fn distribution_report(command: &str, dist: &Distribution, extra: Value) -> Report {
    let ab = dist.alphabet();
    let mut text = String::new();
    let mut rows = Vec::new();
    for w in dist.support() {
        let p = dist.prob(w);
        text.push_str(&format!("{}\t{}\n", show_prob(p), ab.show_world(w)));
        let atoms: Vec<&str> = (0..ab.len())
            .filter(|&a| w.get(a))
            .map(|a| ab.name(a))
            .collect();
        rows.push(json!({ "world": atoms, "probability": p }));
    }
    let mut body = json!({ "distribution": rows });
    if let (Some(obj), Value::Object(e)) = (body.as_object_mut(), extra) {
        obj.extend(e);
    }
    Report::new(text, envelope(command, body))
}

fn prob_report(command: &str, p: f64, mode: Option<CptMode>) -> Report {
    let mut body = json!({ "probability": p });
    if let Some(m) = mode {
        body["mode"] = json!(m.to_string());
    }
    Report::new(format!("{}\n", show_prob(p)), envelope(command, body))
}

fn bool_report(command: &str, value: bool, notes: Vec<String>) -> Report {
    let mut text = format!("{value}\n");
    for n in &notes {
        text.push_str(&format!("note: {n}\n"));
    }
    Report::new(
        text,
        envelope(command, json!({ "result": value, "notes": notes })),
    )
    .negative_if(!value)
}

fn run(cli: &Cli) -> CliResult {
    if cli.tolerance.is_nan() || cli.tolerance <= 0.0 {
        return Err(Failure::Input("--tolerance must be positive".into()));
    }
    if cli.cap > csys::alphabet::HARD_ATOM_CAP {
        return Err(Failure::Input(format!(
            "--cap must be at most {}",
            csys::alphabet::HARD_ATOM_CAP
        )));
    }
    let mode = match cli.mode {
        Mode::Logit => CptMode::Logit,
        Mode::Maxent => CptMode::MaxEnt,
    };
    let mut options = SemanticsOptions::with_mode(mode);
    options.solver.tolerance = cli.tolerance;
    let ctx = Ctx {
        options,
        convention: match cli.convention {
            Convention::Logit => WeightConvention::Logit,
            Convention::Paper => WeightConvention::Paper,
        },
        cap: cli.cap,
    };
    match &cli.command {
        Command::Worlds { file } => match load(file, &ctx)? {
            Loaded::Det(_, sys) => {
                let w = causal_worlds(&sys)?;
                Ok(worlds_report("worlds", &sys.alphabet, w.worlds()))
            }
            Loaded::MaxEnt(_, sys) => {
                let det = csys::maxent::explanatory_part(&sys);
                let w = causal_worlds(&det)?;
                Ok(worlds_report("worlds", &det.alphabet, w.worlds()))
            }
            Loaded::LogLinear(_) => Err(unsupported("worlds", "a LogLinear model")),
        },
        Command::KnowsThat { expr, file } => match load(file, &ctx)? {
            Loaded::Det(_, sys) => {
                let f = formula(&sys.alphabet, expr)?;
                let (value, diags) = knows_that_with_diagnostics(&sys, &f)?;
                let notes = diags.iter().map(|d| d.to_string()).collect();
                Ok(bool_report("knows-that", value, notes))
            }
            Loaded::MaxEnt(_, sys) => {
                let f = formula(&sys.alphabet, expr)?;
                Ok(prob_report("knows-that", that_semantics(&sys, &f)?, None))
            }
            Loaded::LogLinear(_) => Err(unsupported("knows-that", "a LogLinear model")),
        },
        Command::KnowsWhy { expr, file } => match load(file, &ctx)? {
            Loaded::Det(_, sys) => {
                let f = formula(&sys.alphabet, expr)?;
                Ok(bool_report("knows-why", knows_why(&sys, &f)?, Vec::new()))
            }
            Loaded::MaxEnt(_, sys) => {
                let f = formula(&sys.alphabet, expr)?;
                match knows_why_prob(&sys, &f, &ctx.options)? {
                    WhyAnswer::Why(p) => Ok(prob_report("knows-why", p, Some(mode))),
                    WhyAnswer::NotWhy { causal, restricted } => Ok(Report::new(
                        format!(
                            "not knowledge-why: {} with all observations, {} with premise observations only\n",
                            show_prob(causal),
                            show_prob(restricted)
                        ),
                        envelope(
                            "knows-why",
                            json!({ "why": false, "causal": causal, "restricted": restricted }),
                        ),
                    )
                    .negative_if(true)),
                }
            }
            Loaded::LogLinear(_) => Err(unsupported("knows-why", "a LogLinear model")),
        },
        Command::Check { file } => match load(file, &ctx)? {
            Loaded::Det(_, sys) => {
                let notes = validate_det(&sys).iter().map(|d| d.to_string()).collect();
                Ok(bool_report("check", provides_demonstrations(&sys)?, notes))
            }
            Loaded::MaxEnt(_, sys) => {
                let mut notes: Vec<String> = sys.validate().iter().map(|d| d.to_string()).collect();
                let report = provides_demonstrations_prob(&sys)?;
                notes.extend(report.violations.iter().cloned());
                Ok(bool_report("check", report.holds(), notes))
            }
            Loaded::LogLinear(_) => Err(unsupported("check", "a LogLinear model")),
        },
        Command::Do {
            assign,
            query,
            file,
        } => match load(file, &ctx)? {
            Loaded::Det(_, sys) => {
                let i = InterventionAssignment::parse(&sys.alphabet, assign)?;
                match query {
                    Some(q) => {
                        let f = formula(&sys.alphabet, q)?;
                        let notes = i
                            .diagnostics(&sys.alphabet)
                            .iter()
                            .map(|d| d.to_string())
                            .collect();
                        Ok(bool_report("do", do_knows(&sys, &i, &f)?, notes))
                    }
                    None => {
                        let m = modify_det(&sys, &i);
                        Ok(worlds_report(
                            "do",
                            &m.alphabet,
                            causal_worlds(&m)?.worlds(),
                        ))
                    }
                }
            }
            Loaded::MaxEnt(_, sys) => {
                let i = InterventionAssignment::parse(&sys.alphabet, assign)?;
                match query {
                    Some(q) => {
                        let f = formula(&sys.alphabet, q)?;
                        Ok(prob_report(
                            "do",
                            do_prob(&sys, &i, &f, &ctx.options)?,
                            Some(mode),
                        ))
                    }
                    None => {
                        let m = modify_maxent(&sys, &i);
                        let sem = causal_semantics(&m, &ctx.options)?;
                        Ok(distribution_report(
                            "do",
                            &sem.distribution,
                            json!({ "mode": mode.to_string() }),
                        ))
                    }
                }
            }
            Loaded::LogLinear(_) => Err(unsupported("do", "a LogLinear model")),
        },
        Command::Prob { expr, given, file } => {
            let (dist, mode) = match load(file, &ctx)? {
                Loaded::Det(..) => {
                    return Err(unsupported("prob", "a deterministic system"));
                }
                Loaded::MaxEnt(_, sys) => (
                    causal_semantics(&sys, &ctx.options)?.distribution,
                    Some(mode),
                ),
                Loaded::LogLinear(m) => (m.distribution()?, None),
            };
            let ab = dist.alphabet().clone();
            let f = formula(&ab, expr)?;
            let p = match given {
                Some(g) => {
                    let e = formula(&ab, g)?;
                    dist.conditional(&f, &e).ok_or(Error::ZeroEvidence)?
                }
                None => dist.probability(&f),
            };
            Ok(prob_report("prob", p, mode))
        }
        Command::Semantics { file } => match load(file, &ctx)? {
            Loaded::Det(..) => Err(unsupported("semantics", "a deterministic system")),
            Loaded::MaxEnt(_, sys) => {
                let sem = causal_semantics(&sys, &ctx.options)?;
                let mut report = distribution_report(
                    "semantics",
                    &sem.distribution,
                    json!({ "mode": mode.to_string() }),
                );
                for d in &sem.diagnostics {
                    report.text.push_str(&format!("note: {d}\n"));
                }
                Ok(report)
            }
            Loaded::LogLinear(m) => Ok(distribution_report(
                "semantics",
                &m.distribution()?,
                json!({}),
            )),
        },
        Command::FromBn { file } => {
            let name = stem(file);
            let bn = match parse_json(&read(file)?)? {
                Model::Bn(bn) => bn,
                _ => return Err(Failure::Input("expected a `bn` document".into())),
            };
            let sys = bochman_bn(&bn, ctx.convention)?;
            Ok(system_report(
                "from-bn",
                &name,
                Loaded::MaxEnt(name.clone(), sys),
            ))
        }
        Command::FromScm { file } => {
            let name = stem(file);
            let loaded = match parse_json(&read(file)?)? {
                Model::Scm(m) => Loaded::Det(name.clone(), m.bochman_det()?),
                Model::ProbScm(pm) => Loaded::MaxEnt(name.clone(), pm.bochman_prob()?),
                _ => return Err(Failure::Input("expected an `scm` document".into())),
            };
            Ok(system_report("from-scm", &name, loaded))
        }
        Command::ToJson { file } => {
            let model = if is_json(file) {
                parse_json(&read(file)?)?
            } else {
                match load(file, &ctx)? {
                    Loaded::Det(_, s) => Model::Det(s),
                    Loaded::MaxEnt(_, s) => Model::MaxEnt(s),
                    Loaded::LogLinear(m) => Model::LogLinear(m),
                }
            };
            let text = emit_json(&model);
            let value: Value = serde_json::from_str(&text).expect("emitted JSON parses");
            Ok(Report::new(format!("{text}\n"), value))
        }
    }
}

fn system_report(command: &str, name: &str, loaded: Loaded) -> Report {
    let (text, model) = match loaded {
        Loaded::Det(_, s) => (print_det(name, &s), Model::Det(s)),
        Loaded::MaxEnt(_, s) => (print_maxent(name, &s), Model::MaxEnt(s)),
        Loaded::LogLinear(m) => (String::new(), Model::LogLinear(m)),
    };
    let system: Value = serde_json::from_str(&emit_json(&model)).expect("emitted JSON parses");
    Report::new(text, envelope(command, json!({ "system": system })))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            match cli.output {
                OutputFormat::Text => print!("{}", report.text),
                OutputFormat::Json => println!(
                    "{}",
                    serde_json::to_string_pretty(&report.json).expect("report serializes")
                ),
            }
            if report.negative {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(Failure::Semantic(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Scale(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
