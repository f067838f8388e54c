//! `fid`: functional information decomposition from the command line.
//!
//! Exit codes: 0 ok, 2 usage error, 3 input-file error, 4 analysis error.
//! Failures print one line to stderr prefixed `error[usage]:`,
//! `error[input]:` or `error[analysis]:`.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgGroup, Parser, Subcommand, ValueEnum};
use fid_core::completion::{
    CompletionKind, DEFAULT_ALPHAS, DEFAULT_DETERMINISTIC_CAP, DEFAULT_SAMPLES_PER_ALPHA,
};
use fid_core::formats;
use fid_core::{
    analyze_structure, decompose, gen_builtin, ingest, merge_degenerate, merge_dependent_inputs,
    or_xor_partial, sweep, AnySpec, Builtin, CompletionConfig, FidError, FunctionSpec,
    PartialFunctionSpec, SpecDraft,
};

#[derive(Parser)]
#[command(
    name = "fid",
    version,
    about = "Functional information decomposition of discrete functions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Machine,
}

#[derive(Subcommand)]
enum Command {
    /// Decompose a complete spec.
    Analyze {
        spec: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Bound the decomposition of a partial spec over its completions.
    Sweep {
        spec: PathBuf,
        /// Dirichlet samples per alpha.
        #[arg(long, default_value_t = DEFAULT_SAMPLES_PER_ALPHA)]
        samples: usize,
        /// Comma-separated Dirichlet concentrations.
        #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_ALPHAS.to_vec())]
        alphas: Vec<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Enumerate deterministic completions (default).
        #[arg(long, overrides_with = "no_enumerate")]
        enumerate: bool,
        #[arg(long)]
        no_enumerate: bool,
        /// Scan the single unknown row of a binary-output spec on a grid.
        #[arg(long)]
        grid_refine: bool,
        /// Maximum number of deterministic completions to enumerate.
        #[arg(long, default_value_t = DEFAULT_DETERMINISTIC_CAP)]
        cap: usize,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        /// Write the point cloud here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Injectivity classes and state degeneracy of a complete spec.
    Classify {
        spec: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Build a spec from an observation table.
    Ingest {
        observations: PathBuf,
        /// Declare a variable's states, e.g. `--states Weather=Dry,Rain`.
        #[arg(long = "states", value_name = "NAME=A,B,..")]
        states: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a builtin spec (and, or, xor, led_square, gol, majorityK, table1, or_xor).
    Gen {
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Merge degenerate states of a spec or dependent columns of an observation table.
    #[command(group(ArgGroup::new("mode").required(true).args(["degenerate", "dependent"])))]
    Merge {
        path: PathBuf,
        #[arg(long)]
        degenerate: bool,
        /// Two columns of an observation table, by name or index.
        #[arg(long, value_name = "I,J")]
        dependent: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum Failure {
    Usage(String),
    Input(String),
    Analysis(String),
}

impl From<FidError> for Failure {
    fn from(e: FidError) -> Self {
        let msg = e.to_string();
        match e {
            FidError::UnknownBuiltin(_)
            | FidError::InvalidAlpha(_)
            | FidError::InvalidConfig(_)
            | FidError::NoCompletionsRequested => Failure::Usage(msg),
            FidError::SpecIsPartial | FidError::SpecIsComplete => Failure::Input(msg),
            e if e.is_input_error() => Failure::Input(msg),
            _ => Failure::Analysis(msg),
        }
    }
}

type CmdResult = Result<(), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn with_path(path: &Path) -> impl Fn(FidError) -> Failure + '_ {
    move |e| match Failure::from(e) {
        Failure::Input(m) => Failure::Input(format!("{}: {m}", path.display())),
        other => other,
    }
}

fn load_spec(path: &Path) -> Result<AnySpec, Failure> {
    formats::parse_spec(&read(path)?).map_err(with_path(path))
}

fn load_complete(path: &Path) -> Result<FunctionSpec, Failure> {
    match load_spec(path)? {
        AnySpec::Complete(s) => Ok(s),
        AnySpec::Partial(_) => Err(FidError::SpecIsPartial.into()),
    }
}

fn load_partial(path: &Path) -> Result<PartialFunctionSpec, Failure> {
    match load_spec(path)? {
        AnySpec::Partial(p) => Ok(p),
        AnySpec::Complete(_) => Err(FidError::SpecIsComplete.into()),
    }
}

/// Writes `text` to `out`, or to stdout when no path is given.
fn emit(out: Option<&Path>, text: &str) -> CmdResult {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Input(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn json(value: &impl serde::Serialize) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

fn analyze(spec: &Path, format: Format) -> CmdResult {
    let report = decompose(&load_complete(spec)?)?;
    match format {
        Format::Text => print!("{}", formats::render_report(&report)),
        Format::Machine => print!("{}", json(&report)),
    }
    Ok(())
}

fn run_sweep(
    spec: &Path,
    config: CompletionConfig,
    format: Format,
    out: Option<&Path>,
) -> CmdResult {
    let partial = load_partial(spec)?;
    let cloud = sweep(&partial, &config)?;
    if let Some(p) = out {
        emit(Some(p), &formats::write_cloud(&cloud))?;
    }
    match format {
        Format::Text => print!("{}", formats::render_bounds(&cloud)),
        Format::Machine => print!(
            "{}",
            json(&serde_json::json!({
                "source": cloud.source,
                "deterministic": cloud.count(CompletionKind::Deterministic),
                "probabilistic": cloud.count(CompletionKind::Probabilistic),
                "max_entropy": cloud.count(CompletionKind::MaxEntropy),
                "bounds": cloud.bounds,
                "grid_refined": cloud.grid_refined,
                "config": config,
            }))
        ),
    }
    Ok(())
}

fn classify(spec: &Path, format: Format) -> CmdResult {
    let report = analyze_structure(&load_complete(spec)?)?;
    match format {
        Format::Text => print!("{}", formats::render_structure(&report)),
        Format::Machine => print!("{}", json(&report)),
    }
    Ok(())
}

fn parse_states(decls: &[String]) -> Result<BTreeMap<String, Vec<String>>, Failure> {
    let mut map = BTreeMap::new();
    for d in decls {
        let (name, states) = d
            .split_once('=')
            .ok_or_else(|| Failure::Usage(format!("--states expects NAME=A,B,.. but got {d:?}")))?;
        let states: Vec<String> = states.split(',').map(|s| s.trim().to_string()).collect();
        if states.iter().any(String::is_empty) {
            return Err(Failure::Usage(format!("empty state in --states {d:?}")));
        }
        if map.insert(name.trim().to_string(), states).is_some() {
            return Err(Failure::Usage(format!("--states given twice for {name}")));
        }
    }
    Ok(map)
}

/// Prints the report on stdout when the document goes to a file, and on
/// stderr when the document itself goes to stdout.
fn report_and_emit(out: Option<&Path>, report: &str, document: &str) -> CmdResult {
    if out.is_some() {
        print!("{report}");
    } else {
        eprint!("{report}");
    }
    emit(out, document)
}

fn run_ingest(path: &Path, states: &[String], out: Option<&Path>) -> CmdResult {
    let alphabets = parse_states(states)?;
    let table = formats::parse_observations(&read(path)?).map_err(with_path(path))?;
    let ing = ingest(&table, &alphabets).map_err(with_path(path))?;
    let spec = ing.draft.clone().into_spec().map_err(with_path(path))?;
    report_and_emit(
        out,
        &formats::render_ingestion(&ing),
        &formats::write_any_spec(&spec),
    )
}

fn run_gen(name: &str, out: Option<&Path>) -> CmdResult {
    let draft = match name.to_ascii_lowercase().as_str() {
        "or_xor" | "or_xor_partial" => SpecDraft::from(&or_xor_partial()),
        _ => {
            let b: Builtin = name.parse()?;
            SpecDraft::from(&gen_builtin(b)?)
        }
    };
    emit(out, &formats::write_spec(&draft))
}

fn run_merge(
    path: &Path,
    degenerate: bool,
    dependent: Option<&str>,
    out: Option<&Path>,
) -> CmdResult {
    if degenerate {
        let spec = load_complete(path)?;
        let (merged, mapping) = merge_degenerate(&spec)?;
        return report_and_emit(
            out,
            &formats::render_degeneracy_merge(&mapping),
            &formats::write_spec(&SpecDraft::from(&merged)),
        );
    }
    let pair = dependent.expect("clap enforces a mode");
    let table = formats::parse_observations(&read(path)?).map_err(with_path(path))?;
    let (a, b) = pair
        .split_once(',')
        .ok_or_else(|| Failure::Usage(format!("--dependent expects I,J but got {pair:?}")))?;
    let index = |c: &str| {
        table.column_index(c.trim()).ok_or_else(|| {
            Failure::Usage(format!("no column {:?} in {}", c.trim(), path.display()))
        })
    };
    let merged = merge_dependent_inputs(&table, (index(a)?, index(b)?))?;
    report_and_emit(
        out,
        &formats::render_dependent_merge(&merged),
        &formats::write_observations(&merged.table),
    )
}

fn run(cli: Cli) -> CmdResult {
    match cli.command {
        Command::Analyze { spec, format } => analyze(&spec, format),
        Command::Sweep {
            spec,
            samples,
            alphas,
            seed,
            enumerate: _,
            no_enumerate,
            grid_refine,
            cap,
            format,
            out,
        } => {
            let config = CompletionConfig {
                enumerate_deterministic: !no_enumerate,
                samples_per_alpha: samples,
                alphas,
                seed,
                deterministic_cap: cap,
                grid_refine,
            };
            run_sweep(&spec, config, format, out.as_deref())
        }
        Command::Classify { spec, format } => classify(&spec, format),
        Command::Ingest {
            observations,
            states,
            out,
        } => run_ingest(&observations, &states, out.as_deref()),
        Command::Gen { name, out } => run_gen(&name, out.as_deref()),
        Command::Merge {
            path,
            degenerate,
            dependent,
            out,
        } => run_merge(&path, degenerate, dependent.as_deref(), out.as_deref()),
    }
}

fn one_line(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let (tag, code, msg) = match f {
                Failure::Usage(m) => ("usage", 2, m),
                Failure::Input(m) => ("input", 3, m),
                Failure::Analysis(m) => ("analysis", 4, m),
            };
            eprintln!("error[{tag}]: {}", one_line(&msg));
            ExitCode::from(code)
        }
    }
}
