//! Argument definitions and command execution.
//!
//! Exit codes: 0 success, 1 usage or I/O error, 2 invalid description,
//! 3 a hidden-weak-element warning fired during `compare`.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use netagg::{
    aggregate, compare_methods, derive_priorities, group_by_priority, sweep, Basis, FallbackMethod, HierarchyNode64,
    Method, MethodConfig64, Normalization, PriorityStrategy, RollupError,
};
use thiserror::Error;

use crate::description::{parse_file, LoadError, SystemDescription};
use crate::format;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_WARNING: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "netagg", version, about = "Aggregated quality evaluation of hierarchical network systems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Aggregate the system; without --method and without a hierarchy, compare all methods.
    Evaluate(EvaluateArgs),
    /// Side-by-side comparison of every method with hidden-weak-element warnings.
    Compare(CompareArgs),
    /// Vary one element over a range and tabulate the aggregates as CSV.
    Sweep(SweepArgs),
    /// Derive element priorities from the network section.
    Priorities(PrioritiesArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Wem,
    Wlam,
    Nam,
    Hybrid,
    WemThen,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Wem => Method::Wem,
            MethodArg::Wlam => Method::Wlam,
            MethodArg::Nam => Method::Nam,
            MethodArg::Hybrid => Method::HybridGrouped,
            MethodArg::WemThen => Method::WemThen,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ThenArg {
    Wlam,
    Nam,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    Degree,
    Betweenness,
    Flow,
    Combined,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum NormalizeArg {
    #[default]
    Max,
    None,
}

#[derive(Debug, Args)]
pub struct MethodArgs {
    /// Apply one method to all elements, ignoring any hierarchy.
    #[arg(long, value_enum)]
    pub method: Option<MethodArg>,
    /// Critical elements for wem-then (comma separated); defaults to the top-priority group.
    #[arg(long, value_delimiter = ',')]
    pub critical: Option<Vec<String>>,
    /// Method wem-then applies to all elements.
    #[arg(long, value_enum)]
    pub then: Option<ThenArg>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub method: MethodArgs,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Warn when (wlam - wem) / wlam exceeds this value.
    #[arg(long, default_value_t = 0.5, value_parser = unit_interval)]
    pub threshold: f64,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Element whose evaluation is varied.
    #[arg(long)]
    pub vary: String,
    #[arg(long, allow_negative_numbers = true)]
    pub from: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub to: f64,
    /// Number of grid points, both ends included.
    #[arg(long, value_parser = clap::value_parser!(u32).range(2..))]
    pub steps: u32,
    /// Output file; standard output if omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub method: MethodArgs,
}

#[derive(Debug, Args)]
pub struct PrioritiesArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub strategy: StrategyArg,
    /// Also group nodes whose priorities differ by at most this much.
    #[arg(long)]
    pub group_tolerance: Option<f64>,
    #[arg(long, value_enum, default_value_t)]
    pub normalize: NormalizeArg,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

fn unit_interval(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(format!("{v} is outside [0, 1]"))
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Invalid(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => EXIT_USAGE,
            CliError::Invalid(_) => EXIT_INVALID,
        }
    }
}

impl From<LoadError> for CliError {
    fn from(e: LoadError) -> Self {
        match e {
            LoadError::Io { .. } => CliError::Io(e.to_string()),
            LoadError::Parse(p) => CliError::Invalid(p.to_string()),
        }
    }
}

impl From<RollupError> for CliError {
    fn from(e: RollupError) -> Self {
        match e {
            RollupError::TooFewSteps(_) => CliError::Usage(e.to_string()),
            other => CliError::Invalid(other.to_string()),
        }
    }
}

fn io_error(e: std::io::Error) -> CliError {
    CliError::Io(e.to_string())
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, O, E>(args: I, stdout: &mut O, stderr: &mut E) -> i32
where
    I: IntoIterator,
    I::Item: Into<OsString> + Clone,
    O: Write,
    E: Write,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    match execute(&cli.command, stdout) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute<O: Write>(command: &Command, out: &mut O) -> Result<i32, CliError> {
    match command {
        Command::Evaluate(a) => evaluate(a, out),
        Command::Compare(a) => compare(a, out),
        Command::Sweep(a) => run_sweep(a, out),
        Command::Priorities(a) => priorities(a, out),
    }
}

fn load(path: &Path) -> Result<SystemDescription, CliError> {
    Ok(parse_file(path)?)
}

/// Method for a description without hierarchy: hybrid when groups are
/// declared, weighted mean otherwise.
pub fn default_method(desc: &SystemDescription) -> Method {
    if desc.groups.is_some() {
        Method::HybridGrouped
    } else {
        Method::Wlam
    }
}

/// All elements under one root aggregated with `method`.
pub fn flat_tree(
    desc: &SystemDescription,
    method: Method,
    critical: Option<&[String]>,
    then: Option<ThenArg>,
) -> Result<HierarchyNode64, CliError> {
    if method != Method::WemThen && (critical.is_some() || then.is_some()) {
        return Err(CliError::Usage("--critical and --then only apply to --method wem-then".into()));
    }
    let config = match method {
        Method::HybridGrouped => {
            let groups =
                desc.group_list().ok_or_else(|| CliError::Invalid("hybrid method needs a groups section".into()))?;
            MethodConfig64::hybrid(groups)
        }
        Method::WemThen => {
            let critical = match critical {
                Some(ids) => ids.to_vec(),
                None => top_group(desc)
                    .ok_or_else(|| CliError::Invalid("wem-then needs --critical or a groups section".into()))?,
            };
            let fallback = match then {
                Some(ThenArg::Nam) => FallbackMethod::Nam,
                _ => FallbackMethod::Wlam,
            };
            MethodConfig64::wem_then(critical, fallback)
        }
        m => MethodConfig64::new(m),
    };
    Ok(desc.flat_tree(config))
}

// Members of the highest-priority group (first declared on ties).
fn top_group(desc: &SystemDescription) -> Option<Vec<String>> {
    let groups = desc.groups.as_ref()?;
    let best = groups.iter().fold(None::<&crate::description::GroupSpec>, |best, g| match best {
        Some(b) if b.priority >= g.priority => Some(b),
        _ => Some(g),
    })?;
    Some(best.members.clone())
}

/// The tree a command works on: the forced method over all elements, else
/// the declared hierarchy, else the default flat tree.
fn select_tree(desc: &SystemDescription, m: &MethodArgs) -> Result<HierarchyNode64, CliError> {
    match m.method {
        Some(method) => flat_tree(desc, method.into(), m.critical.as_deref(), m.then),
        None if m.critical.is_some() || m.then.is_some() => {
            Err(CliError::Usage("--critical and --then require --method wem-then".into()))
        }
        None => match desc.hierarchy_tree() {
            Some(tree) => Ok(tree),
            None => flat_tree(desc, default_method(desc), None, None),
        },
    }
}

fn evaluate<O: Write>(a: &EvaluateArgs, out: &mut O) -> Result<i32, CliError> {
    let desc = load(&a.input)?;
    let scale = desc.scale();
    if a.method.method.is_none() && desc.hierarchy.is_none() {
        let tree = select_tree(&desc, &a.method)?;
        let rows = compare_methods(&tree, &scale, 0.5)?;
        write_comparison(&rows, a.format, out)?;
        return Ok(EXIT_OK);
    }
    let tree = select_tree(&desc, &a.method)?;
    let report = aggregate(&tree, &scale)?;
    let text = match a.format {
        Format::Text => format::report_text(&report),
        Format::Json => format::json(&report),
        Format::Csv => format::report_csv(&report),
    };
    out.write_all(text.as_bytes()).map_err(io_error)?;
    Ok(EXIT_OK)
}

fn write_comparison<O: Write>(rows: &[netagg::ComparisonRow64], fmt: Format, out: &mut O) -> Result<(), CliError> {
    let text = match fmt {
        Format::Text => format::comparison_text(rows),
        Format::Json => format::json(rows),
        Format::Csv => format::comparison_csv(rows),
    };
    out.write_all(text.as_bytes()).map_err(io_error)
}

fn compare<O: Write>(a: &CompareArgs, out: &mut O) -> Result<i32, CliError> {
    let desc = load(&a.input)?;
    let tree = match desc.hierarchy_tree() {
        Some(tree) => tree,
        None => flat_tree(&desc, default_method(&desc), None, None)?,
    };
    let rows = compare_methods(&tree, &desc.scale(), a.threshold)?;
    write_comparison(&rows, a.format, out)?;
    Ok(if rows.iter().any(|r| !r.warnings.is_empty()) { EXIT_WARNING } else { EXIT_OK })
}

fn run_sweep<O: Write>(a: &SweepArgs, out: &mut O) -> Result<i32, CliError> {
    let desc = load(&a.input)?;
    if desc.element(&a.vary).is_none() {
        return Err(CliError::Invalid(format!("unknown element id {}", a.vary)));
    }
    let tree = select_tree(&desc, &a.method)?;
    let rows = sweep(&tree, &desc.scale(), &a.vary, a.from, a.to, a.steps as usize)?;
    let csv = format::sweep_csv(&rows);
    match &a.out {
        Some(path) => {
            std::fs::write(path, csv).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?
        }
        None => out.write_all(csv.as_bytes()).map_err(io_error)?,
    }
    Ok(EXIT_OK)
}

fn priorities<O: Write>(a: &PrioritiesArgs, out: &mut O) -> Result<i32, CliError> {
    let desc = load(&a.input)?;
    let net = desc.network_model().ok_or_else(|| CliError::Invalid("description has no network section".into()))?;
    let basis = match a.strategy {
        StrategyArg::Degree => Basis::Degree,
        StrategyArg::Betweenness => Basis::Betweenness,
        StrategyArg::Flow => Basis::FlowVolume,
        StrategyArg::Combined => Basis::Combined,
    };
    let defaults = PriorityStrategy::with_basis(basis);
    let normalization = match a.normalize {
        NormalizeArg::Max => Normalization::MaxToOne,
        NormalizeArg::None => Normalization::None,
    };
    let strategy =
        PriorityStrategy::new(basis, defaults.tie_break().to_vec(), normalization).expect("distinct tie-breaks");
    let ranking = derive_priorities(&net, &strategy).map_err(|e| CliError::Invalid(e.to_string()))?;
    let groups = a.group_tolerance.map(|t| group_by_priority(&ranking.priorities(), t));
    let text = match a.format {
        Format::Text => format::ranking_text(&ranking.entries, groups.as_deref()),
        Format::Json => format::json(&serde_json::json!({
            "basis": ranking.basis,
            "entries": ranking.entries,
            "groups": groups.as_ref().map(|gs| gs.iter().map(|g| serde_json::json!({
                "id": g.id, "members": g.members, "priority": g.priority,
            })).collect::<Vec<_>>()),
        })),
        Format::Csv => {
            let mut s = String::from("rank,node,score,priority\n");
            for e in &ranking.entries {
                s.push_str(&format!("{},{},{:.6},{:.6}\n", e.rank, e.id, e.score, e.priority));
            }
            s
        }
    };
    out.write_all(text.as_bytes()).map_err(io_error)?;
    Ok(EXIT_OK)
}
