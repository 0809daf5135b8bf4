//! Argument definitions and command dispatch.

use std::io::Write;
use std::path::PathBuf;

use bdt_core::criterion::analyze;
use bdt_core::scenarios::{ellsberg_distributions, list_scenarios, run_all, run_scenario};
use bdt_core::{fair_probability, BoundsConfig, CriterionMode, Error as CoreError, UtilityModel};
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::problem::{ProblemError, ProblemFile};
use crate::report::{FairReport, ReportDocument, ScenarioDocument, SIGNIFICANT_DIGITS};
use crate::series::{distribution_series, fairness_series, utility_series, Series};

/// Directory for series files when `--out` is not given.
pub const OUTPUT_DIR_ENV: &str = "BDT_OUTPUT_DIR";

#[derive(Debug, Parser)]
#[command(
    name = "bdt",
    version,
    about = "Decision analysis with sum-of-bounds utility criteria"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Analyze a problem file.
    Analyze(AnalyzeArgs),
    /// Solve for the fair probability of a certainty bet.
    Fair(FairArgs),
    /// Emit a plot series as CSV.
    Curve(CurveArgs),
    /// Run worked examples and compare against published values.
    Scenario(ScenarioArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    Machine,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    SumOfBounds,
    LowerOnly,
    UpperOnly,
    ExpectationOnly,
}

impl From<Mode> for CriterionMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::SumOfBounds => CriterionMode::SumOfBounds,
            Mode::LowerOnly => CriterionMode::LowerOnly,
            Mode::UpperOnly => CriterionMode::UpperOnly,
            Mode::ExpectationOnly => CriterionMode::ExpectationOnly,
        }
    }
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value = "human")]
    pub format: Format,
    /// Significant digits in human output.
    #[arg(long, default_value_t = SIGNIFICANT_DIGITS)]
    pub precision: usize,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    pub path: PathBuf,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Override the sigma multiplier (sets both premiums).
    #[arg(long)]
    pub k: Option<f64>,
    /// Override the Weber constant of a logarithmic utility.
    #[arg(long)]
    pub q: Option<f64>,
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
}

/// Utility model given on the command line; linear unless a wealth or debt is set.
#[derive(Debug, Args)]
pub struct ModelArgs {
    #[arg(long, conflicts_with_all = ["wealth", "debt"])]
    pub linear: bool,
    /// Income utility around this wealth.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "debt", requires = "q")]
    pub wealth: Option<f64>,
    /// Debt utility around this debt.
    #[arg(long, allow_hyphen_values = true, requires = "q")]
    pub debt: Option<f64>,
    /// Weber constant of the logarithmic utility.
    #[arg(long)]
    pub q: Option<f64>,
    /// Significance threshold of the logarithmic utility.
    #[arg(long)]
    pub gamma: Option<f64>,
}

impl ModelArgs {
    fn model(&self) -> Result<UtilityModel, Failure> {
        let mut model = match (self.wealth, self.debt, self.q) {
            (Some(w), None, Some(q)) => UtilityModel::income(q, w)?,
            (None, Some(d), Some(q)) => UtilityModel::debt(q, d)?,
            (None, None, None) => UtilityModel::linear(),
            _ => return Err(Failure::usage("--q needs --wealth or --debt")),
        };
        if let Some(g) = self.gamma {
            model = model.with_gamma(g)?;
        }
        Ok(model)
    }
}

#[derive(Debug, Args)]
pub struct FairArgs {
    /// Certain outcome.
    #[arg(long, allow_hyphen_values = true)]
    pub oc: f64,
    /// Outcome of the uncertain branch, paid with probability p.
    #[arg(long, allow_hyphen_values = true)]
    pub ou: f64,
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = 1.0)]
    pub k: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SeriesKind {
    /// Fair probability against O_c / O_u.
    Fairness,
    /// Utility against change in wealth.
    Utility,
    /// Net-return distribution of an urn bet.
    Ellsberg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Urn {
    Known,
    Unknown,
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    #[arg(long, value_enum, default_value = "fairness")]
    pub series: SeriesKind,
    #[arg(long, allow_hyphen_values = true, default_value_t = 5000.0)]
    pub ou: f64,
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = 1.0)]
    pub k: f64,
    /// Number of grid intervals.
    #[arg(long, default_value_t = 1000)]
    pub grid: usize,
    #[arg(long, allow_hyphen_values = true, default_value_t = -200.0)]
    pub from: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 200.0)]
    pub to: f64,
    #[arg(long, value_enum, default_value = "known")]
    pub urn: Urn,
    /// Output file; defaults to $BDT_OUTPUT_DIR/<series>.csv, else stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ScenarioArgs {
    #[arg(required_unless_present_any = ["all", "list"], conflicts_with_all = ["all", "list"])]
    pub id: Option<String>,
    #[arg(long, conflicts_with = "list")]
    pub all: bool,
    #[arg(long)]
    pub list: bool,
    /// Show every check, not only misses.
    #[arg(long, short)]
    pub verbose: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// A failed command and its exit status.
#[derive(Debug)]
pub enum Failure {
    Io(String),
    /// Parse, schema or argument problems, and unknown scenario ids.
    Usage(String),
    Domain(String),
    NoRoot(String),
    /// Scenarios ran but some value missed its tolerance.
    ScenarioMiss,
}

impl Failure {
    fn usage(msg: impl Into<String>) -> Self {
        Failure::Usage(msg.into())
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Io(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Domain(_) => 3,
            Failure::NoRoot(_) => 4,
            Failure::ScenarioMiss => 5,
        }
    }

    pub fn message(&self) -> Option<&str> {
        match self {
            Failure::Io(m) | Failure::Usage(m) | Failure::Domain(m) | Failure::NoRoot(m) => Some(m),
            Failure::ScenarioMiss => None,
        }
    }
}

impl From<CoreError> for Failure {
    fn from(e: CoreError) -> Self {
        let msg = e.to_string();
        if e.is_domain_error() {
            Failure::Domain(msg)
        } else if matches!(e.root(), CoreError::NoFairProbability { .. }) {
            Failure::NoRoot(msg)
        } else {
            Failure::Usage(msg)
        }
    }
}

impl From<ProblemError> for Failure {
    fn from(e: ProblemError) -> Self {
        match e {
            ProblemError::Core(core) => core.into(),
            other => Failure::Usage(other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

pub fn run(cli: Cli, out: &mut dyn Write) -> Result<(), Failure> {
    match cli.command {
        Command::Analyze(args) => analyze_cmd(args, out),
        Command::Fair(args) => fair_cmd(args, out),
        Command::Curve(args) => curve_cmd(args, out),
        Command::Scenario(args) => scenario_cmd(args, out),
    }
}

fn analyze_cmd(args: AnalyzeArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let problem = ProblemFile::load(&args.path)?.validate()?;
    let mut model = problem.model;
    if let Some(q) = args.q {
        if !model.is_logarithmic() {
            return Err(Failure::usage("--q applies only to logarithmic utilities"));
        }
        model = model.with_q(q)?;
    }
    let mut cfg = problem.config;
    if let Some(k) = args.k {
        cfg = cfg.with_premiums(k, k);
    }
    if let Some(mode) = args.mode {
        cfg = cfg.with_mode(mode.into());
    }
    let analyses = analyze(problem.decisions, &model, &cfg)?;
    let doc = ReportDocument::new(&analyses, &model, &cfg);
    match args.output.format {
        Format::Human => out.write_all(doc.to_human(args.output.precision).as_bytes())?,
        Format::Machine => out.write_all(doc.to_machine().as_bytes())?,
    }
    Ok(())
}

fn fair_cmd(args: FairArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let model = args.model.model()?;
    let cfg = BoundsConfig::k_sigma(args.k);
    let result = fair_probability(args.oc, args.ou, &model, &cfg)?;
    let report = FairReport::new(&result, &model, &cfg);
    match args.output.format {
        Format::Human => out.write_all(report.to_human(args.output.precision).as_bytes())?,
        Format::Machine => out.write_all(report.to_machine().as_bytes())?,
    }
    Ok(())
}

fn curve_cmd(args: CurveArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let model = args.model.model()?;
    let series: Series = match args.series {
        SeriesKind::Fairness => fairness_series(args.ou, &model, &BoundsConfig::k_sigma(args.k), args.grid)?,
        SeriesKind::Utility => utility_series(&model, args.from, args.to, args.grid)?,
        SeriesKind::Ellsberg => {
            let dists = ellsberg_distributions()?;
            let (name, d) = match args.urn {
                Urn::Known => ("known 50/50 urn", &dists[0].1),
                Urn::Unknown => ("urn of unknown composition", &dists[1].1),
            };
            distribution_series(format!("net return of 100 draws at fee 50, {name}"), d)
        }
    };
    let name = match args.series {
        SeriesKind::Fairness => "fairness",
        SeriesKind::Utility => "utility",
        SeriesKind::Ellsberg => "ellsberg",
    };
    let target = args
        .out
        .or_else(|| std::env::var_os(OUTPUT_DIR_ENV).map(|dir| PathBuf::from(dir).join(format!("{name}.csv"))));
    match target {
        Some(path) => {
            let file = std::fs::File::create(&path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
            series.write_csv(std::io::BufWriter::new(file))?;
        }
        None => series.write_csv(out)?,
    }
    Ok(())
}

fn scenario_cmd(args: ScenarioArgs, out: &mut dyn Write) -> Result<(), Failure> {
    if args.list {
        for info in list_scenarios() {
            writeln!(out, "{:<20} {}", info.id, info.description)?;
        }
        return Ok(());
    }
    let reports = match &args.id {
        Some(id) => vec![run_scenario(id)?],
        None => run_all()?,
    };
    let doc = ScenarioDocument::new(reports);
    match args.output.format {
        Format::Human => out.write_all(doc.to_human(args.output.precision, args.verbose).as_bytes())?,
        Format::Machine => out.write_all(doc.to_machine().as_bytes())?,
    }
    if doc.passed {
        Ok(())
    } else {
        Err(Failure::ScenarioMiss)
    }
}
