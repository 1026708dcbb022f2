//! `relmod`: describe, fit, test and simulate relational models.
//!
//! Exit codes: 0 success, 1 parse or validation error, 2 solver did not
//! converge, 3 (`fit` only) the MLE does not exist and the augmented
//! estimate was written instead.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use relmod::io::{matrix_to_csv, parse_counts, parse_vector, write_samples_csv};
use relmod::{
    fit_augmented, gof_test, multinomial_cov, pearson_residuals, poisson_cov, run_experiment, ExperimentConfig,
    FitResult, GofReport, LrReference, ModelSpec, ObservedTable, RelationalModel, SamplingScheme, SolverOptions,
    Statistic,
};

const EXIT_INVALID: u8 = 1;
const EXIT_NONCONVERGENCE: u8 = 2;
const EXIT_AUGMENTED: u8 = 3;

#[derive(Parser)]
#[command(name = "relmod", version, about = "Relational models for discrete data")]
struct Cli {
    /// Log progress to standard error.
    #[arg(long, short, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the dimensions, overall-effect flag and kernel basis of a model.
    Describe {
        #[arg(long)]
        model: PathBuf,
    },
    /// Fit a model to observed counts and print the result as JSON.
    Fit {
        #[command(flatten)]
        input: FitInput,
        /// Attach plug-in standard errors and Pearson residuals.
        #[arg(long)]
        with_asymptotics: bool,
        /// Write the plug-in covariance of the estimate to this CSV file.
        #[arg(long, value_name = "CSV")]
        full_cov: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Goodness-of-fit test of a model.
    Test {
        #[command(flatten)]
        input: FitInput,
        #[arg(long, value_enum, default_value_t = StatisticChoice::All)]
        statistic: StatisticChoice,
        /// Print the report as JSON instead of a table.
        #[arg(long)]
        json: bool,
        /// Write the JSON report to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo distribution of the test statistics under a true parameter.
    Simulate {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, value_enum)]
        scheme: Scheme,
        /// True intensities or probabilities, e.g. `5,8,40` or `1/5,2/3,2/15`.
        #[arg(long, allow_hyphen_values = true)]
        truth: String,
        /// Multinomial sample size.
        #[arg(long)]
        n: Option<u64>,
        #[arg(long, default_value_t = 10_000)]
        reps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = StatisticChoice::All)]
        statistic: StatisticChoice,
        /// Worker threads; results do not depend on this.
        #[arg(long)]
        threads: Option<usize>,
        #[command(flatten)]
        solver: SolverArgs,
        /// Write the JSON report to this file.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write per-replicate statistics to this CSV file.
        #[arg(long, value_name = "CSV")]
        samples: Option<PathBuf>,
    },
}

#[derive(Args)]
struct FitInput {
    #[arg(long)]
    model: PathBuf,
    /// Observed counts: whitespace or comma separated, or JSON.
    #[arg(long)]
    data: PathBuf,
    #[arg(long, value_enum)]
    scheme: Scheme,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args)]
struct SolverArgs {
    #[arg(long, default_value_t = SolverOptions::default().tol)]
    tol: f64,
    #[arg(long, default_value_t = SolverOptions::default().max_iter)]
    max_iter: usize,
    #[arg(long, default_value_t = SolverOptions::default().existence_threshold)]
    existence_threshold: f64,
}

impl SolverArgs {
    fn options(&self) -> Result<SolverOptions> {
        if !(self.tol > 0.0) || !(self.existence_threshold >= 0.0) {
            anyhow::bail!(relmod::Error::InvalidArgument(
                "--tol must be positive and --existence-threshold non-negative".into()
            ));
        }
        Ok(SolverOptions {
            tol: self.tol,
            max_iter: self.max_iter,
            existence_threshold: self.existence_threshold,
            ..SolverOptions::default()
        })
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Scheme {
    Poisson,
    Multinomial,
}

impl From<Scheme> for SamplingScheme {
    fn from(s: Scheme) -> Self {
        match s {
            Scheme::Poisson => SamplingScheme::Poisson,
            Scheme::Multinomial => SamplingScheme::Multinomial,
        }
    }
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum StatisticChoice {
    Pearson,
    Lr,
    Bregman,
    All,
}

impl StatisticChoice {
    fn selected(self) -> Vec<Statistic> {
        match self {
            StatisticChoice::Pearson => vec![Statistic::Pearson],
            StatisticChoice::Lr => vec![Statistic::Lr],
            StatisticChoice::Bregman => vec![Statistic::Bregman],
            StatisticChoice::All => Statistic::ALL.to_vec(),
        }
    }
}

#[derive(Serialize)]
struct FitOutput<'a> {
    #[serde(flatten)]
    fit: &'a FitResult,
    #[serde(skip_serializing_if = "Option::is_none")]
    asymptotics: Option<AsymptoticsOutput>,
}

#[derive(Serialize)]
struct AsymptoticsOutput {
    std_errors: Vec<f64>,
    residuals: Vec<f64>,
    rank: usize,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_INVALID)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    env_logger::Builder::new()
        .filter_level(if cli.verbose {
            log::LevelFilter::Info
        } else {
            log::LevelFilter::Warn
        })
        .parse_default_env()
        .init();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            let nonconvergence = e
                .chain()
                .any(|c| matches!(c.downcast_ref(), Some(relmod::Error::NonConvergence { .. })));
            ExitCode::from(if nonconvergence {
                EXIT_NONCONVERGENCE
            } else {
                EXIT_INVALID
            })
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    let verbose = cli.verbose;
    match cli.command {
        Command::Describe { model } => describe(&model),
        Command::Fit {
            input,
            with_asymptotics,
            full_cov,
            out,
        } => fit(&input, with_asymptotics, full_cov.as_deref(), out.as_deref(), verbose),
        Command::Test {
            input,
            statistic,
            json,
            out,
        } => test(&input, statistic, json, out.as_deref(), verbose),
        Command::Simulate {
            model,
            scheme,
            truth,
            n,
            reps,
            seed,
            statistic,
            threads,
            solver,
            out,
            samples,
        } => {
            let mut config = ExperimentConfig::new(scheme.into(), parse_vector(&truth)?, reps, seed);
            config.sample_size = n;
            config.statistics = statistic.selected();
            config.threads = threads;
            config.solver = solver.options()?;
            simulate(&model, &config, out.as_deref(), samples.as_deref(), verbose)
        }
    }
}

fn read(path: &Path, what: &str) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {what} file {}", path.display()))
}

fn load_model(path: &Path) -> Result<RelationalModel> {
    let text = read(path, "model")?;
    let spec = ModelSpec::from_json(&text).with_context(|| format!("in model file {}", path.display()))?;
    spec.build()
        .with_context(|| format!("invalid model in {}", path.display()))
}

fn load_counts(path: &Path) -> Result<ObservedTable> {
    parse_counts(&read(path, "data")?).with_context(|| format!("in data file {}", path.display()))
}

/// Writes `text` to `out`, or to standard output when no path is given.
fn emit(text: &str, out: Option<&Path>, verbose: bool, status: impl FnOnce() -> String) -> Result<()> {
    match out {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))?;
            if verbose {
                println!("{}", status());
            }
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(())
}

fn join<T: ToString>(items: &[T], sep: &str) -> String {
    items.iter().map(T::to_string).collect::<Vec<_>>().join(sep)
}

fn describe(path: &Path) -> Result<u8> {
    let model = load_model(path)?;
    let kernel: Vec<String> = model.kernel_basis().iter().map(|row| join(row, ",")).collect();
    println!(
        "I={} J={} K={} overall_effect={} kernel=[{}]",
        model.num_cells(),
        model.num_effects(),
        model.df(),
        model.overall_effect(),
        kernel.join(";")
    );
    println!("rank={}", model.num_effects());
    println!("cells: {}", join(model.cell_labels(), " "));
    for (j, name) in model.effect_names().iter().enumerate() {
        let cells: Vec<&str> = model
            .effect_cells(j)
            .into_iter()
            .map(|i| model.cell_labels()[i].as_str())
            .collect();
        println!("effect {name}: {}", cells.join(" "));
    }
    Ok(0)
}

fn fit(
    input: &FitInput,
    with_asymptotics: bool,
    full_cov: Option<&Path>,
    out: Option<&Path>,
    verbose: bool,
) -> Result<u8> {
    let model = load_model(&input.model)?;
    let y = load_counts(&input.data)?;
    let scheme = SamplingScheme::from(input.scheme);
    let result = fit_augmented(&model, &y, scheme, &input.solver.options()?)?;
    if !result.existed {
        log::warn!("the MLE does not exist; writing the augmented estimate");
    }

    let mut asymptotics = None;
    if with_asymptotics || full_cov.is_some() {
        let summary = match scheme {
            SamplingScheme::Poisson => poisson_cov(&model, &result.estimate),
            SamplingScheme::Multinomial => {
                multinomial_cov(&model, &result.estimate).map(|s| s.with_sample_size(y.total()))
            }
        }
        .context("asymptotic covariance is not available for this estimate")?;
        if let Some(path) = full_cov {
            let cov = summary.estimate_cov.as_ref().expect("unscaled covariance is set");
            fs::write(path, matrix_to_csv(cov)).with_context(|| format!("cannot write {}", path.display()))?;
        }
        if with_asymptotics {
            let residuals = pearson_residuals(&y.as_f64(), &result.fitted_counts(y.total()))?;
            asymptotics = Some(AsymptoticsOutput {
                std_errors: summary.std_errors.clone().unwrap_or_default(),
                residuals,
                rank: summary.rank,
            });
        }
    }

    let output = FitOutput {
        fit: &result,
        asymptotics,
    };
    let mut text = serde_json::to_string_pretty(&output)?;
    text.push('\n');
    emit(&text, out, verbose, || {
        format!("fit: {} iterations, existed={}", result.iterations, result.existed)
    })?;
    Ok(if result.existed { 0 } else { EXIT_AUGMENTED })
}

fn format_p(report: &GofReport, stat: Statistic) -> String {
    let p = format!("{:.6}", report.p_value(stat));
    if stat == Statistic::Lr && report.lr_reference == LrReference::Unsupported {
        format!("{p}  (chi-squared reference unsupported)")
    } else {
        p
    }
}

fn test(input: &FitInput, choice: StatisticChoice, json: bool, out: Option<&Path>, verbose: bool) -> Result<u8> {
    let model = load_model(&input.model)?;
    let y = load_counts(&input.data)?;
    let report = gof_test(&model, &y, input.scheme.into(), &input.solver.options()?)?;
    if !report.existed {
        log::warn!("the MLE does not exist; statistics use the augmented estimate");
    }
    if json || out.is_some() {
        let mut text = report.to_json();
        text.push('\n');
        emit(&text, out, verbose, || format!("test: df={}", report.df))?;
        return Ok(0);
    }
    println!("{:<10} {:>14} {:>4}  p", "statistic", "value", "df");
    for stat in choice.selected() {
        println!(
            "{:<10} {:>14.6} {:>4}  {}",
            stat.name(),
            report.value(stat),
            report.df,
            format_p(&report, stat)
        );
    }
    Ok(0)
}

fn simulate(
    model_path: &Path,
    config: &ExperimentConfig,
    out: Option<&Path>,
    samples: Option<&Path>,
    verbose: bool,
) -> Result<u8> {
    let model = load_model(model_path)?;
    let report = run_experiment(&model, config)?;
    log::info!(
        "{} replicates in {:.2?}, {} without an MLE",
        report.replicates,
        report.elapsed,
        report.existence_failures
    );
    if let Some(path) = samples {
        let file = fs::File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
        write_samples_csv(std::io::BufWriter::new(file), &report.records)?;
    }
    let mut text = report.to_json();
    text.push('\n');
    emit(&text, out, verbose, || {
        format!(
            "simulate: {} replicates, negative LR fraction {:.4}",
            report.replicates, report.negative_lr_fraction
        )
    })?;
    Ok(0)
}
