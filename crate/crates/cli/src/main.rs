use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use symint_cli::{
    cmd_appendix_a, cmd_estimate, cmd_gradcheck, cmd_pca, cmd_simulate, parse_params, CliError,
    EstimateOptions, Format, GradcheckOptions, GradcheckSource, PcaOptions, Report, SimulateOptions,
    OUT_DIR_ENV,
};
use symint_core::{InternalModel, TauParams, DEFAULT_NU};

/// Estimation, simulation and PCA for interval-valued data.
#[derive(Parser)]
#[command(name = "symint", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct ModelArgs {
    /// Internal distribution: uniform, triangular or pert.
    #[arg(long, default_value = "uniform", value_parser = parse_model)]
    model: InternalModel,
    /// Wishart degrees of freedom.
    #[arg(long, default_value_t = DEFAULT_NU)]
    nu: u32,
}

#[derive(Args, Clone)]
struct OutputArgs {
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Directory for output files (default: $SYMINT_OUT_DIR, else no files
    /// for commands that print only).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Estimates for a two-variable interval CSV.
    Estimate {
        input: PathBuf,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Replication study from a key = value configuration file.
    Simulate {
        config: PathBuf,
        /// Overrides the seed in the configuration file.
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Principal components of a p-variable interval CSV.
    Pca {
        input: PathBuf,
        #[command(flatten)]
        model: ModelArgs,
        /// Diagonalize the correlation matrix instead of the covariance.
        #[arg(long)]
        correlation: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Variance and covariance table of the embedded reference data sets.
    AppendixA {
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Analytic versus finite-difference likelihood gradient.
    Gradcheck {
        /// Interval CSV; omit with --synthetic.
        input: Option<PathBuf>,
        /// Draw internal realizations from the model at --params.
        #[arg(long, conflicts_with = "input")]
        synthetic: bool,
        /// Synthetic sample size.
        #[arg(long, default_value_t = 50)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// mu_x,mu_y,sigma2_x,sigma2_y,sigma_xy,gamma1,gamma2,gamma3
        #[arg(long, allow_hyphen_values = true)]
        params: Option<String>,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
}

fn parse_model(s: &str) -> Result<InternalModel, String> {
    s.parse().map_err(|e: symint_core::Error| e.to_string())
}

fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    std::fs::read(path).map_err(|e| CliError::io(format!("cannot read {}: {e}", path.display())))
}

fn out_dir(explicit: &Option<PathBuf>) -> Option<PathBuf> {
    explicit
        .clone()
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display())))
}

fn emit(mut report: Report, output: &OutputArgs, stem: &str, extra: Option<(&str, &str)>) -> Result<(), CliError> {
    report.command = std::env::args().collect::<Vec<_>>().join(" ");
    if let Some(dir) = out_dir(&output.out) {
        write_file(&dir, &format!("{stem}.json"), &report.render(Format::Json))?;
        if let Some((name, body)) = extra {
            write_file(&dir, name, body)?;
        }
    }
    print!("{}", report.render(output.format));
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Estimate { input, model, output } => {
            let bytes = read(&input)?;
            let r = cmd_estimate(&bytes, EstimateOptions { model: model.model, nu: model.nu })?;
            emit(r, &output, "estimate", None)
        }
        Command::Simulate { config, seed, output } => {
            let bytes = read(&config)?;
            let out = cmd_simulate(&bytes, SimulateOptions { seed })?;
            // Study files always go somewhere: the working directory by default.
            let output = OutputArgs {
                out: Some(out_dir(&output.out).unwrap_or_else(|| PathBuf::from("."))),
                ..output
            };
            emit(out.report, &output, "study", Some(("study.csv", &out.csv)))
        }
        Command::Pca { input, model, correlation, output } => {
            let bytes = read(&input)?;
            let out = cmd_pca(&bytes, PcaOptions { model: model.model, nu: model.nu, correlation })?;
            emit(out.report, &output, "pca", Some(("pca_intervals.csv", &out.csv)))
        }
        Command::AppendixA { output } => emit(cmd_appendix_a(), &output, "appendix_a", None),
        Command::Gradcheck { input, synthetic, n, seed, params, model, output } => {
            let tau = match params {
                Some(text) => parse_params(&text, model.nu)?,
                None => TauParams::table2().with_nu(model.nu)?,
            };
            let opts = GradcheckOptions { params: tau, model: model.model };
            let report = match (input, synthetic) {
                (Some(path), false) => {
                    let bytes = read(&path)?;
                    cmd_gradcheck(GradcheckSource::Input(&bytes), opts)?
                }
                (None, true) => cmd_gradcheck(GradcheckSource::Synthetic { n, seed }, opts)?,
                _ => return Err(CliError::validation("give an input file or --synthetic")),
            };
            emit(report, &output, "gradcheck", None)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
