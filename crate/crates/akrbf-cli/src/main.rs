use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use akrbf_cli::config::{build_configs, ArmSelection, CliOverrides};
use akrbf_cli::error::CliError;
use akrbf_cli::experiment::{format_summary_table, run_experiment, run_suite, ExperimentKind};
use akrbf_cli::gradcheck::{gradcheck, REL_TOLERANCE};

/// RBF network experiments with an adaptively fused Gaussian/cosine kernel.
#[derive(Parser)]
#[command(name = "akrbf", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Config file (flat key = value sections; see README).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comparison arm: cosine, euclidean, manual, adaptive, or all.
    #[arg(long)]
    arm: Option<String>,
    /// Seed for data generation and sample shuffling.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory for trace.csv, predictions.csv, summary.csv.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Training epochs.
    #[arg(long)]
    epochs: Option<usize>,
    /// Learning rate.
    #[arg(long)]
    eta: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Nonlinear plant identification (step-excited synthetic series).
    Sysid(CommonArgs),
    /// Binary classification from a CSV dataset.
    Classify {
        #[command(flatten)]
        common: CommonArgs,
        /// Dataset CSV (alternative to data.csv in the config file).
        #[arg(long)]
        data: Option<PathBuf>,
        /// Target column: a header name, or #N for a 0-based index.
        #[arg(long)]
        target_column: Option<String>,
        /// Column holding 'train'/'test' row tags.
        #[arg(long)]
        split_column: Option<String>,
        /// Also write kernel_map.csv: the two-center kernel-space
        /// embedding of every sample.
        #[arg(long)]
        emit_kernel_map: bool,
    },
    /// 2-D function approximation on a training/testing grid pair.
    Approx(CommonArgs),
    /// Compare the analytical mixing gradient against finite differences.
    Gradcheck {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
    },
}

fn overrides_from(common: &CommonArgs) -> CliOverrides {
    CliOverrides {
        seed: common.seed,
        out: common.out.clone(),
        epochs: common.epochs,
        eta: common.eta,
        ..CliOverrides::default()
    }
}

fn run_task(
    kind: ExperimentKind,
    common: &CommonArgs,
    overrides: CliOverrides,
) -> Result<(), CliError> {
    let arm_selection = match &common.arm {
        Some(text) => Some(ArmSelection::parse(text)?),
        None => None,
    };
    let configs = build_configs(kind, arm_selection, common.config.as_deref(), &overrides)?;

    if configs.len() == 1 {
        let summary = run_experiment(&configs[0])?;
        print!("{}", format_summary_table(std::slice::from_ref(&summary)));
        println!("outputs: {}", configs[0].output_dir.display());
    } else {
        let summaries = run_suite(&configs)?;
        print!("{}", format_summary_table(&summaries));
        let root = configs[0]
            .output_dir
            .parent()
            .unwrap_or(&configs[0].output_dir);
        println!("outputs: {}", root.display());
    }
    Ok(())
}

fn real_main() -> Result<(), CliError> {
    let cli = Cli::parse();
    match cli.command {
        Command::Sysid(common) => {
            let overrides = overrides_from(&common);
            run_task(ExperimentKind::SysId, &common, overrides)
        }
        Command::Approx(common) => {
            let overrides = overrides_from(&common);
            run_task(ExperimentKind::Approx, &common, overrides)
        }
        Command::Classify {
            common,
            data,
            target_column,
            split_column,
            emit_kernel_map,
        } => {
            let mut overrides = overrides_from(&common);
            overrides.data_csv = data;
            overrides.target_column = target_column;
            overrides.split_column = split_column;
            overrides.emit_kernel_map = emit_kernel_map;
            run_task(ExperimentKind::Classify, &common, overrides)
        }
        Command::Gradcheck { seed, trials } => {
            if trials == 0 {
                return Err(CliError::Config("trials must be >= 1".into()));
            }
            let report = gradcheck(seed, trials);
            println!(
                "gradcheck: {} trials, max relative error {:.3e} (worst trial {}), tolerance {:.0e}",
                report.trials, report.max_rel_error, report.worst_trial, REL_TOLERANCE
            );
            if report.passed() {
                println!("gradcheck: PASS");
                Ok(())
            } else {
                Err(CliError::Gradcheck(format!(
                    "{} of {} trials exceeded {REL_TOLERANCE:e} (max {:.3e})",
                    report.failures, report.trials, report.max_rel_error
                )))
            }
        }
    }
}

fn main() -> ExitCode {
    match real_main() {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
