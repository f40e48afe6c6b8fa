//! Experiment orchestration: configuration of the three benchmark tasks,
//! the four comparison arms, training/evaluation, and the CSV outputs.
//!
//! Every run writes exactly `trace.csv` (epoch, mse_db, alpha1, alpha2),
//! `predictions.csv` (inputs, target, prediction) and `summary.csv` into
//! its output directory; all numbers use the shortest round-trip decimal
//! form, so identical configs and seeds produce byte-identical files.
//! Wall-clock time is reported on stdout only.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use akrbf::centers::{subtractive_clustering, uniform_grid_centers, GridSpec, SubtractiveSpec};
use akrbf::data::{
    classification_accuracy, gen_function_grid, gen_plant_series, ColumnSelector, Dataset,
    Excitation, PlantParams, Split,
};
use akrbf::{Error, KernelConfig, MixingState, RbfNetwork, TrainConfig};

use crate::error::{CliError, CliResult};

/// The three benchmark tasks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    SysId,
    Classify,
    Approx,
}

impl ExperimentKind {
    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::SysId => "sysid",
            ExperimentKind::Classify => "classify",
            ExperimentKind::Approx => "approx",
        }
    }
}

/// One comparison arm: which kernel blend the network starts from and
/// whether the mixing weights stay frozen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Arm {
    Cosine,
    Euclidean,
    Manual,
    Adaptive,
}

pub const ALL_ARMS: [Arm; 4] = [Arm::Cosine, Arm::Euclidean, Arm::Manual, Arm::Adaptive];

impl Arm {
    pub fn name(&self) -> &'static str {
        match self {
            Arm::Cosine => "cosine",
            Arm::Euclidean => "euclidean",
            Arm::Manual => "manual",
            Arm::Adaptive => "adaptive",
        }
    }

    pub fn parse(text: &str) -> Option<Arm> {
        match text {
            "cosine" => Some(Arm::Cosine),
            "euclidean" => Some(Arm::Euclidean),
            "manual" => Some(Arm::Manual),
            "adaptive" => Some(Arm::Adaptive),
            _ => None,
        }
    }

    /// Initial raw mixing state and whether it stays frozen during
    /// training. Cosine is (1, 0), Euclidean (0, 1), manual fusion
    /// (0.5, 0.5); the adaptive arm also starts balanced but learns.
    pub fn initial_mixing(&self) -> (MixingState, bool) {
        let (a1, a2, freeze) = match self {
            Arm::Cosine => (1.0, 0.0, true),
            Arm::Euclidean => (0.0, 1.0, true),
            Arm::Manual => (0.5, 0.5, true),
            Arm::Adaptive => (0.5, 0.5, false),
        };
        (MixingState::new(a1, a2).expect("fixed arm mixing is valid"), freeze)
    }
}

/// Center-selection strategy for an experiment.
#[derive(Debug, Clone, PartialEq)]
pub enum CentersStrategy {
    Grid(GridSpec),
    Subtractive {
        spec: SubtractiveSpec,
        /// Resolve `max_centers` to the number of training rows.
        auto_max: bool,
    },
}

/// Where the dataset comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum DataSource {
    Plant {
        params: PlantParams,
        excitation: Excitation,
    },
    FunctionGrid {
        train: (f64, f64, f64),
        test: Option<(f64, f64, f64)>,
    },
    Csv {
        path: PathBuf,
        target: ColumnSelector,
        split_column: Option<String>,
    },
}

/// Full description of one experiment run.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub arm: Arm,
    pub kernel: KernelConfig,
    pub eta: f64,
    pub epochs: usize,
    pub shuffle: bool,
    pub seed: u64,
    pub centers: CentersStrategy,
    pub source: DataSource,
    pub output_dir: PathBuf,
    /// Classification decision threshold.
    pub threshold: f64,
    /// Also write the trained model snapshot (`model.txt`).
    pub emit_model: bool,
    /// Also write the two-center kernel-space embedding
    /// (`kernel_map.csv`); classification only.
    pub emit_kernel_map: bool,
}

impl ExperimentConfig {
    /// The parts that must agree for arms to share one dataset/centers
    /// build: everything except the arm and the output directory.
    fn data_signature(&self) -> (ExperimentKind, &KernelConfig, f64, usize, bool, u64, &CentersStrategy, &DataSource) {
        (
            self.kind,
            &self.kernel,
            self.eta,
            self.epochs,
            self.shuffle,
            self.seed,
            &self.centers,
            &self.source,
        )
    }
}

/// Result record of one arm's run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub arm: String,
    pub best_mse_db: f64,
    /// 1-based epoch number of the first minimum, matching trace.csv.
    pub best_epoch: usize,
    pub final_alpha1: f64,
    pub final_alpha2: f64,
    pub train_accuracy: Option<f64>,
    pub test_accuracy: Option<f64>,
    pub wall_seconds: f64,
}

/// Builds the dataset and the center matrix for a config. Arms of one
/// suite share this result, so their comparison differs only in the
/// kernel mixing.
pub fn prepare(config: &ExperimentConfig) -> CliResult<(Dataset, Vec<Vec<f64>>)> {
    let dataset = match &config.source {
        DataSource::Plant { params, excitation } => {
            gen_plant_series(params, excitation).map_err(CliError::data)?
        }
        DataSource::FunctionGrid { train, test } => {
            let train_ds = gen_function_grid(train.0, train.1, train.2).map_err(CliError::data)?;
            match test {
                None => train_ds,
                Some(test) => {
                    let test_ds =
                        gen_function_grid(test.0, test.1, test.2).map_err(CliError::data)?;
                    let n_train = train_ds.len();
                    let n_test = test_ds.len();
                    let mut inputs = train_ds.inputs;
                    let mut targets = train_ds.targets;
                    inputs.extend(test_ds.inputs);
                    targets.extend(test_ds.targets);
                    Dataset::new(inputs, targets)
                        .and_then(|ds| {
                            ds.with_split(Split {
                                train: (0..n_train).collect(),
                                test: (n_train..n_train + n_test).collect(),
                            })
                        })
                        .map_err(CliError::data)?
                }
            }
        }
        DataSource::Csv {
            path,
            target,
            split_column,
        } => akrbf::data::load_csv_dataset(path, target, split_column.as_deref())
            .map_err(CliError::data)?,
    };

    let centers = match &config.centers {
        CentersStrategy::Grid(spec) => uniform_grid_centers(spec).map_err(CliError::data)?,
        CentersStrategy::Subtractive { spec, auto_max } => {
            let train_rows: Vec<Vec<f64>> = dataset
                .train_indices()
                .iter()
                .map(|&i| dataset.inputs[i].clone())
                .collect();
            let mut spec = *spec;
            if *auto_max {
                spec.max_centers = Some(train_rows.len());
            }
            subtractive_clustering(&train_rows, &spec).map_err(CliError::data)?
        }
    };

    Ok((dataset, centers))
}

/// Trains and evaluates one arm on an already-prepared dataset and center
/// matrix, writing the run's output files.
pub fn run_prepared(
    config: &ExperimentConfig,
    dataset: &Dataset,
    centers: &[Vec<f64>],
) -> CliResult<RunSummary> {
    let started = Instant::now();
    let (mixing, freeze_mixing) = config.arm.initial_mixing();
    let mut net = RbfNetwork::new(centers.to_vec(), config.kernel, mixing)
        .map_err(CliError::data)?;
    let train_cfg = TrainConfig {
        eta: config.eta,
        epochs: config.epochs,
        shuffle: config.shuffle,
        seed: config.seed,
        freeze_mixing,
    };
    let trace = net.train(dataset, &train_cfg).map_err(|e| match e {
        Error::Divergence(msg) => CliError::Divergence(format!("{} arm: {msg}", config.arm.name())),
        other => CliError::data(other),
    })?;

    let predictions = net.predict_batch(&dataset.inputs).map_err(CliError::data)?;

    let is_classification = config.kind == ExperimentKind::Classify
        || dataset.class_labels.is_some();
    let (train_accuracy, test_accuracy) = if is_classification {
        let gather = |idx: &[usize]| -> (Vec<f64>, Vec<f64>) {
            idx.iter()
                .map(|&i| (predictions[i], dataset.targets[i]))
                .unzip()
        };
        let (train_p, train_t) = gather(&dataset.train_indices());
        let train_acc = classification_accuracy(&train_p, &train_t, config.threshold)
            .map_err(CliError::data)?;
        let test_acc = match dataset.test_indices() {
            Some(idx) if !idx.is_empty() => {
                let (p, t) = gather(idx);
                Some(classification_accuracy(&p, &t, config.threshold).map_err(CliError::data)?)
            }
            _ => None,
        };
        (Some(train_acc), test_acc)
    } else {
        (None, None)
    };

    let last = trace.mse_db.len() - 1;
    let summary = RunSummary {
        arm: config.arm.name().to_string(),
        best_mse_db: trace.best_mse_db,
        best_epoch: trace.best_epoch + 1,
        final_alpha1: trace.alpha1[last],
        final_alpha2: trace.alpha2[last],
        train_accuracy,
        test_accuracy,
        wall_seconds: started.elapsed().as_secs_f64(),
    };

    std::fs::create_dir_all(&config.output_dir).map_err(|e| {
        CliError::Data(format!(
            "cannot create output dir {}: {e}",
            config.output_dir.display()
        ))
    })?;
    write_file(&config.output_dir.join("trace.csv"), &trace_csv(&trace))?;
    write_file(
        &config.output_dir.join("predictions.csv"),
        &predictions_csv(dataset, &predictions),
    )?;
    write_file(
        &config.output_dir.join("summary.csv"),
        &summary_csv(&summary),
    )?;
    if config.emit_model {
        akrbf::snapshot::save(&net, &config.output_dir.join("model.txt"))
            .map_err(CliError::data)?;
    }
    if config.emit_kernel_map {
        let (c1, c2) = class_mean_centers(dataset).map_err(CliError::data)?;
        emit_kernel_map(
            &net,
            dataset,
            (&c1, &c2),
            &config.output_dir.join("kernel_map.csv"),
        )?;
    }
    Ok(summary)
}

/// Builds the data, trains one arm, writes its outputs.
pub fn run_experiment(config: &ExperimentConfig) -> CliResult<RunSummary> {
    let (dataset, centers) = prepare(config)?;
    run_prepared(config, &dataset, &centers)
}

/// Runs a set of arm configs against one shared dataset/centers build
/// (arms execute in parallel) and writes a combined `comparison.csv` next
/// to the arm output directories. All configs must agree on everything
/// except the arm and output directory.
pub fn run_suite(configs: &[ExperimentConfig]) -> CliResult<Vec<RunSummary>> {
    if configs.is_empty() {
        return Err(CliError::Config("run_suite needs at least one config".into()));
    }
    let base = &configs[0];
    for other in &configs[1..] {
        if other.data_signature() != base.data_signature() {
            return Err(CliError::Config(
                "suite configs must share data, centers, kernel and training settings".into(),
            ));
        }
    }
    let (dataset, centers) = prepare(base)?;

    let results: Vec<CliResult<RunSummary>> = std::thread::scope(|scope| {
        let handles: Vec<_> = configs
            .iter()
            .map(|config| {
                let dataset = &dataset;
                let centers = &centers;
                scope.spawn(move || run_prepared(config, dataset, centers))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("arm thread panicked")).collect()
    });

    let comparison_dir = base
        .output_dir
        .parent()
        .map(Path::to_path_buf)
        .unwrap_or_else(|| base.output_dir.clone());
    std::fs::create_dir_all(&comparison_dir).ok();
    write_file(
        &comparison_dir.join("comparison.csv"),
        &comparison_csv(configs, &results),
    )?;

    let mut summaries = Vec::with_capacity(results.len());
    let mut first_err = None;
    for result in results {
        match result {
            Ok(s) => summaries.push(s),
            Err(e) => {
                if first_err.is_none() {
                    first_err = Some(e);
                }
            }
        }
    }
    match first_err {
        Some(e) => Err(e),
        None => Ok(summaries),
    }
}

/// Mean input vector of each of the two classes (labels 0 and 1) over the
/// training rows.
pub fn class_mean_centers(dataset: &Dataset) -> akrbf::Result<(Vec<f64>, Vec<f64>)> {
    let dim = dataset.input_dim();
    let mut sums = [vec![0.0; dim], vec![0.0; dim]];
    let mut counts = [0usize; 2];
    for &i in &dataset.train_indices() {
        let class = usize::from(dataset.targets[i] >= 0.5);
        for (s, v) in sums[class].iter_mut().zip(&dataset.inputs[i]) {
            *s += v;
        }
        counts[class] += 1;
    }
    if counts[0] == 0 || counts[1] == 0 {
        return Err(Error::InvalidArgument(
            "kernel map needs training samples from both classes".to_string(),
        ));
    }
    for class in 0..2 {
        for s in sums[class].iter_mut() {
            *s /= counts[class] as f64;
        }
    }
    let [c1, c2] = sums;
    Ok((c1, c2))
}

/// Writes the 2-D kernel-space embedding of every sample against two
/// reference centers under the network's current kernel and mixing:
/// one row per sample of (index, label, phi_c1, phi_c2).
pub fn emit_kernel_map(
    net: &RbfNetwork,
    dataset: &Dataset,
    centers_pair: (&[f64], &[f64]),
    out: &Path,
) -> CliResult<()> {
    let pair = vec![centers_pair.0.to_vec(), centers_pair.1.to_vec()];
    let mut text = String::from("index,label,phi_c1,phi_c2\n");
    for (i, x) in dataset.inputs.iter().enumerate() {
        let kv = akrbf::kernel::fused(x, &pair, net.mixing(), net.kernel_config())
            .map_err(CliError::data)?;
        let label = match &dataset.class_labels {
            Some(labels) => labels
                .get(dataset.targets[i] as usize)
                .cloned()
                .unwrap_or_else(|| format!("{}", dataset.targets[i])),
            None => format!("{}", dataset.targets[i]),
        };
        let _ = writeln!(text, "{i},{label},{},{}", kv.fused[0], kv.fused[1]);
    }
    write_file(out, &text)
}

fn write_file(path: &Path, content: &str) -> CliResult<()> {
    std::fs::write(path, content)
        .map_err(|e| CliError::Data(format!("cannot write {}: {e}", path.display())))
}

fn trace_csv(trace: &akrbf::TrainTrace) -> String {
    let mut out = String::from("epoch,mse_db,alpha1,alpha2\n");
    for (i, ((mse, a1), a2)) in trace
        .mse_db
        .iter()
        .zip(&trace.alpha1)
        .zip(&trace.alpha2)
        .enumerate()
    {
        let _ = writeln!(out, "{},{mse},{a1},{a2}", i + 1);
    }
    out
}

fn predictions_csv(dataset: &Dataset, predictions: &[f64]) -> String {
    let dim = dataset.input_dim();
    let mut out = String::new();
    match &dataset.feature_names {
        Some(names) => out.push_str(&names.join(",")),
        None => {
            let names: Vec<String> = (0..dim).map(|i| format!("x{i}")).collect();
            out.push_str(&names.join(","));
        }
    }
    out.push_str(",target,prediction\n");
    for ((row, t), p) in dataset.inputs.iter().zip(&dataset.targets).zip(predictions) {
        for v in row {
            let _ = write!(out, "{v},");
        }
        let _ = writeln!(out, "{t},{p}");
    }
    out
}

fn opt_cell(v: Option<f64>) -> String {
    v.map(|v| format!("{v}")).unwrap_or_default()
}

fn summary_csv(s: &RunSummary) -> String {
    let mut out =
        String::from("arm,best_mse_db,best_epoch,final_alpha1,final_alpha2,train_accuracy,test_accuracy\n");
    let _ = writeln!(
        out,
        "{},{},{},{},{},{},{}",
        s.arm,
        s.best_mse_db,
        s.best_epoch,
        s.final_alpha1,
        s.final_alpha2,
        opt_cell(s.train_accuracy),
        opt_cell(s.test_accuracy),
    );
    out
}

fn comparison_csv(configs: &[ExperimentConfig], results: &[CliResult<RunSummary>]) -> String {
    let mut out = String::from(
        "arm,best_mse_db,best_epoch,final_alpha1,final_alpha2,train_accuracy,test_accuracy,status\n",
    );
    for (config, result) in configs.iter().zip(results) {
        match result {
            Ok(s) => {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{},ok",
                    s.arm,
                    s.best_mse_db,
                    s.best_epoch,
                    s.final_alpha1,
                    s.final_alpha2,
                    opt_cell(s.train_accuracy),
                    opt_cell(s.test_accuracy),
                );
            }
            Err(e) => {
                let msg = e.to_string().replace(',', ";").replace('\n', " ");
                let _ = writeln!(out, "{},,,,,,,{msg}", config.arm.name());
            }
        }
    }
    out
}

/// Human-readable table of a suite's results for stdout (the only place
/// wall-clock time appears).
pub fn format_summary_table(summaries: &[RunSummary]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<10} {:>12} {:>10} {:>8} {:>8} {:>10} {:>10} {:>9}",
        "arm", "best_mse_db", "best_epoch", "alpha1", "alpha2", "train_acc", "test_acc", "wall_s"
    );
    for s in summaries {
        let _ = writeln!(
            out,
            "{:<10} {:>12.4} {:>10} {:>8.4} {:>8.4} {:>10} {:>10} {:>9.2}",
            s.arm,
            s.best_mse_db,
            s.best_epoch,
            s.final_alpha1,
            s.final_alpha2,
            s.train_accuracy
                .map(|a| format!("{:.4}", a))
                .unwrap_or_else(|| "-".into()),
            s.test_accuracy
                .map(|a| format!("{:.4}", a))
                .unwrap_or_else(|| "-".into()),
            s.wall_seconds,
        );
    }
    out
}
