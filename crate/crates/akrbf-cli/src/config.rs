//! Experiment configuration: built-in defaults per task, an optional flat
//! key-value config file, and command-line overrides, applied in that
//! order.
//!
//! The config file is line-oriented: `[section]` headers, one `key = value`
//! pair per line, `#` comments, blank lines ignored. Unknown sections or
//! keys are errors. Sections and keys:
//!
//! ```text
//! [experiment]  arm, seed, out, emit_model, emit_kernel_map, threshold
//! [kernel]      sigma, gamma
//! [train]       eta, epochs, shuffle
//! [centers]     strategy (grid|subtractive), lo, hi, step, dim,
//!               influence, accept_ratio, reject_ratio, max_centers (auto|none|<n>)
//! [data]        sysid:    n_samples, noise_var, a1, a2, a3, a4, b_const
//!               approx:   train_lo, train_hi, train_step,
//!                         test_lo, test_hi, test_step
//!               classify: csv, target_column (name or #index), split_column
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use akrbf::centers::{GridSpec, SubtractiveSpec};
use akrbf::data::{ColumnSelector, Excitation, PlantParams};
use akrbf::KernelConfig;

use crate::error::{CliError, CliResult};
use crate::experiment::{Arm, CentersStrategy, DataSource, ExperimentConfig, ExperimentKind};

/// Which arms a command line selects.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArmSelection {
    One(Arm),
    All,
}

impl ArmSelection {
    pub fn parse(text: &str) -> CliResult<Self> {
        if text == "all" {
            return Ok(ArmSelection::All);
        }
        Arm::parse(text).map(ArmSelection::One).ok_or_else(|| {
            CliError::Config(format!(
                "unknown arm '{text}' (expected cosine, euclidean, manual, adaptive or all)"
            ))
        })
    }
}

/// Values that may arrive from the command line and override both the
/// defaults and the config file.
#[derive(Debug, Clone, Default)]
pub struct CliOverrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub epochs: Option<usize>,
    pub eta: Option<f64>,
    pub data_csv: Option<PathBuf>,
    pub target_column: Option<String>,
    pub split_column: Option<String>,
    pub emit_kernel_map: bool,
}

type Sections = BTreeMap<String, BTreeMap<String, (usize, String)>>;

fn parse_config_file(path: &Path) -> CliResult<Sections> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
    let mut sections: Sections = BTreeMap::new();
    let mut current: Option<String> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            let name = name.trim().to_string();
            sections.entry(name.clone()).or_default();
            current = Some(name);
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::Config(format!(
                "{}:{line_no}: expected 'key = value' or '[section]', got '{line}'",
                path.display()
            )));
        };
        let Some(section) = &current else {
            return Err(CliError::Config(format!(
                "{}:{line_no}: key '{}' appears before any [section]",
                path.display(),
                key.trim()
            )));
        };
        let prior = sections
            .get_mut(section)
            .expect("section entry exists")
            .insert(
                key.trim().to_string(),
                (line_no, value.trim().to_string()),
            );
        if prior.is_some() {
            return Err(CliError::Config(format!(
                "{}:{line_no}: duplicate key '{}' in [{section}]",
                path.display(),
                key.trim()
            )));
        }
    }
    Ok(sections)
}

/// Tracks which file keys were consumed so leftovers can be reported.
struct FileConfig {
    path: PathBuf,
    sections: Sections,
}

impl FileConfig {
    fn take(&mut self, section: &str, key: &str) -> Option<String> {
        self.sections
            .get_mut(section)
            .and_then(|keys| keys.remove(key))
            .map(|(_, value)| value)
    }

    fn parse_take<T: std::str::FromStr>(&mut self, section: &str, key: &str) -> CliResult<Option<T>> {
        match self.take(section, key) {
            None => Ok(None),
            Some(value) => value.parse().map(Some).map_err(|_| {
                CliError::Config(format!(
                    "{}: bad value '{value}' for {section}.{key}",
                    self.path.display()
                ))
            }),
        }
    }

    fn finish(self) -> CliResult<()> {
        for (section, keys) in &self.sections {
            if let Some((key, (line, _))) = keys.iter().next() {
                return Err(CliError::Config(format!(
                    "{}:{line}: unknown key '{key}' in [{section}]",
                    self.path.display()
                )));
            }
        }
        let known = ["experiment", "kernel", "train", "centers", "data"];
        if let Some(section) = self.sections.keys().find(|s| !known.contains(&s.as_str())) {
            return Err(CliError::Config(format!(
                "{}: unknown section [{section}]",
                self.path.display()
            )));
        }
        Ok(())
    }
}

fn parse_bool(path: &Path, key: &str, value: &str) -> CliResult<bool> {
    match value {
        "true" => Ok(true),
        "false" => Ok(false),
        other => Err(CliError::Config(format!(
            "{}: bad boolean '{other}' for {key} (expected true or false)",
            path.display()
        ))),
    }
}

fn parse_target_column(text: &str) -> ColumnSelector {
    match text.strip_prefix('#').and_then(|t| t.parse::<usize>().ok()) {
        Some(index) => ColumnSelector::Index(index),
        None => ColumnSelector::Name(text.to_string()),
    }
}

/// Task defaults reproducing the benchmark recipes:
/// - sysid: 401 grid centers on [−50, 50] step 0.25, σ = 0.1, 2000 epochs,
///   unit-step plant with noise variance 0.0025;
/// - classify: subtractive clustering (influence 0.1, max centers = the
///   training-set size), σ = 0.2, 500 epochs, CSV source;
/// - approx: 121 grid centers on [−1, 1]² step 0.2, σ = 0.2, 10000 epochs,
///   train grid [−1, 1] step 0.2, test grid [−0.9, 0.9] step 0.2.
///
/// η defaults to 1e−3 everywhere; γ to 1e−50; sample order is sequential.
fn defaults(kind: ExperimentKind, arm: Arm) -> ExperimentConfig {
    let (sigma, epochs, centers, source) = match kind {
        ExperimentKind::SysId => (
            0.1,
            2000,
            CentersStrategy::Grid(GridSpec {
                lo: -50.0,
                hi: 50.0,
                step: 0.25,
                dim: 1,
            }),
            DataSource::Plant {
                params: PlantParams::default(),
                excitation: Excitation::UnitStep,
            },
        ),
        ExperimentKind::Classify => (
            0.2,
            500,
            CentersStrategy::Subtractive {
                spec: SubtractiveSpec::default(),
                auto_max: true,
            },
            DataSource::Csv {
                path: PathBuf::new(),
                target: ColumnSelector::Name("label".to_string()),
                split_column: None,
            },
        ),
        ExperimentKind::Approx => (
            0.2,
            10000,
            CentersStrategy::Grid(GridSpec {
                lo: -1.0,
                hi: 1.0,
                step: 0.2,
                dim: 2,
            }),
            DataSource::FunctionGrid {
                train: (-1.0, 1.0, 0.2),
                test: Some((-0.9, 0.9, 0.2)),
            },
        ),
    };
    ExperimentConfig {
        kind,
        arm,
        kernel: KernelConfig::new(sigma, KernelConfig::DEFAULT_GAMMA)
            .expect("default kernel config is valid"),
        eta: 1e-3,
        epochs,
        shuffle: false,
        seed: 42,
        centers,
        source,
        output_dir: PathBuf::from("runs").join(kind.name()),
        threshold: 0.5,
        emit_model: false,
        emit_kernel_map: false,
    }
}

/// Builds the arm configs for one invocation: defaults, then the config
/// file, then command-line overrides (`arm_override` wins over the file's
/// `experiment.arm`; with neither, all four arms run). A single arm writes
/// directly into the output directory; `all` writes to `<out>/<arm>/`.
pub fn build_configs(
    kind: ExperimentKind,
    arm_override: Option<ArmSelection>,
    config_path: Option<&Path>,
    overrides: &CliOverrides,
) -> CliResult<Vec<ExperimentConfig>> {
    let mut base = defaults(kind, Arm::Adaptive);

    let mut file_arm: Option<ArmSelection> = None;
    if let Some(path) = config_path {
        let mut file = FileConfig {
            path: path.to_path_buf(),
            sections: parse_config_file(path)?,
        };
        apply_file(&mut base, &mut file, &mut file_arm)?;
        file.finish()?;
    }

    if let Some(seed) = overrides.seed {
        base.seed = seed;
        if let DataSource::Plant { params, .. } = &mut base.source {
            params.seed = seed;
        }
    }
    if let Some(out) = &overrides.out {
        base.output_dir = out.clone();
    }
    if let Some(epochs) = overrides.epochs {
        base.epochs = epochs;
    }
    if let Some(eta) = overrides.eta {
        base.eta = eta;
    }
    if let Some(csv) = &overrides.data_csv {
        match &mut base.source {
            DataSource::Csv { path, .. } => *path = csv.clone(),
            _ => {
                return Err(CliError::Config(
                    "--data applies only to the classify experiment".into(),
                ))
            }
        }
    }
    if let Some(name) = &overrides.target_column {
        if let DataSource::Csv { target, .. } = &mut base.source {
            *target = parse_target_column(name);
        }
    }
    if let Some(name) = &overrides.split_column {
        if let DataSource::Csv { split_column, .. } = &mut base.source {
            *split_column = Some(name.clone());
        }
    }
    if overrides.emit_kernel_map {
        base.emit_kernel_map = true;
    }

    validate(&base)?;

    let selection = arm_override.or(file_arm).unwrap_or(ArmSelection::All);
    Ok(expand_arms(base, selection))
}

/// Expands a base config into per-arm configs; `selection` wins over
/// whatever arm the base carries.
pub fn expand_arms(base: ExperimentConfig, selection: ArmSelection) -> Vec<ExperimentConfig> {
    match selection {
        ArmSelection::One(arm) => {
            let mut config = base;
            config.arm = arm;
            vec![config]
        }
        ArmSelection::All => crate::experiment::ALL_ARMS
            .iter()
            .map(|&arm| {
                let mut config = base.clone();
                config.arm = arm;
                config.output_dir = base.output_dir.join(arm.name());
                config
            })
            .collect(),
    }
}

fn apply_file(
    base: &mut ExperimentConfig,
    file: &mut FileConfig,
    file_arm: &mut Option<ArmSelection>,
) -> CliResult<()> {
    let path = file.path.clone();

    if let Some(value) = file.take("experiment", "arm") {
        *file_arm = Some(ArmSelection::parse(&value)?);
    }
    if let Some(seed) = file.parse_take::<u64>("experiment", "seed")? {
        base.seed = seed;
        if let DataSource::Plant { params, .. } = &mut base.source {
            params.seed = seed;
        }
    }
    if let Some(out) = file.take("experiment", "out") {
        base.output_dir = PathBuf::from(out);
    }
    if let Some(value) = file.take("experiment", "emit_model") {
        base.emit_model = parse_bool(&path, "experiment.emit_model", &value)?;
    }
    if let Some(value) = file.take("experiment", "emit_kernel_map") {
        base.emit_kernel_map = parse_bool(&path, "experiment.emit_kernel_map", &value)?;
    }
    if let Some(threshold) = file.parse_take::<f64>("experiment", "threshold")? {
        base.threshold = threshold;
    }

    let sigma = file.parse_take::<f64>("kernel", "sigma")?;
    let gamma = file.parse_take::<f64>("kernel", "gamma")?;
    if sigma.is_some() || gamma.is_some() {
        base.kernel = KernelConfig::new(
            sigma.unwrap_or_else(|| base.kernel.sigma()),
            gamma.unwrap_or_else(|| base.kernel.gamma()),
        )
        .map_err(CliError::config)?;
    }

    if let Some(eta) = file.parse_take::<f64>("train", "eta")? {
        base.eta = eta;
    }
    if let Some(epochs) = file.parse_take::<usize>("train", "epochs")? {
        base.epochs = epochs;
    }
    if let Some(value) = file.take("train", "shuffle") {
        base.shuffle = parse_bool(&path, "train.shuffle", &value)?;
    }

    if let Some(strategy) = file.take("centers", "strategy") {
        base.centers = match strategy.as_str() {
            "grid" => {
                let default = match base.kind {
                    ExperimentKind::SysId => GridSpec {
                        lo: -50.0,
                        hi: 50.0,
                        step: 0.25,
                        dim: 1,
                    },
                    _ => GridSpec {
                        lo: -1.0,
                        hi: 1.0,
                        step: 0.2,
                        dim: 2,
                    },
                };
                CentersStrategy::Grid(default)
            }
            "subtractive" => CentersStrategy::Subtractive {
                spec: SubtractiveSpec::default(),
                auto_max: true,
            },
            other => {
                return Err(CliError::Config(format!(
                    "{}: unknown centers strategy '{other}'",
                    path.display()
                )))
            }
        };
    }
    match &mut base.centers {
        CentersStrategy::Grid(spec) => {
            if let Some(v) = file.parse_take::<f64>("centers", "lo")? {
                spec.lo = v;
            }
            if let Some(v) = file.parse_take::<f64>("centers", "hi")? {
                spec.hi = v;
            }
            if let Some(v) = file.parse_take::<f64>("centers", "step")? {
                spec.step = v;
            }
            if let Some(v) = file.parse_take::<usize>("centers", "dim")? {
                spec.dim = v;
            }
        }
        CentersStrategy::Subtractive { spec, auto_max } => {
            if let Some(v) = file.parse_take::<f64>("centers", "influence")? {
                spec.influence = v;
            }
            if let Some(v) = file.parse_take::<f64>("centers", "accept_ratio")? {
                spec.accept_ratio = v;
            }
            if let Some(v) = file.parse_take::<f64>("centers", "reject_ratio")? {
                spec.reject_ratio = v;
            }
            if let Some(value) = file.take("centers", "max_centers") {
                match value.as_str() {
                    "auto" => *auto_max = true,
                    "none" => {
                        *auto_max = false;
                        spec.max_centers = None;
                    }
                    number => {
                        *auto_max = false;
                        spec.max_centers = Some(number.parse().map_err(|_| {
                            CliError::Config(format!(
                                "{}: bad value '{number}' for centers.max_centers",
                                path.display()
                            ))
                        })?);
                    }
                }
            }
        }
    }

    match &mut base.source {
        DataSource::Plant { params, .. } => {
            if let Some(v) = file.parse_take::<usize>("data", "n_samples")? {
                params.n_samples = v;
            }
            if let Some(v) = file.parse_take::<f64>("data", "noise_var")? {
                params.noise_var = v;
            }
            for (key, field) in [("a1", 0usize), ("a2", 1), ("a3", 2), ("a4", 3), ("b_const", 4)] {
                if let Some(v) = file.parse_take::<f64>("data", key)? {
                    match field {
                        0 => params.a1 = v,
                        1 => params.a2 = v,
                        2 => params.a3 = v,
                        3 => params.a4 = v,
                        _ => params.b_const = v,
                    }
                }
            }
            params.seed = base.seed;
        }
        DataSource::FunctionGrid { train, test } => {
            if let Some(v) = file.parse_take::<f64>("data", "train_lo")? {
                train.0 = v;
            }
            if let Some(v) = file.parse_take::<f64>("data", "train_hi")? {
                train.1 = v;
            }
            if let Some(v) = file.parse_take::<f64>("data", "train_step")? {
                train.2 = v;
            }
            let mut t = test.unwrap_or((-0.9, 0.9, 0.2));
            let mut touched = false;
            if let Some(v) = file.parse_take::<f64>("data", "test_lo")? {
                t.0 = v;
                touched = true;
            }
            if let Some(v) = file.parse_take::<f64>("data", "test_hi")? {
                t.1 = v;
                touched = true;
            }
            if let Some(v) = file.parse_take::<f64>("data", "test_step")? {
                t.2 = v;
                touched = true;
            }
            if touched || test.is_some() {
                *test = Some(t);
            }
        }
        DataSource::Csv {
            path: csv_path,
            target,
            split_column,
        } => {
            if let Some(v) = file.take("data", "csv") {
                *csv_path = PathBuf::from(v);
            }
            if let Some(v) = file.take("data", "target_column") {
                *target = parse_target_column(&v);
            }
            if let Some(v) = file.take("data", "split_column") {
                *split_column = Some(v);
            }
        }
    }
    Ok(())
}

fn validate(config: &ExperimentConfig) -> CliResult<()> {
    if !config.eta.is_finite() || config.eta <= 0.0 {
        return Err(CliError::Config(format!(
            "eta must be finite and > 0, got {}",
            config.eta
        )));
    }
    if config.epochs == 0 {
        return Err(CliError::Config("epochs must be >= 1".into()));
    }
    match &config.centers {
        CentersStrategy::Grid(spec) => {
            GridSpec::new(spec.lo, spec.hi, spec.step, spec.dim).map_err(CliError::config)?;
        }
        CentersStrategy::Subtractive { spec, auto_max } => {
            let mut check = *spec;
            if *auto_max {
                check.max_centers = Some(1); // placeholder; resolved at prepare time
            }
            check.validate().map_err(CliError::config)?;
        }
    }
    match &config.source {
        DataSource::Plant { params, .. } => params.validate().map_err(CliError::config)?,
        DataSource::FunctionGrid { train, test } => {
            GridSpec::new(train.0, train.1, train.2, 2).map_err(CliError::config)?;
            if let Some(test) = test {
                GridSpec::new(test.0, test.1, test.2, 2).map_err(CliError::config)?;
            }
        }
        DataSource::Csv { path, .. } => {
            if path.as_os_str().is_empty() {
                return Err(CliError::Config(
                    "classify needs a dataset: set data.csv in the config file or pass --data"
                        .into(),
                ));
            }
        }
    }
    Ok(())
}
