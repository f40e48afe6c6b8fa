//! Experiment data: synthetic generators for the nonlinear-plant and
//! function-approximation tasks, CSV dataset ingestion for classification,
//! and the evaluation metrics shared by all experiments.

use std::fmt::Write as _;
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::centers::grid_points_1d;
use crate::error::{Error, Result};
use crate::rng::{seeded_rng, standard_normal};

/// All-zero error vectors report this floor instead of −∞ so traces stay
/// plottable and comparable.
pub const MSE_DB_FLOOR: f64 = -320.0;

/// Train/test partition of a dataset, as row indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Split {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// Uniform carrier for every experiment: an input matrix, a target per
/// row, and optional split/label metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub inputs: Vec<Vec<f64>>,
    pub targets: Vec<f64>,
    pub split: Option<Split>,
    pub feature_names: Option<Vec<String>>,
    /// For classification sources: the original class labels in the order
    /// they were mapped to 0.0, 1.0, ...
    pub class_labels: Option<Vec<String>>,
}

impl Dataset {
    pub fn new(inputs: Vec<Vec<f64>>, targets: Vec<f64>) -> Result<Self> {
        let ds = Self {
            inputs,
            targets,
            split: None,
            feature_names: None,
            class_labels: None,
        };
        ds.validate()?;
        Ok(ds)
    }

    pub fn with_split(mut self, split: Split) -> Result<Self> {
        self.split = Some(split);
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.inputs.len() != self.targets.len() {
            return Err(Error::DimensionMismatch {
                context: "dataset rows vs targets",
                expected: self.inputs.len(),
                actual: self.targets.len(),
            });
        }
        let dim = self.inputs.first().map_or(0, Vec::len);
        for (i, row) in self.inputs.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    context: "dataset row width",
                    expected: dim,
                    actual: row.len(),
                });
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "non-finite input value in dataset row {i}"
                )));
            }
        }
        if let Some(t) = self.targets.iter().find(|t| !t.is_finite()) {
            return Err(Error::InvalidArgument(format!("non-finite target {t}")));
        }
        if let Some(split) = &self.split {
            let n = self.inputs.len();
            let mut seen = vec![false; n];
            for &i in split.train.iter().chain(&split.test) {
                if i >= n {
                    return Err(Error::InvalidArgument(format!(
                        "split index {i} out of range for {n} rows"
                    )));
                }
                if seen[i] {
                    return Err(Error::InvalidArgument(format!(
                        "split index {i} appears more than once"
                    )));
                }
                seen[i] = true;
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    pub fn input_dim(&self) -> usize {
        self.inputs.first().map_or(0, Vec::len)
    }

    /// Row indices used for training: the split's train part if present,
    /// otherwise every row.
    pub fn train_indices(&self) -> Vec<usize> {
        match &self.split {
            Some(split) => split.train.clone(),
            None => (0..self.len()).collect(),
        }
    }

    /// Row indices of the held-out part, when a split is present.
    pub fn test_indices(&self) -> Option<&[usize]> {
        self.split.as_ref().map(|s| s.test.as_slice())
    }
}

/// Parameters of the synthetic nonlinear plant
/// y(t) = a1·r(t) + a2·r(t−1) + a3·r(t−2)
///        + a4·(cos(b·r(t)) + exp(−|r(t)|)) + n(t)
/// with n(t) ~ N(0, noise_var) drawn from a seeded stream.
///
/// `b_const` is the nonlinearity frequency (named to avoid colliding with
/// the network bias).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlantParams {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub a4: f64,
    pub b_const: f64,
    pub noise_var: f64,
    pub n_samples: usize,
    pub seed: u64,
}

impl Default for PlantParams {
    fn default() -> Self {
        Self {
            a1: 2.0,
            a2: -0.5,
            a3: -0.1,
            a4: -0.7,
            b_const: 3.0,
            noise_var: 0.0025,
            n_samples: 100,
            seed: 42,
        }
    }
}

impl PlantParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("a1", self.a1),
            ("a2", self.a2),
            ("a3", self.a3),
            ("a4", self.a4),
            ("b_const", self.b_const),
            ("noise_var", self.noise_var),
        ] {
            if !v.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "plant parameter {name} must be finite, got {v}"
                )));
            }
        }
        if self.b_const <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "plant b_const must be > 0, got {}",
                self.b_const
            )));
        }
        if self.noise_var < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "plant noise_var must be >= 0, got {}",
                self.noise_var
            )));
        }
        if self.n_samples == 0 {
            return Err(Error::InvalidArgument(
                "plant n_samples must be >= 1".to_string(),
            ));
        }
        Ok(())
    }
}

/// Input signal driving the plant. The unit step is r(t) = 1 for t ≥ 0,
/// with r(−1) = r(−2) = 0 for the lagged terms of the first two samples.
#[derive(Debug, Clone, PartialEq)]
pub enum Excitation {
    UnitStep,
    Custom(Vec<f64>),
}

/// Simulates the plant and packages (r(t), y(t)) pairs as a dataset with
/// scalar inputs and no split. With `noise_var = 0` the output is
/// independent of the seed.
pub fn gen_plant_series(params: &PlantParams, excitation: &Excitation) -> Result<Dataset> {
    params.validate()?;
    let n = params.n_samples;
    let r: Vec<f64> = match excitation {
        Excitation::UnitStep => vec![1.0; n],
        Excitation::Custom(values) => {
            if values.len() != n {
                return Err(Error::DimensionMismatch {
                    context: "custom excitation length vs n_samples",
                    expected: n,
                    actual: values.len(),
                });
            }
            values.clone()
        }
    };
    let r_at = |t: isize| -> f64 {
        if t < 0 {
            0.0
        } else {
            r[t as usize]
        }
    };
    let mut rng = seeded_rng(params.seed);
    let noise_sd = params.noise_var.sqrt();
    let mut targets = Vec::with_capacity(n);
    for t in 0..n as isize {
        let rt = r_at(t);
        let mut y = params.a1 * rt + params.a2 * r_at(t - 1) + params.a3 * r_at(t - 2)
            + params.a4 * ((params.b_const * rt).cos() + (-rt.abs()).exp());
        if params.noise_var > 0.0 {
            y += noise_sd * standard_normal(&mut rng);
        }
        targets.push(y);
    }
    Dataset::new(r.into_iter().map(|v| vec![v]).collect(), targets)
}

/// Samples f(x, y) = exp(x² − y) on the 2-D grid [lo, hi]² with the given
/// step, in lexicographic row order. The grid points are generated exactly
/// as grid centers are, so a matching center grid coincides with the
/// sample locations bit-for-bit.
pub fn gen_function_grid(lo: f64, hi: f64, step: f64) -> Result<Dataset> {
    let spec = crate::centers::GridSpec::new(lo, hi, step, 2)?;
    let axis = grid_points_1d(lo, step, spec.points_per_dim());
    let mut inputs = Vec::with_capacity(axis.len() * axis.len());
    let mut targets = Vec::with_capacity(axis.len() * axis.len());
    for &x in &axis {
        for &y in &axis {
            inputs.push(vec![x, y]);
            targets.push((x * x - y).exp());
        }
    }
    Dataset::new(inputs, targets)
}

/// Selects the target column of a CSV file by header name or position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ColumnSelector {
    Name(String),
    Index(usize),
}

fn parse_err(path: &Path, line: usize, message: String) -> Error {
    Error::Parse {
        path: path.display().to_string(),
        line,
        message,
    }
}

/// Loads a dataset from a headered CSV file.
///
/// Format: first row is the header; fields are comma-separated with
/// optional surrounding whitespace; decimal numerals may use scientific
/// notation; blank lines are ignored. Every column other than the target
/// (and the optional split column) is a numeric feature. If all target
/// cells parse as numbers they are used as-is; otherwise the distinct
/// labels are mapped to 0.0, 1.0, ... in first-seen order and recorded in
/// `class_labels`. A split column must contain exactly `train` or `test`
/// per row.
pub fn load_csv_dataset(
    path: &Path,
    target: &ColumnSelector,
    split_column: Option<&str>,
) -> Result<Dataset> {
    let file = std::fs::File::open(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    let reader = BufReader::new(file);

    let mut header: Option<Vec<String>> = None;
    // (line_number, fields) per data row
    let mut rows: Vec<(usize, Vec<String>)> = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<String> = line.split(',').map(|f| f.trim().to_string()).collect();
        match &header {
            None => header = Some(fields),
            Some(h) => {
                if fields.len() != h.len() {
                    return Err(parse_err(
                        path,
                        line_no,
                        format!("expected {} fields, got {}", h.len(), fields.len()),
                    ));
                }
                rows.push((line_no, fields));
            }
        }
    }
    let header = header.ok_or_else(|| parse_err(path, 1, "file has no header row".to_string()))?;
    if rows.is_empty() {
        return Err(parse_err(path, 1, "file has no data rows".to_string()));
    }

    let target_idx = match target {
        ColumnSelector::Name(name) => header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| parse_err(path, 1, format!("target column '{name}' not in header")))?,
        ColumnSelector::Index(i) => {
            if *i >= header.len() {
                return Err(parse_err(
                    path,
                    1,
                    format!("target column index {i} out of range ({} columns)", header.len()),
                ));
            }
            *i
        }
    };
    let split_idx = match split_column {
        Some(name) => Some(header.iter().position(|h| h == name).ok_or_else(|| {
            parse_err(path, 1, format!("split column '{name}' not in header"))
        })?),
        None => None,
    };
    if split_idx == Some(target_idx) {
        return Err(parse_err(
            path,
            1,
            "target and split refer to the same column".to_string(),
        ));
    }

    let feature_cols: Vec<usize> = (0..header.len())
        .filter(|&c| c != target_idx && Some(c) != split_idx)
        .collect();
    if feature_cols.is_empty() {
        return Err(parse_err(path, 1, "no feature columns left".to_string()));
    }
    let feature_names: Vec<String> = feature_cols.iter().map(|&c| header[c].clone()).collect();

    let mut inputs = Vec::with_capacity(rows.len());
    let mut train = Vec::new();
    let mut test = Vec::new();
    for (row_pos, (line_no, fields)) in rows.iter().enumerate() {
        let mut row = Vec::with_capacity(feature_cols.len());
        for &c in &feature_cols {
            let cell = &fields[c];
            let value: f64 = cell.parse().map_err(|_| {
                parse_err(
                    path,
                    *line_no,
                    format!("non-numeric value '{cell}' in column '{}'", header[c]),
                )
            })?;
            if !value.is_finite() {
                return Err(parse_err(
                    path,
                    *line_no,
                    format!("non-finite value '{cell}' in column '{}'", header[c]),
                ));
            }
            row.push(value);
        }
        inputs.push(row);
        if let Some(s) = split_idx {
            match fields[s].as_str() {
                "train" => train.push(row_pos),
                "test" => test.push(row_pos),
                other => {
                    return Err(parse_err(
                        path,
                        *line_no,
                        format!("unknown split token '{other}' (expected 'train' or 'test')"),
                    ))
                }
            }
        }
    }

    // Targets: numeric when every cell parses, otherwise first-seen labels.
    let target_cells: Vec<&String> = rows.iter().map(|(_, f)| &f[target_idx]).collect();
    let numeric: Option<Vec<f64>> = target_cells
        .iter()
        .map(|c| c.parse::<f64>().ok().filter(|v| v.is_finite()))
        .collect();
    let (targets, class_labels) = match numeric {
        Some(values) => (values, None),
        None => {
            let mut labels: Vec<String> = Vec::new();
            let mut values = Vec::with_capacity(target_cells.len());
            for cell in &target_cells {
                let pos = match labels.iter().position(|l| l == *cell) {
                    Some(p) => p,
                    None => {
                        labels.push((*cell).clone());
                        labels.len() - 1
                    }
                };
                values.push(pos as f64);
            }
            (values, Some(labels))
        }
    };

    let mut ds = Dataset::new(inputs, targets)?;
    ds.feature_names = Some(feature_names);
    ds.class_labels = class_labels;
    if split_idx.is_some() {
        ds = ds.with_split(Split { train, test })?;
    }
    Ok(ds)
}

/// Serializes a dataset back to the CSV format of [`load_csv_dataset`]
/// (shortest round-trip decimal representation, so numeric values survive
/// a load/save cycle exactly).
pub fn dataset_to_csv(ds: &Dataset) -> String {
    let dim = ds.input_dim();
    let mut out = String::new();
    let names: Vec<String> = match &ds.feature_names {
        Some(names) => names.clone(),
        None => (0..dim).map(|i| format!("x{i}")).collect(),
    };
    out.push_str(&names.join(","));
    out.push_str(",target");
    let has_split = ds.split.is_some();
    if has_split {
        out.push_str(",split");
    }
    out.push('\n');
    let role = |row: usize| -> &'static str {
        match &ds.split {
            Some(s) if s.train.contains(&row) => "train",
            Some(_) => "test",
            None => "",
        }
    };
    for (i, (row, t)) in ds.inputs.iter().zip(&ds.targets).enumerate() {
        for v in row {
            let _ = write!(out, "{v},");
        }
        match &ds.class_labels {
            Some(labels) => out.push_str(&labels[*t as usize]),
            None => {
                let _ = write!(out, "{t}");
            }
        }
        if has_split {
            let _ = write!(out, ",{}", role(i));
        }
        out.push('\n');
    }
    out
}

pub(crate) fn db_from_mean_square(mean_sq: f64) -> f64 {
    if mean_sq == 0.0 {
        MSE_DB_FLOOR
    } else {
        10.0 * mean_sq.log10()
    }
}

/// Mean squared error in decibels: 10·log₁₀((1/N)·Σe²). An all-zero error
/// vector returns [`MSE_DB_FLOOR`] instead of −∞.
pub fn mse_db(errors: &[f64]) -> Result<f64> {
    if errors.is_empty() {
        return Err(Error::EmptyInput("mse_db errors"));
    }
    let mean_sq = errors.iter().map(|e| e * e).sum::<f64>() / errors.len() as f64;
    Ok(db_from_mean_square(mean_sq))
}

/// Fraction of samples on the same side of `threshold` in both vectors.
pub fn classification_accuracy(
    predictions: &[f64],
    targets: &[f64],
    threshold: f64,
) -> Result<f64> {
    if predictions.len() != targets.len() {
        return Err(Error::DimensionMismatch {
            context: "accuracy predictions vs targets",
            expected: targets.len(),
            actual: predictions.len(),
        });
    }
    if predictions.is_empty() {
        return Err(Error::EmptyInput("accuracy vectors"));
    }
    let correct = predictions
        .iter()
        .zip(targets)
        .filter(|(p, t)| (**p >= threshold) == (**t >= threshold))
        .count();
    Ok(correct as f64 / predictions.len() as f64)
}
