//! Flat text serialization of a trained network.
//!
//! The format is versioned and self-describing: a `key = value` header
//! (m0, m1, sigma, gamma, a1_raw, a2_raw, bias) followed by the center
//! rows and the weight vector. Values are written with 18 significant
//! digits, which round-trips every f64 exactly.
//!
//! ```text
//! akrbf-model v1
//! m0 = 1
//! m1 = 2
//! sigma = 5.00000000000000000e-1
//! ...
//! centers
//! <m1 lines of m0 space-separated values>
//! weights
//! <m1 lines of one value each>
//! ```

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::kernel::{KernelConfig, MixingState};
use crate::net::RbfNetwork;

const MAGIC: &str = "akrbf-model v1";

/// Serializes a network to the snapshot text format.
pub fn to_string(net: &RbfNetwork) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{MAGIC}");
    let _ = writeln!(out, "m0 = {}", net.input_dim());
    let _ = writeln!(out, "m1 = {}", net.hidden_size());
    let _ = writeln!(out, "sigma = {:.17e}", net.kernel_config().sigma());
    let _ = writeln!(out, "gamma = {:.17e}", net.kernel_config().gamma());
    let _ = writeln!(out, "a1_raw = {:.17e}", net.mixing().a1_raw());
    let _ = writeln!(out, "a2_raw = {:.17e}", net.mixing().a2_raw());
    let _ = writeln!(out, "bias = {:.17e}", net.bias());
    let _ = writeln!(out, "centers");
    for center in net.centers() {
        let row: Vec<String> = center.iter().map(|v| format!("{v:.17e}")).collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
    let _ = writeln!(out, "weights");
    for w in net.weights() {
        let _ = writeln!(out, "{w:.17e}");
    }
    out
}

/// Writes the snapshot to a file.
pub fn save(net: &RbfNetwork, path: &Path) -> Result<()> {
    std::fs::write(path, to_string(net)).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

struct Cursor<'a> {
    lines: std::iter::Enumerate<std::str::Lines<'a>>,
    origin: String,
}

impl<'a> Cursor<'a> {
    fn next(&mut self) -> Result<(usize, &'a str)> {
        match self.lines.next() {
            Some((idx, line)) => Ok((idx + 1, line)),
            None => Err(Error::Parse {
                path: self.origin.clone(),
                line: 0,
                message: "unexpected end of snapshot".to_string(),
            }),
        }
    }

    fn err(&self, line: usize, message: String) -> Error {
        Error::Parse {
            path: self.origin.clone(),
            line,
            message,
        }
    }
}

/// Parses a snapshot produced by [`to_string`].
pub fn from_str(text: &str, origin: &str) -> Result<RbfNetwork> {
    let mut cur = Cursor {
        lines: text.lines().enumerate(),
        origin: origin.to_string(),
    };
    let (line, magic) = cur.next()?;
    if magic.trim() != MAGIC {
        return Err(cur.err(line, format!("expected header '{MAGIC}', got '{magic}'")));
    }

    let mut keyed = |expected: &str| -> Result<f64> {
        let (line, text) = cur.next()?;
        let (key, value) = text
            .split_once('=')
            .ok_or_else(|| cur.err(line, format!("expected '{expected} = <value>'")))?;
        if key.trim() != expected {
            return Err(cur.err(line, format!("expected key '{expected}', got '{}'", key.trim())));
        }
        value
            .trim()
            .parse()
            .map_err(|_| cur.err(line, format!("bad numeric value '{}'", value.trim())))
    };

    let m0 = keyed("m0")? as usize;
    let m1 = keyed("m1")? as usize;
    let sigma = keyed("sigma")?;
    let gamma = keyed("gamma")?;
    let a1_raw = keyed("a1_raw")?;
    let a2_raw = keyed("a2_raw")?;
    let bias = keyed("bias")?;

    let (line, marker) = cur.next()?;
    if marker.trim() != "centers" {
        return Err(cur.err(line, format!("expected 'centers', got '{marker}'")));
    }
    let mut centers = Vec::with_capacity(m1);
    for _ in 0..m1 {
        let (line, row) = cur.next()?;
        let values: Result<Vec<f64>> = row
            .split_whitespace()
            .map(|tok| {
                tok.parse()
                    .map_err(|_| cur.err(line, format!("bad center value '{tok}'")))
            })
            .collect();
        let values = values?;
        if values.len() != m0 {
            return Err(cur.err(
                line,
                format!("center row has {} values, expected {m0}", values.len()),
            ));
        }
        centers.push(values);
    }

    let (line, marker) = cur.next()?;
    if marker.trim() != "weights" {
        return Err(cur.err(line, format!("expected 'weights', got '{marker}'")));
    }
    let mut weights = Vec::with_capacity(m1);
    for _ in 0..m1 {
        let (line, tok) = cur.next()?;
        weights.push(
            tok.trim()
                .parse()
                .map_err(|_| cur.err(line, format!("bad weight value '{}'", tok.trim())))?,
        );
    }

    RbfNetwork::with_parameters(
        centers,
        weights,
        bias,
        KernelConfig::new(sigma, gamma)?,
        MixingState::new(a1_raw, a2_raw)?,
    )
}

/// Reads a snapshot from a file.
pub fn load(path: &Path) -> Result<RbfNetwork> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    from_str(&text, &path.display().to_string())
}
