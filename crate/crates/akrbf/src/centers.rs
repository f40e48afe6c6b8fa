//! Center-selection strategies: uniform grid placement and subtractive
//! clustering (density-potential peak picking on range-normalized data).

use crate::error::{Error, Result};

/// A uniform Cartesian grid specification. For `dim > 1` the grid is the
/// full Cartesian product of the 1-D point set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
    pub dim: usize,
}

impl GridSpec {
    pub fn new(lo: f64, hi: f64, step: f64, dim: usize) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() || !step.is_finite() {
            return Err(Error::InvalidArgument(
                "grid bounds and step must be finite".to_string(),
            ));
        }
        if lo >= hi {
            return Err(Error::InvalidArgument(format!(
                "grid needs lo < hi, got lo={lo}, hi={hi}"
            )));
        }
        if step <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "grid step must be > 0, got {step}"
            )));
        }
        if dim == 0 {
            return Err(Error::InvalidArgument("grid dim must be >= 1".to_string()));
        }
        let span = (hi - lo) / step;
        if (span - span.round()).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!(
                "grid span is not an integral number of steps: ({hi} - {lo}) / {step} = {span}"
            )));
        }
        Ok(Self { lo, hi, step, dim })
    }

    /// Number of grid points along one dimension.
    pub fn points_per_dim(&self) -> usize {
        ((self.hi - self.lo) / self.step).round() as usize + 1
    }
}

/// The 1-D point set lo, lo+step, ..., hi. Shared with the grid data
/// generator so grid centers and grid samples coincide bit-for-bit.
pub(crate) fn grid_points_1d(lo: f64, step: f64, count: usize) -> Vec<f64> {
    (0..count).map(|k| lo + k as f64 * step).collect()
}

/// All grid points of `spec`, in lexicographic row order (first coordinate
/// varies slowest). Returns `points_per_dim()^dim` rows.
pub fn uniform_grid_centers(spec: &GridSpec) -> Result<Vec<Vec<f64>>> {
    // Re-validate so specs built with struct syntax get the same checks.
    let spec = GridSpec::new(spec.lo, spec.hi, spec.step, spec.dim)?;
    let axis = grid_points_1d(spec.lo, spec.step, spec.points_per_dim());
    let mut rows: Vec<Vec<f64>> = vec![Vec::new()];
    for _ in 0..spec.dim {
        let mut next = Vec::with_capacity(rows.len() * axis.len());
        for prefix in &rows {
            for &v in &axis {
                let mut row = prefix.clone();
                row.push(v);
                next.push(row);
            }
        }
        rows = next;
    }
    Ok(rows)
}

/// Parameters for subtractive clustering.
///
/// `influence` is the neighborhood radius as a fraction of the
/// range-normalized data spread; `accept_ratio` and `reject_ratio` bound
/// the stopping rule on peak potential relative to the first peak. When
/// `max_centers` is set the accept/reject thresholds are bypassed and
/// selection simply continues until the requested count (or the distinct
/// points run out).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubtractiveSpec {
    pub influence: f64,
    pub accept_ratio: f64,
    pub reject_ratio: f64,
    pub max_centers: Option<usize>,
}

impl Default for SubtractiveSpec {
    fn default() -> Self {
        Self {
            influence: 0.1,
            accept_ratio: 0.5,
            reject_ratio: 0.15,
            max_centers: None,
        }
    }
}

impl SubtractiveSpec {
    pub fn validate(&self) -> Result<()> {
        if !self.influence.is_finite() || self.influence <= 0.0 || self.influence > 1.0 {
            return Err(Error::InvalidArgument(format!(
                "influence must be in (0, 1], got {}",
                self.influence
            )));
        }
        for (name, v) in [
            ("accept_ratio", self.accept_ratio),
            ("reject_ratio", self.reject_ratio),
        ] {
            if !v.is_finite() || v <= 0.0 || v >= 1.0 {
                return Err(Error::InvalidArgument(format!(
                    "{name} must be in (0, 1), got {v}"
                )));
            }
        }
        if self.reject_ratio >= self.accept_ratio {
            return Err(Error::InvalidArgument(format!(
                "reject_ratio {} must be below accept_ratio {}",
                self.reject_ratio, self.accept_ratio
            )));
        }
        if self.max_centers == Some(0) {
            return Err(Error::InvalidArgument(
                "max_centers must be >= 1 when set".to_string(),
            ));
        }
        Ok(())
    }
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Selects cluster centers by iterative potential-peak picking.
///
/// Each data point starts with potential Pⱼ = Σₖ exp(−‖xⱼ−xₖ‖²/(rₐ/2)²)
/// computed on per-dimension min-max normalized coordinates with
/// rₐ = `influence`. The highest-potential point becomes a center, then
/// every potential is reduced by the peak's neighborhood with radius
/// r_b = 1.5·rₐ, and the next peak is examined. Peaks above
/// `accept_ratio` of the first peak are accepted; below `reject_ratio`
/// selection stops; in between a peak is accepted only if its distance to
/// the nearest chosen center compensates for the lower potential
/// (d_min/rₐ + P/P₁ ≥ 1), otherwise it is disqualified and the search
/// continues.
///
/// Centers are returned as rows of the original (unnormalized) data, in
/// selection order; they are always actual data points and pairwise
/// distinct. Ties on potential go to the lowest row index.
pub fn subtractive_clustering(data: &[Vec<f64>], spec: &SubtractiveSpec) -> Result<Vec<Vec<f64>>> {
    spec.validate()?;
    let n = data.len();
    if n == 0 {
        return Err(Error::EmptyInput("subtractive clustering data"));
    }
    let dim = data[0].len();
    for (j, row) in data.iter().enumerate() {
        if row.len() != dim {
            return Err(Error::DimensionMismatch {
                context: "subtractive clustering row",
                expected: dim,
                actual: row.len(),
            });
        }
        if row.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "non-finite value in data row {j}"
            )));
        }
    }

    // Min-max normalize per dimension; constant dimensions collapse to 0.
    let mut lo = data[0].clone();
    let mut hi = data[0].clone();
    for row in data {
        for d in 0..dim {
            lo[d] = lo[d].min(row[d]);
            hi[d] = hi[d].max(row[d]);
        }
    }
    let norm: Vec<Vec<f64>> = data
        .iter()
        .map(|row| {
            (0..dim)
                .map(|d| {
                    let range = hi[d] - lo[d];
                    if range > 0.0 {
                        (row[d] - lo[d]) / range
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect();

    let r_a = spec.influence;
    let r_b = 1.5 * r_a;
    let alpha = 4.0 / (r_a * r_a); // exp(−‖·‖²/(r_a/2)²) = exp(−4‖·‖²/r_a²)
    let beta = 4.0 / (r_b * r_b);

    let mut potential = vec![0.0f64; n];
    for j in 0..n {
        let mut p = 0.0;
        for k in 0..n {
            p += (-alpha * sq_dist(&norm[j], &norm[k])).exp();
        }
        potential[j] = p;
    }

    let limit = spec.max_centers.unwrap_or(n).min(n);
    let bypass_thresholds = spec.max_centers.is_some();
    let mut eligible = vec![true; n];
    let mut selected: Vec<usize> = Vec::new();
    let mut first_peak: Option<f64> = None;

    while selected.len() < limit {
        let mut best: Option<(usize, f64)> = None;
        for j in 0..n {
            if !eligible[j] {
                continue;
            }
            match best {
                Some((_, p)) if potential[j] <= p => {}
                _ => best = Some((j, potential[j])),
            }
        }
        let Some((peak, peak_p)) = best else { break };

        let accept = match first_peak {
            None => true,
            Some(_) if bypass_thresholds => true,
            Some(p1) => {
                if peak_p >= spec.accept_ratio * p1 {
                    true
                } else if peak_p < spec.reject_ratio * p1 {
                    break;
                } else {
                    let d_min = selected
                        .iter()
                        .map(|&s| sq_dist(&norm[peak], &norm[s]).sqrt())
                        .fold(f64::INFINITY, f64::min);
                    if d_min / r_a + peak_p / p1 >= 1.0 {
                        true
                    } else {
                        eligible[peak] = false;
                        continue;
                    }
                }
            }
        };
        if !accept {
            continue;
        }

        first_peak.get_or_insert(peak_p);
        selected.push(peak);
        eligible[peak] = false;
        // Disqualify coordinate duplicates so centers stay pairwise distinct.
        for j in 0..n {
            if eligible[j] && data[j] == data[peak] {
                eligible[j] = false;
            }
        }
        for j in 0..n {
            potential[j] -= peak_p * (-beta * sq_dist(&norm[j], &norm[peak])).exp();
        }
    }

    Ok(selected.into_iter().map(|j| data[j].clone()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_1d_plant_layout() {
        let spec = GridSpec::new(-50.0, 50.0, 0.25, 1).unwrap();
        let centers = uniform_grid_centers(&spec).unwrap();
        assert_eq!(centers.len(), 401);
        assert_eq!(centers[0], vec![-50.0]);
        assert_eq!(centers[400], vec![50.0]);
        assert_eq!(centers[204], vec![1.0]);
    }

    #[test]
    fn grid_1d_two_points() {
        let spec = GridSpec::new(0.0, 1.0, 1.0, 1).unwrap();
        let centers = uniform_grid_centers(&spec).unwrap();
        assert_eq!(centers, vec![vec![0.0], vec![1.0]]);
    }

    #[test]
    fn grid_2d_function_layout() {
        let spec = GridSpec::new(-1.0, 1.0, 0.2, 2).unwrap();
        let centers = uniform_grid_centers(&spec).unwrap();
        assert_eq!(centers.len(), 121);
        assert_eq!(centers[0], vec![-1.0, -1.0]);
        // Lexicographic: second coordinate varies fastest.
        assert_eq!(centers[1][0], -1.0);
        assert!(centers[1][1] > centers[0][1]);
        let mut sorted = centers.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(sorted, centers);
    }

    #[test]
    fn grid_rejects_non_integral_span() {
        assert!(GridSpec::new(0.0, 1.0, 0.3, 1).is_err());
    }

    #[test]
    fn grid_rejects_bad_bounds() {
        assert!(GridSpec::new(1.0, 0.0, 0.5, 1).is_err());
        assert!(GridSpec::new(0.0, 1.0, -0.5, 1).is_err());
        assert!(GridSpec::new(0.0, 1.0, 0.5, 0).is_err());
    }

    #[test]
    fn subtractive_single_point() {
        let data = vec![vec![3.0, -1.0]];
        let centers = subtractive_clustering(&data, &SubtractiveSpec::default()).unwrap();
        assert_eq!(centers, data);
    }

    #[test]
    fn subtractive_empty_input() {
        let err = subtractive_clustering(&[], &SubtractiveSpec::default()).unwrap_err();
        assert!(matches!(err, Error::EmptyInput(_)));
    }

    #[test]
    fn subtractive_two_blobs_two_centers() {
        // Two tight, well-separated blobs; separation far exceeds the
        // influence radius on the normalized range.
        let mut data = Vec::new();
        for i in 0..20 {
            let t = i as f64 * 0.001;
            data.push(vec![0.0 + t, 0.0 - t]);
            data.push(vec![10.0 - t, 10.0 + t]);
        }
        let spec = SubtractiveSpec {
            influence: 0.1,
            ..SubtractiveSpec::default()
        };
        let centers = subtractive_clustering(&data, &spec).unwrap();
        assert_eq!(centers.len(), 2);
        let near = |c: &[f64], p: f64| (c[0] - p).abs() < 0.1 && (c[1] - p).abs() < 0.1;
        assert!(near(&centers[0], 0.0) || near(&centers[0], 10.0));
        assert!(near(&centers[1], 0.0) || near(&centers[1], 10.0));
        assert!(centers[0] != centers[1]);

        // Brute-force potential oracle: the first selected center must be
        // the global potential peak over all 40 points.
        let lo = [
            data.iter().map(|r| r[0]).fold(f64::INFINITY, f64::min),
            data.iter().map(|r| r[1]).fold(f64::INFINITY, f64::min),
        ];
        let hi = [
            data.iter().map(|r| r[0]).fold(f64::NEG_INFINITY, f64::max),
            data.iter().map(|r| r[1]).fold(f64::NEG_INFINITY, f64::max),
        ];
        let nrm = |r: &[f64]| {
            [
                (r[0] - lo[0]) / (hi[0] - lo[0]),
                (r[1] - lo[1]) / (hi[1] - lo[1]),
            ]
        };
        let pot = |j: usize| -> f64 {
            let a = nrm(&data[j]);
            data.iter()
                .map(|r| {
                    let b = nrm(r);
                    let d2 = (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2);
                    (-d2 / (0.05f64 * 0.05)).exp()
                })
                .sum()
        };
        // Lowest index wins ties, mirroring the documented tie-break.
        let mut best = 0;
        for j in 1..data.len() {
            if pot(j) > pot(best) {
                best = j;
            }
        }
        assert_eq!(data[best], centers[0]);
    }

    #[test]
    fn subtractive_bypass_selects_requested_count() {
        // 38 distinct pseudo-random points; with the thresholds bypassed all
        // of them become centers.
        let mut data = Vec::new();
        let mut v = 0.123f64;
        for _ in 0..38 {
            let mut row = Vec::new();
            for _ in 0..5 {
                v = (v * 97.0 + 0.31).fract();
                row.push(v);
            }
            data.push(row);
        }
        let spec = SubtractiveSpec {
            influence: 0.1,
            max_centers: Some(38),
            ..SubtractiveSpec::default()
        };
        let centers = subtractive_clustering(&data, &spec).unwrap();
        assert_eq!(centers.len(), 38);
        for c in &centers {
            assert!(data.contains(c));
        }
        for i in 0..centers.len() {
            for j in i + 1..centers.len() {
                assert!(centers[i] != centers[j]);
            }
        }
    }

    #[test]
    fn subtractive_skips_duplicate_rows() {
        let data = vec![
            vec![1.0, 1.0],
            vec![1.0, 1.0],
            vec![1.0, 1.0],
            vec![5.0, 5.0],
        ];
        let spec = SubtractiveSpec {
            max_centers: Some(4),
            ..SubtractiveSpec::default()
        };
        let centers = subtractive_clustering(&data, &spec).unwrap();
        assert_eq!(centers.len(), 2);
        assert!(centers.contains(&vec![1.0, 1.0]));
        assert!(centers.contains(&vec![5.0, 5.0]));
    }

    #[test]
    fn subtractive_permutation_invariant_as_set() {
        // Irregular spacing keeps every potential distinct at f64
        // precision, which the set-invariance property requires.
        let data = vec![
            vec![0.0, 0.0],
            vec![1.0, 0.3],
            vec![2.2, 1.0],
            vec![3.7, 2.5],
            vec![5.0, 5.0],
            vec![7.9, 6.4],
        ];
        let spec = SubtractiveSpec {
            influence: 0.5,
            max_centers: Some(3),
            ..SubtractiveSpec::default()
        };
        let a = subtractive_clustering(&data, &spec).unwrap();
        let permuted: Vec<Vec<f64>> = data.iter().rev().cloned().collect();
        let b = subtractive_clustering(&permuted, &spec).unwrap();
        let mut a_sorted = a.clone();
        let mut b_sorted = b.clone();
        a_sorted.sort_by(|x, y| x.partial_cmp(y).unwrap());
        b_sorted.sort_by(|x, y| x.partial_cmp(y).unwrap());
        assert_eq!(a_sorted, b_sorted);
    }

    #[test]
    fn subtractive_spec_validation() {
        let bad = SubtractiveSpec {
            influence: 0.0,
            ..SubtractiveSpec::default()
        };
        assert!(bad.validate().is_err());
        let bad = SubtractiveSpec {
            accept_ratio: 0.2,
            reject_ratio: 0.4,
            ..SubtractiveSpec::default()
        };
        assert!(bad.validate().is_err());
    }
}
