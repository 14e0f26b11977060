//! Pairwise dependence measures computed from the empirical copula.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::empirical::{cell_of, pair_counts};
use crate::error::{Error, Result};
use crate::normal::normal_pdf;
use crate::samples::{check_permutation, rank_transform, rank_values, Dataset, TieBreak};

/// Which pairwise measure fills a [`WeightMatrix`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    /// Absolute Spearman rho.
    RhoAbs,
    /// Plug-in mutual information of the K×K cell masses.
    MiCell,
    /// Mutual information with kernel-estimated margins.
    MiKde,
}

impl Measure {
    pub fn tag(self) -> &'static str {
        match self {
            Measure::RhoAbs => "rho_abs",
            Measure::MiCell => "mi_cell",
            Measure::MiKde => "mi_kde",
        }
    }

    pub fn uses_lattice(self) -> bool {
        !matches!(self, Measure::RhoAbs)
    }
}

impl std::fmt::Display for Measure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.tag())
    }
}

fn check_rank_pair(rx: &[usize], ry: &[usize]) -> Result<usize> {
    if rx.len() != ry.len() {
        return Err(Error::LengthMismatch {
            left: rx.len(),
            right: ry.len(),
        });
    }
    let t = rx.len();
    if t < 2 {
        return Err(Error::TooFewSamples(t));
    }
    for (column, col) in [rx, ry].into_iter().enumerate() {
        check_permutation(col).map_err(|_| Error::NotAPermutation { column, len: t })?;
    }
    Ok(t)
}

fn check_pair_order(k: usize, t: usize) -> Result<()> {
    if k < 2 || k > t {
        return Err(Error::LatticeOrder {
            order: k,
            min: 2,
            max: t,
        });
    }
    Ok(())
}

/// Spearman's rho from the bivariate empirical copula at lattice order T:
/// `12/(T²-1) · Σ_{t1,t2} [Ĉ(t1/T, t2/T) - t1·t2/T²]`.
///
/// Each sample contributes `(T+1-r)(T+1-s)` lattice points to the double
/// sum of Ĉ, so the sum collapses to one pass over the samples, evaluated in
/// exact integer arithmetic.
pub fn spearman_rho(rx: &[usize], ry: &[usize]) -> Result<f64> {
    let t = check_rank_pair(rx, ry)? as i128;
    let s: i128 = rx
        .iter()
        .zip(ry)
        .map(|(&a, &b)| (t + 1 - a as i128) * (t + 1 - b as i128))
        .sum();
    let num = 3 * (4 * s - t * (t + 1) * (t + 1));
    let den = t * (t * t - 1);
    Ok(num as f64 / den as f64)
}

/// Plug-in mutual information (nats) of the K×K empirical copula masses:
/// `Σ m_ij ln(m_ij / (m_i· m_·j))`, with `0 ln 0 = 0`.
pub fn mutual_info_cell(rx: &[usize], ry: &[usize], k: usize) -> Result<f64> {
    let t = check_rank_pair(rx, ry)?;
    check_pair_order(k, t)?;
    Ok(cell_mi_from_counts(&pair_counts(rx, ry, k), k, t))
}

fn cell_mi_from_counts(counts: &[u64], k: usize, t: usize) -> f64 {
    let mut rows = vec![0u64; k];
    let mut cols = vec![0u64; k];
    for i in 0..k {
        for j in 0..k {
            let c = counts[i * k + j];
            rows[i] += c;
            cols[j] += c;
        }
    }
    let tf = t as f64;
    let term = |i: usize, j: usize| -> f64 {
        let c = counts[i * k + j];
        if c == 0 {
            return 0.0;
        }
        let c = c as f64;
        c / tf * (c * tf / (rows[i] as f64 * cols[j] as f64)).ln()
    };
    // Mirrored cells are added in pairs so swapping the arguments gives a
    // bit-identical result.
    let mut total = 0.0;
    for i in 0..k {
        total += term(i, i);
        for j in i + 1..k {
            total += term(i, j) + term(j, i);
        }
    }
    total.max(0.0)
}

/// Silverman's rule `1.06 σ̂ T^(-1/5)`; `None` for fewer than two samples
/// or zero spread.
pub fn silverman_bandwidth(samples: &[f64]) -> Option<f64> {
    let t = samples.len();
    if t < 2 {
        return None;
    }
    let mean = samples.iter().sum::<f64>() / t as f64;
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (t - 1) as f64;
    let h = 1.06 * var.sqrt() * (t as f64).powf(-0.2);
    (h.is_finite() && h > 0.0).then_some(h)
}

/// Gaussian kernel density estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelDensity {
    samples: Vec<f64>,
    bandwidth: f64,
}

impl KernelDensity {
    pub fn new(samples: Vec<f64>, bandwidth: f64) -> Result<Self> {
        if !(bandwidth.is_finite() && bandwidth > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "bandwidth must be positive, got {bandwidth}"
            )));
        }
        if samples.is_empty() {
            return Err(Error::TooFewSamples(0));
        }
        Ok(KernelDensity { samples, bandwidth })
    }

    /// Uses [`silverman_bandwidth`].
    pub fn with_silverman(samples: Vec<f64>) -> Result<Self> {
        let h = silverman_bandwidth(&samples).ok_or_else(|| {
            Error::InvalidParameter("zero-variance sample has no kernel bandwidth".into())
        })?;
        KernelDensity::new(samples, h)
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn density(&self, x: f64) -> f64 {
        let h = self.bandwidth;
        let sum: f64 = self.samples.iter().map(|&s| normal_pdf((x - s) / h)).sum();
        sum / (self.samples.len() as f64 * h)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KdeMode {
    /// Sample average importance-weighted by the joint density estimate
    /// `p̂(x)·p̂(y)·ĉ`, which estimates `∫ p(x)p(y) c ln c`.
    #[default]
    Weighted,
    /// `Σ_t p̂(x_t)·p̂(y_t)·ĉ_t·ln ĉ_t`, unnormalised. Diagnostic only.
    Literal,
}

/// Mutual information with kernel-estimated margins over the K-lattice
/// copula density. Ranks are taken with `ties` (streams 0 and 1).
pub fn mutual_info_kde(
    x: &[f64],
    y: &[f64],
    k: usize,
    ties: TieBreak,
    mode: KdeMode,
) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    let rx = rank_values(x, ties, 0);
    let ry = rank_values(y, ties, 1);
    kde_mi(x, y, &rx, &ry, k, mode, ("x", "y"))
}

fn kde_mi(
    x: &[f64],
    y: &[f64],
    rx: &[usize],
    ry: &[usize],
    k: usize,
    mode: KdeMode,
    labels: (&str, &str),
) -> Result<f64> {
    let t = x.len();
    if t < 10 {
        return Err(Error::TooFewSamples(t));
    }
    check_pair_order(k, t)?;
    if let Some((i, _)) = x.iter().chain(y).enumerate().find(|(_, v)| !v.is_finite()) {
        let (label, row) = if i < t {
            (labels.0, i)
        } else {
            (labels.1, i - t)
        };
        return Err(Error::NonNumeric {
            row: row + 1,
            column: label.to_owned(),
            value: x.iter().chain(y).nth(i).unwrap().to_string(),
        });
    }
    let hx = silverman_bandwidth(x).ok_or_else(|| Error::DegenerateColumn(labels.0.into()))?;
    let hy = silverman_bandwidth(y).ok_or_else(|| Error::DegenerateColumn(labels.1.into()))?;
    let counts = pair_counts(rx, ry, k);
    let scale = (k * k) as f64 / t as f64;
    let cell_density = |s: usize| {
        counts[(cell_of(rx[s], k, t) - 1) * k + (cell_of(ry[s], k, t) - 1)] as f64 * scale
    };

    match mode {
        KdeMode::Weighted => {
            // The importance weight 1/(p̂x·p̂y·ĉ) cancels the margins and one
            // factor of ĉ from each term, leaving the mean of ln ĉ.
            let total: f64 = (0..t).map(|s| cell_density(s).ln()).sum();
            Ok(total / t as f64)
        }
        KdeMode::Literal => {
            let px = KernelDensity::new(x.to_vec(), hx)?;
            let py = KernelDensity::new(y.to_vec(), hy)?;
            let total = (0..t)
                .into_par_iter()
                .map(|s| {
                    let c = cell_density(s);
                    px.density(x[s]) * py.density(y[s]) * c * c.ln()
                })
                .collect::<Vec<_>>()
                .into_iter()
                .sum();
            Ok(total)
        }
    }
}

/// Symmetric N×N matrix of nonnegative pairwise weights with a zero
/// diagonal. `signed` keeps the signed value behind each weight (rho before
/// taking the absolute value; equal to the weight for MI).
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMatrix {
    n: usize,
    weights: Vec<f64>,
    signed: Vec<f64>,
    measure: Measure,
}

impl WeightMatrix {
    pub fn new(rows: Vec<Vec<f64>>, measure: Measure) -> Result<Self> {
        let n = rows.len();
        let mut weights = Vec::with_capacity(n * n);
        for row in &rows {
            if row.len() != n {
                return Err(Error::InvalidWeights(format!(
                    "row of length {} in a {n}×{n} matrix",
                    row.len()
                )));
            }
            weights.extend_from_slice(row);
        }
        Self::from_parts(n, weights.clone(), weights, measure)
    }

    fn from_parts(n: usize, weights: Vec<f64>, signed: Vec<f64>, measure: Measure) -> Result<Self> {
        for i in 0..n {
            if weights[i * n + i] != 0.0 {
                return Err(Error::InvalidWeights(format!(
                    "diagonal entry {i} is not 0"
                )));
            }
            for j in 0..n {
                let w = weights[i * n + j];
                if !w.is_finite() {
                    return Err(Error::InvalidWeights(format!(
                        "entry ({i}, {j}) is not finite"
                    )));
                }
                if w < 0.0 {
                    return Err(Error::InvalidWeights(format!(
                        "entry ({i}, {j}) is negative"
                    )));
                }
                if (w - weights[j * n + i]).abs() > 1e-12 {
                    return Err(Error::InvalidWeights(format!(
                        "asymmetric at ({i}, {j}): {w} vs {}",
                        weights[j * n + i]
                    )));
                }
            }
        }
        Ok(WeightMatrix {
            n,
            weights,
            signed,
            measure,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn measure(&self) -> Measure {
        self.measure
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.weights[i * self.n + j]
    }

    pub fn signed(&self, i: usize, j: usize) -> f64 {
        self.signed[i * self.n + j]
    }

    /// Sum over the N(N-1)/2 unordered pairs.
    pub fn total(&self) -> f64 {
        (0..self.n)
            .flat_map(|i| (i + 1..self.n).map(move |j| (i, j)))
            .map(|(i, j)| self.get(i, j))
            .sum()
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.weights
            .chunks(self.n.max(1))
            .map(<[f64]>::to_vec)
            .collect()
    }
}

fn pair_value(
    data: &Dataset,
    (i, j): (usize, usize),
    rx: &[usize],
    ry: &[usize],
    measure: Measure,
    k: usize,
) -> Result<(f64, f64)> {
    match measure {
        Measure::RhoAbs => {
            let rho = spearman_rho(rx, ry)?;
            Ok((rho.abs(), rho))
        }
        Measure::MiCell => {
            let mi = cell_mi_from_counts(&pair_counts(rx, ry, k), k, rx.len());
            Ok((mi, mi))
        }
        Measure::MiKde => {
            let names = data.names();
            let mi = kde_mi(
                data.column(i),
                data.column(j),
                rx,
                ry,
                k,
                KdeMode::Weighted,
                (&names[i], &names[j]),
            )?;
            Ok((mi, mi))
        }
    }
}

/// `(weight, signed value)` of one column pair, identical to the
/// corresponding [`weight_matrix`] entry.
pub fn pair_measure(
    data: &Dataset,
    i: usize,
    j: usize,
    measure: Measure,
    k: usize,
    ties: TieBreak,
) -> Result<(f64, f64)> {
    let n = data.n_columns();
    for c in [i, j] {
        if c >= n {
            return Err(Error::InvalidParameter(format!(
                "column {c} out of range for {n} columns"
            )));
        }
    }
    if i == j {
        return Err(Error::InvalidParameter(format!(
            "column {i} paired with itself"
        )));
    }
    if measure.uses_lattice() {
        check_pair_order(k, data.n_samples())?;
    }
    let rx = rank_values(data.column(i), ties, i as u64);
    let ry = rank_values(data.column(j), ties, j as u64);
    pair_value(data, (i, j), &rx, &ry, measure, k)
}

/// Fills the weight matrix for every unordered column pair. `k` is the
/// lattice order for the MI measures and is ignored by `RhoAbs`. Pairs are
/// evaluated in parallel; each entry depends only on its own pair.
pub fn weight_matrix(
    data: &Dataset,
    measure: Measure,
    k: usize,
    ties: TieBreak,
) -> Result<WeightMatrix> {
    let n = data.n_columns();
    let t = data.n_samples();
    if measure.uses_lattice() {
        check_pair_order(k, t)?;
    }
    let ranks = rank_transform(data, ties);
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    let values = pairs
        .par_iter()
        .map(|&(i, j)| pair_value(data, (i, j), ranks.column(i), ranks.column(j), measure, k))
        .collect::<Result<Vec<_>>>()?;

    let mut weights = vec![0.0; n * n];
    let mut signed = vec![0.0; n * n];
    for (&(i, j), &(w, s)) in pairs.iter().zip(&values) {
        weights[i * n + j] = w;
        weights[j * n + i] = w;
        signed[i * n + j] = s;
        signed[j * n + i] = s;
    }
    WeightMatrix::from_parts(n, weights, signed, measure)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rho_of_two_point_samples() {
        assert_eq!(spearman_rho(&[1, 2], &[1, 2]).unwrap(), 1.0);
        assert_eq!(spearman_rho(&[1, 2], &[2, 1]).unwrap(), -1.0);
    }

    #[test]
    fn rho_validates_input() {
        assert!(matches!(
            spearman_rho(&[1, 2], &[1, 2, 3]),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(matches!(
            spearman_rho(&[1, 2, 3], &[1, 1, 3]),
            Err(Error::NotAPermutation { column: 1, .. })
        ));
        assert!(spearman_rho(&[1], &[1]).is_err());
    }

    #[test]
    fn mi_cell_examples() {
        let co: Vec<usize> = (1..=4).collect();
        let mi = mutual_info_cell(&co, &co, 2).unwrap();
        assert!((mi - std::f64::consts::LN_2).abs() < 1e-15);

        // T = K², one sample per cell.
        let k = 3;
        let mut rx = Vec::new();
        let mut ry = Vec::new();
        for i in 0..k {
            for j in 0..k {
                rx.push(i * k + j + 1);
                ry.push(j * k + i + 1);
            }
        }
        assert_eq!(mutual_info_cell(&rx, &ry, k).unwrap(), 0.0);
    }

    #[test]
    fn mi_cell_checks_order() {
        let r: Vec<usize> = (1..=5).collect();
        assert!(matches!(
            mutual_info_cell(&r, &r, 1),
            Err(Error::LatticeOrder { .. })
        ));
        assert!(matches!(
            mutual_info_cell(&r, &r, 6),
            Err(Error::LatticeOrder { .. })
        ));
    }

    #[test]
    fn kernel_density_single_point_peak() {
        let kd = KernelDensity::new(vec![0.0], 0.5).unwrap();
        let expected = 1.0 / (0.5 * (2.0 * std::f64::consts::PI).sqrt());
        assert!((kd.density(0.0) - expected).abs() < 1e-15);
        assert!(KernelDensity::new(vec![0.0], 0.0).is_err());
        assert!(KernelDensity::with_silverman(vec![2.0, 2.0, 2.0]).is_err());
    }

    #[test]
    fn kernel_density_is_symmetric_for_symmetric_samples() {
        let kd = KernelDensity::with_silverman(vec![-1.0, 1.0]).unwrap();
        for x in [0.3, 1.0, 2.0, 5.0] {
            assert_eq!(kd.density(x), kd.density(-x));
        }
    }

    #[test]
    fn mi_kde_rejects_degenerate_and_short_columns() {
        let x: Vec<f64> = (0..20).map(f64::from).collect();
        let flat = vec![1.0; 20];
        assert_eq!(
            mutual_info_kde(&x, &flat, 4, TieBreak::default(), KdeMode::Weighted).unwrap_err(),
            Error::DegenerateColumn("y".into())
        );
        assert!(matches!(
            mutual_info_kde(&x[..5], &x[..5], 2, TieBreak::default(), KdeMode::Weighted),
            Err(Error::TooFewSamples(5))
        ));
    }

    #[test]
    fn weight_matrix_validation() {
        assert!(WeightMatrix::new(vec![vec![0.0, 1.0], vec![0.5, 0.0]], Measure::MiCell).is_err());
        assert!(
            WeightMatrix::new(vec![vec![0.0, -1.0], vec![-1.0, 0.0]], Measure::MiCell).is_err()
        );
        assert!(WeightMatrix::new(vec![vec![1.0, 1.0], vec![1.0, 0.0]], Measure::MiCell).is_err());
        assert!(WeightMatrix::new(vec![vec![0.0, 1.0]], Measure::MiCell).is_err());
        let w = WeightMatrix::new(vec![vec![0.0, 0.4], vec![0.4, 0.0]], Measure::RhoAbs).unwrap();
        assert_eq!(w.total(), 0.4);
    }

    #[test]
    fn two_column_matrix_matches_pair_measure() {
        let d = Dataset::from_rows(
            vec!["a".into(), "b".into()],
            &[
                vec![1.0, 3.0],
                vec![2.0, 1.0],
                vec![3.0, 4.0],
                vec![4.0, 2.0],
                vec![5.0, 5.0],
            ],
        )
        .unwrap();
        let w = weight_matrix(&d, Measure::RhoAbs, 2, TieBreak::RowOrder).unwrap();
        let rho = spearman_rho(&[1, 2, 3, 4, 5], &[3, 1, 4, 2, 5]).unwrap();
        assert_eq!(w.get(0, 1), rho.abs());
        assert_eq!(w.signed(1, 0), rho);
        let w = weight_matrix(&d, Measure::MiCell, 2, TieBreak::RowOrder).unwrap();
        assert_eq!(
            w.get(1, 0),
            mutual_info_cell(&[1, 2, 3, 4, 5], &[3, 1, 4, 2, 5], 2).unwrap()
        );
    }

    #[test]
    fn pair_measure_agrees_with_the_matrix_under_ties() {
        let rows: Vec<Vec<f64>> = (0..40)
            .map(|i| vec![(i % 7) as f64, (i % 5) as f64, ((i * 13) % 11) as f64])
            .collect();
        let d = Dataset::from_rows(vec!["a".into(), "b".into(), "c".into()], &rows).unwrap();
        let ties = TieBreak::Shuffled { seed: 9 };
        for measure in [Measure::RhoAbs, Measure::MiCell, Measure::MiKde] {
            let w = weight_matrix(&d, measure, 6, ties).unwrap();
            for (i, j) in [(0, 1), (0, 2), (2, 1)] {
                let (weight, signed) = pair_measure(&d, i, j, measure, 6, ties).unwrap();
                assert_eq!(weight, w.get(i, j), "{measure} ({i}, {j})");
                assert_eq!(signed, w.signed(i, j));
            }
        }
        assert!(pair_measure(&d, 1, 1, Measure::MiCell, 6, ties).is_err());
        assert!(pair_measure(&d, 0, 3, Measure::MiCell, 6, ties).is_err());
        assert!(pair_measure(&d, 0, 1, Measure::MiCell, 41, ties).is_err());
    }
}
