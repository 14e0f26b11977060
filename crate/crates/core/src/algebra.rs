//! Evaluable copula densities: reference pair copulas, mixtures, products,
//! and a seeded Gaussian-copula sampler with inverse-CDF margins.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::normal::{normal_cdf, normal_quantile};
use crate::samples::Dataset;

/// A copula density on the open unit hypercube.
pub trait CopulaDensity: Send + Sync {
    fn dim(&self) -> usize;

    /// Density at `u`; every coordinate must lie strictly inside (0, 1).
    fn density(&self, u: &[f64]) -> Result<f64>;
}

fn check_open_unit(u: &[f64], dim: usize) -> Result<()> {
    if u.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: u.len(),
        });
    }
    for (index, &value) in u.iter().enumerate() {
        if !(value > 0.0 && value < 1.0) {
            return Err(Error::OutOfDomain {
                index,
                value,
                domain: "(0, 1)",
            });
        }
    }
    Ok(())
}

/// Bivariate reference copulas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PairCopula {
    Independence,
    Gaussian { theta: f64 },
}

impl PairCopula {
    pub fn gaussian(theta: f64) -> Result<Self> {
        if !(theta > -1.0 && theta < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "gaussian copula needs theta in (-1, 1), got {theta}"
            )));
        }
        Ok(PairCopula::Gaussian { theta })
    }

    pub fn pair_density(&self, u: f64, v: f64) -> Result<f64> {
        self.density(&[u, v])
    }
}

impl CopulaDensity for PairCopula {
    fn dim(&self) -> usize {
        2
    }

    fn density(&self, u: &[f64]) -> Result<f64> {
        check_open_unit(u, 2)?;
        match *self {
            PairCopula::Independence => Ok(1.0),
            PairCopula::Gaussian { theta } => {
                let a = normal_quantile(u[0]);
                let b = normal_quantile(u[1]);
                let s = 1.0 - theta * theta;
                let q = theta * theta * (a * a + b * b) - 2.0 * theta * a * b;
                Ok((-q / (2.0 * s)).exp() / s.sqrt())
            }
        }
    }
}

/// Convex combination `Σ w_k c_k(u)`.
pub struct MixtureCopulaDensity {
    components: Vec<Box<dyn CopulaDensity>>,
    weights: Vec<f64>,
}

impl MixtureCopulaDensity {
    pub fn new(components: Vec<Box<dyn CopulaDensity>>, weights: Vec<f64>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidParameter("mixture has no components".into()));
        }
        if components.len() != weights.len() {
            return Err(Error::LengthMismatch {
                left: components.len(),
                right: weights.len(),
            });
        }
        let dim = components[0].dim();
        if let Some(c) = components.iter().find(|c| c.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: c.dim(),
            });
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::InvalidParameter(
                "mixture weights must be finite and nonnegative".into(),
            ));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "mixture weights sum to {total}, not 1"
            )));
        }
        Ok(MixtureCopulaDensity {
            components,
            weights,
        })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

impl CopulaDensity for MixtureCopulaDensity {
    fn dim(&self) -> usize {
        self.components[0].dim()
    }

    fn density(&self, u: &[f64]) -> Result<f64> {
        check_open_unit(u, self.dim())?;
        let mut total = 0.0;
        for (c, &w) in self.components.iter().zip(&self.weights) {
            total += w * c.density(u)?;
        }
        Ok(total)
    }
}

/// Product of block densities over a partition of the coordinates:
/// `Π_m c_m(u restricted to block m)`. Block indices are 0-based.
pub struct ProductCopulaDensity {
    dim: usize,
    blocks: Vec<(Vec<usize>, Box<dyn CopulaDensity>)>,
}

impl ProductCopulaDensity {
    pub fn new(dim: usize, blocks: Vec<(Vec<usize>, Box<dyn CopulaDensity>)>) -> Result<Self> {
        let mut seen = vec![false; dim];
        for (vars, density) in &blocks {
            if vars.is_empty() {
                return Err(Error::InvalidParameter("empty block".into()));
            }
            if vars.len() != density.dim() {
                return Err(Error::DimensionMismatch {
                    expected: vars.len(),
                    found: density.dim(),
                });
            }
            for &v in vars {
                if v >= dim {
                    return Err(Error::InvalidParameter(format!(
                        "block variable {v} outside 0..{dim}"
                    )));
                }
                if std::mem::replace(&mut seen[v], true) {
                    return Err(Error::InvalidParameter(format!(
                        "variable {v} appears in more than one block"
                    )));
                }
            }
        }
        if let Some(v) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidParameter(format!(
                "variable {v} is not covered by any block"
            )));
        }
        Ok(ProductCopulaDensity { dim, blocks })
    }
}

impl CopulaDensity for ProductCopulaDensity {
    fn dim(&self) -> usize {
        self.dim
    }

    fn density(&self, u: &[f64]) -> Result<f64> {
        check_open_unit(u, self.dim)?;
        let mut total = 1.0;
        let mut sub = Vec::new();
        for (vars, density) in &self.blocks {
            sub.clear();
            sub.extend(vars.iter().map(|&v| u[v]));
            total *= density.density(&sub)?;
        }
        Ok(total)
    }
}

/// Marginal distribution used to push uniforms back to the data scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum MarginSpec {
    StandardNormal,
    Exponential { rate: f64 },
}

impl MarginSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            MarginSpec::StandardNormal => Ok(()),
            MarginSpec::Exponential { rate } if rate.is_finite() && rate > 0.0 => Ok(()),
            MarginSpec::Exponential { rate } => Err(Error::InvalidParameter(format!(
                "exponential rate must be positive, got {rate}"
            ))),
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            MarginSpec::StandardNormal => normal_cdf(x),
            MarginSpec::Exponential { rate } => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-rate * x).exp_m1()
                }
            }
        }
    }

    pub fn quantile(&self, u: f64) -> f64 {
        match *self {
            MarginSpec::StandardNormal => normal_quantile(u),
            MarginSpec::Exponential { rate } => -(-u).ln_1p() / rate,
        }
    }
}

/// Checks `sigma` is a correlation matrix and returns its Cholesky factor.
pub fn cholesky_factor(sigma: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let n = sigma.len();
    if n == 0 {
        return Err(Error::InvalidParameter("empty correlation matrix".into()));
    }
    for (i, row) in sigma.iter().enumerate() {
        if row.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: row.len(),
            });
        }
        if (row[i] - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "correlation matrix diagonal entry {i} is {}, not 1",
                row[i]
            )));
        }
        for (j, &v) in row.iter().enumerate() {
            if !v.is_finite() || (v - sigma[j][i]).abs() > 1e-12 {
                return Err(Error::InvalidParameter(format!(
                    "correlation matrix is not symmetric at ({i}, {j})"
                )));
            }
        }
    }
    let m = DMatrix::from_fn(n, n, |i, j| sigma[i][j]);
    m.cholesky()
        .map(|c| c.l())
        .ok_or(Error::NotPositiveDefinite)
}

/// Draws `t` rows from the Gaussian copula with correlation `sigma`.
/// Output entries lie strictly inside (0, 1); identical seeds give
/// bit-identical output.
pub fn sample_gaussian_copula(sigma: &[Vec<f64>], t: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    let l = cholesky_factor(sigma)?;
    let n = sigma.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut z = vec![0.0; n];
    let mut rows = Vec::with_capacity(t);
    for _ in 0..t {
        for zi in z.iter_mut() {
            *zi = StandardNormal.sample(&mut rng);
        }
        let row = (0..n)
            .map(|i| {
                let y: f64 = (0..=i).map(|j| l[(i, j)] * z[j]).sum();
                normal_cdf(y).clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON / 2.0)
            })
            .collect();
        rows.push(row);
    }
    Ok(rows)
}

/// Maps each uniform column through its margin's quantile function.
/// Columns are named `x1..xN`.
pub fn push_margins(uniforms: &[Vec<f64>], margins: &[MarginSpec]) -> Result<Dataset> {
    for m in margins {
        m.validate()?;
    }
    let n = margins.len();
    let mut columns = vec![Vec::with_capacity(uniforms.len()); n];
    for (r, row) in uniforms.iter().enumerate() {
        if row.len() != n {
            return Err(Error::RaggedRow {
                row: r + 1,
                expected: n,
                found: row.len(),
            });
        }
        check_open_unit(row, n)?;
        for ((col, m), &u) in columns.iter_mut().zip(margins).zip(row) {
            col.push(m.quantile(u));
        }
    }
    let names = (1..=n).map(|i| format!("x{i}")).collect();
    Dataset::new(names, columns)
}
