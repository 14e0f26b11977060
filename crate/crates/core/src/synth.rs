//! Synthetic-data specifications (JSON) for block-structured Gaussian-copula
//! samples.
//!
//! ```json
//! {"blocks":[{"vars":[1,2,3],"family":"gaussian","theta":0.8}],
//!  "margins":[{"family":"standard_normal"},{"family":"exponential","rate":1.0}, ...],
//!  "samples":1000, "seed":42}
//! ```
//!
//! `vars` are 1-based. A gaussian block puts `theta` on every pair of its
//! variables; variables outside every block are independent of the rest.

use serde::{Deserialize, Serialize};

use crate::algebra::{cholesky_factor, push_margins, sample_gaussian_copula, MarginSpec};
use crate::error::{Error, Result};
use crate::samples::Dataset;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockFamily {
    Independence,
    Gaussian,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockSpec {
    pub vars: Vec<usize>,
    pub family: BlockFamily,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthSpec {
    pub blocks: Vec<BlockSpec>,
    pub margins: Vec<MarginSpec>,
    pub samples: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub names: Option<Vec<String>>,
}

impl SynthSpec {
    /// Parses and validates a spec. Positive definiteness of the implied
    /// correlation matrix is checked here as well.
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: SynthSpec =
            serde_json::from_str(text).map_err(|e| Error::SynthSpec(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    /// Five variables: `G1..G3` pairwise correlated at 0.8 with normal
    /// margins, `Cn`/`Ce` coupled by a Gaussian copula with θ = 0.8 and
    /// normal/exponential(1) margins, the two blocks independent.
    pub fn five_variable_benchmark(seed: u64) -> Self {
        SynthSpec {
            blocks: vec![
                BlockSpec {
                    vars: vec![1, 2, 3],
                    family: BlockFamily::Gaussian,
                    theta: Some(0.8),
                },
                BlockSpec {
                    vars: vec![4, 5],
                    family: BlockFamily::Gaussian,
                    theta: Some(0.8),
                },
            ],
            margins: vec![
                MarginSpec::StandardNormal,
                MarginSpec::StandardNormal,
                MarginSpec::StandardNormal,
                MarginSpec::StandardNormal,
                MarginSpec::Exponential { rate: 1.0 },
            ],
            samples: 1000,
            seed,
            names: Some(["G1", "G2", "G3", "Cn", "Ce"].map(String::from).to_vec()),
        }
    }

    pub fn dim(&self) -> usize {
        self.margins.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.dim();
        if n < 2 {
            return Err(Error::SynthSpec(format!(
                "need at least 2 margins, found {n}"
            )));
        }
        if self.samples < 2 {
            return Err(Error::SynthSpec(format!(
                "need at least 2 samples, found {}",
                self.samples
            )));
        }
        for m in &self.margins {
            m.validate().map_err(|e| Error::SynthSpec(e.to_string()))?;
        }
        if let Some(names) = &self.names {
            if names.len() != n {
                return Err(Error::SynthSpec(format!(
                    "{} names for {n} variables",
                    names.len()
                )));
            }
        }
        let mut seen = vec![false; n];
        for (b, block) in self.blocks.iter().enumerate() {
            if block.vars.is_empty() {
                return Err(Error::SynthSpec(format!(
                    "block {} has no variables",
                    b + 1
                )));
            }
            for &v in &block.vars {
                if v == 0 || v > n {
                    return Err(Error::SynthSpec(format!(
                        "block {} names variable {v}, outside 1..={n}",
                        b + 1
                    )));
                }
                if std::mem::replace(&mut seen[v - 1], true) {
                    return Err(Error::SynthSpec(format!(
                        "variable {v} appears in more than one block"
                    )));
                }
            }
            match (block.family, block.theta) {
                (BlockFamily::Gaussian, Some(t)) if t > -1.0 && t < 1.0 => {}
                (BlockFamily::Gaussian, t) => {
                    return Err(Error::SynthSpec(format!(
                        "block {} needs theta in (-1, 1), got {t:?}",
                        b + 1
                    )))
                }
                (BlockFamily::Independence, None) => {}
                (BlockFamily::Independence, Some(_)) => {
                    return Err(Error::SynthSpec(format!(
                        "independence block {} takes no theta",
                        b + 1
                    )))
                }
            }
        }
        cholesky_factor(&self.correlation_matrix()).map_err(|e| match e {
            Error::NotPositiveDefinite => Error::SynthSpec(
                "correlation matrix is not positive definite (Cholesky factorisation failed)"
                    .into(),
            ),
            other => Error::SynthSpec(other.to_string()),
        })?;
        Ok(())
    }

    /// Correlation matrix implied by the blocks (0-based indices).
    pub fn correlation_matrix(&self) -> Vec<Vec<f64>> {
        let n = self.dim();
        let mut sigma: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        for block in &self.blocks {
            let theta = match block.family {
                BlockFamily::Gaussian => block.theta.unwrap_or(0.0),
                BlockFamily::Independence => 0.0,
            };
            for &a in &block.vars {
                for &b in &block.vars {
                    if a != b && a >= 1 && b >= 1 && a <= n && b <= n {
                        sigma[a - 1][b - 1] = theta;
                    }
                }
            }
        }
        sigma
    }

    /// Generates the dataset; `seed` overrides the spec's own seed.
    pub fn generate(&self, seed: Option<u64>) -> Result<Dataset> {
        self.validate()?;
        let uniforms = sample_gaussian_copula(
            &self.correlation_matrix(),
            self.samples,
            seed.unwrap_or(self.seed),
        )?;
        let data = push_margins(&uniforms, &self.margins)?;
        match &self.names {
            Some(names) => data.with_names(names.clone()),
            None => Ok(data),
        }
    }
}
