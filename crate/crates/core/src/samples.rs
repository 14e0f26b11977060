//! Sample ingestion and the rank transform.
//!
//! Every copula computation in this crate consumes ranks only. A [`Dataset`]
//! holds validated raw samples column by column; [`rank_transform`] turns it
//! into a [`RankMatrix`] whose columns are permutations of `1..=T`.

use std::collections::HashSet;
use std::io::{Read, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// T×N table of finite reals with unique, nonempty column names.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    names: Vec<String>,
    columns: Vec<Vec<f64>>,
}

impl Dataset {
    /// Builds a dataset from named columns, enforcing `T >= 2`, `N >= 2`,
    /// equal column lengths and finite entries.
    pub fn new(names: Vec<String>, columns: Vec<Vec<f64>>) -> Result<Self> {
        if names.len() != columns.len() {
            return Err(Error::DimensionMismatch {
                expected: names.len(),
                found: columns.len(),
            });
        }
        validate_names(&names)?;
        if columns.len() < 2 {
            return Err(Error::TooFewColumns(columns.len()));
        }
        let t = columns[0].len();
        for (n, col) in columns.iter().enumerate() {
            if col.len() != t {
                return Err(Error::LengthMismatch {
                    left: t,
                    right: col.len(),
                });
            }
            if let Some(row) = col.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonNumeric {
                    row: row + 1,
                    column: names[n].clone(),
                    value: col[row].to_string(),
                });
            }
        }
        if t < 2 {
            return Err(Error::TooFewSamples(t));
        }
        Ok(Dataset { names, columns })
    }

    /// Builds a dataset from row-major samples.
    pub fn from_rows(names: Vec<String>, rows: &[Vec<f64>]) -> Result<Self> {
        let n = names.len();
        let mut columns = vec![Vec::with_capacity(rows.len()); n];
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::RaggedRow {
                    row: i + 1,
                    expected: n,
                    found: row.len(),
                });
            }
            for (col, &v) in columns.iter_mut().zip(row) {
                col.push(v);
            }
        }
        Dataset::new(names, columns)
    }

    pub fn n_samples(&self) -> usize {
        self.columns[0].len()
    }

    pub fn n_columns(&self) -> usize {
        self.columns.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn column(&self, n: usize) -> &[f64] {
        &self.columns[n]
    }

    pub fn columns(&self) -> &[Vec<f64>] {
        &self.columns
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|c| c == name)
    }

    /// Replaces the column names, keeping the values.
    pub fn with_names(self, names: Vec<String>) -> Result<Self> {
        Dataset::new(names, self.columns)
    }

    /// Applies `f(column_index, value)` to every entry.
    pub fn map_values(&self, f: impl Fn(usize, f64) -> f64) -> Result<Self> {
        let columns = self
            .columns
            .iter()
            .enumerate()
            .map(|(n, col)| col.iter().map(|&v| f(n, v)).collect())
            .collect();
        Dataset::new(self.names.clone(), columns)
    }

    /// Writes the dataset as comma-separated text with a header row. Values
    /// use the shortest representation that parses back to the same `f64`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{}", self.names.join(","))?;
        let mut line = String::new();
        for t in 0..self.n_samples() {
            line.clear();
            for (n, col) in self.columns.iter().enumerate() {
                if n > 0 {
                    line.push(',');
                }
                line.push_str(&col[t].to_string());
            }
            writeln!(out, "{line}")?;
        }
        Ok(())
    }
}

fn validate_names(names: &[String]) -> Result<()> {
    let mut seen = HashSet::with_capacity(names.len());
    for (i, name) in names.iter().enumerate() {
        if name.is_empty() {
            return Err(Error::EmptyColumnName(i + 1));
        }
        if !seen.insert(name.as_str()) {
            return Err(Error::DuplicateColumn(name.clone()));
        }
    }
    Ok(())
}

/// Parses a comma-separated table with one header row. Body rows are
/// numbered from 1 in error messages. Empty cells, non-numeric text and
/// non-finite values (`NaN`, `inf`) are rejected.
pub fn load_dataset<R: Read>(source: R) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(source);
    let names: Vec<String> = reader
        .headers()
        .map_err(|e| Error::Csv(e.to_string()))?
        .iter()
        .map(str::to_owned)
        .collect();
    validate_names(&names)?;
    if names.len() < 2 {
        return Err(Error::TooFewColumns(names.len()));
    }

    let mut columns = vec![Vec::new(); names.len()];
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| Error::Csv(e.to_string()))?;
        if record.len() != names.len() {
            return Err(Error::RaggedRow {
                row,
                expected: names.len(),
                found: record.len(),
            });
        }
        for (n, field) in record.iter().enumerate() {
            match field.parse::<f64>() {
                Ok(v) if v.is_finite() => columns[n].push(v),
                _ => {
                    return Err(Error::NonNumeric {
                        row,
                        column: names[n].clone(),
                        value: field.to_owned(),
                    })
                }
            }
        }
    }
    Dataset::new(names, columns)
}

/// How equal values within a column are ordered when ranking.
///
/// Both rules give ordinal ranks, so every rank column is a permutation of
/// `1..=T`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TieBreak {
    /// Equal values are ranked by ascending row index.
    RowOrder,
    /// Equal values are ranked by a pseudo-random key drawn per row from a
    /// ChaCha stream selected by `(seed, column)`. Tied blocks shared by two
    /// columns therefore get independent orders instead of the same one.
    Shuffled { seed: u64 },
}

impl Default for TieBreak {
    fn default() -> Self {
        TieBreak::Shuffled { seed: 0 }
    }
}

/// Per-column ordinal ranks in `1..=T`, stored column by column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankMatrix {
    columns: Vec<Vec<usize>>,
}

impl RankMatrix {
    /// Wraps rank columns after checking each is a permutation of `1..=T`.
    pub fn from_columns(columns: Vec<Vec<usize>>) -> Result<Self> {
        if columns.is_empty() {
            return Err(Error::TooFewColumns(0));
        }
        let t = columns[0].len();
        if t == 0 {
            return Err(Error::TooFewSamples(0));
        }
        for (n, col) in columns.iter().enumerate() {
            if col.len() != t {
                return Err(Error::LengthMismatch {
                    left: t,
                    right: col.len(),
                });
            }
            check_permutation(col).map_err(|_| Error::NotAPermutation { column: n, len: t })?;
        }
        Ok(RankMatrix { columns })
    }

    pub fn n_samples(&self) -> usize {
        self.columns[0].len()
    }

    pub fn n_columns(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, n: usize) -> &[usize] {
        &self.columns[n]
    }

    pub fn columns(&self) -> &[Vec<usize>] {
        &self.columns
    }

    /// Keeps only the listed columns, in the given order.
    pub fn select(&self, cols: &[usize]) -> RankMatrix {
        RankMatrix {
            columns: cols.iter().map(|&c| self.columns[c].clone()).collect(),
        }
    }
}

pub(crate) fn check_permutation(col: &[usize]) -> std::result::Result<(), ()> {
    let t = col.len();
    let mut seen = vec![false; t];
    for &r in col {
        if r == 0 || r > t || seen[r - 1] {
            return Err(());
        }
        seen[r - 1] = true;
    }
    Ok(())
}

/// Ranks one column: rank 1 is the smallest value. `stream` selects the
/// key stream under [`TieBreak::Shuffled`] and is ignored otherwise.
pub fn rank_values(values: &[f64], ties: TieBreak, stream: u64) -> Vec<usize> {
    let t = values.len();
    let mut order: Vec<usize> = (0..t).collect();
    match ties {
        TieBreak::RowOrder => {
            order.sort_by(|&a, &b| {
                values[a]
                    .partial_cmp(&values[b])
                    .unwrap_or(std::cmp::Ordering::Equal)
            });
        }
        TieBreak::Shuffled { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(stream);
            let keys: Vec<u64> = (0..t).map(|_| rng.random()).collect();
            order.sort_by(|&a, &b| {
                values[a]
                    .partial_cmp(&values[b])
                    .unwrap_or(std::cmp::Ordering::Equal)
                    .then(keys[a].cmp(&keys[b]))
                    .then(a.cmp(&b))
            });
        }
    }
    let mut ranks = vec![0; t];
    for (pos, &row) in order.iter().enumerate() {
        ranks[row] = pos + 1;
    }
    ranks
}

/// Ranks every column of `data` independently.
pub fn rank_transform(data: &Dataset, ties: TieBreak) -> RankMatrix {
    let columns = data
        .columns()
        .iter()
        .enumerate()
        .map(|(n, col)| rank_values(col, ties, n as u64))
        .collect();
    RankMatrix { columns }
}
