//! Empirical copula on a lattice.
//!
//! The empirical copula at `u` is the fraction of samples whose scaled ranks
//! are all `<= u`. On a K-lattice a sample with rank `r` belongs to cell
//! `ceil(r·K/T)` in every coordinate, so the CDF grid is a cumulative sum of
//! cell counts and the mass grid is the cell counts themselves. Grids keep
//! integer counts; values are `count / T`, which keeps differencing exact.

use crate::error::{Error, Result};
use crate::samples::RankMatrix;

/// Largest dense grid (in cells) this module will allocate.
pub const MAX_GRID_CELLS: u128 = 100_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridKind {
    /// Copula values, indices `0..=K` per coordinate.
    Cdf,
    /// Cell masses, indices `1..=K` per coordinate.
    Mass,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CopulaGrid {
    kind: GridKind,
    order: usize,
    dim: usize,
    samples: usize,
    counts: Vec<u64>,
}

impl CopulaGrid {
    pub fn kind(&self) -> GridKind {
        self.kind
    }

    /// Lattice order K.
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_samples(&self) -> usize {
        self.samples
    }

    /// Number of index values per coordinate.
    pub fn side(&self) -> usize {
        match self.kind {
            GridKind::Cdf => self.order + 1,
            GridKind::Mass => self.order,
        }
    }

    fn first_index(&self) -> usize {
        match self.kind {
            GridKind::Cdf => 0,
            GridKind::Mass => 1,
        }
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Raw sample counts in storage order (first coordinate fastest).
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Storage offset of a lattice index, using the kind's index convention.
    pub fn offset(&self, index: &[usize]) -> usize {
        assert_eq!(index.len(), self.dim, "index dimension");
        let side = self.side();
        let first = self.first_index();
        let mut offset = 0;
        for &t in index.iter().rev() {
            assert!(
                t >= first && t - first < side,
                "lattice index {t} out of range"
            );
            offset = offset * side + (t - first);
        }
        offset
    }

    /// Lattice index of a storage offset.
    pub fn index(&self, mut offset: usize) -> Vec<usize> {
        let side = self.side();
        let first = self.first_index();
        (0..self.dim)
            .map(|_| {
                let t = offset % side + first;
                offset /= side;
                t
            })
            .collect()
    }

    pub fn count(&self, index: &[usize]) -> u64 {
        self.counts[self.offset(index)]
    }

    pub fn value(&self, index: &[usize]) -> f64 {
        self.count(index) as f64 / self.samples as f64
    }

    /// All values in storage order.
    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        let t = self.samples as f64;
        self.counts.iter().map(move |&c| c as f64 / t)
    }

    /// N-dimensional backward difference of a CDF grid over every lattice
    /// cell. The sign is `(-1)^(number of coordinates at the lower corner)`,
    /// so masses of an N-increasing grid are nonnegative for every N.
    pub fn difference(&self) -> Result<CopulaGrid> {
        if self.kind != GridKind::Cdf {
            return Err(Error::InvalidParameter(
                "difference needs a CDF grid".into(),
            ));
        }
        let k = self.order;
        let n = self.dim;
        let cells = checked_cells(k, n)?;
        let mut counts = Vec::with_capacity(cells);
        let mut upper = vec![1usize; n];
        let mut corner = vec![0usize; n];
        for _ in 0..cells {
            let mut total: i64 = 0;
            for mask in 0u32..(1u32 << n) {
                let mut lower = 0;
                for (d, c) in corner.iter_mut().enumerate() {
                    if mask & (1 << d) != 0 {
                        *c = upper[d] - 1;
                        lower += 1;
                    } else {
                        *c = upper[d];
                    }
                }
                let v = self.count(&corner) as i64;
                if lower % 2 == 0 {
                    total += v;
                } else {
                    total -= v;
                }
            }
            if total < 0 {
                return Err(Error::Invariant(format!("negative cell mass at {upper:?}")));
            }
            counts.push(total as u64);
            advance(&mut upper, 1, k);
        }
        Ok(CopulaGrid {
            kind: GridKind::Mass,
            order: k,
            dim: n,
            samples: self.samples,
            counts,
        })
    }
}

/// Odometer increment over `lo..=hi` in every coordinate, first fastest.
fn advance(index: &mut [usize], lo: usize, hi: usize) {
    for t in index.iter_mut() {
        if *t < hi {
            *t += 1;
            return;
        }
        *t = lo;
    }
}

fn checked_cells(side: usize, dim: usize) -> Result<usize> {
    let cells = (side as u128).checked_pow(dim as u32).unwrap_or(u128::MAX);
    if cells > MAX_GRID_CELLS {
        return Err(Error::GridTooLarge {
            cells,
            limit: MAX_GRID_CELLS,
        });
    }
    Ok(cells as usize)
}

fn check_order(k: usize, t: usize) -> Result<()> {
    if k == 0 || k > t {
        return Err(Error::LatticeOrder {
            order: k,
            min: 1,
            max: t,
        });
    }
    Ok(())
}

/// Default lattice order `max(2, floor(sqrt(T)))`.
pub fn default_lattice_order(t: usize) -> usize {
    t.isqrt().max(2)
}

/// Lattice cell (1-based) of rank `r` for lattice order `k` and `t` samples.
#[inline]
pub fn cell_of(r: usize, k: usize, t: usize) -> usize {
    (r * k).div_ceil(t)
}

/// Empirical copula at an arbitrary point of the unit hypercube: the
/// fraction of samples with `r_n <= floor(u_n·T)` for every coordinate.
pub fn empirical_copula_eval(ranks: &RankMatrix, u: &[f64]) -> Result<f64> {
    let n = ranks.n_columns();
    if u.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: u.len(),
        });
    }
    let t = ranks.n_samples();
    let mut thresholds = Vec::with_capacity(n);
    for (i, &x) in u.iter().enumerate() {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::OutOfDomain {
                index: i,
                value: x,
                domain: "[0, 1]",
            });
        }
        // The slack absorbs rounding in t/K·T so lattice points land exactly.
        thresholds.push(((x * t as f64 + 1e-9).floor() as usize).min(t));
    }
    let cols = ranks.columns();
    let hits = (0..t)
        .filter(|&s| cols.iter().zip(&thresholds).all(|(c, &thr)| c[s] <= thr))
        .count();
    Ok(hits as f64 / t as f64)
}

fn bin_counts(columns: &[&[usize]], k: usize, t: usize, side: usize, first: usize) -> Vec<u64> {
    let cells = side.pow(columns.len() as u32);
    let mut counts = vec![0u64; cells];
    for s in 0..t {
        let mut offset = 0;
        for col in columns.iter().rev() {
            offset = offset * side + (cell_of(col[s], k, t) - first);
        }
        counts[offset] += 1;
    }
    counts
}

/// CDF grid on the K-lattice: entry `(t_1..t_N)` equals the empirical copula
/// at `(t_1/K, …, t_N/K)`. Built from one binning pass plus a cumulative
/// sum along each axis.
pub fn empirical_copula_grid(ranks: &RankMatrix, k: usize) -> Result<CopulaGrid> {
    let t = ranks.n_samples();
    let n = ranks.n_columns();
    check_order(k, t)?;
    let side = k + 1;
    checked_cells(side, n)?;
    let cols: Vec<&[usize]> = ranks.columns().iter().map(Vec::as_slice).collect();
    let mut counts = bin_counts(&cols, k, t, side, 0);
    let mut stride = 1;
    for _ in 0..n {
        for i in 0..counts.len() {
            if (i / stride) % side != 0 {
                counts[i] += counts[i - stride];
            }
        }
        stride *= side;
    }
    Ok(CopulaGrid {
        kind: GridKind::Cdf,
        order: k,
        dim: n,
        samples: t,
        counts,
    })
}

/// Mass grid on the K-lattice by direct cell counting.
pub fn empirical_copula_mass(ranks: &RankMatrix, k: usize) -> Result<CopulaGrid> {
    let t = ranks.n_samples();
    let n = ranks.n_columns();
    check_order(k, t)?;
    checked_cells(k, n)?;
    let cols: Vec<&[usize]> = ranks.columns().iter().map(Vec::as_slice).collect();
    Ok(CopulaGrid {
        kind: GridKind::Mass,
        order: k,
        dim: n,
        samples: t,
        counts: bin_counts(&cols, k, t, k, 1),
    })
}

/// K×K cell counts of a rank pair, row index from `rx`. Callers validate.
pub(crate) fn pair_counts(rx: &[usize], ry: &[usize], k: usize) -> Vec<u64> {
    let t = rx.len();
    let mut counts = vec![0u64; k * k];
    for (&a, &b) in rx.iter().zip(ry) {
        counts[(cell_of(a, k, t) - 1) * k + (cell_of(b, k, t) - 1)] += 1;
    }
    counts
}
