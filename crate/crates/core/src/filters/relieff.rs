//! ReliefF feature weighting.
//!
//! Distances are Manhattan over per-feature differences: `|a - b|` on
//! range-normalised continuous values and `0/1` mismatch on nominal ones.
//! Neighbours are ordered by `(distance, row)`, so ties go to the lower row.
//!
//! The neighbour search is the expensive part and is exposed separately
//! ([`ReliefF::neighbors`]) so callers can run it in parallel and feed the
//! results to [`ReliefF::accumulate`], which performs the weight updates in
//! a fixed order.

use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dataset::{Column, Dataset};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ReliefFParams {
    pub k_neighbors: usize,
    /// Number of sampled instances; `None` uses every instance in row order.
    pub m_samples: Option<usize>,
    pub seed: u64,
}

impl Default for ReliefFParams {
    fn default() -> Self {
        Self {
            k_neighbors: 10,
            m_samples: None,
            seed: 1,
        }
    }
}

/// Nearest hits and per-class nearest misses of one sampled row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Neighbors {
    pub sample: usize,
    pub hits: Vec<usize>,
    /// Indexed by class code; empty for the sample's own class.
    pub misses: Vec<Vec<usize>>,
}

/// Normalised row-major view of a dataset prepared for ReliefF.
#[derive(Debug, Clone)]
pub struct ReliefF {
    n_rows: usize,
    n_features: usize,
    values: Vec<f64>,
    nominal: Vec<bool>,
    classes: Vec<u32>,
    class_sizes: Vec<usize>,
    k: usize,
}

impl ReliefF {
    /// Works on raw (undiscretized) data; nominal and binned columns use
    /// mismatch distance.
    pub fn new(d: &Dataset, k_neighbors: usize) -> Result<Self> {
        if k_neighbors == 0 {
            return Err(Error::Parameter("ReliefF needs k_neighbors >= 1".into()));
        }
        if d.is_empty() {
            return Err(Error::Empty);
        }
        let n_rows = d.len();
        let n_features = d.columns().len();
        let mut values = vec![0.0; n_rows * n_features];
        let mut nominal = vec![false; n_features];
        for (f, col) in d.columns().iter().enumerate() {
            match col {
                Column::Numeric(v) => {
                    let (lo, hi) = v
                        .iter()
                        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
                    let range = hi - lo;
                    for (r, &x) in v.iter().enumerate() {
                        values[r * n_features + f] = if range > 0.0 { (x - lo) / range } else { 0.0 };
                    }
                }
                Column::Nominal { codes, .. } | Column::Binned { codes, .. } => {
                    nominal[f] = true;
                    for (r, &c) in codes.iter().enumerate() {
                        values[r * n_features + f] = c as f64;
                    }
                }
            }
        }
        let mut class_sizes = vec![0usize; d.n_classes()];
        for &c in d.labels() {
            class_sizes[c as usize] += 1;
        }
        for (c, &size) in class_sizes.iter().enumerate() {
            let available = if size > 0 { size - 1 } else { 0 };
            if size > 0 && available < k_neighbors {
                log::warn!(
                    "class {c} has {size} members; ReliefF uses fewer than {k_neighbors} neighbours for it"
                );
            }
        }
        Ok(Self {
            n_rows,
            n_features,
            values,
            nominal,
            classes: d.labels().to_vec(),
            class_sizes,
            k: k_neighbors,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    fn row(&self, r: usize) -> &[f64] {
        &self.values[r * self.n_features..(r + 1) * self.n_features]
    }

    /// Per-feature difference in `[0, 1]`.
    #[inline]
    pub fn diff(&self, feature: usize, a: usize, b: usize) -> f64 {
        let x = self.values[a * self.n_features + feature];
        let y = self.values[b * self.n_features + feature];
        if self.nominal[feature] {
            if x == y {
                0.0
            } else {
                1.0
            }
        } else {
            (x - y).abs()
        }
    }

    /// Sum of per-feature differences, in feature order.
    pub fn distance(&self, a: usize, b: usize) -> f64 {
        let (ra, rb) = (self.row(a), self.row(b));
        let mut sum = 0.0;
        for f in 0..self.n_features {
            sum += if self.nominal[f] {
                if ra[f] == rb[f] {
                    0.0
                } else {
                    1.0
                }
            } else {
                (ra[f] - rb[f]).abs()
            };
        }
        sum
    }

    /// Rows to sample: all rows in order, or `m` distinct rows drawn with
    /// a seeded shuffle.
    pub fn sample_rows(&self, m_samples: Option<usize>, seed: u64) -> Result<Vec<usize>> {
        match m_samples {
            None => Ok((0..self.n_rows).collect()),
            Some(m) if m == 0 || m > self.n_rows => Err(Error::Parameter(alloc::format!(
                "ReliefF m_samples {m} outside 1..={}",
                self.n_rows
            ))),
            Some(m) if m == self.n_rows => Ok((0..self.n_rows).collect()),
            Some(m) => {
                let mut rows: Vec<usize> = (0..self.n_rows).collect();
                rows.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
                rows.truncate(m);
                Ok(rows)
            }
        }
    }

    /// The `k` nearest rows of every class to `sample`, excluding itself.
    pub fn neighbors(&self, sample: usize) -> Neighbors {
        let n_classes = self.class_sizes.len();
        let mut best: Vec<Vec<(f64, usize)>> = vec![Vec::with_capacity(self.k + 1); n_classes];
        for other in 0..self.n_rows {
            if other == sample {
                continue;
            }
            let d = self.distance(sample, other);
            let list = &mut best[self.classes[other] as usize];
            if list.len() == self.k {
                if d >= list[self.k - 1].0 {
                    continue;
                }
                list.pop();
            }
            // Rows arrive in ascending order, so equal distances keep the
            // earlier row first.
            let at = list.partition_point(|&(x, _)| x <= d);
            list.insert(at, (d, other));
        }
        let own = self.classes[sample] as usize;
        let mut hits = Vec::new();
        let mut misses = vec![Vec::new(); n_classes];
        for (c, list) in best.into_iter().enumerate() {
            let rows: Vec<usize> = list.into_iter().map(|(_, r)| r).collect();
            if c == own {
                hits = rows;
            } else {
                misses[c] = rows;
            }
        }
        Neighbors { sample, hits, misses }
    }

    /// Applies the ReliefF update for each sample in order. `m` in the
    /// normaliser is the number of samples.
    ///
    /// For sample `R` of class `C` with hits `H` and misses `M(c)`:
    /// `W[f] -= diff(f,R,H_j) / (m k_C)` for each hit, then
    /// `W[f] += P(c) / (1 - P(C)) * diff(f,R,M_j(c)) / (m k_c)` for each miss.
    pub fn accumulate(&self, neighbors: &[Neighbors]) -> Vec<f64> {
        let m = neighbors.len() as f64;
        let n = self.n_rows;
        let mut w = vec![0.0; self.n_features];
        for nb in neighbors {
            let own = self.classes[nb.sample] as usize;
            let k_hit = nb.hits.len() as f64;
            for &h in &nb.hits {
                for (f, wf) in w.iter_mut().enumerate() {
                    *wf -= self.diff(f, nb.sample, h) / (m * k_hit);
                }
            }
            let others = (n - self.class_sizes[own]) as f64;
            for (c, rows) in nb.misses.iter().enumerate() {
                if c == own || rows.is_empty() {
                    continue;
                }
                let prior = self.class_sizes[c] as f64 / others;
                let k_miss = rows.len() as f64;
                for &r in rows {
                    for (f, wf) in w.iter_mut().enumerate() {
                        *wf += prior * self.diff(f, nb.sample, r) / (m * k_miss);
                    }
                }
            }
        }
        w
    }
}

/// ReliefF weight per feature, indexed by 0-based column position.
pub fn relieff_weights(d: &Dataset, params: &ReliefFParams) -> Result<Vec<f64>> {
    let r = ReliefF::new(d, params.k_neighbors)?;
    let samples = r.sample_rows(params.m_samples, params.seed)?;
    let neighbors: Vec<Neighbors> = samples.iter().map(|&s| r.neighbors(s)).collect();
    Ok(r.accumulate(&neighbors))
}
