//! Grid domains, labeled datasets and origin-placed rectangle hypotheses.
//!
//! Order statistics along an axis use one total order: examples are compared
//! by coordinate, and among equal coordinates the one inserted *earlier*
//! ranks higher. `top_k` therefore prefers earlier examples on ties and
//! `bottom_k` prefers later ones, and the two always partition a dataset.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hash::sha256_hex;

/// The grid `{0, ..., x_max}^d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridDomain {
    pub x_max: u32,
    pub d: usize,
}

impl GridDomain {
    pub fn new(x_max: u32, d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidParams("dimension must be at least 1".into()));
        }
        Ok(Self { x_max, d })
    }

    /// Number of values along one axis, `x_max + 1`.
    pub fn side(&self) -> u64 {
        self.x_max as u64 + 1
    }

    pub fn check_point(&self, coords: &[u32]) -> Result<()> {
        if coords.len() != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                got: coords.len(),
            });
        }
        for (axis, &c) in coords.iter().enumerate() {
            if c > self.x_max {
                return Err(Error::OutOfDomain {
                    axis,
                    value: c as u64,
                    x_max: self.x_max,
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LabeledExample {
    pub coords: Vec<u32>,
    pub label: bool,
}

impl LabeledExample {
    pub fn new(coords: Vec<u32>, label: bool) -> Self {
        Self { coords, label }
    }

    pub fn positive(coords: Vec<u32>) -> Self {
        Self::new(coords, true)
    }
}

/// An ordered multiset of labeled grid points.
///
/// Example ids are insertion indices. Datasets are never mutated in place;
/// [`Dataset::appended`] and [`Dataset::subset`] return new values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    domain: GridDomain,
    coords: Vec<u32>,
    labels: Vec<bool>,
}

impl Dataset {
    pub fn empty(domain: GridDomain) -> Self {
        Self {
            domain,
            coords: Vec::new(),
            labels: Vec::new(),
        }
    }

    pub fn from_examples<I>(domain: GridDomain, examples: I) -> Result<Self>
    where
        I: IntoIterator<Item = LabeledExample>,
    {
        let mut coords = Vec::new();
        let mut labels = Vec::new();
        for ex in examples {
            domain.check_point(&ex.coords)?;
            coords.extend_from_slice(&ex.coords);
            labels.push(ex.label);
        }
        Ok(Self {
            domain,
            coords,
            labels,
        })
    }

    /// Builds a dataset from row-major coordinates and one label per row.
    pub fn from_parts(domain: GridDomain, coords: Vec<u32>, labels: Vec<bool>) -> Result<Self> {
        if coords.len() != labels.len() * domain.d {
            return Err(Error::DimensionMismatch {
                expected: labels.len() * domain.d,
                got: coords.len(),
            });
        }
        for row in coords.chunks_exact(domain.d) {
            domain.check_point(row)?;
        }
        Ok(Self {
            domain,
            coords,
            labels,
        })
    }

    /// All examples positive; convenient for feeding the learner directly.
    pub fn positives_from_points<I>(domain: GridDomain, points: I) -> Result<Self>
    where
        I: IntoIterator<Item = Vec<u32>>,
    {
        Self::from_examples(domain, points.into_iter().map(LabeledExample::positive))
    }

    pub fn domain(&self) -> GridDomain {
        self.domain
    }

    pub fn dim(&self) -> usize {
        self.domain.d
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn point(&self, id: usize) -> &[u32] {
        let d = self.domain.d;
        &self.coords[id * d..(id + 1) * d]
    }

    #[inline]
    pub fn coord(&self, id: usize, axis: usize) -> u32 {
        self.coords[id * self.domain.d + axis]
    }

    pub fn label(&self, id: usize) -> bool {
        self.labels[id]
    }

    pub fn labels(&self) -> &[bool] {
        &self.labels
    }

    pub fn example(&self, id: usize) -> LabeledExample {
        LabeledExample::new(self.point(id).to_vec(), self.labels[id])
    }

    pub fn examples(&self) -> impl Iterator<Item = LabeledExample> + '_ {
        (0..self.len()).map(move |id| self.example(id))
    }

    /// The dataset with `extra` inserted last; it receives id `self.len()`.
    pub fn appended(&self, extra: &LabeledExample) -> Result<Self> {
        self.domain.check_point(&extra.coords)?;
        let mut out = self.clone();
        out.coords.extend_from_slice(&extra.coords);
        out.labels.push(extra.label);
        Ok(out)
    }

    /// New dataset holding the given ids, in the order given.
    pub fn subset(&self, ids: &[usize]) -> Self {
        let mut coords = Vec::with_capacity(ids.len() * self.domain.d);
        let mut labels = Vec::with_capacity(ids.len());
        for &id in ids {
            coords.extend_from_slice(self.point(id));
            labels.push(self.labels[id]);
        }
        Self {
            domain: self.domain,
            coords,
            labels,
        }
    }

    pub fn positive_ids(&self) -> Vec<usize> {
        (0..self.len()).filter(|&id| self.labels[id]).collect()
    }

    /// The positively labeled examples, insertion order preserved.
    pub fn positives(&self) -> Self {
        self.subset(&self.positive_ids())
    }

    /// Projection of every example on `axis`.
    pub fn projection(&self, axis: usize) -> Vec<u32> {
        (0..self.len()).map(|id| self.coord(id, axis)).collect()
    }

    /// Hex SHA-256 of the domain, coordinates and labels.
    pub fn content_hash(&self) -> String {
        let mut bytes = Vec::with_capacity(16 + self.coords.len() * 4 + self.labels.len());
        bytes.extend_from_slice(&(self.domain.d as u64).to_le_bytes());
        bytes.extend_from_slice(&self.domain.x_max.to_le_bytes());
        for c in &self.coords {
            bytes.extend_from_slice(&c.to_le_bytes());
        }
        bytes.extend(self.labels.iter().map(|&l| l as u8));
        sha256_hex(&bytes)
    }

    fn check_axis(&self, axis: usize) -> Result<()> {
        if axis >= self.domain.d {
            return Err(Error::InvalidAxis {
                axis,
                d: self.domain.d,
            });
        }
        Ok(())
    }

    /// Compares two ids by rank along `axis`, highest rank first.
    #[inline]
    pub fn cmp_desc(&self, axis: usize, a: usize, b: usize) -> Ordering {
        self.coord(b, axis)
            .cmp(&self.coord(a, axis))
            .then_with(|| a.cmp(&b))
    }

    /// The `k` highest-ranked ids among `ids` along `axis`, highest first.
    pub fn top_k_ids(&self, ids: &[usize], axis: usize, k: usize) -> Vec<usize> {
        let mut scratch = ids.to_vec();
        select_top(self, &mut scratch, axis, k);
        scratch.truncate(k);
        scratch
    }

    /// The `k` lowest-ranked ids among `ids` along `axis`, lowest first.
    pub fn bottom_k_ids(&self, ids: &[usize], axis: usize, k: usize) -> Vec<usize> {
        let mut scratch = ids.to_vec();
        let n = scratch.len();
        select_top(self, &mut scratch, axis, n - k);
        let mut bottom = scratch.split_off(n - k);
        bottom.sort_unstable_by(|&a, &b| self.cmp_desc(axis, b, a));
        bottom
    }

    /// The `k` examples with the largest `axis` coordinate, as a new dataset in
    /// insertion order. `axis` is 0-based.
    pub fn top_k_along_axis(&self, axis: usize, k: usize) -> Result<Self> {
        self.check_axis(axis)?;
        if k > self.len() {
            return Err(Error::InvalidCount { k, len: self.len() });
        }
        let all: Vec<usize> = (0..self.len()).collect();
        let mut ids = self.top_k_ids(&all, axis, k);
        ids.sort_unstable();
        Ok(self.subset(&ids))
    }

    /// The `k` examples with the smallest `axis` coordinate, in insertion order.
    pub fn bottom_k_along_axis(&self, axis: usize, k: usize) -> Result<Self> {
        self.check_axis(axis)?;
        if k > self.len() {
            return Err(Error::InvalidCount { k, len: self.len() });
        }
        let all: Vec<usize> = (0..self.len()).collect();
        let mut ids = self.bottom_k_ids(&all, axis, k);
        ids.sort_unstable();
        Ok(self.subset(&ids))
    }
}

/// Reorders `ids` so its first `k` entries are the top `k` by rank, sorted
/// highest first. The tail is left in unspecified order.
pub(crate) fn select_top(data: &Dataset, ids: &mut [usize], axis: usize, k: usize) {
    debug_assert!(k <= ids.len());
    if k == 0 {
        return;
    }
    if k < ids.len() {
        ids.select_nth_unstable_by(k - 1, |&a, &b| data.cmp_desc(axis, a, b));
    }
    ids[..k].sort_unstable_by(|&a, &b| data.cmp_desc(axis, a, b));
}

/// The hypothesis `h_p`: `x` is positive iff `x_i <= p_i` on every axis.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OriginRectangle {
    pub corner: Vec<u32>,
}

impl OriginRectangle {
    pub fn new(corner: Vec<u32>) -> Self {
        Self { corner }
    }

    pub fn dim(&self) -> usize {
        self.corner.len()
    }

    pub fn predict(&self, x: &[u32]) -> Result<bool> {
        if x.len() != self.corner.len() {
            return Err(Error::DimensionMismatch {
                expected: self.corner.len(),
                got: x.len(),
            });
        }
        Ok(self.contains(x))
    }

    #[inline]
    pub(crate) fn contains(&self, x: &[u32]) -> bool {
        x.iter().zip(&self.corner).all(|(xi, pi)| xi <= pi)
    }
}

/// Learner output: either a rectangle or the hypothesis labeling everything 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Hypothesis {
    Empty { d: usize },
    Rectangle(OriginRectangle),
}

impl Hypothesis {
    pub fn dim(&self) -> usize {
        match self {
            Hypothesis::Empty { d } => *d,
            Hypothesis::Rectangle(r) => r.dim(),
        }
    }

    pub fn predict(&self, x: &[u32]) -> Result<bool> {
        match self {
            Hypothesis::Empty { d } => {
                if x.len() != *d {
                    return Err(Error::DimensionMismatch {
                        expected: *d,
                        got: x.len(),
                    });
                }
                Ok(false)
            }
            Hypothesis::Rectangle(r) => r.predict(x),
        }
    }

    pub fn rectangle(&self) -> Option<&OriginRectangle> {
        match self {
            Hypothesis::Rectangle(r) => Some(r),
            Hypothesis::Empty { .. } => None,
        }
    }
}

impl From<OriginRectangle> for Hypothesis {
    fn from(r: OriginRectangle) -> Self {
        Hypothesis::Rectangle(r)
    }
}

/// Exact count of disagreements; `ratio()` is the empirical error.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorCount {
    pub mistakes: usize,
    pub total: usize,
}

impl ErrorCount {
    pub fn ratio(&self) -> f64 {
        self.mistakes as f64 / self.total as f64
    }
}

pub fn empirical_error(h: &Hypothesis, sample: &Dataset) -> Result<ErrorCount> {
    if sample.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if h.dim() != sample.dim() {
        return Err(Error::DimensionMismatch {
            expected: sample.dim(),
            got: h.dim(),
        });
    }
    let mut mistakes = 0;
    for id in 0..sample.len() {
        if h.predict(sample.point(id))? != sample.label(id) {
            mistakes += 1;
        }
    }
    Ok(ErrorCount {
        mistakes,
        total: sample.len(),
    })
}

const MASS_TOLERANCE: f64 = 1e-12;

/// A finitely supported distribution over labeled grid points.
#[derive(Debug, Clone, PartialEq)]
pub struct ExplicitDistribution {
    domain: GridDomain,
    support: Vec<(LabeledExample, f64)>,
}

impl ExplicitDistribution {
    pub fn new(domain: GridDomain, support: Vec<(LabeledExample, f64)>) -> Result<Self> {
        if support.is_empty() {
            return Err(Error::InvalidDistribution("empty support".into()));
        }
        let mut total = 0.0;
        for (ex, p) in &support {
            domain.check_point(&ex.coords)?;
            if !(p.is_finite() && *p >= 0.0) {
                return Err(Error::InvalidDistribution(format!("bad probability {p}")));
            }
            total += p;
        }
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {total}"
            )));
        }
        Ok(Self { domain, support })
    }

    pub fn domain(&self) -> GridDomain {
        self.domain
    }

    pub fn support(&self) -> &[(LabeledExample, f64)] {
        &self.support
    }

    /// Cumulative masses, for inverse-CDF sampling.
    pub(crate) fn cumulative(&self) -> Vec<f64> {
        let mut acc = 0.0;
        self.support
            .iter()
            .map(|(_, p)| {
                acc += p;
                acc
            })
            .collect()
    }
}

pub fn generalization_error(h: &Hypothesis, dist: &ExplicitDistribution) -> Result<f64> {
    if h.dim() != dist.domain.d {
        return Err(Error::DimensionMismatch {
            expected: dist.domain.d,
            got: h.dim(),
        });
    }
    let mut err = 0.0;
    for (ex, p) in &dist.support {
        if h.predict(&ex.coords)? != ex.label {
            err += p;
        }
    }
    Ok(err)
}
