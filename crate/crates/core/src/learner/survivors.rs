//! Remaining-data bookkeeping for the deletion-based learners.
//!
//! Two interchangeable implementations produce identical results:
//! [`ScanSurvivors`] keeps a list of live ids and selects the top block in
//! linear time per iteration; [`IndexedSurvivors`] walks per-axis orders
//! sorted once up front ([`SortedAxes`]), so repeated runs on one dataset cost
//! time proportional to the block size rather than the dataset size.

use crate::model::{select_top, Dataset};

pub(crate) trait Survivors {
    fn len(&self) -> usize;

    /// The `k` highest-ranked live ids along `axis`, highest first.
    fn top_block(&mut self, axis: usize, k: usize) -> Vec<usize>;

    /// The `k` lowest-ranked live ids along `axis`, lowest first.
    fn bottom_block(&mut self, axis: usize, k: usize) -> Vec<usize>;

    /// Removes every live id whose `axis` coordinate is `>= threshold`;
    /// returns them highest-ranked first.
    fn remove_at_or_above(&mut self, axis: usize, threshold: u32) -> Vec<usize>;

    /// Removes the given live ids.
    fn remove_ids(&mut self, ids: &[usize]);
}

pub(crate) struct ScanSurvivors<'a> {
    data: &'a Dataset,
    alive: Vec<usize>,
    scratch: Vec<usize>,
}

impl<'a> ScanSurvivors<'a> {
    pub fn new(data: &'a Dataset) -> Self {
        Self {
            data,
            alive: (0..data.len()).collect(),
            scratch: Vec::new(),
        }
    }
}

impl Survivors for ScanSurvivors<'_> {
    fn len(&self) -> usize {
        self.alive.len()
    }

    fn top_block(&mut self, axis: usize, k: usize) -> Vec<usize> {
        self.scratch.clear();
        self.scratch.extend_from_slice(&self.alive);
        select_top(self.data, &mut self.scratch, axis, k);
        self.scratch[..k].to_vec()
    }

    fn bottom_block(&mut self, axis: usize, k: usize) -> Vec<usize> {
        self.data.bottom_k_ids(&self.alive, axis, k)
    }

    fn remove_at_or_above(&mut self, axis: usize, threshold: u32) -> Vec<usize> {
        let data = self.data;
        let mut removed = Vec::new();
        self.alive.retain(|&id| {
            if data.coord(id, axis) >= threshold {
                removed.push(id);
                false
            } else {
                true
            }
        });
        removed.sort_unstable_by(|&a, &b| data.cmp_desc(axis, a, b));
        removed
    }

    fn remove_ids(&mut self, ids: &[usize]) {
        let mut doomed = ids.to_vec();
        doomed.sort_unstable();
        self.alive.retain(|id| doomed.binary_search(id).is_err());
    }
}

/// Per-axis orderings of all ids, highest rank first.
#[derive(Debug, Clone)]
pub struct SortedAxes {
    orders: Vec<Vec<u32>>,
}

impl SortedAxes {
    pub fn new(data: &Dataset) -> Self {
        let orders = (0..data.dim())
            .map(|axis| {
                let mut ids: Vec<usize> = (0..data.len()).collect();
                ids.sort_unstable_by(|&a, &b| data.cmp_desc(axis, a, b));
                ids.into_iter().map(|id| id as u32).collect()
            })
            .collect();
        Self { orders }
    }

    /// Orderings for `extended`, which must equal the indexed dataset with
    /// exactly one example appended.
    pub fn with_last_of(&self, extended: &Dataset) -> Self {
        let new_id = extended.len() - 1;
        let orders = self
            .orders
            .iter()
            .enumerate()
            .map(|(axis, order)| {
                let pos = order.partition_point(|&e| {
                    extended.cmp_desc(axis, e as usize, new_id) == std::cmp::Ordering::Less
                });
                let mut out = Vec::with_capacity(order.len() + 1);
                out.extend_from_slice(&order[..pos]);
                out.push(new_id as u32);
                out.extend_from_slice(&order[pos..]);
                out
            })
            .collect();
        Self { orders }
    }

    pub fn axis(&self, axis: usize) -> &[u32] {
        &self.orders[axis]
    }
}

pub(crate) struct IndexedSurvivors<'a> {
    data: &'a Dataset,
    axes: &'a SortedAxes,
    removed: Vec<bool>,
    alive: usize,
}

impl<'a> IndexedSurvivors<'a> {
    pub fn new(data: &'a Dataset, axes: &'a SortedAxes) -> Self {
        Self {
            data,
            axes,
            removed: vec![false; data.len()],
            alive: data.len(),
        }
    }
}

impl Survivors for IndexedSurvivors<'_> {
    fn len(&self) -> usize {
        self.alive
    }

    fn top_block(&mut self, axis: usize, k: usize) -> Vec<usize> {
        let removed = &self.removed;
        self.axes
            .axis(axis)
            .iter()
            .map(|&id| id as usize)
            .filter(|&id| !removed[id])
            .take(k)
            .collect()
    }

    fn bottom_block(&mut self, axis: usize, k: usize) -> Vec<usize> {
        let removed = &self.removed;
        self.axes
            .axis(axis)
            .iter()
            .rev()
            .map(|&id| id as usize)
            .filter(|&id| !removed[id])
            .take(k)
            .collect()
    }

    fn remove_at_or_above(&mut self, axis: usize, threshold: u32) -> Vec<usize> {
        let mut out = Vec::new();
        for &id in self.axes.axis(axis) {
            let id = id as usize;
            if self.data.coord(id, axis) < threshold {
                break;
            }
            if !self.removed[id] {
                self.removed[id] = true;
                out.push(id);
            }
        }
        self.alive -= out.len();
        out
    }

    fn remove_ids(&mut self, ids: &[usize]) {
        for &id in ids {
            if !self.removed[id] {
                self.removed[id] = true;
                self.alive -= 1;
            }
        }
    }
}
