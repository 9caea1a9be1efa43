//! Clustering accuracy against ground-truth classes.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AccuracyReport {
    /// `Σ s_l / n`.
    pub accuracy: f64,
    /// Dominant class of each cluster and its count `s_l`; `None` for an empty cluster.
    pub dominant: Vec<Option<(u32, usize)>>,
    /// `contingency[l][c]`: objects of class `c` in cluster `l`.
    pub contingency: Vec<Vec<usize>>,
}

impl AccuracyReport {
    pub fn matched(&self) -> usize {
        self.dominant.iter().flatten().map(|&(_, s)| s).sum()
    }
}

/// Each cluster is credited with its most frequent class (lowest class id on
/// ties). Clusters are scored independently, so two clusters may share a
/// dominant class.
pub fn clustering_accuracy(
    membership: &[u32],
    labels: &[u32],
    k: usize,
    class_count: usize,
) -> Result<AccuracyReport> {
    if membership.len() != labels.len() {
        return Err(Error::LengthMismatch {
            left: membership.len(),
            right: labels.len(),
        });
    }
    if membership.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut contingency = vec![vec![0usize; class_count]; k];
    for (&l, &c) in membership.iter().zip(labels) {
        if l as usize >= k {
            return Err(Error::Index(format!("cluster {l} with k = {k}")));
        }
        if c as usize >= class_count {
            return Err(Error::Index(format!("class {c} with {class_count} classes")));
        }
        contingency[l as usize][c as usize] += 1;
    }
    let dominant: Vec<Option<(u32, usize)>> = contingency
        .iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .fold(None, |best: Option<(u32, usize)>, (c, &count)| match best {
                    Some((_, b)) if b >= count => best,
                    _ if count == 0 => best,
                    _ => Some((c as u32, count)),
                })
        })
        .collect();
    let matched: usize = dominant.iter().flatten().map(|&(_, s)| s).sum();
    Ok(AccuracyReport {
        accuracy: matched as f64 / membership.len() as f64,
        dominant,
        contingency,
    })
}
