use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::{Error, Result};

/// A clustering of `n` objects given as one opaque token per object.
///
/// Tokens are mapped to contiguous cluster indices `0..r` in order of first
/// occurrence, so the mapping is deterministic for a given input order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Labeling<T> {
    tokens: Vec<T>,
    indices: Vec<usize>,
}

impl<T: Ord + Clone> Labeling<T> {
    pub fn new<I: IntoIterator<Item = T>>(labels: I) -> Result<Self> {
        let mut lookup = BTreeMap::new();
        let mut tokens = Vec::new();
        let indices: Vec<usize> = labels
            .into_iter()
            .map(|label| {
                *lookup.entry(label).or_insert_with_key(|key| {
                    tokens.push(key.clone());
                    tokens.len() - 1
                })
            })
            .collect();
        if indices.is_empty() {
            return Err(Error::Empty);
        }
        Ok(Self { tokens, indices })
    }
}

impl<T> Labeling<T> {
    /// Number of objects.
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Number of distinct clusters.
    pub fn cluster_count(&self) -> usize {
        self.tokens.len()
    }

    /// Cluster index of every object.
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    /// Distinct tokens in first-occurrence order; `tokens()[k]` names cluster `k`.
    pub fn tokens(&self) -> &[T] {
        &self.tokens
    }
}
