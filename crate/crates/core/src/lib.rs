//! Exact distances between partitions of a finite set.
//!
//! The crate computes the misclassification error distance (MED), the Rand
//! distance (RD) and the adjusted Rand distance (ARD) from a confusion
//! matrix, together with their worst-case normalizations and the
//! combinatorial machinery needed to study them over the whole set
//! `N(r, s, n)` of confusion matrices with positive margins. Every criterion
//! is computed as a reduced rational over `i128`; floating values are only a
//! rendering.
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod assignment;
pub mod combinatorics;
mod error;
pub mod extremes;
mod labeling;
mod matrix;
pub mod metrics;
pub mod population;
mod rational;
pub mod report;

pub use assignment::{brute_force_med, med, solve_lsap, Assignment, CostMatrix};
pub use error::{Error, Result};
pub use labeling::Labeling;
pub use matrix::{crosstab, ConfusionMatrix};
pub use metrics::{ard, ari, expected_rd, hamming_empirical, pair_counts, rand_distance, rand_index, PairCounts};
pub use population::{population_dh, population_dm, MassMatrix};
pub use rational::{binomial2, ratio_to_f64, BigRational, Rational};
pub use report::{criteria_report, CriteriaReport, Criterion, Undefined};
