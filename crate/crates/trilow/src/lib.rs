//! Experiment harness for the lower-tail construction in `trilow-core`.
//!
//! [`config`] reads TOML experiment configurations, [`formats`] holds the
//! edge-list, split and KS table formats, [`trials`] streams seeded trial
//! records, [`verify`] runs the two-tier lemma suite, and [`deficit`]
//! estimates the conditional triangle deficit and runs parameter sweeps.
//! Every stochastic result is a function of the config alone: trial seeds
//! are derived from the master seed and trial id, and results are collected
//! in trial order whatever the worker count.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod deficit;
mod error;
pub mod formats;
pub mod stats;
pub mod trials;
pub mod verify;

pub use config::{ExperimentConfig, Mode};
pub use error::{HarnessError, Result};
