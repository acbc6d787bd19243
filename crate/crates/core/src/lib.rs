//! Fuzzy-genetic task scheduling for simulated cloud infrastructure, with
//! comparison baselines and a reproducible benchmark harness.

pub mod baselines;
pub mod bench;
pub mod cloud;
pub mod error;
pub mod fuzzy;
pub mod ga;

pub use error::{Error, Result};
