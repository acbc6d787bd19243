//! Deterministic seed derivation.
//!
//! Every cell of the experiment grid gets its own seed:
//!
//! ```text
//! cell_seed = mix(mix(master_seed, n_jobs), replication)
//! mix(a, b) = splitmix64(a ^ splitmix64(b))
//! ```
//!
//! The scheduler stream is drawn from the cell seed. Workload and
//! infrastructure streams are drawn from the replication seed instead, so
//! every job count of one replication runs on the same VMs and the workload
//! for `n` jobs is the first `n` jobs of any larger one. Growing `n` then adds
//! work rather than redrawing the instance.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer: a bijection on `u64` with good avalanche.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn mix(a: u64, b: u64) -> u64 {
    splitmix64(a ^ splitmix64(b))
}

pub fn cell_seed(master: u64, n_jobs: usize, replication: usize) -> u64 {
    mix(mix(master, n_jobs as u64), replication as u64)
}

/// A cell seed for a job count no grid can hold.
pub fn replication_seed(master: u64, replication: usize) -> u64 {
    mix(mix(master, u64::MAX), replication as u64)
}

/// Independent random streams drawn from one cell seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    Workload = 1,
    Infrastructure = 2,
    Scheduler = 3,
}

pub fn stream_seed(cell: u64, stream: Stream) -> u64 {
    mix(cell, stream as u64)
}
