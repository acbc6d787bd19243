use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A configuration value violates its documented constraints.
    #[error("configuration error: {0}")]
    Config(String),

    #[error("input arity mismatch: system expects {expected} inputs, got {got}")]
    Arity { expected: usize, got: usize },

    /// The aggregated output region carries no mass. Only reachable with an
    /// incomplete rule base or non-covering fuzzy sets.
    #[error("empty output region")]
    EmptyRegion,

    #[error("job {job} has no feasible VM (requires {required_pes} PEs)")]
    NoFeasibleVm { job: usize, required_pes: u32 },

    #[error("schedule covers {assigned} jobs but the workload has {jobs}")]
    PartialSchedule { assigned: usize, jobs: usize },

    #[error("job {job} is assigned to unknown VM {vm}")]
    UnknownVm { job: usize, vm: usize },

    #[error("job {job} needs {required_pes} PEs but VM {vm} only has {pe_count}")]
    Infeasible {
        job: usize,
        vm: usize,
        required_pes: u32,
        pe_count: u32,
    },

    #[error("instance too large for oracle: {assignments:.3e} assignments exceed the guard of {guard:.0e}")]
    OracleTooLarge { assignments: f64, guard: f64 },

    #[error("scheduler {scheduler} failed on seed {seed}: {source}")]
    Scheduler {
        scheduler: String,
        seed: u64,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("malformed CSV: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn csv(path: impl Into<PathBuf>, source: csv::Error) -> Self {
        Error::Csv {
            path: path.into(),
            source,
        }
    }
}
