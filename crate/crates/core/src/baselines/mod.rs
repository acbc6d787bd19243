//! Comparison schedulers.

mod aco;

pub use aco::{aco_schedule, maco_schedule, run_colony, AcoConfig, AcoRun, Heuristic};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cloud::{ExecTable, Infrastructure, Job, Schedule};
use crate::error::Result;

/// Job `i` goes to position `i mod k` of its own feasible VM list.
pub fn round_robin_schedule(jobs: &[Job], infra: &Infrastructure) -> Result<Schedule> {
    let table = ExecTable::new(jobs, infra)?;
    Ok(Schedule::new(
        (0..jobs.len())
            .map(|j| {
                let feasible = table.feasible(j);
                feasible[j % feasible.len()]
            })
            .collect(),
    ))
}

/// Uniformly random feasible VM per job.
pub fn random_schedule(jobs: &[Job], infra: &Infrastructure, seed: u64) -> Result<Schedule> {
    let table = ExecTable::new(jobs, infra)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(Schedule::new(
        (0..jobs.len())
            .map(|j| *table.feasible(j).choose(&mut rng).expect("non-empty"))
            .collect(),
    ))
}

/// Earliest completion time: longest jobs first, each onto the feasible VM
/// that would finish it soonest. Ties go to the lowest VM id.
pub fn greedy_schedule(jobs: &[Job], infra: &Infrastructure) -> Result<Schedule> {
    let table = ExecTable::new(jobs, infra)?;
    let mut order: Vec<usize> = (0..jobs.len()).collect();
    order.sort_by(|&a, &b| jobs[b].length_mi.total_cmp(&jobs[a].length_mi));
    let mut loads = vec![0.0; table.vm_count()];
    let mut assignment = vec![0; jobs.len()];
    for j in order {
        let mut best = None;
        for &v in table.feasible(j) {
            let finish = loads[v] + table.time(j, v);
            if best.is_none_or(|(f, _)| finish < f) {
                best = Some((finish, v));
            }
        }
        let (finish, v) = best.expect("non-empty");
        loads[v] = finish;
        assignment[j] = v;
    }
    Ok(Schedule::new(assignment))
}
