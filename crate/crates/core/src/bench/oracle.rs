use crate::cloud::{ExecTable, Infrastructure, Job, Schedule};
use crate::error::{Error, Result};

/// Largest number of feasible assignments the oracle will enumerate.
pub const ORACLE_GUARD: f64 = 1e7;

/// Number of feasible assignments of the instance, as a float so that huge
/// instances do not overflow.
pub fn assignment_count(table: &ExecTable) -> f64 {
    (0..table.job_count())
        .map(|j| table.feasible(j).len() as f64)
        .product()
}

/// Exhaustive minimum-makespan search.
///
/// Assignments are visited in lexicographic order of their VM-id vectors and
/// only a strictly better makespan replaces the incumbent, so ties resolve to
/// the lexicographically smallest assignment. Loads are summed in job order,
/// matching [`crate::cloud::evaluate_schedule`] bit for bit.
pub fn brute_force_optimal(jobs: &[Job], infra: &Infrastructure) -> Result<(Schedule, f64)> {
    let table = ExecTable::new(jobs, infra)?;
    let count = assignment_count(&table);
    if count > ORACLE_GUARD {
        return Err(Error::OracleTooLarge {
            assignments: count,
            guard: ORACLE_GUARD,
        });
    }
    let n = jobs.len();
    let mut digits = vec![0usize; n];
    let mut assignment: Vec<usize> = (0..n).map(|j| table.feasible(j)[0]).collect();
    let mut best = (table.makespan(&assignment), assignment.clone());
    loop {
        // odometer increment, last job fastest
        let mut k = n;
        loop {
            if k == 0 {
                return Ok((Schedule::new(best.1), best.0));
            }
            k -= 1;
            digits[k] += 1;
            if digits[k] < table.feasible(k).len() {
                assignment[k] = table.feasible(k)[digits[k]];
                break;
            }
            digits[k] = 0;
            assignment[k] = table.feasible(k)[0];
        }
        let makespan = table.makespan(&assignment);
        if makespan < best.0 {
            best = (makespan, assignment.clone());
        }
    }
}
