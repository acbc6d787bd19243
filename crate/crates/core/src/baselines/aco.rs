use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cloud::{ExecTable, Infrastructure, Job, Schedule};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AcoConfig {
    pub ants: usize,
    pub iterations: usize,
    /// Pheromone exponent.
    pub alpha: f64,
    /// Heuristic exponent.
    pub beta: f64,
    /// Evaporation rate, strictly inside (0, 1).
    pub rho: f64,
    /// Deposit numerator; the iteration-best ant lays `q / makespan`.
    pub q: f64,
    pub seed: u64,
}

impl Default for AcoConfig {
    fn default() -> Self {
        Self {
            ants: 10,
            iterations: 50,
            alpha: 1.0,
            beta: 2.0,
            rho: 0.5,
            q: 100.0,
            seed: 0,
        }
    }
}

impl AcoConfig {
    pub fn validate(&self) -> Result<()> {
        if self.ants == 0 || self.iterations == 0 {
            return Err(Error::Config("ants and iterations must be at least 1".into()));
        }
        if !(self.rho > 0.0 && self.rho < 1.0) {
            return Err(Error::Config(format!("rho must lie in (0, 1), got {}", self.rho)));
        }
        if !(self.alpha.is_finite() && self.beta.is_finite() && self.q.is_finite()) {
            return Err(Error::Config("alpha, beta and q must be finite".into()));
        }
        Ok(())
    }
}

/// Heuristic desirability used while an ant builds its assignment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Heuristic {
    /// `1 / execution_time`
    Speed,
    /// `1 / (execution_time + busy time the ant already put on the VM)`
    LoadAware,
}

#[derive(Debug, Clone)]
pub struct AcoRun {
    pub schedule: Schedule,
    pub makespan: f64,
    /// Global-best makespan after each iteration.
    pub best_history: Vec<f64>,
}

#[inline]
fn pow(x: f64, e: f64) -> f64 {
    if e == 1.0 {
        x
    } else if e == 2.0 {
        x * x
    } else {
        x.powf(e)
    }
}

/// Roulette-wheel pick over `weights`; falls back to a uniform pick when the
/// total weight is zero or not finite.
fn roulette(rng: &mut ChaCha8Rng, weights: &[f64]) -> usize {
    let total: f64 = weights.iter().sum();
    if !(total > 0.0 && total.is_finite()) {
        return rng.gen_range(0..weights.len());
    }
    let mut r = rng.gen::<f64>() * total;
    let mut last_positive = 0;
    for (i, &w) in weights.iter().enumerate() {
        if w > 0.0 {
            if r < w {
                return i;
            }
            r -= w;
            last_positive = i;
        }
    }
    last_positive
}

/// Ant colony search over job-to-VM assignments.
///
/// Ants assign jobs in id order. After every iteration all pheromone
/// evaporates and the iteration-best ant deposits on its edges. Heuristic
/// values are normalized by the per-decision maximum before exponentiation,
/// which leaves the selection probabilities unchanged while keeping large
/// `beta` finite.
pub fn run_colony(
    jobs: &[Job],
    infra: &Infrastructure,
    cfg: &AcoConfig,
    heuristic: Heuristic,
) -> Result<AcoRun> {
    cfg.validate()?;
    let table = ExecTable::new(jobs, infra)?;
    let (n, m) = (table.job_count(), table.vm_count());
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut tau = vec![1.0; n * m];
    let mut tau_pow = vec![0.0; n * m];

    // static part of the Speed heuristic, normalized per job
    let speed_pow: Vec<f64> = (0..n)
        .flat_map(|j| {
            let fastest = table
                .feasible(j)
                .iter()
                .map(|&v| table.time(j, v))
                .fold(f64::INFINITY, f64::min);
            let table = &table;
            (0..m).map(move |v| pow(fastest / table.time(j, v), cfg.beta))
        })
        .collect();

    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut history = Vec::with_capacity(cfg.iterations);
    let mut weights = Vec::with_capacity(m);
    let mut loads = vec![0.0; m];
    let mut assignment = vec![0usize; n];

    for _ in 0..cfg.iterations {
        for (p, t) in tau_pow.iter_mut().zip(&tau) {
            *p = pow(*t, cfg.alpha);
        }
        let mut iter_best: Option<(f64, Vec<usize>)> = None;
        for _ in 0..cfg.ants {
            loads.iter_mut().for_each(|l| *l = 0.0);
            for j in 0..n {
                let feasible = table.feasible(j);
                weights.clear();
                match heuristic {
                    Heuristic::Speed => {
                        weights.extend(feasible.iter().map(|&v| tau_pow[j * m + v] * speed_pow[j * m + v]));
                    }
                    Heuristic::LoadAware => {
                        let cost = |v: usize| table.time(j, v) + loads[v];
                        let cheapest = feasible.iter().map(|&v| cost(v)).fold(f64::INFINITY, f64::min);
                        weights.extend(feasible.iter().map(|&v| {
                            let eta = if cost(v) > 0.0 { cheapest / cost(v) } else { 1.0 };
                            tau_pow[j * m + v] * pow(eta, cfg.beta)
                        }));
                    }
                }
                let v = feasible[roulette(&mut rng, &weights)];
                assignment[j] = v;
                loads[v] += table.time(j, v);
            }
            let makespan = loads.iter().copied().fold(0.0, f64::max);
            if iter_best.as_ref().is_none_or(|(b, _)| makespan < *b) {
                iter_best = Some((makespan, assignment.clone()));
            }
        }
        let (iter_makespan, iter_assignment) = iter_best.expect("ants >= 1");
        tau.iter_mut().for_each(|t| *t *= 1.0 - cfg.rho);
        let deposit = if iter_makespan > 0.0 { cfg.q / iter_makespan } else { cfg.q };
        for (j, &v) in iter_assignment.iter().enumerate() {
            tau[j * m + v] += deposit;
        }
        if best.as_ref().is_none_or(|(b, _)| iter_makespan < *b) {
            best = Some((iter_makespan, iter_assignment));
        }
        history.push(best.as_ref().expect("set above").0);
    }

    let (makespan, assignment) = best.expect("iterations >= 1");
    Ok(AcoRun {
        schedule: Schedule::new(assignment),
        makespan,
        best_history: history,
    })
}

/// Classic ACO with the execution-speed heuristic.
pub fn aco_schedule(jobs: &[Job], infra: &Infrastructure, cfg: &AcoConfig) -> Result<Schedule> {
    run_colony(jobs, infra, cfg, Heuristic::Speed).map(|r| r.schedule)
}

/// Modified ACO: the heuristic accounts for the busy time the ant has
/// already placed on each VM. A best-effort reconstruction of the load-aware
/// variants common in cloud scheduling work.
pub fn maco_schedule(jobs: &[Job], infra: &Infrastructure, cfg: &AcoConfig) -> Result<Schedule> {
    run_colony(jobs, infra, cfg, Heuristic::LoadAware).map(|r| r.schedule)
}
