//! Hybrid fuzzy-genetic scheduler.
//!
//! Two populations of random schedules are kept side by side. Type A
//! chromosomes are scored by the (job length, mips, RAM) fuzzy system and
//! type B chromosomes by the (job length, bandwidth) system. Each generation
//! the fittest chromosome of each population is picked; if the two carry the
//! same assignment the search stops. Otherwise they are crossed gene by gene:
//! every job keeps whichever parent's VM the four-input crossover system
//! rates higher. The child joins both populations and the loop repeats.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cloud::{ExecTable, Infrastructure, Job, Schedule};
use crate::error::{Error, Result};
use crate::fuzzy::{SuitabilityModel, Variant};

/// Suitabilities closer than this are treated as equal during crossover.
pub const TIE_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GaConfig {
    pub population_size_per_type: usize,
    /// Safety cap; homolog convergence is not guaranteed.
    pub max_generations: usize,
    pub seed: u64,
    /// Per-gene probability of reassigning the child's VM at random.
    pub mutation_rate: f64,
    /// Rebalance the evolved schedule with a bottleneck move/swap descent.
    pub local_search: bool,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            population_size_per_type: 20,
            max_generations: 100,
            seed: 0,
            mutation_rate: 0.0,
            local_search: true,
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<()> {
        if self.population_size_per_type < 2 {
            return Err(Error::Config(format!(
                "population_size_per_type must be at least 2, got {}",
                self.population_size_per_type
            )));
        }
        if self.max_generations < 1 {
            return Err(Error::Config("max_generations must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.mutation_rate) {
            return Err(Error::Config(format!(
                "mutation_rate must lie in [0, 1], got {}",
                self.mutation_rate
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ChromosomeType {
    TypeA,
    TypeB,
}

impl ChromosomeType {
    pub fn variant(self) -> Variant {
        match self {
            ChromosomeType::TypeA => Variant::TypeA,
            ChromosomeType::TypeB => Variant::TypeB,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Gene {
    pub job_id: usize,
    pub vm_id: usize,
}

/// One candidate schedule. Genes are ordered by job id.
#[derive(Debug, Clone, PartialEq)]
pub struct Chromosome {
    genes: Vec<Gene>,
    pub kind: ChromosomeType,
    pub fitness: f64,
}

impl Chromosome {
    fn from_assignment(assignment: &[usize], kind: ChromosomeType) -> Self {
        let genes = assignment
            .iter()
            .enumerate()
            .map(|(job_id, &vm_id)| Gene { job_id, vm_id })
            .collect();
        Self {
            genes,
            kind,
            fitness: 0.0,
        }
    }

    pub fn genes(&self) -> &[Gene] {
        &self.genes
    }

    pub fn assignment(&self) -> Vec<usize> {
        self.genes.iter().map(|g| g.vm_id).collect()
    }

    pub fn vm_of(&self, job: usize) -> usize {
        self.genes[job].vm_id
    }

    pub fn to_schedule(&self) -> Schedule {
        Schedule::new(self.assignment())
    }
}

/// Whether two chromosomes assign every job to the same VM.
pub fn is_homolog(a: &Chromosome, b: &Chromosome) -> bool {
    a.genes.len() == b.genes.len() && a.genes.iter().zip(&b.genes).all(|(x, y)| x.vm_id == y.vm_id)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    Homolog,
    Cap,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostics {
    /// Selection rounds entered, including the one that detected homology.
    pub generations: usize,
    pub stop_reason: StopReason,
    /// Fitness of the last selected type A and type B parents.
    pub final_fitness: (f64, f64),
    /// Mean crossover suitability of the returned schedule.
    pub crossover_score: f64,
    /// Best mean crossover suitability seen after each generation.
    pub best_history: Vec<f64>,
    /// Moves and swaps applied by the local search phase.
    pub local_steps: usize,
}

#[derive(Debug, Clone)]
pub struct GaOutcome {
    pub schedule: Schedule,
    pub diagnostics: Diagnostics,
}

/// Scheduler state for one instance: cached suitabilities of every feasible
/// (job, VM) pair under each fuzzy variant.
pub struct HybridGa<'a> {
    cfg: GaConfig,
    table: ExecTable,
    vm_count: usize,
    // indexed [variant][job * vm_count + vm]; infeasible pairs hold NaN
    suitability: [Vec<f64>; 3],
    _jobs: &'a [Job],
}

impl<'a> HybridGa<'a> {
    pub fn new(
        jobs: &'a [Job],
        infra: &Infrastructure,
        model: &SuitabilityModel,
        cfg: GaConfig,
    ) -> Result<Self> {
        cfg.validate()?;
        let table = ExecTable::new(jobs, infra)?;
        let vm_count = infra.vms().len();
        let mut suitability = [
            vec![f64::NAN; jobs.len() * vm_count],
            vec![f64::NAN; jobs.len() * vm_count],
            vec![f64::NAN; jobs.len() * vm_count],
        ];
        for (j, job) in jobs.iter().enumerate() {
            for &v in table.feasible(j) {
                let vm = &infra.vms()[v];
                for variant in Variant::ALL {
                    suitability[variant as usize][j * vm_count + v] =
                        model.suitability(job, vm, variant)?;
                }
            }
        }
        Ok(Self {
            cfg,
            table,
            vm_count,
            suitability,
            _jobs: jobs,
        })
    }

    pub fn config(&self) -> &GaConfig {
        &self.cfg
    }

    pub fn job_count(&self) -> usize {
        self.table.job_count()
    }

    pub fn exec_table(&self) -> &ExecTable {
        &self.table
    }

    /// Cached suitability of `job` on `vm`; NaN if the pair is infeasible.
    pub fn suitability(&self, variant: Variant, job: usize, vm: usize) -> f64 {
        self.suitability[variant as usize][job * self.vm_count + vm]
    }

    fn mean_suitability(&self, variant: Variant, c: &Chromosome) -> f64 {
        if c.genes.is_empty() {
            return 0.0;
        }
        let sum: f64 = c
            .genes
            .iter()
            .map(|g| self.suitability(variant, g.job_id, g.vm_id))
            .sum();
        sum / c.genes.len() as f64
    }

    /// Mean per-gene suitability under the chromosome's own variant.
    pub fn fitness(&self, c: &Chromosome) -> f64 {
        self.mean_suitability(c.kind.variant(), c)
    }

    /// Mean per-gene suitability under the four-input crossover system.
    pub fn crossover_score(&self, c: &Chromosome) -> f64 {
        self.mean_suitability(Variant::Crossover, c)
    }

    /// Builds a scored chromosome from an explicit assignment.
    pub fn chromosome(&self, assignment: &[usize], kind: ChromosomeType) -> Result<Chromosome> {
        if assignment.len() != self.job_count() {
            return Err(Error::PartialSchedule {
                assigned: assignment.len(),
                jobs: self.job_count(),
            });
        }
        for (j, &v) in assignment.iter().enumerate() {
            if !self.table.feasible(j).contains(&v) {
                return Err(Error::UnknownVm { job: j, vm: v });
            }
        }
        let mut c = Chromosome::from_assignment(assignment, kind);
        c.fitness = self.fitness(&c);
        Ok(c)
    }

    fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.cfg.seed)
    }

    fn random_population(&self, rng: &mut ChaCha8Rng, kind: ChromosomeType) -> Vec<Chromosome> {
        (0..self.cfg.population_size_per_type)
            .map(|_| {
                let assignment: Vec<usize> = (0..self.job_count())
                    .map(|j| *self.table.feasible(j).choose(rng).expect("non-empty"))
                    .collect();
                let mut c = Chromosome::from_assignment(&assignment, kind);
                c.fitness = self.fitness(&c);
                c
            })
            .collect()
    }

    /// Two scored random populations; every gene's VM is drawn uniformly
    /// from the VMs able to host that job.
    pub fn init_populations(&self) -> (Vec<Chromosome>, Vec<Chromosome>) {
        let mut rng = self.rng();
        let a = self.random_population(&mut rng, ChromosomeType::TypeA);
        let b = self.random_population(&mut rng, ChromosomeType::TypeB);
        (a, b)
    }

    /// Per-gene fuzzy crossover: keep parent A's VM unless parent B's VM is
    /// strictly more suitable for that job.
    pub fn crossover(&self, a: &Chromosome, b: &Chromosome) -> Chromosome {
        let genes = a
            .genes
            .iter()
            .zip(&b.genes)
            .map(|(ga, gb)| {
                let sa = self.suitability(Variant::Crossover, ga.job_id, ga.vm_id);
                let sb = self.suitability(Variant::Crossover, gb.job_id, gb.vm_id);
                if sb > sa + TIE_EPS {
                    *gb
                } else {
                    *ga
                }
            })
            .collect();
        let mut child = Chromosome {
            genes,
            kind: ChromosomeType::TypeA,
            fitness: 0.0,
        };
        child.fitness = self.fitness(&child);
        child
    }

    fn mutate(&self, rng: &mut ChaCha8Rng, c: &mut Chromosome) {
        if self.cfg.mutation_rate <= 0.0 {
            return;
        }
        for g in &mut c.genes {
            if rng.gen::<f64>() < self.cfg.mutation_rate {
                g.vm_id = *self.table.feasible(g.job_id).choose(rng).expect("non-empty");
            }
        }
        c.fitness = self.fitness(c);
    }

    /// Runs from freshly initialized populations.
    pub fn run(&self) -> GaOutcome {
        let mut rng = self.rng();
        let a = self.random_population(&mut rng, ChromosomeType::TypeA);
        let b = self.random_population(&mut rng, ChromosomeType::TypeB);
        let out = self.evolve(a, b, &mut rng);
        self.finish(out)
    }

    /// Runs from caller-supplied populations. Mutation, if enabled, draws
    /// from a generator seeded with the configured seed.
    pub fn run_from(&self, pop_a: Vec<Chromosome>, pop_b: Vec<Chromosome>) -> Result<GaOutcome> {
        if pop_a.is_empty() || pop_b.is_empty() {
            return Err(Error::Config("both populations must be non-empty".into()));
        }
        let mut rng = self.rng();
        let out = self.evolve(pop_a, pop_b, &mut rng);
        Ok(self.finish(out))
    }

    fn finish(&self, mut out: GaOutcome) -> GaOutcome {
        if self.cfg.local_search {
            out.diagnostics.local_steps = self.rebalance(&mut out.schedule.assignment);
        }
        out
    }

    /// Load descent. VMs are visited from busiest to idlest; the first one
    /// that can shed load takes a step: one of its jobs moves to another VM,
    /// or swaps with a job there, such that both affected loads end below the
    /// visited VM's old load. Among valid steps the lowest resulting pair
    /// maximum wins, then the larger crossover suitability gain. The sorted
    /// load vector falls lexicographically with every step, so the descent
    /// terminates; a step cap guards against float noise. Returns the number
    /// of steps taken.
    pub fn rebalance(&self, assignment: &mut [usize]) -> usize {
        let n = assignment.len();
        let t = &self.table;
        let mut loads = t.loads(assignment);
        let mut on_vm: Vec<Vec<usize>> = vec![Vec::new(); self.vm_count];
        for (j, &v) in assignment.iter().enumerate() {
            on_vm[v].push(j);
        }
        let suit = |j: usize, v: usize| self.suitability(Variant::Crossover, j, v);
        let cap = 50 * n.max(1);
        let mut steps = 0;
        let mut order: Vec<usize> = (0..self.vm_count).collect();
        'descent: while steps < cap {
            order.sort_by(|&a, &b| loads[b].total_cmp(&loads[a]).then(a.cmp(&b)));
            for &top in &order {
                if let Some((j, u, swap)) = self.best_step(top, &loads, &on_vm, &suit) {
                    loads[top] -= t.time(j, top);
                    loads[u] += t.time(j, u);
                    on_vm[top].retain(|&x| x != j);
                    on_vm[u].push(j);
                    assignment[j] = u;
                    if let Some(k) = swap {
                        loads[u] -= t.time(k, u);
                        loads[top] += t.time(k, top);
                        on_vm[u].retain(|&x| x != k);
                        on_vm[top].push(k);
                        assignment[k] = top;
                    }
                    steps += 1;
                    continue 'descent;
                }
            }
            break;
        }
        steps
    }

    fn best_step(
        &self,
        top: usize,
        loads: &[f64],
        on_vm: &[Vec<usize>],
        suit: &impl Fn(usize, usize) -> f64,
    ) -> Option<(usize, usize, Option<usize>)> {
        let t = &self.table;
        let limit = loads[top] * (1.0 - 1e-12);
        // (resulting pair max, suitability gain, job on top, other vm, swapped job)
        let mut best: Option<(f64, f64, usize, usize, Option<usize>)> = None;
        let mut offer = |cand: (f64, f64, usize, usize, Option<usize>)| {
            if cand.0 < limit && best.is_none_or(|b| cand.0 < b.0 || (cand.0 == b.0 && cand.1 > b.1 + TIE_EPS)) {
                best = Some(cand);
            }
        };
        for &j in &on_vm[top] {
            let rest = loads[top] - t.time(j, top);
            for &u in t.feasible(j) {
                if u == top || loads[u] >= limit {
                    continue;
                }
                let moved = loads[u] + t.time(j, u);
                offer((moved.max(rest), suit(j, u) - suit(j, top), j, u, None));
                for &k in &on_vm[u] {
                    if suit(k, top).is_nan() {
                        continue;
                    }
                    let new_top = rest + t.time(k, top);
                    let new_u = moved - t.time(k, u);
                    let gain = suit(j, u) + suit(k, top) - suit(j, top) - suit(k, u);
                    offer((new_top.max(new_u), gain, j, u, Some(k)));
                }
            }
        }
        best.map(|b| (b.2, b.3, b.4))
    }

    fn evolve(&self, mut pop_a: Vec<Chromosome>, mut pop_b: Vec<Chromosome>, rng: &mut ChaCha8Rng) -> GaOutcome {
        let mut best: Option<(f64, Chromosome)> = None;
        let consider = |c: &Chromosome, best: &mut Option<(f64, Chromosome)>| {
            let score = self.crossover_score(c);
            if best.as_ref().is_none_or(|(s, _)| score > *s) {
                *best = Some((score, c.clone()));
            }
        };
        for c in pop_a.iter().chain(&pop_b) {
            consider(c, &mut best);
        }

        let mut history = Vec::new();
        for generation in 1..=self.cfg.max_generations {
            let (ia, ib) = select_parents(&pop_a, &pop_b);
            let (pa, pb) = (&pop_a[ia], &pop_b[ib]);
            let final_fitness = (pa.fitness, pb.fitness);
            if is_homolog(pa, pb) {
                let pick = if self.crossover_score(pb) > self.crossover_score(pa) { pb } else { pa };
                history.push(best.as_ref().map_or(0.0, |(s, _)| *s));
                return GaOutcome {
                    schedule: pick.to_schedule(),
                    diagnostics: Diagnostics {
                        generations: generation,
                        stop_reason: StopReason::Homolog,
                        final_fitness,
                        crossover_score: self.crossover_score(pick),
                        best_history: history,
                        local_steps: 0,
                    },
                };
            }
            let mut child = self.crossover(pa, pb);
            self.mutate(rng, &mut child);
            consider(&child, &mut best);
            history.push(best.as_ref().map_or(0.0, |(s, _)| *s));

            let mut for_b = child.clone();
            for_b.kind = ChromosomeType::TypeB;
            for_b.fitness = self.fitness(&for_b);
            child.kind = ChromosomeType::TypeA;
            child.fitness = self.fitness(&child);
            pop_a.push(child);
            pop_b.push(for_b);

            if generation == self.cfg.max_generations {
                let (score, chosen) = best.take().expect("populations are non-empty");
                return GaOutcome {
                    schedule: chosen.to_schedule(),
                    diagnostics: Diagnostics {
                        generations: generation,
                        stop_reason: StopReason::Cap,
                        final_fitness,
                        crossover_score: score,
                        best_history: history,
                        local_steps: 0,
                    },
                };
            }
        }
        unreachable!("max_generations >= 1 is validated")
    }
}

/// Index of the fittest chromosome in each population; ties go to the
/// lowest index.
pub fn select_parents(pop_a: &[Chromosome], pop_b: &[Chromosome]) -> (usize, usize) {
    (argmax(pop_a), argmax(pop_b))
}

fn argmax(pop: &[Chromosome]) -> usize {
    let mut best = 0;
    for (i, c) in pop.iter().enumerate().skip(1) {
        if c.fitness > pop[best].fitness {
            best = i;
        }
    }
    best
}

/// Runs the hybrid scheduler on one instance.
pub fn run(
    jobs: &[Job],
    infra: &Infrastructure,
    model: &SuitabilityModel,
    cfg: &GaConfig,
) -> Result<GaOutcome> {
    Ok(HybridGa::new(jobs, infra, model, cfg.clone())?.run())
}
