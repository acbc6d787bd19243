//! Experiment harness: the job-count sweep, seeded paired instances, CSV and
//! SVG output, and the exhaustive oracle for small instances.

pub mod chart;
pub mod oracle;
pub mod report;
pub mod seed;

pub use chart::{emit_charts, render_svg, Metric};
pub use oracle::{assignment_count, brute_force_optimal, ORACLE_GUARD};
pub use report::{aggregate, emit_csv, format_sig6, parse_csv, write_csv, ExperimentRow, Stat, SummaryRow, CSV_HEADER};
pub use seed::{cell_seed, mix, replication_seed, splitmix64, stream_seed, Stream};

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::{greedy_schedule, random_schedule, round_robin_schedule, run_colony, AcoConfig, Heuristic};
use crate::cloud::{
    evaluate_schedule, generate_infrastructure, generate_workload_with, DiMode, InfraConfig, Infrastructure, Job,
    Schedule, WorkloadConfig,
};
use crate::error::{Error, Result};
use crate::fuzzy::{FuzzyConfig, SuitabilityModel};
use crate::ga::{GaConfig, HybridGa};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum SchedulerKind {
    Hybrid,
    Aco,
    Maco,
    RoundRobin,
    Random,
    Greedy,
}

impl SchedulerKind {
    pub const ALL: [SchedulerKind; 6] = [
        SchedulerKind::Hybrid,
        SchedulerKind::Aco,
        SchedulerKind::Maco,
        SchedulerKind::RoundRobin,
        SchedulerKind::Random,
        SchedulerKind::Greedy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SchedulerKind::Hybrid => "hybrid",
            SchedulerKind::Aco => "aco",
            SchedulerKind::Maco => "maco",
            SchedulerKind::RoundRobin => "round_robin",
            SchedulerKind::Random => "random",
            SchedulerKind::Greedy => "greedy",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }
}

impl std::fmt::Display for SchedulerKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub job_counts: Vec<usize>,
    pub replications: usize,
    pub master_seed: u64,
    pub schedulers: Vec<SchedulerKind>,
    pub di_mode: DiMode,
    pub output_dir: PathBuf,
    /// Worker threads for the grid; `None` uses the global pool.
    pub threads: Option<usize>,
    /// Fill `wall_clock_ms`. Off by default so output files are reproducible.
    pub record_timing: bool,
    pub workload: WorkloadConfig,
    pub infrastructure: InfraConfig,
    pub ga: GaConfig,
    pub aco: AcoConfig,
    pub fuzzy: FuzzyConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            job_counts: (1..=10).map(|k| k * 100).collect(),
            replications: 10,
            master_seed: 42,
            schedulers: SchedulerKind::ALL.to_vec(),
            di_mode: DiMode::Paper,
            output_dir: PathBuf::from("results"),
            threads: None,
            record_timing: false,
            workload: WorkloadConfig::default(),
            infrastructure: InfraConfig::default(),
            ga: GaConfig::default(),
            aco: AcoConfig::default(),
            fuzzy: FuzzyConfig::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.message().trim().to_string()))?;
        Ok(cfg)
    }

    /// Reads a TOML file; the literal path `default` yields the built-in
    /// configuration.
    pub fn load(path: &Path) -> Result<Self> {
        if path.as_os_str() == "default" {
            return Ok(Self::default());
        }
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {}", path.display(), e.message().trim())))
    }

    pub fn validate(&self) -> Result<()> {
        if self.job_counts.is_empty() {
            return Err(Error::Config("job_counts must not be empty".into()));
        }
        if self.job_counts.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("job_counts must be strictly ascending".into()));
        }
        if self.job_counts[0] == 0 {
            return Err(Error::Config("job_counts must be positive".into()));
        }
        if self.replications == 0 {
            return Err(Error::Config("replications must be at least 1".into()));
        }
        if self.schedulers.is_empty() {
            return Err(Error::Config("schedulers must not be empty".into()));
        }
        if self.threads == Some(0) {
            return Err(Error::Config("threads must be at least 1".into()));
        }
        self.infrastructure.validate()?;
        self.ga.validate()?;
        self.aco.validate()?;
        SuitabilityModel::new(&self.fuzzy)?;
        Ok(())
    }
}

/// The workload and infrastructure of one grid cell, shared by every
/// scheduler run in that cell.
#[derive(Debug, Clone)]
pub struct Instance {
    /// Replication seed the instance was drawn from.
    pub seed: u64,
    pub jobs: Vec<Job>,
    pub infra: Infrastructure,
}

impl Instance {
    pub fn generate(
        master: u64,
        n_jobs: usize,
        replication: usize,
        workload: &WorkloadConfig,
        infra: &InfraConfig,
    ) -> Result<Self> {
        let seed = replication_seed(master, replication);
        Ok(Self {
            seed,
            jobs: generate_workload_with(workload, n_jobs, stream_seed(seed, Stream::Workload)),
            infra: generate_infrastructure(infra, stream_seed(seed, Stream::Infrastructure))?,
        })
    }
}

/// Runs one scheduler and returns its schedule and iteration count (GA
/// generations, ACO iterations, 0 for single-pass schedulers).
pub fn run_scheduler(
    kind: SchedulerKind,
    jobs: &[Job],
    infra: &Infrastructure,
    model: &SuitabilityModel,
    cfg: &ExperimentConfig,
    seed: u64,
) -> Result<(Schedule, usize)> {
    match kind {
        SchedulerKind::Hybrid => {
            let ga = GaConfig { seed, ..cfg.ga.clone() };
            let out = HybridGa::new(jobs, infra, model, ga)?.run();
            Ok((out.schedule, out.diagnostics.generations))
        }
        SchedulerKind::Aco | SchedulerKind::Maco => {
            let aco = AcoConfig { seed, ..cfg.aco.clone() };
            let heuristic = if kind == SchedulerKind::Aco { Heuristic::Speed } else { Heuristic::LoadAware };
            let run = run_colony(jobs, infra, &aco, heuristic)?;
            Ok((run.schedule, run.best_history.len()))
        }
        SchedulerKind::RoundRobin => Ok((round_robin_schedule(jobs, infra)?, 0)),
        SchedulerKind::Random => Ok((random_schedule(jobs, infra, seed)?, 0)),
        SchedulerKind::Greedy => Ok((greedy_schedule(jobs, infra)?, 0)),
    }
}

fn run_cell(
    cfg: &ExperimentConfig,
    model: &SuitabilityModel,
    n_jobs: usize,
    replication: usize,
) -> Result<Vec<ExperimentRow>> {
    let cell = cell_seed(cfg.master_seed, n_jobs, replication);
    let instance = Instance::generate(cfg.master_seed, n_jobs, replication, &cfg.workload, &cfg.infrastructure)?;
    let sched_seed = stream_seed(cell, Stream::Scheduler);
    cfg.schedulers
        .iter()
        .map(|&kind| {
            let wrap = |e: Error| Error::Scheduler {
                scheduler: kind.name().to_string(),
                seed: cell,
                source: Box::new(e),
            };
            let start = Instant::now();
            let (schedule, iterations) =
                run_scheduler(kind, &instance.jobs, &instance.infra, model, cfg, sched_seed).map_err(wrap)?;
            let elapsed = start.elapsed().as_millis() as u64;
            let m = evaluate_schedule(&schedule, &instance.jobs, &instance.infra, cfg.di_mode).map_err(wrap)?;
            Ok(ExperimentRow {
                scheduler: kind,
                n_jobs,
                replication,
                seed: cell,
                makespan_s: m.makespan,
                di_paper: m.di_paper(),
                di_conventional: m.di_conventional(),
                total_cost: m.total_cost,
                iterations,
                wall_clock_ms: if cfg.record_timing { elapsed } else { 0 },
            })
        })
        .collect()
}

/// Runs every enabled scheduler on every (n_jobs, replication) cell. Rows
/// come back sorted by (scheduler, n_jobs, replication) regardless of how
/// the cells were scheduled across threads.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<ExperimentRow>> {
    cfg.validate()?;
    let model = SuitabilityModel::new(&cfg.fuzzy)?;
    let mut schedulers = cfg.schedulers.clone();
    schedulers.sort();
    schedulers.dedup();
    let cfg = &ExperimentConfig { schedulers, ..cfg.clone() };
    let cells: Vec<(usize, usize)> = cfg
        .job_counts
        .iter()
        .flat_map(|&n| (0..cfg.replications).map(move |r| (n, r)))
        .collect();
    let run = || -> Result<Vec<Vec<ExperimentRow>>> {
        cells.par_iter().map(|&(n, r)| run_cell(cfg, &model, n, r)).collect()
    };
    let nested = match cfg.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?
            .install(run)?,
        None => run()?,
    };
    let mut rows: Vec<ExperimentRow> = nested.into_iter().flatten().collect();
    rows.sort_by_key(|r| (r.scheduler, r.n_jobs, r.replication));
    Ok(rows)
}

/// Paths written by [`write_outputs`].
#[derive(Debug, Clone)]
pub struct Outputs {
    pub csv: PathBuf,
    pub summary: PathBuf,
    pub charts: Vec<PathBuf>,
}

/// Writes `results.csv`, `summary.csv` and one SVG chart per metric.
pub fn write_outputs(rows: &[ExperimentRow], dir: &Path) -> Result<Outputs> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let csv = dir.join("results.csv");
    emit_csv(rows, &csv)?;
    let summary_rows = aggregate(rows);
    let summary = dir.join("summary.csv");
    fs::write(&summary, summary_table_csv(&summary_rows)).map_err(|e| Error::io(&summary, e))?;
    let charts = emit_charts(&summary_rows, dir)?;
    Ok(Outputs { csv, summary, charts })
}

fn summary_table_csv(summary: &[SummaryRow]) -> String {
    let mut out = String::from(
        "scheduler,n_jobs,replications,makespan_mean,makespan_sd,di_paper_mean,di_paper_sd,\
         di_conventional_mean,di_conventional_sd,cost_mean,cost_sd\n",
    );
    for s in summary {
        let cols = [s.makespan, s.di_paper, s.di_conventional, s.cost]
            .iter()
            .flat_map(|st| [format_sig6(st.mean), format_sig6(st.sd)])
            .collect::<Vec<_>>()
            .join(",");
        out.push_str(&format!("{},{},{},{}\n", s.scheduler, s.n_jobs, s.replications, cols));
    }
    out
}

/// Fixed-width text table of the summary for terminal output.
pub fn summary_table(summary: &[SummaryRow]) -> String {
    let mut out = format!(
        "{:<12} {:>6} {:>12} {:>10} {:>10} {:>14}\n",
        "scheduler", "jobs", "makespan", "di_paper", "di_conv", "cost"
    );
    for s in summary {
        out.push_str(&format!(
            "{:<12} {:>6} {:>12} {:>10} {:>10} {:>14}\n",
            s.scheduler.name(),
            s.n_jobs,
            format_sig6(s.makespan.mean),
            format_sig6(s.di_paper.mean),
            format_sig6(s.di_conventional.mean),
            format_sig6(s.cost.mean)
        ));
    }
    out
}
