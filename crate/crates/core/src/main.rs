use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use cloudsched::bench::{
    aggregate, brute_force_optimal, cell_seed, run_experiment, run_scheduler, stream_seed, summary_table,
    write_outputs, ExperimentConfig, Instance, SchedulerKind, Stream,
};
use cloudsched::cloud::{evaluate_schedule, write_jobs_csv, write_vms_csv, DiMode};
use cloudsched::fuzzy::{Label, SuitabilityModel, Variant, VariableName};

#[derive(Parser)]
#[command(name = "cloudsched", version, about = "Fuzzy-genetic cloud task scheduling and benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the job-count sweep and write CSV, summary and SVG charts.
    Bench(BenchArgs),
    /// Run one scheduler on one seeded instance and print its metrics.
    Schedule(ScheduleArgs),
    /// Print fuzzified degrees and crisp suitability for given inputs.
    FuzzyEval(FuzzyArgs),
    /// Exhaustively solve a small seeded instance.
    Oracle(InstanceArgs),
    /// Write a seeded workload and infrastructure to jobs.csv and vms.csv.
    Gen(GenArgs),
}

#[derive(Args)]
struct ConfigArg {
    /// TOML configuration file, or `default` for the built-in values.
    #[arg(long, default_value = "default")]
    config: PathBuf,
}

impl ConfigArg {
    fn load(&self) -> Result<ExperimentConfig> {
        Ok(ExperimentConfig::load(&self.config)?)
    }
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    config: ConfigArg,
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated job counts, e.g. 100,200,300.
    #[arg(long, value_delimiter = ',')]
    jobs: Option<Vec<usize>>,
    #[arg(long)]
    replications: Option<usize>,
    /// Comma-separated scheduler names.
    #[arg(long, value_delimiter = ',', value_enum)]
    schedulers: Option<Vec<SchedulerKind>>,
    #[arg(long, value_enum)]
    di_mode: Option<DiMode>,
    #[arg(long, env = "CLOUDSCHED_OUTPUT_DIR")]
    out: Option<PathBuf>,
    #[arg(long)]
    threads: Option<usize>,
    /// Record per-run wall clock time (makes output files non-reproducible).
    #[arg(long)]
    timing: bool,
}

#[derive(Args)]
struct InstanceArgs {
    #[command(flatten)]
    config: ConfigArg,
    #[arg(long, default_value_t = 5)]
    jobs: usize,
    #[arg(long)]
    vms: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

impl InstanceArgs {
    fn instance(&self, cfg: &mut ExperimentConfig) -> Result<Instance> {
        if let Some(s) = self.seed {
            cfg.master_seed = s;
        }
        if let Some(v) = self.vms {
            cfg.infrastructure.vm_count = v;
        }
        Ok(Instance::generate(cfg.master_seed, self.jobs, 0, &cfg.workload, &cfg.infrastructure)?)
    }
}

#[derive(Args)]
struct ScheduleArgs {
    #[arg(long, value_enum, default_value = "hybrid")]
    scheduler: SchedulerKind,
    #[command(flatten)]
    instance: InstanceArgs,
    #[arg(long, value_enum)]
    di_mode: Option<DiMode>,
}

#[derive(Args)]
struct GenArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct FuzzyArgs {
    #[command(flatten)]
    config: ConfigArg,
    /// Job length in MI.
    #[arg(long)]
    length: Option<f64>,
    #[arg(long)]
    mips: Option<f64>,
    /// VM memory in MB.
    #[arg(long)]
    ram: Option<f64>,
    #[arg(long)]
    bandwidth: Option<f64>,
}

/// Shortest decimal rendering, at most 6 decimals.
fn trim(x: f64) -> String {
    let s = format!("{x:.6}");
    let s = s.trim_end_matches('0');
    let s = s.strip_suffix('.').map(|t| format!("{t}.0")).unwrap_or_else(|| s.to_string());
    if s == "-0.0" { "0.0".into() } else { s }
}

fn bench(args: BenchArgs) -> Result<()> {
    let mut cfg = args.config.load()?;
    if let Some(s) = args.seed {
        cfg.master_seed = s;
    }
    if let Some(j) = args.jobs {
        cfg.job_counts = j;
    }
    if let Some(r) = args.replications {
        cfg.replications = r;
    }
    if let Some(s) = args.schedulers {
        cfg.schedulers = s;
    }
    if let Some(d) = args.di_mode {
        cfg.di_mode = d;
    }
    if let Some(o) = args.out {
        cfg.output_dir = o;
    }
    if args.threads.is_some() {
        cfg.threads = args.threads;
    }
    cfg.record_timing |= args.timing;
    let rows = run_experiment(&cfg)?;
    let out = write_outputs(&rows, &cfg.output_dir)?;
    print!("{}", summary_table(&aggregate(&rows)));
    println!("wrote {} rows to {}", rows.len(), out.csv.display());
    println!("summary: {}", out.summary.display());
    for c in &out.charts {
        println!("chart: {}", c.display());
    }
    Ok(())
}

fn schedule(args: ScheduleArgs) -> Result<()> {
    let mut cfg = args.instance.config.load()?;
    let inst = args.instance.instance(&mut cfg)?;
    let di_mode = args.di_mode.unwrap_or(cfg.di_mode);
    let model = SuitabilityModel::new(&cfg.fuzzy)?;
    // same seed as replication 0 of this job count in a bench run
    let cell = cell_seed(cfg.master_seed, inst.jobs.len(), 0);
    let (s, iterations) = run_scheduler(
        args.scheduler,
        &inst.jobs,
        &inst.infra,
        &model,
        &cfg,
        stream_seed(cell, Stream::Scheduler),
    )?;
    let m = evaluate_schedule(&s, &inst.jobs, &inst.infra, di_mode)?;
    println!("scheduler        {}", args.scheduler);
    println!("jobs             {}", inst.jobs.len());
    println!("vms              {}", inst.infra.vms().len());
    println!("seed             {cell}");
    println!("iterations       {iterations}");
    println!("makespan_s       {}", trim(m.makespan));
    println!("t_max            {}", trim(m.t_max));
    println!("t_min            {}", trim(m.t_min));
    println!("t_avg            {}", trim(m.t_avg));
    println!("di_paper         {}", trim(m.di_paper()));
    println!("di_conventional  {}", trim(m.di_conventional()));
    println!("total_cost       {}", trim(m.total_cost));
    Ok(())
}

fn fuzzy_eval(args: FuzzyArgs) -> Result<()> {
    let cfg = args.config.load()?.fuzzy;
    let given = [
        (VariableName::JobLength, args.length),
        (VariableName::VmMips, args.mips),
        (VariableName::VmRam, args.ram),
        (VariableName::VmBandwidth, args.bandwidth),
    ];
    if given.iter().all(|(_, v)| v.is_none()) {
        anyhow::bail!("give at least one of --length, --mips, --ram, --bandwidth");
    }
    for (name, value) in given {
        let Some(x) = value else { continue };
        let var = cfg.variable(name)?;
        let degrees = var.fuzzify(x);
        let parts: Vec<String> = Label::ALL
            .iter()
            .map(|l| format!("{}={}", l.name(), trim(degrees[l.index()])))
            .collect();
        println!("{} {}: {}", name.name(), trim(x), parts.join(", "));
    }
    for variant in Variant::ALL {
        let inputs: Option<Vec<f64>> = variant
            .inputs()
            .iter()
            .map(|n| given.iter().find(|(g, _)| g == n).and_then(|(_, v)| *v))
            .collect();
        if let Some(inputs) = inputs {
            let s = cfg.system(variant)?.evaluate(&inputs)?;
            println!("suitability[{}] = {}", variant.name(), trim(s));
        }
    }
    Ok(())
}

fn oracle(args: InstanceArgs) -> Result<()> {
    let mut cfg = args.config.load()?;
    let inst = args.instance(&mut cfg)?;
    let (s, makespan) = brute_force_optimal(&inst.jobs, &inst.infra)?;
    println!("optimal makespan_s {}", trim(makespan));
    let text: Vec<String> = s.assignment.iter().map(|v| v.to_string()).collect();
    println!("assignment [{}]", text.join(", "));
    Ok(())
}

fn gen(args: GenArgs) -> Result<()> {
    let mut cfg = args.instance.config.load()?;
    let inst = args.instance.instance(&mut cfg)?;
    std::fs::create_dir_all(&args.out).with_context(|| format!("{}", args.out.display()))?;
    let jobs = args.out.join("jobs.csv");
    let vms = args.out.join("vms.csv");
    write_jobs_csv(&jobs, &inst.jobs)?;
    write_vms_csv(&vms, inst.infra.vms())?;
    println!("wrote {} and {}", jobs.display(), vms.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Bench(a) => bench(a),
        Command::Schedule(a) => schedule(a),
        Command::FuzzyEval(a) => fuzzy_eval(a),
        Command::Oracle(a) => oracle(a),
        Command::Gen(a) => gen(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            // library errors already embed their source in the message
            let mut chain: Vec<String> = Vec::new();
            for c in e.chain().map(|c| c.to_string()) {
                if !chain.last().is_some_and(|l| l.ends_with(&c)) {
                    chain.push(c);
                }
            }
            eprintln!("error: {}", chain.join(": "));
            ExitCode::FAILURE
        }
    }
}
