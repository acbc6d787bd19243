//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

mod common;

use std::collections::BTreeMap;
use std::fmt::Debug;
use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use cloudsched::bench::{
    aggregate, brute_force_optimal, cell_seed, run_experiment, run_scheduler, stream_seed, write_outputs,
    ExperimentConfig, ExperimentRow, Instance, SchedulerKind, Stream, SummaryRow,
};
use cloudsched::cloud::{evaluate_schedule, DiMode, InfraConfig, Job, ScheduleMetrics, VmSpec, Infrastructure};
use cloudsched::fuzzy::{FuzzyConfig, Grade, Label, SuitabilityModel, Variant, VariableName};
use common::props;
use proptest::strategy::Strategy;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn report(results: &mut Vec<bool>, id: u32, name: &str, start: Instant, o: Outcome) {
    println!(
        "{} [{id}] {name}: {} ({:.1}s)",
        if o.pass { "PASS" } else { "FAIL" },
        o.detail,
        start.elapsed().as_secs_f64()
    );
    results.push(o.pass);
}

fn mips_anchor() -> Outcome {
    let var = FuzzyConfig::default().variable(VariableName::VmMips).unwrap();
    let d = var.fuzzify(1000.0);
    let want = [0.3, 0.7, 0.0];
    let ok = d.iter().zip(want).all(|(g, w)| (g - w).abs() <= 1e-9);
    outcome(ok, format!("fuzzify(vm_mips, 1000) = ({:.12}, {:.12}, {:.12})", d[0], d[1], d[2]))
}

fn rule_fixture() -> Outcome {
    let model = SuitabilityModel::default();
    let sys = model.system(Variant::Crossover);
    let wanted = [
        (VariableName::JobLength, Label::High),
        (VariableName::VmBandwidth, Label::Low),
        (VariableName::VmRam, Label::Medium),
        (VariableName::VmMips, Label::High),
    ];
    let rule = sys
        .rules()
        .iter()
        .find(|r| wanted.iter().all(|&(v, l)| r.label_of(v) == Some(l)));
    let Some(rule) = rule else {
        return outcome(false, "rule not present in the crossover rule base");
    };
    let crisp: Vec<f64> = sys
        .inputs()
        .iter()
        .map(|var| {
            let label = wanted.iter().find(|(n, _)| *n == var.name()).unwrap().1;
            var.set(label).shape.peak()
        })
        .collect();
    let value = sys.evaluate(&crisp).unwrap();
    let ok = rule.consequent == Grade::Adequate && (value - 0.5).abs() <= 0.01;
    outcome(ok, format!("consequent {}, label-peak inputs {crisp:?} give {value:.6}", rule.consequent.name()))
}

fn di_exactness() -> Outcome {
    let direct = ScheduleMetrics::from_loads(vec![4.0, 3.0], 0.0, DiMode::Paper);
    let vm = |id| VmSpec {
        id,
        mips: 1000.0,
        ram_mb: 1024.0,
        bandwidth: 750.0,
        pe_count: 1,
        price_rate: 1.0,
        host_id: 0,
        datacenter_id: 0,
    };
    let infra = Infrastructure::flat(vec![vm(0), vm(1)]).unwrap();
    let jobs = vec![
        Job { id: 0, length_mi: 4000.0, required_pes: 1 },
        Job { id: 1, length_mi: 3000.0, required_pes: 1 },
    ];
    let s = cloudsched::cloud::Schedule::new(vec![0, 1]);
    let m = evaluate_schedule(&s, &jobs, &infra, DiMode::Paper).unwrap();
    let ok = [&direct, &m].iter().all(|x| {
        (x.di_paper() - 2.0).abs() <= 1e-6 && (x.di_conventional() - 2.0 / 7.0).abs() <= 1e-6
    });
    outcome(
        ok,
        format!("DI(paper) = {:.6}, DI(conventional) = {:.6}", m.di_paper(), m.di_conventional()),
    )
}

fn oracle_near_optimality() -> Outcome {
    let cfg = ExperimentConfig {
        infrastructure: InfraConfig { vm_count: 3, ..InfraConfig::default() },
        ..ExperimentConfig::default()
    };
    let model = SuitabilityModel::new(&cfg.fuzzy).unwrap();
    let (mut within, mut below, mut worst) = (0, 0, 1.0f64);
    for i in 0..100usize {
        let n = 4 + i % 3;
        let cell = cell_seed(cfg.master_seed, n, i);
        let inst = Instance::generate(cfg.master_seed, n, i, &cfg.workload, &cfg.infrastructure).unwrap();
        let (_, opt) = brute_force_optimal(&inst.jobs, &inst.infra).unwrap();
        let (s, _) = run_scheduler(
            SchedulerKind::Hybrid,
            &inst.jobs,
            &inst.infra,
            &model,
            &cfg,
            stream_seed(cell, Stream::Scheduler),
        )
        .unwrap();
        let got = evaluate_schedule(&s, &inst.jobs, &inst.infra, DiMode::Paper).unwrap().makespan;
        within += usize::from(got <= 1.10 * opt);
        below += usize::from(got < opt);
        worst = worst.max(got / opt);
    }
    outcome(
        within >= 90 && below == 0,
        format!("{within}/100 within 1.10x of optimum, {below} below optimum, worst ratio {worst:.3}"),
    )
}

fn mean_by(summary: &[SummaryRow], pick: fn(&SummaryRow) -> f64) -> BTreeMap<(SchedulerKind, usize), f64> {
    summary.iter().map(|s| ((s.scheduler, s.n_jobs), pick(s))).collect()
}

fn makespan_trend(cfg: &ExperimentConfig, summary: &[SummaryRow]) -> Outcome {
    let m = mean_by(summary, |s| s.makespan.mean);
    let mut bad = Vec::new();
    for &n in &cfg.job_counts {
        let h = m[&(SchedulerKind::Hybrid, n)];
        for other in [SchedulerKind::Random, SchedulerKind::RoundRobin] {
            if h >= m[&(other, n)] {
                bad.push(format!("n={n}: hybrid {h:.2} >= {other} {:.2}", m[&(other, n)]));
            }
        }
    }
    for &k in &cfg.schedulers {
        for w in cfg.job_counts.windows(2) {
            if m[&(k, w[1])] < m[&(k, w[0])] {
                bad.push(format!("{k} decreases from n={} to n={}", w[0], w[1]));
            }
        }
    }
    let row = |k| {
        cfg.job_counts.iter().map(|n| format!("{:.1}", m[&(k, *n)])).collect::<Vec<_>>().join(" ")
    };
    let detail = if bad.is_empty() {
        format!(
            "hybrid [{}] vs random [{}] vs round_robin [{}]",
            row(SchedulerKind::Hybrid),
            row(SchedulerKind::Random),
            row(SchedulerKind::RoundRobin)
        )
    } else {
        bad.join("; ")
    };
    outcome(bad.is_empty(), detail)
}

fn di_trend(cfg: &ExperimentConfig, summary: &[SummaryRow]) -> Outcome {
    let d = mean_by(summary, |s| s.di_conventional.mean);
    let wins = cfg
        .job_counts
        .iter()
        .filter(|&&n| {
            let h = d[&(SchedulerKind::Hybrid, n)];
            h < d[&(SchedulerKind::Aco, n)] && h < d[&(SchedulerKind::Maco, n)]
        })
        .count();
    let row = |k| {
        cfg.job_counts.iter().map(|n| format!("{:.3}", d[&(k, *n)])).collect::<Vec<_>>().join(" ")
    };
    outcome(
        wins >= 8,
        format!(
            "hybrid better at {wins}/{} job counts; hybrid [{}] aco [{}] maco [{}]",
            cfg.job_counts.len(),
            row(SchedulerKind::Hybrid),
            row(SchedulerKind::Aco),
            row(SchedulerKind::Maco)
        ),
    )
}

fn same_files(a: &Path, b: &Path) -> Result<usize, String> {
    let mut names: Vec<_> = fs::read_dir(a)
        .map_err(|e| e.to_string())?
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    let mut other: Vec<_> = fs::read_dir(b).map_err(|e| e.to_string())?.map(|e| e.unwrap().file_name()).collect();
    other.sort();
    if names != other {
        return Err(format!("file sets differ: {names:?} vs {other:?}"));
    }
    for n in &names {
        if fs::read(a.join(n)).unwrap() != fs::read(b.join(n)).unwrap() {
            return Err(format!("{} differs", n.to_string_lossy()));
        }
    }
    Ok(names.len())
}

fn determinism(cfg: &ExperimentConfig, first: &[ExperimentRow]) -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    write_outputs(first, &a).unwrap();
    let second = run_experiment(&ExperimentConfig { threads: Some(4), ..cfg.clone() }).unwrap();
    write_outputs(&second, &b).unwrap();
    let library = match same_files(&a, &b) {
        Ok(n) => n,
        Err(e) => return outcome(false, format!("library runs: {e}")),
    };

    let exe = env!("CARGO_BIN_EXE_cloudsched");
    let cli_dirs = [dir.path().join("cli1"), dir.path().join("cli2")];
    for (d, threads) in cli_dirs.iter().zip(["1", "3"]) {
        let status = Command::new(exe)
            .args(["bench", "--config", "default", "--jobs", "100,200,300", "--replications", "3"])
            .args(["--threads", threads, "--out"])
            .arg(d)
            .output()
            .unwrap();
        if !status.status.success() {
            return outcome(false, format!("cli failed: {}", String::from_utf8_lossy(&status.stderr)));
        }
    }
    match same_files(&cli_dirs[0], &cli_dirs[1]) {
        Ok(n) => outcome(
            true,
            format!("full grid: {library} files identical (sequential vs 4 threads); cli: {n} files identical (1 vs 3 threads)"),
        ),
        Err(e) => outcome(false, format!("cli runs: {e}")),
    }
}

fn check<S: Strategy>(name: &str, strategy: S, test: impl Fn(S::Value) -> props::Check) -> Result<(), String>
where
    S::Value: Debug,
{
    let config = Config { cases: common::CASES, failure_persistence: None, ..Config::default() };
    let mut runner = TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha));
    runner.run(&strategy, test).map_err(|e| format!("{name}: {e}"))
}

fn property_suites() -> Outcome {
    use proptest::prelude::*;
    let results = [
        check("membership bounds", (props::arb_shape(), -200.0..200.0f64), props::membership_bounds),
        check("coverage", 0.0..=1.0f64, props::coverage),
        check("overlap rule", (-1e4..1e4f64, 1e-3..1e5f64, 0.0..=1.0f64), props::overlap_rule),
        check("centroid symmetry", props::arb_symmetric(), props::centroid_symmetry),
        check("engine vs naive Mamdani", props::arb_crisp(), props::engine_matches_oracle),
        check("child dominance", props::arb_crossover_case(), props::child_dominance),
        check("termination, feasibility, monotone best", props::arb_run_case(), props::ga_run_invariants),
        check("local search never hurts", (common::arb_instance(1..=12, 1..=5), any::<u64>()), props::local_search_never_hurts),
        check("metric bounds", props::arb_schedule_case(), props::metric_bounds),
        check("permutation invariance", (props::arb_schedule_case(), any::<u64>()), props::permutation_invariance),
        check("locality", (props::arb_schedule_case(), any::<prop::sample::Index>(), 0usize..8), props::locality),
        check("oracle dominance", (common::arb_instance(1..=6, 1..=4), any::<u64>()), props::oracle_dominance),
    ];
    let failures: Vec<String> = results.iter().filter_map(|r| r.clone().err()).collect();
    if failures.is_empty() {
        outcome(true, format!("{} properties x {} cases", results.len(), common::CASES))
    } else {
        outcome(false, failures.join("; "))
    }
}

fn main() {
    let mut results = Vec::new();
    let t = Instant::now();
    report(&mut results, 1, "mips membership anchor", t, mips_anchor());
    let t = Instant::now();
    report(&mut results, 2, "crossover rule fixture", t, rule_fixture());
    let t = Instant::now();
    report(&mut results, 3, "degree of imbalance exactness", t, di_exactness());
    let t = Instant::now();
    report(&mut results, 4, "hybrid near-optimality on small instances", t, oracle_near_optimality());

    let t = Instant::now();
    let cfg = ExperimentConfig::default();
    let rows = run_experiment(&cfg).unwrap();
    let summary = aggregate(&rows);
    report(&mut results, 5, "makespan ordering and growth", t, makespan_trend(&cfg, &summary));
    let t = Instant::now();
    report(&mut results, 6, "degree of imbalance ordering", t, di_trend(&cfg, &summary));
    let t = Instant::now();
    report(&mut results, 7, "byte-identical reruns", t, determinism(&cfg, &rows));
    let t = Instant::now();
    report(&mut results, 8, "property suites", t, property_suites());

    let passed = results.iter().filter(|&&p| p).count();
    println!("{passed}/{} criteria passed", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}
