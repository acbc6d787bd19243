//! Property checks shared by the proptest suites and the acceptance runner.

use std::sync::OnceLock;

use cloudsched::baselines::{greedy_schedule, round_robin_schedule};
use cloudsched::bench::{brute_force_optimal, run_scheduler, ExperimentConfig, SchedulerKind};
use cloudsched::cloud::{evaluate_schedule, execution_time, DiMode, Infrastructure, Job, Schedule};
use cloudsched::fuzzy::{
    FuzzyConfig, FuzzyRule, Grade, InferenceSystem, Label, LinguisticVariable, OutputRegion, Shape,
    SuitabilityModel, Variant, VariableName,
};
use cloudsched::ga::{ChromosomeType, GaConfig, HybridGa, TIE_EPS};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

use super::{arb_instance, pick_assignment, vm};

pub type Check = Result<(), TestCaseError>;

pub fn model() -> &'static SuitabilityModel {
    static MODEL: OnceLock<SuitabilityModel> = OnceLock::new();
    MODEL.get_or_init(SuitabilityModel::default)
}

// ---- fuzzy ----

/// Piecewise-linear membership written out from the breakpoints alone.
pub fn naive_mu(bp: &[f64], x: f64) -> f64 {
    let (a, b, c, d) = match *bp {
        [a, b, c] => (a, b, b, c),
        [a, b, c, d] => (a, b, c, d),
        _ => unreachable!(),
    };
    if x < b {
        if a == b {
            1.0
        } else if x <= a {
            0.0
        } else {
            (x - a) / (b - a)
        }
    } else if x <= c || c == d {
        1.0
    } else if x >= d {
        0.0
    } else {
        (d - x) / (d - c)
    }
}

/// Textbook Mamdani: clip every rule's consequent, aggregate with max,
/// discrete centroid.
pub fn naive_mamdani(sys: &InferenceSystem, crisp: &[f64]) -> Option<f64> {
    let degree = |var: VariableName, label: Label| {
        let i = sys.inputs().iter().position(|v| v.name() == var).unwrap();
        let v = &sys.inputs()[i];
        let (lo, hi) = v.universe();
        naive_mu(&v.set(label).shape.breakpoints(), crisp[i].clamp(lo, hi))
    };
    let strengths: Vec<(f64, Grade)> = sys
        .rules()
        .iter()
        .map(|r: &FuzzyRule| {
            let s = r.antecedent.iter().map(|&(var, l)| degree(var, l)).fold(1.0, f64::min);
            (s, r.consequent)
        })
        .collect();
    let out = sys.output();
    let (lo, hi) = out.universe();
    let n = sys.resolution();
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..n {
        let x = lo + (hi - lo) * i as f64 / (n - 1) as f64;
        let mu = strengths
            .iter()
            .map(|&(s, g)| s.min(naive_mu(&out.sets()[g.index()].shape.breakpoints(), x)))
            .fold(0.0, f64::max);
        num += x * mu;
        den += mu;
    }
    (den > 0.0).then(|| num / den)
}

pub fn default_variables() -> Vec<LinguisticVariable> {
    let cfg = FuzzyConfig::default();
    [
        VariableName::JobLength,
        VariableName::VmMips,
        VariableName::VmRam,
        VariableName::VmBandwidth,
        VariableName::Suitability,
    ]
    .into_iter()
    .map(|n| cfg.variable(n).unwrap())
    .collect()
}

pub fn arb_shape() -> impl Strategy<Value = Shape> {
    prop_oneof![
        prop::collection::vec(-100.0..100.0f64, 3),
        prop::collection::vec(-100.0..100.0f64, 4),
    ]
    .prop_filter_map("degenerate", |mut p| {
        p.sort_by(f64::total_cmp);
        Shape::from_breakpoints(&p).ok()
    })
}

pub fn membership_bounds((shape, x): (Shape, f64)) -> Check {
    let mu = shape.membership(x);
    prop_assert!((0.0..=1.0).contains(&mu));
    prop_assert!((mu - naive_mu(&shape.breakpoints(), x)).abs() < 1e-12);
    Ok(())
}

pub fn coverage(t: f64) -> Check {
    for v in default_variables() {
        let (lo, hi) = v.universe();
        let d = v.fuzzify(lo + t * (hi - lo));
        prop_assert!(d.iter().all(|m| (0.0..=1.0).contains(m)));
        prop_assert!(d.iter().cloned().fold(0.0, f64::max) > 0.0, "{:?} uncovered at {}", v.name(), t);
    }
    Ok(())
}

pub fn overlap_rule((lo, span, t): (f64, f64, f64)) -> Check {
    let v = LinguisticVariable::proportional(VariableName::VmRam, lo, lo + span).unwrap();
    let [low, med, high] = v.sets();
    // the end of the first set is the start of the third
    prop_assert!((low.shape.last() - high.shape.first()).abs() <= 1e-9 * span.max(1.0));
    prop_assert!(low.shape.last() > med.shape.first());
    prop_assert!(med.shape.last() > high.shape.first());
    let d = v.fuzzify(lo + t * span);
    prop_assert!(d.iter().cloned().fold(0.0, f64::max) > 0.0);
    Ok(())
}

pub fn arb_symmetric() -> impl Strategy<Value = (Vec<f64>, f64, f64, f64)> {
    (
        prop::collection::vec(0.0..=1.0f64, 1..100),
        0.0..=1.0f64,
        -10.0..10.0f64,
        0.1..10.0f64,
    )
}

pub fn centroid_symmetry((half, centre, lo, width): (Vec<f64>, f64, f64, f64)) -> Check {
    let mut samples = half.clone();
    samples.push(centre.max(1e-3));
    samples.extend(half.iter().rev());
    let region = OutputRegion { lo, hi: lo + width, samples };
    let c = region.centroid().unwrap();
    prop_assert!((c - (lo + width / 2.0)).abs() < 1e-9, "{}", c);
    Ok(())
}

pub fn arb_crisp() -> impl Strategy<Value = (f64, f64, f64, f64)> {
    (0.0..25000.0f64, 300.0..2200.0f64, 0.0..2500.0f64, 400.0..1100.0f64)
}

pub fn engine_matches_oracle((length, mips, ram, bw): (f64, f64, f64, f64)) -> Check {
    for variant in Variant::ALL {
        let sys = model().system(variant);
        let crisp: Vec<f64> = variant
            .inputs()
            .iter()
            .map(|n| match n {
                VariableName::JobLength => length,
                VariableName::VmMips => mips,
                VariableName::VmRam => ram,
                VariableName::VmBandwidth => bw,
                VariableName::Suitability => unreachable!(),
            })
            .collect();
        let expected = naive_mamdani(sys, &crisp).unwrap();
        let got = sys.evaluate(&crisp).unwrap();
        prop_assert!((got - expected).abs() < 1e-9, "{:?}: {} vs {}", variant, got, expected);
        prop_assert!((sys.infer(&crisp).unwrap().centroid().unwrap() - expected).abs() < 1e-9);
        prop_assert!((0.0..=1.0).contains(&got));
    }
    Ok(())
}

// ---- GA ----

pub type ChoiceCase = ((Vec<Job>, Infrastructure), Vec<usize>, Vec<usize>);

pub fn arb_crossover_case() -> impl Strategy<Value = ChoiceCase> {
    (
        arb_instance(1..=15, 1..=6),
        prop::collection::vec(0usize..8, 15),
        prop::collection::vec(0usize..8, 15),
    )
}

pub fn child_dominance(((jobs, infra), ca, cb): ChoiceCase) -> Check {
    let g = HybridGa::new(&jobs, &infra, model(), GaConfig::default()).unwrap();
    let a = g.chromosome(&pick_assignment(&jobs, &infra, &ca), ChromosomeType::TypeA).unwrap();
    let b = g.chromosome(&pick_assignment(&jobs, &infra, &cb), ChromosomeType::TypeB).unwrap();
    let child = g.crossover(&a, &b);
    for j in 0..jobs.len() {
        let s = |v| g.suitability(Variant::Crossover, j, v);
        let sc = s(child.vm_of(j));
        prop_assert!(sc >= s(a.vm_of(j)) - TIE_EPS && sc >= s(b.vm_of(j)) - TIE_EPS);
        prop_assert!(child.vm_of(j) == a.vm_of(j) || child.vm_of(j) == b.vm_of(j));
    }
    let score = g.crossover_score(&child);
    prop_assert!(score >= g.crossover_score(&a) - TIE_EPS);
    prop_assert!(score >= g.crossover_score(&b) - TIE_EPS);
    for c in [&a, &b, &child] {
        prop_assert!((0.0..=1.0).contains(&c.fitness));
    }
    Ok(())
}

pub type RunCase = ((Vec<Job>, Infrastructure), usize, usize, u64, f64, bool);

pub fn arb_run_case() -> impl Strategy<Value = RunCase> {
    (
        arb_instance(1..=12, 1..=5),
        1usize..40,
        2usize..8,
        any::<u64>(),
        prop_oneof![Just(0.0), 0.0..0.5f64],
        any::<bool>(),
    )
}

/// Termination, feasibility and monotone best-so-far.
pub fn ga_run_invariants(((jobs, infra), max_generations, population, seed, mutation_rate, local_search): RunCase) -> Check {
    let cfg = GaConfig { population_size_per_type: population, max_generations, seed, mutation_rate, local_search };
    let out = HybridGa::new(&jobs, &infra, model(), cfg).unwrap().run();
    let d = &out.diagnostics;
    prop_assert!(d.generations >= 1 && d.generations <= max_generations);
    prop_assert_eq!(d.best_history.len(), d.generations);
    prop_assert!(d.best_history.windows(2).all(|w| w[1] >= w[0]));
    prop_assert!((0.0..=1.0).contains(&d.crossover_score));
    prop_assert!(out.schedule.validate(&jobs, &infra).is_ok());
    Ok(())
}

pub fn local_search_never_hurts(((jobs, infra), seed): ((Vec<Job>, Infrastructure), u64)) -> Check {
    let base = GaConfig { seed, max_generations: 20, ..GaConfig::default() };
    let plain = HybridGa::new(&jobs, &infra, model(), GaConfig { local_search: false, ..base.clone() })
        .unwrap()
        .run();
    let g = HybridGa::new(&jobs, &infra, model(), base).unwrap();
    let tuned = g.run();
    prop_assert!(tuned.schedule.validate(&jobs, &infra).is_ok());
    let t = g.exec_table();
    let m_plain = t.makespan(&plain.schedule.assignment);
    let m_tuned = t.makespan(&tuned.schedule.assignment);
    prop_assert!(m_tuned <= m_plain, "{} > {}", m_tuned, m_plain);
    // the evolutionary phase is untouched
    prop_assert_eq!(&plain.diagnostics.best_history, &tuned.diagnostics.best_history);
    Ok(())
}

// ---- metrics ----

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

pub type ScheduleCase = ((Vec<Job>, Infrastructure), Vec<usize>);

pub fn arb_schedule_case() -> impl Strategy<Value = ScheduleCase> {
    (arb_instance(1..=30, 1..=8), prop::collection::vec(0usize..8, 30))
}

pub fn metric_bounds(((jobs, infra), choices): ScheduleCase) -> Check {
    let s = Schedule::new(pick_assignment(&jobs, &infra, &choices));
    let m = evaluate_schedule(&s, &jobs, &infra, DiMode::Paper).unwrap();
    prop_assert!(m.di_conventional() >= 0.0);
    prop_assert!(m.di_paper() >= m.t_max / m.t_avg - 1e-12);
    prop_assert!(m.t_min <= m.t_avg && m.t_avg <= m.t_max);
    let lower = jobs
        .iter()
        .map(|j| {
            infra
                .vms()
                .iter()
                .filter(|v| v.can_run(j))
                .map(|v| execution_time(j, v).unwrap())
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max);
    prop_assert!(m.makespan >= lower);
    prop_assert_eq!(m.di, m.di_paper());
    Ok(())
}

pub fn permutation_invariance((((jobs, infra), choices), perm_seed): (ScheduleCase, u64)) -> Check {
    let assignment = pick_assignment(&jobs, &infra, &choices);
    let m = evaluate_schedule(&Schedule::new(assignment.clone()), &jobs, &infra, DiMode::Paper).unwrap();
    // Fisher-Yates driven by an LCG so the permutation is reproducible
    let mut order: Vec<usize> = (0..jobs.len()).collect();
    let mut state = perm_seed;
    for i in (1..order.len()).rev() {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        order.swap(i, (state >> 33) as usize % (i + 1));
    }
    let pjobs: Vec<Job> = order.iter().enumerate().map(|(id, &o)| Job { id, ..jobs[o].clone() }).collect();
    let passign: Vec<usize> = order.iter().map(|&o| assignment[o]).collect();
    let p = evaluate_schedule(&Schedule::new(passign), &pjobs, &infra, DiMode::Paper).unwrap();
    prop_assert!(close(m.makespan, p.makespan));
    prop_assert!(close(m.di_paper(), p.di_paper()));
    prop_assert!(close(m.di_conventional(), p.di_conventional()));
    prop_assert!(close(m.total_cost, p.total_cost));
    Ok(())
}

pub fn locality((((jobs, infra), choices), which, target): (ScheduleCase, prop::sample::Index, usize)) -> Check {
    let a = pick_assignment(&jobs, &infra, &choices);
    let j = which.index(jobs.len());
    let feasible: Vec<usize> = infra.vms().iter().filter(|v| v.can_run(&jobs[j])).map(|v| v.id).collect();
    let mut b = a.clone();
    b[j] = feasible[target % feasible.len()];
    let ma = evaluate_schedule(&Schedule::new(a.clone()), &jobs, &infra, DiMode::Paper).unwrap();
    let mb = evaluate_schedule(&Schedule::new(b.clone()), &jobs, &infra, DiMode::Paper).unwrap();
    for v in 0..infra.vms().len() {
        if v != a[j] && v != b[j] {
            prop_assert_eq!(ma.per_vm_time[v], mb.per_vm_time[v]);
        }
    }
    Ok(())
}

pub fn oracle_dominance(((jobs, infra), seed): ((Vec<Job>, Infrastructure), u64)) -> Check {
    let (opt_s, opt) = brute_force_optimal(&jobs, &infra).unwrap();
    let m = evaluate_schedule(&opt_s, &jobs, &infra, DiMode::Paper).unwrap();
    prop_assert_eq!(m.makespan, opt);
    let mut cfg = ExperimentConfig::default();
    cfg.aco.iterations = 10;
    cfg.ga.max_generations = 20;
    for kind in SchedulerKind::ALL {
        let (s, _) = run_scheduler(kind, &jobs, &infra, model(), &cfg, seed).unwrap();
        let got = evaluate_schedule(&s, &jobs, &infra, DiMode::Paper).unwrap().makespan;
        prop_assert!(got >= opt, "{} beat the oracle: {} < {}", kind, got, opt);
    }
    Ok(())
}

pub fn greedy_lpt_bound((lengths, n_vms, mips): (Vec<f64>, usize, f64)) -> Check {
    let infra = Infrastructure::flat((0..n_vms).map(|i| vm(i, mips, 1024.0, 750.0, 4)).collect()).unwrap();
    let jobs: Vec<Job> = lengths
        .iter()
        .enumerate()
        .map(|(id, &length_mi)| Job { id, length_mi, required_pes: 1 })
        .collect();
    let g = evaluate_schedule(&greedy_schedule(&jobs, &infra).unwrap(), &jobs, &infra, DiMode::Paper).unwrap();
    let r = evaluate_schedule(&round_robin_schedule(&jobs, &infra).unwrap(), &jobs, &infra, DiMode::Paper).unwrap();
    // longest-processing-time bound; round robin is no better than the optimum
    let m = n_vms as f64;
    prop_assert!(g.makespan <= (4.0 / 3.0 - 1.0 / (3.0 * m)) * r.makespan * (1.0 + 1e-12));
    if lengths.iter().all(|&l| l == lengths[0]) {
        prop_assert!(g.makespan <= r.makespan * (1.0 + 1e-12));
    }
    Ok(())
}
