#![allow(dead_code)]

use cloudsched::cloud::{Infrastructure, Job, VmSpec};
use proptest::prelude::*;

pub const CASES: u32 = 1000;

pub fn vm(id: usize, mips: f64, ram: f64, bw: f64, pes: u32) -> VmSpec {
    VmSpec {
        id,
        mips,
        ram_mb: ram,
        bandwidth: bw,
        pe_count: pes,
        price_rate: 1.0,
        host_id: id,
        datacenter_id: 0,
    }
}

pub fn arb_vm() -> impl Strategy<Value = (f64, f64, f64, u32)> {
    (500.0..2000.0f64, 256.0..2048.0f64, 500.0..1000.0f64, 1u32..=4)
}

pub fn arb_job() -> impl Strategy<Value = (f64, u32)> {
    (1000.0..20000.0f64, 1u32..=4)
}

/// Random instance; VM 0 always has 4 PEs so every job is feasible.
pub fn arb_instance(jobs: std::ops::RangeInclusive<usize>, vms: std::ops::RangeInclusive<usize>)
    -> impl Strategy<Value = (Vec<Job>, Infrastructure)> {
    (
        prop::collection::vec(arb_job(), jobs),
        prop::collection::vec(arb_vm(), vms),
    )
        .prop_map(|(js, vs)| {
            let jobs = js
                .into_iter()
                .enumerate()
                .map(|(id, (length_mi, required_pes))| Job { id, length_mi, required_pes })
                .collect();
            let vms = vs
                .into_iter()
                .enumerate()
                .map(|(id, (m, r, b, p))| vm(id, m, r, b, if id == 0 { 4 } else { p }))
                .collect();
            (jobs, Infrastructure::flat(vms).expect("valid vms"))
        })
}

/// A feasible assignment drawn from per-job choice indices.
pub fn pick_assignment(jobs: &[Job], infra: &Infrastructure, choices: &[usize]) -> Vec<usize> {
    jobs.iter()
        .zip(choices.iter().cycle())
        .map(|(job, &c)| {
            let feasible: Vec<usize> = infra
                .vms()
                .iter()
                .filter(|v| v.can_run(job))
                .map(|v| v.id)
                .collect();
            feasible[c % feasible.len()]
        })
        .collect()
}

pub mod props;
