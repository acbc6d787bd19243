//! Batch cloud model.
//!
//! Jobs are measured in million instructions (MI) and VMs in MIPS, so a job
//! runs for `length_mi / mips` seconds. Jobs placed on the same VM run back to
//! back; VMs run in parallel. Hosts and datacenters only carry placement
//! metadata.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Job {
    pub id: usize,
    pub length_mi: f64,
    pub required_pes: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VmSpec {
    pub id: usize,
    pub mips: f64,
    pub ram_mb: f64,
    pub bandwidth: f64,
    pub pe_count: u32,
    /// Cost units per busy second per 1000 MIPS.
    pub price_rate: f64,
    pub host_id: usize,
    pub datacenter_id: usize,
}

impl VmSpec {
    pub fn can_run(&self, job: &Job) -> bool {
        self.pe_count >= job.required_pes
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Host {
    pub id: usize,
    pub datacenter_id: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Datacenter {
    pub id: usize,
    pub hosts: Vec<Host>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Infrastructure {
    datacenters: Vec<Datacenter>,
    vms: Vec<VmSpec>,
}

impl Infrastructure {
    /// Checks that VM ids are `0..n` in order, every VM has positive MIPS,
    /// and every VM sits on an existing host.
    pub fn new(datacenters: Vec<Datacenter>, vms: Vec<VmSpec>) -> Result<Self> {
        if vms.is_empty() {
            return Err(Error::Config("infrastructure needs at least one VM".into()));
        }
        for (i, vm) in vms.iter().enumerate() {
            if vm.id != i {
                return Err(Error::Config(format!("VM at position {i} has id {}", vm.id)));
            }
            if !(vm.mips > 0.0) {
                return Err(Error::Config(format!(
                    "VM {i} has non-positive mips {}",
                    vm.mips
                )));
            }
            let placed = datacenters
                .iter()
                .filter(|dc| dc.id == vm.datacenter_id)
                .flat_map(|dc| &dc.hosts)
                .any(|h| h.id == vm.host_id);
            if !placed {
                return Err(Error::Config(format!(
                    "VM {i} references missing host {} in datacenter {}",
                    vm.host_id, vm.datacenter_id
                )));
            }
        }
        Ok(Self { datacenters, vms })
    }

    /// A single datacenter with one host per VM. Handy for hand-built instances.
    pub fn flat(vms: Vec<VmSpec>) -> Result<Self> {
        let hosts = vms
            .iter()
            .map(|vm| Host {
                id: vm.host_id,
                datacenter_id: 0,
            })
            .collect::<Vec<_>>();
        let mut hosts = hosts;
        hosts.sort_by_key(|h| h.id);
        hosts.dedup_by_key(|h| h.id);
        let vms = vms
            .into_iter()
            .map(|vm| VmSpec {
                datacenter_id: 0,
                ..vm
            })
            .collect();
        Self::new(vec![Datacenter { id: 0, hosts }], vms)
    }

    pub fn vms(&self) -> &[VmSpec] {
        &self.vms
    }

    pub fn datacenters(&self) -> &[Datacenter] {
        &self.datacenters
    }

    pub fn host_count(&self) -> usize {
        self.datacenters.iter().map(|d| d.hosts.len()).sum()
    }
}

/// Seconds needed to run `job` on `vm`.
pub fn execution_time(job: &Job, vm: &VmSpec) -> Result<f64> {
    if !(vm.mips > 0.0) {
        return Err(Error::Config(format!("VM {} has non-positive mips {}", vm.id, vm.mips)));
    }
    Ok(job.length_mi / vm.mips)
}

/// VM ids that can host each job, ascending.
pub fn feasible_vms(jobs: &[Job], infra: &Infrastructure) -> Result<Vec<Vec<usize>>> {
    jobs.iter()
        .enumerate()
        .map(|(j, job)| {
            let ids: Vec<usize> = infra
                .vms()
                .iter()
                .filter(|vm| vm.can_run(job))
                .map(|vm| vm.id)
                .collect();
            if ids.is_empty() {
                Err(Error::NoFeasibleVm {
                    job: j,
                    required_pes: job.required_pes,
                })
            } else {
                Ok(ids)
            }
        })
        .collect()
}

/// Precomputed execution times and feasible VM lists for one instance.
#[derive(Debug, Clone)]
pub struct ExecTable {
    vm_count: usize,
    times: Vec<f64>,
    feasible: Vec<Vec<usize>>,
}

impl ExecTable {
    pub fn new(jobs: &[Job], infra: &Infrastructure) -> Result<Self> {
        let feasible = feasible_vms(jobs, infra)?;
        let vm_count = infra.vms().len();
        let times = jobs
            .iter()
            .flat_map(|job| infra.vms().iter().map(move |vm| job.length_mi / vm.mips))
            .collect();
        Ok(Self {
            vm_count,
            times,
            feasible,
        })
    }

    #[inline]
    pub fn time(&self, job: usize, vm: usize) -> f64 {
        self.times[job * self.vm_count + vm]
    }

    pub fn feasible(&self, job: usize) -> &[usize] {
        &self.feasible[job]
    }

    pub fn job_count(&self) -> usize {
        self.feasible.len()
    }

    pub fn vm_count(&self) -> usize {
        self.vm_count
    }

    /// Per-VM busy time, accumulated in job order.
    pub fn loads(&self, assignment: &[usize]) -> Vec<f64> {
        let mut loads = vec![0.0; self.vm_count];
        for (j, &v) in assignment.iter().enumerate() {
            loads[v] += self.time(j, v);
        }
        loads
    }

    pub fn makespan(&self, assignment: &[usize]) -> f64 {
        self.loads(assignment).into_iter().fold(0.0, f64::max)
    }
}

/// A complete job-to-VM assignment: `assignment[j]` is the VM id of job `j`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Schedule {
    pub assignment: Vec<usize>,
}

impl Schedule {
    pub fn new(assignment: Vec<usize>) -> Self {
        Self { assignment }
    }

    /// Errors on the first job that is unassigned, points at an unknown VM,
    /// or lands on a VM with too few PEs.
    pub fn validate(&self, jobs: &[Job], infra: &Infrastructure) -> Result<()> {
        if self.assignment.len() != jobs.len() {
            return Err(Error::PartialSchedule {
                assigned: self.assignment.len(),
                jobs: jobs.len(),
            });
        }
        for (j, (job, &v)) in jobs.iter().zip(&self.assignment).enumerate() {
            let vm = infra
                .vms()
                .get(v)
                .ok_or(Error::UnknownVm { job: j, vm: v })?;
            if !vm.can_run(job) {
                return Err(Error::Infeasible {
                    job: j,
                    vm: v,
                    required_pes: job.required_pes,
                    pe_count: vm.pe_count,
                });
            }
        }
        Ok(())
    }
}

/// Which Degree of Imbalance formula to report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum DiMode {
    /// `(t_max + t_min) / t_avg`
    #[default]
    Paper,
    /// `(t_max - t_min) / t_avg`
    Conventional,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleMetrics {
    pub per_vm_time: Vec<f64>,
    pub makespan: f64,
    pub t_max: f64,
    pub t_min: f64,
    pub t_avg: f64,
    pub di: f64,
    pub di_mode: DiMode,
    pub total_cost: f64,
}

impl ScheduleMetrics {
    pub fn from_loads(per_vm_time: Vec<f64>, total_cost: f64, di_mode: DiMode) -> Self {
        let t_max = per_vm_time.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let t_min = per_vm_time.iter().copied().fold(f64::INFINITY, f64::min);
        let t_avg = per_vm_time.iter().sum::<f64>() / per_vm_time.len() as f64;
        let mut metrics = Self {
            per_vm_time,
            makespan: t_max,
            t_max,
            t_min,
            t_avg,
            di: 0.0,
            di_mode,
            total_cost,
        };
        metrics.di = metrics.degree_of_imbalance(di_mode);
        metrics
    }

    pub fn degree_of_imbalance(&self, mode: DiMode) -> f64 {
        if self.t_avg == 0.0 {
            return 0.0;
        }
        match mode {
            DiMode::Paper => (self.t_max + self.t_min) / self.t_avg,
            DiMode::Conventional => (self.t_max - self.t_min) / self.t_avg,
        }
    }

    pub fn di_paper(&self) -> f64 {
        self.degree_of_imbalance(DiMode::Paper)
    }

    pub fn di_conventional(&self) -> f64 {
        self.degree_of_imbalance(DiMode::Conventional)
    }
}

/// Per-VM execution times, makespan, Degree of Imbalance and cost of a
/// validated schedule. Idle VMs count with time 0.
pub fn evaluate_schedule(
    schedule: &Schedule,
    jobs: &[Job],
    infra: &Infrastructure,
    di_mode: DiMode,
) -> Result<ScheduleMetrics> {
    schedule.validate(jobs, infra)?;
    let mut loads = vec![0.0; infra.vms().len()];
    let mut cost = 0.0;
    for (job, &v) in jobs.iter().zip(&schedule.assignment) {
        let vm = &infra.vms()[v];
        let t = execution_time(job, vm)?;
        loads[v] += t;
        cost += t * vm.price_rate * vm.mips / 1000.0;
    }
    Ok(ScheduleMetrics::from_loads(loads, cost, di_mode))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WorkloadConfig {
    pub length_mi: [f64; 2],
    pub required_pes: [u32; 2],
}

impl Default for WorkloadConfig {
    fn default() -> Self {
        Self {
            length_mi: [1000.0, 20000.0],
            required_pes: [1, 4],
        }
    }
}

/// `n_jobs` jobs with uniformly drawn length and PE demand.
pub fn generate_workload(n_jobs: usize, seed: u64) -> Vec<Job> {
    generate_workload_with(&WorkloadConfig::default(), n_jobs, seed)
}

pub fn generate_workload_with(cfg: &WorkloadConfig, n_jobs: usize, seed: u64) -> Vec<Job> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n_jobs)
        .map(|id| Job {
            id,
            length_mi: rng.gen_range(cfg.length_mi[0]..=cfg.length_mi[1]),
            required_pes: rng.gen_range(cfg.required_pes[0]..=cfg.required_pes[1]),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InfraConfig {
    pub datacenters: usize,
    pub hosts_per_datacenter: [usize; 2],
    pub vm_count: usize,
    pub mips: [f64; 2],
    pub ram_mb: [f64; 2],
    pub bandwidth: [f64; 2],
    pub pe_count: [u32; 2],
    pub price_rate: f64,
}

impl Default for InfraConfig {
    fn default() -> Self {
        Self {
            datacenters: 10,
            hosts_per_datacenter: [2, 6],
            vm_count: 50,
            mips: [500.0, 2000.0],
            ram_mb: [256.0, 2048.0],
            bandwidth: [500.0, 1000.0],
            pe_count: [1, 4],
            price_rate: 1.0,
        }
    }
}

impl InfraConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::Config(format!("infrastructure: {what}")));
        if self.vm_count == 0 {
            return bad("vm_count must be at least 1");
        }
        if self.datacenters == 0 {
            return bad("datacenters must be at least 1");
        }
        if self.hosts_per_datacenter[0] == 0 || self.hosts_per_datacenter[0] > self.hosts_per_datacenter[1] {
            return bad("hosts_per_datacenter must be a non-empty range starting at 1 or more");
        }
        if !(self.mips[0] > 0.0 && self.mips[0] <= self.mips[1]) {
            return bad("mips range must be positive and ordered");
        }
        if self.ram_mb[0] > self.ram_mb[1] || self.bandwidth[0] > self.bandwidth[1] {
            return bad("ram_mb and bandwidth ranges must be ordered");
        }
        if self.pe_count[0] == 0 || self.pe_count[0] > self.pe_count[1] {
            return bad("pe_count range must be ordered and start at 1 or more");
        }
        if !(self.price_rate >= 0.0) {
            return bad("price_rate must be non-negative");
        }
        Ok(())
    }
}

/// Datacenters with a random host count each and VMs placed round-robin over
/// all hosts. The last VM is given the maximum PE count if no VM drew it, so
/// every generated job has at least one feasible VM.
pub fn generate_infrastructure(cfg: &InfraConfig, seed: u64) -> Result<Infrastructure> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut next_host = 0;
    let datacenters: Vec<Datacenter> = (0..cfg.datacenters)
        .map(|id| {
            let n = rng.gen_range(cfg.hosts_per_datacenter[0]..=cfg.hosts_per_datacenter[1]);
            let hosts = (0..n)
                .map(|_| {
                    next_host += 1;
                    Host {
                        id: next_host - 1,
                        datacenter_id: id,
                    }
                })
                .collect();
            Datacenter { id, hosts }
        })
        .collect();
    let hosts: Vec<&Host> = datacenters.iter().flat_map(|d| &d.hosts).collect();
    let mut vms: Vec<VmSpec> = (0..cfg.vm_count)
        .map(|id| {
            let host = hosts[id % hosts.len()];
            VmSpec {
                id,
                mips: rng.gen_range(cfg.mips[0]..=cfg.mips[1]),
                ram_mb: rng.gen_range(cfg.ram_mb[0]..=cfg.ram_mb[1]),
                bandwidth: rng.gen_range(cfg.bandwidth[0]..=cfg.bandwidth[1]),
                pe_count: rng.gen_range(cfg.pe_count[0]..=cfg.pe_count[1]),
                price_rate: cfg.price_rate,
                host_id: host.id,
                datacenter_id: host.datacenter_id,
            }
        })
        .collect();
    let max_pes = cfg.pe_count[1];
    if vms.iter().all(|vm| vm.pe_count < max_pes) {
        vms.last_mut().expect("vm_count >= 1").pe_count = max_pes;
    }
    Infrastructure::new(datacenters, vms)
}

pub fn write_jobs_csv(path: &Path, jobs: &[Job]) -> Result<()> {
    write_rows(path, jobs)
}

pub fn read_jobs_csv(path: &Path) -> Result<Vec<Job>> {
    read_rows(path)
}

pub fn write_vms_csv(path: &Path, vms: &[VmSpec]) -> Result<()> {
    write_rows(path, vms)
}

pub fn read_vms_csv(path: &Path) -> Result<Vec<VmSpec>> {
    read_rows(path)
}

fn write_rows<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::csv(path, e))?;
    for row in rows {
        w.serialize(row).map_err(|e| Error::csv(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn read_rows<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| Error::csv(path, e))?;
    r.deserialize()
        .collect::<std::result::Result<Vec<T>, _>>()
        .map_err(|e| Error::csv(path, e))
}
