use std::collections::BTreeMap;
use std::fs::File;
use std::io::Write;
use std::path::Path;

use super::SchedulerKind;
use crate::error::{Error, Result};

pub const CSV_HEADER: &str =
    "scheduler,n_jobs,replication,seed,makespan_s,di_paper,di_conventional,total_cost,iterations,wall_clock_ms";

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRow {
    pub scheduler: SchedulerKind,
    pub n_jobs: usize,
    pub replication: usize,
    pub seed: u64,
    pub makespan_s: f64,
    pub di_paper: f64,
    pub di_conventional: f64,
    pub total_cost: f64,
    /// GA generations or ACO iterations; 0 for one-pass schedulers.
    pub iterations: usize,
    pub wall_clock_ms: u64,
}

/// Fixed-point rendering with 6 significant digits.
pub fn format_sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x:.5}");
    }
    // exponent after rounding to 6 significant digits, so carries are accounted for
    let sci = format!("{x:.5e}");
    let exponent: i32 = sci[sci.find('e').expect("scientific notation") + 1..]
        .parse()
        .expect("integer exponent");
    let decimals = (5 - exponent).max(0) as usize;
    format!("{x:.decimals$}")
}

pub fn write_csv<W: Write>(out: W, rows: &[ExperimentRow]) -> std::io::Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(CSV_HEADER.split(','))?;
    for r in rows {
        w.write_record([
            r.scheduler.name().to_string(),
            r.n_jobs.to_string(),
            r.replication.to_string(),
            r.seed.to_string(),
            format_sig6(r.makespan_s),
            format_sig6(r.di_paper),
            format_sig6(r.di_conventional),
            format_sig6(r.total_cost),
            r.iterations.to_string(),
            r.wall_clock_ms.to_string(),
        ])?;
    }
    w.flush()
}

pub fn emit_csv(rows: &[ExperimentRow], path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_csv(file, rows).map_err(|e| Error::io(path, e))
}

pub fn parse_csv(text: &str) -> Result<Vec<ExperimentRow>> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let header = r
        .headers()
        .map_err(|e| Error::Parse(e.to_string()))?
        .iter()
        .collect::<Vec<_>>()
        .join(",");
    if header != CSV_HEADER {
        return Err(Error::Parse(format!("unexpected header {header:?}")));
    }
    let mut rows = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
        let field = |i: usize| rec.get(i).unwrap_or("");
        let bad = |i: usize| Error::Parse(format!("row {}: bad value {:?} in column {}", line + 1, field(i), i + 1));
        let int = |i: usize| field(i).parse::<u64>().map_err(|_| bad(i));
        let real = |i: usize| field(i).parse::<f64>().map_err(|_| bad(i));
        rows.push(ExperimentRow {
            scheduler: SchedulerKind::from_name(field(0)).ok_or_else(|| bad(0))?,
            n_jobs: int(1)? as usize,
            replication: int(2)? as usize,
            seed: int(3)?,
            makespan_s: real(4)?,
            di_paper: real(5)?,
            di_conventional: real(6)?,
            total_cost: real(7)?,
            iterations: int(8)? as usize,
            wall_clock_ms: int(9)?,
        });
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Stat {
    pub mean: f64,
    /// Sample standard deviation; 0 for a single observation.
    pub sd: f64,
}

impl Stat {
    pub fn of(values: &[f64]) -> Self {
        let n = values.len();
        if n == 0 {
            return Self::default();
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let sd = if n > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        Self { mean, sd }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub scheduler: SchedulerKind,
    pub n_jobs: usize,
    pub replications: usize,
    pub makespan: Stat,
    pub di_paper: Stat,
    pub di_conventional: Stat,
    pub cost: Stat,
}

/// Mean and sample standard deviation per (scheduler, n_jobs), ordered by
/// scheduler then job count.
pub fn aggregate(rows: &[ExperimentRow]) -> Vec<SummaryRow> {
    let mut cells: BTreeMap<(SchedulerKind, usize), Vec<&ExperimentRow>> = BTreeMap::new();
    for r in rows {
        cells.entry((r.scheduler, r.n_jobs)).or_default().push(r);
    }
    cells
        .into_iter()
        .map(|((scheduler, n_jobs), rs)| {
            let stat = |f: fn(&ExperimentRow) -> f64| Stat::of(&rs.iter().map(|r| f(r)).collect::<Vec<_>>());
            SummaryRow {
                scheduler,
                n_jobs,
                replications: rs.len(),
                makespan: stat(|r| r.makespan_s),
                di_paper: stat(|r| r.di_paper),
                di_conventional: stat(|r| r.di_conventional),
                cost: stat(|r| r.total_cost),
            }
        })
        .collect()
}
