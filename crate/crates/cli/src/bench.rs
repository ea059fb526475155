//! Benchmark grid runner.

use std::time::Instant;

use laminate_core::{
    assemble_fast_voigt_free_with_stats, assemble_fast_with, assemble_standard_with, frobenius_rel_diff,
    AssemblyStats, FastOptions, ProblemSetup, StandardOptions, StiffnessMatrix,
};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::{Backend, BenchConfig};
use crate::Result;

/// One timed assembly of one grid cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub backend: Backend,
    pub p: usize,
    /// Elements per in-plane direction.
    pub elements: usize,
    pub m: usize,
    pub m_bar: usize,
    /// Median wall time over the repetitions, seconds.
    pub time_s: f64,
    pub nnz: usize,
    /// Relative Frobenius difference to the standard matrix, when standard ran.
    pub rel_diff: Option<f64>,
    /// Instrumented quadrature-point visits.
    pub qpoints: u64,
}

impl BenchRecord {
    fn key(&self) -> (&'static str, usize, usize, usize) {
        (self.backend.name(), self.p, self.elements, self.m)
    }
}

/// A grid cell that could not be assembled.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellFailure {
    pub p: usize,
    pub elements: usize,
    pub m: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct BenchOutcome {
    pub records: Vec<BenchRecord>,
    pub failures: Vec<CellFailure>,
}

/// Assembles `setup` with `backend`.
pub fn assemble(
    setup: &ProblemSetup,
    backend: Backend,
    decompose_angles: bool,
) -> Result<(StiffnessMatrix, AssemblyStats)> {
    Ok(match backend {
        Backend::Standard => assemble_standard_with(setup, &StandardOptions::default())?,
        Backend::Fast => assemble_fast_with(setup, &FastOptions { reduce_layers: true, decompose_angles })?,
        Backend::VoigtFree => assemble_fast_voigt_free_with_stats(setup)?,
    })
}

fn time_backend(
    setup: &ProblemSetup,
    backend: Backend,
    config: &BenchConfig,
) -> Result<(StiffnessMatrix, AssemblyStats, f64)> {
    assemble(setup, backend, config.decompose_angles)?;
    let mut times = Vec::with_capacity(config.repetitions);
    let mut last = None;
    for _ in 0..config.repetitions {
        let start = Instant::now();
        let out = assemble(setup, backend, config.decompose_angles)?;
        times.push(start.elapsed().as_secs_f64());
        last = Some(out);
    }
    times.sort_by(f64::total_cmp);
    let (k, stats) = last.expect("at least one repetition");
    Ok((k, stats, times[times.len() / 2]))
}

fn run_cell(config: &BenchConfig, p: usize, elements: usize, m: usize) -> Result<Vec<BenchRecord>> {
    let setup = config.setup(p, elements, m)?;
    let mut backends = config.backends.clone();
    backends.sort();
    backends.dedup();
    let mut reference: Option<StiffnessMatrix> = None;
    let mut records = Vec::with_capacity(backends.len());
    for backend in backends {
        let (k, stats, time_s) = time_backend(&setup, backend, config)?;
        let rel_diff = match (&reference, backend) {
            (_, Backend::Standard) => Some(0.0),
            (Some(r), _) => Some(frobenius_rel_diff(r, &k)?),
            (None, _) => None,
        };
        records.push(BenchRecord {
            backend,
            p,
            elements,
            m,
            m_bar: setup.layup.num_distinct(),
            time_s,
            nnz: k.nnz(),
            rel_diff,
            qpoints: stats.quadrature_points,
        });
        if backend == Backend::Standard {
            reference = Some(k);
        }
    }
    Ok(records)
}

/// Runs every `(p, elements, m)` cell with every requested backend.
///
/// Cells run sequentially in an order shuffled by `seed`; records are sorted
/// by `(backend, p, elements, m)`. A failing cell is reported and skipped.
pub fn run_bench(config: &BenchConfig, seed: u64) -> Result<BenchOutcome> {
    config.validate()?;
    let mut cells: Vec<(usize, usize, usize)> = config
        .degrees
        .iter()
        .flat_map(|&p| config.inplane_elements.iter().flat_map(move |&e| config.layer_counts.iter().map(move |&m| (p, e, m))))
        .collect();
    cells.sort_unstable();
    cells.dedup();
    cells.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut outcome = BenchOutcome::default();
    for (p, elements, m) in cells {
        match run_cell(config, p, elements, m) {
            Ok(records) => outcome.records.extend(records),
            Err(e) => outcome.failures.push(CellFailure { p, elements, m, message: e.to_string() }),
        }
    }
    sort_records(&mut outcome.records);
    outcome.failures.sort_by_key(|f| (f.p, f.elements, f.m));
    Ok(outcome)
}

pub fn sort_records(records: &mut [BenchRecord]) {
    records.sort_by(|a, b| a.key().cmp(&b.key()));
}
