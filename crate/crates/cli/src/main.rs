use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use laminate_cli::bench::assemble;
use laminate_cli::{emit_report, run_bench, Backend, BenchConfig, ProblemConfig, ReportFormat};
use laminate_core::frobenius_rel_diff;

const VERIFY_TOLERANCE: f64 = 1e-12;

#[derive(Parser)]
#[command(name = "laminate", version, about = "Stiffness assembly for laminated composite plates")]
struct Cli {
    /// Worker threads for assembly (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    Standard,
    Fast,
    VoigtFree,
}

impl From<BackendArg> for Backend {
    fn from(b: BackendArg) -> Self {
        match b {
            BackendArg::Standard => Backend::Standard,
            BackendArg::Fast => Backend::Fast,
            BackendArg::VoigtFree => Backend::VoigtFree,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Time the backends over a grid and write a report.
    Bench {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "csv")]
        format: FormatArg,
        /// Seed for the execution order of grid cells.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Assemble one problem and optionally export the matrix.
    Assemble {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum, default_value = "fast")]
        backend: BackendArg,
        /// Matrix Market output path.
        #[arg(long)]
        export_matrix: Option<PathBuf>,
        /// Split the ply rotation into five angle-independent operator sets (fast backend).
        #[arg(long)]
        decompose_angles: bool,
    },
    /// Assemble with every backend and compare the matrices.
    Verify {
        #[arg(long)]
        config: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot configure {n} threads: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> anyhow::Result<ExitCode> {
    match command {
        Command::Bench { config, out, format, seed } => {
            let cfg = BenchConfig::load(&config).with_context(|| format!("reading {}", config.display()))?;
            let outcome = run_bench(&cfg, seed)?;
            for f in &outcome.failures {
                eprintln!("cell p={} elements={} m={} failed: {}", f.p, f.elements, f.m, f.message);
            }
            if outcome.records.is_empty() {
                bail!("every grid cell failed");
            }
            let format = match format {
                FormatArg::Csv => ReportFormat::Csv,
                FormatArg::Json => ReportFormat::Json,
            };
            let threads = rayon::current_num_threads();
            emit_report(&outcome.records, &outcome.failures, format, &out, threads, seed)
                .with_context(|| format!("writing {}", out.display()))?;
            println!("{} records written to {}", outcome.records.len(), out.display());
            Ok(if outcome.failures.is_empty() { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
        Command::Assemble { config, backend, export_matrix, decompose_angles } => {
            let cfg = ProblemConfig::load(&config).with_context(|| format!("reading {}", config.display()))?;
            let setup = cfg.setup()?;
            let backend = Backend::from(backend);
            if decompose_angles && backend != Backend::Fast {
                bail!("--decompose-angles applies to the fast backend only");
            }
            let start = Instant::now();
            let (k, stats) = assemble(&setup, backend, decompose_angles)?;
            let time = start.elapsed().as_secs_f64();
            println!("backend {backend}");
            println!("dofs {}", k.dim());
            println!("nnz {}", k.nnz());
            println!("layers {} distinct {}", setup.layup.num_layers(), setup.layup.num_distinct());
            println!("qpoints {}", stats.quadrature_points);
            println!("time_s {time:.6}");
            if let Some(path) = export_matrix {
                let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
                k.write_matrix_market(BufWriter::new(file))?;
                println!("matrix written to {}", path.display());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { config } => {
            let cfg = ProblemConfig::load(&config).with_context(|| format!("reading {}", config.display()))?;
            let setup = cfg.setup()?;
            let mats = Backend::ALL
                .iter()
                .map(|&b| Ok((b, assemble(&setup, b, false)?.0)))
                .collect::<anyhow::Result<Vec<_>>>()?;
            let mut worst = 0.0f64;
            for i in 0..mats.len() {
                for j in i + 1..mats.len() {
                    let d = frobenius_rel_diff(&mats[i].1, &mats[j].1)?;
                    println!("{} vs {}: {d:.3e}", mats[i].0, mats[j].0);
                    worst = worst.max(d);
                }
            }
            let ok = worst <= VERIFY_TOLERANCE;
            println!("max relative difference {worst:.3e}: {}", if ok { "OK" } else { "MISMATCH" });
            Ok(if ok { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
    }
}
