use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hpcg_grb::bench::{cost_table, run_benchmark, write_csv_records, BenchConfig};
use hpcg_grb::cg::CgConfig;
use hpcg_grb::problem::{build_hierarchy, GridDims};
use hpcg_grb::smoother::SmootherConfig;
use hpcg_grb::Error;

#[derive(Parser)]
#[command(name = "hpcg-grb", version, about = "HPCG on GraphBLAS-style sparse primitives")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run timed CG+MG solves and emit a report.
    Bench(BenchArgs),
    /// Compare per-node communication of geometric and block-cyclic distributions.
    Cost(CostArgs),
    /// Write one level's matrix or restriction operator in MatrixMarket format.
    Dump(DumpArgs),
}

#[derive(Args)]
struct Grid {
    #[arg(long)]
    nx: usize,
    #[arg(long)]
    ny: usize,
    #[arg(long)]
    nz: usize,
}

impl Grid {
    fn dims(&self) -> Result<GridDims, Error> {
        GridDims::new(self.nx, self.ny, self.nz)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFormat {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum TableFormat {
    Table,
    Csv,
    Json,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    grid: Grid,
    #[arg(long, default_value_t = 4)]
    levels: usize,
    #[arg(long, default_value_t = 1)]
    sweeps: usize,
    #[arg(long, default_value_t = 500)]
    max_iters: usize,
    #[arg(long, default_value_t = 1e-6)]
    rtol: f64,
    /// Run exactly N CG iterations (recommended for timing comparisons).
    #[arg(long, value_name = "N")]
    fixed_iters: Option<usize>,
    #[arg(long, default_value_t = 10)]
    runs: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    no_precond: bool,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    skip_symmetry: bool,
    /// Fault injection: smooth with forward sweeps only, which breaks symmetry.
    #[arg(long, hide = true)]
    forward_only: bool,
    #[arg(long, value_enum, default_value = "json")]
    format: ReportFormat,
    /// Write to this file instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct CostArgs {
    #[command(flatten)]
    grid: Grid,
    #[arg(long, value_delimiter = ',', required = true)]
    nodes: Vec<usize>,
    #[arg(long, value_enum, default_value = "table")]
    format: TableFormat,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Operator {
    Matrix,
    Restriction,
}

#[derive(Args)]
struct DumpArgs {
    #[command(flatten)]
    grid: Grid,
    #[arg(long, default_value_t = 1)]
    levels: usize,
    /// Level to dump, 0 being the finest.
    #[arg(long, default_value_t = 0)]
    level: usize,
    #[arg(long, value_enum, default_value = "matrix")]
    operator: Operator,
    #[arg(long)]
    output: Option<PathBuf>,
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::SymmetryFailure(_) => 2,
        Error::Breakdown { .. } => 3,
        _ => 1,
    }
}

fn open_output(path: Option<&PathBuf>) -> Result<Box<dyn Write>, Error> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn bench(args: &BenchArgs) -> Result<(), Error> {
    let cg = CgConfig {
        fixed_iterations: args.fixed_iters,
        use_preconditioner: !args.no_precond,
        ..CgConfig::new(args.max_iters, args.rtol)?
    };
    let mut smoother = SmootherConfig::new(args.sweeps)?;
    if args.forward_only {
        smoother = smoother.forward_only();
    }
    let config = BenchConfig {
        levels: args.levels,
        smoother,
        cg,
        runs: args.runs,
        seed: args.seed,
        threads: args.threads,
        skip_symmetry: args.skip_symmetry,
        ..BenchConfig::new(args.grid.dims()?)
    };
    let report = run_benchmark(&config)?;
    let mut out = open_output(args.output.as_ref())?;
    match args.format {
        ReportFormat::Json => writeln!(out, "{}", report.to_json()?)?,
        ReportFormat::Csv => report.write_csv(&mut out)?,
    }
    out.flush()?;
    Ok(())
}

fn cost(args: &CostArgs) -> Result<(), Error> {
    let rows = cost_table(args.grid.dims()?, &args.nodes)?;
    let mut out = open_output(args.output.as_ref())?;
    match args.format {
        TableFormat::Csv => write_csv_records(&mut out, &rows)?,
        TableFormat::Json => writeln!(out, "{}", serde_json::to_string_pretty(&rows)?)?,
        TableFormat::Table => {
            writeln!(
                out,
                "{:>6} {:>10} {:>10} {:>14} {:>14} {:>12}",
                "nodes", "grid", "halo", "block-cyclic", "2d", "nnz/node"
            )?;
            for r in &rows {
                writeln!(
                    out,
                    "{:>6} {:>10} {:>10} {:>14} {:>14.1} {:>12.1}",
                    r.nodes,
                    format!("{}x{}x{}", r.px, r.py, r.pz),
                    r.geometric_comm,
                    r.block_cyclic_comm,
                    r.two_d_comm,
                    r.computation
                )?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

fn dump(args: &DumpArgs) -> Result<(), Error> {
    let hierarchy = build_hierarchy(args.grid.dims()?, args.levels)?;
    let level = hierarchy
        .levels()
        .nth(args.level)
        .ok_or_else(|| Error::InvalidConfig(format!("level {} of {}", args.level, args.levels)))?;
    let matrix = match args.operator {
        Operator::Matrix => level.matrix(),
        Operator::Restriction => level.restriction().ok_or(Error::NoCoarserLevel)?,
    };
    let mut out = open_output(args.output.as_ref())?;
    matrix.write_matrix_market(&mut out)?;
    out.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    // Usage errors map to the config-error code; clap would exit with 2.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Bench(a) => bench(a),
        Command::Cost(a) => cost(a),
        Command::Dump(a) => dump(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
