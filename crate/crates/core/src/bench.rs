//! Benchmark harness: symmetry test, timed CG+MG runs and their reports.
//!
//! Only the solve phase is timed per run; hierarchy generation and coloring
//! are reported once as `setup_ns`. Times are integer nanoseconds from a
//! monotonic clock so that nested intervals add up exactly.

use std::io::{Read, Write};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{dot, mxv, DenseVector, Descriptor, PlusTimes};
use crate::cg::{cg_solve_probed, CgConfig};
use crate::cost::compare_distributions;
use crate::multigrid::{mg_vcycle, CycleStats};
use crate::problem::{build_hierarchy, build_rhs, GridDims, ProblemLevel, DIAGONAL_VALUE};
use crate::smoother::SmootherConfig;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub dims: GridDims,
    pub levels: usize,
    pub smoother: SmootherConfig,
    pub cg: CgConfig,
    pub runs: usize,
    /// Seed for the symmetry-test vectors.
    pub seed: u64,
    /// Cap on worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
    pub skip_symmetry: bool,
}

impl BenchConfig {
    pub fn new(dims: GridDims) -> Self {
        Self {
            dims,
            levels: 4,
            smoother: SmootherConfig::default(),
            cg: CgConfig::default(),
            runs: 10,
            seed: 1,
            threads: None,
            skip_symmetry: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.runs == 0 {
            return Err(Error::InvalidConfig("runs must be >= 1".into()));
        }
        if self.levels == 0 {
            return Err(Error::InvalidConfig("levels must be >= 1".into()));
        }
        if self.smoother.sweeps == 0 {
            return Err(Error::InvalidConfig("sweeps must be >= 1".into()));
        }
        if self.threads == Some(0) {
            return Err(Error::InvalidConfig("threads must be >= 1".into()));
        }
        self.cg.validate()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymmetryVerdict {
    /// `xᵀ(O·y)`
    pub x_op_y: f64,
    /// `yᵀ(O·x)`
    pub y_op_x: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl SymmetryVerdict {
    fn new(x_op_y: f64, y_op_x: f64, tolerance: f64) -> Self {
        Self {
            x_op_y,
            y_op_x,
            tolerance,
            passed: (x_op_y - y_op_x).abs() <= tolerance,
        }
    }

    pub fn difference(&self) -> f64 {
        (self.x_op_y - self.y_op_x).abs()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymmetryReport {
    pub matrix: SymmetryVerdict,
    pub preconditioner: SymmetryVerdict,
}

impl SymmetryReport {
    pub fn passed(&self) -> bool {
        self.matrix.passed && self.preconditioner.passed
    }
}

/// `n` values uniform in `[-1, 1)` from ChaCha8 seeded with `seed`.
pub fn seeded_vector(n: usize, seed: u64) -> DenseVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    DenseVector::from_vec((0..n).map(|_| rng.random_range(-1.0..1.0)).collect())
}

/// Checks `xᵀA y = yᵀA x` and `xᵀM y = yᵀM x`, with `M` one V-cycle from
/// `z = 0`, for two seeded random vectors. The tolerance is
/// `1e-8 · ‖x‖ ‖y‖ · 26 · √n`.
pub fn symmetry_test(hierarchy: &mut ProblemLevel, seed: u64, smoother: SmootherConfig) -> Result<SymmetryReport> {
    let n = hierarchy.len();
    let x = seeded_vector(n, seed);
    let y = seeded_vector(n, seed.wrapping_add(1));
    let tolerance = 1e-8 * dot(&x, &x)?.sqrt() * dot(&y, &y)?.sqrt() * DIAGONAL_VALUE * (n as f64).sqrt();

    let mut ax = DenseVector::zeros(n);
    let mut ay = DenseVector::zeros(n);
    mxv(&mut ax, None, hierarchy.matrix(), &x, &PlusTimes, Descriptor::DEFAULT)?;
    mxv(&mut ay, None, hierarchy.matrix(), &y, &PlusTimes, Descriptor::DEFAULT)?;
    let matrix = SymmetryVerdict::new(dot(&x, &ay)?, dot(&y, &ax)?, tolerance);

    let mut mx = DenseVector::zeros(n);
    let mut my = DenseVector::zeros(n);
    mg_vcycle(hierarchy, &mut mx, &x, smoother)?;
    mg_vcycle(hierarchy, &mut my, &y, smoother)?;
    let preconditioner = SymmetryVerdict::new(dot(&x, &my)?, dot(&y, &mx)?, tolerance);

    Ok(SymmetryReport { matrix, preconditioner })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelTiming {
    pub level: usize,
    pub rows: usize,
    pub smoother_ns: u64,
    pub restrict_refine_ns: u64,
    /// Fractions of the run's total solve time.
    pub smoother_share: f64,
    pub restrict_refine_share: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub run: usize,
    pub solve_ns: u64,
    pub mg_ns: u64,
    pub iterations: usize,
    pub converged: bool,
    pub final_residual: f64,
    pub true_residual: f64,
    pub residual_history: Vec<f64>,
    pub levels: Vec<LevelTiming>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelShare {
    pub level: usize,
    pub smoother_share: f64,
    pub restrict_refine_share: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub runs: usize,
    pub mean_solve_ns: f64,
    pub mean_mg_ns: f64,
    /// Mean MG time over mean solve time.
    pub mg_share: f64,
    pub levels: Vec<LevelShare>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub config: BenchConfig,
    pub setup_ns: u64,
    pub symmetry: Option<SymmetryReport>,
    pub runs: Vec<RunRecord>,
    pub aggregate: Aggregate,
}

fn nanos(d: std::time::Duration) -> u64 {
    u64::try_from(d.as_nanos()).unwrap_or(u64::MAX)
}

fn share(part: u64, whole: u64) -> f64 {
    if whole == 0 {
        0.0
    } else {
        part as f64 / whole as f64
    }
}

/// Builds the hierarchy, runs the symmetry test and `config.runs` timed solves.
///
/// Returns [`Error::SymmetryFailure`] when a symmetry check fails and
/// `skip_symmetry` is off.
pub fn run_benchmark(config: &BenchConfig) -> Result<Report> {
    config.validate()?;
    match config.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()?
            .install(|| run_in_pool(config)),
        None => run_in_pool(config),
    }
}

fn run_in_pool(config: &BenchConfig) -> Result<Report> {
    let setup = Instant::now();
    let mut hierarchy = build_hierarchy(config.dims, config.levels)?;
    let setup_ns = nanos(setup.elapsed());

    let symmetry = if config.skip_symmetry {
        None
    } else {
        let verdicts = symmetry_test(&mut hierarchy, config.seed, config.smoother)?;
        if !verdicts.passed() {
            return Err(Error::SymmetryFailure(Box::new(verdicts)));
        }
        Some(verdicts)
    };

    let rows: Vec<usize> = hierarchy.levels().map(ProblemLevel::len).collect();
    let b = build_rhs(config.dims);
    let x0 = DenseVector::zeros(b.len());
    let mut runs = Vec::with_capacity(config.runs);
    for run in 0..config.runs {
        let mut stats = CycleStats::new(rows.len());
        let start = Instant::now();
        let result = cg_solve_probed(&mut hierarchy, &b, &x0, &config.cg, config.smoother, &mut stats)?;
        let solve_ns = nanos(start.elapsed());
        let levels = stats
            .levels
            .iter()
            .zip(&rows)
            .enumerate()
            .map(|(level, (s, &n))| {
                let smoother_ns = nanos(s.smoother_time);
                let restrict_refine_ns = nanos(s.transfer_time);
                LevelTiming {
                    level,
                    rows: n,
                    smoother_ns,
                    restrict_refine_ns,
                    smoother_share: share(smoother_ns, solve_ns),
                    restrict_refine_share: share(restrict_refine_ns, solve_ns),
                }
            })
            .collect();
        runs.push(RunRecord {
            run,
            solve_ns,
            mg_ns: nanos(stats.cycle_time),
            iterations: result.iterations,
            converged: result.converged,
            final_residual: result.final_residual(),
            true_residual: result.true_residual,
            residual_history: result.residual_history,
            levels,
        });
    }

    let aggregate = aggregate(&runs, rows.len());
    Ok(Report {
        config: config.clone(),
        setup_ns,
        symmetry,
        runs,
        aggregate,
    })
}

fn aggregate(runs: &[RunRecord], depth: usize) -> Aggregate {
    let count = runs.len() as f64;
    let mean = |f: &dyn Fn(&RunRecord) -> u64| runs.iter().map(|r| f(r) as f64).sum::<f64>() / count;
    let mean_solve_ns = mean(&|r| r.solve_ns);
    let mean_mg_ns = mean(&|r| r.mg_ns);
    let levels = (0..depth)
        .map(|level| LevelShare {
            level,
            smoother_share: mean(&|r| r.levels[level].smoother_ns) / mean_solve_ns.max(f64::MIN_POSITIVE),
            restrict_refine_share: mean(&|r| r.levels[level].restrict_refine_ns) / mean_solve_ns.max(f64::MIN_POSITIVE),
        })
        .collect();
    Aggregate {
        runs: runs.len(),
        mean_solve_ns,
        mean_mg_ns,
        mg_share: if mean_solve_ns > 0.0 {
            mean_mg_ns / mean_solve_ns
        } else {
            0.0
        },
        levels,
    }
}

impl Report {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Flat projection: one row per (run, level, kernel).
    pub fn csv_rows(&self) -> Vec<CsvRow> {
        let mut rows = Vec::new();
        for run in &self.runs {
            for l in &run.levels {
                rows.push(CsvRow {
                    run: run.run,
                    level: l.level,
                    kernel: TimedKernel::Smoother,
                    nanoseconds: l.smoother_ns,
                    share: l.smoother_share,
                });
                rows.push(CsvRow {
                    run: run.run,
                    level: l.level,
                    kernel: TimedKernel::RestrictRefine,
                    nanoseconds: l.restrict_refine_ns,
                    share: l.restrict_refine_share,
                });
            }
        }
        rows
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        write_csv_records(out, self.csv_rows())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimedKernel {
    Smoother,
    RestrictRefine,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub run: usize,
    pub level: usize,
    pub kernel: TimedKernel,
    pub nanoseconds: u64,
    pub share: f64,
}

/// One line of the `cost` table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostRow {
    pub nodes: usize,
    pub px: usize,
    pub py: usize,
    pub pz: usize,
    pub halo_raw: u64,
    pub computation: f64,
    pub geometric_comm: f64,
    pub block_cyclic_comm: f64,
    pub two_d_comm: f64,
    pub synchronization: u32,
}

pub fn cost_table(dims: GridDims, nodes: &[usize]) -> Result<Vec<CostRow>> {
    nodes
        .iter()
        .map(|&p| {
            let c = compare_distributions(dims, p)?;
            Ok(CostRow {
                nodes: p,
                px: c.grid.px,
                py: c.grid.py,
                pz: c.grid.pz,
                halo_raw: c.halo.raw,
                computation: c.geometric.computation,
                geometric_comm: c.geometric.communication,
                block_cyclic_comm: c.block_cyclic.communication,
                two_d_comm: c.two_d_communication,
                synchronization: c.geometric.synchronization,
            })
        })
        .collect()
}

pub fn write_csv_records<W: Write, T: Serialize>(out: W, rows: impl IntoIterator<Item = T>) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv_records<R: Read, T: for<'de> Deserialize<'de>>(input: R) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_reader(input);
    let rows = r.deserialize().collect::<std::result::Result<Vec<T>, _>>()?;
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config() -> BenchConfig {
        BenchConfig {
            levels: 2,
            runs: 2,
            cg: CgConfig {
                fixed_iterations: Some(5),
                ..CgConfig::default()
            },
            ..BenchConfig::new(GridDims::cube(8).unwrap())
        }
    }

    #[test]
    fn seeded_vectors_are_reproducible() {
        let a = seeded_vector(100, 7);
        assert_eq!(a, seeded_vector(100, 7));
        assert_ne!(a, seeded_vector(100, 8));
        assert!(a.iter().all(|v| (-1.0..1.0).contains(v)));
    }

    #[test]
    fn report_shape_and_shares() {
        let report = run_benchmark(&small_config()).unwrap();
        assert_eq!(report.runs.len(), 2);
        assert_eq!(report.aggregate.runs, 2);
        assert!(report.symmetry.as_ref().unwrap().passed());
        for run in &report.runs {
            assert_eq!(run.iterations, 5);
            assert_eq!(run.levels.len(), 2);
            let inner: u64 = run.levels.iter().map(|l| l.smoother_ns + l.restrict_refine_ns).sum();
            assert!(inner <= run.mg_ns && run.mg_ns <= run.solve_ns);
            for l in &run.levels {
                assert!((0.0..=1.0).contains(&l.smoother_share));
                assert!((0.0..=1.0).contains(&l.restrict_refine_share));
            }
        }
        assert_eq!(report.csv_rows().len(), 2 * 2 * 2);
    }

    #[test]
    fn invalid_configs() {
        let mut c = small_config();
        c.runs = 0;
        assert!(matches!(run_benchmark(&c), Err(Error::InvalidConfig(_))));
        let mut c = small_config();
        c.levels = 4;
        assert!(matches!(run_benchmark(&c), Err(Error::Indivisible { .. })));
        let mut c = small_config();
        c.threads = Some(0);
        assert!(run_benchmark(&c).is_err());
    }

    #[test]
    fn forward_only_smoother_aborts_the_benchmark() {
        let mut c = small_config();
        c.smoother = c.smoother.forward_only();
        assert!(matches!(run_benchmark(&c), Err(Error::SymmetryFailure(_))));
        c.skip_symmetry = true;
        assert!(run_benchmark(&c).unwrap().symmetry.is_none());
    }

    #[test]
    fn cost_table_rows() {
        let rows = cost_table(GridDims::cube(16).unwrap(), &[1, 2, 4, 8]).unwrap();
        assert_eq!(rows.len(), 4);
        assert_eq!(rows[0].geometric_comm, 0.0);
        assert_eq!(rows[0].block_cyclic_comm, 0.0);
        for r in &rows[1..] {
            assert!(r.geometric_comm <= r.block_cyclic_comm);
        }
        let mut buf = Vec::new();
        write_csv_records(&mut buf, &rows).unwrap();
        let back: Vec<CostRow> = read_csv_records(buf.as_slice()).unwrap();
        assert_eq!(back, rows);
    }
}
