//! Recursive V-cycle preconditioner.
//!
//! ```text
//! MG(level, z, r):
//!     z   <- smooth(level, z, r)
//!     if level has no coarser level: return z
//!     f   <- A·z
//!     r_c <- R·(r - f)
//!     z_c <- 0
//!     z_c <- MG(coarser, z_c, r_c)
//!     z   <- z + Rᵀ·z_c
//!     z   <- smooth(level, z, r)
//! ```
//!
//! Restriction is an unmasked `mxv` with the straight-injection matrix `R`;
//! refinement is the same `mxv` with the transpose descriptor, so `Rᵀ` is
//! never stored. All scratch vectors live in the level, so a cycle does not
//! allocate.

use std::time::{Duration, Instant};

use crate::algebra::{mxv, set_all, waxpby_assign, work, DenseVector, Descriptor, PlusTimes};
use crate::problem::{LevelWorkspace, ProblemLevel};
use crate::smoother::{smooth, SmootherConfig};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Kernel {
    Smoother,
    /// `f = A·z` and `r - f`.
    Residual,
    /// `R·(r - f)`.
    Restrict,
    /// `z += Rᵀ·z_c`.
    Refine,
}

/// Receives timing and work measurements from inside a V-cycle. Level 0 is
/// the finest. Every hook defaults to a no-op.
pub trait CycleProbe {
    fn on_kernel(&mut self, _level: usize, _kernel: Kernel, _elapsed: Duration, _nnz_visits: u64) {}

    /// Whole top-level cycle, coarser levels included.
    fn on_cycle(&mut self, _elapsed: Duration) {}
}

impl CycleProbe for () {}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct LevelStats {
    pub smoother_time: Duration,
    pub transfer_time: Duration,
    pub residual_time: Duration,
    pub smoother_calls: u64,
    pub transfer_calls: u64,
    pub nnz_visits: u64,
}

/// Accumulates per-level time and work over any number of cycles.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CycleStats {
    pub levels: Vec<LevelStats>,
    pub cycle_time: Duration,
    pub cycles: u64,
}

impl CycleStats {
    pub fn new(depth: usize) -> Self {
        Self {
            levels: vec![LevelStats::default(); depth],
            ..Self::default()
        }
    }

    pub fn total_nnz_visits(&self) -> u64 {
        self.levels.iter().map(|l| l.nnz_visits).sum()
    }

    /// Deepest level that has been touched, plus one.
    pub fn depth_reached(&self) -> usize {
        self.levels
            .iter()
            .rposition(|l| l.smoother_calls > 0)
            .map_or(0, |k| k + 1)
    }
}

impl CycleProbe for CycleStats {
    fn on_kernel(&mut self, level: usize, kernel: Kernel, elapsed: Duration, nnz_visits: u64) {
        if self.levels.len() <= level {
            self.levels.resize(level + 1, LevelStats::default());
        }
        let l = &mut self.levels[level];
        l.nnz_visits += nnz_visits;
        match kernel {
            Kernel::Smoother => {
                l.smoother_time += elapsed;
                l.smoother_calls += 1;
            }
            Kernel::Restrict | Kernel::Refine => {
                l.transfer_time += elapsed;
                l.transfer_calls += 1;
            }
            Kernel::Residual => l.residual_time += elapsed,
        }
    }

    fn on_cycle(&mut self, elapsed: Duration) {
        self.cycle_time += elapsed;
        self.cycles += 1;
    }
}

/// Runs `f` and reports its wall time and stored-entry visits to `probe`.
fn timed<P: CycleProbe>(probe: &mut P, level: usize, kernel: Kernel, f: impl FnOnce() -> Result<()>) -> Result<()> {
    let before = work::snapshot();
    let start = Instant::now();
    f()?;
    let elapsed = start.elapsed();
    probe.on_kernel(level, kernel, elapsed, (work::snapshot() - before).nnz_visits);
    Ok(())
}

fn check_len(op: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { op, expected, found });
    }
    Ok(())
}

/// One V-cycle improving `z` towards `A⁻¹·r`. Callers normally zero `z` first.
pub fn mg_vcycle(level: &mut ProblemLevel, z: &mut DenseVector, r: &DenseVector, config: SmootherConfig) -> Result<()> {
    mg_vcycle_probed(level, z, r, config, &mut ())
}

/// [`mg_vcycle`] reporting to `probe`.
pub fn mg_vcycle_probed<P: CycleProbe>(
    level: &mut ProblemLevel,
    z: &mut DenseVector,
    r: &DenseVector,
    config: SmootherConfig,
    probe: &mut P,
) -> Result<()> {
    let start = Instant::now();
    cycle(level, 0, z, r, config, probe)?;
    probe.on_cycle(start.elapsed());
    Ok(())
}

fn cycle<P: CycleProbe>(
    level: &mut ProblemLevel,
    depth: usize,
    z: &mut DenseVector,
    r: &DenseVector,
    config: SmootherConfig,
    probe: &mut P,
) -> Result<()> {
    check_len("mg_vcycle", level.len(), z.len())?;
    check_len("mg_vcycle", level.len(), r.len())?;

    timed(probe, depth, Kernel::Smoother, || smooth(level, z, r, config))?;

    let ProblemLevel {
        a,
        restriction: Some(restriction),
        coarser: Some(coarser),
        work: LevelWorkspace { f, r_c, z_c, .. },
        ..
    } = &mut *level
    else {
        return Ok(());
    };

    timed(probe, depth, Kernel::Residual, || {
        mxv(f, None, a, z, &PlusTimes, Descriptor::DEFAULT)?;
        waxpby_assign(f, -1.0, 1.0, r)
    })?;
    timed(probe, depth, Kernel::Restrict, || {
        mxv(r_c, None, restriction, f, &PlusTimes, Descriptor::DEFAULT)
    })?;
    set_all(z_c, 0.0);
    cycle(coarser, depth + 1, z_c, r_c, config, probe)?;
    timed(probe, depth, Kernel::Refine, || {
        mxv(f, None, restriction, z_c, &PlusTimes, Descriptor::TRANSPOSE_MATRIX)?;
        waxpby_assign(z, 1.0, 1.0, f)
    })?;

    timed(probe, depth, Kernel::Smoother, || smooth(level, z, r, config))
}

/// `out = R·v_fine`, projecting onto the next coarser level.
pub fn restrict_vector(level: &ProblemLevel, v_fine: &DenseVector, out: &mut DenseVector) -> Result<()> {
    let r = level.restriction().ok_or(Error::NoCoarserLevel)?;
    mxv(out, None, r, v_fine, &PlusTimes, Descriptor::DEFAULT)
}

/// `z += Rᵀ·z_c`. Only the injected (even-coordinate) fine points change.
pub fn refine_and_add(level: &mut ProblemLevel, z: &mut DenseVector, z_c: &DenseVector) -> Result<()> {
    let ProblemLevel { restriction, work, .. } = level;
    let r = restriction.as_ref().ok_or(Error::NoCoarserLevel)?;
    check_len("refine_and_add", r.ncols(), z.len())?;
    mxv(&mut work.f, None, r, z_c, &PlusTimes, Descriptor::TRANSPOSE_MATRIX)?;
    waxpby_assign(z, 1.0, 1.0, &work.f)
}
