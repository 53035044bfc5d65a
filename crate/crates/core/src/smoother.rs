//! Red-black (multicolor) Gauss–Seidel, written only in terms of masked
//! `mxv` and `apply_masked`.
//!
//! For color `k` the masked product `s⟨C_k⟩ = A·z` gives the full row sums
//! including the diagonal term, and every `i ∈ C_k` is then updated as
//!
//! ```text
//! z[i] = (r[i] - s[i] + z[i]·d[i]) / d[i]
//! ```
//!
//! which is the Gauss–Seidel equation for row `i` with the diagonal added back.
//! Indices inside one color never read each other, so the update order within
//! a color does not matter. Colors run strictly one after another.

use serde::{Deserialize, Serialize};

use crate::algebra::{apply_masked, mxv, DenseVector, Descriptor, IndexMask, PlusTimes, SparseMatrix};
use crate::problem::ProblemLevel;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepMode {
    /// Forward color order then backward color order.
    #[default]
    Symmetric,
    /// Forward color order only. Not symmetric; kept for fault-injection tests.
    ForwardOnly,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SmootherConfig {
    /// Smoothing applications per call.
    pub sweeps: usize,
    pub mode: SweepMode,
}

impl SmootherConfig {
    pub fn new(sweeps: usize) -> Result<Self> {
        if sweeps == 0 {
            return Err(Error::InvalidConfig("smoother sweeps must be >= 1".into()));
        }
        Ok(Self {
            sweeps,
            mode: SweepMode::Symmetric,
        })
    }

    pub fn forward_only(self) -> Self {
        Self {
            mode: SweepMode::ForwardOnly,
            ..self
        }
    }
}

impl Default for SmootherConfig {
    fn default() -> Self {
        Self {
            sweeps: 1,
            mode: SweepMode::Symmetric,
        }
    }
}

fn check_sizes(level: &ProblemLevel, z: &DenseVector, r: &DenseVector) -> Result<()> {
    for v in [z, r] {
        if v.len() != level.len() {
            return Err(Error::DimensionMismatch {
                op: "rbgs",
                expected: level.len(),
                found: v.len(),
            });
        }
    }
    Ok(())
}

fn relax_color(
    a: &SparseMatrix,
    diag: &DenseVector,
    mask: &IndexMask,
    s: &mut DenseVector,
    z: &mut DenseVector,
    r: &DenseVector,
) -> Result<()> {
    mxv(s, Some(mask), a, z, &PlusTimes, Descriptor::STRUCTURAL)?;
    apply_masked(mask, z, [r, s, diag], |_, zi, [ri, si, di]| {
        *zi = (ri - si + *zi * di) / di;
    })
}

fn sweep(
    level: &mut ProblemLevel,
    z: &mut DenseVector,
    r: &DenseVector,
    order: impl Iterator<Item = usize>,
) -> Result<()> {
    check_sizes(level, z, r)?;
    let ProblemLevel {
        a,
        diag,
        coloring,
        work,
        ..
    } = level;
    let masks = coloring.masks();
    for k in order {
        relax_color(a, diag, &masks[k], &mut work.s, z, r)?;
    }
    Ok(())
}

/// One Gauss–Seidel pass over colors `0, 1, .., c-1`.
pub fn rbgs_forward(level: &mut ProblemLevel, z: &mut DenseVector, r: &DenseVector) -> Result<()> {
    let c = level.coloring.num_colors();
    sweep(level, z, r, 0..c)
}

/// One Gauss–Seidel pass over colors `c-1, .., 0`. Order within a color is
/// irrelevant, so reversing the colors reproduces the reversed sweep.
pub fn rbgs_backward(level: &mut ProblemLevel, z: &mut DenseVector, r: &DenseVector) -> Result<()> {
    let c = level.coloring.num_colors();
    sweep(level, z, r, (0..c).rev())
}

/// `config.sweeps` repetitions of forward then backward, whatever `config.mode` says.
pub fn rbgs_symmetric(
    level: &mut ProblemLevel,
    z: &mut DenseVector,
    r: &DenseVector,
    config: SmootherConfig,
) -> Result<()> {
    for _ in 0..config.sweeps {
        rbgs_forward(level, z, r)?;
        rbgs_backward(level, z, r)?;
    }
    Ok(())
}

/// Applies the smoother selected by `config.mode`.
pub fn smooth(level: &mut ProblemLevel, z: &mut DenseVector, r: &DenseVector, config: SmootherConfig) -> Result<()> {
    match config.mode {
        SweepMode::Symmetric => rbgs_symmetric(level, z, r, config),
        SweepMode::ForwardOnly => {
            for _ in 0..config.sweeps {
                rbgs_forward(level, z, r)?;
            }
            Ok(())
        }
    }
}
