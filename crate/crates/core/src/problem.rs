//! The HPCG heat-diffusion problem: a 27-point stencil on a structured 3D
//! grid, its right-hand side, straight-injection restriction operators and the
//! multigrid level hierarchy.
//!
//! Points are ordered x-fastest: `i = ix + nx·(iy + ny·iz)`.

use serde::{Deserialize, Serialize};

use crate::algebra::{DenseVector, SparseMatrix};
use crate::coloring::{greedy_color, validate_coloring, Coloring};
use crate::{Error, Result};

pub const DIAGONAL_VALUE: f64 = 26.0;
pub const OFF_DIAGONAL_VALUE: f64 = -1.0;

/// Points per dimension of a structured grid; every dimension is at least 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridDims {
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
}

impl GridDims {
    pub fn new(nx: usize, ny: usize, nz: usize) -> Result<Self> {
        if nx < 2 || ny < 2 || nz < 2 {
            return Err(Error::InvalidGrid(format!(
                "{nx}x{ny}x{nz}: every dimension must be at least 2"
            )));
        }
        Ok(Self { nx, ny, nz })
    }

    pub fn cube(n: usize) -> Result<Self> {
        Self::new(n, n, n)
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny * self.nz
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `(nx, ny, nz)` halved, as used by the next coarser level.
    pub fn coarsen(&self) -> Result<Self> {
        for (dim, size) in [('x', self.nx), ('y', self.ny), ('z', self.nz)] {
            if size % 2 != 0 {
                return Err(Error::Indivisible { dim, size, divisor: 2 });
            }
        }
        Self::new(self.nx / 2, self.ny / 2, self.nz / 2)
    }

    /// Inverse of [`linearize`]; `i` must be `< len()`.
    pub fn coords(&self, i: usize) -> (usize, usize, usize) {
        (i % self.nx, (i / self.nx) % self.ny, i / (self.nx * self.ny))
    }
}

pub fn linearize(dims: GridDims, ix: usize, iy: usize, iz: usize) -> Result<usize> {
    if ix >= dims.nx || iy >= dims.ny || iz >= dims.nz {
        return Err(Error::CoordinateOutOfRange {
            ix,
            iy,
            iz,
            nx: dims.nx,
            ny: dims.ny,
            nz: dims.nz,
        });
    }
    Ok(ix + dims.nx * (iy + dims.ny * iz))
}

/// Range of neighbor offsets `c-1..=c+1` clipped to `[0, n)`.
fn span(c: usize, n: usize) -> std::ops::RangeInclusive<usize> {
    c.saturating_sub(1)..=(c + 1).min(n - 1)
}

/// 27-point stencil: 26 on the diagonal, -1 for every other grid point in the
/// 3×3×3 neighbourhood that lies inside the grid.
pub fn build_matrix(dims: GridDims) -> SparseMatrix {
    let n = dims.len();
    let mut row_offsets = Vec::with_capacity(n + 1);
    let mut cols = Vec::with_capacity(27 * n);
    let mut vals = Vec::with_capacity(27 * n);
    row_offsets.push(0);
    for iz in 0..dims.nz {
        for iy in 0..dims.ny {
            for ix in 0..dims.nx {
                let row = ix + dims.nx * (iy + dims.ny * iz);
                // z outermost, x innermost: columns come out increasing.
                for jz in span(iz, dims.nz) {
                    for jy in span(iy, dims.ny) {
                        for jx in span(ix, dims.nx) {
                            let col = jx + dims.nx * (jy + dims.ny * jz);
                            cols.push(col);
                            vals.push(if col == row { DIAGONAL_VALUE } else { OFF_DIAGONAL_VALUE });
                        }
                    }
                }
                row_offsets.push(cols.len());
            }
        }
    }
    SparseMatrix::from_csr_parts(n, n, row_offsets, cols, vals).expect("stencil generator produces valid CSR")
}

/// Closed-form stored-entry count of [`build_matrix`]: `Π_d (3·n_d − 2)`.
pub fn stencil_nnz(dims: GridDims) -> usize {
    (3 * dims.nx - 2) * (3 * dims.ny - 2) * (3 * dims.nz - 2)
}

/// All-ones right-hand side.
pub fn build_rhs(dims: GridDims) -> DenseVector {
    DenseVector::filled(dims.len(), 1.0)
}

pub fn extract_diagonal(a: &SparseMatrix) -> Result<DenseVector> {
    if a.nrows() != a.ncols() {
        return Err(Error::NotSquare {
            nrows: a.nrows(),
            ncols: a.ncols(),
        });
    }
    let mut d = DenseVector::zeros(a.nrows());
    for i in 0..a.nrows() {
        match a.get(i, i) {
            Some(v) if v != 0.0 => d[i] = v,
            _ => return Err(Error::MissingDiagonal { row: i }),
        }
    }
    Ok(d)
}

/// Straight-injection restriction from `fine` to the grid halved in every
/// dimension: coarse point `(cx, cy, cz)` takes the fine value at
/// `(2cx, 2cy, 2cz)`, the lowest corner of its octet.
pub fn build_restriction(fine: GridDims) -> Result<SparseMatrix> {
    // The coarse grid of a 2x2x2 fine grid is a single point, which is not a
    // valid `GridDims`, so only the parity check from `coarsen` is reused.
    if let Err(e @ Error::Indivisible { .. }) = fine.coarsen() {
        return Err(e);
    }
    let (cnx, cny, cnz) = (fine.nx / 2, fine.ny / 2, fine.nz / 2);
    let nc = cnx * cny * cnz;
    let mut cols = Vec::with_capacity(nc);
    for cz in 0..cnz {
        for cy in 0..cny {
            for cx in 0..cnx {
                cols.push(linearize(fine, 2 * cx, 2 * cy, 2 * cz)?);
            }
        }
    }
    SparseMatrix::from_csr_parts(nc, fine.len(), (0..=nc).collect(), cols, vec![1.0; nc])
}

/// Per-level scratch vectors, allocated once when the hierarchy is built.
#[derive(Clone, Debug)]
pub(crate) struct LevelWorkspace {
    /// Masked product target for the smoother.
    pub(crate) s: DenseVector,
    /// Fine-sized scratch: `A·z`, then `r - A·z`, then `Rᵀ·z_c`.
    pub(crate) f: DenseVector,
    pub(crate) r_c: DenseVector,
    pub(crate) z_c: DenseVector,
}

impl LevelWorkspace {
    fn new(n: usize, n_coarse: usize) -> Self {
        Self {
            s: DenseVector::zeros(n),
            f: DenseVector::zeros(n),
            r_c: DenseVector::zeros(n_coarse),
            z_c: DenseVector::zeros(n_coarse),
        }
    }
}

/// One multigrid level: operator, its diagonal, color masks and the link to
/// the next coarser level (with the restriction operator between them).
#[derive(Clone, Debug)]
pub struct ProblemLevel {
    pub(crate) dims: Option<GridDims>,
    pub(crate) a: SparseMatrix,
    pub(crate) diag: DenseVector,
    pub(crate) coloring: Coloring,
    pub(crate) restriction: Option<SparseMatrix>,
    pub(crate) coarser: Option<Box<ProblemLevel>>,
    pub(crate) work: LevelWorkspace,
}

impl ProblemLevel {
    /// A single level around an arbitrary square matrix with a nonzero
    /// diagonal. Useful for smoother experiments on non-grid operators.
    pub fn from_matrix(a: SparseMatrix) -> Result<Self> {
        let diag = extract_diagonal(&a)?;
        let coloring = greedy_color(&a);
        let n = a.nrows();
        Ok(Self {
            dims: None,
            a,
            diag,
            coloring,
            restriction: None,
            coarser: None,
            work: LevelWorkspace::new(n, 0),
        })
    }

    fn for_grid(dims: GridDims, coarser: Option<ProblemLevel>) -> Result<Self> {
        let mut level = Self::from_matrix(build_matrix(dims))?;
        level.dims = Some(dims);
        if let Some(c) = coarser {
            level.restriction = Some(build_restriction(dims)?);
            level.work = LevelWorkspace::new(dims.len(), c.len());
            level.coarser = Some(Box::new(c));
        }
        Ok(level)
    }

    pub fn len(&self) -> usize {
        self.a.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dims(&self) -> Option<GridDims> {
        self.dims
    }

    pub fn matrix(&self) -> &SparseMatrix {
        &self.a
    }

    pub fn diagonal(&self) -> &DenseVector {
        &self.diag
    }

    pub fn coloring(&self) -> &Coloring {
        &self.coloring
    }

    pub fn restriction(&self) -> Option<&SparseMatrix> {
        self.restriction.as_ref()
    }

    pub fn coarser(&self) -> Option<&ProblemLevel> {
        self.coarser.as_deref()
    }

    pub fn coarser_mut(&mut self) -> Option<&mut ProblemLevel> {
        self.coarser.as_deref_mut()
    }

    /// Number of levels from this one down to the coarsest.
    pub fn depth(&self) -> usize {
        self.levels().count()
    }

    /// This level followed by every coarser one.
    pub fn levels(&self) -> impl Iterator<Item = &ProblemLevel> {
        std::iter::successors(Some(self), |l| l.coarser())
    }

    /// Swaps in a different operator of the same shape, recomputing the
    /// diagonal. The coloring is kept, which is only meaningful when the
    /// sparsity pattern is unchanged (fault-injection fixtures).
    pub fn replace_matrix(&mut self, a: SparseMatrix) -> Result<()> {
        if a.nrows() != self.a.nrows() || a.ncols() != self.a.ncols() {
            return Err(Error::DimensionMismatch {
                op: "replace_matrix",
                expected: self.a.nrows(),
                found: a.nrows(),
            });
        }
        self.diag = extract_diagonal(&a)?;
        self.a = a;
        Ok(())
    }

    /// Swaps in another valid coloring, for example one with reordered masks.
    pub fn replace_coloring(&mut self, coloring: Coloring) -> Result<()> {
        let verdict = validate_coloring(&self.a, &coloring);
        if !verdict.is_valid() {
            return Err(Error::InvalidConfig(format!("coloring rejected: {verdict:?}")));
        }
        self.coloring = coloring;
        Ok(())
    }
}

/// Builds `levels` grid levels, finest first, halving every dimension
/// between consecutive levels. Each dimension must be a multiple of
/// `2^(levels-1)` and keep at least 2 points on the coarsest level.
pub fn build_hierarchy(dims: GridDims, levels: usize) -> Result<ProblemLevel> {
    if levels == 0 {
        return Err(Error::InvalidConfig("at least one level is required".into()));
    }
    let divisor = 1usize << (levels - 1);
    for (dim, size) in [('x', dims.nx), ('y', dims.ny), ('z', dims.nz)] {
        if size % divisor != 0 || size / divisor < 2 {
            return Err(Error::Indivisible { dim, size, divisor });
        }
    }
    let mut all = vec![dims];
    for _ in 1..levels {
        let next = all.last().unwrap().coarsen()?;
        all.push(next);
    }
    let mut coarser = None;
    for d in all.into_iter().rev() {
        coarser = Some(ProblemLevel::for_grid(d, coarser)?);
    }
    Ok(coarser.expect("levels >= 1"))
}
