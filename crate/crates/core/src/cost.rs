//! Analytic BSP cost model for one `mxv` on a distributed HPCG grid.
//!
//! Two row distributions are compared:
//!
//! * **geometric**: the grid is split into `px × py × pz` blocks of
//!   `s_d = n_d / p_d` points and each node exchanges its face halo,
//!   `h = 2 (s_x s_y + s_y s_z + s_x s_z)` values;
//! * **block-cyclic (1D)**: every node needs the whole input vector, so the
//!   busiest node moves `n (p - 1) / p` values.
//!
//! Both need one synchronization per `mxv`. Only face halos are counted, even
//! though a 27-point stencil also couples edge and corner neighbours.

use serde::{Deserialize, Serialize};

use crate::problem::{stencil_nnz, GridDims};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeGrid {
    pub px: usize,
    pub py: usize,
    pub pz: usize,
}

impl NodeGrid {
    pub fn new(px: usize, py: usize, pz: usize) -> Result<Self> {
        if px == 0 || py == 0 || pz == 0 {
            return Err(Error::InvalidConfig(format!(
                "node grid {px}x{py}x{pz} has an empty dimension"
            )));
        }
        Ok(Self { px, py, pz })
    }

    pub fn nodes(&self) -> usize {
        self.px * self.py * self.pz
    }

    /// Local block size `(s_x, s_y, s_z)`; errors unless every `p_d | n_d`.
    pub fn local_dims(&self, dims: GridDims) -> Result<(usize, usize, usize)> {
        for (dim, size, parts) in [
            ('x', dims.nx, self.px),
            ('y', dims.ny, self.py),
            ('z', dims.nz, self.pz),
        ] {
            if size % parts != 0 {
                return Err(Error::Indivisible {
                    dim,
                    size,
                    divisor: parts,
                });
            }
        }
        Ok((dims.nx / self.px, dims.ny / self.py, dims.nz / self.pz))
    }
}

/// Face-halo size of one node's block.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Halo {
    /// `2 (s_x s_y + s_y s_z + s_x s_z)` as written.
    pub raw: u64,
    /// False when `p = 1`: the faces border nothing and no data moves.
    pub has_neighbors: bool,
}

impl Halo {
    pub fn effective(&self) -> u64 {
        if self.has_neighbors {
            self.raw
        } else {
            0
        }
    }
}

pub fn halo_volume(dims: GridDims, grid: NodeGrid) -> Result<Halo> {
    let (sx, sy, sz) = grid.local_dims(dims)?;
    Ok(Halo {
        raw: 2 * (sx * sy + sy * sz + sx * sz) as u64,
        has_neighbors: grid.nodes() > 1,
    })
}

/// Picks the factorization `p = px·py·pz` (with `p_d | n_d`) of least halo.
/// Ties go to the most cubic block (smallest largest `s_d`), then to the
/// lexicographically smallest `(px, py, pz)`.
pub fn factor_nodes(p: usize, dims: GridDims) -> Result<NodeGrid> {
    let none = || Error::NoFactorization {
        p,
        nx: dims.nx,
        ny: dims.ny,
        nz: dims.nz,
    };
    if p == 0 {
        return Err(none());
    }
    let mut best: Option<((u64, usize), NodeGrid)> = None;
    for px in (1..=p).filter(|d| p.is_multiple_of(*d)) {
        for py in (1..=p / px).filter(|d| (p / px).is_multiple_of(*d)) {
            let grid = NodeGrid {
                px,
                py,
                pz: p / (px * py),
            };
            let Ok((sx, sy, sz)) = grid.local_dims(dims) else {
                continue;
            };
            let key = (halo_volume(dims, grid)?.raw, sx.max(sy).max(sz));
            // Enumeration is lexicographic, so strict `<` keeps the first tie.
            if best.is_none_or(|(k, _)| key < k) {
                best = Some((key, grid));
            }
        }
    }
    best.map(|(_, g)| g).ok_or_else(none)
}

/// `⌈n (p - 1) / p⌉`: values the busiest node moves under a 1D block-cyclic split.
pub fn blockcyclic_comm_volume(n: u64, p: u64) -> u64 {
    assert!(p >= 1, "node count must be positive");
    (n * (p - 1)).div_ceil(p)
}

/// `n / p · (√p - 1)` for a 2D matrix distribution (reported for comparison only).
pub fn two_d_comm_volume(n: u64, p: u64) -> f64 {
    n as f64 / p as f64 * ((p as f64).sqrt() - 1.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostBreakdown {
    /// Stored entries per node, the `Θ(n/p)` work proxy.
    pub computation: f64,
    /// Values exchanged per node per `mxv`.
    pub communication: f64,
    /// Barriers per `mxv`.
    pub synchronization: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistributionComparison {
    pub nodes: usize,
    pub grid: NodeGrid,
    pub halo: Halo,
    pub geometric: CostBreakdown,
    pub block_cyclic: CostBreakdown,
    pub two_d_communication: f64,
}

pub fn compare_distributions(dims: GridDims, p: usize) -> Result<DistributionComparison> {
    let grid = factor_nodes(p, dims)?;
    let halo = halo_volume(dims, grid)?;
    let n = dims.len() as u64;
    let computation = stencil_nnz(dims) as f64 / p as f64;
    Ok(DistributionComparison {
        nodes: p,
        grid,
        halo,
        geometric: CostBreakdown {
            computation,
            communication: halo.effective() as f64,
            synchronization: 1,
        },
        block_cyclic: CostBreakdown {
            computation,
            communication: blockcyclic_comm_volume(n, p as u64) as f64,
            synchronization: 1,
        },
        two_d_communication: two_d_comm_volume(n, p as u64),
    })
}
