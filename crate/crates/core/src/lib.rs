//! Sparse linear algebra in the GraphBLAS style, and the HPCG benchmark
//! (27-point stencil, multicolor Gauss–Seidel, multigrid V-cycle, conjugate
//! gradient) written entirely on top of it.
//!
//! ```
//! use hpcg_grb::prelude::*;
//!
//! let dims = GridDims::cube(16)?;
//! let mut hierarchy = build_hierarchy(dims, 4)?;
//! let b = build_rhs(dims);
//! let x0 = DenseVector::zeros(dims.len());
//! let cfg = CgConfig::new(100, 1e-6)?;
//! let result = cg_solve(&mut hierarchy, &b, &x0, &cfg, SmootherConfig::default())?;
//! assert!(result.converged);
//! # Ok::<(), hpcg_grb::Error>(())
//! ```
//!
//! The accompanying book (`book/`) walks through every component; its code
//! listings are compiled and run as doctests of this crate.

pub mod algebra;
pub mod bench;
pub mod cg;
pub mod coloring;
pub mod cost;
mod error;
pub mod multigrid;
pub mod problem;
pub mod smoother;

pub use error::{Error, Result};

/// Compiles the book's listings as doctests.
#[cfg(doctest)]
mod book {
    macro_rules! chapters {
        ($($name:ident => $file:literal),* $(,)?) => {
            $(
                #[doc = include_str!(concat!("../../../book/src/", $file))]
                mod $name {}
            )*
        };
    }

    chapters! {
        introduction => "introduction.md",
        algebra => "algebra.md",
        problem => "problem.md",
        coloring => "coloring.md",
        smoother => "smoother.md",
        multigrid => "multigrid.md",
        cg => "cg.md",
        cost_model => "cost-model.md",
        harness => "harness.md",
    }
}

pub mod prelude {
    pub use crate::algebra::{
        apply_masked, dot, mxv, set_all, waxpby, waxpby_assign, DenseVector, Descriptor, IndexMask, PlusTimes,
        Semiring, SparseMatrix,
    };
    pub use crate::bench::{run_benchmark, symmetry_test, BenchConfig, Report};
    pub use crate::cg::{cg_solve, residual_norm, CgConfig, CgResult};
    pub use crate::coloring::{greedy_color, validate_coloring, Coloring, ColoringVerdict};
    pub use crate::cost::{blockcyclic_comm_volume, compare_distributions, factor_nodes, halo_volume, NodeGrid};
    pub use crate::multigrid::{mg_vcycle, refine_and_add, restrict_vector};
    pub use crate::problem::{
        build_hierarchy, build_matrix, build_restriction, build_rhs, extract_diagonal, linearize, GridDims,
        ProblemLevel,
    };
    pub use crate::smoother::{rbgs_backward, rbgs_forward, rbgs_symmetric, SmootherConfig};
    pub use crate::Error;
}
