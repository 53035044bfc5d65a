//! Preconditioned conjugate gradient over the algebra primitives.

use serde::{Deserialize, Serialize};

use crate::algebra::{dot, mxv, set_all, waxpby, waxpby_assign, DenseVector, Descriptor, PlusTimes, SparseMatrix};
use crate::multigrid::{mg_vcycle_probed, CycleProbe};
use crate::problem::ProblemLevel;
use crate::smoother::SmootherConfig;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CgConfig {
    pub max_iters: usize,
    /// Target for `‖r‖₂ / ‖b‖₂`.
    pub rtol: f64,
    pub use_preconditioner: bool,
    /// Run exactly this many iterations, ignoring `rtol` and `max_iters`.
    /// The loop still stops early if the residual becomes exactly zero.
    pub fixed_iterations: Option<usize>,
}

impl CgConfig {
    pub fn new(max_iters: usize, rtol: f64) -> Result<Self> {
        let cfg = Self {
            max_iters,
            rtol,
            ..Self::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(Error::InvalidConfig("max_iters must be >= 1".into()));
        }
        if self.rtol.is_nan() || self.rtol <= 0.0 {
            return Err(Error::InvalidConfig(format!("rtol must be > 0, got {}", self.rtol)));
        }
        Ok(())
    }

    pub fn unpreconditioned(self) -> Self {
        Self {
            use_preconditioner: false,
            ..self
        }
    }
}

impl Default for CgConfig {
    fn default() -> Self {
        Self {
            max_iters: 500,
            rtol: 1e-6,
            use_preconditioner: true,
            fixed_iterations: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CgResult {
    pub iterations: usize,
    /// `‖r‖₂` from the recurrence, starting with the initial residual.
    pub residual_history: Vec<f64>,
    pub converged: bool,
    pub solution: DenseVector,
    /// `‖b - A·x‖₂` recomputed once from the final iterate.
    pub true_residual: f64,
}

impl CgResult {
    pub fn final_residual(&self) -> f64 {
        *self
            .residual_history
            .last()
            .expect("history holds the initial residual")
    }
}

/// `‖b - A·x‖₂`.
pub fn residual_norm(a: &SparseMatrix, x: &DenseVector, b: &DenseVector) -> Result<f64> {
    let mut ax = DenseVector::zeros(b.len());
    mxv(&mut ax, None, a, x, &PlusTimes, Descriptor::DEFAULT)?;
    waxpby_assign(&mut ax, -1.0, 1.0, b)?;
    Ok(dot(&ax, &ax)?.sqrt())
}

pub fn cg_solve(
    hierarchy: &mut ProblemLevel,
    b: &DenseVector,
    x0: &DenseVector,
    config: &CgConfig,
    smoother: SmootherConfig,
) -> Result<CgResult> {
    cg_solve_probed(hierarchy, b, x0, config, smoother, &mut ())
}

/// [`cg_solve`] forwarding V-cycle measurements to `probe`.
pub fn cg_solve_probed<P: CycleProbe>(
    hierarchy: &mut ProblemLevel,
    b: &DenseVector,
    x0: &DenseVector,
    config: &CgConfig,
    smoother: SmootherConfig,
    probe: &mut P,
) -> Result<CgResult> {
    config.validate()?;
    let n = hierarchy.len();
    for v in [b, x0] {
        if v.len() != n {
            return Err(Error::DimensionMismatch {
                op: "cg_solve",
                expected: n,
                found: v.len(),
            });
        }
    }

    let mut x = x0.clone();
    let mut r = DenseVector::zeros(n);
    let mut z = DenseVector::zeros(n);
    let mut p = DenseVector::zeros(n);
    let mut q = DenseVector::zeros(n);

    mxv(&mut q, None, hierarchy.matrix(), &x, &PlusTimes, Descriptor::DEFAULT)?;
    waxpby(&mut r, 1.0, b, -1.0, &q)?;

    let b_norm = dot(b, b)?.sqrt();
    let relative = |norm: f64| if b_norm > 0.0 { norm / b_norm } else { norm };
    let mut r_norm = dot(&r, &r)?.sqrt();
    let mut history = vec![r_norm];
    let mut rho_prev = 0.0;
    let mut iterations = 0;

    loop {
        let done = match config.fixed_iterations {
            Some(k) => iterations >= k,
            None => relative(r_norm) < config.rtol || iterations >= config.max_iters,
        };
        if done || r_norm == 0.0 {
            break;
        }
        iterations += 1;

        if config.use_preconditioner {
            set_all(&mut z, 0.0);
            mg_vcycle_probed(hierarchy, &mut z, &r, smoother, probe)?;
        } else {
            z.copy_from(&r)?;
        }
        let rho = dot(&r, &z)?;
        if iterations == 1 {
            p.copy_from(&z)?;
        } else {
            waxpby_assign(&mut p, rho / rho_prev, 1.0, &z)?;
        }
        rho_prev = rho;

        mxv(&mut q, None, hierarchy.matrix(), &p, &PlusTimes, Descriptor::DEFAULT)?;
        let curvature = dot(&p, &q)?;
        if curvature.is_nan() || curvature <= 0.0 {
            return Err(Error::Breakdown {
                iteration: iterations,
                curvature,
            });
        }
        let alpha = rho / curvature;
        waxpby_assign(&mut x, 1.0, alpha, &p)?;
        waxpby_assign(&mut r, 1.0, -alpha, &q)?;
        r_norm = dot(&r, &r)?.sqrt();
        history.push(r_norm);
    }

    let true_residual = residual_norm(hierarchy.matrix(), &x, b)?;
    Ok(CgResult {
        iterations,
        converged: relative(r_norm) < config.rtol,
        residual_history: history,
        solution: x,
        true_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{build_hierarchy, build_matrix, build_rhs, GridDims};

    #[test]
    fn identity_converges_in_one_step() {
        let a = SparseMatrix::build_from_triplets(5, 5, (0..5).map(|i| (i, i, 1.0))).unwrap();
        let mut level = ProblemLevel::from_matrix(a).unwrap();
        let b = DenseVector::from_vec(vec![1.0, -2.0, 3.0, 0.5, 4.0]);
        let cfg = CgConfig::new(10, 1e-12).unwrap().unpreconditioned();
        let res = cg_solve(&mut level, &b, &DenseVector::zeros(5), &cfg, SmootherConfig::default()).unwrap();
        assert_eq!(res.iterations, 1);
        assert!(res.converged);
        assert_eq!(res.solution, b);
        assert_eq!(res.residual_history.len(), 2);
    }

    #[test]
    fn residual_norm_examples() {
        let g = GridDims::cube(4).unwrap();
        let a = build_matrix(g);
        let b = build_rhs(g);
        assert_eq!(residual_norm(&a, &DenseVector::zeros(64), &b).unwrap(), 8.0);

        let x = DenseVector::from_vec((0..64).map(|i| (i % 5) as f64 - 2.0).collect());
        let mut bx = DenseVector::zeros(64);
        mxv(&mut bx, None, &a, &x, &PlusTimes, Descriptor::DEFAULT).unwrap();
        assert!(residual_norm(&a, &x, &bx).unwrap() <= 1e-12 * dot(&bx, &bx).unwrap().sqrt());

        // Scalar loop oracle.
        let mut sq = 0.0;
        for i in 0..64 {
            let mut ax = 0.0;
            for j in 0..64 {
                ax += a.get(i, j).unwrap_or(0.0) * x[j];
            }
            sq += (b[i] - ax) * (b[i] - ax);
        }
        let got = residual_norm(&a, &x, &b).unwrap();
        assert!((got - sq.sqrt()).abs() <= 1e-12 * sq.sqrt());
    }

    #[test]
    fn history_invariants() {
        let g = GridDims::cube(8).unwrap();
        let mut h = build_hierarchy(g, 3).unwrap();
        let b = build_rhs(g);
        let cfg = CgConfig::new(200, 1e-8).unwrap();
        let res = cg_solve(
            &mut h,
            &b,
            &DenseVector::zeros(g.len()),
            &cfg,
            SmootherConfig::default(),
        )
        .unwrap();
        assert!(res.converged);
        assert_eq!(res.residual_history.len(), res.iterations + 1);
        assert!(res.final_residual() / 8.0_f64.powf(1.5) < 1e-8);

        let fixed = CgConfig {
            fixed_iterations: Some(3),
            ..cfg
        };
        let res = cg_solve(
            &mut h,
            &b,
            &DenseVector::zeros(g.len()),
            &fixed,
            SmootherConfig::default(),
        )
        .unwrap();
        assert_eq!(res.iterations, 3);
        assert_eq!(res.residual_history.len(), 4);
    }

    #[test]
    fn breakdown_on_indefinite_operator() {
        let a = SparseMatrix::build_from_triplets(2, 2, [(0, 0, 1.0), (1, 1, -1.0)]).unwrap();
        let mut level = ProblemLevel::from_matrix(a).unwrap();
        let b = DenseVector::from_vec(vec![1.0, 1.0]);
        let cfg = CgConfig::new(10, 1e-10).unwrap().unpreconditioned();
        let err = cg_solve(&mut level, &b, &DenseVector::zeros(2), &cfg, SmootherConfig::default()).unwrap_err();
        assert!(matches!(err, Error::Breakdown { iteration: 1, .. }));
    }

    #[test]
    fn config_validation() {
        assert!(CgConfig::new(0, 1e-6).is_err());
        assert!(CgConfig::new(10, 0.0).is_err());
        assert!(CgConfig::new(10, f64::NAN).is_err());
    }
}
