//! Imitation learning: regressor construction from a demonstration and the
//! least-squares fit of the forcing-term weights.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector};

use crate::basis::{make_gaussian_basis, make_vonmises_basis, BasisFamily, BasisKind};
use crate::error::{Error, Result};
use crate::trajectory::{Demonstration, MovementKind};

/// Condition-number estimate of `AAᵀ` above which the ridge solve is used.
pub const RIDGE_CONDITION_THRESHOLD: f64 = 1e12;
/// Ridge strength relative to `trace(AAᵀ) / N`.
pub const RIDGE_RELATIVE_DELTA: f64 = 1e-8;

/// Regressors `A` (N×P) and targets `B` (n×P) for `min ‖B − WA‖`.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressorPair {
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
}

impl RegressorPair {
    pub fn new(a: DMatrix<f64>, b: DMatrix<f64>) -> Result<Self> {
        if a.ncols() != b.ncols() {
            return Err(Error::DimensionMismatch {
                expected: a.ncols(),
                actual: b.ncols(),
            });
        }
        Ok(RegressorPair { a, b })
    }

    /// `‖B − WA‖_F / ‖B‖_F`, or 0 when `B` vanishes.
    pub fn relative_residual(&self, w: &DMatrix<f64>) -> f64 {
        let norm_b = self.b.norm();
        if norm_b == 0.0 {
            return (w * &self.a).norm();
        }
        (&self.b - w * &self.a).norm() / norm_b
    }
}

/// Transformation-system gains shared by every primitive that is meant to be
/// combined with another.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gains {
    pub alpha_z: f64,
    pub beta_z: f64,
}

impl Gains {
    pub fn new(alpha_z: f64, beta_z: f64) -> Result<Self> {
        if !(alpha_z > 0.0 && alpha_z.is_finite()) {
            return Err(Error::param("alpha_z", format!("must be positive, got {alpha_z}")));
        }
        if !(beta_z > 0.0 && beta_z.is_finite()) {
            return Err(Error::param("beta_z", format!("must be positive, got {beta_z}")));
        }
        Ok(Gains { alpha_z, beta_z })
    }

    /// Critically damped gains, `β_z = α_z / 4`.
    pub fn critically_damped(alpha_z: f64) -> Result<Self> {
        Self::new(alpha_z, alpha_z / 4.0)
    }

    pub fn stiffness(&self) -> f64 {
        self.alpha_z * self.beta_z
    }
}

/// A trained movement primitive.
#[derive(Debug, Clone, PartialEq)]
pub struct LearnedPrimitive {
    pub kind: MovementKind,
    pub weights: DMatrix<f64>,
    pub basis: BasisFamily,
    pub gains: Gains,
    /// Present for discrete primitives only.
    pub alpha_s: Option<f64>,
    /// `τ_d` (discrete) or `τ_r = T / 2π` (rhythmic) of the demonstration.
    pub tau_demo: f64,
    pub goal_demo: DVector<f64>,
}

impl LearnedPrimitive {
    pub fn new(
        kind: MovementKind,
        weights: DMatrix<f64>,
        basis: BasisFamily,
        gains: Gains,
        alpha_s: Option<f64>,
        tau_demo: f64,
        goal_demo: DVector<f64>,
    ) -> Result<Self> {
        let expected_basis = match kind {
            MovementKind::Discrete => BasisKind::Gaussian,
            MovementKind::Rhythmic => BasisKind::VonMises,
        };
        if basis.kind() != expected_basis {
            return Err(Error::Schema(format!(
                "{kind} primitive needs a {expected_basis:?} basis"
            )));
        }
        if weights.ncols() != basis.len() {
            return Err(Error::DimensionMismatch {
                expected: basis.len(),
                actual: weights.ncols(),
            });
        }
        if weights.nrows() != goal_demo.len() {
            return Err(Error::DimensionMismatch {
                expected: goal_demo.len(),
                actual: weights.nrows(),
            });
        }
        match (kind, alpha_s) {
            (MovementKind::Discrete, Some(a)) if a > 0.0 => {}
            (MovementKind::Discrete, _) => {
                return Err(Error::param("alpha_s", "discrete primitives need a positive alpha_s"))
            }
            (MovementKind::Rhythmic, None) => {}
            (MovementKind::Rhythmic, Some(_)) => {
                return Err(Error::param("alpha_s", "rhythmic primitives do not take alpha_s"))
            }
        }
        if !(tau_demo > 0.0 && tau_demo.is_finite()) {
            return Err(Error::param("tau_demo", format!("must be positive, got {tau_demo}")));
        }
        Ok(LearnedPrimitive {
            kind,
            weights,
            basis,
            gains,
            alpha_s,
            tau_demo,
            goal_demo,
        })
    }

    pub fn dim(&self) -> usize {
        self.weights.nrows()
    }

    pub fn n_basis(&self) -> usize {
        self.basis.len()
    }

    /// Demonstration phase at (already time-scaled) time `t ≥ 0`.
    pub fn phase(&self, t: f64) -> f64 {
        match self.kind {
            MovementKind::Discrete => {
                let alpha_s = self.alpha_s.expect("validated at construction");
                (-alpha_s * t / self.tau_demo).exp()
            }
            MovementKind::Rhythmic => (t / self.tau_demo).rem_euclid(TAU),
        }
    }

    /// Forcing term `F(s) = W · basis(s)`.
    pub fn forcing(&self, s: f64) -> Result<DVector<f64>> {
        Ok(&self.weights * self.basis.eval(s)?)
    }

    /// Period of a rhythmic primitive (`2π τ_r`), or the duration of a discrete one.
    pub fn demo_duration(&self) -> f64 {
        match self.kind {
            MovementKind::Discrete => self.tau_demo,
            MovementKind::Rhythmic => TAU * self.tau_demo,
        }
    }
}

fn require_kind(demo: &Demonstration, expected: MovementKind) -> Result<()> {
    if demo.kind() != expected {
        return Err(Error::WrongKind {
            expected,
            actual: demo.kind(),
        });
    }
    Ok(())
}

fn target_columns(demo: &Demonstration, gains: Gains, tau: f64, goal: &DVector<f64>) -> DMatrix<f64> {
    let cols: Vec<DVector<f64>> = demo
        .positions()
        .iter()
        .zip(demo.velocities())
        .zip(demo.accelerations())
        .map(|((y, v), a)| a * (tau * tau) + v * (gains.alpha_z * tau) + (y - goal) * gains.stiffness())
        .collect();
    DMatrix::from_columns(&cols)
}

/// Column `i` of `A` is `σ(s(t_i))` with `s(t) = exp(−α_s t / τ)`, the same
/// vector the forcing term is evaluated on during rollout.
pub fn build_discrete_regressors(
    demo: &Demonstration,
    gains: Gains,
    alpha_s: f64,
    basis: &BasisFamily,
) -> Result<RegressorPair> {
    require_kind(demo, MovementKind::Discrete)?;
    if !(alpha_s > 0.0) {
        return Err(Error::param("alpha_s", format!("must be positive, got {alpha_s}")));
    }
    let tau = demo.duration();
    let mut cols = Vec::with_capacity(demo.len());
    for &t in demo.times() {
        let s = (-alpha_s * t / tau).exp();
        cols.push(crate::basis::eval_gaussian_vector(basis, s)?);
    }
    let a = DMatrix::from_columns(&cols);
    let b = target_columns(demo, gains, tau, demo.final_position());
    RegressorPair::new(a, b)
}

pub fn build_rhythmic_regressors(demo: &Demonstration, gains: Gains, basis: &BasisFamily) -> Result<RegressorPair> {
    require_kind(demo, MovementKind::Rhythmic)?;
    let tau = demo.duration() / TAU;
    let mut cols = Vec::with_capacity(demo.len());
    for &t in demo.times() {
        let s = (t / tau).rem_euclid(TAU);
        cols.push(crate::basis::eval_vonmises_vector(basis, s)?);
    }
    let a = DMatrix::from_columns(&cols);
    let b = target_columns(demo, gains, tau, &demo.mean_position());
    RegressorPair::new(a, b)
}

/// Squared ratio of extreme singular values of `A`, i.e. the 2-norm condition
/// number of `AAᵀ`.
pub fn gram_condition(a: &DMatrix<f64>) -> f64 {
    let sv = a.singular_values();
    let max = sv.max();
    let min = sv.min();
    if min == 0.0 {
        f64::INFINITY
    } else {
        (max / min).powi(2)
    }
}

/// Least-squares weights `W = BAᵀ(AAᵀ)⁻¹`.
///
/// Solved through a QR factorization of `Aᵀ`; when `AAᵀ` is too badly
/// conditioned (or rank deficient) the ridge system `(AAᵀ + δI)Wᵀ = ABᵀ` is
/// solved instead.
pub fn solve_weights(pair: &RegressorPair) -> Result<DMatrix<f64>> {
    let a = &pair.a;
    let b = &pair.b;
    if a.iter().all(|x| *x == 0.0) {
        return Err(Error::ZeroRegressors);
    }
    let n_basis = a.nrows();
    let samples = a.ncols();
    let condition = if samples >= n_basis {
        gram_condition(a)
    } else {
        f64::INFINITY
    };
    if condition <= RIDGE_CONDITION_THRESHOLD {
        let qr = a.transpose().qr();
        let q = qr.q();
        let r = qr.r();
        let rhs = q.transpose() * b.transpose();
        let wt = r
            .solve_upper_triangular(&rhs)
            .ok_or_else(|| Error::Singular("triangular factor is singular".into()))?;
        return Ok(wt.transpose());
    }
    log::info!("gram matrix condition {condition:e} exceeds {RIDGE_CONDITION_THRESHOLD:e}; using ridge solve");
    let gram = a * a.transpose();
    let delta = RIDGE_RELATIVE_DELTA * gram.trace() / n_basis as f64;
    let regularized = gram + DMatrix::identity(n_basis, n_basis) * delta;
    let rhs = a * b.transpose();
    let chol = regularized
        .cholesky()
        .ok_or_else(|| Error::Singular("regularized gram matrix is not positive definite".into()))?;
    Ok(chol.solve(&rhs).transpose())
}

/// Hyper-parameters for [`learn_primitive`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LearningParams {
    pub gains: Gains,
    pub alpha_s: f64,
    pub n_basis: usize,
}

impl Default for LearningParams {
    fn default() -> Self {
        LearningParams {
            gains: Gains {
                alpha_z: 100.0,
                beta_z: 25.0,
            },
            alpha_s: 1.0,
            n_basis: 50,
        }
    }
}

/// Learned primitive together with the fit diagnostics.
#[derive(Debug, Clone)]
pub struct LearningOutcome {
    pub primitive: LearnedPrimitive,
    pub relative_residual: f64,
}

pub fn learn_primitive(demo: &Demonstration, params: &LearningParams) -> Result<LearningOutcome> {
    let (basis, pair, alpha_s, tau, goal) = match demo.kind() {
        MovementKind::Discrete => {
            let basis = make_gaussian_basis(params.n_basis, params.alpha_s)?;
            let pair = build_discrete_regressors(demo, params.gains, params.alpha_s, &basis)?;
            (
                basis,
                pair,
                Some(params.alpha_s),
                demo.duration(),
                demo.final_position().clone(),
            )
        }
        MovementKind::Rhythmic => {
            let basis = make_vonmises_basis(params.n_basis)?;
            let pair = build_rhythmic_regressors(demo, params.gains, &basis)?;
            (basis, pair, None, demo.duration() / TAU, demo.mean_position())
        }
    };
    let weights = solve_weights(&pair)?;
    let relative_residual = pair.relative_residual(&weights);
    let primitive = LearnedPrimitive::new(demo.kind(), weights, basis, params.gains, alpha_s, tau, goal)?;
    Ok(LearningOutcome {
        primitive,
        relative_residual,
    })
}
