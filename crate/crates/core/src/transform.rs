//! The transformation system, modulated primitive inputs and trajectory
//! rollout.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector, Rotation2, Rotation3, Unit, Vector3};

use crate::error::{Error, Result};
use crate::learning::{Gains, LearnedPrimitive};
use crate::numeric::is_finite;
use crate::trajectory::Trajectory;

/// Default integration step in seconds.
pub const DEFAULT_DT: f64 = 1e-3;

const ROTATION_TOLERANCE: f64 = 1e-12;

/// Spatial scale, temporal scale, rotation and offsets applied to a
/// primitive input.
#[derive(Debug, Clone, PartialEq)]
pub struct Modulation {
    pub kappa_s: f64,
    pub kappa_t: f64,
    pub rotation: DMatrix<f64>,
    pub y_off: DVector<f64>,
    pub t_off: f64,
    pub y0: DVector<f64>,
}

impl Modulation {
    pub fn identity(dim: usize) -> Self {
        Modulation {
            kappa_s: 1.0,
            kappa_t: 1.0,
            rotation: DMatrix::identity(dim, dim),
            y_off: DVector::zeros(dim),
            t_off: 0.0,
            y0: DVector::zeros(dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.y0.len()
    }

    pub fn with_spatial_scale(mut self, kappa_s: f64) -> Self {
        self.kappa_s = kappa_s;
        self
    }

    pub fn with_temporal_scale(mut self, kappa_t: f64) -> Self {
        self.kappa_t = kappa_t;
        self
    }

    pub fn with_rotation(mut self, rotation: DMatrix<f64>) -> Self {
        self.rotation = rotation;
        self
    }

    pub fn with_offset(mut self, y_off: DVector<f64>) -> Self {
        self.y_off = y_off;
        self
    }

    pub fn with_time_offset(mut self, t_off: f64) -> Self {
        self.t_off = t_off;
        self
    }

    pub fn with_start(mut self, y0: DVector<f64>) -> Self {
        self.y0 = y0;
        self
    }

    /// Point the modulated rollout starts from: `y0 + y_off`.
    pub fn anchor(&self) -> DVector<f64> {
        &self.y0 + &self.y_off
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        if !(self.kappa_s > 0.0 && self.kappa_s.is_finite()) {
            return Err(Error::param(
                "kappa_s",
                format!("must be positive, got {}", self.kappa_s),
            ));
        }
        if !(self.kappa_t > 0.0 && self.kappa_t.is_finite()) {
            return Err(Error::param(
                "kappa_t",
                format!("must be positive, got {}", self.kappa_t),
            ));
        }
        if !(self.t_off >= 0.0 && self.t_off.is_finite()) {
            return Err(Error::param(
                "t_off",
                format!("must be nonnegative, got {}", self.t_off),
            ));
        }
        for len in [
            self.rotation.nrows(),
            self.rotation.ncols(),
            self.y_off.len(),
            self.y0.len(),
        ] {
            if len != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: len,
                });
            }
        }
        check_rotation(&self.rotation)
    }
}

/// Planar rotation by `degrees` counterclockwise.
pub fn rotation_2d(degrees: f64) -> DMatrix<f64> {
    let r = Rotation2::new(degrees.to_radians());
    DMatrix::from_column_slice(2, 2, r.matrix().as_slice())
}

/// Rotation by `degrees` about `axis` (right-hand rule).
pub fn rotation_3d(axis: [f64; 3], degrees: f64) -> Result<DMatrix<f64>> {
    let axis = Vector3::from(axis);
    if !(axis.norm() > 0.0) {
        return Err(Error::param("axis", "rotation axis must be nonzero"));
    }
    let r = Rotation3::from_axis_angle(&Unit::new_normalize(axis), degrees.to_radians());
    Ok(DMatrix::from_column_slice(3, 3, r.matrix().as_slice()))
}

fn check_rotation(r: &DMatrix<f64>) -> Result<()> {
    let n = r.nrows();
    let orth = (r.transpose() * r - DMatrix::<f64>::identity(n, n)).amax();
    if orth > ROTATION_TOLERANCE {
        return Err(Error::param(
            "rotation",
            format!("not orthogonal (|RᵀR − I| = {orth:e})"),
        ));
    }
    let det = r.determinant();
    if (det - 1.0).abs() > ROTATION_TOLERANCE {
        return Err(Error::param("rotation", format!("determinant must be +1, got {det}")));
    }
    Ok(())
}

/// Anything that produces a time-varying input `p(t)` for the transformation
/// system.
pub trait InputSource {
    fn dim(&self) -> usize;
    fn input(&self, t: f64) -> Result<DVector<f64>>;
}

/// A learned primitive together with the modulation applied to it.
#[derive(Debug, Clone)]
pub struct ModulatedPrimitive {
    pub primitive: Arc<LearnedPrimitive>,
    pub modulation: Modulation,
}

impl ModulatedPrimitive {
    pub fn new(primitive: Arc<LearnedPrimitive>, modulation: Modulation) -> Result<Self> {
        modulation.validate(primitive.dim())?;
        Ok(ModulatedPrimitive { primitive, modulation })
    }

    /// Time constant that reproduces the demonstration at temporal scale
    /// `κ_t`: `τ⁽ᵈ⁾ / κ_t`.
    pub fn effective_tau(&self) -> f64 {
        self.primitive.tau_demo / self.modulation.kappa_t
    }
}

impl InputSource for ModulatedPrimitive {
    fn dim(&self) -> usize {
        self.primitive.dim()
    }

    fn input(&self, t: f64) -> Result<DVector<f64>> {
        primitive_input(&self.primitive, &self.modulation, t)
    }
}

/// Modulated primitive input
/// `κ_s R (F(s(κ_t (t − t_off))) + α_z β_z g⁽ᵈ⁾) + α_z β_z (y0 + y_off)`.
///
/// Before `t_off` the phase argument is held at zero.
pub fn primitive_input(prim: &LearnedPrimitive, modulation: &Modulation, t: f64) -> Result<DVector<f64>> {
    let dim = prim.dim();
    if modulation.dim() != dim || modulation.rotation.nrows() != dim || modulation.y_off.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            actual: modulation.dim(),
        });
    }
    let k = prim.gains.stiffness();
    let local = (modulation.kappa_t * (t - modulation.t_off)).max(0.0);
    let shaped = prim.forcing(prim.phase(local))? + &prim.goal_demo * k;
    Ok(&modulation.rotation * shaped * modulation.kappa_s + modulation.anchor() * k)
}

/// State of `τẏ = z`, `τż = α_z(β_z(g − y) − z) + p`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformState {
    pub y: DVector<f64>,
    pub z: DVector<f64>,
    pub tau: f64,
    pub gains: Gains,
    pub goal: DVector<f64>,
}

impl TransformState {
    pub fn new(y: DVector<f64>, z: DVector<f64>, tau: f64, gains: Gains, goal: DVector<f64>) -> Result<Self> {
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::param("tau", format!("must be positive, got {tau}")));
        }
        for v in [&z, &goal] {
            if v.len() != y.len() {
                return Err(Error::DimensionMismatch {
                    expected: y.len(),
                    actual: v.len(),
                });
            }
        }
        Ok(TransformState { y, z, tau, gains, goal })
    }

    /// Starts at rest at `y0` with attractor `g = 0`, the configuration
    /// primitive inputs are designed for.
    pub fn at_rest(y0: DVector<f64>, tau: f64, gains: Gains) -> Result<Self> {
        let n = y0.len();
        Self::new(y0, DVector::zeros(n), tau, gains, DVector::zeros(n))
    }

    fn derivative(&self, y: &DVector<f64>, z: &DVector<f64>, p: &DVector<f64>) -> (DVector<f64>, DVector<f64>) {
        let inv_tau = 1.0 / self.tau;
        let ydot = z * inv_tau;
        let zdot = (((&self.goal - y) * self.gains.beta_z - z) * self.gains.alpha_z + p) * inv_tau;
        (ydot, zdot)
    }

    /// `ÿ` at the current state for input `p`.
    pub fn acceleration(&self, p: &DVector<f64>) -> DVector<f64> {
        self.derivative(&self.y, &self.z, p).1 / self.tau
    }

    pub fn velocity(&self) -> DVector<f64> {
        &self.z / self.tau
    }

    /// One RK4 step with the input sampled at the start, midpoint and end of
    /// the step.
    pub fn step_with_inputs(
        &self,
        p0: &DVector<f64>,
        p_mid: &DVector<f64>,
        p1: &DVector<f64>,
        dt: f64,
    ) -> TransformState {
        let half = 0.5 * dt;
        let (ky1, kz1) = self.derivative(&self.y, &self.z, p0);
        let (ky2, kz2) = self.derivative(&(&self.y + &ky1 * half), &(&self.z + &kz1 * half), p_mid);
        let (ky3, kz3) = self.derivative(&(&self.y + &ky2 * half), &(&self.z + &kz2 * half), p_mid);
        let (ky4, kz4) = self.derivative(&(&self.y + &ky3 * dt), &(&self.z + &kz3 * dt), p1);
        let w = dt / 6.0;
        TransformState {
            y: &self.y + (ky1 + ky2 * 2.0 + ky3 * 2.0 + ky4) * w,
            z: &self.z + (kz1 + kz2 * 2.0 + kz3 * 2.0 + kz4) * w,
            ..self.clone()
        }
    }

    /// One RK4 step with input `p` held constant.
    pub fn step(&self, p: &DVector<f64>, dt: f64) -> Result<TransformState> {
        if !(dt > 0.0) {
            return Err(Error::param("dt", format!("must be positive, got {dt}")));
        }
        if p.len() != self.y.len() {
            return Err(Error::DimensionMismatch {
                expected: self.y.len(),
                actual: p.len(),
            });
        }
        Ok(self.step_with_inputs(p, p, p, dt))
    }
}

pub fn step_transformation(state: &TransformState, p: &DVector<f64>, dt: f64) -> Result<TransformState> {
    state.step(p, dt)
}

/// Integrates the transformation system (attractor at the origin) driven by
/// `source`, starting at rest at `y0`, and records every step.
pub fn rollout(
    source: &dyn InputSource,
    tau: f64,
    gains: Gains,
    duration: f64,
    dt: f64,
    y0: &DVector<f64>,
) -> Result<Trajectory> {
    if !(dt > 0.0) {
        return Err(Error::param("dt", format!("must be positive, got {dt}")));
    }
    if !(duration > dt && duration.is_finite()) {
        return Err(Error::param(
            "duration",
            format!("must exceed dt = {dt}, got {duration}"),
        ));
    }
    let n = source.dim();
    if y0.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: y0.len(),
        });
    }
    let steps = (duration / dt).round() as usize;
    let mut state = TransformState::at_rest(y0.clone(), tau, gains)?;
    let mut times = Vec::with_capacity(steps + 1);
    let mut positions = Vec::with_capacity(steps + 1);
    let mut velocities = Vec::with_capacity(steps + 1);
    let mut accelerations = Vec::with_capacity(steps + 1);

    let mut p = source.input(0.0)?;
    if p.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: p.len(),
        });
    }
    for k in 0..=steps {
        let t = k as f64 * dt;
        times.push(t);
        positions.push(state.y.clone());
        velocities.push(state.velocity());
        accelerations.push(state.acceleration(&p));
        if k == steps {
            break;
        }
        let p_mid = source.input(t + 0.5 * dt)?;
        let p_end = source.input((k + 1) as f64 * dt)?;
        state = state.step_with_inputs(&p, &p_mid, &p_end, dt);
        if !is_finite(&state.y) || !is_finite(&state.z) {
            return Err(Error::IntegrationDiverged {
                time: (k + 1) as f64 * dt,
            });
        }
        p = p_end;
    }
    Trajectory::new(times, positions, velocities, Some(accelerations))
}

/// Rolls out a single modulated primitive with `τ = τ⁽ᵈ⁾ / κ_t`, starting at
/// `y0 + y_off`.
pub fn rollout_primitive(source: &ModulatedPrimitive, duration: f64, dt: f64) -> Result<Trajectory> {
    rollout(
        source,
        source.effective_tau(),
        source.primitive.gains,
        duration,
        dt,
        &source.modulation.anchor(),
    )
}
