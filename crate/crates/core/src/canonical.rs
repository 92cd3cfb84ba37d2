//! Canonical systems: the exponentially decaying phase that clocks discrete
//! movement and the Andronov–Hopf oscillator that clocks rhythmic movement.

use std::f64::consts::TAU;

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::numeric::rk4_step;

/// `s(t) = s0 · exp(-(alpha_s / tau) · t)`.
pub fn discrete_phase_closed_form(t: f64, alpha_s: f64, tau: f64, s0: f64) -> Result<f64> {
    if !(tau > 0.0) {
        return Err(Error::param("tau_d", format!("must be positive, got {tau}")));
    }
    Ok(s0 * (-(alpha_s / tau) * t).exp())
}

/// State of `τ_d ṡ = -α_s s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscretePhase {
    pub s: f64,
    pub alpha_s: f64,
    pub tau: f64,
}

impl DiscretePhase {
    pub fn new(s: f64, alpha_s: f64, tau: f64) -> Result<Self> {
        if !(s >= 0.0) {
            return Err(Error::param("s_d", format!("must be nonnegative, got {s}")));
        }
        if !(alpha_s > 0.0) {
            return Err(Error::param("alpha_s", format!("must be positive, got {alpha_s}")));
        }
        if !(tau > 0.0) {
            return Err(Error::param("tau_d", format!("must be positive, got {tau}")));
        }
        Ok(DiscretePhase { s, alpha_s, tau })
    }

    pub fn step(&self, dt: f64) -> Result<DiscretePhase> {
        check_dt(dt)?;
        let rate = -self.alpha_s / self.tau;
        let x = rk4_step(|_, x| x * rate, 0.0, &DVector::from_element(1, self.s), dt);
        Ok(DiscretePhase {
            s: x[0].max(0.0),
            ..*self
        })
    }
}

pub fn step_discrete_phase(state: &DiscretePhase, dt: f64) -> Result<DiscretePhase> {
    state.step(dt)
}

/// Cartesian state of the Andronov–Hopf oscillator with limit-cycle radius
/// `gamma` and angular rate `1 / tau_r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HopfState {
    pub x1: f64,
    pub x2: f64,
    pub gamma: f64,
    pub tau_r: f64,
}

impl HopfState {
    pub fn new(x1: f64, x2: f64, gamma: f64, tau_r: f64) -> Result<Self> {
        if !(gamma > 0.0) {
            return Err(Error::param("gamma", format!("must be positive, got {gamma}")));
        }
        if !(tau_r > 0.0) {
            return Err(Error::param("tau_r", format!("must be positive, got {tau_r}")));
        }
        Ok(HopfState { x1, x2, gamma, tau_r })
    }

    /// Oscillator whose phase completes one cycle every `period` seconds.
    pub fn with_period(x1: f64, x2: f64, gamma: f64, period: f64) -> Result<Self> {
        Self::new(x1, x2, gamma, period / TAU)
    }

    pub fn radius(&self) -> f64 {
        self.x1.hypot(self.x2)
    }

    pub fn vector_field(&self, x1: f64, x2: f64) -> (f64, f64) {
        let radial = self.gamma * self.gamma - (x1 * x1 + x2 * x2);
        let w = 1.0 / self.tau_r;
        (radial * x1 - w * x2, w * x1 + radial * x2)
    }

    pub fn step(&self, dt: f64) -> Result<HopfState> {
        check_dt(dt)?;
        let x = DVector::from_column_slice(&[self.x1, self.x2]);
        let next = rk4_step(
            |_, x| {
                let (a, b) = self.vector_field(x[0], x[1]);
                DVector::from_column_slice(&[a, b])
            },
            0.0,
            &x,
            dt,
        );
        Ok(HopfState {
            x1: next[0],
            x2: next[1],
            ..*self
        })
    }

    pub fn phase(&self) -> Result<f64> {
        hopf_phase(self)
    }
}

pub fn step_hopf(state: &HopfState, dt: f64) -> Result<HopfState> {
    state.step(dt)
}

/// Angle of `(x1, x2)` in `[0, 2π)`.
pub fn hopf_phase(state: &HopfState) -> Result<f64> {
    if state.x1 == 0.0 && state.x2 == 0.0 {
        return Err(Error::PhaseUndefined);
    }
    Ok(wrap_phase(state.x2.atan2(state.x1)))
}

/// Maps any angle onto `[0, 2π)`.
pub fn wrap_phase(angle: f64) -> f64 {
    let w = angle.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs.
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// Polar form of the oscillator: `(ṙ, θ̇) = (r(γ² − r²), 1/τ_r)`.
pub fn hopf_polar_vector_field(r: f64, gamma: f64, tau_r: f64) -> Result<(f64, f64)> {
    if !(r > 0.0) {
        return Err(Error::param("r", format!("must be positive, got {r}")));
    }
    Ok((r * (gamma * gamma - r * r), 1.0 / tau_r))
}

/// Closed-form radius of the oscillator started at radius `r0`.
pub fn hopf_radius_closed_form(t: f64, r0: f64, gamma: f64) -> f64 {
    let g2 = gamma * gamma;
    let r02 = r0 * r0;
    let e = (2.0 * g2 * t).exp();
    (g2 * r02 * e / (g2 - r02 + r02 * e)).sqrt()
}

fn check_dt(dt: f64) -> Result<()> {
    if !(dt > 0.0) {
        return Err(Error::param("dt", format!("must be positive, got {dt}")));
    }
    Ok(())
}
