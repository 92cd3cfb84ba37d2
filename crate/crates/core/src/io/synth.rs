//! Analytic demonstration shapes.

use std::f64::consts::TAU;
use std::fmt;

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::trajectory::{Demonstration, MovementKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Shape {
    /// Minimum-jerk reach to `amplitude · (1, 0.5)`.
    #[value(name = "minjerk")]
    MinJerk,
    Circle,
    Heart,
    /// Figure-eight (lemniscate of Gerono).
    Lemniscate,
}

impl Shape {
    pub fn kind(self) -> MovementKind {
        match self {
            Shape::MinJerk => MovementKind::Discrete,
            _ => MovementKind::Rhythmic,
        }
    }

    /// Position, first and second derivative with respect to the curve
    /// parameter (`s ∈ [0, 1]` for the reach, `u ∈ [0, 2π]` otherwise).
    fn eval(self, u: f64, amplitude: f64) -> [[f64; 2]; 3] {
        let a = amplitude;
        match self {
            Shape::MinJerk => {
                let (s, g) = (u, [a, 0.5 * a]);
                let p = 10.0 * s.powi(3) - 15.0 * s.powi(4) + 6.0 * s.powi(5);
                let dp = 30.0 * s * s - 60.0 * s.powi(3) + 30.0 * s.powi(4);
                let ddp = 60.0 * s - 180.0 * s * s + 120.0 * s.powi(3);
                [[g[0] * p, g[1] * p], [g[0] * dp, g[1] * dp], [g[0] * ddp, g[1] * ddp]]
            }
            Shape::Circle => {
                let (s, c) = u.sin_cos();
                [[a * c, a * s], [-a * s, a * c], [-a * c, -a * s]]
            }
            Shape::Heart => {
                let k = a / 16.0;
                let (s, c) = u.sin_cos();
                let x = 16.0 * s.powi(3);
                let dx = 48.0 * s * s * c;
                let ddx = 48.0 * (2.0 * s * c * c - s.powi(3));
                let y = 13.0 * c - 5.0 * (2.0 * u).cos() - 4.0 * (3.0 * u).cos() - (4.0 * u).cos();
                let dy = -13.0 * s + 10.0 * (2.0 * u).sin() + 12.0 * (3.0 * u).sin() + 4.0 * (4.0 * u).sin();
                let ddy = -13.0 * c + 20.0 * (2.0 * u).cos() + 36.0 * (3.0 * u).cos() + 16.0 * (4.0 * u).cos();
                [[k * x, k * y], [k * dx, k * dy], [k * ddx, k * ddy]]
            }
            Shape::Lemniscate => {
                let (s, c) = u.sin_cos();
                let (s2, c2) = (2.0 * u).sin_cos();
                [[a * s, 0.5 * a * s2], [a * c, a * c2], [-a * s, -2.0 * a * s2]]
            }
        }
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Shape::MinJerk => "minjerk",
            Shape::Circle => "circle",
            Shape::Heart => "heart",
            Shape::Lemniscate => "lemniscate",
        })
    }
}

impl std::str::FromStr for Shape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "minjerk" => Ok(Shape::MinJerk),
            "circle" => Ok(Shape::Circle),
            "heart" => Ok(Shape::Heart),
            "lemniscate" => Ok(Shape::Lemniscate),
            other => Err(Error::param("shape", format!("unknown shape `{other}`"))),
        }
    }
}

/// Samples `shape` at `n_samples` evenly spaced times over `[0, duration]`.
/// Rhythmic shapes complete exactly one period.
pub fn synth_demo(shape: Shape, n_samples: usize, duration: f64, amplitude: f64) -> Result<Demonstration> {
    if n_samples < 2 {
        return Err(Error::param("n_samples", format!("need at least 2, got {n_samples}")));
    }
    if !(duration > 0.0 && duration.is_finite()) {
        return Err(Error::param("duration", format!("must be positive, got {duration}")));
    }
    if !(amplitude > 0.0 && amplitude.is_finite()) {
        return Err(Error::param("amplitude", format!("must be positive, got {amplitude}")));
    }
    // d(parameter)/dt
    let rate = match shape.kind() {
        MovementKind::Discrete => 1.0 / duration,
        MovementKind::Rhythmic => TAU / duration,
    };
    let last = (n_samples - 1) as f64;
    let times: Vec<f64> = (0..n_samples).map(|i| i as f64 * duration / last).collect();
    let mut pos = Vec::with_capacity(n_samples);
    let mut vel = Vec::with_capacity(n_samples);
    let mut acc = Vec::with_capacity(n_samples);
    for i in 0..n_samples {
        let u = i as f64 / last * (rate * duration);
        let [p, d, dd] = shape.eval(u, amplitude);
        pos.push(DVector::from_column_slice(&p));
        vel.push(DVector::from_column_slice(&d) * rate);
        acc.push(DVector::from_column_slice(&dd) * (rate * rate));
    }
    Demonstration::new(shape.kind(), times, pos, vel, acc)
}
