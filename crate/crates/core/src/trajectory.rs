use std::fmt;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Discrete (point-to-point) or rhythmic (periodic) movement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MovementKind {
    Discrete,
    Rhythmic,
}

impl fmt::Display for MovementKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MovementKind::Discrete => f.write_str("discrete"),
            MovementKind::Rhythmic => f.write_str("rhythmic"),
        }
    }
}

/// Relative closure tolerance for rhythmic demonstrations, as a fraction of
/// the largest coordinate range.
pub const CLOSURE_TOLERANCE: f64 = 1e-3;

/// A sampled trajectory `y(t)`, `ẏ(t)` and optionally `ÿ(t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    times: Vec<f64>,
    positions: Vec<DVector<f64>>,
    velocities: Vec<DVector<f64>>,
    accelerations: Option<Vec<DVector<f64>>>,
}

impl Trajectory {
    pub fn new(
        times: Vec<f64>,
        positions: Vec<DVector<f64>>,
        velocities: Vec<DVector<f64>>,
        accelerations: Option<Vec<DVector<f64>>>,
    ) -> Result<Self> {
        let len = times.len();
        if len < 2 {
            return Err(Error::InvalidDemonstration(format!(
                "a trajectory needs at least 2 samples, got {len}"
            )));
        }
        check_lengths(len, &positions, &velocities, accelerations.as_deref())?;
        check_times(&times)?;
        let dim = positions[0].len();
        check_dims(dim, &positions)?;
        check_dims(dim, &velocities)?;
        if let Some(acc) = &accelerations {
            check_dims(dim, acc)?;
        }
        Ok(Trajectory {
            times,
            positions,
            velocities,
            accelerations,
        })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.positions[0].len()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn positions(&self) -> &[DVector<f64>] {
        &self.positions
    }

    pub fn velocities(&self) -> &[DVector<f64>] {
        &self.velocities
    }

    pub fn accelerations(&self) -> Option<&[DVector<f64>]> {
        self.accelerations.as_deref()
    }

    pub fn last_position(&self) -> &DVector<f64> {
        self.positions.last().expect("trajectory has samples")
    }

    /// Largest per-coordinate extent `max - min` of the positions.
    pub fn coordinate_range(&self) -> f64 {
        coordinate_range(&self.positions)
    }

    /// Cubic Hermite interpolation of the position at `t` using the stored
    /// velocities. `t` is clamped to the sampled interval.
    pub fn position_at(&self, t: f64) -> DVector<f64> {
        let times = &self.times;
        if t <= times[0] {
            return self.positions[0].clone();
        }
        if t >= times[times.len() - 1] {
            return self.last_position().clone();
        }
        let k = times.partition_point(|&s| s <= t) - 1;
        let (t0, t1) = (times[k], times[k + 1]);
        let h = t1 - t0;
        let u = (t - t0) / h;
        let (u2, u3) = (u * u, u * u * u);
        let h00 = 2.0 * u3 - 3.0 * u2 + 1.0;
        let h10 = u3 - 2.0 * u2 + u;
        let h01 = -2.0 * u3 + 3.0 * u2;
        let h11 = u3 - u2;
        &self.positions[k] * h00
            + &self.velocities[k] * (h10 * h)
            + &self.positions[k + 1] * h01
            + &self.velocities[k + 1] * (h11 * h)
    }
}

/// Demonstrated trajectory used for imitation learning.
///
/// Construction normalizes the data so that the first sample sits at time 0
/// and at the origin; the removed offset is kept in [`Demonstration::origin`].
#[derive(Debug, Clone, PartialEq)]
pub struct Demonstration {
    kind: MovementKind,
    times: Vec<f64>,
    positions: Vec<DVector<f64>>,
    velocities: Vec<DVector<f64>>,
    accelerations: Vec<DVector<f64>>,
    origin: DVector<f64>,
    start_time: f64,
}

impl Demonstration {
    pub fn new(
        kind: MovementKind,
        times: Vec<f64>,
        positions: Vec<DVector<f64>>,
        velocities: Vec<DVector<f64>>,
        accelerations: Vec<DVector<f64>>,
    ) -> Result<Self> {
        let len = times.len();
        if len < 2 {
            return Err(Error::InvalidDemonstration(format!(
                "a demonstration needs at least 2 samples, got {len}"
            )));
        }
        check_lengths(len, &positions, &velocities, Some(&accelerations))?;
        check_times(&times)?;
        let dim = positions[0].len();
        if dim == 0 {
            return Err(Error::InvalidDemonstration("zero-dimensional positions".into()));
        }
        check_dims(dim, &positions)?;
        check_dims(dim, &velocities)?;
        check_dims(dim, &accelerations)?;
        let all_finite = positions
            .iter()
            .chain(&velocities)
            .chain(&accelerations)
            .all(crate::numeric::is_finite);
        if !all_finite {
            return Err(Error::InvalidDemonstration("non-finite sample".into()));
        }

        let origin = positions[0].clone();
        let start_time = times[0];
        let times: Vec<f64> = times.iter().map(|t| t - start_time).collect();
        let positions: Vec<DVector<f64>> = positions.iter().map(|p| p - &origin).collect();

        if kind == MovementKind::Rhythmic {
            let gap = (&positions[len - 1] - &positions[0]).norm();
            let tolerance = CLOSURE_TOLERANCE * coordinate_range(&positions);
            if gap > tolerance {
                return Err(Error::OpenCurve { gap, tolerance });
            }
        }

        Ok(Demonstration {
            kind,
            times,
            positions,
            velocities,
            accelerations,
            origin,
            start_time,
        })
    }

    /// Builds a demonstration from positions only, synthesizing velocities and
    /// accelerations by finite differences.
    pub fn from_positions(kind: MovementKind, times: Vec<f64>, positions: Vec<DVector<f64>>) -> Result<Self> {
        if times.len() != positions.len() {
            return Err(Error::InvalidDemonstration(format!(
                "{} timestamps but {} position samples",
                times.len(),
                positions.len()
            )));
        }
        if times.len() < 2 {
            return Err(Error::InvalidDemonstration(format!(
                "a demonstration needs at least 2 samples, got {}",
                times.len()
            )));
        }
        check_times(&times)?;
        let velocities = finite_difference(&times, &positions);
        let accelerations = finite_difference(&times, &velocities);
        Self::new(kind, times, positions, velocities, accelerations)
    }

    /// Like [`Demonstration::from_positions`] with measured velocities.
    pub fn from_positions_velocities(
        kind: MovementKind,
        times: Vec<f64>,
        positions: Vec<DVector<f64>>,
        velocities: Vec<DVector<f64>>,
    ) -> Result<Self> {
        if times.len() != velocities.len() || times.len() < 2 {
            return Err(Error::InvalidDemonstration(format!(
                "{} timestamps but {} velocity samples",
                times.len(),
                velocities.len()
            )));
        }
        check_times(&times)?;
        let accelerations = finite_difference(&times, &velocities);
        Self::new(kind, times, positions, velocities, accelerations)
    }

    pub fn kind(&self) -> MovementKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.positions[0].len()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn positions(&self) -> &[DVector<f64>] {
        &self.positions
    }

    pub fn velocities(&self) -> &[DVector<f64>] {
        &self.velocities
    }

    pub fn accelerations(&self) -> &[DVector<f64>] {
        &self.accelerations
    }

    /// Position offset removed during normalization.
    pub fn origin(&self) -> &DVector<f64> {
        &self.origin
    }

    /// Original timestamp of the first sample.
    pub fn start_time(&self) -> f64 {
        self.start_time
    }

    /// `t_P - t_1`: the duration of a discrete demo or the period of a
    /// rhythmic one.
    pub fn duration(&self) -> f64 {
        self.times[self.times.len() - 1]
    }

    pub fn coordinate_range(&self) -> f64 {
        coordinate_range(&self.positions)
    }

    /// Discrete goal: the final sample.
    pub fn final_position(&self) -> &DVector<f64> {
        &self.positions[self.positions.len() - 1]
    }

    /// Rhythmic goal: the mean of all samples.
    pub fn mean_position(&self) -> DVector<f64> {
        let sum = self.positions.iter().fold(DVector::zeros(self.dim()), |acc, p| acc + p);
        sum / self.positions.len() as f64
    }
}

/// Central differences on a possibly non-uniform grid, one-sided at the ends.
pub fn finite_difference(times: &[f64], values: &[DVector<f64>]) -> Vec<DVector<f64>> {
    let n = values.len();
    assert!(n >= 2 && times.len() == n);
    let mut out = Vec::with_capacity(n);
    out.push((&values[1] - &values[0]) / (times[1] - times[0]));
    for i in 1..n - 1 {
        let h0 = times[i] - times[i - 1];
        let h1 = times[i + 1] - times[i];
        // Second-order accurate three-point formula.
        let d = &values[i + 1] * (h0 / (h1 * (h0 + h1))) - &values[i - 1] * (h1 / (h0 * (h0 + h1)))
            + &values[i] * ((h1 - h0) / (h0 * h1));
        out.push(d);
    }
    out.push((&values[n - 1] - &values[n - 2]) / (times[n - 1] - times[n - 2]));
    out
}

pub(crate) fn coordinate_range(points: &[DVector<f64>]) -> f64 {
    let dim = points.first().map_or(0, |p| p.len());
    (0..dim)
        .map(|k| {
            let (lo, hi) = points.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
                (lo.min(p[k]), hi.max(p[k]))
            });
            hi - lo
        })
        .fold(0.0, f64::max)
}

fn check_lengths(
    len: usize,
    positions: &[DVector<f64>],
    velocities: &[DVector<f64>],
    accelerations: Option<&[DVector<f64>]>,
) -> Result<()> {
    let acc_len = accelerations.map_or(len, |a| a.len());
    if positions.len() != len || velocities.len() != len || acc_len != len {
        return Err(Error::InvalidDemonstration(format!(
            "column lengths differ: {len} times, {} positions, {} velocities, {acc_len} accelerations",
            positions.len(),
            velocities.len()
        )));
    }
    Ok(())
}

fn check_times(times: &[f64]) -> Result<()> {
    if let Some(bad) = times.iter().position(|t| !t.is_finite()) {
        return Err(Error::InvalidDemonstration(format!(
            "non-finite timestamp at row {bad}"
        )));
    }
    if let Some(i) = times.windows(2).position(|w| w[1] <= w[0]) {
        return Err(Error::InvalidDemonstration(format!(
            "timestamps must be strictly increasing (rows {} and {}: {} then {})",
            i,
            i + 1,
            times[i],
            times[i + 1]
        )));
    }
    Ok(())
}

fn check_dims(dim: usize, values: &[DVector<f64>]) -> Result<()> {
    match values.iter().find(|v| v.len() != dim) {
        Some(v) => Err(Error::DimensionMismatch {
            expected: dim,
            actual: v.len(),
        }),
        None => Ok(()),
    }
}
