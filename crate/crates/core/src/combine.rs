//! Parallel and sequential combination of primitive inputs.

use std::fmt;

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::learning::Gains;
use crate::trajectory::Trajectory;
use crate::transform::{rollout, InputSource, ModulatedPrimitive};

/// Fraction of a primitive's time constant used for the default crossfade.
pub const DEFAULT_CROSSFADE_FRACTION: f64 = 0.1;

/// Smoothstep on/off window: 0 before `t1`, ramps up on `[t1, t2)`, holds 1
/// on `[t2, t3)`, ramps down on `[t3, t4)`, 0 from `t4`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActivationSchedule {
    t1: f64,
    t2: f64,
    t3: f64,
    t4: f64,
}

impl ActivationSchedule {
    pub fn new(t1: f64, t2: f64, t3: f64, t4: f64) -> Result<Self> {
        if [t1, t2, t3, t4].iter().any(|t| t.is_nan()) {
            return Err(Error::InvalidSchedule("knots must not be NaN".into()));
        }
        if !(0.0 <= t1 && t1 <= t2 && t2 <= t3 && t3 <= t4) || !t1.is_finite() || !t2.is_finite() {
            return Err(Error::InvalidSchedule(format!(
                "knots must satisfy 0 <= t1 <= t2 <= t3 <= t4 with finite t1, t2; got ({t1}, {t2}, {t3}, {t4})"
            )));
        }
        Ok(ActivationSchedule { t1, t2, t3, t4 })
    }

    /// Ramps up on `[t1, t2)` and never switches off.
    pub fn stay_on(t1: f64, t2: f64) -> Result<Self> {
        Self::new(t1, t2, f64::INFINITY, f64::INFINITY)
    }

    pub fn knots(&self) -> [f64; 4] {
        [self.t1, self.t2, self.t3, self.t4]
    }

    pub fn value(&self, t: f64) -> f64 {
        activation(t, self)
    }
}

fn smoothstep(u: f64) -> f64 {
    u * u * (3.0 - 2.0 * u)
}

pub fn activation(t: f64, sched: &ActivationSchedule) -> f64 {
    let ActivationSchedule { t1, t2, t3, t4 } = *sched;
    if t < t1 {
        0.0
    } else if t < t2 {
        smoothstep((t - t1) / (t2 - t1))
    } else if t < t3 {
        1.0
    } else if t < t4 {
        1.0 - smoothstep((t - t3) / (t4 - t3))
    } else {
        0.0
    }
}

/// Recursive combination of modulated primitives.
#[derive(Debug, Clone)]
pub enum CombinationNode {
    Leaf(ModulatedPrimitive),
    Parallel {
        children: Vec<CombinationNode>,
        weights: Vec<f64>,
    },
    Sequential {
        children: Vec<CombinationNode>,
        offsets: Vec<f64>,
        schedules: Vec<ActivationSchedule>,
    },
}

impl CombinationNode {
    pub fn leaf(primitive: ModulatedPrimitive) -> Self {
        CombinationNode::Leaf(primitive)
    }

    pub fn parallel(children: Vec<CombinationNode>, weights: Vec<f64>) -> Self {
        CombinationNode::Parallel { children, weights }
    }

    pub fn sequential(children: Vec<CombinationNode>, offsets: Vec<f64>, schedules: Vec<ActivationSchedule>) -> Self {
        CombinationNode::Sequential {
            children,
            offsets,
            schedules,
        }
    }

    /// Sequence with crossfades of `0.1 τ` starting at each offset, where `τ`
    /// is the time constant of the child fading in. The first child is on
    /// from its offset and the last one never switches off.
    pub fn sequence(children: Vec<CombinationNode>, offsets: Vec<f64>) -> Result<Self> {
        let schedules = default_schedules(&children, &offsets)?;
        Ok(Self::sequential(children, offsets, schedules))
    }

    /// Leaves in depth-first order.
    pub fn leaves(&self) -> Vec<&ModulatedPrimitive> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a ModulatedPrimitive>) {
        match self {
            CombinationNode::Leaf(p) => out.push(p),
            CombinationNode::Parallel { children, .. } | CombinationNode::Sequential { children, .. } => {
                children.iter().for_each(|c| c.collect_leaves(out))
            }
        }
    }

    fn first_leaf(&self) -> Option<&ModulatedPrimitive> {
        match self {
            CombinationNode::Leaf(p) => Some(p),
            CombinationNode::Parallel { children, .. } | CombinationNode::Sequential { children, .. } => {
                children.iter().find_map(|c| c.first_leaf())
            }
        }
    }

    /// Transformation-system time constant used when rolling out the tree:
    /// the shared `τ⁽ᵈ⁾ / κ_t` when all leaves agree, otherwise the first
    /// leaf's `τ⁽ᵈ⁾`.
    pub fn system_tau(&self) -> Option<f64> {
        let leaves = self.leaves();
        let first = leaves.first()?;
        let effective = first.effective_tau();
        if leaves.iter().all(|l| l.effective_tau() == effective) {
            return Some(effective);
        }
        log::warn!(
            "leaves disagree on tau/kappa_t; using tau = {} and applying temporal scaling through the phase only",
            first.primitive.tau_demo
        );
        Some(first.primitive.tau_demo)
    }

    pub fn gains(&self) -> Option<Gains> {
        self.first_leaf().map(|l| l.primitive.gains)
    }

    /// Start point of a rollout: the anchor of the first leaf.
    pub fn default_start(&self) -> Option<DVector<f64>> {
        self.first_leaf().map(|l| l.modulation.anchor())
    }

    /// Effective weight of every leaf at time `t` (products of the weights on
    /// the path to it), in depth-first order.
    pub fn leaf_weights(&self, t: f64) -> Vec<f64> {
        let mut out = Vec::new();
        self.collect_weights(t, 1.0, &mut out);
        out
    }

    fn collect_weights(&self, t: f64, scale: f64, out: &mut Vec<f64>) {
        match self {
            CombinationNode::Leaf(_) => out.push(scale),
            CombinationNode::Parallel { children, weights } => {
                for (c, w) in children.iter().zip(weights) {
                    c.collect_weights(t, scale * w, out);
                }
            }
            CombinationNode::Sequential {
                children,
                offsets,
                schedules,
            } => {
                for ((c, off), s) in children.iter().zip(offsets).zip(schedules) {
                    c.collect_weights(t - off, scale * s.value(t), out);
                }
            }
        }
    }

    /// Validates and rolls out the tree.
    pub fn rollout(
        &self,
        duration: f64,
        dt: f64,
        start: Option<&DVector<f64>>,
        tau: Option<f64>,
    ) -> Result<Trajectory> {
        let violations = validate_combination(self);
        if !violations.is_empty() {
            return Err(Error::InvalidCombination(violations));
        }
        let tau = match tau {
            Some(t) => t,
            None => self
                .system_tau()
                .ok_or_else(|| Error::Schema("combination has no leaves".into()))?,
        };
        let gains = self
            .gains()
            .ok_or_else(|| Error::Schema("combination has no leaves".into()))?;
        let start = match start {
            Some(s) => s.clone(),
            None => self.default_start().expect("validated tree has leaves"),
        };
        rollout(self, tau, gains, duration, dt, &start)
    }
}

fn default_schedules(children: &[CombinationNode], offsets: &[f64]) -> Result<Vec<ActivationSchedule>> {
    if children.len() != offsets.len() {
        return Err(Error::Schema(format!(
            "{} children but {} offsets",
            children.len(),
            offsets.len()
        )));
    }
    if offsets.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidSchedule("offsets must be nondecreasing".into()));
    }
    let fade = |i: usize| -> Result<f64> {
        let tau = children[i]
            .first_leaf()
            .map(|l| l.effective_tau())
            .ok_or_else(|| Error::Schema("sequence child has no leaves".into()))?;
        Ok(DEFAULT_CROSSFADE_FRACTION * tau)
    };
    let last = children.len().saturating_sub(1);
    let mut out = Vec::with_capacity(children.len());
    for i in 0..children.len() {
        let (t1, t2) = if i == 0 {
            (offsets[0], offsets[0])
        } else {
            (offsets[i], offsets[i] + fade(i)?)
        };
        let (t3, t4) = if i == last {
            (f64::INFINITY, f64::INFINITY)
        } else {
            (offsets[i + 1], offsets[i + 1] + fade(i + 1)?)
        };
        out.push(ActivationSchedule::new(t1, t2, t3, t4)?);
    }
    Ok(out)
}

impl InputSource for CombinationNode {
    fn dim(&self) -> usize {
        self.first_leaf().map_or(0, |l| l.primitive.dim())
    }

    fn input(&self, t: f64) -> Result<DVector<f64>> {
        eval_combination(self, t)
    }
}

/// Combined input at time `t`. Children with zero weight are not evaluated.
pub fn eval_combination(node: &CombinationNode, t: f64) -> Result<DVector<f64>> {
    match node {
        CombinationNode::Leaf(p) => p.input(t),
        CombinationNode::Parallel { children, weights } => {
            blend(node.dim(), children.iter().zip(weights).map(|(c, w)| (c, *w, t)))
        }
        CombinationNode::Sequential {
            children,
            offsets,
            schedules,
        } => blend(
            node.dim(),
            children
                .iter()
                .zip(offsets)
                .zip(schedules)
                .map(|((c, off), s)| (c, s.value(t), t - off)),
        ),
    }
}

fn blend<'a>(dim: usize, terms: impl Iterator<Item = (&'a CombinationNode, f64, f64)>) -> Result<DVector<f64>> {
    let mut acc = DVector::zeros(dim);
    for (child, weight, local_t) in terms {
        if weight == 0.0 {
            continue;
        }
        let p = eval_combination(child, local_t)?;
        if p.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: p.len(),
            });
        }
        acc += p * weight;
    }
    Ok(acc)
}

#[derive(Debug, Clone, PartialEq)]
pub enum ViolationKind {
    Empty,
    DimensionMismatch {
        expected: usize,
        actual: usize,
    },
    MetricMismatch {
        expected: (f64, f64),
        actual: (f64, f64),
    },
    NegativeWeight {
        index: usize,
        weight: f64,
    },
    CountMismatch {
        what: &'static str,
        expected: usize,
        actual: usize,
    },
    NegativeOffset {
        index: usize,
        offset: f64,
    },
    BadSchedule {
        index: usize,
        reason: String,
    },
}

/// A rule broken by a combination tree, located by node path (`root`,
/// `root.1`, `root.1.0`, ...).
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub path: String,
    pub kind: ViolationKind,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: ", self.path)?;
        match &self.kind {
            ViolationKind::Empty => write!(f, "combination node has no children"),
            ViolationKind::DimensionMismatch { expected, actual } => {
                write!(f, "leaf dimension {actual} differs from {expected}")
            }
            ViolationKind::MetricMismatch { expected, actual } => write!(
                f,
                "metric mismatch: (alpha_z, beta_z) = ({}, {}) but the tree uses ({}, {})",
                actual.0, actual.1, expected.0, expected.1
            ),
            ViolationKind::NegativeWeight { index, weight } => {
                write!(f, "weight {index} must be nonnegative and finite, got {weight}")
            }
            ViolationKind::CountMismatch { what, expected, actual } => {
                write!(f, "expected {expected} {what}, got {actual}")
            }
            ViolationKind::NegativeOffset { index, offset } => {
                write!(f, "offset {index} must be nonnegative and finite, got {offset}")
            }
            ViolationKind::BadSchedule { index, reason } => write!(f, "schedule {index}: {reason}"),
        }
    }
}

/// Checks that all leaves share dimension and gains, weights are
/// nonnegative and schedules are well-formed. Returns every violation found.
pub fn validate_combination(node: &CombinationNode) -> Vec<Violation> {
    let mut out = Vec::new();
    let reference = node
        .first_leaf()
        .map(|l| (l.primitive.dim(), l.primitive.gains.alpha_z, l.primitive.gains.beta_z));
    validate_node(node, "root".to_string(), reference, &mut out);
    out
}

fn validate_node(node: &CombinationNode, path: String, reference: Option<(usize, f64, f64)>, out: &mut Vec<Violation>) {
    let mut push = |path: &str, kind| {
        out.push(Violation {
            path: path.to_string(),
            kind,
        })
    };
    match node {
        CombinationNode::Leaf(leaf) => {
            let Some((dim, az, bz)) = reference else { return };
            let prim = &leaf.primitive;
            if prim.dim() != dim {
                push(
                    &path,
                    ViolationKind::DimensionMismatch {
                        expected: dim,
                        actual: prim.dim(),
                    },
                );
            }
            if prim.gains.alpha_z != az || prim.gains.beta_z != bz {
                push(
                    &path,
                    ViolationKind::MetricMismatch {
                        expected: (az, bz),
                        actual: (prim.gains.alpha_z, prim.gains.beta_z),
                    },
                );
            }
        }
        CombinationNode::Parallel { children, weights } => {
            if children.is_empty() {
                push(&path, ViolationKind::Empty);
            }
            if weights.len() != children.len() {
                push(
                    &path,
                    ViolationKind::CountMismatch {
                        what: "weights",
                        expected: children.len(),
                        actual: weights.len(),
                    },
                );
            }
            for (index, &weight) in weights.iter().enumerate() {
                if !(weight >= 0.0 && weight.is_finite()) {
                    push(&path, ViolationKind::NegativeWeight { index, weight });
                }
            }
            let total: f64 = weights.iter().sum();
            if !children.is_empty() && (total - 1.0).abs() > 1e-12 {
                log::warn!("{path}: parallel weights sum to {total}, not 1; the combined rate is not a convex blend");
            }
            for (i, c) in children.iter().enumerate() {
                validate_node(c, format!("{path}.{i}"), reference, out);
            }
        }
        CombinationNode::Sequential {
            children,
            offsets,
            schedules,
        } => {
            if children.is_empty() {
                push(&path, ViolationKind::Empty);
            }
            if offsets.len() != children.len() {
                push(
                    &path,
                    ViolationKind::CountMismatch {
                        what: "offsets",
                        expected: children.len(),
                        actual: offsets.len(),
                    },
                );
            }
            if schedules.len() != children.len() {
                push(
                    &path,
                    ViolationKind::CountMismatch {
                        what: "schedules",
                        expected: children.len(),
                        actual: schedules.len(),
                    },
                );
            }
            for (index, &offset) in offsets.iter().enumerate() {
                if !(offset >= 0.0 && offset.is_finite()) {
                    push(&path, ViolationKind::NegativeOffset { index, offset });
                }
            }
            for (index, s) in schedules.iter().enumerate() {
                let [t1, t2, t3, t4] = s.knots();
                if let Err(e) = ActivationSchedule::new(t1, t2, t3, t4) {
                    push(
                        &path,
                        ViolationKind::BadSchedule {
                            index,
                            reason: e.to_string(),
                        },
                    );
                }
            }
            for (i, c) in children.iter().enumerate() {
                validate_node(c, format!("{path}.{i}"), reference, out);
            }
        }
    }
}
