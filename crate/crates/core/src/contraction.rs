//! Numerical contraction certificates.
//!
//! A certificate samples a region, evaluates the left-hand side of the
//! contraction inequality `Ṁ + JᵀM + MJ + 2λM ⪯ 0` at each sample and keeps
//! the worst (largest) eigenvalue.

use std::f64::consts::TAU;
use std::fmt;

use nalgebra::{DMatrix, DVector};

use crate::combine::CombinationNode;
use crate::error::{Error, Result};
use crate::numeric::{max_eigenvalue_sym, min_eigenvalue_sym, symmetric_part};

/// A certificate passes when its worst residual is at most this value.
pub const RESIDUAL_TOLERANCE: f64 = 1e-9;
/// Tolerance on the Hopf orthogonality identity.
pub const ORTHOGONALITY_TOLERANCE: f64 = 1e-10;
/// Central-difference step for metric time derivatives.
pub const METRIC_FD_STEP: f64 = 1e-6;

/// Supplies the Jacobian (and, for state-dependent metrics, the vector field)
/// of `ẋ = f(x, t)`.
pub trait JacobianSampler {
    fn dim(&self) -> usize;
    fn jacobian(&self, x: &DVector<f64>, t: f64) -> DMatrix<f64>;
    fn vector_field(&self, _x: &DVector<f64>, _t: f64) -> Option<DVector<f64>> {
        None
    }
}

/// Linear time-invariant system `ẋ = Jx`.
#[derive(Debug, Clone)]
pub struct LinearSystem(pub DMatrix<f64>);

impl JacobianSampler for LinearSystem {
    fn dim(&self) -> usize {
        self.0.nrows()
    }

    fn jacobian(&self, _x: &DVector<f64>, _t: f64) -> DMatrix<f64> {
        self.0.clone()
    }

    fn vector_field(&self, x: &DVector<f64>, _t: f64) -> Option<DVector<f64>> {
        Some(&self.0 * x)
    }
}

/// Contraction metric: constant, or a function of state and time.
pub enum Metric<'a> {
    Constant(DMatrix<f64>),
    StateDependent {
        label: String,
        eval: &'a dyn Fn(&DVector<f64>, f64) -> DMatrix<f64>,
    },
}

impl Metric<'_> {
    fn label(&self) -> String {
        match self {
            Metric::Constant(m) => format!("constant {}x{}", m.nrows(), m.ncols()),
            Metric::StateDependent { label, .. } => label.clone(),
        }
    }
}

/// Axis-aligned box sampled on a tensor grid, optionally at several times.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleRegion {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub counts: Vec<usize>,
    pub times: Vec<f64>,
}

impl SampleRegion {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>, counts: Vec<usize>, times: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() || lower.len() != counts.len() {
            return Err(Error::Schema("region bounds and counts must have equal length".into()));
        }
        if counts.contains(&0) || times.is_empty() {
            return Err(Error::param("region", "grid must be nonempty"));
        }
        if lower.iter().zip(&upper).any(|(l, u)| !(l <= u)) {
            return Err(Error::param("region", "lower bounds must not exceed upper bounds"));
        }
        Ok(SampleRegion {
            lower,
            upper,
            counts,
            times,
        })
    }

    /// A single point at `t = 0`.
    pub fn point(x: &[f64]) -> Self {
        SampleRegion {
            lower: x.to_vec(),
            upper: x.to_vec(),
            counts: vec![1; x.len()],
            times: vec![0.0],
        }
    }

    pub fn len(&self) -> usize {
        self.counts.iter().product::<usize>() * self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn coordinate(&self, axis: usize, k: usize) -> f64 {
        let n = self.counts[axis];
        if n == 1 {
            return self.lower[axis];
        }
        self.lower[axis] + (self.upper[axis] - self.lower[axis]) * k as f64 / (n - 1) as f64
    }

    /// All `(state, time)` samples.
    pub fn samples(&self) -> impl Iterator<Item = (DVector<f64>, f64)> + '_ {
        let states: usize = self.counts.iter().product();
        self.times.iter().flat_map(move |&t| {
            (0..states).map(move |mut flat| {
                let x = DVector::from_iterator(
                    self.counts.len(),
                    (0..self.counts.len()).map(|axis| {
                        let k = flat % self.counts[axis];
                        flat /= self.counts[axis];
                        self.coordinate(axis, k)
                    }),
                );
                (x, t)
            })
        })
    }
}

impl fmt::Display for SampleRegion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let axes: Vec<String> = (0..self.counts.len())
            .map(|i| format!("[{}, {}]x{}", self.lower[i], self.upper[i], self.counts[i]))
            .collect();
        write!(f, "{} at {} time(s)", axes.join(" * "), self.times.len())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContractionCertificate {
    pub region: String,
    pub metric: String,
    pub rate: f64,
    pub worst_residual: f64,
    pub worst_sample: Vec<f64>,
    pub samples: usize,
    pub pass: bool,
}

/// Block Jacobian `[[0, I/τ], [−α_z β_z I/τ, −α_z I/τ]]` of the transformation
/// system in `(y, z)` coordinates.
pub fn transformation_jacobian(tau: f64, alpha_z: f64, beta_z: f64, n: usize) -> Result<DMatrix<f64>> {
    for (name, v) in [("tau", tau), ("alpha_z", alpha_z), ("beta_z", beta_z)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::param(name, format!("must be positive, got {v}")));
        }
    }
    if n == 0 {
        return Err(Error::param("n", "dimension must be positive"));
    }
    let mut j = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        j[(i, n + i)] = 1.0 / tau;
        j[(n + i, i)] = -alpha_z * beta_z / tau;
        j[(n + i, n + i)] = -alpha_z / tau;
    }
    Ok(j)
}

/// Eigenvalues of a general real matrix as `(re, im)` pairs.
pub fn eigenvalues(j: &DMatrix<f64>) -> Vec<(f64, f64)> {
    j.complex_eigenvalues().iter().map(|c| (c.re, c.im)).collect()
}

/// Eigenvalues of a matrix of the form `B ⊗ I_n` with `B` 2×2, such as the
/// transformation Jacobian. Each root of `B`'s characteristic polynomial is
/// returned with multiplicity `n`.
///
/// Repeated roots are exact here, whereas a general eigensolver splits a
/// defective double root by roughly the square root of machine precision.
pub fn block_eigenvalues(j: &DMatrix<f64>) -> Result<Vec<(f64, f64)>> {
    let size = j.nrows();
    if size != j.ncols() || !size.is_multiple_of(2) || size == 0 {
        return Err(Error::NotSquare {
            rows: size,
            cols: j.ncols(),
        });
    }
    let n = size / 2;
    let block = |bi: usize, bj: usize| j.view((bi * n, bj * n), (n, n)).into_owned();
    let mut b = [[0.0; 2]; 2];
    for (bi, row) in b.iter_mut().enumerate() {
        for (bj, entry) in row.iter_mut().enumerate() {
            let m = block(bi, bj);
            *entry = m[(0, 0)];
            if (m - DMatrix::<f64>::identity(n, n) * *entry).amax() != 0.0 {
                return Err(Error::Schema(format!(
                    "block ({bi}, {bj}) is not a multiple of the identity"
                )));
            }
        }
    }
    let half_trace = 0.5 * (b[0][0] + b[1][1]);
    let det = b[0][0] * b[1][1] - b[0][1] * b[1][0];
    let disc = half_trace * half_trace - det;
    let roots = if disc >= 0.0 {
        let r = disc.sqrt();
        [(half_trace - r, 0.0), (half_trace + r, 0.0)]
    } else {
        let r = (-disc).sqrt();
        [(half_trace, -r), (half_trace, r)]
    };
    Ok(roots.iter().flat_map(|&root| std::iter::repeat_n(root, n)).collect())
}

/// Solves `JᵀM + MJ = −I` and returns `(M, λ)` with `λ = 1 / (2 λ_max(M))`,
/// which satisfies `JᵀM + MJ ⪯ −2λM`.
pub fn solve_metric_and_rate(j: &DMatrix<f64>) -> Result<(DMatrix<f64>, f64)> {
    let n = j.nrows();
    if n != j.ncols() {
        return Err(Error::NotSquare {
            rows: n,
            cols: j.ncols(),
        });
    }
    let max_real = eigenvalues(j).iter().map(|e| e.0).fold(f64::NEG_INFINITY, f64::max);
    if !(max_real < 0.0) {
        return Err(Error::NotHurwitz { max_real });
    }
    // vec(JᵀM + MJ) = (I ⊗ Jᵀ + Jᵀ ⊗ I) vec(M) for column-major vec.
    let id = DMatrix::<f64>::identity(n, n);
    let jt = j.transpose();
    let kron = id.kronecker(&jt) + jt.kronecker(&id);
    let rhs = DVector::from_iterator(n * n, (-id.clone()).iter().copied());
    let sol = kron
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Singular("Lyapunov operator is singular".into()))?;
    let m = symmetric_part(&DMatrix::from_column_slice(n, n, sol.as_slice()))?;
    let top = max_eigenvalue_sym(&m)?;
    if !(min_eigenvalue_sym(&m)? > 0.0) {
        return Err(Error::Singular("Lyapunov solution is not positive definite".into()));
    }
    Ok((m, 1.0 / (2.0 * top)))
}

/// Evaluates the contraction inequality over `region` and reports the
/// largest eigenvalue of its left-hand side.
pub fn check_contraction(
    sampler: &dyn JacobianSampler,
    metric: &Metric<'_>,
    rate: f64,
    region: &SampleRegion,
) -> Result<ContractionCertificate> {
    let n = sampler.dim();
    if region.lower.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: region.lower.len(),
        });
    }
    let mut worst = f64::NEG_INFINITY;
    let mut worst_sample = Vec::new();
    let mut samples = 0;
    for (x, t) in region.samples() {
        let jac = sampler.jacobian(&x, t);
        let (m, mdot) = match metric {
            Metric::Constant(m) => (m.clone(), DMatrix::zeros(n, n)),
            Metric::StateDependent { eval, .. } => {
                let f = sampler
                    .vector_field(&x, t)
                    .ok_or_else(|| Error::param("sampler", "a state-dependent metric needs the vector field"))?;
                let h = METRIC_FD_STEP;
                let ahead = eval(&(&x + &f * h), t + h);
                let behind = eval(&(&x - &f * h), t - h);
                (eval(&x, t), (ahead - behind) / (2.0 * h))
            }
        };
        let lhs = &mdot + jac.transpose() * &m + &m * &jac + &m * (2.0 * rate);
        let residual = max_eigenvalue_sym(&symmetric_part(&lhs)?)?;
        if residual > worst {
            worst = residual;
            worst_sample = x.iter().copied().chain(std::iter::once(t)).collect();
        }
        samples += 1;
    }
    Ok(ContractionCertificate {
        region: region.to_string(),
        metric: metric.label(),
        rate,
        worst_residual: worst,
        worst_sample,
        samples,
        pass: worst <= RESIDUAL_TOLERANCE,
    })
}

/// How `m_θθ` is chosen in the transverse Hopf metric.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThetaThetaRule {
    /// `τ_r²(γ² − r²)² + 1`, which makes `det M_T = 1/r²`.
    SquaredGap,
    /// `τ_r²(γ² − r²) + margin`.
    LinearGap {
        margin: f64,
    },
    Constant(f64),
}

impl ThetaThetaRule {
    fn eval(&self, r: f64, gamma: f64, tau_r: f64) -> f64 {
        let gap = gamma * gamma - r * r;
        match *self {
            ThetaThetaRule::SquaredGap => tau_r * tau_r * gap * gap + 1.0,
            ThetaThetaRule::LinearGap { margin } => tau_r * tau_r * gap + margin,
            ThetaThetaRule::Constant(c) => c,
        }
    }
}

/// Settings for [`check_transverse_hopf`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HopfRegion {
    pub epsilon: f64,
    pub r_max: f64,
    pub r_count: usize,
    pub theta_count: usize,
}

impl HopfRegion {
    /// Default 64×64 grid over `r ∈ [ε, γ + 0.5]`.
    pub fn new(epsilon: f64, gamma: f64) -> Self {
        HopfRegion {
            epsilon,
            r_max: gamma + 0.5,
            r_count: 64,
            theta_count: 64,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransverseCertificate {
    pub certificate: ContractionCertificate,
    pub gamma: f64,
    pub tau_r: f64,
    pub epsilon: f64,
    pub max_orthogonality_residual: f64,
    pub min_metric_eigenvalue: f64,
    /// The rate `4ε²` asserted for this oscillator in the literature.
    pub claimed_rate: f64,
}

/// Transverse contraction metric of the polar Hopf oscillator at `(r, θ)`.
pub fn hopf_transverse_metric(r: f64, _theta: f64, gamma: f64, tau_r: f64, rule: ThetaThetaRule) -> DMatrix<f64> {
    let off = -tau_r * (gamma * gamma - r * r) / r;
    DMatrix::from_row_slice(2, 2, &[1.0 / (r * r), off, off, rule.eval(r, gamma, tau_r)])
}

/// Certifies transverse contraction of the Hopf oscillator on
/// `{r ≥ ε, θ ∈ [0, 2π)}` for the transverse direction `δx = [1, 0]ᵀ`.
///
/// The scalar residual is affine in `λ_T`, so the largest certified rate is
/// found per sample in closed form and minimized over the grid.
pub fn check_transverse_hopf(
    gamma: f64,
    tau_r: f64,
    region: &HopfRegion,
    rule: ThetaThetaRule,
) -> Result<TransverseCertificate> {
    for (name, v) in [("gamma", gamma), ("tau_r", tau_r), ("epsilon", region.epsilon)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::param(name, format!("must be positive, got {v}")));
        }
    }
    if !(region.r_max >= region.epsilon) || region.r_count == 0 || region.theta_count == 0 {
        return Err(Error::param("region", "need r_max >= epsilon and a nonempty grid"));
    }
    let metric = |r: f64, theta: f64| hopf_transverse_metric(r, theta, gamma, tau_r, rule);
    let field = |r: f64| (r * (gamma * gamma - r * r), 1.0 / tau_r);
    let dx = DVector::from_column_slice(&[1.0, 0.0]);
    let h = METRIC_FD_STEP;

    let mut points = Vec::with_capacity(region.r_count * region.theta_count);
    for i in 0..region.r_count {
        let r = if region.r_count == 1 {
            region.epsilon
        } else {
            region.epsilon + (region.r_max - region.epsilon) * i as f64 / (region.r_count - 1) as f64
        };
        for k in 0..region.theta_count {
            points.push((r, TAU * k as f64 / region.theta_count as f64));
        }
    }

    let mut max_orth: f64 = 0.0;
    let mut min_eig = f64::INFINITY;
    // Per-sample (residual at λ = 0, δxᵀMδx).
    let mut terms = Vec::with_capacity(points.len());
    for &(r, theta) in &points {
        let m = metric(r, theta);
        let lowest = min_eigenvalue_sym(&m)?;
        if !(lowest > 0.0) {
            return Err(Error::MetricNotPositiveDefinite {
                r,
                theta,
                min_eigenvalue: lowest,
            });
        }
        min_eig = min_eig.min(lowest);
        let (rdot, thetadot) = field(r);
        let f = DVector::from_column_slice(&[rdot, thetadot]);
        max_orth = max_orth.max((dx.transpose() * &m * &f)[0].abs());

        let jac = DMatrix::from_row_slice(2, 2, &[gamma * gamma - 3.0 * r * r, 0.0, 0.0, 0.0]);
        let mdot =
            (metric(r + h * rdot, theta + h * thetadot) - metric(r - h * rdot, theta - h * thetadot)) / (2.0 * h);
        let base = (dx.transpose() * (mdot + jac.transpose() * &m + &m * &jac) * &dx)[0];
        let weight = (dx.transpose() * &m * &dx)[0];
        terms.push((r, theta, base, weight));
    }

    // Largest λ with base + 2λ·weight ≤ tolerance/2 at every sample; the
    // other half absorbs rounding when the residual is re-evaluated below.
    let rate = terms
        .iter()
        .map(|&(_, _, base, weight)| (0.5 * RESIDUAL_TOLERANCE - base) / (2.0 * weight))
        .fold(f64::INFINITY, f64::min)
        .max(0.0);
    let mut worst = f64::NEG_INFINITY;
    let mut worst_sample = Vec::new();
    for &(r, theta, base, weight) in &terms {
        let residual = base + 2.0 * rate * weight;
        if residual > worst {
            worst = residual;
            worst_sample = vec![r, theta];
        }
    }
    let certificate = ContractionCertificate {
        region: format!(
            "r in [{}, {}] x{}, theta in [0, 2pi) x{}",
            region.epsilon, region.r_max, region.r_count, region.theta_count
        ),
        metric: format!("transverse Hopf metric, m_theta_theta = {rule:?}"),
        rate,
        worst_residual: worst,
        worst_sample,
        samples: terms.len(),
        pass: worst <= RESIDUAL_TOLERANCE && rate > 0.0 && max_orth <= ORTHOGONALITY_TOLERANCE,
    };
    Ok(TransverseCertificate {
        certificate,
        gamma,
        tau_r,
        epsilon: region.epsilon,
        max_orthogonality_residual: max_orth,
        min_metric_eigenvalue: min_eig,
        claimed_rate: 4.0 * region.epsilon * region.epsilon,
    })
}

/// Rate of a parallel combination, `Σ α_i λ_i`.
pub fn combined_rate_parallel(rates: &[f64], weights: &[f64]) -> Result<f64> {
    if rates.len() != weights.len() {
        return Err(Error::DimensionMismatch {
            expected: rates.len(),
            actual: weights.len(),
        });
    }
    Ok(rates.iter().zip(weights).map(|(l, a)| a * l).sum())
}

/// Rate of a hierarchical combination: the slowest rate.
pub fn combined_rate_hierarchical(rates: &[f64]) -> Result<f64> {
    rates
        .iter()
        .copied()
        .reduce(f64::min)
        .ok_or_else(|| Error::param("rates", "need at least one rate"))
}

/// Combined rate of a tree over time, with every leaf contracting at
/// `leaf_rate` under the shared metric.
pub fn rate_profile(node: &CombinationNode, leaf_rate: f64, times: &[f64]) -> Result<Vec<(f64, f64)>> {
    times
        .iter()
        .map(|&t| {
            let weights = node.leaf_weights(t);
            let total: f64 = weights.iter().sum();
            if (total - 1.0).abs() > 1e-12 {
                log::warn!("leaf weights sum to {total} at t = {t}");
            }
            combined_rate_parallel(&vec![leaf_rate; weights.len()], &weights).map(|r| (t, r))
        })
        .collect()
}
