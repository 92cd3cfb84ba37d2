//! Basis families for the nonlinear forcing term: normalized Gaussians over the
//! decaying phase and normalized von Mises bumps over the oscillator phase.

use std::f64::consts::TAU;

use nalgebra::DVector;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisKind {
    Gaussian,
    VonMises,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BasisFamily {
    kind: BasisKind,
    centers: Vec<f64>,
    widths: Vec<f64>,
}

impl BasisFamily {
    /// Builds a family from explicit centers and (inverse) widths.
    pub fn from_parts(kind: BasisKind, centers: Vec<f64>, widths: Vec<f64>) -> Result<Self> {
        if centers.len() < 2 {
            return Err(Error::param(
                "N",
                format!("need at least 2 basis functions, got {}", centers.len()),
            ));
        }
        if centers.len() != widths.len() {
            return Err(Error::DimensionMismatch {
                expected: centers.len(),
                actual: widths.len(),
            });
        }
        if let Some(h) = widths.iter().find(|h| !(**h > 0.0 && h.is_finite())) {
            return Err(Error::param(
                "h",
                format!("widths must be positive and finite, got {h}"),
            ));
        }
        if let Some(c) = centers.iter().find(|c| !c.is_finite()) {
            return Err(Error::param("c", format!("centers must be finite, got {c}")));
        }
        Ok(BasisFamily { kind, centers, widths })
    }

    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    pub fn centers(&self) -> &[f64] {
        &self.centers
    }

    pub fn widths(&self) -> &[f64] {
        &self.widths
    }

    /// Evaluates the family at phase `s`, dispatching on its kind.
    pub fn eval(&self, s: f64) -> Result<DVector<f64>> {
        match self.kind {
            BasisKind::Gaussian => eval_gaussian_vector(self, s),
            BasisKind::VonMises => eval_vonmises_vector(self, s),
        }
    }
}

/// Gaussian centers `c_i = exp(-α_s (i-1)/(N-1))` with `h_i = 1/(c_{i+1} - c_i)²`;
/// the last width repeats the previous one.
pub fn make_gaussian_basis(n: usize, alpha_s: f64) -> Result<BasisFamily> {
    if n < 2 {
        return Err(Error::param("N", format!("need at least 2 basis functions, got {n}")));
    }
    if !(alpha_s > 0.0) {
        return Err(Error::param("alpha_s", format!("must be positive, got {alpha_s}")));
    }
    let last = (n - 1) as f64;
    let centers: Vec<f64> = (0..n).map(|i| (-alpha_s * i as f64 / last).exp()).collect();
    let mut widths: Vec<f64> = centers.windows(2).map(|w| 1.0 / (w[1] - w[0]).powi(2)).collect();
    widths.push(widths[n - 2]);
    BasisFamily::from_parts(BasisKind::Gaussian, centers, widths)
}

/// Von Mises centers evenly spanning `[0, 2π]` with `h_i = 2.5 N`.
pub fn make_vonmises_basis(n: usize) -> Result<BasisFamily> {
    if n < 2 {
        return Err(Error::param("N", format!("need at least 2 basis functions, got {n}")));
    }
    let last = (n - 1) as f64;
    let centers = (0..n).map(|i| TAU * i as f64 / last).collect();
    let widths = vec![2.5 * n as f64; n];
    BasisFamily::from_parts(BasisKind::VonMises, centers, widths)
}

/// `σ(s) = s · [σ_1 … σ_N]ᵀ / Σ σ_i` with `σ_i = exp(-h_i (s - c_i)²)`.
///
/// The normalization is computed relative to the largest exponent, which gives
/// the same ratios without underflowing once `s` has decayed far below the
/// last center.
pub fn eval_gaussian_vector(basis: &BasisFamily, s: f64) -> Result<DVector<f64>> {
    if basis.kind != BasisKind::Gaussian {
        return Err(Error::BasisEvaluation("expected a gaussian basis".into()));
    }
    if !s.is_finite() {
        return Err(Error::BasisEvaluation(format!("phase must be finite, got {s}")));
    }
    if s < 0.0 || s > basis.centers[0] {
        log::warn!("gaussian basis evaluated outside [0, {}] at s = {s}", basis.centers[0]);
    }
    let exponents: Vec<f64> = basis
        .centers
        .iter()
        .zip(&basis.widths)
        .map(|(c, h)| -h * (s - c).powi(2))
        .collect();
    let peak = exponents.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let raw = DVector::from_iterator(exponents.len(), exponents.iter().map(|e| (e - peak).exp()));
    let total = raw.sum();
    if !(total > 0.0) {
        return Err(Error::BasisEvaluation(format!(
            "gaussian activations vanish at s = {s}"
        )));
    }
    Ok(raw * (s / total))
}

/// `ψ(s) = [ψ_1 … ψ_N]ᵀ / Σ ψ_i` with `ψ_i = exp(h_i (cos(s - c_i) - 1))`.
pub fn eval_vonmises_vector(basis: &BasisFamily, s: f64) -> Result<DVector<f64>> {
    if basis.kind != BasisKind::VonMises {
        return Err(Error::BasisEvaluation("expected a von Mises basis".into()));
    }
    if !s.is_finite() {
        return Err(Error::BasisEvaluation(format!("phase must be finite, got {s}")));
    }
    let raw = DVector::from_iterator(
        basis.len(),
        basis
            .centers
            .iter()
            .zip(&basis.widths)
            .map(|(c, h)| (h * ((s - c).cos() - 1.0)).exp()),
    );
    let total = raw.sum();
    Ok(raw / total)
}
