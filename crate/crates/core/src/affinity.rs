//! Overlap trace, trace of the square root, affinity and Hellinger distance of Gaussian states.
//!
//! For square-root covariance matrices `Ṽ'`, `Ṽ''` and relative displacement `δv`,
//!
//! ```text
//! A = 2ⁿ [det Ṽ' det Ṽ'']^{1/4} / [det(Ṽ' + Ṽ'')]^{1/2} · exp(−½ δvᵀ (Ṽ' + Ṽ'')⁻¹ δv)
//! ```
//!
//! Everything is evaluated in log space through a Cholesky factorization of the sum.

use nalgebra::{DMatrix, DVector, Matrix4};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::states::GaussianState;
use crate::symplectic::{self, CovarianceMatrix};

/// A positive overlap carried together with its logarithm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OverlapResult {
    pub value: f64,
    pub log_value: f64,
}

impl OverlapResult {
    pub fn from_log(log_value: f64) -> Self {
        Self {
            value: log_value.exp(),
            log_value,
        }
    }
}

/// `ln det(M)` and `xᵀ M⁻¹ x` for a symmetric positive-definite `M`.
fn log_det_and_quadratic(m: DMatrix<f64>, x: &[f64]) -> Result<(f64, f64)> {
    let det_hint = symplectic::det(&m);
    let chol = m.cholesky().ok_or(Error::SingularSum(det_hint))?;
    let log_det = 2.0 * chol.l_dirty().diagonal().iter().map(|d| d.ln()).sum::<f64>();
    let quad = if x.iter().all(|v| *v == 0.0) {
        0.0
    } else {
        let rhs = DVector::from_column_slice(x);
        rhs.dot(&chol.solve(&rhs))
    };
    Ok((log_det, quad))
}

fn check_dims(a: &CovarianceMatrix, b: &CovarianceMatrix, dv: &[f64]) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    if dv.len() != a.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            got: dv.len(),
        });
    }
    Ok(())
}

/// `Tr(ρ' ρ'') = [det(V' + V'')]^{-1/2} exp(−½ δvᵀ (V' + V'')⁻¹ δv)`.
pub fn gaussian_overlap_trace(v1: &CovarianceMatrix, v2: &CovarianceMatrix, dv: &[f64]) -> Result<f64> {
    check_dims(v1, v2, dv)?;
    let (log_det, quad) = log_det_and_quadratic(v1.matrix() + v2.matrix(), dv)?;
    Ok((-0.5 * log_det - 0.5 * quad).exp())
}

/// `Tr √ρ = [det(2Ṽ)]^{1/4}`.
pub fn trace_of_sqrt(s: &GaussianState) -> Result<f64> {
    let vt = symplectic::square_root_cm(s.cm())?;
    let dim = vt.dim() as i32;
    Ok((2f64.powi(dim) * vt.det()).powf(0.25))
}

/// Affinity evaluated directly on square-root covariance matrices.
pub fn affinity_of_sqrt_cms(t1: &CovarianceMatrix, t2: &CovarianceMatrix, dv: &[f64]) -> Result<OverlapResult> {
    check_dims(t1, t2, dv)?;
    let n = t1.modes() as f64;
    let (d1, d2) = (t1.det(), t2.det());
    if !(d1 > 0.0 && d2 > 0.0) {
        return Err(Error::NotPositiveDefinite);
    }
    let (log_det_sum, quad) = log_det_and_quadratic(t1.matrix() + t2.matrix(), dv)?;
    let log_value = n * std::f64::consts::LN_2 + 0.25 * (d1.ln() + d2.ln()) - 0.5 * log_det_sum - 0.5 * quad;
    Ok(OverlapResult::from_log(log_value.min(0.0)))
}

/// `A(ρ', ρ'') = Tr(√ρ' √ρ'')`.
pub fn affinity(s1: &GaussianState, s2: &GaussianState) -> Result<OverlapResult> {
    if s1.modes() != s2.modes() {
        return Err(Error::DimensionMismatch {
            expected: s1.cm().dim(),
            got: s2.cm().dim(),
        });
    }
    let t1 = symplectic::square_root_cm(s1.cm())?;
    let t2 = symplectic::square_root_cm(s2.cm())?;
    let dv: Vec<f64> = (s1.mean() - s2.mean()).iter().copied().collect();
    affinity_of_sqrt_cms(&t1, &t2, &dv)
}

/// `d_H = sqrt(2 − 2A)`.
pub fn hellinger_distance(s1: &GaussianState, s2: &GaussianState) -> Result<f64> {
    let a = affinity(s1, s2)?;
    Ok((2.0 - 2.0 * a.value).max(0.0).sqrt())
}

/// Zero-displacement two-mode log-affinity on stack matrices; `log_det_t1` is `ln det Ṽ'`.
///
/// Allocation-free variant of [`affinity_of_sqrt_cms`] for inner optimization loops.
pub fn log_affinity_two_mode(t1: &Matrix4<f64>, log_det_t1: f64, t2: &Matrix4<f64>, log_det_t2: f64) -> f64 {
    let sum = t1 + t2;
    match sum.cholesky() {
        Some(ch) => {
            let l = ch.l_dirty();
            let log_det_sum = 2.0 * (0..4).map(|i| l[(i, i)].ln()).sum::<f64>();
            2.0 * std::f64::consts::LN_2 + 0.25 * (log_det_t1 + log_det_t2) - 0.5 * log_det_sum
        }
        None => f64::NEG_INFINITY,
    }
}
