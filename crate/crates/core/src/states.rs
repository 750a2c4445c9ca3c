//! Gaussian states and the two-mode families used throughout the crate.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symplectic::{self, CovarianceMatrix, StandardForm};
use crate::tolerance;

/// Mean quadrature vector plus covariance matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    mean: DVector<f64>,
    cm: CovarianceMatrix,
}

impl GaussianState {
    /// Validated constructor: the CM must be physical and the mean finite with length 2n.
    pub fn new(mean: Vec<f64>, cm: CovarianceMatrix) -> Result<Self> {
        if mean.len() != cm.dim() {
            return Err(Error::DimensionMismatch {
                expected: cm.dim(),
                got: mean.len(),
            });
        }
        if mean.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParams("mean vector must be finite".into()));
        }
        symplectic::require_physical(&cm)?;
        Ok(Self {
            mean: DVector::from_vec(mean),
            cm,
        })
    }

    /// Zero-mean state.
    pub fn centered(cm: CovarianceMatrix) -> Result<Self> {
        Self::new(vec![0.0; cm.dim()], cm)
    }

    pub fn vacuum(modes: usize) -> Self {
        Self {
            mean: DVector::zeros(2 * modes),
            cm: CovarianceMatrix::scaled_identity(modes, 0.5),
        }
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn cm(&self) -> &CovarianceMatrix {
        &self.cm
    }

    pub fn modes(&self) -> usize {
        self.cm.modes()
    }

    /// Same covariance, new mean.
    pub fn displaced(&self, mean: Vec<f64>) -> Result<Self> {
        Self::new(mean, self.cm.clone())
    }

    /// Tensor product `self ⊗ other`.
    pub fn tensor(&self, other: &GaussianState) -> GaussianState {
        let mut mean: Vec<f64> = self.mean.iter().copied().collect();
        mean.extend(other.mean.iter());
        GaussianState {
            mean: DVector::from_vec(mean),
            cm: self.cm.direct_sum(&other.cm),
        }
    }

    /// Applies the Gaussian unitary `x ↦ S x + shift`: CM `S V Sᵀ`, mean `S v + shift`.
    pub fn transform(&self, s: &nalgebra::DMatrix<f64>, shift: &[f64]) -> Result<GaussianState> {
        let cm = self.cm.congruence(s)?;
        if shift.len() != self.cm.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.cm.dim(),
                got: shift.len(),
            });
        }
        let mean = s * &self.mean + DVector::from_column_slice(shift);
        Ok(GaussianState { mean, cm })
    }

    /// Max-norm difference over CM entries and mean components.
    pub fn max_abs_diff(&self, other: &GaussianState) -> f64 {
        if self.cm.dim() != other.cm.dim() {
            return f64::INFINITY;
        }
        let dm = (&self.mean - &other.mean).amax();
        self.cm.max_abs_diff(&other.cm).max(dm)
    }

    pub fn approx_eq(&self, other: &GaussianState) -> bool {
        self.max_abs_diff(other) <= tolerance::STATE_EQUALITY
    }
}

/// Two-mode squeezed thermal state parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StsParams {
    pub nbar1: f64,
    pub nbar2: f64,
    pub r: f64,
    #[serde(default)]
    pub phi: f64,
}

impl StsParams {
    pub fn new(nbar1: f64, nbar2: f64, r: f64) -> Self {
        Self {
            nbar1,
            nbar2,
            r,
            phi: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.nbar1, self.nbar2, self.r, self.phi].iter().all(|x| x.is_finite());
        if !finite || self.nbar1 < 0.0 || self.nbar2 < 0.0 || self.r < 0.0 {
            return Err(Error::InvalidParams(format!(
                "STS requires nbar1, nbar2, r >= 0 (got {self:?})"
            )));
        }
        if !phase_in_range(self.phi) {
            return Err(Error::InvalidParams(format!("phase {} outside (-pi, pi]", self.phi)));
        }
        Ok(())
    }

    pub fn kappas(&self) -> (f64, f64) {
        (self.nbar1 + 0.5, self.nbar2 + 0.5)
    }

    /// `b_{1,2} = κ_{1,2} cosh²r + κ_{2,1} sinh²r`, `c = −d = (κ1 + κ2) cosh r sinh r`.
    pub fn standard_form(&self) -> Result<StandardForm> {
        self.validate()?;
        let (k1, k2) = self.kappas();
        let (ch, sh) = (self.r.cosh(), self.r.sinh());
        let (ch2, sh2) = (ch * ch, sh * sh);
        let c = (k1 + k2) * ch * sh;
        Ok(StandardForm::new(k1 * ch2 + k2 * sh2, k2 * ch2 + k1 * sh2, c, -c))
    }
}

/// Mode-mixed thermal state parameters (beam splitter acting on a product thermal state).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MtsParams {
    pub kappa1: f64,
    pub kappa2: f64,
    pub theta: f64,
    #[serde(default)]
    pub phi: f64,
}

impl MtsParams {
    pub fn new(kappa1: f64, kappa2: f64, theta: f64) -> Self {
        Self {
            kappa1,
            kappa2,
            theta,
            phi: 0.0,
        }
    }

    /// `κ1 = κ2` is accepted and yields a product state.
    pub fn validate(&self) -> Result<()> {
        let finite = [self.kappa1, self.kappa2, self.theta, self.phi]
            .iter()
            .all(|x| x.is_finite());
        if !finite
            || self.kappa2 < 0.5
            || self.kappa1 < self.kappa2
            || !(0.0..=std::f64::consts::PI).contains(&self.theta)
        {
            return Err(Error::InvalidParams(format!(
                "MTS requires kappa1 >= kappa2 >= 1/2 and theta in [0, pi] (got {self:?})"
            )));
        }
        if !phase_in_range(self.phi) {
            return Err(Error::InvalidParams(format!("phase {} outside (-pi, pi]", self.phi)));
        }
        Ok(())
    }

    /// Intensity transmission `cos²(θ/2)`.
    pub fn transmission(&self) -> f64 {
        (0.5 * self.theta).cos().powi(2)
    }

    /// `b_{1,2} = κ_{1,2} cos²(θ/2) + κ_{2,1} sin²(θ/2)`, `c = d = (κ1 − κ2) cos(θ/2) sin(θ/2)`.
    pub fn standard_form(&self) -> Result<StandardForm> {
        self.validate()?;
        let (co, si) = ((0.5 * self.theta).cos(), (0.5 * self.theta).sin());
        let (co2, si2) = (co * co, si * si);
        let (k1, k2) = (self.kappa1, self.kappa2);
        let c = ((k1 - k2) * co * si).abs();
        Ok(StandardForm::new(k1 * co2 + k2 * si2, k2 * co2 + k1 * si2, c, c))
    }
}

fn phase_in_range(phi: f64) -> bool {
    phi > -std::f64::consts::PI && phi <= std::f64::consts::PI
}

/// Product thermal state with the given mean occupancies: CM `⊕ (n̄_j + ½) I₂`.
pub fn thermal_state(nbars: &[f64]) -> Result<GaussianState> {
    if nbars.is_empty() {
        return Err(Error::InvalidParams("at least one mode required".into()));
    }
    if let Some(&bad) = nbars.iter().find(|n| **n < 0.0 || !n.is_finite()) {
        return Err(Error::NegativeOccupancy(bad));
    }
    let diag: Vec<f64> = nbars.iter().flat_map(|n| [n + 0.5, n + 0.5]).collect();
    GaussianState::centered(CovarianceMatrix::diagonal(&diag)?)
}

/// Zero-mean state with the standard-form STS covariance.
pub fn sts_state(p: &StsParams) -> Result<GaussianState> {
    GaussianState::centered(p.standard_form()?.to_cm())
}

/// Zero-mean state with the standard-form MTS covariance.
pub fn mts_state(p: &MtsParams) -> Result<GaussianState> {
    GaussianState::centered(p.standard_form()?.to_cm())
}

/// Two-mode squeezed vacuum: `b = ½ cosh 2r`, `c = −d = ½ sinh 2r`.
pub fn two_mode_squeezed_vacuum(r: f64) -> Result<GaussianState> {
    sts_state(&StsParams::new(0.0, 0.0, r))
}

/// Squeezing above which an STS is entangled: `sinh² r_s = n̄1 n̄2 / (n̄1 + n̄2 + 1)`.
pub fn sts_separability_threshold(p: &StsParams) -> f64 {
    let s2 = p.nbar1 * p.nbar2 / (p.nbar1 + p.nbar2 + 1.0);
    s2.max(0.0).sqrt().asinh()
}

/// `Tr ρ² = [det(2V)]^{-1/2}`.
pub fn purity(s: &GaussianState) -> Result<f64> {
    symplectic::require_physical(s.cm())?;
    let scale = 2f64.powi(s.cm().dim() as i32);
    Ok(1.0 / (scale * s.cm().det()).sqrt())
}

/// The entropic function `h(x) = (x + ½) ln(x + ½) − (x − ½) ln(x − ½)`, `x >= ½`.
///
/// `h(½) = 0`; the `(x − ½)` term is dropped when `x − ½` is below the edge tolerance.
pub fn entropic_h(x: f64) -> f64 {
    let up = x + 0.5;
    let down = x - 0.5;
    let a = up * up.ln();
    if down < tolerance::ENTROPY_EDGE {
        a
    } else {
        a - down * down.ln()
    }
}

/// Von Neumann entropy `Σ h(κ_j)`.
pub fn von_neumann_entropy(s: &GaussianState) -> Result<f64> {
    let spec = symplectic::require_physical(s.cm())?;
    Ok(spec.kappas.iter().map(|&k| entropic_h(k)).sum())
}
