//! Closest product state, maximal affinity and the Hellinger discord of two-mode states,
//! together with Simon separability and the entropic correlation measures.
//!
//! Every two-mode input is first reduced to its standard form. The production route for
//! the maximal affinity goes through the standard form of the square-root state:
//!
//! ```text
//! A = [4 κ̃1κ̃2 / ((√B̃ + √(B̃ − c̃²))(√B̃ + √(B̃ − d̃²)))]^{1/2},   B̃ = b̃1 b̃2
//! ```

use nalgebra::Matrix2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::states::{entropic_h, GaussianState, MtsParams, StsParams};
use crate::symplectic::{self, CovarianceMatrix, StandardForm, SymplecticInvariants};
use crate::tolerance;

/// Relative tolerance used to decide membership of the symmetric `|d| = c` family.
const FAMILY_TOL: f64 = 1e-9;

/// A product of two one-mode displaced squeezed thermal states.
///
/// Mode `j` has symplectic eigenvalue `η_j`, squeezing `r_j` and squeeze angle `φ_j`:
/// `σ11 = η[cosh 2r + cos φ sinh 2r]`, `σ22 = η[cosh 2r − cos φ sinh 2r]`, `σ12 = η sin φ sinh 2r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProductStateParams {
    pub eta1: f64,
    pub eta2: f64,
    pub r1: f64,
    pub r2: f64,
    pub phi1: f64,
    pub phi2: f64,
    pub mean: [f64; 4],
}

/// One-mode squeezed thermal CM block.
pub fn one_mode_cm(eta: f64, r: f64, phi: f64) -> Matrix2<f64> {
    let (ch, sh) = ((2.0 * r).cosh(), (2.0 * r).sinh());
    let (cp, sp) = (phi.cos(), phi.sin());
    Matrix2::new(eta * (ch + cp * sh), eta * sp * sh, eta * sp * sh, eta * (ch - cp * sh))
}

impl ProductStateParams {
    pub fn centered(eta1: f64, eta2: f64, r1: f64, r2: f64, phi1: f64, phi2: f64) -> Self {
        Self {
            eta1,
            eta2,
            r1,
            r2,
            phi1,
            phi2,
            mean: [0.0; 4],
        }
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.eta1, self.eta2, self.r1, self.r2, self.phi1, self.phi2];
        if all.iter().chain(self.mean.iter()).any(|x| !x.is_finite()) {
            return Err(Error::InvalidParams("product-state parameters must be finite".into()));
        }
        let low = self.eta1.min(self.eta2);
        if low < 0.5 - tolerance::PHYSICALITY {
            return Err(Error::NotPhysical(low));
        }
        Ok(())
    }

    /// Block-diagonal two-mode CM.
    pub fn to_cm(&self) -> CovarianceMatrix {
        let mut m = nalgebra::DMatrix::zeros(4, 4);
        m.view_mut((0, 0), (2, 2))
            .copy_from(&one_mode_cm(self.eta1, self.r1, self.phi1));
        m.view_mut((2, 2), (2, 2))
            .copy_from(&one_mode_cm(self.eta2, self.r2, self.phi2));
        CovarianceMatrix::new(m).expect("block-diagonal CM is symmetric")
    }

    pub fn to_state(&self) -> Result<GaussianState> {
        self.validate()?;
        GaussianState::new(self.mean.to_vec(), self.to_cm())
    }

    /// Reads `η` as square-root-state eigenvalues and returns the parameters of the state itself.
    pub fn from_sqrt_parameterization(&self) -> Self {
        Self {
            eta1: symplectic::eigenvalue_from_sqrt_state(self.eta1),
            eta2: symplectic::eigenvalue_from_sqrt_state(self.eta2),
            ..*self
        }
    }
}

/// The product state closest to a given two-mode state in the Hellinger metric.
#[derive(Debug, Clone)]
pub struct ClosestProduct {
    /// Optimal parameters in the square-root parameterization, in the standard-form frame.
    pub params: ProductStateParams,
    pub max_affinity: f64,
    /// Scaled standard form of the square-root state of the input.
    pub sqrt_form: StandardForm,
    /// The closest product state itself, mapped back to the frame of the input.
    pub state: GaussianState,
}

impl ClosestProduct {
    /// The normalized square-root state of the closest product state, in the standard frame.
    ///
    /// Its symplectic eigenvalues are `η̃_j`, so its purity is `(4 κ̃1 κ̃2)^{-1}`.
    pub fn sqrt_state(&self) -> Result<GaussianState> {
        self.params.to_state()
    }
}

/// Standard form of a physical two-mode CM together with the standard form of its square root.
fn tilde_form(v: &CovarianceMatrix) -> Result<(StandardForm, StandardForm)> {
    let sf = symplectic::standard_form(v)?;
    let t = symplectic::square_root_standard_form(&sf)?;
    Ok((sf, t))
}

fn is_product_form(sf: &StandardForm) -> bool {
    sf.c == 0.0 && sf.d == 0.0
}

/// Optimal product parameters from the square-root standard form, in the standard frame.
pub fn optimal_product_params(t: &StandardForm) -> Result<ProductStateParams> {
    let (k1, k2) = t.spectrum()?;
    let bb = t.b1 * t.b2;
    let kk = k1 * k2;
    let quotient = if t.c == 0.0 && t.d == 0.0 {
        1.0
    } else {
        (bb - t.c * t.c) / (bb - t.d * t.d)
    };
    let q = quotient.powf(0.25);
    Ok(ProductStateParams::centered(
        (t.b1 / t.b2 * kk).sqrt(),
        (t.b2 / t.b1 * kk).sqrt(),
        0.5 * (t.s1 * q).ln(),
        0.5 * (t.s2 * q).ln(),
        0.0,
        0.0,
    ))
}

/// Residuals of the four stationarity conditions of the affinity with respect to
/// `(η̃1, η̃2, r1, r2)` at `φ = 0`, on the scaled square-root standard form `t`.
pub fn stationarity_residuals(t: &StandardForm, p: &ProductStateParams) -> [f64; 4] {
    let (x1, x2) = (t.b1 * t.s1, t.b2 * t.s2);
    let (y1, y2) = (p.eta1 * (2.0 * p.r1).exp(), p.eta2 * (2.0 * p.r2).exp());
    let (u1, u2) = (t.b1 / t.s1, t.b2 / t.s2);
    let (w1, w2) = (p.eta1 * (-2.0 * p.r1).exp(), p.eta2 * (-2.0 * p.r2).exp());
    let cc = t.c * t.c * t.s1 * t.s2;
    let dd = t.d * t.d / (t.s1 * t.s2);
    [
        (x1 + y1) * (x2 - y2) - cc,
        (x1 - y1) * (x2 + y2) - cc,
        (u1 + w1) * (u2 - w2) - dd,
        (u1 - w1) * (u2 + w2) - dd,
    ]
}

/// Maximal affinity from the square-root standard form.
pub fn max_affinity_from_sqrt_form(t: &StandardForm) -> Result<f64> {
    if is_product_form(t) {
        return Ok(1.0);
    }
    let (k1, k2) = t.spectrum()?;
    let bb = t.b1 * t.b2;
    let rb = bb.sqrt();
    let den = (rb + (bb - t.c * t.c).max(0.0).sqrt()) * (rb + (bb - t.d * t.d).max(0.0).sqrt());
    Ok((4.0 * k1 * k2 / den).sqrt().min(1.0))
}

/// Closest product state and maximal affinity of a two-mode state.
pub fn closest_product_state(v: &CovarianceMatrix, mean: &[f64]) -> Result<ClosestProduct> {
    symplectic::require_two_mode(v)?;
    if mean.len() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            got: mean.len(),
        });
    }
    let ls = symplectic::local_standardization(v)?;
    let t = symplectic::square_root_standard_form(&ls.form)?;
    let mut params = optimal_product_params(&t)?;
    let max_affinity = max_affinity_from_sqrt_form(&t)?;
    let in_frame = params.from_sqrt_parameterization().to_cm();
    let cm = ls.to_original_frame(&in_frame)?;
    params.mean.copy_from_slice(&ls.mean_to_standard_frame(mean));
    let state = GaussianState::new(mean.to_vec(), cm)?;
    Ok(ClosestProduct {
        params,
        max_affinity,
        sqrt_form: t,
        state,
    })
}

/// Maximal affinity between a two-mode state and the set of product Gaussian states.
pub fn max_affinity(v: &CovarianceMatrix) -> Result<f64> {
    symplectic::require_two_mode(v)?;
    let (_, t) = tilde_form(v)?;
    max_affinity_from_sqrt_form(&t)
}

/// Maximal affinity written directly in the entries of the standard form of `V`.
///
/// ```text
/// A = 2K (det V)^{1/4} / [K² √det V + K (det V)^{1/4} √Q + √(B1 B2)]^{1/2}
/// B_{1,2} = b1 b2 K² + ¼ (b_{1,2} c + b_{2,1} d)²
/// Q = (√(b1b2 − c²) + √(b1b2 − d²))² [b1b2 (√M1 + √M2)² − ¼ (b1 − b2)²] − (√B1 − √B2)²
/// ```
///
/// Returns `None` when `K = 0` (both modes pure), where the expression is `0/0`.
pub fn max_affinity_v_route(v: &CovarianceMatrix) -> Result<Option<f64>> {
    symplectic::require_two_mode(v)?;
    let sf = symplectic::standard_form(v)?;
    max_affinity_v_route_form(&sf)
}

/// [`max_affinity_v_route`] on an unscaled standard form.
pub fn max_affinity_v_route_form(sf: &StandardForm) -> Result<Option<f64>> {
    let (k1, k2) = sf.spectrum()?;
    let inv = SymplecticInvariants::from_spectrum(k1, k2);
    let k = inv.k;
    if k == 0.0 {
        return Ok(None);
    }
    let StandardForm { b1, b2, c, d, .. } = *sf;
    let bb = b1 * b2;
    let det = sf.det();
    let q4 = det.sqrt().sqrt();
    let big1 = bb * k * k + 0.25 * (b1 * c + b2 * d).powi(2);
    let big2 = bb * k * k + 0.25 * (b2 * c + b1 * d).powi(2);
    let s = (bb - c * c).max(0.0).sqrt() + (bb - d * d).max(0.0).sqrt();
    let m = inv.m1.sqrt() + inv.m2.sqrt();
    let q = s * s * (bb * m * m - 0.25 * (b1 - b2).powi(2)) - (big1.sqrt() - big2.sqrt()).powi(2);
    let den = k * k * det.sqrt() + k * q4 * q.max(0.0).sqrt() + (big1 * big2).sqrt();
    Ok(Some(2.0 * k * q4 / den.sqrt()))
}

/// `D_H = 1 − A`, the Hellinger discord of a two-mode state.
pub fn hellinger_discord(v: &CovarianceMatrix) -> Result<f64> {
    Ok((1.0 - max_affinity(v)?).max(0.0))
}

/// Hellinger discord of a symmetric state `(b, b, c, d)` from the spectra of the state and
/// of its partial transpose:
///
/// `D = 1 − 4 (det V)^{1/4} / (κ1PT + κ2PT + 2 (det V)^{1/4} (√N1 − √N2))`.
pub fn hellinger_discord_symmetric(b: f64, c: f64, d: f64) -> Result<f64> {
    let sf = StandardForm::symmetric(b, c, d);
    sf.validate()?;
    let k1 = ((b + c) * (b + d)).max(0.0).sqrt();
    let k2 = ((b - c) * (b - d)).max(0.0).sqrt();
    let pt1 = ((b + c) * (b - d)).max(0.0).sqrt();
    let pt2 = ((b - c) * (b + d)).max(0.0).sqrt();
    let inv = SymplecticInvariants::from_spectrum(k1.max(k2), k1.min(k2));
    let q4 = sf.det().max(0.0).sqrt().sqrt();
    let a = 4.0 * q4 / (pt1 + pt2 + 2.0 * q4 * (inv.n1.sqrt() - inv.n2.sqrt()));
    Ok((1.0 - a).max(0.0))
}

/// `√𝒟` from a spectrum, with round-off below zero clamped.
fn sqrt_d(k1: f64, k2: f64) -> f64 {
    let d = SymplecticInvariants::from_spectrum(k1, k2).d;
    if d < -tolerance::INVARIANT_CLAMP {
        f64::NAN
    } else {
        d.max(0.0).sqrt()
    }
}

/// Hellinger discord of a two-mode squeezed thermal state:
/// `1 − 2/(√X + 1)`, `X = 1 + 2(√det V + ¼ − √𝒟) sinh²(2r)`.
pub fn hellinger_discord_sts(p: &StsParams) -> Result<f64> {
    p.validate()?;
    let (k1, k2) = p.kappas();
    let x = 1.0 + 2.0 * (k1 * k2 + 0.25 - sqrt_d(k1, k2)) * (2.0 * p.r).sinh().powi(2);
    Ok(1.0 - 2.0 / (x.sqrt() + 1.0))
}

/// Hellinger discord of a mode-mixed thermal state:
/// `1 − 2/(√Y + 1)`, `Y = 1 + 2(√det V − ¼ − √𝒟) sin²θ`.
pub fn hellinger_discord_mts(p: &MtsParams) -> Result<f64> {
    p.validate()?;
    let (k1, k2) = (p.kappa1, p.kappa2);
    let y = 1.0 + 2.0 * (k1 * k2 - 0.25 - sqrt_d(k1, k2)) * p.theta.sin().powi(2);
    Ok(1.0 - 2.0 / (y.max(1.0).sqrt() + 1.0))
}

/// Simon's criterion: separable iff the partial transpose is physical.
pub fn simon_separable(v: &CovarianceMatrix) -> Result<bool> {
    symplectic::require_two_mode(v)?;
    let sf = symplectic::standard_form(v)?;
    Ok(pt_spectrum(&sf).1 >= 0.5 - tolerance::PHYSICALITY)
}

/// Symplectic eigenvalues of the partial transpose of a standard form, larger first.
pub fn pt_spectrum(sf: &StandardForm) -> (f64, f64) {
    let pt = sf.partial_transpose();
    symplectic::two_mode_spectrum(pt.det(), pt.delta())
}

/// `(b, c)` of a symmetric `|d| = c` standard form, or `OutOfFamily`.
fn symmetric_family(sf: &StandardForm) -> Result<(f64, f64)> {
    let scale = sf.b1.max(sf.b2);
    if (sf.b1 - sf.b2).abs() > FAMILY_TOL * scale || (sf.d.abs() - sf.c).abs() > FAMILY_TOL * scale {
        return Err(Error::OutOfFamily(format!(
            "requires b1 = b2 and |d| = c (standard form {:?})",
            (sf.b1, sf.b2, sf.c, sf.d)
        )));
    }
    Ok((0.5 * (sf.b1 + sf.b2), sf.c))
}

/// `y = b − c² / (b + ½)`.
fn conditional_eigenvalue(b: f64, c: f64) -> f64 {
    b - c * c / (b + 0.5)
}

/// Entropic Gaussian discord `h(b) − h(κ1) − h(κ2) + h(y)` on the symmetric `|d| = c` family.
pub fn entropic_discord(v: &CovarianceMatrix) -> Result<f64> {
    symplectic::require_two_mode(v)?;
    let sf = symplectic::standard_form(v)?;
    let (b, c) = symmetric_family(&sf)?;
    if is_product_form(&sf) {
        return Ok(0.0);
    }
    let (k1, k2) = sf.spectrum()?;
    let y = conditional_eigenvalue(b, c);
    Ok((entropic_h(b) - entropic_h(k1) - entropic_h(k2) + entropic_h(y)).max(0.0))
}

/// Quantum mutual information `h(b1) + h(b2) − h(κ1) − h(κ2)`.
pub fn mutual_information(v: &CovarianceMatrix) -> Result<f64> {
    symplectic::require_two_mode(v)?;
    let sf = symplectic::standard_form(v)?;
    if is_product_form(&sf) {
        return Ok(0.0);
    }
    let (k1, k2) = sf.spectrum()?;
    Ok((entropic_h(sf.b1) + entropic_h(sf.b2) - entropic_h(k1) - entropic_h(k2)).max(0.0))
}

/// Classical correlations `h(b) − h(y)` on the symmetric `|d| = c` family.
pub fn classical_correlations(v: &CovarianceMatrix) -> Result<f64> {
    symplectic::require_two_mode(v)?;
    let sf = symplectic::standard_form(v)?;
    let (b, c) = symmetric_family(&sf)?;
    Ok((entropic_h(b) - entropic_h(conditional_eigenvalue(b, c))).max(0.0))
}

/// Entanglement of formation of a symmetric squeezed thermal state `(b, b, c, −c)`:
/// `h(z)` with `z = ((b − c)² + ¼) / (2(b − c))` when `b − c < ½`, else 0.
pub fn entanglement_of_formation_symmetric(b: f64, c: f64) -> Result<f64> {
    StandardForm::symmetric(b, c, -c).validate()?;
    let gap = b - c;
    if gap >= 0.5 {
        return Ok(0.0);
    }
    let z = (gap * gap + 0.25) / (2.0 * gap);
    Ok(entropic_h(z))
}

/// Every correlation measure of a two-mode state.
///
/// Measures that are only defined on the symmetric `|d| = c` family are `None` elsewhere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationReport {
    pub hellinger_discord: f64,
    pub max_affinity: f64,
    pub entropic_discord: Option<f64>,
    pub mutual_information: f64,
    pub classical_correlations: Option<f64>,
    pub eof: Option<f64>,
    pub separable: bool,
    pub symplectic_spectrum: (f64, f64),
    pub pt_spectrum: (f64, f64),
    pub standard_form: StandardForm,
}

/// Aggregates all measures. The mean does not enter any of them and is only validated.
pub fn correlation_report(v: &CovarianceMatrix, mean: &[f64]) -> Result<CorrelationReport> {
    symplectic::require_two_mode(v)?;
    let state = GaussianState::new(mean.to_vec(), v.clone())?;
    let sf = symplectic::standard_form(state.cm())?;
    let t = symplectic::square_root_standard_form(&sf)?;
    let max_affinity = max_affinity_from_sqrt_form(&t)?;
    let spectrum = sf.spectrum()?;
    let pt = pt_spectrum(&sf);
    let separable = pt.1 >= 0.5 - tolerance::PHYSICALITY;
    let family = symmetric_family(&sf).ok();
    let (entropic, classical) = match family {
        Some(_) => (Some(entropic_discord(v)?), Some(classical_correlations(v)?)),
        None => (None, None),
    };
    let eof = match family {
        _ if separable => Some(0.0),
        Some((b, c)) if sf.d <= 0.0 => Some(entanglement_of_formation_symmetric(b, c)?),
        _ => None,
    };
    Ok(CorrelationReport {
        hellinger_discord: (1.0 - max_affinity).max(0.0),
        max_affinity,
        entropic_discord: entropic,
        mutual_information: mutual_information(v)?,
        classical_correlations: classical,
        eof,
        separable,
        symplectic_spectrum: spectrum,
        pt_spectrum: pt,
        standard_form: sf,
    })
}
