//! Truncated photon-number sums for thermal states, whose density matrices are diagonal in
//! the Fock basis with geometric populations `p_n = (1/(n̄+1)) (n̄/(n̄+1))ⁿ`.
//!
//! Each sum is truncated at a cutoff `N` chosen so that a closed-form bound on the
//! discarded tail is below the configured threshold; `N` doubles until it is, up to a cap.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FockOracleConfig {
    /// Initial photon-number cutoff.
    pub truncation: usize,
    /// Required bound on the discarded tail of every sum.
    pub tail_bound: f64,
    /// Largest cutoff tried before giving up.
    pub max_truncation: usize,
}

impl Default for FockOracleConfig {
    fn default() -> Self {
        Self {
            truncation: 400,
            tail_bound: 1e-14,
            max_truncation: 1 << 14,
        }
    }
}

fn check_nbar(nbar: f64) -> Result<()> {
    if nbar < 0.0 || !nbar.is_finite() {
        return Err(Error::NegativeOccupancy(nbar));
    }
    Ok(())
}

/// `x = n̄/(n̄+1)`.
fn ratio(nbar: f64) -> f64 {
    nbar / (nbar + 1.0)
}

/// Smallest cutoff `N = truncation · 2^k` with `tail(N) ≤ tail_bound`.
fn cutoff(cfg: &FockOracleConfig, tail: impl Fn(usize) -> f64) -> Result<usize> {
    let mut n = cfg.truncation.max(1);
    loop {
        let t = tail(n);
        if t <= cfg.tail_bound {
            return Ok(n);
        }
        if n >= cfg.max_truncation {
            return Err(Error::TruncationInsufficient { cutoff: n, tail: t });
        }
        n = (2 * n).min(cfg.max_truncation);
    }
}

/// `p_0, …, p_N` of a thermal state; the mass beyond `N` is `x^{N+1}`.
pub fn fock_thermal_spectrum(nbar: f64, cfg: &FockOracleConfig) -> Result<Vec<f64>> {
    check_nbar(nbar)?;
    let x = ratio(nbar);
    let n = cutoff(cfg, |n| x.powi(n as i32 + 1))?;
    let p0 = 1.0 / (nbar + 1.0);
    let mut out = Vec::with_capacity(n + 1);
    let mut p = p0;
    for _ in 0..=n {
        out.push(p);
        p *= x;
    }
    Ok(out)
}

/// Geometric tail `a y^{N+1} / (1 − y)` of `Σ a yⁿ`.
fn geometric_tail(a: f64, y: f64, n: usize) -> f64 {
    if y == 0.0 {
        0.0
    } else {
        a * y.powi(n as i32 + 1) / (1.0 - y)
    }
}

/// `Σ_n a yⁿ` truncated at a certified cutoff.
fn geometric_sum(a: f64, y: f64, cfg: &FockOracleConfig) -> Result<f64> {
    let n = cutoff(cfg, |n| geometric_tail(a, y, n))?;
    let mut term = a;
    let mut sum = 0.0;
    for _ in 0..=n {
        sum += term;
        term *= y;
    }
    Ok(sum)
}

/// Affinity of two thermal states, `Σ_n √(p_n q_n)`.
pub fn fock_affinity_diagonal(nbar1: f64, nbar2: f64, cfg: &FockOracleConfig) -> Result<f64> {
    check_nbar(nbar1)?;
    check_nbar(nbar2)?;
    let a = (1.0 / ((nbar1 + 1.0) * (nbar2 + 1.0))).sqrt();
    geometric_sum(a, (ratio(nbar1) * ratio(nbar2)).sqrt(), cfg)
}

/// Overlap `Tr(ρ σ) = Σ_n p_n q_n` of two thermal states.
pub fn fock_overlap_diagonal(nbar1: f64, nbar2: f64, cfg: &FockOracleConfig) -> Result<f64> {
    check_nbar(nbar1)?;
    check_nbar(nbar2)?;
    let a = 1.0 / ((nbar1 + 1.0) * (nbar2 + 1.0));
    geometric_sum(a, ratio(nbar1) * ratio(nbar2), cfg)
}

/// `Tr √ρ = Σ_n √p_n` of a thermal state.
pub fn fock_trace_sqrt(nbar: f64, cfg: &FockOracleConfig) -> Result<f64> {
    check_nbar(nbar)?;
    geometric_sum((1.0 / (nbar + 1.0)).sqrt(), ratio(nbar).sqrt(), cfg)
}

/// Trace distance `½ Σ_n |p_n − q_n|` of two thermal states.
pub fn fock_trace_distance_diagonal(nbar1: f64, nbar2: f64, cfg: &FockOracleConfig) -> Result<f64> {
    check_nbar(nbar1)?;
    check_nbar(nbar2)?;
    let (x1, x2) = (ratio(nbar1), ratio(nbar2));
    let n = cutoff(cfg, |n| 0.5 * (x1.powi(n as i32 + 1) + x2.powi(n as i32 + 1)))?;
    let (mut p, mut q) = (1.0 / (nbar1 + 1.0), 1.0 / (nbar2 + 1.0));
    let mut sum = 0.0;
    for _ in 0..=n {
        sum += (p - q).abs();
        p *= x1;
        q *= x2;
    }
    Ok(0.5 * sum)
}
