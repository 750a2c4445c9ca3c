//! Independent checks of the closed forms: a multi-start simplex search for the maximal
//! affinity over product states, and truncated Fock sums for thermal states.
//!
//! The search works on the square-root covariance matrices directly. The square-root CM of
//! the input is taken from the Williamson decomposition, and a product state is
//! parameterized by the symplectic eigenvalues `η̃_j ≥ ½` of its own square root, with
//! squeezing `r_j` and angle `φ_j`. The objective is the log-affinity of the two.

pub mod fock;
pub mod nelder_mead;

use nalgebra::Matrix4;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::affinity::log_affinity_two_mode;
use crate::discord::{one_mode_cm, ProductStateParams};
use crate::error::{Error, Result};
use crate::par::Execution;
use crate::symplectic::{self, CovarianceMatrix};

pub use fock::{
    fock_affinity_diagonal, fock_overlap_diagonal, fock_thermal_spectrum, fock_trace_distance_diagonal,
    fock_trace_sqrt, FockOracleConfig,
};
pub use nelder_mead::{minimize, Minimum, NelderMeadOptions};

/// Offset in the `η̃ = ½ + max(e^u − ε, 0)` map that keeps proposals physical.
const ETA_OFFSET: f64 = 1e-12;

/// Below this squeezing the squeeze angle has no measurable effect and is reported as 0.
const PHI_IRRELEVANT_R: f64 = 1e-2;

/// Maximum number of simplex restarts from the incumbent of a single start.
const MAX_RESTARTS: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerConfig {
    pub starts: usize,
    /// Iteration cap of each simplex run.
    pub max_iters: usize,
    pub xtol: f64,
    /// Tolerance on the negative log-affinity.
    pub ftol: f64,
    /// Sampling box for the starting `η̃`; `None` means `[½, 10 · max(κ̃1, κ̃2)]`.
    pub eta_bounds: Option<(f64, f64)>,
    pub r_bounds: (f64, f64),
    pub phi_bounds: (f64, f64),
    pub seed: u64,
    pub execution: Execution,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            starts: 32,
            max_iters: 4000,
            xtol: 1e-9,
            ftol: 1e-13,
            eta_bounds: None,
            r_bounds: (-5.0, 5.0),
            phi_bounds: (-std::f64::consts::PI, std::f64::consts::PI),
            seed: 0x5eed,
            execution: Execution::default(),
        }
    }
}

impl OptimizerConfig {
    fn validate(&self) -> Result<()> {
        let ok = self.starts >= 1
            && self.max_iters >= 1
            && self.xtol > 0.0
            && self.ftol > 0.0
            && self.r_bounds.0 <= self.r_bounds.1
            && self.phi_bounds.0 <= self.phi_bounds.1
            && self.eta_bounds.is_none_or(|(lo, hi)| lo >= 0.5 && lo <= hi);
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParams(format!(
                "invalid optimizer configuration {self:?}"
            )))
        }
    }
}

/// Result of a multi-start search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleOutcome {
    /// Best affinity found.
    pub value: f64,
    /// Maximizer in the square-root parameterization, squeeze angles folded into `(−π/2, π/2]`.
    pub params: ProductStateParams,
    /// Log-affinity gap between the best and the second-best start.
    pub spread: f64,
    pub evaluations: usize,
}

fn eta_from(u: f64) -> f64 {
    0.5 + (u.exp() - ETA_OFFSET).max(0.0)
}

fn u_from(eta: f64) -> f64 {
    (eta - 0.5 + ETA_OFFSET).ln()
}

fn product_sqrt_cm(x: &[f64; 6]) -> (Matrix4<f64>, f64) {
    let (e1, e2) = (eta_from(x[0]), eta_from(x[1]));
    let mut m = Matrix4::zeros();
    m.fixed_view_mut::<2, 2>(0, 0).copy_from(&one_mode_cm(e1, x[2], x[4]));
    m.fixed_view_mut::<2, 2>(2, 2).copy_from(&one_mode_cm(e2, x[3], x[5]));
    (m, 2.0 * (e1.ln() + e2.ln()))
}

/// Maps `(r, φ)` onto the representative with `φ ∈ (−π/2, π/2]`; `(r, φ)` and `(−r, φ ± π)`
/// describe the same one-mode state. Angles at negligible squeezing are set to 0.
pub fn fold_squeeze(r: f64, phi: f64) -> (f64, f64) {
    use std::f64::consts::{FRAC_PI_2, PI, TAU};
    let mut phi = (phi + PI).rem_euclid(TAU) - PI;
    let mut r = r;
    if phi > FRAC_PI_2 {
        phi -= PI;
        r = -r;
    } else if phi <= -FRAC_PI_2 {
        phi += PI;
        r = -r;
    }
    if r.abs() < PHI_IRRELEVANT_R {
        phi = 0.0;
    }
    (r, phi)
}

struct Run {
    f: f64,
    x: [f64; 6],
    evaluations: usize,
}

fn single_start(target: &Matrix4<f64>, log_det_target: f64, x0: [f64; 6], cfg: &OptimizerConfig) -> Run {
    let objective = |x: &[f64; 6]| {
        let (p, log_det_p) = product_sqrt_cm(x);
        -log_affinity_two_mode(target, log_det_target, &p, log_det_p)
    };
    let opts = NelderMeadOptions {
        max_iters: cfg.max_iters,
        xtol: cfg.xtol,
        ftol: cfg.ftol,
    };
    let mut step = [0.5, 0.5, 0.3, 0.3, 0.5, 0.5];
    let mut best = minimize(objective, x0, step, &opts);
    let mut evaluations = best.evaluations;
    for _ in 0..MAX_RESTARTS {
        step.iter_mut().for_each(|s| *s = (*s * 0.5).max(1e-4));
        let next = minimize(objective, best.x, step, &opts);
        evaluations += next.evaluations;
        let improved = best.f - next.f;
        if next.f < best.f {
            best = next;
        }
        if improved <= cfg.ftol && next.converged {
            break;
        }
    }
    Run {
        f: best.f,
        x: best.x,
        evaluations,
    }
}

/// Multi-start simplex maximization of the affinity between `V` and product states.
///
/// Zero mean is assumed. Fails with `NotConverged` when the two best starts disagree by
/// more than `10 · ftol` in log-affinity.
pub fn oracle_max_affinity(v: &CovarianceMatrix, cfg: &OptimizerConfig) -> Result<OracleOutcome> {
    symplectic::require_two_mode(v)?;
    cfg.validate()?;
    let sqrt_cm = symplectic::square_root_cm(v)?;
    let target = Matrix4::from_iterator(sqrt_cm.matrix().iter().copied());
    let log_det_target = sqrt_cm.det().ln();
    let kt_max = symplectic::symplectic_eigenvalues(&sqrt_cm)?.max();
    let (eta_lo, eta_hi) = cfg.eta_bounds.unwrap_or((0.5, 10.0 * kt_max));

    let runs = cfg.execution.map_indices(cfg.starts, |i| {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(i as u64);
        let x0 = [
            u_from(rng.gen_range(eta_lo..=eta_hi)),
            u_from(rng.gen_range(eta_lo..=eta_hi)),
            rng.gen_range(cfg.r_bounds.0..=cfg.r_bounds.1),
            rng.gen_range(cfg.r_bounds.0..=cfg.r_bounds.1),
            rng.gen_range(cfg.phi_bounds.0..=cfg.phi_bounds.1),
            rng.gen_range(cfg.phi_bounds.0..=cfg.phi_bounds.1),
        ];
        single_start(&target, log_det_target, x0, cfg)
    });

    let mut order: Vec<usize> = (0..runs.len()).collect();
    order.sort_by(|&a, &b| runs[a].f.total_cmp(&runs[b].f));
    let best = &runs[order[0]];
    let spread = if runs.len() > 1 { runs[order[1]].f - best.f } else { 0.0 };
    if spread > 10.0 * cfg.ftol || !best.f.is_finite() {
        return Err(Error::NotConverged { spread });
    }
    let (r1, phi1) = fold_squeeze(best.x[2], best.x[4]);
    let (r2, phi2) = fold_squeeze(best.x[3], best.x[5]);
    Ok(OracleOutcome {
        value: (-best.f).exp(),
        params: ProductStateParams::centered(eta_from(best.x[0]), eta_from(best.x[1]), r1, r2, phi1, phi2),
        spread,
        evaluations: runs.iter().map(|r| r.evaluations).sum(),
    })
}

/// Whether the oracle's optimal squeeze angles vanish (within 1e-3, after folding).
pub fn verify_phi_zero(v: &CovarianceMatrix, cfg: &OptimizerConfig) -> Result<bool> {
    let out = oracle_max_affinity(v, cfg)?;
    Ok(out.params.phi1.abs() <= 1e-3 && out.params.phi2.abs() <= 1e-3)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discord;
    use crate::states::two_mode_squeezed_vacuum;
    use crate::symplectic::StandardForm;

    fn cfg() -> OptimizerConfig {
        OptimizerConfig {
            starts: 8,
            ..OptimizerConfig::default()
        }
    }

    #[test]
    fn eta_map_stays_physical() {
        assert_eq!(eta_from(-100.0), 0.5);
        assert!((eta_from(u_from(3.0)) - 3.0).abs() < 1e-14);
        assert_eq!(eta_from(u_from(0.5)), 0.5);
    }

    #[test]
    fn folding() {
        use std::f64::consts::PI;
        let (r, phi) = fold_squeeze(0.4, 0.1);
        assert!(r == 0.4 && (phi - 0.1).abs() < 1e-15);
        let (r, phi) = fold_squeeze(0.4, PI - 1e-4);
        assert!((r + 0.4).abs() < 1e-15 && (phi + 1e-4).abs() < 1e-12);
        assert_eq!(fold_squeeze(1e-5, 1.0), (1e-5, 0.0));
    }

    #[test]
    fn product_input() {
        let v = StandardForm::new(1.5, 0.7, 0.0, 0.0).to_cm();
        let out = oracle_max_affinity(&v, &cfg()).unwrap();
        assert!((out.value - 1.0).abs() < 1e-9);
        let t = symplectic::square_root_cm(&v).unwrap();
        assert!((out.params.eta1 - t.get(0, 0)).abs() < 1e-4);
        assert!((out.params.eta2 - t.get(2, 2)).abs() < 1e-4);
    }

    #[test]
    fn symmetric_mts() {
        let v = StandardForm::new(1.5, 1.5, 1.0, 1.0).to_cm();
        let out = oracle_max_affinity(&v, &cfg()).unwrap();
        assert!((out.value - 2.0 / (3f64.sqrt() + 1.0)).abs() < 1e-7);
        assert!(out.params.r1.abs() < 1e-3 && out.params.r2.abs() < 1e-3);
        assert!(verify_phi_zero(&v, &cfg()).unwrap());
    }

    #[test]
    fn squeezed_vacuum() {
        let s = two_mode_squeezed_vacuum(0.8).unwrap();
        let out = oracle_max_affinity(s.cm(), &cfg()).unwrap();
        assert!((out.value - 1.0 / 0.8f64.cosh().powi(2)).abs() < 1e-7);
        assert!(out.params.eta1 - 0.5 < 1e-3 && out.params.eta2 - 0.5 < 1e-3);
    }

    #[test]
    fn scaled_input_angles_vanish() {
        let sf = StandardForm::scaled(2.0, 1.3, 0.9, -0.2, 1.6, 0.7);
        let v = sf.to_cm();
        let out = oracle_max_affinity(&v, &cfg()).unwrap();
        let closed = discord::max_affinity(&v).unwrap();
        assert!((out.value - closed).abs() < 1e-7 && out.value <= closed + 1e-9);
        assert!(out.params.phi1.abs() < 1e-3 && out.params.phi2.abs() < 1e-3);
        let cp = discord::closest_product_state(&StandardForm::new(2.0, 1.3, 0.9, -0.2).to_cm(), &[0.0; 4]).unwrap();
        assert!((out.params.eta1 * out.params.eta2 - cp.params.eta1 * cp.params.eta2).abs() < 1e-4);
    }

    #[test]
    fn deterministic_across_execution_modes() {
        let v = StandardForm::new(1.8, 1.1, 0.7, 0.2).to_cm();
        let seq = oracle_max_affinity(
            &v,
            &OptimizerConfig {
                execution: Execution::Sequential,
                ..cfg()
            },
        )
        .unwrap();
        let par = oracle_max_affinity(
            &v,
            &OptimizerConfig {
                execution: Execution::Parallel,
                ..cfg()
            },
        )
        .unwrap();
        assert_eq!(seq, par);
    }

    #[test]
    fn bad_config_rejected() {
        let v = StandardForm::new(1.5, 0.7, 0.0, 0.0).to_cm();
        let bad = OptimizerConfig { starts: 0, ..cfg() };
        assert!(matches!(oracle_max_affinity(&v, &bad), Err(Error::InvalidParams(_))));
    }
}
