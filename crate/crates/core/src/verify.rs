//! Verification harness: closed forms against the oracles and against each other on
//! seeded random states, reporting the largest deviation per suite.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::affinity;
use crate::discord;
use crate::error::Result;
use crate::oracle::{self, FockOracleConfig, OptimizerConfig};
use crate::par::Execution;
use crate::sampling;
use crate::states::thermal_state;
use crate::symplectic::{self, StandardForm};
use crate::tolerance::Tolerances;

/// Round-off allowed on either side of the Holevo inequalities (equal states sit on both bounds).
const HOLEVO_SLACK: f64 = 1e-12;

/// Thermal occupancies used by the Fock suite (all pairs).
pub const THERMAL_GRID: [f64; 5] = [0.0, 0.3, 1.0, 3.0, 10.0];

#[derive(Debug, Clone, Copy)]
pub struct VerifyConfig {
    pub seed: u64,
    pub trials: usize,
    pub tolerances: Tolerances,
    pub optimizer: OptimizerConfig,
    pub fock: FockOracleConfig,
    pub execution: Execution,
    /// Added to every closed-form maximal affinity before comparison; a self-test of the harness.
    pub breach: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            trials: 100,
            tolerances: Tolerances::DEFAULT,
            optimizer: OptimizerConfig::default(),
            fock: FockOracleConfig::default(),
            execution: Execution::default(),
            breach: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteResult {
    pub name: &'static str,
    pub checks: usize,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
    /// Standard form attaining the largest deviation, when the suite runs on random states.
    pub worst: Option<StandardForm>,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifySummary {
    pub seed: u64,
    pub trials: usize,
    pub suites: Vec<SuiteResult>,
}

impl VerifySummary {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(|s| s.passed)
    }
}

/// Largest deviation seen so far with the state that produced it.
struct Worst {
    checks: usize,
    dev: f64,
    at: Option<StandardForm>,
    note: Option<String>,
}

impl Worst {
    fn new() -> Self {
        Self {
            checks: 0,
            dev: 0.0,
            at: None,
            note: None,
        }
    }

    fn record(&mut self, dev: f64, at: Option<StandardForm>) {
        self.checks += 1;
        // NaN counts as the worst possible outcome.
        if dev.is_nan() || dev > self.dev {
            self.dev = if dev.is_nan() { f64::INFINITY } else { dev };
            self.at = at;
        }
    }

    fn fail(&mut self, at: Option<StandardForm>, note: String) {
        self.checks += 1;
        self.dev = f64::INFINITY;
        self.at = at;
        self.note.get_or_insert(note);
    }

    fn finish(self, name: &'static str, tolerance: f64) -> SuiteResult {
        SuiteResult {
            name,
            checks: self.checks,
            max_deviation: self.dev,
            tolerance,
            passed: self.dev <= tolerance,
            worst: self.at,
            note: self.note,
        }
    }
}

/// Per-state outcome of the random-state suites.
struct Trial {
    form: StandardForm,
    oracle: std::result::Result<(f64, f64), String>,
    v_route: Option<f64>,
    williamson: f64,
    stationarity: f64,
    squeeze_invariance: f64,
}

fn run_trial(sf: StandardForm, scaled: StandardForm, trial: usize, cfg: &VerifyConfig) -> Result<Trial> {
    let v = sf.to_cm();
    let t = symplectic::square_root_standard_form(&sf)?;
    let closed = discord::max_affinity_from_sqrt_form(&t)?;
    let perturbed = closed + cfg.breach;

    let opt = OptimizerConfig {
        seed: cfg.optimizer.seed.wrapping_add(trial as u64),
        execution: Execution::Sequential,
        ..cfg.optimizer
    };
    let oracle = match oracle::oracle_max_affinity(&v, &opt) {
        Ok(out) => Ok(((out.value - perturbed).abs(), out.value - perturbed)),
        Err(e) => Err(e.to_string()),
    };

    let v_route = discord::max_affinity_v_route_form(&sf)?.map(|a| (a - perturbed).abs() / perturbed);

    let williamson_cm = symplectic::square_root_cm(&v)?;
    let scale = williamson_cm.matrix().amax().max(1.0);
    let williamson = t.to_cm().max_abs_diff(&williamson_cm) / scale;

    let p = discord::optimal_product_params(&t)?;
    let stationarity = discord::stationarity_residuals(&t, &p)
        .iter()
        .fold(0.0_f64, |m, r| m.max(r.abs()));

    let squeeze_invariance = (discord::max_affinity(&scaled.to_cm())? - closed).abs();

    Ok(Trial {
        form: sf,
        oracle,
        v_route,
        williamson,
        stationarity,
        squeeze_invariance,
    })
}

/// Thermal-pair checks: `(affinity, overlap, Tr √ρ, Holevo violation)` deviations.
fn fock_checks(n1: f64, n2: f64, cfg: &FockOracleConfig) -> Result<[f64; 4]> {
    let (a, b) = (thermal_state(&[n1])?, thermal_state(&[n2])?);
    let gauss_aff = affinity::affinity(&a, &b)?.value;
    let fock_aff = oracle::fock_affinity_diagonal(n1, n2, cfg)?;
    let gauss_overlap = affinity::gaussian_overlap_trace(a.cm(), b.cm(), &[0.0, 0.0])?;
    let fock_overlap = oracle::fock_overlap_diagonal(n1, n2, cfg)?;
    let gauss_sqrt = affinity::trace_of_sqrt(&a)?;
    let fock_sqrt = oracle::fock_trace_sqrt(n1, cfg)?;
    let t = oracle::fock_trace_distance_diagonal(n1, n2, cfg)?;
    let violation = ((1.0 - fock_aff) - t)
        .max(t - (1.0 - fock_aff * fock_aff).sqrt())
        .max(0.0);
    Ok([
        (gauss_aff - fock_aff).abs(),
        (gauss_overlap - fock_overlap).abs(),
        (gauss_sqrt - fock_sqrt).abs() / fock_sqrt,
        violation,
    ])
}

/// Draws the `trials` random standard forms (and scaled copies) used by the harness.
pub fn random_suite(seed: u64, trials: usize) -> Vec<(StandardForm, StandardForm)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..trials)
        .map(|_| {
            let sf = sampling::random_standard_form(&mut rng, 0.5, 5.0);
            let ln = 3f64.ln();
            let scaled = StandardForm {
                s1: rng.gen_range(-ln..=ln).exp(),
                s2: rng.gen_range(-ln..=ln).exp(),
                ..sf
            };
            (sf, scaled)
        })
        .collect()
}

pub fn run_verification(cfg: &VerifyConfig) -> Result<VerifySummary> {
    let tol = cfg.tolerances;
    let suite = random_suite(cfg.seed, cfg.trials);
    let indexed: Vec<(usize, StandardForm, StandardForm)> =
        suite.into_iter().enumerate().map(|(i, (a, b))| (i, a, b)).collect();
    let trials = cfg
        .execution
        .map(&indexed, |(i, sf, scaled)| run_trial(*sf, *scaled, *i, cfg))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;

    let mut gap = Worst::new();
    let mut excess = Worst::new();
    let mut v_route = Worst::new();
    let mut williamson = Worst::new();
    let mut stationarity = Worst::new();
    let mut squeeze = Worst::new();
    for t in &trials {
        match &t.oracle {
            Ok((g, e)) => {
                gap.record(*g, Some(t.form));
                excess.record(e.max(0.0), Some(t.form));
            }
            Err(msg) => {
                gap.fail(Some(t.form), msg.clone());
                excess.fail(Some(t.form), msg.clone());
            }
        }
        if let Some(r) = t.v_route {
            v_route.record(r, Some(t.form));
        }
        williamson.record(t.williamson, Some(t.form));
        stationarity.record(t.stationarity, Some(t.form));
        squeeze.record(t.squeeze_invariance, Some(t.form));
    }

    let mut fock = [Worst::new(), Worst::new(), Worst::new(), Worst::new()];
    for &n1 in &THERMAL_GRID {
        for &n2 in &THERMAL_GRID {
            match fock_checks(n1, n2, &cfg.fock) {
                Ok(devs) => {
                    for (w, d) in fock.iter_mut().zip(devs) {
                        w.record(d, None);
                    }
                }
                Err(e) => fock
                    .iter_mut()
                    .for_each(|w| w.fail(None, format!("n̄ = ({n1}, {n2}): {e}"))),
            }
        }
    }
    let [f_aff, f_overlap, f_sqrt, f_holevo] = fock;

    Ok(VerifySummary {
        seed: cfg.seed,
        trials: cfg.trials,
        suites: vec![
            gap.finish("oracle-gap", tol.oracle_gap),
            excess.finish("oracle-excess", tol.oracle_excess),
            v_route.finish("v-route", tol.route),
            williamson.finish("sqrt-form-vs-williamson", tol.williamson),
            stationarity.finish("stationarity", tol.stationarity),
            squeeze.finish("local-squeeze-invariance", tol.route),
            f_aff.finish("fock-affinity", tol.spectral),
            f_overlap.finish("fock-overlap", tol.spectral),
            f_sqrt.finish("fock-trace-sqrt", tol.spectral),
            f_holevo.finish("holevo-sandwich", HOLEVO_SLACK),
        ],
    })
}
