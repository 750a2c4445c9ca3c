//! Numerical tolerances shared across the crate.
//!
//! The constants are the fixed thresholds used by the algebra itself. [`Tolerances`]
//! groups the thresholds used when comparing independent routes against each other
//! (verification harness, acceptance suite), with a `default` and a `strict` profile.

/// Maximum absolute asymmetry accepted for a covariance matrix.
pub const SYMMETRY: f64 = 1e-10;

/// Slack below 1/2 allowed for a symplectic eigenvalue before a matrix is unphysical.
pub const PHYSICALITY: f64 = 1e-9;

/// Relative tolerance used to pair the doubled eigenvalues of the symplectic spectrum.
pub const PAIRING: f64 = 1e-7;

/// A symplectic eigenvalue within this distance above 1/2 is snapped to exactly 1/2.
///
/// `κ ↦ κ + sqrt(κ² − ¼)` has unbounded slope at `κ = ½`, so round-off in a pure mode
/// would otherwise surface as an error of order its square root.
pub const PURE_MODE: f64 = 1e-12;

/// `x - 1/2` below this is treated as exactly zero inside the entropic function.
pub const ENTROPY_EDGE: f64 = 1e-12;

/// Negative round-off on the invariant `D` tolerated before clamping to zero.
pub const INVARIANT_CLAMP: f64 = 1e-12;

/// Max-norm difference under which two states are considered equal.
pub const STATE_EQUALITY: f64 = 1e-9;

/// Thresholds for cross-route comparisons.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// |closed form - oracle| allowed for the maximal affinity.
    pub oracle_gap: f64,
    /// Amount by which the oracle may beat the closed form.
    pub oracle_excess: f64,
    /// Relative agreement between algebraically equivalent closed forms.
    pub route: f64,
    /// Residual of the stationarity conditions at the closed-form optimum.
    pub stationarity: f64,
    /// Fock-space sums vs Gaussian formulas.
    pub spectral: f64,
    /// Relative tolerance for Williamson-based identities.
    pub williamson: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        oracle_gap: 1e-5,
        oracle_excess: 1e-7,
        route: 1e-8,
        stationarity: 1e-9,
        spectral: 1e-6,
        williamson: 1e-8,
    };

    pub const STRICT: Tolerances = Tolerances {
        oracle_gap: 1e-7,
        oracle_excess: 1e-9,
        route: 1e-10,
        stationarity: 1e-11,
        spectral: 1e-9,
        williamson: 1e-10,
    };

    /// Looks up a named profile (`default` or `strict`).
    pub fn profile(name: &str) -> Option<Tolerances> {
        match name.trim().to_ascii_lowercase().as_str() {
            "default" | "" => Some(Self::DEFAULT),
            "strict" => Some(Self::STRICT),
            _ => None,
        }
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}
