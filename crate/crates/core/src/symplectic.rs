//! Symplectic linear algebra over quadrature covariance matrices.
//!
//! Quadratures are ordered `(q1, p1, ..., qn, pn)` and the vacuum has variance 1/2,
//! so a covariance matrix is physical iff all its symplectic eigenvalues are >= 1/2.

use nalgebra::{DMatrix, Matrix2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tolerance;

/// A 2n x 2n real symmetric matrix of quadrature second moments.
///
/// Construction only checks shape and symmetry; positivity and physicality are
/// properties queried through [`symplectic_eigenvalues`] and [`is_physical`].
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix {
    entries: DMatrix<f64>,
}

impl CovarianceMatrix {
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        let dim = entries.nrows();
        if dim == 0 || !dim.is_multiple_of(2) || entries.ncols() != dim {
            return Err(Error::BadShape(dim.max(entries.ncols())));
        }
        let asym = max_asymmetry(&entries);
        if asym.is_nan() || asym > tolerance::SYMMETRY {
            return Err(Error::NonSymmetric(asym));
        }
        // Remove the sub-tolerance asymmetry so downstream factorizations see an exact symmetric matrix.
        let sym = (&entries + entries.transpose()) * 0.5;
        Ok(Self { entries: sym })
    }

    /// Builds from row-major entries of a `dim x dim` matrix.
    pub fn from_row_slice(dim: usize, data: &[f64]) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                got: data.len(),
            });
        }
        Self::new(DMatrix::from_row_slice(dim, dim, data))
    }

    /// `value * Identity(2n)`.
    pub fn scaled_identity(modes: usize, value: f64) -> Self {
        Self {
            entries: DMatrix::identity(2 * modes, 2 * modes) * value,
        }
    }

    pub fn diagonal(diag: &[f64]) -> Result<Self> {
        Self::new(DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(diag)))
    }

    /// Block-diagonal direct sum `self ⊕ other`.
    pub fn direct_sum(&self, other: &CovarianceMatrix) -> CovarianceMatrix {
        let (a, b) = (self.dim(), other.dim());
        let mut m = DMatrix::zeros(a + b, a + b);
        m.view_mut((0, 0), (a, a)).copy_from(&self.entries);
        m.view_mut((a, a), (b, b)).copy_from(&other.entries);
        CovarianceMatrix { entries: m }
    }

    /// `S V Sᵀ`.
    pub fn congruence(&self, s: &DMatrix<f64>) -> Result<CovarianceMatrix> {
        if s.nrows() != self.dim() || s.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: s.nrows(),
            });
        }
        let m = s * &self.entries * s.transpose();
        Ok(CovarianceMatrix {
            entries: (&m + m.transpose()) * 0.5,
        })
    }

    pub fn modes(&self) -> usize {
        self.entries.nrows() / 2
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[(i, j)]
    }

    /// The 2x2 block coupling modes `i` and `j` (0-based).
    pub fn block(&self, i: usize, j: usize) -> Matrix2<f64> {
        let m = &self.entries;
        Matrix2::new(
            m[(2 * i, 2 * j)],
            m[(2 * i, 2 * j + 1)],
            m[(2 * i + 1, 2 * j)],
            m[(2 * i + 1, 2 * j + 1)],
        )
    }

    pub fn det(&self) -> f64 {
        det(&self.entries)
    }

    /// Max-norm distance between entries.
    pub fn max_abs_diff(&self, other: &CovarianceMatrix) -> f64 {
        if self.dim() != other.dim() {
            return f64::INFINITY;
        }
        (&self.entries - &other.entries).amax()
    }

    pub fn is_finite(&self) -> bool {
        self.entries.iter().all(|x| x.is_finite())
    }

    /// Row-major copy of the entries.
    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim())
            .map(|i| self.entries.row(i).iter().copied().collect())
            .collect()
    }
}

fn max_asymmetry(m: &DMatrix<f64>) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in (i + 1)..m.ncols() {
            let d = (m[(i, j)] - m[(j, i)]).abs();
            if d.is_nan() {
                return f64::NAN;
            }
            worst = worst.max(d);
        }
    }
    worst
}

/// Determinant; explicit cofactor expansion for 2x2 and 4x4, LU otherwise.
pub fn det(m: &DMatrix<f64>) -> f64 {
    match m.nrows() {
        1 => m[(0, 0)],
        2 => det2(m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]),
        4 => det4(m),
        _ => m.clone().lu().determinant(),
    }
}

#[inline]
pub(crate) fn det2(a: f64, b: f64, c: f64, d: f64) -> f64 {
    a * d - b * c
}

/// Laplace expansion along the first two rows (complementary 2x2 minors).
pub(crate) fn det4(m: &DMatrix<f64>) -> f64 {
    let e = |i: usize, j: usize| m[(i, j)];
    let minor_top = |a: usize, b: usize| e(0, a) * e(1, b) - e(0, b) * e(1, a);
    let minor_bot = |a: usize, b: usize| e(2, a) * e(3, b) - e(2, b) * e(3, a);
    minor_top(0, 1) * minor_bot(2, 3) - minor_top(0, 2) * minor_bot(1, 3)
        + minor_top(0, 3) * minor_bot(1, 2)
        + minor_top(1, 2) * minor_bot(0, 3)
        - minor_top(1, 3) * minor_bot(0, 2)
        + minor_top(2, 3) * minor_bot(0, 1)
}

/// The block-diagonal symplectic form `J = ⊕ [[0, 1], [-1, 0]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticForm {
    modes: usize,
    matrix: DMatrix<f64>,
}

impl SymplecticForm {
    pub fn new(modes: usize) -> Self {
        let mut j = DMatrix::zeros(2 * modes, 2 * modes);
        for k in 0..modes {
            j[(2 * k, 2 * k + 1)] = 1.0;
            j[(2 * k + 1, 2 * k)] = -1.0;
        }
        Self { modes, matrix: j }
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }
}

/// Symplectic eigenvalues, sorted descending.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymplecticSpectrum {
    pub kappas: Vec<f64>,
}

impl SymplecticSpectrum {
    pub fn min(&self) -> f64 {
        self.kappas.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.kappas.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// `∏ κ_j²`, which equals `det V`.
    pub fn product_squared(&self) -> f64 {
        self.kappas.iter().map(|k| k * k).product()
    }

    pub fn is_physical(&self) -> bool {
        self.min() >= 0.5 - tolerance::PHYSICALITY
    }
}

/// Symplectic eigenvalues of `V` from the spectrum of the antisymmetric matrix `Lᵀ J L`,
/// where `V = L Lᵀ` is the Cholesky factorization. The singular values of that matrix
/// are the moduli of the eigenvalues of `iJV`, each appearing twice.
pub fn symplectic_eigenvalues(v: &CovarianceMatrix) -> Result<SymplecticSpectrum> {
    let chol = v.matrix().clone().cholesky().ok_or(Error::NotPositiveDefinite)?;
    let l = chol.l();
    let j = SymplecticForm::new(v.modes());
    let a = l.transpose() * j.matrix() * &l;
    let gram = a.transpose() * &a;
    let eig = nalgebra::SymmetricEigen::new(gram);
    let mut squares: Vec<f64> = eig.eigenvalues.iter().map(|x| x.max(0.0)).collect();
    squares.sort_by(|x, y| y.total_cmp(x));
    let mut kappas = Vec::with_capacity(v.modes());
    for pair in squares.chunks(2) {
        let (hi, lo) = (pair[0].sqrt(), pair[1].sqrt());
        let scale = hi.max(f64::MIN_POSITIVE);
        if (hi - lo) / scale > tolerance::PAIRING {
            return Err(Error::NotPositiveDefinite);
        }
        kappas.push(snap_pure((hi * lo).sqrt()));
    }
    Ok(SymplecticSpectrum { kappas })
}

/// Robertson-Schrödinger test: every symplectic eigenvalue is at least 1/2 (within tolerance).
///
/// Matrices that are not positive definite are reported as unphysical.
pub fn is_physical(v: &CovarianceMatrix) -> bool {
    match symplectic_eigenvalues(v) {
        Ok(spec) => spec.is_physical(),
        Err(_) => false,
    }
}

/// Checks physicality and returns the spectrum, or `NotPhysical`.
pub fn require_physical(v: &CovarianceMatrix) -> Result<SymplecticSpectrum> {
    let spec = symplectic_eigenvalues(v).map_err(|e| match e {
        Error::NotPositiveDefinite => Error::NotPhysical(f64::NAN),
        other => other,
    })?;
    if spec.is_physical() {
        Ok(spec)
    } else {
        Err(Error::NotPhysical(spec.min()))
    }
}

/// `V = S · diag(κ_1, κ_1, ..., κ_n, κ_n) · Sᵀ` with `S` symplectic.
#[derive(Debug, Clone)]
pub struct WilliamsonDecomposition {
    pub symplectic: DMatrix<f64>,
    pub spectrum: SymplecticSpectrum,
}

impl WilliamsonDecomposition {
    /// Reassembles `S · diag(f(κ_j) σ0) · Sᵀ`.
    pub fn reassemble(&self, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
        let diag: Vec<f64> = self
            .spectrum
            .kappas
            .iter()
            .flat_map(|&k| {
                let v = f(k);
                [v, v]
            })
            .collect();
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag));
        let m = &self.symplectic * d * self.symplectic.transpose();
        (&m + m.transpose()) * 0.5
    }
}

/// Williamson normal form.
///
/// With `V = L Lᵀ`, the antisymmetric `K = L⁻¹ J L⁻ᵀ` is brought to the real block form
/// `Oᵀ K O = ⊕ (1/κ_j) J_k` by an orthogonal `O`; then `S = L O diag(κ_j^{-1/2})`.
pub fn williamson(v: &CovarianceMatrix) -> Result<WilliamsonDecomposition> {
    let dim = v.dim();
    let chol = v.matrix().clone().cholesky().ok_or(Error::NotPositiveDefinite)?;
    let l = chol.l();
    let l_inv = l
        .clone()
        .solve_lower_triangular(&DMatrix::identity(dim, dim))
        .ok_or(Error::NotPositiveDefinite)?;
    let j = SymplecticForm::new(v.modes());
    let k = &l_inv * j.matrix() * l_inv.transpose();
    let gram = k.transpose() * &k;
    let eig = nalgebra::SymmetricEigen::new(gram);

    let mut remaining: Vec<nalgebra::DVector<f64>> =
        (0..dim).map(|i| eig.eigenvectors.column(i).into_owned()).collect();
    let mut chosen: Vec<nalgebra::DVector<f64>> = Vec::with_capacity(dim);
    let mut blocks: Vec<(f64, usize)> = Vec::with_capacity(v.modes());

    for _ in 0..v.modes() {
        // Greedy pick of the eigenvector with the largest component outside the span so far.
        let (best, _) = remaining
            .iter()
            .enumerate()
            .map(|(i, e)| (i, project_out(e, &chosen).norm()))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .ok_or(Error::NotPositiveDefinite)?;
        let e = remaining.swap_remove(best);
        let mut u = project_out(&e, &chosen);
        u /= u.norm();
        let ku = &k * &u;
        let a = ku.norm();
        if a <= 0.0 || !a.is_finite() {
            return Err(Error::NotPositiveDefinite);
        }
        let mut w = -ku / a;
        w = project_out(&w, &chosen);
        w -= &u * u.dot(&w);
        w /= w.norm();
        blocks.push((a, chosen.len()));
        chosen.push(u);
        chosen.push(w);
    }

    // Smallest 1/κ first, so κ is descending.
    blocks.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut o = DMatrix::zeros(dim, dim);
    let mut scale = Vec::with_capacity(dim);
    let mut kappas = Vec::with_capacity(v.modes());
    for (col, &(a, idx)) in blocks.iter().enumerate() {
        o.set_column(2 * col, &chosen[idx]);
        o.set_column(2 * col + 1, &chosen[idx + 1]);
        scale.push(a.sqrt());
        scale.push(a.sqrt());
        kappas.push(1.0 / a);
    }
    let s = l * o * DMatrix::from_diagonal(&nalgebra::DVector::from_vec(scale));
    Ok(WilliamsonDecomposition {
        symplectic: s,
        spectrum: SymplecticSpectrum { kappas },
    })
}

fn project_out(v: &nalgebra::DVector<f64>, basis: &[nalgebra::DVector<f64>]) -> nalgebra::DVector<f64> {
    let mut r = v.clone();
    for b in basis {
        r -= b * b.dot(&r);
    }
    r
}

/// Maps eigenvalues within round-off of the pure value onto exactly 1/2.
pub fn snap_pure(kappa: f64) -> f64 {
    if (0.5 - tolerance::PHYSICALITY..=0.5 + tolerance::PURE_MODE).contains(&kappa) {
        0.5
    } else {
        kappa
    }
}

/// `κ + sqrt(κ² - 1/4)`: symplectic eigenvalue of the square-root state.
pub fn sqrt_state_eigenvalue(kappa: f64) -> f64 {
    let kappa = snap_pure(kappa);
    kappa + (kappa * kappa - 0.25).max(0.0).sqrt()
}

/// Inverse of [`sqrt_state_eigenvalue`]: `(κ̃² + 1/4) / (2κ̃)`.
pub fn eigenvalue_from_sqrt_state(kappa_tilde: f64) -> f64 {
    (kappa_tilde * kappa_tilde + 0.25) / (2.0 * kappa_tilde)
}

/// Covariance matrix of the normalized square-root state `√ρ / Tr √ρ`.
///
/// Same symplectic frame as `V`, with each κ replaced by `κ + sqrt(κ² - 1/4)`.
pub fn square_root_cm(v: &CovarianceMatrix) -> Result<CovarianceMatrix> {
    let spec = require_physical(v)?;
    if v.modes() == 1 {
        // One mode: V = κ S Sᵀ, so the square-root CM is a rescaling.
        let kappa = spec.kappas[0];
        let ratio = sqrt_state_eigenvalue(kappa) / kappa;
        return Ok(CovarianceMatrix {
            entries: v.matrix() * ratio,
        });
    }
    let w = williamson(v)?;
    Ok(CovarianceMatrix {
        entries: w.reassemble(sqrt_state_eigenvalue),
    })
}

/// Right-hand side of `V = ½(Ṽ − ¼ J Ṽ⁻¹ J)`; recovers `V` from the square-root CM.
pub fn cm_from_square_root(vt: &CovarianceMatrix) -> Result<CovarianceMatrix> {
    let j = SymplecticForm::new(vt.modes());
    let inv = vt.matrix().clone().try_inverse().ok_or(Error::NotPositiveDefinite)?;
    let m = (vt.matrix() - j.matrix() * inv * j.matrix() * 0.25) * 0.5;
    CovarianceMatrix::new((&m + m.transpose()) * 0.5)
}

/// Scaled two-mode standard form: diagonal blocks `diag(b_j s_j, b_j / s_j)`,
/// cross block `diag(c √(s1 s2), d / √(s1 s2))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StandardForm {
    pub b1: f64,
    pub b2: f64,
    pub c: f64,
    pub d: f64,
    pub s1: f64,
    pub s2: f64,
}

impl StandardForm {
    /// Unscaled standard form (`s1 = s2 = 1`).
    pub fn new(b1: f64, b2: f64, c: f64, d: f64) -> Self {
        Self::scaled(b1, b2, c, d, 1.0, 1.0)
    }

    pub fn scaled(b1: f64, b2: f64, c: f64, d: f64, s1: f64, s2: f64) -> Self {
        Self { b1, b2, c, d, s1, s2 }
    }

    /// Symmetric (`b1 = b2 = b`) unscaled form.
    pub fn symmetric(b: f64, c: f64, d: f64) -> Self {
        Self::new(b, b, c, d)
    }

    /// Checks the parameter conventions `b_j >= 1/2`, `c >= |d|`, `s_j > 0` and physicality.
    pub fn validate(&self) -> Result<()> {
        let vals = [self.b1, self.b2, self.c, self.d, self.s1, self.s2];
        if vals.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParams("non-finite standard-form entry".into()));
        }
        if self.s1 <= 0.0 || self.s2 <= 0.0 {
            return Err(Error::InvalidParams("scale factors must be positive".into()));
        }
        if self.b1 < 0.5 - tolerance::PHYSICALITY || self.b2 < 0.5 - tolerance::PHYSICALITY {
            return Err(Error::NotPhysical(self.b1.min(self.b2)));
        }
        if self.c < self.d.abs() - tolerance::PHYSICALITY {
            return Err(Error::InvalidParams(format!(
                "standard form requires c >= |d| (c = {}, d = {})",
                self.c, self.d
            )));
        }
        let (k1, k2) = self.spectrum()?;
        if k2 < 0.5 - tolerance::PHYSICALITY || !k1.is_finite() {
            return Err(Error::NotPhysical(k2));
        }
        Ok(())
    }

    /// Rebuilds the 4x4 covariance matrix.
    pub fn to_cm(&self) -> CovarianceMatrix {
        let r = (self.s1 * self.s2).sqrt();
        let mut m = DMatrix::zeros(4, 4);
        m[(0, 0)] = self.b1 * self.s1;
        m[(1, 1)] = self.b1 / self.s1;
        m[(2, 2)] = self.b2 * self.s2;
        m[(3, 3)] = self.b2 / self.s2;
        m[(0, 2)] = self.c * r;
        m[(2, 0)] = self.c * r;
        m[(1, 3)] = self.d / r;
        m[(3, 1)] = self.d / r;
        CovarianceMatrix { entries: m }
    }

    /// `det V = (b1 b2 − c²)(b1 b2 − d²)`.
    pub fn det(&self) -> f64 {
        let bb = self.b1 * self.b2;
        (bb - self.c * self.c) * (bb - self.d * self.d)
    }

    /// `Δ = b1² + b2² + 2cd`, the second symplectic invariant.
    pub fn delta(&self) -> f64 {
        self.b1 * self.b1 + self.b2 * self.b2 + 2.0 * self.c * self.d
    }

    /// Two-mode symplectic eigenvalues `(κ1 >= κ2)` from `det V` and `Δ`.
    pub fn spectrum(&self) -> Result<(f64, f64)> {
        let bb = self.b1 * self.b2;
        if !(self.b1 > 0.0 && self.b2 > 0.0 && bb > self.c * self.c && bb > self.d * self.d) {
            return Err(Error::NotPositiveDefinite);
        }
        Ok(two_mode_spectrum(self.det(), self.delta()))
    }

    /// Same state with `d → −d` (partial transposition in standard form).
    pub fn partial_transpose(&self) -> Self {
        Self { d: -self.d, ..*self }
    }

    /// Drops the local scale factors.
    pub fn unscaled(&self) -> Self {
        Self {
            s1: 1.0,
            s2: 1.0,
            ..*self
        }
    }

    pub fn max_abs_diff(&self, other: &StandardForm) -> f64 {
        [
            self.b1 - other.b1,
            self.b2 - other.b2,
            self.c - other.c,
            self.d - other.d,
            self.s1 - other.s1,
            self.s2 - other.s2,
        ]
        .iter()
        .fold(0.0_f64, |m, x| m.max(x.abs()))
    }
}

/// `κ±² = (Δ ± sqrt(Δ² − 4 det V)) / 2` for a two-mode CM.
pub fn two_mode_spectrum(det: f64, delta: f64) -> (f64, f64) {
    let disc = (delta * delta - 4.0 * det).max(0.0).sqrt();
    let hi = 0.5 * (delta + disc);
    // lo via det/hi avoids cancellation
    let lo = if hi > 0.0 { det / hi } else { 0.0 };
    (snap_pure(hi.max(0.0).sqrt()), snap_pure(lo.max(0.0).sqrt()))
}

/// Local symplectic invariants of a two-mode CM: `det V1`, `det V2`, `det C`, `det V`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalInvariants {
    pub det_a: f64,
    pub det_b: f64,
    pub det_c: f64,
    pub det_v: f64,
}

impl LocalInvariants {
    pub fn of(v: &CovarianceMatrix) -> Result<Self> {
        require_two_mode(v)?;
        let (a, b, c) = (v.block(0, 0), v.block(1, 1), v.block(0, 1));
        Ok(Self {
            det_a: a.determinant(),
            det_b: b.determinant(),
            det_c: c.determinant(),
            det_v: v.det(),
        })
    }

    /// `Δ = det V1 + det V2 + 2 det C`.
    pub fn delta(&self) -> f64 {
        self.det_a + self.det_b + 2.0 * self.det_c
    }
}

pub(crate) fn require_two_mode(v: &CovarianceMatrix) -> Result<()> {
    if v.modes() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            got: v.dim(),
        });
    }
    Ok(())
}

/// Reduces a physical two-mode CM to its (unscaled) standard form.
///
/// Goes through [`local_standardization`]; the singular values of the normalized cross
/// block stay well conditioned when `c ≈ |d|`.
pub fn standard_form(v: &CovarianceMatrix) -> Result<StandardForm> {
    Ok(local_standardization(v)?.form)
}

/// Standard form from the local invariants `det V1`, `det V2`, `det C` and `det V` alone.
///
/// `c² ≥ d²` are the roots of `t² − σ t + (det C)² = 0` with
/// `σ = (b1² b2² + (det C)² − det V) / (b1 b2)`, and `sign d = sign det C`.
/// The double root at `c = |d|` costs about half the working precision there.
pub fn standard_form_from_invariants(v: &CovarianceMatrix) -> Result<StandardForm> {
    require_two_mode(v)?;
    require_physical(v)?;
    let inv = LocalInvariants::of(v)?;
    let b1 = inv.det_a.sqrt();
    let b2 = inv.det_b.sqrt();
    let bb = b1 * b2;
    let p = inv.det_c;
    let sum = (bb * bb + p * p - inv.det_v) / bb;
    let scale = bb * bb;
    if sum < -1e-12 * scale.max(1.0) {
        return Err(Error::DegenerateBlocks(sum));
    }
    let sum = sum.max(0.0);
    if p.abs() <= 1e-15 * scale.max(1.0) {
        return Ok(StandardForm::new(b1, b2, sum.sqrt(), 0.0));
    }
    let disc = sum * sum - 4.0 * p * p;
    if disc < -1e-10 * (sum * sum).max(1e-300) {
        return Err(Error::DegenerateBlocks(disc));
    }
    let c_sq = 0.5 * (sum + disc.max(0.0).sqrt());
    let d_sq = if c_sq > 0.0 { p * p / c_sq } else { 0.0 };
    Ok(StandardForm::new(b1, b2, c_sq.sqrt(), d_sq.sqrt().copysign(p)))
}

/// A local symplectic `L = L1 ⊕ L2` with `L V Lᵀ` in unscaled standard form.
#[derive(Debug, Clone)]
pub struct LocalStandardization {
    pub form: StandardForm,
    pub transform: DMatrix<f64>,
}

impl LocalStandardization {
    /// Maps a CM given in the standard-form frame back to the original frame: `L⁻¹ W L⁻ᵀ`.
    pub fn to_original_frame(&self, w: &CovarianceMatrix) -> Result<CovarianceMatrix> {
        let inv = self.transform.clone().try_inverse().ok_or(Error::NotPositiveDefinite)?;
        w.congruence(&inv)
    }

    /// Maps a mean vector given in the original frame into the standard-form frame.
    pub fn mean_to_standard_frame(&self, mean: &[f64]) -> Vec<f64> {
        let v = nalgebra::DVector::from_column_slice(mean);
        (&self.transform * v).iter().copied().collect()
    }
}

/// Constructs the local symplectic transformation reaching standard form explicitly:
/// each diagonal block is normalized to `b_j I` by `sqrt(b_j) V_j^{-1/2}`, then the
/// cross block is diagonalized by a pair of rotations (signed SVD).
pub fn local_standardization(v: &CovarianceMatrix) -> Result<LocalStandardization> {
    require_two_mode(v)?;
    require_physical(v)?;
    let normalize = |blk: Matrix2<f64>| -> Result<(f64, Matrix2<f64>)> {
        let b = blk.determinant().sqrt();
        let eig = nalgebra::SymmetricEigen::new(blk);
        if eig.eigenvalues.iter().any(|x| *x <= 0.0) {
            return Err(Error::NotPositiveDefinite);
        }
        let inv_sqrt = eig.eigenvectors
            * Matrix2::from_diagonal(&eig.eigenvalues.map(|x| 1.0 / x.sqrt()))
            * eig.eigenvectors.transpose();
        Ok((b, inv_sqrt * b.sqrt()))
    };
    let (b1, n1) = normalize(v.block(0, 0))?;
    let (b2, n2) = normalize(v.block(1, 1))?;
    let cross = n1 * v.block(0, 1) * n2.transpose();
    let svd = cross.svd(true, true);
    let mut u = svd.u.ok_or(Error::NotPositiveDefinite)?;
    let mut vt = svd.v_t.ok_or(Error::NotPositiveDefinite)?;
    let mut sv = svd.singular_values;
    if sv[0] < sv[1] {
        u.swap_columns(0, 1);
        vt.swap_rows(0, 1);
        sv.swap_rows(0, 1);
    }
    let (c, mut d) = (sv[0], sv[1]);
    if u.determinant() < 0.0 {
        u.column_mut(1).neg_mut();
        d = -d;
    }
    if vt.determinant() < 0.0 {
        vt.row_mut(1).neg_mut();
        d = -d;
    }
    let l1 = u.transpose() * n1;
    let l2 = vt * n2;
    let mut t = DMatrix::zeros(4, 4);
    t.view_mut((0, 0), (2, 2)).copy_from(&l1);
    t.view_mut((2, 2), (2, 2)).copy_from(&l2);
    Ok(LocalStandardization {
        form: StandardForm::new(b1, b2, c, d),
        transform: t,
    })
}

/// Symplectic invariants of a two-mode state.
///
/// `K = κ1 sqrt(κ2² − ¼) + κ2 sqrt(κ1² − ¼)`, `L = 4 κ1 κ2 κ̃1 κ̃2`,
/// `M1 = (κ1 − ½)(κ2 + ½)`, `M2 = (κ1 + ½)(κ2 − ½)`,
/// `N1 = (κ1 + ½)(κ2 + ½)`, `N2 = (κ1 − ½)(κ2 − ½)`, `D = M1 M2 = N1 N2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymplecticInvariants {
    pub k: f64,
    pub l: f64,
    pub m1: f64,
    pub m2: f64,
    pub n1: f64,
    pub n2: f64,
    /// `D` from the spectrum (`M1 M2`).
    pub d: f64,
    /// `D` from `det V − ¼ Δ + 1/16`.
    pub d_direct: f64,
}

impl SymplecticInvariants {
    pub fn from_spectrum(k1: f64, k2: f64) -> Self {
        let r1 = (k1 * k1 - 0.25).max(0.0).sqrt();
        let r2 = (k2 * k2 - 0.25).max(0.0).sqrt();
        let m1 = ((k1 - 0.5) * (k2 + 0.5)).max(0.0);
        let m2 = ((k1 + 0.5) * (k2 - 0.5)).max(0.0);
        let n1 = (k1 + 0.5) * (k2 + 0.5);
        let n2 = ((k1 - 0.5) * (k2 - 0.5)).max(0.0);
        let d = m1 * m2;
        Self {
            k: k1 * r2 + k2 * r1,
            l: 4.0 * k1 * k2 * (k1 + r1) * (k2 + r2),
            m1,
            m2,
            n1,
            n2,
            d,
            d_direct: d,
        }
    }

    /// `½(√M1 + √M2)(√N1 + √N2)`, an alternative evaluation of `K`.
    pub fn k_factored(&self) -> f64 {
        0.5 * (self.m1.sqrt() + self.m2.sqrt()) * (self.n1.sqrt() + self.n2.sqrt())
    }

    /// Relative disagreement between the two evaluations of `D`.
    pub fn d_mismatch(&self) -> f64 {
        (self.d - self.d_direct).abs() / self.n1.max(1.0).powi(2)
    }
}

/// Invariants of a physical two-mode CM; the spectrum comes from the general eigen route.
pub fn invariants(v: &CovarianceMatrix) -> Result<SymplecticInvariants> {
    require_two_mode(v)?;
    let spec = require_physical(v)?;
    let loc = LocalInvariants::of(v)?;
    let mut inv = SymplecticInvariants::from_spectrum(spec.kappas[0], spec.kappas[1]);
    inv.d_direct = loc.det_v - 0.25 * loc.delta() + 1.0 / 16.0;
    Ok(inv)
}

/// Closed-form scaled standard form of the square-root state of a standard-form CM.
///
/// Both modes pure (`K = 0`) is the fixed point: the form is returned unchanged.
pub fn square_root_standard_form(sf: &StandardForm) -> Result<StandardForm> {
    let (k1, k2) = sf.spectrum()?;
    if k2 < 0.5 - tolerance::PHYSICALITY {
        return Err(Error::NotPhysical(k2));
    }
    if k1 == 0.5 {
        return Ok(*sf);
    }
    let inv = SymplecticInvariants::from_spectrum(k1, k2);
    let pre = 1.0 / (4.0 * k1 * k2 * inv.k);
    let StandardForm { b1, b2, c, d, s1, s2 } = *sf;
    let bb = b1 * b2;
    let (gc, gd) = (bb - c * c, bb - d * d);
    let q1 = (b1 * inv.l - b2 * gc) * pre * s1;
    let p1 = (b1 * inv.l - b2 * gd) * pre / s1;
    let q2 = (b2 * inv.l - b1 * gc) * pre * s2;
    let p2 = (b2 * inv.l - b1 * gd) * pre / s2;
    let (tb1, ts1) = ((q1 * p1).sqrt(), (q1 / p1).sqrt());
    let (tb2, ts2) = ((q2 * p2).sqrt(), (q2 / p2).sqrt());
    let root_s = (s1 * s2).sqrt();
    let root_ts = (ts1 * ts2).sqrt();
    let tc = (c * inv.l + d * gc) * pre * root_s / root_ts;
    let td = (d * inv.l + c * gd) * pre / root_s * root_ts;
    Ok(StandardForm::scaled(tb1, tb2, tc, td, ts1, ts2))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn approx(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
    }

    #[test]
    fn vacuum_spectrum() {
        let v = CovarianceMatrix::scaled_identity(2, 0.5);
        let s = symplectic_eigenvalues(&v).unwrap();
        assert!(approx(s.kappas[0], 0.5, 1e-12) && approx(s.kappas[1], 0.5, 1e-12));
    }

    #[test]
    fn thermal_times_vacuum_spectrum() {
        let v = CovarianceMatrix::diagonal(&[2.5, 2.5, 0.5, 0.5]).unwrap();
        let s = symplectic_eigenvalues(&v).unwrap();
        assert!(approx(s.kappas[0], 2.5, 1e-12));
        assert!(approx(s.kappas[1], 0.5, 1e-12));
    }

    #[test]
    fn squeezed_vacuum_is_pure() {
        let r: f64 = 0.7;
        let b = 0.5 * (2.0 * r).cosh();
        let c = 0.5 * (2.0 * r).sinh();
        let v = StandardForm::new(b, b, c, -c).to_cm();
        let s = symplectic_eigenvalues(&v).unwrap();
        assert!(approx(s.kappas[0], 0.5, 1e-9), "{:?}", s);
        assert!(approx(s.kappas[1], 0.5, 1e-9), "{:?}", s);
    }

    #[test]
    fn physicality_examples() {
        assert!(is_physical(&CovarianceMatrix::scaled_identity(2, 0.5)));
        assert!(!is_physical(&CovarianceMatrix::scaled_identity(1, 0.4)));
        assert!(!is_physical(&CovarianceMatrix::diagonal(&[-1.0, 1.0]).unwrap()));
    }

    #[test]
    fn rejects_asymmetric_and_odd_shapes() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 0.1, 0.0, 1.0]);
        assert!(matches!(CovarianceMatrix::new(m), Err(Error::NonSymmetric(_))));
        let m = DMatrix::<f64>::identity(3, 3);
        assert!(matches!(CovarianceMatrix::new(m), Err(Error::BadShape(3))));
    }

    #[test]
    fn not_positive_definite_is_an_error() {
        let v = CovarianceMatrix::diagonal(&[1.0, -1.0, 1.0, 1.0]).unwrap();
        assert_eq!(symplectic_eigenvalues(&v), Err(Error::NotPositiveDefinite));
    }

    #[test]
    fn cofactor_determinant_matches_lu() {
        let m = DMatrix::from_row_slice(
            4,
            4,
            &[
                2.0, 0.3, -0.1, 0.5, 0.3, 1.7, 0.2, 0.0, -0.1, 0.2, 3.0, 0.4, 0.5, 0.0, 0.4, 1.1,
            ],
        );
        let lu = m.clone().lu().determinant();
        assert!(approx(det4(&m), lu, 1e-13));
    }

    #[test]
    fn square_root_fixed_point_and_thermal() {
        let vac = CovarianceMatrix::scaled_identity(2, 0.5);
        let t = square_root_cm(&vac).unwrap();
        assert!(t.max_abs_diff(&vac) < 1e-12);

        let th = CovarianceMatrix::scaled_identity(1, 2.5);
        let t = square_root_cm(&th).unwrap();
        let expected = 2.5 + 6.0_f64.sqrt();
        assert!(approx(t.get(0, 0), expected, 1e-12));
        assert!(approx(t.get(1, 1), expected, 1e-12));
        assert!(approx(expected, 4.94949, 1e-6));
    }

    #[test]
    fn square_root_two_mode_thermal_equal_kappas() {
        // Degenerate spectrum exercises the Williamson eigenvector pairing.
        let th = CovarianceMatrix::scaled_identity(2, 1.5);
        let t = square_root_cm(&th).unwrap();
        let expected = 1.5 + 2.0_f64.sqrt();
        assert!(t.max_abs_diff(&CovarianceMatrix::scaled_identity(2, expected)) < 1e-12);
    }

    #[test]
    fn square_root_standard_form_matches_williamson() {
        let sf = StandardForm::new(1.5, 1.2, 0.6, -0.4);
        sf.validate().unwrap();
        let closed = square_root_standard_form(&sf).unwrap().to_cm();
        let will = square_root_cm(&sf.to_cm()).unwrap();
        assert!(closed.max_abs_diff(&will) < 1e-8 * will.matrix().amax());
    }

    #[test]
    fn square_root_consistency_identity() {
        let sf = StandardForm::scaled(2.0, 1.3, 0.9, 0.2, 1.4, 0.8);
        let v = sf.to_cm();
        let vt = square_root_cm(&v).unwrap();
        let back = cm_from_square_root(&vt).unwrap();
        assert!(back.max_abs_diff(&v) < 1e-10);
    }

    #[test]
    fn pure_state_square_root_standard_form_is_identity() {
        let r: f64 = 0.4;
        let sf = StandardForm::new(
            0.5 * (2.0 * r).cosh(),
            0.5 * (2.0 * r).cosh(),
            0.5 * (2.0 * r).sinh(),
            -0.5 * (2.0 * r).sinh(),
        );
        let t = square_root_standard_form(&sf).unwrap();
        assert!(t.max_abs_diff(&sf) < 1e-12);
    }

    #[test]
    fn unscaled_sts_and_mts_stay_unscaled() {
        for sf in [
            StandardForm::new(2.0, 1.4, 1.1, -1.1),
            StandardForm::new(2.0, 1.4, 0.7, 0.7),
        ] {
            let t = square_root_standard_form(&sf).unwrap();
            assert!((t.s1 - 1.0).abs() < 1e-12 && (t.s2 - 1.0).abs() < 1e-12, "{t:?}");
        }
        let t = square_root_standard_form(&StandardForm::new(2.0, 1.4, 1.1, 0.3)).unwrap();
        assert!((t.s1 - 1.0).abs() > 1e-6);
    }

    #[test]
    fn standard_form_of_product_thermal() {
        let v = CovarianceMatrix::diagonal(&[1.5, 1.5, 0.7, 0.7]).unwrap();
        let sf = standard_form(&v).unwrap();
        assert!(sf.max_abs_diff(&StandardForm::new(1.5, 0.7, 0.0, 0.0)) < 1e-12);
    }

    #[test]
    fn standard_form_of_mts_example() {
        // κ = (2.5, 0.5), θ = π/2
        let v = StandardForm::new(1.5, 1.5, 1.0, 1.0).to_cm();
        let sf = standard_form(&v).unwrap();
        assert!(sf.max_abs_diff(&StandardForm::new(1.5, 1.5, 1.0, 1.0)) < 1e-9);
    }

    #[test]
    fn standard_form_rejects_unphysical() {
        let v = CovarianceMatrix::scaled_identity(2, 0.4);
        assert!(matches!(standard_form(&v), Err(Error::NotPhysical(_))));
        let v = CovarianceMatrix::scaled_identity(1, 0.7);
        assert!(matches!(standard_form(&v), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn local_standardization_rotated_input() {
        let sf = StandardForm::new(2.0, 1.5, 0.9, -0.9);
        let rot = |t: f64| Matrix2::new(t.cos(), -t.sin(), t.sin(), t.cos());
        let sq = |r: f64| Matrix2::new(r.exp(), 0.0, 0.0, (-r).exp());
        let mut s = DMatrix::zeros(4, 4);
        s.view_mut((0, 0), (2, 2)).copy_from(&(rot(0.7) * sq(0.3)));
        s.view_mut((2, 2), (2, 2)).copy_from(&(sq(-0.2) * rot(-1.1)));
        let v = sf.to_cm().congruence(&s).unwrap();
        let ls = local_standardization(&v).unwrap();
        assert!(ls.form.max_abs_diff(&sf) < 1e-9, "{:?}", ls.form);
        let back = v.congruence(&ls.transform).unwrap();
        assert!(back.max_abs_diff(&ls.form.to_cm()) < 1e-9);
        assert!(standard_form(&v).unwrap().max_abs_diff(&sf) < 1e-9);
        let inv = standard_form_from_invariants(&v).unwrap();
        assert!(inv.max_abs_diff(&sf) < 1e-7);
    }

    #[test]
    fn invariant_examples() {
        let i = invariants(&CovarianceMatrix::scaled_identity(2, 0.5)).unwrap();
        assert_eq!((i.m1, i.m2, i.n2, i.d, i.k), (0.0, 0.0, 0.0, 0.0, 0.0));
        assert!(approx(i.n1, 1.0, 1e-12));

        let i = SymplecticInvariants::from_spectrum(2.5, 0.5);
        assert!(approx(i.m1, 2.0, 1e-15) && i.m2 == 0.0 && i.d == 0.0);
        assert!(approx(i.n1, 3.0, 1e-15) && i.n2 == 0.0);
        assert!(approx(i.k, 6.0_f64.sqrt() / 2.0, 1e-15));

        let i = SymplecticInvariants::from_spectrum(1.5, 1.5);
        assert!(approx(i.m1, 2.0, 1e-15) && approx(i.m2, 2.0, 1e-15));
        assert!(approx(i.n1, 4.0, 1e-15) && approx(i.n2, 1.0, 1e-15));
        assert!(approx(i.d, 4.0, 1e-15));
        assert!(approx(i.k, 3.0 * 2.0_f64.sqrt(), 1e-15));
        assert!(approx(i.k_factored(), i.k, 1e-14));
    }

    #[test]
    fn invariants_two_routes_for_d() {
        let v = StandardForm::new(1.5, 1.2, 0.6, -0.4).to_cm();
        let i = invariants(&v).unwrap();
        assert!(i.d_mismatch() < 1e-9, "{i:?}");
        assert!(approx(i.m1 * i.m2, i.n1 * i.n2, 1e-12));
    }
}
