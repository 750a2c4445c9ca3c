//! Seeded random physical states and symplectic transformations for tests and verification.

use nalgebra::{DMatrix, Matrix2};
use rand::Rng;

use crate::symplectic::{self, CovarianceMatrix, StandardForm};

/// Draws an unscaled physical standard form with `b_j ∈ [lo, hi]`, `c ∈ [0, √(b1 b2))`,
/// `d ∈ [−c, c]`, rejecting draws whose smallest symplectic eigenvalue is below `½`.
pub fn random_standard_form<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> StandardForm {
    loop {
        let b1 = rng.gen_range(lo..=hi);
        let b2 = rng.gen_range(lo..=hi);
        let c = rng.gen_range(0.0..(b1 * b2).sqrt());
        let d = rng.gen_range(-c..=c);
        let sf = StandardForm::new(b1, b2, c, d);
        if let Ok((_, k2)) = sf.spectrum() {
            if k2 > 0.5 {
                return sf;
            }
        }
    }
}

/// Same as [`random_standard_form`] with local scale factors `s_j ∈ [1/smax, smax]`.
pub fn random_scaled_standard_form<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64, smax: f64) -> StandardForm {
    let sf = random_standard_form(rng, lo, hi);
    let ln = smax.ln();
    StandardForm {
        s1: rng.gen_range(-ln..=ln).exp(),
        s2: rng.gen_range(-ln..=ln).exp(),
        ..sf
    }
}

fn rotation(t: f64) -> Matrix2<f64> {
    Matrix2::new(t.cos(), t.sin(), -t.sin(), t.cos())
}

fn squeezer(r: f64) -> Matrix2<f64> {
    Matrix2::new((-r).exp(), 0.0, 0.0, r.exp())
}

/// Random local symplectic `S1 ⊕ … ⊕ Sn`, each block a rotation–squeeze–rotation.
pub fn random_local_symplectic<R: Rng + ?Sized>(rng: &mut R, modes: usize, max_squeeze: f64) -> DMatrix<f64> {
    let mut s = DMatrix::zeros(2 * modes, 2 * modes);
    for j in 0..modes {
        let blk = rotation(rng.gen_range(0.0..std::f64::consts::TAU))
            * squeezer(rng.gen_range(-max_squeeze..=max_squeeze))
            * rotation(rng.gen_range(0.0..std::f64::consts::TAU));
        s.view_mut((2 * j, 2 * j), (2, 2)).copy_from(&blk);
    }
    s
}

/// Beam splitter of angle `t` between modes `i` and `j` (an orthogonal symplectic map).
fn beam_splitter(modes: usize, i: usize, j: usize, t: f64) -> DMatrix<f64> {
    let mut s = DMatrix::identity(2 * modes, 2 * modes);
    let (c, si) = (t.cos(), t.sin());
    for k in 0..2 {
        s[(2 * i + k, 2 * i + k)] = c;
        s[(2 * j + k, 2 * j + k)] = c;
        s[(2 * i + k, 2 * j + k)] = si;
        s[(2 * j + k, 2 * i + k)] = -si;
    }
    s
}

/// Random element of `Sp(2n, ℝ)` as a product of local maps and beam splitters.
pub fn random_symplectic<R: Rng + ?Sized>(rng: &mut R, modes: usize, max_squeeze: f64) -> DMatrix<f64> {
    let mut s = random_local_symplectic(rng, modes, max_squeeze);
    for _ in 0..modes {
        for i in 0..modes {
            for j in (i + 1)..modes {
                let bs = beam_splitter(modes, i, j, rng.gen_range(0.0..std::f64::consts::TAU));
                s = random_local_symplectic(rng, modes, max_squeeze) * bs * s;
            }
        }
    }
    s
}

/// Random physical CM `S diag(κ) Sᵀ` with `κ_j ∈ [½, kmax]`.
pub fn random_covariance<R: Rng + ?Sized>(rng: &mut R, modes: usize, kmax: f64, max_squeeze: f64) -> CovarianceMatrix {
    let diag: Vec<f64> = (0..modes)
        .flat_map(|_| {
            let k = rng.gen_range(0.5..=kmax);
            [k, k]
        })
        .collect();
    let s = random_symplectic(rng, modes, max_squeeze);
    CovarianceMatrix::diagonal(&diag)
        .and_then(|d| d.congruence(&s))
        .expect("congruence of a diagonal CM is symmetric")
}

/// Random mean vector with entries in `[−scale, scale]`.
pub fn random_mean<R: Rng + ?Sized>(rng: &mut R, modes: usize, scale: f64) -> Vec<f64> {
    (0..2 * modes).map(|_| rng.gen_range(-scale..=scale)).collect()
}

/// `Sᵀ J S − J` in max norm.
pub fn symplectic_defect(s: &DMatrix<f64>) -> f64 {
    let j = symplectic::SymplecticForm::new(s.nrows() / 2);
    (s.transpose() * j.matrix() * s - j.matrix()).amax()
}
