//! Brute-force references shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::{FRAC_PI_2, TAU};

use hybrid_multicast::linalg::{complex_normal, CMatrix, CVector};
use num_complex::Complex64;
use rand::Rng;

/// min_k |h_kᴴ w|² for `w = [cos α, sin α e^{jβ}]` scaled to `wᴴGw = P`.
pub fn grid_value(channels: &[CVector], gram: &CMatrix, power: f64, alpha: f64, beta: f64) -> f64 {
    let w = CVector::from_vec(vec![
        Complex64::new(alpha.cos(), 0.0),
        Complex64::from_polar(alpha.sin(), beta),
    ]);
    let energy = (w.adjoint() * gram * &w)[(0, 0)].re;
    let scale = power / energy;
    channels
        .iter()
        .map(|h| h.dotc(&w).norm_sqr() * scale)
        .fold(f64::INFINITY, f64::min)
}

/// Max over an `n x n` grid of α ∈ [0, π/2], β ∈ [0, 2π). Every
/// two-dimensional beamformer is a global phase times one of these points.
pub fn grid_oracle(channels: &[CVector], gram: &CMatrix, power: f64, n: usize) -> (f64, f64, f64) {
    let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
    for i in 0..n {
        let alpha = FRAC_PI_2 * i as f64 / (n - 1) as f64;
        for j in 0..n {
            let beta = TAU * j as f64 / n as f64;
            let v = grid_value(channels, gram, power, alpha, beta);
            if v > best.0 {
                best = (v, alpha, beta);
            }
        }
    }
    best
}

/// Grid oracle followed by repeated zooming around the incumbent.
pub fn refined_oracle(channels: &[CVector], gram: &CMatrix, power: f64) -> f64 {
    let (mut best, mut a0, mut b0) = grid_oracle(channels, gram, power, 720);
    let mut da = FRAC_PI_2 / 719.0 * 2.0;
    let mut db = TAU / 720.0 * 2.0;
    for _ in 0..6 {
        let n = 41;
        let (ac, bc) = (a0, b0);
        for i in 0..n {
            let alpha = (ac - da + 2.0 * da * i as f64 / (n - 1) as f64).clamp(0.0, FRAC_PI_2);
            for j in 0..n {
                let beta = bc - db + 2.0 * db * j as f64 / (n - 1) as f64;
                let v = grid_value(channels, gram, power, alpha, beta);
                if v > best {
                    best = v;
                    a0 = alpha;
                    b0 = beta;
                }
            }
        }
        da /= 10.0;
        db /= 10.0;
    }
    best
}

pub fn random_vector<R: Rng>(n: usize, rng: &mut R) -> CVector {
    CVector::from_fn(n, |_, _| complex_normal(rng))
}

pub fn random_matrix<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| complex_normal(rng))
}

/// `AᴴA + δI` for a random square `A`: Hermitian and well inside the PD cone.
pub fn random_gram<R: Rng>(n: usize, rng: &mut R) -> CMatrix {
    let a = random_matrix(n, n, rng);
    a.adjoint() * &a + CMatrix::identity(n, n).scale(0.2)
}

/// Random constant-modulus `M x N` matrix with entries of modulus 1/√M.
pub fn random_phase_matrix<R: Rng>(m: usize, n: usize, rng: &mut R) -> CMatrix {
    let amp = 1.0 / (m as f64).sqrt();
    CMatrix::from_fn(m, n, |_, _| {
        Complex64::from_polar(amp, rng.random_range(0.0..TAU))
    })
}

pub fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}
