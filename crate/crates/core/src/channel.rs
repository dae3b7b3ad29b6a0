//! Channel models: i.i.d. Rayleigh fading and finite-scattering geometric
//! channels on a uniform linear array.
//!
//! All generated sets use unit noise standard deviation, so the normalized
//! channel `h̄_k = h_k / σ_k` coincides with `h_k` and the received SNR of a
//! beamformer `w` at user `k` is `|h̄_kᴴ w|²`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{complex_normal, CMatrix, CVector};

/// Noise-normalized channels of `K` single-antenna users seen from `M` antennas.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    h_bar: CMatrix,
    sigma: Vec<f64>,
}

impl ChannelSet {
    /// `h_bar` holds one normalized channel per column.
    pub fn new(h_bar: CMatrix, sigma: Vec<f64>) -> Result<Self> {
        let (m, k) = h_bar.shape();
        if m == 0 || k == 0 {
            return Err(Error::Dimension(format!("channel matrix is {m}x{k}")));
        }
        if sigma.len() != k {
            return Err(Error::Dimension(format!(
                "{} noise levels for {k} users",
                sigma.len()
            )));
        }
        if let Some(s) = sigma.iter().find(|&&s| !(s > 0.0 && s.is_finite())) {
            return Err(Error::Parameter(format!(
                "noise standard deviation {s} is not positive"
            )));
        }
        if h_bar.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Parameter(
                "channel matrix has non-finite entries".into(),
            ));
        }
        Ok(Self { h_bar, sigma })
    }

    /// Unit noise on every user.
    pub fn unit_noise(h_bar: CMatrix) -> Result<Self> {
        let k = h_bar.ncols();
        Self::new(h_bar, vec![1.0; k])
    }

    pub fn from_users(users: &[CVector]) -> Result<Self> {
        let m = users.first().map(|u| u.len()).unwrap_or(0);
        if users.iter().any(|u| u.len() != m) {
            return Err(Error::Dimension(
                "user channels have different lengths".into(),
            ));
        }
        Self::unit_noise(CMatrix::from_columns(users))
    }

    pub fn num_antennas(&self) -> usize {
        self.h_bar.nrows()
    }

    pub fn num_users(&self) -> usize {
        self.h_bar.ncols()
    }

    pub fn h_bar(&self) -> &CMatrix {
        &self.h_bar
    }

    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }

    pub fn user(&self, k: usize) -> CVector {
        self.h_bar.column(k).into_owned()
    }

    pub fn users(&self) -> Vec<CVector> {
        (0..self.num_users()).map(|k| self.user(k)).collect()
    }

    /// Physical (un-normalized) channel `h_k = σ_k h̄_k`.
    pub fn raw_user(&self, k: usize) -> CVector {
        self.user(k).scale(self.sigma[k])
    }

    /// Channels restricted to the given antenna rows.
    pub fn restrict_rows(&self, rows: &[usize]) -> Result<Self> {
        if rows.iter().any(|&r| r >= self.num_antennas()) {
            return Err(Error::Dimension("antenna index out of range".into()));
        }
        let sub = self.h_bar.select_rows(rows.iter());
        Self::new(sub, self.sigma.clone())
    }

    /// `min_k |h̄_kᴴ w|²`
    pub fn min_snr(&self, w: &CVector) -> f64 {
        (0..self.num_users())
            .map(|k| self.h_bar.column(k).dotc(w).norm_sqr())
            .fold(f64::INFINITY, f64::min)
    }
}

/// Propagation paths of one user in the geometric model.
#[derive(Debug, Clone, PartialEq)]
pub struct UserPaths {
    /// Azimuth angles of departure, radians.
    pub aods: Vec<f64>,
    /// Complex path gains `g_k`.
    pub gains: CVector,
    /// `M x L_k` matrix of unit-norm steering columns `A_k`.
    pub steering: CMatrix,
}

impl UserPaths {
    pub fn path_count(&self) -> usize {
        self.aods.len()
    }

    /// `√(M/L_k) A_k g_k`
    pub fn reconstruct(&self) -> CVector {
        let m = self.steering.nrows() as f64;
        let l = self.path_count() as f64;
        (&self.steering * &self.gains).scale((m / l).sqrt())
    }
}

/// Angles, gains and steering matrices behind a geometric channel set.
#[derive(Debug, Clone, PartialEq)]
pub struct SteeringInfo {
    pub spacing_ratio: f64,
    pub users: Vec<UserPaths>,
}

impl SteeringInfo {
    pub fn total_paths(&self) -> usize {
        self.users.iter().map(UserPaths::path_count).sum()
    }

    /// All users' steering columns side by side, user-major (`M x Σ L_k`).
    pub fn stacked_steering(&self) -> CMatrix {
        let cols: Vec<CVector> = self
            .users
            .iter()
            .flat_map(|u| u.steering.column_iter().map(|c| c.into_owned()))
            .collect();
        CMatrix::from_columns(&cols)
    }

    pub fn all_aods(&self) -> Vec<f64> {
        self.users
            .iter()
            .flat_map(|u| u.aods.iter().copied())
            .collect()
    }
}

/// ULA response `(1/√M)[1, e^{-j2π(D/λ)cos φ}, …, e^{-j2π(M-1)(D/λ)cos φ}]ᵀ`.
pub fn ula_steering(num_antennas: usize, phi: f64, spacing_ratio: f64) -> CVector {
    let amp = 1.0 / (num_antennas as f64).sqrt();
    let step = -2.0 * PI * spacing_ratio * phi.cos();
    CVector::from_fn(num_antennas, |m, _| {
        Complex64::from_polar(amp, step * m as f64)
    })
}

/// i.i.d. CN(0, 1) channel entries with unit noise.
pub fn gen_rayleigh<R: Rng + ?Sized>(
    num_antennas: usize,
    num_users: usize,
    rng: &mut R,
) -> Result<ChannelSet> {
    if num_users == 0 || num_antennas < num_users {
        return Err(Error::Dimension(format!(
            "Rayleigh channels need M >= K >= 1, got M={num_antennas}, K={num_users}"
        )));
    }
    let mut h = CMatrix::zeros(num_antennas, num_users);
    // column-major fill: user by user
    for k in 0..num_users {
        for m in 0..num_antennas {
            h[(m, k)] = complex_normal(rng);
        }
    }
    ChannelSet::unit_noise(h)
}

/// Finite-scattering channel `h_k = √(M/L_k) A_k g_k` with AoDs uniform on
/// `[0, 2π)` and CN(0, 1) path gains.
pub fn gen_geometric<R: Rng + ?Sized>(
    num_antennas: usize,
    path_counts: &[usize],
    spacing_ratio: f64,
    rng: &mut R,
) -> Result<(ChannelSet, SteeringInfo)> {
    if num_antennas == 0 || path_counts.is_empty() {
        return Err(Error::Dimension(format!(
            "geometric channels need M >= 1 and K >= 1, got M={num_antennas}, K={}",
            path_counts.len()
        )));
    }
    if path_counts.contains(&0) {
        return Err(Error::Dimension(
            "every user needs at least one path".into(),
        ));
    }
    if !(spacing_ratio > 0.0 && spacing_ratio.is_finite()) {
        return Err(Error::Parameter(format!(
            "antenna spacing ratio {spacing_ratio}"
        )));
    }
    let mut users = Vec::with_capacity(path_counts.len());
    let mut cols = Vec::with_capacity(path_counts.len());
    for &l in path_counts {
        let aods: Vec<f64> = (0..l).map(|_| rng.random_range(0.0..TAU)).collect();
        let gains = CVector::from_fn(l, |_, _| complex_normal(rng));
        let steer: Vec<CVector> = aods
            .iter()
            .map(|&phi| ula_steering(num_antennas, phi, spacing_ratio))
            .collect();
        let paths = UserPaths {
            aods,
            gains,
            steering: CMatrix::from_columns(&steer),
        };
        cols.push(paths.reconstruct());
        users.push(paths);
    }
    let set = ChannelSet::unit_noise(CMatrix::from_columns(&cols))?;
    Ok((
        set,
        SteeringInfo {
            spacing_ratio,
            users,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn steering_broadside() {
        let a = ula_steering(4, PI / 2.0, 0.5);
        for z in a.iter() {
            assert!((z - c(0.5, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn steering_endfire_two_elements() {
        let a = ula_steering(2, 0.0, 0.5);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((a[0] - c(s, 0.0)).norm() < 1e-12);
        assert!((a[1] - c(-s, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn steering_constant_modulus() {
        let a = ula_steering(8, PI / 3.0, 0.5);
        for z in a.iter() {
            assert!((z.norm() - 1.0 / 8f64.sqrt()).abs() < 1e-12);
        }
        assert!((a.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rayleigh_deterministic() {
        let a = gen_rayleigh(6, 2, &mut ChaCha8Rng::seed_from_u64(17)).unwrap();
        let b = gen_rayleigh(6, 2, &mut ChaCha8Rng::seed_from_u64(17)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.sigma(), &[1.0, 1.0]);
    }

    #[test]
    fn rayleigh_rejects_more_users_than_antennas() {
        let r = gen_rayleigh(2, 3, &mut ChaCha8Rng::seed_from_u64(0));
        assert!(matches!(r, Err(Error::Dimension(_))));
        let r = gen_rayleigh(2, 0, &mut ChaCha8Rng::seed_from_u64(0));
        assert!(matches!(r, Err(Error::Dimension(_))));
    }

    #[test]
    fn rayleigh_mean_energy() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let draws = 10_000;
        let mut acc = 0.0;
        for _ in 0..draws {
            acc += gen_rayleigh(8, 1, &mut rng).unwrap().user(0).norm_squared();
        }
        let mean = acc / draws as f64;
        assert!((mean - 8.0).abs() < 0.3, "mean {mean}");
    }

    #[test]
    fn single_path_is_scaled_steering_vector() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (set, info) = gen_geometric(10, &[1, 1, 1], 0.5, &mut rng).unwrap();
        for k in 0..3 {
            let a = info.users[k].steering.column(0).into_owned();
            let h = set.user(k);
            // h = α a  ⇔  |aᴴh| = ‖h‖ for unit a
            assert!((a.dotc(&h).norm() - h.norm()).abs() < 1e-12 * h.norm().max(1.0));
        }
    }

    #[test]
    fn geometric_mean_energy() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let draws = 10_000;
        let mut acc = 0.0;
        for _ in 0..draws {
            let (set, _) = gen_geometric(10, &[3], 0.5, &mut rng).unwrap();
            acc += set.user(0).norm_squared();
        }
        let mean = acc / draws as f64;
        assert!((mean - 10.0).abs() < 0.4, "mean {mean}");
    }

    #[test]
    fn geometric_reconstruction_and_modulus() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let (set, info) = gen_geometric(7, &[2, 1, 4], 0.5, &mut rng).unwrap();
        assert_eq!(info.total_paths(), 7);
        for (k, u) in info.users.iter().enumerate() {
            let h = set.raw_user(k);
            assert!((&h - u.reconstruct()).norm() <= 1e-12 * h.norm());
            for col in u.steering.column_iter() {
                assert!((col.norm() - 1.0).abs() < 1e-12);
                for z in col.iter() {
                    assert!((z.norm() - 1.0 / 7f64.sqrt()).abs() < 1e-12);
                }
            }
            assert!(u.aods.iter().all(|&a| (0.0..TAU).contains(&a)));
        }
    }

    #[test]
    fn geometric_rejects_zero_paths() {
        let r = gen_geometric(4, &[1, 0], 0.5, &mut ChaCha8Rng::seed_from_u64(0));
        assert!(matches!(r, Err(Error::Dimension(_))));
        let r = gen_geometric(4, &[], 0.5, &mut ChaCha8Rng::seed_from_u64(0));
        assert!(matches!(r, Err(Error::Dimension(_))));
    }

    #[test]
    fn invalid_sigma_rejected() {
        let h = CMatrix::zeros(2, 1);
        assert!(ChannelSet::new(h, vec![0.0]).is_err());
    }
}
