//! Max-min SNR multicast beamforming by semidefinite relaxation.
//!
//! The problem is `max_w min_k |ĥ_kᴴ w|²` subject to `wᴴ G w = P`. Lifting
//! `W = w wᴴ` and dropping the rank constraint gives the convex program
//!
//! ```text
//! maximize t  s.t.  ĥ_kᴴ W ĥ_k ≥ t  (all k),  tr(G W) = P,  W ⪰ 0.
//! ```
//!
//! A general gram `G` is reduced to `G = I` by the change of variables
//! `w = G^{-1/2} u`. The standard-form relaxation is solved through its
//! Lagrange dual
//!
//! ```text
//! minimize λ  s.t.  λ I − Σ_k μ_k c_k c_kᴴ ⪰ 0,  μ ≥ 0,  Σ_k μ_k = 1
//! ```
//!
//! with a log-barrier path-following method. The dual has only `K + 1`
//! variables, and every centered point yields the strictly feasible primal
//! matrix `W = S⁻¹ / τ`, so each stage produces a certified duality gap.
//! A rank-one optimum is read off directly; otherwise Gaussian
//! randomization recovers a feasible beamformer.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;

use crate::channel::ChannelSet;
use crate::error::{Error, Result};
use crate::linalg::{
    complex_normal_vector, hermitian_defect, hermitian_inv_sqrt, CMatrix, CVector,
    HermitianCholesky, HermitianEigen,
};

/// Effective channels together with a quadratic power constraint `wᴴ G w = P`.
#[derive(Debug, Clone)]
pub struct MaxMinProblem {
    channels: Vec<CVector>,
    gram: CMatrix,
    power: f64,
    whitener: CMatrix,
}

impl MaxMinProblem {
    pub fn new(channels: Vec<CVector>, gram: CMatrix, power: f64) -> Result<Self> {
        let d = gram.nrows();
        if channels.is_empty() {
            return Err(Error::Dimension("no user channels".into()));
        }
        if d == 0 || gram.ncols() != d {
            return Err(Error::Dimension(format!(
                "power gram must be square, got {}x{}",
                gram.nrows(),
                gram.ncols()
            )));
        }
        if let Some(h) = channels.iter().find(|h| h.len() != d) {
            return Err(Error::Dimension(format!(
                "channel of length {} for a {d}-dimensional beamformer",
                h.len()
            )));
        }
        if !(power > 0.0 && power.is_finite()) {
            return Err(Error::Parameter(format!("transmit power {power}")));
        }
        if hermitian_defect(&gram) > 1e-10 {
            return Err(Error::Precondition("power gram is not Hermitian".into()));
        }
        let whitener = hermitian_inv_sqrt(&gram)?;
        Ok(Self {
            channels,
            gram,
            power,
            whitener,
        })
    }

    /// Fully digital problem: `‖w‖² = P`.
    pub fn digital(channels: Vec<CVector>, power: f64) -> Result<Self> {
        let d = channels.first().map(|h| h.len()).unwrap_or(0);
        Self::new(channels, CMatrix::identity(d, d), power)
    }

    pub fn from_channel_set(set: &ChannelSet, power: f64) -> Result<Self> {
        Self::digital(set.users(), power)
    }

    pub fn dim(&self) -> usize {
        self.gram.nrows()
    }

    pub fn num_users(&self) -> usize {
        self.channels.len()
    }

    pub fn channels(&self) -> &[CVector] {
        &self.channels
    }

    pub fn gram(&self) -> &CMatrix {
        &self.gram
    }

    pub fn power(&self) -> f64 {
        self.power
    }

    /// Same channels and gram at a different power level.
    pub fn with_power(&self, power: f64) -> Result<Self> {
        if !(power > 0.0 && power.is_finite()) {
            return Err(Error::Parameter(format!("transmit power {power}")));
        }
        Ok(Self {
            power,
            ..self.clone()
        })
    }

    /// `min_k |ĥ_kᴴ w|²`
    pub fn min_snr(&self, w: &CVector) -> f64 {
        self.channels
            .iter()
            .map(|h| h.dotc(w).norm_sqr())
            .fold(f64::INFINITY, f64::min)
    }

    /// `wᴴ G w`
    pub fn power_of(&self, w: &CVector) -> f64 {
        w.dotc(&(&self.gram * w)).re
    }

    /// Rescale `w` onto the constraint surface `wᴴ G w = P`.
    pub fn normalize(&self, w: &CVector) -> Option<CVector> {
        let p = self.power_of(w);
        (p > 0.0 && p.is_finite()).then(|| w.scale((self.power / p).sqrt()))
    }

    /// Channels after the whitening change of variables, `G^{-1/2} ĥ_k`.
    pub fn whitened_channels(&self) -> Vec<CVector> {
        self.channels.iter().map(|h| &self.whitener * h).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SdpOptions {
    /// Target relative duality gap.
    pub rel_tol: f64,
    /// Relative gap still accepted when the Newton iterations stall.
    pub fallback_tol: f64,
    pub max_newton_steps: usize,
    /// Barrier weight multiplier between centering stages.
    pub barrier_growth: f64,
}

impl Default for SdpOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            fallback_tol: 1e-6,
            max_newton_steps: 600,
            barrier_growth: 12.0,
        }
    }
}

/// Optimal relaxed covariance and its certificate.
#[derive(Debug, Clone)]
pub struct SdpRelaxation {
    /// `W ⪰ 0` with `tr(G W) = P`, in the original coordinates.
    pub w_matrix: CMatrix,
    /// Dual bound: an upper bound on the relaxation optimum, itself within
    /// the reported gap of it.
    pub t_sdp: f64,
    /// `min_k ĥ_kᴴ W ĥ_k` of the returned `W`.
    pub primal_value: f64,
    /// Dual weights `μ` on the users, summing to one.
    pub user_weights: Vec<f64>,
    pub newton_steps: usize,
    pub barrier_stages: usize,
}

impl SdpRelaxation {
    pub fn duality_gap(&self) -> f64 {
        self.t_sdp - self.primal_value
    }
}

struct StandardForm {
    w: CMatrix,
    dual_bound: f64,
    primal_value: f64,
    mu: Vec<f64>,
    newton_steps: usize,
    stages: usize,
}

/// Evaluated barrier state at one dual point.
struct DualPoint {
    lambda: f64,
    mu: Vec<f64>,
    s_inv: CMatrix,
    value: f64,
}

fn slack(channels: &[CVector], lambda: f64, mu: &[f64]) -> CMatrix {
    let d = channels[0].len();
    let mut s = CMatrix::identity(d, d).scale(lambda);
    for (c, &m) in channels.iter().zip(mu) {
        s -= (c * c.adjoint()).scale(m);
    }
    s
}

fn evaluate(channels: &[CVector], tau: f64, lambda: f64, mu: &[f64]) -> Option<DualPoint> {
    if mu.iter().any(|&m| !(m > 0.0)) {
        return None;
    }
    let chol = HermitianCholesky::new(&slack(channels, lambda, mu))?;
    let logdet = chol.log_det();
    if !logdet.is_finite() {
        return None;
    }
    let value = tau * lambda - logdet - mu.iter().map(|m| m.ln()).sum::<f64>();
    Some(DualPoint {
        lambda,
        mu: mu.to_vec(),
        s_inv: chol.inverse(),
        value,
    })
}

/// Largest eigenvalue of `Σ μ_k c_k c_kᴴ` for normalized weights.
fn dual_value(channels: &[CVector], mu: &[f64]) -> f64 {
    let total: f64 = mu.iter().sum();
    let d = channels[0].len();
    let mut a = CMatrix::zeros(d, d);
    for (c, &m) in channels.iter().zip(mu) {
        a += (c * c.adjoint()).scale(m / total);
    }
    HermitianEigen::new(&a).values[0].max(0.0)
}

fn min_quadratic(channels: &[CVector], w: &CMatrix) -> f64 {
    channels
        .iter()
        .map(|c| c.dotc(&(w * c)).re)
        .fold(f64::INFINITY, f64::min)
        .max(0.0)
}

/// Drop the eigen-directions of a unit-trace `W` carrying less than
/// `1e-4` of its largest eigenvalue. Near the optimum these are the
/// residual `O(1/τ)` barrier components outside the optimal face.
fn truncate_spectrum(w: &CMatrix) -> Option<CMatrix> {
    let eig = HermitianEigen::new(w);
    let cut = 1e-4 * eig.values[0];
    let kept = eig.values.iter().take_while(|&&v| v >= cut).count();
    if kept == eig.values.len() {
        return None;
    }
    let d = w.nrows();
    let mut t = CMatrix::zeros(d, d);
    let mut total = 0.0;
    for i in 0..kept {
        let u = eig.vectors.column(i);
        t += (u * u.adjoint()).scale(eig.values[i]);
        total += eig.values[i];
    }
    Some(t.scale(1.0 / total))
}

/// Solve `max t s.t. c_kᴴ W c_k ≥ t, tr W = 1, W ⪰ 0` for channels with
/// `max_k ‖c_k‖² = 1`.
fn solve_standard_form(channels: &[CVector], opts: &SdpOptions) -> Result<StandardForm> {
    let k = channels.len();
    let d = channels[0].len();
    let nu = (d + k) as f64;
    let abs_tol = 1e-13;

    let mu0 = vec![1.0 / k as f64; k];
    let lambda0 = dual_value(channels, &mu0) + 1.0;
    let mut tau = nu;
    let mut point = evaluate(channels, tau, lambda0, &mu0)
        .ok_or_else(|| Error::Precondition("infeasible starting point".into()))?;

    let mut steps = 0usize;
    let mut stages = 0usize;
    let mut best: Option<(f64, CMatrix, f64, f64, Vec<f64>)> = None;

    loop {
        stages += 1;
        let stalled = center(channels, tau, &mut point, &mut steps, opts.max_newton_steps);

        // Certificate from the centered point.
        let mut w = point.s_inv.scale(1.0 / tau);
        w = (&w + w.adjoint()).scale(0.5);
        let trace: f64 = w.diagonal().iter().map(|z| z.re).sum();
        w = w.scale(1.0 / trace);
        let mut primal = min_quadratic(channels, &w);
        if let Some(t) = truncate_spectrum(&w) {
            let p = min_quadratic(channels, &t);
            if p > primal {
                w = t;
                primal = p;
            }
        }
        let dual = dual_value(channels, &point.mu);
        let gap = (dual - primal).max(0.0);
        // A gap that grows between stages means rounding now dominates the
        // barrier term; further stages only degrade the primal.
        let regressed = best.as_ref().is_some_and(|b| gap > b.0);
        if best.as_ref().is_none_or(|b| gap < b.0) {
            best = Some((gap, w, primal, dual, point.mu.clone()));
        }

        if gap <= opts.rel_tol * dual + abs_tol {
            break;
        }
        if stalled || regressed || steps >= opts.max_newton_steps {
            let (g, _, _, dv, _) = best.as_ref().unwrap();
            if *g <= opts.fallback_tol * dv + abs_tol {
                break;
            }
            return Err(Error::SolverFailure {
                iterations: steps,
                gap: *g,
                residual: nu / tau,
            });
        }
        tau *= opts.barrier_growth;
        point = evaluate(channels, tau, point.lambda, &point.mu)
            .expect("a strictly feasible point stays feasible when only τ changes");
    }

    let (_, w, primal_value, dual_bound, mu) = best.unwrap();
    let total: f64 = mu.iter().sum();
    Ok(StandardForm {
        w,
        dual_bound,
        primal_value,
        mu: mu.into_iter().map(|m| m / total).collect(),
        newton_steps: steps,
        stages,
    })
}

/// Newton centering on the barrier problem at weight `tau`, with the
/// equality `Σ μ = 1` eliminated through a null-space basis. Returns `true`
/// when the line search stalled outside the quadratic-convergence region.
fn center(
    channels: &[CVector],
    tau: f64,
    point: &mut DualPoint,
    steps: &mut usize,
    budget: usize,
) -> bool {
    let k = channels.len();
    let n = k + 1;
    let mut prev_decrement = f64::INFINITY;
    while *steps < budget {
        *steps += 1;
        let s_inv = &point.s_inv;
        let y: Vec<CVector> = channels.iter().map(|c| s_inv * c).collect();

        let mut grad = DVector::<f64>::zeros(n);
        let mut hess = DMatrix::<f64>::zeros(n, n);
        let tr_inv: f64 = s_inv.diagonal().iter().map(|z| z.re).sum();
        grad[0] = tau - tr_inv;
        hess[(0, 0)] = s_inv.iter().map(|z| z.norm_sqr()).sum();
        for i in 0..k {
            let a_i = channels[i].dotc(&y[i]).re;
            grad[i + 1] = a_i - 1.0 / point.mu[i];
            let b_i = y[i].norm_squared();
            hess[(0, i + 1)] = -b_i;
            hess[(i + 1, 0)] = -b_i;
            for j in 0..=i {
                let cross = channels[i].dotc(&y[j]).norm_sqr();
                hess[(i + 1, j + 1)] = cross;
                hess[(j + 1, i + 1)] = cross;
            }
            hess[(i + 1, i + 1)] += 1.0 / (point.mu[i] * point.mu[i]);
        }

        // Eliminate Σ μ = 1 through the null-space basis
        // (λ, μ_1..μ_{K-1}) ↦ (λ, μ_1, .., μ_{K-1}, -Σ μ_i), then solve the
        // Jacobi-scaled reduced system.
        let z = DMatrix::<f64>::from_fn(n, k, |row, col| match (row, col) {
            (0, 0) => 1.0,
            (r, c) if c > 0 && r == c => 1.0,
            (r, c) if c > 0 && r == k => -1.0,
            _ => 0.0,
        });
        let h_red = z.transpose() * &hess * &z;
        let g_red = z.transpose() * &grad;
        let scale = DVector::<f64>::from_fn(k, |i, _| 1.0 / h_red[(i, i)].max(1e-300).sqrt());
        let h_scaled = DMatrix::<f64>::from_fn(k, k, |i, j| h_red[(i, j)] * scale[i] * scale[j]);
        let rhs = DVector::<f64>::from_fn(k, |i, _| -g_red[i] * scale[i]);
        let solved = match h_scaled.clone().cholesky() {
            Some(ch) => Some(ch.solve(&rhs)),
            None => h_scaled.lu().solve(&rhs),
        };
        let Some(y_red) = solved else {
            return true;
        };
        let dx = &z * y_red.component_mul(&scale);
        let decrement = dx.dot(&(&hess * &dx));
        let slope = grad.dot(&dx);
        // Inside the quadratic-convergence region full steps are taken
        // without a descent test, because the barrier value is then too
        // large to resolve the decrease. The recovered primal is only as
        // accurate as the centering, so iterate until the decrement stops
        // shrinking.
        if decrement < 0.1 {
            if decrement <= 1e-24 || decrement > 0.5 * prev_decrement {
                return false;
            }
            prev_decrement = decrement;
            let lambda = point.lambda + dx[0];
            let mu: Vec<f64> = (0..k).map(|i| point.mu[i] + dx[i + 1]).collect();
            match evaluate(channels, tau, lambda, &mu) {
                Some(next) => {
                    *point = next;
                    continue;
                }
                None => return false,
            }
        }
        if slope >= 0.0 {
            return true;
        }
        let mut step = 1.0;
        let accepted = loop {
            if step < 1e-14 {
                break None;
            }
            let lambda = point.lambda + step * dx[0];
            let mu: Vec<f64> = (0..k).map(|i| point.mu[i] + step * dx[i + 1]).collect();
            if let Some(next) = evaluate(channels, tau, lambda, &mu) {
                if next.value <= point.value + 0.25 * step * slope {
                    break Some(next);
                }
            }
            step *= 0.5;
        };
        match accepted {
            Some(next) if next.value < point.value => *point = next,
            Some(next) => {
                *point = next;
                return false;
            }
            None => return true,
        }
    }
    true
}

/// Solve the lifted semidefinite program of `problem`.
pub fn solve_sdp_relaxation(problem: &MaxMinProblem, opts: &SdpOptions) -> Result<SdpRelaxation> {
    let d = problem.dim();
    let k = problem.num_users();
    let white = problem.whitened_channels();
    let scale = white.iter().map(|c| c.norm_squared()).fold(0.0, f64::max);

    let (w_std, dual, primal, mu, steps, stages) = if scale == 0.0 {
        (
            CMatrix::identity(d, d).scale(1.0 / d as f64),
            0.0,
            0.0,
            vec![1.0 / k as f64; k],
            0,
            0,
        )
    } else {
        let scaled: Vec<CVector> = white.iter().map(|c| c.scale(1.0 / scale.sqrt())).collect();
        let sf = solve_standard_form(&scaled, opts)?;
        (
            sf.w,
            sf.dual_bound * scale,
            sf.primal_value * scale,
            sf.mu,
            sf.newton_steps,
            sf.stages,
        )
    };

    let p = problem.power();
    let w_matrix = (&problem.whitener * w_std * &problem.whitener).scale(p);
    Ok(SdpRelaxation {
        w_matrix: (&w_matrix + w_matrix.adjoint()).scale(0.5),
        t_sdp: dual * p,
        primal_value: primal * p,
        user_weights: mu,
        newton_steps: steps,
        barrier_stages: stages,
    })
}

/// `λ₁(W) / tr(W)`
pub fn eigen_ratio(w_matrix: &CMatrix) -> f64 {
    let eig = HermitianEigen::new(w_matrix);
    let trace: f64 = eig.values.iter().map(|v| v.max(0.0)).sum();
    if trace > 0.0 {
        eig.values[0].max(0.0) / trace
    } else {
        0.0
    }
}

/// Principal eigenvector of `W` scaled to `wᴴ G w = P`, if `W` is rank one
/// up to `λ₁/tr(W) ≥ 1 − rel_tol`.
pub fn extract_rank_one(
    w_matrix: &CMatrix,
    problem: &MaxMinProblem,
    rel_tol: f64,
) -> Option<CVector> {
    if eigen_ratio(w_matrix) < 1.0 - rel_tol {
        return None;
    }
    let (_, v) = HermitianEigen::new(w_matrix).principal();
    problem.normalize(&v)
}

/// Gaussian randomization: draw `w = U Σ^{1/2} v` with `v ~ CN(0, I)`,
/// rescale each draw onto `wᴴ G w = P` and keep the best min-SNR.
/// Ties keep the earliest candidate.
pub fn randomize<R: Rng + ?Sized>(
    w_matrix: &CMatrix,
    problem: &MaxMinProblem,
    n_candidates: usize,
    rng: &mut R,
) -> (CVector, f64) {
    let eig = HermitianEigen::new(w_matrix);
    let top = eig.values[0].max(0.0);
    let rank = eig
        .values
        .iter()
        .filter(|&&v| v > 1e-14 * top)
        .count()
        .max(1);
    let d = problem.dim();
    let factor = CMatrix::from_fn(d, rank, |i, j| {
        eig.vectors[(i, j)] * eig.values[j].max(0.0).sqrt()
    });

    // Work in the rank-r coordinates v: projections ĥ_kᴴ B and gram Bᴴ G B.
    let proj: Vec<CVector> = problem
        .channels()
        .iter()
        .map(|h| factor.adjoint() * h)
        .collect();
    let gram_r = factor.adjoint() * problem.gram() * &factor;
    let power = problem.power();

    let mut best: Option<(f64, CVector, f64)> = None;
    for _ in 0..n_candidates {
        let v = complex_normal_vector(rank, rng);
        let pw = v.dotc(&(&gram_r * &v)).re;
        if !(pw > 0.0) {
            continue;
        }
        let snr = proj
            .iter()
            .map(|p| p.dotc(&v).norm_sqr())
            .fold(f64::INFINITY, f64::min)
            * power
            / pw;
        if best.as_ref().is_none_or(|b| snr > b.0) {
            best = Some((snr, v, pw));
        }
    }

    let w = match best {
        Some((_, v, pw)) => (&factor * v).scale((power / pw).sqrt()),
        None => {
            let (_, u) = eig.principal();
            problem
                .normalize(&u)
                .unwrap_or_else(|| CVector::from_element(d, Complex64::new(0.0, 0.0)))
        }
    };
    let t = problem.min_snr(&w);
    (w, t)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtractionStatus {
    RankOneExact,
    Randomized,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaxMinOptions {
    pub n_candidates: usize,
    pub rank_one_tol: f64,
    pub sdp: SdpOptions,
}

impl Default for MaxMinOptions {
    fn default() -> Self {
        Self {
            n_candidates: 1000,
            rank_one_tol: 1e-6,
            sdp: SdpOptions::default(),
        }
    }
}

impl MaxMinOptions {
    pub fn with_candidates(n_candidates: usize) -> Self {
        Self {
            n_candidates,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveDiagnostics {
    pub newton_steps: usize,
    pub barrier_stages: usize,
    pub eigen_ratio: f64,
    pub primal_value: f64,
    pub duality_gap: f64,
}

#[derive(Debug, Clone)]
pub struct MaxMinSolution {
    pub w: CVector,
    pub t_achieved: f64,
    pub t_sdp: f64,
    pub status: ExtractionStatus,
    pub diagnostics: SolveDiagnostics,
}

/// Relaxation, then rank-one extraction, else randomization.
pub fn solve_maxmin<R: Rng + ?Sized>(
    problem: &MaxMinProblem,
    opts: &MaxMinOptions,
    rng: &mut R,
) -> Result<MaxMinSolution> {
    if opts.n_candidates == 0 {
        return Err(Error::Parameter("n_candidates must be at least 1".into()));
    }
    let relax = solve_sdp_relaxation(problem, &opts.sdp)?;
    let ratio = eigen_ratio(&relax.w_matrix);
    let (w, status) = match extract_rank_one(&relax.w_matrix, problem, opts.rank_one_tol) {
        Some(w) => (w, ExtractionStatus::RankOneExact),
        None => {
            let (w, _) = randomize(&relax.w_matrix, problem, opts.n_candidates, rng);
            (w, ExtractionStatus::Randomized)
        }
    };
    let t_achieved = problem.min_snr(&w);
    Ok(MaxMinSolution {
        w,
        t_achieved,
        t_sdp: relax.t_sdp,
        status,
        diagnostics: SolveDiagnostics {
            newton_steps: relax.newton_steps,
            barrier_stages: relax.barrier_stages,
            eigen_ratio: ratio,
            primal_value: relax.primal_value,
            duality_gap: relax.duality_gap(),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::complex_normal_vector;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn single_user_is_matched_filter() {
        let h = complex_normal_vector(5, &mut rng(1));
        let p = MaxMinProblem::digital(vec![h.clone()], 1.0).unwrap();
        let relax = solve_sdp_relaxation(&p, &SdpOptions::default()).unwrap();
        let target = h.norm_squared();
        assert!((relax.t_sdp - target).abs() <= 1e-8 * target);
        let expect = (&h * h.adjoint()).scale(1.0 / target);
        assert!((&relax.w_matrix - expect).norm() < 1e-6);

        let sol = solve_maxmin(&p, &MaxMinOptions::default(), &mut rng(2)).unwrap();
        assert_eq!(sol.status, ExtractionStatus::RankOneExact);
        assert!((sol.t_achieved - target).abs() <= 1e-8 * target);
    }

    #[test]
    fn single_user_scales_with_power() {
        let h = complex_normal_vector(3, &mut rng(4));
        let p = MaxMinProblem::digital(vec![h.clone()], 7.5).unwrap();
        let sol = solve_maxmin(&p, &MaxMinOptions::default(), &mut rng(0)).unwrap();
        let expect = 7.5 * h.norm_squared();
        assert!((sol.t_achieved - expect).abs() <= 1e-8 * expect);
        assert!((p.power_of(&sol.w) - 7.5).abs() <= 1e-8 * 7.5);
    }

    #[test]
    fn duplicated_user_is_redundant() {
        let h = complex_normal_vector(4, &mut rng(11));
        let one = MaxMinProblem::digital(vec![h.clone()], 1.0).unwrap();
        let two = MaxMinProblem::digital(vec![h.clone(), h.clone()], 1.0).unwrap();
        let opts = SdpOptions::default();
        let a = solve_sdp_relaxation(&one, &opts).unwrap().t_sdp;
        let b = solve_sdp_relaxation(&two, &opts).unwrap().t_sdp;
        assert!((a - b).abs() <= 1e-7 * a);
    }

    #[test]
    fn relaxation_certificate_holds() {
        let mut r = rng(21);
        for _ in 0..20 {
            let chans: Vec<CVector> = (0..4).map(|_| complex_normal_vector(6, &mut r)).collect();
            let p = MaxMinProblem::digital(chans, 2.0).unwrap();
            let relax = solve_sdp_relaxation(&p, &SdpOptions::default()).unwrap();
            let eig = HermitianEigen::new(&relax.w_matrix);
            assert!(*eig.values.last().unwrap() >= -1e-8);
            let tr: f64 = relax.w_matrix.diagonal().iter().map(|z| z.re).sum();
            assert!((tr - 2.0).abs() <= 1e-6 * 2.0);
            let min_q = p
                .channels()
                .iter()
                .map(|h| h.dotc(&(&relax.w_matrix * h)).re)
                .fold(f64::INFINITY, f64::min);
            assert!((min_q - relax.t_sdp).abs() <= 1e-6 * relax.t_sdp);
        }
    }

    #[test]
    fn extract_rank_one_cases() {
        let d = 4;
        let p = MaxMinProblem::digital(vec![complex_normal_vector(d, &mut rng(3))], 2.0).unwrap();

        let v = complex_normal_vector(d, &mut rng(5));
        let w = extract_rank_one(&(&v * v.adjoint()), &p, 1e-6).unwrap();
        assert!((p.power_of(&w) - 2.0).abs() < 1e-10);
        assert!((v.dotc(&w).norm() - v.norm() * w.norm()).abs() < 1e-9);

        assert!(extract_rank_one(&CMatrix::identity(d, d), &p, 1e-6).is_none());

        let eps = 1e-4;
        let diag = nalgebra::DVector::from_vec(vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(1.0 - 2.0 * eps, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
        ]);
        assert!(extract_rank_one(&CMatrix::from_diagonal(&diag), &p, 1e-6).is_none());
    }

    #[test]
    fn randomization_of_rank_one_matrix_is_exact() {
        let d = 4;
        let mut r = rng(8);
        let chans: Vec<CVector> = (0..3).map(|_| complex_normal_vector(d, &mut r)).collect();
        let p = MaxMinProblem::digital(chans, 1.0).unwrap();
        let v = complex_normal_vector(d, &mut r);
        let v = v.scale(1.0 / v.norm());
        let (w, t) = randomize(&(&v * v.adjoint()), &p, 50, &mut r);
        assert!((v.dotc(&w).norm() - 1.0).abs() < 1e-10);
        assert!((t - p.min_snr(&v)).abs() < 1e-10);
    }

    #[test]
    fn randomization_is_deterministic() {
        let mut r = rng(31);
        let chans: Vec<CVector> = (0..5).map(|_| complex_normal_vector(4, &mut r)).collect();
        let p = MaxMinProblem::digital(chans, 1.0).unwrap();
        let relax = solve_sdp_relaxation(&p, &SdpOptions::default()).unwrap();
        let a = randomize(&relax.w_matrix, &p, 100, &mut rng(99));
        let b = randomize(&relax.w_matrix, &p, 100, &mut rng(99));
        assert_eq!(a.0, b.0);
        assert_eq!(a.1, b.1);
    }

    #[test]
    fn singular_gram_is_a_precondition_error() {
        let v = complex_normal_vector(2, &mut rng(0));
        let g = &v * v.adjoint();
        let r = MaxMinProblem::new(vec![v.clone()], g, 1.0);
        assert!(matches!(r, Err(Error::Precondition(_))));
    }

    #[test]
    fn non_hermitian_gram_rejected() {
        let mut g = CMatrix::identity(2, 2);
        g[(0, 1)] = Complex64::new(0.5, 0.0);
        let v = complex_normal_vector(2, &mut rng(0));
        assert!(matches!(
            MaxMinProblem::new(vec![v], g, 1.0),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn mismatched_dimensions_rejected() {
        let a = complex_normal_vector(2, &mut rng(0));
        let b = complex_normal_vector(3, &mut rng(0));
        assert!(matches!(
            MaxMinProblem::digital(vec![a, b], 1.0),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn zero_channel_gives_zero() {
        let p = MaxMinProblem::digital(
            vec![CVector::zeros(3), complex_normal_vector(3, &mut rng(1))],
            1.0,
        )
        .unwrap();
        let sol = solve_maxmin(&p, &MaxMinOptions::default(), &mut rng(0)).unwrap();
        assert!(sol.t_sdp < 1e-9);
        assert!(sol.t_achieved <= sol.t_sdp * (1.0 + 1e-6) + 1e-12);
    }
}
