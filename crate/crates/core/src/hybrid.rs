//! Hybrid precoder design: upper-bound ranking of RF precoders, exhaustive
//! search, the AoD-aware steering construction, and the random antenna
//! subset baseline.
//!
//! Every baseband solve for a codebook selection draws its randomization
//! from a ChaCha stream keyed by one seed taken from the caller's generator
//! and indexed by the selection's lexicographic position. A selection is
//! therefore solved identically no matter which search visits it or in
//! which order, so exhaustive search and ranking search with
//! `I = C choose N` agree exactly, and results are monotone in `I`.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channel::{ChannelSet, SteeringInfo};
use crate::codebook::{binomial, enumerate_selections, RfCodebook, RfSelection};
use crate::error::{Error, Result};
use crate::linalg::{orthonormal_columns, CMatrix, CVector};
use crate::maxmin::{solve_maxmin, MaxMinOptions, MaxMinProblem, MaxMinSolution};

/// `min_k ‖P_F h̄_k‖²`, the squared norm of each user's projection onto the
/// column space of `f_rf`, minimized over users.
///
/// This equals `min_k h̄_kᴴ F (FᴴF)⁻¹ Fᴴ h̄_k` and bounds the unit-power
/// max-min SNR reachable with this RF precoder. It is computed from a thin
/// QR factorization instead of the explicit inverse.
pub fn rf_upper_bound(f_rf: &CMatrix, channels: &ChannelSet) -> Result<f64> {
    if f_rf.nrows() != channels.num_antennas() {
        return Err(Error::Dimension(format!(
            "RF precoder has {} rows for {} antennas",
            f_rf.nrows(),
            channels.num_antennas()
        )));
    }
    let q = orthonormal_columns(f_rf)?;
    let proj = q.adjoint() * channels.h_bar();
    Ok(proj
        .column_iter()
        .map(|c| c.norm_squared())
        .fold(f64::INFINITY, f64::min))
}

/// A codebook selection with its upper-bound score.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedCandidate {
    pub selection: RfSelection,
    pub score: f64,
    /// Position of the selection in lexicographic enumeration order.
    pub lex_index: u64,
}

/// The `I` selections with the largest upper bound, best first; equal scores
/// keep lexicographic order. Rank-deficient selections are skipped.
pub fn rank_selections(
    codebook: &RfCodebook,
    n: usize,
    channels: &ChannelSet,
    top: usize,
) -> Result<Vec<RankedCandidate>> {
    let total = binomial(codebook.size(), n);
    if top == 0 || top as u64 > total {
        return Err(Error::Parameter(format!(
            "I = {top} outside [1, {total}] for {n} of {} columns",
            codebook.size()
        )));
    }
    let mut scored = Vec::with_capacity(total as usize);
    for (lex_index, selection) in enumerate_selections(codebook, n)?.enumerate() {
        match rf_upper_bound(&selection.f_rf, channels) {
            Ok(score) => scored.push(RankedCandidate {
                selection,
                score,
                lex_index: lex_index as u64,
            }),
            Err(Error::Degenerate(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    if scored.len() < top {
        return Err(Error::Degenerate(format!(
            "only {} of {total} selections have full column rank, I = {top}",
            scored.len()
        )));
    }
    // stable: equal scores stay in lexicographic order
    scored.sort_by(|a, b| b.score.total_cmp(&a.score));
    scored.truncate(top);
    Ok(scored)
}

/// Baseband solution for a fixed RF precoder.
#[derive(Debug, Clone)]
pub struct BasebandSolution {
    pub w_bb: CVector,
    pub t_achieved: f64,
    pub solution: MaxMinSolution,
}

/// Solve `max min_k |ĥ_kᴴ w_bb|²` s.t. `‖F w_bb‖² = P` with `ĥ_k = Fᴴ h̄_k`.
pub fn solve_baseband<R: Rng + ?Sized>(
    f_rf: &CMatrix,
    channels: &ChannelSet,
    power: f64,
    opts: &MaxMinOptions,
    rng: &mut R,
) -> Result<BasebandSolution> {
    let problem = baseband_problem(f_rf, channels, power)?;
    let solution = solve_maxmin(&problem, opts, rng)?;
    Ok(BasebandSolution {
        w_bb: solution.w.clone(),
        t_achieved: solution.t_achieved,
        solution,
    })
}

/// The max-min problem over the baseband vector for a fixed RF precoder.
pub fn baseband_problem(
    f_rf: &CMatrix,
    channels: &ChannelSet,
    power: f64,
) -> Result<MaxMinProblem> {
    if f_rf.nrows() != channels.num_antennas() {
        return Err(Error::Dimension(format!(
            "RF precoder has {} rows for {} antennas",
            f_rf.nrows(),
            channels.num_antennas()
        )));
    }
    orthonormal_columns(f_rf)?;
    let effective: Vec<CVector> = channels
        .users()
        .iter()
        .map(|h| f_rf.adjoint() * h)
        .collect();
    MaxMinProblem::new(effective, f_rf.adjoint() * f_rf, power)
}

/// Where the RF precoder of a hybrid design came from.
#[derive(Debug, Clone, PartialEq)]
pub enum RfPrecoder {
    Codebook(RfSelection),
    Steering(CMatrix),
}

impl RfPrecoder {
    pub fn matrix(&self) -> &CMatrix {
        match self {
            RfPrecoder::Codebook(sel) => &sel.f_rf,
            RfPrecoder::Steering(v) => v,
        }
    }
}

#[derive(Debug, Clone)]
pub struct HybridPrecoder {
    pub rf: RfPrecoder,
    pub w_bb: CVector,
    pub t_achieved: f64,
    /// Relaxation bound of the baseband problem that produced `w_bb`.
    pub t_sdp: f64,
    /// Upper bound `rf_upper_bound` of the RF precoder, at unit power.
    pub score: f64,
    /// Number of baseband max-min solves performed.
    pub solve_count: usize,
}

impl HybridPrecoder {
    pub fn f_rf(&self) -> &CMatrix {
        self.rf.matrix()
    }

    /// Overall transmit beamformer `F_RF w_BB`.
    pub fn beamformer(&self) -> CVector {
        self.f_rf() * &self.w_bb
    }
}

fn candidate_rng(base_seed: u64, lex_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(base_seed);
    rng.set_stream(lex_index);
    rng
}

fn best_of<I>(
    candidates: I,
    channels: &ChannelSet,
    power: f64,
    opts: &MaxMinOptions,
    base_seed: u64,
) -> Result<HybridPrecoder>
where
    I: IntoIterator<Item = RankedCandidate>,
{
    let mut best: Option<HybridPrecoder> = None;
    let mut count = 0;
    for cand in candidates {
        count += 1;
        let mut rng = candidate_rng(base_seed, cand.lex_index);
        let bb = solve_baseband(&cand.selection.f_rf, channels, power, opts, &mut rng)?;
        if best.as_ref().is_none_or(|b| bb.t_achieved > b.t_achieved) {
            best = Some(HybridPrecoder {
                rf: RfPrecoder::Codebook(cand.selection),
                w_bb: bb.w_bb,
                t_achieved: bb.t_achieved,
                t_sdp: bb.solution.t_sdp,
                score: cand.score,
                solve_count: 0,
            });
        }
    }
    let mut best = best.ok_or_else(|| Error::EmptyInput("no RF candidates".into()))?;
    best.solve_count = count;
    Ok(best)
}

/// Rank all selections by the upper bound, solve the baseband problem for
/// the top `I`, keep the largest achieved min-SNR (ties: earlier in rank).
pub fn algorithm1<R: Rng + ?Sized>(
    codebook: &RfCodebook,
    n: usize,
    top: usize,
    channels: &ChannelSet,
    power: f64,
    opts: &MaxMinOptions,
    rng: &mut R,
) -> Result<HybridPrecoder> {
    let ranked = rank_selections(codebook, n, channels, top)?;
    let base_seed = rng.next_u64();
    best_of(ranked, channels, power, opts, base_seed)
}

/// Solve every selection in lexicographic order and keep the best.
pub fn exhaustive_search<R: Rng + ?Sized>(
    codebook: &RfCodebook,
    n: usize,
    channels: &ChannelSet,
    power: f64,
    opts: &MaxMinOptions,
    rng: &mut R,
) -> Result<HybridPrecoder> {
    let mut all = Vec::new();
    for (lex_index, selection) in enumerate_selections(codebook, n)?.enumerate() {
        match rf_upper_bound(&selection.f_rf, channels) {
            Ok(score) => all.push(RankedCandidate {
                selection,
                score,
                lex_index: lex_index as u64,
            }),
            Err(Error::Degenerate(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    let base_seed = rng.next_u64();
    best_of(all, channels, power, opts, base_seed)
}

/// RF precoder equal to the stacked steering vectors of all users' paths,
/// `N = Σ L_k` RF chains, followed by the baseband max-min solve.
pub fn aod_aware_precoder<R: Rng + ?Sized>(
    steering: &SteeringInfo,
    channels: &ChannelSet,
    power: f64,
    opts: &MaxMinOptions,
    rng: &mut R,
) -> Result<HybridPrecoder> {
    let m = channels.num_antennas();
    let total = steering.total_paths();
    if total > m {
        return Err(Error::NotApplicable(format!(
            "{total} paths exceed {m} antennas"
        )));
    }
    if steering.users.len() != channels.num_users() {
        return Err(Error::Dimension(format!(
            "steering data for {} users, channels for {}",
            steering.users.len(),
            channels.num_users()
        )));
    }
    let v = steering.stacked_steering();
    let score = rf_upper_bound(&v, channels)?;
    let bb = solve_baseband(&v, channels, power, opts, rng)?;
    Ok(HybridPrecoder {
        rf: RfPrecoder::Steering(v),
        w_bb: bb.w_bb,
        t_achieved: bb.t_achieved,
        t_sdp: bb.solution.t_sdp,
        score,
        solve_count: 1,
    })
}

/// Digital max-min precoding over a uniformly drawn subset of `N` antennas.
#[derive(Debug, Clone)]
pub struct SubsetSolution {
    /// Selected antenna rows, increasing.
    pub antennas: Vec<usize>,
    pub solution: MaxMinSolution,
}

impl SubsetSolution {
    /// The `M`-dimensional beamformer, zero outside the subset.
    pub fn beamformer(&self, num_antennas: usize) -> CVector {
        let mut w = CVector::zeros(num_antennas);
        for (pos, &row) in self.antennas.iter().enumerate() {
            w[row] = self.solution.w[pos];
        }
        w
    }
}

pub fn random_subset_digital<R: Rng + ?Sized>(
    channels: &ChannelSet,
    n: usize,
    power: f64,
    opts: &MaxMinOptions,
    rng: &mut R,
) -> Result<SubsetSolution> {
    let m = channels.num_antennas();
    if n == 0 || n > m {
        return Err(Error::Dimension(format!(
            "antenna subset of {n} out of {m}"
        )));
    }
    let mut antennas = index::sample(rng, m, n).into_vec();
    antennas.sort_unstable();
    let sub = channels.restrict_rows(&antennas)?;
    let problem = MaxMinProblem::from_channel_set(&sub, power)?;
    let solution = solve_maxmin(&problem, opts, rng)?;
    Ok(SubsetSolution { antennas, solution })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{gen_geometric, gen_rayleigh};
    use crate::codebook::dft_codebook;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn bound_with_full_rank_square_precoder_is_channel_norm() {
        let ch = gen_rayleigh(4, 3, &mut rng(1)).unwrap();
        let f = dft_codebook(4).unwrap().columns().clone();
        let bound = rf_upper_bound(&f, &ch).unwrap();
        let expect = ch
            .users()
            .iter()
            .map(|h| h.norm_squared())
            .fold(f64::INFINITY, f64::min);
        assert!((bound - expect).abs() < 1e-12 * expect);
    }

    #[test]
    fn bound_with_orthonormal_columns() {
        let ch = gen_rayleigh(6, 2, &mut rng(2)).unwrap();
        let sel = dft_codebook(6).unwrap().select(&[1, 4]).unwrap();
        let bound = rf_upper_bound(&sel.f_rf, &ch).unwrap();
        let expect = ch
            .users()
            .iter()
            .map(|h| (sel.f_rf.adjoint() * h).norm_squared())
            .fold(f64::INFINITY, f64::min);
        assert!((bound - expect).abs() < 1e-12 * expect);
    }

    #[test]
    fn bound_rejects_rank_deficient() {
        let ch = gen_rayleigh(4, 1, &mut rng(3)).unwrap();
        let col = dft_codebook(4).unwrap().column(0);
        let f = CMatrix::from_columns(&[col.clone(), col]);
        assert!(matches!(rf_upper_bound(&f, &ch), Err(Error::Degenerate(_))));
    }

    #[test]
    fn ranking_contracts() {
        let ch = gen_rayleigh(6, 2, &mut rng(4)).unwrap();
        let cb = dft_codebook(6).unwrap();
        let all = rank_selections(&cb, 2, &ch, 15).unwrap();
        assert_eq!(all.len(), 15);
        assert!(all.windows(2).all(|w| w[0].score >= w[1].score));
        let one = rank_selections(&cb, 2, &ch, 1).unwrap();
        assert_eq!(one[0].selection, all[0].selection);
        let min_norm = ch
            .users()
            .iter()
            .map(|h| h.norm_squared())
            .fold(f64::INFINITY, f64::min);
        assert!(all
            .iter()
            .all(|c| c.score >= 0.0 && c.score <= min_norm + 1e-12));
        assert!(matches!(
            rank_selections(&cb, 2, &ch, 0),
            Err(Error::Parameter(_))
        ));
        assert!(matches!(
            rank_selections(&cb, 2, &ch, 16),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn exhaustive_equals_algorithm1_with_all_candidates() {
        let ch = gen_rayleigh(6, 2, &mut rng(5)).unwrap();
        let cb = dft_codebook(6).unwrap();
        let opts = MaxMinOptions::with_candidates(200);
        let a = algorithm1(&cb, 2, 15, &ch, 3.0, &opts, &mut rng(6)).unwrap();
        let b = exhaustive_search(&cb, 2, &ch, 3.0, &opts, &mut rng(6)).unwrap();
        assert_eq!(a.t_achieved, b.t_achieved);
        assert_eq!(a.rf, b.rf);
        assert_eq!(a.solve_count, 15);
        assert_eq!(b.solve_count, 15);
    }

    #[test]
    fn single_user_baseband_meets_bound() {
        let ch = gen_rayleigh(6, 1, &mut rng(7)).unwrap();
        let sel = dft_codebook(6).unwrap().select(&[0, 3]).unwrap();
        let bb =
            solve_baseband(&sel.f_rf, &ch, 2.0, &MaxMinOptions::default(), &mut rng(0)).unwrap();
        let bound = rf_upper_bound(&sel.f_rf, &ch).unwrap();
        assert!((bb.t_achieved - 2.0 * bound).abs() < 1e-8 * bound);
    }

    #[test]
    fn aod_aware_single_user_single_path() {
        let (ch, info) = gen_geometric(8, &[1], 0.5, &mut rng(8)).unwrap();
        let hp =
            aod_aware_precoder(&info, &ch, 1.5, &MaxMinOptions::default(), &mut rng(0)).unwrap();
        let expect = 1.5 * ch.user(0).norm_squared();
        assert!((hp.t_achieved - expect).abs() < 1e-8 * expect);
        let w = hp.beamformer();
        assert!((w.norm_squared() - 1.5).abs() < 1e-8 * 1.5);
    }

    #[test]
    fn aod_aware_rejects_too_many_paths() {
        let (ch, info) = gen_geometric(4, &[3, 2], 0.5, &mut rng(9)).unwrap();
        let r = aod_aware_precoder(&info, &ch, 1.0, &MaxMinOptions::default(), &mut rng(0));
        assert!(matches!(r, Err(Error::NotApplicable(_))));
    }

    #[test]
    fn subset_of_one_antenna() {
        let ch = gen_rayleigh(5, 3, &mut rng(10)).unwrap();
        let sol =
            random_subset_digital(&ch, 1, 2.0, &MaxMinOptions::default(), &mut rng(1)).unwrap();
        let i = sol.antennas[0];
        let expect = 2.0
            * (0..3)
                .map(|k| ch.h_bar()[(i, k)].norm_sqr())
                .fold(f64::INFINITY, f64::min);
        assert!((sol.solution.t_achieved - expect).abs() < 1e-8 * expect);
    }

    #[test]
    fn full_subset_matches_digital() {
        let ch = gen_rayleigh(4, 2, &mut rng(11)).unwrap();
        let opts = MaxMinOptions::default();
        let sub = random_subset_digital(&ch, 4, 1.0, &opts, &mut rng(2)).unwrap();
        assert_eq!(sub.antennas, vec![0, 1, 2, 3]);
        let full = solve_maxmin(
            &MaxMinProblem::from_channel_set(&ch, 1.0).unwrap(),
            &opts,
            &mut rng(3),
        )
        .unwrap();
        assert!((sub.solution.t_sdp - full.t_sdp).abs() < 1e-8 * full.t_sdp);
    }

    #[test]
    fn subset_size_checked() {
        let ch = gen_rayleigh(3, 1, &mut rng(0)).unwrap();
        let opts = MaxMinOptions::default();
        assert!(random_subset_digital(&ch, 4, 1.0, &opts, &mut rng(0)).is_err());
        assert!(random_subset_digital(&ch, 0, 1.0, &opts, &mut rng(0)).is_err());
    }
}
