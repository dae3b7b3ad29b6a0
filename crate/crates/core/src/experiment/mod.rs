//! Monte Carlo harness: configuration, per-trial execution, summaries and
//! file output.
//!
//! Every method is solved once per trial at unit power. Max-min SNR scales
//! linearly with the power budget and the selected beamformer does not
//! change with it, so the record for SNR point `P` carries `P · t_unit`.

mod config;
mod output;
mod summary;

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{gen_geometric, gen_rayleigh, ChannelSet, SteeringInfo};
use crate::codebook::{
    dft_codebook, eigen_codebook, steering_codebook, uniform_cosine_angles, RfCodebook,
};
use crate::error::{Error, Result};
use crate::hybrid::{algorithm1, aod_aware_precoder, exhaustive_search, random_subset_digital};
use crate::linalg::CMatrix;
use crate::maxmin::{solve_maxmin, MaxMinOptions, MaxMinProblem};

pub use config::{preset, CdfGrid, ChannelKind, CodebookChoice, ExperimentConfig, Method};
pub use output::{emit, read_records_csv, write_records_csv, OutputPaths};
pub use summary::{summarize, Summary, SummaryRow};

/// One method's outcome on one channel realization at one SNR point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub method: String,
    pub snr_db: f64,
    pub t_achieved: f64,
    pub rate_bps_hz: f64,
    pub wall_time_s: f64,
    pub solve_count: usize,
}

impl TrialRecord {
    /// Equality on everything except the timing column.
    pub fn same_outcome(&self, other: &TrialRecord) -> bool {
        self.trial == other.trial
            && self.method == other.method
            && self.snr_db == other.snr_db
            && self.t_achieved == other.t_achieved
            && self.rate_bps_hz == other.rate_bps_hz
            && self.solve_count == other.solve_count
    }
}

/// A record together with the relaxation bound of the problem whose
/// solution it reports, at the same SNR.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub record: TrialRecord,
    pub t_sdp: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialFailure {
    pub trial: usize,
    pub method: String,
    pub message: String,
}

#[derive(Debug, Clone)]
pub struct ExperimentRun {
    pub config: ExperimentConfig,
    pub results: Vec<TrialResult>,
    pub failures: Vec<TrialFailure>,
}

impl ExperimentRun {
    pub fn records(&self) -> Vec<TrialRecord> {
        self.results.iter().map(|r| r.record.clone()).collect()
    }
}

pub fn rate_bps_hz(t: f64) -> f64 {
    (1.0 + t.max(0.0)).log2()
}

pub fn snr_to_power(snr_db: f64) -> f64 {
    10f64.powf(snr_db / 10.0)
}

const STREAMS_PER_TRIAL: u64 = 8;
const CHANNEL_STREAM: u64 = 0;
/// Both codebook searches share one stream so that a selection they both
/// visit is solved identically.
const HYBRID_STREAM: u64 = 3;

fn stream_rng(seed: u64, trial: usize, offset: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64 * STREAMS_PER_TRIAL + offset);
    rng
}

fn method_stream(method: Method) -> u64 {
    match method {
        Method::DigitalFull => 1,
        Method::DigitalSubset => 2,
        Method::HybridExhaustive | Method::HybridAlgorithm1 => HYBRID_STREAM,
        Method::AodAware => 4,
    }
}

/// The channel realization of one trial; identical across methods and runs.
pub fn trial_channel(
    config: &ExperimentConfig,
    trial: usize,
) -> Result<(ChannelSet, Option<SteeringInfo>)> {
    let mut rng = stream_rng(config.seed, trial, CHANNEL_STREAM);
    match config.channel {
        ChannelKind::Rayleigh => Ok((
            gen_rayleigh(config.num_antennas, config.num_users, &mut rng)?,
            None,
        )),
        ChannelKind::Geometric => {
            let (set, info) = gen_geometric(
                config.num_antennas,
                &config.path_counts(),
                config.spacing_ratio,
                &mut rng,
            )?;
            Ok((set, Some(info)))
        }
    }
}

fn fixed_codebook(config: &ExperimentConfig) -> Result<Option<RfCodebook>> {
    if !config.uses_codebook() {
        return Ok(None);
    }
    let m = config.num_antennas;
    match config.codebook {
        CodebookChoice::Dft => dft_codebook(m).map(Some),
        CodebookChoice::Steering => {
            steering_codebook(m, &uniform_cosine_angles(m), config.spacing_ratio).map(Some)
        }
        CodebookChoice::UserSteering | CodebookChoice::Eigen => Ok(None),
    }
}

fn realization_codebook(config: &ExperimentConfig, steering: &SteeringInfo) -> Result<RfCodebook> {
    match config.codebook {
        CodebookChoice::UserSteering => steering_codebook(
            config.num_antennas,
            &steering.all_aods(),
            steering.spacing_ratio,
        ),
        CodebookChoice::Eigen => {
            // Covariance of user k over its path gains: (M / L_k) A_k A_kᴴ.
            let m = config.num_antennas as f64;
            let covs: Vec<CMatrix> = steering
                .users
                .iter()
                .map(|u| {
                    let a = &u.steering;
                    (a * a.adjoint()).scale(m / u.path_count() as f64)
                })
                .collect();
            eigen_codebook(&covs)
        }
        CodebookChoice::Dft | CodebookChoice::Steering => {
            unreachable!("fixed codebooks are built once per run")
        }
    }
}

struct UnitOutcome {
    t_achieved: f64,
    t_sdp: f64,
    solve_count: usize,
}

fn solve_method(
    method: Method,
    config: &ExperimentConfig,
    channels: &ChannelSet,
    steering: Option<&SteeringInfo>,
    codebook: Option<&RfCodebook>,
    opts: &MaxMinOptions,
    rng: &mut ChaCha8Rng,
) -> Result<UnitOutcome> {
    let n = config.num_rf_chains;
    match method {
        Method::DigitalFull => {
            let problem = MaxMinProblem::from_channel_set(channels, 1.0)?;
            let sol = solve_maxmin(&problem, opts, rng)?;
            Ok(UnitOutcome {
                t_achieved: sol.t_achieved,
                t_sdp: sol.t_sdp,
                solve_count: 1,
            })
        }
        Method::DigitalSubset => {
            let sub = random_subset_digital(channels, n, 1.0, opts, rng)?;
            Ok(UnitOutcome {
                t_achieved: sub.solution.t_achieved,
                t_sdp: sub.solution.t_sdp,
                solve_count: 1,
            })
        }
        Method::HybridExhaustive | Method::HybridAlgorithm1 => {
            let per_trial;
            let cb = match codebook {
                Some(cb) => cb,
                None => {
                    let info = steering.ok_or_else(|| {
                        Error::NotApplicable("codebook needs geometric channel data".into())
                    })?;
                    per_trial = realization_codebook(config, info)?;
                    &per_trial
                }
            };
            let hp = if method == Method::HybridExhaustive {
                exhaustive_search(cb, n, channels, 1.0, opts, rng)?
            } else {
                algorithm1(cb, n, config.ranked_candidates, channels, 1.0, opts, rng)?
            };
            Ok(UnitOutcome {
                t_achieved: hp.t_achieved,
                t_sdp: hp.t_sdp,
                solve_count: hp.solve_count,
            })
        }
        Method::AodAware => {
            let info = steering.ok_or_else(|| {
                Error::NotApplicable("aod_aware needs geometric channel data".into())
            })?;
            let hp = aod_aware_precoder(info, channels, 1.0, opts, rng)?;
            Ok(UnitOutcome {
                t_achieved: hp.t_achieved,
                t_sdp: hp.t_sdp,
                solve_count: hp.solve_count,
            })
        }
    }
}

fn methods_in_order(config: &ExperimentConfig) -> Vec<Method> {
    let mut methods = config.methods.clone();
    methods.sort();
    methods.dedup();
    methods
}

/// Run one trial: draw its channel, solve every method at unit power and
/// expand the outcomes over the SNR grid.
pub fn run_trial(
    config: &ExperimentConfig,
    trial: usize,
) -> Result<(Vec<TrialResult>, Vec<TrialFailure>)> {
    config.validate()?;
    let codebook = fixed_codebook(config)?;
    Ok(run_trial_with(config, trial, codebook.as_ref()))
}

fn run_trial_with(
    config: &ExperimentConfig,
    trial: usize,
    codebook: Option<&RfCodebook>,
) -> (Vec<TrialResult>, Vec<TrialFailure>) {
    let mut results = Vec::new();
    let mut failures = Vec::new();
    let methods = methods_in_order(config);
    let (channels, steering) = match trial_channel(config, trial) {
        Ok(c) => c,
        Err(e) => {
            for m in methods {
                failures.push(TrialFailure {
                    trial,
                    method: m.name().into(),
                    message: e.to_string(),
                });
            }
            return (results, failures);
        }
    };
    let opts = MaxMinOptions::with_candidates(config.n_candidates);
    for method in methods {
        let mut rng = stream_rng(config.seed, trial, method_stream(method));
        let start = Instant::now();
        let outcome = solve_method(
            method,
            config,
            &channels,
            steering.as_ref(),
            codebook,
            &opts,
            &mut rng,
        );
        let elapsed = if config.record_timing {
            start.elapsed().as_secs_f64()
        } else {
            0.0
        };
        match outcome {
            Ok(out) => {
                for &snr_db in &config.snr_grid_db {
                    let p = snr_to_power(snr_db);
                    let t = p * out.t_achieved;
                    results.push(TrialResult {
                        record: TrialRecord {
                            trial,
                            method: method.name().into(),
                            snr_db,
                            t_achieved: t,
                            rate_bps_hz: rate_bps_hz(t),
                            wall_time_s: elapsed,
                            solve_count: out.solve_count,
                        },
                        t_sdp: p * out.t_sdp,
                    });
                }
            }
            Err(e) => failures.push(TrialFailure {
                trial,
                method: method.name().into(),
                message: e.to_string(),
            }),
        }
    }
    (results, failures)
}

/// Run every trial of `config` in parallel. Output order is trial, then
/// method, then SNR grid position, independent of the worker count.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentRun> {
    config.validate()?;
    let codebook = fixed_codebook(config)?;
    let per_trial: Vec<_> = (0..config.trials)
        .into_par_iter()
        .map(|trial| run_trial_with(config, trial, codebook.as_ref()))
        .collect();
    let mut results = Vec::new();
    let mut failures = Vec::new();
    for (r, f) in per_trial {
        results.extend(r);
        failures.extend(f);
    }
    Ok(ExperimentRun {
        config: config.clone(),
        results,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(methods: Vec<Method>) -> ExperimentConfig {
        ExperimentConfig {
            name: "t".into(),
            num_antennas: 4,
            num_rf_chains: 2,
            num_users: 2,
            channel: ChannelKind::Rayleigh,
            path_counts: None,
            spacing_ratio: 0.5,
            codebook: CodebookChoice::Dft,
            methods,
            ranked_candidates: 1,
            snr_grid_db: vec![0.0, 10.0],
            trials: 3,
            n_candidates: 50,
            seed: 9,
            cdf_grid: None,
            record_timing: false,
        }
    }

    #[test]
    fn presets_parse_and_validate() {
        for name in ["fig1a", "fig1b", "fig1c"] {
            let cfg = preset(name).unwrap();
            cfg.validate().unwrap();
            assert_eq!(cfg.trials, 1000);
        }
        assert!(preset("fig2").is_err());
    }

    #[test]
    fn validation_rejects_bad_configs() {
        let mut c = small(vec![Method::DigitalFull]);
        c.num_rf_chains = 5;
        assert!(c.validate().is_err());

        let mut c = small(vec![Method::HybridAlgorithm1]);
        c.ranked_candidates = 7; // 4 choose 2 = 6
        assert!(c.validate().is_err());
        c.ranked_candidates = 6;
        assert!(c.validate().is_ok());

        let mut c = small(vec![Method::DigitalFull]);
        c.trials = 0;
        assert!(c.validate().is_err());

        assert!(small(vec![Method::AodAware]).validate().is_err());

        let mut c = small(vec![Method::HybridExhaustive]);
        c.codebook = CodebookChoice::Eigen;
        assert!(c.validate().is_err());

        let mut c = small(vec![Method::AodAware]);
        c.channel = ChannelKind::Geometric;
        c.path_counts = Some(vec![3, 2]);
        assert!(c.validate().is_err());
        c.path_counts = Some(vec![2, 2]);
        assert!(c.validate().is_ok());
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let text = r#"{"M":4,"N":2,"K":2,"channel":"rayleigh","codebook":"dft",
            "methods":["digital_full"],"I":1,"snr_grid_db":[0],"trials":1,"seed":0,"bogus":1}"#;
        assert!(ExperimentConfig::from_json(text).is_err());
    }

    #[test]
    fn records_are_ordered_and_scaled_by_power() {
        let cfg = small(vec![Method::HybridAlgorithm1, Method::DigitalFull]);
        let run = run_experiment(&cfg).unwrap();
        assert!(run.failures.is_empty());
        assert_eq!(run.results.len(), 3 * 2 * 2);
        let r = &run.results;
        assert_eq!(r[0].record.method, "digital_full");
        assert_eq!(r[2].record.method, "hybrid_algorithm1");
        assert_eq!(r[4].record.trial, 1);
        let ratio = r[1].record.t_achieved / r[0].record.t_achieved;
        assert!((ratio - 10.0).abs() < 1e-12);
    }

    #[test]
    fn stream_offsets_do_not_collide() {
        let mut seen = std::collections::HashSet::new();
        for trial in 0..100usize {
            seen.insert(trial as u64 * STREAMS_PER_TRIAL + CHANNEL_STREAM);
            for m in Method::ALL {
                assert!(method_stream(m) < STREAMS_PER_TRIAL);
                seen.insert(trial as u64 * STREAMS_PER_TRIAL + method_stream(m));
            }
        }
        assert_eq!(seen.len(), 100 * 5);
    }
}
