use serde::{Deserialize, Serialize};

use crate::codebook::binomial;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelKind {
    Rayleigh,
    Geometric,
}

/// RF codebook used by the codebook-based hybrid methods.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CodebookChoice {
    /// Square DFT.
    Dft,
    /// Steering vectors on a uniform-cosine angle grid (`M` columns).
    Steering,
    /// Steering vectors of every path of the current realization
    /// (geometric channels, `Σ L_k` columns).
    UserSteering,
    /// Constant-modulus projection of each user's dominant covariance
    /// eigenvector (geometric channels, `K` columns).
    Eigen,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    DigitalFull,
    DigitalSubset,
    HybridExhaustive,
    HybridAlgorithm1,
    AodAware,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::DigitalFull,
        Method::DigitalSubset,
        Method::HybridExhaustive,
        Method::HybridAlgorithm1,
        Method::AodAware,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::DigitalFull => "digital_full",
            Method::DigitalSubset => "digital_subset",
            Method::HybridExhaustive => "hybrid_exhaustive",
            Method::HybridAlgorithm1 => "hybrid_algorithm1",
            Method::AodAware => "aod_aware",
        }
    }

    pub fn from_name(name: &str) -> Option<Method> {
        Method::ALL.into_iter().find(|m| m.name() == name)
    }
}

/// Uniform grid on which empirical rate CDFs are reported.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CdfGrid {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl CdfGrid {
    pub fn values(&self) -> Vec<f64> {
        if self.points <= 1 {
            return vec![self.min];
        }
        let step = (self.max - self.min) / (self.points - 1) as f64;
        (0..self.points)
            .map(|i| self.min + step * i as f64)
            .collect()
    }
}

fn default_name() -> String {
    "experiment".into()
}
fn default_spacing() -> f64 {
    0.5
}
fn default_candidates() -> usize {
    1000
}
fn default_true() -> bool {
    true
}

/// Declarative description of one Monte Carlo study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_name")]
    pub name: String,
    #[serde(alias = "M")]
    pub num_antennas: usize,
    #[serde(alias = "N")]
    pub num_rf_chains: usize,
    #[serde(alias = "K")]
    pub num_users: usize,
    pub channel: ChannelKind,
    /// Paths per user for geometric channels; one path each when omitted.
    #[serde(default)]
    pub path_counts: Option<Vec<usize>>,
    /// Antenna spacing over wavelength.
    #[serde(default = "default_spacing")]
    pub spacing_ratio: f64,
    pub codebook: CodebookChoice,
    pub methods: Vec<Method>,
    /// Number of top-ranked RF precoders solved by the ranking search.
    #[serde(alias = "I")]
    pub ranked_candidates: usize,
    pub snr_grid_db: Vec<f64>,
    pub trials: usize,
    /// Gaussian randomization draws per max-min solve.
    #[serde(default = "default_candidates")]
    pub n_candidates: usize,
    pub seed: u64,
    #[serde(default)]
    pub cdf_grid: Option<CdfGrid>,
    /// When false, wall times are recorded as zero so that output files are
    /// byte-for-byte reproducible.
    #[serde(default = "default_true")]
    pub record_timing: bool,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parameter(format!("config: {e}")))
    }

    pub fn path_counts(&self) -> Vec<usize> {
        self.path_counts
            .clone()
            .unwrap_or_else(|| vec![1; self.num_users])
    }

    pub fn total_paths(&self) -> usize {
        self.path_counts().iter().sum()
    }

    /// Number of columns of the configured codebook.
    pub fn codebook_size(&self) -> usize {
        match self.codebook {
            CodebookChoice::Dft | CodebookChoice::Steering => self.num_antennas,
            CodebookChoice::UserSteering => self.total_paths(),
            CodebookChoice::Eigen => self.num_users,
        }
    }

    pub fn uses_codebook(&self) -> bool {
        self.methods
            .iter()
            .any(|m| matches!(m, Method::HybridExhaustive | Method::HybridAlgorithm1))
    }

    pub fn validate(&self) -> Result<()> {
        let (m, n, k) = (self.num_antennas, self.num_rf_chains, self.num_users);
        if m == 0 || n == 0 || k == 0 {
            return Err(Error::Parameter("M, N and K must be positive".into()));
        }
        if n > m {
            return Err(Error::Parameter(format!("N = {n} exceeds M = {m}")));
        }
        if k > m {
            return Err(Error::Parameter(format!("K = {k} exceeds M = {m}")));
        }
        if self.trials == 0 {
            return Err(Error::Parameter("trials must be at least 1".into()));
        }
        if self.n_candidates == 0 {
            return Err(Error::Parameter("n_candidates must be at least 1".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::Parameter("no methods requested".into()));
        }
        if self.snr_grid_db.is_empty() || self.snr_grid_db.iter().any(|s| !s.is_finite()) {
            return Err(Error::Parameter(
                "snr_grid_db must be a non-empty list of finite values".into(),
            ));
        }
        if !(self.spacing_ratio > 0.0 && self.spacing_ratio.is_finite()) {
            return Err(Error::Parameter(format!(
                "spacing_ratio {}",
                self.spacing_ratio
            )));
        }
        if let Some(g) = &self.cdf_grid {
            if g.points == 0 || !(g.max >= g.min) {
                return Err(Error::Parameter(
                    "cdf_grid needs points >= 1 and max >= min".into(),
                ));
            }
        }
        let geometric = self.channel == ChannelKind::Geometric;
        if let Some(pc) = &self.path_counts {
            if !geometric {
                return Err(Error::Parameter(
                    "path_counts only apply to geometric channels".into(),
                ));
            }
            if pc.len() != k || pc.contains(&0) {
                return Err(Error::Parameter(format!(
                    "path_counts must list {k} positive path counts"
                )));
            }
        }
        if self.methods.contains(&Method::AodAware) {
            if !geometric {
                return Err(Error::Parameter(
                    "aod_aware needs geometric channels".into(),
                ));
            }
            if self.total_paths() > m {
                return Err(Error::Parameter(format!(
                    "aod_aware needs Σ L_k = {} <= M = {m}",
                    self.total_paths()
                )));
            }
        }
        if self.uses_codebook() {
            if matches!(
                self.codebook,
                CodebookChoice::UserSteering | CodebookChoice::Eigen
            ) && !geometric
            {
                return Err(Error::Parameter(
                    "user_steering and eigen codebooks need geometric channels".into(),
                ));
            }
            let c = self.codebook_size();
            if n > c {
                return Err(Error::Parameter(format!(
                    "N = {n} exceeds the codebook size {c}"
                )));
            }
            if self.methods.contains(&Method::HybridAlgorithm1) {
                let total = binomial(c, n);
                if self.ranked_candidates == 0 || self.ranked_candidates as u64 > total {
                    return Err(Error::Parameter(format!(
                        "I = {} outside [1, {total}]",
                        self.ranked_candidates
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Shipped configurations reproducing the three evaluation panels.
pub fn preset(name: &str) -> Result<ExperimentConfig> {
    let text = match name {
        "fig1a" => include_str!("../../presets/fig1a.json"),
        "fig1b" => include_str!("../../presets/fig1b.json"),
        "fig1c" => include_str!("../../presets/fig1c.json"),
        other => {
            return Err(Error::Parameter(format!(
                "unknown preset {other:?} (expected fig1a, fig1b or fig1c)"
            )))
        }
    };
    ExperimentConfig::from_json(text)
}
