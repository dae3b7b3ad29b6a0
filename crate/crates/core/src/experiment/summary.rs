use serde::{Deserialize, Serialize};

use super::{CdfGrid, TrialRecord};
use crate::error::{Error, Result};

const DEFAULT_CDF_POINTS: usize = 101;

/// Aggregates for one method at one SNR point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub method: String,
    pub snr_db: f64,
    pub trials: usize,
    pub mean_rate_bps_hz: f64,
    pub mean_t_achieved: f64,
    pub mean_solve_count: f64,
    pub mean_wall_time_s: f64,
    /// Rate at probabilities 0.1, 0.2, …, 0.9 (linear interpolation between
    /// order statistics).
    pub deciles: Vec<f64>,
    /// Fraction of trials with rate ≤ each point of `Summary::cdf_grid`.
    pub cdf: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub cdf_grid: Vec<f64>,
    pub rows: Vec<SummaryRow>,
}

impl Summary {
    pub fn row(&self, method: &str, snr_db: f64) -> Option<&SummaryRow> {
        self.rows
            .iter()
            .find(|r| r.method == method && r.snr_db == snr_db)
    }

    /// Methods in row order, without repetition.
    pub fn methods(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for r in &self.rows {
            if !out.contains(&r.method) {
                out.push(r.method.clone());
            }
        }
        out
    }

    /// SNR points in ascending order, without repetition.
    pub fn snr_points(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self.rows.iter().map(|r| r.snr_db).collect();
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }
}

/// Empirical quantile with linear interpolation; `sorted` must be ascending
/// and nonempty.
pub(crate) fn quantile(sorted: &[f64], p: f64) -> f64 {
    let pos = p.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

fn default_grid(records: &[TrialRecord]) -> CdfGrid {
    let top = records.iter().map(|r| r.rate_bps_hz).fold(0.0, f64::max);
    CdfGrid {
        min: 0.0,
        max: top.ceil().max(1.0),
        points: DEFAULT_CDF_POINTS,
    }
}

/// Per method × SNR aggregates. Methods keep their order of first
/// appearance; SNR points are ascending. Without a grid, the CDF is
/// evaluated on `DEFAULT_CDF_POINTS` points from 0 to the ceiling of the
/// largest rate.
pub fn summarize(records: &[TrialRecord], grid: Option<&CdfGrid>) -> Result<Summary> {
    if records.is_empty() {
        return Err(Error::EmptyInput("no trial records to summarize".into()));
    }
    let grid = grid.copied().unwrap_or_else(|| default_grid(records));
    let cdf_grid = grid.values();

    let mut methods: Vec<&str> = Vec::new();
    for r in records {
        if !methods.contains(&r.method.as_str()) {
            methods.push(&r.method);
        }
    }
    let mut snrs: Vec<f64> = records.iter().map(|r| r.snr_db).collect();
    snrs.sort_by(f64::total_cmp);
    snrs.dedup();

    let mut rows = Vec::new();
    for method in &methods {
        for &snr in &snrs {
            let group: Vec<&TrialRecord> = records
                .iter()
                .filter(|r| r.method == *method && r.snr_db == snr)
                .collect();
            if group.is_empty() {
                continue;
            }
            let n = group.len() as f64;
            let mean = |f: fn(&TrialRecord) -> f64| group.iter().map(|r| f(r)).sum::<f64>() / n;
            let mut rates: Vec<f64> = group.iter().map(|r| r.rate_bps_hz).collect();
            rates.sort_by(f64::total_cmp);
            let deciles = (1..10).map(|i| quantile(&rates, i as f64 / 10.0)).collect();
            let cdf = cdf_grid
                .iter()
                .map(|&x| rates.partition_point(|&r| r <= x) as f64 / n)
                .collect();
            rows.push(SummaryRow {
                method: method.to_string(),
                snr_db: snr,
                trials: group.len(),
                mean_rate_bps_hz: mean(|r| r.rate_bps_hz),
                mean_t_achieved: mean(|r| r.t_achieved),
                mean_solve_count: mean(|r| r.solve_count as f64),
                mean_wall_time_s: mean(|r| r.wall_time_s),
                deciles,
                cdf,
            });
        }
    }
    Ok(Summary { cdf_grid, rows })
}
