use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use super::{Summary, TrialRecord};
use crate::error::{Error, Result};

const CSV_HEADER: &str = "trial,method,snr_db,t_achieved,rate_bps_hz,wall_time_s,solve_count";

/// Files written by [`emit`].
#[derive(Debug, Clone, PartialEq)]
pub struct OutputPaths {
    pub records_csv: PathBuf,
    pub summary_json: PathBuf,
    pub rate_vs_snr: PathBuf,
    pub cdfs: Vec<PathBuf>,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.display().to_string(),
        source,
    }
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(source) => Error::Io {
            path: path.display().to_string(),
            source,
        },
        other => Error::Format {
            path: path.display().to_string(),
            message: format!("{other:?}"),
        },
    }
}

pub fn write_records_csv(records: &[TrialRecord], path: &Path) -> Result<()> {
    let file = fs::File::create(path).map_err(io_err(path))?;
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(file);
    w.write_record(CSV_HEADER.split(','))
        .map_err(|e| csv_err(path, e))?;
    for r in records {
        w.serialize(r).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(io_err(path))
}

pub fn read_records_csv(path: &Path) -> Result<Vec<TrialRecord>> {
    let file = fs::File::open(path).map_err(io_err(path))?;
    let mut r = csv::Reader::from_reader(file);
    let header = r.headers().map_err(|e| csv_err(path, e))?;
    if header.iter().collect::<Vec<_>>().join(",") != CSV_HEADER {
        return Err(Error::Format {
            path: path.display().to_string(),
            message: format!("expected header `{CSV_HEADER}`"),
        });
    }
    r.deserialize()
        .map(|rec| rec.map_err(|e| csv_err(path, e)))
        .collect()
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut f = fs::File::create(path).map_err(io_err(path))?;
    f.write_all(text.as_bytes()).map_err(io_err(path))
}

fn snr_label(snr_db: f64) -> String {
    format!("{snr_db}").replace('.', "p")
}

fn data_table(x_name: &str, methods: &[String], rows: Vec<(f64, Vec<f64>)>) -> String {
    let mut out = format!("# {x_name} {}\n", methods.join(" "));
    for (x, ys) in rows {
        out.push_str(&format!("{x}"));
        for y in ys {
            out.push_str(&format!(" {y}"));
        }
        out.push('\n');
    }
    out
}

/// Write `records.csv`, `summary.json`, `rate_vs_snr.dat` (mean rate per
/// method) and one `cdf_<snr>dB.dat` per SNR point into `dir`, creating it
/// if needed.
pub fn emit(records: &[TrialRecord], summary: &Summary, dir: &Path) -> Result<OutputPaths> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let records_csv = dir.join("records.csv");
    write_records_csv(records, &records_csv)?;

    let summary_json = dir.join("summary.json");
    let json = serde_json::to_string_pretty(summary).map_err(|e| Error::Format {
        path: summary_json.display().to_string(),
        message: e.to_string(),
    })?;
    write_text(&summary_json, &(json + "\n"))?;

    let methods = summary.methods();
    let snrs = summary.snr_points();
    let value = |m: &str, s: f64, f: &dyn Fn(&super::SummaryRow) -> f64| {
        summary.row(m, s).map_or(f64::NAN, f)
    };

    let rate_vs_snr = dir.join("rate_vs_snr.dat");
    let rows = snrs
        .iter()
        .map(|&s| {
            let ys = methods
                .iter()
                .map(|m| value(m, s, &|r| r.mean_rate_bps_hz))
                .collect();
            (s, ys)
        })
        .collect();
    write_text(&rate_vs_snr, &data_table("snr_db", &methods, rows))?;

    let mut cdfs = Vec::new();
    for &s in &snrs {
        let path = dir.join(format!("cdf_{}dB.dat", snr_label(s)));
        let rows = summary
            .cdf_grid
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let ys = methods.iter().map(|m| value(m, s, &|r| r.cdf[i])).collect();
                (x, ys)
            })
            .collect();
        write_text(&path, &data_table("rate_bps_hz", &methods, rows))?;
        cdfs.push(path);
    }

    Ok(OutputPaths {
        records_csv,
        summary_json,
        rate_vs_snr,
        cdfs,
    })
}
