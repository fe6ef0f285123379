//! Machine-readable output records: one JSON document and one CSV table
//! per check, plus an aggregate summary for `all`. Formatting is
//! deterministic (shortest round-trip float formatting), so identical
//! configurations produce byte-identical files.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::config::ExperimentConfig;

pub const SCHEMA_VERSION: u32 = 1;

/// One verdict row. `value` is the primary measured quantity of the row,
/// `closed` the comparison value when one exists, `deviation` the scalar
/// the verdict thresholds, `tolerance` the threshold used.
#[derive(Clone, Debug, Serialize)]
pub struct Record {
    pub experiment: String,
    pub case: String,
    pub group: String,
    pub n: usize,
    pub m: usize,
    pub seed: u64,
    pub workers: usize,
    pub value_re: f64,
    pub value_im: f64,
    pub se: f64,
    pub closed_re: f64,
    pub closed_im: f64,
    pub ratio_re: f64,
    pub ratio_im: f64,
    pub deviation: f64,
    pub tolerance: f64,
    pub verdict: bool,
}

impl Record {
    pub fn new(experiment: &str, case: &str, cfg: &ExperimentConfig) -> Self {
        Record {
            experiment: experiment.to_string(),
            case: case.to_string(),
            group: cfg.group.clone(),
            n: cfg.steps,
            m: cfg.samples,
            seed: cfg.seed,
            workers: cfg.workers,
            value_re: 0.0,
            value_im: 0.0,
            se: 0.0,
            closed_re: 0.0,
            closed_im: 0.0,
            ratio_re: 0.0,
            ratio_im: 0.0,
            deviation: 0.0,
            tolerance: 0.0,
            verdict: true,
        }
    }

    pub fn value(mut self, v: num_complex::Complex64) -> Self {
        self.value_re = v.re;
        self.value_im = v.im;
        self
    }

    pub fn closed(mut self, v: num_complex::Complex64) -> Self {
        self.closed_re = v.re;
        self.closed_im = v.im;
        self
    }

    pub fn ratio(mut self, v: num_complex::Complex64) -> Self {
        self.ratio_re = v.re;
        self.ratio_im = v.im;
        self
    }

    pub fn se(mut self, se: f64) -> Self {
        self.se = se;
        self
    }

    /// Set the thresholded deviation and its tolerance; the verdict is
    /// deviation <= tolerance.
    pub fn verdict_leq(mut self, deviation: f64, tolerance: f64) -> Self {
        self.deviation = deviation;
        self.tolerance = tolerance;
        self.verdict = deviation <= tolerance;
        self
    }
}

const CSV_HEADER: &str = "schema_version,experiment,case,group,n,m,seed,workers,value_re,value_im,se,closed_re,closed_im,ratio_re,ratio_im,deviation,tolerance,verdict";

pub fn csv_row(r: &Record) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
        SCHEMA_VERSION,
        r.experiment,
        r.case,
        r.group,
        r.n,
        r.m,
        r.seed,
        r.workers,
        r.value_re,
        r.value_im,
        r.se,
        r.closed_re,
        r.closed_im,
        r.ratio_re,
        r.ratio_im,
        r.deviation,
        r.tolerance,
        r.verdict
    )
}

#[derive(Serialize)]
struct JsonDocument<'a> {
    schema_version: u32,
    experiment: &'a str,
    config: &'a ExperimentConfig,
    records: &'a [Record],
}

/// Write `<out>/<experiment>.json` and `<out>/<experiment>.csv`.
pub fn write_check_outputs(
    out_dir: &Path,
    experiment: &str,
    cfg: &ExperimentConfig,
    records: &[Record],
) -> anyhow::Result<()> {
    std::fs::create_dir_all(out_dir)?;
    let doc = JsonDocument {
        schema_version: SCHEMA_VERSION,
        experiment,
        config: cfg,
        records,
    };
    let json = serde_json::to_string_pretty(&doc)?;
    std::fs::write(out_dir.join(format!("{experiment}.json")), json + "\n")?;
    let mut csv = String::from(CSV_HEADER);
    csv.push('\n');
    for r in records {
        csv.push_str(&csv_row(r));
        csv.push('\n');
    }
    std::fs::write(out_dir.join(format!("{experiment}.csv")), csv)?;
    Ok(())
}

/// Write the aggregate `<out>/summary.csv`.
pub fn write_summary(out_dir: &Path, records: &[Record]) -> anyhow::Result<()> {
    std::fs::create_dir_all(out_dir)?;
    let file = std::fs::File::create(out_dir.join("summary.csv"))?;
    let mut w = std::io::BufWriter::new(file);
    writeln!(w, "{CSV_HEADER}")?;
    for r in records {
        writeln!(w, "{}", csv_row(r))?;
    }
    Ok(())
}
