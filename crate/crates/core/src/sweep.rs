//! Parameter sweeps over `(mu, nu, beta)` and their CSV / JSON encodings.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::frame::{
    mean_spin_closed_form, mean_spin_length, mean_spin_length_closed_form, FrameStatus,
};
use crate::oracle::{squeeze_oracle, SqueezeMethod, SqueezeResult};
use crate::spin::SqueezeParams;

/// Column order of the sweep CSV. Part of the output contract.
pub const CSV_COLUMNS: [&str; 23] = [
    "beta",
    "mu",
    "nu",
    "jx_cf",
    "jy_cf",
    "jz_cf",
    "jx_or",
    "jy_or",
    "jz_or",
    "r_eq9",
    "r_eq10",
    "theta",
    "phi",
    "jn1sq",
    "jn2sq",
    "anticomm",
    "lambda_min",
    "chi_min",
    "xi2_std",
    "xi2_literal",
    "concurrence",
    "frame_status",
    "method",
];

/// Which minimal-variance normalisation a headline `xi^2` uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Convention {
    /// `xi^2 = 4 lambda_min / N` with the conventional 1/2 in `lambda_min`.
    #[default]
    Standard,
    /// Radical form exactly as printed, twice the standard value.
    PaperLiteral,
}

impl Convention {
    pub const BOTH: [Convention; 2] = [Convention::Standard, Convention::PaperLiteral];

    pub fn as_str(&self) -> &'static str {
        match self {
            Convention::Standard => "standard",
            Convention::PaperLiteral => "paper-literal",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "standard" => Ok(Convention::Standard),
            "paper-literal" => Ok(Convention::PaperLiteral),
            other => Err(invalid(format!(
                "unknown convention '{other}' (expected standard or paper-literal)"
            ))),
        }
    }

    pub fn xi2(&self, row: &SweepRow) -> f64 {
        match self {
            Convention::Standard => row.xi2_std,
            Convention::PaperLiteral => row.xi2_literal,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl OutputFormat {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(invalid(format!(
                "unknown format '{other}' (expected csv or json)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub mu_values: Vec<f64>,
    pub nu_values: Vec<f64>,
    pub beta_min: f64,
    pub beta_max: f64,
    pub beta_steps: usize,
    pub convention: Convention,
    pub format: OutputFormat,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.mu_values.is_empty() {
            return Err(invalid("mu list must not be empty"));
        }
        if self.nu_values.is_empty() {
            return Err(invalid("nu list must not be empty"));
        }
        if self.beta_steps < 2 {
            return Err(invalid(format!(
                "beta steps must be at least 2, got {}",
                self.beta_steps
            )));
        }
        let in_unit = |b: f64| (0.0..=1.0).contains(&b);
        if !in_unit(self.beta_min) || !in_unit(self.beta_max) || self.beta_min > self.beta_max {
            return Err(invalid(format!(
                "beta range [{}, {}] must satisfy 0 <= min <= max <= 1",
                self.beta_min, self.beta_max
            )));
        }
        for &mu in &self.mu_values {
            SqueezeParams::new(self.beta_min, mu, 0.0)?;
        }
        if let Some(nu) = self.nu_values.iter().find(|nu| !nu.is_finite()) {
            return Err(invalid(format!("nu must be finite, got {nu}")));
        }
        Ok(())
    }

    pub fn betas(&self) -> Vec<f64> {
        linspace(self.beta_min, self.beta_max, self.beta_steps)
    }

    /// Grid points in `(mu, nu, beta)` index order.
    pub fn points(&self) -> Result<Vec<SqueezeParams>> {
        self.validate()?;
        let betas = self.betas();
        let mut out = Vec::with_capacity(self.mu_values.len() * self.nu_values.len() * betas.len());
        for &mu in &self.mu_values {
            for &nu in &self.nu_values {
                for &beta in &betas {
                    out.push(SqueezeParams::new(beta, mu, nu)?);
                }
            }
        }
        Ok(out)
    }
}

/// `n` evenly spaced values with both endpoints hit exactly.
pub fn linspace(start: f64, end: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..n)
            .map(|i| {
                if i == n - 1 {
                    end
                } else {
                    start + (end - start) * i as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}

/// One sweep row; field order matches [`CSV_COLUMNS`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub beta: f64,
    pub mu: f64,
    pub nu: f64,
    pub jx_cf: f64,
    pub jy_cf: f64,
    pub jz_cf: f64,
    pub jx_or: f64,
    pub jy_or: f64,
    pub jz_or: f64,
    pub r_eq9: f64,
    pub r_eq10: f64,
    pub theta: f64,
    pub phi: f64,
    pub jn1sq: Option<f64>,
    pub jn2sq: Option<f64>,
    pub anticomm: Option<f64>,
    pub lambda_min: f64,
    pub chi_min: Option<f64>,
    pub xi2_std: f64,
    pub xi2_literal: f64,
    pub concurrence: f64,
    pub frame_status: FrameStatus,
    pub method: SqueezeMethod,
}

impl SweepRow {
    pub fn from_result(result: &SqueezeResult) -> Self {
        let params = &result.params;
        let cf = mean_spin_closed_form(params);
        let fm = result.frame_moments;
        SweepRow {
            beta: params.beta(),
            mu: params.mu(),
            nu: params.nu(),
            jx_cf: cf.jx,
            jy_cf: cf.jy,
            jz_cf: cf.jz,
            jx_or: result.mean.jx,
            jy_or: result.mean.jy,
            jz_or: result.mean.jz,
            r_eq9: mean_spin_length(&cf),
            r_eq10: mean_spin_length_closed_form(params),
            theta: result.frame.theta,
            phi: result.frame.phi,
            jn1sq: fm.map(|f| f.jn1_sq),
            jn2sq: fm.map(|f| f.jn2_sq),
            anticomm: fm.map(|f| f.anticomm),
            lambda_min: result.lambda_min,
            chi_min: result.chi_min,
            xi2_std: result.xi2_std,
            xi2_literal: result.xi2_literal,
            concurrence: result.concurrence,
            frame_status: result.frame_status,
            method: result.method,
        }
    }

    pub fn evaluate(params: &SqueezeParams) -> Result<Self> {
        Ok(Self::from_result(&squeeze_oracle(params)?))
    }

    fn csv_record(&self) -> Vec<String> {
        let f = |x: f64| format_float(x);
        let o = |x: Option<f64>| x.map_or_else(|| "nan".to_string(), format_float);
        vec![
            f(self.beta),
            f(self.mu),
            f(self.nu),
            f(self.jx_cf),
            f(self.jy_cf),
            f(self.jz_cf),
            f(self.jx_or),
            f(self.jy_or),
            f(self.jz_or),
            f(self.r_eq9),
            f(self.r_eq10),
            f(self.theta),
            f(self.phi),
            o(self.jn1sq),
            o(self.jn2sq),
            o(self.anticomm),
            f(self.lambda_min),
            o(self.chi_min),
            f(self.xi2_std),
            f(self.xi2_literal),
            f(self.concurrence),
            self.frame_status.as_str().to_string(),
            self.method.as_str().to_string(),
        ]
    }
}

/// 17 significant digits, scientific notation, no locale.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else {
        format!("{x:.16e}")
    }
}

/// Evaluates every grid point; output order never depends on scheduling.
pub fn evaluate_points(points: &[SqueezeParams]) -> Result<Vec<SweepRow>> {
    points.par_iter().map(SweepRow::evaluate).collect()
}

/// Runs `f` on a dedicated pool of `threads` workers, or the global pool.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| invalid(format!("cannot build thread pool: {e}")))?;
            Ok(pool.install(f))
        }
        None => Ok(f()),
    }
}

pub fn run_sweep(spec: &SweepSpec, threads: Option<usize>) -> Result<Vec<SweepRow>> {
    let points = spec.points()?;
    with_threads(threads, || evaluate_points(&points))?
}

pub fn write_csv<W: Write>(rows: &[SweepRow], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(CSV_COLUMNS)?;
    for row in rows {
        w.write_record(row.csv_record())?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<W: Write>(rows: &[SweepRow], mut writer: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut writer, rows)?;
    writeln!(writer)?;
    Ok(())
}

pub fn write_rows<W: Write>(rows: &[SweepRow], format: OutputFormat, writer: W) -> Result<()> {
    match format {
        OutputFormat::Csv => write_csv(rows, writer),
        OutputFormat::Json => write_json(rows, writer),
    }
}
