//! Pre-configured sweeps for the mean-spin-length surface (`fig1`) and the
//! squeezing curves (`fig2`), plus qualitative shape checks on the results.
//!
//! Figure axes are not numerically readable, so acceptance is by shape:
//! monotonicity, single interior maxima, and the width of the squeezed
//! `beta` interval.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_3, PI, TAU};
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::sweep::{linspace, run_sweep, write_csv, Convention, OutputFormat, SweepRow, SweepSpec};

/// Slack for monotonicity comparisons between neighbouring samples.
pub const SHAPE_TOL: f64 = 1e-12;
/// A point counts as squeezed when `xi^2 < 1 - SQUEEZE_MARGIN`.
pub const SQUEEZE_MARGIN: f64 = 1e-12;
/// Allowed distance of the `mu = pi/2` mean-spin peak from `beta = 1/sqrt2`.
pub const PEAK_BETA_TOL: f64 = 0.01;
/// `(xi2_std, 1 - C)` pairs closer than this are flagged as agreeing.
pub const CONCURRENCE_AGREE_TOL: f64 = 1e-9;
/// `|sin nu|` below this counts as a zero-phase slice.
const ZERO_SIN_NU: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FigureName {
    Fig1,
    Fig2,
}

impl FigureName {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "fig1" => Ok(FigureName::Fig1),
            "fig2" => Ok(FigureName::Fig2),
            other => Err(invalid(format!(
                "unknown figure '{other}' (expected fig1 or fig2)"
            ))),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            FigureName::Fig1 => "fig1",
            FigureName::Fig2 => "fig2",
        }
    }

    pub fn spec(&self) -> SweepSpec {
        match self {
            FigureName::Fig1 => SweepSpec {
                mu_values: vec![0.0, FRAC_PI_3, FRAC_PI_2],
                nu_values: linspace(0.0, TAU, 121),
                beta_min: 0.0,
                beta_max: 1.0,
                beta_steps: 101,
                convention: Convention::Standard,
                format: OutputFormat::Csv,
            },
            FigureName::Fig2 => SweepSpec {
                mu_values: vec![0.0, FRAC_PI_2, PI],
                nu_values: vec![-FRAC_PI_3],
                beta_min: 0.0,
                beta_max: 1.0,
                beta_steps: 201,
                convention: Convention::Standard,
                format: OutputFormat::Csv,
            },
        }
    }
}

/// File-name friendly label for an angle, e.g. `pi_3` for pi/3.
pub fn angle_label(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let sign = if x < 0.0 { "neg_" } else { "" };
    let ratio = x.abs() / PI;
    for den in 1..=12u32 {
        let num = ratio * den as f64;
        if (num - num.round()).abs() < 1e-9 {
            let num = num.round() as u32;
            return match (num, den) {
                (1, 1) => format!("{sign}pi"),
                (n, 1) => format!("{sign}{n}pi"),
                (1, d) => format!("{sign}pi_{d}"),
                (n, d) => format!("{sign}{n}pi_{d}"),
            };
        }
    }
    format!("{sign}{:.6}", x.abs()).replace('.', "p")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapeCheck {
    pub figure: FigureName,
    pub claim: String,
    pub slice: String,
    pub convention: Option<Convention>,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SqueezeInterval {
    pub convention: Convention,
    pub mu: f64,
    pub nu: f64,
    pub first: Option<f64>,
    pub last: Option<f64>,
    pub width: f64,
    pub squeezed_points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcurrenceDiagnostic {
    pub beta: f64,
    pub mu: f64,
    pub nu: f64,
    pub xi2_std: f64,
    pub one_minus_c: f64,
    pub abs_diff: f64,
    pub agree: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FigureSummary {
    pub figure: FigureName,
    pub checks: Vec<ShapeCheck>,
    pub intervals: Vec<SqueezeInterval>,
    pub concurrence_agreeing: usize,
    pub concurrence_total: usize,
}

impl FigureSummary {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failed(&self) -> impl Iterator<Item = &ShapeCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

#[derive(Debug, Clone)]
pub struct FigureOutput {
    pub spec: SweepSpec,
    pub rows: Vec<SweepRow>,
    pub summary: FigureSummary,
    pub diagnostics: Vec<ConcurrenceDiagnostic>,
}

impl FigureOutput {
    /// Rows for one `mu`, in `(nu, beta)` order.
    pub fn rows_for_mu(&self, mu: f64) -> Vec<&SweepRow> {
        self.rows.iter().filter(|r| r.mu == mu).collect()
    }
}

/// `v` rises (weakly) to an interior maximum and falls (weakly) after it.
/// Returns the index of the maximum.
pub fn interior_peak(v: &[f64], tol: f64) -> Option<usize> {
    if v.len() < 3 {
        return None;
    }
    let peak = v
        .iter()
        .enumerate()
        .fold(0, |best, (i, &x)| if x > v[best] { i } else { best });
    if peak == 0 || peak == v.len() - 1 || v[peak] <= v[0] + tol {
        return None;
    }
    let rises = v[..=peak].windows(2).all(|w| w[1] >= w[0] - tol);
    let falls = v[peak..].windows(2).all(|w| w[1] <= w[0] + tol);
    (rises && falls).then_some(peak)
}

pub fn is_nonincreasing(v: &[f64], tol: f64) -> bool {
    v.windows(2).all(|w| w[1] <= w[0] + tol)
}

/// Strictly drops at the start and is valley-shaped around its minimum
/// (the minimum may sit at the right end).
pub fn decreases_to_minimum(v: &[f64], tol: f64) -> bool {
    if v.len() < 2 || v[1] >= v[0] - tol {
        return false;
    }
    let min = v
        .iter()
        .enumerate()
        .fold(0, |best, (i, &x)| if x < v[best] { i } else { best });
    is_nonincreasing(&v[..=min], tol) && v[min..].windows(2).all(|w| w[1] >= w[0] - tol)
}

pub fn squeeze_interval(betas: &[f64], xi2: &[f64]) -> (Option<f64>, Option<f64>, usize) {
    let squeezed: Vec<f64> = betas
        .iter()
        .zip(xi2)
        .filter(|(_, &x)| x < 1.0 - SQUEEZE_MARGIN)
        .map(|(&b, _)| b)
        .collect();
    (
        squeezed.first().copied(),
        squeezed.last().copied(),
        squeezed.len(),
    )
}

fn slice_label(mu: f64, nu: f64) -> String {
    format!("mu={} nu={}", angle_label(mu), angle_label(nu))
}

/// Rows for `(mu, nu)` in beta order.
fn slice(rows: &[SweepRow], mu: f64, nu: f64) -> Vec<&SweepRow> {
    rows.iter().filter(|r| r.mu == mu && r.nu == nu).collect()
}

fn fig1_checks(spec: &SweepSpec, rows: &[SweepRow]) -> Vec<ShapeCheck> {
    let mut checks = Vec::new();

    let mut violation = None;
    for &nu in &spec.nu_values {
        let r: Vec<f64> = slice(rows, 0.0, nu).iter().map(|row| row.r_eq10).collect();
        let (first, last) = (r[0], r[r.len() - 1]);
        if !is_nonincreasing(&r, SHAPE_TOL) || (first - 1.0).abs() > 1e-12 || last.abs() > 1e-12 {
            violation = Some(format!(
                "{}: R(0)={first:.6}, R(1)={last:.6}",
                slice_label(0.0, nu)
            ));
            break;
        }
    }
    checks.push(ShapeCheck {
        figure: FigureName::Fig1,
        claim: "mu=0: R(beta) nonincreasing with R(0)=1, R(1)=0".into(),
        slice: violation
            .as_ref()
            .map_or("mu=0 all nu".into(), |v| v.clone()),
        convention: None,
        passed: violation.is_none(),
        detail: violation.unwrap_or_else(|| format!("{} nu slices", spec.nu_values.len())),
    });

    let betas = spec.betas();
    let mut violation = None;
    let mut checked = 0;
    for &nu in spec
        .nu_values
        .iter()
        .filter(|nu| nu.sin().abs() > ZERO_SIN_NU)
    {
        checked += 1;
        let r: Vec<f64> = slice(rows, FRAC_PI_2, nu)
            .iter()
            .map(|row| row.r_eq10)
            .collect();
        match interior_peak(&r, SHAPE_TOL) {
            Some(k) if (betas[k] - FRAC_1_SQRT_2).abs() <= PEAK_BETA_TOL => {}
            Some(k) => {
                violation = Some(format!(
                    "{}: peak at beta={:.4}",
                    slice_label(FRAC_PI_2, nu),
                    betas[k]
                ));
                break;
            }
            None => {
                violation = Some(format!("{}: not single-peaked", slice_label(FRAC_PI_2, nu)));
                break;
            }
        }
    }
    checks.push(ShapeCheck {
        figure: FigureName::Fig1,
        claim: "mu=pi/2, sin(nu)!=0: R(beta) rises to a maximum at beta=1/sqrt2 then falls".into(),
        slice: violation
            .as_ref()
            .map_or("mu=pi_2 all nonzero-phase nu".into(), |v| v.clone()),
        convention: None,
        passed: violation.is_none(),
        detail: violation.unwrap_or_else(|| format!("{checked} nu slices")),
    });
    checks
}

fn fig2_checks(spec: &SweepSpec, rows: &[SweepRow]) -> (Vec<ShapeCheck>, Vec<SqueezeInterval>) {
    let betas = spec.betas();
    let nu = spec.nu_values[0];
    let mut checks = Vec::new();
    let mut intervals = Vec::new();
    for convention in Convention::BOTH {
        let curve = |mu: f64| -> Vec<f64> {
            slice(rows, mu, nu)
                .iter()
                .map(|r| convention.xi2(r))
                .collect()
        };

        let low = curve(0.0);
        let ok = decreases_to_minimum(&low, SHAPE_TOL);
        checks.push(ShapeCheck {
            figure: FigureName::Fig2,
            claim: "mu=0: xi2(beta) decreases to a minimum".into(),
            slice: slice_label(0.0, nu),
            convention: Some(convention),
            passed: ok,
            detail: format!("xi2(0)={:.6}, xi2(1)={:.6}", low[0], low[low.len() - 1]),
        });

        for mu in [FRAC_PI_2, PI] {
            let v = curve(mu);
            let peak = interior_peak(&v, SHAPE_TOL);
            let argmax = v
                .iter()
                .enumerate()
                .fold(0, |b, (i, &x)| if x > v[b] { i } else { b });
            checks.push(ShapeCheck {
                figure: FigureName::Fig2,
                claim: format!(
                    "mu={}: xi2(beta) first increases to a maximum then decreases",
                    angle_label(mu)
                ),
                slice: slice_label(mu, nu),
                convention: Some(convention),
                passed: peak.is_some(),
                detail: format!("max xi2={:.6} at beta={:.4}", v[argmax], betas[argmax]),
            });
        }

        let mut widths = Vec::new();
        for mu in &spec.mu_values {
            let (first, last, count) = squeeze_interval(&betas, &curve(*mu));
            let width = match (first, last) {
                (Some(a), Some(b)) => b - a,
                _ => 0.0,
            };
            widths.push((*mu, width));
            intervals.push(SqueezeInterval {
                convention,
                mu: *mu,
                nu,
                first,
                last,
                width,
                squeezed_points: count,
            });
        }
        let width_of = |mu: f64| widths.iter().find(|w| w.0 == mu).map_or(0.0, |w| w.1);
        let (w0, w2, wpi) = (width_of(0.0), width_of(FRAC_PI_2), width_of(PI));
        checks.push(ShapeCheck {
            figure: FigureName::Fig2,
            claim: "squeezed beta-interval at mu=pi/2 strictly wider than at mu=0 and mu=pi".into(),
            slice: format!("nu={}", angle_label(nu)),
            convention: Some(convention),
            passed: w2 > w0 && w2 > wpi,
            detail: format!("width mu=0: {w0:.4}, mu=pi_2: {w2:.4}, mu=pi: {wpi:.4}"),
        });
    }
    (checks, intervals)
}

fn concurrence_diagnostics(rows: &[SweepRow]) -> Vec<ConcurrenceDiagnostic> {
    rows.iter()
        .map(|r| {
            let one_minus_c = 1.0 - r.concurrence;
            let abs_diff = (r.xi2_std - one_minus_c).abs();
            ConcurrenceDiagnostic {
                beta: r.beta,
                mu: r.mu,
                nu: r.nu,
                xi2_std: r.xi2_std,
                one_minus_c,
                abs_diff,
                agree: abs_diff <= CONCURRENCE_AGREE_TOL,
            }
        })
        .collect()
}

pub fn run_figure(name: FigureName, threads: Option<usize>) -> Result<FigureOutput> {
    let spec = name.spec();
    let rows = run_sweep(&spec, threads)?;
    let (checks, intervals, diagnostics) = match name {
        FigureName::Fig1 => (fig1_checks(&spec, &rows), Vec::new(), Vec::new()),
        FigureName::Fig2 => {
            let (checks, intervals) = fig2_checks(&spec, &rows);
            (checks, intervals, concurrence_diagnostics(&rows))
        }
    };
    let summary = FigureSummary {
        figure: name,
        checks,
        intervals,
        concurrence_agreeing: diagnostics.iter().filter(|d| d.agree).count(),
        concurrence_total: diagnostics.len(),
    };
    Ok(FigureOutput {
        spec,
        rows,
        summary,
        diagnostics,
    })
}

/// Writes one CSV per `mu`, the concurrence table (fig2) and a JSON summary.
/// Returns the paths written.
pub fn write_figure(output: &FigureOutput, outdir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(outdir)?;
    let name = output.summary.figure.as_str();
    let mut written = Vec::new();
    for &mu in &output.spec.mu_values {
        let path = outdir.join(format!("{name}_mu_{}.csv", angle_label(mu)));
        let rows: Vec<SweepRow> = output.rows_for_mu(mu).into_iter().cloned().collect();
        write_csv(&rows, BufWriter::new(File::create(&path)?))?;
        written.push(path);
    }
    if !output.diagnostics.is_empty() {
        let path = outdir.join(format!("{name}_concurrence.csv"));
        let mut w = csv::Writer::from_writer(BufWriter::new(File::create(&path)?));
        for d in &output.diagnostics {
            w.serialize(d)?;
        }
        w.flush()?;
        written.push(path);
    }
    let path = outdir.join(format!("{name}_summary.json"));
    serde_json::to_writer_pretty(BufWriter::new(File::create(&path)?), &output.summary)?;
    written.push(path);
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels() {
        assert_eq!(angle_label(0.0), "0");
        assert_eq!(angle_label(PI), "pi");
        assert_eq!(angle_label(FRAC_PI_2), "pi_2");
        assert_eq!(angle_label(-FRAC_PI_3), "neg_pi_3");
        assert_eq!(angle_label(2.0 * FRAC_PI_3), "2pi_3");
        assert_eq!(angle_label(0.3), "0p300000");
    }

    #[test]
    fn peak_detection() {
        assert_eq!(interior_peak(&[0.0, 1.0, 2.0, 1.0, 0.0], 0.0), Some(2));
        assert_eq!(interior_peak(&[3.0, 2.0, 1.0], 0.0), None);
        assert_eq!(interior_peak(&[0.0, 2.0, 1.0, 2.0, 0.0], 0.0), None);
        assert_eq!(interior_peak(&[0.0, 1.0, 2.0], 0.0), None);
    }

    #[test]
    fn valley_detection() {
        assert!(decreases_to_minimum(&[1.0, 0.5, 0.0], 0.0));
        assert!(decreases_to_minimum(&[1.0, 0.5, 0.2, 0.4], 0.0));
        assert!(!decreases_to_minimum(&[1.0, 1.2, 0.0], 0.0));
        assert!(!decreases_to_minimum(&[1.0, 0.5, 0.7, 0.2], 0.0));
    }

    #[test]
    fn interval_uses_margin() {
        let betas = [0.0, 0.5, 1.0];
        assert_eq!(
            squeeze_interval(&betas, &[1.0, 0.5, 0.0]),
            (Some(0.5), Some(1.0), 2)
        );
        assert_eq!(
            squeeze_interval(&betas, &[1.0 - 1e-14, 1.0, 2.0]),
            (None, None, 0)
        );
    }
}
