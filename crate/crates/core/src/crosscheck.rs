//! Closed-form vs oracle reconciliation over a parameter grid.
//!
//! Two printed conventions are in question: the sign of `nu` in `<Jy>` and
//! `Im<J+(2Jz+1)>`, and the missing `1/2` in the minimal-variance radical.
//! Each is adjudicated empirically; nothing here alters the closed forms.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, FRAC_PI_6, PI};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::closedform::{
    frame_moments_closed_form, frame_moments_from_moments, second_moments_closed_form,
    squeezing_paper_literal, squeezing_standard, FrameMoments,
};
use crate::error::{invalid, Result};
use crate::frame::{
    compute_frame, mean_spin_closed_form, mean_spin_length_closed_form, DEFAULT_FRAME_EPS,
};
use crate::oracle::{frame_moments_oracle, min_transverse_variance, moments_oracle, spin_one};
use crate::spin::{build_superposition_state, SqueezeParams, N_PARTICLES};

pub const DEFAULT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NuSignHypothesis {
    AsPrinted,
    NuNegated,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Eq12Hypothesis {
    Literal,
    HalfCorrected,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    Jx,
    Jy,
    Jz,
    R,
    JplusSqRe,
    JplusSqIm,
    JzSq,
    Jplus2jz1Re,
    Jplus2jz1Im,
    Jn1Sq,
    Jn2Sq,
    Anticomm,
    RederivedJn1Sq,
    RederivedJn2Sq,
    RederivedAnticomm,
}

impl Quantity {
    pub const ALL: [Quantity; 15] = [
        Quantity::Jx,
        Quantity::Jy,
        Quantity::Jz,
        Quantity::R,
        Quantity::JplusSqRe,
        Quantity::JplusSqIm,
        Quantity::JzSq,
        Quantity::Jplus2jz1Re,
        Quantity::Jplus2jz1Im,
        Quantity::Jn1Sq,
        Quantity::Jn2Sq,
        Quantity::Anticomm,
        Quantity::RederivedJn1Sq,
        Quantity::RederivedJn2Sq,
        Quantity::RederivedAnticomm,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Quantity::Jx => "jx",
            Quantity::Jy => "jy",
            Quantity::Jz => "jz",
            Quantity::R => "r",
            Quantity::JplusSqRe => "jplus_sq_re",
            Quantity::JplusSqIm => "jplus_sq_im",
            Quantity::JzSq => "jz_sq",
            Quantity::Jplus2jz1Re => "jplus_2jz1_re",
            Quantity::Jplus2jz1Im => "jplus_2jz1_im",
            Quantity::Jn1Sq => "jn1_sq",
            Quantity::Jn2Sq => "jn2_sq",
            Quantity::Anticomm => "anticomm",
            Quantity::RederivedJn1Sq => "rederived_jn1_sq",
            Quantity::RederivedJn2Sq => "rederived_jn2_sq",
            Quantity::RederivedAnticomm => "rederived_anticomm",
        }
    }

    /// Unaffected by the `nu` sign question, so it must match as printed.
    pub fn is_convention_independent(&self) -> bool {
        matches!(
            self,
            Quantity::Jx
                | Quantity::Jz
                | Quantity::R
                | Quantity::JplusSqRe
                | Quantity::JplusSqIm
                | Quantity::JzSq
                | Quantity::Jplus2jz1Re
        )
    }

    /// Quantities whose printed sign decides the `nu` hypothesis.
    pub fn discriminates_nu(&self) -> bool {
        matches!(self, Quantity::Jy | Quantity::Jplus2jz1Im)
    }

    /// Printed first and second moments and frame moments (not the re-derived ones).
    pub fn is_printed(&self) -> bool {
        !matches!(
            self,
            Quantity::RederivedJn1Sq | Quantity::RederivedJn2Sq | Quantity::RederivedAnticomm
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub index: usize,
    pub beta: f64,
    pub mu: f64,
    pub nu: f64,
    pub quantity: String,
    pub closed: f64,
    pub oracle: f64,
    pub diff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrosscheckReport {
    pub samples: usize,
    pub tol: f64,
    pub nu_sign_hypothesis: NuSignHypothesis,
    pub eq12_factor_hypothesis: Eq12Hypothesis,
    /// Under the selected `nu` convention (as printed when inconclusive).
    pub max_abs_diff_per_quantity: BTreeMap<String, f64>,
    pub max_abs_diff_as_printed: BTreeMap<String, f64>,
    pub max_abs_diff_nu_negated: BTreeMap<String, f64>,
    /// Number of grid points at which each quantity was comparable.
    pub compared: BTreeMap<String, usize>,
    pub eq12_max_abs_diff: BTreeMap<String, f64>,
    pub convention_independent_ok: bool,
    pub failures: Vec<Failure>,
}

impl CrosscheckReport {
    /// Largest difference among the printed quantities under the selected convention.
    pub fn max_printed_diff(&self) -> f64 {
        Quantity::ALL
            .iter()
            .filter(|q| q.is_printed())
            .filter_map(|q| self.max_abs_diff_per_quantity.get(q.name()))
            .copied()
            .fold(0.0, f64::max)
    }

    pub fn summary_line(&self) -> String {
        let worst = self
            .max_abs_diff_per_quantity
            .iter()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(k, v)| format!("{k}={v:.3e}"))
            .unwrap_or_default();
        format!(
            "samples={} tol={:e} nu_sign={} eq12_factor={} convention_independent={} failures={} worst={}",
            self.samples,
            self.tol,
            serde_json::to_value(self.nu_sign_hypothesis).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default(),
            serde_json::to_value(self.eq12_factor_hypothesis).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default(),
            if self.convention_independent_ok { "pass" } else { "FAIL" },
            self.failures.len(),
            worst
        )
    }
}

/// Cartesian product ordered beta-major, then mu, then nu.
pub fn product_grid(betas: &[f64], mus: &[f64], nus: &[f64]) -> Result<Vec<SqueezeParams>> {
    let mut grid = Vec::with_capacity(betas.len() * mus.len() * nus.len());
    for &beta in betas {
        for &mu in mus {
            for &nu in nus {
                grid.push(SqueezeParams::new(beta, mu, nu)?);
            }
        }
    }
    Ok(grid)
}

pub fn default_betas() -> Vec<f64> {
    (0..=20).map(|i| i as f64 * 0.05).collect()
}

pub fn default_mus() -> Vec<f64> {
    vec![
        0.0,
        FRAC_PI_6,
        FRAC_PI_3,
        FRAC_PI_2,
        2.0 * FRAC_PI_3,
        5.0 * FRAC_PI_6,
        PI,
    ]
}

pub fn default_nus() -> Vec<f64> {
    vec![-FRAC_PI_2, -FRAC_PI_3, 0.0, FRAC_PI_4, FRAC_PI_2, PI]
}

pub fn default_grid() -> Vec<SqueezeParams> {
    product_grid(&default_betas(), &default_mus(), &default_nus()).expect("default grid is valid")
}

/// Closed-form value under each `nu` convention, and the oracle value.
#[derive(Debug, Clone, Copy)]
struct Comparison {
    quantity: Quantity,
    as_printed: f64,
    nu_negated: f64,
    oracle: f64,
}

#[derive(Debug, Clone)]
struct PointOutcome {
    comparisons: Vec<Comparison>,
    /// `(literal, half-corrected, oracle xi^2)` where the transverse plane exists.
    eq12: Option<(f64, f64, f64)>,
}

fn frame_values(params: &SqueezeParams) -> Option<(FrameMoments, FrameMoments)> {
    let frame = compute_frame(&mean_spin_closed_form(params), DEFAULT_FRAME_EPS);
    let printed = frame_moments_closed_form(params, &frame).ok()?;
    let rederived = frame_moments_from_moments(&second_moments_closed_form(params), &frame).ok()?;
    Some((printed, rederived))
}

fn closed_scalars(params: &SqueezeParams) -> [(Quantity, f64); 9] {
    let ms = mean_spin_closed_form(params);
    let m2 = second_moments_closed_form(params);
    [
        (Quantity::Jx, ms.jx),
        (Quantity::Jy, ms.jy),
        (Quantity::Jz, ms.jz),
        (Quantity::R, mean_spin_length_closed_form(params)),
        (Quantity::JplusSqRe, m2.jplus_sq.re),
        (Quantity::JplusSqIm, m2.jplus_sq.im),
        (Quantity::JzSq, m2.jz_sq),
        (Quantity::Jplus2jz1Re, m2.jplus_2jz1.re),
        (Quantity::Jplus2jz1Im, m2.jplus_2jz1.im),
    ]
}

fn evaluate_point(params: &SqueezeParams) -> Result<PointOutcome> {
    let ops = spin_one();
    let state = build_superposition_state(params);
    let om = moments_oracle(&state, ops)?;
    let oracle_scalars = [
        om.mean.jx,
        om.mean.jy,
        om.mean.jz,
        om.mean.length(),
        om.moments.jplus_sq.re,
        om.moments.jplus_sq.im,
        om.moments.jz_sq,
        om.moments.jplus_2jz1.re,
        om.moments.jplus_2jz1.im,
    ];
    let negated = params.nu_negated();
    let mut comparisons: Vec<Comparison> = closed_scalars(params)
        .iter()
        .zip(closed_scalars(&negated))
        .zip(oracle_scalars)
        .map(
            |((&(quantity, as_printed), (_, nu_negated)), oracle)| Comparison {
                quantity,
                as_printed,
                nu_negated,
                oracle,
            },
        )
        .collect();

    let oracle_frame = compute_frame(&om.mean, DEFAULT_FRAME_EPS);
    let mut eq12 = None;
    if oracle_frame.has_transverse_plane() {
        let fm_oracle = frame_moments_oracle(&state, &oracle_frame, ops)?;
        if let (Some((p_pr, p_re)), Some((n_pr, n_re))) =
            (frame_values(params), frame_values(&negated))
        {
            let rows = [
                (Quantity::Jn1Sq, p_pr.jn1_sq, n_pr.jn1_sq, fm_oracle.jn1_sq),
                (Quantity::Jn2Sq, p_pr.jn2_sq, n_pr.jn2_sq, fm_oracle.jn2_sq),
                (
                    Quantity::Anticomm,
                    p_pr.anticomm,
                    n_pr.anticomm,
                    fm_oracle.anticomm,
                ),
                (
                    Quantity::RederivedJn1Sq,
                    p_re.jn1_sq,
                    n_re.jn1_sq,
                    fm_oracle.jn1_sq,
                ),
                (
                    Quantity::RederivedJn2Sq,
                    p_re.jn2_sq,
                    n_re.jn2_sq,
                    fm_oracle.jn2_sq,
                ),
                (
                    Quantity::RederivedAnticomm,
                    p_re.anticomm,
                    n_re.anticomm,
                    fm_oracle.anticomm,
                ),
            ];
            comparisons.extend(rows.into_iter().map(
                |(quantity, as_printed, nu_negated, oracle)| Comparison {
                    quantity,
                    as_printed,
                    nu_negated,
                    oracle,
                },
            ));
        }
        let t = min_transverse_variance(&state, &oracle_frame, ops)?;
        let xi2 = 4.0 * t.lambda_min / N_PARTICLES as f64;
        eq12 = Some((
            squeezing_paper_literal(&fm_oracle),
            squeezing_standard(&fm_oracle),
            xi2,
        ));
    }
    Ok(PointOutcome { comparisons, eq12 })
}

fn pick<H: Copy>(first_passes: bool, second_passes: bool, first: H, second: H, neither: H) -> H {
    match (first_passes, second_passes) {
        (true, false) => first,
        (false, true) => second,
        _ => neither,
    }
}

pub fn run_crosscheck(grid: &[SqueezeParams], tol: f64) -> Result<CrosscheckReport> {
    if grid.is_empty() {
        return Err(invalid("crosscheck grid is empty"));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(invalid(format!("tolerance must be positive, got {tol}")));
    }
    let outcomes: Vec<PointOutcome> = grid.par_iter().map(evaluate_point).collect::<Result<_>>()?;

    let mut as_printed = BTreeMap::new();
    let mut nu_negated = BTreeMap::new();
    let mut compared = BTreeMap::new();
    for outcome in &outcomes {
        for c in &outcome.comparisons {
            let name = c.quantity.name().to_string();
            let a = as_printed.entry(name.clone()).or_insert(0.0f64);
            *a = a.max((c.as_printed - c.oracle).abs());
            let n = nu_negated.entry(name.clone()).or_insert(0.0f64);
            *n = n.max((c.nu_negated - c.oracle).abs());
            *compared.entry(name).or_insert(0usize) += 1;
        }
    }

    let worst = |map: &BTreeMap<String, f64>, pred: fn(&Quantity) -> bool| {
        Quantity::ALL
            .iter()
            .filter(|q| pred(q))
            .filter_map(|q| map.get(q.name()))
            .copied()
            .fold(0.0, f64::max)
    };
    let nu_sign_hypothesis = pick(
        worst(&as_printed, Quantity::discriminates_nu) <= tol,
        worst(&nu_negated, Quantity::discriminates_nu) <= tol,
        NuSignHypothesis::AsPrinted,
        NuSignHypothesis::NuNegated,
        NuSignHypothesis::Inconclusive,
    );
    let convention_independent_ok = worst(&as_printed, Quantity::is_convention_independent) <= tol;

    let (mut lit_max, mut half_max) = (0.0f64, 0.0f64);
    for (lit, half, xi2) in outcomes.iter().filter_map(|o| o.eq12) {
        lit_max = lit_max.max((lit - xi2).abs());
        half_max = half_max.max((half - xi2).abs());
    }
    let any_eq12 = outcomes.iter().any(|o| o.eq12.is_some());
    let eq12_factor_hypothesis = if any_eq12 {
        pick(
            lit_max <= tol,
            half_max <= tol,
            Eq12Hypothesis::Literal,
            Eq12Hypothesis::HalfCorrected,
            Eq12Hypothesis::Inconclusive,
        )
    } else {
        Eq12Hypothesis::Inconclusive
    };
    let mut eq12_max_abs_diff = BTreeMap::new();
    if any_eq12 {
        eq12_max_abs_diff.insert("literal".to_string(), lit_max);
        eq12_max_abs_diff.insert("half-corrected".to_string(), half_max);
    }

    let use_negated = nu_sign_hypothesis == NuSignHypothesis::NuNegated;
    let selected = if use_negated {
        nu_negated.clone()
    } else {
        as_printed.clone()
    };

    let mut failures = Vec::new();
    for (index, (params, outcome)) in grid.iter().zip(&outcomes).enumerate() {
        let mut push = |quantity: &str, closed: f64, oracle: f64| {
            let diff = (closed - oracle).abs();
            if diff > tol {
                failures.push(Failure {
                    index,
                    beta: params.beta(),
                    mu: params.mu(),
                    nu: params.nu(),
                    quantity: quantity.to_string(),
                    closed,
                    oracle,
                    diff,
                });
            }
        };
        for c in &outcome.comparisons {
            let closed = if use_negated {
                c.nu_negated
            } else {
                c.as_printed
            };
            push(c.quantity.name(), closed, c.oracle);
        }
        if let Some((lit, half, xi2)) = outcome.eq12 {
            match eq12_factor_hypothesis {
                Eq12Hypothesis::Literal => push("xi2_eq12", lit, xi2),
                _ => push("xi2_eq12", half, xi2),
            }
        }
    }

    Ok(CrosscheckReport {
        samples: grid.len(),
        tol,
        nu_sign_hypothesis,
        eq12_factor_hypothesis,
        max_abs_diff_per_quantity: selected,
        max_abs_diff_as_printed: as_printed,
        max_abs_diff_nu_negated: nu_negated,
        compared,
        eq12_max_abs_diff,
        convention_independent_ok,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_empty_grid_and_bad_tol() {
        assert!(run_crosscheck(&[], 1e-10).is_err());
        let grid = product_grid(&[0.5], &[0.5], &[0.5]).unwrap();
        assert!(run_crosscheck(&grid, 0.0).is_err());
        assert!(run_crosscheck(&grid, f64::NAN).is_err());
    }

    #[test]
    fn nu_zero_grid_is_inconclusive() {
        let grid = product_grid(&default_betas(), &default_mus(), &[0.0]).unwrap();
        let report = run_crosscheck(&grid, DEFAULT_TOL).unwrap();
        assert_eq!(report.nu_sign_hypothesis, NuSignHypothesis::Inconclusive);
        assert!(report.convention_independent_ok);
    }

    #[test]
    fn default_grid_selects_nu_negated_and_half_factor() {
        let grid = default_grid();
        assert_eq!(grid.len(), 21 * 7 * 6);
        let report = run_crosscheck(&grid, DEFAULT_TOL).unwrap();
        assert_eq!(report.nu_sign_hypothesis, NuSignHypothesis::NuNegated);
        assert_eq!(report.eq12_factor_hypothesis, Eq12Hypothesis::HalfCorrected);
        assert!(report.convention_independent_ok);
        for q in ["jz", "r"] {
            assert!(report.max_abs_diff_as_printed[q] < DEFAULT_TOL);
            assert!(report.max_abs_diff_nu_negated[q] < DEFAULT_TOL);
        }
        for q in [
            "rederived_jn1_sq",
            "rederived_jn2_sq",
            "rederived_anticomm",
            "jn1_sq",
        ] {
            assert!(report.max_abs_diff_per_quantity[q] < DEFAULT_TOL, "{q}");
        }
        assert!(report.failures.iter().all(|f| f.diff > DEFAULT_TOL));
    }

    #[test]
    fn report_is_deterministic() {
        let grid = product_grid(&[0.1, 0.7], &default_mus(), &default_nus()).unwrap();
        let a = serde_json::to_string(&run_crosscheck(&grid, DEFAULT_TOL).unwrap()).unwrap();
        let b = serde_json::to_string(&run_crosscheck(&grid, DEFAULT_TOL).unwrap()).unwrap();
        assert_eq!(a, b);
    }
}
