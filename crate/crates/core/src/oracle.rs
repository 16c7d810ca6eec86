//! Ground truth computed directly from the state vector and operator matrices.
//!
//! Nothing in this module evaluates a printed closed form. Minimal variances
//! are found twice: by a closed 2x2 (or 3x3) eigenvalue, and by an angle grid
//! refined with golden-section search. The two must agree.

use std::f64::consts::{PI, TAU};
use std::sync::OnceLock;

use nalgebra::{DVector, Matrix3, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::closedform::{FrameMoments, MomentSet, SecondMomentTable};
use crate::error::{invalid, Error, Result};
use crate::frame::{compute_frame, FrameStatus, MeanSpin, SpinFrame, DEFAULT_FRAME_EPS};
use crate::minimize::golden_section;
use crate::spin::{
    build_spin_operators, build_superposition_state, expectation, Matrix, SpinOperatorSet,
    SqueezeParams, StateVector, N_PARTICLES,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleConfig {
    pub transverse_grid: usize,
    pub sphere_theta: usize,
    pub sphere_phi: usize,
    /// Golden-section bracket width at which refinement stops.
    pub refine_width: f64,
    pub transverse_agree_tol: f64,
    pub sphere_agree_tol: f64,
    pub frame_eps: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            transverse_grid: 4096,
            sphere_theta: 64,
            sphere_phi: 128,
            refine_width: 1e-12,
            transverse_agree_tol: 1e-8,
            sphere_agree_tol: 1e-6,
            frame_eps: DEFAULT_FRAME_EPS,
        }
    }
}

/// Spin-1 operators, built once.
pub fn spin_one() -> &'static SpinOperatorSet {
    static OPS: OnceLock<SpinOperatorSet> = OnceLock::new();
    OPS.get_or_init(|| build_spin_operators(1.0).expect("j = 1 is valid"))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleMoments {
    pub mean: MeanSpin,
    pub moments: MomentSet,
    /// `<(J_a J_b + J_b J_a)/2>` for `a, b` in `x, y, z`.
    pub table: SecondMomentTable,
}

pub fn moments_oracle(state: &StateVector, ops: &SpinOperatorSet) -> Result<OracleMoments> {
    if ops.dim() != state.dim() {
        return Err(invalid(format!(
            "operator dimension {} does not match state dimension {}",
            ops.dim(),
            state.dim()
        )));
    }
    let cart = ops.cartesian();
    let mut first = [0.0; 3];
    for (slot, op) in first.iter_mut().zip(cart) {
        *slot = expectation(op, state)?.re;
    }
    let mut table = [[0.0; 3]; 3];
    for a in 0..3 {
        for b in a..3 {
            let sym = (cart[a] * cart[b] + cart[b] * cart[a]) * Complex64::from(0.5);
            let v = expectation(&sym, state)?.re;
            table[a][b] = v;
            table[b][a] = v;
        }
    }
    let jplus_sq = expectation(&(ops.jplus() * ops.jplus()), state)?;
    let raised = ops.jplus() * (ops.jz() * Complex64::from(2.0) + ops.identity());
    let jplus_2jz1 = expectation(&raised, state)?;
    Ok(OracleMoments {
        mean: MeanSpin::new(first[0], first[1], first[2]),
        moments: MomentSet {
            jplus_sq,
            jz_sq: table[2][2],
            jplus_2jz1,
        },
        table,
    })
}

/// Direct `<J_{n1}^2>`, `<J_{n2}^2>`, `<{J_{n1}, J_{n2}}>` on the state.
pub fn frame_moments_oracle(
    state: &StateVector,
    frame: &SpinFrame,
    ops: &SpinOperatorSet,
) -> Result<FrameMoments> {
    if !frame.has_transverse_plane() {
        return Err(Error::DegenerateFrame);
    }
    let j1 = ops.along(frame.n1);
    let j2 = ops.along(frame.n2);
    let e = |m: &Matrix| expectation(m, state).map(|z| z.re);
    Ok(FrameMoments {
        jn1_sq: e(&(&j1 * &j1))?,
        jn2_sq: e(&(&j2 * &j2))?,
        anticomm: e(&(&j1 * &j2 + &j2 * &j1))?,
    })
}

/// Variance of `u . J` for a real direction `u`, from the vectors `J_a |psi>`.
struct VarianceProbe<'a> {
    state: &'a DVector<Complex64>,
    images: Vec<DVector<Complex64>>,
}

impl<'a> VarianceProbe<'a> {
    fn new(state: &'a StateVector, ops: &[Matrix]) -> Result<Self> {
        let images = ops
            .iter()
            .map(|op| state.apply(op))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            state: state.as_vector(),
            images,
        })
    }

    fn variance(&self, weights: &[f64]) -> f64 {
        let mut v = DVector::<Complex64>::zeros(self.state.len());
        for (w, img) in weights.iter().zip(&self.images) {
            v.axpy(Complex64::from(*w), img, Complex64::from(1.0));
        }
        let mean = self.state.dotc(&v).re;
        v.norm_squared() - mean * mean
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransverseMinimum {
    /// Smallest eigenvalue of the transverse covariance matrix.
    pub lambda_min: f64,
    /// Angle from `n1` towards `n2` of the minimising direction, in `[0, pi)`.
    pub chi_min: f64,
    pub search_lambda_min: f64,
    pub search_chi_min: f64,
    pub covariance: [[f64; 2]; 2],
}

/// `Gamma_ik = <{J_ni, J_nk}>/2 - <J_ni><J_nk>` over `n1`, `n2`.
pub fn transverse_covariance(
    state: &StateVector,
    frame: &SpinFrame,
    ops: &SpinOperatorSet,
) -> Result<[[f64; 2]; 2]> {
    if !frame.has_transverse_plane() {
        return Err(Error::DegenerateFrame);
    }
    let j = [ops.along(frame.n1), ops.along(frame.n2)];
    let mean = [expectation(&j[0], state)?.re, expectation(&j[1], state)?.re];
    let mut cov = [[0.0; 2]; 2];
    for i in 0..2 {
        for k in 0..2 {
            let sym = (&j[i] * &j[k] + &j[k] * &j[i]) * Complex64::from(0.5);
            cov[i][k] = expectation(&sym, state)?.re - mean[i] * mean[k];
        }
    }
    Ok(cov)
}

fn wrap_half_turn(chi: f64) -> f64 {
    let w = chi.rem_euclid(PI);
    if w >= PI {
        0.0
    } else {
        w
    }
}

/// Minimum eigenvalue and its direction angle for a symmetric 2x2 matrix.
fn min_eigen_2x2(cov: &[[f64; 2]; 2]) -> (f64, f64) {
    let (a, b, c) = (cov[0][0], cov[1][1], 0.5 * (cov[0][1] + cov[1][0]));
    let half_diff = 0.5 * (a - b);
    let rho = half_diff.hypot(c);
    let lambda = 0.5 * (a + b) - rho;
    // Isotropic within rounding: every chi is a minimiser; take the smallest.
    if rho <= 1e-12 * (1.0 + a.abs() + b.abs()) {
        return (lambda, 0.0);
    }
    let delta = c.atan2(half_diff);
    (lambda, wrap_half_turn(0.5 * (delta + PI)))
}

pub fn min_transverse_variance(
    state: &StateVector,
    frame: &SpinFrame,
    ops: &SpinOperatorSet,
) -> Result<TransverseMinimum> {
    min_transverse_variance_with(state, frame, ops, &OracleConfig::default())
}

pub fn min_transverse_variance_with(
    state: &StateVector,
    frame: &SpinFrame,
    ops: &SpinOperatorSet,
    cfg: &OracleConfig,
) -> Result<TransverseMinimum> {
    let covariance = transverse_covariance(state, frame, ops)?;
    let (lambda_min, chi_min) = min_eigen_2x2(&covariance);

    let probe = VarianceProbe::new(state, &[ops.along(frame.n1), ops.along(frame.n2)])?;
    let var = |chi: f64| probe.variance(&[chi.cos(), chi.sin()]);
    let n = cfg.transverse_grid.max(3);
    let step = PI / n as f64;
    let (best_k, _) =
        (0..n)
            .map(|k| (k, var(k as f64 * step)))
            .fold((0, f64::INFINITY), |best, cand| {
                if cand.1 < best.1 {
                    cand
                } else {
                    best
                }
            });
    let centre = best_k as f64 * step;
    let refined = golden_section(var, centre - step, centre + step, cfg.refine_width, 500);
    let search_lambda_min = refined.value;
    let search_chi_min = wrap_half_turn(refined.x);

    if (lambda_min - search_lambda_min).abs() > cfg.transverse_agree_tol {
        return Err(Error::OracleMismatch {
            route: "transverse",
            eigen: lambda_min,
            search: search_lambda_min,
            tol: cfg.transverse_agree_tol,
        });
    }
    Ok(TransverseMinimum {
        lambda_min,
        chi_min,
        search_lambda_min,
        search_chi_min,
        covariance,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AllDirectionsMinimum {
    pub lambda_min: f64,
    /// Unit minimising direction, sign fixed so its largest component is positive.
    pub direction: [f64; 3],
    pub search_lambda_min: f64,
    pub search_direction: [f64; 3],
}

fn canonical_sign(u: [f64; 3]) -> [f64; 3] {
    let lead = u
        .iter()
        .copied()
        .fold(0.0f64, |acc, x| if x.abs() > acc.abs() { x } else { acc });
    if lead < 0.0 {
        [-u[0], -u[1], -u[2]]
    } else {
        u
    }
}

fn sphere_point(theta: f64, phi: f64) -> [f64; 3] {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    [st * cp, st * sp, ct]
}

pub fn min_variance_all_directions(
    state: &StateVector,
    ops: &SpinOperatorSet,
) -> Result<AllDirectionsMinimum> {
    min_variance_all_directions_with(state, ops, &OracleConfig::default())
}

pub fn min_variance_all_directions_with(
    state: &StateVector,
    ops: &SpinOperatorSet,
    cfg: &OracleConfig,
) -> Result<AllDirectionsMinimum> {
    let om = moments_oracle(state, ops)?;
    let m = om.mean.as_array();
    let cov = Matrix3::from_fn(|a, b| om.table[a][b] - m[a] * m[b]);
    let eig = SymmetricEigen::new(cov);
    let idx = eig.eigenvalues.imin();
    let lambda_min = eig.eigenvalues[idx];
    let v = eig.eigenvectors.column(idx);
    let direction = canonical_sign([v[0], v[1], v[2]]);

    let cart: Vec<Matrix> = ops.cartesian().into_iter().cloned().collect();
    let probe = VarianceProbe::new(state, &cart)?;
    let var = |theta: f64, phi: f64| probe.variance(&sphere_point(theta, phi));
    let (nt, np) = (cfg.sphere_theta.max(2), cfg.sphere_phi.max(3));
    let (dt, dp) = (PI / nt as f64, TAU / np as f64);
    let mut best = (0.0, 0.0, f64::INFINITY);
    for i in 0..nt {
        let theta = (i as f64 + 0.5) * dt;
        for k in 0..np {
            let phi = k as f64 * dp;
            let value = var(theta, phi);
            if value < best.2 {
                best = (theta, phi, value);
            }
        }
    }
    // Coordinate-wise golden-section refinement around the best grid node.
    let (mut theta, mut phi, mut value) = best;
    for _ in 0..200 {
        let before = value;
        let t = golden_section(
            |t| var(t, phi),
            theta - dt,
            theta + dt,
            cfg.refine_width,
            500,
        );
        theta = t.x;
        let p = golden_section(|p| var(theta, p), phi - dp, phi + dp, cfg.refine_width, 500);
        phi = p.x;
        value = p.value.min(t.value);
        if before - value <= 1e-16 {
            break;
        }
    }
    let search_direction = canonical_sign(sphere_point(theta, phi));

    if (lambda_min - value).abs() > cfg.sphere_agree_tol {
        return Err(Error::OracleMismatch {
            route: "all-directions",
            eigen: lambda_min,
            search: value,
            tol: cfg.sphere_agree_tol,
        });
    }
    Ok(AllDirectionsMinimum {
        lambda_min,
        direction,
        search_lambda_min: value,
        search_direction,
    })
}

/// Two-qubit concurrence of a symmetric (triplet-basis) pure state.
///
/// `c_uu = c_{+1}`, `c_ud = c_du = c_0 / sqrt2`, `c_dd = c_{-1}`, and
/// `C = 2 |c_uu c_dd - c_ud c_du|`.
pub fn concurrence(state: &StateVector) -> Result<f64> {
    let [up, zero, down] = state.amplitudes() else {
        return Err(invalid(format!(
            "concurrence needs a 3-dimensional triplet state, got {}",
            state.dim()
        )));
    };
    let mixed = zero / std::f64::consts::SQRT_2;
    Ok((2.0 * (up * down - mixed * mixed).norm()).min(1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SqueezeMethod {
    TransverseEigen,
    AllDirections,
}

impl SqueezeMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            SqueezeMethod::TransverseEigen => "transverse-eigen",
            SqueezeMethod::AllDirections => "all-directions",
        }
    }
}

impl std::fmt::Display for SqueezeMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqueezeResult {
    pub params: SqueezeParams,
    pub mean: MeanSpin,
    pub frame: SpinFrame,
    pub frame_status: FrameStatus,
    pub method: SqueezeMethod,
    pub lambda_min: f64,
    /// Same minimum from the grid + golden-section route.
    pub search_lambda_min: f64,
    /// Minimising angle from `n1`; `None` on the all-directions path.
    pub chi_min: Option<f64>,
    /// Minimising direction on the all-directions path.
    pub min_direction: Option<[f64; 3]>,
    /// Direct frame moments; `None` when the frame is fully degenerate.
    pub frame_moments: Option<FrameMoments>,
    pub xi2_std: f64,
    pub xi2_literal: f64,
    pub concurrence: f64,
}

pub fn squeeze_oracle(params: &SqueezeParams) -> Result<SqueezeResult> {
    squeeze_oracle_with(params, &OracleConfig::default())
}

pub fn squeeze_oracle_with(params: &SqueezeParams, cfg: &OracleConfig) -> Result<SqueezeResult> {
    let ops = spin_one();
    let state = build_superposition_state(params);
    let om = moments_oracle(&state, ops)?;
    let frame = compute_frame(&om.mean, cfg.frame_eps);
    let concurrence = concurrence(&state)?;

    let (method, lambda_min, search_lambda_min, chi_min, min_direction, frame_moments) =
        if frame.has_transverse_plane() {
            let t = min_transverse_variance_with(&state, &frame, ops, cfg)?;
            let fm = frame_moments_oracle(&state, &frame, ops)?;
            (
                SqueezeMethod::TransverseEigen,
                t.lambda_min,
                t.search_lambda_min,
                Some(t.chi_min),
                None,
                Some(fm),
            )
        } else {
            let a = min_variance_all_directions_with(&state, ops, cfg)?;
            (
                SqueezeMethod::AllDirections,
                a.lambda_min,
                a.search_lambda_min,
                None,
                Some(a.direction),
                None,
            )
        };
    let xi2_std = 4.0 * lambda_min / N_PARTICLES as f64;
    Ok(SqueezeResult {
        params: *params,
        mean: om.mean,
        frame,
        frame_status: frame.status,
        method,
        lambda_min,
        search_lambda_min,
        chi_min,
        min_direction,
        frame_moments,
        xi2_std,
        xi2_literal: 2.0 * xi2_std,
        concurrence,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closedform::squeezing_standard;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4};

    fn p(beta: f64, mu: f64, nu: f64) -> SqueezeParams {
        SqueezeParams::new(beta, mu, nu).unwrap()
    }

    fn state(beta: f64, mu: f64, nu: f64) -> StateVector {
        build_superposition_state(&p(beta, mu, nu))
    }

    #[test]
    fn moments_of_basis_states() {
        let ops = spin_one();
        let om = moments_oracle(&state(0.0, 0.0, 0.0), ops).unwrap();
        assert_eq!(om.mean.as_array(), [0.0, 0.0, 1.0]);
        assert!((om.table[0][0] - 0.5).abs() < 1e-15);
        assert!((om.table[1][1] - 0.5).abs() < 1e-15);
        assert!((om.table[2][2] - 1.0).abs() < 1e-15);

        let om = moments_oracle(&state(1.0, 0.0, 0.0), ops).unwrap();
        assert!(om.mean.length() < 1e-15);
        assert!((om.table[0][0] - 1.0).abs() < 1e-15);
        assert!((om.table[1][1] - 1.0).abs() < 1e-15);
        assert!(om.table[2][2].abs() < 1e-15);

        let om = moments_oracle(&state(0.0, FRAC_PI_2, 0.0), ops).unwrap();
        assert!((om.moments.jplus_sq - Complex64::from(-1.0)).norm() < 1e-12);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let half = build_spin_operators(0.5).unwrap();
        assert!(moments_oracle(&state(0.2, 0.2, 0.2), &half).is_err());
        let two =
            StateVector::from_amplitudes(vec![Complex64::from(1.0), Complex64::from(0.0)]).unwrap();
        assert!(concurrence(&two).is_err());
    }

    #[test]
    fn coherent_state_transverse_minimum() {
        let ops = spin_one();
        let s = state(0.0, 0.0, 0.0);
        let frame = compute_frame(&moments_oracle(&s, ops).unwrap().mean, DEFAULT_FRAME_EPS);
        let t = min_transverse_variance(&s, &frame, ops).unwrap();
        assert!((t.lambda_min - 0.5).abs() < 1e-12);
        assert_eq!(t.chi_min, 0.0);
        assert!((t.search_lambda_min - 0.5).abs() < 1e-12);
    }

    #[test]
    fn chi_is_zero_when_n1_is_the_soft_axis() {
        let (l, chi) = min_eigen_2x2(&[[0.2, 0.0], [0.0, 0.7]]);
        assert!((l - 0.2).abs() < 1e-15);
        assert_eq!(chi, 0.0);
        let (l, chi) = min_eigen_2x2(&[[0.7, 0.0], [0.0, 0.2]]);
        assert!((l - 0.2).abs() < 1e-15);
        assert!((chi - FRAC_PI_2).abs() < 1e-15);
        let (_, chi) = min_eigen_2x2(&[[0.5, -0.1], [-0.1, 0.5]]);
        assert!((chi - FRAC_PI_4).abs() < 1e-15);
    }

    #[test]
    fn generic_point_routes_agree() {
        let ops = spin_one();
        let s = state(0.6, FRAC_PI_3, FRAC_PI_4);
        let frame = compute_frame(&moments_oracle(&s, ops).unwrap().mean, DEFAULT_FRAME_EPS);
        let t = min_transverse_variance(&s, &frame, ops).unwrap();
        assert!((t.lambda_min - t.search_lambda_min).abs() < 1e-8);
        assert!((t.chi_min - t.search_chi_min).abs() < 1e-5);
        // Frozen from the two routes above (independently prototyped).
        assert!((t.lambda_min - 0.236_819_453_606_464_5).abs() < 1e-12);
    }

    #[test]
    fn degenerate_frame_is_rejected_for_transverse() {
        let ops = spin_one();
        let s = state(1.0, 0.3, 0.0);
        let frame = compute_frame(&moments_oracle(&s, ops).unwrap().mean, DEFAULT_FRAME_EPS);
        assert!(matches!(
            min_transverse_variance(&s, &frame, ops),
            Err(Error::DegenerateFrame)
        ));
    }

    #[test]
    fn all_directions_examples() {
        let ops = spin_one();
        let a = min_variance_all_directions(&state(1.0, 0.0, 0.0), ops).unwrap();
        assert!(a.lambda_min.abs() < 1e-12);
        assert!((a.direction[2].abs() - 1.0).abs() < 1e-9);
        assert!(a.search_lambda_min.abs() < 1e-6);

        // (|11> - |1,-1>)/sqrt2 is the m = 0 eigenstate of Jx.
        let a = min_variance_all_directions(&state(0.0, FRAC_PI_2, 0.0), ops).unwrap();
        assert!(a.lambda_min.abs() < 1e-12);
        assert!((a.direction[0].abs() - 1.0).abs() < 1e-9);
        assert!(a.search_lambda_min.abs() < 1e-6);

        // |11>: Var(Jz) = 0, so the unrestricted minimum is 0, not the transverse 1/2.
        let a = min_variance_all_directions(&state(0.0, 0.0, 0.0), ops).unwrap();
        assert!(a.lambda_min.abs() < 1e-12);
        assert!(a.search_lambda_min.abs() < 1e-6);
    }

    #[test]
    fn concurrence_examples() {
        assert!(concurrence(&state(0.0, 0.0, 0.0)).unwrap().abs() < 1e-12);
        assert!((concurrence(&state(0.0, FRAC_PI_2, 0.0)).unwrap() - 1.0).abs() < 1e-12);
        assert!((concurrence(&state(1.0, 0.4, 2.0)).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn squeeze_oracle_examples() {
        let r = squeeze_oracle(&p(0.0, 0.0, 0.0)).unwrap();
        assert!((r.xi2_std - 1.0).abs() < 1e-10);
        assert!((r.xi2_literal - 2.0).abs() < 1e-10);
        assert!(r.concurrence.abs() < 1e-12);
        assert_eq!(r.method, SqueezeMethod::TransverseEigen);
        assert_eq!(r.frame_status, FrameStatus::PolarDegenerate);

        let r = squeeze_oracle(&p(0.0, FRAC_PI_2, 0.0)).unwrap();
        assert_eq!(r.method, SqueezeMethod::AllDirections);
        assert_eq!(r.frame_status, FrameStatus::FullyDegenerate);
        assert!(r.chi_min.is_none() && r.frame_moments.is_none());

        // Regression value on the mu = pi/2, nu = -pi/3 curve.
        let r = squeeze_oracle(&p(0.6, FRAC_PI_2, -FRAC_PI_3)).unwrap();
        assert_eq!(r.method, SqueezeMethod::TransverseEigen);
        assert!(
            (r.xi2_std - 0.444_302_240_422_007_7).abs() < 1e-10,
            "{}",
            r.xi2_std
        );
        let fm = r.frame_moments.unwrap();
        assert!((squeezing_standard(&fm) - r.xi2_std).abs() < 1e-10);
    }
}
