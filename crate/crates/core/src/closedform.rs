//! Printed closed forms for second moments, frame moments and the squeezing
//! parameter.
//!
//! Every function here evaluates an expression exactly as printed, including
//! the `nu` sign that disagrees with direct computation. Reconciling those
//! conventions is the job of [`crate::crosscheck`].

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::SpinFrame;
use crate::spin::{SqueezeParams, N_PARTICLES};

/// `<J+^2>`, `<Jz^2>` and `<J+(2Jz + 1)>`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentSet {
    pub jplus_sq: Complex64,
    pub jz_sq: f64,
    pub jplus_2jz1: Complex64,
}

/// Symmetrised Cartesian second moments obtained from a [`MomentSet`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CartesianMoments {
    pub jx2_plus_jy2: f64,
    pub jx2_minus_jy2: f64,
    pub xy_anticomm: f64,
    pub xz_anticomm: f64,
    pub yz_anticomm: f64,
}

/// `<J_{n1}^2>`, `<J_{n2}^2>` and `<J_{n1} J_{n2} + J_{n2} J_{n1}>`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameMoments {
    pub jn1_sq: f64,
    pub jn2_sq: f64,
    pub anticomm: f64,
}

/// Symmetric table `T[a][b] = <(J_a J_b + J_b J_a)/2>` over `x, y, z`.
pub type SecondMomentTable = [[f64; 3]; 3];

pub fn second_moments_closed_form(params: &SqueezeParams) -> MomentSet {
    let (alpha, beta) = (params.alpha(), params.beta());
    let (sin_mu, cos_mu) = params.mu().sin_cos();
    let nu = params.nu();
    let denom = 1.0 + cos_mu * cos_mu;
    let a2 = alpha * alpha;
    let coherence = 2.0 * alpha * beta / denom.sqrt();
    MomentSet {
        jplus_sq: Complex64::from(-a2 * sin_mu * sin_mu / denom),
        jz_sq: 2.0 * a2 / denom * (1.0 - 0.5 * sin_mu * sin_mu),
        jplus_2jz1: Complex64::new(coherence * nu.cos(), -coherence * nu.sin() * cos_mu),
    }
}

/// Angular-momentum identities for `N = 2`:
/// `<Jx^2 + Jy^2> = N/2 (N/2 + 1) - <Jz^2>`, `<Jx^2 - Jy^2> = Re<J+^2>`,
/// `<{Jx,Jy}> = Im<J+^2>`, `<{Jx,Jz}> = Re<J+(2Jz+1)>`, `<{Jy,Jz}> = Im<J+(2Jz+1)>`.
pub fn cartesian_from_raising(ms2: &MomentSet) -> CartesianMoments {
    let half_n = N_PARTICLES as f64 / 2.0;
    CartesianMoments {
        jx2_plus_jy2: half_n * (half_n + 1.0) - ms2.jz_sq,
        jx2_minus_jy2: ms2.jplus_sq.re,
        xy_anticomm: ms2.jplus_sq.im,
        xz_anticomm: ms2.jplus_2jz1.re,
        yz_anticomm: ms2.jplus_2jz1.im,
    }
}

impl CartesianMoments {
    pub fn table(&self, jz_sq: f64) -> SecondMomentTable {
        let xx = 0.5 * (self.jx2_plus_jy2 + self.jx2_minus_jy2);
        let yy = 0.5 * (self.jx2_plus_jy2 - self.jx2_minus_jy2);
        let xy = 0.5 * self.xy_anticomm;
        let xz = 0.5 * self.xz_anticomm;
        let yz = 0.5 * self.yz_anticomm;
        [[xx, xy, xz], [xy, yy, yz], [xz, yz, jz_sq]]
    }
}

impl FrameMoments {
    /// Projects a Cartesian second-moment table onto the frame's `n1`, `n2`.
    pub fn from_table(table: &SecondMomentTable, frame: &SpinFrame) -> Self {
        let quad = |u: [f64; 3], v: [f64; 3]| {
            let mut acc = 0.0;
            for a in 0..3 {
                for b in 0..3 {
                    acc += u[a] * table[a][b] * v[b];
                }
            }
            acc
        };
        Self {
            jn1_sq: quad(frame.n1, frame.n1),
            jn2_sq: quad(frame.n2, frame.n2),
            anticomm: 2.0 * quad(frame.n1, frame.n2),
        }
    }
}

/// Frame moments through the printed expressions at the frame's `(theta, phi)`.
pub fn frame_moments_closed_form(
    params: &SqueezeParams,
    frame: &SpinFrame,
) -> Result<FrameMoments> {
    if !frame.has_transverse_plane() {
        return Err(Error::DegenerateFrame);
    }
    let (alpha, beta) = (params.alpha(), params.beta());
    let (sin_mu, cos_mu) = params.mu().sin_cos();
    let (sin_nu, cos_nu) = params.nu().sin_cos();
    let (sin_t, cos_t) = frame.theta.sin_cos();
    let (sin_p, cos_p) = frame.phi.sin_cos();
    let denom = 1.0 + cos_mu * cos_mu;
    let a2 = alpha * alpha;
    let b2 = beta * beta;
    let s2mu = sin_mu * sin_mu;
    let coherence = 2.0 * alpha * beta / denom.sqrt();

    let jn1_sq = a2 / denom * (1.0 - s2mu * sin_p * sin_p) + b2;
    let jn2_sq = -a2 * s2mu / (2.0 * denom) * (2.0 * frame.phi).cos() * cos_t * cos_t
        + b2 * cos_t * cos_t
        + a2 / denom * (1.0 - 0.5 * s2mu) * (1.0 + sin_t * sin_t)
        + cos_t * sin_t * cos_p * coherence * (sin_nu * cos_mu - cos_nu);
    let anticomm =
        -a2 * s2mu / denom - coherence * sin_t * (sin_p * cos_nu + cos_p * sin_nu * cos_mu);
    Ok(FrameMoments {
        jn1_sq,
        jn2_sq,
        anticomm,
    })
}

/// Frame moments re-derived by projecting the Cartesian identities onto the
/// frame, rather than through the printed frame-moment expressions.
pub fn frame_moments_from_moments(ms2: &MomentSet, frame: &SpinFrame) -> Result<FrameMoments> {
    if !frame.has_transverse_plane() {
        return Err(Error::DegenerateFrame);
    }
    let table = cartesian_from_raising(ms2).table(ms2.jz_sq);
    Ok(FrameMoments::from_table(&table, frame))
}

/// Radical form of the minimal transverse variance, without the 1/2 prefactor.
fn printed_min_variance(fm: &FrameMoments) -> f64 {
    let diff = fm.jn1_sq - fm.jn2_sq;
    (fm.jn1_sq + fm.jn2_sq) - (diff * diff + fm.anticomm * fm.anticomm).sqrt()
}

/// `lambda_min = 1/2 [(A + B) - sqrt((A - B)^2 + C^2)]`, valid when the
/// transverse means vanish.
pub fn min_transverse_variance_closed_form(fm: &FrameMoments) -> f64 {
    0.5 * printed_min_variance(fm)
}

/// `4 (Delta J_perp)^2_min / N` with the radical form exactly as printed.
pub fn squeezing_paper_literal(fm: &FrameMoments) -> f64 {
    4.0 * printed_min_variance(fm) / N_PARTICLES as f64
}

/// `4 lambda_min / N` with the conventional 1/2 in `lambda_min`.
pub fn squeezing_standard(fm: &FrameMoments) -> f64 {
    4.0 * min_transverse_variance_closed_form(fm) / N_PARTICLES as f64
}
