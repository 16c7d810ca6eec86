//! Mean spin vector, its length, and the rotated triad `(n1, n2, n3)`.
//!
//! `n3` points along the mean spin; `n1` and `n2` span the plane in which
//! squeezing is measured. The triad rows are
//!
//! ```text
//! n1 = (-sin phi,           cos phi,           0        )
//! n2 = (-cos theta cos phi, -cos theta sin phi, sin theta)
//! n3 = ( sin theta cos phi,  sin theta sin phi, cos theta)
//! ```

use std::f64::consts::TAU;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spin::{Matrix, SpinOperatorSet, SqueezeParams};

/// Default degeneracy threshold for [`compute_frame`].
pub const DEFAULT_FRAME_EPS: f64 = 1e-12;

/// First moments `<Jx>, <Jy>, <Jz>`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanSpin {
    pub jx: f64,
    pub jy: f64,
    pub jz: f64,
}

impl MeanSpin {
    pub fn new(jx: f64, jy: f64, jz: f64) -> Self {
        Self { jx, jy, jz }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.jx, self.jy, self.jz]
    }

    pub fn length(&self) -> f64 {
        mean_spin_length(self)
    }
}

/// Mean spin from the printed closed forms. The `<Jy>` sign is kept as printed.
pub fn mean_spin_closed_form(params: &SqueezeParams) -> MeanSpin {
    let (alpha, beta) = (params.alpha(), params.beta());
    let (cos_mu, nu) = (params.mu().cos(), params.nu());
    let denom = 1.0 + cos_mu * cos_mu;
    let coherence = 2.0 * alpha * beta / denom.sqrt();
    MeanSpin {
        jx: coherence * nu.cos() * cos_mu,
        jy: -coherence * nu.sin(),
        jz: 2.0 * alpha * alpha / denom * cos_mu,
    }
}

pub fn mean_spin_length(ms: &MeanSpin) -> f64 {
    (ms.jx * ms.jx + ms.jy * ms.jy + ms.jz * ms.jz).sqrt()
}

/// Mean spin length through the simplified closed form, which silently uses
/// `alpha^2 + beta^2 = 1`.
pub fn mean_spin_length_closed_form(params: &SqueezeParams) -> f64 {
    let (alpha, beta) = (params.alpha(), params.beta());
    let cos2_mu = params.mu().cos().powi(2);
    let nu = params.nu();
    let b2 = beta * beta;
    let radicand = b2 * nu.cos().powi(2) * cos2_mu * cos2_mu + b2 * nu.sin().powi(2) + cos2_mu;
    2.0 * alpha / (1.0 + cos2_mu) * radicand.sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FrameStatus {
    Regular,
    /// `sin(theta) ~ 0`: mean spin along `+-z`, `phi` fixed to 0.
    PolarDegenerate,
    /// `R ~ 0`: no mean-spin direction at all.
    FullyDegenerate,
}

impl FrameStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            FrameStatus::Regular => "regular",
            FrameStatus::PolarDegenerate => "polar-degenerate",
            FrameStatus::FullyDegenerate => "fully-degenerate",
        }
    }
}

impl fmt::Display for FrameStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpinFrame {
    pub n1: [f64; 3],
    pub n2: [f64; 3],
    pub n3: [f64; 3],
    pub theta: f64,
    pub phi: f64,
    pub r: f64,
    pub status: FrameStatus,
}

impl SpinFrame {
    /// Triad for explicit angles; `r` and `status` are carried as given.
    pub fn from_angles(theta: f64, phi: f64, r: f64, status: FrameStatus) -> Self {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        Self {
            n1: [-sp, cp, 0.0],
            n2: [-ct * cp, -ct * sp, st],
            n3: [st * cp, st * sp, ct],
            theta,
            phi,
            r,
            status,
        }
    }

    /// Rows `n1, n2, n3`.
    pub fn rotation_matrix(&self) -> [[f64; 3]; 3] {
        [self.n1, self.n2, self.n3]
    }

    /// Whether the transverse plane is defined (anything but fully degenerate).
    pub fn has_transverse_plane(&self) -> bool {
        self.status != FrameStatus::FullyDegenerate
    }
}

pub fn compute_frame(ms: &MeanSpin, eps: f64) -> SpinFrame {
    let r = mean_spin_length(ms);
    if r.is_nan() || r < eps {
        return SpinFrame::from_angles(0.0, 0.0, r, FrameStatus::FullyDegenerate);
    }
    // atan2 rather than acos of a ratio: acos loses half the digits near +-1,
    // which happens whenever the mean spin lies in a coordinate plane.
    let rho = ms.jx.hypot(ms.jy);
    let theta = rho.atan2(ms.jz);
    if rho / r < eps {
        return SpinFrame::from_angles(theta, 0.0, r, FrameStatus::PolarDegenerate);
    }
    let phi = ms.jy.atan2(ms.jx) + 0.0;
    let phi = if phi < 0.0 { phi + TAU } else { phi };
    // A vanishing negative jy lands on 2pi; keep phi in [0, 2pi).
    let phi = if phi >= TAU { phi - TAU } else { phi };
    SpinFrame::from_angles(theta, phi, r, FrameStatus::Regular)
}

/// `J_{n1}` and `J_{n2}`, the spin components spanning the transverse plane.
pub fn project_transverse_operators(
    frame: &SpinFrame,
    ops: &SpinOperatorSet,
) -> Result<(Matrix, Matrix)> {
    if !frame.has_transverse_plane() {
        return Err(Error::DegenerateFrame);
    }
    Ok((ops.along(frame.n1), ops.along(frame.n2)))
}
