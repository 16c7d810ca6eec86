//! Spin-j operator matrices, the superposition state, and expectation values.
//!
//! Everything here is shared by the closed-form and the oracle paths. Matrices
//! are dense and indexed in the `|j, m>` basis ordered `m = +j, ..., -j`; for
//! the two-qubit symmetric subspace that is `|11>, |10>, |1,-1>`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Number of spin-1/2 particles in the physical system.
pub const N_PARTICLES: usize = 2;

/// Largest operator dimension `build_spin_operators` accepts by default.
pub const DEFAULT_MAX_DIM: usize = 64;

/// Tolerance on `|psi|^2 - 1` accepted by [`StateVector::from_amplitudes`].
pub const NORM_TOL: f64 = 1e-12;

pub type Matrix = DMatrix<Complex64>;

/// Dense `Jx, Jy, Jz, J+, J-` for one spin quantum number.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinOperatorSet {
    j: f64,
    jx: Matrix,
    jy: Matrix,
    jz: Matrix,
    jplus: Matrix,
    jminus: Matrix,
}

impl SpinOperatorSet {
    pub fn j(&self) -> f64 {
        self.j
    }

    pub fn dim(&self) -> usize {
        self.jz.nrows()
    }

    pub fn jx(&self) -> &Matrix {
        &self.jx
    }

    pub fn jy(&self) -> &Matrix {
        &self.jy
    }

    pub fn jz(&self) -> &Matrix {
        &self.jz
    }

    pub fn jplus(&self) -> &Matrix {
        &self.jplus
    }

    pub fn jminus(&self) -> &Matrix {
        &self.jminus
    }

    /// Cartesian components in `x, y, z` order.
    pub fn cartesian(&self) -> [&Matrix; 3] {
        [&self.jx, &self.jy, &self.jz]
    }

    /// `u . J` for a real direction `u` (not required to be unit length).
    pub fn along(&self, u: [f64; 3]) -> Matrix {
        &self.jx * Complex64::from(u[0])
            + &self.jy * Complex64::from(u[1])
            + &self.jz * Complex64::from(u[2])
    }

    pub fn identity(&self) -> Matrix {
        Matrix::identity(self.dim(), self.dim())
    }
}

/// Builds the spin operators for `j` with the default dimension cap.
pub fn build_spin_operators(j: f64) -> Result<SpinOperatorSet> {
    build_spin_operators_with_max_dim(j, DEFAULT_MAX_DIM)
}

pub fn build_spin_operators_with_max_dim(j: f64, max_dim: usize) -> Result<SpinOperatorSet> {
    if !j.is_finite() || j < 0.0 {
        return Err(invalid(format!(
            "spin j must be a finite non-negative half-integer, got {j}"
        )));
    }
    let twice = 2.0 * j;
    if twice.fract() != 0.0 {
        return Err(invalid(format!("spin j must be a half-integer, got {j}")));
    }
    let dim = twice as usize + 1;
    if dim > max_dim {
        return Err(invalid(format!(
            "dimension {dim} for j = {j} exceeds maximum {max_dim}"
        )));
    }

    let m_of = |i: usize| j - i as f64;
    let jz = Matrix::from_fn(dim, dim, |r, c| {
        if r == c {
            Complex64::from(m_of(r))
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    // J+ |j, m> = sqrt(j(j+1) - m(m+1)) |j, m+1>; m+1 sits one row above m.
    let jplus = Matrix::from_fn(dim, dim, |r, c| {
        if c == r + 1 {
            let m = m_of(c);
            Complex64::from((j * (j + 1.0) - m * (m + 1.0)).max(0.0).sqrt())
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let jminus = jplus.adjoint();
    let half = Complex64::new(0.5, 0.0);
    let jx = (&jplus + &jminus) * half;
    let jy = (&jplus - &jminus) * Complex64::new(0.0, -0.5);

    Ok(SpinOperatorSet {
        j,
        jx,
        jy,
        jz,
        jplus,
        jminus,
    })
}

/// Physical parameters of the biaxial + Bell superposition.
///
/// `alpha` is derived as `sqrt(1 - beta^2)`, so both coefficients are
/// non-negative and all relative phase lives in `nu` and the biaxial part.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqueezeParams {
    beta: f64,
    mu: f64,
    nu: f64,
}

impl SqueezeParams {
    pub fn new(beta: f64, mu: f64, nu: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&beta) {
            return Err(invalid(format!("beta must lie in [0, 1], got {beta}")));
        }
        if !(0.0..=std::f64::consts::PI).contains(&mu) {
            return Err(invalid(format!("mu must lie in [0, pi], got {mu}")));
        }
        if !nu.is_finite() {
            return Err(invalid(format!("nu must be finite, got {nu}")));
        }
        Ok(Self { beta, mu, nu })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn alpha(&self) -> f64 {
        (1.0 - self.beta * self.beta).max(0.0).sqrt()
    }

    /// Same point with the relative phase reflected, `nu -> -nu`.
    pub fn nu_negated(&self) -> Self {
        Self {
            nu: -self.nu,
            ..*self
        }
    }
}

/// Normalised pure state over the `m = +j, ..., -j` basis.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: DVector<Complex64>,
}

impl StateVector {
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(invalid("state must have at least one amplitude"));
        }
        if amplitudes
            .iter()
            .any(|a| !a.re.is_finite() || !a.im.is_finite())
        {
            return Err(invalid("state amplitudes must be finite"));
        }
        let amplitudes = DVector::from_vec(amplitudes);
        let norm_sq = amplitudes.norm_squared();
        if (norm_sq - 1.0).abs() > NORM_TOL {
            return Err(invalid(format!(
                "state is not normalised: |psi|^2 = {norm_sq}"
            )));
        }
        Ok(Self { amplitudes })
    }

    /// `alpha sqrt2 / sqrt(1 + cos^2 mu) (cos^2(mu/2)|11> - sin^2(mu/2)|1,-1>) + beta e^{i nu}|10>`.
    pub fn superposition(params: &SqueezeParams) -> Self {
        let cos_mu = params.mu().cos();
        let a = params.alpha() * std::f64::consts::SQRT_2 / (1.0 + cos_mu * cos_mu).sqrt();
        let half = 0.5 * params.mu();
        let up = a * half.cos().powi(2);
        let down = -a * half.sin().powi(2);
        let bell = Complex64::from_polar(params.beta(), params.nu());
        Self {
            amplitudes: DVector::from_vec(vec![Complex64::from(up), bell, Complex64::from(down)]),
        }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        self.amplitudes.as_slice()
    }

    pub fn as_vector(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// Applies an operator, returning the unnormalised vector `O|psi>`.
    pub fn apply(&self, op: &Matrix) -> Result<DVector<Complex64>> {
        check_dims(op, self)?;
        Ok(op * &self.amplitudes)
    }
}

pub fn build_superposition_state(params: &SqueezeParams) -> StateVector {
    StateVector::superposition(params)
}

fn check_dims(op: &Matrix, state: &StateVector) -> Result<()> {
    if op.nrows() != state.dim() || op.ncols() != state.dim() {
        return Err(invalid(format!(
            "operator is {}x{} but state has dimension {}",
            op.nrows(),
            op.ncols(),
            state.dim()
        )));
    }
    Ok(())
}

/// `<psi|O|psi>`.
pub fn expectation(op: &Matrix, state: &StateVector) -> Result<Complex64> {
    let applied = state.apply(op)?;
    Ok(state.amplitudes.dotc(&applied))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    // Plain triple loop, kept apart from nalgebra's product.
    fn matmul(a: &Matrix, b: &Matrix) -> Matrix {
        let n = a.nrows();
        Matrix::from_fn(n, n, |r, col| (0..n).map(|k| a[(r, k)] * b[(k, col)]).sum())
    }

    fn max_entry_diff(a: &Matrix, b: &Matrix) -> f64 {
        a.iter()
            .zip(b.iter())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn spin_one_jz_is_diagonal() {
        let ops = build_spin_operators(1.0).unwrap();
        assert_eq!(ops.dim(), 3);
        let expected = Matrix::from_diagonal(&DVector::from_vec(vec![
            c(1.0, 0.0),
            c(0.0, 0.0),
            c(-1.0, 0.0),
        ]));
        assert_eq!(ops.jz(), &expected);
        assert!((ops.jplus()[(0, 1)] - c(2f64.sqrt(), 0.0)).norm() < 1e-15);
        assert!((ops.jplus()[(1, 2)] - c(2f64.sqrt(), 0.0)).norm() < 1e-15);
    }

    #[test]
    fn spin_half_jx_is_half_pauli_x() {
        let ops = build_spin_operators(0.5).unwrap();
        let expected =
            Matrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.5, 0.0), c(0.5, 0.0), c(0.0, 0.0)]);
        assert!(max_entry_diff(ops.jx(), &expected) < 1e-15);
    }

    #[test]
    fn spin_three_halves_commutator_by_hand() {
        let ops = build_spin_operators(1.5).unwrap();
        let comm = matmul(ops.jx(), ops.jy()) - matmul(ops.jy(), ops.jx());
        let target = ops.jz() * c(0.0, 1.0);
        assert!(max_entry_diff(&comm, &target) < 1e-12);
    }

    #[test]
    fn rejects_bad_spin() {
        assert!(build_spin_operators(0.3).is_err());
        assert!(build_spin_operators(-1.0).is_err());
        assert!(build_spin_operators(f64::NAN).is_err());
        assert!(build_spin_operators(32.0).is_err()); // dim 65
        assert!(build_spin_operators(31.5).is_ok());
        assert!(build_spin_operators_with_max_dim(2.0, 4).is_err());
    }

    #[test]
    fn rejects_bad_params() {
        assert!(SqueezeParams::new(-0.1, 0.0, 0.0).is_err());
        assert!(SqueezeParams::new(1.1, 0.0, 0.0).is_err());
        assert!(SqueezeParams::new(0.5, 3.2, 0.0).is_err());
        assert!(SqueezeParams::new(0.5, 1.0, f64::INFINITY).is_err());
        assert!(SqueezeParams::new(0.5, PI, -7.0).is_ok());
    }

    #[test]
    fn state_examples() {
        let s = build_superposition_state(&SqueezeParams::new(0.0, 0.0, 0.0).unwrap());
        assert_eq!(s.amplitudes(), &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);

        let s = build_superposition_state(&SqueezeParams::new(1.0, 0.7, FRAC_PI_2).unwrap());
        let a = s.amplitudes();
        assert!(a[0].norm() < 1e-15 && a[2].norm() < 1e-15);
        assert!((a[1] - c(0.0, 1.0)).norm() < 1e-15);

        let s = build_superposition_state(&SqueezeParams::new(0.0, FRAC_PI_2, 0.0).unwrap());
        let a = s.amplitudes();
        assert!((a[0] - c(FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
        assert!(a[1].norm() < 1e-15);
        assert!((a[2] - c(-FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn expectation_examples() {
        let ops = build_spin_operators(1.0).unwrap();
        let up = build_superposition_state(&SqueezeParams::new(0.0, 0.0, 0.0).unwrap());
        assert!((expectation(ops.jz(), &up).unwrap() - c(1.0, 0.0)).norm() < 1e-15);

        let cat = build_superposition_state(&SqueezeParams::new(0.0, FRAC_PI_2, 0.0).unwrap());
        let jp2 = ops.jplus() * ops.jplus();
        assert!((expectation(&jp2, &cat).unwrap() - c(-1.0, 0.0)).norm() < 1e-12);

        let bell = build_superposition_state(&SqueezeParams::new(1.0, 0.0, 0.0).unwrap());
        assert!(expectation(ops.jx(), &bell).unwrap().norm() < 1e-15);
    }

    #[test]
    fn expectation_dimension_mismatch() {
        let ops = build_spin_operators(0.5).unwrap();
        let s = build_superposition_state(&SqueezeParams::new(0.3, 0.3, 0.3).unwrap());
        assert!(expectation(ops.jz(), &s).is_err());
    }

    #[test]
    fn from_amplitudes_checks_norm() {
        assert!(StateVector::from_amplitudes(vec![c(1.0, 0.0), c(1.0, 0.0)]).is_err());
        assert!(StateVector::from_amplitudes(vec![]).is_err());
        assert!(StateVector::from_amplitudes(vec![c(0.6, 0.0), c(0.0, 0.8)]).is_ok());
    }

    #[test]
    fn operator_invariants_for_small_spins() {
        for j in [0.5, 1.0, 1.5, 2.0, 2.5] {
            let ops = build_spin_operators(j).unwrap();
            let i = c(0.0, 1.0);
            for m in ops.cartesian() {
                assert!(max_entry_diff(m, &m.adjoint()) < 1e-12, "hermitian j={j}");
            }
            assert!(max_entry_diff(ops.jplus(), &ops.jminus().adjoint()) < 1e-15);
            let (x, y, z) = (ops.jx(), ops.jy(), ops.jz());
            let comm = |a: &Matrix, b: &Matrix| matmul(a, b) - matmul(b, a);
            assert!(max_entry_diff(&comm(x, y), &(z * i)) < 1e-12, "[x,y] j={j}");
            assert!(max_entry_diff(&comm(y, z), &(x * i)) < 1e-12, "[y,z] j={j}");
            assert!(max_entry_diff(&comm(z, x), &(y * i)) < 1e-12, "[z,x] j={j}");
            let casimir = matmul(x, x) + matmul(y, y) + matmul(z, z);
            let target = ops.identity() * c(j * (j + 1.0), 0.0);
            assert!(max_entry_diff(&casimir, &target) < 1e-12, "casimir j={j}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn superposition_is_normalised(beta in 0.0..=1.0f64, mu in 0.0..=PI, nu in -10.0..10.0f64) {
            let s = build_superposition_state(&SqueezeParams::new(beta, mu, nu).unwrap());
            prop_assert!((s.norm() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn casimir_expectation_is_two(beta in 0.0..=1.0f64, mu in 0.0..=PI, nu in -10.0..10.0f64) {
            let ops = build_spin_operators(1.0).unwrap();
            let s = build_superposition_state(&SqueezeParams::new(beta, mu, nu).unwrap());
            let cas = ops.jx() * ops.jx() + ops.jy() * ops.jy() + ops.jz() * ops.jz();
            let v = expectation(&cas, &s).unwrap();
            prop_assert!((v - c(2.0, 0.0)).norm() < 1e-12);
        }

        #[test]
        fn hermitian_expectations_are_real(beta in 0.0..=1.0f64, mu in 0.0..=PI, nu in -10.0..10.0f64) {
            let ops = build_spin_operators(1.0).unwrap();
            let s = build_superposition_state(&SqueezeParams::new(beta, mu, nu).unwrap());
            for m in ops.cartesian() {
                prop_assert!(expectation(m, &s).unwrap().im.abs() < 1e-12);
            }
        }
    }
}
