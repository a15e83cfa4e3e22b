//! Two-spin algebra: Pauli observables, the singlet, CHSH correlators and
//! finite local hidden variable models.
//!
//! Basis convention: `|ij> = |i> ⊗ |j>` sits at index `2i + j`, where `|0>`
//! and `|1>` are the `+1` and `-1` eigenvectors of `σ_z`.

mod lhv;

pub use lhv::{lhv_chsh_value, lhv_extremal_scan, lhv_random_scan, LhvModel, LhvScanSummary, LocalAssignment, Outcome};

use nalgebra::{Matrix2, Matrix4, Vector4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Inputs whose norm is within this distance of 1 are renormalized.
pub const NORMALIZATION_SLACK: f64 = 1e-6;
const HERMITIAN_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-12;
const EIGENVALUE_FLOOR: f64 = -1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpinError {
    #[error("direction ({0}, {1}, {2}) has norm {3}, not within {NORMALIZATION_SLACK} of 1")]
    NotUnit(f64, f64, f64, f64),
    #[error("direction has a non-finite or zero component vector")]
    Degenerate,
    #[error("state matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),
    #[error("state trace is {0}, expected 1")]
    BadTrace(f64),
    #[error("state has negative eigenvalue {0:e}")]
    NotPositive(f64),
    #[error("hidden variable weights must be non-negative and sum to 1 (sum = {0})")]
    BadWeights(f64),
    #[error("hidden variable model needs one assignment per weight ({weights} weights, {assignments} assignments)")]
    LengthMismatch { weights: usize, assignments: usize },
    #[error("assignment value {0} is not ±1")]
    BadOutcome(i64),
    #[error("hidden variable model has empty support")]
    EmptySupport,
}

/// A unit vector in R³ selecting a spin analyser orientation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpinDirection([f64; 3]);

impl SpinDirection {
    /// Accepts vectors whose norm is within [`NORMALIZATION_SLACK`] of 1
    /// and renormalizes them.
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self, SpinError> {
        Self::with_slack(x, y, z, NORMALIZATION_SLACK)
    }

    /// Like [`SpinDirection::new`] with a caller-chosen norm slack.
    pub fn with_slack(x: f64, y: f64, z: f64, slack: f64) -> Result<Self, SpinError> {
        let norm = (x * x + y * y + z * z).sqrt();
        if !norm.is_finite() {
            return Err(SpinError::Degenerate);
        }
        if (norm - 1.0).abs() > slack {
            return Err(SpinError::NotUnit(x, y, z, norm));
        }
        Ok(Self([x / norm, y / norm, z / norm]))
    }

    /// Normalizes any finite nonzero vector.
    pub fn normalized(x: f64, y: f64, z: f64) -> Result<Self, SpinError> {
        let norm = (x * x + y * y + z * z).sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return Err(SpinError::Degenerate);
        }
        Ok(Self([x / norm, y / norm, z / norm]))
    }

    pub fn x() -> Self {
        Self([1.0, 0.0, 0.0])
    }

    pub fn y() -> Self {
        Self([0.0, 1.0, 0.0])
    }

    pub fn z() -> Self {
        Self([0.0, 0.0, 1.0])
    }

    pub fn components(&self) -> [f64; 3] {
        self.0
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.0.iter().zip(other.0.iter()).map(|(a, b)| a * b).sum()
    }

    pub fn negated(&self) -> Self {
        Self([-self.0[0], -self.0[1], -self.0[2]])
    }
}

/// Analyser directions for the two wings of a CHSH test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChshSetting {
    pub a1: SpinDirection,
    pub a2: SpinDirection,
    pub b1: SpinDirection,
    pub b2: SpinDirection,
}

impl ChshSetting {
    pub fn new(a1: SpinDirection, a2: SpinDirection, b1: SpinDirection, b2: SpinDirection) -> Self {
        Self { a1, a2, b1, b2 }
    }

    /// `a1 = z`, `a2 = x`, `b1 = -(x + z)/√2`, `b2 = (x - z)/√2`; the singlet
    /// reaches `2√2` on these.
    pub fn maximal_violation() -> Self {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            a1: SpinDirection::z(),
            a2: SpinDirection::x(),
            b1: SpinDirection([-r, 0.0, -r]),
            b2: SpinDirection([r, 0.0, -r]),
        }
    }

    pub fn alice(&self, i: usize) -> SpinDirection {
        if i == 0 {
            self.a1
        } else {
            self.a2
        }
    }

    pub fn bob(&self, j: usize) -> SpinDirection {
        if j == 0 {
            self.b1
        } else {
            self.b2
        }
    }

    /// Sign with which `E(a_i, b_j)` enters the CHSH combination.
    pub fn sign(alice: usize, bob: usize) -> f64 {
        if alice == 1 && bob == 1 {
            -1.0
        } else {
            1.0
        }
    }
}

/// A validated two-qubit density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoQubitState(Matrix4<Complex64>);

impl TwoQubitState {
    /// Checks Hermiticity, unit trace and positivity (eigenvalue floor −1e-10).
    pub fn new(matrix: Matrix4<Complex64>) -> Result<Self, SpinError> {
        let dev = (matrix - matrix.adjoint())
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max);
        if dev > HERMITIAN_TOL {
            return Err(SpinError::NotHermitian(dev));
        }
        let trace = matrix.trace();
        if (trace.re - 1.0).abs() > TRACE_TOL || trace.im.abs() > TRACE_TOL {
            return Err(SpinError::BadTrace(trace.re));
        }
        let hermitian = (matrix + matrix.adjoint()).scale(0.5);
        let min_eig = hermitian.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min);
        if min_eig < EIGENVALUE_FLOOR {
            return Err(SpinError::NotPositive(min_eig));
        }
        Ok(Self(matrix))
    }

    /// `|ψ><ψ|` for a normalizable vector (normalized here).
    pub fn from_pure(psi: &Vector4<Complex64>) -> Result<Self, SpinError> {
        let norm = psi.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(SpinError::Degenerate);
        }
        let v = psi.unscale(norm);
        Self::new(v * v.adjoint())
    }

    pub fn matrix(&self) -> &Matrix4<Complex64> {
        &self.0
    }

    pub fn eigenvalues(&self) -> [f64; 4] {
        let mut e: Vec<f64> = self.0.symmetric_eigenvalues().iter().copied().collect();
        e.sort_by(f64::total_cmp);
        [e[0], e[1], e[2], e[3]]
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn pauli_x() -> Matrix2<Complex64> {
    Matrix2::new(c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0))
}

pub fn pauli_y() -> Matrix2<Complex64> {
    Matrix2::new(c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0))
}

pub fn pauli_z() -> Matrix2<Complex64> {
    Matrix2::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0))
}

/// `a·σ = a_x σ_x + a_y σ_y + a_z σ_z`.
pub fn pauli_observable(a: &SpinDirection) -> Matrix2<Complex64> {
    let [x, y, z] = a.components();
    pauli_x().scale(x) + pauli_y().scale(y) + pauli_z().scale(z)
}

/// The singlet projector built from its Pauli expansion
/// `(I⊗I − σx⊗σx − σy⊗σy − σz⊗σz)/4`.
pub fn singlet_state() -> TwoQubitState {
    let id = Matrix4::<Complex64>::identity();
    let xx = pauli_x().kronecker(&pauli_x());
    let yy = pauli_y().kronecker(&pauli_y());
    let zz = pauli_z().kronecker(&pauli_z());
    TwoQubitState((id - xx - yy - zz).scale(0.25))
}

/// `(|01> − |10>)/√2`.
pub fn singlet_vector() -> Vector4<Complex64> {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    Vector4::new(c(0.0, 0.0), c(r, 0.0), c(-r, 0.0), c(0.0, 0.0))
}

/// `Tr(ρ (a·σ)⊗(b·σ))`.
pub fn spin_correlator(state: &TwoQubitState, a: &SpinDirection, b: &SpinDirection) -> f64 {
    let obs = pauli_observable(a).kronecker(&pauli_observable(b));
    (state.matrix() * obs).trace().re
}

/// `E(a1,b1) + E(a1,b2) + E(a2,b1) − E(a2,b2)`: `a1` is paired with
/// `b1 + b2` and `a2` with `b1 − b2`.
pub fn chsh_value(state: &TwoQubitState, s: &ChshSetting) -> f64 {
    spin_correlator(state, &s.a1, &s.b1)
        + spin_correlator(state, &s.a1, &s.b2)
        + spin_correlator(state, &s.a2, &s.b1)
        - spin_correlator(state, &s.a2, &s.b2)
}
