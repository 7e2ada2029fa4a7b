//! Two spins with anisotropic XY exchange in a uniform transverse field.
//!
//! States are ordered `|↑↑⟩, |↑↓⟩, |↓↑⟩, |↓↓⟩` with the first spin as the
//! most significant index and `σᶻ|↑⟩ = |↑⟩`.

use nalgebra::{DMatrix, DVector, Matrix4, Vector4};
use thiserror::Error;

use crate::entanglement::{entropy_of_spectrum, von_neumann_entropy, EntanglementError};
use crate::linalg::SymmetricEigen;

/// Below this separation (bohr) the asymptotic coupling is flagged as
/// unreliable.
pub const EXCHANGE_VALIDITY_MIN_R: f64 = 1.0;

#[derive(Debug, Error, PartialEq)]
pub enum SpinModelError {
    #[error("field strength B must be nonzero")]
    ZeroField,
    #[error("separation must be positive, got {0}")]
    NonPositiveDistance(f64),
    #[error("parameter is not finite: {0}")]
    NonFinite(f64),
    #[error("empty grid")]
    EmptyGrid,
    #[error(transparent)]
    Entropy(#[from] EntanglementError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinPairParams {
    pub j: f64,
    pub b: f64,
    pub gamma: f64,
}

impl SpinPairParams {
    pub fn new(j: f64, b: f64, gamma: f64) -> Self {
        SpinPairParams { j, b, gamma }
    }

    /// Ising limit, `γ = 1`.
    pub fn ising(j: f64, b: f64) -> Self {
        SpinPairParams { j, b, gamma: 1.0 }
    }

    /// `λ = J / B`.
    pub fn lambda(&self) -> Result<f64, SpinModelError> {
        if self.b == 0.0 {
            return Err(SpinModelError::ZeroField);
        }
        Ok(self.j / self.b)
    }

    /// `α = √(4B² + J²γ²)`.
    pub fn alpha(&self) -> f64 {
        (4.0 * self.b * self.b + (self.j * self.gamma).powi(2)).sqrt()
    }
}

pub fn spin_hamiltonian(p: &SpinPairParams) -> Matrix4<f64> {
    let mut h = Matrix4::zeros();
    h[(0, 0)] = -2.0 * p.b;
    h[(3, 3)] = 2.0 * p.b;
    h[(0, 3)] = -p.j * p.gamma;
    h[(3, 0)] = -p.j * p.gamma;
    h[(1, 2)] = -p.j;
    h[(2, 1)] = -p.j;
    h
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpinPairSpectrum {
    /// `[-J, J, -α, α]`.
    pub values: [f64; 4],
    /// Eigenvectors matching `values`.
    pub vectors: [Vector4<f64>; 4],
}

impl SpinPairSpectrum {
    /// Index of the lowest level; ties resolve to the field-aligned state.
    pub fn ground_index(&self) -> usize {
        if self.values[0] < self.values[2] {
            0
        } else {
            2
        }
    }
}

pub fn analytic_spectrum(p: &SpinPairParams) -> SpinPairSpectrum {
    let alpha = p.alpha();
    let r = 0.5f64.sqrt();
    let phi1 = Vector4::new(0.0, r, r, 0.0);
    let phi2 = Vector4::new(0.0, -r, r, 0.0);
    let (phi3, phi4) = if alpha == 0.0 {
        (
            Vector4::new(1.0, 0.0, 0.0, 0.0),
            Vector4::new(0.0, 0.0, 0.0, 1.0),
        )
    } else {
        let jg = p.j * p.gamma;
        let sign = if jg < 0.0 { -1.0 } else { 1.0 };
        let big = ((alpha + 2.0 * p.b) / (2.0 * alpha)).max(0.0).sqrt();
        let small = ((alpha - 2.0 * p.b) / (2.0 * alpha)).max(0.0).sqrt();
        (
            Vector4::new(big, 0.0, 0.0, sign * small),
            Vector4::new(-sign * small, 0.0, 0.0, big),
        )
    };
    SpinPairSpectrum {
        values: [-p.j, p.j, -alpha, alpha],
        vectors: [phi1, phi2, phi3, phi4],
    }
}

/// Reduced density of the first spin for a two-spin pure state, basis (↑, ↓).
pub fn reduced_density_first_spin(psi: &Vector4<f64>) -> DMatrix<f64> {
    let m = DMatrix::from_row_slice(2, 2, &[psi[0], psi[1], psi[2], psi[3]]);
    &m * m.transpose()
}

/// Ground-state entanglement in the Ising limit as a function of `λ = J/B`:
/// the binary entropy of `1/2 ± 1/√(4 + λ²)`.
pub fn ground_state_entropy_closed_form(lambda: f64) -> f64 {
    let l2 = lambda * lambda;
    let s = (4.0 + l2).sqrt();
    // 1/2 - 1/s without cancellation
    let p_minus = l2 / (2.0 * s * (s + 2.0));
    entropy_of_spectrum(&[0.5 + 1.0 / s, p_minus])
}

/// Logarithmic form of [`ground_state_entropy_closed_form`]:
/// `-½ log2(¼ - 1/(4+λ²)) + log2((s-2)/(s+2)) / s` with `s = √(4+λ²)`.
/// Both differences are rewritten as `λ²/(4s²)` and `λ²/(s+2)²` to avoid
/// cancellation at small `λ`; undefined at `λ = 0`.
pub fn ground_state_entropy_log_form(lambda: f64) -> f64 {
    let l2 = lambda * lambda;
    let s = (4.0 + l2).sqrt();
    -0.5 * (l2 / (4.0 * s * s)).log2() + (l2 / ((s + 2.0) * (s + 2.0))).log2() / s
}

/// Ground-state entanglement for arbitrary `γ`, from the numerically
/// diagonalized Hamiltonian.
pub fn ground_state_entropy(p: &SpinPairParams) -> Result<f64, SpinModelError> {
    let h = spin_hamiltonian(p);
    let eig = SymmetricEigen::new(&DMatrix::from_iterator(4, 4, h.iter().copied()));
    let v: DVector<f64> = eig.vectors.column(0).into_owned();
    let psi = Vector4::new(v[0], v[1], v[2], v[3]);
    Ok(von_neumann_entropy(&reduced_density_first_spin(&psi))?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExchangeCoupling {
    pub j: f64,
    /// False when `R` is below [`EXCHANGE_VALIDITY_MIN_R`].
    pub within_validity: bool,
}

/// Large-separation exchange splitting `J(R) = -0.821 R^{5/2} e^{-2R}` (a.u.).
pub fn exchange_coupling(r: f64) -> Result<ExchangeCoupling, SpinModelError> {
    if !r.is_finite() {
        return Err(SpinModelError::NonFinite(r));
    }
    if r <= 0.0 {
        return Err(SpinModelError::NonPositiveDistance(r));
    }
    Ok(ExchangeCoupling {
        j: -0.821 * r.powf(2.5) * (-2.0 * r).exp(),
        within_validity: r >= EXCHANGE_VALIDITY_MIN_R,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SweepRow {
    pub r_bohr: f64,
    pub b: f64,
    pub j: f64,
    pub s: f64,
    pub within_validity: bool,
}

/// Entanglement over every `(R, B)` pair, grouped by `B` in the given order.
pub fn sweep_entanglement(
    r_grid: &[f64],
    b_values: &[f64],
    gamma: f64,
) -> Result<Vec<SweepRow>, SpinModelError> {
    if r_grid.is_empty() || b_values.is_empty() {
        return Err(SpinModelError::EmptyGrid);
    }
    if let Some(&b) = b_values.iter().find(|b| !b.is_finite()) {
        return Err(SpinModelError::NonFinite(b));
    }
    if b_values.contains(&0.0) {
        return Err(SpinModelError::ZeroField);
    }
    let mut rows = Vec::with_capacity(r_grid.len() * b_values.len());
    for &b in b_values {
        for &r in r_grid {
            let c = exchange_coupling(r)?;
            let p = SpinPairParams::new(c.j, b, gamma);
            let s = if gamma == 1.0 {
                ground_state_entropy_closed_form(p.lambda()?)
            } else {
                ground_state_entropy(&p)?
            };
            rows.push(SweepRow {
                r_bohr: r,
                b,
                j: c.j,
                s,
                within_validity: c.within_validity,
            });
        }
    }
    Ok(rows)
}
