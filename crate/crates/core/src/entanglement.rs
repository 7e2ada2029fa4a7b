//! Two-electron coefficient matrices, fermionic partial traces and
//! von Neumann entropies.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::ci::CiVector;
use crate::linalg::{asymmetry, SymmetricEigen};

#[derive(Debug, Error, PartialEq)]
pub enum EntanglementError {
    #[error("state norm {0} differs from 1")]
    NotNormalized(f64),
    #[error("determinant {0:#b} does not hold exactly two electrons")]
    NotTwoElectron(u64),
    #[error("no modes kept")]
    EmptyKeepSet,
    #[error("mode {mode} out of range for {n_modes} modes")]
    ModeOutOfRange { mode: usize, n_modes: usize },
    #[error("mode {0} listed twice")]
    DuplicateMode(usize),
    #[error("density matrix trace {0} differs from 1")]
    BadTrace(f64),
    #[error("density matrix has eigenvalue {0:e}")]
    NegativeEigenvalue(f64),
    #[error("density matrix is not symmetric (deviation {0:e})")]
    NotSymmetric(f64),
}

/// Antisymmetric `ω` with `|Φ⟩ = Σ_ab ω_ab c†_a c†_b |0⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct OmegaMatrix {
    omega: DMatrix<f64>,
}

impl OmegaMatrix {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.omega
    }

    pub fn n_modes(&self) -> usize {
        self.omega.nrows()
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.omega[(a, b)]
    }

    /// Amplitude of the determinant `c†_a c†_b|0⟩` (`a < b`) in the encoded
    /// state: `ω_ab - ω_ba = 2ω_ab`.
    pub fn amplitude(&self, a: usize, b: usize) -> f64 {
        self.omega[(a, b)] - self.omega[(b, a)]
    }

    /// Expands back into `(determinant, amplitude)` pairs, `a < b` ordered.
    pub fn to_determinants(&self) -> Vec<(u64, f64)> {
        let n = self.n_modes();
        let mut out = Vec::with_capacity(n * (n - 1) / 2);
        for a in 0..n {
            for b in (a + 1)..n {
                out.push(((1u64 << a) | (1u64 << b), self.amplitude(a, b)));
            }
        }
        out
    }
}

/// `ω_ab = c_ab / 2` for `a < b` and `ω_ba = -ω_ab`.
pub fn omega_from_ci(ci: &CiVector) -> Result<OmegaMatrix, EntanglementError> {
    omega_from_terms(ci.space().n_modes(), ci.terms())
}

pub fn omega_from_terms(
    n_modes: usize,
    terms: impl IntoIterator<Item = (u64, f64)>,
) -> Result<OmegaMatrix, EntanglementError> {
    let mut omega = DMatrix::zeros(n_modes, n_modes);
    let mut norm2 = 0.0;
    for (det, c) in terms {
        if det.count_ones() != 2 {
            return Err(EntanglementError::NotTwoElectron(det));
        }
        let a = det.trailing_zeros() as usize;
        let b = 63 - det.leading_zeros() as usize;
        if b >= n_modes {
            return Err(EntanglementError::ModeOutOfRange { mode: b, n_modes });
        }
        omega[(a, b)] = c / 2.0;
        omega[(b, a)] = -c / 2.0;
        norm2 += c * c;
    }
    if (norm2.sqrt() - 1.0).abs() > 1e-10 {
        return Err(EntanglementError::NotNormalized(norm2.sqrt()));
    }
    Ok(OmegaMatrix { omega })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DensityLabel {
    /// 4×4 block of one spatial orbital, basis (empty, ↑, ↓, ↑↓).
    SpatialOrbital(usize),
    /// 2×2 block of one spin-orbital mode, basis (empty, occupied).
    SpinMode(usize),
    /// Arbitrary kept-mode set.
    Modes,
    /// One spin of the two-spin model, basis (↑, ↓).
    SpinHalf,
}

/// Reduced density matrix of a set of kept modes.
///
/// Basis state `k` has kept mode `kept[t]` occupied iff bit `t` of `k` is
/// set; its creation operators act in ascending mode order whatever the
/// order of `kept`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedDensityMatrix {
    pub label: DensityLabel,
    pub kept: Vec<usize>,
    pub matrix: DMatrix<f64>,
}

impl ReducedDensityMatrix {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace()
    }

    pub fn entropy(&self) -> Result<f64, EntanglementError> {
        von_neumann_entropy(&self.matrix)
    }
}

fn validate_keep(keep: &[usize], n_modes: usize) -> Result<(), EntanglementError> {
    if keep.is_empty() {
        return Err(EntanglementError::EmptyKeepSet);
    }
    for (k, &mode) in keep.iter().enumerate() {
        if mode >= n_modes {
            return Err(EntanglementError::ModeOutOfRange { mode, n_modes });
        }
        if keep[..k].contains(&mode) {
            return Err(EntanglementError::DuplicateMode(mode));
        }
    }
    Ok(())
}

/// Exact partial trace of a determinant expansion over every mode not in
/// `keep`. Kept creation operators are anticommuted to the front before the
/// discarded ones are traced out.
pub fn partial_trace_terms(
    n_modes: usize,
    terms: impl IntoIterator<Item = (u64, f64)>,
    keep: &[usize],
) -> Result<ReducedDensityMatrix, EntanglementError> {
    validate_keep(keep, n_modes)?;
    let dim = 1usize << keep.len();
    let kept_mask = keep.iter().fold(0u64, |m, &p| m | (1 << p));
    let mut blocks: BTreeMap<u64, DVector<f64>> = BTreeMap::new();
    for (det, c) in terms {
        let rest = det & !kept_mask;
        let mut index = 0usize;
        let mut swaps = 0u32;
        for (t, &p) in keep.iter().enumerate() {
            if det >> p & 1 == 1 {
                index |= 1 << t;
                swaps += (rest & ((1u64 << p) - 1)).count_ones();
            }
        }
        let sign = if swaps.is_multiple_of(2) { 1.0 } else { -1.0 };
        blocks.entry(rest).or_insert_with(|| DVector::zeros(dim))[index] += sign * c;
    }
    let mut rho = DMatrix::zeros(dim, dim);
    for psi in blocks.values() {
        rho += psi * psi.transpose();
    }
    Ok(ReducedDensityMatrix {
        label: DensityLabel::Modes,
        kept: keep.to_vec(),
        matrix: rho,
    })
}

pub fn partial_trace_modes(
    ci: &CiVector,
    keep: &[usize],
) -> Result<ReducedDensityMatrix, EntanglementError> {
    partial_trace_terms(ci.space().n_modes(), ci.terms(), keep)
}

/// 4×4 density of spatial orbital `orbital` (0-based), basis (empty, ↑, ↓, ↑↓).
pub fn reduced_density_spatial_orbital(
    ci: &CiVector,
    orbital: usize,
) -> Result<ReducedDensityMatrix, EntanglementError> {
    let mut rdm = partial_trace_modes(ci, &[2 * orbital, 2 * orbital + 1])?;
    rdm.label = DensityLabel::SpatialOrbital(orbital);
    Ok(rdm)
}

/// 4×4 density of the first spatial orbital.
pub fn reduced_density_spatial(ci: &CiVector) -> Result<ReducedDensityMatrix, EntanglementError> {
    reduced_density_spatial_orbital(ci, 0)
}

/// 2×2 density of one spin-orbital mode (0-based), basis (empty, occupied).
pub fn reduced_density_spin_mode(
    ci: &CiVector,
    mode: usize,
) -> Result<ReducedDensityMatrix, EntanglementError> {
    let mut rdm = partial_trace_modes(ci, &[mode])?;
    rdm.label = DensityLabel::SpinMode(mode);
    Ok(rdm)
}

/// Diagonal of the first spatial orbital's density evaluated directly from
/// `ω`, in (empty, ↑, ↓, ↑↓) order. Exact for states whose pairs all have
/// opposite spin.
pub fn spatial_diagonal_from_omega(omega: &OmegaMatrix) -> [f64; 4] {
    let m = omega.n_modes() / 2;
    let w2 = |a: usize, b: usize| omega.get(a, b).powi(2);
    let mut empty = 0.0;
    let mut up = 0.0;
    let mut down = 0.0;
    for i in 1..m {
        up += w2(0, 2 * i + 1);
        down += w2(1, 2 * i);
        for j in 1..m {
            empty += w2(2 * i, 2 * j + 1);
        }
    }
    [4.0 * empty, 4.0 * up, 4.0 * down, 4.0 * w2(0, 1)]
}

/// Diagonal of the first spin mode's density built only from the reference,
/// its single excitations and the paired double excitations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncatedSpinModeDensity {
    pub empty: f64,
    pub occupied: f64,
    /// Weight of determinants the truncated form leaves out.
    pub omitted: f64,
}

pub fn spin_mode_diagonal_truncated(ci: &CiVector) -> TruncatedSpinModeDensity {
    let m = ci.space().n_modes() / 2;
    let w = |a: usize, b: usize| ci.amplitude((1u64 << a) | (1u64 << b)).powi(2);
    let mut empty = 0.0;
    let mut occupied = w(0, 1);
    for i in 1..m {
        empty += w(1, 2 * i) + w(2 * i, 2 * i + 1);
        occupied += w(0, 2 * i + 1);
    }
    let total: f64 = ci.amplitudes().iter().map(|c| c * c).sum();
    TruncatedSpinModeDensity {
        empty,
        occupied,
        omitted: total - empty - occupied,
    }
}

/// Binary entropy `-p log2 p - (1-p) log2 (1-p)`.
pub fn binary_entropy(p: f64) -> f64 {
    entropy_of_spectrum(&[p, 1.0 - p])
}

/// `-Σ p log2 p` with `0 log 0 = 0`.
pub fn entropy_of_spectrum(p: &[f64]) -> f64 {
    p.iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| -x * x.log2())
        .sum::<f64>()
        .max(0.0)
}

/// Von Neumann entropy in bits. Eigenvalues below `1e-14` count as zero.
pub fn von_neumann_entropy(rho: &DMatrix<f64>) -> Result<f64, EntanglementError> {
    let skew = asymmetry(rho);
    if skew > 1e-10 {
        return Err(EntanglementError::NotSymmetric(skew));
    }
    let trace = rho.trace();
    if (trace - 1.0).abs() > 1e-8 {
        return Err(EntanglementError::BadTrace(trace));
    }
    let values = SymmetricEigen::new(rho).values;
    if values[0] < -1e-10 {
        return Err(EntanglementError::NegativeEigenvalue(values[0]));
    }
    let clamped: Vec<f64> = values
        .iter()
        .map(|&x| if x < 1e-14 { 0.0 } else { x })
        .collect();
    Ok(entropy_of_spectrum(&clamped))
}
