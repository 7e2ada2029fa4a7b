//! Full configuration interaction in a spin-orbital determinant basis.
//!
//! Modes are interleaved by spatial orbital: mode `2i` is orbital `i` with
//! spin up and mode `2i + 1` the same orbital with spin down. A determinant is
//! a `u64` occupation bitmask whose creation operators are understood to act
//! in ascending mode order on the vacuum.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::integrals::{EriTensor, IntegralSet};
use crate::linalg::SymmetricEigen;
use crate::scf::{orthonormality_error, ScfError};

#[derive(Debug, Error)]
pub enum CiError {
    #[error("a determinant space needs at least one orbital")]
    NoOrbitals,
    #[error("{0} spin-orbital modes exceed the 64-bit determinant encoding")]
    TooManyModes(usize),
    #[error("cannot place {electrons} electrons in {modes} modes")]
    TooManyElectrons { electrons: usize, modes: usize },
    #[error("dimension mismatch: integrals have {integrals} modes, determinants {space}")]
    DimensionMismatch { integrals: usize, space: usize },
    #[error("CI vector norm {0} differs from 1")]
    NotNormalized(f64),
    #[error("E_exact={exact} lies above the reference energy {reference}")]
    NotVariational { exact: f64, reference: f64 },
    #[error(transparent)]
    Orbitals(#[from] ScfError),
}

/// One- and two-electron integrals over spin orbitals, chemists' notation.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinOrbitalIntegrals {
    n: usize,
    h: DMatrix<f64>,
    eri: Vec<f64>,
    nuclear_repulsion: f64,
}

impl SpinOrbitalIntegrals {
    /// Expands integrals over orthonormal spatial orbitals into both spins.
    pub fn from_restricted(mo: &IntegralSet) -> Self {
        let m = mo.n_orbitals();
        Self::from_blocks(
            [&mo.core_hamiltonian, &mo.core_hamiltonian],
            |_, _| &mo.eri,
            m,
            mo.nuclear_repulsion,
        )
    }

    /// Builds spin-orbital integrals from AO integrals and separate α/β
    /// coefficient matrices, so the determinant basis is the UHF one.
    pub fn from_unrestricted(
        ao: &IntegralSet,
        alpha: &DMatrix<f64>,
        beta: &DMatrix<f64>,
    ) -> Result<Self, CiError> {
        for c in [alpha, beta] {
            let deviation = orthonormality_error(&ao.overlap, c);
            if deviation > 1e-8 {
                return Err(ScfError::NotOrthonormal { deviation }.into());
            }
        }
        let c = [alpha, beta];
        let h = [
            alpha.transpose() * &ao.core_hamiltonian * alpha,
            beta.transpose() * &ao.core_hamiltonian * beta,
        ];
        let mut blocks = Vec::with_capacity(4);
        for s in 0..2 {
            for t in 0..2 {
                blocks.push(ao.eri.transform(c[s], c[t]));
            }
        }
        Ok(Self::from_blocks(
            [&h[0], &h[1]],
            |s, t| &blocks[2 * s + t],
            alpha.ncols(),
            ao.nuclear_repulsion,
        ))
    }

    fn from_blocks<'a>(
        h: [&DMatrix<f64>; 2],
        eri: impl Fn(usize, usize) -> &'a EriTensor,
        m: usize,
        nuclear_repulsion: f64,
    ) -> Self {
        let n = 2 * m;
        let mut hs = DMatrix::zeros(n, n);
        for s in 0..2 {
            for i in 0..m {
                for j in 0..m {
                    hs[(2 * i + s, 2 * j + s)] = h[s][(i, j)];
                }
            }
        }
        let mut g = vec![0.0; n * n * n * n];
        for s in 0..2 {
            for t in 0..2 {
                let block = eri(s, t);
                for i in 0..m {
                    for j in 0..m {
                        for k in 0..m {
                            for l in 0..m {
                                let (p, q, r, u) = (2 * i + s, 2 * j + s, 2 * k + t, 2 * l + t);
                                g[((p * n + q) * n + r) * n + u] = block.get(i, j, k, l);
                            }
                        }
                    }
                }
            }
        }
        SpinOrbitalIntegrals {
            n,
            h: hs,
            eri: g,
            nuclear_repulsion,
        }
    }

    pub fn n_modes(&self) -> usize {
        self.n
    }

    pub fn one_body(&self, p: usize, q: usize) -> f64 {
        self.h[(p, q)]
    }

    /// `(pq|rs)` over spin orbitals; zero unless spins match within each pair.
    pub fn two_body(&self, p: usize, q: usize, r: usize, s: usize) -> f64 {
        let n = self.n;
        self.eri[((p * n + q) * n + r) * n + s]
    }

    pub fn nuclear_repulsion(&self) -> f64 {
        self.nuclear_repulsion
    }
}

/// Ordered list of determinants over `n_modes` spin orbitals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeterminantSpace {
    n_modes: usize,
    dets: Vec<u64>,
}

impl DeterminantSpace {
    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn len(&self) -> usize {
        self.dets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dets.is_empty()
    }

    pub fn determinants(&self) -> &[u64] {
        &self.dets
    }

    pub fn index_of(&self, det: u64) -> Option<usize> {
        self.dets.iter().position(|&d| d == det)
    }
}

/// All two-electron determinants over `m` spatial orbitals, ordered
/// lexicographically by (lower mode, higher mode). Index 0 is `|1100…⟩`.
pub fn enumerate_determinants(m: usize) -> Result<DeterminantSpace, CiError> {
    enumerate_determinants_n(m, 2)
}

/// Determinants with `nelec` electrons, ordered lexicographically by their
/// ascending mode lists.
pub fn enumerate_determinants_n(m: usize, nelec: usize) -> Result<DeterminantSpace, CiError> {
    if m == 0 {
        return Err(CiError::NoOrbitals);
    }
    let n_modes = 2 * m;
    if n_modes > 64 {
        return Err(CiError::TooManyModes(n_modes));
    }
    if nelec > n_modes {
        return Err(CiError::TooManyElectrons {
            electrons: nelec,
            modes: n_modes,
        });
    }
    fn rec(start: usize, left: usize, n: usize, acc: u64, out: &mut Vec<u64>) {
        if left == 0 {
            out.push(acc);
            return;
        }
        for p in start..=(n - left) {
            rec(p + 1, left - 1, n, acc | (1 << p), out);
        }
    }
    let mut dets = Vec::new();
    rec(0, nelec, n_modes, 0, &mut dets);
    Ok(DeterminantSpace { n_modes, dets })
}

/// Modes occupied in `det`, ascending.
pub fn occupied_modes(det: u64) -> impl Iterator<Item = usize> {
    (0..64).filter(move |&p| det >> p & 1 == 1)
}

/// Applies `a_p` (`create = false`) or `a†_p` to `det`, returning the sign
/// and the new determinant, or `None` if the result vanishes.
pub fn apply_operator(det: u64, p: usize, create: bool) -> Option<(f64, u64)> {
    let bit = 1u64 << p;
    if (det & bit != 0) == create {
        return None;
    }
    let below = (det & (bit - 1)).count_ones();
    let sign = if below.is_multiple_of(2) { 1.0 } else { -1.0 };
    Some((sign, det ^ bit))
}

/// Sign of `ops` (applied right to left, i.e. the last entry first) acting on
/// `det`. Returns `None` when the product annihilates the determinant.
fn operator_string(det: u64, ops: &[(usize, bool)]) -> Option<(f64, u64)> {
    let mut sign = 1.0;
    let mut d = det;
    for &(p, create) in ops.iter().rev() {
        let (s, next) = apply_operator(d, p, create)?;
        sign *= s;
        d = next;
    }
    Some((sign, d))
}

/// `⟨bra|H|ket⟩` by the Slater-Condon rules.
pub fn matrix_element(ints: &SpinOrbitalIntegrals, bra: u64, ket: u64) -> f64 {
    let diff = bra ^ ket;
    match diff.count_ones() {
        0 => {
            let occ: Vec<usize> = occupied_modes(ket).collect();
            let mut e = ints.nuclear_repulsion();
            for (n, &i) in occ.iter().enumerate() {
                e += ints.one_body(i, i);
                for &j in &occ[..n] {
                    e += ints.two_body(i, i, j, j) - ints.two_body(i, j, j, i);
                }
            }
            e
        }
        2 => {
            let i = (ket & diff).trailing_zeros() as usize;
            let a = (bra & diff).trailing_zeros() as usize;
            let (sign, _) =
                operator_string(ket, &[(a, true), (i, false)]).expect("single excitation");
            let mut v = ints.one_body(a, i);
            for j in occupied_modes(ket & bra) {
                v += ints.two_body(a, i, j, j) - ints.two_body(a, j, j, i);
            }
            sign * v
        }
        4 => {
            let mut from = occupied_modes(ket & diff);
            let mut to = occupied_modes(bra & diff);
            let (i, j) = (from.next().unwrap(), from.next().unwrap());
            let (a, b) = (to.next().unwrap(), to.next().unwrap());
            let (sign, _) = operator_string(ket, &[(a, true), (b, true), (j, false), (i, false)])
                .expect("double excitation");
            sign * (ints.two_body(a, i, b, j) - ints.two_body(a, j, b, i))
        }
        _ => 0.0,
    }
}

/// Dense CI Hamiltonian over `space`.
pub fn build_hamiltonian(
    ints: &SpinOrbitalIntegrals,
    space: &DeterminantSpace,
) -> Result<DMatrix<f64>, CiError> {
    if ints.n_modes() != space.n_modes() {
        return Err(CiError::DimensionMismatch {
            integrals: ints.n_modes(),
            space: space.n_modes(),
        });
    }
    let dets = space.determinants();
    let n = dets.len();
    let mut h = DMatrix::zeros(n, n);
    for a in 0..n {
        for b in 0..=a {
            let v = matrix_element(ints, dets[a], dets[b]);
            h[(a, b)] = v;
            h[(b, a)] = v;
        }
    }
    Ok(h)
}

/// Lowest eigenpair of a symmetric matrix with a fixed phase: the first
/// component is made nonnegative, or, if it vanishes, the largest one positive.
pub fn lowest_eigenpair(h: &DMatrix<f64>) -> (f64, DVector<f64>) {
    let (e, mut v) = SymmetricEigen::new(h).lowest();
    fix_phase(&mut v);
    (e, v)
}

fn fix_phase(v: &mut DVector<f64>) {
    let pivot = if v[0].abs() > 1e-12 { 0 } else { v.iamax() };
    if v[pivot] < 0.0 {
        v.neg_mut();
    }
}

/// Normalized, phase-fixed CI ground state.
#[derive(Debug, Clone, PartialEq)]
pub struct CiVector {
    space: DeterminantSpace,
    amplitudes: DVector<f64>,
    energy: f64,
}

impl CiVector {
    /// Wraps amplitudes after checking the norm and applying the phase convention.
    pub fn new(
        space: DeterminantSpace,
        mut amplitudes: DVector<f64>,
        energy: f64,
    ) -> Result<Self, CiError> {
        if amplitudes.len() != space.len() {
            return Err(CiError::DimensionMismatch {
                integrals: amplitudes.len(),
                space: space.len(),
            });
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(CiError::NotNormalized(norm));
        }
        fix_phase(&mut amplitudes);
        Ok(CiVector {
            space,
            amplitudes,
            energy,
        })
    }

    pub fn space(&self) -> &DeterminantSpace {
        &self.space
    }

    pub fn amplitudes(&self) -> &DVector<f64> {
        &self.amplitudes
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    /// Index of the reference determinant `|1100…⟩`.
    pub fn reference_index(&self) -> usize {
        0
    }

    pub fn amplitude(&self, det: u64) -> f64 {
        self.space.index_of(det).map_or(0.0, |k| self.amplitudes[k])
    }

    /// `(determinant, amplitude)` pairs.
    pub fn terms(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        self.space
            .dets
            .iter()
            .copied()
            .zip(self.amplitudes.iter().copied())
    }
}

/// Full CI ground state together with the reference-determinant energy.
#[derive(Debug, Clone)]
pub struct CiSolution {
    pub vector: CiVector,
    pub reference_energy: f64,
    pub residual: f64,
}

pub fn solve_ground_state(ints: &SpinOrbitalIntegrals) -> Result<CiSolution, CiError> {
    let space = enumerate_determinants(ints.n_modes() / 2)?;
    let h = build_hamiltonian(ints, &space)?;
    let (energy, v) = lowest_eigenpair(&h);
    let residual = (&h * &v - &v * energy).norm();
    let reference_energy = h[(0, 0)];
    let vector = CiVector::new(space, v, energy)?;
    Ok(CiSolution {
        vector,
        reference_energy,
        residual,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationReport {
    pub exact: f64,
    pub reference: f64,
    /// `|exact - reference|`.
    pub correlation: f64,
}

pub fn correlation_energy(exact: f64, reference: f64) -> CorrelationReport {
    CorrelationReport {
        exact,
        reference,
        correlation: (exact - reference).abs(),
    }
}

/// As [`correlation_energy`], but rejects an exact energy above the reference.
pub fn checked_correlation_energy(
    exact: f64,
    reference: f64,
) -> Result<CorrelationReport, CiError> {
    if exact > reference + 1e-10 {
        return Err(CiError::NotVariational { exact, reference });
    }
    Ok(correlation_energy(exact, reference))
}
