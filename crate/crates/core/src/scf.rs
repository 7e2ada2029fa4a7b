//! Restricted and unrestricted Hartree-Fock.
//!
//! Both flavours share one iteration engine: per-spin densities, a Fock build,
//! DIIS extrapolation on the `FPS - SPF` commutator, and symmetric
//! orthogonalization. The restricted case simply keeps the two spin densities
//! identical.

use std::collections::VecDeque;

use log::debug;
use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::integrals::IntegralSet;
use crate::linalg::{inverse_sqrt, SymmetricEigen};

#[derive(Debug, Clone, PartialEq)]
pub struct ScfOptions {
    pub max_iterations: usize,
    /// Frobenius norm of `FPS - SPF`.
    pub commutator_tolerance: f64,
    pub energy_tolerance: f64,
    pub density_tolerance: f64,
    pub diis_size: usize,
    /// Density mixing used when DIIS extrapolation is ill-conditioned.
    pub damping: f64,
    /// Smallest admissible overlap eigenvalue.
    pub overlap_cutoff: f64,
}

impl Default for ScfOptions {
    fn default() -> Self {
        ScfOptions {
            max_iterations: 200,
            commutator_tolerance: 1e-9,
            energy_tolerance: 1e-12,
            density_tolerance: 1e-10,
            diis_size: 6,
            damping: 0.5,
            overlap_cutoff: 1e-10,
        }
    }
}

/// Default HOMO/LUMO mixing angle for the UHF guess.
pub const DEFAULT_GUESS_MIX: f64 = std::f64::consts::PI / 8.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReferenceKind {
    Restricted,
    Unrestricted,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScfResult {
    pub kind: ReferenceKind,
    /// Total energy including nuclear repulsion.
    pub energy: f64,
    /// `[alpha, beta]` MO coefficients (columns); identical for RHF.
    pub coefficients: [DMatrix<f64>; 2],
    /// `[alpha, beta]` orbital energies, ascending.
    pub orbital_energies: [DVector<f64>; 2],
    pub converged: bool,
    pub iterations: usize,
    pub density_change: f64,
    pub commutator_norm: f64,
}

impl ScfResult {
    pub fn alpha(&self) -> &DMatrix<f64> {
        &self.coefficients[0]
    }

    pub fn beta(&self) -> &DMatrix<f64> {
        &self.coefficients[1]
    }

    /// Total (α + β) density matrix.
    pub fn total_density(&self, n_alpha: usize, n_beta: usize) -> DMatrix<f64> {
        density(&self.coefficients[0], n_alpha) + density(&self.coefficients[1], n_beta)
    }
}

#[derive(Debug, Error)]
pub enum ScfError {
    #[error("overlap matrix is ill-conditioned (smallest eigenvalue {min_eigenvalue:e})")]
    IllConditioned { min_eigenvalue: f64 },
    #[error("{0} electrons: closed-shell treatment needs an even, nonzero count")]
    BadElectronCount(usize),
    #[error("{electrons} electrons do not fit in {orbitals} spatial orbitals")]
    TooFewOrbitals { electrons: usize, orbitals: usize },
    #[error("SCF did not converge in {iterations} iterations (commutator {:e})", last.commutator_norm)]
    NotConverged {
        iterations: usize,
        last: Box<ScfResult>,
    },
    #[error("orbitals are not S-orthonormal (max deviation {deviation:e})")]
    NotOrthonormal { deviation: f64 },
}

fn density(c: &DMatrix<f64>, n_occ: usize) -> DMatrix<f64> {
    let occ = c.columns(0, n_occ);
    occ * occ.transpose()
}

/// Coulomb and exchange matrices `J[P]`, `K[P]`.
fn coulomb_exchange(ints: &IntegralSet, p: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = ints.n_orbitals();
    let mut j = DMatrix::zeros(n, n);
    let mut k = DMatrix::zeros(n, n);
    for a in 0..n {
        for b in 0..n {
            let mut jab = 0.0;
            let mut kab = 0.0;
            for c in 0..n {
                for d in 0..n {
                    jab += p[(c, d)] * ints.eri.get(a, b, c, d);
                    kab += p[(c, d)] * ints.eri.get(a, c, b, d);
                }
            }
            j[(a, b)] = jab;
            k[(a, b)] = kab;
        }
    }
    (j, k)
}

fn fock_matrices(ints: &IntegralSet, p: &[DMatrix<f64>; 2], restricted: bool) -> [DMatrix<f64>; 2] {
    let total = &p[0] + &p[1];
    let (j, _) = coulomb_exchange(ints, &total);
    let (_, ka) = coulomb_exchange(ints, &p[0]);
    let fa = &ints.core_hamiltonian + &j - ka;
    if restricted {
        return [fa.clone(), fa];
    }
    let (_, kb) = coulomb_exchange(ints, &p[1]);
    let fb = &ints.core_hamiltonian + j - kb;
    [fa, fb]
}

fn electronic_energy(ints: &IntegralSet, p: &[DMatrix<f64>; 2], f: &[DMatrix<f64>; 2]) -> f64 {
    let h = &ints.core_hamiltonian;
    0.5 * (0..2)
        .map(|s| (p[s].component_mul(&(h + &f[s]))).sum())
        .sum::<f64>()
}

/// Diagonalizes `F C = S C ε` through the orthogonalizer `X = S^{-1/2}`.
fn solve_roothaan(f: &DMatrix<f64>, x: &DMatrix<f64>) -> (DMatrix<f64>, DVector<f64>) {
    let fp = x.transpose() * f * x;
    let eig = SymmetricEigen::new(&fp);
    (x * eig.vectors, eig.values)
}

struct Diis {
    capacity: usize,
    focks: VecDeque<[DMatrix<f64>; 2]>,
    errors: VecDeque<Vec<f64>>,
}

impl Diis {
    fn new(capacity: usize) -> Self {
        Diis {
            capacity,
            focks: VecDeque::new(),
            errors: VecDeque::new(),
        }
    }

    fn push(&mut self, f: [DMatrix<f64>; 2], err: Vec<f64>) {
        if self.focks.len() == self.capacity {
            self.focks.pop_front();
            self.errors.pop_front();
        }
        self.focks.push_back(f);
        self.errors.push_back(err);
    }

    fn clear(&mut self) {
        self.focks.clear();
        self.errors.clear();
    }

    /// `None` when the DIIS equations are too ill-conditioned to trust.
    fn extrapolate(&self) -> Option<[DMatrix<f64>; 2]> {
        let k = self.focks.len();
        if k < 2 {
            return self.focks.back().cloned();
        }
        let mut b = DMatrix::zeros(k + 1, k + 1);
        for i in 0..k {
            for j in 0..=i {
                let v: f64 = self.errors[i]
                    .iter()
                    .zip(&self.errors[j])
                    .map(|(x, y)| x * y)
                    .sum();
                b[(i, j)] = v;
                b[(j, i)] = v;
            }
        }
        let scale = (0..k).map(|i| b[(i, i)]).fold(0.0, f64::max);
        if !(scale > 0.0) {
            return self.focks.back().cloned();
        }
        for i in 0..k {
            for j in 0..k {
                b[(i, j)] /= scale;
            }
            b[(i, k)] = -1.0;
            b[(k, i)] = -1.0;
        }
        let mut rhs = DVector::zeros(k + 1);
        rhs[k] = -1.0;
        let coef = b.lu().solve(&rhs)?;
        if coef.iter().any(|c| !c.is_finite() || c.abs() > 1e8) {
            return None;
        }
        let n = self.focks[0][0].nrows();
        let mut out = [DMatrix::zeros(n, n), DMatrix::zeros(n, n)];
        for (i, f) in self.focks.iter().enumerate() {
            for s in 0..2 {
                out[s] += coef[i] * &f[s];
            }
        }
        Some(out)
    }
}

fn orthogonalizer(ints: &IntegralSet, opts: &ScfOptions) -> Result<DMatrix<f64>, ScfError> {
    inverse_sqrt(&ints.overlap, opts.overlap_cutoff)
        .map_err(|min_eigenvalue| ScfError::IllConditioned { min_eigenvalue })
}

fn occupations(nelec: usize, m: usize) -> Result<usize, ScfError> {
    if nelec == 0 || !nelec.is_multiple_of(2) {
        return Err(ScfError::BadElectronCount(nelec));
    }
    if nelec / 2 > m {
        return Err(ScfError::TooFewOrbitals {
            electrons: nelec,
            orbitals: m,
        });
    }
    Ok(nelec / 2)
}

struct Engine<'a> {
    ints: &'a IntegralSet,
    x: DMatrix<f64>,
    n_occ: [usize; 2],
    restricted: bool,
    opts: &'a ScfOptions,
}

impl Engine<'_> {
    fn run(&self, mut p: [DMatrix<f64>; 2]) -> Result<ScfResult, ScfError> {
        let ints = self.ints;
        let s = &ints.overlap;
        let kind = if self.restricted {
            ReferenceKind::Restricted
        } else {
            ReferenceKind::Unrestricted
        };
        let mut diis = Diis::new(self.opts.diis_size);
        let mut e_old = f64::INFINITY;
        let mut dp = f64::INFINITY;

        let finish = |f: &[DMatrix<f64>; 2], energy, iterations, converged, dp, cnorm| {
            let (ca, ea) = solve_roothaan(&f[0], &self.x);
            let (cb, eb) = if self.restricted {
                (ca.clone(), ea.clone())
            } else {
                solve_roothaan(&f[1], &self.x)
            };
            ScfResult {
                kind,
                energy,
                coefficients: [ca, cb],
                orbital_energies: [ea, eb],
                converged,
                iterations,
                density_change: dp,
                commutator_norm: cnorm,
            }
        };

        let mut last = None;
        for iter in 1..=self.opts.max_iterations {
            let f = fock_matrices(ints, &p, self.restricted);
            let energy = electronic_energy(ints, &p, &f) + ints.nuclear_repulsion;
            let errs: Vec<DMatrix<f64>> = (0..2)
                .map(|k| &f[k] * &p[k] * s - s * &p[k] * &f[k])
                .collect();
            let cnorm = errs.iter().map(|e| e.norm_squared()).sum::<f64>().sqrt();
            let de = (energy - e_old).abs();
            debug!(
                "scf kind={kind:?} iter={iter} energy={energy:.14} de={de:.3e} commutator={cnorm:.3e} dp={dp:.3e}"
            );
            if cnorm < self.opts.commutator_tolerance
                && de < self.opts.energy_tolerance
                && dp < self.opts.density_tolerance
            {
                return Ok(finish(&f, energy, iter, true, dp, cnorm));
            }

            let flat: Vec<f64> = errs.iter().flat_map(|e| e.iter().copied()).collect();
            diis.push(f.clone(), flat);
            let (f_use, damp) = match diis.extrapolate() {
                Some(fx) => (fx, false),
                None => {
                    debug!("scf iter={iter} diis ill-conditioned; damping");
                    diis.clear();
                    (f.clone(), true)
                }
            };
            let (ca, _) = solve_roothaan(&f_use[0], &self.x);
            let cb = if self.restricted {
                ca.clone()
            } else {
                solve_roothaan(&f_use[1], &self.x).0
            };
            let mut p_new = [density(&ca, self.n_occ[0]), density(&cb, self.n_occ[1])];
            if damp {
                let w = self.opts.damping;
                for k in 0..2 {
                    p_new[k] = &p_new[k] * (1.0 - w) + &p[k] * w;
                }
            }
            dp = (0..2)
                .map(|k| (&p_new[k] - &p[k]).norm_squared())
                .sum::<f64>()
                .sqrt();
            p = p_new;
            e_old = energy;
            last = Some((f, energy, cnorm));
        }
        let (f, energy, cnorm) = last.expect("at least one iteration");
        let iterations = self.opts.max_iterations;
        Err(ScfError::NotConverged {
            iterations,
            last: Box::new(finish(&f, energy, iterations, false, dp, cnorm)),
        })
    }
}

pub fn run_rhf(ints: &IntegralSet, nelec: usize) -> Result<ScfResult, ScfError> {
    run_rhf_with(ints, nelec, &ScfOptions::default())
}

pub fn run_rhf_with(
    ints: &IntegralSet,
    nelec: usize,
    opts: &ScfOptions,
) -> Result<ScfResult, ScfError> {
    let n_occ = occupations(nelec, ints.n_orbitals())?;
    let x = orthogonalizer(ints, opts)?;
    let (c, _) = solve_roothaan(&ints.core_hamiltonian, &x);
    let pa = density(&c, n_occ);
    let engine = Engine {
        ints,
        x,
        n_occ: [n_occ; 2],
        restricted: true,
        opts,
    };
    engine.run([pa.clone(), pa])
}

/// UHF started from the RHF solution with its HOMO and LUMO mixed by
/// `+guess_mix` for α and `-guess_mix` for β.
pub fn run_uhf(ints: &IntegralSet, nelec: usize, guess_mix: f64) -> Result<ScfResult, ScfError> {
    run_uhf_with(ints, nelec, guess_mix, &ScfOptions::default())
}

pub fn run_uhf_with(
    ints: &IntegralSet,
    nelec: usize,
    guess_mix: f64,
    opts: &ScfOptions,
) -> Result<ScfResult, ScfError> {
    let rhf = run_rhf_with(ints, nelec, opts)?;
    let guess = mixed_guess(rhf.alpha(), nelec / 2, guess_mix);
    run_uhf_from(ints, nelec, &guess, opts)
}

/// Rotates HOMO/LUMO of `c` by `+angle` (α) and `-angle` (β).
pub fn mixed_guess(c: &DMatrix<f64>, n_occ: usize, angle: f64) -> [DMatrix<f64>; 2] {
    let mut ca = c.clone();
    let mut cb = c.clone();
    if n_occ == 0 || n_occ >= c.ncols() || angle == 0.0 {
        return [ca, cb];
    }
    let (homo, lumo) = (n_occ - 1, n_occ);
    let (s, co) = angle.sin_cos();
    let h = c.column(homo).into_owned();
    let l = c.column(lumo).into_owned();
    ca.set_column(homo, &(&h * co + &l * s));
    ca.set_column(lumo, &(&l * co - &h * s));
    cb.set_column(homo, &(&h * co - &l * s));
    cb.set_column(lumo, &(&l * co + &h * s));
    [ca, cb]
}

/// UHF iterations from explicit starting orbitals `[alpha, beta]`.
pub fn run_uhf_from(
    ints: &IntegralSet,
    nelec: usize,
    start: &[DMatrix<f64>; 2],
    opts: &ScfOptions,
) -> Result<ScfResult, ScfError> {
    let n_occ = occupations(nelec, ints.n_orbitals())?;
    let x = orthogonalizer(ints, opts)?;
    let p = [density(&start[0], n_occ), density(&start[1], n_occ)];
    let engine = Engine {
        ints,
        x,
        n_occ: [n_occ; 2],
        restricted: false,
        opts,
    };
    engine.run(p)
}

/// Ground-state energy of a single electron in the field of the nuclei,
/// i.e. the lowest eigenvalue of the core Hamiltonian plus nuclear repulsion.
pub fn one_electron_energy(ints: &IntegralSet) -> Result<f64, ScfError> {
    let x = orthogonalizer(ints, &ScfOptions::default())?;
    let (_, eps) = solve_roothaan(&ints.core_hamiltonian, &x);
    Ok(eps[0] + ints.nuclear_repulsion)
}

/// Largest entry of `|Cᵀ S C - 1|`.
pub fn orthonormality_error(s: &DMatrix<f64>, c: &DMatrix<f64>) -> f64 {
    let g = c.transpose() * s * c;
    (g - DMatrix::identity(c.ncols(), c.ncols())).amax()
}

/// Transforms AO integrals into the orthonormal orbital basis `c`.
pub fn transform_to_mo(ints: &IntegralSet, c: &DMatrix<f64>) -> Result<IntegralSet, ScfError> {
    let deviation = orthonormality_error(&ints.overlap, c);
    if deviation > 1e-8 {
        return Err(ScfError::NotOrthonormal { deviation });
    }
    Ok(IntegralSet {
        overlap: c.transpose() * &ints.overlap * c,
        core_hamiltonian: c.transpose() * &ints.core_hamiltonian * c,
        eri: ints.eri.transform(c, c),
        nuclear_repulsion: ints.nuclear_repulsion,
    })
}
