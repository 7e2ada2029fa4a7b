//! One- and two-electron integrals over contracted s-type Gaussians.
//!
//! Everything is specialized to zero angular momentum: products of two
//! s Gaussians collapse onto one s Gaussian at the weighted center (Gaussian
//! product theorem) and the Coulomb-type integrals reduce to the Boys
//! function `F₀`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use thiserror::Error;

use crate::molbasis::{BasisFunction, Molecule, OrbitalBasis};

#[derive(Debug, Error, PartialEq)]
pub enum IntegralError {
    #[error("Boys function argument must be nonnegative, got {0}")]
    NegativeBoysArgument(f64),
    #[error("nuclei {0} and {1} coincide; nuclear repulsion is singular")]
    CoincidentNuclei(usize, usize),
}

/// Below this argument `F₀` is evaluated from its Taylor series.
const BOYS_SERIES_CUTOFF: f64 = 1e-6;

/// Boys function of order zero, `F₀(x) = ∫₀¹ exp(-x t²) dt`.
pub fn boys_f0(x: f64) -> Result<f64, IntegralError> {
    if x < 0.0 || x.is_nan() {
        return Err(IntegralError::NegativeBoysArgument(x));
    }
    Ok(boys_f0_unchecked(x))
}

fn boys_f0_unchecked(x: f64) -> f64 {
    if x < BOYS_SERIES_CUTOFF {
        // Σ (-x)^k / (k! (2k+1)), k = 0..5
        let mut term = 1.0;
        let mut sum = 0.0;
        for k in 0..6 {
            sum += term / (2 * k + 1) as f64;
            term *= -x / (k + 1) as f64;
        }
        sum
    } else {
        let rx = x.sqrt();
        0.5 * (PI / x).sqrt() * libm::erf(rx)
    }
}

fn dist2(a: [f64; 3], b: [f64; 3]) -> f64 {
    (0..3).map(|k| (a[k] - b[k]).powi(2)).sum()
}

fn weighted_center(a: f64, pa: [f64; 3], b: f64, pb: [f64; 3]) -> [f64; 3] {
    let p = a + b;
    [
        (a * pa[0] + b * pb[0]) / p,
        (a * pa[1] + b * pb[1]) / p,
        (a * pa[2] + b * pb[2]) / p,
    ]
}

/// Expanded primitive pair: `c · exp(-p |r - P|²)` equals the product of
/// two primitives.
struct PrimPair {
    p: f64,
    center: [f64; 3],
    prefactor: f64,
    // reduced exponent ab/p and |A-B|² kept for the kinetic term
    mu: f64,
    ab2: f64,
}

fn primitive_pairs(f: &BasisFunction, g: &BasisFunction) -> Vec<PrimPair> {
    let ab2 = dist2(f.position, g.position);
    let mut out = Vec::with_capacity(f.shell.primitives().len() * g.shell.primitives().len());
    for pa in f.shell.primitives() {
        for pb in g.shell.primitives() {
            let (a, b) = (pa.exponent, pb.exponent);
            let p = a + b;
            let mu = a * b / p;
            out.push(PrimPair {
                p,
                center: weighted_center(a, f.position, b, g.position),
                prefactor: pa.scaled_coefficient() * pb.scaled_coefficient() * (-mu * ab2).exp(),
                mu,
                ab2,
            });
        }
    }
    out
}

pub fn overlap(f: &BasisFunction, g: &BasisFunction) -> f64 {
    primitive_pairs(f, g)
        .iter()
        .map(|pp| pp.prefactor * (PI / pp.p).powf(1.5))
        .sum()
}

pub fn kinetic(f: &BasisFunction, g: &BasisFunction) -> f64 {
    primitive_pairs(f, g)
        .iter()
        .map(|pp| pp.prefactor * (PI / pp.p).powf(1.5) * pp.mu * (3.0 - 2.0 * pp.mu * pp.ab2))
        .sum()
}

/// Attraction to a point charge `charge` at `at` (negative for positive charge).
pub fn nuclear_attraction(f: &BasisFunction, g: &BasisFunction, charge: f64, at: [f64; 3]) -> f64 {
    primitive_pairs(f, g)
        .iter()
        .map(|pp| {
            -charge * pp.prefactor * 2.0 * PI / pp.p
                * boys_f0_unchecked(pp.p * dist2(pp.center, at))
        })
        .sum()
}

/// Electron repulsion `(fg|hk)` in chemists' notation.
pub fn electron_repulsion(
    f: &BasisFunction,
    g: &BasisFunction,
    h: &BasisFunction,
    k: &BasisFunction,
) -> f64 {
    let bra = primitive_pairs(f, g);
    let ket = primitive_pairs(h, k);
    let mut sum = 0.0;
    for x in &bra {
        for y in &ket {
            let rho = x.p * y.p / (x.p + y.p);
            sum += x.prefactor * y.prefactor * 2.0 * PI.powf(2.5)
                / (x.p * y.p * (x.p + y.p).sqrt())
                * boys_f0_unchecked(rho * dist2(x.center, y.center));
        }
    }
    sum
}

/// Dense 4-index tensor `(pq|rs)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EriTensor {
    n: usize,
    data: Vec<f64>,
}

impl EriTensor {
    pub fn zeros(n: usize) -> Self {
        EriTensor {
            n,
            data: vec![0.0; n.pow(4)],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    fn index(&self, p: usize, q: usize, r: usize, s: usize) -> usize {
        ((p * self.n + q) * self.n + r) * self.n + s
    }

    #[inline]
    pub fn get(&self, p: usize, q: usize, r: usize, s: usize) -> f64 {
        self.data[self.index(p, q, r, s)]
    }

    pub fn set(&mut self, p: usize, q: usize, r: usize, s: usize, value: f64) {
        let i = self.index(p, q, r, s);
        self.data[i] = value;
    }

    /// Writes `value` into all eight permutation-equivalent slots.
    pub fn set_symmetric(&mut self, p: usize, q: usize, r: usize, s: usize, value: f64) {
        for (a, b, c, d) in [
            (p, q, r, s),
            (q, p, r, s),
            (p, q, s, r),
            (q, p, s, r),
            (r, s, p, q),
            (s, r, p, q),
            (r, s, q, p),
            (s, r, q, p),
        ] {
            self.set(a, b, c, d, value);
        }
    }

    /// Largest violation of the 8-fold permutational symmetry.
    pub fn symmetry_violation(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0_f64;
        for p in 0..n {
            for q in 0..n {
                for r in 0..n {
                    for s in 0..n {
                        let v = self.get(p, q, r, s);
                        for w in [
                            self.get(q, p, r, s),
                            self.get(p, q, s, r),
                            self.get(r, s, p, q),
                        ] {
                            worst = worst.max((v - w).abs());
                        }
                    }
                }
            }
        }
        worst
    }

    pub fn max_abs_diff(&self, other: &EriTensor) -> f64 {
        assert_eq!(self.n, other.n);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Full four-index transformation `(pq|rs) = Σ C_μp C_νq C_λr C_σs (μν|λσ)`
    /// with independent coefficient matrices for the bra and ket pairs.
    pub fn transform(&self, bra: &DMatrix<f64>, ket: &DMatrix<f64>) -> EriTensor {
        let n = self.n;
        let m = bra.ncols();
        debug_assert_eq!(ket.ncols(), m);
        // quarter transformations, one index at a time
        let mut t1 = vec![0.0; m * n * n * n];
        for p in 0..m {
            for nu in 0..n {
                for la in 0..n {
                    for si in 0..n {
                        let mut acc = 0.0;
                        for mu in 0..n {
                            acc += bra[(mu, p)] * self.get(mu, nu, la, si);
                        }
                        t1[((p * n + nu) * n + la) * n + si] = acc;
                    }
                }
            }
        }
        let mut t2 = vec![0.0; m * m * n * n];
        for p in 0..m {
            for q in 0..m {
                for la in 0..n {
                    for si in 0..n {
                        let mut acc = 0.0;
                        for nu in 0..n {
                            acc += bra[(nu, q)] * t1[((p * n + nu) * n + la) * n + si];
                        }
                        t2[((p * m + q) * n + la) * n + si] = acc;
                    }
                }
            }
        }
        let mut t3 = vec![0.0; m * m * m * n];
        for p in 0..m {
            for q in 0..m {
                for r in 0..m {
                    for si in 0..n {
                        let mut acc = 0.0;
                        for la in 0..n {
                            acc += ket[(la, r)] * t2[((p * m + q) * n + la) * n + si];
                        }
                        t3[((p * m + q) * m + r) * n + si] = acc;
                    }
                }
            }
        }
        let mut out = EriTensor::zeros(m);
        for p in 0..m {
            for q in 0..m {
                for r in 0..m {
                    for s in 0..m {
                        let mut acc = 0.0;
                        for si in 0..n {
                            acc += ket[(si, s)] * t3[((p * m + q) * m + r) * n + si];
                        }
                        out.set(p, q, r, s, acc);
                    }
                }
            }
        }
        out
    }
}

/// Integrals defining the electronic Hamiltonian in some orbital basis.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegralSet {
    pub overlap: DMatrix<f64>,
    /// `T + V`
    pub core_hamiltonian: DMatrix<f64>,
    pub eri: EriTensor,
    pub nuclear_repulsion: f64,
}

impl IntegralSet {
    pub fn n_orbitals(&self) -> usize {
        self.overlap.nrows()
    }
}

fn one_electron_matrix(
    ob: &OrbitalBasis,
    f: impl Fn(&BasisFunction, &BasisFunction) -> f64,
) -> DMatrix<f64> {
    let fs = ob.functions();
    let m = fs.len();
    let mut out = DMatrix::zeros(m, m);
    for i in 0..m {
        for j in 0..=i {
            let v = f(&fs[i], &fs[j]);
            out[(i, j)] = v;
            out[(j, i)] = v;
        }
    }
    out
}

pub fn overlap_matrix(ob: &OrbitalBasis) -> DMatrix<f64> {
    one_electron_matrix(ob, overlap)
}

pub fn kinetic_matrix(ob: &OrbitalBasis) -> DMatrix<f64> {
    one_electron_matrix(ob, kinetic)
}

pub fn nuclear_attraction_matrix(ob: &OrbitalBasis, mol: &Molecule) -> DMatrix<f64> {
    one_electron_matrix(ob, |f, g| {
        mol.nuclei()
            .iter()
            .map(|n| nuclear_attraction(f, g, n.charge, n.position))
            .sum()
    })
}

pub fn eri_tensor(ob: &OrbitalBasis) -> EriTensor {
    let fs = ob.functions();
    let m = fs.len();
    let mut eri = EriTensor::zeros(m);
    for p in 0..m {
        for q in 0..=p {
            let pq = p * (p + 1) / 2 + q;
            for r in 0..m {
                for s in 0..=r {
                    if r * (r + 1) / 2 + s > pq {
                        continue;
                    }
                    let v = electron_repulsion(&fs[p], &fs[q], &fs[r], &fs[s]);
                    eri.set_symmetric(p, q, r, s, v);
                }
            }
        }
    }
    eri
}

pub fn nuclear_repulsion(mol: &Molecule) -> Result<f64, IntegralError> {
    let nuclei = mol.nuclei();
    let mut e = 0.0;
    for i in 0..nuclei.len() {
        for j in 0..i {
            let r = dist2(nuclei[i].position, nuclei[j].position).sqrt();
            if r == 0.0 && nuclei[i].charge != 0.0 && nuclei[j].charge != 0.0 {
                return Err(IntegralError::CoincidentNuclei(j, i));
            }
            e += nuclei[i].charge * nuclei[j].charge / r;
        }
    }
    Ok(e)
}

/// All AO integrals for `mol` in the orbital basis `ob`.
pub fn compute_integrals(ob: &OrbitalBasis, mol: &Molecule) -> Result<IntegralSet, IntegralError> {
    let nuclear_repulsion = nuclear_repulsion(mol)?;
    Ok(IntegralSet {
        overlap: overlap_matrix(ob),
        core_hamiltonian: kinetic_matrix(ob) + nuclear_attraction_matrix(ob, mol),
        eri: eri_tensor(ob),
        nuclear_repulsion,
    })
}
