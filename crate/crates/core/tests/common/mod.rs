//! Numerical-quadrature oracles shared by the integration tests.
//!
//! Integrals are evaluated on a Becke-partitioned multicenter grid: every
//! nucleus carries a spherical product grid (Gauss-Legendre in a mapped
//! radius and in cos θ, uniform in φ), and fuzzy Voronoi weights split space
//! between the centers.
//!
//! The two-electron Hamiltonian is also built in first quantization, on the
//! full product space of two distinguishable particles.

#![allow(dead_code)]

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use twoelec::ci::occupied_modes;
use twoelec::integrals::{EriTensor, IntegralSet};
use twoelec::molbasis::{BasisFunction, Molecule, Shell};

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let (pn, pn1) = if n == 1 { (z, 1.0) } else { (p1, p0) };
            let dp = n as f64 * (z * pn - pn1) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (mut p0, mut p1) = (1.0, z);
        for k in 2..=n {
            let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
            p0 = p1;
            p1 = p2;
        }
        let dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
        x[i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    (x, w)
}

/// Radial nodes `r = r_m (1+x)/(1-x)` with weights including `r²`.
pub fn radial_grid(n: usize, rm: f64) -> Vec<(f64, f64)> {
    let (x, w) = gauss_legendre(n);
    x.iter()
        .zip(&w)
        .map(|(&x, &w)| {
            let r = rm * (1.0 + x) / (1.0 - x);
            (r, w * 2.0 * rm / ((1.0 - x) * (1.0 - x)) * r * r)
        })
        .collect()
}

fn dist(a: [f64; 3], b: [f64; 3]) -> f64 {
    (0..3).map(|k| (a[k] - b[k]).powi(2)).sum::<f64>().sqrt()
}

fn becke_step(mu: f64) -> f64 {
    let mut f = mu;
    for _ in 0..3 {
        f = 1.5 * f - 0.5 * f * f * f;
    }
    0.5 * (1.0 - f)
}

fn becke_weight(r: [f64; 3], centers: &[[f64; 3]], owner: usize) -> f64 {
    if centers.len() == 1 {
        return 1.0;
    }
    let cell: Vec<f64> = (0..centers.len())
        .map(|i| {
            let mut p = 1.0;
            for j in 0..centers.len() {
                if i != j {
                    let mu =
                        (dist(r, centers[i]) - dist(r, centers[j])) / dist(centers[i], centers[j]);
                    p *= becke_step(mu);
                }
            }
            p
        })
        .collect();
    let total: f64 = cell.iter().sum();
    if total == 0.0 {
        0.0
    } else {
        cell[owner] / total
    }
}

pub struct Grid {
    pub points: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
}

impl Grid {
    pub fn molecular(centers: &[[f64; 3]], n_radial: usize, n_theta: usize, n_phi: usize) -> Grid {
        let radial = radial_grid(n_radial, 1.0);
        let (u, v) = gauss_legendre(n_theta);
        let mut points = Vec::new();
        let mut weights = Vec::new();
        for (a, &c) in centers.iter().enumerate() {
            for &(r, wr) in &radial {
                for (&ct, &wt) in u.iter().zip(&v) {
                    let st = (1.0 - ct * ct).sqrt();
                    for l in 0..n_phi {
                        let phi = 2.0 * PI * (l as f64 + 0.5) / n_phi as f64;
                        let p = [
                            c[0] + r * st * phi.cos(),
                            c[1] + r * st * phi.sin(),
                            c[2] + r * ct,
                        ];
                        let w = wr * wt * 2.0 * PI / n_phi as f64 * becke_weight(p, centers, a);
                        if w != 0.0 {
                            points.push(p);
                            weights.push(w);
                        }
                    }
                }
            }
        }
        Grid { points, weights }
    }

    /// Grid suited to the nuclei of `mol`.
    pub fn for_molecule(mol: &Molecule) -> Grid {
        let centers: Vec<[f64; 3]> = mol.nuclei().iter().map(|n| n.position).collect();
        Grid::molecular(&centers, 90, 26, 26)
    }

    pub fn integrate(&self, f: impl Fn([f64; 3]) -> f64) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(&p, &w)| w * f(p))
            .sum()
    }
}

fn gradient(f: &BasisFunction, r: [f64; 3]) -> [f64; 3] {
    let d = [
        r[0] - f.position[0],
        r[1] - f.position[1],
        r[2] - f.position[2],
    ];
    let r2 = d[0] * d[0] + d[1] * d[1] + d[2] * d[2];
    let radial: f64 = f
        .shell
        .primitives()
        .iter()
        .map(|p| -2.0 * p.exponent * p.scaled_coefficient() * (-p.exponent * r2).exp())
        .sum();
    [radial * d[0], radial * d[1], radial * d[2]]
}

pub fn overlap(grid: &Grid, f: &BasisFunction, g: &BasisFunction) -> f64 {
    grid.integrate(|r| f.evaluate(r) * g.evaluate(r))
}

/// `½ ∫ ∇f · ∇g`, equal to `⟨f| -½∇² |g⟩` for decaying functions.
pub fn kinetic(grid: &Grid, f: &BasisFunction, g: &BasisFunction) -> f64 {
    grid.integrate(|r| {
        let (a, b) = (gradient(f, r), gradient(g, r));
        0.5 * (a[0] * b[0] + a[1] * b[1] + a[2] * b[2])
    })
}

pub fn nuclear_attraction(
    grid: &Grid,
    f: &BasisFunction,
    g: &BasisFunction,
    mol: &Molecule,
) -> f64 {
    grid.integrate(|r| {
        let v: f64 = mol
            .nuclei()
            .iter()
            .map(|n| -n.charge / dist(r, n.position))
            .sum();
        f.evaluate(r) * g.evaluate(r) * v
    })
}

/// Electrostatic potential at `r` of the charge density `f g`, summed over
/// primitive pairs as `(π/p)^{3/2} K erf(√p d) / d`.
pub fn pair_potential(f: &BasisFunction, g: &BasisFunction, r: [f64; 3]) -> f64 {
    let mut v = 0.0;
    for a in f.shell.primitives() {
        for b in g.shell.primitives() {
            let p = a.exponent + b.exponent;
            let ab = dist(f.position, g.position);
            let k = (-a.exponent * b.exponent / p * ab * ab).exp();
            let center = [
                (a.exponent * f.position[0] + b.exponent * g.position[0]) / p,
                (a.exponent * f.position[1] + b.exponent * g.position[1]) / p,
                (a.exponent * f.position[2] + b.exponent * g.position[2]) / p,
            ];
            let d = dist(r, center);
            let shape = if d < 1e-12 {
                2.0 * (p / PI).sqrt()
            } else {
                libm::erf(p.sqrt() * d) / d
            };
            v += a.scaled_coefficient() * b.scaled_coefficient() * k * (PI / p).powf(1.5) * shape;
        }
    }
    v
}

pub fn electron_repulsion(
    grid: &Grid,
    f: &BasisFunction,
    g: &BasisFunction,
    h: &BasisFunction,
    k: &BasisFunction,
) -> f64 {
    grid.integrate(|r| f.evaluate(r) * g.evaluate(r) * pair_potential(h, k, r))
}

/// `4π ∫ r² φ(r)² dr` for one contracted shell.
pub fn radial_self_overlap(shell: &Shell) -> f64 {
    radial_grid(200, 1.0)
        .iter()
        .map(|&(r, w)| 4.0 * PI * w * shell.evaluate(r * r).powi(2))
        .sum()
}

pub fn random_integrals(m: usize, rng: &mut ChaCha8Rng) -> IntegralSet {
    let mut h = DMatrix::from_fn(m, m, |_, _| rng.gen_range(-1.0..1.0));
    h = &h + h.transpose();
    let mut eri = EriTensor::zeros(m);
    for p in 0..m {
        for q in 0..m {
            for r in 0..m {
                for s in 0..m {
                    eri.set_symmetric(p, q, r, s, rng.gen_range(-0.5..0.5));
                }
            }
        }
    }
    IntegralSet {
        overlap: DMatrix::identity(m, m),
        core_hamiltonian: h,
        eri,
        nuclear_repulsion: rng.gen_range(0.0..1.0),
    }
}

/// Two distinguishable particles over `2m` spin orbitals (`p = 2i + σ`):
/// `H = h⊗1 + 1⊗h + V` on the full product space.
pub fn product_hamiltonian(ints: &IntegralSet) -> DMatrix<f64> {
    let m = ints.n_orbitals();
    let n = 2 * m;
    let h1 = |p: usize, q: usize| {
        if p % 2 == q % 2 {
            ints.core_hamiltonian[(p / 2, q / 2)]
        } else {
            0.0
        }
    };
    let v = |p: usize, q: usize, r: usize, s: usize| {
        if p % 2 == r % 2 && q % 2 == s % 2 {
            ints.eri.get(p / 2, r / 2, q / 2, s / 2)
        } else {
            0.0
        }
    };
    DMatrix::from_fn(n * n, n * n, |row, col| {
        let (p, q) = (row / n, row % n);
        let (r, s) = (col / n, col % n);
        let mut x = v(p, q, r, s);
        if q == s {
            x += h1(p, r);
        }
        if p == r {
            x += h1(q, s);
        }
        x
    })
}

/// Columns are `(|ab⟩ - |ba⟩)/√2` for every determinant `a < b`.
pub fn antisymmetrizer(n: usize, dets: &[u64]) -> DMatrix<f64> {
    let mut a = DMatrix::zeros(n * n, dets.len());
    for (k, &d) in dets.iter().enumerate() {
        let modes: Vec<usize> = occupied_modes(d).collect();
        let (p, q) = (modes[0], modes[1]);
        a[(p * n + q, k)] = 0.5f64.sqrt();
        a[(q * n + p, k)] = -(0.5f64.sqrt());
    }
    a
}

pub fn oracle_hamiltonian(ints: &IntegralSet, dets: &[u64]) -> DMatrix<f64> {
    let a = antisymmetrizer(2 * ints.n_orbitals(), dets);
    a.transpose() * product_hamiltonian(ints) * &a
        + DMatrix::identity(dets.len(), dets.len()) * ints.nuclear_repulsion
}
