//! Dense symmetric eigensolver and the small matrix helpers built on it.
//!
//! Every matrix in this crate is tiny (the largest is the CI Hamiltonian,
//! `C(2m, 2)` square), so a cyclic Jacobi sweep is accurate and fast enough.
//! Eigenvalues come back sorted in ascending order with eigenvectors as
//! matching columns.

use nalgebra::{DMatrix, DVector};

const MAX_SWEEPS: usize = 64;

/// Eigen-decomposition `A = V diag(values) Vᵀ` of a real symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub values: DVector<f64>,
    pub vectors: DMatrix<f64>,
}

impl SymmetricEigen {
    /// Cyclic Jacobi diagonalization.
    ///
    /// Only the upper triangle is trusted to be consistent with the lower
    /// one; callers pass symmetric matrices. Panics if `a` is not square.
    pub fn new(a: &DMatrix<f64>) -> Self {
        assert!(a.is_square(), "eigensolver needs a square matrix");
        let n = a.nrows();
        let mut a = a.clone();
        let mut v = DMatrix::<f64>::identity(n, n);

        let scale = a.norm();
        let mut last_off = f64::INFINITY;
        for _ in 0..MAX_SWEEPS {
            let off = off_diagonal_norm(&a);
            if off == 0.0 || off <= 1e-15 * scale || off >= last_off {
                break;
            }
            last_off = off;
            for p in 0..n {
                for q in (p + 1)..n {
                    rotate(&mut a, &mut v, p, q);
                }
            }
        }

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]));
        let values = DVector::from_iterator(n, order.iter().map(|&i| a[(i, i)]));
        let mut vectors = DMatrix::zeros(n, n);
        for (dst, &src) in order.iter().enumerate() {
            vectors.set_column(dst, &v.column(src));
        }
        SymmetricEigen { values, vectors }
    }

    pub fn lowest(&self) -> (f64, DVector<f64>) {
        (self.values[0], self.vectors.column(0).into_owned())
    }
}

fn off_diagonal_norm(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    let mut sum = 0.0;
    for p in 0..n {
        for q in (p + 1)..n {
            sum += 2.0 * a[(p, q)] * a[(p, q)];
        }
    }
    sum.sqrt()
}

// Annihilates a[p, q] with a plane rotation and accumulates it into v.
fn rotate(a: &mut DMatrix<f64>, v: &mut DMatrix<f64>, p: usize, q: usize) {
    let apq = a[(p, q)];
    if apq == 0.0 {
        return;
    }
    let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    let n = a.nrows();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = c * akp - s * akq;
        a[(k, q)] = s * akp + c * akq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = c * apk - s * aqk;
        a[(q, k)] = s * apk + c * aqk;
    }
    a[(p, q)] = 0.0;
    a[(q, p)] = 0.0;
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = c * vkp - s * vkq;
        v[(k, q)] = s * vkp + c * vkq;
    }
}

/// Symmetric (Löwdin) inverse square root `S^{-1/2}`.
///
/// Returns `Err(smallest eigenvalue)` when `S` has an eigenvalue below
/// `cutoff`, i.e. the basis is linearly dependent to that tolerance.
pub fn inverse_sqrt(s: &DMatrix<f64>, cutoff: f64) -> Result<DMatrix<f64>, f64> {
    let eig = SymmetricEigen::new(s);
    let smallest = eig.values[0];
    if smallest < cutoff {
        return Err(smallest);
    }
    let d = DMatrix::from_diagonal(&eig.values.map(|x| 1.0 / x.sqrt()));
    Ok(&eig.vectors * d * eig.vectors.transpose())
}

/// Largest absolute entry of `a - aᵀ`.
pub fn asymmetry(a: &DMatrix<f64>) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..a.nrows() {
        for j in 0..i {
            worst = worst.max((a[(i, j)] - a[(j, i)]).abs());
        }
    }
    worst
}
