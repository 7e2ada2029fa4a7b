use approx::assert_abs_diff_eq;
use nalgebra::{DMatrix, Matrix4, Vector4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use twoelec::entanglement::binary_entropy;
use twoelec::spinmodel::{
    analytic_spectrum, exchange_coupling, ground_state_entropy, ground_state_entropy_closed_form,
    ground_state_entropy_log_form, spin_hamiltonian, sweep_entanglement, SpinPairParams,
};

fn pauli_hamiltonian(p: &SpinPairParams) -> Matrix4<f64> {
    // -(J/2)[(1+γ) σx σx + (1-γ) σy σy] - B (σz ⊗ 1 + 1 ⊗ σz), σy σy written out as a real matrix
    let sx = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
    let sz = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
    let id = DMatrix::<f64>::identity(2, 2);
    let xx = sx.kronecker(&sx);
    let yy = DMatrix::from_row_slice(
        4,
        4,
        &[
            0., 0., 0., -1., 0., 0., 1., 0., 0., 1., 0., 0., -1., 0., 0., 0.,
        ],
    );
    let h = -(p.j / 2.0) * ((1.0 + p.gamma) * xx + (1.0 - p.gamma) * yy)
        - p.b * (sz.kronecker(&id) + id.kronecker(&sz));
    Matrix4::from_iterator(h.iter().copied())
}

#[test]
fn hamiltonian_matches_pauli_construction() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..20 {
        let p = SpinPairParams::new(
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-1.0..1.0),
        );
        assert!((spin_hamiltonian(&p) - pauli_hamiltonian(&p)).amax() < 1e-14);
    }
}

#[test]
fn analytic_eigenpairs_for_random_parameters() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..100 {
        let p = SpinPairParams::new(
            rng.gen_range(-3.0..3.0),
            rng.gen_range(-3.0..3.0),
            rng.gen_range(-1.5..1.5),
        );
        let h = spin_hamiltonian(&p);
        let spec = analytic_spectrum(&p);
        for k in 0..4 {
            let v = &spec.vectors[k];
            assert!((h * v - v * spec.values[k]).norm() < 1e-12);
        }
        let mut ours = spec.values;
        ours.sort_by(f64::total_cmp);
        let mut numeric: Vec<f64> = h.symmetric_eigen().eigenvalues.iter().copied().collect();
        numeric.sort_by(f64::total_cmp);
        for k in 0..4 {
            assert_abs_diff_eq!(ours[k], numeric[k], epsilon = 1e-12);
        }
    }
}

/// Entropy of the first spin from an independent dense eigensolver.
fn numeric_entropy(p: &SpinPairParams) -> f64 {
    let eig = spin_hamiltonian(p).symmetric_eigen();
    let k = eig.eigenvalues.imin();
    let v: Vector4<f64> = eig.eigenvectors.column(k).into_owned();
    let m = DMatrix::from_row_slice(2, 2, &[v[0], v[1], v[2], v[3]]);
    let rho = &m * m.transpose();
    let lambdas = rho.symmetric_eigen().eigenvalues;
    lambdas
        .iter()
        .filter(|&&x| x > 1e-300)
        .map(|&x| -x * x.log2())
        .sum()
}

#[test]
fn closed_form_matches_diagonalized_ground_state() {
    for lambda in [0.1, 0.5, 1.0, 2.0, 5.0, 10.0] {
        let p = SpinPairParams::ising(lambda, 1.0);
        let closed = ground_state_entropy_closed_form(lambda);
        assert_abs_diff_eq!(closed, numeric_entropy(&p), epsilon = 1e-10);
        assert_abs_diff_eq!(closed, ground_state_entropy(&p).unwrap(), epsilon = 1e-10);
        assert_abs_diff_eq!(
            closed,
            ground_state_entropy_log_form(lambda),
            epsilon = 1e-12
        );
    }
    assert_eq!(ground_state_entropy_closed_form(0.0), 0.0);
    assert_abs_diff_eq!(ground_state_entropy_closed_form(1e6), 1.0, epsilon = 1e-10);
}

#[test]
fn anisotropic_entropy_from_field_aligned_state() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..50 {
        let p = SpinPairParams::new(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(0.05..1.0),
            rng.gen_range(0.1..1.0),
        );
        let alpha = p.alpha();
        let expected = if alpha > p.j.abs() {
            binary_entropy((alpha + 2.0 * p.b) / (2.0 * alpha))
        } else {
            1.0
        };
        assert_abs_diff_eq!(ground_state_entropy(&p).unwrap(), expected, epsilon = 1e-10);
        assert_abs_diff_eq!(numeric_entropy(&p), expected, epsilon = 1e-10);
    }
}

#[test]
fn exchange_decays_monotonically_beyond_peak() {
    let j = |r: f64| exchange_coupling(r).unwrap().j;
    // |J| peaks at R = 5/4
    assert!(j(1.25).abs() > j(1.2).abs() && j(1.25).abs() > j(1.3).abs());
    let mut prev = j(1.3).abs();
    for k in 14..200 {
        let now = j(k as f64 * 0.1).abs();
        assert!(now < prev);
        prev = now;
    }
}

#[test]
fn sweep_curves_are_unimodal_and_ordered_by_field() {
    let grid: Vec<f64> = (0..=900).map(|k| 1.0 + 0.01 * k as f64).collect();
    let b_values = [0.05, 0.1, 0.2];
    let rows = sweep_entanglement(&grid, &b_values, 1.0).unwrap();
    let mut peaks = Vec::new();
    for (n, _) in b_values.iter().enumerate() {
        let s: Vec<f64> = rows[n * grid.len()..(n + 1) * grid.len()]
            .iter()
            .map(|r| r.s)
            .collect();
        let top = s
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .unwrap()
            .0;
        assert!(s[..=top].windows(2).all(|w| w[1] >= w[0]));
        assert!(s[top..].windows(2).all(|w| w[1] <= w[0]));
        peaks.push(s[top]);
    }
    assert!(peaks[0] > peaks[1] && peaks[1] > peaks[2], "{peaks:?}");
}

#[test]
fn default_sweep_vanishes_at_largest_separation() {
    let rows =
        twoelec::pipeline::run_spin_sweep(&twoelec::pipeline::SweepConfig::default()).unwrap();
    for row in rows.iter().filter(|r| (r.r_bohr - 12.0).abs() < 1e-9) {
        assert!(row.s < 1e-6, "B={}: {}", row.b, row.s);
    }
    assert_eq!(
        rows.iter()
            .filter(|r| (r.r_bohr - 12.0).abs() < 1e-9)
            .count(),
        3
    );
}
