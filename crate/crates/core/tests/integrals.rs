mod common;

use approx::assert_abs_diff_eq;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::Grid;
use twoelec::integrals::{self, compute_integrals, nuclear_repulsion};
use twoelec::molbasis::{build_orbital_basis, BasisSet, Molecule, Nucleus};

fn h2_basis(r: f64, basis: &str) -> (Molecule, twoelec::molbasis::OrbitalBasis) {
    let mol = Molecule::h2(r).unwrap();
    let ob = build_orbital_basis(&mol, &BasisSet::load(basis).unwrap()).unwrap();
    (mol, ob)
}

#[test]
fn shells_are_normalized_radially() {
    for name in ["sto-3g", "3-21g"] {
        let basis = BasisSet::load(name).unwrap();
        for z in basis.elements().collect::<Vec<_>>() {
            for shell in basis.shells(z).unwrap() {
                assert_abs_diff_eq!(common::radial_self_overlap(shell), 1.0, epsilon = 1e-9);
            }
        }
    }
}

#[test]
fn one_electron_integrals_match_quadrature() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..3 {
        let r = rng.gen_range(0.8..3.0);
        let (mol, ob) = h2_basis(r, "3-21g");
        let grid = Grid::for_molecule(&mol);
        let fs = ob.functions();
        for _ in 0..4 {
            let (i, j) = (rng.gen_range(0..fs.len()), rng.gen_range(0..fs.len()));
            let (f, g) = (&fs[i], &fs[j]);
            assert_abs_diff_eq!(
                integrals::overlap(f, g),
                common::overlap(&grid, f, g),
                epsilon = 1e-6
            );
            assert_abs_diff_eq!(
                integrals::kinetic(f, g),
                common::kinetic(&grid, f, g),
                epsilon = 1e-6
            );
            let v: f64 = mol
                .nuclei()
                .iter()
                .map(|n| integrals::nuclear_attraction(f, g, n.charge, n.position))
                .sum();
            assert_abs_diff_eq!(
                v,
                common::nuclear_attraction(&grid, f, g, &mol),
                epsilon = 1e-6
            );
        }
    }
}

#[test]
fn electron_repulsion_matches_quadrature() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut checked = 0;
    for _ in 0..4 {
        let r = rng.gen_range(0.7..3.5);
        let (mol, ob) = h2_basis(r, "3-21g");
        let grid = Grid::for_molecule(&mol);
        let fs = ob.functions();
        for _ in 0..6 {
            let idx: Vec<usize> = (0..4).map(|_| rng.gen_range(0..fs.len())).collect();
            let (a, b, c, d) = (&fs[idx[0]], &fs[idx[1]], &fs[idx[2]], &fs[idx[3]]);
            let analytic = integrals::electron_repulsion(a, b, c, d);
            let numeric = common::electron_repulsion(&grid, a, b, c, d);
            assert_abs_diff_eq!(analytic, numeric, epsilon = 1e-6);
            checked += 1;
        }
    }
    assert!(checked >= 20);
}

#[test]
fn helium_integrals_match_quadrature() {
    let mol = Molecule::helium();
    let ob = build_orbital_basis(&mol, &BasisSet::load("3-21g").unwrap()).unwrap();
    let grid = Grid::for_molecule(&mol);
    let fs = ob.functions();
    for f in fs {
        for g in fs {
            assert_abs_diff_eq!(
                integrals::kinetic(f, g),
                common::kinetic(&grid, f, g),
                epsilon = 1e-6
            );
            assert_abs_diff_eq!(
                integrals::electron_repulsion(f, f, g, g),
                common::electron_repulsion(&grid, f, f, g, g),
                epsilon = 1e-6
            );
        }
    }
}

#[test]
fn sto3g_h2_reference_values() {
    let (mol, ob) = h2_basis(1.4, "sto-3g");
    let ints = compute_integrals(&ob, &mol).unwrap();
    assert_abs_diff_eq!(ints.overlap[(0, 1)], 0.6593, epsilon = 1e-4);
    assert_abs_diff_eq!(ints.core_hamiltonian[(0, 0)], -1.1204, epsilon = 1e-4);
    assert_abs_diff_eq!(ints.core_hamiltonian[(0, 1)], -0.9584, epsilon = 1e-4);
    assert_abs_diff_eq!(ints.eri.get(0, 0, 0, 0), 0.7746, epsilon = 1e-4);
    assert_abs_diff_eq!(ints.eri.get(0, 0, 1, 1), 0.5697, epsilon = 1e-4);
    assert_abs_diff_eq!(ints.eri.get(1, 0, 0, 0), 0.4441, epsilon = 1e-4);
    assert_abs_diff_eq!(ints.eri.get(1, 0, 1, 0), 0.2970, epsilon = 1e-4);
    assert_abs_diff_eq!(ints.nuclear_repulsion, 1.0 / 1.4, epsilon = 1e-15);
}

#[test]
fn translation_and_rotation_invariance() {
    let basis = BasisSet::load("3-21g").unwrap();
    let base = Molecule::h2(1.7).unwrap();
    let reference = compute_integrals(&build_orbital_basis(&base, &basis).unwrap(), &base).unwrap();
    let shifted = base.translated([0.3, -1.2, 2.5]);
    let c = 1.7 / 3f64.sqrt();
    let rotated = Molecule::new(
        vec![Nucleus::new(1, [0.0; 3]), Nucleus::new(1, [c, c, c])],
        0,
    )
    .unwrap();
    for mol in [shifted, rotated] {
        let ints = compute_integrals(&build_orbital_basis(&mol, &basis).unwrap(), &mol).unwrap();
        assert!((&ints.overlap - &reference.overlap).amax() < 1e-12);
        assert!((&ints.core_hamiltonian - &reference.core_hamiltonian).amax() < 1e-12);
        assert!(ints.eri.max_abs_diff(&reference.eri) < 1e-12);
        assert_abs_diff_eq!(
            ints.nuclear_repulsion,
            reference.nuclear_repulsion,
            epsilon = 1e-14
        );
    }
}

#[test]
fn eri_tensor_has_eightfold_symmetry() {
    let (mol, ob) = h2_basis(1.1, "3-21g");
    let ints = compute_integrals(&ob, &mol).unwrap();
    assert!(ints.eri.symmetry_violation() < 1e-14);
    assert!(ints.eri.dim() == 4);
}

#[test]
fn coincident_nuclei_are_rejected() {
    let mol = Molecule::h2(0.0).unwrap();
    assert!(nuclear_repulsion(&mol).is_err());
}
