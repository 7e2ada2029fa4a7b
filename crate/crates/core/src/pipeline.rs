//! End-to-end drivers: dissociation scans, single points, spin-model sweeps
//! and FCIDUMP-based runs.

use std::fmt;
use std::str::FromStr;

use log::{info, warn};
use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::ci::{solve_ground_state, CiSolution, SpinOrbitalIntegrals};
use crate::entanglement::{reduced_density_spatial_orbital, reduced_density_spin_mode};
use crate::integrals::{compute_integrals, IntegralSet};
use crate::io::{read_fcidump, write_fcidump, FcidumpHeader, ResultRow};
use crate::molbasis::{build_orbital_basis, BasisSet, LengthUnit, Molecule, ANGSTROM_TO_BOHR};
use crate::scf::{
    run_rhf_with, run_uhf_from, run_uhf_with, transform_to_mo, ScfOptions, ScfResult,
    DEFAULT_GUESS_MIX,
};
use crate::spinmodel::{sweep_entanglement, SweepRow};
use crate::Error;

/// Orbitals defining the determinant basis, and hence the entropies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReferenceChoice {
    Rhf,
    Uhf,
    Both,
}

impl ReferenceChoice {
    fn kinds(self) -> &'static [ReferenceChoice] {
        match self {
            ReferenceChoice::Rhf => &[ReferenceChoice::Rhf],
            ReferenceChoice::Uhf => &[ReferenceChoice::Uhf],
            ReferenceChoice::Both => &[ReferenceChoice::Rhf, ReferenceChoice::Uhf],
        }
    }
}

impl fmt::Display for ReferenceChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReferenceChoice::Rhf => "rhf",
            ReferenceChoice::Uhf => "uhf",
            ReferenceChoice::Both => "both",
        })
    }
}

impl FromStr for ReferenceChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "rhf" => Ok(ReferenceChoice::Rhf),
            "uhf" => Ok(ReferenceChoice::Uhf),
            "both" => Ok(ReferenceChoice::Both),
            other => Err(format!(
                "unknown reference {other:?} (expected rhf, uhf or both)"
            )),
        }
    }
}

/// Settings shared by every electronic-structure point.
#[derive(Debug, Clone, PartialEq)]
pub struct PointConfig {
    /// Built-in basis name or path to a Gaussian94 file.
    pub basis: String,
    pub reference: ReferenceChoice,
    /// 0-based spatial orbital whose 4×4 density is reported.
    pub spatial_orbital: usize,
    /// 0-based spin-orbital mode whose 2×2 density is reported.
    pub spin_mode: usize,
    pub guess_mix: f64,
    pub scf: ScfOptions,
}

impl Default for PointConfig {
    fn default() -> Self {
        PointConfig {
            basis: "3-21g".into(),
            reference: ReferenceChoice::Uhf,
            spatial_orbital: 0,
            spin_mode: 0,
            guess_mix: DEFAULT_GUESS_MIX,
            scf: ScfOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanConfig {
    pub point: PointConfig,
    pub r_start: f64,
    pub r_stop: f64,
    pub r_step: f64,
    pub units: LengthUnit,
    /// Start each UHF from the previous point's orbitals; points then run
    /// sequentially and symmetry breaking may follow the scan direction.
    pub warm_start: bool,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            point: PointConfig {
                reference: ReferenceChoice::Both,
                ..PointConfig::default()
            },
            r_start: 0.3,
            r_stop: 6.0,
            r_step: 0.05,
            units: LengthUnit::Angstrom,
            warm_start: false,
        }
    }
}

/// `start, start + step, …` up to `stop` inclusive (within rounding).
pub fn linear_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>, Error> {
    if !(start.is_finite() && stop.is_finite() && step.is_finite()) {
        return Err(Error::Config("grid bounds must be finite".into()));
    }
    if step <= 0.0 {
        return Err(Error::Config(format!("step must be positive, got {step}")));
    }
    if start > stop {
        return Err(Error::Config(format!("start {start} exceeds stop {stop}")));
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|k| start + k as f64 * step).collect())
}

impl ScanConfig {
    /// Grid points in the configured units.
    pub fn grid(&self) -> Result<Vec<f64>, Error> {
        if self.r_start >= self.r_stop {
            return Err(Error::Config(format!(
                "r-start {} must be below r-stop {}",
                self.r_start, self.r_stop
            )));
        }
        if self.r_start <= 0.0 {
            return Err(Error::Config(format!(
                "r-start must be positive, got {}",
                self.r_start
            )));
        }
        linear_grid(self.r_start, self.r_stop, self.r_step)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointFailure {
    pub r_angstrom: f64,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ScanOutcome {
    pub rows: Vec<ResultRow>,
    pub failures: Vec<PointFailure>,
}

/// Everything computed at one geometry.
#[derive(Debug, Clone)]
pub struct PointAnalysis {
    pub rhf: ScfResult,
    pub uhf: ScfResult,
    pub rows: Vec<ResultRow>,
}

fn check_indices(cfg: &PointConfig, m: usize) -> Result<(), Error> {
    if cfg.spatial_orbital >= m {
        return Err(Error::Config(format!(
            "spatial orbital {} out of range for {m} orbitals",
            cfg.spatial_orbital
        )));
    }
    if cfg.spin_mode >= 2 * m {
        return Err(Error::Config(format!(
            "spin mode {} out of range for {} modes",
            cfg.spin_mode,
            2 * m
        )));
    }
    Ok(())
}

fn entropies(ci: &CiSolution, cfg: &PointConfig) -> Result<(f64, f64), Error> {
    let spatial = reduced_density_spatial_orbital(&ci.vector, cfg.spatial_orbital)?.entropy()?;
    let spin = reduced_density_spin_mode(&ci.vector, cfg.spin_mode)?.entropy()?;
    Ok((spatial, spin))
}

/// RHF, UHF, full CI in the requested orbital bases and the entropies of
/// the configured orbital and mode.
pub fn analyze(
    mol: &Molecule,
    basis: &BasisSet,
    r_angstrom: f64,
    cfg: &PointConfig,
    uhf_start: Option<&[DMatrix<f64>; 2]>,
) -> Result<PointAnalysis, Error> {
    let ob = build_orbital_basis(mol, basis)?;
    check_indices(cfg, ob.len())?;
    let ints = compute_integrals(&ob, mol)?;
    let nelec = mol.electron_count();
    let rhf = run_rhf_with(&ints, nelec, &cfg.scf)?;
    let uhf = match uhf_start {
        Some(start) => run_uhf_from(&ints, nelec, start, &cfg.scf)?,
        None => run_uhf_with(&ints, nelec, cfg.guess_mix, &cfg.scf)?,
    };
    let mut rows = Vec::new();
    for &kind in cfg.reference.kinds() {
        let so = match kind {
            ReferenceChoice::Rhf => {
                SpinOrbitalIntegrals::from_restricted(&transform_to_mo(&ints, rhf.alpha())?)
            }
            _ => SpinOrbitalIntegrals::from_unrestricted(&ints, uhf.alpha(), uhf.beta())?,
        };
        let ci = solve_ground_state(&so)?;
        let (s_spatial, s_spinmode) = entropies(&ci, cfg)?;
        let e_fci = ci.vector.energy();
        rows.push(ResultRow {
            r_angstrom,
            e_rhf: rhf.energy,
            e_uhf: uhf.energy,
            e_fci,
            e_c: (e_fci - uhf.energy).abs(),
            s_spatial,
            s_spinmode,
            reference: kind.to_string(),
        });
    }
    Ok(PointAnalysis { rhf, uhf, rows })
}

/// H₂ at every grid point. Points that fail are listed in
/// [`ScanOutcome::failures`] and the scan carries on.
pub fn run_h2_scan(cfg: &ScanConfig) -> Result<ScanOutcome, Error> {
    let grid = cfg.grid()?;
    let basis = BasisSet::load(&cfg.point.basis)?;
    let m = build_orbital_basis(&Molecule::h2(1.0)?, &basis)?.len();
    check_indices(&cfg.point, m)?;
    let to_angstrom = |r: f64| match cfg.units {
        LengthUnit::Angstrom => r,
        LengthUnit::Bohr => r / ANGSTROM_TO_BOHR,
    };
    let point = |r: f64, start: Option<&[DMatrix<f64>; 2]>| {
        let mol = Molecule::h2(cfg.units.to_bohr(r))?;
        analyze(&mol, &basis, to_angstrom(r), &cfg.point, start)
    };

    let results: Vec<(f64, Result<PointAnalysis, Error>)> = if cfg.warm_start {
        let mut previous: Option<[DMatrix<f64>; 2]> = None;
        grid.iter()
            .map(|&r| {
                let mut res = point(r, previous.as_ref());
                if res.is_err() && previous.is_some() {
                    warn!("warm start failed at r={r}; retrying from scratch");
                    res = point(r, None);
                }
                if let Ok(p) = &res {
                    previous = Some(p.uhf.coefficients.clone());
                }
                (r, res)
            })
            .collect()
    } else {
        grid.par_iter().map(|&r| (r, point(r, None))).collect()
    };

    let mut out = ScanOutcome::default();
    for (r, res) in results {
        match res {
            Ok(p) => out.rows.extend(p.rows),
            Err(e) => {
                warn!("scan point r={r} failed: {e}");
                out.failures.push(PointFailure {
                    r_angstrom: to_angstrom(r),
                    message: e.to_string(),
                });
            }
        }
    }
    info!(
        "scan finished: {} rows, {} failures",
        out.rows.len(),
        out.failures.len()
    );
    Ok(out)
}

/// Helium atom; rows carry `R = 0`.
pub fn run_he_point(cfg: &PointConfig) -> Result<Vec<ResultRow>, Error> {
    let basis = BasisSet::load(&cfg.basis)?;
    Ok(analyze(&Molecule::helium(), &basis, 0.0, cfg, None)?.rows)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    /// Separations in bohr.
    pub r_start: f64,
    pub r_stop: f64,
    pub r_step: f64,
    pub b_values: Vec<f64>,
    pub gamma: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            r_start: 0.1,
            r_stop: 12.0,
            r_step: 0.1,
            b_values: vec![0.05, 0.1, 0.2],
            gamma: 1.0,
        }
    }
}

pub fn run_spin_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRow>, Error> {
    if cfg.r_start <= 0.0 {
        return Err(Error::Config(format!(
            "r-start must be positive, got {}",
            cfg.r_start
        )));
    }
    let grid = linear_grid(cfg.r_start, cfg.r_stop, cfg.r_step)?;
    Ok(sweep_entanglement(&grid, &cfg.b_values, cfg.gamma)?)
}

/// Full CI and entropies on integrals read from FCIDUMP text. The orbitals
/// are taken to be orthonormal; `e_rhf` and `e_uhf` hold the energy of the
/// reference determinant.
pub fn run_from_fcidump(
    text: &str,
    spatial_orbital: usize,
    spin_mode: usize,
) -> Result<ResultRow, Error> {
    let (ints, header) = read_fcidump(text)?;
    if header.nelec != 2 {
        return Err(Error::UnsupportedSystem(format!(
            "{} electrons; only two-electron systems are supported",
            header.nelec
        )));
    }
    let cfg = PointConfig {
        spatial_orbital,
        spin_mode,
        ..PointConfig::default()
    };
    check_indices(&cfg, header.norb)?;
    let ci = solve_ground_state(&SpinOrbitalIntegrals::from_restricted(&ints))?;
    let (s_spatial, s_spinmode) = entropies(&ci, &cfg)?;
    let e_fci = ci.vector.energy();
    Ok(ResultRow {
        r_angstrom: 0.0,
        e_rhf: ci.reference_energy,
        e_uhf: ci.reference_energy,
        e_fci,
        e_c: (e_fci - ci.reference_energy).abs(),
        s_spatial,
        s_spinmode,
        reference: "fcidump".into(),
    })
}

/// RHF molecular-orbital integrals of `mol` as FCIDUMP text.
pub fn export_fcidump(mol: &Molecule, basis: &BasisSet, scf: &ScfOptions) -> Result<String, Error> {
    let mo = mo_integrals(mol, basis, scf)?;
    let header = FcidumpHeader::singlet(mo.n_orbitals(), mol.electron_count());
    Ok(write_fcidump(&mo, &header))
}

/// Integrals over the RHF orbitals of `mol`.
pub fn mo_integrals(
    mol: &Molecule,
    basis: &BasisSet,
    scf: &ScfOptions,
) -> Result<IntegralSet, Error> {
    let ob = build_orbital_basis(mol, basis)?;
    let ints = compute_integrals(&ob, mol)?;
    let rhf = run_rhf_with(&ints, mol.electron_count(), scf)?;
    Ok(transform_to_mo(&ints, rhf.alpha())?)
}
