//! Molecular geometries and contracted s-type Gaussian basis sets.
//!
//! Lengths are bohr everywhere inside the crate. Basis sets are read from
//! Gaussian94-format text and normalized at parse time, so the integral code
//! never has to think about normalization conventions.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use thiserror::Error;

/// 1 Å in bohr (CODATA).
pub const ANGSTROM_TO_BOHR: f64 = 1.8897259886;

/// Directory searched for `<name>.gbs` basis files before the built-in copies.
pub const FIXTURE_DIR_ENV: &str = "TWOELEC_FIXTURES";

const ELEMENTS: [&str; 10] = ["H", "He", "Li", "Be", "B", "C", "N", "O", "F", "Ne"];

#[derive(Debug, Error, PartialEq)]
pub enum BasisError {
    #[error(
        "line {line}: unsupported angular momentum: {shell} shell (only S shells are supported)"
    )]
    UnsupportedShell { line: usize, shell: String },
    #[error("line {line}: exponent must be positive, got {value}")]
    NonPositiveExponent { line: usize, value: f64 },
    #[error("element block for {element} contains no shells")]
    EmptyElement { element: String },
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("unknown element symbol `{0}`")]
    UnknownElement(String),
    #[error("basis set has no functions for atomic number(s) {0:?}")]
    MissingElement(Vec<u32>),
    #[error("basis `{name}` not found: {reason}")]
    NotFound { name: String, reason: String },
    #[error("molecule has {0} electrons; only two-electron systems are supported")]
    UnsupportedElectronCount(i64),
    #[error("molecule has no atoms")]
    NoAtoms,
    #[error("non-finite nuclear position")]
    NonFinitePosition,
}

pub fn element_symbol(z: u32) -> Option<&'static str> {
    ELEMENTS.get((z as usize).checked_sub(1)?).copied()
}

pub fn atomic_number(symbol: &str) -> Result<u32, BasisError> {
    ELEMENTS
        .iter()
        .position(|s| s.eq_ignore_ascii_case(symbol))
        .map(|i| i as u32 + 1)
        .ok_or_else(|| BasisError::UnknownElement(symbol.to_string()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LengthUnit {
    #[default]
    Angstrom,
    Bohr,
}

impl LengthUnit {
    pub fn to_bohr(self, x: f64) -> f64 {
        match self {
            LengthUnit::Angstrom => x * ANGSTROM_TO_BOHR,
            LengthUnit::Bohr => x,
        }
    }
}

impl FromStr for LengthUnit {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "angstrom" | "ang" | "a" => Ok(LengthUnit::Angstrom),
            "bohr" | "au" => Ok(LengthUnit::Bohr),
            other => Err(format!(
                "unknown length unit `{other}` (expected angstrom or bohr)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Nucleus {
    pub atomic_number: u32,
    /// Nuclear charge in a.u.; equals the atomic number.
    pub charge: f64,
    /// Position in bohr.
    pub position: [f64; 3],
}

impl Nucleus {
    pub fn new(atomic_number: u32, position: [f64; 3]) -> Self {
        Nucleus {
            atomic_number,
            charge: atomic_number as f64,
            position,
        }
    }
}

/// A two-electron molecule.
#[derive(Debug, Clone, PartialEq)]
pub struct Molecule {
    nuclei: Vec<Nucleus>,
    net_charge: i32,
}

impl Molecule {
    pub fn new(nuclei: Vec<Nucleus>, net_charge: i32) -> Result<Self, BasisError> {
        if nuclei.is_empty() {
            return Err(BasisError::NoAtoms);
        }
        if nuclei
            .iter()
            .any(|n| n.position.iter().any(|x| !x.is_finite()))
        {
            return Err(BasisError::NonFinitePosition);
        }
        let electrons =
            nuclei.iter().map(|n| n.atomic_number as i64).sum::<i64>() - net_charge as i64;
        if electrons != 2 {
            return Err(BasisError::UnsupportedElectronCount(electrons));
        }
        Ok(Molecule { nuclei, net_charge })
    }

    /// H₂ along z with bond length `r` in bohr.
    pub fn h2(r: f64) -> Result<Self, BasisError> {
        Molecule::new(
            vec![Nucleus::new(1, [0.0; 3]), Nucleus::new(1, [0.0, 0.0, r])],
            0,
        )
    }

    pub fn helium() -> Self {
        Molecule::new(vec![Nucleus::new(2, [0.0; 3])], 0).expect("He has two electrons")
    }

    pub fn nuclei(&self) -> &[Nucleus] {
        &self.nuclei
    }

    pub fn net_charge(&self) -> i32 {
        self.net_charge
    }

    pub fn electron_count(&self) -> usize {
        2
    }

    pub fn translated(&self, shift: [f64; 3]) -> Self {
        let mut out = self.clone();
        for n in &mut out.nuclei {
            for (x, d) in n.position.iter_mut().zip(shift) {
                *x += d;
            }
        }
        out
    }

    /// Parses the minimal XYZ-style input:
    ///
    /// ```text
    /// 2
    /// 0            <- net charge (further tokens ignored)
    /// H 0.0 0.0 0.0
    /// H 0.0 0.0 0.74
    /// ```
    pub fn parse_xyz(text: &str, units: LengthUnit) -> Result<Self, BasisError> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        let (ln, count_line) = lines.next().ok_or(BasisError::NoAtoms)?;
        let count: usize = count_line
            .trim()
            .parse()
            .map_err(|_| BasisError::Malformed {
                line: ln + 1,
                message: format!("expected atom count, got `{}`", count_line.trim()),
            })?;
        let (ln, charge_line) = lines.next().ok_or(BasisError::Malformed {
            line: ln + 2,
            message: "missing charge line".into(),
        })?;
        let charge: i32 = charge_line
            .split_whitespace()
            .next()
            .and_then(|t| t.trim_start_matches("charge=").parse().ok())
            .ok_or_else(|| BasisError::Malformed {
                line: ln + 1,
                message: format!("expected net charge, got `{}`", charge_line.trim()),
            })?;
        let mut nuclei = Vec::with_capacity(count);
        for (ln, line) in lines {
            let tokens: Vec<&str> = line.split_whitespace().collect();
            if tokens.len() != 4 {
                return Err(BasisError::Malformed {
                    line: ln + 1,
                    message: "expected `element x y z`".into(),
                });
            }
            let z = atomic_number(tokens[0])?;
            let mut pos = [0.0; 3];
            for (k, tok) in tokens[1..].iter().enumerate() {
                let x: f64 = tok.parse().map_err(|_| BasisError::Malformed {
                    line: ln + 1,
                    message: format!("bad coordinate `{tok}`"),
                })?;
                pos[k] = units.to_bohr(x);
            }
            nuclei.push(Nucleus::new(z, pos));
        }
        if nuclei.len() != count {
            return Err(BasisError::Malformed {
                line: 1,
                message: format!(
                    "atom count {count} does not match {} atom lines",
                    nuclei.len()
                ),
            });
        }
        Molecule::new(nuclei, charge)
    }
}

/// One Gaussian primitive `exp(-exponent r²)`.
///
/// `coefficient` multiplies the *normalized* primitive, which is how basis set
/// files state contraction coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Primitive {
    pub exponent: f64,
    pub coefficient: f64,
}

impl Primitive {
    /// `(2α/π)^{3/4}`
    pub fn norm(&self) -> f64 {
        (2.0 * self.exponent / PI).powf(0.75)
    }

    /// Coefficient of the unnormalized primitive `exp(-α r²)`.
    pub fn scaled_coefficient(&self) -> f64 {
        self.coefficient * self.norm()
    }
}

/// A contracted s shell, normalized to unit self-overlap.
#[derive(Debug, Clone, PartialEq)]
pub struct Shell {
    primitives: Vec<Primitive>,
}

impl Shell {
    /// Builds a shell and rescales its coefficients to unit self-overlap.
    pub fn new(primitives: Vec<Primitive>) -> Self {
        let mut shell = Shell { primitives };
        let norm = shell.raw_self_overlap().sqrt();
        for p in &mut shell.primitives {
            p.coefficient /= norm;
        }
        shell
    }

    pub fn primitives(&self) -> &[Primitive] {
        &self.primitives
    }

    fn raw_self_overlap(&self) -> f64 {
        let mut s = 0.0;
        for a in &self.primitives {
            for b in &self.primitives {
                let sum = a.exponent + b.exponent;
                s += a.coefficient
                    * b.coefficient
                    * (2.0 * (a.exponent * b.exponent).sqrt() / sum).powf(1.5);
            }
        }
        s
    }

    /// Value of the contracted function at squared distance `r2` from its center.
    pub fn evaluate(&self, r2: f64) -> f64 {
        self.primitives
            .iter()
            .map(|p| p.scaled_coefficient() * (-p.exponent * r2).exp())
            .sum()
    }
}

/// Per-element s-shell lists, keyed by atomic number.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BasisSet {
    elements: BTreeMap<u32, Vec<Shell>>,
}

impl BasisSet {
    pub fn shells(&self, atomic_number: u32) -> Option<&[Shell]> {
        self.elements.get(&atomic_number).map(Vec::as_slice)
    }

    pub fn elements(&self) -> impl Iterator<Item = u32> + '_ {
        self.elements.keys().copied()
    }

    /// Looks up a basis by name or file path.
    ///
    /// A name is resolved against `$TWOELEC_FIXTURES/<name>.gbs` first and the
    /// built-in STO-3G / 3-21G copies second. Anything that exists on disk is
    /// read as a file.
    pub fn load(name_or_path: &str) -> Result<Self, BasisError> {
        let as_path = Path::new(name_or_path);
        if as_path.is_file() {
            return Self::read_file(as_path);
        }
        if let Some(dir) = std::env::var_os(FIXTURE_DIR_ENV) {
            let candidate =
                PathBuf::from(dir).join(format!("{}.gbs", name_or_path.to_ascii_lowercase()));
            if candidate.is_file() {
                return Self::read_file(&candidate);
            }
        }
        match builtin_basis_text(name_or_path) {
            Some(text) => parse_basis(text),
            None => Err(BasisError::NotFound {
                name: name_or_path.to_string(),
                reason: "not a file, not in the fixture directory, and not built in".into(),
            }),
        }
    }

    fn read_file(path: &Path) -> Result<Self, BasisError> {
        let text = std::fs::read_to_string(path).map_err(|e| BasisError::NotFound {
            name: path.display().to_string(),
            reason: e.to_string(),
        })?;
        parse_basis(&text)
    }

    /// Writes the basis back out in Gaussian94 format.
    pub fn to_gaussian94(&self) -> String {
        let mut out = String::from("****\n");
        for (&z, shells) in &self.elements {
            let sym = element_symbol(z).unwrap_or("X");
            writeln!(out, "{sym}     0").unwrap();
            for shell in shells {
                writeln!(out, "S   {}   1.00", shell.primitives.len()).unwrap();
                for p in &shell.primitives {
                    writeln!(out, "  {:>24.16e}  {:>24.16e}", p.exponent, p.coefficient).unwrap();
                }
            }
            out.push_str("****\n");
        }
        out
    }
}

/// Built-in basis text for `sto-3g` and `3-21g` (H and He only).
pub fn builtin_basis_text(name: &str) -> Option<&'static str> {
    match name.to_ascii_lowercase().as_str() {
        "sto-3g" | "sto3g" => Some(include_str!("../fixtures/basis/sto-3g.gbs")),
        "3-21g" | "321g" => Some(include_str!("../fixtures/basis/3-21g.gbs")),
        _ => None,
    }
}

fn parse_number(token: &str, line: usize) -> Result<f64, BasisError> {
    token
        .replace(['D', 'd'], "E")
        .parse()
        .map_err(|_| BasisError::Malformed {
            line,
            message: format!("expected a number, got `{token}`"),
        })
}

/// Parses Gaussian94-format basis text containing only S shells.
pub fn parse_basis(text: &str) -> Result<BasisSet, BasisError> {
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('!'))
        .collect();

    let mut basis = BasisSet::default();
    let mut i = 0;
    while i < lines.len() {
        let line = lines[i].1;
        if line.starts_with("****") {
            i += 1;
            continue;
        }
        // element header: `Sym 0`
        let symbol = line.split_whitespace().next().unwrap_or_default();
        let z = atomic_number(symbol)?;
        i += 1;
        let mut shells = Vec::new();
        while i < lines.len() && !lines[i].1.starts_with("****") {
            let (ln, header) = lines[i];
            let tokens: Vec<&str> = header.split_whitespace().collect();
            if tokens.len() < 2 {
                return Err(BasisError::Malformed {
                    line: ln,
                    message: format!("bad shell header `{header}`"),
                });
            }
            let kind = tokens[0].to_ascii_uppercase();
            if kind != "S" {
                return Err(BasisError::UnsupportedShell {
                    line: ln,
                    shell: kind,
                });
            }
            let nprim: usize = tokens[1].parse().map_err(|_| BasisError::Malformed {
                line: ln,
                message: format!("bad primitive count `{}`", tokens[1]),
            })?;
            if nprim == 0 {
                return Err(BasisError::Malformed {
                    line: ln,
                    message: "shell with zero primitives".into(),
                });
            }
            let scale = match tokens.get(2) {
                Some(t) => parse_number(t, ln)?,
                None => 1.0,
            };
            let mut prims = Vec::with_capacity(nprim);
            for k in 0..nprim {
                let Some(&(pl, prim_line)) = lines.get(i + 1 + k) else {
                    return Err(BasisError::Malformed {
                        line: ln,
                        message: "truncated shell".into(),
                    });
                };
                let nums: Vec<&str> = prim_line.split_whitespace().collect();
                if nums.len() != 2 {
                    return Err(BasisError::Malformed {
                        line: pl,
                        message: "expected `exponent coefficient`".into(),
                    });
                }
                let exponent = parse_number(nums[0], pl)? * scale * scale;
                if !(exponent > 0.0) {
                    return Err(BasisError::NonPositiveExponent {
                        line: pl,
                        value: exponent,
                    });
                }
                let coefficient = parse_number(nums[1], pl)?;
                prims.push(Primitive {
                    exponent,
                    coefficient,
                });
            }
            shells.push(Shell::new(prims));
            i += 1 + nprim;
        }
        if shells.is_empty() {
            return Err(BasisError::EmptyElement {
                element: symbol.to_string(),
            });
        }
        basis.elements.insert(z, shells);
    }
    Ok(basis)
}

/// A contracted s function placed on a nucleus.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisFunction {
    pub center: usize,
    pub position: [f64; 3],
    pub shell: Shell,
}

impl BasisFunction {
    pub fn evaluate(&self, r: [f64; 3]) -> f64 {
        let r2 = (0..3).map(|k| (r[k] - self.position[k]).powi(2)).sum();
        self.shell.evaluate(r2)
    }
}

/// The one-particle space: `m` spatial orbitals ordered by atom, then shell.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitalBasis {
    functions: Vec<BasisFunction>,
}

impl OrbitalBasis {
    pub fn functions(&self) -> &[BasisFunction] {
        &self.functions
    }

    /// Number of spatial orbitals `m`.
    pub fn len(&self) -> usize {
        self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }
}

pub fn build_orbital_basis(mol: &Molecule, basis: &BasisSet) -> Result<OrbitalBasis, BasisError> {
    let mut missing: Vec<u32> = mol
        .nuclei()
        .iter()
        .map(|n| n.atomic_number)
        .filter(|z| basis.shells(*z).is_none())
        .collect();
    missing.dedup();
    if !missing.is_empty() {
        return Err(BasisError::MissingElement(missing));
    }
    let functions = mol
        .nuclei()
        .iter()
        .enumerate()
        .flat_map(|(center, n)| {
            basis
                .shells(n.atomic_number)
                .unwrap()
                .iter()
                .map(move |shell| BasisFunction {
                    center,
                    position: n.position,
                    shell: shell.clone(),
                })
        })
        .collect();
    Ok(OrbitalBasis { functions })
}
