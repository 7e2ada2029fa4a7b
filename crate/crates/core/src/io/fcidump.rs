//! FCIDUMP integral files.
//!
//! A Fortran namelist header (`&FCI NORB=…,NELEC=…,MS2=…,ORBSYM=…,ISYM=… &END`)
//! is followed by `value i j k l` records with 1-based orbital indices:
//! `(ij|kl)` when all four are nonzero, `h_ij` when `k = l = 0` and the
//! nuclear repulsion when all are zero.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use thiserror::Error;

use crate::integrals::{EriTensor, IntegralSet};

/// Values smaller than this are not written.
const WRITE_THRESHOLD: f64 = 1e-15;

#[derive(Debug, Error, PartialEq)]
pub enum FcidumpError {
    #[error("missing &FCI header")]
    MissingHeader,
    #[error("header is not terminated by &END or /")]
    UnterminatedHeader,
    #[error("header: {0}")]
    BadHeader(String),
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: index {index} outside 1..={norb}")]
    IndexOutOfRange {
        line: usize,
        index: usize,
        norb: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FcidumpHeader {
    pub norb: usize,
    pub nelec: usize,
    pub ms2: i32,
    pub orbsym: Vec<u32>,
    pub isym: u32,
}

impl FcidumpHeader {
    /// Singlet header with all orbitals in the totally symmetric irrep.
    pub fn singlet(norb: usize, nelec: usize) -> Self {
        FcidumpHeader {
            norb,
            nelec,
            ms2: 0,
            orbsym: vec![1; norb],
            isym: 1,
        }
    }
}

fn record(out: &mut String, value: f64, i: usize, j: usize, k: usize, l: usize) {
    writeln!(out, "{value:>24.16e} {i:>3} {j:>3} {k:>3} {l:>3}").unwrap();
}

/// Writes symmetry-unique integrals: `(ij|kl)` with `i ≥ j`, `k ≥ l`,
/// `ij ≥ kl`, then `h_ij` with `i ≥ j`, then the nuclear repulsion.
pub fn write_fcidump(ints: &IntegralSet, header: &FcidumpHeader) -> String {
    let m = ints.n_orbitals();
    let mut out = String::new();
    writeln!(
        out,
        " &FCI NORB={},NELEC={},MS2={},",
        m, header.nelec, header.ms2
    )
    .unwrap();
    let syms: Vec<String> = header.orbsym.iter().map(u32::to_string).collect();
    writeln!(out, "  ORBSYM={},", syms.join(",")).unwrap();
    writeln!(out, "  ISYM={},", header.isym).unwrap();
    writeln!(out, " &END").unwrap();
    for i in 0..m {
        for j in 0..=i {
            let ij = i * (i + 1) / 2 + j;
            for k in 0..m {
                for l in 0..=k {
                    if k * (k + 1) / 2 + l > ij {
                        continue;
                    }
                    let v = ints.eri.get(i, j, k, l);
                    if v.abs() >= WRITE_THRESHOLD {
                        record(&mut out, v, i + 1, j + 1, k + 1, l + 1);
                    }
                }
            }
        }
    }
    for i in 0..m {
        for j in 0..=i {
            let v = ints.core_hamiltonian[(i, j)];
            if v.abs() >= WRITE_THRESHOLD {
                record(&mut out, v, i + 1, j + 1, 0, 0);
            }
        }
    }
    record(&mut out, ints.nuclear_repulsion, 0, 0, 0, 0);
    out
}

fn parse_header(text: &str) -> Result<FcidumpHeader, FcidumpError> {
    let mut values: Vec<(String, Vec<String>)> = Vec::new();
    for token in text.split(',') {
        let token = token.trim();
        if token.is_empty() {
            continue;
        }
        match token.split_once('=') {
            Some((key, value)) => values.push((
                key.trim().to_ascii_uppercase(),
                vec![value.trim().to_string()],
            )),
            None => match values.last_mut() {
                Some((_, v)) => v.push(token.to_string()),
                None => return Err(FcidumpError::BadHeader(format!("stray value {token:?}"))),
            },
        }
    }
    let get = |key: &str| values.iter().find(|(k, _)| k == key).map(|(_, v)| v);
    fn int<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, FcidumpError> {
        v.parse()
            .map_err(|_| FcidumpError::BadHeader(format!("{key}={v:?} is not an integer")))
    }
    let norb: usize = match get("NORB") {
        Some(v) => int("NORB", &v[0])?,
        None => return Err(FcidumpError::BadHeader("NORB missing".into())),
    };
    let nelec: usize = match get("NELEC") {
        Some(v) => int("NELEC", &v[0])?,
        None => return Err(FcidumpError::BadHeader("NELEC missing".into())),
    };
    let ms2 = get("MS2")
        .map(|v| int("MS2", &v[0]))
        .transpose()?
        .unwrap_or(0);
    let isym = get("ISYM")
        .map(|v| int("ISYM", &v[0]))
        .transpose()?
        .unwrap_or(1);
    let orbsym = match get("ORBSYM") {
        Some(v) => v
            .iter()
            .filter(|s| !s.is_empty())
            .map(|s| int("ORBSYM", s))
            .collect::<Result<Vec<u32>, _>>()?,
        None => vec![1; norb],
    };
    Ok(FcidumpHeader {
        norb,
        nelec,
        ms2,
        orbsym,
        isym,
    })
}

/// Reads an FCIDUMP file; absent integrals are zero. The returned overlap is
/// the identity.
pub fn read_fcidump(text: &str) -> Result<(IntegralSet, FcidumpHeader), FcidumpError> {
    let lines: Vec<&str> = text.lines().collect();
    let start = lines
        .iter()
        .position(|l| l.trim_start().to_ascii_uppercase().starts_with("&FCI"))
        .ok_or(FcidumpError::MissingHeader)?;
    let mut header_text = String::new();
    let mut body_start = None;
    for (n, line) in lines.iter().enumerate().skip(start) {
        let upper = line.to_ascii_uppercase();
        let content = if n == start {
            upper.trim_start().trim_start_matches("&FCI").to_string()
        } else {
            upper
        };
        let trimmed = content.trim();
        if let Some(pos) = trimmed
            .find("&END")
            .or_else(|| trimmed.ends_with('/').then(|| trimmed.len() - 1))
        {
            header_text.push_str(&trimmed[..pos]);
            body_start = Some(n + 1);
            break;
        }
        header_text.push_str(trimmed);
        header_text.push(',');
    }
    let body_start = body_start.ok_or(FcidumpError::UnterminatedHeader)?;
    let header = parse_header(&header_text)?;
    let m = header.norb;

    let mut h = DMatrix::zeros(m, m);
    let mut eri = EriTensor::zeros(m);
    let mut e_nuc = 0.0;
    for (n, line) in lines.iter().enumerate().skip(body_start) {
        let lineno = n + 1;
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        if fields.len() != 5 {
            return Err(FcidumpError::Malformed {
                line: lineno,
                message: format!("expected 5 fields, found {}", fields.len()),
            });
        }
        let value: f64 =
            fields[0]
                .replace(['D', 'd'], "e")
                .parse()
                .map_err(|_| FcidumpError::Malformed {
                    line: lineno,
                    message: format!("bad value {:?}", fields[0]),
                })?;
        let mut idx = [0usize; 4];
        for (slot, f) in idx.iter_mut().zip(&fields[1..]) {
            *slot = f.parse().map_err(|_| FcidumpError::Malformed {
                line: lineno,
                message: format!("bad index {f:?}"),
            })?;
            if *slot > m {
                return Err(FcidumpError::IndexOutOfRange {
                    line: lineno,
                    index: *slot,
                    norb: m,
                });
            }
        }
        match idx {
            [0, 0, 0, 0] => e_nuc = value,
            [i, j, 0, 0] if i > 0 && j > 0 => {
                h[(i - 1, j - 1)] = value;
                h[(j - 1, i - 1)] = value;
            }
            [i, j, k, l] if i > 0 && j > 0 && k > 0 && l > 0 => {
                eri.set_symmetric(i - 1, j - 1, k - 1, l - 1, value)
            }
            [i, j, k, l] => {
                // orbital energies and other single-index records are not used
                if !(i > 0 && j == 0 && k == 0 && l == 0) {
                    return Err(FcidumpError::Malformed {
                        line: lineno,
                        message: format!("unsupported index pattern {i} {j} {k} {l}"),
                    });
                }
            }
        }
    }
    let ints = IntegralSet {
        overlap: DMatrix::identity(m, m),
        core_hamiltonian: h,
        eri,
        nuclear_repulsion: e_nuc,
    };
    Ok((ints, header))
}
