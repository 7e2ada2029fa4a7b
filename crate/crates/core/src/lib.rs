//! Two-electron quantum chemistry with an entanglement analyzer.
//!
//! The crate builds s-type Gaussian integrals for small molecules, solves
//! restricted and unrestricted Hartree-Fock, diagonalizes the full CI
//! Hamiltonian in a spin-orbital determinant basis and measures the
//! von Neumann entropy of orbital and spin-mode reduced density matrices.
//! A separate module treats two spins with XY exchange in a transverse field
//! analytically.
//!
//! ```
//! use twoelec::pipeline::{run_he_point, PointConfig};
//!
//! let rows = run_he_point(&PointConfig::default())?;
//! assert!((rows[0].e_c - 0.0149).abs() < 1e-3);
//! # Ok::<(), twoelec::Error>(())
//! ```

pub mod ci;
pub mod entanglement;
pub mod integrals;
pub mod io;
pub mod linalg;
pub mod molbasis;
pub mod pipeline;
pub mod scf;
pub mod spinmodel;

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/introduction.md")]
mod book_introduction {}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/integrals.md")]
mod book_integrals {}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/hartree-fock.md")]
mod book_hartree_fock {}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/full-ci.md")]
mod book_full_ci {}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/entanglement.md")]
mod book_entanglement {}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/spin-model.md")]
mod book_spin_model {}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/files.md")]
mod book_files {}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/cli.md")]
mod book_cli {}

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Basis(#[from] molbasis::BasisError),
    #[error(transparent)]
    Integral(#[from] integrals::IntegralError),
    #[error(transparent)]
    Scf(#[from] scf::ScfError),
    #[error(transparent)]
    Ci(#[from] ci::CiError),
    #[error(transparent)]
    Entanglement(#[from] entanglement::EntanglementError),
    #[error(transparent)]
    SpinModel(#[from] spinmodel::SpinModelError),
    #[error(transparent)]
    Fcidump(#[from] io::FcidumpError),
    #[error(transparent)]
    Table(#[from] io::TableError),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("unsupported system: {0}")]
    UnsupportedSystem(String),
}
