use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use twoelec::io::{emit_results, OutputFormat, TableRow};
use twoelec::molbasis::{BasisSet, LengthUnit, Molecule, FIXTURE_DIR_ENV};
use twoelec::pipeline::{
    export_fcidump, run_from_fcidump, run_h2_scan, run_he_point, run_spin_sweep, PointConfig,
    ReferenceChoice, ScanConfig, SweepConfig,
};
use twoelec::scf::{ScfOptions, DEFAULT_GUESS_MIX};

/// Two-electron Hartree-Fock, full CI and entanglement entropy.
#[derive(Debug, Parser)]
#[command(name = "twoelec", version, about)]
struct Cli {
    /// Directory searched for `<basis>.gbs` before the built-in basis sets.
    #[arg(long, global = true, env = FIXTURE_DIR_ENV)]
    fixtures: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// H₂ dissociation scan: RHF, UHF, full CI, correlation energy and entropies.
    ScanH2(ScanArgs),
    /// Helium atom single point (reported at R = 0).
    He(HeArgs),
    /// Two-spin model entanglement as a function of separation and field.
    SpinSweep(SweepArgs),
    /// Full CI and entropies from an FCIDUMP file.
    FcidumpRun(FcidumpArgs),
    /// Write RHF molecular-orbital integrals as FCIDUMP.
    ExportFcidump(ExportArgs),
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// Output format.
    #[arg(long, default_value = "csv", value_parser = ["csv", "json"])]
    format: String,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct TargetArgs {
    /// Spatial orbital (1-based) whose 4×4 reduced density matrix is analysed.
    #[arg(long, default_value_t = 1, value_parser = one_based)]
    orbital: usize,
    /// Spin-orbital mode (1-based, interleaved ↑↓ per orbital) for the 2×2 density matrix.
    #[arg(long, default_value_t = 1, value_parser = one_based)]
    spin_mode: usize,
}

#[derive(Debug, Args)]
struct ScfArgs {
    /// HOMO/LUMO mixing angle (radians) used to break spin symmetry in the UHF guess.
    #[arg(long, default_value_t = DEFAULT_GUESS_MIX)]
    guess_mix: f64,
    /// Maximum SCF iterations.
    #[arg(long, default_value_t = 200)]
    max_iterations: usize,
}

#[derive(Debug, Args)]
struct ScanArgs {
    /// Basis set name (sto-3g, 3-21g) or Gaussian94 file.
    #[arg(long, default_value = "3-21g")]
    basis: String,
    #[arg(long, default_value_t = 0.3)]
    r_start: f64,
    #[arg(long, default_value_t = 6.0)]
    r_stop: f64,
    #[arg(long, default_value_t = 0.05)]
    r_step: f64,
    /// Units of the R grid.
    #[arg(long, default_value = "angstrom", value_parser = ["angstrom", "bohr"])]
    units: String,
    /// Orbitals defining the determinant basis.
    #[arg(long, default_value = "both", value_parser = ["rhf", "uhf", "both"])]
    reference: String,
    /// Start each UHF from the previous point's orbitals (sequential; may change which symmetry-broken solution is found).
    #[arg(long)]
    warm_start: bool,
    #[command(flatten)]
    target: TargetArgs,
    #[command(flatten)]
    scf: ScfArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct HeArgs {
    /// Basis set name (sto-3g, 3-21g) or Gaussian94 file.
    #[arg(long, default_value = "3-21g")]
    basis: String,
    /// Orbitals defining the determinant basis.
    #[arg(long, default_value = "uhf", value_parser = ["rhf", "uhf", "both"])]
    reference: String,
    #[command(flatten)]
    target: TargetArgs,
    #[command(flatten)]
    scf: ScfArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// First separation (bohr).
    #[arg(long, default_value_t = 0.1)]
    r_start: f64,
    /// Last separation (bohr).
    #[arg(long, default_value_t = 12.0)]
    r_stop: f64,
    #[arg(long, default_value_t = 0.1)]
    r_step: f64,
    /// Comma-separated field strengths (a.u.).
    #[arg(long, value_delimiter = ',', default_value = "0.05,0.1,0.2")]
    b_values: Vec<f64>,
    /// Exchange anisotropy; 1 is the Ising limit.
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct FcidumpArgs {
    /// FCIDUMP file with two electrons.
    path: PathBuf,
    #[command(flatten)]
    target: TargetArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct ExportArgs {
    /// Built-in system.
    #[arg(long, default_value = "h2", value_parser = ["h2", "he"])]
    system: String,
    /// H₂ bond length.
    #[arg(long, default_value_t = 0.74)]
    r: f64,
    /// Units of --r and of coordinates in --xyz.
    #[arg(long, default_value = "angstrom", value_parser = ["angstrom", "bohr"])]
    units: String,
    /// XYZ file (count line, charge line, `El x y z` lines) overriding --system.
    #[arg(long)]
    xyz: Option<PathBuf>,
    /// Basis set name (sto-3g, 3-21g) or Gaussian94 file.
    #[arg(long, default_value = "3-21g")]
    basis: String,
    #[command(flatten)]
    scf: ScfArgs,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn one_based(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) | Err(_) => Err(format!("expected a positive index, got {s:?}")),
        Ok(n) => Ok(n),
    }
}

fn point_config(
    basis: &str,
    reference: &str,
    target: &TargetArgs,
    scf: &ScfArgs,
) -> Result<PointConfig> {
    Ok(PointConfig {
        basis: basis.to_string(),
        reference: reference
            .parse::<ReferenceChoice>()
            .map_err(anyhow::Error::msg)?,
        spatial_orbital: target.orbital - 1,
        spin_mode: target.spin_mode - 1,
        guess_mix: scf.guess_mix,
        scf: ScfOptions {
            max_iterations: scf.max_iterations,
            ..ScfOptions::default()
        },
    })
}

fn write_output(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit<T: TableRow>(rows: &[T], output: &OutputArgs) -> Result<()> {
    let format: OutputFormat = output.format.parse().map_err(anyhow::Error::msg)?;
    write_output(output.out.as_deref(), &emit_results(rows, format)?)
}

fn run(cli: Cli) -> Result<ExitCode> {
    if let Some(dir) = &cli.fixtures {
        // read back by BasisSet::load
        std::env::set_var(FIXTURE_DIR_ENV, dir);
    }
    match cli.command {
        Command::ScanH2(a) => {
            let cfg = ScanConfig {
                point: point_config(&a.basis, &a.reference, &a.target, &a.scf)?,
                r_start: a.r_start,
                r_stop: a.r_stop,
                r_step: a.r_step,
                units: a.units.parse::<LengthUnit>().map_err(anyhow::Error::msg)?,
                warm_start: a.warm_start,
            };
            let outcome = run_h2_scan(&cfg)?;
            if !outcome.rows.is_empty() {
                emit(&outcome.rows, &a.output)?;
            }
            for f in &outcome.failures {
                eprintln!("failed: r_angstrom={} {}", f.r_angstrom, f.message);
            }
            if outcome.failures.is_empty() {
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::from(2))
            }
        }
        Command::He(a) => {
            let rows = run_he_point(&point_config(&a.basis, &a.reference, &a.target, &a.scf)?)?;
            emit(&rows, &a.output)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::SpinSweep(a) => {
            let cfg = SweepConfig {
                r_start: a.r_start,
                r_stop: a.r_stop,
                r_step: a.r_step,
                b_values: a.b_values,
                gamma: a.gamma,
            };
            emit(&run_spin_sweep(&cfg)?, &a.output)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::FcidumpRun(a) => {
            let text = fs::read_to_string(&a.path)
                .with_context(|| format!("reading {}", a.path.display()))?;
            let row = run_from_fcidump(&text, a.target.orbital - 1, a.target.spin_mode - 1)
                .with_context(|| format!("{}", a.path.display()))?;
            emit(&[row], &a.output)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::ExportFcidump(a) => {
            let units: LengthUnit = a.units.parse().map_err(anyhow::Error::msg)?;
            let mol = match (&a.xyz, a.system.as_str()) {
                (Some(path), _) => {
                    let text = fs::read_to_string(path)
                        .with_context(|| format!("reading {}", path.display()))?;
                    Molecule::parse_xyz(&text, units)?
                }
                (None, "he") => Molecule::helium(),
                (None, "h2") => Molecule::h2(units.to_bohr(a.r))?,
                (None, other) => bail!("unknown system {other}"),
            };
            let basis = BasisSet::load(&a.basis)?;
            let scf = ScfOptions {
                max_iterations: a.scf.max_iterations,
                ..ScfOptions::default()
            };
            write_output(a.out.as_deref(), &export_fcidump(&mol, &basis, &scf)?)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
