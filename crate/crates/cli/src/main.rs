//! `kitaev`: command-line driver for the honeycomb model laboratory.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, CommandFactory, Parser, Subcommand};
use kitaev_core::Boundary;

use crate::config::{parse_extents, parse_flux, RunConfig};
use crate::error::CliError;

#[derive(Parser)]
#[command(name = "kitaev", version, about = "Kitaev honeycomb model laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Options shared by every subcommand. Flags override the config file.
#[derive(Args, Debug, Clone)]
struct Common {
    /// JSON run configuration
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    lx: Option<usize>,
    #[arg(long, global = true)]
    ly: Option<usize>,
    /// Extents as LXxLY, e.g. 3x3
    #[arg(long, global = true, value_parser = parse_extents)]
    lattice: Option<(usize, usize)>,
    /// Boundary condition: torus or open
    #[arg(long = "bc", global = true)]
    boundary: Option<Boundary>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    jx: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    jy: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    jz: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    hx: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    hy: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    hz: Option<f64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file; stdout when absent. A manifest is written beside it.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Dump sites, bonds and plaquettes as JSON
    LatticeInfo {
        #[command(flatten)]
        common: Common,
    },
    /// Lowest eigenpairs by exact diagonalization
    Spectrum {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        k: Option<usize>,
        /// Flux sector as +-+- or 1,-1,1,-1 (one entry per plaquette)
        #[arg(long, allow_hyphen_values = true)]
        flux: Option<String>,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// A/B classification and vortex-free gap on the simplex Jx + Jy + Jz = 1 (CSV)
    PhaseDiagram {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        step: Option<f64>,
        /// Torus extent for the gap column
        #[arg(long)]
        size: Option<usize>,
    },
    /// Vortex-free single-particle gap against torus size (CSV)
    GapSweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',')]
        sizes: Option<Vec<usize>>,
    },
    /// Ancilla interferometry with a loop around one hexagon
    Braid {
        #[command(flatten)]
        common: Common,
        /// Loop count; repeat or separate with commas for several runs
        #[arg(long, value_delimiter = ',')]
        loops: Option<Vec<usize>>,
        #[arg(long)]
        plaquette: Option<usize>,
        /// Classify the statistics from the 1- and 2-loop runs
        #[arg(long)]
        discriminate: bool,
        /// Report the readout probability along this ancilla angle
        #[arg(long, allow_negative_numbers = true)]
        readout: Option<f64>,
        #[arg(long)]
        phase_tolerance: Option<f64>,
    },
}

impl Common {
    fn apply(&self, cfg: &mut RunConfig) {
        if let Some((lx, ly)) = self.lattice {
            cfg.lattice.lx = lx;
            cfg.lattice.ly = ly;
        }
        set(&mut cfg.lattice.lx, self.lx);
        set(&mut cfg.lattice.ly, self.ly);
        set(&mut cfg.lattice.boundary, self.boundary);
        set(&mut cfg.couplings.jx, self.jx);
        set(&mut cfg.couplings.jy, self.jy);
        set(&mut cfg.couplings.jz, self.jz);
        set(&mut cfg.couplings.hx, self.hx);
        set(&mut cfg.couplings.hy, self.hy);
        set(&mut cfg.couplings.hz, self.hz);
        set(&mut cfg.seed, self.seed);
        if self.output.is_some() {
            cfg.output = self.output.clone();
        }
    }
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let start = Instant::now();
    let common = match &cli.command {
        Command::LatticeInfo { common }
        | Command::Spectrum { common, .. }
        | Command::PhaseDiagram { common, .. }
        | Command::GapSweep { common, .. }
        | Command::Braid { common, .. } => common,
    };
    let mut cfg = RunConfig::load(common.config.as_deref())?;
    common.apply(&mut cfg);
    cfg.couplings.validate()?;

    let (name, rendered) = match cli.command {
        Command::LatticeInfo { .. } => ("lattice-info", commands::lattice_info(&cfg)?),
        Command::Spectrum { k, flux, tol, .. } => {
            set(&mut cfg.spectrum.k, k);
            set(&mut cfg.spectrum.tol, tol);
            if let Some(text) = flux {
                cfg.spectrum.flux = Some(parse_flux(&text).map_err(CliError::Usage)?);
            }
            ("spectrum", commands::spectrum(&cfg)?)
        }
        Command::PhaseDiagram { step, size, .. } => {
            set(&mut cfg.phase_diagram.step, step);
            set(&mut cfg.phase_diagram.size, size);
            ("phase-diagram", commands::phase_diagram_csv(&cfg)?)
        }
        Command::GapSweep { sizes, .. } => {
            set(&mut cfg.gap_sweep.sizes, sizes);
            ("gap-sweep", commands::gap_sweep(&cfg)?)
        }
        Command::Braid { loops, plaquette, discriminate, readout, phase_tolerance, .. } => {
            set(&mut cfg.braid.loops, loops);
            set(&mut cfg.braid.phase_tolerance, phase_tolerance);
            if plaquette.is_some() {
                cfg.braid.plaquette = plaquette;
            }
            if readout.is_some() {
                cfg.braid.readout_angle = readout;
            }
            cfg.braid.discriminate |= discriminate;
            ("braid", commands::braid(&cfg)?)
        }
    };
    let written = output::emit(name, &cfg, &rendered.body, start.elapsed())?;
    if let Some(table) = rendered.table {
        if written.is_some() {
            print!("{table}");
        } else {
            eprint!("{table}");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            if !e.use_stderr() {
                return ExitCode::SUCCESS;
            }
            if !e.to_string().contains("Usage:") {
                eprintln!("\n{}", Cli::command().render_usage());
            }
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
