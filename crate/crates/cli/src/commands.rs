use std::f64::consts::PI;

use kitaev_core::braid::{
    run_protocol_from_state, statistics_discriminator, wrap_phase, BraidReport, DiscriminatorOptions, ProtocolGeometry,
};
use kitaev_core::majorana::{bulk_gap_estimate, classify_phase, phase_diagram};
use kitaev_core::spin_ed::{
    build_hamiltonian, lowest_eigenpairs, multiplets, resolved_ground, sector_ground, EigenOptions, SectorMethod,
    SolverMethod,
};
use kitaev_core::{build_lattice, Boundary, CouplingParams, HoneycombLattice};
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{fmt_float, to_csv, to_json};

/// Relative tolerance used to group eigenvalues into multiplets.
const MULTIPLET_TOL: f64 = 1e-6;

/// Predicted interferometric phase for one loop; two loops are predicted to
/// leave the ancilla as one Abelian exchange would (phase π).
pub const PREDICTED_ONE_LOOP: f64 = -PI / 2.0;
pub const PREDICTED_TWO_LOOPS: f64 = PI;

pub struct Rendered {
    pub body: String,
    /// Human-readable summary, printed alongside the main output.
    pub table: Option<String>,
}

fn lattice_of(cfg: &RunConfig) -> Result<HoneycombLattice, CliError> {
    Ok(build_lattice(cfg.lattice.lx, cfg.lattice.ly, cfg.lattice.boundary)?)
}

fn eigen_options(cfg: &RunConfig) -> EigenOptions {
    EigenOptions { tol: cfg.spectrum.tol, seed: cfg.seed, ..EigenOptions::default() }
}

#[derive(Serialize)]
struct LatticeSummary {
    lx: usize,
    ly: usize,
    boundary: Boundary,
    n_sites: usize,
    n_plaquettes: usize,
}

impl LatticeSummary {
    fn of(lat: &HoneycombLattice) -> Self {
        Self {
            lx: lat.lx,
            ly: lat.ly,
            boundary: lat.boundary,
            n_sites: lat.n_sites(),
            n_plaquettes: lat.n_plaquettes(),
        }
    }
}

pub fn lattice_info(cfg: &RunConfig) -> Result<Rendered, CliError> {
    let lat = lattice_of(cfg)?;
    Ok(Rendered { body: to_json(&lat), table: None })
}

#[derive(Serialize)]
struct Multiplet {
    energy: f64,
    multiplicity: usize,
    spread: f64,
}

#[derive(Serialize)]
struct SpectrumOutput {
    lattice: LatticeSummary,
    couplings: CouplingParams,
    k: usize,
    flux: Option<Vec<i8>>,
    method: SolverMethod,
    eigenvalues: Vec<f64>,
    residuals: Vec<f64>,
    multiplets: Vec<Multiplet>,
    /// `⟨W_p⟩` of the lowest state; present for sector runs.
    plaquette_expectations: Option<Vec<f64>>,
}

pub fn spectrum(cfg: &RunConfig) -> Result<Rendered, CliError> {
    let lat = lattice_of(cfg)?;
    let h = build_hamiltonian(&lat, &cfg.couplings)?;
    let opts = eigen_options(cfg);
    let k = cfg.spectrum.k;
    let (eigenvalues, residuals, method, wp) = match &cfg.spectrum.flux {
        Some(flux) => {
            let r = sector_ground(&lat, &h, flux, k, SectorMethod::Reduced, &opts)?;
            (r.energies, r.residuals, r.solver, Some(r.profile.values))
        }
        None => {
            let r = lowest_eigenpairs(&h, k, &opts, None)?;
            (r.eigenvalues, r.residuals, r.method, None)
        }
    };
    let out = SpectrumOutput {
        lattice: LatticeSummary::of(&lat),
        couplings: cfg.couplings,
        k,
        flux: cfg.spectrum.flux.clone(),
        method,
        multiplets: multiplets(&eigenvalues, MULTIPLET_TOL)
            .into_iter()
            .map(|(energy, multiplicity, spread)| Multiplet { energy, multiplicity, spread })
            .collect(),
        eigenvalues,
        residuals,
        plaquette_expectations: wp,
    };
    Ok(Rendered { body: to_json(&out), table: None })
}

pub fn phase_diagram_csv(cfg: &RunConfig) -> Result<Rendered, CliError> {
    let rows = phase_diagram(cfg.phase_diagram.step, cfg.phase_diagram.size)?;
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|r| vec![fmt_float(r.jx), fmt_float(r.jy), fmt_float(r.jz), r.phase.to_string(), fmt_float(r.gap)])
        .collect();
    Ok(Rendered { body: to_csv(&["jx", "jy", "jz", "phase", "gap"], &cells)?, table: None })
}

pub fn gap_sweep(cfg: &RunConfig) -> Result<Rendered, CliError> {
    let p = cfg.couplings;
    let phase = classify_phase(&p).to_string();
    let gaps = bulk_gap_estimate(&p, &cfg.gap_sweep.sizes)?;
    let cells: Vec<Vec<String>> = gaps
        .iter()
        .map(|(l, g)| {
            vec![
                l.to_string(),
                fmt_float(p.jx),
                fmt_float(p.jy),
                fmt_float(p.jz),
                phase.clone(),
                fmt_float(*g),
            ]
        })
        .collect();
    Ok(Rendered { body: to_csv(&["size", "jx", "jy", "jz", "phase", "gap"], &cells)?, table: None })
}

#[derive(Serialize)]
struct Comparison {
    loops: usize,
    phase: f64,
    abs_phase: f64,
    coherence: f64,
    predicted_phase: Option<f64>,
    /// `CONFIRMED` when `|phase|` matches the predicted magnitude within the
    /// phase tolerance, `DEVIATION` otherwise.
    verdict: Option<&'static str>,
}

#[derive(Serialize)]
struct Discrimination {
    statistics: Option<String>,
    inconclusive: Option<String>,
}

#[derive(Serialize)]
struct BraidOutput {
    lattice: LatticeSummary,
    couplings: CouplingParams,
    geometry: ProtocolGeometry,
    ground_energy: f64,
    holonomy: Option<[i8; 2]>,
    comparisons: Vec<Comparison>,
    discrimination: Option<Discrimination>,
    reports: Vec<BraidReport>,
}

pub fn predicted_phase(loops: usize) -> Option<f64> {
    match loops {
        0 => Some(0.0),
        1 => Some(PREDICTED_ONE_LOOP),
        2 => Some(PREDICTED_TWO_LOOPS),
        _ => None,
    }
}

/// Compares magnitudes, since the sign depends on orientation conventions.
pub fn verdict(phase: f64, predicted: f64, tol: f64) -> &'static str {
    if (phase.abs() - wrap_phase(predicted).abs()).abs() <= tol {
        "CONFIRMED"
    } else {
        "DEVIATION"
    }
}

pub fn braid(cfg: &RunConfig) -> Result<Rendered, CliError> {
    let lat = lattice_of(cfg)?;
    let bc = &cfg.braid;
    if bc.loops.is_empty() {
        return Err(CliError::Usage("at least one loop count is required".into()));
    }
    let q = bc.plaquette.unwrap_or(lat.n_plaquettes() / 2);
    let geometry = ProtocolGeometry::new(&lat, q)?;
    let opts = eigen_options(cfg);
    let h = build_hamiltonian(&lat, &cfg.couplings)?;
    let gs = resolved_ground(&lat, &h, &vec![1; lat.n_plaquettes()], &opts)?;

    let mut reports = Vec::new();
    for &n in &bc.loops {
        reports.push(run_protocol_from_state(&lat, &gs.state, &geometry.script(n, bc.readout_angle))?);
    }
    let comparisons: Vec<Comparison> = reports
        .iter()
        .map(|r| {
            let predicted = predicted_phase(r.loops);
            Comparison {
                loops: r.loops,
                phase: r.phase,
                abs_phase: r.abs_phase,
                coherence: r.coherence,
                predicted_phase: predicted,
                verdict: predicted.map(|p| verdict(r.phase, p, bc.phase_tolerance)),
            }
        })
        .collect();
    let discrimination = bc.discriminate.then(|| {
        let d_opts = DiscriminatorOptions { phase_tolerance: bc.phase_tolerance, min_coherence: bc.min_coherence };
        match statistics_discriminator(&reports, &d_opts) {
            Ok(s) => Discrimination { statistics: Some(s.to_string()), inconclusive: None },
            Err(e) => Discrimination { statistics: None, inconclusive: Some(e.to_string()) },
        }
    });

    let mut table = String::from("loops  phase              |phase|            coherence          predicted          verdict\n");
    for c in &comparisons {
        table.push_str(&format!(
            "{:<6} {:<18} {:<18} {:<18} {:<18} {}\n",
            c.loops,
            fmt_float(c.phase),
            fmt_float(c.abs_phase),
            fmt_float(c.coherence),
            c.predicted_phase.map_or("-".to_string(), fmt_float),
            c.verdict.unwrap_or("-"),
        ));
    }
    for r in &reports {
        for note in &r.notes {
            table.push_str(&format!("note ({} loops): {note}\n", r.loops));
        }
    }
    if let Some(d) = &discrimination {
        match (&d.statistics, &d.inconclusive) {
            (Some(s), _) => table.push_str(&format!("statistics: {s}\n")),
            (_, Some(why)) => table.push_str(&format!("statistics: inconclusive ({why})\n")),
            _ => {}
        }
    }

    let out = BraidOutput {
        lattice: LatticeSummary::of(&lat),
        couplings: cfg.couplings,
        geometry,
        ground_energy: gs.energy,
        holonomy: gs.holonomy,
        comparisons,
        discrimination,
        reports,
    };
    Ok(Rendered { body: to_json(&out), table: Some(table) })
}
