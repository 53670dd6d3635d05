//! Run configuration: an optional JSON file, overridden field by field by flags.

use std::fs;
use std::path::{Path, PathBuf};

use kitaev_core::{Boundary, CouplingParams};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Relative output paths are resolved under this directory when it is set.
pub const OUT_DIR_ENV: &str = "KITAEV_OUT_DIR";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LatticeConfig {
    pub lx: usize,
    pub ly: usize,
    pub boundary: Boundary,
}

impl Default for LatticeConfig {
    fn default() -> Self {
        Self { lx: 2, ly: 2, boundary: Boundary::Torus }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectrumConfig {
    pub k: usize,
    /// `±1` per plaquette; selects the sector solver when present.
    pub flux: Option<Vec<i8>>,
    pub tol: f64,
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        Self { k: 4, flux: None, tol: 1e-10 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhaseDiagramConfig {
    pub step: f64,
    /// Torus extent used for the gap column.
    pub size: usize,
}

impl Default for PhaseDiagramConfig {
    fn default() -> Self {
        Self { step: 0.05, size: 8 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GapSweepConfig {
    pub sizes: Vec<usize>,
}

impl Default for GapSweepConfig {
    fn default() -> Self {
        Self { sizes: vec![4, 5, 7, 8, 10, 11, 13, 14] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BraidConfig {
    pub loops: Vec<usize>,
    /// Hexagon hosting the loop; the middle plaquette when absent.
    pub plaquette: Option<usize>,
    pub discriminate: bool,
    pub readout_angle: Option<f64>,
    pub phase_tolerance: f64,
    pub min_coherence: f64,
}

impl Default for BraidConfig {
    fn default() -> Self {
        Self {
            loops: vec![1],
            plaquette: None,
            discriminate: false,
            readout_angle: None,
            phase_tolerance: 0.2,
            min_coherence: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub lattice: LatticeConfig,
    pub couplings: CouplingParams,
    pub seed: u64,
    pub output: Option<PathBuf>,
    pub spectrum: SpectrumConfig,
    pub phase_diagram: PhaseDiagramConfig,
    pub gap_sweep: GapSweepConfig,
    pub braid: BraidConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            lattice: LatticeConfig::default(),
            couplings: CouplingParams::new(1.0, 1.0, 1.0),
            seed: 1,
            output: None,
            spectrum: SpectrumConfig::default(),
            phase_diagram: PhaseDiagramConfig::default(),
            gap_sweep: GapSweepConfig::default(),
            braid: BraidConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))
    }

    /// Output path with the output-directory override applied.
    pub fn resolved_output(&self) -> Option<PathBuf> {
        let out = self.output.as_ref()?;
        if out.is_relative() {
            if let Some(dir) = std::env::var_os(OUT_DIR_ENV) {
                return Some(PathBuf::from(dir).join(out));
            }
        }
        Some(out.clone())
    }
}

/// Parses `LXxLY`, e.g. `3x3`.
pub fn parse_extents(text: &str) -> Result<(usize, usize), String> {
    let (a, b) = text.split_once(['x', 'X']).ok_or_else(|| format!("expected LXxLY, got '{text}'"))?;
    let parse = |s: &str| s.trim().parse::<usize>().map_err(|e| format!("bad extent '{s}': {e}"));
    Ok((parse(a)?, parse(b)?))
}

/// Parses a flux pattern written as `+-+-` or `1,-1,1,-1`.
pub fn parse_flux(text: &str) -> Result<Vec<i8>, String> {
    let text = text.trim();
    if text.contains(',') {
        return text
            .split(',')
            .map(|t| match t.trim() {
                "1" | "+1" => Ok(1),
                "-1" => Ok(-1),
                other => Err(format!("flux entries must be 1 or -1, got '{other}'")),
            })
            .collect();
    }
    text.chars()
        .map(|c| match c {
            '+' => Ok(1),
            '-' => Ok(-1),
            other => Err(format!("flux characters must be '+' or '-', got '{other}'")),
        })
        .collect()
}
