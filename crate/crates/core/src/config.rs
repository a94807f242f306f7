//! Run and scan configuration: a single JSON document with explicit unit
//! suffixes in every key. All fields are optional; the defaults reproduce
//! the built-in water single-pulse scenario (3·10¹³ W/cm², 20 fs, 20 K,
//! 0-5 ps grid at 5 fs).

use serde::{Deserialize, Serialize};
use std::path::PathBuf;

use crate::dynamics::{PulseSequence, TimeGrid};
use crate::ensemble::ThermalSpec;
use crate::error::{Error, Result};
use crate::interaction::PulseSpec;
use crate::rotor::MolecularSpec;

pub const DEFAULT_JMAX: i32 = 12;
pub const DEFAULT_CONVERGENCE_TOL: f64 = 1e-4;

/// Which isomer ensembles to simulate and emit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Species {
    Para,
    Ortho,
    Both,
}

impl Species {
    pub fn includes_para(&self) -> bool {
        matches!(self, Species::Para | Species::Both)
    }

    pub fn includes_ortho(&self) -> bool {
        matches!(self, Species::Ortho | Species::Both)
    }
}

impl std::str::FromStr for Species {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "para" => Ok(Species::Para),
            "ortho" => Ok(Species::Ortho),
            "both" => Ok(Species::Both),
            other => Err(format!("unknown species `{other}` (expected para|ortho|both)")),
        }
    }
}

/// Delay-scan objective.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanObjective {
    /// E_ortho(after 2nd pulse) - E_ortho(before 2nd pulse); minimized.
    OrthoEnergySuppression,
    /// max_t |⟨cos²θ⟩_para - ⟨cos²θ⟩_ortho| after the 2nd pulse; maximized.
    AlignmentContrast,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub t_start_ps: f64,
    pub t_end_ps: f64,
    pub dt_ps: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            t_start_ps: 0.0,
            t_end_ps: 5.0,
            dt_ps: 0.005,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MoleculeConfig {
    i_a_kgm2: f64,
    i_b_kgm2: f64,
    i_c_kgm2: f64,
    alpha_aa_a3: f64,
    alpha_bb_a3: f64,
    alpha_cc_a3: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PulseConfig {
    intensity_w_cm2: f64,
    sigma_fs: f64,
    t0_ps: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScanSection {
    delay_min_ps: f64,
    delay_max_ps: f64,
    delay_step_ps: f64,
    objective: ScanObjective,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    molecule: Option<MoleculeConfig>,
    temperature_k: Option<f64>,
    jmax: Option<i32>,
    converge: Option<bool>,
    convergence_tol: Option<f64>,
    pulses: Option<Vec<PulseConfig>>,
    grid: Option<GridConfig>,
    species: Option<Species>,
    output_path: Option<PathBuf>,
    scan: Option<ScanSection>,
}

/// Fully validated single-run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub molecule: MolecularSpec,
    pub thermal: ThermalSpec,
    pub converge: bool,
    pub pulses: PulseSequence,
    pub grid: TimeGrid,
    pub species: Species,
    pub output_path: PathBuf,
}

/// Two-pulse delay scan around a single base pulse.
#[derive(Debug, Clone)]
pub struct ScanConfig {
    pub base: RunConfig,
    pub delay_min_ps: f64,
    pub delay_max_ps: f64,
    pub delay_step_ps: f64,
    pub objective: ScanObjective,
}

#[derive(Debug, Clone)]
pub enum Config {
    Run(RunConfig),
    Scan(ScanConfig),
}

/// Default pulse: the built-in single-pulse scenario.
pub fn default_pulse() -> PulseSpec {
    PulseSpec {
        peak_intensity_w_cm2: 3e13,
        sigma_fs: 20.0,
        t0_ps: 0.0,
    }
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            molecule: MolecularSpec::water(),
            thermal: ThermalSpec {
                temperature_k: 20.0,
                j_max: DEFAULT_JMAX,
                convergence_tol: DEFAULT_CONVERGENCE_TOL,
            },
            converge: false,
            pulses: PulseSequence::new(vec![default_pulse()]).expect("default pulse valid"),
            grid: TimeGrid {
                t_start_ps: 0.0,
                t_end_ps: 5.0,
                dt_ps: 0.005,
            },
            species: Species::Both,
            output_path: PathBuf::from("trace.csv"),
        }
    }
}

/// Parse and validate a JSON config document into a run or scan config.
pub fn parse_config(text: &str) -> Result<Config> {
    let raw: RawConfig = serde_json::from_str(text)?;

    let molecule = match raw.molecule {
        Some(mc) => MolecularSpec {
            i_a: mc.i_a_kgm2,
            i_b: mc.i_b_kgm2,
            i_c: mc.i_c_kgm2,
            alpha_aa: mc.alpha_aa_a3,
            alpha_bb: mc.alpha_bb_a3,
            alpha_cc: mc.alpha_cc_a3,
        },
        None => MolecularSpec::water(),
    };
    molecule.validate()?;

    let thermal = ThermalSpec {
        temperature_k: raw.temperature_k.unwrap_or(20.0),
        j_max: raw.jmax.unwrap_or(DEFAULT_JMAX),
        convergence_tol: raw.convergence_tol.unwrap_or(DEFAULT_CONVERGENCE_TOL),
    };
    thermal.validate()?;

    let grid_cfg = raw.grid.unwrap_or_default();
    let grid = TimeGrid {
        t_start_ps: grid_cfg.t_start_ps,
        t_end_ps: grid_cfg.t_end_ps,
        dt_ps: grid_cfg.dt_ps,
    };
    grid.validate()?;

    let pulse_specs: Vec<PulseSpec> = match raw.pulses {
        Some(pcs) => pcs
            .into_iter()
            .map(|p| PulseSpec {
                peak_intensity_w_cm2: p.intensity_w_cm2,
                sigma_fs: p.sigma_fs,
                t0_ps: p.t0_ps,
            })
            .collect(),
        None => vec![default_pulse()],
    };
    for p in &pulse_specs {
        if p.t0_ps < grid.t_start_ps || p.t0_ps > grid.t_end_ps {
            return Err(Error::Config {
                field: "pulses.t0_ps".into(),
                reason: format!(
                    "pulse at {} ps lies outside the grid [{}, {}] ps",
                    p.t0_ps, grid.t_start_ps, grid.t_end_ps
                ),
            });
        }
    }
    let pulses = PulseSequence::new(pulse_specs)?;

    let base = RunConfig {
        molecule,
        thermal,
        converge: raw.converge.unwrap_or(false),
        pulses,
        grid,
        species: raw.species.unwrap_or(Species::Both),
        output_path: raw.output_path.unwrap_or_else(|| PathBuf::from("trace.csv")),
    };

    match raw.scan {
        None => Ok(Config::Run(base)),
        Some(scan) => {
            if base.pulses.pulses().len() != 1 {
                return Err(Error::Config {
                    field: "pulses".into(),
                    reason: format!(
                        "a scan needs exactly one base pulse, got {}",
                        base.pulses.pulses().len()
                    ),
                });
            }
            if scan.delay_min_ps <= 0.0 {
                return Err(Error::Config {
                    field: "scan.delay_min_ps".into(),
                    reason: format!("must be > 0, got {}", scan.delay_min_ps),
                });
            }
            if scan.delay_step_ps <= 0.0 {
                return Err(Error::Config {
                    field: "scan.delay_step_ps".into(),
                    reason: format!("must be > 0, got {}", scan.delay_step_ps),
                });
            }
            if scan.delay_max_ps < scan.delay_min_ps {
                return Err(Error::Config {
                    field: "scan.delay_max_ps".into(),
                    reason: "must be ≥ delay_min_ps".into(),
                });
            }
            Ok(Config::Scan(ScanConfig {
                base,
                delay_min_ps: scan.delay_min_ps,
                delay_max_ps: scan.delay_max_ps,
                delay_step_ps: scan.delay_step_ps,
                objective: scan.objective,
            }))
        }
    }
}
