//! Scenario execution: single runs, two-pulse delay scans, CSV emission
//! and the machine-readable summary written beside each CSV.

use serde::Serialize;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::config::{RunConfig, ScanConfig, ScanObjective};
use crate::dynamics::{sequence_events, KickEvent, TimeGrid};
use crate::ensemble::{
    boltzmann_weights, build_engines, converge_jmax, fold_members, thermal_trace,
    thermal_trace_with_engines, AlignmentTrace, IsomerTrace,
};
use crate::error::{Error, Result};
use crate::interaction::KickCoefficients;
use crate::rotor::{build_eigentable, EigenstateTable, SpinIsomer};

/// Extrema and energy bookkeeping of one isomer trace.
#[derive(Debug, Clone, Serialize)]
pub struct IsomerSummary {
    pub max_cos2: f64,
    pub t_of_max_ps: f64,
    pub min_cos2: f64,
    pub t_of_min_ps: f64,
    pub initial_energy_cm1: f64,
    pub final_energy_cm1: f64,
}

impl IsomerSummary {
    fn from_trace(times: &[f64], trace: &IsomerTrace) -> Self {
        let (mut max_i, mut min_i) = (0, 0);
        for (i, &v) in trace.cos2.iter().enumerate() {
            if v > trace.cos2[max_i] {
                max_i = i;
            }
            if v < trace.cos2[min_i] {
                min_i = i;
            }
        }
        IsomerSummary {
            max_cos2: trace.cos2[max_i],
            t_of_max_ps: times[max_i],
            min_cos2: trace.cos2[min_i],
            t_of_min_ps: times[min_i],
            initial_energy_cm1: trace.energy_cm1[0],
            final_energy_cm1: *trace.energy_cm1.last().expect("nonempty trace"),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub jmax_used: i32,
    pub converged: bool,
    pub temperature_k: f64,
    pub kick_strengths: Vec<KickCoefficients>,
    pub warnings: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub para: Option<IsomerSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ortho: Option<IsomerSummary>,
}

/// Run one configured scenario: eigentable (with optional J_max
/// convergence), per-species thermal ensembles and traces.
pub fn simulate(config: &RunConfig) -> Result<(AlignmentTrace, RunSummary)> {
    let times = config.grid.times();
    let (jmax_used, table, para, ortho) = if config.converge {
        let (jmax, table, para, ortho) = converge_jmax(
            &config.molecule,
            &config.pulses,
            &config.grid,
            &config.thermal,
            config.thermal.j_max.min(12).max(4),
        )?;
        (jmax, table, Some(para), Some(ortho))
    } else {
        let table = build_eigentable(&config.molecule, config.thermal.j_max)?;
        let run = |isomer: SpinIsomer| -> Result<IsomerTrace> {
            let ens = boltzmann_weights(&table, isomer, &config.thermal)?;
            thermal_trace(&ens, &config.pulses, &config.grid, &table, &config.molecule)
        };
        let para = if config.species.includes_para() {
            Some(run(SpinIsomer::Para)?)
        } else {
            None
        };
        let ortho = if config.species.includes_ortho() {
            Some(run(SpinIsomer::Ortho)?)
        } else {
            None
        };
        (config.thermal.j_max, table, para, ortho)
    };

    let para = para.filter(|_| config.species.includes_para());
    let ortho = ortho.filter(|_| config.species.includes_ortho());

    let warnings: Vec<String> = config
        .pulses
        .pulses()
        .iter()
        .filter_map(|p| p.impulsive_warning(&table))
        .collect();
    let (betas, _) = sequence_events(&config.pulses, &config.molecule);

    let summary = RunSummary {
        jmax_used,
        converged: config.converge,
        temperature_k: config.thermal.temperature_k,
        kick_strengths: betas,
        warnings,
        para: para.as_ref().map(|t| IsomerSummary::from_trace(&times, t)),
        ortho: ortho.as_ref().map(|t| IsomerSummary::from_trace(&times, t)),
    };
    Ok((
        AlignmentTrace {
            times_ps: times,
            para,
            ortho,
        },
        summary,
    ))
}

/// One scan point: delay of the second pulse and the objective value.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ScanRow {
    pub delay_ps: f64,
    pub objective_value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanResult {
    pub objective: ScanObjective,
    pub rows: Vec<ScanRow>,
    pub best_delay_ps: f64,
    pub best_objective_value: f64,
}

/// Scan the delay of a second, identical pulse over the configured range.
/// Kick operators do not depend on the delay, so the per-m engines are
/// built once and reused for every scan point.
pub fn scan_delay(config: &ScanConfig) -> Result<ScanResult> {
    let base = &config.base;
    let pulse = base.pulses.pulses()[0];
    let table = build_eigentable(&base.molecule, base.thermal.j_max)?;
    let (betas, base_events) = sequence_events(&base.pulses, &base.molecule);
    let kick_idx = base_events[0].kick_idx;
    let t0 = pulse.t0_ps;

    let mut delays = Vec::new();
    let mut d = config.delay_min_ps;
    while d <= config.delay_max_ps + 1e-12 {
        delays.push(d);
        d += config.delay_step_ps;
    }

    // contrast needs the full grid past the second pulse
    if config.objective == ScanObjective::AlignmentContrast {
        let last = t0 + *delays.last().expect("nonempty delay grid");
        if last >= base.grid.t_end_ps {
            return Err(Error::Config {
                field: "scan.delay_max_ps".into(),
                reason: format!(
                    "second pulse at {last} ps leaves no post-pulse window before \
                     t_end = {} ps",
                    base.grid.t_end_ps
                ),
            });
        }
    }

    let prep = |isomer: SpinIsomer| -> Result<_> {
        let ens = boltzmann_weights(&table, isomer, &base.thermal)?;
        let members = fold_members(&ens);
        let max_m = members.iter().map(|m| m.m).max().unwrap_or(0);
        let engines = build_engines(&table, max_m, isomer, &betas);
        Ok((members, engines))
    };
    let (ortho_members, ortho_engines) = prep(SpinIsomer::Ortho)?;
    let para = if config.objective == ScanObjective::AlignmentContrast {
        Some(prep(SpinIsomer::Para)?)
    } else {
        None
    };

    let mut rows = Vec::with_capacity(delays.len());
    for &delay in &delays {
        let t_second = t0 + delay;
        let events = [
            KickEvent { t0_ps: t0, kick_idx },
            KickEvent {
                t0_ps: t_second,
                kick_idx,
            },
        ];
        let objective_value = match config.objective {
            ScanObjective::OrthoEnergySuppression => {
                // energies are constant between kicks: three samples suffice
                let grid = TimeGrid {
                    t_start_ps: t0,
                    t_end_ps: t_second,
                    dt_ps: (t_second - t0) / 2.0,
                };
                let trace = thermal_trace_with_engines(
                    &ortho_members,
                    &ortho_engines,
                    &events,
                    &grid,
                    &table,
                );
                trace.energy_cm1[2] - trace.energy_cm1[1]
            }
            ScanObjective::AlignmentContrast => {
                let grid = base.grid;
                let (para_members, para_engines) = para.as_ref().expect("prepared above");
                let p = thermal_trace_with_engines(
                    para_members,
                    para_engines,
                    &events,
                    &grid,
                    &table,
                );
                let o = thermal_trace_with_engines(
                    &ortho_members,
                    &ortho_engines,
                    &events,
                    &grid,
                    &table,
                );
                grid.times()
                    .iter()
                    .enumerate()
                    .filter(|(_, &t)| t > t_second)
                    .map(|(i, _)| (p.cos2[i] - o.cos2[i]).abs())
                    .fold(0.0, f64::max)
            }
        };
        rows.push(ScanRow {
            delay_ps: delay,
            objective_value,
        });
    }

    let best = match config.objective {
        ScanObjective::OrthoEnergySuppression => rows
            .iter()
            .min_by(|a, b| a.objective_value.total_cmp(&b.objective_value)),
        ScanObjective::AlignmentContrast => rows
            .iter()
            .max_by(|a, b| a.objective_value.total_cmp(&b.objective_value)),
    }
    .expect("nonempty scan");

    Ok(ScanResult {
        objective: config.objective,
        rows: rows.clone(),
        best_delay_ps: best.delay_ps,
        best_objective_value: best.objective_value,
    })
}

fn fmt(v: f64) -> String {
    format!("{v:.11e}")
}

/// Render the alignment trace as CSV with the species-dependent columns
/// time_ps, cos2_para, cos2_ortho, e_para_cm1, e_ortho_cm1.
pub fn trace_csv(trace: &AlignmentTrace) -> String {
    let mut header = vec!["time_ps"];
    if trace.para.is_some() {
        header.push("cos2_para");
    }
    if trace.ortho.is_some() {
        header.push("cos2_ortho");
    }
    if trace.para.is_some() {
        header.push("e_para_cm1");
    }
    if trace.ortho.is_some() {
        header.push("e_ortho_cm1");
    }
    let mut out = header.join(",");
    out.push('\n');
    for (i, &t) in trace.times_ps.iter().enumerate() {
        let mut row = vec![fmt(t)];
        if let Some(p) = &trace.para {
            row.push(fmt(p.cos2[i]));
        }
        if let Some(o) = &trace.ortho {
            row.push(fmt(o.cos2[i]));
        }
        if let Some(p) = &trace.para {
            row.push(fmt(p.energy_cm1[i]));
        }
        if let Some(o) = &trace.ortho {
            row.push(fmt(o.energy_cm1[i]));
        }
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn scan_csv(result: &ScanResult) -> String {
    let mut out = String::from("delay_ps,objective_value\n");
    for row in &result.rows {
        out.push_str(&format!("{},{}\n", fmt(row.delay_ps), fmt(row.objective_value)));
    }
    out
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    let io_err = |source| Error::Io {
        path: path.display().to_string(),
        source,
    };
    let mut file = std::fs::File::create(path).map_err(io_err)?;
    file.write_all(contents.as_bytes()).map_err(io_err)
}

/// Write the trace CSV and return the path of the summary JSON placed
/// beside it.
pub fn write_outputs<S: Serialize>(
    csv: &str,
    summary: &S,
    csv_path: &Path,
) -> Result<PathBuf> {
    write_file(csv_path, csv)?;
    let summary_path = csv_path.with_extension("summary.json");
    let text = serde_json::to_string_pretty(summary).expect("summary serializes");
    write_file(&summary_path, &text)?;
    Ok(summary_path)
}

/// Classified-levels CSV (J, tau, energy_cm1, symmetry, isomer).
pub fn table_csv(table: &EigenstateTable) -> String {
    let mut buf = Vec::new();
    table.write_csv(&mut buf).expect("write to memory");
    String::from_utf8(buf).expect("ascii csv")
}

/// Trace with both species at the default grid for a quick look; used by
/// the demo front end.
pub fn quick_trace(config: &RunConfig) -> Result<AlignmentTrace> {
    simulate(config).map(|(trace, _)| trace)
}
