//! Thermal averaging over initial rotational eigenstates, per spin-isomer
//! ensembles and basis-size convergence control.
//!
//! Each isomer is normalized over its own rotational partition function:
//! both para and ortho ensembles then start at exactly isotropic
//! ⟨cos²θ⟩ = 1/3, and the 3:1 ortho:para abundance is metadata for
//! mixture-level interpretation only.

use serde::{Deserialize, Serialize};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::constants::thermal_energy_cm1;
use crate::dynamics::{sequence_events, MEngine, MemberTrace, PulseSequence, TimeGrid};
use crate::error::{Error, Result};
use crate::rotor::{build_eigentable, EigenstateTable, MolecularSpec, SpinIsomer};

/// Boltzmann weights below this are pruned from the ensemble (recorded in
/// `ThermalEnsemble::pruned_weight`); negligible at the 1e-6 isotropy tolerance.
pub const PRUNE_THRESHOLD: f64 = 1e-8;

/// Hard cap of the convergence ladder.
pub const CONVERGE_JMAX_CAP: i32 = 30;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermalSpec {
    pub temperature_k: f64,
    pub j_max: i32,
    pub convergence_tol: f64,
}

impl ThermalSpec {
    pub fn validate(&self) -> Result<()> {
        if self.temperature_k <= 0.0 {
            return Err(Error::Config {
                field: "temperature_k".into(),
                reason: format!("must be > 0, got {}", self.temperature_k),
            });
        }
        if self.j_max < 0 {
            return Err(Error::Config {
                field: "jmax".into(),
                reason: format!("must be ≥ 0, got {}", self.j_max),
            });
        }
        Ok(())
    }
}

/// One initial eigenstate |J,τ,m⟩ with its Boltzmann weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleMember {
    pub j: i32,
    pub tau: i32,
    pub m: i32,
    pub weight: f64,
}

#[derive(Debug, Clone)]
pub struct ThermalEnsemble {
    pub isomer: SpinIsomer,
    pub members: Vec<EnsembleMember>,
    /// Rotational partition function of this isomer sector, with energies
    /// referenced to the sector's lowest level.
    pub partition: f64,
    /// Total Boltzmann weight dropped by pruning.
    pub pruned_weight: f64,
}

/// Per-isomer Boltzmann ensemble at temperature T over the (J,τ,m) states
/// with J ≤ thermal.j_max, all 2J+1 m values enumerated explicitly.
pub fn boltzmann_weights(
    table: &EigenstateTable,
    isomer: SpinIsomer,
    thermal: &ThermalSpec,
) -> Result<ThermalEnsemble> {
    thermal.validate()?;
    if table.j_max < thermal.j_max {
        return Err(Error::Config {
            field: "jmax".into(),
            reason: format!(
                "table truncated at J = {} but ensemble requests J = {}",
                table.j_max, thermal.j_max
            ),
        });
    }
    let kt = thermal_energy_cm1(thermal.temperature_k);
    let sector: Vec<_> = table
        .levels()
        .iter()
        .filter(|lvl| lvl.isomer == isomer && lvl.j <= thermal.j_max)
        .collect();
    // reference to the sector minimum so the exponentials cannot underflow
    let e_min = sector
        .iter()
        .map(|lvl| lvl.energy_cm1)
        .fold(f64::INFINITY, f64::min);
    let partition: f64 = sector
        .iter()
        .map(|lvl| (2 * lvl.j + 1) as f64 * (-(lvl.energy_cm1 - e_min) / kt).exp())
        .sum();
    let mut members = Vec::new();
    let mut pruned_weight = 0.0;
    for lvl in sector {
        let weight = (-(lvl.energy_cm1 - e_min) / kt).exp() / partition;
        for m in -lvl.j..=lvl.j {
            if weight < PRUNE_THRESHOLD {
                pruned_weight += weight;
            } else {
                members.push(EnsembleMember {
                    j: lvl.j,
                    tau: lvl.tau,
                    m,
                    weight,
                });
            }
        }
    }
    Ok(ThermalEnsemble {
        isomer,
        members,
        partition,
        pruned_weight,
    })
}

/// Thermal trace of one isomer.
#[derive(Debug, Clone, PartialEq)]
pub struct IsomerTrace {
    pub cos2: Vec<f64>,
    pub energy_cm1: Vec<f64>,
}

/// Per-isomer alignment factor and rotational energy over the output grid.
#[derive(Debug, Clone)]
pub struct AlignmentTrace {
    pub times_ps: Vec<f64>,
    pub para: Option<IsomerTrace>,
    pub ortho: Option<IsomerTrace>,
}

/// Per-m engines for one isomer sector, m = 0..=max_m.
pub fn build_engines(
    table: &EigenstateTable,
    max_m: i32,
    isomer: SpinIsomer,
    betas: &[crate::interaction::KickCoefficients],
) -> Vec<MEngine> {
    let build = |m: i32| MEngine::new(table, m, Some(isomer), betas);
    #[cfg(feature = "parallel")]
    {
        (0..=max_m).into_par_iter().map(build).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..=max_m).map(build).collect()
    }
}

/// Ensemble members folded onto m ≥ 0 (doubled weight for m > 0); the
/// m ↔ -m traces are identical.
pub fn fold_members(ensemble: &ThermalEnsemble) -> Vec<EnsembleMember> {
    let mut effective = Vec::new();
    for mem in &ensemble.members {
        if mem.m > 0 {
            continue;
        }
        let weight = if mem.m < 0 { 2.0 * mem.weight } else { mem.weight };
        effective.push(EnsembleMember {
            m: mem.m.abs(),
            weight,
            ..*mem
        });
    }
    effective
}

/// Weighted sum of member traces. Exploits the m ↔ -m trace symmetry to
/// run only m ≥ 0; the reduction is an ordered sum, bit-stable regardless
/// of the parallel schedule.
pub fn thermal_trace(
    ensemble: &ThermalEnsemble,
    seq: &PulseSequence,
    grid: &TimeGrid,
    table: &EigenstateTable,
    molecule: &MolecularSpec,
) -> Result<IsomerTrace> {
    grid.validate()?;
    let (betas, events) = sequence_events(seq, molecule);
    let effective = fold_members(ensemble);
    let max_m = effective.iter().map(|m| m.m).max().unwrap_or(0);
    let engines = build_engines(table, max_m, ensemble.isomer, &betas);
    Ok(thermal_trace_with_engines(
        &effective, &engines, &events, grid, table,
    ))
}

/// Inner reduction with caller-owned engines, reusable across scan points.
pub fn thermal_trace_with_engines(
    effective: &[EnsembleMember],
    engines: &[MEngine],
    events: &[crate::dynamics::KickEvent],
    grid: &TimeGrid,
    table: &EigenstateTable,
) -> IsomerTrace {
    let run = |mem: &EnsembleMember| -> MemberTrace {
        let engine = &engines[mem.m as usize];
        let start = engine
            .index_of(table, mem.j, mem.tau)
            .expect("ensemble member present in table");
        engine.run_sequence(start, &events, grid)
    };
    let traces: Vec<MemberTrace> = {
        #[cfg(feature = "parallel")]
        {
            effective.par_iter().map(run).collect()
        }
        #[cfg(not(feature = "parallel"))]
        {
            effective.iter().map(run).collect()
        }
    };

    let n = grid.times().len();
    let mut cos2 = vec![0.0; n];
    let mut energy = vec![0.0; n];
    let mut total_weight = 0.0;
    for (mem, trace) in effective.iter().zip(&traces) {
        total_weight += mem.weight;
        for i in 0..n {
            cos2[i] += mem.weight * trace.cos2[i];
            energy[i] += mem.weight * trace.energy_cm1[i];
        }
    }
    // renormalize for the pruned tail so the zero-pulse baseline stays 1/3
    if total_weight > 0.0 {
        for i in 0..n {
            cos2[i] /= total_weight;
            energy[i] /= total_weight;
        }
    }
    IsomerTrace {
        cos2,
        energy_cm1: energy,
    }
}

/// Raise J_max in steps of 2 until the thermal traces of both isomers
/// change by less than `thermal.convergence_tol` anywhere on the grid.
/// Returns the converged J_max, the table and the traces (para, ortho).
pub fn converge_jmax(
    molecule: &MolecularSpec,
    seq: &PulseSequence,
    grid: &TimeGrid,
    thermal: &ThermalSpec,
    start_jmax: i32,
) -> Result<(i32, EigenstateTable, IsomerTrace, IsomerTrace)> {
    let tol = thermal.convergence_tol;
    let mut previous: Option<(IsomerTrace, IsomerTrace)> = None;
    let mut j_max = start_jmax.max(4);
    loop {
        let table = build_eigentable(molecule, j_max)?;
        let spec = ThermalSpec {
            j_max,
            ..*thermal
        };
        let para = thermal_trace(
            &boltzmann_weights(&table, SpinIsomer::Para, &spec)?,
            seq,
            grid,
            &table,
            molecule,
        )?;
        let ortho = thermal_trace(
            &boltzmann_weights(&table, SpinIsomer::Ortho, &spec)?,
            seq,
            grid,
            &table,
            molecule,
        )?;
        if let Some((prev_para, prev_ortho)) = &previous {
            let delta = trace_distance(prev_para, &para).max(trace_distance(prev_ortho, &ortho));
            if delta < tol {
                return Ok((j_max, table, para, ortho));
            }
        }
        if j_max >= CONVERGE_JMAX_CAP {
            return Err(Error::NonConvergence {
                cap: CONVERGE_JMAX_CAP,
                tol,
            });
        }
        previous = Some((para, ortho));
        j_max += 2;
    }
}

fn trace_distance(a: &IsomerTrace, b: &IsomerTrace) -> f64 {
    a.cos2
        .iter()
        .zip(&b.cos2)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interaction::PulseSpec;

    fn thermal(t: f64, j_max: i32) -> ThermalSpec {
        ThermalSpec {
            temperature_k: t,
            j_max,
            convergence_tol: 1e-4,
        }
    }

    fn reference_pulse(t0_ps: f64) -> PulseSpec {
        PulseSpec {
            peak_intensity_w_cm2: 3e13,
            sigma_fs: 20.0,
            t0_ps,
        }
    }

    #[test]
    fn cold_limit_para_is_ground_state() {
        let table = build_eigentable(&MolecularSpec::water(), 4).unwrap();
        let ens = boltzmann_weights(&table, SpinIsomer::Para, &thermal(0.01, 4)).unwrap();
        assert_eq!(ens.members.len(), 1);
        assert_eq!((ens.members[0].j, ens.members[0].tau, ens.members[0].m), (0, 0, 0));
        assert!((ens.members[0].weight - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cold_limit_ortho_is_lowest_triplet() {
        let table = build_eigentable(&MolecularSpec::water(), 4).unwrap();
        let ens = boltzmann_weights(&table, SpinIsomer::Ortho, &thermal(0.01, 4)).unwrap();
        assert_eq!(ens.members.len(), 3);
        for (mem, m) in ens.members.iter().zip([-1, 0, 1]) {
            assert_eq!((mem.j, mem.tau, mem.m), (1, -1, m));
            assert!((mem.weight - 1.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn weights_normalized_per_isomer() {
        let table = build_eigentable(&MolecularSpec::water(), 10).unwrap();
        for isomer in [SpinIsomer::Para, SpinIsomer::Ortho] {
            let ens = boltzmann_weights(&table, isomer, &thermal(20.0, 10)).unwrap();
            let total: f64 = ens.members.iter().map(|m| m.weight).sum();
            assert!(
                (total + ens.pruned_weight - 1.0).abs() < 1e-12,
                "{isomer}: {total}"
            );
        }
    }

    #[test]
    fn low_j_dominates_at_20k() {
        let table = build_eigentable(&MolecularSpec::water(), 10).unwrap();
        let ens = boltzmann_weights(&table, SpinIsomer::Para, &thermal(20.0, 10)).unwrap();
        let low: f64 = ens
            .members
            .iter()
            .filter(|m| m.j <= 4)
            .map(|m| m.weight)
            .sum();
        assert!(low > 0.999, "J ≤ 4 weight = {low}");
    }

    #[test]
    fn zero_pulse_isotropy() {
        let molecule = MolecularSpec::water();
        let table = build_eigentable(&molecule, 8).unwrap();
        let grid = TimeGrid {
            t_start_ps: 0.0,
            t_end_ps: 1.0,
            dt_ps: 0.1,
        };
        for t in [5.0, 20.0, 100.0] {
            for isomer in [SpinIsomer::Para, SpinIsomer::Ortho] {
                let ens = boltzmann_weights(&table, isomer, &thermal(t, 8)).unwrap();
                let trace =
                    thermal_trace(&ens, &PulseSequence::empty(), &grid, &table, &molecule).unwrap();
                for &v in &trace.cos2 {
                    assert!((v - 1.0 / 3.0).abs() < 1e-6, "T={t} {isomer}: {v}");
                }
            }
        }
    }

    #[test]
    fn m_symmetry_of_member_traces() {
        let molecule = MolecularSpec::water();
        let table = build_eigentable(&molecule, 8).unwrap();
        let seq = PulseSequence::new(vec![reference_pulse(0.0)]).unwrap();
        let grid = TimeGrid {
            t_start_ps: 0.0,
            t_end_ps: 2.0,
            dt_ps: 0.05,
        };
        for m in [1, 2] {
            let plus =
                crate::dynamics::run_sequence(&table, &molecule, 2, -2, m, &seq, &grid).unwrap();
            let minus =
                crate::dynamics::run_sequence(&table, &molecule, 2, -2, -m, &seq, &grid).unwrap();
            for (a, b) in plus.cos2.iter().zip(&minus.cos2) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn thermal_trace_is_weighted_member_sum() {
        // recompute a small ensemble without the m ≥ 0 shortcut
        let molecule = MolecularSpec::water();
        let table = build_eigentable(&molecule, 6).unwrap();
        let seq = PulseSequence::new(vec![reference_pulse(0.0)]).unwrap();
        let grid = TimeGrid {
            t_start_ps: 0.0,
            t_end_ps: 1.0,
            dt_ps: 0.1,
        };
        let ens = boltzmann_weights(&table, SpinIsomer::Para, &thermal(5.0, 6)).unwrap();
        let fast = thermal_trace(&ens, &seq, &grid, &table, &molecule).unwrap();
        let n = grid.times().len();
        let mut slow = vec![0.0; n];
        let mut total = 0.0;
        for mem in &ens.members {
            let t = crate::dynamics::run_sequence(
                &table, &molecule, mem.j, mem.tau, mem.m, &seq, &grid,
            )
            .unwrap();
            total += mem.weight;
            for i in 0..n {
                slow[i] += mem.weight * t.cos2[i];
            }
        }
        for i in 0..n {
            assert!((fast.cos2[i] - slow[i] / total).abs() < 1e-10);
        }
    }

    #[test]
    fn unreachable_tolerance_errors_at_cap() {
        let molecule = MolecularSpec::water();
        let seq = PulseSequence::new(vec![reference_pulse(0.0)]).unwrap();
        let grid = TimeGrid {
            t_start_ps: 0.0,
            t_end_ps: 0.2,
            dt_ps: 0.1,
        };
        let spec = ThermalSpec {
            temperature_k: 5.0,
            j_max: 4,
            convergence_tol: 0.0,
        };
        // tol = 0 can never be met; keep the run tiny and cold
        let err = converge_jmax(&molecule, &seq, &grid, &spec, 4).unwrap_err();
        assert!(matches!(err, Error::NonConvergence { .. }));
    }

    #[test]
    fn zero_pulse_converges_immediately() {
        let molecule = MolecularSpec::water();
        let grid = TimeGrid {
            t_start_ps: 0.0,
            t_end_ps: 0.5,
            dt_ps: 0.1,
        };
        let spec = thermal(20.0, 4);
        let (j_max, _, para, ortho) =
            converge_jmax(&molecule, &PulseSequence::empty(), &grid, &spec, 4).unwrap();
        assert_eq!(j_max, 6); // one comparison step above the start
        for &v in para.cos2.iter().chain(&ortho.cos2) {
            assert!((v - 1.0 / 3.0).abs() < 1e-6);
        }
    }
}
