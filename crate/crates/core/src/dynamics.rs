//! Field-free propagation, the ⟨cos²θ⟩ and rotational-energy observables,
//! and multi-pulse sequencing. Between kicks the evolution is exact phase
//! rotation, so the sampling grid affects output resolution only.

use nalgebra::{Complex, DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::constants::CM1_TO_RAD_PER_PS;
use crate::error::{Error, Result};
use crate::interaction::{
    eigenbasis_d_matrix, kick_matrix_on, kick_strengths, KickCoefficients, KickOperator, PulseSpec,
};
use crate::rotor::{EigenstateTable, MolecularSpec, SpinIsomer};

type C64 = Complex<f64>;

/// Rotational wavepacket at fixed m: complex amplitudes over the (J,τ)
/// levels of `EigenstateTable::basis_for_m(m)`, with a time stamp.
#[derive(Debug, Clone)]
pub struct WavepacketState {
    pub m: i32,
    pub amplitudes: DVector<C64>,
    pub t_ps: f64,
}

impl WavepacketState {
    /// Pure eigenstate |J,τ,m⟩ at t = 0.
    pub fn from_eigenstate(table: &EigenstateTable, j: i32, tau: i32, m: i32) -> Result<Self> {
        if j > table.j_max || tau.abs() > j || m.abs() > j {
            return Err(Error::Config {
                field: "initial state".into(),
                reason: format!("(J={j}, tau={tau}, m={m}) outside the J ≤ {} table", table.j_max),
            });
        }
        let idx = table.basis_for_m(m);
        let pos = idx
            .iter()
            .position(|&i| table.levels()[i].j == j && table.levels()[i].tau == tau)
            .expect("level present");
        let mut amplitudes = DVector::from_element(idx.len(), C64::new(0.0, 0.0));
        amplitudes[pos] = C64::new(1.0, 0.0);
        Ok(WavepacketState {
            m,
            amplitudes,
            t_ps: 0.0,
        })
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }
}

/// Uniform output grid in picoseconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub t_start_ps: f64,
    pub t_end_ps: f64,
    pub dt_ps: f64,
}

impl TimeGrid {
    pub fn validate(&self) -> Result<()> {
        if self.dt_ps <= 0.0 {
            return Err(Error::Config {
                field: "grid.dt_ps".into(),
                reason: format!("must be > 0, got {}", self.dt_ps),
            });
        }
        if self.t_end_ps <= self.t_start_ps {
            return Err(Error::Config {
                field: "grid.t_end_ps".into(),
                reason: "t_end must exceed t_start".into(),
            });
        }
        Ok(())
    }

    pub fn times(&self) -> Vec<f64> {
        let n = ((self.t_end_ps - self.t_start_ps) / self.dt_ps).round() as usize;
        (0..=n).map(|i| self.t_start_ps + i as f64 * self.dt_ps).collect()
    }
}

/// Ordered pulses with strictly increasing arrival times and impulsive
/// separability (gap > 5σ of the earlier pulse).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PulseSequence {
    pulses: Vec<PulseSpec>,
}

impl PulseSequence {
    pub fn new(pulses: Vec<PulseSpec>) -> Result<Self> {
        for p in &pulses {
            p.validate()?;
        }
        for pair in pulses.windows(2) {
            if pair[1].t0_ps <= pair[0].t0_ps {
                return Err(Error::Config {
                    field: "pulses".into(),
                    reason: format!(
                        "arrival times must strictly increase: {} then {}",
                        pair[0].t0_ps, pair[1].t0_ps
                    ),
                });
            }
            let min_gap_ps = 5.0 * pair[0].sigma_fs * 1e-3;
            if pair[1].t0_ps - pair[0].t0_ps <= min_gap_ps {
                return Err(Error::Config {
                    field: "pulses".into(),
                    reason: format!(
                        "pulses at {} and {} ps closer than 5σ = {} ps",
                        pair[0].t0_ps, pair[1].t0_ps, min_gap_ps
                    ),
                });
            }
        }
        Ok(PulseSequence { pulses })
    }

    pub fn empty() -> Self {
        PulseSequence { pulses: Vec::new() }
    }

    pub fn pulses(&self) -> &[PulseSpec] {
        &self.pulses
    }
}

/// Free propagation by dt: each amplitude picks up exp(-i·2πc·E·dt).
pub fn free_propagate(state: &WavepacketState, table: &EigenstateTable, dt_ps: f64) -> WavepacketState {
    let idx = table.basis_for_m(state.m);
    let amplitudes = DVector::from_iterator(
        idx.len(),
        idx.iter().zip(state.amplitudes.iter()).map(|(&i, c)| {
            let omega = CM1_TO_RAD_PER_PS * table.levels()[i].energy_cm1;
            c * C64::new(0.0, -omega * dt_ps).exp()
        }),
    );
    WavepacketState {
        m: state.m,
        amplitudes,
        t_ps: state.t_ps + dt_ps,
    }
}

/// cos²θ = (2·D²₀₀ + 1)/3 in the per-m eigenbasis.
pub fn cos2theta_matrix(table: &EigenstateTable, m: i32) -> DMatrix<f64> {
    let idx = table.basis_for_m(m);
    cos2theta_matrix_on(table, m, &idx)
}

pub(crate) fn cos2theta_matrix_on(
    table: &EigenstateTable,
    m: i32,
    level_idx: &[usize],
) -> DMatrix<f64> {
    let d00 = eigenbasis_d_matrix(table, m, 0, level_idx);
    let dim = level_idx.len();
    (d00 * 2.0 + DMatrix::identity(dim, dim)) / 3.0
}

/// ⟨c|M|c⟩ for a real symmetric observable; asserts the imaginary residue
/// stays below 1e-10.
pub fn expect_cos2(state: &WavepacketState, cos2: &DMatrix<f64>) -> f64 {
    let re = state.amplitudes.map(|c| c.re);
    let im = state.amplitudes.map(|c| c.im);
    let m_re = cos2 * &re;
    let m_im = cos2 * &im;
    let value = re.dot(&m_re) + im.dot(&m_im);
    let residue = (re.dot(&m_im) - im.dot(&m_re)).abs();
    assert!(residue < 1e-10, "imaginary residue {residue:e} in ⟨cos²θ⟩");
    value
}

/// Σ |c_{Jτ}|²·E^{Jτ} in cm⁻¹.
pub fn expect_energy(state: &WavepacketState, table: &EigenstateTable) -> f64 {
    let idx = table.basis_for_m(state.m);
    idx.iter()
        .zip(state.amplitudes.iter())
        .map(|(&i, c)| c.norm_sqr() * table.levels()[i].energy_cm1)
        .sum()
}

/// A kick scheduled at `t0_ps`, referring to a precomputed operator.
#[derive(Debug, Clone, Copy)]
pub struct KickEvent {
    pub t0_ps: f64,
    pub kick_idx: usize,
}

/// Observables of one initial state over the output grid.
#[derive(Debug, Clone)]
pub struct MemberTrace {
    pub cos2: Vec<f64>,
    pub energy_cm1: Vec<f64>,
}

/// Per-m workspace: basis slice, level frequencies, the cos²θ matrix and
/// the eigendecomposed kick operators. Optionally restricted to one isomer
/// sector (the kick never couples the sectors, so the restriction is exact).
#[derive(Debug, Clone)]
pub struct MEngine {
    pub m: i32,
    level_idx: Vec<usize>,
    energies_cm1: Vec<f64>,
    omegas: Vec<f64>,
    cos2: DMatrix<f64>,
    kicks: Vec<KickOperator>,
}

impl MEngine {
    pub fn new(
        table: &EigenstateTable,
        m: i32,
        sector: Option<SpinIsomer>,
        kick_betas: &[KickCoefficients],
    ) -> Self {
        let level_idx: Vec<usize> = table
            .basis_for_m(m)
            .into_iter()
            .filter(|&i| sector.is_none_or(|iso| table.levels()[i].isomer == iso))
            .collect();
        let energies_cm1: Vec<f64> = level_idx
            .iter()
            .map(|&i| table.levels()[i].energy_cm1)
            .collect();
        let omegas = energies_cm1.iter().map(|e| CM1_TO_RAD_PER_PS * e).collect();
        let cos2 = cos2theta_matrix_on(table, m, &level_idx);
        let kicks = kick_betas
            .iter()
            .map(|betas| {
                KickOperator::from_matrix(&kick_matrix_on(table, m, betas, &level_idx))
            })
            .collect();
        MEngine {
            m,
            level_idx,
            energies_cm1,
            omegas,
            cos2,
            kicks,
        }
    }

    pub fn dim(&self) -> usize {
        self.level_idx.len()
    }

    pub fn index_of(&self, table: &EigenstateTable, j: i32, tau: i32) -> Option<usize> {
        self.level_idx
            .iter()
            .position(|&i| table.levels()[i].j == j && table.levels()[i].tau == tau)
    }

    /// Delta kicks at their arrival times, exact phase evolution in
    /// between, observables sampled on the grid. A sample that coincides
    /// with a kick sees the post-kick state (t = t0⁺).
    pub fn run_sequence(
        &self,
        start_idx: usize,
        events: &[KickEvent],
        grid: &TimeGrid,
    ) -> MemberTrace {
        let dim = self.dim();
        let mut re = DVector::<f64>::zeros(dim);
        let mut im = DVector::<f64>::zeros(dim);
        re[start_idx] = 1.0;

        let times = grid.times();
        let mut cos2 = Vec::with_capacity(times.len());
        let mut energy = Vec::with_capacity(times.len());
        let mut t = grid.t_start_ps;
        let mut next_event = 0;

        let advance = |re: &mut DVector<f64>, im: &mut DVector<f64>, from: f64, to: f64| {
            if to == from {
                return;
            }
            for i in 0..dim {
                let phase = -self.omegas[i] * (to - from);
                let (s, c) = phase.sin_cos();
                let (r0, i0) = (re[i], im[i]);
                re[i] = r0 * c - i0 * s;
                im[i] = r0 * s + i0 * c;
            }
        };

        for &t_sample in &times {
            while next_event < events.len() && events[next_event].t0_ps <= t_sample + 1e-12 {
                let ev = &events[next_event];
                advance(&mut re, &mut im, t, ev.t0_ps);
                t = ev.t0_ps;
                let amps = DVector::from_fn(dim, |i, _| C64::new(re[i], im[i]));
                let kicked = self.kicks[ev.kick_idx].apply(&amps);
                for i in 0..dim {
                    re[i] = kicked[i].re;
                    im[i] = kicked[i].im;
                }
                next_event += 1;
            }
            advance(&mut re, &mut im, t, t_sample);
            t = t_sample;

            let m_re = &self.cos2 * &re;
            let m_im = &self.cos2 * &im;
            cos2.push(re.dot(&m_re) + im.dot(&m_im));
            energy.push(
                (0..dim)
                    .map(|i| (re[i] * re[i] + im[i] * im[i]) * self.energies_cm1[i])
                    .sum(),
            );
        }
        MemberTrace {
            cos2,
            energy_cm1: energy,
        }
    }
}

/// Kick events and the deduplicated kick strengths of a pulse sequence.
pub fn sequence_events(
    seq: &PulseSequence,
    molecule: &MolecularSpec,
) -> (Vec<KickCoefficients>, Vec<KickEvent>) {
    let mut betas: Vec<KickCoefficients> = Vec::new();
    let mut events = Vec::new();
    for pulse in seq.pulses() {
        let b = kick_strengths(pulse, molecule);
        let kick_idx = match betas.iter().position(|x| *x == b) {
            Some(i) => i,
            None => {
                betas.push(b);
                betas.len() - 1
            }
        };
        events.push(KickEvent {
            t0_ps: pulse.t0_ps,
            kick_idx,
        });
    }
    (betas, events)
}

/// Trace of one initial eigenstate |J,τ,m⟩ through a pulse sequence.
pub fn run_sequence(
    table: &EigenstateTable,
    molecule: &MolecularSpec,
    j: i32,
    tau: i32,
    m: i32,
    seq: &PulseSequence,
    grid: &TimeGrid,
) -> Result<MemberTrace> {
    grid.validate()?;
    let (betas, events) = sequence_events(seq, molecule);
    let engine = MEngine::new(table, m, None, &betas);
    let start = engine.index_of(table, j, tau).ok_or_else(|| Error::Config {
        field: "initial state".into(),
        reason: format!("(J={j}, tau={tau}, m={m}) not in the table"),
    })?;
    Ok(engine.run_sequence(start, &events, grid))
}
