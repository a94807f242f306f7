//! Rotational quantum dynamics of ortho and para water spin isomers driven
//! by short nonresonant laser pulses.
//!
//! The library builds the asymmetric-top eigenstates of the rigid water
//! molecule, classifies them as para or ortho through the C2v(M) symmetry
//! operations, applies impulsive (delta-kick) Raman excitation and follows
//! the field-free evolution of the alignment factor ⟨cos²θ⟩ and the
//! rotational energy for a thermal ensemble of each isomer.
//!
//! Modules follow the pipeline:
//! [`angular`] (exact 3-j algebra and rank-2 rotation matrix elements) →
//! [`rotor`] (Hamiltonian, eigenstates, para/ortho labels) →
//! [`interaction`] (pulse → kick strengths → kick unitary) →
//! [`dynamics`] (free propagation, observables, pulse sequences) →
//! [`ensemble`] (thermal averaging) →
//! [`config`] / [`scenario`] (run configs, CSV output, delay scans).

pub mod angular;
pub mod config;
pub mod constants;
pub mod dynamics;
pub mod ensemble;
pub mod error;
pub mod interaction;
pub mod rotor;
pub mod scenario;

pub use config::{Config, GridConfig, RunConfig, ScanConfig, ScanObjective, Species};
pub use dynamics::{PulseSequence, TimeGrid, WavepacketState};
pub use ensemble::{AlignmentTrace, ThermalEnsemble, ThermalSpec};
pub use error::Error;
pub use interaction::{KickCoefficients, PulseSpec};
pub use rotor::{EigenstateTable, MolecularSpec, RotorEigenstate, SpinIsomer, SymmetryLabel};
pub use scenario::{simulate, scan_delay, RunSummary, ScanResult};
